//! Run configuration, read from a flat JSON object.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::fluid::{Limiter, Order, SchemeConfig};
use crate::harness::solvers::{CollisionSource, MgOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestCase {
    Accuracy,
    Sod,
    Unsteady,
    CustomRiemann,
}

impl std::str::FromStr for TestCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::Config(format!("unknown test case {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Mc,
    Mg,
    Dvm,
    Euler,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Mc => "mc",
            Solver::Mg => "mg",
            Solver::Dvm => "dvm",
            Solver::Euler => "euler",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Solver::Mc | Solver::Mg)
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::Config(format!("unknown solver {s:?}")))
    }
}

/// Accept either a single value or a list.
fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

/// `(rho, u, T)` of one side of a Riemann problem.
pub type StateTriple = [f64; 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub test_case: TestCase,
    #[serde(deserialize_with = "one_or_many")]
    pub solver: Vec<Solver>,
    #[serde(deserialize_with = "one_or_many")]
    pub eps: Vec<f64>,
    pub n_cells: usize,
    pub n_per_cell: usize,
    /// Defaults per test case when absent.
    pub t_final: Option<f64>,
    pub cfl: f64,
    /// Defaults per test case when absent.
    pub order: Option<Order>,
    pub limiter: Limiter,
    pub beta_threshold: f64,
    /// Collision term of the evolved third moment in the MG solver.
    pub third_source: CollisionSource,
    pub seed: u64,
    pub n_realizations: usize,
    pub output_dir: PathBuf,
    /// Riemann data; default per test case when absent.
    pub left: Option<StateTriple>,
    pub right: Option<StateTriple>,
    pub x0: Option<f64>,
    /// Velocity nodes of the discrete-velocity reference.
    pub n_velocities: usize,
    /// Error study: particles per cell and realizations.
    pub study_n: Vec<usize>,
    pub study_m: usize,
    pub study_ref_n: usize,
    pub study_ref_m: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            test_case: TestCase::Accuracy,
            solver: vec![Solver::Mg],
            eps: vec![1e-2],
            n_cells: 100,
            n_per_cell: 100,
            t_final: None,
            cfl: 0.5,
            order: None,
            limiter: Limiter::Minmod,
            beta_threshold: 1e-2,
            third_source: CollisionSource::Expected,
            seed: 1,
            n_realizations: 1,
            output_dir: PathBuf::from("out"),
            left: None,
            right: None,
            x0: None,
            n_velocities: 64,
            study_n: vec![25, 50, 100, 200, 400],
            study_m: 20,
            study_ref_n: 3200,
            study_ref_m: 8,
        }
    }
}

impl SimConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_owned(),
            source,
        })
    }

    /// Fill every per-test default so the configuration written next to
    /// the outputs is complete.
    pub fn resolved(mut self) -> Result<Self> {
        let (t_final, order, left, right, x0) = match self.test_case {
            TestCase::Accuracy => (0.05, Order::First, None, None, None),
            TestCase::Sod => (0.05, Order::Switch, Some([1.0, 0.0, 1.0]), Some([0.125, 0.0, 0.8]), Some(0.5)),
            TestCase::Unsteady => (0.065, Order::First, Some(UNSTEADY_LEFT), Some([1.0, 0.0, 1.0]), Some(0.3)),
            TestCase::CustomRiemann => (0.05, Order::First, None, None, Some(0.5)),
        };
        self.t_final.get_or_insert(t_final);
        self.order.get_or_insert(order);
        if self.test_case != TestCase::Accuracy {
            self.x0 = self.x0.or(x0);
            self.left = self.left.or(left);
            self.right = self.right.or(right);
            if self.left.is_none() || self.right.is_none() {
                return Err(Error::Config("custom-riemann needs both `left` and `right` states".into()));
            }
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_owned()));
        if self.solver.is_empty() {
            return bad("at least one solver is required");
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0)) {
            return bad("eps must be a non-empty list of positive numbers");
        }
        if self.n_cells < 3 {
            return bad("n_cells must be at least 3");
        }
        if self.n_per_cell == 0 || self.n_realizations == 0 {
            return bad("n_per_cell and n_realizations must be positive");
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl must lie in (0, 1]");
        }
        if !(self.t_final.unwrap_or(1.0) >= 0.0) {
            return bad("t_final must be non-negative");
        }
        if !(self.beta_threshold >= 0.0) {
            return bad("beta_threshold must be non-negative");
        }
        if self.n_velocities < 3 {
            return bad("n_velocities must be at least 3");
        }
        if let Some(x0) = self.x0 {
            if !(x0 > 0.0 && x0 < 1.0) {
                return bad("x0 must lie inside the unit domain");
            }
        }
        for s in [self.left, self.right].into_iter().flatten() {
            if !(s[0] > 0.0 && s[2] > 0.0) || s.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("non-physical Riemann state {s:?}")));
            }
        }
        if self.study_n.windows(2).any(|w| w[0] >= w[1]) || self.study_n.first() == Some(&0) {
            return bad("study_n must be strictly increasing and positive");
        }
        if self.study_m < 2 || self.study_ref_m == 0 || self.study_ref_n == 0 {
            return bad("study_m must be at least 2 and the reference sizes positive");
        }
        Ok(())
    }

    pub fn scheme(&self) -> SchemeConfig {
        SchemeConfig {
            order: self.order.unwrap_or(Order::First),
            limiter: self.limiter,
            beta_threshold: self.beta_threshold,
            cfl: self.cfl,
        }
    }

    pub fn mg_options(&self) -> MgOptions {
        MgOptions {
            source: self.third_source,
            ..MgOptions::default()
        }
    }
}

/// Post-shock state of a Mach-3 shock running into `(1, 0, 1)` for `gamma = 3`.
pub const UNSTEADY_LEFT: StateTriple = [1.8, 2.309_401_076_758_503, 7.222_222_222_222_222];
