use std::path::PathBuf;

/// Errors raised by the solvers and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-physical state{}: rho = {rho}, internal energy = {internal_energy}", cell_suffix(*.cell))]
    NonPhysicalState {
        cell: Option<usize>,
        rho: f64,
        internal_energy: f64,
    },

    #[error("unsupported moment order {0} (maximum is 4)")]
    Unsupported(usize),

    #[error("cell {cell} holds {count} particle(s) or has zero velocity spread")]
    DegenerateCell { cell: usize, count: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

fn cell_suffix(cell: Option<usize>) -> String {
    match cell {
        Some(i) => format!(" in cell {i}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach a cell index to a `NonPhysicalState` error.
    pub(crate) fn at_cell(self, i: usize) -> Self {
        match self {
            Error::NonPhysicalState {
                rho,
                internal_energy,
                ..
            } => Error::NonPhysicalState {
                cell: Some(i),
                rho,
                internal_energy,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
