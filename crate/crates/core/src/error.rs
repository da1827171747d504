use thiserror::Error;

/// Errors raised by the toolkit. Each variant maps onto one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of a bound (sign convention, missing parameter, geometric cap) is violated.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Malformed input file or argument.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A mesh failed combinatorial validation (boundary, non-manifold, non-orientable).
    #[error("mesh validation failed: {message}{}", format_edges(.edges))]
    MeshValidation {
        message: String,
        edges: Vec<(usize, usize)>,
    },

    /// Geometric quality problem: degenerate triangles or negative Hodge-star weights.
    #[error("mesh quality: {0}")]
    MeshQuality(String),

    /// A Dirichlet domain has no interior degrees of freedom.
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    /// Dirichlet domains expected to be disjoint share degrees of freedom.
    #[error("domains overlap: {0}")]
    Overlap(String),

    /// A numerical procedure did not converge.
    #[error("solver error: {message}")]
    Solver {
        message: String,
        diagnostics: Vec<f64>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_edges(edges: &[(usize, usize)]) -> String {
    if edges.is_empty() {
        return String::new();
    }
    let shown: Vec<String> = edges
        .iter()
        .take(20)
        .map(|(a, b)| format!("({a},{b})"))
        .collect();
    let more = if edges.len() > 20 {
        format!(" and {} more", edges.len() - 20)
    } else {
        String::new()
    };
    format!("; offending edges: {}{more}", shown.join(" "))
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub(crate) fn solver(msg: impl Into<String>) -> Self {
        Error::Solver {
            message: msg.into(),
            diagnostics: Vec::new(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Hypothesis(_) | Error::Parse { .. } | Error::Overlap(_) => 2,
            Error::DegenerateDomain(_) => 2,
            Error::MeshValidation { .. } | Error::MeshQuality(_) => 3,
            Error::Solver { .. } | Error::Io(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
