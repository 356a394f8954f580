use thiserror::Error;

/// Errors raised by parameter validation and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "geometrically infeasible: UAV aperture radius {uav_radius} m is not smaller than the FSO footprint radius {fso_radius} m"
    )]
    GeometricInfeasibility { fso_radius: f64, uav_radius: f64 },

    #[error("{function}: argument {value} outside domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error(
        "quadrature did not converge within {subdivisions} subdivisions (best estimate {estimate}, error estimate {error_estimate})"
    )]
    Convergence {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("objective has no feasible point on [{lo}, {hi}]")]
    NoFeasiblePoint { lo: f64, hi: f64 },

    #[error("acquisition did not terminate within {attempts} attempts (pulse success probability is effectively zero)")]
    NonTermination { attempts: u64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(function: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            function,
            value,
            expected,
        }
    }
}
