use std::fmt;

use thiserror::Error;

/// Why a parameter tuple cannot be evaluated by a given formula.
#[derive(Debug, Clone, PartialEq)]
pub enum Singularity {
    /// `c = 1 ± ν ± j` is a nonpositive integer, so `(c)_n` vanishes.
    PochhammerBase { c: f64 },
    /// `ν + j − 1 = 0` in the `S(−ν, −j)` prefactor.
    MinusMinusPrefactor { nu_plus_j_minus_one: f64 },
    /// A gamma function in a numerator sits on a pole.
    GammaPole { factor: &'static str, arg: f64 },
    /// A rational coefficient divides by zero.
    ZeroDivisor { factor: &'static str },
    /// A series denominator parameter is a nonpositive integer reached before termination.
    HyperDenominator { param: f64 },
}

impl fmt::Display for Singularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Singularity::PochhammerBase { c } => {
                write!(f, "Pochhammer base nonpositive integer (c = {c})")
            }
            Singularity::MinusMinusPrefactor { nu_plus_j_minus_one } => write!(
                f,
                "S(-nu,-j) prefactor divides by nu+j-1 = {nu_plus_j_minus_one}"
            ),
            Singularity::GammaPole { factor, arg } => {
                write!(f, "gamma pole in numerator factor {factor} at {arg}")
            }
            Singularity::ZeroDivisor { factor } => write!(f, "zero divisor in {factor}"),
            Singularity::HyperDenominator { param } => write!(
                f,
                "hypergeometric denominator parameter {param} is a nonpositive integer"
            ),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("gamma pole at x = {0}")]
    Pole(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid series parameters: {0}")]
    Parameter(String),
    #[error("series did not converge within {n_max} terms")]
    NoConvergence { n_max: usize },
    #[error("singular case: {0}")]
    Singular(Singularity),
    #[error("invalid truncation policy: {0}")]
    Policy(String),
}

impl Error {
    pub fn is_singular(&self) -> bool {
        matches!(self, Error::Singular(_))
    }
}

impl From<Singularity> for Error {
    fn from(s: Singularity) -> Self {
        Error::Singular(s)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
