use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter fell outside its admissible range.
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("operator is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("effect operator is not positive semi-definite (min eigenvalue {0:e})")]
    InvalidEffect(f64),

    #[error("invalid state: {0}")]
    State(&'static str),

    #[error("brute-force enumeration over {n} settings exceeds the limit of {limit}")]
    ResourceLimit { n: u32, limit: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            range: "[0, 1]",
        })
    }
}
