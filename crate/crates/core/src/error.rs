use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("{0} is singular at theta = 1/6")]
    Singular(&'static str),
    #[error("hull of radius {radius} is not determined: frontier vertex at distance {distance}")]
    InsufficientExploration { radius: u32, distance: u32 },
    #[error("operation needs hole geometry but the map holds count-only holes")]
    MissingGeometry,
    #[error("vertex {0} is not on the frontier")]
    NotOnFrontier(u32),
    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),
}

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}
