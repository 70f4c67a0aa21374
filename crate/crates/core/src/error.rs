use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "root not bracketed for mode {k}: F({lo:e}) = {f_lo:e}, F({hi:e}) = {f_hi:e}"
    )]
    Bracket {
        k: i64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("oracle failed: {0}")]
    Oracle(String),

    #[error("frequency {0:e} coincides with a reservoir pole")]
    Pole(f64),

    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    StepSize { dt: f64, bound: f64 },

    #[error("{0} is unavailable")]
    Unavailable(&'static str),

    #[error("outside the quadrature envelope: {0}")]
    OutOfEnvelope(String),

    #[error("bad sample grid: {0}")]
    Format(String),

    #[error("degenerate window: {0} samples")]
    DegenerateWindow(usize),

    #[error("frequency grid too coarse: {0}")]
    Resolution(String),

    #[error("half-maximum crossing outside the grid at index {0}")]
    Range(usize),

    #[error("revival series truncated: n_max = {n_max} but the grid reaches revival {needed}")]
    Truncation { n_max: usize, needed: usize },
}

impl Error {
    /// Whether the failure comes from a numerical solver rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Bracket { .. } | Error::Oracle(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
