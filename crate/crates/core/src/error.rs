use num_complex::Complex64;
use thiserror::Error;

/// Errors shared across the solver pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Evaluation landed on (or too close to) a pole of the dispersive model.
    #[error(
        "evaluation at a material pole: |denominator| = {magnitude:.3e} below guard {guard:.3e}"
    )]
    Pole { magnitude: f64, guard: f64 },

    /// Argument outside the domain of a special function or kernel.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// Two distinct resonators overlap.
    #[error("overlapping resonators: centre distance {dist:.6e} <= radius sum {radius_sum:.6e}")]
    Overlap { dist: f64, radius_sum: f64 },

    /// Quadrature failed its own error estimate.
    #[error(
        "quadrature error in {what}: estimated error {estimate:.3e} exceeds tolerance {tol:.3e}"
    )]
    Quadrature {
        what: &'static str,
        estimate: f64,
        tol: f64,
    },

    /// Root iteration did not converge.
    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    NoConvergence { iterations: usize, last: Complex64 },

    /// Muller's interpolating parabola collapsed (coincident iterates).
    #[error("degenerate Muller triple at iterate {at}")]
    DegenerateTriple { at: Complex64 },

    /// Leading cubic coefficient underflowed and the quadratic fallback failed too.
    #[error("degenerate cubic: |leading coefficient| = {magnitude:.3e}")]
    DegenerateCubic { magnitude: f64 },

    /// Frequency quadratic has a vanishing leading coefficient.
    #[error("degenerate quadratic denominator: |2a| = {magnitude:.3e}")]
    DegenerateDenominator { magnitude: f64 },

    /// Target frequencies make the size condition ill-posed.
    #[error("degenerate design targets: {detail}")]
    DegenerateTargets { detail: String },

    /// Bracket endpoints do not straddle the root.
    #[error("no sign change over bracket [{lo:.6e}, {hi:.6e}] (f = {f_lo:.3e}, {f_hi:.3e})")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// The two pivots feeding the distance elimination coincide.
    #[error("degenerate pivot pair: |b1 - b2| = {separation:.3e}")]
    DegenerateB { separation: f64 },

    /// All sign branches of the distance quadratic were rejected.
    #[error("all branches rejected: {reasons:?}")]
    AllBranchesRejected { reasons: Vec<String> },

    /// Inner factor of the distance reconstruction vanishes.
    #[error("degenerate factor in distance reconstruction: |{what}| = {magnitude:.3e}")]
    DegenerateFactor { what: &'static str, magnitude: f64 },

    /// A nominally real quantity picked up too much imaginary part.
    #[error("imaginary leakage in {what}: |Im| = {imag:.3e} exceeds {tol:.3e}")]
    ComplexLeak {
        what: &'static str,
        imag: f64,
        tol: f64,
    },

    /// Configuration file rejected.
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
