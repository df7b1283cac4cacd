use thiserror::Error;

/// Failure modes surfaced by parameter validation, the analytic
/// evaluators, and the Monte Carlo estimators.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested evaluation is well defined but lies outside the
    /// formula's validity region (for example the error-floor regime
    /// `eps0 * epss >= 1`, where the closed forms do not exist and
    /// callers should fall back to Monte Carlo or quadrature).
    #[error("outside analytic domain: {0}")]
    OutsideDomain(String),

    /// The exact outage expression is only evaluated up to this many
    /// grant-free users; larger counts should use the quadrature path.
    #[error("user count {0} exceeds the supported exact-form range (max {MAX_EXACT_USERS})")]
    UnsupportedUserCount(usize),

    /// A numeric routine failed to reach its accuracy target.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Largest grant-free user count accepted by the exact outage forms.
/// The alternating binomial sums lose roughly one decimal digit per
/// user even in extended precision, and past this point the quadrature
/// route is both faster and more trustworthy.
pub const MAX_EXACT_USERS: usize = 12;
