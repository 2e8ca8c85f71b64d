use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The step-halving check of the integrator disagreed by more than the
    /// requested tolerance.
    #[error(
        "integration unconverged at {steps} steps: fidelity {coarse} vs {fine} \
         at half step (|diff| = {difference:e} > {tolerance:e})"
    )]
    Unconverged {
        steps: usize,
        coarse: f64,
        fine: f64,
        difference: f64,
        tolerance: f64,
    },

    /// A computed quantity violated one of its structural invariants.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
