//! One-message secret key agreement over a discrete memoryless source.
//!
//! Alice, Bob and Eve observe `(X^n, Y^n, Z^n)`. Alice sends a universal hash
//! of `x^n`; Bob searches his list of likely vectors for the one that matches;
//! both then hash the agreed vector with a second seed to get the key.
//!
//! The numeric code is generic over [`scalar::Real`]; [`F64`] and [`F32`]
//! name the two instantiations.

pub mod planner;
pub mod protocol;
pub mod scalar;
pub mod source_model;
pub mod uhash;
pub mod verifier;

pub use planner::{Plan, PlanError, PlanMode};
pub use protocol::{run_session, Outcome, ProtocolError, SessionResult, Transcript};
pub use scalar::Real;
pub use source_model::{bsc_chain, BscChainParams, JointSource, SourceError};
pub use uhash::{BitString, GfContext, HashError, HashSeed};
pub use verifier::VerifyError;

/// Double-precision scalar.
pub type F64 = f64;
/// Single-precision scalar.
pub type F32 = f32;

/// Any error raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
