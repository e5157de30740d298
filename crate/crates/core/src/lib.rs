//! Refereed learning at desk scale.
//!
//! A weak verifier picks the better of two hypotheses `h0`, `h1` for a
//! ground truth `f` under a distribution `D`, with help from two provers of
//! which at least one is honest. Every numeric quantity is an exact
//! [`Rational`], every message is canonically encoded and counted to the
//! bit, and every oracle evaluation is counted on the side that made it.
//!
//! Building blocks: [`certsum`] (exact sums with two queries),
//! [`certindex`] (the `i`-th element of an ordered set), [`certsample`]
//! (samples close to `D` from its mass function) and [`delegation`]
//! (oracle answers from the provers, at most one real query). The selection
//! protocols live in [`rlp`] and [`juntas`]; [`adversary`] holds the
//! malicious provers and [`harness`] runs seeded trials.

pub mod adversary;
pub mod bounds;
pub mod certindex;
pub mod certsample;
pub mod certsum;
pub mod delegation;
pub mod encoding;
pub mod error;
pub mod generate;
pub mod harness;
pub mod instance;
pub mod instance_file;
pub mod juntas;
pub mod loss;
pub mod metric;
pub mod oracle;
pub mod par;
pub mod point;
pub mod prover;
pub mod rational;
pub mod rlp;
pub mod sat;
pub mod session;
pub mod stats;
pub mod task;
pub mod transcript;

pub use adversary::{build_prover, AdversarySpec};
pub use error::{Error, Result};
pub use instance::Instance;
pub use metric::Metric;
pub use oracle::{CountingOracle, FunctionSpec, Label, OracleId, PmfSpec};
pub use point::BitPoint;
pub use rational::Rational;
pub use session::Session;
pub use stats::RunStats;
pub use transcript::Transcript;
