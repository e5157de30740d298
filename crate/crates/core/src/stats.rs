use std::collections::BTreeMap;

use serde::Serialize;

/// Accounting for one protocol run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    /// All transcript bits, both channels.
    pub comm_bits: u64,
    /// Bits spent forwarding oracle queries to the provers and back.
    pub delegation_bits: u64,
    pub messages: u64,
    /// Halving rounds of certified sum, summed over all invocations and phases.
    pub rounds: u64,
    /// Final point checks `t(z)` made by certified-sum verifiers.
    pub t_queries: u64,
    /// Real oracle evaluations by the verifier, by oracle name.
    pub verifier_queries: BTreeMap<String, u64>,
    /// Real oracle evaluations by each prover (`P0`, `P1`), by oracle name.
    pub prover_queries: BTreeMap<String, BTreeMap<String, u64>>,
    /// Real queries spent resolving delegated disagreements.
    pub real_delegated: u64,
}

impl RunStats {
    pub fn verifier(&self, oracle: &str) -> u64 {
        self.verifier_queries.get(oracle).copied().unwrap_or(0)
    }

    pub fn prover(&self, b: usize, oracle: &str) -> u64 {
        self.prover_queries.get(&format!("P{b}")).and_then(|m| m.get(oracle)).copied().unwrap_or(0)
    }

    /// Verifier evaluations of `f`, `h0`, `h1` and `Q_D` together.
    pub fn verifier_instance_queries(&self) -> u64 {
        ["f", "h0", "h1", "pmf"].iter().map(|o| self.verifier(o)).sum()
    }
}
