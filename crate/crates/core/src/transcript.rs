//! Append-only message ledger with byte-exact communication accounting.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Party {
    Verifier,
    Prover(u8),
}

impl Party {
    pub fn prover(b: usize) -> Party {
        Party::Prover(b as u8)
    }
}

/// `Protocol` carries the protocol's own messages; `Delegation` carries
/// oracle queries forwarded to the provers and their answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Channel {
    Protocol,
    Delegation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub from: Party,
    pub to: Party,
    pub channel: Channel,
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    messages: Vec<Message>,
    total_bits: u64,
}

impl Transcript {
    pub fn new() -> Transcript {
        Transcript::default()
    }

    /// Append a message and return its index.
    pub fn push(&mut self, from: Party, to: Party, channel: Channel, payload: Vec<u8>) -> usize {
        self.total_bits += 8 * payload.len() as u64;
        self.messages.push(Message { from, to, channel, payload });
        self.messages.len() - 1
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// `8 ×` the total payload bytes.
    pub fn total_bits(&self) -> u64 {
        self.total_bits
    }

    pub fn channel_bits(&self, channel: Channel) -> u64 {
        self.messages.iter().filter(|m| m.channel == channel).map(|m| 8 * m.payload.len() as u64).sum()
    }

    /// Messages on one channel, in order.
    pub fn on_channel(&self, channel: Channel) -> impl Iterator<Item = &Message> {
        self.messages.iter().filter(move |m| m.channel == channel)
    }
}
