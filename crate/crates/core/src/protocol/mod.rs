//! Encrypted federated aggregation over MIFE.
//!
//! Every round each client encodes its model at `10^delta`, adds the round
//! label `gamma_t` to every entry and encrypts the entries one by one. The
//! server holds a single functional key for `y = (1, ..., 1)` and recovers
//! `sum_i x_i + n gamma_t` per parameter; clients remove the labels and
//! divide by `10^delta n`. Scores are aggregated the same way and drive the
//! per-client training load and the patience-based termination.

mod codec;
mod entities;
mod exec;
mod label;
mod load;
mod runner;
mod termination;
mod trainer;
mod weighted;

pub use codec::{decode, decode_mean, encode, encode_vector, mask, unmask};
pub use entities::{Client, Server, Tpa};
pub use exec::{Executor, Sequential};
pub use label::{derive_label, RoundLabel};
pub use load::{training_load, LoadBounds, TrainingLoad};
pub use runner::{
    run_training, AuditEvent, Clock, Entity, Federation, MembershipUpdate, NoClock, PhaseTimings, RoundRecord,
    RunOptions, Transcript,
};
pub use termination::{Auditor, Decision, ScoreLog, TerminationTracker};
pub use trainer::{LocalTrainer, SyntheticTrainer};
pub use weighted::WeightedShare;

use crate::ipfe::SchemeId;
use crate::params::PresetId;
use crate::{Error, Result};

/// Smallest accepted label bound.
pub const MIN_LABEL_BOUND: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub scheme: SchemeId,
    pub preset: PresetId,
    /// Number of clients `n`.
    pub clients: usize,
    /// Model parameter count `l`.
    pub params: usize,
    /// Decimal digits kept by the encoding.
    pub delta: u32,
    /// Labels lie in `[0, label_bound)`.
    pub label_bound: u64,
    /// Model entries satisfy `|w| <= weight_bound`.
    pub weight_bound: f64,
    pub patience: u32,
    pub max_rounds: u32,
    pub bounds: LoadBounds,
}

impl ProtocolConfig {
    pub const MAX_DELTA: u32 = 9;

    pub fn new(scheme: SchemeId, preset: PresetId, clients: usize, params: usize) -> Self {
        Self {
            scheme,
            preset,
            clients,
            params,
            delta: 2,
            label_bound: MIN_LABEL_BOUND,
            weight_bound: 10.0,
            patience: 3,
            max_rounds: 100,
            bounds: LoadBounds::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta == 0 || self.delta > Self::MAX_DELTA {
            return Err(Error::invalid("delta must be in 1..=9"));
        }
        if self.label_bound < MIN_LABEL_BOUND || self.label_bound > 1 << 62 {
            return Err(Error::invalid("label bound must be in [2^32, 2^62]"));
        }
        if self.clients < 2 {
            return Err(Error::TooFewClients {
                required: 2,
                got: self.clients,
            });
        }
        if self.params == 0 {
            return Err(Error::invalid("model must have at least one parameter"));
        }
        if !(self.weight_bound.is_finite() && self.weight_bound > 0.0) {
            return Err(Error::invalid("weight bound must be positive and finite"));
        }
        if self.max_rounds == 0 {
            return Err(Error::invalid("max_rounds must be positive"));
        }
        self.bounds.validate()?;
        self.encoded_weight_bound()?;
        Ok(())
    }

    pub fn scale(&self) -> i64 {
        10i64.pow(self.delta)
    }

    /// Largest encoded magnitude of a model entry.
    pub fn encoded_weight_bound(&self) -> Result<i64> {
        encode(self.weight_bound, self.delta)
    }

    /// Largest magnitude of a masked plaintext.
    pub fn plaintext_bound(&self) -> Result<u64> {
        let w = self.encoded_weight_bound()?.max(self.scale()) as u64;
        Ok(w + self.label_bound - 1)
    }

    /// Range of `sum_i x_i + n gamma` over parameters and scores.
    pub fn result_window(&self, clients: usize) -> Result<(i64, i64)> {
        let n = clients as i64;
        let w = self.encoded_weight_bound()?;
        let top = w.max(self.scale()) + self.label_bound as i64 - 1;
        let lower = n.checked_mul(-w);
        let upper = n.checked_mul(top);
        match (lower, upper) {
            (Some(l), Some(u)) => Ok((l, u)),
            _ => Err(Error::invalid("result window overflows")),
        }
    }
}
