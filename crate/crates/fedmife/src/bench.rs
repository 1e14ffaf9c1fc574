//! One timed protocol round: local training, encryption, aggregation.

use std::time::Instant;

use fedmife_core::algebra::seed::seed_from_u64;
use fedmife_core::ipfe::{SchemeId, TwoStepIpfe};
use fedmife_core::memcost::{self, GIB};
use fedmife_core::params::{ParamPreset, PresetId, SchemeVisitor};
use fedmife_core::protocol::{Federation, LoadBounds, ProtocolConfig, SyntheticTrainer};
use sha2::{Digest, Sha256};

use crate::exec::ChunkedThreads;
use crate::formats::{BenchRecord, Phase};
use crate::{Error, Result};

pub const DEFAULT_RAM_BUDGET: u64 = 8 << 30;

/// Parameters encrypted and aggregated per batch.
pub const BATCH: usize = 256;

#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub scheme: SchemeId,
    pub preset: PresetId,
    pub clients: usize,
    pub params: usize,
    pub chunks: usize,
    pub seed: u64,
    /// Bytes the round's ciphertexts may occupy.
    pub ram_budget: u64,
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    /// SHA-256 of all ciphertexts in parameter-major, client-minor order.
    pub ciphertext_digest: [u8; 32],
    /// Masked per-parameter sums.
    pub sums: Vec<i64>,
    /// Setup time, including the decoder, which the records leave out.
    pub setup_seconds: f64,
}

/// Refuses when one round's ciphertexts, by the memory-cost formula, exceed
/// the budget.
pub fn check_budget(spec: &BenchSpec) -> Result<()> {
    let preset = ParamPreset::new(spec.scheme, spec.preset)?;
    let bits = memcost::preset_cost(&preset, spec.clients as u64)
        .round_ciphertext_bits(spec.clients as u64, spec.params as u64);
    if bits > u128::from(spec.ram_budget) * 8 {
        return Err(Error::RamBudget {
            needed_gib: memcost::in_units(bits, GIB),
            budget_gib: spec.ram_budget as f64 / (1u64 << 30) as f64,
        });
    }
    Ok(())
}

pub fn run_bench(spec: &BenchSpec) -> Result<BenchOutcome> {
    check_budget(spec)?;
    let preset = ParamPreset::new(spec.scheme, spec.preset)?;
    preset.visit(1, 1, Bench(spec))?
}

struct Bench<'a>(&'a BenchSpec);

impl SchemeVisitor for Bench<'_> {
    type Output = Result<BenchOutcome>;

    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> Result<BenchOutcome> {
        let spec = self.0;
        let seed = seed_from_u64(spec.seed);
        let config = ProtocolConfig::new(spec.scheme, spec.preset, spec.clients, spec.params);
        let trainer = SyntheticTrainer::new(spec.params, &seed, LoadBounds::default());
        let exec = ChunkedThreads::new(spec.chunks);

        let started = Instant::now();
        let mut fed = Federation::setup(scheme, config, trainer, &seed)?;
        let setup_seconds = started.elapsed().as_secs_f64();

        let t = Instant::now();
        fed.train_phase();
        let train = t.elapsed().as_secs_f64();

        let (mut encrypt, mut aggregate) = (0.0, 0.0);
        let mut sums = Vec::with_capacity(spec.params);
        let mut hasher = Sha256::new();
        let mut buf = Vec::new();
        for start in (0..spec.params).step_by(BATCH) {
            let range = start..(start + BATCH).min(spec.params);
            let t = Instant::now();
            let rows = fed.encrypt_phase_range(&exec, 1, range.clone())?;
            encrypt += t.elapsed().as_secs_f64();
            for j in 0..range.len() {
                for row in &rows {
                    buf.clear();
                    fed.mife().write_ciphertext(&row[j], &mut buf);
                    hasher.update(&buf);
                }
            }
            let t = Instant::now();
            sums.extend(fed.aggregate_phase(&exec, &rows)?);
            aggregate += t.elapsed().as_secs_f64();
        }

        let (n, l) = (spec.clients, spec.params);
        let ct_bytes = (fed.mife().ciphertext_bytes() * n * l) as u64;
        let record = |phase, seconds, bytes| BenchRecord {
            scheme: spec.scheme.as_str().into(),
            phase,
            seconds,
            n,
            l,
            bytes,
        };
        Ok(BenchOutcome {
            records: vec![
                record(Phase::Train, train, 0),
                record(Phase::Encrypt, encrypt, ct_bytes),
                record(Phase::Aggregate, aggregate, 8 * l as u64),
            ],
            ciphertext_digest: hasher.finalize().into(),
            sums,
            setup_seconds,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(scheme: SchemeId, preset: PresetId, n: usize, l: usize) -> BenchSpec {
        BenchSpec {
            scheme,
            preset,
            clients: n,
            params: l,
            chunks: 15,
            seed: 1,
            ram_budget: DEFAULT_RAM_BUDGET,
        }
    }

    #[test]
    fn guard_refuses_full_scale_adaptive_lwe() {
        let s = spec(SchemeId::LweAdaptive, PresetId::Table1, 13, 4641);
        let err = check_budget(&s).unwrap_err().to_string();
        assert!(err.contains("16.4") || err.contains("16.5"), "{err}");
        let mut s = s;
        s.ram_budget = 20 << 30;
        assert!(check_budget(&s).is_ok());
        assert!(check_budget(&spec(SchemeId::LweSelective, PresetId::Table1, 13, 4641)).is_ok());
    }
}
