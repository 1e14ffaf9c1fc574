//! Randomized MIFE checks against the plaintext inner product, and
//! encrypted aggregation checks against plaintext sums.

use fedmife_core::algebra::seed::{child_rng, seed_from_u64, Seed};
use fedmife_core::ipfe::{SchemeId, TwoStepIpfe};
use fedmife_core::mife::{Mife, MifeConfig};
use fedmife_core::params::{ParamPreset, PresetId, SchemeVisitor};
use fedmife_core::protocol::{
    encode_vector, Federation, LocalTrainer, NoClock, ProtocolConfig, RunOptions, Sequential, TrainingLoad,
};
use fedmife_core::Error as CoreError;
use rand::Rng;
use serde::Serialize;

use crate::Result;

pub const VALUE_BOUND: i64 = 100;
pub const CLIENT_COUNTS: [usize; 3] = [2, 3, 5];
pub const MAX_DIM: usize = 3;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorrectnessReport {
    pub scheme: String,
    pub preset: String,
    pub trials: usize,
    pub exact: usize,
    /// Decryptions rejected with a noise-overflow error.
    pub noise_flagged: usize,
    /// Wrong results or unexpected errors.
    pub mismatches: usize,
    pub aggregation_trials: usize,
    pub aggregation_mismatches: usize,
}

impl CorrectnessReport {
    pub fn exact_ratio(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.exact as f64 / self.trials as f64
        }
    }

    /// No silent mismatch anywhere, and at most 1% flagged noise overflows.
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.aggregation_mismatches == 0 && self.noise_flagged * 100 <= self.trials
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialOutcome {
    Exact,
    NoiseFlagged,
    Mismatch,
}

pub fn run_correctness(scheme: SchemeId, preset: PresetId, trials: usize, seed: u64) -> Result<CorrectnessReport> {
    let p = ParamPreset::new(scheme, preset)?;
    let seed = seed_from_u64(seed);
    let mut report = CorrectnessReport {
        scheme: scheme.as_str().into(),
        preset: preset.as_str().into(),
        ..Default::default()
    };
    for k in 0..trials {
        let mut rng = child_rng(&seed, "mife-trial", k as u64);
        let clients = CLIENT_COUNTS[rng.gen_range(0..CLIENT_COUNTS.len())];
        let dim = rng.gen_range(1..=MAX_DIM);
        match p.visit(
            dim,
            VALUE_BOUND as u64,
            MifeTrial {
                seed: rng.gen(),
                clients,
            },
        )?? {
            TrialOutcome::Exact => report.exact += 1,
            TrialOutcome::NoiseFlagged => report.noise_flagged += 1,
            TrialOutcome::Mismatch => report.mismatches += 1,
        }
        report.trials += 1;
    }
    for k in 0..trials.div_ceil(10) {
        let mut rng = child_rng(&seed, "aggregation-trial", k as u64);
        let clients = CLIENT_COUNTS[rng.gen_range(0..CLIENT_COUNTS.len())];
        let ok = p.visit(
            1,
            1,
            AggregationTrial {
                seed: rng.gen(),
                scheme,
                preset,
                clients,
            },
        )??;
        report.aggregation_trials += 1;
        if !ok {
            report.aggregation_mismatches += 1;
        }
    }
    Ok(report)
}

/// One MIFE encryption and decryption with random `x`, `y` in `[-100, 100]`.
pub struct MifeTrial {
    pub seed: Seed,
    pub clients: usize,
}

impl SchemeVisitor for MifeTrial {
    type Output = Result<TrialOutcome>;

    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> Result<TrialOutcome> {
        let dim = scheme.dimension();
        let mife = Mife::new(
            scheme,
            MifeConfig {
                clients: self.clients,
                dim,
                plaintext_bound: VALUE_BOUND as u64,
                key_bound: VALUE_BOUND as u64,
            },
        )?;
        let mut rng = fedmife_core::algebra::seed::rng_from(self.seed);
        let mut draw =
            |len: usize| -> Vec<i64> { (0..len).map(|_| rng.gen_range(-VALUE_BOUND..=VALUE_BOUND)).collect() };
        let xs: Vec<Vec<i64>> = (0..self.clients).map(|_| draw(dim)).collect();
        let y = draw(self.clients * dim);
        let expected: i64 = xs.iter().flatten().zip(&y).map(|(a, b)| a * b).sum();

        let mut rng = fedmife_core::algebra::seed::rng_from(self.seed);
        let (msk, csks) = mife.setup(&mut rng);
        let cts = csks
            .iter()
            .zip(&xs)
            .map(|(k, x)| mife.encrypt(k, x, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        let fk = mife.keygen(&msk, &y)?;
        Ok(match mife.decrypt(&fk, &cts) {
            Ok(v) if v == expected => TrialOutcome::Exact,
            Err(CoreError::NoiseOverflow) => TrialOutcome::NoiseFlagged,
            _ => TrialOutcome::Mismatch,
        })
    }
}

/// Per-client models drawn once from a seed.
struct FixedModels(Vec<Vec<f64>>);

impl LocalTrainer for FixedModels {
    fn initial_model(&self) -> Vec<f64> {
        vec![0.0; self.0[0].len()]
    }
    fn train(&self, slot: u32, _: &[f64], _: TrainingLoad) -> Vec<f64> {
        self.0[slot as usize - 1].clone()
    }
    fn score(&self, _: u32, _: &[f64]) -> f64 {
        0.5
    }
}

/// One protocol round with random models; compares the unmasked sums with
/// the plaintext sums of the encoded models.
pub struct AggregationTrial {
    pub seed: Seed,
    pub scheme: SchemeId,
    pub preset: PresetId,
    pub clients: usize,
}

pub const AGGREGATION_PARAMS: usize = 5;

impl SchemeVisitor for AggregationTrial {
    type Output = Result<bool>;

    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> Result<bool> {
        let config = ProtocolConfig::new(self.scheme, self.preset, self.clients, AGGREGATION_PARAMS);
        let mut rng = fedmife_core::algebra::seed::rng_from(self.seed);
        let models: Vec<Vec<f64>> = (0..self.clients)
            .map(|_| (0..AGGREGATION_PARAMS).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut expected = vec![0i64; AGGREGATION_PARAMS];
        for m in &models {
            for (e, x) in expected
                .iter_mut()
                .zip(encode_vector(m, config.delta, config.weight_bound)?)
            {
                *e += x;
            }
        }
        let mut fed = Federation::setup(scheme, config, FixedModels(models), &self.seed)?;
        match fed.round(&Sequential, &NoClock, &RunOptions::default()) {
            Ok(r) => Ok(r.sums == expected),
            Err(CoreError::NoiseOverflow) => Ok(false),
            Err(e) => Err(e.into()),
        }
    }
}
