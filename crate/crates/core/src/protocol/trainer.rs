use alloc::vec::Vec;

use rand::Rng;

use super::load::{LoadBounds, TrainingLoad};
use crate::algebra::seed::{child_rng, Seed};

/// Local training and validation, pluggable per deployment.
pub trait LocalTrainer: Sync {
    fn initial_model(&self) -> Vec<f64>;

    /// One local training pass of client `slot` starting from `model`.
    fn train(&self, slot: u32, model: &[f64], load: TrainingLoad) -> Vec<f64>;

    /// Validation score of `model` on the data of client `slot`, in `[0, 1]`.
    fn score(&self, slot: u32, model: &[f64]) -> f64;
}

/// Moves every parameter toward a fixed target by a bounded step that grows
/// with the assigned load. The score is a clipped linear function of the RMS
/// distance to the target, flat within `tolerance` so that coarse encodings
/// still reach the plateau.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticTrainer {
    pub initial: Vec<f64>,
    pub target: Vec<f64>,
    /// Per-coordinate step at full load.
    pub rate: f64,
    pub tolerance: f64,
    /// RMS distance beyond `tolerance` at which the score bottoms out.
    pub scale: f64,
    pub bounds: LoadBounds,
}

impl SyntheticTrainer {
    pub const MAX_SCORE: f64 = 0.99;

    pub fn new(params: usize, seed: &Seed, bounds: LoadBounds) -> Self {
        let mut rng = child_rng(seed, "synthetic", 0);
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let initial = draw(params);
        let target = draw(params);
        Self {
            initial,
            target,
            rate: 0.8,
            tolerance: 0.15,
            scale: 1.0,
            bounds,
        }
    }

    fn effort(&self, load: TrainingLoad) -> f64 {
        let full = self.bounds.e_max * self.bounds.s_max;
        if full <= 0.0 {
            return 1.0;
        }
        (load.epochs * load.steps / full).clamp(0.0, 1.0)
    }

    fn client_bias(slot: u32) -> f64 {
        0.1 * f64::from(slot % 2)
    }

    pub fn distance(&self, model: &[f64]) -> f64 {
        let sq: f64 = model.iter().zip(&self.target).map(|(w, t)| (w - t) * (w - t)).sum();
        libm::sqrt(sq / self.target.len().max(1) as f64)
    }
}

impl LocalTrainer for SyntheticTrainer {
    fn initial_model(&self) -> Vec<f64> {
        self.initial.clone()
    }

    fn train(&self, _slot: u32, model: &[f64], load: TrainingLoad) -> Vec<f64> {
        if !load.trains() {
            return model.to_vec();
        }
        let step = self.rate * (0.5 + 0.5 * self.effort(load));
        model
            .iter()
            .zip(&self.target)
            .map(|(&w, &t)| w + (t - w).clamp(-step, step))
            .collect()
    }

    fn score(&self, slot: u32, model: &[f64]) -> f64 {
        let excess = (self.distance(model) - self.tolerance).max(0.0);
        let s = Self::MAX_SCORE - 0.98 * libm::sqrt((excess / self.scale).min(1.0)) - Self::client_bias(slot);
        s.clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::seed::seed_from_u64;

    #[test]
    fn reaches_target_and_plateau() {
        let t = SyntheticTrainer::new(20, &seed_from_u64(3), LoadBounds::default());
        let mut w = t.initial_model();
        let mut last = t.score(0, &w);
        for _ in 0..20 {
            w = t.train(0, &w, t.bounds.full());
            let s = t.score(0, &w);
            assert!(s >= last);
            last = s;
        }
        assert_eq!(w, t.target);
        assert_eq!(last, SyntheticTrainer::MAX_SCORE);
        assert_eq!(t.train(0, &w, TrainingLoad::NONE), w);
    }
}
