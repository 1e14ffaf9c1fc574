use rand::{Rng, RngCore};

use crate::{Error, Result};

/// Discrete Gaussian over the integers, centered at zero and truncated at
/// `tail_cut * std_dev`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianParams {
    std_dev: f64,
    tail_cut: f64,
}

impl GaussianParams {
    pub const DEFAULT_TAIL_CUT: f64 = 6.0;

    pub fn new(std_dev: f64, tail_cut: f64) -> Result<Self> {
        if !(std_dev.is_finite() && std_dev > 0.0) {
            return Err(Error::invalid("gaussian std_dev must be positive"));
        }
        if !(tail_cut.is_finite() && tail_cut >= 6.0) {
            return Err(Error::invalid("gaussian tail cut must be at least 6"));
        }
        Ok(Self { std_dev, tail_cut })
    }

    pub fn with_std_dev(std_dev: f64) -> Result<Self> {
        Self::new(std_dev, Self::DEFAULT_TAIL_CUT)
    }

    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    pub fn tail_cut(&self) -> f64 {
        self.tail_cut
    }

    /// Largest magnitude a sample can take.
    pub fn bound(&self) -> i128 {
        libm::floor(self.tail_cut * self.std_dev) as i128
    }

    /// Rejection sampling: a uniform candidate in `[-bound, bound]` is
    /// accepted with probability `exp(-x^2 / (2 std_dev^2))`.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i128 {
        let bound = self.bound();
        if bound == 0 {
            return 0;
        }
        let two_var = 2.0 * self.std_dev * self.std_dev;
        loop {
            let x: i128 = rng.gen_range(-bound..=bound);
            let xf = x as f64;
            let accept = libm::exp(-(xf * xf) / two_var);
            if rng.gen::<f64>() < accept {
                return x;
            }
        }
    }
}
