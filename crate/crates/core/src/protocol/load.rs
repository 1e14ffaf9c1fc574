use crate::{Error, Result};

/// Epoch and step ranges for the training load.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoadBounds {
    pub e_min: f64,
    pub e_max: f64,
    pub s_min: f64,
    pub s_max: f64,
}

impl Default for LoadBounds {
    fn default() -> Self {
        Self {
            e_min: 1.0,
            e_max: 5.0,
            s_min: 10.0,
            s_max: 100.0,
        }
    }
}

impl LoadBounds {
    pub fn validate(&self) -> Result<()> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi;
        if ok(self.e_min, self.e_max) && ok(self.s_min, self.s_max) {
            Ok(())
        } else {
            Err(Error::invalid("need 0 <= min <= max for epochs and steps"))
        }
    }

    pub fn full(&self) -> TrainingLoad {
        TrainingLoad {
            epochs: self.e_max,
            steps: self.s_max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainingLoad {
    pub epochs: f64,
    pub steps: f64,
}

impl TrainingLoad {
    pub const NONE: TrainingLoad = TrainingLoad {
        epochs: 0.0,
        steps: 0.0,
    };

    pub fn trains(&self) -> bool {
        self.epochs > 0.0 || self.steps > 0.0
    }
}

/// Epochs and steps for a client with score `a_i` when the mean score is
/// `a_mu`. Clients above the mean rest; the others train more the further
/// they are below it. A zero mean gives the full load.
pub fn training_load(a_i: f64, a_mu: f64, b: &LoadBounds) -> Result<TrainingLoad> {
    if !(0.0..=1.0).contains(&a_i) || !(0.0..=1.0).contains(&a_mu) {
        return Err(Error::invalid("scores must lie in [0, 1]"));
    }
    if a_i > a_mu {
        return Ok(TrainingLoad::NONE);
    }
    if a_mu == 0.0 {
        return Ok(b.full());
    }
    let sigma = ((a_mu - a_i) / a_mu).abs();
    Ok(TrainingLoad {
        epochs: b.e_min + (b.e_max - b.e_min) * sigma,
        steps: b.s_min + (b.s_max - b.s_min) * sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches() {
        let b = LoadBounds::default();
        assert_eq!(
            training_load(0.6, 0.6, &b).unwrap(),
            TrainingLoad {
                epochs: 1.0,
                steps: 10.0
            }
        );
        assert_eq!(training_load(0.7, 0.6, &b).unwrap(), TrainingLoad::NONE);
        assert_eq!(training_load(0.0, 0.8, &b).unwrap(), b.full());
        assert_eq!(training_load(0.0, 0.0, &b).unwrap(), b.full());
        assert!(training_load(1.5, 0.5, &b).is_err());
        assert!(training_load(0.5, f64::NAN, &b).is_err());
    }
}
