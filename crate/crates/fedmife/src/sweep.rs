//! Rounds to convergence and final mean score for a range of precisions.

use std::ops::RangeInclusive;

use fedmife_core::algebra::seed::seed_from_u64;
use fedmife_core::ipfe::TwoStepIpfe;
use fedmife_core::params::{ParamPreset, SchemeVisitor};
use fedmife_core::protocol::{
    run_training, Executor, NoClock, ProtocolConfig, RunOptions, SyntheticTrainer, Transcript,
};

use crate::formats::{Scenario, SweepRow};
use crate::Result;

/// Runs the scenario with the synthetic trainer.
pub fn train<E: Executor>(scenario: &Scenario, exec: &E) -> Result<Transcript> {
    train_with(scenario, scenario.config()?, exec, &NoClock)
}

pub fn train_with<E: Executor, C: fedmife_core::protocol::Clock>(
    scenario: &Scenario,
    config: ProtocolConfig,
    exec: &E,
    clock: &C,
) -> Result<Transcript> {
    let preset = ParamPreset::new(config.scheme, config.preset)?;
    preset.visit(
        1,
        1,
        Train {
            scenario,
            config,
            exec,
            clock,
        },
    )?
}

struct Train<'a, E, C> {
    scenario: &'a Scenario,
    config: ProtocolConfig,
    exec: &'a E,
    clock: &'a C,
}

impl<E: Executor, C: fedmife_core::protocol::Clock> SchemeVisitor for Train<'_, E, C> {
    type Output = Result<Transcript>;

    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> Self::Output {
        let seed = seed_from_u64(self.scenario.seed);
        let trainer = SyntheticTrainer::new(self.config.params, &seed, self.config.bounds);
        Ok(run_training(
            scheme,
            self.config,
            trainer,
            &seed,
            self.exec,
            self.clock,
            &RunOptions::default(),
        )?)
    }
}

pub fn delta_sweep<E: Executor>(deltas: RangeInclusive<u32>, scenario: &Scenario, exec: &E) -> Result<Vec<SweepRow>> {
    deltas
        .map(|delta| {
            let mut s = scenario.clone();
            s.delta = delta;
            let t = train(&s, exec)?;
            Ok(SweepRow {
                delta,
                rounds: t.rounds.len(),
                final_score: t.rounds.last().map_or(0.0, |r| r.a_mu),
                converged: t.converged,
            })
        })
        .collect()
}
