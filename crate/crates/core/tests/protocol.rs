use fedmife_core::algebra::seed::seed_from_u64;
use fedmife_core::ipfe::{SchemeId, TwoStepIpfe};
use fedmife_core::params::{ParamPreset, PresetId, SchemeVisitor};
use fedmife_core::protocol::{
    run_training, Decision, Executor, Federation, LoadBounds, LocalTrainer, NoClock, ProtocolConfig, RunOptions,
    Sequential, SyntheticTrainer, TrainingLoad, WeightedShare,
};
use fedmife_core::Error;

/// Jobs run back to front.
struct Reversed;

impl Executor for Reversed {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let mut out: Vec<(usize, T)> = (0..len).rev().map(|j| (j, f(j))).collect();
        out.sort_by_key(|(j, _)| *j);
        out.into_iter().map(|(_, v)| v).collect()
    }
}

/// Fixed models and scores per slot.
struct Scripted {
    models: Vec<Vec<f64>>,
    scores: Vec<f64>,
}

impl LocalTrainer for Scripted {
    fn initial_model(&self) -> Vec<f64> {
        vec![0.0; self.models[0].len()]
    }
    fn train(&self, slot: u32, _: &[f64], _: TrainingLoad) -> Vec<f64> {
        self.models[slot as usize - 1].clone()
    }
    fn score(&self, slot: u32, _: &[f64]) -> f64 {
        self.scores[slot as usize - 1]
    }
}

fn config(scheme: SchemeId, preset: PresetId, n: usize, l: usize) -> ProtocolConfig {
    ProtocolConfig::new(scheme, preset, n, l)
}

fn visit<V: SchemeVisitor>(scheme: SchemeId, preset: PresetId, v: V) -> V::Output {
    ParamPreset::new(scheme, preset).unwrap().visit(1, 1, v).unwrap()
}

struct Run(ProtocolConfig, u64);

impl SchemeVisitor for Run {
    type Output = fedmife_core::Result<fedmife_core::protocol::Transcript>;
    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> Self::Output {
        let trainer = SyntheticTrainer::new(self.0.params, &seed_from_u64(self.1), self.0.bounds);
        run_training(
            scheme,
            self.0,
            trainer,
            &seed_from_u64(self.1),
            &Sequential,
            &NoClock,
            &RunOptions::default(),
        )
    }
}

#[test]
fn synthetic_run_terminates_with_one_key() {
    for (scheme, preset) in [
        (SchemeId::DdhSelective, PresetId::Toy),
        (SchemeId::DdhAdaptive, PresetId::Toy),
        (SchemeId::LweSelective, PresetId::ToyZero),
        (SchemeId::LweAdaptive, PresetId::ToyZero),
        (SchemeId::LweSelective, PresetId::Toy),
        (SchemeId::LweAdaptive, PresetId::Toy),
    ] {
        let cfg = config(scheme, preset, 3, 8);
        let t = visit(scheme, preset, Run(cfg, 5)).unwrap();
        assert!(t.converged, "{scheme} {preset:?}");
        assert_eq!(t.functional_keys.len(), 1);
        assert!(t.audit.is_empty());
        assert_eq!(t.rounds.last().unwrap().decision, Decision::Stop);
        assert!(t.rounds.iter().all(|r| r.clients.len() == 3));
    }
}

#[test]
fn identical_seeds_identical_transcripts() {
    let cfg = config(SchemeId::LweSelective, PresetId::Toy, 3, 6);
    let a = visit(SchemeId::LweSelective, PresetId::Toy, Run(cfg.clone(), 9)).unwrap();
    let b = visit(SchemeId::LweSelective, PresetId::Toy, Run(cfg.clone(), 9)).unwrap();
    assert_eq!(a, b);
    let c = visit(SchemeId::LweSelective, PresetId::Toy, Run(cfg, 10)).unwrap();
    assert_ne!(a.rounds[0].gamma, c.rounds[0].gamma);
}

#[test]
fn zero_patience_stops_at_first_stale_round() {
    let mut cfg = config(SchemeId::LweSelective, PresetId::ToyZero, 2, 1);
    cfg.patience = 0;
    let t = visit(SchemeId::LweSelective, PresetId::ToyZero, Run(cfg, 1)).unwrap();
    let last = t.rounds.len() - 1;
    assert!(t.converged);
    for k in 1..last {
        assert!(t.rounds[k].a_mu > t.rounds[k - 1].a_mu);
    }
    assert!(t.rounds[last].a_mu <= t.rounds[last - 1].a_mu);
}

struct Scores;

impl SchemeVisitor for Scores {
    type Output = ();
    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) {
        let trainer = Scripted {
            models: vec![vec![0.10, -0.5], vec![0.20, 0.25], vec![0.60, 1.0]],
            scores: vec![0.50, 0.70, 0.90],
        };
        let cfg = config(scheme.scheme_id(), PresetId::Toy, 3, 2);
        let mut fed = Federation::setup(scheme, cfg, trainer, &seed_from_u64(4)).unwrap();
        let r = fed.round(&Sequential, &NoClock, &RunOptions::default()).unwrap();
        assert_eq!(r.sums, vec![90, 75]);
        assert_eq!(r.model, vec![0.30, 0.25]);
        assert_eq!(r.score_sum, 210);
        assert_eq!(r.a_mu, 0.70);
        assert_eq!(
            fed.server().log().latest().unwrap().masked_sum,
            210 + 3 * r.gamma as i64
        );
        // Slot 3 is above the mean and rests; slot 2 sits on it.
        let loads: Vec<_> = fed.clients().iter().map(|c| c.load).collect();
        assert_eq!(loads[2], TrainingLoad::NONE);
        assert_eq!(
            loads[1],
            TrainingLoad {
                epochs: 1.0,
                steps: 10.0
            }
        );
        assert!(loads[0].epochs > 1.0);
        let r = fed.round(&Sequential, &NoClock, &RunOptions::default()).unwrap();
        assert_eq!(r.trainers, vec![1, 2]);
        // The resting client re-encrypts the previous aggregate.
        assert_eq!(r.sums, vec![10 + 20 + 30, -50 + 25 + 25]);
    }
}

#[test]
fn score_aggregation_and_loads() {
    for scheme in SchemeId::ALL {
        visit(scheme, PresetId::Toy, Scores);
    }
}

struct Adversary;

impl SchemeVisitor for Adversary {
    type Output = ();
    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) {
        let trainer = Scripted {
            models: vec![vec![0.5]; 3],
            scores: vec![0.5; 3],
        };
        let mut cfg = config(scheme.scheme_id(), PresetId::Toy, 3, 1);
        cfg.patience = 1;
        let opts = RunOptions { dishonest: vec![2] };
        let t = run_training(scheme, cfg, trainer, &seed_from_u64(6), &Sequential, &NoClock, &opts).unwrap();
        // Round 1 improves, 2 and 3 do not; the rule stops after round 3.
        assert_eq!(t.rounds.len(), 3);
        assert!(t.converged);
        assert!(t.audit.iter().all(|e| e.flagged == vec![2]));
        assert_eq!(t.audit.len(), 3);
    }
}

#[test]
fn false_reports_are_flagged() {
    visit(SchemeId::LweSelective, PresetId::ToyZero, Adversary);
    visit(SchemeId::DdhSelective, PresetId::Toy, Adversary);
}

struct Membership;

impl SchemeVisitor for Membership {
    type Output = ();
    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) {
        let id = scheme.scheme_id();
        let cfg = config(id, PresetId::Toy, 3, 4);
        let trainer = SyntheticTrainer::new(4, &seed_from_u64(1), LoadBounds::default());
        let mut fed = Federation::setup(scheme, cfg, trainer, &seed_from_u64(2)).unwrap();
        let opts = RunOptions::default();
        fed.round(&Sequential, &NoClock, &opts).unwrap();
        let before: Vec<_> = fed.tpa().master_key().client_keys();
        let update = fed.join().unwrap();
        let after: Vec<_> = fed.tpa().master_key().client_keys();
        let changed: Vec<u32> = after
            .iter()
            .filter(|k| !before.iter().any(|b| b == *k))
            .map(|k| k.slot)
            .collect();
        assert_eq!(changed.len(), 2);
        assert_eq!(update.joined, Some(4));
        let mut sorted = update.changed.clone();
        sorted.sort();
        assert_eq!(sorted, changed);
        let r = fed.round(&Sequential, &NoClock, &opts).unwrap();
        assert_eq!(r.clients, vec![1, 2, 3, 4]);
        assert_eq!(fed.server().key_history().len(), 2);

        fed.dropout(1).unwrap();
        fed.dropout(4).unwrap();
        let r = fed.round(&Sequential, &NoClock, &opts).unwrap();
        assert_eq!(r.clients, vec![2, 3]);
        let sum: f64 = fed.clients().iter().map(|c| c.model[0]).sum();
        assert!((r.model[0] - sum / 2.0).abs() < 0.01);
        assert!(matches!(fed.dropout(2), Err(Error::TooFewClients { .. })));
    }
}

#[test]
fn join_and_dropout() {
    for scheme in SchemeId::ALL {
        visit(scheme, PresetId::Toy, Membership);
    }
}

struct NaiveJoin(bool);

impl SchemeVisitor for NaiveJoin {
    type Output = bool;
    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> bool {
        let cfg = config(scheme.scheme_id(), PresetId::Toy, 3, 1);
        let trainer = SyntheticTrainer::new(1, &seed_from_u64(1), LoadBounds::default());
        let mut fed = Federation::setup(scheme, cfg, trainer, &seed_from_u64(3)).unwrap();
        fed.tpa_mut().set_rerandomize(self.0);
        let p = fed.mife().pad_modulus().clone();
        let z_old = fed.server().functional_key().z.clone();
        let update = fed.join().unwrap();
        let z_new = fed.server().functional_key().z.clone();
        let guess = (z_new + &p - z_old) % &p;
        let newcomer = fed.tpa().master_key().client_key(update.joined.unwrap()).unwrap();
        guess == newcomer.pad[0]
    }
}

#[test]
fn naive_join_leaks_the_new_pad() {
    for scheme in SchemeId::ALL {
        assert!(visit(scheme, PresetId::Toy, NaiveJoin(false)), "{scheme}");
        assert!(!visit(scheme, PresetId::Toy, NaiveJoin(true)), "{scheme}");
    }
}

struct Weighted(u32);

impl SchemeVisitor for Weighted {
    type Output = (Vec<f64>, Vec<f64>, Error);
    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> Self::Output {
        let mut cfg = config(scheme.scheme_id(), PresetId::Toy, 2, 1);
        cfg.delta = self.0;
        let trainer = SyntheticTrainer::new(1, &seed_from_u64(1), LoadBounds::default());
        let fed = Federation::setup(scheme, cfg, trainer, &seed_from_u64(5)).unwrap();
        let models = vec![vec![0.1], vec![0.5]];
        let shares = [WeightedShare::new(10, true), WeightedShare::new(30, true)];
        let weighted = fed.weighted_aggregate(&Sequential, &shares, &models).unwrap();
        let equal = [WeightedShare::new(7, true), WeightedShare::new(7, true)];
        let mean = fed.weighted_aggregate(&Sequential, &equal, &models).unwrap();
        let idle = [WeightedShare::new(10, false), WeightedShare::new(30, false)];
        let err = fed.weighted_aggregate(&Sequential, &idle, &models).unwrap_err();
        (weighted, mean, err)
    }
}

#[test]
fn weighted_mean() {
    for scheme in [SchemeId::DdhSelective, SchemeId::LweAdaptive] {
        let (w, mean, err) = visit(scheme, PresetId::Toy, Weighted(4));
        assert_eq!(w, vec![0.40]);
        assert_eq!(mean, vec![0.30]);
        assert_eq!(err, Error::NoTrainers);
        // At two digits both shares lose their third decimal.
        let (w, _, _) = visit(scheme, PresetId::Toy, Weighted(2));
        assert_eq!(w, vec![0.39]);
    }
    assert_eq!(WeightedShare::new(5, false).delta(), 0);
}

struct Order;

impl SchemeVisitor for Order {
    type Output = ();
    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) {
        let cfg = config(scheme.scheme_id(), PresetId::Toy, 2, 20);
        let trainer = SyntheticTrainer::new(20, &seed_from_u64(1), LoadBounds::default());
        let mut fed = Federation::setup(scheme, cfg, trainer, &seed_from_u64(8)).unwrap();
        fed.train_phase();
        let a = fed.encrypt_phase(&Sequential, 1).unwrap();
        let b = fed.encrypt_phase(&Reversed, 1).unwrap();
        assert_eq!(a, b);
        let tail = fed.encrypt_phase_range(&Sequential, 1, 12..20).unwrap();
        for (row, part) in a.iter().zip(&tail) {
            assert_eq!(&row[12..], &part[..]);
        }
        let c = fed.encrypt_phase(&Sequential, 2).unwrap();
        assert_ne!(a, c);
        assert_eq!(
            fed.aggregate_phase(&Reversed, &a).unwrap(),
            fed.aggregate_phase(&Sequential, &a).unwrap()
        );
    }
}

#[test]
fn execution_order_does_not_change_ciphertexts() {
    for scheme in SchemeId::ALL {
        visit(scheme, PresetId::Toy, Order);
    }
}

#[test]
fn invalid_configs() {
    let mut cfg = config(SchemeId::LweSelective, PresetId::Toy, 3, 2);
    cfg.delta = 0;
    assert!(visit(SchemeId::LweSelective, PresetId::Toy, Run(cfg, 1)).is_err());
    let cfg = config(SchemeId::DdhSelective, PresetId::Toy, 3, 2);
    assert!(visit(SchemeId::LweSelective, PresetId::Toy, Run(cfg, 1)).is_err());
}
