use alloc::vec::Vec;

use super::codec::{decode, decode_mean, encode, unmask};
use super::entities::{Client, Server, Tpa};
use super::exec::Executor;
use super::load::training_load;
use super::termination::Decision;
use super::trainer::LocalTrainer;
use super::weighted::WeightedShare;
use super::ProtocolConfig;
use crate::algebra::seed::{derive_seed, Seed};
use crate::ipfe::TwoStepIpfe;
use crate::mife::{Mife, MifeCiphertext, MifeConfig};
use crate::{Error, Result};

/// Monotonic nanosecond clock; phases are timed with it.
pub trait Clock {
    fn now_ns(&self) -> u64;
}

/// Reports zero for every phase, for reproducible transcripts.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_ns(&self) -> u64 {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Entity {
    Tpa,
    Server,
    Client(u32),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseTimings {
    pub train_ns: u64,
    pub encrypt_ns: u64,
    pub aggregate_ns: u64,
    /// Score encryption, aggregation and the load/termination step.
    pub score_ns: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub gamma: u64,
    pub clients: Vec<u32>,
    pub trainers: Vec<u32>,
    /// `sum_i x_{j,i}` per parameter, after removing the labels.
    pub sums: Vec<i64>,
    pub score_sum: i64,
    pub a_mu: f64,
    pub model: Vec<f64>,
    pub decision: Decision,
    pub timings: PhaseTimings,
    pub bytes: Vec<(Entity, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditEvent {
    pub round: u64,
    pub flagged: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipUpdate {
    /// Rounds completed when the change happened.
    pub after_round: u64,
    pub joined: Option<u32>,
    pub removed: Option<u32>,
    /// Slots whose client key changed.
    pub changed: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Clients that report the opposite of their termination decision.
    pub dishonest: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    pub config: ProtocolConfig,
    pub rounds: Vec<RoundRecord>,
    /// Digests of every functional key the server held.
    pub functional_keys: Vec<[u8; 32]>,
    pub audit: Vec<AuditEvent>,
    pub memberships: Vec<MembershipUpdate>,
    /// Stopped by the patience rule rather than by `max_rounds`.
    pub converged: bool,
    pub best_model: Vec<f64>,
}

/// TPA, server and clients of one federation, stepped round by round.
pub struct Federation<S: TwoStepIpfe, T: LocalTrainer> {
    config: ProtocolConfig,
    mife: Mife<S>,
    tpa: Tpa<S>,
    server: Server<S>,
    clients: Vec<Client<S>>,
    trainer: T,
    seed: Seed,
    round: u64,
    model: Vec<f64>,
    finished: Option<Decision>,
    audit: Vec<AuditEvent>,
    memberships: Vec<MembershipUpdate>,
}

impl<S: TwoStepIpfe, T: LocalTrainer> Federation<S, T> {
    /// `scheme` must encrypt vectors of length 1.
    pub fn setup(scheme: S, config: ProtocolConfig, trainer: T, seed: &Seed) -> Result<Self> {
        config.validate()?;
        if scheme.scheme_id() != config.scheme {
            return Err(Error::invalid("scheme does not match the configuration"));
        }
        let mife = Mife::new(
            scheme,
            MifeConfig {
                clients: config.clients,
                dim: 1,
                plaintext_bound: config.plaintext_bound()?,
                key_bound: 1,
            },
        )?;
        let model = trainer.initial_model();
        if model.len() != config.params {
            return Err(Error::DimensionMismatch {
                expected: config.params,
                got: model.len(),
            });
        }
        let (tpa, csks) = Tpa::setup(&mife, &config, seed);
        let server = Server::new(&mife, &config, tpa.functional_key(&mife)?)?;
        let clients = csks
            .iter()
            .map(|csk| Self::new_client(&mife, &config, &tpa, seed, csk, &model))
            .collect();
        Ok(Self {
            config,
            mife,
            tpa,
            server,
            clients,
            trainer,
            seed: *seed,
            round: 0,
            model,
            finished: None,
            audit: Vec::new(),
            memberships: Vec::new(),
        })
    }

    fn new_client(
        mife: &Mife<S>,
        config: &ProtocolConfig,
        tpa: &Tpa<S>,
        seed: &Seed,
        csk: &crate::mife::MifeClientKey<S>,
        model: &[f64],
    ) -> Client<S> {
        let mut c = Client::new(
            mife,
            csk,
            derive_seed(seed, "client", csk.slot.into()),
            *tpa.label_seed(),
            config,
        );
        c.model = model.to_vec();
        c.best_model = model.to_vec();
        c
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn mife(&self) -> &Mife<S> {
        &self.mife
    }

    pub fn tpa(&self) -> &Tpa<S> {
        &self.tpa
    }

    pub fn tpa_mut(&mut self) -> &mut Tpa<S> {
        &mut self.tpa
    }

    pub fn server(&self) -> &Server<S> {
        &self.server
    }

    pub fn clients(&self) -> &[Client<S>] {
        &self.clients
    }

    pub fn trainer(&self) -> &T {
        &self.trainer
    }

    pub fn rounds(&self) -> u64 {
        self.round
    }

    pub fn model(&self) -> &[f64] {
        &self.model
    }

    pub fn is_finished(&self) -> bool {
        self.finished.is_some()
    }

    fn slots(&self) -> Vec<u32> {
        self.clients.iter().map(Client::slot).collect()
    }

    /// Local training: clients with a load train from the current aggregate,
    /// the others keep it unchanged.
    pub fn train_phase(&mut self) -> Vec<u32> {
        let mut trainers = Vec::new();
        for c in &mut self.clients {
            if c.load.trains() {
                c.model = self.trainer.train(c.slot(), &self.model, c.load);
                trainers.push(c.slot());
            } else {
                c.model = self.model.clone();
            }
        }
        trainers
    }

    pub fn encrypt_phase<E: Executor>(&self, exec: &E, round: u64) -> Result<Vec<Vec<MifeCiphertext<S>>>> {
        self.encrypt_phase_range(exec, round, 0..self.config.params)
    }

    /// Ciphertexts of parameters `range` only, identical to the matching
    /// columns of [`Federation::encrypt_phase`].
    pub fn encrypt_phase_range<E: Executor>(
        &self,
        exec: &E,
        round: u64,
        range: core::ops::Range<usize>,
    ) -> Result<Vec<Vec<MifeCiphertext<S>>>> {
        let label = self.tpa.label(round);
        self.clients
            .iter()
            .map(|c| c.encrypt_model_range(&self.mife, exec, &self.config, label, range.clone()))
            .collect()
    }

    /// Masked per-parameter sums.
    pub fn aggregate_phase<E: Executor>(&self, exec: &E, rows: &[Vec<MifeCiphertext<S>>]) -> Result<Vec<i64>> {
        self.server.aggregate(&self.mife, exec, rows)
    }

    /// Runs one round and returns its record.
    pub fn round<E: Executor, C: Clock>(&mut self, exec: &E, clock: &C, opts: &RunOptions) -> Result<RoundRecord> {
        if self.finished.is_some() {
            return Err(Error::invalid("training has terminated"));
        }
        let t = self.round + 1;
        let n = self.clients.len();
        let mut timings = PhaseTimings::default();

        let start = clock.now_ns();
        let trainers = self.train_phase();
        let trained = clock.now_ns();
        timings.train_ns = trained - start;

        let rows = self.encrypt_phase(exec, t)?;
        let encrypted = clock.now_ns();
        timings.encrypt_ns = encrypted - trained;

        let masked = self.aggregate_phase(exec, &rows)?;
        let aggregated = clock.now_ns();
        timings.aggregate_ns = aggregated - encrypted;

        let label = self.clients[0].label(t, &self.config);
        let sums = unmask(&masked, label.gamma, n);
        self.model = sums.iter().map(|&m| decode_mean(m, self.config.delta, n)).collect();

        let mut score_cts = Vec::with_capacity(n);
        for c in &mut self.clients {
            c.score = self.trainer.score(c.slot(), &self.model);
            score_cts.push(c.encrypt_score(&self.mife, exec, &self.config, label)?);
        }
        let masked_score = self.server.aggregate_scores(&self.mife, t, &score_cts)?;
        let score_sum = unmask(&[masked_score], label.gamma, n)[0];
        let a_mu = decode_mean(score_sum, self.config.delta, n);

        let mut reports = Vec::with_capacity(n);
        for c in &mut self.clients {
            let (decision, improved) = c.tracker.observe(a_mu);
            if improved {
                c.best_model = self.model.clone();
            }
            let report = if opts.dishonest.contains(&c.slot()) {
                decision.flipped()
            } else {
                decision
            };
            reports.push((c.slot(), report));
        }
        let decision = self.tpa_audit(t, &reports)?;

        for c in &mut self.clients {
            let own = c.quantized_score(&self.config)?;
            c.load = training_load(own, a_mu, &self.config.bounds)?;
        }
        timings.score_ns = clock.now_ns() - aggregated;

        self.round = t;
        if decision == Decision::Stop || t >= u64::from(self.config.max_rounds) {
            self.finished = Some(decision);
        }

        let ct_bytes = self.mife.ciphertext_bytes() as u64;
        let l = self.config.params as u64;
        let mut bytes: Vec<(Entity, u64)> = self
            .clients
            .iter()
            .map(|c| (Entity::Client(c.slot()), (l + 1) * ct_bytes + 1))
            .collect();
        bytes.push((Entity::Server, (l + 1) * 8 * n as u64));
        Ok(RoundRecord {
            round: t,
            gamma: label.gamma,
            clients: self.slots(),
            trainers,
            sums,
            score_sum,
            a_mu,
            model: self.model.clone(),
            decision,
            timings,
            bytes,
        })
    }

    /// The TPA unmasks the newest log entry, replays the decision rule and
    /// names clients whose reports contradict it.
    fn tpa_audit(&mut self, round: u64, reports: &[(u32, Decision)]) -> Result<Decision> {
        let entry = *self.server.log().latest().ok_or(Error::invalid("empty score log"))?;
        debug_assert_eq!(entry.round, round);
        let gamma = self.tpa.label(entry.round).gamma;
        let sum = unmask(&[entry.masked_sum], gamma, entry.clients)[0];
        let auditor = self.tpa.auditor_mut();
        let honest = auditor.observe(decode_mean(sum, self.config.delta, entry.clients));
        let flagged = auditor.audit(reports);
        if !flagged.is_empty() {
            self.audit.push(AuditEvent { round, flagged });
        }
        Ok(honest)
    }

    /// Adds a client. Unless disabled on the TPA, one existing client also
    /// receives a fresh pad so that the change in `z` hides the newcomer's.
    pub fn join(&mut self) -> Result<MembershipUpdate> {
        let update = self.tpa.join(&self.mife)?;
        let csk = update.joined.expect("join issues a client key");
        let mut client = Self::new_client(&self.mife, &self.config, &self.tpa, &self.seed, &csk, &self.model);
        client.tracker = self.tpa.auditor().tracker().clone();
        self.clients.push(client);
        let mut changed = alloc::vec![csk.slot];
        self.apply_rekey(update.rerandomized, &mut changed);
        self.server
            .install_key(&self.mife, &self.config, update.functional_key)?;
        let m = MembershipUpdate {
            after_round: self.round,
            joined: Some(csk.slot),
            removed: None,
            changed,
        };
        self.memberships.push(m.clone());
        Ok(m)
    }

    pub fn dropout(&mut self, slot: u32) -> Result<MembershipUpdate> {
        let k = self
            .clients
            .iter()
            .position(|c| c.slot() == slot)
            .ok_or(Error::MissingSlot(slot))?;
        let update = self.tpa.dropout(&self.mife, slot)?;
        self.clients.remove(k);
        let mut changed = Vec::new();
        self.apply_rekey(update.rerandomized, &mut changed);
        self.server
            .install_key(&self.mife, &self.config, update.functional_key)?;
        let m = MembershipUpdate {
            after_round: self.round,
            joined: None,
            removed: Some(slot),
            changed,
        };
        self.memberships.push(m.clone());
        Ok(m)
    }

    fn apply_rekey(&mut self, csk: Option<crate::mife::MifeClientKey<S>>, changed: &mut Vec<u32>) {
        if let Some(csk) = csk {
            if let Some(c) = self.clients.iter_mut().find(|c| c.slot() == csk.slot) {
                c.rekey(&self.mife, &csk);
                changed.push(csk.slot);
            }
        }
    }

    /// Weighted mean of `models` (one per client, in client order) over this
    /// round's trainers: the server first learns `sum delta_i`, then the sum
    /// of `(delta_i / sum delta) w_i` encoded at `10^delta`.
    pub fn weighted_aggregate<E: Executor>(
        &self,
        exec: &E,
        shares: &[WeightedShare],
        models: &[Vec<f64>],
    ) -> Result<Vec<f64>> {
        let n = self.clients.len();
        for len in [shares.len(), models.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        let label = self.tpa.label(self.round.max(1));
        let cap = self.config.encoded_weight_bound()?.max(self.config.scale()) as u64;
        let mut cts = Vec::with_capacity(n);
        for (c, s) in self.clients.iter().zip(shares) {
            if s.delta() > cap {
                return Err(Error::BoundViolation {
                    index: 0,
                    bound: alloc::format!("{cap}"),
                });
            }
            let mut ct = c.encrypt_values(&self.mife, exec, &[s.delta() as i64], label, "weight")?;
            cts.push(ct.remove(0));
        }
        let total = unmask(&[self.server.decrypt_sum(&self.mife, &cts)?], label.gamma, n)[0];
        if total == 0 {
            return Err(Error::NoTrainers);
        }
        let mut rows = Vec::with_capacity(n);
        for ((c, s), w) in self.clients.iter().zip(shares).zip(models) {
            let f = s.delta() as f64 / total as f64;
            let x = w
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let scaled = f * v;
                    if !scaled.is_finite() {
                        return Err(Error::NonFinite(j));
                    }
                    encode(scaled, self.config.delta)
                })
                .collect::<Result<Vec<i64>>>()?;
            rows.push(c.encrypt_values(&self.mife, exec, &x, label, "weighted")?);
        }
        let masked = self.server.aggregate(&self.mife, exec, &rows)?;
        Ok(unmask(&masked, label.gamma, n)
            .into_iter()
            .map(|m| decode(m, self.config.delta))
            .collect())
    }

    pub fn transcript(&self, rounds: Vec<RoundRecord>) -> Transcript {
        Transcript {
            config: self.config.clone(),
            rounds,
            functional_keys: self.server.key_history().to_vec(),
            audit: self.audit.clone(),
            memberships: self.memberships.clone(),
            converged: self.finished == Some(Decision::Stop),
            best_model: self.clients.first().map(|c| c.best_model.clone()).unwrap_or_default(),
        }
    }
}

/// Sets up a federation and runs rounds until the patience rule or
/// `max_rounds` stops it.
pub fn run_training<S, T, E, C>(
    scheme: S,
    config: ProtocolConfig,
    trainer: T,
    seed: &Seed,
    exec: &E,
    clock: &C,
    opts: &RunOptions,
) -> Result<Transcript>
where
    S: TwoStepIpfe,
    T: LocalTrainer,
    E: Executor,
    C: Clock,
{
    let mut fed = Federation::setup(scheme, config, trainer, seed)?;
    let mut rounds = Vec::new();
    while !fed.is_finished() {
        rounds.push(fed.round(exec, clock, opts)?);
    }
    Ok(fed.transcript(rounds))
}
