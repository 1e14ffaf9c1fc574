use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::codec::{encode, encode_vector, mask};
use super::exec::Executor;
use super::label::{derive_label, RoundLabel};
use super::load::TrainingLoad;
use super::termination::{Auditor, ScoreEntry, ScoreLog, TerminationTracker};
use super::ProtocolConfig;
use crate::algebra::seed::{derive_seed, rng_from, Seed};
use crate::algebra::DlogWindow;
use crate::ipfe::TwoStepIpfe;
use crate::mife::{ClientEncryptor, Mife, MifeCiphertext, MifeClientKey, MifeFunctionalKey, MifeMasterKey};
use crate::{Error, Result};

pub(crate) fn key_digest<S: TwoStepIpfe>(mife: &Mife<S>, fk: &MifeFunctionalKey<S>) -> [u8; 32] {
    let mut bytes = Vec::new();
    mife.write_functional_key(fk, &mut bytes);
    Sha256::digest(&bytes).into()
}

/// Key authority: runs setup, holds the master key and the label seed, and
/// reissues keys on membership changes.
#[derive(Debug)]
pub struct Tpa<S: TwoStepIpfe> {
    msk: MifeMasterKey<S>,
    label_seed: Seed,
    label_bound: u64,
    rng: ChaCha20Rng,
    rerandomize: bool,
    auditor: Auditor,
}

/// Keys issued by a membership change.
#[derive(Debug)]
pub struct KeyUpdate<S: TwoStepIpfe> {
    pub joined: Option<MifeClientKey<S>>,
    pub rerandomized: Option<MifeClientKey<S>>,
    pub functional_key: MifeFunctionalKey<S>,
}

impl<S: TwoStepIpfe> Tpa<S> {
    pub fn setup(mife: &Mife<S>, config: &ProtocolConfig, seed: &Seed) -> (Self, Vec<MifeClientKey<S>>) {
        let mut rng = rng_from(derive_seed(seed, "tpa", 0));
        let (msk, csks) = mife.setup(&mut rng);
        let tpa = Self {
            msk,
            label_seed: derive_seed(seed, "label", 0),
            label_bound: config.label_bound,
            rng,
            rerandomize: true,
            auditor: Auditor::new(config.patience),
        };
        (tpa, csks)
    }

    /// Test mode: membership changes without re-randomizing a pad.
    pub fn set_rerandomize(&mut self, on: bool) {
        self.rerandomize = on;
    }

    pub fn label_seed(&self) -> &Seed {
        &self.label_seed
    }

    pub fn label(&self, round: u64) -> RoundLabel {
        derive_label(&self.label_seed, round, self.label_bound)
    }

    pub fn master_key(&self) -> &MifeMasterKey<S> {
        &self.msk
    }

    /// The only key the server ever needs: `y = (1, ..., 1)`.
    pub fn functional_key(&self, mife: &Mife<S>) -> Result<MifeFunctionalKey<S>> {
        mife.keygen(&self.msk, &alloc::vec![1; self.msk.clients()])
    }

    pub fn auditor(&self) -> &Auditor {
        &self.auditor
    }

    pub(crate) fn auditor_mut(&mut self) -> &mut Auditor {
        &mut self.auditor
    }

    fn rerandomize_one(&mut self, mife: &Mife<S>, exclude: Option<u32>) -> Result<Option<MifeClientKey<S>>> {
        if !self.rerandomize {
            return Ok(None);
        }
        let ids: Vec<u32> = self
            .msk
            .slot_ids()
            .into_iter()
            .filter(|&id| Some(id) != exclude)
            .collect();
        let pick = ids[self.rng.gen_range(0..ids.len())];
        mife.rerandomize_pad(&mut self.msk, pick, &mut self.rng).map(Some)
    }

    pub fn join(&mut self, mife: &Mife<S>) -> Result<KeyUpdate<S>> {
        let csk = mife.add_slot(&mut self.msk, &mut self.rng)?;
        let rerandomized = self.rerandomize_one(mife, Some(csk.slot))?;
        Ok(KeyUpdate {
            joined: Some(csk),
            rerandomized,
            functional_key: self.functional_key(mife)?,
        })
    }

    pub fn dropout(&mut self, mife: &Mife<S>, slot: u32) -> Result<KeyUpdate<S>> {
        mife.remove_slot(&mut self.msk, slot)?;
        let rerandomized = self.rerandomize_one(mife, None)?;
        Ok(KeyUpdate {
            joined: None,
            rerandomized,
            functional_key: self.functional_key(mife)?,
        })
    }
}

/// Aggregator: holds `sk_y`, decrypts per-parameter sums and keeps the log
/// of masked score sums.
pub struct Server<S: TwoStepIpfe> {
    fk: MifeFunctionalKey<S>,
    decoder: S::Decoder,
    key_history: Vec<[u8; 32]>,
    log: ScoreLog,
}

impl<S: TwoStepIpfe> Server<S> {
    pub fn new(mife: &Mife<S>, config: &ProtocolConfig, fk: MifeFunctionalKey<S>) -> Result<Self> {
        let decoder = Self::build_decoder(mife, config, fk.keys.len())?;
        Ok(Self {
            key_history: alloc::vec![key_digest(mife, &fk)],
            fk,
            decoder,
            log: ScoreLog::new(config.patience),
        })
    }

    fn build_decoder(mife: &Mife<S>, config: &ProtocolConfig, clients: usize) -> Result<S::Decoder> {
        let (lower, upper) = config.result_window(clients)?;
        mife.decoder(DlogWindow::new(lower, upper)?, config.params as u64 + 1)
    }

    pub fn install_key(&mut self, mife: &Mife<S>, config: &ProtocolConfig, fk: MifeFunctionalKey<S>) -> Result<()> {
        if fk.keys.len() != self.fk.keys.len() {
            self.decoder = Self::build_decoder(mife, config, fk.keys.len())?;
        }
        self.key_history.push(key_digest(mife, &fk));
        self.fk = fk;
        Ok(())
    }

    pub fn functional_key(&self) -> &MifeFunctionalKey<S> {
        &self.fk
    }

    /// Digests of every functional key this server has held.
    pub fn key_history(&self) -> &[[u8; 32]] {
        &self.key_history
    }

    pub fn log(&self) -> &ScoreLog {
        &self.log
    }

    pub fn clients(&self) -> usize {
        self.fk.keys.len()
    }

    fn check_columns(&self, columns: usize) -> Result<()> {
        if columns != self.clients() {
            let present = columns.min(self.clients());
            let missing = self.fk.keys.get(present).map_or(0, |(id, _)| *id);
            return Err(if columns < self.clients() {
                Error::MissingSlot(missing)
            } else {
                Error::DimensionMismatch {
                    expected: self.clients(),
                    got: columns,
                }
            });
        }
        Ok(())
    }

    /// `r_j = sum_i x_{j,i} + n gamma` from one ciphertext row per client.
    pub fn aggregate<E: Executor>(
        &self,
        mife: &Mife<S>,
        exec: &E,
        rows: &[Vec<MifeCiphertext<S>>],
    ) -> Result<Vec<i64>> {
        self.check_columns(rows.len())?;
        let len = rows[0].len();
        if let Some(row) = rows.iter().find(|r| r.len() != len) {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: row.len(),
            });
        }
        exec.map(len, |j| {
            let column: Vec<&MifeCiphertext<S>> = rows.iter().map(|r| &r[j]).collect();
            mife.decrypt_refs(&self.fk, &column, &self.decoder)
        })
        .into_iter()
        .collect()
    }

    /// Decrypts a single masked sum, one ciphertext per client.
    pub fn decrypt_sum(&self, mife: &Mife<S>, cts: &[MifeCiphertext<S>]) -> Result<i64> {
        self.check_columns(cts.len())?;
        mife.decrypt_with(&self.fk, cts, &self.decoder)
    }

    /// Decrypts the score sum and appends it to the log.
    pub fn aggregate_scores(&mut self, mife: &Mife<S>, round: u64, scores: &[MifeCiphertext<S>]) -> Result<i64> {
        let masked_sum = self.decrypt_sum(mife, scores)?;
        self.log.push(ScoreEntry {
            round,
            clients: scores.len(),
            masked_sum,
        });
        Ok(masked_sum)
    }
}

pub struct Client<S: TwoStepIpfe> {
    slot: u32,
    encryptor: ClientEncryptor<S>,
    seed: Seed,
    label_seed: Seed,
    pub model: Vec<f64>,
    pub score: f64,
    pub load: TrainingLoad,
    pub tracker: TerminationTracker,
    pub best_model: Vec<f64>,
}

impl<S: TwoStepIpfe> Client<S> {
    pub fn new(mife: &Mife<S>, csk: &MifeClientKey<S>, seed: Seed, label_seed: Seed, config: &ProtocolConfig) -> Self {
        Self {
            slot: csk.slot,
            encryptor: mife.encryptor(csk),
            seed,
            label_seed,
            model: Vec::new(),
            score: 0.0,
            load: config.bounds.full(),
            tracker: TerminationTracker::new(config.patience),
            best_model: Vec::new(),
        }
    }

    pub fn slot(&self) -> u32 {
        self.slot
    }

    pub fn rekey(&mut self, mife: &Mife<S>, csk: &MifeClientKey<S>) {
        debug_assert_eq!(csk.slot, self.slot);
        self.encryptor = mife.encryptor(csk);
    }

    pub fn label(&self, round: u64, config: &ProtocolConfig) -> RoundLabel {
        derive_label(&self.label_seed, round, config.label_bound)
    }

    /// Masks `x` with `gamma` and encrypts each entry on its own. Entry `j`
    /// draws from a seed fixed by `(client, tag, round, j)`, so any split of
    /// the work gives the same ciphertexts.
    pub fn encrypt_values<E: Executor>(
        &self,
        mife: &Mife<S>,
        exec: &E,
        x: &[i64],
        label: RoundLabel,
        tag: &str,
    ) -> Result<Vec<MifeCiphertext<S>>> {
        self.encrypt_values_at(mife, exec, x, 0, label, tag)
    }

    /// Like [`Client::encrypt_values`] for the entries starting at index
    /// `offset` of a longer vector.
    pub fn encrypt_values_at<E: Executor>(
        &self,
        mife: &Mife<S>,
        exec: &E,
        x: &[i64],
        offset: usize,
        label: RoundLabel,
        tag: &str,
    ) -> Result<Vec<MifeCiphertext<S>>> {
        let masked = mask(x, label.gamma);
        let round_seed = derive_seed(&self.seed, tag, label.round);
        exec.map(masked.len(), |j| {
            let index = offset + j;
            let mut rng = rng_from(derive_seed(&round_seed, "index", index as u64));
            mife.encrypt_with(&self.encryptor, &masked[j..=j], &mut rng)
                .map_err(|e| reindex(e, index))
        })
        .into_iter()
        .collect()
    }

    pub fn encrypt_model<E: Executor>(
        &self,
        mife: &Mife<S>,
        exec: &E,
        config: &ProtocolConfig,
        label: RoundLabel,
    ) -> Result<Vec<MifeCiphertext<S>>> {
        self.encrypt_model_range(mife, exec, config, label, 0..self.model.len())
    }

    pub fn encrypt_model_range<E: Executor>(
        &self,
        mife: &Mife<S>,
        exec: &E,
        config: &ProtocolConfig,
        label: RoundLabel,
        range: core::ops::Range<usize>,
    ) -> Result<Vec<MifeCiphertext<S>>> {
        let model = self.model.get(range.clone()).ok_or(Error::DimensionMismatch {
            expected: self.model.len(),
            got: range.end,
        })?;
        let x = encode_vector(model, config.delta, config.weight_bound).map_err(|e| match e {
            Error::NonFinite(j) => Error::NonFinite(range.start + j),
            other => reindex_from(other, range.start),
        })?;
        self.encrypt_values_at(mife, exec, &x, range.start, label, "model")
    }

    /// The own score as the aggregate sees it, truncated at `10^-delta`.
    pub fn quantized_score(&self, config: &ProtocolConfig) -> Result<f64> {
        Ok(encode(self.score, config.delta)? as f64 / config.scale() as f64)
    }

    pub fn encrypt_score<E: Executor>(
        &self,
        mife: &Mife<S>,
        exec: &E,
        config: &ProtocolConfig,
        label: RoundLabel,
    ) -> Result<MifeCiphertext<S>> {
        if !(0.0..=1.0).contains(&self.score) {
            return Err(Error::invalid("score must lie in [0, 1]"));
        }
        let x = encode(self.score, config.delta)?;
        let mut ct = self.encrypt_values(mife, exec, &[x], label, "score")?;
        Ok(ct.remove(0))
    }
}

fn reindex_from(e: Error, offset: usize) -> Error {
    match e {
        Error::BoundViolation { index, bound } => Error::BoundViolation {
            index: offset + index,
            bound,
        },
        other => other,
    }
}

fn reindex(e: Error, index: usize) -> Error {
    match e {
        Error::BoundViolation { bound, .. } => Error::BoundViolation { index, bound },
        other => other,
    }
}
