//! Scenario files (TOML), transcripts (JSON lines) and CSV reports.

use std::collections::BTreeMap;
use std::io::Write;

use fedmife_core::ipfe::SchemeId;
use fedmife_core::params::PresetId;
use fedmife_core::protocol::{Decision, Entity, LoadBounds, ProtocolConfig, RoundRecord, Transcript};
use serde::{Deserialize, Serialize};

use crate::Result;

/// Every protocol setting plus the preset and the seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub scheme: String,
    pub preset: String,
    pub seed: u64,
    pub clients: usize,
    pub params: usize,
    pub delta: u32,
    pub label_bound: u64,
    pub weight_bound: f64,
    pub patience: u32,
    pub max_rounds: u32,
    pub e_min: f64,
    pub e_max: f64,
    pub s_min: f64,
    pub s_max: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        let c = ProtocolConfig::new(SchemeId::DdhSelective, PresetId::Toy, 3, 100);
        Self {
            scheme: c.scheme.as_str().into(),
            preset: c.preset.as_str().into(),
            seed: 1,
            clients: c.clients,
            params: c.params,
            delta: c.delta,
            label_bound: c.label_bound,
            weight_bound: c.weight_bound,
            patience: c.patience,
            max_rounds: c.max_rounds,
            e_min: c.bounds.e_min,
            e_max: c.bounds.e_max,
            s_min: c.bounds.s_min,
            s_max: c.bounds.s_max,
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn config(&self) -> Result<ProtocolConfig> {
        let mut c = ProtocolConfig::new(self.scheme.parse()?, self.preset.parse()?, self.clients, self.params);
        c.delta = self.delta;
        c.label_bound = self.label_bound;
        c.weight_bound = self.weight_bound;
        c.patience = self.patience;
        c.max_rounds = self.max_rounds;
        c.bounds = LoadBounds {
            e_min: self.e_min,
            e_max: self.e_max,
            s_min: self.s_min,
            s_max: self.s_max,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseNs {
    pub train: u64,
    pub encrypt: u64,
    pub aggregate: u64,
    pub score: u64,
}

/// One transcript line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundLine {
    pub round: u64,
    pub a_mu: f64,
    pub decision: String,
    pub clients: Vec<u32>,
    pub trainers: Vec<u32>,
    pub phase_ns: PhaseNs,
    pub bytes: BTreeMap<String, u64>,
}

pub fn entity_name(e: Entity) -> String {
    match e {
        Entity::Tpa => "tpa".into(),
        Entity::Server => "server".into(),
        Entity::Client(i) => format!("client-{i}"),
    }
}

impl From<&RoundRecord> for RoundLine {
    fn from(r: &RoundRecord) -> Self {
        Self {
            round: r.round,
            a_mu: r.a_mu,
            decision: match r.decision {
                Decision::Continue => "continue",
                Decision::Stop => "stop",
            }
            .into(),
            clients: r.clients.clone(),
            trainers: r.trainers.clone(),
            phase_ns: PhaseNs {
                train: r.timings.train_ns,
                encrypt: r.timings.encrypt_ns,
                aggregate: r.timings.aggregate_ns,
                score: r.timings.score_ns,
            },
            bytes: r.bytes.iter().map(|&(e, b)| (entity_name(e), b)).collect(),
        }
    }
}

pub fn write_transcript<W: Write>(t: &Transcript, mut out: W) -> Result<()> {
    for r in &t.rounds {
        serde_json::to_writer(&mut out, &RoundLine::from(r))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_transcript(text: &str) -> Result<Vec<RoundLine>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Train,
    Encrypt,
    Aggregate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub scheme: String,
    pub phase: Phase,
    pub seconds: f64,
    pub n: usize,
    pub l: usize,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: u32,
    pub rounds: usize,
    pub final_score: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyRow {
    pub scheme: String,
    pub preset: String,
    pub n: usize,
    pub object: String,
    pub measured_bytes: u64,
    pub formula_bits: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemRow {
    pub scheme: String,
    pub preset: String,
    pub n: u64,
    pub l: u64,
    pub client_key_bits: u128,
    pub functional_key_bits: u128,
    pub ciphertext_bits: u128,
    pub round_ciphertext_bits: u128,
}

/// Writes `rows` as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<T>, csv::Error>>()?)
}
