//! Serialized key and ciphertext sizes next to the memory-cost formulas.

use fedmife_core::algebra::seed::seed_from_u64;
use fedmife_core::ipfe::{SchemeId, TwoStepIpfe};
use fedmife_core::memcost;
use fedmife_core::mife::{Mife, MifeConfig};
use fedmife_core::params::{ParamPreset, PresetId, SchemeVisitor};

use crate::formats::KeyRow;
use crate::Result;

/// Runs setup for `n` clients with `m = 1` and measures one client key, the
/// all-ones functional key and one ciphertext.
pub fn key_sizes(scheme: SchemeId, preset: PresetId, clients: usize, seed: u64) -> Result<Vec<KeyRow>> {
    let p = ParamPreset::new(scheme, preset)?;
    let (csk, fk, ct) = p.visit(1, 1, Measure { clients, seed })??;
    let cost = memcost::preset_cost(&p, clients as u64);
    let row = |object: &str, measured_bytes: usize, formula_bits| KeyRow {
        scheme: scheme.as_str().into(),
        preset: preset.as_str().into(),
        n: clients,
        object: object.into(),
        measured_bytes: measured_bytes as u64,
        formula_bits,
    };
    Ok(vec![
        row("client-key", csk, cost.client_key_bits),
        row("functional-key", fk, cost.functional_key_bits),
        row("ciphertext", ct, cost.ciphertext_bits),
    ])
}

struct Measure {
    clients: usize,
    seed: u64,
}

impl SchemeVisitor for Measure {
    type Output = Result<(usize, usize, usize)>;

    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> Self::Output {
        let mife = Mife::new(
            scheme,
            MifeConfig {
                clients: self.clients,
                dim: 1,
                plaintext_bound: 1,
                key_bound: 1,
            },
        )?;
        let mut rng = fedmife_core::algebra::seed::rng_from(seed_from_u64(self.seed));
        let (msk, csks) = mife.setup(&mut rng);
        let fk = mife.keygen(&msk, &vec![1; self.clients])?;
        let ct = mife.encrypt(&csks[0], &[1], &mut rng)?;
        let mut buf = Vec::new();
        mife.write_client_key(&csks[0], &mut buf);
        let csk_len = buf.len();
        buf.clear();
        mife.write_functional_key(&fk, &mut buf);
        let fk_len = buf.len();
        buf.clear();
        mife.write_ciphertext(&ct, &mut buf);
        Ok((csk_len, fk_len, buf.len()))
    }
}
