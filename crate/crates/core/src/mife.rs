//! Multi-input inner-product FE from any [`TwoStepIpfe`].
//!
//! Slot `i` holds an independent instance of the single-input scheme and a
//! one-time pad `u_i` over the scheme's plaintext space. Clients encrypt
//! `x_i + u_i`; a functional key for `(y_1, ..., y_n)` carries the per-slot
//! keys plus `z = sum <u_i, y_i>`, which the final decryption step removes.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use rand::RngCore;

use crate::algebra::bytes::{self, Reader};
use crate::algebra::{modular, DlogWindow};
use crate::ipfe::{check_len, SchemeId, TwoStepIpfe};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MifeConfig {
    /// Number of slots `n`.
    pub clients: usize,
    /// Per-slot vector length `m`.
    pub dim: usize,
    /// Plaintexts satisfy `|x| <= plaintext_bound`.
    pub plaintext_bound: u64,
    /// Key vectors satisfy `|y| <= key_bound`.
    pub key_bound: u64,
}

impl MifeConfig {
    /// `n * m * X * Y`, the largest possible magnitude of a result.
    pub fn result_bound(&self) -> Result<u64> {
        (self.clients as u64)
            .checked_mul(self.dim as u64)
            .and_then(|v| v.checked_mul(self.plaintext_bound))
            .and_then(|v| v.checked_mul(self.key_bound.max(1)))
            .filter(|&v| v < (1 << 62))
            .ok_or_else(|| Error::invalid("result bound overflows"))
    }

    pub fn default_window(&self) -> Result<DlogWindow> {
        let b = self.result_bound()? as i64;
        DlogWindow::new(-b, b)
    }
}

#[derive(Clone, Debug)]
pub struct MasterSlot<S: TwoStepIpfe> {
    pub id: u32,
    pub msk: S::MasterSecret,
    pub mpk: S::PublicKey,
    pub pad: Vec<BigUint>,
}

/// Everything the key authority keeps.
#[derive(Clone, Debug)]
pub struct MifeMasterKey<S: TwoStepIpfe> {
    slots: Vec<MasterSlot<S>>,
}

impl<S: TwoStepIpfe> MifeMasterKey<S> {
    pub fn slots(&self) -> &[MasterSlot<S>] {
        &self.slots
    }

    pub fn slot_ids(&self) -> Vec<u32> {
        self.slots.iter().map(|s| s.id).collect()
    }

    pub fn clients(&self) -> usize {
        self.slots.len()
    }

    fn slot_mut(&mut self, id: u32) -> Result<&mut MasterSlot<S>> {
        self.slots.iter_mut().find(|s| s.id == id).ok_or(Error::MissingSlot(id))
    }

    pub fn client_key(&self, id: u32) -> Result<MifeClientKey<S>> {
        let s = self.slots.iter().find(|s| s.id == id).ok_or(Error::MissingSlot(id))?;
        Ok(MifeClientKey {
            slot: s.id,
            mpk: s.mpk.clone(),
            pad: s.pad.clone(),
        })
    }

    pub fn client_keys(&self) -> Vec<MifeClientKey<S>> {
        self.slots
            .iter()
            .map(|s| MifeClientKey {
                slot: s.id,
                mpk: s.mpk.clone(),
                pad: s.pad.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct MifeClientKey<S: TwoStepIpfe> {
    pub slot: u32,
    pub mpk: S::PublicKey,
    pub pad: Vec<BigUint>,
}

#[derive(Clone, Debug)]
pub struct MifeFunctionalKey<S: TwoStepIpfe> {
    pub keys: Vec<(u32, S::FunctionalKey)>,
    pub z: BigUint,
    pub y: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct MifeCiphertext<S: TwoStepIpfe> {
    pub slot: u32,
    pub inner: S::Ciphertext,
}

impl<S: TwoStepIpfe> PartialEq for MifeClientKey<S> {
    fn eq(&self, other: &Self) -> bool {
        self.slot == other.slot && self.mpk == other.mpk && self.pad == other.pad
    }
}

impl<S: TwoStepIpfe> PartialEq for MifeFunctionalKey<S> {
    fn eq(&self, other: &Self) -> bool {
        self.keys == other.keys && self.z == other.z && self.y == other.y
    }
}

impl<S: TwoStepIpfe> PartialEq for MifeCiphertext<S> {
    fn eq(&self, other: &Self) -> bool {
        self.slot == other.slot && self.inner == other.inner
    }
}

/// A client key with the inner scheme's encryption precomputation.
pub struct ClientEncryptor<S: TwoStepIpfe> {
    slot: u32,
    pad: Vec<BigUint>,
    inner: S::Encryptor,
}

impl<S: TwoStepIpfe> ClientEncryptor<S> {
    pub fn slot(&self) -> u32 {
        self.slot
    }
}

#[derive(Clone, Debug)]
pub struct Mife<S: TwoStepIpfe> {
    scheme: S,
    config: MifeConfig,
}

impl<S: TwoStepIpfe> Mife<S> {
    pub fn new(scheme: S, config: MifeConfig) -> Result<Self> {
        if config.clients < 2 {
            return Err(Error::TooFewClients {
                required: 2,
                got: config.clients,
            });
        }
        check_len(scheme.dimension(), config.dim)?;
        let window = config.default_window()?;
        if BigUint::from(window.width()) > *scheme.plaintext_modulus() {
            return Err(Error::invalid("n * m * X * Y does not fit the pad modulus"));
        }
        Ok(Self { scheme, config })
    }

    pub fn scheme(&self) -> &S {
        &self.scheme
    }

    pub fn config(&self) -> &MifeConfig {
        &self.config
    }

    pub fn scheme_id(&self) -> SchemeId {
        self.scheme.scheme_id()
    }

    pub fn pad_modulus(&self) -> &BigUint {
        self.scheme.plaintext_modulus()
    }

    fn random_pad<G: RngCore + ?Sized>(&self, rng: &mut G) -> Vec<BigUint> {
        (0..self.config.dim)
            .map(|_| modular::random_below(rng, self.pad_modulus()))
            .collect()
    }

    fn new_slot<G: RngCore + ?Sized>(&self, id: u32, padded: bool, rng: &mut G) -> MasterSlot<S> {
        let (msk, mpk) = self.scheme.generate(rng);
        let pad = if padded {
            self.random_pad(rng)
        } else {
            alloc::vec![BigUint::default(); self.config.dim]
        };
        MasterSlot { id, msk, mpk, pad }
    }

    /// Slots are numbered from 1.
    pub fn setup<G: RngCore + ?Sized>(&self, rng: &mut G) -> (MifeMasterKey<S>, Vec<MifeClientKey<S>>) {
        self.setup_inner(true, rng)
    }

    /// Setup with every pad fixed to zero; only meaningful for checking that
    /// pads do not change results.
    pub fn setup_unpadded<G: RngCore + ?Sized>(&self, rng: &mut G) -> (MifeMasterKey<S>, Vec<MifeClientKey<S>>) {
        self.setup_inner(false, rng)
    }

    fn setup_inner<G: RngCore + ?Sized>(&self, padded: bool, rng: &mut G) -> (MifeMasterKey<S>, Vec<MifeClientKey<S>>) {
        let slots = (1..=self.config.clients as u32)
            .map(|id| self.new_slot(id, padded, rng))
            .collect();
        let msk = MifeMasterKey { slots };
        let cks = msk.client_keys();
        (msk, cks)
    }

    pub fn encryptor(&self, csk: &MifeClientKey<S>) -> ClientEncryptor<S> {
        ClientEncryptor {
            slot: csk.slot,
            pad: csk.pad.clone(),
            inner: self.scheme.encryptor(&csk.mpk),
        }
    }

    fn padded(&self, pad: &[BigUint], x: &[i64]) -> Result<Vec<BigUint>> {
        check_len(self.config.dim, x.len())?;
        check_len(self.config.dim, pad.len())?;
        let p = self.pad_modulus();
        x.iter()
            .zip(pad)
            .enumerate()
            .map(|(index, (&v, u))| {
                if v.unsigned_abs() > self.config.plaintext_bound {
                    return Err(Error::BoundViolation {
                        index,
                        bound: alloc::format!("{}", self.config.plaintext_bound),
                    });
                }
                Ok(modular::reduce(&(BigInt::from(v) + BigInt::from(u.clone())), p))
            })
            .collect()
    }

    pub fn encrypt<G: RngCore + ?Sized>(
        &self,
        csk: &MifeClientKey<S>,
        x: &[i64],
        rng: &mut G,
    ) -> Result<MifeCiphertext<S>> {
        let residues = self.padded(&csk.pad, x)?;
        Ok(MifeCiphertext {
            slot: csk.slot,
            inner: self.scheme.encrypt_once(&csk.mpk, &residues, rng)?,
        })
    }

    pub fn encrypt_with<G: RngCore + ?Sized>(
        &self,
        enc: &ClientEncryptor<S>,
        x: &[i64],
        rng: &mut G,
    ) -> Result<MifeCiphertext<S>> {
        let residues = self.padded(&enc.pad, x)?;
        Ok(MifeCiphertext {
            slot: enc.slot,
            inner: self.scheme.encrypt_residues(&enc.inner, &residues, rng)?,
        })
    }

    /// `y` is the concatenation of the per-slot vectors in slot order.
    pub fn keygen(&self, msk: &MifeMasterKey<S>, y: &[i64]) -> Result<MifeFunctionalKey<S>> {
        let m = self.config.dim;
        check_len(msk.slots.len() * m, y.len())?;
        if let Some(index) = y.iter().position(|v| v.unsigned_abs() > self.config.key_bound) {
            return Err(Error::BoundViolation {
                index,
                bound: alloc::format!("{}", self.config.key_bound),
            });
        }
        let mut z = BigInt::default();
        let mut keys = Vec::with_capacity(msk.slots.len());
        for (slot, yi) in msk.slots.iter().zip(y.chunks(m)) {
            keys.push((slot.id, self.scheme.derive_key(&slot.msk, yi)?));
            for (u, &v) in slot.pad.iter().zip(yi) {
                z += BigInt::from(u.clone()) * v;
            }
        }
        Ok(MifeFunctionalKey {
            keys,
            z: modular::reduce(&z, self.pad_modulus()),
            y: y.to_vec(),
        })
    }

    /// Decoder for `uses` decryptions with results in `window`.
    pub fn decoder(&self, window: DlogWindow, uses: u64) -> Result<S::Decoder> {
        self.scheme.decoder(window, uses)
    }

    pub fn decrypt(&self, fk: &MifeFunctionalKey<S>, cts: &[MifeCiphertext<S>]) -> Result<i64> {
        let decoder = self.decoder(self.config.default_window()?, 1)?;
        self.decrypt_with(fk, cts, &decoder)
    }

    /// First decryption step for every slot, combined.
    pub fn combined_partial(&self, fk: &MifeFunctionalKey<S>, cts: &[&MifeCiphertext<S>]) -> Result<S::Partial> {
        let mut keys: Vec<Option<&S::FunctionalKey>> = Vec::with_capacity(cts.len());
        let mut used = alloc::vec![false; fk.keys.len()];
        for ct in cts {
            let k = fk
                .keys
                .iter()
                .position(|(id, _)| *id == ct.slot)
                .ok_or(Error::UnexpectedSlot(ct.slot))?;
            if core::mem::replace(&mut used[k], true) {
                return Err(Error::UnexpectedSlot(ct.slot));
            }
            keys.push(Some(&fk.keys[k].1));
        }
        if let Some(k) = used.iter().position(|u| !u) {
            return Err(Error::MissingSlot(fk.keys[k].0));
        }
        let mut acc = self.scheme.identity_partial();
        for (ct, key) in cts.iter().zip(keys) {
            let key = key.expect("every ciphertext was matched");
            acc = self.scheme.combine(&acc, &self.scheme.decrypt_partial(&ct.inner, key)?);
        }
        Ok(acc)
    }

    /// Requires exactly one ciphertext for every slot of `fk`, in any order.
    pub fn decrypt_with(
        &self,
        fk: &MifeFunctionalKey<S>,
        cts: &[MifeCiphertext<S>],
        decoder: &S::Decoder,
    ) -> Result<i64> {
        let refs: Vec<&MifeCiphertext<S>> = cts.iter().collect();
        self.decrypt_refs(fk, &refs, decoder)
    }

    pub fn decrypt_refs(
        &self,
        fk: &MifeFunctionalKey<S>,
        cts: &[&MifeCiphertext<S>],
        decoder: &S::Decoder,
    ) -> Result<i64> {
        let combined = self.combined_partial(fk, cts)?;
        self.scheme.finish(&combined, &fk.z, decoder)
    }

    /// Draws a fresh pad for `slot` and returns the slot's new client key.
    pub fn rerandomize_pad<G: RngCore + ?Sized>(
        &self,
        msk: &mut MifeMasterKey<S>,
        slot: u32,
        rng: &mut G,
    ) -> Result<MifeClientKey<S>> {
        let pad = self.random_pad(rng);
        msk.slot_mut(slot)?.pad = pad;
        msk.client_key(slot)
    }

    /// Adds a slot with fresh keys and pad, numbered after the largest id.
    pub fn add_slot<G: RngCore + ?Sized>(&self, msk: &mut MifeMasterKey<S>, rng: &mut G) -> Result<MifeClientKey<S>> {
        let id = msk.slots.iter().map(|s| s.id).max().unwrap_or(0) + 1;
        let slot = self.new_slot(id, true, rng);
        msk.slots.push(slot);
        self.check_capacity(msk)?;
        msk.client_key(id)
    }

    pub fn remove_slot(&self, msk: &mut MifeMasterKey<S>, slot: u32) -> Result<()> {
        if msk.slots.len() <= 2 {
            return Err(Error::TooFewClients {
                required: 2,
                got: msk.slots.len() - 1,
            });
        }
        let k = msk
            .slots
            .iter()
            .position(|s| s.id == slot)
            .ok_or(Error::MissingSlot(slot))?;
        msk.slots.remove(k);
        Ok(())
    }

    fn check_capacity(&self, msk: &MifeMasterKey<S>) -> Result<()> {
        let cfg = MifeConfig {
            clients: msk.slots.len(),
            ..self.config
        };
        let window = cfg.default_window()?;
        if BigUint::from(window.width()) > *self.pad_modulus() {
            return Err(Error::invalid("too many slots for the pad modulus"));
        }
        Ok(())
    }

    /// Config for the current slot count of `msk`.
    pub fn config_for(&self, msk: &MifeMasterKey<S>) -> MifeConfig {
        MifeConfig {
            clients: msk.slots.len(),
            ..self.config
        }
    }

    fn pad_bytes(&self) -> usize {
        modular::residue_bytes(self.pad_modulus())
    }

    fn header(&self, slot: u32, out: &mut Vec<u8>) {
        out.push(self.scheme_id().tag());
        out.extend_from_slice(&slot.to_be_bytes());
    }

    fn read_header(&self, r: &mut Reader<'_>) -> Result<u32> {
        if SchemeId::from_tag(r.u8()?)? != self.scheme_id() {
            return Err(Error::Malformed("scheme tag does not match"));
        }
        r.u32_be()
    }

    pub fn write_ciphertext(&self, ct: &MifeCiphertext<S>, out: &mut Vec<u8>) {
        self.header(ct.slot, out);
        self.scheme.write_ciphertext(&ct.inner, out);
    }

    pub fn read_ciphertext(&self, r: &mut Reader<'_>) -> Result<MifeCiphertext<S>> {
        let slot = self.read_header(r)?;
        Ok(MifeCiphertext {
            slot,
            inner: self.scheme.read_ciphertext(r)?,
        })
    }

    /// Serialized size of one ciphertext, header included.
    pub fn ciphertext_bytes(&self) -> usize {
        5 + self.scheme.ciphertext_bytes()
    }

    pub fn write_client_key(&self, csk: &MifeClientKey<S>, out: &mut Vec<u8>) {
        self.header(csk.slot, out);
        self.scheme.write_public_key(&csk.mpk, out);
        csk.pad.iter().for_each(|u| bytes::write_be(u, self.pad_bytes(), out));
    }

    pub fn read_client_key(&self, r: &mut Reader<'_>) -> Result<MifeClientKey<S>> {
        let slot = self.read_header(r)?;
        let mpk = self.scheme.read_public_key(r)?;
        let pad = (0..self.config.dim)
            .map(|_| {
                let u = r.be(self.pad_bytes())?;
                if &u >= self.pad_modulus() {
                    return Err(Error::Malformed("pad out of range"));
                }
                Ok(u)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MifeClientKey { slot, mpk, pad })
    }

    pub fn write_functional_key(&self, fk: &MifeFunctionalKey<S>, out: &mut Vec<u8>) {
        out.push(self.scheme_id().tag());
        out.extend_from_slice(&(fk.keys.len() as u32).to_be_bytes());
        for (slot, key) in &fk.keys {
            out.extend_from_slice(&slot.to_be_bytes());
            self.scheme.write_functional_key(key, out);
        }
        bytes::write_be(&fk.z, self.pad_bytes(), out);
    }

    pub fn read_functional_key(&self, r: &mut Reader<'_>) -> Result<MifeFunctionalKey<S>> {
        if SchemeId::from_tag(r.u8()?)? != self.scheme_id() {
            return Err(Error::Malformed("scheme tag does not match"));
        }
        let count = r.u32_be()? as usize;
        if count > r.remaining() {
            return Err(Error::Malformed("slot count exceeds input"));
        }
        let mut keys = Vec::with_capacity(count);
        for _ in 0..count {
            let slot = r.u32_be()?;
            keys.push((slot, self.scheme.read_functional_key(r)?));
        }
        let z = r.be(self.pad_bytes())?;
        if &z >= self.pad_modulus() {
            return Err(Error::Malformed("pad aggregate out of range"));
        }
        let y = keys
            .iter()
            .flat_map(|(_, k)| self.scheme.key_vector(k).iter().copied())
            .collect();
        Ok(MifeFunctionalKey { keys, z, y })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{group_gen, seed};
    use crate::ipfe::ddh::DdhScheme;
    use crate::ipfe::SecurityMode;
    use crate::params::{ParamPreset, PresetId, SchemeVisitor};
    use alloc::vec;
    use proptest::prelude::*;
    use rand::Rng;

    fn toy_mife(x: u64) -> Mife<DdhScheme> {
        let scheme = DdhScheme::new(SecurityMode::Selective, group_gen("toy").unwrap(), 1).unwrap();
        Mife::new(
            scheme,
            MifeConfig {
                clients: 2,
                dim: 1,
                plaintext_bound: x,
                key_bound: 1,
            },
        )
        .unwrap()
    }

    fn with_pads(mife: &Mife<DdhScheme>, pads: &[u32]) -> MifeMasterKey<DdhScheme> {
        let (mut msk, _) = mife.setup(&mut seed::rng_from(seed::seed_from_u64(8)));
        for (slot, &u) in msk.slots.iter_mut().zip(pads) {
            slot.pad = vec![BigUint::from(u)];
        }
        msk
    }

    #[test]
    fn toy_setup_structure() {
        let mife = toy_mife(1);
        let (msk, cks) = mife.setup(&mut seed::rng_from(seed::seed_from_u64(1)));
        assert_eq!(msk.slot_ids(), vec![1, 2]);
        assert_eq!(cks.len(), 2);
        assert_ne!(cks[0].mpk, cks[1].mpk);
        for ck in &cks {
            assert_eq!(ck.pad.len(), 1);
            assert!(ck.pad[0] < BigUint::from(11u32));
        }
    }

    #[test]
    fn single_client_rejected() {
        let scheme = DdhScheme::new(SecurityMode::Selective, group_gen("toy").unwrap(), 1).unwrap();
        let cfg = MifeConfig {
            clients: 1,
            dim: 1,
            plaintext_bound: 1,
            key_bound: 1,
        };
        assert_eq!(
            Mife::new(scheme, cfg).unwrap_err(),
            Error::TooFewClients { required: 2, got: 1 }
        );
    }

    #[test]
    fn toy_pads_walkthrough() {
        let mife = toy_mife(2);
        let msk = with_pads(&mife, &[5, 7]);
        let cks = msk.client_keys();
        let mut rng = seed::rng_from(seed::seed_from_u64(2));

        let ct1 = mife.encrypt(&cks[0], &[1], &mut rng).unwrap();
        let inner_fk = mife.scheme().keygen(&msk.slots[0].msk, &[1]).unwrap();
        let window = DlogWindow::new(0, 10).unwrap();
        assert_eq!(mife.scheme().decrypt(&ct1.inner, &inner_fk, window).unwrap(), 6);

        let fk = mife.keygen(&msk, &[1, 1]).unwrap();
        assert_eq!(fk.z, BigUint::from(1u32));
        let ct2 = mife.encrypt(&cks[1], &[2], &mut rng).unwrap();
        assert_eq!(mife.decrypt(&fk, &[ct1.clone(), ct2.clone()]).unwrap(), 3);
        assert_eq!(mife.decrypt(&fk, &[ct2.clone(), ct1.clone()]).unwrap(), 3);

        let zero = mife.keygen(&msk, &[0, 0]).unwrap();
        assert_eq!(zero.z, BigUint::default());
        assert_eq!(mife.decrypt(&zero, &[ct1.clone(), ct2.clone()]).unwrap(), 0);

        assert_eq!(
            mife.decrypt(&fk, core::slice::from_ref(&ct1)),
            Err(Error::MissingSlot(2))
        );
        assert_eq!(
            mife.decrypt(&fk, &[ct1.clone(), ct1.clone()]),
            Err(Error::UnexpectedSlot(1))
        );
        assert!(matches!(
            mife.keygen(&msk, &[1, 1, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            mife.encrypt(&cks[0], &[3], &mut rng),
            Err(Error::BoundViolation { index: 0, .. })
        ));
    }

    #[test]
    fn zero_pad_degenerate_slot() {
        let mife = toy_mife(2);
        let msk = with_pads(&mife, &[0, 0]);
        let ct = mife
            .encrypt(
                &msk.client_key(1).unwrap(),
                &[2],
                &mut seed::rng_from(seed::seed_from_u64(0)),
            )
            .unwrap();
        let fk = mife.scheme().keygen(&msk.slots[0].msk, &[1]).unwrap();
        assert_eq!(
            mife.scheme()
                .decrypt(&ct.inner, &fk, DlogWindow::new(0, 10).unwrap())
                .unwrap(),
            2
        );
    }

    /// Encrypts random inputs under fresh keys and compares with the plain
    /// inner product.
    struct Trials {
        clients: usize,
        dim: usize,
        trials: usize,
        seed: u64,
        padded: bool,
    }

    impl SchemeVisitor for Trials {
        type Output = (usize, usize);

        fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> (usize, usize) {
            let cfg = MifeConfig {
                clients: self.clients,
                dim: self.dim,
                plaintext_bound: 100,
                key_bound: 100,
            };
            let mife = Mife::new(scheme, cfg).unwrap();
            let mut rng = seed::rng_from(seed::seed_from_u64(self.seed));
            let (msk, cks) = if self.padded {
                mife.setup(&mut rng)
            } else {
                mife.setup_unpadded(&mut rng)
            };
            let encs: Vec<_> = cks.iter().map(|c| mife.encryptor(c)).collect();
            let decoder = mife.decoder(cfg.default_window().unwrap(), self.trials as u64).unwrap();
            let (mut ok, mut overflow) = (0, 0);
            for _ in 0..self.trials {
                let n = self.clients * self.dim;
                let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-100..=100)).collect();
                let y: Vec<i64> = (0..n).map(|_| rng.gen_range(-100..=100)).collect();
                let expected: i64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
                let cts: Vec<_> = encs
                    .iter()
                    .zip(x.chunks(self.dim))
                    .map(|(e, xi)| mife.encrypt_with(e, xi, &mut rng).unwrap())
                    .collect();
                let fk = mife.keygen(&msk, &y).unwrap();
                match mife.decrypt_with(&fk, &cts, &decoder) {
                    Ok(v) => {
                        assert_eq!(v, expected);
                        ok += 1;
                    }
                    Err(Error::NoiseOverflow) => overflow += 1,
                    Err(e) => panic!("{e}"),
                }
            }
            (ok, overflow)
        }
    }

    #[test]
    fn compiler_correctness_all_schemes() {
        for scheme in SchemeId::ALL {
            for (i, clients) in [2, 3, 5].into_iter().enumerate() {
                let preset = ParamPreset::new(scheme, PresetId::Toy).unwrap();
                let trials = Trials {
                    clients,
                    dim: 2,
                    trials: 20,
                    seed: i as u64,
                    padded: true,
                };
                let (ok, _) = preset.visit(2, 100, trials).unwrap();
                assert_eq!(ok, 20, "{scheme} n={clients}");
            }
        }
    }

    #[test]
    fn pad_invariance() {
        for scheme in SchemeId::ALL {
            let preset = ParamPreset::new(scheme, PresetId::ToyZero).unwrap();
            for padded in [false, true] {
                let t = Trials {
                    clients: 3,
                    dim: 1,
                    trials: 10,
                    seed: 42,
                    padded,
                };
                assert_eq!(preset.visit(1, 100, t).unwrap(), (10, 0));
            }
        }
    }

    #[test]
    fn membership_changes() {
        let scheme = DdhScheme::new(SecurityMode::Selective, group_gen("toy-512").unwrap(), 1).unwrap();
        let mife = Mife::new(
            scheme,
            MifeConfig {
                clients: 3,
                dim: 1,
                plaintext_bound: 100,
                key_bound: 1,
            },
        )
        .unwrap();
        let mut rng = seed::rng_from(seed::seed_from_u64(5));
        let (mut msk, _) = mife.setup(&mut rng);
        let new = mife.add_slot(&mut msk, &mut rng).unwrap();
        assert_eq!(new.slot, 4);
        let fk = mife.keygen(&msk, &[1; 4]).unwrap();
        let cts: Vec<_> = msk
            .client_keys()
            .iter()
            .zip([10, 20, 30, 40])
            .map(|(c, x)| mife.encrypt(c, &[x], &mut rng).unwrap())
            .collect();
        assert_eq!(mife.decrypt(&fk, &cts).unwrap(), 100);

        mife.remove_slot(&mut msk, 2).unwrap();
        assert_eq!(msk.slot_ids(), vec![1, 3, 4]);
        let fk = mife.keygen(&msk, &[1; 3]).unwrap();
        let kept: Vec<_> = cts.iter().filter(|c| c.slot != 2).cloned().collect();
        assert_eq!(mife.decrypt(&fk, &kept).unwrap(), 80);
        mife.remove_slot(&mut msk, 1).unwrap();
        assert!(matches!(
            mife.remove_slot(&mut msk, 3),
            Err(Error::TooFewClients { .. })
        ));
        assert_eq!(
            mife.remove_slot(&mut msk, 9).unwrap_err(),
            Error::TooFewClients { required: 2, got: 1 }
        );
    }

    #[test]
    fn stale_pad_epoch_is_detected() {
        // A ciphertext made under a pad that has since been re-randomized
        // decrypts to a shifted value.
        let scheme = DdhScheme::new(SecurityMode::Selective, group_gen("toy-512").unwrap(), 1).unwrap();
        let mife = Mife::new(
            scheme,
            MifeConfig {
                clients: 2,
                dim: 1,
                plaintext_bound: 1000,
                key_bound: 1,
            },
        )
        .unwrap();
        let mut rng = seed::rng_from(seed::seed_from_u64(6));
        let mut shifted = 0;
        for _ in 0..50 {
            let (mut msk, cks) = mife.setup(&mut rng);
            let old = mife.encrypt(&cks[0], &[7], &mut rng).unwrap();
            let ck1 = mife.rerandomize_pad(&mut msk, 1, &mut rng).unwrap();
            assert_ne!(ck1.pad, cks[0].pad);
            let fresh = mife.encrypt(&cks[1], &[3], &mut rng).unwrap();
            let fk = mife.keygen(&msk, &[1, 1]).unwrap();
            let decoder = mife.decoder(DlogWindow::new(-5000, 5000).unwrap(), 1).unwrap();
            match mife.decrypt_with(&fk, &[old, fresh], &decoder) {
                Ok(10) => {}
                _ => shifted += 1,
            }
        }
        assert_eq!(shifted, 50);
    }

    #[test]
    fn serialization_round_trip() {
        let preset = ParamPreset::new(SchemeId::LweSelective, PresetId::Toy).unwrap();
        struct RoundTrip;
        impl SchemeVisitor for RoundTrip {
            type Output = ();
            fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) {
                let mife = Mife::new(
                    scheme,
                    MifeConfig {
                        clients: 2,
                        dim: 1,
                        plaintext_bound: 10,
                        key_bound: 1,
                    },
                )
                .unwrap();
                let mut rng = seed::rng_from(seed::seed_from_u64(1));
                let (msk, cks) = mife.setup(&mut rng);
                let ct = mife.encrypt(&cks[1], &[4], &mut rng).unwrap();
                let mut buf = vec![];
                mife.write_ciphertext(&ct, &mut buf);
                assert_eq!(buf.len(), mife.ciphertext_bytes());
                assert_eq!(buf[0], mife.scheme_id().tag());
                assert_eq!(&buf[1..5], &2u32.to_be_bytes());
                assert_eq!(mife.read_ciphertext(&mut Reader::new(&buf)).unwrap(), ct);

                let mut kb = vec![];
                mife.write_client_key(&cks[0], &mut kb);
                assert_eq!(mife.read_client_key(&mut Reader::new(&kb)).unwrap(), cks[0]);

                let fk = mife.keygen(&msk, &[1, 1]).unwrap();
                let mut fb = vec![];
                mife.write_functional_key(&fk, &mut fb);
                let back = mife.read_functional_key(&mut Reader::new(&fb)).unwrap();
                assert_eq!(back, fk);

                buf[0] = 1;
                assert!(mife.read_ciphertext(&mut Reader::new(&buf)).is_err());
            }
        }
        preset.visit(1, 1, RoundTrip).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn decrypt_is_plain_inner_product(seed_v in any::<u64>(), scheme in 0usize..4, clients in 2usize..=5) {
            let preset = ParamPreset::new(SchemeId::ALL[scheme], PresetId::ToyZero).unwrap();
            let t = Trials { clients, dim: 1, trials: 2, seed: seed_v, padded: true };
            prop_assert_eq!(preset.visit(1, 100, t).unwrap(), (2, 0));
        }
    }
}
