//! Inner-product FE over a prime-order subgroup of `Z_p^*`.
//!
//! Selective: `h_i = g^{s_i}`, ciphertext `(g^r, h_i^r g^{x_i})`, key `<y, s>`.
//! Adaptive: `a = (1, a)`, `W` in `Z_q^{m x 2}`, public key `(g^a, g^{Wa})`,
//! ciphertext `((g^r, g^{ar}), g^{x_i} (g^{Wa})_i^r)`, key `W^T y`.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;

use super::{check_len, check_residues, SchemeId, SecurityMode, TwoStepIpfe};
use crate::algebra::bytes::{self, Reader};
use crate::algebra::{bounded_dlog, BabyStepTable, DlogWindow, FixedBaseTable, GroupParams};
use crate::{Error, Result};

/// Largest baby-step table a decoder builds (entries).
pub const MAX_TABLE_SIZE: u64 = 1 << 24;
const FIXED_BASE_WINDOW: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DdhMasterSecret {
    Selective { s: Vec<BigUint> },
    Adaptive { w: Vec<[BigUint; 2]> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DdhPublicKey {
    Selective {
        h: Vec<BigUint>,
    },
    /// `ga = (g, g^a)`; the first component is always the generator.
    Adaptive {
        ga: [BigUint; 2],
        gwa: Vec<BigUint>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdhMasterKeys {
    pub msk: DdhMasterSecret,
    pub mpk: DdhPublicKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DdhCiphertext {
    Selective { ct0: BigUint, ct: Vec<BigUint> },
    Adaptive { ct_prime: [BigUint; 2], ct: Vec<BigUint> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DdhFunctionalKey {
    Selective { d: BigUint, y: Vec<i64> },
    Adaptive { d: [BigUint; 2], y: Vec<i64> },
}

impl DdhFunctionalKey {
    pub fn y(&self) -> &[i64] {
        match self {
            DdhFunctionalKey::Selective { y, .. } | DdhFunctionalKey::Adaptive { y, .. } => y,
        }
    }
}

impl DdhCiphertext {
    pub fn mode(&self) -> SecurityMode {
        match self {
            DdhCiphertext::Selective { .. } => SecurityMode::Selective,
            DdhCiphertext::Adaptive { .. } => SecurityMode::Adaptive,
        }
    }

    /// Componentwise product; decrypts to the sum of both plaintexts.
    pub fn mul(&self, other: &Self, group: &GroupParams) -> Result<Self> {
        let prod = |a: &[BigUint], b: &[BigUint]| -> Result<Vec<BigUint>> {
            check_len(a.len(), b.len())?;
            Ok(a.iter().zip(b).map(|(x, y)| group.mul(x, y)).collect())
        };
        match (self, other) {
            (DdhCiphertext::Selective { ct0: a0, ct: a }, DdhCiphertext::Selective { ct0: b0, ct: b }) => {
                Ok(DdhCiphertext::Selective {
                    ct0: group.mul(a0, b0),
                    ct: prod(a, b)?,
                })
            }
            (DdhCiphertext::Adaptive { ct_prime: ap, ct: a }, DdhCiphertext::Adaptive { ct_prime: bp, ct: b }) => {
                Ok(DdhCiphertext::Adaptive {
                    ct_prime: [group.mul(&ap[0], &bp[0]), group.mul(&ap[1], &bp[1])],
                    ct: prod(a, b)?,
                })
            }
            _ => Err(Error::ModeMismatch),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DdhScheme {
    mode: SecurityMode,
    group: GroupParams,
    dim: usize,
}

impl DdhScheme {
    pub fn new(mode: SecurityMode, group: GroupParams, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("vector dimension must be at least 1"));
        }
        Ok(Self { mode, group, dim })
    }

    pub fn mode(&self) -> SecurityMode {
        self.mode
    }

    pub fn group(&self) -> &GroupParams {
        &self.group
    }

    pub fn setup<G: RngCore + ?Sized>(&self, rng: &mut G) -> DdhMasterKeys {
        let msk = match self.mode {
            SecurityMode::Selective => DdhMasterSecret::Selective {
                s: (0..self.dim).map(|_| self.group.random_exponent(rng)).collect(),
            },
            SecurityMode::Adaptive => {
                // a is drawn first, then W row by row.
                let a = self.group.random_exponent(rng);
                let w = (0..self.dim)
                    .map(|_| [self.group.random_exponent(rng), self.group.random_exponent(rng)])
                    .collect();
                return self.keys_from_adaptive_secret(&a, w);
            }
        };
        self.keys_from_secret(msk).expect("fresh secret has the right shape")
    }

    /// Master keys for a given selective secret `s`.
    pub fn keys_from_secret(&self, msk: DdhMasterSecret) -> Result<DdhMasterKeys> {
        match (&msk, self.mode) {
            (DdhMasterSecret::Selective { s }, SecurityMode::Selective) => {
                check_len(self.dim, s.len())?;
                let h = s.iter().map(|si| self.group.pow_g(si)).collect();
                Ok(DdhMasterKeys {
                    mpk: DdhPublicKey::Selective { h },
                    msk,
                })
            }
            _ => Err(Error::ModeMismatch),
        }
    }

    /// Master keys for a given adaptive secret `(a, W)`.
    pub fn keys_from_adaptive_secret(&self, a: &BigUint, w: Vec<[BigUint; 2]>) -> DdhMasterKeys {
        let q = self.group.order();
        let gwa = w
            .iter()
            .map(|row| self.group.pow_g(&((&row[0] + &row[1] * a) % q)))
            .collect();
        DdhMasterKeys {
            mpk: DdhPublicKey::Adaptive {
                ga: [self.group.generator().clone(), self.group.pow_g(a)],
                gwa,
            },
            msk: DdhMasterSecret::Adaptive { w },
        }
    }

    /// Encrypts a signed vector; entries are reduced modulo the group order.
    pub fn encrypt<G: RngCore + ?Sized>(&self, mpk: &DdhPublicKey, x: &[i64], rng: &mut G) -> Result<DdhCiphertext> {
        let r = self.group.random_exponent(rng);
        self.encrypt_with_randomness(mpk, x, &r)
    }

    pub fn encrypt_with_randomness(&self, mpk: &DdhPublicKey, x: &[i64], r: &BigUint) -> Result<DdhCiphertext> {
        check_len(self.dim, x.len())?;
        let residues: Vec<BigUint> = x.iter().map(|&v| self.group.reduce_exponent(v)).collect();
        self.encrypt_residues_with_randomness(mpk, &residues, r)
    }

    fn encrypt_residues_with_randomness(
        &self,
        mpk: &DdhPublicKey,
        x: &[BigUint],
        r: &BigUint,
    ) -> Result<DdhCiphertext> {
        let g = &self.group;
        let payload = |bases: &[BigUint]| -> Vec<BigUint> {
            bases
                .iter()
                .zip(x)
                .map(|(hi, xi)| g.mul(&g.pow(hi, r), &g.pow_g(xi)))
                .collect()
        };
        match (mpk, self.mode) {
            (DdhPublicKey::Selective { h }, SecurityMode::Selective) => {
                check_len(self.dim, h.len())?;
                Ok(DdhCiphertext::Selective {
                    ct0: g.pow_g(r),
                    ct: payload(h),
                })
            }
            (DdhPublicKey::Adaptive { ga, gwa }, SecurityMode::Adaptive) => {
                check_len(self.dim, gwa.len())?;
                Ok(DdhCiphertext::Adaptive {
                    ct_prime: [g.pow(&ga[0], r), g.pow(&ga[1], r)],
                    ct: payload(gwa),
                })
            }
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn keygen(&self, msk: &DdhMasterSecret, y: &[i64]) -> Result<DdhFunctionalKey> {
        check_len(self.dim, y.len())?;
        let q = self.group.order();
        let dot = |col: &mut dyn Iterator<Item = &BigUint>| {
            let mut acc = num_bigint::BigInt::zero();
            for (v, &yi) in col.zip(y) {
                acc += num_bigint::BigInt::from(v.clone()) * yi;
            }
            crate::algebra::modular::reduce(&acc, q)
        };
        match (msk, self.mode) {
            (DdhMasterSecret::Selective { s }, SecurityMode::Selective) => Ok(DdhFunctionalKey::Selective {
                d: dot(&mut s.iter()),
                y: y.to_vec(),
            }),
            (DdhMasterSecret::Adaptive { w }, SecurityMode::Adaptive) => Ok(DdhFunctionalKey::Adaptive {
                d: [dot(&mut w.iter().map(|r| &r[0])), dot(&mut w.iter().map(|r| &r[1]))],
                y: y.to_vec(),
            }),
            _ => Err(Error::ModeMismatch),
        }
    }

    /// `prod ct_i^{y_i}` over the payload components.
    fn weighted_product(&self, ct: &[BigUint], y: &[i64]) -> Result<BigUint> {
        check_len(y.len(), ct.len())?;
        let mut acc = self.group.identity();
        for (c, &yi) in ct.iter().zip(y) {
            match yi {
                0 => {}
                1 => acc = self.group.mul(&acc, c),
                _ => acc = self.group.mul(&acc, &self.group.pow_signed(c, yi)),
            }
        }
        Ok(acc)
    }

    /// Returns `g^{<x, y>}` without taking the discrete logarithm.
    pub fn decrypt_partial(&self, ct: &DdhCiphertext, fk: &DdhFunctionalKey) -> Result<BigUint> {
        let g = &self.group;
        match (ct, fk) {
            (DdhCiphertext::Selective { ct0, ct }, DdhFunctionalKey::Selective { d, y }) => {
                let num = self.weighted_product(ct, y)?;
                Ok(g.mul(&num, &g.pow_neg(ct0, d)))
            }
            (DdhCiphertext::Adaptive { ct_prime, ct }, DdhFunctionalKey::Adaptive { d, y }) => {
                let num = self.weighted_product(ct, y)?;
                let den = g.mul(&g.pow_neg(&ct_prime[0], &d[0]), &g.pow_neg(&ct_prime[1], &d[1]));
                Ok(g.mul(&num, &den))
            }
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn decrypt(&self, ct: &DdhCiphertext, fk: &DdhFunctionalKey, window: DlogWindow) -> Result<i64> {
        bounded_dlog(&self.group, &self.decrypt_partial(ct, fk)?, window)
    }

    fn write_small(&self, y: &[i64], out: &mut Vec<u8>) {
        bytes::write_small_vector(y, out);
    }
}

/// Fixed-base tables for every base an encryption exponentiates.
///
/// Consumes randomness exactly like [`DdhScheme::encrypt`], so both paths
/// produce identical ciphertexts from identical generators.
#[derive(Clone, Debug)]
pub struct DdhEncryptor {
    mode: SecurityMode,
    g: FixedBaseTable,
    /// Selective: `[h_i]`. Adaptive: `[g^a, g^{Wa}_1, ...]`.
    bases: Vec<FixedBaseTable>,
}

impl DdhEncryptor {
    pub fn new(scheme: &DdhScheme, mpk: &DdhPublicKey) -> Self {
        let group = &scheme.group;
        let bits = group.order().bits();
        let table = |b: &BigUint| FixedBaseTable::new(b, group.modulus(), bits, FIXED_BASE_WINDOW);
        let bases = match mpk {
            DdhPublicKey::Selective { h } => h.iter().map(table).collect(),
            DdhPublicKey::Adaptive { ga, gwa } => core::iter::once(&ga[1]).chain(gwa).map(table).collect(),
        };
        Self {
            mode: scheme.mode,
            g: table(group.generator()),
            bases,
        }
    }

    fn encrypt(&self, group: &GroupParams, x: &[BigUint], r: &BigUint) -> DdhCiphertext {
        let g_r = self.g.pow(r);
        match self.mode {
            SecurityMode::Selective => DdhCiphertext::Selective {
                ct0: g_r,
                ct: self
                    .bases
                    .iter()
                    .zip(x)
                    .map(|(h, xi)| group.mul(&h.pow(r), &self.g.pow(xi)))
                    .collect(),
            },
            SecurityMode::Adaptive => DdhCiphertext::Adaptive {
                ct_prime: [g_r, self.bases[0].pow(r)],
                ct: self.bases[1..]
                    .iter()
                    .zip(x)
                    .map(|(h, xi)| group.mul(&h.pow(r), &self.g.pow(xi)))
                    .collect(),
            },
        }
    }
}

impl TwoStepIpfe for DdhScheme {
    type MasterSecret = DdhMasterSecret;
    type PublicKey = DdhPublicKey;
    type Encryptor = DdhEncryptor;
    type FunctionalKey = DdhFunctionalKey;
    type Ciphertext = DdhCiphertext;
    type Partial = BigUint;
    type Decoder = BabyStepTable;

    fn scheme_id(&self) -> SchemeId {
        match self.mode {
            SecurityMode::Selective => SchemeId::DdhSelective,
            SecurityMode::Adaptive => SchemeId::DdhAdaptive,
        }
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn plaintext_modulus(&self) -> &BigUint {
        self.group.order()
    }

    fn generate<G: RngCore + ?Sized>(&self, rng: &mut G) -> (DdhMasterSecret, DdhPublicKey) {
        let keys = self.setup(rng);
        (keys.msk, keys.mpk)
    }

    fn encryptor(&self, pk: &DdhPublicKey) -> DdhEncryptor {
        DdhEncryptor::new(self, pk)
    }

    fn encrypt_residues<G: RngCore + ?Sized>(
        &self,
        enc: &DdhEncryptor,
        x: &[BigUint],
        rng: &mut G,
    ) -> Result<DdhCiphertext> {
        check_len(self.dim, x.len())?;
        check_residues(x, self.group.order())?;
        if enc.mode != self.mode {
            return Err(Error::ModeMismatch);
        }
        let r = self.group.random_exponent(rng);
        Ok(enc.encrypt(&self.group, x, &r))
    }

    fn encrypt_once<G: RngCore + ?Sized>(
        &self,
        pk: &DdhPublicKey,
        x: &[BigUint],
        rng: &mut G,
    ) -> Result<DdhCiphertext> {
        check_len(self.dim, x.len())?;
        check_residues(x, self.group.order())?;
        let r = self.group.random_exponent(rng);
        self.encrypt_residues_with_randomness(pk, x, &r)
    }

    fn derive_key(&self, msk: &DdhMasterSecret, y: &[i64]) -> Result<DdhFunctionalKey> {
        self.keygen(msk, y)
    }

    fn key_vector<'a>(&self, fk: &'a DdhFunctionalKey) -> &'a [i64] {
        fk.y()
    }

    fn decrypt_partial(&self, ct: &DdhCiphertext, fk: &DdhFunctionalKey) -> Result<BigUint> {
        DdhScheme::decrypt_partial(self, ct, fk)
    }

    fn identity_partial(&self) -> BigUint {
        self.group.identity()
    }

    fn combine(&self, a: &BigUint, b: &BigUint) -> BigUint {
        self.group.mul(a, b)
    }

    fn decoder(&self, window: DlogWindow, uses: u64) -> Result<BabyStepTable> {
        let size = BabyStepTable::amortized_size(&window, uses, MAX_TABLE_SIZE);
        BabyStepTable::new(&self.group, window, size)
    }

    fn finish(&self, combined: &BigUint, z: &BigUint, decoder: &BabyStepTable) -> Result<i64> {
        let target = self.group.mul(
            combined,
            &self.group.pow_neg(self.group.generator(), &(z % self.group.order())),
        );
        decoder.solve(&target)
    }

    fn write_public_key(&self, pk: &DdhPublicKey, out: &mut Vec<u8>) {
        match pk {
            DdhPublicKey::Selective { h } => h.iter().for_each(|e| self.group.write_element(e, out)),
            DdhPublicKey::Adaptive { ga, gwa } => {
                self.group.write_element(&ga[1], out);
                gwa.iter().for_each(|e| self.group.write_element(e, out));
            }
        }
    }

    fn read_public_key(&self, r: &mut Reader<'_>) -> Result<DdhPublicKey> {
        let g = &self.group;
        let elems = |r: &mut Reader<'_>| (0..self.dim).map(|_| g.read_element(r)).collect::<Result<Vec<_>>>();
        Ok(match self.mode {
            SecurityMode::Selective => DdhPublicKey::Selective { h: elems(r)? },
            SecurityMode::Adaptive => {
                let ga = [g.generator().clone(), g.read_element(r)?];
                DdhPublicKey::Adaptive { ga, gwa: elems(r)? }
            }
        })
    }

    fn write_ciphertext(&self, ct: &DdhCiphertext, out: &mut Vec<u8>) {
        let g = &self.group;
        match ct {
            DdhCiphertext::Selective { ct0, ct } => {
                g.write_element(ct0, out);
                ct.iter().for_each(|e| g.write_element(e, out));
            }
            DdhCiphertext::Adaptive { ct_prime, ct } => {
                ct_prime.iter().chain(ct).for_each(|e| g.write_element(e, out));
            }
        }
    }

    fn read_ciphertext(&self, r: &mut Reader<'_>) -> Result<DdhCiphertext> {
        let g = &self.group;
        let elems = |r: &mut Reader<'_>| (0..self.dim).map(|_| g.read_element(r)).collect::<Result<Vec<_>>>();
        Ok(match self.mode {
            SecurityMode::Selective => DdhCiphertext::Selective {
                ct0: g.read_element(r)?,
                ct: elems(r)?,
            },
            SecurityMode::Adaptive => DdhCiphertext::Adaptive {
                ct_prime: [g.read_element(r)?, g.read_element(r)?],
                ct: elems(r)?,
            },
        })
    }

    fn write_functional_key(&self, fk: &DdhFunctionalKey, out: &mut Vec<u8>) {
        match fk {
            DdhFunctionalKey::Selective { d, y } => {
                self.group.write_scalar(d, out);
                self.write_small(y, out);
            }
            DdhFunctionalKey::Adaptive { d, y } => {
                self.group.write_scalar(&d[0], out);
                self.group.write_scalar(&d[1], out);
                self.write_small(y, out);
            }
        }
    }

    fn read_functional_key(&self, r: &mut Reader<'_>) -> Result<DdhFunctionalKey> {
        let g = &self.group;
        let fk = match self.mode {
            SecurityMode::Selective => {
                let d = g.read_scalar(r)?;
                DdhFunctionalKey::Selective {
                    d,
                    y: bytes::read_small_vector(r)?,
                }
            }
            SecurityMode::Adaptive => {
                let d = [g.read_scalar(r)?, g.read_scalar(r)?];
                DdhFunctionalKey::Adaptive {
                    d,
                    y: bytes::read_small_vector(r)?,
                }
            }
        };
        check_len(self.dim, fk.y().len())?;
        Ok(fk)
    }

    fn ciphertext_bytes(&self) -> usize {
        let elems = match self.mode {
            SecurityMode::Selective => 1 + self.dim,
            SecurityMode::Adaptive => 2 + self.dim,
        };
        elems * self.group.element_bytes()
    }
}
