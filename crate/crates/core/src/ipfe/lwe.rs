//! Bounded-norm inner-product FE from LWE.
//!
//! Selective: `U = AS + E`, ciphertext `(A^T r, U^T r + t(x))` for binary `r`,
//! key `S y`, where `t(v) = floor(v q / p)`.
//! Adaptive: `U = SA` for a short `S`, ciphertext `(As + e0, Us + e1 + x floor(q/K))`,
//! key `S^T y`.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::RngCore;

use super::{check_len, check_residues, SchemeId, SecurityMode, TwoStepIpfe};
use crate::algebra::bytes::{self, Reader};
use crate::algebra::{modular, DlogWindow, GaussianParams, ModRing};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LweParams {
    pub mode: SecurityMode,
    /// `N`.
    pub secret_dim: usize,
    /// `M`.
    pub samples: usize,
    pub modulus: BigUint,
    /// `p` (selective) or `K` (adaptive).
    pub plaintext_modulus: BigUint,
    /// Width of `E` (selective) or of `e0, e1` (adaptive).
    pub noise: GaussianParams,
    /// Width of the entries of the adaptive secret `S`.
    pub secret_noise: GaussianParams,
    /// Plaintexts satisfy `|x_i| < plaintext_bound`.
    pub plaintext_bound: u64,
    /// Key vectors satisfy `|y_i| < key_bound`.
    pub key_bound: u64,
}

impl LweParams {
    pub fn validate(&self) -> Result<()> {
        if self.secret_dim == 0 || self.samples == 0 {
            return Err(Error::invalid("LWE dimensions must be positive"));
        }
        if self.plaintext_modulus < BigUint::from(2u32) || self.modulus <= self.plaintext_modulus {
            return Err(Error::invalid("need 2 <= plaintext modulus < q"));
        }
        if self.plaintext_bound == 0 || self.key_bound == 0 {
            return Err(Error::invalid("plaintext and key bounds must be positive"));
        }
        if BigUint::from(self.plaintext_bound) > self.plaintext_modulus {
            return Err(Error::invalid("plaintext bound exceeds the plaintext modulus"));
        }
        Ok(())
    }
}

/// `t(v) = floor(v q / p)` for `v` in `[0, p)`.
pub fn center(v: &BigUint, p: &BigUint, q: &BigUint) -> Result<BigUint> {
    if v >= p {
        return Err(Error::BoundViolation {
            index: 0,
            bound: alloc::format!("{p}"),
        });
    }
    Ok(v * q / p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LweMasterSecret<E> {
    pub mode: SecurityMode,
    /// Selective: `N x m`. Adaptive: `m x M`. Row-major.
    pub s: Vec<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LwePublicKey<E> {
    pub mode: SecurityMode,
    /// `M x N`, row-major.
    pub a: Vec<E>,
    /// Selective: `M x m`. Adaptive: `m x N`. Row-major.
    pub u: Vec<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LweMasterKeys<E> {
    pub msk: LweMasterSecret<E>,
    pub mpk: LwePublicKey<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LweCiphertext<E> {
    pub mode: SecurityMode,
    pub ct_prime: Vec<E>,
    pub ct: Vec<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LweFunctionalKey<E> {
    pub mode: SecurityMode,
    pub d: Vec<E>,
    pub y: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct LweScheme<R: ModRing> {
    params: LweParams,
    ring: R,
    dim: usize,
    /// `floor(q / K)`, used by the adaptive encoding.
    delta: BigUint,
    delta_elem: R::Elem,
    /// Residuals above this are reported as noise overflow.
    threshold: BigUint,
}

impl<R: ModRing> LweScheme<R> {
    pub fn new(params: LweParams, dim: usize) -> Result<Self> {
        params.validate()?;
        if dim == 0 {
            return Err(Error::invalid("vector dimension must be at least 1"));
        }
        let ring = R::from_modulus(&params.modulus)?;
        let delta = &params.modulus / &params.plaintext_modulus;
        let delta_elem = ring.from_biguint(&delta);
        let threshold = &params.modulus / (&params.plaintext_modulus * 4u32);
        Ok(Self {
            params,
            ring,
            dim,
            delta,
            delta_elem,
            threshold,
        })
    }

    pub fn params(&self) -> &LweParams {
        &self.params
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn mode(&self) -> SecurityMode {
        self.params.mode
    }

    fn n(&self) -> usize {
        self.params.secret_dim
    }

    fn m(&self) -> usize {
        self.params.samples
    }

    pub fn center(&self, v: &BigUint) -> Result<BigUint> {
        center(v, &self.params.plaintext_modulus, &self.params.modulus)
    }

    /// Maps a residue of the plaintext space into `Z_q`.
    pub fn encode(&self, v: &BigUint) -> R::Elem {
        match self.params.mode {
            SecurityMode::Selective => {
                let t = v * &self.params.modulus / &self.params.plaintext_modulus;
                self.ring.from_biguint(&t)
            }
            SecurityMode::Adaptive => self.ring.mul(&self.ring.from_biguint(v), &self.delta_elem),
        }
    }

    /// Nearest plaintext residue to `c`, or `NoiseOverflow` when `c` sits too
    /// far from every encoding.
    pub fn decode(&self, c: &R::Elem) -> Result<BigUint> {
        let q = &self.params.modulus;
        let p = &self.params.plaintext_modulus;
        let cv = self.ring.to_biguint(c);
        let res = match self.params.mode {
            // round(c p / q) = floor((2 c p + q) / 2q)
            SecurityMode::Selective => ((&cv * p * 2u32 + q) / (q * 2u32)) % p,
            SecurityMode::Adaptive => ((&cv * 2u32 + &self.delta) / (&self.delta * 2u32)) % p,
        };
        let residual = self.ring.sub(c, &self.encode(&res));
        let residual = modular::centered(&self.ring.to_biguint(&residual), q);
        if residual.magnitude() > &self.threshold {
            return Err(Error::NoiseOverflow);
        }
        Ok(res)
    }

    fn gaussian_vec<G: RngCore + ?Sized>(&self, g: &GaussianParams, len: usize, rng: &mut G) -> Vec<R::Elem> {
        (0..len).map(|_| self.ring.from_i128(g.sample(rng))).collect()
    }

    fn uniform_vec<G: RngCore + ?Sized>(&self, len: usize, rng: &mut G) -> Vec<R::Elem> {
        (0..len).map(|_| self.ring.random(rng)).collect()
    }

    /// Samples `A`, then the secret, then the noise, in that order.
    pub fn setup<G: RngCore + ?Sized>(&self, rng: &mut G) -> LweMasterKeys<R::Elem> {
        let (n, m, dim) = (self.n(), self.m(), self.dim);
        let a = self.uniform_vec(m * n, rng);
        match self.params.mode {
            SecurityMode::Selective => {
                let s = self.uniform_vec(n * dim, rng);
                let e = self.gaussian_vec(&self.params.noise, m * dim, rng);
                let u = self.selective_u(&a, &s, &e);
                LweMasterKeys {
                    msk: LweMasterSecret {
                        mode: SecurityMode::Selective,
                        s,
                    },
                    mpk: LwePublicKey {
                        mode: SecurityMode::Selective,
                        a,
                        u,
                    },
                }
            }
            SecurityMode::Adaptive => {
                let s = self.gaussian_vec(&self.params.secret_noise, dim * m, rng);
                let u = s.chunks(m).flat_map(|row| self.ring.mat_t_vec(&a, m, n, row)).collect();
                LweMasterKeys {
                    msk: LweMasterSecret {
                        mode: SecurityMode::Adaptive,
                        s,
                    },
                    mpk: LwePublicKey {
                        mode: SecurityMode::Adaptive,
                        a,
                        u,
                    },
                }
            }
        }
    }

    /// `AS + E` as an `M x m` row-major matrix.
    fn selective_u(&self, a: &[R::Elem], s: &[R::Elem], e: &[R::Elem]) -> Vec<R::Elem> {
        let (n, m, dim) = (self.n(), self.m(), self.dim);
        let columns: Vec<Vec<R::Elem>> = (0..dim)
            .map(|j| {
                let col: Vec<R::Elem> = (0..n).map(|k| s[k * dim + j].clone()).collect();
                self.ring.mat_vec(a, m, n, &col)
            })
            .collect();
        (0..m * dim)
            .map(|idx| self.ring.add(&columns[idx % dim][idx / dim], &e[idx]))
            .collect()
    }

    fn check_plaintext(&self, x: &[i64]) -> Result<Vec<BigUint>> {
        check_len(self.dim, x.len())?;
        let p = &self.params.plaintext_modulus;
        x.iter()
            .enumerate()
            .map(|(index, &v)| {
                if v.unsigned_abs() >= self.params.plaintext_bound {
                    Err(Error::BoundViolation {
                        index,
                        bound: alloc::format!("{}", self.params.plaintext_bound),
                    })
                } else {
                    Ok(modular::reduce_i64(v, p))
                }
            })
            .collect()
    }

    pub fn encrypt<G: RngCore + ?Sized>(
        &self,
        mpk: &LwePublicKey<R::Elem>,
        x: &[i64],
        rng: &mut G,
    ) -> Result<LweCiphertext<R::Elem>> {
        let residues = self.check_plaintext(x)?;
        self.encrypt_encoded(mpk, &residues, rng)
    }

    fn encrypt_encoded<G: RngCore + ?Sized>(
        &self,
        mpk: &LwePublicKey<R::Elem>,
        x: &[BigUint],
        rng: &mut G,
    ) -> Result<LweCiphertext<R::Elem>> {
        if mpk.mode != self.params.mode {
            return Err(Error::ModeMismatch);
        }
        let (n, m, dim) = (self.n(), self.m(), self.dim);
        match self.params.mode {
            SecurityMode::Selective => {
                check_len(m * n, mpk.a.len())?;
                check_len(m * dim, mpk.u.len())?;
                let r = binary_vector(m, rng);
                let ct_prime = self.ring.sum_rows(&mpk.a, n, &r);
                let ur = self.ring.sum_rows(&mpk.u, dim, &r);
                let ct = ur
                    .iter()
                    .zip(x)
                    .map(|(v, xi)| self.ring.add(v, &self.encode(xi)))
                    .collect();
                Ok(LweCiphertext {
                    mode: SecurityMode::Selective,
                    ct_prime,
                    ct,
                })
            }
            SecurityMode::Adaptive => {
                check_len(m * n, mpk.a.len())?;
                check_len(dim * n, mpk.u.len())?;
                let s = self.uniform_vec(n, rng);
                let e0 = self.gaussian_vec(&self.params.noise, m, rng);
                let e1 = self.gaussian_vec(&self.params.noise, dim, rng);
                let ct_prime = self
                    .ring
                    .mat_vec(&mpk.a, m, n, &s)
                    .iter()
                    .zip(&e0)
                    .map(|(v, e)| self.ring.add(v, e))
                    .collect();
                let ct = self
                    .ring
                    .mat_vec(&mpk.u, dim, n, &s)
                    .iter()
                    .zip(&e1)
                    .zip(x)
                    .map(|((v, e), xi)| self.ring.add(&self.ring.add(v, e), &self.encode(xi)))
                    .collect();
                Ok(LweCiphertext {
                    mode: SecurityMode::Adaptive,
                    ct_prime,
                    ct,
                })
            }
        }
    }

    pub fn keygen(&self, msk: &LweMasterSecret<R::Elem>, y: &[i64]) -> Result<LweFunctionalKey<R::Elem>> {
        check_len(self.dim, y.len())?;
        if msk.mode != self.params.mode {
            return Err(Error::ModeMismatch);
        }
        if let Some(index) = y.iter().position(|v| v.unsigned_abs() >= self.params.key_bound) {
            return Err(Error::BoundViolation {
                index,
                bound: alloc::format!("{}", self.params.key_bound),
            });
        }
        let ye: Vec<R::Elem> = y.iter().map(|&v| self.ring.from_i128(v.into())).collect();
        let d = match self.params.mode {
            SecurityMode::Selective => self.ring.mat_vec(&msk.s, self.n(), self.dim, &ye),
            SecurityMode::Adaptive => self.ring.mat_t_vec(&msk.s, self.dim, self.m(), &ye),
        };
        Ok(LweFunctionalKey {
            mode: self.params.mode,
            d,
            y: y.to_vec(),
        })
    }

    /// `C = <y, ct''> - <d, ct'>`, before rounding.
    pub fn decrypt_partial(&self, ct: &LweCiphertext<R::Elem>, fk: &LweFunctionalKey<R::Elem>) -> Result<R::Elem> {
        if ct.mode != fk.mode || ct.mode != self.params.mode {
            return Err(Error::ModeMismatch);
        }
        check_len(ct.ct.len(), fk.y.len())?;
        check_len(ct.ct_prime.len(), fk.d.len())?;
        let ye: Vec<R::Elem> = fk.y.iter().map(|&v| self.ring.from_i128(v.into())).collect();
        Ok(self
            .ring
            .sub(&self.ring.dot(&ye, &ct.ct), &self.ring.dot(&fk.d, &ct.ct_prime)))
    }

    /// Recovers `<x, y>` as the centered residue mod the plaintext modulus,
    /// which must satisfy `|<x, y>| <= result_bound`.
    pub fn decrypt(
        &self,
        ct: &LweCiphertext<R::Elem>,
        fk: &LweFunctionalKey<R::Elem>,
        result_bound: u64,
    ) -> Result<i64> {
        let res = self.decode(&self.decrypt_partial(ct, fk)?)?;
        let bound = i64::try_from(result_bound).map_err(|_| Error::invalid("result bound too large"))?;
        let v = modular::centered(&res, &self.params.plaintext_modulus);
        match v.to_i64() {
            Some(v) if v.abs() <= bound => Ok(v),
            _ => Err(Error::NoiseOverflow),
        }
    }
}

impl<E> LweCiphertext<E> {
    /// Componentwise sum; decrypts to the sum of both plaintexts.
    pub fn add<R: ModRing<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        check_len(self.ct_prime.len(), other.ct_prime.len())?;
        check_len(self.ct.len(), other.ct.len())?;
        let add = |a: &[E], b: &[E]| a.iter().zip(b).map(|(x, y)| ring.add(x, y)).collect();
        Ok(Self {
            mode: self.mode,
            ct_prime: add(&self.ct_prime, &other.ct_prime),
            ct: add(&self.ct, &other.ct),
        })
    }
}

fn binary_vector<G: RngCore + ?Sized>(len: usize, rng: &mut G) -> Vec<bool> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let word = rng.next_u64();
        let take = (len - out.len()).min(64);
        out.extend((0..take).map(|b| (word >> b) & 1 == 1));
    }
    out
}

/// Window check shared by the decoder: the window must fit in `Z_p`.
#[derive(Clone, Copy, Debug)]
pub struct LweDecoder {
    window: DlogWindow,
}

impl LweDecoder {
    pub fn window(&self) -> DlogWindow {
        self.window
    }
}

impl<R: ModRing> TwoStepIpfe for LweScheme<R> {
    type MasterSecret = LweMasterSecret<R::Elem>;
    type PublicKey = LwePublicKey<R::Elem>;
    type Encryptor = LwePublicKey<R::Elem>;
    type FunctionalKey = LweFunctionalKey<R::Elem>;
    type Ciphertext = LweCiphertext<R::Elem>;
    type Partial = R::Elem;
    type Decoder = LweDecoder;

    fn scheme_id(&self) -> SchemeId {
        match self.params.mode {
            SecurityMode::Selective => SchemeId::LweSelective,
            SecurityMode::Adaptive => SchemeId::LweAdaptive,
        }
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn plaintext_modulus(&self) -> &BigUint {
        &self.params.plaintext_modulus
    }

    fn generate<G: RngCore + ?Sized>(&self, rng: &mut G) -> (Self::MasterSecret, Self::PublicKey) {
        let keys = self.setup(rng);
        (keys.msk, keys.mpk)
    }

    fn encryptor(&self, pk: &Self::PublicKey) -> Self::Encryptor {
        pk.clone()
    }

    fn encrypt_residues<G: RngCore + ?Sized>(
        &self,
        enc: &Self::Encryptor,
        x: &[BigUint],
        rng: &mut G,
    ) -> Result<Self::Ciphertext> {
        check_len(self.dim, x.len())?;
        check_residues(x, &self.params.plaintext_modulus)?;
        self.encrypt_encoded(enc, x, rng)
    }

    fn derive_key(&self, msk: &Self::MasterSecret, y: &[i64]) -> Result<Self::FunctionalKey> {
        self.keygen(msk, y)
    }

    fn key_vector<'a>(&self, fk: &'a Self::FunctionalKey) -> &'a [i64] {
        &fk.y
    }

    fn decrypt_partial(&self, ct: &Self::Ciphertext, fk: &Self::FunctionalKey) -> Result<R::Elem> {
        LweScheme::decrypt_partial(self, ct, fk)
    }

    fn identity_partial(&self) -> R::Elem {
        self.ring.zero()
    }

    fn combine(&self, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.ring.add(a, b)
    }

    fn decoder(&self, window: DlogWindow, _uses: u64) -> Result<LweDecoder> {
        if BigUint::from(window.width()) > self.params.plaintext_modulus {
            return Err(Error::invalid("result window is wider than the plaintext modulus"));
        }
        Ok(LweDecoder { window })
    }

    fn finish(&self, combined: &R::Elem, z: &BigUint, decoder: &LweDecoder) -> Result<i64> {
        let p = &self.params.plaintext_modulus;
        let c = self.ring.sub(combined, &self.encode(&(z % p)));
        let res = self.decode(&c)?;
        let lower = decoder.window.lower();
        let v = modular::lift_from(&res, p, lower);
        match v.to_i64() {
            Some(v) if decoder.window.contains(v) => Ok(v),
            _ => Err(Error::NoiseOverflow),
        }
    }

    fn write_public_key(&self, pk: &Self::PublicKey, out: &mut Vec<u8>) {
        pk.a.iter().chain(&pk.u).for_each(|e| self.ring.write_le(e, out));
    }

    fn read_public_key(&self, r: &mut Reader<'_>) -> Result<Self::PublicKey> {
        let (n, m, dim) = (self.n(), self.m(), self.dim);
        let a = read_vec(&self.ring, r, m * n)?;
        let u = match self.params.mode {
            SecurityMode::Selective => read_vec(&self.ring, r, m * dim)?,
            SecurityMode::Adaptive => read_vec(&self.ring, r, dim * n)?,
        };
        Ok(LwePublicKey {
            mode: self.params.mode,
            a,
            u,
        })
    }

    fn write_ciphertext(&self, ct: &Self::Ciphertext, out: &mut Vec<u8>) {
        ct.ct_prime
            .iter()
            .chain(&ct.ct)
            .for_each(|e| self.ring.write_le(e, out));
    }

    fn read_ciphertext(&self, r: &mut Reader<'_>) -> Result<Self::Ciphertext> {
        let first = match self.params.mode {
            SecurityMode::Selective => self.n(),
            SecurityMode::Adaptive => self.m(),
        };
        Ok(LweCiphertext {
            mode: self.params.mode,
            ct_prime: read_vec(&self.ring, r, first)?,
            ct: read_vec(&self.ring, r, self.dim)?,
        })
    }

    fn write_functional_key(&self, fk: &Self::FunctionalKey, out: &mut Vec<u8>) {
        fk.d.iter().for_each(|e| self.ring.write_le(e, out));
        bytes::write_small_vector(&fk.y, out);
    }

    fn read_functional_key(&self, r: &mut Reader<'_>) -> Result<Self::FunctionalKey> {
        let len = match self.params.mode {
            SecurityMode::Selective => self.n(),
            SecurityMode::Adaptive => self.m(),
        };
        let d = read_vec(&self.ring, r, len)?;
        let y = bytes::read_small_vector(r)?;
        check_len(self.dim, y.len())?;
        Ok(LweFunctionalKey {
            mode: self.params.mode,
            d,
            y,
        })
    }

    fn ciphertext_bytes(&self) -> usize {
        let first = match self.params.mode {
            SecurityMode::Selective => self.n(),
            SecurityMode::Adaptive => self.m(),
        };
        (first + self.dim) * self.ring.byte_width()
    }
}

fn read_vec<R: ModRing>(ring: &R, r: &mut Reader<'_>, len: usize) -> Result<Vec<R::Elem>> {
    (0..len).map(|_| ring.read_le(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{seed, BigRing, WordRing};
    use alloc::vec;
    use num_traits::Zero;
    use proptest::prelude::*;
    use rand::Rng;

    #[allow(clippy::too_many_arguments)]
    fn params(mode: SecurityMode, n: usize, m: usize, log_q: u32, p: u64, sigma: f64, x: u64, y: u64) -> LweParams {
        LweParams {
            mode,
            secret_dim: n,
            samples: m,
            modulus: BigUint::from(1u32) << log_q,
            plaintext_modulus: BigUint::from(p),
            noise: GaussianParams::with_std_dev(sigma).unwrap(),
            secret_noise: GaussianParams::with_std_dev(sigma).unwrap(),
            plaintext_bound: x,
            key_bound: y,
        }
    }

    #[test]
    fn center_function() {
        let p = BigUint::from(8u32);
        let q = BigUint::from(1u32 << 13);
        assert_eq!(center(&BigUint::zero(), &p, &q).unwrap(), BigUint::zero());
        assert_eq!(center(&BigUint::from(3u32), &p, &q).unwrap(), BigUint::from(3072u32));
        assert!(center(&p, &p, &q).is_err());
    }

    #[test]
    fn zero_noise_selective_setup_is_exact() {
        let s = LweScheme::<WordRing>::new(params(SecurityMode::Selective, 4, 20, 13, 8, 0.0001, 8, 8), 1).unwrap();
        let keys = s.setup(&mut seed::rng_from(seed::seed_from_u64(1)));
        let q = 1u64 << 13;
        for row in 0..20 {
            let expected = (0..4).fold(0u64, |acc, k| (acc + keys.mpk.a[row * 4 + k] * keys.msk.s[k]) % q);
            assert_eq!(keys.mpk.u[row], expected);
        }
        let fk = s.keygen(&keys.msk, &[1]).unwrap();
        assert_eq!(fk.d, keys.msk.s);
        let zero = s.keygen(&keys.msk, &[0]).unwrap();
        assert!(zero.d.iter().all(|&v| v == 0));

        let mut rng = seed::rng_from(seed::seed_from_u64(2));
        let ct = s.encrypt(&keys.mpk, &[3], &mut rng).unwrap();
        assert_eq!(s.decrypt_partial(&ct, &fk).unwrap(), 3072);
        assert_eq!(s.decrypt(&ct, &fk, 7).unwrap(), 3);
        let ct0 = s.encrypt(&keys.mpk, &[0], &mut rng).unwrap();
        assert_eq!(s.decrypt_partial(&ct0, &fk).unwrap(), 0);
        assert_eq!(s.decrypt(&ct0, &zero, 7).unwrap(), 0);
    }

    #[test]
    fn contract_errors() {
        let sel = LweScheme::<WordRing>::new(params(SecurityMode::Selective, 4, 20, 13, 8, 3.0, 8, 8), 1).unwrap();
        let ada = LweScheme::<WordRing>::new(params(SecurityMode::Adaptive, 4, 20, 13, 8, 1.0, 8, 8), 1).unwrap();
        let mut rng = seed::rng_from(seed::seed_from_u64(5));
        let keys = sel.setup(&mut rng);
        assert!(matches!(
            sel.encrypt(&keys.mpk, &[8], &mut rng),
            Err(Error::BoundViolation { index: 0, .. })
        ));
        assert!(matches!(
            sel.encrypt(&keys.mpk, &[-8], &mut rng),
            Err(Error::BoundViolation { .. })
        ));
        assert!(matches!(sel.keygen(&keys.msk, &[8]), Err(Error::BoundViolation { .. })));
        assert!(matches!(
            sel.keygen(&keys.msk, &[1, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
        let akeys = ada.setup(&mut rng);
        let afk = ada.keygen(&akeys.msk, &[1]).unwrap();
        let ct = sel.encrypt(&keys.mpk, &[1], &mut rng).unwrap();
        assert_eq!(sel.decrypt_partial(&ct, &afk), Err(Error::ModeMismatch));
        let mut bad = params(SecurityMode::Selective, 4, 20, 3, 8, 3.0, 8, 8);
        assert!(LweScheme::<WordRing>::new(bad.clone(), 1).is_err());
        bad.modulus = BigUint::from(1u32 << 13);
        bad.secret_dim = 0;
        assert!(LweScheme::<WordRing>::new(bad, 1).is_err());
    }

    #[test]
    fn deterministic_ciphertext_bytes() {
        for mode in [SecurityMode::Selective, SecurityMode::Adaptive] {
            let s = LweScheme::<WordRing>::new(params(mode, 16, 200, 26, 512, 3.0, 8, 8), 4).unwrap();
            let keys = s.setup(&mut seed::rng_from(seed::seed_from_u64(11)));
            let bytes = || {
                let ct = s
                    .encrypt(&keys.mpk, &[1, -2, 3, 7], &mut seed::rng_from(seed::seed_from_u64(12)))
                    .unwrap();
                let mut out = vec![];
                s.write_ciphertext(&ct, &mut out);
                out
            };
            let a = bytes();
            assert_eq!(a, bytes());
            assert_eq!(a.len(), s.ciphertext_bytes());
            let ct = s.read_ciphertext(&mut Reader::new(&a)).unwrap();
            let mut again = vec![];
            s.write_ciphertext(&ct, &mut again);
            assert_eq!(a, again);
        }
    }

    fn noisy_trials(mode: SecurityMode) -> (usize, usize) {
        let s = LweScheme::<WordRing>::new(params(mode, 16, 200, 26, 512, 3.0, 8, 8), 4).unwrap();
        let mut rng = seed::rng_from(seed::seed_from_u64(mode as u64 + 100));
        let keys = s.setup(&mut rng);
        let (mut ok, mut flagged) = (0, 0);
        for _ in 0..500 {
            let x: Vec<i64> = (0..4).map(|_| rng.gen_range(-7..=7)).collect();
            let y: Vec<i64> = (0..4).map(|_| rng.gen_range(-7..=7)).collect();
            let expected: i64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let ct = s.encrypt(&keys.mpk, &x, &mut rng).unwrap();
            let fk = s.keygen(&keys.msk, &y).unwrap();
            match s.decrypt(&ct, &fk, 4 * 49) {
                Ok(v) => {
                    assert_eq!(v, expected, "wrong result without an overflow flag");
                    ok += 1;
                }
                Err(Error::NoiseOverflow) => flagged += 1,
                Err(e) => panic!("{e}"),
            }
        }
        (ok, flagged)
    }

    #[test]
    fn noisy_correctness_selective() {
        let (ok, _) = noisy_trials(SecurityMode::Selective);
        assert!(ok >= 499, "{ok}/500");
    }

    #[test]
    fn noisy_correctness_adaptive() {
        let (ok, _) = noisy_trials(SecurityMode::Adaptive);
        assert!(ok >= 499, "{ok}/500");
    }

    #[test]
    fn table_one_selective_end_to_end() {
        let q = (BigUint::from(1u32) << 63u32) - 25u32;
        let p = (BigUint::from(1u32) << 46u32) - 21u32;
        let params = LweParams {
            mode: SecurityMode::Selective,
            secret_dim: 80,
            samples: 5327,
            modulus: q,
            plaintext_modulus: p,
            noise: GaussianParams::with_std_dev(3.0).unwrap(),
            secret_noise: GaussianParams::with_std_dev(3.0).unwrap(),
            plaintext_bound: 1 << 40,
            key_bound: 2,
        };
        let s = LweScheme::<WordRing>::new(params, 1).unwrap();
        let mut rng = seed::rng_from(seed::seed_from_u64(0));
        let keys = s.setup(&mut rng);
        let ct = s.encrypt(&keys.mpk, &[12345], &mut rng).unwrap();
        let fk = s.keygen(&keys.msk, &[1]).unwrap();
        assert_eq!(s.decrypt(&ct, &fk, 1 << 40).unwrap(), 12345);
    }

    #[test]
    fn big_ring_adaptive_wide_noise() {
        let q = (BigUint::from(1u32) << 248u32) - 237u32;
        let sigma = 7.7e21;
        let params = LweParams {
            mode: SecurityMode::Adaptive,
            secret_dim: 8,
            samples: 64,
            modulus: q,
            plaintext_modulus: BigUint::from(1u64 << 46),
            noise: GaussianParams::with_std_dev(sigma).unwrap(),
            secret_noise: GaussianParams::with_std_dev(sigma).unwrap(),
            plaintext_bound: 1 << 40,
            key_bound: 2,
        };
        let s = LweScheme::<BigRing>::new(params, 1).unwrap();
        let mut rng = seed::rng_from(seed::seed_from_u64(9));
        let keys = s.setup(&mut rng);
        let fk = s.keygen(&keys.msk, &[1]).unwrap();
        for x in [0i64, 1, -1, 98765, -(1 << 39)] {
            let ct = s.encrypt(&keys.mpk, &[x], &mut rng).unwrap();
            assert_eq!(s.decrypt(&ct, &fk, 1 << 40).unwrap(), x);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn linear_encryption(seed_v in any::<u64>(), adaptive in any::<bool>(),
                             x in proptest::collection::vec(-3i64..=3, 3), x2 in proptest::collection::vec(-3i64..=3, 3),
                             y in proptest::collection::vec(-7i64..=7, 3)) {
            let mode = if adaptive { SecurityMode::Adaptive } else { SecurityMode::Selective };
            let s = LweScheme::<WordRing>::new(params(mode, 16, 200, 40, 512, 3.0, 8, 8), 3).unwrap();
            let mut rng = seed::rng_from(seed::seed_from_u64(seed_v));
            let keys = s.setup(&mut rng);
            let c = s.encrypt(&keys.mpk, &x, &mut rng).unwrap()
                .add(&s.encrypt(&keys.mpk, &x2, &mut rng).unwrap(), s.ring()).unwrap();
            let fk = s.keygen(&keys.msk, &y).unwrap();
            let expected: i64 = x.iter().zip(&x2).zip(&y).map(|((a, b), c)| (a + b) * c).sum();
            prop_assert_eq!(s.decrypt(&c, &fk, 200).unwrap(), expected);
        }

        #[test]
        fn word_and_big_rings_both_decrypt(seed_v in any::<u64>(), adaptive in any::<bool>(), x in -7i64..=7) {
            let mode = if adaptive { SecurityMode::Adaptive } else { SecurityMode::Selective };
            let p = params(mode, 6, 30, 30, 64, 3.0, 8, 8);
            let w = LweScheme::<WordRing>::new(p.clone(), 1).unwrap();
            let b = LweScheme::<BigRing>::new(p, 1).unwrap();
            let mut rng = seed::rng_from(seed::seed_from_u64(seed_v));
            let wk = w.setup(&mut rng);
            let bk = b.setup(&mut rng);
            let wc = w.encrypt(&wk.mpk, &[x], &mut rng).unwrap();
            let bc = b.encrypt(&bk.mpk, &[x], &mut rng).unwrap();
            prop_assert_eq!(w.decrypt(&wc, &w.keygen(&wk.msk, &[-3]).unwrap(), 31).unwrap(), -3 * x);
            prop_assert_eq!(b.decrypt(&bc, &b.keygen(&bk.msk, &[-3]).unwrap(), 31).unwrap(), -3 * x);
        }
    }
}
