//! Single-input inner-product functional encryption.
//!
//! [`ddh`] and [`lwe`] each implement a selective and an adaptive variant.
//! Both expose an inherent API mirroring the textbook algorithms and the
//! [`TwoStepIpfe`] trait the multi-input compiler builds on.

pub mod ddh;
pub mod lwe;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use rand::RngCore;

use crate::algebra::bytes::Reader;
use crate::algebra::DlogWindow;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SecurityMode {
    Selective,
    Adaptive,
}

impl SecurityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SecurityMode::Selective => "selective",
            SecurityMode::Adaptive => "adaptive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    DdhSelective,
    DdhAdaptive,
    LweSelective,
    LweAdaptive,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [
        SchemeId::DdhSelective,
        SchemeId::DdhAdaptive,
        SchemeId::LweSelective,
        SchemeId::LweAdaptive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::DdhSelective => "ddh-selective",
            SchemeId::DdhAdaptive => "ddh-adaptive",
            SchemeId::LweSelective => "lwe-selective",
            SchemeId::LweAdaptive => "lwe-adaptive",
        }
    }

    pub fn mode(self) -> SecurityMode {
        match self {
            SchemeId::DdhSelective | SchemeId::LweSelective => SecurityMode::Selective,
            SchemeId::DdhAdaptive | SchemeId::LweAdaptive => SecurityMode::Adaptive,
        }
    }

    pub fn is_lattice(self) -> bool {
        matches!(self, SchemeId::LweSelective | SchemeId::LweAdaptive)
    }

    /// One-byte tag used in serialized bundles.
    pub fn tag(self) -> u8 {
        match self {
            SchemeId::DdhSelective => 1,
            SchemeId::DdhAdaptive => 2,
            SchemeId::LweSelective => 3,
            SchemeId::LweAdaptive => 4,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|s| s.tag() == tag)
            .ok_or(Error::Malformed("unknown scheme tag"))
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownScheme(s.into()))
    }
}

/// An IPFE scheme whose decryption splits into a per-ciphertext step and a
/// final recovery step, and whose encryption is linear in the plaintext.
///
/// Plaintexts handed to [`encrypt_residues`](Self::encrypt_residues) are
/// residues modulo [`plaintext_modulus`](Self::plaintext_modulus); partial
/// decryptions of several ciphertexts can be combined before recovery.
pub trait TwoStepIpfe: Clone + fmt::Debug + Send + Sync {
    type MasterSecret: Clone + fmt::Debug + Send + Sync;
    type PublicKey: Clone + fmt::Debug + PartialEq + Send + Sync;
    type Encryptor: Send + Sync;
    type FunctionalKey: Clone + fmt::Debug + PartialEq + Send + Sync;
    type Ciphertext: Clone + fmt::Debug + PartialEq + Send + Sync;
    type Partial: Clone + fmt::Debug + PartialEq + Send + Sync;
    type Decoder: Send + Sync;

    fn scheme_id(&self) -> SchemeId;
    fn dimension(&self) -> usize;
    fn plaintext_modulus(&self) -> &BigUint;

    fn generate<G: RngCore + ?Sized>(&self, rng: &mut G) -> (Self::MasterSecret, Self::PublicKey);

    /// Precomputation for repeated encryption under one public key.
    fn encryptor(&self, pk: &Self::PublicKey) -> Self::Encryptor;

    fn encrypt_residues<G: RngCore + ?Sized>(
        &self,
        enc: &Self::Encryptor,
        x: &[BigUint],
        rng: &mut G,
    ) -> Result<Self::Ciphertext>;

    /// Encryption without precomputation, for one-off use. Consumes
    /// randomness exactly like [`encrypt_residues`](Self::encrypt_residues).
    fn encrypt_once<G: RngCore + ?Sized>(
        &self,
        pk: &Self::PublicKey,
        x: &[BigUint],
        rng: &mut G,
    ) -> Result<Self::Ciphertext> {
        self.encrypt_residues(&self.encryptor(pk), x, rng)
    }

    fn derive_key(&self, msk: &Self::MasterSecret, y: &[i64]) -> Result<Self::FunctionalKey>;

    /// The vector `y` a functional key was derived for.
    fn key_vector<'a>(&self, fk: &'a Self::FunctionalKey) -> &'a [i64];

    fn decrypt_partial(&self, ct: &Self::Ciphertext, fk: &Self::FunctionalKey) -> Result<Self::Partial>;

    fn identity_partial(&self) -> Self::Partial;

    fn combine(&self, a: &Self::Partial, b: &Self::Partial) -> Self::Partial;

    /// Decoder for results in `window`, sized for `uses` recoveries.
    fn decoder(&self, window: DlogWindow, uses: u64) -> Result<Self::Decoder>;

    /// Removes the residue `z` from a combined partial and recovers the
    /// integer result inside the decoder's window.
    fn finish(&self, combined: &Self::Partial, z: &BigUint, decoder: &Self::Decoder) -> Result<i64>;

    fn write_public_key(&self, pk: &Self::PublicKey, out: &mut Vec<u8>);
    fn read_public_key(&self, r: &mut Reader<'_>) -> Result<Self::PublicKey>;
    fn write_ciphertext(&self, ct: &Self::Ciphertext, out: &mut Vec<u8>);
    fn read_ciphertext(&self, r: &mut Reader<'_>) -> Result<Self::Ciphertext>;
    fn write_functional_key(&self, fk: &Self::FunctionalKey, out: &mut Vec<u8>);
    fn read_functional_key(&self, r: &mut Reader<'_>) -> Result<Self::FunctionalKey>;

    /// Serialized width of one ciphertext.
    fn ciphertext_bytes(&self) -> usize;
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub(crate) fn check_residues(x: &[BigUint], modulus: &BigUint) -> Result<()> {
    match x.iter().position(|v| v >= modulus) {
        Some(index) => Err(Error::BoundViolation {
            index,
            bound: alloc::format!("{modulus}"),
        }),
        None => Ok(()),
    }
}
