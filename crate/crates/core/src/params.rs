//! Parameter presets and runtime selection of a scheme.

use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;

use crate::algebra::{group_gen, BigRing, GaussianParams, GroupParams, WordRing};
use crate::ipfe::ddh::DdhScheme;
use crate::ipfe::lwe::{LweParams, LweScheme};
use crate::ipfe::{SchemeId, SecurityMode, TwoStepIpfe};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetId {
    /// Small parameters for tests and quick runs.
    Toy,
    /// `Toy` with negligible LWE noise, which makes LWE decryption exact.
    ToyZero,
    /// The ~128-bit security parameters: 3072-bit DDH group; LWE with
    /// `(N, M, log q) = (80, 5327, 63)` selective and `(38, 9462, 248)` adaptive.
    Table1,
}

impl PresetId {
    pub const ALL: [PresetId; 3] = [PresetId::Toy, PresetId::ToyZero, PresetId::Table1];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetId::Toy => "toy",
            PresetId::ToyZero => "toy-zero",
            PresetId::Table1 => "table1",
        }
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownPreset(s.into()))
    }
}

/// Advertised LWE noise rates `alpha`; the noise width is `max(alpha q, 3)`.
pub const ALPHA_SELECTIVE: f64 = 1.09e-28;
pub const ALPHA_ADAPTIVE: f64 = 1.71e-53;
const MIN_NOISE: f64 = 3.0;
const ZERO_NOISE: f64 = 0.0001;

#[derive(Clone, Debug, PartialEq)]
pub enum PresetParams {
    Ddh(GroupParams),
    Lwe(LweParams),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamPreset {
    pub scheme: SchemeId,
    pub preset: PresetId,
    pub params: PresetParams,
}

fn pow2(bits: u32) -> BigUint {
    BigUint::from(1u32) << bits
}

fn noise_width(alpha: f64, log_q: u32) -> f64 {
    (alpha * libm::exp2(f64::from(log_q))).max(MIN_NOISE)
}

impl ParamPreset {
    pub fn new(scheme: SchemeId, preset: PresetId) -> Result<Self> {
        let params = match scheme {
            SchemeId::DdhSelective | SchemeId::DdhAdaptive => PresetParams::Ddh(group_gen(match preset {
                PresetId::Toy | PresetId::ToyZero => "toy-512",
                PresetId::Table1 => "nist-3072",
            })?),
            SchemeId::LweSelective | SchemeId::LweAdaptive => PresetParams::Lwe(lwe_preset(scheme.mode(), preset)?),
        };
        Ok(Self { scheme, preset, params })
    }

    /// `log q` as counted by the memory formulas: the group element width
    /// for DDH and the modulus width for LWE.
    pub fn log_q(&self) -> u64 {
        match &self.params {
            PresetParams::Ddh(g) => g.modulus().bits(),
            PresetParams::Lwe(p) => p.modulus.bits(),
        }
    }

    /// `(N, M)`; zero for DDH.
    pub fn lattice_dims(&self) -> (usize, usize) {
        match &self.params {
            PresetParams::Ddh(_) => (0, 0),
            PresetParams::Lwe(p) => (p.secret_dim, p.samples),
        }
    }

    /// Modulus of the plaintext space that MIFE pads live in.
    pub fn plaintext_modulus(&self) -> BigUint {
        match &self.params {
            PresetParams::Ddh(g) => g.order().clone(),
            PresetParams::Lwe(p) => p.plaintext_modulus.clone(),
        }
    }

    /// Builds the scheme for vectors of length `dim` and key vectors with
    /// `|y_i| <= key_bound`, then hands it to `visitor`.
    ///
    /// LWE schemes accept any residue of the plaintext space, as required
    /// when plaintexts are padded.
    pub fn visit<V: SchemeVisitor>(&self, dim: usize, key_bound: u64, visitor: V) -> Result<V::Output> {
        match &self.params {
            PresetParams::Ddh(group) => Ok(visitor.visit(DdhScheme::new(self.scheme.mode(), group.clone(), dim)?)),
            PresetParams::Lwe(p) => {
                let mut p = p.clone();
                p.plaintext_bound = u64::try_from(&p.plaintext_modulus).unwrap_or(u64::MAX);
                p.key_bound = key_bound.saturating_add(1);
                if p.modulus.bits() <= 64 {
                    Ok(visitor.visit(LweScheme::<WordRing>::new(p, dim)?))
                } else {
                    Ok(visitor.visit(LweScheme::<BigRing>::new(p, dim)?))
                }
            }
        }
    }
}

/// Receives a concrete scheme chosen at runtime.
pub trait SchemeVisitor {
    type Output;
    fn visit<S: TwoStepIpfe + 'static>(self, scheme: S) -> Self::Output;
}

fn lwe_preset(mode: SecurityMode, preset: PresetId) -> Result<LweParams> {
    let gaussian = GaussianParams::with_std_dev;
    Ok(match (preset, mode) {
        (PresetId::Toy | PresetId::ToyZero, _) => {
            let sigma = if preset == PresetId::ToyZero {
                ZERO_NOISE
            } else {
                MIN_NOISE
            };
            LweParams {
                mode,
                secret_dim: 16,
                samples: 200,
                modulus: pow2(62),
                plaintext_modulus: pow2(40),
                noise: gaussian(sigma)?,
                secret_noise: gaussian(MIN_NOISE)?,
                plaintext_bound: 1 << 40,
                key_bound: 2,
            }
        }
        (PresetId::Table1, SecurityMode::Selective) => {
            let sigma = noise_width(ALPHA_SELECTIVE, 63);
            LweParams {
                mode,
                secret_dim: 80,
                samples: 5327,
                // Largest primes below 2^63 and 2^46.
                modulus: pow2(63) - 25u32,
                plaintext_modulus: pow2(46) - 21u32,
                noise: gaussian(sigma)?,
                secret_noise: gaussian(sigma)?,
                plaintext_bound: (1 << 46) - 21,
                key_bound: 2,
            }
        }
        (PresetId::Table1, SecurityMode::Adaptive) => {
            let sigma = noise_width(ALPHA_ADAPTIVE, 248);
            LweParams {
                mode,
                secret_dim: 38,
                samples: 9462,
                // Largest prime below 2^248.
                modulus: pow2(248) - 237u32,
                plaintext_modulus: pow2(46),
                noise: gaussian(sigma)?,
                secret_noise: gaussian(sigma)?,
                plaintext_bound: 1 << 46,
                key_bound: 2,
            }
        }
    })
}
