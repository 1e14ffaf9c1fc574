use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

use super::bytes::{self, Reader};
use super::modular;
use crate::{Error, Result};

/// RFC 3526 group 15: the 3072-bit MODP safe prime, generator 2.
const MODP_3072_HEX: &[&str] = &[
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74",
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437",
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED",
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05",
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB",
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B",
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718",
    "3995497CEA956AE515D2261898FA051015728E5A8AAAC42DAD33170D04507A33",
    "A85521ABDF1CBA64ECFB850458DBEF0A8AEA71575D060C7DB3970F85A6E1E4C7",
    "ABF5AE8CDB0933D71E8C94E04A25619DCEE3D2261AD2EE6BF12FFA06D98A0864",
    "D87602733EC86A64521F2B18177B200CBBE117577A615D6C770988C0BAD946E2",
    "08E24FA074E5AB3143DB5BFCE0FD108E4B82D120A93AD2CAFFFFFFFFFFFFFFFF",
];

/// A 512-bit safe prime for tests and demos that need room for protocol
/// values but not real security.
const TOY_512_HEX: &str = "CE5C9F031D757700A624B3A03D8EAD8A14491965AC5D2976C0F8BEC2BD7B9925F915F4DAECFFFF3C9068D5E35B7D6861584E4A78D12676C273205409C60A2C3B";

/// A cyclic subgroup of prime order `order` inside `Z_p^*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupParams {
    modulus: BigUint,
    order: BigUint,
    generator: BigUint,
}

/// Returns the group for a preset id: `toy` (p = 23), `toy-512` or `nist-3072`.
pub fn group_gen(preset: &str) -> Result<GroupParams> {
    match preset {
        "toy" => GroupParams::new(23u32.into(), 11u32.into(), 4u32.into()),
        "toy-512" => {
            let p = BigUint::parse_bytes(TOY_512_HEX.as_bytes(), 16).expect("valid hex");
            let q = (&p - 1u32) >> 1u32;
            GroupParams::new(p, q, 4u32.into())
        }
        "nist-3072" => {
            let hex: String = MODP_3072_HEX.concat();
            let p = BigUint::parse_bytes(hex.as_bytes(), 16).expect("valid hex");
            let q = (&p - 1u32) >> 1u32;
            GroupParams::new(p, q, 2u32.into())
        }
        other => Err(Error::UnknownPreset(other.into())),
    }
}

impl GroupParams {
    /// Checks that `order` divides `modulus - 1` and that `generator` has
    /// order exactly `order` (the order is trusted to be prime).
    pub fn new(modulus: BigUint, order: BigUint, generator: BigUint) -> Result<Self> {
        let one = BigUint::one();
        if modulus <= BigUint::from(3u32) || order <= one {
            return Err(Error::invalid("group modulus and order are too small"));
        }
        if !(&modulus - 1u32).is_multiple_of(&order) {
            return Err(Error::invalid("order does not divide p - 1"));
        }
        if generator < BigUint::from(2u32) || generator >= modulus {
            return Err(Error::invalid("generator outside [2, p - 1]"));
        }
        if generator.modpow(&order, &modulus) != one {
            return Err(Error::invalid(format!("generator does not have order {order}")));
        }
        Ok(Self {
            modulus,
            order,
            generator,
        })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn generator(&self) -> &BigUint {
        &self.generator
    }

    pub fn identity(&self) -> BigUint {
        BigUint::one()
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }

    pub fn pow(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        base.modpow(exp, &self.modulus)
    }

    pub fn pow_g(&self, exp: &BigUint) -> BigUint {
        self.generator.modpow(exp, &self.modulus)
    }

    /// `base^e` for a signed exponent, using `base^{-1} = base^{q-1}`.
    pub fn pow_signed(&self, base: &BigUint, e: i64) -> BigUint {
        let magnitude = BigUint::from(e.unsigned_abs());
        let r = self.pow(base, &magnitude);
        if e < 0 {
            self.inverse(&r)
        } else {
            r
        }
    }

    /// Inverse of a subgroup element.
    pub fn inverse(&self, a: &BigUint) -> BigUint {
        self.pow(a, &(&self.order - 1u32))
    }

    /// `base^{-e}` for an exponent already reduced mod the order.
    pub fn pow_neg(&self, base: &BigUint, e: &BigUint) -> BigUint {
        if e.is_zero() {
            return self.identity();
        }
        self.pow(base, &(&self.order - e))
    }

    pub fn is_element(&self, a: &BigUint) -> bool {
        !a.is_zero() && a < &self.modulus && self.pow(a, &self.order).is_one()
    }

    pub fn random_exponent<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        modular::random_below(rng, &self.order)
    }

    pub fn reduce_exponent(&self, e: i64) -> BigUint {
        modular::reduce_i64(e, &self.order)
    }

    /// Width of a serialized group element: `ceil(log2 p) / 8` rounded up.
    pub fn element_bytes(&self) -> usize {
        modular::residue_bytes(&self.modulus)
    }

    /// Width of a serialized exponent.
    pub fn scalar_bytes(&self) -> usize {
        modular::residue_bytes(&self.order)
    }

    pub fn write_element(&self, a: &BigUint, out: &mut Vec<u8>) {
        bytes::write_be(a, self.element_bytes(), out);
    }

    pub fn read_element(&self, r: &mut Reader<'_>) -> Result<BigUint> {
        let v = r.be(self.element_bytes())?;
        if v.is_zero() || v >= self.modulus {
            return Err(Error::Malformed("group element out of range"));
        }
        Ok(v)
    }

    pub fn write_scalar(&self, a: &BigUint, out: &mut Vec<u8>) {
        bytes::write_be(a, self.scalar_bytes(), out);
    }

    pub fn read_scalar(&self, r: &mut Reader<'_>) -> Result<BigUint> {
        let v = r.be(self.scalar_bytes())?;
        if v >= self.order {
            return Err(Error::Malformed("scalar out of range"));
        }
        Ok(v)
    }
}
