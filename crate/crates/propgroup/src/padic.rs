//! Exact arithmetic in Z/p^k Z, its unit group, and the mutually inverse
//! p-adic exp/log between p.Zp and 1+p.Zp (4.Z2 and 1+4.Z2 when p = 2).
//!
//! Every scalar carries its prime and precision; arithmetic between scalars
//! from different rings is rejected, never coerced. All series are summed
//! with exact rational coefficients and a provable truncation bound, so a
//! result is the true p-adic value reduced mod p^k.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Largest modulus we allow; products of two residues then fit in u128.
const MAX_MODULUS: u64 = 1 << 62;

/// p-valuation of a residue, with a marker for zero (valuation
/// indistinguishable from >= k at finite precision).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn at_least(self, bound: u32) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// The coefficient ring Z/p^k Z. Copyable handle carried by every scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicRing {
    p: u64,
    k: u32,
    modulus: u64,
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PadicRing {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if p > (1 << 20) || !is_small_prime(p) {
            return Err(Error::NotAPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroPrecision);
        }
        let mut modulus: u64 = 1;
        for _ in 0..k {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or(Error::ModulusOverflow { p, k })?;
        }
        Ok(PadicRing { p, k, modulus })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Minimal valuation required of structure data: 1 for odd p, 2 for p = 2.
    pub fn powerful_threshold(&self) -> u32 {
        if self.p == 2 {
            2
        } else {
            1
        }
    }

    /// Same prime, precision raised by `extra` digits.
    pub fn elevate(&self, extra: u32) -> Result<PadicRing> {
        PadicRing::new(self.p, self.k + extra)
    }

    pub fn scalar(&self, value: u64) -> PadicScalar {
        PadicScalar {
            ring: *self,
            value: value % self.modulus,
        }
    }

    pub fn scalar_from_i64(&self, value: i64) -> PadicScalar {
        let m = self.modulus as i128;
        let v = (value as i128).rem_euclid(m) as u64;
        self.scalar(v)
    }

    pub fn scalar_from_biguint(&self, value: &BigUint) -> PadicScalar {
        let v: BigUint = value % BigUint::from(self.modulus);
        self.scalar(u64::try_from(&v).expect("reduced residue fits u64"))
    }

    pub fn zero(&self) -> PadicScalar {
        self.scalar(0)
    }

    pub fn one(&self) -> PadicScalar {
        self.scalar(1)
    }

    /// p^e as a residue (0 once e >= k).
    pub fn prime_power(&self, e: u32) -> PadicScalar {
        if e >= self.k {
            self.zero()
        } else {
            self.scalar(self.p.pow(e))
        }
    }

    pub(crate) fn raw_add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    pub(crate) fn raw_sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }

    pub(crate) fn raw_neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    pub(crate) fn raw_mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub(crate) fn raw_val(&self, mut a: u64) -> Valuation {
        if a == 0 {
            return Valuation::Infinite;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        Valuation::Finite(v)
    }

    /// Inverse of a unit mod p^k by extended Euclid.
    pub(crate) fn raw_inv(&self, a: u64) -> Result<u64> {
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 != 1 {
            return Err(Error::NotAUnit {
                value: a,
                p: self.p,
                k: self.k,
            });
        }
        Ok(t0.rem_euclid(self.modulus as i128) as u64)
    }

    /// Reduce a scalar from a higher-precision ring with the same prime down
    /// to this ring.
    pub fn reduce(&self, s: PadicScalar) -> Result<PadicScalar> {
        if s.ring.p != self.p || s.ring.k < self.k {
            return Err(Error::RingMismatch {
                p_lhs: self.p,
                k_lhs: self.k,
                p_rhs: s.ring.p,
                k_rhs: s.ring.k,
            });
        }
        Ok(self.scalar(s.value % self.modulus))
    }

    /// Exact rational reduced mod p^k. The denominator must be prime to p.
    pub fn scalar_from_rational(&self, r: &BigRational) -> Result<PadicScalar> {
        let numer = r.numer();
        let denom = r.denom();
        let m = BigInt::from(self.modulus);
        let d_red = denom.mod_floor_u(&m);
        if d_red % self.p == 0 {
            return Err(Error::DomainViolation(format!(
                "rational {r} is not a p-adic integer at p = {}",
                self.p
            )));
        }
        let n_red = numer.mod_floor_u(&m);
        let d_inv = self.raw_inv(d_red)?;
        Ok(self.scalar(self.raw_mul(n_red, d_inv)))
    }
}

trait ModFloorU {
    fn mod_floor_u(&self, m: &BigInt) -> u64;
}

impl ModFloorU for BigInt {
    fn mod_floor_u(&self, m: &BigInt) -> u64 {
        let mut r = self % m;
        if r.is_negative() {
            r += m;
        }
        u64::try_from(&r).expect("residue fits u64")
    }
}

/// An element of Z/p^k Z carrying its prime and precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    ring: PadicRing,
    value: u64,
}

impl PadicScalar {
    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Largest v <= k with p^v | value; `Infinite` for 0.
    pub fn valuation(&self) -> Valuation {
        self.ring.raw_val(self.value)
    }

    fn same_ring(&self, rhs: &PadicScalar) -> Result<()> {
        if self.ring != rhs.ring {
            return Err(Error::RingMismatch {
                p_lhs: self.ring.p,
                k_lhs: self.ring.k,
                p_rhs: rhs.ring.p,
                k_rhs: rhs.ring.k,
            });
        }
        Ok(())
    }

    pub fn checked_add(self, rhs: PadicScalar) -> Result<PadicScalar> {
        self.same_ring(&rhs)?;
        Ok(self.ring.scalar(self.ring.raw_add(self.value, rhs.value)))
    }

    pub fn checked_sub(self, rhs: PadicScalar) -> Result<PadicScalar> {
        self.same_ring(&rhs)?;
        Ok(self.ring.scalar(self.ring.raw_sub(self.value, rhs.value)))
    }

    pub fn checked_mul(self, rhs: PadicScalar) -> Result<PadicScalar> {
        self.same_ring(&rhs)?;
        Ok(self.ring.scalar(self.ring.raw_mul(self.value, rhs.value)))
    }

    pub fn neg(self) -> PadicScalar {
        self.ring.scalar(self.ring.raw_neg(self.value))
    }

    pub fn pow_u64(self, mut e: u64) -> PadicScalar {
        let mut base = self;
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Exact division by p^e. Fails unless p^e divides the canonical
    /// representative; the quotient is the canonical lift in [0, p^(k-e)).
    pub fn divide_exact_by_prime_power(self, e: u32) -> Result<PadicScalar> {
        if e == 0 {
            return Ok(self);
        }
        let q = self.ring.p.pow(e);
        if self.value % q != 0 {
            return Err(Error::DomainViolation(format!(
                "{} is not divisible by {}^{e}",
                self.value, self.ring.p
            )));
        }
        Ok(self.ring.scalar(self.value / q))
    }

    pub fn try_unit(self) -> Result<PadicUnit> {
        if self.value % self.ring.p == 0 {
            return Err(Error::NotAUnit {
                value: self.value,
                p: self.ring.p,
                k: self.ring.k,
            });
        }
        Ok(PadicUnit(self))
    }
}

macro_rules! panic_ops {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for PadicScalar {
            type Output = PadicScalar;
            fn $method(self, rhs: PadicScalar) -> PadicScalar {
                self.$checked(rhs).expect("scalars from mismatched rings")
            }
        }
    };
}

panic_ops!(Add, add, checked_add);
panic_ops!(Sub, sub, checked_sub);
panic_ops!(Mul, mul, checked_mul);

impl std::ops::Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar::neg(self)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.value, self.ring.p, self.ring.k)
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarDoc {
    p: u64,
    k: u32,
    v: String,
}

impl Serialize for PadicScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarDoc {
            p: self.ring.p,
            k: self.ring.k,
            v: self.value.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PadicScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = ScalarDoc::deserialize(deserializer)?;
        let ring = PadicRing::new(doc.p, doc.k).map_err(D::Error::custom)?;
        let v: BigUint = doc
            .v
            .parse()
            .map_err(|e| D::Error::custom(format!("scalar value {:?}: {e}", doc.v)))?;
        Ok(ring.scalar_from_biguint(&v))
    }
}

/// A unit of Z/p^k Z (value prime to p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicUnit(PadicScalar);

impl PadicUnit {
    pub fn scalar(&self) -> PadicScalar {
        self.0
    }

    pub fn ring(&self) -> PadicRing {
        self.0.ring
    }

    pub fn inverse(&self) -> PadicUnit {
        let v = self
            .0
            .ring
            .raw_inv(self.0.value)
            .expect("unit is invertible");
        PadicUnit(self.0.ring.scalar(v))
    }

    /// Membership in 1 + p.Zp (resp. 1 + 4.Z2), computed, not stored.
    pub fn in_principal_congruence(&self) -> bool {
        let tau = self.0.ring.powerful_threshold();
        (self.0 - self.0.ring.one()).valuation().at_least(tau)
    }
}

/// Truncation index for exp: smallest N with m*v - (m-1)/(p-1) >= k for all
/// m >= N. The bound v_p(x^m / m!) >= m*v - (m-1)/(p-1) is increasing in m
/// whenever v > 1/(p-1), which the exp domain guarantees.
fn exp_truncation_index(p: u64, k: u32, v: u32) -> u64 {
    let (p, k, v) = (p as i128, k as i128, v as i128);
    let mut n: i128 = 1;
    while n * v * (p - 1) - (n - 1) < k * (p - 1) {
        n += 1;
    }
    n as u64
}

/// Truncation index for log: smallest N >= 2 with N*v - (ilog_p(N) + 1) >= k.
/// Since v_p(m) <= log_p(m) and m*v - log_p(m) is increasing on m >= 1 for
/// the domains in use, all terms from N on vanish mod p^k.
fn log_truncation_index(p: u64, k: u32, v: u32) -> u64 {
    let mut n: u64 = 2;
    loop {
        let mut ilog = 0u32;
        let mut q = p;
        while q <= n {
            ilog += 1;
            q = q.saturating_mul(p);
        }
        if (n as i128) * (v as i128) - (ilog as i128 + 1) >= k as i128 {
            return n;
        }
        n += 1;
    }
}

/// exp: p.Zp -> 1 + p.Zp (4.Z2 -> 1 + 4.Z2 for p = 2), exact mod p^k.
///
/// The series is summed with exact rational terms up to the provable
/// truncation index; torsion-style inputs (valuation below the threshold)
/// are rejected with `DomainViolation`.
pub fn exp_p(x: PadicScalar) -> Result<PadicUnit> {
    let ring = x.ring;
    let tau = ring.powerful_threshold();
    let val = x.valuation();
    if !val.at_least(tau) {
        return Err(Error::DomainViolation(format!(
            "exp requires valuation >= {tau} at p = {}, got {}",
            ring.p,
            val
        )));
    }
    if x.is_zero() {
        return Ok(PadicUnit(ring.one()));
    }
    let v = val.finite().expect("nonzero");
    let n_stop = exp_truncation_index(ring.p, ring.k, v);
    let xq = BigRational::from(BigInt::from(x.value));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for n in 1..n_stop {
        term *= &xq;
        term /= BigRational::from(BigInt::from(n));
        sum += &term;
    }
    let s = ring.scalar_from_rational(&sum)?;
    s.try_unit()
}

/// log: 1 + p.Zp -> p.Zp (1 + 4.Z2 -> 4.Z2 for p = 2), exact mod p^k;
/// inverse of [`exp_p`].
pub fn log_p(u: &PadicUnit) -> Result<PadicScalar> {
    let ring = u.ring();
    let tau = ring.powerful_threshold();
    let y = u.scalar() - ring.one();
    let val = y.valuation();
    if !val.at_least(tau) {
        return Err(Error::DomainViolation(format!(
            "log requires an argument in 1 + {}.Z_{} , got {}",
            ring.p.pow(tau),
            ring.p,
            u.scalar()
        )));
    }
    if y.is_zero() {
        return Ok(ring.zero());
    }
    let v = val.finite().expect("nonzero");
    let n_stop = log_truncation_index(ring.p, ring.k, v);
    let yq = BigRational::from(BigInt::from(y.value));
    let mut power = BigRational::one();
    let mut sum = BigRational::zero();
    for n in 1..n_stop {
        power *= &yq;
        let term = &power / BigRational::from(BigInt::from(n));
        if n % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    ring.scalar_from_rational(&sum)
}

/// Inverse of a unit mod p^k; errors at construction time handle non-units.
pub fn unit_inverse(u: &PadicUnit) -> PadicUnit {
    u.inverse()
}
