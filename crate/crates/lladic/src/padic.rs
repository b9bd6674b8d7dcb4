//! Fixed-precision ℓ-adic integers with valuation tracking, unit inversion
//! and Hensel lifting.
//!
//! A value is an exact residue mod ℓ^N. A residue of zero does not mean the
//! number is zero, only that it is indistinguishable from zero at precision
//! N; asking such a value for an exact valuation is an error, never a
//! silent answer.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPoly;

/// Default number of ℓ-adic digits for public entry points.
pub const DEFAULT_PRECISION: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicInt {
    prime: u64,
    precision: u32,
    residue: BigUint,
}

impl PadicInt {
    pub fn new(prime: u64, precision: u32, residue: BigUint) -> Self {
        assert!(precision > 0, "precision must be positive");
        let m = modulus(prime, precision);
        PadicInt {
            prime,
            precision,
            residue: residue % m,
        }
    }

    pub fn from_bigint(prime: u64, precision: u32, value: &BigInt) -> Self {
        let m = BigInt::from(modulus(prime, precision));
        let mut r = value.mod_floor(&m);
        if r.is_negative() {
            r += &m;
        }
        PadicInt::new(prime, precision, r.to_biguint().unwrap())
    }

    pub fn from_i64(prime: u64, precision: u32, value: i64) -> Self {
        PadicInt::from_bigint(prime, precision, &BigInt::from(value))
    }

    pub fn zero(prime: u64, precision: u32) -> Self {
        PadicInt::new(prime, precision, BigUint::zero())
    }

    pub fn one(prime: u64, precision: u32) -> Self {
        PadicInt::new(prime, precision, BigUint::one())
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> BigUint {
        modulus(self.prime, self.precision)
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    fn check_compatible(&self, other: &PadicInt) {
        assert_eq!(self.prime, other.prime, "mixed primes");
        assert_eq!(self.precision, other.precision, "mixed precisions");
    }

    pub fn add(&self, other: &PadicInt) -> PadicInt {
        self.check_compatible(other);
        PadicInt::new(self.prime, self.precision, &self.residue + &other.residue)
    }

    pub fn sub(&self, other: &PadicInt) -> PadicInt {
        self.check_compatible(other);
        let m = self.modulus();
        PadicInt::new(
            self.prime,
            self.precision,
            &self.residue + &m - &other.residue,
        )
    }

    pub fn neg(&self) -> PadicInt {
        let m = self.modulus();
        PadicInt::new(self.prime, self.precision, &m - &self.residue)
    }

    pub fn mul(&self, other: &PadicInt) -> PadicInt {
        self.check_compatible(other);
        PadicInt::new(self.prime, self.precision, &self.residue * &other.residue)
    }

    pub fn mul_i64(&self, k: i64) -> PadicInt {
        self.mul(&PadicInt::from_i64(self.prime, self.precision, k))
    }

    pub fn pow(&self, mut e: u64) -> PadicInt {
        let mut acc = PadicInt::one(self.prime, self.precision);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Largest v ≤ N with ℓ^v dividing the residue; `None` when the residue
    /// is zero, i.e. the valuation is only known to be ≥ N.
    pub fn valuation(&self) -> Option<u32> {
        if self.residue.is_zero() {
            return None;
        }
        let p = BigUint::from(self.prime);
        let mut v = 0u32;
        let mut r = self.residue.clone();
        while (&r % &p).is_zero() {
            r /= &p;
            v += 1;
        }
        Some(v)
    }

    /// Exact valuation, or `PrecisionExhausted` on a zero residue.
    pub fn val(&self) -> Result<u32> {
        self.valuation().ok_or_else(|| {
            Error::PrecisionExhausted(format!(
                "valuation of zero residue at precision {}",
                self.precision
            ))
        })
    }

    /// Inverse of a unit mod ℓ^N.
    pub fn invert(&self) -> Result<PadicInt> {
        match self.valuation() {
            Some(0) => {}
            Some(v) => return Err(Error::NotAUnit(v)),
            None => {
                return Err(Error::PrecisionExhausted(
                    "cannot invert a zero residue".into(),
                ))
            }
        }
        let m = BigInt::from(self.modulus());
        let a = BigInt::from(self.residue.clone());
        let eg = a.extended_gcd(&m);
        debug_assert!(eg.gcd.is_one());
        Ok(PadicInt::from_bigint(self.prime, self.precision, &eg.x))
    }

    /// Exact division by ℓ^k; requires ℓ^k | residue. The result keeps the
    /// same modulus, so its top k digits are unspecified.
    pub fn div_exact_pow(&self, k: u32) -> Result<PadicInt> {
        if k == 0 {
            return Ok(self.clone());
        }
        let d = modulus(self.prime, k);
        let (q, r) = self.residue.div_rem(&d);
        if !r.is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "residue not divisible by {}^{}",
                self.prime, k
            )));
        }
        Ok(PadicInt::new(self.prime, self.precision, q))
    }

    /// Truncate (or formally extend) to a different digit count.
    pub fn with_precision(&self, precision: u32) -> PadicInt {
        PadicInt::new(self.prime, precision, self.residue.clone())
    }

    /// Residue mod ℓ^n for n ≤ N; used when emitting certificate data.
    pub fn reduced_residue(&self, n: u32) -> BigUint {
        assert!(n <= self.precision);
        &self.residue % modulus(self.prime, n)
    }

    /// Residue mod ℓ as a machine integer.
    pub fn residue_mod_p(&self) -> u64 {
        (&self.residue % BigUint::from(self.prime))
            .to_u64()
            .unwrap()
    }
}

pub fn modulus(prime: u64, precision: u32) -> BigUint {
    BigUint::from(prime).pow(precision)
}

/// Hensel lifting of a simple root: given f(x0) ≡ 0 mod ℓ with f'(x0) a
/// unit mod ℓ, returns x with f(x) ≡ 0 mod ℓ^N and x ≡ x0 mod ℓ.
pub fn hensel_root(f: &IntPoly, x0: &PadicInt) -> Result<PadicInt> {
    let p = x0.prime();
    let n = x0.precision();
    let fx = eval_poly(f, x0);
    if fx.residue_mod_p() != 0 {
        return Err(Error::BadParameters(format!(
            "x0 is not a root of f mod {}",
            p
        )));
    }
    let deriv = f.derivative();
    if eval_poly(&deriv, x0).residue_mod_p() == 0 {
        return Err(Error::NoSimpleRoot(p));
    }
    let mut x = x0.clone();
    // Newton; quadratic convergence gives at most ~log2(N)+1 rounds.
    for _ in 0..(64 - u64::from(n).leading_zeros() + 2) {
        let fx = eval_poly(f, &x);
        if fx.is_zero() {
            break;
        }
        let dfx = eval_poly(&deriv, &x);
        let step = fx.mul(&dfx.invert()?);
        x = x.sub(&step);
    }
    let check = eval_poly(f, &x);
    if !check.is_zero() {
        return Err(Error::PrecisionExhausted(
            "hensel iteration failed to converge".into(),
        ));
    }
    debug_assert_eq!(x.residue_mod_p(), x0.residue_mod_p());
    Ok(x)
}

pub fn eval_poly(f: &IntPoly, x: &PadicInt) -> PadicInt {
    let mut acc = PadicInt::zero(x.prime(), x.precision());
    for c in f.coeffs().iter().rev() {
        acc = acc
            .mul(x)
            .add(&PadicInt::from_bigint(x.prime(), x.precision(), c));
    }
    acc
}
