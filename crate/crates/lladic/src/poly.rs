//! Integer polynomials: the small exact-arithmetic layer under the ring
//! tower constructors and Hensel lifting.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Polynomial over Z with ascending coefficients and no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly::new(vec![BigInt::zero()])
    }

    pub fn one() -> Self {
        IntPoly::new(vec![BigInt::one()])
    }

    pub fn x() -> Self {
        IntPoly::new(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division, panics if `other` does not divide `self` over Z.
    pub fn exact_div(&self, other: &IntPoly) -> IntPoly {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut rem = self.coeffs.clone();
        let d = other.degree();
        let n = self.degree();
        assert!(n >= d, "degree too small for exact division");
        let mut quo = vec![BigInt::zero(); n - d + 1];
        for k in (0..=n - d).rev() {
            let top = rem[k + d].clone();
            let (q, r) = num_integer::Integer::div_rem(&top, other.leading());
            assert!(r.is_zero(), "non-exact polynomial division");
            quo[k] = q.clone();
            if q.is_zero() {
                continue;
            }
            for (i, c) in other.coeffs.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
        }
        assert!(
            rem.iter().all(|c| c.is_zero()),
            "non-exact polynomial division"
        );
        IntPoly::new(quo)
    }

    pub fn derivative(&self) -> IntPoly {
        if self.degree() == 0 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// p(q(x)) by Horner over polynomials.
    pub fn compose(&self, inner: &IntPoly) -> IntPoly {
        let mut acc = IntPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&IntPoly::constant(c.clone()));
        }
        acc
    }

    /// n-th cyclotomic polynomial, by exact division of x^n - 1 by the
    /// cyclotomic polynomials of the proper divisors.
    pub fn cyclotomic(n: u64) -> IntPoly {
        assert!(n >= 1);
        let mut xn_minus_1 = vec![BigInt::zero(); n as usize + 1];
        xn_minus_1[0] = -BigInt::one();
        xn_minus_1[n as usize] = BigInt::one();
        let mut num = IntPoly::new(xn_minus_1);
        for d in 1..n {
            if n.is_multiple_of(d) {
                num = num.exact_div(&IntPoly::cyclotomic(d));
            }
        }
        num
    }

    /// Minimal polynomial of ζ_ℓ + ζ_ℓ^{-1} over Q, for an odd prime ℓ.
    ///
    /// Uses Φ_ℓ(x) = x^m Ψ(x + 1/x) with m = (ℓ-1)/2 and the recursion
    /// P_k(y) = y P_{k-1}(y) - P_{k-2}(y) for x^k + x^{-k}.
    pub fn real_cyclotomic(ell: u64) -> IntPoly {
        assert!(ell >= 3 && ell % 2 == 1);
        let m = (ell - 1) / 2;
        let mut p_prev = IntPoly::constant(BigInt::from(2)); // P_0 = 2
        let mut p_cur = IntPoly::x(); // P_1 = y
        let mut psi = IntPoly::one().add(&p_cur); // 1 + P_1
        if m == 1 {
            return psi;
        }
        for _ in 2..=m {
            let next = IntPoly::x().mul(&p_cur).sub(&p_prev);
            psi = psi.add(&next);
            p_prev = p_cur;
            p_cur = next;
        }
        psi
    }
}

/// Monic integer polynomial `p(a - x)`, sign-normalized to stay monic.
pub fn compose_linear_flip(p: &IntPoly, a: i64) -> IntPoly {
    let inner = IntPoly::new(vec![BigInt::from(a), -BigInt::one()]);
    let q = p.compose(&inner);
    if q.leading().is_negative() {
        q.neg()
    } else {
        q
    }
}
