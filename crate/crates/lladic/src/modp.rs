//! Arithmetic over F_ℓ and its small extensions: polynomials mod ℓ,
//! finite fields F_q with q = ℓ^f, and dense matrices over them.
//!
//! Everything here works with small primes and tiny dimensions; the residue
//! computations the tower rings need never leave that regime.

use crate::error::{Error, Result};
use crate::poly::IntPoly;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

pub fn pow_mod(mut a: u64, mut e: u128, p: u64) -> u64 {
    let mut acc: u64 = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * a as u128) % p as u128) as u64;
        }
        a = ((a as u128 * a as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime in all call sites
    pow_mod(a % p, (p - 2) as u128, p)
}

/// Dense polynomial over F_p, ascending coefficients, zero = empty vec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    pub p: u64,
    coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        ModPoly { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> Self {
        ModPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        ModPoly::new(p, vec![0, 1])
    }

    pub fn from_int_poly(p: u64, f: &IntPoly) -> Self {
        let pm = num_bigint::BigInt::from(p);
        ModPoly::new(
            p,
            f.coeffs()
                .iter()
                .map(|c| {
                    let mut r = c.mod_floor(&pm);
                    if r.is_negative() {
                        r += &pm;
                    }
                    r.to_u64().unwrap()
                })
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn add(&self, o: &ModPoly) -> ModPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ModPoly::new(
            self.p,
            (0..n)
                .map(|i| (self.coeff(i) + o.coeff(i)) % self.p)
                .collect(),
        )
    }

    pub fn sub(&self, o: &ModPoly) -> ModPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ModPoly::new(
            self.p,
            (0..n)
                .map(|i| (self.coeff(i) + self.p - o.coeff(i) % self.p) % self.p)
                .collect(),
        )
    }

    pub fn scale(&self, c: u64) -> ModPoly {
        let c = c % self.p;
        ModPoly::new(
            self.p,
            self.coeffs
                .iter()
                .map(|&a| ((a as u128 * c as u128) % self.p as u128) as u64)
                .collect(),
        )
    }

    pub fn mul(&self, o: &ModPoly) -> ModPoly {
        if self.is_zero() || o.is_zero() {
            return ModPoly::zero(self.p);
        }
        let mut out = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = ((out[i + j] as u128 + a as u128 * b as u128) % self.p as u128) as u64;
            }
        }
        ModPoly::new(self.p, out)
    }

    /// Quotient and remainder; divisor need not be monic.
    pub fn divmod(&self, d: &ModPoly) -> (ModPoly, ModPoly) {
        assert!(!d.is_zero(), "division by zero");
        let dd = d.degree().unwrap();
        if self.degree().is_none_or(|n| n < dd) {
            return (ModPoly::zero(self.p), self.clone());
        }
        let lead_inv = inv_mod(*d.coeffs.last().unwrap(), self.p);
        let mut rem = self.coeffs.clone();
        let n = rem.len() - 1;
        let mut quo = vec![0u64; n - dd + 1];
        for k in (0..=n - dd).rev() {
            let q = ((rem[k + dd] as u128 * lead_inv as u128) % self.p as u128) as u64;
            quo[k] = q;
            if q == 0 {
                continue;
            }
            for (i, &c) in d.coeffs.iter().enumerate() {
                let sub = (q as u128 * c as u128 % self.p as u128) as u64;
                rem[k + i] = (rem[k + i] + self.p - sub) % self.p;
            }
        }
        (ModPoly::new(self.p, quo), ModPoly::new(self.p, rem))
    }

    pub fn rem(&self, d: &ModPoly) -> ModPoly {
        self.divmod(d).1
    }

    pub fn monic(&self) -> ModPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(*self.coeffs.last().unwrap(), self.p))
    }

    pub fn gcd(&self, o: &ModPoly) -> ModPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns (g, s, t) with s*self + t*other = g, g monic.
    pub fn xgcd(&self, o: &ModPoly) -> (ModPoly, ModPoly, ModPoly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (ModPoly::one(p), ModPoly::zero(p));
        let (mut t0, mut t1) = (ModPoly::zero(p), ModPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let lead = *r0.coeffs.last().unwrap();
        let li = inv_mod(lead, p);
        (r0.scale(li), s0.scale(li), t0.scale(li))
    }

    /// self^e mod m.
    pub fn pow_mod(&self, mut e: u128, m: &ModPoly) -> ModPoly {
        let mut acc = ModPoly::one(self.p);
        let mut base = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc: u64 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = ((acc as u128 * x as u128 + c as u128) % self.p as u128) as u64;
        }
        acc
    }

    /// Rabin irreducibility test over F_p.
    pub fn is_irreducible(&self) -> bool {
        let f = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(f) => f,
        };
        let p = self.p;
        let m = self.monic();
        let x = ModPoly::x(p);
        // x^{p^f} ≡ x mod m
        let mut frob = x.clone();
        for _ in 0..f {
            frob = frob.pow_mod(p as u128, &m);
        }
        if frob.sub(&x).rem(&m) != ModPoly::zero(p) {
            return false;
        }
        // gcd(x^{p^{f/q}} - x, m) = 1 for each prime divisor q of f
        let mut n = f;
        let mut prime_divs = vec![];
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                prime_divs.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            prime_divs.push(n);
        }
        for q in prime_divs {
            let k = f / q;
            let mut fr = x.clone();
            for _ in 0..k {
                fr = fr.pow_mod(p as u128, &m);
            }
            let g = fr.sub(&x).gcd(&m);
            if g.degree() != Some(0) {
                return false;
            }
        }
        true
    }
}

/// The field F_q, q = p^f, as F_p[x]/(modulus).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fq {
    pub p: u64,
    pub f: usize,
    pub modulus: ModPoly,
}

/// Element of F_q: coefficient vector of length f.
pub type FqElt = Vec<u64>;

impl Fq {
    pub fn new(p: u64, modulus: ModPoly) -> Self {
        let f = modulus.degree().expect("nonzero modulus");
        assert!(f >= 1);
        Fq { p, f, modulus }
    }

    pub fn prime_field(p: u64) -> Self {
        Fq::new(p, ModPoly::x(p))
    }

    pub fn size(&self) -> u128 {
        (self.p as u128).pow(self.f as u32)
    }

    pub fn zero(&self) -> FqElt {
        vec![0; self.f]
    }

    pub fn one(&self) -> FqElt {
        let mut e = vec![0; self.f];
        e[0] = 1;
        e
    }

    pub fn from_u64(&self, a: u64) -> FqElt {
        let mut e = vec![0; self.f];
        e[0] = a % self.p;
        e
    }

    pub fn is_zero(&self, a: &FqElt) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElt, b: &FqElt) -> FqElt {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &FqElt, b: &FqElt) -> FqElt {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + self.p - y % self.p) % self.p)
            .collect()
    }

    pub fn neg(&self, a: &FqElt) -> FqElt {
        a.iter().map(|&x| (self.p - x % self.p) % self.p).collect()
    }

    pub fn mul(&self, a: &FqElt, b: &FqElt) -> FqElt {
        let pa = ModPoly::new(self.p, a.clone());
        let pb = ModPoly::new(self.p, b.clone());
        let r = pa.mul(&pb).rem(&self.modulus);
        let mut out = vec![0; self.f];
        for i in 0..self.f {
            out[i] = r.coeff(i);
        }
        out
    }

    pub fn pow(&self, a: &FqElt, mut e: u128) -> FqElt {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FqElt) -> Result<FqElt> {
        if self.is_zero(a) {
            return Err(Error::NotAUnit(0));
        }
        Ok(self.pow(a, self.size() - 2))
    }

    /// x ↦ x^p, the arithmetic Frobenius.
    pub fn frobenius(&self, a: &FqElt) -> FqElt {
        self.pow(a, self.p as u128)
    }

    /// Multiplicative order, by trial over divisors of q - 1.
    pub fn order(&self, a: &FqElt) -> u128 {
        assert!(!self.is_zero(a));
        let n = self.size() - 1;
        let mut divisors = vec![];
        let mut d: u128 = 1;
        while d * d <= n {
            if n.is_multiple_of(d) {
                divisors.push(d);
                divisors.push(n / d);
            }
            d += 1;
        }
        divisors.sort_unstable();
        for d in divisors {
            if self.pow(a, d) == self.one() {
                return d;
            }
        }
        n
    }

    /// All q field elements, in lexicographic coefficient order.
    pub fn elements(&self) -> Vec<FqElt> {
        let q = self.size();
        assert!(q <= 1 << 24, "field too large to enumerate");
        let mut out = Vec::with_capacity(q as usize);
        let mut idx = vec![0u64; self.f];
        loop {
            out.push(idx.clone());
            let mut i = 0;
            loop {
                if i == self.f {
                    return out;
                }
                idx[i] += 1;
                if idx[i] < self.p {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }
}

/// Dense matrix over F_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqMat {
    pub field: Fq,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<FqElt>, // row-major
}

impl FqMat {
    pub fn zero(field: &Fq, rows: usize, cols: usize) -> Self {
        FqMat {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Fq, n: usize) -> Self {
        let mut m = FqMat::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &FqElt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FqElt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let f = &self.field;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { f.one() } else { f.zero() };
                if *self.at(i, j) != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, o: &FqMat) -> FqMat {
        assert_eq!(self.cols, o.rows);
        let f = &self.field;
        let mut out = FqMat::zero(f, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..o.cols {
                    let prod = f.mul(a, o.at(k, j));
                    let cur = f.add(out.at(i, j), &prod);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> FqMat {
        let mut out = FqMat::zero(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn apply(&self, v: &[FqElt]) -> Vec<FqElt> {
        assert_eq!(self.cols, v.len());
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for j in 0..self.cols {
                    acc = f.add(&acc, &f.mul(self.at(i, j), &v[j]));
                }
                acc
            })
            .collect()
    }

    /// In-place Gauss-Jordan; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !f.is_zero(self.at(i, c))) else {
                continue;
            };
            for j in 0..self.cols {
                self.data.swap(pr * self.cols + j, r * self.cols + j);
            }
            let inv = f.inv(self.at(r, c)).unwrap();
            for j in 0..self.cols {
                let v = f.mul(self.at(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !f.is_zero(self.at(i, c)) {
                    let factor = self.at(i, c).clone();
                    for j in 0..self.cols {
                        let v = f.sub(self.at(i, j), &f.mul(&factor, self.at(r, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<FqElt>> {
        let f = self.field.clone();
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = vec![];
        for &fc in &free {
            let mut v = vec![f.zero(); self.cols];
            v[fc] = f.one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.at(ri, fc));
            }
            basis.push(v);
        }
        basis
    }

    pub fn det(&self) -> FqElt {
        assert_eq!(self.rows, self.cols);
        let f = self.field.clone();
        let n = self.rows;
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !f.is_zero(m.at(i, c))) else {
                return f.zero();
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = f.neg(&det);
            }
            det = f.mul(&det, m.at(c, c));
            let inv = f.inv(m.at(c, c)).unwrap();
            for i in c + 1..n {
                if f.is_zero(m.at(i, c)) {
                    continue;
                }
                let factor = f.mul(m.at(i, c), &inv);
                for j in c..n {
                    let v = f.sub(m.at(i, j), &f.mul(&factor, m.at(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Characteristic polynomial, ascending coefficients, monic of degree n.
    /// Division-free (Berkowitz), so it doubles as a cross-check for the
    /// valuation-ring version.
    pub fn charpoly(&self) -> Vec<FqElt> {
        assert_eq!(self.rows, self.cols);
        let f = self.field.clone();
        let n = self.rows;
        if n == 0 {
            return vec![f.one()];
        }
        // Berkowitz: iteratively extend the leading principal submatrix.
        // p is kept descending; reversed at the end.
        let mut p = vec![f.one(), f.neg(self.at(0, 0))];
        for k in 1..n {
            // toeplitz column entries t_0..t_{k+1}
            let a = self.at(k, k).clone();
            let row: Vec<FqElt> = (0..k).map(|j| self.at(k, j).clone()).collect();
            let col: Vec<FqElt> = (0..k).map(|i| self.at(i, k).clone()).collect();
            let mut t = vec![f.one(), f.neg(&a)];
            let mut cur = col.clone();
            for _ in 0..k {
                // t_{j+2} = - row · M^j · col
                let mut dot = f.zero();
                for (x, y) in row.iter().zip(cur.iter()) {
                    dot = f.add(&dot, &f.mul(x, y));
                }
                t.push(f.neg(&dot));
                // cur = M · cur
                let mut next = vec![f.zero(); k];
                for i in 0..k {
                    for j in 0..k {
                        next[i] = f.add(&next[i], &f.mul(self.at(i, j), &cur[j]));
                    }
                }
                cur = next;
            }
            let mut newp = vec![f.zero(); k + 2];
            for (i, ti) in t.iter().enumerate().take(k + 2) {
                for (j, pj) in p.iter().enumerate() {
                    if i + j < k + 2 {
                        newp[i + j] = f.add(&newp[i + j], &f.mul(ti, pj));
                    }
                }
            }
            p = newp;
        }
        p.reverse();
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility_mod_small_primes() {
        // x^2 + 1 splits mod 5, irreducible mod 7
        let f5 = ModPoly::new(5, vec![1, 0, 1]);
        assert!(!f5.is_irreducible());
        let f7 = ModPoly::new(7, vec![1, 0, 1]);
        assert!(f7.is_irreducible());
        // Φ_5 mod 2 is irreducible (2 has order 4 mod 5)
        let phi5 = ModPoly::new(2, vec![1, 1, 1, 1, 1]);
        assert!(phi5.is_irreducible());
    }

    #[test]
    fn fq_basics() {
        let k = Fq::new(7, ModPoly::new(7, vec![1, 0, 1])); // F_49
        let i = vec![0, 1]; // a square root of -1
        assert_eq!(k.mul(&i, &i), k.from_u64(6));
        assert_eq!(k.order(&i), 4);
        let inv = k.inv(&i).unwrap();
        assert_eq!(k.mul(&i, &inv), k.one());
        assert_eq!(k.elements().len(), 49);
    }

    #[test]
    fn matrix_kernel_and_det() {
        let f = Fq::prime_field(5);
        let mut m = FqMat::zero(&f, 2, 3);
        m.set(0, 0, f.from_u64(1));
        m.set(0, 1, f.from_u64(2));
        m.set(0, 2, f.from_u64(3));
        m.set(1, 0, f.from_u64(0));
        m.set(1, 1, f.from_u64(1));
        m.set(1, 2, f.from_u64(4));
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            let img = m.apply(v);
            assert!(img.iter().all(|e| f.is_zero(e)));
        }
        let id = FqMat::identity(&f, 3);
        assert_eq!(id.det(), f.one());
    }

    #[test]
    fn charpoly_companion() {
        // companion of x^2 + 3x + 1 over F_5
        let f = Fq::prime_field(5);
        let mut m = FqMat::zero(&f, 2, 2);
        m.set(0, 1, f.from_u64(4)); // -1
        m.set(1, 0, f.from_u64(1));
        m.set(1, 1, f.from_u64(2)); // -3
        let cp = m.charpoly();
        assert_eq!(cp, vec![f.from_u64(1), f.from_u64(3), f.from_u64(1)]);
    }
}
