//! Full-rank lattices over the valuation ring and bilinear forms on the
//! ambient space: sums, intersections, duals with respect to a form,
//! membership, indices, and perfectness certificates.
//!
//! A lattice is π^{-denom} times the column span of a canonical Hermite
//! basis, so equality is plain comparison. Forms carry their own π-power
//! denominator and a symmetry tag.

use crate::error::{Error, Result};
use crate::localring::{Ring, RingElement, RingKind};
use crate::mat::{hnf, inverse_with_denom, snf, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Alternating,
    Symmetric,
    Hermitian,
    SkewHermitian,
}

impl Symmetry {
    pub fn is_sesquilinear(&self) -> bool {
        matches!(self, Symmetry::Hermitian | Symmetry::SkewHermitian)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Symmetry::Alternating => "alternating",
            Symmetry::Symmetric => "symmetric",
            Symmetry::Hermitian => "hermitian",
            Symmetry::SkewHermitian => "skew-hermitian",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    ring: Ring,
    dim: usize,
    basis: Mat,
    denom: i32,
}

impl Lattice {
    /// O^n with the identity basis.
    pub fn standard(ring: &Ring, dim: usize) -> Lattice {
        Lattice {
            ring: ring.clone(),
            dim,
            basis: Mat::identity(ring, dim),
            denom: 0,
        }
    }

    /// Lattice spanned by the columns of `gens` (at least `dim` of them),
    /// scaled by π^{-denom}.
    pub fn from_generators(gens: &Mat, denom: i32) -> Result<Lattice> {
        let dim = gens.rows();
        let basis = hnf(gens)?;
        Lattice {
            ring: gens.ring().clone(),
            dim,
            basis,
            denom,
        }
        .normalized()
    }

    /// Strip common π powers into the denominator and re-canonicalize.
    fn normalized(self) -> Result<Lattice> {
        let v = self
            .basis
            .min_valuation()
            .ok_or_else(|| Error::PrecisionExhausted("zero basis".into()))?;
        if v == 0 {
            return Ok(self);
        }
        let divided = self.basis.div_by_pi_pow(v)?;
        Ok(Lattice {
            ring: self.ring,
            dim: self.dim,
            basis: hnf(&divided)?,
            denom: self.denom - v as i32,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn denom(&self) -> i32 {
        self.denom
    }

    /// π^k · L.
    pub fn scaled_by_pi(&self, k: i32) -> Lattice {
        Lattice {
            ring: self.ring.clone(),
            dim: self.dim,
            basis: self.basis.clone(),
            denom: self.denom - k,
        }
    }

    /// Generators of both lattices over a common denominator.
    fn aligned(&self, other: &Lattice) -> (Mat, Mat, i32) {
        assert!(self.ring == *other.ring(), "mixed rings");
        assert_eq!(self.dim, other.dim, "mixed dimensions");
        let d = self.denom.max(other.denom);
        let a = self.basis.mul_by_pi_pow((d - self.denom) as u32);
        let b = other.basis.mul_by_pi_pow((d - other.denom) as u32);
        (a, b, d)
    }

    /// Smallest lattice containing both.
    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        let (a, b, d) = self.aligned(other);
        Lattice::from_generators(&a.hstack(&b), d)
    }

    /// Largest lattice contained in both, via the kernel of [A | -B].
    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        let (a, b, d) = self.aligned(other);
        let stacked = a.hstack(&b.neg());
        let s = snf(&stacked)?;
        let n = self.dim;
        if s.rank < n {
            return Err(Error::PrecisionExhausted(
                "degenerate lattice pair in intersection".into(),
            ));
        }
        // kernel columns of the reduced diagonal pull back through `right`
        let mut gens = Mat::zero(&self.ring, n, n);
        for (out_col, j) in (s.rank..2 * n).enumerate() {
            let coeffs = s.right.col(j);
            for i in 0..n {
                let mut acc = self.ring.zero();
                for (k, c) in coeffs.iter().take(n).enumerate() {
                    acc = acc.add(&a.at(i, k).mul(c));
                }
                gens.set(i, out_col, acc);
            }
        }
        Lattice::from_generators(&gens, d)
    }

    /// Coordinates of `other`'s basis in this basis: returns (M, k) with the
    /// coordinate matrix equal to π^{-k} M.
    pub fn coords_matrix(&self, other: &Lattice) -> Result<(Mat, i32)> {
        let (inv, dinv) = inverse_with_denom(&self.basis)?;
        let m = inv.mul(&other.basis);
        let k = dinv as i32 + (other.denom - self.denom);
        Ok((m, k))
    }

    /// Whether `other` ⊆ `self`.
    pub fn contains(&self, other: &Lattice) -> Result<bool> {
        let (m, k) = self.coords_matrix(other)?;
        if k <= 0 {
            return Ok(true);
        }
        Ok(m
            .min_valuation()
            .is_none_or(|v| v as i32 >= k))
    }

    /// Elementary-divisor exponents of self/other for other ⊆ self.
    pub fn index_exponents(&self, sub: &Lattice) -> Result<Vec<u32>> {
        let (m, k) = self.coords_matrix(sub)?;
        let coords = if k > 0 {
            if m.min_valuation().is_some_and(|v| (v as i32) < k) {
                return Err(Error::BadParameters("not a sublattice".into()));
            }
            m.div_by_pi_pow(k as u32)?
        } else {
            m.mul_by_pi_pow((-k) as u32)
        };
        let s = snf(&coords)?;
        if s.rank < self.dim {
            return Err(Error::PrecisionExhausted("singular coordinate matrix".into()));
        }
        Ok(s.exponents)
    }

    /// Total index exponent: v_π(det) of the inclusion.
    pub fn index_total(&self, sub: &Lattice) -> Result<u32> {
        Ok(self.index_exponents(sub)?.iter().sum())
    }

    /// Membership of the vector π^{-xdenom}·x.
    pub fn contains_vector(&self, x: &[RingElement], xdenom: i32) -> Result<bool> {
        let gens = Mat::from_fn(&self.ring, self.dim, 1, |i, _| x[i].clone());
        // solve basis·c = π^{denom - xdenom}·x by forward substitution on
        // the triangular basis; x ∈ L iff every coordinate is integral
        let shift = self.denom - xdenom;
        let scaled = if shift >= 0 {
            gens.mul_by_pi_pow(shift as u32)
        } else {
            match gens.div_by_pi_pow((-shift) as u32) {
                Ok(g) => g,
                Err(_) => return Ok(false),
            }
        };
        let mut rhs: Vec<RingElement> = (0..self.dim).map(|i| scaled.at(i, 0).clone()).collect();
        for i in 0..self.dim {
            let piv = self.basis.at(i, i);
            let v = piv.val_ext()?;
            let cur = rhs[i].clone();
            if cur.is_zero() {
                continue;
            }
            if cur.valuation().is_none_or(|w| w < v) {
                return Ok(false);
            }
            let c = cur.div_exact(piv)?;
            for r in i + 1..self.dim {
                rhs[r] = rhs[r].sub(&c.mul(self.basis.at(r, i)));
            }
            rhs[i] = self.ring.zero();
        }
        Ok(true)
    }

    /// The f-dual T* = {x : f(x, T) ⊆ O}.
    pub fn dual(&self, f: &BilinearForm) -> Result<Lattice> {
        assert!(self.ring == *f.ring(), "mixed rings");
        let bt_gt = self.basis.transpose().mul(&f.gram.transpose());
        let (inv, dinv) = inverse_with_denom(&bt_gt)
            .map_err(|_| Error::DegenerateForm("dual of a degenerate form".into()))?;
        let basis = if f.symmetry.is_sesquilinear() {
            inv.conj()?
        } else {
            inv
        };
        let denom = dinv as i32 - self.denom - f.denom;
        Lattice::from_generators(&basis, denom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearForm {
    ring: Ring,
    gram: Mat,
    denom: i32,
    symmetry: Symmetry,
}

/// Outcome of a perfectness check: the elementary-divisor exponents of the
/// Gram matrix on a lattice basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectCert {
    pub perfect: bool,
    pub exponents: Vec<u32>,
}

impl BilinearForm {
    pub fn new(gram: Mat, denom: i32, symmetry: Symmetry) -> Result<BilinearForm> {
        assert_eq!(gram.rows(), gram.cols());
        let ring = gram.ring().clone();
        if symmetry.is_sesquilinear()
            && (!ring.has_conj() || ring.e() != 1) {
                return Err(Error::SymmetryMismatch(
                    "sesquilinear forms need an unramified quadratic conjugation".into(),
                ));
            }
        let f = BilinearForm {
            ring,
            gram,
            denom,
            symmetry,
        };
        f.validate_symmetry()?;
        Ok(f)
    }

    fn validate_symmetry(&self) -> Result<()> {
        let g = &self.gram;
        let ok = match self.symmetry {
            Symmetry::Alternating => {
                let anti = g.transpose().eq_cert(&g.neg());
                let zero_diag = (0..g.rows()).all(|i| g.at(i, i).is_zero_cert());
                anti && zero_diag
            }
            Symmetry::Symmetric => g.transpose().eq_cert(g),
            Symmetry::Hermitian => g.conj_transpose()?.eq_cert(g),
            Symmetry::SkewHermitian => g.conj_transpose()?.eq_cert(&g.neg()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SymmetryMismatch(format!(
                "gram matrix is not {}",
                self.symmetry.as_str()
            )))
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn denom(&self) -> i32 {
        self.denom
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// π^k · f.
    pub fn scaled_by_pi(&self, k: i32) -> BilinearForm {
        BilinearForm {
            ring: self.ring.clone(),
            gram: self.gram.clone(),
            denom: self.denom - k,
            symmetry: self.symmetry,
        }
    }

    /// Block-diagonal 2×2 symplectic blocks on consecutive coordinate pairs.
    pub fn standard_symplectic(ring: &Ring, dim: usize) -> BilinearForm {
        assert!(dim.is_multiple_of(2));
        let blocks: Vec<Mat> = (0..dim / 2)
            .map(|_| Mat::from_i64(ring, &[&[0, 1], &[-1, 0]]))
            .collect();
        BilinearForm::new(Mat::block_diag(ring, &blocks), 0, Symmetry::Alternating).unwrap()
    }

    pub fn identity_form(ring: &Ring, dim: usize) -> BilinearForm {
        BilinearForm::new(Mat::identity(ring, dim), 0, Symmetry::Symmetric).unwrap()
    }

    /// f(x, y) for integral coordinate vectors; the caller accounts for the
    /// form denominator.
    pub fn eval_int(&self, x: &[RingElement], y: &[RingElement]) -> Result<RingElement> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        let mut acc = self.ring.zero();
        for i in 0..n {
            let xi = if self.symmetry.is_sesquilinear() {
                x[i].conj()?
            } else {
                x[i].clone()
            };
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                acc = acc.add(&xi.mul(self.gram.at(i, j)).mul(&y[j]));
            }
        }
        Ok(acc)
    }

    /// Gram matrix of f on a basis of t, as (integral matrix, denominator):
    /// the true values are π^{-d} times the returned matrix.
    pub fn gram_on(&self, t: &Lattice) -> Result<(Mat, i32)> {
        assert!(self.ring == *t.ring(), "mixed rings");
        let b = t.basis();
        let left = if self.symmetry.is_sesquilinear() {
            b.conj()?.transpose()
        } else {
            b.transpose()
        };
        let m = left.mul(&self.gram).mul(b);
        Ok((m, self.denom + 2 * t.denom()))
    }

    /// Whether f restricted to t×t is O-valued.
    pub fn integral_on(&self, t: &Lattice) -> Result<bool> {
        let (m, d) = self.gram_on(t)?;
        if d <= 0 {
            return Ok(true);
        }
        Ok(m.min_valuation().is_none_or(|v| v as i32 >= d))
    }

    /// Perfectness of f on t: all elementary divisors of the Gram matrix in
    /// a basis of t must be units.
    pub fn is_perfect_on(&self, t: &Lattice) -> Result<PerfectCert> {
        let (m, d) = self.gram_on(t)?;
        let int = if d > 0 {
            if m.min_valuation().is_some_and(|v| (v as i32) < d) {
                return Err(Error::ValuesNotIntegral(format!(
                    "minimal Gram valuation {} below denominator {}",
                    m.min_valuation().unwrap(),
                    d
                )));
            }
            m.div_by_pi_pow(d as u32)?
        } else {
            m.mul_by_pi_pow((-d) as u32)
        };
        let s = snf(&int)?;
        let perfect = s.rank == t.dim() && s.exponents.iter().all(|&e| e == 0);
        let mut exponents = s.exponents;
        if s.rank < t.dim() {
            return Err(Error::PrecisionExhausted(
                "gram matrix singular at working precision".into(),
            ));
        }
        exponents.sort_unstable();
        Ok(PerfectCert { perfect, exponents })
    }

    /// Nondegeneracy at working precision.
    pub fn nondegenerate(&self) -> Result<bool> {
        let s = snf(&self.gram)?;
        Ok(s.rank == self.dim())
    }

    /// Check invariance under a matrix g: gᵀ·G·g = G (with conjugation on
    /// the left factor for sesquilinear forms).
    pub fn invariant_under(&self, g: &Mat) -> Result<bool> {
        let left = if self.symmetry.is_sesquilinear() {
            g.conj()?.transpose()
        } else {
            g.transpose()
        };
        Ok(left.mul(&self.gram).mul(g).eq_cert(&self.gram))
    }
}

/// Convenience for rings where conjugation semantics require unramified
/// towers: alternating and symmetric forms are allowed anywhere.
pub fn symmetry_allowed(ring: &Ring, s: Symmetry) -> bool {
    !s.is_sesquilinear() || (ring.has_conj() && ring.e() == 1 && ring.kind() != &RingKind::Base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z5() -> Ring {
        Ring::base(5, 32)
    }

    #[test]
    fn sum_and_intersect_basics() {
        let ring = z5();
        let t = Lattice::standard(&ring, 2);
        let pit = t.scaled_by_pi(1);
        assert_eq!(t.sum(&t).unwrap(), t);
        assert_eq!(t.sum(&pit).unwrap(), t);
        assert_eq!(t.intersect(&t).unwrap(), t);
        assert_eq!(t.intersect(&pit).unwrap(), pit);
        assert!(t.contains(&pit).unwrap());
        assert!(!pit.contains(&t).unwrap());
        assert_eq!(t.index_total(&pit).unwrap(), 2);
    }

    #[test]
    fn standard_symplectic_is_self_dual() {
        let ring = z5();
        let t = Lattice::standard(&ring, 2);
        let j = BilinearForm::standard_symplectic(&ring, 2);
        let d = t.dual(&j).unwrap();
        assert_eq!(d, t);
        let cert = j.is_perfect_on(&t).unwrap();
        assert!(cert.perfect);
        assert_eq!(cert.exponents, vec![0, 0]);
    }

    #[test]
    fn dual_scaling_and_involution() {
        let ring = z5();
        let gram = Mat::from_i64(&ring, &[&[2, 5], &[5, 1]]);
        let f = BilinearForm::new(gram, 0, Symmetry::Symmetric).unwrap();
        let t = Lattice::from_generators(&Mat::from_i64(&ring, &[&[1, 5], &[0, 25]]), 0).unwrap();
        let d = t.dual(&f).unwrap();
        let dd = d.dual(&f).unwrap();
        assert_eq!(dd, t);
        // dual of πT is π^{-1}·dual(T)
        let dpit = t.scaled_by_pi(1).dual(&f).unwrap();
        assert_eq!(dpit, d.scaled_by_pi(-1));
    }

    #[test]
    fn trace_form_dual_is_inverse_different() {
        // dual of O_M under (x,y) ↦ tr(x·conj(y)) is η^{2-ℓ}·O_M
        for ell in [5u64, 7] {
            let base = Ring::base(ell, 32);
            let m = Ring::cyclotomic_ell(&base).unwrap();
            let n = (ell - 1) as usize;
            let t_gen = m.gen_pi();
            // Gram over the power basis of t = 1 - ζ
            let gram = Mat::from_fn(&base, n, n, |i, j| {
                let x = t_gen.pow(i as u64);
                let y = t_gen.pow(j as u64).conj().unwrap();
                base.from_padic(&x.mul(&y).trace_to_base())
            });
            let f = BilinearForm::new(gram, 0, Symmetry::Symmetric).unwrap();
            let om = Lattice::standard(&base, n);
            let dual = om.dual(&f).unwrap();
            // expected: generators ℓ·η^{2-ℓ}·t^i over denominator 1
            let eta = m.uniformizer();
            let scale = m
                .from_i64(ell as i64)
                .div_exact(&eta.pow(ell - 2))
                .unwrap();
            let gens = Mat::from_fn(&base, n, n, |i, j| {
                let el = scale.mul(&t_gen.pow(j as u64));
                base.from_padic(&el.coords()[i])
            });
            let expected = Lattice::from_generators(&gens, 1).unwrap();
            assert_eq!(dual, expected);
            // and the index |dual/O_M| has exponent sum ℓ-2
            assert_eq!(dual.index_total(&om).unwrap(), (ell - 2) as u32);
        }
    }

    #[test]
    fn trace_form_on_cyclotomic_is_not_perfect() {
        let base = z5();
        let m = Ring::cyclotomic_ell(&base).unwrap();
        let zeta = m.zeta().unwrap();
        let gram = Mat::from_fn(&base, 4, 4, |i, j| {
            let x = zeta.pow(i as u64);
            let y = zeta.pow(j as u64).conj().unwrap();
            base.from_padic(&x.mul(&y).trace_to_base())
        });
        let f = BilinearForm::new(gram, 0, Symmetry::Symmetric).unwrap();
        let t = Lattice::standard(&base, 4);
        let cert = f.is_perfect_on(&t).unwrap();
        assert!(!cert.perfect);
        assert_eq!(cert.exponents.iter().sum::<u32>(), 3);
    }

    #[test]
    fn values_not_integral_is_reported() {
        let ring = z5();
        let f = BilinearForm::standard_symplectic(&ring, 2).scaled_by_pi(-1);
        let t = Lattice::standard(&ring, 2);
        assert!(matches!(
            f.is_perfect_on(&t),
            Err(Error::ValuesNotIntegral(_))
        ));
    }

    #[test]
    fn intersect_agrees_with_dual_identity() {
        // intersect(a, b) = dual(sum(dual a, dual b)) for a perfect auxiliary form
        let ring = z5();
        let aux = BilinearForm::identity_form(&ring, 2);
        let a = Lattice::from_generators(&Mat::from_i64(&ring, &[&[5, 1], &[0, 5]]), 0).unwrap();
        let b = Lattice::from_generators(&Mat::from_i64(&ring, &[&[25, 3], &[0, 1]]), 1).unwrap();
        let lhs = a.intersect(&b).unwrap();
        let rhs = a
            .dual(&aux)
            .unwrap()
            .sum(&b.dual(&aux).unwrap())
            .unwrap()
            .dual(&aux)
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn membership_via_triangular_solve() {
        let ring = z5();
        let t = Lattice::from_generators(&Mat::from_i64(&ring, &[&[5, 2], &[0, 1]]), 0).unwrap();
        let x = vec![ring.from_i64(5), ring.from_i64(0)];
        assert!(t.contains_vector(&x, 0).unwrap());
        let y = vec![ring.from_i64(1), ring.from_i64(0)];
        assert!(!t.contains_vector(&y, 0).unwrap());
        // 2·e_1 + e_2 is a generator
        let z = vec![ring.from_i64(2), ring.from_i64(1)];
        assert!(t.contains_vector(&z, 0).unwrap());
        // denominators on either side
        let half = t.scaled_by_pi(-1); // π^{-1}·T
        let e1 = vec![ring.from_i64(1), ring.from_i64(0)];
        assert!(half.contains_vector(&e1, 0).unwrap());
        assert!(!t.contains_vector(&e1, 1).unwrap()); // π^{-1}e_1 ∉ T
        assert!(t.contains_vector(&vec![ring.from_i64(25), ring.from_i64(0)], 1).unwrap());
    }

    #[test]
    fn hermitian_form_over_unramified_quadratic() {
        let u = Ring::unramified(5, 3, 32).unwrap();
        let g = Mat::identity(&u, 2);
        let f = BilinearForm::new(g, 0, Symmetry::Hermitian).unwrap();
        let t = Lattice::standard(&u, 2);
        assert!(f.is_perfect_on(&t).unwrap().perfect);
        assert_eq!(t.dual(&f).unwrap(), t);
        // sesquilinear forms are rejected without a conjugation
        let base = z5();
        assert!(matches!(
            BilinearForm::new(Mat::identity(&base, 2), 0, Symmetry::Hermitian),
            Err(Error::SymmetryMismatch(_))
        ));
    }
}
