//! The constructive core: rescaling forms to unit content, the lattice
//! stabilization loop S_{i+1} = S_i + (π^{-1}S_i ∩ πS_i*), the residue
//! embedding into the product of automorphism groups of T/mT* and T*/T
//! with characteristic polynomials preserved, finite-order rigidity
//! checks, and the direct-sum assembly of perfect pairings.

use crate::error::{Error, Result};
use crate::groups::Element;
use crate::lattice::{BilinearForm, Lattice, PerfectCert, Symmetry};
use crate::localring::Ring;
use crate::mat::{inverse_with_denom, snf, Mat};
use crate::modp::{Fq, FqElt, FqMat};
use crate::reps::{mu_ell_regular, Representation};

/// A stabilized lattice: f(T, T) = O with π·T* ⊆ T.
#[derive(Debug, Clone)]
pub struct StabilizedPair {
    pub lattice: Lattice,
    pub form: BilinearForm,
    pub dual_index_exponents: Vec<u32>,
    pub iterations: u32,
}

/// Rescale a form by a uniformizer power so its Gram matrix on a basis of
/// `s` has minimal valuation zero.
pub fn normalize_form(f: &BilinearForm, s: &Lattice) -> Result<BilinearForm> {
    let (gram, d) = f.gram_on(s)?;
    let v = gram
        .min_valuation()
        .ok_or_else(|| Error::DegenerateForm("form vanishes on the lattice".into()))?;
    let shift = d - v as i32;
    Ok(f.scaled_by_pi(shift))
}

/// Run the stabilization loop from a stable lattice. When a representation
/// is supplied, stability of the start lattice is re-checked. The fixpoint
/// is detected by lattice equality in Hermite form; the containment
/// π·T* ⊆ T is then asserted as a cross-check.
pub fn stabilize_lattice(
    s0: &Lattice,
    f: &BilinearForm,
    rep: Option<&Representation>,
) -> Result<StabilizedPair> {
    if let Some(r) = rep {
        for img in r.generator_images() {
            let moved = Lattice::from_generators(&img.mul(s0.basis()), s0.denom())?;
            if moved != *s0 {
                return Err(Error::BadParameters(
                    "start lattice is not stable under the representation".into(),
                ));
            }
        }
    }
    let form = normalize_form(f, s0)?;
    let mut s = s0.clone();
    let initial_dual = s.dual(&form)?;
    let budget: u32 = initial_dual.index_exponents(&s)?.iter().sum::<u32>() + 2;
    let mut iterations = 0;
    loop {
        let dual = s.dual(&form)?;
        let grown = s
            .scaled_by_pi(-1)
            .intersect(&dual.scaled_by_pi(1))?
            .sum(&s)?;
        if grown == s {
            break;
        }
        // chain property: S ⊆ S' ⊆ S'^* ⊆ S^*
        debug_assert!(grown.contains(&s)?);
        debug_assert!(dual.contains(&grown.dual(&form)?)?);
        s = grown;
        iterations += 1;
        if iterations > budget {
            return Err(Error::PrecisionExhausted(
                "stabilization loop exceeded its iteration budget".into(),
            ));
        }
    }
    let dual = s.dual(&form)?;
    if !s.contains(&dual.scaled_by_pi(1))? {
        return Err(Error::RigidityViolation(
            "fixpoint does not satisfy π·T* ⊆ T".into(),
        ));
    }
    let exps = dual.index_exponents(&s)?;
    if exps.iter().any(|&e| e > 1) {
        return Err(Error::RigidityViolation(
            "dual index exponent exceeds 1 at the fixpoint".into(),
        ));
    }
    // f(T, T) = O is preserved along the loop
    let (g, d) = form.gram_on(&s)?;
    let v = g
        .min_valuation()
        .ok_or_else(|| Error::DegenerateForm("form vanishes on the fixpoint".into()))?;
    if v as i32 != d {
        return Err(Error::RigidityViolation(format!(
            "form content drifted: min valuation {} vs denominator {}",
            v, d
        )));
    }
    Ok(StabilizedPair {
        lattice: s,
        form,
        dual_index_exponents: exps,
        iterations,
    })
}

/// The residue-field embedding attached to a stabilized pair: block
/// matrices over k acting on T/mT* ⊕ T*/T, with both reduced forms and
/// the characteristic polynomial table.
#[derive(Debug, Clone)]
pub struct ResidueEmbedding {
    pub field: Fq,
    pub block_dims: (usize, usize),
    pub images: Vec<(Element, FqMat)>,
    pub form_bar: FqMat,
    pub form_tilde: FqMat,
    pub charpoly_table: Vec<(Element, Vec<FqElt>)>,
    pub injective: bool,
    pub hypotheses_met: bool,
}

impl ResidueEmbedding {
    pub fn image_of(&self, e: &Element) -> Option<&FqMat> {
        self.images.iter().find(|(g, _)| g == e).map(|(_, m)| m)
    }

    /// ψ(gh) = ψ(g)ψ(h) over all pairs; exhaustive for the small groups
    /// that occur here.
    pub fn verify_homomorphism(&self, rep: &Representation) -> bool {
        let group = rep.group();
        for (g, mg) in &self.images {
            for (h, mh) in &self.images {
                let gh = group.mul(g, h);
                let expected = self.image_of(&gh).unwrap();
                if mg.mul(mh) != *expected {
                    return false;
                }
            }
        }
        true
    }
}

/// Reduce a stabilized pair modulo the maximal ideal. Injectivity is
/// established by exhaustive kernel enumeration; when the ramification
/// bound 2e < ℓ-1 fails the embedding is still computed and the flag is
/// reported (`HypothesesUnmet` is not an error here by design).
pub fn reduce_embedding(sp: &StabilizedPair, rep: &Representation) -> Result<ResidueEmbedding> {
    let ring = sp.lattice.ring().clone();
    let ell = ring.prime();
    let e = ring.e() as u64;
    let hypotheses_met = match sp.form.symmetry() {
        Symmetry::Alternating | Symmetry::Symmetric => 2 * e < ell - 1,
        Symmetry::Hermitian | Symmetry::SkewHermitian => {
            ring.has_conj() && ring.e() == 1 && 2 * e < ell - 1
        }
    };
    let t = &sp.lattice;
    let tstar = t.dual(&sp.form)?;
    // adapt the dual basis to the filtration T ⊆ T*
    let (coords, k) = tstar.coords_matrix(t)?;
    let coords = if k > 0 {
        coords.div_by_pi_pow(k as u32)?
    } else {
        coords.mul_by_pi_pow((-k) as u32)
    };
    let s = snf(&coords)?;
    if s.rank < t.dim() {
        return Err(Error::PrecisionExhausted("singular inclusion matrix".into()));
    }
    let (linv, l_d) = inverse_with_denom(&s.left)?;
    if l_d != 0 {
        return Err(Error::PrecisionExhausted("left transform not unimodular".into()));
    }
    // adapted basis of T*: columns of P, with π^{d_i}·p_i spanning T
    let p = tstar.basis().mul(&linv);
    let exps = &s.exponents;
    let n = t.dim();
    let i0: Vec<usize> = (0..n).filter(|&i| exps[i] == 0).collect();
    let i1: Vec<usize> = (0..n).filter(|&i| exps[i] == 1).collect();
    if i0.len() + i1.len() != n {
        return Err(Error::RigidityViolation(
            "dual index exponents outside {0,1} after stabilization".into(),
        ));
    }
    let (pinv, dp) = inverse_with_denom(&p)?;
    let field = ring.residue_field();
    let mut images = vec![];
    let mut charpoly_table = vec![];
    let mut injective = true;
    let mut kernel_witnesses: Vec<Element> = vec![];
    for (g, img) in rep.image_table() {
        let conjugated = pinv.mul(&img).mul(&p);
        let a = conjugated.div_by_pi_pow(dp).map_err(|_| {
            Error::RigidityViolation("group action does not stabilize the dual".into())
        })?;
        // entries sending T-part into T*: rows in I1, cols in I0 must vanish mod m
        for &i in &i1 {
            for &j in &i0 {
                if a.at(i, j).residue().iter().any(|&c| c != 0) {
                    return Err(Error::RigidityViolation(
                        "reduction is not block-triangular on the filtration".into(),
                    ));
                }
            }
        }
        let ares = a.to_residue();
        let mut block = FqMat::zero(&field, n, n);
        for (bi, &i) in i0.iter().enumerate() {
            for (bj, &j) in i0.iter().enumerate() {
                block.set(bi, bj, ares.at(i, j).clone());
            }
        }
        for (bi, &i) in i1.iter().enumerate() {
            for (bj, &j) in i1.iter().enumerate() {
                block.set(i0.len() + bi, i0.len() + bj, ares.at(i, j).clone());
            }
        }
        // characteristic polynomials: block route vs reduction of the
        // valuation-ring charpoly
        let cp_residue = block.charpoly();
        let cp_lift: Vec<FqElt> = img.charpoly().iter().map(|c| c.residue()).collect();
        if cp_residue != cp_lift {
            return Err(Error::RigidityViolation(
                "characteristic polynomial not preserved by the reduction".into(),
            ));
        }
        if !rep.group().is_identity(&g) && block.is_identity() {
            injective = false;
            kernel_witnesses.push(g.clone());
        }
        images.push((g.clone(), block));
        charpoly_table.push((g, cp_residue));
    }
    // rigidity cross-validation: a kernel element acts trivially on both
    // graded pieces, so (A-1)² ∈ m·End; under the ramification bound it
    // must be the identity
    if hypotheses_met && !kernel_witnesses.is_empty() {
        return Err(Error::RigidityViolation(format!(
            "nontrivial kernel of size {} despite 2e < ℓ-1",
            kernel_witnesses.len()
        )));
    }
    // reduced forms on the two blocks; f is integral on T but only
    // η^{-1}-integral on T*, so the blocks are evaluated separately
    let p_lat_denom = tstar.denom();
    let pcols: Vec<Vec<_>> = (0..n).map(|j| p.col(j)).collect();
    let mut form_bar = FqMat::zero(&field, i0.len(), i0.len());
    for (bi, &i) in i0.iter().enumerate() {
        for (bj, &j) in i0.iter().enumerate() {
            let raw = sp.form.eval_int(&pcols[i], &pcols[j])?;
            let shift = sp.form.denom() + 2 * p_lat_denom;
            let val = shift_to_integral(&raw, shift)?;
            form_bar.set(bi, bj, val.residue());
        }
    }
    let mut form_tilde = FqMat::zero(&field, i1.len(), i1.len());
    let eta = ring.uniformizer();
    for (bi, &i) in i1.iter().enumerate() {
        for (bj, &j) in i1.iter().enumerate() {
            let raw = sp.form.eval_int(&pcols[i], &pcols[j])?.mul(&eta);
            let shift = sp.form.denom() + 2 * p_lat_denom;
            let val = shift_to_integral(&raw, shift)?;
            form_tilde.set(bi, bj, val.residue());
        }
    }
    if !i0.is_empty() && field.is_zero(&form_bar.det()) {
        return Err(Error::DegenerateForm("reduced form on T/mT* is degenerate".into()));
    }
    if !i1.is_empty() && field.is_zero(&form_tilde.det()) {
        return Err(Error::DegenerateForm("reduced form on T*/T is degenerate".into()));
    }
    for block in [&form_bar, &form_tilde] {
        if !residue_form_matches_type(&field, block, sp.form.symmetry()) {
            return Err(Error::SymmetryMismatch(
                "reduced form does not have the input symmetry type".into(),
            ));
        }
    }
    Ok(ResidueEmbedding {
        field,
        block_dims: (i0.len(), i1.len()),
        images,
        form_bar,
        form_tilde,
        charpoly_table,
        injective,
        hypotheses_met,
    })
}

fn residue_form_matches_type(field: &Fq, g: &FqMat, symmetry: Symmetry) -> bool {
    let n = g.rows;
    for i in 0..n {
        for j in 0..n {
            let gij = g.at(i, j);
            let gji = g.at(j, i);
            let ok = match symmetry {
                Symmetry::Alternating => {
                    *gij == field.neg(gji) && (i != j || field.is_zero(gij))
                }
                Symmetry::Symmetric => gij == gji,
                Symmetry::Hermitian => *gij == field.frobenius(gji),
                Symmetry::SkewHermitian => *gij == field.neg(&field.frobenius(gji)),
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

fn shift_to_integral(
    raw: &crate::localring::RingElement,
    denom: i32,
) -> Result<crate::localring::RingElement> {
    if denom > 0 {
        raw.div_by_pi_pow(denom as u32)
            .map_err(|_| Error::ValuesNotIntegral("form value not integral where required".into()))
    } else {
        Ok(raw.mul_by_pi_pow((-denom) as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RigidityMode {
    /// 2e < ℓ-1 with (A-1)² ∈ m·End(S).
    SquareInMaximalIdeal,
    /// e < ℓ-1 with A-1 ∈ m·End(S).
    LinearInMaximalIdeal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RigidityOutcome {
    Pass,
    /// The entry (row, col) of A - 1 that is nonzero even though the
    /// hypotheses force A = 1. Reaching this means a bug somewhere.
    Fail { row: usize, col: usize },
}

/// Finite-order rigidity: under the mode's ramification bound and
/// congruence hypothesis, a finite-order automorphism is the identity.
/// Hypothesis failures are reported as `HypothesesUnmet`, never silently
/// asserted.
pub fn rigidity_check(a: &Mat, order: u64, mode: RigidityMode) -> Result<RigidityOutcome> {
    let ring = a.ring().clone();
    let n = a.rows();
    let id = Mat::identity(&ring, n);
    // finite order at working precision
    let mut pow = id.clone();
    for _ in 0..order {
        pow = pow.mul(a);
    }
    if !pow.eq_cert(&id) {
        return Err(Error::BadParameters(
            "matrix does not have the claimed finite order".into(),
        ));
    }
    let ell = ring.prime();
    let e = ring.e() as u64;
    let diff = a.sub(&id);
    let cond = match mode {
        RigidityMode::SquareInMaximalIdeal => {
            if 2 * e >= ell - 1 {
                return Err(Error::HypothesesUnmet(format!(
                    "2e = {} ≥ ℓ-1 = {}",
                    2 * e,
                    ell - 1
                )));
            }
            let sq = diff.mul(&diff);
            sq.min_valuation().is_none_or(|v| v >= 1)
        }
        RigidityMode::LinearInMaximalIdeal => {
            if e >= ell - 1 {
                return Err(Error::HypothesesUnmet(format!(
                    "e = {} ≥ ℓ-1 = {}",
                    e,
                    ell - 1
                )));
            }
            diff.min_valuation().is_none_or(|v| v >= 1)
        }
    };
    if !cond {
        return Err(Error::HypothesesUnmet(
            "congruence condition on A - 1 fails".into(),
        ));
    }
    for i in 0..n {
        for j in 0..n {
            if !diff.at(i, j).is_zero_cert() {
                return Ok(RigidityOutcome::Fail { row: i, col: j });
            }
        }
    }
    Ok(RigidityOutcome::Pass)
}

/// The perfect alternating pairing on O_K[ζ_ℓ] for the cyclotomic module:
/// f'(x, y) = η₁^{-1}·tr(x·η·conj(y)) on the ζ-power basis. Returns the
/// μ_ℓ representation, the standard lattice, and the form.
pub fn cyclotomic_unit_pairing(base: &Ring) -> Result<(Representation, Lattice, BilinearForm)> {
    let ell = base.prime();
    if base.e() != 1 {
        return Err(Error::BadParameters(
            "the cyclotomic pairing needs an unramified base".into(),
        ));
    }
    let mu = mu_ell_regular(ell, base)?;
    let m_ring = mu.m_ring.clone().unwrap();
    let n = (ell - 1) as usize;
    let zeta = m_ring.zeta()?;
    let eta = m_ring.uniformizer();
    // tr(ζ^i·η·conj(ζ^j)) = tr(η·ζ^{i-j}): one trace per power class
    let mut vals = Vec::with_capacity(ell as usize);
    let mut y = eta.clone();
    for _ in 0..ell {
        vals.push(y.trace_eisenstein_layer());
        y = y.mul(&zeta);
    }
    let lu = ell as usize;
    let gram = Mat::from_fn(base, n, n, |i, j| vals[(i + lu - j) % lu].clone());
    // η₁ = ℓ for an unramified base; the division is the form denominator
    let form = BilinearForm::new(gram, 1, Symmetry::Alternating)?;
    let lattice = Lattice::standard(base, n);
    if !mu.rep.form_invariant_on_all(&form)? {
        return Err(Error::RigidityViolation(
            "cyclotomic pairing is not μ_ℓ-invariant".into(),
        ));
    }
    Ok((mu.rep, lattice, form))
}

/// One block of the direct-sum pairing assembly.
pub enum PairingPart {
    /// A simple self-dual block with its invariant form; planes take any
    /// stable lattice with the standard pairing, larger blocks go through
    /// the unit-content rescaling.
    SelfDual {
        rep: Representation,
        form: BilinearForm,
        lattice: Lattice,
    },
    /// The exceptional K(ζ_ℓ) block.
    Cyclotomic { base: Ring },
    /// Two blocks that are isotropic but pair nondegenerately with each
    /// other through `cross`; the second block gets the dual-complement
    /// lattice {x : f(T_1, x) ⊆ O}.
    IsotropicPair {
        rep1: Representation,
        lattice1: Lattice,
        rep2: Representation,
        cross: Mat,
        cross_denom: i32,
    },
}

#[derive(Debug, Clone)]
pub struct Via43Outcome {
    pub lattice: Lattice,
    pub form: BilinearForm,
    pub rep: Representation,
    pub cert: PerfectCert,
    pub invariant: bool,
    pub hypotheses_met: bool,
    pub success: bool,
}

/// Assemble a perfect alternating invariant pairing from decomposition
/// blocks. The bound ℓ > d·e + 1 is checked and reported; when it fails
/// the construction still runs and failure is reported, not raised.
pub fn perfect_pairing_via_43(parts: Vec<PairingPart>) -> Result<Via43Outcome> {
    assert!(!parts.is_empty());
    let mut lattices = vec![];
    let mut reps: Vec<Representation> = vec![];
    let mut forms = vec![];
    for part in parts {
        match part {
            PairingPart::SelfDual { rep, form, lattice } => {
                let t = rep.stable_lattice(&lattice)?;
                if rep.dim() == 2 {
                    // any stable lattice with the standard plane pairing
                    let (binv, d) = inverse_with_denom(t.basis())?;
                    let j = Mat::from_i64(rep.ring(), &[&[0, 1], &[-1, 0]]);
                    let gram = binv.transpose().mul(&j).mul(&binv);
                    let denom = 2 * (d as i32 - t.denom());
                    let f = BilinearForm::new(gram, denom, Symmetry::Alternating)?;
                    forms.push(f);
                } else {
                    let f = normalize_form(&form, &t)?;
                    forms.push(f);
                }
                lattices.push(t);
                reps.push(rep);
            }
            PairingPart::Cyclotomic { base } => {
                let (rep, t, f) = cyclotomic_unit_pairing(&base)?;
                lattices.push(t);
                reps.push(rep);
                forms.push(f);
            }
            PairingPart::IsotropicPair {
                rep1,
                lattice1,
                rep2,
                cross,
                cross_denom,
            } => {
                let t1 = rep1.stable_lattice(&lattice1)?;
                if snf(&cross)?.rank < cross.rows() {
                    return Err(Error::DegenerateBlock(
                        "cross pairing of the isotropic pair is degenerate".into(),
                    ));
                }
                let ring = rep1.ring().clone();
                let n1 = t1.dim();
                // T_j = {x : f(T_1, x) ⊆ O}: its basis makes the cross
                // pairing with T_1 exactly the identity
                let cpair = t1.basis().transpose().mul(&cross);
                let (tj_basis, dj) = inverse_with_denom(&cpair)?;
                let conj_by = |images: &[Mat], b: &Mat| -> Result<Vec<Mat>> {
                    let (binv, bd) = inverse_with_denom(b)?;
                    images
                        .iter()
                        .map(|img| binv.mul(img).mul(b).div_by_pi_pow(bd))
                        .collect()
                };
                let imgs1 = conj_by(rep1.generator_images(), t1.basis())?;
                let imgs2 = conj_by(rep2.generator_images(), &tj_basis)?;
                let _ = (dj, cross_denom); // the unit cross Gram absorbs both
                let mut images = vec![];
                for (g1, g2) in imgs1.iter().zip(&imgs2) {
                    images.push(Mat::block_diag(&ring, &[g1.clone(), g2.clone()]));
                }
                let rep = Representation::new(rep1.group().clone(), ring.clone(), images, None)?;
                // in the adapted coordinates the block is a standard
                // hyperbolic space
                let mut gram = Mat::zero(&ring, 2 * n1, 2 * n1);
                for i in 0..n1 {
                    gram.set(i, n1 + i, ring.one());
                    gram.set(n1 + i, i, ring.from_i64(-1));
                }
                let f = BilinearForm::new(gram, 0, Symmetry::Alternating)?;
                lattices.push(Lattice::standard(&ring, 2 * n1));
                reps.push(rep);
                forms.push(f);
            }
        }
    }
    let ring = reps[0].ring().clone();
    let group = reps[0].group().clone();
    for r in &reps {
        if r.group() != &group {
            return Err(Error::DegenerateBlock(
                "pairing parts act through different groups".into(),
            ));
        }
    }
    // assemble block diagonals
    let n_gens = group.generators().len();
    let mut images = vec![];
    for gi in 0..n_gens {
        let blocks: Vec<Mat> = reps.iter().map(|r| r.generator_images()[gi].clone()).collect();
        images.push(Mat::block_diag(&ring, &blocks));
    }
    let rep = Representation::new(group, ring.clone(), images, None)?;
    let fdenom = forms.iter().map(|f| f.denom()).max().unwrap();
    let gram_blocks: Vec<Mat> = forms
        .iter()
        .map(|f| f.gram().mul_by_pi_pow((fdenom - f.denom()) as u32))
        .collect();
    let form = BilinearForm::new(
        Mat::block_diag(&ring, &gram_blocks),
        fdenom,
        Symmetry::Alternating,
    )?;
    let ldenom = lattices.iter().map(|t| t.denom()).max().unwrap();
    let basis_blocks: Vec<Mat> = lattices
        .iter()
        .map(|t| t.basis().mul_by_pi_pow((ldenom - t.denom()) as u32))
        .collect();
    let lattice = Lattice::from_generators(&Mat::block_diag(&ring, &basis_blocks), ldenom)?;
    let cert = form.is_perfect_on(&lattice)?;
    let invariant = rep.form_invariant_on_all(&form)?;
    let ell = ring.prime();
    let e = ring.e() as u64;
    let two_d = rep.dim() as u64;
    let hypotheses_met = ell > (two_d / 2) * e + 1;
    let success = cert.perfect && invariant;
    Ok(Via43Outcome {
        lattice,
        form,
        rep,
        cert,
        invariant,
        hypotheses_met,
        success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FiniteGroup, GroupFamily};
    use crate::reps::{quaternion_split, tensor_rep, trivial_rep};

    #[test]
    fn normalize_form_examples() {
        let ring = Ring::base(5, 32);
        let j = BilinearForm::standard_symplectic(&ring, 2);
        let t = Lattice::standard(&ring, 2);
        // already normalized: unchanged
        let n = normalize_form(&j, &t).unwrap();
        assert_eq!(n.denom(), j.denom());
        // ℓ·J is divided back down
        let lj = j.scaled_by_pi(1);
        let n = normalize_form(&lj, &t).unwrap();
        assert!(n.is_perfect_on(&t).unwrap().perfect);
    }

    #[test]
    fn stabilize_perfect_input_is_a_fixpoint() {
        let ring = Ring::base(5, 32);
        let j = BilinearForm::standard_symplectic(&ring, 2);
        let t = Lattice::standard(&ring, 2);
        let sp = stabilize_lattice(&t, &j, None).unwrap();
        assert_eq!(sp.iterations, 0);
        assert_eq!(sp.lattice, t);
        assert!(sp.dual_index_exponents.iter().all(|&e| e == 0));
    }

    #[test]
    fn stabilize_grows_strictly_on_a_scaled_summand() {
        // J ⊕ ℓ²·J on Z₅⁴: the loop must strictly enlarge the lattice and
        // land on a perfect fixpoint
        let ring = Ring::base(5, 32);
        let j2 = Mat::from_i64(&ring, &[&[0, 1], &[-1, 0]]);
        let gram = Mat::block_diag(&ring, &[j2.clone(), j2.scale_i64(25)]);
        let f = BilinearForm::new(gram, 0, Symmetry::Alternating).unwrap();
        let s = Lattice::standard(&ring, 4);
        let sp = stabilize_lattice(&s, &f, None).unwrap();
        assert!(sp.iterations >= 1);
        assert!(sp.lattice.contains(&s).unwrap());
        assert!(sp.lattice.index_total(&s).unwrap() > 0);
        assert!(sp.dual_index_exponents.iter().all(|&e| e <= 1));
        // this starting gap closes completely
        assert!(sp.form.is_perfect_on(&sp.lattice).unwrap().perfect);
    }

    #[test]
    fn reduce_embedding_for_q2_plane() {
        let (rep, form) = quaternion_split(5, 2, 32).unwrap();
        let t = Lattice::standard(rep.ring(), 2);
        let sp = stabilize_lattice(&t, &form, Some(&rep)).unwrap();
        let emb = reduce_embedding(&sp, &rep).unwrap();
        assert_eq!(emb.block_dims, (2, 0));
        assert!(emb.injective);
        assert!(emb.hypotheses_met);
        assert!(emb.verify_homomorphism(&rep));
        assert_eq!(emb.images.len(), 8);
    }

    #[test]
    fn reduce_embedding_preserves_charpolys_on_the_tensor_module() {
        let (rq, fq) = quaternion_split(5, 2, 32).unwrap();
        let mu = mu_ell_regular(5, rq.ring()).unwrap();
        let (rep, form) = tensor_rep(&rq, &mu.rep, &fq, &mu.form).unwrap();
        let s = Lattice::standard(rep.ring(), 8);
        let sp = stabilize_lattice(&s, &form, Some(&rep)).unwrap();
        // the tensor Gram has exponents {0,1}, so S is already a fixpoint
        assert_eq!(sp.iterations, 0);
        assert!(sp.dual_index_exponents.iter().any(|&e| e == 1));
        let emb = reduce_embedding(&sp, &rep).unwrap();
        assert!(emb.injective);
        assert!(emb.hypotheses_met);
        assert_eq!(emb.block_dims.0 + emb.block_dims.1, 8);
        assert!(emb.block_dims.1 > 0);
        assert_eq!(emb.charpoly_table.len(), 40);
        assert!(emb.verify_homomorphism(&rep));
    }

    #[test]
    fn normalize_recovers_the_eta_inverse_scaling() {
        // the raw pairing (x, y) ↦ tr(x·η·conj(y)) on O_M needs exactly one
        // division by the base uniformizer
        let base = Ring::base(5, 32);
        let m = Ring::cyclotomic_ell(&base).unwrap();
        let zeta = m.zeta().unwrap();
        let eta = m.uniformizer();
        let raw_gram = Mat::from_fn(&base, 4, 4, |i, j| {
            let x = zeta.pow(i as u64);
            let y = zeta.pow(j as u64).conj().unwrap();
            x.mul(&eta).mul(&y).trace_eisenstein_layer()
        });
        let raw = BilinearForm::new(raw_gram, 0, Symmetry::Alternating).unwrap();
        let t = Lattice::standard(&base, 4);
        let normalized = normalize_form(&raw, &t).unwrap();
        assert_eq!(normalized.denom() - raw.denom(), 1);
        assert!(normalized.is_perfect_on(&t).unwrap().perfect);
    }

    #[test]
    fn stabilization_commutes_with_scaling() {
        // T(πS, π^{-2}-rescaled f) = π·T(S, f)
        let ring = Ring::base(5, 32);
        let j2 = Mat::from_i64(&ring, &[&[0, 1], &[-1, 0]]);
        let gram = Mat::block_diag(&ring, &[j2.clone(), j2.scale_i64(25)]);
        let f = BilinearForm::new(gram, 0, Symmetry::Alternating).unwrap();
        let s = Lattice::standard(&ring, 4);
        let plain = stabilize_lattice(&s, &f, None).unwrap();
        let scaled = stabilize_lattice(&s.scaled_by_pi(1), &f.scaled_by_pi(-2), None).unwrap();
        assert_eq!(scaled.lattice, plain.lattice.scaled_by_pi(1));
        assert_eq!(scaled.dual_index_exponents, plain.dual_index_exponents);
    }

    #[test]
    fn hermitian_reduction_over_the_quadratic_layer() {
        // C₃ acting on the unramified quadratic module by ζ₃, hermitian
        // unit form: the reduction is hermitian over F₂₅ and injective
        let u = Ring::unramified(5, 3, 32).unwrap();
        let group = FiniteGroup::build(GroupFamily::Cyclic(3)).unwrap();
        let zeta3 = u.zeta().unwrap();
        let img = Mat::from_fn(&u, 1, 1, |_, _| zeta3.clone());
        let rep = Representation::new(group, u.clone(), vec![img], None).unwrap();
        let f = BilinearForm::new(Mat::identity(&u, 1), 0, Symmetry::Hermitian).unwrap();
        assert!(rep.form_invariant_on_all(&f).unwrap());
        let t = Lattice::standard(&u, 1);
        let sp = stabilize_lattice(&t, &f, Some(&rep)).unwrap();
        assert_eq!(sp.iterations, 0);
        let emb = reduce_embedding(&sp, &rep).unwrap();
        assert!(emb.hypotheses_met);
        assert!(emb.injective);
        assert_eq!(emb.block_dims, (1, 0));
        assert_eq!(emb.field.size(), 25);
        // charpoly of the generator is x - ζ̄₃ with ζ̄₃ of order 3 in F₂₅
        let cp = &emb.charpoly_table[1].1;
        assert_eq!(cp.len(), 2);
        let root = emb.field.neg(&cp[0]);
        assert_eq!(emb.field.order(&root), 3);
    }

    #[test]
    fn reduction_over_the_ramified_base_flags_the_bound() {
        // over K = Q₅(ζ₅ + ζ₅^{-1}) the bound 2e < ℓ-1 fails (4 = 4). The
        // embedding is computed anyway and the kernel enumerated: it is
        // genuinely nontrivial, which is the computational face of the
        // residue-level obstruction — an injective trace-preserving
        // reduction cannot exist on this module.
        let setting =
            crate::sharpness::build_counterexample(crate::sharpness::SettingKind::Thm66, 5, 2, 0, 32)
                .unwrap();
        let s = Lattice::standard(setting.rep.ring(), setting.rep.dim());
        let sp = stabilize_lattice(&s, &setting.form, Some(&setting.rep)).unwrap();
        let emb = reduce_embedding(&sp, &setting.rep).unwrap();
        assert!(!emb.hypotheses_met);
        assert!(!emb.injective);
        assert_eq!(emb.block_dims.0 + emb.block_dims.1, 4);
        assert_eq!(emb.images.len(), 40);
        // every kernel witness satisfies (A-1)² ∈ m·End but not
        // A-1 ∈ m·End, so neither rigidity mode is contradicted
        let group = setting.rep.group().clone();
        let mut kernel = 0;
        for (g, img) in &emb.images {
            if group.is_identity(g) || !img.is_identity() {
                continue;
            }
            kernel += 1;
            let a = setting.rep.image(g);
            let diff = a.sub(&Mat::identity(setting.rep.ring(), 4));
            let sq = diff.mul(&diff);
            assert!(sq.min_valuation().map_or(true, |v| v >= 1));
            assert!(diff.min_valuation() == Some(0));
        }
        assert!(kernel > 0);
    }

    #[test]
    fn rigidity_modes() {
        let ring = Ring::base(5, 32);
        let id = Mat::identity(&ring, 3);
        assert_eq!(
            rigidity_check(&id, 7, RigidityMode::SquareInMaximalIdeal).unwrap(),
            RigidityOutcome::Pass
        );
        // companion of Φ₅ over Z₁₁: (A-1)² is not in 11·End
        let ring11 = Ring::base(11, 32);
        let mut c = Mat::zero(&ring11, 4, 4);
        for i in 1..4 {
            c.set(i, i - 1, ring11.one());
        }
        for i in 0..4 {
            c.set(i, 3, ring11.from_i64(-1));
        }
        assert!(matches!(
            rigidity_check(&c, 5, RigidityMode::SquareInMaximalIdeal),
            Err(Error::HypothesesUnmet(_))
        ));
        // wrong order claim is a precondition failure
        assert!(rigidity_check(&c, 3, RigidityMode::SquareInMaximalIdeal).is_err());
    }

    #[test]
    fn cyclotomic_pairing_is_perfect_for_5_and_11() {
        for ell in [5u64, 11] {
            let base = Ring::base(ell, 32);
            let (rep, t, f) = cyclotomic_unit_pairing(&base).unwrap();
            let cert = f.is_perfect_on(&t).unwrap();
            assert!(cert.perfect, "ℓ = {}", ell);
            assert!(rep.form_invariant_on_all(&f).unwrap());
            // invariance under -1 as well: the Gram is even
            assert!(f
                .invariant_under(&Mat::identity(&base, (ell - 1) as usize).neg())
                .unwrap());
        }
    }

    #[test]
    fn via43_remark_44_plane() {
        let (rep, form) = quaternion_split(5, 2, 32).unwrap();
        let t = Lattice::standard(rep.ring(), 2);
        let out = perfect_pairing_via_43(vec![PairingPart::SelfDual {
            rep,
            form,
            lattice: t,
        }])
        .unwrap();
        assert!(out.success);
        assert!(out.cert.perfect);
        assert!(out.invariant);
        assert!(out.hypotheses_met); // ℓ = 5 > d·e + 1 = 2
    }

    #[test]
    fn via43_cyclotomic_branch_at_11() {
        let base = Ring::base(11, 32);
        let out = perfect_pairing_via_43(vec![PairingPart::Cyclotomic { base }]).unwrap();
        assert!(out.success);
        // ℓ = 11 = 2de + 1 with d = 5, e = 1: the bound ℓ > de + 1 holds
        assert!(out.hypotheses_met);
    }

    #[test]
    fn via43_hyperbolic_pair_of_trivial_lines() {
        let ring = Ring::base(5, 32);
        let g = FiniteGroup::build(GroupFamily::Cyclic(1)).unwrap();
        let r1 = trivial_rep(&g, &ring, 1).unwrap();
        let r2 = trivial_rep(&g, &ring, 1).unwrap();
        let cross = Mat::from_i64(&ring, &[&[3]]);
        let out = perfect_pairing_via_43(vec![PairingPart::IsotropicPair {
            rep1: r1,
            lattice1: Lattice::standard(&ring, 1),
            rep2: r2,
            cross,
            cross_denom: 0,
        }])
        .unwrap();
        assert!(out.success);
        assert_eq!(out.lattice.dim(), 2);
        // the assembled form is the standard symplectic plane
        assert!(out
            .form
            .gram()
            .eq_cert(&Mat::from_i64(&ring, &[&[0, 1], &[-1, 0]])));
    }
}
