//! Representations of the group families over tower rings: the standard
//! two-dimensional quaternion modules (split and non-split), the regular
//! module of μ_ℓ with its trace form, tensor and direct-sum assembly, the
//! invariant-form solver, stable-lattice averaging, characteristic
//! polynomials, and simplicity of the residue module.

use crate::error::{Error, Result};
use crate::groups::{Element, FiniteGroup, GroupFamily};
use crate::lattice::{BilinearForm, Lattice, Symmetry};
use crate::localring::{Ring, RingElement, RingKind};
use crate::mat::{inverse_with_denom, snf, Mat};
use crate::modp::{Fq, FqElt, FqMat};
use crate::padic::PadicInt;

/// Exhaustive residue search is used up to this many candidate vectors;
/// larger spaces fall back to spinning a basis.
const EXHAUSTIVE_VECTOR_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockKind {
    QuaternionPlane,
    MuRegular,
    Trivial,
    Tensor,
}

#[derive(Debug, Clone)]
pub struct Block {
    pub offset: usize,
    pub dim: usize,
    pub kind: BlockKind,
}

#[derive(Debug, Clone)]
pub struct Representation {
    group: FiniteGroup,
    ring: Ring,
    dim: usize,
    images: Vec<Mat>,
    decomposition: Option<Vec<Block>>,
}

impl Representation {
    /// Build and verify: generator images must satisfy every defining
    /// relation and be invertible.
    pub fn new(
        group: FiniteGroup,
        ring: Ring,
        images: Vec<Mat>,
        decomposition: Option<Vec<Block>>,
    ) -> Result<Representation> {
        assert_eq!(images.len(), group.generators().len());
        let dim = images.first().map_or(0, |m| m.rows());
        let rep = Representation {
            group,
            ring,
            dim,
            images,
            decomposition,
        };
        rep.check_relations()?;
        for img in &rep.images {
            let s = snf(img)?;
            if s.rank < rep.dim {
                return Err(Error::BadParameters(
                    "generator image is singular".into(),
                ));
            }
        }
        Ok(rep)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator_images(&self) -> &[Mat] {
        &self.images
    }

    pub fn decomposition(&self) -> Option<&[Block]> {
        self.decomposition.as_deref()
    }

    fn word_image(&self, word: &[(usize, u64)]) -> Mat {
        let mut acc = Mat::identity(&self.ring, self.dim);
        for &(gi, exp) in word {
            for _ in 0..exp {
                acc = acc.mul(&self.images[gi]);
            }
        }
        acc
    }

    pub fn image(&self, e: &Element) -> Mat {
        self.word_image(&self.group.generator_word(e))
    }

    /// Images of every group element, built by walking the Cayley graph so
    /// each element costs one matrix product. Ordered like `elements()`.
    pub fn image_table(&self) -> Vec<(Element, Mat)> {
        let gens = self.group.generators();
        let mut table: std::collections::HashMap<Element, Mat> = std::collections::HashMap::new();
        let id = self.group.identity();
        table.insert(id.clone(), Mat::identity(&self.ring, self.dim));
        let mut queue = vec![id];
        while let Some(g) = queue.pop() {
            let img_g = table.get(&g).unwrap().clone();
            for (k, gen) in gens.iter().enumerate() {
                let h = self.group.mul(&g, gen);
                if !table.contains_key(&h) {
                    table.insert(h.clone(), img_g.mul(&self.images[k]));
                    queue.push(h.clone());
                }
            }
        }
        self.group
            .elements()
            .into_iter()
            .map(|e| {
                let img = table.remove(&e).expect("generators generate the group");
                (e, img)
            })
            .collect()
    }

    pub fn check_relations(&self) -> Result<()> {
        for (lhs, rhs) in self.group.relations() {
            let l = self.word_image(&lhs);
            let r = self.word_image(&rhs);
            if !l.eq_cert(&r) {
                return Err(Error::BadParameters(
                    "generator images violate a defining relation".into(),
                ));
            }
        }
        Ok(())
    }

    /// Monic characteristic polynomial of ρ(g), ascending coefficients.
    pub fn char_poly(&self, e: &Element) -> Vec<RingElement> {
        self.image(e).charpoly()
    }

    /// Form invariance over every group element, not just generators.
    pub fn form_invariant_on_all(&self, f: &BilinearForm) -> Result<bool> {
        for (_, img) in self.image_table() {
            if !f.invariant_under(&img)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Σ_{g∈G} g·s0, the stable lattice by averaging; the result is checked
    /// stable under every generator.
    pub fn stable_lattice(&self, s0: &Lattice) -> Result<Lattice> {
        let mut gens: Option<Mat> = None;
        for (_, img) in self.image_table() {
            let moved = img.mul(s0.basis());
            gens = Some(match gens {
                None => moved,
                Some(g) => g.hstack(&moved),
            });
        }
        let t = Lattice::from_generators(&gens.unwrap(), s0.denom())?;
        for img in &self.images {
            let moved = Lattice::from_generators(&img.mul(t.basis()), t.denom())?;
            if moved != t {
                return Err(Error::BadParameters(
                    "averaged lattice is not stable".into(),
                ));
            }
        }
        Ok(t)
    }

    /// Basis of the space of G-invariant forms of the given symmetry, as
    /// primitive integral Gram matrices. Solved over the fraction field by
    /// Smith reduction and re-verified at certificate precision.
    pub fn invariant_forms(&self, symmetry: Symmetry) -> Result<Vec<Mat>> {
        let n = self.dim;
        // unknown index layout
        let mut unknowns: Vec<(usize, usize)> = vec![];
        match symmetry {
            Symmetry::Alternating => {
                for i in 0..n {
                    for j in i + 1..n {
                        unknowns.push((i, j));
                    }
                }
            }
            Symmetry::Symmetric => {
                for i in 0..n {
                    for j in i..n {
                        unknowns.push((i, j));
                    }
                }
            }
            _ => {
                return Err(Error::SymmetryMismatch(
                    "solver supports alternating and symmetric forms".into(),
                ))
            }
        }
        let sign = |i: usize, j: usize| -> (usize, i64) {
            // (unknown index, sign) for F[i][j]
            if i == j {
                if symmetry == Symmetry::Alternating {
                    return (usize::MAX, 0);
                }
                let k = unknowns.iter().position(|&(a, b)| (a, b) == (i, j)).unwrap();
                return (k, 1);
            }
            let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, if symmetry == Symmetry::Alternating { -1 } else { 1 }) };
            let k = unknowns.iter().position(|&(x, y)| (x, y) == (a, b)).unwrap();
            (k, s)
        };
        let rows = self.images.len() * n * n;
        let cols = unknowns.len();
        let mut system = Mat::zero(&self.ring, rows, cols);
        let mut row = 0;
        for g in &self.images {
            // (gᵀ F g - F)[a][b] = Σ_{i,j} g[i][a] g[j][b] F[i][j] - F[a][b]
            for a in 0..n {
                for b in 0..n {
                    for i in 0..n {
                        let gia = g.at(i, a);
                        if gia.is_zero() {
                            continue;
                        }
                        for j in 0..n {
                            let (k, s) = sign(i, j);
                            if s == 0 {
                                continue;
                            }
                            let term = gia.mul(g.at(j, b)).mul_i64(s);
                            let cur = system.at(row, k).add(&term);
                            system.set(row, k, cur);
                        }
                    }
                    let (k, s) = sign(a, b);
                    if s != 0 {
                        let cur = system.at(row, k).sub(&self.ring.from_i64(s));
                        system.set(row, k, cur);
                    }
                    row += 1;
                }
            }
        }
        let s = snf(&system)?;
        let mut basis = vec![];
        for jcol in s.rank..cols {
            let v = s.right.col(jcol);
            // primitive integral representative
            let minval = v
                .iter()
                .filter_map(|c| c.valuation())
                .min()
                .ok_or_else(|| Error::PrecisionExhausted("zero kernel vector".into()))?;
            let mut gram = Mat::zero(&self.ring, n, n);
            for (k, &(i, j)) in unknowns.iter().enumerate() {
                let c = v[k].div_by_pi_pow(minval)?.cert_truncated();
                gram.set(i, j, c.clone());
                if i != j {
                    let mirrored = if symmetry == Symmetry::Alternating {
                        c.neg()
                    } else {
                        c
                    };
                    gram.set(j, i, mirrored);
                }
            }
            // re-verify invariance at certificate precision
            for g in &self.images {
                let lhs = g.transpose().mul(&gram).mul(g);
                if !lhs.eq_cert(&gram) {
                    return Err(Error::PrecisionExhausted(
                        "kernel vector fails invariance at certificate precision".into(),
                    ));
                }
            }
            basis.push(gram);
        }
        Ok(basis)
    }

    /// Simplicity of T/mT as a module over the residue field: exhaustive
    /// cyclic-submodule search when the vector count is small, spinning a
    /// basis otherwise.
    pub fn is_simple_mod_m(&self, t: &Lattice) -> Result<bool> {
        let field = self.ring.residue_field();
        let n = self.dim;
        let (binv, dinv) = inverse_with_denom(t.basis())?;
        let mut res_images = vec![];
        for img in &self.images {
            let conj = binv.mul(img).mul(t.basis());
            let int = conj.div_by_pi_pow(dinv)?;
            res_images.push(int.to_residue());
        }
        let count = field.size().checked_pow(n as u32).ok_or_else(|| {
            Error::TooLarge(format!("residue space F_{}^{}", field.size(), n))
        })?;
        if count <= EXHAUSTIVE_VECTOR_LIMIT {
            let vectors = enumerate_vectors(&field, n);
            for v in vectors {
                if v.iter().all(|c| field.is_zero(c)) {
                    continue;
                }
                if spin_dimension(&field, &res_images, &v) < n {
                    return Ok(false);
                }
            }
            Ok(true)
        } else if n <= 8 {
            // heuristic: spin the standard basis
            for i in 0..n {
                let mut v = vec![field.zero(); n];
                v[i] = field.one();
                if spin_dimension(&field, &res_images, &v) < n {
                    return Ok(false);
                }
            }
            Ok(true)
        } else {
            Err(Error::TooLarge(format!(
                "residue search space F_{}^{} exceeds the configured bound",
                field.size(),
                n
            )))
        }
    }
}

fn enumerate_vectors(field: &Fq, n: usize) -> Vec<Vec<FqElt>> {
    let elems = field.elements();
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * elems.len());
        for prefix in &out {
            for e in &elems {
                let mut v: Vec<FqElt> = prefix.clone();
                v.push(e.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Dimension of the submodule generated by v under the given matrices.
fn spin_dimension(field: &Fq, images: &[FqMat], v: &[FqElt]) -> usize {
    let n = v.len();
    let mut rows = FqMat::zero(field, 0, n);
    let mut queue = vec![v.to_vec()];
    let mut dim = 0;
    while let Some(w) = queue.pop() {
        // try to extend the row space by w
        let prev = rows.rows;
        let mut cand = FqMat::zero(field, prev + 1, n);
        for i in 0..prev {
            for j in 0..n {
                cand.set(i, j, rows.at(i, j).clone());
            }
        }
        for (j, c) in w.iter().enumerate() {
            cand.set(prev, j, c.clone());
        }
        let r = cand.rank();
        if r > dim {
            dim = r;
            rows = cand;
            if dim == n {
                return n;
            }
            for img in images {
                queue.push(img.apply(&w));
            }
        }
    }
    dim
}

// ---- standard constructions ---------------------------------------------

/// The split two-dimensional quaternion module: needs ζ_q ∈ Z_ℓ, i.e.
/// q | ℓ-1, with q = 4 for p = 2 and q = p for odd p. Images land in
/// SL_2(Z_ℓ) and preserve the standard symplectic form.
pub fn quaternion_split(ell: u64, p: u64, precision: u32) -> Result<(Representation, BilinearForm)> {
    let q = if p == 2 { 4 } else { p };
    if ell == p || ell == 2 {
        return Err(Error::BadParameters("need an odd prime ℓ ≠ p".into()));
    }
    if !(ell - 1).is_multiple_of(q) {
        return Err(Error::BadParameters(format!(
            "split construction needs ℓ ≡ 1 mod {}, got ℓ = {}",
            q, ell
        )));
    }
    let helper = Ring::unramified(ell, q, precision)?;
    assert_eq!(helper.f(), 1);
    let zeta_q: PadicInt = helper.zeta()?.coords()[0].clone();
    let base = Ring::base(ell, precision);
    let z = base.from_padic(&zeta_q);
    let zinv = z.invert()?;
    let m = if p == 2 { 2 } else { p };
    let group = FiniteGroup::build(GroupFamily::Quaternion(m))?;
    // a ↦ diag(ζ_q, ζ_q^{-1}) for p = 2 (order 4), -diag(ζ_p, ζ_p^{-1}) for odd p
    let mut a_img = Mat::zero(&base, 2, 2);
    if p == 2 {
        a_img.set(0, 0, z);
        a_img.set(1, 1, zinv);
    } else {
        a_img.set(0, 0, z.neg());
        a_img.set(1, 1, zinv.neg());
    }
    let b_img = Mat::from_i64(&base, &[&[0, -1], &[1, 0]]);
    let rep = Representation::new(
        group,
        base.clone(),
        vec![a_img, b_img],
        Some(vec![Block {
            offset: 0,
            dim: 2,
            kind: BlockKind::QuaternionPlane,
        }]),
    )?;
    let form = BilinearForm::standard_symplectic(&base, 2);
    Ok((rep, form))
}

/// The non-split quaternion module over Q_ℓ: W = Q_ℓ(ζ_q) with ζ_q acting
/// by multiplication and τ(x) = α·σ(x) for a norm-(-1) element α of the
/// unramified quadratic extension. Needs ℓ ≡ -1 mod q.
pub fn quaternion_nonsplit(
    ell: u64,
    p: u64,
    precision: u32,
) -> Result<(Representation, BilinearForm)> {
    let q = if p == 2 { 4 } else { p };
    if ell == p || ell == 2 {
        return Err(Error::BadParameters("need an odd prime ℓ ≠ p".into()));
    }
    if !(ell + 1).is_multiple_of(q) || (ell - 1).is_multiple_of(q) {
        return Err(Error::BadParameters(format!(
            "non-split construction needs ℓ ≡ -1 mod {}, got ℓ = {}",
            q, ell
        )));
    }
    let u_ring = Ring::unramified(ell, q, precision)?;
    if u_ring.f() != 2 {
        return Err(Error::BadParameters(
            "quadratic unramified extension expected".into(),
        ));
    }
    let alpha = solve_norm_minus_one(&u_ring)?;
    let base = Ring::base(ell, precision);
    let zeta = u_ring.zeta()?;
    // matrix of multiplication by ζ_q on the basis {1, u}
    let mult_mat = |x: &RingElement| -> Mat {
        let u = u_ring.gen_u();
        let c0 = x.clone();
        let c1 = x.mul(&u);
        Mat::from_fn(&base, 2, 2, |i, j| {
            let col = if j == 0 { &c0 } else { &c1 };
            base.from_padic(&col.coords()[i])
        })
    };
    let zmat = mult_mat(&zeta);
    // τ: x ↦ α σ(x); columns are α·σ(1) and α·σ(u)
    let tau_cols = [
        alpha.clone(),
        alpha.mul(&u_ring.gen_u().conj()?),
    ];
    let tau = Mat::from_fn(&base, 2, 2, |i, j| base.from_padic(&tau_cols[j].coords()[i]));
    let m = if p == 2 { 2 } else { p };
    let group = FiniteGroup::build(GroupFamily::Quaternion(m))?;
    let a_img = if p == 2 { zmat } else { zmat.neg() };
    let rep = Representation::new(
        group,
        base.clone(),
        vec![a_img, tau],
        Some(vec![Block {
            offset: 0,
            dim: 2,
            kind: BlockKind::QuaternionPlane,
        }]),
    )?;
    let form = BilinearForm::standard_symplectic(&base, 2);
    Ok((rep, form))
}

/// Dispatch on ℓ mod q between the split and non-split constructions.
pub fn quaternion_auto(ell: u64, p: u64, precision: u32) -> Result<(Representation, BilinearForm)> {
    let q = if p == 2 { 4 } else { p };
    if (ell - 1).is_multiple_of(q) {
        quaternion_split(ell, p, precision)
    } else if (ell + 1).is_multiple_of(q) {
        quaternion_nonsplit(ell, p, precision)
    } else {
        Err(Error::BadParameters(format!(
            "ℓ = {} is neither 1 nor -1 mod {}; module not realizable in rank 2 over Q_ℓ",
            ell, q
        )))
    }
}

/// α ∈ O_U with α·σ(α) = -1, found on the residue field and lifted
/// multiplicatively.
pub fn solve_norm_minus_one(u_ring: &Ring) -> Result<RingElement> {
    if u_ring.f() != 2 || !u_ring.has_conj() {
        return Err(Error::BadParameters(
            "norm equation needs the unramified quadratic ring".into(),
        ));
    }
    let field = u_ring.residue_field();
    let ell = u_ring.prime();
    let mut seed = None;
    for cand in field.elements() {
        if field.is_zero(&cand) {
            continue;
        }
        let norm = field.mul(&cand, &field.pow(&cand, ell as u128));
        if norm == field.from_u64(ell - 1) {
            seed = Some(cand);
            break;
        }
    }
    let seed = seed.ok_or_else(|| Error::BadParameters("no norm -1 residue".into()))?;
    let mut alpha = u_ring.from_coords(
        seed.iter()
            .map(|&c| PadicInt::from_i64(ell, u_ring.work_precision(), c as i64))
            .collect(),
    );
    let half = PadicInt::from_i64(ell, u_ring.work_precision(), 2).invert()?;
    for _ in 0..u_ring.work_precision() {
        let norm = alpha.mul(&alpha.conj()?);
        let d = norm.add(&u_ring.one());
        if d.is_zero() {
            break;
        }
        // α ← α (1 + d/2): the norm error is squared each round
        let corr = u_ring.one().add(&d.mul_padic(&half));
        alpha = alpha.mul(&corr);
    }
    let check = alpha.mul(&alpha.conj()?).add(&u_ring.one());
    if !check.is_zero() {
        return Err(Error::PrecisionExhausted("norm lift did not converge".into()));
    }
    Ok(alpha)
}

/// The regular module of μ_ℓ over the base ring, in the ζ-power basis,
/// with the symmetric trace form f₂(x, y) = tr(x·conj(y)).
pub struct MuRegular {
    pub rep: Representation,
    pub form: BilinearForm,
    /// The ring O_K[ζ_ℓ] used for trace computations; absent over a real
    /// cyclotomic base where the quadratic module is handled directly.
    pub m_ring: Option<Ring>,
}

pub fn mu_ell_regular(ell: u64, base: &Ring) -> Result<MuRegular> {
    assert_eq!(base.prime(), ell);
    let group = FiniteGroup::build(GroupFamily::Mu(ell))?;
    match base.kind() {
        RingKind::Base | RingKind::Unramified { .. } => {
            let m_ring = Ring::cyclotomic_ell(base)?;
            let n = (ell - 1) as usize;
            // companion matrix of Φ_ℓ
            let mut c = Mat::zero(base, n, n);
            for i in 1..n {
                c.set(i, i - 1, base.one());
            }
            for i in 0..n {
                c.set(i, n - 1, base.from_i64(-1));
            }
            let zeta = m_ring.zeta()?;
            // tr(ζ^i·conj(ζ^j)) = tr(ζ^{i-j}): one trace per power class
            let mut tr_k = Vec::with_capacity(ell as usize);
            let mut zp = m_ring.one();
            for _ in 0..ell {
                tr_k.push(zp.trace_eisenstein_layer());
                zp = zp.mul(&zeta);
            }
            let lu = ell as usize;
            let gram = Mat::from_fn(base, n, n, |i, j| tr_k[(i + lu - j) % lu].clone());
            let rep = Representation::new(
                group,
                base.clone(),
                vec![c],
                Some(vec![Block {
                    offset: 0,
                    dim: n,
                    kind: BlockKind::MuRegular,
                }]),
            )?;
            let form = BilinearForm::new(gram, 0, Symmetry::Symmetric)?;
            Ok(MuRegular {
                rep,
                form,
                m_ring: Some(m_ring),
            })
        }
        RingKind::RealCyclotomicEll => {
            // M = K(ζ_ℓ) is quadratic over K: basis {1, ζ}, ζ² = cζ - 1
            let c = base.zeta_plus_inverse()?;
            let mut gen = Mat::zero(base, 2, 2);
            gen.set(0, 1, base.from_i64(-1));
            gen.set(1, 0, base.one());
            gen.set(1, 1, c.clone());
            let mut gram = Mat::zero(base, 2, 2);
            gram.set(0, 0, base.from_i64(2));
            gram.set(0, 1, c.clone());
            gram.set(1, 0, c.clone());
            gram.set(1, 1, base.from_i64(2));
            let rep = Representation::new(
                group,
                base.clone(),
                vec![gen],
                Some(vec![Block {
                    offset: 0,
                    dim: 2,
                    kind: BlockKind::MuRegular,
                }]),
            )?;
            let form = BilinearForm::new(gram, 0, Symmetry::Symmetric)?;
            Ok(MuRegular {
                rep,
                form,
                m_ring: None,
            })
        }
        RingKind::CyclotomicEll => Err(Error::BadParameters(
            "base already contains ζ_ℓ".into(),
        )),
    }
}

/// The trivial n-dimensional module of a group.
pub fn trivial_rep(group: &FiniteGroup, ring: &Ring, n: usize) -> Result<Representation> {
    let images = vec![Mat::identity(ring, n); group.generators().len()];
    Representation::new(
        group.clone(),
        ring.clone(),
        images,
        Some(vec![Block {
            offset: 0,
            dim: n,
            kind: BlockKind::Trivial,
        }]),
    )
}

/// Kronecker product of an N-module with a μ_ℓ-module: the group is
/// N × μ_ℓ, the form is f₁ ⊗ f₂. Requires f₁ alternating and f₂
/// symmetric, so the product is alternating; invariance is checked on
/// every element of the product group.
pub fn tensor_rep(
    r1: &Representation,
    r2: &Representation,
    f1: &BilinearForm,
    f2: &BilinearForm,
) -> Result<(Representation, BilinearForm)> {
    if f1.symmetry() != Symmetry::Alternating || f2.symmetry() != Symmetry::Symmetric {
        return Err(Error::SymmetryMismatch(
            "tensor expects an alternating f₁ and a symmetric f₂".into(),
        ));
    }
    assert!(r1.ring() == r2.ring(), "mixed base rings");
    let fam1 = r1.group().family().clone();
    let fam2 = r2.group().family().clone();
    let group = FiniteGroup::build(GroupFamily::Product(vec![fam1, fam2]))?;
    let d2 = r2.dim();
    let d1 = r1.dim();
    let id1 = Mat::identity(r1.ring(), d1);
    let id2 = Mat::identity(r1.ring(), d2);
    let mut images = vec![];
    for g in r1.generator_images() {
        images.push(g.kron(&id2));
    }
    for h in r2.generator_images() {
        images.push(id1.kron(h));
    }
    let rep = Representation::new(
        group,
        r1.ring().clone(),
        images,
        Some(vec![Block {
            offset: 0,
            dim: d1 * d2,
            kind: BlockKind::Tensor,
        }]),
    )?;
    let gram = f1.gram().kron(f2.gram());
    let form = BilinearForm::new(gram, f1.denom() + f2.denom(), Symmetry::Alternating)?;
    if !rep.form_invariant_on_all(&form)? {
        return Err(Error::BadParameters(
            "tensor form is not invariant on the full group".into(),
        ));
    }
    Ok((rep, form))
}

/// Block-diagonal sum of representations of the same group with their
/// forms; decomposition metadata records the blocks.
pub fn direct_sum_rep(
    parts: &[(Representation, BilinearForm)],
) -> Result<(Representation, BilinearForm)> {
    assert!(!parts.is_empty());
    let group = parts[0].0.group().clone();
    let ring = parts[0].0.ring().clone();
    let symmetry = parts[0].1.symmetry();
    let denom = parts.iter().map(|(_, f)| f.denom()).max().unwrap();
    for (r, f) in parts {
        assert!(r.group() == &group, "mixed groups in direct sum");
        assert!(r.ring() == &ring, "mixed rings in direct sum");
        if f.symmetry() != symmetry {
            return Err(Error::SymmetryMismatch(
                "direct sum needs a uniform symmetry type".into(),
            ));
        }
    }
    let n_gens = group.generators().len();
    let mut images = vec![];
    for gi in 0..n_gens {
        let blocks: Vec<Mat> = parts
            .iter()
            .map(|(r, _)| r.generator_images()[gi].clone())
            .collect();
        images.push(Mat::block_diag(&ring, &blocks));
    }
    let gram_blocks: Vec<Mat> = parts
        .iter()
        .map(|(_, f)| f.gram().mul_by_pi_pow((denom - f.denom()) as u32))
        .collect();
    let gram = Mat::block_diag(&ring, &gram_blocks);
    let mut blocks = vec![];
    let mut off = 0;
    for (r, _) in parts {
        let kind = r
            .decomposition()
            .and_then(|d| d.first())
            .map(|b| b.kind.clone())
            .unwrap_or(BlockKind::Tensor);
        blocks.push(Block {
            offset: off,
            dim: r.dim(),
            kind,
        });
        off += r.dim();
    }
    let rep = Representation::new(group, ring, images, Some(blocks))?;
    let form = BilinearForm::new(gram, denom, symmetry)?;
    Ok((rep, form))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_quaternion_at_five() {
        let (rep, form) = quaternion_split(5, 2, 32).unwrap();
        assert_eq!(rep.dim(), 2);
        assert_eq!(rep.group().order(), 8);
        // ζ_4 = 7 mod 25 sits in the corner of the a-image
        let a = &rep.generator_images()[0];
        assert_eq!(
            a.at(0, 0).coords()[0].reduced_residue(2),
            num_bigint::BigUint::from(7u32)
        );
        assert!(rep.form_invariant_on_all(&form).unwrap());
        // b has characteristic polynomial x² + 1
        let b = vec![0u32, 1];
        let cp = rep.char_poly(&b);
        let base = rep.ring().clone();
        assert!(cp[0].sub(&base.one()).is_zero_cert());
        assert!(cp[1].is_zero_cert());
        assert!(cp[2].sub(&base.one()).is_zero_cert());
        // central -1 has characteristic polynomial (x+1)²
        let center = vec![2u32, 0];
        let cc = rep.char_poly(&center);
        assert!(cc[0].sub(&base.one()).is_zero_cert());
        assert!(cc[1].sub(&base.from_i64(2)).is_zero_cert());
    }

    #[test]
    fn nonsplit_quaternion_at_seven() {
        let (rep, form) = quaternion_nonsplit(7, 2, 32).unwrap();
        assert_eq!(rep.dim(), 2);
        assert_eq!(rep.group().order(), 8);
        assert!(rep.form_invariant_on_all(&form).unwrap());
        // τ² = -1 and τ ζ τ^{-1} = ζ^{-1} hold by the relation check; the
        // image of b must have det 1 (it lies in SL₂)
        let tau = &rep.generator_images()[1];
        let det = tau
            .at(0, 0)
            .mul(tau.at(1, 1))
            .sub(&tau.at(0, 1).mul(tau.at(1, 0)));
        assert!(det.sub(&rep.ring().one()).is_zero_cert());
    }

    #[test]
    fn norm_minus_one_over_z7i() {
        let u = Ring::unramified(7, 4, 32).unwrap();
        let alpha = solve_norm_minus_one(&u).unwrap();
        let n = alpha.mul(&alpha.conj().unwrap());
        assert!(n.add(&u.one()).is_zero());
    }

    #[test]
    fn mu_regular_over_q5() {
        let base = Ring::base(5, 32);
        let mu = mu_ell_regular(5, &base).unwrap();
        assert_eq!(mu.rep.dim(), 4);
        // generator image is the companion matrix of Φ₅
        let g = vec![1u32];
        let cp = mu.rep.char_poly(&g);
        for c in cp.iter() {
            assert!(c.sub(&base.one()).is_zero_cert());
        }
        assert!(mu.rep.form_invariant_on_all(&mu.form).unwrap());
        // trace Gram: diagonal 4, off-diagonal -1
        let gram = mu.form.gram();
        assert!(gram.at(0, 0).sub(&base.from_i64(4)).is_zero_cert());
        assert!(gram.at(0, 1).sub(&base.from_i64(-1)).is_zero_cert());
    }

    #[test]
    fn mu_regular_over_real_cyclotomic() {
        let base = Ring::real_cyclotomic_ell(&Ring::base(5, 32)).unwrap();
        let mu = mu_ell_regular(5, &base).unwrap();
        assert_eq!(mu.rep.dim(), 2);
        assert!(mu.rep.form_invariant_on_all(&mu.form).unwrap());
        // det of the Gram has valuation 1 (the ramified quadratic layer)
        let g = mu.form.gram();
        let det = g.at(0, 0).mul(g.at(1, 1)).sub(&g.at(0, 1).mul(g.at(1, 0)));
        assert_eq!(det.val_ext().unwrap(), 1);
    }

    #[test]
    fn invariant_form_spaces_for_q2() {
        let (rep, _) = quaternion_split(5, 2, 32).unwrap();
        let alt = rep.invariant_forms(Symmetry::Alternating).unwrap();
        assert_eq!(alt.len(), 1);
        // the solution is the standard symplectic form up to a unit
        let f = BilinearForm::new(alt[0].clone(), 0, Symmetry::Alternating).unwrap();
        assert!(rep.form_invariant_on_all(&f).unwrap());
        assert!(f.is_perfect_on(&Lattice::standard(rep.ring(), 2)).unwrap().perfect);
        let sym = rep.invariant_forms(Symmetry::Symmetric).unwrap();
        assert_eq!(sym.len(), 0);
    }

    #[test]
    fn invariant_forms_of_trivial_group() {
        let base = Ring::base(5, 32);
        let g = FiniteGroup::build(GroupFamily::Cyclic(1)).unwrap();
        let rep = trivial_rep(&g, &base, 2).unwrap();
        assert_eq!(rep.invariant_forms(Symmetry::Alternating).unwrap().len(), 1);
        assert_eq!(rep.invariant_forms(Symmetry::Symmetric).unwrap().len(), 3);
    }

    #[test]
    fn tensor_of_q2_and_mu5() {
        let (rq, fq) = quaternion_split(5, 2, 32).unwrap();
        let base = rq.ring().clone();
        let mu = mu_ell_regular(5, &base).unwrap();
        let (rep, form) = tensor_rep(&rq, &mu.rep, &fq, &mu.form).unwrap();
        assert_eq!(rep.dim(), 8);
        assert_eq!(rep.group().order(), 40);
        assert_eq!(form.symmetry(), Symmetry::Alternating);
        // Gram factorizes as the Kronecker product
        assert!(form
            .gram()
            .eq_cert(&fq.gram().kron(mu.form.gram())));
        // tensor with the wrong symmetry is rejected
        assert!(matches!(
            tensor_rep(&rq, &mu.rep, &mu.form, &fq),
            Err(Error::SymmetryMismatch(_))
        ));
    }

    #[test]
    fn stable_lattice_examples() {
        let (rep, _) = quaternion_split(5, 2, 32).unwrap();
        let s0 = Lattice::standard(rep.ring(), 2);
        // integral images: already stable
        assert_eq!(rep.stable_lattice(&s0).unwrap(), s0);
        // trivial group: any lattice is stable
        let g = FiniteGroup::build(GroupFamily::Cyclic(1)).unwrap();
        let triv = trivial_rep(&g, rep.ring(), 2).unwrap();
        let skew = Lattice::from_generators(
            &Mat::from_i64(rep.ring(), &[&[5, 2], &[0, 1]]),
            0,
        )
        .unwrap();
        assert_eq!(triv.stable_lattice(&skew).unwrap(), skew);
    }

    #[test]
    fn mu5_stable_lattices_are_eta_powers() {
        // averaging a random lattice under μ₅ gives an O_M-stable lattice,
        // which must be η^r·(a ζ-power-basis lattice image)
        let base = Ring::base(5, 32);
        let mu = mu_ell_regular(5, &base).unwrap();
        let s0 = Lattice::from_generators(
            &Mat::from_i64(&base, &[&[1, 2, 0, 5], &[0, 5, 1, 1], &[0, 0, 25, 3], &[0, 0, 0, 1]]),
            0,
        )
        .unwrap();
        let t = mu.rep.stable_lattice(&s0).unwrap();
        let om = Lattice::standard(&base, 4);
        // compare against η^r O_M for small r (η acts by C - C^{-1})
        let c = &mu.rep.generator_images()[0];
        let (cinv, d0) = inverse_with_denom(c).unwrap();
        assert_eq!(d0, 0);
        let eta = c.sub(&cinv);
        let mut matched = false;
        for r in -4i32..=4 {
            let cand = if r >= 0 {
                let mut gens = om.basis().clone();
                for _ in 0..r {
                    gens = eta.mul(&gens);
                }
                Lattice::from_generators(&gens, 0).unwrap()
            } else {
                // η^{-1} = η^{ℓ-2}·(η^{ℓ-1})^{-1} and η^{ℓ-1} = 5·unit
                let mut gens = om.basis().clone();
                for _ in 0..(-r) {
                    gens = eta.mul(&gens);
                }
                Lattice::from_generators(&gens, -r).unwrap()
            };
            if cand == t {
                matched = true;
                break;
            }
        }
        assert!(matched, "stable lattice is not an η-power of O_M");
    }

    #[test]
    fn simplicity_of_residue_modules() {
        let (rep, _) = quaternion_split(5, 2, 32).unwrap();
        let t = Lattice::standard(rep.ring(), 2);
        assert!(rep.is_simple_mod_m(&t).unwrap());
        // a direct sum of two copies is not simple
        let f = BilinearForm::standard_symplectic(rep.ring(), 2);
        let (sum_rep, _) = direct_sum_rep(&[(rep.clone(), f.clone()), (rep, f)]).unwrap();
        let t4 = Lattice::standard(sum_rep.ring(), 4);
        assert!(!sum_rep.is_simple_mod_m(&t4).unwrap());
        // trivial one-dimensional module is simple
        let base = Ring::base(5, 32);
        let g = FiniteGroup::build(GroupFamily::Cyclic(1)).unwrap();
        let triv = trivial_rep(&g, &base, 1).unwrap();
        assert!(triv.is_simple_mod_m(&Lattice::standard(&base, 1)).unwrap());
    }

    #[test]
    fn direct_sum_charpolys_multiply() {
        let (rep, f) = quaternion_split(5, 2, 32).unwrap();
        // a single part is the part itself
        let (single, _) = direct_sum_rep(&[(rep.clone(), f.clone())]).unwrap();
        assert_eq!(single.dim(), 2);
        let g = vec![1u32, 0];
        assert!(single.image(&g).eq_cert(&rep.image(&g)));
        // char poly of the sum is the product of the parts'
        let (sum_rep, _) = direct_sum_rep(&[(rep.clone(), f.clone()), (rep.clone(), f)]).unwrap();
        let cp2 = rep.char_poly(&g);
        let cp4 = sum_rep.char_poly(&g);
        let ring = rep.ring().clone();
        let mut prod = vec![ring.zero(); 5];
        for (i, a) in cp2.iter().enumerate() {
            for (j, b) in cp2.iter().enumerate() {
                prod[i + j] = prod[i + j].add(&a.mul(b));
            }
        }
        for (want, got) in prod.iter().zip(&cp4) {
            assert!(want.sub(got).is_zero_cert());
        }
    }

    #[test]
    fn oversized_residue_search_is_rejected() {
        let base = Ring::base(5, 32);
        let g = FiniteGroup::build(GroupFamily::Cyclic(1)).unwrap();
        let rep = trivial_rep(&g, &base, 9).unwrap();
        let t = Lattice::standard(&base, 9);
        assert!(matches!(
            rep.is_simple_mod_m(&t),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn perfectness_from_simplicity() {
        // |N| prime to ℓ, simple residue module, f(T,T) = O_K ⟹ perfect
        for (ell, p) in [(5u64, 2u64), (7, 2), (5, 3)] {
            let (rep, form) = quaternion_auto(ell, p, 32).unwrap();
            let t = Lattice::standard(rep.ring(), 2);
            assert!(rep.is_simple_mod_m(&t).unwrap());
            let cert = form.is_perfect_on(&t).unwrap();
            assert!(cert.perfect);
        }
    }

    #[test]
    fn companion_of_phi_ell_meets_the_dimension_bound() {
        // a non-scalar matrix with scalar ℓ-th power has size ≥ (ℓ-1)/e
        let base = Ring::base(5, 32);
        let mu = mu_ell_regular(5, &base).unwrap();
        let c = &mu.rep.generator_images()[0];
        let c5 = c.mul(c).mul(c).mul(c).mul(c);
        assert!(c5.eq_cert(&Mat::identity(&base, 4)));
        assert!(!c.eq_cert(&Mat::identity(&base, 4)));
        assert_eq!(c.rows(), 4); // = (5-1)/1, the bound with equality
    }
}
