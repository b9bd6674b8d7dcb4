//! Towers of local rings over Z_ℓ: an unramified layer U = Z_ℓ[u]/(h_u)
//! followed by an Eisenstein layer O = U[π]/(g).
//!
//! Elements carry coordinates in the tower basis {u^i π^j}. The ring keeps
//! two digit counts: `precision` (N, what certificates and comparisons are
//! stated at) and `work_precision` (N plus guard digits, what coordinate
//! arithmetic runs at). Divisions by uniformizer powers consume top digits;
//! the guard keeps everything below N exact for the exponent budgets that
//! occur here.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::modp::{Fq, FqElt, ModPoly};
use crate::padic::{hensel_root, PadicInt};
use crate::poly::{compose_linear_flip, IntPoly};

/// Guard digits between certificate precision and working precision.
pub const PRECISION_GUARD: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingKind {
    /// Z_ℓ itself.
    Base,
    /// Z_ℓ[ζ_n], ℓ ∤ n.
    Unramified { n: u64 },
    /// O_K[ζ_ℓ] over an unramified K; internally generated by t = 1 - ζ_ℓ.
    CyclotomicEll,
    /// O_K[ζ_ℓ + ζ_ℓ^{-1}]; internally generated by 2 - (ζ_ℓ + ζ_ℓ^{-1}).
    RealCyclotomicEll,
}

#[derive(Debug)]
enum ConjData {
    /// Order-2 automorphism of a quadratic unramified layer: u ↦ -h_1 - u.
    UnramFrob,
    /// ζ_ℓ ↦ ζ_ℓ^{-1}, fixing the unramified layer; stores the powers of
    /// the image of the Eisenstein generator.
    CycloInvert { t_conj_pows: Vec<Coords> },
}

type Coords = Vec<PadicInt>; // length f·e, index i + f*j for u^i π^j

#[derive(Debug)]
struct RingInner {
    prime: u64,
    precision: u32,
    work_precision: u32,
    kind: RingKind,
    f: usize,
    e: usize,
    unramified_poly: Option<IntPoly>,
    eisenstein_poly: Option<Vec<Coords>>, // coefficients g_0..g_e as U-elements padded to Coords
    // u^f .. u^{2f-2} in the u-basis (each length f)
    u_pows: Vec<Vec<PadicInt>>,
    // π^e .. π^{2e-2} in the tower basis
    pi_pows: Vec<Coords>,
    // ℓ/π as a ring element (only when e ≥ 2)
    ell_over_pi: Option<Coords>,
    uniformizer: Coords,
    zeta: Option<(u64, Coords)>,
    conj: Option<ConjData>,
    sub: Option<Ring>, // one tower level down (U for e ≥ 2, Z_ℓ for f ≥ 2)
}

/// Handle to a tower ring; cheap to clone and share.
#[derive(Debug, Clone)]
pub struct Ring {
    inner: Arc<RingInner>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        let a = &self.inner;
        let b = &other.inner;
        a.prime == b.prime
            && a.precision == b.precision
            && a.kind == b.kind
            && a.f == b.f
            && a.e == b.e
            && a.unramified_poly == b.unramified_poly
    }
}
impl Eq for Ring {}

#[derive(Debug, Clone)]
pub struct RingElement {
    ring: Ring,
    coords: Coords,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.coords == other.coords
    }
}
impl Eq for RingElement {}

impl Ring {
    // ---- constructors -------------------------------------------------

    /// Z_ℓ at certificate precision `precision`.
    pub fn base(prime: u64, precision: u32) -> Ring {
        Ring::build(
            prime,
            precision,
            RingKind::Base,
            None,
            None,
            None,
            None,
            None,
        )
        .expect("base ring construction cannot fail")
    }

    /// Z_ℓ[ζ_n] for ℓ ∤ n: the unramified extension generated by an
    /// irreducible factor of Φ_n mod ℓ, Hensel-lifted.
    pub fn unramified(prime: u64, n: u64, precision: u32) -> Result<Ring> {
        if n == 0 || n.is_multiple_of(prime) {
            return Err(Error::BadSpec(format!("ℓ = {} divides n = {}", prime, n)));
        }
        let work = precision + PRECISION_GUARD;
        let f = mult_order(prime, n)?;
        if f == 1 {
            let phi = IntPoly::cyclotomic(n);
            let phi_bar = ModPoly::from_int_poly(prime, &phi);
            let root = (0..prime)
                .find(|&r| phi_bar.eval(r) == 0)
                .ok_or_else(|| Error::BadSpec(format!("Φ_{} has no root mod {}", n, prime)))?;
            let zeta = hensel_root(&phi, &PadicInt::from_i64(prime, work, root as i64))?;
            let ring = Ring::build(
                prime,
                precision,
                RingKind::Unramified { n },
                None,
                None,
                Some((n, vec![zeta])),
                None,
                None,
            )?;
            return Ok(ring);
        }
        let h_u = lift_cyclotomic_factor(prime, n, f, work)?;
        let sub = Ring::base(prime, precision);
        let conj = if f == 2 { Some(ConjData::UnramFrob) } else { None };
        let ring = Ring::build(
            prime,
            precision,
            RingKind::Unramified { n },
            Some(h_u),
            None,
            None,
            conj,
            Some(sub),
        )?;
        // zeta is the class of u
        let mut inner = Arc::try_unwrap(ring.inner).unwrap();
        let mut coords = vec![PadicInt::zero(prime, work); f];
        coords[1] = PadicInt::one(prime, work);
        inner.zeta = Some((n, coords));
        Ok(Ring {
            inner: Arc::new(inner),
        })
    }

    /// O_K[ζ_ℓ] over an unramified base (including Z_ℓ itself). The
    /// Eisenstein generator is t = 1 - ζ_ℓ with minimal polynomial
    /// Φ_ℓ(1 - x); the distinguished uniformizer is η = ζ_ℓ - ζ_ℓ^{-1}.
    pub fn cyclotomic_ell(base: &Ring) -> Result<Ring> {
        let ell = base.prime();
        if ell == 2 {
            return Err(Error::BadSpec("ℓ = 2 not supported".into()));
        }
        if base.e() != 1 {
            return Err(Error::BadSpec(
                "cyclotomic layer requires an unramified base".into(),
            ));
        }
        let g_int = compose_linear_flip(&IntPoly::cyclotomic(ell), 1); // Φ_ℓ(1-x)
        let build = || {
            Ring::build(
                ell,
                base.precision(),
                RingKind::CyclotomicEll,
                base.inner.unramified_poly.clone(),
                Some(&g_int),
                None,
                None,
                Some(base.clone()),
            )
        };
        // First pass to get arithmetic; ζ = 1 - t, ζ^{-1} = ζ^{ℓ-1}.
        let tmp = build()?;
        let zeta = tmp.one().sub(&tmp.gen_pi());
        debug_assert!(zeta.pow(ell).eq(&tmp.one()));
        let zeta_inv = zeta.pow(ell - 1);
        let t_conj = tmp.one().sub(&zeta_inv); // image of t under ζ ↦ ζ^{-1}
        let e = tmp.e();
        let mut pows = Vec::with_capacity(e);
        let mut acc = tmp.one();
        for _ in 0..e {
            pows.push(acc.coords.clone());
            acc = acc.mul(&t_conj);
        }
        let eta = zeta.sub(&zeta_inv);
        let ring2 = build()?;
        let mut inner = Arc::try_unwrap(ring2.inner).expect("fresh ring is unshared");
        inner.conj = Some(ConjData::CycloInvert { t_conj_pows: pows });
        inner.uniformizer = eta.coords.clone();
        inner.zeta = Some((ell, zeta.coords.clone()));
        let ring = Ring {
            inner: Arc::new(inner),
        };
        debug_assert_eq!(ring.uniformizer().val_ext()?, 1);
        debug_assert_eq!(ring.from_i64(ell as i64).val_ext()?, ring.e() as u32);
        Ok(ring)
    }

    /// O_K[ζ_ℓ + ζ_ℓ^{-1}]; the uniformizer is 2 - (ζ_ℓ + ζ_ℓ^{-1}),
    /// which is also the internal generator.
    pub fn real_cyclotomic_ell(base: &Ring) -> Result<Ring> {
        let ell = base.prime();
        if ell < 5 {
            return Err(Error::BadSpec("need ℓ ≥ 5 for the real layer".into()));
        }
        if base.e() != 1 {
            return Err(Error::BadSpec(
                "real cyclotomic layer requires an unramified base".into(),
            ));
        }
        let g_int = compose_linear_flip(&IntPoly::real_cyclotomic(ell), 2);
        let ring = Ring::build(
            ell,
            base.precision(),
            RingKind::RealCyclotomicEll,
            base.inner.unramified_poly.clone(),
            Some(&g_int),
            None,
            None,
            Some(base.clone()),
        )?;
        debug_assert_eq!(ring.from_i64(ell as i64).val_ext()?, ring.e() as u32);
        Ok(ring)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        prime: u64,
        precision: u32,
        kind: RingKind,
        unramified_poly: Option<IntPoly>,
        eisenstein_int: Option<&IntPoly>,
        zeta: Option<(u64, Coords)>,
        conj: Option<ConjData>,
        sub: Option<Ring>,
    ) -> Result<Ring> {
        assert!(precision > 0);
        let work = precision + PRECISION_GUARD;
        let f = match &unramified_poly {
            Some(h) => {
                if !h.is_monic() || h.degree() < 2 {
                    return Err(Error::BadSpec("unramified polynomial must be monic of degree ≥ 2".into()));
                }
                if !ModPoly::from_int_poly(prime, h).is_irreducible() {
                    return Err(Error::BadSpec(format!(
                        "unramified polynomial is reducible mod {}",
                        prime
                    )));
                }
                h.degree()
            }
            None => 1,
        };
        // u-power table
        let mut u_pows: Vec<Vec<PadicInt>> = vec![];
        if f > 1 {
            let h = unramified_poly.as_ref().unwrap();
            let mut uf: Vec<PadicInt> = (0..f)
                .map(|i| PadicInt::from_bigint(prime, work, &(-h.coeff(i))))
                .collect();
            u_pows.push(uf.clone());
            for _ in f + 1..=2 * f - 2 {
                // multiply by u: shift and reduce the spill with u^f
                let spill = uf[f - 1].clone();
                let mut next = vec![PadicInt::zero(prime, work); f];
                for i in (1..f).rev() {
                    next[i] = uf[i - 1].clone();
                }
                for i in 0..f {
                    next[i] = next[i].add(&spill.mul(&u_pows[0][i]));
                }
                uf = next;
                u_pows.push(uf.clone());
            }
        }
        let (e, eis_coords) = match eisenstein_int {
            Some(g) => {
                if !g.is_monic() || g.degree() < 1 {
                    return Err(Error::BadSpec("eisenstein polynomial must be monic".into()));
                }
                let e = g.degree();
                let mut coeffs: Vec<Coords> = vec![];
                for k in 0..=e {
                    let c = PadicInt::from_bigint(prime, work, &g.coeff(k));
                    let mut co = vec![PadicInt::zero(prime, work); f * e];
                    co[0] = c;
                    coeffs.push(co);
                }
                // Eisenstein: v(g_0) = 1 exactly, v(g_k) ≥ 1 for 0 < k < e
                let v0 = coeffs[0][0].valuation().unwrap_or(u32::MAX);
                if v0 != 1 {
                    return Err(Error::BadSpec("constant term is not ℓ·unit".into()));
                }
                for co in coeffs.iter().take(e).skip(1) {
                    if co[0].valuation() == Some(0) {
                        return Err(Error::BadSpec("polynomial is not Eisenstein".into()));
                    }
                }
                (e, Some(coeffs))
            }
            None => (1, None),
        };

        let dim = f * e;
        let zero = || PadicInt::zero(prime, work);
        let mut uniformizer = vec![zero(); dim];
        uniformizer[0] = PadicInt::from_i64(prime, work, prime as i64);
        if e > 1 {
            uniformizer = vec![zero(); dim];
            uniformizer[f] = PadicInt::one(prime, work); // π; cyclotomic overrides with η later
        }

        let mut inner = RingInner {
            prime,
            precision,
            work_precision: work,
            kind,
            f,
            e,
            unramified_poly,
            eisenstein_poly: eis_coords,
            u_pows,
            pi_pows: vec![],
            ell_over_pi: None,
            uniformizer,
            zeta,
            conj,
            sub,
        };

        // π-power table: π^e = -(g_0 + ... + g_{e-1} π^{e-1})
        if e > 1 {
            let g = inner.eisenstein_poly.as_ref().unwrap().clone();
            let mut pe: Coords = vec![zero(); dim];
            for (k, gk) in g.iter().enumerate().take(e) {
                for i in 0..f {
                    pe[i + f * k] = gk[i].neg();
                }
            }
            inner.pi_pows.push(pe.clone());
            let mut cur = pe;
            for _ in e + 1..=2 * e - 2 {
                // multiply by π: shift π-degree, reduce the spill with π^e
                let mut next = vec![zero(); dim];
                let spill: Vec<PadicInt> = cur[f * (e - 1)..].to_vec();
                for j in (1..e).rev() {
                    for i in 0..f {
                        next[i + f * j] = cur[i + f * (j - 1)].clone();
                    }
                }
                // next += spill (as U-coeff) * π^e
                let pe0 = &inner.pi_pows[0];
                for j in 0..e {
                    let prod = u_mul_raw(
                        &spill,
                        &pe0[f * j..f * (j + 1)],
                        f,
                        &inner.u_pows,
                        prime,
                        work,
                    );
                    for i in 0..f {
                        next[i + f * j] = next[i + f * j].add(&prod[i]);
                    }
                }
                cur = next;
                inner.pi_pows.push(cur.clone());
            }
            // ℓ/π = -(g_1 + g_2 π + ... + π^{e-1}) · (g_0/ℓ)^{-1}
            let g = inner.eisenstein_poly.as_ref().unwrap();
            let w = g[0][0].div_exact_pow(1)?; // g_0/ℓ, a unit scalar of U
            let w_inv = w.invert()?;
            let mut eop = vec![zero(); dim];
            for k in 1..=e {
                let coeff = if k == e {
                    PadicInt::one(prime, work)
                } else {
                    g[k][0].clone()
                };
                eop[f * (k - 1)] = coeff.neg().mul(&w_inv);
            }
            inner.ell_over_pi = Some(eop);
        }

        Ok(Ring {
            inner: Arc::new(inner),
        })
    }

    // ---- accessors -----------------------------------------------------

    pub fn prime(&self) -> u64 {
        self.inner.prime
    }

    pub fn precision(&self) -> u32 {
        self.inner.precision
    }

    pub fn work_precision(&self) -> u32 {
        self.inner.work_precision
    }

    pub fn kind(&self) -> &RingKind {
        &self.inner.kind
    }

    /// Residue degree of the unramified layer.
    pub fn residue_degree(&self) -> usize {
        self.inner.f
    }

    /// Ramification index; val_ext(ℓ) = e.
    pub fn ramification(&self) -> usize {
        self.inner.e
    }

    pub fn e(&self) -> usize {
        self.inner.e
    }

    pub fn f(&self) -> usize {
        self.inner.f
    }

    /// Rank of O over Z_ℓ.
    pub fn dim(&self) -> usize {
        self.inner.f * self.inner.e
    }

    pub fn has_conj(&self) -> bool {
        self.inner.conj.is_some()
    }

    /// The tower level below: U for e ≥ 2, Z_ℓ for unramified rings.
    pub fn subring(&self) -> Ring {
        self.inner.sub.clone().unwrap_or_else(|| self.clone())
    }

    pub fn residue_field(&self) -> Fq {
        match &self.inner.unramified_poly {
            Some(h) => Fq::new(self.inner.prime, ModPoly::from_int_poly(self.inner.prime, h)),
            None => Fq::prime_field(self.inner.prime),
        }
    }

    // ---- element constructors -------------------------------------------

    pub fn zero(&self) -> RingElement {
        let z = PadicInt::zero(self.inner.prime, self.inner.work_precision);
        RingElement {
            ring: self.clone(),
            coords: vec![z; self.dim()],
        }
    }

    pub fn one(&self) -> RingElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> RingElement {
        let mut el = self.zero();
        el.coords[0] = PadicInt::from_i64(self.inner.prime, self.inner.work_precision, v);
        el
    }

    pub fn from_bigint(&self, v: &BigInt) -> RingElement {
        let mut el = self.zero();
        el.coords[0] = PadicInt::from_bigint(self.inner.prime, self.inner.work_precision, v);
        el
    }

    pub fn from_padic(&self, v: &PadicInt) -> RingElement {
        let mut el = self.zero();
        el.coords[0] = v.with_precision(self.inner.work_precision);
        el
    }

    pub fn from_coords(&self, coords: Coords) -> RingElement {
        assert_eq!(coords.len(), self.dim());
        RingElement {
            ring: self.clone(),
            coords: coords
                .into_iter()
                .map(|c| c.with_precision(self.inner.work_precision))
                .collect(),
        }
    }

    pub fn from_i64_coords(&self, coords: &[i64]) -> RingElement {
        assert_eq!(coords.len(), self.dim());
        self.from_coords(
            coords
                .iter()
                .map(|&c| PadicInt::from_i64(self.inner.prime, self.inner.work_precision, c))
                .collect(),
        )
    }

    /// Internal Eisenstein generator (ℓ when e = 1).
    pub fn gen_pi(&self) -> RingElement {
        if self.inner.e == 1 {
            return self.from_i64(self.inner.prime as i64);
        }
        let mut el = self.zero();
        el.coords[self.inner.f] = PadicInt::one(self.inner.prime, self.inner.work_precision);
        el
    }

    /// Generator of the unramified layer (1 when f = 1).
    pub fn gen_u(&self) -> RingElement {
        if self.inner.f == 1 {
            return self.one();
        }
        let mut el = self.zero();
        el.coords[1] = PadicInt::one(self.inner.prime, self.inner.work_precision);
        el
    }

    /// The distinguished uniformizer: ℓ, η = ζ_ℓ - ζ_ℓ^{-1}, or
    /// 2 - (ζ_ℓ + ζ_ℓ^{-1}) depending on the ring kind.
    pub fn uniformizer(&self) -> RingElement {
        RingElement {
            ring: self.clone(),
            coords: self.inner.uniformizer.clone(),
        }
    }

    /// The root of unity the ring was built around.
    pub fn zeta(&self) -> Result<RingElement> {
        match &self.inner.zeta {
            Some((_, coords)) => {
                let mut c = coords.clone();
                c.resize(
                    self.dim(),
                    PadicInt::zero(self.inner.prime, self.inner.work_precision),
                );
                Ok(RingElement {
                    ring: self.clone(),
                    coords: c,
                })
            }
            None => Err(Error::BadSpec("ring has no distinguished root of unity".into())),
        }
    }

    pub fn zeta_order(&self) -> Option<u64> {
        self.inner.zeta.as_ref().map(|(n, _)| *n)
    }

    /// ζ_ℓ + ζ_ℓ^{-1} for the real cyclotomic ring: 2 - π.
    pub fn zeta_plus_inverse(&self) -> Result<RingElement> {
        if self.inner.kind != RingKind::RealCyclotomicEll {
            return Err(Error::BadSpec("not a real cyclotomic ring".into()));
        }
        Ok(self.from_i64(2).sub(&self.gen_pi()))
    }
}

// Raw u-layer multiplication on coefficient slices (length f), reducing via
// the precomputed u-power table.
fn u_mul_raw(
    a: &[PadicInt],
    b: &[PadicInt],
    f: usize,
    u_pows: &[Vec<PadicInt>],
    prime: u64,
    work: u32,
) -> Vec<PadicInt> {
    if f == 1 {
        return vec![a[0].mul(&b[0])];
    }
    let zero = PadicInt::zero(prime, work);
    let mut conv = vec![zero.clone(); 2 * f - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            conv[i + j] = conv[i + j].add(&ai.mul(bj));
        }
    }
    let mut out: Vec<PadicInt> = conv[..f].to_vec();
    for d in f..=2 * f - 2 {
        if conv[d].is_zero() {
            continue;
        }
        let table = &u_pows[d - f];
        for i in 0..f {
            out[i] = out[i].add(&conv[d].mul(&table[i]));
        }
    }
    out
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coords(&self) -> &[PadicInt] {
        &self.coords
    }

    fn u_coeff(&self, j: usize) -> &[PadicInt] {
        let f = self.ring.inner.f;
        &self.coords[f * j..f * (j + 1)]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn check_ring(&self, other: &RingElement) {
        assert!(self.ring == other.ring, "elements from different rings");
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        self.check_ring(other);
        RingElement {
            ring: self.ring.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        self.check_ring(other);
        RingElement {
            ring: self.ring.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> RingElement {
        RingElement {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        self.check_ring(other);
        let inner = &self.ring.inner;
        let (f, e) = (inner.f, inner.e);
        let prime = inner.prime;
        let work = inner.work_precision;
        let zero = PadicInt::zero(prime, work);
        if e == 1 {
            let out = u_mul_raw(&self.coords, &other.coords, f, &inner.u_pows, prime, work);
            return RingElement {
                ring: self.ring.clone(),
                coords: out,
            };
        }
        // convolution in π with u-layer coefficient products
        let mut conv: Vec<Vec<PadicInt>> = vec![vec![zero.clone(); f]; 2 * e - 1];
        for j1 in 0..e {
            let a = self.u_coeff(j1);
            if a.iter().all(|c| c.is_zero()) {
                continue;
            }
            for j2 in 0..e {
                let b = other.u_coeff(j2);
                if b.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let prod = u_mul_raw(a, b, f, &inner.u_pows, prime, work);
                for i in 0..f {
                    conv[j1 + j2][i] = conv[j1 + j2][i].add(&prod[i]);
                }
            }
        }
        // reduce degrees ≥ e from the top down
        for d in (e..=2 * e - 2).rev() {
            let top = conv[d].clone();
            if top.iter().all(|c| c.is_zero()) {
                continue;
            }
            conv[d] = vec![zero.clone(); f];
            let table = &inner.pi_pows[d - e];
            for j in 0..e {
                let prod = u_mul_raw(&top, &table[f * j..f * (j + 1)], f, &inner.u_pows, prime, work);
                for i in 0..f {
                    conv[j][i] = conv[j][i].add(&prod[i]);
                }
            }
        }
        let mut coords = Vec::with_capacity(f * e);
        for item in conv.into_iter().take(e) {
            coords.extend(item);
        }
        RingElement {
            ring: self.ring.clone(),
            coords,
        }
    }

    pub fn mul_i64(&self, k: i64) -> RingElement {
        let s = PadicInt::from_i64(self.ring.prime(), self.ring.work_precision(), k);
        RingElement {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|c| c.mul(&s)).collect(),
        }
    }

    pub fn mul_padic(&self, k: &PadicInt) -> RingElement {
        let s = k.with_precision(self.ring.work_precision());
        RingElement {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|c| c.mul(&s)).collect(),
        }
    }

    pub fn pow(&self, mut n: u64) -> RingElement {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Valuation in uniformizer units: min over j of e·v_U(a_j) + j.
    /// `None` when every coordinate is zero at working precision.
    pub fn valuation(&self) -> Option<u32> {
        let e = self.ring.inner.e;
        let mut best: Option<u32> = None;
        for j in 0..e {
            let vu = self.u_coeff(j).iter().filter_map(|c| c.valuation()).min();
            if let Some(v) = vu {
                let cand = (e as u32) * v + j as u32;
                best = Some(best.map_or(cand, |b| b.min(cand)));
            }
        }
        best
    }

    /// Exact valuation; errors on an all-zero coordinate vector.
    pub fn val_ext(&self) -> Result<u32> {
        self.valuation().ok_or_else(|| {
            Error::PrecisionExhausted("valuation of zero element".into())
        })
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// Inverse of a unit, by solving the multiplication matrix over Z_ℓ.
    pub fn invert(&self) -> Result<RingElement> {
        match self.valuation() {
            Some(0) => {}
            Some(v) => return Err(Error::NotAUnit(v)),
            None => {
                return Err(Error::PrecisionExhausted(
                    "cannot invert zero element".into(),
                ))
            }
        }
        let n = self.ring.dim();
        let m = self.mult_matrix();
        // solve m·y = e_0 by Gaussian elimination with unit pivots
        let prime = self.ring.prime();
        let work = self.ring.work_precision();
        let mut a = m;
        let mut rhs: Vec<PadicInt> = (0..n)
            .map(|i| {
                if i == 0 {
                    PadicInt::one(prime, work)
                } else {
                    PadicInt::zero(prime, work)
                }
            })
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| a[perm[r] * n + col].valuation() == Some(0))
                .ok_or_else(|| {
                    Error::PrecisionExhausted("no unit pivot in inversion".into())
                })?;
            perm.swap(col, pivot_row);
            let p = perm[col];
            let inv = a[p * n + col].invert()?;
            for r in 0..n {
                if r == col {
                    continue;
                }
                let q = perm[r];
                let factor = a[q * n + col].mul(&inv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let sub = factor.mul(&a[p * n + c]);
                    a[q * n + c] = a[q * n + c].sub(&sub);
                }
                let sub = factor.mul(&rhs[p]);
                rhs[q] = rhs[q].sub(&sub);
            }
        }
        let mut y = vec![PadicInt::zero(prime, work); n];
        for col in 0..n {
            let p = perm[col];
            let inv = a[p * n + col].invert()?;
            y[col] = rhs[p].mul(&inv);
        }
        Ok(RingElement {
            ring: self.ring.clone(),
            coords: y,
        })
    }

    /// Multiplication-by-self matrix over Z_ℓ in the tower basis, row-major.
    fn mult_matrix(&self) -> Vec<PadicInt> {
        let n = self.ring.dim();
        let mut cols = Vec::with_capacity(n);
        let mut basis = self.ring.one();
        let gen_u = self.ring.gen_u();
        let gen_pi = self.ring.gen_pi();
        let (f, e) = (self.ring.inner.f, self.ring.inner.e);
        for j in 0..e {
            let mut ub = basis.clone();
            for i in 0..f {
                cols.push(self.mul(&ub).coords);
                if i + 1 < f {
                    ub = ub.mul(&gen_u);
                }
            }
            if j + 1 < e {
                basis = basis.mul(&gen_pi);
            }
        }
        let mut m = vec![PadicInt::zero(self.ring.prime(), self.ring.work_precision()); n * n];
        for (c, col) in cols.iter().enumerate() {
            for r in 0..n {
                m[r * n + c] = col[r].clone();
            }
        }
        m
    }

    /// Multiply by π^k.
    pub fn mul_by_pi_pow(&self, k: u32) -> RingElement {
        let mut out = self.clone();
        let pi = self.ring.gen_pi();
        for _ in 0..k {
            out = out.mul(&pi);
        }
        out
    }

    /// Exact division by π^k; the element must have valuation ≥ k.
    pub fn div_by_pi_pow(&self, k: u32) -> Result<RingElement> {
        let mut out = self.clone();
        let inner = &self.ring.inner;
        for _ in 0..k {
            if inner.e == 1 {
                let coords = out
                    .coords
                    .iter()
                    .map(|c| c.div_exact_pow(1))
                    .collect::<Result<Vec<_>>>()?;
                out = RingElement {
                    ring: self.ring.clone(),
                    coords,
                };
            } else {
                let eop = RingElement {
                    ring: self.ring.clone(),
                    coords: inner.ell_over_pi.clone().unwrap(),
                };
                let scaled = out.mul(&eop);
                let coords = scaled
                    .coords
                    .iter()
                    .map(|c| c.div_exact_pow(1))
                    .collect::<Result<Vec<_>>>()?;
                out = RingElement {
                    ring: self.ring.clone(),
                    coords,
                };
            }
        }
        Ok(out)
    }

    /// Exact division by an element of smaller or equal valuation:
    /// x/d = (x · unit(d)^{-1}) / π^{v(d)}.
    pub fn div_exact(&self, d: &RingElement) -> Result<RingElement> {
        let vd = d.val_ext()?;
        let unit = d.div_by_pi_pow(vd)?;
        let q = self.mul(&unit.invert()?);
        q.div_by_pi_pow(vd)
    }

    /// Image under the order-2 automorphism, when the ring has one.
    pub fn conj(&self) -> Result<RingElement> {
        let inner = &self.ring.inner;
        match &inner.conj {
            None => Err(Error::NoConjugation),
            Some(ConjData::UnramFrob) => {
                let h = inner.unramified_poly.as_ref().unwrap();
                let h1 = PadicInt::from_bigint(inner.prime, inner.work_precision, &h.coeff(1));
                // u ↦ -h1 - u on each π-coefficient
                let (f, e) = (inner.f, inner.e);
                assert_eq!(f, 2);
                let mut coords = self.coords.clone();
                for j in 0..e {
                    let c1 = coords[f * j + 1].clone();
                    coords[f * j] = coords[f * j].sub(&c1.mul(&h1));
                    coords[f * j + 1] = c1.neg();
                }
                Ok(RingElement {
                    ring: self.ring.clone(),
                    coords,
                })
            }
            Some(ConjData::CycloInvert { t_conj_pows }) => {
                let (f, e) = (inner.f, inner.e);
                let mut acc = self.ring.zero();
                for j in 0..e {
                    let a = self.u_coeff(j);
                    if a.iter().all(|c| c.is_zero()) {
                        continue;
                    }
                    // a (in the fixed unramified layer) times conj(t)^j
                    let pow = RingElement {
                        ring: self.ring.clone(),
                        coords: t_conj_pows[j].clone(),
                    };
                    let mut a_el = self.ring.zero();
                    a_el.coords[..f].clone_from_slice(a);
                    acc = acc.add(&a_el.mul(&pow));
                }
                Ok(acc)
            }
        }
    }

    /// Trace from O to the unramified layer U (the base field K of the
    /// Eisenstein layer); identity when e = 1.
    pub fn trace_eisenstein_layer(&self) -> RingElement {
        let inner = &self.ring.inner;
        let (f, e) = (inner.f, inner.e);
        let sub = self.ring.subring();
        if e == 1 {
            return self.clone();
        }
        // tr(x) = Σ_j coeff_j(x·π^j); the running product only needs π
        // shifts, not general multiplications
        let mut acc = vec![PadicInt::zero(inner.prime, inner.work_precision); f];
        let mut y = self.clone();
        for j in 0..e {
            let cj = y.u_coeff(j);
            for i in 0..f {
                acc[i] = acc[i].add(&cj[i]);
            }
            if j + 1 < e {
                y = y.shifted_by_pi();
            }
        }
        RingElement {
            ring: sub,
            coords: acc,
        }
    }

    /// Multiplication by the internal Eisenstein generator, as a coordinate
    /// shift with the spill reduced through the π^e table.
    fn shifted_by_pi(&self) -> RingElement {
        let inner = &self.ring.inner;
        let (f, e) = (inner.f, inner.e);
        if e == 1 {
            return self.mul_i64(inner.prime as i64);
        }
        let zero = PadicInt::zero(inner.prime, inner.work_precision);
        let mut coords = vec![zero; f * e];
        for j in 1..e {
            coords[f * j..f * (j + 1)].clone_from_slice(self.u_coeff(j - 1));
        }
        let spill = self.u_coeff(e - 1);
        if spill.iter().any(|c| !c.is_zero()) {
            let table = &inner.pi_pows[0];
            for j in 0..e {
                let prod = u_mul_raw(
                    spill,
                    &table[f * j..f * (j + 1)],
                    f,
                    &inner.u_pows,
                    inner.prime,
                    inner.work_precision,
                );
                for i in 0..f {
                    coords[f * j + i] = coords[f * j + i].add(&prod[i]);
                }
            }
        }
        RingElement {
            ring: self.ring.clone(),
            coords,
        }
    }

    /// Full trace down to Z_ℓ.
    pub fn trace_to_base(&self) -> PadicInt {
        let at_u = self.trace_eisenstein_layer();
        let inner = &at_u.ring.inner;
        let f = inner.f;
        if f == 1 {
            return at_u.coords[0].clone();
        }
        let mut acc = PadicInt::zero(inner.prime, inner.work_precision);
        let gen_u = at_u.ring.gen_u();
        let mut basis = at_u.ring.one();
        for i in 0..f {
            let prod = at_u.mul(&basis);
            acc = acc.add(&prod.coords[i]);
            if i + 1 < f {
                basis = basis.mul(&gen_u);
            }
        }
        acc
    }

    /// Image in the residue field k = O/m.
    pub fn residue(&self) -> FqElt {
        let inner = &self.ring.inner;
        let f = inner.f;
        self.u_coeff(0)
            .iter()
            .map(|c| c.residue_mod_p())
            .collect::<Vec<u64>>()
            .into_iter()
            .take(f)
            .collect()
    }

    /// Coordinates reduced mod ℓ^N (certificate precision), still carried
    /// at working precision.
    pub fn cert_truncated(&self) -> RingElement {
        let inner = &self.ring.inner;
        RingElement {
            ring: self.ring.clone(),
            coords: self
                .coords
                .iter()
                .map(|c| {
                    PadicInt::new(
                        inner.prime,
                        inner.work_precision,
                        c.reduced_residue(inner.precision),
                    )
                })
                .collect(),
        }
    }

    /// Whether the element is zero mod ℓ^N (certificate precision).
    pub fn is_zero_cert(&self) -> bool {
        let n = self.ring.precision();
        self.coords
            .iter()
            .all(|c| c.reduced_residue(n) == num_bigint::BigUint::from(0u32))
    }

    /// Canonical representative of self mod π^a: each π-coefficient a_j is
    /// reduced mod ℓ^{ceil((a-j)/e)}, capped at certificate precision.
    pub fn canonical_mod_pi_pow(&self, a: u32) -> RingElement {
        let inner = &self.ring.inner;
        let (f, e) = (inner.f, inner.e as u32);
        let mut coords = self.coords.clone();
        for j in 0..inner.e {
            let need = a.saturating_sub(j as u32);
            let k_j = need.div_ceil(e).min(inner.precision);
            for i in 0..f {
                let c = &coords[f * j + i];
                coords[f * j + i] = PadicInt::new(
                    inner.prime,
                    inner.work_precision,
                    c.reduced_residue(k_j),
                );
            }
        }
        RingElement {
            ring: self.ring.clone(),
            coords,
        }
    }
}

fn mult_order(ell: u64, n: u64) -> Result<usize> {
    let mut f = 1usize;
    let mut acc = ell % n;
    while acc != 1 {
        acc = acc * ell % n;
        f += 1;
        if f > 64 {
            return Err(Error::BadSpec(format!("order of {} mod {} too large", ell, n)));
        }
    }
    Ok(f)
}

/// Irreducible degree-f factor of Φ_n mod ℓ, Hensel-lifted to the working
/// precision. Returns a monic integer polynomial.
fn lift_cyclotomic_factor(ell: u64, n: u64, f: usize, work: u32) -> Result<IntPoly> {
    // any irreducible monic polynomial of degree f gives F_{ℓ^f}
    let field = {
        let mut found = None;
        let total = (ell as u128).pow(f as u32);
        let mut counter: u128 = 0;
        while counter < total {
            let mut coeffs = Vec::with_capacity(f + 1);
            let mut c = counter;
            for _ in 0..f {
                coeffs.push((c % ell as u128) as u64);
                c /= ell as u128;
            }
            coeffs.push(1);
            let cand = ModPoly::new(ell, coeffs);
            if cand.is_irreducible() {
                found = Some(cand);
                break;
            }
            counter += 1;
        }
        Fq::new(ell, found.ok_or_else(|| Error::BadSpec("no irreducible polynomial found".into()))?)
    };
    let q_minus_1 = field.size() - 1;
    if q_minus_1 % (n as u128) != 0 {
        return Err(Error::BadSpec(format!("no {}-th roots of unity in F_{}^{}", n, ell, f)));
    }
    // element of exact order n
    let mut zeta_bar: Option<FqElt> = None;
    for cand in field.elements() {
        if field.is_zero(&cand) {
            continue;
        }
        let z = field.pow(&cand, q_minus_1 / n as u128);
        if field.order(&z) == n as u128 {
            zeta_bar = Some(z);
            break;
        }
    }
    let zeta_bar = zeta_bar.ok_or_else(|| Error::BadSpec("no element of the required order".into()))?;
    // minimal polynomial: ∏ (x - ζ^{ℓ^i}); coefficients must be scalars
    let mut roots = vec![];
    let mut z = zeta_bar;
    for _ in 0..f {
        roots.push(z.clone());
        z = field.pow(&z, ell as u128);
    }
    // multiply out over F_q
    let mut minpoly = vec![field.one()]; // ascending in x, coefficients in F_q
    for r in &roots {
        let neg_r = field.neg(r);
        let mut next = vec![field.zero(); minpoly.len() + 1];
        for (i, c) in minpoly.iter().enumerate() {
            next[i] = field.add(&next[i], &field.mul(c, &neg_r));
            next[i + 1] = field.add(&next[i + 1], c);
        }
        minpoly = next;
    }
    let mut h_bar_coeffs = Vec::with_capacity(f + 1);
    for c in &minpoly {
        if c[1..].iter().any(|&x| x != 0) {
            return Err(Error::BadSpec("minimal polynomial not over F_ℓ".into()));
        }
        h_bar_coeffs.push(c[0]);
    }
    let h_bar = ModPoly::new(ell, h_bar_coeffs);
    debug_assert!(h_bar.is_irreducible());

    // Hensel-lift h_bar as a factor of Φ_n from mod ℓ to mod ℓ^work.
    let phi = IntPoly::cyclotomic(n);
    let phi_bar = ModPoly::from_int_poly(ell, &phi);
    let c_bar = {
        let (q, r) = phi_bar.divmod(&h_bar);
        if !r.is_zero() {
            return Err(Error::BadSpec("factor does not divide Φ_n mod ℓ".into()));
        }
        q
    };
    let (g, s, t) = h_bar.xgcd(&c_bar);
    if g.degree() != Some(0) {
        return Err(Error::BadSpec("cyclotomic factors not coprime mod ℓ".into()));
    }
    let lift_mod = |p: &ModPoly| -> IntPoly {
        IntPoly::new(p.coeffs().iter().map(|&c| BigInt::from(c)).collect())
    };
    let mut h = lift_mod(&h_bar);
    let mut c = lift_mod(&c_bar);
    let ell_big = BigInt::from(ell);
    let modulus_big = BigInt::from(ell).pow(work);
    let mut step_pow = ell_big.clone();
    for _ in 1..work {
        // Δ = (Φ - H·C)/ℓ^k mod ℓ
        let delta_int = phi.sub(&h.mul(&c));
        let delta_div: Vec<BigInt> = delta_int
            .coeffs()
            .iter()
            .map(|co| {
                let (q, r) = num_integer::Integer::div_rem(co, &step_pow);
                debug_assert!(r.is_zero() || co.is_negative());
                let _ = r;
                q
            })
            .collect();
        let delta_bar = ModPoly::from_int_poly(ell, &IntPoly::new(delta_div));
        if !delta_bar.is_zero() {
            let (qq, u) = t.mul(&delta_bar).divmod(&h_bar);
            let v = s.mul(&delta_bar).add(&qq.mul(&c_bar));
            let u_lift = lift_mod(&u).scale(&step_pow);
            let v_lift = lift_mod(&v).scale(&step_pow);
            h = h.add(&u_lift);
            c = c.add(&v_lift);
            // keep coefficients reduced
            h = IntPoly::new(
                h.coeffs()
                    .iter()
                    .map(|co| num_integer::Integer::mod_floor(co, &modulus_big))
                    .collect(),
            );
            c = IntPoly::new(
                c.coeffs()
                    .iter()
                    .map(|co| num_integer::Integer::mod_floor(co, &modulus_big))
                    .collect(),
            );
        }
        step_pow *= &ell_big;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_ring_facts() {
        let r = Ring::base(5, 32);
        assert_eq!(r.e(), 1);
        assert_eq!(r.f(), 1);
        assert_eq!(r.from_i64(10).val_ext().unwrap(), 1);
        assert!(r.from_i64(3).is_unit());
    }

    #[test]
    fn unramified_split_and_inert() {
        // ζ_4 ∈ Z_5: x^2+1 splits mod 5, hensel gives 7 mod 25
        let r = Ring::unramified(5, 4, 32).unwrap();
        assert_eq!(r.e(), 1);
        assert_eq!(r.f(), 1);
        let z = r.zeta().unwrap();
        assert_eq!(
            z.coords()[0].reduced_residue(2),
            num_bigint::BigUint::from(7u32)
        );
        assert!(z.pow(4).eq(&r.one()));
        // x^2+1 irreducible mod 7
        let r7 = Ring::unramified(7, 4, 32).unwrap();
        assert_eq!(r7.e(), 1);
        assert_eq!(r7.f(), 2);
        let z = r7.zeta().unwrap();
        assert!(z.pow(4).eq(&r7.one()));
        assert!(!z.pow(2).eq(&r7.one()));
        // conj is the frobenius: ζ_4 ↦ ζ_4^7 = ζ_4^{-1}
        assert!(z.conj().unwrap().eq(&z.pow(3)));
        // ℓ | n rejected
        assert!(Ring::unramified(5, 10, 32).is_err());
    }

    #[test]
    fn cyclotomic_ring_basics() {
        let base = Ring::base(5, 32);
        let m = Ring::cyclotomic_ell(&base).unwrap();
        assert_eq!(m.e(), 4);
        assert_eq!(m.f(), 1);
        let zeta = m.zeta().unwrap();
        assert!(zeta.pow(5).eq(&m.one()));
        // η = ζ - ζ^{-1} is a uniformizer; v(5) = 4
        let eta = m.uniformizer();
        assert_eq!(eta.val_ext().unwrap(), 1);
        assert_eq!(m.from_i64(5).val_ext().unwrap(), 4);
        assert_eq!(m.one().val_ext().unwrap(), 0);
        // traces over Q_5: tr(ζ) = -1, tr(1) = 4, tr(η) = 0
        let tr_zeta = zeta.trace_eisenstein_layer();
        assert!(tr_zeta.eq(&tr_zeta.ring().from_i64(-1)));
        assert!(m.one().trace_eisenstein_layer().eq(&base.from_i64(4)));
        assert!(eta.trace_eisenstein_layer().is_zero());
        // conjugation: ζ ↦ ζ^4, η ↦ -η, fixed elements fixed
        assert!(zeta.conj().unwrap().eq(&zeta.pow(4)));
        assert!(eta.conj().unwrap().eq(&eta.neg()));
        let c = zeta.add(&zeta.pow(4));
        assert!(c.conj().unwrap().eq(&c));
        assert!(zeta.conj().unwrap().conj().unwrap().eq(&zeta));
    }

    #[test]
    fn real_cyclotomic_ring() {
        let base = Ring::base(5, 32);
        let k = Ring::real_cyclotomic_ell(&base).unwrap();
        assert_eq!(k.e(), 2);
        assert_eq!(k.from_i64(5).val_ext().unwrap(), 2);
        let s = k.uniformizer();
        assert_eq!(s.val_ext().unwrap(), 1);
        // c = ζ+ζ^{-1} satisfies y^2 + y - 1 = 0 at ℓ = 5
        let c = k.zeta_plus_inverse().unwrap();
        assert!(c.mul(&c).add(&c).sub(&k.one()).is_zero());
    }

    #[test]
    fn unit_inversion_in_tower() {
        let base = Ring::base(5, 32);
        let m = Ring::cyclotomic_ell(&base).unwrap();
        let zeta = m.zeta().unwrap();
        let x = zeta.mul_i64(3).add(&m.one()); // 1 + 3ζ, a unit
        let xi = x.invert().unwrap();
        assert!(x.mul(&xi).eq(&m.one()));
        // division by π powers undoes multiplication by π powers; each
        // division consumes a guard digit, so compare at certificate
        // precision
        let y = x.mul_by_pi_pow(8);
        let back = y.div_by_pi_pow(8).unwrap();
        assert!(back.sub(&x).is_zero_cert());
        // 25 = π^8 · unit: dividing by π^8 leaves a unit
        let z = x.mul(&m.from_i64(25)).div_by_pi_pow(8).unwrap();
        assert_eq!(z.val_ext().unwrap(), 0);
    }

    #[test]
    fn deep_unramified_extension() {
        // ord of 5 mod 7 is 6: a sextic unramified tower
        let r = Ring::unramified(5, 7, 24).unwrap();
        assert_eq!(r.f(), 6);
        assert_eq!(r.e(), 1);
        let z = r.zeta().unwrap();
        assert!(z.pow(7).eq(&r.one()));
        assert!(!z.eq(&r.one()));
        let x = z.add(&r.from_i64(3));
        let xi = x.invert().unwrap();
        assert!(x.mul(&xi).eq(&r.one()));
        // tr(ζ_7) over Z_5 is -1
        assert_eq!(
            z.trace_to_base(),
            PadicInt::from_i64(5, r.work_precision(), -1)
        );
    }

    #[test]
    fn tower_with_two_layers() {
        // Z_5[ζ_3] has f = 2; adjoin ζ_5 on top: e = 4, f = 2
        let u = Ring::unramified(5, 3, 24).unwrap();
        assert_eq!(u.f(), 2);
        let m = Ring::cyclotomic_ell(&u).unwrap();
        assert_eq!(m.e(), 4);
        assert_eq!(m.f(), 2);
        assert_eq!(m.dim(), 8);
        assert_eq!(m.from_i64(5).val_ext().unwrap(), 4);
        let zeta = m.zeta().unwrap();
        assert!(zeta.pow(5).eq(&m.one()));
        let eta = m.uniformizer();
        assert_eq!(eta.val_ext().unwrap(), 1);
        // trace down to the unramified layer lands in U
        let tr = zeta.trace_eisenstein_layer();
        assert_eq!(tr.ring().f(), 2);
        assert!(tr.eq(&tr.ring().from_i64(-1)));
        // full trace to Z_5: tr_{M/U}(ζ) = -1, then tr_{U/Z5}(-1) = -2
        assert_eq!(
            zeta.trace_to_base(),
            PadicInt::from_i64(5, m.work_precision(), -2)
        );
    }

    #[test]
    fn trace_is_stable_under_conjugation() {
        let m = Ring::cyclotomic_ell(&Ring::base(7, 32)).unwrap();
        let zeta = m.zeta().unwrap();
        for k in [1u64, 2, 3] {
            let x = zeta.pow(k).add(&m.gen_pi().mul_i64(3));
            let tr = x.trace_eisenstein_layer();
            let tr_conj = x.conj().unwrap().trace_eisenstein_layer();
            assert!(tr.sub(&tr_conj).is_zero_cert());
        }
    }

    #[test]
    fn residues_and_canonical_reduction() {
        let base = Ring::base(5, 32);
        let m = Ring::cyclotomic_ell(&base).unwrap();
        let zeta = m.zeta().unwrap();
        // ζ = 1 - t ≡ 1 mod m
        assert_eq!(zeta.residue(), vec![1]);
        let x = m.from_i64(7).add(&m.gen_pi().mul_i64(30));
        let r = x.canonical_mod_pi_pow(1);
        // mod π only the scalar survives, reduced mod 5
        assert_eq!(r.coords()[0].residue(), &num_bigint::BigUint::from(2u32));
        assert!(r.coords()[1..].iter().all(|c| c.is_zero()));
        let diff = x.sub(&r);
        assert!(diff.val_ext().unwrap() >= 1);
    }

    #[test]
    fn inverse_different_boundary_traces() {
        // tr(η^{ℓ-2} ζ^i) ∈ ℓ Z_ℓ for all i: the inverse-different bound at δ = 1
        for ell in [5u64, 7, 11] {
            let base = Ring::base(ell, 32);
            let m = Ring::cyclotomic_ell(&base).unwrap();
            let eta = m.uniformizer();
            let zeta = m.zeta().unwrap();
            let etapow = eta.pow(ell - 2);
            for i in 0..(ell - 1) {
                let x = etapow.mul(&zeta.pow(i));
                let tr = x.trace_to_base();
                assert!(tr.valuation().map_or(true, |v| v >= 1));
            }
        }
    }
}
