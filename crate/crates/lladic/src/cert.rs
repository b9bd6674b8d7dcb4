//! Machine-checkable certificates: serializable witness and obstruction
//! records that embed enough data (bases, Gram matrices, residue images)
//! for independent re-verification without re-deriving the constructions.
//!
//! Coordinates are decimal strings so nothing is lost above 64 bits;
//! residue-field entries stay plain integers. `check` re-runs the exact
//! checks on the embedded data alone.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{BilinearForm, Lattice, Symmetry};
use crate::localring::{Ring, RingKind};
use crate::mat::{snf, Mat};
use crate::modp::{Fq, FqMat};
use crate::padic::PadicInt;
use crate::pairing::{ResidueEmbedding, StabilizedPair, Via43Outcome};
use crate::sharpness::{AbvarOutcome, OracleOutcome, ResidueObstruction};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Certificate {
    pub schema_version: String,
    pub claim: String,
    pub setting: SettingRecord,
    pub precision: u32,
    pub result: CertResult,
    pub verified: bool,
    pub timing_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SettingRecord {
    pub prime: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub ring: RingRecord,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RingRecord {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    pub e: usize,
    pub f: usize,
}

impl RingRecord {
    pub fn of(ring: &Ring) -> RingRecord {
        let (kind, n) = match ring.kind() {
            RingKind::Base => ("base".to_string(), None),
            RingKind::Unramified { n } => ("unramified".to_string(), Some(*n)),
            RingKind::CyclotomicEll => ("cyclotomic".to_string(), None),
            RingKind::RealCyclotomicEll => ("real-cyclotomic".to_string(), None),
        };
        RingRecord {
            kind,
            n,
            e: ring.e(),
            f: ring.f(),
        }
    }

    pub fn rebuild(&self, prime: u64, precision: u32) -> Result<Ring> {
        let ring = match self.kind.as_str() {
            "base" => Ring::base(prime, precision),
            "unramified" => Ring::unramified(
                prime,
                self.n
                    .ok_or_else(|| Error::BadSpec("missing n for unramified ring".into()))?,
                precision,
            )?,
            "cyclotomic" => Ring::cyclotomic_ell(&Ring::base(prime, precision))?,
            "real-cyclotomic" => Ring::real_cyclotomic_ell(&Ring::base(prime, precision))?,
            other => return Err(Error::BadSpec(format!("unknown ring kind '{}'", other))),
        };
        if ring.e() != self.e || ring.f() != self.f {
            return Err(Error::BadSpec(format!(
                "rebuilt ring has (e, f) = ({}, {}), certificate says ({}, {})",
                ring.e(),
                ring.f(),
                self.e,
                self.f
            )));
        }
        Ok(ring)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum CertResult {
    RingInfo(RingInfoRecord),
    Witness(Box<WitnessRecord>),
    Obstruction(ObstructionRecord),
    ResidueObstruction(ResidueRecord),
    Scenario(ScenarioRecord),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RingInfoRecord {
    pub e: usize,
    pub f: usize,
    pub ell_valuation: u32,
    pub uniformizer_valuation: u32,
}

/// Matrix entries as coordinate vectors of decimal strings.
pub type MatRecord = Vec<Vec<Vec<String>>>;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WitnessRecord {
    pub dim: usize,
    pub symmetry: String,
    pub lattice_basis: MatRecord,
    pub lattice_denom: i32,
    pub gram: MatRecord,
    pub gram_denom: i32,
    pub generator_images: Vec<MatRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perfect_exponents: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_index_exponents: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue: Option<ResidueEmbeddingRecord>,
    pub hypotheses_met: bool,
    pub success: bool,
}

/// A residue-field matrix as nested arrays of coefficient vectors.
pub type FqMatRecord = Vec<Vec<Vec<u64>>>;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResidueEmbeddingRecord {
    pub block_dims: (usize, usize),
    pub injective: bool,
    /// element coordinates → block-diagonal residue image (entries over
    /// the residue field as coefficient vectors)
    pub images: Vec<(Vec<u32>, FqMatRecord)>,
    pub charpolys: Vec<(Vec<u32>, Vec<Vec<u64>>)>,
    pub form_bar: FqMatRecord,
    pub form_tilde: FqMatRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CellRecord {
    pub r: u32,
    pub j: i64,
    pub gram: MatRecord,
    pub exponents: Vec<u32>,
    pub det_valuation: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ObstructionRecord {
    pub kind: String,
    pub symmetry: String,
    pub r_window: u32,
    pub form_space_dim: usize,
    pub unit_invariance_checks: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_block_vanishes: Option<bool>,
    pub cells: Vec<CellRecord>,
    pub all_obstructed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive_control_exponents: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResidueRecord {
    pub half_dim: usize,
    pub solution_dim: usize,
    pub enumerated: String,
    pub all_degenerate: bool,
    pub identity_one: bool,
    pub identity_two: bool,
    pub solution_basis: Vec<FqMatRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScenarioRecord {
    pub p: u64,
    pub b: u32,
    pub dimension: u64,
    pub obstruction: ObstructionRecord,
    pub conclusion: String,
}

// ---- encoding helpers ----------------------------------------------------

pub fn mat_to_record(m: &Mat, precision: u32) -> MatRecord {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    m.at(i, j)
                        .coords()
                        .iter()
                        .map(|c| c.reduced_residue(precision).to_string())
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn mat_from_record(ring: &Ring, rec: &MatRecord) -> Result<Mat> {
    let rows = rec.len();
    let cols = rec.first().map_or(0, |r| r.len());
    let mut m = Mat::zero(ring, rows, cols);
    for (i, row) in rec.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if entry.len() != ring.dim() {
                return Err(Error::BadSpec(format!(
                    "coordinate vector of length {} for a ring of rank {}",
                    entry.len(),
                    ring.dim()
                )));
            }
            let coords = entry
                .iter()
                .map(|s| {
                    BigUint::from_str(s)
                        .map(|v| PadicInt::new(ring.prime(), ring.work_precision(), v))
                        .map_err(|_| Error::BadSpec(format!("bad integer '{}'", s)))
                })
                .collect::<Result<Vec<_>>>()?;
            m.set(i, j, ring.from_coords(coords));
        }
    }
    Ok(m)
}

fn fqmat_to_record(m: &FqMat) -> FqMatRecord {
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m.at(i, j).clone()).collect())
        .collect()
}

fn fqmat_from_record(field: &Fq, rec: &[Vec<Vec<u64>>]) -> FqMat {
    let rows = rec.len();
    let cols = rec.first().map_or(0, |r| r.len());
    let mut m = FqMat::zero(field, rows, cols);
    for (i, row) in rec.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let mut v = e.clone();
            v.resize(field.f, 0);
            m.set(i, j, v);
        }
    }
    m
}

fn symmetry_from_str(s: &str) -> Result<Symmetry> {
    match s {
        "alternating" => Ok(Symmetry::Alternating),
        "symmetric" => Ok(Symmetry::Symmetric),
        "hermitian" => Ok(Symmetry::Hermitian),
        "skew-hermitian" => Ok(Symmetry::SkewHermitian),
        other => Err(Error::BadSpec(format!("unknown symmetry '{}'", other))),
    }
}

// ---- builders --------------------------------------------------------------

pub fn obstruction_record(
    out: &OracleOutcome,
    precision: u32,
    positive_control: Option<Vec<u32>>,
) -> ObstructionRecord {
    ObstructionRecord {
        kind: out.kind.as_str().to_string(),
        symmetry: out.symmetry.as_str().to_string(),
        r_window: out.r_window,
        form_space_dim: out.form_space_dim,
        unit_invariance_checks: out.unit_invariance_checks,
        cross_block_vanishes: out.cross_block_vanishes,
        cells: out
            .cells
            .iter()
            .map(|c| CellRecord {
                r: c.r,
                j: c.j,
                gram: mat_to_record(&c.gram, precision),
                exponents: c.exponents.clone(),
                det_valuation: c.det_valuation,
            })
            .collect(),
        all_obstructed: out.all_obstructed,
        positive_control_exponents: positive_control,
    }
}

pub fn witness_record_from_via43(out: &Via43Outcome, precision: u32) -> WitnessRecord {
    WitnessRecord {
        dim: out.lattice.dim(),
        symmetry: out.form.symmetry().as_str().to_string(),
        lattice_basis: mat_to_record(out.lattice.basis(), precision),
        lattice_denom: out.lattice.denom(),
        gram: mat_to_record(out.form.gram(), precision),
        gram_denom: out.form.denom(),
        generator_images: out
            .rep
            .generator_images()
            .iter()
            .map(|m| mat_to_record(m, precision))
            .collect(),
        perfect_exponents: Some(out.cert.exponents.clone()),
        dual_index_exponents: None,
        iterations: None,
        residue: None,
        hypotheses_met: out.hypotheses_met,
        success: out.success,
    }
}

pub fn witness_record_from_stabilized(
    sp: &StabilizedPair,
    rep: &crate::reps::Representation,
    emb: Option<&ResidueEmbedding>,
    precision: u32,
    success: bool,
    hypotheses_met: bool,
) -> WitnessRecord {
    WitnessRecord {
        dim: sp.lattice.dim(),
        symmetry: sp.form.symmetry().as_str().to_string(),
        lattice_basis: mat_to_record(sp.lattice.basis(), precision),
        lattice_denom: sp.lattice.denom(),
        gram: mat_to_record(sp.form.gram(), precision),
        gram_denom: sp.form.denom(),
        generator_images: rep
            .generator_images()
            .iter()
            .map(|m| mat_to_record(m, precision))
            .collect(),
        perfect_exponents: None,
        dual_index_exponents: Some(sp.dual_index_exponents.clone()),
        iterations: Some(sp.iterations),
        residue: emb.map(|e| ResidueEmbeddingRecord {
            block_dims: e.block_dims,
            injective: e.injective,
            images: e
                .images
                .iter()
                .map(|(g, m)| (g.clone(), fqmat_to_record(m)))
                .collect(),
            charpolys: e
                .charpoly_table
                .iter()
                .map(|(g, cp)| (g.clone(), cp.clone()))
                .collect(),
            form_bar: fqmat_to_record(&e.form_bar),
            form_tilde: fqmat_to_record(&e.form_tilde),
        }),
        hypotheses_met,
        success,
    }
}

pub fn residue_record(out: &ResidueObstruction) -> ResidueRecord {
    ResidueRecord {
        half_dim: out.half_dim,
        solution_dim: out.solution_dim,
        enumerated: out.enumerated.to_string(),
        all_degenerate: out.all_degenerate,
        identity_one: out.identity_one,
        identity_two: out.identity_two,
        solution_basis: out.solution_basis.iter().map(fqmat_to_record).collect(),
    }
}

pub fn scenario_record(out: &AbvarOutcome, precision: u32) -> ScenarioRecord {
    ScenarioRecord {
        p: out.p,
        b: out.b,
        dimension: out.dimension,
        obstruction: obstruction_record(&out.oracle, precision, None),
        conclusion: out.conclusion.clone(),
    }
}

// ---- re-verification -------------------------------------------------------

/// Re-run every exact check the certificate's claim rests on, using only
/// the embedded data. Returns whether the claim reproduces.
pub fn check_certificate(cert: &Certificate) -> Result<bool> {
    if cert.schema_version != SCHEMA_VERSION {
        return Err(Error::BadSpec(format!(
            "unsupported schema version '{}'",
            cert.schema_version
        )));
    }
    let ring = cert
        .setting
        .ring
        .rebuild(cert.setting.prime, cert.precision)?;
    match &cert.result {
        CertResult::RingInfo(info) => {
            let ok = info.e == ring.e()
                && info.f == ring.f()
                && ring.from_i64(ring.prime() as i64).val_ext()? == info.ell_valuation
                && ring.uniformizer().val_ext()? == info.uniformizer_valuation
                && info.ell_valuation == info.e as u32;
            Ok(ok)
        }
        CertResult::Witness(w) => check_witness(&ring, w),
        CertResult::Obstruction(o) => check_obstruction(&ring, o),
        CertResult::ResidueObstruction(r) => check_residue(cert.setting.prime, r),
        CertResult::Scenario(s) => {
            let r = if cert.setting.p == Some(2) {
                1
            } else {
                (cert.setting.p.unwrap_or(2) - 1) / 2
            };
            let d_ok = s.dimension == r * (cert.setting.prime - 1) + s.b as u64;
            Ok(d_ok && check_obstruction(&ring, &s.obstruction)?)
        }
    }
}

fn check_witness(ring: &Ring, w: &WitnessRecord) -> Result<bool> {
    let symmetry = symmetry_from_str(&w.symmetry)?;
    let basis = mat_from_record(ring, &w.lattice_basis)?;
    let gram = mat_from_record(ring, &w.gram)?;
    let lattice = Lattice::from_generators(&basis, w.lattice_denom)?;
    let form = BilinearForm::new(gram, w.gram_denom, symmetry)?;
    // invariance under every embedded generator image
    for rec in &w.generator_images {
        let img = mat_from_record(ring, rec)?;
        if !form.invariant_under(&img)? {
            return Ok(false);
        }
        // the images must also stabilize the lattice
        let moved = Lattice::from_generators(&img.mul(lattice.basis()), lattice.denom())?;
        if moved != lattice {
            return Ok(false);
        }
    }
    if let Some(exps) = &w.perfect_exponents {
        let cert = form.is_perfect_on(&lattice)?;
        if cert.exponents != *exps {
            return Ok(false);
        }
        if w.success && !cert.perfect {
            return Ok(false);
        }
    }
    if let Some(exps) = &w.dual_index_exponents {
        let dual = lattice.dual(&form)?;
        if !lattice.contains(&dual.scaled_by_pi(1))? {
            return Ok(false);
        }
        if dual.index_exponents(&lattice)? != *exps {
            return Ok(false);
        }
    }
    if let Some(res) = &w.residue {
        let field = ring.residue_field();
        let mut all_identity_nontrivial = true;
        for ((g, img_rec), (g2, cp)) in res.images.iter().zip(&res.charpolys) {
            if g != g2 {
                return Ok(false);
            }
            let img = fqmat_from_record(&field, img_rec);
            let mut want: Vec<Vec<u64>> = img.charpoly();
            for c in want.iter_mut() {
                c.resize(field.f, 0);
            }
            let mut got = cp.clone();
            for c in got.iter_mut() {
                c.resize(field.f, 0);
            }
            if want != got {
                return Ok(false);
            }
            let is_id = g.iter().all(|&c| c == 0);
            if !is_id && img.is_identity() {
                all_identity_nontrivial = false;
            }
        }
        if res.injective != all_identity_nontrivial {
            return Ok(false);
        }
        let fb = fqmat_from_record(&field, &res.form_bar);
        let ft = fqmat_from_record(&field, &res.form_tilde);
        if fb.rows > 0 && field.is_zero(&fb.det()) {
            return Ok(false);
        }
        if ft.rows > 0 && field.is_zero(&ft.det()) {
            return Ok(false);
        }
        if res.block_dims.0 != fb.rows || res.block_dims.1 != ft.rows {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_obstruction(ring: &Ring, o: &ObstructionRecord) -> Result<bool> {
    if o.cells.is_empty() {
        return Ok(false);
    }
    for cell in &o.cells {
        let gram = mat_from_record(ring, &cell.gram)?;
        let s = snf(&gram)?;
        if s.rank < gram.rows() {
            return Ok(false);
        }
        if s.exponents != cell.exponents {
            return Ok(false);
        }
        if s.exponent_sum() != cell.det_valuation {
            return Ok(false);
        }
        if cell.exponents.iter().all(|&e| e == 0) {
            // a perfect cell: the obstruction claim is false
            return Ok(false);
        }
    }
    if let Some(control) = &o.positive_control_exponents {
        if control.iter().any(|&e| e != 0) {
            return Ok(false);
        }
    }
    if o.cross_block_vanishes == Some(false) {
        return Ok(false);
    }
    Ok(o.all_obstructed)
}

fn check_residue(prime: u64, r: &ResidueRecord) -> Result<bool> {
    let field = Fq::prime_field(prime);
    let basis: Vec<FqMat> = r
        .solution_basis
        .iter()
        .map(|rec| fqmat_from_record(&field, rec))
        .collect();
    if basis.len() != r.solution_dim {
        return Ok(false);
    }
    let n = basis.first().map_or(0, |m| m.rows);
    let t2 = n / 2;
    for f in &basis {
        for i in 0..n {
            for j in 0..n {
                // alternating shape
                let fij = f.at(i, j).clone();
                let fji = f.at(j, i).clone();
                if field.add(&fij, &fji) != field.zero() {
                    return Ok(false);
                }
            }
        }
        for i in 0..t2 {
            for j in 0..t2 {
                if r.identity_one && !field.is_zero(f.at(i, j)) {
                    return Ok(false);
                }
                if r.identity_two && f.at(i, t2 + j) != f.at(j, t2 + i) {
                    return Ok(false);
                }
            }
        }
    }
    // re-enumerate the solution space and re-check degeneracy; an empty
    // space makes the degeneracy claim vacuous
    let dim = basis.len();
    if dim == 0 {
        return Ok(r.all_degenerate);
    }
    let coeffs = field.elements();
    let mut idx = vec![0usize; dim];
    loop {
        let mut f = FqMat::zero(&field, n, n);
        for (k, &ci) in idx.iter().enumerate() {
            let c = &coeffs[ci];
            if field.is_zero(c) {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    let add = field.mul(c, basis[k].at(i, j));
                    let cur = field.add(f.at(i, j), &add);
                    f.set(i, j, cur);
                }
            }
        }
        if !field.is_zero(&f.det()) {
            return Ok(false);
        }
        let mut k = 0;
        loop {
            if k == dim {
                return Ok(r.all_degenerate);
            }
            idx[k] += 1;
            if idx[k] < coeffs.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn to_json(cert: &Certificate) -> String {
    serde_json::to_string_pretty(cert).expect("certificate serialization cannot fail")
}

pub fn from_json(s: &str) -> Result<Certificate> {
    serde_json::from_str(s).map_err(|e| Error::BadSpec(format!("certificate parse error: {}", e)))
}
