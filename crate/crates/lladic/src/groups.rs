//! Structured finite group families: cyclic groups, generalized quaternion
//! groups Q_m, the semidirect products N_p, the distinguished cyclic group
//! μ_ℓ, and direct products of these.
//!
//! Elements are short coordinate vectors in family normal form; products
//! are word rewriting. Everything is small enough to enumerate, and the
//! structural predicates work by enumeration so they cannot drift from the
//! definitions.

use std::collections::HashSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupFamily {
    /// C_n.
    Cyclic(u64),
    /// Q_m of order 4m: a^{2m} = 1, b^2 = a^m, bab^{-1} = a^{-1}.
    Quaternion(u64),
    /// N_p of order 2p(p-1) for odd p (μ_p ⋊ C_{2(p-1)}); N_2 = Q_2.
    Np(u64),
    /// μ_ℓ: cyclic of order ℓ, tagged as the ℓ-part.
    Mu(u64),
    Product(Vec<GroupFamily>),
}

pub type Element = Vec<u32>;

/// A word in the group generators: (generator index, exponent) pairs.
pub type Word = Vec<(usize, u64)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    family: GroupFamily,
}

#[derive(Debug, Clone)]
pub struct DellSplit {
    /// The normal subgroup of order prime to ℓ.
    pub normal_subgroup: Vec<Element>,
    /// Generator of a cyclic ℓ-subgroup L with G = N ⋊ L.
    pub cyclic_generator: Element,
    /// |L| = ℓ-part of |G|.
    pub ell_part: u64,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub inertia_type: bool,
    pub d_ell_split: Option<DellSplit>,
}

fn smallest_primitive_root(p: u64) -> u64 {
    'outer: for g in 2..p {
        let mut acc = g % p;
        let mut count = 1;
        while acc != 1 {
            acc = acc * g % p;
            count += 1;
            if count > p {
                continue 'outer;
            }
        }
        if count == p - 1 {
            return g;
        }
    }
    panic!("no primitive root mod {}", p);
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FiniteGroup {
    pub fn build(family: GroupFamily) -> Result<FiniteGroup> {
        match &family {
            GroupFamily::Cyclic(n) => {
                if *n == 0 {
                    return Err(Error::BadSpec("C_0 is not a group".into()));
                }
            }
            GroupFamily::Quaternion(m) => {
                if *m < 2 {
                    return Err(Error::BadSpec("Q_m needs m ≥ 2".into()));
                }
            }
            GroupFamily::Np(p) => {
                if !is_prime(*p) {
                    return Err(Error::BadSpec(format!("N_p needs p prime, got {}", p)));
                }
                if *p == 2 {
                    // N_2 = Q_2
                    return FiniteGroup::build(GroupFamily::Quaternion(2));
                }
            }
            GroupFamily::Mu(l) => {
                if !is_prime(*l) {
                    return Err(Error::BadSpec(format!("μ_ℓ needs ℓ prime, got {}", l)));
                }
            }
            GroupFamily::Product(parts) => {
                if parts.is_empty() {
                    return Err(Error::BadSpec("empty product".into()));
                }
                for p in parts {
                    FiniteGroup::build(p.clone())?;
                    if matches!(p, GroupFamily::Product(_)) {
                        return Err(Error::BadSpec("nested products are not supported".into()));
                    }
                }
            }
        }
        let g = FiniteGroup { family };
        debug_assert!(g.order() <= 1 << 20);
        Ok(g)
    }

    /// Group specs for the command line: "Q2", "N3", "C6", "mu5", and
    /// products joined by "x" such as "Q2xmu5".
    pub fn parse(spec: &str) -> Result<FiniteGroup> {
        let mut parts = vec![];
        for tok in spec.split('x') {
            let fam = if let Some(rest) = tok.strip_prefix("mu") {
                GroupFamily::Mu(rest.parse().map_err(|_| bad_token(tok))?)
            } else if let Some(rest) = tok.strip_prefix('Q') {
                GroupFamily::Quaternion(rest.parse().map_err(|_| bad_token(tok))?)
            } else if let Some(rest) = tok.strip_prefix('N') {
                GroupFamily::Np(rest.parse().map_err(|_| bad_token(tok))?)
            } else if let Some(rest) = tok.strip_prefix('C') {
                GroupFamily::Cyclic(rest.parse().map_err(|_| bad_token(tok))?)
            } else {
                return Err(bad_token(tok));
            };
            parts.push(fam);
        }
        if parts.len() == 1 {
            FiniteGroup::build(parts.pop().unwrap())
        } else {
            FiniteGroup::build(GroupFamily::Product(parts))
        }
    }

    pub fn family(&self) -> &GroupFamily {
        &self.family
    }

    pub fn order(&self) -> u64 {
        family_order(&self.family)
    }

    fn factors(&self) -> Vec<&GroupFamily> {
        match &self.family {
            GroupFamily::Product(parts) => parts.iter().collect(),
            f => vec![f],
        }
    }

    fn coord_widths(&self) -> Vec<usize> {
        self.factors().iter().map(|f| family_width(f)).collect()
    }

    pub fn identity(&self) -> Element {
        vec![0; self.coord_widths().iter().sum()]
    }

    pub fn is_identity(&self, a: &Element) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = Vec::with_capacity(a.len());
        let mut off = 0;
        for f in self.factors() {
            let w = family_width(f);
            let part = family_mul(f, &a[off..off + w], &b[off..off + w]);
            out.extend(part);
            off += w;
        }
        out
    }

    pub fn inv(&self, a: &Element) -> Element {
        let mut out = Vec::with_capacity(a.len());
        let mut off = 0;
        for f in self.factors() {
            let w = family_width(f);
            out.extend(family_inv(f, &a[off..off + w]));
            off += w;
        }
        out
    }

    pub fn pow(&self, a: &Element, mut k: u64) -> Element {
        let mut acc = self.identity();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: &Element) -> u64 {
        let mut acc = a.clone();
        let mut k = 1;
        while !self.is_identity(&acc) {
            acc = self.mul(&acc, a);
            k += 1;
        }
        k
    }

    pub fn elements(&self) -> Vec<Element> {
        let mut out = vec![vec![]];
        for f in self.factors() {
            let part = family_elements(f);
            let mut next = Vec::with_capacity(out.len() * part.len());
            for prefix in &out {
                for p in &part {
                    let mut e = prefix.clone();
                    e.extend(p.iter().copied());
                    next.push(e);
                }
            }
            out = next;
        }
        out
    }

    /// One generator list across all factors, in factor order.
    pub fn generators(&self) -> Vec<Element> {
        let widths = self.coord_widths();
        let total: usize = widths.iter().sum();
        let mut out = vec![];
        let mut off = 0;
        for (f, w) in self.factors().iter().zip(&widths) {
            for g in family_generators(f) {
                let mut e = vec![0u32; total];
                e[off..off + w].copy_from_slice(&g);
                out.push(e);
            }
            off += w;
        }
        out
    }

    pub fn generator_names(&self) -> Vec<String> {
        let mut out = vec![];
        for (i, f) in self.factors().iter().enumerate() {
            let prefix = if self.factors().len() > 1 {
                format!("f{}_", i)
            } else {
                String::new()
            };
            for n in family_generator_names(f) {
                out.push(format!("{}{}", prefix, n));
            }
        }
        out
    }

    /// Express an element as a product of generator powers.
    pub fn generator_word(&self, a: &Element) -> Word {
        let mut word = vec![];
        let mut off = 0;
        let mut gen_base = 0;
        for f in self.factors() {
            let w = family_width(f);
            for (gi, e) in family_word(f, &a[off..off + w]) {
                if e > 0 {
                    word.push((gen_base + gi, e));
                }
            }
            off += w;
            gen_base += family_generators(f).len();
        }
        word
    }

    /// Defining relations as pairs of generator words whose images must
    /// agree, including cross-factor commutation.
    pub fn relations(&self) -> Vec<(Word, Word)> {
        let mut rels = vec![];
        let mut gen_base = 0;
        let mut bases = vec![];
        for f in self.factors() {
            bases.push(gen_base);
            for (lhs, rhs) in family_relations(f) {
                let shift = |w: Word| -> Word {
                    w.into_iter().map(|(i, e)| (i + gen_base, e)).collect()
                };
                rels.push((shift(lhs), shift(rhs)));
            }
            gen_base += family_generators(f).len();
        }
        // cross-factor commutation
        let factors = self.factors();
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                for (gi, _) in family_generators(factors[i]).iter().enumerate() {
                    for (gj, _) in family_generators(factors[j]).iter().enumerate() {
                        let a = bases[i] + gi;
                        let b = bases[j] + gj;
                        rels.push((vec![(a, 1), (b, 1)], vec![(b, 1), (a, 1)]));
                    }
                }
            }
        }
        rels
    }

    /// Structural classification by enumeration: a normal Sylow-p subgroup
    /// with cyclic quotient, and the (D_ℓ) split N ⋊ L.
    pub fn classify(&self, p: u64, ell: u64) -> Classification {
        let inertia_type = self.has_normal_sylow_with_cyclic_quotient(p);
        let d_ell_split = self.d_ell_split(ell);
        Classification {
            inertia_type,
            d_ell_split,
        }
    }

    fn has_normal_sylow_with_cyclic_quotient(&self, p: u64) -> bool {
        let order = self.order();
        let mut p_part = 1u64;
        let mut rest = order;
        while rest.is_multiple_of(p) {
            p_part *= p;
            rest /= p;
        }
        let all = self.elements();
        let sylow: Vec<Element> = all
            .iter()
            .filter(|g| {
                let o = self.element_order(g);
                o == 1 || is_p_power(o, p)
            })
            .cloned()
            .collect();
        if sylow.len() as u64 != p_part {
            return false;
        }
        let set: HashSet<Element> = sylow.iter().cloned().collect();
        for a in &sylow {
            for b in &sylow {
                if !set.contains(&self.mul(a, b)) {
                    return false;
                }
            }
        }
        // quotient is cyclic iff some coset has full order
        let quotient_order = order / p_part;
        all.iter().any(|g| self.coset_order(g, &set) == quotient_order)
    }

    fn coset_order(&self, g: &Element, subgroup: &HashSet<Element>) -> u64 {
        let mut acc = g.clone();
        let mut k = 1;
        while !subgroup.contains(&acc) {
            acc = self.mul(&acc, g);
            k += 1;
        }
        k
    }

    fn d_ell_split(&self, ell: u64) -> Option<DellSplit> {
        let order = self.order();
        let mut ell_part = 1u64;
        let mut rest = order;
        while rest.is_multiple_of(ell) {
            ell_part *= ell;
            rest /= ell;
        }
        let all = self.elements();
        let n: Vec<Element> = all
            .iter()
            .filter(|g| !self.element_order(g).is_multiple_of(ell))
            .cloned()
            .collect();
        if n.len() as u64 != rest {
            return None;
        }
        let nset: HashSet<Element> = n.iter().cloned().collect();
        for a in &n {
            for b in &n {
                if !nset.contains(&self.mul(a, b)) {
                    return None;
                }
            }
        }
        // find a cyclic ℓ-subgroup covering the quotient
        let gen = all.iter().find(|g| {
            let o = self.element_order(g);
            o == ell_part && (ell_part == 1 || is_p_power(o, ell))
        });
        let gen = match (ell_part, gen) {
            (1, _) => self.identity(),
            (_, Some(g)) => g.clone(),
            (_, None) => return None,
        };
        if self.coset_order(&gen, &nset) != ell_part && ell_part > 1 {
            return None;
        }
        Some(DellSplit {
            normal_subgroup: n,
            cyclic_generator: gen,
            ell_part,
        })
    }
}

fn bad_token(tok: &str) -> Error {
    Error::BadSpec(format!(
        "unrecognized group token '{}'; expected Q<m>, N<p>, C<n> or mu<l>",
        tok
    ))
}

#[cfg(test)]
fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn is_p_power(mut n: u64, p: u64) -> bool {
    if n == 1 {
        return true;
    }
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

fn family_order(f: &GroupFamily) -> u64 {
    match f {
        GroupFamily::Cyclic(n) => *n,
        GroupFamily::Quaternion(m) => 4 * m,
        GroupFamily::Np(p) => 2 * p * (p - 1),
        GroupFamily::Mu(l) => *l,
        GroupFamily::Product(parts) => parts.iter().map(family_order).product(),
    }
}

fn family_width(f: &GroupFamily) -> usize {
    match f {
        GroupFamily::Cyclic(_) | GroupFamily::Mu(_) => 1,
        GroupFamily::Quaternion(_) | GroupFamily::Np(_) => 2,
        GroupFamily::Product(_) => unreachable!("products are flattened"),
    }
}

fn family_mul(f: &GroupFamily, a: &[u32], b: &[u32]) -> Vec<u32> {
    match f {
        GroupFamily::Cyclic(n) | GroupFamily::Mu(n) => {
            vec![((a[0] as u64 + b[0] as u64) % n) as u32]
        }
        GroupFamily::Quaternion(m) => {
            let n = 2 * m;
            let (i, j) = (a[0] as u64, a[1]);
            let (k, l) = (b[0] as u64, b[1]);
            if j == 0 {
                vec![((i + k) % n) as u32, l]
            } else {
                // a^i b · a^k b^l = a^{i-k} b^{1+l}
                let base = (i + n - k % n) % n;
                if l == 0 {
                    vec![base as u32, 1]
                } else {
                    vec![((base + m) % n) as u32, 0]
                }
            }
        }
        GroupFamily::Np(p) => {
            let g = smallest_primitive_root(*p);
            let (x, s) = (a[0] as u64, a[1] as u64);
            let (y, t) = (b[0] as u64, b[1] as u64);
            // ζ^x c^s · ζ^y c^t = ζ^{x + g^s y} c^{s+t}
            let gs = crate::modp::pow_mod(g, s as u128, *p);
            let x2 = (x + gs * y) % p;
            let s2 = (s + t) % (2 * (p - 1));
            vec![x2 as u32, s2 as u32]
        }
        GroupFamily::Product(_) => unreachable!(),
    }
}

fn family_inv(f: &GroupFamily, a: &[u32]) -> Vec<u32> {
    match f {
        GroupFamily::Cyclic(n) | GroupFamily::Mu(n) => {
            vec![((n - a[0] as u64 % n) % n) as u32]
        }
        GroupFamily::Quaternion(m) => {
            let n = 2 * m;
            let (i, j) = (a[0] as u64, a[1]);
            if j == 0 {
                vec![((n - i % n) % n) as u32, 0]
            } else {
                vec![((i + m) % n) as u32, 1]
            }
        }
        GroupFamily::Np(p) => {
            let g = smallest_primitive_root(*p);
            let (x, s) = (a[0] as u64, a[1] as u64);
            let per = 2 * (p - 1);
            let sinv = (per - s % per) % per;
            let gsinv = crate::modp::pow_mod(g, sinv as u128, *p);
            // (ζ^x c^s)^{-1} = ζ^{-g^{-s} x} c^{-s}
            let xinv = (p - gsinv * x % p) % p;
            vec![xinv as u32, sinv as u32]
        }
        GroupFamily::Product(_) => unreachable!(),
    }
}

fn family_elements(f: &GroupFamily) -> Vec<Vec<u32>> {
    match f {
        GroupFamily::Cyclic(n) | GroupFamily::Mu(n) => (0..*n as u32).map(|i| vec![i]).collect(),
        GroupFamily::Quaternion(m) => {
            let n = 2 * m;
            let mut out = vec![];
            for j in 0..2u32 {
                for i in 0..n as u32 {
                    out.push(vec![i, j]);
                }
            }
            out
        }
        GroupFamily::Np(p) => {
            let mut out = vec![];
            for s in 0..(2 * (p - 1)) as u32 {
                for x in 0..*p as u32 {
                    out.push(vec![x, s]);
                }
            }
            out
        }
        GroupFamily::Product(_) => unreachable!(),
    }
}

fn family_generators(f: &GroupFamily) -> Vec<Vec<u32>> {
    match f {
        GroupFamily::Cyclic(_) | GroupFamily::Mu(_) => vec![vec![1]],
        GroupFamily::Quaternion(_) | GroupFamily::Np(_) => vec![vec![1, 0], vec![0, 1]],
        GroupFamily::Product(_) => unreachable!(),
    }
}

fn family_generator_names(f: &GroupFamily) -> Vec<String> {
    match f {
        GroupFamily::Cyclic(_) => vec!["g".into()],
        GroupFamily::Mu(_) => vec!["zeta".into()],
        GroupFamily::Quaternion(_) => vec!["a".into(), "b".into()],
        GroupFamily::Np(_) => vec!["zeta".into(), "c".into()],
        GroupFamily::Product(_) => unreachable!(),
    }
}

fn family_word(f: &GroupFamily, a: &[u32]) -> Word {
    match f {
        GroupFamily::Cyclic(_) | GroupFamily::Mu(_) => vec![(0, a[0] as u64)],
        GroupFamily::Quaternion(_) | GroupFamily::Np(_) => {
            vec![(0, a[0] as u64), (1, a[1] as u64)]
        }
        GroupFamily::Product(_) => unreachable!(),
    }
}

fn family_relations(f: &GroupFamily) -> Vec<(Word, Word)> {
    match f {
        GroupFamily::Cyclic(n) | GroupFamily::Mu(n) => vec![(vec![(0, *n)], vec![])],
        GroupFamily::Quaternion(m) => vec![
            (vec![(0, 2 * m)], vec![]),
            (vec![(1, 2)], vec![(0, *m)]),
            // b a b^{-1} = a^{-1}, written b a = a^{-1} b
            (vec![(1, 1), (0, 1)], vec![(0, 2 * m - 1), (1, 1)]),
        ],
        GroupFamily::Np(p) => {
            let g = smallest_primitive_root(*p);
            vec![
                (vec![(0, *p)], vec![]),
                (vec![(1, 2 * (p - 1))], vec![]),
                // c ζ = ζ^g c
                (vec![(1, 1), (0, 1)], vec![(0, g), (1, 1)]),
            ]
        }
        GroupFamily::Product(_) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_match_the_family_formulas() {
        assert_eq!(
            FiniteGroup::build(GroupFamily::Quaternion(2)).unwrap().order(),
            8
        );
        assert_eq!(FiniteGroup::build(GroupFamily::Np(3)).unwrap().order(), 12);
        // N_2 = Q_2
        let n2 = FiniteGroup::build(GroupFamily::Np(2)).unwrap();
        assert_eq!(n2.family(), &GroupFamily::Quaternion(2));
        let prod = FiniteGroup::build(GroupFamily::Product(vec![
            GroupFamily::Quaternion(2),
            GroupFamily::Mu(5),
        ]))
        .unwrap();
        assert_eq!(prod.order(), 40);
        assert_eq!(prod.elements().len(), 40);
    }

    #[test]
    fn enumeration_is_closed() {
        for g in [
            FiniteGroup::parse("Q2").unwrap(),
            FiniteGroup::parse("N3").unwrap(),
            FiniteGroup::parse("Q3").unwrap(),
            FiniteGroup::parse("C6").unwrap(),
            FiniteGroup::parse("Q2xmu5").unwrap(),
        ] {
            let els: HashSet<Element> = g.elements().into_iter().collect();
            assert_eq!(els.len() as u64, g.order());
            for a in &els {
                assert!(els.contains(&g.inv(a)));
                let mut seen = 0;
                for b in &els {
                    assert!(els.contains(&g.mul(a, b)));
                    seen += 1;
                }
                assert_eq!(seen, g.order());
                // inverse is two-sided
                assert!(g.is_identity(&g.mul(a, &g.inv(a))));
                assert!(g.is_identity(&g.mul(&g.inv(a), a)));
            }
        }
    }

    #[test]
    fn quaternion_relations_hold_in_the_group() {
        let q = FiniteGroup::parse("Q3").unwrap();
        let a = vec![1u32, 0];
        let b = vec![0u32, 1];
        assert_eq!(q.element_order(&a), 6);
        assert_eq!(q.element_order(&b), 4);
        assert_eq!(q.pow(&b, 2), q.pow(&a, 3));
        let bab = q.mul(&q.mul(&b, &a), &q.inv(&b));
        assert_eq!(bab, q.inv(&a));
    }

    #[test]
    fn np_and_q3_have_matching_order_statistics() {
        let n3 = FiniteGroup::parse("N3").unwrap();
        let q3 = FiniteGroup::parse("Q3").unwrap();
        let stats = |g: &FiniteGroup| {
            let mut v: Vec<u64> = g.elements().iter().map(|e| g.element_order(e)).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(stats(&n3), stats(&q3));
    }

    #[test]
    fn classification_examples() {
        // Q_2 × μ_5 at p = 2, ℓ = 5
        let g = FiniteGroup::parse("Q2xmu5").unwrap();
        let c = g.classify(2, 5);
        assert!(c.inertia_type);
        let split = c.d_ell_split.unwrap();
        assert_eq!(split.normal_subgroup.len(), 8);
        assert_eq!(split.ell_part, 5);
        assert_eq!(g.element_order(&split.cyclic_generator), 5);

        // N_3 × μ_5 at p = 3, ℓ = 5: quotient by μ_3 is cyclic of order 20
        let g = FiniteGroup::parse("N3xmu5").unwrap();
        let c = g.classify(3, 5);
        assert!(c.inertia_type);
        let split = c.d_ell_split.unwrap();
        assert_eq!(split.normal_subgroup.len(), 12);

        // abelian case
        let g = FiniteGroup::parse("C6").unwrap();
        let c = g.classify(3, 2);
        assert!(c.inertia_type);
        let split = c.d_ell_split.unwrap();
        assert_eq!(split.normal_subgroup.len(), 3);
        assert_eq!(split.ell_part, 2);
    }

    #[test]
    fn inertia_type_implies_d_ell_split_on_small_families() {
        // inertia type forces a prime-to-ℓ normal complement with cyclic
        // ℓ-quotient, for every ℓ away from p
        let groups = ["Q2", "Q3", "N3", "N5", "C12", "Q2xmu5", "N3xmu5", "Q2xmu7"];
        for spec in groups {
            let g = FiniteGroup::parse(spec).unwrap();
            for p in [2u64, 3, 5] {
                if !g.classify(p, 3).inertia_type {
                    continue;
                }
                for ell in [3u64, 5, 7, 11] {
                    if ell == p {
                        continue;
                    }
                    let c = g.classify(p, ell);
                    let split = c.d_ell_split.unwrap_or_else(|| {
                        panic!("{} inertia type at p={} but no split at ℓ={}", spec, p, ell)
                    });
                    // |N| prime to ℓ and quotient of ℓ-power order
                    assert!(gcd(split.normal_subgroup.len() as u64, ell) == 1);
                    assert_eq!(
                        g.order() / split.normal_subgroup.len() as u64,
                        split.ell_part
                    );
                }
            }
        }
    }

    #[test]
    fn quotients_of_inertia_type_stay_inertia_type() {
        // spot-check for Q_m and N_p: quotient by the center / by μ_p
        let q2 = FiniteGroup::parse("Q2").unwrap();
        assert!(q2.classify(2, 5).inertia_type);
        // Q_2 / {±1} ≅ C_2 × C_2 has a normal Sylow-2 (itself), cyclic trivial quotient
        let v4 = FiniteGroup::build(GroupFamily::Product(vec![
            GroupFamily::Cyclic(2),
            GroupFamily::Cyclic(2),
        ]))
        .unwrap();
        assert!(v4.classify(2, 5).inertia_type);
        // N_3 / μ_3 ≅ C_4
        let c4 = FiniteGroup::parse("C4").unwrap();
        assert!(c4.classify(3, 5).inertia_type);
    }

    #[test]
    fn words_and_relations_reconstruct_elements() {
        let g = FiniteGroup::parse("Q2xmu5").unwrap();
        let gens = g.generators();
        for e in g.elements() {
            let mut acc = g.identity();
            for (gi, exp) in g.generator_word(&e) {
                acc = g.mul(&acc, &g.pow(&gens[gi], exp));
            }
            assert_eq!(acc, e);
        }
        assert!(!g.relations().is_empty());
    }

    #[test]
    fn parse_errors() {
        assert!(FiniteGroup::parse("Z5").is_err());
        assert!(FiniteGroup::parse("mu4").is_err());
        assert!(FiniteGroup::parse("Q1").is_err());
    }
}
