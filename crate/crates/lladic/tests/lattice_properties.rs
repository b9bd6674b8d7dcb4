//! Randomized property suites for the lattice layer, over Z_5 and over the
//! ramified tower Z_7[ζ_7]. Seeded, so failures reproduce.

use lladic::lattice::{BilinearForm, Lattice};
use lladic::localring::Ring;
use lladic::mat::{snf, Mat};
use lladic::rng::SplitMix64;

fn random_lattice(ring: &Ring, dim: usize, rng: &mut SplitMix64) -> Lattice {
    // triangular with unit·π^k diagonal: nonsingular, and every lattice has
    // a basis of this shape
    let mut m = Mat::zero(ring, dim, dim);
    for i in 0..dim {
        let unit = ring.from_i64(1 + rng.below(ring.prime() - 1) as i64);
        let power = rng.below(3) as u32;
        m.set(i, i, unit.mul_by_pi_pow(power));
        for j in 0..i {
            if rng.below(2) == 0 {
                let c = ring.from_i64(rng.i64_range(-6, 7));
                m.set(i, j, c.mul_by_pi_pow(rng.below(2) as u32));
            }
        }
    }
    Lattice::from_generators(&m, rng.i64_range(-1, 2) as i32).unwrap()
}

fn rings() -> Vec<(Ring, usize)> {
    let z5 = Ring::base(5, 32);
    let z7zeta = Ring::cyclotomic_ell(&Ring::base(7, 32)).unwrap();
    vec![(z5, 3), (z7zeta, 2)]
}

#[test]
fn dual_is_an_involution() {
    for (ring, dim) in rings() {
        let f = BilinearForm::identity_form(&ring, dim);
        let mut rng = SplitMix64::new(11);
        for _ in 0..40 {
            let t = random_lattice(&ring, dim, &mut rng);
            let dd = t.dual(&f).unwrap().dual(&f).unwrap();
            assert_eq!(dd, t);
        }
    }
}

#[test]
fn dual_reverses_inclusions() {
    for (ring, dim) in rings() {
        let f = BilinearForm::identity_form(&ring, dim);
        let mut rng = SplitMix64::new(13);
        for _ in 0..40 {
            let a0 = random_lattice(&ring, dim, &mut rng);
            let b = random_lattice(&ring, dim, &mut rng);
            let a = a0.sum(&b).unwrap(); // b ⊆ a
            assert!(a.contains(&b).unwrap());
            let da = a.dual(&f).unwrap();
            let db = b.dual(&f).unwrap();
            assert!(db.contains(&da).unwrap());
        }
    }
}

#[test]
fn index_is_multiplicative_along_chains() {
    for (ring, dim) in rings() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..40 {
            let c0 = random_lattice(&ring, dim, &mut rng);
            let b0 = random_lattice(&ring, dim, &mut rng);
            let a0 = random_lattice(&ring, dim, &mut rng);
            // force a chain a ⊇ b ⊇ c
            let b = b0.intersect(&a0).unwrap();
            let c = c0.intersect(&b).unwrap();
            let a = a0;
            let ab = a.index_total(&b).unwrap();
            let bc = b.index_total(&c).unwrap();
            let ac = a.index_total(&c).unwrap();
            assert_eq!(ac, ab + bc);
        }
    }
}

#[test]
fn sum_and_intersect_bracket_both_inputs() {
    for (ring, dim) in rings() {
        let mut rng = SplitMix64::new(19);
        for _ in 0..40 {
            let a = random_lattice(&ring, dim, &mut rng);
            let b = random_lattice(&ring, dim, &mut rng);
            let s = a.sum(&b).unwrap();
            let i = a.intersect(&b).unwrap();
            assert!(s.contains(&a).unwrap());
            assert!(s.contains(&b).unwrap());
            assert!(a.contains(&i).unwrap());
            assert!(b.contains(&i).unwrap());
            // |a/(a∩b)| = |(a+b)/b|
            assert_eq!(
                a.index_total(&i).unwrap(),
                s.index_total(&b).unwrap()
            );
        }
    }
}

#[test]
fn snf_exponents_are_unimodular_invariants() {
    for (ring, dim) in rings() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..30 {
            let t = random_lattice(&ring, dim, &mut rng);
            let m = t.basis().clone();
            let base = snf(&m).unwrap().exponents;
            // random elementary row/column operations
            let mut u = Mat::identity(&ring, dim);
            let mut w = Mat::identity(&ring, dim);
            for _ in 0..4 {
                let i = rng.below(dim as u64) as usize;
                let j = rng.below(dim as u64) as usize;
                if i != j {
                    let c = ring.from_i64(rng.i64_range(-5, 6));
                    let mut e = Mat::identity(&ring, dim);
                    e.set(i, j, c);
                    if rng.below(2) == 0 {
                        u = u.mul(&e);
                    } else {
                        w = w.mul(&e);
                    }
                }
            }
            let moved = u.mul(&m).mul(&w);
            assert_eq!(snf(&moved).unwrap().exponents, base);
        }
    }
}

#[test]
fn intersect_matches_the_dual_identity() {
    for (ring, dim) in rings() {
        let f = BilinearForm::identity_form(&ring, dim);
        let mut rng = SplitMix64::new(29);
        for _ in 0..25 {
            let a = random_lattice(&ring, dim, &mut rng);
            let b = random_lattice(&ring, dim, &mut rng);
            let lhs = a.intersect(&b).unwrap();
            let rhs = a
                .dual(&f)
                .unwrap()
                .sum(&b.dual(&f).unwrap())
                .unwrap()
                .dual(&f)
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
