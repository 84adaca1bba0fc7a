use std::collections::HashSet;

use btstrata_core::chainring::{ChainRing, ChainRingElement};
use btstrata_core::gf::{default_modulus, GaloisField};
use proptest::prelude::*;

/// Schoolbook product of coefficient vectors modulo (M, f), f monic.
fn poly_mul_mod(a: &[u64], b: &[u64], f: &[u32], modulus: u64) -> Vec<u64> {
    let d = f.len() - 1;
    let mut prod = vec![0u64; 2 * d];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % modulus;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &fi) in f[..d].iter().enumerate() {
            prod[k - d + i] = (prod[k - d + i] + modulus - (c * fi as u64) % modulus) % modulus;
        }
    }
    prod.truncate(d);
    prod
}

fn field_cases() -> Vec<(u32, u32)> {
    vec![(3, 1), (3, 2), (3, 3), (3, 4), (5, 1), (5, 2), (7, 2)]
}

#[test]
fn field_product_matches_polynomial_model() {
    for (p, m) in field_cases() {
        let f = GaloisField::standard(p, 1, m).unwrap();
        let modulus = default_modulus(p, m);
        let step = (f.order() / 60).max(1) as usize;
        for a in f.elements().step_by(step) {
            for b in f.elements().step_by(step) {
                let ca: Vec<u64> = f.coefficients(a).into_iter().map(u64::from).collect();
                let cb: Vec<u64> = f.coefficients(b).into_iter().map(u64::from).collect();
                let want: Vec<u32> = poly_mul_mod(&ca, &cb, &modulus, p as u64).into_iter().map(|x| x as u32).collect();
                assert_eq!(f.coefficients(f.mul(a, b)), want, "p={p} m={m}");
                let sum: Vec<u32> = f.coefficients(a).iter().zip(f.coefficients(b)).map(|(x, y)| (x + y) % p).collect();
                assert_eq!(f.coefficients(f.add(a, b)), sum);
            }
        }
    }
}

#[test]
fn frobenius_fixed_field_and_cyclic_group() {
    for (p, m) in field_cases() {
        let f = GaloisField::standard(p, 1, m).unwrap();
        let fixed: Vec<u32> = f.elements().filter(|&x| f.pow(x, p as u64) == x).collect();
        assert_eq!(fixed.len(), p as usize);
        assert_eq!(f.base_field_elements(), fixed);
        for x in f.elements() {
            assert_eq!(f.frob(x), f.pow(x, p as u64));
            assert_eq!(f.frob_inv(f.frob(x)), x);
        }
        let g = f.generator();
        assert_eq!(f.mult_order(g), f.order() as u64 - 1);
        let powers: HashSet<u32> = (0..f.order() as u64 - 1).map(|e| f.pow(g, e)).collect();
        assert_eq!(powers.len(), f.order() as usize - 1);
        assert!(!powers.contains(&0));
    }
}

#[test]
fn field_inverses_by_search() {
    let f = GaloisField::standard(3, 1, 3).unwrap();
    for a in f.elements().skip(1) {
        let found: Vec<u32> = f.elements().filter(|&b| f.mul(a, b) == 1).collect();
        assert_eq!(found, vec![f.inv(a).unwrap()]);
    }
    assert!(f.inv(0).is_err());
}

proptest! {
    #[test]
    fn field_axioms(m in 1u32..=4, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = GaloisField::standard(3, 1, m).unwrap();
        let (a, b, c) = (a % f.order(), b % f.order(), c % f.order());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.frob(f.mul(a, b)), f.mul(f.frob(a), f.frob(b)));
        prop_assert_eq!(f.frob(f.add(a, b)), f.add(f.frob(a), f.frob(b)));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }
}

/// (a0 + a1π)(b0 + b1π) = a0b0 + p·a1b1 + (a0b1 + a1b0)π over GR(p^k, m).
fn ring_mul_model(r: &ChainRing, x: &ChainRingElement, y: &ChainRingElement) -> (Vec<u64>, Vec<u64>) {
    let p = r.p() as u64;
    let k = r.nil().div_ceil(2);
    let pk = p.pow(k);
    let f = default_modulus(r.p(), r.level());
    let (a0, a1) = r.parts(x);
    let (b0, b1) = r.parts(y);
    let w = |v: Vec<u32>| v.into_iter().map(u64::from).collect::<Vec<u64>>();
    let (a0, a1, b0, b1) = (w(a0), w(a1), w(b0), w(b1));
    let c0a = poly_mul_mod(&a0, &b0, &f, pk);
    let c0b = poly_mul_mod(&a1, &b1, &f, pk);
    let c1a = poly_mul_mod(&a0, &b1, &f, pk);
    let c1b = poly_mul_mod(&a1, &b0, &f, pk);
    let c0 = c0a.iter().zip(&c0b).map(|(u, v)| (u + p * v) % pk).collect();
    let c1 = c1a.iter().zip(&c1b).map(|(u, v)| (u + v) % pk).collect();
    (c0, c1)
}

fn ring_cases() -> Vec<(u32, u32)> {
    // (nilpotency N, level m); all with even N.
    vec![(2, 1), (2, 2), (4, 1), (4, 2), (2, 3)]
}

#[test]
fn ring_product_matches_model() {
    for (n, m) in ring_cases() {
        let r = ChainRing::standard(3, n, m).unwrap();
        let els = r.elements();
        assert_eq!(els.len() as u64, r.size());
        let step = (els.len() / 70).max(1);
        for x in els.iter().step_by(step) {
            for y in els.iter().step_by(step) {
                let (c0, c1) = ring_mul_model(&r, x, y);
                let (d0, d1) = r.parts(&r.mul(x, y));
                let w = |v: Vec<u32>| v.into_iter().map(u64::from).collect::<Vec<u64>>();
                assert_eq!((w(d0), w(d1)), (c0, c1), "N={n} m={m}");
            }
        }
    }
}

#[test]
fn pi_squared_is_p_and_nilpotent() {
    for (n, m) in ring_cases() {
        let r = ChainRing::standard(3, n, m).unwrap();
        assert_eq!(r.mul(&r.pi(), &r.pi()), r.from_int(3));
        assert!(ChainRing::is_zero(&r.pi_pow(n)));
        assert!(!ChainRing::is_zero(&r.pi_pow(n - 1)));
    }
}

#[test]
fn ideal_chain_and_units() {
    for (n, m) in [(2u32, 1u32), (2, 2), (4, 1)] {
        let r = ChainRing::standard(3, n, m).unwrap();
        let els = r.elements();
        let q = 3u64.pow(m);
        let one = r.one();
        let mut units = 0;
        for x in &els {
            let has_inverse = els.iter().any(|y| r.mul(x, y) == one);
            assert_eq!(has_inverse, r.is_unit(x));
            if has_inverse {
                units += 1;
                assert_eq!(r.mul(x, &r.inv(x).unwrap()), one);
            }
        }
        assert_eq!(units, r.size() - r.size() / q);
        // The ideal generated by x is (π^v(x)): same set of multiples.
        for x in els.iter().step_by(5) {
            let gen: HashSet<ChainRingElement> = els.iter().map(|y| r.mul(x, y)).collect();
            let v = r.valuation(x).unwrap_or(n);
            let pv = r.pi_pow(v);
            let want: HashSet<ChainRingElement> = els.iter().map(|y| r.mul(&pv, y)).collect();
            assert_eq!(gen, want);
            assert_eq!(gen.len() as u64, q.pow(n - v));
        }
    }
}

#[test]
fn involutions_are_ring_automorphisms() {
    for (n, m) in ring_cases() {
        let r = ChainRing::standard(3, n, m).unwrap();
        let els = r.elements();
        let step = (els.len() / 40).max(1);
        for x in els.iter().step_by(step) {
            assert_eq!(r.conj(&r.conj(x)), *x);
            assert_eq!(r.sigma_inv(&r.sigma(x)), *x);
            assert_eq!(r.conj(&r.sigma(x)), r.sigma(&r.conj(x)));
            let mut s = *x;
            for _ in 0..m {
                s = r.sigma(&s);
            }
            assert_eq!(s, *x);
            let f = r.residue_field();
            assert_eq!(r.residue(&r.sigma(x)), f.frob(r.residue(x)));
            for y in els.iter().step_by(step) {
                assert_eq!(r.conj(&r.mul(x, y)), r.mul(&r.conj(x), &r.conj(y)));
                assert_eq!(r.sigma(&r.mul(x, y)), r.mul(&r.sigma(x), &r.sigma(y)));
                assert_eq!(r.sigma(&r.add(x, y)), r.add(&r.sigma(x), &r.sigma(y)));
            }
        }
        assert_eq!(r.conj(&r.pi()), r.neg(&r.pi()));
        assert_eq!(r.sigma(&r.pi()), r.pi());
    }
}
