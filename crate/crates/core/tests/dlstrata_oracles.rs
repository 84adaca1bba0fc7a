use std::collections::BTreeMap;

use btstrata_core::counting::gaussian_binomial;
use btstrata_core::dlstrata::{
    count_rprime, count_rprime_bracket, count_sprime, enumerate_r, enumerate_rprime, enumerate_rprime_bracket,
    enumerate_s, enumerate_sprime, estimate_dimension, index_identity, sprime_fiber_tally,
};
use btstrata_core::formspace::{FormLevel, FormSpace, Subspace};
use btstrata_core::lattices::{HermitianAmbient, LatticeModule};
use btstrata_core::linalg::{self, Mat};
use btstrata_core::Error;

fn all_of_dim(level: &FormLevel, d: usize) -> Vec<Subspace> {
    let mut out = Vec::new();
    linalg::visit_all_rref(&level.field, level.dim(), d, &mut |m: &Mat| out.push(level.subspace(m.clone())));
    out
}

fn isotropic(level: &FormLevel, rows: &Mat) -> bool {
    rows.iter().all(|x| rows.iter().all(|y| level.pair(x, y) == 0))
}

fn frob_rows(level: &FormLevel, rows: &Mat) -> Mat {
    rows.iter().map(|r| r.iter().map(|&x| level.field.frob(x)).collect()).collect()
}

fn stacked_rank(level: &FormLevel, a: &Mat, b: &Mat) -> usize {
    let mut m = a.clone();
    m.extend(b.iter().cloned());
    linalg::rank(&level.field, &m)
}

/// dim(U ∩ ΦU) from ranks.
fn defect(level: &FormLevel, u: &Mat) -> usize {
    2 * u.len() - stacked_rank(level, u, &frob_rows(level, u))
}

fn sp(t: usize, m: u32) -> FormLevel {
    FormSpace::standard_symplectic(3, 1, t).unwrap().at_level(m).unwrap()
}

/// S' from its defining conditions: U isotropic of dim t-h, and U' of dim
/// t+h-1 orthogonal to both U and ΦU.
fn brute_sprime(level: &FormLevel, h: usize) -> (usize, usize) {
    let t = level.dim() / 2;
    let us: Vec<Subspace> = all_of_dim(level, t - h).into_iter().filter(|u| isotropic(level, u.rows())).collect();
    let s = us.iter().filter(|u| defect(level, u.rows()) + 1 >= t - h).count();
    let ups = all_of_dim(level, t + h - 1);
    let mut pairs = 0;
    for u in &us {
        let fu = frob_rows(level, u.rows());
        for up in &ups {
            let ok = up.rows().iter().all(|x| u.rows().iter().chain(&fu).all(|y| level.pair(x, y) == 0));
            if ok {
                pairs += 1;
            }
        }
    }
    (s, pairs)
}

#[test]
fn sprime_matches_definition_and_frozen_counts() {
    // (t, h, m) -> |S'(F_{3^m})|
    let frozen = [((1, 0, 1), 4), ((1, 0, 2), 10), ((2, 0, 1), 160), ((2, 0, 2), 640), ((2, 1, 1), 520), ((2, 1, 2), 4420)];
    for ((t, h, m), want) in frozen {
        let level = sp(t, m);
        let (s, pairs) = brute_sprime(&level, h);
        assert_eq!(pairs, want, "t={t} h={h} m={m}");
        assert_eq!(enumerate_s(&level, h).unwrap().len(), s);
        let listed = enumerate_sprime(&level, h).unwrap();
        assert_eq!(listed.len(), pairs);
        assert_eq!(count_sprime(&level, h).unwrap(), pairs as u128);
        for pt in &listed {
            assert!(level.is_isotropic(&pt.u));
            assert_eq!((pt.u.dim(), pt.uprime.dim()), (t - h, t + h - 1));
        }
    }
}

#[test]
fn sprime_fiber_law() {
    for (t, h, m) in [(2, 0, 1), (2, 0, 2), (2, 1, 2), (3, 1, 1)] {
        let level = sp(t, m);
        let q = level.field.order() as u64;
        let tally = sprime_fiber_tally(&level, h).unwrap();
        assert_eq!((tally.fixed_violations, tally.nonfixed_violations, tally.outside_violations), (0, 0, 0));
        // Fixed U: fiber P^{t+h-1}, i.e. hyperplanes of a (t+h)-space. Others: one point.
        let fixed_fiber = gaussian_binomial((t + h) as u32, (t + h - 1) as u32, q);
        assert_eq!(tally.pairs, tally.fixed as u128 * fixed_fiber + tally.nonfixed as u128);
        assert_eq!(tally.s_points, tally.fixed + tally.nonfixed);
        // Φ-fixed isotropic (t-h)-spaces are the rational ones.
        let rational = btstrata_core::counting::symplectic_isotropic_count(t as u32, (t - h) as u32, 3);
        assert_eq!(tally.fixed as u128, rational);
    }
}

fn orth_levels() -> Vec<(&'static str, FormSpace)> {
    let amb4 = HermitianAmbient::new(4, 1, 3, 1).unwrap();
    let amb5 = HermitianAmbient::new(5, 1, 3, 1).unwrap();
    vec![
        ("n4_lambda0", FormSpace::orthogonal_quotient(&LatticeModule::lambda0(&amb4)).unwrap()),
        ("n5_lambda0", FormSpace::orthogonal_quotient(&LatticeModule::lambda0(&amb5)).unwrap()),
        ("n5_lambda1", FormSpace::orthogonal_quotient(&LatticeModule::standard(&amb5, -1).unwrap()).unwrap()),
    ]
}

/// R' from its definition: U isotropic of dim d, U' a (d-1)-subspace of
/// both U and ΦU.
fn brute_rprime(level: &FormLevel, d: usize) -> Vec<(Subspace, Subspace)> {
    let us: Vec<Subspace> = all_of_dim(level, d).into_iter().filter(|u| isotropic(level, u.rows())).collect();
    let ups = all_of_dim(level, d - 1);
    let mut out = Vec::new();
    for u in &us {
        let fu = frob_rows(level, u.rows());
        for up in &ups {
            if stacked_rank(level, u.rows(), up.rows()) == d && stacked_rank(level, &fu, up.rows()) == d {
                out.push((u.clone(), up.clone()));
            }
        }
    }
    out
}

#[test]
fn rprime_matches_definition() {
    for (name, fs) in orth_levels() {
        let w = fs.at_level(1).unwrap().witt_index();
        for m in 1..=2 {
            let level = fs.at_level(m).unwrap();
            for d in 1..=w {
                let (t, h) = (0, d);
                let brute = brute_rprime(&level, d);
                let listed = enumerate_rprime(&level, t, h).unwrap();
                let mut got: Vec<(Subspace, Subspace)> = listed.iter().map(|p| (p.u.clone(), p.uprime.clone())).collect();
                got.sort();
                let mut want = brute.clone();
                want.sort();
                assert_eq!(got, want, "{name} m={m} d={d}");
                assert_eq!(count_rprime(&level, t, h).unwrap(), brute.len() as u128);
                let r = enumerate_r(&level, t, h).unwrap();
                let defect_ok = all_of_dim(&level, d)
                    .into_iter()
                    .filter(|u| isotropic(&level, u.rows()) && defect(&level, u.rows()) + 1 >= d)
                    .count();
                assert_eq!(r.len(), defect_ok);
            }
        }
    }
}

#[test]
fn rprime_bracket_is_the_part_inside_w() {
    let (_, fs) = orth_levels().swap_remove(1);
    for m in 1..=2 {
        let level = fs.at_level(m).unwrap();
        for wdim in 2..=4 {
            // A rational subspace: the first wdim coordinate vectors.
            let rows: Mat = (0..wdim).map(|i| (0..level.dim()).map(|j| u32::from(i == j)).collect()).collect();
            let w = level.subspace(rows);
            let full = enumerate_rprime(&level, 0, 2).unwrap();
            let mut inside: Vec<(Subspace, Subspace)> =
                full.iter().filter(|p| level.contains(&w, &p.u).unwrap()).map(|p| (p.u.clone(), p.uprime.clone())).collect();
            inside.sort();
            let bracket = enumerate_rprime_bracket(&level, &w, 0, 2).unwrap();
            assert_eq!(bracket.len(), inside.len());
            assert!(bracket.iter().zip(&inside).all(|(a, b)| (&a.u, &a.uprime) == (&b.0, &b.1)));
            assert_eq!(count_rprime_bracket(&level, &w, 0, 2).unwrap(), inside.len() as u128);
        }
    }
}

#[test]
fn index_identity_by_ranks() {
    for t in [1, 2] {
        for m in 1..=2 {
            let level = sp(t, m);
            let mut checked = 0;
            for d in 1..=t {
                for u in all_of_dim(&level, d).into_iter().filter(|u| isotropic(&level, u.rows())) {
                    let ud = level.dual(&u);
                    let lhs = ud.dim() - level.intersect(&ud, &level.frobenius(&ud)).unwrap().dim();
                    let rhs = d - defect(&level, u.rows());
                    assert_eq!(lhs, rhs);
                    checked += 1;
                }
            }
            let rep = index_identity(&level).unwrap();
            assert_eq!((rep.checked, rep.violations), (checked, 0));
        }
    }
}

#[test]
fn dimension_estimates() {
    let counts = |v: &[(u32, u128)]| v.iter().copied().collect::<BTreeMap<u32, u128>>();
    // S' at (t, h) = (2, 1): rounded estimate 2, but the ratio sits inside the band for 3.
    assert_eq!(estimate_dimension(&counts(&[(1, 520), (2, 4420)]), 3, 3).unwrap(), (2, true));
    assert_eq!(estimate_dimension(&counts(&[(1, 520), (2, 4420)]), 3, 4).unwrap(), (2, false));
    assert_eq!(estimate_dimension(&counts(&[(1, 4), (2, 10), (3, 28)]), 3, 1).unwrap(), (1, true));
    assert!(matches!(estimate_dimension(&counts(&[(1, 4)]), 3, 1), Err(Error::InsufficientData(_))));
    assert!(matches!(estimate_dimension(&counts(&[(1, 4), (3, 28)]), 3, 1), Err(Error::InsufficientData(_))));
}

#[test]
fn parameter_errors() {
    let level = sp(2, 1);
    assert!(matches!(enumerate_s(&level, 2), Err(Error::BadParameters(_))));
    let (_, fs) = orth_levels().swap_remove(0);
    let o = fs.at_level(1).unwrap();
    assert!(enumerate_sprime(&o, 0).is_err());
    assert!(matches!(enumerate_r(&o, 1, 1), Err(Error::BadParameters(_))));
    assert!(matches!(enumerate_r(&o, 0, 3), Err(Error::WittIndexTooSmall { .. })));
}
