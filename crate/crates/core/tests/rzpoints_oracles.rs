use std::collections::BTreeSet;

use btstrata_core::counting::projective_count;
use btstrata_core::lattices::{HermitianAmbient, LatticeModule};
use btstrata_core::rzpoints::{
    check_pair, extremal_case, oracle_equivalence, rz_points_raw, verify_stratification, worst_points, Anchor,
    DieudonnePair, QuotientFrame, Stratum,
};
use btstrata_core::Error;

fn standard(n: usize, i: i64) -> LatticeModule {
    LatticeModule::standard(&HermitianAmbient::new(n, 1, 3, 1).unwrap(), i).unwrap()
}

/// (n, h, t) with the stratum that is not the worst one for type 2t.
fn anchored_cases() -> Vec<(usize, u32, u32, Stratum)> {
    let mut out = Vec::new();
    for n in 3..=4usize {
        for h in 0..=(n as u32 - 1) / 2 {
            for t in 0..=n as u32 / 2 {
                if t > h {
                    out.push((n, h, t, Stratum::Z));
                } else if t < h {
                    out.push((n, h, t, Stratum::Y));
                }
            }
        }
    }
    out
}

#[test]
fn worst_points_are_hyperplanes() {
    for n in 3..=5usize {
        for h in 0..=(n as u32) / 2 {
            if 2 * h as usize == n {
                continue;
            }
            let lat = standard(n, -(h as i64));
            for m in 1..=2 {
                let pts = worst_points(&lat, m).unwrap();
                assert_eq!(pts.len() as u128, projective_count(n as u32, 3u64.pow(m)), "n={n} h={h} m={m}");
                let distinct: BTreeSet<&DieudonnePair> = pts.iter().collect();
                assert_eq!(distinct.len(), pts.len());
                let anchor = Anchor::new(&lat, h, m).unwrap();
                for stratum in [Stratum::Z, Stratum::Y] {
                    assert!(pts.iter().all(|pt| check_pair(&anchor, stratum, pt).all()));
                }
                for pt in pts.iter().take(20) {
                    let e = extremal_case(&pt.m, h).unwrap();
                    assert_eq!((e.max_type, e.min_type), (Some(2 * h), Some(2 * h)));
                    assert!(e.z_case && e.y_case && e.contained);
                }
            }
        }
    }
}

#[test]
fn raw_and_quotient_models_agree() {
    for (n, h, t, stratum) in anchored_cases() {
        let lat = standard(n, -(t as i64));
        for m in 1..=2 {
            let rep = oracle_equivalence(&lat, h, m, stratum).unwrap();
            assert!(rep.pass(), "n={n} h={h} t={t} m={m}: {rep:?}");
            assert!(rep.raw_points > 0);
        }
    }
}

#[test]
fn raw_points_satisfy_every_condition_and_perturbations_fail() {
    for (n, h, t, stratum) in anchored_cases() {
        let lat = standard(n, -(t as i64));
        let anchor = Anchor::new(&lat, h, 2).unwrap();
        let set = rz_points_raw(&lat, h, 2, stratum).unwrap();
        for pt in &set.points {
            let c = check_pair(&anchor, stratum, pt);
            assert!(c.all(), "{c:?}");
            // M' = M^♯ has colength zero.
            let bad = DieudonnePair { m: pt.m.clone(), mprime: pt.m.dual() };
            let cb = check_pair(&anchor, stratum, &bad);
            assert!(!cb.colength_one && !cb.all());
        }
        let frame = QuotientFrame::new(&lat, h, 2, stratum).unwrap();
        let pulled: BTreeSet<DieudonnePair> = frame.pulled_back_points().unwrap().into_iter().collect();
        let raw: BTreeSet<DieudonnePair> = set.points.into_iter().collect();
        assert_eq!(pulled, raw);
    }
}

#[test]
fn small_stratification_fails_only_the_literal_statements() {
    let known = ["zz_intersection_literal", "yy_intersection_literal", "extremal_vertex_types"];
    for h in 0..=1 {
        let reports = verify_stratification(3, h, 3, 1, 2).unwrap();
        assert!(reports.len() >= 10);
        for r in &reports {
            assert!(r.pass || known.contains(&r.check_id.as_str()), "{} failed: {:?}", r.check_id, r.witness);
        }
        for id in ["z_inclusion", "y_inclusion", "zy_intersection", "raw_model_agreement", "extremal_vertices"] {
            assert!(reports.iter().any(|r| r.check_id == id && r.pass), "{id}");
        }
    }
}

#[test]
fn stratification_parameter_guards() {
    assert!(matches!(verify_stratification(4, 2, 3, 1, 2), Err(Error::PiModularExcluded)));
    assert!(matches!(verify_stratification(6, 1, 3, 1, 2), Err(Error::BoundExceeded { .. })));
    assert!(matches!(verify_stratification(3, 0, 3, 3, 2), Err(Error::BoundExceeded { .. })));
}
