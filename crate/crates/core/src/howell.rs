//! Howell normal form for submodules of R^k, R a finite chain ring.
//!
//! A Howell form is an echelon generating set with pivots normalised to
//! π^v, entries above each pivot reduced to their canonical representative
//! mod π^v, and the Howell property: for every column c, the rows whose
//! pivot is at c or later span the elements of the module that vanish in
//! the first c columns. With these three conditions the form is unique, so
//! module equality is row-data equality.

use crate::chainring::{ChainRing, ChainRingElement};

pub type Row = Vec<ChainRingElement>;

fn is_zero_row(r: &Row) -> bool {
    r.iter().all(ChainRing::is_zero)
}

/// target -= c * src
fn axpy(ring: &ChainRing, target: &mut Row, c: &ChainRingElement, src: &Row) {
    if ChainRing::is_zero(c) {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        if !ChainRing::is_zero(s) {
            *t = ring.sub(t, &ring.mul(c, s));
        }
    }
}

pub fn scale_row(ring: &ChainRing, c: &ChainRingElement, r: &Row) -> Row {
    r.iter().map(|x| ring.mul(c, x)).collect()
}

/// Pivot column and pivot valuation of each row of a Howell form.
pub fn pivots(ring: &ChainRing, form: &[Row]) -> Vec<(usize, u32)> {
    form.iter()
        .map(|r| {
            let c = r.iter().position(|x| !ChainRing::is_zero(x)).expect("zero row in Howell form");
            (c, ring.valuation(&r[c]).unwrap())
        })
        .collect()
}

pub fn howell_form(ring: &ChainRing, rows: Vec<Row>, ncols: usize) -> Vec<Row> {
    let nil = ring.nil();
    let mut pending: Vec<Row> = rows.into_iter().filter(|r| !is_zero_row(r)).collect();
    let mut result: Vec<(usize, u32, Row)> = Vec::new();
    for col in 0..ncols {
        let mut best: Option<(u32, usize)> = None;
        for (i, r) in pending.iter().enumerate() {
            if let Some(v) = ring.valuation(&r[col]) {
                if best.map_or(true, |(bv, _)| v < bv) {
                    best = Some((v, i));
                }
            }
        }
        let Some((v, idx)) = best else { continue };
        let raw = pending.swap_remove(idx);
        let unit = ring.div_pi_pow(&raw[col], v);
        let uinv = ring.inv(&unit).expect("unit part is invertible");
        let prow = scale_row(ring, &uinv, &raw);
        debug_assert_eq!(prow[col], ring.pi_pow(v));
        for r in pending.iter_mut() {
            if ChainRing::is_zero(&r[col]) {
                continue;
            }
            let c = ring.div_pi_pow(&r[col], v);
            axpy(ring, r, &c, &prow);
            debug_assert!(ChainRing::is_zero(&r[col]));
        }
        if v > 0 {
            let aug = scale_row(ring, &ring.pi_pow(nil - v), &prow);
            pending.push(aug);
        }
        pending.retain(|r| !is_zero_row(r));
        result.push((col, v, prow));
    }
    debug_assert!(pending.is_empty());
    // Reduce entries above pivots.
    for i in 0..result.len() {
        let (col, v) = (result[i].0, result[i].1);
        let (head, tail) = result.split_at_mut(i);
        let pivot_row = &tail[0].2;
        for (_, _, r) in head.iter_mut() {
            let x = r[col];
            let t = ring.truncate(&x, v);
            if t != x {
                let c = ring.div_pi_pow(&ring.sub(&x, &t), v);
                axpy(ring, r, &c, pivot_row);
            }
        }
    }
    result.into_iter().map(|(_, _, r)| r).collect()
}

/// Canonical representative of v modulo the module with Howell form `form`;
/// zero iff v lies in the module.
pub fn reduce(ring: &ChainRing, form: &[Row], v: &Row) -> Row {
    let mut x = v.clone();
    for r in form {
        let col = r.iter().position(|e| !ChainRing::is_zero(e)).unwrap();
        let piv = ring.valuation(&r[col]).unwrap();
        let e = x[col];
        let t = ring.truncate(&e, piv);
        if t != e {
            let c = ring.div_pi_pow(&ring.sub(&e, &t), piv);
            axpy(ring, &mut x, &c, r);
        }
    }
    x
}

pub fn contains(ring: &ChainRing, form: &[Row], v: &Row) -> bool {
    is_zero_row(&reduce(ring, form, v))
}

/// κ-length of the module: sum of N - v over the pivots.
pub fn length(ring: &ChainRing, form: &[Row]) -> u32 {
    pivots(ring, form).iter().map(|&(_, v)| ring.nil() - v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn span_brute(ring: &ChainRing, gens: &[Row], n: usize) -> HashSet<Row> {
        let mut set: HashSet<Row> = HashSet::new();
        set.insert(vec![ring.zero(); n]);
        let els = ring.elements();
        loop {
            let mut grew = false;
            let current: Vec<Row> = set.iter().cloned().collect();
            for g in gens {
                for x in &current {
                    for c in &els {
                        let y: Row = x.iter().zip(g).map(|(a, b)| ring.add(a, &ring.mul(c, b))).collect();
                        if set.insert(y) {
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                return set;
            }
        }
    }

    #[test]
    fn howell_matches_brute_span() {
        let ring = ChainRing::standard(3, 4, 1).unwrap();
        let e = |a: i64, b: i64| ring.from_parts(&[a], &[b]).unwrap();
        let cases: Vec<Vec<Row>> = vec![
            vec![vec![e(3, 0), e(1, 1)], vec![e(0, 1), e(2, 0)]],
            vec![vec![e(0, 1), e(3, 0)]],
            vec![vec![e(3, 0), e(0, 0)], vec![e(0, 0), e(0, 1)], vec![e(1, 1), e(1, 0)]],
            vec![vec![e(0, 2), e(0, 1)], vec![e(3, 1), e(6, 2)]],
        ];
        for gens in cases {
            let h = howell_form(&ring, gens.clone(), 2);
            let brute = span_brute(&ring, &gens, 2);
            let from_h = span_brute(&ring, &h, 2);
            assert_eq!(brute, from_h);
            let q = ring.residue_field().order() as u64;
            assert_eq!(q.pow(length(&ring, &h)), brute.len() as u64);
            for x in &brute {
                assert!(contains(&ring, &h, x));
            }
            // Howell form is canonical: regenerating from the span gives it back.
            let all: Vec<Row> = brute.iter().cloned().collect();
            assert_eq!(howell_form(&ring, all, 2), h);
        }
    }

    #[test]
    fn reduce_is_canonical_coset_representative() {
        let ring = ChainRing::standard(3, 4, 1).unwrap();
        let e = |a: i64, b: i64| ring.from_parts(&[a], &[b]).unwrap();
        let gens = vec![vec![e(0, 1), e(1, 0), e(3, 0)], vec![e(0, 0), e(3, 0), e(0, 1)]];
        let h = howell_form(&ring, gens.clone(), 3);
        let span = span_brute(&ring, &gens, 3);
        let v = vec![e(2, 1), e(1, 2), e(5, 1)];
        let rv = reduce(&ring, &h, &v);
        for s in span.iter().take(200) {
            let w: Row = v.iter().zip(s).map(|(a, b)| ring.add(a, b)).collect();
            assert_eq!(reduce(&ring, &h, &w), rv);
        }
    }
}
