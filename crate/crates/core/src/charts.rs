//! Affine charts of the strata splitting models as explicit polynomial
//! systems, with exhaustive and structured point counts and a Jacobian test
//! for smoothness.
//!
//! Z chart (t > h): variables V11 (h), V12 (h), V21 (t-h), Z23 (t-h);
//! equations v_{i0} - 1 and the 2×2 minors of (V21 | H·Z23), H the
//! antidiagonal unit. Y chart (t < h): V'11 (h-t), Z2 (n-2h) and the single
//! equation v_{i0} - 1. Intersection chart (t2 < h < t1): V'11 (h-t2),
//! Z23 (t1-h) and v_{i0} - 1.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dlstrata::estimate_dimension;
use crate::error::{Error, Result};
use crate::gf::GaloisField;
use crate::linalg;

/// Largest number of assignments walked by exhaustive evaluation.
pub const CHART_ASSIGNMENT_BOUND: u128 = 20_000_000;

/// A monomial coefficient·∏ x_v^e with an integer coefficient (reduced mod p
/// on evaluation).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coef: i64,
    /// (variable, exponent), sorted by variable.
    pub powers: Vec<(usize, u32)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<Term>,
}

impl Polynomial {
    pub fn constant(c: i64) -> Polynomial {
        Polynomial { terms: vec![Term { coef: c, powers: vec![] }] }
    }

    pub fn var(v: usize) -> Polynomial {
        Polynomial { terms: vec![Term { coef: 1, powers: vec![(v, 1)] }] }
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let mut acc: BTreeMap<Vec<(usize, u32)>, i64> = BTreeMap::new();
        for t in self.terms.iter().chain(&o.terms) {
            *acc.entry(t.powers.clone()).or_default() += t.coef;
        }
        Polynomial {
            terms: acc.into_iter().filter(|(_, c)| *c != 0).map(|(powers, coef)| Term { coef, powers }).collect(),
        }
    }

    pub fn scale(&self, c: i64) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|t| Term { coef: t.coef * c, powers: t.powers.clone() }).collect() }
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut out = Polynomial::default();
        for a in &self.terms {
            for b in &o.terms {
                let mut powers: BTreeMap<usize, u32> = a.powers.iter().copied().collect();
                for &(v, e) in &b.powers {
                    *powers.entry(v).or_default() += e;
                }
                let t = Polynomial { terms: vec![Term { coef: a.coef * b.coef, powers: powers.into_iter().collect() }] };
                out = out.add(&t);
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::default();
        for t in &self.terms {
            if let Some(&(_, e)) = t.powers.iter().find(|(v, _)| *v == var) {
                let powers = t
                    .powers
                    .iter()
                    .filter_map(|&(v, k)| match (v == var, k) {
                        (true, 1) => None,
                        (true, k) => Some((v, k - 1)),
                        _ => Some((v, k)),
                    })
                    .collect();
                out = out.add(&Polynomial { terms: vec![Term { coef: t.coef * e as i64, powers }] });
            }
        }
        out
    }

    pub fn eval(&self, f: &GaloisField, x: &[u32]) -> u32 {
        self.terms.iter().fold(0, |acc, t| {
            let mono = t.powers.iter().fold(f.from_int(t.coef), |m, &(v, e)| f.mul(m, f.pow(x[v], e as u64)));
            f.add(acc, mono)
        })
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.powers.iter().map(|p| p.1).sum()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChartKind {
    #[serde(rename = "Z_chart")]
    Z,
    #[serde(rename = "Y_chart")]
    Y,
    #[serde(rename = "intersection_chart")]
    Intersection,
}

/// For the intersection chart `t` holds t₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChartParams {
    pub n: usize,
    pub h: usize,
    pub t: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<usize>,
    pub pivot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartSystem {
    pub kind: ChartKind,
    pub params: ChartParams,
    pub variables: Vec<String>,
    pub blocks: Vec<Block>,
    pub equations: Vec<Polynomial>,
    pub claimed_dim: usize,
}

fn validate(kind: ChartKind, n: usize, h: usize, t: usize, t2: Option<usize>) -> Result<()> {
    if n % 2 == 0 && 2 * h == n {
        return Err(Error::PiModularExcluded);
    }
    let bad = |s: String| Err(Error::BadParameters(s));
    match kind {
        ChartKind::Z if !(h < t && 2 * t <= n) => bad(format!("Z chart needs h < t ≤ n/2, got n={n} h={h} t={t}")),
        ChartKind::Y if !(t < h && 2 * h <= n) => bad(format!("Y chart needs t < h ≤ n/2, got n={n} h={h} t={t}")),
        ChartKind::Intersection => match t2 {
            Some(t2) if t2 < h && h < t && 2 * t <= n => Ok(()),
            _ => bad(format!("intersection chart needs t2 < h < t1 ≤ n/2, got n={n} h={h} t1={t} t2={t2:?}")),
        },
        ChartKind::Z | ChartKind::Y => Ok(()),
    }
}

/// Pivot positions: entries of the block stack that carries the unit.
pub fn valid_pivots(kind: ChartKind, n: usize, h: usize, t: usize, t2: Option<usize>) -> Result<std::ops::Range<usize>> {
    validate(kind, n, h, t, t2)?;
    Ok(match kind {
        ChartKind::Z => 0..t + h,
        ChartKind::Y => 0..h - t,
        ChartKind::Intersection => 0..h - t2.expect("validated"),
    })
}

fn layout(specs: &[(&str, usize)]) -> (Vec<Block>, Vec<String>) {
    let mut blocks = Vec::new();
    let mut names = Vec::new();
    for &(name, len) in specs {
        blocks.push(Block { name: name.to_string(), start: names.len(), len });
        names.extend((0..len).map(|i| format!("{name}[{i}]")));
    }
    (blocks, names)
}

fn build(kind: ChartKind, params: ChartParams, antidiagonal: bool) -> Result<ChartSystem> {
    let ChartParams { n, h, t, t2, pivot } = params;
    let pivots = valid_pivots(kind, n, h, t, t2)?;
    if !pivots.contains(&pivot) {
        return Err(Error::BadParameters(format!("pivot {pivot} outside {pivots:?}")));
    }
    let unit = Polynomial::var(pivot).add(&Polynomial::constant(-1));
    let (blocks, variables, equations, claimed_dim) = match kind {
        ChartKind::Z => {
            let k = t - h;
            let (blocks, names) = layout(&[("V11", h), ("V12", h), ("V21", k), ("Z23", k)]);
            let v = |i: usize| Polynomial::var(2 * h + i);
            let hz = |i: usize| Polynomial::var(2 * h + k + if antidiagonal { k - 1 - i } else { i });
            let mut eqs = vec![unit];
            for i in 0..k {
                for j in i + 1..k {
                    eqs.push(v(i).mul(&hz(j)).add(&v(j).mul(&hz(i)).scale(-1)));
                }
            }
            (blocks, names, eqs, t + h)
        }
        ChartKind::Y => {
            let (blocks, names) = layout(&[("V'11", h - t), ("Z2", n - 2 * h)]);
            (blocks, names, vec![unit], n - h - t - 1)
        }
        ChartKind::Intersection => {
            let t2 = t2.expect("validated");
            let (blocks, names) = layout(&[("V'11", h - t2), ("Z23", t - h)]);
            (blocks, names, vec![unit], t - t2 - 1)
        }
    };
    Ok(ChartSystem { kind, params, variables, blocks, equations, claimed_dim })
}

pub fn build_chart(kind: ChartKind, params: ChartParams) -> Result<ChartSystem> {
    build(kind, params, true)
}

/// The Z chart with Z23 in place of H·Z23, for the shape audit.
pub fn build_chart_without_h(params: ChartParams) -> Result<ChartSystem> {
    build(ChartKind::Z, params, false)
}

impl ChartSystem {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn is_solution(&self, f: &GaloisField, x: &[u32]) -> bool {
        self.equations.iter().all(|e| e.eval(f, x) == 0)
    }

    /// Rank of the Jacobian at x.
    pub fn jacobian_rank(&self, f: &GaloisField, x: &[u32]) -> usize {
        let rows: linalg::Mat = self
            .equations
            .iter()
            .map(|e| (0..self.num_vars()).map(|v| e.derivative(v).eval(f, x)).collect())
            .collect();
        linalg::rank(f, &rows)
    }

    pub fn codim(&self) -> usize {
        self.num_vars() - self.claimed_dim
    }
}

fn chart_field(p: u32, m: u32) -> Result<Arc<GaloisField>> {
    GaloisField::standard(p, 1, m)
}

fn assignment_count(q: u64, vars: usize) -> Result<u128> {
    let total = (q as u128).checked_pow(vars as u32).unwrap_or(u128::MAX);
    if total > CHART_ASSIGNMENT_BOUND {
        return Err(Error::BoundExceeded { what: "chart assignments".into(), needed: total, bound: CHART_ASSIGNMENT_BOUND });
    }
    Ok(total)
}

/// Parallel fold over every assignment x ∈ F_Q^{vars}, in lexicographic
/// order within each chunk of the leading coordinate.
fn fold_assignments<A, I, F, C>(f: &GaloisField, vars: usize, init: I, fold: F, combine: C) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(A, &[u32]) -> A + Sync,
    C: Fn(A, A) -> A + Sync,
{
    let q = f.order() as u64;
    assignment_count(q, vars)?;
    if vars == 0 {
        return Ok(fold(init(), &[]));
    }
    let parts: Vec<A> = (0..q as u32)
        .into_par_iter()
        .map(|lead| {
            let mut acc = init();
            let mut x = vec![0u32; vars];
            x[0] = lead;
            loop {
                acc = fold(acc, &x);
                let mut i = vars - 1;
                loop {
                    if i == 0 {
                        return acc;
                    }
                    x[i] += 1;
                    if (x[i] as u64) < q {
                        break;
                    }
                    x[i] = 0;
                    i -= 1;
                }
            }
        })
        .collect();
    Ok(parts.into_iter().reduce(combine).expect("q ≥ 2"))
}

/// Number of solutions by evaluating every equation at every assignment.
pub fn count_exhaustive(c: &ChartSystem, p: u32, m: u32) -> Result<u128> {
    let f = chart_field(p, m)?;
    fold_assignments(&f, c.num_vars(), || 0u128, |acc, x| acc + c.is_solution(&f, x) as u128, |a, b| a + b)
}

/// Number of solutions from the block structure. For the Z chart the minor
/// block (V21, Z23) is walked and kept when rank(V21 | H·Z23) ≤ 1 (computed by
/// row reduction, not from the minors) and the pivot condition holds there;
/// the remaining variables are free apart from the pivot.
pub fn count_structured(c: &ChartSystem, p: u32, m: u32) -> Result<u128> {
    let f = chart_field(p, m)?;
    let q = f.order() as u128;
    match c.kind {
        ChartKind::Z => {
            let h = c.params.h;
            let k = c.params.t - h;
            let pivot = c.params.pivot;
            let pivot_in_minor = pivot >= 2 * h;
            let free = 2 * h - usize::from(!pivot_in_minor);
            let block = fold_assignments(
                &f,
                2 * k,
                || 0u128,
                |acc, x| {
                    let (v, z) = x.split_at(k);
                    if pivot_in_minor && v[pivot - 2 * h] != 1 {
                        return acc;
                    }
                    let mat: linalg::Mat = (0..k).map(|i| vec![v[i], z[k - 1 - i]]).collect();
                    acc + (linalg::rank(&f, &mat) <= 1) as u128
                },
                |a, b| a + b,
            )?;
            Ok(q.pow(free as u32) * block)
        }
        ChartKind::Y | ChartKind::Intersection => Ok(q.pow(c.num_vars() as u32 - 1)),
    }
}

/// Exhaustive when within the assignment bound, structured otherwise.
pub fn count_chart_points(c: &ChartSystem, p: u32, m: u32) -> Result<u128> {
    match count_exhaustive(c, p, m) {
        Err(Error::BoundExceeded { .. }) => count_structured(c, p, m),
        r => r,
    }
}

/// Every assignment of the minor block: minors vanish exactly when
/// rank(V21 | H·Z23) ≤ 1. Returns (checked, violations).
pub fn rank_identity(c: &ChartSystem, p: u32, m: u32) -> Result<(u64, u64)> {
    if c.kind != ChartKind::Z {
        return Ok((0, 0));
    }
    let f = chart_field(p, m)?;
    let h = c.params.h;
    let k = c.params.t - h;
    let mut x = vec![0u32; c.num_vars()];
    x[c.params.pivot] = 1;
    let minors = &c.equations[1..];
    fold_assignments(
        &f,
        2 * k,
        || (0u64, 0u64),
        |(n, bad), blk| {
            let mut y = x.clone();
            y[2 * h..].copy_from_slice(blk);
            let vanish = minors.iter().all(|e| e.eval(&f, &y) == 0);
            let mat: linalg::Mat = (0..k).map(|i| vec![blk[i], blk[k + k - 1 - i]]).collect();
            let low = linalg::rank(&f, &mat) <= 1;
            (n + 1, bad + (vanish != low) as u64)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Certificate {
    SmoothEverywhere {
        points_checked: u64,
    },
    SingularWitness {
        /// Coordinates as coefficient vectors over F_p.
        point: Vec<Vec<u32>>,
        jacobian_rank: usize,
        codim: usize,
        points_checked: u64,
    },
}

impl Certificate {
    pub fn is_smooth(&self) -> bool {
        matches!(self, Certificate::SmoothEverywhere { .. })
    }
}

/// Samples drawn by `jacobian_certify` in sampled mode.
pub const CERTIFY_SAMPLES: usize = 2000;

/// A random solution built from the block structure: rank(V21 | H·Z23) ≤ 1
/// is realized as V21 = a·u, H·Z23 = b·u.
fn random_solution(c: &ChartSystem, f: &GaloisField, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let q = f.order();
    let mut x: Vec<u32> = (0..c.num_vars()).map(|_| rng.gen_range(0..q)).collect();
    if c.kind == ChartKind::Z {
        let h = c.params.h;
        let k = c.params.t - h;
        let mut u: Vec<u32> = (0..k).map(|_| rng.gen_range(0..q)).collect();
        let (mut a, b) = (rng.gen_range(0..q), rng.gen_range(0..q));
        if c.params.pivot >= 2 * h {
            u[c.params.pivot - 2 * h] = 1;
            a = 1;
        }
        for i in 0..k {
            x[2 * h + i] = f.mul(a, u[i]);
            x[2 * h + k + (k - 1 - i)] = f.mul(b, u[i]);
        }
    }
    x[c.params.pivot] = 1;
    x
}

/// The point with the pivot set to one and every other coordinate zero.
fn base_point(c: &ChartSystem) -> Vec<u32> {
    let mut x = vec![0; c.num_vars()];
    x[c.params.pivot] = 1;
    x
}

/// Jacobian test: a solution where the Jacobian rank is below the
/// codimension (number of variables minus the claimed dimension) is a
/// singular point. Exhaustive mode walks every solution; sampled mode checks
/// the base point and then `CERTIFY_SAMPLES` random solutions from a seeded
/// generator.
pub fn jacobian_certify(c: &ChartSystem, p: u32, m: u32, mode: CertifyMode, seed: u64) -> Result<Certificate> {
    let f = chart_field(p, m)?;
    let codim = c.codim();
    let witness = |x: &[u32], rank: usize, checked: u64| Certificate::SingularWitness {
        point: x.iter().map(|&v| f.coefficients(v)).collect(),
        jacobian_rank: rank,
        codim,
        points_checked: checked,
    };
    match mode {
        CertifyMode::Exhaustive => {
            // (solutions checked, first singular point in assignment order)
            type Acc = (u64, Option<(Vec<u32>, usize)>);
            let (checked, first): Acc = fold_assignments(
                &f,
                c.num_vars(),
                || (0, None),
                |(n, w): Acc, x| {
                    if !c.is_solution(&f, x) {
                        return (n, w);
                    }
                    let w = w.or_else(|| {
                        let r = c.jacobian_rank(&f, x);
                        (r < codim).then(|| (x.to_vec(), r))
                    });
                    (n + 1, w)
                },
                |a, b| (a.0 + b.0, a.1.or(b.1)),
            )?;
            Ok(match first {
                Some((x, r)) => witness(&x, r, checked),
                None => Certificate::SmoothEverywhere { points_checked: checked },
            })
        }
        CertifyMode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut checked = 0u64;
            for i in 0..=CERTIFY_SAMPLES {
                let x = if i == 0 { base_point(c) } else { random_solution(c, &f, &mut rng) };
                if !c.is_solution(&f, &x) {
                    return Err(Error::BadParameters("sampler produced a non-solution".into()));
                }
                checked += 1;
                let r = c.jacobian_rank(&f, &x);
                if r < codim {
                    return Ok(witness(&x, r, checked));
                }
            }
            Ok(Certificate::SmoothEverywhere { points_checked: checked })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartDimReport {
    pub counts: BTreeMap<u32, u128>,
    pub estimated_dim: i64,
    pub claimed_dim: usize,
    pub pass: bool,
}

pub fn chart_vs_variety_dim(c: &ChartSystem, p: u32, m_max: u32) -> Result<ChartDimReport> {
    let counts: BTreeMap<u32, u128> = (1..=m_max).map(|m| count_chart_points(c, p, m).map(|n| (m, n))).collect::<Result<_>>()?;
    let (estimated_dim, pass) = estimate_dimension(&counts, p as u64, c.claimed_dim as i64)?;
    Ok(ChartDimReport { counts, estimated_dim, claimed_dim: c.claimed_dim, pass: pass && estimated_dim == c.claimed_dim as i64 })
}

/// Counts for every pivot position.
pub fn pivot_counts(kind: ChartKind, params: ChartParams, p: u32, m: u32) -> Result<Vec<(usize, u128)>> {
    valid_pivots(kind, params.n, params.h, params.t, params.t2)?
        .map(|pivot| {
            let c = build_chart(kind, ChartParams { pivot, ..params })?;
            count_chart_points(&c, p, m).map(|n| (pivot, n))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartJson {
    pub kind: ChartKind,
    pub params: ChartParams,
    pub variables: Vec<String>,
    /// Each equation as a list of [coefficient, [[variable, exponent], ...]].
    pub equations: Vec<Vec<(i64, Vec<(usize, u32)>)>>,
}

impl ChartSystem {
    pub fn to_json(&self) -> ChartJson {
        ChartJson {
            kind: self.kind,
            params: self.params,
            variables: self.variables.clone(),
            equations: self
                .equations
                .iter()
                .map(|e| e.terms.iter().map(|t| (t.coef, t.powers.clone())).collect())
                .collect(),
        }
    }
}
