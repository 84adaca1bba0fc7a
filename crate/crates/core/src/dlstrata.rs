//! Points of the Deligne-Lusztig type varieties S, S', R, R' and the
//! intersection model R'_[Λ₁,Λ₂], over F_{q^m}.
//!
//! S lives in a symplectic space V of dimension 2t: isotropic U of dim t-h
//! with dim(U ∩ ΦU) ≥ t-h-1. S' adds U' of dim t+h-1 inside U^♯ ∩ Φ(U^♯).
//! R lives in an orthogonal space: isotropic U of dim h-t with the same
//! defect condition, and R' adds U' of dim h-t-1 inside U ∩ ΦU.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::counting;
use crate::error::{bound_check, Error, Result};
use crate::formspace::{Constraint, FormKind, FormLevel, Subspace, SUBSPACE_BOUND};
use crate::linalg::{self, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "S'")]
    SPrime,
    #[serde(rename = "R'")]
    RPrime,
    #[serde(rename = "R'_bracket")]
    RPrimeBracket,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StratumPointQ {
    pub u: Subspace,
    pub uprime: Subspace,
    pub model: Model,
}

fn require_kind(level: &FormLevel, kind: FormKind) -> Result<()> {
    if level.kind != kind {
        return Err(Error::BadParameters(format!("expected a {kind:?} space")));
    }
    Ok(())
}

fn subspace_of_rows(level: &FormLevel, rows: &Mat) -> Subspace {
    level.subspace(rows.clone())
}

/// dim(U ∩ ΦU) for U given by RREF rows.
fn defect_dim(level: &FormLevel, u: &Subspace) -> usize {
    let phi = level.frobenius(u);
    level.intersect(u, &phi).expect("same space").dim()
}

fn sp_params(level: &FormLevel, h: usize) -> Result<usize> {
    require_kind(level, FormKind::Symplectic)?;
    let t = level.dim() / 2;
    if h >= t {
        return Err(Error::BadParameters(format!("S needs h < t (h = {h}, t = {t})")));
    }
    Ok(t)
}

fn orth_params(level: &FormLevel, t: usize, h: usize) -> Result<usize> {
    require_kind(level, FormKind::Orthogonal)?;
    if t >= h {
        return Err(Error::BadParameters(format!("R needs t < h (t = {t}, h = {h})")));
    }
    let d = h - t;
    let w = level.witt_index();
    if d > w {
        return Err(Error::WittIndexTooSmall { witt: w, dim: d });
    }
    Ok(d)
}

/// S(F_{q^m}).
pub fn enumerate_s(level: &FormLevel, h: usize) -> Result<Vec<Subspace>> {
    let t = sp_params(level, h)?;
    let d = t - h;
    let all = level.fold_subspaces(
        d,
        Constraint::Isotropic,
        Vec::new,
        |acc: &mut Vec<Subspace>, m| {
            let u = subspace_of_rows(level, m);
            if defect_dim(level, &u) + 1 >= d {
                acc.push(u);
            }
        },
        concat,
    )?;
    Ok(all)
}

fn concat<T>(mut a: Vec<T>, b: Vec<T>) -> Vec<T> {
    a.extend(b);
    a
}

/// U^♯ ∩ Φ(U^♯).
fn dual_defect(level: &FormLevel, u: &Subspace) -> Subspace {
    let ud = level.dual(u);
    let phi = level.frobenius(&ud);
    level.intersect(&ud, &phi).expect("same space")
}

/// S'(F_{q^m}): every (U, U') with U isotropic of dim t-h and U' a
/// (t+h-1)-subspace of U^♯ ∩ Φ(U^♯). The defect condition on U is not
/// imposed; it is a consequence.
pub fn enumerate_sprime(level: &FormLevel, h: usize) -> Result<Vec<StratumPointQ>> {
    let t = sp_params(level, h)?;
    let k = t + h - 1;
    level.fold_subspaces(
        t - h,
        Constraint::Isotropic,
        Vec::new,
        |acc: &mut Vec<StratumPointQ>, m| {
            let u = subspace_of_rows(level, m);
            let w = dual_defect(level, &u);
            if w.dim() < k {
                return;
            }
            for up in level.subspaces_of(&w, k).expect("fiber within bounds") {
                acc.push(StratumPointQ { u: u.clone(), uprime: up, model: Model::SPrime });
            }
        },
        concat,
    )
}

/// R(F_{q^m}) in an orthogonal space.
pub fn enumerate_r(level: &FormLevel, t: usize, h: usize) -> Result<Vec<Subspace>> {
    let d = orth_params(level, t, h)?;
    level.fold_subspaces(
        d,
        Constraint::Isotropic,
        Vec::new,
        |acc: &mut Vec<Subspace>, m| {
            let u = subspace_of_rows(level, m);
            if defect_dim(level, &u) + 1 >= d {
                acc.push(u);
            }
        },
        concat,
    )
}

fn rprime_fiber(level: &FormLevel, u: &Subspace, d: usize, model: Model, acc: &mut Vec<StratumPointQ>) {
    let phi = level.frobenius(u);
    let w = level.intersect(u, &phi).expect("same space");
    if w.dim() + 1 < d {
        return;
    }
    for up in level.subspaces_of(&w, d - 1).expect("fiber within bounds") {
        acc.push(StratumPointQ { u: u.clone(), uprime: up, model });
    }
}

/// R'(F_{q^m}).
pub fn enumerate_rprime(level: &FormLevel, t: usize, h: usize) -> Result<Vec<StratumPointQ>> {
    let d = orth_params(level, t, h)?;
    level.fold_subspaces(
        d,
        Constraint::Isotropic,
        Vec::new,
        |acc: &mut Vec<StratumPointQ>, m| {
            let u = subspace_of_rows(level, m);
            rprime_fiber(level, &u, d, Model::RPrime, acc);
        },
        concat,
    )
}

/// R'_[Λ₁,Λ₂]: the part of R' with U ⊆ W, W rational. Here t is the
/// type parameter t₂ of the space.
pub fn enumerate_rprime_bracket(level: &FormLevel, w: &Subspace, t: usize, h: usize) -> Result<Vec<StratumPointQ>> {
    let d = orth_params(level, t, h)?;
    if w.ambient_dim() != level.dim() || w.level() != level.field.level() {
        return Err(Error::SpaceMismatch);
    }
    if !level.is_rational(w) {
        return Err(Error::NotRational);
    }
    if w.dim() < d {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for u in level.subspaces_of(w, d)? {
        if level.is_isotropic(&u) {
            rprime_fiber(level, &u, d, Model::RPrimeBracket, &mut out);
        }
    }
    out.sort();
    Ok(out)
}

/// Tally of the forgetful map (U, U') -> U over all isotropic U.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberTally {
    pub isotropic_candidates: u64,
    pub s_points: u64,
    pub fixed: u64,
    pub nonfixed: u64,
    pub pairs: u128,
    /// Fixed U whose fiber is not a full projective space.
    pub fixed_violations: u64,
    /// Non-fixed U in S whose fiber is not a single point.
    pub nonfixed_violations: u64,
    /// U outside S with a nonempty fiber.
    pub outside_violations: u64,
}

impl FiberTally {
    fn merge(mut self, o: FiberTally) -> FiberTally {
        self.isotropic_candidates += o.isotropic_candidates;
        self.s_points += o.s_points;
        self.fixed += o.fixed;
        self.nonfixed += o.nonfixed;
        self.pairs += o.pairs;
        self.fixed_violations += o.fixed_violations;
        self.nonfixed_violations += o.nonfixed_violations;
        self.outside_violations += o.outside_violations;
        self
    }

    pub fn ok(&self) -> bool {
        self.fixed_violations == 0 && self.nonfixed_violations == 0 && self.outside_violations == 0
    }
}

fn count_subspaces(level: &FormLevel, dim: usize, k: usize) -> u64 {
    if k > dim {
        return 0;
    }
    let mut c = 0u64;
    linalg::visit_all_rref(&level.field, dim, k, &mut |_| c += 1);
    c
}

/// Fiber law for S' -> S, counted by enumerating every fiber. For fixed U
/// the fiber should be P^{t+h-1}; for non-fixed U in S a single point.
pub fn sprime_fiber_tally(level: &FormLevel, h: usize) -> Result<FiberTally> {
    let t = sp_params(level, h)?;
    let d = t - h;
    let k = t + h - 1;
    let q = level.field.order() as u64;
    let full = counting::projective_count((t + h) as u32, q) as u64;
    level.fold_subspaces(
        d,
        Constraint::Isotropic,
        FiberTally::default,
        |acc: &mut FiberTally, m| {
            let u = subspace_of_rows(level, m);
            acc.isotropic_candidates += 1;
            let phi = level.frobenius(&u);
            let inter = level.intersect(&u, &phi).expect("same space").dim();
            let w = dual_defect(level, &u);
            let fiber = count_subspaces(level, w.dim(), k);
            acc.pairs += fiber as u128;
            if inter + 1 < d {
                if fiber != 0 {
                    acc.outside_violations += 1;
                }
                return;
            }
            acc.s_points += 1;
            if inter == d {
                acc.fixed += 1;
                if fiber != full {
                    acc.fixed_violations += 1;
                }
            } else {
                acc.nonfixed += 1;
                if fiber != 1 {
                    acc.nonfixed_violations += 1;
                }
            }
        },
        FiberTally::merge,
    )
}

/// Same tally for R' -> R; fixed fibers are P^{h-t-1}.
pub fn rprime_fiber_tally(level: &FormLevel, t: usize, h: usize) -> Result<FiberTally> {
    let d = orth_params(level, t, h)?;
    let q = level.field.order() as u64;
    let full = counting::projective_count(d as u32, q) as u64;
    level.fold_subspaces(
        d,
        Constraint::Isotropic,
        FiberTally::default,
        |acc: &mut FiberTally, m| {
            let u = subspace_of_rows(level, m);
            acc.isotropic_candidates += 1;
            let inter = defect_dim(level, &u);
            let fiber = count_subspaces(level, inter, d - 1);
            acc.pairs += fiber as u128;
            if inter + 1 < d {
                if fiber != 0 {
                    acc.outside_violations += 1;
                }
                return;
            }
            acc.s_points += 1;
            if inter == d {
                acc.fixed += 1;
                if fiber != full.max(1) {
                    acc.fixed_violations += 1;
                }
            } else {
                acc.nonfixed += 1;
                if fiber != 1 {
                    acc.nonfixed_violations += 1;
                }
            }
        },
        FiberTally::merge,
    )
}

/// |S'| predicted from the fiber law: |S \ T| + |T|·|P^{t+h-1}|.
pub fn sprime_count_from_fibers(tally: &FiberTally, t: usize, h: usize, q: u64) -> u128 {
    tally.nonfixed as u128 + tally.fixed as u128 * counting::projective_count((t + h) as u32, q)
}

/// Result of checking [U^♯ : U^♯ ∩ Φ(U^♯)] = [U : U ∩ ΦU].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub checked: u64,
    pub violations: u64,
}

/// Check the index identity over every isotropic subspace of every
/// positive dimension.
pub fn index_identity(level: &FormLevel) -> Result<IndexReport> {
    let mut total = IndexReport::default();
    let w = level.witt_index();
    for d in 1..=w {
        let r = level.fold_subspaces(
            d,
            Constraint::Isotropic,
            IndexReport::default,
            |acc: &mut IndexReport, m| {
                let u = subspace_of_rows(level, m);
                let lhs = level.dim() - d - dual_defect(level, &u).dim();
                let rhs = d - defect_dim(level, &u);
                acc.checked += 1;
                if lhs != rhs {
                    acc.violations += 1;
                }
            },
            |a, b| IndexReport { checked: a.checked + b.checked, violations: a.violations + b.violations },
        )?;
        total.checked += r.checked;
        total.violations += r.violations;
    }
    Ok(total)
}

/// Count-only variants, for levels where materialising the points is wasteful.
pub fn count_sprime(level: &FormLevel, h: usize) -> Result<u128> {
    Ok(sprime_fiber_tally(level, h)?.pairs)
}

pub fn count_rprime(level: &FormLevel, t: usize, h: usize) -> Result<u128> {
    Ok(rprime_fiber_tally(level, t, h)?.pairs)
}

pub fn count_rprime_bracket(level: &FormLevel, w: &Subspace, t: usize, h: usize) -> Result<u128> {
    let d = orth_params(level, t, h)?;
    bound_check(
        "bracket subspaces",
        counting::gaussian_binomial(w.dim() as u32, d as u32, level.field.order() as u64),
        SUBSPACE_BOUND,
    )?;
    Ok(enumerate_rprime_bracket(level, w, t, h)?.len() as u128)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountParams {
    pub n: usize,
    pub t: usize,
    pub h: usize,
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub model: String,
    pub params: CountParams,
    pub counts: BTreeMap<u32, u128>,
    pub estimated_dim: i64,
    pub claimed_dim: i64,
    pub leading_ok: bool,
}

/// Growth-rate dimension from the two highest consecutive levels:
/// round(log_q(c_{m+1}/c_m)), with the claimed dimension accepted when the
/// ratio lies within a factor 4 of q^d.
pub fn estimate_dimension(counts: &BTreeMap<u32, u128>, q: u64, claimed: i64) -> Result<(i64, bool)> {
    let pair = counts
        .iter()
        .rev()
        .find_map(|(&m, &c)| counts.get(&(m.checked_sub(1)?)).map(|&lo| (lo, c)))
        .ok_or_else(|| Error::InsufficientData("need counts at two consecutive levels".into()))?;
    let (lo, hi) = pair;
    if lo == 0 || hi == 0 {
        return Err(Error::InsufficientData("zero point count".into()));
    }
    let ratio = hi as f64 / lo as f64;
    let est = (ratio.ln() / (q as f64).ln()).round() as i64;
    let target = (q as f64).powi(claimed as i32);
    let ok = ratio >= target / 4.0 && ratio <= target * 4.0;
    Ok((est, ok))
}

pub fn count_report(model: &str, params: CountParams, counts: BTreeMap<u32, u128>, claimed: i64) -> Result<CountReport> {
    let (estimated_dim, leading_ok) = estimate_dimension(&counts, params.q, claimed)?;
    Ok(CountReport { model: model.to_string(), params, counts, estimated_dim, claimed_dim: claimed, leading_ok })
}
