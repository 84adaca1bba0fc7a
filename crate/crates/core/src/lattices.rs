//! O_F-lattices in the split hermitian space F^n.
//!
//! Every lattice L handled here sits in the window π^aΛ₀ ⊆ L ⊆ π^{-a}Λ₀,
//! Λ₀ = O_F^n. We store the submodule π^a·L / π^{2a}Λ₀ of (R/π^{2a})^n in
//! Howell normal form, where R is the chain ring with N = 2a. The
//! "representative" of a vector x is π^a·x read mod π^{2a}.
//!
//! The hermitian form is h(x, y) = Σ conj(x_i)·y_{n+1-i}. For reps
//! x' = π^a x, y' = π^a y one has h(x', y') = (-1)^a p^a h(x, y), so
//! integrality of h(x, y) is the vanishing of h(x', y') mod π^{2a}, and
//! duals are computed exactly at this precision.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chainring::{ChainRing, ChainRingElement, MAX_M};
use crate::error::{bound_check, Error, Result};
use crate::howell::{self, Row};
use crate::linalg;

pub struct HermitianAmbient {
    n: usize,
    a: u32,
    ring: Arc<ChainRing>,
}

impl fmt::Debug for HermitianAmbient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ambient(n={}, a={}, p={}, m={})", self.n, self.a, self.ring.p(), self.ring.level())
    }
}

impl HermitianAmbient {
    pub fn new(n: usize, a: u32, p: u32, m: u32) -> Result<Arc<HermitianAmbient>> {
        if n < 3 {
            return Err(Error::BadParameters(format!("n = {n} must be at least 3")));
        }
        if a < 1 {
            return Err(Error::BadParameters("window exponent must be at least 1".into()));
        }
        let ring = ChainRing::standard(p, 2 * a, m)?;
        Ok(Arc::new(HermitianAmbient { n, a, ring }))
    }

    /// Same space and window with Witt coefficients of degree m.
    pub fn at_level(&self, m: u32) -> Result<Arc<HermitianAmbient>> {
        HermitianAmbient::new(self.n, self.a, self.ring.p(), m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> u32 {
        self.a
    }

    pub fn p(&self) -> u32 {
        self.ring.p()
    }

    pub fn level(&self) -> u32 {
        self.ring.level()
    }

    pub fn ring(&self) -> &Arc<ChainRing> {
        &self.ring
    }

    fn key(&self) -> (usize, u32, u32, u32) {
        (self.n, self.a, self.ring.p(), self.ring.level())
    }

    /// The antidiagonal Gram matrix.
    pub fn gram(&self) -> Vec<Vec<ChainRingElement>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if i + j == self.n - 1 { self.ring.one() } else { self.ring.zero() }).collect())
            .collect()
    }

    /// h(x, y) = Σ conj(x_i) y_{n+1-i}, evaluated on rows of R.
    pub fn herm(&self, x: &Row, y: &Row) -> ChainRingElement {
        let r = &self.ring;
        let n = self.n;
        let mut acc = r.zero();
        for i in 0..n {
            if ChainRing::is_zero(&x[i]) || ChainRing::is_zero(&y[n - 1 - i]) {
                continue;
            }
            acc = r.add(&acc, &r.mul(&r.conj(&x[i]), &y[n - 1 - i]));
        }
        acc
    }

    /// Representative of π^k·e_i (k ≥ -a); zero when k ≥ a.
    pub fn scaled_basis_vector(&self, i: usize, k: i32) -> Result<Row> {
        let a = self.a as i32;
        if k < -a {
            return Err(Error::WindowOverflow(format!("π^{k} e_{} is outside the window", i + 1)));
        }
        let mut row = vec![self.ring.zero(); self.n];
        row[i] = self.ring.pi_pow((k + a) as u32);
        Ok(row)
    }
}

#[derive(Clone)]
pub struct LatticeModule {
    amb: Arc<HermitianAmbient>,
    rows: Vec<Row>,
}

impl fmt::Debug for LatticeModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice{:?}", self.rows)
    }
}

impl PartialEq for LatticeModule {
    fn eq(&self, other: &Self) -> bool {
        self.amb.key() == other.amb.key() && self.rows == other.rows
    }
}

impl Eq for LatticeModule {}

impl Hash for LatticeModule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
    }
}

impl PartialOrd for LatticeModule {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LatticeModule {
    fn cmp(&self, other: &Self) -> Ordering {
        self.amb.key().cmp(&other.amb.key()).then_with(|| self.rows.cmp(&other.rows))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub n: usize,
    pub a: u32,
    pub p: u32,
    pub m: u32,
    /// rows[i][j] = [a0 coefficients, a1 coefficients] of the representative.
    pub rows: Vec<Vec<[Vec<u32>; 2]>>,
}

impl LatticeModule {
    /// Lattice whose representative module is generated by `rows`.
    pub fn from_rep_rows(amb: &Arc<HermitianAmbient>, rows: Vec<Row>) -> LatticeModule {
        let rows = howell::howell_form(&amb.ring, rows, amb.n);
        LatticeModule { amb: amb.clone(), rows }
    }

    /// O_F-span of the given vectors together with π^aΛ₀. Entries are
    /// (a0, a1) integer pairs for the m = 1 ring; each vector is scaled by π^shift.
    pub fn from_vectors(amb: &Arc<HermitianAmbient>, vectors: &[Vec<(i64, i64)>], shift: i32) -> Result<LatticeModule> {
        let a = amb.a as i32;
        if shift + a < 0 {
            return Err(Error::WindowOverflow(format!("scaling π^{shift} is below the window")));
        }
        let r = &amb.ring;
        let mut rows = Vec::new();
        for v in vectors {
            if v.len() != amb.n {
                return Err(Error::BadParameters("vector has the wrong length".into()));
            }
            let row: Row = v
                .iter()
                .map(|&(x, y)| r.mul_pi_pow(&r.from_parts(&[x], &[y]).unwrap(), (shift + a) as u32))
                .collect();
            rows.push(row);
        }
        Ok(Self::from_rep_rows(amb, rows))
    }

    /// span{π^{k_j} e_{i_j}} + π^aΛ₀.
    pub fn from_scaled_basis(amb: &Arc<HermitianAmbient>, gens: &[(usize, i32)]) -> Result<LatticeModule> {
        let rows = gens
            .iter()
            .map(|&(i, k)| amb.scaled_basis_vector(i, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rep_rows(amb, rows))
    }

    /// π^k Λ₀ for |k| ≤ a.
    pub fn pi_power(amb: &Arc<HermitianAmbient>, k: i32) -> Result<LatticeModule> {
        if k.abs() > amb.a as i32 {
            return Err(Error::WindowOverflow(format!("π^{k}Λ₀ is outside the window")));
        }
        let gens: Vec<(usize, i32)> = (0..amb.n).map(|i| (i, k)).collect();
        Self::from_scaled_basis(amb, &gens)
    }

    pub fn lambda0(amb: &Arc<HermitianAmbient>) -> LatticeModule {
        Self::pi_power(amb, 0).expect("Λ₀ is always in the window")
    }

    /// Λ_i = π^{-k} span{π^{-1}e_1, …, π^{-1}e_j, e_{j+1}, …, e_n}, i = kn + j.
    pub fn standard(amb: &Arc<HermitianAmbient>, i: i64) -> Result<LatticeModule> {
        let n = amb.n as i64;
        let a = amb.a as i64;
        if i.abs() > a * n {
            return Err(Error::WindowOverflow(format!("Λ_{i} needs |i| ≤ {}", a * n)));
        }
        let k = i.div_euclid(n);
        let j = i.rem_euclid(n);
        let gens: Vec<(usize, i32)> = (0..amb.n)
            .map(|l| (l, if (l as i64) < j { (-k - 1) as i32 } else { -k as i32 }))
            .collect();
        Self::from_scaled_basis(amb, &gens)
    }

    pub fn ambient(&self) -> &Arc<HermitianAmbient> {
        &self.amb
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    fn ring(&self) -> &ChainRing {
        &self.amb.ring
    }

    fn check_same(&self, other: &LatticeModule) -> Result<()> {
        if self.amb.key() != other.amb.key() {
            Err(Error::DescriptorMismatch)
        } else {
            Ok(())
        }
    }

    /// κ-length of L/π^aΛ₀.
    pub fn length(&self) -> u32 {
        howell::length(self.ring(), &self.rows)
    }

    /// Membership of a representative row.
    pub fn contains_rep(&self, v: &Row) -> bool {
        howell::contains(self.ring(), &self.rows, v)
    }

    /// other ⊆ self.
    pub fn contains(&self, other: &LatticeModule) -> bool {
        other.rows.iter().all(|r| self.contains_rep(r))
    }

    /// π·other ⊆ self (exact: π·π^aΛ₀ ⊆ π^aΛ₀ ⊆ self).
    pub fn contains_pi_multiple(&self, other: &LatticeModule) -> bool {
        let r = self.ring();
        other.rows.iter().all(|row| self.contains_rep(&row.iter().map(|x| r.mul_pi(x)).collect()))
    }

    pub fn sum(&self, other: &LatticeModule) -> Result<LatticeModule> {
        self.check_same(other)?;
        let rows: Vec<Row> = self.rows.iter().chain(&other.rows).cloned().collect();
        Ok(Self::from_rep_rows(&self.amb, rows))
    }

    pub fn intersect(&self, other: &LatticeModule) -> Result<LatticeModule> {
        self.check_same(other)?;
        let n = self.amb.n;
        let r = self.ring();
        let mut rows = Vec::with_capacity(self.rows.len() + other.rows.len());
        for a in &self.rows {
            let mut row = a.clone();
            row.extend_from_slice(a);
            rows.push(row);
        }
        for b in &other.rows {
            let mut row = b.clone();
            row.extend(std::iter::repeat(r.zero()).take(n));
            rows.push(row);
        }
        let h = howell::howell_form(r, rows, 2 * n);
        let kept: Vec<Row> = h
            .into_iter()
            .filter(|row| row[..n].iter().all(ChainRing::is_zero))
            .map(|row| row[n..].to_vec())
            .collect();
        Ok(Self::from_rep_rows(&self.amb, kept))
    }

    /// Hermitian dual L^♯ = {x : h(x, L) ⊆ O_F}.
    pub fn dual(&self) -> LatticeModule {
        let n = self.amb.n;
        let r = self.ring();
        let k = self.rows.len();
        // Row i of [A | I]: A[i][j] = conj(s_j[n-1-i]).
        let rows: Vec<Row> = (0..n)
            .map(|i| {
                let mut row: Row = self.rows.iter().map(|s| r.conj(&s[n - 1 - i])).collect();
                row.extend((0..n).map(|j| if i == j { r.one() } else { r.zero() }));
                row
            })
            .collect();
        let h = howell::howell_form(r, rows, k + n);
        let kept: Vec<Row> = h
            .into_iter()
            .filter(|row| row[..k].iter().all(ChainRing::is_zero))
            .map(|row| row[k..].to_vec())
            .collect();
        Self::from_rep_rows(&self.amb, kept)
    }

    /// L ⊆ L^♯.
    pub fn is_integral(&self) -> bool {
        self.dual().contains(self)
    }

    /// dim_κ(L^♯/L).
    pub fn lattice_type(&self) -> Result<u32> {
        let d = self.dual();
        if !d.contains(self) {
            return Err(Error::NotIntegral);
        }
        Ok(d.length() - self.length())
    }

    /// πL^♯ ⊆ L ⊆ L^♯.
    pub fn is_vertex(&self) -> bool {
        let d = self.dual();
        d.contains(self) && self.contains_pi_multiple(&d)
    }

    /// L ⊇ π^{a-1}Λ₀, i.e. πL still contains π^aΛ₀.
    fn contains_pi_a_minus_1(&self) -> bool {
        let n = self.amb.n;
        let r = self.ring();
        (0..n).all(|i| {
            let mut row = vec![r.zero(); n];
            row[i] = r.pi_pow(r.nil() - 1);
            self.contains_rep(&row)
        })
    }

    /// πL; fails when πL no longer contains π^aΛ₀.
    pub fn pi_mul(&self) -> Result<LatticeModule> {
        if !self.contains_pi_a_minus_1() {
            return Err(Error::WindowOverflow("πL leaves the window".into()));
        }
        Ok(self.pi_mul_clipped())
    }

    /// πL + π^aΛ₀ (always representable).
    pub fn pi_mul_clipped(&self) -> LatticeModule {
        let r = self.ring();
        let rows = self.rows.iter().map(|row| row.iter().map(|x| r.mul_pi(x)).collect()).collect();
        Self::from_rep_rows(&self.amb, rows)
    }

    /// π^{-1}L; fails unless L ⊆ π^{1-a}Λ₀.
    pub fn pi_inv(&self) -> Result<LatticeModule> {
        let r = self.ring();
        let n = self.amb.n;
        if self.rows.iter().flatten().any(|x| r.valuation(x) == Some(0)) {
            return Err(Error::WindowOverflow("π^{-1}L leaves the window".into()));
        }
        let mut rows: Vec<Row> = self.rows.iter().map(|row| row.iter().map(|x| r.div_pi_pow(x, 1)).collect()).collect();
        for i in 0..n {
            let mut row = vec![r.zero(); n];
            row[i] = r.pi_pow(r.nil() - 1);
            rows.push(row);
        }
        Ok(Self::from_rep_rows(&self.amb, rows))
    }

    /// τ(L): entrywise σ in the standard basis.
    pub fn tau(&self) -> LatticeModule {
        let r = self.ring();
        let rows = self.rows.iter().map(|row| row.iter().map(|x| r.sigma(x)).collect()).collect();
        Self::from_rep_rows(&self.amb, rows)
    }

    pub fn tau_inv(&self) -> LatticeModule {
        let r = self.ring();
        let rows = self.rows.iter().map(|row| row.iter().map(|x| r.sigma_inv(x)).collect()).collect();
        Self::from_rep_rows(&self.amb, rows)
    }

    pub fn is_tau_stable(&self) -> bool {
        self.tau() == *self
    }

    /// Base change to level m (m = 1 data embeds as constants).
    pub fn base_change(&self, amb: &Arc<HermitianAmbient>) -> Result<LatticeModule> {
        if amb.n != self.amb.n || amb.a != self.amb.a || amb.p() != self.amb.p() {
            return Err(Error::DescriptorMismatch);
        }
        if self.amb.level() != 1 && amb.level() != self.amb.level() {
            return Err(Error::DescriptorMismatch);
        }
        Ok(Self::from_rep_rows(amb, self.rows.clone()))
    }

    /// Descent of a τ-stable lattice to level 1 (its rational points).
    pub fn descend(&self, amb1: &Arc<HermitianAmbient>) -> Result<LatticeModule> {
        if amb1.level() != 1 {
            return Err(Error::DescriptorMismatch);
        }
        if !self.is_tau_stable() {
            return Err(Error::NotRational);
        }
        // The Howell form of a τ-stable module has rational rows: pivots are
        // π^v and the canonical reductions commute with σ.
        if !self.rows.iter().flatten().all(ChainRing::is_rational) {
            return Err(Error::NotRational);
        }
        Ok(LatticeModule { amb: amb1.clone(), rows: self.rows.clone() })
    }

    /// The same lattice stored in a wider window a' ≥ a.
    pub fn rewindow(&self, amb: &Arc<HermitianAmbient>) -> Result<LatticeModule> {
        if amb.n != self.amb.n || amb.p() != self.amb.p() || amb.level() != self.amb.level() || amb.a < self.amb.a {
            return Err(Error::DescriptorMismatch);
        }
        let (r0, r1) = (self.ring(), amb.ring());
        let shift = amb.a - self.amb.a;
        let lift = |x: &ChainRingElement| {
            let (a0, a1) = r0.parts(x);
            let to_i = |v: Vec<u32>| v.into_iter().map(i64::from).collect::<Vec<_>>();
            r1.mul_pi_pow(&r1.from_parts(&to_i(a0), &to_i(a1)).expect("same level"), shift)
        };
        let mut rows: Vec<Row> = self.rows.iter().map(|row| row.iter().map(lift).collect()).collect();
        for i in 0..self.amb.n {
            rows.push(amb.scaled_basis_vector(i, self.amb.a as i32)?);
        }
        Ok(Self::from_rep_rows(amb, rows))
    }

    pub fn to_json(&self) -> LatticeJson {
        let r = self.ring();
        LatticeJson {
            n: self.amb.n,
            a: self.amb.a,
            p: self.amb.p(),
            m: self.amb.level(),
            rows: self
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| {
                            let (a0, a1) = r.parts(x);
                            [a0, a1]
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(j: &LatticeJson) -> Result<LatticeModule> {
        let amb = HermitianAmbient::new(j.n, j.a, j.p, j.m)?;
        let r = amb.ring.clone();
        let mut rows = Vec::new();
        for row in &j.rows {
            if row.len() != j.n {
                return Err(Error::Parse("row length differs from n".into()));
            }
            let mut out = Vec::new();
            for [a0, a1] in row {
                if a0.len() != j.m as usize || a1.len() != j.m as usize || j.m as usize > MAX_M {
                    return Err(Error::Parse("coefficient list has the wrong length".into()));
                }
                let x = r
                    .from_parts(
                        &a0.iter().map(|&c| c as i64).collect::<Vec<_>>(),
                        &a1.iter().map(|&c| c as i64).collect::<Vec<_>>(),
                    )?;
                out.push(x);
            }
            rows.push(out);
        }
        let l = Self::from_rep_rows(&amb, rows);
        if l.to_json() != *j {
            return Err(Error::Parse("rows are not in Howell normal form".into()));
        }
        Ok(l)
    }
}

/// A pair lower ⊆ upper with π·upper ⊆ lower, so that upper/lower is a
/// κ-vector space. Intermediate lattices correspond to its subspaces.
#[derive(Clone, Debug)]
pub struct IntermediateFrame {
    pub lower: LatticeModule,
    pub upper: LatticeModule,
    /// Representatives of a κ-basis of upper/lower, picked greedily from
    /// the Howell rows of `upper`.
    pub basis: Vec<Row>,
}

impl IntermediateFrame {
    pub fn new(lower: &LatticeModule, upper: &LatticeModule) -> Result<IntermediateFrame> {
        if !upper.contains(lower) || !lower.contains_pi_multiple(upper) {
            return Err(Error::NotSandwiched);
        }
        let mut cur = lower.clone();
        let mut basis = Vec::new();
        for row in upper.rows() {
            if cur.contains_rep(row) {
                continue;
            }
            cur = LatticeModule::from_rep_rows(cur.ambient(), cur.rows().iter().chain(std::iter::once(row)).cloned().collect());
            basis.push(row.clone());
        }
        debug_assert_eq!(cur, *upper);
        Ok(IntermediateFrame { lower: lower.clone(), upper: upper.clone(), basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Lattice lower + span{Σ c_j b_j : c ∈ rows}, coefficients packed in F_{p^m}.
    pub fn lattice_of(&self, coeffs: &[Vec<u32>]) -> LatticeModule {
        let amb = self.lower.ambient();
        let r = amb.ring();
        let n = amb.n();
        let mut rows: Vec<Row> = self.lower.rows().to_vec();
        for c in coeffs {
            let mut v = vec![r.zero(); n];
            for (cj, b) in c.iter().zip(&self.basis) {
                if *cj == 0 {
                    continue;
                }
                let l = r.lift(*cj);
                for (x, y) in v.iter_mut().zip(b) {
                    *x = r.add(x, &r.mul(&l, y));
                }
            }
            rows.push(v);
        }
        LatticeModule::from_rep_rows(amb, rows)
    }

    /// Every intermediate lattice (all dimensions), visiting subspaces of
    /// κ^d in RREF order.
    pub fn all_intermediate(&self, bound: u128) -> Result<Vec<LatticeModule>> {
        let f = self.lower.ambient().ring().residue_field().clone();
        let d = self.dim();
        let total: u128 = (0..=d).map(|k| crate::counting::gaussian_binomial(d as u32, k as u32, f.order() as u64)).sum();
        bound_check("intermediate lattices", total, bound)?;
        let mut out = Vec::with_capacity(total as usize);
        for k in 0..=d {
            linalg::visit_all_rref(&f, d, k, &mut |m| out.push(self.lattice_of(m)));
        }
        Ok(out)
    }

    /// Intermediate lattices of colength `codim` in upper.
    pub fn of_codim(&self, codim: usize) -> Vec<LatticeModule> {
        let f = self.lower.ambient().ring().residue_field().clone();
        let d = self.dim();
        let mut out = Vec::new();
        if codim <= d {
            linalg::visit_all_rref(&f, d, d - codim, &mut |m| out.push(self.lattice_of(m)));
        }
        out
    }
}

pub const VERTEX_ENUMERATION_BOUND: u128 = 2_000_000;

/// Vertex lattices comparable to `l` and differing from it: those above
/// (between L and L^♯) and those below (between πL^♯ + π^aΛ₀ and L).
pub fn vertex_neighbours(l: &LatticeModule) -> Result<Vec<LatticeModule>> {
    let d = l.dual();
    let mut out = Vec::new();
    let up = IntermediateFrame::new(l, &d)?;
    for x in up.all_intermediate(VERTEX_ENUMERATION_BOUND)? {
        if x != *l && x.is_vertex() {
            out.push(x);
        }
    }
    let low = d.pi_mul_clipped();
    let down = IntermediateFrame::new(&low, l)?;
    for x in down.all_intermediate(VERTEX_ENUMERATION_BOUND)? {
        if x != *l && x.is_vertex() {
            out.push(x);
        }
    }
    Ok(out)
}

fn check_enumeration_params(amb: &HermitianAmbient) -> Result<()> {
    if amb.n > 6 || !(amb.p() == 3 || amb.p() == 5) || amb.a > 2 || amb.level() != 1 {
        return Err(Error::BoundExceeded {
            what: format!("vertex enumeration at {amb:?} (supported: n ≤ 6, p ∈ {{3,5}}, a ≤ 2, m = 1)"),
            needed: 0,
            bound: 0,
        });
    }
    Ok(())
}

fn filter_vertex(set: BTreeSet<LatticeModule>, type_filter: Option<u32>, above: Option<&LatticeModule>) -> Vec<LatticeModule> {
    set.into_iter()
        .filter(|l| type_filter.map_or(true, |t| l.lattice_type().ok() == Some(t)))
        .filter(|l| above.map_or(true, |a| l.contains(a)))
        .collect()
}

/// All vertex lattices in the window, by search over comparable neighbours
/// starting at Λ₀. Sorted by Howell rows.
pub fn enumerate_vertex_lattices(
    amb: &Arc<HermitianAmbient>,
    type_filter: Option<u32>,
    above: Option<&LatticeModule>,
) -> Result<Vec<LatticeModule>> {
    check_enumeration_params(amb)?;
    if let Some(t) = type_filter {
        if t % 2 == 1 {
            return Ok(Vec::new());
        }
    }
    let start = LatticeModule::lambda0(amb);
    let mut seen: BTreeSet<LatticeModule> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(l) = queue.pop_front() {
        for nb in vertex_neighbours(&l)? {
            if seen.insert(nb.clone()) {
                bound_check("vertex lattices", seen.len() as u128, VERTEX_ENUMERATION_BOUND)?;
                queue.push_back(nb);
            }
        }
    }
    Ok(filter_vertex(seen, type_filter, above))
}

/// Every submodule of the window, by generating all matrices of Howell
/// shape (pivot π^v, entries at later pivot columns reduced, others free)
/// and canonicalising.
pub fn enumerate_window_lattices_brute(amb: &Arc<HermitianAmbient>, bound: u128) -> Result<Vec<LatticeModule>> {
    let r = amb.ring().clone();
    let n = amb.n;
    let nil = r.nil();
    let els = r.elements();
    let q = r.residue_field().order() as u128;
    // Rough size estimate for the bound check.
    let est: u128 = (els.len() as u128).pow((n * (n - 1) / 2) as u32) * (nil as u128).pow(n as u32);
    bound_check("window submodules (brute force)", est.min(u128::MAX / 2), bound)?;
    let mut seen: BTreeSet<LatticeModule> = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|c| mask & (1 << c) != 0).collect();
        let k = cols.len();
        for vals in 0..(nil as u64).pow(k as u32) {
            let v: Vec<u32> = (0..k).map(|i| ((vals / (nil as u64).pow(i as u32)) % nil as u64) as u32).collect();
            // Free cells and their ranges.
            let mut cells: Vec<(usize, usize, Vec<ChainRingElement>)> = Vec::new();
            for (i, &ci) in cols.iter().enumerate() {
                for c in ci + 1..n {
                    let choices = match cols.iter().position(|&x| x == c) {
                        Some(j) => {
                            let vj = v[j];
                            let mut s: Vec<ChainRingElement> = els.iter().map(|x| r.truncate(x, vj)).collect();
                            s.sort();
                            s.dedup();
                            debug_assert_eq!(s.len() as u128, q.pow(vj));
                            s
                        }
                        None => els.clone(),
                    };
                    cells.push((i, c, choices));
                }
            }
            let mut base: Vec<Row> = cols
                .iter()
                .zip(&v)
                .map(|(&c, &vi)| {
                    let mut row = vec![r.zero(); n];
                    row[c] = r.pi_pow(vi);
                    row
                })
                .collect();
            let mut counter = vec![0usize; cells.len()];
            loop {
                for (t, (i, c, ch)) in cells.iter().enumerate() {
                    base[*i][*c] = ch[counter[t]];
                }
                seen.insert(LatticeModule::from_rep_rows(amb, base.clone()));
                let mut t = 0;
                while t < counter.len() {
                    counter[t] += 1;
                    if counter[t] < cells[t].2.len() {
                        break;
                    }
                    counter[t] = 0;
                    t += 1;
                }
                if t == counter.len() {
                    break;
                }
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Slow path: filter every window submodule.
pub fn enumerate_vertex_lattices_brute(
    amb: &Arc<HermitianAmbient>,
    type_filter: Option<u32>,
    above: Option<&LatticeModule>,
    bound: u128,
) -> Result<Vec<LatticeModule>> {
    check_enumeration_params(amb)?;
    let all = enumerate_window_lattices_brute(amb, bound)?;
    let set: BTreeSet<LatticeModule> = all.into_iter().filter(|l| l.is_vertex()).collect();
    Ok(filter_vertex(set, type_filter, above))
}
