//! Finite form spaces over F_q and their subspaces over F_{q^m}.
//!
//! A vertex lattice Λ of type 2t gives two quotients: the symplectic space
//! V_Λ = Λ^♯/Λ with ⟨x, y⟩ = π·h(x, y) mod π, and the orthogonal space
//! V_{Λ^♯} = π^{-1}Λ/Λ^♯ with (x, y) = p·h(x, y) mod π. Both are
//! computed on window representatives by reading one π-adic digit of
//! h(x', y') (see `lattices` for the scaling).

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{self, OrthogonalType};
use crate::error::{bound_check, Error, Result};
use crate::gf::GaloisField;
use crate::howell::Row;
use crate::lattices::{HermitianAmbient, IntermediateFrame, LatticeModule};
use crate::linalg::{self, Mat};

/// Refuse enumerations with more candidates than this.
pub const SUBSPACE_BOUND: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Symplectic,
    Orthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Any,
    Isotropic,
}

/// Where a quotient space came from.
#[derive(Debug, Clone)]
pub struct QuotientOrigin {
    pub lattice: LatticeModule,
    pub lower: LatticeModule,
    pub upper: LatticeModule,
    pub basis: Vec<Row>,
    /// The form is (-1)^a times digit `digit` of h on representatives.
    pub digit: u32,
}

#[derive(Debug, Clone)]
pub struct FormSpace {
    kind: FormKind,
    dim: usize,
    base: Arc<GaloisField>,
    gram: Mat,
    origin: Option<QuotientOrigin>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSpaceJson {
    pub kind: FormKind,
    pub dim: usize,
    pub q: u32,
    pub m: u32,
    pub gram: Vec<Vec<Vec<u32>>>,
}

/// Subspace in reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient_dim: usize,
    level: u32,
    rows: Mat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub dim: usize,
    /// basis[i][j] = F_p coefficients of entry (i, j).
    pub basis: Vec<Vec<Vec<u32>>>,
}

impl Subspace {
    pub fn new(field: &GaloisField, ambient_dim: usize, mut rows: Mat) -> Subspace {
        linalg::rref(field, &mut rows);
        Subspace { ambient_dim, level: field.level(), rows }
    }

    pub fn zero(ambient_dim: usize, level: u32) -> Subspace {
        Subspace { ambient_dim, level, rows: Vec::new() }
    }

    pub fn whole(ambient_dim: usize, level: u32) -> Subspace {
        let rows = (0..ambient_dim)
            .map(|i| (0..ambient_dim).map(|j| u32::from(i == j)).collect())
            .collect();
        Subspace { ambient_dim, level, rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn rows(&self) -> &Mat {
        &self.rows
    }

    pub fn to_json(&self, field: &GaloisField) -> SubspaceJson {
        SubspaceJson {
            dim: self.dim(),
            basis: self.rows.iter().map(|r| r.iter().map(|&x| field.coefficients(x)).collect()).collect(),
        }
    }

    pub fn from_json(field: &GaloisField, ambient_dim: usize, j: &SubspaceJson) -> Result<Subspace> {
        let rows: Mat = j
            .basis
            .iter()
            .map(|r| r.iter().map(|c| field.from_coefficients(c)).collect())
            .collect();
        if rows.iter().any(|r| r.len() != ambient_dim) || rows.len() != j.dim {
            return Err(Error::Parse("subspace basis has the wrong shape".into()));
        }
        let s = Subspace::new(field, ambient_dim, rows.clone());
        if s.rows != rows {
            return Err(Error::Parse("basis is not in reduced echelon form".into()));
        }
        Ok(s)
    }
}

/// One level F_{q^m} of a form space: field plus embedded Gram matrix.
#[derive(Debug, Clone)]
pub struct FormLevel {
    pub kind: FormKind,
    pub field: Arc<GaloisField>,
    pub gram: Mat,
}

impl FormLevel {
    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn pair(&self, x: &[u32], y: &[u32]) -> u32 {
        linalg::bilinear(&self.field, x, &self.gram, y)
    }

    pub fn is_isotropic(&self, u: &Subspace) -> bool {
        u.rows.iter().all(|x| u.rows.iter().all(|y| self.pair(x, y) == 0))
    }

    pub fn dual(&self, u: &Subspace) -> Subspace {
        // U^⊥ = {y : x G y = 0 for x ∈ U} = nullspace of U·G.
        let ug = linalg::mat_mul(&self.field, &u.rows, &self.gram);
        let rows = if u.rows.is_empty() {
            Subspace::whole(self.dim(), self.field.level()).rows
        } else {
            linalg::nullspace(&self.field, &ug, self.dim())
        };
        Subspace { ambient_dim: self.dim(), level: self.field.level(), rows }
    }

    pub fn frobenius(&self, u: &Subspace) -> Subspace {
        let rows = linalg::map_entries(&u.rows, |x| self.field.frob(x));
        Subspace::new(&self.field, u.ambient_dim, rows)
    }

    pub fn frobenius_inv(&self, u: &Subspace) -> Subspace {
        let rows = linalg::map_entries(&u.rows, |x| self.field.frob_inv(x));
        Subspace::new(&self.field, u.ambient_dim, rows)
    }

    pub fn sum(&self, u: &Subspace, w: &Subspace) -> Result<Subspace> {
        self.check(u, w)?;
        let rows = u.rows.iter().chain(&w.rows).cloned().collect();
        Ok(Subspace::new(&self.field, u.ambient_dim, rows))
    }

    pub fn intersect(&self, u: &Subspace, w: &Subspace) -> Result<Subspace> {
        self.check(u, w)?;
        let rows = linalg::intersect(&self.field, &u.rows, &w.rows, u.ambient_dim);
        Ok(Subspace { ambient_dim: u.ambient_dim, level: u.level, rows })
    }

    /// w ⊆ u.
    pub fn contains(&self, u: &Subspace, w: &Subspace) -> Result<bool> {
        self.check(u, w)?;
        let mut m = u.rows.clone();
        m.extend(w.rows.iter().cloned());
        Ok(linalg::rank(&self.field, &m) == u.dim())
    }

    fn check(&self, u: &Subspace, w: &Subspace) -> Result<()> {
        if u.ambient_dim != self.dim() || w.ambient_dim != self.dim() || u.level != self.field.level() || w.level != self.field.level() {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    pub fn is_rational(&self, u: &Subspace) -> bool {
        self.frobenius(u) == *u
    }

    pub fn orthogonal_type(&self) -> OrthogonalType {
        let d = self.dim();
        if d % 2 == 1 {
            return OrthogonalType::Odd;
        }
        let det = linalg::determinant(&self.field, &self.gram);
        let w = d / 2;
        let disc = if w % 2 == 1 { self.field.neg(det) } else { det };
        if self.field.is_square(disc) {
            OrthogonalType::Plus
        } else {
            OrthogonalType::Minus
        }
    }

    pub fn witt_index(&self) -> usize {
        match self.kind {
            FormKind::Symplectic => self.dim() / 2,
            FormKind::Orthogonal => counting::witt_index(self.dim() as u32, self.orthogonal_type()) as usize,
        }
    }

    /// Number of candidates an enumeration will visit.
    pub fn candidate_count(&self, d: usize, constraint: Constraint) -> u128 {
        let q = self.field.order() as u64;
        let n = self.dim() as u32;
        match (constraint, self.kind) {
            (Constraint::Any, _) => counting::gaussian_binomial(n, d as u32, q),
            (Constraint::Isotropic, FormKind::Symplectic) => counting::symplectic_isotropic_count(n / 2, d as u32, q),
            (Constraint::Isotropic, FormKind::Orthogonal) => {
                counting::orthogonal_isotropic_count(n, self.orthogonal_type(), d as u32, q)
            }
        }
    }

    /// Visit every d-subspace (or isotropic d-subspace) in echelon order,
    /// restricted to pivot pattern `pivots`.
    fn visit_pattern(&self, pivots: &[usize], constraint: Constraint, visit: &mut dyn FnMut(&Mat)) {
        let n = self.dim();
        let d = pivots.len();
        let mut rows: Mat = vec![vec![0; n]; d];
        for (i, &c) in pivots.iter().enumerate() {
            rows[i][c] = 1;
        }
        self.fill_row(pivots, 0, &mut rows, constraint, visit);
    }

    fn fill_row(&self, pivots: &[usize], i: usize, rows: &mut Mat, constraint: Constraint, visit: &mut dyn FnMut(&Mat)) {
        let d = pivots.len();
        if i == d {
            visit(rows);
            return;
        }
        let f = &self.field;
        let n = self.dim();
        let pc = pivots[i];
        let free: Vec<usize> = (pc + 1..n).filter(|c| !pivots.contains(c)).collect();
        let q = f.order();
        // Affine solution space x0 + span(kernel) for the free entries.
        let (x0, kernel) = if constraint == Constraint::Isotropic && i > 0 {
            // Equations: for j < i, (r_j G)[pc] + Σ_c (r_j G)[c] x_c = 0.
            let mut aug: Mat = Vec::with_capacity(i);
            for r in rows.iter().take(i) {
                let g = linalg::vec_mat(f, r, &self.gram);
                let mut eq: Vec<u32> = free.iter().map(|&c| g[c]).collect();
                eq.push(f.neg(g[pc]));
                aug.push(eq);
            }
            let k = free.len();
            let piv = linalg::rref(f, &mut aug);
            if piv.last() == Some(&k) {
                return;
            }
            let mut x0 = vec![0u32; k];
            for (row, &p) in aug.iter().zip(&piv) {
                x0[p] = row[k];
            }
            let coeffs: Mat = aug.iter().map(|r| r[..k].to_vec()).collect();
            let kernel = if coeffs.is_empty() {
                (0..k).map(|a| (0..k).map(|b| u32::from(a == b)).collect()).collect()
            } else {
                linalg::nullspace(f, &coeffs, k)
            };
            (x0, kernel)
        } else {
            let k = free.len();
            (vec![0u32; k], (0..k).map(|a| (0..k).map(|b| u32::from(a == b)).collect()).collect::<Mat>())
        };
        let kd = kernel.len();
        let mut lambda = vec![0u32; kd];
        loop {
            let mut x = x0.clone();
            for (l, kv) in lambda.iter().zip(&kernel) {
                if *l == 0 {
                    continue;
                }
                for (xi, &ki) in x.iter_mut().zip(kv) {
                    *xi = f.add(*xi, f.mul(*l, ki));
                }
            }
            for (&c, &v) in free.iter().zip(&x) {
                rows[i][c] = v;
            }
            let ok = !(constraint == Constraint::Isotropic && self.kind == FormKind::Orthogonal)
                || self.pair(&rows[i], &rows[i]) == 0;
            if ok {
                self.fill_row(pivots, i + 1, rows, constraint, visit);
            }
            let mut t = 0;
            while t < kd {
                lambda[t] += 1;
                if lambda[t] < q {
                    break;
                }
                lambda[t] = 0;
                t += 1;
            }
            if t == kd {
                break;
            }
        }
        for &c in &free {
            rows[i][c] = 0;
        }
    }

    /// Parallel fold over all (isotropic) d-subspaces. Work is split by
    /// pivot pattern and partial results are combined in pattern order.
    pub fn fold_subspaces<A, I, F, C>(&self, d: usize, constraint: Constraint, init: I, fold: F, combine: C) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &Mat) + Sync,
        C: Fn(A, A) -> A,
    {
        bound_check("subspace enumeration", self.candidate_count(d, constraint), SUBSPACE_BOUND)?;
        let patterns = linalg::combinations(self.dim(), d);
        let parts: Vec<A> = patterns
            .par_iter()
            .map(|pv| {
                let mut acc = init();
                self.visit_pattern(pv, constraint, &mut |m| fold(&mut acc, m));
                acc
            })
            .collect();
        Ok(parts.into_iter().fold(init(), combine))
    }

    pub fn enumerate_subspaces(&self, d: usize, constraint: Constraint) -> Result<Vec<Subspace>> {
        let n = self.dim();
        let level = self.field.level();
        self.fold_subspaces(
            d,
            constraint,
            Vec::new,
            |acc: &mut Vec<Subspace>, m| acc.push(Subspace { ambient_dim: n, level, rows: m.clone() }),
            |mut a, b| {
                a.extend(b);
                a
            },
        )
    }

    /// Every subspace of every dimension, for small spaces.
    pub fn all_subspaces(&self) -> Result<Vec<Subspace>> {
        let mut out = Vec::new();
        for d in 0..=self.dim() {
            out.extend(self.enumerate_subspaces(d, Constraint::Any)?);
        }
        Ok(out)
    }

    /// d-subspaces of a given subspace W, expressed in ambient coordinates.
    pub fn subspaces_of(&self, w: &Subspace, d: usize) -> Result<Vec<Subspace>> {
        let f = &self.field;
        let k = w.dim();
        bound_check("subspaces of a subspace", counting::gaussian_binomial(k as u32, d as u32, f.order() as u64), SUBSPACE_BOUND)?;
        let mut out = Vec::new();
        linalg::visit_all_rref(f, k, d, &mut |c| {
            let rows = linalg::mat_mul(f, c, &w.rows);
            out.push(Subspace::new(f, self.dim(), rows));
        });
        Ok(out)
    }

    pub fn subspace(&self, rows: Mat) -> Subspace {
        Subspace::new(&self.field, self.dim(), rows)
    }
}

fn antidiagonal(dim: usize, f: &GaloisField, alternating: bool) -> Mat {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i + j != dim - 1 {
                        0
                    } else if alternating && i >= dim / 2 {
                        f.neg(1)
                    } else {
                        1
                    }
                })
                .collect()
        })
        .collect()
}

impl FormSpace {
    pub fn new(kind: FormKind, base: Arc<GaloisField>, gram: Mat) -> Result<FormSpace> {
        if base.level() != 1 {
            return Err(Error::BadParameters("Gram matrix must be given over F_q".into()));
        }
        let dim = gram.len();
        if gram.iter().any(|r| r.len() != dim) {
            return Err(Error::BadParameters("Gram matrix is not square".into()));
        }
        for i in 0..dim {
            for j in 0..dim {
                let ok = match kind {
                    FormKind::Symplectic => gram[i][j] == base.neg(gram[j][i]),
                    FormKind::Orthogonal => gram[i][j] == gram[j][i],
                };
                if !ok {
                    return Err(Error::BadParameters(format!("Gram matrix is not {kind:?}")));
                }
            }
        }
        if kind == FormKind::Symplectic && dim % 2 == 1 {
            return Err(Error::BadParameters("symplectic dimension must be even".into()));
        }
        if dim > 0 && linalg::determinant(&base, &gram) == 0 {
            return Err(Error::BadParameters("Gram matrix is degenerate".into()));
        }
        Ok(FormSpace { kind, dim, base, gram, origin: None })
    }

    /// Split symplectic space of dimension 2t with antidiagonal Gram (1 above, -1 below).
    pub fn standard_symplectic(p: u32, r: u32, t: usize) -> Result<FormSpace> {
        let base = GaloisField::standard(p, r, 1)?;
        let g = antidiagonal(2 * t, &base, true);
        FormSpace::new(FormKind::Symplectic, base, g)
    }

    /// Orthogonal space with antidiagonal unit Gram.
    pub fn standard_orthogonal(p: u32, r: u32, dim: usize) -> Result<FormSpace> {
        let base = GaloisField::standard(p, r, 1)?;
        let g = antidiagonal(dim, &base, false);
        FormSpace::new(FormKind::Orthogonal, base, g)
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn base_field(&self) -> &Arc<GaloisField> {
        &self.base
    }

    pub fn origin(&self) -> Option<&QuotientOrigin> {
        self.origin.as_ref()
    }

    pub fn at_level(&self, m: u32) -> Result<FormLevel> {
        let d = self.base.descriptor();
        let field = GaloisField::standard(d.p, d.r, m)?;
        let emb = field.embedding_from(&self.base)?;
        Ok(FormLevel { kind: self.kind, gram: linalg::map_entries(&self.gram, |x| emb[x as usize]), field })
    }

    pub fn to_json(&self) -> FormSpaceJson {
        FormSpaceJson {
            kind: self.kind,
            dim: self.dim,
            q: self.base.q(),
            m: 1,
            gram: self.gram.iter().map(|r| r.iter().map(|&x| self.base.coefficients(x)).collect()).collect(),
        }
    }

    pub fn from_json(j: &FormSpaceJson) -> Result<FormSpace> {
        let mut p = 0;
        let mut r = 0;
        for cand in 3..=j.q {
            if crate::gf::is_prime(cand) {
                let mut x = 1;
                let mut e = 0;
                while x < j.q {
                    x *= cand;
                    e += 1;
                }
                if x == j.q {
                    p = cand;
                    r = e;
                    break;
                }
            }
        }
        if p == 0 || j.m != 1 {
            return Err(Error::Parse(format!("unsupported field size q = {}", j.q)));
        }
        let base = GaloisField::standard(p, r, 1)?;
        let gram: Mat = j.gram.iter().map(|row| row.iter().map(|c| base.from_coefficients(c)).collect()).collect();
        let fs = FormSpace::new(j.kind, base, gram)?;
        if fs.dim != j.dim {
            return Err(Error::Parse("dimension does not match the Gram matrix".into()));
        }
        Ok(fs)
    }

    fn from_quotient(kind: FormKind, lattice: &LatticeModule, lower: LatticeModule, upper: LatticeModule, digit: u32) -> Result<FormSpace> {
        let frame = IntermediateFrame::new(&lower, &upper)?;
        let amb = lattice.ambient();
        let ring = amb.ring();
        let base = ring.residue_field().clone();
        let neg = amb.window() % 2 == 1;
        let gram: Mat = frame
            .basis
            .iter()
            .map(|x| {
                frame
                    .basis
                    .iter()
                    .map(|y| {
                        let v = ring.digit(&amb.herm(x, y), digit);
                        if neg {
                            base.neg(v)
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        let mut fs = FormSpace::new(kind, base, gram)?;
        fs.origin = Some(QuotientOrigin { lattice: lattice.clone(), lower, upper, basis: frame.basis, digit });
        Ok(fs)
    }

    /// V_Λ = Λ^♯/Λ with ⟨x, y⟩ = π·h(x, y) mod π.
    pub fn symplectic_quotient(lattice: &LatticeModule) -> Result<FormSpace> {
        check_rational(lattice)?;
        if !lattice.is_vertex() {
            return Err(Error::NotVertex);
        }
        let d = lattice.dual();
        if d == *lattice {
            return Err(Error::ZeroType);
        }
        let a = lattice.ambient().window();
        Self::from_quotient(FormKind::Symplectic, lattice, lattice.clone(), d, 2 * a - 1)
    }

    /// V_{Λ^♯} = π^{-1}Λ/Λ^♯ with (x, y) = p·h(x, y) mod π.
    pub fn orthogonal_quotient(lattice: &LatticeModule) -> Result<FormSpace> {
        check_rational(lattice)?;
        if !lattice.is_vertex() {
            return Err(Error::NotVertex);
        }
        let d = lattice.dual();
        let up = lattice.pi_inv()?;
        if up == d {
            return Err(Error::ZeroDim);
        }
        let a = lattice.ambient().window();
        Self::from_quotient(FormKind::Orthogonal, lattice, d, up, 2 * a - 2)
    }

    /// The lattice/subspace dictionary at level m (requires a quotient origin).
    pub fn dictionary(&self, m: u32) -> Result<Dictionary> {
        let origin = self.origin.as_ref().ok_or_else(|| Error::BadParameters("form space has no lattice origin".into()))?;
        let amb = origin.lattice.ambient().at_level(m)?;
        let level = self.at_level(m)?;
        let lower = origin.lower.base_change(&amb)?;
        let upper = origin.upper.base_change(&amb)?;
        let frame = IntermediateFrame { lower, upper, basis: origin.basis.clone() };
        let gram_inv = linalg::inverse(&level.field, &level.gram).ok_or(Error::BadParameters("degenerate Gram".into()))?;
        Ok(Dictionary { amb, level, frame, gram_inv, digit: origin.digit })
    }
}

fn check_rational(l: &LatticeModule) -> Result<()> {
    if l.ambient().level() != 1 {
        return Err(Error::BadParameters("quotients are built from rational lattices (m = 1)".into()));
    }
    Ok(())
}

/// Bijection between lattices lower ⊆ M ⊆ upper at level m and subspaces
/// of the quotient over F_{q^m}.
#[derive(Debug, Clone)]
pub struct Dictionary {
    pub amb: Arc<HermitianAmbient>,
    pub level: FormLevel,
    pub frame: IntermediateFrame,
    gram_inv: Mat,
    digit: u32,
}

impl Dictionary {
    fn form_value(&self, x: &Row, y: &Row) -> u32 {
        let ring = self.amb.ring();
        let v = ring.digit(&self.amb.herm(x, y), self.digit);
        if self.amb.window() % 2 == 1 {
            self.level.field.neg(v)
        } else {
            v
        }
    }

    /// Coordinates of x modulo `lower` in the quotient basis.
    pub fn coordinates(&self, x: &Row) -> Vec<u32> {
        let w: Vec<u32> = self.frame.basis.iter().map(|b| self.form_value(b, x)).collect();
        // w = G c.
        self.gram_inv.iter().map(|row| linalg::dot(&self.level.field, row, &w)).collect()
    }

    pub fn subspace_of_lattice(&self, m: &LatticeModule) -> Result<Subspace> {
        if m.ambient().level() != self.amb.level() {
            return Err(Error::SpaceMismatch);
        }
        if !m.contains(&self.frame.lower) || !self.frame.upper.contains(m) {
            return Err(Error::NotSandwiched);
        }
        let rows: Mat = m.rows().iter().map(|r| self.coordinates(r)).collect();
        Ok(Subspace::new(&self.level.field, self.level.dim(), rows))
    }

    pub fn lattice_of_subspace(&self, u: &Subspace) -> Result<LatticeModule> {
        if u.ambient_dim != self.level.dim() {
            return Err(Error::SpaceMismatch);
        }
        let rows = if u.level == self.level.field.level() {
            u.rows.clone()
        } else if u.level == 1 {
            // Rational subspace given over F_q: embed.
            let base = GaloisField::standard(self.level.field.p(), 1, 1)?;
            let emb = self.level.field.embedding_from(&base)?;
            linalg::map_entries(&u.rows, |x| emb[x as usize])
        } else {
            return Err(Error::SpaceMismatch);
        };
        Ok(self.frame.lattice_of(&rows))
    }
}
