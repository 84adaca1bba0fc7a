//! The truncated ramified ring R = GR(p^k, m)[π]/(π² - p), k = N/2, so that
//! π^N = 0.
//!
//! GR(p^k, m) = (Z/p^k)[x]/(f) where f is the default F_{p^m} modulus read
//! with integer coefficients. An element is a0 + a1·π with a0, a1 in the
//! Galois ring, each stored as a coefficient array of length `MAX_M`.
//!
//! The π-adic digits of a0 + a1·π are the base-p digits of the Galois ring
//! coefficients interleaved: digit 2i comes from a0 and digit 2i+1 from a1.
//! Reading digits with coefficients in [0, p) gives canonical
//! representatives modulo every π^v.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::GaloisField;

pub const MAX_M: usize = 4;

pub type Gr = [u32; MAX_M];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainRingDescriptor {
    pub p: u32,
    /// Nilpotency exponent of π.
    pub n: u32,
    pub m: u32,
}

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainRingElement {
    pub a0: Gr,
    pub a1: Gr,
}

impl fmt::Debug for ChainRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}π)", self.a0, self.a1)
    }
}

pub struct ChainRing {
    desc: ChainRingDescriptor,
    k: u32,
    pk: u64,
    pows: Vec<u32>,
    modulus: Vec<u32>,
    residue: Arc<GaloisField>,
    sigma_pows: Vec<Gr>,
    sigma_inv_pows: Vec<Gr>,
}

impl fmt::Debug for ChainRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R(p={}, N={}, m={})", self.desc.p, self.desc.n, self.desc.m)
    }
}

fn ring_cache() -> &'static Mutex<HashMap<(u32, u32, u32), Arc<ChainRing>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32, u32), Arc<ChainRing>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl ChainRing {
    /// Shared instance for (p, N, m).
    pub fn standard(p: u32, n: u32, m: u32) -> Result<Arc<ChainRing>> {
        if let Some(r) = ring_cache().lock().unwrap().get(&(p, n, m)) {
            return Ok(r.clone());
        }
        let r = Arc::new(Self::new(ChainRingDescriptor { p, n, m })?);
        ring_cache().lock().unwrap().entry((p, n, m)).or_insert(r.clone());
        Ok(r)
    }

    pub fn new(desc: ChainRingDescriptor) -> Result<ChainRing> {
        let ChainRingDescriptor { p, n, m } = desc;
        if n < 2 || n % 2 != 0 {
            return Err(Error::BadParameters(format!("N = {n} must be even and at least 2")));
        }
        if m == 0 || m as usize > MAX_M {
            return Err(Error::BadParameters(format!("m = {m} must be in 1..={MAX_M}")));
        }
        let residue = GaloisField::standard(p, 1, m)?;
        let k = n / 2;
        let pk = (p as u64).pow(k);
        if pk * pk >= (1u64 << 62) / (MAX_M as u64 * 4) {
            return Err(Error::BadParameters("precision too large".into()));
        }
        let pows = (0..=k).map(|i| p.pow(i)).collect();
        let mut ring = ChainRing {
            desc,
            k,
            pk,
            pows,
            modulus: residue.descriptor().modulus.clone(),
            residue,
            sigma_pows: Vec::new(),
            sigma_inv_pows: Vec::new(),
        };
        let sx = ring.frobenius_lift_of_x();
        ring.sigma_pows = ring.powers(&sx);
        // σ^{-1} = σ^{m-1}.
        let mut sinv = ring.gr_x();
        for _ in 1..m {
            sinv = ring.gr_sigma_with(&sinv, &ring.sigma_pows);
        }
        ring.sigma_inv_pows = ring.powers(&sinv);
        Ok(ring)
    }

    pub fn descriptor(&self) -> ChainRingDescriptor {
        self.desc
    }

    pub fn p(&self) -> u32 {
        self.desc.p
    }

    /// π^N = 0.
    pub fn nil(&self) -> u32 {
        self.desc.n
    }

    pub fn level(&self) -> u32 {
        self.desc.m
    }

    /// The residue field F_{p^m}.
    pub fn residue_field(&self) -> &Arc<GaloisField> {
        &self.residue
    }

    // --- Galois ring layer -------------------------------------------------

    fn m(&self) -> usize {
        self.desc.m as usize
    }

    fn gr_x(&self) -> Gr {
        let mut g = [0; MAX_M];
        if self.m() > 1 {
            g[1] = 1;
        } else {
            g[0] = ((self.pk - self.modulus[0] as u64) % self.pk) as u32;
        }
        g
    }

    fn gr_const(&self, c: i64) -> Gr {
        let mut g = [0; MAX_M];
        g[0] = c.rem_euclid(self.pk as i64) as u32;
        g
    }

    fn gr_add(&self, a: &Gr, b: &Gr) -> Gr {
        let mut out = [0; MAX_M];
        for i in 0..self.m() {
            out[i] = ((a[i] as u64 + b[i] as u64) % self.pk) as u32;
        }
        out
    }

    fn gr_neg(&self, a: &Gr) -> Gr {
        let mut out = [0; MAX_M];
        for i in 0..self.m() {
            out[i] = ((self.pk - a[i] as u64) % self.pk) as u32;
        }
        out
    }

    fn gr_sub(&self, a: &Gr, b: &Gr) -> Gr {
        self.gr_add(a, &self.gr_neg(b))
    }

    fn gr_scale(&self, a: &Gr, c: u64) -> Gr {
        let mut out = [0; MAX_M];
        for i in 0..self.m() {
            out[i] = ((a[i] as u64 * c) % self.pk) as u32;
        }
        out
    }

    fn gr_mul(&self, a: &Gr, b: &Gr) -> Gr {
        let m = self.m();
        if m == 1 {
            let mut out = [0; MAX_M];
            out[0] = ((a[0] as u64 * b[0] as u64) % self.pk) as u32;
            return out;
        }
        let pk = self.pk;
        let mut t = [0u64; 2 * MAX_M];
        for i in 0..m {
            if a[i] == 0 {
                continue;
            }
            for j in 0..m {
                t[i + j] = (t[i + j] + a[i] as u64 * b[j] as u64) % pk;
            }
        }
        for d in (m..2 * m - 1).rev() {
            let c = t[d];
            if c == 0 {
                continue;
            }
            t[d] = 0;
            for j in 0..m {
                let s = c * self.modulus[j] as u64 % pk;
                t[d - m + j] = (t[d - m + j] + pk - s) % pk;
            }
        }
        let mut out = [0; MAX_M];
        for i in 0..m {
            out[i] = t[i] as u32;
        }
        out
    }

    fn gr_is_zero(a: &Gr) -> bool {
        a.iter().all(|&c| c == 0)
    }

    /// p-adic valuation of a Galois ring element, None for zero.
    fn gr_vp(&self, a: &Gr) -> Option<u32> {
        let p = self.desc.p;
        let mut best: Option<u32> = None;
        for &c in &a[..self.m()] {
            if c == 0 {
                continue;
            }
            let mut v = 0;
            let mut x = c;
            while x % p == 0 {
                x /= p;
                v += 1;
            }
            best = Some(best.map_or(v, |b: u32| b.min(v)));
        }
        best
    }

    fn gr_residue(&self, a: &Gr) -> u32 {
        let p = self.desc.p;
        (0..self.m()).map(|i| (a[i] % p) * self.residue_pow(i)).sum()
    }

    fn residue_pow(&self, i: usize) -> u32 {
        self.desc.p.pow(i as u32)
    }

    fn gr_lift(&self, c: u32) -> Gr {
        let p = self.desc.p;
        let mut g = [0; MAX_M];
        let mut x = c;
        for gi in g.iter_mut().take(self.m()) {
            *gi = x % p;
            x /= p;
        }
        g
    }

    fn gr_inv(&self, a: &Gr) -> Option<Gr> {
        let r = self.gr_residue(a);
        if r == 0 {
            return None;
        }
        let mut y = self.gr_lift(self.residue.inv_nz(r));
        let two = self.gr_const(2);
        for _ in 0..self.k {
            let ay = self.gr_mul(a, &y);
            y = self.gr_mul(&y, &self.gr_sub(&two, &ay));
        }
        Some(y)
    }

    fn powers(&self, g: &Gr) -> Vec<Gr> {
        let mut out = Vec::with_capacity(self.m());
        let mut cur = self.gr_const(1);
        for _ in 0..self.m() {
            out.push(cur);
            cur = self.gr_mul(&cur, g);
        }
        out
    }

    fn gr_eval_modulus(&self, y: &Gr) -> (Gr, Gr) {
        // Returns (f(y), f'(y)).
        let m = self.m();
        let mut val = [0; MAX_M];
        let mut der = [0; MAX_M];
        for i in (0..=m).rev() {
            der = self.gr_add(&self.gr_mul(&der, y), &val);
            val = self.gr_add(&self.gr_mul(&val, y), &self.gr_const(self.modulus[i] as i64));
        }
        (val, der)
    }

    /// The root of f congruent to x^p, found by Newton iteration.
    fn frobenius_lift_of_x(&self) -> Gr {
        if self.m() == 1 {
            return self.gr_x();
        }
        let x_res = self.desc.p; // packed residue of x
        let mut y = self.gr_lift(self.residue.pow(x_res, self.desc.p as u64));
        for _ in 0..=self.k {
            let (fy, dfy) = self.gr_eval_modulus(&y);
            let inv = self.gr_inv(&dfy).expect("f is separable mod p");
            y = self.gr_sub(&y, &self.gr_mul(&fy, &inv));
        }
        debug_assert!(Self::gr_is_zero(&self.gr_eval_modulus(&y).0));
        y
    }

    fn gr_sigma_with(&self, a: &Gr, pows: &[Gr]) -> Gr {
        let mut out = [0; MAX_M];
        for (i, pw) in pows.iter().enumerate() {
            if a[i] == 0 {
                continue;
            }
            out = self.gr_add(&out, &self.gr_scale(pw, a[i] as u64));
        }
        out
    }

    // --- chain ring layer --------------------------------------------------

    pub fn zero(&self) -> ChainRingElement {
        ChainRingElement::default()
    }

    pub fn one(&self) -> ChainRingElement {
        self.from_int(1)
    }

    pub fn pi(&self) -> ChainRingElement {
        ChainRingElement { a0: [0; MAX_M], a1: self.gr_const(1) }
    }

    pub fn from_int(&self, c: i64) -> ChainRingElement {
        ChainRingElement { a0: self.gr_const(c), a1: [0; MAX_M] }
    }

    /// Build from explicit Galois ring coefficient lists (reduced mod p^k).
    pub fn from_parts(&self, a0: &[i64], a1: &[i64]) -> Result<ChainRingElement> {
        if a0.len() > self.m() || a1.len() > self.m() {
            return Err(Error::BadParameters("too many coefficients".into()));
        }
        let mut x = ChainRingElement::default();
        for (i, &c) in a0.iter().enumerate() {
            x.a0[i] = c.rem_euclid(self.pk as i64) as u32;
        }
        for (i, &c) in a1.iter().enumerate() {
            x.a1[i] = c.rem_euclid(self.pk as i64) as u32;
        }
        Ok(x)
    }

    /// True when the element is in canonical form for this ring.
    pub fn is_canonical(&self, x: &ChainRingElement) -> bool {
        let m = self.m();
        (0..MAX_M).all(|i| {
            if i < m {
                (x.a0[i] as u64) < self.pk && (x.a1[i] as u64) < self.pk
            } else {
                x.a0[i] == 0 && x.a1[i] == 0
            }
        })
    }

    #[inline]
    pub fn add(&self, x: &ChainRingElement, y: &ChainRingElement) -> ChainRingElement {
        ChainRingElement { a0: self.gr_add(&x.a0, &y.a0), a1: self.gr_add(&x.a1, &y.a1) }
    }

    #[inline]
    pub fn sub(&self, x: &ChainRingElement, y: &ChainRingElement) -> ChainRingElement {
        ChainRingElement { a0: self.gr_sub(&x.a0, &y.a0), a1: self.gr_sub(&x.a1, &y.a1) }
    }

    #[inline]
    pub fn neg(&self, x: &ChainRingElement) -> ChainRingElement {
        ChainRingElement { a0: self.gr_neg(&x.a0), a1: self.gr_neg(&x.a1) }
    }

    /// (a0 + a1π)(b0 + b1π) = a0b0 + p·a1b1 + (a0b1 + a1b0)π.
    pub fn mul(&self, x: &ChainRingElement, y: &ChainRingElement) -> ChainRingElement {
        let p = self.desc.p as u64;
        let t = self.gr_scale(&self.gr_mul(&x.a1, &y.a1), p);
        ChainRingElement {
            a0: self.gr_add(&self.gr_mul(&x.a0, &y.a0), &t),
            a1: self.gr_add(&self.gr_mul(&x.a0, &y.a1), &self.gr_mul(&x.a1, &y.a0)),
        }
    }

    pub fn is_zero(x: &ChainRingElement) -> bool {
        Self::gr_is_zero(&x.a0) && Self::gr_is_zero(&x.a1)
    }

    /// π·(a0 + a1π) = p·a1 + a0π.
    pub fn mul_pi(&self, x: &ChainRingElement) -> ChainRingElement {
        ChainRingElement { a0: self.gr_scale(&x.a1, self.desc.p as u64), a1: x.a0 }
    }

    pub fn mul_pi_pow(&self, x: &ChainRingElement, s: u32) -> ChainRingElement {
        let mut y = *x;
        for _ in 0..s {
            y = self.mul_pi(&y);
        }
        y
    }

    /// π^v as an element (zero once v ≥ N).
    pub fn pi_pow(&self, v: u32) -> ChainRingElement {
        self.mul_pi_pow(&self.one(), v)
    }

    /// Exact division by π^s of an element of valuation at least s; the
    /// result has zero digits in positions N-s..N.
    pub fn div_pi_pow(&self, x: &ChainRingElement, s: u32) -> ChainRingElement {
        let p = self.desc.p;
        let mut y = *x;
        for _ in 0..s {
            debug_assert!(y.a0.iter().all(|&c| c % p == 0), "division by π not exact");
            let mut a0 = [0; MAX_M];
            for i in 0..self.m() {
                a0[i] = y.a0[i] / p;
            }
            y = ChainRingElement { a0: y.a1, a1: a0 };
        }
        y
    }

    /// a0 + a1π ↦ a0 - a1π.
    pub fn conj(&self, x: &ChainRingElement) -> ChainRingElement {
        ChainRingElement { a0: x.a0, a1: self.gr_neg(&x.a1) }
    }

    /// Witt Frobenius on the coefficients; fixes π.
    pub fn sigma(&self, x: &ChainRingElement) -> ChainRingElement {
        if self.m() == 1 {
            return *x;
        }
        ChainRingElement {
            a0: self.gr_sigma_with(&x.a0, &self.sigma_pows),
            a1: self.gr_sigma_with(&x.a1, &self.sigma_pows),
        }
    }

    pub fn sigma_inv(&self, x: &ChainRingElement) -> ChainRingElement {
        if self.m() == 1 {
            return *x;
        }
        ChainRingElement {
            a0: self.gr_sigma_with(&x.a0, &self.sigma_inv_pows),
            a1: self.gr_sigma_with(&x.a1, &self.sigma_inv_pows),
        }
    }

    /// π-adic valuation; None stands for infinity (the zero element).
    pub fn valuation(&self, x: &ChainRingElement) -> Option<u32> {
        let v0 = self.gr_vp(&x.a0).map(|v| 2 * v);
        let v1 = self.gr_vp(&x.a1).map(|v| 2 * v + 1);
        match (v0, v1) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (Some(a), Some(b)) => Some(a.min(b)),
        }
    }

    pub fn is_unit(&self, x: &ChainRingElement) -> bool {
        self.valuation(x) == Some(0)
    }

    /// Inverse of a unit: (a0 - a1π)/(a0² - p·a1²).
    pub fn inv(&self, x: &ChainRingElement) -> Option<ChainRingElement> {
        if !self.is_unit(x) {
            return None;
        }
        let norm = self.gr_sub(
            &self.gr_mul(&x.a0, &x.a0),
            &self.gr_scale(&self.gr_mul(&x.a1, &x.a1), self.desc.p as u64),
        );
        let ninv = self.gr_inv(&norm)?;
        let c = self.conj(x);
        Some(ChainRingElement { a0: self.gr_mul(&c.a0, &ninv), a1: self.gr_mul(&c.a1, &ninv) })
    }

    /// The j-th π-adic digit as a packed residue field element.
    pub fn digit(&self, x: &ChainRingElement, j: u32) -> u32 {
        let g = if j % 2 == 0 { &x.a0 } else { &x.a1 };
        let pw = self.pows[(j / 2) as usize];
        let p = self.desc.p;
        (0..self.m()).map(|i| ((g[i] / pw) % p) * self.residue_pow(i)).sum()
    }

    /// Residue in F_{p^m} (digit 0).
    pub fn residue(&self, x: &ChainRingElement) -> u32 {
        self.gr_residue(&x.a0)
    }

    /// The lift of a residue field element with coefficients in [0, p).
    pub fn lift(&self, c: u32) -> ChainRingElement {
        ChainRingElement { a0: self.gr_lift(c), a1: [0; MAX_M] }
    }

    /// Canonical representative modulo π^v: digits below v are kept.
    pub fn truncate(&self, x: &ChainRingElement, v: u32) -> ChainRingElement {
        let k0 = (v + 1) / 2;
        let k1 = v / 2;
        let mut y = ChainRingElement::default();
        for i in 0..self.m() {
            y.a0[i] = x.a0[i] % self.pows[k0.min(self.k) as usize];
            y.a1[i] = x.a1[i] % self.pows[k1.min(self.k) as usize];
        }
        y
    }

    /// All coefficients lie in Z/p^k, i.e. the element comes from m = 1.
    pub fn is_rational(x: &ChainRingElement) -> bool {
        x.a0[1..].iter().all(|&c| c == 0) && x.a1[1..].iter().all(|&c| c == 0)
    }

    /// Number of elements, p^{N·m}.
    pub fn size(&self) -> u64 {
        (self.desc.p as u64).pow(self.desc.n * self.desc.m)
    }

    /// Every element, ordered by its digit expansion.
    pub fn elements(&self) -> Vec<ChainRingElement> {
        let q = self.residue.order() as u64;
        let total = self.size();
        (0..total)
            .map(|mut t| {
                let mut x = self.zero();
                for j in 0..self.desc.n {
                    let d = (t % q) as u32;
                    t /= q;
                    let term = self.mul_pi_pow(&self.lift(d), j);
                    x = self.add(&x, &term);
                }
                x
            })
            .collect()
    }

    /// Raw coefficient view: (a0 coefficients, a1 coefficients), length m.
    pub fn parts(&self, x: &ChainRingElement) -> (Vec<u32>, Vec<u32>) {
        (x.a0[..self.m()].to_vec(), x.a1[..self.m()].to_vec())
    }
}

/// An element bound to its ring, with checked binary operations.
#[derive(Clone)]
pub struct RingElement {
    ring: Arc<ChainRing>,
    value: ChainRingElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Mul,
    Neg,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.value)
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.ring.desc == other.ring.desc
    }
}

impl Eq for RingElement {}

impl RingElement {
    pub fn new(ring: &Arc<ChainRing>, value: ChainRingElement) -> Result<RingElement> {
        if !ring.is_canonical(&value) {
            return Err(Error::BadParameters("element is not reduced for this ring".into()));
        }
        Ok(RingElement { ring: ring.clone(), value })
    }

    pub fn value(&self) -> ChainRingElement {
        self.value
    }

    pub fn arith(&self, other: Option<&RingElement>, op: RingOp) -> Result<RingElement> {
        if let Some(o) = other {
            if o.ring.desc != self.ring.desc {
                return Err(Error::DescriptorMismatch);
            }
        }
        let r = &self.ring;
        let value = match (op, other) {
            (RingOp::Add, Some(b)) => r.add(&self.value, &b.value),
            (RingOp::Mul, Some(b)) => r.mul(&self.value, &b.value),
            (RingOp::Neg, _) => r.neg(&self.value),
            _ => return Err(Error::BadParameters("binary operation needs two operands".into())),
        };
        Ok(RingElement { ring: r.clone(), value })
    }

    pub fn conjugate(&self) -> RingElement {
        RingElement { ring: self.ring.clone(), value: self.ring.conj(&self.value) }
    }

    pub fn sigma(&self) -> RingElement {
        RingElement { ring: self.ring.clone(), value: self.ring.sigma(&self.value) }
    }

    pub fn pi_valuation(&self) -> Option<u32> {
        self.ring.valuation(&self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_squared_is_p() {
        let r = ChainRing::standard(3, 4, 1).unwrap();
        let pi = r.pi();
        assert_eq!(r.mul(&pi, &pi), r.from_int(3));
        let r2 = ChainRing::standard(3, 2, 1).unwrap();
        assert_eq!(r2.mul(&r2.pi(), &r2.pi()), r2.zero());
    }

    #[test]
    fn one_plus_pi_times_one_minus_pi() {
        for m in 1..=2 {
            let r = ChainRing::standard(5, 6, m).unwrap();
            let a = r.add(&r.one(), &r.pi());
            let b = r.sub(&r.one(), &r.pi());
            assert_eq!(r.mul(&a, &b), r.from_int(1 - 5));
        }
    }

    #[test]
    fn conjugation_examples() {
        let r = ChainRing::standard(3, 4, 2).unwrap();
        assert_eq!(r.conj(&r.pi()), r.neg(&r.pi()));
        assert_eq!(r.conj(&r.from_int(7)), r.from_int(7));
        let x = r.add(&r.one(), &r.pi());
        assert_eq!(r.conj(&r.conj(&x)), x);
    }

    #[test]
    fn valuation_examples() {
        let r = ChainRing::standard(3, 6, 1).unwrap();
        assert_eq!(r.valuation(&r.pi()), Some(1));
        assert_eq!(r.valuation(&r.from_int(3)), Some(2));
        assert_eq!(r.valuation(&r.zero()), None);
        assert_eq!(r.valuation(&r.from_int(9)), Some(4));
    }

    #[test]
    fn sigma_examples() {
        let r1 = ChainRing::standard(3, 4, 1).unwrap();
        for x in r1.elements() {
            assert_eq!(r1.sigma(&x), x);
        }
        let r = ChainRing::standard(3, 4, 2).unwrap();
        assert_eq!(r.sigma(&r.from_int(5)), r.from_int(5));
        assert_eq!(r.sigma(&r.pi()), r.pi());
        // Residue level: σ reduces to x -> x^p.
        let r2 = ChainRing::standard(3, 2, 2).unwrap();
        let f = r2.residue_field().clone();
        for c in f.elements() {
            let t = r2.lift(c);
            assert_eq!(r2.residue(&r2.sigma(&t)), f.pow(c, 3));
        }
    }

    fn small_rings() -> Vec<Arc<ChainRing>> {
        vec![
            ChainRing::standard(3, 2, 1).unwrap(),
            ChainRing::standard(3, 4, 1).unwrap(),
            ChainRing::standard(3, 2, 2).unwrap(),
            ChainRing::standard(3, 4, 2).unwrap(),
        ]
    }

    #[test]
    fn sigma_and_conj_are_commuting_ring_automorphisms() {
        for r in small_rings() {
            let els = r.elements();
            let step = if els.len() > 100 { 37 } else { 1 };
            for x in els.iter().step_by(step) {
                assert_eq!(r.sigma(&r.conj(x)), r.conj(&r.sigma(x)));
                let mut y = *x;
                for _ in 0..r.level() {
                    y = r.sigma(&y);
                }
                assert_eq!(y, *x);
                assert_eq!(r.sigma_inv(&r.sigma(x)), *x);
                for z in els.iter().step_by(step) {
                    assert_eq!(r.sigma(&r.mul(x, z)), r.mul(&r.sigma(x), &r.sigma(z)));
                    assert_eq!(r.sigma(&r.add(x, z)), r.add(&r.sigma(x), &r.sigma(z)));
                    assert_eq!(r.conj(&r.mul(x, z)), r.mul(&r.conj(x), &r.conj(z)));
                }
            }
        }
    }

    #[test]
    fn chain_of_principal_ideals() {
        for r in small_rings() {
            let els = r.elements();
            if els.len() > 729 {
                continue;
            }
            for x in &els {
                let mut ideal: Vec<ChainRingElement> = els.iter().map(|y| r.mul(x, y)).collect();
                ideal.sort();
                ideal.dedup();
                let v = r.valuation(x).unwrap_or(r.nil());
                let mut expected: Vec<ChainRingElement> = els
                    .iter()
                    .filter(|y| r.valuation(y).unwrap_or(r.nil()) >= v)
                    .copied()
                    .collect();
                expected.sort();
                assert_eq!(ideal, expected);
            }
        }
    }

    #[test]
    fn units_are_valuation_zero() {
        for r in small_rings() {
            let els = r.elements();
            let units: Vec<_> = els.iter().filter(|x| els.iter().any(|y| r.mul(x, y) == r.one())).collect();
            let val0 = els.iter().filter(|x| r.valuation(x) == Some(0)).count();
            assert_eq!(units.len(), val0);
            let q = r.residue_field().order() as u64;
            // |R| - |(π)| = q^N - q^{N-1}.
            assert_eq!(units.len() as u64, r.size() - r.size() / q);
            for u in units {
                assert_eq!(r.mul(u, &r.inv(u).unwrap()), r.one());
            }
        }
    }

    #[test]
    fn valuation_is_additive() {
        for r in small_rings() {
            let els = r.elements();
            for x in els.iter().step_by(3) {
                for y in els.iter().step_by(5) {
                    if let (Some(a), Some(b)) = (r.valuation(x), r.valuation(y)) {
                        if a + b < r.nil() {
                            assert_eq!(r.valuation(&r.mul(x, y)), Some(a + b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn digits_and_division() {
        let r = ChainRing::standard(3, 6, 2).unwrap();
        let x = r.from_parts(&[5, 22], &[13, 4]).unwrap();
        let mut back = r.zero();
        for j in 0..r.nil() {
            back = r.add(&back, &r.mul_pi_pow(&r.lift(r.digit(&x, j)), j));
        }
        assert_eq!(back, x);
        let y = r.mul_pi_pow(&x, 3);
        assert_eq!(r.mul_pi_pow(&r.div_pi_pow(&y, 3), 3), y);
        assert_eq!(r.truncate(&x, 0), r.zero());
        let t = r.truncate(&x, 3);
        assert!(r.valuation(&r.sub(&x, &t)).unwrap() >= 3);
    }

    #[test]
    fn checked_ops_reject_mismatch() {
        let r = ChainRing::standard(3, 4, 1).unwrap();
        let s = ChainRing::standard(3, 6, 1).unwrap();
        let a = RingElement::new(&r, r.pi()).unwrap();
        let b = RingElement::new(&s, s.pi()).unwrap();
        assert_eq!(a.arith(Some(&b), RingOp::Add), Err(Error::DescriptorMismatch));
        assert_eq!(a.arith(Some(&a), RingOp::Mul).unwrap().value(), r.from_int(3));
        assert_eq!(a.pi_valuation(), Some(1));
        assert!(ChainRing::standard(3, 3, 1).is_err());
    }
}
