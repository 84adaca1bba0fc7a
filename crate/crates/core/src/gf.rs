//! Finite fields F_{q^m} with q = p^r, p odd.
//!
//! Elements are stored as a single `u32`: the coefficient vector
//! (c_0, ..., c_{d-1}) over F_p in the polynomial basis is packed as
//! sum c_i p^i. Zero packs to 0 and one packs to 1. Multiplication goes
//! through log/exp tables; the q-power Frobenius is a lookup table.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{bound_check, Error, Result};

/// Largest field order we are willing to tabulate.
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 20;

/// Fields up to this order get a full addition table.
const ADD_TABLE_LIMIT: u32 = 729;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub r: u32,
    pub m: u32,
    /// Monic modulus over F_p, coefficients from degree 0 upwards.
    pub modulus: Vec<u32>,
}

impl FieldDescriptor {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.r)
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.r * self.m)
    }

    pub fn degree(&self) -> u32 {
        self.r * self.m
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, low degree first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let d = f.len() - 1;
    let mut t = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            t[i + j] = (t[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for k in (d..t.len()).rev() {
        let c = t[k];
        if c == 0 {
            continue;
        }
        t[k] = 0;
        for j in 0..d {
            let s = (c * f[j] as u64) % p as u64;
            t[k - d + j] = (t[k - d + j] + p as u64 - s) % p as u64;
        }
    }
    let mut out: Vec<u32> = t.iter().map(|&x| x as u32).collect();
    out.resize(d, 0);
    out
}

fn poly_powmod(base: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
    let d = f.len() - 1;
    let mut result = vec![0u32; d];
    result[0] = 1;
    let mut b = base.to_vec();
    b.resize(d, 0);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    result
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    poly_trim(&mut a);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while a.len() > db {
        let da = a.len() - 1;
        let c = (a[da] as u64 * lead_inv as u64 % p as u64) as u32;
        for j in 0..=db {
            let s = (c as u64 * b[j] as u64 % p as u64) as u32;
            a[da - db + j] = (a[da - db + j] + p - s) % p;
        }
        poly_trim(&mut a);
    }
    a
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Rabin-style irreducibility test: f has no factor of degree <= deg/2.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = f.len() - 1;
    if d == 0 || f[d] != 1 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let mut xp = vec![0u32; d];
    xp[1] = 1;
    let x = xp.clone();
    for _ in 1..=d / 2 {
        xp = poly_powmod(&xp, p as u64, f, p);
        let mut diff = xp.clone();
        for (i, &c) in x.iter().enumerate() {
            diff[i] = (diff[i] + p - c) % p;
        }
        let g = poly_gcd(f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn is_primitive(f: &[u32], p: u32) -> bool {
    let d = f.len() - 1;
    if !is_irreducible(f, p) {
        return false;
    }
    let order = (p as u64).pow(d as u32) - 1;
    let mut x = vec![0u32; d];
    if d == 1 {
        // x is the constant -f_0.
        x[0] = (p - f[0]) % p;
    } else {
        x[1] = 1;
    }
    let mut one = vec![0u32; d];
    one[0] = 1;
    if poly_powmod(&x, order, f, p) != one {
        return false;
    }
    prime_factors(order)
        .into_iter()
        .all(|l| poly_powmod(&x, order / l, f, p) != one)
}

/// First primitive monic polynomial of degree `d` over F_p, scanning the
/// lower coefficients as a base-p counter.
pub fn default_modulus(p: u32, d: u32) -> Vec<u32> {
    let total = (p as u64).pow(d);
    for k in 0..total {
        let mut f = Vec::with_capacity(d as usize + 1);
        let mut t = k;
        for _ in 0..d {
            f.push((t % p as u64) as u32);
            t /= p as u64;
        }
        f.push(1);
        if f[0] != 0 && is_primitive(&f, p) {
            return f;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

/// Table-backed field F_{q^m}. Elements are packed `u32`s (see module docs).
pub struct GaloisField {
    desc: FieldDescriptor,
    q: u32,
    order: u32,
    degree: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    frob: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
    pows: Vec<u32>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{} , m={})", self.desc.p, self.desc.r, self.desc.m)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.desc == other.desc
    }
}

impl Eq for GaloisField {}

fn field_cache() -> &'static Mutex<HashMap<(u32, u32, u32), Arc<GaloisField>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32, u32), Arc<GaloisField>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl GaloisField {
    /// The field F_{(p^r)^m} with the default modulus, shared through a cache.
    pub fn standard(p: u32, r: u32, m: u32) -> Result<Arc<GaloisField>> {
        if let Some(f) = field_cache().lock().unwrap().get(&(p, r, m)) {
            return Ok(f.clone());
        }
        Self::check_params(p, r, m, DEFAULT_FIELD_BOUND)?;
        let modulus = default_modulus(p, r * m);
        let f = Arc::new(Self::build(p, r, m, modulus, DEFAULT_FIELD_BOUND)?);
        field_cache().lock().unwrap().entry((p, r, m)).or_insert(f.clone());
        Ok(f)
    }

    /// Build with an explicit modulus (checked for irreducibility).
    pub fn with_modulus(p: u32, r: u32, m: u32, modulus: Vec<u32>) -> Result<GaloisField> {
        Self::check_params(p, r, m, DEFAULT_FIELD_BOUND)?;
        if modulus.len() != (r * m + 1) as usize || modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadParameters("modulus has the wrong shape".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::BadParameters("modulus is reducible".into()));
        }
        Self::build(p, r, m, modulus, DEFAULT_FIELD_BOUND)
    }

    fn check_params(p: u32, r: u32, m: u32, bound: u64) -> Result<()> {
        if p == 2 || !is_prime(p) {
            return Err(Error::BadParameters(format!("p = {p} is not an odd prime")));
        }
        if r == 0 || m == 0 {
            return Err(Error::BadParameters("r and m must be positive".into()));
        }
        let order = (p as u128).pow(r * m);
        bound_check("field order", order, bound as u128)
    }

    fn build(p: u32, r: u32, m: u32, modulus: Vec<u32>, _bound: u64) -> Result<GaloisField> {
        let degree = r * m;
        let order = p.pow(degree);
        let q = p.pow(r);
        let pows: Vec<u32> = (0..=degree).map(|i| p.pow(i)).collect();
        let unpack = |v: u32| -> Vec<u32> { (0..degree).map(|i| (v / pows[i as usize]) % p).collect() };
        let pack = |c: &[u32]| -> u32 { c.iter().enumerate().map(|(i, &x)| x * pows[i]).sum() };

        // Find a generator of the multiplicative group by brute force.
        let group = (order - 1) as u64;
        let factors = prime_factors(group);
        let mut gen = None;
        for g in 2..order {
            let gc = unpack(g % order);
            if gc.iter().all(|&c| c == 0) {
                continue;
            }
            let ok = factors.iter().all(|&l| {
                let e = poly_powmod(&gc, group / l, &modulus, p);
                pack(&e) != 1
            });
            if ok {
                gen = Some(gc);
                break;
            }
        }
        let gen = gen.expect("finite fields have cyclic unit groups");

        let mut exp = vec![0u32; (order - 1) as usize];
        let mut log = vec![0u32; order as usize];
        let mut cur = vec![0u32; degree as usize];
        cur[0] = 1;
        for e in 0..(order - 1) {
            let v = pack(&cur);
            exp[e as usize] = v;
            log[v as usize] = e;
            cur = poly_mulmod(&cur, &gen, &modulus, p);
        }
        debug_assert_eq!(pack(&cur), 1);

        let neg: Vec<u32> = (0..order)
            .map(|v| pack(&unpack(v).iter().map(|&c| (p - c) % p).collect::<Vec<_>>()))
            .collect();
        let mut frob = vec![0u32; order as usize];
        for v in 1..order {
            let l = log[v as usize] as u64 * q as u64 % (order as u64 - 1);
            frob[v as usize] = exp[l as usize];
        }
        let add = if order <= ADD_TABLE_LIMIT {
            let mut t = vec![0u32; (order * order) as usize];
            for a in 0..order {
                let ca = unpack(a);
                for b in 0..order {
                    let cb = unpack(b);
                    let s: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                    t[(a * order + b) as usize] = pack(&s);
                }
            }
            Some(t)
        } else {
            None
        };
        Ok(GaloisField {
            desc: FieldDescriptor { p, r, m, modulus },
            q,
            order,
            degree,
            exp,
            log,
            frob,
            neg,
            add,
            pows,
        })
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn p(&self) -> u32 {
        self.desc.p
    }

    /// q = p^r, the size of the base field.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// q^m, the number of elements.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn level(&self) -> u32 {
        self.desc.m
    }

    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        (0..self.degree).map(|i| (a / self.pows[i as usize]) % self.desc.p).collect()
    }

    pub fn from_coefficients(&self, c: &[u32]) -> u32 {
        c.iter()
            .enumerate()
            .map(|(i, &x)| (x % self.desc.p) * self.pows[i])
            .sum()
    }

    /// Image of an integer under Z -> F_p -> F_{q^m}.
    pub fn from_int(&self, x: i64) -> u32 {
        x.rem_euclid(self.desc.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if let Some(t) = &self.add {
            return t[(a * self.order + b) as usize];
        }
        let p = self.desc.p;
        let (mut x, mut y, mut out, mut pw) = (a, b, 0, 1);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * pw;
            x /= p;
            y /= p;
            pw *= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order - 1;
        let mut l = self.log[a as usize] + self.log[b as usize];
        if l >= n {
            l -= n;
        }
        self.exp[l as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.order - 1;
        Ok(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    /// Inverse of a nonzero element; panics on zero.
    #[inline]
    pub fn inv_nz(&self, a: u32) -> u32 {
        self.inv(a).expect("inverse of zero")
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// x -> x^q.
    #[inline]
    pub fn frob(&self, a: u32) -> u32 {
        self.frob[a as usize]
    }

    /// Inverse Frobenius x -> x^{q^{m-1}}.
    pub fn frob_inv(&self, a: u32) -> u32 {
        let mut x = a;
        for _ in 1..self.desc.m {
            x = self.frob(x);
        }
        x
    }

    pub fn generator(&self) -> u32 {
        if self.order == 2 {
            1
        } else {
            self.exp[1]
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: u32) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_square(&self, a: u32) -> bool {
        a == 0 || self.log[a as usize] % 2 == 0
    }

    /// Elements of the embedded base field F_q.
    pub fn base_field_elements(&self) -> Vec<u32> {
        (0..self.order).filter(|&x| self.frob(x) == x).collect()
    }

    /// Map from the packed elements of `base` (which must be F_q, m = 1,
    /// with the same p and r) into this field.
    pub fn embedding_from(&self, base: &GaloisField) -> Result<Vec<u32>> {
        if base.desc.p != self.desc.p || base.desc.r != self.desc.r || base.desc.m != 1 {
            return Err(Error::DescriptorMismatch);
        }
        if self.desc.m == 1 && base.desc.modulus == self.desc.modulus {
            return Ok((0..base.order).collect());
        }
        let g = &base.desc.modulus;
        if g.len() == 2 {
            // r = 1: F_p sits inside as the constants.
            return Ok((0..base.order).collect());
        }
        // Find the smallest root of the base modulus in this field.
        let eval = |y: u32| -> u32 {
            let mut acc = 0;
            for &c in g.iter().rev() {
                acc = self.add(self.mul(acc, y), self.from_int(c as i64));
            }
            acc
        };
        let root = (0..self.order)
            .find(|&y| eval(y) == 0)
            .ok_or(Error::DescriptorMismatch)?;
        Ok((0..base.order)
            .map(|v| {
                let c = base.coefficients(v);
                let mut acc = 0;
                for &ci in c.iter().rev() {
                    acc = self.add(self.mul(acc, root), self.from_int(ci as i64));
                }
                acc
            })
            .collect())
    }

    /// All elements in packed order 0, 1, ..., q^m - 1.
    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.order
    }
}

/// A field element bound to its field; arithmetic checks that both
/// operands live in the same field.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<GaloisField>,
    value: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.field.coefficients(self.value))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field.desc == other.field.desc
    }
}

impl Eq for FieldElement {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Neg,
}

impl FieldElement {
    pub fn new(field: &Arc<GaloisField>, value: u32) -> Result<FieldElement> {
        if value >= field.order {
            return Err(Error::BadParameters("value out of range".into()));
        }
        Ok(FieldElement { field: field.clone(), value })
    }

    pub fn from_coefficients(field: &Arc<GaloisField>, c: &[u32]) -> Result<FieldElement> {
        if c.len() != field.degree as usize {
            return Err(Error::BadParameters("wrong number of coefficients".into()));
        }
        Ok(FieldElement { field: field.clone(), value: field.from_coefficients(c) })
    }

    pub fn from_int(field: &Arc<GaloisField>, x: i64) -> FieldElement {
        FieldElement { field: field.clone(), value: field.from_int(x) }
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn coefficients(&self) -> Vec<u32> {
        self.field.coefficients(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same(&self, other: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field.desc == other.field.desc {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch)
        }
    }

    fn wrap(&self, value: u32) -> FieldElement {
        FieldElement { field: self.field.clone(), value }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.wrap(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.wrap(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.wrap(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.wrap(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.wrap(self.field.inv(self.value)?))
    }

    pub fn frobenius(&self) -> FieldElement {
        self.wrap(self.field.frob(self.value))
    }

    /// Binary and unary operations behind one entry point.
    pub fn arith(&self, other: Option<&FieldElement>, op: FieldOp) -> Result<FieldElement> {
        match (op, other) {
            (FieldOp::Add, Some(b)) => self.add(b),
            (FieldOp::Mul, Some(b)) => self.mul(b),
            (FieldOp::Inv, _) => self.inv(),
            (FieldOp::Neg, _) => Ok(self.neg()),
            _ => Err(Error::BadParameters("binary operation needs two operands".into())),
        }
    }
}

/// Every element of the field, in packed order.
pub fn enumerate_field(field: &Arc<GaloisField>, bound: u64) -> Result<impl Iterator<Item = FieldElement>> {
    bound_check("field enumeration", field.order as u128, bound as u128)?;
    let f = field.clone();
    Ok((0..field.order).map(move |v| FieldElement { field: f.clone(), value: v }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9_i() -> Arc<GaloisField> {
        Arc::new(GaloisField::with_modulus(3, 1, 2, vec![1, 0, 1]).unwrap())
    }

    #[test]
    fn prime_field_basics() {
        let f3 = GaloisField::standard(3, 1, 1).unwrap();
        let two = FieldElement::from_int(&f3, 2);
        assert_eq!(two.add(&two).unwrap().value(), 1);
        assert_eq!(two.inv().unwrap().value(), 2);
        assert_eq!(two.frobenius(), two);
    }

    #[test]
    fn f9_defining_relation() {
        let f = f9_i();
        let x = FieldElement::from_coefficients(&f, &[0, 1]).unwrap();
        let minus_one = FieldElement::from_int(&f, -1);
        assert_eq!(x.mul(&x).unwrap(), minus_one);
        assert_eq!(x.frobenius(), x.neg());
        let two = FieldElement::from_int(&f, 2);
        assert_eq!(two.frobenius(), two);
    }

    #[test]
    fn mismatch_and_zero_division() {
        let a = FieldElement::from_int(&GaloisField::standard(3, 1, 1).unwrap(), 1);
        let b = FieldElement::from_int(&GaloisField::standard(5, 1, 1).unwrap(), 1);
        assert_eq!(a.add(&b), Err(Error::DescriptorMismatch));
        assert_eq!(a.sub(&a).unwrap().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 - 1 = (x-1)(x+1) over F_3.
        assert!(GaloisField::with_modulus(3, 1, 2, vec![2, 0, 1]).is_err());
        assert!(GaloisField::standard(2, 1, 1).is_err());
        assert!(GaloisField::standard(9, 1, 1).is_err());
    }

    #[test]
    fn enumeration_sizes() {
        for (p, r, m, n) in [(3, 1, 1, 3), (3, 1, 2, 9), (5, 1, 2, 25), (3, 2, 2, 81)] {
            let f = GaloisField::standard(p, r, m).unwrap();
            let all: Vec<u32> = enumerate_field(&f, 100).unwrap().map(|e| e.value()).collect();
            assert_eq!(all.len(), n);
            let mut s = all.clone();
            s.dedup();
            assert_eq!(s.len(), n);
        }
        let f = GaloisField::standard(3, 1, 5).unwrap();
        assert!(enumerate_field(&f, 81).is_err());
    }

    fn brute_mul(f: &GaloisField, a: u32, b: u32) -> u32 {
        let m = &f.descriptor().modulus;
        let c = poly_mulmod(&f.coefficients(a), &f.coefficients(b), m, f.p());
        f.from_coefficients(&c)
    }

    #[test]
    fn tables_match_polynomial_multiplication() {
        for (p, r, m) in [(3, 1, 2), (3, 2, 1), (5, 1, 2), (3, 1, 3), (7, 1, 1)] {
            let f = GaloisField::standard(p, r, m).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), brute_mul(&f, a, b));
                    let ca = f.coefficients(a);
                    let cb = f.coefficients(b);
                    let s: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                    assert_eq!(f.add(a, b), f.from_coefficients(&s));
                }
            }
        }
    }

    #[test]
    fn frobenius_is_automorphism_with_fixed_field_fq() {
        for (p, r, m) in [(3, 1, 2), (3, 1, 4), (3, 2, 2), (5, 1, 2)] {
            let f = GaloisField::standard(p, r, m).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.frob(f.mul(a, b)), f.mul(f.frob(a), f.frob(b)));
                    assert_eq!(f.frob(f.add(a, b)), f.add(f.frob(a), f.frob(b)));
                }
                let mut x = a;
                for _ in 0..m {
                    x = f.frob(x);
                }
                assert_eq!(x, a);
                assert_eq!(f.frob_inv(f.frob(a)), a);
            }
            // Fixed field of x -> x^q is exactly the q roots of x^q = x.
            let fixed = f.base_field_elements();
            assert_eq!(fixed.len() as u32, f.q());
            let brute: Vec<u32> = f.elements().filter(|&x| f.pow(x, f.q() as u64) == x).collect();
            assert_eq!(fixed, brute);
        }
    }

    #[test]
    fn multiplicative_group_cyclic() {
        for (p, r, m) in [(3, 1, 1), (3, 1, 2), (3, 1, 3), (5, 1, 2), (3, 2, 2)] {
            let f = GaloisField::standard(p, r, m).unwrap();
            assert_eq!(f.mult_order(f.generator()), f.order() as u64 - 1);
        }
    }

    #[test]
    fn embedding_of_base_field() {
        let base = GaloisField::standard(3, 2, 1).unwrap();
        let big = GaloisField::standard(3, 2, 2).unwrap();
        let emb = big.embedding_from(&base).unwrap();
        let image: Vec<u32> = {
            let mut v = emb.clone();
            v.sort();
            v
        };
        assert_eq!(image, big.base_field_elements());
        for a in base.elements() {
            for b in base.elements() {
                assert_eq!(emb[base.mul(a, b) as usize], big.mul(emb[a as usize], emb[b as usize]));
                assert_eq!(emb[base.add(a, b) as usize], big.add(emb[a as usize], emb[b as usize]));
            }
        }
    }
}
