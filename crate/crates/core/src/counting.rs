//! Closed-form subspace counts over F_Q.

/// Number of k-dimensional subspaces of F_Q^n.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

/// |P^{d-1}(F_Q)| = number of lines in F_Q^d; 0 for d = 0.
pub fn projective_count(d: u32, q: u64) -> u128 {
    gaussian_binomial(d, 1, q)
}

/// Totally isotropic k-subspaces of a nondegenerate symplectic space of
/// dimension 2t.
pub fn symplectic_isotropic_count(t: u32, k: u32, q: u64) -> u128 {
    if k > t {
        return 0;
    }
    let mut c = gaussian_binomial(t, k, q);
    for i in 0..k {
        c *= (q as u128).pow(t - i) + 1;
    }
    c
}

/// Witt index and type of a nondegenerate quadratic space: odd dimension
/// 2w+1, or even dimension 2w of plus type (index w) or minus type
/// (index w-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthogonalType {
    Odd,
    Plus,
    Minus,
}

pub fn witt_index(dim: u32, ty: OrthogonalType) -> u32 {
    match ty {
        OrthogonalType::Odd => (dim - 1) / 2,
        OrthogonalType::Plus => dim / 2,
        OrthogonalType::Minus => dim / 2 - 1,
    }
}

/// Totally singular k-subspaces of a nondegenerate quadratic space.
pub fn orthogonal_isotropic_count(dim: u32, ty: OrthogonalType, k: u32, q: u64) -> u128 {
    if dim == 0 {
        return u128::from(k == 0);
    }
    let w = witt_index(dim, ty);
    if k > w {
        return 0;
    }
    let q128 = q as u128;
    let mut c = gaussian_binomial(w, k, q);
    for i in 0..k {
        let e = match ty {
            OrthogonalType::Odd => w - i,
            OrthogonalType::Plus => w - i - 1,
            OrthogonalType::Minus => w - i + 1,
        };
        c *= q128.pow(e) + 1;
    }
    c
}
