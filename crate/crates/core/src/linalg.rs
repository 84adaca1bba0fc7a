//! Dense linear algebra over a `GaloisField` with packed `u32` entries.

use crate::gf::GaloisField;

pub type Mat = Vec<Vec<u32>>;

/// Reduced row echelon form in place; zero rows are dropped. Returns the
/// pivot columns.
pub fn rref(f: &GaloisField, rows: &mut Mat) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(i) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, i);
        let inv = f.inv_nz(rows[r][c]);
        if inv != 1 {
            for x in rows[r].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let s = f.neg(row[c]);
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if y != 0 {
                    *x = f.add(*x, f.mul(s, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(f: &GaloisField, rows: &Mat) -> usize {
    let mut m = rows.clone();
    rref(f, &mut m).len()
}

/// Basis (in RREF) of {x : A x = 0}.
pub fn nullspace(f: &GaloisField, a: &Mat, ncols: usize) -> Mat {
    let mut m = a.clone();
    let pivots = rref(f, &mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![0u32; ncols];
        v[fc] = 1;
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = f.neg(row[fc]);
        }
        out.push(v);
    }
    rref(f, &mut out);
    out
}

/// Intersection of two row spaces in F^ncols (Zassenhaus).
pub fn intersect(f: &GaloisField, a: &Mat, b: &Mat, ncols: usize) -> Mat {
    let mut m: Mat = Vec::with_capacity(a.len() + b.len());
    for r in a {
        let mut row = r.clone();
        row.extend_from_slice(r);
        m.push(row);
    }
    for r in b {
        let mut row = r.clone();
        row.extend(std::iter::repeat(0).take(ncols));
        m.push(row);
    }
    let pivots = rref(f, &mut m);
    let mut out: Mat = m
        .into_iter()
        .zip(pivots)
        .filter(|(_, p)| *p >= ncols)
        .map(|(r, _)| r[ncols..].to_vec())
        .collect();
    rref(f, &mut out);
    out
}

pub fn mat_mul(f: &GaloisField, a: &Mat, b: &Mat) -> Mat {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(0, |acc, (&x, brow)| if x == 0 { acc } else { f.add(acc, f.mul(x, brow[j])) })
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat(f: &GaloisField, v: &[u32], m: &Mat) -> Vec<u32> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0u32; cols];
    for (&x, row) in v.iter().zip(m) {
        if x == 0 {
            continue;
        }
        for (o, &y) in out.iter_mut().zip(row) {
            if y != 0 {
                *o = f.add(*o, f.mul(x, y));
            }
        }
    }
    out
}

pub fn dot(f: &GaloisField, a: &[u32], b: &[u32]) -> u32 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| if x == 0 || y == 0 { acc } else { f.add(acc, f.mul(x, y)) })
}

/// x G y^T.
pub fn bilinear(f: &GaloisField, x: &[u32], g: &Mat, y: &[u32]) -> u32 {
    dot(f, &vec_mat(f, x, g), y)
}

pub fn transpose(m: &Mat) -> Mat {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn inverse(f: &GaloisField, a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u32::from(i == j)));
            row
        })
        .collect();
    let pivots = rref(f, &mut m);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(f: &GaloisField, a: &Mat) -> u32 {
    let n = a.len();
    let mut m = a.clone();
    let mut det = 1;
    for c in 0..n {
        let Some(i) = (c..n).find(|&i| m[i][c] != 0) else {
            return 0;
        };
        if i != c {
            m.swap(i, c);
            det = f.neg(det);
        }
        det = f.mul(det, m[c][c]);
        let inv = f.inv_nz(m[c][c]);
        for i in c + 1..n {
            if m[i][c] == 0 {
                continue;
            }
            let s = f.neg(f.mul(m[i][c], inv));
            for j in c..n {
                let t = f.mul(s, m[c][j]);
                m[i][j] = f.add(m[i][j], t);
            }
        }
    }
    det
}

/// Apply a field map entrywise.
pub fn map_entries(m: &Mat, g: impl Fn(u32) -> u32) -> Mat {
    m.iter().map(|r| r.iter().map(|&x| g(x)).collect()).collect()
}

/// Every RREF matrix with `d` rows and `n` columns over `f`, calling `visit`
/// for each. Pivot patterns are visited in lexicographic order.
pub fn visit_all_rref(f: &GaloisField, n: usize, d: usize, visit: &mut dyn FnMut(&Mat)) {
    let q = f.order();
    for pivots in combinations(n, d) {
        // Free cells: (row, col) with col > pivot[row] and col not a pivot.
        let mut cells = Vec::new();
        for (i, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    cells.push((i, c));
                }
            }
        }
        let mut m: Mat = vec![vec![0; n]; d];
        for (i, &pc) in pivots.iter().enumerate() {
            m[i][pc] = 1;
        }
        let mut counter = vec![0u32; cells.len()];
        loop {
            for (k, &(i, c)) in cells.iter().enumerate() {
                m[i][c] = counter[k];
            }
            visit(&m);
            let mut k = 0;
            while k < counter.len() {
                counter[k] += 1;
                if counter[k] < q {
                    break;
                }
                counter[k] = 0;
                k += 1;
            }
            if k == counter.len() {
                break;
            }
        }
    }
}

/// k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}
