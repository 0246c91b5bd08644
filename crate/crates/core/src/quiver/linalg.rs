//! Small dense linear algebra over F_q on flat row-major slices of element
//! indices. Everything here is exact; sizes stay tiny (n <= 4 or so), so
//! schoolbook algorithms are the right tool.

use crate::ffield::Fq;

/// Embed a signed integer coefficient into the field.
pub(crate) fn scalar_of<F: Fq>(f: &F, c: i64) -> u32 {
    let p = f.p() as i64;
    let r = c.rem_euclid(p) as u64;
    f.scalar(r)
}

/// a (ar x ac) times b (ac x bc), row-major.
pub(crate) fn matmul<F: Fq>(f: &F, a: &[u32], ar: usize, ac: usize, b: &[u32], bc: usize) -> Vec<u32> {
    debug_assert_eq!(a.len(), ar * ac);
    debug_assert_eq!(b.len(), ac * bc);
    let mut out = vec![0u32; ar * bc];
    for i in 0..ar {
        for l in 0..ac {
            let ail = a[i * ac + l];
            if ail == 0 {
                continue;
            }
            for j in 0..bc {
                let t = f.mul(ail, b[l * bc + j]);
                out[i * bc + j] = f.add(out[i * bc + j], t);
            }
        }
    }
    out
}

pub(crate) fn mat_trace<F: Fq>(f: &F, a: &[u32], n: usize) -> u32 {
    debug_assert_eq!(a.len(), n * n);
    let mut acc = 0u32;
    for i in 0..n {
        acc = f.add(acc, a[i * n + i]);
    }
    acc
}

pub(crate) fn mat_add_scaled<F: Fq>(f: &F, acc: &mut [u32], scale: u32, b: &[u32]) {
    debug_assert_eq!(acc.len(), b.len());
    for (x, &y) in acc.iter_mut().zip(b) {
        *x = f.add(*x, f.mul(scale, y));
    }
}

/// Rank of a rows x cols matrix by Gaussian elimination; consumes the rows.
pub(crate) fn rank<F: Fq>(f: &F, mut rows: Vec<Vec<u32>>, cols: usize) -> usize {
    let mut r = 0usize;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, pivot);
        let inv = f.inv(rows[r][c]);
        for j in c..cols {
            rows[r][j] = f.mul(rows[r][j], inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let s = rows[i][c];
                for j in c..cols {
                    let t = f.mul(s, rows[r][j]);
                    rows[i][j] = f.sub(rows[i][j], t);
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Basis of the null space {x : M x = 0} for a rows x cols matrix, one
/// vector of length cols per free variable.
pub(crate) fn kernel_basis<F: Fq>(f: &F, mut rows: Vec<Vec<u32>>, cols: usize) -> Vec<Vec<u32>> {
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, pivot);
        let inv = f.inv(rows[r][c]);
        for j in c..cols {
            rows[r][j] = f.mul(rows[r][j], inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let s = rows[i][c];
                for j in c..cols {
                    let t = f.mul(s, rows[r][j]);
                    rows[i][j] = f.sub(rows[i][j], t);
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let is_pivot = {
        let mut v = vec![false; cols];
        for &c in &pivot_col_of_row {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut vec_x = vec![0u32; cols];
        vec_x[free] = 1;
        for (row, &pc) in pivot_col_of_row.iter().enumerate() {
            // x[pc] = -rows[row][free]
            vec_x[pc] = f.neg(rows[row][free]);
        }
        basis.push(vec_x);
    }
    basis
}
