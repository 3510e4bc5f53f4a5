//! Dense rank kernels.
//!
//! [`generic_rank`] is plain Gaussian elimination over any [`Field`]. The
//! prime-field kernel [`prime_rank`] is blocked: it finds the pivots of a
//! column panel, then applies the whole panel to the trailing columns as one
//! floating-point matrix product. Residues are below `p`, so a product of a
//! `k`-column panel is exact in `f64` as long as `k (p-1)^2 < 2^53`.

use crate::field::{Field, PrimeField};

/// Panel width for the blocked prime-field kernel.
const PANEL: usize = 256;
/// Rows per trailing-update chunk.
const CHUNK_ROWS: usize = 128;
const F64_EXACT: u64 = 1 << 53;

pub fn generic_rank<F: Field>(f: &F, mut data: Vec<F::Elem>, rows: usize, cols: usize) -> usize {
    debug_assert_eq!(data.len(), rows * cols);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !f.is_zero(&data[r * cols + c])) else {
            continue;
        };
        if piv != rank {
            for j in c..cols {
                data.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = f.inv(&data[rank * cols + c]);
        for j in c..cols {
            data[rank * cols + j] = f.mul(&data[rank * cols + j], &inv);
        }
        let (top, bottom) = data.split_at_mut((rank + 1) * cols);
        let pivot_row = &top[rank * cols..];
        for row in bottom.chunks_mut(cols) {
            let factor = row[c].clone();
            if f.is_zero(&factor) {
                continue;
            }
            for j in c..cols {
                if !f.is_zero(&pivot_row[j]) {
                    row[j] = f.sub_mul(&row[j], &factor, &pivot_row[j]);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of a dense row-major matrix of residues modulo `f.modulus()`.
pub fn prime_rank(f: &PrimeField, mut data: Vec<u32>, rows: usize, cols: usize) -> usize {
    debug_assert_eq!(data.len(), rows * cols);
    let p = f.modulus() as u64;
    let exact_width = (F64_EXACT / ((p - 1) * (p - 1) + p)) as usize;
    let width = exact_width.min(PANEL);
    if width < 16 {
        return generic_rank(f, data, rows, cols);
    }

    let mut active: Vec<usize> = (0..rows).collect();
    let mut rank = 0;
    let mut c0 = 0;
    while c0 < cols && !active.is_empty() {
        let w = width.min(cols - c0);
        let panel = find_panel_pivots(f, &data, cols, c0, w, &active);
        let k = panel.pivot_rows.len();
        if k > 0 {
            let rest = cols - c0 - w;
            if rest > 0 {
                update_trailing(f, &mut data, cols, c0, w, &active, &panel);
            }
            let mut is_pivot = vec![false; active.len()];
            for &i in &panel.pivot_rows {
                is_pivot[i] = true;
            }
            let mut idx = 0;
            active.retain(|_| {
                let keep = !is_pivot[idx];
                idx += 1;
                keep
            });
            rank += k;
        }
        c0 += w;
    }
    rank
}

struct Panel {
    /// Positions (into the active list) of the rows chosen as pivots.
    pivot_rows: Vec<usize>,
    /// Pivot columns, relative to the panel start.
    pivot_cols: Vec<usize>,
}

/// Scans active rows until the panel's row space is saturated, keeping a
/// reduced echelon basis of what has been seen.
fn find_panel_pivots(
    f: &PrimeField,
    data: &[u32],
    cols: usize,
    c0: usize,
    w: usize,
    active: &[usize],
) -> Panel {
    let mut basis: Vec<Vec<u32>> = Vec::new();
    let mut pivot_cols = Vec::new();
    let mut pivot_rows = Vec::new();
    let mut v = vec![0u32; w];
    for (ai, &r) in active.iter().enumerate() {
        if basis.len() == w {
            break;
        }
        v.copy_from_slice(&data[r * cols + c0..r * cols + c0 + w]);
        for (b, &pc) in basis.iter().zip(&pivot_cols) {
            let c = v[pc];
            if c != 0 {
                for j in 0..w {
                    if b[j] != 0 {
                        v[j] = f.sub_mul(&v[j], &c, &b[j]);
                    }
                }
            }
        }
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            continue;
        };
        let inv = f.inv(&v[pc]);
        for x in v.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for b in basis.iter_mut() {
            let c = b[pc];
            if c != 0 {
                for j in 0..w {
                    if v[j] != 0 {
                        b[j] = f.sub_mul(&b[j], &c, &v[j]);
                    }
                }
            }
        }
        basis.push(v.clone());
        pivot_cols.push(pc);
        pivot_rows.push(ai);
    }
    Panel {
        pivot_rows,
        pivot_cols,
    }
}

#[inline]
fn reduce_f64(x: f64, p: f64, pinv: f64) -> u32 {
    let mut r = x - (x * pinv).floor() * p;
    if r < 0.0 {
        r += p;
    } else if r >= p {
        r -= p;
    }
    r as u32
}

/// Inverse of a square matrix known to be invertible (Gauss-Jordan).
fn invert(f: &PrimeField, mut a: Vec<u32>, k: usize) -> Vec<u32> {
    let mut inv = vec![0u32; k * k];
    for i in 0..k {
        inv[i * k + i] = 1;
    }
    for c in 0..k {
        let piv = (c..k)
            .find(|&r| a[r * k + c] != 0)
            .expect("pivot block is invertible");
        if piv != c {
            for j in 0..k {
                a.swap(piv * k + j, c * k + j);
                inv.swap(piv * k + j, c * k + j);
            }
        }
        let s = f.inv(&a[c * k + c]);
        for j in 0..k {
            a[c * k + j] = f.mul(&a[c * k + j], &s);
            inv[c * k + j] = f.mul(&inv[c * k + j], &s);
        }
        for r in 0..k {
            if r == c {
                continue;
            }
            let factor = a[r * k + c];
            if factor == 0 {
                continue;
            }
            for j in 0..k {
                a[r * k + j] = f.sub_mul(&a[r * k + j], &factor, &a[c * k + j]);
                inv[r * k + j] = f.sub_mul(&inv[r * k + j], &factor, &inv[c * k + j]);
            }
        }
    }
    inv
}

/// `C -= A * B` for row-major f64 blocks.
fn gemm_sub(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    debug_assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    // SAFETY: the slices cover the row-major extents passed as strides.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            -1.0,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            n as isize,
            1,
            1.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Eliminates the panel from every non-pivot active row and applies the same
/// row operations to the columns right of the panel.
fn update_trailing(
    f: &PrimeField,
    data: &mut [u32],
    cols: usize,
    c0: usize,
    w: usize,
    active: &[usize],
    panel: &Panel,
) {
    let k = panel.pivot_rows.len();
    let rest_start = c0 + w;
    let rest = cols - rest_start;
    let p = f.modulus() as f64;
    let pinv = 1.0 / p;

    // Pivot block and its inverse: the panel's reduced echelon basis is
    // `inv(B) * pivot rows`.
    let mut block = vec![0u32; k * k];
    for (i, &ai) in panel.pivot_rows.iter().enumerate() {
        let r = active[ai];
        for (j, &pc) in panel.pivot_cols.iter().enumerate() {
            block[i * k + j] = data[r * cols + c0 + pc];
        }
    }
    let block_inv: Vec<f64> = invert(f, block, k).into_iter().map(f64::from).collect();

    let mut upper = vec![0f64; k * rest];
    for (i, &ai) in panel.pivot_rows.iter().enumerate() {
        let r = active[ai];
        for (dst, &src) in upper[i * rest..(i + 1) * rest]
            .iter_mut()
            .zip(&data[r * cols + rest_start..(r + 1) * cols])
        {
            *dst = src as f64;
        }
    }
    let mut reduced_upper = vec![0f64; k * rest];
    gemm_sub(k, k, rest, &block_inv, &upper, &mut reduced_upper);
    // gemm_sub produced -inv(B) * U; reduce into [0, p).
    for x in reduced_upper.iter_mut() {
        *x = reduce_f64(-*x, p, pinv) as f64;
    }
    drop(upper);

    let mut is_pivot = vec![false; active.len()];
    for &i in &panel.pivot_rows {
        is_pivot[i] = true;
    }
    let others: Vec<usize> = active
        .iter()
        .enumerate()
        .filter(|(i, _)| !is_pivot[*i])
        .map(|(_, &r)| r)
        .collect();

    let mut coeffs = vec![0f64; CHUNK_ROWS * k];
    let mut acc = vec![0f64; CHUNK_ROWS * rest];
    for chunk in others.chunks(CHUNK_ROWS) {
        let h = chunk.len();
        let mut any = false;
        for (i, &r) in chunk.iter().enumerate() {
            for (j, &pc) in panel.pivot_cols.iter().enumerate() {
                let v = data[r * cols + c0 + pc];
                any |= v != 0;
                coeffs[i * k + j] = v as f64;
            }
        }
        if !any {
            continue;
        }
        for (i, &r) in chunk.iter().enumerate() {
            for (dst, &src) in acc[i * rest..(i + 1) * rest]
                .iter_mut()
                .zip(&data[r * cols + rest_start..(r + 1) * cols])
            {
                *dst = src as f64;
            }
        }
        gemm_sub(h, k, rest, &coeffs, &reduced_upper, &mut acc);
        for (i, &r) in chunk.iter().enumerate() {
            for (dst, &src) in data[r * cols + rest_start..(r + 1) * cols]
                .iter_mut()
                .zip(&acc[i * rest..(i + 1) * rest])
            {
                *dst = reduce_f64(src, p, pinv);
            }
        }
    }
}
