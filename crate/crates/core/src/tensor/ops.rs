//! Raw kernels shared by the tape's forward and backward passes.

use super::{axpy, dot};

/// `y = A x` for row-major `A` of shape `rows × cols`.
pub(crate) fn matvec(a: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), rows * cols);
    a.chunks_exact(cols).map(|row| dot(row, x)).collect()
}

/// `C = A B` for `A: m×k`, `B: k×n`.
pub(crate) fn matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * n];
    for (i, out_row) in out.chunks_exact_mut(n).enumerate() {
        for (p, &aip) in a[i * k..(i + 1) * k].iter().enumerate() {
            if aip != 0.0 {
                axpy(aip, &b[p * n..(p + 1) * n], out_row);
            }
        }
    }
    out
}

/// Backward of `y = A x`: `dA += g xᵀ`, `dx += Aᵀ g`.
pub(crate) fn matvec_backward(a: &[f64], cols: usize, x: &[f64], g: &[f64], da: &mut [f64], dx: &mut [f64]) {
    for ((row, da_row), &gr) in a.chunks_exact(cols).zip(da.chunks_exact_mut(cols)).zip(g) {
        if gr != 0.0 {
            axpy(gr, x, da_row);
            axpy(gr, row, dx);
        }
    }
}

/// Backward of `C = A B`: `dA += G Bᵀ`, `dB += Aᵀ G`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn matmul_backward(
    a: &[f64],
    b: &[f64],
    g: &[f64],
    m: usize,
    k: usize,
    n: usize,
    da: &mut [f64],
    db: &mut [f64],
) {
    for i in 0..m {
        let g_row = &g[i * n..(i + 1) * n];
        for p in 0..k {
            da[i * k + p] += dot(g_row, &b[p * n..(p + 1) * n]);
            let aip = a[i * k + p];
            if aip != 0.0 {
                axpy(aip, g_row, &mut db[p * n..(p + 1) * n]);
            }
        }
    }
}
