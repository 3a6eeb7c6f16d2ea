//! Inner compute loops shared by the tape operations.
//!
//! Every kernel sums each output element in ascending-k order, so results
//! are bit-identical whether or not the row-parallel path is taken, and
//! identical to a naive triple loop.

use rayon::prelude::*;

/// Below this many multiply-adds the rayon dispatch overhead outweighs the
/// parallel speedup and the kernels stay on one thread.
const PAR_THRESHOLD: usize = 250_000;

/// Rows per micro-kernel block: four output rows share one streamed b-row.
const ROW_BLOCK: usize = 4;

fn nn_block(c_block: &mut [f64], a_block: &[f64], b: &[f64], k: usize, n: usize) {
    let rows = c_block.len() / n;
    if rows == ROW_BLOCK {
        let (c0, rest) = c_block.split_at_mut(n);
        let (c1, rest) = rest.split_at_mut(n);
        let (c2, c3) = rest.split_at_mut(n);
        for kk in 0..k {
            let a0 = a_block[kk];
            let a1 = a_block[k + kk];
            let a2 = a_block[2 * k + kk];
            let a3 = a_block[3 * k + kk];
            if a0 == 0.0 && a1 == 0.0 && a2 == 0.0 && a3 == 0.0 {
                continue;
            }
            let b_row = &b[kk * n..(kk + 1) * n];
            for (j, &bv) in b_row.iter().enumerate() {
                c0[j] += a0 * bv;
                c1[j] += a1 * bv;
                c2[j] += a2 * bv;
                c3[j] += a3 * bv;
            }
        }
    } else {
        for (i, c_row) in c_block.chunks_exact_mut(n).enumerate() {
            let a_row = &a_block[i * k..(i + 1) * k];
            for (kk, &aik) in a_row.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                let b_row = &b[kk * n..(kk + 1) * n];
                for (cj, &bj) in c_row.iter_mut().zip(b_row) {
                    *cj += aik * bj;
                }
            }
        }
    }
}

/// c[m×n] += a[m×k] · b[k×n]
pub fn matmul_nn_acc(c: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(c.len(), m * n);
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    let work = |(blk, c_block): (usize, &mut [f64])| {
        let rows = c_block.len() / n;
        let start = blk * ROW_BLOCK;
        nn_block(c_block, &a[start * k..(start + rows) * k], b, k, n);
    };
    if m * k * n >= PAR_THRESHOLD {
        c.par_chunks_mut(ROW_BLOCK * n).enumerate().for_each(work);
    } else {
        c.chunks_mut(ROW_BLOCK * n).enumerate().for_each(work);
    }
}

/// c[m×n] += aᵀ·b where a is stored k×m.
pub fn matmul_tn_acc(c: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(c.len(), m * n);
    debug_assert_eq!(a.len(), k * m);
    debug_assert_eq!(b.len(), k * n);
    // One strided pass to transpose a, then the streaming kernel.
    let mut at = vec![0.0; m * k];
    for kk in 0..k {
        let src = &a[kk * m..(kk + 1) * m];
        for (i, &v) in src.iter().enumerate() {
            at[i * k + kk] = v;
        }
    }
    matmul_nn_acc(c, &at, b, m, k, n);
}

/// c[m×n] += a·bᵀ where b is stored n×k.
pub fn matmul_nt_acc(c: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(c.len(), m * n);
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), n * k);
    let mut bt = vec![0.0; k * n];
    for j in 0..n {
        let src = &b[j * k..(j + 1) * k];
        for (kk, &v) in src.iter().enumerate() {
            bt[kk * n + j] = v;
        }
    }
    matmul_nn_acc(c, a, &bt, m, k, n);
}

/// Unfold a batch of 1-D multichannel signals for convolution.
///
/// x is [batch, in_ch, len]; the output columns buffer is
/// [in_ch·kernel, batch·out_len] with zero padding outside the signal.
#[allow(clippy::too_many_arguments)]
pub fn im2col(
    cols: &mut [f64],
    x: &[f64],
    batch: usize,
    in_ch: usize,
    len: usize,
    kernel: usize,
    stride: usize,
    padding: usize,
    out_len: usize,
) {
    debug_assert_eq!(cols.len(), in_ch * kernel * batch * out_len);
    debug_assert_eq!(x.len(), batch * in_ch * len);
    let width = batch * out_len;
    for ci in 0..in_ch {
        for kk in 0..kernel {
            let row = &mut cols[(ci * kernel + kk) * width..(ci * kernel + kk + 1) * width];
            for b in 0..batch {
                let x_chan = &x[(b * in_ch + ci) * len..(b * in_ch + ci + 1) * len];
                let dst = &mut row[b * out_len..(b + 1) * out_len];
                for (j, d) in dst.iter_mut().enumerate() {
                    let src = (j * stride + kk) as isize - padding as isize;
                    *d = if src >= 0 && (src as usize) < len {
                        x_chan[src as usize]
                    } else {
                        0.0
                    };
                }
            }
        }
    }
}

/// Adjoint of [`im2col`]: scatter-add columns back onto the signal grid.
#[allow(clippy::too_many_arguments)]
pub fn col2im_acc(
    dx: &mut [f64],
    cols: &[f64],
    batch: usize,
    in_ch: usize,
    len: usize,
    kernel: usize,
    stride: usize,
    padding: usize,
    out_len: usize,
) {
    debug_assert_eq!(cols.len(), in_ch * kernel * batch * out_len);
    debug_assert_eq!(dx.len(), batch * in_ch * len);
    let width = batch * out_len;
    for ci in 0..in_ch {
        for kk in 0..kernel {
            let row = &cols[(ci * kernel + kk) * width..(ci * kernel + kk + 1) * width];
            for b in 0..batch {
                let dx_chan = &mut dx[(b * in_ch + ci) * len..(b * in_ch + ci + 1) * len];
                let src = &row[b * out_len..(b + 1) * out_len];
                for (j, &v) in src.iter().enumerate() {
                    let dst = (j * stride + kk) as isize - padding as isize;
                    if dst >= 0 && (dst as usize) < len {
                        dx_chan[dst as usize] += v;
                    }
                }
            }
        }
    }
}

/// Transpose between [batch, ch, len] and [ch, batch·len] layouts.
pub fn bcl_to_cbl(dst: &mut [f64], src: &[f64], batch: usize, ch: usize, len: usize) {
    debug_assert_eq!(dst.len(), src.len());
    for b in 0..batch {
        for c in 0..ch {
            let s = &src[(b * ch + c) * len..(b * ch + c + 1) * len];
            let d = &mut dst[c * batch * len + b * len..c * batch * len + (b + 1) * len];
            d.copy_from_slice(s);
        }
    }
}

/// Inverse of [`bcl_to_cbl`].
pub fn cbl_to_bcl(dst: &mut [f64], src: &[f64], batch: usize, ch: usize, len: usize) {
    debug_assert_eq!(dst.len(), src.len());
    for b in 0..batch {
        for c in 0..ch {
            let s = &src[c * batch * len + b * len..c * batch * len + (b + 1) * len];
            let d = &mut dst[(b * ch + c) * len..(b * ch + c + 1) * len];
            d.copy_from_slice(s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_nn(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
        let mut c = vec![0.0; m * n];
        for i in 0..m {
            for kk in 0..k {
                for j in 0..n {
                    c[i * n + j] += a[i * k + kk] * b[kk * n + j];
                }
            }
        }
        c
    }

    #[test]
    fn matmul_variants_agree_with_naive() {
        // Sizes straddle the row-block width to exercise remainders.
        for (m, k, n) in [(5, 7, 4), (8, 3, 9), (13, 16, 6), (4, 4, 4), (1, 5, 3)] {
            let a: Vec<f64> = (0..m * k).map(|i| (i as f64 * 0.37).sin()).collect();
            let b: Vec<f64> = (0..k * n).map(|i| (i as f64 * 0.11).cos()).collect();
            let want = naive_nn(&a, &b, m, k, n);

            let mut c = vec![0.0; m * n];
            matmul_nn_acc(&mut c, &a, &b, m, k, n);
            assert_eq!(c, want, "nn {m}x{k}x{n}");

            let mut at = vec![0.0; k * m];
            for i in 0..m {
                for kk in 0..k {
                    at[kk * m + i] = a[i * k + kk];
                }
            }
            let mut c = vec![0.0; m * n];
            matmul_tn_acc(&mut c, &at, &b, m, k, n);
            assert_eq!(c, want, "tn {m}x{k}x{n}");

            let mut bt = vec![0.0; n * k];
            for kk in 0..k {
                for j in 0..n {
                    bt[j * k + kk] = b[kk * n + j];
                }
            }
            let mut c = vec![0.0; m * n];
            matmul_nt_acc(&mut c, &a, &bt, m, k, n);
            assert_eq!(c, want, "nt {m}x{k}x{n}");
        }
    }

    #[test]
    fn parallel_path_is_bitwise_identical() {
        // Large enough to take the rayon path; compare against the naive
        // oracle exactly.
        let (m, k, n) = (64, 96, 80);
        let a: Vec<f64> = (0..m * k).map(|i| (i as f64 * 0.013).sin()).collect();
        let b: Vec<f64> = (0..k * n).map(|i| (i as f64 * 0.029).cos()).collect();
        let want = naive_nn(&a, &b, m, k, n);
        let mut c = vec![0.0; m * n];
        matmul_nn_acc(&mut c, &a, &b, m, k, n);
        assert_eq!(c, want);
    }

    #[test]
    fn im2col_col2im_are_adjoint() {
        // <im2col(x), c> == <x, col2im(c)> for random x, c.
        let (batch, in_ch, len, kernel, stride, padding) = (2, 3, 9, 4, 2, 1);
        let out_len = (len + 2 * padding - kernel) / stride + 1;
        let x: Vec<f64> = (0..batch * in_ch * len)
            .map(|i| (i as f64 * 0.7).sin())
            .collect();
        let c: Vec<f64> = (0..in_ch * kernel * batch * out_len)
            .map(|i| (i as f64 * 0.3).cos())
            .collect();

        let mut cols = vec![0.0; c.len()];
        im2col(
            &mut cols, &x, batch, in_ch, len, kernel, stride, padding, out_len,
        );
        let lhs: f64 = cols.iter().zip(&c).map(|(a, b)| a * b).sum();

        let mut dx = vec![0.0; x.len()];
        col2im_acc(
            &mut dx, &c, batch, in_ch, len, kernel, stride, padding, out_len,
        );
        let rhs: f64 = dx.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn layout_transpose_roundtrip() {
        let (batch, ch, len) = (3, 2, 5);
        let src: Vec<f64> = (0..batch * ch * len).map(|i| i as f64).collect();
        let mut mid = vec![0.0; src.len()];
        let mut back = vec![0.0; src.len()];
        bcl_to_cbl(&mut mid, &src, batch, ch, len);
        cbl_to_bcl(&mut back, &mid, batch, ch, len);
        assert_eq!(src, back);
    }
}
