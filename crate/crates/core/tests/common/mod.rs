//! Oracles that share no code path with the library's Jacobi-based spectra.
#![allow(dead_code)]

use qmarg::{ComplexMatrix, C64};

/// Rank by complex Gaussian elimination with full pivoting. Entries below
/// `tol · max|entry|` count as zero.
pub fn gauss_rank(rows: &[Vec<C64>], tol: f64) -> usize {
    let mut a: Vec<Vec<C64>> = rows.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    if scale == 0.0 {
        return 0;
    }
    let cut = tol * scale;
    let mut rank = 0;
    let mut col_used = vec![false; ncols];
    for r in 0..nrows {
        // full pivot among remaining rows r.. and unused columns
        let mut best = (0.0, r, 0);
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, z) in row.iter().enumerate() {
                if !col_used[j] && z.norm() > best.0 {
                    best = (z.norm(), i, j);
                }
            }
        }
        if best.0 <= cut {
            break;
        }
        let (_, pi, pj) = best;
        a.swap(r, pi);
        col_used[pj] = true;
        let pivot = a[r][pj];
        for i in r + 1..nrows {
            let f = a[i][pj] / pivot;
            if f != C64::new(0.0, 0.0) {
                let (head, tail) = a.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                    *x -= f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Eigenvalues of the real symmetric 2×2 matrix [[a, b], [b, d]], ascending.
pub fn sym2_eigs(a: f64, b: f64, d: f64) -> [f64; 2] {
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mean - rad, mean + rad]
}

/// The extremal 2⊗3 state as displayed, with irrational constants computed.
pub fn displayed_rho() -> ComplexMatrix {
    let s = 1.0 / 2f64.sqrt();
    #[rustfmt::skip]
    let entries = [
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.5, 0.0, s,   0.0, 0.0,
        0.0, 0.0, 1.0, 0.0, s,   0.0,
        0.0, s,   0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, s,   0.0, 0.5, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ];
    ComplexMatrix::from_real(6, 6, &entries).unwrap().scale(1.0 / 3.0)
}

/// Real coordinates of a Hermitian basis element `B_k` of `Herm(d)`:
/// diagonal units, then `E_ij + E_ji` and `i(E_ij − E_ji)` for `i < j`.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    for i in 0..d {
        out.push(ComplexMatrix::matrix_unit(d, i, i).unwrap());
    }
    for i in 0..d {
        for j in i + 1..d {
            let e = ComplexMatrix::matrix_unit(d, i, j).unwrap();
            let et = ComplexMatrix::matrix_unit(d, j, i).unwrap();
            out.push(&e + &et);
            out.push((&e - &et).scale_complex(C64::new(0.0, 1.0)));
        }
    }
    out
}

/// Flattens real and imaginary parts of all entries into one real row.
pub fn real_coords(m: &ComplexMatrix) -> Vec<C64> {
    m.entries()
        .iter()
        .flat_map(|z| [C64::new(z.re, 0.0), C64::new(z.im, 0.0)])
        .collect()
}

/// Partial traces written out by index sums, independent of the library.
pub fn naive_trace_out_b(mat: &ComplexMatrix, n: usize, m: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..m {
                acc += mat[(i * m + j, k * m + j)];
            }
            out[(i, k)] = acc;
        }
    }
    out
}

pub fn naive_trace_out_a(mat: &ComplexMatrix, n: usize, m: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m, m);
    for j in 0..m {
        for l in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                acc += mat[(i * m + j, i * m + l)];
            }
            out[(j, l)] = acc;
        }
    }
    out
}

/// Dimension of `{Δ ∈ Herm(d), d = n·m : tr_a Δ = 0, tr_b Δ = 0}` by brute force.
pub fn brute_force_full_support_freedom(n: usize, m: usize) -> usize {
    let basis = hermitian_basis(n * m);
    // one row per real constraint, one column per basis element
    let cols: Vec<Vec<C64>> = basis
        .iter()
        .map(|b| {
            let mut c = real_coords(&naive_trace_out_a(b, n, m));
            c.extend(real_coords(&naive_trace_out_b(b, n, m)));
            c
        })
        .collect();
    let rank = gauss_rank(&cols, 1e-10);
    basis.len() - rank
}
