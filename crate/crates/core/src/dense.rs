//! Small dense helpers on complex matrices shared by the modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type Mat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn zeros(r: usize, c: usize) -> Mat {
    Mat::from_element(r, c, ZERO)
}

pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// Determinant with the convention det of the empty matrix = 1.
pub fn det(m: &Mat) -> Complex64 {
    assert_eq!(m.nrows(), m.ncols(), "det of non-square matrix");
    if m.nrows() == 0 {
        ONE
    } else {
        m.clone().lu().determinant()
    }
}

/// Largest singular value (0 for empty matrices).
pub fn opnorm(m: &Mat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Relative rank threshold used everywhere a rank decision is made.
pub fn rank_threshold(sigma_max: f64) -> f64 {
    if sigma_max == 0.0 {
        1e-12
    } else {
        1e-8 * sigma_max
    }
}

/// Orthonormal bases of the row space (coimage) and of the kernel of `m`,
/// as column matrices in C^ncols.
pub fn coimage_kernel(m: &Mat) -> (Mat, Mat) {
    let (r, n) = (m.nrows(), m.ncols());
    if n == 0 {
        return (zeros(0, 0), zeros(0, 0));
    }
    if r == 0 {
        return (zeros(n, 0), eye(n));
    }
    // pad with zero rows so the thin SVD returns a full right factor
    let k = r.max(n);
    let mut padded = zeros(k, n);
    padded.view_mut((0, 0), (r, n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = rank_threshold(smax);
    let mut co = Vec::new();
    let mut ke = Vec::new();
    for i in 0..n {
        let row = vt.row(i).adjoint();
        if sv[i] > tol {
            co.push(row);
        } else {
            ke.push(row);
        }
    }
    (hcat_cols(n, &co), hcat_cols(n, &ke))
}

/// Orthonormal bases of the image of `m` and of its orthogonal complement.
pub fn image_coker(m: &Mat) -> (Mat, Mat) {
    coimage_kernel(&m.adjoint())
}

pub fn rank(m: &Mat) -> usize {
    coimage_kernel(m).0.ncols()
}

fn hcat_cols(n: usize, cols: &[nalgebra::DVector<Complex64>]) -> Mat {
    let mut out = zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Horizontal concatenation of matrices with equal row counts.
pub fn hcat(rows: usize, parts: &[&Mat]) -> Mat {
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        assert_eq!(p.nrows(), rows);
        out.view_mut((0, at), (rows, p.ncols())).copy_from(*p);
        at += p.ncols();
    }
    out
}

/// Block-diagonal matrix.
pub fn block_diag(a: &Mat, b: &Mat) -> Mat {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

/// Frobenius norm (0 for empty).
pub fn fro(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues from the diagonal of a complex Schur form.
pub fn eigenvalues(m: &Mat) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let t = nalgebra::linalg::Schur::new(m.clone()).unpack().1;
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Complex Schur decomposition M = Q T Q^H reordered so that the eigenvalues
/// selected by `first` lead the diagonal. Returns (Q, T, number selected).
pub fn ordered_schur(m: &Mat, first: impl Fn(Complex64) -> bool) -> (Mat, Mat, usize) {
    let n = m.nrows();
    if n == 0 {
        return (zeros(0, 0), zeros(0, 0), 0);
    }
    let (mut q, mut t) = nalgebra::linalg::Schur::new(m.clone()).unpack();
    // clear roundoff below the diagonal
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = ZERO;
        }
    }
    let mut placed = 0;
    for k in 0..n {
        if first(t[(k, k)]) {
            let mut i = k;
            while i > placed {
                swap_adjacent(&mut q, &mut t, i - 1);
                i -= 1;
            }
            placed += 1;
        }
    }
    (q, t, placed)
}

/// Exchange diagonal entries k and k+1 of an upper-triangular T by a unitary
/// similarity, updating Q.
fn swap_adjacent(q: &mut Mat, t: &mut Mat, k: usize) {
    let n = t.nrows();
    let a = t[(k, k)];
    let b = t[(k, k + 1)];
    let c = t[(k + 1, k + 1)];
    // eigenvector of [[a,b],[0,c]] for the eigenvalue c
    let x0 = b;
    let x1 = c - a;
    let nrm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
    if nrm == 0.0 {
        return;
    }
    let (u0, u1) = (x0 / nrm, x1 / nrm);
    // Z = [[u0, -conj(u1)], [u1, conj(u0)]]
    let z00 = u0;
    let z01 = -u1.conj();
    let z10 = u1;
    let z11 = u0.conj();
    // T <- Z^H T on rows k, k+1
    for j in 0..n {
        let r0 = t[(k, j)];
        let r1 = t[(k + 1, j)];
        t[(k, j)] = z00.conj() * r0 + z10.conj() * r1;
        t[(k + 1, j)] = z01.conj() * r0 + z11.conj() * r1;
    }
    // T <- T Z and Q <- Q Z on columns k, k+1
    for i in 0..n {
        let c0 = t[(i, k)];
        let c1 = t[(i, k + 1)];
        t[(i, k)] = c0 * z00 + c1 * z10;
        t[(i, k + 1)] = c0 * z01 + c1 * z11;
        let c0 = q[(i, k)];
        let c1 = q[(i, k + 1)];
        q[(i, k)] = c0 * z00 + c1 * z10;
        q[(i, k + 1)] = c0 * z01 + c1 * z11;
    }
    t[(k + 1, k)] = ZERO;
    t[(k, k)] = c;
    t[(k + 1, k + 1)] = a;
}
