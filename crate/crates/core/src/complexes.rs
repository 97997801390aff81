//! Finite-dimensional cochain complexes, orthogonal cohomology frames and the
//! sign-refined isomorphism `φ : Det(C•) → Det(H•(∂))`.

use std::sync::Arc;

use crate::dense::{self, Mat};
use crate::error::{Error, Result};
use crate::gradedlinalg::{self, sign_of, DetElement, GradedDims, Parity, Scalar};

/// A cochain complex `0 → C^0 → C^1 → … → C^d → 0` of complex vector spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct CochainComplex {
    dims: GradedDims,
    partial: Vec<Mat>,
}

impl CochainComplex {
    /// Builds a complex, checking only that matrix shapes match `dims`.
    /// Use [`validate`] for the `∂² = 0` check.
    pub fn new(dims: GradedDims, partial: Vec<Mat>) -> Result<Self> {
        let d = dims.d();
        if partial.len() != d {
            return Err(Error::Shape(format!(
                "expected {} differentials, got {}",
                d,
                partial.len()
            )));
        }
        for (j, p) in partial.iter().enumerate() {
            if p.shape() != (dims.dim(j + 1), dims.dim(j)) {
                return Err(Error::Shape(format!(
                    "differential {} has shape {:?}, expected {:?}",
                    j,
                    p.shape(),
                    (dims.dim(j + 1), dims.dim(j))
                )));
            }
        }
        Ok(CochainComplex { dims, partial })
    }

    /// The complex with zero differential.
    pub fn zero(dims: GradedDims) -> Self {
        let partial = (0..dims.d())
            .map(|j| dense::zeros(dims.dim(j + 1), dims.dim(j)))
            .collect();
        CochainComplex { dims, partial }
    }

    pub fn dims(&self) -> &GradedDims {
        &self.dims
    }

    pub fn d(&self) -> usize {
        self.dims.d()
    }

    /// `∂_j : C^j → C^{j+1}`.
    pub fn partial(&self, j: usize) -> &Mat {
        &self.partial[j]
    }

    pub fn partials(&self) -> &[Mat] {
        &self.partial
    }

    /// Offsets of each degree inside the total space.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.d() + 2);
        let mut at = 0;
        for &n in self.dims.dims() {
            off.push(at);
            at += n;
        }
        off.push(at);
        off
    }

    /// The differential as one matrix on `⊕_j C^j`.
    pub fn total_differential(&self) -> Mat {
        let off = self.offsets();
        let n = self.dims.total();
        let mut m = dense::zeros(n, n);
        for (j, p) in self.partial.iter().enumerate() {
            m.view_mut((off[j + 1], off[j]), p.shape()).copy_from(p);
        }
        m
    }
}

/// Checks `∂_{j+1}∂_j = 0` to `1e-10·‖∂_{j+1}‖‖∂_j‖` and returns the largest
/// residual.
pub fn validate(c: &CochainComplex) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in 0..c.d().saturating_sub(1) {
        let (p, q) = (&c.partial[j], &c.partial[j + 1]);
        let res = dense::opnorm(&(q * p));
        let scale = dense::opnorm(q) * dense::opnorm(p);
        if res > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotComplex {
                degree: j,
                residual: res,
            });
        }
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Orthogonal realization of `C^j = B^j ⊕ H^j ⊕ A^j`.
///
/// `b[j]`, `h[j]`, `a[j]` hold orthonormal column bases of
/// `im ∂_{j-1}`, `ker ∂_j ∩ (im ∂_{j-1})^⊥` and `(ker ∂_j)^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohomologyFrame {
    pub b: Vec<Mat>,
    pub h: Vec<Mat>,
    pub a: Vec<Mat>,
    pub betti: Vec<usize>,
}

impl CohomologyFrame {
    pub fn d(&self) -> usize {
        self.h.len() - 1
    }

    pub fn betti_dims(&self) -> GradedDims {
        GradedDims::new(self.d(), self.betti.clone()).expect("frame length")
    }

    /// Largest deviation from orthonormality of `[B^j | H^j | A^j]`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..=self.d() {
            let n = self.b[j].nrows();
            let m = dense::hcat(n, &[&self.b[j], &self.h[j], &self.a[j]]);
            worst = worst.max(dense::fro(&(m.adjoint() * &m - dense::eye(m.ncols()))));
        }
        worst
    }

    /// Block-diagonal frame of a direct sum (first summand's vectors first).
    pub fn direct_sum(&self, other: &CohomologyFrame) -> Result<CohomologyFrame> {
        if self.d() != other.d() {
            return Err(Error::DegreeMismatch(self.d(), other.d()));
        }
        let bd = |x: &[Mat], y: &[Mat]| -> Vec<Mat> { x.iter().zip(y).map(|(p, q)| dense::block_diag(p, q)).collect() };
        Ok(CohomologyFrame {
            b: bd(&self.b, &other.b),
            h: bd(&self.h, &other.h),
            a: bd(&self.a, &other.a),
            betti: self.betti.iter().zip(&other.betti).map(|(x, y)| x + y).collect(),
        })
    }

    /// The frame of the dual complex obtained by pairing coordinate vectors:
    /// `B̂^j = A^{d-j}`, `Ĥ^j = H^{d-j}`, `Â^j = B^{d-j}`.
    pub fn dual(&self) -> CohomologyFrame {
        let rev = |x: &[Mat]| -> Vec<Mat> { x.iter().rev().cloned().collect() };
        let mut betti = self.betti.clone();
        betti.reverse();
        CohomologyFrame {
            b: rev(&self.a),
            h: rev(&self.h),
            a: rev(&self.b),
            betti,
        }
    }
}

/// Computes the orthogonal cohomology frame of a valid complex.
pub fn cohomology_frame(c: &CochainComplex) -> Result<CohomologyFrame> {
    validate(c)?;
    let d = c.d();
    let (mut b, mut h, mut a, mut betti) = (vec![], vec![], vec![], vec![]);
    for j in 0..=d {
        let n = c.dims.dim(j);
        let bj = if j == 0 {
            dense::zeros(n, 0)
        } else {
            dense::image_coker(&c.partial[j - 1]).0
        };
        let (aj, kj) = if j == d {
            (dense::zeros(n, 0), dense::eye(n))
        } else {
            dense::coimage_kernel(&c.partial[j])
        };
        // orthogonal complement of B^j inside ker ∂_j
        let inner = kj.adjoint() * &bj;
        let hj = if kj.ncols() == 0 {
            dense::zeros(n, 0)
        } else {
            let (_, comp) = dense::image_coker(&inner);
            &kj * comp
        };
        if bj.ncols() + hj.ncols() + aj.ncols() != n {
            return Err(Error::Singular(format!("inconsistent ranks at degree {j}")));
        }
        betti.push(hj.ncols());
        b.push(bj);
        h.push(hj);
        a.push(aj);
    }
    Ok(CohomologyFrame { b, h, a, betti })
}

/// Betti numbers at the library's rank threshold.
pub fn betti(c: &CochainComplex) -> Result<Vec<usize>> {
    Ok(cohomology_frame(c)?.betti)
}

pub fn is_acyclic(c: &CochainComplex) -> Result<bool> {
    Ok(betti(c)?.iter().all(|&b| b == 0))
}

fn n_from_a(a: &[usize]) -> Parity {
    let mut twice = 0i64;
    for (j, &x) in a.iter().enumerate() {
        let x = x as i64;
        twice += x * (x + if j % 2 == 0 { -1 } else { 1 });
    }
    ((twice / 2).rem_euclid(2)) as Parity
}

/// `N(C•) = ½ Σ dim A^j·(dim A^j + (-1)^{j+1})  (mod 2)`.
pub fn sign_n(f: &CohomologyFrame) -> Parity {
    let a: Vec<usize> = f.a.iter().map(|m| m.ncols()).collect();
    n_from_a(&a)
}

/// `N(C•)` recomputed from Euler-characteristic partial sums
/// `dim A^j = Σ_{k≤j} (-1)^{j-k}(dim C^k - dim H^k)` instead of from the frame.
pub fn sign_n_euler(c: &CochainComplex, betti: &[usize]) -> Parity {
    let mut a = Vec::with_capacity(betti.len());
    let mut prev = 0i64;
    for (j, &h) in betti.iter().enumerate() {
        let cur = c.dims.dim(j) as i64 - h as i64 - prev;
        a.push(cur.max(0) as usize);
        prev = cur;
    }
    n_from_a(&a)
}

/// An element of `Det(H•(∂))`, stored relative to the wedges of the H-bases
/// of `frame`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohomologyElement {
    pub coeff: Scalar,
    pub frame: Arc<CohomologyFrame>,
}

impl CohomologyElement {
    /// The same element expressed relative to `target`'s H-bases. Both frames
    /// must be orthogonal frames of the same complex.
    pub fn reexpress(&self, target: &Arc<CohomologyFrame>) -> Result<CohomologyElement> {
        reexpress_classes(self.coeff, &self.frame.h, target)
    }

    /// `|self − other| / |other|` after moving `self` into `other`'s frame.
    pub fn rel_diff(&self, other: &CohomologyElement) -> Result<f64> {
        let moved = self.reexpress(&other.frame)?;
        Ok(rel(moved.coeff, other.coeff))
    }

    pub fn betti(&self) -> &[usize] {
        &self.frame.betti
    }
}

pub(crate) fn rel(a: Scalar, b: Scalar) -> f64 {
    let scale = b.norm().max(a.norm()).max(f64::MIN_POSITIVE);
    (a - b).norm() / scale
}

/// Element with coefficient `coeff` relative to the wedges of the classes of
/// the cocycles in `reps[j]`, rewritten relative to `target`'s H-bases.
///
/// Each cocycle is sent to its class by orthogonal projection onto `H^j`,
/// which discards the exact part since `B^j ⊥ H^j`.
pub fn reexpress_classes(coeff: Scalar, reps: &[Mat], target: &Arc<CohomologyFrame>) -> Result<CohomologyElement> {
    if reps.len() != target.h.len() {
        return Err(Error::FrameMismatch("different lengths".into()));
    }
    let mut out = coeff;
    for (j, (r, h)) in reps.iter().zip(&target.h).enumerate() {
        if r.shape() != h.shape() {
            return Err(Error::FrameMismatch(format!(
                "degree {j}: {:?} vs {:?}",
                r.shape(),
                h.shape()
            )));
        }
        let u = h.adjoint() * r;
        let du = dense::det(&u);
        if du.norm() == 0.0 || !du.is_finite() {
            return Err(Error::Singular(format!(
                "representatives at degree {j} are not a basis of cohomology"
            )));
        }
        out *= if j % 2 == 0 { du } else { 1.0 / du };
    }
    Ok(CohomologyElement {
        coeff: out,
        frame: target.clone(),
    })
}

/// `φ_{C•}` using the complex's own orthogonal frame.
pub fn phi(c: &CochainComplex, x: &DetElement) -> Result<CohomologyElement> {
    let f = Arc::new(cohomology_frame(c)?);
    phi_in_frame(c, &f, x)
}

/// `φ_{C•}` relative to a given frame of `c`.
///
/// In degree j the standard wedge equals `det M_j` times the wedge of the
/// columns of `M_j = [∂A^{j-1} | H^j | A^j]`, so `h_j = 1/det M_j`.
pub fn phi_in_frame(c: &CochainComplex, f: &Arc<CohomologyFrame>, x: &DetElement) -> Result<CohomologyElement> {
    if x.dualized {
        return Err(Error::Dualized);
    }
    if &x.dims != c.dims() {
        return Err(Error::Shape("element does not live in Det of this complex".into()));
    }
    let mut coeff = x.coeff * sign_of(sign_n(f));
    for j in 0..=c.d() {
        let n = c.dims.dim(j);
        let da = if j == 0 {
            dense::zeros(n, 0)
        } else {
            &c.partial[j - 1] * &f.a[j - 1]
        };
        let m = dense::hcat(n, &[&da, &f.h[j], &f.a[j]]);
        if m.ncols() != n {
            return Err(Error::FrameMismatch(format!("degree {j} frame is not a basis")));
        }
        let dm = dense::det(&m);
        if dm.norm() < 1e-300 || !dm.is_finite() {
            return Err(Error::Singular(format!("change of basis at degree {j}")));
        }
        // h_j^{(-1)^j} with h_j = 1/det M_j
        coeff *= if j % 2 == 0 { 1.0 / dm } else { dm };
    }
    Ok(CohomologyElement {
        coeff,
        frame: f.clone(),
    })
}

/// Fusion of cohomology elements, relative to the block-diagonal frame.
pub fn fuse_cohomology(x: &CohomologyElement, y: &CohomologyElement) -> Result<CohomologyElement> {
    let m = gradedlinalg::sign_m(&x.frame.betti_dims(), &y.frame.betti_dims())?;
    Ok(CohomologyElement {
        coeff: x.coeff * y.coeff * sign_of(m),
        frame: Arc::new(x.frame.direct_sum(&y.frame)?),
    })
}

/// `α_{H•(∂)}`: the graded τ-dual map on cohomology, landing in the paired
/// frame [`CohomologyFrame::dual`] of the dual complex.
pub fn alpha_cohomology(x: &CohomologyElement) -> Result<CohomologyElement> {
    let y = gradedlinalg::dual_graded(&DetElement::new(x.coeff, x.frame.betti_dims()))?;
    Ok(CohomologyElement {
        coeff: y.coeff,
        frame: Arc::new(x.frame.dual()),
    })
}

/// The τ-dual complex: `Ĉ^j = (C^{d-j})*` with differential `∂_{d-j-1}^H`.
pub fn dual_complex(c: &CochainComplex) -> Result<CochainComplex> {
    c.dims.require_odd()?;
    let d = c.d();
    let partial = (0..d).map(|j| c.partial[d - j - 1].adjoint()).collect();
    CochainComplex::new(c.dims.reversed(), partial)
}

/// Direct sum with block-diagonal differentials.
pub fn direct_sum(c1: &CochainComplex, c2: &CochainComplex) -> Result<CochainComplex> {
    let dims = c1.dims.add(&c2.dims)?;
    let partial = c1
        .partial
        .iter()
        .zip(&c2.partial)
        .map(|(p, q)| dense::block_diag(p, q))
        .collect();
    CochainComplex::new(dims, partial)
}

/// Residual of the fusion diagram: `φ_{C⊕C̃}(μ(x⊗x̃))` against
/// `μ_H(φ_C x ⊗ φ_{C̃} x̃)`.
pub fn fusion_compat_residual(
    c1: &CochainComplex,
    c2: &CochainComplex,
    x1: &DetElement,
    x2: &DetElement,
) -> Result<f64> {
    let sum = direct_sum(c1, c2)?;
    let lhs = phi(&sum, &gradedlinalg::fuse(x1, x2)?)?;
    let rhs = fuse_cohomology(&phi(c1, x1)?, &phi(c2, x2)?)?;
    rhs.rel_diff(&lhs)
}

/// Residual of the duality diagram: `φ_{Ĉ}(α_C x)` against `α_H(φ_C x)`.
pub fn duality_residual(c: &CochainComplex, x: &DetElement) -> Result<f64> {
    let dual = dual_complex(c)?;
    let lhs = phi(&dual, &gradedlinalg::dual_graded(x)?.undualized())?;
    let rhs = alpha_cohomology(&phi(c, x)?)?;
    rhs.rel_diff(&lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn m(r: usize, c: usize, v: &[(f64, f64)]) -> Mat {
        Mat::from_row_iterator(r, c, v.iter().map(|&(a, b)| Complex64::new(a, b)))
    }

    fn one_step(z: Complex64) -> CochainComplex {
        CochainComplex::new(
            GradedDims::new(1, vec![1, 1]).unwrap(),
            vec![Mat::from_element(1, 1, z)],
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(
            validate(&CochainComplex::zero(GradedDims::new(3, vec![1, 2, 2, 1]).unwrap())).unwrap(),
            0.0
        );
        assert_eq!(validate(&one_step(Complex64::new(2.0, 0.0))).unwrap(), 0.0);
        let dims = GradedDims::new(3, vec![1, 1, 1, 1]).unwrap();
        let one = m(1, 1, &[(1.0, 0.0)]);
        let bad = CochainComplex::new(dims, vec![one.clone(), one.clone(), one]).unwrap();
        assert!(matches!(validate(&bad), Err(Error::NotComplex { degree: 0, .. })));
        assert!(CochainComplex::new(GradedDims::new(1, vec![1, 2]).unwrap(), vec![m(1, 1, &[(1.0, 0.0)])]).is_err());
    }

    #[test]
    fn frame_examples() {
        let f = cohomology_frame(&one_step(Complex64::new(2.0, 0.0))).unwrap();
        assert_eq!(f.betti, vec![0, 0]);
        assert_eq!(f.a[0].ncols(), 1);
        let z = CochainComplex::zero(GradedDims::new(1, vec![1, 1]).unwrap());
        assert_eq!(betti(&z).unwrap(), vec![1, 1]);
        // d=3, dims (1,2,2,1), ranks (1,1,0)
        let dims = GradedDims::new(3, vec![1, 2, 2, 1]).unwrap();
        let p0 = m(2, 1, &[(1.0, 0.0), (0.0, 0.0)]);
        let p1 = m(2, 2, &[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (3.0, 1.0)]);
        let p2 = dense::zeros(1, 2);
        let c = CochainComplex::new(dims, vec![p0, p1, p2]).unwrap();
        let f = cohomology_frame(&c).unwrap();
        // rank-nullity: h_j = dim C^j - rank ∂_j - rank ∂_{j-1}
        assert_eq!(f.betti, vec![0, 0, 1, 1]);
        assert!(f.orthonormality_residual() < 1e-12);
    }

    #[test]
    fn sign_n_examples() {
        let f = cohomology_frame(&one_step(Complex64::new(2.0, 0.0))).unwrap();
        assert_eq!(sign_n(&f), 0);
        let dims = GradedDims::new(1, vec![2, 2]).unwrap();
        let c = CochainComplex::new(dims, vec![m(2, 2, &[(1.0, 0.0), (2.0, 0.0), (0.0, 1.0), (1.0, 0.0)])]).unwrap();
        let f = cohomology_frame(&c).unwrap();
        assert_eq!(sign_n(&f), 1);
        assert_eq!(sign_n_euler(&c, &f.betti), 1);
        let z = CochainComplex::zero(GradedDims::new(3, vec![2, 1, 3, 2]).unwrap());
        assert_eq!(sign_n(&cohomology_frame(&z).unwrap()), 0);
    }

    #[test]
    fn phi_examples() {
        let c = one_step(Complex64::new(3.0, 0.0));
        let x = DetElement::unit(c.dims().clone());
        let y = phi(&c, &x).unwrap();
        assert!((y.coeff - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        let z = CochainComplex::zero(GradedDims::new(1, vec![2, 1]).unwrap());
        let x = DetElement::new(Complex64::new(0.5, -2.0), z.dims().clone());
        let y = phi(&z, &x).unwrap();
        // frame is a unitary rotation of the standard one; move back
        let std = Arc::new(CohomologyFrame {
            b: vec![dense::zeros(2, 0), dense::zeros(1, 0)],
            h: vec![dense::eye(2), dense::eye(1)],
            a: vec![dense::zeros(2, 0), dense::zeros(1, 0)],
            betti: vec![2, 1],
        });
        let y = y.reexpress(&std).unwrap();
        assert!((y.coeff - x.coeff).norm() < 1e-14);
    }

    #[test]
    fn dual_and_sum_examples() {
        let c = one_step(Complex64::new(1.0, 2.0));
        let dc = dual_complex(&c).unwrap();
        assert_eq!(dc.partial(0)[(0, 0)], Complex64::new(1.0, -2.0));
        assert_eq!(dual_complex(&dc).unwrap(), c);
        let z = CochainComplex::zero(GradedDims::zero(1));
        assert_eq!(direct_sum(&c, &z).unwrap(), c);
        let s = direct_sum(&c, &CochainComplex::zero(GradedDims::new(1, vec![0, 2]).unwrap())).unwrap();
        assert_eq!(s.dims().dims(), &[1, 3]);
        assert_eq!(betti(&s).unwrap(), vec![0, 2]);
    }
}
