//! Determinant lines of graded vector spaces.
//!
//! Every line element is stored as one scalar relative to the wedge of the
//! standard ordered basis in each degree, assembled as
//! `e(V^0) ⊗ e(V^1)^{-1} ⊗ e(V^2) ⊗ …`. Signs are tracked as parities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = Complex64;

/// Parity of an integer, 0 or 1.
pub type Parity = u8;

pub(crate) fn sign_of(p: Parity) -> f64 {
    if p.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Dimensions `dim V^0, …, dim V^d` of a graded space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedDims {
    d: usize,
    dims: Vec<usize>,
}

impl GradedDims {
    pub fn new(d: usize, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != d + 1 {
            return Err(Error::DimsLength {
                expected: d + 1,
                got: dims.len(),
            });
        }
        Ok(GradedDims { d, dims })
    }

    /// The zero graded space of length `d`.
    pub fn zero(d: usize) -> Self {
        GradedDims {
            d,
            dims: vec![0; d + 1],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j]
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `r = (d+1)/2`; fails for even `d`.
    pub fn r(&self) -> Result<usize> {
        self.require_odd()?;
        Ok(self.d.div_ceil(2))
    }

    pub fn require_odd(&self) -> Result<()> {
        if self.d.is_multiple_of(2) {
            Err(Error::EvenLength(self.d))
        } else {
            Ok(())
        }
    }

    /// Degreewise sum.
    pub fn add(&self, other: &GradedDims) -> Result<GradedDims> {
        if self.d != other.d {
            return Err(Error::DegreeMismatch(self.d, other.d));
        }
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        Ok(GradedDims { d: self.d, dims })
    }

    /// Reversed grading, `dim V̂^j = dim V^{d-j}`.
    pub fn reversed(&self) -> GradedDims {
        let mut dims = self.dims.clone();
        dims.reverse();
        GradedDims { d: self.d, dims }
    }
}

/// An element of `Det(V•)` (or, when `dualized`, of the line of the τ-dual
/// graded space in reversed grading).
#[derive(Debug, Clone, PartialEq)]
pub struct DetElement {
    pub coeff: Scalar,
    pub dims: GradedDims,
    pub dualized: bool,
}

impl DetElement {
    pub fn new(coeff: Scalar, dims: GradedDims) -> Self {
        DetElement {
            coeff,
            dims,
            dualized: false,
        }
    }

    /// The standard wedge element (coefficient 1).
    pub fn unit(dims: GradedDims) -> Self {
        Self::new(Scalar::new(1.0, 0.0), dims)
    }

    /// A dualized element read as an element of `Det` of the dual graded
    /// space, whose standard bases are the dual bases.
    pub fn undualized(&self) -> DetElement {
        DetElement {
            dualized: false,
            ..self.clone()
        }
    }

    /// Whether two elements live in the same line.
    pub fn comparable(&self, other: &DetElement) -> bool {
        self.dims == other.dims && self.dualized == other.dualized
    }
}

/// `M(V•, W•) = Σ_{0≤k<j≤d} dim V^j · dim W^k  (mod 2)`.
pub fn sign_m(v: &GradedDims, w: &GradedDims) -> Result<Parity> {
    if v.d != w.d {
        return Err(Error::DegreeMismatch(v.d, w.d));
    }
    // running parity of Σ_{k<j} dim W^k
    let mut below = 0usize;
    let mut acc = 0usize;
    for j in 0..=v.d {
        acc += (v.dims[j] % 2) * (below % 2);
        below += w.dims[j];
    }
    Ok((acc % 2) as Parity)
}

/// `M(V•) = M(V•, V•)`.
pub fn sign_m_self(v: &GradedDims) -> Parity {
    sign_m(v, v).expect("same length")
}

/// Fusion `Det(V•) ⊗ Det(W•) → Det(V• ⊕ W•)`, bases of `(V⊕W)^q` being the
/// concatenation of the V-basis and the W-basis.
pub fn fuse(x: &DetElement, y: &DetElement) -> Result<DetElement> {
    if x.dualized || y.dualized {
        return Err(Error::Dualized);
    }
    let m = sign_m(&x.dims, &y.dims)?;
    Ok(DetElement::new(x.coeff * y.coeff * sign_of(m), x.dims.add(&y.dims)?))
}

/// Element of the determinant line of a single (ungraded) space, or of its
/// dual, or of the inverse of either.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineElement {
    pub coeff: Scalar,
    pub n: usize,
    /// lives in `Det(V*)` rather than `Det(V)`
    pub dual: bool,
    /// lives in the inverse line
    pub inverse: bool,
}

impl LineElement {
    pub fn det(coeff: Scalar, n: usize) -> Self {
        LineElement {
            coeff,
            n,
            dual: false,
            inverse: false,
        }
    }

    pub fn det_dual(coeff: Scalar, n: usize) -> Self {
        LineElement {
            coeff,
            n,
            dual: true,
            inverse: false,
        }
    }

    /// `v ↦ v^{-1}` in the inverse line, relative to the inverse basis wedge.
    pub fn inv(&self) -> Self {
        LineElement {
            coeff: 1.0 / self.coeff,
            inverse: !self.inverse,
            ..*self
        }
    }
}

/// `μ_{V,W}` on lines of the same kind: the wedge of the concatenated basis.
/// On inverse lines this is the `μ^{-1}` convention, again a plain product of
/// coefficients.
pub fn mu_line(v: &LineElement, w: &LineElement) -> Result<LineElement> {
    if v.dual != w.dual || v.inverse != w.inverse {
        return Err(Error::LineKind("mu needs two lines of the same kind".into()));
    }
    Ok(LineElement {
        coeff: v.coeff * w.coeff,
        n: v.n + w.n,
        ..*v
    })
}

/// `α_V : Det(V*) → Det(V)^{-1}`, τ-linear, `e^1∧…∧e^n ↦ (e_1∧…∧e_n)^{-1}`.
pub fn alpha_line(x: &LineElement) -> Result<LineElement> {
    if !x.dual || x.inverse {
        return Err(Error::LineKind("alpha expects an element of Det(V*)".into()));
    }
    Ok(LineElement {
        coeff: x.coeff.conj(),
        n: x.n,
        dual: false,
        inverse: true,
    })
}

/// Inverse of [`alpha_line`].
pub fn alpha_line_inv(x: &LineElement) -> Result<LineElement> {
    if x.dual || !x.inverse {
        return Err(Error::LineKind("alpha^{-1} expects an element of Det(V)^{-1}".into()));
    }
    Ok(LineElement {
        coeff: x.coeff.conj(),
        n: x.n,
        dual: true,
        inverse: false,
    })
}

/// `β_V : Det(V) → Det(V*)^{-1}`, carrying the sign `(-1)^n`.
pub fn beta_line(x: &LineElement) -> Result<LineElement> {
    if x.dual || x.inverse {
        return Err(Error::LineKind("beta expects an element of Det(V)".into()));
    }
    let s = sign_of((x.n % 2) as Parity);
    Ok(LineElement {
        coeff: x.coeff.conj() * s,
        n: x.n,
        dual: true,
        inverse: true,
    })
}

/// Graded τ-linear isomorphism `Det(V•) → Det(V̂•)`, `V̂^j = (V^{d-j})*`,
/// with the result expressed in the dual bases of the reversed grading.
///
/// Degrees of even index go through β (and pick up `(-1)^{dim}`), odd ones
/// through α; the overall factor is `(-1)^{M(V•)}`.
pub fn dual_graded(x: &DetElement) -> Result<DetElement> {
    x.dims.require_odd()?;
    let mut p = sign_m_self(&x.dims) as usize;
    for m in (0..=x.dims.d).step_by(2) {
        p += x.dims.dims[m];
    }
    Ok(DetElement {
        coeff: x.coeff.conj() * sign_of((p % 2) as Parity),
        dims: x.dims.reversed(),
        dualized: !x.dualized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gd(d: usize, v: &[usize]) -> GradedDims {
        GradedDims::new(d, v.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn sign_m_examples() {
        assert_eq!(sign_m(&gd(1, &[1, 1]), &gd(1, &[1, 1])).unwrap(), 1);
        assert_eq!(sign_m(&gd(3, &[3, 1, 4, 1]), &GradedDims::zero(3)).unwrap(), 0);
        // direct double sum
        let (v, w) = ([2usize, 1, 1, 2], [1usize, 0, 3, 1]);
        let mut s = 0;
        for j in 0..4 {
            for k in 0..j {
                s += v[j] * w[k];
            }
        }
        assert_eq!(sign_m(&gd(3, &v), &gd(3, &w)).unwrap() as usize, s % 2);
        assert!(sign_m(&gd(1, &[1, 1]), &gd(3, &[1, 1, 1, 1])).is_err());
    }

    #[test]
    fn fuse_examples() {
        let x = DetElement::unit(gd(1, &[1, 1]));
        assert_eq!(fuse(&x, &x).unwrap().coeff, c(-1.0, 0.0));
        let y = DetElement::new(c(2.0, -1.0), gd(1, &[2, 3]));
        let e = DetElement::unit(GradedDims::zero(1));
        assert_eq!(fuse(&y, &e).unwrap(), y);
        let mut z = y.clone();
        z.dualized = true;
        assert_eq!(fuse(&z, &y), Err(Error::Dualized));
    }

    #[test]
    fn line_maps() {
        assert_eq!(
            alpha_line(&LineElement::det_dual(c(0.0, 1.0), 1)).unwrap().coeff,
            c(0.0, -1.0)
        );
        assert_eq!(
            alpha_line(&LineElement::det_dual(c(2.0, 3.0), 4)).unwrap().coeff,
            c(2.0, -3.0)
        );
        assert_eq!(
            beta_line(&LineElement::det(c(1.0, 0.0), 1)).unwrap().coeff,
            c(-1.0, 0.0)
        );
        assert_eq!(beta_line(&LineElement::det(c(1.0, 0.0), 2)).unwrap().coeff, c(1.0, 0.0));
        assert!(alpha_line(&LineElement::det(c(1.0, 0.0), 2)).is_err());
    }

    #[test]
    fn dual_graded_examples() {
        let x = DetElement::unit(gd(1, &[1, 1]));
        assert_eq!(dual_graded(&x).unwrap().coeff, c(1.0, 0.0));
        let z = DetElement::unit(GradedDims::zero(3));
        assert_eq!(dual_graded(&z).unwrap().coeff, c(1.0, 0.0));
        assert!(dual_graded(&DetElement::unit(gd(2, &[1, 0, 1]))).is_err());
    }
}
