//! Chirality operators and the refined torsion `ρ_Γ = φ_{C•}(c_Γ)`.

use std::sync::Arc;

use crate::complexes::{self, CochainComplex, CohomologyElement, CohomologyFrame};
use crate::dense::{self, Mat};
use crate::error::{Error, Result};
use crate::gradedlinalg::{sign_of, DetElement, GradedDims, Parity, Scalar};

/// Involution `Γ` with `Γ(C^j) = C^{d-j}`, stored degreewise as
/// `Γ_j : C^j → C^{d-j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralityOp {
    gamma: Vec<Mat>,
}

impl ChiralityOp {
    /// Checks shapes against `dims` and `Γ_{d-j}Γ_j = 1` to
    /// `1e-10·max(1, ‖Γ_{d-j}‖‖Γ_j‖)`.
    pub fn new(dims: &GradedDims, gamma: Vec<Mat>) -> Result<Self> {
        dims.require_odd()?;
        let d = dims.d();
        if gamma.len() != d + 1 {
            return Err(Error::Shape(format!(
                "expected {} chirality blocks, got {}",
                d + 1,
                gamma.len()
            )));
        }
        for (j, g) in gamma.iter().enumerate() {
            if g.shape() != (dims.dim(d - j), dims.dim(j)) {
                return Err(Error::Shape(format!(
                    "chirality block {} has shape {:?}, expected {:?}",
                    j,
                    g.shape(),
                    (dims.dim(d - j), dims.dim(j))
                )));
            }
        }
        for j in 0..=d {
            let res = dense::opnorm(&(&gamma[d - j] * &gamma[j] - dense::eye(dims.dim(j))));
            let scale = (dense::opnorm(&gamma[d - j]) * dense::opnorm(&gamma[j])).max(1.0);
            if res > 1e-10 * scale {
                return Err(Error::NotInvolution {
                    degree: j,
                    residual: res,
                });
            }
        }
        Ok(ChiralityOp { gamma })
    }

    /// Pairs degree j with d−j by identity matrices.
    pub fn identity_pairing(dims: &GradedDims) -> Result<Self> {
        let d = dims.d();
        for j in 0..=d {
            if dims.dim(j) != dims.dim(d - j) {
                return Err(Error::Shape(format!("dim C^{} != dim C^{}", j, d - j)));
            }
        }
        Self::new(dims, (0..=d).map(|j| dense::eye(dims.dim(j))).collect())
    }

    pub fn d(&self) -> usize {
        self.gamma.len() - 1
    }

    /// `Γ_j : C^j → C^{d-j}`.
    pub fn block(&self, j: usize) -> &Mat {
        &self.gamma[j]
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.gamma
    }

    /// `Γ` as one matrix on the total space.
    pub fn total(&self, offsets: &[usize]) -> Mat {
        let d = self.d();
        let n = offsets[d + 1];
        let mut m = dense::zeros(n, n);
        for (j, g) in self.gamma.iter().enumerate() {
            m.view_mut((offsets[d - j], offsets[j]), g.shape()).copy_from(g);
        }
        m
    }

    /// `max_j ‖Γ_{d-j} − Γ_j^H‖`: zero exactly when Γ is self-adjoint.
    pub fn self_adjoint_residual(&self) -> f64 {
        let d = self.d();
        (0..=d)
            .map(|j| dense::fro(&(&self.gamma[d - j] - self.gamma[j].adjoint())))
            .fold(0.0, f64::max)
    }

    /// `max_j ‖Γ_{d-j}Γ_j − 1‖`.
    pub fn involution_residual(&self) -> f64 {
        let d = self.d();
        (0..=d)
            .map(|j| dense::fro(&(&self.gamma[d - j] * &self.gamma[j] - dense::eye(self.gamma[j].ncols()))))
            .fold(0.0, f64::max)
    }

    /// `Γ ⊕ Γ̃` on the direct sum.
    pub fn direct_sum(&self, other: &ChiralityOp) -> Result<ChiralityOp> {
        if self.d() != other.d() {
            return Err(Error::DegreeMismatch(self.d(), other.d()));
        }
        let gamma = self
            .gamma
            .iter()
            .zip(&other.gamma)
            .map(|(a, b)| dense::block_diag(a, b))
            .collect();
        Ok(ChiralityOp { gamma })
    }

    /// The τ-adjoint `Γ*` acting on the dual complex: `Γ*_j = Γ_j^H`.
    pub fn dual(&self) -> ChiralityOp {
        ChiralityOp {
            gamma: self.gamma.iter().map(|g| g.adjoint()).collect(),
        }
    }

    /// `Γ` re-expressed in degreewise bases `q[j]` of Γ-invariant subspaces:
    /// `Q_{d-j}^H Γ_j Q_j` (for orthonormal `q`).
    pub(crate) fn restrict(&self, q: &[Mat]) -> Result<ChiralityOp> {
        let d = self.d();
        let dims = GradedDims::new(d, q.iter().map(|m| m.ncols()).collect())?;
        ChiralityOp::new(
            &dims,
            (0..=d).map(|j| q[d - j].adjoint() * &self.gamma[j] * &q[j]).collect(),
        )
    }
}

/// `R(C•) = ½ Σ_{j<r} dim C^j·(dim C^j + (-1)^{r+j})  (mod 2)`.
pub fn sign_r(dims: &GradedDims) -> Result<Parity> {
    let r = dims.r()?;
    let mut twice = 0i64;
    for j in 0..r {
        let n = dims.dim(j) as i64;
        twice += n * (n + if (r + j) % 2 == 0 { 1 } else { -1 });
    }
    Ok(((twice / 2).rem_euclid(2)) as Parity)
}

/// The canonical element `c_Γ ∈ Det(C•)` relative to standard bases.
///
/// Taking `c_j` to be the standard wedge, `Γc_j = det(Γ_j)·e(C^{d-j})` sits in
/// the slot of degree `d−j`, with exponent `(-1)^{d-j}`.
pub fn c_gamma(c: &CochainComplex, g: &ChiralityOp) -> Result<DetElement> {
    check_pair(c, g)?;
    let d = c.d();
    let r = c.dims().r()?;
    let mut coeff = Scalar::new(sign_of(sign_r(c.dims())?), 0.0);
    for j in 0..r {
        let dg = dense::det(&g.gamma[j]);
        coeff *= if (d - j).is_multiple_of(2) { dg } else { 1.0 / dg };
    }
    Ok(DetElement::new(coeff, c.dims().clone()))
}

fn check_pair(c: &CochainComplex, g: &ChiralityOp) -> Result<()> {
    if c.d() != g.d() {
        return Err(Error::DegreeMismatch(c.d(), g.d()));
    }
    for j in 0..=c.d() {
        if g.gamma[j].shape() != (c.dims().dim(c.d() - j), c.dims().dim(j)) {
            return Err(Error::Shape(format!("chirality block {j} does not match the complex")));
        }
    }
    Ok(())
}

/// `ρ_Γ = φ_{C•}(c_Γ)` in the complex's orthogonal frame.
pub fn refined_torsion(c: &CochainComplex, g: &ChiralityOp) -> Result<CohomologyElement> {
    let f = Arc::new(complexes::cohomology_frame(c)?);
    refined_torsion_in_frame(c, g, &f)
}

pub fn refined_torsion_in_frame(
    c: &CochainComplex,
    g: &ChiralityOp,
    f: &Arc<CohomologyFrame>,
) -> Result<CohomologyElement> {
    complexes::phi_in_frame(c, f, &c_gamma(c, g)?)
}

/// Norm of `ρ_Γ` in the metric on `Det(H•)` for which `φ` is an isometry,
/// the metric on `Det(C•)` coming from the standard Hermitian products.
pub fn torsion_norm(c: &CochainComplex, g: &ChiralityOp) -> Result<f64> {
    let f = Arc::new(complexes::cohomology_frame(c)?);
    let rho = refined_torsion_in_frame(c, g, &f)?;
    // φ maps the unit-norm standard wedge to an element of unit norm
    let unit = complexes::phi_in_frame(c, &f, &DetElement::unit(c.dims().clone()))?;
    Ok(rho.coeff.norm() / unit.coeff.norm())
}

/// `Tr_s A = Σ_j (-1)^j tr A_j` for degreewise square blocks.
pub fn supertrace(dims: &GradedDims, blocks: &[Mat]) -> Result<Scalar> {
    if blocks.len() != dims.d() + 1 {
        return Err(Error::Shape(format!("expected {} blocks", dims.d() + 1)));
    }
    let mut s = Scalar::new(0.0, 0.0);
    for (j, a) in blocks.iter().enumerate() {
        if a.shape() != (dims.dim(j), dims.dim(j)) {
            return Err(Error::Shape(format!(
                "block {j} is {:?}, expected square of size {}",
                a.shape(),
                dims.dim(j)
            )));
        }
        let t = a.trace();
        s += if j % 2 == 0 { t } else { -t };
    }
    Ok(s)
}

/// `|D_h log ρ_{Γ_t}(t0) − ½ Tr_s(Γ̇Γ)(t0)|` with both derivatives taken by
/// central differences of step `h`. On `C^k` the operator `Γ̇Γ` is
/// `Γ̇_{d-k}Γ_k`.
pub fn variation_check<F>(c: &CochainComplex, family: F, t0: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<ChiralityOp>,
{
    let f = Arc::new(complexes::cohomology_frame(c)?);
    if f.betti.iter().any(|&b| b != 0) {
        return Err(Error::NotAcyclic(f.betti.clone()));
    }
    let (gp, g0, gm) = (family(t0 + h)?, family(t0)?, family(t0 - h)?);
    let rp = refined_torsion_in_frame(c, &gp, &f)?.coeff;
    let rm = refined_torsion_in_frame(c, &gm, &f)?.coeff;
    let dlog = (rp / rm).ln() / (2.0 * h);
    let d = c.d();
    let blocks: Vec<Mat> = (0..=d)
        .map(|k| {
            let gdot = (&gp.gamma[d - k] - &gm.gamma[d - k]) / Scalar::new(2.0 * h, 0.0);
            gdot * &g0.gamma[k]
        })
        .collect();
    let st = supertrace(c.dims(), &blocks)?;
    Ok((dlog - 0.5 * st).norm())
}

/// Relative difference between `ρ_{Γ*}` on the dual complex and `α_H(ρ_Γ)`.
pub fn dual_torsion_check(c: &CochainComplex, g: &ChiralityOp) -> Result<f64> {
    let dc = complexes::dual_complex(c)?;
    let lhs = refined_torsion(&dc, &g.dual())?;
    let rhs = complexes::alpha_cohomology(&refined_torsion(c, g)?)?;
    rhs.rel_diff(&lhs)
}

/// Relative difference between `ρ_{Γ⊕Γ̃}` and `μ_H(ρ_Γ ⊗ ρ_{Γ̃})`.
pub fn direct_sum_torsion_residual(
    c1: &CochainComplex,
    g1: &ChiralityOp,
    c2: &CochainComplex,
    g2: &ChiralityOp,
) -> Result<f64> {
    let lhs = refined_torsion(&complexes::direct_sum(c1, c2)?, &g1.direct_sum(g2)?)?;
    let rhs = complexes::fuse_cohomology(&refined_torsion(c1, g1)?, &refined_torsion(c2, g2)?)?;
    rhs.rel_diff(&lhs)
}
