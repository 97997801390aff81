//! The finite-dimensional odd signature operator `B = Γ∂ + ∂Γ`, its graded
//! determinant, spectral splittings of a complex, and branch-cut
//! log-determinants and η-invariants of matrices.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::complexes::{self, CochainComplex, CohomologyElement, CohomologyFrame};
use crate::dense::{self, Mat};
use crate::error::{Error, Result};
use crate::gradedlinalg::Scalar;
use crate::torsion::{self, ChiralityOp};

/// `B = Γ∂ + ∂Γ` on the total space of a complex with chirality.
#[derive(Debug, Clone)]
pub struct SignatureOp {
    pub complex: CochainComplex,
    pub chirality: ChiralityOp,
    /// offsets of each degree in the total space
    pub offsets: Vec<usize>,
    /// B on `⊕_j C^j`
    pub b: Mat,
    /// B restricted to `C^even`
    pub beven: Mat,
}

impl SignatureOp {
    /// Indices of the even-degree coordinates inside the total space.
    fn even_indices(&self) -> Vec<usize> {
        let mut idx = Vec::new();
        for j in (0..=self.complex.d()).step_by(2) {
            idx.extend(self.offsets[j]..self.offsets[j + 1]);
        }
        idx
    }

    fn odd_indices(&self) -> Vec<usize> {
        let mut idx = Vec::new();
        for j in (1..=self.complex.d()).step_by(2) {
            idx.extend(self.offsets[j]..self.offsets[j + 1]);
        }
        idx
    }

    /// B restricted to `C^odd`.
    pub fn bodd(&self) -> Mat {
        let idx = self.odd_indices();
        self.b.select_rows(&idx).select_columns(&idx)
    }

    /// `B²` restricted to `C^j` (B² preserves each degree).
    pub fn b_squared_block(&self, j: usize) -> Mat {
        let (o, n) = (self.offsets[j], self.offsets[j + 1] - self.offsets[j]);
        let rows = self.b.rows(o, n).into_owned();
        rows * self.b.columns(o, n)
    }

    /// True when B is invertible at the library's rank threshold.
    pub fn is_bijective(&self) -> bool {
        dense::rank(&self.b) == self.b.nrows()
    }
}

/// Assembles B and checks that it commutes with Γ and with ∂.
pub fn build_signature(c: &CochainComplex, g: &ChiralityOp) -> Result<SignatureOp> {
    // c_gamma validates the pairing of shapes
    torsion::c_gamma(c, g)?;
    let offsets = c.offsets();
    let p = c.total_differential();
    let gm = g.total(&offsets);
    let b = &gm * &p + &p * &gm;
    let scale = (dense::opnorm(&gm) * dense::opnorm(&p)).max(f64::MIN_POSITIVE);
    let scale2 = scale * dense::opnorm(&gm).max(dense::opnorm(&p)).max(1.0);
    let comm_g = dense::opnorm(&(&b * &gm - &gm * &b));
    let comm_p = dense::opnorm(&(&b * &p - &p * &b));
    if comm_g > 1e-9 * scale2 || comm_p > 1e-9 * scale2 {
        return Err(Error::Numerical(format!(
            "B fails to commute with Γ or ∂ ({comm_g:e}, {comm_p:e})"
        )));
    }
    let mut s = SignatureOp {
        complex: c.clone(),
        chirality: g.clone(),
        offsets,
        b,
        beven: dense::zeros(0, 0),
    };
    let idx = s.even_indices();
    s.beven = s.b.select_rows(&idx).select_columns(&idx);
    Ok(s)
}

/// Orthonormal bases of `C^j_+ = ker(∂Γ) ∩ C^j` and `C^j_- = ker ∂ ∩ C^j`.
#[derive(Debug, Clone)]
pub struct PlusMinus {
    pub plus: Vec<Mat>,
    pub minus: Vec<Mat>,
}

/// Computes `C^j = C^j_+ ⊕ C^j_-`; B must be bijective.
pub fn plus_minus_split(s: &SignatureOp) -> Result<PlusMinus> {
    if !s.is_bijective() {
        return Err(Error::Singular("B is not bijective".into()));
    }
    let c = &s.complex;
    let d = c.d();
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for j in 0..=d {
        let n = c.dims().dim(j);
        let p = if j == 0 {
            dense::eye(n)
        } else {
            dense::coimage_kernel(&(c.partial(d - j) * s.chirality.block(j))).1
        };
        let m = if j == d {
            dense::eye(n)
        } else {
            dense::coimage_kernel(c.partial(j)).1
        };
        let both = dense::hcat(n, &[&p, &m]);
        if both.ncols() != n || dense::rank(&both) != n {
            return Err(Error::Numerical(format!("C^{j} is not the direct sum of C^{j}_±")));
        }
        plus.push(p);
        minus.push(m);
    }
    Ok(PlusMinus { plus, minus })
}

/// Matrices of `B^±_even` in the bases of [`plus_minus_split`].
fn b_even_pm(s: &SignatureOp) -> Result<(Mat, Mat)> {
    let pm = plus_minus_split(s)?;
    let n = s.b.nrows();
    let embed = |parts: &[Mat]| -> Mat {
        let cols: usize = (0..parts.len()).step_by(2).map(|j| parts[j].ncols()).sum();
        let mut q = dense::zeros(n, cols);
        let mut at = 0;
        for j in (0..parts.len()).step_by(2) {
            q.view_mut((s.offsets[j], at), parts[j].shape()).copy_from(&parts[j]);
            at += parts[j].ncols();
        }
        q
    };
    let (qp, qm) = (embed(&pm.plus), embed(&pm.minus));
    Ok((qp.adjoint() * &s.b * &qp, qm.adjoint() * &s.b * &qm))
}

/// `Det_gr(B_even) = det(B^+_even) / det(−B^-_even)`.
pub fn graded_det_finite(s: &SignatureOp) -> Result<Scalar> {
    let (bp, bm) = b_even_pm(s)?;
    Ok(dense::det(&bp) / dense::det(&(-bm)))
}

/// One part of a [`SpectralSplit`]: degreewise orthonormal bases and the
/// restricted complex and chirality in those bases.
#[derive(Debug, Clone)]
pub struct SpectralPart {
    pub bases: Vec<Mat>,
    pub complex: CochainComplex,
    pub chirality: ChiralityOp,
}

impl SpectralPart {
    pub fn dims(&self) -> &[usize] {
        self.complex.dims().dims()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.dims().total() == 0
    }
}

/// Splitting by the moduli of the eigenvalues of `B²` on each degree:
/// `small` spans generalized eigenvectors with modulus ≤ λ, `large` the rest.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub lambda: f64,
    pub small: SpectralPart,
    pub large: SpectralPart,
    pub d_small: Vec<usize>,
}

/// Spectral split of the complex at `lambda`.
///
/// Eigenvalue moduli closer to λ than `1e-8·max(λ, ρ(B²))` are rejected. When
/// λ itself is below that tolerance only (numerically) zero eigenvalues go to
/// the small part.
pub fn spectral_split(s: &SignatureOp, lambda: f64) -> Result<SpectralSplit> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda must be a finite nonnegative number, got {lambda}"
        )));
    }
    let c = &s.complex;
    let d = c.d();
    let blocks: Vec<Mat> = (0..=d).map(|j| s.b_squared_block(j)).collect();
    let eigs: Vec<Vec<Scalar>> = blocks.iter().map(dense::eigenvalues).collect();
    let radius = eigs.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = 1e-8 * lambda.max(radius).max(f64::MIN_POSITIVE);
    let zero_lambda = lambda <= tol;
    for z in eigs.iter().flatten() {
        let m = z.norm();
        if !zero_lambda && (m - lambda).abs() <= tol {
            return Err(Error::SplitBoundary { modulus: m, lambda });
        }
    }
    let is_small = move |z: Scalar| {
        if zero_lambda {
            z.norm() <= tol
        } else {
            z.norm() < lambda
        }
    };
    let (mut qs, mut ql) = (Vec::new(), Vec::new());
    for (j, m) in blocks.iter().enumerate() {
        let n = m.nrows();
        let (q1, _, k) = dense::ordered_schur(m, is_small);
        let (q2, _, k2) = dense::ordered_schur(m, |z| !is_small(z));
        if k + k2 != n {
            return Err(Error::Numerical(format!(
                "inconsistent eigenvalue classification at degree {j}"
            )));
        }
        qs.push(q1.columns(0, k).into_owned());
        ql.push(q2.columns(0, k2).into_owned());
    }
    let small = restrict_part(s, qs)?;
    let large = restrict_part(s, ql)?;
    let d_small = small.dims().to_vec();
    Ok(SpectralSplit {
        lambda,
        small,
        large,
        d_small,
    })
}

fn restrict_part(s: &SignatureOp, q: Vec<Mat>) -> Result<SpectralPart> {
    let c = &s.complex;
    let d = c.d();
    let dims = crate::GradedDims::new(d, q.iter().map(|m| m.ncols()).collect())?;
    let mut partial = Vec::with_capacity(d);
    for j in 0..d {
        let full = c.partial(j);
        let mut r = q[j + 1].adjoint() * full * &q[j];
        // a restriction that is zero up to roundoff must be exactly zero, or
        // the rank threshold (relative to its own norm) would count noise
        if dense::fro(&r) <= 1e-12 * dense::fro(full).max(1.0) {
            r.fill(dense::ZERO);
        }
        let leak = dense::fro(&(full * &q[j] - &q[j + 1] * &r));
        if leak > 1e-8 * dense::fro(full).max(1.0) {
            return Err(Error::Numerical(format!(
                "spectral subspace not ∂-invariant at degree {j} ({leak:e})"
            )));
        }
        partial.push(r);
    }
    for j in 0..=d {
        let g = s.chirality.block(j);
        let r = q[d - j].adjoint() * g * &q[j];
        let leak = dense::fro(&(g * &q[j] - &q[d - j] * &r));
        if leak > 1e-8 * dense::fro(g).max(1.0) {
            return Err(Error::Numerical(format!(
                "spectral subspace not Γ-invariant at degree {j} ({leak:e})"
            )));
        }
    }
    let complex = CochainComplex::new(dims.clone(), partial)?;
    let chirality = s.chirality.restrict(&q)?;
    Ok(SpectralPart {
        bases: q,
        complex,
        chirality,
    })
}

/// `Det_gr(B_{(λ,∞)}) · Ψ(ρ_{Γ_{[0,λ]}})`, expressed in `frame` (a frame of the
/// full complex).
pub fn torsion_via_split_in_frame(
    c: &CochainComplex,
    g: &ChiralityOp,
    lambda: f64,
    frame: &Arc<CohomologyFrame>,
) -> Result<CohomologyElement> {
    let s = build_signature(c, g)?;
    let split = spectral_split(&s, lambda)?;
    let det_large = if split.large.is_empty() {
        Scalar::new(1.0, 0.0)
    } else {
        graded_det_finite(&build_signature(&split.large.complex, &split.large.chirality)?)?
    };
    let rho_small = torsion::refined_torsion(&split.small.complex, &split.small.chirality)?;
    // harmonic representatives of the small part, as cocycles of C^j
    let reps: Vec<Mat> = split
        .small
        .bases
        .iter()
        .zip(&rho_small.frame.h)
        .map(|(q, h)| q * h)
        .collect();
    let mut out = complexes::reexpress_classes(rho_small.coeff, &reps, frame)?;
    out.coeff *= det_large;
    Ok(out)
}

/// [`torsion_via_split_in_frame`] in the complex's own orthogonal frame.
pub fn torsion_via_split(c: &CochainComplex, g: &ChiralityOp, lambda: f64) -> Result<CohomologyElement> {
    let f = Arc::new(complexes::cohomology_frame(c)?);
    torsion_via_split_in_frame(c, g, lambda, &f)
}

/// Betti numbers of the large part of a split.
pub fn large_part_betti(split: &SpectralSplit) -> Result<Vec<usize>> {
    complexes::betti(&split.large.complex)
}

fn spectral_radius(eigs: &[Scalar]) -> f64 {
    eigs.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn zero_tol(eigs: &[Scalar]) -> f64 {
    1e-10 * spectral_radius(eigs)
}

const ANGLE_TOL: f64 = 1e-9;

/// `log λ` with `arg λ ∈ (θ, θ+2π)`.
pub fn log_branch(z: Scalar, theta: f64) -> Result<Scalar> {
    let mut a = z.arg();
    while a <= theta {
        a += 2.0 * PI;
    }
    while a >= theta + 2.0 * PI {
        a -= 2.0 * PI;
    }
    if (a - theta).abs() < ANGLE_TOL || (theta + 2.0 * PI - a).abs() < ANGLE_TOL {
        return Err(Error::OnCut {
            re: z.re,
            im: z.im,
            theta,
        });
    }
    Ok(Scalar::new(z.norm().ln(), a))
}

fn ldet_from_eigs(eigs: &[Scalar], theta: f64, tol: f64) -> Result<Scalar> {
    let mut s = Scalar::new(0.0, 0.0);
    for &z in eigs {
        if z.norm() > tol {
            s += log_branch(z, theta)?;
        }
    }
    Ok(s)
}

/// `LDet_θ(M) = Σ log λ_k` over nonzero eigenvalues with `arg λ_k ∈ (θ, θ+2π)`.
pub fn log_det_cut(m: &Mat, theta: f64) -> Result<Scalar> {
    let eigs = dense::eigenvalues(m);
    ldet_from_eigs(&eigs, theta, zero_tol(&eigs))
}

/// Eigenvalue counts entering the η-invariant of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaData {
    /// `#{Re λ > 0} − #{Re λ < 0}`
    pub eta0: Scalar,
    /// eigenvalues on the positive imaginary half-axis
    pub m_plus: usize,
    /// eigenvalues on the negative imaginary half-axis
    pub m_minus: usize,
    /// zero eigenvalues
    pub m_zero: usize,
    /// `(eta0 + m_plus − m_minus + m_zero)/2`
    pub eta: Scalar,
}

fn eta_from_eigs(eigs: &[Scalar]) -> EtaData {
    let tol = zero_tol(eigs);
    let (mut pos, mut neg, mut mp, mut mm, mut m0) = (0i64, 0i64, 0usize, 0usize, 0usize);
    for z in eigs {
        if z.norm() <= tol {
            m0 += 1;
        } else if z.re > tol {
            pos += 1;
        } else if z.re < -tol {
            neg += 1;
        } else if z.im > 0.0 {
            mp += 1;
        } else {
            mm += 1;
        }
    }
    let eta0 = (pos - neg) as f64;
    let eta = (eta0 + mp as f64 - mm as f64 + m0 as f64) / 2.0;
    EtaData {
        eta0: Scalar::new(eta0, 0.0),
        m_plus: mp,
        m_minus: mm,
        m_zero: m0,
        eta: Scalar::new(eta, 0.0),
    }
}

/// The η-invariant of a matrix from its eigenvalues; real parts within
/// `1e-10·ρ(m)` of zero count as imaginary-axis eigenvalues.
pub fn eta_finite(m: &Mat) -> EtaData {
    eta_from_eigs(&dense::eigenvalues(m))
}

/// Largest `m ∈ (−π/2, 0]` such that no nonzero eigenvalue has argument in
/// `(−π/2, m)` or `(π/2, m+π)`; every θ in `(−π/2, m)` is admissible.
pub fn admissible_upper(eigs: &[Scalar]) -> f64 {
    let tol = zero_tol(eigs);
    let mut m = 0.0f64;
    for z in eigs {
        if z.norm() <= tol {
            continue;
        }
        let mut a = z.arg();
        if a > FRAC_PI_2 {
            a -= PI;
        }
        if a > -FRAC_PI_2 && a < 0.0 {
            m = m.min(a);
        }
    }
    m
}

/// Deterministic angle in the middle of the admissible arc `(−π/2, m)`.
pub fn agmon_angle(eigs: &[Scalar]) -> Result<f64> {
    let m = admissible_upper(eigs);
    if m + FRAC_PI_2 < 1e-6 {
        return Err(Error::BranchAmbiguity {
            theta: m,
            reason: "no admissible angle in (-pi/2, 0)".into(),
        });
    }
    Ok(0.5 * (m - FRAC_PI_2))
}

fn check_admissible(eigs: &[Scalar], theta: f64) -> Result<()> {
    if !(theta > -FRAC_PI_2 && theta < 0.0) {
        return Err(Error::BranchAmbiguity {
            theta,
            reason: "theta must lie in (-pi/2, 0)".into(),
        });
    }
    if theta >= admissible_upper(eigs) {
        return Err(Error::BranchAmbiguity {
            theta,
            reason: "an eigenvalue lies in L(-pi/2, theta] or L(pi/2, theta+pi]".into(),
        });
    }
    Ok(())
}

/// Residual of the finite-dimensional det–eta identity
/// `LDet_θ(D) − ½LDet_{2θ}(D²) + iπ(η(D) − (N + m₀)/2)`, N the number of
/// nonzero eigenvalues of D². With `theta = None` an angle is chosen by
/// [`agmon_angle`].
pub fn det_eta_check(m: &Mat, theta: Option<f64>) -> Result<f64> {
    let eigs = dense::eigenvalues(m);
    let theta = match theta {
        Some(t) => {
            check_admissible(&eigs, t)?;
            t
        }
        None => agmon_angle(&eigs)?,
    };
    let tol = zero_tol(&eigs);
    let ld = ldet_from_eigs(&eigs, theta, tol)?;
    let sq: Vec<Scalar> = eigs.iter().map(|z| z * z).collect();
    let ld2 = ldet_from_eigs(&sq, 2.0 * theta, tol * tol.max(spectral_radius(&eigs)))?;
    let eta = eta_from_eigs(&eigs);
    let nnz = eigs.len() - eta.m_zero;
    let corr = eta.eta - Scalar::new((nnz + eta.m_zero) as f64 / 2.0, 0.0);
    Ok((ld - 0.5 * ld2 + Scalar::new(0.0, PI) * corr).norm())
}

/// `Det_gr(B_{(λ,∞),even})` assembled as `exp(ξ − iπη + iπ(N⁺ − N⁻)/2)` with
/// `ξ = ½[LDet_{2θ}((B⁺)²) − LDet_{2θ}((B⁻)²)]`, `η = η(B_even)` and `N^±` the
/// dimensions of `C^even_±` on the large part.
pub fn graded_det_via_xi_eta(s: &SignatureOp, lambda: f64, theta: Option<f64>) -> Result<Scalar> {
    let split = spectral_split(s, lambda)?;
    if split.large.is_empty() {
        return Ok(Scalar::new(1.0, 0.0));
    }
    let sl = build_signature(&split.large.complex, &split.large.chirality)?;
    let (bp, bm) = b_even_pm(&sl)?;
    let ep = dense::eigenvalues(&bp);
    let em = dense::eigenvalues(&bm);
    let neg_em: Vec<Scalar> = em.iter().map(|z| -z).collect();
    let all: Vec<Scalar> = ep.iter().chain(&neg_em).cloned().collect();
    let theta = match theta {
        Some(t) => {
            check_admissible(&all, t)?;
            t
        }
        None => agmon_angle(&all)?,
    };
    let sq = |v: &[Scalar]| -> Vec<Scalar> { v.iter().map(|z| z * z).collect() };
    // B is invertible on the large part, so nothing is dropped as zero
    let xi = 0.5 * (ldet_from_eigs(&sq(&ep), 2.0 * theta, 0.0)? - ldet_from_eigs(&sq(&em), 2.0 * theta, 0.0)?);
    let both: Vec<Scalar> = ep.iter().chain(&em).cloned().collect();
    let eta = eta_from_eigs(&both).eta;
    let half = (ep.len() as f64 - em.len() as f64) / 2.0;
    let ipi = Scalar::new(0.0, PI);
    Ok((xi - ipi * eta + ipi * half).exp())
}
