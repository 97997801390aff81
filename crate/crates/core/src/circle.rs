//! Closed-form model of refined analytic torsion on the circle with a flat
//! line bundle of holonomy `exp(2πi a)`.
//!
//! The even part of the odd signature operator has spectrum
//! `{scale·(n + a) : n ∈ ℤ}`; the Laplacian on 1-forms has spectrum
//! `{scale²·((n+α)² + β²)}` for `a = α + iβ`. Everything is computed from
//! Hurwitz zeta values.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gradedlinalg::Scalar;
use crate::signature;

/// `B_{2k}` for k = 1..=13.
const BERNOULLI: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

/// `B_{2k}/(2k)!`.
fn bernoulli_ratio(k: usize) -> f64 {
    let mut f = 1.0;
    for i in 1..=2 * k {
        f *= i as f64;
    }
    BERNOULLI[k - 1] / f
}

fn c(re: f64) -> Scalar {
    Scalar::new(re, 0.0)
}

fn check_q(q: Scalar) -> Result<()> {
    if q.re <= 0.0 || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("Hurwitz zeta needs Re q > 0, got {q}")));
    }
    Ok(())
}

fn em_cutoff(s: Scalar) -> usize {
    20 + s.norm().ceil() as usize
}

/// Hurwitz zeta `ζ(s, q) = Σ_{n≥0} (n+q)^{-s}`, analytically continued, by
/// Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: Scalar, q: Scalar) -> Result<Scalar> {
    check_q(q)?;
    if (s - 1.0).norm() < 1e-14 {
        return Err(Error::InvalidParameter("Hurwitz zeta has a pole at s = 1".into()));
    }
    let n = em_cutoff(s);
    let mut sum = c(0.0);
    for k in 0..n {
        sum += (-s * (q + k as f64).ln()).exp();
    }
    let x = q + n as f64;
    let lx = x.ln();
    sum += ((1.0 - s) * lx).exp() / (s - 1.0);
    sum += 0.5 * (-s * lx).exp();
    // (s)_{2k-1} x^{-s-2k+1}
    let mut poch = s;
    let mut last = c(0.0);
    for k in 1..=BERNOULLI.len() {
        let term = bernoulli_ratio(k) * poch * ((-s - (2 * k - 1) as f64) * lx).exp();
        sum += term;
        last = term;
        poch *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
    }
    if last.norm() > 1e-14 * sum.norm().max(1.0) {
        return Err(Error::NoConvergence(format!("Euler-Maclaurin tail {last} at s = {s}")));
    }
    Ok(sum)
}

/// `∂_s ζ(s, q)` by term-wise differentiation of the Euler–Maclaurin formula.
pub fn hurwitz_zeta_deriv(s: Scalar, q: Scalar) -> Result<Scalar> {
    check_q(q)?;
    if (s - 1.0).norm() < 1e-14 {
        return Err(Error::InvalidParameter("Hurwitz zeta has a pole at s = 1".into()));
    }
    let n = em_cutoff(s);
    let mut sum = c(0.0);
    for k in 0..n {
        let l = (q + k as f64).ln();
        sum -= l * (-s * l).exp();
    }
    let x = q + n as f64;
    let lx = x.ln();
    let p = ((1.0 - s) * lx).exp();
    sum += -lx * p / (s - 1.0) - p / ((s - 1.0) * (s - 1.0));
    sum -= 0.5 * lx * (-s * lx).exp();
    // Pochhammer product and its derivative, built factor by factor
    let (mut poch, mut dpoch) = (s, c(1.0));
    let mut last = c(0.0);
    for k in 1..=BERNOULLI.len() {
        let xp = ((-s - (2 * k - 1) as f64) * lx).exp();
        let term = bernoulli_ratio(k) * (dpoch - poch * lx) * xp;
        sum += term;
        last = term;
        for f in [(2 * k - 1) as f64, (2 * k) as f64] {
            dpoch = dpoch * (s + f) + poch;
            poch *= s + f;
        }
    }
    if last.norm() > 1e-14 * sum.norm().max(1.0) {
        return Err(Error::NoConvergence(format!("Euler-Maclaurin tail {last} at s = {s}")));
    }
    Ok(sum)
}

/// `log Γ(z)` for `Re z > 0`, continued analytically from the positive axis.
pub fn log_gamma(z: Scalar) -> Result<Scalar> {
    check_q(z)?;
    let mut shift = c(0.0);
    let mut w = z;
    while w.re < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let mut s = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln();
    let w2 = w * w;
    let mut wp = w;
    for k in 1..=8 {
        s += BERNOULLI[k - 1] / ((2 * k) as f64 * (2 * k - 1) as f64) / wp;
        wp *= w2;
    }
    Ok(s - shift)
}

/// `ζ'(0, q) = log Γ(q) − ½ log 2π`.
pub fn hurwitz_zeta_deriv0(q: Scalar) -> Result<Scalar> {
    Ok(log_gamma(q)? - 0.5 * (2.0 * PI).ln())
}

/// Spectral data of the circle model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleModel {
    /// holonomy exponent, `0 < Re a < 1`
    pub a: Scalar,
    /// metric scale; eigenvalues become `scale·(n + a)`
    pub scale: f64,
    /// truncation depth for numeric cross-checks
    pub trunc: usize,
}

impl CircleModel {
    pub fn new(a: Scalar, scale: f64, trunc: usize) -> Result<Self> {
        if !(a.re > 0.0 && a.re < 1.0) || !a.im.is_finite() {
            return Err(Error::InvalidParameter(format!("need 0 < Re a < 1, got a = {a}")));
        }
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        if trunc < 100 {
            return Err(Error::InvalidParameter(format!(
                "trunc must be at least 100, got {trunc}"
            )));
        }
        Ok(CircleModel { a, scale, trunc })
    }

    /// Model with scale 1 and truncation 1000.
    pub fn with_a(a: Scalar) -> Result<Self> {
        Self::new(a, 1.0, 1000)
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        Self::new(self.a, scale, self.trunc)
    }

    /// The model of the dual connection, parameter `ā`.
    pub fn dual(&self) -> CircleModel {
        CircleModel {
            a: self.a.conj(),
            ..*self
        }
    }

    /// Eigenvalue `scale·(n + a)` of `B_even`.
    pub fn eigenvalue(&self, n: i64) -> Scalar {
        self.scale * (self.a + n as f64)
    }

    /// Eigenvalues for `|n| ≤ trunc`.
    pub fn eigenvalues(&self) -> Vec<Scalar> {
        let k = self.trunc as i64;
        (-k..=k).map(|n| self.eigenvalue(n)).collect()
    }
}

/// `ζ_H(0, a) + ζ_H(0, 1 − a)`, the value at zero of the zeta function of
/// `B_even²`; vanishes identically.
pub fn zeta0_squared(m: &CircleModel) -> Result<Scalar> {
    Ok(hurwitz_zeta(c(0.0), m.a)? + hurwitz_zeta(c(0.0), 1.0 - m.a)?)
}

/// `η(B_even) = ½(ζ_H(0, a) − ζ_H(0, 1 − a))`.
pub fn eta_circle(m: &CircleModel) -> Result<Scalar> {
    Ok(0.5 * (hurwitz_zeta(c(0.0), m.a)? - hurwitz_zeta(c(0.0), 1.0 - m.a)?))
}

/// Agmon angle for the sampled spectrum, or a check of the supplied one.
pub fn circle_theta(m: &CircleModel, theta: Option<f64>) -> Result<f64> {
    let eigs = m.eigenvalues();
    let upper = signature::admissible_upper(&eigs);
    match theta {
        None => signature::agmon_angle(&eigs),
        Some(t) if t > -std::f64::consts::FRAC_PI_2 && t < upper => Ok(t),
        Some(t) => Err(Error::BranchAmbiguity {
            theta: t,
            reason: format!("eigenvalues n + a reach the cut; admissible angles lie in (-pi/2, {upper})"),
        }),
    }
}

/// `ξ = ½ LDet_{2θ}(B_even²) = −[ζ'(0,a) + ζ'(0,1−a)] + log(scale)·ζ(0)`.
///
/// Any admissible θ gives `((n+a)²)^{-s} = (n+a)^{-2s}` for `n ≥ 0` and
/// `(−n−a)^{-2s}` for `n < 0`, so the zeta function of `B_even²` is
/// `scale^{-2s}(ζ_H(2s,a) + ζ_H(2s,1−a))`.
pub fn xi_circle(m: &CircleModel, theta: Option<f64>) -> Result<Scalar> {
    circle_theta(m, theta)?;
    let d = hurwitz_zeta_deriv0(m.a)? + hurwitz_zeta_deriv0(1.0 - m.a)?;
    Ok(-d + m.scale.ln() * zeta0_squared(m)?)
}

/// `ρ_an = exp(ξ − iπη)`.
pub fn rho_an_circle(m: &CircleModel) -> Result<Scalar> {
    let xi = xi_circle(m, None)?;
    let eta = eta_circle(m)?;
    Ok((xi - Scalar::new(0.0, PI) * eta).exp())
}

/// The combinatorial value `1 − e^{2πia}`.
pub fn rho_closed_form(a: Scalar) -> Scalar {
    1.0 - (Scalar::new(0.0, 2.0 * PI) * a).exp()
}

/// `ζ(0)` of the Laplacian on 1-forms, `ζ_H(0, α) + ζ_H(0, 1 − α)`.
pub fn laplacian_zeta0(m: &CircleModel) -> Result<Scalar> {
    let al = c(m.a.re);
    Ok(hurwitz_zeta(c(0.0), al)? + hurwitz_zeta(c(0.0), 1.0 - al)?)
}

/// `LDet Δ = 2 log|2 sin πa| + 2 log(scale)·ζ_Δ(0)`.
pub fn log_det_laplacian(m: &CircleModel) -> Result<f64> {
    let s = (PI * m.a).sin();
    Ok(2.0 * (2.0 * s.norm()).ln() + 2.0 * m.scale.ln() * laplacian_zeta0(m)?.re)
}

/// Ray–Singer torsion `T = exp(−½ LDet Δ₁)`.
pub fn rs_torsion_circle(m: &CircleModel) -> Result<f64> {
    Ok((-0.5 * log_det_laplacian(m)?).exp())
}

/// `(‖ρ_an‖_RS, e^{π Im η})`.
pub fn rs_norm_check(m: &CircleModel) -> Result<(f64, f64)> {
    let value = rho_an_circle(m)?.norm() * rs_torsion_circle(m)?;
    let target = (PI * eta_circle(m)?.im).exp();
    Ok((value, target))
}

/// `|conj ρ_an(a) − ρ_an(ā)·exp(2πi·conj η(a))|`.
pub fn duality_check(m: &CircleModel) -> Result<f64> {
    let lhs = rho_an_circle(m)?.conj();
    let eta = eta_circle(m)?;
    let rhs = rho_an_circle(&m.dual())? * (Scalar::new(0.0, 2.0 * PI) * eta.conj()).exp();
    Ok((lhs - rhs).norm())
}

/// `|ρ_an(scale = c) − ρ_an(scale = 1)|`.
pub fn metric_scale_check(m: &CircleModel, scale: f64) -> Result<f64> {
    let base = rho_an_circle(&m.with_scale(1.0)?)?;
    let scaled = rho_an_circle(&m.with_scale(scale)?)?;
    Ok((scaled - base).norm())
}

/// Pieces of the spectral split of the circle model at λ.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSplit {
    pub lambda: f64,
    /// indices n of the modes with `|scale(n+a)|² ≤ λ`
    pub small: Vec<i64>,
    pub xi_lambda: Scalar,
    pub eta_lambda: Scalar,
    /// `Det_gr` of the large part
    pub det_large: Scalar,
    /// product of the small eigenvalues
    pub det_small: Scalar,
}

/// Splits the spectrum at `λ = scale²(k + Re a)²` (boundary inclusive) and
/// assembles `Det_gr(large) = exp(ξ_λ − iπη_λ − iπK/2)`, K = number of small
/// modes; the product with the small eigenvalues should return ρ_an.
pub fn circle_split(m: &CircleModel, k: usize) -> Result<CircleSplit> {
    let theta = circle_theta(m, None)?;
    let edge = k as f64 + m.a.re;
    let lambda = m.scale * m.scale * edge * edge;
    let reach = k as i64 + 2;
    let small: Vec<i64> = (-reach..=reach)
        .filter(|&n| m.eigenvalue(n).norm_sqr() <= lambda * (1.0 + 1e-12))
        .collect();
    let mut xi = xi_circle(m, Some(theta))?;
    let mut eta = eta_circle(m)?;
    let mut det_small = c(1.0);
    for &n in &small {
        let z = m.eigenvalue(n);
        xi -= 0.5 * signature::log_branch(z * z, 2.0 * theta)?;
        eta -= 0.5 * z.re.signum();
        det_small *= z;
    }
    let kk = small.len() as f64;
    let ipi = Scalar::new(0.0, PI);
    let det_large = (xi - ipi * eta - ipi * kk / 2.0).exp();
    Ok(CircleSplit {
        lambda,
        small,
        xi_lambda: xi,
        eta_lambda: eta,
        det_large,
        det_small,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Scalar, b: Scalar, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn zeta_at_zero() {
        assert!(close(hurwitz_zeta(c(0.0), c(0.25)).unwrap(), c(0.25), 1e-14));
        let q = Scalar::new(0.3, 0.2);
        assert!(close(hurwitz_zeta(c(0.0), q).unwrap(), 0.5 - q, 1e-14));
    }

    #[test]
    fn zeta_against_riemann() {
        // ζ(2, 1) = π²/6, ζ(-1, 1) = -1/12
        assert!(close(hurwitz_zeta(c(2.0), c(1.0)).unwrap(), c(PI * PI / 6.0), 1e-14));
        // partial sums of size ~N² cancel here, so allow a few hundred ulps
        assert!(close(hurwitz_zeta(c(-1.0), c(1.0)).unwrap(), c(-1.0 / 12.0), 1e-12));
        assert!(hurwitz_zeta(c(1.0), c(0.5)).is_err());
        assert!(hurwitz_zeta(c(0.0), c(-0.5)).is_err());
    }

    #[test]
    fn deriv0_at_half() {
        let v = hurwitz_zeta_deriv0(c(0.5)).unwrap();
        assert!(close(v, c(-0.5 * 2f64.ln()), 1e-14));
        let em = hurwitz_zeta_deriv(c(0.0), c(0.5)).unwrap();
        assert!(close(em, v, 1e-13));
    }

    #[test]
    fn log_gamma_values() {
        assert!(close(log_gamma(c(1.0)).unwrap(), c(0.0), 1e-14));
        assert!(close(log_gamma(c(5.0)).unwrap(), c(24f64.ln()), 1e-14));
        assert!(close(log_gamma(c(0.5)).unwrap(), c(0.5 * PI.ln()), 1e-14));
    }

    #[test]
    fn eta_values() {
        let m = |a: Scalar| CircleModel::with_a(a).unwrap();
        assert!(close(eta_circle(&m(c(0.5))).unwrap(), c(0.0), 1e-14));
        assert!(close(eta_circle(&m(c(0.25))).unwrap(), c(0.25), 1e-14));
        assert!(close(
            eta_circle(&m(Scalar::new(0.25, 0.1))).unwrap(),
            Scalar::new(0.25, -0.1),
            1e-14
        ));
    }

    #[test]
    fn xi_values() {
        let m = CircleModel::with_a(c(0.5)).unwrap();
        assert!(close(xi_circle(&m, None).unwrap(), c(2f64.ln()), 1e-13));
        let m = CircleModel::with_a(c(0.25)).unwrap();
        assert!(close(xi_circle(&m, None).unwrap(), c(0.5 * 2f64.ln()), 1e-13));
        assert!(close(
            xi_circle(&m.with_scale(3.0).unwrap(), None).unwrap(),
            c(0.5 * 2f64.ln()),
            1e-13
        ));
    }

    #[test]
    fn rho_values() {
        let r = rho_an_circle(&CircleModel::with_a(c(0.5)).unwrap()).unwrap();
        assert!(close(r, c(2.0), 1e-13));
        let r = rho_an_circle(&CircleModel::with_a(c(0.25)).unwrap()).unwrap();
        assert!(close(r, Scalar::new(1.0, -1.0), 1e-13));
        let a = Scalar::new(0.25, 0.1);
        let r = rho_an_circle(&CircleModel::with_a(a).unwrap()).unwrap();
        assert!(close(r, rho_closed_form(a), 1e-13));
    }

    #[test]
    fn rs_values() {
        let t = |a: Scalar| rs_torsion_circle(&CircleModel::with_a(a).unwrap()).unwrap();
        assert!((t(c(0.5)) - 0.5).abs() < 1e-14);
        assert!((t(c(0.25)) - 0.5f64.sqrt()).abs() < 1e-14);
        let a = Scalar::new(0.25, 0.1);
        let expect = (-PI * 0.1).exp() / rho_closed_form(a).norm();
        assert!((t(a) - expect).abs() < 1e-14);
    }

    #[test]
    fn norm_values() {
        let (v, t) = rs_norm_check(&CircleModel::with_a(c(0.25)).unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-13 && (t - 1.0).abs() < 1e-15);
        let (v, t) = rs_norm_check(&CircleModel::with_a(Scalar::new(0.25, 0.1)).unwrap()).unwrap();
        assert!((v - t).abs() < 1e-13 && (t - (-0.1 * PI).exp()).abs() < 1e-14);
        let (v, _) = rs_norm_check(&CircleModel::with_a(c(0.9)).unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duality_values() {
        for a in [c(0.25), c(0.7), Scalar::new(0.3, 0.2)] {
            assert!(duality_check(&CircleModel::with_a(a).unwrap()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn scale_values() {
        let m = CircleModel::with_a(c(0.25)).unwrap();
        assert_eq!(metric_scale_check(&m, 1.0).unwrap(), 0.0);
        assert!(metric_scale_check(&m, 2.0).unwrap() < 1e-10);
        let m = CircleModel::with_a(Scalar::new(0.3, 0.1)).unwrap();
        assert!(metric_scale_check(&m, 5.0).unwrap() < 1e-9);
    }

    #[test]
    fn split_reassembles() {
        for a in [c(0.25), Scalar::new(0.6, -0.2)] {
            let m = CircleModel::with_a(a).unwrap();
            for k in [2, 5] {
                let s = circle_split(&m, k).unwrap();
                let rho = s.det_large * s.det_small;
                assert!(close(rho, rho_closed_form(a), 1e-12), "a={a} k={k}: {rho}");
            }
        }
    }

    #[test]
    fn rejects_bad_models() {
        assert!(CircleModel::new(c(1.0), 1.0, 1000).is_err());
        assert!(CircleModel::new(c(0.5), 0.0, 1000).is_err());
        assert!(CircleModel::new(c(0.5), 1.0, 10).is_err());
        let m = CircleModel::with_a(Scalar::new(0.1, -0.3)).unwrap();
        assert!(matches!(xi_circle(&m, Some(-0.1)), Err(Error::BranchAmbiguity { .. })));
    }
}
