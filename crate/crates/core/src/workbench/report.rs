use std::sync::Arc;

use serde_json::{json, Value};

use crate::circle::{self, CircleModel};
use crate::complexes::{self, rel};
use crate::error::{Error, Result};
use crate::gradedlinalg::{self, Scalar};
use crate::signature;
use crate::torsion;
use crate::workbench::ComplexDocument;

/// Default pass threshold for the split consistency residual.
pub const SPLIT_DEFAULT_TOL: f64 = 1e-8;

fn cj(z: Scalar) -> Value {
    json!([z.re, z.im])
}

fn pair(doc: &ComplexDocument) -> Result<(crate::CochainComplex, crate::ChiralityOp)> {
    let (c, g) = doc.to_complex()?;
    let g = g.ok_or_else(|| Error::Parse("document has no chirality".into()))?;
    Ok((c, g))
}

/// Refined torsion, graded determinant (when B is bijective) and the sign
/// parities N, R, M of a document.
pub fn torsion_report(doc: &ComplexDocument) -> Result<Value> {
    let (c, g) = pair(doc)?;
    let frame = Arc::new(complexes::cohomology_frame(&c)?);
    let rho = torsion::refined_torsion_in_frame(&c, &g, &frame)?;
    let s = signature::build_signature(&c, &g)?;
    let gd = if s.is_bijective() {
        Some(signature::graded_det_finite(&s)?)
    } else {
        None
    };
    Ok(json!({
        "torsion": cj(rho.coeff),
        "betti": frame.betti,
        "acyclic": frame.betti.iter().all(|&b| b == 0),
        "graded_det": gd.map(cj),
        "torsion_norm": torsion::torsion_norm(&c, &g)?,
        "sign_N": complexes::sign_n(&frame),
        "sign_R": torsion::sign_r(c.dims())?,
        "sign_M": gradedlinalg::sign_m_self(c.dims()),
    }))
}

/// Spectral split at λ and the consistency residual between
/// `Det_gr(large)·Ψ(ρ_small)` and `ρ_Γ`.
pub fn split_report(doc: &ComplexDocument, lambda: f64, theta: Option<f64>, tol: f64) -> Result<Value> {
    let (c, g) = pair(doc)?;
    let frame = Arc::new(complexes::cohomology_frame(&c)?);
    let s = signature::build_signature(&c, &g)?;
    let split = signature::spectral_split(&s, lambda)?;
    let rho = torsion::refined_torsion_in_frame(&c, &g, &frame)?;
    let via = signature::torsion_via_split_in_frame(&c, &g, lambda, &frame)?;
    let residual = rel(via.coeff, rho.coeff);
    let (det_large, det_large_xi_eta) = if split.large.is_empty() {
        (Scalar::new(1.0, 0.0), Scalar::new(1.0, 0.0))
    } else {
        let sl = signature::build_signature(&split.large.complex, &split.large.chirality)?;
        (
            signature::graded_det_finite(&sl)?,
            signature::graded_det_via_xi_eta(&s, lambda, theta)?,
        )
    };
    Ok(json!({
        "lambda": lambda,
        "d_small": split.d_small,
        "d_large": split.large.dims(),
        "large_betti": signature::large_part_betti(&split)?,
        "small_betti": complexes::betti(&split.small.complex)?,
        "graded_det_large": cj(det_large),
        "graded_det_large_xi_eta": cj(det_large_xi_eta),
        "torsion_via_split": cj(via.coeff),
        "torsion": cj(rho.coeff),
        "residual": residual,
        "tolerance": tol,
        "consistent": residual <= tol && rel(det_large_xi_eta, det_large) <= tol,
    }))
}

/// Every circle-model quantity for one parameter.
pub fn circle_report(a: Scalar, scale: f64, trunc: usize, tol: f64) -> Result<Value> {
    let m = CircleModel::new(a, scale, trunc)?;
    let theta = circle::circle_theta(&m, None)?;
    let rho = circle::rho_an_circle(&m)?;
    let closed = circle::rho_closed_form(a);
    let (value, target) = circle::rs_norm_check(&m)?;
    let dual = circle::duality_check(&m)?;
    let two_path = rel(rho, closed);
    Ok(json!({
        "a": cj(a),
        "scale": scale,
        "trunc": trunc,
        "theta": theta,
        "eta": cj(circle::eta_circle(&m)?),
        "xi": cj(circle::xi_circle(&m, Some(theta))?),
        "rho_an": cj(rho),
        "rho_closed_form": cj(closed),
        "two_path_residual": two_path,
        "rs_torsion": circle::rs_torsion_circle(&m)?,
        "rs_norm_value": value,
        "rs_norm_target": target,
        "duality_residual": dual,
        "tolerance": tol,
        "consistent": two_path <= tol && (value - target).abs() <= tol * target && dual <= tol,
    }))
}
