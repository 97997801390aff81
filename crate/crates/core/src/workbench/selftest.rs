use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use rand::{Rng as _, SeedableRng};

use crate::circle::{self, CircleModel};
use crate::complexes::{self, rel, CohomologyFrame};
use crate::dense::{self, Mat};
use crate::error::{Error, Result};
use crate::gradedlinalg::{self, DetElement, GradedDims, LineElement, Scalar};
use crate::signature;
use crate::torsion;
use crate::workbench::{chirality_family, gen_random, random_matrix, ComplexDocument, Instance, Profile, Rng};

/// Result of one invariant check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    /// the statement checked, e.g. "Lemma 4.2"
    pub name: String,
    pub cases: usize,
    /// largest residual observed
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
    /// first error raised, if any
    pub error: Option<String>,
}

fn check(name: &str, tol: f64, cases: usize, mut f: impl FnMut(usize) -> Result<f64>) -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut error = None;
    for i in 0..cases {
        match f(i) {
            Ok(r) if r.is_finite() => worst = worst.max(r),
            Ok(r) => {
                worst = f64::INFINITY;
                error.get_or_insert(format!("case {i}: non-finite residual {r}"));
            }
            Err(e) => {
                error.get_or_insert(format!("case {i}: {e}"));
            }
        }
    }
    CheckOutcome {
        name: name.to_string(),
        cases,
        worst,
        tol,
        passed: error.is_none() && worst <= tol,
        error,
    }
}

fn rng_for(seed: u64, stream: u64, i: usize) -> Rng {
    Rng::seed_from_u64(seed ^ (stream << 40) ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn rand_coeff(rng: &mut Rng) -> Scalar {
    let m = 0.5 + 1.5 * rng.random::<f64>();
    Scalar::from_polar(m, 2.0 * std::f64::consts::PI * rng.random::<f64>())
}

fn rand_dims(rng: &mut Rng, d: usize, max: usize) -> GradedDims {
    GradedDims::new(d, (0..=d).map(|_| rng.random_range(0..=max)).collect()).expect("length d+1")
}

fn small_instance(seed: u64, i: usize, max_dim: usize) -> Result<Instance> {
    let mut rng = rng_for(seed, 99, i);
    let d = if rng.random::<bool>() { 1 } else { 3 };
    let profile = Profile {
        max_dim,
        min_blocks: 0,
        max_blocks: 3,
        harmonic: rng.random_range(0..=1),
        ..Profile::default()
    };
    gen_random(rng.random(), d, &profile)
}

fn random_unitary(rng: &mut Rng, n: usize) -> Mat {
    if n == 0 {
        return dense::zeros(0, 0);
    }
    random_matrix(rng, n, n).qr().q()
}

/// Greedy nearest matching distance between two eigenvalue multisets.
fn multiset_distance(a: &[Scalar], b: &[Scalar]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, dist) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        used[k] = true;
        worst = worst.max(dist);
    }
    worst
}

/// Grid of holonomy parameters: 20 real points and 10 complex ones.
pub(crate) fn circle_grid() -> Vec<Scalar> {
    let mut v: Vec<Scalar> = (0..20).map(|i| Scalar::new((i as f64 + 0.5) / 20.0, 0.0)).collect();
    for i in 0..10 {
        let re = 0.1 + 0.8 * (i as f64) / 9.0;
        let im = 0.3 * ((2.0 * i as f64 + 1.0) / 10.0 - 1.0);
        v.push(Scalar::new(re, im));
    }
    v
}

/// Runs every invariant check on `cases` random instances per check and
/// reports one outcome per statement. Tolerances are those of the test
/// suite, scaled by `tol / 1e-9`.
pub fn selftest(cases: usize, seed: u64, tol: f64) -> Vec<CheckOutcome> {
    let k = tol / 1e-9;
    let mut out = Vec::new();

    out.push(check("fusion associativity", 1e-12 * k, cases, |i| {
        let mut rng = rng_for(seed, 1, i);
        let d = if i % 2 == 0 { 1 } else { 3 };
        let e: Vec<DetElement> = (0..3)
            .map(|_| DetElement::new(rand_coeff(&mut rng), rand_dims(&mut rng, d, 4)))
            .collect();
        let l = gradedlinalg::fuse(&gradedlinalg::fuse(&e[0], &e[1])?, &e[2])?;
        let r = gradedlinalg::fuse(&e[0], &gradedlinalg::fuse(&e[1], &e[2])?)?;
        Ok(rel(l.coeff, r.coeff))
    }));

    out.push(check("alpha/beta compatibility", 1e-12 * k, cases, |i| {
        let mut rng = rng_for(seed, 2, i);
        let n = rng.random_range(0..=6);
        let v = LineElement::det(rand_coeff(&mut rng), n);
        let lhs = gradedlinalg::alpha_line_inv(&v.inv())?.inv();
        let b = gradedlinalg::beta_line(&v)?;
        let rhs = b.coeff * if n % 2 == 0 { 1.0 } else { -1.0 };
        Ok(rel(lhs.coeff, rhs))
    }));

    out.push(check("fusion and duals", 1e-12 * k, cases, |i| {
        let mut rng = rng_for(seed, 3, i);
        let v = LineElement::det(rand_coeff(&mut rng), rng.random_range(0..=6));
        let w = LineElement::det(rand_coeff(&mut rng), rng.random_range(0..=6));
        let lhs = gradedlinalg::mu_line(&v, &w)?.inv();
        let dv = gradedlinalg::alpha_line_inv(&v.inv())?;
        let dw = gradedlinalg::alpha_line_inv(&w.inv())?;
        let rhs = gradedlinalg::alpha_line(&gradedlinalg::mu_line(&dv, &dw)?)?;
        Ok(rel(lhs.coeff, rhs.coeff))
    }));

    out.push(check("Lemma 2.7", 1e-9 * k, cases, |i| {
        let mut rng = rng_for(seed, 4, i);
        let a = small_instance(seed, 2 * i, 4)?;
        let mut b = small_instance(seed, 2 * i + 1, 4)?;
        if b.complex.d() != a.complex.d() {
            b = gen_random(
                rng.random(),
                a.complex.d(),
                &Profile {
                    max_dim: 4,
                    harmonic: 1,
                    ..Profile::default()
                },
            )?;
        }
        let x1 = DetElement::new(rand_coeff(&mut rng), a.complex.dims().clone());
        let x2 = DetElement::new(rand_coeff(&mut rng), b.complex.dims().clone());
        complexes::fusion_compat_residual(&a.complex, &b.complex, &x1, &x2)
    }));

    out.push(check("Lemma 3.4", 1e-9 * k, cases, |i| {
        let mut rng = rng_for(seed, 5, i);
        let a = small_instance(seed ^ 5, i, 4)?;
        let x = DetElement::new(rand_coeff(&mut rng), a.complex.dims().clone());
        complexes::duality_residual(&a.complex, &x)
    }));

    out.push(check("phi frame independence", 1e-10 * k, cases, |i| {
        let mut rng = rng_for(seed, 6, i);
        let a = small_instance(seed ^ 6, i, 5)?;
        let c = &a.complex;
        let f = Arc::new(complexes::cohomology_frame(c)?);
        let x = DetElement::new(rand_coeff(&mut rng), c.dims().clone());
        let base = complexes::phi_in_frame(c, &f, &x)?;
        let mut g: CohomologyFrame = (*f).clone();
        let mut factor = Scalar::new(1.0, 0.0);
        for j in 0..=c.d() {
            let ua = random_unitary(&mut rng, g.a[j].ncols());
            let uh = random_unitary(&mut rng, g.h[j].ncols());
            g.a[j] = &g.a[j] * ua;
            g.h[j] = &g.h[j] * &uh;
            let du = dense::det(&uh);
            factor *= if j % 2 == 0 { 1.0 / du } else { du };
        }
        let moved = complexes::phi_in_frame(c, &Arc::new(g), &x)?;
        Ok(rel(moved.coeff, base.coeff * factor))
    }));

    out.push(check("Lemma 4.2", 1e-9 * k, cases, |i| {
        let mut rng = rng_for(seed, 7, i);
        let d = if i % 2 == 0 { 1 } else { 3 };
        let p = Profile {
            unitary: true,
            harmonic: rng.random_range(0..=1),
            ..Profile::default()
        };
        let inst = gen_random(rng.random(), d, &p)?;
        Ok((torsion::torsion_norm(&inst.complex, &inst.chirality)? - 1.0).abs())
    }));

    out.push(check("Lemma 4.3", 1e-9 * k, cases, |i| {
        let a = small_instance(seed ^ 8, 2 * i, 4)?;
        let b = gen_random(
            seed ^ (i as u64),
            a.complex.d(),
            &Profile {
                max_dim: 4,
                harmonic: i % 2,
                ..Profile::default()
            },
        )?;
        torsion::direct_sum_torsion_residual(&a.complex, &a.chirality, &b.complex, &b.chirality)
    }));

    out.push(check("Lemma 4.7", 1e-8 * k, cases, |i| {
        let a = small_instance(seed ^ 9, i, 6)?;
        torsion::dual_torsion_check(&a.complex, &a.chirality)
    }));

    // Γ ↦ SΓS⁻¹ with diagonal S moves the standard wedges, so the coefficient
    // of c_Γ picks up Π det(S_j)^{(-1)^j}
    out.push(check("c_gamma basis rescaling", 1e-12 * k, cases, |i| {
        let mut rng = rng_for(seed, 17, i);
        let a = small_instance(seed ^ 17, i, 5)?;
        let (c, g) = (&a.complex, &a.chirality);
        let d = c.d();
        let s: Vec<Vec<Scalar>> = (0..=d)
            .map(|j| (0..c.dims().dim(j)).map(|_| rand_coeff(&mut rng)).collect())
            .collect();
        let sm = |j: usize| Mat::from_diagonal(&nalgebra::DVector::from_vec(s[j].clone()));
        let sinv = |j: usize| Mat::from_diagonal(&nalgebra::DVector::from_vec(s[j].iter().map(|z| 1.0 / z).collect()));
        let partial: Vec<Mat> = (0..d).map(|j| sm(j + 1) * c.partial(j) * sinv(j)).collect();
        let gamma: Vec<Mat> = (0..=d).map(|j| sm(d - j) * g.block(j) * sinv(j)).collect();
        let c2 = crate::CochainComplex::new(c.dims().clone(), partial)?;
        let g2 = torsion::ChiralityOp::new(c.dims(), gamma)?;
        let mut factor = Scalar::new(1.0, 0.0);
        for (j, sj) in s.iter().enumerate() {
            let dj: Scalar = sj.iter().product();
            factor *= if j % 2 == 0 { dj } else { 1.0 / dj };
        }
        let before = torsion::c_gamma(c, g)?;
        let after = torsion::c_gamma(&c2, &g2)?;
        Ok(rel(after.coeff, before.coeff * factor))
    }));

    // ratio residual(1e-2)/residual(1e-3) must lie in [50, 200]; reported as
    // max(50/ratio, ratio/200), which passes when at most 1
    out.push(check("Prop 4.6", 1.0, cases, |i| {
        let mut rng = rng_for(seed, 10, i);
        let d = if i % 2 == 0 { 1 } else { 3 };
        let inst = gen_random(rng.random(), d, &Profile::default())?;
        let fam = chirality_family(rng.random(), &inst.chirality);
        let r1 = torsion::variation_check(&inst.complex, &fam, 0.1, 1e-2)?;
        let r2 = torsion::variation_check(&inst.complex, &fam, 0.1, 1e-3)?;
        let ratio = r1 / r2;
        Ok((50.0 / ratio).max(ratio / 200.0))
    }));

    out.push(check("Prop 5.5", 1e-9 * k, cases, |i| {
        let mut rng = rng_for(seed, 11, i);
        let d = if i % 2 == 0 { 1 } else { 3 };
        let inst = gen_random(rng.random(), d, &Profile::default())?;
        let rho = torsion::refined_torsion(&inst.complex, &inst.chirality)?;
        let gd = signature::graded_det_finite(&signature::build_signature(&inst.complex, &inst.chirality)?)?;
        Ok(rel(rho.coeff, gd))
    }));

    let split_instance = |i: usize| -> Result<(Instance, Vec<f64>)> {
        let mut rng = rng_for(seed, 12, i);
        let d = if i.is_multiple_of(2) { 1 } else { 3 };
        let p = Profile {
            min_blocks: 2,
            max_blocks: 4,
            harmonic: rng.random_range(0..=2),
            ..Profile::default()
        };
        for _ in 0..50 {
            let inst = gen_random(rng.random(), d, &p)?;
            let m = inst.b2_moduli();
            if m.len() >= 2 {
                let lams = vec![0.0, 0.5 * (m[0] + m[1]), 2.0 * m[m.len() - 1]];
                return Ok((inst, lams));
            }
        }
        Err(Error::InvalidParameter("could not draw two distinct moduli".into()))
    };

    out.push(check("Prop 5.10", 1e-8 * k, cases, |i| {
        let (inst, lams) = split_instance(i)?;
        let f = Arc::new(complexes::cohomology_frame(&inst.complex)?);
        let rho = torsion::refined_torsion_in_frame(&inst.complex, &inst.chirality, &f)?;
        let mut worst = 0.0f64;
        for lam in lams {
            let via = signature::torsion_via_split_in_frame(&inst.complex, &inst.chirality, lam, &f)?;
            worst = worst.max(rel(via.coeff, rho.coeff));
        }
        Ok(worst)
    }));

    out.push(check("Lemma 5.8", 0.0, cases, |i| {
        let (inst, lams) = split_instance(i)?;
        let s = signature::build_signature(&inst.complex, &inst.chirality)?;
        let mut nonzero = 0usize;
        for lam in lams {
            let split = signature::spectral_split(&s, lam)?;
            nonzero += signature::large_part_betti(&split)?.iter().sum::<usize>();
        }
        Ok(nonzero as f64)
    }));

    out.push(check("B_odd = Γ B_even Γ", 1e-9 * k, cases, |i| {
        let a = small_instance(seed ^ 13, i, 6)?;
        let s = signature::build_signature(&a.complex, &a.chirality)?;
        let ev = dense::eigenvalues(&s.beven);
        let od = dense::eigenvalues(&s.bodd());
        let scale = ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
        Ok(multiset_distance(&ev, &od) / scale)
    }));

    out.push(check("Agmon angle independence", 1e-9 * k, cases, |i| {
        let mut rng = rng_for(seed, 14, i);
        let d = if i % 2 == 0 { 1 } else { 3 };
        let inst = gen_random(rng.random(), d, &Profile::default())?;
        let s = signature::build_signature(&inst.complex, &inst.chirality)?;
        let gd = signature::graded_det_finite(&s)?;
        let eigs = dense::eigenvalues(&s.b);
        let up = signature::admissible_upper(&eigs);
        // angles admissible for B_even are admissible for B^± and -B^-
        let mut worst = 0.0f64;
        for frac in [0.25, 0.75] {
            let theta = -FRAC_PI_2 + frac * (up + FRAC_PI_2);
            match signature::graded_det_via_xi_eta(&s, 0.0, Some(theta)) {
                Ok(v) => worst = worst.max(rel(v, gd)),
                Err(e) if e.is_numerical_boundary() => {}
                Err(e) => return Err(e),
            }
        }
        worst = worst.max(rel(signature::graded_det_via_xi_eta(&s, 0.0, None)?, gd));
        Ok(worst)
    }));

    out.push(check("Theorem 6.9", 1e-9 * k, cases, |i| {
        let mut rng = rng_for(seed, 15, i);
        let n = rng.random_range(1..=8);
        let m = random_matrix(&mut rng, n, n);
        signature::det_eta_check(&m, None)
    }));

    let grid = circle_grid();
    let circ = |f: fn(&CircleModel) -> Result<f64>| {
        let grid = grid.clone();
        move |i: usize| -> Result<f64> { f(&CircleModel::with_a(grid[i])?) }
    };
    out.push(check(
        "circle two-path rho_an",
        1e-8 * k,
        30,
        circ(|m| Ok(rel(circle::rho_an_circle(m)?, circle::rho_closed_form(m.a)))),
    ));
    out.push(check(
        "Ray-Singer norm theorem",
        1e-8 * k,
        30,
        circ(|m| {
            let (v, t) = circle::rs_norm_check(m)?;
            Ok((v - t).abs() / t)
        }),
    ));
    out.push(check("Duality theorem", 1e-9 * k, 30, circ(circle::duality_check)));
    out.push(check(
        "Theorem 9.6",
        1e-9 * k,
        30,
        circ(|m| {
            let mut w = 0.0f64;
            for c in [0.5, 2.0, 5.0] {
                w = w.max(circle::metric_scale_check(m, c)?);
            }
            Ok(w)
        }),
    ));
    out.push(check(
        "Prop 7.8",
        1e-8 * k,
        30,
        circ(|m| {
            let mut w = 0.0f64;
            for kk in [2, 5] {
                let s = circle::circle_split(m, kk)?;
                w = w.max(rel(s.det_large * s.det_small, circle::rho_an_circle(m)?));
            }
            Ok(w)
        }),
    ));
    out.push(check(
        "Prop 6.5",
        1e-10 * k,
        30,
        circ(|m| Ok(circle::laplacian_zeta0(m)?.norm())),
    ));

    out.push(check("JSON round-trip", 0.0, cases, |i| {
        let a = small_instance(seed ^ 16, i, 6)?;
        let mut meta = BTreeMap::new();
        meta.insert("case".to_string(), i.to_string());
        let doc = ComplexDocument::from_complex(&a.complex, Some(&a.chirality), meta);
        let s1 = doc.to_canonical_json()?;
        let s2 = ComplexDocument::parse(&s1)?.to_canonical_json()?;
        Ok(if s1 == s2 { 0.0 } else { 1.0 })
    }));

    out
}
