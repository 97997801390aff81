//! One pass/fail line per acceptance criterion.

use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng as _, SeedableRng};
use rtorsion::circle::{self, CircleModel};
use rtorsion::complexes::{self, CochainComplex};
use rtorsion::signature;
use rtorsion::torsion::{self, ChiralityOp};
use rtorsion::workbench::{chirality_family, gen_elementary, gen_random, random_matrix, Profile, Rng};
use rtorsion::{DetElement, GradedDims, Mat};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

struct Line {
    id: u32,
    what: &'static str,
    worst: f64,
    bound: String,
    pass: bool,
}

fn report(lines: &[Line]) {
    for l in lines {
        println!(
            "criterion {:>2} [{}] {:<46} worst={:.3e} bound={}",
            l.id,
            if l.pass { "PASS" } else { "FAIL" },
            l.what,
            l.worst,
            l.bound
        );
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter()
        .fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn within(worst: f64, tol: f64) -> bool {
    worst.is_finite() && worst <= tol
}

fn d_of(i: usize) -> usize {
    if i.is_multiple_of(2) {
        1
    } else {
        3
    }
}

fn small_pair(rng: &mut Rng, i: usize) -> (rtorsion::workbench::Instance, rtorsion::workbench::Instance) {
    let d = d_of(i);
    let p = |h| Profile {
        max_dim: 4,
        min_blocks: 0,
        max_blocks: 3,
        harmonic: h,
        ..Profile::default()
    };
    let a = gen_random(rng.random(), d, &p(rng.random_range(0..=1))).unwrap();
    let b = gen_random(rng.random(), d, &p(rng.random_range(0..=1))).unwrap();
    (a, b)
}

fn rand_coeff(rng: &mut Rng) -> Complex64 {
    Complex64::from_polar(
        0.5 + 1.5 * rng.random::<f64>(),
        std::f64::consts::TAU * rng.random::<f64>(),
    )
}

fn grid() -> (Vec<Complex64>, Vec<Complex64>) {
    let real = (0..20).map(|i| c((i as f64 + 0.5) / 20.0, 0.0)).collect();
    let cplx = (0..10)
        .map(|i| c(0.1 + 0.08 * i as f64 + 0.04, 0.3 * ((2 * i + 1) as f64 / 10.0 - 1.0)))
        .collect();
    (real, cplx)
}

fn criterion_1() -> Line {
    // once from the generator, once assembled by hand
    let (cx, g) = gen_elementary(1, 0, c(2.0, 0.0)).unwrap();
    let dims = GradedDims::new(1, vec![1, 1]).unwrap();
    let hand = CochainComplex::new(dims.clone(), vec![diag(&[c(2.0, 0.0)])]).unwrap();
    let id = ChiralityOp::identity_pairing(&dims).unwrap();
    let two = c(2.0, 0.0);
    let mut worst = 0.0f64;
    for (cx, g) in [(&cx, &g), (&hand, &id)] {
        let rho = torsion::refined_torsion(cx, g).unwrap();
        let gd = signature::graded_det_finite(&signature::build_signature(cx, g).unwrap()).unwrap();
        worst = worst.max((rho.coeff - two).norm()).max((gd - two).norm());
    }
    Line {
        id: 1,
        what: "running example ρ = Det_gr = 2",
        worst,
        bound: "1e-12".into(),
        pass: within(worst, 1e-12),
    }
}

fn criterion_2() -> Line {
    let mut rng = Rng::seed_from_u64(2);
    let worst = max_of((0..300).map(|i| {
        let inst = gen_random(rng.random(), d_of(i), &Profile::default()).unwrap();
        assert!(complexes::is_acyclic(&inst.complex).unwrap());
        let rho = torsion::refined_torsion(&inst.complex, &inst.chirality).unwrap();
        let s = signature::build_signature(&inst.complex, &inst.chirality).unwrap();
        rel(rho.coeff, signature::graded_det_finite(&s).unwrap())
    }));
    Line {
        id: 2,
        what: "torsion = graded determinant (300 acyclic)",
        worst,
        bound: "1e-9".into(),
        pass: within(worst, 1e-9),
    }
}

fn criterion_3() -> Line {
    let mut rng = Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut with_cohomology = 0;
    let mut done = 0;
    while done < 60 {
        let d = d_of(done);
        let p = Profile {
            min_blocks: 2,
            harmonic: rng.random_range(0..=2),
            ..Profile::default()
        };
        let inst = gen_random(rng.random(), d, &p).unwrap();
        let m = inst.b2_moduli();
        if m.len() < 2 {
            continue;
        }
        done += 1;
        if inst.expected_betti().iter().any(|&b| b > 0) {
            with_cohomology += 1;
        }
        let f = Arc::new(complexes::cohomology_frame(&inst.complex).unwrap());
        let rho = torsion::refined_torsion_in_frame(&inst.complex, &inst.chirality, &f).unwrap();
        let lams = [0.5 * m[0], 0.5 * (m[0] + m[1]), 2.0 * m[m.len() - 1]];
        let vals: Vec<Complex64> = lams
            .iter()
            .map(|&l| {
                signature::torsion_via_split_in_frame(&inst.complex, &inst.chirality, l, &f)
                    .unwrap()
                    .coeff
            })
            .collect();
        for v in &vals {
            worst = worst.max(rel(*v, rho.coeff)).max(rel(*v, vals[0]));
        }
    }
    let pass = within(worst, 1e-8) && with_cohomology > 0;
    Line {
        id: 3,
        what: "split torsion λ-independent, incl. betti > 0",
        worst,
        bound: "1e-8".into(),
        pass,
    }
}

fn criterion_4() -> Line {
    let mut rng = Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let (a, b) = small_pair(&mut rng, i);
        let x1 = DetElement::new(rand_coeff(&mut rng), a.complex.dims().clone());
        let x2 = DetElement::new(rand_coeff(&mut rng), b.complex.dims().clone());
        worst = worst.max(complexes::fusion_compat_residual(&a.complex, &b.complex, &x1, &x2).unwrap());
        worst = worst.max(complexes::duality_residual(&a.complex, &x1).unwrap());
        worst = worst
            .max(torsion::direct_sum_torsion_residual(&a.complex, &a.chirality, &b.complex, &b.chirality).unwrap());
        worst = worst.max(torsion::dual_torsion_check(&b.complex, &b.chirality).unwrap());
    }
    Line {
        id: 4,
        what: "fusion / duality / direct sum / dual torsion",
        worst,
        bound: "1e-8".into(),
        pass: within(worst, 1e-8),
    }
}

fn criterion_5() -> Line {
    let mut rng = Rng::seed_from_u64(5);
    let worst = max_of((0..500).map(|i| {
        let p = Profile {
            unitary: true,
            harmonic: rng.random_range(0..=1),
            ..Profile::default()
        };
        let inst = gen_random(rng.random(), d_of(i), &p).unwrap();
        (torsion::torsion_norm(&inst.complex, &inst.chirality).unwrap() - 1.0).abs()
    }));
    Line {
        id: 5,
        what: "torsion norm = 1 for unitary Γ (500)",
        worst,
        bound: "1e-9".into(),
        pass: within(worst, 1e-9),
    }
}

fn criterion_6() -> Line {
    let mut rng = Rng::seed_from_u64(6);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..20 {
        let inst = gen_random(rng.random(), d_of(i), &Profile::default()).unwrap();
        let fam = chirality_family(rng.random(), &inst.chirality);
        let r1 = torsion::variation_check(&inst.complex, &fam, 0.1, 1e-2).unwrap();
        let r2 = torsion::variation_check(&inst.complex, &fam, 0.1, 1e-3).unwrap();
        lo = lo.min(r1 / r2);
        hi = hi.max(r1 / r2);
    }
    let pass = lo >= 50.0 && hi <= 200.0;
    Line {
        id: 6,
        what: "variation residual ratio h=1e-2 vs 1e-3",
        worst: hi,
        bound: format!("[50, 200], min {lo:.1}"),
        pass,
    }
}

fn diag(v: &[Complex64]) -> Mat {
    Mat::from_diagonal(&nalgebra::DVector::from_vec(v.to_vec()))
}

fn criterion_7() -> Line {
    let mut rng = Rng::seed_from_u64(7);
    let random = max_of((0..50).map(|_| {
        let n = rng.random_range(1..=8);
        signature::det_eta_check(&random_matrix(&mut rng, n, n), None).unwrap()
    }));
    let hand = max_of([
        signature::det_eta_check(&diag(&[c(2.0, 0.0)]), Some(-FRAC_PI_4)).unwrap(),
        signature::det_eta_check(&diag(&[c(2.0, 0.0), c(-3.0, 0.0)]), Some(-FRAC_PI_4)).unwrap(),
        signature::det_eta_check(&diag(&[c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)]), Some(-FRAC_PI_4)).unwrap(),
    ]);
    let pass = within(random, 1e-9) && within(hand, 1e-14);
    Line {
        id: 7,
        what: "det-eta identity (50 random + 3 hand)",
        worst: random.max(hand),
        bound: "1e-9 / hand 1e-14".into(),
        pass,
    }
}

fn criterion_8() -> Line {
    let worst = max_of(grid().0.into_iter().map(|a| {
        let (v, t) = circle::rs_norm_check(&CircleModel::with_a(a).unwrap()).unwrap();
        assert_eq!(t, 1.0);
        (v - 1.0).abs()
    }));
    Line {
        id: 8,
        what: "circle RS norm = 1, real grid (20)",
        worst,
        bound: "1e-8".into(),
        pass: within(worst, 1e-8),
    }
}

fn criterion_9() -> Line {
    let worst = max_of(grid().1.into_iter().map(|a| {
        let m = CircleModel::with_a(a).unwrap();
        let (v, t) = circle::rs_norm_check(&m).unwrap();
        let eta = circle::eta_circle(&m).unwrap();
        assert!(((std::f64::consts::PI * eta.im).exp() - t).abs() <= 1e-14 * t);
        (v - t).abs() / t
    }));
    Line {
        id: 9,
        what: "circle RS norm = e^{π Im η}, complex a (10)",
        worst,
        bound: "1e-8".into(),
        pass: within(worst, 1e-8),
    }
}

fn full_grid() -> Vec<Complex64> {
    let (mut a, b) = grid();
    a.extend(b);
    a
}

fn criterion_10() -> Line {
    let worst = max_of(
        full_grid()
            .into_iter()
            .map(|a| circle::duality_check(&CircleModel::with_a(a).unwrap()).unwrap()),
    );
    Line {
        id: 10,
        what: "circle duality",
        worst,
        bound: "1e-9".into(),
        pass: within(worst, 1e-9),
    }
}

fn criterion_11() -> Line {
    let worst = max_of(full_grid().into_iter().flat_map(|a| {
        let m = CircleModel::with_a(a).unwrap();
        [0.5, 2.0, 5.0].map(|s| circle::metric_scale_check(&m, s).unwrap())
    }));
    Line {
        id: 11,
        what: "circle metric-scale invariance",
        worst,
        bound: "1e-9".into(),
        pass: within(worst, 1e-9),
    }
}

fn criterion_12() -> Line {
    let worst = max_of(full_grid().into_iter().map(|a| {
        let rho = circle::rho_an_circle(&CircleModel::with_a(a).unwrap()).unwrap();
        rel(rho, circle::rho_closed_form(a))
    }));
    Line {
        id: 12,
        what: "circle ξ/η assembly vs 1 − e^{2πia}",
        worst,
        bound: "1e-8".into(),
        pass: within(worst, 1e-8),
    }
}

fn main() {
    let lines = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
    ];
    report(&lines);
    let failed: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", lines.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
