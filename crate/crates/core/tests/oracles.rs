//! Independent oracles for the special-function, Painlevé, Lax and DCHE layers.

use josephson::adjacency::{boundary_chain, omega_from_b2b3};
use josephson::lax::{isomonodromy_drift, specialize_at_pole, zero_curvature_residual, IsoFamily};
use josephson::linalg::C64;
use josephson::monodromy::{calibrate_dche, dche_residual, system_coeff, DcheParams};
use josephson::odeint::{integrate_real, Tolerances};
use josephson::painleve::{bessel_w, integrate_p3, p3_tilde_residual};
use josephson::rotation::{boundary_point, scan_grid, JosephsonParams, Side};
use josephson::specfun::{u_eval, BesselCombo};
use josephson::Error;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn u_derivative_matches_finite_difference() {
    for &(b, y0) in &[(0.0, 0.0), (0.5, 1.0), (1.0, -0.3), (2.7, 0.8)] {
        let c = BesselCombo::new(b, y0).unwrap();
        for &s in &[0.7, 2.0, 5.5, 13.0] {
            let h = 1e-4 * s;
            let f = |x: f64| u_eval(&c, x).unwrap().0;
            let fd = (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h);
            let (_, up) = u_eval(&c, s).unwrap();
            assert!((fd - up).abs() < 1e-8 * (1.0 + up.abs()), "b={b} y0={y0} s={s}: {fd} vs {up}");
        }
    }
}

#[test]
fn u_solves_its_ode() {
    // u = s^b Z_b(s) satisfies s u'' + (1 − 2b) u' + s u = 0; integrate it
    // from s = 1 and compare with the closed form at s = 9.
    let b = 1.3;
    let c = BesselCombo::new(b, 0.4).unwrap();
    let (u1, up1) = u_eval(&c, 1.0).unwrap();
    let field = |s: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = -((1.0 - 2.0 * b) * y[1] + s * y[0]) / s;
    };
    let out = integrate_real(field, &[u1, up1], (1.0, 9.0), &Tolerances::uniform(1e-12).unwrap()).unwrap();
    let (u9, up9) = u_eval(&c, 9.0).unwrap();
    assert!((out.state[0] - u9).abs() < 1e-8 * (1.0 + u9.abs()));
    assert!((out.state[1] - up9).abs() < 1e-8 * (1.0 + up9.abs()));
}

#[test]
fn p3_tilde_holds_for_bessel_solutions() {
    for &(b, y0) in &[(0.0, 0.5), (0.5, 0.0), (1.0, 0.5), (1.5, -1.0)] {
        let sol = bessel_w(BesselCombo::new(b, y0).unwrap()).unwrap();
        let ts: Vec<f64> = (1..200).map(|i| 0.05 * i as f64).collect();
        let r = p3_tilde_residual(|t| sol.y_jet(t), b, &ts);
        assert!(r.max_residual < 1e-6, "b={b}: {} at {}", r.max_residual, r.worst_tau);
    }
}

#[test]
fn integrated_p3_finds_the_bessel_pole() {
    let sol = bessel_w(BesselCombo::new(1.0, 0.5).unwrap()).unwrap();
    let p = sol.poles.zeros.iter().copied().find(|&p| p > 3.0).unwrap();
    let tau0 = p - 1.0;
    let (w, wp, _) = sol.jet(tau0).unwrap();
    let out = integrate_p3(&sol.params(), tau0, w, wp, p + 1.0, &Tolerances::uniform(1e-12).unwrap());
    match out {
        Err(Error::MovingSingularity(est)) => assert!((est - p).abs() < 1e-6, "{est} vs {p}"),
        other => panic!("expected a pole, got {other:?}"),
    }
    // Short of the pole the trajectory tracks the closed form.
    let mid = integrate_p3(&sol.params(), tau0, w, wp, p - 0.3, &Tolerances::uniform(1e-12).unwrap()).unwrap();
    let exact = sol.w(p - 0.3).unwrap();
    assert!((mid - exact).abs() < 1e-7 * (1.0 + exact.abs()));
}

#[test]
fn reducible_family_is_isomonodromic() {
    let zs = [C64::new(0.5, 0.0), C64::new(1.0, 1.0), C64::new(0.0, 2.0)];
    let ts = [1.0, 2.5, 5.0];
    let t_list = [1.0, 3.0, 6.0, 10.0];
    for &b in &[0.0, 0.5, 1.0] {
        let fam = IsoFamily::new(BesselCombo::new(b, 0.5).unwrap(), 1.0, 0.0, 1.0).unwrap();
        assert!(zero_curvature_residual(&fam, &zs, &ts).unwrap() < 1e-6);
        let tol = Tolerances::uniform(1e-11).unwrap();
        assert!(isomonodromy_drift(&fam, &t_list, 1.0, &tol).unwrap() < 1e-5);
    }
}

#[test]
fn frozen_b2_breaks_zero_curvature() {
    let zs = [C64::new(0.5, 0.0), C64::new(1.0, 1.0)];
    let fam = IsoFamily::new(BesselCombo::new(1.0, 0.5).unwrap(), 1.0, 0.0, 1.0)
        .unwrap()
        .with_constant_b2(1.0);
    assert!(zero_curvature_residual(&fam, &zs, &[1.5, 3.0]).unwrap() > 1e-2);
}

#[test]
fn pole_specialization_is_a_josephson_system() {
    let combo = BesselCombo::new(1.0, 0.5).unwrap();
    let sol = bessel_w(combo).unwrap();
    let s = sol.poles.zeros[1];
    let fam = IsoFamily::new(combo, 1.0, -1.0, 1.0).unwrap();
    let ps = specialize_at_pole(&fam, s * s).unwrap();
    let Ok(omega) = omega_from_b2b3(ps.b2_star, ps.b3_star) else {
        // b₂*b₃* > 0: no real ω; flip C̃₁.
        let fam = IsoFamily::new(combo, 1.0, 1.0, 1.0).unwrap();
        let ps = specialize_at_pole(&fam, s * s).unwrap();
        assert!(omega_from_b2b3(ps.b2_star, ps.b3_star).is_ok());
        return;
    };
    let reference = system_coeff(&JosephsonParams::new(1.0, s, omega).unwrap());
    let rescaled = ps.rescaled_system();
    for &z in &[C64::new(0.7, 0.2), C64::new(-1.0, 1.5)] {
        let (m, r) = (rescaled(z), reference(z));
        // The diagonal agrees outright; the off-diagonal product is gauge invariant.
        assert!((m.get(0, 0) - r.get(0, 0)).norm() < 1e-10 * (1.0 + r.get(0, 0).norm()));
        let prod_m = m.get(0, 1) * m.get(1, 0);
        let prod_r = r.get(0, 1) * r.get(1, 0);
        assert!((prod_m - prod_r).norm() < 1e-10 * (1.0 + prod_r.norm()));
    }
}

#[test]
fn dche_on_the_euler_axis() {
    let zs = [C64::new(0.8, 0.3), C64::new(1.5, -0.5), C64::new(-0.6, 1.1)];
    for &(b, w) in &[(0.3, 1.0), (1.7, 0.6)] {
        let p = DcheParams::new(0.0, b, w, 0.0, 1.0).unwrap();
        assert!(dche_residual(&p, &zs, &tol()).unwrap() < 1e-6);
    }
}

#[test]
fn dche_calibration_recovers_the_gauge() {
    let zs = [C64::new(0.8, 0.3), C64::new(1.5, -0.5)];
    let a = 1.2;
    let base = DcheParams {
        equation_a: Some(a / 4.0),
        ..DcheParams::new(a, 0.4, 1.1, 0.0, 1.0).unwrap()
    };
    let c = calibrate_dche(&base, &zs, &tol()).unwrap();
    assert!(c.residual < 1e-5, "{c:?}");
    assert_eq!(c.kappa, 1.0);
    assert!((c.mu - a / 2.0).abs() < 1e-4, "{c:?}");
}

#[test]
fn scan_rows_are_monotone_in_b() {
    let g = scan_grid((-1.0, 3.0), (0.0, 2.0), (41, 3), 1.0, &tol()).unwrap();
    for row in &g.rho_values {
        for w in row.windows(2) {
            assert!(w[1].rho >= w[0].rho - 1e-6);
        }
    }
}

#[test]
fn boundary_points_bracket_the_plateau() {
    let (w, a) = (2.0, 3.0);
    let lo = boundary_point(1, Side::Minus, a, w, &tol()).unwrap();
    let hi = boundary_point(1, Side::Plus, a, w, &tol()).unwrap();
    let (bl, bh) = (lo.min(hi), lo.max(hi));
    assert!(bh - bl > 1e-3);
    let g = scan_grid((bl + 1e-3, bh - 1e-3), (a, a), (5, 2), w, &tol()).unwrap();
    for cell in &g.rho_values[0] {
        assert!((cell.rho - 1.0).abs() < 1e-6);
    }
}

#[test]
fn boundary_chain_records_invariants() {
    let pts = boundary_chain(0.5, 1.0, 1.0, 3, &tol()).unwrap();
    assert_eq!(pts.len(), 3);
    for p in &pts {
        let det = C64::from_polar(1.0, -std::f64::consts::PI);
        // Large entries cost digits in det; scale by |tr|².
        assert!((p.det - det).norm() < 1e-6 * (1.0 + p.trace.norm_sqr()));
        assert!((p.eig_discriminant - (p.trace * p.trace - 4.0 * p.det)).norm() < 1e-9 * (1.0 + p.trace.norm_sqr()));
    }
}
