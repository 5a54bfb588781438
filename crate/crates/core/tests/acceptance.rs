//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use josephson::adjacency::{chain, find_seed};
use josephson::lax::{isomonodromy_drift, zero_curvature_residual, IsoFamily, DRIFT_RADIUS};
use josephson::linalg::{C64, I};
use josephson::monodromy::{eig_discriminant, euler_residue, monodromy_loop, DEFAULT_RADIUS};
use josephson::odeint::Tolerances;
use josephson::painleve::{bessel_w, p3_residual, params_from_b, pole_residue};
use josephson::rotation::{
    boundary_point, rho_axis_analytic, rotation_number, scan_grid, trace_boundary, JosephsonParams, Side,
    DEFAULT_MAX_PERIODS,
};
use josephson::specfun::{bessel_pair, find_zeros, BesselCombo};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn liouville() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let b = rng.gen_range(-3.0..3.0);
        let a = rng.gen_range(0.0..10.0);
        let w = rng.gen_range(0.3..3.0);
        let p = JosephsonParams::new(b, a, w).unwrap();
        match monodromy_loop(&p, DEFAULT_RADIUS, &tol()) {
            Ok(m) => worst = worst.max(m.det_residual),
            Err(e) => return outcome(false, format!("({b}, {a}, {w}): {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-6 && secs < 120.0,
        format!("max |det M − e^(−2πib)| = {worst:.3e}, {secs:.1} s"),
    )
}

fn euler_limit() -> Outcome {
    let pairs = [
        (0.3, 1.0),
        (-0.7, 0.5),
        (1.25, 2.0),
        (2.4, 0.8),
        (-1.9, 1.7),
        (0.1, 0.35),
        (2.9, 3.0),
        (-2.2, 0.6),
        (0.55, 1.3),
        (1.6, 2.6),
    ];
    let mut worst = 0.0_f64;
    for &(b, w) in &pairs {
        let p = JosephsonParams::new(b, 0.0, w).unwrap();
        let m = monodromy_loop(&p, DEFAULT_RADIUS, &tol()).unwrap().matrix;
        let expected = euler_residue(b, w).scale(2.0 * PI * I).expm();
        worst = worst.max(m.dist(&expected));
    }
    outcome(worst < 1e-6, format!("max ‖M − exp(2πiA₁)‖ = {worst:.3e} over 10 pairs"))
}

fn cot_solution() -> Outcome {
    let sol = bessel_w(BesselCombo::new(0.5, 0.0).unwrap()).unwrap();
    let taus: Vec<f64> = (0..=2700)
        .map(|i| 0.3 + i as f64 * 1e-3)
        .filter(|t| (t - PI).abs() > 0.05)
        .collect();
    // The closed form's own jet, independent of the Bessel evaluation.
    let exact = |t: f64| {
        let (s, c) = t.sin_cos();
        Ok((c / s, -1.0 / (s * s), 2.0 * c / (s * s * s)))
    };
    let r_exact = p3_residual(exact, &params_from_b(0.5), &taus);
    let r_bessel = p3_residual(|t| sol.jet(t), &params_from_b(0.5), &taus);
    let mut gap = 0.0_f64;
    let mut riccati = 0.0_f64;
    for &t in &taus {
        let (w, wp, _) = sol.jet(t).unwrap();
        let cot = 1.0 / t.tan();
        gap = gap.max((w - cot).abs() / (1.0 + cot.abs()));
        // Riccati specialization at b = 1/2: w' = −w² − 1.
        riccati = riccati.max((wp + w * w + 1.0).abs() / (1.0 + w * w));
    }
    let worst = r_exact.max_residual.max(r_bessel.max_residual);
    outcome(
        worst < 1e-7 && gap < 1e-12 && riccati < 1e-12 && r_bessel.excluded.is_empty(),
        format!(
            "residual {:.2e} (closed form) / {:.2e} (Bessel), |w − cot τ| {gap:.1e}, Riccati {riccati:.1e}",
            r_exact.max_residual, r_bessel.max_residual
        ),
    )
}

fn pole_residues() -> Outcome {
    let mut worst = 0.0_f64;
    for &b in &[0.0, 0.5, 1.0] {
        for &y0 in &[0.0, 0.5] {
            let sol = bessel_w(BesselCombo::new(b, y0).unwrap()).unwrap();
            for &p in sol.poles.zeros.iter().take(3) {
                match pole_residue(&sol, p) {
                    Ok(r) => worst = worst.max((r.value - 1.0).abs()),
                    Err(e) => return outcome(false, format!("b={b}, y0={y0}, pole {p}: {e}")),
                }
            }
        }
    }
    outcome(worst < 1e-4, format!("max |residue − 1| = {worst:.3e} over 18 poles"))
}

fn axis_and_symmetries() -> Outcome {
    let pairs = [
        (0.0, 1.0),
        (0.5, 1.0),
        (2.0, 1.0),
        (1.5, 2.0),
        (-2.0, 1.0),
        (3.0, 0.5),
        (0.7, 3.0),
        (-1.2, 1.5),
        (4.0, 0.3),
        (1.01, 1.0),
    ];
    let mut axis = 0.0_f64;
    for &(b, w) in &pairs {
        let p = JosephsonParams::new(b, 0.0, w).unwrap();
        let r = rotation_number(&p, DEFAULT_MAX_PERIODS, &tol()).unwrap();
        axis = axis.max((r.rho - rho_axis_analytic(b, w)).abs());
    }
    let n = 20;
    let w = 1.0;
    let pos = scan_grid((0.0, 3.0), (0.0, 4.0), (n, n), w, &tol()).unwrap();
    let neg = scan_grid((-3.0, 0.0), (-4.0, 0.0), (n, n), w, &tol()).unwrap();
    let mut odd = 0.0_f64;
    let mut even = 0.0_f64;
    for ia in 0..n {
        for jb in 0..n {
            let r = pos.rho_values[ia][jb].rho;
            // neg axes are the reflections of pos axes, in reverse order.
            let r_neg_both = neg.rho_values[n - 1 - ia][n - 1 - jb].rho;
            let p_neg_a = JosephsonParams::new(pos.b_axis[jb], -pos.a_axis[ia], w).unwrap();
            let r_neg_a = rotation_number(&p_neg_a, DEFAULT_MAX_PERIODS, &tol()).unwrap().rho;
            even = even.max((r - r_neg_a).abs());
            odd = odd.max((r + r_neg_both).abs());
        }
    }
    outcome(
        axis < 1e-6 && even < 2e-4 && odd < 2e-4,
        format!("axis error {axis:.2e}, a-evenness {even:.2e}, b-oddness {odd:.2e}"),
    )
}

fn zero_curvature() -> Outcome {
    let zs = [C64::new(0.5, 0.0), C64::new(1.0, 1.0), C64::new(0.0, 2.0)];
    let ts = [1.0, 2.5, 5.0];
    let t_list: Vec<f64> = (1..=10).map(|k| k as f64).collect();
    let tol = Tolerances::uniform(1e-11).unwrap();
    let mut worst_zc = 0.0_f64;
    let mut worst_drift = 0.0_f64;
    let mut control = 0.0_f64;
    for &b in &[0.0, 0.5, 1.0] {
        let combo = BesselCombo::new(b, 0.5).unwrap();
        let fam = IsoFamily::with_defaults(combo).unwrap();
        worst_zc = worst_zc.max(zero_curvature_residual(&fam, &zs, &ts).unwrap_or(f64::INFINITY));
        worst_drift = worst_drift.max(isomonodromy_drift(&fam, &t_list, DRIFT_RADIUS, &tol).unwrap_or(f64::INFINITY));
        let reducible = IsoFamily::new(combo, 1.0, 0.0, 1.0).unwrap();
        control = control
            .max(zero_curvature_residual(&reducible, &zs, &ts).unwrap_or(f64::INFINITY))
            .max(isomonodromy_drift(&reducible, &t_list, DRIFT_RADIUS, &tol).unwrap_or(f64::INFINITY));
    }
    outcome(
        worst_zc < 1e-6 && worst_drift < 1e-5,
        format!(
            "C̃₁ = 1: residual {worst_zc:.3e}, drift {worst_drift:.3e}; reducible C̃₁ = 0 control: {control:.2e}"
        ),
    )
}

fn adjacency_chain() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for &w in &[1.0, 2.0] {
        let seed = match find_seed(1.0, w, (1e-6, 15.0), &tol()) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("ω = {w}: no seed ({e})")),
        };
        pass &= seed.residual < 1e-3;
        parts.push(format!("ω={w}: seed a₀={:.6} res {:.1e}", seed.a0, seed.residual));
        let pts = chain(&seed, 4, &tol()).unwrap();
        pass &= pts.len() == 4;
        for p in &pts {
            pass &= p.verify_residual < 1e-3;
            parts.push(format!("k{} ({:.4}, {:.4}) res {:.2e}", p.k, p.a_star, p.omega_star, p.verify_residual));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(600);
    parts.push(format!("{:.1} s", elapsed.as_secs_f64()));
    outcome(pass, parts.join("; "))
}

fn boundary_criterion() -> Outcome {
    let w = 2.0;
    let a_samples = [1.0, 3.0, 5.0];
    let mut worst = 0.0_f64;
    let mut count = 0;
    for &(r, side, n) in &[(0u32, Side::Plus, 3usize), (1, Side::Minus, 4), (1, Side::Plus, 3)] {
        let a = &[0.5, 1.0, 3.0, 5.0][4 - n..];
        let curve = trace_boundary(r, side, a, w, &tol()).unwrap();
        for &(a, b) in &curve.samples {
            let d = eig_discriminant(&JosephsonParams::new(b, a, w).unwrap(), &tol()).unwrap();
            worst = worst.max(d.norm());
            count += 1;
        }
    }
    // Controls at a = 3: the middle of the r = 1 tongue, and the gap between
    // the r = 0 and r = 1 tongues.
    let a = a_samples[1];
    let lo = boundary_point(1, Side::Minus, a, w, &tol()).unwrap();
    let hi = boundary_point(1, Side::Plus, a, w, &tol()).unwrap();
    let below = boundary_point(0, Side::Plus, a, w, &tol()).unwrap();
    let (bl, bh) = (lo.min(hi), lo.max(hi));
    let inside = eig_discriminant(&JosephsonParams::new(0.5 * (bl + bh), a, w).unwrap(), &tol()).unwrap().norm();
    let off_b = 0.5 * (below.max(0.0) + bl);
    let off = eig_discriminant(&JosephsonParams::new(off_b, a, w).unwrap(), &tol()).unwrap().norm();
    outcome(
        count == 10 && worst < 1e-2 && inside >= 0.1 && off >= 0.1,
        format!("{count} points, max |tr²M − 4 det M| = {worst:.2e}; controls inside {inside:.3}, off {off:.3}"),
    )
}

fn bessel_asymptotics() -> Outcome {
    let w = 2.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for r in 0..=1u32 {
        let mut scaled = Vec::new();
        for &a in &[20.0, 40.0, 60.0] {
            let g = boundary_point(r, Side::Minus, a, w, &tol()).unwrap();
            let j = bessel_pair(r as f64, a).unwrap().j;
            scaled.push((g - r as f64 - j / w).abs() * a.sqrt());
        }
        let bounded = scaled.iter().all(|v| *v < 1.0);
        let monotone = scaled.windows(2).all(|p| p[1] <= p[0]);
        pass &= bounded && monotone;
        parts.push(format!(
            "r={r}: {:.3e}, {:.3e}, {:.3e}{}",
            scaled[0],
            scaled[1],
            scaled[2],
            if monotone { "" } else { " (not non-increasing)" }
        ));
    }
    outcome(pass, parts.join("; "))
}

/// Power series of `J₀`, accurate to ~1e−13 for `x < 10`.
fn j0_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn specfun_base() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    let mut wr = 0.0_f64;
    let mut rec = 0.0_f64;
    for _ in 0..200 {
        let nu = rng.gen_range(1.0..49.0);
        let s = rng.gen_range(0.1..100.0);
        let p = bessel_pair(nu, s).unwrap();
        let w = 2.0 / (PI * s);
        wr = wr.max(((p.j * p.yp - p.jp * p.y) - w).abs() / w);
        let (m, n) = (bessel_pair(nu - 1.0, s).unwrap(), bessel_pair(nu + 1.0, s).unwrap());
        let scale_j = m.j.abs().max(n.j.abs()).max(p.j.abs());
        let scale_y = m.y.abs().max(n.y.abs()).max(p.y.abs());
        rec = rec
            .max((m.j + n.j - 2.0 * nu / s * p.j).abs() / scale_j)
            .max((m.y + n.y - 2.0 * nu / s * p.y).abs() / scale_y);
    }
    let oracle = [
        bisect(j0_series, 2.0, 3.0),
        bisect(j0_series, 5.0, 6.0),
        bisect(j0_series, 8.0, 9.0),
    ];
    let zeros = find_zeros(&BesselCombo::new(0.0, 0.0).unwrap(), (0.1, 10.0), 3).unwrap();
    let zgap = zeros
        .zeros
        .iter()
        .zip(oracle.iter())
        .map(|(z, o)| (z - o).abs())
        .fold(0.0, f64::max);
    outcome(
        wr < 1e-9 && rec < 1e-9 && zeros.len() == 3 && zgap < 1e-5,
        format!("Wronskian {wr:.2e}, recurrence {rec:.2e}, J₀ zeros {zgap:.2e} from series oracle"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 Liouville", liouville),
        ("2 Euler limit", euler_limit),
        ("3 cot solution", cot_solution),
        ("4 pole residues", pole_residues),
        ("5 rotation axis and symmetries", axis_and_symmetries),
        ("6 zero curvature", zero_curvature),
        ("7 adjacency chain", adjacency_chain),
        ("8 boundary criterion", boundary_criterion),
        ("9 boundary asymptotics", bessel_asymptotics),
        ("10 special functions", specfun_base),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

