mod args;
mod output;

use anyhow::Result;
use args::{Cli, Command, Common};
use clap::Parser;
use josephson::adjacency::{chain, find_seed, verify_point, AdjacencySeed};
use josephson::lax::{isomonodromy_drift, zero_curvature_residual, IsoFamily};
use josephson::linalg::C64;
use josephson::monodromy::monodromy_loop;
use josephson::odeint::Tolerances;
use josephson::painleve::{bessel_w, p3_residual, p3_tilde_residual, pole_residue};
use josephson::rotation::{rotation_number, scan_grid, trace_boundary, JosephsonParams, DEFAULT_MAX_PERIODS};
use josephson::specfun::BesselCombo;
use josephson::Error;
use output::{Artifact, Cell};
use std::process::ExitCode;
use std::time::Instant;

const USAGE: u8 = 2;
const NUMERICAL: u8 = 3;
const NOT_FOUND: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidInput(_) | Error::Domain(_) | Error::UnsupportedOrder(_) | Error::RadiusTooSmall(_)) => USAGE,
        Some(Error::NoAdjacency(..)) => NOT_FOUND,
        Some(_) => NUMERICAL,
        None => NUMERICAL,
    }
}

fn tolerances(common: &Common) -> Result<Tolerances> {
    Ok(Tolerances::uniform(common.tol)?)
}

fn scan_columns() -> Vec<&'static str> {
    vec!["b", "a", "omega", "rho", "err"]
}

fn run(cmd: Command) -> Result<(Artifact, Common)> {
    Ok(match cmd {
        Command::Rotnum { point, common } => {
            let tol = tolerances(&common)?;
            let p = JosephsonParams::new(point.b, point.a, point.omega)?;
            let est = rotation_number(&p, DEFAULT_MAX_PERIODS, &tol)?;
            let mut art = Artifact::new("rotnum", scan_columns());
            art.meta("b", p.b).meta("a", p.a).meta("omega", p.omega);
            art.meta("max_periods", DEFAULT_MAX_PERIODS).meta("periods_used", est.periods_used);
            art.meta("converged", est.converged);
            art.push(vec![p.b.into(), p.a.into(), p.omega.into(), est.rho.into(), est.error_estimate.into()]);
            (art, common)
        }
        Command::Scan { grid_b, grid_a, omega, common } => {
            let tol = tolerances(&common)?;
            let g = scan_grid((grid_b.lo, grid_b.hi), (grid_a.lo, grid_a.hi), (grid_b.n, grid_a.n), omega, &tol)?;
            let mut art = Artifact::new("scan", scan_columns());
            art.meta("grid_b", grid_b).meta("grid_a", grid_a).meta("omega", omega);
            art.meta("max_periods", DEFAULT_MAX_PERIODS);
            for (ia, row) in g.rho_values.iter().enumerate() {
                for (jb, cell) in row.iter().enumerate() {
                    art.push(vec![
                        g.b_axis[jb].into(),
                        g.a_axis[ia].into(),
                        omega.into(),
                        cell.rho.into(),
                        cell.error_estimate.into(),
                    ]);
                }
            }
            (art, common)
        }
        Command::Boundary { r, side, grid_a, omega, common } => {
            let tol = tolerances(&common)?;
            let curve = trace_boundary(r, side, &grid_a.points(), omega, &tol)?;
            let mut art = Artifact::new("boundary", vec!["r", "side", "a", "b"]);
            art.meta("r", r).meta("side", side).meta("grid_a", grid_a).meta("omega", omega);
            let missing: Vec<String> = curve.missing.iter().map(|a| output::fmt_num(*a)).collect();
            art.meta("missing_a", format!("[{}]", missing.join(" ")));
            for &(a, b) in &curve.samples {
                art.push(vec![r.into(), side.to_string().into(), a.into(), b.into()]);
            }
            (art, common)
        }
        Command::Monodromy { point, radius, common } => {
            let tol = tolerances(&common)?;
            let p = JosephsonParams::new(point.b, point.a, point.omega)?;
            let m = monodromy_loop(&p, radius, &tol)?;
            let mut art = Artifact::new(
                "monodromy",
                vec![
                    "b", "a", "omega", "m11_re", "m11_im", "m12_re", "m12_im", "m21_re", "m21_im", "m22_re", "m22_im",
                    "identity_residual", "det_residual", "disc_re", "disc_im",
                ],
            );
            art.meta("b", p.b).meta("a", p.a).meta("omega", p.omega).meta("radius", radius);
            let mut row: Vec<Cell> = vec![p.b.into(), p.a.into(), p.omega.into()];
            for i in 0..2 {
                for j in 0..2 {
                    let z: C64 = m.matrix.get(i, j);
                    row.push(z.re.into());
                    row.push(z.im.into());
                }
            }
            row.extend([
                m.identity_residual.into(),
                m.det_residual.into(),
                m.eig_discriminant.re.into(),
                m.eig_discriminant.im.into(),
            ]);
            art.push(row);
            (art, common)
        }
        Command::AdjacencySeed { b, omega, a_range, common } => {
            let tol = tolerances(&common)?;
            let seed = find_seed(b, omega, (a_range.lo, a_range.hi), &tol)?;
            let mut art = Artifact::new("adjacency-seed", vec!["b", "a0", "omega0", "residual"]);
            art.meta("b", b).meta("omega", omega).meta("a_range", a_range);
            art.meta("scan_step", josephson::adjacency::SEED_SCAN_STEP);
            art.push(vec![seed.b.into(), seed.a0.into(), seed.omega0.into(), seed.residual.into()]);
            (art, common)
        }
        Command::AdjacencyChain { b, seed_a, seed_omega, k_max, common } => {
            let tol = tolerances(&common)?;
            let residual = verify_point(b, seed_a, seed_omega, &tol)?;
            let seed = AdjacencySeed { b, a0: seed_a, omega0: seed_omega, residual };
            let pts = chain(&seed, k_max, &tol)?;
            let mut art = Artifact::new("adjacency-chain", vec!["k", "a_star", "omega_star", "residual"]);
            art.meta("b", b).meta("seed_a", seed_a).meta("seed_omega", seed_omega).meta("k_max", k_max);
            art.meta("seed_residual", output::fmt_num(residual));
            for p in &pts {
                art.push(vec![p.k.into(), p.a_star.into(), p.omega_star.into(), p.verify_residual.into()]);
            }
            (art, common)
        }
        Command::PainleveVerify { b, y0, common } => {
            let sol = bessel_w(BesselCombo::new(b, y0)?)?;
            let mut art = Artifact::new("painleve-verify", vec!["quantity", "at", "value"]);
            art.meta("b", b).meta("y0", y0).meta("tau_range", "0.3:10");
            let taus: Vec<f64> = (0..=9700)
                .map(|i| 0.3 + i as f64 * 1e-3)
                .filter(|&t| sol.nearest_pole(t).is_none_or(|p| (t - p).abs() > 0.05))
                .collect();
            let r = p3_residual(|t| sol.jet(t), &sol.params(), &taus);
            art.push(vec!["p3_residual".into(), r.worst_tau.into(), r.max_residual.into()]);
            let ts: Vec<f64> = taus.iter().map(|t| t * t).collect();
            let rt = p3_tilde_residual(|t| sol.y_jet(t), b, &ts);
            art.push(vec!["p3_tilde_residual".into(), rt.worst_tau.into(), rt.max_residual.into()]);
            for &p in sol.poles.zeros.iter().take(3) {
                let res = pole_residue(&sol, p)?;
                art.push(vec!["pole_residue".into(), p.into(), res.value.into()]);
            }
            (art, common)
        }
        Command::LaxVerify { b, y0, c1, radius, common } => {
            let tol = tolerances(&common)?;
            let fam = IsoFamily::new(BesselCombo::new(b, y0)?, 1.0, c1, 1.0)?;
            let zs = [C64::new(0.5, 0.0), C64::new(1.0, 1.0), C64::new(0.0, 2.0)];
            let ts = [1.0, 2.5, 5.0];
            let t_list: Vec<f64> = (1..=10).map(f64::from).collect();
            let mut art = Artifact::new("lax-verify", vec!["quantity", "value"]);
            art.meta("b", b).meta("y0", y0).meta("c1", c1).meta("radius", radius);
            art.meta("b2_0", fam.b2_0).meta("t_ref", fam.t_ref).meta("t_list", "1:10:10");
            art.push(vec!["zero_curvature_residual".into(), zero_curvature_residual(&fam, &zs, &ts)?.into()]);
            art.push(vec!["isomonodromy_drift".into(), isomonodromy_drift(&fam, &t_list, radius, &tol)?.into()]);
            (art, common)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    let start = Instant::now();
    let result = run(cli.command).and_then(|(mut art, common)| {
        let tol = Tolerances::uniform(common.tol)?;
        art.meta("abs_tol", format!("{:e}", tol.abs_tol)).meta("rel_tol", format!("{:e}", tol.rel_tol));
        art.meta("max_steps", tol.max_steps).meta("format", common.format.name());
        art.meta("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
        art.write(common.format, common.out.as_deref())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
