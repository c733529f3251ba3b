//! The three subcommands: `run`, `check-invariants`, `convergence`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use css2d_core::{
    dealias, evolve, hs_norm, make_initial_data, picard_run, resample, ComplexField,
    ConservedSeries, DyadicLadder, Error, GaugePotential, Grid2D, ParaproductPlan,
    PicardReport, Result, Trajectory,
};

use crate::config::SimConfig;

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_metrics(dir: &Path, series: &ConservedSeries) -> Result<PathBuf> {
    let path = dir.join("metrics.csv");
    let mut f = fs::File::create(&path)?;
    writeln!(f, "{}", ConservedSeries::CSV_HEADER)?;
    for i in 0..series.len() {
        writeln!(f, "{}", series.csv_row(i))?;
    }
    Ok(path)
}

fn write_field_snapshots(dir: &Path, traj: &Trajectory) -> Result<usize> {
    for (i, (t, field)) in traj.times.iter().zip(&traj.fields).enumerate() {
        let base = dir.join(format!("phi_{i:06}"));
        css2d_core::io::write_snapshot(&base, field, *t, "phi")?;
    }
    if let (Some(t), Some(gauge)) = (traj.times.last(), traj.gauges.last()) {
        write_gauge_snapshot(dir, gauge, *t)?;
    }
    Ok(traj.times.len())
}

fn write_gauge_snapshot(dir: &Path, gauge: &GaugePotential, t: f64) -> Result<()> {
    for (kind, field) in [
        ("ax1", &gauge.ax.v1),
        ("ax2", &gauge.ax.v2),
        ("a0", &gauge.a0),
    ] {
        let base = dir.join(format!("{kind}_final"));
        css2d_core::io::write_snapshot(&base, &field.as_complex(), t, kind)?;
    }
    Ok(())
}

/// `run --config <path>`: evolve or Picard-iterate per the config and write
/// metrics, snapshots, and reports into the output directory.
pub fn run(cfg: &SimConfig) -> Result<()> {
    let grid = cfg.grid()?;
    let outdir = PathBuf::from(cfg.output_dir());
    ensure_dir(&outdir)?;
    let phi0 = make_initial_data(grid, &cfg.data_kind()?)?;

    match cfg.run.driver.as_str() {
        "evolve" => {
            let traj = evolve(&phi0, cfg.stepper.t_end, &cfg.stepper()?, &cfg.run_options())?;
            let metrics = write_metrics(&outdir, &traj.series)?;
            let count = write_field_snapshots(&outdir, &traj)?;
            println!(
                "run complete: {} steps, {} snapshots, metrics at {}",
                traj.series.len() - 1,
                count,
                metrics.display()
            );
            println!(
                "final: mass {:.6e}, energy {:.6e}, cert sup {:.3e}, grad budget {:.3e}",
                traj.series.mass.last().unwrap(),
                traj.series.energy.last().unwrap(),
                traj.cert.sup_norm,
                traj.cert.grad_l1linf
            );
        }
        "picard" => {
            let report = picard_run(&phi0, &cfg.picard_config()?)?;
            let path = outdir.join("picard.csv");
            let mut f = fs::File::create(&path)?;
            writeln!(f, "{}", PicardReport::CSV_HEADER)?;
            for row in report.csv_rows() {
                writeln!(f, "{row}")?;
            }
            let stride = cfg.run.snapshot_stride;
            let mut written = 0;
            for (i, (t, field)) in report.times.iter().zip(&report.final_fields).enumerate() {
                if i % stride != 0 {
                    continue;
                }
                let base = outdir.join(format!("phi_{i:06}"));
                css2d_core::io::write_snapshot(&base, field, *t, "phi")?;
                written += 1;
            }
            println!(
                "picard complete: T = {:.3e}, {} outer diffs, converged = {}, {} snapshots, report at {}",
                report.t_end,
                report.diffs.len(),
                report.converged,
                written,
                path.display()
            );
            if !report.converged {
                eprintln!("warning: outer iteration did not reach tol_outer");
            }
        }
        other => {
            return Err(Error::InvalidConfig(format!("unknown driver {other:?}")));
        }
    }
    Ok(())
}

struct InvariantReport {
    failures: usize,
}

impl InvariantReport {
    fn item(&mut self, name: &str, pass: bool, details: String) {
        if pass {
            println!("  ok   {name}: {details}");
        } else {
            println!("  FAIL {name}: {details}");
            self.failures += 1;
        }
    }
}

/// `check-invariants [--config <path>]`: run the property suite and return
/// the number of failed items.
pub fn check_invariants(cfg: &SimConfig) -> Result<usize> {
    let grid = cfg.grid()?;
    let mut report = InvariantReport { failures: 0 };

    // Transform round trip on the configured data.
    let phi0 = make_initial_data(grid, &cfg.data_kind()?)?;
    let back = css2d_core::to_physical(&css2d_core::to_spectral(&phi0));
    let rt_err = back
        .samples()
        .iter()
        .zip(phi0.samples())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / phi0.linf_norm().max(f64::MIN_POSITIVE);
    report.item("transform round trip", rt_err <= 1e-13, format!("relative error {rt_err:.3e}"));

    // Parseval.
    let phys = phi0.l2_norm().powi(2);
    let spec = css2d_core::to_spectral(&phi0).l2_norm_sqr();
    let parseval = (phys - spec).abs() / phys.max(f64::MIN_POSITIVE);
    report.item("Parseval consistency", parseval <= 1e-12, format!("relative error {parseval:.3e}"));

    // Partition of unity over the ladder.
    let ladder = DyadicLadder::new(grid);
    let mut worst: f64 = 0.0;
    for i in 0..grid.points() {
        let total: f64 = ladder
            .bands()
            .iter()
            .map(|&l| ladder.band_multiplier(l).unwrap()[i])
            .sum();
        worst = worst.max((total - 1.0).abs());
    }
    report.item("Littlewood-Paley partition of unity", worst <= 1e-14, format!("max deviation {worst:.3e}"));

    // Paraproduct partition identity on the configured data.
    let plan = ParaproductPlan::new(grid);
    let gauge = GaugePotential::slave(&phi0)?;
    let w = dealias(&phi0);
    let resid = plan.partition_residual(&gauge.ax, &w)?;
    report.item("paraproduct partition identity", resid <= 1e-11, format!("relative residual {resid:.3e}"));

    // Gauge constraints.
    let ax_scale = gauge.ax.linf_norm().max(1e-12);
    let div = gauge.div_residual();
    report.item("Coulomb constraint", div <= 1e-12 * ax_scale, format!("div residual {div:.3e} (scale {ax_scale:.3e})"));
    let rho_scale = phi0.abs_sqr().linf_norm().max(1e-12);
    let curl = gauge.curl_residual(&phi0);
    report.item("curl constraint (mean-corrected)", curl <= 1e-11 * rho_scale, format!("curl residual {curl:.3e} (scale {rho_scale:.3e})"));

    // Short conservation run.
    let mut stepper = cfg.stepper()?;
    stepper.dt = stepper.dt.min(2e-3);
    let t_end = (50.0 * stepper.dt).min(cfg.stepper.t_end.max(stepper.dt));
    let opts = cfg.run_options();
    let traj = evolve(&phi0, t_end, &stepper, &opts)?;
    let dm = ConservedSeries::relative_drift(&traj.series.mass);
    let de = ConservedSeries::relative_drift(&traj.series.energy);
    report.item(
        "short-run conservation",
        dm <= 1e-8 && de <= 1e-5,
        format!("mass drift {dm:.3e}, energy drift {de:.3e} over T = {t_end:.3}"),
    );

    Ok(report.failures)
}

/// `convergence --config <path> --levels k`: dt self-convergence plus a
/// spatial refinement check against a finer-grid reference.
pub fn convergence(cfg: &SimConfig, levels: usize) -> Result<()> {
    if levels < 3 {
        return Err(Error::InvalidConfig("convergence needs --levels >= 3".into()));
    }
    let grid = cfg.grid()?;
    let stepper = cfg.stepper()?;
    let opts = css2d_core::RunOptions {
        snapshot_stride: usize::MAX / 2,
        ..cfg.run_options()
    };
    let phi0 = make_initial_data(grid, &cfg.data_kind()?)?;
    let t_end = cfg.stepper.t_end;

    // dt ladder: final fields at dt, dt/2, dt/4, ...
    let mut finals = Vec::new();
    let mut dts = Vec::new();
    for level in 0..levels {
        let dt = stepper.dt / 2f64.powi(level as i32);
        let cfg_l = css2d_core::StepperConfig { dt, ..stepper };
        let traj = evolve(&phi0, t_end, &cfg_l, &opts)?;
        finals.push(traj.fields.last().unwrap().clone());
        dts.push(dt);
    }
    println!("dt self-convergence at T = {t_end}:");
    let mut diffs = Vec::new();
    for i in 0..levels - 1 {
        let d = finals[i].sub(&finals[i + 1])?.l2_norm();
        diffs.push(d);
        println!("  |u(dt={:.2e}) - u(dt={:.2e})|_L2 = {d:.6e}", dts[i], dts[i + 1]);
    }
    for i in 0..diffs.len() - 1 {
        let order = (diffs[i] / diffs[i + 1]).log2();
        println!("  measured dt-order: {order:.3}");
    }

    // Spatial refinement: coarse and mid grids against a finer reference.
    let n = grid.n();
    let fine_n = n * 2;
    let ladder_ref = DyadicLadder::new(Grid2D::new(fine_n, grid.len_side())?);
    let run_at = |m: usize| -> Result<ComplexField> {
        let g = Grid2D::new(m, grid.len_side())?;
        let data = make_initial_data(g, &cfg.data_kind()?)?;
        let traj = evolve(&data, t_end, &stepper, &opts)?;
        Ok(traj.fields.last().unwrap().clone())
    };
    let reference = run_at(fine_n)?;
    println!("spatial refinement against n = {fine_n}:");
    let mut spatial_errors = Vec::new();
    for m in [n / 2, n] {
        let coarse = run_at(m)?;
        let err = hs_norm(
            &ladder_ref,
            &resample(&coarse, fine_n)?.sub(&reference)?,
            0.0,
        )?;
        spatial_errors.push(err);
        println!("  n = {m}: reference distance {err:.6e}");
    }
    if spatial_errors[1] > 0.0 {
        println!(
            "  spectral error drop n={} -> n={}: {:.3e}x",
            n / 2,
            n,
            spatial_errors[0] / spatial_errors[1]
        );
    }
    Ok(())
}
