//! Command execution and atomic artifact writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use remctl_core::bloch::{protocol_geometry_report, trajectory_csv};
use remctl_core::decoh::{attach_environment, decohering_control_unitary, measure_with_environment};
use remctl_core::protocol::{
    apply_control_unitary, kraus_branches, make_pair_real, measure_control, restricted_unitary, OutcomeSelection,
};
use remctl_core::reach::campaign::{format_table, run_campaign, summary_json, trials_csv, CampaignConfig};
use remctl_core::reach::coverage::{reachable_set_coverage, SphereGrid};
use remctl_core::reach::gates::{GateFamily, ParamRange};
use remctl_core::reach::SearchConfig;
use remctl_core::report::fmt_f64;
use remctl_core::{partial_trace, PureState, Subsystem, UnitaryGate, C};

use crate::config::{Command, ExperimentConfig, Format};
use crate::error::CliError;

/// Writes `contents` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// `out.csv` → `out.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

pub fn execute(cfg: &ExperimentConfig) -> Result<(), CliError> {
    match cfg.command {
        Command::Campaign => campaign(cfg),
        Command::Reachability => reachability(cfg),
        Command::Geometry => geometry(cfg),
        Command::DecoherenceDemo => decoherence_demo(cfg),
        Command::KrausDemo => kraus_demo(cfg),
    }
}

fn out_path(cfg: &ExperimentConfig) -> Result<&Path, CliError> {
    cfg.output_path
        .as_deref()
        .ok_or_else(|| CliError::Usage("missing output path: pass --out".into()))
}

fn campaign(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let grid = cfg.grid[0];
    let cc = CampaignConfig {
        n_pairs: cfg.n_pairs,
        final_times: cfg.final_times.clone(),
        epsilon: cfg.epsilon,
        master_seed: cfg.master_seed,
        search: SearchConfig {
            grid,
            simplex_fraction: 1.0 / grid as f64,
            ..SearchConfig::default()
        },
        accounting: cfg.accounting,
        parallelism: cfg.parallelism,
    };
    let outcome = run_campaign(&cc)?;
    let out = out_path(cfg)?;
    let json = summary_json(&outcome.summary);
    match cfg.output_format {
        Format::Csv => {
            write_atomic(out, &trials_csv(&outcome.records))?;
            write_atomic(&sibling(out, "summary.json"), &json)?;
        }
        Format::Json => write_atomic(out, &json)?,
    }
    println!(
        "{} pairs x {} final times, epsilon {}, seed {}, accounting {}",
        cfg.n_pairs,
        cfg.final_times.len(),
        cfg.epsilon,
        cfg.master_seed,
        cfg.accounting.as_str()
    );
    print!("{}", format_table(&outcome.summary));
    Ok(())
}

fn reachability(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let grid = SphereGrid::new(cfg.grid[0], cfg.grid[1]);
    let sweep = cfg.grid.get(2).copied().unwrap_or(512);
    let plus = PureState::from_reals(&[1.0, 1.0])?;
    let tau = 2.0 * std::f64::consts::PI;
    let families = [
        ("restricted", GateFamily::restricted()),
        (
            "full-rotation",
            GateFamily::restricted().with_ranges([
                ParamRange::closed(0.0, std::f64::consts::PI),
                ParamRange::half_open(0.0, tau),
            ]),
        ),
    ];
    let mut csv = String::from("family,mode,bands,azimuths,sweep,coverage\n");
    println!(
        "equator initial state |+>, {}x{} equal-area cells, {sweep}x{sweep} parameter sweep",
        grid.bands, grid.azimuths
    );
    for (name, fam) in &families {
        for (mode, kraus) in [("unitary", false), ("kraus", true)] {
            let f = reachable_set_coverage(&plus, fam, kraus, grid, sweep);
            println!("{name:<14} {mode:<8} coverage {f:.4}");
            writeln!(
                csv,
                "{name},{mode},{},{},{sweep},{}",
                grid.bands,
                grid.azimuths,
                fmt_f64(f)
            )
            .expect("string write");
        }
    }
    if let Some(out) = &cfg.output_path {
        write_atomic(out, &csv)?;
    }
    Ok(())
}

fn geometry(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let coeffs: Vec<C<f64>> = cfg.coeffs.iter().map(|&x| C::new(x, 0.0)).collect();
    let u = restricted_unitary(cfg.theta, cfg.phi);
    let report = protocol_geometry_report(&coeffs, &u)?;
    let out = out_path(cfg)?;
    write_atomic(out, &trajectory_csv(&report.trajectory()))?;
    let mut angles = String::from("relation,lhs,rhs,residual\n");
    for (name, l, r) in report.angles.residuals() {
        writeln!(angles, "{name},{},{},{}", fmt_f64(l), fmt_f64(r), fmt_f64(l - r)).expect("string write");
    }
    write_atomic(&sibling(out, "angles.csv"), &angles)?;
    for b in &report.branches {
        println!(
            "branch {} = outcome {} with probability {:.6}",
            b.label, b.outcome, b.probability
        );
    }
    for (name, l, r) in report.angles.residuals() {
        println!("{name:<32} {l:.12} {r:.12} residual {:.1e}", (l - r).abs());
    }
    println!("max residual {:.1e}", report.angles.max_residual());
    Ok(())
}

fn decoherence_demo(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let pair = make_pair_real(&cfg.coeffs)?;
    let n = pair.dim();
    let u = if n == 2 {
        restricted_unitary(cfg.theta, cfg.phi)
    } else {
        UnitaryGate::identity(n)
    };
    let clean = apply_control_unitary(&pair, &u)?;
    let noisy = decohering_control_unitary(&attach_environment(&pair, n)?, &u)?;
    println!("outcome  P(clean)        P(environment)  target distance");
    for m in 0..n {
        match (
            measure_control(&clean, OutcomeSelection::Fixed(m)),
            measure_with_environment(&noisy, m),
        ) {
            (Ok(o), Ok((t, p))) => println!(
                "{m:<8} {:<15.12} {:<15.12} {:.1e}",
                o.probability,
                p,
                o.target_state.distance_up_to_phase(&t)
            ),
            _ => println!("{m:<8} (zero-probability branch)"),
        }
    }
    let c0 = partial_trace(&clean, Subsystem::B);
    let c1 = noisy.reduced_control();
    println!(
        "control coherence |rho_01|: clean {:.6}, with environment {:.6}",
        c0.get(0, 1).norm(),
        c1.get(0, 1).norm()
    );
    Ok(())
}

fn kraus_demo(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let pair = make_pair_real(&cfg.coeffs)?;
    if pair.dim() != 2 {
        return Err(CliError::Usage("kraus-demo needs two coeffs".into()));
    }
    let h = UnitaryGate::hadamard();
    for b in kraus_branches(&h, &pair)? {
        let d = b.diagonal();
        let (name, sign) = if (d[1] - d[0]).norm() < 1e-15 {
            ("I", 1.0)
        } else {
            ("Z", -1.0)
        };
        let scale = d[0].re;
        let residual = (d[0] - scale).norm().max((d[1] - sign * scale).norm());
        println!(
            "branch {}: diag({}, {}) = {} * {name}  (residual {residual:.1e}, probability {:.6})",
            b.index + 1,
            fmt_c(d[0]),
            fmt_c(d[1]),
            fmt_f64(scale),
            b.probability
        );
    }
    Ok(())
}

fn fmt_c(z: C<f64>) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}
