//! End-to-end run pipeline: simulate, stream the diagnostics CSV, assemble
//! the summary JSON with its invariant monitors.

use std::cell::RefCell;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::asymptotics::{
    convergence_report, oscillation_check, stability_experiment, theta_infinity,
    theta_infinity_displayed, AsymptoticsReport, GammaTrace, OscillationCheck, StabilityRow,
};
use crate::basis::Basis;
use crate::config::RunConfig;
use crate::diagnostics::{DiagnosticsRecord, CSV_COLUMNS};
use crate::dynamics::{make_initial, simulate, SimState};
use crate::error::{Result, SimError};

/// Formats a float with 17 significant digits (lossless binary64
/// round-trip), the fixed format of the CSV output.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalNorms {
    pub t: f64,
    pub u_h_norm: f64,
    pub u_l2: f64,
    pub v_l2: f64,
    pub theta_mean: f64,
    pub theta_l2_dist_to_mean: f64,
    pub min_theta: f64,
    pub max_theta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaInfinityPair {
    /// Conserved-energy form, with `(2 mu + lambda)/2` on the divergence term.
    pub conserved: f64,
    /// Plain `1/2` weighting on that term, reported side by side.
    pub displayed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: RunConfig,
    pub final_state: FinalNorms,
    pub theta_infinity: ThetaInfinityPair,
    pub asymptotics: AsymptoticsReport,
    pub invariants: Vec<InvariantCheck>,
    pub all_invariants_passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<Vec<StabilityRow>>,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub summary: Summary,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

fn resolve(path: &Option<String>, default: &str, out_dir: Option<&Path>) -> PathBuf {
    let p = PathBuf::from(path.as_deref().unwrap_or(default));
    match out_dir {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}

/// Executes a configured run: streams one CSV row per sample, then writes
/// the summary JSON. Output is byte-identical across repeated runs of the
/// same config on the same build.
pub fn run(config: &RunConfig, out_dir: Option<&Path>) -> Result<RunArtifacts> {
    config.validate()?;
    let csv_path = resolve(&config.run.csv_path, "run.csv", out_dir);
    let summary_path = resolve(&config.run.summary_path, "summary.json", out_dir);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    for p in [&csv_path, &summary_path] {
        if let Some(parent) = p.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
    }

    let basis = Basis::new(&config.domain);
    let initial = make_initial(&basis, &config.initial)?;
    let theta_inf = theta_infinity(&initial, &config.params);
    let theta_inf_displayed = theta_infinity_displayed(&initial);

    let mut csv = BufWriter::new(File::create(&csv_path)?);
    writeln!(csv, "{}", CSV_COLUMNS.join(","))?;

    let records: RefCell<Vec<DiagnosticsRecord>> = RefCell::new(Vec::new());
    let trace: RefCell<GammaTrace> = RefCell::new(GammaTrace::new(&config.domain));
    let csv_cell = RefCell::new(csv);
    let io_error: RefCell<Option<std::io::Error>> = RefCell::new(None);

    let final_state = simulate(
        &basis,
        &initial,
        &config.params,
        &config.stepper,
        config.run.t_end,
        |s: &SimState| {
            let rec = DiagnosticsRecord::compute(&basis, s, &config.params)
                .expect("accepted states have strictly positive temperature");
            let row = rec
                .values()
                .iter()
                .map(|v| fmt_f64(*v))
                .collect::<Vec<_>>()
                .join(",");
            if let Err(e) = writeln!(csv_cell.borrow_mut(), "{row}") {
                io_error.borrow_mut().get_or_insert(e);
            }
            trace.borrow_mut().push(s);
            records.borrow_mut().push(rec);
        },
    )?;
    csv_cell.into_inner().flush()?;
    if let Some(e) = io_error.into_inner() {
        return Err(SimError::Io(e));
    }
    let records = records.into_inner();
    let trace = trace.into_inner();

    let initial_norm = (initial.u.l2_norm_sq() + initial.v.l2_norm_sq()).sqrt();
    let oscillation: Option<OscillationCheck> =
        match oscillation_check(&trace, &config.params, initial_norm) {
            Ok(check) => Some(check),
            Err(SimError::InsufficientSamples { .. }) => None,
            Err(e) => return Err(e),
        };

    let report = convergence_report(
        &records,
        config.domain.area(),
        theta_inf,
        theta_inf_displayed,
        oscillation.as_ref(),
    )?;
    let (invariants, all_passed) = monitors(&records, config, theta_inf);

    let stability = match &config.stability {
        Some(section) => Some(stability_experiment(
            &basis,
            &config.initial,
            &config.params,
            &config.stepper,
            &section.deltas,
            config.run.t_end,
        )?),
        None => None,
    };

    let theta_samples = basis.samples(&final_state.theta);
    let (min_theta, max_theta) = theta_samples.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY),
        |(lo, hi), &v| (lo.min(v), hi.max(v)),
    );
    let summary = Summary {
        config: config.clone(),
        final_state: FinalNorms {
            t: final_state.t,
            u_h_norm: final_state.u.h_norm(),
            u_l2: final_state.u.l2_norm(),
            v_l2: final_state.v.l2_norm(),
            theta_mean: final_state.theta.mean(),
            theta_l2_dist_to_mean: final_state.theta.l2_dist_to_mean_sq().max(0.0).sqrt(),
            min_theta,
            max_theta,
        },
        theta_infinity: ThetaInfinityPair {
            conserved: theta_inf,
            displayed: theta_inf_displayed,
        },
        asymptotics: report,
        invariants,
        all_invariants_passed: all_passed,
        stability,
    };

    let mut out = BufWriter::new(File::create(&summary_path)?);
    serde_json::to_writer_pretty(&mut out, &summary)
        .map_err(|e| SimError::Config(format!("summary serialization: {e}")))?;
    writeln!(out)?;
    out.flush()?;

    Ok(RunArtifacts {
        summary,
        csv_path,
        summary_path,
    })
}

/// Pass/fail of each monitored invariant over a completed record series.
fn monitors(
    records: &[DiagnosticsRecord],
    config: &RunConfig,
    theta_inf: f64,
) -> (Vec<InvariantCheck>, bool) {
    let first = &records[0];
    let last = records.last().expect("non-empty record series");
    let mut checks = Vec::new();

    let e0 = first.energy_total;
    let drift = records
        .iter()
        .map(|r| (r.energy_total - e0).abs())
        .fold(0.0f64, f64::max)
        / e0.abs().max(f64::MIN_POSITIVE);
    checks.push(InvariantCheck {
        name: "energy_conservation",
        passed: drift <= 1e-6,
        value: drift,
        threshold: 1e-6,
    });

    // Entropy may only decrease by the per-interval integration slack.
    let dt = config.stepper.dt;
    let mut worst_decrease = 0.0f64;
    let mut worst_slack = 0.0f64;
    let mut entropy_ok = true;
    for w in records.windows(2) {
        let interval = (w[1].t - w[0].t).max(0.0);
        let slack = 1e-2 * dt * interval * w[0].entropy.abs().max(1.0);
        let decrease = w[0].entropy - w[1].entropy;
        worst_decrease = worst_decrease.max(decrease);
        worst_slack = worst_slack.max(slack);
        if decrease > slack {
            entropy_ok = false;
        }
    }
    checks.push(InvariantCheck {
        name: "entropy_nondecreasing",
        passed: entropy_ok,
        value: worst_decrease,
        threshold: worst_slack,
    });

    let f0 = first.fisher_f;
    let fisher_max = records.iter().map(|r| r.fisher_f).fold(0.0f64, f64::max);
    let fisher_bound = f0 * (1.0 + 1e-6);
    checks.push(InvariantCheck {
        name: "fisher_monotone",
        passed: fisher_max <= fisher_bound + 1e-300,
        value: fisher_max,
        threshold: fisher_bound,
    });

    let min_theta = records.iter().map(|r| r.min_theta).fold(f64::INFINITY, f64::min);
    checks.push(InvariantCheck {
        name: "min_theta_positive",
        passed: min_theta > 0.0,
        value: min_theta,
        threshold: 0.0,
    });

    let max_theta = records
        .iter()
        .map(|r| r.max_theta)
        .fold(f64::NEG_INFINITY, f64::max);
    let theta_bound = 2.0 * first.max_theta + theta_inf;
    checks.push(InvariantCheck {
        name: "max_theta_bounded",
        passed: max_theta <= theta_bound,
        value: max_theta,
        threshold: theta_bound,
    });

    let g_max = records
        .iter()
        .map(|r| r.gamma_energy)
        .fold(f64::NEG_INFINITY, f64::max);
    let g_min = records.iter().map(|r| r.gamma_energy).fold(f64::INFINITY, f64::min);
    let spread = if g_max.abs() > 0.0 {
        (g_max - g_min) / g_max.abs()
    } else {
        0.0
    };
    checks.push(InvariantCheck {
        name: "gamma_energy_constant",
        passed: spread <= 1e-10,
        value: spread,
        threshold: 1e-10,
    });

    let area = config.domain.area();
    let mean_final = last.theta_mass / area;
    let residual_chi = (last.chi_kinetic + last.chi_potential) / area;
    checks.push(InvariantCheck {
        name: "theta_infinity_consistency",
        passed: (mean_final - theta_inf).abs() <= residual_chi + 1e-8,
        value: (mean_final - theta_inf).abs(),
        threshold: residual_chi + 1e-8,
    });

    let all = checks.iter().all(|c| c.passed);
    (checks, all)
}
