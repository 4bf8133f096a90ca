//! Command implementations. Each builds its outputs fully in memory and
//! returns (relative name, bytes) pairs; `execute` then writes them,
//! digests them, and drops the manifest alongside. Nothing touches the
//! output directory until a command has succeeded.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fwl_core::cylinder::{
    analytic_trapping, classify_trapping, escape_f00, hamiltonian_field, integrate_flow, phi_pm,
    radial_linearization, symbol_p, FlowTrajectory, PhasePoint, Sign, DEFAULT_ESCAPE_RADIUS,
};
use fwl_core::limitset::{box_dimension, sample_limit_set};
use fwl_core::weyl::{count_along_axis, default_t_grid, fit_exponent, planted_heights, table_from_heights, CountTable};
use fwl_core::zeta::{delta_from_zeta, find_zeros, LengthSpectrum, Rect, ZetaParams};

use crate::config::{GroupSpec, RunConfig, TGrid};
use crate::csvout;
use crate::error::CliError;
use crate::groups_io::{build_geometry, group_desc, group_hash, spectrum_for};
use crate::manifest::{digest, OutputRecord, RunManifest};
use crate::svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommandKind {
    Limitset,
    Dimension,
    Delta,
    Zeros,
    Count,
    Weyl,
    CylinderFlow,
    CylinderCheck,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Limitset => "limitset",
            CommandKind::Dimension => "dimension",
            CommandKind::Delta => "delta",
            CommandKind::Zeros => "zeros",
            CommandKind::Count => "count",
            CommandKind::Weyl => "weyl",
            CommandKind::CylinderFlow => "cylinder-flow",
            CommandKind::CylinderCheck => "cylinder-check",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "limitset" => CommandKind::Limitset,
            "dimension" => CommandKind::Dimension,
            "delta" => CommandKind::Delta,
            "zeros" => CommandKind::Zeros,
            "count" => CommandKind::Count,
            "weyl" => CommandKind::Weyl,
            "cylinder-flow" => CommandKind::CylinderFlow,
            "cylinder-check" => CommandKind::CylinderCheck,
            _ => return None,
        })
    }
}

type Outputs = Vec<(String, Vec<u8>)>;

/// Expansion parameters: group spectra truncate at the sampling word
/// length; the cylinder only needs enough weight to carry every line.
fn zeta_params(cfg: &RunConfig) -> ZetaParams {
    let k_max = cfg.k_max_or_default();
    let l = match cfg.group {
        Some(GroupSpec::Cylinder { .. }) => cfg.word_length.unwrap_or(k_max as usize + 1),
        _ => cfg.word_length_or_default(),
    };
    ZetaParams::new(k_max, l)
}

fn t_grid(cfg: &RunConfig, spec: Option<(&LengthSpectrum, &ZetaParams)>) -> Vec<f64> {
    match &cfg.t_values {
        Some(TGrid::List(v)) => v.clone(),
        Some(TGrid::Geometric { start, factor, max }) => {
            let mut ts = Vec::new();
            let mut t = *start;
            while t <= *max {
                ts.push(t);
                t *= factor;
            }
            ts
        }
        None => match spec {
            Some((s, p)) => default_t_grid(s, p),
            // planted fixtures: fixed geometric ladder to 300
            None => (0..12).map(|j| 5.0 * 1.45f64.powi(j)).collect(),
        },
    }
}

fn count_table(cfg: &RunConfig) -> Result<CountTable, CliError> {
    let radius = cfg.radius_or_default();
    match cfg.group_required()? {
        GroupSpec::Planted { alpha, t_max } => {
            let heights = planted_heights(*alpha, *t_max);
            let ts = t_grid(cfg, None);
            Ok(table_from_heights(&heights, radius, &ts))
        }
        _ => {
            let spectrum = spectrum_for(cfg)?;
            let params = zeta_params(cfg);
            let ts = t_grid(cfg, Some((&spectrum, &params)));
            Ok(count_along_axis(&spectrum, &params, radius, &ts)?)
        }
    }
}

fn run_limitset(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let spec = cfg.group_required()?;
    let sys = build_geometry(spec)?;
    let cloud = sample_limit_set(&sys, cfg.word_length_or_default())?;
    Ok(vec![
        ("points.csv".into(), csvout::points_csv(&cloud.points)),
        (
            "limitset.svg".into(),
            svg::scatter(&cloud.points, &group_desc(spec)),
        ),
    ])
}

fn run_dimension(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let spec = cfg.group_required()?;
    let sys = build_geometry(spec)?;
    let cloud = sample_limit_set(&sys, cfg.word_length_or_default())?;
    let s = cfg.scales_or_default();
    let est = box_dimension(&cloud, s.eps_min, s.eps_max, s.n)?;
    let report = serde_json::json!({
        "group": group_desc(spec),
        "word_length": cloud.word_length,
        "n_points": cloud.points.len(),
        "value": est.value,
        "stderr": est.stderr,
        "scales_used": est.scales_used,
        "counts": est.counts,
    });
    Ok(vec![(
        "dimension.json".into(),
        pretty_json(&report)?,
    )])
}

fn run_delta(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let spectrum = spectrum_for(cfg)?;
    let params = zeta_params(cfg);
    let est = delta_from_zeta(&spectrum, &params)?;
    let report = serde_json::json!({
        "group": group_desc(cfg.group_required()?),
        "word_length": spectrum.cutoff_word_length,
        "k_max": params.k_max,
        "value": est.value,
        "sensitivity": est.sensitivity,
    });
    Ok(vec![("delta.json".into(), pretty_json(&report)?)])
}

fn run_zeros(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let spectrum = spectrum_for(cfg)?;
    let params = zeta_params(cfg);
    let r = cfg.region_required()?;
    let region = Rect::new(r.re_min, r.re_max, r.im_min, r.im_max);
    let list = find_zeros(&region, &spectrum, &params)?;
    Ok(vec![("zeros.csv".into(), csvout::zeros_csv(&list))])
}

fn run_count(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let table = count_table(cfg)?;
    Ok(vec![("counts.csv".into(), csvout::counts_csv(&table))])
}

fn run_weyl(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let table = count_table(cfg)?;
    let fit = fit_exponent(&table);
    let report = serde_json::json!({
        "group": group_desc(cfg.group_required()?),
        "exponent": fit.exponent,
        "log_c": fit.log_c,
        "residual": fit.residual,
        "insufficient_data": fit.insufficient_data,
    });
    let (ts, counts): (Vec<f64>, Vec<f64>) = table
        .rows
        .iter()
        .filter(|row| row.count >= 1)
        .map(|row| (1.0 + row.t, row.count as f64))
        .unzip();
    let picture = svg::loglog(
        &ts,
        &counts,
        fit.exponent,
        fit.log_c,
        &format!("{} weyl fit", group_desc(cfg.group_required()?)),
    );
    Ok(vec![
        ("counts.csv".into(), csvout::counts_csv(&table)),
        ("fit.json".into(), pretty_json(&report)?),
        ("weyl.svg".into(), picture),
    ])
}

fn run_cylinder_flow(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let flow = cfg.flow_required()?;
    let trajs: Vec<FlowTrajectory> = flow
        .starts
        .par_iter()
        .map(|s| {
            integrate_flow(
                &PhasePoint::new(s.r, s.y, s.zeta, s.eta),
                flow.t_total,
                flow.dt,
            )
        })
        .collect();
    let mut outputs = Outputs::new();
    let mut summaries = Vec::new();
    let mut curves = Vec::new();
    for (i, (start, traj)) in flow.starts.iter().zip(&trajs).enumerate() {
        outputs.push((
            format!("trajectory_{i:03}.csv"),
            csvout::trajectory_csv(traj),
        ));
        summaries.push(serde_json::json!({
            "start": {"r": start.r, "y": start.y, "zeta": start.zeta, "eta": start.eta},
            "samples": traj.samples.len(),
            "escaped": traj.escaped,
            "energy_drift": traj.energy_drift,
        }));
        // decimate long trajectories for the picture
        let stride = (traj.samples.len() / 2000).max(1);
        curves.push(
            traj.samples
                .iter()
                .step_by(stride)
                .map(|(_, pt)| (pt.r, pt.zeta))
                .collect::<Vec<_>>(),
        );
    }
    outputs.push((
        "portrait.svg".into(),
        svg::portrait(&curves, "phase portrait (r, zeta)"),
    ));
    let report = serde_json::json!({
        "t_total": flow.t_total,
        "dt": flow.dt,
        "trajectories": summaries,
    });
    outputs.push(("flow_report.json".into(), pretty_json(&report)?));
    Ok(outputs)
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: serde_json::Value,
}

fn run_cylinder_check(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let spec = cfg.check.unwrap_or_default();
    let mut checks = Vec::new();

    // deterministic sample lattice over the chart (no RNG, reruns are
    // byte-identical)
    let n = (spec.samples as f64).powf(1.0 / 3.0).ceil() as usize;
    let lin = |lo: f64, hi: f64, i: usize, n: usize| {
        lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64
    };
    let mut max_field_residual = 0.0f64;
    let mut eta_violations = 0u64;
    let mut min_escape_gap = f64::INFINITY;
    let mut phi_violations = 0u64;
    let h = 1e-5;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let pt = PhasePoint::new(
                    lin(-0.95, 0.95, i, n),
                    0.3,
                    lin(-4.0, 4.0, j, n),
                    lin(-2.0, 2.0, k, n),
                );
                let (dr, dy, dzeta, deta) = hamiltonian_field(&pt);
                let pp = |r: f64, zeta: f64, eta: f64| {
                    symbol_p(&PhasePoint::new(r, pt.y, zeta, eta))
                };
                let g_zeta = (pp(pt.r, pt.zeta + h, pt.eta) - pp(pt.r, pt.zeta - h, pt.eta))
                    / (2.0 * h);
                let g_eta =
                    (pp(pt.r, pt.zeta, pt.eta + h) - pp(pt.r, pt.zeta, pt.eta - h)) / (2.0 * h);
                let g_r =
                    (pp(pt.r + h, pt.zeta, pt.eta) - pp(pt.r - h, pt.zeta, pt.eta)) / (2.0 * h);
                max_field_residual = max_field_residual
                    .max((dr - g_zeta).abs())
                    .max((dy - g_eta).abs())
                    .max((dzeta + g_r).abs());
                if deta != 0.0 {
                    eta_violations += 1;
                }
                let (_, d00) = escape_f00(&pt);
                min_escape_gap =
                    min_escape_gap.min(d00 - (pt.zeta * pt.zeta + pt.r * pt.r));
                let phi = phi_pm(&pt);
                let w = 1.0 - pt.r * pt.zeta;
                if phi.d_plus * w > 0.0 || phi.d_minus * w < 0.0 {
                    phi_violations += 1;
                }
            }
        }
    }
    checks.push(Check {
        name: "hamiltonian_field_matches_symbol_gradient",
        pass: max_field_residual < 1e-6,
        detail: serde_json::json!({"max_residual": max_field_residual}),
    });
    checks.push(Check {
        name: "eta_conserved_exactly",
        pass: eta_violations == 0,
        detail: serde_json::json!({"violations": eta_violations}),
    });
    checks.push(Check {
        name: "escape_derivative_dominates_distance",
        pass: min_escape_gap >= 0.0,
        detail: serde_json::json!({"min_gap": min_escape_gap}),
    });
    checks.push(Check {
        name: "phi_derivative_signs",
        pass: phi_violations == 0,
        detail: serde_json::json!({"violations": phi_violations}),
    });

    let mut horizon_exact = true;
    for r in [1.0f64, -1.0] {
        for zeta in [-5.0, -0.3, 0.0, 0.7, 3.0] {
            let (dr, _, _, _) = hamiltonian_field(&PhasePoint::new(r, 0.0, zeta, 0.4));
            if -2.0 * r * dr != -4.0 {
                horizon_exact = false;
            }
        }
    }
    checks.push(Check {
        name: "horizon_rate_exact",
        pass: horizon_exact,
        detail: serde_json::json!({}),
    });

    let plus = radial_linearization(Sign::Plus);
    let minus = radial_linearization(Sign::Minus);
    checks.push(Check {
        name: "radial_eigenvalues",
        pass: plus.eigenvalues == [4.0, 2.0, 2.0] && minus.eigenvalues == [-4.0, -2.0, -2.0],
        detail: serde_json::json!({
            "plus": plus.eigenvalues,
            "minus": minus.eigenvalues,
        }),
    });

    // dynamic trapping classification vs closed-form membership
    let g = spec.grid_n;
    let results: Vec<(u32, u32)> = (0..g)
        .into_par_iter()
        .map(|i| {
            let mut agree = 0;
            let mut total = 0;
            for j in 0..g {
                let r = lin(-0.6, 0.6, i, g);
                let zeta = lin(-0.5, 0.5, j, g);
                let mu = 1.0 - r * r;
                let eta = (1.0 - mu * zeta * zeta - 2.0 * r * zeta).sqrt();
                let pt = PhasePoint::new(r, 0.0, zeta, eta);
                let dynamic = classify_trapping(&pt, spec.t_max, DEFAULT_ESCAPE_RADIUS);
                let member = analytic_trapping(&pt);
                total += 1;
                if let (Ok(a), Ok(b)) = (dynamic, member) {
                    if a == b {
                        agree += 1;
                    }
                }
            }
            (agree, total)
        })
        .collect();
    let (agree, total) = results
        .iter()
        .fold((0u32, 0u32), |acc, r| (acc.0 + r.0, acc.1 + r.1));
    checks.push(Check {
        name: "trapping_agreement",
        pass: agree as f64 >= 0.99 * total as f64,
        detail: serde_json::json!({"agree": agree, "total": total, "grid_n": g}),
    });

    // energy conservation over deterministic on-shell starts
    let mut max_drift = 0.0f64;
    for i in 0..5 {
        for j in 0..4 {
            let r = lin(-0.6, 0.6, i, 5);
            let zeta = lin(-0.45, 0.45, j, 4);
            let mu = 1.0 - r * r;
            let e2 = 1.0 - mu * zeta * zeta - 2.0 * r * zeta;
            if e2 < 0.0 {
                continue;
            }
            let traj = integrate_flow(&PhasePoint::new(r, 0.0, zeta, e2.sqrt()), 10.0, 1e-3);
            max_drift = max_drift.max(traj.energy_drift);
        }
    }
    checks.push(Check {
        name: "energy_drift",
        pass: max_drift < 1e-8,
        detail: serde_json::json!({"max_drift": max_drift}),
    });

    let all_pass = checks.iter().all(|c| c.pass);
    let report = serde_json::json!({
        "all_pass": all_pass,
        "checks": checks.iter().map(|c| {
            let mut obj = serde_json::json!({"name": c.name, "pass": c.pass});
            if let (Some(o), Some(d)) = (obj.as_object_mut(), c.detail.as_object()) {
                for (k, v) in d {
                    o.insert(k.clone(), v.clone());
                }
            }
            obj
        }).collect::<Vec<_>>(),
    });
    if !all_pass {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        return Err(CliError::Numerical {
            kind: "invariant_check".into(),
            message: format!("failed checks: {}", failed.join(", ")),
        });
    }
    Ok(vec![("check.json".into(), pretty_json(&report)?)])
}

fn pretty_json(v: &serde_json::Value) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Run a command against an output directory; returns the written
/// manifest. Output files only appear after the computation succeeded.
pub fn execute(kind: CommandKind, cfg: &RunConfig, out_dir: &Path) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    let t0 = Instant::now();
    let outputs = match kind {
        CommandKind::Limitset => run_limitset(cfg)?,
        CommandKind::Dimension => run_dimension(cfg)?,
        CommandKind::Delta => run_delta(cfg)?,
        CommandKind::Zeros => run_zeros(cfg)?,
        CommandKind::Count => run_count(cfg)?,
        CommandKind::Weyl => run_weyl(cfg)?,
        CommandKind::CylinderFlow => run_cylinder_flow(cfg)?,
        CommandKind::CylinderCheck => run_cylinder_check(cfg)?,
    };
    std::fs::create_dir_all(out_dir)?;
    let mut records = Vec::with_capacity(outputs.len());
    for (name, bytes) in &outputs {
        std::fs::write(out_dir.join(name), bytes)?;
        records.push(OutputRecord {
            path: name.clone(),
            sha256: digest(bytes),
        });
    }
    let manifest = RunManifest {
        command: kind.name().into(),
        parameters: cfg.clone(),
        group_hash: cfg.group.as_ref().map(group_hash),
        code_version: format!("fwl-cli {}", env!("CARGO_PKG_VERSION")),
        wall_time_seconds: t0.elapsed().as_secs_f64(),
        outputs: records,
    };
    manifest.write(out_dir)?;
    Ok(manifest)
}

#[derive(Debug, Serialize)]
pub struct RerunReport {
    pub command: String,
    pub out_dir: PathBuf,
    pub reproduced: bool,
    /// outputs whose bytes changed; any CSV/JSON here is a determinism bug
    pub mismatched: Vec<String>,
}

/// Re-execute a recorded run and verify the outputs digest-for-digest.
/// CSV/JSON must match exactly; SVG differences are reported but allowed.
pub fn rerun(manifest_path: &Path, out_dir: Option<PathBuf>) -> Result<RerunReport, CliError> {
    let recorded = RunManifest::load(manifest_path)?;
    let kind = CommandKind::from_name(&recorded.command).ok_or_else(|| {
        CliError::Config(format!("manifest: unknown command '{}'", recorded.command))
    })?;
    let out_dir = out_dir.unwrap_or_else(|| {
        manifest_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join("rerun")
    });
    let fresh = execute(kind, &recorded.parameters, &out_dir)?;
    let mut mismatched = Vec::new();
    for old in &recorded.outputs {
        match fresh.outputs.iter().find(|n| n.path == old.path) {
            Some(new) if new.sha256 == old.sha256 => {}
            _ => mismatched.push(old.path.clone()),
        }
    }
    for new in &fresh.outputs {
        if !recorded.outputs.iter().any(|o| o.path == new.path) {
            mismatched.push(new.path.clone());
        }
    }
    let hard_mismatch: Vec<&String> = mismatched
        .iter()
        .filter(|p| !p.ends_with(".svg"))
        .collect();
    if !hard_mismatch.is_empty() {
        return Err(CliError::Numerical {
            kind: "nondeterminism".into(),
            message: format!(
                "rerun produced different bytes for: {}",
                hard_mismatch
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        });
    }
    Ok(RerunReport {
        command: recorded.command,
        out_dir,
        reproduced: mismatched.is_empty(),
        mismatched,
    })
}

/// Install the requested rayon pool size; later calls (tests, reruns in
/// the same process) keep the first pool.
pub fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}
