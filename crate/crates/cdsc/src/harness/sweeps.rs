//! Experiment drivers: each takes a config, runs the sweep and renders a
//! CSV with a pinned schema. All floating-point columns use Rust's
//! shortest round-trip formatting, so identical runs produce identical
//! bytes.

use std::sync::Arc;

use rayon::prelude::*;

use super::config::{CodeSpec, ExperimentConfig, ResolvedCode};
use super::fss::{fss_fit, FssFit, FssPoint};
use super::mc::{estimate_logical_rate, CodeSource, RunSpec};
use super::HarnessError;
use crate::code::{build_layout, DeformedCode, FamilyParams};
use crate::decode::exhaustive_failure_probability;
use crate::metrics::effective_distance_increment;
use crate::noise::{permute_field, rates_from, Bias, BiasedNoiseParams};
use crate::pauli::{DeformationPattern, SingleQubitDeformation};
use crate::statmech::{
    cluster_threshold, fisher_exponent_fit, path_length_exponent, percolation_stats, ClusterLevel,
};

pub const CSV_SCHEMA: u32 = 1;

/// Everything an experiment run produces: the main CSV plus optional
/// companion files (stem suffix, content).
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub main_csv: String,
    pub companions: Vec<(String, String)>,
}

fn rate_header() -> String {
    "schema,kind,code,pi_xz,pi_yz,l,p,eta,decoder,chi,trials,seed,p_logical,std_error,converged_fraction\n".to_string()
}

fn family_columns(code: &CodeSpec) -> (String, String) {
    match code.family_params() {
        Some(f) => (format!("{}", f.pi_xz), format!("{}", f.pi_yz)),
        None => (String::new(), String::new()),
    }
}

fn decoder_label(config: &ExperimentConfig) -> (&'static str, String) {
    match config.decoder {
        super::config::DecoderSpec::Exact => ("exact", String::new()),
        super::config::DecoderSpec::Tn => ("tn", format!("{}", config.chi)),
    }
}

fn rate_rows(
    config: &ExperimentConfig,
    kind_label: &str,
    code: &CodeSpec,
    out: &mut String,
) -> Result<(), HarnessError> {
    let (pi_xz, pi_yz) = family_columns(code);
    let (dec, chi) = decoder_label(config);
    for &l in &config.l_list {
        let layout = Arc::new(build_layout(l)?);
        let source = match code.resolve(l)? {
            ResolvedCode::Fixed(pattern) => CodeSource::Fixed(pattern),
            ResolvedCode::Family(f) => CodeSource::Family(f),
        };
        for &p in &config.p_list {
            let spec = RunSpec {
                layout: Arc::clone(&layout),
                code: source.clone(),
                params: BiasedNoiseParams::new(p, config.eta)?,
                decoder: config.decoder_kind(),
                trials: config.trials,
                seed: config.seed,
            };
            let est = estimate_logical_rate(&spec)?;
            out.push_str(&format!(
                "{CSV_SCHEMA},{kind_label},{code_label},{pi_xz},{pi_yz},{l},{p},{eta},{dec},{chi},{trials},{seed},{rate},{se},{conv}\n",
                code_label = code.label(),
                eta = config.eta.encode(),
                trials = config.trials,
                seed = config.seed,
                rate = est.p_logical,
                se = est.std_error,
                conv = est.converged_fraction,
            ));
        }
    }
    Ok(())
}

/// Logical-error-rate sweep over (L, p).
pub fn run_rate(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let mut csv = rate_header();
    rate_rows(config, "rate", &config.code, &mut csv)?;
    Ok(ExperimentOutput {
        main_csv: csv,
        companions: Vec::new(),
    })
}

/// Subthreshold scaling sweep: identical rows to `run_rate`, tagged with
/// the experiment kind for plotting.
pub fn run_subthreshold(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let mut csv = rate_header();
    rate_rows(config, "subthreshold", &config.code, &mut csv)?;
    Ok(ExperimentOutput {
        main_csv: csv,
        companions: Vec::new(),
    })
}

/// Threshold experiment: rate rows over the (L, p) grid plus a
/// finite-size-scaling fit written as a companion CSV.
pub fn run_threshold(
    config: &ExperimentConfig,
) -> Result<(ExperimentOutput, FssFit), HarnessError> {
    let mut csv = rate_header();
    rate_rows(config, "threshold", &config.code, &mut csv)?;
    let mut points = Vec::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let l: usize = cols[5].parse().unwrap();
        let p: f64 = cols[6].parse().unwrap();
        let rate: f64 = cols[12].parse().unwrap();
        let se: f64 = cols[13].parse().unwrap();
        points.push(FssPoint {
            p,
            l,
            p_logical: rate,
            sigma: se.max(1e-9),
        });
    }
    let fit = fss_fit(&points)?;
    let (_, chi) = decoder_label(config);
    let fit_csv = format!(
        "schema,code,eta,chi,trials,seed,p_th,nu,a,b,c,residual,low_confidence\n{CSV_SCHEMA},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        config.code.label(),
        config.eta.encode(),
        chi,
        config.trials,
        config.seed,
        fit.p_th,
        fit.nu,
        fit.a,
        fit.b,
        fit.c,
        fit.residual,
        fit.low_confidence,
    );
    Ok((
        ExperimentOutput {
            main_csv: csv,
            companions: vec![("fit".to_string(), fit_csv)],
        },
        fit,
    ))
}

/// Phase-diagram scan: rate rows per family grid point at fixed eta.
pub fn run_phase_scan(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    if config.family_grid.is_empty() {
        return Err(HarnessError::Config(
            "phase-scan needs family_grid points in [code]".into(),
        ));
    }
    let mut csv = rate_header();
    for family in &config.family_grid {
        rate_rows(config, "phase_scan", &CodeSpec::Family(*family), &mut csv)?;
    }
    Ok(ExperimentOutput {
        main_csv: csv,
        companions: Vec::new(),
    })
}

/// Effective-distance increment sweep over family grid points.
pub fn run_dprime_sweep(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let grid: Vec<FamilyParams> = if config.family_grid.is_empty() {
        match config.code.family_params() {
            Some(f) => vec![f],
            None => {
                return Err(HarnessError::Config(
                    "dprime sweep needs a family or family_grid".into(),
                ))
            }
        }
    } else {
        config.family_grid.clone()
    };
    let mut csv = String::from(
        "schema,pi_xz,pi_yz,p,eta,l,mean_delta_dprime,std_error,samples,seed\n",
    );
    for family in grid {
        for &p in &config.p_list {
            let (mean, se) = effective_distance_increment(
                family,
                p,
                config.eta,
                config.realizations,
                config.seed,
            )?;
            csv.push_str(&format!(
                "{CSV_SCHEMA},{},{},{p},{},3,{mean},{se},{},{}\n",
                family.pi_xz,
                family.pi_yz,
                config.eta.encode(),
                config.realizations,
                config.seed,
            ));
        }
    }
    Ok(ExperimentOutput {
        main_csv: csv,
        companions: Vec::new(),
    })
}

/// Constraint-percolation sweep over L, with per-size exponent fits and a
/// cross-size spanning-path exponent.
pub fn run_percolation(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let family = config.code.family_params().ok_or_else(|| {
        HarnessError::Config("percolation needs a family code spec".into())
    })?;
    let mut runs = Vec::new();
    for &l in &config.l_list {
        runs.push(percolation_stats(family, l, config.realizations, config.seed)?);
    }
    let lengths: Vec<(usize, f64)> = runs
        .iter()
        .filter_map(|r| r.mean_spanning_path.map(|m| (r.l, m)))
        .collect();
    let path_exp = path_length_exponent(&lengths);
    let mut csv = String::from(
        "schema,l,pi_xz,pi_yz,realizations,seed,spanning_prob,largest_cluster,mean_spanning_path,tau_fit,path_exponent\n",
    );
    for run in &runs {
        let tau = fisher_exponent_fit(run);
        csv.push_str(&format!(
            "{CSV_SCHEMA},{},{},{},{},{},{},{},{},{},{}\n",
            run.l,
            family.pi_xz,
            family.pi_yz,
            config.realizations,
            config.seed,
            run.spanning_probability,
            run.mean_largest_cluster,
            run.mean_spanning_path.map_or(String::new(), |m| format!("{m}")),
            tau.map_or(String::new(), |t| format!("{t}")),
            path_exp.map_or(String::new(), |x| format!("{x}")),
        ));
    }
    Ok(ExperimentOutput {
        main_csv: csv,
        companions: Vec::new(),
    })
}

/// Cluster-method thresholds over (eta, level).
pub fn run_cluster_threshold(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let etas: Vec<Bias> = if config.eta_list.is_empty() {
        vec![config.eta]
    } else {
        config.eta_list.clone()
    };
    let mut csv = String::from("schema,eta,c,p_th\n");
    for &eta in &etas {
        for &c in &config.cluster_levels {
            let level = ClusterLevel::from_index(c).ok_or_else(|| {
                HarnessError::Config(format!("cluster level must be 0, 1 or 2, got {c}"))
            })?;
            let p_th = cluster_threshold(eta, level, config.trials, config.seed)?;
            csv.push_str(&format!("{CSV_SCHEMA},{},{c},{p_th}\n", eta.encode()));
        }
    }
    Ok(ExperimentOutput {
        main_csv: csv,
        companions: Vec::new(),
    })
}

/// One row of the exhaustive 3×3 sweep.
#[derive(Debug, Clone)]
pub struct SmallCodeSweepRow {
    pub pattern: String,
    pub p_logical: f64,
}

/// Exact logical error rate of every possible 3×3 deformation pattern at
/// the configured noise point.
pub fn run_small_code_sweep(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let rows = small_code_sweep_rows(config.p_list[0], config.eta)?;
    let mut csv = String::from("schema,pattern,p,eta,p_logical\n");
    for row in &rows {
        csv.push_str(&format!(
            "{CSV_SCHEMA},{},{},{},{}\n",
            row.pattern,
            config.p_list[0],
            config.eta.encode(),
            row.p_logical
        ));
    }
    Ok(ExperimentOutput {
        main_csv: csv,
        companions: Vec::new(),
    })
}

/// Exhaustive rates for all 3^9 patterns, in pattern-index order
/// (base-3 digits, qubit 0 fastest).
pub fn small_code_sweep_rows(
    p: f64,
    eta: Bias,
) -> Result<Vec<SmallCodeSweepRow>, HarnessError> {
    let layout = Arc::new(build_layout(3)?);
    let base = rates_from(&BiasedNoiseParams::new(p, eta)?);
    let total = 3usize.pow(9);
    (0..total)
        .into_par_iter()
        .map(|index| {
            let mut digits = index;
            let kinds: Vec<SingleQubitDeformation> = (0..9)
                .map(|_| {
                    let k = digits % 3;
                    digits /= 3;
                    match k {
                        0 => SingleQubitDeformation::Id,
                        1 => SingleQubitDeformation::SwapXZ,
                        _ => SingleQubitDeformation::SwapYZ,
                    }
                })
                .collect();
            let pattern = DeformationPattern::new(kinds);
            let code = DeformedCode::new(Arc::clone(&layout), pattern.clone())?;
            let field = permute_field(base, &pattern);
            let p_logical = exhaustive_failure_probability(&code, &field)?;
            Ok(SmallCodeSweepRow {
                pattern: pattern.encode(),
                p_logical,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()
}

/// Dispatches a config to its driver.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    use super::config::ExperimentKind::*;
    match config.kind {
        LogicalRate => run_rate(config),
        Subthreshold => run_subthreshold(config),
        Threshold => run_threshold(config).map(|(out, _)| out),
        PhaseScan => run_phase_scan(config),
        DprimeSweep => run_dprime_sweep(config),
        Percolation => run_percolation(config),
        ClusterThreshold => run_cluster_threshold(config),
        SmallCodeSweep => run_small_code_sweep(config),
    }
}
