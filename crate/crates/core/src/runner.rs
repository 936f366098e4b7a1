//! End-to-end runs: configuration in, result and artifacts out.
//!
//! A run writes four files into its output directory:
//!
//! - `trace.csv`: one row per step with columns `iter, step,
//!   min_weighted_sinr, min_rate_bps_hz, residual, p_1 .. p_K` (powers in dBm).
//!   Row 0 is the starting point (`step = init`) with empty metric cells.
//! - `result.json`: [`RunResult`].
//! - `scenario.json`: [`ScenarioDump`](crate::scenario::ScenarioDump).
//! - `params.json`: long-term beamformer parameters of the final round.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::sample_ensemble;
use crate::powerctl::{
    algorithm_ao, algorithm_fp, relative_spread, ConvergenceTrace, JointOptions, JointOutcome, MonotonicityViolation,
};
use crate::scenario::{NetworkConfig, NetworkScenario};
use crate::teammse::BeamformingRule;
use crate::{linear_to_db, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Fixed-point iterations.
    Fp,
    /// Alternating optimization.
    Ao,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub algorithm: Algorithm,
    pub rule: BeamformingRule,
    /// Overrides the weights of the configuration.
    pub weights: Option<Vec<f64>>,
    /// Overrides the seed of the configuration.
    pub seed: Option<u64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        let joint = JointOptions::default();
        Self {
            algorithm: Algorithm::Ao,
            rule: BeamformingRule::TeamMmse,
            weights: None,
            seed: None,
            tol: joint.tol,
            max_iter: joint.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub beamformer: BeamformingRule,
    pub seed: u64,
    pub powers_mw: Vec<f64>,
    pub powers_dbm: Vec<f64>,
    /// UatF rates in bits/s/Hz.
    pub rates: Vec<f64>,
    pub min_rate: f64,
    pub weighted_sinr: Vec<f64>,
    pub min_weighted_sinr: f64,
    /// `(max - min) / min` of the weighted SINRs.
    pub weighted_sinr_spread: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: Option<f64>,
    pub monotonicity_violations: Vec<MonotonicityViolation>,
    pub wall_time_s: f64,
    /// Effective configuration, with seed and weights overrides applied.
    pub config: NetworkConfig,
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: RunResult,
    pub scenario: NetworkScenario,
    pub outcome: JointOutcome,
}

impl RunOutput {
    pub fn trace(&self) -> &ConvergenceTrace {
        &self.outcome.trace
    }
}

/// Applies the overrides of `options` to `config`.
pub fn effective_config(config: &NetworkConfig, options: &RunOptions) -> Result<NetworkConfig> {
    let mut config = config.clone();
    if let Some(seed) = options.seed {
        config.seed = seed;
    }
    if let Some(weights) = &options.weights {
        config.weights = Some(weights.clone());
    }
    config.validate()?;
    Ok(config)
}

pub fn run(config: &NetworkConfig, options: &RunOptions) -> Result<RunOutput> {
    let config = effective_config(config, options)?;
    let start = Instant::now();
    let scenario = NetworkScenario::from_config(&config)?;
    let ensemble = sample_ensemble(&scenario, config.n_sim, config.seed)?;
    log::info!(
        "L={} N={} K={} Q={} n_sim={} seed={}",
        config.num_aps,
        config.antennas_per_ap,
        config.num_ues,
        config.cluster_size,
        config.n_sim,
        config.seed
    );
    let joint = JointOptions { tol: options.tol, max_iter: options.max_iter, rule: options.rule, ..Default::default() };
    let outcome = match options.algorithm {
        Algorithm::Fp => algorithm_fp(&ensemble, &scenario, &joint)?,
        Algorithm::Ao => algorithm_ao(&ensemble, &scenario, &joint)?,
    };
    let weighted_sinr = outcome.weighted_sinr(&scenario.weights)?;
    let rates = outcome.rates()?;
    let result = RunResult {
        algorithm: options.algorithm,
        beamformer: options.rule,
        seed: config.seed,
        powers_mw: outcome.powers.to_vec(),
        powers_dbm: outcome.powers.to_dbm(),
        min_rate: rates.iter().copied().fold(f64::INFINITY, f64::min),
        rates,
        min_weighted_sinr: weighted_sinr.iter().copied().fold(f64::INFINITY, f64::min),
        weighted_sinr_spread: relative_spread(&weighted_sinr),
        weighted_sinr,
        iterations: outcome.outer_iterations,
        converged: outcome.converged,
        final_residual: outcome.trace.records.last().and_then(|r| r.residual),
        monotonicity_violations: outcome.monotonicity_violations.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        config,
    };
    log::info!(
        "{:?}/{:?}: min rate {:.4} bit/s/Hz after {} rounds",
        result.algorithm,
        result.beamformer,
        result.min_rate,
        result.iterations
    );
    Ok(RunOutput { result, scenario, outcome })
}

/// Runs once per weight vector on the same drop and ensemble.
pub fn sweep_weights(config: &NetworkConfig, options: &RunOptions, weight_list: &[Vec<f64>]) -> Result<Vec<RunOutput>> {
    for w in weight_list {
        if w.len() != config.num_ues || w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Config(format!("sweep weights must be {} positive numbers", config.num_ues)));
        }
    }
    weight_list.par_iter().map(|w| run(config, &RunOptions { weights: Some(w.clone()), ..options.clone() })).collect()
}

pub fn write_trace_csv<W: Write>(writer: W, trace: &ConvergenceTrace) -> Result<()> {
    let k = trace.records.first().map_or(0, |r| r.powers.len());
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> =
        ["iter", "step", "min_weighted_sinr", "min_rate_bps_hz", "residual"].map(String::from).to_vec();
    header.extend((1..=k).map(|i| format!("p_{i}")));
    w.write_record(&header)?;
    let cell = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
    for r in &trace.records {
        let mut row = vec![
            r.iteration.to_string(),
            r.step.as_str().to_string(),
            cell(r.min_weighted_sinr),
            cell(r.min_rate),
            cell(r.residual),
        ];
        row.extend(r.powers.iter().map(|&p| linear_to_db(p).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes `trace.csv`, `result.json`, `scenario.json` and `params.json`.
pub fn write_artifacts(dir: &Path, output: &RunOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_trace_csv(BufWriter::new(File::create(dir.join("trace.csv"))?), &output.outcome.trace)?;
    write_json(&dir.join("result.json"), &output.result)?;
    write_json(&dir.join("scenario.json"), &output.scenario.dump())?;
    write_json(&dir.join("params.json"), &output.outcome.beamformers.long_term_params())?;
    Ok(())
}
