//! Interference calculus for weighted max-min SINR power control.
//!
//! A mapping `T(p) = [w_1 f_1(p), ..., w_K f_K(p)]` built from standard
//! interference functions `f_k` (positive, monotone, scalable) has a unique
//! normalized fixed point
//!
//! ```text
//! p* = P T(p*) / ||T(p*)||_inf
//! ```
//!
//! which maximizes `min_k w_k^{-1} p_k / f_k(p)` under `||p||_inf <= P` and is
//! the least element of the solution set. The iteration
//! `p <- P T(p) / ||T(p)||_inf` converges to it from any start.
//!
//! Two mappings are provided: the affine mapping of a fixed beamformer set
//! (its UatF SINR inverted), and the team-optimal mapping where the
//! beamformers are re-optimized for every `p`. On top of these sit the two
//! joint algorithms: [`algorithm_fp`] (one normalized step per beamformer
//! update) and [`algorithm_ao`] (full max-min power solve per update).

use serde::{Deserialize, Serialize};

use crate::channel::ChannelEnsemble;
use crate::scenario::NetworkScenario;
use crate::teammse::{self, BeamformerSet, BeamformingRule};
use crate::uatf::{self, PowerVector, UatfStatistics};
use crate::{Error, Result};

/// Slack allowed when checking that AO rounds do not decrease the objective.
pub const AO_MONOTONICITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapProvenance {
    FixedBeamformer,
    TeamOptimal,
    Custom,
}

/// A standard interference mapping `p -> T(p)`.
pub trait InterferenceMapping {
    fn dim(&self) -> usize;
    /// Max-min weights `w_k` folded into `T`.
    fn weights(&self) -> &[f64];
    fn evaluate(&self, p: &[f64]) -> Result<Vec<f64>>;
    fn provenance(&self) -> MapProvenance;
}

/// `T_k(p) = w_k (p_k Var_k + sum_{j != k} p_j B_jk + n_k) / |a_k|^2`.
#[derive(Debug, Clone)]
pub struct FixedBeamformerMap {
    stats: UatfStatistics,
    weights: Vec<f64>,
}

pub fn fixed_beamformer_map(stats: UatfStatistics, weights: &[f64]) -> Result<FixedBeamformerMap> {
    if weights.len() != stats.num_ues() {
        return Err(Error::InvalidInput("one weight per UE is required".into()));
    }
    for k in 0..stats.num_ues() {
        if stats.is_degenerate(k) {
            return Err(Error::Degenerate { ue: k, reason: "E[||v_k||^2] = 0" });
        }
        if stats.has_zero_mean_gain(k) {
            return Err(Error::Degenerate { ue: k, reason: "E[h_k^H v_k] = 0" });
        }
    }
    Ok(FixedBeamformerMap { stats, weights: weights.to_vec() })
}

impl FixedBeamformerMap {
    pub fn stats(&self) -> &UatfStatistics {
        &self.stats
    }
}

impl InterferenceMapping for FixedBeamformerMap {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn evaluate(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_powers(p, self.dim())?;
        Ok((0..self.dim())
            .map(|k| self.weights[k] * self.stats.interference_plus_noise(p, k) / self.stats.a[k].norm_sqr())
            .collect())
    }

    fn provenance(&self) -> MapProvenance {
        MapProvenance::FixedBeamformer
    }
}

/// `T_k(p) = w_k p_k / u_k(p)` with `u_k(p)` the SINR of the team-MMSE
/// beamformer built at `p`. Defined for strictly positive `p`.
#[derive(Debug, Clone)]
pub struct TeamOptimalMap<'a> {
    ensemble: &'a ChannelEnsemble,
    scenario: &'a NetworkScenario,
    weights: Vec<f64>,
}

pub fn team_optimal_map<'a>(
    ensemble: &'a ChannelEnsemble,
    scenario: &'a NetworkScenario,
    weights: &[f64],
) -> Result<TeamOptimalMap<'a>> {
    if weights.len() != scenario.num_ues() {
        return Err(Error::InvalidInput("one weight per UE is required".into()));
    }
    Ok(TeamOptimalMap { ensemble, scenario, weights: weights.to_vec() })
}

impl TeamOptimalMap<'_> {
    /// Evaluates `T(p)` and also returns the beamformers and statistics it
    /// was computed from.
    pub fn evaluate_full(&self, p: &[f64]) -> Result<(Vec<f64>, BeamformerSet, UatfStatistics)> {
        check_powers(p, self.dim())?;
        if p.iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidInput("the team-optimal mapping needs strictly positive powers".into()));
        }
        let set = teammse::build_team_mmse(self.ensemble, self.scenario, p)?;
        let map = fixed_beamformer_map(uatf::estimate_statistics(self.ensemble, &set), &self.weights)?;
        let t = map.evaluate(p)?;
        Ok((t, set, map.stats))
    }
}

impl InterferenceMapping for TeamOptimalMap<'_> {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn evaluate(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.evaluate_full(p).map(|(t, _, _)| t)
    }

    fn provenance(&self) -> MapProvenance {
        MapProvenance::TeamOptimal
    }
}

/// Mapping given by a closure, for hand-made instances.
pub struct FnMap<F> {
    weights: Vec<f64>,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> FnMap<F> {
    /// Unit weights.
    pub fn new(dim: usize, f: F) -> Self {
        Self { weights: vec![1.0; dim], f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> InterferenceMapping for FnMap<F> {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn evaluate(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_powers(p, self.dim())?;
        let t = (self.f)(p);
        if t.len() != self.dim() || t.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidInput("mapping values must be finite and positive".into()));
        }
        Ok(t)
    }

    fn provenance(&self) -> MapProvenance {
        MapProvenance::Custom
    }
}

fn check_powers(p: &[f64], k: usize) -> Result<()> {
    if p.len() != k {
        return Err(Error::InvalidInput(format!("power vector has {} entries, expected {k}", p.len())));
    }
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidInput("powers must be finite and nonnegative".into()));
    }
    Ok(())
}

/// `P t / ||t||_inf`, with the largest entry set to exactly `P`.
pub fn normalize_to_budget(t: &[f64], budget: f64) -> Vec<f64> {
    let (imax, tmax) =
        t.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, x)| if x > best.1 { (i, x) } else { best });
    let scale = budget / tmax;
    let mut p: Vec<f64> = t.iter().map(|&x| (x * scale).min(budget)).collect();
    p[imax] = budget;
    p
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn min_of(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    /// Starting point, before any beamformer exists.
    Init,
    Beamforming,
    Power,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Init => "init",
            StepKind::Beamforming => "beamforming",
            StepKind::Power => "power",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub step: StepKind,
    pub powers: Vec<f64>,
    /// `w_k^{-1} SINR_k` of every UE; absent for the initial snapshot.
    pub weighted_sinr: Option<Vec<f64>>,
    pub min_weighted_sinr: Option<f64>,
    pub min_rate: Option<f64>,
    /// `||p_next - p||_inf / P` of the power update that produced (or, in a
    /// plain fixed-point solve, follows) this snapshot.
    pub residual: Option<f64>,
}

impl TraceRecord {
    fn new(
        iteration: usize,
        step: StepKind,
        powers: Vec<f64>,
        weighted_sinr: Option<Vec<f64>>,
        weights: &[f64],
        residual: Option<f64>,
    ) -> Self {
        let min_weighted_sinr = weighted_sinr.as_deref().map(min_of);
        let min_rate = weighted_sinr
            .as_deref()
            .map(|ws| min_of(&ws.iter().zip(weights).map(|(s, w)| (1.0 + s * w).log2()).collect::<Vec<_>>()));
        Self { iteration, step, powers, weighted_sinr, min_weighted_sinr, min_rate, residual }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn push(&mut self, record: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.iteration <= record.iteration));
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Minimum rate per step (`None` for the initial snapshot).
    pub fn min_rates(&self) -> Vec<Option<f64>> {
        self.records.iter().map(|r| r.min_rate).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointOutcome {
    pub powers: PowerVector,
    /// Number of mapping evaluations.
    pub iterations: usize,
    /// False if `max_iter` ran out first; `powers` is then the last iterate.
    pub converged: bool,
    /// `||T~(p) - p||_inf / P` at the returned point when converged, else at
    /// the previous iterate.
    pub residual: f64,
    pub trace: ConvergenceTrace,
}

/// Normalized fixed-point iteration `p <- P T(p) / ||T(p)||_inf`.
///
/// Stops at the first iterate `p_i` with `||p_i||_inf = P` whose fixed-point
/// residual `||T~(p_i) - p_i||_inf / P` is at most `tol`, and returns that
/// iterate.
pub fn fixed_point_solve<M: InterferenceMapping + ?Sized>(
    map: &M,
    budget: f64,
    options: FixedPointOptions,
    p0: &[f64],
) -> Result<FixedPointOutcome> {
    check_powers(p0, map.dim())?;
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::InvalidInput("power budget must be positive".into()));
    }
    if options.tol.is_nan() || options.tol <= 0.0 || options.max_iter == 0 {
        return Err(Error::InvalidInput("tol must be positive and max_iter at least 1".into()));
    }
    let weights = map.weights().to_vec();
    let mut trace = ConvergenceTrace::default();
    let mut p = p0.to_vec();
    let mut residual = f64::INFINITY;
    for i in 0..options.max_iter {
        let t = map.evaluate(&p)?;
        let weighted: Vec<f64> = p.iter().zip(&t).map(|(x, y)| x / y).collect();
        let next = normalize_to_budget(&t, budget);
        residual = max_abs_diff(&next, &p) / budget;
        trace.push(TraceRecord::new(i, StepKind::Power, p.clone(), Some(weighted), &weights, Some(residual)));
        let normalized = p.iter().copied().fold(0.0, f64::max) == budget;
        if residual <= options.tol && normalized {
            return Ok(FixedPointOutcome {
                powers: PowerVector::new(p)?,
                iterations: i + 1,
                converged: true,
                residual,
                trace,
            });
        }
        p = next;
    }
    log::warn!("fixed-point iteration stopped after {} steps (residual {residual:.3e})", options.max_iter);
    Ok(FixedPointOutcome {
        powers: PowerVector::new(p)?,
        iterations: options.max_iter,
        converged: false,
        residual,
        trace,
    })
}

/// `w_k^{-1} SINR_k(v_k, p)` for every UE.
pub fn weighted_sinr(stats: &UatfStatistics, p: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
    Ok(uatf::sinr_all(stats, p)?.iter().zip(weights).map(|(s, w)| s / w).collect())
}

/// `(max - min) / min` of the weighted SINRs.
pub fn relative_spread(values: &[f64]) -> f64 {
    let lo = min_of(values);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / lo
}

#[derive(Debug, Clone)]
pub struct JointOptions {
    /// Outer tolerance on the relative power residual `||p_next - p||_inf / P`.
    pub tol: f64,
    pub max_iter: usize,
    /// Tolerance of the inner power solve of [`algorithm_ao`].
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    pub rule: BeamformingRule,
    /// Starting powers; full power `P 1` if `None`.
    pub initial_powers: Option<Vec<f64>>,
    /// Turn an AO round that lowers the objective by more than
    /// [`AO_MONOTONICITY_SLACK`] into an [`Error::Internal`] instead of
    /// recording it in [`JointOutcome::monotonicity_violations`].
    pub strict_monotonicity: bool,
}

impl Default for JointOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 100,
            inner_tol: 1e-9,
            inner_max_iter: 100_000,
            rule: BeamformingRule::TeamMmse,
            initial_powers: None,
            strict_monotonicity: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JointOutcome {
    pub powers: PowerVector,
    /// Beamformers of the last round; `powers` is the power update computed
    /// for them.
    pub beamformers: BeamformerSet,
    pub stats: UatfStatistics,
    pub trace: ConvergenceTrace,
    pub outer_iterations: usize,
    pub converged: bool,
    /// AO rounds whose objective fell below the previous one beyond the slack.
    pub monotonicity_violations: Vec<MonotonicityViolation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityViolation {
    pub round: usize,
    pub previous: f64,
    pub current: f64,
}

impl MonotonicityViolation {
    pub fn relative_drop(&self) -> f64 {
        (self.previous - self.current) / self.previous.abs()
    }
}

impl JointOutcome {
    pub fn weighted_sinr(&self, weights: &[f64]) -> Result<Vec<f64>> {
        weighted_sinr(&self.stats, &self.powers, weights)
    }

    pub fn rates(&self) -> Result<Vec<f64>> {
        (0..self.stats.num_ues()).map(|k| uatf::rate(&self.stats, &self.powers, k)).collect()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum PowerStep {
    /// One normalized fixed-point step.
    Single,
    /// Max-min optimal powers for the current beamformers.
    Optimal,
}

/// Fixed-point algorithm: rebuild the beamformers at `p`, then apply one
/// normalized step of the resulting mapping. With team-MMSE beamformers every
/// round is exactly one evaluation of the team-optimal mapping.
pub fn algorithm_fp(
    ensemble: &ChannelEnsemble,
    scenario: &NetworkScenario,
    options: &JointOptions,
) -> Result<JointOutcome> {
    joint(ensemble, scenario, options, PowerStep::Single)
}

/// Alternating optimization: rebuild the beamformers at `p`, then replace `p`
/// by the max-min optimal powers for those beamformers.
pub fn algorithm_ao(
    ensemble: &ChannelEnsemble,
    scenario: &NetworkScenario,
    options: &JointOptions,
) -> Result<JointOutcome> {
    joint(ensemble, scenario, options, PowerStep::Optimal)
}

fn joint(
    ensemble: &ChannelEnsemble,
    scenario: &NetworkScenario,
    options: &JointOptions,
    power_step: PowerStep,
) -> Result<JointOutcome> {
    let k_count = scenario.num_ues();
    let budget = scenario.power_budget;
    let weights = scenario.weights.clone();
    if options.tol.is_nan() || options.tol <= 0.0 || options.max_iter == 0 {
        return Err(Error::InvalidInput("tol must be positive and max_iter at least 1".into()));
    }
    let mut p = options.initial_powers.clone().unwrap_or_else(|| vec![budget; k_count]);
    check_powers(&p, k_count)?;
    if p.iter().any(|&x| x <= 0.0 || x > budget) {
        return Err(Error::InvalidInput("initial powers must lie in (0, P]".into()));
    }

    let mut trace = ConvergenceTrace::default();
    trace.push(TraceRecord::new(0, StepKind::Init, p.clone(), None, &weights, None));

    let mut previous_objective: Option<f64> = None;
    let mut last = None;
    let mut converged = false;
    let mut rounds = 0;
    let mut violations = Vec::new();
    for round in 1..=options.max_iter {
        rounds = round;
        let set = teammse::build(options.rule, ensemble, scenario, &p)?;
        let stats = uatf::estimate_statistics(ensemble, &set);
        let map = fixed_beamformer_map(stats, &weights)?;
        trace.push(TraceRecord::new(
            round,
            StepKind::Beamforming,
            p.clone(),
            Some(weighted_sinr(map.stats(), &p, &weights)?),
            &weights,
            None,
        ));

        let next = match power_step {
            PowerStep::Single => normalize_to_budget(&map.evaluate(&p)?, budget),
            PowerStep::Optimal => {
                let inner = fixed_point_solve(
                    &map,
                    budget,
                    FixedPointOptions { tol: options.inner_tol, max_iter: options.inner_max_iter },
                    &p,
                )?;
                inner.powers.into_inner()
            }
        };
        let residual = max_abs_diff(&next, &p) / budget;
        let ws = weighted_sinr(map.stats(), &next, &weights)?;
        let objective = min_of(&ws);
        trace.push(TraceRecord::new(round, StepKind::Power, next.clone(), Some(ws), &weights, Some(residual)));
        log::debug!("round {round}: min weighted SINR {objective:.9e}, residual {residual:.3e}");

        if power_step == PowerStep::Optimal {
            if let Some(prev) = previous_objective {
                if objective < prev - AO_MONOTONICITY_SLACK * prev.abs().max(1.0) {
                    let message = format!(
                        "alternating optimization decreased the objective in round {round}: {prev:.12e} -> {objective:.12e}"
                    );
                    if options.strict_monotonicity {
                        return Err(Error::Internal(message));
                    }
                    log::warn!("{message}");
                    violations.push(MonotonicityViolation { round, previous: prev, current: objective });
                }
            }
        }
        previous_objective = Some(objective);
        p = next;
        last = Some((set, map.stats().clone()));
        // A stalling objective is not a stopping signal: the weakest UE can be
        // insensitive to power updates that are still far from converged.
        // The first round is always followed by a second one.
        if round >= 2 && residual <= options.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("joint optimization stopped after {} rounds without meeting tol", options.max_iter);
    }
    let (beamformers, stats) = last.expect("at least one round runs");
    Ok(JointOutcome {
        powers: PowerVector::new(p)?,
        beamformers,
        stats,
        trace,
        outer_iterations: rounds,
        converged,
        monotonicity_violations: violations,
    })
}
