//! Use-and-then-forget (UatF) statistics and the quantities derived from them.
//!
//! For fixed beamformers the UatF SINR of every UE depends on the channel
//! only through three long-term moments:
//!
//! ```text
//! a_k    = E[h_k^H v_k]
//! B_{jk} = E[|h_j^H v_k|^2]
//! n_k    = E[||v_k||^2]
//!
//! SINR_k(p) = p_k |a_k|^2 / (p_k (B_kk - |a_k|^2) + sum_{j != k} p_j B_jk + n_k)
//! ```
//!
//! so power control never needs to revisit the samples.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelEnsemble;
use crate::teammse::BeamformerSet;
use crate::{CVector, Error, Result, C64, REDUCTION_CHUNK};

/// `|a_k|^2` below this counts as `E[h_k^H v_k] = 0`.
pub const DEGENERACY_THRESHOLD: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct UatfStatistics {
    pub a: Vec<C64>,
    /// `b[(j, k)] = E[|h_j^H v_k|^2]`.
    pub b: DMatrix<f64>,
    pub n: Vec<f64>,
}

/// Validated nonnegative power vector (milliwatts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerVector(Vec<f64>);

impl PowerVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidInput("powers must be finite and nonnegative".into()));
        }
        Ok(Self(p))
    }

    /// Every UE at full power `budget`.
    pub fn full(k: usize, budget: f64) -> Self {
        Self(vec![budget; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn within_budget(&self, budget: f64) -> bool {
        self.max_norm() <= budget
    }

    pub fn to_dbm(&self) -> Vec<f64> {
        self.0.iter().map(|&p| crate::linear_to_db(p)).collect()
    }
}

impl std::ops::Deref for PowerVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Clone)]
struct Moments {
    a: Vec<C64>,
    b: DMatrix<f64>,
    n: Vec<f64>,
}

impl Moments {
    fn zeros(k: usize) -> Self {
        Self { a: vec![C64::new(0.0, 0.0); k], b: DMatrix::zeros(k, k), n: vec![0.0; k] }
    }

    fn add(&mut self, other: &Moments) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += y;
        }
        self.b += &other.b;
        for (x, y) in self.n.iter_mut().zip(&other.n) {
            *x += y;
        }
    }
}

/// Empirical UatF moments of `beamformers` over the ensemble. Samples are
/// reduced in fixed-size chunks summed in order, so the result does not
/// depend on the thread count.
pub fn estimate_statistics(ensemble: &ChannelEnsemble, beamformers: &BeamformerSet) -> UatfStatistics {
    let k_count = ensemble.num_ues();
    let indices: Vec<usize> = (0..ensemble.len()).collect();
    let partials: Vec<Moments> = indices
        .par_chunks(REDUCTION_CHUNK)
        .map(|chunk| {
            let mut acc = Moments::zeros(k_count);
            for &s in chunk {
                let w = ensemble.weight(s);
                let realized = beamformers.realize(ensemble, s);
                for (k, cluster) in beamformers.clusters().iter().enumerate() {
                    // y[j] = h_j^H v_k
                    let mut y = CVector::zeros(k_count);
                    let mut norm = 0.0;
                    for (&l, v) in cluster.iter().zip(&realized.blocks[k]) {
                        y += ensemble.ap_block(s, l).ad_mul(v);
                        norm += v.norm_squared();
                    }
                    acc.a[k] += y[k] * w;
                    for j in 0..k_count {
                        acc.b[(j, k)] += w * y[j].norm_sqr();
                    }
                    acc.n[k] += w * norm;
                }
            }
            acc
        })
        .collect();
    let mut total = Moments::zeros(k_count);
    for part in &partials {
        total.add(part);
    }
    UatfStatistics { a: total.a, b: total.b, n: total.n }
}

impl UatfStatistics {
    pub fn num_ues(&self) -> usize {
        self.a.len()
    }

    /// `Var(h_k^H v_k) = B_kk - |a_k|^2`.
    pub fn self_variance(&self, k: usize) -> f64 {
        self.b[(k, k)] - self.a[k].norm_sqr()
    }

    /// `E[||v_k||^2] = 0`: the beamformer vanishes almost surely.
    pub fn is_degenerate(&self, k: usize) -> bool {
        self.n[k] <= 0.0
    }

    /// `E[h_k^H v_k]` is numerically zero, so the UatF SINR is zero for every
    /// power vector.
    pub fn has_zero_mean_gain(&self, k: usize) -> bool {
        self.a[k].norm_sqr() < DEGENERACY_THRESHOLD
    }

    /// Interference-plus-noise term `p_k Var + sum_{j != k} p_j B_jk + n_k`.
    pub fn interference_plus_noise(&self, p: &[f64], k: usize) -> f64 {
        let cross: f64 = (0..self.num_ues()).filter(|&j| j != k).map(|j| p[j] * self.b[(j, k)]).sum();
        p[k] * self.self_variance(k) + cross + self.n[k]
    }

    /// Scalar-quadratic form of the MSE of UE `k`:
    /// `sum_j p_j B_jk - 2 sqrt(p_k) Re(a_k) + 1 + n_k`.
    pub fn mse(&self, p: &[f64], k: usize) -> f64 {
        let total: f64 = (0..self.num_ues()).map(|j| p[j] * self.b[(j, k)]).sum();
        total - 2.0 * p[k].sqrt() * self.a[k].re + 1.0 + self.n[k]
    }
}

fn check(stats: &UatfStatistics, p: &[f64], k: usize) -> Result<()> {
    if p.len() != stats.num_ues() || k >= stats.num_ues() {
        return Err(Error::InvalidInput("power vector or UE index does not match the statistics".into()));
    }
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidInput("powers must be finite and nonnegative".into()));
    }
    if stats.is_degenerate(k) {
        return Err(Error::Degenerate { ue: k, reason: "E[||v_k||^2] = 0" });
    }
    Ok(())
}

/// Moments of arbitrary beamformers: `realize(s)` returns the stacked `NL`
/// beamformer of every UE on sample `s`.
pub fn estimate_statistics_from_fn<F>(ensemble: &ChannelEnsemble, realize: F) -> UatfStatistics
where
    F: Fn(usize) -> Vec<CVector> + Sync,
{
    let k_count = ensemble.num_ues();
    let indices: Vec<usize> = (0..ensemble.len()).collect();
    let partials: Vec<Moments> = indices
        .par_chunks(REDUCTION_CHUNK)
        .map(|chunk| {
            let mut acc = Moments::zeros(k_count);
            for &s in chunk {
                let w = ensemble.weight(s);
                let h = ensemble.sample(s);
                for (k, v) in realize(s).iter().enumerate() {
                    let y = h.ad_mul(v);
                    acc.a[k] += y[k] * w;
                    for j in 0..k_count {
                        acc.b[(j, k)] += w * y[j].norm_sqr();
                    }
                    acc.n[k] += w * v.norm_squared();
                }
            }
            acc
        })
        .collect();
    let mut total = Moments::zeros(k_count);
    for part in &partials {
        total.add(part);
    }
    UatfStatistics { a: total.a, b: total.b, n: total.n }
}

pub fn sinr(stats: &UatfStatistics, p: &[f64], k: usize) -> Result<f64> {
    check(stats, p, k)?;
    Ok(p[k] * stats.a[k].norm_sqr() / stats.interference_plus_noise(p, k))
}

/// `log2(1 + SINR_k)` in bits/s/Hz.
pub fn rate(stats: &UatfStatistics, p: &[f64], k: usize) -> Result<f64> {
    Ok((1.0 + sinr(stats, p, k)?).log2())
}

/// SINR of every UE.
pub fn sinr_all(stats: &UatfStatistics, p: &[f64]) -> Result<Vec<f64>> {
    (0..stats.num_ues()).map(|k| sinr(stats, p, k)).collect()
}

/// `E[||diag(p)^{1/2} H^H v_k - e_k||^2] + E[||v_k||^2]`, evaluated directly
/// on the samples.
pub fn mse(ensemble: &ChannelEnsemble, beamformers: &BeamformerSet, k: usize, p: &[f64]) -> Result<f64> {
    let k_count = ensemble.num_ues();
    if p.len() != k_count || k >= k_count {
        return Err(Error::InvalidInput("power vector or UE index does not match the ensemble".into()));
    }
    let indices: Vec<usize> = (0..ensemble.len()).collect();
    let partials: Vec<f64> = indices
        .par_chunks(REDUCTION_CHUNK)
        .map(|chunk| {
            let mut acc = 0.0;
            for &s in chunk {
                let realized = beamformers.realize(ensemble, s);
                let mut y = CVector::zeros(k_count);
                let mut norm = 0.0;
                for (&l, v) in beamformers.clusters()[k].iter().zip(&realized.blocks[k]) {
                    y += ensemble.ap_block(s, l).ad_mul(v);
                    norm += v.norm_squared();
                }
                let err: f64 = (0..k_count)
                    .map(|j| {
                        let target = if j == k { 1.0 } else { 0.0 };
                        (y[j] * p[j].sqrt() - C64::new(target, 0.0)).norm_sqr()
                    })
                    .sum();
                acc += ensemble.weight(s) * (err + norm);
            }
            acc
        })
        .collect();
    Ok(partials.iter().sum())
}
