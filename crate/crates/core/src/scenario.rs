//! Network geometry, large-scale fading and user-centric clustering.
//!
//! Gains follow a 3GPP-like urban micro path-loss model at 2 GHz with
//! log-normal shadowing that is spatially correlated across UEs (per AP) and
//! independent across APs. Gains are divided by the noise power, so the
//! received SNR of UE `k` at one antenna of AP `l` is `p_k * gains[(l, k)]`
//! with `p_k` in milliwatts.

use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{db_to_linear, Error, Result};

/// Thermal noise density in dBm/Hz.
const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// RNG stream used for UE drops and shadowing; the channel ensemble uses its
/// own stream so the two can be regenerated independently.
pub(crate) const SCENARIO_STREAM: u64 = 0;

/// Run configuration. Field names in JSON follow the usual notation of the
/// model (`L`, `N`, `K`, `Q`); all other keys are spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    #[serde(rename = "L")]
    pub num_aps: usize,
    #[serde(rename = "N")]
    pub antennas_per_ap: usize,
    #[serde(rename = "K")]
    pub num_ues: usize,
    #[serde(rename = "Q")]
    pub cluster_size: usize,
    pub area_side_m: f64,
    pub ap_height_delta_m: f64,
    /// Path-loss slope in dB per decade of distance.
    pub pathloss_exponent_coeff: f64,
    /// Path loss at 1 m, in dB (subtracted).
    pub pathloss_intercept_db: f64,
    pub shadow_std_db: f64,
    pub shadow_corr_dist_m: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub power_budget_dbm: f64,
    /// Max-min weights; `None` means all ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub n_sim: usize,
    pub seed: u64,
    /// Explicit AP positions overriding the regular grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ap_positions: Option<Vec<[f64; 2]>>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            num_aps: 16,
            antennas_per_ap: 8,
            num_ues: 64,
            cluster_size: 4,
            area_side_m: 1000.0,
            ap_height_delta_m: 10.0,
            pathloss_exponent_coeff: 36.7,
            pathloss_intercept_db: 30.5,
            shadow_std_db: 4.0,
            shadow_corr_dist_m: 9.0,
            bandwidth_hz: 20e6,
            noise_figure_db: 7.0,
            power_budget_dbm: 20.0,
            weights: None,
            n_sim: 1000,
            seed: 0,
            ap_positions: None,
        }
    }
}

impl NetworkConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let cfg: NetworkConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.num_aps == 0 || self.antennas_per_ap == 0 || self.num_ues == 0 || self.n_sim == 0 {
            return fail("L, N, K and n_sim must all be at least 1".into());
        }
        if self.cluster_size == 0 || self.cluster_size > self.num_aps {
            return fail(format!("Q = {} must lie in 1..=L = {}", self.cluster_size, self.num_aps));
        }
        let finite = [
            ("area_side_m", self.area_side_m),
            ("ap_height_delta_m", self.ap_height_delta_m),
            ("pathloss_exponent_coeff", self.pathloss_exponent_coeff),
            ("pathloss_intercept_db", self.pathloss_intercept_db),
            ("shadow_std_db", self.shadow_std_db),
            ("shadow_corr_dist_m", self.shadow_corr_dist_m),
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_figure_db", self.noise_figure_db),
            ("power_budget_dbm", self.power_budget_dbm),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return fail(format!("{name} must be finite"));
            }
        }
        if self.area_side_m <= 0.0 || self.bandwidth_hz <= 0.0 {
            return fail("area_side_m and bandwidth_hz must be positive".into());
        }
        if self.shadow_std_db < 0.0 {
            return fail("shadow_std_db must be nonnegative".into());
        }
        if self.shadow_std_db > 0.0 && self.shadow_corr_dist_m <= 0.0 {
            return fail("shadow_corr_dist_m must be positive".into());
        }
        if let Some(w) = &self.weights {
            validate_weights(w, self.num_ues)?;
        }
        if let Some(pos) = &self.ap_positions {
            if pos.len() != self.num_aps {
                return fail(format!("{} explicit AP positions given for L = {}", pos.len(), self.num_aps));
            }
            if pos.iter().flatten().any(|x| !x.is_finite()) {
                return fail("AP positions must be finite".into());
            }
        }
        Ok(())
    }

    /// Weights with the all-ones default applied.
    pub fn weights_or_uniform(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![1.0; self.num_ues])
    }

    /// Noise power `-174 + 10 log10(B) + F` in dBm.
    pub fn noise_power_dbm(&self) -> f64 {
        THERMAL_NOISE_DBM_HZ + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db
    }

    pub fn power_budget_mw(&self) -> f64 {
        db_to_linear(self.power_budget_dbm)
    }
}

pub(crate) fn validate_weights(w: &[f64], k: usize) -> Result<()> {
    if w.len() != k {
        return Err(Error::Config(format!("{} weights given for K = {k}", w.len())));
    }
    if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Config("weights must be finite and strictly positive".into()));
    }
    Ok(())
}

/// Regular `sqrt(L) x sqrt(L)` AP grid at the cell centers of a uniform
/// partition of the square area, or the explicit positions if configured.
pub fn build_ap_grid(config: &NetworkConfig) -> Result<Vec<[f64; 2]>> {
    if let Some(pos) = &config.ap_positions {
        return Ok(pos.clone());
    }
    let side = (config.num_aps as f64).sqrt().round() as usize;
    if side * side != config.num_aps {
        return Err(Error::Config(format!(
            "L = {} is not a perfect square; supply ap_positions explicitly",
            config.num_aps
        )));
    }
    let cell = config.area_side_m / side as f64;
    let coord = |i: usize| (i as f64 + 0.5) * cell;
    Ok((0..side).flat_map(|iy| (0..side).map(move |ix| [coord(ix), coord(iy)])).collect())
}

pub fn drop_ues(config: &NetworkConfig, rng: &mut impl Rng) -> Vec<[f64; 2]> {
    (0..config.num_ues)
        .map(|_| [rng.random::<f64>() * config.area_side_m, rng.random::<f64>() * config.area_side_m])
        .collect()
}

fn planar_distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Shadowing covariance between two UEs at distance `delta` (meters).
pub fn shadow_covariance(std_db: f64, corr_dist_m: f64, delta: f64) -> f64 {
    std_db * std_db * 2f64.powf(-delta / corr_dist_m)
}

/// Samples the `L x K` shadowing matrix (dB). Each AP row is an independent
/// zero-mean Gaussian vector with covariance `rho^2 2^(-delta_ki / d0)`,
/// realized through the symmetric square root of the covariance. UEs sharing
/// the exact same position get identical shadowing.
pub fn sample_shadow_fading(
    config: &NetworkConfig,
    ue_positions: &[[f64; 2]],
    rng: &mut impl Rng,
) -> Result<DMatrix<f64>> {
    let (l_count, k_count) = (config.num_aps, ue_positions.len());
    let rho = config.shadow_std_db;
    if rho == 0.0 {
        return Ok(DMatrix::zeros(l_count, k_count));
    }

    // Co-located UEs are merged so that their rows match bit-for-bit.
    let mut unique: Vec<[f64; 2]> = Vec::new();
    let owner: Vec<usize> = ue_positions
        .iter()
        .map(|p| match unique.iter().position(|q| q == p) {
            Some(i) => i,
            None => {
                unique.push(*p);
                unique.len() - 1
            }
        })
        .collect();

    let u = unique.len();
    let cov = DMatrix::from_fn(u, u, |i, j| {
        shadow_covariance(rho, config.shadow_corr_dist_m, planar_distance(&unique[i], &unique[j]))
    });
    let sqrt_cov = symmetric_sqrt(cov, rho * rho)?;

    let mut z = DMatrix::zeros(l_count, k_count);
    for l in 0..l_count {
        let w = DVector::from_fn(u, |_, _| rng.sample::<f64, _>(StandardNormal));
        let row = &sqrt_cov * w;
        for (k, &o) in owner.iter().enumerate() {
            z[(l, k)] = row[o];
        }
    }
    Ok(z)
}

/// `C^{1/2} = U diag(sqrt(max(lambda, 0))) U^T`, rejecting matrices that are
/// indefinite beyond round-off.
fn symmetric_sqrt(cov: DMatrix<f64>, scale: f64) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(cov);
    let min = eig.eigenvalues.min();
    if min < -1e-9 * scale * eig.eigenvalues.len() as f64 {
        return Err(Error::Internal(format!(
            "shadowing covariance is not positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&roots) * q.transpose())
}

/// Noise-normalized linear gains
/// `gamma_dB = -a log10(D) - b + Z - sigma^2_dBm`, with `D` the 3D distance.
pub fn compute_gains(
    config: &NetworkConfig,
    ap_positions: &[[f64; 2]],
    ue_positions: &[[f64; 2]],
    shadow_db: &DMatrix<f64>,
) -> DMatrix<f64> {
    let noise_dbm = config.noise_power_dbm();
    DMatrix::from_fn(ap_positions.len(), ue_positions.len(), |l, k| {
        let planar = planar_distance(&ap_positions[l], &ue_positions[k]);
        let d = planar.hypot(config.ap_height_delta_m);
        let db =
            -config.pathloss_exponent_coeff * d.log10() - config.pathloss_intercept_db + shadow_db[(l, k)] - noise_dbm;
        db_to_linear(db)
    })
}

/// For each UE, the indices of its `q` strongest APs in decreasing-gain order
/// (ties go to the smaller AP index).
pub fn cluster_users(gains: &DMatrix<f64>, q: usize) -> Vec<Vec<usize>> {
    (0..gains.ncols())
        .map(|k| {
            let mut idx: Vec<usize> = (0..gains.nrows()).collect();
            idx.sort_by(|&a, &b| gains[(b, k)].total_cmp(&gains[(a, k)]));
            idx.truncate(q);
            idx
        })
        .collect()
}

/// Immutable description of one network drop.
#[derive(Debug, Clone)]
pub struct NetworkScenario {
    pub ap_positions: Vec<[f64; 2]>,
    pub ue_positions: Vec<[f64; 2]>,
    /// `L x K` noise-normalized linear gains.
    pub gains: DMatrix<f64>,
    /// Serving APs of each UE, strongest first.
    pub clusters: Vec<Vec<usize>>,
    serving_mask: DMatrix<bool>,
    pub antennas_per_ap: usize,
    /// Per-UE budget `P` in milliwatts.
    pub power_budget: f64,
    pub weights: Vec<f64>,
}

impl NetworkScenario {
    /// Builds the drop for `config.seed`.
    pub fn from_config(config: &NetworkConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(SCENARIO_STREAM);
        let aps = build_ap_grid(config)?;
        let ues = drop_ues(config, &mut rng);
        let shadow = sample_shadow_fading(config, &ues, &mut rng)?;
        let gains = compute_gains(config, &aps, &ues, &shadow);
        let clusters = cluster_users(&gains, config.cluster_size);
        Self::with_clusters(
            aps,
            ues,
            gains,
            clusters,
            config.antennas_per_ap,
            config.power_budget_mw(),
            config.weights_or_uniform(),
        )
    }

    /// Assembles a scenario from explicit parts, checking every invariant
    /// (positive gains, distinct cluster members of equal size, clusters made
    /// of the strongest APs, positive budget and weights).
    pub fn with_clusters(
        ap_positions: Vec<[f64; 2]>,
        ue_positions: Vec<[f64; 2]>,
        gains: DMatrix<f64>,
        clusters: Vec<Vec<usize>>,
        antennas_per_ap: usize,
        power_budget: f64,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let (l_count, k_count) = gains.shape();
        let bad = |m: String| Err(Error::InvalidInput(m));
        if ap_positions.len() != l_count || ue_positions.len() != k_count || clusters.len() != k_count {
            return bad("scenario dimensions disagree".into());
        }
        if antennas_per_ap == 0 {
            return bad("N must be at least 1".into());
        }
        if gains.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return bad("gains must be finite and strictly positive".into());
        }
        if !(power_budget.is_finite() && power_budget > 0.0) {
            return bad("power budget must be positive".into());
        }
        validate_weights(&weights, k_count)?;
        let q = clusters.first().map_or(0, Vec::len);
        let mut serving_mask = DMatrix::from_element(l_count, k_count, false);
        for (k, cluster) in clusters.iter().enumerate() {
            if cluster.len() != q || q == 0 {
                return bad(format!("cluster of UE {k} has size {}, expected {q}", cluster.len()));
            }
            for &l in cluster {
                if l >= l_count || serving_mask[(l, k)] {
                    return bad(format!("cluster of UE {k} has an invalid or repeated AP {l}"));
                }
                serving_mask[(l, k)] = true;
            }
            let weakest_in = cluster.iter().map(|&l| gains[(l, k)]).fold(f64::INFINITY, f64::min);
            let strongest_out =
                (0..l_count).filter(|&l| !serving_mask[(l, k)]).map(|l| gains[(l, k)]).fold(0.0, f64::max);
            if weakest_in < strongest_out {
                return bad(format!("cluster of UE {k} does not hold its strongest APs"));
            }
        }
        Ok(Self { ap_positions, ue_positions, gains, clusters, serving_mask, antennas_per_ap, power_budget, weights })
    }

    pub fn num_aps(&self) -> usize {
        self.gains.nrows()
    }

    pub fn num_ues(&self) -> usize {
        self.gains.ncols()
    }

    pub fn cluster_size(&self) -> usize {
        self.clusters[0].len()
    }

    pub fn is_serving(&self, l: usize, k: usize) -> bool {
        self.serving_mask[(l, k)]
    }

    pub fn serving_mask(&self) -> &DMatrix<bool> {
        &self.serving_mask
    }

    /// UEs served by AP `l`, in increasing index order.
    pub fn served_ues(&self, l: usize) -> Vec<usize> {
        (0..self.num_ues()).filter(|&k| self.serving_mask[(l, k)]).collect()
    }

    /// Same drop with different max-min weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        validate_weights(&weights, self.num_ues())?;
        Ok(Self { weights, ..self.clone() })
    }

    pub fn dump(&self) -> ScenarioDump {
        ScenarioDump {
            num_aps: self.num_aps(),
            num_ues: self.num_ues(),
            antennas_per_ap: self.antennas_per_ap,
            cluster_size: self.cluster_size(),
            ap_positions: self.ap_positions.clone(),
            ue_positions: self.ue_positions.clone(),
            clusters: self.clusters.clone(),
            gains_db: (0..self.num_aps())
                .map(|l| (0..self.num_ues()).map(|k| crate::linear_to_db(self.gains[(l, k)])).collect())
                .collect(),
            power_budget_mw: self.power_budget,
            weights: self.weights.clone(),
        }
    }
}

/// JSON layout of a scenario for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDump {
    #[serde(rename = "L")]
    pub num_aps: usize,
    #[serde(rename = "K")]
    pub num_ues: usize,
    #[serde(rename = "N")]
    pub antennas_per_ap: usize,
    #[serde(rename = "Q")]
    pub cluster_size: usize,
    pub ap_positions: Vec<[f64; 2]>,
    pub ue_positions: Vec<[f64; 2]>,
    pub clusters: Vec<Vec<usize>>,
    /// `gains_db[l][k]`, noise-normalized.
    pub gains_db: Vec<Vec<f64>>,
    pub power_budget_mw: f64,
    pub weights: Vec<f64>,
}
