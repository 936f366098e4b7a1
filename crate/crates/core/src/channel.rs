//! Monte Carlo channel ensemble and per-AP local CSI.
//!
//! Each realization is an `NL x K` matrix; block `h_{l,k}` is
//! `CN(0, gamma_{l,k} I_N)`, independent across APs, UEs and samples. The
//! ensemble is drawn once and then used as a fixed training set, so every
//! expectation in the crate is a weighted sum over its samples. Ensembles
//! built from finite probability spaces carry non-uniform weights.

use std::io::{Read, Write};

use nalgebra::DMatrixView;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scenario::NetworkScenario;
use crate::{CMatrix, Error, Result, C64};

pub(crate) const ENSEMBLE_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEnsemble {
    antennas_per_ap: usize,
    num_aps: usize,
    num_ues: usize,
    seed: u64,
    samples: Vec<CMatrix>,
    /// Probability of each sample; sums to one.
    weights: Vec<f64>,
}

/// Draws `n_sim` i.i.d. realizations for `scenario`. Real and imaginary parts
/// of every entry are independent `N(0, gamma_{l,k} / 2)`.
pub fn sample_ensemble(scenario: &NetworkScenario, n_sim: usize, seed: u64) -> Result<ChannelEnsemble> {
    if n_sim == 0 {
        return Err(Error::InvalidInput("n_sim must be at least 1".into()));
    }
    let (n, l_count, k_count) = (scenario.antennas_per_ap, scenario.num_aps(), scenario.num_ues());
    let std = scenario.gains.map(|g| (g / 2.0).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ENSEMBLE_STREAM);
    let samples = (0..n_sim)
        .map(|_| {
            let mut h = CMatrix::zeros(n * l_count, k_count);
            for l in 0..l_count {
                for k in 0..k_count {
                    let s = std[(l, k)];
                    for i in 0..n {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        h[(l * n + i, k)] = C64::new(s * re, s * im);
                    }
                }
            }
            h
        })
        .collect();
    Ok(ChannelEnsemble {
        antennas_per_ap: n,
        num_aps: l_count,
        num_ues: k_count,
        seed,
        samples,
        weights: vec![1.0 / n_sim as f64; n_sim],
    })
}

impl ChannelEnsemble {
    /// Ensemble over explicit samples with the given probabilities, e.g. the
    /// atoms of a finite probability space.
    pub fn from_weighted_samples(
        antennas_per_ap: usize,
        num_aps: usize,
        samples: Vec<CMatrix>,
        probabilities: Vec<f64>,
    ) -> Result<Self> {
        if samples.is_empty() || samples.len() != probabilities.len() {
            return Err(Error::InvalidInput("need one probability per sample".into()));
        }
        let num_ues = samples[0].ncols();
        if samples.iter().any(|h| h.shape() != (antennas_per_ap * num_aps, num_ues)) {
            return Err(Error::InvalidInput("sample shapes disagree".into()));
        }
        if probabilities.iter().any(|p| !(p.is_finite() && *p > 0.0))
            || (probabilities.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidInput("probabilities must be positive and sum to one".into()));
        }
        Ok(Self { antennas_per_ap, num_aps, num_ues, seed: 0, samples, weights: probabilities })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn antennas_per_ap(&self) -> usize {
        self.antennas_per_ap
    }

    pub fn num_aps(&self) -> usize {
        self.num_aps
    }

    pub fn num_ues(&self) -> usize {
        self.num_ues
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample(&self, s: usize) -> &CMatrix {
        &self.samples[s]
    }

    pub fn samples(&self) -> &[CMatrix] {
        &self.samples
    }

    pub fn weight(&self, s: usize) -> f64 {
        self.weights[s]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `N x K` block `H_l` of sample `s`.
    pub fn ap_block(&self, s: usize, l: usize) -> DMatrixView<'_, C64> {
        self.samples[s].rows(l * self.antennas_per_ap, self.antennas_per_ap)
    }

    fn check_compatible(&self, scenario: &NetworkScenario) -> Result<()> {
        if (self.num_aps, self.num_ues, self.antennas_per_ap)
            != (scenario.num_aps(), scenario.num_ues(), scenario.antennas_per_ap)
        {
            return Err(Error::InvalidInput("ensemble and scenario dimensions disagree".into()));
        }
        Ok(())
    }

    /// Writes the documented binary layout: five little-endian `u64` header
    /// words `n_sim, N, L, K, seed`, then for every sample the `NL x K`
    /// matrix in row-major order as `(re, im)` little-endian `f64` pairs.
    /// Only equally weighted ensembles can be dumped.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        let uniform = 1.0 / self.len() as f64;
        if self.weights.iter().any(|&p| p != uniform) {
            return Err(Error::InvalidInput("only equally weighted ensembles can be dumped".into()));
        }
        for word in
            [self.len() as u64, self.antennas_per_ap as u64, self.num_aps as u64, self.num_ues as u64, self.seed]
        {
            w.write_all(&word.to_le_bytes())?;
        }
        for h in &self.samples {
            for r in 0..h.nrows() {
                for c in 0..h.ncols() {
                    w.write_all(&h[(r, c)].re.to_le_bytes())?;
                    w.write_all(&h[(r, c)].im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut header = [0u64; 5];
        for h in header.iter_mut() {
            r.read_exact(&mut word)?;
            *h = u64::from_le_bytes(word);
        }
        let [n_sim, n, l, k, seed] = header.map(|v| v as usize);
        if n_sim == 0 || n == 0 || l == 0 || k == 0 {
            return Err(Error::InvalidInput("ensemble header has a zero dimension".into()));
        }
        let mut read_f64 = || -> Result<f64> {
            r.read_exact(&mut word)?;
            Ok(f64::from_le_bytes(word))
        };
        let mut samples = Vec::with_capacity(n_sim);
        for _ in 0..n_sim {
            let mut h = CMatrix::zeros(n * l, k);
            for row in 0..n * l {
                for col in 0..k {
                    let re = read_f64()?;
                    let im = read_f64()?;
                    h[(row, col)] = C64::new(re, im);
                }
            }
            samples.push(h);
        }
        Ok(Self {
            antennas_per_ap: n,
            num_aps: l,
            num_ues: k,
            seed: seed as u64,
            samples,
            weights: vec![1.0 / n_sim as f64; n_sim],
        })
    }
}

/// What AP `l` knows: its own block with the columns of UEs it does not
/// serve replaced by their (zero) mean.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCsiView {
    pub ap: usize,
    /// `served[k]` is true iff `l` belongs to the cluster of UE `k`.
    pub served: Vec<bool>,
    /// One `N x K` matrix per ensemble sample.
    pub samples: Vec<CMatrix>,
}

impl LocalCsiView {
    /// Applies the masking rule again; the identity on a view.
    pub fn masked(&self) -> LocalCsiView {
        LocalCsiView {
            ap: self.ap,
            served: self.served.clone(),
            samples: self.samples.iter().map(|h| mask_columns(h, &self.served)).collect(),
        }
    }
}

fn mask_columns<S>(h: &nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::Dyn, S>, served: &[bool]) -> CMatrix
where
    S: nalgebra::RawStorage<C64, nalgebra::Dyn, nalgebra::Dyn>,
{
    CMatrix::from_fn(h.nrows(), h.ncols(), |i, k| if served[k] { h[(i, k)] } else { C64::new(0.0, 0.0) })
}

pub fn local_view(ensemble: &ChannelEnsemble, scenario: &NetworkScenario, l: usize) -> Result<LocalCsiView> {
    ensemble.check_compatible(scenario)?;
    if l >= ensemble.num_aps {
        return Err(Error::InvalidInput(format!("AP index {l} out of range")));
    }
    let served: Vec<bool> = (0..ensemble.num_ues).map(|k| scenario.is_serving(l, k)).collect();
    let samples = (0..ensemble.len()).map(|s| mask_columns(&ensemble.ap_block(s, l), &served)).collect();
    Ok(LocalCsiView { ap: l, served, samples })
}

pub(crate) fn ensure_compatible(ensemble: &ChannelEnsemble, scenario: &NetworkScenario) -> Result<()> {
    ensemble.check_compatible(scenario)
}
