//! Distributed beamformers under local CSI and user-centric clustering.
//!
//! The team-MMSE beamformer of UE `k` has the two-stage form
//! `v_{l,k} = V_l c_{l,k}`:
//!
//! - a *local* MMSE stage computed by AP `l` from its own CSI only,
//!   `V_l = (Ĥ_l P Ĥ_l^H + psi_l I)^{-1} Ĥ_l P^{1/2}`, where `psi_l` adds the
//!   average power of the UEs that AP `l` does not know;
//! - a *statistical* stage `c_{l,k}`, a long-term vector solving
//!   `c_{l,k} + sum_{j in L_k, j != l} Pi_j c_{j,k} = e_k` for `l in L_k`,
//!   with `Pi_j = E[P^{1/2} Ĥ_j^H V_j]`.
//!
//! A [`BeamformerSet`] stores only the long-term parameters (`psi`, `c`, the
//! power vector and the clusters); realizations are recomputed per sample.
//! Because [`BeamformerSet::realize_local`] takes nothing but one AP's local
//! CSI, the information constraint holds by construction.

use nalgebra::Cholesky;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ensure_compatible, ChannelEnsemble};
use crate::scenario::NetworkScenario;
use crate::{CMatrix, CVector, Error, Result, C64, REDUCTION_CHUNK};

/// Statistical-stage systems whose LU pivots spread beyond this ratio are
/// reported as singular.
const MAX_CONDITION: f64 = 1e13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamformingRule {
    TeamMmse,
    MatchedFilter,
}

/// Long-term parameters of one beamformer per UE.
#[derive(Debug, Clone)]
pub struct BeamformerSet {
    rule: BeamformingRule,
    powers: Vec<f64>,
    /// `psi_l` per AP (team MMSE only).
    psi: Vec<f64>,
    clusters: Vec<Vec<usize>>,
    /// UEs served by each AP, increasing.
    served: Vec<Vec<usize>>,
    /// `c[k][i]` is `c_{l,k}` for `l = clusters[k][i]` (team MMSE only).
    c: Vec<Vec<CVector>>,
    /// Per AP: column `i` holds `c_{l,k}` restricted to the served UEs of `l`,
    /// for `k = served[l][i]`. Zero columns of `V_l` make the other entries
    /// irrelevant.
    mixing: Vec<CMatrix>,
    antennas_per_ap: usize,
}

/// Per-AP statistical matrices `Pi_l` (`K x K`).
#[derive(Debug, Clone, PartialEq)]
pub struct PiMatrices(pub Vec<CMatrix>);

/// One realization of every beamformer: `blocks[k][i] = v_{l,k}` for
/// `l = clusters[k][i]`. Blocks of non-serving APs are zero and not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedBeamformers {
    pub blocks: Vec<Vec<CVector>>,
}

impl RealizedBeamformers {
    /// Full `NL` vector of UE `k`.
    pub fn stacked(&self, set: &BeamformerSet, k: usize, num_aps: usize) -> CVector {
        let n = set.antennas_per_ap;
        let mut v = CVector::zeros(n * num_aps);
        for (&l, block) in set.clusters[k].iter().zip(&self.blocks[k]) {
            v.rows_mut(l * n, n).copy_from(block);
        }
        v
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

/// Columns `idx` of an `N x K` local channel.
fn select_columns<S>(h: &nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::Dyn, S>, idx: &[usize]) -> CMatrix
where
    S: nalgebra::RawStorage<C64, nalgebra::Dyn, nalgebra::Dyn>,
{
    CMatrix::from_fn(h.nrows(), idx.len(), |i, j| h[(i, idx[j])])
}

/// `(H diag(p) H^H + psi I)^{-1} H diag(p)^{1/2}` for an `N x S` channel.
fn local_mmse(h: &CMatrix, p: &[f64], psi: f64) -> CMatrix {
    let n = h.nrows();
    let mut hp = h.clone();
    let mut hs = h.clone();
    for (j, &pj) in p.iter().enumerate() {
        hp.column_mut(j).scale_mut(pj);
        hs.column_mut(j).scale_mut(pj.sqrt());
    }
    let mut gram = hp * h.adjoint();
    for i in 0..n {
        gram[(i, i)] += C64::new(psi, 0.0);
    }
    // psi > 0 keeps the Gram matrix positive definite.
    let chol = Cholesky::new(gram).expect("regularized Gram matrix is positive definite");
    chol.solve(&hs)
}

/// Local MMSE stage for one sample of local CSI (`N x K`, unknown columns
/// zero): `V_l = (Ĥ diag(p) Ĥ^H + psi I_N)^{-1} Ĥ diag(p)^{1/2}`.
pub fn local_stage(h_hat: &CMatrix, p: &[f64], psi: f64) -> Result<CMatrix> {
    check_powers(p, h_hat.ncols())?;
    if !(psi.is_finite() && psi > 0.0) {
        return Err(Error::InvalidInput("psi must be positive".into()));
    }
    Ok(local_mmse(h_hat, p, psi))
}

/// `psi_l = 1 + sum_{k : l not in L_k} p_k gamma_{l,k}`.
pub fn augmented_noise(scenario: &NetworkScenario, p: &[f64]) -> Vec<f64> {
    (0..scenario.num_aps())
        .map(|l| {
            1.0 + (0..scenario.num_ues())
                .filter(|&k| !scenario.is_serving(l, k))
                .map(|k| p[k] * scenario.gains[(l, k)])
                .sum::<f64>()
        })
        .collect()
}

/// Empirical `Pi_l = E[diag(p)^{1/2} Ĥ_l^H V_l]` over the ensemble.
pub fn estimate_pi(
    ensemble: &ChannelEnsemble,
    scenario: &NetworkScenario,
    p: &[f64],
    psi: &[f64],
) -> Result<PiMatrices> {
    ensure_compatible(ensemble, scenario)?;
    let k_count = scenario.num_ues();
    check_powers(p, k_count)?;
    let served: Vec<Vec<usize>> = (0..scenario.num_aps()).map(|l| scenario.served_ues(l)).collect();
    let p_served: Vec<Vec<f64>> = served.iter().map(|s| s.iter().map(|&k| p[k]).collect()).collect();

    let zero = || -> Vec<CMatrix> { served.iter().map(|s| CMatrix::zeros(s.len(), s.len())).collect() };
    let indices: Vec<usize> = (0..ensemble.len()).collect();
    let partials: Vec<Vec<CMatrix>> = indices
        .par_chunks(REDUCTION_CHUNK)
        .map(|chunk| {
            let mut acc = zero();
            for &s in chunk {
                let w = ensemble.weight(s);
                for (l, idx) in served.iter().enumerate() {
                    if idx.is_empty() {
                        continue;
                    }
                    let h = select_columns(&ensemble.ap_block(s, l), idx);
                    let v = local_mmse(&h, &p_served[l], psi[l]);
                    let mut term = h.ad_mul(&v);
                    for (i, &pk) in p_served[l].iter().enumerate() {
                        term.row_mut(i).scale_mut(pk.sqrt() * w);
                    }
                    acc[l] += term;
                }
            }
            acc
        })
        .collect();
    let mut total = zero();
    for part in partials {
        for (t, x) in total.iter_mut().zip(part) {
            *t += x;
        }
    }

    let pis = total
        .into_iter()
        .zip(&served)
        .map(|(compact, idx)| {
            let mut full = CMatrix::zeros(k_count, k_count);
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    full[(i, j)] = compact[(a, b)];
                }
            }
            full
        })
        .collect();
    Ok(PiMatrices(pis))
}

/// Solves the `QK x QK` statistical-stage system of UE `k`, returning
/// `c_{l,k}` for `l` in `cluster` order.
pub fn solve_statistical_stage(pi: &PiMatrices, cluster: &[usize], k: usize) -> Result<Vec<CVector>> {
    let k_count = pi.0.first().map_or(0, |m| m.nrows());
    if k >= k_count || cluster.iter().any(|&l| l >= pi.0.len()) {
        return Err(Error::InvalidInput("UE or AP index out of range".into()));
    }
    let q = cluster.len();
    let dim = q * k_count;
    let mut a = CMatrix::identity(dim, dim);
    for (bi, _) in cluster.iter().enumerate() {
        for (bj, &j) in cluster.iter().enumerate() {
            if bi != bj {
                a.view_mut((bi * k_count, bj * k_count), (k_count, k_count)).copy_from(&pi.0[j]);
            }
        }
    }
    let mut rhs = CVector::zeros(dim);
    for b in 0..q {
        rhs[b * k_count + k] = C64::new(1.0, 0.0);
    }

    let lu = a.lu();
    let pivots = lu.u().diagonal().map(|z| z.norm());
    let (lo, hi) = (pivots.min(), pivots.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::SingularSystem { ue: k, condition });
    }
    let x = lu.solve(&rhs).ok_or(Error::SingularSystem { ue: k, condition })?;
    Ok((0..q).map(|b| x.rows(b * k_count, k_count).into_owned()).collect())
}

/// Team-MMSE beamformers for power vector `p` on the given training set.
pub fn build_team_mmse(ensemble: &ChannelEnsemble, scenario: &NetworkScenario, p: &[f64]) -> Result<BeamformerSet> {
    ensure_compatible(ensemble, scenario)?;
    check_powers(p, scenario.num_ues())?;
    let psi = augmented_noise(scenario, p);
    let pi = estimate_pi(ensemble, scenario, p, &psi)?;
    let c: Vec<Vec<CVector>> = scenario
        .clusters
        .par_iter()
        .enumerate()
        .map(|(k, cluster)| solve_statistical_stage(&pi, cluster, k))
        .collect::<Result<_>>()?;
    Ok(BeamformerSet::assemble(BeamformingRule::TeamMmse, scenario, p.to_vec(), psi, c))
}

/// Conjugate beamforming on local CSI: `v_{l,k} = ĥ_{l,k}`.
pub fn build_matched_filter(ensemble: &ChannelEnsemble, scenario: &NetworkScenario) -> Result<BeamformerSet> {
    ensure_compatible(ensemble, scenario)?;
    Ok(BeamformerSet::assemble(BeamformingRule::MatchedFilter, scenario, Vec::new(), Vec::new(), Vec::new()))
}

/// Builds beamformers of either rule at power `p` (ignored by the matched
/// filter).
pub fn build(
    rule: BeamformingRule,
    ensemble: &ChannelEnsemble,
    scenario: &NetworkScenario,
    p: &[f64],
) -> Result<BeamformerSet> {
    match rule {
        BeamformingRule::TeamMmse => build_team_mmse(ensemble, scenario, p),
        BeamformingRule::MatchedFilter => build_matched_filter(ensemble, scenario),
    }
}

impl BeamformerSet {
    fn assemble(
        rule: BeamformingRule,
        scenario: &NetworkScenario,
        powers: Vec<f64>,
        psi: Vec<f64>,
        c: Vec<Vec<CVector>>,
    ) -> Self {
        let served: Vec<Vec<usize>> = (0..scenario.num_aps()).map(|l| scenario.served_ues(l)).collect();
        let mixing = if rule == BeamformingRule::TeamMmse {
            served
                .iter()
                .enumerate()
                .map(|(l, idx)| {
                    CMatrix::from_fn(idx.len(), idx.len(), |a, b| {
                        let k = idx[b];
                        let pos = scenario.clusters[k].iter().position(|&x| x == l).expect("l serves k");
                        c[k][pos][idx[a]]
                    })
                })
                .collect()
        } else {
            Vec::new()
        };
        Self {
            rule,
            powers,
            psi,
            clusters: scenario.clusters.clone(),
            served,
            c,
            mixing,
            antennas_per_ap: scenario.antennas_per_ap,
        }
    }

    pub fn rule(&self) -> BeamformingRule {
        self.rule
    }

    /// Power vector the set was built for (empty for the matched filter).
    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// `c_{l,k}` if `l` serves `k`, `None` otherwise (or for the matched
    /// filter).
    pub fn statistical_vector(&self, l: usize, k: usize) -> Option<&CVector> {
        let pos = self.clusters[k].iter().position(|&x| x == l)?;
        self.c.get(k).map(|ck| &ck[pos])
    }

    pub fn num_ues(&self) -> usize {
        self.clusters.len()
    }

    /// Beamformer blocks `v_{l,k}` of every UE served by AP `l`, computed
    /// from AP `l`'s local CSI alone (`N x K`; only served columns are read).
    pub fn realize_local<S>(
        &self,
        l: usize,
        h_local: &nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::Dyn, S>,
    ) -> Vec<(usize, CVector)>
    where
        S: nalgebra::RawStorage<C64, nalgebra::Dyn, nalgebra::Dyn>,
    {
        let idx = &self.served[l];
        if idx.is_empty() {
            return Vec::new();
        }
        let h = select_columns(h_local, idx);
        let out = match self.rule {
            BeamformingRule::MatchedFilter => h,
            BeamformingRule::TeamMmse => {
                let p: Vec<f64> = idx.iter().map(|&k| self.powers[k]).collect();
                local_mmse(&h, &p, self.psi[l]) * &self.mixing[l]
            }
        };
        idx.iter().enumerate().map(|(i, &k)| (k, out.column(i).into_owned())).collect()
    }

    /// All beamformers on sample `s` of the ensemble.
    pub fn realize(&self, ensemble: &ChannelEnsemble, s: usize) -> RealizedBeamformers {
        let mut blocks: Vec<Vec<CVector>> =
            self.clusters.iter().map(|c| vec![CVector::zeros(self.antennas_per_ap); c.len()]).collect();
        for l in 0..self.served.len() {
            for (k, v) in self.realize_local(l, &ensemble.ap_block(s, l)) {
                let pos = self.clusters[k].iter().position(|&x| x == l).expect("l serves k");
                blocks[k][pos] = v;
            }
        }
        RealizedBeamformers { blocks }
    }

    /// Serializable long-term parameters.
    pub fn long_term_params(&self) -> LongTermParams {
        let mut c = Vec::new();
        for (k, cluster) in self.clusters.iter().enumerate() {
            for (i, &l) in cluster.iter().enumerate() {
                if let Some(vec) = self.c.get(k).map(|ck| &ck[i]) {
                    c.push(StatisticalVector { ap: l, ue: k, c: vec.iter().flat_map(|z| [z.re, z.im]).collect() });
                }
            }
        }
        LongTermParams {
            rule: self.rule,
            powers: self.powers.clone(),
            psi: self.psi.clone(),
            clusters: self.clusters.clone(),
            c,
        }
    }
}

/// JSON dump of a beamformer set. `c` lists every served `(l, k)` pair with
/// `c_{l,k}` as interleaved `[re0, im0, re1, im1, ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongTermParams {
    pub rule: BeamformingRule,
    pub powers: Vec<f64>,
    pub psi: Vec<f64>,
    pub clusters: Vec<Vec<usize>>,
    pub c: Vec<StatisticalVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticalVector {
    pub ap: usize,
    pub ue: usize,
    pub c: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{local_view, sample_ensemble};
    use crate::scenario::NetworkConfig;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};

    fn complex_diag(x: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(x.len(), x.iter().map(|&v| C64::new(v, 0.0))))
    }
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn scenario(l: usize, k: usize, q: usize, n: usize, seed: u64) -> NetworkScenario {
        let cfg = NetworkConfig {
            num_aps: l,
            num_ues: k,
            cluster_size: q,
            antennas_per_ap: n,
            n_sim: 1,
            seed,
            ..Default::default()
        };
        NetworkScenario::from_config(&cfg).unwrap()
    }

    #[test]
    fn scalar_local_stage() {
        let h = CMatrix::from_element(1, 1, c(1.0));
        let v = local_stage(&h, &[1.0], 1.0).unwrap();
        assert_relative_eq!(v[(0, 0)].re, 0.5, epsilon = 1e-15);
        let zero = local_stage(&h, &[0.0], 1.0).unwrap();
        assert_eq!(zero[(0, 0)], c(0.0));
        assert!(local_stage(&h, &[1.0], 0.0).is_err());
    }

    #[test]
    fn local_stage_push_through_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, k) in [(4, 3), (2, 5), (3, 3)] {
            let h = CMatrix::from_fn(n, k, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let p: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 3.0).collect();
            let psi = 1.0 + rng.random::<f64>();
            let v = local_stage(&h, &p, psi).unwrap();
            let sq = complex_diag(&p.iter().map(|x| x.sqrt()).collect::<Vec<_>>());
            let inner = &sq * h.adjoint() * &h * &sq + CMatrix::identity(k, k) * c(psi);
            let alt = &h * &sq * inner.try_inverse().unwrap();
            assert!((v - alt).norm() < 1e-10);
        }
    }

    #[test]
    fn full_cooperation_has_unit_psi() {
        let sc = scenario(4, 6, 4, 2, 1);
        assert!(augmented_noise(&sc, &[1.0; 6]).iter().all(|&x| x == 1.0));
    }

    #[test]
    fn scalar_pi() {
        let ens =
            ChannelEnsemble::from_weighted_samples(1, 1, vec![CMatrix::from_element(1, 1, c(1.0))], vec![1.0]).unwrap();
        let sc = NetworkScenario::with_clusters(
            vec![[0.0, 0.0]],
            vec![[0.0, 0.0]],
            DMatrix::from_element(1, 1, 1.0),
            vec![vec![0]],
            1,
            1.0,
            vec![1.0],
        )
        .unwrap();
        let pi = estimate_pi(&ens, &sc, &[1.0], &[1.0]).unwrap();
        assert_relative_eq!(pi.0[0][(0, 0)].re, 0.5, epsilon = 1e-15);
        let pi0 = estimate_pi(&ens, &sc, &[0.0], &[1.0]).unwrap();
        assert_eq!(pi0.0[0][(0, 0)], c(0.0));
    }

    #[test]
    fn statistical_stage_small_cases() {
        // Pi = 0 decouples the blocks.
        let zero = PiMatrices(vec![CMatrix::zeros(3, 3); 4]);
        let sol = solve_statistical_stage(&zero, &[2, 0, 3], 1).unwrap();
        let e1 = CVector::from_vec(vec![c(0.0), c(1.0), c(0.0)]);
        assert!(sol.iter().all(|v| *v == e1));

        // Q = 1: no coupling whatever Pi is.
        let some = PiMatrices(vec![CMatrix::from_element(3, 3, c(0.3)); 2]);
        assert_eq!(solve_statistical_stage(&some, &[1], 2).unwrap()[0][2], c(1.0));

        // c1 + 0.5 c2 = 1, c2 + 0.5 c1 = 1  =>  c1 = c2 = 2/3.
        let half = PiMatrices(vec![CMatrix::from_element(1, 1, c(0.5)); 2]);
        let sol = solve_statistical_stage(&half, &[0, 1], 0).unwrap();
        for v in sol {
            assert_relative_eq!(v[0].re, 2.0 / 3.0, epsilon = 1e-15);
            assert_eq!(v[0].im, 0.0);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let pi = PiMatrices(vec![CMatrix::from_element(1, 1, c(1.0)); 2]);
        match solve_statistical_stage(&pi, &[0, 1], 0) {
            Err(Error::SingularSystem { ue: 0, condition }) => assert!(condition > MAX_CONDITION),
            other => panic!("expected singular system, got {other:?}"),
        }
    }

    #[test]
    fn single_ap_reduces_to_centralized_mmse() {
        let sc = scenario(1, 3, 1, 4, 2);
        let ens = sample_ensemble(&sc, 5, 9).unwrap();
        let p = [2.0, 0.5, 1.0];
        let set = build_team_mmse(&ens, &sc, &p).unwrap();
        assert_eq!(set.psi(), &[1.0]);
        for k in 0..3 {
            let ck = set.statistical_vector(0, k).unwrap();
            assert!(ck.iter().enumerate().all(|(i, z)| *z == if i == k { c(1.0) } else { c(0.0) }));
        }
        for s in 0..5 {
            let h = ens.sample(s);
            let v = local_stage(h, &p, 1.0).unwrap();
            let r = set.realize(&ens, s);
            for k in 0..3 {
                assert!((&r.blocks[k][0] - v.column(k)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_power_gives_unit_statistical_stage() {
        let sc = scenario(4, 5, 2, 2, 4);
        let ens = sample_ensemble(&sc, 6, 1).unwrap();
        let set = build_team_mmse(&ens, &sc, &[0.0; 5]).unwrap();
        for k in 0..5 {
            for &l in &sc.clusters[k] {
                let ck = set.statistical_vector(l, k).unwrap();
                assert_eq!(ck[k], c(1.0));
                assert_eq!(ck.iter().filter(|z| z.norm() != 0.0).count(), 1);
            }
        }
        let r = set.realize(&ens, 0);
        assert!(r.blocks.iter().flatten().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn realization_uses_local_csi_only() {
        let sc = scenario(4, 8, 2, 3, 8);
        let ens = sample_ensemble(&sc, 12, 4).unwrap();
        let p: Vec<f64> = (0..8).map(|k| 10.0 + k as f64).collect();
        for set in [build_team_mmse(&ens, &sc, &p).unwrap(), build_matched_filter(&ens, &sc).unwrap()] {
            for l in 0..4 {
                let view = local_view(&ens, &sc, l).unwrap();
                for s in 0..ens.len() {
                    let from_view = set.realize_local(l, &view.samples[s]);
                    let full = set.realize(&ens, s);
                    for (k, v) in from_view {
                        let pos = sc.clusters[k].iter().position(|&x| x == l).unwrap();
                        assert_eq!(v, full.blocks[k][pos], "bitwise mismatch l={l} k={k}");
                    }
                }
            }
            // Non-serving APs contribute zero blocks.
            let r = set.realize(&ens, 0);
            for k in 0..8 {
                let v = r.stacked(&set, k, 4);
                for l in (0..4).filter(|&l| !sc.is_serving(l, k)) {
                    assert_eq!(v.rows(l * 3, 3).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn matched_filter_copies_local_channel() {
        let sc = scenario(4, 3, 1, 1, 1);
        let ens = sample_ensemble(&sc, 2, 1).unwrap();
        let set = build_matched_filter(&ens, &sc).unwrap();
        let r = set.realize(&ens, 1);
        for k in 0..3 {
            let l = sc.clusters[k][0];
            assert_eq!(r.blocks[k][0][0], ens.sample(1)[(l, k)]);
        }
    }

    #[test]
    fn long_term_dump_layout() {
        let sc = scenario(4, 3, 2, 2, 3);
        let ens = sample_ensemble(&sc, 4, 2).unwrap();
        let set = build_team_mmse(&ens, &sc, &[1.0, 2.0, 3.0]).unwrap();
        let params = set.long_term_params();
        assert_eq!(params.psi.len(), 4);
        assert_eq!(params.c.len(), 3 * 2);
        let first = &params.c[0];
        assert_eq!(first.c.len(), 2 * 3);
        let cv = set.statistical_vector(first.ap, first.ue).unwrap();
        assert_eq!(first.c[2], cv[1].re);
        assert_eq!(first.c[3], cv[1].im);
        let json = serde_json::to_string(&params).unwrap();
        assert!(json.contains("\"rule\":\"team_mmse\""));
    }
}
