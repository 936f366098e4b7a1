//! Brute-force ground truth on tiny finite worlds.
//!
//! A [`FiniteWorld`] is a channel with finitely many outcomes (atoms) and
//! exact probabilities. Expectations are plain weighted sums, and the team
//! MMSE problem becomes a finite-dimensional least-squares problem over
//! vectors that are constant on each cell of every AP's information
//! partition. Nothing here reuses the Monte Carlo code paths, so the two can
//! be checked against each other.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelEnsemble;
use crate::scenario::NetworkScenario;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Largest number of UEs the exhaustive power grid accepts.
pub const GRID_MAX_UES: usize = 3;

/// Channel with finitely many outcomes.
#[derive(Debug, Clone)]
pub struct FiniteWorld {
    pub antennas_per_ap: usize,
    pub num_aps: usize,
    pub num_ues: usize,
    /// `NL x K` channel of every atom.
    pub channels: Vec<CMatrix>,
    pub probabilities: Vec<f64>,
    /// `partitions[l][m]`: cell of atom `m` in the partition of AP `l`.
    pub partitions: Vec<Vec<usize>>,
    /// `serving[(l, k)]`: AP `l` serves UE `k`.
    pub serving: DMatrix<bool>,
}

impl FiniteWorld {
    /// Builds a world and derives every AP's partition from the rule that AP
    /// `l` observes exactly the columns of `H_l` of the UEs it serves.
    pub fn new(
        antennas_per_ap: usize,
        num_aps: usize,
        channels: Vec<CMatrix>,
        probabilities: Vec<f64>,
        serving: DMatrix<bool>,
    ) -> Result<Self> {
        let n = antennas_per_ap;
        if channels.is_empty() || channels.len() != probabilities.len() {
            return Err(Error::InvalidInput("one probability per atom is required".into()));
        }
        let k_count = channels[0].ncols();
        if channels.iter().any(|h| h.shape() != (n * num_aps, k_count)) || serving.shape() != (num_aps, k_count) {
            return Err(Error::InvalidInput("atom shapes disagree".into()));
        }
        if probabilities.iter().any(|&q| q.is_nan() || q <= 0.0)
            || (probabilities.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidInput("probabilities must be positive and sum to one".into()));
        }
        let partitions = (0..num_aps)
            .map(|l| {
                let observed = |h: &CMatrix| -> Vec<C64> {
                    (0..k_count)
                        .filter(|&k| serving[(l, k)])
                        .flat_map(|k| h.view((l * n, k), (n, 1)).iter().copied().collect::<Vec<_>>())
                        .collect()
                };
                let mut seen: Vec<Vec<C64>> = Vec::new();
                channels
                    .iter()
                    .map(|h| {
                        let obs = observed(h);
                        match seen.iter().position(|o| *o == obs) {
                            Some(c) => c,
                            None => {
                                seen.push(obs);
                                seen.len() - 1
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { antennas_per_ap, num_aps, num_ues: k_count, channels, probabilities, partitions, serving })
    }

    pub fn num_atoms(&self) -> usize {
        self.channels.len()
    }

    pub fn num_cells(&self, l: usize) -> usize {
        self.partitions[l].iter().max().map_or(0, |m| m + 1)
    }

    /// The atoms as an ensemble whose sample weights are the probabilities.
    pub fn to_ensemble(&self) -> Result<ChannelEnsemble> {
        ChannelEnsemble::from_weighted_samples(
            self.antennas_per_ap,
            self.num_aps,
            self.channels.clone(),
            self.probabilities.clone(),
        )
    }

    /// `E ||h_{l,k}||^2 / N` for every pair.
    pub fn second_moments(&self) -> DMatrix<f64> {
        let n = self.antennas_per_ap;
        DMatrix::from_fn(self.num_aps, self.num_ues, |l, k| {
            self.channels
                .iter()
                .zip(&self.probabilities)
                .map(|(h, q)| q * h.view((l * n, k), (n, 1)).norm_squared())
                .sum::<f64>()
                / n as f64
        })
    }

    /// Scenario with the world's second moments as gains and its serving
    /// pattern as clusters.
    pub fn scenario(&self, power_budget: f64) -> Result<NetworkScenario> {
        let clusters =
            (0..self.num_ues).map(|k| (0..self.num_aps).filter(|&l| self.serving[(l, k)]).collect()).collect();
        NetworkScenario::with_clusters(
            vec![[0.0, 0.0]; self.num_aps],
            vec![[0.0, 0.0]; self.num_ues],
            self.second_moments(),
            clusters,
            self.antennas_per_ap,
            power_budget,
            vec![1.0; self.num_ues],
        )
    }
}

/// One structurally feasible beamformer of one UE: a vector per serving AP
/// and per cell of that AP's partition.
#[derive(Debug, Clone)]
pub struct CellBeamformer {
    pub ue: usize,
    /// `(ap, per-cell vectors)` for every serving AP, in increasing AP order.
    pub parts: Vec<(usize, Vec<CVector>)>,
}

impl CellBeamformer {
    /// Stacked `NL` vector on atom `m`.
    pub fn on_atom(&self, world: &FiniteWorld, m: usize) -> CVector {
        let n = world.antennas_per_ap;
        let mut v = CVector::zeros(n * world.num_aps);
        for (l, cells) in &self.parts {
            v.rows_mut(l * n, n).copy_from(&cells[world.partitions[*l][m]]);
        }
        v
    }

    fn to_variables(&self) -> CVector {
        let all: Vec<C64> =
            self.parts.iter().flat_map(|(_, cells)| cells.iter().flat_map(|c| c.iter().copied())).collect();
        CVector::from_vec(all)
    }

    fn from_variables(world: &FiniteWorld, k: usize, x: &CVector) -> Self {
        let n = world.antennas_per_ap;
        let mut offset = 0;
        let parts = serving_aps(world, k)
            .into_iter()
            .map(|l| {
                let cells = (0..world.num_cells(l))
                    .map(|_| {
                        let v = x.rows(offset, n).into_owned();
                        offset += n;
                        v
                    })
                    .collect();
                (l, cells)
            })
            .collect();
        Self { ue: k, parts }
    }
}

fn serving_aps(world: &FiniteWorld, k: usize) -> Vec<usize> {
    (0..world.num_aps).filter(|&l| world.serving[(l, k)]).collect()
}

/// Exact quadratic form of the MSE of UE `k` over the feasible variables:
/// `MSE(x) = x^H A x - 2 Re(b^H x) + 1`.
#[derive(Debug, Clone)]
pub struct MseQuadratic {
    pub a: CMatrix,
    pub b: CVector,
}

impl MseQuadratic {
    pub fn value(&self, x: &CVector) -> f64 {
        (x.dotc(&(&self.a * x)).re - 2.0 * self.b.dotc(x).re + 1.0).max(0.0)
    }
}

/// Selection matrix mapping the feasible variables of UE `k` to its stacked
/// beamformer on atom `m`.
fn selection(world: &FiniteWorld, k: usize, m: usize) -> CMatrix {
    let n = world.antennas_per_ap;
    let aps = serving_aps(world, k);
    let dim: usize = aps.iter().map(|&l| n * world.num_cells(l)).sum();
    let mut s = CMatrix::zeros(n * world.num_aps, dim);
    let mut offset = 0;
    for l in aps {
        let col = offset + n * world.partitions[l][m];
        for i in 0..n {
            s[(l * n + i, col + i)] = C64::new(1.0, 0.0);
        }
        offset += n * world.num_cells(l);
    }
    s
}

pub fn mse_quadratic(world: &FiniteWorld, p: &[f64], k: usize) -> Result<MseQuadratic> {
    if p.len() != world.num_ues || p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidInput("powers must be K nonnegative numbers".into()));
    }
    let d = CMatrix::from_diagonal(&CVector::from_iterator(p.len(), p.iter().map(|&x| C64::new(x, 0.0))));
    let nl = world.antennas_per_ap * world.num_aps;
    let mut a = None::<CMatrix>;
    let mut b = None::<CVector>;
    for (m, (h, &q)) in world.channels.iter().zip(&world.probabilities).enumerate() {
        let s = selection(world, k, m);
        let cov = h * &d * h.adjoint() + CMatrix::identity(nl, nl);
        let am = s.adjoint() * cov * &s * C64::new(q, 0.0);
        let bm = s.adjoint() * h.column(k) * C64::new(q * p[k].sqrt(), 0.0);
        a = Some(a.map_or(am.clone(), |acc| acc + am));
        b = Some(b.map_or(bm.clone(), |acc| acc + bm));
    }
    Ok(MseQuadratic { a: a.expect("worlds have atoms"), b: b.expect("worlds have atoms") })
}

#[derive(Debug, Clone)]
pub struct ExactTeamMmse {
    pub beamformer: CellBeamformer,
    pub mse: f64,
    pub quadratic: MseQuadratic,
}

/// Minimizes the exact MSE of UE `k` over all beamformers that are constant
/// on each cell of the serving APs' partitions and zero elsewhere.
pub fn exact_team_mmse(world: &FiniteWorld, p: &[f64], k: usize) -> Result<ExactTeamMmse> {
    let quadratic = mse_quadratic(world, p, k)?;
    let x = quadratic
        .a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Internal("normal equations are not positive definite".into()))?
        .solve(&quadratic.b);
    let mse = 1.0 - quadratic.b.dotc(&x).re;
    Ok(ExactTeamMmse { beamformer: CellBeamformer::from_variables(world, k, &x), mse, quadratic })
}

/// Exact MSE of any feasible beamformer of UE `k`.
pub fn exact_mse(world: &FiniteWorld, beamformer: &CellBeamformer, p: &[f64]) -> Result<f64> {
    Ok(mse_quadratic(world, p, beamformer.ue)?.value(&beamformer.to_variables()))
}

/// Exact moments `a_k`, `B_jk`, `n_k` of a full beamformer set.
#[derive(Debug, Clone)]
pub struct ExactMoments {
    pub a: Vec<C64>,
    pub b: DMatrix<f64>,
    pub n: Vec<f64>,
}

pub fn exact_moments(world: &FiniteWorld, beamformers: &[CellBeamformer]) -> ExactMoments {
    let k_count = world.num_ues;
    let per_atom: Vec<Vec<CVector>> =
        (0..world.num_atoms()).map(|m| beamformers.iter().map(|v| v.on_atom(world, m)).collect()).collect();
    let mut a = vec![C64::new(0.0, 0.0); k_count];
    let mut b = DMatrix::zeros(k_count, k_count);
    let mut n = vec![0.0; k_count];
    for (m, (h, &q)) in world.channels.iter().zip(&world.probabilities).enumerate() {
        for k in 0..k_count {
            let v = &per_atom[m][k];
            a[k] += h.column(k).dotc(v) * q;
            n[k] += q * v.norm_squared();
            for j in 0..k_count {
                b[(j, k)] += q * h.column(j).dotc(v).norm_sqr();
            }
        }
    }
    ExactMoments { a, b, n }
}

/// `SINR_k = p_k |a_k|^2 / (p_k (B_kk - |a_k|^2) + sum_{j != k} p_j B_jk + n_k)`.
pub fn exact_sinr(moments: &ExactMoments, p: &[f64], k: usize) -> Result<f64> {
    if moments.n[k] <= 0.0 {
        return Err(Error::Degenerate { ue: k, reason: "E[||v_k||^2] = 0" });
    }
    let gain = moments.a[k].norm_sqr();
    let denominator: f64 = (0..p.len())
        .map(|j| if j == k { p[k] * (moments.b[(k, k)] - gain) } else { p[j] * moments.b[(j, k)] })
        .sum::<f64>()
        + moments.n[k];
    Ok(p[k] * gain / denominator)
}

/// Random feasible beamformer: independent complex Gaussian vectors per cell.
pub fn random_feasible<R: Rng + ?Sized>(world: &FiniteWorld, k: usize, scale: f64, rng: &mut R) -> CellBeamformer {
    let n = world.antennas_per_ap;
    let parts = serving_aps(world, k)
        .into_iter()
        .map(|l| (l, (0..world.num_cells(l)).map(|_| gaussian_vector(n, scale, rng)).collect()))
        .collect();
    CellBeamformer { ue: k, parts }
}

/// `x + scale * z` with `z` random feasible.
pub fn perturbed<R: Rng + ?Sized>(world: &FiniteWorld, v: &CellBeamformer, scale: f64, rng: &mut R) -> CellBeamformer {
    let z = random_feasible(world, v.ue, scale, rng);
    CellBeamformer::from_variables(world, v.ue, &(v.to_variables() + z.to_variables()))
}

fn gaussian_vector<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> CVector {
    let s = scale * std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_fn(n, |_, _| {
        C64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal))
    })
}

/// Zero-mean atoms with `E[h h^H] = gamma I_N`, equally likely.
fn isotropic_atoms(n: usize, gamma: f64) -> Vec<CVector> {
    let g = gamma.sqrt();
    match n {
        1 => vec![CVector::from_element(1, C64::new(g, 0.0)), CVector::from_element(1, C64::new(-g, 0.0))],
        2 => (0..3)
            .map(|m| {
                let w = |e: usize| C64::from_polar(g, 2.0 * std::f64::consts::PI * (e * m) as f64 / 3.0);
                CVector::from_vec(vec![w(1), w(2)])
            })
            .collect(),
        _ => unreachable!("finite worlds use N <= 2"),
    }
}

/// Random world with independent per-AP channels.
///
/// `L = 2`, `K = 2`, `N` in {1, 2}, cluster size in {1, 2}, at most 16
/// atoms. Served columns take 1 to 4 random values per AP; each unserved
/// column is independent, zero mean, with covariance `gamma I` where `gamma`
/// is a fraction of the weakest served gain, so every UE is served by its
/// strongest APs.
pub fn random_product_world<R: Rng + ?Sized>(rng: &mut R) -> FiniteWorld {
    const L: usize = 2;
    const K: usize = 2;
    const MAX_ATOMS: usize = 16;
    let n = rng.random_range(1..=2usize);
    let q = rng.random_range(1..=2usize);
    let mut serving = DMatrix::from_element(L, K, false);
    for k in 0..K {
        if q == L {
            serving[(0, k)] = true;
            serving[(1, k)] = true;
        } else {
            serving[(rng.random_range(0..L), k)] = true;
        }
    }

    // Served blocks: random values with random probabilities.
    let unserved_count = |l: usize| (0..K).filter(|&k| !serving[(l, k)]).count();
    let unserved_atoms: Vec<usize> =
        (0..L).map(|l| isotropic_atoms(n, 1.0).len().pow(unserved_count(l) as u32)).collect();
    let mut served_atoms = [1usize; L];
    for l in 0..L {
        let other: usize = (0..L).filter(|&j| j != l).map(|j| served_atoms[j] * unserved_atoms[j]).product();
        let room = MAX_ATOMS / (other * unserved_atoms[l]);
        if (0..K).any(|k| serving[(l, k)]) && room >= 2 {
            served_atoms[l] = rng.random_range(2..=room.min(4));
        }
    }
    let served_values: Vec<Vec<(CMatrix, f64)>> = (0..L)
        .map(|l| {
            let raw: Vec<f64> = (0..served_atoms[l]).map(|_| rng.random_range(0.2..1.0)).collect();
            let total: f64 = raw.iter().sum();
            raw.iter()
                .map(|r| {
                    let gain = rng.random_range(0.5..2.0);
                    let mut block = CMatrix::zeros(n, K);
                    for k in (0..K).filter(|&k| serving[(l, k)]) {
                        block.set_column(k, &gaussian_vector(n, gain, rng));
                    }
                    (block, r / total)
                })
                .collect()
        })
        .collect();
    let serving_ref = &serving;
    let weakest_served = served_values
        .iter()
        .enumerate()
        .flat_map(|(l, vals)| {
            (0..K)
                .filter(move |&k| serving_ref[(l, k)])
                .map(move |k| vals.iter().map(|(h, q)| q * h.column(k).norm_squared()).sum::<f64>() / n as f64)
        })
        .fold(f64::INFINITY, f64::min);

    // Per-AP local atoms: served value x independent unserved columns.
    let local: Vec<Vec<(CMatrix, f64)>> = (0..L)
        .map(|l| {
            let unserved: Vec<usize> = (0..K).filter(|&k| !serving[(l, k)]).collect();
            let gammas: Vec<f64> = unserved.iter().map(|_| rng.random_range(0.1..0.5) * weakest_served).collect();
            let mut atoms = served_values[l].clone();
            for (&k, &gamma) in unserved.iter().zip(&gammas) {
                let choices = isotropic_atoms(n, gamma);
                let share = 1.0 / choices.len() as f64;
                atoms = atoms
                    .iter()
                    .flat_map(|(h, q)| {
                        choices.iter().map(move |c| {
                            let mut h = h.clone();
                            h.set_column(k, c);
                            (h, q * share)
                        })
                    })
                    .collect();
            }
            atoms
        })
        .collect();

    let mut channels = Vec::new();
    let mut probabilities = Vec::new();
    for (h0, q0) in &local[0] {
        for (h1, q1) in &local[1] {
            let mut h = CMatrix::zeros(n * L, K);
            h.rows_mut(0, n).copy_from(h0);
            h.rows_mut(n, n).copy_from(h1);
            channels.push(h);
            probabilities.push(q0 * q1);
        }
    }
    let total: f64 = probabilities.iter().sum();
    probabilities.iter_mut().for_each(|q| *q /= total);
    FiniteWorld::new(n, L, channels, probabilities, serving).expect("generated worlds are valid")
}

#[derive(Debug, Clone)]
pub struct GridOptimum {
    pub powers: Vec<f64>,
    pub objective: f64,
}

fn grid_axis(budget: f64, resolution: f64) -> Result<Vec<f64>> {
    if !(resolution > 0.0 && resolution <= 1.0) || budget.is_nan() || budget <= 0.0 {
        return Err(Error::InvalidInput("resolution must be in (0, 1] and the budget positive".into()));
    }
    let steps = (1.0 / resolution).round() as usize;
    Ok((0..=steps).map(|i| budget * i as f64 / steps as f64).collect())
}

fn for_each_grid_point(k: usize, axis: &[f64], mut f: impl FnMut(&[f64])) {
    let mut idx = vec![0usize; k];
    let mut p = vec![axis[0]; k];
    loop {
        f(&p);
        let mut d = 0;
        loop {
            if d == k {
                return;
            }
            idx[d] += 1;
            if idx[d] < axis.len() {
                p[d] = axis[idx[d]];
                break;
            }
            idx[d] = 0;
            p[d] = axis[0];
            d += 1;
        }
    }
}

fn check_grid_dim(k: usize) -> Result<()> {
    if k == 0 || k > GRID_MAX_UES {
        return Err(Error::InvalidInput(format!("grid search supports 1 to {GRID_MAX_UES} UEs, got {k}")));
    }
    Ok(())
}

/// Exhaustive search of `max min_k u_k(p)` over the grid
/// `{0, r P, 2 r P, ..., P}^K`, where `utility` returns the weighted SINRs.
/// Ties go to the first point in the scan order.
pub fn grid_maxmin_power<F>(k: usize, budget: f64, resolution: f64, utility: F) -> Result<GridOptimum>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    check_grid_dim(k)?;
    let axis = grid_axis(budget, resolution)?;
    let mut best = GridOptimum { powers: vec![0.0; k], objective: f64::NEG_INFINITY };
    for_each_grid_point(k, &axis, |p| {
        let value = utility(p).into_iter().fold(f64::INFINITY, f64::min);
        if value > best.objective {
            best = GridOptimum { powers: p.to_vec(), objective: value };
        }
    });
    Ok(best)
}

/// Grid points whose objective is at least `level`.
pub fn grid_level_set<F>(k: usize, budget: f64, resolution: f64, level: f64, utility: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    check_grid_dim(k)?;
    let axis = grid_axis(budget, resolution)?;
    let mut out = Vec::new();
    for_each_grid_point(k, &axis, |p| {
        if utility(p).into_iter().fold(f64::INFINITY, f64::min) >= level {
            out.push(p.to_vec());
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn deterministic_single_ap_is_regularized_inversion() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.3), C64::new(0.2, -0.4), c(0.9)]);
        let serving = DMatrix::from_element(1, 2, true);
        let world = FiniteWorld::new(2, 1, vec![h.clone()], vec![1.0], serving).unwrap();
        let p = [2.0f64, 0.5];
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0), c(0.5)]));
        let inv = (&h * &d * h.adjoint() + CMatrix::identity(2, 2)).try_inverse().unwrap();
        for k in 0..2 {
            let expected = &inv * h.column(k) * c(p[k].sqrt());
            let got = exact_team_mmse(&world, &p, k).unwrap().beamformer.on_atom(&world, 0);
            assert!((got - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_power_gives_zero_beamformer() {
        let world = random_product_world(&mut ChaCha8Rng::seed_from_u64(1));
        let sol = exact_team_mmse(&world, &[0.0, 0.0], 0).unwrap();
        assert_relative_eq!(sol.mse, 1.0, epsilon = 1e-14);
        assert!(sol.beamformer.to_variables().norm() < 1e-14);
    }

    #[test]
    fn generated_worlds_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let w = random_product_world(&mut rng);
            assert!(w.num_atoms() <= 16);
            assert_relative_eq!(w.probabilities.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            w.scenario(1.0).unwrap();
            for l in 0..w.num_aps {
                // Atoms in one cell agree on every served column.
                for m in 0..w.num_atoms() {
                    for m2 in 0..w.num_atoms() {
                        if w.partitions[l][m] == w.partitions[l][m2] {
                            for k in (0..w.num_ues).filter(|&k| w.serving[(l, k)]) {
                                let n = w.antennas_per_ap;
                                assert_eq!(
                                    w.channels[m].view((l * n, k), (n, 1)),
                                    w.channels[m2].view((l * n, k), (n, 1))
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn isotropic_atoms_have_the_right_moments() {
        for n in 1..=2 {
            let atoms = isotropic_atoms(n, 0.7);
            let q = 1.0 / atoms.len() as f64;
            let mean = atoms.iter().fold(CVector::zeros(n), |acc, a| acc + a * c(q));
            let cov = atoms.iter().fold(CMatrix::zeros(n, n), |acc, a| acc + a * a.adjoint() * c(q));
            assert!(mean.norm() < 1e-14);
            assert!((cov - CMatrix::identity(n, n) * c(0.7)).norm() < 1e-14);
        }
    }

    #[test]
    fn optimum_beats_competitors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let world = random_product_world(&mut rng);
        let p = [1.3, 0.4];
        let sol = exact_team_mmse(&world, &p, 1).unwrap();
        for _ in 0..200 {
            let other = random_feasible(&world, 1, 1.0, &mut rng);
            assert!(exact_mse(&world, &other, &p).unwrap() >= sol.mse - 1e-10);
            let near = perturbed(&world, &sol.beamformer, 1e-3, &mut rng);
            assert!(exact_mse(&world, &near, &p).unwrap() >= sol.mse - 1e-10);
        }
        assert_relative_eq!(exact_mse(&world, &sol.beamformer, &p).unwrap(), sol.mse, epsilon = 1e-12);
    }

    #[test]
    fn sinr_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let world = random_product_world(&mut rng);
        let p = [1.0, 2.0];
        let set: Vec<_> = (0..2).map(|k| exact_team_mmse(&world, &p, k).unwrap().beamformer).collect();
        let base = exact_sinr(&exact_moments(&world, &set), &p, 0).unwrap();
        let mut scaled = set.clone();
        for (_, cells) in &mut scaled[0].parts {
            cells.iter_mut().for_each(|v| *v *= C64::new(0.0, -3.0));
        }
        assert_relative_eq!(exact_sinr(&exact_moments(&world, &scaled), &p, 0).unwrap(), base, max_relative = 1e-12);
    }

    #[test]
    fn grid_search() {
        let one = grid_maxmin_power(1, 2.0, 0.01, |p| vec![p[0] / (0.1 * p[0] + 1.0)]).unwrap();
        assert_eq!(one.powers, vec![2.0]);
        assert!(grid_maxmin_power(4, 1.0, 0.1, |p| p.to_vec()).is_err());
        assert!(grid_maxmin_power(2, 1.0, 0.0, |p| p.to_vec()).is_err());
        let mut count = 0;
        for_each_grid_point(3, &[0.0, 0.5, 1.0], |_| count += 1);
        assert_eq!(count, 27);
        let level = grid_level_set(2, 1.0, 0.5, 0.5, |p| p.to_vec()).unwrap();
        assert_eq!(level, vec![vec![0.5, 0.5], vec![1.0, 0.5], vec![0.5, 1.0], vec![1.0, 1.0]]);
    }
}
