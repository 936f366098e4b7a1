use cellfree::scenario::{sample_shadow_fading, shadow_covariance, NetworkConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn sample_covariance_matches_the_model() {
    const DRAWS: usize = 10_000;
    let cfg = NetworkConfig { num_aps: 1, ..Default::default() };
    let ues = [[0.0, 0.0], [3.0, 4.0], [20.0, 0.0], [100.0, 100.0], [1.0, 0.0]];
    let k = ues.len();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut sum = vec![vec![0.0; k]; k];
    let mut mean = vec![0.0; k];
    for _ in 0..DRAWS {
        let z = sample_shadow_fading(&cfg, &ues, &mut rng).unwrap();
        for i in 0..k {
            mean[i] += z[(0, i)] / DRAWS as f64;
            for j in 0..k {
                sum[i][j] += z[(0, i)] * z[(0, j)] / DRAWS as f64;
            }
        }
    }
    let rho2 = cfg.shadow_std_db * cfg.shadow_std_db;
    let tol = 5.0 * rho2 / (DRAWS as f64).sqrt();
    for i in 0..k {
        for j in 0..k {
            let d = (ues[i][0] - ues[j][0]).hypot(ues[i][1] - ues[j][1]);
            let expected = shadow_covariance(cfg.shadow_std_db, cfg.shadow_corr_dist_m, d);
            let sample = sum[i][j] - mean[i] * mean[j];
            assert!((sample - expected).abs() <= tol, "({i}, {j}): {sample} vs {expected}");
        }
    }
}
