//! Team MMSE on an ensemble that enumerates a finite world against the exact
//! solution of the same world.

use cellfree::oracle::{exact_moments, exact_sinr, exact_team_mmse, random_product_world};
use cellfree::teammse::build_team_mmse;
use cellfree::uatf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn team_mmse_matches_exact_solution_on_product_worlds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let world = random_product_world(&mut rng);
        let scenario = world.scenario(10.0).unwrap();
        let ensemble = world.to_ensemble().unwrap();
        let p: Vec<f64> = (0..2).map(|_| rng.random_range(0.1..10.0)).collect();
        let set = build_team_mmse(&ensemble, &scenario, &p).unwrap();
        let stats = uatf::estimate_statistics(&ensemble, &set);
        let exact: Vec<_> = (0..2).map(|k| exact_team_mmse(&world, &p, k).unwrap()).collect();
        for (k, sol) in exact.iter().enumerate() {
            for m in 0..world.num_atoms() {
                let ours = set.realize(&ensemble, m).stacked(&set, k, world.num_aps);
                let theirs = sol.beamformer.on_atom(&world, m);
                assert!((&ours - &theirs).norm() <= 1e-8 * theirs.norm().max(1e-12), "beamformer mismatch");
            }
            let mse = uatf::mse(&ensemble, &set, k, &p).unwrap();
            assert!((mse - sol.mse).abs() <= 1e-8 * sol.mse, "{mse} vs {}", sol.mse);
            assert!((stats.mse(&p, k) - sol.mse).abs() <= 1e-8 * sol.mse);
        }
        let beamformers: Vec<_> = exact.iter().map(|e| e.beamformer.clone()).collect();
        let moments = exact_moments(&world, &beamformers);
        for (k, sol) in exact.iter().enumerate() {
            let sinr = exact_sinr(&moments, &p, k).unwrap();
            assert!((sol.mse - 1.0 / (1.0 + sinr)).abs() <= 1e-10);
            assert!((uatf::sinr(&stats, &p, k).unwrap() - sinr).abs() <= 1e-8 * sinr);
        }
    }
}
