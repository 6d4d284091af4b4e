//! Scratch probe: does estimate_k recover K from noisy staircase samples?

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use safescale_core::estimate_k;

fn main() {
    for k in [3usize, 5, 10] {
        let values: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
        let mut fails = 0;
        for trial in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(4000 + 13 * k as u64 + trial);
            let samples: Vec<f64> = (0..1200)
                .map(|_| {
                    let v = values[rng.random_range(0..k)];
                    let z: f64 = rng.sample(StandardNormal);
                    v + 0.01 * z
                })
                .collect();
            let est = estimate_k(&samples).unwrap();
            if est.k != k {
                fails += 1;
                println!("  k={k} trial={trial}: estimated {} (sil {:?})", est.k, est.silhouette);
            }
        }
        println!("k={k}: {}/10 recovered", 10 - fails);
    }
}
