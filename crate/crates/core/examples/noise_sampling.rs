//! Rates of the two noise models and sampled error statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clinr_sim::noise::{sample_idle_gap, sample_local_error, NoiseParams};

fn main() -> clinr_sim::error::Result<()> {
    let p = 1e-3;
    for params in [NoiseParams::circuit_level(p)?, NoiseParams::uniform(p)?] {
        println!(
            "{:?}: 1q {:.1e}, 2q {:.1e}, remote {:.1e}, idle {:.1e}, flip {:.1e}",
            params.model_kind, params.rate_1q, params.rate_2q, params.rate_remote, params.rate_idle, params.rate_meas_flip
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 200_000;
    let rate = 0.05;
    let hits = (0..trials).filter(|_| !sample_local_error(2, rate, &mut rng).is_identity()).count();
    println!("two-qubit channel at {rate}: error in {:.4} of draws", hits as f64 / trials as f64);

    // A gap of k idle layers composes k single-layer channels.
    let idle = 0.01;
    for k in [1u64, 10, 100] {
        let hits = (0..trials).filter(|_| !sample_idle_gap(k, idle, &mut rng).is_identity()).count();
        let expected = 0.75 * (1.0 - (1.0 - 4.0 * idle / 3.0).powi(k as i32));
        println!(
            "idle gap of {k:>3} layers: non-trivial {:.4}, expected {expected:.4}",
            hits as f64 / trials as f64
        );
    }
    Ok(())
}
