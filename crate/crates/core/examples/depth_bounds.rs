//! Closed-form depth bounds next to synthetic Monte Carlo estimates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clinr_sim::arch::ArchConfig;
use clinr_sim::bounds::{
    distributed_depth_bound, distributed_depth_bound_with_teleport, monolithic_expected_depth, stopping_time_bound,
    BoundInputs,
};
use clinr_sim::synthetic::{distributed_timeline, max_of_geometrics, monolithic_depth};

fn main() -> clinr_sim::error::Result<()> {
    let (t, delta, q, n, tau) = (4usize, 20u64, 0.3, 10usize, 2u32);
    let inputs = BoundInputs::uniform(t, delta as f64, q, n, tau as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let trials = 20_000;

    let d = vec![delta; t];
    let qs = vec![q; t];
    let mono: f64 = (0..trials).map(|_| monolithic_depth(&d, &qs, &mut rng).unwrap() as f64).sum::<f64>() / trials as f64;
    println!("monolithic: simulated {mono:.2}, expected {:.2}", monolithic_expected_depth(&inputs)?);

    let arch = ArchConfig::for_clinr(n, t, tau);
    let dist: f64 = (0..trials)
        .map(|_| distributed_timeline(&d, &qs, &arch, n, false, &mut rng).unwrap().total_depth as f64)
        .sum::<f64>()
        / trials as f64;
    println!(
        "distributed: simulated {dist:.2}, bound {:.2} (with output teleport {:.2})",
        distributed_depth_bound(&inputs)?,
        distributed_depth_bound_with_teleport(&inputs)?
    );

    for (t, p0) in [(2, 0.5), (10, 0.5), (100, 0.9)] {
        let p = vec![p0; t];
        let m: f64 = (0..trials).map(|_| max_of_geometrics(&p, &mut rng).unwrap() as f64).sum::<f64>() / trials as f64;
        println!("max of {t} geometrics, p = {p0}: mean {m:.2} <= {:.2}", stopping_time_bound(t, p0)?);
    }
    Ok(())
}
