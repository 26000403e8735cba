//! One CliNR block: resource state, verification measurements, injection
//! correction and restart probability.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clinr_sim::circuit::{random_clifford_circuit, GateDistribution};
use clinr_sim::clinr::{measurement_circuit, RestartPolicy, ResourceBlock};
use clinr_sim::engine::estimate_restart_probability;
use clinr_sim::noise::NoiseParams;

fn main() -> clinr_sim::error::Result<()> {
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sub = random_clifford_circuit(n, 20, GateDistribution::default(), &mut rng)?;
    let block = ResourceBlock::build(sub, 3, &mut rng)?;
    println!("subcircuit depth {}, RSP depth {}", block.subcircuit.depth(), block.rsp_depth());
    println!("attempt depth with the drawn observables: {}", block.delta_i);

    for obs in &block.rsv_observables {
        println!("  verify {obs} (weight {}, ladder depth {})", obs.weight(), measurement_circuit(obs).depth());
    }

    let corr = block.rsi.correction((0..n).map(|j| (j == 0, j == 1)));
    println!("correction for m_d[0] = m_r[1] = 1: {corr}");

    for p in [1e-4, 1e-3, 1e-2] {
        let noise = NoiseParams::circuit_level(p)?;
        let q = estimate_restart_probability(&block, 3, RestartPolicy::Immediate, &noise, 20_000, 5)?;
        println!("p = {p:.0e}: restart probability {q:.4}");
    }
    Ok(())
}
