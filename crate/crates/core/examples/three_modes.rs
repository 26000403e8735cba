//! Logical error rate and depth of direct, monolithic and distributed
//! execution of the same random circuit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clinr_sim::arch::ArchConfig;
use clinr_sim::circuit::{random_clifford_circuit, GateDistribution};
use clinr_sim::clinr::{ClinrConfig, RestartPolicy};
use clinr_sim::engine::{estimate, Experiment, Mode, RunOptions};
use clinr_sim::noise::NoiseParams;

fn main() -> clinr_sim::error::Result<()> {
    let n = 20;
    let t = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let circuit = random_clifford_circuit(n, n * n, GateDistribution::default(), &mut rng)?;
    let exp = Experiment::new(circuit, ClinrConfig::new(t, 3, RestartPolicy::Immediate)?)?;
    let noise = NoiseParams::circuit_level(5e-4)?;
    let opts = RunOptions::default();

    let modes = [
        Mode::Direct,
        Mode::Monolithic,
        Mode::Distributed(ArchConfig::for_clinr(n, t, 1)),
        Mode::Distributed(ArchConfig::for_clinr(n, t, 10)),
    ];
    for mode in &modes {
        let est = estimate(&exp, mode, &noise, &opts, 2000, 42)?;
        let tau = match mode {
            Mode::Distributed(a) => format!(" tau_e={}", a.tau_e),
            _ => String::new(),
        };
        println!(
            "{:<12}{tau:<10} ler {:.4} +- {:.4}  depth {:.1}  restarts/shot {:.2}",
            mode.name(),
            est.ler,
            est.ler_std_err,
            est.depth_mean,
            est.restarts_mean
        );
    }
    Ok(())
}
