//! A small parameter sweep written to CSV, the same path the `simulate`
//! binary takes.

use clinr_sim::harness::{compare_modes, run_sweep, write_outputs, ExperimentConfig};

fn main() -> clinr_sim::error::Result<()> {
    let cfg = ExperimentConfig::from_toml(
        r#"
        n_values = [8, 12]
        tau_e_values = [1, 4]
        p = 1e-3
        num_circuits = 4
        shots_per_circuit = 200
        master_seed = 3
        "#,
    )?;
    let stats = run_sweep(&cfg, false)?;
    for p in &stats.points {
        println!(
            "{:?} n={} tau_e={:?}: ler {:.4} depth {:.1} bound {:?}",
            p.mode, p.n, p.tau_e, p.ler_mean, p.depth_mean, p.bound_dist
        );
    }
    for c in compare_modes(&stats)? {
        println!("n={} tau_e={}: dist depth below mono: {}", c.n, c.tau_e, c.dist_depth_lt_mono);
    }
    let dir = std::env::temp_dir().join("clinr-sweep-example");
    for path in write_outputs(&stats, &dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
