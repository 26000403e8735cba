//! Random Clifford circuits: ASAP layering, depth-balanced splitting and
//! the text format.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clinr_sim::circuit::{layer, random_clifford_circuit, split_equal_depth, Circuit, GateDistribution};

fn main() -> clinr_sim::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = random_clifford_circuit(6, 36, GateDistribution::default(), &mut rng)?;
    let layered = layer(&c);
    println!("{} gates on {} qubits, depth {}", c.size(), c.num_qubits(), layered.depth());
    for (i, ops) in layered.layers().iter().take(3).enumerate() {
        let names: Vec<String> = ops.iter().map(|op| op.to_string()).collect();
        println!("  layer {i}: {}", names.join(", "));
    }

    for t in [2, 3, 5] {
        let blocks = split_equal_depth(&c, t)?;
        let depths: Vec<usize> = blocks.iter().map(Circuit::depth).collect();
        println!("t = {t}: block depths {depths:?}");
    }

    let text = c.to_text();
    let back = Circuit::from_text(&text)?;
    println!("text round trip preserves the circuit: {}", back == c);
    print!("{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}
