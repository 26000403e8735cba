//! Prepare a GHZ state, inspect its stabilizers and measure it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clinr_sim::circuit::{Circuit, GateOp};
use clinr_sim::pauli::{Pauli, PauliString};
use clinr_sim::tableau::StabilizerTableau;

fn main() -> clinr_sim::error::Result<()> {
    let ghz = Circuit::from_ops(3, vec![GateOp::h(0), GateOp::cx(0, 1), GateOp::cx(1, 2)])?;
    let mut state = StabilizerTableau::from_circuit(3, ghz.ops())?;
    println!("stabilizers of (|000> + |111>)/sqrt2:");
    for s in state.stabilizers() {
        println!("  {s}");
    }

    let xxx = PauliString::from_sparse(3, &[(0, Pauli::X), (1, Pauli::X), (2, Pauli::X)]);
    let z0 = PauliString::single(3, 0, Pauli::Z);
    println!("XXX in group: {}", state.in_stabilizer_group(&xxx));
    println!("Z on qubit 0 acts trivially: {}", state.acts_trivially(&z0));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m0 = state.measure_pauli(&z0, &mut rng);
    let m2 = state.measure_pauli(&PauliString::single(3, 2, Pauli::Z), &mut rng);
    println!(
        "Z0 -> {:+} (random: {}), then Z2 -> {:+} (random: {})",
        m0.eigenvalue(),
        !m0.deterministic,
        m2.eigenvalue(),
        !m2.deterministic
    );

    // Two circuits preparing the same state share a canonical form.
    let other = Circuit::from_ops(3, vec![GateOp::h(0), GateOp::cx(0, 2), GateOp::cx(0, 1)])?;
    let a = StabilizerTableau::from_circuit(3, ghz.ops())?.canonical_form();
    let b = StabilizerTableau::from_circuit(3, other.ops())?.canonical_form();
    println!("same state: {}", a == b);
    Ok(())
}
