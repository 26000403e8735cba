//! State representations driven by the shot executor.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{GateKind, GateOp};
use crate::pauli::{Pauli, PauliString};
use crate::tableau::StabilizerTableau;

pub trait Backend {
    /// Whether measurements report deviations from the noiseless outcome
    /// rather than absolute outcomes.
    const RELATIVE: bool;

    fn gate(&mut self, op: &GateOp);
    fn pauli(&mut self, q: usize, p: Pauli);
    /// Applies `p`, whose qubit `i` acts on `targets[i]`.
    fn pauli_on(&mut self, p: &PauliString, targets: &[usize]);
    fn prep(&mut self, q: usize);
    /// Z measurement whose reported bit is inverted when `flip` is set.
    fn measure(&mut self, q: usize, flip: bool) -> bool;
    /// Whether the state on `out` differs from the ideal `C|0ⁿ⟩` by more
    /// than a global phase.
    fn fails(&self, ideal: &StabilizerTableau, out: &[usize]) -> bool;
}

/// Pauli frame: the accumulated error relative to the noiseless run.
#[derive(Clone, Debug)]
pub struct FrameBackend {
    frame: PauliString,
}

impl FrameBackend {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            frame: PauliString::identity(num_qubits),
        }
    }

    pub fn frame(&self) -> &PauliString {
        &self.frame
    }

    fn toggle(&mut self, q: usize, p: Pauli) {
        let (px, pz) = p.bits();
        let (x, z) = (self.frame.x_bit(q), self.frame.z_bit(q));
        self.frame.set_bits(q, x ^ px, z ^ pz);
    }
}

impl Backend for FrameBackend {
    const RELATIVE: bool = true;

    fn gate(&mut self, op: &GateOp) {
        let qs = op.qubits();
        let f = &mut self.frame;
        match op.kind {
            GateKind::H => f.conj_h(qs[0]),
            GateKind::S => f.conj_s(qs[0]),
            GateKind::Sdg => f.conj_sdg(qs[0]),
            GateKind::X | GateKind::Y | GateKind::Z => {}
            GateKind::CX | GateKind::RemoteCX => f.conj_cx(qs[0], qs[1]),
            GateKind::CY => f.conj_cy(qs[0], qs[1]),
            GateKind::CZ => f.conj_cz(qs[0], qs[1]),
            _ => panic!("{op} is not a unitary gate"),
        }
    }

    fn pauli(&mut self, q: usize, p: Pauli) {
        self.toggle(q, p);
    }

    fn pauli_on(&mut self, p: &PauliString, targets: &[usize]) {
        for i in p.support() {
            self.toggle(targets[i], p.get(i));
        }
    }

    fn prep(&mut self, q: usize) {
        self.frame.set_bits(q, false, false);
    }

    fn measure(&mut self, q: usize, flip: bool) -> bool {
        self.frame.x_bit(q) ^ flip
    }

    fn fails(&self, ideal: &StabilizerTableau, out: &[usize]) -> bool {
        !ideal.acts_trivially(&self.frame.restrict(out))
    }
}

/// Full noisy stabilizer state with its own measurement randomness.
#[derive(Clone, Debug)]
pub struct TableauBackend {
    state: StabilizerTableau,
    rng: ChaCha8Rng,
}

impl TableauBackend {
    pub fn new(num_qubits: usize, seed: u64) -> Self {
        Self {
            state: StabilizerTableau::zero_state(num_qubits),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn state(&self) -> &StabilizerTableau {
        &self.state
    }
}

impl Backend for TableauBackend {
    const RELATIVE: bool = false;

    fn gate(&mut self, op: &GateOp) {
        let op = match op.kind {
            GateKind::RemoteCX => GateOp::cx(op.qubits()[0], op.qubits()[1]),
            _ => op.clone(),
        };
        self.state.apply_gate(&op).expect("executor only issues Clifford gates");
    }

    fn pauli(&mut self, q: usize, p: Pauli) {
        if p != Pauli::I {
            let n = self.state.num_qubits();
            self.state.apply_pauli(&PauliString::single(n, q, p));
        }
    }

    fn pauli_on(&mut self, p: &PauliString, targets: &[usize]) {
        if !p.has_trivial_masks() {
            self.state.apply_pauli(&p.embed(self.state.num_qubits(), targets));
        }
    }

    fn prep(&mut self, q: usize) {
        self.state.reset(q);
    }

    fn measure(&mut self, q: usize, flip: bool) -> bool {
        let z = PauliString::single(self.state.num_qubits(), q, Pauli::Z);
        self.state.measure_pauli(&z, &mut self.rng).negative ^ flip
    }

    fn fails(&self, ideal: &StabilizerTableau, out: &[usize]) -> bool {
        let n = self.state.num_qubits();
        !ideal
            .stabilizers()
            .iter()
            .all(|s| self.state.in_stabilizer_group(&s.embed(n, out)))
    }
}
