//! Layer-timed execution of ops with circuit-level noise.
//!
//! Each qubit remembers the layer of its last op. Idle noise for the gap is
//! drawn when the qubit is next used or flushed, so only live qubits (data,
//! prepared resource and ancilla qubits) pick it up.

use rand::Rng;

use super::backend::Backend;
use crate::circuit::{GateKind, GateOp};
use crate::noise::{sample_idle_gap, sample_local_error, sample_meas_flip, LocalPauli, NoiseParams};
use crate::pauli::{Pauli, PauliString};

const DEAD: i64 = i64::MIN;

pub(crate) struct Exec<B> {
    pub backend: B,
    pub noise: NoiseParams,
    last: Vec<i64>,
}

impl<B: Backend> Exec<B> {
    pub fn new(backend: B, noise: NoiseParams, num_qubits: usize) -> Self {
        Self {
            backend,
            noise,
            last: vec![DEAD; num_qubits],
        }
    }

    /// Marks `q` as holding live data from before layer 0.
    pub fn set_live(&mut self, q: usize, since: i64) {
        self.last[q] = since;
    }

    pub fn retire(&mut self, q: usize) {
        self.last[q] = DEAD;
    }

    fn idle_until<R: Rng + ?Sized>(&mut self, q: usize, layer: i64, rng: &mut R) {
        let last = self.last[q];
        if last != DEAD {
            let gap = layer - last - 1;
            debug_assert!(gap >= 0, "qubit {q} used twice in layer {layer}");
            if gap > 0 {
                let e = sample_idle_gap(gap as u64, self.noise.rate_idle, rng);
                self.apply_local(&[q], e);
            }
        }
        self.last[q] = layer;
    }

    fn apply_local(&mut self, qubits: &[usize], e: LocalPauli) {
        if e.is_identity() {
            return;
        }
        for (slot, &q) in qubits.iter().enumerate() {
            let p = e.factor(slot);
            if p != Pauli::I {
                self.backend.pauli(q, p);
            }
        }
    }

    /// Unitary gate followed by its depolarizing channel.
    pub fn gate<R: Rng + ?Sized>(&mut self, layer: i64, op: &GateOp, rng: &mut R) {
        for &q in op.qubits() {
            self.idle_until(q, layer, rng);
        }
        self.backend.gate(op);
        let e = sample_local_error(op.kind.arity(), self.noise.rate_for(&op.kind), rng);
        self.apply_local(op.qubits(), e);
    }

    pub fn prep<R: Rng + ?Sized>(&mut self, layer: i64, q: usize, rng: &mut R) {
        self.last[q] = layer;
        self.backend.prep(q);
        let e = sample_local_error(1, self.noise.rate_1q, rng);
        self.apply_local(&[q], e);
    }

    pub fn measure<R: Rng + ?Sized>(&mut self, layer: i64, q: usize, rng: &mut R) -> bool {
        self.idle_until(q, layer, rng);
        let flip = sample_meas_flip(&self.noise, rng);
        self.last[q] = DEAD;
        self.backend.measure(q, flip)
    }

    /// Any of the ops a layered circuit may contain.
    pub fn op<R: Rng + ?Sized>(&mut self, layer: i64, op: &GateOp, rng: &mut R) {
        match op.kind {
            GateKind::PrepZ => self.prep(layer, op.qubits()[0], rng),
            GateKind::MeasZ => {
                self.measure(layer, op.qubits()[0], rng);
            }
            _ => self.gate(layer, op, rng),
        }
    }

    /// CX between QPUs, consuming one Bell pair.
    pub fn remote_cx<R: Rng + ?Sized>(&mut self, layer: i64, c: usize, t: usize, rng: &mut R) {
        self.idle_until(c, layer, rng);
        self.idle_until(t, layer, rng);
        self.backend.gate(&GateOp::two(GateKind::RemoteCX, c, t));
        let e = sample_local_error(2, self.noise.rate_remote, rng);
        self.apply_local(&[c, t], e);
    }

    /// Teleports `s` into `o` using the stored pair `(e, o)`. The pair is
    /// taken as delivered; the protocol carries the remote-op channel on
    /// `(s, o)`. Occupies layers `layer .. layer + 4`.
    pub fn teleport<R: Rng + ?Sized>(&mut self, layer: i64, s: usize, e: usize, o: usize, rng: &mut R) {
        self.backend.prep(e);
        self.backend.prep(o);
        self.backend.gate(&GateOp::h(e));
        self.backend.gate(&GateOp::cx(e, o));
        self.idle_until(s, layer, rng);
        self.backend.gate(&GateOp::cx(s, e));
        let err = sample_local_error(2, self.noise.rate_remote, rng);
        self.apply_local(&[s, o], err);
        self.gate(layer + 1, &GateOp::h(s), rng);
        let ms = self.measure(layer + 2, s, rng);
        let flip = sample_meas_flip(&self.noise, rng);
        let me = self.backend.measure(e, flip);
        if ms {
            self.backend.pauli(o, Pauli::Z);
        }
        if me {
            self.backend.pauli(o, Pauli::X);
        }
        self.last[o] = layer + 3;
    }

    pub fn correct(&mut self, p: &PauliString, targets: &[usize]) {
        self.backend.pauli_on(p, targets);
    }

    /// Draws the idle noise of `qubits` up to the end of the circuit.
    pub fn flush<R: Rng + ?Sized>(&mut self, qubits: &[usize], depth: i64, rng: &mut R) {
        for &q in qubits {
            self.idle_until(q, depth, rng);
        }
    }
}
