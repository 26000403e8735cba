//! Dense state-vector Monte Carlo for small noisy Clifford circuits.
//!
//! Applies the gates of a circuit to `2ⁿ` complex amplitudes, layer by
//! layer, drawing depolarizing errors after every gate and on every idle
//! qubit of every layer. A shot fails when the final state has overlap
//! below one half with the noiseless state.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use clinr_sim::circuit::{Circuit, GateKind};

#[derive(Clone, Copy, Debug)]
pub enum Op1 {
    X,
    Y,
    Z,
    H,
    S,
}

#[derive(Clone, Debug)]
pub struct StateVector {
    n: usize,
    amp: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[0] = Complex64::new(1.0, 0.0);
        Self { n, amp }
    }

    pub fn apply1(&mut self, op: Op1, q: usize) {
        let bit = 1 << q;
        let i = Complex64::new(0.0, 1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for idx in 0..self.amp.len() {
            if idx & bit != 0 {
                continue;
            }
            let (a0, a1) = (self.amp[idx], self.amp[idx | bit]);
            let (b0, b1) = match op {
                Op1::X => (a1, a0),
                Op1::Y => (-i * a1, i * a0),
                Op1::Z => (a0, -a1),
                Op1::H => ((a0 + a1) * h, (a0 - a1) * h),
                Op1::S => (a0, i * a1),
            };
            self.amp[idx] = b0;
            self.amp[idx | bit] = b1;
        }
    }

    /// Applies `op` to `t` on the branch where `c` is one.
    pub fn controlled(&mut self, op: Op1, c: usize, t: usize) {
        let (cb, tb) = (1 << c, 1 << t);
        let i = Complex64::new(0.0, 1.0);
        for idx in 0..self.amp.len() {
            if idx & cb == 0 || idx & tb != 0 {
                continue;
            }
            let (a0, a1) = (self.amp[idx], self.amp[idx | tb]);
            let (b0, b1) = match op {
                Op1::X => (a1, a0),
                Op1::Y => (-i * a1, i * a0),
                Op1::Z => (a0, -a1),
                _ => panic!("unsupported controlled gate"),
            };
            self.amp[idx] = b0;
            self.amp[idx | tb] = b1;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }
}

fn pauli_of(code: u8) -> Option<Op1> {
    match code {
        0 => None,
        1 => Some(Op1::X),
        2 => Some(Op1::Y),
        _ => Some(Op1::Z),
    }
}

/// Rates of the circuit-level model relative to `p`.
#[derive(Clone, Copy, Debug)]
pub struct OracleNoise {
    pub one_qubit: f64,
    pub two_qubit: f64,
    pub idle: f64,
}

impl OracleNoise {
    pub fn circuit_level(p: f64) -> Self {
        Self {
            one_qubit: p / 10.0,
            two_qubit: p,
            idle: p / 100.0,
        }
    }
}

struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
}

/// Own ASAP layering: a gate goes right after the last gate touching any
/// of its qubits.
fn layers(circuit: &Circuit) -> Vec<Vec<Gate>> {
    let mut next = vec![0usize; circuit.num_qubits()];
    let mut out: Vec<Vec<Gate>> = Vec::new();
    for op in circuit.ops() {
        let qs = op.qubits().to_vec();
        let at = qs.iter().map(|&q| next[q]).max().unwrap_or(0);
        for &q in &qs {
            next[q] = at + 1;
        }
        while out.len() <= at {
            out.push(Vec::new());
        }
        out[at].push(Gate {
            kind: op.kind.clone(),
            qubits: qs,
        });
    }
    out
}

fn apply_gate(psi: &mut StateVector, g: &Gate) {
    let q = &g.qubits;
    match g.kind {
        GateKind::H => psi.apply1(Op1::H, q[0]),
        GateKind::S => psi.apply1(Op1::S, q[0]),
        GateKind::Sdg => {
            for _ in 0..3 {
                psi.apply1(Op1::S, q[0]);
            }
        }
        GateKind::X => psi.apply1(Op1::X, q[0]),
        GateKind::Y => psi.apply1(Op1::Y, q[0]),
        GateKind::Z => psi.apply1(Op1::Z, q[0]),
        GateKind::CX => psi.controlled(Op1::X, q[0], q[1]),
        GateKind::CY => psi.controlled(Op1::Y, q[0], q[1]),
        GateKind::CZ => psi.controlled(Op1::Z, q[0], q[1]),
        ref k => panic!("oracle does not simulate {k:?}"),
    }
}

fn depolarize<R: Rng>(psi: &mut StateVector, qubits: &[usize], rate: f64, rng: &mut R) {
    if rate <= 0.0 || !rng.random_bool(rate) {
        return;
    }
    let count = 4u32.pow(qubits.len() as u32);
    let code = rng.random_range(1..count);
    for (slot, &q) in qubits.iter().enumerate() {
        if let Some(op) = pauli_of(((code >> (2 * slot)) & 3) as u8) {
            psi.apply1(op, q);
        }
    }
}

pub fn ideal_state(circuit: &Circuit) -> StateVector {
    let mut psi = StateVector::zero(circuit.num_qubits());
    for layer in layers(circuit) {
        for g in &layer {
            apply_gate(&mut psi, g);
        }
    }
    psi
}

/// Fraction of `shots` noisy runs of `circuit` from `|0ⁿ⟩` that fail.
pub fn direct_failure_rate(circuit: &Circuit, noise: OracleNoise, shots: usize, seed: u64) -> f64 {
    let n = circuit.num_qubits();
    let ideal = ideal_state(circuit);
    let plan = layers(circuit);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..shots {
        let mut psi = StateVector::zero(n);
        for layer in &plan {
            let mut busy = vec![false; n];
            for g in layer {
                apply_gate(&mut psi, g);
                let rate = if g.qubits.len() == 1 { noise.one_qubit } else { noise.two_qubit };
                depolarize(&mut psi, &g.qubits, rate, &mut rng);
                for &q in &g.qubits {
                    busy[q] = true;
                }
            }
            for q in (0..n).filter(|&q| !busy[q]) {
                depolarize(&mut psi, &[q], noise.idle, &mut rng);
            }
        }
        if psi.overlap(&ideal) < 0.5 {
            failures += 1;
        }
    }
    failures as f64 / shots as f64
}

/// Binomial standard error of a rate estimated from `shots` samples.
pub fn std_err(rate: f64, shots: usize) -> f64 {
    (rate * (1.0 - rate) / shots as f64).sqrt()
}

/// Whether two independent rate estimates agree within `k` combined
/// standard errors.
pub fn agree(a: f64, na: usize, b: f64, nb: usize, k: f64) -> bool {
    let s = (std_err(a, na).powi(2) + std_err(b, nb).powi(2)).sqrt();
    (a - b).abs() <= k * s.max(1e-12)
}
