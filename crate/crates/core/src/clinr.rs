//! CliNR stages for one subcircuit: resource state preparation (RSP),
//! verification by stabilizer measurements (RSV) and injection (RSI).
//!
//! Block-local register layout for a subcircuit on `n` qubits:
//!
//! ```text
//! 0 .. n      first half of the Bell pairs (consumed by injection)
//! n .. 2n     second half, carries C_i after RSP and the output after RSI
//! 2n          verification ancilla
//! ```

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{layer, Circuit, GateOp, LayeredCircuit};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::tableau::StabilizerTableau;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RestartPolicy {
    /// Abort the attempt at the first non-trivial outcome.
    Immediate,
    /// Run all `r` measurements, then decide.
    EndOfRound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClinrConfig {
    pub t: usize,
    pub r: usize,
    pub restart_policy: RestartPolicy,
}

impl ClinrConfig {
    pub fn new(t: usize, r: usize, restart_policy: RestartPolicy) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("CliNR needs at least one block".into()));
        }
        Ok(Self { t, r, restart_policy })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    /// Restart after `executed` measurements of the round.
    Restart { executed: usize },
}

/// Decides an RSV round from its outcomes (`true` = non-trivial). The
/// `Immediate` policy may be handed a prefix of the round.
pub fn restart_semantics(policy: RestartPolicy, outcomes: &[bool]) -> Verdict {
    match policy {
        RestartPolicy::Immediate => match outcomes.iter().position(|&o| o) {
            Some(i) => Verdict::Restart { executed: i + 1 },
            None => Verdict::Accept,
        },
        RestartPolicy::EndOfRound => {
            if outcomes.iter().any(|&o| o) {
                Verdict::Restart {
                    executed: outcomes.len(),
                }
            } else {
                Verdict::Accept
            }
        }
    }
}

/// Bell pairs on `(j, n + j)` followed by `C_i` on the second half.
/// Depth is `depth(C_i) + 3`.
pub fn build_rsp(subcircuit: &Circuit) -> Circuit {
    let n = subcircuit.num_qubits();
    let mut ops = Vec::with_capacity(4 * n + subcircuit.size());
    for j in 0..n {
        ops.push(GateOp::prep_z(j));
        ops.push(GateOp::prep_z(n + j));
    }
    for j in 0..n {
        ops.push(GateOp::h(j));
    }
    for j in 0..n {
        ops.push(GateOp::cx(j, n + j));
    }
    ops.extend(subcircuit.ops().iter().map(|op| op.shifted(n)));
    Circuit::from_ops(2 * n, ops).expect("indices stay within 2n")
}

/// Ideal resource state `(I ⊗ C_i)|Φ⁺⟩^{⊗n}` on `2n` qubits.
pub fn resource_stabilizer_group(subcircuit: &Circuit) -> Result<StabilizerTableau> {
    let rsp = build_rsp(subcircuit);
    StabilizerTableau::from_circuit(rsp.num_qubits(), rsp.ops())
}

/// One verification measurement on the block register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsvMeasurement {
    /// Signed stabilizer of the ideal resource state, on `2n` qubits.
    pub observable: PauliString,
    /// Ancilla circuit on `2n + 1` qubits, ancilla last.
    pub circuit: Circuit,
}

impl RsvMeasurement {
    pub fn depth(&self) -> usize {
        self.observable.weight() + 4
    }
}

/// Ancilla-based measurement of `observable`: prepare, `H`, one controlled
/// Pauli per non-identity factor in qubit order, `H`, measure.
pub fn measurement_circuit(observable: &PauliString) -> Circuit {
    let m = observable.num_qubits();
    let anc = m;
    let mut ops = vec![GateOp::prep_z(anc), GateOp::h(anc)];
    for q in observable.support() {
        ops.push(controlled_pauli(anc, q, observable.get(q)));
    }
    ops.push(GateOp::h(anc));
    ops.push(GateOp::meas_z(anc));
    Circuit::from_ops(m + 1, ops).expect("ancilla is the last qubit")
}

pub(crate) fn controlled_pauli(control: usize, target: usize, p: Pauli) -> GateOp {
    match p {
        Pauli::X => GateOp::cx(control, target),
        Pauli::Y => GateOp::cy(control, target),
        Pauli::Z => GateOp::cz(control, target),
        Pauli::I => unreachable!("identity factors are skipped"),
    }
}

/// Draws `r` fresh verification observables from the resource stabilizer
/// group.
pub fn build_rsv<R: Rng + ?Sized>(resource: &StabilizerTableau, r: usize, rng: &mut R) -> Vec<RsvMeasurement> {
    (0..r)
        .map(|_| {
            let observable = resource.random_stabilizer(rng);
            let circuit = measurement_circuit(&observable);
            RsvMeasurement { observable, circuit }
        })
        .collect()
}

/// Transversal Bell measurement between the data register and the first
/// half of the resource, plus the Pauli images needed to track corrections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectionTemplate {
    pub n: usize,
    /// `C_i X_j C_i†` on `n` qubits.
    pub image_x: Vec<PauliString>,
    /// `C_i Z_j C_i†` on `n` qubits.
    pub image_z: Vec<PauliString>,
}

/// Layers of the injection template. The fourth is the classical
/// feed-forward slot where corrections are recorded in the frame.
pub const RSI_DEPTH: u64 = 4;

impl InjectionTemplate {
    /// Ops on a `3n` register: data at `0..n`, resource at `n..3n`.
    /// Measurement outcomes select the correction (see [`Self::correction`]).
    pub fn ops(&self) -> Vec<GateOp> {
        let n = self.n;
        let mut ops = Vec::with_capacity(4 * n);
        for j in 0..n {
            ops.push(GateOp::cx(j, n + j));
        }
        for j in 0..n {
            ops.push(GateOp::h(j));
        }
        for j in 0..n {
            ops.push(GateOp::meas_z(j));
            ops.push(GateOp::meas_z(n + j));
        }
        ops
    }

    /// Output-register Pauli undoing the teleportation byproduct for the
    /// outcome bits `(m_data, m_resource)` of each qubit.
    pub fn correction(&self, outcomes: impl IntoIterator<Item = (bool, bool)>) -> PauliString {
        let mut corr = PauliString::identity(self.n);
        for (j, (md, mr)) in outcomes.into_iter().enumerate() {
            if md {
                corr.mul_assign_right(&self.image_z[j]);
            }
            if mr {
                corr.mul_assign_right(&self.image_x[j]);
            }
        }
        corr
    }
}

pub fn build_rsi(subcircuit: &Circuit) -> Result<InjectionTemplate> {
    let n = subcircuit.num_qubits();
    let mut t = StabilizerTableau::zero_state(n);
    t.apply_all(subcircuit.ops())?;
    Ok(InjectionTemplate {
        n,
        image_x: t.destabilizers().to_vec(),
        image_z: t.stabilizers().to_vec(),
    })
}

/// Everything needed to run CliNR on one subcircuit.
#[derive(Clone, Debug)]
pub struct ResourceBlock {
    pub subcircuit: Circuit,
    pub rsp: LayeredCircuit,
    pub resource: StabilizerTableau,
    /// Observables of the first drawn round; every attempt redraws.
    pub rsv_observables: Vec<PauliString>,
    pub rsi: InjectionTemplate,
    /// RSP&V depth without restarts for `rsv_observables`.
    pub delta_i: u64,
    pub restart_prob_estimate: Option<f64>,
}

impl ResourceBlock {
    pub fn build<R: Rng + ?Sized>(subcircuit: Circuit, r: usize, rng: &mut R) -> Result<Self> {
        let rsp = layer(&build_rsp(&subcircuit));
        let resource = StabilizerTableau::from_circuit(2 * subcircuit.num_qubits(), rsp.to_circuit().ops())?;
        let rsv_observables: Vec<PauliString> =
            build_rsv(&resource, r, rng).into_iter().map(|m| m.observable).collect();
        let rsi = build_rsi(&subcircuit)?;
        let mut block = Self {
            subcircuit,
            rsp,
            resource,
            rsv_observables,
            rsi,
            delta_i: 0,
            restart_prob_estimate: None,
        };
        block.delta_i = block.attempt_depth(&block.rsv_observables);
        Ok(block)
    }

    pub fn n(&self) -> usize {
        self.subcircuit.num_qubits()
    }

    pub fn rsp_depth(&self) -> u64 {
        self.rsp.depth() as u64
    }

    /// Full RSP&V depth for a given set of observables.
    pub fn attempt_depth(&self, observables: &[PauliString]) -> u64 {
        self.rsp_depth() + observables.iter().map(|o| o.weight() as u64 + 4).sum::<u64>()
    }

    /// Expected full-attempt depth over the observable distribution,
    /// `depth(RSP) + r (E[weight] + 4)`, estimated from `samples` draws.
    pub fn mean_attempt_depth<R: Rng + ?Sized>(&self, r: usize, samples: usize, rng: &mut R) -> f64 {
        if r == 0 || samples == 0 {
            return self.rsp_depth() as f64;
        }
        let total: usize = (0..samples)
            .map(|_| self.resource.random_stabilizer(rng).weight())
            .sum();
        self.rsp_depth() as f64 + r as f64 * (total as f64 / samples as f64 + 4.0)
    }
}
