//! CHP-style stabilizer tableau with destabilizers.

use rand::Rng;

use crate::circuit::{GateKind, GateOp};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    num_qubits: usize,
    destabilizers: Vec<PauliString>,
    stabilizers: Vec<PauliString>,
}

/// Outcome of a Pauli measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    /// `true` for the `-1` eigenvalue.
    pub negative: bool,
    pub deterministic: bool,
}

impl Measurement {
    pub fn eigenvalue(self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }
}

/// Row-reduced stabilizer generators; equal iff the states are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm(pub Vec<PauliString>);

impl StabilizerTableau {
    /// `|0…0⟩`.
    pub fn zero_state(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            destabilizers: (0..num_qubits)
                .map(|q| PauliString::single(num_qubits, q, Pauli::X))
                .collect(),
            stabilizers: (0..num_qubits)
                .map(|q| PauliString::single(num_qubits, q, Pauli::Z))
                .collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destabilizers
    }

    fn rows_mut(&mut self) -> impl Iterator<Item = &mut PauliString> {
        self.destabilizers.iter_mut().chain(self.stabilizers.iter_mut())
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Conjugates every generator by a unitary Clifford gate, or resets the
    /// qubit for `PrepZ`.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        for &q in gate.qubits() {
            self.check(q)?;
        }
        let qs = gate.qubits();
        match gate.kind {
            GateKind::H => self.rows_mut().for_each(|r| r.conj_h(qs[0])),
            GateKind::S => self.rows_mut().for_each(|r| r.conj_s(qs[0])),
            GateKind::Sdg => self.rows_mut().for_each(|r| r.conj_sdg(qs[0])),
            GateKind::X => self.rows_mut().for_each(|r| r.conj_x(qs[0])),
            GateKind::Y => self.rows_mut().for_each(|r| r.conj_y(qs[0])),
            GateKind::Z => self.rows_mut().for_each(|r| r.conj_z(qs[0])),
            GateKind::CX => self.rows_mut().for_each(|r| r.conj_cx(qs[0], qs[1])),
            GateKind::CY => self.rows_mut().for_each(|r| r.conj_cy(qs[0], qs[1])),
            GateKind::CZ => self.rows_mut().for_each(|r| r.conj_cz(qs[0], qs[1])),
            GateKind::PrepZ => self.reset(qs[0]),
            _ => return Err(Error::NonClifford(gate.to_string())),
        }
        Ok(())
    }

    /// Applies every op of `ops` in order.
    pub fn apply_all<'a>(&mut self, ops: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        ops.into_iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Multiplies the state by a Pauli operator (global phase dropped).
    pub fn apply_pauli(&mut self, pauli: &PauliString) {
        for r in self.rows_mut() {
            if !r.commutes_with(pauli) {
                r.negate();
            }
        }
    }

    /// Z-basis reset. When the outcome would be random the `+1` branch is
    /// taken; the result is `|0⟩` on `q` either way.
    pub fn reset(&mut self, q: usize) {
        let z = PauliString::single(self.num_qubits, q, Pauli::Z);
        let m = self.measure_with(&z, || false);
        if m.negative {
            self.apply_pauli(&PauliString::single(self.num_qubits, q, Pauli::X));
        }
    }

    /// Measures a Hermitian Pauli observable, projecting the state.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, observable: &PauliString, rng: &mut R) -> Measurement {
        self.measure_with(observable, || rng.random())
    }

    fn measure_with(&mut self, obs: &PauliString, mut coin: impl FnMut() -> bool) -> Measurement {
        assert_eq!(obs.num_qubits(), self.num_qubits, "observable register mismatch");
        let pivot = self.stabilizers.iter().position(|s| !s.commutes_with(obs));
        match pivot {
            Some(p) => {
                let pivot_row = self.stabilizers[p].clone();
                for i in 0..self.num_qubits {
                    if i != p && !self.stabilizers[i].commutes_with(obs) {
                        self.stabilizers[i].mul_assign_right(&pivot_row);
                    }
                    if i != p && !self.destabilizers[i].commutes_with(obs) {
                        self.destabilizers[i].mul_assign_right(&pivot_row);
                    }
                }
                let negative = coin();
                let mut new = obs.clone();
                if negative {
                    new.negate();
                }
                self.destabilizers[p] = pivot_row;
                self.stabilizers[p] = new;
                Measurement {
                    negative,
                    deterministic: false,
                }
            }
            None => {
                let prod = self.group_element_for(obs);
                Measurement {
                    negative: prod.phase() != obs.phase(),
                    deterministic: true,
                }
            }
        }
    }

    /// Product of the stabilizers whose destabilizer anticommutes with
    /// `pauli`. Equals `±pauli` whenever `pauli` commutes with the group.
    fn group_element_for(&self, pauli: &PauliString) -> PauliString {
        let mut prod = PauliString::identity(self.num_qubits);
        for (d, s) in self.destabilizers.iter().zip(&self.stabilizers) {
            if !d.commutes_with(pauli) {
                prod.mul_assign_right(s);
            }
        }
        prod
    }

    /// True iff `pauli`, sign included, is a product of the generators.
    pub fn in_stabilizer_group(&self, pauli: &PauliString) -> bool {
        if pauli.num_qubits() != self.num_qubits || !pauli.is_hermitian() {
            return false;
        }
        if !self.stabilizers.iter().all(|s| s.commutes_with(pauli)) {
            return false;
        }
        let prod = self.group_element_for(pauli);
        prod == *pauli
    }

    /// True iff `pauli` acts as a global phase on the state, i.e. it lies in
    /// the stabilizer group up to sign.
    pub fn acts_trivially(&self, pauli: &PauliString) -> bool {
        self.stabilizers.iter().all(|s| s.commutes_with(pauli))
    }

    /// Uniform non-identity element of the stabilizer group.
    pub fn random_stabilizer<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliString {
        assert!(self.num_qubits > 0);
        loop {
            let mut prod = PauliString::identity(self.num_qubits);
            let mut any = false;
            for s in &self.stabilizers {
                if rng.random::<bool>() {
                    prod.mul_assign_right(s);
                    any = true;
                }
            }
            if any {
                return prod;
            }
        }
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        let order: Vec<usize> = (0..self.num_qubits).collect();
        CanonicalForm(rref(self.stabilizers.clone(), &order))
    }

    /// Canonical form of the state on `qubits` (renumbered in the given
    /// order), or `None` if those qubits are entangled with the rest.
    pub fn subsystem_canonical_form(&self, qubits: &[usize]) -> Option<CanonicalForm> {
        let mut order: Vec<usize> = (0..self.num_qubits).filter(|q| !qubits.contains(q)).collect();
        let rest = order.len();
        order.extend_from_slice(qubits);
        let rows = rref(self.stabilizers.clone(), &order);
        // Rows whose leading column lies in the trailing block are supported
        // on `qubits` only.
        let local: Vec<PauliString> = rows
            .into_iter()
            .filter(|r| {
                order[..rest]
                    .iter()
                    .all(|&q| !r.x_bit(q) && !r.z_bit(q))
            })
            .map(|r| r.restrict(qubits))
            .collect();
        if local.len() != qubits.len() {
            return None;
        }
        let natural: Vec<usize> = (0..qubits.len()).collect();
        Some(CanonicalForm(rref(local, &natural)))
    }

    /// Builds the tableau of the state prepared by `ops` from `|0…0⟩`.
    pub fn from_circuit<'a>(num_qubits: usize, ops: impl IntoIterator<Item = &'a GateOp>) -> Result<Self> {
        let mut t = Self::zero_state(num_qubits);
        t.apply_all(ops)?;
        Ok(t)
    }

    /// Checks the commutation structure of the generators.
    pub fn is_consistent(&self) -> bool {
        let n = self.num_qubits;
        for i in 0..n {
            if !self.stabilizers[i].is_hermitian() {
                return false;
            }
            for j in 0..n {
                if !self.stabilizers[i].commutes_with(&self.stabilizers[j]) {
                    return false;
                }
                let anti = !self.destabilizers[i].commutes_with(&self.stabilizers[j]);
                if anti != (i == j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Gauss-Jordan elimination of Pauli rows over the symplectic columns
/// `x_q, z_q` for `q` in `qubit_order`. Row products keep their signs.
fn rref(mut rows: Vec<PauliString>, qubit_order: &[usize]) -> Vec<PauliString> {
    let mut r = 0;
    for &q in qubit_order {
        for use_z in [false, true] {
            if r == rows.len() {
                return rows;
            }
            let bit = |p: &PauliString| if use_z { p.z_bit(q) } else { p.x_bit(q) };
            let Some(piv) = (r..rows.len()).find(|&i| bit(&rows[i])) else {
                continue;
            };
            rows.swap(r, piv);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && bit(row) {
                    row.mul_assign_right(&pivot);
                }
            }
            r += 1;
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn hadamard_on_zero() {
        let mut t = StabilizerTableau::zero_state(1);
        t.apply_gate(&GateOp::h(0)).unwrap();
        assert_eq!(t.stabilizers(), &[ps("+X")]);
    }

    #[test]
    fn bell_state() {
        let mut t = StabilizerTableau::zero_state(2);
        t.apply_gate(&GateOp::h(0)).unwrap();
        t.apply_gate(&GateOp::cx(0, 1)).unwrap();
        assert!(t.in_stabilizer_group(&ps("+XX")));
        assert!(t.in_stabilizer_group(&ps("+ZZ")));
        assert!(t.in_stabilizer_group(&ps("-YY")));
        assert!(!t.in_stabilizer_group(&ps("-XX")));
        assert!(!t.in_stabilizer_group(&ps("+XZ")));
        assert!(t.is_consistent());
    }

    #[test]
    fn cx_on_plus_zero() {
        let mut t = StabilizerTableau::zero_state(2);
        t.apply_gate(&GateOp::h(0)).unwrap();
        t.apply_gate(&GateOp::cx(0, 1)).unwrap();
        let mut expect = StabilizerTableau::zero_state(2);
        expect.stabilizers = vec![ps("+XX"), ps("+ZZ")];
        assert_eq!(t.canonical_form(), expect.canonical_form());
    }

    #[test]
    fn s_s_z_on_plus() {
        let mut t = StabilizerTableau::zero_state(1);
        for g in [GateOp::h(0), GateOp::s(0), GateOp::s(0), GateOp::z(0)] {
            t.apply_gate(&g).unwrap();
        }
        assert_eq!(t.stabilizers(), &[ps("+X")]);
    }

    #[test]
    fn measure_zero_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = StabilizerTableau::zero_state(2);
        let m = t.measure_pauli(&ps("+Z_"), &mut rng);
        assert!(m.deterministic && !m.negative);
        let m = t.measure_pauli(&ps("-_Z"), &mut rng);
        assert!(m.deterministic && m.negative);
    }

    #[test]
    fn measure_plus_in_z_is_fair_and_collapses() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut ones = 0;
        let trials = 4000;
        for _ in 0..trials {
            let mut t = StabilizerTableau::zero_state(1);
            t.apply_gate(&GateOp::h(0)).unwrap();
            let m = t.measure_pauli(&ps("+Z"), &mut rng);
            assert!(!m.deterministic);
            let again = t.measure_pauli(&ps("+Z"), &mut rng);
            assert!(again.deterministic);
            assert_eq!(again.negative, m.negative);
            ones += m.negative as usize;
        }
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((ones as f64 - trials as f64 / 2.0).abs() < 4.0 * sigma);
    }

    #[test]
    fn measuring_bell_pair_correlates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut t = StabilizerTableau::zero_state(2);
            t.apply_gate(&GateOp::h(0)).unwrap();
            t.apply_gate(&GateOp::cx(0, 1)).unwrap();
            let a = t.measure_pauli(&ps("+Z_"), &mut rng);
            let b = t.measure_pauli(&ps("+_Z"), &mut rng);
            assert!(b.deterministic);
            assert_eq!(a.negative, b.negative);
            assert!(t.is_consistent());
        }
    }

    #[test]
    fn reset_returns_zero() {
        let mut t = StabilizerTableau::zero_state(2);
        t.apply_gate(&GateOp::h(0)).unwrap();
        t.apply_gate(&GateOp::cx(0, 1)).unwrap();
        t.apply_gate(&GateOp::x(1)).unwrap();
        t.reset(1);
        assert!(t.in_stabilizer_group(&ps("+_Z")));
        t.reset(0);
        assert_eq!(t.canonical_form(), StabilizerTableau::zero_state(2).canonical_form());
    }

    #[test]
    fn pauli_flips_signs() {
        let mut t = StabilizerTableau::zero_state(2);
        t.apply_pauli(&ps("+XZ"));
        assert!(t.in_stabilizer_group(&ps("-Z_")));
        assert!(t.in_stabilizer_group(&ps("+_Z")));
        assert!(t.acts_trivially(&ps("-ZZ")));
        assert!(!t.acts_trivially(&ps("+X_")));
    }

    #[test]
    fn random_stabilizer_is_uniform_over_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut t = StabilizerTableau::zero_state(2);
        t.apply_gate(&GateOp::h(0)).unwrap();
        t.apply_gate(&GateOp::cx(0, 1)).unwrap();
        let mut counts: HashMap<String, usize> = HashMap::new();
        let trials = 30_000;
        for _ in 0..trials {
            let s = t.random_stabilizer(&mut rng);
            assert!(t.in_stabilizer_group(&s));
            *counts.entry(s.to_string()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        for c in counts.values() {
            let p = 1.0 / 3.0;
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!((*c as f64 - trials as f64 * p).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn canonical_form_ignores_generator_choice() {
        let mut a = StabilizerTableau::zero_state(2);
        a.apply_gate(&GateOp::h(0)).unwrap();
        a.apply_gate(&GateOp::cx(0, 1)).unwrap();
        let mut b = StabilizerTableau::zero_state(2);
        b.apply_gate(&GateOp::h(1)).unwrap();
        b.apply_gate(&GateOp::cx(1, 0)).unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
        b.apply_gate(&GateOp::z(0)).unwrap();
        assert_ne!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn subsystem_form_detects_entanglement() {
        let mut t = StabilizerTableau::zero_state(3);
        t.apply_gate(&GateOp::h(0)).unwrap();
        t.apply_gate(&GateOp::cx(0, 1)).unwrap();
        t.apply_gate(&GateOp::x(2)).unwrap();
        assert!(t.subsystem_canonical_form(&[0]).is_none());
        let mut one = StabilizerTableau::zero_state(1);
        one.apply_gate(&GateOp::x(0)).unwrap();
        assert_eq!(t.subsystem_canonical_form(&[2]), Some(one.canonical_form()));
        let mut bell = StabilizerTableau::zero_state(2);
        bell.apply_gate(&GateOp::h(1)).unwrap();
        bell.apply_gate(&GateOp::cx(1, 0)).unwrap();
        assert_eq!(t.subsystem_canonical_form(&[1, 0]), Some(bell.canonical_form()));
    }

    #[test]
    fn non_unitary_kinds_are_rejected() {
        let mut t = StabilizerTableau::zero_state(1);
        assert!(matches!(t.apply_gate(&GateOp::meas_z(0)), Err(Error::NonClifford(_))));
        assert!(matches!(
            t.apply_gate(&GateOp::h(3)),
            Err(Error::QubitOutOfRange { .. })
        ));
    }
}
