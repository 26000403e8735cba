//! Circuit-level depolarizing noise.
//!
//! Every operation is followed by a depolarizing channel on its support.
//! Rates in the circuit-level model, relative to the base rate `p`:
//!
//! | channel                        | rate      |
//! |--------------------------------|-----------|
//! | intra-QPU one-qubit op / prep  | `p / 10`  |
//! | intra-QPU two-qubit gate       | `p`       |
//! | remote two-qubit op            | `3 p`     |
//! | idle compute qubit, per layer  | `p / 100` |
//! | classical measurement flip     | `p / 10`  |
//!
//! The uniform model sets every rate to `p` and disables idle noise.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::{GateKind, GateOp};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseModelKind {
    CircuitLevel,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p: f64,
    pub rate_1q: f64,
    pub rate_2q: f64,
    pub rate_remote: f64,
    pub rate_idle: f64,
    pub rate_meas_flip: f64,
    pub model_kind: NoiseModelKind,
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::InvalidArgument(format!("{name} = {v} is not a probability")));
    }
    Ok(())
}

impl NoiseParams {
    pub fn circuit_level(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("3p", (3.0 * p).min(1.0))?;
        Ok(Self {
            p,
            rate_1q: p / 10.0,
            rate_2q: p,
            rate_remote: (3.0 * p).min(1.0),
            rate_idle: p / 100.0,
            rate_meas_flip: p / 10.0,
            model_kind: NoiseModelKind::CircuitLevel,
        })
    }

    pub fn uniform(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self {
            p,
            rate_1q: p,
            rate_2q: p,
            rate_remote: p,
            rate_idle: 0.0,
            rate_meas_flip: p,
            model_kind: NoiseModelKind::Uniform,
        })
    }

    pub fn new(kind: NoiseModelKind, p: f64) -> Result<Self> {
        match kind {
            NoiseModelKind::CircuitLevel => Self::circuit_level(p),
            NoiseModelKind::Uniform => Self::uniform(p),
        }
    }

    pub fn noiseless() -> Self {
        Self::circuit_level(0.0).expect("zero is a probability")
    }

    /// Overrides individual rates; used by tests that isolate one channel.
    pub fn with_rates(
        mut self,
        rate_1q: f64,
        rate_2q: f64,
        rate_remote: f64,
        rate_idle: f64,
        rate_meas_flip: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("rate_1q", rate_1q),
            ("rate_2q", rate_2q),
            ("rate_remote", rate_remote),
            ("rate_idle", rate_idle),
            ("rate_meas_flip", rate_meas_flip),
        ] {
            check_probability(name, v)?;
        }
        self.rate_1q = rate_1q;
        self.rate_2q = rate_2q;
        self.rate_remote = rate_remote;
        self.rate_idle = rate_idle;
        self.rate_meas_flip = rate_meas_flip;
        Ok(self)
    }

    pub fn is_noiseless(&self) -> bool {
        self.rate_1q == 0.0
            && self.rate_2q == 0.0
            && self.rate_remote == 0.0
            && self.rate_idle == 0.0
            && self.rate_meas_flip == 0.0
    }

    /// Depolarizing rate following an op of this kind. Measurements only
    /// carry the flip channel and return 0 here.
    pub fn rate_for(&self, kind: &GateKind) -> f64 {
        match kind {
            GateKind::CX | GateKind::CY | GateKind::CZ => self.rate_2q,
            GateKind::RemoteCX | GateKind::TeleportQubit => self.rate_remote,
            GateKind::MeasZ | GateKind::MeasPauli(_) => 0.0,
            _ => self.rate_1q,
        }
    }
}

/// A Pauli on one or two qubits, packed as 2 bits per qubit (`x` in the low
/// bit, `z` in the high bit), first qubit in the low pair. Zero is identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalPauli(pub u8);

impl LocalPauli {
    pub fn factor(self, slot: usize) -> Pauli {
        let bits = (self.0 >> (2 * slot)) & 3;
        Pauli::from_bits(bits & 1 == 1, bits & 2 == 2)
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

/// Depolarizing draw on `arity` qubits: identity with probability `1 - rate`,
/// otherwise one of the `4^arity - 1` non-identity Paulis uniformly.
#[inline]
pub fn sample_local_error<R: Rng + ?Sized>(arity: usize, rate: f64, rng: &mut R) -> LocalPauli {
    if rate <= 0.0 || rng.random::<f64>() >= rate {
        return LocalPauli(0);
    }
    let options = (1u8 << (2 * arity)) - 1;
    LocalPauli(rng.random_range(1..=options))
}

/// Net Pauli on one qubit after `layers` independent idle channels.
pub fn sample_idle_gap<R: Rng + ?Sized>(layers: u64, rate: f64, rng: &mut R) -> LocalPauli {
    if layers == 0 || rate <= 0.0 {
        return LocalPauli(0);
    }
    let hits = if layers == 1 {
        u64::from(rng.random::<f64>() < rate)
    } else {
        Binomial::new(layers, rate).expect("valid binomial").sample(rng)
    };
    let mut acc = 0u8;
    for _ in 0..hits {
        acc ^= rng.random_range(1..=3u8);
    }
    LocalPauli(acc)
}

/// Error following `op`, as a string on a `num_qubits` register.
pub fn sample_op_error<R: Rng + ?Sized>(
    op: &GateOp,
    params: &NoiseParams,
    num_qubits: usize,
    rng: &mut R,
) -> PauliString {
    let support = op.support();
    let mut out = PauliString::identity(num_qubits);
    if support.is_empty() || support.len() > 2 {
        return out;
    }
    let e = sample_local_error(support.len(), params.rate_for(&op.kind), rng);
    for (slot, &q) in support.iter().enumerate() {
        out.set(q, e.factor(slot));
    }
    out
}

/// One idle layer: independent single-qubit draws on every idle qubit.
/// Returns the qubits hit and their Pauli.
pub fn sample_idle_errors<R: Rng + ?Sized>(
    idle_qubits: &[usize],
    params: &NoiseParams,
    rng: &mut R,
) -> Vec<(usize, Pauli)> {
    if params.rate_idle <= 0.0 {
        return Vec::new();
    }
    idle_qubits
        .iter()
        .filter_map(|&q| {
            let e = sample_local_error(1, params.rate_idle, rng);
            (!e.is_identity()).then(|| (q, e.factor(0)))
        })
        .collect()
}

#[inline]
pub fn sample_meas_flip<R: Rng + ?Sized>(params: &NoiseParams, rng: &mut R) -> bool {
    params.rate_meas_flip > 0.0 && rng.random::<f64>() < params.rate_meas_flip
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn within_3_sigma(hits: u64, trials: u64, p: f64) -> bool {
        let mean = trials as f64 * p;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        (hits as f64 - mean).abs() <= 3.0 * sigma
    }

    #[test]
    fn rates_follow_base_rate() {
        let n = NoiseParams::circuit_level(1e-4).unwrap();
        assert_eq!(n.rate_for(&GateKind::H), 1e-5);
        assert_eq!(n.rate_for(&GateKind::CZ), 1e-4);
        assert!((n.rate_for(&GateKind::RemoteCX) - 3e-4).abs() < 1e-18);
        assert!((n.rate_idle - 1e-6).abs() < 1e-18);
        assert_eq!(n.rate_meas_flip, 1e-5);
        let u = NoiseParams::uniform(1e-3).unwrap();
        assert_eq!(u.rate_for(&GateKind::RemoteCX), 1e-3);
        assert_eq!(u.rate_idle, 0.0);
        assert!(NoiseParams::circuit_level(1.5).is_err());
    }

    #[test]
    fn zero_rate_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = NoiseParams::noiseless();
        for _ in 0..1000 {
            assert!(sample_op_error(&GateOp::cx(0, 1), &n, 2, &mut rng).is_identity());
            assert!(!sample_meas_flip(&n, &mut rng));
        }
        assert!(sample_idle_errors(&[0, 1, 2], &n, &mut rng).is_empty());
    }

    #[test]
    fn uniform_model_has_no_idle_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = NoiseParams::uniform(0.5).unwrap();
        let idle: Vec<usize> = (0..100).collect();
        assert!(sample_idle_errors(&idle, &u, &mut rng).is_empty());
    }

    #[test]
    fn idle_mean_per_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = NoiseParams::circuit_level(1e-2).unwrap();
        let idle: Vec<usize> = (0..100).collect();
        let layers = 100_000u64;
        let hits: u64 = (0..layers)
            .map(|_| sample_idle_errors(&idle, &params, &mut rng).len() as u64)
            .sum();
        assert!(within_3_sigma(hits, layers * 100, 1e-4), "hits = {hits}");
    }

    #[test]
    fn meas_flip_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let trials = 10_000_000u64;
        let circ = NoiseParams::circuit_level(1e-3).unwrap();
        let hits = (0..trials).filter(|_| sample_meas_flip(&circ, &mut rng)).count() as u64;
        assert!(within_3_sigma(hits, trials, 1e-4), "hits = {hits}");
        let uni = NoiseParams::uniform(1e-3).unwrap();
        let hits = (0..trials).filter(|_| sample_meas_flip(&uni, &mut rng)).count() as u64;
        assert!(within_3_sigma(hits, trials, 1e-3), "hits = {hits}");
    }

    #[test]
    fn remote_gate_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params = NoiseParams::circuit_level(1e-4).unwrap();
        let trials = 10_000_000u64;
        let hits = (0..trials)
            .filter(|_| !sample_local_error(2, params.rate_remote, &mut rng).is_identity())
            .count() as u64;
        assert!(within_3_sigma(hits, trials, 3e-4), "hits = {hits}");
    }

    #[test]
    fn two_qubit_errors_uniform_over_fifteen() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut counts = [0u64; 16];
        let draws = 1_000_000u64;
        for _ in 0..draws {
            counts[sample_local_error(2, 1.0, &mut rng).0 as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        let expected = draws as f64 / 15.0;
        let chi2: f64 = counts[1..]
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 14 degrees of freedom, 1% upper critical value
        assert!(chi2 < 29.141, "chi2 = {chi2}");
    }

    #[test]
    fn each_two_qubit_pauli_has_rate_over_fifteen() {
        let params = NoiseParams::circuit_level(1e-4).unwrap();
        let per_pauli = params.rate_for(&GateKind::CX) / 15.0;
        assert!((per_pauli - 6.666_666_7e-6).abs() < 1e-12);
    }

    #[test]
    fn idle_gap_matches_per_layer_hit_probability() {
        // P(net Pauli != I) after k layers at rate r: (3/4)(1 - (1 - 4r/3)^k)
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (k, r) = (20u64, 0.01);
        let trials = 200_000u64;
        let hits = (0..trials)
            .filter(|_| !sample_idle_gap(k, r, &mut rng).is_identity())
            .count() as u64;
        let expected = 0.75 * (1.0 - (1.0 - 4.0 * r / 3.0).powi(k as i32));
        assert!(within_3_sigma(hits, trials, expected), "hits = {hits}");
    }
}
