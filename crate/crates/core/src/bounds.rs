//! Closed-form depth bounds for monolithic and distributed CliNR.
//!
//! `δᵢ` is the depth of one full RSP&V attempt of block `i` and `qᵢ` its
//! restart probability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub delta: Vec<f64>,
    pub q: Vec<f64>,
    pub n: usize,
    pub tau_e: f64,
    /// Generators per link; the effective generation time is `τ_e / L`.
    pub links: usize,
}

impl BoundInputs {
    /// Same `δ` and `q` for all `t` blocks.
    pub fn uniform(t: usize, delta: f64, q: f64, n: usize, tau_e: f64) -> Self {
        Self {
            delta: vec![delta; t],
            q: vec![q; t],
            n,
            tau_e,
            links: 1,
        }
    }

    pub fn t(&self) -> usize {
        self.delta.len()
    }

    fn validate(&self) -> Result<()> {
        if self.delta.is_empty() || self.delta.len() != self.q.len() {
            return Err(Error::InvalidArgument(format!(
                "need one (δ, q) per block, got {} and {}",
                self.delta.len(),
                self.q.len()
            )));
        }
        if let Some(&q) = self.q.iter().find(|q| !(0.0..1.0).contains(*q)) {
            return Err(Error::CertainRestart(q));
        }
        if self.links == 0 {
            return Err(Error::InvalidArgument("zero parallel links".into()));
        }
        Ok(())
    }

    fn max_delta(&self) -> f64 {
        self.delta.iter().copied().fold(0.0, f64::max)
    }

    fn min_success(&self) -> f64 {
        self.q.iter().map(|q| 1.0 - q).fold(1.0, f64::min)
    }

    fn generation_term(&self) -> f64 {
        self.n as f64 * self.tau_e / self.links as f64
    }
}

/// `Σᵢ δᵢ / (1 − qᵢ) + 4t`, the exact mean depth of monolithic CliNR with
/// geometric restarts.
pub fn monolithic_expected_depth(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let rspv: f64 = inputs.delta.iter().zip(&inputs.q).map(|(d, q)| d / (1.0 - q)).sum();
    Ok(rspv + 4.0 * inputs.t() as f64)
}

fn distributed_core(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let rspv = inputs.max_delta() * (ln(inputs.t()) + 3.0) / inputs.min_success();
    Ok(rspv.max(inputs.generation_term()))
}

/// `max(maxᵢ δᵢ (ln t + 3) / minᵢ(1 − qᵢ), n τ_e / L) + 4t`.
pub fn distributed_depth_bound(inputs: &BoundInputs) -> Result<f64> {
    Ok(distributed_core(inputs)? + 4.0 * inputs.t() as f64)
}

/// Same as [`distributed_depth_bound`] with `4(t + 1)`, counting the final
/// teleport as a fourth-layer stage of its own.
pub fn distributed_depth_bound_with_teleport(inputs: &BoundInputs) -> Result<f64> {
    Ok(distributed_core(inputs)? + 4.0 * (inputs.t() + 1) as f64)
}

fn ln(t: usize) -> f64 {
    (t as f64).ln()
}

/// `(ln t + 3) / p₀`, bounding the expected maximum of `t` independent
/// geometric variables with success probabilities at least `p₀`.
pub fn stopping_time_bound(t: usize, p0: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(Error::InvalidArgument(format!("p0 = {p0} must lie in (0, 1]")));
    }
    Ok((ln(t) + 3.0) / p0)
}

/// Whether `n τ_e / L ≤ δ (ln t + 3) / (1 − q)`: Bell pairs for one block
/// arrive no slower than the blocks are verified.
pub fn entanglement_sufficient(n: usize, tau_e: f64, delta: f64, q: f64, t: usize, links: usize) -> bool {
    if links == 0 {
        return false;
    }
    if q >= 1.0 {
        return true;
    }
    n as f64 * tau_e / links as f64 <= delta / (1.0 - q) * (ln(t.max(1)) + 3.0)
}

/// Smallest `L ≥ 1` for which [`entanglement_sufficient`] holds.
pub fn required_parallel_links(t: usize, n: usize, tau_e: f64, delta: f64, q: f64) -> u64 {
    if q >= 1.0 || tau_e <= 0.0 {
        return 1;
    }
    let need = n as f64 * tau_e * (1.0 - q) / (delta * (ln(t.max(1)) + 3.0));
    let mut l = need.ceil().max(1.0) as u64;
    while !entanglement_sufficient(n, tau_e, delta, q, t, l as usize) {
        l += 1;
    }
    l
}
