//! Depth of CliNR schedules when every RSP&V attempt lasts a fixed `δᵢ`
//! layers and is rejected independently with probability `qᵢ`.

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::arch::{ArchConfig, Timeline, World};
use crate::clinr::RSI_DEPTH;
use crate::error::{Error, Result};

/// Attempts up to and including the first success.
pub fn attempts_until_success<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Result<u64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::CertainRestart(q));
    }
    let failures = Geometric::new(1.0 - q)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(rng);
    Ok(failures + 1)
}

/// `max` of independent geometric variables with success probabilities `p`.
pub fn max_of_geometrics<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> Result<u64> {
    p.iter()
        .map(|&pi| attempts_until_success(1.0 - pi, rng))
        .try_fold(0, |m, a| Ok(m.max(a?)))
}

/// One monolithic run: blocks back to back, each followed by injection.
pub fn monolithic_depth<R: Rng + ?Sized>(delta: &[u64], q: &[f64], rng: &mut R) -> Result<u64> {
    check(delta, q)?;
    delta.iter().zip(q).try_fold(0, |acc, (&d, &qi)| {
        Ok(acc + attempts_until_success(qi, rng)? * d + RSI_DEPTH)
    })
}

/// Ready layers of all blocks when RSP&V runs in parallel.
pub fn ready_layers<R: Rng + ?Sized>(delta: &[u64], q: &[f64], rng: &mut R) -> Result<Vec<u64>> {
    check(delta, q)?;
    delta
        .iter()
        .zip(q)
        .map(|(&d, &qi)| Ok(attempts_until_success(qi, rng)? * d))
        .collect()
}

/// One distributed run on `arch`, with the injection schedule produced by
/// the link scheduler.
pub fn distributed_timeline<R: Rng + ?Sized>(
    delta: &[u64],
    q: &[f64],
    arch: &ArchConfig,
    n: usize,
    trace: bool,
    rng: &mut R,
) -> Result<Timeline> {
    let ready = ready_layers(delta, q, rng)?;
    let mut world = World::new(arch.clone(), n, ready)?;
    if trace {
        world = world.with_trace();
    }
    world.run()
}

fn check(delta: &[u64], q: &[f64]) -> Result<()> {
    if delta.len() != q.len() {
        return Err(Error::InvalidArgument(format!(
            "{} depths for {} restart probabilities",
            delta.len(),
            q.len()
        )));
    }
    Ok(())
}
