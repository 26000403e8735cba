//! Monte Carlo execution of noisy Clifford circuits: direct, monolithic
//! CliNR and distributed CliNR.
//!
//! Every shot draws from independent ChaCha streams derived from its seed:
//! stream `k + 1` drives block `k`'s RSP&V noise and observable draws,
//! stream 0 the rest of the noise. Restart counts therefore coincide
//! across modes and engines for the same seed. The reference engine draws
//! measurement outcomes from a further seed of its own.

mod backend;
mod exec;

pub use backend::{Backend, FrameBackend, TableauBackend};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arch::{ArchConfig, Timeline, World, DEFAULT_LAYER_CAP};
use crate::circuit::{layer, split_equal_depth, Circuit, GateOp, LayeredCircuit};
use crate::clinr::{controlled_pauli, ClinrConfig, ResourceBlock, RestartPolicy, RSI_DEPTH};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::pauli::PauliString;
use crate::tableau::{CanonicalForm, StabilizerTableau};
use exec::Exec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EngineKind {
    /// Tracks the full noisy stabilizer state.
    ReferenceTableau,
    /// Tracks only the accumulated Pauli error.
    PauliFrame,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Direct,
    Monolithic,
    Distributed(ArchConfig),
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Direct => "direct",
            Mode::Monolithic => "mono",
            Mode::Distributed(_) => "dist",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub engine: EngineKind,
    /// Replaces verification by a coin with this restart probability;
    /// every attempt then runs all `r` measurements.
    pub forced_restart_prob: Option<f64>,
    /// Distributed only: verified resource states are ready at layer 0
    /// and prepared without noise.
    pub instant_rspv: bool,
    pub trace: bool,
    pub layer_cap: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            engine: EngineKind::PauliFrame,
            forced_restart_prob: None,
            instant_rspv: false,
            trace: false,
            layer_cap: DEFAULT_LAYER_CAP,
        }
    }
}

impl RunOptions {
    pub fn with_engine(mut self, engine: EngineKind) -> Self {
        self.engine = engine;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotResult {
    pub failed: bool,
    pub depth: u64,
    /// Restarts of each block.
    pub restarts: Vec<u32>,
    /// Layers spent in RSP&V per block, restarts included.
    pub rspv_layers: Vec<u64>,
    /// Depth of the accepted attempt of each block.
    pub accepted_depths: Vec<u64>,
    pub stall_layers: u64,
    pub bell_pairs: u64,
    pub timeline: Option<Timeline>,
}

/// Splitmix-style mixing of a seed with an index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A circuit with everything precomputed for repeated shots.
#[derive(Clone, Debug)]
pub struct Experiment {
    circuit: Circuit,
    layered: LayeredCircuit,
    ideal: StabilizerTableau,
    clinr: Option<ClinrConfig>,
    blocks: Vec<ResourceBlock>,
}

impl Experiment {
    /// Direct execution only.
    pub fn direct(circuit: Circuit) -> Result<Self> {
        if let Some(op) = circuit.ops().iter().find(|op| !op.kind.is_unitary_clifford()) {
            return Err(Error::NonClifford(op.to_string()));
        }
        let ideal = StabilizerTableau::from_circuit(circuit.num_qubits(), circuit.ops())?;
        let layered = layer(&circuit);
        Ok(Self {
            circuit,
            layered,
            ideal,
            clinr: None,
            blocks: Vec::new(),
        })
    }

    /// Splits into `clinr.t` blocks of equal depth and builds their stages.
    pub fn new(circuit: Circuit, clinr: ClinrConfig) -> Result<Self> {
        let mut exp = Self::direct(circuit)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        exp.blocks = split_equal_depth(&exp.circuit, clinr.t)?
            .into_iter()
            .map(|c| ResourceBlock::build(c, clinr.r, &mut rng))
            .collect::<Result<_>>()?;
        exp.clinr = Some(clinr);
        Ok(exp)
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn n(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn blocks(&self) -> &[ResourceBlock] {
        &self.blocks
    }

    pub fn clinr(&self) -> Option<&ClinrConfig> {
        self.clinr.as_ref()
    }

    /// Stabilizer state `C|0ⁿ⟩`.
    pub fn ideal(&self) -> &StabilizerTableau {
        &self.ideal
    }

    pub fn run_shot(&self, mode: &Mode, noise: &NoiseParams, opts: &RunOptions, seed: u64) -> Result<ShotResult> {
        let register = self.register_size(mode);
        match opts.engine {
            EngineKind::PauliFrame => Ok(self.run_with(FrameBackend::new(register), mode, noise, opts, seed)?.0),
            EngineKind::ReferenceTableau => Ok(self.run_with(
                TableauBackend::new(register, derive_seed(seed, u64::MAX)),
                mode,
                noise,
                opts,
                seed,
            )?
            .0),
        }
    }

    /// Runs one shot on the reference tableau and also returns the
    /// canonical form of the reduced state on the output qubits, or `None`
    /// if the output is entangled with the rest of the register.
    pub fn run_shot_with_state(
        &self,
        mode: &Mode,
        noise: &NoiseParams,
        opts: &RunOptions,
        seed: u64,
    ) -> Result<(ShotResult, Option<CanonicalForm>)> {
        let backend = TableauBackend::new(self.register_size(mode), derive_seed(seed, u64::MAX));
        let (res, backend, out) = self.run_with(backend, mode, noise, opts, seed)?;
        Ok((res, backend.state().subsystem_canonical_form(&out)))
    }

    fn config(&self) -> Result<&ClinrConfig> {
        self.clinr
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("experiment was built without CliNR blocks".into()))
    }

    fn block_base(&self, k: usize) -> usize {
        self.n() + k * (2 * self.n() + 1)
    }

    fn register_size(&self, mode: &Mode) -> usize {
        let n = self.n();
        match mode {
            Mode::Direct => n,
            Mode::Monolithic => self.block_base(self.blocks.len()),
            Mode::Distributed(_) => self.block_base(self.blocks.len()) + 2 * n,
        }
    }

    fn run_with<B: Backend>(
        &self,
        backend: B,
        mode: &Mode,
        noise: &NoiseParams,
        opts: &RunOptions,
        seed: u64,
    ) -> Result<(ShotResult, B, Vec<usize>)> {
        let mut exec = Exec::new(backend, *noise, self.register_size(mode));
        let data: Vec<usize> = (0..self.n()).collect();
        for &q in &data {
            exec.set_live(q, -1);
        }
        let (res, out) = match mode {
            Mode::Direct => (self.direct_shot(&mut exec, &data, seed), data),
            Mode::Monolithic => self.monolithic_shot(&mut exec, data, opts, seed)?,
            Mode::Distributed(arch) => self.distributed_shot(&mut exec, data, arch, opts, seed)?,
        };
        Ok((res, exec.backend, out))
    }

    fn direct_shot<B: Backend>(&self, exec: &mut Exec<B>, data: &[usize], seed: u64) -> ShotResult {
        let mut rng = stream(seed, 0);
        for (l, ops) in self.layered.layers().iter().enumerate() {
            for op in ops {
                exec.gate(l as i64, op, &mut rng);
            }
        }
        let depth = self.layered.depth() as u64;
        exec.flush(data, depth as i64, &mut rng);
        ShotResult {
            failed: exec.backend.fails(&self.ideal, data),
            depth,
            restarts: Vec::new(),
            rspv_layers: Vec::new(),
            accepted_depths: Vec::new(),
            stall_layers: 0,
            bell_pairs: 0,
            timeline: None,
        }
    }

    /// Runs attempts of block `k` from layer `start` until one is accepted.
    fn prepare_block<B: Backend>(
        &self,
        exec: &mut Exec<B>,
        k: usize,
        start: i64,
        opts: &RunOptions,
        rng: &mut ChaCha8Rng,
    ) -> Result<BlockRun> {
        let cfg = self.config()?;
        let block = &self.blocks[k];
        let base = self.block_base(k);
        let mut at = start;
        let mut restarts = 0u32;
        loop {
            let observables: Vec<PauliString> = (0..cfg.r).map(|_| block.resource.random_stabilizer(rng)).collect();
            let (used, accepted) = attempt(exec, block, base, at, &observables, cfg.restart_policy, opts.forced_restart_prob, rng);
            at += used as i64;
            if at as u64 > opts.layer_cap {
                return Err(Error::LayerCapExceeded { cap: opts.layer_cap });
            }
            if accepted {
                return Ok(BlockRun {
                    end: at,
                    restarts,
                    accepted_depth: used,
                });
            }
            restarts += 1;
            for q in base..base + 2 * block.n() + 1 {
                exec.retire(q);
            }
        }
    }

    /// Bell-measures `data` against the first half of block `k` and applies
    /// the correction to the second half, which becomes the new data.
    /// `cx_layers[j]` is the layer of qubit `j`'s CX.
    fn inject<B: Backend>(
        &self,
        exec: &mut Exec<B>,
        k: usize,
        data: &[usize],
        cx_layers: &[i64],
        remote: bool,
        rng: &mut ChaCha8Rng,
    ) -> Vec<usize> {
        let n = self.n();
        let base = self.block_base(k);
        let mut outcomes = Vec::with_capacity(n);
        for (j, &d) in data.iter().enumerate() {
            let c = cx_layers[j];
            let r = base + j;
            if remote {
                exec.remote_cx(c, d, r, rng);
            } else {
                exec.gate(c, &GateOp::cx(d, r), rng);
            }
            exec.gate(c + 1, &GateOp::h(d), rng);
            let md = exec.measure(c + 2, d, rng);
            let mr = exec.measure(c + 2, r, rng);
            outcomes.push((md, mr));
        }
        let out: Vec<usize> = (base + n..base + 2 * n).collect();
        let corr = self.blocks[k].rsi.correction(outcomes);
        exec.correct(&corr, &out);
        out
    }

    fn monolithic_shot<B: Backend>(
        &self,
        exec: &mut Exec<B>,
        mut data: Vec<usize>,
        opts: &RunOptions,
        seed: u64,
    ) -> Result<(ShotResult, Vec<usize>)> {
        let t = self.config()?.t;
        let mut assembly = stream(seed, 0);
        let mut at = 0i64;
        let mut res = ShotResult {
            failed: false,
            depth: 0,
            restarts: Vec::with_capacity(t),
            rspv_layers: Vec::with_capacity(t),
            accepted_depths: Vec::with_capacity(t),
            stall_layers: 0,
            bell_pairs: 0,
            timeline: None,
        };
        for k in 0..t {
            let mut rng = stream(seed, k as u64 + 1);
            let run = self.prepare_block(exec, k, at, opts, &mut rng)?;
            res.restarts.push(run.restarts);
            res.rspv_layers.push((run.end - at) as u64);
            res.accepted_depths.push(run.accepted_depth);
            at = run.end;
            data = self.inject(exec, k, &data, &vec![at; data.len()], false, &mut assembly);
            at += RSI_DEPTH as i64;
        }
        exec.flush(&data, at, &mut assembly);
        res.depth = at as u64;
        res.failed = exec.backend.fails(&self.ideal, &data);
        Ok((res, data))
    }

    fn distributed_shot<B: Backend>(
        &self,
        exec: &mut Exec<B>,
        mut data: Vec<usize>,
        arch: &ArchConfig,
        opts: &RunOptions,
        seed: u64,
    ) -> Result<(ShotResult, Vec<usize>)> {
        let n = self.n();
        let t = self.config()?.t;
        arch.validate(n, t)?;
        let mut res = ShotResult {
            failed: false,
            depth: 0,
            restarts: Vec::with_capacity(t),
            rspv_layers: Vec::with_capacity(t),
            accepted_depths: Vec::with_capacity(t),
            stall_layers: 0,
            bell_pairs: 0,
            timeline: None,
        };
        let mut ready = Vec::with_capacity(t);
        for k in 0..t {
            let mut rng = stream(seed, k as u64 + 1);
            if opts.instant_rspv {
                let noise = exec.noise;
                exec.noise = NoiseParams::noiseless();
                let quiet = RunOptions {
                    forced_restart_prob: None,
                    ..opts.clone()
                };
                let run = self.prepare_block(exec, k, 0, &quiet, &mut rng)?;
                exec.noise = noise;
                let base = self.block_base(k);
                for q in base..base + 2 * n {
                    exec.set_live(q, -1);
                }
                res.restarts.push(run.restarts);
                res.rspv_layers.push(0);
                res.accepted_depths.push(0);
                ready.push(0);
            } else {
                let run = self.prepare_block(exec, k, 0, opts, &mut rng)?;
                res.restarts.push(run.restarts);
                res.rspv_layers.push(run.end as u64);
                res.accepted_depths.push(run.accepted_depth);
                ready.push(run.end as u64);
            }
        }
        let mut world = World::new(arch.clone(), n, ready)?.with_layer_cap(opts.layer_cap);
        if opts.trace {
            world = world.with_trace();
        }
        let timeline = world.run()?;
        let mut assembly = stream(seed, 0);
        for (k, tr) in timeline.injections().iter().enumerate() {
            let layers: Vec<i64> = tr.cx_layers.iter().map(|&c| c as i64).collect();
            data = self.inject(exec, k, &data, &layers, true, &mut assembly);
        }
        let out_base = self.block_base(t);
        let store_base = out_base + n;
        let tp = timeline.teleport();
        for (j, &s) in data.iter().enumerate() {
            exec.teleport(tp.cx_layers[j] as i64, s, store_base + j, out_base + j, &mut assembly);
        }
        let out: Vec<usize> = (out_base..out_base + n).collect();
        exec.flush(&out, timeline.total_depth as i64, &mut assembly);
        res.depth = timeline.total_depth;
        res.stall_layers = timeline.stall_layers();
        res.bell_pairs = timeline.pairs_consumed();
        res.failed = exec.backend.fails(&self.ideal, &out);
        res.timeline = Some(timeline);
        Ok((res, out))
    }
}

/// One RSP&V attempt. Returns the layers used and whether the resource
/// was accepted.
#[allow(clippy::too_many_arguments)]
fn attempt<B: Backend>(
    exec: &mut Exec<B>,
    block: &ResourceBlock,
    base: usize,
    start: i64,
    observables: &[PauliString],
    policy: RestartPolicy,
    forced_restart_prob: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> (u64, bool) {
    for (l, ops) in block.rsp.layers().iter().enumerate() {
        for op in ops {
            exec.op(start + l as i64, &op.shifted(base), rng);
        }
    }
    let anc = base + 2 * block.n();
    let mut at = start + block.rsp_depth() as i64;
    let mut detected = false;
    for obs in observables {
        let support = obs.support();
        exec.prep(at, anc, rng);
        exec.gate(at + 1, &GateOp::h(anc), rng);
        for (i, &q) in support.iter().enumerate() {
            exec.gate(at + 2 + i as i64, &controlled_pauli(anc, base + q, obs.get(q)), rng);
        }
        let w = support.len() as i64;
        exec.gate(at + 2 + w, &GateOp::h(anc), rng);
        let outcome = exec.measure(at + 3 + w, anc, rng);
        at += w + 4;
        let expected = !B::RELATIVE && obs.sign().is_negative();
        if outcome != expected {
            detected = true;
            if policy == RestartPolicy::Immediate && forced_restart_prob.is_none() {
                break;
            }
        }
    }
    let used = (at - start) as u64;
    match forced_restart_prob {
        Some(q) => (used, !rng.random_bool(q)),
        None => (used, !detected),
    }
}


struct BlockRun {
    end: i64,
    restarts: u32,
    accepted_depth: u64,
}

pub fn run_direct(circuit: &Circuit, noise: &NoiseParams, engine: EngineKind, seed: u64) -> Result<ShotResult> {
    Experiment::direct(circuit.clone())?.run_shot(
        &Mode::Direct,
        noise,
        &RunOptions::default().with_engine(engine),
        seed,
    )
}

pub fn run_monolithic_clinr(
    circuit: &Circuit,
    config: ClinrConfig,
    noise: &NoiseParams,
    engine: EngineKind,
    seed: u64,
) -> Result<ShotResult> {
    Experiment::new(circuit.clone(), config)?.run_shot(
        &Mode::Monolithic,
        noise,
        &RunOptions::default().with_engine(engine),
        seed,
    )
}

pub fn run_distributed_clinr(
    circuit: &Circuit,
    config: ClinrConfig,
    arch: &ArchConfig,
    noise: &NoiseParams,
    engine: EngineKind,
    seed: u64,
) -> Result<ShotResult> {
    Experiment::new(circuit.clone(), config)?.run_shot(
        &Mode::Distributed(arch.clone()),
        noise,
        &RunOptions::default().with_engine(engine),
        seed,
    )
}

/// Aggregate over shots of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub shots: usize,
    pub failures: usize,
    pub ler: f64,
    /// Binomial standard error of `ler`.
    pub ler_std_err: f64,
    pub depth_mean: f64,
    pub depth_std: f64,
    pub restarts_mean: f64,
    /// Attempts that ended in a restart over all attempts.
    pub restart_rate: f64,
    pub accepted_depth_mean: f64,
    pub stall_layers_mean: f64,
}

impl Estimate {
    pub fn from_shots(shots: &[ShotResult]) -> Self {
        let m = shots.len().max(1) as f64;
        let failures = shots.iter().filter(|s| s.failed).count();
        let ler = failures as f64 / m;
        let depths: Vec<f64> = shots.iter().map(|s| s.depth as f64).collect();
        let depth_mean = depths.iter().sum::<f64>() / m;
        let depth_std = if shots.len() > 1 {
            (depths.iter().map(|d| (d - depth_mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
        } else {
            0.0
        };
        let restarts: u64 = shots.iter().flat_map(|s| &s.restarts).map(|&r| r as u64).sum();
        let accepted: Vec<u64> = shots.iter().flat_map(|s| s.accepted_depths.iter().copied()).collect();
        let attempts = restarts + accepted.len() as u64;
        Self {
            shots: shots.len(),
            failures,
            ler,
            ler_std_err: (ler * (1.0 - ler) / m).sqrt(),
            depth_mean,
            depth_std,
            restarts_mean: restarts as f64 / m,
            restart_rate: if attempts == 0 {
                0.0
            } else {
                restarts as f64 / attempts as f64
            },
            accepted_depth_mean: if accepted.is_empty() {
                0.0
            } else {
                accepted.iter().sum::<u64>() as f64 / accepted.len() as f64
            },
            stall_layers_mean: shots.iter().map(|s| s.stall_layers as f64).sum::<f64>() / m,
        }
    }
}

/// Runs `shots` shots in parallel; shot `i` uses seed `derive_seed(seed, i)`.
pub fn run_shots(
    exp: &Experiment,
    mode: &Mode,
    noise: &NoiseParams,
    opts: &RunOptions,
    shots: usize,
    seed: u64,
) -> Result<Vec<ShotResult>> {
    (0..shots)
        .into_par_iter()
        .map(|i| exp.run_shot(mode, noise, opts, derive_seed(seed, i as u64)))
        .collect()
}

pub fn estimate(
    exp: &Experiment,
    mode: &Mode,
    noise: &NoiseParams,
    opts: &RunOptions,
    shots: usize,
    seed: u64,
) -> Result<Estimate> {
    Ok(Estimate::from_shots(&run_shots(exp, mode, noise, opts, shots, seed)?))
}

/// Whether the final state is not `C|0ⁿ⟩` up to a global phase, given the
/// residual Pauli error on the output register.
pub fn is_logical_failure(ideal: &StabilizerTableau, residual: &PauliString) -> bool {
    !ideal.acts_trivially(residual)
}

/// Probability that an attempt ends in a restart, estimated from
/// `attempts` simulated RSP&V attempts of `block`.
pub fn estimate_restart_probability(
    block: &ResourceBlock,
    r: usize,
    policy: RestartPolicy,
    noise: &NoiseParams,
    attempts: usize,
    seed: u64,
) -> Result<f64> {
    if attempts == 0 {
        return Err(Error::InvalidArgument("need at least one attempt".into()));
    }
    let n = block.n();
    let restarts: usize = (0..attempts)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(derive_seed(seed, i as u64), 1);
            let mut exec = Exec::new(FrameBackend::new(2 * n + 1), *noise, 2 * n + 1);
            let observables: Vec<PauliString> = (0..r).map(|_| block.resource.random_stabilizer(&mut rng)).collect();
            let (_, accepted) = attempt(&mut exec, block, 0, 0, &observables, policy, None, &mut rng);
            usize::from(!accepted)
        })
        .sum();
    Ok(restarts as f64 / attempts as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::random_clifford_circuit;

    fn experiment(n: usize, size: usize, t: usize, r: usize, seed: u64) -> Experiment {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_clifford_circuit(n, size, Default::default(), &mut rng).unwrap();
        Experiment::new(c, ClinrConfig::new(t, r, RestartPolicy::Immediate).unwrap()).unwrap()
    }

    fn modes(n: usize, t: usize) -> Vec<Mode> {
        vec![
            Mode::Direct,
            Mode::Monolithic,
            Mode::Distributed(ArchConfig::for_clinr(n, t, 0)),
            Mode::Distributed(ArchConfig::for_clinr(n, t, 3)),
        ]
    }

    #[test]
    fn noiseless_runs_never_fail() {
        let noise = NoiseParams::noiseless();
        for seed in 0..6 {
            let exp = experiment(4, 24, 3, 2, seed);
            for mode in modes(4, 3) {
                for engine in [EngineKind::PauliFrame, EngineKind::ReferenceTableau] {
                    let opts = RunOptions::default().with_engine(engine);
                    for shot in 0..4 {
                        let res = exp.run_shot(&mode, &noise, &opts, shot).unwrap();
                        assert!(!res.failed, "{mode:?} {engine:?} seed {seed}");
                        assert!(res.restarts.iter().all(|&r| r == 0));
                    }
                }
            }
        }
    }

    #[test]
    fn noiseless_depths() {
        let exp = experiment(5, 40, 2, 3, 11);
        let noise = NoiseParams::noiseless();
        let opts = RunOptions::default();
        let direct = exp.run_shot(&Mode::Direct, &noise, &opts, 1).unwrap();
        assert_eq!(direct.depth, exp.circuit().depth() as u64);
        let mono = exp.run_shot(&Mode::Monolithic, &noise, &opts, 1).unwrap();
        assert_eq!(mono.depth, mono.accepted_depths.iter().sum::<u64>() + 4 * 2);
        let dist = exp
            .run_shot(&Mode::Distributed(ArchConfig::for_clinr(5, 2, 0)), &noise, &opts, 1)
            .unwrap();
        let d = &dist.accepted_depths;
        assert_eq!(dist.depth, (d[0] + 8).max(d[1] + 4) + 4);
        assert_eq!(dist.bell_pairs, 3 * 5);
    }

    #[test]
    fn engines_agree_shot_by_shot() {
        let noise = NoiseParams::circuit_level(0.03).unwrap();
        for seed in 0..3 {
            let exp = experiment(3, 15, 2, 2, seed);
            for mode in modes(3, 2) {
                for shot in 0..150 {
                    let f = exp.run_shot(&mode, &noise, &RunOptions::default(), shot).unwrap();
                    let r = exp
                        .run_shot(
                            &mode,
                            &noise,
                            &RunOptions::default().with_engine(EngineKind::ReferenceTableau),
                            shot,
                        )
                        .unwrap();
                    assert_eq!(f.failed, r.failed, "{mode:?} seed {seed} shot {shot}");
                    assert_eq!(f.restarts, r.restarts);
                    assert_eq!(f.depth, r.depth);
                }
            }
        }
    }

    #[test]
    fn uniform_noise_fails_direct_runs() {
        let exp = experiment(4, 40, 2, 2, 5);
        let est = estimate(
            &exp,
            &Mode::Direct,
            &NoiseParams::uniform(0.05).unwrap(),
            &RunOptions::default(),
            500,
            9,
        )
        .unwrap();
        assert!(est.ler > 0.3 && est.ler < 1.0, "{est:?}");
    }

    #[test]
    fn forced_restarts_are_geometric() {
        let exp = experiment(3, 12, 1, 1, 2);
        let opts = RunOptions {
            forced_restart_prob: Some(0.5),
            ..RunOptions::default()
        };
        let shots = run_shots(&exp, &Mode::Monolithic, &NoiseParams::noiseless(), &opts, 4000, 1).unwrap();
        let mean_attempts = shots.iter().map(|s| s.restarts[0] as f64 + 1.0).sum::<f64>() / 4000.0;
        assert!((mean_attempts - 2.0).abs() < 0.1, "{mean_attempts}");
    }

    #[test]
    fn restart_probability_grows_with_noise() {
        let exp = experiment(4, 20, 1, 3, 3);
        let b = &exp.blocks()[0];
        let quiet =
            estimate_restart_probability(b, 3, RestartPolicy::EndOfRound, &NoiseParams::noiseless(), 200, 1)
                .unwrap();
        assert_eq!(quiet, 0.0);
        let loud = estimate_restart_probability(
            b,
            3,
            RestartPolicy::EndOfRound,
            &NoiseParams::circuit_level(0.05).unwrap(),
            2000,
            1,
        )
        .unwrap();
        assert!(loud > 0.05, "{loud}");
    }

    #[test]
    fn seeds_are_reproducible() {
        let exp = experiment(4, 20, 2, 2, 8);
        let noise = NoiseParams::circuit_level(0.01).unwrap();
        let mode = Mode::Distributed(ArchConfig::for_clinr(4, 2, 2));
        let a = run_shots(&exp, &mode, &noise, &RunOptions::default(), 50, 77).unwrap();
        let b = run_shots(&exp, &mode, &noise, &RunOptions::default(), 50, 77).unwrap();
        assert_eq!(a, b);
    }
}
