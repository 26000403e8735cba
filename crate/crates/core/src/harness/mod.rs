//! Parameter sweeps over `(mode, n, τ_e)` with per-circuit statistics.
//!
//! Circuit `c` of a sweep is drawn from seed `derive_seed(master_seed, c)`
//! and shot `s` on it uses `derive_seed(circuit_seed, s)`. Every mode and
//! `τ_e` therefore sees the same circuits and the same noise streams.

mod config;

pub use config::{ExperimentConfig, ModeSelection};

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arch::{ArchConfig, LayerRecord};
use crate::bounds::{
    distributed_depth_bound, entanglement_sufficient, monolithic_expected_depth, required_parallel_links,
    BoundInputs,
};
use crate::circuit::random_clifford_circuit;
use crate::clinr::ClinrConfig;
use crate::engine::{derive_seed, run_shots, Estimate, Experiment, Mode, RunOptions, ShotResult};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowMode {
    Direct,
    Mono,
    Dist,
}

/// Statistics of one circuit at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub circuit: usize,
    pub seed: u64,
    pub ler: f64,
    pub depth_mean: f64,
    pub restart_rate: f64,
    pub stall_layers_mean: f64,
    /// Mean accepted RSP&V depth over blocks and shots.
    pub delta_mean: f64,
    pub bound_mono: Option<f64>,
    pub bound_dist: Option<f64>,
}

/// One row of `results.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointStats {
    pub mode: RowMode,
    pub n: usize,
    /// Absent for modes without interconnect.
    pub tau_e: Option<u32>,
    pub p: f64,
    pub t: usize,
    pub r: usize,
    pub ler_mean: f64,
    /// Sample standard deviation of the per-circuit rates.
    pub ler_std: f64,
    pub depth_mean: f64,
    pub depth_std: f64,
    pub bound_mono: Option<f64>,
    pub bound_dist: Option<f64>,
    pub eq9_satisfied: Option<bool>,
    #[serde(rename = "L_required")]
    pub l_required: Option<u64>,
    #[serde(skip)]
    pub circuits: Vec<CircuitStats>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepStats {
    pub config: ExperimentConfig,
    pub points: Vec<PointStats>,
    pub traces: Vec<TraceLine>,
}

/// One layer of a scheduler trace, tagged with its sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub n: usize,
    pub tau_e: u32,
    #[serde(flatten)]
    pub record: LayerRecord,
}

impl SweepStats {
    pub fn point(&self, mode: RowMode, n: usize, tau_e: Option<u32>) -> Option<&PointStats> {
        self.points
            .iter()
            .find(|p| p.mode == mode && p.n == n && (p.tau_e == tau_e || mode != RowMode::Dist))
    }
}

/// Mean and sample (n − 1) standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (m, 0.0);
    }
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (m, var.sqrt())
}

struct CircuitRun {
    rows: Vec<(RowMode, Option<u32>, CircuitStats)>,
    traces: Vec<TraceLine>,
}

fn block_estimates(shots: &[ShotResult], t: usize) -> (Vec<f64>, Vec<f64>) {
    let m = shots.len() as f64;
    let mut delta = vec![0.0; t];
    let mut q = vec![0.0; t];
    for i in 0..t {
        let restarts: f64 = shots.iter().map(|s| s.restarts[i] as f64).sum();
        delta[i] = shots.iter().map(|s| s.accepted_depths[i] as f64).sum::<f64>() / m;
        q[i] = restarts / (restarts + m);
    }
    (delta, q)
}

fn circuit_stats(
    index: usize,
    seed: u64,
    shots: &[ShotResult],
    bounds: Option<(f64, Option<f64>)>,
) -> CircuitStats {
    let est = Estimate::from_shots(shots);
    CircuitStats {
        circuit: index,
        seed,
        ler: est.ler,
        depth_mean: est.depth_mean,
        restart_rate: est.restart_rate,
        stall_layers_mean: est.stall_layers_mean,
        delta_mean: est.accepted_depth_mean,
        bound_mono: bounds.map(|b| b.0),
        bound_dist: bounds.and_then(|b| b.1),
    }
}

fn run_circuit(cfg: &ExperimentConfig, n: usize, index: usize, trace: bool) -> Result<CircuitRun> {
    let seed = derive_seed(cfg.master_seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circuit = random_clifford_circuit(n, cfg.circuit_size(n), Default::default(), &mut rng)?;
    let noise = cfg.noise()?;
    let opts = RunOptions {
        engine: cfg.engine,
        layer_cap: cfg.layer_cap,
        ..RunOptions::default()
    };
    let shots = cfg.shots_per_circuit;
    let mut out = CircuitRun {
        rows: Vec::new(),
        traces: Vec::new(),
    };
    let exp = if cfg.mode.mono() || cfg.mode.dist() {
        Experiment::new(circuit, ClinrConfig::new(cfg.t, cfg.r, cfg.restart_policy)?)?
    } else {
        Experiment::direct(circuit)?
    };
    if cfg.mode.direct() {
        let res = run_shots(&exp, &Mode::Direct, &noise, &opts, shots, seed)?;
        out.rows.push((RowMode::Direct, None, circuit_stats(index, seed, &res, None)));
    }
    if cfg.mode.mono() {
        let res = run_shots(&exp, &Mode::Monolithic, &noise, &opts, shots, seed)?;
        let (delta, q) = block_estimates(&res, cfg.t);
        let inputs = BoundInputs {
            delta,
            q,
            n,
            tau_e: 0.0,
            links: cfg.links,
        };
        let bound = monolithic_expected_depth(&inputs)?;
        out.rows.push((RowMode::Mono, None, circuit_stats(index, seed, &res, Some((bound, None)))));
    }
    if cfg.mode.dist() {
        for &tau_e in &cfg.tau_e_values {
            let arch = ArchConfig::for_clinr(n, cfg.t, tau_e).with_links(cfg.links);
            let mode = Mode::Distributed(arch);
            let res = run_shots(&exp, &mode, &noise, &opts, shots, seed)?;
            let (delta, q) = block_estimates(&res, cfg.t);
            let inputs = BoundInputs {
                delta,
                q,
                n,
                tau_e: tau_e as f64,
                links: cfg.links,
            };
            let bounds = (monolithic_expected_depth(&inputs)?, Some(distributed_depth_bound(&inputs)?));
            out.rows.push((RowMode::Dist, Some(tau_e), circuit_stats(index, seed, &res, Some(bounds))));
            if trace && index == 0 {
                let traced = RunOptions {
                    trace: true,
                    ..opts.clone()
                };
                let shot = exp.run_shot(&mode, &noise, &traced, derive_seed(seed, 0))?;
                let records = shot.timeline.and_then(|t| t.trace).unwrap_or_default();
                out.traces
                    .extend(records.into_iter().map(|record| TraceLine { n, tau_e, record }));
            }
        }
    }
    Ok(out)
}

fn aggregate(cfg: &ExperimentConfig, n: usize, mode: RowMode, tau_e: Option<u32>, circuits: Vec<CircuitStats>) -> PointStats {
    let (ler_mean, ler_std) = mean_std(&circuits.iter().map(|c| c.ler).collect::<Vec<_>>());
    let (depth_mean, depth_std) = mean_std(&circuits.iter().map(|c| c.depth_mean).collect::<Vec<_>>());
    let avg = |f: &dyn Fn(&CircuitStats) -> Option<f64>| -> Option<f64> {
        let v: Option<Vec<f64>> = circuits.iter().map(f).collect();
        v.map(|v| mean_std(&v).0)
    };
    let bound_mono = avg(&|c| c.bound_mono);
    let bound_dist = avg(&|c| c.bound_dist);
    let (eq9_satisfied, l_required) = match (mode, tau_e) {
        (RowMode::Dist, Some(tau)) => {
            let delta = mean_std(&circuits.iter().map(|c| c.delta_mean).collect::<Vec<_>>()).0;
            let q = mean_std(&circuits.iter().map(|c| c.restart_rate).collect::<Vec<_>>()).0;
            (
                Some(entanglement_sufficient(n, tau as f64, delta, q, cfg.t, cfg.links)),
                Some(required_parallel_links(cfg.t, n, tau as f64, delta, q)),
            )
        }
        _ => (None, None),
    };
    PointStats {
        mode,
        n,
        tau_e,
        p: cfg.p,
        t: cfg.t,
        r: cfg.r,
        ler_mean,
        ler_std,
        depth_mean,
        depth_std,
        bound_mono,
        bound_dist,
        eq9_satisfied,
        l_required,
        circuits,
    }
}

/// Runs the whole sweep in memory.
pub fn run_sweep(cfg: &ExperimentConfig, trace: bool) -> Result<SweepStats> {
    cfg.validate()?;
    let mut points = Vec::new();
    let mut traces = Vec::new();
    for &n in &cfg.n_values {
        let runs: Vec<CircuitRun> = (0..cfg.num_circuits)
            .into_par_iter()
            .map(|c| run_circuit(cfg, n, c, trace))
            .collect::<Result<_>>()?;
        let mut keys: Vec<(RowMode, Option<u32>)> = runs[0].rows.iter().map(|(m, t, _)| (*m, *t)).collect();
        keys.dedup();
        for (mode, tau_e) in keys {
            let circuits: Vec<CircuitStats> = runs
                .iter()
                .flat_map(|r| r.rows.iter().filter(|(m, t, _)| *m == mode && *t == tau_e))
                .map(|(_, _, s)| s.clone())
                .collect();
            points.push(aggregate(cfg, n, mode, tau_e, circuits));
        }
        traces.extend(runs.into_iter().flat_map(|r| r.traces));
    }
    Ok(SweepStats {
        config: cfg.clone(),
        points,
        traces,
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes `results.csv`.
pub fn write_results<W: Write>(stats: &SweepStats, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for p in &stats.points {
        wtr.serialize(p).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CircuitRow {
    mode: RowMode,
    n: usize,
    tau_e: Option<u32>,
    circuit: usize,
    seed: u64,
    ler: f64,
    depth_mean: f64,
    restart_rate: f64,
    stall_layers_mean: f64,
    delta_mean: f64,
    bound_mono: Option<f64>,
    bound_dist: Option<f64>,
}

/// Writes `circuits.csv`, one row per circuit and sweep point.
pub fn write_circuits<W: Write>(stats: &SweepStats, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for p in &stats.points {
        for c in &p.circuits {
            wtr.serialize(CircuitRow {
                mode: p.mode,
                n: p.n,
                tau_e: p.tau_e,
                circuit: c.circuit,
                seed: c.seed,
                ler: c.ler,
                depth_mean: c.depth_mean,
                restart_rate: c.restart_rate,
                stall_layers_mean: c.stall_layers_mean,
                delta_mean: c.delta_mean,
                bound_mono: c.bound_mono,
                bound_dist: c.bound_dist,
            })
            .map_err(csv_err)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads back a `results.csv`.
pub fn read_results(path: &Path) -> Result<Vec<PointStats>> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    rdr.deserialize().map(|r| r.map_err(csv_err)).collect()
}

#[derive(Serialize)]
struct RunInfo<'a> {
    schema_version: u32,
    crate_version: &'static str,
    config: &'a ExperimentConfig,
}

/// Writes `results.csv`, `circuits.csv`, `run_info.json`, `comparison.csv`
/// when all modes ran, and `trace.ndjson` when traces were recorded.
/// Returns the written paths.
pub fn write_outputs(stats: &SweepStats, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut open = |name: &str| -> Result<BufWriter<File>> {
        let path = dir.join(name);
        let f = File::create(&path)?;
        written.push(path);
        Ok(BufWriter::new(f))
    };
    write_results(stats, open("results.csv")?)?;
    write_circuits(stats, open("circuits.csv")?)?;
    let info = RunInfo {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION"),
        config: &stats.config,
    };
    let mut w = open("run_info.json")?;
    serde_json::to_writer_pretty(&mut w, &info).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    if stats.config.mode == ModeSelection::All {
        let mut wtr = csv::Writer::from_writer(open("comparison.csv")?);
        for c in compare_modes(stats)? {
            wtr.serialize(c).map_err(csv_err)?;
        }
        wtr.flush()?;
    }
    if !stats.traces.is_empty() {
        let mut w = open("trace.ndjson")?;
        for line in &stats.traces {
            serde_json::to_writer(&mut w, line).map_err(|e| Error::Io(e.into()))?;
            writeln!(w)?;
        }
        w.flush()?;
    }
    Ok(written)
}

/// Mean and sample standard deviation of per-circuit differences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedDiff {
    pub mean: f64,
    pub std: f64,
}

impl PairedDiff {
    pub fn of(a: &PointStats, b: &PointStats, f: impl Fn(&CircuitStats) -> f64) -> Self {
        let d: Vec<f64> = a.circuits.iter().zip(&b.circuits).map(|(x, y)| f(x) - f(y)).collect();
        let (mean, std) = mean_std(&d);
        Self { mean, std }
    }
}

/// Distributed CliNR against the other two modes at one `(n, τ_e)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub n: usize,
    pub tau_e: u32,
    /// Lower than direct by more than the combined standard deviation.
    pub dist_ler_better_than_direct: bool,
    pub ler_dist_minus_direct_mean: f64,
    pub ler_dist_minus_direct_std: f64,
    /// Not above monolithic by more than the sum of the two error bars.
    pub dist_ler_le_mono: bool,
    pub ler_dist_minus_mono_mean: f64,
    pub ler_dist_minus_mono_std: f64,
    pub dist_depth_lt_mono: bool,
    pub depth_dist_minus_mono_mean: f64,
    pub depth_dist_minus_mono_std: f64,
    pub dist_depth_lt_direct: bool,
    pub depth_dist_minus_direct_mean: f64,
    pub depth_dist_minus_direct_std: f64,
}

pub fn compare_modes(stats: &SweepStats) -> Result<Vec<ModeComparison>> {
    let mut out = Vec::new();
    for dist in stats.points.iter().filter(|p| p.mode == RowMode::Dist) {
        let missing = |m: &str| Error::InvalidArgument(format!("no {m} results for n = {}", dist.n));
        let direct = stats.point(RowMode::Direct, dist.n, None).ok_or_else(|| missing("direct"))?;
        let mono = stats.point(RowMode::Mono, dist.n, None).ok_or_else(|| missing("mono"))?;
        let ler_direct = PairedDiff::of(dist, direct, |c| c.ler);
        let ler_mono = PairedDiff::of(dist, mono, |c| c.ler);
        let depth_mono = PairedDiff::of(dist, mono, |c| c.depth_mean);
        let depth_direct = PairedDiff::of(dist, direct, |c| c.depth_mean);
        out.push(ModeComparison {
            n: dist.n,
            tau_e: dist.tau_e.unwrap_or(0),
            dist_ler_better_than_direct: direct.ler_mean - dist.ler_mean
                > (dist.ler_std.powi(2) + direct.ler_std.powi(2)).sqrt(),
            ler_dist_minus_direct_mean: ler_direct.mean,
            ler_dist_minus_direct_std: ler_direct.std,
            dist_ler_le_mono: dist.ler_mean <= mono.ler_mean + dist.ler_std + mono.ler_std,
            ler_dist_minus_mono_mean: ler_mono.mean,
            ler_dist_minus_mono_std: ler_mono.std,
            dist_depth_lt_mono: dist.depth_mean < mono.depth_mean,
            depth_dist_minus_mono_mean: depth_mono.mean,
            depth_dist_minus_mono_std: depth_mono.std,
            dist_depth_lt_direct: dist.depth_mean < direct.depth_mean,
            depth_dist_minus_direct_mean: depth_direct.mean,
            depth_dist_minus_direct_std: depth_direct.std,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: ModeSelection, p: f64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::with_n(vec![6]);
        cfg.mode = mode;
        cfg.p = p;
        cfg.t = 2;
        cfg.r = 1;
        cfg.tau_e_values = vec![1, 2];
        cfg.num_circuits = 3;
        cfg.shots_per_circuit = 20;
        cfg
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.290_994_448_735_805_6).abs() < 1e-12);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn noiseless_sweep_has_zero_rates() {
        let stats = run_sweep(&small(ModeSelection::All, 0.0), false).unwrap();
        assert_eq!(stats.points.len(), 4);
        for p in &stats.points {
            assert_eq!(p.ler_mean, 0.0);
            assert_eq!(p.circuits.len(), 3);
        }
        for c in compare_modes(&stats).unwrap() {
            assert_eq!(c.ler_dist_minus_direct_mean, 0.0);
            assert!(c.dist_ler_le_mono);
            assert!(!c.dist_ler_better_than_direct);
        }
    }

    #[test]
    fn csv_round_trip_and_reproducible() {
        let cfg = small(ModeSelection::All, 1e-3);
        let a = run_sweep(&cfg, false).unwrap();
        let b = run_sweep(&cfg, false).unwrap();
        let (mut wa, mut wb) = (Vec::new(), Vec::new());
        write_results(&a, &mut wa).unwrap();
        write_results(&b, &mut wb).unwrap();
        assert_eq!(wa, wb);
        let text = String::from_utf8(wa).unwrap();
        assert!(text.starts_with(
            "mode,n,tau_e,p,t,r,ler_mean,ler_std,depth_mean,depth_std,bound_mono,bound_dist,eq9_satisfied,L_required\n"
        ));
        let direct_line = text.lines().nth(1).unwrap();
        assert!(direct_line.starts_with("direct,6,,"));
        assert!(direct_line.ends_with(",,,,"));
    }

    #[test]
    fn comparison_needs_all_modes() {
        let stats = run_sweep(&small(ModeSelection::DistClinr, 0.0), false).unwrap();
        assert!(compare_modes(&stats).is_err());
    }

    #[test]
    fn depth_verdict_from_synthetic_stats() {
        let row = |mode, depth: f64| PointStats {
            mode,
            n: 4,
            tau_e: (mode == RowMode::Dist).then_some(1),
            p: 0.0,
            t: 1,
            r: 1,
            ler_mean: 0.0,
            ler_std: 0.0,
            depth_mean: depth,
            depth_std: 0.0,
            bound_mono: None,
            bound_dist: None,
            eq9_satisfied: None,
            l_required: None,
            circuits: vec![CircuitStats {
                circuit: 0,
                seed: 0,
                ler: 0.0,
                depth_mean: depth,
                restart_rate: 0.0,
                stall_layers_mean: 0.0,
                delta_mean: 0.0,
                bound_mono: None,
                bound_dist: None,
            }],
        };
        let stats = SweepStats {
            config: small(ModeSelection::All, 0.0),
            points: vec![row(RowMode::Direct, 30.0), row(RowMode::Mono, 80.0), row(RowMode::Dist, 50.0)],
            traces: Vec::new(),
        };
        let c = &compare_modes(&stats).unwrap()[0];
        assert!(c.dist_depth_lt_mono);
        assert!(!c.dist_depth_lt_direct);
        assert_eq!(c.depth_dist_minus_mono_mean, -30.0);
    }
}
