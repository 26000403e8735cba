//! Ring of QPUs linked by slow Bell-pair generators, and the layer-by-layer
//! scheduler for serial block injection.
//!
//! QPU `Q_0` holds the input data. QPU `Q_k` (`1 ≤ k ≤ t`) prepares the
//! resource state of block `k`. Link `i` joins `Q_i` and `Q_{(i+1) mod T}`, so
//! injection `k` consumes pairs from link `k - 1` and the final teleport back
//! to `Q_0` uses link `t`.
//!
//! Timing conventions:
//! - a pair deposited at the end of layer `L` is usable from layer `L + 1`,
//!   so a fresh generator with period `τ_e` delivers its first pair for
//!   layer `τ_e`;
//! - `τ_e = 0` keeps every link topped up at the start of each layer;
//! - a full store discards the new pair and the generator restarts;
//! - data qubits claim pairs in ascending index order;
//! - a transfer ends four layers after its last remote CX.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clinr::RSI_DEPTH;
use crate::error::{Error, Result};

pub const DEFAULT_LAYER_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchConfig {
    pub num_qpus: usize,
    pub compute_qubits: usize,
    pub storage_qubits: usize,
    pub tau_e: u32,
    pub links_per_connection: usize,
    /// Pairs stored on every link at layer 0.
    pub initial_inventory: usize,
}

impl ArchConfig {
    /// Minimal architecture for `t` blocks on `n` qubits: `t + 1` QPUs with
    /// `2n + 1` compute and `2n` storage qubits each, one generator per link.
    pub fn for_clinr(n: usize, t: usize, tau_e: u32) -> Self {
        Self {
            num_qpus: t + 1,
            compute_qubits: 2 * n + 1,
            storage_qubits: 2 * n,
            tau_e,
            links_per_connection: 1,
            initial_inventory: 0,
        }
    }

    pub fn with_links(mut self, links: usize) -> Self {
        self.links_per_connection = links;
        self
    }

    /// Pairs one side of a link can hold.
    pub fn link_capacity(&self) -> usize {
        self.storage_qubits / 2
    }

    pub fn validate(&self, n: usize, t: usize) -> Result<()> {
        if t == 0 {
            return Err(Error::Architecture("no blocks to inject".into()));
        }
        if self.num_qpus != t + 1 {
            return Err(Error::Architecture(format!(
                "{} QPUs for {t} blocks, need {}",
                self.num_qpus,
                t + 1
            )));
        }
        if self.compute_qubits < 2 * n + 1 {
            return Err(Error::Architecture(format!(
                "{} compute qubits per QPU, need {}",
                self.compute_qubits,
                2 * n + 1
            )));
        }
        if self.link_capacity() < n {
            return Err(Error::Architecture(format!(
                "{} storage qubits per QPU, need {}",
                self.storage_qubits,
                2 * n
            )));
        }
        if self.links_per_connection == 0 {
            return Err(Error::Architecture("zero generators per link".into()));
        }
        if self.initial_inventory > self.link_capacity() {
            return Err(Error::Architecture("initial inventory exceeds storage".into()));
        }
        Ok(())
    }
}

/// Bell-pair inventory and generators of one link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub endpoints: (usize, usize),
    pub available: usize,
    pub capacity: usize,
    /// Layers left until each generator deposits.
    pub timers: Vec<u32>,
    pub generated: u64,
    pub consumed: u64,
    pub discarded: u64,
}

impl Link {
    fn new(endpoints: (usize, usize), cfg: &ArchConfig) -> Self {
        Self {
            endpoints,
            available: cfg.initial_inventory,
            capacity: cfg.link_capacity(),
            timers: vec![cfg.tau_e; cfg.links_per_connection],
            generated: cfg.initial_inventory as u64,
            consumed: 0,
            discarded: 0,
        }
    }

    fn deposit(&mut self, pairs: u64) {
        self.generated += pairs;
        let room = (self.capacity - self.available) as u64;
        let kept = pairs.min(room);
        self.available += kept as usize;
        self.discarded += pairs - kept;
    }

    fn top_up(&mut self) {
        let missing = self.capacity - self.available;
        self.deposit(missing as u64);
    }

    /// End-of-layer bookkeeping for `layers` consecutive layers with no
    /// consumption in between.
    fn advance(&mut self, layers: u64, tau_e: u32) {
        if tau_e == 0 || layers == 0 {
            return;
        }
        let tau = tau_e as u64;
        let mut pairs = 0;
        for timer in &mut self.timers {
            let v = *timer as u64;
            if layers >= v {
                pairs += 1 + (layers - v) / tau;
                *timer = (tau - (layers - v) % tau) as u32;
            } else {
                *timer = (v - layers) as u32;
            }
        }
        self.deposit(pairs);
    }

    fn try_consume(&mut self) -> bool {
        if self.available == 0 {
            return false;
        }
        self.available -= 1;
        self.consumed += 1;
        true
    }

    /// Layers until the next pair becomes usable, counted from the current
    /// layer.
    fn next_arrival(&self) -> u64 {
        self.timers.iter().copied().min().unwrap_or(0) as u64
    }

    pub fn is_conserved(&self) -> bool {
        self.generated == self.consumed + self.available as u64 + self.discarded
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QpuPhase {
    /// `Q_0` while it holds the input.
    DataHolder,
    RspvRunning,
    RspvDone,
    Injecting,
    /// Resource consumed; the QPU now holds (or has handed on) the data.
    Consumed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransferKind {
    /// Injection of block `k` into the data, moving it from `Q_{k-1}` to `Q_k`.
    Injection(usize),
    /// Final teleport from `Q_t` to `Q_0`.
    Teleport,
}

impl fmt::Display for TransferKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransferKind::Injection(k) => write!(f, "inject{k}"),
            TransferKind::Teleport => write!(f, "teleport"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub kind: TransferKind,
    pub link: usize,
    pub start: u64,
    /// First layer after the transfer.
    pub end: u64,
    /// Layer of the remote CX (or teleport) of each data qubit.
    pub cx_layers: Vec<u64>,
    /// Layers in which some qubit was still waiting for a pair.
    pub stall_layers: u64,
    pub pairs_at_start: usize,
}

impl TransferRecord {
    pub fn depth(&self) -> u64 {
        self.end - self.start
    }
}

#[derive(Clone, Debug)]
struct ActiveTransfer {
    kind: TransferKind,
    link: usize,
    start: u64,
    cx_layers: Vec<u64>,
    waiting: VecDeque<usize>,
    stall_layers: u64,
    pairs_at_start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkSnapshot {
    pub available: usize,
    pub generated: u64,
    pub consumed: u64,
    pub discarded: u64,
}

/// One line of the per-layer trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub layer: u64,
    pub links: Vec<LinkSnapshot>,
    pub phases: Vec<QpuPhase>,
    pub active: Option<String>,
    pub stalled: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timeline {
    /// Injections `1..=t` followed by the teleport.
    pub transfers: Vec<TransferRecord>,
    /// RSP&V completion layer of every block.
    pub ready_at: Vec<u64>,
    pub total_depth: u64,
    pub links: Vec<Link>,
    pub trace: Option<Vec<LayerRecord>>,
}

impl Timeline {
    pub fn injections(&self) -> &[TransferRecord] {
        &self.transfers[..self.transfers.len() - 1]
    }

    pub fn teleport(&self) -> &TransferRecord {
        self.transfers.last().expect("timeline always ends with a teleport")
    }

    pub fn pairs_consumed(&self) -> u64 {
        self.links.iter().map(|l| l.consumed).sum()
    }

    pub fn stall_layers(&self) -> u64 {
        self.transfers.iter().map(|t| t.stall_layers).sum()
    }

    /// Writes the trace as one JSON object per line.
    pub fn write_trace<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for rec in self.trace.iter().flatten() {
            serde_json::to_writer(&mut w, rec).map_err(|e| Error::Io(e.into()))?;
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Outcome of asking a link for a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemoteOutcome {
    Executed,
    Stalled,
}

/// Scheduler state of the distributed run.
#[derive(Clone, Debug)]
pub struct World {
    cfg: ArchConfig,
    n: usize,
    t: usize,
    layer: u64,
    links: Vec<Link>,
    ready_at: Vec<u64>,
    phases: Vec<QpuPhase>,
    next_transfer: usize,
    active: Option<ActiveTransfer>,
    finished: Vec<TransferRecord>,
    trace: Option<Vec<LayerRecord>>,
    layer_cap: u64,
}

impl World {
    /// `ready_at[k - 1]` is the first layer at which block `k` is verified.
    pub fn new(cfg: ArchConfig, n: usize, ready_at: Vec<u64>) -> Result<Self> {
        let t = ready_at.len();
        cfg.validate(n, t)?;
        let num = cfg.num_qpus;
        let links = (0..num).map(|i| Link::new((i, (i + 1) % num), &cfg)).collect();
        let mut phases = vec![QpuPhase::RspvRunning; num];
        phases[0] = QpuPhase::DataHolder;
        Ok(Self {
            cfg,
            n,
            t,
            layer: 0,
            links,
            ready_at,
            phases,
            next_transfer: 0,
            active: None,
            finished: Vec::new(),
            trace: None,
            layer_cap: DEFAULT_LAYER_CAP,
        })
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn with_layer_cap(mut self, cap: u64) -> Self {
        self.layer_cap = cap;
        self
    }

    pub fn layer(&self) -> u64 {
        self.layer
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn phases(&self) -> &[QpuPhase] {
        &self.phases
    }

    pub fn is_done(&self) -> bool {
        self.next_transfer > self.t && self.active.is_none()
    }

    fn link_between(&self, a: usize, b: usize) -> Result<usize> {
        let num = self.cfg.num_qpus;
        if a >= num || b >= num {
            return Err(Error::Architecture(format!("no QPU pair ({a}, {b})")));
        }
        if (a + 1) % num == b {
            Ok(a)
        } else if (b + 1) % num == a {
            Ok(b)
        } else {
            Err(Error::Architecture(format!("QPUs {a} and {b} are not adjacent")))
        }
    }

    /// Claims a Bell pair between adjacent QPUs for one remote CX.
    pub fn execute_remote_cx(&mut self, a: usize, b: usize) -> Result<RemoteOutcome> {
        let link = self.link_between(a, b)?;
        Ok(if self.links[link].try_consume() {
            RemoteOutcome::Executed
        } else {
            RemoteOutcome::Stalled
        })
    }

    /// Block `k` may be injected once its RSP&V is done and injection `k-1`
    /// has completed.
    pub fn ready_for_injection(&self, k: usize) -> bool {
        if k == 0 || k > self.t || self.phases[k] != QpuPhase::RspvDone {
            return false;
        }
        self.active.is_none() && self.next_transfer == k - 1
    }

    fn begin(&mut self, kind: TransferKind, link: usize) {
        self.active = Some(ActiveTransfer {
            kind,
            link,
            start: self.layer,
            cx_layers: vec![0; self.n],
            waiting: (0..self.n).collect(),
            stall_layers: 0,
            pairs_at_start: self.links[link].available,
        });
    }

    pub fn inject_block(&mut self, k: usize) -> Result<()> {
        if !self.ready_for_injection(k) {
            return Err(Error::Architecture(format!(
                "block {k} is not ready for injection at layer {}",
                self.layer
            )));
        }
        self.phases[k] = QpuPhase::Injecting;
        let link = self.link_between(k - 1, k)?;
        self.begin(TransferKind::Injection(k), link);
        Ok(())
    }

    pub fn teleport_output(&mut self) -> Result<()> {
        if self.active.is_some() || self.next_transfer != self.t {
            return Err(Error::Architecture("injections are not complete".into()));
        }
        let link = self.link_between(self.t, 0)?;
        self.begin(TransferKind::Teleport, link);
        Ok(())
    }

    /// Runs one layer: refill, phase updates, transfer completion and start,
    /// pair claims, trace, then generator ticks.
    pub fn advance_layer(&mut self) -> Result<()> {
        self.begin_layer()?;
        if self.is_done() {
            return Ok(());
        }
        let stalled = self.service();
        self.record(stalled);
        let tau = self.cfg.tau_e;
        for l in &mut self.links {
            l.advance(1, tau);
        }
        self.layer += 1;
        Ok(())
    }

    fn begin_layer(&mut self) -> Result<()> {
        if self.layer > self.layer_cap {
            return Err(Error::LayerCapExceeded { cap: self.layer_cap });
        }
        if self.cfg.tau_e == 0 {
            self.links.iter_mut().for_each(Link::top_up);
        }
        for k in 1..=self.t {
            if self.phases[k] == QpuPhase::RspvRunning && self.ready_at[k - 1] <= self.layer {
                self.phases[k] = QpuPhase::RspvDone;
            }
        }
        if let Some(a) = &self.active {
            if a.waiting.is_empty() {
                let last = a.cx_layers.iter().copied().max().unwrap_or(a.start);
                if last + RSI_DEPTH <= self.layer {
                    self.finish(last + RSI_DEPTH);
                }
            }
        }
        if self.active.is_none() {
            if self.next_transfer < self.t {
                let k = self.next_transfer + 1;
                if self.ready_for_injection(k) {
                    self.inject_block(k)?;
                }
            } else if self.next_transfer == self.t {
                self.teleport_output()?;
            }
        }
        Ok(())
    }

    fn finish(&mut self, end: u64) {
        let a = self.active.take().expect("finish needs an active transfer");
        if let TransferKind::Injection(k) = a.kind {
            self.phases[k] = QpuPhase::Consumed;
            self.phases[k - 1] = QpuPhase::Consumed;
        } else {
            self.phases[0] = QpuPhase::DataHolder;
        }
        self.finished.push(TransferRecord {
            kind: a.kind,
            link: a.link,
            start: a.start,
            end,
            cx_layers: a.cx_layers,
            stall_layers: a.stall_layers,
            pairs_at_start: a.pairs_at_start,
        });
        self.next_transfer += 1;
    }

    /// Hands out pairs to waiting qubits; returns whether some still wait.
    fn service(&mut self) -> bool {
        let layer = self.layer;
        let Some(a) = self.active.as_mut() else {
            return false;
        };
        while let Some(&q) = a.waiting.front() {
            if !self.links[a.link].try_consume() {
                break;
            }
            a.cx_layers[q] = layer;
            a.waiting.pop_front();
        }
        if a.waiting.is_empty() {
            false
        } else {
            a.stall_layers += 1;
            true
        }
    }

    fn record(&mut self, stalled: bool) {
        let Some(trace) = self.trace.as_mut() else {
            return;
        };
        trace.push(LayerRecord {
            layer: self.layer,
            links: self
                .links
                .iter()
                .map(|l| LinkSnapshot {
                    available: l.available,
                    generated: l.generated,
                    consumed: l.consumed,
                    discarded: l.discarded,
                })
                .collect(),
            phases: self.phases.clone(),
            active: self.active.as_ref().map(|a| a.kind.to_string()),
            stalled,
        });
    }

    /// First layer after the current one at which something can change.
    fn next_event(&self) -> u64 {
        let after = self.layer + 1;
        match &self.active {
            Some(a) if !a.waiting.is_empty() => {
                if self.cfg.tau_e == 0 {
                    after
                } else {
                    self.layer + self.links[a.link].next_arrival().max(1)
                }
            }
            Some(a) => {
                let last = a.cx_layers.iter().copied().max().unwrap_or(a.start);
                (last + RSI_DEPTH).max(after)
            }
            None if self.next_transfer < self.t => self.ready_at[self.next_transfer].max(after),
            None => after,
        }
    }

    /// Runs to completion. Without a trace, idle stretches are skipped in
    /// one step.
    pub fn run(mut self) -> Result<Timeline> {
        while !self.is_done() {
            if self.trace.is_some() || self.cfg.tau_e == 0 {
                self.advance_layer()?;
                continue;
            }
            self.begin_layer()?;
            if self.is_done() {
                break;
            }
            let stalled = self.service();
            let next = self.next_event().min(self.layer_cap + 1);
            let skipped = next - self.layer;
            if stalled {
                if let Some(a) = self.active.as_mut() {
                    a.stall_layers += skipped - 1;
                }
            }
            let tau = self.cfg.tau_e;
            for l in &mut self.links {
                l.advance(skipped, tau);
            }
            self.layer = next;
        }
        let total_depth = self.finished.last().map(|r| r.end).unwrap_or(0);
        Ok(Timeline {
            transfers: self.finished,
            ready_at: self.ready_at,
            total_depth,
            links: self.links,
            trace: self.trace,
        })
    }
}
