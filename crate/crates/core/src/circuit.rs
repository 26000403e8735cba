//! Clifford circuit IR, ASAP layering, random circuit generation and
//! equal-depth splitting.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Where an operation executes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Location {
    #[default]
    Monolithic,
    Qpu(usize),
    /// Remote operation between two distinct QPUs.
    Between(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    PrepZ,
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    CX,
    CY,
    CZ,
    MeasZ,
    /// Direct measurement of a Pauli observable on the register.
    MeasPauli(PauliString),
    RemoteCX,
    TeleportQubit,
}

impl GateKind {
    /// Number of explicit qubit operands. `MeasPauli` takes its support from
    /// the observable.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::CX | GateKind::CY | GateKind::CZ | GateKind::RemoteCX | GateKind::TeleportQubit => 2,
            GateKind::MeasPauli(_) => 0,
            _ => 1,
        }
    }

    pub fn is_unitary_clifford(&self) -> bool {
        matches!(
            self,
            GateKind::H
                | GateKind::S
                | GateKind::Sdg
                | GateKind::X
                | GateKind::Y
                | GateKind::Z
                | GateKind::CX
                | GateKind::CY
                | GateKind::CZ
        )
    }

    pub fn is_remote(&self) -> bool {
        matches!(self, GateKind::RemoteCX | GateKind::TeleportQubit)
    }

    fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::PrepZ => "PREPZ",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::CX => "CX",
            GateKind::CY => "CY",
            GateKind::CZ => "CZ",
            GateKind::MeasZ => "MEASZ",
            GateKind::MeasPauli(_) => "MEASPAULI",
            GateKind::RemoteCX => "REMOTECX",
            GateKind::TeleportQubit => "TELEPORT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GateOp {
    pub kind: GateKind,
    qubits: [usize; 2],
    pub location: Location,
}

impl GateOp {
    pub fn one(kind: GateKind, q: usize) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        Self {
            kind,
            qubits: [q, usize::MAX],
            location: Location::Monolithic,
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        debug_assert_eq!(kind.arity(), 2);
        Self {
            kind,
            qubits: [a, b],
            location: Location::Monolithic,
        }
    }

    pub fn meas_pauli(observable: PauliString) -> Self {
        Self {
            kind: GateKind::MeasPauli(observable),
            qubits: [usize::MAX; 2],
            location: Location::Monolithic,
        }
    }

    pub fn at(mut self, location: Location) -> Self {
        self.location = location;
        self
    }

    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q)
    }
    pub fn s(q: usize) -> Self {
        Self::one(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Self::one(GateKind::Sdg, q)
    }
    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::one(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::one(GateKind::Z, q)
    }
    pub fn prep_z(q: usize) -> Self {
        Self::one(GateKind::PrepZ, q)
    }
    pub fn meas_z(q: usize) -> Self {
        Self::one(GateKind::MeasZ, q)
    }
    pub fn cx(c: usize, t: usize) -> Self {
        Self::two(GateKind::CX, c, t)
    }
    pub fn cy(c: usize, t: usize) -> Self {
        Self::two(GateKind::CY, c, t)
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::two(GateKind::CZ, a, b)
    }

    /// Explicit operands (empty for `MeasPauli`).
    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    /// Same op with every operand moved up by `offset`.
    pub fn shifted(&self, offset: usize) -> GateOp {
        let mut op = self.clone();
        for q in op.qubits.iter_mut().take(self.kind.arity()) {
            *q += offset;
        }
        op
    }

    /// Every qubit the op touches.
    pub fn support(&self) -> Vec<usize> {
        match &self.kind {
            GateKind::MeasPauli(p) => p.support(),
            _ => self.qubits().to_vec(),
        }
    }

    pub(crate) fn validate(&self, num_qubits: usize) -> Result<()> {
        if let GateKind::MeasPauli(p) = &self.kind {
            if p.num_qubits() != num_qubits {
                return Err(Error::RegisterMismatch {
                    expected: num_qubits,
                    found: p.num_qubits(),
                });
            }
            return Ok(());
        }
        for &q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
            }
        }
        if self.kind.arity() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::InvalidGate(format!("{self} acts twice on one qubit")));
        }
        if self.kind.is_remote() {
            match self.location {
                Location::Between(a, b) if a != b => {}
                _ => {
                    return Err(Error::InvalidGate(format!(
                        "{self} must name two distinct QPUs"
                    )))
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.mnemonic())?;
        if let GateKind::MeasPauli(p) = &self.kind {
            write!(f, " {p}")?;
        }
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        match self.location {
            Location::Monolithic => Ok(()),
            Location::Qpu(k) => write!(f, " @{k}"),
            Location::Between(a, b) => write!(f, " @{a}-{b}"),
        }
    }
}

impl FromStr for GateOp {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("bad gate line {line:?}"));
        let mut location = Location::Monolithic;
        if let Some(last) = toks.last() {
            if let Some(loc) = last.strip_prefix('@') {
                location = match loc.split_once('-') {
                    Some((a, b)) => Location::Between(
                        a.parse().map_err(|_| bad())?,
                        b.parse().map_err(|_| bad())?,
                    ),
                    None => Location::Qpu(loc.parse().map_err(|_| bad())?),
                };
                toks.pop();
            }
        }
        let (&head, rest) = toks.split_first().ok_or_else(bad)?;
        let kind = match head {
            "PREPZ" => GateKind::PrepZ,
            "H" => GateKind::H,
            "S" => GateKind::S,
            "SDG" => GateKind::Sdg,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "CX" => GateKind::CX,
            "CY" => GateKind::CY,
            "CZ" => GateKind::CZ,
            "MEASZ" => GateKind::MeasZ,
            "REMOTECX" => GateKind::RemoteCX,
            "TELEPORT" => GateKind::TeleportQubit,
            "MEASPAULI" => {
                let [obs] = rest else { return Err(bad()) };
                return Ok(GateOp::meas_pauli(obs.parse()?).at(location));
            }
            _ => return Err(Error::Parse(format!("unknown gate {head:?}"))),
        };
        if rest.len() != kind.arity() {
            return Err(bad());
        }
        let qs: Vec<usize> = rest
            .iter()
            .map(|t| t.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let op = if qs.len() == 1 {
            GateOp::one(kind, qs[0])
        } else {
            GateOp::two(kind, qs[0], qs[1])
        };
        Ok(op.at(location))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            ops: Vec::new(),
        }
    }

    pub fn from_ops(num_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        for op in &ops {
            op.validate(num_qubits)?;
        }
        Ok(Self { num_qubits, ops })
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    /// Gate count `s`.
    pub fn size(&self) -> usize {
        self.ops.len()
    }

    pub fn depth(&self) -> usize {
        layer(self).depth()
    }

    /// Line-oriented text form: `n=<int>` header, then one op per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\n", self.num_qubits);
        for op in &self.ops {
            s.push_str(&op.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing n=<int> header".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        let ops = lines.map(str::parse).collect::<Result<Vec<GateOp>>>()?;
        Circuit::from_ops(n, ops)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredCircuit {
    num_qubits: usize,
    layers: Vec<Vec<GateOp>>,
}

impl LayeredCircuit {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<GateOp>] {
        &self.layers
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn to_circuit(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            ops: self.layers.iter().flatten().cloned().collect(),
        }
    }
}

/// Greedy ASAP layering: every op lands one layer after the latest op
/// already placed on any of its qubits.
pub fn layer(circuit: &Circuit) -> LayeredCircuit {
    let mut frontier = vec![0usize; circuit.num_qubits];
    let mut layers: Vec<Vec<GateOp>> = Vec::new();
    for op in &circuit.ops {
        let support = op.support();
        let at = support.iter().map(|&q| frontier[q]).max().unwrap_or(0);
        for &q in &support {
            frontier[q] = at + 1;
        }
        if layers.len() <= at {
            layers.resize_with(at + 1, Vec::new);
        }
        layers[at].push(op.clone());
    }
    LayeredCircuit {
        num_qubits: circuit.num_qubits,
        layers,
    }
}

/// Gate mix for [`random_clifford_circuit`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateDistribution {
    /// Probability of drawing a single-qubit gate.
    pub single_qubit_fraction: f64,
}

impl Default for GateDistribution {
    fn default() -> Self {
        Self {
            single_qubit_fraction: 0.5,
        }
    }
}

/// `size` independent gates: {H, S} on a uniform qubit or {CX, CY, CZ} on a
/// uniform ordered pair of distinct qubits.
pub fn random_clifford_circuit<R: Rng + ?Sized>(
    n: usize,
    size: usize,
    dist: GateDistribution,
    rng: &mut R,
) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "random circuits need at least 2 qubits, got {n}"
        )));
    }
    let mut ops = Vec::with_capacity(size);
    for _ in 0..size {
        if rng.random_bool(dist.single_qubit_fraction) {
            let q = rng.random_range(0..n);
            let kind = if rng.random_bool(0.5) { GateKind::H } else { GateKind::S };
            ops.push(GateOp::one(kind, q));
        } else {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let kind = match rng.random_range(0..3u8) {
                0 => GateKind::CX,
                1 => GateKind::CY,
                _ => GateKind::CZ,
            };
            ops.push(GateOp::two(kind, a, b));
        }
    }
    Ok(Circuit { num_qubits: n, ops })
}

/// Cuts the ASAP layering into `t` contiguous blocks whose depths differ by
/// at most one; the earliest blocks take the extra layers.
pub fn split_equal_depth(circuit: &Circuit, t: usize) -> Result<Vec<Circuit>> {
    let layered = layer(circuit);
    let depth = layered.depth();
    if t == 0 || t > depth {
        return Err(Error::InvalidArgument(format!(
            "cannot split a depth-{depth} circuit into {t} blocks"
        )));
    }
    let (base, extra) = (depth / t, depth % t);
    let mut blocks = Vec::with_capacity(t);
    let mut cursor = 0;
    for i in 0..t {
        let len = base + usize::from(i < extra);
        let ops = layered.layers[cursor..cursor + len]
            .iter()
            .flatten()
            .cloned()
            .collect();
        blocks.push(Circuit {
            num_qubits: circuit.num_qubits,
            ops,
        });
        cursor += len;
    }
    Ok(blocks)
}

/// Concatenation. `num_qubits` sizes the empty composition.
pub fn compose(blocks: &[Circuit], num_qubits: usize) -> Result<Circuit> {
    let mut out = Circuit::new(num_qubits);
    for b in blocks {
        if b.num_qubits != num_qubits {
            return Err(Error::RegisterMismatch {
                expected: num_qubits,
                found: b.num_qubits,
            });
        }
        out.ops.extend(b.ops.iter().cloned());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circ(n: usize, ops: Vec<GateOp>) -> Circuit {
        Circuit::from_ops(n, ops).unwrap()
    }

    #[test]
    fn layering_examples() {
        assert_eq!(circ(4, vec![GateOp::cx(0, 1), GateOp::cx(2, 3)]).depth(), 1);
        assert_eq!(circ(1, vec![GateOp::h(0), GateOp::s(0), GateOp::h(0)]).depth(), 3);
        let c = circ(3, vec![GateOp::cx(0, 1), GateOp::h(2), GateOp::cx(1, 2)]);
        let l = layer(&c);
        assert_eq!(l.depth(), 2);
        assert_eq!(l.layers()[0].len(), 2);
    }

    #[test]
    fn random_circuit_size_and_determinism() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let c1 = random_clifford_circuit(5, 25, GateDistribution::default(), &mut a).unwrap();
        let c2 = random_clifford_circuit(5, 25, GateDistribution::default(), &mut b).unwrap();
        assert_eq!(c1.size(), 25);
        assert_eq!(c1.num_qubits(), 5);
        assert_eq!(c1, c2);
        assert!(random_clifford_circuit(1, 3, GateDistribution::default(), &mut a).is_err());
    }

    #[test]
    fn single_qubit_fraction_is_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = random_clifford_circuit(6, 10_000, GateDistribution::default(), &mut rng).unwrap();
        let singles = c.ops().iter().filter(|g| g.kind.arity() == 1).count() as f64;
        let sigma = (10_000.0f64 * 0.25).sqrt();
        assert!((singles - 5_000.0).abs() < 3.0 * sigma, "singles = {singles}");
    }

    #[test]
    fn split_depths() {
        let chain = |d: usize| circ(1, (0..d).map(|_| GateOp::h(0)).collect());
        let d = |v: Vec<Circuit>| v.iter().map(Circuit::depth).collect::<Vec<_>>();
        assert_eq!(d(split_equal_depth(&chain(9), 3).unwrap()), vec![3, 3, 3]);
        assert_eq!(d(split_equal_depth(&chain(10), 3).unwrap()), vec![4, 3, 3]);
        assert_eq!(split_equal_depth(&chain(5), 1).unwrap(), vec![chain(5)]);
        assert!(split_equal_depth(&chain(2), 3).is_err());
    }

    #[test]
    fn compose_edge_cases() {
        let c = circ(2, vec![GateOp::cx(0, 1), GateOp::h(1)]);
        assert_eq!(compose(std::slice::from_ref(&c), 2).unwrap(), c);
        assert_eq!(compose(&[], 3).unwrap().size(), 0);
        assert!(compose(&[c], 3).is_err());
    }

    #[test]
    fn validation_errors() {
        assert!(Circuit::from_ops(2, vec![GateOp::h(2)]).is_err());
        assert!(Circuit::from_ops(2, vec![GateOp::cx(1, 1)]).is_err());
        assert!(Circuit::from_ops(2, vec![GateOp::two(GateKind::RemoteCX, 0, 1)]).is_err());
        assert!(Circuit::from_ops(
            2,
            vec![GateOp::two(GateKind::RemoteCX, 0, 1).at(Location::Between(0, 1))]
        )
        .is_ok());
    }

    #[test]
    fn text_format() {
        let c = circ(
            3,
            vec![
                GateOp::prep_z(0),
                GateOp::h(0),
                GateOp::cy(0, 2),
                GateOp::meas_pauli("+XZ_".parse().unwrap()),
                GateOp::two(GateKind::RemoteCX, 1, 2).at(Location::Between(0, 1)),
                GateOp::meas_z(1),
            ],
        );
        let text = c.to_text();
        assert!(text.starts_with("n=3\nPREPZ 0\nH 0\nCY 0 2\n"));
        assert_eq!(Circuit::from_text(&text).unwrap(), c);
        assert!(Circuit::from_text("CX 0 1").is_err());
        assert!(Circuit::from_text("n=2\nFOO 1").is_err());
    }
}
