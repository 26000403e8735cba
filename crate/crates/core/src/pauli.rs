//! Packed Pauli strings with sign tracking.
//!
//! A [`PauliString`] on `n` qubits is stored as two packed bit vectors (`x`
//! and `z`) plus a phase exponent `k` so that the operator is
//! `i^k ⊗_j σ(x_j, z_j)` with `σ(1, 0) = X`, `σ(0, 1) = Z` and `σ(1, 1) = Y`.
//! Hermitian strings have an even exponent; odd exponents only appear as
//! intermediate products of anticommuting strings and are never reported
//! through [`PauliString::sign`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::Error;

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `(x, z)` symplectic bits.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Uniform non-identity Pauli.
    pub fn random_non_identity<R: Rng + ?Sized>(rng: &mut R) -> Self {
        match rng.random_range(0..3u8) {
            0 => Pauli::X,
            1 => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

/// Overall sign of a Hermitian Pauli string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }

    pub fn from_negative(negative: bool) -> Self {
        if negative {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        let w = words_for(num_qubits);
        Self {
            num_qubits,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// `+P` acting on a single qubit.
    pub fn single(num_qubits: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut p = Self::identity(num_qubits);
        p.set(qubit, pauli);
        p
    }

    /// Builds `+⊗ pauli_j` from `(qubit, factor)` pairs.
    pub fn from_sparse(num_qubits: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut p = Self::identity(num_qubits);
        for &(q, f) in factors {
            p.set(q, f);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    /// Overwrites the factor on `q`. The sign is left unchanged.
    pub fn set(&mut self, q: usize, pauli: Pauli) {
        assert!(q < self.num_qubits, "qubit {q} out of range");
        let (x, z) = pauli.bits();
        let (w, b) = (q / WORD, q % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    #[inline]
    pub(crate) fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / WORD, q % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    /// Sign of a Hermitian string. Panics on the anti-Hermitian intermediate
    /// products that never escape this module's callers.
    pub fn sign(&self) -> Sign {
        match self.phase {
            0 => Sign::Plus,
            2 => Sign::Minus,
            k => panic!("non-Hermitian Pauli string (phase i^{k})"),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn set_sign(&mut self, sign: Sign) {
        self.phase = if sign.is_negative() { 2 } else { 0 };
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) & 3;
    }

    pub fn negated(mut self) -> Self {
        self.negate();
        self
    }

    #[inline]
    pub(crate) fn flip_sign_if(&mut self, cond: bool) {
        self.phase ^= (cond as u8) << 1;
    }

    pub(crate) fn phase(&self) -> u8 {
        self.phase
    }

    /// Trivial masks and `+1` sign.
    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.has_trivial_masks()
    }

    pub fn has_trivial_masks(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (w, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = x | z;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                out.push(w * WORD + b);
                m &= m - 1;
            }
        }
        out
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc += ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        acc.is_multiple_of(2)
    }

    /// In-place right multiplication `self ← self · rhs`, phases included.
    pub fn mul_assign_right(&mut self, rhs: &PauliString) {
        assert_eq!(self.num_qubits, rhs.num_qubits, "register size mismatch");
        let mut plus = 0u32;
        let mut minus = 0u32;
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], rhs.x[i], rhs.z[i]);
            let y1 = x1 & z1;
            let xo = x1 & !z1;
            let zo = !x1 & z1;
            let p = (y1 & z2 & !x2) | (xo & z2 & x2) | (zo & x2 & !z2);
            let m = (y1 & x2 & !z2) | (xo & z2 & !x2) | (zo & x2 & z2);
            plus += p.count_ones();
            minus += m.count_ones();
            self.x[i] = x1 ^ x2;
            self.z[i] = z1 ^ z2;
        }
        let delta = (plus as i64 - minus as i64).rem_euclid(4) as u8;
        self.phase = (self.phase + rhs.phase + delta) & 3;
    }

    pub fn mul(&self, rhs: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.mul_assign_right(rhs);
        out
    }

    /// Embeds this string into a larger register, qubit `j` going to
    /// `targets[j]`.
    pub fn embed(&self, num_qubits: usize, targets: &[usize]) -> PauliString {
        assert_eq!(targets.len(), self.num_qubits);
        let mut out = PauliString::identity(num_qubits);
        for (j, &q) in targets.iter().enumerate() {
            out.set_bits(q, self.x_bit(j), self.z_bit(j));
        }
        out.phase = self.phase;
        out
    }

    /// Restricts to `qubits`, renumbered `0..qubits.len()`. Sign is kept.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (j, &q) in qubits.iter().enumerate() {
            out.set_bits(j, self.x_bit(q), self.z_bit(q));
        }
        out.phase = self.phase;
        out
    }

    // Clifford conjugation rules, P ← g P g†.

    pub(crate) fn conj_h(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        self.flip_sign_if(x && z);
        self.set_bits(q, z, x);
    }

    pub(crate) fn conj_s(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        self.flip_sign_if(x && z);
        self.set_bits(q, x, z ^ x);
    }

    pub(crate) fn conj_sdg(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        self.flip_sign_if(x && !z);
        self.set_bits(q, x, z ^ x);
    }

    pub(crate) fn conj_x(&mut self, q: usize) {
        let z = self.z_bit(q);
        self.flip_sign_if(z);
    }

    pub(crate) fn conj_y(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        self.flip_sign_if(x ^ z);
    }

    pub(crate) fn conj_z(&mut self, q: usize) {
        let x = self.x_bit(q);
        self.flip_sign_if(x);
    }

    pub(crate) fn conj_cx(&mut self, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (self.x_bit(c), self.z_bit(c), self.x_bit(t), self.z_bit(t));
        self.flip_sign_if(xc && zt && !(xt ^ zc));
        self.set_bits(t, xt ^ xc, zt);
        self.set_bits(c, xc, zc ^ zt);
    }

    pub(crate) fn conj_cz(&mut self, a: usize, b: usize) {
        let (xa, za, xb, zb) = (self.x_bit(a), self.z_bit(a), self.x_bit(b), self.z_bit(b));
        self.flip_sign_if(xa && xb && (za ^ zb));
        self.set_bits(a, xa, za ^ xb);
        self.set_bits(b, xb, zb ^ xa);
    }

    pub(crate) fn conj_cy(&mut self, c: usize, t: usize) {
        // CY = S_t · CX · S_t†
        self.conj_sdg(t);
        self.conj_cx(c, t);
        self.conj_s(t);
    }

    /// Uniform random string (masks only, `+` sign). Test and sampling helper.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        let mut p = Self::identity(num_qubits);
        for q in 0..num_qubits {
            p.set_bits(q, rng.random(), rng.random());
        }
        p
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.num_qubits {
            let c = match self.get(q) {
                Pauli::I => '_',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `[+|-]` followed by one of `I _ X Y Z` per qubit.
impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first() {
            Some(b'+') => (false, &s[1..]),
            Some(b'-') => (true, &s[1..]),
            _ => (false, s),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("empty Pauli string {s:?}")));
        }
        let mut p = PauliString::identity(body.chars().count());
        for (q, c) in body.chars().enumerate() {
            let f = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Parse(format!("bad Pauli factor {other:?} in {s:?}"))),
            };
            p.set(q, f);
        }
        if neg {
            p.negate();
        }
        Ok(p)
    }
}
