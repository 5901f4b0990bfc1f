//! Dense state-vector algebra over small registers of labelled qubits.
//!
//! A [`PureState`] is a complex amplitude vector of length 2^n over a
//! [`Register`] of distinct [`QubitId`]s. The register fixes the bit layout:
//! the qubit at position `k` owns bit `n - 1 - k` of a basis index, so the
//! leftmost qubit in ket notation is the most significant bit. Photon
//! polarization is encoded as L = 0, R = 1, which makes the quarter-wave
//! plate act as the Hadamard matrix.
//!
//! All operations are pure functions: they take states by reference and
//! return fresh ones, so values can be shared freely across threads.

use num_complex::Complex64;
use rand::Rng;
use std::fmt;

use crate::error::{Error, Result};

/// Largest register size supported by the dense representation.
pub const MAX_QUBITS: usize = 18;

/// Tolerance on the squared norm of states flagged as normalized.
pub const NORM_TOL: f64 = 1e-10;

/// Branch probabilities below this are treated as exactly zero when a
/// measurement outcome is forced.
const ZERO_BRANCH_TOL: f64 = 1e-20;

/// What a qubit physically is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitKind {
    PhotonPolarization,
    Atom,
}

/// Which side of the protocol holds the qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Alice,
    Bob,
}

/// A label for one qubit: what it is, who holds it, and its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId {
    pub kind: QubitKind,
    pub party: Party,
    pub index: u32,
}

impl QubitId {
    /// Photon `index`. Photons are generated at Bob's side but collected and
    /// measured by Alice, so they are labelled as hers.
    pub fn photon(index: u32) -> Self {
        QubitId { kind: QubitKind::PhotonPolarization, party: Party::Alice, index }
    }

    pub fn alice_atom(index: u32) -> Self {
        QubitId { kind: QubitKind::Atom, party: Party::Alice, index }
    }

    pub fn bob_atom(index: u32) -> Self {
        QubitId { kind: QubitKind::Atom, party: Party::Bob, index }
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let party = match self.party {
            Party::Alice => "alice",
            Party::Bob => "bob",
        };
        let kind = match self.kind {
            QubitKind::PhotonPolarization => "photon",
            QubitKind::Atom => "atom",
        };
        write!(f, "{party}.{kind}{}", self.index)
    }
}

/// An ordered list of distinct qubits fixing the basis-index bit layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    qubits: Vec<QubitId>,
}

impl Register {
    pub fn new(qubits: Vec<QubitId>) -> Result<Self> {
        if qubits.len() > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(qubits.len()));
        }
        for (k, q) in qubits.iter().enumerate() {
            if qubits[..k].contains(q) {
                return Err(Error::DuplicateQubit(*q));
            }
        }
        Ok(Register { qubits })
    }

    pub fn single(q: QubitId) -> Self {
        Register { qubits: vec![q] }
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn position(&self, q: QubitId) -> Result<usize> {
        self.qubits.iter().position(|&x| x == q).ok_or(Error::UnknownQubit(q))
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits.len()
    }

    /// Bit of `index` owned by the qubit at `pos` (leftmost qubit is the
    /// most significant bit).
    pub fn bit(&self, index: usize, pos: usize) -> usize {
        (index >> (self.qubits.len() - 1 - pos)) & 1
    }

    /// Concatenation of several registers, failing on shared qubits.
    pub fn concat(parts: &[&Register]) -> Result<Self> {
        let mut qubits = Vec::new();
        for part in parts {
            qubits.extend_from_slice(&part.qubits);
        }
        Register::new(qubits)
    }
}

/// A pure quantum state: a register plus 2^n complex amplitudes.
///
/// The `normalized` flag is maintained by the operations: unitary gates and
/// unit-modulus phase gates preserve it, sub-unitary (absorbing) gates clear
/// it, and [`PureState::renormalized`] restores it.
#[derive(Debug, Clone)]
pub struct PureState {
    register: Register,
    amps: Vec<Complex64>,
    normalized: bool,
}

impl PureState {
    /// Build a state from raw amplitudes. The normalized flag is set when
    /// the squared norm is 1 within [`NORM_TOL`].
    pub fn from_amplitudes(register: Register, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != register.dim() {
            return Err(Error::BadAmplitudeCount { got: amps.len(), expected: register.dim() });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let normalized = (norm_sqr - 1.0).abs() <= NORM_TOL;
        Ok(PureState { register, amps, normalized })
    }

    /// The computational basis state `|index⟩`.
    pub fn basis_state(register: Register, index: usize) -> Result<Self> {
        let dim = register.dim();
        if index >= dim {
            return Err(Error::InvalidParams(format!(
                "basis index {index} out of range for {dim} amplitudes"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { register, amps, normalized: true })
    }

    /// A single qubit `a0|0⟩ + a1|1⟩`.
    pub fn single(q: QubitId, a0: Complex64, a1: Complex64) -> Result<Self> {
        PureState::from_amplitudes(Register::single(q), vec![a0, a1])
    }

    /// A single qubit in `(|0⟩ + |1⟩)/√2`.
    pub fn plus(q: QubitId) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureState { register: Register::single(q), amps: vec![h, h], normalized: true }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Rescale to unit norm. Fails when the state has (numerically) no norm
    /// left to rescale.
    pub fn renormalized(&self) -> Result<Self> {
        let norm_sqr = self.norm_sqr();
        if norm_sqr < ZERO_BRANCH_TOL {
            return Err(Error::ZeroProbabilityBranch);
        }
        let scale = 1.0 / norm_sqr.sqrt();
        let amps = self.amps.iter().map(|a| a * scale).collect();
        Ok(PureState { register: self.register.clone(), amps, normalized: true })
    }

    /// Multiply every amplitude by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let amps: Vec<Complex64> = self.amps.iter().map(|a| a * c).collect();
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        PureState {
            register: self.register.clone(),
            amps,
            normalized: (norm_sqr - 1.0).abs() <= NORM_TOL,
        }
    }
}

/// `⟨a|b⟩` over identical registers.
pub fn inner(a: &PureState, b: &PureState) -> Result<Complex64> {
    if a.register != b.register {
        return Err(Error::RegisterMismatch);
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `|⟨a|b⟩|²` for normalized states over identical registers. Equals 1 iff
/// the states agree up to a global phase.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    if !a.normalized {
        return Err(Error::NotNormalized(a.norm_sqr()));
    }
    if !b.normalized {
        return Err(Error::NotNormalized(b.norm_sqr()));
    }
    Ok(inner(a, b)?.norm_sqr())
}

/// Largest amplitude difference between two states on the same register.
pub fn amp_distance(a: &PureState, b: &PureState) -> Result<f64> {
    if a.register != b.register {
        return Err(Error::RegisterMismatch);
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

/// Tensor product of states over pairwise disjoint registers, in the order
/// given. The joint register is the concatenation, so earlier factors own
/// the more significant bits.
pub fn tensor(states: &[PureState]) -> Result<PureState> {
    let registers: Vec<&Register> = states.iter().map(|s| s.register()).collect();
    let register = Register::concat(&registers)?;
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for s in states {
        let mut next = Vec::with_capacity(amps.len() * s.dim());
        for a in &amps {
            for b in &s.amps {
                next.push(a * b);
            }
        }
        amps = next;
    }
    let normalized = states.iter().all(|s| s.normalized);
    Ok(PureState { register, amps, normalized })
}

/// How a 2×2 matrix is allowed to act on norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Unitary,
    /// Sub-unitary (absorbing) action: never amplifies any input.
    SubUnitary,
}

/// A 2×2 complex matrix acting on one qubit, in the `{|0⟩, |1⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate {
    m: [[Complex64; 2]; 2],
    kind: GateKind,
}

impl SingleQubitGate {
    /// A gate validated to satisfy U†U = I within 1e-10.
    pub fn unitary(m: [[Complex64; 2]; 2]) -> Result<Self> {
        check_finite(&m)?;
        let g = SingleQubitGate { m, kind: GateKind::Unitary };
        if !g.is_unitary_within(1e-10) {
            return Err(Error::NotUnitary);
        }
        Ok(g)
    }

    /// A gate validated to have spectral norm at most 1 + 1e-10.
    pub fn sub_unitary(m: [[Complex64; 2]; 2]) -> Result<Self> {
        check_finite(&m)?;
        let g = SingleQubitGate { m, kind: GateKind::SubUnitary };
        let s = g.spectral_norm();
        if s > 1.0 + 1e-10 {
            return Err(Error::NotContractive(s));
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        SingleQubitGate { m: [[o, z], [z, o]], kind: GateKind::Unitary }
    }

    /// Hadamard: `|0⟩ → (|0⟩+|1⟩)/√2`, `|1⟩ → (|0⟩−|1⟩)/√2`.
    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        SingleQubitGate { m: [[h, h], [h, -h]], kind: GateKind::Unitary }
    }

    /// Quarter-wave plate on a polarization qubit: `|L⟩ → (|L⟩+|R⟩)/√2`,
    /// `|R⟩ → (|L⟩−|R⟩)/√2`. With L = 0, R = 1 this is the Hadamard matrix.
    pub fn quarter_wave_plate() -> Self {
        Self::hadamard()
    }

    pub fn pauli(letter: PauliLetter) -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let m = match letter {
            PauliLetter::I => [[o, z], [z, o]],
            PauliLetter::X => [[z, o], [o, z]],
            PauliLetter::Y => [[z, -i], [i, z]],
            PauliLetter::Z => [[o, z], [z, -o]],
        };
        SingleQubitGate { m, kind: GateKind::Unitary }
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn is_unitary_within(&self, tol: f64) -> bool {
        let m = &self.m;
        // Entries of U†U.
        let d00 = m[0][0].conj() * m[0][0] + m[1][0].conj() * m[1][0];
        let d01 = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        let d11 = m[0][1].conj() * m[0][1] + m[1][1].conj() * m[1][1];
        (d00 - 1.0).norm() <= tol && d01.norm() <= tol && (d11 - 1.0).norm() <= tol
    }

    /// Largest singular value, from the eigenvalues of U†U.
    pub fn spectral_norm(&self) -> f64 {
        let m = &self.m;
        let a = m[0][0].norm_sqr() + m[1][0].norm_sqr();
        let b = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        let d = m[0][1].norm_sqr() + m[1][1].norm_sqr();
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        (mean + disc).max(0.0).sqrt()
    }
}

fn check_finite(m: &[[Complex64; 2]; 2]) -> Result<()> {
    for row in m {
        for e in row {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::NonFinite);
            }
        }
    }
    Ok(())
}

/// Apply a single-qubit gate to `target`, leaving the rest of the register
/// untouched. Unitary gates preserve the normalized flag.
pub fn apply_gate(state: &PureState, gate: &SingleQubitGate, target: QubitId) -> Result<PureState> {
    let pos = state.register.position(target)?;
    let n = state.register.len();
    let mask = 1usize << (n - 1 - pos);
    let m = gate.matrix();
    let mut amps = state.amps.clone();
    for idx in 0..amps.len() {
        if idx & mask == 0 {
            let j = idx | mask;
            let a0 = amps[idx];
            let a1 = amps[j];
            amps[idx] = m[0][0] * a0 + m[0][1] * a1;
            amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
    let normalized = state.normalized && gate.kind == GateKind::Unitary;
    Ok(PureState { register: state.register.clone(), amps, normalized })
}

/// Multiply each basis amplitude by the phase selected by the bits of two
/// target qubits: `phases[b1 + 2*b2]` where `b1`, `b2` are the bits of `q1`
/// and `q2`. Unit-modulus phases preserve the normalized flag; sub-unit
/// entries clear it.
pub fn apply_diagonal_pair_gate(
    state: &PureState,
    phases: [Complex64; 4],
    q1: QubitId,
    q2: QubitId,
) -> Result<PureState> {
    if q1 == q2 {
        return Err(Error::CoincidentTargets);
    }
    if phases.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let p1 = state.register.position(q1)?;
    let p2 = state.register.position(q2)?;
    let n = state.register.len();
    let m1 = 1usize << (n - 1 - p1);
    let m2 = 1usize << (n - 1 - p2);
    let mut amps = state.amps.clone();
    for (idx, a) in amps.iter_mut().enumerate() {
        let b1 = usize::from(idx & m1 != 0);
        let b2 = usize::from(idx & m2 != 0);
        *a *= phases[b1 + 2 * b2];
    }
    let all_unit = phases.iter().all(|p| (p.norm() - 1.0).abs() <= 1e-12);
    let normalized = state.normalized && all_unit;
    Ok(PureState { register: state.register.clone(), amps, normalized })
}

/// Projectively measure `target` in the computational basis.
///
/// Returns the outcome bit, its pre-measurement probability, and the
/// renormalized collapsed state. When `forced` is given the corresponding
/// branch is taken (failing if its probability is zero); otherwise the
/// outcome is sampled from `rng`.
pub fn measure<R: Rng + ?Sized>(
    state: &PureState,
    target: QubitId,
    forced: Option<bool>,
    rng: &mut R,
) -> Result<(bool, f64, PureState)> {
    if !state.normalized {
        return Err(Error::NotNormalized(state.norm_sqr()));
    }
    let pos = state.register.position(target)?;
    let n = state.register.len();
    let mask = 1usize << (n - 1 - pos);
    let mut p1 = 0.0;
    let mut p0 = 0.0;
    for (idx, a) in state.amps.iter().enumerate() {
        if idx & mask != 0 {
            p1 += a.norm_sqr();
        } else {
            p0 += a.norm_sqr();
        }
    }
    let bit = match forced {
        Some(b) => b,
        None => rng.gen::<f64>() * (p0 + p1) < p1,
    };
    let prob = if bit { p1 } else { p0 };
    if prob < ZERO_BRANCH_TOL {
        return Err(Error::ZeroProbabilityBranch);
    }
    let keep = if bit { mask } else { 0 };
    let scale = 1.0 / prob.sqrt();
    let amps: Vec<Complex64> = state
        .amps
        .iter()
        .enumerate()
        .map(|(idx, a)| if idx & mask == keep { a * scale } else { Complex64::new(0.0, 0.0) })
        .collect();
    let collapsed = PureState { register: state.register.clone(), amps, normalized: true };
    Ok((bit, prob, collapsed))
}

/// Von Neumann entropy, in bits, of the reduced state on `partition`.
///
/// Computed from the singular values of the amplitude matrix with partition
/// bits as rows: the squared singular values are the reduced density-matrix
/// eigenvalues.
pub fn entanglement_entropy(state: &PureState, partition: &[QubitId]) -> Result<f64> {
    if !state.normalized {
        return Err(Error::NotNormalized(state.norm_sqr()));
    }
    let n = state.register.len();
    if partition.is_empty() || partition.len() >= n {
        return Err(Error::PartitionNotProper);
    }
    let mut positions = Vec::with_capacity(partition.len());
    for (k, q) in partition.iter().enumerate() {
        if partition[..k].contains(q) {
            return Err(Error::DuplicateQubit(*q));
        }
        positions.push(state.register.position(*q)?);
    }
    let rest: Vec<usize> = (0..n).filter(|p| !positions.contains(p)).collect();
    let rows = 1usize << positions.len();
    let cols = 1usize << rest.len();
    let mut mat = nalgebra::DMatrix::<Complex64>::zeros(rows, cols);
    for (idx, a) in state.amps.iter().enumerate() {
        let mut row = 0usize;
        for &p in &positions {
            row = (row << 1) | state.register.bit(idx, p);
        }
        let mut col = 0usize;
        for &p in &rest {
            col = (col << 1) | state.register.bit(idx, p);
        }
        mat[(row, col)] = *a;
    }
    let singular = mat.singular_values();
    let mut entropy = 0.0;
    for s in singular.iter() {
        let p = s * s;
        if p > 1e-15 {
            entropy -= p * p.log2();
        }
    }
    Ok(entropy)
}

/// One-qubit Pauli operator, ordered I < X < Y < Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] =
        [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    pub fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// A fourth root of unity, ordered +1 < +i < −1 < −i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuarterPhase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl QuarterPhase {
    pub const ALL: [QuarterPhase; 4] =
        [QuarterPhase::PlusOne, QuarterPhase::PlusI, QuarterPhase::MinusOne, QuarterPhase::MinusI];

    pub fn value(self) -> Complex64 {
        match self {
            QuarterPhase::PlusOne => Complex64::new(1.0, 0.0),
            QuarterPhase::PlusI => Complex64::new(0.0, 1.0),
            QuarterPhase::MinusOne => Complex64::new(-1.0, 0.0),
            QuarterPhase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    pub fn prefix(self) -> &'static str {
        match self {
            QuarterPhase::PlusOne => "",
            QuarterPhase::PlusI => "i",
            QuarterPhase::MinusOne => "-",
            QuarterPhase::MinusI => "-i",
        }
    }
}

/// A tensor product of Pauli letters with a global quarter phase. The derived
/// ordering is lexicographic in the letters, then in the phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<PauliLetter>,
    phase: QuarterPhase,
}

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>, phase: QuarterPhase) -> Self {
        PauliString { letters, phase }
    }

    pub fn identity(n: usize) -> Self {
        PauliString { letters: vec![PauliLetter::I; n], phase: QuarterPhase::PlusOne }
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn phase(&self) -> QuarterPhase {
        self.phase
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Same letters, ignoring the global phase.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.letters == other.letters
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase.prefix())?;
        for (k, letter) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", letter.symbol())?;
        }
        Ok(())
    }
}

/// Apply the Pauli letters qubit-wise to `targets`, then the global phase.
pub fn apply_pauli_string(
    state: &PureState,
    p: &PauliString,
    targets: &[QubitId],
) -> Result<PureState> {
    if targets.len() != p.letters.len() {
        return Err(Error::LengthMismatch { got: targets.len(), expected: p.letters.len() });
    }
    let mut out = state.clone();
    for (&letter, &q) in p.letters.iter().zip(targets) {
        if letter != PauliLetter::I {
            out = apply_gate(&out, &SingleQubitGate::pauli(letter), q)?;
        }
    }
    Ok(out.scaled(p.phase.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const Z0: Complex64 = Complex64::new(0.0, 0.0);
    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const IM: Complex64 = Complex64::new(0.0, 1.0);

    fn q(i: u32) -> QubitId {
        QubitId::alice_atom(i)
    }

    fn random_state(ids: &[QubitId], rng: &mut ChaCha8Rng) -> PureState {
        let register = Register::new(ids.to_vec()).unwrap();
        let amps: Vec<Complex64> = (0..register.dim())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        PureState::from_amplitudes(register, amps).unwrap().renormalized().unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let a = PureState::basis_state(Register::single(q(0)), 0).unwrap();
        let b = PureState::basis_state(Register::single(q(1)), 1).unwrap();
        let joint = tensor(&[a, b]).unwrap();
        assert_eq!(joint.amps(), &[Z0, ONE, Z0, Z0]);
    }

    #[test]
    fn tensor_of_plus_and_zero() {
        let a = PureState::plus(q(0));
        let b = PureState::basis_state(Register::single(q(1)), 0).unwrap();
        let joint = tensor(&[a, b]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((joint.amp(0).re - h).abs() < 1e-15);
        assert_eq!(joint.amp(1), Z0);
        assert!((joint.amp(2).re - h).abs() < 1e-15);
        assert_eq!(joint.amp(3), Z0);
    }

    #[test]
    fn tensor_of_three_random_single_qubit_states_has_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let factors: Vec<PureState> = (0..3).map(|i| random_state(&[q(i)], &mut rng)).collect();
        let joint = tensor(&factors).unwrap();
        // Direct norm computation as the oracle.
        let norm: f64 = joint.amps().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(joint.is_normalized());
    }

    #[test]
    fn tensor_rejects_duplicate_qubits() {
        let a = PureState::plus(q(0));
        let b = PureState::plus(q(0));
        assert_eq!(tensor(&[a, b]).unwrap_err(), Error::DuplicateQubit(q(0)));
    }

    #[test]
    fn tensor_is_associative_with_fixed_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_state(&[q(0)], &mut rng);
        let b = random_state(&[q(1), q(2)], &mut rng);
        let c = random_state(&[q(3)], &mut rng);
        let left = tensor(&[tensor(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = tensor(&[a, tensor(&[b, c]).unwrap()]).unwrap();
        assert!(amp_distance(&left, &right).unwrap() < 1e-15);
    }

    #[test]
    fn hadamard_on_zero_gives_plus() {
        let s = PureState::basis_state(Register::single(q(0)), 0).unwrap();
        let out = apply_gate(&s, &SingleQubitGate::hadamard(), q(0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amp(0).re - h).abs() < 1e-15 && (out.amp(1).re - h).abs() < 1e-15);
    }

    #[test]
    fn qwp_on_r_gives_l_minus_r() {
        // |R⟩ = |1⟩ maps to (|L⟩ − |R⟩)/√2.
        let s = PureState::basis_state(Register::single(QubitId::photon(0)), 1).unwrap();
        let out =
            apply_gate(&s, &SingleQubitGate::quarter_wave_plate(), QubitId::photon(0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amp(0).re - h).abs() < 1e-15);
        assert!((out.amp(1).re + h).abs() < 1e-15);
    }

    #[test]
    fn apply_gate_rejects_unknown_target() {
        let s = PureState::plus(q(0));
        let err = apply_gate(&s, &SingleQubitGate::hadamard(), q(5)).unwrap_err();
        assert_eq!(err, Error::UnknownQubit(q(5)));
    }

    #[test]
    fn unitary_constructor_rejects_non_unitary() {
        let m = [[ONE, ONE], [Z0, ONE]];
        assert_eq!(SingleQubitGate::unitary(m).unwrap_err(), Error::NotUnitary);
        let bad = [[Complex64::new(f64::NAN, 0.0), Z0], [Z0, ONE]];
        assert_eq!(SingleQubitGate::unitary(bad).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn sub_unitary_accepts_damping_and_rejects_gain() {
        let m = [[0.5 * ONE, Z0], [Z0, 0.9 * ONE]];
        assert!(SingleQubitGate::sub_unitary(m).is_ok());
        let gain = [[1.5 * ONE, Z0], [Z0, ONE]];
        assert!(matches!(SingleQubitGate::sub_unitary(gain), Err(Error::NotContractive(_))));
    }

    #[test]
    fn pauli_squares_are_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_state(&[q(0)], &mut rng);
        for letter in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
            let g = SingleQubitGate::pauli(letter);
            let twice = apply_gate(&apply_gate(&s, &g, q(0)).unwrap(), &g, q(0)).unwrap();
            assert!(amp_distance(&s, &twice).unwrap() < 1e-12);
        }
    }

    #[test]
    fn diagonal_pair_gate_identity_and_faraday_entry() {
        let ph = QubitId::photon(0);
        let at = QubitId::bob_atom(0);
        let s = tensor(&[
            PureState::basis_state(Register::single(ph), 0).unwrap(),
            PureState::basis_state(Register::single(at), 0).unwrap(),
        ])
        .unwrap();
        let id = apply_diagonal_pair_gate(&s, [ONE; 4], ph, at).unwrap();
        assert!(amp_distance(&s, &id).unwrap() < 1e-15);
        // (−1, i, i, −1) on |L⟩|0⟩ picks the first entry.
        let out = apply_diagonal_pair_gate(&s, [-ONE, IM, IM, -ONE], ph, at).unwrap();
        assert!((out.amp(0) + ONE).norm() < 1e-15);
    }

    #[test]
    fn diagonal_pair_gate_rejects_coincident_targets() {
        let s = PureState::plus(q(0));
        let err = apply_diagonal_pair_gate(&s, [ONE; 4], q(0), q(0)).unwrap_err();
        assert_eq!(err, Error::CoincidentTargets);
    }

    #[test]
    fn measure_deterministic_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = PureState::basis_state(Register::single(q(0)), 1).unwrap();
        let (bit, prob, post) = measure(&s, q(0), None, &mut rng).unwrap();
        assert!(bit);
        assert!((prob - 1.0).abs() < 1e-15);
        assert!(amp_distance(&s, &post).unwrap() < 1e-15);
    }

    #[test]
    fn measure_forced_zero_on_plus() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = PureState::plus(q(0));
        let (bit, prob, post) = measure(&s, q(0), Some(false), &mut rng).unwrap();
        assert!(!bit);
        assert!((prob - 0.5).abs() < 1e-15);
        assert!((post.amp(0) - ONE).norm() < 1e-15);
    }

    #[test]
    fn measure_forced_impossible_branch_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = PureState::basis_state(Register::single(q(0)), 0).unwrap();
        let err = measure(&s, q(0), Some(true), &mut rng).unwrap_err();
        assert_eq!(err, Error::ZeroProbabilityBranch);
    }

    #[test]
    fn bell_state_measurements_are_correlated() {
        let reg = Register::new(vec![q(0), q(1)]).unwrap();
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bell = PureState::from_amplitudes(reg, vec![h, Z0, Z0, h]).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (b0, p0, post) = measure(&bell, q(0), None, &mut rng).unwrap();
            assert!((p0 - 0.5).abs() < 1e-12);
            let (b1, p1, _) = measure(&post, q(1), None, &mut rng).unwrap();
            assert_eq!(b0, b1);
            assert!((p1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state(&[q(0), q(1)], &mut rng);
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-12);
        let rotated = s.scaled(IM);
        assert!((fidelity(&s, &rotated).unwrap() - 1.0).abs() < 1e-12);
        let zero = PureState::basis_state(Register::single(q(0)), 0).unwrap();
        let plus = PureState::plus(q(0));
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_rejects_register_mismatch() {
        let a = PureState::plus(q(0));
        let b = PureState::plus(q(1));
        assert_eq!(fidelity(&a, &b).unwrap_err(), Error::RegisterMismatch);
    }

    #[test]
    fn entropy_of_product_and_bell_states() {
        let product = tensor(&[PureState::plus(q(0)), PureState::plus(q(1))]).unwrap();
        assert!(entanglement_entropy(&product, &[q(0)]).unwrap().abs() < 1e-12);
        let reg = Register::new(vec![q(0), q(1)]).unwrap();
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bell = PureState::from_amplitudes(reg, vec![h, Z0, Z0, h]).unwrap();
        assert!((entanglement_entropy(&bell, &[q(0)]).unwrap() - 1.0).abs() < 1e-12);
        assert!((entanglement_entropy(&bell, &[q(1)]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_improper_partition() {
        let product = tensor(&[PureState::plus(q(0)), PureState::plus(q(1))]).unwrap();
        assert_eq!(entanglement_entropy(&product, &[]).unwrap_err(), Error::PartitionNotProper);
        assert_eq!(
            entanglement_entropy(&product, &[q(0), q(1)]).unwrap_err(),
            Error::PartitionNotProper
        );
    }

    #[test]
    fn pauli_string_application() {
        let s = PureState::basis_state(Register::single(q(0)), 0).unwrap();
        let x = PauliString::new(vec![PauliLetter::X], QuarterPhase::PlusOne);
        let out = apply_pauli_string(&s, &x, &[q(0)]).unwrap();
        assert!((out.amp(1) - ONE).norm() < 1e-15);
        let id = PauliString::identity(1);
        let same = apply_pauli_string(&s, &id, &[q(0)]).unwrap();
        assert!(amp_distance(&s, &same).unwrap() < 1e-15);
    }

    #[test]
    fn pauli_string_rejects_length_mismatch() {
        let s = PureState::plus(q(0));
        let xx = PauliString::new(vec![PauliLetter::X, PauliLetter::X], QuarterPhase::PlusOne);
        assert!(matches!(
            apply_pauli_string(&s, &xx, &[q(0)]),
            Err(Error::LengthMismatch { got: 1, expected: 2 })
        ));
    }

    #[test]
    fn pauli_string_display_and_order() {
        let a = PauliString::new(vec![PauliLetter::I, PauliLetter::X], QuarterPhase::PlusOne);
        let b = PauliString::new(vec![PauliLetter::X, PauliLetter::I], QuarterPhase::MinusOne);
        assert_eq!(a.to_string(), "I.X");
        assert_eq!(b.to_string(), "-X.I");
        assert!(a < b);
        let c = PauliString::new(vec![PauliLetter::I, PauliLetter::X], QuarterPhase::PlusI);
        assert!(a < c);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn unitary_sequences_preserve_norm(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = random_state(&[q(0), q(1), q(2)], &mut rng);
            for _ in 0..12 {
                let target = q(rng.gen_range(0..3));
                let g = match rng.gen_range(0..5) {
                    0 => SingleQubitGate::hadamard(),
                    1 => SingleQubitGate::pauli(PauliLetter::X),
                    2 => SingleQubitGate::pauli(PauliLetter::Y),
                    3 => SingleQubitGate::pauli(PauliLetter::Z),
                    _ => SingleQubitGate::quarter_wave_plate(),
                };
                s = apply_gate(&s, &g, target).unwrap();
            }
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert!(s.is_normalized());
        }

        #[test]
        fn measurement_branches_sum_to_one(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(&[q(0), q(1)], &mut rng);
            let (_, p0, _) = measure(&s, q(0), Some(false), &mut rng).unwrap();
            let (_, p1, _) = measure(&s, q(0), Some(true), &mut rng).unwrap();
            prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
            // Cross-check one branch against the direct amplitude sum.
            let mask = 1usize << 1;
            let direct_p1: f64 = s.amps().iter().enumerate()
                .filter(|(i, _)| i & mask != 0)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            prop_assert!((p1 - direct_p1).abs() < 1e-12);
        }

        #[test]
        fn hadamard_and_qwp_are_self_inverse(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(&[q(0), q(1)], &mut rng);
            for g in [SingleQubitGate::hadamard(), SingleQubitGate::quarter_wave_plate()] {
                let back = apply_gate(&apply_gate(&s, &g, q(1)).unwrap(), &g, q(1)).unwrap();
                prop_assert!(amp_distance(&s, &back).unwrap() < 1e-12);
            }
        }

        #[test]
        fn random_unit_phases_preserve_norm(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(&[q(0), q(1), q(2)], &mut rng);
            let phases: [Complex64; 4] =
                std::array::from_fn(|_| Complex64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)));
            let out = apply_diagonal_pair_gate(&s, phases, q(0), q(2)).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn fidelity_is_symmetric_and_phase_invariant(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_state(&[q(0), q(1)], &mut rng);
            let b = random_state(&[q(0), q(1)], &mut rng);
            let fab = fidelity(&a, &b).unwrap();
            let fba = fidelity(&b, &a).unwrap();
            prop_assert!((fab - fba).abs() < 1e-12);
            let phase = Complex64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
            let f_rot = fidelity(&a.scaled(phase), &b).unwrap();
            prop_assert!((fab - f_rot).abs() < 1e-12);
        }

        #[test]
        fn pauli_strings_are_involutions_up_to_phase(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(&[q(0), q(1), q(2)], &mut rng);
            let letters: Vec<PauliLetter> =
                (0..3).map(|_| PauliLetter::ALL[rng.gen_range(0..4)]).collect();
            let phase = QuarterPhase::ALL[rng.gen_range(0..4)];
            let p = PauliString::new(letters, phase);
            let targets = [q(0), q(1), q(2)];
            let twice =
                apply_pauli_string(&apply_pauli_string(&s, &p, &targets).unwrap(), &p, &targets).unwrap();
            prop_assert!((fidelity(&s, &twice).unwrap() - 1.0).abs() < 1e-9);
        }
    }
}
