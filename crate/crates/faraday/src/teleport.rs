//! The N-qubit teleportation pipeline built on cavity Faraday rotation.
//!
//! One protocol round, for an n-qubit input state held on Alice's atoms:
//!
//! 1. Bob reflects n linearly polarized photons off his cavities, entangling
//!    photon i with his atom i ([`make_channel`]), and sends the photons to
//!    Alice.
//! 2. Alice reflects photon i off her cavity i (holding her atom i), applies
//!    a quarter-wave plate to every photon and a Hadamard to every one of
//!    her atoms, and measures all 2n qubits.
//! 3. Bob applies the Pauli correction determined by the measurement record
//!    ([`per_qubit_correction`]) and his atoms end up in the input state.
//!
//! The joint register is ordered (photons, Alice atoms, Bob atoms), leftmost
//! qubit most significant. [`expand_joint_state`] assembles the same
//! pre-measurement state from the closed-form per-channel amplitudes and
//! serves as an independent oracle for the gate-by-gate pipeline.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

use crate::cavity::{CavityParams, FaradayGate, GateMode};
use crate::error::{Error, Result};
use crate::hilbert::{
    self, PauliLetter, PauliString, PureState, QuarterPhase, QubitId, Register, SingleQubitGate,
};

/// Largest number of teleported qubits (3n qubits of joint state).
pub const MAX_PROTOCOL_QUBITS: usize = 6;

/// Largest n for the exhaustive correction search (4^n candidates).
pub const MAX_SEARCH_QUBITS: usize = 4;

/// Seeds for the two independent random inputs that certify a correction.
const CERTIFY_SEEDS: [u64; 2] = [0x517e_a5ed, 0x9e37_79b9];

/// An n-qubit pure state to be teleported, as 2^n amplitudes with the
/// leftmost ket symbol owning the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct InputState {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl InputState {
    /// Build from amplitudes; the length must be a power of two and the norm
    /// must be 1 within 1e-10.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 || !coeffs.len().is_power_of_two() {
            return Err(Error::BadAmplitudeCount {
                got: coeffs.len(),
                expected: coeffs.len().next_power_of_two().max(2),
            });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm_sqr));
        }
        let n = coeffs.len().trailing_zeros() as usize;
        Ok(InputState { n, coeffs })
    }

    /// A generic random state: uniform complex components, normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let coeffs = random_unit_vector(1 << n, rng);
        InputState { n, coeffs }
    }

    /// The symmetric GHZ state `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n: usize) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 1 << n];
        coeffs[0] = h;
        coeffs[(1 << n) - 1] = h;
        InputState { n, coeffs }
    }

    /// `a|0…0⟩ + d|1…1⟩` with |a|² + |d|² = 1.
    pub fn ghz_like(n: usize, a: Complex64, d: Complex64) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 1 << n];
        coeffs[0] = a;
        coeffs[(1 << n) - 1] = d;
        InputState::new(coeffs)
    }

    /// A random state supported on the given basis kets.
    pub fn random_in_subspace<R: Rng + ?Sized>(
        n: usize,
        kets: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        if kets.is_empty() {
            return Err(Error::InvalidParams("subspace needs at least one basis ket".into()));
        }
        let dim = 1 << n;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        let weights = random_unit_vector(kets.len(), rng);
        for (&k, w) in kets.iter().zip(weights) {
            if k >= dim {
                return Err(Error::InvalidParams(format!(
                    "basis ket {k} out of range for n = {n}"
                )));
            }
            if coeffs[k].norm_sqr() != 0.0 {
                return Err(Error::InvalidParams(format!("basis ket {k} listed twice")));
            }
            coeffs[k] = w;
        }
        Ok(InputState { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The same amplitudes as a state over the given qubits.
    pub fn as_state_on(&self, qubits: &[QubitId]) -> Result<PureState> {
        if qubits.len() != self.n {
            return Err(Error::LengthMismatch { got: qubits.len(), expected: self.n });
        }
        PureState::from_amplitudes(Register::new(qubits.to_vec())?, self.coeffs.clone())
    }
}

/// The GHZ-like subspace `span{|0…0⟩, |1…1⟩}` as basis-ket indices.
pub fn ghz_subspace(n: usize) -> Vec<usize> {
    vec![0, (1 << n) - 1]
}

fn random_unit_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm_sqr: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr > 1e-6 {
            let s = 1.0 / norm_sqr.sqrt();
            return v.into_iter().map(|c| c * s).collect();
        }
    }
}

/// Photon polarization, encoded as L = 0, R = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    L,
    R,
}

impl Polarization {
    pub fn bit(self) -> usize {
        match self {
            Polarization::L => 0,
            Polarization::R => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Polarization::L
        } else {
            Polarization::R
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarization::L => 'L',
            Polarization::R => 'R',
        }
    }
}

/// One measurement record: n photon polarizations and n Alice-atom bits,
/// printed as `LLR:010`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome {
    photons: Vec<Polarization>,
    atoms: Vec<bool>,
}

impl Outcome {
    pub fn new(photons: Vec<Polarization>, atoms: Vec<bool>) -> Result<Self> {
        if photons.is_empty() || photons.len() != atoms.len() {
            return Err(Error::LengthMismatch { got: atoms.len(), expected: photons.len().max(1) });
        }
        Ok(Outcome { photons, atoms })
    }

    /// Decode from bit patterns: bit n−1−i of `photon_bits` / `atom_bits`
    /// is qubit i (leftmost qubit most significant, as everywhere).
    pub fn from_bits(n: usize, photon_bits: usize, atom_bits: usize) -> Self {
        let photons = (0..n).map(|i| Polarization::from_bit(photon_bits >> (n - 1 - i))).collect();
        let atoms = (0..n).map(|i| (atom_bits >> (n - 1 - i)) & 1 == 1).collect();
        Outcome { photons, atoms }
    }

    pub fn n(&self) -> usize {
        self.photons.len()
    }

    pub fn photons(&self) -> &[Polarization] {
        &self.photons
    }

    pub fn atoms(&self) -> &[bool] {
        &self.atoms
    }

    pub fn photon_bits(&self) -> usize {
        self.photons.iter().fold(0, |acc, p| (acc << 1) | p.bit())
    }

    pub fn atom_bits(&self) -> usize {
        self.atoms.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.photons {
            write!(f, "{}", p.symbol())?;
        }
        write!(f, ":")?;
        for &a in &self.atoms {
            write!(f, "{}", u8::from(a))?;
        }
        Ok(())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::InvalidParams(format!("malformed outcome '{s}', expected e.g. LLR:010"));
        let (ph, at) = s.split_once(':').ok_or_else(bad)?;
        let photons = ph
            .chars()
            .map(|c| match c {
                'L' | 'l' => Ok(Polarization::L),
                'R' | 'r' => Ok(Polarization::R),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        let atoms = at
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        Outcome::new(photons, atoms)
    }
}

/// Everything one protocol round produces.
#[derive(Debug, Clone)]
pub struct TeleportReport {
    pub outcome: Outcome,
    /// Probability of this outcome, conditioned on every photon arriving.
    pub probability: f64,
    /// The correction Bob applied.
    pub correction: PauliString,
    /// Overlap of Bob's corrected state with the input, in [0, 1].
    pub fidelity: f64,
    /// Bob's atoms after the correction.
    pub bob_state: PureState,
    /// Probability that no photon was absorbed (1 in ideal mode).
    pub survival: f64,
}

/// Qubit labels for an n-qubit round: (photons, Alice atoms, Bob atoms).
pub fn protocol_qubits(n: usize) -> (Vec<QubitId>, Vec<QubitId>, Vec<QubitId>) {
    let photons = (0..n as u32).map(QubitId::photon).collect();
    let alice = (0..n as u32).map(QubitId::alice_atom).collect();
    let bob = (0..n as u32).map(QubitId::bob_atom).collect();
    (photons, alice, bob)
}

/// One quantum channel: the entangled (Bob atom, photon) pair produced by
/// reflecting a linear photon off Bob's cavity with his atom in `(|0⟩+|1⟩)/√2`,
///
/// ```text
/// (1/√2) [ |0⟩ ⊗ |Ψout⟩₋  +  |1⟩ ⊗ |Ψout⟩₊ ]
/// ```
///
/// using the ideal (pure-phase) gate.
pub fn make_channel(p: &CavityParams) -> Result<PureState> {
    channel_state(p, GateMode::Ideal, 0)
}

/// [`make_channel`] with an explicit gate mode and channel index.
pub fn channel_state(p: &CavityParams, mode: GateMode, index: u32) -> Result<PureState> {
    let gate = FaradayGate::new(p, mode)?;
    let atom = QubitId::bob_atom(index);
    let photon = QubitId::photon(index);
    let joint = hilbert::tensor(&[PureState::plus(atom), PureState::plus(photon)])?;
    gate.apply(&joint, photon, atom)
}

/// The full 3n-qubit state after both Faraday layers but before the
/// wave-plate/Hadamard layer, assembled in closed form: for photon bits p,
/// Alice bits m and Bob bits s the amplitude is
/// `input[m] · Π_i G(p_i, m_i) · C(s_i, p_i)` with G the Alice-side gate
/// entry and C the channel amplitude.
pub fn joint_state_before_rotations(input: &InputState, p: &CavityParams) -> Result<PureState> {
    let n = check_protocol_size(input)?;
    let gate = FaradayGate::new(p, GateMode::Ideal)?;
    let rc = gate.coupled();
    let r0 = gate.empty();
    let g = |p_bit: usize, m_bit: usize| if p_bit == m_bit { rc } else { r0 };
    let c = |s_bit: usize, p_bit: usize| 0.5 * if p_bit == s_bit { rc } else { r0 };

    let dim = 1usize << (3 * n);
    let mask = (1usize << n) - 1;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let pb = idx >> (2 * n);
        let mb = (idx >> n) & mask;
        let sb = idx & mask;
        let mut value = input.coeffs[mb];
        for i in 0..n {
            let shift = n - 1 - i;
            let pi = (pb >> shift) & 1;
            let mi = (mb >> shift) & 1;
            let si = (sb >> shift) & 1;
            value *= g(pi, mi) * c(si, pi);
        }
        *amp = value;
    }
    let (photons, alice, bob) = protocol_qubits(n);
    let register = Register::new([photons, alice, bob].concat())?;
    PureState::from_amplitudes(register, amps)
}

/// The full pre-measurement joint state of 3n qubits, assembled in closed
/// form (an independent oracle for the gate-by-gate pipeline): the
/// wave-plate/Hadamard layer is folded analytically into a per-qubit kernel
/// and summed against the input amplitudes.
pub fn expand_joint_state(input: &InputState, p: &CavityParams) -> Result<PureState> {
    let n = check_protocol_size(input)?;
    let gate = FaradayGate::new(p, GateMode::Ideal)?;
    let rc = gate.coupled();
    let r0 = gate.empty();
    let h = |a: usize, b: usize| {
        let sign = if a & b == 1 { -1.0 } else { 1.0 };
        Complex64::new(sign * std::f64::consts::FRAC_1_SQRT_2, 0.0)
    };
    let g = |p_bit: usize, m_bit: usize| if p_bit == m_bit { rc } else { r0 };
    let c = |s_bit: usize, p_bit: usize| 0.5 * if p_bit == s_bit { rc } else { r0 };

    // kernel[p'][m'][m][s] = h(m', m) Σ_p h(p', p) G(p, m) C(s, p)
    let mut kernel = [[[[Complex64::new(0.0, 0.0); 2]; 2]; 2]; 2];
    for (pp, km) in kernel.iter_mut().enumerate() {
        for (mp, kmm) in km.iter_mut().enumerate() {
            for (m, ks) in kmm.iter_mut().enumerate() {
                for (s, k) in ks.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for pb in 0..2 {
                        acc += h(pp, pb) * g(pb, m) * c(s, pb);
                    }
                    *k = h(mp, m) * acc;
                }
            }
        }
    }

    let dim = 1usize << (3 * n);
    let mask = (1usize << n) - 1;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let pb = idx >> (2 * n);
        let mp = (idx >> n) & mask;
        let sb = idx & mask;
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, coeff) in input.coeffs.iter().enumerate() {
            let mut term = *coeff;
            for i in 0..n {
                let shift = n - 1 - i;
                term *= kernel[(pb >> shift) & 1][(mp >> shift) & 1][(m >> shift) & 1]
                    [(sb >> shift) & 1];
            }
            acc += term;
        }
        *amp = acc;
    }
    let (photons, alice, bob) = protocol_qubits(n);
    let register = Register::new([photons, alice, bob].concat())?;
    PureState::from_amplitudes(register, amps)
}

fn check_protocol_size(input: &InputState) -> Result<usize> {
    let n = input.n();
    if n == 0 {
        return Err(Error::InvalidParams("protocol needs at least one qubit".into()));
    }
    if n > MAX_PROTOCOL_QUBITS {
        return Err(Error::ProtocolTooLarge(n));
    }
    Ok(n)
}

/// The gate-by-gate pipeline state right before measurement, with the ideal
/// gate. Amplitude-wise equal to [`expand_joint_state`], which assembles the
/// same state in closed form.
pub fn pipeline_state(input: &InputState, p: &CavityParams) -> Result<PureState> {
    pre_measurement_state(input, p, GateMode::Ideal)
}

/// The pre-measurement pipeline: tensor the photons, input and Bob atoms,
/// apply Bob-side then Alice-side Faraday gates, then the rotation layer.
fn pre_measurement_state(
    input: &InputState,
    p: &CavityParams,
    mode: GateMode,
) -> Result<PureState> {
    let n = check_protocol_size(input)?;
    let (photons, alice, bob) = protocol_qubits(n);
    let gate = FaradayGate::new(p, mode)?;

    let mut factors: Vec<PureState> = photons.iter().map(|&q| PureState::plus(q)).collect();
    factors.push(input.as_state_on(&alice)?);
    factors.extend(bob.iter().map(|&q| PureState::plus(q)));
    let mut state = hilbert::tensor(&factors)?;

    for (&ph, &b) in photons.iter().zip(&bob) {
        state = gate.apply(&state, ph, b)?;
    }
    for (&ph, &a) in photons.iter().zip(&alice) {
        state = gate.apply(&state, ph, a)?;
    }
    let qwp = SingleQubitGate::quarter_wave_plate();
    let had = SingleQubitGate::hadamard();
    for &q in &photons {
        state = hilbert::apply_gate(&state, &qwp, q)?;
    }
    for &q in &alice {
        state = hilbert::apply_gate(&state, &had, q)?;
    }
    Ok(state)
}

/// A protocol round stopped right after Alice's measurements: Bob's atoms
/// have collapsed but no correction has been applied yet.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    pub outcome: Outcome,
    pub probability: f64,
    pub survival: f64,
    /// Bob's atoms conditioned on the outcome, before correction.
    pub bob_state: PureState,
}

/// Run the pipeline up to (and including) Alice's measurements.
pub fn run_to_measurement<R: Rng + ?Sized>(
    input: &InputState,
    p: &CavityParams,
    mode: GateMode,
    forced: Option<&Outcome>,
    rng: &mut R,
) -> Result<ConditionalState> {
    let n = check_protocol_size(input)?;
    if let Some(o) = forced {
        if o.n() != n {
            return Err(Error::LengthMismatch { got: o.n(), expected: n });
        }
    }
    let (photons, alice, bob) = protocol_qubits(n);
    let raw = pre_measurement_state(input, p, mode)?;
    let survival = raw.norm_sqr();
    let mut state = raw.renormalized()?;

    let mut probability = 1.0;
    let mut photon_bits = Vec::with_capacity(n);
    let mut atom_bits = Vec::with_capacity(n);
    for (i, &ph) in photons.iter().enumerate() {
        let want = forced.map(|o| o.photons()[i] == Polarization::R);
        let (bit, prob, next) = hilbert::measure(&state, ph, want, rng)?;
        photon_bits.push(Polarization::from_bit(usize::from(bit)));
        probability *= prob;
        state = next;
    }
    for (i, &a) in alice.iter().enumerate() {
        let want = forced.map(|o| o.atoms()[i]);
        let (bit, prob, next) = hilbert::measure(&state, a, want, rng)?;
        atom_bits.push(bit);
        probability *= prob;
        state = next;
    }
    let outcome = Outcome::new(photon_bits, atom_bits)?;

    // The collapsed state factorizes as |p⟩|m⟩ ⊗ |bob⟩; read off Bob's block.
    let base = (outcome.photon_bits() << (2 * n)) | (outcome.atom_bits() << n);
    let bob_amps: Vec<Complex64> = (0..1usize << n).map(|s| state.amp(base | s)).collect();
    let bob_state = PureState::from_amplitudes(Register::new(bob)?, bob_amps)?;

    Ok(ConditionalState { outcome, probability, survival, bob_state })
}

/// The Pauli letter undoing one qubit's measurement record:
/// (L,0) → X, (L,1) → Y, (R,0) → Z, (R,1) → I.
pub fn per_qubit_correction(photon: Polarization, atom: bool) -> PauliLetter {
    match (photon, atom) {
        (Polarization::L, false) => PauliLetter::X,
        (Polarization::L, true) => PauliLetter::Y,
        (Polarization::R, false) => PauliLetter::Z,
        (Polarization::R, true) => PauliLetter::I,
    }
}

/// The full correction for an outcome: the qubit-wise product of
/// [`per_qubit_correction`] letters (global phase +1; corrections are only
/// defined up to a phase).
pub fn outcome_correction(outcome: &Outcome) -> PauliString {
    let letters = outcome
        .photons()
        .iter()
        .zip(outcome.atoms())
        .map(|(&p, &a)| per_qubit_correction(p, a))
        .collect();
    PauliString::new(letters, QuarterPhase::PlusOne)
}

/// Run one full protocol round with the ideal (pure-phase) gate.
///
/// With `forced` given, that outcome's branch is taken deterministically;
/// otherwise the outcome is sampled using the seed.
pub fn run_protocol(
    input: &InputState,
    p: &CavityParams,
    forced: Option<&Outcome>,
    seed: u64,
) -> Result<TeleportReport> {
    run_protocol_with_mode(input, p, GateMode::Ideal, forced, seed)
}

/// [`run_protocol`] with an explicit gate mode.
pub fn run_protocol_with_mode(
    input: &InputState,
    p: &CavityParams,
    mode: GateMode,
    forced: Option<&Outcome>,
    seed: u64,
) -> Result<TeleportReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_protocol_rng(input, p, mode, forced, &mut rng)
}

pub(crate) fn run_protocol_rng<R: Rng + ?Sized>(
    input: &InputState,
    p: &CavityParams,
    mode: GateMode,
    forced: Option<&Outcome>,
    rng: &mut R,
) -> Result<TeleportReport> {
    let cond = run_to_measurement(input, p, mode, forced, rng)?;
    let (_, _, bob) = protocol_qubits(input.n());
    let correction = outcome_correction(&cond.outcome);
    let corrected = hilbert::apply_pauli_string(&cond.bob_state, &correction, &bob)?;
    let target = input.as_state_on(&bob)?;
    let fidelity = hilbert::fidelity(&corrected, &target)?;
    Ok(TeleportReport {
        outcome: cond.outcome,
        probability: cond.probability,
        correction,
        fidelity,
        bob_state: corrected,
        survival: cond.survival,
    })
}

/// Exhaustively search for the correction of one outcome.
///
/// Every assignment of Pauli letters is tried in lexicographic order
/// (I < X < Y < Z); a candidate is accepted iff it maps Bob's conditional
/// state back to the input with fidelity ≥ 1 − 1e-9 for two independent
/// random inputs — generic ones, or two random states in `subspace` when
/// given. The first (smallest) acceptable string is returned. Fidelity is
/// blind to the global phase, so the four phases of a string stand or fall
/// together and the returned phase is the smallest, +1.
pub fn derive_correction(
    outcome: &Outcome,
    p: &CavityParams,
    subspace: Option<&[usize]>,
) -> Result<PauliString> {
    let n = outcome.n();
    if n > MAX_SEARCH_QUBITS {
        return Err(Error::SearchTooLarge(n));
    }
    let (_, _, bob) = protocol_qubits(n);
    let mut pairs = Vec::with_capacity(CERTIFY_SEEDS.len());
    for seed in CERTIFY_SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = match subspace {
            Some(kets) => InputState::random_in_subspace(n, kets, &mut rng)?,
            None => InputState::random(n, &mut rng),
        };
        let cond = run_to_measurement(&input, p, GateMode::Ideal, Some(outcome), &mut rng)?;
        let target = input.as_state_on(&bob)?;
        pairs.push((cond.bob_state, target));
    }

    for code in 0..(1usize << (2 * n)) {
        let letters: Vec<PauliLetter> =
            (0..n).map(|i| PauliLetter::ALL[(code >> (2 * (n - 1 - i))) & 3]).collect();
        let candidate = PauliString::new(letters, QuarterPhase::PlusOne);
        let mut ok = true;
        for (bob_state, target) in &pairs {
            let corrected = hilbert::apply_pauli_string(bob_state, &candidate, &bob)?;
            if hilbert::fidelity(&corrected, target)? < 1.0 - 1e-9 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(candidate);
        }
    }
    Err(Error::NoCorrectionFound)
}

/// Whether two Pauli strings act identically (up to one common global
/// phase) on every state supported on the given basis kets.
pub fn equivalent_on_subspace(
    a: &PauliString,
    b: &PauliString,
    n: usize,
    kets: &[usize],
) -> Result<bool> {
    let (_, _, bob) = protocol_qubits(n);
    let mut rng = ChaCha8Rng::seed_from_u64(CERTIFY_SEEDS[0] ^ 0x5bd1_e995);
    let mut common: Option<Complex64> = None;
    for _ in 0..2 {
        let s = InputState::random_in_subspace(n, kets, &mut rng)?.as_state_on(&bob)?;
        let va = hilbert::apply_pauli_string(&s, a, &bob)?;
        let vb = hilbert::apply_pauli_string(&s, b, &bob)?;
        let ip = hilbert::inner(&va, &vb)?;
        if (ip.norm() - 1.0).abs() > 1e-9 {
            return Ok(false);
        }
        match common {
            None => common = Some(ip),
            Some(c) => {
                if (c - ip).norm() > 1e-9 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// One axis-aligned grid of parameter deviations for [`fidelity_sweep`].
#[derive(Debug, Clone)]
pub struct SweepGrid {
    /// Probe frequency offsets from ωc, in units of κ.
    pub omega_p: Vec<f64>,
    /// Coupling values, in units of κ.
    pub g: Vec<f64>,
    /// Spontaneous emission rates, in units of κ.
    pub gamma: Vec<f64>,
}

/// Mean conditional fidelity and photon-survival probability at one grid
/// point.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub omega_p: f64,
    pub g: f64,
    pub gamma: f64,
    pub mean_fidelity: f64,
    pub success_probability: f64,
}

/// Run the protocol in lossy mode over the cartesian grid, averaging the
/// conditional fidelity over `samples` sampled outcomes per point.
pub fn fidelity_sweep(
    input: &InputState,
    grid: &SweepGrid,
    samples: u32,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    if grid.omega_p.is_empty() || grid.g.is_empty() || grid.gamma.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if samples == 0 {
        return Err(Error::InvalidParams("sweep needs at least one sample per point".into()));
    }
    let mut points = Vec::with_capacity(grid.omega_p.len() * grid.g.len() * grid.gamma.len());
    let mut point_index: u64 = 0;
    for &omega_p in &grid.omega_p {
        for &g in &grid.g {
            for &gamma in &grid.gamma {
                let params = CavityParams::from_offsets(omega_p, 0.0, g, gamma)?;
                let mut fid_sum = 0.0;
                let mut survival = 1.0;
                for k in 0..samples {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(point_index * u64::from(samples) + u64::from(k) + 1);
                    let report = run_protocol_rng(input, &params, GateMode::Lossy, None, &mut rng)?;
                    fid_sum += report.fidelity;
                    survival = report.survival;
                }
                points.push(SweepPoint {
                    omega_p,
                    g,
                    gamma,
                    mean_fidelity: fid_sum / f64::from(samples),
                    success_probability: survival,
                });
                point_index += 1;
            }
        }
    }
    Ok(points)
}
