//! Input-output reflection off a single-sided cavity holding one atom.
//!
//! A circularly polarized photon that couples to the atomic transition sees
//! the dressed reflection coefficient [`reflect_coupled`]; the orthogonal
//! polarization sees an empty cavity, [`reflect_empty`]. The phase difference
//! between the two rotates a linear polarization (Faraday rotation) and,
//! promoted to an operator on a photon-atom pair, yields the conditional
//! phase gate [`FaradayGate`] that drives the whole protocol.
//!
//! All rates and frequencies are measured in units of the cavity damping
//! rate κ; the physics only depends on those ratios. Note that the formulas
//! assume the atom is at most virtually excited, which holds for large κ
//! (low-Q cavity); nothing here checks that the chosen parameters stay in
//! that regime.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{self, PureState, QubitId, Register};

/// Physical inputs of one cavity: mode, transition and probe frequencies,
/// damping and emission rates, and the coupling strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Cavity mode frequency ωc.
    pub omega_c: f64,
    /// Atomic transition frequency ω0.
    pub omega_0: f64,
    /// Probe (photon carrier) frequency ωp.
    pub omega_p: f64,
    /// Cavity damping rate κ, the unit scale.
    pub kappa: f64,
    /// Atomic spontaneous emission rate γ.
    pub gamma: f64,
    /// Atom-cavity coupling g.
    pub g: f64,
}

impl CavityParams {
    pub fn new(
        omega_c: f64,
        omega_0: f64,
        omega_p: f64,
        kappa: f64,
        gamma: f64,
        g: f64,
    ) -> Result<Self> {
        let all = [omega_c, omega_0, omega_p, kappa, gamma, g];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if kappa <= 0.0 {
            return Err(Error::InvalidParams(format!("kappa must be positive, got {kappa}")));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParams(format!("gamma must be nonnegative, got {gamma}")));
        }
        if g < 0.0 {
            return Err(Error::InvalidParams(format!("g must be nonnegative, got {g}")));
        }
        Ok(CavityParams { omega_c, omega_0, omega_p, kappa, gamma, g })
    }

    /// Frequencies as offsets from ωc in units of κ: ω0 = ωc + `delta_0`,
    /// ωp = ωc + `delta_p`, with ωc = 0 and κ = 1.
    pub fn from_offsets(delta_p: f64, delta_0: f64, g: f64, gamma: f64) -> Result<Self> {
        CavityParams::new(0.0, delta_0, delta_p, 1.0, gamma, g)
    }

    /// The lossless working point ω0 = ωc, ωp = ωc − κ/2, g = κ/2, γ = 0,
    /// where the coupled and empty phases are exactly π and π/2.
    pub fn ideal() -> Self {
        CavityParams { omega_c: 0.0, omega_0: 0.0, omega_p: -0.5, kappa: 1.0, gamma: 0.0, g: 0.5 }
    }

    pub fn with_omega_p(self, omega_p: f64) -> Self {
        CavityParams { omega_p, ..self }
    }
}

/// A complex reflection coefficient together with its polar decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub r: Complex64,
    /// arg(r), in (−π, π].
    pub phase: f64,
    /// |r|.
    pub magnitude: f64,
}

impl Reflection {
    fn from_complex(r: Complex64) -> Self {
        // arg() returns −π for −1 − 0i; fold onto the (−π, π] branch so the
        // working-point phase is exactly π.
        let mut phase = r.arg();
        if phase == -std::f64::consts::PI {
            phase = std::f64::consts::PI;
        }
        Reflection { r, phase, magnitude: r.norm() }
    }

    /// r rescaled to unit modulus, keeping the phase exact.
    fn unit(&self) -> Complex64 {
        self.r / self.magnitude
    }
}

/// Reflection coefficient seen by a photon that couples to the atom:
///
/// ```text
/// r(ωp) = ([i(ωc−ωp) − κ/2][i(ω0−ωp) + γ/2] + g²)
///       / ([i(ωc−ωp) + κ/2][i(ω0−ωp) + γ/2] + g²)
/// ```
///
/// Fails when the denominator vanishes (degenerate parameters such as
/// g = γ = 0 with ω0 = ωp).
pub fn reflect_coupled(p: &CavityParams) -> Result<Reflection> {
    let det_c = Complex64::new(0.0, p.omega_c - p.omega_p);
    let det_0 = Complex64::new(p.gamma / 2.0, p.omega_0 - p.omega_p);
    let half_kappa = Complex64::new(p.kappa / 2.0, 0.0);
    let g2 = Complex64::new(p.g * p.g, 0.0);
    let num = (det_c - half_kappa) * det_0 + g2;
    let den = (det_c + half_kappa) * det_0 + g2;
    if den.norm() < 1e-300 {
        return Err(Error::DegenerateParams);
    }
    Ok(Reflection::from_complex(num / den))
}

/// Reflection coefficient of the bare cavity (the photon polarization that
/// cannot drive the transition):
///
/// ```text
/// r0(ωp) = (i(ωc−ωp) − κ/2) / (i(ωc−ωp) + κ/2)
/// ```
///
/// Always unit modulus; the denominator cannot vanish for κ > 0.
pub fn reflect_empty(p: &CavityParams) -> Reflection {
    let det_c = Complex64::new(0.0, p.omega_c - p.omega_p);
    let half_kappa = Complex64::new(p.kappa / 2.0, 0.0);
    Reflection::from_complex((det_c - half_kappa) / (det_c + half_kappa))
}

/// The two reflection phases and the Faraday rotation angles they induce on
/// a linear polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair {
    /// Phase of the coupled reflection, φ = arg r.
    pub phi: f64,
    /// Phase of the empty-cavity reflection, φ0 = arg r0.
    pub phi0: f64,
    /// Rotation angle for an atom in |0⟩: (φ0 − φ)/2.
    pub theta_minus: f64,
    /// Rotation angle for an atom in |1⟩: (φ − φ0)/2.
    pub theta_plus: f64,
}

impl PhasePair {
    pub fn from_angles(phi: f64, phi0: f64) -> Self {
        PhasePair { phi, phi0, theta_minus: (phi0 - phi) / 2.0, theta_plus: (phi - phi0) / 2.0 }
    }
}

/// Both reflection phases at the given parameters.
pub fn faraday_phases(p: &CavityParams) -> Result<PhasePair> {
    let coupled = reflect_coupled(p)?;
    let empty = reflect_empty(p);
    Ok(PhasePair::from_angles(coupled.phase, empty.phase))
}

/// Whether a gate keeps the exact reflection amplitudes or only their phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateMode {
    /// Pure phases r/|r|: the weak-absorption idealization, exactly unitary.
    Ideal,
    /// Full complex reflection coefficients: sub-unitary when γ > 0, leaving
    /// states sub-normalized until a later renormalization accounts for the
    /// heralded post-selection.
    Lossy,
}

/// The conditional photon-atom phase gate produced by one cavity reflection.
///
/// Diagonal in the joint basis (photon, atom) with entries ordered
/// (L0, R0, L1, R1): the photon polarization that matches the atomic state
/// (L with |0⟩, R with |1⟩) acquires the coupled coefficient, the other one
/// the empty-cavity coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaradayGate {
    phases: [Complex64; 4],
    mode: GateMode,
}

impl FaradayGate {
    pub fn new(p: &CavityParams, mode: GateMode) -> Result<Self> {
        let coupled = reflect_coupled(p)?;
        let empty = reflect_empty(p);
        let (c, e) = match mode {
            GateMode::Ideal => {
                // An impedance-matched cavity (|r| = 0, e.g. γ = 4g² on
                // resonance) has no phase to keep.
                if coupled.magnitude < 1e-12 {
                    return Err(Error::DegenerateParams);
                }
                (coupled.unit(), empty.unit())
            }
            GateMode::Lossy => (coupled.r, empty.r),
        };
        Ok(FaradayGate { phases: [c, e, e, c], mode })
    }

    /// Ideal gate built directly from the two phases.
    pub fn from_phases(phi: f64, phi0: f64) -> Self {
        let c = Complex64::from_polar(1.0, phi);
        let e = Complex64::from_polar(1.0, phi0);
        FaradayGate { phases: [c, e, e, c], mode: GateMode::Ideal }
    }

    /// Diagonal entries in basis order (L0, R0, L1, R1).
    pub fn phases(&self) -> &[Complex64; 4] {
        &self.phases
    }

    pub fn mode(&self) -> GateMode {
        self.mode
    }

    /// Entry applied when polarization and atomic state match (coupled).
    pub fn coupled(&self) -> Complex64 {
        self.phases[0]
    }

    /// Entry applied in the mismatched (empty cavity) case.
    pub fn empty(&self) -> Complex64 {
        self.phases[1]
    }

    /// Apply the gate to a photon-atom pair inside `state`.
    pub fn apply(&self, state: &PureState, photon: QubitId, atom: QubitId) -> Result<PureState> {
        hilbert::apply_diagonal_pair_gate(state, self.phases, photon, atom)
    }

    /// Largest factor by which the gate can scale any amplitude.
    pub fn spectral_norm(&self) -> f64 {
        self.phases.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Reflected photon states for a linear input `(|L⟩+|R⟩)/√2`:
    /// the pair (atom in |0⟩, atom in |1⟩). In `Lossy` mode these are
    /// sub-normalized.
    pub fn output_states(&self, photon: QubitId) -> (PureState, PureState) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let reg = Register::single(photon);
        let minus =
            PureState::from_amplitudes(reg.clone(), vec![self.phases[0] * h, self.phases[1] * h])
                .expect("two finite amplitudes");
        let plus = PureState::from_amplitudes(reg, vec![self.phases[2] * h, self.phases[3] * h])
            .expect("two finite amplitudes");
        (minus, plus)
    }
}

/// Which reflection coefficient filters a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Coupled,
    Empty,
}

/// A sampled complex pulse envelope with uniform time step `dt` (units of
/// 1/κ). A normalized pulse satisfies Σ|sample|²·dt = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    samples: Vec<Complex64>,
    dt: f64,
}

impl Pulse {
    pub fn new(samples: Vec<Complex64>, dt: f64) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "pulse time step must be positive, got {dt}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidParams("pulse needs at least one sample".into()));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Pulse { samples, dt })
    }

    /// A normalized Gaussian envelope centred at `center` with standard
    /// deviation `width`, sampled at `n` points.
    pub fn gaussian(n: usize, dt: f64, center: f64, width: f64) -> Result<Self> {
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::InvalidParams(format!("pulse width must be positive, got {width}")));
        }
        let mut samples = Vec::with_capacity(n);
        for k in 0..n {
            let t = k as f64 * dt;
            let x = (t - center) / width;
            samples.push(Complex64::new((-0.5 * x * x).exp(), 0.0));
        }
        let pulse = Pulse::new(samples, dt)?;
        let scale = 1.0 / pulse.energy().sqrt();
        Ok(Pulse { samples: pulse.samples.into_iter().map(|s| s * scale).collect(), dt })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    /// Σ|sample|²·dt.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.dt
    }

    /// ⟨self|other⟩ = Σ conj(self)·other·dt over a common grid.
    pub fn overlap(&self, other: &Pulse) -> Result<Complex64> {
        if self.samples.len() != other.samples.len() || self.dt != other.dt {
            return Err(Error::LengthMismatch {
                got: other.samples.len(),
                expected: self.samples.len(),
            });
        }
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).sum::<Complex64>()
            * self.dt)
    }

    /// Normalized shape overlap |⟨self|other⟩|² / (E_self · E_other) in [0, 1].
    pub fn shape_overlap(&self, other: &Pulse) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr() / (self.energy() * other.energy()))
    }
}

/// Reflect a pulse off the cavity by filtering its spectrum with the chosen
/// reflection coefficient, evaluated at each frequency bin.
///
/// The carrier `p.omega_p` is the spectrum centre: bin k of the FFT sits at
/// ωp + 2π·k'/(n·dt) with k' the signed bin index, so long pulses reduce to
/// multiplication by r(ωp). Boundaries are periodic; keep the envelope well
/// inside the window. The sample count must be a power of two.
pub fn reflect_pulse(p: &CavityParams, input: &Pulse, branch: Branch) -> Result<Pulse> {
    let n = input.samples.len();
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::PulseLengthNotPowerOfTwo(n));
    }
    let mut planner = rustfft::FftPlanner::new();
    let mut buf = input.samples.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, value) in buf.iter_mut().enumerate() {
        let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        let domega = 2.0 * std::f64::consts::PI * signed / (n as f64 * input.dt);
        let pk = p.with_omega_p(p.omega_p + domega);
        let r = match branch {
            Branch::Coupled => reflect_coupled(&pk)?.r,
            Branch::Empty => reflect_empty(&pk).r,
        };
        *value *= r;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    Pulse::new(buf.into_iter().map(|s| s * scale).collect(), input.dt)
}
