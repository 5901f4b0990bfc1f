//! Heralded success-rate and implementation-time model, plus a Monte Carlo
//! check that losses cost rate but never fidelity.
//!
//! A protocol round succeeds only when every photon is detected. Each photon
//! must survive one virtual-excitation decay chance per cavity pass (two
//! passes: Bob's cavity, then Alice's), be detected, and dodge all other
//! losses, so the per-round success probability is
//!
//! ```text
//! [(1 − atomic_failure)² · detector_efficiency · (1 − other_loss)]^n
//! ```
//!
//! Attempts are independent Bernoulli trials at the source rate, so the
//! expected implementation time is the mean geometric waiting time
//! `1 / (rate · sources · p)`.
//!
//! `detector_efficiency` is interpreted as the per-photon probability that
//! the detector fires, applied once per photon.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::{self, Write};
use std::ops::RangeInclusive;

use crate::cavity::{CavityParams, GateMode};
use crate::error::{Error, Result};
use crate::teleport::{run_protocol_rng, InputState};

/// Failure and inefficiency probabilities, and the photon source feeding the
/// protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    /// Probability that the virtual atomic excitation decays during one
    /// cavity pass (charged twice per photon).
    pub atomic_failure: f64,
    /// Per-photon probability that the detector fires.
    pub detector_efficiency: f64,
    /// All remaining per-photon loss (mirror absorption, fiber, ...).
    pub other_loss: f64,
    /// Single-photon source attempts per second.
    pub source_rate: f64,
    /// Independent sources running in parallel.
    pub parallel_sources: u32,
}

impl Default for LossModel {
    fn default() -> Self {
        LossModel {
            atomic_failure: 0.02,
            detector_efficiency: 1e-4,
            other_loss: 0.06,
            source_rate: 1e4,
            parallel_sources: 1,
        }
    }
}

impl LossModel {
    pub fn validated(self) -> Result<Self> {
        let probs = [
            ("atomic_failure", self.atomic_failure),
            ("detector_efficiency", self.detector_efficiency),
            ("other_loss", self.other_loss),
        ];
        for (name, value) in probs {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        if !self.source_rate.is_finite() || self.source_rate <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "source_rate must be positive, got {}",
                self.source_rate
            )));
        }
        if self.parallel_sources == 0 {
            return Err(Error::InvalidParams("parallel_sources must be at least 1".into()));
        }
        Ok(self)
    }

    /// Probability that one photon makes it through a full round.
    pub fn per_photon_success(&self) -> f64 {
        let survive = 1.0 - self.atomic_failure;
        survive * survive * self.detector_efficiency * (1.0 - self.other_loss)
    }
}

/// Probability that all n photons of one round are heralded.
pub fn success_probability(n: u32, m: &LossModel) -> f64 {
    m.per_photon_success().powi(n as i32)
}

/// Mean waiting time, in seconds, for the first successful n-qubit round.
pub fn expected_time(n: u32, m: &LossModel) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("expected_time needs n >= 1".into()));
    }
    let p = success_probability(n, m);
    if p <= 0.0 {
        return Err(Error::ZeroSuccessProbability);
    }
    Ok(1.0 / (m.source_rate * f64::from(m.parallel_sources) * p))
}

/// One grid point of the implementation-time table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure2Row {
    pub n: u32,
    pub eta: f64,
    pub seconds: f64,
}

/// Expected times over a grid of qubit counts and detector efficiencies,
/// ordered n-outer, η-inner.
pub fn figure2_table(
    n_range: RangeInclusive<u32>,
    etas: &[f64],
    m: &LossModel,
) -> Result<Vec<Figure2Row>> {
    if n_range.is_empty() || etas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut rows = Vec::new();
    for n in n_range {
        for &eta in etas {
            let model = LossModel { detector_efficiency: eta, ..*m }.validated()?;
            rows.push(Figure2Row { n, eta, seconds: expected_time(n, &model)? });
        }
    }
    Ok(rows)
}

/// Write the table as CSV with header `n,eta,seconds`, full double
/// precision, one row per grid point.
pub fn write_figure2_csv<W: Write>(rows: &[Figure2Row], mut out: W) -> io::Result<()> {
    writeln!(out, "n,eta,seconds")?;
    for row in rows {
        writeln!(out, "{},{},{}", row.n, row.eta, row.seconds)?;
    }
    Ok(())
}

/// Outcome of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCReport {
    pub trials: u64,
    pub successes: u64,
    pub empirical_rate: f64,
    /// Mean protocol fidelity over heralded rounds; `None` when nothing was
    /// heralded.
    pub conditional_fidelity: Option<f64>,
    pub seed: u64,
}

/// Simulate `trials` independent rounds: sample per-photon survival, and run
/// the full protocol (with a fresh random input and sampled outcome) on every
/// heralded round.
///
/// Trial k draws from an independent stream derived from (seed, k), so
/// results do not depend on execution order.
pub fn monte_carlo(
    n: u32,
    m: &LossModel,
    trials: u64,
    seed: u64,
    p: &CavityParams,
) -> Result<MCReport> {
    if n == 0 {
        return Err(Error::InvalidParams("monte_carlo needs n >= 1".into()));
    }
    if n as usize > crate::teleport::MAX_PROTOCOL_QUBITS {
        return Err(Error::ProtocolTooLarge(n as usize));
    }
    if trials == 0 {
        return Err(Error::InvalidParams("monte_carlo needs at least one trial".into()));
    }
    let m = m.validated()?;
    let mut successes = 0u64;
    let mut fidelity_sum = 0.0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut heralded = true;
        for _ in 0..n {
            let passes = rng.gen_bool(1.0 - m.atomic_failure)
                && rng.gen_bool(1.0 - m.atomic_failure)
                && rng.gen_bool(m.detector_efficiency)
                && rng.gen_bool(1.0 - m.other_loss);
            if !passes {
                heralded = false;
                break;
            }
        }
        if !heralded {
            continue;
        }
        successes += 1;
        let input = InputState::random(n as usize, &mut rng);
        let report = run_protocol_rng(&input, p, GateMode::Ideal, None, &mut rng)?;
        fidelity_sum += report.fidelity;
    }
    let conditional_fidelity = (successes > 0).then(|| fidelity_sum / successes as f64);
    Ok(MCReport {
        trials,
        successes,
        empirical_rate: successes as f64 / trials as f64,
        conditional_fidelity,
        seed,
    })
}
