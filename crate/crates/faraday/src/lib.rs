//! Teleportation of multi-qubit atomic states through photonic Faraday
//! rotation in low-Q cavities.
//!
//! The crate is organized along the protocol:
//!
//! * [`hilbert`] — dense state vectors over labelled qubits: tensor
//!   products, gates, projective measurement, fidelity, entanglement
//!   entropy, Pauli strings.
//! * [`cavity`] — input-output reflection coefficients, Faraday phases and
//!   rotation angles, the conditional photon-atom phase gate, and pulse
//!   reflection through the frequency-domain transfer function.
//! * [`teleport`] — the full N-qubit protocol pipeline, a closed-form joint
//!   state oracle, exhaustive correction derivation, and lossy fidelity
//!   sweeps.
//! * [`tables`] — the published bipartite and tripartite correction tables
//!   and a verifier that replays every row against the simulation.
//! * [`resources`] — heralded success rates, implementation-time estimates,
//!   and a Monte Carlo model of photon loss.

pub mod cavity;
pub mod error;
pub mod hilbert;
pub mod resources;
pub mod tables;
pub mod teleport;

pub use error::{Error, Result};
