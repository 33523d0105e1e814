//! Exact statevector simulation of subsystem U(1) symmetry breaking.
//!
//! The crate covers two dynamical settings on a periodic spin-1/2 chain:
//!
//! - quenches of tilted product states under an anisotropic XYZ-type
//!   Hamiltonian whose `γ ≠ 1` part breaks the total-`σ^z` U(1) symmetry
//!   ([`hamiltonian`], [`evolution`]);
//! - brick-wall random circuits doped with fully Haar-random two-qubit gates
//!   among charge-conserving block gates ([`circuit`]).
//!
//! Both feed the measurements in [`observables`] (entanglement asymmetry with
//! U(1) or Z2 probes, charge moments, the charge-sector distribution), and the
//! resulting time series are reduced by [`analysis`]. Closed-form results that
//! serve as independent checks live in [`oracles`].
//!
//! # Conventions
//!
//! Site `k` is bit `k` of a basis index, with site 0 the least significant
//! bit. The bit value 0 is spin up, the `+1` eigenstate of `σ^z`, so the
//! all-zeros basis state carries total charge `+L`.

pub mod analysis;
pub mod circuit;
mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod linalg;
pub mod observables;
pub mod oracles;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use analysis::TimeSeries;
pub use hamiltonian::{HamiltonianParams, PauliSum};
pub use observables::{Probe, Symmetry};
pub use state::{Pattern, ProductStateSpec, Region, StateVector};
