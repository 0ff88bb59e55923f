//! Complete sets of mutually unbiased bases for qubit registers.
//!
//! A single unitary `U_m = w^t 2^(-m/2) H^{(x)m} P_m` cycles through all
//! `2^m + 1` mutually unbiased bases of an `m`-qubit register: the columns of
//! `U, U^2, ..., U^(2^m+1) = I` are the bases. `P_m` is a diagonal of fourth
//! roots of unity determined by a symmetric GF(2) matrix `B_m`, which also
//! reads directly as a circuit of one `Phase` gate and `m - 1` `CPhase` gates.
//!
//! Modules, bottom-up:
//!
//! * [`gf2`]: the matrices `B_m` (seed, doubling, tripling).
//! * [`phase`]: phase vectors, Sylvester matrices, `V_m`, traces, exact `U_m`.
//! * [`exact`]: Gaussian-integer matrices with tracked scale and phase.
//! * [`verify`]: exact, float and sampled checks of the basis cycle.
//! * [`circuit`]: gate netlists, the `mubcirc v1` text format, evaluation.
//! * [`fast`]: `O(2^m m)` application of `U_m` to state vectors.
//! * [`tomography`]: state estimation from simulated measurements in all bases.
//! * [`cli`]: the `mubs` command-line front end.

pub mod circuit;
pub mod cli;
pub mod exact;
pub mod fast;
pub mod gf2;
pub mod phase;
pub mod roots;
pub mod tomography;
pub mod verify;

pub use exact::{ExactScaledMatrix, GaussianInt};
pub use gf2::BMatrix;
pub use phase::{BitIndex, Generator, PhaseVector, UnitEntryMatrix};
pub use roots::{EighthRoot, Mod4Exponent};
