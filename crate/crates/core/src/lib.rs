//! Floquet discriminants and instability intervals of the periodic system
//! `JY' + Q(z)Y = λY` with a Hermitian, π-periodic 2×2 potential `Q`.
//!
//! * [`pauli`]: 2×2 complex matrices and the Pauli basis.
//! * [`potential`]: channel-wise potentials, symmetry predicates, JSON files.
//! * [`propagator`]: fundamental matrix and its λ-derivative.
//! * [`floquet`]: discriminants, multipliers, stability, half-period identities.
//! * [`gauge`]: reduction to canonical form.
//! * [`spectrum`]: scans, boundary-value eigenvalues, gaps.
//! * [`verify`]: numerical checks of the periodicity/double-zero correspondences.
//! * [`cli`]: command-line front end.

pub mod cli;
pub mod floquet;
pub mod gauge;
pub mod pauli;
pub mod potential;
pub mod propagator;
pub mod spectrum;
pub mod verify;
