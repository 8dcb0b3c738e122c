//! Capacity of two toy quantum channels for classical information.
//!
//! * [`gaussian`]: a particle placed with a Gaussian wavefunction and measured
//!   after free evolution. The noise variance has a minimum at a finite
//!   preparation variance, so extra precision eventually hurts capacity.
//! * [`two_level`]: a two-level system with tunneling, measured after a delay.
//!   The induced binary channel, and its capacity, oscillate in time.
//!
//! [`info`] holds the entropy and capacity solvers, [`oracle`] the brute-force
//! numerical cross-checks, and [`verify`] the randomized verification suites.
//!
//! All numerics are generic over [`Real`]; the `*64` aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gaussian;
pub mod info;
pub mod oracle;
pub mod scalar;
pub mod two_level;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;
pub use units::{constants_for, Constants, UnitMode, HBAR_SI};

pub type Constants64 = units::Constants<f64>;
pub type GaussianPrep64 = gaussian::GaussianPrep<f64>;
pub type PowerBudget64 = gaussian::PowerBudget<f64>;
pub type Hamiltonian64 = two_level::TwoLevelHamiltonian<f64>;
pub type PrepBias64 = two_level::PrepBias<f64>;
pub type TwoLevelState64 = two_level::TwoLevelState<f64>;
pub type BinaryChannel64 = two_level::BinaryChannel<f64>;
pub type Distribution64 = info::Distribution<f64>;
pub type Dmc64 = info::Dmc<f64>;
pub type CapacityResult64 = info::CapacityResult<f64>;
pub type GridState64 = oracle::GridState<f64>;

pub type Constants32 = units::Constants<f32>;
pub type GaussianPrep32 = gaussian::GaussianPrep<f32>;
pub type Hamiltonian32 = two_level::TwoLevelHamiltonian<f32>;
pub type GridState32 = oracle::GridState<f32>;
