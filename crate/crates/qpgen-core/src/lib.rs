//! Multiphoton pair-breaking rates in driven superconducting qubits.
//!
//! Floquet extended-space golden rule: build the time-periodic qubit Hamiltonian in a
//! charge basis, diagonalize its Floquet matrix, label dressed states and sum photon-
//! resolved pair-breaking rates weighted by BCS structure factors.
//!
//! Energies are frequencies in GHz (`E / h`), rates are in 1/s.

extern crate openblas_src;

pub mod circuits;
pub mod error;
pub mod floquet;
pub mod num;
pub mod rates;
pub mod scenarios;
pub mod specfn;

pub use error::{Error, Result};
pub use num::Real;

pub type Gap64 = specfn::Gap<f64>;
pub type TransmonParams64 = circuits::TransmonParams<f64>;
pub type SquidParams64 = circuits::SquidParams<f64>;
pub type FourierSeries64 = floquet::FourierSeries<f64>;
pub type FloquetProblem64 = floquet::FloquetProblem<f64>;
pub type FloquetSpectrum64 = floquet::FloquetSpectrum<f64>;
pub type QpEnvironment64 = rates::QpEnvironment<f64>;
pub type RateRow64 = rates::RateRow<f64>;
pub type RateTable64 = rates::RateTable<f64>;
pub type Lifetime64 = rates::Lifetime<f64>;
