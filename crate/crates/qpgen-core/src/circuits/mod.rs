//! Charge-basis operator algebra and circuit Hamiltonians.

pub mod basis;
pub mod drive;
pub mod eigenbasis;
pub mod squid;
pub mod transmon;

pub use basis::{build_charge_operators, ChargeBasis, ChargeBasisOperators, Sector};
pub use drive::cos_sin_coefficients;
pub use eigenbasis::{to_eigenbasis, EigenbasisOperators};
pub use squid::{
    effective_hamiltonian_kapitza, effective_potential, kapitza_coefficients, squid_drive_fourier,
    JunctionSeries, SquidParams, SquidSeries,
};
pub use transmon::{
    charging_term, half_angle_series, rabi_drive_fourier, transmon_drive_fourier, transmon_hamiltonian,
    transmon_transition_series, TransmonParams,
};
