//! Study drivers: charge-drive maps, constant-Stark cuts, readout sweeps, the flux-driven
//! SQUID sweep, the labeling demo and convergence audits. All `f64`.

pub mod convergence;
pub mod kapitza;
pub mod label_demo;
pub mod readout;
pub mod transmon;

use crate::error::{Error, Result};

pub use convergence::{convergence_audit, k_chain, m_chain, nc_chain, AuditPoint, AuditReport, AuditScenario, DRIFT_THRESHOLD};
pub use kapitza::{kapitza_point, kapitza_sweep, KapitzaPoint, EFFECTIVE_TERMS, KapitzaSetup, KapitzaState, WELL_STATES};
pub use label_demo::{label_demo, LabelDemo, LabelDemoRow};
pub use readout::{
    coupling_for_shift, dispersive_shift, readout_map, readout_map_with, readout_point, readout_sweep, solve_readout_coupling,
    ReadoutPoint, ReadoutSpec,
};
pub use transmon::{
    charge_drive_map, constant_stark_cut, AmplitudeTrack, DrivePoint, GridPoint, StarkCutPoint, StarkOptions, TransmonModel,
};

/// Truncation preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Reduced truncation for tests.
    Ci,
    Full,
}

impl std::str::FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ci" => Ok(Profile::Ci),
            "full" => Ok(Profile::Full),
            _ => Err(Error::Argument(format!("unknown profile {s:?} (expected ci or full)"))),
        }
    }
}

/// Truncation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Numerics {
    /// Charge cutoff: charges `-N_c ..= N_c` in each sector.
    pub n_c: usize,
    /// Static eigenstates kept.
    pub d: usize,
    pub m_max: usize,
    /// Harmonics kept in every Fourier series.
    pub k_max: usize,
    pub guard: usize,
    pub max_dim: usize,
}

impl Numerics {
    pub fn transmon(p: Profile) -> Self {
        match p {
            Profile::Ci => Numerics { n_c: 20, d: 12, m_max: 10, k_max: 10, guard: 5, max_dim: 2000 },
            Profile::Full => Numerics { n_c: 50, d: 20, m_max: 15, k_max: 12, guard: 5, max_dim: 2000 },
        }
    }

    pub fn readout(p: Profile) -> Self {
        match p {
            Profile::Ci => Self::transmon(p),
            Profile::Full => Numerics { d: 30, ..Self::transmon(p) },
        }
    }

    pub fn squid(p: Profile) -> Self {
        match p {
            Profile::Ci => Numerics { n_c: 30, d: 40, m_max: 20, k_max: 24, guard: 5, max_dim: 7100 },
            Profile::Full => Numerics { n_c: 60, d: 100, m_max: 35, k_max: 40, guard: 5, max_dim: 7100 },
        }
    }

    pub fn extended_dim(&self) -> usize {
        self.d * (2 * self.m_max + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_c == 0 || self.d == 0 || self.m_max == 0 {
            return Err(Error::Argument("N_c, d and M_max must be positive".into()));
        }
        if self.d > 2 * self.n_c + 1 {
            return Err(Error::Argument(format!(
                "d = {} exceeds the charge basis dimension {}",
                self.d,
                2 * self.n_c + 1
            )));
        }
        if self.extended_dim() > self.max_dim {
            return Err(Error::Resource(format!(
                "extended dimension {} exceeds cap {}",
                self.extended_dim(),
                self.max_dim
            )));
        }
        Ok(())
    }
}

/// Checks an axis is finite and strictly increasing.
pub fn check_axis(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Argument(format!("axis {name} is empty")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Argument(format!("axis {name} has non-finite values")));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument(format!("axis {name} must be strictly increasing")));
    }
    Ok(())
}

/// `n` evenly spaced values on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_fit_caps() {
        for p in [Profile::Ci, Profile::Full] {
            Numerics::transmon(p).validate().unwrap();
            Numerics::readout(p).validate().unwrap();
            Numerics::squid(p).validate().unwrap();
        }
        assert_eq!(Numerics::squid(Profile::Full).extended_dim(), 7100);
    }

    #[test]
    fn axes() {
        assert!(check_axis("x", &[1.0, 2.0]).is_ok());
        assert!(check_axis("x", &[1.0, 1.0]).is_err());
        assert!(check_axis("x", &[f64::NAN]).is_err());
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
