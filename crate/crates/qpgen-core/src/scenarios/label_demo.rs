use crate::circuits::{
    build_charge_operators, rabi_drive_fourier, to_eigenbasis, transmon_hamiltonian, ChargeBasis,
    ChargeBasisOperators, EigenbasisOperators, Sector, TransmonParams,
};
use crate::error::Result;
use crate::floquet::{label_sweep, FloquetProblem, LabelFlags, LabelOptions};

use super::{check_axis, Numerics};

/// Lab-frame charge-driven transmon, `H_q + Omega n cos(omega_d t)`.
#[derive(Debug, Clone)]
pub struct LabelDemo {
    pub params: TransmonParams<f64>,
    pub numerics: Numerics,
    pub omega_d: f64,
    pub ops: ChargeBasisOperators<f64>,
    pub eig: EigenbasisOperators<f64>,
    pub opts: LabelOptions<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelDemoRow {
    pub grid_index: usize,
    /// `Omega / 2 pi` in GHz.
    pub amplitude: f64,
    /// Eigenvector index chosen for the ground state.
    pub index: usize,
    /// `|<lambda|g, 0>|`.
    pub overlap: f64,
    /// Overlap with the previous point's choice.
    pub ref_overlap: f64,
    pub energy: f64,
    pub flags: LabelFlags,
}

impl LabelDemo {
    pub fn new(params: TransmonParams<f64>, numerics: Numerics, omega_d: f64) -> Result<Self> {
        numerics.validate()?;
        let be = ChargeBasis::new(Sector::Even, numerics.n_c)?;
        let ops = build_charge_operators::<f64>(be);
        let he = transmon_hamiltonian(&params, be);
        let ho = transmon_hamiltonian(&params, be.partner());
        let eig = to_eigenbasis(he.view(), &ops, ho.view(), numerics.d)?;
        Ok(LabelDemo { params, numerics, omega_d, ops, eig, opts: LabelOptions::default() })
    }

    pub fn problem(&self, amplitude: f64) -> Result<FloquetProblem<f64>> {
        let s = self.eig.rotate_even(&rabi_drive_fourier(&self.params, &self.ops, amplitude));
        Ok(FloquetProblem::new(s, self.omega_d, self.numerics.m_max)?.with_max_dim(self.numerics.max_dim))
    }

    /// Tracks `|g, 0>` over a fixed amplitude grid without refinement, so multiphoton
    /// resonances are crossed diabatically.
    pub fn run(&self, amplitudes: &[f64]) -> Result<Vec<LabelDemoRow>> {
        check_axis("amplitude", amplitudes)?;
        let problems = amplitudes.iter().map(|&a| self.problem(a)).collect::<Result<Vec<_>>>()?;
        let sweep = label_sweep(amplitudes, &problems, &[0], self.opts)?;
        Ok(sweep
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| LabelDemoRow {
                grid_index: i,
                amplitude: p.amplitude,
                index: p.labels.index[0],
                overlap: p.labels.bare_overlap[0],
                ref_overlap: p.labels.ref_overlap[0],
                energy: p.labels.energies[0],
                flags: p.labels.flags[0],
            })
            .collect())
    }
}

pub fn label_demo(params: TransmonParams<f64>, numerics: Numerics, omega_d: f64, amplitudes: &[f64]) -> Result<Vec<LabelDemoRow>> {
    LabelDemo::new(params, numerics, omega_d)?.run(amplitudes)
}
