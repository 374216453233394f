//! Run configuration: JSON in, validated and resolved before any compute.

use std::path::{Path, PathBuf};

use qpgen_core::circuits::{SquidParams, TransmonParams};
use qpgen_core::floquet::LabelOptions;
use qpgen_core::rates::QpEnvironment;
use qpgen_core::scenarios::{check_axis, linspace, Numerics, Profile};
use qpgen_core::specfn::Gap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileName>,
    #[serde(default)]
    pub environment: EnvironmentConfig,
    #[serde(default)]
    pub numerics: NumericsOverride,
    #[serde(default)]
    pub labeling: LabelingConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Ci,
    Full,
}

impl From<ProfileName> for Profile {
    fn from(p: ProfileName) -> Self {
        match p {
            ProfileName::Ci => Profile::Ci,
            ProfileName::Full => Profile::Full,
        }
    }
}

impl ProfileName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileName::Ci => "ci",
            ProfileName::Full => "full",
        }
    }
}

/// Either an explicit list or `points` evenly spaced values on `[start, stop]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range(AxisRange),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn values(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let v = match self {
            Axis::List(v) => v.clone(),
            Axis::Range(r) => {
                if r.points == 0 {
                    return Err(CliError::validation(format!("axis {name}: points must be positive")));
                }
                linspace(r.start, r.stop, r.points)
            }
        };
        check_axis(name, &v)?;
        Ok(v)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonConfig {
    pub ej: f64,
    pub ec: f64,
    #[serde(default)]
    pub ng: f64,
}

impl TransmonConfig {
    pub fn params(&self) -> Result<TransmonParams<f64>, CliError> {
        Ok(TransmonParams::new(self.ej, self.ec, self.ng)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquidConfig {
    pub ej1: f64,
    pub ej2: f64,
    pub ec: f64,
    #[serde(default)]
    pub ng: f64,
    #[serde(default = "half")]
    pub c1: f64,
    #[serde(default = "half")]
    pub c2: f64,
}

fn half() -> f64 {
    0.5
}

impl SquidConfig {
    pub fn params(&self) -> Result<SquidParams<f64>, CliError> {
        Ok(SquidParams::new(self.ej1, self.ej2, self.ec, self.ng, self.c1, self.c2)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    /// Rates on a drive frequency by amplitude grid.
    TransmonMap {
        circuit: TransmonConfig,
        omega_d_ghz: Axis,
        /// Lab-frame amplitude `Omega / 2 pi` in GHz.
        amplitude_ghz: Axis,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        final_states: Option<usize>,
    },
    /// Rates along a line of constant ac-Stark shift.
    StarkCut {
        circuit: TransmonConfig,
        omega_d_ghz: Axis,
        #[serde(default = "default_stark_mhz")]
        stark_shift_mhz: f64,
        #[serde(default = "default_stark_tol_khz")]
        tolerance_khz: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        final_states: Option<usize>,
    },
    /// Resonantly driven readout resonator at fixed dispersive shift.
    Readout {
        ej: f64,
        ec: f64,
        #[serde(default = "default_ngs")]
        ng: Axis,
        omega_r_ghz: Axis,
        #[serde(default = "default_chi_mhz")]
        chi_mhz: f64,
        nbar: Axis,
    },
    /// Flux-driven symmetric SQUID, four well states.
    Kapitza {
        circuit: SquidConfig,
        omega_d_ghz: f64,
        /// Flux amplitude `phi_ac / 2 pi`.
        phi_ac_turns: Axis,
    },
    StructureFactors {
        #[serde(default = "default_sf_axis")]
        f_ghz: Axis,
        #[serde(default = "default_quad_tol")]
        quadrature_tol: f64,
    },
    Potential {
        circuit: SquidConfig,
        omega_d_ghz: f64,
        phi_ac_turns: Axis,
        #[serde(default = "default_phi_points")]
        phi_points: usize,
        /// Also emit `U / E_J,2phi`.
        #[serde(default)]
        normalize: bool,
    },
    LabelDemo {
        circuit: TransmonConfig,
        omega_d_ghz: f64,
        amplitude_ghz: Axis,
    },
    Converge {
        point: AuditPointConfig,
        #[serde(default)]
        m_max: Vec<usize>,
        #[serde(default)]
        n_c: Vec<usize>,
        #[serde(default)]
        k_max: Vec<usize>,
        #[serde(default = "default_drift")]
        threshold: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AuditPointConfig {
    Transmon {
        circuit: TransmonConfig,
        omega_d_ghz: f64,
        amplitude_ghz: f64,
        #[serde(default = "default_ladder")]
        ladder: usize,
    },
    Kapitza {
        circuit: SquidConfig,
        omega_d_ghz: f64,
        phi_ac_turns: f64,
    },
}

fn default_stark_mhz() -> f64 {
    3.0
}
fn default_stark_tol_khz() -> f64 {
    1.0
}
fn default_ngs() -> Axis {
    Axis::List(vec![0.0, 0.1, 0.25, 0.4, 0.5])
}
fn default_chi_mhz() -> f64 {
    1.0
}
fn default_sf_axis() -> Axis {
    Axis::Range(AxisRange { start: 0.0, stop: 300.0, points: 301 })
}
fn default_quad_tol() -> f64 {
    1e-10
}
fn default_phi_points() -> usize {
    361
}
fn default_drift() -> f64 {
    qpgen_core::scenarios::DRIFT_THRESHOLD
}
fn default_ladder() -> usize {
    4
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::TransmonMap { .. } => "transmon_map",
            Scenario::StarkCut { .. } => "stark_cut",
            Scenario::Readout { .. } => "readout",
            Scenario::Kapitza { .. } => "kapitza",
            Scenario::StructureFactors { .. } => "structure_factors",
            Scenario::Potential { .. } => "potential",
            Scenario::LabelDemo { .. } => "label_demo",
            Scenario::Converge { .. } => "converge",
        }
    }

    fn is_squid(&self) -> bool {
        matches!(
            self,
            Scenario::Kapitza { .. }
                | Scenario::Potential { .. }
                | Scenario::Converge { point: AuditPointConfig::Kapitza { .. }, .. }
        )
    }

    fn is_readout(&self) -> bool {
        matches!(self, Scenario::Readout { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    #[serde(default = "default_gap")]
    pub gap_ghz: f64,
    #[serde(default = "default_ncp")]
    pub n_cp: f64,
    #[serde(default = "default_cr")]
    pub c_r_per_s: f64,
}

fn default_gap() -> f64 {
    45.0
}
fn default_ncp() -> f64 {
    2e6
}
fn default_cr() -> f64 {
    1.0 / 120e-9
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        EnvironmentConfig { gap_ghz: default_gap(), n_cp: default_ncp(), c_r_per_s: default_cr() }
    }
}

impl EnvironmentConfig {
    pub fn build(&self) -> Result<QpEnvironment<f64>, CliError> {
        if !(self.n_cp > 0.0) || !(self.c_r_per_s > 0.0) {
            return Err(CliError::validation("environment: n_cp and c_r_per_s must be positive"));
        }
        Ok(QpEnvironment { gap: Gap::new(self.gap_ghz)?, n_cp: self.n_cp, c_r: self.c_r_per_s })
    }
}

/// Per-field overrides of the profile truncation.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_c: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
}

impl NumericsOverride {
    fn apply(&self, mut n: Numerics) -> Numerics {
        n.n_c = self.n_c.unwrap_or(n.n_c);
        n.d = self.d.unwrap_or(n.d);
        n.m_max = self.m_max.unwrap_or(n.m_max);
        n.k_max = self.k_max.unwrap_or(n.k_max);
        n.guard = self.guard.unwrap_or(n.guard);
        n.max_dim = self.max_dim.unwrap_or(n.max_dim);
        n
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingConfig {
    #[serde(default = "default_restart")]
    pub restart_threshold: f64,
    #[serde(default = "default_ambiguity")]
    pub ambiguity: f64,
    #[serde(default = "default_step_change")]
    pub max_step_change: f64,
    #[serde(default = "default_depth")]
    pub max_refine_depth: usize,
}

fn default_restart() -> f64 {
    0.5
}
fn default_ambiguity() -> f64 {
    1e-3
}
fn default_step_change() -> f64 {
    0.3
}
fn default_depth() -> usize {
    6
}

impl Default for LabelingConfig {
    fn default() -> Self {
        LabelingConfig {
            restart_threshold: default_restart(),
            ambiguity: default_ambiguity(),
            max_step_change: default_step_change(),
            max_refine_depth: default_depth(),
        }
    }
}

impl LabelingConfig {
    pub fn build(&self) -> Result<LabelOptions<f64>, CliError> {
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        if !unit(self.restart_threshold) || !unit(self.max_step_change) || !(self.ambiguity >= 0.0) {
            return Err(CliError::validation(
                "labeling: restart_threshold and max_step_change must lie in (0, 1], ambiguity >= 0",
            ));
        }
        Ok(LabelOptions {
            restart_threshold: self.restart_threshold,
            ambiguity: self.ambiguity,
            max_step_change: self.max_step_change,
            max_refine_depth: self.max_refine_depth,
        })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// File stem; defaults to the scenario name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

/// A config after profile and command-line overrides.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub profile: ProfileName,
    pub numerics: Numerics,
    pub env: QpEnvironment<f64>,
    pub labels: LabelOptions<f64>,
    pub out_dir: PathBuf,
    pub stem: String,
    pub hash: String,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::validation(format!("invalid config: {e}")))
}

/// Hashed content: everything that affects the numbers, in canonical field order.
#[derive(Serialize)]
struct HashInput<'a> {
    scenario: &'a Scenario,
    profile: &'a str,
    environment: &'a EnvironmentConfig,
    numerics: [usize; 6],
    labeling: &'a LabelingConfig,
}

pub fn resolve(config: RunConfig, profile: Option<ProfileName>, out: Option<PathBuf>) -> Result<Resolved, CliError> {
    let profile = profile.or(config.profile).unwrap_or(ProfileName::Ci);
    let p: Profile = profile.into();
    let base = if config.scenario.is_squid() {
        Numerics::squid(p)
    } else if config.scenario.is_readout() {
        Numerics::readout(p)
    } else {
        Numerics::transmon(p)
    };
    let numerics = config.numerics.apply(base);
    if !matches!(config.scenario, Scenario::StructureFactors { .. } | Scenario::Converge { .. }) {
        numerics.validate()?;
    }
    let env = config.environment.build()?;
    let labels = config.labeling.build()?;
    validate_scenario(&config.scenario)?;

    let n = numerics;
    let input = HashInput {
        scenario: &config.scenario,
        profile: profile.as_str(),
        environment: &config.environment,
        numerics: [n.n_c, n.d, n.m_max, n.k_max, n.guard, n.max_dim],
        labeling: &config.labeling,
    };
    let canonical = serde_json::to_vec(&input).expect("config serializes");
    let hash = format!("{:x}", Sha256::digest(&canonical));

    let out_dir = out.or_else(|| config.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let stem = config.output.stem.clone().unwrap_or_else(|| config.scenario.name().to_string());
    if stem.is_empty() || stem.contains(['/', '\\']) {
        return Err(CliError::validation(format!("output stem {stem:?} must be a plain file name")));
    }
    Ok(Resolved { config, profile, numerics, env, labels, out_dir, stem, hash })
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(CliError::validation(format!("{name} must be finite and positive, got {x}")))
    }
}

fn validate_scenario(s: &Scenario) -> Result<(), CliError> {
    match s {
        Scenario::TransmonMap { circuit, omega_d_ghz, amplitude_ghz, .. } => {
            circuit.params()?;
            omega_d_ghz.values("omega_d_ghz")?;
            amplitude_ghz.values("amplitude_ghz")?;
        }
        Scenario::StarkCut { circuit, omega_d_ghz, stark_shift_mhz, tolerance_khz, .. } => {
            circuit.params()?;
            omega_d_ghz.values("omega_d_ghz")?;
            positive("stark_shift_mhz", *stark_shift_mhz)?;
            positive("tolerance_khz", *tolerance_khz)?;
        }
        Scenario::Readout { ej, ec, ng, omega_r_ghz, chi_mhz, nbar } => {
            for g in ng.values("ng")? {
                TransmonParams::new(*ej, *ec, g)?;
            }
            omega_r_ghz.values("omega_r_ghz")?;
            positive("chi_mhz", *chi_mhz)?;
            if nbar.values("nbar")?[0] < 0.0 {
                return Err(CliError::validation("nbar must be nonnegative"));
            }
        }
        Scenario::Kapitza { circuit, omega_d_ghz, phi_ac_turns } => {
            let p = circuit.params()?;
            if !p.is_symmetric() || p.ng != 0.0 {
                return Err(CliError::validation("kapitza scenario needs a symmetric SQUID (E_J1 = E_J2, c1 = c2) at n_g = 0"));
            }
            positive("omega_d_ghz", *omega_d_ghz)?;
            phi_ac_turns.values("phi_ac_turns")?;
        }
        Scenario::StructureFactors { f_ghz, quadrature_tol } => {
            f_ghz.values("f_ghz")?;
            positive("quadrature_tol", *quadrature_tol)?;
        }
        Scenario::Potential { circuit, omega_d_ghz, phi_ac_turns, phi_points, .. } => {
            circuit.params()?;
            positive("omega_d_ghz", *omega_d_ghz)?;
            phi_ac_turns.values("phi_ac_turns")?;
            if *phi_points < 2 {
                return Err(CliError::validation("phi_points must be at least 2"));
            }
        }
        Scenario::LabelDemo { circuit, omega_d_ghz, amplitude_ghz } => {
            circuit.params()?;
            positive("omega_d_ghz", *omega_d_ghz)?;
            amplitude_ghz.values("amplitude_ghz")?;
        }
        Scenario::Converge { point, m_max, n_c, k_max, threshold } => {
            match point {
                AuditPointConfig::Transmon { circuit, omega_d_ghz, amplitude_ghz, .. } => {
                    circuit.params()?;
                    positive("omega_d_ghz", *omega_d_ghz)?;
                    if !(*amplitude_ghz >= 0.0) {
                        return Err(CliError::validation("amplitude_ghz must be nonnegative"));
                    }
                }
                AuditPointConfig::Kapitza { circuit, omega_d_ghz, .. } => {
                    circuit.params()?;
                    positive("omega_d_ghz", *omega_d_ghz)?;
                }
            }
            if m_max.is_empty() && n_c.is_empty() && k_max.is_empty() {
                return Err(CliError::validation("converge: give at least one of m_max, n_c, k_max"));
            }
            positive("threshold", *threshold)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAP: &str = r#"{
        "scenario": {"transmon_map": {
            "circuit": {"ej": 3.025, "ec": 0.056},
            "omega_d_ghz": {"start": 30, "stop": 60, "points": 4},
            "amplitude_ghz": [1.0, 2.0]
        }}
    }"#;

    #[test]
    fn parses_and_hashes() {
        let r = resolve(parse(MAP).unwrap(), None, None).unwrap();
        assert_eq!(r.profile, ProfileName::Ci);
        assert_eq!(r.stem, "transmon_map");
        assert_eq!(r.hash.len(), 64);
        let again = resolve(parse(MAP).unwrap(), None, Some("elsewhere".into())).unwrap();
        assert_eq!(r.hash, again.hash);
        let full = resolve(parse(MAP).unwrap(), Some(ProfileName::Full), None).unwrap();
        assert_ne!(r.hash, full.hash);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = MAP.replace("\"ec\"", "\"e_c\"");
        assert!(parse(&bad).is_err());
        let bad = MAP.replacen('{', r#"{"colour": 1,"#, 1);
        assert!(parse(&bad).is_err());
    }

    #[test]
    fn flux_split_constraint() {
        let cfg = r#"{"scenario": {"potential": {
            "circuit": {"ej1": 81.6, "ej2": 81.6, "ec": 0.01, "c1": 0.5, "c2": 0.6},
            "omega_d_ghz": 10, "phi_ac_turns": [0.0]}}}"#;
        let e = resolve(parse(cfg).unwrap(), None, None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("c1 + c2 = 1"));
    }
}
