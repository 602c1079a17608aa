//! Physical parameter records for a driven three-level atom.
//!
//! Rates and frequencies are in angular units of the caller's choosing; all
//! presets and tests use Γ = 1.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for closure (Γ = Γ₁ + Γ₂) and for Γ₁₃ = Γ₂₃ checks.
pub const RATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomParams {
    /// Total decay rate Γ of level 3.
    pub gamma_total: f64,
    /// Branching rate Γ₁ (3 → 1).
    pub gamma_1: f64,
    /// Branching rate Γ₂ (3 → 2 for Λ, 2 → 3 for a ladder).
    pub gamma_2: f64,
    /// Asserts that no population leaves the three levels.
    pub closed: bool,
}

impl AtomParams {
    /// Closed Λ atom with Γ = Γ₁ + Γ₂.
    pub fn closed_lambda(gamma_1: f64, gamma_2: f64) -> Self {
        Self { gamma_total: gamma_1 + gamma_2, gamma_1, gamma_2, closed: true }
    }

    /// Closed ladder atom: level 3 decays only to 1, so Γ = Γ₁.
    pub fn closed_ladder(gamma_1: f64, gamma_2: f64) -> Self {
        Self { gamma_total: gamma_1, gamma_1, gamma_2, closed: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserDrive {
    /// Probe Rabi frequency Ω₁ (1 ↔ 3).
    pub omega_1: f64,
    /// Pump Rabi frequency Ω₂ (2 ↔ 3).
    pub omega_2: f64,
    /// Probe detuning Δ₁ = ω_L1 − ω₃₁.
    pub delta_1: f64,
    /// Pump detuning Δ₂ = ω_L2 − ω₃₂.
    pub delta_2: f64,
    /// Probe linewidth γ₁.
    #[serde(default)]
    pub linewidth_1: f64,
    /// Pump linewidth γ₂.
    #[serde(default)]
    pub linewidth_2: f64,
}

impl LaserDrive {
    /// Two-photon (Raman) detuning δ = Δ₁ − Δ₂.
    pub fn two_photon_detuning(&self) -> f64 {
        self.delta_1 - self.delta_2
    }

    /// Both lasers with the same linewidth γ₁ = γ₂ = `linewidth`.
    pub fn new(omega_1: f64, omega_2: f64, delta_1: f64, delta_2: f64, linewidth: f64) -> Self {
        Self { omega_1, omega_2, delta_1, delta_2, linewidth_1: linewidth, linewidth_2: linewidth }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    #[default]
    Lambda,
    Ladder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoherenceMode {
    /// Rates follow from the laser linewidths of a Λ system.
    #[default]
    DerivedLambda,
    /// Rates follow from the laser linewidths of a ladder system.
    DerivedLadder,
    /// Rates are taken as given.
    Explicit,
}

/// Decay rates of the three optical and Raman coherences.
///
/// In derived modes the numeric fields are overwritten during validation, so
/// a JSON config may omit them.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceModel {
    /// Γ₁₃, decay of ρ₁₃.
    #[serde(default)]
    pub gamma_13: f64,
    /// Γ₂₃, decay of ρ₂₃.
    #[serde(default)]
    pub gamma_23: f64,
    /// γ ≡ Γ₁₂, decay of the ground-state coherence ρ₁₂.
    #[serde(default)]
    pub gamma_12: f64,
    /// α = 2Γ₁₃/Γ; recomputed by validation.
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub mode: CoherenceMode,
}

impl CoherenceModel {
    pub fn derived(topology: Topology) -> Self {
        let mode = match topology {
            Topology::Lambda => CoherenceMode::DerivedLambda,
            Topology::Ladder => CoherenceMode::DerivedLadder,
        };
        Self { mode, ..Self::default() }
    }

    pub fn explicit(gamma_13: f64, gamma_23: f64, gamma_12: f64) -> Self {
        Self { gamma_13, gamma_23, gamma_12, alpha: 0.0, mode: CoherenceMode::Explicit }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub atom: AtomParams,
    pub drive: LaserDrive,
    #[serde(default)]
    pub coherence: CoherenceModel,
    #[serde(default)]
    pub topology: Topology,
}

impl SystemConfig {
    /// Λ system whose coherence rates are derived from the laser linewidths.
    pub fn lambda(atom: AtomParams, drive: LaserDrive) -> Self {
        Self { atom, drive, coherence: CoherenceModel::derived(Topology::Lambda), topology: Topology::Lambda }
    }

    /// Ladder system whose coherence rates are derived from the laser linewidths.
    pub fn ladder(atom: AtomParams, drive: LaserDrive) -> Self {
        Self { atom, drive, coherence: CoherenceModel::derived(Topology::Ladder), topology: Topology::Ladder }
    }

    pub fn with_coherence(mut self, coherence: CoherenceModel) -> Self {
        self.coherence = coherence;
        self
    }

    pub fn validate(self) -> Result<ValidatedConfig, ConfigError> {
        validate_config(self)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("cannot parse configuration: {0}")]
    Parse(String),
}

impl ConfigError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ConfigError::Invalid(v) => v,
            ConfigError::Parse(_) => &[],
        }
    }

    /// True if some violation mentions `needle` in its rendered form.
    pub fn mentions(&self, needle: &str) -> bool {
        self.to_string().contains(needle)
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ")
}

/// A configuration whose invariants have been checked and whose derived
/// coherence rates and α are filled in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValidatedConfig(SystemConfig);

impl ValidatedConfig {
    pub fn atom(&self) -> &AtomParams {
        &self.0.atom
    }

    pub fn drive(&self) -> &LaserDrive {
        &self.0.drive
    }

    pub fn coherence(&self) -> &CoherenceModel {
        &self.0.coherence
    }

    pub fn topology(&self) -> Topology {
        self.0.topology
    }

    pub fn config(&self) -> &SystemConfig {
        &self.0
    }

    pub fn into_inner(self) -> SystemConfig {
        self.0
    }

    /// Ground-state coherence decay γ.
    pub fn gamma(&self) -> f64 {
        self.0.coherence.gamma_12
    }

    pub fn alpha(&self) -> f64 {
        self.0.coherence.alpha
    }

    /// True when Γ₁₃ and Γ₂₃ agree to [`RATE_TOLERANCE`]·Γ.
    pub fn has_equal_optical_coherence(&self) -> bool {
        let c = &self.0.coherence;
        (c.gamma_13 - c.gamma_23).abs() <= RATE_TOLERANCE * self.0.atom.gamma_total.max(f64::MIN_POSITIVE)
    }

    /// Revalidates after editing the drive; derived rates follow the edit.
    pub fn with_drive(&self, edit: impl FnOnce(&mut LaserDrive)) -> Result<Self, ConfigError> {
        let mut cfg = self.0;
        edit(&mut cfg.drive);
        validate_config(cfg)
    }

    pub fn with_detunings(&self, delta_1: f64, delta_2: f64) -> Result<Self, ConfigError> {
        self.with_drive(|d| {
            d.delta_1 = delta_1;
            d.delta_2 = delta_2;
        })
    }

    pub fn with_omegas(&self, omega_1: f64, omega_2: f64) -> Result<Self, ConfigError> {
        self.with_drive(|d| {
            d.omega_1 = omega_1;
            d.omega_2 = omega_2;
        })
    }
}

fn check_rate(v: &mut Vec<Violation>, field: &'static str, x: f64) {
    if x.is_nan() || x.is_infinite() {
        v.push(Violation { field, message: "not finite".into() });
    } else if x < 0.0 {
        v.push(Violation { field, message: "negative".into() });
    }
}

fn check_finite(v: &mut Vec<Violation>, field: &'static str, x: f64) {
    if !x.is_finite() {
        v.push(Violation { field, message: "not finite".into() });
    }
}

fn atom_violations(atom: &AtomParams, topology: Topology) -> Vec<Violation> {
    let mut v = Vec::new();
    check_rate(&mut v, "gamma_total", atom.gamma_total);
    check_rate(&mut v, "gamma_1", atom.gamma_1);
    check_rate(&mut v, "gamma_2", atom.gamma_2);
    if !v.is_empty() {
        return v;
    }
    // Population leaving level 3 towards 1 and 2 cannot exceed the total.
    let branched = match topology {
        Topology::Lambda => atom.gamma_1 + atom.gamma_2,
        Topology::Ladder => atom.gamma_1,
    };
    let tol = RATE_TOLERANCE * atom.gamma_total.max(branched);
    if branched - atom.gamma_total > tol {
        v.push(Violation { field: "gamma_total", message: "branching exceeds total".into() });
    } else if atom.closed && atom.gamma_total - branched > tol {
        v.push(Violation { field: "gamma_total", message: "branching falls short of total for a closed atom".into() });
    }
    v
}

fn drive_violations(drive: &LaserDrive) -> Vec<Violation> {
    let mut v = Vec::new();
    check_rate(&mut v, "omega_1", drive.omega_1);
    check_rate(&mut v, "omega_2", drive.omega_2);
    check_finite(&mut v, "delta_1", drive.delta_1);
    check_finite(&mut v, "delta_2", drive.delta_2);
    check_rate(&mut v, "linewidth_1", drive.linewidth_1);
    check_rate(&mut v, "linewidth_2", drive.linewidth_2);
    v
}

/// Coherence decay rates implied by the laser linewidths.
///
/// For a Λ system each optical coherence picks up the linewidth of its own
/// laser and the Raman coherence the mean of both. In a ladder the decay of
/// level 2 adds to Γ₂₃ and γ.
pub fn derive_coherence_rates(
    atom: &AtomParams,
    drive: &LaserDrive,
    topology: Topology,
) -> Result<CoherenceModel, ConfigError> {
    let mut v = atom_violations(atom, topology);
    v.extend(drive_violations(drive));
    if !v.is_empty() {
        return Err(ConfigError::Invalid(v));
    }
    Ok(derived_unchecked(atom, drive, topology))
}

fn derived_unchecked(atom: &AtomParams, drive: &LaserDrive, topology: Topology) -> CoherenceModel {
    let g = atom.gamma_total;
    let (g1, g2) = (drive.linewidth_1, drive.linewidth_2);
    let (gamma_13, gamma_23, gamma_12, mode) = match topology {
        Topology::Lambda => ((g + g1) / 2.0, (g + g2) / 2.0, (g1 + g2) / 2.0, CoherenceMode::DerivedLambda),
        Topology::Ladder => (
            (g + g1) / 2.0,
            (g + atom.gamma_2 + g2) / 2.0,
            (atom.gamma_2 + g1 + g2) / 2.0,
            CoherenceMode::DerivedLadder,
        ),
    };
    CoherenceModel { gamma_13, gamma_23, gamma_12, alpha: alpha_of(gamma_13, g), mode }
}

fn alpha_of(gamma_13: f64, gamma_total: f64) -> f64 {
    if gamma_total > 0.0 {
        2.0 * gamma_13 / gamma_total
    } else {
        0.0
    }
}

/// Checks every invariant and fills in derived coherence rates and α.
///
/// All violations are collected rather than stopping at the first.
pub fn validate_config(cfg: SystemConfig) -> Result<ValidatedConfig, ConfigError> {
    let mut v = atom_violations(&cfg.atom, cfg.topology);
    v.extend(drive_violations(&cfg.drive));

    let mode_matches = match (cfg.coherence.mode, cfg.topology) {
        (CoherenceMode::DerivedLambda, Topology::Ladder) | (CoherenceMode::DerivedLadder, Topology::Lambda) => false,
        _ => true,
    };
    if !mode_matches {
        v.push(Violation { field: "mode", message: "derived mode does not match topology".into() });
    }
    if cfg.coherence.mode == CoherenceMode::Explicit {
        check_rate(&mut v, "gamma_13", cfg.coherence.gamma_13);
        check_rate(&mut v, "gamma_23", cfg.coherence.gamma_23);
        check_rate(&mut v, "gamma_12", cfg.coherence.gamma_12);
    }
    if !v.is_empty() {
        return Err(ConfigError::Invalid(v));
    }

    let coherence = match cfg.coherence.mode {
        CoherenceMode::Explicit => {
            let c = cfg.coherence;
            CoherenceModel { alpha: alpha_of(c.gamma_13, cfg.atom.gamma_total), ..c }
        }
        _ => derived_unchecked(&cfg.atom, &cfg.drive, cfg.topology),
    };
    Ok(ValidatedConfig(SystemConfig { coherence, ..cfg }))
}
