//! Parameter presets and data for the standard figures: the EIT absorption
//! profile (2), the resonant manifolds (3), the ratio surface (6) and the
//! cooling surface (7).

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analytic::{rho33_exact, two_level_profile, AnalyticError};
use crate::cooling::{scan_cooling, CoolingError, CoolingParams};
use crate::discrim::{format_float, scan_surface, DiscrimError, DiscriminationScenario, GridSpec, Param, ProbeTuning, SpectralScan};
use crate::numerics::spaced;
use crate::params::{AtomParams, ConfigError, LaserDrive, SystemConfig, ValidatedConfig};

pub const FIG2_LINEWIDTHS: [f64; 3] = [0.0, 0.05, 0.1];
pub const FIG3_COUPLING: f64 = std::f64::consts::SQRT_2;
pub const SURFACE_Z: f64 = 0.2;
pub const SURFACE_GAMMA: f64 = 1e-3;
pub const SURFACE_OMEGA_1: f64 = 1e-3;
pub const COOLING_ETA: f64 = 0.05;

/// Curves sampled on a shared abscissa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: serde_json::Value,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.metadata.to_string().as_bytes()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# quantity={} config_sha256={}\n", self.name, self.config_hash());
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Closed Λ atom with Γ₁ = Γ₂ = Γ/2 and both lasers of linewidth `gamma`,
/// so that Γ₁₃ = Γ₂₃ = (Γ + γ)/2.
pub fn symmetric_lambda(o1: f64, o2: f64, d1: f64, d2: f64, gamma: f64) -> Result<ValidatedConfig, ConfigError> {
    SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::new(o1, o2, d1, d2, gamma)).validate()
}

/// Fig. 2 configuration: Ω₁ = 0.1, Ω₂ = 1, Δ₂ = 3 at Raman detuning δ.
pub fn fig2_config(gamma: f64, delta: f64) -> Result<ValidatedConfig, ConfigError> {
    symmetric_lambda(0.1, 1.0, 3.0 + delta, 3.0, gamma)
}

/// ρ₃₃ against δ ∈ [−1.5, 1.5] for each linewidth in [`FIG2_LINEWIDTHS`].
pub fn figure2(n: usize) -> Result<Table, AnalyticError> {
    let mut rows = Vec::with_capacity(n);
    for delta in spaced(-1.5, 1.5, n, false) {
        let mut row = vec![delta];
        for gamma in FIG2_LINEWIDTHS {
            let cfg = fig2_config(gamma, delta).map_err(|_| AnalyticError::Precondition("invalid preset"))?;
            row.push(rho33_exact(&cfg)?);
        }
        rows.push(row);
    }
    Ok(Table {
        name: "figure2".into(),
        columns: vec!["delta".into(), "rho33_gamma_0".into(), "rho33_gamma_0.05".into(), "rho33_gamma_0.1".into()],
        rows,
        metadata: serde_json::json!({
            "omega_1": 0.1, "omega_2": 1.0, "delta_2": 3.0, "gamma_1": 0.5, "gamma_2": 0.5,
            "linewidths": FIG2_LINEWIDTHS,
        }),
    })
}

/// Fig. 3 D manifold: resonant pump Ω₂ = 4, probe Ω₁ = 0.2, γ = 0.1.
pub fn fig3_config(delta_1: f64) -> Result<ValidatedConfig, ConfigError> {
    symmetric_lambda(0.2, 4.0, delta_1, 0.0, 0.1)
}

/// D-manifold ρ₃₃ and the two-level B manifold (Rabi frequency CΩ₁) against
/// Δ₁ ∈ [−5, 5].
pub fn figure3(n: usize) -> Result<Table, AnalyticError> {
    let mut rows = Vec::with_capacity(n);
    for d1 in spaced(-5.0, 5.0, n, false) {
        let cfg = fig3_config(d1).map_err(|_| AnalyticError::Precondition("invalid preset"))?;
        rows.push(vec![d1, rho33_exact(&cfg)?, two_level_profile(FIG3_COUPLING * 0.2, 1.0, d1)]);
    }
    Ok(Table {
        name: "figure3".into(),
        columns: vec!["delta_1".into(), "rho33_d".into(), "rho33_b".into()],
        rows,
        metadata: serde_json::json!({
            "omega_1": 0.2, "omega_2": 4.0, "delta_2": 0.0, "linewidth": 0.1, "coupling": FIG3_COUPLING,
        }),
    })
}

/// D-manifold template for the surfaces; the grid overrides Δ₂ and Ω₂ and
/// the probe is retuned at every point.
pub fn surface_config() -> ValidatedConfig {
    symmetric_lambda(SURFACE_OMEGA_1, 1.0, 1.0, 1.0, SURFACE_GAMMA).expect("preset is valid")
}

/// Log grids Δ₂ ∈ [0.1, 1000] and Ω₂ ∈ [0.1, 100].
pub fn surface_axes(n_delta: usize, n_omega: usize) -> [GridSpec; 2] {
    [
        GridSpec { param: Param::Delta2, lo: 0.1, hi: 1e3, n: n_delta, log: true },
        GridSpec { param: Param::Omega2, lo: 0.1, hi: 1e2, n: n_omega, log: true },
    ]
}

/// r over (Δ₂, Ω₂) with B on its bright peak.
pub fn figure6(n_delta: usize, n_omega: usize) -> Result<SpectralScan, DiscrimError> {
    let scenario = DiscriminationScenario::two_lambda(surface_config(), SURFACE_Z);
    scan_surface(&scenario, &surface_axes(n_delta, n_omega), ProbeTuning::TrackBrightPeak)
}

/// Counter-propagating beams with |η₁| = |η₂| = 0.05 and trap frequency
/// equal to the Fig. 6 separation Z.
pub fn cooling_preset() -> CoolingParams {
    CoolingParams::new(surface_config(), SURFACE_Z, COOLING_ETA, -COOLING_ETA)
}

/// 1/q over (Δ₂, Ω₂) with the red sideband on the bright peak.
pub fn figure7(n_delta: usize, n_omega: usize) -> Result<SpectralScan, CoolingError> {
    scan_cooling(&cooling_preset(), &surface_axes(n_delta, n_omega), ProbeTuning::TrackBrightPeak)
}
