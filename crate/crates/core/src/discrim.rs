//! State-discrimination ratios r = ρ₃₃(B)/ρ₃₃(D) between a manifold B that
//! should fluoresce and a manifold D that should stay dark, plus parameter
//! surfaces of r.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytic::{derived_rates, rho33_exact, rho33_resonant, two_level_population, AnalyticError, Approx};
use crate::numerics::{grid_max, spaced};
use crate::params::{ConfigError, ValidatedConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscrimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("bad grid: {0}")]
    Grid(String),
}

/// A ratio that may be infinite when the suppressed manifold is exactly dark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Infinite,
}

impl Ratio {
    pub fn value(self) -> f64 {
        match self {
            Ratio::Finite(v) => v,
            Ratio::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Ratio::Infinite)
    }

    fn of(bright: f64, dark: f64) -> Self {
        if dark == 0.0 && bright > 0.0 { Ratio::Infinite } else { Ratio::Finite(bright / dark) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Single-photon excitation with a Lorentzian laser line.
    SinglePhotonBenchmark,
    /// D is a resonant Λ system, B a two-level system with coupling C.
    ResonantLambda,
    /// B and D are identical Λ systems whose Raman detunings differ by Z.
    TwoLambdaOffset,
    /// B and D share detunings but differ in coupling strengths C₁, C₂.
    DegenerateCoupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscriminationScenario {
    pub kind: ScenarioKind,
    /// Two-photon frequency separation between B and D.
    pub z: f64,
    /// Coupling ratio of the probe transition, B relative to D.
    pub c1: f64,
    /// Coupling ratio of the pump transition, B relative to D.
    pub c2: f64,
    /// The D manifold.
    pub cfg: ValidatedConfig,
}

impl DiscriminationScenario {
    pub fn benchmark(cfg: ValidatedConfig, z: f64) -> Self {
        Self { kind: ScenarioKind::SinglePhotonBenchmark, z, c1: 1.0, c2: 1.0, cfg }
    }

    pub fn resonant(cfg: ValidatedConfig, c: f64) -> Self {
        Self { kind: ScenarioKind::ResonantLambda, z: 0.0, c1: c, c2: 1.0, cfg }
    }

    pub fn two_lambda(cfg: ValidatedConfig, z: f64) -> Self {
        Self { kind: ScenarioKind::TwoLambdaOffset, z, c1: 1.0, c2: 1.0, cfg }
    }

    pub fn degenerate(cfg: ValidatedConfig, c1: f64, c2: f64) -> Self {
        Self { kind: ScenarioKind::DegenerateCoupling, z: 0.0, c1, c2, cfg }
    }

    fn check(&self) -> Result<(), DiscrimError> {
        if !(self.z >= 0.0) {
            return Err(DiscrimError::Precondition("Z must be non-negative"));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(DiscrimError::Precondition("coupling ratios must be positive"));
        }
        Ok(())
    }
}

/// r = (2Z/γ_L)² + 1 for single-photon excitation with laser linewidth γ_L.
pub fn benchmark_single_photon_r(z: f64, laser_linewidth: f64) -> Result<f64, DiscrimError> {
    if !(laser_linewidth > 0.0) {
        return Err(DiscrimError::Precondition("laser linewidth must be positive"));
    }
    Ok((2.0 * z / laser_linewidth).powi(2) + 1.0)
}

/// Ratio of a resonantly driven two-level B manifold (Rabi frequency CΩ₁) to
/// a resonant Λ system D.
pub fn ratio_resonant(cfg: &ValidatedConfig, c: f64) -> Result<Ratio, DiscrimError> {
    let d = cfg.drive();
    if !(d.omega_1 > 0.0 && d.omega_2 > 0.0 && c > 0.0) {
        return Err(DiscrimError::Precondition("omega_1, omega_2 and C must be positive"));
    }
    let dark = rho33_resonant(cfg)?;
    let bright = two_level_population(d.omega_1, cfg.atom().gamma_total, c);
    Ok(Ratio::of(bright, dark))
}

/// Limits of [`ratio_resonant`] for Ω₁ ≪ Γ/C and for Ω₁ ≫ Γ/C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantLimits {
    /// Ω₂²Γ₁C²/(2γΓ²).
    pub weak: Approx,
    /// Ω₂²Γ₁/(4γΩ₁²).
    pub strong: Approx,
}

pub fn ratio_resonant_limits(cfg: &ValidatedConfig, c: f64) -> Result<ResonantLimits, DiscrimError> {
    let gamma = cfg.gamma();
    if !(gamma > 0.0) {
        return Err(DiscrimError::Precondition("gamma must be positive"));
    }
    let (a, d) = (cfg.atom(), cfg.drive());
    let (g, g1, g2) = (a.gamma_total, a.gamma_1, a.gamma_2);
    let (o1s, o2s) = (d.omega_1.powi(2), d.omega_2.powi(2));
    let g13 = cfg.coherence().gamma_13;
    // Conditions for the numerator to reduce to Γ₁Ω₂⁴.
    let pump_dominates = 100.0 * o1s <= o2s
        && 100.0 * g2 * o1s <= g1 * o2s
        && 100.0 * 6.0 * gamma * o1s <= g1 * o2s
        && 100.0 * 4.0 * gamma * g13 <= o2s;
    let cs = c * c * o1s;
    Ok(ResonantLimits {
        weak: Approx::new(o2s * g1 * c * c / (2.0 * gamma * g * g), pump_dominates && 100.0 * cs <= g * g),
        strong: Approx::new(o2s * g1 / (4.0 * gamma * o1s), pump_dominates && cs >= 100.0 * g * g),
    })
}

/// Which single-photon detuning stays fixed while the Raman detuning moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hold {
    /// Keep Δ₂; δ moves the probe.
    Pump,
    /// Keep Δ₁; δ moves the pump.
    Probe,
}

/// `cfg` retuned to Raman detuning `delta`.
pub fn at_raman_detuning(cfg: &ValidatedConfig, hold: Hold, delta: f64) -> Result<ValidatedConfig, ConfigError> {
    let d = cfg.drive();
    match hold {
        Hold::Pump => cfg.with_detunings(d.delta_2 + delta, d.delta_2),
        Hold::Probe => cfg.with_detunings(d.delta_1, d.delta_1 - delta),
    }
}

/// The B and D configurations for B at Raman detuning `delta`; D sees the
/// same lasers with its Raman detuning lowered by `z`.
pub fn manifold_pair(
    cfg: &ValidatedConfig,
    z: f64,
    delta: f64,
    hold: Hold,
) -> Result<(ValidatedConfig, ValidatedConfig), ConfigError> {
    let b = at_raman_detuning(cfg, hold, delta)?;
    let d = b.with_drive(|d| d.delta_2 += z)?;
    Ok((b, d))
}

/// r = ρ₃₃(δ)/ρ₃₃(δ − Z) for two identical Λ systems, holding Δ₂ fixed.
pub fn ratio_two_lambda(scenario: &DiscriminationScenario, delta: f64) -> Result<Ratio, DiscrimError> {
    if scenario.kind != ScenarioKind::TwoLambdaOffset {
        return Err(DiscrimError::Precondition("scenario must be TwoLambdaOffset"));
    }
    scenario.check()?;
    ratio_two_lambda_at(&scenario.cfg, scenario.z, delta, Hold::Pump)
}

/// As [`ratio_two_lambda`] with a choice of which detuning is held.
pub fn ratio_two_lambda_at(cfg: &ValidatedConfig, z: f64, delta: f64, hold: Hold) -> Result<Ratio, DiscrimError> {
    let (b, d) = manifold_pair(cfg, z, delta, hold)?;
    Ok(Ratio::of(rho33_exact(&b)?, rho33_exact(&d)?))
}

/// Raman detuning of the bright-resonance maximum of ρ₃₃.
///
/// The search window is centred on the dressed-state position of the
/// light-shifted level and spans ten times an estimate of the peak width.
pub fn bright_peak(cfg: &ValidatedConfig, hold: Hold) -> Result<f64, DiscrimError> {
    let d = cfg.drive();
    let fixed = match hold {
        Hold::Pump => d.delta_2,
        Hold::Probe => d.delta_1,
    };
    let s = fixed.hypot(d.omega_2);
    if !(s > 0.0) || !(d.omega_1 > 0.0) {
        return Err(DiscrimError::Precondition("bright peak needs both lasers on"));
    }
    let sign = if fixed < 0.0 { -1.0 } else { 1.0 };
    let est = sign * (s - fixed.abs()) / 2.0;
    // Excited-state admixture of the dressed level sets its scattering rate.
    let p3 = (1.0 - fixed.abs() / s) / 2.0;
    let width = p3 * cfg.atom().gamma_total + cfg.gamma() + d.omega_1 * d.omega_2 / s;
    let w = (10.0 * width).min(0.5 * s);
    let mut err = None;
    let mut f = |delta: f64| match at_raman_detuning(cfg, hold, delta).map_err(DiscrimError::from).and_then(|c| Ok(rho33_exact(&c)?)) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    let (x, _) = grid_max(&mut f, est - w, est + w, 401, 1e-9 * w);
    match err {
        Some(e) => Err(e),
        None => Ok(x),
    }
}

/// r with B tuned to its bright-resonance peak.
pub fn ratio_at_bright_peak(cfg: &ValidatedConfig, z: f64, hold: Hold) -> Result<Ratio, DiscrimError> {
    let delta = bright_peak(cfg, hold)?;
    ratio_two_lambda_at(cfg, z, delta, hold)
}

fn eit_ratio(scenario: &DiscriminationScenario) -> Result<f64, DiscrimError> {
    scenario.check()?;
    let (z, gamma) = (scenario.z, scenario.cfg.gamma());
    let o2 = scenario.cfg.drive().omega_2;
    if !(gamma > 0.0 && o2 > 0.0) {
        return Err(DiscrimError::Precondition("gamma and omega_2 must be positive"));
    }
    let ag = scenario.cfg.alpha() * scenario.cfg.atom().gamma_total;
    Ok((z * z + gamma * gamma) / ((2.0 * ag * z * z / (o2 * o2) + gamma) * gamma))
}

/// r for B at bright resonance when Δ₁ → ∞.
pub fn r_infinity(scenario: &DiscriminationScenario) -> Result<f64, DiscrimError> {
    eit_ratio(scenario)
}

/// r for B at bright resonance with Δ′ = Z, in the Zeno regime; the same
/// expression as [`r_infinity`].
pub fn r_eit(scenario: &DiscriminationScenario) -> Result<f64, DiscrimError> {
    eit_ratio(scenario)
}

/// (Z² + γ²)/((αR/2 + γ)γ), with R taken from the configured detuning.
pub fn r_light_shift_matched(cfg: &ValidatedConfig, z: f64) -> Result<f64, DiscrimError> {
    let gamma = cfg.gamma();
    if !(gamma > 0.0) {
        return Err(DiscrimError::Precondition("gamma must be positive"));
    }
    let rr = derived_rates(cfg)?.scatter_rate;
    Ok((z * z + gamma * gamma) / ((cfg.alpha() * rr / 2.0 + gamma) * gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalSettings {
    pub omega_2: f64,
    pub delta_2: f64,
    /// Ω₁ should stay below this to avoid power broadening the bright peak.
    pub omega_1_bound: f64,
}

/// Recommended pump settings for separation `z`, linewidth `gamma` and the
/// largest available pump Rabi frequency.
///
/// The pump detuning includes the shift of the dark minimum caused by γ.
pub fn optimal_settings(z: f64, gamma: f64, omega2_max: f64, gamma_total: f64) -> Result<OptimalSettings, DiscrimError> {
    if !(z > 0.0) || !(gamma >= 0.0) || !(omega2_max > 0.0) || !(gamma_total > 0.0) {
        return Err(DiscrimError::Precondition("need Z > 0, gamma >= 0, omega2_max > 0, gamma_total > 0"));
    }
    let o2s = omega2_max * omega2_max;
    let delta_2 = o2s / (4.0 * z) * (1.0 + gamma * o2s / (2.0 * gamma_total * z * z)) - z;
    let bound = (z * gamma_total / omega2_max).max(delta_2.abs() * gamma / omega2_max);
    Ok(OptimalSettings { omega_2: omega2_max, delta_2, omega_1_bound: 0.1 * bound })
}

/// r for two degenerate Λ systems whose Rabi frequencies differ by C₁ and
/// C₂, with B at its bright resonance in the Zeno regime.
pub fn ratio_degenerate(cfg: &ValidatedConfig, c1: f64, c2: f64) -> Result<f64, DiscrimError> {
    let (dp, rr, oe2, g1, gamma, alpha) = degenerate_inputs(cfg, c1, c2)?;
    let c2s = c2 * c2;
    let bright = c2s * oe2 / (2.0 * g1) / (alpha * c2s * rr / 2.0 + gamma);
    let w = alpha * rr / 2.0 + gamma;
    let dark = oe2 * (alpha * rr * c2s * c2s / 2.0 + gamma) / (2.0 * g1) / ((c2s - 1.0).powi(2) * dp * dp + w * w);
    Ok(bright / dark)
}

/// Δ₁ → ∞ limit of [`ratio_degenerate`].
pub fn ratio_degenerate_limit(cfg: &ValidatedConfig, c1: f64, c2: f64) -> Result<f64, DiscrimError> {
    let (dp, _, _, _, gamma, _) = degenerate_inputs(cfg, c1, c2)?;
    let c2s = c2 * c2;
    Ok(c2s * (((c2s - 1.0) * dp / gamma).powi(2) + 1.0))
}

fn degenerate_inputs(cfg: &ValidatedConfig, c1: f64, c2: f64) -> Result<(f64, f64, f64, f64, f64, f64), DiscrimError> {
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(DiscrimError::Precondition("coupling ratios must be positive"));
    }
    let gamma = cfg.gamma();
    if !(gamma > 0.0) {
        return Err(DiscrimError::Precondition("gamma must be positive"));
    }
    let g1 = cfg.atom().gamma_1;
    if g1 == 0.0 {
        return Err(AnalyticError::ZeroBranching.into());
    }
    let r = derived_rates(cfg)?;
    Ok((r.light_shift, r.scatter_rate, r.omega_eff_sq(), g1, gamma, cfg.alpha()))
}

/// Parameter that a scan axis sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Omega1,
    Omega2,
    Delta1,
    Delta2,
    /// Raman detuning δ, applied by moving Δ₁ at fixed Δ₂.
    Delta,
    /// Both laser linewidths together.
    Linewidth,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Omega1 => "omega_1",
            Param::Omega2 => "omega_2",
            Param::Delta1 => "delta_1",
            Param::Delta2 => "delta_2",
            Param::Delta => "delta",
            Param::Linewidth => "linewidth",
        }
    }

    pub fn apply(self, cfg: &ValidatedConfig, v: f64) -> Result<ValidatedConfig, ConfigError> {
        cfg.with_drive(|d| match self {
            Param::Omega1 => d.omega_1 = v,
            Param::Omega2 => d.omega_2 = v,
            Param::Delta1 => d.delta_1 = v,
            Param::Delta2 => d.delta_2 = v,
            Param::Delta => d.delta_1 = d.delta_2 + v,
            Param::Linewidth => {
                d.linewidth_1 = v;
                d.linewidth_2 = v;
            }
        })
    }
}

impl FromStr for Param {
    type Err = DiscrimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "omega_1" => Param::Omega1,
            "omega_2" => Param::Omega2,
            "delta_1" => Param::Delta1,
            "delta_2" => Param::Delta2,
            "delta" => Param::Delta,
            "linewidth" => Param::Linewidth,
            _ => return Err(DiscrimError::Grid(format!("unknown parameter `{s}`"))),
        })
    }
}

/// One scan axis, written `<name>:<lo>:<hi>:<n>:<log|lin>` on the command
/// line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn new(param: Param, lo: f64, hi: f64, n: usize, log: bool) -> Result<Self, DiscrimError> {
        let g = Self { param, lo, hi, n, log };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<(), DiscrimError> {
        let bad = |m: &str| Err(DiscrimError::Grid(format!("{}: {m}", self.param.name())));
        if self.n == 0 {
            return bad("needs at least one point");
        }
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return bad("bounds must be finite");
        }
        if self.n > 1 && !(self.lo < self.hi) {
            return bad("lower bound must be below upper bound");
        }
        if self.log && !(self.lo > 0.0) {
            return bad("log spacing needs positive bounds");
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        spaced(self.lo, self.hi, self.n, self.log)
    }
}

impl FromStr for GridSpec {
    type Err = DiscrimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, lo, hi, n, spacing] = parts[..] else {
            return Err(DiscrimError::Grid(format!("expected name:lo:hi:n:log|lin, got `{s}`")));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| DiscrimError::Grid(format!("bad number `{t}`")));
        let n = n.trim().parse::<usize>().map_err(|_| DiscrimError::Grid(format!("bad point count `{n}`")))?;
        let log = match spacing.trim() {
            "log" => true,
            "lin" => false,
            other => return Err(DiscrimError::Grid(format!("spacing must be log or lin, got `{other}`"))),
        };
        GridSpec::new(name.trim().parse()?, num(lo)?, num(hi)?, n, log)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:e}:{:e}:{}:{}", self.param.name(), self.lo, self.hi, self.n, if self.log { "log" } else { "lin" })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
    pub log: bool,
}

/// Values of one quantity over a one- or two-dimensional grid.
///
/// Values are stored row-major with the first axis outermost. Points whose
/// configuration or evaluation failed hold `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralScan {
    pub quantity: String,
    pub axes: Vec<Axis>,
    pub values: Vec<Option<f64>>,
    /// Per-point validity of the approximations or conditions involved.
    pub valid: Vec<bool>,
    pub metadata: serde_json::Value,
}

impl SpectralScan {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let n2 = self.axes.get(1).map_or(1, |a| a.values.len());
        self.values[i * n2 + j]
    }

    /// sha256 of the metadata's `config` entry, or of all metadata if absent.
    pub fn config_hash(&self) -> String {
        let snapshot = self.metadata.get("config").unwrap_or(&self.metadata);
        hex::encode(Sha256::digest(snapshot.to_string().as_bytes()))
    }

    /// CSV with a provenance comment line and one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# quantity={} config_sha256={}\n", self.quantity, self.config_hash());
        let names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        out.push_str(&format!("{},value,valid\n", names.join(",")));
        let shape = self.shape();
        for (k, (v, ok)) in self.values.iter().zip(&self.valid).enumerate() {
            let mut rem = k;
            let mut coords = vec![0; shape.len()];
            for (a, n) in shape.iter().enumerate().rev() {
                coords[a] = rem % n;
                rem /= n;
            }
            for (a, &i) in coords.iter().enumerate() {
                out.push_str(&format_float(self.axes[a].values[i]));
                out.push(',');
            }
            if let Some(v) = v {
                out.push_str(&format_float(*v));
            }
            out.push_str(if *ok { ",1\n" } else { ",0\n" });
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan serializes")
    }
}

/// Shortest decimal that reads back to the same f64.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

/// Evaluates `f` on every grid point in parallel; results come back in grid
/// order regardless of scheduling.
pub fn scan_grid<F>(
    base: &ValidatedConfig,
    axes: &[GridSpec],
    quantity: &str,
    metadata: serde_json::Value,
    f: F,
) -> Result<SpectralScan, DiscrimError>
where
    F: Fn(&ValidatedConfig) -> Option<(f64, bool)> + Sync,
{
    if axes.is_empty() || axes.len() > 2 {
        return Err(DiscrimError::Grid("one or two axes required".into()));
    }
    for a in axes {
        a.check()?;
    }
    let grids: Vec<Vec<f64>> = axes.iter().map(GridSpec::values).collect();
    let shape: Vec<usize> = grids.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let points: Vec<Option<(f64, bool)>> = (0..total)
        .into_par_iter()
        .map(|k| {
            let (i, j) = if shape.len() == 2 { (k / shape[1], k % shape[1]) } else { (k, 0) };
            let mut cfg = axes[0].param.apply(base, grids[0][i]).ok()?;
            if let Some(a) = axes.get(1) {
                cfg = a.param.apply(&cfg, grids[1][j]).ok()?;
            }
            f(&cfg)
        })
        .collect();
    let axes_out = axes
        .iter()
        .zip(grids)
        .map(|(a, values)| Axis { name: a.param.name().into(), values, log: a.log })
        .collect();
    Ok(SpectralScan {
        quantity: quantity.into(),
        axes: axes_out,
        values: points.iter().map(|p| p.map(|(v, _)| v)).collect(),
        valid: points.iter().map(|p| p.is_some_and(|(_, ok)| ok)).collect(),
        metadata,
    })
}

/// How the probe is tuned at each grid point of a ratio surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "delta")]
pub enum ProbeTuning {
    /// Use the detunings as they come out of the grid.
    AsConfigured,
    /// Raman detuning of B fixed at the given value.
    FixedDelta(f64),
    /// B at the numerically located bright-resonance peak.
    TrackBrightPeak,
    /// B at the analytic light shift Ω₂²/(4Δ₂).
    LightShift,
}

/// Raman detuning of B for a grid point under `tuning`, holding Δ₂.
pub fn tuned_delta(cfg: &ValidatedConfig, tuning: ProbeTuning) -> Result<f64, DiscrimError> {
    let d = cfg.drive();
    match tuning {
        ProbeTuning::AsConfigured => Ok(d.two_photon_detuning()),
        ProbeTuning::FixedDelta(x) => Ok(x),
        ProbeTuning::TrackBrightPeak => bright_peak(cfg, Hold::Pump),
        ProbeTuning::LightShift => {
            if d.delta_2 == 0.0 {
                return Err(DiscrimError::Precondition("light shift needs delta_2 != 0"));
            }
            Ok(d.omega_2 * d.omega_2 / (4.0 * d.delta_2))
        }
    }
}

/// Surface of the discrimination ratio over one or two parameters.
pub fn scan_surface(
    scenario: &DiscriminationScenario,
    axes: &[GridSpec],
    tuning: ProbeTuning,
) -> Result<SpectralScan, DiscrimError> {
    scenario.check()?;
    let metadata = serde_json::json!({
        "scenario": scenario.kind,
        "z": scenario.z,
        "c1": scenario.c1,
        "c2": scenario.c2,
        "tuning": tuning,
        "axes": axes.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "config": scenario.cfg,
    });
    let s = *scenario;
    scan_grid(&scenario.cfg, axes, "r", metadata, move |cfg| {
        let r = match s.kind {
            ScenarioKind::TwoLambdaOffset => tuned_delta(cfg, tuning)
                .and_then(|delta| ratio_two_lambda_at(cfg, s.z, delta, Hold::Pump))
                .map(|r| (r.value(), true)),
            ScenarioKind::ResonantLambda => ratio_resonant(cfg, s.c1).map(|r| (r.value(), true)),
            ScenarioKind::DegenerateCoupling => ratio_degenerate(cfg, s.c1, s.c2).map(|r| (r, true)),
            ScenarioKind::SinglePhotonBenchmark => benchmark_single_photon_r(s.z, cfg.gamma()).map(|r| (r, true)),
        };
        r.ok()
    })
}
