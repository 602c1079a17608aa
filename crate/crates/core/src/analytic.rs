//! Closed-form steady-state populations and their approximations.
//!
//! Everything here is a pure function of a [`ValidatedConfig`]. The exact
//! Λ-system result assumes Γ₁₃ = Γ₂₃ and refuses configs that break it. The
//! far-detuned approximations return an [`Approx`] whose `valid` flag records
//! whether the weak-probe and large-detuning conditions hold with a factor-10
//! margin; the value is computed either way.

use thiserror::Error;

use crate::params::{Topology, ValidatedConfig};

/// Margin applied to the "≪" conditions behind the approximate forms.
pub const VALIDITY_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("closed form requires gamma_13 = gamma_23 (got {gamma_13} and {gamma_23})")]
    UnequalCoherence { gamma_13: f64, gamma_23: f64 },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("vanishing denominator")]
    VanishingDenominator,
    #[error("gamma_1 = 0 makes the far-detuned forms singular")]
    ZeroBranching,
}

/// An approximate value together with whether its conditions hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub valid: bool,
}

impl Approx {
    pub fn new(value: f64, valid: bool) -> Self {
        Self { value, valid }
    }
}

/// Scalars shared by the formulas.
#[derive(Debug, Clone, Copy)]
struct Sym {
    g: f64,
    g1: f64,
    g2: f64,
    g13: f64,
    gamma: f64,
    alpha: f64,
    o1s: f64,
    o2s: f64,
    d1: f64,
    d2: f64,
}

impl Sym {
    fn of(cfg: &ValidatedConfig) -> Self {
        let (a, d, c) = (cfg.atom(), cfg.drive(), cfg.coherence());
        Self {
            g: a.gamma_total,
            g1: a.gamma_1,
            g2: a.gamma_2,
            g13: c.gamma_13,
            gamma: c.gamma_12,
            alpha: c.alpha,
            o1s: d.omega_1 * d.omega_1,
            o2s: d.omega_2 * d.omega_2,
            d1: d.delta_1,
            d2: d.delta_2,
        }
    }

    fn delta(&self) -> f64 {
        self.d1 - self.d2
    }

    fn y(&self) -> f64 {
        self.g2 * self.o1s + self.g1 * self.o2s
    }
}

fn require_lambda_equal(cfg: &ValidatedConfig) -> Result<Sym, AnalyticError> {
    if cfg.topology() != Topology::Lambda {
        return Err(AnalyticError::Precondition("Lambda topology required"));
    }
    if !cfg.has_equal_optical_coherence() {
        let c = cfg.coherence();
        return Err(AnalyticError::UnequalCoherence { gamma_13: c.gamma_13, gamma_23: c.gamma_23 });
    }
    Ok(Sym::of(cfg))
}

fn require_far_detuned(cfg: &ValidatedConfig) -> Result<Sym, AnalyticError> {
    let s = Sym::of(cfg);
    if s.g1 == 0.0 {
        return Err(AnalyticError::ZeroBranching);
    }
    if s.d1 == 0.0 {
        return Err(AnalyticError::Precondition("delta_1 must be nonzero"));
    }
    if s.o2s == 0.0 {
        return Err(AnalyticError::Precondition("omega_2 must be nonzero"));
    }
    Ok(s)
}

fn ratio(num: f64, den: f64) -> Result<f64, AnalyticError> {
    if den > 0.0 && den.is_finite() {
        Ok(num / den)
    } else {
        Err(AnalyticError::VanishingDenominator)
    }
}

/// Light shift, scattering rate and related combinations for a far-detuned
/// pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Two-photon detuning δ = Δ₁ − Δ₂.
    pub delta: f64,
    /// Light shift Δ′ = Ω₂²/(4Δ₁).
    pub light_shift: f64,
    /// Scattering rate R = Ω₂²Γ/(4Δ₁²).
    pub scatter_rate: f64,
    /// Effective Raman Rabi frequency Ω_eff = Ω₁Ω₂/(2Δ₁).
    pub omega_eff: f64,
    /// Y = Γ₂Ω₁² + Γ₁Ω₂².
    pub y: f64,
    /// Ω² = Ω₁² + Ω₂².
    pub omega_sq: f64,
}

impl DerivedRates {
    pub fn omega_eff_sq(&self) -> f64 {
        self.omega_eff * self.omega_eff
    }
}

pub fn derived_rates(cfg: &ValidatedConfig) -> Result<DerivedRates, AnalyticError> {
    let s = Sym::of(cfg);
    if s.d1 == 0.0 {
        return Err(AnalyticError::Precondition("delta_1 must be nonzero"));
    }
    let d = cfg.drive();
    Ok(DerivedRates {
        delta: s.delta(),
        light_shift: s.o2s / (4.0 * s.d1),
        scatter_rate: s.o2s * s.g / (4.0 * s.d1 * s.d1),
        omega_eff: d.omega_1 * d.omega_2 / (2.0 * s.d1),
        y: s.y(),
        omega_sq: s.o1s + s.o2s,
    })
}

/// Coefficients of the exact denominator c₀ + c₁γ + c₂γ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenominatorCoefficients {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// c₀ written as a sum of squares that exposes the resonance positions.
    pub c0_factorized: f64,
}

pub fn denominator_coefficients(cfg: &ValidatedConfig) -> Result<DenominatorCoefficients, AnalyticError> {
    let s = require_lambda_equal(cfg)?;
    if s.g13 <= 0.0 {
        return Err(AnalyticError::Precondition("gamma_13 must be positive"));
    }
    Ok(coefficients(&s))
}

fn coefficients(s: &Sym) -> DenominatorCoefficients {
    let Sym { g1, g2, g13, o1s, o2s, d1, d2, .. } = *s;
    let d = s.delta();
    let y = s.y();
    let osq = o1s + o2s;
    let p = o1s * o2s;

    let c0 = osq * osq * y
        + 16.0 * d * d * g13 * g13 * y
        + 4.0 * d * d * p * (6.0 * g13 - (g1 + g2))
        + 16.0 * d * d * (g2 * o1s * d2 * d2 + g1 * o2s * d1 * d1)
        - 8.0 * d * (d1 * g1 * o2s * o2s - d2 * g2 * o1s * o1s);
    // Δ₁²(δ − Ω₂²/4Δ₁)² written as (Δ₁δ − Ω₂²/4)² so that Δ₁ = 0 is harmless.
    let c0_factorized = 16.0 * o2s * g1 * (d1 * d - o2s / 4.0).powi(2)
        + 16.0 * o1s * g2 * (d2 * d + o1s / 4.0).powi(2)
        + 16.0 * d * d * g13 * g13 * y
        + 4.0 * d * d * p * (6.0 * g13 - (g1 + g2))
        + p * (y + osq * (g1 + g2));
    let c1 = 2.0 * osq * (4.0 * g13 * y + 3.0 * p)
        + 4.0 * p / g13 * (g1 * d1 * d1 + g2 * d2 * d2 + (g1 + g2) * d1 * d2);
    let c2 = 8.0 * (2.0 * g13 * g13 * y + 3.0 * g13 * p + 2.0 * (d2 * d2 * g2 * o1s + d1 * d1 * g1 * o2s));
    DenominatorCoefficients { c0, c1, c2, c0_factorized }
}

/// Exact steady-state ρ₃₃ of the Λ system with Γ₁₃ = Γ₂₃.
///
/// Uses the sum-of-squares c₀, which does not cancel at large detuning.
pub fn rho33_exact(cfg: &ValidatedConfig) -> Result<f64, AnalyticError> {
    let s = require_lambda_equal(cfg)?;
    if s.g13 <= 0.0 {
        return Err(AnalyticError::Precondition("gamma_13 must be positive"));
    }
    let c = coefficients(&s);
    let d = s.delta();
    let num = 2.0 * s.o1s * s.o2s * (2.0 * s.alpha * s.g * (d * d + s.gamma * s.gamma) + (s.o1s + s.o2s) * s.gamma);
    let den = c.c0_factorized + c.c1 * s.gamma + c.c2 * s.gamma * s.gamma;
    ratio(num, den)
}

/// Exact ρ₃₃ with both lasers on single-photon resonance.
pub fn rho33_resonant(cfg: &ValidatedConfig) -> Result<f64, AnalyticError> {
    let s = require_lambda_equal(cfg)?;
    if s.d1 != 0.0 || s.d2 != 0.0 {
        return Err(AnalyticError::Precondition("both detunings must be zero"));
    }
    let y = s.y();
    let p = s.o1s * s.o2s;
    ratio(2.0 * s.gamma * p, (s.o1s + s.o2s) * y + 2.0 * s.gamma * (3.0 * p + 2.0 * s.g13 * y))
}

/// Saturated excited population 1/(2 + Γ²/(CΩ)²) of a resonantly driven
/// two-level atom.
pub fn two_level_population(omega: f64, gamma_total: f64, coupling: f64) -> f64 {
    let x = coupling * omega;
    if !(x > 0.0) {
        return 0.0;
    }
    if x.is_infinite() {
        return 0.5;
    }
    1.0 / (2.0 + (gamma_total / x).powi(2))
}

/// Two-level excited population at detuning `detuning` for Rabi frequency
/// `omega` and decay rate `gamma_total`.
pub fn two_level_profile(omega: f64, gamma_total: f64, detuning: f64) -> f64 {
    let x2 = omega * omega;
    if x2 == 0.0 {
        return 0.0;
    }
    (x2 / 4.0) / (detuning * detuning + gamma_total * gamma_total / 4.0 + x2 / 2.0)
}

/// Exact resonant ρ₃₃ of the ladder system (level 2 above level 3).
pub fn rho33_ladder(cfg: &ValidatedConfig) -> Result<f64, AnalyticError> {
    if cfg.topology() != Topology::Ladder {
        return Err(AnalyticError::Precondition("Ladder topology required"));
    }
    let s = Sym::of(cfg);
    if s.d1 != 0.0 || s.d2 != 0.0 {
        return Err(AnalyticError::Precondition("both detunings must be zero"));
    }
    let c = cfg.coherence();
    let (g13, g23) = (c.gamma_13, c.gamma_23);
    let Sym { g1, g2, gamma, o1s, o2s, .. } = s;
    let yt = 2.0 * g2 * o1s + g1 * o2s + 2.0 * g1 * g2 * g23;
    let num = 2.0 * gamma * o1s * o2s + o1s * g2 * (o1s + 4.0 * g23 * gamma);
    let den = (o1s + o2s) * yt - g2 * o1s * (3.0 * o2s + 2.0 * g1 * (g23 - g13))
        + 2.0 * gamma * (3.0 * o1s * o2s + 2.0 * g13 * yt + 4.0 * g2 * (g23 - g13) * o1s);
    if num == 0.0 {
        return Ok(0.0);
    }
    ratio(num, den)
}

/// Weak probe: Ω₁² ≤ min(Γ₁Ω₂²/Γ₂, Γ₁αΓ)/margin.
pub fn weak_probe(cfg: &ValidatedConfig, margin: f64) -> bool {
    let s = Sym::of(cfg);
    let pump_limit = if s.g2 > 0.0 { s.g1 * s.o2s / s.g2 } else { f64::INFINITY };
    s.o1s * margin <= pump_limit.min(s.g1 * s.alpha * s.g)
}

/// Large detuning: Δ₁² ≥ margin·max(α²Γ², δ²).
pub fn far_detuned(cfg: &ValidatedConfig, margin: f64) -> bool {
    let s = Sym::of(cfg);
    let d = s.delta();
    s.d1 * s.d1 >= margin * (s.alpha * s.alpha * s.g * s.g).max(d * d)
}

/// γ ≤ Ω₂²/(margin·Γ).
pub fn narrow_linewidth(cfg: &ValidatedConfig, margin: f64) -> bool {
    let s = Sym::of(cfg);
    s.gamma * margin * s.g <= s.o2s
}

fn far_conditions(cfg: &ValidatedConfig) -> bool {
    weak_probe(cfg, VALIDITY_MARGIN) && far_detuned(cfg, VALIDITY_MARGIN)
}

/// Far-detuned expansion of ρ₃₃ for a weak probe.
pub fn rho33_far_detuned(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    let (d, dp, rr, oe2) = (r.delta, r.light_shift, r.scatter_rate, r.omega_eff_sq());
    let Sym { g, g1, g2, gamma, alpha, d1, .. } = s;
    let num = oe2 * (alpha * (d * d + gamma * gamma) / (2.0 * dp * dp) * rr + gamma) / (2.0 * g1);
    let den = (d - dp).powi(2)
        + (d * g / (2.0 * d1)).powi(2) * (alpha * alpha + g2 / g1 * oe2 / (rr * rr))
        + oe2 / 4.0 * (g2 / g1 + 2.0)
        + (alpha + oe2 / (rr * rr) * g / (alpha * g1)) * rr * gamma
        + gamma * gamma;
    Ok(Approx::new(ratio(num, den)?, far_conditions(cfg)))
}

/// Far wing |δ| ≫ |Δ′|: single-photon excitation Ω₁²Γ/(4Γ₁Δ₁²).
pub fn far_wing_limit(cfg: &ValidatedConfig) -> Result<f64, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    Ok(s.o1s * s.g / s.g1 / (4.0 * s.d1 * s.d1))
}

/// Zero-linewidth Fano profile, obtained by replacing δ² with Δ′² in the
/// denominator.
pub fn fano_profile(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    let (d, dp, rr, oe2) = (r.delta, r.light_shift, r.scatter_rate, r.omega_eff_sq());
    let num = oe2 * (d / dp).powi(2) * rr / (4.0 * s.g1);
    let den = (d - dp).powi(2) + rr * rr / 4.0 + oe2 * s.g / (2.0 * s.g1);
    Ok(Approx::new(ratio(num, den)?, s.gamma == 0.0 && far_conditions(cfg)))
}

/// Full width at half maximum f = √(R² + 2Ω_eff²Γ/Γ₁) of the bright peak.
pub fn fano_fwhm(cfg: &ValidatedConfig) -> Result<f64, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    Ok((r.scatter_rate.powi(2) + r.omega_eff_sq() * 2.0 * s.g / s.g1).sqrt())
}

/// Two-photon detunings of the half-maximum points, valid for f ≪ Δ′.
pub fn fano_half_max_points(cfg: &ValidatedConfig) -> Result<(f64, f64), AnalyticError> {
    let f = fano_fwhm(cfg)?;
    let dp = derived_rates(cfg)?.light_shift;
    let lo = dp + f / 2.0 * (f / dp - 1.0);
    let hi = dp + f / 2.0 * (f / dp + 1.0);
    Ok((lo.min(hi), lo.max(hi)))
}

/// Lorentzian near the bright resonance: a dressed state of width R coupled
/// with strength Ω_eff.
pub fn rho33_dressed(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    let (d, dp, rr, oe2) = (r.delta, r.light_shift, r.scatter_rate, r.omega_eff_sq());
    let num = oe2 * rr / (4.0 * s.g1);
    let den = (d - dp).powi(2) + rr * rr / 4.0 + oe2 * s.g / (2.0 * s.g1);
    Ok(Approx::new(ratio(num, den)?, s.gamma == 0.0 && far_conditions(cfg)))
}

/// Finite-linewidth form with δ² replaced by Δ′² in the denominator.
pub fn rho33_linewidth_approx(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    let (d, dp, rr, oe2) = (r.delta, r.light_shift, r.scatter_rate, r.omega_eff_sq());
    let Sym { g, g1, gamma, alpha, .. } = s;
    let num = oe2 * (alpha * (d * d + gamma * gamma) / (2.0 * dp * dp) * rr + gamma) / (2.0 * g1);
    let den = (d - dp).powi(2)
        + (alpha * rr / 2.0 + gamma).powi(2)
        + oe2 * (g / (2.0 * g1)) * (1.0 + 2.0 * gamma / (alpha * rr));
    Ok(Approx::new(ratio(num, den)?, far_conditions(cfg)))
}

fn dark_bright_conditions(cfg: &ValidatedConfig) -> bool {
    far_conditions(cfg) && narrow_linewidth(cfg, VALIDITY_MARGIN)
}

/// ρ₃₃ at the dark resonance δ = 0; the configured δ is ignored.
pub fn rho33_dark(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    let Sym { g1, gamma, alpha, o1s, .. } = s;
    let num = r.omega_eff_sq() * gamma / (2.0 * g1);
    let den = r.light_shift.powi(2) + o1s * gamma / (alpha * g1) + gamma * gamma;
    if num == 0.0 {
        return Ok(Approx::new(0.0, dark_bright_conditions(cfg)));
    }
    Ok(Approx::new(ratio(num, den)?, dark_bright_conditions(cfg)))
}

/// Same quantity as [`rho33_dark`], rewritten in terms of Ω₂, R and Ω_eff.
pub fn rho33_dark_rates_form(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    let Sym { g, g1, gamma, alpha, o1s, o2s, .. } = s;
    let rr = r.scatter_rate;
    let num = 2.0 * o1s * gamma / g1;
    let den = o2s + (r.omega_eff_sq() / (rr * rr)) * (4.0 * g * g / (alpha * g1)) * gamma + (4.0 * g / rr) * gamma * gamma;
    Ok(Approx::new(ratio(num, den)?, dark_bright_conditions(cfg)))
}

/// ρ₃₃ at the bright resonance δ = Δ′; the configured δ is ignored.
pub fn rho33_bright(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    let Sym { g, g1, gamma, alpha, .. } = s;
    let (rr, oe2) = (r.scatter_rate, r.omega_eff_sq());
    let w = alpha * rr / 2.0 + gamma;
    let num = oe2 / (2.0 * g1) * w;
    let den = w * w + 0.5 * oe2 * (g / g1) * (1.0 + 2.0 * gamma / (alpha * rr));
    Ok(Approx::new(ratio(num, den)?, dark_bright_conditions(cfg)))
}

/// Zeno-regime limit of [`rho33_bright`]; valid when Ω_eff² ≤ R²/100.
pub fn rho33_bright_zeno(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    let (rr, oe2) = (r.scatter_rate, r.omega_eff_sq());
    let value = ratio(oe2 / (2.0 * s.g1), s.alpha * rr / 2.0 + s.gamma)?;
    let zeno = oe2 <= 0.01 * rr * rr;
    Ok(Approx::new(value, zeno && dark_bright_conditions(cfg)))
}

/// Limit Δ₁ → ∞ at fixed light shift, where R → 0.
pub fn rho33_infinite_detuning(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let s = require_far_detuned(cfg)?;
    let r = derived_rates(cfg)?;
    let Sym { g, g1, gamma, alpha, o1s, o2s, .. } = s;
    let d = r.delta;
    let num = r.omega_eff_sq() * (2.0 * alpha * g * (d * d + gamma * gamma) / o2s + gamma) / (2.0 * g1);
    let den = (d - r.light_shift).powi(2) + gamma * o1s / (alpha * g1) + gamma * gamma;
    Ok(Approx::new(ratio(num, den)?, dark_bright_conditions(cfg)))
}

/// Displacement 2γΔ₁/(αΓ + 4γ) of the absorption minimum from δ = 0.
pub fn absorption_minimum_offset(cfg: &ValidatedConfig) -> Result<f64, AnalyticError> {
    let s = Sym::of(cfg);
    if s.gamma == 0.0 {
        return Ok(0.0);
    }
    ratio(2.0 * s.gamma * s.d1, s.alpha * s.g + 4.0 * s.gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obe::{build_liouvillian, excited_population, steady_state};
    use crate::params::{AtomParams, CoherenceModel, LaserDrive, SystemConfig};

    fn cfg(o1: f64, o2: f64, d1: f64, d2: f64, lw: f64) -> ValidatedConfig {
        SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::new(o1, o2, d1, d2, lw))
            .validate()
            .unwrap()
    }

    fn numeric(c: &ValidatedConfig) -> f64 {
        excited_population(&steady_state(&build_liouvillian(c)).unwrap())
    }

    #[test]
    fn c0_at_two_photon_resonance() {
        let c = cfg(0.3, 1.7, 2.5, 2.5, 0.02);
        let k = denominator_coefficients(&c).unwrap();
        let (o1s, o2s) = (0.09, 1.7f64.powi(2));
        let expect = (o1s + o2s).powi(2) * (0.5 * o1s + 0.5 * o2s);
        assert!((k.c0 - expect).abs() < 1e-14 * expect);
        assert!((k.c0_factorized - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn exact_matches_numeric_on_figure_parameters() {
        for lw in [0.0, 0.05, 0.1] {
            for d in [-1.2, -0.3, 0.0, 0.4, 1.0] {
                let c = cfg(0.1, 1.0, 3.0 + d, 3.0, lw);
                let (a, n) = (rho33_exact(&c).unwrap(), numeric(&c));
                assert!((a - n).abs() <= 1e-10 * n.abs() + 1e-16, "lw={lw} d={d}: {a} vs {n}");
            }
        }
    }

    #[test]
    fn dark_resonance_zero() {
        assert_eq!(rho33_exact(&cfg(0.4, 1.1, -2.0, -2.0, 0.0)).unwrap(), 0.0);
        assert_eq!(rho33_exact(&cfg(0.0, 1.1, -2.0, 1.0, 0.1)).unwrap(), 0.0);
    }

    #[test]
    fn unequal_coherences_rejected() {
        let c = SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::default())
            .with_coherence(CoherenceModel::explicit(0.5, 0.6, 0.0))
            .validate()
            .unwrap();
        assert!(matches!(rho33_exact(&c), Err(AnalyticError::UnequalCoherence { .. })));
    }

    #[test]
    fn all_zero_is_vanishing_denominator() {
        let c = SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::default())
            .with_coherence(CoherenceModel::explicit(0.5, 0.5, 0.0))
            .validate()
            .unwrap();
        assert_eq!(rho33_exact(&c), Err(AnalyticError::VanishingDenominator));
    }

    #[test]
    fn resonant_requires_zero_detuning() {
        assert!(rho33_resonant(&cfg(0.2, 4.0, 0.1, 0.0, 0.1)).is_err());
        assert_eq!(rho33_resonant(&cfg(0.2, 4.0, 0.0, 0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn two_level_values() {
        assert_eq!(two_level_population(1.0, 1.0, 1.0), 1.0 / 3.0);
        assert_eq!(two_level_population(f64::INFINITY, 1.0, 1.0), 0.5);
        assert_eq!(two_level_population(0.0, 1.0, 1.0), 0.0);
        let v = two_level_population(0.2 * 2f64.sqrt(), 1.0, 1.0);
        assert!((v - 1.0 / 14.5).abs() < 1e-15);
        assert!((two_level_profile(0.3, 1.0, 0.0) - two_level_population(0.3, 1.0, 1.0)).abs() < 1e-16);
    }

    #[test]
    fn ladder_matches_its_generator() {
        let c = SystemConfig::ladder(AtomParams::closed_ladder(1.0, 0.3), LaserDrive::new(0.4, 1.5, 0.0, 0.0, 0.05))
            .validate()
            .unwrap();
        let (a, n) = (rho33_ladder(&c).unwrap(), numeric(&c));
        assert!((a - n).abs() < 1e-12 * n, "{a} vs {n}");
    }

    #[test]
    fn ladder_meets_lambda_for_strong_pump() {
        // Γ₂ → 0 and Γ₂₃ = Γ₁₃: the ladder and Λ resonant forms coincide
        // as Ω₂/Ω₁ grows.
        let atom = AtomParams::closed_ladder(1.0, 0.0);
        let drive = LaserDrive::new(1e-3, 1.0, 0.0, 0.0, 0.0);
        let coh = CoherenceModel::explicit(0.55, 0.55, 0.1);
        let ladder = SystemConfig::ladder(atom, drive).with_coherence(coh).validate().unwrap();
        let lambda = SystemConfig::lambda(AtomParams { gamma_2: 0.0, ..atom }, drive)
            .with_coherence(coh)
            .validate()
            .unwrap();
        let (a, b) = (rho33_ladder(&ladder).unwrap(), rho33_resonant(&lambda).unwrap());
        assert!((a - b).abs() < 1e-2 * b, "{a} vs {b}");
    }

    #[test]
    fn derived_rate_arithmetic() {
        let r = derived_rates(&cfg(0.1, 4.0, 20.0, 20.0, 0.0)).unwrap();
        assert!((r.light_shift - 0.2).abs() < 1e-15);
        assert!((r.scatter_rate - 0.01).abs() < 1e-15);
        let r = derived_rates(&cfg(0.7, 0.7, -3.0, 0.0, 0.0)).unwrap();
        assert!((r.omega_eff - 0.49 / -6.0).abs() < 1e-15);
        assert!(derived_rates(&cfg(0.7, 0.7, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn offset_arithmetic() {
        let c = SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::new(0.1, 1.0, 3.0, 3.0, 0.0))
            .with_coherence(CoherenceModel::explicit(0.55, 0.55, 0.05))
            .validate()
            .unwrap();
        assert!((absorption_minimum_offset(&c).unwrap() - 0.3 / 1.3).abs() < 1e-15);
        assert_eq!(absorption_minimum_offset(&cfg(0.1, 1.0, 3.0, 3.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn far_wing_approaches_single_photon_rate() {
        // δ = 200 Δ′ on the far side of the bright peak
        let (d2, o2) = (200.0, 4.0);
        let dp = o2 * o2 / (4.0 * d2);
        let c = cfg(0.01, o2, d2 + 200.0 * dp, d2, 0.0);
        let v = rho33_far_detuned(&c).unwrap().value;
        let w = far_wing_limit(&c).unwrap();
        assert!((v - w).abs() < 0.05 * w, "{v} vs {w}");
    }

    #[test]
    fn fano_zero_and_peak() {
        let c = cfg(0.01, 4.0, 100.0, 100.0, 0.0);
        assert_eq!(fano_profile(&c).unwrap().value, 0.0);
        let dp = 16.0 / 400.0;
        let at_peak = cfg(0.01, 4.0, 100.0, 100.0 - dp, 0.0);
        let (f, d) = (fano_profile(&at_peak).unwrap().value, rho33_dressed(&at_peak).unwrap().value);
        assert!((f - d).abs() < 1e-12 * d);
    }

    #[test]
    fn zero_branching_refused() {
        let atom = AtomParams::closed_lambda(0.0, 1.0);
        let c = SystemConfig::lambda(atom, LaserDrive::new(0.01, 1.0, 50.0, 50.0, 0.0)).validate().unwrap();
        assert_eq!(rho33_far_detuned(&c), Err(AnalyticError::ZeroBranching));
        assert_eq!(fano_profile(&c), Err(AnalyticError::ZeroBranching));
    }

    #[test]
    fn dark_forms_vanish_without_linewidth() {
        let c = cfg(0.01, 2.0, 50.0, 50.0, 0.0);
        assert_eq!(rho33_dark(&c).unwrap().value, 0.0);
        assert_eq!(rho33_dark_rates_form(&c).unwrap().value, 0.0);
    }

    #[test]
    fn dark_forms_are_one_expression() {
        for (o1, o2, d1, lw) in [(0.01, 2.0, 50.0, 1e-3), (0.003, 5.0, 20.0, 0.02), (0.02, 1.0, -30.0, 0.1)] {
            let c = cfg(o1, o2, d1, d1, lw);
            let (a, b) = (rho33_dark(&c).unwrap().value, rho33_dark_rates_form(&c).unwrap().value);
            assert!((a - b).abs() < 1e-12 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn linewidth_dominated_profile_is_lorentzian() {
        // γ ≫ αR, Ω_eff, Ω_eff²/R
        let (o1, o2, d1, lw) = (1e-3, 2.0, 1000.0, 2e-4);
        let base = cfg(o1, o2, d1, d1, lw);
        let dp = o2 * o2 / (4.0 * d1);
        let gamma = base.gamma();
        let xs: Vec<f64> = (0..201).map(|i| 2.0 * dp * i as f64 / 200.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&d| rho33_exact(&base.with_detunings(d1 + d, d1).unwrap()).unwrap()).collect();
        // 1/ρ is quadratic in δ for a Lorentzian: fit it and compare.
        let a = nalgebra::DMatrix::from_fn(xs.len(), 3, |i, j| xs[i].powi(j as i32));
        let b = nalgebra::DVector::from_iterator(ys.len(), ys.iter().map(|y| 1.0 / y));
        let coef = a.clone().svd(true, true).solve(&b, 1e-18).unwrap();
        let fit: Vec<f64> = xs.iter().map(|&x| 1.0 / (coef[0] + coef[1] * x + coef[2] * x * x)).collect();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let ss_res: f64 = ys.iter().zip(&fit).map(|(y, f)| (y - f).powi(2)).sum();
        let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
        assert!(1.0 - ss_res / ss_tot >= 0.999);
        // The fitted half width is the linewidth.
        let centre = -coef[1] / (2.0 * coef[2]);
        let hw = (coef[0] / coef[2] - centre * centre).sqrt();
        assert!((hw - gamma).abs() < 0.1 * gamma, "{hw} vs {gamma}");
    }
}
