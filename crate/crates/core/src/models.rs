//! Simple physical pictures of the two-photon resonances.
//!
//! These reproduce the closed forms only approximately and are meant for
//! comparison and insight; nothing in [`crate::discrim`] or
//! [`crate::cooling`] depends on them.

use crate::analytic::{derived_rates, fano_fwhm, weak_probe, AnalyticError, Approx};
use crate::params::ValidatedConfig;

/// Population in |3⟩ when Raman Rabi flopping between 1 and 2 is interrupted
/// by photon scattering at rate R₂ = Ω₂²Γ/(4Δ₂²), at detuning `delta_prime`
/// from the bright resonance.
pub fn zeno_rho33(cfg: &ValidatedConfig, delta_prime: f64) -> Result<Approx, AnalyticError> {
    let d = cfg.drive();
    let g = cfg.atom().gamma_total;
    if d.delta_2 == 0.0 || d.delta_1 == 0.0 {
        return Err(AnalyticError::Precondition("both detunings must be nonzero"));
    }
    let r2 = d.omega_2 * d.omega_2 * g / (4.0 * d.delta_2 * d.delta_2);
    let oe2 = derived_rates(cfg)?.omega_eff_sq();
    let value = if oe2 == 0.0 { 0.0 } else { oe2 * r2 / (2.0 * g) / (delta_prime * delta_prime + r2 * r2 + oe2) };
    let valid = d.omega_2 >= 10.0 * d.omega_1 && d.delta_2.abs() >= 5.0 * g && d.delta_2.abs() >= 5.0 * d.omega_2;
    Ok(Approx::new(value, valid))
}

/// Rate Γ̃ = 2γΩ₁²Ω₂²/(Ω₁² + Ω₂²)² at which dephasing moves population
/// between the dark and bright ground superpositions.
pub fn gamma_tilde(cfg: &ValidatedConfig) -> f64 {
    let d = cfg.drive();
    let (o1s, o2s) = (d.omega_1 * d.omega_1, d.omega_2 * d.omega_2);
    if o1s + o2s == 0.0 {
        return 0.0;
    }
    2.0 * cfg.gamma() * o1s * o2s / (o1s + o2s).powi(2)
}

/// Steady state of the three rate equations in the {|3⟩, |−⟩, |+⟩} basis,
/// ρ₃₃ = RΓ̃/(RΓ₁ + 2(R + Γ)Γ̃).
pub fn rate_model_dark(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let rr = derived_rates(cfg)?.scatter_rate;
    let a = cfg.atom();
    let gt = gamma_tilde(cfg);
    let den = rr * a.gamma_1 + 2.0 * (rr + a.gamma_total) * gt;
    let value = if gt == 0.0 { 0.0 } else { rr * gt / den };
    Ok(Approx::new(value, valid_rate_model(cfg, gt)))
}

/// [`rate_model_dark`] simplified for Γ̃ ≪ Γ₁ and R ≪ Γ.
pub fn rate_model_dark_simplified(cfg: &ValidatedConfig) -> Result<Approx, AnalyticError> {
    let r = derived_rates(cfg)?;
    let (a, d) = (cfg.atom(), cfg.drive());
    if a.gamma_1 == 0.0 {
        return Err(AnalyticError::ZeroBranching);
    }
    let gamma = cfg.gamma();
    let o1s = d.omega_1 * d.omega_1;
    let rr = r.scatter_rate;
    let num = 2.0 * o1s * gamma / a.gamma_1;
    let den = d.omega_2 * d.omega_2
        + (r.omega_eff_sq() / (rr * rr)) * (4.0 * a.gamma_total * a.gamma_total / a.gamma_1) * gamma;
    let value = if num == 0.0 { 0.0 } else { num / den };
    Ok(Approx::new(value, valid_rate_model(cfg, gamma_tilde(cfg))))
}

fn valid_rate_model(cfg: &ValidatedConfig, gt: f64) -> bool {
    weak_probe(cfg, 10.0) && gt * 10.0 <= cfg.atom().gamma_1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Scattering suppresses Raman flopping: R ≥ 10 Ω_eff.
    Zeno,
    /// Raman flopping dominates: Ω_eff ≥ 10 R.
    PowerBroadened,
    Crossover,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Predicted height of the bright peak.
    pub rho33_max: f64,
    /// Predicted full width at half maximum of the bright peak.
    pub fwhm: f64,
}

/// Classifies the bright resonance and predicts its height and width.
///
/// Outside the two limiting regimes the dressed-state Lorentzian supplies
/// the prediction.
pub fn classify_regime(cfg: &ValidatedConfig) -> Result<RegimeReport, AnalyticError> {
    let r = derived_rates(cfg)?;
    let a = cfg.atom();
    if a.gamma_1 == 0.0 {
        return Err(AnalyticError::ZeroBranching);
    }
    let (rr, oe) = (r.scatter_rate, r.omega_eff.abs());
    let o1s = cfg.drive().omega_1.powi(2);
    let (g, g1) = (a.gamma_total, a.gamma_1);
    let report = if rr >= 10.0 * oe {
        RegimeReport { regime: Regime::Zeno, rho33_max: o1s / (g1 * g), fwhm: rr }
    } else if oe >= 10.0 * rr {
        RegimeReport { regime: Regime::PowerBroadened, rho33_max: rr / (2.0 * g), fwhm: (2.0 * g / g1).sqrt() * oe }
    } else {
        let oe2 = oe * oe;
        RegimeReport {
            regime: Regime::Crossover,
            rho33_max: oe2 * rr / (4.0 * g1) / (rr * rr / 4.0 + oe2 * g / (2.0 * g1)),
            fwhm: fano_fwhm(cfg)?,
        }
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{rho33_dark, rho33_dressed};
    use crate::params::{AtomParams, LaserDrive, SystemConfig};

    fn cfg(o1: f64, o2: f64, d1: f64, d2: f64, lw: f64) -> ValidatedConfig {
        SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::new(o1, o2, d1, d2, lw))
            .validate()
            .unwrap()
    }

    #[test]
    fn zeno_limits() {
        let c = cfg(1e-3, 1.0, 20.0, 20.0, 0.0);
        assert!(zeno_rho33(&c, 1e9).unwrap().value < 1e-20);
        let z = zeno_rho33(&c, 0.0).unwrap();
        assert!(z.valid);
        let r2 = 1.0 / 1600.0;
        let oe2 = (1e-3f64 / 40.0).powi(2);
        assert!((z.value - oe2 / (2.0 * r2)).abs() < 1e-2 * z.value);
    }

    #[test]
    fn zeno_and_dressed_within_factor_two() {
        let atom = AtomParams::closed_lambda(0.9, 0.1);
        for (o1, o2, d2) in [(0.01, 1.0, 10.0), (0.05, 2.0, 20.0), (0.001, 0.5, 5.0)] {
            let dp = o2 * o2 / (4.0 * d2);
            for dd in [-0.01, 0.0, 0.003, 0.02] {
                let d1 = d2 + dp + dd;
                let c = SystemConfig::lambda(atom, LaserDrive::new(o1, o2, d1, d2, 0.0)).validate().unwrap();
                let dprime = d1 - d2 - o2 * o2 / (4.0 * d1);
                let z = zeno_rho33(&c, dprime).unwrap().value;
                let p = rho33_dressed(&c).unwrap().value;
                assert!((0.4..=2.5).contains(&(z / p)), "{o1} {o2} {d2} {dd}: {}", z / p);
            }
        }
    }

    #[test]
    fn gamma_tilde_symmetric_drive() {
        let c = cfg(0.7, 0.7, 1.0, 1.0, 0.2);
        assert!((gamma_tilde(&c) - 0.1).abs() < 1e-15);
        assert_eq!(gamma_tilde(&cfg(0.7, 0.7, 1.0, 1.0, 0.0)), 0.0);
        assert_eq!(rate_model_dark(&cfg(0.01, 1.0, 10.0, 10.0, 0.0)).unwrap().value, 0.0);
    }

    #[test]
    fn rate_model_tracks_dark_form() {
        for (o1, o2, d1) in [(0.01, 2.0, 30.0), (0.003, 1.0, 10.0), (0.02, 5.0, -60.0)] {
            let lw = 1e-4 * o2 * o2;
            let c = cfg(o1, o2, d1, d1, lw);
            let full = rate_model_dark(&c).unwrap();
            let simple = rate_model_dark_simplified(&c).unwrap();
            let dark = rho33_dark(&c).unwrap().value;
            assert!(full.valid);
            assert!((full.value - dark).abs() <= 0.2 * dark, "{} vs {dark}", full.value);
            assert!((simple.value - dark).abs() <= 0.2 * dark, "{} vs {dark}", simple.value);
        }
    }

    #[test]
    fn regimes() {
        // R = Ω₂²/(4Δ₁²), Ω_eff = Ω₁Ω₂/(2Δ₁); R/Ω_eff = Ω₂/(2Δ₁Ω₁)
        let zeno = classify_regime(&cfg(1e-4, 2.0, 10.0, 10.0, 0.0)).unwrap();
        assert_eq!(zeno.regime, Regime::Zeno);
        assert!((zeno.rho33_max - 1e-8 / 0.5).abs() < 1e-20);
        assert!((zeno.fwhm - 0.01).abs() < 1e-15);

        let pb = classify_regime(&cfg(0.5, 2.0, 100.0, 100.0, 0.0)).unwrap();
        assert_eq!(pb.regime, Regime::PowerBroadened);
        assert!((pb.rho33_max - 1e-4 / 2.0).abs() < 1e-18);

        let mid = classify_regime(&cfg(0.01, 2.0, 100.0, 100.0, 0.0)).unwrap();
        assert_eq!(mid.regime, Regime::Crossover);
    }
}
