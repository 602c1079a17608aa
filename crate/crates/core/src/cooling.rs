//! Sideband cooling of a trapped three-level atom in the Lamb–Dicke limit.
//!
//! The heating and cooling coefficients follow from the internal steady
//! state ρ and the resolvent of the Bloch generator L₀ at the trap frequency:
//!
//! A = (Γ₁α₁η₁² + Γ₂α₂η₂²)ρ₃₃ + Re Tr[2V(L₀ ± iν)⁻¹(Vρ)]
//!
//! where V is the first-sideband coupling and Vρ is a plain matrix product.
//! With the vectorization of [`crate::obe`], the resolvent at L₀ + iν gives
//! the cooling coefficient A₋ and L₀ − iν the heating coefficient A₊.

use nalgebra::{Matrix3, SMatrix, SVector};
use serde::Serialize;
use thiserror::Error;

use crate::discrim::{scan_grid, tuned_delta, DiscrimError, GridSpec, ProbeTuning, SpectralScan};
use crate::obe::{
    build_liouvillian, from_hermitian_coordinates, hermitian_coordinates, steady_state, DensityMatrix3, Liouvillian,
    ObeError, C64,
};
use crate::params::{ConfigError, ValidatedConfig};

/// Largest accepted relative residual of the resolvent solve.
pub const RESOLVENT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoolingError {
    #[error(transparent)]
    Obe(#[from] ObeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Discrim(#[from] DiscrimError),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("resolvent solve failed (relative residual {residual:.3e})")]
    Resolvent { residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoolingParams {
    pub cfg: ValidatedConfig,
    /// Trap frequency ν.
    pub nu: f64,
    /// Lamb–Dicke parameter of the probe beam. The sign is that of the
    /// beam's wave-vector projection on the trap axis.
    pub eta1: f64,
    /// Lamb–Dicke parameter of the pump beam, signed like `eta1`.
    pub eta2: f64,
    /// Emission-pattern coefficient for 3 → 1 decay.
    pub alpha1: f64,
    /// Emission-pattern coefficient for 3 → 2 decay.
    pub alpha2: f64,
}

impl CoolingParams {
    /// Isotropic emission, α₁ = α₂ = 1/3.
    pub fn new(cfg: ValidatedConfig, nu: f64, eta1: f64, eta2: f64) -> Self {
        Self { cfg, nu, eta1, eta2, alpha1: 1.0 / 3.0, alpha2: 1.0 / 3.0 }
    }

    fn check(&self) -> Result<(), CoolingError> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(CoolingError::Precondition("trap frequency must be positive"));
        }
        if !self.eta1.is_finite() || !self.eta2.is_finite() {
            return Err(CoolingError::Precondition("Lamb-Dicke parameters must be finite"));
        }
        if !(0.0..=1.0).contains(&self.alpha1) || !(0.0..=1.0).contains(&self.alpha2) {
            return Err(CoolingError::Precondition("emission coefficients must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Lamb–Dicke parameters large enough that the lowest-order expansion
    /// is doubtful.
    pub fn warnings(&self) -> Vec<String> {
        [("eta1", self.eta1), ("eta2", self.eta2)]
            .into_iter()
            .filter(|(_, e)| e.abs() > 0.3)
            .map(|(n, e)| format!("{n} = {e} is outside the Lamb-Dicke regime"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoolingRates {
    /// Heating coefficient A₊.
    pub a_plus: f64,
    /// Cooling coefficient A₋.
    pub a_minus: f64,
    /// q = A₊/A₋.
    pub q: f64,
    /// Mean phonon number q/(1 − q), infinite when q ≥ 1.
    pub n_bar: f64,
    /// Imaginary part of the resolvent trace discarded from A₊.
    pub im_plus: f64,
    /// Imaginary part of the resolvent trace discarded from A₋.
    pub im_minus: f64,
    /// Excited population of the internal steady state.
    pub rho33: f64,
}

impl CoolingRates {
    /// True when the thermal steady state exists.
    pub fn cools(&self) -> bool {
        (0.0..1.0).contains(&self.q)
    }
}

/// First-sideband coupling η₁(Ω₁/2)(|3⟩⟨1| − |1⟩⟨3|) + η₂(Ω₂/2)(|3⟩⟨2| − |2⟩⟨3|).
pub fn sideband_operator(cfg: &ValidatedConfig, eta1: f64, eta2: f64) -> Matrix3<f64> {
    let d = cfg.drive();
    let (a, b) = (eta1 * d.omega_1 / 2.0, eta2 * d.omega_2 / 2.0);
    let mut v = Matrix3::zeros();
    v[(2, 0)] = a;
    v[(0, 2)] = -a;
    v[(2, 1)] = b;
    v[(1, 2)] = -b;
    v
}

/// Sideband coefficient A(ω) = diffusion + Re Tr[2V(L₀ + iω)⁻¹(Vρ)] and the
/// discarded imaginary part of the trace. A₋ = A(ν) and A₊ = A(−ν).
pub fn sideband_coefficient(p: &CoolingParams, omega: f64) -> Result<(f64, f64), CoolingError> {
    let l = build_liouvillian(&p.cfg);
    let rho = steady_state(&l)?;
    let (diffusion, _) = diffusion(p, &rho);
    let t = resolvent_trace(p, &l, &rho, omega)?;
    Ok((diffusion + t.re, t.im))
}

fn diffusion(p: &CoolingParams, rho: &DensityMatrix3) -> (f64, f64) {
    let a = p.cfg.atom();
    let rho33 = rho.population(2);
    ((a.gamma_1 * p.alpha1 * p.eta1 * p.eta1 + a.gamma_2 * p.alpha2 * p.eta2 * p.eta2) * rho33, rho33)
}

fn resolvent_trace(p: &CoolingParams, l: &Liouvillian, rho: &DensityMatrix3, omega: f64) -> Result<C64, CoolingError> {
    let v = sideband_operator(&p.cfg, p.eta1, p.eta2).map(C64::from);
    let rhs = hermitian_coordinates(&(v * rho.matrix()));
    let m: SMatrix<C64, 9, 9> =
        l.matrix().map(C64::from) + SMatrix::<C64, 9, 9>::from_diagonal_element(C64::new(0.0, omega));
    let x: SVector<C64, 9> = m.lu().solve(&rhs).ok_or(CoolingError::Resolvent { residual: f64::INFINITY })?;
    let scale = rhs.norm().max(f64::MIN_POSITIVE);
    let residual = (m * x - rhs).norm() / scale;
    if !(residual <= RESOLVENT_TOLERANCE) {
        return Err(CoolingError::Resolvent { residual });
    }
    Ok((v * from_hermitian_coordinates(&x)).trace() * 2.0)
}

pub fn cooling_rates(p: &CoolingParams) -> Result<CoolingRates, CoolingError> {
    p.check()?;
    let l = build_liouvillian(&p.cfg);
    let rho = steady_state(&l)?;
    let (diffusion, rho33) = diffusion(p, &rho);
    let t_minus = resolvent_trace(p, &l, &rho, p.nu)?;
    let t_plus = resolvent_trace(p, &l, &rho, -p.nu)?;
    let a_minus = diffusion + t_minus.re;
    let a_plus = diffusion + t_plus.re;
    let q = a_plus / a_minus;
    let n_bar = if (0.0..1.0).contains(&q) { q / (1.0 - q) } else { f64::INFINITY };
    Ok(CoolingRates { a_plus, a_minus, q, n_bar, im_plus: t_plus.im, im_minus: t_minus.im, rho33 })
}

/// Geometric phonon distribution truncated at `n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalDistribution {
    /// Occupation probabilities for n = 0..=n_max, renormalized.
    pub probabilities: Vec<f64>,
    /// Probability mass beyond `n_max` in the untruncated distribution.
    pub truncation: f64,
}

impl ThermalDistribution {
    pub fn mean(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

/// Thermal state (1 − q)Σqⁿ|n⟩⟨n| for a heating-to-cooling ratio `q`.
pub fn steady_state_thermal(q: f64, n_max: usize) -> Result<ThermalDistribution, CoolingError> {
    if !(0.0..1.0).contains(&q) {
        return Err(CoolingError::Precondition("thermal state needs 0 <= q < 1"));
    }
    let truncation = q.powi(n_max as i32 + 1);
    let norm = 1.0 - truncation;
    let mut probabilities = Vec::with_capacity(n_max + 1);
    let mut qn = 1.0;
    for _ in 0..=n_max {
        probabilities.push((1.0 - q) * qn / norm);
        qn *= q;
    }
    Ok(ThermalDistribution { probabilities, truncation })
}

/// Raman detuning that puts the red sideband δ + ν on the bright peak, or
/// the detuning requested by `tuning`.
pub fn cooling_delta(p: &CoolingParams, tuning: ProbeTuning) -> Result<f64, CoolingError> {
    Ok(match tuning {
        ProbeTuning::AsConfigured | ProbeTuning::FixedDelta(_) => tuned_delta(&p.cfg, tuning)?,
        _ => tuned_delta(&p.cfg, tuning)? - p.nu,
    })
}

/// 1/q with the probe tuned per `tuning` at fixed pump detuning.
pub fn inverse_q(p: &CoolingParams, tuning: ProbeTuning) -> Result<CoolingRates, CoolingError> {
    let delta = cooling_delta(p, tuning)?;
    let d2 = p.cfg.drive().delta_2;
    let cfg = p.cfg.with_detunings(d2 + delta, d2)?;
    cooling_rates(&CoolingParams { cfg, ..*p })
}

/// Surface of 1/q = A₋/A₊ over one or two drive parameters.
///
/// Heating points (q ≥ 1) keep their value, which is then ≤ 1, and are
/// flagged invalid.
pub fn scan_cooling(template: &CoolingParams, axes: &[GridSpec], tuning: ProbeTuning) -> Result<SpectralScan, CoolingError> {
    template.check()?;
    let metadata = serde_json::json!({
        "nu": template.nu,
        "eta1": template.eta1,
        "eta2": template.eta2,
        "alpha1": template.alpha1,
        "alpha2": template.alpha2,
        "tuning": tuning,
        "axes": axes.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "config": template.cfg,
    });
    let t = *template;
    Ok(scan_grid(&template.cfg, axes, "inverse_q", metadata, move |cfg| {
        let r = inverse_q(&CoolingParams { cfg: *cfg, ..t }, tuning).ok()?;
        Some((1.0 / r.q, r.cools()))
    })?)
}
