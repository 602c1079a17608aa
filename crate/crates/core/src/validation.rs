//! Self-consistency checks: closed forms against the Bloch-equation oracle,
//! approximations against the closed forms, and the qualitative features of
//! the figure surfaces.
//!
//! Each check draws its random configurations from a seeded ChaCha stream,
//! so a given `(samples, seed)` pair always exercises the same points.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{
    absorption_minimum_offset, derived_rates, fano_fwhm, fano_profile, far_detuned, rho33_dark_rates_form, rho33_dressed,
    rho33_exact, rho33_far_detuned, rho33_ladder, rho33_resonant, two_level_population, weak_probe,
};
use crate::cooling::{inverse_q, steady_state_thermal, CoolingParams};
use crate::discrim::{ratio_at_bright_peak, Hold, ProbeTuning, SpectralScan};
use crate::figures::{cooling_preset, fig2_config, fig3_config, symmetric_lambda, FIG2_LINEWIDTHS, FIG3_COUPLING, SURFACE_Z};
use crate::models::{rate_model_dark_simplified, zeno_rho33};
use crate::numerics::{bisect, grid_max, grid_min};
use crate::obe::{build_liouvillian, evolve, excited_population, stable_step, steady_state, DensityMatrix3};
use crate::params::{AtomParams, LaserDrive, SystemConfig, ValidatedConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub criterion: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn timed(criterion: u8, name: &'static str, body: impl FnOnce() -> (bool, String)) -> CheckOutcome {
    let start = Instant::now();
    let (passed, detail) = body();
    CheckOutcome { criterion, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// Sample sizes for [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteSize {
    pub exact: usize,
    pub evolve: usize,
    pub dark: usize,
    pub resonant: usize,
    pub hierarchy: usize,
    pub zeno: usize,
    pub rate_model: usize,
    /// Points per axis of the cooling and ratio surfaces.
    pub surface: usize,
}

impl SuiteSize {
    pub const FULL: SuiteSize = SuiteSize {
        exact: 10_000,
        evolve: 100,
        dark: 1_000,
        resonant: 1_000,
        hierarchy: 1_000,
        zeno: 1_000,
        rate_model: 1_000,
        surface: 40,
    };

    pub const REDUCED: SuiteSize = SuiteSize {
        exact: 1_000,
        evolve: 10,
        dark: 200,
        resonant: 200,
        hierarchy: 200,
        zeno: 300,
        rate_model: 300,
        surface: 20,
    };
}

/// Criteria 1–4 and 7–11.
pub fn run_suite(size: SuiteSize, seed: u64) -> Vec<CheckOutcome> {
    vec![
        exact_formula_equivalence(size.exact, seed),
        time_integration_consistency(size.evolve, seed + 1),
        dark_resonance_exactness(size.dark, seed + 2),
        resonant_reduction(size.resonant, seed + 3),
        approximation_hierarchy(size.hierarchy, seed + 7),
        central_equivalence(),
        zeno_factor_two(size.zeno, seed + 9),
        rate_model_dark_agreement(size.rate_model, seed + 10),
        cooling_properties(size.surface),
    ]
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(r.random_range(lo.log10()..hi.log10()))
}

fn rel_err(a: f64, b: f64, floor: f64) -> (f64, bool) {
    let d = (a - b).abs();
    (if b != 0.0 { d / b.abs() } else { d }, d <= (floor).max(1e-9 * b.abs()))
}

/// Λ atom with Γ = 1 split at random and Γ₁₃ = Γ₂₃ = (1 + γ)/2.
fn random_lambda(r: &mut impl Rng) -> ValidatedConfig {
    let g1 = r.random_range(0.01..0.99);
    let o1 = log_uniform(r, 1e-2, 10.0);
    let o2 = log_uniform(r, 1e-2, 10.0);
    let d1 = r.random_range(-10.0..10.0);
    let d2 = r.random_range(-10.0..10.0);
    let gamma = r.random_range(0.0..1.0);
    lambda(g1, o1, o2, d1, d2, gamma)
}

fn lambda(g1: f64, o1: f64, o2: f64, d1: f64, d2: f64, gamma: f64) -> ValidatedConfig {
    SystemConfig::lambda(AtomParams::closed_lambda(g1, 1.0 - g1), LaserDrive::new(o1, o2, d1, d2, gamma))
        .validate()
        .expect("sampled config is valid")
}

fn numeric_rho33(cfg: &ValidatedConfig) -> Option<f64> {
    steady_state(&build_liouvillian(cfg)).ok().map(|r| excited_population(&r))
}

/// Criterion 1: the closed form against the Bloch-equation steady state.
pub fn exact_formula_equivalence(samples: usize, seed: u64) -> CheckOutcome {
    timed(1, "exact formula vs steady state", || {
        let mut r = rng(seed);
        let cfgs: Vec<_> = (0..samples).map(|_| random_lambda(&mut r)).collect();
        let results: Vec<(f64, bool)> = cfgs
            .par_iter()
            .map(|c| match (rho33_exact(c), numeric_rho33(c)) {
                (Ok(a), Some(n)) => {
                    let d = (a - n).abs();
                    (if n != 0.0 { d / n.abs() } else { d }, d <= 1e-15f64.max(1e-9 * n.abs()))
                }
                _ => (f64::INFINITY, false),
            })
            .collect();
        let fails = results.iter().filter(|x| !x.1).count();
        let worst = results.iter().map(|x| x.0).fold(0.0, f64::max);
        (fails == 0, format!("{samples} configs, {fails} outside tolerance, worst relative error {worst:.2e}"))
    })
}

fn spectral_gap(cfg: &ValidatedConfig) -> f64 {
    let ev = build_liouvillian(cfg).eigenvalues();
    let mut rates: Vec<f64> = ev.iter().map(|z| -z.re).collect();
    rates.sort_by(f64::total_cmp);
    // The smallest entry belongs to the stationary state.
    rates[1]
}

/// Criterion 2: RK4 from three initial states reaches the steady state.
///
/// Configurations are drawn as for criterion 1 and kept when the slowest
/// relaxation rate is at least 0.15 Γ, so that t = 200/Γ spans enough decay
/// times to reach 10⁻⁸.
pub fn time_integration_consistency(samples: usize, seed: u64) -> CheckOutcome {
    timed(2, "time integration reaches steady state", || {
        let mut r = rng(seed);
        let mut cfgs = Vec::with_capacity(samples);
        let mut drawn = 0;
        while cfgs.len() < samples && drawn < 1000 * samples.max(1) {
            drawn += 1;
            let c = random_lambda(&mut r);
            if spectral_gap(&c) >= 0.15 {
                cfgs.push(c);
            }
        }
        let starts = [DensityMatrix3::basis_state(0), DensityMatrix3::basis_state(1), DensityMatrix3::maximally_mixed()];
        let errs: Vec<f64> = cfgs
            .par_iter()
            .map(|c| {
                let l = build_liouvillian(c);
                let Ok(ss) = steady_state(&l) else { return f64::INFINITY };
                starts
                    .iter()
                    .map(|s| evolve(&l, s, 200.0, stable_step(&l)).map_or(f64::INFINITY, |rho| rho.max_abs_diff(&ss)))
                    .fold(0.0, f64::max)
            })
            .collect();
        let worst = errs.iter().copied().fold(0.0, f64::max);
        let ok = cfgs.len() == samples && worst <= 1e-8;
        (ok, format!("{} configs (of {drawn} drawn), worst elementwise deviation {worst:.2e}", cfgs.len()))
    })
}

/// Criterion 3: the dark resonance is exactly dark without dephasing.
pub fn dark_resonance_exactness(samples: usize, seed: u64) -> CheckOutcome {
    timed(3, "dark resonance exactness", || {
        let mut r = rng(seed);
        let (mut worst_a, mut worst_n) = (0.0f64, 0.0f64);
        for _ in 0..samples {
            let g1 = r.random_range(0.01..0.99);
            let o1 = log_uniform(&mut r, 1e-2, 10.0);
            let o2 = log_uniform(&mut r, 1e-2, 10.0);
            let d = r.random_range(-10.0..10.0);
            let c = lambda(g1, o1, o2, d, d, 0.0);
            worst_a = worst_a.max(rho33_exact(&c).map_or(f64::INFINITY, f64::abs));
            worst_n = worst_n.max(numeric_rho33(&c).map_or(f64::INFINITY, f64::abs));
        }
        let ok = worst_a <= 1e-12 && worst_n <= 1e-10;
        (ok, format!("{samples} configs, max analytic {worst_a:.2e}, max numeric {worst_n:.2e}"))
    })
}

/// Criterion 4: resonant Λ and ladder reductions.
pub fn resonant_reduction(samples: usize, seed: u64) -> CheckOutcome {
    timed(4, "resonant reductions", || {
        let mut r = rng(seed);
        let (mut worst_l, mut worst_ladder) = (0.0f64, 0.0f64);
        let mut fails = 0;
        for _ in 0..samples {
            let g1 = r.random_range(0.01..0.99);
            let o1 = log_uniform(&mut r, 1e-2, 10.0);
            let o2 = log_uniform(&mut r, 1e-2, 10.0);
            let gamma = r.random_range(0.0..1.0);
            let c = lambda(g1, o1, o2, 0.0, 0.0, gamma);
            match (rho33_resonant(&c), rho33_exact(&c)) {
                (Ok(a), Ok(b)) => {
                    let d = (a - b).abs();
                    worst_l = worst_l.max(if b != 0.0 { d / b } else { d });
                    if d > 1e-12 * b.abs() && d > 1e-300 {
                        fails += 1;
                    }
                }
                _ => fails += 1,
            }

            let g2 = r.random_range(0.0..1.0);
            let lw = r.random_range(0.0..0.5);
            let o1 = log_uniform(&mut r, 1e-2, 10.0);
            let o2 = log_uniform(&mut r, 1e-2, 10.0);
            let ladder = SystemConfig::ladder(AtomParams::closed_ladder(1.0, g2), LaserDrive::new(o1, o2, 0.0, 0.0, lw))
                .validate()
                .expect("sampled config is valid");
            match (rho33_ladder(&ladder), numeric_rho33(&ladder)) {
                (Ok(a), Some(n)) => {
                    let (e, ok) = rel_err(a, n, 1e-15);
                    worst_ladder = worst_ladder.max(e);
                    if !ok {
                        fails += 1;
                    }
                }
                _ => fails += 1,
            }
        }
        (
            fails == 0,
            format!("{samples} pairs, worst Λ relative {worst_l:.2e}, worst ladder relative {worst_ladder:.2e}, {fails} failures"),
        )
    })
}

/// Absorption minimum of the Fig. 2 profile: the local minimum of ρ₃₃(δ)
/// closest to δ = 0, refined by golden section.
pub fn fig2_minimum(gamma: f64) -> Option<f64> {
    let f = |d: f64| fig2_config(gamma, d).ok().and_then(|c| rho33_exact(&c).ok()).unwrap_or(f64::INFINITY);
    let n = 3001;
    let xs = crate::numerics::spaced(-1.5, 1.5, n, false);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let k = (1..n - 1)
        .filter(|&k| ys[k] <= ys[k - 1] && ys[k] <= ys[k + 1])
        .min_by(|&a, &b| xs[a].abs().total_cmp(&xs[b].abs()))?;
    Some(grid_min(f, xs[k - 1], xs[k + 1], 3, 1e-13).0)
}

/// Criterion 5: dark zero at γ = 0 and displaced minima for γ > 0.
pub fn fig2_reproduction() -> CheckOutcome {
    timed(5, "figure 2 minima", || {
        let mut ok = true;
        let mut notes = Vec::new();
        let zero = fig2_config(0.0, 0.0).ok().and_then(|c| rho33_exact(&c).ok()).unwrap_or(f64::NAN);
        let min0 = fig2_minimum(0.0).unwrap_or(f64::NAN);
        ok &= zero.abs() <= 1e-15 && min0.abs() <= 1e-6;
        notes.push(format!("gamma=0: rho33(0)={zero:.1e}, minimum at {min0:.1e}"));
        for gamma in &FIG2_LINEWIDTHS[1..] {
            let dmin = fig2_minimum(*gamma).unwrap_or(f64::NAN);
            let predicted = fig2_config(*gamma, dmin)
                .ok()
                .and_then(|c| absorption_minimum_offset(&c).ok())
                .unwrap_or(f64::NAN);
            let rel = (dmin.abs() - predicted.abs()).abs() / predicted.abs();
            let pass = dmin.abs() > 1e-3 && rel <= 0.15;
            ok &= pass;
            notes.push(format!("gamma={gamma}: minimum at {dmin:.4}, formula {predicted:.4} ({:.1}%)", 100.0 * rel));
        }
        (ok, notes.join("; "))
    })
}

/// Criterion 6: Autler–Townes peaks of D and the two-level B peak.
pub fn fig3_reproduction() -> CheckOutcome {
    timed(6, "figure 3 manifolds", || {
        let d = |x: f64| fig3_config(x).ok().and_then(|c| rho33_exact(&c).ok()).unwrap_or(f64::NEG_INFINITY);
        let (lo, _) = grid_max(d, -5.0, -0.01, 2000, 1e-12);
        let (hi, _) = grid_max(d, 0.01, 5.0, 2000, 1e-12);
        let omega = FIG3_COUPLING * 0.2;
        let b = |x: f64| crate::analytic::two_level_profile(omega, 1.0, x);
        let (bx, bmax) = grid_max(b, -5.0, 5.0, 2001, 1e-12);
        let expect = two_level_population(0.2, 1.0, FIG3_COUPLING);
        let ok = (lo + 2.0).abs() <= 0.1 && (hi - 2.0).abs() <= 0.1 && (bmax - expect).abs() <= 1e-6;
        (ok, format!("D peaks at {lo:.4} and {hi:.4}; B peak {bmax:.6} at {bx:.1e}, expected {expect:.6}"))
    })
}

/// Criterion 7: far-detuned and Fano forms against the exact result, and
/// the bright-peak width.
///
/// Conditions are enforced with a factor-100 margin. The width is measured
/// at fixed Δ₁, which keeps Δ′ fixed along the scan, on configurations with
/// f ≤ |Δ′|/10.
pub fn approximation_hierarchy(samples: usize, seed: u64) -> CheckOutcome {
    timed(7, "approximation hierarchy", || {
        let mut r = rng(seed);
        let (mut far, mut fano, mut width) = (0.0f64, 0.0f64, 0.0f64);
        let (mut n_far, mut n_fano, mut n_width) = (0, 0, 0);
        let mut attempts = 0;
        while (n_far < samples || n_fano < samples || n_width < samples) && attempts < 100 * samples.max(1) {
            attempts += 1;
            let g1 = r.random_range(0.1..0.9);
            let o2 = log_uniform(&mut r, 0.1, 10.0);
            let d1 = log_uniform(&mut r, 10.0, 1000.0) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
            let gamma = if r.random_bool(0.5) { 0.0 } else { log_uniform(&mut r, 1e-5, 0.1) };
            let alpha = 1.0 + gamma;
            let limit = 0.01 * (g1 * o2 * o2 / (1.0 - g1)).min(g1 * alpha);
            let o1 = limit.sqrt() * log_uniform(&mut r, 0.01, 1.0);
            let dp = o2 * o2 / (4.0 * d1);

            if n_far < samples {
                let delta = dp * r.random_range(-2.0..3.0);
                let c = lambda(g1, o1, o2, d1, d1 - delta, gamma);
                if weak_probe(&c, 100.0) && far_detuned(&c, 100.0) {
                    if let (Ok(a), Ok(e)) = (rho33_far_detuned(&c), rho33_exact(&c)) {
                        far = far.max((a.value - e).abs() / e);
                        n_far += 1;
                    }
                }
            }

            let base = lambda(g1, o1, o2, d1, d1 - dp, 0.0);
            if !(weak_probe(&base, 100.0) && far_detuned(&base, 100.0)) {
                continue;
            }
            let Ok(f) = fano_fwhm(&base) else { continue };
            if n_fano < samples {
                let delta = dp + f * r.random_range(-3.0..3.0);
                let c = lambda(g1, o1, o2, d1, d1 - delta, 0.0);
                if far_detuned(&c, 100.0) {
                    if let (Ok(a), Ok(e)) = (fano_profile(&c), rho33_exact(&c)) {
                        fano = fano.max((a.value - e).abs() / e);
                        n_fano += 1;
                    }
                }
            }
            if n_width < samples && f <= dp.abs() / 10.0 {
                if let Some(w) = measured_width(&base, dp, f) {
                    width = width.max((w - f).abs() / f);
                    n_width += 1;
                }
            }
        }
        let ok = n_far == samples && n_fano == samples && n_width == samples && far <= 0.1 && fano <= 0.1 && width <= 0.02;
        (
            ok,
            format!(
                "far-detuned worst {:.2}% ({n_far}), Fano worst {:.2}% ({n_fano}), FWHM worst {:.2}% ({n_width})",
                100.0 * far,
                100.0 * fano,
                100.0 * width
            ),
        )
    })
}

/// Full width at half maximum of the exact bright peak, scanning δ at
/// fixed Δ₁.
fn measured_width(base: &ValidatedConfig, dp: f64, f: f64) -> Option<f64> {
    let d1 = base.drive().delta_1;
    let profile = |delta: f64| base.with_detunings(d1, d1 - delta).ok().and_then(|c| rho33_exact(&c).ok()).unwrap_or(0.0);
    let (peak, top) = grid_max(profile, dp - 5.0 * f, dp + 5.0 * f, 401, 1e-10 * f);
    let half = |x: f64| profile(x) - top / 2.0;
    let reach = (20.0 * f).min(0.9 * dp.abs());
    let lo = bisect(half, peak - reach, peak, 1e-12 * f)?;
    let hi = bisect(half, peak, peak + reach, 1e-12 * f)?;
    Some(hi - lo)
}

/// Criterion 8: r at Δ′ = Z against r at very large Δ₁, and the plateau.
///
/// B is held at its numerically located bright peak with Δ₁ fixed.
pub fn central_equivalence() -> CheckOutcome {
    timed(8, "bright-resonance ratio equivalence", || {
        let z = SURFACE_Z;
        let mut worst = 1.0f64;
        let mut ok = true;
        for gamma in [1e-4, 1e-3, 1e-2] {
            for o2 in [1.0, 4.0, 10.0] {
                let at = |d1: f64| {
                    let c = symmetric_lambda(1e-3, o2, d1, d1, gamma).ok()?;
                    ratio_at_bright_peak(&c, z, Hold::Probe).ok().map(|r| r.value())
                };
                match (at(o2 * o2 / (4.0 * z)), at(1e3)) {
                    (Some(a), Some(b)) => {
                        let q = a / b;
                        if (q - 1.0).abs() > (worst - 1.0).abs() {
                            worst = q;
                        }
                        ok &= (q - 1.0).abs() <= 0.25;
                    }
                    _ => ok = false,
                }
            }
        }
        let plateau = symmetric_lambda(1e-3, 100.0, 1e5, 1e5, 1e-3)
            .ok()
            .and_then(|c| ratio_at_bright_peak(&c, z, Hold::Probe).ok())
            .map_or(f64::NAN, |r| r.value());
        let expect = z * z / 1e-6 + 1.0;
        let rel = (plateau - expect).abs() / expect;
        ok &= rel <= 0.1;
        (ok, format!("worst r(Δ′=Z)/r(Δ₁=1e3) = {worst:.3}; plateau {plateau:.0} vs {expect:.0} ({:.1}%)", 100.0 * rel))
    })
}

/// Criterion 9: the Zeno picture against the dressed-state Lorentzian.
///
/// The sweep keeps Δ₂ ≥ 5Ω₂ so the Raman-flopping picture applies, and
/// places δ within five widths of the bright resonance.
pub fn zeno_factor_two(samples: usize, seed: u64) -> CheckOutcome {
    timed(9, "Zeno model within factor two", || {
        let mut r = rng(seed);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let mut n = 0;
        while n < samples {
            let o2 = log_uniform(&mut r, 0.1, 10.0);
            let o1 = o2 / log_uniform(&mut r, 10.0, 1000.0);
            let d2 = log_uniform(&mut r, 5.0, 100.0);
            if d2 < 5.0 * o2 {
                continue;
            }
            let r2 = o2 * o2 / (4.0 * d2 * d2);
            let spread = r2.max(o1 * o2 / (2.0 * d2));
            let d1 = d2 + o2 * o2 / (4.0 * d2) + spread * r.random_range(-5.0..5.0);
            let c = SystemConfig::lambda(AtomParams::closed_lambda(0.9, 0.1), LaserDrive::new(o1, o2, d1, d2, 0.0))
                .validate()
                .expect("sampled config is valid");
            let Ok(dr) = derived_rates(&c) else { continue };
            let (Ok(z), Ok(p)) = (zeno_rho33(&c, dr.delta - dr.light_shift), rho33_dressed(&c)) else { continue };
            let q = z.value / p.value;
            lo = lo.min(q);
            hi = hi.max(q);
            n += 1;
        }
        ((0.4..=2.5).contains(&lo) && (0.4..=2.5).contains(&hi), format!("{samples} points, ratio in [{lo:.3}, {hi:.3}]"))
    })
}

/// Criterion 10: the rate-equation dark model against the dark-resonance
/// closed form, for γ ≤ 10⁻³Ω₂²/Γ and 10 ≤ |Δ₁| ≤ 100.
pub fn rate_model_dark_agreement(samples: usize, seed: u64) -> CheckOutcome {
    timed(10, "rate-equation dark model", || {
        let mut r = rng(seed);
        let mut worst = 0.0f64;
        let mut n = 0;
        let mut fails = 0;
        while n < samples {
            let g1 = r.random_range(0.1..0.9);
            let o2 = log_uniform(&mut r, 0.1, 10.0);
            let d1 = log_uniform(&mut r, 10.0, 100.0) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
            let gamma = 1e-3 * o2 * o2 * log_uniform(&mut r, 1e-3, 1.0);
            let limit = 0.1 * (g1 * o2 * o2 / (1.0 - g1)).min(g1 * (1.0 + gamma));
            let o1 = limit.sqrt() * log_uniform(&mut r, 0.01, 1.0);
            let c = lambda(g1, o1, o2, d1, d1, gamma);
            if !weak_probe(&c, 10.0) {
                continue;
            }
            n += 1;
            match (rate_model_dark_simplified(&c), rho33_dark_rates_form(&c)) {
                (Ok(a), Ok(b)) => {
                    let e = (a.value - b.value).abs() / b.value;
                    worst = worst.max(e);
                    if !(e <= 0.2) {
                        fails += 1;
                    }
                }
                _ => fails += 1,
            }
        }
        (fails == 0, format!("{samples} points, worst relative difference {:.2}%", 100.0 * worst))
    })
}

/// Ridge, monotonicity and height comparison of the cooling surface
/// against the ratio surface on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceFeatures {
    /// Columns (fixed Δ₂) whose maximum over Ω₂ is interior to the grid.
    pub ridge_columns: usize,
    /// Largest |log(Δ′/ν)| at those maxima, Δ′ being the dressed light shift.
    pub ridge_spread: f64,
    /// Tolerance on `ridge_spread`: a factor 2 plus one Ω₂ grid cell.
    pub ridge_tolerance: f64,
    /// Rows (fixed Ω₂) in which 1/q decreases with Δ₂ beyond the ridge.
    pub non_monotone_rows: usize,
    /// Largest relative decrease found in those rows.
    pub worst_decrease: f64,
    pub max_inverse_q: f64,
    pub max_r: f64,
}

/// Analyses a Fig. 7 surface against the Fig. 6 surface on the same axes.
pub fn surface_features(inverse_q: &SpectralScan, r: &SpectralScan, nu: f64) -> SurfaceFeatures {
    let shape = inverse_q.shape();
    let (nd, no) = (shape[0], shape[1]);
    let d2 = &inverse_q.axes[0].values;
    let o2 = &inverse_q.axes[1].values;
    let val = |i: usize, j: usize| inverse_q.get(i, j).filter(|v| v.is_finite());

    let mut ridge_columns = 0;
    let mut ridge_spread = 0.0f64;
    for i in 0..nd {
        let best = (0..no).filter_map(|j| val(i, j).map(|v| (j, v))).max_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((j, _)) = best {
            if j > 0 && j + 1 < no {
                ridge_columns += 1;
                // Light shift of the dressed ground level, Δ′ when Δ₂ ≫ Ω₂.
                let shift = (d2[i].hypot(o2[j]) - d2[i].abs()) / 2.0;
                ridge_spread = ridge_spread.max((shift / nu).ln().abs());
            }
        }
    }

    let mut non_monotone_rows = 0;
    let mut worst_decrease = 0.0f64;
    for j in 0..no {
        let ridge = o2[j] * o2[j] / (4.0 * nu);
        // One grid cell of slack past the ridge position.
        let Some(start) = d2.iter().position(|&x| x >= ridge).map(|k| k + 1) else { continue };
        let mut bad = false;
        for i in start..nd.saturating_sub(1) {
            if let (Some(a), Some(b)) = (val(i, j), val(i + 1, j)) {
                if b < a {
                    bad = true;
                    worst_decrease = worst_decrease.max((a - b) / a);
                }
            }
        }
        non_monotone_rows += bad as usize;
    }

    let max_of = |s: &SpectralScan| s.values.iter().flatten().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let cell = if no > 1 { (o2[1] / o2[0]).ln().abs() } else { 0.0 };
    SurfaceFeatures {
        ridge_columns,
        ridge_spread,
        ridge_tolerance: 2f64.ln() + 2.0 * cell,
        non_monotone_rows,
        worst_decrease,
        max_inverse_q: max_of(inverse_q),
        max_r: max_of(r),
    }
}

/// Criterion 11: reality of A±, η-homogeneity, the thermal identity and
/// the qualitative shape of the cooling surface on an `n`×`n` grid.
pub fn cooling_properties(n: usize) -> CheckOutcome {
    timed(11, "cooling properties", || {
        let preset = cooling_preset();
        let mut notes = Vec::new();
        let mut ok = true;

        let points: Vec<CoolingParams> = [(1.0, 1.0), (1.0, 5.0), (4.0, 20.0), (10.0, 125.0), (0.5, 0.3)]
            .iter()
            .filter_map(|&(o2, d2)| {
                let cfg = preset.cfg.with_drive(|d| {
                    d.omega_2 = o2;
                    d.delta_2 = d2;
                    d.delta_1 = d2;
                });
                cfg.ok().map(|cfg| CoolingParams { cfg, ..preset })
            })
            .collect();

        // (a) imaginary part of the resolvent trace relative to A±
        let mut imag = 0.0f64;
        let mut rates = Vec::new();
        for p in &points {
            match inverse_q(p, ProbeTuning::TrackBrightPeak) {
                Ok(r) => {
                    imag = imag.max(r.im_plus.abs() / r.a_plus.abs()).max(r.im_minus.abs() / r.a_minus.abs());
                    rates.push(r);
                }
                Err(_) => ok = false,
            }
        }
        let real = imag <= 1e-10;
        ok &= real;
        notes.push(format!("(a) max |Im|/|A| {imag:.2e}"));

        // (b) η-homogeneity
        let mut homog = 0.0f64;
        for p in &points {
            let half = CoolingParams { eta1: 0.5 * p.eta1, eta2: 0.5 * p.eta2, ..*p };
            match (inverse_q(p, ProbeTuning::TrackBrightPeak), inverse_q(&half, ProbeTuning::TrackBrightPeak)) {
                (Ok(a), Ok(b)) => homog = homog.max((a.q / b.q - 1.0).abs()),
                _ => ok = false,
            }
        }
        ok &= homog <= 1e-6;
        notes.push(format!("(b) η scaling changes 1/q by {homog:.1e}"));

        // (c) thermal mean against q/(1 − q)
        let mut thermal = 0.0f64;
        let qs: Vec<f64> = rates.iter().filter(|r| r.cools()).map(|r| r.q).chain([0.0, 0.5, 0.9]).collect();
        for q in qs {
            let n_max = if q > 0.0 { (40.0 / -q.log10()).ceil() as usize + 10 } else { 10 };
            match steady_state_thermal(q, n_max) {
                Ok(t) => {
                    let nbar = q / (1.0 - q);
                    thermal = thermal.max((t.mean() - nbar).abs() / nbar.max(1.0));
                }
                Err(_) => ok = false,
            }
        }
        ok &= thermal <= 1e-12;
        notes.push(format!("(c) thermal mean deviation {thermal:.1e}"));

        // (d) surfaces
        match (crate::figures::figure7(n, n), crate::figures::figure6(n, n)) {
            (Ok(q), Ok(r)) => {
                let f = surface_features(&q, &r, preset.nu);
                let ridge = f.ridge_columns > 0 && f.ridge_spread <= f.ridge_tolerance;
                let mono = f.non_monotone_rows == 0;
                let lower = f.max_inverse_q < f.max_r;
                ok &= ridge && mono && lower;
                notes.push(format!(
                    "(d) ridge columns {} with Δ′/ν within ×{:.2} (allowed ×{:.2}); {} rows decrease past the ridge (worst {:.2}%); \
                     max 1/q {:.3e} vs max r {:.3e}",
                    f.ridge_columns,
                    f.ridge_spread.exp(),
                    f.ridge_tolerance.exp(),
                    f.non_monotone_rows,
                    100.0 * f.worst_decrease,
                    f.max_inverse_q,
                    f.max_r
                ));
            }
            _ => {
                ok = false;
                notes.push("(d) surface scan failed".into());
            }
        }
        (ok, notes.join("; "))
    })
}
