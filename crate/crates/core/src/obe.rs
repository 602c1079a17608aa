//! Optical Bloch equations of the three-level atom, their steady state and
//! fixed-step time evolution.
//!
//! States are vectorized as
//! `(ρ11, ρ22, ρ33, Re ρ12, Im ρ12, Re ρ13, Im ρ13, Re ρ23, Im ρ23)`.
//! Working with real and imaginary parts keeps every generator real and makes
//! Hermiticity structural.

use nalgebra::{Complex, Matrix3, SMatrix, SVector, Vector3};
use thiserror::Error;

use crate::params::{Topology, ValidatedConfig};

pub type C64 = Complex<f64>;
pub type Vec9 = SVector<f64, 9>;
pub type Mat9 = SMatrix<f64, 9, 9>;

/// Position of each component in the vectorization.
pub mod index {
    pub const P1: usize = 0;
    pub const P2: usize = 1;
    pub const P3: usize = 2;
    pub const RE12: usize = 3;
    pub const IM12: usize = 4;
    pub const RE13: usize = 5;
    pub const IM13: usize = 6;
    pub const RE23: usize = 7;
    pub const IM23: usize = 8;
}

/// Off-diagonal pairs in vectorization order, each with its (Re, Im) slot.
const PAIRS: [(usize, usize, usize); 3] =
    [(0, 1, index::RE12), (0, 2, index::RE13), (1, 2, index::RE23)];

/// Singular-value ratio below which the normalized system counts as singular.
const RCOND_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObeError {
    #[error("non-unique steady state (rcond {rcond:.3e})")]
    NonUniqueSteadyState { rcond: f64 },
    #[error("open system unsupported in steady state (trace leak {leak:.3e})")]
    OpenSystem { leak: f64 },
    #[error("time step {dt} exceeds stability bound {max}")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("integration instability: {0}")]
    IntegrationUnstable(String),
    #[error("not a density matrix: {0}")]
    NotADensityMatrix(String),
}

/// A 3×3 Hermitian, unit-trace, positive semidefinite matrix in the basis
/// (|1⟩, |2⟩, |3⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3 {
    rho: Matrix3<C64>,
}

impl DensityMatrix3 {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const POSITIVITY_TOL: f64 = 1e-10;

    /// Checks Hermiticity, trace and positivity before accepting `rho`.
    pub fn new(rho: Matrix3<C64>) -> Result<Self, ObeError> {
        let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm.is_nan() || herm > Self::HERMITIAN_TOL {
            return Err(ObeError::NotADensityMatrix(format!("anti-Hermitian part {herm:.3e}")));
        }
        let s = Self { rho };
        let tr = s.trace();
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(ObeError::NotADensityMatrix(format!("trace {tr}")));
        }
        let min = s.min_eigenvalue();
        if min < -Self::POSITIVITY_TOL {
            return Err(ObeError::NotADensityMatrix(format!("eigenvalue {min:.3e}")));
        }
        Ok(s)
    }

    /// Diagonal state with the given populations (must sum to one).
    pub fn diagonal(p1: f64, p2: f64, p3: f64) -> Result<Self, ObeError> {
        Self::new(Matrix3::from_diagonal(&Vector3::new(p1, p2, p3).map(C64::from)))
    }

    /// All population in level `k` (0-based).
    pub fn basis_state(k: usize) -> Self {
        let mut rho = Matrix3::zeros();
        rho[(k, k)] = C64::from(1.0);
        Self { rho }
    }

    pub fn maximally_mixed() -> Self {
        Self { rho: Matrix3::from_diagonal_element(C64::from(1.0 / 3.0)) }
    }

    /// Projector onto the normalized pure state `psi`.
    pub fn pure(psi: Vector3<C64>) -> Result<Self, ObeError> {
        let n = psi.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(ObeError::NotADensityMatrix("zero state vector".into()));
        }
        let psi = psi / C64::from(n);
        Self::new(psi * psi.adjoint())
    }

    /// Rebuilds a state from its real vectorization without checks.
    pub fn from_vector(v: &Vec9) -> Self {
        let mut rho = Matrix3::zeros();
        for k in 0..3 {
            rho[(k, k)] = C64::from(v[k]);
        }
        for (a, b, i) in PAIRS {
            rho[(a, b)] = C64::new(v[i], v[i + 1]);
            rho[(b, a)] = C64::new(v[i], -v[i + 1]);
        }
        Self { rho }
    }

    pub fn to_vector(&self) -> Vec9 {
        let mut v = Vec9::zeros();
        for k in 0..3 {
            v[k] = self.rho[(k, k)].re;
        }
        for (a, b, i) in PAIRS {
            v[i] = self.rho[(a, b)].re;
            v[i + 1] = self.rho[(a, b)].im;
        }
        v
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.rho
    }

    /// Population of level `k` (0-based).
    pub fn population(&self, k: usize) -> f64 {
        self.rho[(k, k)].re
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho.symmetric_eigenvalues().min()
    }

    /// Largest elementwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.rho - other.rho).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Population of the excited level, ρ33.
pub fn excited_population(rho: &DensityMatrix3) -> f64 {
    rho.population(2)
}

/// Coordinates of an arbitrary complex 3×3 matrix on the Hermitian basis
/// that underlies the vectorization.
///
/// For Hermitian input these are the real vectorization; for general input
/// they are complex, and the real generator acts on them linearly.
pub fn hermitian_coordinates(m: &Matrix3<C64>) -> SVector<C64, 9> {
    let mut c = SVector::<C64, 9>::zeros();
    for k in 0..3 {
        c[k] = m[(k, k)];
    }
    // (x − y)/(2i) = −i(x − y)/2
    let minus_half_i = C64::new(0.0, -0.5);
    for (a, b, i) in PAIRS {
        c[i] = (m[(a, b)] + m[(b, a)]) * 0.5;
        c[i + 1] = (m[(a, b)] - m[(b, a)]) * minus_half_i;
    }
    c
}

/// Inverse of [`hermitian_coordinates`].
pub fn from_hermitian_coordinates(c: &SVector<C64, 9>) -> Matrix3<C64> {
    let mut m = Matrix3::zeros();
    for k in 0..3 {
        m[(k, k)] = c[k];
    }
    for (a, b, i) in PAIRS {
        m[(a, b)] = c[i] + C64::i() * c[i + 1];
        m[(b, a)] = c[i] - C64::i() * c[i + 1];
    }
    m
}

/// Rates entering the Bloch equations, copied out of a validated config.
#[derive(Debug, Clone, Copy)]
struct Rates {
    g: f64,
    g1: f64,
    g2: f64,
    g13: f64,
    g23: f64,
    gamma: f64,
    o1: f64,
    o2: f64,
    d1: f64,
    d2: f64,
    ladder: bool,
}

impl Rates {
    fn of(cfg: &ValidatedConfig) -> Self {
        let (a, d, c) = (cfg.atom(), cfg.drive(), cfg.coherence());
        Self {
            g: a.gamma_total,
            g1: a.gamma_1,
            g2: a.gamma_2,
            g13: c.gamma_13,
            g23: c.gamma_23,
            gamma: c.gamma_12,
            o1: d.omega_1,
            o2: d.omega_2,
            d1: d.delta_1,
            d2: d.delta_2,
            ladder: cfg.topology() == Topology::Ladder,
        }
    }

    /// ρ̇ for Hermitian ρ. Only the diagonal and upper triangle are computed;
    /// the rest follows by conjugation.
    fn derivative(&self, r: &Matrix3<C64>) -> Matrix3<C64> {
        let i = C64::i();
        let h1 = C64::from(self.o1 / 2.0);
        let h2 = C64::from(self.o2 / 2.0);
        let (r11, r22, r33) = (r[(0, 0)], r[(1, 1)], r[(2, 2)]);
        let (r12, r13, r23) = (r[(0, 1)], r[(0, 2)], r[(1, 2)]);
        let (r21, r31, r32) = (r[(1, 0)], r[(2, 0)], r[(2, 1)]);

        let pump1 = i * (r13 - r31) * h1;
        let pump2 = i * (r23 - r32) * h2;
        let mut d = Matrix3::zeros();
        if self.ladder {
            d[(2, 2)] = -r33 * self.g + r22 * self.g2 - pump1 - pump2;
            d[(0, 0)] = r33 * self.g1 + pump1;
            d[(1, 1)] = -r22 * self.g2 + pump2;
        } else {
            d[(2, 2)] = -r33 * self.g - pump1 - pump2;
            d[(0, 0)] = r33 * self.g1 + pump1;
            d[(1, 1)] = r33 * self.g2 + pump2;
        }
        d[(0, 2)] = C64::new(-self.g13, -self.d1) * r13 - i * (r33 - r11) * h1 + i * r12 * h2;
        d[(1, 2)] = C64::new(-self.g23, -self.d2) * r23 - i * (r33 - r22) * h2 + i * r21 * h1;
        d[(0, 1)] = C64::new(-self.gamma, self.d2 - self.d1) * r12 + i * r13 * h2 - i * r32 * h1;
        for (a, b, _) in PAIRS {
            d[(b, a)] = d[(a, b)].conj();
        }
        d
    }
}

/// Real 9×9 generator of the Bloch equations in the fixed vectorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Liouvillian {
    matrix: Mat9,
}

impl Liouvillian {
    pub fn from_matrix(matrix: Mat9) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &Mat9 {
        &self.matrix
    }

    /// ρ̇ = L(ρ).
    pub fn apply(&self, rho: &DensityMatrix3) -> Matrix3<C64> {
        DensityMatrix3::from_vector(&(self.matrix * rho.to_vector())).rho
    }

    /// Sum of the population rows; zero for a trace-preserving generator.
    pub fn trace_row(&self) -> SMatrix<f64, 1, 9> {
        self.matrix.row(0) + self.matrix.row(1) + self.matrix.row(2)
    }

    /// Largest absolute row sum, an upper bound on every eigenvalue modulus.
    pub fn max_rate(&self) -> f64 {
        self.matrix.row_iter().map(|r| r.abs().sum()).fold(0.0, f64::max)
    }

    /// Complex eigenvalues of the generator.
    pub fn eigenvalues(&self) -> SVector<C64, 9> {
        self.matrix.complex_eigenvalues()
    }
}

/// Builds the generator by applying the equations of motion to each
/// Hermitian basis element.
pub fn build_liouvillian(cfg: &ValidatedConfig) -> Liouvillian {
    let rates = Rates::of(cfg);
    let mut matrix = Mat9::zeros();
    for k in 0..9 {
        let e = Vec9::from_fn(|j, _| if j == k { 1.0 } else { 0.0 });
        let basis = DensityMatrix3::from_vector(&e);
        let col = DensityMatrix3 { rho: rates.derivative(&basis.rho) }.to_vector();
        matrix.set_column(k, &col);
    }
    Liouvillian { matrix }
}

/// Unique normalized ρ with L(ρ) = 0.
///
/// One population row is redundant for a trace-preserving generator; it is
/// replaced by Tr ρ = 1 and the system is solved by LU.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix3, ObeError> {
    let scale = l.max_rate().max(f64::MIN_POSITIVE);
    let leak = l.trace_row().abs().max();
    if leak > 1e-12 * scale.max(1.0) {
        return Err(ObeError::OpenSystem { leak });
    }

    let mut a = l.matrix;
    a.set_row(0, &SMatrix::<f64, 1, 9>::from_fn(|_, j| if j < 3 { 1.0 } else { 0.0 }));
    let sv = a.singular_values();
    let rcond = sv.min() / sv.max();
    if !(rcond > RCOND_FLOOR) {
        return Err(ObeError::NonUniqueSteadyState { rcond });
    }
    let mut b = Vec9::zeros();
    b[0] = 1.0;
    let x = a.lu().solve(&b).ok_or(ObeError::NonUniqueSteadyState { rcond })?;
    let rho = DensityMatrix3::from_vector(&x);
    let min = rho.min_eigenvalue();
    if min < -DensityMatrix3::POSITIVITY_TOL {
        return Err(ObeError::NotADensityMatrix(format!("steady state eigenvalue {min:.3e}")));
    }
    Ok(rho)
}

/// Classical fourth-order Runge–Kutta integration of ρ̇ = L(ρ) up to
/// `t_final`.
///
/// The step is shortened so that an integer number of steps lands on
/// `t_final`. Steps above `0.05 / max_rate` are refused.
pub fn evolve(l: &Liouvillian, rho0: &DensityMatrix3, t_final: f64, dt: f64) -> Result<DensityMatrix3, ObeError> {
    let max = 0.05 / l.max_rate().max(f64::MIN_POSITIVE);
    if !(dt > 0.0) || dt > max {
        return Err(ObeError::StepTooLarge { dt, max });
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(ObeError::IntegrationUnstable(format!("bad final time {t_final}")));
    }
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let m = &l.matrix;
    let mut y = rho0.to_vector();
    let tr0 = y[0] + y[1] + y[2];
    for _ in 0..steps {
        let k1 = m * y;
        let k2 = m * (y + k1 * (h / 2.0));
        let k3 = m * (y + k2 * (h / 2.0));
        let k4 = m * (y + k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    if y.iter().any(|x| !x.is_finite()) {
        return Err(ObeError::IntegrationUnstable("non-finite state".into()));
    }
    let closed = l.trace_row().abs().max() <= 1e-12 * l.max_rate().max(1.0);
    let drift = (y[0] + y[1] + y[2] - tr0).abs();
    if closed && drift > 1e-8 {
        return Err(ObeError::IntegrationUnstable(format!("trace drift {drift:.3e}")));
    }
    Ok(DensityMatrix3::from_vector(&y))
}

/// Step that satisfies the stability bound of [`evolve`] with a margin.
pub fn stable_step(l: &Liouvillian) -> f64 {
    0.05 / l.max_rate().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{AtomParams, CoherenceModel, LaserDrive, SystemConfig};

    fn cfg(drive: LaserDrive) -> ValidatedConfig {
        SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), drive).validate().unwrap()
    }

    #[test]
    fn ground_state_is_stationary_without_light() {
        let l = build_liouvillian(&cfg(LaserDrive::default()));
        let d = l.apply(&DensityMatrix3::basis_state(0));
        assert!(d.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn pure_decay_branches() {
        let l = build_liouvillian(&cfg(LaserDrive::default()));
        let d = l.apply(&DensityMatrix3::basis_state(2));
        assert_eq!(d[(2, 2)].re, -1.0);
        assert_eq!(d[(0, 0)].re, 0.5);
        assert_eq!(d[(1, 1)].re, 0.5);
    }

    #[test]
    fn undriven_steady_state_is_not_unique() {
        let l = build_liouvillian(&cfg(LaserDrive::default()));
        assert!(matches!(steady_state(&l), Err(ObeError::NonUniqueSteadyState { .. })));
    }

    #[test]
    fn open_atom_is_refused() {
        let atom = AtomParams { gamma_total: 1.0, gamma_1: 0.4, gamma_2: 0.4, closed: false };
        let c = SystemConfig::lambda(atom, LaserDrive::new(0.3, 1.0, 0.0, 0.0, 0.0)).validate().unwrap();
        assert!(matches!(steady_state(&build_liouvillian(&c)), Err(ObeError::OpenSystem { .. })));
    }

    #[test]
    fn coherent_population_trapping() {
        let (o1, o2) = (0.7, 1.3);
        let l = build_liouvillian(&cfg(LaserDrive::new(o1, o2, 0.4, 0.4, 0.0)));
        let rho = steady_state(&l).unwrap();
        assert!(excited_population(&rho).abs() < 1e-12);
        // |−⟩ ∝ Ω₂|1⟩ − Ω₁|2⟩
        let dark = DensityMatrix3::pure(Vector3::new(C64::from(o2), C64::from(-o1), C64::from(0.0))).unwrap();
        assert!(rho.max_abs_diff(&dark) < 1e-12);
    }

    #[test]
    fn resonant_value_with_finite_linewidth() {
        let c = SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::new(0.2, 4.0, 0.0, 0.0, 0.0))
            .with_coherence(CoherenceModel::explicit(0.55, 0.55, 0.1))
            .validate()
            .unwrap();
        let p = excited_population(&steady_state(&build_liouvillian(&c)).unwrap());
        // 2γΩ₁²Ω₂² / (Ω²Y + 2γ(3Ω₁²Ω₂² + 2Γ₁₃Y)) by hand
        let (o1s, o2s) = (0.04, 16.0);
        let y = 0.5 * o1s + 0.5 * o2s;
        let expect = 2.0 * 0.1 * o1s * o2s / ((o1s + o2s) * y + 0.2 * (3.0 * o1s * o2s + 1.1 * y));
        assert!((p - expect).abs() < 1e-15);
        assert!((p - 9.7867e-4).abs() < 1e-7);
    }

    #[test]
    fn coordinates_round_trip() {
        let m = Matrix3::from_fn(|a, b| C64::new(a as f64 + 0.3 * b as f64, (a * b) as f64 - 1.0));
        let back = from_hermitian_coordinates(&hermitian_coordinates(&m));
        assert!((back - m).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn evolve_without_light_keeps_ground() {
        let l = build_liouvillian(&cfg(LaserDrive::default()));
        let out = evolve(&l, &DensityMatrix3::basis_state(0), 10.0, 0.01).unwrap();
        assert_eq!(out, DensityMatrix3::basis_state(0));
    }

    #[test]
    fn evolve_decay_to_branching() {
        let l = build_liouvillian(&cfg(LaserDrive::default()));
        let out = evolve(&l, &DensityMatrix3::basis_state(2), 20.0, 0.01).unwrap();
        let expect = DensityMatrix3::diagonal(0.5, 0.5, 0.0).unwrap();
        assert!(out.max_abs_diff(&expect) < 1e-8);
    }

    #[test]
    fn evolve_refuses_large_steps() {
        let l = build_liouvillian(&cfg(LaserDrive::new(1.0, 1.0, 5.0, 5.0, 0.0)));
        let err = evolve(&l, &DensityMatrix3::basis_state(0), 1.0, 1.0).unwrap_err();
        assert!(matches!(err, ObeError::StepTooLarge { .. }));
    }

    #[test]
    fn ladder_feeds_level_three_from_two() {
        let c = SystemConfig::ladder(AtomParams::closed_ladder(1.0, 0.5), LaserDrive::default()).validate().unwrap();
        let l = build_liouvillian(&c);
        let d = l.apply(&DensityMatrix3::basis_state(1));
        assert_eq!(d[(1, 1)].re, -0.5);
        assert_eq!(d[(2, 2)].re, 0.5);
        assert!(l.trace_row().abs().max() < 1e-15);
    }

    #[test]
    fn density_matrix_checks() {
        assert!(DensityMatrix3::diagonal(0.5, 0.6, 0.0).is_err());
        assert!(DensityMatrix3::diagonal(1.1, -0.1, 0.0).is_err());
        assert!((excited_population(&DensityMatrix3::maximally_mixed()) - 1.0 / 3.0).abs() < 1e-16);
    }
}
