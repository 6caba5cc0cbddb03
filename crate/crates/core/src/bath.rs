//! Discretized Ohmic bath, coupling constants and the initial product state.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::GaussianState;

/// Enveloped sinusoidal force on the system coordinate,
/// `F(t) = F0 sin(ω_f t + φ) sin²(Ω_f t)` for `t ≤ π/Ω_f` and zero afterwards.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrivePulse {
    pub f0: f64,
    pub omega_f: f64,
    /// Envelope frequency `Ω_f`.
    pub envelope: f64,
    pub phi: f64,
}

impl DrivePulse {
    pub fn off() -> Self {
        DrivePulse { f0: 0.0, omega_f: 0.0, envelope: 1.0, phi: 0.0 }
    }

    /// Pulse lasting `t_f`, i.e. `Ω_f = π / t_f`.
    pub fn with_duration(f0: f64, omega_f: f64, t_f: f64, phi: f64) -> Self {
        DrivePulse { f0, omega_f, envelope: PI / t_f, phi }
    }

    pub fn is_off(&self) -> bool {
        self.f0 == 0.0
    }

    pub fn duration(&self) -> f64 {
        PI / self.envelope
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.f0, self.omega_f, self.envelope, self.phi].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidSpec("drive parameters must be finite".into()));
        }
        if self.envelope <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "pulse duration must be positive (envelope frequency {})",
                self.envelope
            )));
        }
        Ok(())
    }
}

pub fn drive_force(pulse: &DrivePulse, t: f64) -> f64 {
    if pulse.is_off() || t > pulse.duration() || t < 0.0 {
        return 0.0;
    }
    let env = (pulse.envelope * t).sin();
    pulse.f0 * (pulse.omega_f * t + pulse.phi).sin() * env * env
}

pub fn drive_force_derivative(pulse: &DrivePulse, t: f64) -> f64 {
    if pulse.is_off() || t > pulse.duration() || t < 0.0 {
        return 0.0;
    }
    let (s, c) = (pulse.omega_f * t + pulse.phi).sin_cos();
    let env = (pulse.envelope * t).sin();
    pulse.f0 * (pulse.omega_f * c * env * env + pulse.envelope * s * (2.0 * pulse.envelope * t).sin())
}

/// One Caldeira–Leggett instance. Units: `ħ = k_B = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n_modes: usize,
    pub omega0: f64,
    pub omega_max: f64,
    pub gamma: f64,
    pub cutoff: f64,
    pub temperature: f64,
    pub drive: DrivePulse,
}

impl Default for ModelSpec {
    fn default() -> Self {
        let mut spec = ModelSpec {
            n_modes: 400,
            omega0: 1.0,
            omega_max: 40.0,
            gamma: 0.1,
            cutoff: 40.0,
            temperature: 10.0,
            drive: DrivePulse::off(),
        };
        let t_f = 0.5 * recurrence_time(&spec);
        spec.drive = DrivePulse::with_duration(0.0, 1.2, t_f, 0.0);
        spec
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n_modes == 0 {
            return bad("n_modes must be at least 1".into());
        }
        for (name, v) in [
            ("omega0", self.omega0),
            ("omega_max", self.omega_max),
            ("cutoff", self.cutoff),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return bad(format!("gamma must be non-negative, got {}", self.gamma));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad(format!("temperature must be non-negative, got {}", self.temperature));
        }
        self.drive.validate()
    }

    /// Grid spacing `Δ = ω_max / N`.
    pub fn spacing(&self) -> f64 {
        self.omega_max / self.n_modes as f64
    }

    /// `ω_n = nΔ`, `n = 1..=N`.
    pub fn bath_frequencies(&self) -> Vec<f64> {
        let delta = self.spacing();
        (1..=self.n_modes).map(|n| n as f64 * delta).collect()
    }

    /// `1/T`, infinite at `T = 0`.
    pub fn beta(&self) -> f64 {
        if self.temperature == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.temperature
        }
    }
}

pub fn recurrence_time(spec: &ModelSpec) -> f64 {
    2.0 * PI * spec.n_modes as f64 / spec.omega_max
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSet {
    pub kappa: Vec<f64>,
    pub omega_b: f64,
}

/// Ohmic spectral density with a sharp cutoff, `J(ω) = (2γ/π) ω Θ(Ω - ω)`.
pub fn spectral_density(gamma: f64, cutoff: f64, omega: f64) -> f64 {
    if omega <= cutoff {
        2.0 * gamma / PI * omega
    } else {
        0.0
    }
}

pub fn build_couplings(spec: &ModelSpec) -> CouplingSet {
    let delta = spec.spacing();
    let freqs = spec.bath_frequencies();
    let kappa: Vec<f64> = freqs
        .iter()
        .map(|&w| (2.0 * delta * w * spectral_density(spec.gamma, spec.cutoff, w)).sqrt())
        .collect();
    let shift: f64 = kappa.iter().zip(&freqs).map(|(k, w)| k * k / (w * w)).sum();
    CouplingSet { omega_b: (spec.omega0 * spec.omega0 + shift).sqrt(), kappa }
}

/// Arrowhead position block of the Hamiltonian matrix: `ω_b²` in the corner,
/// `ω_n²` on the diagonal and `-κ_n` along the first row and column.
pub fn hamiltonian_position_block(spec: &ModelSpec, couplings: &CouplingSet) -> DMatrix<f64> {
    let n = spec.n_modes;
    let freqs = spec.bath_frequencies();
    let mut hx = DMatrix::zeros(n + 1, n + 1);
    hx[(0, 0)] = couplings.omega_b * couplings.omega_b;
    for (i, (&w, &k)) in freqs.iter().zip(&couplings.kappa).enumerate() {
        hx[(i + 1, i + 1)] = w * w;
        hx[(0, i + 1)] = -k;
        hx[(i + 1, 0)] = -k;
    }
    hx
}

/// `coth(ω / 2T)`, with the `T = 0` limit taken as 1.
pub fn thermal_factor(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 1.0;
    }
    let x = omega / (2.0 * temperature);
    if x > 20.0 {
        // tanh saturates; keep the exponentially small correction explicit.
        1.0 + 2.0 * (-2.0 * x).exp()
    } else {
        1.0 / x.tanh()
    }
}

/// Diagonal of the initial covariance: `(⟨x²⟩, ⟨p²⟩)` for the system ground
/// state followed by each thermal bath mode.
pub fn initial_variances(spec: &ModelSpec) -> (DVector<f64>, DVector<f64>) {
    let n = spec.n_modes;
    let mut xx = DVector::zeros(n + 1);
    let mut pp = DVector::zeros(n + 1);
    xx[0] = 0.5 / spec.omega0;
    pp[0] = 0.5 * spec.omega0;
    for (i, w) in spec.bath_frequencies().into_iter().enumerate() {
        let c = thermal_factor(w, spec.temperature);
        xx[i + 1] = 0.5 * c / w;
        pp[i + 1] = 0.5 * c * w;
    }
    (xx, pp)
}

pub fn initial_state(spec: &ModelSpec) -> GaussianState {
    let (xx, pp) = initial_variances(spec);
    let n = xx.len();
    let mut cov = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        cov[(i, i)] = xx[i];
        cov[(n + i, n + i)] = pp[i];
    }
    GaussianState::new(DVector::zeros(2 * n), cov).expect("diagonal initial covariance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, gamma: f64) -> ModelSpec {
        ModelSpec { n_modes: n, gamma, ..ModelSpec::default() }
    }

    #[test]
    fn zero_coupling() {
        let c = build_couplings(&spec(10, 0.0));
        assert!(c.kappa.iter().all(|&k| k == 0.0));
        assert_eq!(c.omega_b, 1.0);
    }

    #[test]
    fn default_grid_keeps_every_mode() {
        let s = ModelSpec::default();
        let c = build_couplings(&s);
        assert_eq!(*s.bath_frequencies().last().unwrap(), 40.0);
        assert!(c.kappa.iter().all(|&k| k > 0.0));
    }

    #[test]
    fn first_coupling_value() {
        // γ = 0.1, Δ = 0.1, ω_1 = 0.1
        let s = ModelSpec { n_modes: 400, gamma: 0.1, omega_max: 40.0, ..ModelSpec::default() };
        let c = build_couplings(&s);
        assert!((c.kappa[0] - 0.011_283_791_670_955_126).abs() < 1e-15);
    }

    #[test]
    fn modes_above_cutoff_decouple() {
        let s = ModelSpec { n_modes: 10, omega_max: 10.0, cutoff: 5.0, gamma: 1.0, ..ModelSpec::default() };
        let c = build_couplings(&s);
        assert!(c.kappa[4] > 0.0);
        assert!(c.kappa[5..].iter().all(|&k| k == 0.0));
    }

    #[test]
    fn decoupled_arrowhead_is_diagonal() {
        let s = ModelSpec { n_modes: 1, omega_max: 3.0, gamma: 0.0, ..ModelSpec::default() };
        let hx = hamiltonian_position_block(&s, &build_couplings(&s));
        assert_eq!(hx, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 9.0]));
    }

    #[test]
    fn arrowhead_from_explicit_couplings() {
        let s = ModelSpec { n_modes: 2, omega_max: 2.0, ..ModelSpec::default() };
        let kappa = vec![0.1, 0.2];
        let omega_b = (1.0f64 + 0.01 + 0.04 / 4.0).sqrt();
        let hx = hamiltonian_position_block(&s, &CouplingSet { kappa, omega_b });
        assert_eq!(hx[(0, 1)], -0.1);
        assert_eq!(hx[(0, 2)], -0.2);
        assert!((hx[(0, 0)] - 1.02).abs() < 1e-15);
        assert_eq!(hx, hx.transpose());
    }

    #[test]
    fn initial_variances_thermal() {
        let s = ModelSpec { n_modes: 1, omega_max: 1.0, temperature: 1.0, ..ModelSpec::default() };
        let (xx, pp) = initial_variances(&s);
        assert!((xx[1] - 1.081_976_706_869_326_4).abs() < 1e-14);
        assert!((pp[1] - 1.081_976_706_869_326_4).abs() < 1e-14);
        assert_eq!((xx[0], pp[0]), (0.5, 0.5));
    }

    #[test]
    fn zero_temperature_limit() {
        let s = ModelSpec { n_modes: 1, omega_max: 2.0, temperature: 0.0, ..ModelSpec::default() };
        let (xx, pp) = initial_variances(&s);
        assert_eq!((xx[1], pp[1]), (0.25, 1.0));
        // tiny temperatures must not overflow
        assert_eq!(thermal_factor(2.0, 1e-300), 1.0);
    }

    #[test]
    fn recurrence() {
        assert!((recurrence_time(&ModelSpec::default()) - 20.0 * PI).abs() < 1e-12);
        let s = ModelSpec { n_modes: 1, omega_max: 2.0 * PI, ..ModelSpec::default() };
        assert!((recurrence_time(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pulse_values() {
        let p = DrivePulse::with_duration(10.0, 1.2, 10.0 * PI, 0.0);
        assert_eq!(drive_force(&p, p.duration() + 1e-9), 0.0);
        assert!(drive_force(&p, p.duration()).abs() < 1e-12);
        // 10 sin(6) sin²(0.5)
        assert!((drive_force(&p, 5.0) - (-0.642_233_301_133_755_9)).abs() < 1e-14);
        assert_eq!(drive_force(&DrivePulse::off(), 3.0), 0.0);
    }

    #[test]
    fn pulse_derivative_matches_difference() {
        let p = DrivePulse::with_duration(10.0, 1.2, 31.4, 0.3);
        for &t in &[0.7, 5.0, 12.3, 30.0] {
            let h = 1e-6;
            let fd = (drive_force(&p, t + h) - drive_force(&p, t - h)) / (2.0 * h);
            let an = drive_force_derivative(&p, t);
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-3), "t={t}: {fd} vs {an}");
        }
    }
}
