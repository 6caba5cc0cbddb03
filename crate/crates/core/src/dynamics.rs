//! Time sampling of the observables needed for thermodynamics.
//!
//! Every quantity is read off the closed-form solution at each requested
//! time. Only row 0 of the propagator is needed for the system moments, the
//! bath energy, the bath entropy and the negativity; the full matrices are
//! built only when per-mode bath marginals are requested.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rayon::prelude::*;

use crate::bath::{
    build_couplings, drive_force, drive_force_derivative, hamiltonian_position_block, initial_variances,
    ModelSpec,
};
use crate::drive::DriveResponse;
use crate::error::Result;
use crate::gaussian::{mode_entropy, negativity_from_spectrum, rank_two_spectrum, von_neumann_entropy};
use crate::normal_modes::{diagonalize, NormalModeBasis, Propagator};
use crate::state::GaussianState;

/// Which groups of observables to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Observables {
    pub thermo: bool,
    /// Bath entropy `S_E`; implied by `decomposition`.
    pub entropy: bool,
    /// Per-mode bath moments and `S_E`.
    pub decomposition: bool,
    pub negativity: bool,
}

impl Default for Observables {
    fn default() -> Self {
        Observables { thermo: true, entropy: true, decomposition: true, negativity: true }
    }
}

impl Observables {
    pub fn thermo_only() -> Self {
        Observables { thermo: true, entropy: false, decomposition: false, negativity: false }
    }
}

/// First and second moments of one mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeMoments {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

impl ModeMoments {
    pub fn to_state(&self) -> Result<GaussianState> {
        GaussianState::one_mode(self.mean, self.cov)
    }

    /// `⟨p²⟩/2 + ω²⟨x²⟩/2`.
    pub fn energy(&self, omega: f64) -> f64 {
        let x2 = self.cov[(0, 0)] + self.mean[0] * self.mean[0];
        let p2 = self.cov[(1, 1)] + self.mean[1] * self.mean[1];
        0.5 * (p2 + omega * omega * x2)
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub t: f64,
    pub force: f64,
    pub force_rate: f64,
    pub system: ModeMoments,
    /// `Σ_n ⟨p_n² + ω_n² x_n²⟩/2`.
    pub bath_energy: f64,
    pub bath_modes: Option<Vec<ModeMoments>>,
    pub bath_entropy: Option<f64>,
    pub negativity: Option<f64>,
}

/// Bilinear forms giving the bath energy from the spectral factors.
#[derive(Clone, Debug)]
struct EnergyForms {
    cos: DMatrix<f64>,
    sin: DMatrix<f64>,
    zsin: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct Dynamics {
    spec: ModelSpec,
    bath_freqs: Vec<f64>,
    basis: NormalModeBasis,
    xx0: DVector<f64>,
    pp0: DVector<f64>,
    nu0: Vec<f64>,
    drive: DriveResponse,
    forms: EnergyForms,
}

/// `Zᵀ diag(x) Z`.
fn congruence(z: &DMatrix<f64>, x: &DVector<f64>) -> DMatrix<f64> {
    let mut scaled = z.clone();
    for (mut row, &v) in scaled.row_iter_mut().zip(x.iter()) {
        row *= v;
    }
    z.transpose() * scaled
}

impl Dynamics {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        let couplings = build_couplings(spec);
        let hx = hamiltonian_position_block(spec, &couplings);
        let basis = diagonalize(&hx)?;
        let (xx0, pp0) = initial_variances(spec);
        let nu0 = xx0.iter().zip(pp0.iter()).map(|(a, b)| (a * b).sqrt()).collect();
        let bath_freqs = spec.bath_frequencies();
        let drive = DriveResponse::new(&spec.drive, basis.z.as_slice());

        let n = basis.len();
        let mut wx = DVector::zeros(n);
        let mut wp = DVector::zeros(n);
        for (k, w) in bath_freqs.iter().enumerate() {
            wx[k + 1] = w * w;
            wp[k + 1] = 1.0;
        }
        let z = &basis.vectors;
        let g_wx = congruence(z, &wx);
        let g_wp = congruence(z, &wp);
        let g_a = congruence(z, &xx0);
        let g_b = congruence(z, &pp0);
        let forms = EnergyForms {
            cos: g_wx.component_mul(&g_a) + g_wp.component_mul(&g_b),
            sin: g_wx.component_mul(&g_b),
            zsin: g_wp.component_mul(&g_a),
        };
        Ok(Dynamics { spec: spec.clone(), bath_freqs, basis, xx0, pp0, nu0, drive, forms })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn basis(&self) -> &NormalModeBasis {
        &self.basis
    }

    pub fn bath_frequencies(&self) -> &[f64] {
        &self.bath_freqs
    }

    pub fn initial_state(&self) -> GaussianState {
        crate::bath::initial_state(&self.spec)
    }

    /// Initial per-mode moments, system first.
    pub fn initial_modes(&self) -> Vec<ModeMoments> {
        self.xx0
            .iter()
            .zip(self.pp0.iter())
            .map(|(&a, &b)| ModeMoments { mean: Vector2::zeros(), cov: Matrix2::new(a, 0.0, 0.0, b) })
            .collect()
    }

    /// Entropy of the full state, conserved by the unitary dynamics.
    pub fn total_entropy(&self) -> Result<f64> {
        self.nu0.iter().map(|&nu| mode_entropy(nu)).sum()
    }

    pub fn propagator(&self, t: f64) -> Propagator {
        self.basis.propagator(&self.drive, t)
    }

    pub fn sample(&self, t: f64, obs: Observables) -> Result<Sample> {
        let n = self.basis.len();
        let sp = self.basis.spectral(t);
        let a0 = self.basis.assemble_row0(&sp.sin_over_z);
        let ad0 = self.basis.assemble_row0(&sp.cos);
        let add0 = self.basis.assemble_row0(&sp.minus_z_sin);
        let (i, idot) = self.basis.displacement(&self.drive, t);

        let (mut sxx, mut sxp, mut spp) = (0.0, 0.0, 0.0);
        for r in 0..n {
            let (a, b) = (self.xx0[r], self.pp0[r]);
            sxx += ad0[r] * ad0[r] * a + a0[r] * a0[r] * b;
            sxp += ad0[r] * add0[r] * a + a0[r] * ad0[r] * b;
            spp += add0[r] * add0[r] * a + ad0[r] * ad0[r] * b;
        }
        let system = ModeMoments { mean: Vector2::new(i[0], idot[0]), cov: Matrix2::new(sxx, sxp, sxp, spp) };

        let quad = |m: &DMatrix<f64>, v: &DVector<f64>| v.dot(&(m * v));
        let mut bath_energy =
            0.5 * (quad(&self.forms.cos, &sp.cos) + quad(&self.forms.sin, &sp.sin_over_z) + quad(&self.forms.zsin, &sp.minus_z_sin));
        for (k, w) in self.bath_freqs.iter().enumerate() {
            bath_energy += 0.5 * (idot[k + 1] * idot[k + 1] + w * w * i[k + 1] * i[k + 1]);
        }

        let (u, v) = if obs.entropy || obs.decomposition || obs.negativity {
            let sa = self.xx0.map(f64::sqrt);
            let sb = self.pp0.map(f64::sqrt);
            let mut u = DVector::zeros(2 * n);
            let mut v = DVector::zeros(2 * n);
            for r in 0..n {
                u[r] = sa[r] * ad0[r];
                u[n + r] = sb[r] * a0[r];
                v[r] = sa[r] * add0[r];
                v[n + r] = sb[r] * ad0[r];
            }
            (u, v)
        } else {
            (DVector::zeros(0), DVector::zeros(0))
        };

        let mut bath_modes = None;
        let mut bath_entropy = None;
        if obs.entropy || obs.decomposition {
            let spectrum = rank_two_spectrum(&self.nu0, &u, &v, -1.0, 1)?;
            bath_entropy = Some(von_neumann_entropy(&spectrum)?);
        }
        if obs.decomposition {
            let a = self.basis.assemble(&sp.sin_over_z);
            let ad = self.basis.assemble(&sp.cos);
            let add = self.basis.assemble(&sp.minus_z_sin);
            let mut modes = Vec::with_capacity(n - 1);
            for m in 1..n {
                // symmetric matrices: column m is row m
                let (ca, cad, cadd) = (a.column(m), ad.column(m), add.column(m));
                let (mut xx, mut xp, mut pp) = (0.0, 0.0, 0.0);
                for r in 0..n {
                    let (da, db) = (self.xx0[r], self.pp0[r]);
                    xx += cad[r] * cad[r] * da + ca[r] * ca[r] * db;
                    xp += cad[r] * cadd[r] * da + ca[r] * cad[r] * db;
                    pp += cadd[r] * cadd[r] * da + cad[r] * cad[r] * db;
                }
                modes.push(ModeMoments { mean: Vector2::new(i[m], idot[m]), cov: Matrix2::new(xx, xp, xp, pp) });
            }
            bath_modes = Some(modes);
        }

        let negativity = if obs.negativity {
            Some(negativity_from_spectrum(&rank_two_spectrum(&self.nu0, &u, &v, -2.0, 0)?))
        } else {
            None
        };

        Ok(Sample {
            t,
            force: drive_force(&self.spec.drive, t),
            force_rate: drive_force_derivative(&self.spec.drive, t),
            system,
            bath_energy,
            bath_modes,
            bath_entropy,
            negativity,
        })
    }

    /// Samples at each time (in parallel) plus the `t = 0` reference.
    pub fn trajectory(&self, times: &[f64], obs: Observables) -> Result<Trajectory> {
        let samples = times.par_iter().map(|&t| self.sample(t, obs)).collect::<Result<Vec<_>>>()?;
        let initial = match samples.first() {
            Some(s) if s.t == 0.0 => s.clone(),
            _ => self.sample(0.0, obs)?,
        };
        Ok(Trajectory {
            spec: self.spec.clone(),
            bath_freqs: self.bath_freqs.clone(),
            total_entropy: self.total_entropy()?,
            initial,
            samples,
        })
    }
}

/// Sampled dynamics of one model together with the references the
/// thermodynamic quantities are measured against.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub spec: ModelSpec,
    pub bath_freqs: Vec<f64>,
    pub total_entropy: f64,
    pub initial: Sample,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }
}

/// `n` equally spaced points on `[0, t_end]`, with the endpoint exact.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_end],
        _ => (0..n).map(|k| if k + 1 == n { t_end } else { t_end * k as f64 / (n - 1) as f64 }).collect(),
    }
}
