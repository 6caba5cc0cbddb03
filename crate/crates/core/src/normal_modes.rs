//! Normal-mode diagonalization and the closed-form propagator.

use std::ops::AddAssign;

use nalgebra::{DMatrix, DVector};

use crate::bath::DrivePulse;
use crate::drive::DriveResponse;
use crate::error::{Error, Result};
use crate::linalg::{asymmetry, sym_eigen};
use crate::state::GaussianState;

pub use crate::bath::recurrence_time;

/// Normal frequencies `z_ν` (ascending) and the orthogonal matrix `Z` whose
/// columns are the corresponding eigenvectors of the position block.
#[derive(Clone, Debug)]
pub struct NormalModeBasis {
    pub z: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn diagonalize(hx: &DMatrix<f64>) -> Result<NormalModeBasis> {
    if hx.nrows() != hx.ncols() {
        return Err(Error::DimensionMismatch { expected: hx.nrows(), got: hx.ncols() });
    }
    let asym = asymmetry(hx);
    if asym > 1e-12 * hx.amax() {
        return Err(Error::NotSymmetric(asym));
    }
    let (lambda, mut vectors) = sym_eigen(hx)?;
    if let Some(&bad) = lambda.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Unstable { eigenvalue: bad });
    }
    for mut col in vectors.column_iter_mut() {
        let mut pivot = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
    }
    Ok(NormalModeBasis { z: lambda.map(f64::sqrt), vectors })
}

/// Per-mode factors `(sin(zt)/z, cos(zt), -z sin(zt))`.
pub(crate) struct Spectral {
    pub sin_over_z: DVector<f64>,
    pub cos: DVector<f64>,
    pub minus_z_sin: DVector<f64>,
}

impl NormalModeBasis {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub(crate) fn spectral(&self, t: f64) -> Spectral {
        let n = self.len();
        let mut s = DVector::zeros(n);
        let mut c = DVector::zeros(n);
        let mut d = DVector::zeros(n);
        for (i, &z) in self.z.iter().enumerate() {
            let (sn, cs) = (z * t).sin_cos();
            s[i] = sn / z;
            c[i] = cs;
            d[i] = -z * sn;
        }
        Spectral { sin_over_z: s, cos: c, minus_z_sin: d }
    }

    /// `Z diag(f) Zᵀ`.
    pub fn assemble(&self, f: &DVector<f64>) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (mut col, &v) in scaled.column_iter_mut().zip(f.iter()) {
            col *= v;
        }
        scaled * self.vectors.transpose()
    }

    /// Row 0 of `Z diag(f) Zᵀ`, i.e. `Z (Z₀ ∘ f)`.
    pub fn assemble_row0(&self, f: &DVector<f64>) -> DVector<f64> {
        let w = DVector::from_fn(self.len(), |j, _| self.vectors[(0, j)] * f[j]);
        &self.vectors * w
    }

    /// `(I, İ)` from per-mode drive convolutions.
    pub fn displacement(&self, response: &DriveResponse, t: f64) -> (DVector<f64>, DVector<f64>) {
        let n = self.len();
        if response.is_off() {
            return (DVector::zeros(n), DVector::zeros(n));
        }
        let (sine, cosine) = response.convolutions(t);
        (
            self.assemble_row0(&DVector::from_vec(sine)),
            self.assemble_row0(&DVector::from_vec(cosine)),
        )
    }

    pub fn propagator(&self, response: &DriveResponse, t: f64) -> Propagator {
        let sp = self.spectral(t);
        let (i, idot) = self.displacement(response, t);
        Propagator {
            t,
            a: self.assemble(&sp.sin_over_z),
            adot: self.assemble(&sp.cos),
            addot: self.assemble(&sp.minus_z_sin),
            i,
            idot,
        }
    }
}

/// Exact solution at time `t`: `x(t) = Ȧ x(0) + A p(0) + I`,
/// `p(t) = Ä x(0) + Ȧ p(0) + İ`.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub t: f64,
    pub a: DMatrix<f64>,
    pub adot: DMatrix<f64>,
    pub addot: DMatrix<f64>,
    pub i: DVector<f64>,
    pub idot: DVector<f64>,
}

impl Propagator {
    /// The symplectic block map `[[Ȧ, A], [Ä, Ȧ]]`.
    pub fn block_map(&self) -> DMatrix<f64> {
        let n = self.a.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.adot);
        m.view_mut((0, n), (n, n)).copy_from(&self.a);
        m.view_mut((n, 0), (n, n)).copy_from(&self.addot);
        m.view_mut((n, n), (n, n)).copy_from(&self.adot);
        m
    }
}

/// Propagator for a single time. Building the drive response dominates for
/// driven runs; use [`crate::dynamics::Dynamics`] to reuse it across times.
pub fn propagator_at(basis: &NormalModeBasis, pulse: &DrivePulse, t: f64) -> Propagator {
    let response = DriveResponse::new(pulse, basis.z.as_slice());
    basis.propagator(&response, t)
}

pub fn evolve(state0: &GaussianState, prop: &Propagator) -> Result<GaussianState> {
    let n = prop.a.nrows();
    if state0.n_modes() != n {
        return Err(Error::DimensionMismatch { expected: n, got: state0.n_modes() });
    }
    let m = prop.block_map();
    let mut means = &m * state0.means();
    means.rows_mut(0, n).add_assign(&prop.i);
    means.rows_mut(n, n).add_assign(&prop.idot);
    let cov = &m * state0.cov() * m.transpose();
    GaussianState::new(means, cov)
}
