//! Entropic quantities of Gaussian states: marginals, symplectic spectra,
//! von Neumann and relative entropies, mutual information and negativity.
//!
//! Convention: the vacuum has symplectic eigenvalue 1/2.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, omega_mul, sym_eigen, sym_eigenvalues, symmetrize};
use crate::state::{GaussianState, ModeSelection};

/// Allowed dip of a symplectic eigenvalue below 1/2 before a state counts as
/// unphysical.
pub const NU_TOLERANCE: f64 = 1e-8;

/// Minimum distance of a reference eigenvalue from 1/2 for relative entropies.
pub const PURITY_GUARD: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpectrum {
    pub nu: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn min(&self) -> f64 {
        self.nu.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }
}

pub fn marginal(state: &GaussianState, modes: &ModeSelection) -> Result<GaussianState> {
    let n = state.n_modes();
    modes.check(n)?;
    let rows: Vec<usize> = modes
        .indices()
        .iter()
        .copied()
        .chain(modes.indices().iter().map(|&i| n + i))
        .collect();
    let means = DVector::from_iterator(rows.len(), rows.iter().map(|&r| state.means()[r]));
    let cov = state.cov();
    let sub = DMatrix::from_fn(rows.len(), rows.len(), |i, j| cov[(rows[i], rows[j])]);
    GaussianState::new(means, sub)
}

/// `sqrt(det σ)` for one mode.
pub fn one_mode_nu(cov: &Matrix2<f64>) -> Result<f64> {
    let det = cov[(0, 0)] * cov[(1, 1)] - cov[(0, 1)] * cov[(1, 0)];
    if !det.is_finite() {
        return Err(Error::NonFinite("covariance"));
    }
    if det <= 0.0 || cov[(0, 0)] <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(det.sqrt())
}

/// Symplectic eigenvalues (ascending) of a positive-definite covariance.
///
/// With `σ = LLᵀ` and `K = LᵀΩL` antisymmetric, the eigenvalues of `KᵀK`
/// are the `ν_k²`, each twice.
pub fn symplectic_spectrum(cov: &DMatrix<f64>) -> Result<SymplecticSpectrum> {
    let dim = cov.nrows();
    if dim != cov.ncols() || !dim.is_multiple_of(2) || dim == 0 {
        return Err(Error::DimensionMismatch { expected: 2 * (dim / 2).max(1), got: cov.ncols() });
    }
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("covariance"));
    }
    let asym = asymmetry(cov);
    if asym > 1e-12 * cov.amax().max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric(asym));
    }
    if dim == 2 {
        let m = Matrix2::new(cov[(0, 0)], cov[(0, 1)], cov[(0, 1)], cov[(1, 1)]);
        return Ok(SymplecticSpectrum { nu: vec![one_mode_nu(&m)?] });
    }
    let mut sym = cov.clone();
    symmetrize(&mut sym);
    let l = sym.cholesky().ok_or(Error::NotPositiveDefinite)?.unpack();
    let k = l.transpose() * omega_mul(&l);
    let gram = k.transpose() * &k;
    paired_spectrum(&gram, 0)
}

/// Pair the doubly degenerate eigenvalues of a Gram matrix `KᵀK` into
/// symplectic eigenvalues, after dropping `discard` zero pairs.
pub(crate) fn paired_spectrum(gram: &DMatrix<f64>, discard: usize) -> Result<SymplecticSpectrum> {
    let mut gram = gram.clone();
    symmetrize(&mut gram);
    let lambda = sym_eigenvalues(&gram)?;
    let nu = lambda[2 * discard..]
        .chunks_exact(2)
        .map(|p| (0.5 * (p[0] + p[1])).max(0.0).sqrt())
        .collect();
    Ok(SymplecticSpectrum { nu })
}

/// Symplectic spectrum of `σ = FFᵀ` when only the projected form
/// `FᵀΩ'F = K₀ + α(uvᵀ - vuᵀ)` is known, with `K₀` Williamson-diagonal
/// (`ν_k` at `(x_k, p_k)`, `-ν_k` at `(p_k, x_k)`).
///
/// Restricting Ω to a subset of modes or flipping a momentum changes it by a
/// rank-two antisymmetric term, so bath marginals and partial transposes of
/// an evolved product state reduce to this form. The Gram matrix `KᵀK` is
/// assembled in `O(n²)`; `discard` zero pairs (traced-out modes) are dropped.
pub fn rank_two_spectrum(
    nu0: &[f64],
    u: &DVector<f64>,
    v: &DVector<f64>,
    alpha: f64,
    discard: usize,
) -> Result<SymplecticSpectrum> {
    let n = nu0.len();
    let dim = 2 * n;
    if u.len() != dim || v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: u.len().min(v.len()) });
    }
    // K₀ᵀx = -K₀x
    let k0t = |x: &DVector<f64>| {
        DVector::from_fn(dim, |i, _| if i < n { -nu0[i] * x[n + i] } else { nu0[i - n] * x[i - n] })
    };
    let p = k0t(u);
    let q = k0t(v);
    let uu = u.dot(u);
    let vv = v.dot(v);
    let uv = u.dot(v);
    let a2 = alpha * alpha;
    let mut gram = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in j..dim {
            let lin = p[i] * v[j] + v[i] * p[j] - q[i] * u[j] - u[i] * q[j];
            let quad = vv * u[i] * u[j] + uu * v[i] * v[j] - uv * (u[i] * v[j] + v[i] * u[j]);
            let mut g = alpha * lin + a2 * quad;
            if i == j {
                let nu = nu0[i % n];
                g += nu * nu;
            }
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    paired_spectrum(&gram, discard)
}

/// Entropy of one mode with symplectic eigenvalue `nu`, in nats.
pub fn mode_entropy(nu: f64) -> Result<f64> {
    if !nu.is_finite() {
        return Err(Error::NonFinite("symplectic eigenvalue"));
    }
    let nbar = nu - 0.5;
    if nbar < -NU_TOLERANCE {
        return Err(Error::Unphysical { nu });
    }
    if nbar <= 0.0 {
        return Ok(0.0);
    }
    Ok((nbar + 1.0) * nbar.ln_1p() - nbar * nbar.ln())
}

pub fn von_neumann_entropy(spectrum: &SymplecticSpectrum) -> Result<f64> {
    spectrum.nu.iter().map(|&nu| mode_entropy(nu)).sum()
}

pub fn state_entropy(state: &GaussianState) -> Result<f64> {
    von_neumann_entropy(&symplectic_spectrum(state.cov())?)
}

/// `ln((ν + 1/2)/(ν - 1/2))`, the per-mode inverse temperature of the
/// reference state's Williamson form.
fn williamson_beta(nu: f64) -> Result<f64> {
    let nbar = nu - 0.5;
    if nbar.is_nan() || nbar <= PURITY_GUARD {
        return Err(Error::Divergent { nu });
    }
    Ok((1.0 / nbar).ln_1p())
}

/// Relative entropy between one-mode states given as (mean, covariance).
pub fn one_mode_relative_entropy(
    mean1: &Vector2<f64>,
    cov1: &Matrix2<f64>,
    mean2: &Vector2<f64>,
    cov2: &Matrix2<f64>,
) -> Result<f64> {
    let nu1 = one_mode_nu(cov1)?;
    let nu2 = one_mode_nu(cov2)?;
    let g = williamson_beta(nu2)?;
    // 𝒢₂ = g ν₂ σ₂⁻¹ = (g/ν₂) adj(σ₂)
    let adj = Matrix2::new(cov2[(1, 1)], -cov2[(0, 1)], -cov2[(1, 0)], cov2[(0, 0)]);
    let d = mean1 - mean2;
    let trace = (adj * cov1).trace();
    let quad = d.dot(&(adj * d));
    Ok(mode_entropy(nu2)? - mode_entropy(nu1)? + 0.5 * g / nu2 * (trace + quad) - g * nu2)
}

/// `S(ρ‖ρ_th)` for a one-mode state against the thermal state of
/// `H = (p - p_c)²/2 + ω²(x - x_c)²/2` at inverse temperature `beta`.
///
/// The reference's Williamson data are known exactly (`βω`), so this stays
/// finite and accurate however close the reference is to its ground state.
pub fn relative_entropy_to_thermal(
    mean: &Vector2<f64>,
    cov: &Matrix2<f64>,
    center: &Vector2<f64>,
    omega: f64,
    beta: f64,
) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidBeta(beta));
    }
    let s = mode_entropy(one_mode_nu(cov)?)?;
    let d = mean - center;
    let excess = 0.5 * (cov[(1, 1)] + d[1] * d[1]) + 0.5 * omega * omega * (cov[(0, 0)] + d[0] * d[0]) - 0.5 * omega;
    Ok(beta * excess - (-(-beta * omega).exp()).ln_1p() - s)
}

/// The matrix `𝒢` with `ρ ∝ exp(-ξᵀ𝒢ξ/2)`, built in the Williamson frame of
/// `cov` (which must be strictly mixed in every mode).
pub fn gibbs_generator(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut sym = cov.clone();
    symmetrize(&mut sym);
    let l = sym.cholesky().ok_or(Error::NotPositiveDefinite)?.unpack();
    let k = l.transpose() * omega_mul(&l);
    let mut gram = k.transpose() * &k;
    symmetrize(&mut gram);
    let (lambda, vecs) = sym_eigen(&gram)?;
    let mut r = DVector::zeros(lambda.len());
    for (ri, pair) in r.as_mut_slice().chunks_exact_mut(2).zip(lambda.as_slice().chunks_exact(2)) {
        let nu = (0.5 * (pair[0] + pair[1])).max(0.0).sqrt();
        let w = 0.5 * williamson_beta(nu)? / nu;
        ri[0] = w;
        ri[1] = w;
    }
    let rk = &vecs * DMatrix::from_diagonal(&r) * vecs.transpose();
    let y = &l * k * rk;
    // y L⁻¹ via a triangular solve on the transpose
    let x = l
        .transpose()
        .solve_upper_triangular(&y.transpose())
        .ok_or(Error::NotPositiveDefinite)?
        .transpose();
    let mut g = omega_mul(&x) * -2.0;
    symmetrize(&mut g);
    Ok(g)
}

/// `S(ρ₁‖ρ₂)` for Gaussian states with the same mode count.
pub fn relative_entropy(rho1: &GaussianState, rho2: &GaussianState) -> Result<f64> {
    if rho1.n_modes() != rho2.n_modes() {
        return Err(Error::DimensionMismatch { expected: rho2.n_modes(), got: rho1.n_modes() });
    }
    if rho1.n_modes() == 1 {
        let (m1, c1) = rho1.mode_block(0);
        let (m2, c2) = rho2.mode_block(0);
        return one_mode_relative_entropy(&m1, &c1, &m2, &c2);
    }
    general_relative_entropy(rho1, rho2)
}

fn general_relative_entropy(rho1: &GaussianState, rho2: &GaussianState) -> Result<f64> {
    let g = gibbs_generator(rho2.cov())?;
    let s1 = state_entropy(rho1)?;
    let s2 = state_entropy(rho2)?;
    let diff = rho1.cov() - rho2.cov();
    let trace = g.component_mul(&diff).sum();
    let d = rho1.means() - rho2.means();
    let quad = d.dot(&(&g * &d));
    Ok(s2 - s1 + 0.5 * (trace + quad))
}

/// `S(A) + S(B) - S(AB)` for the bipartition `partition | complement`.
pub fn mutual_information(state: &GaussianState, partition: &ModeSelection) -> Result<f64> {
    let n = state.n_modes();
    partition.check(n)?;
    let rest = partition.complement(n);
    if partition.is_empty() || rest.is_empty() {
        return Ok(0.0);
    }
    let sa = state_entropy(&marginal(state, partition)?)?;
    let sb = state_entropy(&marginal(state, &rest)?)?;
    Ok(sa + sb - state_entropy(state)?)
}

/// Flip the momenta of the selected modes. The result need not be a
/// physical state.
pub fn partial_transpose(state: &GaussianState, modes: &ModeSelection) -> Result<GaussianState> {
    let n = state.n_modes();
    modes.check(n)?;
    let mut sign = DVector::from_element(2 * n, 1.0);
    for &i in modes.indices() {
        sign[n + i] = -1.0;
    }
    let means = state.means().component_mul(&sign);
    let cov = DMatrix::from_fn(2 * n, 2 * n, |i, j| sign[i] * sign[j] * state.cov()[(i, j)]);
    GaussianState::new(means, cov)
}

/// `Σ max(0, -ln 2ν̃)` over the partially transposed spectrum. Eigenvalues
/// within `NU_TOLERANCE` of 1/2 count as separable.
pub fn negativity_from_spectrum(spectrum: &SymplecticSpectrum) -> f64 {
    spectrum.nu.iter().filter(|&&nu| nu < 0.5 - NU_TOLERANCE).map(|&nu| -(2.0 * nu).ln()).sum()
}

/// Logarithmic negativity of mode `system_mode` against all other modes.
pub fn logarithmic_negativity(state: &GaussianState, system_mode: usize) -> Result<f64> {
    let sel = ModeSelection::single(system_mode, state.n_modes())?;
    let pt = partial_transpose(state, &sel)?;
    Ok(negativity_from_spectrum(&symplectic_spectrum(pt.cov())?))
}
