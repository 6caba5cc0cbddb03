use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, symmetrize};

/// First and second moments of an `n`-mode Gaussian state in
/// `(x_0…x_{n-1}, p_0…p_{n-1})` ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    means: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Validates shape, finiteness and symmetry. Asymmetry up to `1e-12`
    /// relative to the largest entry is removed by symmetrizing.
    pub fn new(means: DVector<f64>, mut cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != cov.ncols() || !cov.nrows().is_multiple_of(2) || cov.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: 2 * (cov.nrows() / 2).max(1), got: cov.ncols() });
        }
        if means.len() != cov.nrows() {
            return Err(Error::DimensionMismatch { expected: cov.nrows(), got: means.len() });
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariance"));
        }
        if means.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("means"));
        }
        let scale = cov.amax().max(f64::MIN_POSITIVE);
        let asym = asymmetry(&cov);
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric(asym));
        }
        symmetrize(&mut cov);
        Ok(GaussianState { means, cov })
    }

    /// Centered state with the given covariance.
    pub fn centered(cov: DMatrix<f64>) -> Result<Self> {
        let n = cov.nrows();
        GaussianState::new(DVector::zeros(n), cov)
    }

    pub fn vacuum(modes: usize) -> Self {
        GaussianState {
            means: DVector::zeros(2 * modes),
            cov: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        }
    }

    /// Single mode from its mean `(x, p)` and 2×2 covariance.
    pub fn one_mode(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        GaussianState::new(
            DVector::from_column_slice(mean.as_slice()),
            DMatrix::from_column_slice(2, 2, cov.as_slice()),
        )
    }

    pub fn n_modes(&self) -> usize {
        self.means.len() / 2
    }

    pub fn means(&self) -> &DVector<f64> {
        &self.means
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn into_parts(self) -> (DVector<f64>, DMatrix<f64>) {
        (self.means, self.cov)
    }

    /// Mean and covariance of mode `k` as fixed-size blocks.
    pub fn mode_block(&self, k: usize) -> (Vector2<f64>, Matrix2<f64>) {
        let n = self.n_modes();
        let (x, p) = (k, n + k);
        (
            Vector2::new(self.means[x], self.means[p]),
            Matrix2::new(self.cov[(x, x)], self.cov[(x, p)], self.cov[(p, x)], self.cov[(p, p)]),
        )
    }
}

/// Ordered set of distinct mode indices (0 is the system).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeSelection {
    indices: Vec<usize>,
}

impl ModeSelection {
    pub fn new(indices: Vec<usize>, modes: usize) -> Result<Self> {
        let mut seen = vec![false; modes];
        for &i in &indices {
            if i >= modes {
                return Err(Error::ModeOutOfRange { index: i, modes });
            }
            if seen[i] {
                return Err(Error::DuplicateMode(i));
            }
            seen[i] = true;
        }
        Ok(ModeSelection { indices })
    }

    pub fn single(index: usize, modes: usize) -> Result<Self> {
        ModeSelection::new(vec![index], modes)
    }

    pub fn all(modes: usize) -> Self {
        ModeSelection { indices: (0..modes).collect() }
    }

    /// Remaining modes in ascending order.
    pub fn complement(&self, modes: usize) -> Self {
        let mut keep = vec![true; modes];
        for &i in &self.indices {
            keep[i] = false;
        }
        ModeSelection { indices: (0..modes).filter(|&i| keep[i]).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub(crate) fn check(&self, modes: usize) -> Result<()> {
        match self.indices.iter().find(|&&i| i >= modes) {
            Some(&index) => Err(Error::ModeOutOfRange { index, modes }),
            None => Ok(()),
        }
    }
}
