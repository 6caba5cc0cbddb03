#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qbm::{build_couplings, drive_force, hamiltonian_position_block, initial_state, ModelSpec};

/// Means and covariance at `times` from fixed-step RK4 on the Heisenberg and
/// Lyapunov equations `dξ/dt = Kξ + f`, `dσ/dt = Kσ + σKᵀ`.
pub fn rk4_moments(spec: &ModelSpec, times: &[f64], dt: f64) -> Vec<(DVector<f64>, DMatrix<f64>)> {
    let hx = hamiltonian_position_block(spec, &build_couplings(spec));
    let n = hx.nrows();
    let mut k = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        k[(i, n + i)] = 1.0;
        for j in 0..n {
            k[(n + i, j)] = -hx[(i, j)];
        }
    }
    let force = |t: f64| {
        let mut f = DVector::zeros(2 * n);
        f[n] = drive_force(&spec.drive, t);
        f
    };
    let (mut mu, mut sigma) = initial_state(spec).into_parts();
    let dmu = |t: f64, m: &DVector<f64>| &k * m + force(t);
    let dsig = |s: &DMatrix<f64>| &k * s + s * k.transpose();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while t < target - 1e-12 {
            let h = dt.min(target - t);
            let k1 = dmu(t, &mu);
            let k2 = dmu(t + h / 2.0, &(&mu + &k1 * (h / 2.0)));
            let k3 = dmu(t + h / 2.0, &(&mu + &k2 * (h / 2.0)));
            let k4 = dmu(t + h, &(&mu + &k3 * h));
            mu += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            let s1 = dsig(&sigma);
            let s2 = dsig(&(&sigma + &s1 * (h / 2.0)));
            let s3 = dsig(&(&sigma + &s2 * (h / 2.0)));
            let s4 = dsig(&(&sigma + &s3 * h));
            sigma += (s1 + s2 * 2.0 + s3 * 2.0 + s4) * (h / 6.0);
            t += h;
        }
        out.push((mu.clone(), sigma.clone()));
    }
    out
}

/// Largest relative deviation of means and covariance from the reference.
pub fn relative_deviation(mu: &DVector<f64>, sigma: &DMatrix<f64>, reference: &(DVector<f64>, DMatrix<f64>)) -> f64 {
    let (rm, rs) = reference;
    let dm = (mu - rm).norm() / rm.norm().max(1.0);
    let ds = (sigma - rs).norm() / rs.norm();
    dm.max(ds)
}

/// `⟨H⟩` of the undriven model for the given full-state moments.
pub fn total_energy(spec: &ModelSpec, mu: &DVector<f64>, sigma: &DMatrix<f64>) -> f64 {
    let hx = hamiltonian_position_block(spec, &build_couplings(spec));
    let n = hx.nrows();
    let mut e = 0.0;
    for i in 0..n {
        e += 0.5 * (sigma[(n + i, n + i)] + mu[n + i] * mu[n + i]);
        for j in 0..n {
            e += 0.5 * hx[(i, j)] * (sigma[(i, j)] + mu[i] * mu[j]);
        }
    }
    e
}
