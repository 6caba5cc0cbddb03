//! Relative entropy of a displaced thermal state checked against a
//! truncated Fock-space density matrix.

use nalgebra::{DMatrix, Matrix2, Vector2};
use qbm::gaussian::{one_mode_relative_entropy, relative_entropy_to_thermal};

const DIM: usize = 60;

fn fock_relative_entropy(omega: f64, nbar: f64, d: f64) -> f64 {
    let q = nbar / (nbar + 1.0);
    let p: Vec<f64> = (0..DIM).map(|k| (1.0 - q) * q.powi(k as i32)).collect();
    let mut a = DMatrix::zeros(DIM, DIM);
    for k in 1..DIM {
        a[(k - 1, k)] = (k as f64).sqrt();
    }
    // ⟨x⟩ = d for α = d sqrt(ω/2)
    let alpha = d * (omega / 2.0).sqrt();
    let gen = (a.transpose() - &a) * alpha;
    let disp = gen.exp();
    let rho2 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(p.clone()));
    let rho1 = &disp * &rho2 * disp.transpose();
    let entropy: f64 = -p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>();
    let cross: f64 = (0..DIM).map(|k| rho1[(k, k)] * p[k].ln()).sum();
    -entropy - cross
}

#[test]
fn displaced_thermal_against_fock_truncation() {
    for &(omega, nbar, d) in &[(1.0, 0.2, 0.5), (1.3, 0.4, 0.7), (2.0, 0.1, -0.3)] {
        let fock = fock_relative_entropy(omega, nbar, d);
        let nu = nbar + 0.5;
        let cov = Matrix2::new(nu / omega, 0.0, 0.0, nu * omega);
        let gaussian = one_mode_relative_entropy(&Vector2::new(d, 0.0), &cov, &Vector2::zeros(), &cov).unwrap();
        let beta = (1.0 / nbar + 1.0f64).ln() / omega;
        let closed = relative_entropy_to_thermal(&Vector2::new(d, 0.0), &cov, &Vector2::zeros(), omega, beta).unwrap();
        let expected = 0.5 * d * d * omega * (1.0 / nbar + 1.0f64).ln();
        assert!((fock - gaussian).abs() < 1e-8, "fock {fock} vs gaussian {gaussian}");
        assert!((closed - gaussian).abs() < 1e-12);
        assert!((gaussian - expected).abs() < 1e-12);
    }
}
