//! Convolutions of the drive pulse with each normal mode,
//! `∫₀ᵗ sin(z(t-s))/z F(s) ds` and `∫₀ᵗ cos(z(t-s)) F(s) ds`.
//!
//! The moments `C(t) = ∫₀ᵗ cos(zs)F ds` and `S(t) = ∫₀ᵗ sin(zs)F ds` are
//! accumulated once over fixed panels covering the pulse, each spanning at
//! most one radian of phase for every frequency involved. A query then only
//! integrates the partial panel it falls into, so results do not depend on
//! which other times are requested.

use crate::bath::{drive_force, DrivePulse};
use crate::quadrature;

#[derive(Clone, Debug)]
pub struct DriveResponse {
    pulse: DrivePulse,
    freqs: Vec<f64>,
    width: f64,
    panels: usize,
    /// `(C, S)` per mode at each panel boundary, panel-major.
    cumulative: Vec<[f64; 2]>,
}

fn tolerance(pulse: &DrivePulse, len: f64) -> f64 {
    1e-14 * pulse.f0.abs() * len.max(1e-300)
}

impl DriveResponse {
    pub fn new(pulse: &DrivePulse, freqs: &[f64]) -> Self {
        let modes = freqs.len();
        if pulse.is_off() {
            return DriveResponse {
                pulse: *pulse,
                freqs: freqs.to_vec(),
                width: 0.0,
                panels: 0,
                cumulative: Vec::new(),
            };
        }
        let end = pulse.duration();
        let z_max = freqs.iter().cloned().fold(0.0, f64::max);
        let omega_hi = z_max.max(pulse.omega_f.abs() + 2.0 * pulse.envelope) + 1.0;
        let panels = ((end * omega_hi).ceil() as usize).max(1);
        let width = end / panels as f64;

        let mut cumulative = vec![[0.0; 2]; (panels + 1) * modes];
        let mut force = [0.0; 15];
        let mut samples = [[0.0; 2]; 15];
        for k in 0..panels {
            let a = k as f64 * width;
            let b = if k + 1 == panels { end } else { (k + 1) as f64 * width };
            let nodes = quadrature::nodes(a, b);
            for (f, &s) in force.iter_mut().zip(&nodes) {
                *f = drive_force(pulse, s);
            }
            let tol = tolerance(pulse, b - a);
            for (m, &z) in freqs.iter().enumerate() {
                for j in 0..15 {
                    let (sn, cs) = (z * nodes[j]).sin_cos();
                    samples[j] = [cs * force[j], sn * force[j]];
                }
                let (mut val, err) = quadrature::combine(a, b, &samples);
                if err[0].max(err[1]) > tol {
                    val = quadrature::integrate(&integrand(pulse, z), a, b, tol);
                }
                let prev = cumulative[k * modes + m];
                cumulative[(k + 1) * modes + m] = [prev[0] + val[0], prev[1] + val[1]];
            }
        }
        DriveResponse { pulse: *pulse, freqs: freqs.to_vec(), width, panels, cumulative }
    }

    pub fn pulse(&self) -> &DrivePulse {
        &self.pulse
    }

    pub fn is_off(&self) -> bool {
        self.pulse.is_off()
    }

    /// `(C(t), S(t))` for mode `m`.
    pub fn moments(&self, m: usize, t: f64) -> [f64; 2] {
        if self.is_off() || t <= 0.0 {
            return [0.0; 2];
        }
        let modes = self.freqs.len();
        let end = self.pulse.duration();
        let te = t.min(end);
        let k = ((te / self.width).floor() as usize).min(self.panels);
        let start = k as f64 * self.width;
        let mut acc = self.cumulative[k * modes + m];
        if k < self.panels && te > start {
            let extra = quadrature::integrate(
                &integrand(&self.pulse, self.freqs[m]),
                start,
                te,
                tolerance(&self.pulse, te - start),
            );
            acc[0] += extra[0];
            acc[1] += extra[1];
        }
        acc
    }

    /// Per-mode `(∫ sin(z(t-s))/z F ds, ∫ cos(z(t-s)) F ds)`.
    pub fn convolutions(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let modes = self.freqs.len();
        if self.is_off() || t <= 0.0 {
            return (vec![0.0; modes], vec![0.0; modes]);
        }
        let mut sine = vec![0.0; modes];
        let mut cosine = vec![0.0; modes];
        for (m, &z) in self.freqs.iter().enumerate() {
            let [c, s] = self.moments(m, t);
            let (sn, cs) = (z * t).sin_cos();
            sine[m] = (sn * c - cs * s) / z;
            cosine[m] = cs * c + sn * s;
        }
        (sine, cosine)
    }
}

fn integrand(pulse: &DrivePulse, z: f64) -> impl Fn(f64) -> [f64; 2] + '_ {
    move |s: f64| {
        let f = drive_force(pulse, s);
        let (sn, cs) = (z * s).sin_cos();
        [cs * f, sn * f]
    }
}
