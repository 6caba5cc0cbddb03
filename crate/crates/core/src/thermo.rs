//! Entropy production under the Spohn, Deffner–Lutz and
//! Esposito–Lindenberg–Van den Broeck (ELB) definitions, heats, and the
//! correlation decomposition of the ELB entropy production.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::bath::{drive_force, drive_force_derivative, thermal_factor, DrivePulse, ModelSpec};
use crate::dynamics::{ModeMoments, Sample, Trajectory};
use crate::error::{Error, Result};
use crate::gaussian::{mode_entropy, one_mode_nu, relative_entropy_to_thermal};
use crate::state::GaussianState;

/// Below this magnitude of `Δ_iS^ELB` the relative gap ε is left undefined.
pub const EPSILON_GUARD: f64 = 1e-12;
/// Tolerance on `I_SE + I_env + D_env = Δ_iS^ELB`.
pub const CLOSURE_TOLERANCE: f64 = 1e-7;
/// Allowed negative excursion of `Δ_iS^ELB`.
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

/// The system Hamiltonian `H_S(t) = p²/2 + ω²x²/2 - F(t)x` used for Gibbs
/// references and system energies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemHamiltonianSpec {
    pub frequency: f64,
    pub drive: DrivePulse,
    pub include_drive: bool,
}

/// Which frequency enters `H_S`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemFrequency {
    /// The renormalized `ω_0`.
    #[default]
    Renormalized,
    /// The bare `ω_b`, which includes the counter-term shift.
    Bare,
}

impl SystemHamiltonianSpec {
    pub fn for_model(spec: &ModelSpec, choice: SystemFrequency) -> Self {
        let frequency = match choice {
            SystemFrequency::Renormalized => spec.omega0,
            SystemFrequency::Bare => crate::bath::build_couplings(spec).omega_b,
        };
        SystemHamiltonianSpec { frequency, drive: spec.drive, include_drive: !spec.drive.is_off() }
    }

    pub fn is_driven(&self) -> bool {
        self.include_drive && !self.drive.is_off()
    }

    pub fn force(&self, t: f64) -> f64 {
        if self.is_driven() {
            drive_force(&self.drive, t)
        } else {
            0.0
        }
    }

    pub fn force_rate(&self, t: f64) -> f64 {
        if self.is_driven() {
            drive_force_derivative(&self.drive, t)
        } else {
            0.0
        }
    }

    /// `⟨H_S(t)⟩` for the given system moments.
    pub fn energy(&self, system: &ModeMoments, t: f64) -> f64 {
        system.energy(self.frequency) - self.force(t) * system.mean[0]
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::InvalidBeta(beta));
    }
    Ok(())
}

fn check_finite_beta(beta: f64) -> Result<()> {
    check_beta(beta)?;
    if beta.is_infinite() {
        return Err(Error::InvalidBeta(beta));
    }
    Ok(())
}

fn gibbs_moments(hspec: &SystemHamiltonianSpec, beta: f64, t: f64) -> Result<ModeMoments> {
    check_beta(beta)?;
    let w = hspec.frequency;
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidSpec(format!("system frequency must be positive, got {w}")));
    }
    let c = thermal_factor(w, 1.0 / beta);
    Ok(ModeMoments {
        mean: Vector2::new(hspec.force(t) / (w * w), 0.0),
        cov: Matrix2::new(0.5 * c / w, 0.0, 0.0, 0.5 * c * w),
    })
}

/// Instantaneous Gibbs state of `H_S(t)` at inverse temperature `beta`.
pub fn gibbs_state_system(hspec: &SystemHamiltonianSpec, beta: f64, t: f64) -> Result<GaussianState> {
    let m = gibbs_moments(hspec, beta, t)?;
    m.to_state()
}

/// `S(ρ_S‖ρ_S^eq(t))`.
fn gibbs_divergence(m: &ModeMoments, hspec: &SystemHamiltonianSpec, beta: f64, t: f64) -> Result<f64> {
    let w = hspec.frequency;
    let center = Vector2::new(hspec.force(t) / (w * w), 0.0);
    relative_entropy_to_thermal(&m.mean, &m.cov, &center, w, beta)
}

fn system_entropy(s: &Sample) -> Result<f64> {
    mode_entropy(one_mode_nu(&s.system.cov)?)
}

/// `S(ρ_S(0)‖ρ_S^eq) - S(ρ_S(t)‖ρ_S^eq)` with a fixed Gibbs reference.
pub fn entropy_production_spohn(traj: &Trajectory, hspec: &SystemHamiltonianSpec, beta: f64) -> Result<Vec<f64>> {
    if hspec.is_driven() {
        return Err(Error::DrivenSpohn);
    }
    check_finite_beta(beta)?;
    gibbs_moments(hspec, beta, 0.0)?;
    let d0 = gibbs_divergence(&traj.initial.system, hspec, beta, 0.0)?;
    traj.samples.iter().map(|s| Ok(d0 - gibbs_divergence(&s.system, hspec, beta, 0.0)?)).collect()
}

/// Grid spacing of a uniform grid starting at 0.
fn uniform_step(times: &[f64]) -> Result<f64> {
    match times {
        [] => Ok(0.0),
        [t0] => {
            if *t0 == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::TimeGrid)
            }
        }
        _ => {
            let n = times.len();
            let last = times[n - 1];
            let h = last / (n - 1) as f64;
            let ok = times[0] == 0.0
                && h > 0.0
                && times.iter().enumerate().all(|(k, &t)| (t - k as f64 * h).abs() <= 1e-10 * (1.0 + last));
            if ok {
                Ok(h)
            } else {
                Err(Error::TimeGrid)
            }
        }
    }
}

/// Running integral of grid samples: Simpson over pairs of intervals, with
/// the odd points closed by the four-point cubic interval formula.
pub fn cumulative_simpson(h: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    if n == 3 {
        out[1] = h * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
        out[2] = h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
        return out;
    }
    out[1] = h * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
    for k in 2..n {
        out[k] = if k % 2 == 0 {
            out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k])
        } else {
            out[k - 1] + h * (f[k - 3] - 5.0 * f[k - 2] + 19.0 * f[k - 1] + 9.0 * f[k]) / 24.0
        };
    }
    out
}

/// `∫₀ᵗ Ḟ(s)(⟨x(s)⟩ - F(s)/ω²) ds` on the trajectory grid.
fn drive_work_term(traj: &Trajectory, hspec: &SystemHamiltonianSpec) -> Result<Vec<f64>> {
    if !hspec.is_driven() {
        return Ok(vec![0.0; traj.samples.len()]);
    }
    let h = uniform_step(&traj.times())?;
    let w2 = hspec.frequency * hspec.frequency;
    let integrand: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| hspec.force_rate(s.t) * (s.system.mean[0] - hspec.force(s.t) / w2))
        .collect();
    Ok(cumulative_simpson(h, &integrand))
}

/// `∫₀ᵗ Ḟ(s)⟨x(s)⟩ ds`, minus the work done on the system.
fn drive_power_integral(traj: &Trajectory, hspec: &SystemHamiltonianSpec) -> Result<Vec<f64>> {
    if !hspec.is_driven() {
        return Ok(vec![0.0; traj.samples.len()]);
    }
    let h = uniform_step(&traj.times())?;
    let integrand: Vec<f64> = traj.samples.iter().map(|s| hspec.force_rate(s.t) * s.system.mean[0]).collect();
    Ok(cumulative_simpson(h, &integrand))
}

/// Deffner–Lutz entropy production with instantaneous Gibbs references.
pub fn entropy_production_dl(traj: &Trajectory, hspec: &SystemHamiltonianSpec, beta: f64) -> Result<Vec<f64>> {
    check_finite_beta(beta)?;
    gibbs_moments(hspec, beta, 0.0)?;
    let d0 = gibbs_divergence(&traj.initial.system, hspec, beta, 0.0)?;
    let work = drive_work_term(traj, hspec)?;
    traj.samples
        .iter()
        .zip(work)
        .map(|(s, w)| Ok(d0 - gibbs_divergence(&s.system, hspec, beta, s.t)? - beta * w))
        .collect()
}

/// ELB entropy production `ΔS_S + βΔU_E`.
pub fn entropy_production_elb(traj: &Trajectory, beta: f64) -> Result<Vec<f64>> {
    check_finite_beta(beta)?;
    let s0 = system_entropy(&traj.initial)?;
    let u0 = traj.initial.bath_energy;
    traj.samples
        .iter()
        .map(|s| Ok(system_entropy(s)? - s0 + beta * (s.bath_energy - u0)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub i_se: Vec<f64>,
    pub i_env: Vec<f64>,
    pub d_env: Vec<f64>,
}

fn missing_decomposition() -> Error {
    Error::Config("trajectory was sampled without the decomposition observables".into())
}

/// `(I_SE, I_env)` at one sample.
fn correlations(traj: &Trajectory, s: &Sample) -> Result<(f64, f64)> {
    let se = s.bath_entropy.ok_or_else(missing_decomposition)?;
    let modes = s.bath_modes.as_ref().ok_or_else(missing_decomposition)?;
    let mut sum = 0.0;
    for m in modes {
        sum += mode_entropy(one_mode_nu(&m.cov)?)?;
    }
    Ok((system_entropy(s)? + se - traj.total_entropy, sum - se))
}

/// `Σ_n S(ρ_{E_n}(t)‖ρ_{E_n}(0))`; requires a mixed (T > 0) reference.
fn bath_displacement(traj: &Trajectory, s: &Sample) -> Result<f64> {
    if traj.spec.temperature == 0.0 {
        return Err(Error::InvalidBeta(f64::INFINITY));
    }
    let modes = s.bath_modes.as_ref().ok_or_else(missing_decomposition)?;
    let beta = traj.spec.beta();
    let origin = Vector2::zeros();
    let mut sum = 0.0;
    for (m, &w) in modes.iter().zip(&traj.bath_freqs) {
        sum += relative_entropy_to_thermal(&m.mean, &m.cov, &origin, w, beta)?;
    }
    Ok(sum)
}

pub fn decomposition(traj: &Trajectory, beta: f64) -> Result<Decomposition> {
    check_finite_beta(beta)?;
    let mut out = Decomposition { i_se: Vec::new(), i_env: Vec::new(), d_env: Vec::new() };
    for s in &traj.samples {
        let (ise, ienv) = correlations(traj, s)?;
        out.i_se.push(ise);
        out.i_env.push(ienv);
        out.d_env.push(bath_displacement(traj, s)?);
    }
    Ok(out)
}

/// `δ = ELB - DL` and `ε = δ / ELB` (undefined where `|ELB| < 1e-12`).
pub fn definition_gap(elb: &[f64], dl: &[f64]) -> (Vec<f64>, Vec<Option<f64>>) {
    elb.iter()
        .zip(dl)
        .map(|(&e, &d)| {
            let delta = e - d;
            let eps = if e.abs() < EPSILON_GUARD { None } else { Some(delta / e) };
            (delta, eps)
        })
        .unzip()
}

/// All observables at one time; `None` marks quantities that are undefined
/// for the run (zero temperature, driven Spohn) or were not requested.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ThermoRecord {
    pub t: f64,
    #[serde(rename = "S_S")]
    pub s_s: f64,
    #[serde(rename = "S_E")]
    pub s_e: Option<f64>,
    #[serde(rename = "S_SE")]
    pub s_se: f64,
    #[serde(rename = "dS_Spohn")]
    pub ds_spohn: Option<f64>,
    #[serde(rename = "dS_DL")]
    pub ds_dl: Option<f64>,
    #[serde(rename = "dS_ELB")]
    pub ds_elb: Option<f64>,
    pub heat_standard: Option<f64>,
    #[serde(rename = "heat_ELB")]
    pub heat_elb: f64,
    #[serde(rename = "I_SE")]
    pub i_se: Option<f64>,
    #[serde(rename = "I_env")]
    pub i_env: Option<f64>,
    #[serde(rename = "D_env")]
    pub d_env: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    #[serde(rename = "E_N")]
    pub e_n: Option<f64>,
    #[serde(rename = "U_S")]
    pub u_s: f64,
    #[serde(rename = "U_E")]
    pub u_e: f64,
}

impl ThermoRecord {
    pub const COLUMNS: [&'static str; 15] = [
        "t", "S_S", "S_E", "S_SE", "dS_Spohn", "dS_DL", "dS_ELB", "I_SE", "I_env", "D_env", "delta", "epsilon",
        "E_N", "U_S", "U_E",
    ];

    /// Values in [`Self::COLUMNS`] order.
    pub fn row(&self) -> [Option<f64>; 15] {
        [
            Some(self.t),
            Some(self.s_s),
            self.s_e,
            Some(self.s_se),
            self.ds_spohn,
            self.ds_dl,
            self.ds_elb,
            self.i_se,
            self.i_env,
            self.d_env,
            self.delta,
            self.epsilon,
            self.e_n,
            Some(self.u_s),
            Some(self.u_e),
        ]
    }

    /// Closure of the decomposition and positivity of the ELB production.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::Validation { t: self.t, reason });
        if self.row().iter().flatten().any(|v| !v.is_finite()) {
            return fail("non-finite value".into());
        }
        if let Some(elb) = self.ds_elb {
            if elb < -POSITIVITY_TOLERANCE {
                return fail(format!("negative ELB entropy production {elb:e}"));
            }
            if let (Some(a), Some(b), Some(c)) = (self.i_se, self.i_env, self.d_env) {
                let gap = (a + b + c - elb).abs();
                if gap >= CLOSURE_TOLERANCE {
                    return fail(format!("decomposition misses ELB by {gap:e}"));
                }
            }
        }
        Ok(())
    }
}

/// Assemble every available observable for each sample of the trajectory.
pub fn thermo_records(traj: &Trajectory, hspec: &SystemHamiltonianSpec, thermo: bool) -> Result<Vec<ThermoRecord>> {
    let finite_t = traj.spec.temperature > 0.0;
    let beta = traj.spec.beta();
    let n = traj.samples.len();
    let opt = |v: Vec<f64>| v.into_iter().map(Some).collect::<Vec<_>>();

    let (spohn, dl, elb) = if thermo && finite_t {
        let spohn = if hspec.is_driven() { vec![None; n] } else { opt(entropy_production_spohn(traj, hspec, beta)?) };
        (spohn, opt(entropy_production_dl(traj, hspec, beta)?), opt(entropy_production_elb(traj, beta)?))
    } else {
        (vec![None; n], vec![None; n], vec![None; n])
    };
    let power = if thermo { opt(drive_power_integral(traj, hspec)?) } else { vec![None; n] };

    let u_s0 = hspec.energy(&traj.initial.system, 0.0);
    let u_e0 = traj.initial.bath_energy;
    let mut records = Vec::with_capacity(n);
    for (k, s) in traj.samples.iter().enumerate() {
        let u_s = hspec.energy(&s.system, s.t);
        let (i_se, i_env) = match s.bath_modes {
            Some(_) => {
                let (a, b) = correlations(traj, s)?;
                (Some(a), Some(b))
            }
            None => (None, None),
        };
        let d_env = match (&s.bath_modes, finite_t) {
            (Some(_), true) => Some(bath_displacement(traj, s)?),
            _ => None,
        };
        let (delta, epsilon) = match (elb[k], dl[k]) {
            (Some(e), Some(d)) => {
                let (dv, ev) = definition_gap(&[e], &[d]);
                (Some(dv[0]), ev[0])
            }
            _ => (None, None),
        };
        records.push(ThermoRecord {
            t: s.t,
            s_s: system_entropy(s)?,
            s_e: s.bath_entropy,
            s_se: traj.total_entropy,
            ds_spohn: spohn[k],
            ds_dl: dl[k],
            ds_elb: elb[k],
            heat_standard: power[k].map(|p| u_s - u_s0 + p),
            heat_elb: -(s.bath_energy - u_e0),
            i_se,
            i_env,
            d_env,
            delta,
            epsilon,
            e_n: s.negativity,
            u_s,
            u_e: s.bath_energy,
        });
    }
    Ok(records)
}
