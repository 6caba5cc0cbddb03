//! Run orchestration: time series, contribution maps, entanglement studies
//! and definition comparisons.

pub mod config;
pub mod output;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bath::{build_couplings, recurrence_time, ModelSpec};
use crate::dynamics::{uniform_grid, Dynamics, Observables};
use crate::error::Result;
use crate::thermo::{self, SystemHamiltonianSpec, ThermoRecord};

pub use config::{CompareConfig, ConfigFile, Format, NegativityConfig, Overrides, Parameter, RunConfig, SweepConfig};
use output::{fmt_number, fmt_optional, write_manifest, write_records, write_table};

fn constants(spec: &ModelSpec) -> serde_json::Value {
    let c = build_couplings(spec);
    json!({
        "recurrence_time": recurrence_time(spec),
        "spacing": spec.spacing(),
        "omega_b": c.omega_b,
        "pulse_envelope_frequency": spec.drive.envelope,
        "units": "hbar = k_B = omega0 = 1",
    })
}

/// Records on the configured uniform grid.
pub fn timeseries(config: &RunConfig) -> Result<Vec<ThermoRecord>> {
    let dynamics = Dynamics::new(&config.spec)?;
    let times = uniform_grid(config.t_end, config.n_points);
    let traj = dynamics.trajectory(&times, config.observables())?;
    let hspec = SystemHamiltonianSpec::for_model(&config.spec, config.system_frequency);
    thermo::thermo_records(&traj, &hspec, config.thermo)
}

/// Compute, validate and persist a time series.
pub fn run_timeseries(config: &RunConfig) -> Result<Vec<ThermoRecord>> {
    let start = Instant::now();
    let records = timeseries(config)?;
    if let Some(path) = &config.output {
        write_records(path, &records, config.format)?;
        write_manifest(path, "simulate", config, constants(&config.spec), start.elapsed().as_secs_f64())?;
    }
    Ok(records)
}

/// Composition of `Δ_iS^ELB` at one `(γ, T)` point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContributionCell {
    pub gamma: f64,
    pub temperature: f64,
    pub frac_denv: Option<f64>,
    pub frac_ise: Option<f64>,
    pub frac_ienv: Option<f64>,
    pub rgb: Option<[u8; 3]>,
    pub status: String,
}

impl ContributionCell {
    pub const COLUMNS: [&'static str; 9] =
        ["gamma", "temperature", "frac_Denv", "frac_Ise", "frac_Ienv", "r", "g", "b", "status"];

    fn missing(gamma: f64, temperature: f64, status: String) -> Self {
        ContributionCell { gamma, temperature, frac_denv: None, frac_ise: None, frac_ienv: None, rgb: None, status }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// Largest contribution: 0 = D_env, 1 = I_SE, 2 = I_env.
    pub fn dominant(&self) -> Option<usize> {
        let f = [self.frac_denv?, self.frac_ise?, self.frac_ienv?];
        let mut best = 0;
        for k in 1..3 {
            if f[k] > f[best] {
                best = k;
            }
        }
        Some(best)
    }

    fn row(&self) -> Vec<String> {
        let rgb = |k: usize| self.rgb.map(|c| c[k].to_string()).unwrap_or_default();
        vec![
            fmt_number(self.gamma),
            fmt_number(self.temperature),
            fmt_optional(self.frac_denv),
            fmt_optional(self.frac_ise),
            fmt_optional(self.frac_ienv),
            rgb(0),
            rgb(1),
            rgb(2),
            self.status.clone(),
        ]
    }
}

fn channel(f: f64) -> u8 {
    (255.0 * f.clamp(0.0, 1.0)).round() as u8
}

/// Fractions `(D_env, I_SE, I_env) / Δ_iS^ELB` at time `t_eval`.
pub fn contribution_cell(spec: &ModelSpec, t_eval: f64) -> ContributionCell {
    let (gamma, temperature) = (spec.gamma, spec.temperature);
    if temperature == 0.0 {
        return ContributionCell::missing(gamma, temperature, "missing: zero temperature".into());
    }
    let eval = || -> Result<ContributionCell> {
        let dynamics = Dynamics::new(spec)?;
        let obs = Observables { thermo: true, entropy: true, decomposition: true, negativity: false };
        let traj = dynamics.trajectory(&[t_eval], obs)?;
        let beta = spec.beta();
        let elb = thermo::entropy_production_elb(&traj, beta)?[0];
        let dec = thermo::decomposition(&traj, beta)?;
        if elb.abs() < thermo::EPSILON_GUARD {
            return Ok(ContributionCell::missing(gamma, temperature, "missing: no entropy production".into()));
        }
        let f = [dec.d_env[0] / elb, dec.i_se[0] / elb, dec.i_env[0] / elb];
        let sum: f64 = f.iter().sum();
        let status = if (sum - 1.0).abs() > 1e-6 {
            format!("error: fractions sum to {sum:.9}")
        } else {
            "ok".to_string()
        };
        Ok(ContributionCell {
            gamma,
            temperature,
            frac_denv: Some(f[0]),
            frac_ise: Some(f[1]),
            frac_ienv: Some(f[2]),
            rgb: Some([channel(f[0]), channel(f[1]), channel(f[2])]),
            status,
        })
    };
    eval().unwrap_or_else(|e| ContributionCell::missing(gamma, temperature, format!("error: {e}")))
}

/// All cells, temperature-major within each γ row.
pub fn contribution_map(config: &SweepConfig) -> Vec<ContributionCell> {
    let points: Vec<(f64, f64)> =
        config.gammas.iter().flat_map(|&g| config.temperatures.iter().map(move |&t| (g, t))).collect();
    points
        .par_iter()
        .map(|&(gamma, temperature)| {
            let spec = ModelSpec { gamma, temperature, ..config.base.spec.clone() };
            contribution_cell(&spec, config.t_eval)
        })
        .collect()
}

pub fn run_contribution_map(config: &SweepConfig) -> Result<Vec<ContributionCell>> {
    let start = Instant::now();
    let cells = contribution_map(config);
    for c in cells.iter().filter(|c| !c.is_ok()) {
        log::warn!("cell gamma={} T={}: {}", c.gamma, c.temperature, c.status);
    }
    if let Some(path) = &config.base.output {
        write_table(path, &ContributionCell::COLUMNS, cells.iter().map(|c| c.row()).collect(), config.base.format)?;
        write_manifest(path, "map", config, constants(&config.base.spec), start.elapsed().as_secs_f64())?;
    }
    Ok(cells)
}

/// Entanglement and total correlations for one parameter value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NegativitySeries {
    pub value: f64,
    pub times: Vec<f64>,
    pub e_n: Vec<f64>,
    pub i_se: Vec<f64>,
}

impl NegativitySeries {
    /// Trapezoidal time average of `E_N`.
    pub fn mean_negativity(&self) -> f64 {
        let n = self.times.len();
        if n < 2 {
            return self.e_n.first().copied().unwrap_or(0.0);
        }
        let span = self.times[n - 1] - self.times[0];
        let area: f64 = (1..n).map(|k| 0.5 * (self.e_n[k] + self.e_n[k - 1]) * (self.times[k] - self.times[k - 1])).sum();
        area / span
    }
}

pub fn negativity_study(config: &NegativityConfig) -> Result<Vec<NegativitySeries>> {
    let times = uniform_grid(config.base.t_end, config.base.n_points);
    let obs = Observables { thermo: false, entropy: true, decomposition: false, negativity: true };
    config
        .values
        .iter()
        .map(|&value| {
            let mut spec = config.base.spec.clone();
            spec.drive.f0 = 0.0;
            match config.vary {
                Parameter::Temperature => spec.temperature = value,
                Parameter::Gamma => spec.gamma = value,
            }
            let traj = Dynamics::new(&spec)?.trajectory(&times, obs)?;
            let mut e_n = Vec::with_capacity(times.len());
            let mut i_se = Vec::with_capacity(times.len());
            for s in &traj.samples {
                e_n.push(s.negativity.unwrap_or(0.0));
                let ss = crate::gaussian::mode_entropy(crate::gaussian::one_mode_nu(&s.system.cov)?)?;
                i_se.push(ss + s.bath_entropy.unwrap_or(0.0) - traj.total_entropy);
            }
            Ok(NegativitySeries { value, times: times.clone(), e_n, i_se })
        })
        .collect()
}

pub fn run_negativity_study(config: &NegativityConfig) -> Result<Vec<NegativitySeries>> {
    let start = Instant::now();
    let series = negativity_study(config)?;
    if let Some(path) = &config.base.output {
        let name = match config.vary {
            Parameter::Temperature => "temperature",
            Parameter::Gamma => "gamma",
        };
        let rows = series
            .iter()
            .flat_map(|s| {
                (0..s.times.len()).map(move |k| {
                    vec![fmt_number(s.value), fmt_number(s.times[k]), fmt_number(s.e_n[k]), fmt_number(s.i_se[k])]
                })
            })
            .collect();
        write_table(path, &[name, "t", "E_N", "I_SE"], rows, config.base.format)?;
        write_manifest(path, "negativity", config, constants(&config.base.spec), start.elapsed().as_secs_f64())?;
    }
    Ok(series)
}

/// DL and ELB entropy production for one coupling.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonSeries {
    pub gamma: f64,
    pub times: Vec<f64>,
    pub dl: Vec<f64>,
    pub elb: Vec<f64>,
    pub delta: Vec<f64>,
    pub epsilon: Vec<Option<f64>>,
}

impl ComparisonSeries {
    pub fn max_abs_delta(&self) -> f64 {
        self.delta.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn max_abs_epsilon(&self) -> f64 {
        self.epsilon.iter().flatten().fold(0.0, |m, e| m.max(e.abs()))
    }
}

pub fn compare_definitions(config: &CompareConfig) -> Result<Vec<ComparisonSeries>> {
    let times = uniform_grid(config.base.t_end, config.base.n_points);
    config
        .gammas
        .iter()
        .map(|&gamma| {
            let spec = ModelSpec { gamma, ..config.base.spec.clone() };
            let traj = Dynamics::new(&spec)?.trajectory(&times, Observables::thermo_only())?;
            let hspec = SystemHamiltonianSpec::for_model(&spec, config.base.system_frequency);
            let beta = spec.beta();
            let dl = thermo::entropy_production_dl(&traj, &hspec, beta)?;
            let elb = thermo::entropy_production_elb(&traj, beta)?;
            let (delta, epsilon) = thermo::definition_gap(&elb, &dl);
            Ok(ComparisonSeries { gamma, times: times.clone(), dl, elb, delta, epsilon })
        })
        .collect()
}

pub fn run_compare_definitions(config: &CompareConfig) -> Result<Vec<ComparisonSeries>> {
    let start = Instant::now();
    let series = compare_definitions(config)?;
    if let Some(path) = &config.base.output {
        let rows = series
            .iter()
            .flat_map(|s| {
                (0..s.times.len()).map(move |k| {
                    vec![
                        fmt_number(s.gamma),
                        fmt_number(s.times[k]),
                        fmt_number(s.dl[k]),
                        fmt_number(s.elb[k]),
                        fmt_number(s.delta[k]),
                        fmt_optional(s.epsilon[k]),
                    ]
                })
            })
            .collect();
        write_table(path, &["gamma", "t", "dS_DL", "dS_ELB", "delta", "epsilon"], rows, config.base.format)?;
        let summary: Vec<_> = series
            .iter()
            .map(|s| json!({"gamma": s.gamma, "max_abs_delta": s.max_abs_delta(), "max_abs_epsilon": s.max_abs_epsilon()}))
            .collect();
        let mut consts = constants(&config.base.spec);
        consts["summary"] = json!(summary);
        write_manifest(path, "compare-definitions", config, consts, start.elapsed().as_secs_f64())?;
    }
    Ok(series)
}

/// Default output file name for a subcommand.
pub fn default_output(command: &str, format: Format) -> std::path::PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    Path::new(&format!("{command}.{ext}")).to_path_buf()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::DrivePulse;

    #[test]
    fn single_cell_matches_timeseries() {
        let mut spec = ModelSpec { n_modes: 20, omega_max: 4.0, cutoff: 4.0, gamma: 0.5, temperature: 1.0, ..ModelSpec::default() };
        let t_max = recurrence_time(&spec);
        spec.drive = DrivePulse::with_duration(2.0, 1.2, 0.5 * t_max, 0.0);
        let base = RunConfig { spec, t_end: t_max, n_points: 11, ..RunConfig::default() };
        let last = timeseries(&base).unwrap().pop().unwrap();
        let sweep = SweepConfig { base: base.clone(), gammas: vec![0.5], temperatures: vec![1.0], t_eval: t_max };
        let cell = &contribution_map(&sweep)[0];
        let elb = last.ds_elb.unwrap();
        assert!(cell.is_ok());
        assert_eq!(cell.frac_denv, Some(last.d_env.unwrap() / elb));
        assert_eq!(cell.frac_ise, Some(last.i_se.unwrap() / elb));
        assert_eq!(cell.frac_ienv, Some(last.i_env.unwrap() / elb));
    }

    #[test]
    fn zero_temperature_cell_is_missing() {
        let spec = ModelSpec { n_modes: 10, omega_max: 4.0, cutoff: 4.0, temperature: 0.0, ..ModelSpec::default() };
        let cell = contribution_cell(&spec, 1.0);
        assert_eq!(cell.status, "missing: zero temperature");
        assert_eq!(cell.dominant(), None);
    }
}
