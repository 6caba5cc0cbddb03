//! Run and sweep configuration: file schema (TOML or JSON), command-line
//! overrides and resolution of defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bath::{recurrence_time, DrivePulse, ModelSpec};
use crate::dynamics::Observables;
use crate::error::{Error, Result};
use crate::thermo::SystemFrequency;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown output format {other:?} (expected csv or json)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// Explicit values or `n` points spanning `[min, max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        n: usize,
        #[serde(default)]
        scale: Scale,
    },
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Range { min, max, n, scale } => {
                if *n == 0 || !(min.is_finite() && max.is_finite()) || max < min {
                    return Err(Error::Config(format!("invalid grid range [{min}, {max}] with {n} points")));
                }
                if *n == 1 {
                    vec![*min]
                } else {
                    match scale {
                        Scale::Linear => {
                            (0..*n).map(|k| if k + 1 == *n { *max } else { min + (max - min) * k as f64 / (n - 1) as f64 }).collect()
                        }
                        Scale::Log => {
                            if *min <= 0.0 {
                                return Err(Error::Config("log-scaled grid needs a positive minimum".into()));
                            }
                            let (a, b) = (min.ln(), max.ln());
                            (0..*n)
                                .map(|k| match k {
                                    0 => *min,
                                    k if k + 1 == *n => *max,
                                    k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
                                })
                                .collect()
                        }
                    }
                }
            }
        };
        if pts.is_empty() {
            return Err(Error::Config("grid must not be empty".into()));
        }
        if pts.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("grid values must be finite and non-negative".into()));
        }
        Ok(pts)
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveFile {
    pub f0: Option<f64>,
    pub omega_f: Option<f64>,
    pub t_f: Option<f64>,
    pub phi: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeFile {
    pub t_end: Option<f64>,
    pub n_points: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservablesFile {
    pub thermo: Option<bool>,
    pub decomposition: Option<bool>,
    pub negativity: Option<bool>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub gamma: Option<GridSpec>,
    pub temperature: Option<GridSpec>,
    pub t_eval: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegativityFile {
    /// Vary `T` at fixed `gamma`, or vary `gamma` at fixed `temperature`.
    pub vary: Option<Parameter>,
    pub values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareFile {
    pub gammas: Option<Vec<f64>>,
}

/// Everything a config file may contain; all keys optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_modes: Option<usize>,
    pub omega0: Option<f64>,
    pub omega_max: Option<f64>,
    pub gamma: Option<f64>,
    pub cutoff: Option<f64>,
    pub temperature: Option<f64>,
    pub system_frequency: Option<SystemFrequency>,
    pub drive: Option<DriveFile>,
    pub time: Option<TimeFile>,
    pub observables: Option<ObservablesFile>,
    pub output: Option<OutputFile>,
    pub sweep: Option<SweepFile>,
    pub negativity: Option<NegativityFile>,
    pub compare: Option<CompareFile>,
}

impl ConfigFile {
    /// Parse TOML or JSON; JSON is recognised by extension or a leading `{`.
    pub fn parse(text: &str, hint: Option<&Path>) -> Result<Self> {
        let is_json = hint.and_then(|p| p.extension()).map(|e| e.eq_ignore_ascii_case("json")).unwrap_or(false)
            || text.trim_start().starts_with('{');
        if is_json {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON config: {e}")))
        } else {
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid TOML config: {e}")))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        ConfigFile::parse(&text, Some(path))
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub temperature: Option<f64>,
    pub f0: Option<f64>,
    pub omega_f: Option<f64>,
    pub n_modes: Option<usize>,
    pub n_points: Option<usize>,
    pub t_end: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    Temperature,
    Gamma,
}

/// Fully resolved single-run configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub spec: ModelSpec,
    pub pulse_duration: f64,
    pub system_frequency: SystemFrequency,
    pub t_end: f64,
    pub n_points: usize,
    pub thermo: bool,
    pub decomposition: bool,
    pub negativity: bool,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::resolve(&ConfigFile::default(), &Overrides::default()).expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn resolve(file: &ConfigFile, ov: &Overrides) -> Result<Self> {
        let base = ModelSpec::default();
        let drive = file.drive.clone().unwrap_or_default();
        let n_modes = ov.n_modes.or(file.n_modes).unwrap_or(base.n_modes);
        let omega_max = file.omega_max.unwrap_or(base.omega_max);
        let mut spec = ModelSpec {
            n_modes,
            omega0: file.omega0.unwrap_or(base.omega0),
            omega_max,
            gamma: ov.gamma.or(file.gamma).unwrap_or(base.gamma),
            cutoff: file.cutoff.unwrap_or(omega_max),
            temperature: ov.temperature.or(file.temperature).unwrap_or(base.temperature),
            drive: DrivePulse::off(),
        };
        let t_max = recurrence_time(&spec);
        let pulse_duration = drive.t_f.unwrap_or(0.5 * t_max);
        if !(pulse_duration.is_finite() && pulse_duration > 0.0) {
            return Err(Error::Config(format!("drive.t_f must be positive, got {pulse_duration}")));
        }
        spec.drive = DrivePulse::with_duration(
            ov.f0.or(drive.f0).unwrap_or(0.0),
            ov.omega_f.or(drive.omega_f).unwrap_or(1.2),
            pulse_duration,
            drive.phi.unwrap_or(0.0),
        );
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;

        let time = file.time.clone().unwrap_or_default();
        let t_end = ov.t_end.or(time.t_end).unwrap_or(t_max);
        let n_points = ov.n_points.or(time.n_points).unwrap_or(2000);
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be non-negative, got {t_end}")));
        }
        if n_points == 0 {
            return Err(Error::Config("n_points must be at least 1".into()));
        }
        if t_end > 0.9 * t_max {
            log::warn!(
                "t_end = {t_end:.4} exceeds 90% of the recurrence time {t_max:.4}; late values may show finite-bath revivals"
            );
        }
        let obs = file.observables.clone().unwrap_or_default();
        let output = file.output.clone().unwrap_or_default();
        Ok(RunConfig {
            spec,
            pulse_duration,
            system_frequency: file.system_frequency.unwrap_or_default(),
            t_end,
            n_points,
            thermo: obs.thermo.unwrap_or(true),
            decomposition: obs.decomposition.unwrap_or(true),
            negativity: obs.negativity.unwrap_or(true),
            output: ov.out.clone().or(output.path),
            format: ov.format.or(output.format).unwrap_or_default(),
        })
    }

    pub fn observables(&self) -> Observables {
        Observables {
            thermo: self.thermo,
            entropy: self.decomposition,
            decomposition: self.decomposition,
            negativity: self.negativity,
        }
    }

    pub fn recurrence_time(&self) -> f64 {
        recurrence_time(&self.spec)
    }
}

/// Contribution-map sweep over `(γ, T)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub gammas: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub t_eval: f64,
}

impl SweepConfig {
    pub fn resolve(file: &ConfigFile, ov: &Overrides) -> Result<Self> {
        let base = RunConfig::resolve(file, ov)?;
        let sweep = file.sweep.clone().unwrap_or_default();
        let gammas = match (&ov.gamma, sweep.gamma) {
            (Some(g), _) => vec![*g],
            (None, Some(spec)) => spec.points()?,
            (None, None) => GridSpec::Range { min: 1e-3, max: 2.0, n: 60, scale: Scale::Log }.points()?,
        };
        let temperatures = match (&ov.temperature, sweep.temperature) {
            (Some(t), _) => vec![*t],
            (None, Some(spec)) => spec.points()?,
            (None, None) => GridSpec::Range { min: 0.0, max: 5.0, n: 60, scale: Scale::Linear }.points()?,
        };
        let t_eval = sweep.t_eval.unwrap_or_else(|| base.recurrence_time());
        if !(t_eval.is_finite() && t_eval >= 0.0) {
            return Err(Error::Config(format!("t_eval must be non-negative, got {t_eval}")));
        }
        Ok(SweepConfig { base, gammas, temperatures, t_eval })
    }
}

/// One-parameter entanglement study; the drive is always switched off.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NegativityConfig {
    pub base: RunConfig,
    pub vary: Parameter,
    pub values: Vec<f64>,
}

impl NegativityConfig {
    pub fn resolve(file: &ConfigFile, ov: &Overrides) -> Result<Self> {
        let mut base = RunConfig::resolve(file, ov)?;
        base.spec.drive.f0 = 0.0;
        let neg = file.negativity.clone().unwrap_or_default();
        let vary = neg.vary.unwrap_or(Parameter::Temperature);
        let values = match neg.values {
            Some(v) => v,
            None => match vary {
                Parameter::Temperature => vec![0.05, 0.1, 0.5, 1.0],
                Parameter::Gamma => vec![0.1, 0.5, 1.0, 2.0],
            },
        };
        if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("negativity values must be non-empty and non-negative".into()));
        }
        Ok(NegativityConfig { base, vary, values })
    }
}

/// DL vs ELB comparison across a coupling ladder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareConfig {
    pub base: RunConfig,
    pub gammas: Vec<f64>,
}

impl CompareConfig {
    pub fn resolve(file: &ConfigFile, ov: &Overrides, gammas: Option<Vec<f64>>) -> Result<Self> {
        let base = RunConfig::resolve(file, ov)?;
        let gammas = gammas
            .or_else(|| file.compare.as_ref().and_then(|c| c.gammas.clone()))
            .unwrap_or_else(|| vec![0.1, 0.01, 0.001]);
        if gammas.is_empty() || gammas.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::Config("compare gammas must be non-empty and non-negative".into()));
        }
        Ok(CompareConfig { base, gammas })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_mirror_reference_setup() {
        let c = RunConfig::default();
        assert_eq!(c.spec.n_modes, 400);
        assert_eq!(c.spec.cutoff, 40.0);
        assert_eq!(c.n_points, 2000);
        assert!((c.t_end - 20.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((c.pulse_duration - 10.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(c.spec.drive.is_off());
    }

    #[test]
    fn toml_and_json_agree() {
        let toml = "n_modes = 50\ngamma = 0.3\n[drive]\nf0 = 2.0\nt_f = 4.0\n[time]\nn_points = 11\n";
        let json = r#"{"n_modes": 50, "gamma": 0.3, "drive": {"f0": 2.0, "t_f": 4.0}, "time": {"n_points": 11}}"#;
        let a = RunConfig::resolve(&ConfigFile::parse(toml, None).unwrap(), &Overrides::default()).unwrap();
        let b = RunConfig::resolve(&ConfigFile::parse(json, None).unwrap(), &Overrides::default()).unwrap();
        assert_eq!(a, b);
        assert!((a.spec.drive.duration() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn overrides_win() {
        let file = ConfigFile::parse("gamma = 0.3\ntemperature = 2.0", None).unwrap();
        let ov = Overrides { gamma: Some(0.0), n_modes: Some(7), ..Overrides::default() };
        let c = RunConfig::resolve(&file, &ov).unwrap();
        assert_eq!(c.spec.gamma, 0.0);
        assert_eq!(c.spec.temperature, 2.0);
        assert_eq!(c.spec.n_modes, 7);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ConfigFile::parse("gama = 1.0", None).is_err());
        let file = ConfigFile::parse("temperature = -1.0", None).unwrap();
        assert!(matches!(RunConfig::resolve(&file, &Overrides::default()), Err(Error::Config(_))));
        assert!(matches!(ConfigFile::load(Path::new("/nonexistent/qbm.toml")), Err(Error::Config(_))));
    }

    #[test]
    fn grids() {
        let g = GridSpec::Range { min: 1e-3, max: 2.0, n: 5, scale: Scale::Log }.points().unwrap();
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[4], 2.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let sweep = SweepConfig::resolve(&ConfigFile::default(), &Overrides::default()).unwrap();
        assert_eq!(sweep.gammas.len(), 60);
        assert_eq!(sweep.temperatures[0], 0.0);
        let parsed = ConfigFile::parse("[sweep]\ngamma = [0.1, 1.0]\ntemperature = {min = 0.5, max = 5.0, n = 4}", None).unwrap();
        let s = SweepConfig::resolve(&parsed, &Overrides::default()).unwrap();
        assert_eq!(s.gammas, vec![0.1, 1.0]);
        assert_eq!(s.temperatures, vec![0.5, 2.0, 3.5, 5.0]);
    }
}
