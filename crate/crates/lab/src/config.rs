//! Run configuration: a TOML file, overridden by command-line flags.

use crate::LabError;
use noetherlab_core::dynamics::{Chart, IntegratorOptions, PhaseState};
use noetherlab_core::systems::{make_central, make_darboux, make_uncoupled, to_cartesian, to_polar, Potential, SystemDef};
use noetherlab_core::Error;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const TASKS: [&str; 6] = ["simulate", "integrals", "check-symmetry", "check-multiplier", "reconstruct", "diagnose"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSpec,
    #[serde(default)]
    pub initial: Option<InitialSpec>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    /// Empty means every task the chosen subcommand can run.
    #[serde(default)]
    pub tasks: Vec<String>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub check: CheckSpec,
    #[serde(default)]
    pub reconstruct: ReconstructSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_horizon() -> f64 {
    50.0
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub kind: String,
    pub lambda: Option<f64>,
    pub omega: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub potential: Option<String>,
    pub k: Option<f64>,
    pub big_k: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default)]
    pub t: f64,
    pub r: Option<f64>,
    pub theta: Option<f64>,
    pub rdot: Option<f64>,
    pub thetadot: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub v1: Option<f64>,
    pub v2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub rtol: f64,
    pub atol: f64,
    pub sample_dt: f64,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        let d = IntegratorOptions::default();
        Self { rtol: d.rtol, atol: d.atol, sample_dt: d.sample_dt }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), format: Format::Csv }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    #[serde(default)]
    pub entries: Vec<String>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructSpec {
    #[serde(default)]
    pub generators: Vec<String>,
    pub endpoints: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// Flag overrides; `None` keeps the file's value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol: Option<f64>,
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
}

fn invalid(field: &str, value: f64, expected: &str) -> LabError {
    LabError::Config(format!("invalid value for `{field}`: {value} (expected {expected})"))
}

fn required(field: &str) -> LabError {
    LabError::Config(format!("missing field `{field}`"))
}

/// Core parameter errors carry the bare parameter name; prefix the table.
fn from_core(e: Error) -> LabError {
    match e {
        Error::InvalidParam { name, value, expected } => invalid(&format!("system.{name}"), value, expected),
        other => LabError::Config(format!("system: {other}")),
    }
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, overrides)
    }

    pub fn parse(text: &str, overrides: &Overrides) -> Result<Self, LabError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        if let Some(out) = &overrides.out {
            cfg.output.dir = out.clone();
        }
        if let Some(f) = overrides.format {
            cfg.output.format = f;
        }
        if let Some(tol) = overrides.tol {
            cfg.integrator.rtol = tol;
            cfg.integrator.atol = tol;
        }
        if let Some(h) = overrides.horizon {
            cfg.horizon = h;
        }
        if let Some(s) = overrides.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), LabError> {
        self.system()?;
        self.initial_state()?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", self.horizon, "a positive time"));
        }
        let i = &self.integrator;
        for (name, v) in [("integrator.rtol", i.rtol), ("integrator.atol", i.atol), ("integrator.sample_dt", i.sample_dt)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, v, "a positive number"));
            }
        }
        if let Some(bad) = self.tasks.iter().find(|t| !TASKS.contains(&t.as_str())) {
            return Err(LabError::Config(format!("unknown task `{bad}` in `tasks` (expected one of {})", TASKS.join(", "))));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(required("sweep.values"));
            }
            for &v in &sw.values {
                self.with_parameter(&sw.parameter, v)?.system()?;
            }
        }
        Ok(())
    }

    /// Whether the task list admits `task` (an empty list admits everything).
    pub fn wants(&self, task: &str) -> bool {
        self.tasks.is_empty() || self.tasks.iter().any(|t| t == task)
    }

    pub fn system(&self) -> Result<SystemDef, LabError> {
        let s = &self.system;
        let get = |v: Option<f64>, name: &str| v.ok_or_else(|| required(&format!("system.{name}")));
        match s.kind.as_str() {
            "darboux" => {
                let lambda = get(s.lambda, "lambda")?;
                if !(lambda >= 0.0) {
                    return Err(invalid("system.lambda", lambda, "λ ≥ 0"));
                }
                make_darboux(lambda, s.omega.unwrap_or(1.0)).map_err(from_core)
            }
            "uncoupled" => make_uncoupled(get(s.omega1, "omega1")?, get(s.omega2, "omega2")?).map_err(from_core),
            "central" => {
                let k = s.k.unwrap_or(1.0);
                let name = s.potential.as_deref().ok_or_else(|| required("system.potential"))?;
                let potential = match name {
                    "coulomb" => Potential::Coulomb { k },
                    "isotropic" => Potential::Isotropic { k },
                    "perturbed-coulomb" => Potential::PerturbedCoulomb { k, big_k: get(s.big_k, "big_k")? },
                    "power-law" => Potential::PowerLaw { k, p: get(s.p, "p")? },
                    "special" => Potential::SpecialKKr3 { k, big_k: get(s.big_k, "big_k")? },
                    other => {
                        return Err(LabError::Config(format!(
                            "unknown `system.potential` `{other}` (expected coulomb, isotropic, perturbed-coulomb, power-law or special)"
                        )))
                    }
                };
                make_central(potential).map_err(from_core)
            }
            other => Err(LabError::Config(format!("unknown `system.kind` `{other}` (expected uncoupled, central or darboux)"))),
        }
    }

    pub fn parameters(&self) -> BTreeMap<String, f64> {
        let s = &self.system;
        [("lambda", s.lambda), ("omega", s.omega), ("omega1", s.omega1), ("omega2", s.omega2), ("k", s.k), ("big_k", s.big_k), ("p", s.p)]
            .into_iter()
            .filter_map(|(n, v)| v.map(|v| (n.to_string(), v)))
            .collect()
    }

    /// Copy with one system parameter replaced, for sweeps.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self, LabError> {
        let mut c = self.clone();
        let s = &mut c.system;
        let slot = match name {
            "lambda" => &mut s.lambda,
            "omega" => &mut s.omega,
            "omega1" => &mut s.omega1,
            "omega2" => &mut s.omega2,
            "k" => &mut s.k,
            "big_k" => &mut s.big_k,
            "p" => &mut s.p,
            other => return Err(LabError::Config(format!("unknown `sweep.parameter` `{other}`"))),
        };
        *slot = Some(value);
        c.sweep = None;
        Ok(c)
    }

    /// The configured initial state in the system's chart, or a default
    /// bounded state for the system.
    pub fn initial_state(&self) -> Result<PhaseState, LabError> {
        let sys = self.system()?;
        let Some(i) = &self.initial else {
            return Ok(default_initial(&sys));
        };
        let polar = [i.r, i.theta, i.rdot, i.thetadot];
        let cart = [i.q1, i.q2, i.v1, i.v2];
        let any = |xs: &[Option<f64>]| xs.iter().any(Option::is_some);
        let state = match (any(&polar), any(&cart)) {
            (true, false) => {
                let names = ["initial.r", "initial.theta", "initial.rdot", "initial.thetadot"];
                let [r, th, rd, td] = fill(polar, names)?;
                if !(r > 0.0) {
                    return Err(invalid("initial.r", r, "r > 0"));
                }
                PhaseState::polar(i.t, r, th, rd, td)
            }
            (false, true) => {
                let [q1, q2, v1, v2] = fill(cart, ["initial.q1", "initial.q2", "initial.v1", "initial.v2"])?;
                PhaseState::cartesian(i.t, [q1, q2], [v1, v2])
            }
            (true, true) => return Err(LabError::Config("`initial` mixes polar (r, theta, …) and Cartesian (q1, q2, …) fields".into())),
            (false, false) => return Ok(default_initial(&sys)),
        };
        let chart = noetherlab_core::dynamics::Dynamics::chart(&sys);
        Ok(match (state.chart, chart) {
            (Chart::Polar, Chart::Cartesian) => to_cartesian(&state),
            // a Cartesian start at the origin is a domain failure, not a config error
            (Chart::Cartesian, Chart::Polar) => to_polar(&state).map_err(LabError::runtime)?,
            _ => state,
        })
    }

    pub fn integrator_options(&self) -> IntegratorOptions {
        let mut o = IntegratorOptions::default();
        o.rtol = self.integrator.rtol;
        o.atol = self.integrator.atol;
        o.sample_dt = self.integrator.sample_dt;
        o
    }
}

fn fill(values: [Option<f64>; 4], names: [&str; 4]) -> Result<[f64; 4], LabError> {
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = values[k].ok_or_else(|| required(names[k]))?;
        if !out[k].is_finite() {
            return Err(invalid(names[k], out[k], "a finite number"));
        }
    }
    Ok(out)
}

pub fn default_initial(sys: &SystemDef) -> PhaseState {
    match sys {
        SystemDef::Uncoupled(_) => PhaseState::cartesian(0.0, [1.0, 0.3], [0.2, -0.4]),
        // angular momentum 1
        SystemDef::Central(_) => PhaseState::polar(0.0, 1.0, 0.0, 0.2, 1.0),
        SystemDef::Darboux(_) => PhaseState::polar(0.0, 0.5, 0.2, 0.1, 0.6),
    }
}
