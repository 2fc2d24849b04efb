//! `key = value` run configuration.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chimhd_core::physics::{MobilityCase, PhysParams, PotentialKind};
use chimhd_core::scheme::StepperSettings;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    RoundedSquare,
    TwoBubbles,
    /// Single fluid, phase frozen at +1: the vortex alone, eta = 0.01.
    VortexOnly,
    /// Circular droplet of radius 0.25 in the centre, fluid at rest.
    Droplet,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::RoundedSquare => "rounded_square",
            Scenario::TwoBubbles => "two_bubbles",
            Scenario::VortexOnly => "vortex_only",
            Scenario::Droplet => "droplet",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rounded_square" => Ok(Scenario::RoundedSquare),
            "two_bubbles" => Ok(Scenario::TwoBubbles),
            "vortex_only" => Ok(Scenario::VortexOnly),
            "droplet" => Ok(Scenario::Droplet),
            _ => Err(format!(
                "unknown scenario `{s}` (rounded_square, two_bubbles, vortex_only, droplet)"
            )),
        }
    }
}

fn case_name(c: MobilityCase) -> &'static str {
    match c {
        MobilityCase::CaseI => "1",
        MobilityCase::CaseII => "2",
        MobilityCase::CaseIII => "3",
    }
}

fn parse_case(s: &str) -> Result<MobilityCase, String> {
    match s {
        "1" | "I" | "case1" => Ok(MobilityCase::CaseI),
        "2" | "II" | "case2" => Ok(MobilityCase::CaseII),
        "3" | "III" | "case3" => Ok(MobilityCase::CaseIII),
        _ => Err(format!("mobility_case must be 1, 2 or 3, got `{s}`")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub nx: usize,
    pub ny: usize,
    pub params: PhysParams,
    pub dt: f64,
    pub t_end: f64,
    pub output_dir: PathBuf,
    pub snapshot_every: usize,
    pub tol_ch: f64,
    pub tol_current: f64,
    pub tol_ns: f64,
    pub maxit: usize,
    /// Allowed energy increase per step, relative to `E(0)`.
    pub energy_tolerance: f64,
    /// Abort with an invariant breach when the energy rises beyond tolerance.
    pub abort_on_energy_increase: bool,
}

impl RunConfig {
    /// Defaults of a scenario: h = 1/64, dt = 0.01 and the scenario's own
    /// parameter set and final time.
    pub fn for_scenario(scenario: Scenario) -> Self {
        let mut params = PhysParams::default();
        let t_end = match scenario {
            Scenario::RoundedSquare => 2.0,
            Scenario::TwoBubbles => {
                params.eta1 = 100.0;
                params.eta2 = 100.0;
                params.sigma1 = 100.0;
                params.sigma2 = 100.0;
                params.m0 = 0.01;
                params.gamma = 0.01;
                2.5
            }
            Scenario::VortexOnly => {
                // at eta = 1 the vortex is gone (KE ~ 1e-46) well before t = 1
                params.eta1 = 0.01;
                params.eta2 = 0.01;
                1.0
            }
            Scenario::Droplet => 1.0,
        };
        let solver = StepperSettings::default();
        Self {
            scenario,
            nx: 64,
            ny: 64,
            params,
            dt: 0.01,
            t_end,
            output_dir: PathBuf::from(format!("out/{}", scenario.name())),
            snapshot_every: 50,
            tol_ch: solver.tol_ch,
            tol_current: solver.tol_current,
            tol_ns: solver.tol_ns,
            maxit: solver.maxit,
            energy_tolerance: 1e-8,
            abort_on_energy_increase: true,
        }
    }

    /// Number of steps to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }

    pub fn settings(&self) -> StepperSettings {
        StepperSettings {
            tol_ch: self.tol_ch,
            tol_current: self.tol_current,
            tol_ns: self.tol_ns,
            maxit: self.maxit,
            freeze_phase: self.scenario == Scenario::VortexOnly,
            ..StepperSettings::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        self.params.validate().map_err(|e| e.to_string())?;
        if self.nx < 4 || self.ny < 4 {
            return Err(format!("nx and ny must be at least 4, got {} x {}", self.nx, self.ny));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.snapshot_every < 1 {
            return Err("snapshot_every must be at least 1".into());
        }
        for (name, v) in [
            ("tol_ch", self.tol_ch),
            ("tol_current", self.tol_current),
            ("tol_ns", self.tol_ns),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if self.maxit == 0 {
            return Err("maxit must be positive".into());
        }
        if !(self.energy_tolerance >= 0.0) {
            return Err(format!("energy_tolerance must be nonnegative, got {}", self.energy_tolerance));
        }
        if self.nx != self.ny {
            return Err(format!("the unit square needs nx = ny, got {} x {}", self.nx, self.ny));
        }
        Ok(())
    }

    /// Writes every key; `parse_str` of the result gives `self` back.
    pub fn serialize(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("scenario", self.scenario.name().into());
        kv("nx", self.nx.to_string());
        kv("ny", self.ny.to_string());
        kv("eps", format!("{:?}", p.eps));
        kv("gamma", format!("{:?}", p.gamma));
        kv("m0", format!("{:?}", p.m0));
        kv("mobility_case", case_name(p.mobility).into());
        kv("s_stab", format!("{:?}", p.s_stab));
        kv("eta1", format!("{:?}", p.eta1));
        kv("eta2", format!("{:?}", p.eta2));
        kv("sigma1", format!("{:?}", p.sigma1));
        kv("sigma2", format!("{:?}", p.sigma2));
        kv("b", format!("{:?}", p.b));
        match p.potential {
            PotentialKind::GinzburgLandau => kv("potential", "ginzburg_landau".into()),
            PotentialKind::FloryHuggins { theta } => {
                kv("potential", "flory_huggins".into());
                kv("theta", format!("{theta:?}"));
            }
        }
        kv("dt", format!("{:?}", self.dt));
        kv("t_end", format!("{:?}", self.t_end));
        kv("output_dir", self.output_dir.display().to_string());
        kv("snapshot_every", self.snapshot_every.to_string());
        kv("tol_ch", format!("{:?}", self.tol_ch));
        kv("tol_current", format!("{:?}", self.tol_current));
        kv("tol_ns", format!("{:?}", self.tol_ns));
        kv("maxit", self.maxit.to_string());
        kv("energy_tolerance", format!("{:?}", self.energy_tolerance));
        kv("abort_on_energy_increase", self.abort_on_energy_increase.to_string());
        s
    }
}

const KEYS: &[&str] = &[
    "scenario",
    "nx",
    "ny",
    "eps",
    "gamma",
    "m0",
    "mobility_case",
    "s_stab",
    "eta1",
    "eta2",
    "sigma1",
    "sigma2",
    "b",
    "potential",
    "theta",
    "dt",
    "t_end",
    "output_dir",
    "snapshot_every",
    "tol_ch",
    "tol_current",
    "tol_ns",
    "maxit",
    "energy_tolerance",
    "abort_on_energy_increase",
];

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::ConfigFile {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    parse_str(&text)
}

fn value<T: FromStr>(entries: &HashMap<&str, (usize, &str)>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    match entries.get(key) {
        None => Ok(None),
        Some(&(line, v)) => v.parse::<T>().map(Some).map_err(|e| CliError::Config {
            line,
            msg: format!("bad value for `{key}`: {e}"),
        }),
    }
}

pub fn parse_str(text: &str) -> Result<RunConfig, CliError> {
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, val) = body.split_once('=').ok_or_else(|| CliError::Config {
            line,
            msg: format!("expected `key = value`, got `{body}`"),
        })?;
        let (key, val) = (key.trim(), val.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::Config {
                line,
                msg: format!("unknown key `{key}`"),
            });
        }
        if let Some((prev, _)) = entries.insert(key, (line, val)) {
            return Err(CliError::Config {
                line,
                msg: format!("`{key}` already set on line {prev}"),
            });
        }
    }

    let scenario = match entries.get("scenario") {
        None => return Err(CliError::Invalid("scenario missing".into())),
        Some(&(line, v)) => v.parse::<Scenario>().map_err(|msg| CliError::Config { line, msg })?,
    };
    let mut c = RunConfig::for_scenario(scenario);
    let p = &mut c.params;

    macro_rules! set {
        ($key:literal, $field:expr) => {
            if let Some(v) = value(&entries, $key)? {
                $field = v;
            }
        };
    }
    set!("nx", c.nx);
    set!("ny", c.ny);
    set!("eps", p.eps);
    set!("gamma", p.gamma);
    set!("m0", p.m0);
    set!("s_stab", p.s_stab);
    set!("eta1", p.eta1);
    set!("eta2", p.eta2);
    set!("sigma1", p.sigma1);
    set!("sigma2", p.sigma2);
    set!("b", p.b);
    set!("dt", c.dt);
    set!("t_end", c.t_end);
    set!("snapshot_every", c.snapshot_every);
    set!("tol_ch", c.tol_ch);
    set!("tol_current", c.tol_current);
    set!("tol_ns", c.tol_ns);
    set!("maxit", c.maxit);
    set!("energy_tolerance", c.energy_tolerance);
    set!("abort_on_energy_increase", c.abort_on_energy_increase);
    if let Some(&(_, v)) = entries.get("output_dir") {
        c.output_dir = PathBuf::from(v);
    }
    if let Some(&(line, v)) = entries.get("mobility_case") {
        p.mobility = parse_case(v).map_err(|msg| CliError::Config { line, msg })?;
    }
    let theta: Option<f64> = value(&entries, "theta")?;
    match entries.get("potential") {
        None | Some((_, "ginzburg_landau")) => {
            if let Some(&(line, _)) = entries.get("theta") {
                return Err(CliError::Config {
                    line,
                    msg: "theta only applies to the flory_huggins potential".into(),
                });
            }
        }
        Some(&(line, "flory_huggins")) => {
            let theta = theta.ok_or(CliError::Config {
                line,
                msg: "flory_huggins needs `theta`".into(),
            })?;
            p.potential = PotentialKind::FloryHuggins { theta };
        }
        Some(&(line, other)) => {
            return Err(CliError::Config {
                line,
                msg: format!("unknown potential `{other}` (ginzburg_landau, flory_huggins)"),
            })
        }
    }

    c.validate().map_err(|msg| {
        // report the line of the first key named in the message, if any
        let line = msg
            .split(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
            .filter_map(|w| entries.get(w).map(|e| e.0))
            .min();
        match line {
            Some(line) => CliError::Config { line, msg },
            None => CliError::Invalid(msg),
        }
    })?;
    Ok(c)
}
