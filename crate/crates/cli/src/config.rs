use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sobolev_core::function::TargetFunction;
use sobolev_core::gegenbauer::{make_space, GegenbauerSobolevParams};
use sobolev_core::multiplier::{builtin_multiplier, BuiltinMultiplier, MultiplierSequence};
use sobolev_core::sobolev::SobolevSpaceSpec;
use sobolev_core::verification::{Region, Tolerances};

use crate::error::CliError;

/// Experiment description read from a JSON file. Every field is optional;
/// command-line flags override file values.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Inline space block.
    pub space: Option<SobolevSpaceSpec>,
    /// Path to a JSON space block, relative to the config file.
    pub space_file: Option<PathBuf>,
    /// Gegenbauer-Sobolev preset `{alpha, M, N}`.
    pub preset: Option<GegenbauerSobolevParams>,
    pub nmax: Option<usize>,
    pub function: Option<String>,
    pub multiplier: Option<String>,
    pub delta: Option<f64>,
    pub p: Option<f64>,
    pub schedule: Option<Vec<usize>>,
    pub points: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
}

/// Flag values that may override the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub nmax: Option<usize>,
    pub function: Option<String>,
    pub multiplier: Option<String>,
    pub p: Option<f64>,
    pub delta: Option<f64>,
    pub out: Option<PathBuf>,
    pub tol: Vec<String>,
}

/// A fully resolved experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub space: SobolevSpaceSpec,
    pub warnings: Vec<String>,
    pub nmax: usize,
    pub function: TargetFunction,
    pub multiplier: MultiplierSequence,
    pub region: Region,
    pub p: f64,
    pub schedule: Vec<usize>,
    pub points: Vec<f64>,
    pub tolerances: Tolerances,
    pub out: PathBuf,
}

pub const DEFAULT_NMAX: usize = 64;

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let (Some(file), Some(dir)) = (&cfg.space_file, path.parent()) {
            cfg.space_file = Some(dir.join(file));
        }
        Ok(cfg)
    }

    pub fn resolve(self, o: Overrides) -> Result<Experiment, CliError> {
        let given = [
            self.space.is_some(),
            self.space_file.is_some(),
            self.preset.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(CliError::Config(
                "give only one of space, space_file, preset".into(),
            ));
        }
        let mut warnings = Vec::new();
        let space = if let Some(s) = self.space {
            s
        } else if let Some(file) = self.space_file {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", file.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?
        } else if let Some(params) = self.preset {
            warnings = params.warnings();
            make_space(&params)?
        } else {
            return Err(CliError::Config(
                "no space given (use space, space_file or preset in the config)".into(),
            ));
        };
        space.validate()?;

        let nmax = o.nmax.or(self.nmax).unwrap_or(DEFAULT_NMAX);
        if nmax < 1 {
            return Err(CliError::Config("nmax must be at least 1".into()));
        }
        let function = TargetFunction::parse(
            &o.function
                .or(self.function)
                .unwrap_or_else(|| "runge".into()),
        )?;
        let descriptor = o
            .multiplier
            .or(self.multiplier)
            .unwrap_or_else(|| "ones".into());
        let multiplier = builtin_multiplier(BuiltinMultiplier::parse(&descriptor)?)?;
        let region = Region::new(o.delta.or(self.delta).unwrap_or(0.1))?;
        let p = o.p.or(self.p).unwrap_or(2.0);
        if !(p.is_finite() && p >= 1.0) {
            return Err(CliError::Config(format!("p must lie in [1, inf), got {p}")));
        }

        let schedule = match self.schedule {
            Some(s) => s,
            None => dyadic_schedule(nmax),
        };
        if schedule.is_empty()
            || schedule.windows(2).any(|w| w[1] <= w[0])
            || *schedule.last().unwrap() > nmax
        {
            return Err(CliError::Config(format!(
                "schedule must be strictly increasing with entries <= nmax = {nmax}"
            )));
        }
        let points = self.points.unwrap_or_else(default_points);

        let mut tolerances = Tolerances::default();
        for (name, value) in &self.tolerances {
            tolerances.set(name, *value)?;
        }
        for item in &o.tol {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--tol expects NAME=VALUE, got {item}")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| CliError::Config(format!("--tol {name}: not a number")))?;
            tolerances.set(name, value)?;
        }

        Ok(Experiment {
            space,
            warnings,
            nmax,
            function,
            multiplier,
            region,
            p,
            schedule,
            points,
            tolerances,
            out: o.out.or(self.out).unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}

/// `8, 16, ...` up to `nmax`, ending at `nmax`.
pub fn dyadic_schedule(nmax: usize) -> Vec<usize> {
    let mut s = Vec::new();
    let mut n = 8.min(nmax);
    while n < nmax {
        s.push(n);
        n *= 2;
    }
    s.push(nmax);
    s
}

/// 21 equispaced points on [-1, 1].
pub fn default_points() -> Vec<f64> {
    (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect()
}
