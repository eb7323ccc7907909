//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments run to end of line
//! problem.gamma  = 1.5
//! problem.gamma1 = 1
//! problem.gamma2 = 1
//! problem.gamma3 = 1
//! problem.phi1   = sin(pi*x)
//! problem.f      = 0
//! grid.a = 0
//! grid.b = 1
//! grid.M = 32
//! mesh.T = 1
//! mesh.N = 32
//! ```
//!
//! Problem functions use the expression grammar of [`crate::exprparse`];
//! coefficients may be constant expressions such as `2/gamma(1.5)`.
//! `problem.preset = mms` or `mms_velocity` fills in the problem functions
//! and exact solution of the built-in manufactured solutions.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::basis::SpaceGrid;
use crate::error::{Error, Result};
use crate::exprparse::{parse, Expression};
use crate::solver::{ProblemSpec, TimeMesh};
use crate::verify::{mms_problem, mms_velocity_problem, ManufacturedProblem};

const KNOWN_KEYS: &[&str] = &[
    "problem.preset",
    "problem.gamma",
    "problem.gamma1",
    "problem.gamma2",
    "problem.gamma3",
    "problem.phi1",
    "problem.phi2",
    "problem.psi1",
    "problem.psi2",
    "problem.f",
    "problem.exact",
    "grid.a",
    "grid.b",
    "grid.M",
    "mesh.T",
    "mesh.N",
    "converge.levels",
    "stability.steps",
    "stability.beta_scan",
    "stability.xi0",
    "stability.nu",
    "output.dir",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Mms,
    MmsVelocity,
}

/// Fully validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec<f64>,
    pub exact: Option<Expression>,
    pub preset: Option<Preset>,
    pub a: f64,
    pub b: f64,
    pub m: usize,
    pub t_final: f64,
    pub n: usize,
    pub levels: usize,
    pub steps: usize,
    pub beta_scan: usize,
    pub xi0: f64,
    /// Replaces the computed `ν` in stability studies when set.
    pub forced_nu: Option<f64>,
    pub output_dir: PathBuf,
}

fn raw_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(
                format!("line {}", lineno + 1),
                "expected `key = value`",
            ));
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::config(key, "unknown key"));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::config(key, "duplicate key"));
        }
    }
    Ok(out)
}

struct Entries(BTreeMap<String, String>);

impl Entries {
    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn expr(&self, key: &str) -> Result<Option<Expression>> {
        self.get(key)
            .map(|v| parse(v).map_err(|e| Error::config(key, e.to_string())))
            .transpose()
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.expr(key)? else {
            return Ok(None);
        };
        if !e.is_constant() {
            return Err(Error::config(key, "must be a constant expression"));
        }
        let v = e
            .eval(0.0, 0.0)
            .map_err(|err| Error::config(key, err.to_string()))?;
        if !v.is_finite() {
            return Err(Error::config(key, format!("value {v} is not finite")));
        }
        Ok(Some(v))
    }

    fn required_number(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| Error::config(key, "missing"))
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::config(key, format!("`{v}` is not a nonnegative integer")))
            })
            .transpose()
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let e = Entries(raw_entries(text)?);
        let gamma = e.required_number("problem.gamma")?;
        let gamma1 = e.required_number("problem.gamma1")?;
        let gamma2 = e.required_number("problem.gamma2")?;
        let gamma3 = e.required_number("problem.gamma3")?;

        let preset = match e.get("problem.preset") {
            None | Some("none") => None,
            Some("mms") => Some(Preset::Mms),
            Some("mms_velocity") => Some(Preset::MmsVelocity),
            Some(other) => {
                return Err(Error::config(
                    "problem.preset",
                    format!("unknown preset `{other}`"),
                ))
            }
        };

        let (problem, exact) = match preset {
            Some(kind) => {
                for key in [
                    "problem.phi1",
                    "problem.phi2",
                    "problem.psi1",
                    "problem.psi2",
                    "problem.f",
                    "problem.exact",
                ] {
                    if e.get(key).is_some() {
                        return Err(Error::config(
                            key,
                            "not allowed together with problem.preset",
                        ));
                    }
                }
                let built: Result<ManufacturedProblem<f64>> = match kind {
                    Preset::Mms => mms_problem(gamma, gamma1, gamma2, gamma3),
                    Preset::MmsVelocity => mms_velocity_problem(gamma, gamma1, gamma2, gamma3),
                };
                let built = built.map_err(|err| Error::config("problem.gamma", err.to_string()))?;
                (built.problem, Some(built.exact))
            }
            None => {
                let z = Expression::zero;
                let problem = ProblemSpec::new(
                    gamma,
                    gamma1,
                    gamma2,
                    gamma3,
                    e.expr("problem.phi1")?.unwrap_or_else(z),
                    e.expr("problem.phi2")?.unwrap_or_else(z),
                    e.expr("problem.psi1")?.unwrap_or_else(z),
                    e.expr("problem.psi2")?.unwrap_or_else(z),
                    e.expr("problem.f")?.unwrap_or_else(z),
                )?;
                (problem, e.expr("problem.exact")?)
            }
        };

        let a = e.number("grid.a")?.unwrap_or(0.0);
        let b = e.number("grid.b")?.unwrap_or(1.0);
        let m = e
            .count("grid.M")?
            .ok_or_else(|| Error::config("grid.M", "missing"))?;
        let t_final = e.number("mesh.T")?.unwrap_or(1.0);
        let n = e
            .count("mesh.N")?
            .ok_or_else(|| Error::config("mesh.N", "missing"))?;

        let cfg = RunConfig {
            problem,
            exact,
            preset,
            a,
            b,
            m,
            t_final,
            n,
            levels: e.count("converge.levels")?.unwrap_or(3),
            steps: e.count("stability.steps")?.unwrap_or(1000),
            beta_scan: e.count("stability.beta_scan")?.unwrap_or(33),
            xi0: e.number("stability.xi0")?.unwrap_or(1.0),
            forced_nu: e.number("stability.nu")?,
            output_dir: PathBuf::from(e.get("output.dir").unwrap_or(".")),
        };
        cfg.grid()?;
        cfg.mesh()?;
        if cfg.xi0 == 0.0 {
            return Err(Error::config("stability.xi0", "seed must be nonzero"));
        }
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<SpaceGrid<f64>> {
        SpaceGrid::new(self.a, self.b, self.m).map_err(|e| match e {
            Error::Config { .. } => e,
            other => Error::config("grid.M", other.to_string()),
        })
    }

    pub fn mesh(&self) -> Result<TimeMesh<f64>> {
        TimeMesh::new(self.t_final, self.n)
    }

    /// The manufactured problem described by this configuration, if it has
    /// an exact solution.
    pub fn manufactured(&self) -> Result<ManufacturedProblem<f64>> {
        let exact = self
            .exact
            .clone()
            .ok_or_else(|| Error::config("problem.exact", "required for convergence studies"))?;
        Ok(ManufacturedProblem {
            problem: self.problem.clone(),
            exact,
            a: self.a,
            b: self.b,
            t_final: self.t_final,
        })
    }
}
