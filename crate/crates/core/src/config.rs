//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys use the same
//! spelling as the command-line flags without the leading dashes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::output::DEFAULT_PRECISION;
use crate::solver::{IterationScheme, SolverSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Tableau,
    IntegrateOde,
    IntegrateDde,
    Convergence,
    Reproduce,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Tableau => "tableau",
            ExperimentKind::IntegrateOde => "integrate-ode",
            ExperimentKind::IntegrateDde => "integrate-dde",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Reproduce => "reproduce",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tableau" => ExperimentKind::Tableau,
            "integrate-ode" => ExperimentKind::IntegrateOde,
            "integrate-dde" => ExperimentKind::IntegrateDde,
            "convergence" => ExperimentKind::Convergence,
            "reproduce" => ExperimentKind::Reproduce,
            other => return Err(Error::Config(format!("unknown experiment kind `{other}`"))),
        })
    }
}

/// Abscissae family for the quadrature.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeFamily {
    Gauss,
    List(Vec<f64>),
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeFamily::Gauss => f.write_str("gauss"),
            NodeFamily::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                f.write_str(&parts.join(" "))
            }
        }
    }
}

impl FromStr for NodeFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("gauss") {
            return Ok(NodeFamily::Gauss);
        }
        let values = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| Error::Config(format!("bad abscissa `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::Config("empty abscissae list".into()));
        }
        Ok(NodeFamily::List(values))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub problem: Option<String>,
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub nodes: NodeFamily,
    pub nu: Option<usize>,
    pub intervals: Option<usize>,
    pub h: Option<f64>,
    pub steps: Option<usize>,
    pub t0: Option<f64>,
    pub t_end: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub max_iter: Option<usize>,
    pub scheme: Option<IterationScheme>,
    pub out: Option<String>,
    pub precision: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: None,
            problem: None,
            k: None,
            s: None,
            nodes: NodeFamily::Gauss,
            nu: None,
            intervals: None,
            h: None,
            steps: None,
            t0: None,
            t_end: None,
            rtol: None,
            atol: None,
            max_iter: None,
            scheme: None,
            out: None,
            precision: DEFAULT_PRECISION,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "kind" => self.kind = Some(value.parse()?),
            "problem" => self.problem = Some(value.to_string()),
            "k" => self.k = Some(parse_num(key, value)?),
            "s" => self.s = Some(parse_num(key, value)?),
            "nodes" => self.nodes = value.parse()?,
            "nu" => self.nu = Some(parse_num(key, value)?),
            "K" => self.intervals = Some(parse_num(key, value)?),
            "h" => self.h = Some(parse_num(key, value)?),
            "steps" => self.steps = Some(parse_num(key, value)?),
            "t0" => self.t0 = Some(parse_num(key, value)?),
            "T" => self.t_end = Some(parse_num(key, value)?),
            "rtol" => self.rtol = Some(parse_num(key, value)?),
            "atol" => self.atol = Some(parse_num(key, value)?),
            "max-iter" => self.max_iter = Some(parse_num(key, value)?),
            "scheme" => {
                self.scheme = Some(match value {
                    "fixed-point" => IterationScheme::FixedPoint,
                    "newton" => IterationScheme::SimplifiedNewton,
                    other => return Err(Error::Config(format!("unknown scheme `{other}`"))),
                })
            }
            "out" => self.out = Some(value.to_string()),
            "precision" => self.precision = parse_num(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Values set in `other` replace those in `self`.
    pub fn merge(&mut self, other: &ExperimentConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(kind, problem, k, s, nu, intervals, h, steps, t0, t_end, rtol, atol, max_iter, scheme, out);
        if other.nodes != NodeFamily::Gauss {
            self.nodes = other.nodes.clone();
        }
        if other.precision != DEFAULT_PRECISION {
            self.precision = other.precision;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let (Some(k), Some(s)) = (self.k, self.s) {
            if k < s {
                return Err(Error::Config(format!("k = {k} must be at least s = {s}")));
            }
        }
        if self.s == Some(0) {
            return Err(Error::Config("s must be at least 1".into()));
        }
        if self.nu == Some(0) {
            return Err(Error::Config("nu must be at least 1".into()));
        }
        if self.intervals == Some(0) {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if let NodeFamily::List(v) = &self.nodes {
            if let Some(k) = self.k {
                if v.len() != k {
                    return Err(Error::Config(format!("{} abscissae given for k = {k}", v.len())));
                }
            }
        }
        if !(1..=40).contains(&self.precision) {
            return Err(Error::Config("precision must be in 1..=40".into()));
        }
        self.settings().validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn settings(&self) -> SolverSettings {
        let d = SolverSettings::default();
        SolverSettings {
            scheme: self.scheme.unwrap_or(d.scheme),
            rtol: self.rtol.unwrap_or(d.rtol),
            atol: self.atol.unwrap_or(d.atol),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            initial_guess: d.initial_guess,
        }
    }

    /// Canonical text form, one key per line in a fixed order.
    pub fn serialize(&self) -> String {
        let mut lines = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                lines.push(format!("{k} = {v}"));
            }
        };
        put("kind", self.kind.map(|k| k.as_str().to_string()));
        put("problem", self.problem.clone());
        put("k", self.k.map(|v| v.to_string()));
        put("s", self.s.map(|v| v.to_string()));
        put("nodes", Some(self.nodes.to_string()));
        put("nu", self.nu.map(|v| v.to_string()));
        put("K", self.intervals.map(|v| v.to_string()));
        put("h", self.h.map(|v| format!("{v:?}")));
        put("steps", self.steps.map(|v| v.to_string()));
        put("t0", self.t0.map(|v| format!("{v:?}")));
        put("T", self.t_end.map(|v| format!("{v:?}")));
        put("rtol", self.rtol.map(|v| format!("{v:?}")));
        put("atol", self.atol.map(|v| format!("{v:?}")));
        put("max-iter", self.max_iter.map(|v| v.to_string()));
        put(
            "scheme",
            self.scheme.map(|s| match s {
                IterationScheme::FixedPoint => "fixed-point".to_string(),
                IterationScheme::SimplifiedNewton => "newton".to_string(),
            }),
        );
        put("out", self.out.clone());
        put("precision", Some(self.precision.to_string()));
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }
}
