//! Experiment configuration: presets, INI files and command-line flags all
//! reduce to the same flat set of `key = value` pairs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use mrc::geometry::{Shape, SourceSampling};
use mrc::laplace::StaticData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Multipoint,
    Random,
    Optimal,
    Periodic,
    Static,
    Minimize,
    IllposedDemo,
}

impl Solver {
    pub const ALL: [Solver; 7] = [
        Solver::Multipoint,
        Solver::Random,
        Solver::Optimal,
        Solver::Periodic,
        Solver::Static,
        Solver::Minimize,
        Solver::IllposedDemo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Solver::Multipoint => "multipoint",
            Solver::Random => "random",
            Solver::Optimal => "optimal",
            Solver::Periodic => "periodic",
            Solver::Static => "static",
            Solver::Minimize => "minimize",
            Solver::IllposedDemo => "illposed-demo",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Solver::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| anyhow!("unknown solver '{s}'"))
    }
}

/// Recognised configuration keys with a one-line description each.
pub const KEYS: &[(&str, &str)] = &[
    ("solver", "multipoint | random | optimal | periodic | static | minimize | illposed-demo"),
    ("shape", "obstacle or profile id, e.g. ellipse:2,1 kite triangle circle:1 sphere:1 cube:1 ellipsoid:4,1,1 profile:I"),
    ("k", "wave number"),
    ("alpha-deg", "2D incidence angle in degrees (grating: angle theta below the horizontal)"),
    ("alpha-polar", "3D incidence direction as 'azimuth,polar' in degrees"),
    ("L", "multipole order (static: starting degree)"),
    ("J", "sources per round (multipoint: total sources)"),
    ("eps", "target residual"),
    ("wmin", "singular value cutoff"),
    ("nodes", "boundary nodes M (grating: N)"),
    ("nmax", "maximum number of rounds"),
    ("seed", "random seed"),
    ("repeat", "number of seeded repetitions"),
    ("margin", "relative interior margin for random sources"),
    ("sampling", "uniform | radial placement of random sources"),
    ("scale", "multipoint sources at scale * r(t)"),
    ("warm", "random solver: first round uses this many multipoint sources at scale * r(t) (0 = off)"),
    ("poles", "grating poles M"),
    ("b", "grating floor depth"),
    ("jmax", "grating series truncation"),
    ("retry", "grating: double N and M once on failure (true/false)"),
    ("data", "static data: constant[:v] | spherical-harmonic:l,m | point-charge:x,y,z"),
    ("x1", "ill-posedness demo expansion centre 'x,y'"),
    ("dirs", "ill-posedness demo far-field directions"),
    ("fn", "SIM test function 1 | 2 | 3"),
    ("dim", "SIM dimension"),
    ("out", "CSV output path"),
];

fn canonical_key(key: &str) -> Result<&'static str> {
    let key = key.trim().trim_start_matches("--");
    let key = match key {
        "l" | "l-max" => "L",
        "j" => "J",
        "w-min" | "w_min" => "wmin",
        "n-max" | "n_max" => "nmax",
        "alpha_deg" => "alpha-deg",
        "alpha_polar" => "alpha-polar",
        "j-max" | "j_max" => "jmax",
        other => other,
    };
    KEYS.iter()
        .map(|(k, _)| *k)
        .find(|k| *k == key)
        .ok_or_else(|| anyhow!("unknown configuration key '{key}'"))
}

/// Ordered `key = value` settings; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<&'static str, String>,
}

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        self.values.insert(canonical_key(key)?, value.into().trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k, v.clone());
        }
    }

    /// Whitespace-separated `key=value` tokens.
    pub fn parse_pairs(spec: &str) -> Result<Self> {
        let mut s = Settings::default();
        for tok in spec.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| anyhow!("expected key=value, got '{tok}'"))?;
            s.set(k, v)?;
        }
        Ok(s)
    }

    /// INI file with optional section headers; keys are the flag names.
    pub fn from_ini_str(text: &str) -> Result<Self> {
        let ini = ini::Ini::load_from_str(text).map_err(|e| anyhow!("malformed config: {e}"))?;
        let mut s = Settings::default();
        for (_, props) in ini.iter() {
            for (k, v) in props.iter() {
                if s.values.contains_key(canonical_key(k)?) {
                    bail!("key '{k}' appears twice in the config");
                }
                s.set(k, v)?;
            }
        }
        Ok(s)
    }

    pub fn from_ini_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_ini_str(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_ini(&self) -> String {
        let mut out = String::from("[experiment]\n");
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("invalid {key} '{v}': {e}")))
            .transpose()
    }

    fn parse_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                _ => Err(anyhow!("invalid {key} '{v}': expected true or false")),
            })
            .transpose()
    }

    fn parse_floats(&self, key: &str, n: usize) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.get(key) else { return Ok(None) };
        let vals = v
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| anyhow!("invalid {key} '{v}'")))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != n || vals.iter().any(|x| !x.is_finite()) {
            bail!("{key} expects {n} comma-separated numbers, got '{v}'");
        }
        Ok(Some(vals))
    }
}

/// Typed view of a [`Settings`] layer; unset fields take the solver's
/// defaults at run time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    pub solver: Solver,
    pub shape: Option<Shape>,
    pub k: Option<f64>,
    pub alpha_deg: Option<f64>,
    pub alpha_polar: Option<[f64; 2]>,
    pub l: Option<usize>,
    pub j: Option<usize>,
    pub eps: Option<f64>,
    pub w_min: Option<f64>,
    pub nodes: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: u64,
    pub repeat: usize,
    pub margin: Option<f64>,
    pub sampling: Option<SourceSampling>,
    pub scale: Option<f64>,
    pub warm: usize,
    pub poles: Option<usize>,
    pub b: Option<f64>,
    pub j_max: Option<usize>,
    pub retry: bool,
    pub data: Option<StaticData>,
    pub x1: Option<[f64; 2]>,
    pub dirs: Option<usize>,
    pub func: Option<u32>,
    pub dim: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_settings(name: Option<String>, s: &Settings) -> Result<Self> {
        let solver: Solver = s.parse("solver")?.ok_or_else(|| anyhow!("no solver given"))?;
        let shape = s
            .get("shape")
            .map(|v| v.parse::<Shape>().map_err(|e| anyhow!("{e}")))
            .transpose()?;
        let cfg = Self {
            name,
            solver,
            shape,
            k: s.parse("k")?,
            alpha_deg: s.parse("alpha-deg")?,
            alpha_polar: s.parse_floats("alpha-polar", 2)?.map(|v| [v[0], v[1]]),
            l: s.parse("L")?,
            j: s.parse("J")?,
            eps: s.parse("eps")?,
            w_min: s.parse("wmin")?,
            nodes: s.parse("nodes")?,
            n_max: s.parse("nmax")?,
            seed: s.parse("seed")?.unwrap_or(0),
            repeat: s.parse("repeat")?.unwrap_or(1),
            margin: s.parse("margin")?,
            sampling: s
                .get("sampling")
                .map(|v| v.parse::<SourceSampling>().map_err(|e| anyhow!("{e}")))
                .transpose()?,
            scale: s.parse("scale")?,
            warm: s.parse("warm")?.unwrap_or(0),
            poles: s.parse("poles")?,
            b: s.parse("b")?,
            j_max: s.parse("jmax")?,
            retry: s.parse_bool("retry")?.unwrap_or(false),
            data: s
                .get("data")
                .map(|v| v.parse::<StaticData>().map_err(|e| anyhow!("{e}")))
                .transpose()?,
            x1: s.parse_floats("x1", 2)?.map(|v| [v[0], v[1]]),
            dirs: s.parse("dirs")?,
            func: s.parse("fn")?,
            dim: s.parse("dim")?,
            out: s.get("out").map(PathBuf::from),
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.repeat == 0 {
            bail!("repeat must be at least 1");
        }
        for (key, v) in [("k", self.k), ("eps", self.eps), ("wmin", self.w_min), ("b", self.b)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    bail!("{key} must be positive, got {v}");
                }
            }
        }
        if let Some(m) = self.margin {
            if !(0.0..1.0).contains(&m) {
                bail!("margin must lie in [0, 1), got {m}");
            }
        }
        if let Some(s) = self.scale {
            if !(s > 0.0 && s < 1.0) {
                bail!("scale must lie in (0, 1), got {s}");
            }
        }
        match (self.solver, self.shape) {
            (Solver::Multipoint | Solver::Random | Solver::Optimal, Some(Shape::Profile(_))) => {
                bail!("solver {} needs a bounded obstacle, not a grating profile", self.solver)
            }
            (Solver::Multipoint | Solver::Random | Solver::Optimal, None) => {
                bail!("solver {} needs a shape", self.solver)
            }
            (Solver::Periodic, Some(s)) if !matches!(s, Shape::Profile(_)) => {
                bail!("the periodic solver needs shape profile:I..IV, got {s}")
            }
            (Solver::Static, Some(s)) if !matches!(s, Shape::Solid(_)) => {
                bail!("the static solver needs a 3D shape, got {s}")
            }
            (Solver::Static, None) => bail!("the static solver needs a shape"),
            _ => {}
        }
        if let Some(f) = self.func {
            if !(1..=3).contains(&f) {
                bail!("test function must be 1, 2 or 3, got {f}");
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.solver.to_string())
    }
}
