//! Run configuration: built-in defaults, then an optional TOML file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lemnis_core::{RationalFunction, Rect, TraceOptions, Window, C64};
use serde::Deserialize;

use crate::formats::{parse_function, FunctionJson};

pub const DEFAULT_SEED: u64 = lemnis_core::rng::DEFAULT_SEED;

/// The rational function in a config file: a table, or a string holding
/// inline JSON or a path.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Table(FunctionJson),
    Text(String),
}

impl FunctionSpec {
    fn resolve(&self, base: &Path) -> Result<RationalFunction> {
        match self {
            FunctionSpec::Table(t) => t.to_function(),
            FunctionSpec::Text(s) if s.trim_start().starts_with('{') => parse_function(s),
            FunctionSpec::Text(s) => parse_function(&base.join(s).to_string_lossy()),
        }
    }
}

/// Every knob, all optional. Used for both the TOML file and the flags.
#[derive(Debug, Clone, Default, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Knobs {
    /// Rational function: inline JSON `{"poles":[[re,im],..],"residues":[[re,im],..]}` or a file path.
    #[arg(long = "r", global = true, value_name = "JSON|PATH")]
    #[serde(skip)]
    pub r_flag: Option<String>,
    #[arg(skip)]
    pub r: Option<FunctionSpec>,
    /// Base seed (decimal or 0x-prefixed hex).
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Level t of the lemniscate {|R| >= t}.
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Fixed tracing window x0,x1,y0,y1 (default: automatic per-pole windows).
    #[arg(long, global = true, value_parser = parse_window)]
    pub window: Option<[f64; 4]>,
    /// Grid cells per window side.
    #[arg(long, global = true)]
    pub cells: Option<usize>,
    /// Capacity panels per curve.
    #[arg(long, global = true)]
    pub panels: Option<usize>,
    /// Leja points for the capacity cross-check.
    #[arg(long, global = true)]
    pub leja: Option<usize>,
    /// Walks per harmonic-measure source.
    #[arg(long, global = true)]
    pub walks: Option<usize>,
    /// Total number of boundary arcs, split evenly over the curves.
    #[arg(long, global = true)]
    pub arcs: Option<usize>,
    /// Number of levels in a sweep.
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    #[arg(long, global = true)]
    pub tmin: Option<f64>,
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    /// Residue of the counterexample family.
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Exponent of the counterexample family.
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Comma-separated pole positions of the counterexample family.
    #[arg(long, global = true, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    /// Comma-separated residues of the added pole in the epsilon sweep.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Position x,y of the added pole in the epsilon sweep.
    #[arg(long, global = true, value_parser = parse_point)]
    pub at: Option<[f64; 2]>,
    /// Relative margin above 1 where the injectivity-radius search starts.
    #[arg(long, global = true)]
    pub margin: Option<f64>,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| e.to_string())
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| format!("expected {N} comma-separated numbers"))
}

fn parse_window(s: &str) -> Result<[f64; 4], String> {
    parse_floats(s)
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    parse_floats(s)
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub r: Option<RationalFunction>,
    pub seed: u64,
    pub out: PathBuf,
    pub t: f64,
    pub window: Option<[f64; 4]>,
    pub cells: usize,
    pub panels: usize,
    pub leja: usize,
    pub walks: usize,
    pub arcs: usize,
    pub levels: usize,
    pub tmin: f64,
    pub tmax: f64,
    pub a: f64,
    pub eta: f64,
    pub p: Vec<f64>,
    pub eps: Vec<f64>,
    pub at: Option<C64>,
    pub margin: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            r: None,
            seed: DEFAULT_SEED,
            out: PathBuf::from("lemnis-out"),
            t: 1.0,
            window: None,
            cells: 256,
            panels: 256,
            leja: 128,
            walks: 100_000,
            arcs: 8,
            levels: 24,
            tmin: 1e-3,
            tmax: 0.98,
            a: 1.0,
            eta: 0.75,
            p: vec![1e2, 1e3, 1e4],
            eps: vec![1e-1, 1e-2, 1e-3],
            at: None,
            margin: 1e-3,
        }
    }
}

impl RunConfig {
    /// Defaults, overridden by `file` (if any), overridden by `flags`.
    pub fn resolve(file: Option<&Path>, flags: &Knobs) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let knobs: Knobs = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let base = path.parent().unwrap_or(Path::new("."));
            if let Some(spec) = &knobs.r {
                cfg.r = Some(spec.resolve(base)?);
            }
            cfg.apply(&knobs);
        }
        if let Some(s) = &flags.r_flag {
            cfg.r = Some(parse_function(s)?);
        }
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, k: &Knobs) {
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = &k.$f { self.$f = v.clone(); })*};
        }
        take!(seed, out, t, cells, panels, leja, walks, arcs, levels, tmin, tmax, a, eta, p, eps, margin);
        if k.window.is_some() {
            self.window = k.window;
        }
        if let Some([x, y]) = k.at {
            self.at = Some(C64::new(x, y));
        }
    }

    fn validate(&self) -> Result<()> {
        let counts = [
            ("cells", self.cells),
            ("panels", self.panels),
            ("leja", self.leja),
            ("walks", self.walks),
            ("arcs", self.arcs),
            ("levels", self.levels),
        ];
        for (name, v) in counts {
            if v == 0 {
                bail!("{name} must be positive");
            }
        }
        let reals = [
            ("t", self.t),
            ("tmin", self.tmin),
            ("tmax", self.tmax),
            ("a", self.a),
            ("eta", self.eta),
            ("margin", self.margin),
        ];
        for (name, v) in reals {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive and finite");
            }
        }
        if self.p.iter().chain(&self.eps).any(|v| !(*v > 0.0 && v.is_finite())) {
            bail!("p and eps values must be positive and finite");
        }
        if let Some([x0, x1, y0, y1]) = self.window {
            if !(x1 > x0 && y1 > y0) {
                bail!("window must satisfy x0 < x1 and y0 < y1");
            }
        }
        Ok(())
    }

    pub fn function(&self) -> Result<&RationalFunction> {
        self.r
            .as_ref()
            .context("this command needs a rational function (--r or `r` in the config file)")
    }

    pub fn trace_options(&self) -> TraceOptions {
        TraceOptions {
            window: match self.window {
                Some([x0, x1, y0, y1]) => Window::Fixed(Rect::new(x0, x1, y0, y1)),
                None => Window::Auto,
            },
            cells: self.cells,
            ..TraceOptions::default()
        }
    }

    pub fn bounds_options(&self) -> lemnis_core::BoundsOptions {
        lemnis_core::BoundsOptions {
            trace: self.trace_options(),
            panels: self.panels,
            leja_points: self.leja,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse_in_hex_and_decimal() {
        assert_eq!(parse_seed("0xC0FFEE"), Ok(0xC0FFEE));
        assert_eq!(parse_seed("12"), Ok(12));
        assert!(parse_seed("zz").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "walks = 500\ncells = 64\n[r]\npoles = [[0.0, 0.0]]\nresidues = [[3.0, 0.0]]\n",
        )
        .unwrap();
        let flags = Knobs {
            cells: Some(128),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(&path), &flags).unwrap();
        assert_eq!(cfg.walks, 500);
        assert_eq!(cfg.cells, 128);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.function().unwrap().residues()[0], C64::new(3.0, 0.0));
    }

    #[test]
    fn rejects_nonpositive_knobs() {
        let flags = Knobs {
            walks: Some(0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, &flags).is_err());
        let flags = Knobs {
            t: Some(-1.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, &flags).is_err());
    }
}
