//! JSON and CSV file formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lemnis_core::capacity::DiscreteMeasure;
use lemnis_core::harmonic::{EnergyReport, HarmonicMeasureReport, ReflectionReport};
use lemnis_core::{ArcPartition, Lemniscate, RationalFunction, Source, C64};
use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

fn point(z: C64) -> Point {
    [z.re, z.im]
}

fn points(zs: &[C64]) -> Vec<Point> {
    zs.iter().copied().map(point).collect()
}

/// `{"poles":[[re,im],...],"residues":[[re,im],...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionJson {
    pub poles: Vec<Point>,
    pub residues: Vec<Point>,
}

impl From<&RationalFunction> for FunctionJson {
    fn from(r: &RationalFunction) -> Self {
        Self {
            poles: points(r.poles()),
            residues: points(r.residues()),
        }
    }
}

impl FunctionJson {
    pub fn to_function(&self) -> Result<RationalFunction> {
        let c = |v: &[Point]| v.iter().map(|p| C64::new(p[0], p[1])).collect();
        Ok(RationalFunction::new(c(&self.poles), c(&self.residues))?)
    }
}

/// Parse a rational function given inline as JSON or as a path to a JSON file.
pub fn parse_function(spec: &str) -> Result<RationalFunction> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_owned()
    } else {
        fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?
    };
    let json: FunctionJson = serde_json::from_str(&text).context("parsing rational function JSON")?;
    json.to_function()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentJson {
    pub outer: usize,
    pub holes: Vec<usize>,
    pub poles: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemniscateJson {
    pub level: f64,
    pub curves: Vec<Vec<Point>>,
    pub components: Vec<ComponentJson>,
}

impl From<&Lemniscate> for LemniscateJson {
    fn from(l: &Lemniscate) -> Self {
        Self {
            level: l.level,
            curves: l.curves.iter().map(|c| points(&c.points)).collect(),
            components: l
                .components
                .iter()
                .map(|c| ComponentJson {
                    outer: c.outer,
                    holes: c.holes.clone(),
                    poles: c.poles.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureJson {
    pub support: Vec<Point>,
    pub weights: Vec<f64>,
}

impl From<&DiscreteMeasure> for MeasureJson {
    fn from(m: &DiscreteMeasure) -> Self {
        Self {
            support: points(&m.support),
            weights: m.weights.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcJson {
    pub curve: usize,
    pub s0: f64,
    pub s1: f64,
    pub label: String,
}

fn arcs(p: &ArcPartition) -> Vec<ArcJson> {
    p.arcs
        .iter()
        .map(|a| ArcJson {
            curve: a.curve,
            s0: a.s0,
            s1: a.s1,
            label: a.label.clone(),
        })
        .collect()
}

/// `{"arcs":[...], "A":[...], "B":[...], "C":[...], "sigma":[...], "walks":N, "seed":S}`
/// where `sigma` is the combined standard error of `A - B` on each arc.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReflectionJson {
    pub arcs: Vec<ArcJson>,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    pub sigma: Vec<f64>,
    pub walks: usize,
    pub seed: u64,
}

impl From<&ReflectionReport> for ReflectionJson {
    fn from(r: &ReflectionReport) -> Self {
        Self {
            arcs: arcs(&r.partition),
            a: r.a.clone(),
            b: r.b.clone(),
            c: r.c.clone(),
            sigma: r.sigma_a.iter().zip(&r.sigma_b).map(|(x, y)| x.hypot(*y)).collect(),
            walks: r.walks,
            seed: r.seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicJson {
    /// `[re, im]`, or `null` for the point at infinity.
    pub source: Option<Point>,
    pub arcs: Vec<ArcJson>,
    pub estimates: Vec<f64>,
    pub sigma: Vec<f64>,
    pub walks: usize,
    pub failed: usize,
    pub seed: u64,
}

impl HarmonicJson {
    pub fn new(report: &HarmonicMeasureReport, partition: &ArcPartition) -> Self {
        Self {
            source: match report.source {
                Source::Point(z) => Some(point(z)),
                Source::Infinity => None,
            },
            arcs: arcs(partition),
            estimates: report.estimates(),
            sigma: report.std_errors(),
            walks: report.walks,
            failed: report.failed,
            seed: report.seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyTermJson {
    pub i: usize,
    pub j: usize,
    pub estimate: f64,
    pub predicted: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyJson {
    #[serde(rename = "self")]
    pub self_terms: Vec<EnergyTermJson>,
    pub cross: Vec<EnergyTermJson>,
    pub total: f64,
    pub total_predicted: f64,
    pub total_sigma: f64,
    pub walks: usize,
    pub seed: u64,
}

impl From<&EnergyReport> for EnergyJson {
    fn from(r: &EnergyReport) -> Self {
        let terms = |ts: &[lemnis_core::harmonic::EnergyTerm]| {
            ts.iter()
                .map(|t| EnergyTermJson {
                    i: t.i,
                    j: t.j,
                    estimate: t.estimate,
                    predicted: t.predicted,
                    sigma: t.std_error,
                })
                .collect()
        };
        Self {
            self_terms: terms(&r.self_terms),
            cross: terms(&r.cross_terms),
            total: r.total,
            total_predicted: r.total_predicted,
            total_sigma: r.total_std_error,
            walks: r.walks,
            seed: r.seed,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if rows.is_empty() {
        bail!("refusing to write an empty table to {}", path.display());
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_round_trip() {
        let text = r#"{"poles":[[2,0],[-2,0]],"residues":[[1,0],[1,0]]}"#;
        let r = parse_function(text).unwrap();
        assert_eq!(r.degree(), 2);
        let back = serde_json::to_string(&FunctionJson::from(&r)).unwrap();
        assert_eq!(
            back,
            r#"{"poles":[[2.0,0.0],[-2.0,0.0]],"residues":[[1.0,0.0],[1.0,0.0]]}"#
        );
    }

    #[test]
    fn rejects_bad_function() {
        assert!(parse_function(r#"{"poles":[[0,0]],"residues":[]}"#).is_err());
        assert!(parse_function(r#"{"poles":[[0,0]],"residues":[[1,0]],"x":1}"#).is_err());
    }
}
