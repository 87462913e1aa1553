//! The sweep `F(t) = t^{1/m} cap(K_t)` over levels `t` in `(0, 1)`, where `m`
//! is the order of the zero of `R` at infinity.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these whenever std is linked
use num_traits::Float;

use crate::capacity::{cap_panel, CapacityEstimate};
use crate::error::{Error, Result};
use crate::geometry::Polyline;
use crate::lemniscate::{trace, TraceOptions};
use crate::ratfunc::RationalFunction;

/// Default plateau tolerance on `|F(t) - |c_m|^{1/m}|`.
pub const PLATEAU_TOLERANCE: f64 = 1e-2;
/// Relative exclusion window around critical moduli.
pub const CRITICAL_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub levels: Vec<f64>,
    pub caps: Vec<CapacityEstimate>,
    pub f: Vec<f64>,
    pub m: usize,
    pub c_m_modulus: f64,
    /// Largest tested level still on the plateau.
    pub plateau_end: Option<f64>,
    /// Per level: some finite zero lies in the unbounded component of `{|R| < t}`.
    pub zero_in_unbounded: Vec<bool>,
    /// Levels that could not be traced, with the reason.
    pub skipped: Vec<(f64, String)>,
    /// Outer boundary curves of `K_t` per level.
    pub outlines: Vec<Vec<Polyline>>,
}

impl SweepResult {
    /// `|c_m|^{1/m}`.
    pub fn plateau_value(&self) -> f64 {
        self.c_m_modulus.powf(1.0 / self.m as f64)
    }

    pub fn on_plateau(&self, k: usize) -> bool {
        (self.f[k] - self.plateau_value()).abs() < PLATEAU_TOLERANCE
    }

    /// Indices `k` with `F(t_{k+1}) < F(t_k) - max(1e-3, 3 err)`.
    pub fn monotonicity_violations(&self) -> Vec<usize> {
        (0..self.f.len().saturating_sub(1))
            .filter(|&k| {
                let t = self.levels[k + 1].powf(1.0 / self.m as f64);
                let err = t * self.caps[k + 1].error_indicator.max(self.caps[k].error_indicator);
                self.f[k + 1] < self.f[k] - 1e-3f64.max(3.0 * err)
            })
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violations().is_empty()
    }
}

/// `n` log-spaced levels in `[tmin, tmax]`, each moved off any critical
/// modulus by more than [`CRITICAL_MARGIN`].
pub fn default_levels(r: &RationalFunction, n: usize, tmin: f64, tmax: f64) -> Result<Vec<f64>> {
    if !(tmin > 0.0 && tmax > tmin && tmax < 1.0) || n < 2 {
        return Err(Error::DegenerateInput(
            "need 0 < tmin < tmax < 1 and at least two levels".into(),
        ));
    }
    let moduli: Vec<f64> = r.critical_data()?.moduli().collect();
    let mut levels: Vec<f64> = (0..n)
        .map(|k| tmin * (tmax / tmin).powf(k as f64 / (n - 1) as f64))
        .collect();
    for t in levels.iter_mut() {
        for _ in 0..4 {
            let Some(&m) = moduli.iter().find(|&&m| (*t - m).abs() <= CRITICAL_MARGIN * m) else {
                break;
            };
            let below = m * (1.0 - 2.0 * CRITICAL_MARGIN);
            let above = m * (1.0 + 2.0 * CRITICAL_MARGIN);
            *t = if below >= tmin { below } else { above };
        }
    }
    levels.dedup();
    Ok(levels)
}

/// Evaluate `F` on each level.
pub fn sweep_f(r: &RationalFunction, levels: &[f64], panels: usize, opts: &TraceOptions) -> Result<SweepResult> {
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateInput("levels must be strictly increasing".into()));
    }
    let (m, c_m) = r.leading_coefficient_at_infinity()?;
    let zeros = r.zeros()?.finite;
    let mut out = SweepResult {
        levels: Vec::new(),
        caps: Vec::new(),
        f: Vec::new(),
        m,
        c_m_modulus: c_m.norm(),
        plateau_end: None,
        zero_in_unbounded: Vec::new(),
        skipped: Vec::new(),
        outlines: Vec::new(),
    };
    for &t in levels {
        let lem = match trace(r, t, opts) {
            Ok(l) => l,
            Err(e @ Error::LevelNearCriticalValue { .. }) => {
                out.skipped.push((t, alloc::format!("{e}")));
                continue;
            }
            Err(e) => return Err(e),
        };
        let outer = lem.outer_boundary();
        let (cap, _) = cap_panel(&outer, panels.max(128 * outer.len()))?;
        out.levels.push(t);
        out.f.push(t.powf(1.0 / m as f64) * cap.value);
        out.caps.push(cap);
        out.zero_in_unbounded
            .push(zeros.iter().any(|&z| lem.enclosing_count(z) == 0));
        out.outlines.push(outer);
    }
    out.plateau_end = (0..out.f.len())
        .filter(|&k| out.on_plateau(k))
        .map(|k| out.levels[k])
        .fold(None, |a: Option<f64>, t| Some(a.map_or(t, |b| b.max(t))));
    Ok(out)
}
