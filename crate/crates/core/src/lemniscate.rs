//! Level sets `{|R| = t}` and the compact sets `K_t = {|R| >= t}`.
//!
//! Tracing runs marching squares on `log|R| - log t`. With an automatic
//! window every pole and every finite zero gets its own square window sized
//! by marching rays outwards from it; the curve kept from a pole window is
//! the innermost closed curve around the pole (an outer boundary of `K_t`),
//! and from a zero window the innermost closed curve around the zero (a
//! hole). The result is checked against the Riemann–Hurwitz count
//! `#components - #holes = d - #{c : |R(c)| > t}` and refined on mismatch.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these whenever std is linked
use num_traits::Float;

use crate::contour::{refine, Field, Grid};
use crate::error::{Error, Result};
use crate::geometry::{Polyline, Rect};
use crate::poly::cluster_roots;
use crate::ratfunc::{CriticalData, RationalFunction, CLUSTER_TOLERANCE};
use crate::C64;

/// Relative distance to a critical modulus below which a level is refused.
pub const CRITICAL_LEVEL_GUARD: f64 = 1e-6;

/// Tracing window.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Window {
    /// One window per pole and per finite zero, sized automatically.
    #[default]
    Auto,
    /// A single fixed rectangle; `K_t` must not touch its border.
    Fixed(Rect),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub window: Window,
    /// Cells per side of each window.
    pub cells: usize,
    /// Required `||R(v)| - t| / t` at every vertex.
    pub tolerance: f64,
    /// Midpoint level error (in `log|R|`) that triggers subdivision.
    pub refine_tolerance: f64,
    pub max_depth: u32,
    /// Number of times the grid may be doubled when the topology check fails.
    pub max_refinements: u32,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            window: Window::Auto,
            cells: 256,
            tolerance: 1e-4,
            refine_tolerance: 1e-6,
            max_depth: 10,
            max_refinements: 3,
        }
    }
}

/// A connected component of `K_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Index of the outer boundary curve.
    pub outer: usize,
    /// Curves bounding holes of this component.
    pub holes: Vec<usize>,
    /// Poles inside the component.
    pub poles: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemniscate {
    pub level: f64,
    /// Closed curves; outer boundaries counter-clockwise, holes clockwise.
    pub curves: Vec<Polyline>,
    /// Smallest curve enclosing each curve.
    pub parent: Vec<Option<usize>>,
    /// Nesting depth: even for outer boundaries, odd for holes.
    pub depth: Vec<usize>,
    pub components: Vec<Component>,
    /// Component of each curve.
    pub curve_component: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodnessReport {
    pub is_good: bool,
    pub component_count: usize,
    /// Critical points with `|R(c)| >= t`.
    pub offending_critical_points: Vec<(C64, f64)>,
    pub one_pole_each: bool,
}

struct LogLevel<'a> {
    r: &'a RationalFunction,
    log_t: f64,
}

impl Field for LogLevel<'_> {
    fn value(&self, z: C64) -> f64 {
        self.r.eval_unchecked(z).norm().ln() - self.log_t
    }

    fn value_grad(&self, z: C64) -> (f64, C64) {
        let (f, g) = self.r.log_modulus_gradient(z);
        (f - self.log_t, g)
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Kind {
    Outer,
    Hole,
}

struct Candidate {
    curve: Polyline,
    kind: Option<Kind>,
    cell: f64,
}

pub fn trace(r: &RationalFunction, t: f64, opts: &TraceOptions) -> Result<Lemniscate> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::DegenerateInput(format!("level must be positive, got {t}")));
    }
    if opts.cells < 4 {
        return Err(Error::DegenerateInput("at least 4 cells per window".into()));
    }
    let crit = r.critical_data()?;
    for m in crit.moduli() {
        if (m - t).abs() <= CRITICAL_LEVEL_GUARD * t {
            return Err(Error::LevelNearCriticalValue {
                level: t,
                critical_modulus: m,
            });
        }
    }
    let expected_euler = r.degree() as i64 - crit.moduli().filter(|&m| m > t).count() as i64;
    let field = LogLevel { r, log_t: t.ln() };

    let mut cells = opts.cells;
    let mut last = String::new();
    for _ in 0..=opts.max_refinements {
        let candidates = match opts.window {
            Window::Auto => auto_candidates(r, t, &field, cells, opts)?,
            Window::Fixed(rect) => fixed_candidates(&field, rect, cells, opts)?,
        };
        let lem = assemble(r, t, candidates);
        match validate(&lem.0, &lem.1, expected_euler, r) {
            Ok(()) => {
                check_level(r, &lem.0, opts.tolerance)?;
                return Ok(lem.0);
            }
            Err(msg) => last = msg,
        }
        cells *= 2;
    }
    Err(Error::TopologyUnresolved(last))
}

fn check_level(r: &RationalFunction, lem: &Lemniscate, tol: f64) -> Result<()> {
    let t = lem.level;
    let worst = lem
        .curves
        .iter()
        .flat_map(|c| c.points.iter())
        .map(|&v| (r.eval_unchecked(v).norm() - t).abs() / t)
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::TopologyUnresolved(format!(
            "vertex level error {worst:e} exceeds {tol:e}"
        )));
    }
    Ok(())
}

fn fixed_candidates(field: &LogLevel, rect: Rect, cells: usize, opts: &TraceOptions) -> Result<Vec<Candidate>> {
    let aspect = rect.height() / rect.width();
    let ny = ((cells as f64 * aspect).round() as usize).max(4);
    let grid = Grid::sample(field, rect, cells, ny);
    if grid.touches_border() {
        return Err(Error::WindowTooSmall);
    }
    let cell = grid.cell_size();
    Ok(grid
        .chains()
        .into_iter()
        .filter(|c| c.closed && c.points.len() >= 3)
        .map(|c| Candidate {
            curve: refine(field, &c.points, opts.refine_tolerance, opts.max_depth),
            kind: None,
            cell,
        })
        .collect())
}

/// Radius beyond which `|R| < t` is guaranteed when measured from `center`.
fn escape_radius(r: &RationalFunction, t: f64, center: C64) -> f64 {
    let spread = r.poles().iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
    spread + r.residue_mass() / t
}

const RAYS: usize = 32;

/// Largest first-crossing distance over a fan of rays from `seed`, or `None`
/// if some ray reaches `r_max` without crossing.
fn ray_extent(field: &LogLevel, seed: C64, start: f64, factor: f64, r_max: f64, inside: bool) -> Option<f64> {
    let mut extent: f64 = 0.0;
    let mut escaped = false;
    for k in 0..RAYS {
        let dir = C64::from_polar(1.0, 2.0 * core::f64::consts::PI * (k as f64 + 0.5) / RAYS as f64);
        let mut rho = start;
        loop {
            let v = field.value(seed + dir * rho);
            let is_in = !(v < 0.0);
            if is_in != inside {
                extent = extent.max(rho);
                break;
            }
            if rho > r_max {
                escaped = true;
                break;
            }
            rho *= factor;
        }
    }
    (!escaped).then_some(extent)
}

fn auto_candidates(
    r: &RationalFunction,
    t: f64,
    field: &LogLevel,
    cells: usize,
    opts: &TraceOptions,
) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for (i, &p) in r.poles().iter().enumerate() {
        let r_max = escape_radius(r, t, p);
        let start = 1e-6 * r.residues()[i].norm() / t;
        let extent = ray_extent(field, p, start, 1.25, r_max, true).unwrap_or(r_max);
        let Some((curve, cell)) = seed_curve(field, p, extent, r_max, cells, opts) else {
            return Err(Error::TopologyUnresolved(format!(
                "no closed level curve around pole {i}"
            )));
        };
        out.push(Candidate {
            curve,
            kind: Some(Kind::Outer),
            cell,
        });
    }
    let zeros = r.zeros()?;
    for (zeta, _) in cluster_roots(&zeros.finite, CLUSTER_TOLERANCE) {
        let r_max = escape_radius(r, t, zeta);
        let start = 1e-9 * (1.0 + zeta.norm());
        let Some(extent) = ray_extent(field, zeta, start, 1.05, r_max, false) else {
            continue;
        };
        if let Some((curve, cell)) = seed_curve(field, zeta, extent, r_max, cells, opts) {
            out.push(Candidate {
                curve,
                kind: Some(Kind::Hole),
                cell,
            });
        }
    }
    Ok(out)
}

/// Innermost closed curve around `seed`, growing the window until one is
/// found or the window covers every point of `K_t`.
fn seed_curve(
    field: &LogLevel,
    seed: C64,
    extent: f64,
    r_max: f64,
    cells: usize,
    opts: &TraceOptions,
) -> Option<(Polyline, f64)> {
    let mut half = (2.0 * extent).min(1.05 * r_max).max(1e-300);
    loop {
        let grid = Grid::sample(field, Rect::centered(seed, half), cells, cells);
        let best = grid
            .chains()
            .into_iter()
            .filter(|c| c.closed && c.points.len() >= 3)
            .filter_map(|c| {
                let poly = Polyline::new(c.points);
                poly.contains(seed).then(|| (poly.signed_area().abs(), poly))
            })
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if let Some((_, poly)) = best {
            let curve = refine(field, &poly.points, opts.refine_tolerance, opts.max_depth);
            return Some((curve, grid.cell_size()));
        }
        if half >= r_max {
            return None;
        }
        half = (2.0 * half).min(1.05 * r_max);
    }
}

fn same_curve(a: &Polyline, b: &Polyline) -> bool {
    let (Some(ba), Some(bb)) = (a.bbox(), b.bbox()) else {
        return false;
    };
    let tol = 1e-2 * ba.diameter().max(bb.diameter());
    let area_a = a.signed_area().abs();
    let area_b = b.signed_area().abs();
    (ba.x0 - bb.x0).abs() <= tol
        && (ba.x1 - bb.x1).abs() <= tol
        && (ba.y0 - bb.y0).abs() <= tol
        && (ba.y1 - bb.y1).abs() <= tol
        && (area_a - area_b).abs() <= 1e-2 * area_a.max(area_b)
}

fn assemble(r: &RationalFunction, t: f64, candidates: Vec<Candidate>) -> (Lemniscate, Vec<Option<Kind>>) {
    let mut kept: Vec<Candidate> = Vec::new();
    for c in candidates {
        if let Some(k) = kept.iter().position(|o| same_curve(&o.curve, &c.curve)) {
            if kept[k].kind.is_some() && c.kind.is_some() && kept[k].kind != c.kind {
                // Conflicting roles; keep both so validation rejects the trace.
                kept.push(c);
            } else if c.cell < kept[k].cell {
                kept[k] = c;
            }
        } else {
            kept.push(c);
        }
    }
    let kinds: Vec<Option<Kind>> = kept.iter().map(|c| c.kind).collect();
    let curves: Vec<Polyline> = kept.into_iter().map(|c| c.curve).collect();
    (build(r, t, curves), kinds)
}

/// Containment tree, orientation, components and pole assignment.
fn build(r: &RationalFunction, t: f64, mut curves: Vec<Polyline>) -> Lemniscate {
    let n = curves.len();
    let areas: Vec<f64> = curves.iter().map(|c| c.signed_area().abs()).collect();
    let mut parent = alloc::vec![None; n];
    for i in 0..n {
        let probe = curves[i].points[0];
        let mut best: Option<usize> = None;
        for j in 0..n {
            if j != i && areas[j] > areas[i] && curves[j].contains(probe) && best.is_none_or(|b| areas[j] < areas[b]) {
                best = Some(j);
            }
        }
        parent[i] = best;
    }
    let depth: Vec<usize> = (0..n)
        .map(|i| {
            let mut d = 0;
            let mut cur = parent[i];
            while let Some(p) = cur {
                d += 1;
                cur = parent[p];
                if d > n {
                    break;
                }
            }
            d
        })
        .collect();
    for (c, &d) in curves.iter_mut().zip(&depth) {
        let ccw = c.signed_area() > 0.0;
        if ccw != (d % 2 == 0) {
            c.reverse();
        }
    }
    let mut components = Vec::new();
    let mut curve_component = alloc::vec![None; n];
    for i in 0..n {
        if depth[i].is_multiple_of(2) {
            curve_component[i] = Some(components.len());
            components.push(Component {
                outer: i,
                holes: Vec::new(),
                poles: Vec::new(),
            });
        }
    }
    for i in 0..n {
        if depth[i] % 2 == 1 {
            if let Some(p) = parent[i] {
                let c = curve_component[p].unwrap();
                curve_component[i] = Some(c);
                components[c].holes.push(i);
            }
        }
    }
    let mut lem = Lemniscate {
        level: t,
        curves,
        parent,
        depth,
        components,
        curve_component,
    };
    for (i, &p) in r.poles().iter().enumerate() {
        if let Some(c) = lem
            .deepest_enclosing(p)
            .and_then(|k| lem.depth[k].is_multiple_of(2).then(|| lem.curve_component[k]).flatten())
        {
            lem.components[c].poles.push(i);
        }
    }
    lem
}

fn validate(
    lem: &Lemniscate,
    kinds: &[Option<Kind>],
    expected_euler: i64,
    r: &RationalFunction,
) -> core::result::Result<(), String> {
    let holes = lem.depth.iter().filter(|&&d| d % 2 == 1).count() as i64;
    let euler = lem.components.len() as i64 - holes;
    if euler != expected_euler {
        return Err(format!(
            "{} components and {} holes, expected Euler characteristic {}",
            lem.components.len(),
            holes,
            expected_euler
        ));
    }
    for (k, kind) in kinds.iter().enumerate() {
        let even = lem.depth[k].is_multiple_of(2);
        match kind {
            Some(Kind::Outer) if !even => return Err("pole curve nested as a hole".into()),
            Some(Kind::Hole) if even => return Err("zero curve nested as an outer boundary".into()),
            _ => {}
        }
    }
    if lem.components.iter().any(|c| c.poles.is_empty()) {
        return Err("a component contains no pole".into());
    }
    let assigned: usize = lem.components.iter().map(|c| c.poles.len()).sum();
    if assigned != r.degree() {
        return Err("some pole lies outside every component".into());
    }
    Ok(())
}

impl Lemniscate {
    /// Diameter of the bounding box of all curves.
    pub fn scale(&self) -> f64 {
        self.curves
            .iter()
            .filter_map(|c| c.bbox())
            .reduce(|a, b| a.union(&b))
            .map_or(0.0, |b| b.diameter())
    }

    fn deepest_enclosing(&self, z: C64) -> Option<usize> {
        (0..self.curves.len())
            .filter(|&k| self.curves[k].contains(z))
            .max_by_key(|&k| self.depth[k])
    }

    /// Number of curves enclosing `z`.
    pub fn enclosing_count(&self, z: C64) -> usize {
        self.curves.iter().filter(|c| c.contains(z)).count()
    }

    /// Component of `K_t` containing `z`, or `None` if `|R(z)| < t`.
    pub fn contains_point(&self, z: C64) -> Result<Option<usize>> {
        let tol = 1e-9 * self.scale();
        let dist = self.curves.iter().map(|c| c.distance(z)).fold(f64::INFINITY, f64::min);
        if dist < tol {
            return Err(Error::OnBoundary { distance: dist });
        }
        Ok(self
            .deepest_enclosing(z)
            .filter(|&k| self.depth[k].is_multiple_of(2))
            .and_then(|k| self.curve_component[k]))
    }

    /// True iff `samples` equally spaced points of `[z0, z1]` all lie in one
    /// component.
    pub fn contains_segment(&self, z0: C64, z1: C64, samples: usize) -> Result<bool> {
        let samples = samples.max(2);
        let mut first = None;
        for k in 0..samples {
            let z = z0 + (z1 - z0) * (k as f64 / (samples - 1) as f64);
            match self.contains_point(z)? {
                None => return Ok(false),
                Some(c) => match first {
                    None => first = Some(c),
                    Some(f) if f != c => return Ok(false),
                    _ => {}
                },
            }
        }
        Ok(true)
    }

    /// Component containing pole `i`.
    pub fn component_of_pole(&self, i: usize) -> Option<usize> {
        self.components.iter().position(|c| c.poles.contains(&i))
    }

    /// Outer boundary and holes of component `c`.
    pub fn component_curves(&self, c: usize) -> Vec<Polyline> {
        let comp = &self.components[c];
        core::iter::once(comp.outer)
            .chain(comp.holes.iter().copied())
            .map(|k| self.curves[k].clone())
            .collect()
    }

    /// Curves not enclosed by any other curve.
    pub fn outer_boundary(&self) -> Vec<Polyline> {
        self.curves
            .iter()
            .zip(&self.parent)
            .filter(|(_, p)| p.is_none())
            .map(|(c, _)| c.clone())
            .collect()
    }

    /// Area of `K_t`.
    pub fn area(&self) -> f64 {
        self.curves.iter().map(|c| c.signed_area()).sum()
    }

    /// Worst `||R(v)| - t| / t` over all vertices.
    pub fn max_level_error(&self, r: &RationalFunction) -> f64 {
        self.curves
            .iter()
            .flat_map(|c| c.points.iter())
            .map(|&v| (r.eval_unchecked(v).norm() - self.level).abs() / self.level)
            .fold(0.0, f64::max)
    }
}

/// Goodness at level `t`: critical values inside the disk of radius `t` and a
/// trace with one component per pole.
pub fn is_good(r: &RationalFunction, t: f64, opts: &TraceOptions) -> Result<GoodnessReport> {
    let crit = r.critical_data()?;
    let offending = offending(&crit, t);
    let lem = trace(r, t, opts)?;
    let one_pole_each = lem.components.iter().all(|c| c.poles.len() == 1);
    let component_count = lem.components.len();
    Ok(GoodnessReport {
        is_good: offending.is_empty() && one_pole_each && component_count == r.degree(),
        component_count,
        offending_critical_points: offending,
        one_pole_each,
    })
}

fn offending(crit: &CriticalData, t: f64) -> Vec<(C64, f64)> {
    crit.points
        .iter()
        .zip(&crit.values)
        .map(|(&c, v)| (c, v.norm()))
        .filter(|&(_, m)| m >= t)
        .collect()
}
