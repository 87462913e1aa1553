//! Harmonic measure by walk-on-spheres, Möbius transport of unbounded
//! problems, and the exact image-arclength measure of a level-1 lemniscate.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these whenever std is linked
use num_traits::Float;

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryHit, Polyline, SegmentBvh};
use crate::lemniscate::{trace, Lemniscate, TraceOptions};
use crate::ratfunc::RationalFunction;
use crate::rng::Stream;
use crate::C64;

/// Absorption distance as a fraction of the boundary diameter.
pub const ABSORPTION: f64 = 1e-6;
/// Walks still running after this many steps are counted as failures.
pub const STEP_CAP: usize = 10_000;
/// Allowed fraction of failed walks.
pub const MAX_FAILED_FRACTION: f64 = 1e-3;
const BATCH: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Point(C64),
    Infinity,
}

/// Which complementary component of the boundary curves is the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainSide {
    /// The bounded component containing the source.
    Interior,
    /// The unbounded component.
    Exterior,
}

/// Half-open arclength-fraction interval `[s0, s1)` of one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub curve: usize,
    pub s0: f64,
    pub s1: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcPartition {
    pub arcs: Vec<Arc>,
}

impl ArcPartition {
    pub fn new(arcs: Vec<Arc>) -> Result<Self> {
        for a in &arcs {
            if !(0.0 <= a.s0 && a.s0 < a.s1 && a.s1 <= 1.0) {
                return Err(Error::DegenerateInput(format!(
                    "arc [{}, {}) is not inside [0, 1]",
                    a.s0, a.s1
                )));
            }
        }
        Ok(Self { arcs })
    }

    /// `per_curve` equal arcs on each of `curves` curves.
    pub fn uniform(curves: usize, per_curve: usize) -> Self {
        let per_curve = per_curve.max(1);
        let arcs = (0..curves)
            .flat_map(|c| {
                (0..per_curve).map(move |k| Arc {
                    curve: c,
                    s0: k as f64 / per_curve as f64,
                    s1: (k + 1) as f64 / per_curve as f64,
                    label: format!("c{c}a{k}"),
                })
            })
            .collect();
        Self { arcs }
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// First arc of `curve` containing fraction `s`.
    pub fn locate(&self, curve: usize, s: f64) -> Option<usize> {
        let s = if s >= 1.0 { s - 1.0 } else { s };
        self.arcs.iter().position(|a| a.curve == curve && a.s0 <= s && s < a.s1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcEstimate {
    pub arc: usize,
    pub estimate: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicMeasureReport {
    pub source: Source,
    pub arc_measures: Vec<ArcEstimate>,
    /// Walks that reached the boundary.
    pub walks: usize,
    /// Walks stopped by the step cap.
    pub failed: usize,
    pub seed: u64,
}

impl HarmonicMeasureReport {
    pub fn estimates(&self) -> Vec<f64> {
        self.arc_measures.iter().map(|a| a.estimate).collect()
    }

    pub fn std_errors(&self) -> Vec<f64> {
        self.arc_measures.iter().map(|a| a.std_error).collect()
    }

    pub fn total(&self) -> f64 {
        self.arc_measures.iter().map(|a| a.estimate).sum()
    }
}

/// A bounded walk-on-spheres problem. Vertex parameters record the arclength
/// fraction each vertex had on the original curve, so tallies refer to the
/// original arcs after a transport.
#[derive(Debug, Clone)]
pub struct BoundedProblem {
    curves: Vec<Polyline>,
    params: Vec<Vec<f64>>,
    bvh: SegmentBvh,
    source: C64,
    origin: Source,
    epsilon: f64,
}

/// Absorption point of one walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorption {
    pub point: C64,
    pub curve: usize,
    pub fraction: f64,
}

fn arclength_params(c: &Polyline) -> Vec<f64> {
    let cum = c.cumulative_lengths();
    let total = *cum.last().unwrap();
    cum.iter().map(|v| v / total).collect()
}

impl BoundedProblem {
    fn from_parts(curves: Vec<Polyline>, params: Vec<Vec<f64>>, source: C64, origin: Source) -> Result<Self> {
        let diameter = curves
            .iter()
            .filter_map(|c| c.bbox())
            .reduce(|a, b| a.union(&b))
            .map_or(0.0, |b| b.diameter());
        if diameter == 0.0 {
            return Err(Error::DegenerateInput("empty boundary".into()));
        }
        let bvh = SegmentBvh::new(&curves);
        let problem = Self {
            curves,
            params,
            bvh,
            source,
            origin,
            epsilon: ABSORPTION * diameter,
        };
        if !problem.curves.iter().any(|c| c.contains(source)) {
            return Err(Error::SourceOutsideDomain);
        }
        if problem.bvh.nearest(source).unwrap().distance <= problem.epsilon {
            return Err(Error::SourceOutsideDomain);
        }
        Ok(problem)
    }

    /// Interior problem on the original curves.
    pub fn interior(boundary: &[Polyline], source: C64) -> Result<Self> {
        let params = boundary.iter().map(arclength_params).collect();
        Self::from_parts(boundary.to_vec(), params, source, Source::Point(source))
    }

    pub fn curves(&self) -> &[Polyline] {
        &self.curves
    }

    pub fn source(&self) -> C64 {
        self.source
    }

    fn fraction(&self, hit: &BoundaryHit) -> f64 {
        let p = &self.params[hit.curve];
        let a = p[hit.segment];
        let b = p[hit.segment + 1];
        a + (b - a) * hit.t
    }

    /// Run `walks` walks using random stream `stream`.
    pub fn absorb(&self, walks: usize, seed: u64, stream: u32) -> (Vec<Absorption>, usize) {
        let mut out = Vec::with_capacity(walks);
        let mut failed = 0;
        let batches = walks.div_ceil(BATCH);
        for b in 0..batches {
            let mut rng = Stream::new(seed, stream, b as u32);
            let count = BATCH.min(walks - b * BATCH);
            for _ in 0..count {
                match self.walk(&mut rng) {
                    Some(a) => out.push(a),
                    None => failed += 1,
                }
            }
        }
        (out, failed)
    }

    fn walk(&self, rng: &mut Stream) -> Option<Absorption> {
        let mut z = self.source;
        for _ in 0..STEP_CAP {
            let hit = self.bvh.nearest(z)?;
            if hit.distance < self.epsilon {
                return Some(Absorption {
                    point: hit.point,
                    curve: hit.curve,
                    fraction: self.fraction(&hit),
                });
            }
            z += rng.unit_circle() * hit.distance;
        }
        None
    }

    /// Harmonic measure of each arc seen from the source.
    pub fn wos(&self, partition: &ArcPartition, walks: usize, seed: u64) -> Result<HarmonicMeasureReport> {
        self.wos_stream(partition, walks, seed, 0)
    }

    fn wos_stream(
        &self,
        partition: &ArcPartition,
        walks: usize,
        seed: u64,
        stream: u32,
    ) -> Result<HarmonicMeasureReport> {
        if walks == 0 {
            return Err(Error::DegenerateInput("at least one walk is required".into()));
        }
        let (hits, failed) = self.absorb(walks, seed, stream);
        if failed as f64 > MAX_FAILED_FRACTION * walks as f64 {
            return Err(Error::NonAbsorbingWalk { failed, walks });
        }
        let mut counts = vec![0usize; partition.len()];
        for h in &hits {
            if let Some(k) = partition.locate(h.curve, h.fraction) {
                counts[k] += 1;
            }
        }
        let n = hits.len() as f64;
        let arc_measures = counts
            .iter()
            .enumerate()
            .map(|(arc, &c)| {
                let p = c as f64 / n;
                ArcEstimate {
                    arc,
                    estimate: p,
                    std_error: (p * (1.0 - p) / n).sqrt(),
                }
            })
            .collect();
        Ok(HarmonicMeasureReport {
            source: self.origin,
            arc_measures,
            walks: hits.len(),
            failed,
            seed,
        })
    }
}

/// Indices of the curves enclosing `z`.
fn enclosing(boundary: &[Polyline], z: C64) -> Vec<usize> {
    (0..boundary.len()).filter(|&k| boundary[k].contains(z)).collect()
}

/// Map the problem by `T(z) = 1/(z - pivot)` (so `∞ ↦ 0`). The pivot must
/// lie in a different complementary component from the source.
pub fn moebius_transport(boundary: &[Polyline], source: Source, pivot: C64) -> Result<BoundedProblem> {
    let tiny = 1e-12
        * boundary
            .iter()
            .filter_map(|c| c.bbox())
            .reduce(|a, b| a.union(&b))
            .map_or(1.0, |b| b.diameter());
    if boundary.iter().any(|c| c.distance(pivot) <= tiny) {
        return Err(Error::PivotInsideDomain);
    }
    let pivot_side = enclosing(boundary, pivot);
    let source_side = match source {
        Source::Infinity => Vec::new(),
        Source::Point(z) => enclosing(boundary, z),
    };
    if pivot_side == source_side {
        return Err(Error::PivotInsideDomain);
    }
    let map = |z: C64| (z - pivot).inv();
    let mut curves = Vec::with_capacity(boundary.len());
    let mut params = Vec::with_capacity(boundary.len());
    for c in boundary {
        let base = arclength_params(c);
        let n = c.len();
        let mut pts = Vec::with_capacity(n);
        let mut par = Vec::with_capacity(n + 1);
        for k in 0..n {
            let a = c.points[k];
            let b = c.points[(k + 1) % n];
            let len = (b - a).norm();
            let dist = crate::geometry::segment_distance(pivot, a, b).0;
            // Keep chords short relative to the distance to the pivot so
            // images of straight segments stay close to straight.
            let pieces = ((len / (0.02 * dist)).ceil() as usize).clamp(1, 4096);
            for j in 0..pieces {
                let s = j as f64 / pieces as f64;
                pts.push(map(a + (b - a) * s));
                par.push(base[k] + (base[k + 1] - base[k]) * s);
            }
        }
        par.push(1.0);
        curves.push(Polyline::new(pts));
        params.push(par);
    }
    let mapped_source = match source {
        Source::Infinity => C64::new(0.0, 0.0),
        Source::Point(z) => map(z),
    };
    BoundedProblem::from_parts(curves, params, mapped_source, source)
}

/// Harmonic measure of each arc of `partition`, seen from `source`, for the
/// complementary component of `boundary` given by `side`.
pub fn wos(
    boundary: &[Polyline],
    side: DomainSide,
    source: Source,
    partition: &ArcPartition,
    walks: usize,
    seed: u64,
) -> Result<HarmonicMeasureReport> {
    problem_for(boundary, side, source)?.wos(partition, walks, seed)
}

fn problem_for(boundary: &[Polyline], side: DomainSide, source: Source) -> Result<BoundedProblem> {
    match (side, source) {
        (DomainSide::Interior, Source::Point(z)) => BoundedProblem::interior(boundary, z),
        (DomainSide::Interior, Source::Infinity) => Err(Error::SourceOutsideDomain),
        (DomainSide::Exterior, src) => {
            if let Source::Point(z) = src {
                if boundary.iter().any(|c| c.contains(z)) {
                    return Err(Error::SourceOutsideDomain);
                }
            }
            let pivot = boundary
                .first()
                .and_then(|c| c.interior_point())
                .ok_or_else(|| Error::DegenerateInput("no interior point for the pivot".into()))?;
            moebius_transport(boundary, src, pivot)
        }
    }
}

/// Normalised arclength of `R(E)` on the circle `|w| = t`, counted with
/// multiplicity, for each arc `E` of a lemniscate at level `t`.
pub fn image_arc_measure(r: &RationalFunction, lem: &Lemniscate, partition: &ArcPartition) -> Result<Vec<f64>> {
    let t = lem.level;
    let crit = r.critical_data()?;
    for m in crit.moduli() {
        if (m - t).abs() <= 1e-6 * t {
            return Err(Error::CriticalValueOnCircle { modulus: m });
        }
    }
    let cums: Vec<Vec<f64>> = lem.curves.iter().map(|c| c.cumulative_lengths()).collect();
    partition
        .arcs
        .iter()
        .map(|arc| {
            let curve = lem
                .curves
                .get(arc.curve)
                .ok_or_else(|| Error::DegenerateInput(format!("arc refers to missing curve {}", arc.curve)))?;
            let cum = &cums[arc.curve];
            let total = *cum.last().unwrap();
            let mut path = vec![curve.point_at(cum, arc.s0)];
            for (k, &c) in cum[..curve.len()].iter().enumerate() {
                let s = c / total;
                if s > arc.s0 && s < arc.s1 {
                    path.push(curve.points[k]);
                }
            }
            path.push(curve.point_at(cum, arc.s1));
            let mut turn = 0.0;
            for w in path.windows(2) {
                turn += arg_change(r, w[0], w[1], 12);
            }
            Ok(turn / (2.0 * PI))
        })
        .collect()
}

/// `|Δ arg R|` along a chord, bisecting until each step is small.
fn arg_change(r: &RationalFunction, a: C64, b: C64, depth: u32) -> f64 {
    let d = (r.eval_unchecked(b) / r.eval_unchecked(a)).arg();
    if d.abs() < 0.25 || depth == 0 {
        return d.abs();
    }
    let m = (a + b) * 0.5;
    arg_change(r, a, m, depth - 1) + arg_change(r, m, b, depth - 1)
}

fn require_good(r: &RationalFunction, lem: &Lemniscate) -> Result<()> {
    let crit = r.critical_data()?;
    let ok = crit.moduli().all(|m| m < lem.level)
        && lem.components.len() == r.degree()
        && lem.components.iter().all(|c| c.poles.len() == 1 && c.holes.is_empty());
    if ok {
        Ok(())
    } else {
        Err(Error::NotGood { level: lem.level })
    }
}

/// Per-arc vectors of the reflection identity and their agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionReport {
    pub partition: ArcPartition,
    /// `Σ_i ω_{p_i}` over the components.
    pub a: Vec<f64>,
    /// `Σ_j ω_{ζ_j}` over the zeros of `R` (including ∞) in `Ω`.
    pub b: Vec<f64>,
    /// Image-arclength measure.
    pub c: Vec<f64>,
    pub sigma_a: Vec<f64>,
    pub sigma_b: Vec<f64>,
    pub per_pole: Vec<HarmonicMeasureReport>,
    /// Zero sources with their multiplicities.
    pub per_zero: Vec<(usize, HarmonicMeasureReport)>,
    pub z_ab: Vec<f64>,
    pub z_ac: Vec<f64>,
    pub z_bc: Vec<f64>,
    pub walks: usize,
    pub seed: u64,
}

impl ReflectionReport {
    pub fn max_z(&self) -> f64 {
        self.z_ab
            .iter()
            .chain(&self.z_ac)
            .chain(&self.z_bc)
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn passed(&self, k_sigma: f64) -> bool {
        self.max_z() <= k_sigma
    }

    /// `(max |A-B|, max |A-C|, max |B-C|)`.
    pub fn max_discrepancies(&self) -> (f64, f64, f64) {
        let m = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        (m(&self.a, &self.b), m(&self.a, &self.c), m(&self.b, &self.c))
    }
}

/// Standard error with a floor of one count, so empty arcs do not give
/// infinite z-scores.
fn floor_sigma(sigma: f64, walks: usize) -> f64 {
    sigma.max(1.0 / walks.max(1) as f64)
}

/// Trace the level-1 lemniscate, split every curve into `arcs_per_curve`
/// arcs and compare the three sides of the reflection identity.
pub fn verify_reflection(
    r: &RationalFunction,
    arcs_per_curve: usize,
    walks: usize,
    seed: u64,
    opts: &TraceOptions,
) -> Result<ReflectionReport> {
    let lem = trace(r, 1.0, opts)?;
    let partition = ArcPartition::uniform(lem.curves.len(), arcs_per_curve);
    verify_reflection_on(r, &lem, &partition, walks, seed)
}

pub fn verify_reflection_on(
    r: &RationalFunction,
    lem: &Lemniscate,
    partition: &ArcPartition,
    walks: usize,
    seed: u64,
) -> Result<ReflectionReport> {
    require_good(r, lem)?;
    let n_arcs = partition.len();
    let mut a = vec![0.0; n_arcs];
    let mut var_a = vec![0.0; n_arcs];
    let mut per_pole = Vec::new();
    for (i, &p) in r.poles().iter().enumerate() {
        let problem = BoundedProblem::interior(&lem.curves, p)?;
        let rep = problem.wos_stream(partition, walks, seed, i as u32)?;
        for (k, e) in rep.arc_measures.iter().enumerate() {
            a[k] += e.estimate;
            var_a[k] += floor_sigma(e.std_error, rep.walks).powi(2);
        }
        per_pole.push(rep);
    }

    let zeros = r.zeros()?;
    let mut sources: Vec<(Source, usize)> =
        crate::poly::cluster_roots(&zeros.finite, crate::ratfunc::CLUSTER_TOLERANCE)
            .into_iter()
            .map(|(z, m)| (Source::Point(z), m))
            .collect();
    sources.push((Source::Infinity, zeros.order_at_infinity));
    let pivot = r.poles()[0];
    let mut b = vec![0.0; n_arcs];
    let mut var_b = vec![0.0; n_arcs];
    let mut per_zero = Vec::new();
    for (k, (src, mult)) in sources.into_iter().enumerate() {
        let problem = moebius_transport(&lem.curves, src, pivot)?;
        let stream = (r.degree() + k) as u32;
        let rep = problem.wos_stream(partition, walks, seed, stream)?;
        let m = mult as f64;
        for (j, e) in rep.arc_measures.iter().enumerate() {
            b[j] += m * e.estimate;
            var_b[j] += (m * floor_sigma(e.std_error, rep.walks)).powi(2);
        }
        per_zero.push((mult, rep));
    }

    let c = image_arc_measure(r, lem, partition)?;
    let sigma_a: Vec<f64> = var_a.iter().map(|v| v.sqrt()).collect();
    let sigma_b: Vec<f64> = var_b.iter().map(|v| v.sqrt()).collect();
    let z_ab = (0..n_arcs)
        .map(|k| (a[k] - b[k]).abs() / (var_a[k] + var_b[k]).sqrt())
        .collect();
    let z_ac = (0..n_arcs).map(|k| (a[k] - c[k]).abs() / sigma_a[k]).collect();
    let z_bc = (0..n_arcs).map(|k| (b[k] - c[k]).abs() / sigma_b[k]).collect();
    Ok(ReflectionReport {
        partition: partition.clone(),
        a,
        b,
        c,
        sigma_a,
        sigma_b,
        per_pole,
        per_zero,
        z_ab,
        z_ac,
        z_bc,
        walks,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerm {
    pub i: usize,
    pub j: usize,
    pub estimate: f64,
    pub predicted: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// `I(ω_i)` against `log 1/|a_i|` (with `i == j`).
    pub self_terms: Vec<EnergyTerm>,
    /// `I(ω_i, ω_j)` against `log 1/|p_i - p_j|` for `i < j`.
    pub cross_terms: Vec<EnergyTerm>,
    pub total: f64,
    pub total_predicted: f64,
    pub total_std_error: f64,
    pub walks: usize,
    pub seed: u64,
}

/// Number of shifted pairings used by the energy U-statistics.
const SHIFTS: usize = 16;

/// Mean and standard error of `log 1/|x_k - y_{k+s}|` over shifts.
fn shifted_energy(x: &[C64], y: &[C64], shifts: core::ops::Range<usize>) -> (f64, f64) {
    let n = x.len().min(y.len());
    let mut per_k = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = 0.0;
        let mut cnt = 0;
        for sh in shifts.clone() {
            let d = (x[k] - y[(k + sh) % n]).norm();
            if d > 0.0 {
                s -= d.ln();
                cnt += 1;
            }
        }
        if cnt > 0 {
            per_k.push(s / cnt as f64);
        }
    }
    let m = per_k.len() as f64;
    let mean = per_k.iter().sum::<f64>() / m;
    let var = per_k.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0).max(1.0);
    (mean, (var / m).sqrt())
}

/// Monte Carlo energies of the pole harmonic measures `ω_i` of the
/// components of `K_1` against their closed forms.
pub fn verify_energy_identity(
    r: &RationalFunction,
    walks: usize,
    seed: u64,
    opts: &TraceOptions,
) -> Result<EnergyReport> {
    if walks < 2 {
        return Err(Error::DegenerateInput("at least two walks are required".into()));
    }
    let lem = trace(r, 1.0, opts)?;
    require_good(r, &lem)?;
    let d = r.degree();
    let mut samples = Vec::with_capacity(d);
    for (i, &p) in r.poles().iter().enumerate() {
        let problem = BoundedProblem::interior(&lem.curves, p)?;
        let (hits, failed) = problem.absorb(walks, seed, i as u32);
        if failed as f64 > MAX_FAILED_FRACTION * walks as f64 {
            return Err(Error::NonAbsorbingWalk { failed, walks });
        }
        samples.push(hits.into_iter().map(|h| h.point).collect::<Vec<_>>());
    }
    let mut self_terms = Vec::with_capacity(d);
    let mut cross_terms = Vec::new();
    let mut total = 0.0;
    let mut total_var = 0.0;
    let mut total_predicted = 0.0;
    for i in 0..d {
        let (est, se) = shifted_energy(&samples[i], &samples[i], 1..SHIFTS + 1);
        let predicted = -r.residues()[i].norm().ln();
        self_terms.push(EnergyTerm {
            i,
            j: i,
            estimate: est,
            predicted,
            std_error: se,
        });
        total += est;
        total_var += se * se;
        total_predicted += predicted;
    }
    for i in 0..d {
        for j in i + 1..d {
            let (est, se) = shifted_energy(&samples[i], &samples[j], 0..SHIFTS);
            let predicted = -(r.poles()[i] - r.poles()[j]).norm().ln();
            cross_terms.push(EnergyTerm {
                i,
                j,
                estimate: est,
                predicted,
                std_error: se,
            });
            total += 2.0 * est;
            total_var += 4.0 * se * se;
            total_predicted += 2.0 * predicted;
        }
    }
    Ok(EnergyReport {
        self_terms,
        cross_terms,
        total,
        total_predicted,
        total_std_error: total_var.sqrt(),
        walks,
        seed,
    })
}
