//! Logarithmic capacity of compact sets bounded by closed polylines.
//!
//! [`cap_panel`] solves the discretised equilibrium problem with piecewise
//! constant charges; [`cap_fekete`] uses greedy Leja points. Both work on the
//! outer boundary only: curves enclosed by other curves are ignored, since
//! they do not change the capacity.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::Polyline;
use crate::linalg::Matrix;
use crate::poly::Polynomial;
use crate::C64;

/// Negative panel charges smaller than this fraction of the mean charge
/// `1/n` are clamped to zero; larger ones are an error.
pub const NEGATIVE_WEIGHT_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMethod {
    Panel,
    Fekete,
    Oracle,
}

impl CapacityMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Panel => "PANEL",
            Self::Fekete => "FEKETE",
            Self::Oracle => "ORACLE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityEstimate {
    pub value: f64,
    pub robin_constant: f64,
    pub method: CapacityMethod,
    pub error_indicator: f64,
}

impl CapacityEstimate {
    pub fn from_robin(robin_constant: f64, method: CapacityMethod, error_indicator: f64) -> Self {
        Self {
            value: (-robin_constant).exp(),
            robin_constant,
            method,
            error_indicator,
        }
    }

    pub fn from_value(value: f64, method: CapacityMethod, error_indicator: f64) -> Self {
        Self {
            value,
            robin_constant: -value.ln(),
            method,
            error_indicator,
        }
    }
}

/// Weighted point set; weights are nonnegative and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub support: Vec<C64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<C64>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() || support.is_empty() {
            return Err(Error::DegenerateInput("support and weights must match".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::DegenerateInput("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::DegenerateInput("weights must sum to one".into()));
        }
        Ok(Self { support, weights })
    }

    /// Equal weights on `support`.
    pub fn uniform(support: Vec<C64>) -> Result<Self> {
        let n = support.len();
        Self::new(support, vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// `∬ log(1/|x - y|) dμ(x) dν(y)`. When `μ == ν` the diagonal is excluded
/// (see [`self_energy`]).
pub fn mutual_energy(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if mu == nu {
        return Ok(self_energy(mu));
    }
    let mut sum = 0.0;
    for (x, wx) in mu.support.iter().zip(&mu.weights) {
        for (y, wy) in nu.support.iter().zip(&nu.weights) {
            let d = (x - y).norm();
            if d == 0.0 {
                return Err(Error::CoincidentPoints);
            }
            sum -= wx * wy * d.ln();
        }
    }
    Ok(sum)
}

/// Diagonal-free energy `Σ_{i≠j} w_i w_j log(1/|x_i - x_j|) / Σ_{i≠j} w_i w_j`.
pub fn self_energy(mu: &DiscreteMeasure) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    let n = mu.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = mu.weights[i] * mu.weights[j];
            let d = (mu.support[i] - mu.support[j]).norm();
            if d > 0.0 {
                num -= w * d.ln();
                den += w;
            }
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// `cap(P^{-1}(E)) = (cap(E) / |a_n|)^{1/n}`.
pub fn cap_polynomial_preimage(p: &Polynomial, cap_e: f64) -> Result<f64> {
    match (p.degree(), p.leading()) {
        (Some(n), Some(a)) if n >= 1 => Ok((cap_e / a.norm()).powf(1.0 / n as f64)),
        _ => Err(Error::DegenerateInput(
            "polynomial of degree at least one required".into(),
        )),
    }
}

/// A piece of boundary to discretise: a closed curve or an open arc (a
/// flattened two-sided polyline).
enum Piece {
    Closed(Vec<C64>),
    Arc(Vec<C64>),
}

impl Piece {
    fn points(&self) -> &[C64] {
        match self {
            Piece::Closed(p) | Piece::Arc(p) => p,
        }
    }

    fn is_closed(&self) -> bool {
        matches!(self, Piece::Closed(_))
    }

    fn cumulative(&self) -> Vec<f64> {
        let pts = self.points();
        let n = pts.len();
        let segs = if self.is_closed() { n } else { n - 1 };
        let mut cum = Vec::with_capacity(segs + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for k in 0..segs {
            acc += (pts[(k + 1) % n] - pts[k]).norm();
            cum.push(acc);
        }
        cum
    }

    fn length(&self) -> f64 {
        *self.cumulative().last().unwrap()
    }
}

/// Outer pieces of a boundary: drops degenerate and enclosed curves and
/// detects flattened arcs.
fn outer_pieces(boundary: &[Polyline]) -> Result<Vec<Piece>> {
    let curves: Vec<&Polyline> = boundary.iter().filter(|c| c.len() >= 2).collect();
    if curves.is_empty() {
        return Err(Error::DegenerateInput("empty boundary".into()));
    }
    let mut out = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        let probe = c.points[0];
        let enclosed = curves.iter().enumerate().any(|(j, o)| j != i && o.contains(probe));
        if enclosed {
            continue;
        }
        let scale = c.bbox().map_or(0.0, |b| b.diameter());
        if scale == 0.0 {
            continue;
        }
        match c.as_flattened_arc(1e-12 * scale) {
            Some(arc) => out.push(Piece::Arc(arc)),
            None => out.push(Piece::Closed(c.points.clone())),
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateInput("boundary has no extent".into()));
    }
    Ok(out)
}

/// Point at arclength `s` on a piece.
fn point_at(pts: &[C64], cum: &[f64], closed: bool, s: f64) -> (C64, usize) {
    let n = pts.len();
    let segs = cum.len() - 1;
    let k = cum.partition_point(|&v| v <= s).saturating_sub(1).min(segs - 1);
    let len = cum[k + 1] - cum[k];
    let t = if len > 0.0 {
        ((s - cum[k]) / len).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let a = pts[k];
    let b = if closed { pts[(k + 1) % n] } else { pts[k + 1] };
    (a + (b - a) * t, k)
}

/// A panel: its sub-polyline (consecutive points), length and collocation point.
struct Panel {
    path: Vec<C64>,
    length: f64,
    mid: C64,
}

/// Sub-polyline of a piece between arclengths `s0 < s1`.
fn sub_path(pts: &[C64], cum: &[f64], closed: bool, s0: f64, s1: f64) -> Vec<C64> {
    let n = pts.len();
    let (a, ka) = point_at(pts, cum, closed, s0);
    let (b, kb) = point_at(pts, cum, closed, s1);
    let mut path = vec![a];
    for k in ka + 1..=kb {
        let v = pts[k % n];
        if (v - *path.last().unwrap()).norm() > 0.0 {
            path.push(v);
        }
    }
    if (b - *path.last().unwrap()).norm() > 0.0 || path.len() == 1 {
        path.push(b);
    }
    path
}

fn make_panels(piece: &Piece, count: usize) -> Vec<Panel> {
    let pts = piece.points();
    let cum = piece.cumulative();
    let total = *cum.last().unwrap();
    let closed = piece.is_closed();
    let breaks: Vec<f64> = (0..=count)
        .map(|k| {
            let x = k as f64 / count as f64;
            if closed {
                total * x
            } else {
                // Cosine spacing resolves the inverse square-root endpoint density.
                0.5 * total * (1.0 - (core::f64::consts::PI * x).cos())
            }
        })
        .collect();
    breaks
        .windows(2)
        .map(|w| {
            let path = sub_path(pts, &cum, closed, w[0], w[1]);
            let (mid, _) = point_at(pts, &cum, closed, 0.5 * (w[0] + w[1]));
            Panel {
                length: w[1] - w[0],
                path,
                mid,
            }
        })
        .collect()
}

/// `∫_{segment} log|x - y| ds(y)` in closed form.
fn segment_log_integral(x: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return 0.0;
    }
    let u = d / len;
    let w = (a - x) * u.conj();
    let s0 = w.re;
    let s1 = s0 + len;
    let v = w.im.abs();
    antiderivative(s1, v) - antiderivative(s0, v)
}

/// `∫ log sqrt(s² + v²) ds`.
#[inline]
fn antiderivative(s: f64, v: f64) -> f64 {
    let r2 = s * s + v * v;
    let log_term = if r2 > 0.0 { 0.5 * s * r2.ln() } else { 0.0 };
    let atan_term = if v > 0.0 { v * (s / v).atan() } else { 0.0 };
    log_term - s + atan_term
}

/// Mean of `log(1/|x - y|)` over a panel.
fn panel_kernel(x: C64, panel: &Panel) -> f64 {
    let mut total = 0.0;
    for seg in panel.path.windows(2) {
        total += segment_log_integral(x, seg[0], seg[1]);
    }
    -total / panel.length
}

fn allocate(lengths: &[f64], total: usize, min_each: usize) -> Vec<usize> {
    let sum: f64 = lengths.iter().sum();
    let mut counts: Vec<usize> = lengths
        .iter()
        .map(|l| ((total as f64 * l / sum).round() as usize).max(min_each))
        .collect();
    // Keep the total close to the request when rounding overshoots.
    while counts.iter().sum::<usize>() > total.max(min_each * lengths.len()) {
        let k = (0..counts.len()).max_by_key(|&k| counts[k]).unwrap();
        counts[k] -= 1;
    }
    counts
}

fn solve_panels(pieces: &[Piece], panels: usize) -> Result<(f64, Vec<C64>, Vec<f64>)> {
    let lengths: Vec<f64> = pieces.iter().map(|p| p.length()).collect();
    let counts = allocate(&lengths, panels, 8);
    let all: Vec<Panel> = pieces
        .iter()
        .zip(&counts)
        .flat_map(|(p, &c)| make_panels(p, c))
        .collect();
    let n = all.len();
    let mut m = Matrix::zeros(n + 1);
    for i in 0..n {
        let x = all[i].mid;
        for (j, pj) in all.iter().enumerate() {
            m.set(i, j, panel_kernel(x, pj));
        }
        m.set(i, n, -1.0);
        m.set(n, i, 1.0);
    }
    let mut rhs = vec![0.0; n + 1];
    rhs[n] = 1.0;
    let sol = m.solve(rhs)?;
    let gamma = sol[n];
    let mut weights = sol[..n].to_vec();
    let min_weight = weights.iter().copied().fold(f64::INFINITY, f64::min);
    if !gamma.is_finite() || weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::SingularSystem);
    }
    if min_weight < -NEGATIVE_WEIGHT_TOLERANCE / n as f64 {
        return Err(Error::NegativeWeights { min_weight });
    }
    if min_weight < 0.0 {
        for w in weights.iter_mut() {
            *w = w.max(0.0);
        }
        let s: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= s;
        }
    }
    Ok((gamma, all.iter().map(|p| p.mid).collect(), weights))
}

/// Panel (boundary element) capacity with `panels` piecewise-constant
/// charges. The error indicator is the change from a solve with half as many
/// panels.
pub fn cap_panel(boundary: &[Polyline], panels: usize) -> Result<(CapacityEstimate, DiscreteMeasure)> {
    if panels < 16 {
        return Err(Error::DegenerateInput("at least 16 panels are required".into()));
    }
    let pieces = outer_pieces(boundary)?;
    let (gamma, support, weights) = solve_panels(&pieces, panels)?;
    let (coarse, _, _) = solve_panels(&pieces, panels / 2)?;
    let value = (-gamma).exp();
    let err = (value - (-coarse).exp()).abs();
    Ok((
        CapacityEstimate::from_robin(gamma, CapacityMethod::Panel, err),
        DiscreteMeasure { support, weights },
    ))
}

/// Leja points on the boundary, `n` of them chosen greedily from about
/// `32 n` arclength-uniform candidates.
///
/// The raw transfinite-diameter estimate `δ_k` converges slowly (like
/// `k^{1/(k-1)}` on a circle), so each prefix is normalised by that circle
/// factor and the estimates at `n` and `n/2` are Richardson-combined. The
/// error indicator is `|e_n - e_{n/2}|`.
pub fn cap_fekete(boundary: &[Polyline], n: usize) -> Result<CapacityEstimate> {
    if n < 8 {
        return Err(Error::DegenerateInput("at least 8 Leja points are required".into()));
    }
    let pieces = outer_pieces(boundary)?;
    let lengths: Vec<f64> = pieces.iter().map(|p| p.length()).collect();
    let counts = allocate(&lengths, 32 * n, 16);
    let mut cand = Vec::new();
    for (piece, &c) in pieces.iter().zip(&counts) {
        let pts = piece.points();
        let cum = piece.cumulative();
        let total = *cum.last().unwrap();
        let closed = piece.is_closed();
        let m = if closed { c } else { c + 1 };
        for k in 0..m {
            cand.push(point_at(pts, &cum, closed, total * k as f64 / c as f64).0);
        }
    }
    let centroid = cand.iter().sum::<C64>() / cand.len() as f64;
    let first = (0..cand.len())
        .max_by(|&a, &b| {
            (cand[a] - centroid)
                .norm()
                .partial_cmp(&(cand[b] - centroid).norm())
                .unwrap()
        })
        .unwrap();

    let mut score = vec![0.0f64; cand.len()];
    let mut chosen = vec![false; cand.len()];
    let mut prefix = vec![0.0f64; n + 1];
    let mut next = first;
    let mut acc = 0.0;
    for k in 1..=n {
        if k > 1 {
            let (best, s) = (0..cand.len())
                .filter(|&c| !chosen[c])
                .map(|c| (c, score[c]))
                .fold((usize::MAX, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
            if best == usize::MAX || !s.is_finite() {
                return Err(Error::DegenerateInput("too few distinct boundary points".into()));
            }
            next = best;
            acc += s;
        }
        chosen[next] = true;
        prefix[k] = acc;
        let x = cand[next];
        for (c, sc) in score.iter_mut().enumerate() {
            if !chosen[c] {
                *sc += (cand[c] - x).norm().ln();
            }
        }
    }
    let e = |k: usize| -> f64 {
        let kf = k as f64;
        let delta = (2.0 * prefix[k] / (kf * (kf - 1.0))).exp();
        delta / kf.powf(1.0 / (kf - 1.0))
    };
    let full = e(n);
    let half = e(n / 2);
    let value = 2.0 * full - half;
    if !(value > 0.0) {
        return Err(Error::DegenerateInput("Leja estimate is not positive".into()));
    }
    Ok(CapacityEstimate::from_value(
        value,
        CapacityMethod::Fekete,
        (full - half).abs(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn circle_radius_two() {
        let circle = Polyline::circle(c(0.0, 0.0), 2.0, 4096);
        let (est, mu) = cap_panel(&[circle], 256).unwrap();
        assert!((est.value - 2.0).abs() < 1e-4, "{}", est.value);
        assert!((est.value - (-est.robin_constant).exp()).abs() < 1e-15);
        assert!((mu.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_quarter_length() {
        let seg = Polyline::segment(c(0.0, 0.0), c(2.0, 0.0), 2048);
        let (est, _) = cap_panel(core::slice::from_ref(&seg), 256).unwrap();
        assert!((est.value - 0.5).abs() < 1e-3, "{}", est.value);
        let long = Polyline::segment(c(-2.0, 0.0), c(2.0, 0.0), 2048);
        let f = cap_fekete(&[long], 128).unwrap();
        assert!((f.value - 1.0).abs() < 1e-2, "{}", f.value);
    }

    #[test]
    fn leja_circle() {
        let circle = Polyline::circle(c(0.0, 0.0), 1.0, 4096);
        let f = cap_fekete(&[circle], 64).unwrap();
        assert!((f.value - 1.0).abs() < 5e-3, "{}", f.value);
    }

    #[test]
    fn two_circles_methods_agree() {
        let curves = [
            Polyline::circle(c(3.0, 0.0), 1.0, 2048),
            Polyline::circle(c(-3.0, 0.0), 1.0, 2048),
        ];
        let (p, _) = cap_panel(&curves, 512).unwrap();
        let f = cap_fekete(&curves, 128).unwrap();
        assert!((p.value - f.value).abs() < 1e-3, "{} {}", p.value, f.value);
    }

    #[test]
    fn enclosed_curves_are_ignored() {
        let outer = Polyline::circle(c(0.0, 0.0), 2.0, 2048);
        let mut hole = Polyline::circle(c(0.3, 0.0), 0.5, 512);
        hole.reverse();
        let (a, _) = cap_panel(core::slice::from_ref(&outer), 256).unwrap();
        let (b, _) = cap_panel(&[outer, hole], 256).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn preimage_formula() {
        let z2 = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(cap_polynomial_preimage(&z2, 1.0).unwrap(), 1.0);
        let cheb = Polynomial::new(vec![c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(cap_polynomial_preimage(&cheb, 1.0).unwrap(), 1.0);
        let cubic = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let v = cap_polynomial_preimage(&cubic, 1.0).unwrap();
        assert!((v - 0.5f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert!(cap_polynomial_preimage(&Polynomial::constant(c(1.0, 0.0)), 1.0).is_err());
    }

    #[test]
    fn energies() {
        let a = DiscreteMeasure::uniform(vec![c(0.0, 0.0)]).unwrap();
        let b = DiscreteMeasure::uniform(vec![c(3.0, 0.0)]).unwrap();
        assert!((mutual_energy(&a, &b).unwrap() - (1.0f64 / 3.0).ln()).abs() < 1e-15);
        assert_eq!(mutual_energy(&a, &a.clone()).unwrap(), 0.0);
        let a2 = DiscreteMeasure::uniform(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(mutual_energy(&a2, &a), Err(Error::CoincidentPoints));

        let ring = |centre: C64, n: usize| {
            DiscreteMeasure::uniform(
                (0..n)
                    .map(|k| centre + C64::from_polar(1.0, 2.0 * core::f64::consts::PI * k as f64 / n as f64))
                    .collect(),
            )
            .unwrap()
        };
        let e = mutual_energy(&ring(c(0.0, 0.0), 256), &ring(c(4.0, 0.0), 256)).unwrap();
        assert!((e - 0.25f64.ln()).abs() < 1e-3, "{e}");
    }

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::new(vec![c(0.0, 0.0)], vec![0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![1.5, -0.5]).is_err());
    }
}
