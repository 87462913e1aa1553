//! Closed polylines in the complex plane, containment and nearest-point
//! queries.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these whenever std is linked
use num_traits::Float;

use crate::C64;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn centered(center: C64, half_width: f64) -> Self {
        Self::new(
            center.re - half_width,
            center.re + half_width,
            center.im - half_width,
            center.im + half_width,
        )
    }

    pub fn bounding(points: impl IntoIterator<Item = C64>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Self::new(first.re, first.re, first.im, first.im);
        for z in it {
            r.x0 = r.x0.min(z.re);
            r.x1 = r.x1.max(z.re);
            r.y0 = r.y0.min(z.im);
            r.y1 = r.y1.max(z.im);
        }
        Some(r)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(
            self.x0.min(other.x0),
            self.x1.max(other.x1),
            self.y0.min(other.y0),
            self.y1.max(other.y1),
        )
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    /// Distance from `z` to the rectangle (zero inside).
    pub fn distance(&self, z: C64) -> f64 {
        let dx = (self.x0 - z.re).max(0.0).max(z.re - self.x1);
        let dy = (self.y0 - z.im).max(0.0).max(z.im - self.y1);
        dx.hypot(dy)
    }
}

/// Nearest point of segment `[a, b]` to `z`: `(distance, parameter in [0,1])`.
#[inline]
pub fn segment_distance(z: C64, a: C64, b: C64) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    let t = if len2 > 0.0 {
        (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((a + ab * t - z).norm(), t)
}

/// A closed polyline; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polyline {
    pub points: Vec<C64>,
}

impl Polyline {
    pub fn new(points: Vec<C64>) -> Self {
        Self { points }
    }

    /// Regular `n`-gon inscribed in the circle `|z - center| = radius`,
    /// counter-clockwise.
    pub fn circle(center: C64, radius: f64, n: usize) -> Self {
        let step = 2.0 * core::f64::consts::PI / n as f64;
        Self::new(
            (0..n)
                .map(|k| center + C64::from_polar(radius, step * k as f64))
                .collect(),
        )
    }

    /// The segment `[a, b]` as a flattened closed polyline that walks out
    /// along `n` pieces and back along the same vertices.
    pub fn segment(a: C64, b: C64, n: usize) -> Self {
        let n = n.max(1);
        let mut pts: Vec<C64> = (0..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect();
        pts.extend((1..n).rev().map(|k| a + (b - a) * (k as f64 / n as f64)));
        Self::new(pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Segments `(start, end)` including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let n = self.points.len();
        (0..n).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Cumulative arclength at each vertex, with the total as the last entry.
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for (a, b) in self.segments() {
            acc += (b - a).norm();
            out.push(acc);
        }
        out
    }

    /// Shoelace area; positive for counter-clockwise orientation.
    pub fn signed_area(&self) -> f64 {
        0.5 * self.segments().map(|(a, b)| a.re * b.im - b.re * a.im).sum::<f64>()
    }

    pub fn reverse(&mut self) {
        self.points.reverse();
    }

    pub fn bbox(&self) -> Option<Rect> {
        Rect::bounding(self.points.iter().copied())
    }

    /// Even–odd point-in-polygon test.
    pub fn contains(&self, z: C64) -> bool {
        let mut inside = false;
        for (a, b) in self.segments() {
            if (a.im > z.im) != (b.im > z.im) {
                let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if z.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// `(distance, segment index, parameter)` of the nearest boundary point.
    pub fn nearest(&self, z: C64) -> (f64, usize, f64) {
        let mut best = (f64::INFINITY, 0, 0.0);
        for (k, (a, b)) in self.segments().enumerate() {
            let (d, t) = segment_distance(z, a, b);
            if d < best.0 {
                best = (d, k, t);
            }
        }
        best
    }

    pub fn distance(&self, z: C64) -> f64 {
        self.nearest(z).0
    }

    /// Point at arclength fraction `s` in `[0, 1]`, given the cumulative
    /// lengths from [`Self::cumulative_lengths`].
    pub fn point_at(&self, cum: &[f64], s: f64) -> C64 {
        let total = *cum.last().unwrap_or(&0.0);
        let target = (s.clamp(0.0, 1.0)) * total;
        let n = self.points.len();
        let k = match cum.binary_search_by(|v| v.partial_cmp(&target).unwrap()) {
            Ok(k) => k.min(n - 1),
            Err(k) => (k - 1).min(n - 1),
        };
        let seg = cum[k + 1] - cum[k];
        let t = if seg > 0.0 { (target - cum[k]) / seg } else { 0.0 };
        let a = self.points[k];
        let b = self.points[(k + 1) % n];
        a + (b - a) * t
    }

    /// If this polyline walks out and back along the same vertices (see
    /// [`Self::segment`]), return the forward half as an open path.
    pub fn as_flattened_arc(&self, tol: f64) -> Option<Vec<C64>> {
        let n = self.points.len();
        if n < 2 || !n.is_multiple_of(2) {
            return None;
        }
        let half = n / 2;
        for k in 1..half {
            if (self.points[k] - self.points[n - k]).norm() > tol {
                return None;
            }
        }
        if (self.points[0] - self.points[half]).norm() <= tol {
            return None;
        }
        Some(self.points[..=half].to_vec())
    }

    /// A point strictly inside the polygon, as far from the boundary as a
    /// coarse search can find.
    pub fn interior_point(&self) -> Option<C64> {
        let bb = self.bbox()?;
        let mut best: Option<(f64, C64)> = None;
        let n = 24;
        for i in 0..n {
            for j in 0..n {
                let z = C64::new(
                    bb.x0 + bb.width() * (i as f64 + 0.5) / n as f64,
                    bb.y0 + bb.height() * (j as f64 + 0.5) / n as f64,
                );
                if self.contains(z) {
                    let d = self.distance(z);
                    if best.is_none_or(|(bd, _)| d > bd) {
                        best = Some((d, z));
                    }
                }
            }
        }
        best.map(|(_, z)| z)
    }

    /// Map every vertex.
    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::new(self.points.iter().map(|&z| f(z)).collect())
    }
}

/// Location of a boundary point: curve, segment and parameter on the segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryHit {
    pub distance: f64,
    pub point: C64,
    pub curve: usize,
    pub segment: usize,
    pub t: f64,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    bbox: Rect,
    /// Leaf: range into `items`; inner: children indices.
    start: u32,
    count: u32,
    left: u32,
    right: u32,
}

/// Bounding-volume hierarchy over the segments of a set of polylines.
#[derive(Debug, Clone)]
pub struct SegmentBvh {
    segs: Vec<(C64, C64, u32, u32)>,
    nodes: Vec<Node>,
}

const LEAF_SIZE: usize = 4;

impl SegmentBvh {
    pub fn new(curves: &[Polyline]) -> Self {
        let mut segs = Vec::new();
        for (c, curve) in curves.iter().enumerate() {
            for (k, (a, b)) in curve.segments().enumerate() {
                segs.push((a, b, c as u32, k as u32));
            }
        }
        let mut bvh = Self {
            segs,
            nodes: Vec::new(),
        };
        if !bvh.segs.is_empty() {
            let n = bvh.segs.len();
            bvh.build(0, n);
        }
        bvh
    }

    fn seg_box(s: &(C64, C64, u32, u32)) -> Rect {
        Rect::new(
            s.0.re.min(s.1.re),
            s.0.re.max(s.1.re),
            s.0.im.min(s.1.im),
            s.0.im.max(s.1.im),
        )
    }

    fn build(&mut self, start: usize, end: usize) -> u32 {
        let mut bbox = Self::seg_box(&self.segs[start]);
        for s in &self.segs[start + 1..end] {
            bbox = bbox.union(&Self::seg_box(s));
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            bbox,
            start: start as u32,
            count: (end - start) as u32,
            left: 0,
            right: 0,
        });
        if end - start > LEAF_SIZE {
            let mid_of = |s: &(C64, C64, u32, u32)| (s.0 + s.1) * 0.5;
            let slice = &mut self.segs[start..end];
            let mid = slice.len() / 2;
            if bbox.width() >= bbox.height() {
                slice.select_nth_unstable_by(mid, |a, b| mid_of(a).re.partial_cmp(&mid_of(b).re).unwrap());
            } else {
                slice.select_nth_unstable_by(mid, |a, b| mid_of(a).im.partial_cmp(&mid_of(b).im).unwrap());
            }
            let left = self.build(start, start + mid);
            let right = self.build(start + mid, end);
            let node = &mut self.nodes[id as usize];
            node.count = 0;
            node.left = left;
            node.right = right;
        }
        id
    }

    pub fn nearest(&self, z: C64) -> Option<BoundaryHit> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = BoundaryHit {
            distance: f64::INFINITY,
            point: z,
            curve: 0,
            segment: 0,
            t: 0.0,
        };
        let mut stack: Vec<u32> = vec![0];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if node.bbox.distance(z) >= best.distance {
                continue;
            }
            if node.count > 0 {
                let s = node.start as usize;
                for seg in &self.segs[s..s + node.count as usize] {
                    let (d, t) = segment_distance(z, seg.0, seg.1);
                    // Ties go to the lower curve, then the lower segment.
                    let better = d < best.distance
                        || (d == best.distance && (seg.2 as usize, seg.3 as usize) < (best.curve, best.segment));
                    if better {
                        best = BoundaryHit {
                            distance: d,
                            point: seg.0 + (seg.1 - seg.0) * t,
                            curve: seg.2 as usize,
                            segment: seg.3 as usize,
                            t,
                        };
                    }
                }
            } else {
                let (l, r) = (node.left, node.right);
                let dl = self.nodes[l as usize].bbox.distance(z);
                let dr = self.nodes[r as usize].bbox.distance(z);
                if dl < dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        Some(best)
    }
}
