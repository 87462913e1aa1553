//! Marching squares on a scalar field sampled over a rectangle, with
//! bracketed edge roots, Newton projection and adaptive midpoint
//! subdivision.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{Polyline, Rect};
use crate::C64;

/// A scalar field whose zero set is being traced. Inside means `value >= 0`.
pub(crate) trait Field {
    fn value(&self, z: C64) -> f64;
    /// Value and gradient (`∂x + i ∂y`).
    fn value_grad(&self, z: C64) -> (f64, C64);
}

/// Stand-in for non-finite samples next to a singularity; far larger than any
/// legitimate value of a log-modulus field.
const HUGE: f64 = 1e6;

#[inline]
fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else if v == f64::NEG_INFINITY {
        -HUGE
    } else {
        HUGE
    }
}

pub(crate) struct Chain {
    pub points: Vec<C64>,
    pub closed: bool,
}

pub(crate) struct Grid<'a, F: Field> {
    field: &'a F,
    rect: Rect,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl<'a, F: Field> Grid<'a, F> {
    pub fn sample(field: &'a F, rect: Rect, nx: usize, ny: usize) -> Self {
        let mut values = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                values.push(sanitize(field.value(node(&rect, nx, ny, i, j))));
            }
        }
        Self {
            field,
            rect,
            nx,
            ny,
            values,
        }
    }

    /// Largest cell side.
    pub fn cell_size(&self) -> f64 {
        (self.rect.width() / self.nx as f64).max(self.rect.height() / self.ny as f64)
    }

    #[inline]
    fn val(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.nx + 1) + i]
    }

    /// True if any node on the window border is inside.
    pub fn touches_border(&self) -> bool {
        let (nx, ny) = (self.nx, self.ny);
        (0..=nx).any(|i| self.val(i, 0) >= 0.0 || self.val(i, ny) >= 0.0)
            || (0..=ny).any(|j| self.val(0, j) >= 0.0 || self.val(nx, j) >= 0.0)
    }

    fn n_horizontal(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    fn h_edge(&self, i: usize, j: usize) -> u32 {
        (j * self.nx + i) as u32
    }

    fn v_edge(&self, i: usize, j: usize) -> u32 {
        (self.n_horizontal() + j * (self.nx + 1) + i) as u32
    }

    fn edge_nodes(&self, e: u32) -> ((usize, usize), (usize, usize)) {
        let e = e as usize;
        let nh = self.n_horizontal();
        if e < nh {
            let (i, j) = (e % self.nx, e / self.nx);
            ((i, j), (i + 1, j))
        } else {
            let e = e - nh;
            let (i, j) = (e % (self.nx + 1), e / (self.nx + 1));
            ((i, j), (i, j + 1))
        }
    }

    /// Level crossing on an edge, located by a bracketed root search.
    fn crossing(&self, e: u32) -> C64 {
        let ((ia, ja), (ib, jb)) = self.edge_nodes(e);
        let za = node(&self.rect, self.nx, self.ny, ia, ja);
        let zb = node(&self.rect, self.nx, self.ny, ib, jb);
        let fa = self.val(ia, ja);
        let fb = self.val(ib, jb);
        edge_root(self.field, za, zb, fa, fb)
    }

    /// Extract all chains of the zero set.
    pub fn chains(&self) -> Vec<Chain> {
        let mut segs: Vec<(u32, u32)> = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                self.cell_segments(i, j, &mut segs);
            }
        }
        link(&segs)
            .into_iter()
            .map(|(edges, closed)| {
                let mut points: Vec<C64> = edges.iter().map(|&e| self.crossing(e)).collect();
                dedup_consecutive(&mut points, closed, 1e-14 * self.rect.diameter());
                Chain { points, closed }
            })
            .collect()
    }

    fn cell_segments(&self, i: usize, j: usize, out: &mut Vec<(u32, u32)>) {
        let v0 = self.val(i, j);
        let v1 = self.val(i + 1, j);
        let v2 = self.val(i + 1, j + 1);
        let v3 = self.val(i, j + 1);
        let idx =
            (v0 >= 0.0) as u8 | (((v1 >= 0.0) as u8) << 1) | (((v2 >= 0.0) as u8) << 2) | (((v3 >= 0.0) as u8) << 3);
        if idx == 0 || idx == 15 {
            return;
        }
        let bottom = self.h_edge(i, j);
        let top = self.h_edge(i, j + 1);
        let left = self.v_edge(i, j);
        let right = self.v_edge(i + 1, j);
        match idx {
            5 | 10 => {
                let c = node(&self.rect, self.nx, self.ny, i, j)
                    + C64::new(
                        0.5 * self.rect.width() / self.nx as f64,
                        0.5 * self.rect.height() / self.ny as f64,
                    );
                let centre_in = sanitize(self.field.value(c)) >= 0.0;
                // Inside corners joined through the centre: cut off the outside ones.
                let v0_in = idx == 5;
                if centre_in == v0_in {
                    out.push((bottom, right));
                    out.push((top, left));
                } else {
                    out.push((left, bottom));
                    out.push((right, top));
                }
            }
            _ => {
                let mut edges = [0u32; 2];
                let mut k = 0;
                let s = [v0 >= 0.0, v1 >= 0.0, v2 >= 0.0, v3 >= 0.0];
                for (e, (a, b)) in [(bottom, (0, 1)), (right, (1, 2)), (top, (2, 3)), (left, (3, 0))] {
                    if s[a] != s[b] {
                        edges[k] = e;
                        k += 1;
                    }
                }
                out.push((edges[0], edges[1]));
            }
        }
    }
}

#[inline]
fn node(rect: &Rect, nx: usize, ny: usize, i: usize, j: usize) -> C64 {
    C64::new(
        rect.x0 + rect.width() * i as f64 / nx as f64,
        rect.y0 + rect.height() * j as f64 / ny as f64,
    )
}

/// Join cell segments sharing an edge into chains of edge ids.
fn link(segs: &[(u32, u32)]) -> Vec<(Vec<u32>, bool)> {
    let mut ends: Vec<(u32, u32)> = Vec::with_capacity(2 * segs.len());
    for (k, &(a, b)) in segs.iter().enumerate() {
        ends.push((a, k as u32));
        ends.push((b, k as u32));
    }
    ends.sort_unstable();
    let partner = |edge: u32, seg: u32| -> Option<u32> {
        let lo = ends.partition_point(|&(e, _)| e < edge);
        ends[lo..]
            .iter()
            .take_while(|&&(e, _)| e == edge)
            .find(|&&(_, s)| s != seg)
            .map(|&(_, s)| s)
    };
    let other_end = |seg: u32, edge: u32| -> u32 {
        let (a, b) = segs[seg as usize];
        if a == edge {
            b
        } else {
            a
        }
    };

    let mut used = vec![false; segs.len()];
    let mut chains = Vec::new();
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segs[start];
        // Walk forward from b.
        let mut forward = vec![a, b];
        let mut closed = false;
        let (mut seg, mut edge) = (start as u32, b);
        while let Some(next) = partner(edge, seg) {
            if next as usize == start {
                closed = true;
                break;
            }
            if used[next as usize] {
                break;
            }
            used[next as usize] = true;
            edge = other_end(next, edge);
            seg = next;
            forward.push(edge);
        }
        if closed {
            forward.pop();
            chains.push((forward, true));
            continue;
        }
        // Open chain: extend backwards from a.
        let mut backward = Vec::new();
        let (mut seg, mut edge) = (start as u32, a);
        while let Some(next) = partner(edge, seg) {
            if used[next as usize] {
                break;
            }
            used[next as usize] = true;
            edge = other_end(next, edge);
            seg = next;
            backward.push(edge);
        }
        backward.reverse();
        backward.extend(forward);
        chains.push((backward, false));
    }
    chains
}

fn dedup_consecutive(points: &mut Vec<C64>, closed: bool, tol: f64) {
    points.dedup_by(|a, b| (*a - *b).norm() <= tol);
    if closed {
        while points.len() > 1 && (points[0] - points[points.len() - 1]).norm() <= tol {
            points.pop();
        }
    }
}

/// Root of the field on `[za, zb]` where `fa` and `fb` differ in sign
/// (Illinois variant of regula falsi).
fn edge_root<F: Field>(field: &F, za: C64, zb: C64, fa: f64, fb: f64) -> C64 {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let (mut fa, mut fb) = (fa, fb);
    let mut side = 0i8;
    let mut x = 0.5;
    for _ in 0..100 {
        x = if fa - fb != 0.0 {
            (a * fb - b * fa) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = sanitize(field.value(za + (zb - za) * x));
        if fx == 0.0 || (b - a) < 1e-15 {
            break;
        }
        if (fx >= 0.0) == (fa >= 0.0) {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if fx.abs() < 1e-14 {
            break;
        }
    }
    za + (zb - za) * x
}

/// Newton projection onto the zero set along the gradient, with the step
/// length capped. Returns `None` if it does not converge.
pub(crate) fn project<F: Field>(field: &F, z0: C64, max_step: f64, tol: f64) -> Option<C64> {
    let mut z = z0;
    for _ in 0..40 {
        let (f, g) = field.value_grad(z);
        if !f.is_finite() || !g.re.is_finite() || !g.im.is_finite() {
            return None;
        }
        if f.abs() <= tol {
            return Some(z);
        }
        let g2 = g.norm_sqr();
        if g2 == 0.0 {
            return None;
        }
        let mut step = g * (-f / g2);
        let len = step.norm();
        if len > max_step {
            step *= max_step / len;
        }
        z += step;
        if (z - z0).norm() > 4.0 * max_step {
            return None;
        }
    }
    let f = field.value(z);
    (f.abs() <= tol).then_some(z)
}

/// Insert projected midpoints until every segment midpoint has
/// `|field| <= tol` or `max_depth` is reached.
pub(crate) fn refine<F: Field>(field: &F, points: &[C64], tol: f64, max_depth: u32) -> Polyline {
    let n = points.len();
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        let a = points[k];
        let b = points[(k + 1) % n];
        out.push(a);
        subdivide(field, a, b, tol, max_depth, &mut out);
    }
    Polyline::new(out)
}

fn subdivide<F: Field>(field: &F, a: C64, b: C64, tol: f64, depth: u32, out: &mut Vec<C64>) {
    if depth == 0 {
        return;
    }
    let m = (a + b) * 0.5;
    let fm = sanitize(field.value(m));
    if fm.abs() <= tol {
        return;
    }
    let len = (b - a).norm();
    let Some(q) = project(field, m, len, 1e-13) else {
        return;
    };
    subdivide(field, a, q, tol, depth - 1, out);
    out.push(q);
    subdivide(field, q, b, tol, depth - 1, out);
}
