//! Dense complex polynomials and their roots.
//!
//! Roots come from Aberth–Ehrlich simultaneous iteration started on circles
//! read off the Newton polygon of the coefficients. When residuals stall the
//! eigenvalues of the companion matrix (shifted Hessenberg QR) are used
//! instead.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 methods shadow these whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

/// Relative residual accepted for a root: `|P(r)| <= ROOT_RESIDUAL * max|c_k| * max(1,|r|)^n`.
pub const ROOT_RESIDUAL: f64 = 1e-8;

const ABERTH_MAX_ITER: usize = 600;
const QR_MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Complex polynomial with coefficients in ascending degree.
///
/// The leading coefficient is always nonzero; the zero polynomial has no
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial `Π (z - r)`.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut p = Self::constant(C64::new(1.0, 0.0));
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, C64::new(1.0, 0.0)]));
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<C64> {
        self.coeffs.last().copied()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[C64], k: usize| v.get(k).copied().unwrap_or_default();
        Self::new((0..n).map(|k| get(&self.coeffs, k) + get(&other.coeffs, k)).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Drop the top coefficients so that the degree is at most `degree`.
    pub fn truncate_degree(&self, degree: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.truncate(degree + 1);
        Self::new(c)
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Residual test used for every returned root.
    pub fn root_residual_ok(&self, r: C64) -> bool {
        self.scaled_residual(r) <= ROOT_RESIDUAL
    }

    fn scaled_residual(&self, r: C64) -> f64 {
        let n = self.coeffs.len().saturating_sub(1) as i32;
        let scale = self.max_coeff_modulus() * r.norm().max(1.0).powi(n);
        if scale == 0.0 {
            return 0.0;
        }
        self.eval(r).norm() / scale
    }

    /// All roots, repeated according to multiplicity.
    ///
    /// A nonzero constant has no roots; the zero polynomial is rejected.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let Some(n) = self.degree() else {
            return Err(Error::DegenerateInput("roots of the zero polynomial".into()));
        };
        if n == 0 {
            return Ok(Vec::new());
        }
        // Exact zero roots.
        let shift = self.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        let reduced = Self::new(self.coeffs[shift..].to_vec());
        let mut roots = vec![C64::new(0.0, 0.0); shift];
        let m = n - shift;
        if m == 1 {
            roots.push(-reduced.coeffs[0] / reduced.coeffs[1]);
            return Ok(roots);
        }
        if m > 1 {
            let mut found = aberth(&reduced);
            if !found.iter().all(|&r| reduced.root_residual_ok(r)) {
                let mut alt = companion_eigenvalues(&reduced)?;
                for r in alt.iter_mut() {
                    *r = newton_polish(&reduced, *r);
                }
                let worst = |v: &[C64]| v.iter().map(|&r| reduced.scaled_residual(r)).fold(0.0, f64::max);
                if worst(&alt) < worst(&found) {
                    found = alt;
                }
                let w = worst(&found);
                if w > ROOT_RESIDUAL {
                    return Err(Error::NonConvergence { residual: w });
                }
            }
            roots.extend(found);
        }
        Ok(roots)
    }
}

/// Group roots lying within `rel_tol * max(1, |r|)` of each other.
///
/// Returns cluster centers with their multiplicities.
pub fn cluster_roots(roots: &[C64], rel_tol: f64) -> Vec<(C64, usize)> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= rel_tol * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<(C64, usize, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match out.iter_mut().find(|(_, _, r)| *r == root) {
            Some((sum, count, _)) => {
                *sum += roots[i];
                *count += 1;
            }
            None => out.push((roots[i], 1, root)),
        }
    }
    out.into_iter()
        .map(|(sum, count, _)| (sum / count as f64, count))
        .collect()
}

/// Initial guesses on circles whose radii come from the upper convex hull of
/// `(k, log|c_k|)`.
fn initial_guesses(p: &Polynomial) -> Vec<C64> {
    let c = p.coeffs();
    let n = c.len() - 1;
    let logs: Vec<f64> = c
        .iter()
        .map(|z| {
            if z.norm() > 0.0 {
                z.norm().ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..=n {
        if logs[k] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (i, j) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (j - i) as f64 * (logs[k] - logs[i]) - (k - i) as f64 * (logs[j] - logs[i]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut guesses = Vec::with_capacity(n);
    // Fixed pseudo-random angular offsets so that no guess sits on a symmetry axis.
    let mut jitter = core::f64::consts::FRAC_1_PI;
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let m = j - i;
        let radius = ((logs[i] - logs[j]) / m as f64).exp();
        for s in 0..m {
            jitter = (jitter + 0.618_033_988_749_895).fract();
            let theta = 2.0 * PI * (s as f64 + 0.25 + 0.5 * jitter) / m as f64 + 0.4;
            guesses.push(C64::from_polar(radius, theta));
        }
    }
    guesses
}

fn aberth(p: &Polynomial) -> Vec<C64> {
    let n = p.degree().unwrap_or(0);
    let mut z = initial_guesses(p);
    debug_assert_eq!(z.len(), n);
    let abs_coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.norm()).collect();
    let mut done = vec![false; n];
    for _ in 0..ABERTH_MAX_ITER {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[k]);
            // Backward-error stop: the value is at rounding level of the terms.
            let r = z[k].norm();
            let bound = abs_coeffs.iter().rev().fold(0.0, |acc, &a| acc * r + a);
            if v.norm() <= 4.0 * f64::EPSILON * bound {
                done[k] = true;
                continue;
            }
            let ratio = v / dv;
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    sum += (z[k] - z[j]).inv();
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[k] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[k].norm() {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    z
}

fn newton_polish(p: &Polynomial, mut z: C64) -> C64 {
    let mut best = p.eval(z).norm();
    for _ in 0..8 {
        let (v, dv) = p.eval_with_derivative(z);
        if dv.norm() == 0.0 {
            break;
        }
        let next = z - v / dv;
        let r = p.eval(next).norm();
        if !(r < best) {
            break;
        }
        best = r;
        z = next;
    }
    z
}

/// Eigenvalues of the companion matrix of `p` (degree >= 1).
fn companion_eigenvalues(p: &Polynomial) -> Result<Vec<C64>> {
    let c = p.coeffs();
    let n = c.len() - 1;
    let lead = c[n];
    let mut h = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        h[j] = -c[n - 1 - j] / lead;
    }
    for i in 1..n {
        h[i * n + i - 1] = C64::new(1.0, 0.0);
    }
    hessenberg_eigenvalues(&mut h, n)
}

/// Single-shift complex QR on an upper Hessenberg matrix stored row-major.
fn hessenberg_eigenvalues(h: &mut [C64], n: usize) -> Result<Vec<C64>> {
    let idx = |i: usize, j: usize| i * n + j;
    let mut eig = Vec::with_capacity(n);
    let mut hi = n;
    let mut iter = 0usize;
    let mut rot: Vec<(C64, C64)> = vec![(C64::default(), C64::default()); n];
    while hi > 0 {
        if hi == 1 {
            eig.push(h[idx(0, 0)]);
            break;
        }
        let mut l = hi - 1;
        while l > 0 {
            let sub = h[idx(l, l - 1)].norm();
            let diag = h[idx(l, l)].norm() + h[idx(l - 1, l - 1)].norm();
            if sub <= f64::EPSILON * diag.max(f64::MIN_POSITIVE) {
                h[idx(l, l - 1)] = C64::default();
                break;
            }
            l -= 1;
        }
        if l == hi - 1 {
            eig.push(h[idx(hi - 1, hi - 1)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > QR_MAX_ITER_PER_EIGENVALUE {
            return Err(Error::NonConvergence {
                residual: h[idx(hi - 1, hi - 2)].norm(),
            });
        }
        // Wilkinson shift from the trailing 2x2 block.
        let a = h[idx(hi - 2, hi - 2)];
        let b = h[idx(hi - 2, hi - 1)];
        let c = h[idx(hi - 1, hi - 2)];
        let d = h[idx(hi - 1, hi - 1)];
        let half = (a - d) * 0.5;
        let disc = (half * half + b * c).sqrt();
        let mu1 = (a + d) * 0.5 + disc;
        let mu2 = (a + d) * 0.5 - disc;
        let mut mu = if (mu1 - d).norm() < (mu2 - d).norm() { mu1 } else { mu2 };
        if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            mu += C64::new(0.75, 0.5) * h[idx(hi - 1, hi - 2)].norm();
        }
        for k in l..hi {
            h[idx(k, k)] -= mu;
        }
        for k in l..hi - 1 {
            let x = h[idx(k, k)];
            let y = h[idx(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (C64::new(1.0, 0.0), C64::default())
            } else {
                (x / r, y / r)
            };
            rot[k] = (cs, sn);
            for j in k..hi {
                let u = h[idx(k, j)];
                let v = h[idx(k + 1, j)];
                h[idx(k, j)] = cs.conj() * u + sn.conj() * v;
                h[idx(k + 1, j)] = -sn * u + cs * v;
            }
        }
        for k in l..hi - 1 {
            let (cs, sn) = rot[k];
            for i in l..(k + 2).min(hi) {
                let u = h[idx(i, k)];
                let v = h[idx(i, k + 1)];
                h[idx(i, k)] = u * cs + v * sn;
                h[idx(i, k + 1)] = -u * sn.conj() + v * cs.conj();
            }
        }
        for k in l..hi {
            h[idx(k, k)] += mu;
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted_by_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn quadratic_roots() {
        let p = Polynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = sorted_by_re(p.roots().unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cube_roots_of_unity() {
        let p = Polynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 3);
        for k in 0..3 {
            let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
            assert!(r.iter().any(|z| (z - w).norm() < 1e-12), "missing {w}");
        }
    }

    #[test]
    fn double_root_is_clustered() {
        let p = Polynomial::from_roots(&[c(3.0, 0.0), c(3.0, 0.0), c(-1.0, 0.0)]);
        let r = p.roots().unwrap();
        let r = sorted_by_re(r);
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-6);
        assert!((r[1] - c(3.0, 0.0)).norm() < 1e-6);
        assert!((r[2] - c(3.0, 0.0)).norm() < 1e-6);
        let clusters = cluster_roots(&r, 1e-6);
        assert_eq!(clusters.len(), 2);
        assert!(clusters.iter().any(|&(z, m)| m == 2 && (z - c(3.0, 0.0)).norm() < 1e-6));
    }

    #[test]
    fn zero_roots_are_split_off() {
        let p = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.0), c(1.0, 0.0)]);
        let r = sorted_by_re(p.roots().unwrap());
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], c(0.0, 0.0));
        assert!((r[2] - c(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn wide_dynamic_range() {
        let roots = [c(1e-4, 0.0), c(2.0, 1.0), c(-3e5, 0.0), c(1e4, 1e4)];
        let p = Polynomial::from_roots(&roots);
        let r = p.roots().unwrap();
        for z in roots {
            assert!(
                r.iter().any(|w| (w - z).norm() <= 1e-8 * z.norm().max(1.0)),
                "missing {z}"
            );
        }
    }

    #[test]
    fn companion_fallback_agrees() {
        let p = Polynomial::from_roots(&[c(1.0, 2.0), c(-0.5, 0.0), c(4.0, -1.0), c(0.0, 3.0)]);
        let e = companion_eigenvalues(&p).unwrap();
        for z in p.roots().unwrap() {
            assert!(e.iter().any(|w| (w - z).norm() < 1e-9));
        }
    }

    #[test]
    fn constant_and_zero() {
        assert!(Polynomial::constant(c(2.0, 0.0)).roots().unwrap().is_empty());
        assert!(Polynomial::zero().roots().is_err());
    }
}
