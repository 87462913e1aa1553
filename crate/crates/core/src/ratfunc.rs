//! Rational functions in partial-fraction form `R(z) = Σ a_i / (z - p_i)`.
//!
//! Poles and residues are the source of truth; the numerator/denominator
//! form is expanded on demand.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::poly::{cluster_roots, Polynomial};
use crate::C64;

/// Moments `Σ a_i p_i^k` smaller than this fraction of `Σ |a_i| |p_i|^k` count as zero.
const MOMENT_CANCELLATION: f64 = 1e-11;

/// Roots closer than this (relative) are reported as one multiple root.
pub const CLUSTER_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    poles: Vec<C64>,
    residues: Vec<C64>,
}

/// Zeros of `R` on the Riemann sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Zeros {
    /// Finite zeros, repeated according to multiplicity.
    pub finite: Vec<C64>,
    /// Order of the zero at infinity (`R(∞) = 0` always, so this is >= 1).
    pub order_at_infinity: usize,
}

/// Finite critical points and the values of `R` there, index aligned.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CriticalData {
    pub points: Vec<C64>,
    pub values: Vec<C64>,
}

impl CriticalData {
    pub fn moduli(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|v| v.norm())
    }

    pub fn max_modulus(&self) -> Option<f64> {
        self.moduli().reduce(f64::max)
    }
}

impl RationalFunction {
    pub fn new(poles: Vec<C64>, residues: Vec<C64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::InvalidFunction("at least one pole is required".into()));
        }
        if poles.len() != residues.len() {
            return Err(Error::InvalidFunction(format!(
                "{} poles but {} residues",
                poles.len(),
                residues.len()
            )));
        }
        for (i, z) in poles.iter().chain(residues.iter()).enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidFunction(format!("non-finite entry #{i}")));
            }
        }
        if let Some(i) = residues.iter().position(|a| a.norm() == 0.0) {
            return Err(Error::InvalidFunction(format!("residue {i} is zero")));
        }
        for i in 0..poles.len() {
            for j in i + 1..poles.len() {
                if (poles[i] - poles[j]).norm() == 0.0 {
                    return Err(Error::InvalidFunction(format!("poles {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { poles, residues })
    }

    /// Convenience constructor from real-and-imaginary pairs.
    pub fn from_pairs(poles: &[(f64, f64)], residues: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            poles.iter().map(|&(re, im)| C64::new(re, im)).collect(),
            residues.iter().map(|&(re, im)| C64::new(re, im)).collect(),
        )
    }

    pub fn degree(&self) -> usize {
        self.poles.len()
    }

    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    pub fn residues(&self) -> &[C64] {
        &self.residues
    }

    /// Radius around pole `i` inside which evaluation is refused.
    pub fn guard_radius(&self, i: usize) -> f64 {
        1e-12 * (1.0 + self.poles[i].norm())
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        for (i, p) in self.poles.iter().enumerate() {
            if (z - p).norm() < self.guard_radius(i) {
                return Err(Error::PoleProximity { index: i });
            }
        }
        Ok(self.eval_unchecked(z))
    }

    /// Compensated sum of the partial fractions, no pole guard.
    pub fn eval_unchecked(&self, z: C64) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        let mut comp = C64::new(0.0, 0.0);
        for (a, p) in self.residues.iter().zip(&self.poles) {
            let term = a / (z - p);
            let t = sum + term;
            comp.re += neumaier(sum.re, term.re, t.re);
            comp.im += neumaier(sum.im, term.im, t.im);
            sum = t;
        }
        sum + comp
    }

    pub fn derivative(&self, z: C64) -> C64 {
        self.residues
            .iter()
            .zip(&self.poles)
            .map(|(a, p)| {
                let w = z - p;
                -a / (w * w)
            })
            .sum()
    }

    pub fn second_derivative(&self, z: C64) -> C64 {
        self.residues
            .iter()
            .zip(&self.poles)
            .map(|(a, p)| {
                let w = z - p;
                a * 2.0 / (w * w * w)
            })
            .sum()
    }

    /// `log|R(z)|` and its gradient written as a complex number
    /// (`conj(R'/R)`).
    pub fn log_modulus_gradient(&self, z: C64) -> (f64, C64) {
        let r = self.eval_unchecked(z);
        let dr = self.derivative(z);
        (r.norm().ln(), (dr / r).conj())
    }

    /// `(numerator, denominator)` with `denominator = Π (z - p_i)`.
    pub fn as_fraction(&self) -> (Polynomial, Polynomial) {
        let den = Polynomial::from_roots(&self.poles);
        let mut num = Polynomial::zero();
        for i in 0..self.degree() {
            let others: Vec<C64> = self
                .poles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &p)| p)
                .collect();
            num = num.add(&Polynomial::from_roots(&others).scale(self.residues[i]));
        }
        (num, den)
    }

    /// Laurent coefficient `Σ a_i p_i^k` of `z^{-k-1}` at infinity, with the
    /// magnitude of its terms.
    fn moment(&self, k: usize) -> (C64, f64) {
        let mut m = C64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (a, p) in self.residues.iter().zip(&self.poles) {
            let term = a * p.powu(k as u32);
            m += term;
            mag += term.norm();
        }
        (m, mag)
    }

    /// Order `m` of the zero at infinity and `c_m = lim z^m R(z)`.
    pub fn leading_coefficient_at_infinity(&self) -> Result<(usize, C64)> {
        for k in 0..self.degree() {
            let (m, mag) = self.moment(k);
            if m.norm() > MOMENT_CANCELLATION * mag {
                return Ok((k + 1, m));
            }
        }
        Err(Error::DegenerateInput("all Laurent moments at infinity vanish".into()))
    }

    pub fn zeros(&self) -> Result<Zeros> {
        let (m, _) = self.leading_coefficient_at_infinity()?;
        let d = self.degree();
        let (num, _) = self.as_fraction();
        let num = num.truncate_degree(d - m);
        let mut finite = num.roots()?;
        for z in finite.iter_mut() {
            *z = self.polish(*z, |r, w| {
                let v = r.eval_unchecked(w);
                let dv = r.derivative(w);
                (v, dv)
            });
        }
        Ok(Zeros {
            finite,
            order_at_infinity: m,
        })
    }

    /// Distinct finite zeros with multiplicities.
    pub fn distinct_zeros(&self) -> Result<Vec<(C64, usize)>> {
        Ok(cluster_roots(&self.zeros()?.finite, CLUSTER_TOLERANCE))
    }

    /// Numerator of `R'` over the denominator `Π (z - p_i)^2`:
    /// `-Σ a_i Π_{j≠i} (z - p_j)^2`, truncated to its exact degree.
    pub fn derivative_numerator(&self) -> Result<Polynomial> {
        let (m, _) = self.leading_coefficient_at_infinity()?;
        let d = self.degree();
        let mut num = Polynomial::zero();
        for i in 0..d {
            let mut sq = Vec::with_capacity(2 * d);
            for (j, &p) in self.poles.iter().enumerate() {
                if j != i {
                    sq.push(p);
                    sq.push(p);
                }
            }
            num = num.add(&Polynomial::from_roots(&sq).scale(-self.residues[i]));
        }
        Ok(num.truncate_degree(2 * d - m - 1))
    }

    pub fn critical_data(&self) -> Result<CriticalData> {
        let num = self.derivative_numerator()?;
        if num.degree().unwrap_or(0) == 0 {
            return Ok(CriticalData::default());
        }
        let mut points = num.roots()?;
        for c in points.iter_mut() {
            *c = self.polish(*c, |r, w| (r.derivative(w), r.second_derivative(w)));
        }
        let values = points.iter().map(|&c| self.eval_unchecked(c)).collect();
        Ok(CriticalData { points, values })
    }

    /// Newton on `f/f'` for a few steps, keeping the best iterate.
    fn polish<F>(&self, mut z: C64, f: F) -> C64
    where
        F: Fn(&Self, C64) -> (C64, C64),
    {
        let (mut v, _) = f(self, z);
        for _ in 0..6 {
            let (val, dval) = f(self, z);
            if dval.norm() == 0.0 || !val.re.is_finite() {
                break;
            }
            let next = z - val / dval;
            let (nv, _) = f(self, next);
            if !(nv.norm() < v.norm()) {
                break;
            }
            v = nv;
            z = next;
        }
        z
    }

    /// `z ↦ R(λ z + b)`.
    pub fn compose_affine(&self, lambda: C64, b: C64) -> Result<Self> {
        if lambda.norm() == 0.0 {
            return Err(Error::DegenerateInput("zero scaling".into()));
        }
        Self::new(
            self.poles.iter().map(|p| (p - b) / lambda).collect(),
            self.residues.iter().map(|a| a / lambda).collect(),
        )
    }

    /// `s · R`.
    pub fn scaled(&self, s: C64) -> Result<Self> {
        Self::new(self.poles.clone(), self.residues.iter().map(|a| a * s).collect())
    }

    /// `R(z) + ε / (z - p)`; the new pole is appended last.
    pub fn with_extra_pole(&self, p: C64, residue: C64) -> Result<Self> {
        let mut poles = self.poles.clone();
        let mut residues = self.residues.clone();
        poles.push(p);
        residues.push(residue);
        Self::new(poles, residues)
    }

    /// `Σ |a_i|`, which bounds `|R(z)| · dist(z, poles)`.
    pub fn residue_mass(&self) -> f64 {
        self.residues.iter().map(|a| a.norm()).sum()
    }

    /// Index of the nearest pole and its distance.
    pub fn nearest_pole(&self, z: C64) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.poles.iter().enumerate() {
            let d = (z - p).norm();
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }
}

fn neumaier(sum: f64, term: f64, t: f64) -> f64 {
    if sum.abs() >= term.abs() {
        (sum - t) + term
    } else {
        (term - t) + sum
    }
}

/// The degree-3 family `a/(z-p) + (p-p^η)/(z-ip) + (p-p^η)/(z+ip)`.
pub fn unbounded_ratio_family(a: f64, eta: f64, p: f64) -> Result<RationalFunction> {
    let b = p - p.powf(eta);
    RationalFunction::new(
        vec![C64::new(p, 0.0), C64::new(0.0, p), C64::new(0.0, -p)],
        vec![C64::new(a, 0.0), C64::new(b, 0.0), C64::new(b, 0.0)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn two_pole() -> RationalFunction {
        RationalFunction::from_pairs(&[(2.0, 0.0), (-2.0, 0.0)], &[(1.0, 0.0), (1.0, 0.0)]).unwrap()
    }

    fn dipole() -> RationalFunction {
        RationalFunction::from_pairs(&[(1.0, 0.0), (-1.0, 0.0)], &[(1.0, 0.0), (-1.0, 0.0)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let r = RationalFunction::from_pairs(&[(0.0, 0.0)], &[(1.0, 0.0)]).unwrap();
        assert_eq!(r.eval(c(2.0, 0.0)).unwrap(), c(0.5, 0.0));
        assert_eq!(two_pole().eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let v = two_pole().eval(c(0.0, 2.0)).unwrap();
        assert!((v - c(0.0, -0.5)).norm() < 1e-15);
        assert!((v.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eval_refuses_pole() {
        let r = two_pole();
        assert_eq!(r.eval(c(2.0, 1e-14)), Err(Error::PoleProximity { index: 0 }));
        assert!(r.eval(c(2.0, 1e-6)).is_ok());
    }

    #[test]
    fn invalid_inputs() {
        assert!(RationalFunction::new(vec![], vec![]).is_err());
        assert!(RationalFunction::from_pairs(&[(0.0, 0.0)], &[(0.0, 0.0)]).is_err());
        assert!(RationalFunction::from_pairs(&[(1.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (2.0, 0.0)]).is_err());
        assert!(RationalFunction::from_pairs(&[(1.0, 0.0)], &[(1.0, 0.0), (2.0, 0.0)]).is_err());
    }

    #[test]
    fn fraction_examples() {
        let r = RationalFunction::from_pairs(&[(0.0, 0.0)], &[(1.0, 0.0)]).unwrap();
        let (n, d) = r.as_fraction();
        assert_eq!(n.coeffs(), &[c(1.0, 0.0)]);
        assert_eq!(d.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0)]);

        let (n, d) = two_pole().as_fraction();
        assert_eq!(n.coeffs(), &[c(0.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(d.coeffs(), &[c(-4.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);

        let (n, d) = dipole().as_fraction();
        assert_eq!(n.coeffs(), &[c(2.0, 0.0)]);
        assert_eq!(d.coeffs(), &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn zeros_examples() {
        let z = two_pole().zeros().unwrap();
        assert_eq!(z.order_at_infinity, 1);
        assert_eq!(z.finite.len(), 1);
        assert!(z.finite[0].norm() < 1e-14);

        let z = dipole().zeros().unwrap();
        assert!(z.finite.is_empty());
        assert_eq!(z.order_at_infinity, 2);

        let z = RationalFunction::from_pairs(&[(0.0, 0.0)], &[(5.0, 0.0)])
            .unwrap()
            .zeros()
            .unwrap();
        assert!(z.finite.is_empty());
        assert_eq!(z.order_at_infinity, 1);
    }

    #[test]
    fn critical_examples() {
        let r = RationalFunction::from_pairs(&[(0.0, 0.0)], &[(1.0, 0.0)]).unwrap();
        assert!(r.critical_data().unwrap().points.is_empty());

        let cd = two_pole().critical_data().unwrap();
        assert_eq!(cd.points.len(), 2);
        for target in [c(0.0, 2.0), c(0.0, -2.0)] {
            assert!(cd.points.iter().any(|p| (p - target).norm() < 1e-12));
        }
        for m in cd.moduli() {
            assert!((m - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_points_of_unbounded_ratio_family() {
        let p = 1e4;
        let r = unbounded_ratio_family(1.0, 0.75, p).unwrap();
        let cd = r.critical_data().unwrap();
        assert_eq!(cd.points.len(), 4);
        // One root at -p + O(1).
        assert!(cd.points.iter().any(|c| (c - C64::new(-p, 0.0)).norm() < 1.0));
        // Three roots at p - ω p^{2/3} + O(p^{(η+1)/3}).
        let offset = p.powf(2.0 / 3.0);
        let err_scale = p.powf(1.75 / 3.0);
        for k in 0..3 {
            let omega = C64::from_polar(1.0, 2.0 * core::f64::consts::PI * k as f64 / 3.0);
            let target = C64::new(p, 0.0) - omega * offset;
            assert!(cd.points.iter().any(|c| (c - target).norm() < err_scale));
        }
        for c in &cd.points {
            let scale: f64 = r
                .poles()
                .iter()
                .zip(r.residues())
                .map(|(p, a)| a.norm() / (c - p).norm_sqr())
                .sum();
            assert!(r.derivative(*c).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn leading_coefficient_examples() {
        assert_eq!(two_pole().leading_coefficient_at_infinity().unwrap(), (1, c(2.0, 0.0)));
        assert_eq!(dipole().leading_coefficient_at_infinity().unwrap(), (2, c(2.0, 0.0)));
        let r = RationalFunction::from_pairs(&[(0.0, 0.0)], &[(5.0, 0.0)]).unwrap();
        assert_eq!(r.leading_coefficient_at_infinity().unwrap(), (1, c(5.0, 0.0)));
    }

    fn arb_function(max_d: usize) -> impl Strategy<Value = RationalFunction> {
        (1..=max_d)
            .prop_flat_map(|d| {
                (
                    proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), d),
                    proptest::collection::vec((0.2..2.0f64, 0.0..core::f64::consts::TAU), d),
                )
            })
            .prop_filter_map("poles too close", |(poles, res)| {
                let poles: Vec<C64> = poles.iter().map(|&(x, y)| C64::new(x, y)).collect();
                for i in 0..poles.len() {
                    for j in i + 1..poles.len() {
                        if (poles[i] - poles[j]).norm() < 0.05 {
                            return None;
                        }
                    }
                }
                let res = res.iter().map(|&(m, t)| C64::from_polar(m, t)).collect();
                RationalFunction::new(poles, res).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn zero_count_matches_degree(r in arb_function(8)) {
            let z = r.zeros().unwrap();
            prop_assert_eq!(z.finite.len() + z.order_at_infinity, r.degree());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn fraction_matches_partial_fractions(r in arb_function(6), x in -6.0..6.0f64, y in -6.0..6.0f64) {
            let z = C64::new(x, y);
            prop_assume!(r.nearest_pole(z).1 > 1e-2);
            let (n, d) = r.as_fraction();
            let direct = r.eval(z).unwrap();
            let frac = n.eval(z) / d.eval(z);
            prop_assert!((direct - frac).norm() <= 1e-10 * direct.norm().max(1e-3));
        }

        #[test]
        fn critical_point_count(r in arb_function(6)) {
            let (m, _) = r.leading_coefficient_at_infinity().unwrap();
            prop_assume!(m == 1);
            let cd = r.critical_data().unwrap();
            prop_assert_eq!(cd.points.len(), 2 * r.degree() - 2);
        }

        #[test]
        fn critical_points_move_with_affine_maps(
            r in arb_function(5),
            lr in 0.5..2.0f64, lt in 0.0..core::f64::consts::TAU,
            bx in -2.0..2.0f64, by in -2.0..2.0f64,
        ) {
            let (m, _) = r.leading_coefficient_at_infinity().unwrap();
            prop_assume!(m == 1 && r.degree() >= 2);
            let lambda = C64::from_polar(lr, lt);
            let b = C64::new(bx, by);
            let s = r.compose_affine(lambda, b).unwrap();
            let base = r.critical_data().unwrap();
            let moved = s.critical_data().unwrap();
            // Skip near-coalescing critical points; their matching is ill-posed.
            let sep = base.points.iter().enumerate().flat_map(|(i, a)| {
                base.points.iter().skip(i + 1).map(move |b| (a - b).norm())
            }).fold(f64::INFINITY, f64::min);
            prop_assume!(sep > 1e-3);
            for c in &base.points {
                let target = (c - b) / lambda;
                let best = moved.points.iter().map(|w| (w - target).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best <= 1e-8 * target.norm().max(1.0), "{} vs {}", best, target);
            }
        }
    }

    #[test]
    fn root_residuals_for_numerators() {
        let r = unbounded_ratio_family(1.0, 0.75, 1e3).unwrap();
        let num = r.derivative_numerator().unwrap();
        let roots = num.roots().unwrap();
        for z in roots {
            assert!(num.root_residual_ok(z));
        }
    }
}
