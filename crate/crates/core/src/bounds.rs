//! Capacity bounds for the components of a good rational function: the
//! lower bounds `cap(K_i) >= |a_i|` and `cap(K) >= [Π_{i≠j}|p_i-p_j| Π|a_i|]^{1/d²}`,
//! the injectivity-radius upper bound, the ε-pole sweep and the
//! unbounded-ratio family.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these whenever std is linked
use num_traits::Float;

use crate::capacity::{cap_fekete, cap_panel, CapacityEstimate};
use crate::error::{Error, Result};
use crate::geometry::Polyline;
use crate::lemniscate::{trace, Lemniscate, TraceOptions};
use crate::ratfunc::{unbounded_ratio_family, RationalFunction};
use crate::rng::Stream;
use crate::C64;

/// Relative disagreement between the panel and Leja estimates that aborts a
/// verification.
pub const METHOD_AGREEMENT: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsOptions {
    pub trace: TraceOptions,
    /// Panels per component.
    pub panels: usize,
    pub leja_points: usize,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self {
            trace: TraceOptions::default(),
            panels: 256,
            leja_points: 128,
        }
    }
}

/// Slack allowed in an asserted inequality.
pub fn tolerance(error_indicator: f64) -> f64 {
    1e-3f64.max(3.0 * error_indicator)
}

/// `r⁶ / ((r² - 1)(r - 1)⁴)`.
pub fn injectivity_constant(r: f64) -> f64 {
    let r2 = r * r;
    r2 * r2 * r2 / ((r2 - 1.0) * (r - 1.0).powi(4))
}

/// Panel capacity checked against the Leja estimate.
pub fn checked_capacity(boundary: &[Polyline], panels: usize, leja_points: usize) -> Result<CapacityEstimate> {
    let (panel, _) = cap_panel(boundary, panels)?;
    let leja = cap_fekete(boundary, leja_points)?;
    if (panel.value - leja.value).abs() > METHOD_AGREEMENT * panel.value {
        return Err(Error::UnderResolution {
            panel: panel.value,
            leja: leja.value,
        });
    }
    Ok(panel)
}

fn good_trace(r: &RationalFunction, opts: &TraceOptions) -> Result<Lemniscate> {
    let crit = r.critical_data()?;
    if crit.moduli().any(|m| m >= 1.0) {
        return Err(Error::NotGood { level: 1.0 });
    }
    let lem = trace(r, 1.0, opts)?;
    if lem.components.len() != r.degree() || lem.components.iter().any(|c| c.poles.len() != 1) {
        return Err(Error::NotGood { level: 1.0 });
    }
    Ok(lem)
}

fn pole_component(lem: &Lemniscate, i: usize) -> Result<Polyline> {
    let c = lem
        .component_of_pole(i)
        .ok_or_else(|| Error::TopologyUnresolved("pole outside every component".into()))?;
    Ok(lem.curves[lem.components[c].outer].clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentBound {
    pub index: usize,
    pub cap: CapacityEstimate,
    pub residue_modulus: f64,
    /// `cap(K_i) / |a_i|`.
    pub ratio: f64,
    /// `cap(K_i) - |a_i|`.
    pub slack: f64,
    pub lower_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub per_component: Vec<ComponentBound>,
    pub whole: CapacityEstimate,
    pub product_bound: f64,
    pub whole_slack: f64,
    pub whole_ok: bool,
}

impl BoundsReport {
    pub fn all_ok(&self) -> bool {
        self.whole_ok && self.per_component.iter().all(|c| c.lower_ok)
    }

    /// Smallest slack over all asserted inequalities.
    pub fn min_slack(&self) -> f64 {
        self.per_component
            .iter()
            .map(|c| c.slack)
            .fold(self.whole_slack, f64::min)
    }
}

/// `[Π_{i≠j} |p_i - p_j| Π |a_i|]^{1/d²}`.
pub fn product_bound(r: &RationalFunction) -> f64 {
    let d = r.degree();
    let mut log = 0.0;
    for i in 0..d {
        log += r.residues()[i].norm().ln();
        for j in 0..d {
            if i != j {
                log += (r.poles()[i] - r.poles()[j]).norm().ln();
            }
        }
    }
    (log / (d * d) as f64).exp()
}

pub fn verify_lower_bounds(r: &RationalFunction, opts: &BoundsOptions) -> Result<BoundsReport> {
    let lem = good_trace(r, &opts.trace)?;
    let d = r.degree();
    let mut per_component = Vec::with_capacity(d);
    for i in 0..d {
        let curve = pole_component(&lem, i)?;
        let cap = checked_capacity(&[curve], opts.panels, opts.leja_points)?;
        let a = r.residues()[i].norm();
        let slack = cap.value - a;
        per_component.push(ComponentBound {
            index: i,
            cap,
            residue_modulus: a,
            ratio: cap.value / a,
            slack,
            lower_ok: slack >= -tolerance(cap.error_indicator),
        });
    }
    let whole = checked_capacity(&lem.outer_boundary(), opts.panels.max(128 * d), opts.leja_points)?;
    let bound = product_bound(r);
    let whole_slack = whole.value - bound;
    Ok(BoundsReport {
        per_component,
        whole,
        product_bound: bound,
        whole_slack,
        whole_ok: whole_slack >= -tolerance(whole.error_indicator),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivityCertificate {
    pub index: usize,
    pub r_star: f64,
    pub constant: f64,
}

/// Upper end of the radius search.
pub const RADIUS_LIMIT: f64 = 64.0;
const RADIUS_GRID: usize = 40;
const BISECTIONS: usize = 10;

/// Does the component of `{|R| >= 1/r}` around pole `i` hold exactly one
/// pole and no critical point? Any tracing failure counts as a no.
fn radius_passes(r: &RationalFunction, i: usize, radius: f64, crit: &[C64], opts: &TraceOptions) -> bool {
    let Ok(lem) = trace(r, 1.0 / radius, opts) else {
        return false;
    };
    let Some(c) = lem.component_of_pole(i) else {
        return false;
    };
    if lem.components[c].poles.len() != 1 {
        return false;
    }
    crit.iter()
        .all(|&z| matches!(lem.contains_point(z), Ok(k) if k != Some(c)))
}

/// Largest `r` on a geometric grid from `1 + margin` to [`RADIUS_LIMIT`]
/// (refined by bisection) whose level set certifies injectivity around pole
/// `i`.
pub fn certify_injectivity_radius(
    r: &RationalFunction,
    i: usize,
    margin: f64,
    opts: &TraceOptions,
) -> Result<InjectivityCertificate> {
    if i >= r.degree() {
        return Err(Error::DegenerateInput("pole index out of range".into()));
    }
    let crit = r.critical_data()?.points;
    let lo = 1.0 + margin;
    let grid: Vec<f64> = (0..RADIUS_GRID)
        .map(|k| lo * (RADIUS_LIMIT / lo).powf(k as f64 / (RADIUS_GRID - 1) as f64))
        .collect();
    let pass = |x: f64| radius_passes(r, i, x, &crit, opts);
    if !pass(grid[0]) {
        return Err(Error::NoRadiusFound { index: i });
    }
    // Passing radii form an initial run of the grid.
    let (mut good, mut bad) = (0usize, RADIUS_GRID);
    while bad - good > 1 {
        let mid = (good + bad) / 2;
        if pass(grid[mid]) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    let mut r_star = grid[good];
    if bad < RADIUS_GRID {
        let mut hi = grid[bad];
        for _ in 0..BISECTIONS {
            let mid = (r_star * hi).sqrt();
            if pass(mid) {
                r_star = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok(InjectivityCertificate {
        index: i,
        r_star,
        constant: injectivity_constant(r_star),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBoundReport {
    pub certificate: InjectivityCertificate,
    pub cap: CapacityEstimate,
    /// `c(r*) |a_i|`.
    pub bound: f64,
    pub slack: f64,
    pub ok: bool,
}

pub fn verify_upper_bound(
    r: &RationalFunction,
    certificate: &InjectivityCertificate,
    opts: &BoundsOptions,
) -> Result<UpperBoundReport> {
    let lem = good_trace(r, &opts.trace)?;
    let curve = pole_component(&lem, certificate.index)?;
    let cap = checked_capacity(&[curve], opts.panels, opts.leja_points)?;
    let bound = certificate.constant * r.residues()[certificate.index].norm();
    let slack = bound - cap.value;
    Ok(UpperBoundReport {
        certificate: *certificate,
        cap,
        bound,
        slack,
        ok: slack >= -tolerance(cap.error_indicator),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonRow {
    pub epsilon: f64,
    pub cap: CapacityEstimate,
    /// `cap(K_ε) / ε`.
    pub ratio: f64,
    pub certificate: InjectivityCertificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSweep {
    pub rows: Vec<EpsilonRow>,
}

impl EpsilonSweep {
    /// `max / min` of the ratio column.
    pub fn spread(&self) -> f64 {
        let max = self.rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        let min = self.rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Every ratio below the constant of its own certificate.
    pub fn within_bound(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.ratio <= r.certificate.constant + tolerance(r.cap.error_indicator) / r.epsilon)
    }
}

/// Add the pole `ε/(z - p)` to `R` for each `ε` and measure the new
/// component. The certificate is computed for the added pole of `R_ε`.
pub fn epsilon_sweep(r: &RationalFunction, p: C64, eps_list: &[f64], opts: &BoundsOptions) -> Result<EpsilonSweep> {
    if !(r.eval(p)?.norm() < 1.0) {
        return Err(Error::DegenerateInput("the new pole must satisfy |R(p)| < 1".into()));
    }
    let d = r.degree();
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let re = r.with_extra_pole(p, C64::new(eps, 0.0))?;
        let lem = good_trace(&re, &opts.trace).map_err(|e| match e {
            Error::NotGood { .. } => Error::NotGoodAtEpsilon { epsilon: eps },
            other => other,
        })?;
        let curve = pole_component(&lem, d)?;
        let cap = checked_capacity(&[curve], opts.panels, opts.leja_points)?;
        let certificate = certify_injectivity_radius(&re, d, 1e-3, &opts.trace)?;
        rows.push(EpsilonRow {
            epsilon: eps,
            cap,
            ratio: cap.value / eps,
            certificate,
        });
    }
    Ok(EpsilonSweep { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleRow {
    pub p: f64,
    pub good: bool,
    pub max_critical_modulus: f64,
    /// Largest relative error of the critical points against
    /// `{-p, p - a^{1/3} ω p^{2/3}}`.
    pub asymptotic_error: f64,
    pub segment_contained: Option<bool>,
    pub cap: Option<CapacityEstimate>,
    /// `a p^{1-η} / 8`.
    pub lower: f64,
    /// `cap / a`.
    pub ratio: Option<f64>,
}

impl CounterexampleRow {
    pub fn cap_ok(&self) -> bool {
        self.cap
            .is_some_and(|c| c.value - self.lower >= -tolerance(c.error_indicator))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleTable {
    pub a: f64,
    pub eta: f64,
    pub rows: Vec<CounterexampleRow>,
}

impl CounterexampleTable {
    /// Smallest tested `p` at which the family was good.
    pub fn smallest_good_p(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.good)
            .map(|r| r.p)
            .fold(None, |m, p| Some(m.map_or(p, |q: f64| q.min(p))))
    }

    /// Ratio column strictly increasing over the good rows, in the order given.
    pub fn ratio_increasing(&self) -> bool {
        let ratios: Vec<f64> = self.rows.iter().filter_map(|r| r.ratio).collect();
        ratios.len() == self.rows.len() && ratios.windows(2).all(|w| w[1] > w[0])
    }

    /// Asymptotic error strictly decreasing in the order given.
    pub fn asymptotics_improve(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].asymptotic_error < w[0].asymptotic_error)
    }
}

/// Relative error of the critical points against their large-`p` form.
pub fn critical_asymptotic_error(r: &RationalFunction, a: f64, p: f64) -> Result<f64> {
    let crit = r.critical_data()?.points;
    let scale = a.cbrt() * p.powf(2.0 / 3.0);
    let mut predicted = alloc::vec![C64::new(-p, 0.0)];
    for k in 0..3 {
        let omega = C64::from_polar(1.0, 2.0 * core::f64::consts::PI * k as f64 / 3.0);
        predicted.push(C64::new(p, 0.0) - omega * scale);
    }
    if crit.len() != predicted.len() {
        return Err(Error::DegenerateInput("unexpected number of critical points".into()));
    }
    let mut used = [false; 4];
    let mut worst: f64 = 0.0;
    for q in &predicted {
        let (k, dist) = crit
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, c)| (k, (c - q).norm()))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        used[k] = true;
        worst = worst.max(dist / q.norm());
    }
    Ok(worst)
}

pub fn counterexample_experiment(
    a: f64,
    eta: f64,
    p_list: &[f64],
    opts: &BoundsOptions,
) -> Result<CounterexampleTable> {
    if !(a > 0.0) || !(eta > 2.0 / 3.0 && eta < 1.0) {
        return Err(Error::DegenerateInput("need a > 0 and 2/3 < eta < 1".into()));
    }
    let mut rows = Vec::with_capacity(p_list.len());
    for &p in p_list {
        if !(p > 1.0) {
            return Err(Error::DegenerateInput("need p > 1".into()));
        }
        let r = unbounded_ratio_family(a, eta, p)?;
        let crit = r.critical_data()?;
        let max_mod = crit.max_modulus().unwrap_or(0.0);
        let asymptotic_error = critical_asymptotic_error(&r, a, p)?;
        let lower = a * p.powf(1.0 - eta) / 8.0;
        let mut row = CounterexampleRow {
            p,
            good: false,
            max_critical_modulus: max_mod,
            asymptotic_error,
            segment_contained: None,
            cap: None,
            lower,
            ratio: None,
        };
        if let Ok(lem) = good_trace(&r, &opts.trace) {
            row.good = true;
            let z0 = C64::new(p, 0.0);
            let z1 = C64::new(p + a * p.powf(1.0 - eta) / 2.0, 0.0);
            row.segment_contained = Some(lem.contains_segment(z0, z1, 64)?);
            let curve = pole_component(&lem, 0)?;
            let cap = checked_capacity(&[curve], opts.panels, opts.leja_points)?;
            row.ratio = Some(cap.value / a);
            row.cap = Some(cap);
        }
        rows.push(row);
    }
    Ok(CounterexampleTable { a, eta, rows })
}

/// Random good function of degree `d`: poles in `[-5, 5]²` at least 1 apart,
/// residue moduli in `[0.5, 2]` with random phases, residues shrunk by 0.8
/// until every critical value has modulus below 0.97.
pub fn random_good_function(d: usize, seed: u64, index: u32) -> Result<RationalFunction> {
    let mut rng = Stream::new(seed, 0xB0_0D, index);
    let mut poles: Vec<C64> = Vec::with_capacity(d);
    while poles.len() < d {
        let z = C64::new(10.0 * rng.uniform() - 5.0, 10.0 * rng.uniform() - 5.0);
        if poles.iter().all(|p| (p - z).norm() >= 1.0) {
            poles.push(z);
        }
    }
    let mut residues: Vec<C64> = (0..d)
        .map(|_| C64::from_polar(0.5 + 1.5 * rng.uniform(), 2.0 * core::f64::consts::PI * rng.uniform()))
        .collect();
    for _ in 0..200 {
        let r = RationalFunction::new(poles.clone(), residues.clone())?;
        if r.critical_data()?.max_modulus().unwrap_or(0.0) < 0.97 {
            return Ok(r);
        }
        for a in residues.iter_mut() {
            *a *= 0.8;
        }
    }
    Err(Error::DegenerateInput("could not make the function good".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_poles() -> RationalFunction {
        RationalFunction::from_pairs(&[(2.0, 0.0), (-2.0, 0.0)], &[(1.0, 0.0), (1.0, 0.0)]).unwrap()
    }

    #[test]
    fn constant_at_two() {
        assert_eq!(injectivity_constant(2.0), 64.0 / 3.0);
        assert!(injectivity_constant(1.0 + 1e-6) > 1e20);
    }

    #[test]
    fn single_pole_equality() {
        let r = RationalFunction::from_pairs(&[(0.5, -1.0)], &[(3.0, 0.0)]).unwrap();
        let rep = verify_lower_bounds(&r, &BoundsOptions::default()).unwrap();
        assert!((rep.per_component[0].cap.value - 3.0).abs() < 1e-3);
        assert!(rep.all_ok());
        assert!((rep.product_bound - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_pole_lower_bounds() {
        let rep = verify_lower_bounds(&two_poles(), &BoundsOptions::default()).unwrap();
        assert!(rep.all_ok());
        assert!((rep.product_bound - 2.0).abs() < 1e-12);
        for c in &rep.per_component {
            assert!(c.cap.value >= 1.0);
        }
        assert!(rep.whole.value >= 2.0);
    }

    #[test]
    fn rescaled_level_bound() {
        // K_{i,t} for R is K_i for R/t.
        let t = 0.8;
        let r = two_poles();
        let rep = verify_lower_bounds(&r.scaled(C64::new(1.0 / t, 0.0)).unwrap(), &BoundsOptions::default()).unwrap();
        for c in &rep.per_component {
            assert!(t * c.cap.value >= 1.0 - 1e-3);
        }
    }

    #[test]
    fn radius_of_two_pole_function() {
        let cert = certify_injectivity_radius(&two_poles(), 0, 1e-3, &TraceOptions::default()).unwrap();
        assert!(cert.r_star < 2.0 && cert.r_star > 1.9, "{cert:?}");
        let one = RationalFunction::from_pairs(&[(0.0, 0.0)], &[(1.0, 0.0)]).unwrap();
        let cert = certify_injectivity_radius(&one, 0, 1e-3, &TraceOptions::default()).unwrap();
        assert_eq!(cert.r_star, RADIUS_LIMIT);
    }

    #[test]
    fn upper_bound_holds() {
        let r = two_poles();
        let cert = InjectivityCertificate {
            index: 0,
            r_star: 1.9,
            constant: injectivity_constant(1.9),
        };
        let rep = verify_upper_bound(&r, &cert, &BoundsOptions::default()).unwrap();
        assert!(rep.ok && rep.slack > 0.0);
    }

    #[test]
    fn lone_small_pole_has_capacity_epsilon() {
        let eps = 1e-2;
        let r = RationalFunction::from_pairs(&[(0.0, 0.0)], &[(eps, 0.0)]).unwrap();
        let rep = verify_lower_bounds(&r, &BoundsOptions::default()).unwrap();
        assert!((rep.per_component[0].cap.value / eps - 1.0).abs() < 1e-4);
    }

    #[test]
    fn random_family_is_good() {
        for k in 0..5 {
            let r = random_good_function(1 + k % 4, 42, k as u32).unwrap();
            assert!(r.critical_data().unwrap().max_modulus().unwrap_or(0.0) < 0.97);
        }
    }
}
