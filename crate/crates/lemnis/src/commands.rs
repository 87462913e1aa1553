//! Subcommand implementations. Each writes its artifacts into the output
//! directory and returns an [`Outcome`].

use std::fmt::Write as _;
use std::fs;

use anyhow::{bail, Context, Result};
use lemnis_core::bounds::{self, CounterexampleTable, EpsilonSweep};
use lemnis_core::harmonic::{verify_reflection_on, ReflectionReport};
use lemnis_core::{
    cap_fekete, cap_panel, is_good, trace, wos, ArcPartition, CapacityEstimate, DomainSide, Lemniscate,
    RationalFunction, Source, SweepResult, C64,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::formats::{
    write_csv, write_json, write_text, EnergyJson, HarmonicJson, LemniscateJson, MeasureJson, ReflectionJson,
};
use crate::svg::{ramp, Figure, Layer};

/// Standard-error multiple used by the Monte Carlo assertions.
pub const K_SIGMA: f64 = 3.0;
/// Floor on the energy-term tolerance.
pub const ENERGY_TERM_TOLERANCE: f64 = 2e-2;
/// Floor on the total-energy tolerance.
pub const ENERGY_TOTAL_TOLERANCE: f64 = 5e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Reflection,
    Energy,
    Lower,
    Upper,
    Schwarz,
    Epsilon,
    Counterexample,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Reflection,
        Suite::Energy,
        Suite::Lower,
        Suite::Upper,
        Suite::Schwarz,
        Suite::Epsilon,
        Suite::Counterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Reflection => "reflection",
            Suite::Energy => "energy",
            Suite::Lower => "lower",
            Suite::Upper => "upper",
            Suite::Schwarz => "schwarz",
            Suite::Epsilon => "epsilon",
            Suite::Counterexample => "counterexample",
            Suite::All => "all",
        }
    }
}

/// How a command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// An asserted inequality or identity failed.
    Fail,
    /// A numerical step failed.
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    fn worst(self, other: Status) -> Status {
        if other.exit_code() > self.exit_code() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub summary: Value,
    pub text: String,
}

impl Outcome {
    fn pass_if(ok: bool, summary: Value, text: String) -> Self {
        Self {
            status: if ok { Status::Pass } else { Status::Fail },
            summary,
            text,
        }
    }
}

fn prepare(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))
}

fn lemniscate_figure<'a>(r: &RationalFunction, curves: &'a [lemnis_core::Polyline], title: String) -> Figure<'a> {
    Figure {
        layers: vec![Layer {
            curves,
            stroke: ramp(0, 1),
        }],
        poles: r.poles().to_vec(),
        zeros: r.zeros().map(|z| z.finite).unwrap_or_default(),
        title,
    }
}

pub fn cmd_trace(cfg: &RunConfig) -> Result<Outcome> {
    let r = cfg.function()?;
    prepare(cfg)?;
    let opts = cfg.trace_options();
    let lem = trace(r, cfg.t, &opts)?;
    let good = is_good(r, cfg.t, &opts)?;
    write_json(&cfg.out.join("lemniscate.json"), &LemniscateJson::from(&lem))?;
    let fig = lemniscate_figure(r, &lem.curves, format!("|R| = {}", cfg.t));
    write_text(&cfg.out.join("lemniscate.svg"), &fig.render())?;
    let summary = json!({
        "level": cfg.t,
        "components": lem.components.len(),
        "curves": lem.curves.len(),
        "good": good.is_good,
        "max_level_error": lem.max_level_error(r),
    });
    let text = format!(
        "level {}: {} component(s), {} curve(s), good={}\n",
        cfg.t,
        lem.components.len(),
        lem.curves.len(),
        good.is_good
    );
    Ok(Outcome::pass_if(true, summary, text))
}

#[derive(Serialize)]
struct CapacityRow {
    set: String,
    method: &'static str,
    panels: usize,
    value: f64,
    robin_constant: f64,
    error_indicator: f64,
}

fn cap_row(set: &str, panels: usize, c: &CapacityEstimate) -> CapacityRow {
    CapacityRow {
        set: set.to_owned(),
        method: c.method.as_str(),
        panels,
        value: c.value,
        robin_constant: c.robin_constant,
        error_indicator: c.error_indicator,
    }
}

/// Panels for a boundary made of `curves` curves.
fn union_panels(cfg: &RunConfig, curves: usize) -> usize {
    cfg.panels.max(128 * curves)
}

pub fn cmd_cap(cfg: &RunConfig) -> Result<Outcome> {
    let r = cfg.function()?;
    prepare(cfg)?;
    let lem = trace(r, cfg.t, &cfg.trace_options())?;
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut worst_disagreement: f64 = 0.0;
    let mut sets: Vec<(String, Vec<lemnis_core::Polyline>)> = lem
        .components
        .iter()
        .enumerate()
        .map(|(c, comp)| (format!("K{}", c + 1), vec![lem.curves[comp.outer].clone()]))
        .collect();
    sets.push(("K".to_owned(), lem.outer_boundary()));
    let mut measure = None;
    for (name, curves) in &sets {
        let panels = union_panels(cfg, curves.len());
        let (panel, mu) = cap_panel(curves, panels)?;
        let leja = cap_fekete(curves, cfg.leja)?;
        worst_disagreement = worst_disagreement.max((panel.value - leja.value).abs() / panel.value);
        let _ = writeln!(
            text,
            "{name:>4}  PANEL {:.8}  FEKETE {:.8}  (err {:.1e} / {:.1e})",
            panel.value, leja.value, panel.error_indicator, leja.error_indicator
        );
        rows.push(cap_row(name, panels, &panel));
        rows.push(cap_row(name, cfg.leja, &leja));
        if name == "K" {
            measure = Some(mu);
        }
    }
    write_csv(&cfg.out.join("capacity.csv"), &rows)?;
    if let Some(mu) = &measure {
        write_json(&cfg.out.join("measure.json"), &MeasureJson::from(mu))?;
    }
    let summary = json!({
        "level": cfg.t,
        "rows": rows.iter().map(|r| json!({"set": r.set, "method": r.method, "value": r.value})).collect::<Vec<_>>(),
        "max_relative_disagreement": worst_disagreement,
    });
    Ok(Outcome::pass_if(true, summary, text))
}

/// Arcs per curve for a total of `cfg.arcs` arcs.
fn per_curve(cfg: &RunConfig, curves: usize) -> usize {
    cfg.arcs.div_ceil(curves.max(1))
}

pub fn parse_source(s: &str) -> Result<Source> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(Source::Infinity);
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .context("source must be `inf` or `x,y`")?;
    match v[..] {
        [x, y] => Ok(Source::Point(C64::new(x, y))),
        _ => bail!("source must be `inf` or `x,y`"),
    }
}

pub fn cmd_hm(cfg: &RunConfig, source: Source) -> Result<Outcome> {
    let r = cfg.function()?;
    prepare(cfg)?;
    let lem = trace(r, cfg.t, &cfg.trace_options())?;
    let inside = match source {
        Source::Infinity => None,
        Source::Point(z) => lem.contains_point(z)?,
    };
    let (curves, side) = match inside {
        Some(c) => (lem.component_curves(c), DomainSide::Interior),
        None => (lem.curves.clone(), DomainSide::Exterior),
    };
    let partition = ArcPartition::uniform(curves.len(), per_curve(cfg, curves.len()));
    let report = wos(&curves, side, source, &partition, cfg.walks, cfg.seed)?;
    let out = HarmonicJson::new(&report, &partition);
    write_json(&cfg.out.join("hm.json"), &out)?;
    let mut text = String::new();
    for (a, e) in partition.arcs.iter().zip(&report.arc_measures) {
        let _ = writeln!(text, "{:>8}  {:.5} ± {:.5}", a.label, e.estimate, e.std_error);
    }
    let _ = writeln!(
        text,
        "total {:.5}, {} walks, {} failed",
        report.total(),
        report.walks,
        report.failed
    );
    let summary = json!({
        "domain": if inside.is_some() { "component" } else { "omega" },
        "estimates": out.estimates,
        "sigma": out.sigma,
        "total": report.total(),
        "walks": report.walks,
        "failed": report.failed,
    });
    Ok(Outcome::pass_if(true, summary, text))
}

#[derive(Serialize)]
struct SweepRow {
    t: f64,
    cap: f64,
    #[serde(rename = "F")]
    f: f64,
    plateau_flag: bool,
}

fn sweep(cfg: &RunConfig) -> Result<SweepResult> {
    let r = cfg.function()?;
    let levels = lemnis_core::default_levels(r, cfg.levels, cfg.tmin, cfg.tmax)?;
    Ok(lemnis_core::sweep_f(r, &levels, cfg.panels, &cfg.trace_options())?)
}

fn write_sweep(cfg: &RunConfig, res: &SweepResult) -> Result<()> {
    let r = cfg.function()?;
    let rows: Vec<SweepRow> = (0..res.levels.len())
        .map(|k| SweepRow {
            t: res.levels[k],
            cap: res.caps[k].value,
            f: res.f[k],
            plateau_flag: res.on_plateau(k),
        })
        .collect();
    write_csv(&cfg.out.join("schwarz.csv"), &rows)?;
    let n = res.outlines.len();
    let fig = Figure {
        layers: res
            .outlines
            .iter()
            .enumerate()
            .map(|(k, c)| Layer {
                curves: c,
                stroke: ramp(k, n),
            })
            .collect(),
        poles: r.poles().to_vec(),
        zeros: r.zeros().map(|z| z.finite).unwrap_or_default(),
        title: "outer boundaries of K_t".to_owned(),
    };
    write_text(&cfg.out.join("schwarz.svg"), &fig.render())
}

fn sweep_summary(res: &SweepResult) -> (bool, Value, String) {
    let monotone = res.is_monotone();
    let plateau = !res.f.is_empty() && res.on_plateau(0);
    let mut text = String::new();
    for k in 0..res.levels.len() {
        let _ = writeln!(
            text,
            "t={:<10.4e} cap={:<14.8} F={:<12.8}{}",
            res.levels[k],
            res.caps[k].value,
            res.f[k],
            if res.on_plateau(k) { " plateau" } else { "" }
        );
    }
    for (t, why) in &res.skipped {
        let _ = writeln!(text, "skipped t={t}: {why}");
    }
    let _ = writeln!(
        text,
        "m={} |c_m|^(1/m)={:.8} monotone={monotone} plateau_end={:?}",
        res.m,
        res.plateau_value(),
        res.plateau_end
    );
    let first_off = (0..res.f.len()).find(|&k| !res.on_plateau(k));
    let summary = json!({
        "m": res.m,
        "plateau_value": res.plateau_value(),
        "plateau_end": res.plateau_end,
        "monotone": monotone,
        "violations": res.monotonicity_violations(),
        "f_first": res.f.first(),
        "zero_in_unbounded_after_plateau": first_off.map(|k| res.zero_in_unbounded[k]),
        "skipped": res.skipped.len(),
    });
    (monotone && plateau, summary, text)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome> {
    prepare(cfg)?;
    let res = sweep(cfg)?;
    write_sweep(cfg, &res)?;
    let (_, summary, text) = sweep_summary(&res);
    Ok(Outcome::pass_if(true, summary, text))
}

fn reflection(cfg: &RunConfig) -> Result<(ReflectionReport, Lemniscate)> {
    let r = cfg.function()?;
    let lem = trace(r, 1.0, &cfg.trace_options())?;
    let partition = ArcPartition::uniform(lem.curves.len(), per_curve(cfg, lem.curves.len()));
    let report = verify_reflection_on(r, &lem, &partition, cfg.walks, cfg.seed)?;
    Ok((report, lem))
}

fn verify_reflection(cfg: &RunConfig) -> Result<Outcome> {
    let (rep, _) = reflection(cfg)?;
    write_json(&cfg.out.join("reflection.json"), &ReflectionJson::from(&rep))?;
    let (ab, ac, bc) = rep.max_discrepancies();
    let ok = rep.passed(K_SIGMA);
    let text = format!(
        "reflection: {} arcs, max |A-B|={ab:.2e} |A-C|={ac:.2e} |B-C|={bc:.2e}, max z={:.2} -> {}\n",
        rep.partition.len(),
        rep.max_z(),
        if ok { "PASS" } else { "FAIL" }
    );
    let summary = json!({"max_z": rep.max_z(), "max_ab": ab, "max_ac": ac, "max_bc": bc, "pass": ok});
    Ok(Outcome::pass_if(ok, summary, text))
}

fn within(est: f64, pred: f64, sigma: f64, floor: f64) -> bool {
    (est - pred).abs() <= floor.max(K_SIGMA * sigma)
}

fn verify_energy(cfg: &RunConfig) -> Result<Outcome> {
    let r = cfg.function()?;
    let rep = lemnis_core::verify_energy_identity(r, cfg.walks, cfg.seed, &cfg.trace_options())?;
    write_json(&cfg.out.join("energy.json"), &EnergyJson::from(&rep))?;
    let terms_ok = rep
        .self_terms
        .iter()
        .chain(&rep.cross_terms)
        .all(|t| within(t.estimate, t.predicted, t.std_error, ENERGY_TERM_TOLERANCE));
    let total_ok = within(
        rep.total,
        rep.total_predicted,
        rep.total_std_error,
        ENERGY_TOTAL_TOLERANCE,
    );
    let ok = terms_ok && total_ok;
    let mut text = String::new();
    for t in rep.self_terms.iter().chain(&rep.cross_terms) {
        let _ = writeln!(
            text,
            "I({},{}) = {:.5} ± {:.5} (predicted {:.5})",
            t.i, t.j, t.estimate, t.std_error, t.predicted
        );
    }
    let _ = writeln!(
        text,
        "energy: total {:.5} ± {:.5} (predicted {:.5}) -> {}",
        rep.total,
        rep.total_std_error,
        rep.total_predicted,
        if ok { "PASS" } else { "FAIL" }
    );
    let summary = json!({"total": rep.total, "total_predicted": rep.total_predicted, "pass": ok});
    Ok(Outcome::pass_if(ok, summary, text))
}

#[derive(Serialize)]
struct LowerRow {
    component: usize,
    cap: f64,
    residue_modulus: f64,
    ratio: f64,
    slack: f64,
    error_indicator: f64,
    lower_ok: bool,
}

#[derive(Serialize)]
struct UnionRow {
    cap: f64,
    product_bound: f64,
    slack: f64,
    error_indicator: f64,
    ok: bool,
}

fn verify_lower(cfg: &RunConfig) -> Result<Outcome> {
    let r = cfg.function()?;
    let rep = lemnis_core::verify_lower_bounds(r, &cfg.bounds_options())?;
    let rows: Vec<LowerRow> = rep
        .per_component
        .iter()
        .map(|c| LowerRow {
            component: c.index,
            cap: c.cap.value,
            residue_modulus: c.residue_modulus,
            ratio: c.ratio,
            slack: c.slack,
            error_indicator: c.cap.error_indicator,
            lower_ok: c.lower_ok,
        })
        .collect();
    write_csv(&cfg.out.join("lower.csv"), &rows)?;
    write_csv(
        &cfg.out.join("lower_union.csv"),
        &[UnionRow {
            cap: rep.whole.value,
            product_bound: rep.product_bound,
            slack: rep.whole_slack,
            error_indicator: rep.whole.error_indicator,
            ok: rep.whole_ok,
        }],
    )?;
    let ok = rep.all_ok();
    let mut text = String::new();
    for c in &rows {
        let _ = writeln!(
            text,
            "K{}: cap {:.6} >= |a| {:.6} (slack {:+.2e})",
            c.component + 1,
            c.cap,
            c.residue_modulus,
            c.slack
        );
    }
    let _ = writeln!(
        text,
        "K: cap {:.6} >= {:.6} (slack {:+.2e}) -> {}",
        rep.whole.value,
        rep.product_bound,
        rep.whole_slack,
        if ok { "PASS" } else { "FAIL" }
    );
    let summary = json!({"min_slack": rep.min_slack(), "product_bound": rep.product_bound, "pass": ok});
    Ok(Outcome::pass_if(ok, summary, text))
}

#[derive(Serialize)]
struct UpperRow {
    component: usize,
    r_star: f64,
    constant: f64,
    cap: f64,
    bound: f64,
    slack: f64,
    ok: bool,
}

fn verify_upper(cfg: &RunConfig) -> Result<Outcome> {
    let r = cfg.function()?;
    let opts = cfg.bounds_options();
    let mut rows = Vec::new();
    for i in 0..r.degree() {
        let cert = bounds::certify_injectivity_radius(r, i, cfg.margin, &opts.trace)?;
        let rep = bounds::verify_upper_bound(r, &cert, &opts)?;
        rows.push(UpperRow {
            component: i,
            r_star: cert.r_star,
            constant: cert.constant,
            cap: rep.cap.value,
            bound: rep.bound,
            slack: rep.slack,
            ok: rep.ok,
        });
    }
    write_csv(&cfg.out.join("upper.csv"), &rows)?;
    let ok = rows.iter().all(|r| r.ok);
    let mut text = String::new();
    for u in &rows {
        let _ = writeln!(
            text,
            "K{}: r*={:.4} c(r*)={:.4} cap {:.6} <= {:.6} (slack {:+.2e})",
            u.component + 1,
            u.r_star,
            u.constant,
            u.cap,
            u.bound,
            u.slack
        );
    }
    let _ = writeln!(text, "upper bound -> {}", if ok { "PASS" } else { "FAIL" });
    let summary = json!({
        "r_star": rows.iter().map(|u| u.r_star).collect::<Vec<_>>(),
        "min_slack": rows.iter().map(|u| u.slack).fold(f64::INFINITY, f64::min),
        "pass": ok,
    });
    Ok(Outcome::pass_if(ok, summary, text))
}

fn verify_schwarz(cfg: &RunConfig) -> Result<Outcome> {
    let res = sweep(cfg)?;
    write_sweep(cfg, &res)?;
    let (ok, mut summary, mut text) = sweep_summary(&res);
    summary["pass"] = json!(ok);
    let _ = writeln!(text, "schwarz -> {}", if ok { "PASS" } else { "FAIL" });
    Ok(Outcome::pass_if(ok, summary, text))
}

/// A point where `|R| <= 1/3`, well away from the poles.
pub fn default_epsilon_point(r: &RationalFunction) -> C64 {
    let d = r.degree() as f64;
    let c = r.poles().iter().sum::<C64>() / d;
    let spread = r.poles().iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
    c + C64::new(spread + 3.0 * r.residue_mass(), 0.0)
}

#[derive(Serialize)]
struct EpsilonRowCsv {
    epsilon: f64,
    cap: f64,
    ratio: f64,
    r_star: f64,
    constant: f64,
    error_indicator: f64,
}

pub fn run_epsilon(cfg: &RunConfig) -> Result<EpsilonSweep> {
    let r = cfg.function()?;
    let at = cfg.at.unwrap_or_else(|| default_epsilon_point(r));
    Ok(bounds::epsilon_sweep(r, at, &cfg.eps, &cfg.bounds_options())?)
}

fn verify_epsilon(cfg: &RunConfig) -> Result<Outcome> {
    let sweep = run_epsilon(cfg)?;
    let rows: Vec<EpsilonRowCsv> = sweep
        .rows
        .iter()
        .map(|r| EpsilonRowCsv {
            epsilon: r.epsilon,
            cap: r.cap.value,
            ratio: r.ratio,
            r_star: r.certificate.r_star,
            constant: r.certificate.constant,
            error_indicator: r.cap.error_indicator,
        })
        .collect();
    write_csv(&cfg.out.join("epsilon.csv"), &rows)?;
    let ok = sweep.within_bound();
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(
            text,
            "eps={:.1e} cap={:.6e} cap/eps={:.6} c(r*)={:.4}",
            r.epsilon, r.cap, r.ratio, r.constant
        );
    }
    let _ = writeln!(
        text,
        "spread max/min {:.4} -> {}",
        sweep.spread(),
        if ok { "PASS" } else { "FAIL" }
    );
    let summary = json!({"spread": sweep.spread(), "pass": ok});
    Ok(Outcome::pass_if(ok, summary, text))
}

#[derive(Serialize)]
struct CounterexampleRowCsv {
    p: f64,
    good: bool,
    max_critical_modulus: f64,
    asymptotic_error: f64,
    segment_contained: Option<bool>,
    cap: Option<f64>,
    lower: f64,
    ratio: Option<f64>,
    slack: Option<f64>,
    cap_ok: Option<bool>,
}

pub fn run_counterexample(cfg: &RunConfig) -> Result<CounterexampleTable> {
    let mut p = cfg.p.clone();
    p.sort_by(f64::total_cmp);
    p.dedup();
    Ok(bounds::counterexample_experiment(
        cfg.a,
        cfg.eta,
        &p,
        &cfg.bounds_options(),
    )?)
}

/// Assertions on a counterexample table: goodness is reported, not asserted;
/// every good row must contain the segment and meet the capacity bound; the
/// ratio must increase when every row is good; the critical-point error
/// must shrink.
pub fn counterexample_passes(t: &CounterexampleTable) -> bool {
    let rows_ok = t
        .rows
        .iter()
        .filter(|r| r.good)
        .all(|r| r.segment_contained == Some(true) && r.cap_ok());
    let all_good = t.rows.iter().all(|r| r.good);
    rows_ok && (!all_good || t.ratio_increasing()) && t.asymptotics_improve()
}

fn verify_counterexample(cfg: &RunConfig) -> Result<Outcome> {
    let t = run_counterexample(cfg)?;
    let rows: Vec<CounterexampleRowCsv> = t
        .rows
        .iter()
        .map(|r| CounterexampleRowCsv {
            p: r.p,
            good: r.good,
            max_critical_modulus: r.max_critical_modulus,
            asymptotic_error: r.asymptotic_error,
            segment_contained: r.segment_contained,
            cap: r.cap.map(|c| c.value),
            lower: r.lower,
            ratio: r.ratio,
            slack: r.cap.map(|c| c.value - r.lower),
            cap_ok: r.cap.map(|_| r.cap_ok()),
        })
        .collect();
    write_csv(&cfg.out.join("counterexample.csv"), &rows)?;
    let ok = counterexample_passes(&t);
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(
            text,
            "p={:<8} good={:<5} max|R(c)|={:.4} asym.err={:.2e} cap={} lower={:.4}",
            r.p,
            r.good,
            r.max_critical_modulus,
            r.asymptotic_error,
            r.cap.map_or("-".to_owned(), |c| format!("{c:.6}")),
            r.lower
        );
    }
    let _ = writeln!(
        text,
        "smallest good p: {:?} -> {}",
        t.smallest_good_p(),
        if ok { "PASS" } else { "FAIL" }
    );
    let summary = json!({
        "smallest_good_p": t.smallest_good_p(),
        "ratios": t.rows.iter().map(|r| r.ratio).collect::<Vec<_>>(),
        "pass": ok,
    });
    Ok(Outcome::pass_if(ok, summary, text))
}

fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<Outcome> {
    match suite {
        Suite::Reflection => verify_reflection(cfg),
        Suite::Energy => verify_energy(cfg),
        Suite::Lower => verify_lower(cfg),
        Suite::Upper => verify_upper(cfg),
        Suite::Schwarz => verify_schwarz(cfg),
        Suite::Epsilon => verify_epsilon(cfg),
        Suite::Counterexample => verify_counterexample(cfg),
        Suite::All => unreachable!(),
    }
}

pub fn cmd_verify(cfg: &RunConfig, suite: Suite) -> Result<Outcome> {
    prepare(cfg)?;
    if suite != Suite::All {
        return run_suite(cfg, suite);
    }
    cfg.function()?;
    let mut status = Status::Pass;
    let mut text = String::new();
    let mut summary = serde_json::Map::new();
    for s in Suite::EACH {
        let _ = writeln!(text, "== {}", s.name());
        match run_suite(cfg, s) {
            Ok(o) => {
                status = status.worst(o.status);
                text.push_str(&o.text);
                summary.insert(s.name().to_owned(), o.summary);
            }
            Err(e) => {
                status = status.worst(Status::Error);
                let _ = writeln!(text, "error: {e:#}");
                summary.insert(s.name().to_owned(), json!({"error": format!("{e:#}")}));
            }
        }
    }
    Ok(Outcome {
        status,
        summary: Value::Object(summary),
        text,
    })
}
