//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::{LN_2, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use lemnis::{run, Cli};
use lemnis_core::bounds::{
    certify_injectivity_radius, counterexample_experiment, epsilon_sweep, injectivity_constant, random_good_function,
    verify_lower_bounds, BoundsOptions, BoundsReport,
};
use lemnis_core::harmonic::{verify_reflection_on, BoundedProblem};
use lemnis_core::rng::Stream;
use lemnis_core::{
    cap_panel, default_levels, moebius_transport, sweep_f, trace, verify_energy_identity, wos, ArcPartition,
    DomainSide, Polyline, RationalFunction, Source, TraceOptions, C64,
};

const SEED: u64 = lemnis_core::rng::DEFAULT_SEED;

struct Line {
    id: u32,
    pass: bool,
    detail: String,
}

fn two_poles() -> RationalFunction {
    RationalFunction::from_pairs(&[(2.0, 0.0), (-2.0, 0.0)], &[(1.0, 0.0), (1.0, 0.0)]).unwrap()
}

fn c(x: f64, y: f64) -> C64 {
    C64::new(x, y)
}

fn closed_forms() -> (bool, String) {
    let start = Instant::now();
    let circle = Polyline::circle(c(0.0, 0.0), 2.0, 4096);
    let (cap, _) = cap_panel(&[circle], 256).unwrap();
    let elapsed = start.elapsed();
    let seg = Polyline::segment(c(-1.0, 0.0), c(1.0, 0.0), 2048);
    let (seg_cap, _) = cap_panel(&[seg], 256).unwrap();
    let pass =
        (cap.value - 2.0).abs() <= 1e-4 && elapsed < Duration::from_secs(1) && (seg_cap.value - 0.5).abs() <= 1e-3;
    (
        pass,
        format!(
            "circle r=2: {:.8} in {:.0?}; segment length 2: {:.6}",
            cap.value, elapsed, seg_cap.value
        ),
    )
}

fn single_pole_equality() -> (bool, String) {
    let mut rng = Stream::new(SEED, 2, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let a = c(4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0);
        let p = c(10.0 * rng.uniform() - 5.0, 10.0 * rng.uniform() - 5.0);
        let r = RationalFunction::new(vec![p], vec![a]).unwrap();
        match verify_lower_bounds(&r, &BoundsOptions::default()) {
            Ok(rep) => worst = worst.max((rep.per_component[0].cap.value - a.norm()).abs()),
            Err(e) => return (false, format!("a={a} p={p}: {e}")),
        }
    }
    (
        worst <= 1e-3,
        format!("5 random (a, p): max |cap(K_1) - |a|| = {worst:.2e}"),
    )
}

fn reflection() -> (bool, String) {
    let start = Instant::now();
    let r = two_poles();
    let lem = trace(&r, 1.0, &TraceOptions::default()).unwrap();
    // 8 arcs in total, 4 on each curve
    let partition = ArcPartition::uniform(lem.curves.len(), 8 / lem.curves.len());
    let rep = match verify_reflection_on(&r, &lem, &partition, 100_000, SEED) {
        Ok(rep) => rep,
        Err(e) => return (false, e.to_string()),
    };
    let elapsed = start.elapsed();
    let pass = rep.passed(3.0) && partition.len() == 8 && elapsed < Duration::from_secs(60);
    let (ab, ac, bc) = rep.max_discrepancies();
    (
        pass,
        format!(
            "max z {:.2} over 8 arcs (|A-B| {ab:.1e}, |A-C| {ac:.1e}, |B-C| {bc:.1e}) in {elapsed:.1?}",
            rep.max_z()
        ),
    )
}

fn energy() -> (bool, String) {
    let rep = match verify_energy_identity(&two_poles(), 100_000, SEED, &TraceOptions::default()) {
        Ok(rep) => rep,
        Err(e) => return (false, e.to_string()),
    };
    let log4 = 2.0 * LN_2;
    let cross = rep.cross_terms[0].estimate;
    let pass = (rep.total + 2.0 * log4).abs() <= 5e-2 && (cross + log4).abs() <= 2e-2;
    (
        pass,
        format!(
            "I(mu) = {:.5} (expected {:.5}); cross = {:.5} (expected {:.5})",
            rep.total,
            -2.0 * log4,
            cross,
            -log4
        ),
    )
}

fn random_family() -> Vec<RationalFunction> {
    (0..100u32)
        .map(|k| random_good_function(1 + k as usize % 4, SEED, k).unwrap())
        .collect()
}

fn lower_bounds(family: &[RationalFunction]) -> (bool, String, Vec<Option<BoundsReport>>) {
    let mut reports = Vec::new();
    let mut worst = f64::INFINITY;
    let mut errors = Vec::new();
    for (k, r) in family.iter().enumerate() {
        match verify_lower_bounds(r, &BoundsOptions::default()) {
            Ok(rep) => {
                worst = worst.min(rep.min_slack());
                reports.push(Some(rep));
            }
            Err(e) => {
                errors.push(format!("#{k}: {e}"));
                reports.push(None);
            }
        }
    }
    let pass = errors.is_empty() && worst >= -1e-3;
    let mut detail = format!("{} functions, min slack {worst:+.2e}", family.len());
    if !errors.is_empty() {
        detail.push_str(&format!("; errors: {}", errors.join(", ")));
    }
    (pass, detail, reports)
}

fn upper_bound(family: &[RationalFunction], reports: &[Option<BoundsReport>]) -> (bool, String) {
    let exact = injectivity_constant(2.0) == 64.0 / 3.0;
    let opts = TraceOptions::default();
    let (mut checked, mut skipped, mut failures) = (0, 0, Vec::new());
    let mut worst = f64::INFINITY;
    for (k, (r, rep)) in family.iter().zip(reports).enumerate() {
        let Some(rep) = rep else {
            failures.push(format!("#{k}: no capacity"));
            continue;
        };
        for comp in &rep.per_component {
            match certify_injectivity_radius(r, comp.index, 1e-3, &opts) {
                Ok(cert) if cert.r_star >= 1.2 => {
                    checked += 1;
                    let slack = cert.constant * comp.residue_modulus - comp.cap.value;
                    worst = worst.min(slack);
                    if slack < 0.0 {
                        failures.push(format!("#{k}/{}: slack {slack:.2e}", comp.index));
                    }
                }
                Ok(_) => skipped += 1,
                Err(e) => failures.push(format!("#{k}/{}: {e}", comp.index)),
            }
        }
    }
    let pass = exact && failures.is_empty() && checked > 0;
    let mut detail =
        format!("c(2) = 64/3: {exact}; {checked} components with r* >= 1.2 (min slack {worst:.3}), {skipped} below");
    if !failures.is_empty() {
        detail.push_str(&format!("; failures: {}", failures.join(", ")));
    }
    (pass, detail)
}

fn epsilon() -> (bool, String) {
    let r = RationalFunction::from_pairs(&[(3.0, 0.0)], &[(1.0, 0.0)]).unwrap();
    match epsilon_sweep(&r, c(0.0, 0.0), &[1e-1, 1e-2, 1e-3], &BoundsOptions::default()) {
        Ok(s) => {
            let ratios: Vec<String> = s.rows.iter().map(|r| format!("{:.5}", r.ratio)).collect();
            let bounds: Vec<String> = s
                .rows
                .iter()
                .map(|r| format!("{:.3}", r.certificate.constant))
                .collect();
            (
                s.spread() < 1.2 && s.within_bound(),
                format!(
                    "cap/eps = [{}], spread {:.4}, c(r*) = [{}]",
                    ratios.join(", "),
                    s.spread(),
                    bounds.join(", ")
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn counterexample() -> ((bool, String), (bool, String)) {
    let start = Instant::now();
    let table = match counterexample_experiment(1.0, 0.75, &[1e2, 1e3, 1e4], &BoundsOptions::default()) {
        Ok(t) => t,
        Err(e) => return ((false, e.to_string()), (false, e.to_string())),
    };
    let elapsed = start.elapsed();
    let rows_ok = table
        .rows
        .iter()
        .all(|r| r.good && r.segment_contained == Some(true) && r.cap.is_some_and(|c| c.value - r.lower >= 0.0));
    let pass8 = rows_ok && table.ratio_increasing() && elapsed < Duration::from_secs(120);
    let ratios: Vec<String> = table
        .rows
        .iter()
        .map(|r| r.ratio.map_or("-".into(), |x| format!("{x:.4}")))
        .collect();
    let slacks: Vec<String> = table
        .rows
        .iter()
        .map(|r| r.cap.map_or("-".into(), |c| format!("{:.3}", c.value - r.lower)))
        .collect();
    let errors: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("{:.2e}", r.asymptotic_error))
        .collect();
    (
        (
            pass8,
            format!(
                "ratio cap/|a| = [{}], slack = [{}] in {elapsed:.1?}",
                ratios.join(", "),
                slacks.join(", ")
            ),
        ),
        (
            table.asymptotics_improve(),
            format!("relative error = [{}]", errors.join(", ")),
        ),
    )
}

fn schwarz() -> (bool, String) {
    let opts = TraceOptions::default();
    let r = two_poles();
    let dipole = RationalFunction::from_pairs(&[(1.0, 0.0), (-1.0, 0.0)], &[(1.0, 0.0), (-1.0, 0.0)]).unwrap();
    let sweep = |r: &RationalFunction| {
        let levels = default_levels(r, 24, 1e-3, 0.98)?;
        sweep_f(r, &levels, 256, &opts)
    };
    match (sweep(&r), sweep(&dipole)) {
        (Ok(a), Ok(b)) => {
            let f_a = a.f[0];
            let f_b = b.f[0];
            let pass = a.levels.len() == 24
                && a.is_monotone()
                && (a.levels[0] - 1e-3).abs() < 1e-15
                && (f_a - 2.0).abs() <= 1e-2
                && (b.levels[0] - 1e-3).abs() < 1e-15
                && (f_b - SQRT_2).abs() <= 1e-2;
            (
                pass,
                format!(
                    "two poles: monotone={} over {} levels, F(1e-3) = {f_a:.6}; dipole (m={}): F(1e-3) = {f_b:.6}",
                    a.is_monotone(),
                    a.levels.len(),
                    b.m
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
    }
}

fn covariance() -> (bool, String) {
    let lem = trace(&two_poles(), 1.0, &TraceOptions::default()).unwrap();
    let (base, _) = cap_panel(&lem.curves, 256).unwrap();
    let mut worst: f64 = 0.0;
    for (lambda, b) in [
        (c(3.0, 0.0), c(0.0, 0.0)),
        (c(0.0, 0.5), c(1.0, -2.0)),
        (c(1.0, 0.0), c(-7.0, 3.0)),
    ] {
        let moved: Vec<Polyline> = lem.curves.iter().map(|p| p.map(|z| lambda * z + b)).collect();
        let (cap, _) = cap_panel(&moved, 256).unwrap();
        worst = worst.max((cap.value / (lambda.norm() * base.value) - 1.0).abs());
    }
    (worst <= 1e-6, format!("max relative deviation {worst:.1e}"))
}

fn wos_properties() -> (bool, String) {
    let circle = Polyline::circle(c(0.0, 0.0), 1.0, 4096);
    let part = ArcPartition::uniform(1, 4);
    let src = c(0.5, 0.2);
    let direct = BoundedProblem::interior(std::slice::from_ref(&circle), src)
        .unwrap()
        .wos(&part, 50_000, SEED)
        .unwrap();
    let moved = moebius_transport(std::slice::from_ref(&circle), Source::Point(src), c(2.0, 1.0))
        .unwrap()
        .wos(&part, 50_000, SEED + 1)
        .unwrap();
    let sum_ok = [&direct, &moved].iter().all(|r| {
        let sigma: f64 = r.std_errors().iter().map(|s| s * s).sum::<f64>().sqrt();
        (r.total() - 1.0).abs() <= 3.0 * sigma.max(1.0 / r.walks as f64)
            && r.estimates().iter().all(|e| (0.0..=1.0).contains(e))
    });
    let mut max_z: f64 = 0.0;
    for (x, y) in direct.arc_measures.iter().zip(&moved.arc_measures) {
        max_z = max_z.max((x.estimate - y.estimate).abs() / x.std_error.hypot(y.std_error));
    }
    let exterior = wos(&[circle], DomainSide::Exterior, Source::Infinity, &part, 50_000, SEED).unwrap();
    for e in &exterior.arc_measures {
        max_z = max_z.max((e.estimate - 0.25).abs() / e.std_error);
    }
    (
        sum_ok && max_z <= 3.0,
        format!("sums to 1: {sum_ok}; max z under transport {max_z:.2}"),
    )
}

fn determinism() -> (bool, String) {
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let r = r#"{"poles":[[2,0],[-2,0]],"residues":[[1,0],[1,0]]}"#;
    for d in &dirs {
        let out = d.path().to_str().unwrap();
        for args in [
            vec![
                "lemnis", "hm", "--r", r, "--source", "inf", "--walks", "20000", "--out", out,
            ],
            vec![
                "lemnis",
                "verify",
                "reflection",
                "--r",
                r,
                "--walks",
                "5000",
                "--out",
                out,
            ],
            vec!["lemnis", "cap", "--r", r, "--out", out],
        ] {
            if let Err(e) = run(&Cli::parse_from(args)) {
                return (false, e.to_string());
            }
        }
    }
    let files = ["hm.json", "reflection.json", "capacity.csv", "measure.json"];
    let same = files.iter().all(|f| {
        let a = std::fs::read(dirs[0].path().join(f)).ok();
        let b = std::fs::read(dirs[1].path().join(f)).ok();
        a.is_some() && a == b
    });
    (
        same,
        format!("{} output files byte-identical across reruns: {same}", files.len()),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut record = |id: u32, (pass, detail): (bool, String)| {
        println!("{} criterion {id:>2}: {detail}", if pass { "PASS" } else { "FAIL" });
        lines.push(Line { id, pass, detail });
    };
    record(1, closed_forms());
    record(2, single_pole_equality());
    record(3, reflection());
    record(4, energy());
    let family = random_family();
    let (pass5, detail5, reports) = lower_bounds(&family);
    record(5, (pass5, detail5));
    record(6, upper_bound(&family, &reports));
    record(7, epsilon());
    let (c8, c9) = counterexample();
    record(8, c8);
    record(9, c9);
    record(10, schwarz());
    let props = [covariance(), wos_properties(), determinism()];
    let pass11 = props.iter().all(|p| p.0);
    let detail11 = format!(
        "capacity covariance: {}; walk-on-spheres: {}; determinism: {}",
        props[0].1, props[1].1, props[2].1
    );
    record(11, (pass11, detail11));
    let failed: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    println!(
        "acceptance: {}/{} passed in {:.1?}",
        lines.len() - failed.len(),
        lines.len(),
        start.elapsed()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for l in lines.iter().filter(|l| !l.pass) {
            eprintln!("failed criterion {}: {}", l.id, l.detail);
        }
        ExitCode::FAILURE
    }
}
