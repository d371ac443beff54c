//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::Instant;

use steerkit::analytic::analytic_basis;
use steerkit::groups::{GroupElement, GroupTag};
use steerkit::irreps::{IrrepLabel, O2Kind};
use steerkit::solver::{predicted_dimension_case, solve_case, CaseSpec};
use steerkit::verify::{
    case_grid, check_cases, check_projectors, equivariance_demo, reconciliation, CheckOptions, DemoKernel, CaseReport,
    DEMO_NEGATIVE_MIN, DEMO_TOL, PROJECTOR_TOL, SPAN_TOL, STEER_TOL,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn compact_grid() -> Vec<CaseSpec> {
    [GroupTag::So2, GroupTag::O2, GroupTag::So3, GroupTag::O3].into_iter().flat_map(|g| case_grid(Some(g))).collect()
}

fn dims(case: &CaseSpec) -> Option<(usize, usize, usize)> {
    Some((solve_case(case).ok()?.dim(), predicted_dimension_case(case).ok()?, analytic_basis(case).ok()?.len()))
}

fn criterion_dims() -> Outcome {
    let t = Instant::now();
    let cases = compact_grid();
    let mut bad = vec![];
    for c in &cases {
        match dims(c) {
            Some((o, p, a)) if o == p && p == a => {}
            other => bad.push(format!("{} {other:?}", c.describe())),
        }
    }
    let circle = steerkit::groups::Orbit::Circle { radius: 1.0 };
    let o2 = |kind| IrrepLabel::O2Real { kind };
    let named = [
        (CaseSpec::new(IrrepLabel::So2Real { j: 2 }, IrrepLabel::So2Real { j: 3 }, circle), 4),
        (CaseSpec::new(o2(O2Kind::Trivial), o2(O2Kind::Sign), circle), 0),
        (CaseSpec::new(o2(O2Kind::Rot(3)), o2(O2Kind::Rot(1)), circle), 2),
    ];
    for (c, want) in named {
        if dims(&c) != Some((want, want, want)) {
            bad.push(format!("{} expected {want}", c.describe()));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(bad.is_empty() && secs < 60.0, format!("{} cases, {} mismatches {:?}, {secs:.1}s", cases.len(), bad.len(), bad.iter().take(3).collect::<Vec<_>>()))
}

fn worst(reports: &[CaseReport], f: impl Fn(&CaseReport) -> f64) -> (f64, String) {
    reports.iter().map(|r| (f(r), r.key.clone())).fold((0.0, String::new()), |a, b| if b.0 > a.0 || b.0.is_nan() { b } else { a })
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = vec![];

    results.push((1, "dimension table", criterion_dims()));

    let t = Instant::now();
    let opts = CheckOptions::with_seed(2024);
    let mut cases = compact_grid();
    cases.extend(case_grid(Some(GroupTag::Lorentz)));
    let reports = check_cases(&cases, &opts);
    let secs = t.elapsed().as_secs_f64();
    let (steer, steer_key) = worst(&reports, |r| r.max_steer_residual);
    let neg_ok = reports.iter().all(|r| r.negative_control.map_or(true, |v| v >= steerkit::verify::NEGATIVE_CONTROL_MIN));
    results.push((
        2,
        "steerability residual",
        outcome(
            steer <= STEER_TOL && neg_ok && secs < 300.0,
            format!(
                "{} cases, {}x{} samples each, worst {steer:.2e} ({steer_key}), negative controls fail as expected: {neg_ok}, {secs:.1}s",
                reports.len(),
                opts.group_draws,
                opts.point_draws
            ),
        ),
    ));
    let (span, span_key) = worst(&reports, |r| r.span_angle);
    let failing: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.key.as_str()).collect();
    results.push((
        3,
        "span equivalence",
        outcome(span <= SPAN_TOL && failing.is_empty(), format!("worst angle {span:.2e} ({span_key}), failing cases {failing:?}")),
    ));

    let t = Instant::now();
    let proj = check_projectors(2024, 20, 2.0);
    let secs = t.elapsed().as_secs_f64();
    let (algebra, gauge): (Vec<_>, Vec<_>) = proj.iter().partition(|p| p.family != "massless gauge shift");
    let max_res = |ps: &[&steerkit::verify::ProjectorReport]| ps.iter().flat_map(|p| &p.checks).map(|c| c.residual).fold(0.0, f64::max);
    let a = max_res(&algebra);
    results.push((4, "Lorentz projector algebra", outcome(a <= PROJECTOR_TOL && secs < 5.0, format!("worst residual {a:.2e} over {} families, {secs:.2}s", algebra.len()))));
    let g = max_res(&gauge);
    results.push((5, "massless gauge check", outcome(!gauge.is_empty() && g <= PROJECTOR_TOL, format!("worst residual {g:.2e}, 10 gauge draws per point"))));

    let rec = reconciliation(8);
    results.push((
        6,
        "complex/real reconciliation",
        match rec {
            Ok(r) => {
                let bad = r.iter().filter(|x| !x.passed).count();
                outcome(bad == 0, format!("{} pairs checked, {bad} failed", r.len()))
            }
            Err(e) => outcome(false, format!("error: {e}")),
        },
    ));

    let mut demo = vec![];
    let g = GroupElement::so2(TAU * 37.0 / 256.0);
    for (j, l) in [(0, 1), (1, 1), (2, 3)] {
        let (a, b) = (IrrepLabel::So2Real { j }, IrrepLabel::So2Real { j: l });
        let s = equivariance_demo(&a, &b, 256, &g, DemoKernel::Steerable, 2024).unwrap_or(f64::NAN);
        let n = equivariance_demo(&a, &b, 256, &g, DemoKernel::Random, 2024).unwrap_or(f64::NAN);
        demo.push((j, l, s, n));
    }
    let demo_ok = demo.iter().all(|&(_, _, s, n)| s <= DEMO_TOL && n >= DEMO_NEGATIVE_MIN);
    let text: Vec<String> = demo.iter().map(|(j, l, s, n)| format!("({j},{l}) {s:.1e}/{n:.2}")).collect();
    results.push((7, "equivariance demo", outcome(demo_ok, format!("steerable/random at N=256: {}", text.join(", ")))));

    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_steerkit"))
            .args(["verify", "--group", "lorentz", "--seed", "7"])
            .env("STEERKIT_THREADS", threads)
            .output()
            .map(|o| (o.status.code(), o.stdout))
    };
    results.push((
        8,
        "determinism",
        match (run("1"), run("2")) {
            (Ok((Some(0), a)), Ok((Some(0), b))) => outcome(a == b && !a.is_empty(), format!("two reports of {} bytes, identical: {}", a.len(), a == b)),
            (a, b) => outcome(false, format!("verify runs failed: {:?} {:?}", a.map(|x| x.0), b.map(|x| x.0))),
        },
    ));

    let mut all = true;
    for (n, name, o) in &results {
        all &= o.passed;
        println!("criterion {n} {}: {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
