//! Cross-checks of the closed-form bases against the numerical oracle, the
//! steering identity on random samples, the Lorentz projector algebra and a
//! discretized circle-convolution equivariance demo.
//!
//! Every randomized check derives its generator from the run seed and the
//! case key, so reports do not depend on scheduling or thread count.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analytic::lorentz::{
    energy_projector, eta, lower, massive_delta, massless_delta, null_frame, outer, spin_three_halves,
    symmetric_traceless, velocity, Vec4,
};
use crate::analytic::{analytic_basis, KernelBasisElement};
use crate::error::{invalid, Error, Result};
use crate::groups::{
    coset_representative, random_element, random_point, random_stabilizer_element, GroupElement, GroupTag, Orbit,
    OrbitPoint,
};
use crate::irreps::lorentz::gamma;
use crate::irreps::{working_matrix, working_matrix_inverse, Field, IrrepLabel, O2Kind, Spinor, SubIrrep};
use crate::numerics::{jacobi_svd, principal_angle_distance, Dense, SubspaceBasis, C64};
use crate::solver::{predicted_dimension_case, solve_case, stabilizer_residual, CaseSpec, IntertwinerSpace};

/// Version of the JSON report layout.
pub const REPORT_VERSION: u32 = 1;

pub const STEER_TOL: f64 = 1e-10;
pub const SPAN_TOL: f64 = 1e-8;
pub const BASE_TOL: f64 = 1e-10;
pub const INDEPENDENCE_TOL: f64 = 1e-8;
pub const PROJECTOR_TOL: f64 = 1e-11;
pub const DEMO_TOL: f64 = 1e-10;
/// A random non-intertwiner must violate steering by at least this much.
pub const NEGATIVE_CONTROL_MIN: f64 = 1e-6;
/// Smallest acceptable discrepancy of the demo's random-kernel control.
pub const DEMO_NEGATIVE_MIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckOptions {
    pub seed: u64,
    pub group_draws: usize,
    pub point_draws: usize,
    pub stabilizer_draws: usize,
    /// Cap on the rapidity of sampled group elements and of sampled points
    /// separately, so `g·x` stays within twice this value.
    pub max_rapidity: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { seed: 0, group_draws: 50, point_draws: 20, stabilizer_draws: 20, max_rapidity: 1.0 }
    }
}

impl CheckOptions {
    pub fn with_seed(seed: u64) -> Self {
        CheckOptions { seed, ..Self::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub key: String,
    pub group: String,
    pub field: String,
    pub out: String,
    pub inp: String,
    pub orbit: String,
    pub block: Option<String>,
    pub oracle_dim: Option<usize>,
    pub predicted_dim: Option<usize>,
    pub analytic_count: Option<usize>,
    /// `None` when every singular value was kept or dropped cleanly.
    pub gap_ratio: Option<f64>,
    pub span_angle: f64,
    /// Smallest over largest eigenvalue of the Gram matrix of the analytic
    /// base-point matrices (1 for an empty basis).
    pub independence_min_eig: f64,
    pub max_base_residual: f64,
    pub max_stabilizer_residual: f64,
    pub max_section_residual: f64,
    pub max_steer_residual: f64,
    /// Steering residual of a random matrix in the selected blocks; `None`
    /// when every such matrix is an intertwiner.
    pub negative_control: Option<f64>,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Stable sort key of a case.
pub fn case_key(case: &CaseSpec) -> String {
    let mut k = format!(
        "{}/{}/{}<-{}/{}",
        case.group().name(),
        case.field().name(),
        case.out.short(),
        case.inp.short(),
        case.orbit.name()
    );
    if let Some(sub) = case.sub {
        k.push('/');
        k.push_str(&sub.describe());
    }
    k
}

/// Generator for one named check, independent of evaluation order.
pub fn derived_rng(seed: u64, key: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(key.as_bytes());
    let d = h.finalize();
    let mut s = [0u8; 32];
    s.copy_from_slice(&d);
    ChaCha8Rng::from_seed(s)
}

fn random_scalar<R: Rng>(rng: &mut R, field: Field) -> C64 {
    match field {
        Field::Real => C64::new(rng.gen_range(-1.0..1.0), 0.0),
        Field::Complex => C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    }
}

fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, field: Field) -> Dense {
    let data = (0..rows * cols).map(|_| random_scalar(rng, field)).collect();
    let m = Dense::from_complex(rows, cols, data);
    if field == Field::Real {
        m.into_real(0.0).expect("real by construction")
    } else {
        m
    }
}

/// Rep matrices along one sampled pair `(g, x)`, shared by every element.
struct PairMatrices {
    at_x: (Dense, Dense),
    at_gx: (Dense, Dense),
    g: (Dense, Dense),
    /// Block projectors at `g·x` (massless cases only).
    gauge: Option<(Dense, Dense)>,
}

impl PairMatrices {
    fn residual(&self, k0: &Dense) -> f64 {
        let kx = &(&self.at_x.0 * k0) * &self.at_x.1;
        let kgx = &(&self.at_gx.0 * k0) * &self.at_gx.1;
        let moved = &(&self.g.0 * &kx) * &self.g.1;
        let mut diff = &kgx - &moved;
        if let Some((p, q)) = &self.gauge {
            diff = &(p * &diff) * q;
        }
        diff.frobenius_norm() / kx.frobenius_norm().max(1.0)
    }
}

fn section_pair(case: &CaseSpec, s: &GroupElement) -> Result<(Dense, Dense)> {
    Ok((working_matrix(&case.out, s)?, working_matrix_inverse(&case.inp, s)?))
}

fn sample_pairs(case: &CaseSpec, opts: &CheckOptions, rng: &mut ChaCha8Rng, frames: &(Dense, Dense)) -> Result<Vec<PairMatrices>> {
    let tag = case.group();
    let gs: Vec<GroupElement> = (0..opts.group_draws).map(|_| random_element(tag, rng, opts.max_rapidity)).collect();
    let xs: Vec<OrbitPoint> = (0..opts.point_draws).map(|_| random_point(&case.orbit, rng, opts.max_rapidity)).collect();
    let massless = case.orbit == Orbit::Null;
    let (po, pi) = (&frames.0 * &frames.0.adjoint(), &frames.1 * &frames.1.adjoint());
    let mut at_x = Vec::with_capacity(xs.len());
    for x in &xs {
        at_x.push(section_pair(case, &coset_representative(tag, x)?)?);
    }
    let mut pairs = Vec::with_capacity(gs.len() * xs.len());
    for g in &gs {
        let gm = section_pair(case, g)?;
        for (x, ax) in xs.iter().zip(&at_x) {
            let s = coset_representative(tag, &g.act(x)?)?;
            let at_gx = section_pair(case, &s)?;
            let gauge = if massless {
                let p = &(&at_gx.0 * &po) * &working_matrix_inverse(&case.out, &s)?;
                let q = &(&working_matrix(&case.inp, &s)? * &pi) * &at_gx.1;
                Some((p, q))
            } else {
                None
            };
            pairs.push(PairMatrices { at_x: ax.clone(), at_gx, g: gm.clone(), gauge });
        }
    }
    Ok(pairs)
}

fn span_of(n: usize, field: Field, mats: &[&Dense]) -> Result<SubspaceBasis> {
    let cols: Vec<Vec<C64>> = mats.iter().map(|m| m.vectorize()).collect();
    if cols.is_empty() {
        return Ok(SubspaceBasis::empty(n));
    }
    let m = Dense::from_columns(n, &cols);
    let m = if field == Field::Real { m.into_real(1e-12)? } else { m.into_complex() };
    SubspaceBasis::spanning(n, &m.columns(), 1e-10)
}

fn independence(n: usize, mats: &[&Dense]) -> f64 {
    if mats.is_empty() {
        return 1.0;
    }
    let cols: Vec<Vec<C64>> = mats.iter().map(|m| m.vectorize()).collect();
    let s = jacobi_svd(&Dense::from_columns(n, &cols)).singular_values;
    let (hi, lo) = (s[0], s[s.len() - 1]);
    if hi == 0.0 {
        0.0
    } else {
        (lo / hi).powi(2)
    }
}

/// Runs every check of one case. Failures, including errors raised by any
/// component, end up in the report instead of being returned.
pub fn check_case(case: &CaseSpec, opts: &CheckOptions) -> CaseReport {
    let key = case_key(case);
    let mut report = CaseReport {
        key: key.clone(),
        group: case.group().name().to_string(),
        field: case.field().name().to_string(),
        out: case.out.short(),
        inp: case.inp.short(),
        orbit: case.orbit.name().to_string(),
        block: case.sub.map(|s| s.describe()),
        oracle_dim: None,
        predicted_dim: None,
        analytic_count: None,
        gap_ratio: None,
        span_angle: f64::NAN,
        independence_min_eig: f64::NAN,
        max_base_residual: 0.0,
        max_stabilizer_residual: 0.0,
        max_section_residual: 0.0,
        max_steer_residual: 0.0,
        negative_control: None,
        passed: false,
        failures: vec![],
    };
    if let Err(e) = fill_case(case, opts, &mut report) {
        report.failures.push(format!("error: {e}"));
    }
    report.passed = report.failures.is_empty();
    report
}

fn fill_case(case: &CaseSpec, opts: &CheckOptions, r: &mut CaseReport) -> Result<()> {
    let mut rng = derived_rng(opts.seed, &r.key);
    let oracle = solve_case(case)?;
    let predicted = predicted_dimension_case(case)?;
    let elems = analytic_basis(case)?;
    r.oracle_dim = Some(oracle.dim());
    r.predicted_dim = Some(predicted);
    r.analytic_count = Some(elems.len());
    r.gap_ratio = oracle.gap_ratio.is_finite().then_some(oracle.gap_ratio);
    if oracle.dim() != predicted || elems.len() != predicted {
        r.failures.push(format!("dimension mismatch: oracle {}, predicted {predicted}, analytic {}", oracle.dim(), elems.len()));
    }

    let n = case.out.working_dim() * case.inp.working_dim();
    let field = case.field();
    let bases: Vec<&Dense> = elems.iter().map(|e| &e.base).collect();
    let oracle_span = oracle.full_span()?;
    let analytic_span = span_of(n, field, &bases)?;
    r.span_angle = principal_angle_distance(&analytic_span, &oracle_span)?.angle;
    if !(r.span_angle <= SPAN_TOL) {
        r.failures.push(format!("span angle {:.3e}", r.span_angle));
    }
    r.independence_min_eig = independence(n, &bases);
    if !(r.independence_min_eig >= INDEPENDENCE_TOL) {
        r.failures.push(format!("analytic elements dependent (min eig ratio {:.3e})", r.independence_min_eig));
    }
    for b in &bases {
        let res = oracle_span.residual(&b.vectorize()) / b.frobenius_norm().max(f64::MIN_POSITIVE);
        r.max_base_residual = r.max_base_residual.max(res);
    }
    if !(r.max_base_residual <= BASE_TOL) {
        r.failures.push(format!("base point outside oracle space ({:.3e})", r.max_base_residual));
    }

    stabilizer_and_section(case, opts, &elems, &oracle, &mut rng, r)?;

    let frames = (oracle.out_frame.clone(), oracle.in_frame.clone());
    let pairs = sample_pairs(case, opts, &mut rng, &frames)?;
    for e in &elems {
        for p in &pairs {
            r.max_steer_residual = r.max_steer_residual.max(p.residual(&e.base));
        }
    }
    if !(r.max_steer_residual <= STEER_TOL) {
        r.failures.push(format!("steering residual {:.3e}", r.max_steer_residual));
    }

    let (rows, cols) = oracle.compressed_shape();
    if oracle.dim() < rows * cols {
        let c = random_matrix(&mut rng, rows, cols, field);
        let k0 = &(&frames.0 * &c) * &frames.1.adjoint();
        let worst = pairs.iter().map(|p| p.residual(&k0)).fold(0.0, f64::max);
        r.negative_control = Some(worst);
        if !(worst >= NEGATIVE_CONTROL_MIN) {
            r.failures.push(format!("negative control passed the steering test ({worst:.3e})"));
        }
    }
    Ok(())
}

fn stabilizer_and_section(
    case: &CaseSpec,
    opts: &CheckOptions,
    elems: &[KernelBasisElement],
    oracle: &IntertwinerSpace,
    rng: &mut ChaCha8Rng,
    r: &mut CaseReport,
) -> Result<()> {
    let tag = case.group();
    let oracle_mats = oracle.matrices();
    for _ in 0..opts.stabilizer_draws {
        let h = random_stabilizer_element(tag, &case.orbit, rng)?;
        for k in elems.iter().map(|e| &e.base).chain(&oracle_mats) {
            r.max_stabilizer_residual = r.max_stabilizer_residual.max(stabilizer_residual(&case.out, &case.inp, k, &h)?);
        }
        let x = random_point(&case.orbit, rng, opts.max_rapidity);
        let s = coset_representative(tag, &x)?.compose(&h)?;
        let (a, b) = section_pair(case, &s)?;
        for e in elems {
            let want = e.evaluate(&x)?;
            let got = &(&a * &e.base) * &b;
            r.max_section_residual = r.max_section_residual.max((&got - &want).frobenius_norm() / want.frobenius_norm().max(1.0));
        }
    }
    if !(r.max_stabilizer_residual <= STEER_TOL) {
        r.failures.push(format!("stabilizer residual {:.3e}", r.max_stabilizer_residual));
    }
    if !(r.max_section_residual <= STEER_TOL) {
        r.failures.push(format!("section dependence {:.3e}", r.max_section_residual));
    }
    Ok(())
}

/// Every case of the verification grid, optionally limited to one group.
pub fn case_grid(group: Option<GroupTag>) -> Vec<CaseSpec> {
    let want = |t: GroupTag| group.map_or(true, |g| g == t);
    let mut cases = vec![];
    let circle = Orbit::Circle { radius: 1.0 };
    let sphere = Orbit::Sphere { radius: 1.0 };
    let pairs = |labels: &[IrrepLabel], orbit: Orbit, cases: &mut Vec<CaseSpec>| {
        for a in labels {
            for b in labels {
                cases.push(CaseSpec::new(*a, *b, orbit));
            }
        }
    };
    if want(GroupTag::So2) {
        pairs(&(0..=8).map(|j| IrrepLabel::So2Real { j }).collect::<Vec<_>>(), circle, &mut cases);
        pairs(&(0..=8).map(|n| IrrepLabel::So2Complex { n }).collect::<Vec<_>>(), circle, &mut cases);
    }
    if want(GroupTag::O2) {
        let kinds: Vec<O2Kind> = [O2Kind::Trivial, O2Kind::Sign].into_iter().chain((1..=8).map(O2Kind::Rot)).collect();
        pairs(&kinds.iter().map(|&kind| IrrepLabel::O2Real { kind }).collect::<Vec<_>>(), circle, &mut cases);
        pairs(&kinds.iter().map(|&kind| IrrepLabel::O2Complex { kind }).collect::<Vec<_>>(), circle, &mut cases);
    }
    if want(GroupTag::So3) {
        pairs(&(0..=4).map(|l| IrrepLabel::So3Real { l }).collect::<Vec<_>>(), sphere, &mut cases);
        pairs(&(0..=4).map(|l| IrrepLabel::So3Complex { l }).collect::<Vec<_>>(), sphere, &mut cases);
    }
    if want(GroupTag::O3) {
        let signed = |real: bool| -> Vec<IrrepLabel> {
            (0..=4)
                .flat_map(|l| [1i8, -1].map(|eps| if real { IrrepLabel::O3Real { l, eps } } else { IrrepLabel::O3Complex { l, eps } }))
                .collect()
        };
        pairs(&signed(true), sphere, &mut cases);
        pairs(&signed(false), sphere, &mut cases);
    }
    if want(GroupTag::Lorentz) {
        cases.extend(lorentz_cases());
    }
    cases
}

fn lorentz_cases() -> Vec<CaseSpec> {
    use IrrepLabel::{LorentzSpinor, LorentzTensor};
    let scalar = LorentzTensor { up: 0, down: 0 };
    let vector = LorentzTensor { up: 1, down: 0 };
    let covector = LorentzTensor { up: 0, down: 1 };
    let t20 = LorentzTensor { up: 2, down: 0 };
    let t11 = LorentzTensor { up: 1, down: 1 };
    let t02 = LorentzTensor { up: 0, down: 2 };
    let dirac = LorentzSpinor { spinor: Spinor::Dirac };
    let sv = LorentzSpinor { spinor: Spinor::SpinorVector };
    let massive = Orbit::Massive { mass: 1.0 };
    let mut v = vec![];
    let mut add = |o: IrrepLabel, i: IrrepLabel, sub: SubIrrep| v.push(CaseSpec::restricted(o, i, massive, sub));
    for (o, i) in [(scalar, scalar), (vector, scalar), (scalar, vector), (vector, vector), (t20, vector), (t20, t20)] {
        add(o, i, SubIrrep::Spin(0));
    }
    for (o, i) in [(vector, vector), (covector, vector), (t20, vector), (vector, t20), (t20, t20), (t11, t20)] {
        add(o, i, SubIrrep::Spin(2));
    }
    for (o, i) in [(t20, t20), (t02, t20), (t11, t11)] {
        add(o, i, SubIrrep::Spin(4));
    }
    for (o, i) in [(dirac, dirac), (sv, dirac), (dirac, sv), (sv, sv)] {
        add(o, i, SubIrrep::Spin(1));
    }
    add(sv, sv, SubIrrep::Spin(3));
    for (o, i) in [(vector, vector), (t20, vector), (t20, t20), (dirac, dirac)] {
        v.push(CaseSpec::new(o, i, massive));
    }
    for (o, i) in [(vector, vector), (covector, vector)] {
        v.push(CaseSpec::restricted(o, i, Orbit::Null, SubIrrep::So2Real(1)));
    }
    for (o, i) in [(t20, t20), (t02, t20)] {
        v.push(CaseSpec::restricted(o, i, Orbit::Null, SubIrrep::So2Real(2)));
    }
    v
}

/// Thread cap from `STEERKIT_THREADS` (unset means rayon's default).
pub fn configured_threads() -> Result<Option<usize>> {
    match std::env::var("STEERKIT_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => invalid(format!("STEERKIT_THREADS must be a positive integer, got '{s}'")),
        },
    }
}

/// Runs `f` inside a pool sized by [`configured_threads`].
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = configured_threads()? {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Checks many cases in parallel; the result is sorted by case key.
pub fn check_cases(cases: &[CaseSpec], opts: &CheckOptions) -> Vec<CaseReport> {
    let mut reports: Vec<CaseReport> = cases.par_iter().map(|c| check_case(c, opts)).collect();
    reports.sort_by(|a, b| a.key.cmp(&b.key));
    reports
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectorCheck {
    pub name: String,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectorReport {
    pub family: String,
    pub points: usize,
    pub checks: Vec<ProjectorCheck>,
    pub passed: bool,
}

struct Worst(Vec<(String, f64)>);

impl Worst {
    fn note(&mut self, name: &str, v: f64) {
        match self.0.iter_mut().find(|(n, _)| n == name) {
            Some((_, w)) => *w = w.max(v),
            None => self.0.push((name.to_string(), v)),
        }
    }

    fn report(self, family: &str, points: usize) -> ProjectorReport {
        let checks: Vec<ProjectorCheck> = self.0.into_iter().map(|(name, residual)| ProjectorCheck { name, residual }).collect();
        let passed = checks.iter().all(|c| c.residual <= PROJECTOR_TOL);
        ProjectorReport { family: family.to_string(), points, checks, passed }
    }
}

/// `‖A − B‖_max` relative to `max(1, ‖B‖_max)²`, the scale of products of
/// two factors like `B`.
fn rel_product(a: &Dense, b: &Dense) -> f64 {
    (a - b).max_abs() / b.max_abs().max(1.0).powi(2)
}

fn rel_zero(a: &Dense, scale: f64) -> f64 {
    a.max_abs() / scale.max(1.0)
}

fn vec_col(v: &Vec4) -> Dense {
    Dense::real_column_vector(v)
}

/// Projector identities at the base point and at random hyperboloid and
/// cone points, plus the massless gauge check.
pub fn check_projectors(seed: u64, points: usize, max_rapidity: f64) -> Vec<ProjectorReport> {
    let mut rng = derived_rng(seed, "projectors");
    let massive = Orbit::Massive { mass: 1.0 };
    let mut xs = vec![massive.base_point()];
    xs.extend((1..points).map(|_| random_point(&massive, &mut rng, max_rapidity)));
    let us: Vec<Vec4> = xs.iter().map(|x| velocity(x).expect("massive point")).collect();

    let mut delta = Worst(vec![]);
    let mut spin2 = Worst(vec![]);
    let mut energy = Worst(vec![]);
    let mut rs = Worst(vec![]);
    let g_lower = eta().kron(&eta());
    for u in &us {
        let d = massive_delta(u);
        delta.note("idempotent", rel_product(&(&d * &d), &d));
        delta.note("annihilates u", rel_zero(&(&d * &vec_col(u)), d.max_abs() * u[0]));
        delta.note("trace - 3", (d.trace().re - 3.0).abs());

        let p = symmetric_traceless(&d, 1.0 / 3.0);
        spin2.note("idempotent", rel_product(&(&p * &p), &p));
        spin2.note("trace - 5", (p.trace().re - 5.0).abs());
        let low = &g_lower * &p;
        spin2.note("pair exchange symmetry", rel_zero(&(&low - &low.transpose()), low.max_abs()));

        let (pp, pm) = (energy_projector(u, 1), energy_projector(u, -1));
        energy.note("P+ idempotent", rel_product(&(&pp * &pp), &pp));
        energy.note("P- idempotent", rel_product(&(&pm * &pm), &pm));
        energy.note("P+ + P- = 1", (&(&pp + &pm) - &Dense::identity(4)).max_abs());
        energy.note("P+ P- = 0", rel_zero(&(&pp * &pm), pp.max_abs().powi(2)));

        let pi = spin_three_halves(u);
        rs.note("idempotent", rel_product(&(&pi * &pi), &pi));
        let i4 = Dense::identity(4).into_complex();
        let ul = lower(u);
        let u_row = Dense::hstack(&(0..4).map(|m| i4.scale_re(ul[m])).collect::<Vec<_>>().iter().collect::<Vec<_>>());
        let u_col = Dense::vstack(&(0..4).map(|m| i4.scale_re(u[m])).collect::<Vec<_>>().iter().collect::<Vec<_>>());
        let scale = pi.max_abs() * u[0];
        rs.note("u contraction (left)", rel_zero(&(&u_row * &pi), scale));
        rs.note("u contraction (right)", rel_zero(&(&pi * &u_col), scale));
        // γ_⊥μ = γ_μ − u_μ u̸, stacked as a 4 × 16 row of blocks.
        let slash = (0..4).fold(Dense::zeros(4, 4).into_complex(), |acc, m| &acc + &gamma(m).scale_re(ul[m]));
        let perp: Vec<Dense> =
            (0..4).map(|m| &gamma(m).scale_re(crate::groups::METRIC[m]) - &slash.scale_re(ul[m])).collect();
        let perp_row = Dense::hstack(&perp.iter().collect::<Vec<_>>());
        rs.note("gamma_perp contraction", rel_zero(&(&perp_row * &pi), scale * perp_row.max_abs()));
    }

    let mut massless = Worst(vec![]);
    let mut gauge = Worst(vec![]);
    let mut cone = vec![Orbit::Null.base_point()];
    cone.extend((1..points).map(|_| random_point(&Orbit::Null, &mut rng, max_rapidity)));
    for x in &cone {
        let (n, nb) = null_frame(x, [0.0, 0.0]).expect("cone point");
        let d = massless_delta(&n, &nb);
        let scale = d.max_abs();
        massless.note("idempotent", rel_product(&(&d * &d), &d));
        massless.note("trace - 2", (d.trace().re - 2.0).abs());
        massless.note("annihilates n", rel_zero(&(&d * &vec_col(&n)), scale * n[0]));
        massless.note("annihilates nbar", rel_zero(&(&d * &vec_col(&nb)), scale * nb[0]));
        let lam = coset_representative(GroupTag::Lorentz, x).expect("cone point").matrix();
        let e = |k: usize| -> Vec4 { [lam.get(0, k).re, lam.get(1, k).re, lam.get(2, k).re, lam.get(3, k).re] };
        let mut span: Vec<Vec<C64>> =
            (1..3).map(|k| (&outer(&n, &lower(&e(k))) + &outer(&e(k), &lower(&n))).vectorize()).collect();
        span.push(outer(&n, &lower(&n)).vectorize());
        let basis = SubspaceBasis::spanning(16, &span, 1e-12).expect("finite span");
        for _ in 0..10 {
            let a = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let (_, nb2) = null_frame(x, a).expect("cone point");
            let diff = &massless_delta(&n, &nb2) - &d;
            gauge.note("shift outside gauge span", basis.residual(&diff.vectorize()) / diff.frobenius_norm().max(1.0));
        }
    }
    vec![
        delta.report("massive spatial projector", us.len()),
        spin2.report("spin-2 projector", us.len()),
        energy.report("energy projectors", us.len()),
        rs.report("spin-3/2 projector", us.len()),
        massless.report("massless transverse projector", cone.len()),
        gauge.report("massless gauge shift", cone.len()),
    ]
}

/// Kernel used by [`equivariance_demo`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DemoKernel {
    /// Random combination of the analytic basis.
    Steerable,
    /// Random smooth matrix-valued function of the angle (negative control).
    Random,
}

/// Index permutation of the grid induced by `g`; errors unless `g` maps grid
/// points onto grid points.
fn grid_action(g: &GroupElement, n: usize) -> Result<Vec<usize>> {
    (0..n)
        .map(|a| {
            let p = g.act(&OrbitPoint::circle(1.0, TAU * a as f64 / n as f64))?;
            let OrbitPoint::Circle { phi, .. } = p else { unreachable!("circle action stays on the circle") };
            let t = phi.rem_euclid(TAU) * n as f64 / TAU;
            let k = t.round();
            if (t - k).abs() > 1e-9 {
                return invalid(format!("group element is not aligned to a grid of {n} points"));
            }
            Ok(k as usize % n)
        })
        .collect()
}

/// Circle convolution `out_a = Σ_{b≠a} e^{−r²} K(ψ_ab) F_b` with grid
/// points `p_a = (cos φ_a, sin φ_a)`, `r = |p_b − p_a|` and `ψ_ab` the direction
/// of `p_b − p_a`. Returns the relative sup-norm discrepancy between
/// convolving the transformed field and transforming the convolved one.
pub fn equivariance_demo(
    out: &IrrepLabel,
    inp: &IrrepLabel,
    grid_size: usize,
    g: &GroupElement,
    kernel: DemoKernel,
    seed: u64,
) -> Result<f64> {
    if !matches!(out.group(), GroupTag::So2 | GroupTag::O2) {
        return invalid("the equivariance demo runs on SO(2) and O(2) labels only");
    }
    if grid_size < 32 {
        return invalid(format!("grid size must be at least 32, got {grid_size}"));
    }
    let case = CaseSpec::new(*out, *inp, Orbit::Circle { radius: 1.0 });
    case.validate()?;
    if g.tag() != case.group() {
        return invalid(format!("group element of {} used with {} labels", g.tag().name(), case.group().name()));
    }
    let perm = grid_action(g, grid_size)?;
    let field = case.field();
    let (dout, din) = (out.working_dim(), inp.working_dim());
    let mut rng = derived_rng(seed, &format!("demo/{}/{grid_size}/{kernel:?}", case_key(&case)));

    let eval: Box<dyn Fn(f64) -> Result<Dense>> = match kernel {
        DemoKernel::Steerable => {
            let elems = analytic_basis(&case)?;
            let w: Vec<C64> = elems.iter().map(|_| random_scalar(&mut rng, field)).collect();
            Box::new(move |psi| {
                let x = OrbitPoint::circle(1.0, psi);
                elems.iter().zip(&w).try_fold(Dense::zeros(dout, din), |acc, (e, c)| Ok(&acc + &e.evaluate(&x)?.scale(*c)))
            })
        }
        DemoKernel::Random => {
            let mats: Vec<Dense> = (0..3).map(|_| random_matrix(&mut rng, dout, din, field)).collect();
            Box::new(move |psi| Ok(&(&mats[0] + &mats[1].scale_re(psi.cos())) + &mats[2].scale_re((2.0 * psi).sin())))
        }
    };

    let n = grid_size;
    let angle = |a: usize| TAU * a as f64 / n as f64;
    // Band-limited input field: frequencies 0..=3 with random coefficients.
    let coeffs: Vec<(Vec<C64>, Vec<C64>)> = (0..=3)
        .map(|_| {
            let c = (0..din).map(|_| random_scalar(&mut rng, field)).collect();
            let s = (0..din).map(|_| random_scalar(&mut rng, field)).collect();
            (c, s)
        })
        .collect();
    let field_values: Vec<Vec<C64>> = (0..n)
        .map(|b| {
            let phi = angle(b);
            (0..din)
                .map(|i| coeffs.iter().enumerate().map(|(k, (c, s))| c[i] * (k as f64 * phi).cos() + s[i] * (k as f64 * phi).sin()).sum())
                .collect()
        })
        .collect();

    let mut kernels: Vec<Vec<Option<Dense>>> = vec![vec![None; n]; n];
    for (a, row) in kernels.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            if a != b {
                let (dx, dy) = (angle(b).cos() - angle(a).cos(), angle(b).sin() - angle(a).sin());
                let k = eval(dy.atan2(dx))?;
                *slot = Some(k.scale_re((-(dx * dx + dy * dy)).exp()));
            }
        }
    }
    let convolve = |f: &[Vec<C64>]| -> Vec<Vec<C64>> {
        (0..n)
            .map(|a| {
                let mut acc = vec![C64::new(0.0, 0.0); dout];
                for (b, k) in kernels[a].iter().enumerate() {
                    if let Some(k) = k {
                        for (o, v) in acc.iter_mut().zip(k.apply(&f[b])) {
                            *o += v;
                        }
                    }
                }
                acc
            })
            .collect()
    };
    // (g·F)_{σ(a)} = ρ(g) F_a.
    let act = |m: &Dense, f: &[Vec<C64>]| -> Vec<Vec<C64>> {
        let mut moved = vec![vec![]; n];
        for (a, v) in f.iter().enumerate() {
            moved[perm[a]] = m.apply(v);
        }
        moved
    };
    let rin = working_matrix(inp, g)?;
    let rout = working_matrix(out, g)?;
    let lhs = convolve(&act(&rin, &field_values));
    let rhs = act(&rout, &convolve(&field_values));
    let sup = |v: &[Vec<C64>]| v.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let diff: Vec<Vec<C64>> = lhs.iter().zip(&rhs).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
    let scale = sup(&rhs);
    Ok(if scale == 0.0 { sup(&diff) } else { sup(&diff) / scale })
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoReport {
    pub out: String,
    pub inp: String,
    pub grid_size: usize,
    pub element: String,
    pub kernel: DemoKernel,
    pub discrepancy: f64,
    pub passed: bool,
}

fn demo_cases() -> Vec<(IrrepLabel, IrrepLabel, GroupElement)> {
    let n = 256.0;
    let rot = GroupElement::so2(TAU * 37.0 / n);
    let refl = GroupElement::o2(TAU * 11.0 / n, -1);
    let so2 = |j| IrrepLabel::So2Real { j };
    let o2 = |j| IrrepLabel::O2Real { kind: O2Kind::Rot(j) };
    vec![
        (so2(0), so2(1), rot),
        (so2(1), so2(1), rot),
        (so2(2), so2(3), rot),
        (o2(1), o2(2), refl),
    ]
}

/// The demo on the fixed SO(2)/O(2) cases at 256 points, each with its
/// random-kernel control.
pub fn run_demos(seed: u64) -> Vec<DemoReport> {
    let mut v = vec![];
    for (out, inp, g) in demo_cases() {
        for kernel in [DemoKernel::Steerable, DemoKernel::Random] {
            let d = equivariance_demo(&out, &inp, 256, &g, kernel, seed).unwrap_or(f64::NAN);
            let passed = match kernel {
                DemoKernel::Steerable => d <= DEMO_TOL,
                DemoKernel::Random => d >= DEMO_NEGATIVE_MIN,
            };
            v.push(DemoReport {
                out: out.to_string(),
                inp: inp.to_string(),
                grid_size: 256,
                element: format!("{g:?}"),
                kernel,
                discrepancy: d,
                passed,
            });
        }
    }
    v
}

/// Real dimension of a complex solution space versus its real counterpart.
#[derive(Clone, Debug, Serialize)]
pub struct ReconciliationReport {
    pub group: String,
    pub j: u32,
    pub l: u32,
    /// Real dimension of each complex space that the real case decomposes into.
    pub complex_real_dims: Vec<usize>,
    pub real_dim: usize,
    pub relation: String,
    pub passed: bool,
}

fn oracle_dim(out: IrrepLabel, inp: IrrepLabel, orbit: Orbit) -> Result<usize> {
    Ok(solve_case(&CaseSpec::new(out, inp, orbit))?.dim())
}

/// Two oracle runs per case. SO(2): each complex `(±j, ±l)` space has real
/// dimension 2 and the real `(j, l)` space has the dimension of their complex
/// sum (one complex dimension per sign pair). SO(3): the complex space has
/// twice the real dimension.
pub fn reconciliation(max_label: u32) -> Result<Vec<ReconciliationReport>> {
    let circle = Orbit::Circle { radius: 1.0 };
    let sphere = Orbit::Sphere { radius: 1.0 };
    let mut v = vec![];
    for j in 1..=max_label {
        for l in 1..=max_label {
            let mut complex = vec![];
            for (sj, sl) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let (a, b) = (IrrepLabel::So2Complex { n: sj * j as i32 }, IrrepLabel::So2Complex { n: sl * l as i32 });
                complex.push(2 * oracle_dim(a, b, circle)?);
            }
            let real = oracle_dim(IrrepLabel::So2Real { j }, IrrepLabel::So2Real { j: l }, circle)?;
            let passed = complex.iter().all(|&d| d == 2) && real == complex.iter().sum::<usize>() / 2;
            v.push(ReconciliationReport {
                group: "so2".into(),
                j,
                l,
                complex_real_dims: complex,
                real_dim: real,
                relation: "real dim = sum of complex dims over sign pairs".into(),
                passed,
            });
        }
    }
    for j in 0..=max_label.min(4) {
        for l in 0..=max_label.min(4) {
            let c = 2 * oracle_dim(IrrepLabel::So3Complex { l: j }, IrrepLabel::So3Complex { l }, sphere)?;
            let r = oracle_dim(IrrepLabel::So3Real { l: j }, IrrepLabel::So3Real { l }, sphere)?;
            let m = j.min(l) as usize;
            v.push(ReconciliationReport {
                group: "so3".into(),
                j,
                l,
                complex_real_dims: vec![c],
                real_dim: r,
                relation: "2 * real dim = real dim of complex space".into(),
                passed: r == 2 * m + 1 && c == 4 * m + 2,
            });
        }
    }
    Ok(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub failed_cases: usize,
    pub failed_projector_families: usize,
    pub failed_demos: usize,
    pub failed_reconciliations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub format_version: u32,
    pub seed: u64,
    pub group: Option<String>,
    pub options: CheckOptions,
    pub cases: Vec<CaseReport>,
    pub projectors: Vec<ProjectorReport>,
    pub demos: Vec<DemoReport>,
    pub reconciliation: Vec<ReconciliationReport>,
    pub summary: Summary,
    pub passed: bool,
}

/// Full verification run. Projector checks belong to the Lorentz group, the
/// demo to SO(2)/O(2), reconciliation to SO(2)/SO(3).
pub fn run_verification(group: Option<GroupTag>, opts: &CheckOptions) -> Result<VerifyReport> {
    let want = |t: GroupTag| group.map_or(true, |g| g == t);
    let cases = case_grid(group);
    let reports = check_cases(&cases, opts);
    let projectors = if want(GroupTag::Lorentz) { check_projectors(opts.seed, 20, 2.0) } else { vec![] };
    let demos = if want(GroupTag::So2) || want(GroupTag::O2) {
        run_demos(opts.seed)
            .into_iter()
            .filter(|d| group.is_none() || d.out.starts_with(group.map(|g| g.name()).unwrap_or("")))
            .collect()
    } else {
        vec![]
    };
    let reconciliation = match group {
        None => reconciliation(8)?,
        Some(GroupTag::So2) => reconciliation(8)?.into_iter().filter(|r| r.group == "so2").collect(),
        Some(GroupTag::So3) => reconciliation(4)?.into_iter().filter(|r| r.group == "so3").collect(),
        _ => vec![],
    };
    let summary = Summary {
        cases: reports.len(),
        failed_cases: reports.iter().filter(|r| !r.passed).count(),
        failed_projector_families: projectors.iter().filter(|p| !p.passed).count(),
        failed_demos: demos.iter().filter(|d| !d.passed).count(),
        failed_reconciliations: reconciliation.iter().filter(|r| !r.passed).count(),
    };
    let passed = summary.failed_cases + summary.failed_projector_families + summary.failed_demos + summary.failed_reconciliations == 0;
    Ok(VerifyReport {
        format_version: REPORT_VERSION,
        seed: opts.seed,
        group: group.map(|g| g.name().to_string()),
        options: *opts,
        cases: reports,
        projectors,
        demos,
        reconciliation,
        summary,
        passed,
    })
}
