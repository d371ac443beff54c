//! `steerkit` command-line front end.
//!
//! Exit codes: 0 success, 1 numerical failure or failed check (a JSON error
//! object or the failing report is printed), 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use steerkit::analytic::analytic_basis;
use steerkit::export::{write_dump, GridSpec};
use steerkit::groups::{GroupTag, Orbit, OrbitPoint};
use steerkit::irreps::{Field, IrrepLabel, Spinor, SubIrrep};
use steerkit::numerics::{Dense, C64};
use steerkit::solver::{predicted_dimension_case, solve_case, CaseSpec};
use steerkit::verify::{run_verification, with_thread_pool, CheckOptions};
use steerkit::{Error, Result};

#[derive(Parser)]
#[command(name = "steerkit", version, about = "Bases of steerable kernels: dimensions, evaluation, verification, sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predicted vs oracle dimension for every label pair up to --jmax.
    Dims {
        #[arg(long)]
        group: String,
        #[arg(long)]
        jmax: u32,
        #[arg(long, default_value = "real")]
        field: String,
        #[arg(long)]
        orbit: Option<String>,
    },
    /// Every basis element evaluated at one orbit point.
    Basis {
        #[command(flatten)]
        case: CaseArgs,
        /// Circle: angle or x,y. Sphere: alpha,beta or x,y,z.
        /// Lorentz: alpha,beta,eta or x0,x1,x2,x3.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Runs the verification grid and prints the JSON report.
    Verify {
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Samples a basis on a grid and writes `<out>.json` and `<out>.bin`.
    Sample {
        #[command(flatten)]
        case: CaseArgs,
        /// circle:N[:R], sphere:NA,NB[:R], hyperboloid:NA,NB,NE,EMAX[:M], cone:NA,NB,NE,EMAX
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CaseArgs {
    #[arg(long)]
    group: String,
    /// Output label.
    #[arg(long, allow_hyphen_values = true)]
    j: String,
    /// Input label.
    #[arg(long, allow_hyphen_values = true)]
    l: String,
    #[arg(long, default_value = "real")]
    field: String,
    /// circle[:R], sphere[:R], massive[:M] or null.
    #[arg(long)]
    orbit: Option<String>,
    /// Lorentz only: restrict to one stabilizer block (0, 1/2, 1, 3/2, 2).
    #[arg(long)]
    spin: Option<String>,
}

fn parse_orbit(tag: GroupTag, s: Option<&str>) -> Result<Orbit> {
    let Some(s) = s else { return Ok(Orbit::default_for(tag)) };
    let (kind, scale) = match s.split_once(':') {
        Some((k, v)) => (k, Some(v.parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad orbit scale in '{s}'")))?)),
        None => (s, None),
    };
    let one = scale.unwrap_or(1.0);
    let orbit = match kind.to_ascii_lowercase().as_str() {
        "circle" => Orbit::Circle { radius: one },
        "sphere" => Orbit::Sphere { radius: one },
        "massive" | "hyperboloid" => Orbit::Massive { mass: one },
        "null" | "cone" if scale.is_none() => Orbit::Null,
        _ => return Err(Error::InvalidInput(format!("unknown orbit '{s}'"))),
    };
    if !orbit.supports(tag) {
        return Err(Error::InvalidInput(format!("{} has no {} orbit", tag.name(), orbit.name())));
    }
    orbit.validate()?;
    Ok(orbit)
}

fn parse_spin(s: &str, orbit: &Orbit) -> Result<SubIrrep> {
    let bad = || Error::InvalidInput(format!("cannot parse spin '{s}'"));
    let twice = match s.split_once('/') {
        Some((num, "2")) => num.parse::<u32>().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => 2 * s.parse::<u32>().map_err(|_| bad())?,
    };
    match orbit {
        Orbit::Massive { .. } => Ok(SubIrrep::Spin(twice)),
        Orbit::Null if twice % 2 == 0 => Ok(SubIrrep::So2Real(twice / 2)),
        _ => Err(Error::InvalidInput(format!("spin {s} is not a block label on the {} orbit", orbit.name()))),
    }
}

impl CaseArgs {
    fn case(&self) -> Result<CaseSpec> {
        let tag = GroupTag::parse(&self.group)?;
        let field = Field::parse(&self.field)?;
        let out = IrrepLabel::parse(tag, field, &self.j)?;
        let inp = IrrepLabel::parse(tag, field, &self.l)?;
        let orbit = parse_orbit(tag, self.orbit.as_deref())?;
        let case = match &self.spin {
            None => CaseSpec::new(out, inp, orbit),
            Some(_) if tag != GroupTag::Lorentz => return Err(Error::InvalidInput("--spin applies to Lorentz cases only".into())),
            Some(s) => CaseSpec::restricted(out, inp, orbit, parse_spin(s, &orbit)?),
        };
        case.validate()?;
        Ok(case)
    }
}

fn parse_point(orbit: &Orbit, s: &str) -> Result<OrbitPoint> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad coordinate '{t}' in '{s}'"))))
        .collect::<Result<_>>()?;
    let p = match (*orbit, v.as_slice()) {
        (Orbit::Circle { radius }, [phi]) => OrbitPoint::circle(radius, *phi),
        (Orbit::Sphere { radius }, [a, b]) => OrbitPoint::sphere(radius, *a, *b),
        (Orbit::Massive { mass }, [a, b, e]) => OrbitPoint::massive(mass, *a, *b, *e),
        (Orbit::Null, [a, b, e]) => OrbitPoint::null(*a, *b, *e),
        (o, c) if c.len() == o.dim() => OrbitPoint::from_coordinates(o, c)?,
        _ => return Err(Error::InvalidInput(format!("'{s}' is not a point on the {} orbit", orbit.name()))),
    };
    p.validate()?;
    Ok(p)
}

fn matrix_json(m: &Dense, complex: bool) -> Value {
    let part = |f: fn(C64) -> f64| -> Vec<Vec<f64>> {
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(m.get(i, j))).collect()).collect()
    };
    let mut o = json!({ "rows": m.rows(), "cols": m.cols(), "re": part(|z| z.re) });
    if complex {
        o["im"] = json!(part(|z| z.im));
    }
    o
}

fn labels_for(tag: GroupTag, field: Field, jmax: u32) -> Vec<IrrepLabel> {
    use steerkit::irreps::O2Kind;
    match (tag, field) {
        (GroupTag::So2, Field::Real) => (0..=jmax).map(|j| IrrepLabel::So2Real { j }).collect(),
        (GroupTag::So2, Field::Complex) => (-(jmax as i32)..=jmax as i32).map(|n| IrrepLabel::So2Complex { n }).collect(),
        (GroupTag::O2, _) => [O2Kind::Trivial, O2Kind::Sign]
            .into_iter()
            .chain((1..=jmax).map(O2Kind::Rot))
            .map(|kind| if field == Field::Real { IrrepLabel::O2Real { kind } } else { IrrepLabel::O2Complex { kind } })
            .collect(),
        (GroupTag::So3, Field::Real) => (0..=jmax).map(|l| IrrepLabel::So3Real { l }).collect(),
        (GroupTag::So3, Field::Complex) => (0..=jmax).map(|l| IrrepLabel::So3Complex { l }).collect(),
        (GroupTag::O3, _) => (0..=jmax)
            .flat_map(|l| [1i8, -1].map(|eps| IrrepLabel::o3(l, eps, field).expect("valid sign")))
            .collect(),
        (GroupTag::Lorentz, _) => [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
            .into_iter()
            .map(|(up, down)| IrrepLabel::LorentzTensor { up, down })
            .collect(),
    }
}

fn dims_cases(tag: GroupTag, field: Field, jmax: u32, orbit: Orbit) -> Vec<CaseSpec> {
    let labels = labels_for(tag, field, jmax);
    let mut cases: Vec<CaseSpec> = labels.iter().flat_map(|a| labels.iter().map(move |b| CaseSpec::new(*a, *b, orbit))).collect();
    if tag == GroupTag::Lorentz && matches!(orbit, Orbit::Massive { .. }) {
        // Spinor spaces are large; tabulate them per spin block.
        let d = IrrepLabel::LorentzSpinor { spinor: Spinor::Dirac };
        let sv = IrrepLabel::LorentzSpinor { spinor: Spinor::SpinorVector };
        for (a, b) in [(d, d), (sv, d), (d, sv), (sv, sv)] {
            cases.push(CaseSpec::restricted(a, b, orbit, SubIrrep::Spin(1)));
        }
        cases.push(CaseSpec::restricted(sv, sv, orbit, SubIrrep::Spin(3)));
    }
    cases
}

fn run_dims(group: &str, jmax: u32, field: &str, orbit: Option<&str>) -> Result<(Value, bool)> {
    let tag = GroupTag::parse(group)?;
    let field = Field::parse(field)?;
    let orbit = parse_orbit(tag, orbit)?;
    let cases = dims_cases(tag, field, jmax, orbit);
    let rows = with_thread_pool(|| {
        use rayon::prelude::*;
        cases
            .par_iter()
            .map(|c| -> Result<Value> {
                let predicted = predicted_dimension_case(c)?;
                let oracle = solve_case(c)?.dim();
                let analytic = analytic_basis(c)?.len();
                Ok(json!({
                    "j": c.out.short(),
                    "l": c.inp.short(),
                    "block": c.sub.map(|s| s.describe()),
                    "predicted": predicted,
                    "oracle": oracle,
                    "analytic": analytic,
                    "agree": predicted == oracle && oracle == analytic,
                }))
            })
            .collect::<Result<Vec<Value>>>()
    })??;
    let ok = rows.iter().all(|r| r["agree"] == json!(true));
    let out = json!({
        "group": tag.name(),
        "field": field.name(),
        "orbit": orbit,
        "jmax": jmax,
        "rows": rows,
        "all_agree": ok,
    });
    Ok((out, ok))
}

fn run_basis(args: &CaseArgs, point: &str) -> Result<Value> {
    let case = args.case()?;
    let x = parse_point(&case.orbit, point)?;
    let complex = case.field() == Field::Complex;
    let elems = analytic_basis(&case)?;
    let mut items = vec![];
    for e in &elems {
        items.push(json!({ "index": e.index, "kind": e.kind, "matrix": matrix_json(&e.evaluate(&x)?, complex) }));
    }
    Ok(json!({
        "group": case.group().name(),
        "field": case.field().name(),
        "j": case.out.short(),
        "l": case.inp.short(),
        "block": case.sub.map(|s| s.describe()),
        "orbit": case.orbit,
        "point": x,
        "coordinates": x.coordinates(),
        "working_dims": [case.out.working_dim(), case.inp.working_dim()],
        "elements": items,
    }))
}

fn error_json(e: &Error) -> Value {
    let kind = match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::DegenerateSpectrum { .. } => "degenerate_spectrum",
        Error::Io(_) => "io",
        Error::Format(_) => "format",
    };
    json!({ "error": { "kind": kind, "message": e.to_string() } })
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Dims { group, jmax, field, orbit } => {
            let (v, ok) = run_dims(&group, jmax, &field, orbit.as_deref())?;
            print(&v);
            Ok(ok)
        }
        Command::Basis { case, point } => {
            print(&run_basis(&case, &point)?);
            Ok(true)
        }
        Command::Verify { group, seed } => {
            let tag = group.as_deref().map(GroupTag::parse).transpose()?;
            let opts = CheckOptions::with_seed(seed);
            let report = with_thread_pool(|| run_verification(tag, &opts))??;
            let v = serde_json::to_value(&report).map_err(|e| Error::Format(e.to_string()))?;
            print(&v);
            Ok(report.passed)
        }
        Command::Sample { case, grid, out } => {
            let c = case.case()?;
            let g = GridSpec::parse(&grid)?;
            let manifest = with_thread_pool(|| write_dump(&out, &c, &g))??;
            print(&serde_json::to_value(&manifest).map_err(|e| Error::Format(e.to_string()))?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            print(&error_json(&e));
            ExitCode::from(1)
        }
    }
}
