//! Closed-form base-point intertwiners.
//!
//! Every basis element stores only its base-point matrix `K(x₀)` on the
//! working spaces; values elsewhere come from steering along the coset
//! section. Closed forms away from the base point (Wigner products,
//! projectors) are reproduced in the tests as independent checks.

pub mod lorentz;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::groups::{GroupTag, Orbit, OrbitPoint};
use crate::irreps::wigner::real_index;
use crate::irreps::{Field, IrrepLabel, O2Kind};
use crate::numerics::Dense;
use crate::solver::CaseSpec;
use crate::steering;

pub use lorentz::{basis_lorentz_massive, basis_lorentz_massless};

#[derive(Clone, Debug, Serialize)]
pub struct KernelBasisElement {
    pub case: CaseSpec,
    pub index: usize,
    /// Short description of the element type (weight, 𝕀/J type, block pair, …).
    pub kind: String,
    #[serde(skip)]
    pub base: Dense,
}

impl KernelBasisElement {
    pub fn group(&self) -> GroupTag {
        self.case.group()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.base.shape()
    }

    pub fn evaluate(&self, x: &OrbitPoint) -> Result<Dense> {
        steering::kernel_at(self, x)
    }
}

/// Numbers the raw `(kind, matrix)` pairs of one case.
fn finish(case: CaseSpec, raw: Vec<(String, Dense)>) -> Vec<KernelBasisElement> {
    let complex = case.field() == Field::Complex;
    raw.into_iter()
        .enumerate()
        .map(|(index, (kind, base))| KernelBasisElement {
            case,
            index,
            kind,
            base: if complex { base.into_complex() } else { base },
        })
        .collect()
}

/// Matrix with the given `(row, col, value)` entries.
fn sparse(rows: usize, cols: usize, entries: &[(usize, usize, f64)]) -> Dense {
    let mut m = Dense::zeros(rows, cols);
    for &(i, j, v) in entries {
        m.set_re(i, j, m.get(i, j).re + v);
    }
    m
}

fn require_orbit(case: &CaseSpec, want: fn(&Orbit) -> bool) -> Result<()> {
    case.validate()?;
    if !want(&case.orbit) {
        return invalid(format!("{} kernels are not defined on a {} orbit", case.group().name(), case.orbit.name()));
    }
    if case.sub.is_some() {
        return invalid("block restriction is only supported for Lorentz cases");
    }
    Ok(())
}

/// SO(2), real or complex according to the labels.
pub fn basis_so2(out: &IrrepLabel, inp: &IrrepLabel, orbit: &Orbit) -> Result<Vec<KernelBasisElement>> {
    let case = CaseSpec::new(*out, *inp, *orbit);
    require_orbit(&case, |o| matches!(o, Orbit::Circle { .. }))?;
    let raw = match (*out, *inp) {
        (IrrepLabel::So2Complex { .. }, IrrepLabel::So2Complex { .. }) => vec![("1".to_string(), Dense::identity(1))],
        (IrrepLabel::So2Real { j }, IrrepLabel::So2Real { j: l }) => {
            let (r, c) = (out.dim(), inp.dim());
            match (j, l) {
                (0, 0) => vec![("1".into(), Dense::identity(1))],
                (0, _) => vec![("e1".into(), sparse(r, c, &[(0, 0, 1.0)])), ("e2".into(), sparse(r, c, &[(0, 1, 1.0)]))],
                (_, 0) => vec![("e1".into(), sparse(r, c, &[(0, 0, 1.0)])), ("e2".into(), sparse(r, c, &[(1, 0, 1.0)]))],
                _ => [(0, 0), (0, 1), (1, 0), (1, 1)]
                    .iter()
                    .map(|&(a, b)| (format!("E{}{}", a + 1, b + 1), sparse(2, 2, &[(a, b, 1.0)])))
                    .collect(),
            }
        }
        _ => return invalid(format!("basis_so2 needs SO(2) labels, got {out} and {inp}")),
    };
    Ok(finish(case, raw))
}

/// O(2), real or complex according to the labels.
pub fn basis_o2(out: &IrrepLabel, inp: &IrrepLabel, orbit: &Orbit) -> Result<Vec<KernelBasisElement>> {
    use O2Kind::*;
    let case = CaseSpec::new(*out, *inp, *orbit);
    require_orbit(&case, |o| matches!(o, Orbit::Circle { .. }))?;
    let (a, b, complex) = match (*out, *inp) {
        (IrrepLabel::O2Real { kind: a }, IrrepLabel::O2Real { kind: b }) => (a, b, false),
        (IrrepLabel::O2Complex { kind: a }, IrrepLabel::O2Complex { kind: b }) => (a, b, true),
        _ => return invalid(format!("basis_o2 needs O(2) labels, got {out} and {inp}")),
    };
    let (r, c) = (out.dim(), inp.dim());
    // The reflection r_y fixes e1 and negates e2 (real), or swaps the two
    // weights (complex); kernels live on the matching eigenvectors.
    let plus = |n: usize| if complex { vec![1.0; n] } else { (0..n).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect() };
    let minus = |_: usize| if complex { vec![1.0, -1.0] } else { vec![0.0, 1.0] };
    let row = |v: Vec<f64>| Dense::from_real(1, v.len(), v);
    let col = |v: Vec<f64>| Dense::from_real(v.len(), 1, v);
    let raw: Vec<(String, Dense)> = match (a, b) {
        (Trivial, Trivial) | (Sign, Sign) => vec![("1".into(), Dense::identity(1))],
        (Trivial, Sign) | (Sign, Trivial) => vec![],
        (Trivial, Rot(_)) => vec![("+".into(), row(plus(c)))],
        (Sign, Rot(_)) => vec![("-".into(), row(minus(c)))],
        (Rot(_), Trivial) => vec![("+".into(), col(plus(r)))],
        (Rot(_), Sign) => vec![("-".into(), col(minus(r)))],
        (Rot(_), Rot(_)) => {
            if complex {
                vec![("I".into(), Dense::identity(2)), ("sigma1".into(), sparse(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]))]
            } else {
                vec![("E11".into(), sparse(2, 2, &[(0, 0, 1.0)])), ("E22".into(), sparse(2, 2, &[(1, 1, 1.0)]))]
            }
        }
    };
    Ok(finish(case, raw))
}

/// SO(3): `2·min(j,l)+1` elements.
pub fn basis_so3(out: &IrrepLabel, inp: &IrrepLabel, orbit: &Orbit) -> Result<Vec<KernelBasisElement>> {
    let case = CaseSpec::new(*out, *inp, *orbit);
    require_orbit(&case, |o| matches!(o, Orbit::Sphere { .. }))?;
    let raw = match (*out, *inp) {
        (IrrepLabel::So3Complex { l: j }, IrrepLabel::So3Complex { l }) => complex_weights(j, l, |_| true, 0.0),
        (IrrepLabel::So3Real { l: j }, IrrepLabel::So3Real { l }) => real_blocks(j, l, true, true),
        _ => return invalid(format!("basis_so3 needs SO(3) labels, got {out} and {inp}")),
    };
    Ok(finish(case, raw))
}

/// O(3): `min(j,l)+1` elements for equal signs, `min(j,l)` otherwise.
pub fn basis_o3(out: &IrrepLabel, inp: &IrrepLabel, orbit: &Orbit) -> Result<Vec<KernelBasisElement>> {
    let case = CaseSpec::new(*out, *inp, *orbit);
    require_orbit(&case, |o| matches!(o, Orbit::Sphere { .. }))?;
    let raw = match (*out, *inp) {
        (IrrepLabel::O3Complex { l: j, eps: ej }, IrrepLabel::O3Complex { l, eps: el }) => {
            // r_y sends |jm⟩⟨lm| to ε_j ε_l |j,−m⟩⟨l,−m|.
            let sign = (ej * el) as f64;
            complex_weights(j, l, |m| m >= 0 && (m > 0 || sign > 0.0), sign)
        }
        (IrrepLabel::O3Real { l: j, eps: ej }, IrrepLabel::O3Real { l, eps: el }) => real_blocks(j, l, ej == el, ej != el),
        _ => return invalid(format!("basis_o3 needs O(3) labels, got {out} and {inp}")),
    };
    Ok(finish(case, raw))
}

/// `|j m⟩⟨l m|` (plus `partner·|j,−m⟩⟨l,−m|` for `m > 0` when `partner ≠ 0`)
/// for the weights `m ≤ min(j,l)` accepted by `keep`, descending.
fn complex_weights(j: u32, l: u32, keep: impl Fn(i32) -> bool, partner: f64) -> Vec<(String, Dense)> {
    let (j, l) = (j as i32, l as i32);
    let (r, c) = ((2 * j + 1) as usize, (2 * l + 1) as usize);
    let at = |m: i32| ((j - m) as usize, (l - m) as usize);
    let mut out = vec![];
    for m in (-j.min(l)..=j.min(l)).rev().filter(|&m| keep(m)) {
        let (a, b) = at(m);
        let mut entries = vec![(a, b, 1.0)];
        if partner != 0.0 && m > 0 {
            let (a2, b2) = at(-m);
            entries.push((a2, b2, partner));
        }
        out.push((format!("m={m}"), sparse(r, c, &entries)));
    }
    out
}

/// Real-harmonic blocks: `|j0⟩⟨l0|`, then per `m ≥ 1` the 𝕀-type and/or
/// J-type maps between the `(Y^c_m, Y^s_m)` pairs.
fn real_blocks(j: u32, l: u32, with_zero_and_identity: bool, with_j: bool) -> Vec<(String, Dense)> {
    let (r, c) = ((2 * j + 1) as usize, (2 * l + 1) as usize);
    let mut out = vec![];
    if with_zero_and_identity {
        out.push(("m=0".into(), sparse(r, c, &[(0, 0, 1.0)])));
    }
    for m in 1..=j.min(l) as i32 {
        let (cs, sn) = (real_index(m), real_index(-m));
        if with_zero_and_identity {
            out.push((format!("m={m},I"), sparse(r, c, &[(cs, cs, 1.0), (sn, sn, 1.0)])));
        }
        if with_j {
            out.push((format!("m={m},J"), sparse(r, c, &[(cs, sn, -1.0), (sn, cs, 1.0)])));
        }
    }
    out
}

/// Closed-form basis for any supported case.
pub fn analytic_basis(case: &CaseSpec) -> Result<Vec<KernelBasisElement>> {
    case.validate()?;
    match case.group() {
        GroupTag::So2 => basis_so2(&case.out, &case.inp, &case.orbit),
        GroupTag::O2 => basis_o2(&case.out, &case.inp, &case.orbit),
        GroupTag::So3 => basis_so3(&case.out, &case.inp, &case.orbit),
        GroupTag::O3 => basis_o3(&case.out, &case.inp, &case.orbit),
        GroupTag::Lorentz => match case.orbit {
            Orbit::Massive { .. } => basis_lorentz_massive(case),
            _ => basis_lorentz_massless(case),
        },
    }
}
