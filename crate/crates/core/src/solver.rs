//! Numerical intertwiner spaces at the orbit base point.
//!
//! The unknown `K` (rows: output, columns: input) must satisfy
//! `ρ_out(h) K ρ_in(h⁻¹) = K` for every stabilizer element `h`. Row-major
//! vectorization turns this into `(ρ_out(h) ⊗ ρ_in(h⁻¹)ᵀ − I) vec K = 0`; the
//! constraints for a generating sample of `h` are stacked and the nullspace
//! taken. No closed-form knowledge enters here.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::groups::{stabilizer_sample, GroupElement, GroupTag, Orbit};
use crate::irreps::restriction::{matched_dimension, SubIrrep};
use crate::irreps::{restrict_to_stabilizer, working_matrix, working_matrix_inverse, Field, IrrepLabel, O2Kind};
use crate::numerics::{nullspace_detailed, Dense, SubspaceBasis, DEFAULT_NULLSPACE_TOL};

/// Minimum accepted ratio between the smallest kept and largest dropped
/// singular value.
pub const REQUIRED_GAP: f64 = 1e6;

/// One kernel-space problem: output label, input label, orbit, and optionally
/// a single stabilizer isotype to restrict both sides to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub out: IrrepLabel,
    pub inp: IrrepLabel,
    pub orbit: Orbit,
    pub sub: Option<SubIrrep>,
}

impl CaseSpec {
    pub fn new(out: IrrepLabel, inp: IrrepLabel, orbit: Orbit) -> CaseSpec {
        CaseSpec { out, inp, orbit, sub: None }
    }

    pub fn restricted(out: IrrepLabel, inp: IrrepLabel, orbit: Orbit, sub: SubIrrep) -> CaseSpec {
        CaseSpec { out, inp, orbit, sub: Some(sub) }
    }

    pub fn group(&self) -> GroupTag {
        self.out.group()
    }

    pub fn field(&self) -> Field {
        self.out.field()
    }

    pub fn validate(&self) -> Result<()> {
        if self.out.group() != self.inp.group() {
            return invalid(format!("labels {} and {} belong to different groups", self.out, self.inp));
        }
        if self.out.field() != self.inp.field() {
            return invalid(format!("labels {} and {} use different scalar fields", self.out, self.inp));
        }
        if !self.orbit.supports(self.group()) {
            return invalid(format!("{} has no {} orbit", self.group().name(), self.orbit.name()));
        }
        self.orbit.validate()
    }

    pub fn describe(&self) -> String {
        let mut s = format!("{} -> {} on {}", self.inp, self.out, self.orbit.name());
        if let Some(sub) = self.sub {
            s.push_str(&format!(" [{}]", sub.describe()));
        }
        s
    }

    /// Isometries onto the selected blocks of each side (identity when unrestricted).
    pub fn frames(&self) -> Result<(Dense, Dense)> {
        let Some(sub) = self.sub else {
            return Ok((Dense::identity(self.out.working_dim()), Dense::identity(self.inp.working_dim())));
        };
        let pick = |label: &IrrepLabel| -> Result<Dense> {
            let rb = restrict_to_stabilizer(label, &self.orbit)?;
            let sel = rb.select(|s| s == sub);
            if sel.is_empty() {
                return invalid(format!("{label} has no {} block on the {} orbit", sub.describe(), self.orbit.name()));
            }
            let refs: Vec<&Dense> = sel.iter().map(|b| &b.basis).collect();
            Ok(Dense::hstack(&refs))
        };
        Ok((pick(&self.out)?, pick(&self.inp)?))
    }
}

/// Solution space of the base-point constraint.
#[derive(Clone, Debug)]
pub struct IntertwinerSpace {
    pub case: CaseSpec,
    pub field: Field,
    /// Working-space isometries of the selected output / input blocks.
    pub out_frame: Dense,
    pub in_frame: Dense,
    /// Orthonormal basis of row-major vectorized compressed matrices.
    pub basis: SubspaceBasis,
    pub singular_values: Vec<f64>,
    pub gap_ratio: f64,
}

impl IntertwinerSpace {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Shape of the compressed unknown `U_outᵀ K U_in`.
    pub fn compressed_shape(&self) -> (usize, usize) {
        (self.out_frame.cols(), self.in_frame.cols())
    }

    /// Basis elements as working-space matrices `U_out K_c U_in†`.
    pub fn matrices(&self) -> Vec<Dense> {
        let (r, c) = self.compressed_shape();
        self.basis
            .columns()
            .iter()
            .map(|v| {
                let k = Dense::from_vectorized(r, c, v);
                let k = if self.field == Field::Real { k.into_real(1e-12).unwrap_or_else(|e| panic!("{e}")) } else { k };
                &(&self.out_frame * &k) * &self.in_frame.adjoint()
            })
            .collect()
    }

    /// Span of [`IntertwinerSpace::matrices`] as vectors of the full matrix space.
    pub fn full_span(&self) -> Result<SubspaceBasis> {
        let n = self.case.out.working_dim() * self.case.inp.working_dim();
        let cols: Vec<_> = self.matrices().iter().map(|m| m.vectorize()).collect();
        let m = Dense::from_columns(n, &cols);
        let m = if self.field == Field::Real { m.into_real(1e-12)? } else { m.into_complex() };
        SubspaceBasis::from_orthonormal(m)
    }
}

/// Largest entry of `ρ_out(h) K ρ_in(h⁻¹) − K`, relative to `max(1, max|K|)`.
pub fn stabilizer_residual(out: &IrrepLabel, inp: &IrrepLabel, k: &Dense, h: &GroupElement) -> Result<f64> {
    let a = working_matrix(out, h)?;
    let b = working_matrix_inverse(inp, h)?;
    let steered = &(&a * k) * &b;
    // Both sides use the same lift of h, so the projective sign cancels.
    Ok((&steered - k).max_abs() / k.max_abs().max(1.0))
}

/// Compressed constraint stack for the sampled stabilizer.
fn constraint_matrix(case: &CaseSpec, out_frame: &Dense, in_frame: &Dense) -> Result<Dense> {
    let sample = stabilizer_sample(case.group(), &case.orbit)?;
    let (r, c) = (out_frame.cols(), in_frame.cols());
    let id = Dense::identity(r * c);
    let mut rows = Vec::with_capacity(sample.elements.len());
    for h in &sample.elements {
        let a = &(&out_frame.adjoint() * &working_matrix(&case.out, h)?) * out_frame;
        let b = &(&in_frame.adjoint() * &working_matrix_inverse(&case.inp, h)?) * in_frame;
        let mut block = &a.kron(&b.transpose()) - &id;
        if case.field() == Field::Real {
            block = block.into_real(1e-10)?;
        }
        rows.push(block);
    }
    let refs: Vec<&Dense> = rows.iter().collect();
    Ok(Dense::vstack(&refs))
}

/// Solves the base-point constraint for `case`.
pub fn solve_case(case: &CaseSpec) -> Result<IntertwinerSpace> {
    case.validate()?;
    if case.out.is_spinor() != case.inp.is_spinor() {
        return invalid("kernels between spinor and tensor labels are not single-valued; pair spinors with spinors");
    }
    let (out_frame, in_frame) = case.frames()?;
    let stack = constraint_matrix(case, &out_frame, &in_frame)?;
    let n = stack.cols();
    let (basis, singular_values, gap_ratio) = if stack.max_abs() <= 1e-12 {
        let id = Dense::identity(n);
        let id = if case.field() == Field::Complex { id.into_complex() } else { id };
        (SubspaceBasis::from_orthonormal(id)?, vec![0.0; n], f64::INFINITY)
    } else {
        let ns = nullspace_detailed(&stack, DEFAULT_NULLSPACE_TOL)?;
        if ns.gap_ratio < REQUIRED_GAP {
            return Err(Error::DegenerateSpectrum { gap_ratio: ns.gap_ratio, required: REQUIRED_GAP });
        }
        (ns.basis, ns.singular_values, ns.gap_ratio)
    };
    Ok(IntertwinerSpace { case: *case, field: case.field(), out_frame, in_frame, basis, singular_values, gap_ratio })
}

/// Solves the unrestricted problem for labels `j` (output) and `l` (input).
pub fn solve_basepoint(j: &IrrepLabel, l: &IrrepLabel, orbit: &Orbit) -> Result<IntertwinerSpace> {
    solve_case(&CaseSpec::new(*j, *l, *orbit))
}

fn o2_count(a: O2Kind, b: O2Kind) -> usize {
    use O2Kind::*;
    match (a, b) {
        (Trivial, Trivial) | (Sign, Sign) => 1,
        (Trivial, Sign) | (Sign, Trivial) => 0,
        (Rot(_), Rot(_)) => 2,
        _ => 1,
    }
}

/// Closed-form dimension of the solution space (over the label's field).
pub fn predicted_dimension_case(case: &CaseSpec) -> Result<usize> {
    case.validate()?;
    use IrrepLabel::*;
    if case.sub.is_none() {
        match (case.out, case.inp) {
            (So2Complex { .. }, So2Complex { .. }) => return Ok(1),
            (So2Real { .. }, So2Real { .. }) => return Ok(case.out.dim() * case.inp.dim()),
            (O2Real { kind: a }, O2Real { kind: b }) | (O2Complex { kind: a }, O2Complex { kind: b }) => {
                return Ok(o2_count(a, b))
            }
            (So3Complex { l: a }, So3Complex { l: b }) | (So3Real { l: a }, So3Real { l: b }) => {
                return Ok(2 * a.min(b) as usize + 1)
            }
            (O3Complex { l: a, eps: ea }, O3Complex { l: b, eps: eb })
            | (O3Real { l: a, eps: ea }, O3Real { l: b, eps: eb }) => {
                let m = a.min(b) as usize;
                return Ok(if ea == eb { m + 1 } else { m });
            }
            _ => {}
        }
    }
    if case.out.is_spinor() != case.inp.is_spinor() {
        return invalid("kernels between spinor and tensor labels are not supported");
    }
    // Schur: sum over matching stabilizer isotypes of dim End.
    let ro = restrict_to_stabilizer(&case.out, &case.orbit)?;
    let ri = restrict_to_stabilizer(&case.inp, &case.orbit)?;
    let keep = |s: SubIrrep| case.sub.map_or(true, |t| t == s);
    Ok(matched_dimension(&ro.select(keep), &ri.select(keep)))
}

pub fn predicted_dimension(j: &IrrepLabel, l: &IrrepLabel, orbit: &Orbit) -> Result<usize> {
    predicted_dimension_case(&CaseSpec::new(*j, *l, *orbit))
}
