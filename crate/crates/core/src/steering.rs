//! Extension of a base-point intertwiner over its orbit:
//! `K(g·x₀) = ρ_out(g) K(x₀) ρ_in(g)⁻¹`, evaluated through the coset section.

use crate::analytic::KernelBasisElement;
use crate::error::{invalid, Result};
use crate::groups::{coset_representative, GroupElement, OrbitPoint};
use crate::irreps::{working_matrix, working_matrix_inverse, IrrepLabel};
use crate::numerics::Dense;

/// `ρ_out(g) · k0 · ρ_in(g)⁻¹` on working spaces.
pub fn steer(k0: &Dense, out: &IrrepLabel, inp: &IrrepLabel, g: &GroupElement) -> Result<Dense> {
    if k0.shape() != (out.working_dim(), inp.working_dim()) {
        return invalid(format!(
            "kernel shape {:?} does not match labels {out} ({}) and {inp} ({})",
            k0.shape(),
            out.working_dim(),
            inp.working_dim()
        ));
    }
    if g.tag() != out.group() || g.tag() != inp.group() {
        return invalid(format!("cannot steer {} kernels with a {} element", out.group().name(), g.tag().name()));
    }
    let a = working_matrix(out, g)?;
    let b = working_matrix_inverse(inp, g)?;
    Ok(&(&a * k0) * &b)
}

/// Value of a basis element at `x`, steered from the base point along the
/// coset section.
pub fn kernel_at(elem: &KernelBasisElement, x: &OrbitPoint) -> Result<Dense> {
    let orbit = elem.case.orbit;
    if x.orbit() != orbit {
        return invalid(format!("point on a {} orbit, element defined on a {} orbit", x.orbit().name(), orbit.name()));
    }
    let g = coset_representative(elem.group(), x)?;
    steer(&elem.base, &elem.case.out, &elem.case.inp, &g)
}

/// Relative Frobenius residual `‖K(g·x) − ρ_out(g) K(x) ρ_in(g)⁻¹‖ / max(1, ‖K(x)‖)`.
pub fn steerability_residual(elem: &KernelBasisElement, g: &GroupElement, x: &OrbitPoint) -> Result<f64> {
    let kx = kernel_at(elem, x)?;
    let kgx = kernel_at(elem, &g.act(x)?)?;
    let moved = steer(&kx, &elem.case.out, &elem.case.inp, g)?;
    Ok((&kgx - &moved).frobenius_norm() / kx.frobenius_norm().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupTag;
    use crate::irreps::O2Kind;
    use crate::numerics::C64;

    #[test]
    fn identity_and_composition() {
        let (out, inp) = (IrrepLabel::So3Real { l: 2 }, IrrepLabel::So3Real { l: 1 });
        let k0 = Dense::from_real_fn(5, 3, |i, j| (i as f64 + 1.0) * 0.3 - j as f64);
        let e = GroupElement::identity(GroupTag::So3);
        assert!(steer(&k0, &out, &inp, &e).unwrap().rel_distance(&k0) < 1e-15);
        let (a, b) = (GroupElement::so3(0.2, 1.1, 2.0), GroupElement::so3(2.5, 0.4, -1.0));
        let two_step = steer(&steer(&k0, &out, &inp, &a).unwrap(), &out, &inp, &b).unwrap();
        let one_step = steer(&k0, &out, &inp, &b.compose(&a).unwrap()).unwrap();
        assert!(two_step.rel_distance(&one_step) < 1e-11);
        assert!(steer(&Dense::zeros(3, 3), &out, &inp, &a).is_err());
    }

    #[test]
    fn so2_examples() {
        let phi: f64 = 0.77;
        let g = GroupElement::so2(phi);
        let k = steer(&Dense::identity(1), &IrrepLabel::So2Complex { n: 3 }, &IrrepLabel::So2Complex { n: 1 }, &g).unwrap();
        assert!((k.get(0, 0) - C64::from_polar(1.0, 2.0 * phi)).norm() < 1e-15);

        let (j, l) = (2.0, 3.0);
        let k0 = Dense::from_real(2, 2, vec![1.0, 0.0, 0.0, 0.0]);
        let k = steer(&k0, &IrrepLabel::So2Real { j: 2 }, &IrrepLabel::So2Real { j: 3 }, &g).unwrap();
        let (sj, cj) = f64::sin_cos(j * phi);
        let (sl, cl) = f64::sin_cos(l * phi);
        let want = Dense::from_real(2, 2, vec![cj * cl, cj * sl, cl * sj, sj * sl]);
        assert!(k.rel_distance(&want) < 1e-15);

        let o2 = IrrepLabel::O2Real { kind: O2Kind::Rot(1) };
        assert!(steer(&k0, &o2, &o2, &g).is_err());
    }
}
