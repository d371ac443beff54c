//! Spacetime tensor and spinor representations of the proper orthochronous
//! Lorentz group.
//!
//! γ matrices are in the Weyl basis: `γ⁰ = [[0, I], [I, 0]]`,
//! `γⁱ = [[0, σᵢ], [−σᵢ, 0]]`. The spinor lift is taken from the Euler and
//! rapidity parameters of the element, so it is defined only up to sign on
//! products.

use crate::error::{invalid, Result};
use crate::groups::{GroupElement, GroupTag};
use crate::numerics::{Dense, C64, I, ONE, ZERO};

pub type Mat2 = [[C64; 2]; 2];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrices `σ₀ = I, σ₁, σ₂, σ₃`.
pub fn pauli(k: usize) -> Mat2 {
    match k {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("pauli index out of range: {k}"),
    }
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn adj2(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn det2(a: &Mat2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn inv2(a: &Mat2) -> Mat2 {
    let d = det2(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

fn to_dense(a: &Mat2) -> Dense {
    Dense::from_fn(2, 2, |i, j| a[i][j])
}

/// `exp(−iθσ_k/2)` for `k ∈ {2, 3}`.
fn half_rotation(k: usize, theta: f64) -> Mat2 {
    let (s, co) = (0.5 * theta).sin_cos();
    let p = pauli(k);
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { co } else { 0.0 };
            out[i][j] = c(id, 0.0) - I * p[i][j] * s;
        }
    }
    out
}

/// SL(2,ℂ) lift of a Lorentz element `R(α,β,γ)·B(η⃗)`.
pub fn sl2c_from_element(g: &GroupElement) -> Result<Mat2> {
    let GroupElement::Lorentz { alpha, beta, gamma, rapidity } = *g else {
        return invalid(format!("spinor lift needs a Lorentz element, got {}", g.tag().name()));
    };
    let rot = mul2(&mul2(&half_rotation(3, alpha), &half_rotation(2, beta)), &half_rotation(3, gamma));
    let eta = (rapidity[0].powi(2) + rapidity[1].powi(2) + rapidity[2].powi(2)).sqrt();
    let boost = if eta == 0.0 {
        pauli(0)
    } else {
        let (ch, sh) = ((0.5 * eta).cosh(), (0.5 * eta).sinh());
        let mut b = [[c(ch, 0.0), ZERO], [ZERO, c(ch, 0.0)]];
        for k in 0..3 {
            let p = pauli(k + 1);
            for i in 0..2 {
                for j in 0..2 {
                    b[i][j] += p[i][j] * (sh * rapidity[k] / eta);
                }
            }
        }
        b
    };
    Ok(mul2(&rot, &boost))
}

/// `Λ^μ_ν = ½ Tr(σ_μ g σ_ν g†)`, the covering map SL(2,ℂ) → SO⁺(1,3).
pub fn sl2c_to_lorentz(g: &Mat2) -> Result<GroupElement> {
    if (det2(g) - ONE).norm() > 1e-12 {
        return invalid(format!("det g = {} is not 1", det2(g)));
    }
    let gd = adj2(g);
    let mut lam = Dense::zeros(4, 4);
    for mu in 0..4 {
        for nu in 0..4 {
            let m = mul2(&mul2(&mul2(&pauli(mu), g), &pauli(nu)), &gd);
            lam.set_re(mu, nu, 0.5 * (m[0][0] + m[1][1]).re);
        }
    }
    GroupElement::from_matrix(GroupTag::Lorentz, &lam)
}

/// Weyl-basis γ^μ, `μ = 0..3`.
pub fn gamma(mu: usize) -> Dense {
    let z = Dense::zeros(2, 2);
    let s = to_dense(&pauli(mu));
    if mu == 0 {
        let id = Dense::identity(2);
        Dense::vstack(&[&Dense::hstack(&[&z, &id]), &Dense::hstack(&[&id, &z])])
    } else {
        Dense::vstack(&[&Dense::hstack(&[&z, &s]), &Dense::hstack(&[&s.scale_re(-1.0), &z])])
    }
}

/// `γ⁵ = iγ⁰γ¹γ²γ³`.
pub fn gamma5() -> Dense {
    (&(&(&gamma(0) * &gamma(1)) * &gamma(2)) * &gamma(3)).scale(I)
}

/// Matrix `M` of the charge conjugation `ψ ↦ Cγ⁰ψ* = M ψ*`, `C = iγ²γ⁰`.
pub fn charge_conjugation_matrix() -> Dense {
    gamma(2).scale(I)
}

/// Dirac representation `S(Λ) = diag((g†)⁻¹, g)` in the Weyl basis.
pub fn dirac_matrix(g: &GroupElement) -> Result<Dense> {
    let s = sl2c_from_element(g)?;
    let left = to_dense(&adj2(&inv2(&s)));
    let right = to_dense(&s);
    Ok(Dense::block_diag(&[&left, &right]))
}

/// Tensor representation with `up` contravariant and `down` covariant
/// indices: `Λ^{⊗up} ⊗ (Λ⁻ᵀ)^{⊗down}`.
pub fn tensor_matrix(up: u8, down: u8, g: &GroupElement) -> Result<Dense> {
    if up as u32 + down as u32 > 2 {
        return invalid(format!("tensor rank ({up},{down}) above 2 is not supported"));
    }
    let lam = match g {
        GroupElement::Lorentz { .. } => g.matrix(),
        _ => return invalid(format!("tensor representation needs a Lorentz element, got {}", g.tag().name())),
    };
    let cov = g.inverse().matrix().transpose();
    let mut out = Dense::identity(1);
    for _ in 0..up {
        out = out.kron(&lam);
    }
    for _ in 0..down {
        out = out.kron(&cov);
    }
    Ok(out)
}

/// Spinor-vector (Rarita–Schwinger field) representation `Λ ⊗ S(Λ)`,
/// index `4μ + a`.
pub fn spinor_vector_matrix(g: &GroupElement) -> Result<Dense> {
    Ok(g.matrix().kron(&dirac_matrix(g)?))
}
