//! Wigner d/D matrices and the complex-to-real spherical harmonic change of basis.
//!
//! Index order for complex harmonics is `m = +l, …, −l` (position `l − m`).
//! Real harmonics are ordered `Y_l0, Y^c_l1, Y^s_l1, …, Y^c_ll, Y^s_ll`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use crate::error::{invalid, Result};
use crate::numerics::{Dense, C64};

/// Largest degree supported by the factorial table.
pub const MAX_DEGREE: i32 = 32;

fn log_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = (2 * MAX_DEGREE + 2) as usize;
        let mut t = vec![0.0; n];
        for k in 1..n {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

fn lf(k: i32) -> f64 {
    log_factorials()[k as usize]
}

/// Position of weight `m` in the descending order `+l … −l`.
pub fn weight_index(l: i32, m: i32) -> usize {
    (l - m) as usize
}

/// Position of the real harmonic with signed index `m` (`m > 0`: cosine
/// type, `m < 0`: sine type) in the real ordering.
pub fn real_index(m: i32) -> usize {
    match m {
        0 => 0,
        m if m > 0 => (2 * m - 1) as usize,
        m => (-2 * m) as usize,
    }
}

/// Small Wigner matrix `d^l(β)`, rows and columns ordered `m = +l … −l`.
pub fn wigner_small_d(l: i32, beta: f64) -> Result<Dense> {
    if l < 0 {
        return invalid(format!("degree must be non-negative, got {l}"));
    }
    if l > MAX_DEGREE {
        return invalid(format!("degree {l} exceeds the supported maximum {MAX_DEGREE}"));
    }
    let n = (2 * l + 1) as usize;
    if beta == 0.0 {
        return Ok(Dense::identity(n));
    }
    let (s, c) = (0.5 * beta).sin_cos();
    let mut d = Dense::zeros(n, n);
    for mp in -l..=l {
        for m in -l..=l {
            let pref = 0.5 * (lf(l + mp) + lf(l - mp) + lf(l + m) + lf(l - m));
            let smin = 0.max(m - mp);
            let smax = (l + m).min(l - mp);
            let mut acc = 0.0;
            for k in smin..=smax {
                let denom = lf(l + m - k) + lf(k) + lf(mp - m + k) + lf(l - mp - k);
                let sign = if (mp - m + k).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let pc = 2 * l + m - mp - 2 * k;
                let ps = mp - m + 2 * k;
                acc += sign * (pref - denom).exp() * c.powi(pc) * s.powi(ps);
            }
            d.set_re(weight_index(l, mp), weight_index(l, m), acc);
        }
    }
    Ok(d)
}

/// `D^l_{mm'} = e^{−imα} d^l_{mm'}(β) e^{−im'γ}`.
pub fn wigner_big_d(l: i32, alpha: f64, beta: f64, gamma: f64) -> Result<Dense> {
    let d = wigner_small_d(l, beta)?;
    let n = d.rows();
    let m_of = |i: usize| l - i as i32;
    Ok(Dense::from_fn(n, n, |i, k| {
        let phase = -(m_of(i) as f64) * alpha - (m_of(k) as f64) * gamma;
        C64::from_polar(1.0, phase) * d.get(i, k).re
    }))
}

fn build_change_of_basis(l: i32) -> Dense {
    let n = (2 * l + 1) as usize;
    let mut s = Dense::zeros(n, n).into_complex();
    s.set(0, weight_index(l, 0), C64::new(1.0, 0.0));
    for m in 1..=l {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let (rc, rs) = (real_index(m), real_index(-m));
        let (pm, nm) = (weight_index(l, m), weight_index(l, -m));
        s.set(rc, pm, C64::new(FRAC_1_SQRT_2, 0.0));
        s.set(rc, nm, C64::new(sign * FRAC_1_SQRT_2, 0.0));
        s.set(rs, pm, C64::new(0.0, -FRAC_1_SQRT_2));
        s.set(rs, nm, C64::new(0.0, sign * FRAC_1_SQRT_2));
    }
    s
}

/// Unitary `S^l` taking complex-harmonic coefficients to real-harmonic ones.
pub fn real_change_of_basis(l: i32) -> Result<Dense> {
    const CACHED: i32 = 16;
    static CACHE: OnceLock<Vec<Dense>> = OnceLock::new();
    if l < 0 {
        return invalid(format!("degree must be non-negative, got {l}"));
    }
    if l > CACHED {
        return Ok(build_change_of_basis(l));
    }
    let cache = CACHE.get_or_init(|| (0..=CACHED).map(build_change_of_basis).collect());
    Ok(cache[l as usize].clone())
}

/// Real Wigner matrix `R^l = (S^l)* D^l (S^l)ᵀ`.
pub fn wigner_real(l: i32, alpha: f64, beta: f64, gamma: f64) -> Result<Dense> {
    let s = real_change_of_basis(l)?;
    let d = wigner_big_d(l, alpha, beta, gamma)?;
    let r = &(&s.conj() * &d) * &s.transpose();
    r.into_real(1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupElement;
    use std::f64::consts::PI;

    #[test]
    fn trivial_degree_and_zero_angle() {
        assert_eq!(wigner_small_d(0, 1.234).unwrap(), Dense::identity(1));
        for l in 0..6 {
            assert_eq!(wigner_small_d(l, 0.0).unwrap(), Dense::identity((2 * l + 1) as usize));
        }
        assert!(wigner_small_d(-1, 0.3).is_err());
    }

    #[test]
    fn degree_one_matches_rotation_about_y() {
        // Oracle: closed form of d¹ in the m = +1, 0, −1 order.
        let b: f64 = 0.83;
        let (s, c) = b.sin_cos();
        let r = FRAC_1_SQRT_2;
        let want = [
            [(1.0 + c) / 2.0, -s * r, (1.0 - c) / 2.0],
            [s * r, c, -s * r],
            [(1.0 - c) / 2.0, s * r, (1.0 + c) / 2.0],
        ];
        let d = wigner_small_d(1, b).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                assert!((d.get(i, k).re - want[i][k]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn half_turn_is_signed_antidiagonal() {
        for l in 0..=6 {
            let d = wigner_small_d(l, PI).unwrap();
            for m in -l..=l {
                for mp in -l..=l {
                    let want = if m == -mp {
                        if (l - mp) % 2 == 0 { 1.0 } else { -1.0 }
                    } else {
                        0.0
                    };
                    let got = d.get(weight_index(l, m), weight_index(l, mp)).re;
                    assert!((got - want).abs() < 1e-13, "l={l} m={m} m'={mp}: {got}");
                }
            }
        }
    }

    #[test]
    fn small_d_is_orthogonal_up_to_degree_sixteen() {
        for l in [2, 7, 12, 16] {
            let d = wigner_small_d(l, 1.1).unwrap();
            let n = d.rows();
            let err = (&(&d.transpose() * &d) - &Dense::identity(n)).max_abs();
            assert!(err < 1e-11, "l={l}: {err:e}");
        }
    }

    #[test]
    fn change_of_basis_is_unitary_with_expected_rows() {
        for l in 0..8 {
            let s = real_change_of_basis(l).unwrap();
            let n = s.rows();
            assert!((&(&s * &s.adjoint()) - &Dense::identity(n)).max_abs() < 1e-13);
        }
        let s = real_change_of_basis(1).unwrap();
        let r = FRAC_1_SQRT_2;
        assert!((s.get(1, 0) - C64::new(r, 0.0)).norm() < 1e-15);
        assert!((s.get(1, 2) - C64::new(-r, 0.0)).norm() < 1e-15);
        assert_eq!(s.get(0, 1), C64::new(1.0, 0.0));
    }

    #[test]
    fn real_wigner_is_real_and_composes() {
        let (a, b) = (GroupElement::so3(0.3, 1.2, 2.2), GroupElement::so3(4.0, 2.5, 0.4));
        let ab = a.compose(&b).unwrap();
        let p = |g: &GroupElement| match *g {
            GroupElement::So3 { alpha, beta, gamma } => (alpha, beta, gamma),
            _ => unreachable!(),
        };
        for l in 0..5 {
            let ra = wigner_real(l, p(&a).0, p(&a).1, p(&a).2).unwrap();
            let rb = wigner_real(l, p(&b).0, p(&b).1, p(&b).2).unwrap();
            let rab = wigner_real(l, p(&ab).0, p(&ab).1, p(&ab).2).unwrap();
            assert!(ra.is_real());
            assert!((&(&ra * &rb) - &rab).max_abs() < 1e-12);
        }
    }

    #[test]
    fn degree_one_real_matrix_is_the_rotation_in_permuted_axes() {
        // Real l=1 harmonics (Y_10, Y^c_11, Y^s_11) are proportional to (z, −x, −y)
        // up to per-row signs; conjugating by a signed permutation gives back the
        // rotation matrix itself.
        let (al, be, ga) = (0.4, 1.0, 2.1);
        let r = wigner_real(1, al, be, ga).unwrap();
        let rot = crate::groups::euler_rotation(al, be, ga);
        // Map axes: row 0 ↔ z, row 1 ↔ x, row 2 ↔ y.
        let axis = [2usize, 0, 1];
        for i in 0..3 {
            for k in 0..3 {
                let want = rot[axis[i]][axis[k]];
                assert!((r.get(i, k).re.abs() - want.abs()).abs() < 1e-14);
            }
        }
    }
}
