//! Group elements for SO(2), O(2), SO(3), O(3) and SO⁺(1,3), their matrix
//! realizations, orbits, coset sections and stabilizer samples.
//!
//! Conventions:
//! - rotations in 3D use z-y-z Euler angles, `g = Rz(α) Ry(β) Rz(γ)`;
//! - O(2) elements are `g_{φ,s} = R(φ)·diag(1, s)`;
//! - O(3) elements are `p·g_{α,β,γ}` with parity `p = ±1`;
//! - Lorentz elements are `Λ = R(α,β,γ)·B(η⃗)` with `B` a pure boost and
//!   metric `diag(1,−1,−1,−1)`.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::Dense;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    So2,
    O2,
    So3,
    O3,
    Lorentz,
}

impl GroupTag {
    /// Dimension of the space the group acts on.
    pub fn base_dim(self) -> usize {
        match self {
            GroupTag::So2 | GroupTag::O2 => 2,
            GroupTag::So3 | GroupTag::O3 => 3,
            GroupTag::Lorentz => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupTag::So2 => "so2",
            GroupTag::O2 => "o2",
            GroupTag::So3 => "so3",
            GroupTag::O3 => "o3",
            GroupTag::Lorentz => "lorentz",
        }
    }

    pub fn parse(s: &str) -> Result<GroupTag> {
        match s.to_ascii_lowercase().as_str() {
            "so2" => Ok(GroupTag::So2),
            "o2" => Ok(GroupTag::O2),
            "so3" => Ok(GroupTag::So3),
            "o3" => Ok(GroupTag::O3),
            "lorentz" | "so13" => Ok(GroupTag::Lorentz),
            other => invalid(format!("unknown group '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "lowercase")]
pub enum GroupElement {
    So2 { phi: f64 },
    O2 { phi: f64, s: i8 },
    So3 { alpha: f64, beta: f64, gamma: f64 },
    O3 { alpha: f64, beta: f64, gamma: f64, parity: i8 },
    Lorentz { alpha: f64, beta: f64, gamma: f64, rapidity: [f64; 3] },
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

pub fn rot2(phi: f64) -> [[f64; 2]; 2] {
    let (s, c) = phi.sin_cos();
    [[c, -s], [s, c]]
}

pub fn rot_z(t: f64) -> [[f64; 3]; 3] {
    let (s, c) = t.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

pub fn rot_y(t: f64) -> [[f64; 3]; 3] {
    let (s, c) = t.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn mul3(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `Rz(α) Ry(β) Rz(γ)`.
pub fn euler_rotation(alpha: f64, beta: f64, gamma: f64) -> [[f64; 3]; 3] {
    mul3(&mul3(&rot_z(alpha), &rot_y(beta)), &rot_z(gamma))
}

/// z-y-z Euler angles of a rotation matrix, `α, γ ∈ [0, 2π)`, `β ∈ [0, π]`.
/// On the degenerate axes `β ∈ {0, π}` the convention is `γ = 0`.
///
/// `α ± γ` are taken from whichever of the combinations `(1 ± cos β)` is
/// well conditioned, the other from the third row and column, so the
/// reconstruction error stays at rounding level for every β.
pub fn euler_from_rotation(r: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let (a, b) = (r[0][0] + r[1][1], r[1][0] - r[0][1]); // (1+cβ)(cos, sin)(α+γ)
    let (c, d) = (r[0][0] - r[1][1], r[1][0] + r[0][1]); // -(1-cβ)(cos, sin)(α-γ)
    let col = r[0][2].hypot(r[1][2]);
    let row = r[2][0].hypot(r[2][1]);
    let beta = (0.5 * (col + row)).atan2(r[2][2]);
    let upper = beta < std::f64::consts::FRAC_PI_2;
    let (alpha, gamma) = if col == 0.0 && row == 0.0 {
        if upper {
            (b.atan2(a), 0.0)
        } else {
            ((-d).atan2(-c), 0.0)
        }
    } else {
        let a0 = r[1][2].atan2(r[0][2]);
        let g0 = r[2][1].atan2(-r[2][0]);
        if upper {
            let delta = wrap_pm(b.atan2(a) - (a0 + g0));
            (a0 + 0.5 * delta, g0 + 0.5 * delta)
        } else {
            let delta = wrap_pm((-d).atan2(-c) - (a0 - g0));
            (a0 + 0.5 * delta, g0 - 0.5 * delta)
        }
    };
    (wrap_angle(alpha), beta.clamp(0.0, PI), wrap_angle(gamma))
}

/// Wraps an angle into `(−π, π]`.
fn wrap_pm(x: f64) -> f64 {
    let y = wrap_angle(x);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Pure boost with rapidity vector `η⃗` (direction `n̂`, magnitude `η`).
pub fn boost_matrix(rapidity: [f64; 3]) -> [[f64; 4]; 4] {
    let eta = (rapidity[0].powi(2) + rapidity[1].powi(2) + rapidity[2].powi(2)).sqrt();
    let mut b = [[0.0; 4]; 4];
    for (i, row) in b.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if eta == 0.0 {
        return b;
    }
    let n = [rapidity[0] / eta, rapidity[1] / eta, rapidity[2] / eta];
    let (sh, ch) = (eta.sinh(), eta.cosh());
    b[0][0] = ch;
    for i in 0..3 {
        b[0][i + 1] = n[i] * sh;
        b[i + 1][0] = n[i] * sh;
        for j in 0..3 {
            b[i + 1][j + 1] = if i == j { 1.0 } else { 0.0 } + (ch - 1.0) * n[i] * n[j];
        }
    }
    b
}

fn mul4(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn embed_rotation(r: &[[f64; 3]; 3]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    out[0][0] = 1.0;
    for i in 0..3 {
        for j in 0..3 {
            out[i + 1][j + 1] = r[i][j];
        }
    }
    out
}

/// Minkowski product with signature (+,−,−,−).
pub fn minkowski(x: &[f64; 4], y: &[f64; 4]) -> f64 {
    x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3]
}

pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

impl GroupElement {
    pub fn identity(tag: GroupTag) -> GroupElement {
        match tag {
            GroupTag::So2 => GroupElement::So2 { phi: 0.0 },
            GroupTag::O2 => GroupElement::O2 { phi: 0.0, s: 1 },
            GroupTag::So3 => GroupElement::So3 { alpha: 0.0, beta: 0.0, gamma: 0.0 },
            GroupTag::O3 => GroupElement::O3 { alpha: 0.0, beta: 0.0, gamma: 0.0, parity: 1 },
            GroupTag::Lorentz => {
                GroupElement::Lorentz { alpha: 0.0, beta: 0.0, gamma: 0.0, rapidity: [0.0; 3] }
            }
        }
    }

    pub fn so2(phi: f64) -> GroupElement {
        GroupElement::So2 { phi: wrap_angle(phi) }
    }

    pub fn o2(phi: f64, s: i8) -> GroupElement {
        GroupElement::O2 { phi: wrap_angle(phi), s: if s < 0 { -1 } else { 1 } }
    }

    /// The reflection `(x, y) ↦ (x, −y)` in O(2).
    pub fn o2_reflection() -> GroupElement {
        GroupElement::o2(0.0, -1)
    }

    pub fn so3(alpha: f64, beta: f64, gamma: f64) -> GroupElement {
        Self::from_rotation3(GroupTag::So3, &euler_rotation(alpha, beta, gamma), 1)
    }

    pub fn o3(alpha: f64, beta: f64, gamma: f64, parity: i8) -> GroupElement {
        Self::from_rotation3(GroupTag::O3, &euler_rotation(alpha, beta, gamma), parity)
    }

    /// `diag(1, −1, 1)` in O(3), i.e. parity composed with a half-turn about y.
    pub fn o3_reflection_y() -> GroupElement {
        GroupElement::O3 { alpha: 0.0, beta: PI, gamma: 0.0, parity: -1 }
    }

    pub fn lorentz(alpha: f64, beta: f64, gamma: f64, rapidity: [f64; 3]) -> GroupElement {
        let (a, b, g) = euler_from_rotation(&euler_rotation(alpha, beta, gamma));
        GroupElement::Lorentz { alpha: a, beta: b, gamma: g, rapidity }
    }

    pub fn lorentz_rotation(alpha: f64, beta: f64, gamma: f64) -> GroupElement {
        GroupElement::lorentz(alpha, beta, gamma, [0.0; 3])
    }

    pub fn lorentz_boost(rapidity: [f64; 3]) -> GroupElement {
        GroupElement::Lorentz { alpha: 0.0, beta: 0.0, gamma: 0.0, rapidity }
    }

    fn from_rotation3(tag: GroupTag, r: &[[f64; 3]; 3], parity: i8) -> GroupElement {
        let (alpha, beta, gamma) = euler_from_rotation(r);
        match tag {
            GroupTag::So3 => GroupElement::So3 { alpha, beta, gamma },
            _ => GroupElement::O3 { alpha, beta, gamma, parity: if parity < 0 { -1 } else { 1 } },
        }
    }

    pub fn tag(&self) -> GroupTag {
        match self {
            GroupElement::So2 { .. } => GroupTag::So2,
            GroupElement::O2 { .. } => GroupTag::O2,
            GroupElement::So3 { .. } => GroupTag::So3,
            GroupElement::O3 { .. } => GroupTag::O3,
            GroupElement::Lorentz { .. } => GroupTag::Lorentz,
        }
    }

    /// Rotation part of a 3D or Lorentz element (`R(α,β,γ)`).
    pub fn rotation3(&self) -> Option<[[f64; 3]; 3]> {
        match *self {
            GroupElement::So3 { alpha, beta, gamma }
            | GroupElement::O3 { alpha, beta, gamma, .. }
            | GroupElement::Lorentz { alpha, beta, gamma, .. } => {
                Some(euler_rotation(alpha, beta, gamma))
            }
            _ => None,
        }
    }

    /// Determinant sign (`s` for O(2), parity for O(3), +1 otherwise).
    pub fn det_sign(&self) -> i8 {
        match *self {
            GroupElement::O2 { s, .. } => s,
            GroupElement::O3 { parity, .. } => parity,
            _ => 1,
        }
    }

    pub fn lorentz_matrix4(&self) -> Option<[[f64; 4]; 4]> {
        match *self {
            GroupElement::Lorentz { alpha, beta, gamma, rapidity } => Some(mul4(
                &embed_rotation(&euler_rotation(alpha, beta, gamma)),
                &boost_matrix(rapidity),
            )),
            _ => None,
        }
    }

    /// Defining matrix realization on ℝ^d.
    pub fn matrix(&self) -> Dense {
        match *self {
            GroupElement::So2 { phi } => {
                let r = rot2(phi);
                Dense::from_real_fn(2, 2, |i, j| r[i][j])
            }
            GroupElement::O2 { phi, s } => {
                let r = rot2(phi);
                Dense::from_real_fn(2, 2, |i, j| r[i][j] * if j == 1 { s as f64 } else { 1.0 })
            }
            GroupElement::So3 { .. } | GroupElement::O3 { .. } => {
                let r = self.rotation3().expect("3D element");
                let p = self.det_sign() as f64;
                Dense::from_real_fn(3, 3, |i, j| p * r[i][j])
            }
            GroupElement::Lorentz { .. } => {
                let l = self.lorentz_matrix4().expect("Lorentz element");
                Dense::from_real_fn(4, 4, |i, j| l[i][j])
            }
        }
    }

    /// Canonical parameters of the element realized by `m`.
    pub fn from_matrix(tag: GroupTag, m: &Dense) -> Result<GroupElement> {
        let d = tag.base_dim();
        if m.shape() != (d, d) {
            return invalid(format!("expected a {d}x{d} matrix for {}", tag.name()));
        }
        let e = |i: usize, j: usize| m.get(i, j).re;
        match tag {
            GroupTag::So2 => Ok(GroupElement::so2(e(1, 0).atan2(e(0, 0)))),
            GroupTag::O2 => {
                let det = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0);
                Ok(GroupElement::o2(e(1, 0).atan2(e(0, 0)), if det < 0.0 { -1 } else { 1 }))
            }
            GroupTag::So3 | GroupTag::O3 => {
                let mut r = [[0.0; 3]; 3];
                for (i, row) in r.iter_mut().enumerate() {
                    for (j, x) in row.iter_mut().enumerate() {
                        *x = e(i, j);
                    }
                }
                let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                    - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                    + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
                let p: i8 = if det < 0.0 { -1 } else { 1 };
                if tag == GroupTag::So3 && p < 0 {
                    return invalid("matrix has negative determinant; not in SO(3)");
                }
                for row in r.iter_mut() {
                    for x in row.iter_mut() {
                        *x *= p as f64;
                    }
                }
                Ok(Self::from_rotation3(tag, &r, p))
            }
            GroupTag::Lorentz => {
                // First row of Λ = R·B(η⃗) is the first row of B(η⃗).
                let s = (e(0, 1).powi(2) + e(0, 2).powi(2) + e(0, 3).powi(2)).sqrt();
                let rapidity = if s == 0.0 {
                    [0.0; 3]
                } else {
                    let eta = s.asinh();
                    [e(0, 1) / s * eta, e(0, 2) / s * eta, e(0, 3) / s * eta]
                };
                let binv = boost_matrix([-rapidity[0], -rapidity[1], -rapidity[2]]);
                let mut l = [[0.0; 4]; 4];
                for (i, row) in l.iter_mut().enumerate() {
                    for (j, x) in row.iter_mut().enumerate() {
                        *x = e(i, j);
                    }
                }
                let rot4 = mul4(&l, &binv);
                let mut r = [[0.0; 3]; 3];
                for (i, row) in r.iter_mut().enumerate() {
                    for (j, x) in row.iter_mut().enumerate() {
                        *x = rot4[i + 1][j + 1];
                    }
                }
                let (alpha, beta, gamma) = euler_from_rotation(&r);
                Ok(GroupElement::Lorentz { alpha, beta, gamma, rapidity })
            }
        }
    }

    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.tag() != other.tag() {
            return invalid(format!(
                "cannot compose {} with {}",
                self.tag().name(),
                other.tag().name()
            ));
        }
        match (*self, *other) {
            (GroupElement::So2 { phi: a }, GroupElement::So2 { phi: b }) => Ok(GroupElement::so2(a + b)),
            (GroupElement::O2 { phi: a, s: sa }, GroupElement::O2 { phi: b, s: sb }) => {
                Ok(GroupElement::o2(a + sa as f64 * b, sa * sb))
            }
            _ => GroupElement::from_matrix(self.tag(), &(&self.matrix() * &other.matrix())),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match *self {
            GroupElement::So2 { phi } => GroupElement::so2(-phi),
            GroupElement::O2 { phi, s } => GroupElement::o2(-(s as f64) * phi, s),
            GroupElement::So3 { alpha, beta, gamma } => GroupElement::so3(-gamma, -beta, -alpha),
            GroupElement::O3 { alpha, beta, gamma, parity } => {
                GroupElement::o3(-gamma, -beta, -alpha, parity)
            }
            GroupElement::Lorentz { .. } => {
                // Λ⁻¹ = η Λᵀ η.
                let m = self.matrix();
                let inv = Dense::from_real_fn(4, 4, |i, j| METRIC[i] * m.get(j, i).re * METRIC[j]);
                GroupElement::from_matrix(GroupTag::Lorentz, &inv).expect("4x4 input")
            }
        }
    }

    /// Applies the element to a point of an orbit.
    pub fn act(&self, x: &OrbitPoint) -> Result<OrbitPoint> {
        let v = x.coordinates();
        if v.len() != self.tag().base_dim() {
            return invalid(format!(
                "{} acts on ℝ^{}, point lives in ℝ^{}",
                self.tag().name(),
                self.tag().base_dim(),
                v.len()
            ));
        }
        let m = self.matrix();
        let w: Vec<f64> = (0..v.len()).map(|i| (0..v.len()).map(|k| m.get(i, k).re * v[k]).sum()).collect();
        OrbitPoint::from_coordinates(x.orbit(), &w)
    }
}

/// Orbit descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Orbit {
    Circle { radius: f64 },
    Sphere { radius: f64 },
    Massive { mass: f64 },
    Null,
}

impl Orbit {
    pub fn base_point(&self) -> OrbitPoint {
        match *self {
            Orbit::Circle { radius } => OrbitPoint::Circle { radius, phi: 0.0 },
            Orbit::Sphere { radius } => OrbitPoint::Sphere { radius, alpha: 0.0, beta: 0.0 },
            Orbit::Massive { mass } => OrbitPoint::Massive { mass, x: [mass, 0.0, 0.0, 0.0] },
            Orbit::Null => OrbitPoint::Null { x: [1.0, 0.0, 0.0, 1.0] },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Orbit::Circle { .. } => 2,
            Orbit::Sphere { .. } => 3,
            _ => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Orbit::Circle { .. } => "circle",
            Orbit::Sphere { .. } => "sphere",
            Orbit::Massive { .. } => "massive",
            Orbit::Null => "null",
        }
    }

    /// Default orbit of a group (unit radius, unit mass).
    pub fn default_for(tag: GroupTag) -> Orbit {
        match tag {
            GroupTag::So2 | GroupTag::O2 => Orbit::Circle { radius: 1.0 },
            GroupTag::So3 | GroupTag::O3 => Orbit::Sphere { radius: 1.0 },
            GroupTag::Lorentz => Orbit::Massive { mass: 1.0 },
        }
    }

    pub fn supports(&self, tag: GroupTag) -> bool {
        matches!(
            (self, tag),
            (Orbit::Circle { .. }, GroupTag::So2 | GroupTag::O2)
                | (Orbit::Sphere { .. }, GroupTag::So3 | GroupTag::O3)
                | (Orbit::Massive { .. } | Orbit::Null, GroupTag::Lorentz)
        )
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Orbit::Circle { radius } | Orbit::Sphere { radius } => radius.is_finite() && radius > 0.0,
            Orbit::Massive { mass } => mass.is_finite() && mass > 0.0,
            Orbit::Null => true,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("invalid orbit descriptor {self:?}"))
        }
    }
}

/// A point on one of the supported orbits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OrbitPoint {
    Circle { radius: f64, phi: f64 },
    /// `x = g_{α,β,0}·(0, 0, R)`.
    Sphere { radius: f64, alpha: f64, beta: f64 },
    Massive { mass: f64, x: [f64; 4] },
    Null { x: [f64; 4] },
}

impl OrbitPoint {
    pub fn orbit(&self) -> Orbit {
        match *self {
            OrbitPoint::Circle { radius, .. } => Orbit::Circle { radius },
            OrbitPoint::Sphere { radius, .. } => Orbit::Sphere { radius },
            OrbitPoint::Massive { mass, .. } => Orbit::Massive { mass },
            OrbitPoint::Null { .. } => Orbit::Null,
        }
    }

    pub fn circle(radius: f64, phi: f64) -> OrbitPoint {
        OrbitPoint::Circle { radius, phi: wrap_angle(phi) }
    }

    pub fn sphere(radius: f64, alpha: f64, beta: f64) -> OrbitPoint {
        OrbitPoint::Sphere { radius, alpha: wrap_angle(alpha), beta }
    }

    /// Hyperboloid point `m·(cosh η, sinh η·n̂(α,β))`.
    pub fn massive(mass: f64, alpha: f64, beta: f64, eta: f64) -> OrbitPoint {
        let (sb, cb) = beta.sin_cos();
        let (sa, ca) = alpha.sin_cos();
        let sh = mass * eta.sinh();
        OrbitPoint::Massive { mass, x: [mass * eta.cosh(), sh * sb * ca, sh * sb * sa, sh * cb] }
    }

    /// Cone point `e^η·(1, n̂(α,β))`.
    pub fn null(alpha: f64, beta: f64, eta: f64) -> OrbitPoint {
        let (sb, cb) = beta.sin_cos();
        let (sa, ca) = alpha.sin_cos();
        let t = eta.exp();
        OrbitPoint::Null { x: [t, t * sb * ca, t * sb * sa, t * cb] }
    }

    /// Cartesian coordinates in ℝ^d.
    pub fn coordinates(&self) -> Vec<f64> {
        match *self {
            OrbitPoint::Circle { radius, phi } => vec![radius * phi.cos(), radius * phi.sin()],
            OrbitPoint::Sphere { radius, alpha, beta } => {
                let (sb, cb) = beta.sin_cos();
                vec![radius * sb * alpha.cos(), radius * sb * alpha.sin(), radius * cb]
            }
            OrbitPoint::Massive { x, .. } | OrbitPoint::Null { x } => x.to_vec(),
        }
    }

    /// Builds a point of `orbit` from Cartesian coordinates, checking the
    /// orbit invariant.
    pub fn from_coordinates(orbit: Orbit, v: &[f64]) -> Result<OrbitPoint> {
        orbit.validate()?;
        if v.len() != orbit.dim() || v.iter().any(|x| !x.is_finite()) {
            return invalid(format!("expected {} finite coordinates for a {} point", orbit.dim(), orbit.name()));
        }
        match orbit {
            Orbit::Circle { radius } => {
                let r = v[0].hypot(v[1]);
                check_close(r, radius, 1e-12 * radius.max(1.0), "circle radius")?;
                Ok(OrbitPoint::circle(radius, v[1].atan2(v[0])))
            }
            Orbit::Sphere { radius } => {
                let rho = v[0].hypot(v[1]);
                let r = rho.hypot(v[2]);
                check_close(r, radius, 1e-12 * radius.max(1.0), "sphere radius")?;
                let beta = rho.atan2(v[2]);
                let alpha = if rho <= 1e-15 * radius { 0.0 } else { v[1].atan2(v[0]) };
                Ok(OrbitPoint::sphere(radius, alpha, beta))
            }
            Orbit::Massive { mass } => {
                let x = [v[0], v[1], v[2], v[3]];
                if x[0] <= 0.0 {
                    return invalid("hyperboloid point must have x⁰ > 0");
                }
                check_close(minkowski(&x, &x), mass * mass, 1e-12 * x[0] * x[0], "Minkowski norm")?;
                Ok(OrbitPoint::Massive { mass, x })
            }
            Orbit::Null => {
                let x = [v[0], v[1], v[2], v[3]];
                if x[0] <= 0.0 {
                    return invalid("cone point must have x⁰ > 0");
                }
                check_close(minkowski(&x, &x), 0.0, 1e-12 * x[0] * x[0], "Minkowski norm")?;
                Ok(OrbitPoint::Null { x })
            }
        }
    }

    /// Re-checks the orbit invariant.
    pub fn validate(&self) -> Result<()> {
        OrbitPoint::from_coordinates(self.orbit(), &self.coordinates()).map(|_| ())
    }
}

fn check_close(got: f64, want: f64, tol: f64, what: &str) -> Result<()> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        invalid(format!("{what} is {got}, expected {want}"))
    }
}

/// Direction angles `(α, β)` of a nonzero 3-vector; `α = 0` on the z axis.
fn direction_angles(v: [f64; 3]) -> (f64, f64) {
    let rho = v[0].hypot(v[1]);
    let r = rho.hypot(v[2]);
    let beta = rho.atan2(v[2]);
    let alpha = if rho <= 1e-15 * r { 0.0 } else { wrap_angle(v[1].atan2(v[0])) };
    (alpha, beta)
}

/// Orbit section: an element `g` with `g·x₀ = x`.
///
/// Circle: `g_φ` (with `s = +1` for O(2)). Sphere: `g_{α,β,0}` (parity +1
/// for O(3)). Hyperboloid: `R(α,β,0)·B_z(η)`, `η = asinh(|x⃗|/m)`. Cone:
/// `R(α,β,0)·B_z(ln x⁰)`. At the south pole and along `n̂ = −ẑ` the section
/// is discontinuous; `α = 0` is used there.
pub fn coset_representative(tag: GroupTag, x: &OrbitPoint) -> Result<GroupElement> {
    if !x.orbit().supports(tag) {
        return invalid(format!("{} does not act transitively on a {} orbit", tag.name(), x.orbit().name()));
    }
    x.validate()?;
    Ok(match (*x, tag) {
        (OrbitPoint::Circle { phi, .. }, GroupTag::So2) => GroupElement::so2(phi),
        (OrbitPoint::Circle { phi, .. }, _) => GroupElement::o2(phi, 1),
        (OrbitPoint::Sphere { alpha, beta, .. }, GroupTag::So3) => GroupElement::So3 { alpha, beta, gamma: 0.0 },
        (OrbitPoint::Sphere { alpha, beta, .. }, _) => GroupElement::O3 { alpha, beta, gamma: 0.0, parity: 1 },
        (OrbitPoint::Massive { mass, x }, _) => {
            let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
            let eta = (r / mass).asinh();
            let (alpha, beta) = if r == 0.0 { (0.0, 0.0) } else { direction_angles([x[1], x[2], x[3]]) };
            GroupElement::Lorentz { alpha, beta, gamma: 0.0, rapidity: [0.0, 0.0, eta] }
        }
        (OrbitPoint::Null { x }, _) => {
            let (alpha, beta) = direction_angles([x[1], x[2], x[3]]);
            GroupElement::Lorentz { alpha, beta, gamma: 0.0, rapidity: [0.0, 0.0, x[0].ln()] }
        }
    })
}

/// Finite set of stabilizer elements whose joint constraint equals the
/// constraint of the full stabilizer (two rotation angles with irrational
/// ratio generate a dense subgroup).
#[derive(Clone, Debug)]
pub struct StabilizerSample {
    pub base_point: OrbitPoint,
    pub elements: Vec<GroupElement>,
}

pub const SAMPLE_ANGLES: [f64; 2] = [1.0, std::f64::consts::SQRT_2];

pub fn stabilizer_sample(tag: GroupTag, orbit: &Orbit) -> Result<StabilizerSample> {
    if !orbit.supports(tag) {
        return invalid(format!("{} has no {} orbit", tag.name(), orbit.name()));
    }
    orbit.validate()?;
    let elements = match (tag, orbit) {
        (GroupTag::So2, _) => vec![GroupElement::identity(tag)],
        (GroupTag::O2, _) => vec![GroupElement::identity(tag), GroupElement::o2_reflection()],
        (GroupTag::So3, _) => SAMPLE_ANGLES.iter().map(|&t| GroupElement::so3(t, 0.0, 0.0)).collect(),
        (GroupTag::O3, _) => {
            let mut v: Vec<_> = SAMPLE_ANGLES.iter().map(|&t| GroupElement::o3(t, 0.0, 0.0, 1)).collect();
            v.push(GroupElement::o3_reflection_y());
            v
        }
        (GroupTag::Lorentz, Orbit::Massive { .. }) => {
            let mut v: Vec<_> = SAMPLE_ANGLES.iter().map(|&t| GroupElement::lorentz_rotation(t, 0.0, 0.0)).collect();
            v.extend(SAMPLE_ANGLES.iter().map(|&t| GroupElement::lorentz_rotation(0.0, t, 0.0)));
            v
        }
        (GroupTag::Lorentz, _) => {
            SAMPLE_ANGLES.iter().map(|&t| GroupElement::lorentz_rotation(t, 0.0, 0.0)).collect()
        }
    };
    Ok(StabilizerSample { base_point: orbit.base_point(), elements })
}

/// Uniformly random stabilizer element (translations of the null-cone
/// stabilizer excluded).
pub fn random_stabilizer_element<R: Rng + ?Sized>(tag: GroupTag, orbit: &Orbit, rng: &mut R) -> Result<GroupElement> {
    if !orbit.supports(tag) {
        return invalid(format!("{} has no {} orbit", tag.name(), orbit.name()));
    }
    let t = rng.gen_range(0.0..TAU);
    Ok(match (tag, orbit) {
        (GroupTag::So2, _) => GroupElement::identity(tag),
        (GroupTag::O2, _) => {
            if rng.gen_bool(0.5) {
                GroupElement::identity(tag)
            } else {
                GroupElement::o2_reflection()
            }
        }
        (GroupTag::So3, _) => GroupElement::so3(t, 0.0, 0.0),
        (GroupTag::O3, _) => {
            let rot = GroupElement::o3(t, 0.0, 0.0, 1);
            if rng.gen_bool(0.5) {
                rot.compose(&GroupElement::o3_reflection_y())?
            } else {
                rot
            }
        }
        (GroupTag::Lorentz, Orbit::Massive { .. }) => {
            let (a, b, c) = random_euler(rng);
            GroupElement::lorentz_rotation(a, b, c)
        }
        (GroupTag::Lorentz, _) => GroupElement::lorentz_rotation(t, 0.0, 0.0),
    })
}

/// Haar-uniform Euler angles on SO(3).
pub fn random_euler<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, f64) {
    let a = rng.gen_range(0.0..TAU);
    let b = rng.gen_range(-1.0f64..1.0).acos();
    let c = rng.gen_range(0.0..TAU);
    (a, b, c)
}

/// Random group element; Lorentz rapidities have magnitude at most `max_rapidity`.
pub fn random_element<R: Rng + ?Sized>(tag: GroupTag, rng: &mut R, max_rapidity: f64) -> GroupElement {
    match tag {
        GroupTag::So2 => GroupElement::so2(rng.gen_range(0.0..TAU)),
        GroupTag::O2 => GroupElement::o2(rng.gen_range(0.0..TAU), if rng.gen_bool(0.5) { 1 } else { -1 }),
        GroupTag::So3 => {
            let (a, b, c) = random_euler(rng);
            GroupElement::so3(a, b, c)
        }
        GroupTag::O3 => {
            let (a, b, c) = random_euler(rng);
            GroupElement::o3(a, b, c, if rng.gen_bool(0.5) { 1 } else { -1 })
        }
        GroupTag::Lorentz => {
            let (a, b, c) = random_euler(rng);
            let (da, db, _) = random_euler(rng);
            let eta = rng.gen_range(0.0..max_rapidity);
            let (sb, cb) = db.sin_cos();
            GroupElement::lorentz(a, b, c, [eta * sb * da.cos(), eta * sb * da.sin(), eta * cb])
        }
    }
}

/// Random point on an orbit; hyperboloid and cone points have boost
/// rapidity (resp. `ln x⁰`) of magnitude at most `max_rapidity`.
pub fn random_point<R: Rng + ?Sized>(orbit: &Orbit, rng: &mut R, max_rapidity: f64) -> OrbitPoint {
    let (a, b, _) = random_euler(rng);
    match *orbit {
        Orbit::Circle { radius } => OrbitPoint::circle(radius, a),
        Orbit::Sphere { radius } => OrbitPoint::sphere(radius, a, b),
        Orbit::Massive { mass } => OrbitPoint::massive(mass, a, b, rng.gen_range(0.0..max_rapidity)),
        Orbit::Null => OrbitPoint::null(a, b, rng.gen_range(-max_rapidity..max_rapidity)),
    }
}
