//! Irreducible (and a few reducible) representations used as kernel input and
//! output types.
//!
//! Every label has a *native* matrix ([`rep_matrix`]) and a *working* matrix
//! ([`working_matrix`]) on which the solver and steering operate. They agree
//! except for the spinor labels, whose complex matrices are realified: the
//! kernel spaces for spinors are real vector spaces of real-linear maps.

pub mod lorentz;
pub mod restriction;
pub mod wigner;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::groups::{GroupElement, GroupTag};
use crate::numerics::{Dense, C64};

pub use restriction::{restrict_to_stabilizer, Block, RestrictionBlocks, SubIrrep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }

    pub fn parse(s: &str) -> Result<Field> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(Field::Real),
            "complex" | "c" => Ok(Field::Complex),
            _ => invalid(format!("unknown field '{s}' (expected real or complex)")),
        }
    }
}

/// O(2) irrep: trivial, sign (`0̃`), or the 2-dim irrep of frequency `j ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum O2Kind {
    Trivial,
    Sign,
    Rot(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spinor {
    Dirac,
    SpinorVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisConvention {
    Canonical,
    ComplexHarmonic,
    RealHarmonic,
    CanonicalTensor,
    DiracBasis,
}

/// Representation label. O(3) labels carry `eps ∈ {+1, −1}` with
/// `ρ(−I) = eps·(−1)^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum IrrepLabel {
    So2Complex { n: i32 },
    So2Real { j: u32 },
    O2Real { kind: O2Kind },
    O2Complex { kind: O2Kind },
    So3Complex { l: u32 },
    So3Real { l: u32 },
    O3Complex { l: u32, eps: i8 },
    O3Real { l: u32, eps: i8 },
    LorentzTensor { up: u8, down: u8 },
    LorentzSpinor { spinor: Spinor },
}

impl IrrepLabel {
    pub fn group(&self) -> GroupTag {
        use IrrepLabel::*;
        match self {
            So2Complex { .. } | So2Real { .. } => GroupTag::So2,
            O2Real { .. } | O2Complex { .. } => GroupTag::O2,
            So3Complex { .. } | So3Real { .. } => GroupTag::So3,
            O3Complex { .. } | O3Real { .. } => GroupTag::O3,
            LorentzTensor { .. } | LorentzSpinor { .. } => GroupTag::Lorentz,
        }
    }

    /// Scalars of the kernel space. Lorentz labels are real (spinors via realification).
    pub fn field(&self) -> Field {
        use IrrepLabel::*;
        match self {
            So2Complex { .. } | O2Complex { .. } | So3Complex { .. } | O3Complex { .. } => Field::Complex,
            _ => Field::Real,
        }
    }

    /// Dimension of the native representation space.
    pub fn dim(&self) -> usize {
        use IrrepLabel::*;
        match *self {
            So2Complex { .. } => 1,
            So2Real { j } => if j == 0 { 1 } else { 2 },
            O2Real { kind } | O2Complex { kind } => match kind {
                O2Kind::Rot(_) => 2,
                _ => 1,
            },
            So3Complex { l } | So3Real { l } | O3Complex { l, .. } | O3Real { l, .. } => 2 * l as usize + 1,
            LorentzTensor { up, down } => 4usize.pow(up as u32 + down as u32),
            LorentzSpinor { spinor: Spinor::Dirac } => 4,
            LorentzSpinor { spinor: Spinor::SpinorVector } => 16,
        }
    }

    pub fn is_spinor(&self) -> bool {
        matches!(self, IrrepLabel::LorentzSpinor { .. })
    }

    /// Dimension of the working space (twice the native one for spinors).
    pub fn working_dim(&self) -> usize {
        if self.is_spinor() { 2 * self.dim() } else { self.dim() }
    }

    pub fn convention(&self) -> BasisConvention {
        use IrrepLabel::*;
        match self {
            So3Complex { .. } | O3Complex { .. } => BasisConvention::ComplexHarmonic,
            So3Real { .. } | O3Real { .. } => BasisConvention::RealHarmonic,
            LorentzTensor { .. } => BasisConvention::CanonicalTensor,
            LorentzSpinor { .. } => BasisConvention::DiracBasis,
            _ => BasisConvention::Canonical,
        }
    }

    pub fn o3(l: u32, eps: i8, field: Field) -> Result<IrrepLabel> {
        if eps != 1 && eps != -1 {
            return invalid(format!("O(3) sign must be +1 or -1, got {eps}"));
        }
        Ok(match field {
            Field::Real => IrrepLabel::O3Real { l, eps },
            Field::Complex => IrrepLabel::O3Complex { l, eps },
        })
    }

    /// Short parameter string, the inverse of [`IrrepLabel::parse`].
    pub fn short(&self) -> String {
        use IrrepLabel::*;
        let o2 = |k: O2Kind| match k {
            O2Kind::Trivial => "0".to_string(),
            O2Kind::Sign => "0~".to_string(),
            O2Kind::Rot(j) => j.to_string(),
        };
        match *self {
            So2Complex { n } => n.to_string(),
            So2Real { j } => j.to_string(),
            O2Real { kind } | O2Complex { kind } => o2(kind),
            So3Complex { l } | So3Real { l } => l.to_string(),
            O3Complex { l, eps } | O3Real { l, eps } => format!("{l}{}", if eps > 0 { '+' } else { '-' }),
            LorentzTensor { up, down } => match (up, down) {
                (0, 0) => "scalar".into(),
                (1, 0) => "vector".into(),
                (0, 1) => "covector".into(),
                (p, q) => format!("tensor{p}{q}"),
            },
            LorentzSpinor { spinor: Spinor::Dirac } => "dirac".into(),
            LorentzSpinor { spinor: Spinor::SpinorVector } => "spinor-vector".into(),
        }
    }

    /// Parses a label for `group`. Field is ignored for Lorentz labels.
    ///
    /// Syntax: SO(2) integers (complex may be negative); O(2) `0`, `0~`
    /// (also `0t`), `j`; SO(3) `l`; O(3) `l+` / `l-`; Lorentz `scalar`,
    /// `vector`, `covector`, `tensor20`, `tensor11`, `tensor02`, `dirac`,
    /// `spinor-vector`.
    pub fn parse(group: GroupTag, field: Field, s: &str) -> Result<IrrepLabel> {
        let s = s.trim();
        let bad = || invalid(format!("cannot parse '{s}' as a {} {} label", group.name(), field.name()));
        let unsigned = |t: &str| t.parse::<u32>().ok();
        match group {
            GroupTag::So2 => match field {
                Field::Complex => s.parse::<i32>().map(|n| IrrepLabel::So2Complex { n }).or_else(|_| bad()),
                Field::Real => unsigned(s).map(|j| IrrepLabel::So2Real { j }).map_or_else(bad, Ok),
            },
            GroupTag::O2 => {
                let kind = match s {
                    "0~" | "0t" => O2Kind::Sign,
                    _ => match unsigned(s) {
                        Some(0) => O2Kind::Trivial,
                        Some(j) => O2Kind::Rot(j),
                        None => return bad(),
                    },
                };
                Ok(match field {
                    Field::Real => IrrepLabel::O2Real { kind },
                    Field::Complex => IrrepLabel::O2Complex { kind },
                })
            }
            GroupTag::So3 => match unsigned(s) {
                Some(l) => Ok(match field {
                    Field::Real => IrrepLabel::So3Real { l },
                    Field::Complex => IrrepLabel::So3Complex { l },
                }),
                None => bad(),
            },
            GroupTag::O3 => {
                let (num, eps) = match s.chars().last() {
                    Some('+') => (&s[..s.len() - 1], 1),
                    Some('-') => (&s[..s.len() - 1], -1),
                    _ => return bad(),
                };
                match unsigned(num) {
                    Some(l) => IrrepLabel::o3(l, eps, field),
                    None => bad(),
                }
            }
            GroupTag::Lorentz => Ok(match s.to_ascii_lowercase().as_str() {
                "scalar" | "tensor00" => IrrepLabel::LorentzTensor { up: 0, down: 0 },
                "vector" | "tensor10" => IrrepLabel::LorentzTensor { up: 1, down: 0 },
                "covector" | "tensor01" => IrrepLabel::LorentzTensor { up: 0, down: 1 },
                "tensor20" => IrrepLabel::LorentzTensor { up: 2, down: 0 },
                "tensor11" => IrrepLabel::LorentzTensor { up: 1, down: 1 },
                "tensor02" => IrrepLabel::LorentzTensor { up: 0, down: 2 },
                "dirac" => IrrepLabel::LorentzSpinor { spinor: Spinor::Dirac },
                "spinor-vector" | "rarita-schwinger" => IrrepLabel::LorentzSpinor { spinor: Spinor::SpinorVector },
                _ => return bad(),
            }),
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]({})", self.group().name(), self.field().name(), self.short())
    }
}

/// A representation matrix together with what produced it.
#[derive(Clone, Debug)]
pub struct RepMatrix {
    pub label: IrrepLabel,
    pub element: GroupElement,
    pub matrix: Dense,
    pub convention: BasisConvention,
}

fn rot2_dense(phi: f64) -> Dense {
    let (s, c) = phi.sin_cos();
    Dense::from_real(2, 2, vec![c, -s, s, c])
}

fn o2_real(kind: O2Kind, phi: f64, s: i8) -> Dense {
    let s = s as f64;
    match kind {
        O2Kind::Trivial => Dense::identity(1),
        O2Kind::Sign => Dense::from_real(1, 1, vec![s]),
        O2Kind::Rot(j) => {
            let r = rot2_dense(j as f64 * phi);
            &r * &Dense::from_real(2, 2, vec![1.0, 0.0, 0.0, s])
        }
    }
}

fn o2_complex(kind: O2Kind, phi: f64, s: i8) -> Dense {
    match kind {
        O2Kind::Trivial => Dense::identity(1),
        O2Kind::Sign => Dense::from_real(1, 1, vec![s as f64]),
        O2Kind::Rot(n) => {
            let e = C64::from_polar(1.0, n as f64 * phi);
            let d = Dense::from_complex(2, 2, vec![e, C64::new(0.0, 0.0), C64::new(0.0, 0.0), e.conj()]);
            if s > 0 {
                d
            } else {
                &d * &Dense::from_real(2, 2, vec![0.0, 1.0, 1.0, 0.0])
            }
        }
    }
}

fn euler(g: &GroupElement) -> (f64, f64, f64, i8) {
    match *g {
        GroupElement::So3 { alpha, beta, gamma } => (alpha, beta, gamma, 1),
        GroupElement::O3 { alpha, beta, gamma, parity } => (alpha, beta, gamma, parity),
        _ => unreachable!("euler angles requested for a non-rotation element"),
    }
}

fn parity_factor(l: u32, eps: i8, parity: i8) -> f64 {
    if parity > 0 {
        1.0
    } else {
        let odd = if l % 2 == 0 { 1.0 } else { -1.0 };
        eps as f64 * odd
    }
}

/// Native representation matrix of `g` in the label's declared basis.
pub fn rep_matrix(label: &IrrepLabel, g: &GroupElement) -> Result<RepMatrix> {
    if label.group() != g.tag() {
        return invalid(format!("label {label} cannot be evaluated on a {} element", g.tag().name()));
    }
    use IrrepLabel::*;
    let matrix = match (*label, *g) {
        (So2Complex { n }, GroupElement::So2 { phi }) => {
            Dense::from_complex(1, 1, vec![C64::from_polar(1.0, n as f64 * phi)])
        }
        (So2Real { j }, GroupElement::So2 { phi }) => {
            if j == 0 { Dense::identity(1) } else { rot2_dense(j as f64 * phi) }
        }
        (O2Real { kind }, GroupElement::O2 { phi, s }) => o2_real(kind, phi, s),
        (O2Complex { kind }, GroupElement::O2 { phi, s }) => o2_complex(kind, phi, s),
        (So3Complex { l } | O3Complex { l, .. }, _) => {
            let (a, b, c, p) = euler(g);
            let eps = if let O3Complex { eps, .. } = *label { eps } else { 1 };
            let d = wigner::wigner_big_d(l as i32, a, b, c)?;
            let f = parity_factor(l, eps, p);
            if f == 1.0 { d } else { d.scale_re(f) }
        }
        (So3Real { l } | O3Real { l, .. }, _) => {
            let (a, b, c, p) = euler(g);
            let eps = if let O3Real { eps, .. } = *label { eps } else { 1 };
            let r = wigner::wigner_real(l as i32, a, b, c)?;
            let f = parity_factor(l, eps, p);
            if f == 1.0 { r } else { r.scale_re(f) }
        }
        (LorentzTensor { up, down }, _) => lorentz::tensor_matrix(up, down, g)?,
        (LorentzSpinor { spinor: Spinor::Dirac }, _) => lorentz::dirac_matrix(g)?,
        (LorentzSpinor { spinor: Spinor::SpinorVector }, _) => lorentz::spinor_vector_matrix(g)?,
        _ => return invalid(format!("unsupported label/element pair {label} / {g:?}")),
    };
    Ok(RepMatrix { label: *label, element: *g, matrix, convention: label.convention() })
}

/// Matrix on the working space: native for everything except spinors, which
/// are realified to `[Re; Im]` coordinates.
pub fn working_matrix(label: &IrrepLabel, g: &GroupElement) -> Result<Dense> {
    let m = rep_matrix(label, g)?.matrix;
    Ok(if label.is_spinor() { m.realify() } else { m })
}

/// Working matrix of `g⁻¹`, sign-matched to [`working_matrix`] of `g` so that
/// the product is exactly the identity (spinor lifts are only projective).
pub fn working_matrix_inverse(label: &IrrepLabel, g: &GroupElement) -> Result<Dense> {
    let inv = working_matrix(label, &g.inverse())?;
    if !label.is_spinor() {
        return Ok(inv);
    }
    let prod = &working_matrix(label, g)? * &inv;
    Ok(if prod.get(0, 0).re < 0.0 { inv.scale_re(-1.0) } else { inv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::random_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_labels() -> Vec<IrrepLabel> {
        use IrrepLabel::*;
        let mut v = vec![];
        for n in -3..=3 {
            v.push(So2Complex { n });
        }
        for j in 0..4 {
            v.push(So2Real { j });
        }
        for kind in [O2Kind::Trivial, O2Kind::Sign, O2Kind::Rot(1), O2Kind::Rot(3)] {
            v.push(O2Real { kind });
            v.push(O2Complex { kind });
        }
        for l in 0..=4 {
            v.push(So3Complex { l });
            v.push(So3Real { l });
            for eps in [1, -1] {
                v.push(O3Complex { l, eps });
                v.push(O3Real { l, eps });
            }
        }
        for (up, down) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
            v.push(LorentzTensor { up, down });
        }
        v.push(LorentzSpinor { spinor: Spinor::Dirac });
        v.push(LorentzSpinor { spinor: Spinor::SpinorVector });
        v
    }

    #[test]
    fn identity_maps_to_identity() {
        for label in all_labels() {
            let m = rep_matrix(&label, &GroupElement::identity(label.group())).unwrap().matrix;
            assert_eq!(m.shape(), (label.dim(), label.dim()));
            assert!((&m - &Dense::identity(label.dim())).max_abs() < 1e-13, "{label}");
        }
    }

    #[test]
    fn homomorphism_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for label in all_labels() {
            let tag = label.group();
            for _ in 0..50 {
                let a = random_element(tag, &mut rng, 1.0);
                let b = random_element(tag, &mut rng, 1.0);
                let ab = a.compose(&b).unwrap();
                let ma = rep_matrix(&label, &a).unwrap().matrix;
                let mb = rep_matrix(&label, &b).unwrap().matrix;
                let mab = rep_matrix(&label, &ab).unwrap().matrix;
                let prod = &ma * &mb;
                let scale = prod.max_abs().max(1.0);
                let err = (&prod - &mab).max_abs() / scale;
                // Spinor lifts are projective; allow the overall sign.
                let err = if label.is_spinor() { err.min((&prod + &mab).max_abs() / scale) } else { err };
                assert!(err < 1e-11, "{label}: {err:e}");
            }
        }
    }

    #[test]
    fn compact_irreps_are_unitary_and_lorentz_inverse_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for label in all_labels() {
            let tag = label.group();
            for _ in 0..10 {
                let g = random_element(tag, &mut rng, 1.0);
                let m = rep_matrix(&label, &g).unwrap().matrix;
                let n = label.dim();
                if tag == GroupTag::Lorentz {
                    let inv = rep_matrix(&label, &g.inverse()).unwrap().matrix;
                    let p = &m * &inv;
                    let s = p.get(0, 0).re.signum();
                    assert!((&p - &Dense::identity(n).scale_re(s)).max_abs() < 1e-10, "{label}");
                } else {
                    assert!((&(&m * &m.adjoint()) - &Dense::identity(n)).max_abs() < 1e-12, "{label}");
                }
            }
        }
    }

    #[test]
    fn real_labels_have_real_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for label in all_labels().into_iter().filter(|l| l.field() == Field::Real) {
            for _ in 0..5 {
                let g = random_element(label.group(), &mut rng, 1.0);
                let m = working_matrix(&label, &g).unwrap();
                assert!(m.max_imag() <= 1e-12, "{label}");
                assert_eq!(m.rows(), label.working_dim());
            }
        }
    }

    #[test]
    fn sign_matched_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let label = IrrepLabel::LorentzSpinor { spinor: Spinor::SpinorVector };
        for _ in 0..20 {
            let g = random_element(GroupTag::Lorentz, &mut rng, 1.0);
            let p = &working_matrix(&label, &g).unwrap() * &working_matrix_inverse(&label, &g).unwrap();
            assert!((&p - &Dense::identity(32)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn displayed_examples() {
        let phi = 0.9;
        let m = rep_matrix(&IrrepLabel::So2Real { j: 1 }, &GroupElement::so2(phi)).unwrap().matrix;
        assert!(m.rel_distance(&rot2_dense(phi)) < 1e-15);

        let eta: f64 = 0.6;
        let g = GroupElement::lorentz_boost([0.0, 0.0, eta]);
        let m = rep_matrix(&IrrepLabel::LorentzTensor { up: 1, down: 0 }, &g).unwrap().matrix;
        let col: Vec<f64> = m.column(0).iter().map(|z| z.re).collect();
        let want = [eta.cosh(), 0.0, 0.0, eta.sinh()];
        for k in 0..4 {
            assert!((col[k] - want[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn o3_parity_acts_by_sign() {
        let g = GroupElement::o3(0.0, 0.0, 0.0, -1);
        for l in 0..4u32 {
            for eps in [1i8, -1] {
                let m = rep_matrix(&IrrepLabel::O3Real { l, eps }, &g).unwrap().matrix;
                let want = eps as f64 * if l % 2 == 0 { 1.0 } else { -1.0 };
                assert!((&m - &Dense::identity(m.rows()).scale_re(want)).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mismatched_group_is_rejected() {
        assert!(rep_matrix(&IrrepLabel::So3Real { l: 1 }, &GroupElement::so2(0.1)).is_err());
        assert!(rep_matrix(&IrrepLabel::So2Real { j: 1 }, &GroupElement::o2(0.1, 1)).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for label in all_labels() {
            let back = IrrepLabel::parse(label.group(), label.field(), &label.short()).unwrap();
            assert_eq!(back, label);
        }
        assert_eq!(
            IrrepLabel::parse(GroupTag::O2, Field::Real, "0t").unwrap(),
            IrrepLabel::O2Real { kind: O2Kind::Sign }
        );
        assert!(IrrepLabel::parse(GroupTag::So3, Field::Real, "-1").is_err());
        assert!(IrrepLabel::parse(GroupTag::O3, Field::Real, "2").is_err());
        assert!(IrrepLabel::parse(GroupTag::Lorentz, Field::Real, "tensor21").is_err());
    }
}
