//! Decomposition of a representation restricted to the stabilizer of the
//! orbit base point.
//!
//! Blocks are given by orthonormal column bases in the *working* space of the
//! label. Blocks carrying the same [`SubIrrep`] use the same matrices for the
//! stabilizer action in their bases, across all labels of a group ("aligned
//! frames"), so `U_a U_bᵀ` intertwines whenever both sub-irreps agree. The one
//! exception is the spin-3/2 block of the spinor-vector, whose frame is an
//! arbitrary orthonormal basis.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::lorentz::gamma;
use super::{IrrepLabel, O2Kind, Spinor};
use crate::error::{invalid, Result};
use crate::groups::Orbit;
use crate::numerics::{Dense, SubspaceBasis};

/// Isomorphism class of a stabilizer irrep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SubIrrep {
    /// Trivial group, or the trivial character of {e, r}.
    Trivial,
    /// Sign character of {e, r}.
    Sign,
    /// Complex SO(2) character `e^{inθ}`.
    So2Complex(i32),
    /// Real SO(2) irrep of frequency `n ≥ 0`.
    So2Real(u32),
    /// O(2) irrep.
    O2(O2Kind),
    /// SO(3)/SU(2) irrep of spin `twice_spin / 2`, realified for half-integers.
    Spin(u32),
}

impl SubIrrep {
    /// Dimension of the endomorphism algebra over the working scalars: 1, 2
    /// or 4 for real, complex and quaternionic type.
    pub fn endomorphism_dim(self) -> usize {
        match self {
            SubIrrep::So2Real(n) if n > 0 => 2,
            SubIrrep::Spin(s) if s % 2 == 1 => 4,
            _ => 1,
        }
    }

    pub fn describe(self) -> String {
        match self {
            SubIrrep::Trivial => "trivial".into(),
            SubIrrep::Sign => "sign".into(),
            SubIrrep::So2Complex(n) => format!("SO2 weight {n}"),
            SubIrrep::So2Real(n) => format!("SO2 real frequency {n}"),
            SubIrrep::O2(O2Kind::Trivial) => "O2 trivial".into(),
            SubIrrep::O2(O2Kind::Sign) => "O2 sign".into(),
            SubIrrep::O2(O2Kind::Rot(m)) => format!("O2 frequency {m}"),
            SubIrrep::Spin(t) if t % 2 == 0 => format!("spin {}", t / 2),
            SubIrrep::Spin(t) => format!("spin {t}/2"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Block {
    pub name: String,
    pub sub: SubIrrep,
    /// Orthonormal columns spanning the block in the working space.
    pub basis: Dense,
    /// Coordinate range when the block is spanned by consecutive basis vectors.
    pub range: Option<Range<usize>>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

#[derive(Clone, Debug)]
pub struct RestrictionBlocks {
    pub parent: IrrepLabel,
    pub orbit: Orbit,
    pub stabilizer: &'static str,
    pub blocks: Vec<Block>,
}

impl RestrictionBlocks {
    pub fn multiplicities(&self) -> BTreeMap<SubIrrep, usize> {
        let mut m = BTreeMap::new();
        for b in &self.blocks {
            *m.entry(b.sub).or_insert(0) += 1;
        }
        m
    }

    /// Blocks whose sub-irrep passes `keep`, in declaration order.
    pub fn select(&self, keep: impl Fn(SubIrrep) -> bool) -> Vec<&Block> {
        self.blocks.iter().filter(|b| keep(b.sub)).collect()
    }

    /// Columns of all blocks side by side: a unitary change of basis.
    pub fn frame(&self) -> Dense {
        let refs: Vec<&Dense> = self.blocks.iter().map(|b| &b.basis).collect();
        Dense::hstack(&refs)
    }
}

fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

fn real_cols(n: usize, cols: &[Vec<f64>]) -> Dense {
    Dense::from_real_fn(n, cols.len(), |i, j| cols[j][i])
}

fn coord_block(name: impl Into<String>, sub: SubIrrep, n: usize, idx: &[usize]) -> Block {
    let cols: Vec<Vec<f64>> = idx.iter().map(|&k| unit(n, k)).collect();
    let contiguous = idx.windows(2).all(|w| w[1] == w[0] + 1);
    let range = if contiguous && !idx.is_empty() { Some(idx[0]..idx[idx.len() - 1] + 1) } else { None };
    Block { name: name.into(), sub, basis: real_cols(n, &cols), range }
}

fn vec_block(name: impl Into<String>, sub: SubIrrep, cols: Vec<Vec<f64>>) -> Block {
    let n = cols[0].len();
    Block { name: name.into(), sub, basis: real_cols(n, &cols), range: None }
}

fn kron_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn add_scaled(terms: &[(f64, Vec<f64>)]) -> Vec<f64> {
    let mut out = vec![0.0; terms[0].1.len()];
    for (c, v) in terms {
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

fn e4(k: usize) -> Vec<f64> {
    unit(4, k)
}

fn ee(a: usize, b: usize) -> Vec<f64> {
    kron_vec(&e4(a), &e4(b))
}

/// Massive (rest-frame) spin blocks of a rank ≤ 2 tensor.
fn massive_tensor_blocks(rank: u32) -> Vec<Block> {
    let s = FRAC_1_SQRT_2;
    match rank {
        0 => vec![coord_block("0", SubIrrep::Spin(0), 1, &[0])],
        1 => vec![
            coord_block("t", SubIrrep::Spin(0), 4, &[0]),
            coord_block("s", SubIrrep::Spin(2), 4, &[1, 2, 3]),
        ],
        _ => {
            let tr = add_scaled(&[(1.0 / 3f64.sqrt(), ee(1, 1)), (1.0 / 3f64.sqrt(), ee(2, 2)), (1.0 / 3f64.sqrt(), ee(3, 3))]);
            // Hodge-dual ordering keeps the antisymmetric block aligned with a vector.
            let asym: Vec<Vec<f64>> =
                [(2, 3), (3, 1), (1, 2)].iter().map(|&(j, k)| add_scaled(&[(s, ee(j, k)), (-s, ee(k, j))])).collect();
            let r6 = 1.0 / 6f64.sqrt();
            let sym = vec![
                add_scaled(&[(s, ee(1, 2)), (s, ee(2, 1))]),
                add_scaled(&[(s, ee(2, 3)), (s, ee(3, 2))]),
                add_scaled(&[(s, ee(1, 3)), (s, ee(3, 1))]),
                add_scaled(&[(s, ee(1, 1)), (-s, ee(2, 2))]),
                add_scaled(&[(r6, ee(1, 1)), (r6, ee(2, 2)), (-2.0 * r6, ee(3, 3))]),
            ];
            vec![
                vec_block("00", SubIrrep::Spin(0), vec![ee(0, 0)]),
                vec_block("0i", SubIrrep::Spin(2), (1..4).map(|i| ee(0, i)).collect()),
                vec_block("i0", SubIrrep::Spin(2), (1..4).map(|i| ee(i, 0)).collect()),
                vec_block("tr", SubIrrep::Spin(0), vec![tr]),
                vec_block("as", SubIrrep::Spin(2), asym),
                vec_block("st", SubIrrep::Spin(4), sym),
            ]
        }
    }
}

/// Massless (little group SO(2) about z) weight blocks of a rank ≤ 2 tensor.
fn massless_tensor_blocks(rank: u32) -> Vec<Block> {
    let s = FRAC_1_SQRT_2;
    let w = SubIrrep::So2Real;
    match rank {
        0 => vec![coord_block("0", w(0), 1, &[0])],
        1 => vec![
            coord_block("0", w(0), 4, &[0]),
            coord_block("3", w(0), 4, &[3]),
            coord_block("T", w(1), 4, &[1, 2]),
        ],
        _ => {
            let mut v = vec![];
            for (a, an) in [(0, "0"), (3, "3")] {
                for (b, bn) in [(0, "0"), (3, "3")] {
                    v.push(vec_block(format!("{an}{bn}"), w(0), vec![ee(a, b)]));
                }
            }
            for (a, an) in [(0, "0"), (3, "3")] {
                v.push(vec_block(format!("{an}T"), w(1), vec![ee(a, 1), ee(a, 2)]));
                v.push(vec_block(format!("T{an}"), w(1), vec![ee(1, a), ee(2, a)]));
            }
            v.push(vec_block("Ttr", w(0), vec![add_scaled(&[(s, ee(1, 1)), (s, ee(2, 2))])]));
            v.push(vec_block("Tas", w(0), vec![add_scaled(&[(s, ee(1, 2)), (-s, ee(2, 1))])]));
            v.push(vec_block(
                "Ts",
                w(2),
                vec![add_scaled(&[(s, ee(1, 1)), (-s, ee(2, 2))]), add_scaled(&[(s, ee(1, 2)), (s, ee(2, 1))])],
            ));
            v
        }
    }
}

/// Complex isometry onto the range of `P± = (1 ± γ⁰)/2`.
pub fn energy_projector_frame(sign: i8) -> Dense {
    let s = FRAC_1_SQRT_2;
    let t = sign as f64 * s;
    Dense::from_real(4, 2, vec![s, 0.0, 0.0, s, t, 0.0, 0.0, t])
}

/// `E = Σᵢ eᵢ ⊗ γⁱ`: the equivariant embedding of a Dirac spinor into the
/// spatial part of the spinor-vector; `E†E = 3`.
pub fn spin_half_embedding() -> Dense {
    let mut e = Dense::zeros(16, 4);
    for i in 1..4 {
        let col = Dense::real_column_vector(&e4(i));
        e = &e + &col.kron(&gamma(i));
    }
    e
}

/// Rest-frame spin-3/2 projector on the spinor-vector: `Δ ⊗ 1 − E E†/3`.
pub fn spin_three_halves_projector() -> Dense {
    let delta = Dense::from_real_fn(4, 4, |i, j| if i == j && i > 0 { 1.0 } else { 0.0 });
    let e = spin_half_embedding();
    &delta.kron(&Dense::identity(4)) - &(&e * &e.adjoint()).scale_re(1.0 / 3.0)
}

fn realified(name: &str, sub: SubIrrep, complex: Dense) -> Block {
    Block { name: name.into(), sub, basis: complex.realify(), range: None }
}

fn massive_spinor_blocks(spinor: Spinor) -> Result<Vec<Block>> {
    let half = SubIrrep::Spin(1);
    let (pp, pm) = (energy_projector_frame(1), energy_projector_frame(-1));
    Ok(match spinor {
        Spinor::Dirac => vec![realified("p+", half, pp), realified("p-", half, pm)],
        Spinor::SpinorVector => {
            let e0 = Dense::real_column_vector(&e4(0));
            let emb = spin_half_embedding().scale_re(1.0 / 3f64.sqrt());
            let pi = spin_three_halves_projector();
            let mut blocks = vec![
                realified("0p+", half, e0.kron(&pp)),
                realified("0p-", half, e0.kron(&pm)),
                // γⁱ swaps the energy sign, so E·p± lands in the ∓ sector.
                realified("sp-", half, &emb * &pp),
                realified("sp+", half, &emb * &pm),
            ];
            for (name, sign) in [("q+", 1i8), ("q-", -1)] {
                let f = energy_projector_frame(sign);
                let proj = &pi * &Dense::identity(4).kron(&(&f * &f.adjoint()));
                let range = SubspaceBasis::spanning(16, &proj.columns(), 1e-10)?;
                if range.dim() != 4 {
                    return invalid(format!("spin-3/2 block {name} has dimension {}", range.dim()));
                }
                blocks.push(realified(name, SubIrrep::Spin(3), range.matrix().clone()));
            }
            blocks
        }
    })
}

fn tensor_rank(label: &IrrepLabel) -> Option<u32> {
    match *label {
        IrrepLabel::LorentzTensor { up, down } => Some(up as u32 + down as u32),
        _ => None,
    }
}

/// Block decomposition of `label` restricted to the stabilizer of the base
/// point of `orbit`.
pub fn restrict_to_stabilizer(label: &IrrepLabel, orbit: &Orbit) -> Result<RestrictionBlocks> {
    use IrrepLabel::*;
    let tag = label.group();
    if !orbit.supports(tag) {
        return invalid(format!("{} has no {} orbit", tag.name(), orbit.name()));
    }
    let n = label.working_dim();
    let (stabilizer, blocks) = match *label {
        So2Complex { .. } => ("trivial", vec![coord_block("1", SubIrrep::Trivial, 1, &[0])]),
        So2Real { j } => (
            "trivial",
            if j == 0 {
                vec![coord_block("e1", SubIrrep::Trivial, 1, &[0])]
            } else {
                vec![coord_block("e1", SubIrrep::Trivial, 2, &[0]), coord_block("e2", SubIrrep::Trivial, 2, &[1])]
            },
        ),
        O2Real { kind } | O2Complex { kind } => {
            let b = match kind {
                O2Kind::Trivial => vec![coord_block("+", SubIrrep::Trivial, 1, &[0])],
                O2Kind::Sign => vec![coord_block("-", SubIrrep::Sign, 1, &[0])],
                O2Kind::Rot(_) if matches!(label, O2Real { .. }) => {
                    vec![coord_block("+", SubIrrep::Trivial, 2, &[0]), coord_block("-", SubIrrep::Sign, 2, &[1])]
                }
                O2Kind::Rot(_) => {
                    let s = FRAC_1_SQRT_2;
                    vec![
                        vec_block("+", SubIrrep::Trivial, vec![vec![s, s]]),
                        vec_block("-", SubIrrep::Sign, vec![vec![s, -s]]),
                    ]
                }
            };
            ("Z2", b)
        }
        So3Complex { l } => {
            let l = l as i32;
            let b = (-l..=l)
                .rev()
                .map(|m| coord_block(format!("m={m}"), SubIrrep::So2Complex(-m), n, &[(l - m) as usize]))
                .collect();
            ("SO2", b)
        }
        So3Real { l } => {
            let mut b = vec![coord_block("m=0", SubIrrep::So2Real(0), n, &[0])];
            for m in 1..=l as usize {
                b.push(coord_block(format!("m={m}"), SubIrrep::So2Real(m as u32), n, &[2 * m - 1, 2 * m]));
            }
            ("SO2", b)
        }
        O3Complex { l, eps } | O3Real { l, eps } => {
            let zero = if eps > 0 { O2Kind::Trivial } else { O2Kind::Sign };
            let complex = matches!(label, O3Complex { .. });
            let li = l as usize;
            let mut b = vec![coord_block("m=0", SubIrrep::O2(zero), n, &[if complex { li } else { 0 }])];
            for m in 1..=li {
                let idx = if complex { [li - m, li + m] } else { [2 * m - 1, 2 * m] };
                b.push(coord_block(format!("m={m}"), SubIrrep::O2(O2Kind::Rot(m as u32)), n, &idx));
            }
            ("O2", b)
        }
        LorentzTensor { .. } => {
            let rank = tensor_rank(label).unwrap_or(0);
            match orbit {
                Orbit::Massive { .. } => ("SO3", massive_tensor_blocks(rank)),
                _ => ("SO2", massless_tensor_blocks(rank)),
            }
        }
        LorentzSpinor { spinor } => match orbit {
            Orbit::Massive { .. } => ("SU2", massive_spinor_blocks(spinor)?),
            _ => return invalid("spinor labels are supported on the massive orbit only"),
        },
    };
    Ok(RestrictionBlocks { parent: *label, orbit: *orbit, stabilizer, blocks })
}

/// Sum over matching block pairs of the endomorphism dimension.
pub fn matched_dimension(out: &[&Block], inp: &[&Block]) -> usize {
    out.iter()
        .flat_map(|a| inp.iter().map(move |b| (a.sub, b.sub)))
        .filter(|(a, b)| a == b)
        .map(|(a, _)| a.endomorphism_dim())
        .sum()
}
