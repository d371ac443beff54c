//! Lorentz kernels on the hyperboloid (massive) and the light cone
//! (massless), with the covariant projectors they steer into.
//!
//! Mixed-index tensors are stored as plain matrices `M[μ][ν] = M^μ_ν`; rank-2
//! operators act on the row-major index `4μ + ν`. Spinor kernels live on the
//! realified spaces, so antilinear maps are ordinary real matrices there.

use super::{finish, KernelBasisElement};
use crate::error::{invalid, Result};
use crate::groups::{coset_representative, GroupTag, Orbit, OrbitPoint, METRIC};
use crate::irreps::lorentz::{charge_conjugation_matrix, gamma, gamma5, pauli};
use crate::irreps::restriction::{restrict_to_stabilizer, Block, SubIrrep};
use crate::irreps::{IrrepLabel, Spinor};
use crate::numerics::{Dense, I};
use crate::solver::CaseSpec;

pub type Vec4 = [f64; 4];

pub(crate) fn eta() -> Dense {
    Dense::from_real_fn(4, 4, |i, j| if i == j { METRIC[i] } else { 0.0 })
}

pub(crate) fn lower(v: &Vec4) -> Vec4 {
    [v[0], -v[1], -v[2], -v[3]]
}

pub(crate) fn outer(a: &Vec4, b: &Vec4) -> Dense {
    Dense::from_real_fn(4, 4, |i, j| a[i] * b[j])
}

/// Four-velocity `u = x/m` of a hyperboloid point.
pub fn velocity(x: &OrbitPoint) -> Result<Vec4> {
    match *x {
        OrbitPoint::Massive { mass, x } => Ok([x[0] / mass, x[1] / mass, x[2] / mass, x[3] / mass]),
        _ => invalid("four-velocity needs a point on the massive orbit"),
    }
}

/// Spatial projector `Δ^μ_ν = δ^μ_ν − u^μ u_ν`.
pub fn massive_delta(u: &Vec4) -> Dense {
    &Dense::identity(4) - &outer(u, &lower(u))
}

/// Swap of the two tensor factors on `4μ + ν`.
pub fn swap16() -> Dense {
    Dense::from_real_fn(16, 16, |r, c| if r == 4 * (c % 4) + c / 4 { 1.0 } else { 0.0 })
}

/// `½(Δ⊗Δ)(1 + swap) − c·Δ^{μν}Δ_{ρσ}`: the symmetric traceless projector of
/// a transverse space of dimension `1/c` (c = 1/3 massive, 1/2 massless).
pub fn symmetric_traceless(delta: &Dense, c: f64) -> Dense {
    let dd = delta.kron(delta);
    let sym = (&dd + &(&dd * &swap16())).scale_re(0.5);
    let up = delta * &eta();
    let down = &eta() * delta;
    let trace_part = Dense::from_real_fn(16, 16, |r, s| up.get(r / 4, r % 4).re * down.get(s / 4, s % 4).re);
    &sym - &trace_part.scale_re(c)
}

/// `½(Δ⊗Δ)(1 − swap)`.
pub fn antisymmetric(delta: &Dense) -> Dense {
    let dd = delta.kron(delta);
    (&dd - &(&dd * &swap16())).scale_re(0.5)
}

/// `u̸ = γ^μ u_μ`.
pub fn slash(u: &Vec4) -> Dense {
    let ul = lower(u);
    (0..4).fold(Dense::zeros(4, 4).into_complex(), |acc, mu| &acc + &gamma(mu).scale_re(ul[mu]))
}

/// Energy projector `P±(u) = (1 ± u̸)/2`.
pub fn energy_projector(u: &Vec4, sign: i8) -> Dense {
    (&Dense::identity(4) + &slash(u).scale_re(sign as f64)).scale_re(0.5)
}

/// Spin-3/2 projector `Π^μ_ν = Δ^μ_ν − ⅓ γ_⊥^μ γ_⊥ν` on the spinor-vector.
pub fn spin_three_halves(u: &Vec4) -> Dense {
    let delta = massive_delta(u);
    let g: Vec<Dense> = (0..4).map(gamma).collect();
    let perp_up: Vec<Dense> = (0..4)
        .map(|mu| (0..4).fold(Dense::zeros(4, 4).into_complex(), |acc, a| &acc + &g[a].scale_re(delta.get(mu, a).re)))
        .collect();
    let perp_down: Vec<Dense> = (0..4).map(|nu| perp_up[nu].scale_re(METRIC[nu])).collect();
    let mut out = Dense::zeros(16, 16).into_complex();
    for mu in 0..4 {
        for nu in 0..4 {
            let block = &Dense::identity(4).scale_re(delta.get(mu, nu).re) - &(&perp_up[mu] * &perp_down[nu]).scale_re(1.0 / 3.0);
            for a in 0..4 {
                for b in 0..4 {
                    out.set(4 * mu + a, 4 * nu + b, block.get(a, b));
                }
            }
        }
    }
    out
}

/// Null frame `(n, n̄)` at a cone point: `n = Λn₀`, `n̄ = Λ(n̄₀ + aᵢeᵢ + ½|a|²n₀)`
/// with `Λ` the section and `a` a transverse gauge shift.
pub fn null_frame(x: &OrbitPoint, gauge: [f64; 2]) -> Result<(Vec4, Vec4)> {
    if !matches!(x, OrbitPoint::Null { .. }) {
        return invalid("null frame needs a point on the light cone");
    }
    let lam = coset_representative(GroupTag::Lorentz, x)?.matrix();
    let a2 = gauge[0] * gauge[0] + gauge[1] * gauge[1];
    let n0 = [1.0, 0.0, 0.0, 1.0];
    let nb0 = [0.5 + 0.5 * a2, gauge[0], gauge[1], -0.5 + 0.5 * a2];
    let apply = |v: Vec4| -> Vec4 {
        let mut o = [0.0; 4];
        for (i, oi) in o.iter_mut().enumerate() {
            *oi = (0..4).map(|k| lam.get(i, k).re * v[k]).sum();
        }
        o
    };
    Ok((apply(n0), apply(nb0)))
}

/// Transverse projector `Δ^μ_ν = δ^μ_ν − n^μ n̄_ν − n̄^μ n_ν`.
pub fn massless_delta(n: &Vec4, nbar: &Vec4) -> Dense {
    &(&Dense::identity(4) - &outer(n, &lower(nbar))) - &outer(nbar, &lower(n))
}

/// Quaternion units on a realified spin-1/2 block, in a frame where the
/// block transforms by `g ∈ SU(2)`: `1, i, j = iσ₂∘conj, k = i·j`.
fn quaternion_units() -> [(&'static str, Dense); 4] {
    let id = Dense::identity(4);
    let i = Dense::identity(2).scale(I).realify();
    let s2 = Dense::from_fn(2, 2, |a, b| pauli(2)[a][b]);
    let j = s2.scale(I).realify_antilinear();
    let k = &i * &j;
    [("1", id), ("i", i), ("j", j), ("k", k)]
}

/// `{1, i, 𝒞, i𝒞} × {1, γ⁵}` on the realified Dirac space, `𝒞ψ = Cγ⁰ψ*`.
fn dirac_units() -> Vec<(String, Dense)> {
    let i = Dense::identity(4).scale(I).realify();
    let cc = charge_conjugation_matrix().realify_antilinear();
    let a = [("1", Dense::identity(8)), ("i", i.clone()), ("C", cc.clone()), ("iC", &i * &cc)];
    let g5 = gamma5().realify();
    let mut out = vec![];
    for (bn, b) in [("", Dense::identity(8)), ("g5", g5)] {
        for (an, am) in &a {
            let name = if bn.is_empty() { an.to_string() } else { format!("{an}*{bn}") };
            out.push((name, am * &b));
        }
    }
    out
}

fn blocks_of(label: &IrrepLabel, orbit: &Orbit, sub: SubIrrep) -> Result<Vec<Block>> {
    Ok(restrict_to_stabilizer(label, orbit)?.blocks.into_iter().filter(|b| b.sub == sub).collect())
}

fn subs_to_build(case: &CaseSpec) -> Result<Vec<SubIrrep>> {
    if let Some(s) = case.sub {
        return Ok(vec![s]);
    }
    let o = restrict_to_stabilizer(&case.out, &case.orbit)?.multiplicities();
    let i = restrict_to_stabilizer(&case.inp, &case.orbit)?.multiplicities();
    Ok(o.keys().filter(|k| i.contains_key(k)).copied().collect())
}

fn frame_pairs(out: &[Block], inp: &[Block], units: &[(&str, Dense)]) -> Vec<(String, Dense)> {
    let mut raw = vec![];
    for a in out {
        for b in inp {
            for (un, u) in units {
                let name = if units.len() == 1 { format!("{}<-{}", a.name, b.name) } else { format!("{}<-{}:{un}", a.name, b.name) };
                raw.push((name, &(&a.basis * u) * &b.basis.transpose()));
            }
        }
    }
    raw
}

fn check_lorentz(case: &CaseSpec, massive: bool) -> Result<()> {
    case.validate()?;
    if case.group() != GroupTag::Lorentz {
        return invalid(format!("Lorentz basis requested for {} labels", case.group().name()));
    }
    if massive != matches!(case.orbit, Orbit::Massive { .. }) {
        return invalid(format!("wrong orbit {} for this basis family", case.orbit.name()));
    }
    if case.out.is_spinor() != case.inp.is_spinor() {
        return invalid("kernels between spinor and tensor labels are not supported");
    }
    Ok(())
}

/// Massive orbit. Integer spins: one element `U_A U_Bᵀ` per matched block
/// pair (the steered versions are `u u`, `Δ`, the spin-1 and spin-2
/// projectors). Spin 1/2 between Dirac fields: `{1, i, 𝒞, i𝒞} × {1, γ⁵} × P±`.
/// Spin 3/2: the same sixteen composed with `Π`. Other spin-1/2 pairs use the
/// quaternion units in aligned block frames.
pub fn basis_lorentz_massive(case: &CaseSpec) -> Result<Vec<KernelBasisElement>> {
    check_lorentz(case, true)?;
    let mut raw = vec![];
    for sub in subs_to_build(case)? {
        let SubIrrep::Spin(t) = sub else {
            return invalid(format!("massive blocks are labelled by spin, got {}", sub.describe()));
        };
        let out = blocks_of(&case.out, &case.orbit, sub)?;
        let inp = blocks_of(&case.inp, &case.orbit, sub)?;
        if out.is_empty() || inp.is_empty() {
            continue;
        }
        let dirac = IrrepLabel::LorentzSpinor { spinor: Spinor::Dirac };
        let sv = IrrepLabel::LorentzSpinor { spinor: Spinor::SpinorVector };
        if t % 2 == 0 {
            raw.extend(frame_pairs(&out, &inp, &[("1", Dense::identity(out[0].dim()))]));
        } else if t == 1 && case.out == dirac && case.inp == dirac {
            let u0 = [1.0, 0.0, 0.0, 0.0];
            for (name, m) in dirac_units() {
                for sign in [1i8, -1] {
                    let p = energy_projector(&u0, sign).realify();
                    raw.push((format!("{name}*P{}", if sign > 0 { '+' } else { '-' }), &m * &p));
                }
            }
        } else if t == 3 && case.out == sv && case.inp == sv {
            let u0 = [1.0, 0.0, 0.0, 0.0];
            let pi = spin_three_halves(&u0).realify();
            let lift = |m: &Dense| -> Dense {
                // I₄ ⊗ m on the realified spinor-vector, coordinates [Re; Im].
                let (re, im) = split_realified(m, 4);
                let top = Dense::hstack(&[&Dense::identity(4).kron(&re.0), &Dense::identity(4).kron(&re.1)]);
                let bot = Dense::hstack(&[&Dense::identity(4).kron(&im.0), &Dense::identity(4).kron(&im.1)]);
                Dense::vstack(&[&top, &bot])
            };
            for (name, m) in dirac_units() {
                for sign in [1i8, -1] {
                    let p = lift(&energy_projector(&u0, sign).realify());
                    raw.push((format!("{name}*P{}*Pi", if sign > 0 { '+' } else { '-' }), &(&lift(&m) * &p) * &pi));
                }
            }
        } else if t == 1 {
            raw.extend(frame_pairs(&out, &inp, &quaternion_units()));
        } else {
            return invalid(format!("no closed form for {} between {} and {}", sub.describe(), case.out, case.inp));
        }
    }
    Ok(finish(*case, raw))
}

/// Splits a realified `2n × 2n` matrix into its four `n × n` blocks
/// `((A, B), (C, D))` for `[[A, B], [C, D]]`.
fn split_realified(m: &Dense, n: usize) -> ((Dense, Dense), (Dense, Dense)) {
    let idx = |o: usize| (o..o + n).collect::<Vec<_>>();
    (
        (m.select(&idx(0), &idx(0)), m.select(&idx(0), &idx(n))),
        (m.select(&idx(n), &idx(0)), m.select(&idx(n), &idx(n))),
    )
}

/// Massless orbit (tensor labels). Weight 0 pairs: `U_A U_Bᵀ`. Weight w > 0
/// pairs: `U_A U_Bᵀ` and `U_A J U_Bᵀ`; for the vector and rank-2 tensors these
/// steer to the transverse projector `Δ(n, n̄)`, the symmetric traceless
/// transverse projector and their rotated companions.
pub fn basis_lorentz_massless(case: &CaseSpec) -> Result<Vec<KernelBasisElement>> {
    check_lorentz(case, false)?;
    if case.out.is_spinor() {
        return invalid("spinor labels are supported on the massive orbit only");
    }
    let mut raw = vec![];
    for sub in subs_to_build(case)? {
        let SubIrrep::So2Real(w) = sub else {
            return invalid(format!("massless blocks are labelled by helicity, got {}", sub.describe()));
        };
        let out = blocks_of(&case.out, &case.orbit, sub)?;
        let inp = blocks_of(&case.inp, &case.orbit, sub)?;
        if w == 0 {
            raw.extend(frame_pairs(&out, &inp, &[("1", Dense::identity(1))]));
        } else {
            let j = Dense::from_real(2, 2, vec![0.0, -1.0, 1.0, 0.0]);
            raw.extend(frame_pairs(&out, &inp, &[("1", Dense::identity(2)), ("J", j)]));
        }
    }
    Ok(finish(*case, raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::random_point;
    use crate::irreps::Field;
    use crate::numerics::{SubspaceBasis, C64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const MASSIVE: Orbit = Orbit::Massive { mass: 1.5 };

    fn label(s: &str) -> IrrepLabel {
        IrrepLabel::parse(GroupTag::Lorentz, Field::Real, s).unwrap()
    }

    fn case(o: &str, i: &str, orbit: Orbit, sub: SubIrrep) -> CaseSpec {
        CaseSpec::restricted(label(o), label(i), orbit, sub)
    }

    #[test]
    fn massive_projector_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let x = random_point(&MASSIVE, &mut rng, 2.0);
            let u = velocity(&x).unwrap();
            let d = massive_delta(&u);
            assert!((&(&d * &d) - &d).max_abs() < 1e-11);
            assert!((d.trace().re - 3.0).abs() < 1e-11);
            let du: f64 = (0..4).map(|k| d.get(1, k).re * u[k]).sum();
            assert!(du.abs() < 1e-11);
            let p2 = symmetric_traceless(&d, 1.0 / 3.0);
            assert!((&(&p2 * &p2) - &p2).max_abs() < 1e-10 * p2.max_abs());
            assert!((p2.trace().re - 5.0).abs() < 1e-10);
            let pp = energy_projector(&u, 1);
            let pm = energy_projector(&u, -1);
            assert!((&(&pp * &pp) - &pp).max_abs() < 1e-11 * pp.max_abs());
            assert!((&pp * &pm).max_abs() < 1e-11 * pp.max_abs());
            assert!((&(&pp + &pm) - &Dense::identity(4)).max_abs() < 1e-14);
            let pi = spin_three_halves(&u);
            assert!((&(&pi * &pi) - &pi).max_abs() < 1e-10 * pi.max_abs().powi(2));
        }
    }

    #[test]
    fn massive_integer_elements_are_the_covariant_projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spin0 = basis_lorentz_massive(&case("vector", "vector", MASSIVE, SubIrrep::Spin(0))).unwrap();
        let spin1 = basis_lorentz_massive(&case("vector", "vector", MASSIVE, SubIrrep::Spin(2))).unwrap();
        let spin2 = basis_lorentz_massive(&case("tensor20", "tensor20", MASSIVE, SubIrrep::Spin(4))).unwrap();
        let t1 = basis_lorentz_massive(&case("tensor20", "tensor20", MASSIVE, SubIrrep::Spin(2))).unwrap();
        let asym = t1.iter().find(|e| e.kind == "as<-as").unwrap();
        assert_eq!((spin0.len(), spin1.len(), spin2.len(), t1.len()), (1, 1, 1, 9));
        for _ in 0..10 {
            let x = random_point(&MASSIVE, &mut rng, 2.0);
            let u = velocity(&x).unwrap();
            let d = massive_delta(&u);
            let tol = 1e-10 * (1.0 + d.max_abs().powi(2));
            assert!((&spin0[0].evaluate(&x).unwrap() - &outer(&u, &lower(&u))).max_abs() < tol);
            assert!((&spin1[0].evaluate(&x).unwrap() - &d).max_abs() < tol);
            let p2 = symmetric_traceless(&d, 1.0 / 3.0);
            assert!((&spin2[0].evaluate(&x).unwrap() - &p2).max_abs() < tol * p2.max_abs());
            let pa = antisymmetric(&d);
            assert!((&asym.evaluate(&x).unwrap() - &pa).max_abs() < tol * pa.max_abs());
        }
    }

    #[test]
    fn spinor_elements_match_projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let half = basis_lorentz_massive(&case("dirac", "dirac", MASSIVE, SubIrrep::Spin(1))).unwrap();
        let three = basis_lorentz_massive(&case("spinor-vector", "spinor-vector", MASSIVE, SubIrrep::Spin(3))).unwrap();
        assert_eq!(half.len(), 16);
        assert_eq!(three.len(), 16);
        assert_eq!(half[0].kind, "1*P+");
        for _ in 0..5 {
            let x = random_point(&MASSIVE, &mut rng, 1.5);
            let u = velocity(&x).unwrap();
            let p = energy_projector(&u, 1);
            let got = half[0].evaluate(&x).unwrap();
            assert!((&got - &p.realify()).max_abs() < 1e-10 * p.max_abs());
            let pi = spin_three_halves(&u);
            let want = &pi * &Dense::identity(4).kron(&p);
            let got = three[0].evaluate(&x).unwrap();
            assert!((&got - &want.realify()).max_abs() < 1e-9 * want.max_abs().max(1.0));
        }
    }

    #[test]
    fn massless_elements_and_gauge_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let spin1 = basis_lorentz_massless(&case("vector", "vector", Orbit::Null, SubIrrep::So2Real(1))).unwrap();
        let spin2 = basis_lorentz_massless(&case("tensor20", "tensor20", Orbit::Null, SubIrrep::So2Real(2))).unwrap();
        assert_eq!((spin1.len(), spin2.len()), (2, 2));
        // Base point: upper-index Δ^{μν} = diag(0, −1, −1, 0).
        let (n0, nb0) = null_frame(&Orbit::Null.base_point(), [0.0, 0.0]).unwrap();
        let up = &massless_delta(&n0, &nb0) * &eta();
        let want = Dense::from_real_fn(4, 4, |i, j| if i == j && (i == 1 || i == 2) { -1.0 } else { 0.0 });
        assert!((&up - &want).max_abs() < 1e-15);
        for _ in 0..10 {
            let x = random_point(&Orbit::Null, &mut rng, 2.0);
            let (n, nb) = null_frame(&x, [0.0, 0.0]).unwrap();
            let nn: f64 = (0..4).map(|k| lower(&n)[k] * nb[k]).sum();
            assert!((nn - 1.0).abs() < 1e-10 * (1.0 + n[0] * nb[0]));
            let d = massless_delta(&n, &nb);
            let tol = 1e-10 * (1.0 + d.max_abs().powi(2));
            assert!((&spin1[0].evaluate(&x).unwrap() - &d).max_abs() < tol);
            assert!((d.trace().re - 2.0).abs() < tol);
            assert!((&(&d * &d) - &d).max_abs() < tol);
            let p2 = symmetric_traceless(&d, 0.5);
            assert!((&spin2[0].evaluate(&x).unwrap() - &p2).max_abs() < tol * p2.max_abs());

            // Gauge shift stays inside span{n eᵢ + eᵢ n, n n} (mixed indices).
            let a = [0.4, -0.7];
            let (_, nb2) = null_frame(&x, a).unwrap();
            let diff = &massless_delta(&n, &nb2) - &d;
            let lam = coset_representative(GroupTag::Lorentz, &x).unwrap().matrix();
            let e = |k: usize| -> Vec4 { [lam.get(0, k).re, lam.get(1, k).re, lam.get(2, k).re, lam.get(3, k).re] };
            let mut span: Vec<Vec<C64>> = (1..3).map(|k| (&outer(&n, &lower(&e(k))) + &outer(&e(k), &lower(&n))).vectorize()).collect();
            span.push(outer(&n, &lower(&n)).vectorize());
            let basis = SubspaceBasis::spanning(16, &span, 1e-12).unwrap();
            assert!(basis.residual(&diff.vectorize()) < 1e-11 * diff.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn spinor_tensor_mix_is_rejected() {
        let c = CaseSpec::new(label("dirac"), label("vector"), MASSIVE);
        assert!(basis_lorentz_massive(&c).is_err());
        let c = CaseSpec::new(label("dirac"), label("dirac"), Orbit::Null);
        assert!(basis_lorentz_massless(&c).is_err());
    }
}
