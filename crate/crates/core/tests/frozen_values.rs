//! Reference values produced by independent computations and frozen here:
//! Wigner matrices from the matrix exponential of `J_y`, the Lorentz matrix
//! from explicit `R_z R_y R_z · B(η)` products, and Lorentz intertwiner
//! dimensions from a separate nullspace computation with a hand-built
//! `SU(2)` action on Dirac spinors.

use steerkit::groups::{GroupElement, Orbit};
use steerkit::irreps::wigner::{weight_index, wigner_big_d, wigner_small_d};
use steerkit::irreps::{IrrepLabel, O2Kind, Spinor, SubIrrep};
use steerkit::numerics::C64;
use steerkit::solver::{predicted_dimension, predicted_dimension_case, solve_basepoint, solve_case, CaseSpec};

#[test]
fn small_d_matches_exponential_of_jy() {
    let frozen = [
        (2, 1, 0, 0.7, -0.6034622514087963),
        (3, 2, -1, 1.3, -0.5028873466696164),
        (4, -3, 2, 2.1, -0.008861293705643616),
        (1, 1, 1, 0.4, 0.9605304970014426),
        (4, 4, -4, 1.9, 0.19164591698923042),
    ];
    for (l, m, mp, beta, want) in frozen {
        let d = wigner_small_d(l, beta).unwrap();
        let got = d.get(weight_index(l, m), weight_index(l, mp));
        assert!((got.re - want).abs() < 1e-14 && got.im.abs() < 1e-15, "d^{l}_{m},{mp}({beta}) = {got}, want {want}");
    }
}

#[test]
fn big_d_entries() {
    let d = wigner_big_d(2, 0.3, 1.1, -0.8).unwrap();
    let want = [((0, 3), C64::new(-0.04138352841007044, 0.23993688545797098)), ((2, 1), C64::new(0.3449401272349138, 0.3551636548749256))];
    for ((i, j), w) in want {
        assert!((d.get(i, j) - w).norm() < 1e-14, "D[{i},{j}] = {}", d.get(i, j));
    }
}

#[test]
fn lorentz_matrix_is_rotation_times_boost() {
    let want = [
        [1.1068504108471011, 0.20707386857392407, -0.10353693428696203, 0.41414773714784814],
        [0.36236777011614324, 0.48646980354717395, -0.7839376624657785, 0.5292440575230022],
        [0.16883918238593396, 0.8303959470183593, 0.5553107947362661, 0.17486898505340875],
        [0.25554013709141643, -0.3415688634205801, 0.2962964045995327, 0.9278145902213778],
    ];
    let m = GroupElement::lorentz(0.3, 0.5, 0.7, [0.2, -0.1, 0.4]).matrix();
    for (i, row) in want.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            assert!((m.get(i, j).re - w).abs() < 1e-14, "Λ[{i}][{j}]");
        }
    }
}

#[test]
fn lorentz_massive_dimensions() {
    let massive = Orbit::Massive { mass: 1.0 };
    let t = |up, down| IrrepLabel::LorentzTensor { up, down };
    let dirac = IrrepLabel::LorentzSpinor { spinor: Spinor::Dirac };
    let sv = IrrepLabel::LorentzSpinor { spinor: Spinor::SpinorVector };
    for (out, inp, want) in [
        (t(1, 0), t(1, 0), 2),
        (t(2, 0), t(1, 0), 5),
        (t(2, 0), t(2, 0), 14),
        (t(0, 1), t(1, 0), 2),
        (dirac, dirac, 16),
        (sv, dirac, 32),
    ] {
        assert_eq!(solve_basepoint(&out, &inp, &massive).unwrap().dim(), want, "{out} <- {inp}");
        assert_eq!(predicted_dimension(&out, &inp, &massive).unwrap(), want);
    }
    // The full spinor-vector space is solved block by block.
    assert_eq!(predicted_dimension(&sv, &sv, &massive).unwrap(), 80);
    let blocks: usize = [SubIrrep::Spin(1), SubIrrep::Spin(3)]
        .iter()
        .map(|&s| solve_case(&CaseSpec::restricted(sv, sv, massive, s)).unwrap().dim())
        .sum();
    assert_eq!(blocks, 80);
    assert_eq!(predicted_dimension_case(&CaseSpec::restricted(sv, sv, massive, SubIrrep::Spin(3))).unwrap(), 16);
}

#[test]
fn compact_counts_from_the_tables() {
    let circle = Orbit::Circle { radius: 1.0 };
    let sphere = Orbit::Sphere { radius: 1.0 };
    let dim = |a: IrrepLabel, b: IrrepLabel, o: Orbit| solve_basepoint(&a, &b, &o).unwrap().dim();
    assert_eq!(dim(IrrepLabel::So2Real { j: 2 }, IrrepLabel::So2Real { j: 3 }, circle), 4);
    assert_eq!(dim(IrrepLabel::So2Real { j: 0 }, IrrepLabel::So2Real { j: 3 }, circle), 2);
    let o2 = |kind| IrrepLabel::O2Real { kind };
    assert_eq!(dim(o2(O2Kind::Trivial), o2(O2Kind::Sign), circle), 0);
    assert_eq!(dim(o2(O2Kind::Rot(2)), o2(O2Kind::Rot(5)), circle), 2);
    assert_eq!(dim(o2(O2Kind::Sign), o2(O2Kind::Rot(1)), circle), 1);
    for (j, l) in [(0, 3), (2, 2), (4, 1)] {
        let m = j.min(l) as usize;
        assert_eq!(dim(IrrepLabel::So3Real { l: j }, IrrepLabel::So3Real { l }, sphere), 2 * m + 1);
        assert_eq!(dim(IrrepLabel::So3Complex { l: j }, IrrepLabel::So3Complex { l }, sphere), 2 * m + 1);
        assert_eq!(dim(IrrepLabel::O3Real { l: j, eps: 1 }, IrrepLabel::O3Real { l, eps: 1 }, sphere), m + 1);
        assert_eq!(dim(IrrepLabel::O3Real { l: j, eps: 1 }, IrrepLabel::O3Real { l, eps: -1 }, sphere), m);
    }
}
