use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use steerkit::analytic::analytic_basis;
use steerkit::export::GridSpec;
use steerkit::groups::{coset_representative, random_element, random_point, random_stabilizer_element, GroupTag, Orbit};
use steerkit::irreps::{working_matrix, IrrepLabel, O2Kind};
use steerkit::numerics::{nullspace, Dense, DEFAULT_NULLSPACE_TOL};
use steerkit::solver::CaseSpec;
use steerkit::steering::steer;

fn label_strategy() -> impl Strategy<Value = (IrrepLabel, IrrepLabel)> {
    prop_oneof![
        (0u32..6, 0u32..6).prop_map(|(a, b)| (IrrepLabel::So2Real { j: a }, IrrepLabel::So2Real { j: b })),
        (-5i32..6, -5i32..6).prop_map(|(a, b)| (IrrepLabel::So2Complex { n: a }, IrrepLabel::So2Complex { n: b })),
        (0u32..5, 0u32..5).prop_map(|(a, b)| {
            let k = |x| if x == 0 { O2Kind::Trivial } else if x == 1 { O2Kind::Sign } else { O2Kind::Rot(x - 1) };
            (IrrepLabel::O2Real { kind: k(a) }, IrrepLabel::O2Complex { kind: k(b) })
        }),
        (0u32..4, 0u32..4).prop_map(|(a, b)| (IrrepLabel::So3Real { l: a }, IrrepLabel::So3Real { l: b })),
        (0u32..4, 0u32..4, any::<bool>(), any::<bool>()).prop_map(|(a, b, s, t)| {
            let e = |x: bool| if x { 1 } else { -1 };
            (IrrepLabel::O3Complex { l: a, eps: e(s) }, IrrepLabel::O3Complex { l: b, eps: e(t) })
        }),
        (0u8..3, 0u8..3).prop_map(|(a, b)| (IrrepLabel::LorentzTensor { up: a, down: 0 }, IrrepLabel::LorentzTensor { up: 0, down: b })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn working_matrices_compose(pair in label_strategy(), seed in any::<u64>()) {
        let label = pair.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tag = label.group();
        let (a, b) = (random_element(tag, &mut rng, 1.5), random_element(tag, &mut rng, 1.5));
        let ab = a.compose(&b).unwrap();
        let lhs = working_matrix(&label, &ab).unwrap();
        let rhs = &working_matrix(&label, &a).unwrap() * &working_matrix(&label, &b).unwrap();
        let scale = rhs.max_abs().max(1.0);
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-11 * scale);
    }

    #[test]
    fn steering_composes(pair in label_strategy(), seed in any::<u64>()) {
        let (out, inp) = pair;
        prop_assume!(out.field() == inp.field());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tag = out.group();
        let k0 = Dense::from_real_fn(out.working_dim(), inp.working_dim(), |i, j| ((3 * i + 7 * j) % 5) as f64 - 2.0);
        let (a, b) = (random_element(tag, &mut rng, 1.0), random_element(tag, &mut rng, 1.0));
        let two = steer(&steer(&k0, &out, &inp, &a).unwrap(), &out, &inp, &b).unwrap();
        let one = steer(&k0, &out, &inp, &b.compose(&a).unwrap()).unwrap();
        prop_assert!((&two - &one).max_abs() <= 1e-10 * one.max_abs().max(1.0));
    }

    #[test]
    fn evaluation_ignores_the_choice_of_representative(pair in label_strategy(), seed in any::<u64>()) {
        let (out, inp) = pair;
        prop_assume!(out.field() == inp.field());
        let orbit = Orbit::default_for(out.group());
        let case = CaseSpec::new(out, inp, orbit);
        let elems = analytic_basis(&case).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_point(&orbit, &mut rng, 1.0);
        let h = random_stabilizer_element(out.group(), &orbit, &mut rng).unwrap();
        let s = coset_representative(out.group(), &x).unwrap().compose(&h).unwrap();
        for e in &elems {
            let want = e.evaluate(&x).unwrap();
            let got = steer(&e.base, &out, &inp, &s).unwrap();
            prop_assert!((&got - &want).max_abs() <= 1e-10 * want.max_abs().max(1.0), "{} #{}", case.describe(), e.index);
        }
    }

    #[test]
    fn so2_complex_kernel_is_a_phase(j in -6i32..7, l in -6i32..7, phi in 0.0f64..6.28) {
        let (a, b) = (IrrepLabel::So2Complex { n: j }, IrrepLabel::So2Complex { n: l });
        let e = &analytic_basis(&CaseSpec::new(a, b, Orbit::Circle { radius: 1.0 })).unwrap()[0];
        let v = e.evaluate(&steerkit::groups::OrbitPoint::circle(1.0, phi)).unwrap().get(0, 0);
        let want = steerkit::numerics::C64::from_polar(1.0, (j - l) as f64 * phi);
        prop_assert!((v - want).norm() < 1e-12);
    }

    #[test]
    fn nullspace_of_a_rank_deficient_product(rank in 0usize..5, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Dense::from_real(7, rank, (0..7 * rank).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let b = Dense::from_real(rank, 6, (0..6 * rank).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let m = &a * &b;
        let ns = nullspace(&m, DEFAULT_NULLSPACE_TOL).unwrap();
        prop_assert_eq!(ns.dim(), 6 - rank.min(6));
        prop_assert!((&m * ns.matrix()).max_abs() < 1e-10 * m.max_abs().max(1.0));
    }

    #[test]
    fn grids_have_the_declared_size(na in 1usize..6, nb in 1usize..6, ne in 1usize..4, emax in 0.1f64..3.0) {
        for g in [
            GridSpec::Circle { radius: 2.0, n: na * nb },
            GridSpec::Sphere { radius: 1.0, n_alpha: na, n_beta: nb },
            GridSpec::Hyperboloid { mass: 1.5, n_alpha: na, n_beta: nb, n_eta: ne, eta_max: emax },
            GridSpec::Cone { n_alpha: na, n_beta: nb, n_eta: ne, eta_max: emax },
        ] {
            let pts = g.points().unwrap();
            prop_assert_eq!(pts.len(), g.len());
            for p in &pts {
                prop_assert!(p.validate().is_ok());
                prop_assert_eq!(p.orbit(), g.orbit());
            }
        }
    }
}

#[test]
fn random_elements_act_on_their_orbits() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for tag in [GroupTag::So2, GroupTag::O2, GroupTag::So3, GroupTag::O3, GroupTag::Lorentz] {
        let orbit = Orbit::default_for(tag);
        for _ in 0..20 {
            let g = random_element(tag, &mut rng, 2.0);
            let x = random_point(&orbit, &mut rng, 2.0);
            let y = g.act(&x).unwrap();
            assert!(y.validate().is_ok());
            let back = g.inverse().act(&y).unwrap();
            let (a, b) = (x.coordinates(), back.coordinates());
            let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-11 * scale), "{tag:?}");
        }
    }
}
