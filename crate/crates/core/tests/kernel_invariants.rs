mod common;

use common::*;
use eprop::examples::circle::{ex1_kernel, hat_field};
use eprop::examples::svc::{svc_build, Ex2Kernel};
use eprop::kernel::{apply_p, apply_u, dual_iterate, iterate_u, FiniteKernel, TransitionKernel};
use eprop::measure::combine;
use eprop::rational::{int, rat};
use eprop::{DiscreteMeasure, Rational, ScalarField, SpaceKind};
use proptest::prelude::*;

fn ex2() -> Ex2Kernel {
    Ex2Kernel::new(svc_build(8).unwrap())
}

fn kernels() -> Vec<Box<dyn TransitionKernel>> {
    vec![Box::new(ex1_kernel()), Box::new(ex2())]
}

#[test]
fn apply_u_examples() {
    let k1 = ex1_kernel();
    let f = hat_field();
    assert_eq!(apply_u(&k1, &f, &int(0)).unwrap(), 0.0);
    let expected = 0.5 * f.eval(&int(0)) + 0.5 * f.eval(&rat(1, 2));
    assert_eq!(apply_u(&k1, &f, &rat(3, 4)).unwrap(), expected);
    assert_eq!(apply_u(&ex2(), &ScalarField::coordinate(), &rat(3, 4)).unwrap(), 0.5);
}

#[test]
fn iterate_examples() {
    let k = ex1_kernel();
    let d = |x: Rational| DiscreteMeasure::dirac(SpaceKind::Circle, x).unwrap();
    assert_eq!(eprop::kernel::iterate_p(&k, &d(rat(5, 8)), 3).unwrap(), d(int(0)));
    let m = eprop::kernel::iterate_p(&k, &d(rat(1, 3)), 2).unwrap();
    assert_eq!(m.weight_at(&int(0)), rat(1, 2));
    assert_eq!(m.weight_at(&rat(1, 3)), rat(1, 2));
}

#[test]
fn built_in_supports_stay_small() {
    let mut r = rng(31);
    for k in kernels() {
        for _ in 0..20 {
            let x = point(&mut r, k.space());
            let delta = DiscreteMeasure::dirac(k.space(), x).unwrap();
            let traj = eprop::kernel::trajectory(k.as_ref(), &delta, 30, 1000).unwrap();
            for (n, m) in traj.iter().enumerate() {
                assert!(m.len() <= n + 1);
            }
        }
    }
}

#[test]
fn finite_kernel_axioms() {
    let json = r#"{
        "distances": [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]],
        "rows": [["1/2", "1/4", "0", "1/4"], ["0", "0", "1", "0"], ["1/3", "1/3", "1/3", "0"], ["1", "0", "0", "0"]]
    }"#;
    let k = FiniteKernel::parse(json).unwrap();
    let f = ScalarField::new("sq", |x: &Rational| to_f64(x).powi(2));
    for x in 0..4 {
        for n in 0..=12 {
            let a = iterate_u(&k, &f, &int(x), n).unwrap();
            let b = dual_iterate(&k, &f, &int(x), n).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }
    let mu = DiscreteMeasure::from_atoms(k.space(), [(int(0), rat(1, 2)), (int(3), rat(-1, 3))]).unwrap();
    assert_eq!(apply_p(&k, &mu).unwrap().mass(), mu.mass());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_positivity_linearity(seed in any::<u64>(), which in 0usize..2) {
        let k = &kernels()[which];
        let mut r = rng(seed);
        let mu = signed_measure(&mut r, k.space(), 5);
        let nu = signed_measure(&mut r, k.space(), 5);
        let (a, b) = (weight(&mut r), weight(&mut r));
        let pmu = apply_p(k.as_ref(), &mu).unwrap();
        prop_assert_eq!(pmu.mass(), mu.mass());
        let lhs = apply_p(k.as_ref(), &combine(&a, &mu, &b, &nu).unwrap()).unwrap();
        let rhs = combine(&a, &pmu, &b, &apply_p(k.as_ref(), &nu).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let p = probability_measure(&mut r, k.space(), 5);
        prop_assert!(apply_p(k.as_ref(), &p).unwrap().is_probability());
    }

    #[test]
    fn duality(seed in any::<u64>(), which in 0usize..2, n in 0usize..=20) {
        let k = &kernels()[which];
        let mut r = rng(seed);
        let x = point(&mut r, k.space());
        let f = if which == 0 { hat_field() } else { ScalarField::coordinate() };
        let a = iterate_u(k.as_ref(), &f, &x, n).unwrap();
        let b = dual_iterate(k.as_ref(), &f, &x, n).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }
}
