use pdeflat::curvature::{
    corollary37, curvatures, find, flatness, prop35_relations, quadratic_obstruction,
    s10_relation_reversed, verify_e_structure, verify_prop35, verify_structure_eq, CurvatureId,
    Level, Verdict,
};
use pdeflat::curvature::{s1_tabulated, SymbolicJets};
use pdeflat::jetframe::{integrability, PdeSystem};
use pdeflat::samples::{
    disguised_flat, hessian_system, random_scale_map, random_system, random_z_free, rich_integrable,
    separable_cubic,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cubic_systems_are_never_flat(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seed_sys = separable_cubic(&mut rng);
        let sys = random_scale_map(&mut rng, true).pull_back(&seed_sys).unwrap();
        let (a, b) = integrability(&sys);
        prop_assert!(a.is_zero() && b.is_zero());
        prop_assert!(!quadratic_obstruction(&sys).unwrap());
        prop_assert_eq!(flatness(&sys).verdict, Verdict::NotFlat);
    }

    #[test]
    fn relations_on_hessians(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = hessian_system(&mut rng);
        prop_assert!(verify_prop35(&sys).unwrap());
        prop_assert!(verify_structure_eq(&sys, Level::Eleven).unwrap());
    }

    #[test]
    fn early_levels_hold_without_integrability(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, 2, 2);
        prop_assert!(verify_structure_eq(&sys, Level::Nine).unwrap());
        prop_assert!(verify_structure_eq(&sys, Level::Ten).unwrap());
    }

    #[test]
    fn disguised_flat_is_flat(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = disguised_flat(&mut rng);
        prop_assert_eq!(flatness(&sys).verdict, Verdict::Flat);
    }

    #[test]
    fn prolonged_equation_holds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = match seed % 3 {
            0 => hessian_system(&mut rng),
            1 => rich_integrable(&mut rng),
            _ => disguised_flat(&mut rng),
        };
        prop_assert!(verify_e_structure(&sys).unwrap());
    }

    #[test]
    fn z_free_fast_path_agrees(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q, r) = random_z_free(&mut rng, 3);
        let fast = corollary37(&p, &q, &r).unwrap();
        let sys = PdeSystem::new(p, q, r).unwrap();
        prop_assert_eq!(fast.verdict, flatness(&sys).verdict);
        prop_assert_eq!(fast.verdict == Verdict::Flat, fast.conditions.iter().all(|&c| c));
    }
}

#[test]
fn known_verdicts() {
    let sq = PdeSystem::parse("z1^2", "0", "0").unwrap();
    let r = flatness(&sq);
    assert_eq!(r.verdict, Verdict::NotFlat);
    assert_eq!(r.witnesses, vec![CurvatureId::s(5)]);
    assert_eq!(r.curvature(CurvatureId::s(5)).unwrap().base.to_string(), "-2");

    let r = flatness(&PdeSystem::parse("z1/x1", "0", "0").unwrap());
    assert_eq!(r.verdict, Verdict::Flat);

    let r = flatness(&PdeSystem::parse("y", "0", "0").unwrap());
    assert_eq!(r.verdict, Verdict::NotIntegrable);
    assert_eq!(r.a.to_string(), "z2");
}

/// Solutions `y = p1 x1 + p2 x2 + p3 + p1 p2 x1²/2` give an integrable
/// system on which the `S_10` relation only holds with the opposite sign,
/// while every structure equation holds.
#[test]
fn s10_relation_counterexample() {
    for f11 in ["z1*z2/(1 + x1*z2)", "6*x1*z1*z2/(1 + 3*x1^2*z2)"] {
        let sys = PdeSystem::parse(f11, "0", "0").unwrap();
        let failing: Vec<_> = prop35_relations(&sys)
            .unwrap()
            .into_iter()
            .filter(|r| !r.holds)
            .map(|r| r.target)
            .collect();
        assert_eq!(failing, vec![CurvatureId::s(10)]);
        assert!(s10_relation_reversed(&sys).unwrap());
        assert!(verify_structure_eq(&sys, Level::Eleven).unwrap());
        assert!(verify_e_structure(&sys).unwrap());
        let all = curvatures(&sys).unwrap();
        assert!(!find(&all, CurvatureId::s(10)).is_zero());
    }
}

/// The flat system pulled back by `(x1², x2, y²)`: the tabulated `S_1`
/// expression is nonzero there, the ω̂1∧θ̂0 coefficient of `dα̂` is not.
#[test]
fn s1_tabulated_counterexample() {
    let sys = PdeSystem::parse("(-x1*z1^2 + y*z1)/(x1*y)", "-z1*z2/y", "-z2^2/y").unwrap();
    let r = flatness(&sys);
    assert_eq!(r.verdict, Verdict::Flat);
    assert!(verify_e_structure(&sys).unwrap());
    let tab = s1_tabulated(&mut SymbolicJets::new(&sys));
    assert_eq!(tab.to_string(), "1/(x1*y)");
}

#[test]
fn level_eleven_needs_integrability() {
    let sys = PdeSystem::parse("y", "0", "0").unwrap();
    assert!(verify_structure_eq(&sys, Level::Nine).unwrap());
    assert!(verify_structure_eq(&sys, Level::Eleven).is_err());
}
