use nalgebra::Vector3;
use pdeflat::fibration::{
    cartan_involution, decompose_in_intersection, iwasawa_lower, membership, projective_action,
    random_element, random_sl4, GroupElement, IntersectionCase, SubgroupSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_factors(seed in any::<u64>(), case in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = IntersectionCase::ALL[case];
        let g = random_element(&mut rng, &case.spec());
        let d = decompose_in_intersection(&g, &case.spec()).unwrap();
        prop_assert!(d.flags.all(), "{:?}", d.flags);
    }

    #[test]
    fn compact_type_closed_under_involution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_element(&mut rng, &SubgroupSpec::CompactType);
        let t = cartan_involution(&g).unwrap();
        prop_assert!(membership(&t, &SubgroupSpec::CompactType));
        let back = cartan_involution(&t).unwrap();
        prop_assert!((back.matrix() - g.matrix()).norm() <= 1e-9 * g.matrix().norm());
    }

    #[test]
    fn iwasawa_reconstructs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_sl4(&mut rng);
        let d = iwasawa_lower(&g).unwrap();
        prop_assert!(d.residual <= 1e-10 * (1.0 + g.matrix().norm()));
        prop_assert!(d.a.matrix().diagonal().iter().all(|x| *x > 0.0));
    }

    #[test]
    fn action_is_associative(seed in any::<u64>(), p in prop::array::uniform3(-1.0f64..1.0)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, h) = (random_sl4(&mut rng), random_sl4(&mut rng));
        let p = Vector3::from(p);
        if let (Ok(hp), Ok(lhs)) = (projective_action(&h, &p), projective_action(&g.mul(&h), &p)) {
            if let Ok(rhs) = projective_action(&g, &hp) {
                prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
            }
        }
        prop_assert_eq!(projective_action(&GroupElement::identity(), &p).unwrap(), p);
    }
}
