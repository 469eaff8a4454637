use pdeflat::duality::{dual_pde, fiber_of_solution, flat_projections, incidence_holds, SolutionFamily};
use pdeflat::symexpr::Rational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

proptest! {
    #[test]
    fn projections_hit_every_target(
        t in prop::array::uniform3((-50i64..50, 1i64..9)),
        z in prop::array::uniform2((-50i64..50, 1i64..9)),
    ) {
        let [x1, x2, y] = t.map(|(n, d)| q(n, d));
        let [z1, z2] = z.map(|(n, d)| q(n, d));
        // π1: any jet over the point
        let (p1, _) = flat_projections(&[x1.clone(), x2.clone(), y.clone(), z1.clone(), z2.clone()]);
        prop_assert_eq!(p1, [x1.clone(), x2.clone(), y.clone()]);
        // π2: a point of the leaf over (a, b, c) = (z1, z2, y)
        let leaf = fiber_of_solution(z1.clone(), z2.clone(), y.clone());
        let (_, p2) = flat_projections(&leaf.point(&x1, &x2));
        prop_assert_eq!(p2, [z1, z2, y]);
    }
}

#[test]
fn flat_family_dual_is_flat() {
    assert!(dual_pde(&SolutionFamily::flat()).unwrap().is_flat());
    assert!(incidence_holds());
}

#[test]
fn dual_solution_space_gives_flat_family_again() {
    // Y = y - x1 X1 - x2 X2 read with the roles of the two spaces exchanged.
    let fam = SolutionFamily::parse("-X1*x1 - X2*x2 + Y", Some(("Z1", "Z2"))).unwrap();
    let d = dual_pde(&fam).unwrap();
    assert!(d.is_flat());
}

#[test]
fn flattening_of_square_family() {
    // solutions of (z1/x1, 0, 0)
    let fam = SolutionFamily::parse("X1*x1^2 + X2*x2 + Y", None).unwrap();
    assert!(dual_pde(&fam).unwrap().is_flat());
}
