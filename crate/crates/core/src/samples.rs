//! Seeded generators of test systems, shared by `selftest` and the test suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::jetframe::{jet_chart, PdeSystem, ScaleMap};
use crate::symexpr::{Monomial, Poly, RatFunc, Rational};

fn small_coeff<R: Rng>(rng: &mut R) -> Rational {
    let n: i64 = loop {
        let n = rng.gen_range(-5..=5);
        if n != 0 {
            break n;
        }
    };
    let d: i64 = *[1, 1, 1, 2, 3].choose(rng).unwrap();
    Rational::new(n.into(), d.into())
}

/// Random sparse polynomial over the jet chart in the given coordinates
/// (by index) with total degree at most `max_deg`, `terms` attempts.
pub fn random_poly<R: Rng>(rng: &mut R, vars: &[usize], max_deg: u32, terms: usize) -> RatFunc {
    let chart = jet_chart();
    let mut out = Poly::zero(chart);
    for _ in 0..terms {
        let mut exps = vec![0u32; chart.len()];
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            exps[*vars.choose(rng).unwrap()] += 1;
        }
        out = out.add(&Poly::term(chart, Monomial::from_exponents(exps), small_coeff(rng)));
    }
    RatFunc::from_poly(out)
}

const X1: usize = 0;
const X2: usize = 1;
const Y: usize = 2;
const Z1: usize = 3;
const Z2: usize = 4;

/// Random polynomial triple, z-degree ≤ `z_deg`, coefficient degree ≤ `c_deg`.
/// Usually not integrable.
pub fn random_system<R: Rng>(rng: &mut R, z_deg: u32, c_deg: u32) -> PdeSystem {
    let mut f = || {
        let coeff_terms = rng.gen_range(1..=3);
        let mut acc = RatFunc::zero(jet_chart());
        for _ in 0..rng.gen_range(1..=3) {
            let zpart = random_poly(rng, &[Z1, Z2], z_deg, 1);
            let cpart = random_poly(rng, &[X1, X2, Y], c_deg, coeff_terms);
            acc = acc + zpart * cpart;
        }
        acc
    };
    PdeSystem::new(f(), f(), f()).expect("jet chart")
}

/// Hessian of a random quartic `F(x1, x2)`; always integrable.
pub fn hessian_system<R: Rng>(rng: &mut R) -> PdeSystem {
    let f = random_poly(rng, &[X1, X2], 4, 6);
    let d = |g: &RatFunc, v: &str| g.derive(v).unwrap();
    let fx1 = d(&f, "x1");
    PdeSystem::new(d(&fx1, "x1"), d(&fx1, "x2"), d(&d(&f, "x2"), "x2")).unwrap()
}

/// `(P(x1, z1), 0, R(x2, z2))` with `P` of exact degree 3 in `z1`; always
/// integrable.
pub fn separable_cubic<R: Rng>(rng: &mut R) -> PdeSystem {
    let chart = jet_chart();
    let z1 = RatFunc::var(chart, "z1").unwrap();
    let lead = RatFunc::constant(chart, small_coeff(rng)) * z1.pow(3).unwrap();
    let p = lead + random_poly(rng, &[X1, Z1], 2, 3);
    let r = random_poly(rng, &[X2, Z2], 3, 3);
    PdeSystem::new(p, RatFunc::zero(chart), r).unwrap()
}

/// A random scale map. `affine_y` keeps `Y` affine in `y`, which preserves
/// polynomiality in `z` under pull-back.
pub fn random_scale_map<R: Rng>(rng: &mut R, affine_y: bool) -> ScaleMap {
    let chart = jet_chart();
    let c = |rng: &mut R| RatFunc::constant(chart, small_coeff(rng));
    let coord = |rng: &mut R, name: &str| -> RatFunc {
        let x = RatFunc::var(chart, name).unwrap();
        match rng.gen_range(0..3) {
            0 => c(rng) * &x + c(rng),
            1 => &x * &x + c(rng) * &x,
            _ => &x / (&x + c(rng)),
        }
    };
    loop {
        let x1 = coord(rng, "x1");
        let x2 = coord(rng, "x2");
        let y = RatFunc::var(chart, "y").unwrap();
        let scale = c(rng) + random_poly(rng, &[X1, X2], 1, 2);
        let shift = random_poly(rng, &[X1, X2], 2, 2);
        let yy = if affine_y || rng.gen_bool(0.5) {
            scale * y + shift
        } else {
            &y * &y * c(rng) + y + shift
        };
        if let Ok(m) = ScaleMap::new(x1, x2, yy) {
            return m;
        }
    }
}

/// Integrable systems with z-dependence in every component: pull-backs of
/// separable or linear seeds through random scale maps.
pub fn rich_integrable<R: Rng>(rng: &mut R) -> PdeSystem {
    let seed = match rng.gen_range(0..3) {
        0 => separable_cubic(rng),
        1 => {
            let chart = jet_chart();
            let p = random_poly(rng, &[X1, Z1], 2, 3);
            let r = random_poly(rng, &[X2, Z2], 2, 3);
            PdeSystem::new(p, RatFunc::zero(chart), r).unwrap()
        }
        _ => hessian_system(rng),
    };
    let map = random_scale_map(rng, true);
    map.pull_back(&seed).expect("pull-back of a polynomial system")
}

/// Flat systems in disguise: the flat system pulled back by a random scale map.
pub fn disguised_flat<R: Rng>(rng: &mut R) -> PdeSystem {
    random_scale_map(rng, false)
        .pull_back(&PdeSystem::flat())
        .expect("pull-back of the flat system")
}

/// Random z-free triple `(P, Q, R)` of degree ≤ `deg`. Half the time it is
/// built to satisfy the z-free flatness conditions.
pub fn random_z_free<R: Rng>(rng: &mut R, deg: u32) -> (RatFunc, RatFunc, RatFunc) {
    if rng.gen_bool(0.5) {
        let f = random_poly(rng, &[X1, X2], deg + 2, 5);
        let d = |g: &RatFunc, v: &str| g.derive(v).unwrap();
        let fx1 = d(&f, "x1");
        (d(&fx1, "x1"), d(&fx1, "x2"), d(&d(&f, "x2"), "x2"))
    } else {
        let mut p = || random_poly(rng, &[X1, X2, Y], deg, 3);
        (p(), p(), p())
    }
}
