//! Multivariate polynomial GCD over the rationals.
//!
//! Recursive content/primitive-part scheme: pull out the monomial content,
//! split off variables that only one operand uses, then run a primitive
//! pseudo-remainder sequence in a shared variable. Coefficient rings are the
//! polynomials in the remaining variables, handled by recursion.
//!
//! Before the remainder sequence, each shared variable is tried for a cheap
//! coprimality certificate: specialize every other variable to a fixed
//! integer and take the univariate gcd. If that has degree 0 while both
//! leading coefficients survive the specialization, the gcd does not involve
//! the variable and only the contents remain.

use num_traits::{One, Zero};

use super::poly::{Monomial, Poly};
use super::Rational;

/// Monic greatest common divisor (zero only when both inputs are zero).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    debug_assert_eq!(a.chart(), b.chart());
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let one = Poly::one(a.chart());
    if a.is_constant() || b.is_constant() {
        return one;
    }
    let ma = a.min_exponents();
    let mb = b.min_exponents();
    let mg = ma.gcd(&mb);
    if a.is_monomial() || b.is_monomial() {
        return monomial_poly(a, &mg);
    }
    let g = gcd_no_monomial_content(&a.shift_down(&ma), &b.shift_down(&mb));
    g.mul_monomial(&mg, &One::one()).monic()
}

fn monomial_poly(like: &Poly, m: &Monomial) -> Poly {
    Poly::term(like.chart(), m.clone(), One::one())
}

fn used_vars(p: &Poly) -> Vec<usize> {
    (0..p.chart().len()).filter(|&v| p.uses_var(v)).collect()
}

fn gcd_no_monomial_content(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.chart());
    }
    if a == b {
        return a.monic();
    }
    let va = used_vars(a);
    let vb = used_vars(b);
    // A variable used by only one side cannot occur in the gcd.
    if let Some(&v) = va.iter().find(|v| !vb.contains(v)) {
        return gcd(&content_in(a, v), b);
    }
    if let Some(&v) = vb.iter().find(|v| !va.contains(v)) {
        return gcd(a, &content_in(b, v));
    }
    for &v in &va {
        if image_gcd_degree(a, b, v) == Some(0) {
            return gcd(&content_in(a, v), &content_in(b, v));
        }
    }
    if let Some(g) = divides_either(a, b) {
        return g;
    }
    let v = *va
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v))
        .expect("non-constant polynomial uses a variable");

    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let gc = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = pseudo_rem(&p, &q, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            q = Poly::one(a.chart());
            break;
        }
        p = q;
        q = primitive_part(&r, v);
    }
    primitive_part(&q, v).mul(&gc).monic()
}

/// `b` or `a` (made monic) when it divides the other.
fn divides_either(a: &Poly, b: &Poly) -> Option<Poly> {
    let (small, big) = if a.num_terms() <= b.num_terms() { (a, b) } else { (b, a) };
    big.div_exact(small).map(|_| small.monic())
}

/// Dense coefficients in `var` after substituting `point[u]` for every other variable.
fn specialize(p: &Poly, var: usize, point: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); p.degree_in(var) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (u, &e) in m.exponents().iter().enumerate() {
            if u != var && e > 0 {
                t *= num_traits::pow(point[u].clone(), e as usize);
            }
        }
        out[m.exponents()[var] as usize] += t;
    }
    out
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Degree of the univariate gcd of two dense polynomials (both nonzero).
fn univariate_gcd_degree(mut a: Vec<Rational>, mut b: Vec<Rational>) -> usize {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        // a mod b
        let lb = b.last().unwrap().clone();
        while a.len() >= b.len() {
            let q = a.last().unwrap().clone() / &lb;
            let shift = a.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                a[shift + i] -= &q * bi;
            }
            a.pop();
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

/// Upper bound on `deg_var gcd(a, b)` from one specialization; `None` when
/// a leading coefficient vanishes at every point tried.
fn image_gcd_degree(a: &Poly, b: &Poly, var: usize) -> Option<usize> {
    let n = a.chart().len();
    let (da, db) = (a.degree_in(var) as usize, b.degree_in(var) as usize);
    for shift in 0..3i64 {
        let point: Vec<Rational> = (0..n)
            .map(|u| Rational::from_integer((2 + 3 * u as i64 + 7 * shift).into()))
            .collect();
        let (sa, sb) = (trim(specialize(a, var, &point)), trim(specialize(b, var, &point)));
        if sa.len() == da + 1 && sb.len() == db + 1 {
            return Some(univariate_gcd_degree(sa, sb));
        }
    }
    None
}

/// GCD of the coefficients of `p` viewed as a polynomial in `var`.
fn content_in(p: &Poly, var: usize) -> Poly {
    let coeffs = p.coefficients_in(var);
    let mut it = coeffs.into_values();
    let mut g = it.next().expect("nonzero polynomial").monic();
    for c in it {
        if g.is_one() {
            break;
        }
        g = gcd(&g, &c);
    }
    g
}

fn primitive_part(p: &Poly, var: usize) -> Poly {
    let c = content_in(p, var);
    p.div_exact(&c).expect("content divides").monic()
}

/// A nonzero multiple of the pseudo-remainder of `a` by `b` in `var`.
fn pseudo_rem(a: &Poly, b: &Poly, var: usize) -> Poly {
    let (db, lb) = b.lc_in(var);
    let n = a.chart().len();
    let mut r = a.clone();
    while !r.is_zero() {
        let (dr, lr) = r.lc_in(var);
        if dr < db {
            break;
        }
        let shift = Monomial::var(n, var, dr - db);
        let t = lr.mul(&b.mul_monomial(&shift, &One::one()));
        r = lb.mul(&r).sub(&t);
    }
    r
}
