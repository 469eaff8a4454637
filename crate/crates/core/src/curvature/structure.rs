//! Exact verification of the structure equations on the coframe bundle, its
//! reduction, and the prolonged `{e}`-structure.

use super::{
    bundle_chart, curvatures, ensure_integrable, find, reduced_chart, reduction, torsions_l,
    torsions_t, CurvatureError, CurvatureId, Result, Vars,
};
use crate::exterior::DiffForm;
use crate::jetframe::{coframe, integrability, PdeSystem};
use crate::symexpr::{Chart, RatFunc};

/// Which structure equation to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Torsions `T_1..T_14` on the full bundle.
    Nine,
    /// Absorbed form with `L_1..L_6`.
    Ten,
    /// Reduced bundle, before and after absorbing `M_2, M_10..M_13`.
    Eleven,
}

impl TryFrom<u8> for Level {
    type Error = CurvatureError;

    fn try_from(n: u8) -> Result<Level> {
        match n {
            9 => Ok(Level::Nine),
            10 => Ok(Level::Ten),
            11 => Ok(Level::Eleven),
            _ => Err(CurvatureError::BadLevel(n)),
        }
    }
}

// Thin infallible wrappers: every form below lives on one chart.
fn add(a: &DiffForm, b: &DiffForm) -> DiffForm {
    a.add(b).expect("same chart")
}

fn sub(a: &DiffForm, b: &DiffForm) -> DiffForm {
    a.sub(b).expect("same chart")
}

fn w(a: &DiffForm, b: &DiffForm) -> DiffForm {
    a.wedge(b).expect("same chart")
}

fn sc(f: &RatFunc, a: &DiffForm) -> DiffForm {
    a.scale(f).expect("same chart")
}

fn sum(parts: impl IntoIterator<Item = DiffForm>, chart: &Chart, degree: usize) -> DiffForm {
    parts
        .into_iter()
        .fold(DiffForm::zero(chart, degree), |acc, p| add(&acc, &p))
}

fn dvar(chart: &Chart, name: &str) -> DiffForm {
    DiffForm::coord(chart, name).expect("chart coordinate")
}

/// `d(name)/name`.
fn dlog(v: &Vars, name: &str) -> DiffForm {
    sc(&v.v(name).recip().expect("nonzero"), &dvar(v.chart, name))
}

/// The base coframe lifted to `chart`.
fn base_coframe(sys: &PdeSystem, chart: &Chart) -> Result<Vec<DiffForm>> {
    Ok(coframe(sys)
        .iter()
        .map(|f| f.embed(chart))
        .collect::<std::result::Result<_, _>>()?)
}

/// Tautological forms `(θ0, θ1, θ2, ω1, ω2)` given the `θ0`-coefficients of `θ1, θ2`.
fn tautological(v: &Vars, base: &[DiffForm], b: &RatFunc, e: &RatFunc) -> [DiffForm; 5] {
    let (c, g, h) = (v.v("c"), v.v("g"), v.v("h"));
    [
        sc(&(&c * &h), &base[0]),
        add(&sc(b, &base[0]), &sc(&c, &base[1])),
        add(&sc(e, &base[0]), &sc(&g, &base[2])),
        sc(&h, &base[3]),
        sc(&v.k(), &base[4]),
    ]
}

/// `LHS - RHS` for every row of the chosen structure equation. All entries
/// vanish iff the identity holds. Levels 9 and 10 carry the Frobenius terms
/// `cA dx1∧dx2`, `gB dx1∧dx2` so that they hold without integrability.
pub fn structure_residuals(sys: &PdeSystem, level: Level) -> Result<Vec<DiffForm>> {
    match level {
        Level::Nine | Level::Ten => full_bundle(sys, level),
        Level::Eleven => {
            ensure_integrable(sys)?;
            reduced_bundle(sys)
        }
    }
}

/// Names of the rows returned by [`structure_residuals`], in order.
pub fn row_labels(level: Level) -> Vec<&'static str> {
    const ROWS: [&str; 5] = ["dθ0", "dθ1", "dθ2", "dω1", "dω2"];
    match level {
        Level::Nine => ROWS.to_vec(),
        Level::Ten => ROWS.iter().copied().chain(["α+γ-δ-ψ"]).collect(),
        Level::Eleven => ROWS
            .iter()
            .copied()
            .chain(["dθ0 (absorbed)", "dθ1 (absorbed)", "dθ2 (absorbed)", "dω1 (absorbed)", "dω2 (absorbed)"])
            .collect(),
    }
}

pub fn verify_structure_eq(sys: &PdeSystem, level: Level) -> Result<bool> {
    Ok(structure_residuals(sys, level)?.iter().all(DiffForm::is_zero))
}

fn full_bundle(sys: &PdeSystem, level: Level) -> Result<Vec<DiffForm>> {
    let chart = bundle_chart();
    let v = Vars { chart };
    let base = base_coframe(sys, chart)?;
    let (b, c, e, g, h) = (v.v("b"), v.v("c"), v.v("e"), v.v("g"), v.v("h"));
    let ch = &c * &h;
    let [t0, t1, t2, w1, w2] = tautological(&v, &base, &b, &e);
    let lhs: Vec<DiffForm> = [&t0, &t1, &t2, &w1, &w2].iter().map(|f| f.d()).collect();

    let (a_obs, b_obs) = integrability(sys);
    let dx12 = w(&base[3], &base[4]);
    let frob1 = sc(&(&c * &v.lift(&a_obs)), &dx12);
    let frob2 = sc(&(&g * &v.lift(&b_obs)), &dx12);

    let (dc, dg, dh) = (dlog(&v, "c"), dlog(&v, "g"), dlog(&v, "h"));
    let dk = sub(&add(&dc, &dh), &dg);
    let t = torsions_t(sys);
    // T_i with 1-based indexing
    let ti = |i: usize| &t[i - 1];
    let db_part = sub(
        &sc(&ch.recip()?, &dvar(chart, "b")),
        &sc(&(&b / &ch), &dc),
    );
    let de_part = sub(
        &sc(&ch.recip()?, &dvar(chart, "e")),
        &sc(&(&e / &ch), &dg),
    );
    let lin = |x: &RatFunc, y: &RatFunc| add(&sc(x, &w1), &sc(y, &w2));

    let rhs: Vec<DiffForm> = match level {
        Level::Nine => vec![
            sum(
                [
                    w(&add(&dc, &dh), &t0),
                    sc(ti(1), &w(&w1, &t0)),
                    sc(ti(2), &w(&w2, &t0)),
                    w(&t1, &w1).neg(),
                    w(&t2, &w2).neg(),
                ],
                chart,
                2,
            ),
            sum(
                [
                    w(&db_part, &t0),
                    w(&dc, &t1),
                    w(&t0, &lin(ti(3), ti(4))),
                    w(&t1, &lin(ti(5), ti(6))),
                    w(&t2, &lin(ti(7), ti(8))),
                    frob1,
                ],
                chart,
                2,
            ),
            sum(
                [
                    w(&de_part, &t0),
                    w(&dg, &t2),
                    w(&t0, &lin(ti(9), ti(10))),
                    w(&t1, &lin(ti(11), ti(12))),
                    w(&t2, &lin(ti(13), ti(14))),
                    frob2,
                ],
                chart,
                2,
            ),
            w(&dh, &w1),
            w(&dk, &w2),
        ],
        Level::Ten => {
            let l = torsions_l(sys);
            let li = |i: usize| &l[i - 1];
            let shift = lin(&(&b / &ch), &(&e / &ch));
            let alpha = sub(&dc, &shift);
            let delta = sub(&dg, &shift);
            let beta = sub(&db_part, &lin(ti(3), ti(4)));
            let eps = sub(&de_part, &lin(ti(9), ti(10)));
            let (gamma, psi) = (dh.clone(), dk.clone());
            let rows = vec![
                sum(
                    [
                        w(&add(&alpha, &gamma), &t0),
                        w(&t1, &w1).neg(),
                        w(&t2, &w2).neg(),
                    ],
                    chart,
                    2,
                ),
                sum(
                    [
                        w(&beta, &t0),
                        w(&alpha, &t1),
                        sc(li(1), &w(&t1, &w1)),
                        sc(li(2), &w(&t1, &w2)),
                        sc(li(3), &w(&t2, &w1)),
                        sc(li(4), &w(&t2, &w2)),
                        frob1,
                    ],
                    chart,
                    2,
                ),
                sum(
                    [
                        w(&eps, &t0),
                        w(&delta, &t2),
                        sc(li(2), &w(&t1, &w1)),
                        sc(li(5), &w(&t1, &w2)),
                        sc(li(4), &w(&t2, &w1)),
                        sc(li(6), &w(&t2, &w2)),
                        frob2,
                    ],
                    chart,
                    2,
                ),
                w(&gamma, &w1),
                w(&psi, &w2),
            ];
            let mut res: Vec<DiffForm> =
                lhs.iter().zip(&rows).map(|(l, r)| sub(l, r)).collect();
            // α + γ = δ + ψ
            res.push(sub(&add(&alpha, &gamma), &add(&delta, &psi)));
            return Ok(res);
        }
        Level::Eleven => unreachable!(),
    };
    Ok(lhs.iter().zip(&rhs).map(|(l, r)| sub(l, r)).collect())
}

/// Everything needed on the reduced bundle.
struct Reduced {
    v: Vars<'static>,
    taut: [DiffForm; 5],
    m: Vec<RatFunc>,
    s: Vec<RatFunc>,
    /// `(α̂, γ̂, δ̂, ψ̂)`.
    hatted: [DiffForm; 4],
}

fn reduced_setup(sys: &PdeSystem) -> Result<Reduced> {
    let chart = reduced_chart();
    let v = Vars { chart };
    let base = base_coframe(sys, chart)?;
    let (bh, eh) = reduction(sys)?;
    let taut = tautological(&v, &base, &bh, &eh);
    let all = curvatures(sys)?;
    let m = (1..=13)
        .map(|i| find(&all, CurvatureId::m(i)).value_on(chart))
        .collect::<Result<Vec<_>>>()?;
    let s = (1..=14)
        .map(|i| find(&all, CurvatureId::s(i)).value_on(chart))
        .collect::<Result<Vec<_>>>()?;
    let [t0, _, _, w1, w2] = &taut;
    let mi = |i: usize| &m[i - 1];
    let (alpha, gamma, delta) = (dlog(&v, "c"), dlog(&v, "h"), dlog(&v, "g"));
    let psi = sub(&add(&alpha, &gamma), &delta);
    let alpha_h = sum(
        [alpha, sc(mi(2), t0).neg(), sc(mi(10), w1), sc(mi(11), w2)],
        chart,
        1,
    );
    let gamma_h = add(&gamma, &sc(&(mi(12) - mi(10)), w1));
    let delta_h = sum(
        [delta, sc(mi(2), t0).neg(), sc(mi(12), w1), sc(mi(13), w2)],
        chart,
        1,
    );
    let psi_h = add(&psi, &sc(&(mi(11) - mi(13)), w2));
    Ok(Reduced {
        v,
        taut,
        m,
        s,
        hatted: [alpha_h, gamma_h, delta_h, psi_h],
    })
}

fn reduced_bundle(sys: &PdeSystem) -> Result<Vec<DiffForm>> {
    let r = reduced_setup(sys)?;
    let chart = r.v.chart;
    let [t0, t1, t2, w1, w2] = &r.taut;
    let lhs: Vec<DiffForm> = r.taut.iter().map(DiffForm::d).collect();
    let mi = |i: usize| &r.m[i - 1];
    let (alpha, gamma, delta) = (dlog(&r.v, "c"), dlog(&r.v, "h"), dlog(&r.v, "g"));
    let psi = sub(&add(&alpha, &gamma), &delta);

    // Before absorption.
    let pre = vec![
        sum(
            [
                w(&add(&alpha, &gamma), t0),
                sc(mi(12), &w(w1, t0)),
                sc(mi(11), &w(w2, t0)),
                w(t1, w1).neg(),
                w(t2, w2).neg(),
            ],
            chart,
            2,
        ),
        sum(
            [
                w(&alpha, t1),
                sc(mi(1), &w(t2, w1)),
                sc(mi(2), &w(t1, t0)),
                sc(mi(3), &w(t2, t0)),
                sc(mi(4), &w(w1, t0)),
                sc(mi(5), &w(w2, t0)),
                sc(mi(10), &w(w1, t1)),
                sc(mi(11), &w(w2, t1)),
            ],
            chart,
            2,
        ),
        sum(
            [
                w(&delta, t2),
                sc(mi(6), &w(t1, w2)),
                sc(mi(7), &w(t1, t0)),
                sc(mi(2), &w(t2, t0)),
                sc(mi(8), &w(w1, t0)),
                sc(mi(9), &w(w2, t0)),
                sc(mi(12), &w(w1, t2)),
                sc(mi(13), &w(w2, t2)),
            ],
            chart,
            2,
        ),
        w(&gamma, w1),
        w(&psi, w2),
    ];

    // After absorption.
    let [alpha_h, gamma_h, delta_h, psi_h] = &r.hatted;
    let post = vec![
        sum(
            [
                w(&add(alpha_h, gamma_h), t0),
                w(w1, t1),
                w(w2, t2),
            ],
            chart,
            2,
        ),
        sum(
            [
                w(alpha_h, t1),
                sc(mi(1), &w(t2, w1)),
                sc(mi(3), &w(t2, t0)),
                sc(mi(4), &w(w1, t0)),
                sc(mi(5), &w(w2, t0)),
            ],
            chart,
            2,
        ),
        sum(
            [
                w(delta_h, t2),
                sc(mi(6), &w(t1, w2)),
                sc(mi(7), &w(t1, t0)),
                sc(mi(8), &w(w1, t0)),
                sc(mi(9), &w(w2, t0)),
            ],
            chart,
            2,
        ),
        w(gamma_h, w1),
        w(psi_h, w2),
    ];
    Ok(lhs
        .iter()
        .zip(&pre)
        .chain(lhs.iter().zip(&post))
        .map(|(l, r)| sub(l, r))
        .collect())
}

/// Residuals of the prolonged structure equation: the `dθ̂2` row written with
/// `α̂ + γ̂ - ψ̂`, and the rows for `dα̂`, `dγ̂`, `dψ̂` in terms of the `S_j`.
pub fn e_structure_residuals(sys: &PdeSystem) -> Result<Vec<DiffForm>> {
    ensure_integrable(sys)?;
    let r = reduced_setup(sys)?;
    let chart = r.v.chart;
    let [t0, t1, t2, w1, w2] = &r.taut;
    let [alpha_h, gamma_h, _, psi_h] = &r.hatted;
    let mi = |i: usize| &r.m[i - 1];
    let si = |i: usize| &r.s[i - 1];
    let theta2_row = sum(
        [
            w(&sub(&add(alpha_h, gamma_h), psi_h), t2),
            sc(mi(6), &w(t1, w2)),
            sc(mi(7), &w(t1, t0)),
            sc(mi(8), &w(w1, t0)),
            sc(mi(9), &w(w2, t0)),
        ],
        chart,
        2,
    );
    let alpha_row = sum(
        [
            sc(si(1), &w(w1, t0)),
            sc(si(2), &w(w2, t0)),
            sc(si(3), &w(t1, t0)),
            sc(si(4), &w(t2, t0)),
            sc(si(5), &w(w1, t1)),
            sc(si(6), &w(w1, w2)),
            sc(si(7), &w(t2, w1)),
            sc(mi(7), &w(t1, w2)).neg(),
        ],
        chart,
        2,
    );
    let gamma_row = sum(
        [
            sc(si(8), &w(w1, w2)),
            sc(si(9), &w(w1, t0)),
            sc(si(5), &w(t1, w1)),
            sc(si(10), &w(t2, w1)),
        ],
        chart,
        2,
    );
    let psi_row = sum(
        [
            sc(si(11), &w(w1, w2)),
            sc(si(12), &w(w2, t0)),
            sc(si(13), &w(t1, w2)),
            sc(si(14), &w(t2, w2)),
        ],
        chart,
        2,
    );
    Ok(vec![
        sub(&t2.d(), &theta2_row),
        sub(&alpha_h.d(), &alpha_row),
        sub(&gamma_h.d(), &gamma_row),
        sub(&psi_h.d(), &psi_row),
    ])
}

pub fn verify_e_structure(sys: &PdeSystem) -> Result<bool> {
    Ok(e_structure_residuals(sys)?.iter().all(DiffForm::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(a: &str, b: &str, c: &str) -> PdeSystem {
        PdeSystem::parse(a, b, c).unwrap()
    }

    #[test]
    fn flat_levels() {
        let flat = PdeSystem::flat();
        for level in [Level::Nine, Level::Ten, Level::Eleven] {
            assert!(verify_structure_eq(&flat, level).unwrap(), "{level:?}");
        }
        assert!(verify_e_structure(&flat).unwrap());
    }

    #[test]
    fn linear_family_level_eleven() {
        let s = sys("z1", "0", "z2");
        assert!(verify_structure_eq(&s, Level::Eleven).unwrap());
        assert!(verify_e_structure(&s).unwrap());
    }

    #[test]
    fn non_integrable_lower_levels() {
        let s = sys("y", "x1*z2", "z1^2");
        assert!(verify_structure_eq(&s, Level::Nine).unwrap());
        assert!(verify_structure_eq(&s, Level::Ten).unwrap());
        assert!(matches!(
            verify_structure_eq(&s, Level::Eleven),
            Err(CurvatureError::NotIntegrable { .. })
        ));
    }

    #[test]
    fn level_numbers() {
        assert_eq!(Level::try_from(10).unwrap(), Level::Ten);
        assert!(Level::try_from(12).is_err());
    }
}
