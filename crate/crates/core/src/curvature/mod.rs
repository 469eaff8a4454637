//! Torsions, curvatures and the flatness verdict.
//!
//! Bundle coordinates are `(x1, x2, y, z1, z2, b, c, e, g, h)`; the fifth
//! fiber parameter is always eliminated through `k = ch/g`. After the
//! reduction `L2 = L4 = 0` the parameters `b, e` become functions and the
//! reduced chart is `(x1, x2, y, z1, z2, c, g, h)`.

mod formulas;
mod structure;

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

pub use formulas::{
    base_formula, fiber_factor, s1_tabulated, CurvatureId, Family, FiberFactor, JetSource, Scalar,
    SymbolicJets, TEST_SET,
};
pub use structure::{
    e_structure_residuals, row_labels, structure_residuals, verify_e_structure, verify_structure_eq,
    Level,
};

use crate::exterior::FormError;
use crate::jetframe::{frame_derive, integrability, jet_chart, Frame, JetError, PdeSystem};
use crate::symexpr::{Chart, RatFunc, Substitution, SymError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurvatureError {
    #[error("system is not integrable (A = {a}, B = {b})")]
    NotIntegrable { a: String, b: String },
    #[error("{0} depends on z1 or z2")]
    ZDependence(&'static str),
    #[error("{0} is not polynomial in z1, z2")]
    NotPolynomialInZ(&'static str),
    #[error("structure level must be 9, 10 or 11, got {0}")]
    BadLevel(u8),
    #[error("reduction L2 = L4 = 0 is not solvable for b, e")]
    Unreducible,
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

pub type Result<T> = std::result::Result<T, CurvatureError>;

pub fn bundle_chart() -> &'static Chart {
    static C: OnceLock<Chart> = OnceLock::new();
    C.get_or_init(|| Chart::of(&["x1", "x2", "y", "z1", "z2", "b", "c", "e", "g", "h"]))
}

pub fn reduced_chart() -> &'static Chart {
    static C: OnceLock<Chart> = OnceLock::new();
    C.get_or_init(|| Chart::of(&["x1", "x2", "y", "z1", "z2", "c", "g", "h"]))
}

/// Shorthands for building expressions over a bundle chart.
pub(crate) struct Vars<'a> {
    pub chart: &'a Chart,
}

impl Vars<'_> {
    pub fn v(&self, name: &str) -> RatFunc {
        RatFunc::var(self.chart, name).expect("bundle coordinate")
    }

    pub fn int(&self, n: i64) -> RatFunc {
        RatFunc::from_int(self.chart, n)
    }

    /// `k = ch/g`.
    pub fn k(&self) -> RatFunc {
        self.v("c") * self.v("h") / self.v("g")
    }

    /// A base-chart function lifted to the bundle.
    pub fn lift(&self, f: &RatFunc) -> RatFunc {
        f.embed(self.chart).expect("bundle contains the jet chart")
    }

    /// `∂f/∂name` lifted to the bundle.
    pub fn pd(&self, f: &RatFunc, name: &str) -> RatFunc {
        self.lift(&f.derive(name).expect("jet coordinate"))
    }
}

pub(crate) fn ensure_integrable(sys: &PdeSystem) -> Result<()> {
    let (a, b) = integrability(sys);
    if a.is_zero() && b.is_zero() {
        Ok(())
    } else {
        Err(CurvatureError::NotIntegrable {
            a: a.to_string(),
            b: b.to_string(),
        })
    }
}

/// `T_1..T_14` over the bundle chart (index 0 holds `T_1`).
pub fn torsions_t(sys: &PdeSystem) -> Vec<RatFunc> {
    let w = Vars {
        chart: bundle_chart(),
    };
    let (b, c, e, g, h, k) = (w.v("b"), w.v("c"), w.v("e"), w.v("g"), w.v("h"), w.k());
    let ch = &c * &h;
    let ch2 = &ch * &ch;
    let (f11, f12, f22) = (&sys.f11, &sys.f12, &sys.f22);
    vec![
        -(&b / &ch),
        -(&e / &ch),
        &b * &b / &ch2 - w.pd(f11, "y") / (&h * &h) + &b * w.pd(f11, "z1") / (&c * &h * &h)
            + &e * w.pd(f11, "z2") / (&g * &h * &h),
        &b * &e / &ch2 - w.pd(f12, "y") / (&h * &k)
            + &b * w.pd(f12, "z1") / (&c * &h * &k)
            + &e * w.pd(f12, "z2") / (&c * &h * &h),
        -(&b / &ch) - w.pd(f11, "z1") / &h,
        -(w.pd(f12, "z1") / &k),
        -(&c * w.pd(f11, "z2") / (&g * &h)),
        -(&b / &ch) - w.pd(f12, "z2") / &h,
        &b * &e / &ch2 - &g * w.pd(f12, "y") / (&c * &h * &h)
            + &b * &g * w.pd(f12, "z1") / &ch2
            + &e * w.pd(f12, "z2") / (&c * &h * &h),
        &e * &e / &ch2 - &g * w.pd(f22, "y") / (&c * &h * &k)
            + &b * &g * w.pd(f22, "z1") / (&c * &c * &h * &k)
            + &e * w.pd(f22, "z2") / (&c * &h * &k),
        -(&e / &ch) - &g * w.pd(f12, "z1") / &ch,
        -(&g * w.pd(f22, "z1") / (&c * &k)),
        -(w.pd(f12, "z2") / &h),
        -(&e / &ch) - w.pd(f22, "z2") / &k,
    ]
}

/// `L_1..L_6` over the bundle chart (index 0 holds `L_1`).
pub fn torsions_l(sys: &PdeSystem) -> Vec<RatFunc> {
    let w = Vars {
        chart: bundle_chart(),
    };
    let (b, c, e, g, h, k) = (w.v("b"), w.v("c"), w.v("e"), w.v("g"), w.v("h"), w.k());
    let ch = &c * &h;
    let (f11, f12, f22) = (&sys.f11, &sys.f12, &sys.f22);
    vec![
        -(w.int(2) * &b / &ch) - w.pd(f11, "z1") / &h,
        -(&e / &ch) - w.pd(f12, "z1") / &k,
        -(&c * w.pd(f11, "z2") / (&g * &h)),
        -(&b / &ch) - w.pd(f12, "z2") / &h,
        -(&g * w.pd(f22, "z1") / (&c * &k)),
        -(w.int(2) * &e / &ch) - w.pd(f22, "z2") / &k,
    ]
}

/// Solve the affine equation `f = 0` for the coordinate `var`.
fn solve_affine(f: &RatFunc, var: &str) -> Result<RatFunc> {
    let slope = f.derive(var)?;
    if slope.is_zero() || slope.uses(var) {
        return Err(CurvatureError::Unreducible);
    }
    let at_zero = f.substitute(
        &Substitution::new(f.chart(), f.chart())
            .bind(var, RatFunc::zero(f.chart()))?
            .identity_rest(),
    )?;
    Ok(-(at_zero / slope))
}

/// Values of `(b, e)` on the reduction locus `L2 = L4 = 0`, over the reduced chart.
pub fn reduction(sys: &PdeSystem) -> Result<(RatFunc, RatFunc)> {
    let l = torsions_l(sys);
    let b = solve_affine(&l[3], "b")?;
    let e = solve_affine(&l[1], "e")?;
    if b.uses("e") || e.uses("b") {
        return Err(CurvatureError::Unreducible);
    }
    let restrict = Substitution::new(bundle_chart(), reduced_chart()).identity_rest();
    Ok((b.substitute(&restrict)?, e.substitute(&restrict)?))
}

/// A curvature as fiber prefactor times a base-chart function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberedScalar {
    pub id: CurvatureId,
    pub factor: FiberFactor,
    pub base: RatFunc,
}

impl FiberedScalar {
    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    /// The full value over a chart containing the jet and `c, g, h` coordinates.
    pub fn value_on(&self, chart: &Chart) -> Result<RatFunc> {
        Ok(self.factor.to_ratfunc(chart)? * self.base.embed(chart)?)
    }
}

/// Every curvature `M_1..M_13, S_1..S_14` without checking integrability.
/// The frame-derivative forms are only meaningful when `A = B = 0`.
pub fn curvatures_unchecked(sys: &PdeSystem) -> Vec<FiberedScalar> {
    let mut jets = SymbolicJets::new(sys);
    CurvatureId::all()
        .map(|id| FiberedScalar {
            id,
            factor: fiber_factor(id),
            base: base_formula(&mut jets, id),
        })
        .collect()
}

/// All twenty-seven curvatures, in the order `M_1..M_13, S_1..S_14`.
pub fn curvatures(sys: &PdeSystem) -> Result<Vec<FiberedScalar>> {
    ensure_integrable(sys)?;
    Ok(curvatures_unchecked(sys))
}

pub fn find(list: &[FiberedScalar], id: CurvatureId) -> &FiberedScalar {
    list.iter().find(|s| s.id == id).expect("complete curvature list")
}

/// The coordinate-derivative forms of `M_4, M_5, M_8, M_9` (the list that
/// precedes the Frobenius rewriting), over the reduced chart.
pub fn coordinate_forms(sys: &PdeSystem) -> Vec<(CurvatureId, RatFunc)> {
    let w = Vars {
        chart: reduced_chart(),
    };
    let (h, k) = (w.v("h"), w.k());
    let (f11, f12, f22) = (&sys.f11, &sys.f12, &sys.f22);
    let p = |f: &RatFunc, vars: &[&str]| {
        let mut g = f.clone();
        for v in vars {
            g = g.derive(v).expect("jet coordinate");
        }
        w.lift(&g)
    };
    let (z1, z2) = (w.v("z1"), w.v("z2"));
    let (l11, l12, l22) = (w.lift(f11), w.lift(f12), w.lift(f22));
    let m4 = -(p(f12, &["z2"]) * p(f12, &["z2"]) - p(f11, &["y"])
        - p(f12, &["z2"]) * p(f11, &["z1"])
        - p(f11, &["z2"]) * p(f12, &["z1"])
        + p(f12, &["z2", "x1"])
        + p(f12, &["z2", "y"]) * &z1
        + p(f12, &["z2", "z1"]) * &l11
        + p(f12, &["z2", "z2"]) * &l12)
        / (&h * &h);
    let m5 = (p(f12, &["y"]) + p(f12, &["z2"]) * p(f12, &["z1"])
        - p(f12, &["z2", "x2"])
        - p(f12, &["z2", "y"]) * &z2
        - p(f12, &["z2", "z1"]) * &l12
        - p(f12, &["z2", "z2"]) * &l22)
        / (&h * &k);
    let m8 = (p(f12, &["y"]) + p(f12, &["z1"]) * p(f12, &["z2"])
        - p(f12, &["z1", "x1"])
        - p(f12, &["z1", "y"]) * &z1
        - p(f12, &["z1", "z1"]) * &l11
        - p(f12, &["z1", "z2"]) * &l12)
        / (&h * &k);
    let m9 = -(p(f12, &["z1"]) * p(f12, &["z1"]) - p(f22, &["y"])
        - p(f12, &["z2"]) * p(f22, &["z1"])
        - p(f12, &["z1"]) * p(f22, &["z2"])
        + p(f12, &["z1", "x2"])
        + p(f12, &["z1", "y"]) * &z2
        + p(f12, &["z1", "z1"]) * &l12
        + p(f12, &["z1", "z2"]) * &l22)
        / (&k * &k);
    vec![
        (CurvatureId::m(4), m4),
        (CurvatureId::m(5), m5),
        (CurvatureId::m(8), m8),
        (CurvatureId::m(9), m9),
    ]
}

/// Indices among `M_4, M_5, M_8, M_9` whose coordinate form differs from the
/// frame-derivative form (empty when the two presentations agree).
pub fn coordinate_form_mismatches(sys: &PdeSystem) -> Result<Vec<CurvatureId>> {
    let all = curvatures(sys)?;
    let mut out = Vec::new();
    for (id, coord) in coordinate_forms(sys) {
        if find(&all, id).value_on(reduced_chart())? != coord {
            out.push(id);
        }
    }
    Ok(out)
}

/// Outcome of one relation between curvatures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub target: CurvatureId,
    pub holds: bool,
}

/// The seven relations expressing `M_4, M_9, S_3, S_4, S_7, S_10, S_13`
/// through other curvatures, checked exactly over the reduced chart.
pub fn prop35_relations(sys: &PdeSystem) -> Result<Vec<RelationCheck>> {
    let all = curvatures(sys)?;
    let w = Vars {
        chart: reduced_chart(),
    };
    let val = |i: CurvatureId| find(&all, i).value_on(w.chart);
    let fd = |f: &RatFunc, fr: Frame| frame_derive(sys, f, fr);
    let (c, g, h, k) = (w.v("c"), w.v("g"), w.v("h"), w.k());
    let two = w.int(2);
    let (m1, m3, m6, m7) = (
        val(CurvatureId::m(1))?,
        val(CurvatureId::m(3))?,
        val(CurvatureId::m(6))?,
        val(CurvatureId::m(7))?,
    );
    let j = |f: &RatFunc, fr: Frame| -> Result<RatFunc> { Ok(w.lift(&fd(f, fr)?)) };
    let gh_c = &g * &h / &c;
    let ck_g = &c * &k / &g;

    let m4 = -(-(&gh_c * fd(&m1, Frame::Omega2)?) + &two * &gh_c * &m1 * j(&sys.f12, Frame::Theta1)?
        - &gh_c * &m1 * j(&sys.f22, Frame::Theta2)?)
        / (&h * &h);
    let m9 = -(-(&ck_g * fd(&m6, Frame::Omega1)?) - &ck_g * &m6 * j(&sys.f11, Frame::Theta1)?
        + &two * &ck_g * &m6 * j(&sys.f12, Frame::Theta2)?)
        / (&k * &k);
    let s3 = -(&k / (&c * &h) * fd(&m7, Frame::Theta2)?);
    let s4 = -(fd(&m3, Frame::Theta1)? / &c);
    let s7 = -(fd(&m1, Frame::Theta1)? / &c) + &m3;
    let s10 = -(fd(&m1, Frame::Theta1)? / &c) + &two * &m3;
    let s13 = -(&two * &m7) + fd(&m6, Frame::Theta2)? / &g;

    [
        (CurvatureId::m(4), m4),
        (CurvatureId::m(9), m9),
        (CurvatureId::s(3), s3),
        (CurvatureId::s(4), s4),
        (CurvatureId::s(7), s7),
        (CurvatureId::s(10), s10),
        (CurvatureId::s(13), s13),
    ]
    .into_iter()
    .map(|(id, rhs)| {
        Ok(RelationCheck {
            target: id,
            holds: val(id)? == rhs,
        })
    })
    .collect()
}

/// The `S_10` relation with the sign of its right-hand side reversed,
/// `S_10 = (1/c)(M_1)_{θ1} - 2 M_3`, which is the form consistent with the
/// `S_10` entry of the curvature list and the prolonged structure equation.
pub fn s10_relation_reversed(sys: &PdeSystem) -> Result<bool> {
    let all = curvatures(sys)?;
    let w = Vars {
        chart: reduced_chart(),
    };
    let m1 = find(&all, CurvatureId::m(1)).value_on(w.chart)?;
    let m3 = find(&all, CurvatureId::m(3)).value_on(w.chart)?;
    let s10 = find(&all, CurvatureId::s(10)).value_on(w.chart)?;
    let rhs = frame_derive(sys, &m1, Frame::Theta1)? / w.v("c") - w.int(2) * m3;
    Ok(s10 == rhs)
}

/// True iff all seven relations hold.
pub fn verify_prop35(sys: &PdeSystem) -> Result<bool> {
    Ok(prop35_relations(sys)?.iter().all(|r| r.holds))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Flat,
    NotFlat,
    NotIntegrable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Flat => "Flat",
            Verdict::NotFlat => "NotFlat",
            Verdict::NotIntegrable => "NotIntegrable",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub a: RatFunc,
    pub b: RatFunc,
    /// Empty when the system is not integrable.
    pub m: Vec<FiberedScalar>,
    pub s: Vec<FiberedScalar>,
    pub verdict: Verdict,
    pub witnesses: Vec<CurvatureId>,
}

pub fn flatness(sys: &PdeSystem) -> CurvatureReport {
    let (a, b) = integrability(sys);
    if !a.is_zero() || !b.is_zero() {
        return CurvatureReport {
            a,
            b,
            m: Vec::new(),
            s: Vec::new(),
            verdict: Verdict::NotIntegrable,
            witnesses: Vec::new(),
        };
    }
    let all = curvatures_unchecked(sys);
    let witnesses: Vec<_> = all
        .iter()
        .filter(|s| s.id.is_test() && !s.is_zero())
        .map(|s| s.id)
        .collect();
    let (m, s): (Vec<_>, Vec<_>) = all.into_iter().partition(|s| s.id.family == Family::M);
    CurvatureReport {
        a,
        b,
        m,
        s,
        verdict: if witnesses.is_empty() {
            Verdict::Flat
        } else {
            Verdict::NotFlat
        },
        witnesses,
    }
}

#[derive(Debug, Serialize)]
struct CurvatureDoc {
    index: CurvatureId,
    fiber_factor: String,
    base: String,
    is_zero: bool,
    test: bool,
}

#[derive(Debug, Serialize)]
pub struct ReportDoc {
    verdict: Verdict,
    #[serde(rename = "A")]
    a: String,
    #[serde(rename = "B")]
    b: String,
    curvatures: Vec<CurvatureDoc>,
    witnesses: Vec<CurvatureId>,
}

impl CurvatureReport {
    pub fn curvature(&self, id: CurvatureId) -> Option<&FiberedScalar> {
        self.m.iter().chain(&self.s).find(|s| s.id == id)
    }

    pub fn to_doc(&self) -> ReportDoc {
        ReportDoc {
            verdict: self.verdict,
            a: self.a.to_string(),
            b: self.b.to_string(),
            curvatures: self
                .m
                .iter()
                .chain(&self.s)
                .map(|s| CurvatureDoc {
                    index: s.id,
                    fiber_factor: s.factor.to_string(),
                    base: s.base.to_string(),
                    is_zero: s.is_zero(),
                    test: s.id.is_test(),
                })
                .collect(),
            witnesses: self.witnesses.clone(),
        }
    }
}

/// The five conditions `P_y, Q_y, R_y = 0`, `P_{x2} = Q_{x1}`, `Q_{x2} = R_{x1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cor37 {
    pub conditions: [bool; 5],
    pub verdict: Verdict,
}

/// Closed-form verdict for systems whose right-hand sides are free of `z`.
/// Failing any condition means the system is not integrable.
pub fn corollary37(p: &RatFunc, q: &RatFunc, r: &RatFunc) -> Result<Cor37> {
    for (f, name) in [(p, "P"), (q, "Q"), (r, "R")] {
        if f.chart() != jet_chart() {
            return Err(JetError::WrongChart(name).into());
        }
        if f.uses("z1") || f.uses("z2") {
            return Err(CurvatureError::ZDependence(name));
        }
    }
    let d = |f: &RatFunc, v: &str| f.derive(v).expect("jet coordinate");
    let conditions = [
        d(p, "y").is_zero(),
        d(q, "y").is_zero(),
        d(r, "y").is_zero(),
        d(p, "x2") == d(q, "x1"),
        d(q, "x2") == d(r, "x1"),
    ];
    let verdict = if conditions.iter().all(|&c| c) {
        Verdict::Flat
    } else {
        Verdict::NotIntegrable
    };
    Ok(Cor37 {
        conditions,
        verdict,
    })
}

/// Whether every right-hand side has total degree at most two in `(z1, z2)`.
/// Degree three or more rules out flatness.
pub fn quadratic_obstruction(sys: &PdeSystem) -> Result<bool> {
    let c = jet_chart();
    let zs = [c.require("z1")?, c.require("z2")?];
    let mut ok = true;
    for (f, name) in [(&sys.f11, "f11"), (&sys.f12, "f12"), (&sys.f22, "f22")] {
        if zs.iter().any(|&z| f.den().uses_var(z)) {
            return Err(CurvatureError::NotPolynomialInZ(name));
        }
        ok &= f.num().degree_in_vars(&zs) <= 2;
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;

    fn b(s: &str) -> RatFunc {
        parse(s, bundle_chart()).unwrap()
    }

    fn j(s: &str) -> RatFunc {
        parse(s, jet_chart()).unwrap()
    }

    fn sys(a: &str, b: &str, c: &str) -> PdeSystem {
        PdeSystem::parse(a, b, c).unwrap()
    }

    #[test]
    fn t_examples() {
        let flat = torsions_t(&PdeSystem::flat());
        assert_eq!(flat[2], b("b^2/(c*h)^2"));
        assert_eq!(torsions_t(&sys("z1*y", "x1", "z2^2"))[0], b("-b/(c*h)"));
        let slice = Substitution::new(bundle_chart(), bundle_chart())
            .bind_str("b", "0")
            .unwrap()
            .identity_rest();
        assert!(flat[4].substitute(&slice).unwrap().is_zero());
    }

    #[test]
    fn l_examples() {
        let l = torsions_l(&sys("z2^2", "0", "0"));
        assert_eq!(l[2], b("-c*2*z2/(g*h)"));
        assert_eq!(torsions_l(&PdeSystem::flat())[0], b("-2*b/(c*h)"));
        let (rb, re) = reduction(&sys("0", "z1*z2", "0")).unwrap();
        assert_eq!(rb, parse("-c*z1", reduced_chart()).unwrap());
        assert_eq!(re, parse("-g*z2", reduced_chart()).unwrap());
    }

    #[test]
    fn curvature_examples() {
        assert!(curvatures(&PdeSystem::flat()).unwrap().iter().all(|s| s.is_zero()));
        let all = curvatures(&sys("z1^2", "0", "0")).unwrap();
        assert_eq!(find(&all, CurvatureId::s(5)).base, j("-2"));
        let all = curvatures(&sys("z2^2", "0", "0")).unwrap();
        assert_eq!(find(&all, CurvatureId::m(1)).base, j("2*z2"));
        assert!(matches!(
            curvatures(&sys("y", "0", "0")),
            Err(CurvatureError::NotIntegrable { .. })
        ));
    }

    #[test]
    fn flatness_examples() {
        assert_eq!(flatness(&PdeSystem::flat()).verdict, Verdict::Flat);
        let r = flatness(&sys("z1^2", "0", "0"));
        assert_eq!(r.verdict, Verdict::NotFlat);
        assert!(r.witnesses.contains(&CurvatureId::s(5)));
        assert_eq!(flatness(&sys("z1/x1", "0", "0")).verdict, Verdict::Flat);
        let r = flatness(&sys("y", "0", "0"));
        assert_eq!(r.verdict, Verdict::NotIntegrable);
        assert_eq!(r.a, j("z2"));
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn corollary_examples() {
        let c = corollary37(&j("x2^2"), &j("2*x1*x2"), &j("x1^2")).unwrap();
        assert_eq!(c.verdict, Verdict::Flat);
        assert_eq!(flatness(&sys("x2^2", "2*x1*x2", "x1^2")).verdict, Verdict::Flat);
        let z = j("0");
        assert_eq!(corollary37(&z, &z, &z).unwrap().verdict, Verdict::Flat);
        let c = corollary37(&j("y"), &z, &z).unwrap();
        assert_ne!(c.verdict, Verdict::Flat);
        assert!(!c.conditions[0]);
        assert!(matches!(
            corollary37(&j("z1"), &z, &z),
            Err(CurvatureError::ZDependence("P"))
        ));
    }

    #[test]
    fn quadratic_screen() {
        assert!(quadratic_obstruction(&PdeSystem::flat()).unwrap());
        assert!(!quadratic_obstruction(&sys("z1^3", "0", "0")).unwrap());
        assert_eq!(flatness(&sys("z1^3", "0", "0")).verdict, Verdict::NotFlat);
        let all = curvatures(&sys("z1^3", "0", "0")).unwrap();
        assert_eq!(find(&all, CurvatureId::s(5)).base, j("-6*z1"));
        assert!(quadratic_obstruction(&sys("z1*z2", "0", "0")).unwrap());
        assert!(matches!(
            quadratic_obstruction(&sys("1/z1", "0", "0")),
            Err(CurvatureError::NotPolynomialInZ("f11"))
        ));
    }

    #[test]
    fn prop35_examples() {
        assert!(verify_prop35(&PdeSystem::flat()).unwrap());
        assert!(verify_prop35(&sys("z1", "0", "z2")).unwrap());
        let hess = sys("6*x1*x2 + 12*x1^2", "3*x1^2 - 2*x2", "-2*x1");
        assert!(verify_prop35(&hess).unwrap());
    }

    #[test]
    fn s10_relation_sign() {
        // Solutions y = p1 x1 + p2 x2 + p3 + p1 p2 x1^2/2.
        let s = sys("z1*z2/(1 + x1*z2)", "0", "0");
        let rel = prop35_relations(&s).unwrap();
        let failing: Vec<_> = rel.iter().filter(|r| !r.holds).map(|r| r.target).collect();
        assert_eq!(failing, vec![CurvatureId::s(10)]);
        assert!(s10_relation_reversed(&s).unwrap());
        assert!(verify_e_structure(&s).unwrap());
    }
}
