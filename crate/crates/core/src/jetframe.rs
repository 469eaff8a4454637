//! Jet-space geometry of a second-order system `y_{x_i x_j} = f_ij`:
//! the adapted coframe, its dual frame, frame derivatives, the Frobenius
//! obstructions `A`, `B`, and contact lifts of scale transformations.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{DiffForm, FormError};
use crate::symexpr::{parse, Chart, RatFunc, Substitution, SymError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("{0} must be a function over the jet chart (x1, x2, y, z1, z2)")]
    WrongChart(&'static str),
    #[error("scale map component {component} depends on `{var}`")]
    NotScaleMap { component: &'static str, var: String },
    #[error("degenerate scale map: {0} vanishes identically")]
    Degenerate(&'static str),
}

pub type Result<T> = std::result::Result<T, JetError>;

/// `(x1, x2, y, z1, z2)`.
pub fn jet_chart() -> &'static Chart {
    static CHART: OnceLock<Chart> = OnceLock::new();
    CHART.get_or_init(|| Chart::of(&["x1", "x2", "y", "z1", "z2"]))
}

const JET: [&str; 5] = ["x1", "x2", "y", "z1", "z2"];

/// The right-hand sides `(f11, f12, f22)`; `f21` is identified with `f12`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PdeSystem {
    pub f11: RatFunc,
    pub f12: RatFunc,
    pub f22: RatFunc,
}

/// Which of the three right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    F11,
    F12,
    F22,
}

impl PdeSystem {
    pub fn new(f11: RatFunc, f12: RatFunc, f22: RatFunc) -> Result<PdeSystem> {
        for (f, name) in [(&f11, "f11"), (&f12, "f12"), (&f22, "f22")] {
            if f.chart() != jet_chart() {
                return Err(JetError::WrongChart(name));
            }
        }
        Ok(PdeSystem { f11, f12, f22 })
    }

    pub fn parse(f11: &str, f12: &str, f22: &str) -> Result<PdeSystem> {
        let c = jet_chart();
        PdeSystem::new(parse(f11, c)?, parse(f12, c)?, parse(f22, c)?)
    }

    pub fn flat() -> PdeSystem {
        let z = RatFunc::zero(jet_chart());
        PdeSystem {
            f11: z.clone(),
            f12: z.clone(),
            f22: z,
        }
    }

    pub fn get(&self, c: Component) -> &RatFunc {
        match c {
            Component::F11 => &self.f11,
            Component::F12 => &self.f12,
            Component::F22 => &self.f22,
        }
    }

    /// `f_ij` with 1-based indices, `f21 = f12`.
    pub fn f(&self, i: usize, j: usize) -> &RatFunc {
        match (i, j) {
            (1, 1) => &self.f11,
            (2, 2) => &self.f22,
            _ => &self.f12,
        }
    }

    /// True when no right-hand side depends on `z1` or `z2`.
    pub fn is_z_free(&self) -> bool {
        [&self.f11, &self.f12, &self.f22]
            .iter()
            .all(|f| !f.uses("z1") && !f.uses("z2"))
    }
}

impl fmt::Display for PdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(f11 = {}, f12 = {}, f22 = {})", self.f11, self.f12, self.f22)
    }
}

/// Labels of the adapted coframe and its dual frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Frame {
    Theta0,
    Theta1,
    Theta2,
    Omega1,
    Omega2,
}

impl Frame {
    pub const ALL: [Frame; 5] = [
        Frame::Theta0,
        Frame::Theta1,
        Frame::Theta2,
        Frame::Omega1,
        Frame::Omega2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Frame::Theta0 => "θ0",
            Frame::Theta1 => "θ1",
            Frame::Theta2 => "θ2",
            Frame::Omega1 => "ω1",
            Frame::Omega2 => "ω2",
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A vector field written in coordinate components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub components: Vec<RatFunc>,
}

impl VectorField {
    pub fn chart(&self) -> &Chart {
        self.components[0].chart()
    }

    /// Apply as a first-order derivation.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero(f.chart());
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() || !f.uses_var(i) {
                continue;
            }
            acc = acc + c * &f.derive_idx(i);
        }
        acc
    }
}

/// `(θ0, θ1, θ2, ω1, ω2)`:
/// `θ0 = dy - z1 dx1 - z2 dx2`, `θi = dzi - f_i1 dx1 - f_i2 dx2`, `ωi = dxi`.
pub fn coframe(sys: &PdeSystem) -> [DiffForm; 5] {
    let c = jet_chart();
    let v = |s: &str| parse(s, c).expect("static expression");
    let one_form = |parts: &[(&str, RatFunc)]| DiffForm::one_form(c, parts).expect("jet chart");
    [
        one_form(&[("y", v("1")), ("x1", v("-z1")), ("x2", v("-z2"))]),
        one_form(&[("z1", v("1")), ("x1", -&sys.f11), ("x2", -&sys.f12)]),
        one_form(&[("z2", v("1")), ("x1", -&sys.f12), ("x2", -&sys.f22)]),
        one_form(&[("x1", v("1"))]),
        one_form(&[("x2", v("1"))]),
    ]
}

/// Dual frame in the order of [`Frame::ALL`]:
/// `∂θ0 = ∂y`, `∂θi = ∂zi`,
/// `∂ωi = ∂xi + zi ∂y + f_i1 ∂z1 + f_i2 ∂z2`.
pub fn dual_frame(sys: &PdeSystem) -> [VectorField; 5] {
    Frame::ALL.map(|fr| frame_vector(sys, fr, jet_chart()).expect("jet chart"))
}

/// Components of a frame vector over `chart`, which must contain the jet
/// coordinates; any further coordinates are treated as constants.
fn frame_vector(sys: &PdeSystem, frame: Frame, chart: &Chart) -> Result<VectorField> {
    let zero = RatFunc::zero(chart);
    let one = RatFunc::one(chart);
    let mut comps = vec![zero; chart.len()];
    let idx = |n: &str| chart.require(n);
    match frame {
        Frame::Theta0 => comps[idx("y")?] = one,
        Frame::Theta1 => comps[idx("z1")?] = one,
        Frame::Theta2 => comps[idx("z2")?] = one,
        Frame::Omega1 | Frame::Omega2 => {
            let i = if frame == Frame::Omega1 { 1 } else { 2 };
            comps[idx(if i == 1 { "x1" } else { "x2" })?] = one;
            comps[idx("y")?] = RatFunc::var(chart, if i == 1 { "z1" } else { "z2" })?;
            comps[idx("z1")?] = sys.f(i, 1).embed(chart)?;
            comps[idx("z2")?] = sys.f(i, 2).embed(chart)?;
        }
    }
    Ok(VectorField { components: comps })
}

/// Apply the frame derivation `∂_frame` to `f`. `f` may live on any chart that
/// contains the jet coordinates (bundle charts included).
pub fn frame_derive(sys: &PdeSystem, f: &RatFunc, frame: Frame) -> Result<RatFunc> {
    let chart = f.chart();
    let get = |n: &str| chart.require(n);
    Ok(match frame {
        Frame::Theta0 => f.derive_idx(get("y")?),
        Frame::Theta1 => f.derive_idx(get("z1")?),
        Frame::Theta2 => f.derive_idx(get("z2")?),
        _ => frame_vector(sys, frame, chart)?.apply(f),
    })
}

/// Iterated frame derivative, applied left to right: `f_{a b}` is `∂_b(∂_a f)`.
pub fn frame_derive_word(sys: &PdeSystem, f: &RatFunc, word: &[Frame]) -> Result<RatFunc> {
    word.iter().try_fold(f.clone(), |acc, &fr| frame_derive(sys, &acc, fr))
}

fn d(f: &RatFunc, v: &str) -> RatFunc {
    f.derive(v).expect("jet coordinate")
}

/// The Frobenius obstructions `(A, B)`; the system is integrable iff both vanish.
pub fn integrability(sys: &PdeSystem) -> (RatFunc, RatFunc) {
    let c = jet_chart();
    let z1 = RatFunc::var(c, "z1").unwrap();
    let z2 = RatFunc::var(c, "z2").unwrap();
    let (f11, f12, f22) = (&sys.f11, &sys.f12, &sys.f22);
    let a = d(f11, "x2") - d(f12, "x1") + d(f11, "y") * &z2 + d(f11, "z1") * f12 + d(f11, "z2") * f22
        - d(f12, "y") * &z1
        - d(f12, "z1") * f11
        - d(f12, "z2") * f12;
    let b = d(f12, "x2") - d(f22, "x1") + d(f12, "y") * &z2 + d(f12, "z1") * f12 + d(f12, "z2") * f22
        - d(f22, "y") * &z1
        - d(f22, "z1") * f11
        - d(f22, "z2") * f12;
    (a, b)
}

/// `(X1(x1), X2(x2), Y(x1, x2, y))`, all over the jet chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleMap {
    pub x1: RatFunc,
    pub x2: RatFunc,
    pub y: RatFunc,
}

/// Result of lifting a scale map to the jet space.
#[derive(Clone, Debug)]
pub struct ContactLift {
    pub z1: RatFunc,
    pub z2: RatFunc,
    /// `Y_y`, the factor by which the contact form is rescaled.
    pub factor: RatFunc,
    /// Whether `φ̂*(dy - z1 dx1 - z2 dx2) = Y_y (dy - z1 dx1 - z2 dx2)` holds exactly.
    pub exact_identity: bool,
}

impl ScaleMap {
    pub fn new(x1: RatFunc, x2: RatFunc, y: RatFunc) -> Result<ScaleMap> {
        let allowed: [(&'static str, &RatFunc, &[&str]); 3] = [
            ("X1", &x1, &["x1"]),
            ("X2", &x2, &["x2"]),
            ("Y", &y, &["x1", "x2", "y"]),
        ];
        for (name, f, vars) in allowed {
            if f.chart() != jet_chart() {
                return Err(JetError::WrongChart(name));
            }
            if let Some(v) = JET.iter().find(|v| !vars.contains(v) && f.uses(v)) {
                return Err(JetError::NotScaleMap {
                    component: name,
                    var: v.to_string(),
                });
            }
        }
        let m = ScaleMap { x1, x2, y };
        for (name, jac) in [
            ("(X1)_x1", d(&m.x1, "x1")),
            ("(X2)_x2", d(&m.x2, "x2")),
            ("Y_y", d(&m.y, "y")),
        ] {
            if jac.is_zero() {
                return Err(JetError::Degenerate(name));
            }
        }
        Ok(m)
    }

    pub fn parse(x1: &str, x2: &str, y: &str) -> Result<ScaleMap> {
        let c = jet_chart();
        ScaleMap::new(parse(x1, c)?, parse(x2, c)?, parse(y, c)?)
    }

    pub fn identity() -> ScaleMap {
        ScaleMap::parse("x1", "x2", "y").expect("identity map")
    }

    /// `Z_i = (Y_{x_i} + Y_y z_i) / (X_i)_{x_i}`.
    pub fn lifted_z(&self) -> (RatFunc, RatFunc) {
        let c = jet_chart();
        let yy = d(&self.y, "y");
        let z1 = (d(&self.y, "x1") + &yy * RatFunc::var(c, "z1").unwrap()) / d(&self.x1, "x1");
        let z2 = (d(&self.y, "x2") + &yy * RatFunc::var(c, "z2").unwrap()) / d(&self.x2, "x2");
        (z1, z2)
    }

    /// Lift to the jet space and check the contact identity symbolically.
    pub fn contact_lift(&self) -> ContactLift {
        let (z1, z2) = self.lifted_z();
        let factor = d(&self.y, "y");
        let to_form = |f: &RatFunc| DiffForm::function(f.clone()).d();
        let pulled = to_form(&self.y)
            .sub(&to_form(&self.x1).scale(&z1).unwrap())
            .and_then(|w| w.sub(&to_form(&self.x2).scale(&z2).unwrap()))
            .expect("same chart");
        let contact = coframe(&PdeSystem::flat())[0].clone();
        let exact_identity = pulled == contact.scale(&factor).expect("same chart");
        ContactLift {
            z1,
            z2,
            factor,
            exact_identity,
        }
    }

    /// The system in the source coordinates that this map carries onto
    /// `target` (given in the image coordinates).
    ///
    /// `f_ij = (X_i'/Y_y) (X_j' F_ij∘φ̂ - ∂_{x_j} Z_i - z_j ∂_y Z_i)`.
    pub fn pull_back(&self, target: &PdeSystem) -> Result<PdeSystem> {
        let c = jet_chart();
        let (z1, z2) = self.lifted_z();
        let subst = Substitution::new(c, c)
            .bind("x1", self.x1.clone())?
            .bind("x2", self.x2.clone())?
            .bind("y", self.y.clone())?
            .bind("z1", z1.clone())?
            .bind("z2", z2.clone())?;
        let yy = d(&self.y, "y");
        let xp = [d(&self.x1, "x1"), d(&self.x2, "x2")];
        let zs = [z1, z2];
        let zc = [RatFunc::var(c, "z1")?, RatFunc::var(c, "z2")?];
        let xs = ["x1", "x2"];
        let mut out = Vec::with_capacity(3);
        for (i, j) in [(0usize, 0usize), (0, 1), (1, 1)] {
            let f_new = target.f(i + 1, j + 1).substitute(&subst)?;
            let inner = &xp[j] * &f_new - d(&zs[i], xs[j]) - &zc[j] * d(&zs[i], "y");
            out.push(&xp[i] / &yy * inner);
        }
        let f22 = out.pop().unwrap();
        let f12 = out.pop().unwrap();
        let f11 = out.pop().unwrap();
        PdeSystem::new(f11, f12, f22)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(s: &str) -> RatFunc {
        parse(s, jet_chart()).unwrap()
    }

    #[test]
    fn coframe_examples() {
        let flat = coframe(&PdeSystem::flat());
        assert_eq!(flat[1], DiffForm::coord(jet_chart(), "z1").unwrap());
        let sys = PdeSystem::parse("z1", "0", "z2").unwrap();
        let cf = coframe(&sys);
        assert_eq!(cf[0], flat[0]);
        assert_eq!(cf[1].coefficient(&["x1"]).unwrap(), j("-z1"));
        assert_eq!(cf[1].coefficient(&["z1"]).unwrap(), j("1"));
    }

    #[test]
    fn dual_pairing_is_identity() {
        let sys = PdeSystem::parse("z1^2", "x1*y", "z2/(x1 + 1)").unwrap();
        let cf = coframe(&sys);
        let df = dual_frame(&sys);
        for (a, w) in cf.iter().enumerate() {
            for (b, v) in df.iter().enumerate() {
                let p = w.pair(&v.components).unwrap();
                let expect = if a == b { j("1") } else { j("0") };
                assert_eq!(p, expect, "<{a},{b}>");
            }
        }
        assert_eq!(df[0].components[2], j("1"));
    }

    #[test]
    fn frame_derivative_examples() {
        let sys = PdeSystem::parse("z1^2", "0", "0").unwrap();
        assert_eq!(frame_derive(&sys, &j("z1"), Frame::Omega1).unwrap(), j("z1^2"));
        assert_eq!(frame_derive(&sys, &j("y"), Frame::Omega2).unwrap(), j("z2"));
        let sys = PdeSystem::parse("z1", "0", "z2").unwrap();
        assert_eq!(frame_derive(&sys, &j("z2"), Frame::Omega2).unwrap(), j("z2"));
    }

    #[test]
    fn integrability_examples() {
        let (a, b) = integrability(&PdeSystem::flat());
        assert!(a.is_zero() && b.is_zero());
        let (a, b) = integrability(&PdeSystem::parse("y", "0", "0").unwrap());
        assert_eq!(a, j("z2"));
        assert!(b.is_zero());
        let (a, b) = integrability(&PdeSystem::parse("z1", "0", "z2").unwrap());
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn contact_lift_examples() {
        let id = ScaleMap::identity().contact_lift();
        assert!(id.exact_identity);
        assert_eq!(id.z1, j("z1"));
        assert_eq!(id.factor, j("1"));

        let m = ScaleMap::parse("x1", "x2", "y/x1").unwrap().contact_lift();
        assert!(m.exact_identity);
        assert_eq!(m.factor, j("1/x1"));

        let m = ScaleMap::parse("2*x1", "x2", "y").unwrap().contact_lift();
        assert!(m.exact_identity);
        assert_eq!(m.z1, j("z1/2"));
        assert_eq!(m.factor, j("1"));
    }

    #[test]
    fn scale_map_validation() {
        assert!(matches!(
            ScaleMap::parse("x1 + x2", "x2", "y"),
            Err(JetError::NotScaleMap { component: "X1", .. })
        ));
        assert!(matches!(
            ScaleMap::parse("x1", "x2", "y + z1"),
            Err(JetError::NotScaleMap { component: "Y", .. })
        ));
        assert!(matches!(
            ScaleMap::parse("x1", "x2", "x1"),
            Err(JetError::Degenerate("Y_y"))
        ));
    }

    #[test]
    fn pull_back_of_flat_by_square_map() {
        let m = ScaleMap::parse("x1^2", "x2", "y").unwrap();
        let sys = m.pull_back(&PdeSystem::flat()).unwrap();
        assert_eq!(sys, PdeSystem::parse("z1/x1", "0", "0").unwrap());
        let id = ScaleMap::identity();
        let s = PdeSystem::parse("z1^2", "y", "x1").unwrap();
        assert_eq!(id.pull_back(&s).unwrap(), s);
    }
}
