//! Dual equations on the solution space and the flat double fibration
//! `(x1, x2, y) ← J¹ → (a, b, c)`.

use std::sync::OnceLock;

use thiserror::Error;

use crate::jetframe::{jet_chart, PdeSystem};
use crate::symexpr::{parse, Chart, RatFunc, Rational, Substitution, SymError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("h does not depend on Y (h_Y vanishes identically)")]
    DegenerateFamily,
    #[error("inverse substitution is inconsistent: Z{0} + h_X{0}/h_Y = {1}, not 0")]
    BadInverse(usize, String),
}

pub type Result<T> = std::result::Result<T, DualError>;

/// `(x1, x2, X1, X2, Y)`.
pub fn family_chart() -> &'static Chart {
    static C: OnceLock<Chart> = OnceLock::new();
    C.get_or_init(|| Chart::of(&["x1", "x2", "X1", "X2", "Y"]))
}

/// `(X1, X2, Y, Z1, Z2)`: the jet chart of the solution space.
pub fn solution_chart() -> &'static Chart {
    static C: OnceLock<Chart> = OnceLock::new();
    C.get_or_init(|| Chart::of(&["X1", "X2", "Y", "Z1", "Z2"]))
}

/// `(x1, x2, X1, X2, Y, Z1, Z2)`: where dual expressions live before elimination.
pub fn extended_chart() -> &'static Chart {
    static C: OnceLock<Chart> = OnceLock::new();
    C.get_or_init(|| Chart::of(&["x1", "x2", "X1", "X2", "Y", "Z1", "Z2"]))
}

/// A three-parameter solution family `y = h(x1, x2, X1, X2, Y)`, optionally
/// with `x1, x2` expressed through `(X1, X2, Y, Z1, Z2)`.
#[derive(Clone, Debug)]
pub struct SolutionFamily {
    h: RatFunc,
    inverse: Option<[RatFunc; 2]>,
}

impl SolutionFamily {
    pub fn new(h: RatFunc, inverse: Option<[RatFunc; 2]>) -> Result<SolutionFamily> {
        family_chart().check_same(h.chart())?;
        if h.derive("Y")?.is_zero() {
            return Err(DualError::DegenerateFamily);
        }
        if let Some(inv) = &inverse {
            for f in inv {
                solution_chart().check_same(f.chart())?;
            }
        }
        let fam = SolutionFamily { h, inverse };
        fam.check_inverse()?;
        Ok(fam)
    }

    pub fn parse(h: &str, inverse: Option<(&str, &str)>) -> Result<SolutionFamily> {
        let h = parse(h, family_chart())?;
        let inverse = match inverse {
            Some((a, b)) => Some([parse(a, solution_chart())?, parse(b, solution_chart())?]),
            None => None,
        };
        SolutionFamily::new(h, inverse)
    }

    /// `y = X1 x1 + X2 x2 + Y`, whose inverse is `x_i = -Z_i`.
    pub fn flat() -> SolutionFamily {
        SolutionFamily::parse("X1*x1 + X2*x2 + Y", Some(("-Z1", "-Z2"))).expect("flat family")
    }

    pub fn h(&self) -> &RatFunc {
        &self.h
    }

    pub fn inverse(&self) -> Option<&[RatFunc; 2]> {
        self.inverse.as_ref()
    }

    /// `x_i ↦ inverse_i`, other coordinates kept.
    fn inverse_subst(&self, source: &Chart) -> Option<Result<Substitution>> {
        let [i1, i2] = self.inverse.as_ref()?;
        Some(
            Substitution::new(source, solution_chart())
                .bind("x1", i1.clone())
                .and_then(|s| s.bind("x2", i2.clone()))
                .map(Substitution::identity_rest)
                .map_err(Into::into),
        )
    }

    /// `Z_i + h_{X_i}/h_Y` must vanish once the inverse is substituted.
    fn check_inverse(&self) -> Result<()> {
        let Some(subst) = self.inverse_subst(family_chart()) else {
            return Ok(());
        };
        let subst = subst?;
        let hy = self.h.derive("Y")?;
        for (i, (x, z)) in [("X1", "Z1"), ("X2", "Z2")].iter().enumerate() {
            let slope = (self.h.derive(x)? / &hy).substitute(&subst)?;
            let residual = RatFunc::var(solution_chart(), z)? + slope;
            if !residual.is_zero() {
                return Err(DualError::BadInverse(i + 1, residual.to_string()));
            }
        }
        Ok(())
    }
}

/// The dual right-hand sides `F11, F12, F22`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPde {
    pub f11: RatFunc,
    pub f12: RatFunc,
    pub f22: RatFunc,
    /// True when `x1` or `x2` remain and no inverse was available; the
    /// functions then live on [`extended_chart`].
    pub open: bool,
}

impl DualPde {
    pub fn is_flat(&self) -> bool {
        !self.open && self.f11.is_zero() && self.f12.is_zero() && self.f22.is_zero()
    }

    /// The dual equation as a system on `(x1, x2, y, z1, z2)`, renaming
    /// `X_i, Y, Z_i` to `x_i, y, z_i`. `None` while elimination is open.
    pub fn as_system(&self) -> Option<PdeSystem> {
        if self.open {
            return None;
        }
        let jet = jet_chart();
        let mut rename = Substitution::new(solution_chart(), jet);
        for (from, to) in [("X1", "x1"), ("X2", "x2"), ("Y", "y"), ("Z1", "z1"), ("Z2", "z2")] {
            rename = rename
                .bind(from, RatFunc::var(jet, to).expect("jet coordinate"))
                .expect("solution coordinate");
        }
        let r = |f: &RatFunc| f.substitute(&rename).expect("renaming is invertible");
        PdeSystem::new(r(&self.f11), r(&self.f12), r(&self.f22)).ok()
    }
}

/// `F_ij = (h_{X_i} h_{Y X_j} - h_Y h_{X_i X_j} + Z_j (h_{X_i} h_{YY} - h_Y h_{X_i Y})) / h_Y²`.
pub fn dual_pde(family: &SolutionFamily) -> Result<DualPde> {
    let ext = extended_chart();
    let h = family.h.embed(ext)?;
    let d = |f: &RatFunc, v: &str| f.derive(v).expect("extended coordinate");
    let hy = d(&h, "Y");
    let hyy = d(&hy, "Y");
    let xs = ["X1", "X2"];
    let zs = [RatFunc::var(ext, "Z1")?, RatFunc::var(ext, "Z2")?];
    let hx = [d(&h, "X1"), d(&h, "X2")];
    let entry = |i: usize, j: usize| {
        let num = &hx[i] * d(&hy, xs[j]) - &hy * d(&hx[i], xs[j])
            + &zs[j] * (&hx[i] * &hyy - &hy * d(&hx[i], "Y"));
        num / (&hy * &hy)
    };
    let mut out = [entry(0, 0), entry(0, 1), entry(1, 1)];
    let residual_x = out.iter().any(|f| f.uses("x1") || f.uses("x2"));
    let open = if !residual_x {
        let restrict = Substitution::new(ext, solution_chart()).identity_rest();
        for f in &mut out {
            *f = f.substitute(&restrict)?;
        }
        false
    } else if let Some(subst) = family.inverse_subst(ext) {
        let subst = subst?;
        for f in &mut out {
            *f = f.substitute(&subst)?;
        }
        false
    } else {
        true
    };
    let [f11, f12, f22] = out;
    Ok(DualPde {
        f11,
        f12,
        f22,
        open,
    })
}

pub type Point3 = [Rational; 3];

/// `π1(p) = (x1, x2, y)` and `π2(p) = (z1, z2, y - z1 x1 - z2 x2)`.
pub fn flat_projections(p: &[Rational; 5]) -> (Point3, Point3) {
    let [x1, x2, y, z1, z2] = p;
    (
        [x1.clone(), x2.clone(), y.clone()],
        [z1.clone(), z2.clone(), y - z1 * x1 - z2 * x2],
    )
}

/// The leaf `π2⁻¹(a, b, c) = {(x1, x2, a x1 + b x2 + c, a, b)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Leaf {
    /// Free parameters `(x1, x2)`.
    pub const DIMENSION: usize = 2;

    pub fn point(&self, x1: &Rational, x2: &Rational) -> [Rational; 5] {
        [
            x1.clone(),
            x2.clone(),
            &self.a * x1 + &self.b * x2 + &self.c,
            self.a.clone(),
            self.b.clone(),
        ]
    }
}

pub fn fiber_of_solution(a: Rational, b: Rational, c: Rational) -> Leaf {
    Leaf { a, b, c }
}

/// Symbolic check over the jet chart that the point `π1(p)` lies on the
/// plane `y = a x1 + b x2 + c` named by `π2(p)`.
pub fn incidence_holds() -> bool {
    let c = jet_chart();
    let v = |s: &str| parse(s, c).expect("static expression");
    let (a, b) = (v("z1"), v("z2"));
    let cc = v("y - z1*x1 - z2*x2");
    (a * v("x1") + b * v("x2") + cc - v("y")).is_zero()
}
