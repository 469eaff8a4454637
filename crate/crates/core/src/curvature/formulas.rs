//! The curvature formulas, written once over an abstract source of frame
//! derivatives so the same text can be evaluated symbolically or numerically.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::jetframe::{frame_derive, jet_chart, Component, Frame, PdeSystem};
use crate::symexpr::{Chart, RatFunc, Rational};

pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

/// Anything that can produce iterated frame derivatives `(f_c)_{w1 w2 ...}`.
pub trait JetSource {
    type Value: Scalar;
    fn jet(&mut self, c: Component, word: &[Frame]) -> Self::Value;
    fn constant(&self, n: i64) -> Self::Value;
}

/// Exact jets over the base jet chart, memoized by prefix.
pub struct SymbolicJets<'a> {
    sys: &'a PdeSystem,
    cache: HashMap<(Component, Vec<Frame>), RatFunc>,
}

impl<'a> SymbolicJets<'a> {
    pub fn new(sys: &'a PdeSystem) -> Self {
        SymbolicJets {
            sys,
            cache: HashMap::new(),
        }
    }
}

impl JetSource for SymbolicJets<'_> {
    type Value = RatFunc;

    fn jet(&mut self, c: Component, word: &[Frame]) -> RatFunc {
        let Some((&last, prefix)) = word.split_last() else {
            return self.sys.get(c).clone();
        };
        let key = (c, word.to_vec());
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let inner = self.jet(c, prefix);
        let v = frame_derive(self.sys, &inner, last).expect("base chart");
        self.cache.insert(key, v.clone());
        v
    }

    fn constant(&self, n: i64) -> RatFunc {
        RatFunc::from_int(jet_chart(), n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    M,
    S,
}

/// `M_1..M_13` or `S_1..S_14`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurvatureId {
    pub family: Family,
    pub index: u8,
}

impl CurvatureId {
    pub const fn m(index: u8) -> Self {
        CurvatureId {
            family: Family::M,
            index,
        }
    }

    pub const fn s(index: u8) -> Self {
        CurvatureId {
            family: Family::S,
            index,
        }
    }

    pub fn all() -> impl Iterator<Item = CurvatureId> {
        (1..=13).map(CurvatureId::m).chain((1..=14).map(CurvatureId::s))
    }

    pub fn is_test(self) -> bool {
        TEST_SET.contains(&self)
    }
}

/// The fifteen curvatures whose vanishing decides flatness.
pub const TEST_SET: [CurvatureId; 15] = [
    CurvatureId::m(1),
    CurvatureId::m(3),
    CurvatureId::m(5),
    CurvatureId::m(6),
    CurvatureId::m(7),
    CurvatureId::m(8),
    CurvatureId::s(1),
    CurvatureId::s(2),
    CurvatureId::s(5),
    CurvatureId::s(6),
    CurvatureId::s(8),
    CurvatureId::s(9),
    CurvatureId::s(11),
    CurvatureId::s(12),
    CurvatureId::s(14),
];

impl fmt::Display for CurvatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::M => 'M',
            Family::S => 'S',
        };
        write!(f, "{fam}_{}", self.index)
    }
}

impl Serialize for CurvatureId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for CurvatureId {
    type Err = String;

    /// Accepts `M_4`, `M4`, `s12`, ...
    fn from_str(text: &str) -> Result<Self, String> {
        let bad = || format!("not a curvature index: `{text}`");
        let mut chars = text.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('M') => Family::M,
            Some('S') => Family::S,
            _ => return Err(bad()),
        };
        let rest = chars.as_str().trim_start_matches('_');
        let index: u8 = rest.parse().map_err(|_| bad())?;
        let max = if family == Family::M { 13 } else { 14 };
        if !(1..=max).contains(&index) {
            return Err(bad());
        }
        Ok(CurvatureId { family, index })
    }
}

/// `coeff · c^ec · g^eg · h^eh`; `k` has already been replaced by `ch/g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberFactor {
    pub coeff: Rational,
    pub exps: [i32; 3],
}

pub const FIBER_NAMES: [&str; 3] = ["c", "g", "h"];

impl FiberFactor {
    pub fn new(coeff: i64, c: i32, g: i32, h: i32) -> Self {
        FiberFactor {
            coeff: Rational::from_integer(coeff.into()),
            exps: [c, g, h],
        }
    }

    /// The factor as a function over `chart`, which must contain `c, g, h`.
    pub fn to_ratfunc(&self, chart: &Chart) -> crate::symexpr::Result<RatFunc> {
        let mut acc = RatFunc::constant(chart, self.coeff.clone());
        for (name, &e) in FIBER_NAMES.iter().zip(&self.exps) {
            if e != 0 {
                acc = acc * RatFunc::var(chart, name)?.pow(e)?;
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for FiberFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::{One, Signed};
        let mono = |pos: bool| -> Vec<String> {
            FIBER_NAMES
                .iter()
                .zip(&self.exps)
                .filter(|(_, &e)| if pos { e > 0 } else { e < 0 })
                .map(|(n, &e)| match e.abs() {
                    1 => n.to_string(),
                    a => format!("{n}^{a}"),
                })
                .collect()
        };
        let abs = self.coeff.abs();
        let mut num: Vec<String> = mono(true);
        if !abs.numer().is_one() || num.is_empty() {
            num.insert(0, abs.numer().to_string());
        }
        let mut den: Vec<String> = mono(false);
        if !abs.denom().is_one() {
            den.insert(0, abs.denom().to_string());
        }
        if self.coeff.is_negative() {
            f.write_str("-")?;
        }
        f.write_str(&num.join("*"))?;
        match den.len() {
            0 => Ok(()),
            1 => write!(f, "/{}", den[0]),
            _ => write!(f, "/({})", den.join("*")),
        }
    }
}

/// Fiber prefactor of each curvature, with `1/k = g/(ch)`.
pub fn fiber_factor(id: CurvatureId) -> FiberFactor {
    let f = FiberFactor::new;
    match (id.family, id.index) {
        (Family::M, 1) => f(-1, 1, -1, -1),  // -c/(gh)
        (Family::M, 2) => f(-1, -1, 0, -1),  // -1/(ch)
        (Family::M, 3) => f(-1, 0, -1, -1),  // -1/(gh)
        (Family::M, 4) => f(-1, 0, 0, -2),   // -1/h^2
        (Family::M, 5) => f(1, -1, 1, -2),   // 1/(hk)
        (Family::M, 6) => f(-1, -2, 2, -1),  // -g/(ck)
        (Family::M, 7) => f(-1, -2, 1, -1),  // -1/(ck)
        (Family::M, 8) => f(1, -1, 1, -2),   // 1/(hk)
        (Family::M, 9) => f(-1, -2, 2, -2),  // -1/k^2
        (Family::M, 10) => f(1, 0, 0, -1),   // 1/h
        (Family::M, 11) => f(1, -1, 1, -1),  // 1/k
        (Family::M, 12) => f(1, 0, 0, -1),   // 1/h
        (Family::M, 13) => f(1, -1, 1, -1),  // 1/k
        (Family::S, 1) => f(1, -1, 0, -2),   // 1/(ch^2)
        (Family::S, 2) => f(1, -2, 1, -2),   // 1/(chk)
        (Family::S, 3) => f(1, -2, 0, -1),   // 1/(c^2 h)
        (Family::S, 4) => f(1, -1, -1, -1),  // 1/(cgh)
        (Family::S, 5) => f(1, -1, 0, -1),   // 1/(ch)
        (Family::S, 6) => f(1, -1, 1, -2),   // 1/(hk)
        (Family::S, 7) => f(1, 0, -1, -1),   // 1/(gh)
        (Family::S, 8) => f(1, -1, 1, -2),   // 1/(hk)
        (Family::S, 9) => f(1, -1, 0, -2),   // 1/(ch^2)
        (Family::S, 10) => f(1, 0, -1, -1),  // 1/(gh)
        (Family::S, 11) => f(1, -1, 1, -2),  // 1/(hk)
        (Family::S, 12) => f(1, -2, 1, -2),  // 1/(chk)
        (Family::S, 13) => f(1, -2, 1, -1),  // 1/(ck)
        (Family::S, 14) => f(1, -1, 0, -1),  // 1/(gk) = 1/(ch)
        _ => unreachable!("invalid curvature index {id}"),
    }
}

/// Base part of a curvature: the fiber-free factor in frame-derivative form.
/// Subscript words are applied left to right.
pub fn base_formula<J: JetSource>(src: &mut J, id: CurvatureId) -> J::Value {
    use Component::{F11, F12, F22};
    use Frame::{Omega1 as W1, Omega2 as W2, Theta0 as T0, Theta1 as T1, Theta2 as T2};
    let two = src.constant(2);
    let mut j = |c: Component, w: &[Frame]| src.jet(c, w);
    match (id.family, id.index) {
        (Family::M, 1) => j(F11, &[T2]),
        (Family::M, 2) => j(F12, &[T2, T1]),
        (Family::M, 3) => j(F12, &[T2, T2]),
        (Family::M, 4) => {
            j(F11, &[T2, W2]) - two * j(F11, &[T2]) * j(F12, &[T1]) + j(F11, &[T2]) * j(F22, &[T2])
        }
        (Family::M, 5) => j(F12, &[T0]) + j(F12, &[T2]) * j(F12, &[T1]) - j(F12, &[T2, W2]),
        (Family::M, 6) => j(F22, &[T1]),
        (Family::M, 7) => j(F12, &[T1, T1]),
        (Family::M, 8) => j(F12, &[T0]) + j(F12, &[T1]) * j(F12, &[T2]) - j(F12, &[T1, W1]),
        (Family::M, 9) => {
            -(two * j(F12, &[T2]) * j(F22, &[T1])) + j(F22, &[T1, W1]) + j(F11, &[T1]) * j(F22, &[T1])
        }
        (Family::M, 10) => j(F11, &[T1]) - j(F12, &[T2]),
        (Family::M, 11) => j(F12, &[T1]),
        (Family::M, 12) => j(F12, &[T2]),
        (Family::M, 13) => j(F22, &[T2]) - j(F12, &[T1]),
        (Family::S, 1) => {
            // ω̂1∧θ̂0 coefficient of dα̂, with b = -c(f12)_{θ2} and e = -g(f12)_{θ1}.
            let m10 = |src: &mut J, x: Frame| src.jet(F11, &[T1, x]) - src.jet(F12, &[T2, x]);
            let (p2, p1) = (j(F12, &[T2]), j(F12, &[T1]));
            let lead = j(F12, &[T2, T1, W1]) + j(F12, &[T2, T1]) * p2.clone();
            lead - m10(src, T0) - p2 * m10(src, T1) - p1 * m10(src, T2)
        }
        (Family::S, 2) => {
            j(F12, &[T2, T1, W2]) - j(F12, &[T1, T0]) - j(F12, &[T1, T1]) * j(F12, &[T2])
        }
        (Family::S, 3) => j(F12, &[T2, T1, T1]),
        (Family::S, 4) => j(F12, &[T2, T1, T2]),
        (Family::S, 5) => two * j(F12, &[T2, T1]) - j(F11, &[T1, T1]),
        (Family::S, 6) => {
            -j(F12, &[T0]) - j(F12, &[T1]) * j(F12, &[T2])
                + j(F11, &[T2]) * j(F22, &[T1])
                + j(F12, &[T2, W2])
        }
        (Family::S, 7) => j(F11, &[T1, T2]) - j(F12, &[T2, T2]),
        (Family::S, 8) => j(F11, &[T1, W2]) - two * j(F12, &[T2, W2]),
        (Family::S, 9) => {
            j(F11, &[T1, T0]) - two.clone() * j(F12, &[T2, T0])
                + j(F11, &[T1, T1]) * j(F12, &[T2])
                + j(F11, &[T1, T2]) * j(F12, &[T1])
                - two.clone() * j(F12, &[T1, T2]) * j(F12, &[T2])
                - two * j(F12, &[T2, T2]) * j(F12, &[T1])
        }
        (Family::S, 10) => -j(F11, &[T1, T2]) + two * j(F12, &[T2, T2]),
        (Family::S, 11) => two * j(F12, &[T1, W1]) - j(F22, &[T2, W1]),
        (Family::S, 12) => {
            -(two.clone() * j(F12, &[T1, T0]))
                - two.clone() * j(F12, &[T1, T1]) * j(F12, &[T2])
                - two * j(F12, &[T1, T2]) * j(F12, &[T1])
                + j(F22, &[T2, T0])
                + j(F22, &[T1, T2]) * j(F12, &[T2])
                + j(F22, &[T2, T2]) * j(F12, &[T1])
        }
        (Family::S, 13) => two * j(F12, &[T1, T1]) - j(F22, &[T1, T2]),
        (Family::S, 14) => two * j(F12, &[T1, T2]) - j(F22, &[T2, T2]),
        _ => unreachable!("invalid curvature index {id}"),
    }
}

/// The tabulated `S_1` expression. It agrees with [`base_formula`] on affine
/// pullbacks but not in general; kept for comparison.
pub fn s1_tabulated<J: JetSource>(src: &mut J) -> J::Value {
    use Component::{F11, F12, F22};
    use Frame::{Omega2 as W2, Theta1 as T1, Theta2 as T2};
    let two = src.constant(2);
    let mut j = |c: Component, w: &[Frame]| src.jet(c, w);
    j(F11, &[T2, T1, W2]) + j(F11, &[T2, T2]) * j(F22, &[T1])
        + j(F11, &[T2, T1]) * j(F22, &[T2])
        - j(F12, &[T2, T1]) * j(F11, &[T2])
        - j(F12, &[T2, T2]) * j(F12, &[T2])
        - j(F12, &[T2, T1]) * j(F11, &[T1])
        + two * j(F12, &[T2, T1]) * j(F12, &[T2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse_and_print() {
        assert_eq!("M_4".parse::<CurvatureId>().unwrap(), CurvatureId::m(4));
        assert_eq!("s12".parse::<CurvatureId>().unwrap(), CurvatureId::s(12));
        assert!("M14".parse::<CurvatureId>().is_err());
        assert!("S0".parse::<CurvatureId>().is_err());
        assert_eq!(CurvatureId::s(9).to_string(), "S_9");
        assert_eq!(CurvatureId::all().count(), 27);
        assert_eq!(CurvatureId::all().filter(|c| c.is_test()).count(), 15);
    }

    #[test]
    fn factor_rendering() {
        assert_eq!(fiber_factor(CurvatureId::m(1)).to_string(), "-c/(g*h)");
        assert_eq!(fiber_factor(CurvatureId::s(1)).to_string(), "1/(c*h^2)");
        assert_eq!(fiber_factor(CurvatureId::m(11)).to_string(), "g/(c*h)");
        assert_eq!(fiber_factor(CurvatureId::m(10)).to_string(), "1/h");
        assert_eq!(fiber_factor(CurvatureId::m(6)).to_string(), "-g^2/(c^2*h)");
    }
}
