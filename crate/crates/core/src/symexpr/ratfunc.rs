use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use super::gcd::gcd;
use super::poly::Poly;
use super::{Chart, Rational, Result, SymError};

/// Reduced fraction `num / den` of polynomials over one chart.
///
/// Canonical: `gcd(num, den) = 1`, `den` has coprime integer coefficients and
/// a positive leading coefficient, and zero is `0 / 1`. Structural equality is
/// therefore mathematical equality.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// Scalar used by [`RatFunc::eval`].
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(x) => *x,
        }
    }
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        num.chart().check_same(den.chart())?;
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero(num.chart());
        }
        if den.is_constant() {
            let s = den.constant_term().recip();
            return RatFunc {
                num: num.scale(&s),
                den: Poly::one(num.chart()),
            };
        }
        let g = gcd(&num, &den);
        if g.is_one() {
            Self::normalized(num, den)
        } else {
            Self::normalized(
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        }
    }

    /// Fix the scalar freedom of an already coprime pair.
    fn normalized(num: Poly, den: Poly) -> RatFunc {
        let s = den.integer_normalizer();
        if s.is_one() {
            RatFunc { num, den }
        } else {
            RatFunc {
                num: num.scale(&s),
                den: den.scale(&s),
            }
        }
    }

    pub fn zero(chart: &Chart) -> RatFunc {
        RatFunc {
            num: Poly::zero(chart),
            den: Poly::one(chart),
        }
    }

    pub fn one(chart: &Chart) -> RatFunc {
        RatFunc::from_poly(Poly::one(chart))
    }

    pub fn from_int(chart: &Chart, c: i64) -> RatFunc {
        RatFunc::from_poly(Poly::from_int(chart, c))
    }

    pub fn constant(chart: &Chart, c: Rational) -> RatFunc {
        RatFunc::from_poly(Poly::constant(chart, c))
    }

    pub fn from_poly(num: Poly) -> RatFunc {
        let den = Poly::one(num.chart());
        RatFunc { num, den }
    }

    pub fn var(chart: &Chart, name: &str) -> Result<RatFunc> {
        Ok(RatFunc::from_poly(Poly::named(chart, name)?))
    }

    pub fn chart(&self) -> &Chart {
        self.num.chart()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.constant_term())
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.num.uses_var(var) || self.den.uses_var(var)
    }

    pub fn uses(&self, name: &str) -> bool {
        self.chart().index_of(name).is_some_and(|i| self.uses_var(i))
    }

    pub fn arith(op: ArithOp, f: &RatFunc, g: &RatFunc) -> Result<RatFunc> {
        f.chart().check_same(g.chart())?;
        Ok(match op {
            ArithOp::Add => f.add_ref(g),
            ArithOp::Sub => f.add_ref(&g.neg_ref()),
            ArithOp::Mul => f.mul_ref(g),
            ArithOp::Div => f.try_div(g)?,
            ArithOp::Neg => f.neg_ref(),
        })
    }

    fn neg_ref(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn add_ref(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::reduce(self.num.add(&other.num), self.den.clone());
        }
        if self.den.is_one() || other.den.is_one() {
            // The polynomial side cannot share a factor with the other denominator.
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            if num.is_zero() {
                return RatFunc::zero(self.chart());
            }
            return Self::normalized(num, self.den.mul(&other.den));
        }
        let g = gcd(&self.den, &other.den);
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d2).add(&other.num.mul(&d1));
        if num.is_zero() {
            return RatFunc::zero(self.chart());
        }
        let den = d1.mul(&other.den);
        if g.is_one() {
            return Self::normalized(num, den);
        }
        let h = gcd(&num, &g);
        if h.is_one() {
            Self::normalized(num, den)
        } else {
            Self::normalized(
                num.div_exact(&h).expect("gcd divides"),
                den.div_exact(&h).expect("gcd divides"),
            )
        }
    }

    fn mul_ref(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero(self.chart());
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let (n1, d2) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (self.num.div_exact(&g1).unwrap(), other.den.div_exact(&g1).unwrap())
        };
        let (n2, d1) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (other.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap())
        };
        Self::normalized(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn recip(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn try_div(&self, other: &RatFunc) -> Result<RatFunc> {
        self.chart().check_same(other.chart())?;
        Ok(self.mul_ref(&other.recip()?))
    }

    pub fn scale(&self, s: &Rational) -> RatFunc {
        if s.is_zero() {
            return RatFunc::zero(self.chart());
        }
        RatFunc {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn scale_int(&self, s: i64) -> RatFunc {
        self.scale(&Rational::from_integer(s.into()))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i32) -> Result<RatFunc> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFunc {
            num: base.num.pow(k),
            den: base.den.pow(k),
        }
        .renormalized())
    }

    fn renormalized(self) -> RatFunc {
        Self::normalized(self.num, self.den)
    }

    /// Partial derivative with respect to the named coordinate.
    pub fn derive(&self, var: &str) -> Result<RatFunc> {
        Ok(self.derive_idx(self.chart().require(var)?))
    }

    pub fn derive_idx(&self, var: usize) -> RatFunc {
        if !self.uses_var(var) {
            return RatFunc::zero(self.chart());
        }
        let dn = self.num.derive(var);
        if !self.den.uses_var(var) {
            // n' may share factors with d even though n does not
            return Self::reduce(dn, self.den.clone());
        }
        let dd = self.den.derive(var);
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Self::reduce(num, self.den.mul(&self.den))
    }

    pub fn substitute(&self, subst: &Substitution) -> Result<RatFunc> {
        self.chart().check_same(&subst.source)?;
        let num = subst.apply_poly(&self.num)?;
        let den = subst.apply_poly(&self.den)?;
        if den.is_zero() {
            return Err(SymError::DegenerateSubstitution);
        }
        num.try_div(&den)
    }

    /// Re-express over a chart that contains every coordinate of this one.
    pub fn embed(&self, target: &Chart) -> Result<RatFunc> {
        if target == self.chart() {
            return Ok(self.clone());
        }
        let map = self
            .chart()
            .names()
            .iter()
            .map(|n| target.require(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::normalized(
            self.num.reindex(target, &map),
            self.den.reindex(target, &map),
        ))
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Result<Rational> {
        assert_eq!(point.len(), self.chart().len());
        let d = self.den.eval_rational(point);
        if d.is_zero() {
            return Err(SymError::Pole);
        }
        Ok(self.num.eval_rational(point) / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        assert_eq!(point.len(), self.chart().len());
        let d = self.den.eval_f64(point);
        if d == 0.0 {
            return Err(SymError::Pole);
        }
        Ok(self.num.eval_f64(point) / d)
    }

    /// Evaluate at a named point. Exact when every bound value is exact.
    pub fn eval(&self, point: &BTreeMap<String, Value>) -> Result<Value> {
        let vals = self
            .chart()
            .names()
            .iter()
            .map(|n| point.get(n).ok_or_else(|| SymError::MissingBinding(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        if vals.iter().all(|v| matches!(v, Value::Exact(_))) {
            let exact: Vec<Rational> = vals
                .iter()
                .map(|v| match v {
                    Value::Exact(r) => r.clone(),
                    Value::Float(_) => unreachable!(),
                })
                .collect();
            self.eval_rational(&exact).map(Value::Exact)
        } else {
            let fl: Vec<f64> = vals.iter().map(|v| v.to_f64()).collect();
            self.eval_f64(&fl).map(Value::Float)
        }
    }
}

/// Simultaneous substitution of every source coordinate by a function over
/// the target chart.
#[derive(Clone, Debug)]
pub struct Substitution {
    source: Chart,
    target: Chart,
    bindings: Vec<Option<RatFunc>>,
}

impl Substitution {
    pub fn new(source: &Chart, target: &Chart) -> Substitution {
        Substitution {
            source: source.clone(),
            target: target.clone(),
            bindings: vec![None; source.len()],
        }
    }

    pub fn bind(mut self, name: &str, value: RatFunc) -> Result<Substitution> {
        let i = self.source.require(name)?;
        self.target.check_same(value.chart())?;
        self.bindings[i] = Some(value);
        Ok(self)
    }

    pub fn bind_str(self, name: &str, expr: &str) -> Result<Substitution> {
        let v = super::parse(expr, &self.target)?;
        self.bind(name, v)
    }

    /// Bind every still-unbound coordinate to the same-named target coordinate.
    pub fn identity_rest(mut self) -> Substitution {
        for (i, b) in self.bindings.iter_mut().enumerate() {
            if b.is_none() {
                if let Ok(v) = RatFunc::var(&self.target, self.source.name(i)) {
                    *b = Some(v);
                }
            }
        }
        self
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    fn apply_poly(&self, p: &Poly) -> Result<RatFunc> {
        let mut acc = RatFunc::zero(&self.target);
        let mut powers: Vec<Vec<RatFunc>> = vec![Vec::new(); self.source.len()];
        for (m, c) in p.terms() {
            let mut t = RatFunc::constant(&self.target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let b = self.bindings[i]
                    .as_ref()
                    .ok_or_else(|| SymError::MissingBinding(self.source.name(i).to_string()))?;
                let cache = &mut powers[i];
                if cache.is_empty() {
                    cache.push(b.clone());
                }
                while cache.len() < e as usize {
                    let next = cache.last().unwrap().mul_ref(b);
                    cache.push(next);
                }
                t = t.mul_ref(&cache[e as usize - 1]);
            }
            acc = acc.add_ref(&t);
        }
        Ok(acc)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let simple_num = self.num.is_monomial();
        let simple_den = self.den.is_monomial() && {
            let (m, c) = self.den.leading().unwrap();
            c.is_one() && m.exponents().iter().filter(|&&e| e > 0).count() == 1
        };
        if simple_num {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        if simple_den {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

// Operator sugar. Mixing charts in these operators is a programming error and
// panics; use `RatFunc::arith` for the checked form.
macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &RatFunc) -> RatFunc {
                assert_eq!(self.chart(), rhs.chart(), "chart mismatch in RatFunc arithmetic");
                $body(self, rhs)
            }
        }
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &RatFunc) -> RatFunc {
                (&self).$m(rhs)
            }
        }
        impl $tr<RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &RatFunc, b: &RatFunc| a.add_ref(b));
binop!(Sub, sub, |a: &RatFunc, b: &RatFunc| a.add_ref(&b.neg_ref()));
binop!(Mul, mul, |a: &RatFunc, b: &RatFunc| a.mul_ref(b));
binop!(Div, div, |a: &RatFunc, b: &RatFunc| a
    .try_div(b)
    .expect("division by zero RatFunc"));

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;

    fn j1() -> Chart {
        Chart::of(&["x1", "x2", "y", "z1", "z2"])
    }

    fn f(s: &str) -> RatFunc {
        parse(s, &j1()).unwrap()
    }

    #[test]
    fn additive_and_multiplicative_inverse() {
        let a = f("(x1^2 + y)/(z1 - 3)");
        assert!((&a + &(-&a)).is_zero());
        assert_eq!(f("x1/x2") * f("x2/x1"), RatFunc::one(&j1()));
    }

    #[test]
    fn derivative_stays_reduced() {
        let d = f("(x2*y + 1)/x2").derive("y").unwrap();
        assert_eq!(d, RatFunc::one(&j1()));
        assert!(d.den().is_one());
    }

    #[test]
    fn polynomial_division_cancels() {
        let q = RatFunc::arith(ArithOp::Div, &f("x1^2 - x2^2"), &f("x1 - x2")).unwrap();
        assert_eq!(q, f("x1 + x2"));
        assert!(q.is_polynomial());
    }

    #[test]
    fn division_by_zero_and_chart_mismatch() {
        assert_eq!(
            RatFunc::arith(ArithOp::Div, &f("x1"), &f("0")),
            Err(SymError::DivisionByZero)
        );
        let other = RatFunc::var(&Chart::of(&["x1"]), "x1").unwrap();
        assert!(matches!(
            RatFunc::arith(ArithOp::Add, &f("x1"), &other),
            Err(SymError::ChartMismatch { .. })
        ));
    }

    #[test]
    fn canonical_scalar_normalization() {
        assert_eq!(f("(2*x1)/(4*x2)"), f("x1/(2*x2)"));
        assert_eq!(f("x1/(-x2)"), f("-x1/x2"));
        assert_eq!(f("x1/(-x2)").den().to_string(), "x2");
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(f("z1^2").derive("z1").unwrap(), f("2*z1"));
        assert_eq!(f("1/x1").derive("x1").unwrap(), f("-1/x1^2"));
        assert!(f("y").derive("x1").unwrap().is_zero());
        assert!(matches!(f("y").derive("q"), Err(SymError::UnknownCoordinate(_))));
    }

    #[test]
    fn substitution_examples() {
        let s = Substitution::new(&j1(), &j1())
            .bind_str("x1", "x2")
            .unwrap()
            .bind_str("x2", "x1")
            .unwrap()
            .identity_rest();
        assert_eq!(f("x1 + x2").substitute(&s).unwrap(), f("x1 + x2"));

        let target = Chart::of(&["x1", "x2", "X1", "X2", "Y"]);
        let s = Substitution::new(&j1(), &target)
            .bind_str("y", "X1*x1 + X2*x2 + Y")
            .unwrap()
            .bind_str("z1", "X1")
            .unwrap()
            .bind_str("z2", "X2")
            .unwrap()
            .identity_rest();
        let r = f("y - z1*x1 - z2*x2").substitute(&s).unwrap();
        assert_eq!(r, RatFunc::var(&target, "Y").unwrap());
    }

    #[test]
    fn substitution_errors() {
        let s = Substitution::new(&j1(), &j1()).bind_str("x1", "x2").unwrap();
        assert!(matches!(f("x1 + y").substitute(&s), Err(SymError::MissingBinding(_))));
        let s = Substitution::new(&j1(), &j1())
            .bind_str("x1", "x2")
            .unwrap()
            .identity_rest();
        assert_eq!(
            f("1/(x1 - x2)").substitute(&s),
            Err(SymError::DegenerateSubstitution)
        );
    }

    #[test]
    fn eval_exact_and_pole() {
        let r = |n: i64| Rational::from_integer(n.into());
        let pt = vec![r(1), r(2), r(0), r(3), r(0)];
        assert_eq!(f("z1^2").eval_rational(&pt).unwrap(), r(9));
        let pt0 = vec![r(0), r(2), r(0), r(3), r(0)];
        assert_eq!(f("1/x1").eval_rational(&pt0), Err(SymError::Pole));

        let mut named = BTreeMap::new();
        for (n, v) in ["x1", "x2", "y", "z1", "z2"].iter().zip([1.0, 2.0, 0.5, 3.0, 0.0]) {
            named.insert(n.to_string(), Value::Float(v));
        }
        assert_eq!(f("x1 + y").eval(&named).unwrap(), Value::Float(1.5));
    }

    #[test]
    fn embed_into_larger_chart() {
        let big = Chart::of(&["x1", "x2", "y", "z1", "z2", "c", "g", "h"]);
        let e = f("z1/x1").embed(&big).unwrap();
        assert_eq!(e, parse("z1/x1", &big).unwrap());
    }
}
