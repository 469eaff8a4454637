use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Chart, Rational, Result};

/// Exponent vector, one entry per chart coordinate.
///
/// Ordered graded-lexicographically: total degree first, then the exponent of
/// the first coordinate, and so on.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Monomial {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize, e: u32) -> Monomial {
        let mut m = vec![0; n];
        m[i] = e;
        Monomial(m)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Monomial {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// No stored coefficient is zero, so two polynomials over the same chart are
/// equal iff their term maps are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    chart: Chart,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(chart: &Chart) -> Poly {
        Poly {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: &Chart, c: Rational) -> Poly {
        let mut p = Poly::zero(chart);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(chart.len()), c);
        }
        p
    }

    pub fn one(chart: &Chart) -> Poly {
        Poly::constant(chart, Rational::one())
    }

    pub fn from_int(chart: &Chart, c: i64) -> Poly {
        Poly::constant(chart, Rational::from_integer(c.into()))
    }

    pub fn var(chart: &Chart, i: usize) -> Poly {
        Poly::term(chart, Monomial::var(chart.len(), i, 1), Rational::one())
    }

    pub fn named(chart: &Chart, name: &str) -> Result<Poly> {
        Ok(Poly::var(chart, chart.require(name)?))
    }

    pub fn term(chart: &Chart, m: Monomial, c: Rational) -> Poly {
        debug_assert_eq!(m.0.len(), chart.len());
        let mut p = Poly::zero(chart);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub(crate) fn from_terms(chart: &Chart, terms: BTreeMap<Monomial, Rational>) -> Poly {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        Poly {
            chart: chart.clone(),
            terms,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().unwrap().is_one(),
            _ => false,
        }
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_term().is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.chart.len()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Leading term under graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Sum of exponents of `vars` in each term, maximised over terms.
    pub fn degree_in_vars(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|&v| m.0[v]).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// Per-coordinate minimum exponent over all terms (the monomial content).
    pub fn min_exponents(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one(self.chart.len());
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    pub fn neg(&self) -> Poly {
        Poly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero(&self.chart);
        }
        Poly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero(&self.chart);
        }
        Poly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c * s)).collect(),
        }
    }

    fn add_term(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.chart, other.chart);
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut terms = big.terms.clone();
        for (m, c) in &small.terms {
            Self::add_term(&mut terms, m.clone(), c.clone());
        }
        Poly::from_terms(&self.chart, terms)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.chart, other.chart);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::add_term(&mut terms, m.clone(), -c);
        }
        Poly::from_terms(&self.chart, terms)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.chart, other.chart);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.chart);
        }
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                Self::add_term(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        Poly::from_terms(&self.chart, terms)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.chart);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derive(&self, var: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            terms.insert(m2, c * Rational::from_integer(BigInt::from(e)));
        }
        Poly::from_terms(&self.chart, terms)
    }

    /// Exact division. Returns `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if d.is_constant() {
            return Some(self.scale(&d.constant_term().recip()));
        }
        let (ld, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        if d.is_monomial() {
            let inv = lc.recip();
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                if !ld.divides(m) {
                    return None;
                }
                terms.insert(ld.quotient_of(m), c * &inv);
            }
            return Some(Poly::from_terms(&self.chart, terms));
        }
        let mut rem = self.clone();
        let mut quot = BTreeMap::new();
        while let Some((lm, lcr)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if !ld.divides(&lm) {
                return None;
            }
            let qm = ld.quotient_of(&lm);
            let qc = lcr / &lc;
            rem = rem.sub(&d.mul_monomial(&qm, &qc));
            quot.insert(qm, qc);
        }
        Some(Poly::from_terms(&self.chart, quot))
    }

    /// Divide every term by the monomial `m`, which must divide all of them.
    pub(crate) fn shift_down(&self, m: &Monomial) -> Poly {
        Poly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (m.quotient_of(t), c.clone()))
                .collect(),
        }
    }

    /// Coefficients with respect to `var`: `self = sum_i coeffs[i] * var^i`.
    pub(crate) fn coefficients_in(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, BTreeMap<Monomial, Rational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] = 0;
            out.entry(e).or_default().insert(m2, c.clone());
        }
        out.into_iter()
            .map(|(e, t)| (e, Poly::from_terms(&self.chart, t)))
            .collect()
    }

    /// Leading coefficient with respect to `var` (a polynomial free of `var`).
    pub(crate) fn lc_in(&self, var: usize) -> (u32, Poly) {
        let d = self.degree_in(var);
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.0[var] == d {
                let mut m2 = m.clone();
                m2.0[var] = 0;
                terms.insert(m2, c.clone());
            }
        }
        (d, Poly::from_terms(&self.chart, terms))
    }

    /// Scale so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading_coeff();
        if lc.is_one() {
            return self.clone();
        }
        self.scale(&lc.recip())
    }

    /// Scalar `s` such that `self * s` has coprime integer coefficients and
    /// a positive leading coefficient.
    pub fn integer_normalizer(&self) -> Rational {
        if self.is_zero() {
            return Rational::one();
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        let mut s = Rational::new(den_lcm, num_gcd);
        if self.leading_coeff().is_negative() {
            s = -s;
        }
        s
    }

    /// Re-express over `target`, mapping coordinate `i` of this chart to
    /// coordinate `map[i]` of the target.
    pub(crate) fn reindex(&self, target: &Chart, map: &[usize]) -> Poly {
        let n = target.len();
        Poly {
            chart: target.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = vec![0; n];
                    for (i, &k) in m.0.iter().enumerate() {
                        e[map[i]] += k;
                    }
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (x, &e) in point.iter().zip(&m.0) {
                    if e > 0 {
                        t *= x.powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    pub(crate) fn fmt_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.chart.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.chart.name(i), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_terms(f)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
