//! Differential forms with rational-function coefficients.
//!
//! A [`DiffForm`] of degree `p` is stored as a map from strictly increasing
//! index tuples `(i1 < ... < ip)` into the chart to the coefficient of
//! `dx_i1 ∧ ... ∧ dx_ip`. Reordering into this normal form picks up the sign of
//! the sorting permutation, so equality of forms is equality of maps.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::symexpr::{Chart, RatFunc, SymError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("ideal generator {0} is not a 1-form")]
    NotOneForm(usize),
    #[error("ideal generator {0} has no solvable differential")]
    Unsolvable(usize),
    #[error("coframe is degenerate")]
    DegenerateCoframe,
}

pub type Result<T> = std::result::Result<T, FormError>;

#[derive(Clone, PartialEq, Eq)]
pub struct DiffForm {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<Vec<usize>, RatFunc>,
}

/// Sort `idx` in place; returns the permutation sign or `None` on a repeat.
fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl DiffForm {
    pub fn zero(chart: &Chart, degree: usize) -> DiffForm {
        DiffForm {
            chart: chart.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(f: RatFunc) -> DiffForm {
        let mut w = DiffForm::zero(f.chart(), 0);
        if !f.is_zero() {
            w.terms.insert(Vec::new(), f);
        }
        w
    }

    /// The coordinate differential `d(name)`.
    pub fn coord(chart: &Chart, name: &str) -> Result<DiffForm> {
        let i = chart.require(name)?;
        Ok(DiffForm::basis(chart, vec![i], RatFunc::one(chart)))
    }

    fn basis(chart: &Chart, mut idx: Vec<usize>, coeff: RatFunc) -> DiffForm {
        let mut w = DiffForm::zero(chart, idx.len());
        if let Some(s) = sort_with_sign(&mut idx) {
            let c = if s < 0 { -coeff } else { coeff };
            if !c.is_zero() {
                w.terms.insert(idx, c);
            }
        }
        w
    }

    /// `sum_k coeffs[k] d(names[k])`.
    pub fn one_form(chart: &Chart, parts: &[(&str, RatFunc)]) -> Result<DiffForm> {
        let mut w = DiffForm::zero(chart, 1);
        for (name, c) in parts {
            chart.check_same(c.chart())?;
            w = w.add(&DiffForm::basis(chart, vec![chart.require(name)?], c.clone()))?;
        }
        Ok(w)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &RatFunc)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Coefficient of `d(names[0]) ∧ d(names[1]) ∧ ...` (sign-adjusted for order).
    pub fn coefficient(&self, names: &[&str]) -> Result<RatFunc> {
        let mut idx = names
            .iter()
            .map(|n| self.chart.require(n))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if idx.len() != self.degree {
            return Err(FormError::DegreeMismatch(idx.len(), self.degree));
        }
        Ok(match sort_with_sign(&mut idx) {
            None => RatFunc::zero(&self.chart),
            Some(s) => match self.terms.get(&idx) {
                None => RatFunc::zero(&self.chart),
                Some(c) if s > 0 => c.clone(),
                Some(c) => -c,
            },
        })
    }

    fn check(&self, other: &DiffForm) -> Result<()> {
        self.chart.check_same(&other.chart)?;
        Ok(())
    }

    pub fn add(&self, other: &DiffForm) -> Result<DiffForm> {
        self.check(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch(self.degree, other.degree));
        }
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            let sum = match terms.remove(k) {
                Some(c) => c + v,
                None => v.clone(),
            };
            if !sum.is_zero() {
                terms.insert(k.clone(), sum);
            }
        }
        Ok(DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms,
        })
    }

    pub fn neg(&self) -> DiffForm {
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn sub(&self, other: &DiffForm) -> Result<DiffForm> {
        self.add(&other.neg())
    }

    pub fn scale(&self, f: &RatFunc) -> Result<DiffForm> {
        self.chart.check_same(f.chart())?;
        if f.is_zero() {
            return Ok(DiffForm::zero(&self.chart, self.degree));
        }
        Ok(DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * f)).collect(),
        })
    }

    /// Re-express over a chart that contains every coordinate of this one.
    pub fn embed(&self, target: &Chart) -> Result<DiffForm> {
        if target == &self.chart {
            return Ok(self.clone());
        }
        let map = self
            .chart
            .names()
            .iter()
            .map(|n| target.require(n))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut out = DiffForm::zero(target, self.degree);
        for (k, c) in &self.terms {
            let idx = k.iter().map(|&i| map[i]).collect();
            out = out.add(&DiffForm::basis(target, idx, c.embed(target)?))?;
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &DiffForm) -> Result<DiffForm> {
        self.check(other)?;
        let mut out = DiffForm::zero(&self.chart, self.degree + other.degree);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut idx: Vec<usize> = k1.iter().chain(k2).copied().collect();
                let Some(s) = sort_with_sign(&mut idx) else {
                    continue;
                };
                let c = c1 * c2;
                let c = if s < 0 { -c } else { c };
                let sum = match out.terms.remove(&idx) {
                    Some(prev) => prev + c,
                    None => c,
                };
                if !sum.is_zero() {
                    out.terms.insert(idx, sum);
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative: `d(f dx_I) = sum_u (∂f/∂u) du ∧ dx_I`.
    pub fn d(&self) -> DiffForm {
        let mut out = DiffForm::zero(&self.chart, self.degree + 1);
        for (k, c) in &self.terms {
            for u in 0..self.chart.len() {
                if k.contains(&u) || !c.uses_var(u) {
                    continue;
                }
                let mut idx = Vec::with_capacity(k.len() + 1);
                idx.push(u);
                idx.extend_from_slice(k);
                let s = sort_with_sign(&mut idx).expect("distinct indices");
                let dc = c.derive_idx(u);
                let dc = if s < 0 { -dc } else { dc };
                let sum = match out.terms.remove(&idx) {
                    Some(prev) => prev + dc,
                    None => dc,
                };
                if !sum.is_zero() {
                    out.terms.insert(idx, sum);
                }
            }
        }
        out
    }

    /// Representative of `self` modulo the algebraic ideal generated by the
    /// given 1-forms, obtained by solving each generator for one coordinate
    /// differential and substituting. The result contains none of the solved
    /// differentials.
    pub fn reduce_mod(&self, ideal: &[DiffForm]) -> Result<DiffForm> {
        let solved = solve_ideal(&self.chart, ideal)?;
        if solved.is_empty() {
            return Ok(self.clone());
        }
        let mut out = DiffForm::zero(&self.chart, self.degree);
        for (k, c) in &self.terms {
            if !k.iter().any(|i| solved.contains_key(i)) {
                out = out.add(&DiffForm::basis(&self.chart, k.clone(), c.clone()))?;
                continue;
            }
            let mut prod = DiffForm::function(c.clone());
            for i in k {
                let factor = match solved.get(i) {
                    Some(expr) => expr.clone(),
                    None => DiffForm::basis(&self.chart, vec![*i], RatFunc::one(&self.chart)),
                };
                prod = prod.wedge(&factor)?;
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    /// Interior evaluation of a 1-form on a vector given by its components.
    pub fn pair(&self, vector: &[RatFunc]) -> Result<RatFunc> {
        if self.degree != 1 {
            return Err(FormError::DegreeMismatch(self.degree, 1));
        }
        let mut acc = RatFunc::zero(&self.chart);
        for (k, c) in &self.terms {
            acc = acc + c * &vector[k[0]];
        }
        Ok(acc)
    }

    /// Evaluate a 2-form on a pair of vectors.
    pub fn eval2(&self, u: &[RatFunc], v: &[RatFunc]) -> Result<RatFunc> {
        if self.degree != 2 {
            return Err(FormError::DegreeMismatch(self.degree, 2));
        }
        let mut acc = RatFunc::zero(&self.chart);
        for (k, c) in &self.terms {
            let (a, b) = (k[0], k[1]);
            let det = &u[a] * &v[b] - &u[b] * &v[a];
            if !det.is_zero() {
                acc = acc + c * &det;
            }
        }
        Ok(acc)
    }
}

/// Solve each generator for a pivot differential (reduced echelon form).
/// Returns pivot index -> expression of `d(pivot)` in the remaining differentials.
fn solve_ideal(chart: &Chart, ideal: &[DiffForm]) -> Result<BTreeMap<usize, DiffForm>> {
    let mut solved: BTreeMap<usize, DiffForm> = BTreeMap::new();
    for (n, gen) in ideal.iter().enumerate() {
        gen.check(&DiffForm::zero(chart, 1))?;
        if gen.degree != 1 && !gen.is_zero() {
            return Err(FormError::NotOneForm(n));
        }
        // eliminate earlier pivots
        let mut g = DiffForm::zero(chart, 1);
        for (k, c) in &gen.terms {
            let piece = match solved.get(&k[0]) {
                Some(expr) => expr.scale(c)?,
                None => DiffForm::basis(chart, k.clone(), c.clone()),
            };
            g = g.add(&piece)?;
        }
        let Some((pidx, pc)) = g.terms.iter().next_back().map(|(k, c)| (k[0], c.clone())) else {
            return Err(FormError::Unsolvable(n));
        };
        // d(pivot) = -(g - pc d(pivot)) / pc
        let mut rest = g.clone();
        rest.terms.remove(&vec![pidx]);
        let inv = pc.recip()?;
        let expr = rest.scale(&(-inv))?;
        // back-substitute into earlier solutions
        for other in solved.values_mut() {
            if let Some(c) = other.terms.remove(&vec![pidx]) {
                *other = other.add(&expr.scale(&c)?)?;
            }
        }
        solved.insert(pidx, expr);
    }
    Ok(solved)
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let basis: Vec<String> = k.iter().map(|&i| format!("d{}", self.chart.name(i))).collect();
            if k.is_empty() {
                write!(f, "{c}")?;
            } else if c.as_constant().is_some_and(|v| num_traits::One::is_one(&v)) {
                write!(f, "{}", basis.join("∧"))?;
            } else {
                write!(f, "({c})*{}", basis.join("∧"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffForm[{}]({self})", self.degree)
    }
}

/// A named basis of 1-forms, used to read off coefficients in the basis
/// `θ_i ∧ θ_j` and to print forms in that notation.
#[derive(Clone, Debug)]
pub struct Coframe {
    names: Vec<String>,
    forms: Vec<DiffForm>,
    /// Dual vectors: `dual[j][a]` is the `a`-th coordinate component of `e_j`.
    dual: Vec<Vec<RatFunc>>,
}

impl Coframe {
    pub fn new(names: &[&str], forms: Vec<DiffForm>) -> Result<Coframe> {
        let chart = forms
            .first()
            .map(|f| f.chart().clone())
            .ok_or(FormError::DegenerateCoframe)?;
        let n = chart.len();
        if forms.len() != n || names.len() != n {
            return Err(FormError::DegenerateCoframe);
        }
        let mut m: Vec<Vec<RatFunc>> = Vec::with_capacity(n);
        for (i, w) in forms.iter().enumerate() {
            w.check(&forms[0])?;
            if w.degree != 1 {
                return Err(FormError::NotOneForm(i));
            }
            let mut row = vec![RatFunc::zero(&chart); n];
            for (k, c) in &w.terms {
                row[k[0]] = c.clone();
            }
            m.push(row);
        }
        let inv = invert(m).ok_or(FormError::DegenerateCoframe)?;
        // columns of the inverse are the dual vectors
        let dual = (0..n).map(|j| (0..n).map(|a| inv[a][j].clone()).collect()).collect();
        Ok(Coframe {
            names: names.iter().map(|s| s.to_string()).collect(),
            forms,
            dual,
        })
    }

    pub fn forms(&self) -> &[DiffForm] {
        &self.forms
    }

    pub fn dual(&self, j: usize) -> &[RatFunc] {
        &self.dual[j]
    }

    /// Coefficients of a 2-form on `θ_i ∧ θ_j`, `i < j`, omitting zeros.
    pub fn decompose2(&self, w: &DiffForm) -> Result<Vec<((usize, usize), RatFunc)>> {
        let n = self.forms.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let c = w.eval2(&self.dual[i], &self.dual[j])?;
                if !c.is_zero() {
                    out.push(((i, j), c));
                }
            }
        }
        Ok(out)
    }

    /// Render a 2-form as `c*θi∧θj + ...` in this coframe's names.
    pub fn render2(&self, w: &DiffForm) -> Result<String> {
        let parts = self.decompose2(w)?;
        if parts.is_empty() {
            return Ok("0".into());
        }
        Ok(parts
            .iter()
            .map(|((i, j), c)| format!("({c})*{}∧{}", self.names[*i], self.names[*j]))
            .collect::<Vec<_>>()
            .join(" + "))
    }
}

/// Gauss-Jordan inverse over the rational-function field.
pub(crate) fn invert(mut m: Vec<Vec<RatFunc>>) -> Option<Vec<Vec<RatFunc>>> {
    let n = m.len();
    let chart = m.first()?.first()?.chart().clone();
    let mut inv: Vec<Vec<RatFunc>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        RatFunc::one(&chart)
                    } else {
                        RatFunc::zero(&chart)
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].recip().ok()?;
        for j in 0..n {
            m[col][j] = &m[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for j in 0..n {
                let a = &m[col][j] * &factor;
                if !a.is_zero() {
                    m[r][j] = &m[r][j] - &a;
                }
                let b = &inv[col][j] * &factor;
                if !b.is_zero() {
                    inv[r][j] = &inv[r][j] - &b;
                }
            }
        }
    }
    Some(inv)
}
