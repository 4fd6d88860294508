use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::order::{Exponent, OrderSpec};
use crate::rational::{fmt_q, Q};

/// A polynomial section in flag-adapted chart coordinates, with exact
/// rational coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySection {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl PolySection {
    pub fn zero(nvars: usize) -> Self {
        PolySection { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::from_terms(nvars, [(Exponent::zeros(nvars), c)]).expect("constant has matching dims")
    }

    pub fn monomial(exp: Exponent) -> Self {
        let n = exp.dim();
        PolySection { nvars: n, terms: BTreeMap::from([(exp, Q::one())]) }
    }

    /// The coordinate function `z_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Exponent::unit(nvars, i))
    }

    /// Builds a section, summing repeated exponents and dropping zeros.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Q)>) -> Result<Self> {
        let mut out = PolySection::zero(nvars);
        for (e, c) in terms {
            if e.dim() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: e.dim() });
            }
            out.add_term(e, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, e: Exponent, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponent) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.keys()
    }

    pub fn max_degree(&self) -> u64 {
        self.terms.keys().map(Exponent::degree).max().unwrap_or(0)
    }

    /// `v(s)`: the order-minimal exponent with a nonzero coefficient.
    pub fn valuation(&self, order: &OrderSpec) -> Result<Exponent> {
        if let OrderSpec::Weight(w) = order {
            if w.len() != self.nvars {
                return Err(Error::DimensionMismatch { expected: self.nvars, got: w.len() });
            }
        }
        order.min(self.terms.keys()).cloned().ok_or(Error::ZeroSection)
    }

    pub fn scale(&self, c: &Q) -> PolySection {
        if c.is_zero() {
            return PolySection::zero(self.nvars);
        }
        PolySection { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn add(&self, other: &PolySection) -> PolySection {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolySection) -> PolySection {
        self.add(&other.scale(&-Q::one()))
    }

    /// Exact polynomial product.
    pub fn mul(&self, other: &PolySection) -> PolySection {
        let mut acc: BTreeMap<Exponent, Q> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *acc.entry(a + b).or_insert_with(Q::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        PolySection { nvars: self.nvars, terms: acc }
    }

    pub fn pow(&self, k: u32) -> PolySection {
        let mut out = PolySection::constant(self.nvars, Q::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Substitutes `z_i := images[i]`. The result lives in
    /// `images[0].nvars()` variables.
    pub fn compose(&self, images: &[PolySection]) -> Result<PolySection> {
        if images.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: images.len() });
        }
        let m = images.first().map_or(self.nvars, PolySection::nvars);
        let max_pow: Vec<u32> =
            (0..self.nvars).map(|i| self.terms.keys().map(|e| e.coords()[i]).max().unwrap_or(0)).collect();
        // powers[i][p] = images[i]^p
        let powers: Vec<Vec<PolySection>> = images
            .iter()
            .zip(&max_pow)
            .map(|(img, &mp)| {
                let mut v = vec![PolySection::constant(m, Q::one())];
                for p in 1..=mp as usize {
                    let next = v[p - 1].mul(img);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = PolySection::zero(m);
        for (e, c) in &self.terms {
            let mut t = PolySection::constant(m, c.clone());
            for (i, &p) in e.coords().iter().enumerate() {
                if p > 0 {
                    t = t.mul(&powers[i][p as usize]);
                }
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Divides by `z_axis^power`; `None` if some term is not divisible.
    pub fn divide_by_var_power(&self, axis: usize, power: u32) -> Option<PolySection> {
        let mut shift = vec![0u32; self.nvars];
        shift[axis] = power;
        let shift = Exponent::new(shift);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| e.checked_sub(&shift).map(|d| (d, c.clone())))
            .collect::<Option<BTreeMap<_, _>>>()?;
        Some(PolySection { nvars: self.nvars, terms })
    }

    /// Keeps the terms whose exponent has `coord[axis] == 0` and drops that
    /// coordinate: restriction to the hyperplane `{z_axis = 0}`.
    pub fn restrict_to_hyperplane(&self, axis: usize) -> PolySection {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.coords()[axis] == 0)
            .map(|(e, c)| {
                let mut v = e.coords().to_vec();
                v.remove(axis);
                (Exponent::new(v), c.clone())
            })
            .collect();
        PolySection { nvars: self.nvars - 1, terms }
    }
}

impl fmt::Display for PolySection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{}*z^{}", fmt_q(c), e)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    fn poly(terms: &[(&[u32], i64)]) -> PolySection {
        let n = terms[0].0.len();
        PolySection::from_terms(n, terms.iter().map(|(x, c)| (e(x), q(*c)))).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let s = poly(&[(&[0, 1], 1), (&[2, 0], 1)]);
        assert_eq!(s.valuation(&OrderSpec::Lex).unwrap(), e(&[0, 1]));
        let t = poly(&[(&[1, 1], 1), (&[0, 3], -1)]);
        assert_eq!(t.valuation(&OrderSpec::DegLex).unwrap(), e(&[1, 1]));
        assert_eq!(t.valuation(&OrderSpec::Lex).unwrap(), e(&[0, 3]));
        assert!(matches!(PolySection::zero(2).valuation(&OrderSpec::Lex), Err(Error::ZeroSection)));
    }

    #[test]
    fn multiply_examples() {
        let z1 = PolySection::var(2, 0);
        let z2 = PolySection::var(2, 1);
        assert_eq!(z1.mul(&z2), poly(&[(&[1, 1], 1)]));
        let a = poly(&[(&[0], 1), (&[1], 1)]);
        let b = poly(&[(&[0], 1), (&[1], -1)]);
        assert_eq!(a.mul(&b), poly(&[(&[0], 1), (&[2], -1)]));
        let s = poly(&[(&[0, 1], 1), (&[2, 0], 1)]);
        let t = poly(&[(&[0, 1], 1), (&[3, 0], -1)]);
        let st = s.mul(&t);
        assert_eq!(st.valuation(&OrderSpec::Lex).unwrap(), e(&[0, 2]));
        assert_eq!(
            st.valuation(&OrderSpec::Lex).unwrap(),
            &s.valuation(&OrderSpec::Lex).unwrap() + &t.valuation(&OrderSpec::Lex).unwrap()
        );
    }

    #[test]
    fn cancellation_removes_terms() {
        let s = poly(&[(&[1, 0], 1), (&[0, 1], 2)]);
        assert!(s.sub(&s).is_zero());
        let r = s.add(&poly(&[(&[1, 0], -1)]));
        assert_eq!(r, poly(&[(&[0, 1], 2)]));
    }

    #[test]
    fn compose_substitutes() {
        // z2 ↦ w1 + w2², z1 ↦ w2
        let inv = vec![poly(&[(&[0, 1], 1)]), poly(&[(&[1, 0], 1), (&[0, 2], 1)])];
        let z2 = PolySection::var(2, 1);
        assert_eq!(z2.compose(&inv).unwrap(), poly(&[(&[1, 0], 1), (&[0, 2], 1)]));
        let z1sq = poly(&[(&[2, 0], 3)]);
        assert_eq!(z1sq.compose(&inv).unwrap(), poly(&[(&[0, 2], 3)]));
    }

    #[test]
    fn divide_and_restrict() {
        let s = poly(&[(&[2, 1], 1), (&[1, 0], 3)]);
        assert_eq!(s.divide_by_var_power(0, 1).unwrap(), poly(&[(&[1, 1], 1), (&[0, 0], 3)]));
        assert!(s.divide_by_var_power(0, 2).is_none());
        let r = poly(&[(&[0, 2], 5), (&[1, 0], 1)]).restrict_to_hyperplane(0);
        assert_eq!(r, poly(&[(&[2], 5)]));
    }
}
