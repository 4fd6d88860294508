//! Exact section spaces `H^0(X, kL)` written as polynomial spaces in
//! flag-adapted chart coordinates.
//!
//! [`eliminate`] runs a column-sorted Gauss–Jordan elimination: columns are
//! the monomials occurring in the basis, sorted by the chosen additive order,
//! and the pivot for each column is taken in ascending order. The pivot
//! columns are exactly the leading exponents `A(kL)`, and the reduced rows
//! are the distinguished sections `s_α = z^α + Σ_{β>α, β∉A} a_β z^β`.

mod model;
mod poly;

use std::collections::{BTreeSet, HashMap};

use num::Zero;

pub use model::{CoordinateChange, ModelFamily, ModelSpec};
pub use poly::PolySection;

use crate::error::{Error, Result};
use crate::order::{Exponent, OrderSpec};
use crate::rational::Q;

/// A basis of sections at tensor power `level`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SectionSpace {
    level: u32,
    nvars: usize,
    basis: Vec<PolySection>,
}

impl SectionSpace {
    pub fn new(level: u32, nvars: usize, basis: Vec<PolySection>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("level k must be positive".into()));
        }
        if basis.is_empty() {
            return Err(Error::InvalidArgument("a section space needs at least one basis element".into()));
        }
        if let Some(bad) = basis.iter().find(|s| s.nvars() != nvars) {
            return Err(Error::DimensionMismatch { expected: nvars, got: bad.nvars() });
        }
        if let Some(i) = basis.iter().position(PolySection::is_zero) {
            return Err(Error::LinearlyDependent { index: i });
        }
        Ok(SectionSpace { level, nvars, basis })
    }

    /// The span of the monomials `z^α`, `α ∈ exps`.
    pub fn from_monomials(level: u32, nvars: usize, exps: impl IntoIterator<Item = Exponent>) -> Result<Self> {
        let basis: Vec<PolySection> = exps.into_iter().map(PolySection::monomial).collect();
        Self::new(level, nvars, basis)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> &[PolySection] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Rewrites every basis element in new coordinates.
    pub fn change_coordinates(&self, map: &CoordinateChange) -> Result<SectionSpace> {
        if map.nvars() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: map.nvars() });
        }
        let basis = self.basis.iter().map(|s| map.pull_back(s)).collect::<Result<Vec<_>>>()?;
        SectionSpace::new(self.level, self.nvars, basis)
    }

    /// Restriction to the first flag divisor `{z_1 = 0}` (drops `z_1`).
    /// Sections that vanish on it are discarded, and the image is re-reduced
    /// so the result is again a basis.
    pub fn restrict_to_first_divisor(&self) -> Result<SectionSpace> {
        if self.nvars < 2 {
            return Err(Error::InvalidArgument("cannot restrict a one-dimensional model".into()));
        }
        let restricted: Vec<PolySection> =
            self.basis.iter().map(|s| s.restrict_to_hyperplane(0)).filter(|s| !s.is_zero()).collect();
        let reduced = row_reduce(&OrderSpec::Lex, &restricted, self.nvars - 1);
        SectionSpace::new(self.level, self.nvars - 1, reduced.into_iter().map(|(_, s)| s).collect())
    }

    /// Sections of `kL - jL_1` (with `L_1` the first flag divisor): the
    /// subspace vanishing to order `≥ j` along `{z_1 = 0}`, divided by `z_1^j`.
    pub fn twist_by_first_divisor(&self, j: u32) -> Result<SectionSpace> {
        // Under lex the leading z_1-power of a reduced row is its vanishing
        // order along {z_1 = 0}, so the subspace is spanned by reduced rows.
        let reduced = row_reduce(&OrderSpec::Lex, &self.basis, self.nvars);
        let kept: Vec<PolySection> = reduced
            .into_iter()
            .filter(|(lead, _)| lead.coords()[0] >= j)
            .map(|(_, s)| s.divide_by_var_power(0, j).expect("lex-leading z_1 power bounds the support"))
            .collect();
        SectionSpace::new(self.level, self.nvars, kept)
    }
}

/// The leading exponents `A(kL)` with the distinguished basis, both sorted
/// by the order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LeadingSet {
    level: u32,
    order: OrderSpec,
    exponents: Vec<Exponent>,
    distinguished: Vec<PolySection>,
}

impl LeadingSet {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn nvars(&self) -> usize {
        self.exponents[0].dim()
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exponents
    }

    pub fn distinguished(&self) -> &[PolySection] {
        &self.distinguished
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn contains(&self, e: &Exponent) -> bool {
        self.exponents.binary_search_by(|x| self.order.cmp(x, e)).is_ok()
    }

    pub fn exponent_set(&self) -> BTreeSet<Exponent> {
        self.exponents.iter().cloned().collect()
    }

    /// The distinguished basis as a section space.
    pub fn as_space(&self) -> SectionSpace {
        SectionSpace { level: self.level, nvars: self.nvars(), basis: self.distinguished.clone() }
    }

    /// The monomial leading set `{z^α}` for a given exponent set (toric case).
    pub fn monomial(level: u32, order: OrderSpec, mut exps: Vec<Exponent>) -> Result<Self> {
        if exps.is_empty() {
            return Err(Error::EmptyExponentSet);
        }
        exps.sort_by(|a, b| order.cmp(a, b));
        exps.dedup();
        let distinguished = exps.iter().cloned().map(PolySection::monomial).collect();
        Ok(LeadingSet { level, order, exponents: exps, distinguished })
    }
}

/// Column-sorted Gauss–Jordan elimination; returns `(leading exponent,
/// reduced row)` pairs in order, or the index of the first row that
/// reduced to zero.
fn gauss_jordan(order: &OrderSpec, rows_in: &[PolySection], nvars: usize) -> std::result::Result<Vec<(Exponent, PolySection)>, usize> {
    let cols: Vec<Exponent> = {
        let mut set: Vec<Exponent> =
            rows_in.iter().flat_map(|s| s.support().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        set.sort_by(|a, b| order.cmp(a, b));
        set
    };
    let index: HashMap<&Exponent, usize> = cols.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut rows: Vec<Vec<Q>> = rows_in
        .iter()
        .map(|s| {
            let mut r = vec![Q::zero(); cols.len()];
            for (e, c) in s.terms() {
                r[index[e]] = c.clone();
            }
            r
        })
        .collect();
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows.len()];
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for c in 0..cols.len() {
        let Some(p) = (0..rows.len()).find(|&i| pivot_of_row[i].is_none() && !rows[i][c].is_zero()) else {
            continue;
        };
        let inv = rows[p][c].recip();
        for x in rows[p].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let prow = rows[p].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != p && !row[c].is_zero() {
                let f = row[c].clone();
                for (d, s) in row.iter_mut().zip(&prow).skip(c) {
                    if !s.is_zero() {
                        *d -= &f * s;
                    }
                }
            }
        }
        pivot_of_row[p] = Some(c);
        pivots.push((c, p));
    }
    if let Some(i) = pivot_of_row.iter().position(Option::is_none) {
        return Err(i);
    }
    Ok(pivots
        .into_iter()
        .map(|(c, p)| {
            let terms = cols.iter().zip(&rows[p]).filter(|(_, v)| !v.is_zero()).map(|(e, v)| (e.clone(), v.clone()));
            (cols[c].clone(), PolySection::from_terms(nvars, terms).expect("columns share dimension"))
        })
        .collect())
}

/// Like [`gauss_jordan`] but silently drops dependent rows.
fn row_reduce(order: &OrderSpec, rows: &[PolySection], nvars: usize) -> Vec<(Exponent, PolySection)> {
    let mut kept: Vec<PolySection> = rows.to_vec();
    loop {
        match gauss_jordan(order, &kept, nvars) {
            Ok(r) => return r,
            Err(i) => {
                kept.remove(i);
                if kept.is_empty() {
                    return Vec::new();
                }
            }
        }
    }
}

/// Gaussian elimination to the distinguished basis. `|A(kL)|` always equals
/// the dimension of the input space; a dependent basis is an error naming
/// the first element that reduces to zero.
pub fn eliminate(order: &OrderSpec, space: &SectionSpace) -> Result<LeadingSet> {
    if let OrderSpec::Weight(w) = order {
        if w.len() != space.nvars {
            return Err(Error::DimensionMismatch { expected: space.nvars, got: w.len() });
        }
    }
    let reduced =
        gauss_jordan(order, &space.basis, space.nvars).map_err(|index| Error::LinearlyDependent { index })?;
    let (exponents, distinguished) = reduced.into_iter().unzip();
    Ok(LeadingSet { level: space.level, order: order.clone(), exponents, distinguished })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, rank};
    use num::One;
    use proptest::prelude::*;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    fn poly(terms: &[(&[u32], i64)]) -> PolySection {
        let n = terms[0].0.len();
        PolySection::from_terms(n, terms.iter().map(|(x, c)| (e(x), q(*c)))).unwrap()
    }

    /// Independent oracle: `β ∈ A` iff adding column `β` to the columns
    /// strictly below it raises the rank of the coefficient matrix.
    fn leading_exponents_by_rank(order: &OrderSpec, basis: &[PolySection]) -> BTreeSet<Exponent> {
        let cols: BTreeSet<Exponent> = basis.iter().flat_map(|s| s.support().cloned()).collect();
        let column_rank = |keep: &dyn Fn(&Exponent) -> bool| {
            let rows: Vec<Vec<Q>> =
                basis.iter().map(|s| cols.iter().filter(|c| keep(c)).map(|c| s.coeff(c)).collect()).collect();
            rank(&rows)
        };
        cols.iter()
            .filter(|b| {
                column_rank(&|c: &Exponent| order.cmp(c, b).is_le()) > column_rank(&|c: &Exponent| order.less(c, b))
            })
            .cloned()
            .collect()
    }

    #[test]
    fn monomial_basis_is_already_eliminated() {
        let exps: Vec<Exponent> = (0..=2u32).flat_map(|i| (0..=2 - i).map(move |j| e(&[i, j]))).collect();
        let space = SectionSpace::from_monomials(1, 2, exps.clone()).unwrap();
        let ls = eliminate(&OrderSpec::Lex, &space).unwrap();
        assert_eq!(ls.len(), 6);
        assert_eq!(ls.exponent_set(), exps.iter().cloned().collect());
        for (a, s) in ls.exponents().iter().zip(ls.distinguished()) {
            assert_eq!(s, &PolySection::monomial(a.clone()));
        }
    }

    #[test]
    fn eliminate_small_mixed_basis() {
        let basis = vec![poly(&[(&[0, 0], 1)]), poly(&[(&[1, 0], 1), (&[0, 1], 1)]), poly(&[(&[1, 0], 1), (&[0, 1], -1)])];
        let space = SectionSpace::new(1, 2, basis.clone()).unwrap();
        let ls = eliminate(&OrderSpec::Lex, &space).unwrap();
        let expected = leading_exponents_by_rank(&OrderSpec::Lex, &basis);
        assert_eq!(expected, [e(&[0, 0]), e(&[0, 1]), e(&[1, 0])].into_iter().collect());
        assert_eq!(ls.exponent_set(), expected);
        assert_eq!(ls.distinguished()[1], poly(&[(&[0, 1], 1)]));
        assert_eq!(ls.distinguished()[2], poly(&[(&[1, 0], 1)]));
    }

    #[test]
    fn dependent_basis_is_rejected() {
        let basis = vec![poly(&[(&[1, 0], 1)]), poly(&[(&[1, 0], 2)]), poly(&[(&[0, 1], 1)])];
        let space = SectionSpace::new(1, 2, basis).unwrap();
        assert!(matches!(eliminate(&OrderSpec::Lex, &space), Err(Error::LinearlyDependent { index: 1 })));
    }

    #[test]
    fn distinguished_shape_and_stability() {
        let basis = vec![
            poly(&[(&[0, 1], 1), (&[2, 0], 1)]),
            poly(&[(&[0, 1], 3), (&[1, 1], 1), (&[0, 0], 1)]),
            poly(&[(&[2, 0], 1), (&[1, 1], -2)]),
            poly(&[(&[0, 2], 1), (&[2, 0], 5)]),
        ];
        let space = SectionSpace::new(2, 2, basis).unwrap();
        for order in [OrderSpec::Lex, OrderSpec::DegLex, OrderSpec::Weight(vec![1, 3])] {
            let ls = eliminate(&order, &space).unwrap();
            assert_eq!(ls.len(), 4);
            for (a, s) in ls.exponents().iter().zip(ls.distinguished()) {
                assert_eq!(s.valuation(&order).unwrap(), *a);
                assert!(s.coeff(a).is_one());
                for b in s.support() {
                    assert!(b == a || (order.less(a, b) && !ls.contains(b)));
                }
            }
            assert_eq!(eliminate(&order, &ls.as_space()).unwrap(), ls);
        }
    }

    fn random_poly(n: usize) -> impl Strategy<Value = PolySection> {
        proptest::collection::vec((proptest::collection::vec(0u32..4, n), -3i64..4), 1..5)
            .prop_map(move |ts| PolySection::from_terms(n, ts.into_iter().map(|(x, c)| (Exponent::new(x), q(c)))).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn valuation_is_additive((s, t) in (1usize..4).prop_flat_map(|n| (random_poly(n), random_poly(n)))) {
            prop_assume!(!s.is_zero() && !t.is_zero());
            for order in [OrderSpec::Lex, OrderSpec::DegLex, OrderSpec::Weight(vec![2; s.nvars()])] {
                let st = s.mul(&t);
                prop_assert_eq!(
                    st.valuation(&order).unwrap(),
                    &s.valuation(&order).unwrap() + &t.valuation(&order).unwrap()
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn cardinality_matches_rank_oracle(basis in proptest::collection::vec(random_poly(2), 1..6)) {
            let nonzero: Vec<PolySection> = basis.into_iter().filter(|s| !s.is_zero()).collect();
            prop_assume!(!nonzero.is_empty());
            let space = SectionSpace::new(1, 2, nonzero.clone()).unwrap();
            let rows: Vec<Vec<Q>> = {
                let cols: BTreeSet<Exponent> = nonzero.iter().flat_map(|s| s.support().cloned()).collect();
                nonzero.iter().map(|s| cols.iter().map(|c| s.coeff(c)).collect()).collect()
            };
            match eliminate(&OrderSpec::DegLex, &space) {
                Ok(ls) => {
                    prop_assert_eq!(rank(&rows), nonzero.len());
                    prop_assert_eq!(ls.len(), nonzero.len());
                    prop_assert_eq!(ls.exponent_set(), leading_exponents_by_rank(&OrderSpec::DegLex, &nonzero));
                }
                Err(Error::LinearlyDependent { .. }) => prop_assert!(rank(&rows) < nonzero.len()),
                Err(other) => prop_assert!(false, "unexpected error {other}"),
            }
        }
    }
}
