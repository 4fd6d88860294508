//! Additive total orders on `ℕ^n` and separating weight vectors.
//!
//! Three families are supported: lexicographic, degree-lexicographic and
//! weight orders (ties broken lexicographically, so every order is total).
//! All of them are compatible with addition: `a < b ⇒ a + c < b + c`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A lattice point of `ℕ^n`.
///
/// The derived `Ord` is the lexicographic order, which is also the order
/// used for byte-stable file output.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(coords: Vec<u32>) -> Self {
        Exponent(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Exponent(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    pub fn dot(&self, w: &[u64]) -> u64 {
        self.0.iter().zip(w).map(|(&a, &b)| a as u64 * b).sum()
    }

    /// `self - other` when the difference stays in `ℕ^n`.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(Exponent)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }
}

impl Add for &Exponent {
    type Output = Exponent;

    fn add(self, rhs: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Which additive order valuations are taken with respect to.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum OrderSpec {
    Lex,
    DegLex,
    /// Compare `α·w` first, then lexicographically.
    Weight(Vec<u64>),
}

impl OrderSpec {
    pub fn weight(w: Vec<u64>) -> Result<Self> {
        if w.is_empty() || w.contains(&0) {
            return Err(Error::InvalidOrder(format!("weight {w:?} must have positive entries")));
        }
        Ok(OrderSpec::Weight(w))
    }

    /// Compares two exponents. Errors when their dimensions differ (or differ
    /// from the weight length).
    pub fn compare(&self, a: &Exponent, b: &Exponent) -> Result<Ordering> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
        }
        if let OrderSpec::Weight(w) = self {
            if w.len() != a.dim() {
                return Err(Error::DimensionMismatch { expected: w.len(), got: a.dim() });
            }
        }
        Ok(self.cmp(a, b))
    }

    /// Unchecked comparison; callers guarantee matching dimensions.
    pub fn cmp(&self, a: &Exponent, b: &Exponent) -> Ordering {
        debug_assert_eq!(a.dim(), b.dim());
        match self {
            OrderSpec::Lex => a.0.cmp(&b.0),
            OrderSpec::DegLex => a.degree().cmp(&b.degree()).then_with(|| a.0.cmp(&b.0)),
            OrderSpec::Weight(w) => a.dot(w).cmp(&b.dot(w)).then_with(|| a.0.cmp(&b.0)),
        }
    }

    pub fn less(&self, a: &Exponent, b: &Exponent) -> bool {
        self.cmp(a, b) == Ordering::Less
    }

    /// The order-minimal element of a nonempty iterator.
    pub fn min<'a>(&self, it: impl IntoIterator<Item = &'a Exponent>) -> Option<&'a Exponent> {
        it.into_iter().min_by(|a, b| self.cmp(a, b))
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderSpec::Lex => write!(f, "lex"),
            OrderSpec::DegLex => write!(f, "deglex"),
            OrderSpec::Weight(w) => {
                let parts: Vec<String> = w.iter().map(u64::to_string).collect();
                write!(f, "weight:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for OrderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lex" => Ok(OrderSpec::Lex),
            "deglex" => Ok(OrderSpec::DegLex),
            other => {
                let Some(rest) = other.strip_prefix("weight:") else {
                    return Err(Error::InvalidOrder(s.to_string()));
                };
                let w = rest
                    .split(',')
                    .map(|t| t.trim().parse::<u64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidOrder(s.to_string()))?;
                OrderSpec::weight(w)
            }
        }
    }
}

/// The constant `C = 1 + max |α|` of the separating-weight construction.
pub fn separation_constant(set: &[Exponent]) -> Result<u64> {
    set.iter().map(Exponent::degree).max().map(|m| m + 1).ok_or(Error::EmptyExponentSet)
}

/// `Σ_i (2C)^{n-i} e_i`, the weight that separates `set` from everything
/// lexicographically above it.
fn lex_separating_weight(n: usize, c: u64) -> Vec<u64> {
    (1..=n).map(|i| (2 * c).pow((n - i) as u32)).collect()
}

/// A positive weight `γ` such that `α < β ⇒ α·γ < β·γ` for all `α ∈ set`
/// and all `β ∈ ℕ^n`, with `<` the given base order.
///
/// For `lex` this is `Σ_i (2C)^{n-i} e_i` with `C = 1 + max|α|`. For the
/// other orders the lex weight is added to a large multiple of the order's
/// leading grading (`(1,…,1)` for deglex, `w` for a weight order), so that
/// a strictly larger grading always dominates the lex correction.
pub fn separating_weight(order: &OrderSpec, set: &[Exponent]) -> Result<Vec<u64>> {
    let c = separation_constant(set)?;
    let n = set[0].dim();
    if let Some(bad) = set.iter().find(|a| a.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
    }
    let lex = lex_separating_weight(n, c);
    let grading = match order {
        OrderSpec::Lex => return Ok(lex),
        OrderSpec::DegLex => vec![1; n],
        OrderSpec::Weight(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: w.len() });
            }
            w.clone()
        }
    };
    let m = 1 + set.iter().map(|a| a.dot(&lex)).max().unwrap_or(0);
    Ok(grading.iter().zip(&lex).map(|(g, l)| m * g + l).collect())
}

/// Exhaustive check of the separation property over the box `[0, bound]^n`.
pub fn verify_separation(order: &OrderSpec, set: &[Exponent], gamma: &[u64], bound: u32) -> bool {
    let Some(n) = set.first().map(Exponent::dim) else {
        return true;
    };
    if gamma.len() != n || set.iter().any(|a| a.dim() != n) {
        return false;
    }
    let dots: Vec<u64> = set.iter().map(|a| a.dot(gamma)).collect();
    let max_dot = dots.iter().copied().max().unwrap_or(0);
    let mut beta = vec![0u32; n];
    loop {
        let b = Exponent(beta.clone());
        let bd = b.dot(gamma);
        if bd <= max_dot {
            for (a, &ad) in set.iter().zip(&dots) {
                if bd <= ad && order.less(a, &b) {
                    return false;
                }
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return true;
            }
            if beta[i] < bound {
                beta[i] += 1;
                break;
            }
            beta[i] = 0;
            i += 1;
        }
    }
}
