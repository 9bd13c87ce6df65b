//! Laurent-polynomial 1-cocycles of the multiplicative group over a
//! coefficient algebra `A`, acting on `A` through the character `t ↦ t^d`.
//!
//! A cocycle satisfies `f(t⊗t) = f(t⊗1) + (t^d⊗1)·f(1⊗t)`. Writing
//! `f = Σ a_n t^n`, the coefficient of `t^m⊗t^n` in
//! `lhs − rhs` is `[m=n]·a_m − [n=0]·a_m − [m=d]·a_n`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::exactla::{
    kernel_image, rat, span_rank, unit_vec, AlgebraElement, CoefficientAlgebra, ExactError, Matrix,
    Rational,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GmError {
    #[error("exponent {exponent} exceeds the declared bound {bound}")]
    ExponentOutOfRange { exponent: i64, bound: i64 },
    #[error("not a cocycle: coefficients of t^{}⊗t^{} differ", .0.0, .0.1)]
    NotCocycle((i64, i64)),
    #[error("degree bound {bound} is smaller than |d| = {d}")]
    BoundTooSmall { bound: i64, d: i64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `Σ a_n t^n` with `|n| ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    algebra: Arc<CoefficientAlgebra>,
    bound: i64,
    coeffs: BTreeMap<i64, AlgebraElement>,
}

impl LaurentPoly {
    pub fn zero(algebra: &Arc<CoefficientAlgebra>, bound: i64) -> Self {
        LaurentPoly {
            algebra: Arc::clone(algebra),
            bound: bound.abs(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        algebra: &Arc<CoefficientAlgebra>,
        bound: i64,
        terms: impl IntoIterator<Item = (i64, AlgebraElement)>,
    ) -> Result<Self, GmError> {
        let mut p = Self::zero(algebra, bound);
        for (n, a) in terms {
            p.add_term(n, &a)?;
        }
        Ok(p)
    }

    /// `a(t^d − 1)`.
    pub fn coboundary(a: &AlgebraElement, d: i64, bound: i64) -> Result<Self, GmError> {
        let alg = Arc::clone(a.algebra());
        Self::from_terms(&alg, bound, [(d, a.clone()), (0, a.scale(&-rat(1)))])
    }

    pub fn add_term(&mut self, n: i64, a: &AlgebraElement) -> Result<(), GmError> {
        if n.abs() > self.bound {
            return Err(GmError::ExponentOutOfRange {
                exponent: n,
                bound: self.bound,
            });
        }
        let sum = match self.coeffs.get(&n) {
            Some(old) => old.add(a)?,
            None => AlgebraElement::zero(&self.algebra).add(a)?,
        };
        if sum.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, sum);
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<CoefficientAlgebra> {
        &self.algebra
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn coefficient(&self, n: i64) -> AlgebraElement {
        self.coeffs
            .get(&n)
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(&self.algebra))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (&i64, &AlgebraElement)> {
        self.coeffs.iter()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(n, a)| match n {
                0 => format!("({a})"),
                1 => format!("({a})*t"),
                _ => format!("({a})*t^{n}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn defect_at(f: &LaurentPoly, d: i64, m: i64, n: i64) -> Result<AlgebraElement, GmError> {
    let mut acc = AlgebraElement::zero(&f.algebra);
    if m == n {
        acc = acc.add(&f.coefficient(m))?;
    }
    if n == 0 {
        acc = acc.sub(&f.coefficient(m))?;
    }
    if m == d {
        acc = acc.sub(&f.coefficient(n))?;
    }
    Ok(acc)
}

/// Order in which coefficient pairs are compared: the diagonal by
/// ascending exponent, then the off-diagonal pairs lexicographically.
fn scan_order(range: i64) -> impl Iterator<Item = (i64, i64)> {
    let diag = (-range..=range).map(|m| (m, m));
    let off = (-range..=range).flat_map(move |m| {
        (-range..=range)
            .filter(move |&n| n != m)
            .map(move |n| (m, n))
    });
    diag.chain(off)
}

/// Outcome of comparing both sides of the cocycle identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleCheck {
    pub holds: bool,
    /// First `(m, n)` whose `t^m⊗t^n` coefficients differ.
    pub mismatch: Option<(i64, i64)>,
}

pub fn is_cocycle(f: &LaurentPoly, d: i64) -> CocycleCheck {
    let range = f.bound.max(d.abs());
    for (m, n) in scan_order(range) {
        if !defect_at(f, d, m, n).expect("same parent").is_zero() {
            return CocycleCheck {
                holds: false,
                mismatch: Some((m, n)),
            };
        }
    }
    CocycleCheck {
        holds: true,
        mismatch: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// `f = a(t^d − 1)`.
    Coboundary(AlgebraElement),
    /// `d = 0`, where the only cocycle is zero.
    Zero,
}

/// Writes a cocycle as a coboundary.
pub fn reduce_to_coboundary(f: &LaurentPoly, d: i64) -> Result<Reduction, GmError> {
    if let Some(w) = is_cocycle(f, d).mismatch {
        return Err(GmError::NotCocycle(w));
    }
    if d == 0 {
        debug_assert!(f.is_zero());
        return Ok(Reduction::Zero);
    }
    let a = f.coefficient(d);
    debug_assert_eq!(LaurentPoly::coboundary(&a, d, f.bound).as_ref(), Ok(f));
    Ok(Reduction::Coboundary(a))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingCheck {
    pub d: i64,
    pub bound: i64,
    pub algebra: String,
    /// Dimensions over ℚ.
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub verified: bool,
}

/// Solves the cocycle condition on `a_{−D}..a_D` as a linear system over ℚ
/// (each coefficient split into its algebra components) and compares the
/// solution space with the coboundaries `a(t^d − 1)`.
pub fn h1_vanishing_check(
    d: i64,
    bound: i64,
    algebra: &CoefficientAlgebra,
) -> Result<VanishingCheck, GmError> {
    if bound < d.abs() {
        return Err(GmError::BoundTooSmall { bound, d: d.abs() });
    }
    let k = algebra.dim();
    let width = (2 * bound + 1) as usize;
    let var = |n: i64, r: usize| (n + bound) as usize * k + r;
    let one = rat(1);
    let mut rows = Vec::new();
    for (m, n) in scan_order(bound) {
        for r in 0..k {
            let mut row = vec![rat(0); width * k];
            if m == n {
                row[var(m, r)] += &one;
            }
            if n == 0 {
                row[var(m, r)] -= &one;
            }
            if m == d {
                row[var(n, r)] -= &one;
            }
            if row.iter().any(|x| *x != rat(0)) {
                rows.push(row);
            }
        }
    }
    let cocycles = if rows.is_empty() {
        (0..width * k).map(|i| unit_vec(width * k, i)).collect()
    } else {
        kernel_image(&Matrix::from_rows(rows.clone())?).kernel
    };
    let coboundaries: Vec<Vec<Rational>> = if d == 0 {
        Vec::new()
    } else {
        (0..k)
            .map(|r| {
                let mut v = vec![rat(0); width * k];
                v[var(d, r)] = one.clone();
                v[var(0, r)] = -one.clone();
                v
            })
            .collect()
    };
    let inside = coboundaries.iter().all(|b| {
        rows.iter()
            .all(|row| row.iter().zip(b).map(|(x, y)| x * y).sum::<Rational>() == rat(0))
    });
    let coboundary_dim = span_rank(width * k, &coboundaries);
    let cocycle_dim = cocycles.len();
    Ok(VanishingCheck {
        d,
        bound,
        algebra: algebra.name().to_string(),
        cocycle_dim,
        coboundary_dim,
        verified: inside && cocycle_dim == coboundary_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Arc<CoefficientAlgebra> {
        Arc::new(CoefficientAlgebra::rationals())
    }

    fn scalar(alg: &Arc<CoefficientAlgebra>, n: i64) -> AlgebraElement {
        AlgebraElement::from_rational(alg, &rat(n))
    }

    #[test]
    fn coboundary_examples() {
        let alg = q();
        let f = LaurentPoly::from_terms(&alg, 3, [(3, scalar(&alg, 5)), (0, scalar(&alg, -5))])
            .unwrap();
        assert!(is_cocycle(&f, 3).holds);
        assert_eq!(
            reduce_to_coboundary(&f, 3),
            Ok(Reduction::Coboundary(scalar(&alg, 5)))
        );
        assert!(is_cocycle(&LaurentPoly::zero(&alg, 4), 2).holds);
        assert_eq!(
            reduce_to_coboundary(&LaurentPoly::zero(&alg, 4), 0),
            Ok(Reduction::Zero)
        );
    }

    #[test]
    fn mismatch_witness() {
        let alg = q();
        let f = LaurentPoly::from_terms(&alg, 2, [(1, scalar(&alg, 1))]).unwrap();
        let c = is_cocycle(&f, 2);
        assert_eq!(
            c,
            CocycleCheck {
                holds: false,
                mismatch: Some((1, 1))
            }
        );
        assert_eq!(
            reduce_to_coboundary(&f, 2),
            Err(GmError::NotCocycle((1, 1)))
        );
    }

    #[test]
    fn dual_number_coboundary() {
        let alg = Arc::new(CoefficientAlgebra::dual_numbers());
        let eps = AlgebraElement::new(&alg, vec![rat(0), rat(1)]).unwrap();
        let f = LaurentPoly::coboundary(&eps, -2, 3).unwrap();
        assert_eq!(reduce_to_coboundary(&f, -2), Ok(Reduction::Coboundary(eps)));
    }

    #[test]
    fn vanishing_examples() {
        let r = h1_vanishing_check(2, 10, &CoefficientAlgebra::rationals()).unwrap();
        assert!(r.verified);
        assert_eq!((r.cocycle_dim, r.coboundary_dim), (1, 1));
        let r = h1_vanishing_check(0, 10, &CoefficientAlgebra::rationals()).unwrap();
        assert!(r.verified);
        assert_eq!((r.cocycle_dim, r.coboundary_dim), (0, 0));
        let r = h1_vanishing_check(1, 5, &CoefficientAlgebra::dual_numbers()).unwrap();
        assert_eq!((r.cocycle_dim, r.coboundary_dim, r.verified), (2, 2, true));
        assert!(matches!(
            h1_vanishing_check(4, 3, &CoefficientAlgebra::rationals()),
            Err(GmError::BoundTooSmall { .. })
        ));
    }

    #[test]
    fn out_of_range_exponent() {
        let alg = q();
        assert!(LaurentPoly::from_terms(&alg, 1, [(2, scalar(&alg, 1))]).is_err());
    }
}
