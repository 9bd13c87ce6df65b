//! Sparse multivariate polynomials with rational coefficients.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::exactla::{format_rational, Rational};

/// Sorted `(variable, exponent)` pairs with positive exponents.
pub type Monomial = Vec<(usize, u32)>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<usize, u32> = a.iter().copied().collect();
    for &(v, e) in b {
        *out.entry(v).or_insert(0) += e;
    }
    out.into_iter().collect()
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(q: Rational) -> Self {
        let mut p = Poly::zero();
        if !q.is_zero() {
            p.terms.insert(Vec::new(), q);
        }
        p
    }

    pub fn var(i: usize) -> Self {
        Poly {
            terms: BTreeMap::from([(vec![(i, 1)], Rational::one())]),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(mono_mul(a, b), &(x * y));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::constant(Rational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&(_, e)| e).sum())
            .max()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        (self.degree().unwrap_or(0) == 0).then(|| self.constant_term())
    }

    /// Coefficient of the monomial `x_i`.
    pub fn linear_coefficient(&self, i: usize) -> Rational {
        self.terms
            .get(&vec![(i, 1)])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|&(v, _)| v))
            .collect()
    }

    /// Does `x_i` occur in any term other than the linear one?
    pub fn occurs_nonlinearly(&self, i: usize) -> bool {
        self.terms
            .keys()
            .any(|m| m.iter().any(|&(v, _)| v == i) && m.as_slice() != [(i, 1)])
    }

    pub fn substitute(&self, var: usize, value: &Poly) -> Poly {
        if !self.terms.keys().any(|m| m.iter().any(|&(v, _)| v == var)) {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            match m.iter().find(|&&(v, _)| v == var) {
                None => out.add_term(m.clone(), c),
                Some(&(_, e)) => {
                    let rest: Monomial = m.iter().copied().filter(|&(v, _)| v != var).collect();
                    let base = Poly {
                        terms: BTreeMap::from([(rest, c.clone())]),
                    };
                    out = out.add(&base.mul(&value.pow(e)));
                }
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m {
                for _ in 0..e {
                    t *= &point[v];
                }
            }
            acc += t;
        }
        acc
    }

    /// Renders with the given variable names, highest-degree terms first.
    pub fn format_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().map(|&(_, e)| e).sum();
            let db: u32 = b.0.iter().map(|&(_, e)| e).sum();
            db.cmp(&da).then_with(|| a.0.cmp(b.0))
        });
        let mut out = String::new();
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = *c < Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let vars = m
                .iter()
                .map(|&(v, e)| {
                    if e == 1 {
                        name(v)
                    } else {
                        format!("{}^{e}", name(v))
                    }
                })
                .collect::<Vec<_>>()
                .join("*");
            if vars.is_empty() {
                out.push_str(&format_rational(&abs));
            } else if abs.is_one() {
                out.push_str(&vars);
            } else {
                out.push_str(&format!("{}*{vars}", format_rational(&abs)));
            }
        }
        out
    }
}
