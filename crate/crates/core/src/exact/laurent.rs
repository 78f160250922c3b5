use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Sparse multivariate Laurent polynomial over the rationals.
///
/// Exponents are signed; which variables may actually carry negative
/// exponents is a geometry-level rule enforced by the tensor layer, not here.
/// Invariant: no zero coefficients are stored, every key has length `nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, Rational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The variable x_i (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, {
            let mut e = vec![0; nvars];
            e[i] = 1;
            e
        }, Rational::one())
    }

    pub fn monomial(nvars: usize, exps: Vec<i32>, c: Rational) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True if some exponent of variable `i` is negative anywhere.
    pub fn has_negative_exponent(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] < 0)
    }

    pub fn total_degree(&self) -> i32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::MismatchedVariables(self.nvars, other.nvars));
        }
        Ok(())
    }

    fn insert_add(terms: &mut BTreeMap<Vec<i32>, Rational>, e: Vec<i32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            Self::insert_add(&mut terms, e.clone(), c.clone());
        }
        Ok(LaurentPoly { nvars: self.nvars, terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                Self::insert_add(&mut terms, e, ca.clone() * cb.clone());
            }
        }
        Ok(LaurentPoly { nvars: self.nvars, terms })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.clone() * c.clone())).collect(),
        }
    }

    /// d/dx_i. Negative exponents differentiate like any power.
    pub fn derivative(&self, i: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[i];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] = k - 1;
            Self::insert_add(&mut terms, e2, c.clone() * Rational::from_integer(k.into()));
        }
        LaurentPoly { nvars: self.nvars, terms }
    }

    /// Exact evaluation. Errors if a variable with a negative exponent is zero
    /// at the point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if point[i].is_zero() && k < 0 {
                    return Err(Error::EvalAtBoundary(format_rational(&point[i])));
                }
                let p = pow_rat(&point[i], k);
                t *= p;
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitute x_i -> x_i * factor^k ... not needed; instead: multiply by a
    /// pure power of variable `i` (used for metric factors y^±2).
    pub fn mul_var_pow(&self, i: usize, k: i32) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[i] += k;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Render with the given variable names, grammar-compatible
    /// (explicit `*`, `^` powers, `+`/`-` between terms).
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // descending key order gives a stable, human-friendly term order
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.iter().all(|&k| k == 0) {
                factors.push(format_rational(&mag));
            }
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if k == 1 {
                    factors.push(names[i].clone());
                } else {
                    factors.push(format!("{}^{}", names[i], k));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

fn pow_rat(base: &Rational, k: i32) -> Rational {
    if k >= 0 {
        num_traits::pow::pow(base.clone(), k as usize)
    } else {
        num_traits::pow::pow(base.clone(), (-k) as usize).recip()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}
