use crate::error::{Error, Result};
use crate::exact::ncpoly::{gcd_boxfree, NCPoly};
use crate::exact::rational::Rational;
use num_traits::{One, Zero};
use std::fmt;

/// Rational function in (Ncal, C) whose numerator may also carry the central
/// symbol box polynomially. Always held in canonical form:
/// - denominator box-free and nonzero,
/// - gcd(num, den) = 1 (box treated as a transparent coefficient),
/// - denominator's lex-leading coefficient (Ncal > C) is 1,
/// - zero is 0/1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCFun {
    num: NCPoly,
    den: NCPoly,
}

impl NCFun {
    pub fn from_poly(num: NCPoly) -> Self {
        NCFun { num, den: NCPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(NCPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(NCPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(NCPoly::constant(c))
    }

    pub fn new(num: NCPoly, den: NCPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !den.is_box_free() {
            // box is invertible nowhere; keep it upstairs
            return Err(Error::BoxSymbolPresent);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: NCPoly, den: NCPoly) -> Self {
        if num.is_zero() {
            return NCFun { num, den: NCPoly::one() };
        }
        // shared factor across the denominator and every box-slice of the
        // numerator
        let mut g = den.clone();
        for j in 0..=num.box_degree() {
            let slice = num.box_slice(j);
            if slice.is_zero() {
                continue;
            }
            g = gcd_boxfree(&g, &slice);
            if g.is_constant() {
                break;
            }
        }
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff().expect("nonzero denominator").clone();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        NCFun { num, den }
    }

    pub fn num(&self) -> &NCPoly {
        &self.num
    }

    pub fn den(&self) -> &NCPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_box_free(&self) -> bool {
        self.num.is_box_free()
    }

    /// Constant value if the function is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::reduce(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        NCFun { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::reduce(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::reduce(self.num.scale(c), self.den.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !self.num.is_box_free() {
            return Err(Error::BoxSymbolPresent);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        // canonical inputs stay canonical under powering
        NCFun { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Substitute Ncal -> Ncal + a, C -> C + b.
    pub fn shift(&self, a: &Rational, b: &Rational) -> Self {
        Self::reduce(self.num.shift(a, b), self.den.shift(a, b))
    }

    /// Value at a spectral point. The numerator may carry box; the result is
    /// the list of box^j coefficients (a plain value has length <= 1).
    /// Errors if the denominator vanishes there.
    pub fn eval_box_coeffs(&self, ncal: &Rational, ccal: &Rational) -> Result<Vec<Rational>> {
        let d = self.den.eval(ncal, ccal);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut out = Vec::new();
        for j in 0..=self.num.box_degree() {
            out.push(self.num.box_slice(j).eval(ncal, ccal) / d.clone());
        }
        while out.last().map(|c| c.is_zero()).unwrap_or(false) {
            out.pop();
        }
        Ok(out)
    }

    /// Box-free evaluation to a single rational.
    pub fn eval(&self, ncal: &Rational, ccal: &Rational) -> Result<Rational> {
        if !self.is_box_free() {
            return Err(Error::BoxSymbolPresent);
        }
        let v = self.eval_box_coeffs(ncal, ccal)?;
        Ok(v.into_iter().next().unwrap_or_else(Rational::zero))
    }
}

impl fmt::Display for NCFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num.render())
        } else {
            write!(f, "({}) / ({})", self.num.render(), self.den.render())
        }
    }
}
