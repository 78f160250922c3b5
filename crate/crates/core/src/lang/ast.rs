use crate::exact::ncpoly::NCPoly;
use crate::exact::rational::{format_rational, Rational};
use std::fmt;

/// Generator symbols of the operator language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gen {
    G,
    Tr,
    BigN,
    Ncal,
    C,
    Kappa,
    Grad,
    Div,
    Gradt,
    Divt,
    Box,
    LittleC,
}

impl Gen {
    pub fn name(self) -> &'static str {
        match self {
            Gen::G => "g",
            Gen::Tr => "tr",
            Gen::BigN => "N",
            Gen::Ncal => "Ncal",
            Gen::C => "C",
            Gen::Kappa => "kappa",
            Gen::Grad => "grad",
            Gen::Div => "div",
            Gen::Gradt => "gradt",
            Gen::Divt => "divt",
            Gen::Box => "box",
            Gen::LittleC => "c",
        }
    }

    pub fn from_name(s: &str) -> Option<Gen> {
        Some(match s {
            "g" => Gen::G,
            "tr" => Gen::Tr,
            "N" => Gen::BigN,
            "Ncal" => Gen::Ncal,
            "C" => Gen::C,
            "kappa" => Gen::Kappa,
            "grad" => Gen::Grad,
            "div" => Gen::Div,
            "gradt" => Gen::Gradt,
            "divt" => Gen::Divt,
            "box" => Gen::Box,
            "c" => Gen::LittleC,
            _ => return None,
        })
    }
}

/// Operator expression. Juxtaposition composes: `Mul([A, B])` applies B
/// first. `Inv` carries a polynomial in (Ncal, C) only.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Rat(Rational),
    Gen(Gen),
    Inv(NCPoly),
    Pow(std::boxed::Box<Expr>, u32),
    Mul(Vec<Expr>),
    /// Signed summands; `true` means subtracted.
    Sum(Vec<(bool, Expr)>),
}

impl Expr {
    fn needs_parens_in_product(&self) -> bool {
        matches!(self, Expr::Sum(_))
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.needs_parens_in_product() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Rat(q) => write!(f, "{}", format_rational(q)),
            Expr::Gen(g) => write!(f, "{}", g.name()),
            Expr::Inv(p) => write!(f, "inv({})", p.render()),
            Expr::Pow(b, k) => {
                if matches!(**b, Expr::Gen(_) | Expr::Rat(_) | Expr::Inv(_)) {
                    write!(f, "{b}^{k}")
                } else {
                    write!(f, "({b})^{k}")
                }
            }
            Expr::Mul(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    p.fmt_factor(f)?;
                }
                Ok(())
            }
            Expr::Sum(parts) => {
                for (i, (negated, p)) in parts.iter().enumerate() {
                    if i == 0 {
                        if *negated {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, "{}", if *negated { " - " } else { " + " })?;
                    }
                    p.fmt_factor(f)?;
                }
                Ok(())
            }
        }
    }
}
