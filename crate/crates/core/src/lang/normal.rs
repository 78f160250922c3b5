//! Term rewriting to the canonical ordered form
//! sum g^a gradt^b coeff(Ncal, C, box) divt^c tr^d.
//!
//! Strategy, applied per word until quiescent: merge adjacent coefficient
//! functions; push functions rightward through generators with the
//! eigen-shift substitutions; resolve the leftmost reducible generator pair
//! by its defining relation. The two trace pairings collapse to pure
//! functions, and divt gradt splits a word in two; every rule either lowers
//! the generator count or removes an order inversion, so the loop halts.

use super::ast::{Expr, Gen};
use crate::exact::ncfun::NCFun;
use crate::exact::ncpoly::NCPoly;
use crate::exact::rational::{rat, rat_i};
use num_traits::One;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureClass {
    Flat,
    ConstantCurvature,
}

/// Monomial key (g-power, gradt-power, divt-power, tr-power); the
/// coefficient sits in the center, between gradt and divt.
pub type MonoKey = (u32, u32, u32, u32);

#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub dim: u32,
    pub class: CurvatureClass,
    pub monos: BTreeMap<MonoKey, NCFun>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WGen {
    G = 0,
    Gradt = 1,
    Divt = 2,
    Tr = 3,
}

#[derive(Debug, Clone)]
enum Atom {
    Gen(WGen),
    Fun(NCFun),
}

type Word = Vec<Atom>;

/// Ncal + C + k.
fn ncpc(k: i64) -> NCPoly {
    NCPoly::ncal().add(&NCPoly::ccal()).add(&NCPoly::constant(rat_i(k)))
}

/// Ncal - C + k.
fn nmc(k: i64) -> NCPoly {
    NCPoly::ncal().sub(&NCPoly::ccal()).add(&NCPoly::constant(rat_i(k)))
}

fn fun(num: NCPoly, den: NCPoly) -> NCFun {
    NCFun::new(num, den).expect("structurally nonzero denominator")
}

struct Rules {
    /// tr g
    tr_g: NCFun,
    /// g tr
    g_tr: NCFun,
    /// (Ncal+C-1)/(Ncal+C+1)
    q2: NCFun,
    /// (Ncal+C+1)(Ncal+C-3)/(Ncal+C-1)^2
    q3: NCFun,
    /// leading coefficient of the divt gradt exchange
    f_swap: NCFun,
    /// companion term of the divt gradt exchange, includes the wave bracket
    g_bracket: NCFun,
    /// (Ncal+C-1)/(2C)
    inv1: NCFun,
    /// (Ncal+C-1)/(2C(Ncal+C+1))
    inv2: NCFun,
}

impl Rules {
    fn for_dim(dim: u32, class: CurvatureClass) -> Rules {
        let rho = match class {
            CurvatureClass::Flat => NCPoly::zero(),
            CurvatureClass::ConstantCurvature => {
                // (C + n/2 - 1)(C - n/2 + 1) = C^2 - ((n-2)/2)^2
                let half = rat(dim as i64 - 2, 2);
                NCPoly::ccal().mul(&NCPoly::ccal()).sub(&NCPoly::constant(half.clone() * half))
            }
        };
        let c2 = NCPoly::ccal().mul(&NCPoly::ccal());
        Rules {
            tr_g: fun(ncpc(1).mul(&nmc(1)), NCPoly::one()),
            g_tr: fun(ncpc(-1).mul(&nmc(-1)), NCPoly::one()),
            q2: fun(ncpc(-1), ncpc(1)),
            q3: fun(ncpc(1).mul(&ncpc(-3)), ncpc(-1).mul(&ncpc(-1))),
            f_swap: fun(
                c2.mul(&ncpc(1)).mul(&ncpc(-3)).mul(&ncpc(-3)),
                NCPoly::ccal()
                    .add(&NCPoly::one())
                    .mul(&NCPoly::ccal().sub(&NCPoly::one()))
                    .mul(&ncpc(-1))
                    .mul(&ncpc(-1))
                    .mul(&ncpc(-1)),
            ),
            g_bracket: fun(
                c2.mul(&ncpc(1)).scale(&rat_i(2)),
                NCPoly::ccal().add(&NCPoly::one()).mul(&ncpc(-1)).mul(&ncpc(-1)),
            )
            .mul(&fun(NCPoly::boxsym().sub(&rho.scale(&rat_i(2))), NCPoly::one())),
            inv1: fun(ncpc(-1), NCPoly::ccal().scale(&rat_i(2))),
            inv2: fun(ncpc(-1), NCPoly::ccal().scale(&rat_i(2)).mul(&ncpc(1))),
        }
    }
}

/// Eigen-shift for pushing a function rightward through a generator:
/// f X = X f(Ncal+a, C+b).
fn gen_shift(x: WGen) -> (i64, i64) {
    match x {
        WGen::G => (2, 0),
        WGen::Tr => (-2, 0),
        WGen::Gradt => (1, 1),
        WGen::Divt => (-1, -1),
    }
}

fn words_mul(a: &[Word], b: &[Word]) -> Vec<Word> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for wa in a {
        for wb in b {
            let mut w = wa.clone();
            w.extend(wb.iter().cloned());
            out.push(w);
        }
    }
    out
}

/// Stage one: replace eliminable generators, leaving words over
/// {g, gradt, divt, tr} and coefficient functions.
fn expr_to_words(e: &Expr, dim: u32, rules: &Rules) -> Vec<Word> {
    match e {
        Expr::Rat(q) => vec![vec![Atom::Fun(NCFun::constant(q.clone()))]],
        Expr::Inv(p) => {
            vec![vec![Atom::Fun(
                NCFun::from_poly(p.clone()).inv().expect("inv of a nonzero polynomial"),
            )]]
        }
        Expr::Gen(g) => match g {
            Gen::G => vec![vec![Atom::Gen(WGen::G)]],
            Gen::Tr => vec![vec![Atom::Gen(WGen::Tr)]],
            Gen::Gradt => vec![vec![Atom::Gen(WGen::Gradt)]],
            Gen::Divt => vec![vec![Atom::Gen(WGen::Divt)]],
            Gen::Ncal => vec![vec![Atom::Fun(NCFun::from_poly(NCPoly::ncal()))]],
            Gen::C => vec![vec![Atom::Fun(NCFun::from_poly(NCPoly::ccal()))]],
            Gen::Box => vec![vec![Atom::Fun(NCFun::from_poly(NCPoly::boxsym()))]],
            Gen::BigN => {
                // N = Ncal - n/2
                let p = NCPoly::ncal().sub(&NCPoly::constant(rat(dim as i64, 2)));
                vec![vec![Atom::Fun(NCFun::from_poly(p))]]
            }
            Gen::LittleC => {
                // c = ((n-2)/2)^2 - C^2
                let half = rat(dim as i64 - 2, 2);
                let p = NCPoly::constant(half.clone() * half)
                    .sub(&NCPoly::ccal().mul(&NCPoly::ccal()));
                vec![vec![Atom::Fun(NCFun::from_poly(p))]]
            }
            Gen::Kappa => {
                // kappa = (Ncal - C - 1)/2
                let p = nmc(-1).scale(&rat(1, 2));
                vec![vec![Atom::Fun(NCFun::from_poly(p))]]
            }
            Gen::Grad => vec![
                vec![Atom::Gen(WGen::Gradt), Atom::Fun(rules.inv1.clone())],
                vec![Atom::Gen(WGen::G), Atom::Fun(rules.inv2.clone()), Atom::Gen(WGen::Divt)],
            ],
            Gen::Div => vec![
                vec![Atom::Fun(rules.inv1.clone()), Atom::Gen(WGen::Divt)],
                vec![Atom::Gen(WGen::Gradt), Atom::Fun(rules.inv2.clone()), Atom::Gen(WGen::Tr)],
            ],
        },
        Expr::Pow(b, k) => {
            let base = expr_to_words(b, dim, rules);
            let mut acc = vec![vec![]];
            for _ in 0..*k {
                acc = words_mul(&acc, &base);
            }
            acc
        }
        Expr::Mul(parts) => {
            let mut acc = vec![vec![]];
            for p in parts {
                acc = words_mul(&acc, &expr_to_words(p, dim, rules));
            }
            acc
        }
        Expr::Sum(parts) => {
            let mut acc = Vec::new();
            for (negated, p) in parts {
                for mut w in expr_to_words(p, dim, rules) {
                    if *negated {
                        w.insert(0, Atom::Fun(NCFun::constant(rat_i(-1))));
                    }
                    acc.push(w);
                }
            }
            acc
        }
    }
}

/// Stage two: normal-order one word; a divt gradt exchange spawns the
/// companion word into `spawned`.
fn reduce_word(mut w: Word, rules: &Rules, spawned: &mut Vec<Word>) -> Word {
    'scan: loop {
        for i in 0..w.len().saturating_sub(1) {
            match (&w[i], &w[i + 1]) {
                (Atom::Fun(f), Atom::Fun(h)) => {
                    let merged = f.mul(h);
                    w.splice(i..i + 2, [Atom::Fun(merged)]);
                    continue 'scan;
                }
                (Atom::Fun(f), Atom::Gen(x)) => {
                    let xg = *x;
                    let (a, b) = gen_shift(xg);
                    let shifted = f.shift(&rat_i(a), &rat_i(b));
                    w.splice(i..i + 2, [Atom::Gen(xg), Atom::Fun(shifted)]);
                    continue 'scan;
                }
                (Atom::Gen(x), Atom::Gen(y)) => {
                    let replacement: Option<Vec<Atom>> = match (x, y) {
                        (WGen::Tr, WGen::G) => Some(vec![Atom::Fun(rules.tr_g.clone())]),
                        (WGen::G, WGen::Tr) => Some(vec![Atom::Fun(rules.g_tr.clone())]),
                        (WGen::Divt, WGen::G) => Some(vec![
                            Atom::Gen(WGen::G),
                            Atom::Gen(WGen::Divt),
                            Atom::Fun(rules.q3.clone()),
                        ]),
                        (WGen::Gradt, WGen::G) => Some(vec![
                            Atom::Gen(WGen::G),
                            Atom::Gen(WGen::Gradt),
                            Atom::Fun(rules.q2.clone()),
                        ]),
                        (WGen::Tr, WGen::Gradt) => Some(vec![
                            Atom::Fun(rules.q3.clone()),
                            Atom::Gen(WGen::Gradt),
                            Atom::Gen(WGen::Tr),
                        ]),
                        (WGen::Tr, WGen::Divt) => Some(vec![
                            Atom::Fun(rules.q2.clone()),
                            Atom::Gen(WGen::Divt),
                            Atom::Gen(WGen::Tr),
                        ]),
                        (WGen::Divt, WGen::Gradt) => {
                            let mut companion = w.clone();
                            companion
                                .splice(i..i + 2, [Atom::Fun(rules.g_bracket.clone())]);
                            spawned.push(companion);
                            Some(vec![
                                Atom::Fun(rules.f_swap.clone()),
                                Atom::Gen(WGen::Gradt),
                                Atom::Gen(WGen::Divt),
                            ])
                        }
                        _ => None,
                    };
                    if let Some(r) = replacement {
                        w.splice(i..i + 2, r);
                        continue 'scan;
                    }
                }
                _ => {}
            }
        }
        return w;
    }
}

/// Rewrite an expression over the given dimension and curvature class into
/// the canonical ordered form.
pub fn normalize(e: &Expr, dim: u32, class: CurvatureClass) -> NormalForm {
    assert!(dim >= 1);
    let rules = Rules::for_dim(dim, class);
    let mut work = expr_to_words(e, dim, &rules);
    let mut monos: BTreeMap<MonoKey, NCFun> = BTreeMap::new();
    while let Some(w) = work.pop() {
        let finished = reduce_word(w, &rules, &mut work);
        let (mut a, mut b, mut c, mut d) = (0u32, 0u32, 0u32, 0u32);
        let mut coeff = NCFun::one();
        for atom in finished {
            match atom {
                Atom::Gen(WGen::G) => a += 1,
                Atom::Gen(WGen::Gradt) => b += 1,
                Atom::Gen(WGen::Divt) => c += 1,
                Atom::Gen(WGen::Tr) => d += 1,
                Atom::Fun(f) => coeff = coeff.mul(&f),
            }
        }
        // the trailing source-side coefficient, restated at the center
        let center = coeff.shift(&rat_i((c + 2 * d) as i64), &rat_i(c as i64));
        let entry = monos.entry((a, b, c, d)).or_insert_with(NCFun::zero);
        *entry = entry.add(&center);
    }
    monos.retain(|_, f| !f.is_zero());
    NormalForm { dim, class, monos }
}

/// Formal equality of normal forms.
pub fn nf_equal(a: &NormalForm, b: &NormalForm) -> bool {
    a == b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdDegree {
    Degree(u32),
    Inhomogeneous,
}

/// Derivative-counting grading: each monomial weighs gradt and divt once and
/// every wave-operator power twice; g, tr and the (Ncal, C) functions weigh
/// nothing.
pub fn ord_degree(nf: &NormalForm) -> OrdDegree {
    let mut seen: Option<u32> = None;
    for ((_, b, c, _), f) in &nf.monos {
        let num = f.num();
        let top = num.box_degree();
        for j in 0..top {
            if !num.box_slice(j).is_zero() {
                return OrdDegree::Inhomogeneous;
            }
        }
        let deg = b + c + 2 * top;
        match seen {
            None => seen = Some(deg),
            Some(d0) if d0 != deg => return OrdDegree::Inhomogeneous,
            _ => {}
        }
    }
    OrdDegree::Degree(seen.unwrap_or(0))
}

impl NormalForm {
    pub fn is_zero(&self) -> bool {
        self.monos.is_empty()
    }

    /// Grammar-compatible rendering; `normalize(parse(render()))` reproduces
    /// the normal form.
    pub fn render(&self) -> String {
        if self.monos.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, ((a, b, c, d), f)) in self.monos.iter().enumerate() {
            let negative = f
                .num()
                .leading_coeff()
                .map(|q| q.is_negative())
                .unwrap_or(false);
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = if negative { f.neg() } else { f.clone() };
            let mut parts: Vec<String> = Vec::new();
            let push_pow = |parts: &mut Vec<String>, name: &str, k: u32| {
                if k == 1 {
                    parts.push(name.to_string());
                } else if k > 1 {
                    parts.push(format!("{name}^{k}"));
                }
            };
            push_pow(&mut parts, "g", *a);
            push_pow(&mut parts, "gradt", *b);
            if let Some(q) = mag.as_constant() {
                if !q.is_one() || (*a, *b, *c, *d) == (0, 0, 0, 0) {
                    // keep the scalar in center position
                    let pos = parts.len();
                    parts.insert(pos, crate::exact::rational::format_rational(&q));
                }
            } else if mag.is_polynomial() {
                parts.push(format!("({})", mag.num().render()));
            } else {
                parts.push(format!("({}) inv({})", mag.num().render(), mag.den().render()));
            }
            push_pow(&mut parts, "divt", *c);
            push_pow(&mut parts, "tr", *d);
            out.push_str(&parts.join(" "));
        }
        out
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}
