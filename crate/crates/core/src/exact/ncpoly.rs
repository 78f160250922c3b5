use crate::exact::rational::{format_rational, rat_i, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Polynomial in the commuting symbols Ncal, C and the central symbol box,
/// with rational coefficients. Key = (deg Ncal, deg C, deg box); tuple order
/// makes BTreeMap iteration the lex order with Ncal > C > box, so
/// `last_key_value` is the lex-leading term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NCPoly {
    terms: BTreeMap<(u32, u32, u32), Rational>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert((0, 0, 0), c);
        }
        p
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn ncal() -> Self {
        Self::term(1, 0, 0, Rational::one())
    }

    pub fn ccal() -> Self {
        Self::term(0, 1, 0, Rational::one())
    }

    pub fn boxsym() -> Self {
        Self::term(0, 0, 1, Rational::one())
    }

    pub fn term(n: u32, c: u32, b: u32, coeff: Rational) -> Self {
        let mut p = Self::zero();
        if !coeff.is_zero() {
            p.terms.insert((n, c, b), coeff);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.get(&(0, 0, 0)).map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&(0, 0, 0)))
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.get(&(0, 0, 0)).cloned();
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn box_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.2).max().unwrap_or(0)
    }

    pub fn is_box_free(&self) -> bool {
        self.terms.keys().all(|k| k.2 == 0)
    }

    /// Coefficient of box^j, as a box-free polynomial.
    pub fn box_slice(&self, j: u32) -> NCPoly {
        NCPoly {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.2 == j)
                .map(|(k, v)| ((k.0, k.1, 0), v.clone()))
                .collect(),
        }
    }

    fn insert_add(terms: &mut BTreeMap<(u32, u32, u32), Rational>, k: (u32, u32, u32), c: Rational) {
        if c.is_zero() {
            return;
        }
        match terms.entry(k) {
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

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            Self::insert_add(&mut terms, *k, c.clone());
        }
        NCPoly { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        NCPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let k = (ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2);
                Self::insert_add(&mut terms, k, ca.clone() * cb.clone());
            }
        }
        NCPoly { terms }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NCPoly { terms: self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Substitute Ncal -> Ncal + a, C -> C + b (box unchanged).
    pub fn shift(&self, a: &Rational, b: &Rational) -> Self {
        let mut acc = Self::zero();
        let n_shift = Self::ncal().add(&Self::constant(a.clone()));
        let c_shift = Self::ccal().add(&Self::constant(b.clone()));
        for (k, coeff) in &self.terms {
            let t = n_shift
                .pow(k.0)
                .mul(&c_shift.pow(k.1))
                .mul(&Self::boxsym().pow(k.2))
                .scale(coeff);
            acc = acc.add(&t);
        }
        acc
    }

    /// Exact value at (Ncal, C) of a box-free polynomial; panics on box terms
    /// (callers gate on `is_box_free`).
    pub fn eval(&self, ncal: &Rational, ccal: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (k, c) in &self.terms {
            assert_eq!(k.2, 0, "box symbol in spectral evaluation");
            let mut t = c.clone();
            for _ in 0..k.0 {
                t *= ncal.clone();
            }
            for _ in 0..k.1 {
                t *= ccal.clone();
            }
            acc += t;
        }
        acc
    }

    /// Lex-leading coefficient (Ncal > C > box order).
    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.terms.last_key_value().map(|(_, c)| c)
    }

    /// Exact multivariate division; Some(q) iff divisor divides exactly.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (dk, dc) = d.terms.last_key_value().map(|(k, c)| (*k, c.clone())).unwrap();
        let mut rem = self.clone();
        let mut q = Self::zero();
        while !rem.is_zero() {
            let (rk, rc) = rem.terms.last_key_value().map(|(k, c)| (*k, c.clone())).unwrap();
            if rk.0 < dk.0 || rk.1 < dk.1 || rk.2 < dk.2 {
                return None;
            }
            let k = (rk.0 - dk.0, rk.1 - dk.1, rk.2 - dk.2);
            let t = Self::term(k.0, k.1, k.2, rc / dc.clone());
            q = q.add(&t);
            rem = rem.sub(&t.mul(d));
        }
        Some(q)
    }

    /// Grammar-compatible rendering: juxtaposition for products, explicit
    /// rational prefixes. Parses back through the operator-expression parser.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    // "-1 Ncal^2" style: the grammar has no unary minus, the
                    // sign rides on the rational literal
                    out.push('-');
                    if mag.is_one() && *k != (0, 0, 0) {
                        out.push_str("1 ");
                    } else {
                        out.push_str(&format_rational(&mag));
                        if *k != (0, 0, 0) {
                            out.push(' ');
                        }
                        push_vars(&mut out, k);
                        continue;
                    }
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if !mag.is_one() || *k == (0, 0, 0) {
                out.push_str(&format_rational(&mag));
                if *k != (0, 0, 0) {
                    out.push(' ');
                }
            }
            push_vars(&mut out, k);
        }
        out
    }
}

fn push_vars(out: &mut String, k: &(u32, u32, u32)) {
    let mut parts: Vec<String> = Vec::new();
    for (name, e) in [("Ncal", k.0), ("C", k.1), ("box", k.2)] {
        if e == 1 {
            parts.push(name.to_string());
        } else if e > 1 {
            parts.push(format!("{name}^{e}"));
        }
    }
    out.push_str(&parts.join(" "));
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

// ---------------------------------------------------------------------------
// gcd of box-free polynomials, via primitive PRS in (Q[C])[Ncal]

/// Dense univariate polynomial in C over Q. Internal helper for content
/// computations; coefficients[i] is the C^i coefficient.
#[derive(Debug, Clone, PartialEq)]
struct UniPoly(Vec<Rational>);

impl UniPoly {
    fn zero() -> Self {
        UniPoly(vec![])
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn normalize(mut self) -> Self {
        while self.0.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.0.pop();
        }
        self
    }

    fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lc(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a.clone() * b.clone();
            }
        }
        UniPoly(out).normalize()
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a.clone();
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] -= b.clone();
        }
        UniPoly(out).normalize()
    }

    fn scale(&self, c: &Rational) -> Self {
        UniPoly(self.0.iter().map(|a| a.clone() * c.clone()).collect()).normalize()
    }

    fn shift_mul(&self, k: usize) -> Self {
        // multiply by C^k
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); k];
        out.extend(self.0.iter().cloned());
        UniPoly(out)
    }

    fn rem(&self, d: &Self) -> Self {
        let mut r = self.clone();
        while !r.is_zero() && r.deg() >= d.deg() {
            let q = r.lc() / d.lc();
            let k = r.deg() - d.deg();
            r = r.sub(&d.shift_mul(k).scale(&q));
        }
        r
    }

    fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let mut r = self.clone();
        let mut q = UniPoly(vec![Rational::zero(); self.0.len()]);
        while !r.is_zero() && r.deg() >= d.deg() {
            let c = r.lc() / d.lc();
            let k = r.deg() - d.deg();
            q.0[k] = c.clone();
            r = r.sub(&d.shift_mul(k).scale(&c));
        }
        if r.is_zero() {
            Some(q.normalize())
        } else {
            None
        }
    }

    fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        // monic
        let lc = a.lc();
        a.scale(&lc.recip())
    }
}

/// Box-free NCPoly viewed as a map: Ncal-degree -> UniPoly in C.
fn to_ncal_coeffs(p: &NCPoly) -> BTreeMap<u32, UniPoly> {
    let mut m: BTreeMap<u32, Vec<Rational>> = BTreeMap::new();
    for (k, c) in &p.terms {
        debug_assert_eq!(k.2, 0);
        let v = m.entry(k.0).or_default();
        if v.len() <= k.1 as usize {
            v.resize(k.1 as usize + 1, Rational::zero());
        }
        v[k.1 as usize] = c.clone();
    }
    m.into_iter().map(|(d, v)| (d, UniPoly(v).normalize())).collect()
}

fn from_ncal_coeffs(m: &BTreeMap<u32, UniPoly>) -> NCPoly {
    let mut p = NCPoly::zero();
    for (d, u) in m {
        for (i, c) in u.0.iter().enumerate() {
            if !c.is_zero() {
                p = p.add(&NCPoly::term(*d, i as u32, 0, c.clone()));
            }
        }
    }
    p
}

fn content_in_c(m: &BTreeMap<u32, UniPoly>) -> UniPoly {
    let mut g = UniPoly::zero();
    for u in m.values() {
        g = if g.is_zero() { u.clone() } else { UniPoly::gcd(&g, u) };
        if !g.is_zero() && g.deg() == 0 {
            break; // content is a unit in Q[C]
        }
    }
    if g.is_zero() {
        UniPoly(vec![Rational::one()])
    } else {
        g
    }
}

fn primitive_part(m: BTreeMap<u32, UniPoly>) -> (BTreeMap<u32, UniPoly>, UniPoly) {
    let cont = content_in_c(&m);
    let pp = m
        .into_iter()
        .map(|(d, u)| {
            let q = u.div_exact(&cont).expect("content divides");
            (d, q)
        })
        .collect();
    (pp, cont)
}

fn deg_n(m: &BTreeMap<u32, UniPoly>) -> u32 {
    m.keys().next_back().copied().unwrap_or(0)
}

fn lc_n(m: &BTreeMap<u32, UniPoly>) -> UniPoly {
    m.values().next_back().cloned().unwrap_or_else(UniPoly::zero)
}

fn add_assign(m: &mut BTreeMap<u32, UniPoly>, d: u32, u: UniPoly) {
    let cur = m.remove(&d).unwrap_or_else(UniPoly::zero);
    let s = cur.sub(&u.scale(&rat_i(-1)));
    if !s.is_zero() {
        m.insert(d, s);
    }
}

fn mul_map(m: &BTreeMap<u32, UniPoly>, u: &UniPoly) -> BTreeMap<u32, UniPoly> {
    if u.is_zero() {
        return BTreeMap::new();
    }
    m.iter()
        .filter_map(|(d, v)| {
            let p = v.mul(u);
            if p.is_zero() {
                None
            } else {
                Some((*d, p))
            }
        })
        .collect()
}

/// Pseudo-remainder of a by b in (Q[C])[Ncal].
fn prem(a: &BTreeMap<u32, UniPoly>, b: &BTreeMap<u32, UniPoly>) -> BTreeMap<u32, UniPoly> {
    let db = deg_n(b);
    let lb = lc_n(b);
    let mut r = a.clone();
    let mut e: i64 = deg_n(a) as i64 - db as i64 + 1;
    while !r.is_empty() && deg_n(&r) >= db {
        let dr = deg_n(&r);
        let lr = lc_n(&r);
        // r = lb*r - lr * Ncal^(dr-db) * b
        let mut r2 = mul_map(&r, &lb);
        for (d, v) in b {
            add_assign(&mut r2, d + dr - db, v.mul(&lr).scale(&rat_i(-1)));
        }
        r = r2;
        e -= 1;
    }
    for _ in 0..e.max(0) {
        r = mul_map(&r, &lb);
    }
    r
}

/// gcd of two box-free polynomials in Q[Ncal, C], unique up to units; the
/// result is primitive in C with monic C-content absorbed, leading rational
/// coefficient normalized to 1.
pub fn gcd_boxfree(p: &NCPoly, q: &NCPoly) -> NCPoly {
    assert!(p.is_box_free() && q.is_box_free());
    if p.is_zero() {
        return normalize_unit(q.clone());
    }
    if q.is_zero() {
        return normalize_unit(p.clone());
    }
    let (mut a, ca) = primitive_part(to_ncal_coeffs(p));
    let (mut b, cb) = primitive_part(to_ncal_coeffs(q));
    if deg_n(&a) < deg_n(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = prem(&a, &b);
        a = b;
        b = if r.is_empty() { r } else { primitive_part(r).0 };
    }
    let (pp, _) = primitive_part(a);
    let content_gcd = UniPoly::gcd(&ca, &cb);
    let mut g = from_ncal_coeffs(&pp);
    // fold in the shared content over Q[C]
    let content_poly = {
        let mut cp = NCPoly::zero();
        for (i, c) in content_gcd.0.iter().enumerate() {
            if !c.is_zero() {
                cp = cp.add(&NCPoly::term(0, i as u32, 0, c.clone()));
            }
        }
        cp
    };
    g = g.mul(&content_poly);
    normalize_unit(g)
}

fn normalize_unit(p: NCPoly) -> NCPoly {
    match p.leading_coeff() {
        None => p,
        Some(lc) => {
            let inv = lc.clone().recip();
            p.scale(&inv)
        }
    }
}
