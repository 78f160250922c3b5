use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, parse_rational, rat_i, Rational};
use crate::exact::LaurentPoly;
use crate::geometry::Geometry;
use crate::rng::SplitMix64;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Inhomogeneous section of the symmetric tensor bundle, stored as a
/// polynomial in the commuting fiber variables u^1..u^n with Laurent
/// polynomial coefficients in position. The u-degree of a monomial is its
/// tensor rank; symmetry is automatic.
#[derive(Debug, Clone)]
pub struct SymTensorField {
    geo: Arc<Geometry>,
    terms: BTreeMap<Vec<u32>, LaurentPoly>,
}

impl PartialEq for SymTensorField {
    fn eq(&self, other: &Self) -> bool {
        *self.geo == *other.geo && self.terms == other.terms
    }
}
impl Eq for SymTensorField {}

impl SymTensorField {
    pub fn zero(geo: Arc<Geometry>) -> Self {
        SymTensorField { geo, terms: BTreeMap::new() }
    }

    pub fn scalar(geo: Arc<Geometry>, p: LaurentPoly) -> Self {
        let n = geo.dim();
        let mut t = Self::zero(geo);
        t.insert(vec![0; n], p);
        t
    }

    pub fn constant(geo: Arc<Geometry>, c: Rational) -> Self {
        let n = geo.dim();
        Self::scalar(geo, LaurentPoly::constant(n, c))
    }

    pub fn monomial(geo: Arc<Geometry>, uexp: Vec<u32>, coeff: LaurentPoly) -> Self {
        assert_eq!(uexp.len(), geo.dim());
        let mut t = Self::zero(geo);
        t.insert(uexp, coeff);
        t
    }

    /// The metric as a rank-2 field: sum_m g_{mm} (u^m)^2.
    pub fn metric_field(geo: Arc<Geometry>) -> Self {
        let n = geo.dim();
        let mut t = Self::zero(geo.clone());
        for m in 0..n {
            let mut e = vec![0; n];
            e[m] = 2;
            t.insert(e, geo.metric_diag(m).clone());
        }
        t
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geo
    }

    pub fn dim(&self) -> usize {
        self.geo.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, uexp: Vec<u32>, coeff: LaurentPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(uexp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&coeff).expect("same geometry");
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_geo(&self, other: &Self) -> Result<()> {
        if *self.geo != *other.geo {
            return Err(Error::GeometryMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_geo(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        SymTensorField {
            geo: self.geo.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.geo.clone());
        }
        SymTensorField {
            geo: self.geo.clone(),
            terms: self.terms.iter().map(|(e, p)| (e.clone(), p.scale(c))).collect(),
        }
    }

    pub fn scale_poly(&self, c: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.geo.clone());
        for (e, p) in &self.terms {
            out.insert(e.clone(), p.mul(c).expect("same variable count"));
        }
        out
    }

    /// Product of two fields as u-polynomials (symmetrized tensor product).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_geo(other)?;
        let mut out = Self::zero(self.geo.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca.mul(cb)?);
            }
        }
        Ok(out)
    }

    /// d/du^m: one fiber derivative.
    pub fn u_derivative(&self, m: usize) -> Self {
        let mut out = Self::zero(self.geo.clone());
        for (e, c) in &self.terms {
            if e[m] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[m] -= 1;
            out.insert(e2, c.scale(&rat_i(e[m] as i64)));
        }
        out
    }

    /// Multiplication by u^m.
    pub fn mul_u(&self, m: usize) -> Self {
        SymTensorField {
            geo: self.geo.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[m] += 1;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// d/dx^m on the position coefficients only.
    pub fn x_derivative(&self, m: usize) -> Self {
        let mut out = Self::zero(self.geo.clone());
        for (e, c) in &self.terms {
            out.insert(e.clone(), c.derivative(m));
        }
        out
    }

    pub fn max_rank(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Split into homogeneous rank parts (rank -> field).
    pub fn rank_parts(&self) -> BTreeMap<u32, SymTensorField> {
        let mut out: BTreeMap<u32, SymTensorField> = BTreeMap::new();
        for (e, c) in &self.terms {
            let r: u32 = e.iter().sum();
            out.entry(r)
                .or_insert_with(|| Self::zero(self.geo.clone()))
                .insert(e.clone(), c.clone());
        }
        out
    }

    pub fn rank_part(&self, r: u32) -> SymTensorField {
        let mut out = Self::zero(self.geo.clone());
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == r {
                out.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Enforces the geometry's Laurent rule: negative position exponents are
    /// allowed only in the height coordinate and only on hyperbolic space.
    pub fn validate(&self) -> Result<()> {
        let n = self.geo.dim();
        let flat = self.geo.is_flat();
        for c in self.terms.values() {
            for i in 0..n {
                if c.has_negative_exponent(i) && (flat || i != n - 1) {
                    return Err(Error::LaurentNotAllowed);
                }
            }
        }
        Ok(())
    }

    /// Pointwise Fock pairing sum_s s! phi^{m1..ms} psi_{m1..ms} with indices
    /// raised by the inverse metric; the volume factor and the integral over
    /// the manifold are deliberately not included.
    pub fn fock_pair(&self, other: &Self, point: &[Rational]) -> Result<Rational> {
        self.check_geo(other)?;
        let n = self.geo.dim();
        assert_eq!(point.len(), n);
        if !self.geo.is_flat() && !point[n - 1].is_positive() {
            return Err(Error::EvalAtBoundary(format_rational(&point[n - 1])));
        }
        let mut inv_diag = Vec::with_capacity(n);
        for m in 0..n {
            inv_diag.push(self.geo.inv_metric_diag(m).eval(point)?);
        }
        let mut acc = Rational::zero();
        for (e, ca) in &self.terms {
            let Some(cb) = other.terms.get(e) else { continue };
            // alpha! * prod_m (g^{mm})^{alpha_m}
            let mut w = Rational::one();
            for (m, &k) in e.iter().enumerate() {
                for j in 1..=k {
                    w *= rat_i(j as i64);
                }
                for _ in 0..k {
                    w *= inv_diag[m].clone();
                }
            }
            acc += w * ca.eval(point)? * cb.eval(point)?;
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// text format

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Caret,
    Star,
    Plus,
    Minus,
    Slash,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek_tok(&mut self) -> Result<(Tok, usize)> {
        let save = self.pos;
        let t = self.next_tok()?;
        let at = self.pos;
        self.pos = save;
        Ok((t.0, at.min(t.1)))
    }

    fn next_tok(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let at = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, at));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'^' => Tok::Caret,
            b'*' => Tok::Star,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                return Ok((Tok::Num(s), at));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric())
                {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                return Ok((Tok::Ident(s), at));
            }
            _ => {
                return Err(Error::Parse {
                    pos: at,
                    msg: format!("unexpected character {:?}", c as char),
                })
            }
        };
        self.pos += 1;
        Ok((tok, at))
    }
}

struct TensorParser<'a> {
    lex: Lexer<'a>,
    geo: Arc<Geometry>,
}

impl<'a> TensorParser<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos, msg: msg.into() })
    }

    fn parse_expr(&mut self) -> Result<SymTensorField> {
        let mut neg = false;
        if let (Tok::Minus, _) = self.lex.peek_tok()? {
            self.lex.next_tok()?;
            neg = true;
        }
        let mut acc = self.parse_term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            match self.lex.peek_tok()? {
                (Tok::Plus, _) => {
                    self.lex.next_tok()?;
                    acc = acc.add(&self.parse_term()?)?;
                }
                (Tok::Minus, _) => {
                    self.lex.next_tok()?;
                    acc = acc.sub(&self.parse_term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<SymTensorField> {
        let mut acc = self.parse_factor()?;
        while let (Tok::Star, _) = self.lex.peek_tok()? {
            self.lex.next_tok()?;
            acc = acc.mul(&self.parse_factor()?)?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<SymTensorField> {
        let base = self.parse_atom()?;
        if let (Tok::Caret, _) = self.lex.peek_tok()? {
            self.lex.next_tok()?;
            let mut sign = 1i64;
            if let (Tok::Minus, _) = self.lex.peek_tok()? {
                self.lex.next_tok()?;
                sign = -1;
            }
            let (tok, at) = self.lex.next_tok()?;
            let Tok::Num(d) = tok else {
                return self.err(at, "expected an integer exponent");
            };
            let k: i64 = d.parse().map_err(|_| Error::Parse {
                pos: at,
                msg: "exponent out of range".into(),
            })?;
            return self.pow_field(base, sign * k, at);
        }
        Ok(base)
    }

    fn pow_field(&self, base: SymTensorField, k: i64, at: usize) -> Result<SymTensorField> {
        if k >= 0 {
            let mut acc = SymTensorField::constant(self.geo.clone(), rat_i(1));
            for _ in 0..k {
                acc = acc.mul(&base)?;
            }
            return Ok(acc);
        }
        // negative powers only make sense for a single scalar coordinate
        // monomial (y^-2 and friends)
        if base.num_terms() != 1 {
            return self.err(at, "negative power of a non-monomial");
        }
        let (uexp, coeff) = base.terms().next().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        if uexp.iter().any(|&e| e != 0) || coeff.num_terms() != 1 {
            return self.err(at, "negative power of a non-monomial");
        }
        let (xexp, q) = coeff.terms().next().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let n = self.geo.dim();
        let inv = LaurentPoly::monomial(n, xexp.iter().map(|&e| -e).collect(), q.recip());
        let mut acc = SymTensorField::scalar(self.geo.clone(), LaurentPoly::one(n));
        for _ in 0..(-k) {
            acc = acc.scale_poly(&inv);
        }
        Ok(acc)
    }

    fn parse_atom(&mut self) -> Result<SymTensorField> {
        let n = self.geo.dim();
        let (tok, at) = self.lex.next_tok()?;
        match tok {
            Tok::Num(d) => {
                let mut num = d;
                if let (Tok::Slash, _) = self.lex.peek_tok()? {
                    self.lex.next_tok()?;
                    let (t2, at2) = self.lex.next_tok()?;
                    let Tok::Num(den) = t2 else {
                        return self.err(at2, "expected a denominator");
                    };
                    num = format!("{num}/{den}");
                }
                let q = parse_rational(&num).map_err(|_| Error::Parse {
                    pos: at,
                    msg: format!("bad rational {num:?}"),
                })?;
                Ok(SymTensorField::constant(self.geo.clone(), q))
            }
            Tok::Ident(name) => {
                if let Some(rest) = name.strip_prefix('u') {
                    if let Ok(k) = rest.parse::<usize>() {
                        if k == 0 || k > n {
                            return Err(Error::IndexOutOfRange { index: k, dim: n });
                        }
                        let mut e = vec![0u32; n];
                        e[k - 1] = 1;
                        return Ok(SymTensorField::monomial(
                            self.geo.clone(),
                            e,
                            LaurentPoly::one(n),
                        ));
                    }
                }
                if let Some(rest) = name.strip_prefix('x') {
                    if let Ok(k) = rest.parse::<usize>() {
                        if k == 0 || k > n {
                            return Err(Error::IndexOutOfRange { index: k, dim: n });
                        }
                        return Ok(SymTensorField::scalar(
                            self.geo.clone(),
                            LaurentPoly::var(n, k - 1),
                        ));
                    }
                }
                if name == "y" {
                    return Ok(SymTensorField::scalar(self.geo.clone(), LaurentPoly::var(n, n - 1)));
                }
                self.err(at, format!("unknown symbol {name:?}"))
            }
            Tok::LParen => {
                let inner = self.parse_expr()?;
                let (t2, at2) = self.lex.next_tok()?;
                if t2 != Tok::RParen {
                    return self.err(at2, "expected ')'");
                }
                Ok(inner)
            }
            Tok::End => self.err(at, "unexpected end of input"),
            other => self.err(at, format!("unexpected token {other:?}")),
        }
    }
}

/// Parse the textual polynomial syntax (`u<k>`, `x<k>`, `y`, `^`, `*`, `+`,
/// `-`, rationals) into a tensor over the given geometry.
pub fn make_tensor(geo: Arc<Geometry>, text: &str) -> Result<SymTensorField> {
    let mut p = TensorParser { lex: Lexer::new(text), geo };
    let t = p.parse_expr()?;
    let (tok, at) = p.lex.next_tok()?;
    if tok != Tok::End {
        return Err(Error::Parse { pos: at, msg: "trailing input".into() });
    }
    t.validate()?;
    Ok(t)
}

impl fmt::Display for SymTensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.geo.coord_names();
        // order by (rank, u-exponents) for readability
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by_key(|e| (e.iter().sum::<u32>(), (*e).clone()));
        let mut first = true;
        for e in keys {
            let coeff = &self.terms[e];
            for (xe, q) in coeff.terms() {
                let neg = q.is_negative();
                let mag = q.abs();
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                    first = false;
                } else if neg {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                let mut parts: Vec<String> = Vec::new();
                let unit_mono = xe.iter().all(|&k| k == 0) && e.iter().all(|&k| k == 0);
                if !mag.is_one() || unit_mono {
                    parts.push(format_rational(&mag));
                }
                for (i, &k) in xe.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    if k == 1 {
                        parts.push(names[i].clone());
                    } else {
                        parts.push(format!("{}^{}", names[i], k));
                    }
                }
                for (i, &k) in e.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    if k == 1 {
                        parts.push(format!("u{}", i + 1));
                    } else {
                        parts.push(format!("u{}^{}", i + 1, k));
                    }
                }
                write!(f, "{}", parts.join("*"))?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// deterministic random tensors

/// All exponent vectors over `vars` variables of exact total `sum`, in
/// ascending lexicographic order.
fn enum_exact(vars: usize, sum: u32) -> Vec<Vec<u32>> {
    if vars == 0 {
        return if sum == 0 { vec![vec![]] } else { vec![] };
    }
    if vars == 1 {
        return vec![vec![sum]];
    }
    let mut out = Vec::new();
    for e0 in 0..=sum {
        for rest in enum_exact(vars - 1, sum - e0) {
            let mut v = Vec::with_capacity(vars);
            v.push(e0);
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// All non-negative exponent vectors with total degree <= `max`, ascending
/// lexicographic order.
fn enum_upto(vars: usize, max: u32) -> Vec<Vec<u32>> {
    if vars == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for e0 in 0..=max {
        for rest in enum_upto(vars - 1, max - e0) {
            let mut v = Vec::with_capacity(vars);
            v.push(e0);
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// Position monomial exponents for coefficient sampling, in the fixed
/// enumeration order of the generator contract:
/// flat -> all exponent vectors of total degree <= d, lex ascending;
/// hyperbolic -> non-height part of degree <= d lex ascending (outer loop),
/// height exponent -d..=d ascending (inner loop).
fn coeff_monomials(geo: &Geometry, d: u32) -> Vec<Vec<i32>> {
    let n = geo.dim();
    if geo.is_flat() {
        enum_upto(n, d)
            .into_iter()
            .map(|e| e.into_iter().map(|k| k as i32).collect())
            .collect()
    } else {
        let mut out = Vec::new();
        for head in enum_upto(n - 1, d) {
            for k in -(d as i32)..=(d as i32) {
                let mut e: Vec<i32> = head.iter().map(|&x| x as i32).collect();
                e.push(k);
                out.push(e);
            }
        }
        out
    }
}

/// Deterministic random tensor. Contract, fixed for reproducibility across
/// implementations: one splitmix64 stream
/// seeded with `seed`; ranks ascending; u-exponent vectors of each rank in
/// ascending lex order; coefficient monomials per `coeff_monomials`. For each
/// (u, x) slot draw w = next(); the slot is occupied iff w % 4 == 0, with
/// coefficient ((next() % 19) - 9), dropped when zero. If a rank ends up
/// empty its first u-vector gets constant coefficient 1.
pub fn random_tensor(
    geo: Arc<Geometry>,
    seed: u64,
    max_rank: u32,
    max_coeff_degree: u32,
) -> SymTensorField {
    let n = geo.dim();
    let mut rng = SplitMix64::new(seed);
    let monos = coeff_monomials(&geo, max_coeff_degree);
    let mut out = SymTensorField::zero(geo.clone());
    for r in 0..=max_rank {
        let uvecs = enum_exact(n, r);
        let mut any = false;
        for ue in &uvecs {
            for xe in &monos {
                if rng.below(4) != 0 {
                    continue;
                }
                let c = rng.below(19) as i64 - 9;
                if c == 0 {
                    continue;
                }
                out.insert(ue.clone(), LaurentPoly::monomial(n, xe.clone(), rat_i(c)));
                any = true;
            }
        }
        if !any {
            out.insert(uvecs[0].clone(), LaurentPoly::one(n));
        }
    }
    out
}
