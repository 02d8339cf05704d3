//! Exact trivariate polynomial fields with dense-by-exponent storage.
//!
//! Scalars hold a map from exponent triples to coefficients; differential
//! operators (gradient, curl, divergence, matrix gradient) are exact
//! coefficient manipulations, so operator identities can be asserted
//! coefficientwise rather than through sampling.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Error;
use crate::tensor::{levi_civita, Mat3, Ten3, Vec3};

/// Cap on the total degree of externally constructed fields. Internal
/// products may exceed it; the cap keeps quadrature budgets checkable.
pub const MAX_FIELD_DEGREE: usize = 8;

/// Coefficients below this magnitude are dropped after arithmetic. Only
/// true underflow noise is pruned; cancellation residues are kept visible.
const PRUNE_EPS: f64 = 1e-300;

type Exp = [u8; 3];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyScalar {
    terms: BTreeMap<Exp, f64>,
}

impl PolyScalar {
    pub fn zero() -> Self {
        PolyScalar {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut p = PolyScalar::zero();
        p.add_term([0, 0, 0], c);
        p
    }

    /// Monomial `c * x^e0 y^e1 z^e2` without the external degree cap.
    pub fn monomial(exp: [usize; 3], c: f64) -> Self {
        let mut p = PolyScalar::zero();
        p.add_term([exp[0] as u8, exp[1] as u8, exp[2] as u8], c);
        p
    }

    /// Capped constructor for user-supplied fields.
    pub fn field(terms: impl IntoIterator<Item = ([usize; 3], f64)>) -> Result<Self, Error> {
        let mut p = PolyScalar::zero();
        for (exp, c) in terms {
            let deg = exp[0] + exp[1] + exp[2];
            if deg > MAX_FIELD_DEGREE {
                return Err(Error::DegreeCap {
                    degree: deg,
                    cap: MAX_FIELD_DEGREE,
                });
            }
            p.add_term([exp[0] as u8, exp[1] as u8, exp[2] as u8], c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: Exp, c: f64) {
        let entry = self.terms.entry(exp).or_insert(0.0);
        *entry += c;
        if entry.abs() < PRUNE_EPS {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        self.terms
            .iter()
            .map(|(e, c)| ([e[0] as usize, e[1] as usize, e[2] as usize], *c))
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e[0] as usize + e[1] as usize + e[2] as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        let mut s = 0.0;
        for (e, c) in &self.terms {
            s += c * pow_u8(x.0[0], e[0]) * pow_u8(x.0[1], e[1]) * pow_u8(x.0[2], e[2]);
        }
        s
    }

    pub fn diff(&self, axis: usize) -> PolyScalar {
        let mut out = PolyScalar::zero();
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut d = *e;
                d[axis] -= 1;
                out.add_term(d, c * e[axis] as f64);
            }
        }
        out
    }

    pub fn grad(&self) -> PolyVector {
        PolyVector([self.diff(0), self.diff(1), self.diff(2)])
    }

    pub fn scale(&self, s: f64) -> PolyScalar {
        let mut out = PolyScalar::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * s);
        }
        out
    }

    pub fn mul(&self, o: &PolyScalar) -> PolyScalar {
        let mut out = PolyScalar::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

fn pow_u8(x: f64, e: u8) -> f64 {
    let mut r = 1.0;
    for _ in 0..e {
        r *= x;
    }
    r
}

impl std::ops::Add for &PolyScalar {
    type Output = PolyScalar;
    fn add(self, o: &PolyScalar) -> PolyScalar {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl std::ops::Sub for &PolyScalar {
    type Output = PolyScalar;
    fn sub(self, o: &PolyScalar) -> PolyScalar {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyVector(pub [PolyScalar; 3]);

impl PolyVector {
    pub fn zero() -> Self {
        PolyVector::default()
    }

    pub fn constant(v: Vec3) -> Self {
        PolyVector([
            PolyScalar::constant(v[0]),
            PolyScalar::constant(v[1]),
            PolyScalar::constant(v[2]),
        ])
    }

    /// Linear field `A·x` for a constant matrix.
    pub fn linear(a: Mat3) -> Self {
        let mut comps: [PolyScalar; 3] = Default::default();
        for (i, comp) in comps.iter_mut().enumerate() {
            for k in 0..3 {
                let mut exp = [0usize; 3];
                exp[k] = 1;
                *comp = &*comp + &PolyScalar::monomial(exp, a[i][k]);
            }
        }
        PolyVector(comps)
    }

    /// Seeded random field: every monomial of total degree <= `degree` gets a
    /// coefficient uniform in [-1, 1], in fixed exponent order.
    pub fn random(degree: usize, rng: &mut impl Rng) -> Result<Self, Error> {
        if degree > MAX_FIELD_DEGREE {
            return Err(Error::DegreeCap {
                degree,
                cap: MAX_FIELD_DEGREE,
            });
        }
        let mut comps: [PolyScalar; 3] = Default::default();
        for comp in comps.iter_mut() {
            let mut p = PolyScalar::zero();
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    for c in 0..=(degree - a - b) {
                        p.add_term([a as u8, b as u8, c as u8], rng.gen_range(-1.0..1.0));
                    }
                }
            }
            *comp = p;
        }
        Ok(PolyVector(comps))
    }

    pub fn eval(&self, x: Vec3) -> Vec3 {
        Vec3([self.0[0].eval(x), self.0[1].eval(x), self.0[2].eval(x)])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(PolyScalar::degree).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0, |m, p| m.max(p.max_abs_coeff()))
    }

    pub fn scale(&self, s: f64) -> PolyVector {
        PolyVector([self.0[0].scale(s), self.0[1].scale(s), self.0[2].scale(s)])
    }

    /// `(grad u)_ik = du_i/dx_k`.
    pub fn grad(&self) -> PolyMatrix {
        PolyMatrix(std::array::from_fn(|i| {
            std::array::from_fn(|k| self.0[i].diff(k))
        }))
    }

    /// `(curl u)_i = eps_ijk du_k/dx_j`.
    pub fn curl(&self) -> PolyVector {
        let mut comps: [PolyScalar; 3] = Default::default();
        for (i, comp) in comps.iter_mut().enumerate() {
            let mut p = PolyScalar::zero();
            for j in 0..3 {
                for k in 0..3 {
                    let s = levi_civita(i, j, k);
                    if s != 0.0 {
                        p = &p + &self.0[k].diff(j).scale(s);
                    }
                }
            }
            *comp = p;
        }
        PolyVector(comps)
    }

    pub fn div(&self) -> PolyScalar {
        &(&self.0[0].diff(0) + &self.0[1].diff(1)) + &self.0[2].diff(2)
    }

    pub fn dot(&self, o: &PolyVector) -> PolyScalar {
        let mut s = PolyScalar::zero();
        for i in 0..3 {
            s = &s + &self.0[i].mul(&o.0[i]);
        }
        s
    }
}

impl std::ops::Add for &PolyVector {
    type Output = PolyVector;
    fn add(self, o: &PolyVector) -> PolyVector {
        PolyVector(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }
}

impl std::ops::Sub for &PolyVector {
    type Output = PolyVector;
    fn sub(self, o: &PolyVector) -> PolyVector {
        PolyVector(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyMatrix(pub [[PolyScalar; 3]; 3]);

impl PolyMatrix {
    pub fn zero() -> Self {
        PolyMatrix::default()
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> PolyScalar) -> Self {
        PolyMatrix(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn eval(&self, x: Vec3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j].eval(x))
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn sym(&self) -> PolyMatrix {
        PolyMatrix::from_fn(|i, j| (&self.0[i][j] + &self.0[j][i]).scale(0.5))
    }

    pub fn skw(&self) -> PolyMatrix {
        PolyMatrix::from_fn(|i, j| (&self.0[i][j] - &self.0[j][i]).scale(0.5))
    }

    pub fn trace(&self) -> PolyScalar {
        &(&self.0[0][0] + &self.0[1][1]) + &self.0[2][2]
    }

    pub fn scale(&self, s: f64) -> PolyMatrix {
        PolyMatrix::from_fn(|i, j| self.0[i][j].scale(s))
    }

    pub fn identity_times(p: &PolyScalar) -> PolyMatrix {
        PolyMatrix::from_fn(|i, j| if i == j { p.clone() } else { PolyScalar::zero() })
    }

    /// `anti` applied entrywise to a vector field.
    pub fn anti(v: &PolyVector) -> PolyMatrix {
        PolyMatrix::from_fn(|i, j| {
            let mut p = PolyScalar::zero();
            for k in 0..3 {
                let s = levi_civita(i, j, k);
                if s != 0.0 {
                    p = &p + &v.0[k].scale(-s);
                }
            }
            p
        })
    }

    /// `(Div P)_i = dP_ij/dx_j`.
    pub fn div(&self) -> PolyVector {
        PolyVector(std::array::from_fn(|i| {
            &(&self.0[i][0].diff(0) + &self.0[i][1].diff(1)) + &self.0[i][2].diff(2)
        }))
    }

    /// `(grad A)_ijk = dA_ij/dx_k`.
    pub fn grad(&self) -> PolyTen3 {
        PolyTen3(std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|k| self.0[i][j].diff(k)))
        }))
    }

    /// `<A, B> = A_ij B_ij` as a polynomial.
    pub fn inner(&self, o: &PolyMatrix) -> PolyScalar {
        let mut s = PolyScalar::zero();
        for i in 0..3 {
            for j in 0..3 {
                s = &s + &self.0[i][j].mul(&o.0[i][j]);
            }
        }
        s
    }

    pub fn matvec_const(&self, v: Vec3) -> PolyVector {
        PolyVector(std::array::from_fn(|i| {
            let mut p = PolyScalar::zero();
            for j in 0..3 {
                p = &p + &self.0[i][j].scale(v[j]);
            }
            p
        }))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.0 {
            for p in row {
                m = m.max(p.max_abs_coeff());
            }
        }
        m
    }
}

impl std::ops::Add for &PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, o: &PolyMatrix) -> PolyMatrix {
        PolyMatrix::from_fn(|i, j| &self.0[i][j] + &o.0[i][j])
    }
}

impl std::ops::Sub for &PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, o: &PolyMatrix) -> PolyMatrix {
        PolyMatrix::from_fn(|i, j| &self.0[i][j] - &o.0[i][j])
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyTen3(pub [[[PolyScalar; 3]; 3]; 3]);

impl PolyTen3 {
    pub fn eval(&self, x: Vec3) -> Ten3 {
        Ten3::from_fn(|i, j, k| self.0[i][j][k].eval(x))
    }
}

// ---------------------------------------------------------------------------
// literal parser
// ---------------------------------------------------------------------------

/// Parses a polynomial literal such as `2*x^2*y - z + 0.5`.
///
/// Grammar (documented in `docs/field-grammar.md`):
/// expr := term (('+'|'-') term)* ; term := factor ('*' factor)* ;
/// factor := number | ('x'|'y'|'z') ('^' uint)? | '(' expr ')' | '-' factor.
pub fn parse_scalar(src: &str) -> Result<PolyScalar, Error> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
        src,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::Parse(format!(
            "unexpected trailing input at byte {} in '{}'",
            p.pos, src
        )));
    }
    let deg = poly.degree();
    if deg > MAX_FIELD_DEGREE {
        return Err(Error::DegreeCap {
            degree: deg,
            cap: MAX_FIELD_DEGREE,
        });
    }
    Ok(poly)
}

/// Parses a vector literal: three scalar literals separated by `;`.
pub fn parse_vector(src: &str) -> Result<PolyVector, Error> {
    let parts: Vec<&str> = src.split(';').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "vector literal needs 3 ';'-separated components, got {} in '{}'",
            parts.len(),
            src
        )));
    }
    Ok(PolyVector([
        parse_scalar(parts[0])?,
        parse_scalar(parts[1])?,
        parse_scalar(parts[2])?,
    ]))
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<PolyScalar, Error> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolyScalar, Error> {
        let mut acc = self.factor()?;
        while let Some('*') = self.peek() {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<PolyScalar, Error> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.factor()?.scale(-1.0))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse(format!("missing ')' in '{}'", self.src)));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c == 'x' || c == 'y' || c == 'z' => {
                self.pos += 1;
                let axis = match c {
                    'x' => 0,
                    'y' => 1,
                    _ => 2,
                };
                let mut exp = [0usize; 3];
                exp[axis] = 1;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    exp[axis] = self.uint()?;
                }
                Ok(PolyScalar::monomial(exp, 1.0))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let num = self.number()?;
                Ok(PolyScalar::constant(num))
            }
            other => Err(Error::Parse(format!(
                "unexpected {:?} in '{}'",
                other, self.src
            ))),
        }
    }

    fn uint(&mut self) -> Result<usize, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!(
                "expected exponent digits in '{}'",
                self.src
            )));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|_| Error::Parse(format!("bad exponent '{}' in '{}'", text, self.src)))
    }

    fn number(&mut self) -> Result<f64, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_ascii_digit() || c == '.' {
                self.pos += 1;
            } else if (c == 'e' || c == 'E')
                && self.pos > start
                && self
                    .chars
                    .get(self.pos + 1)
                    .is_some_and(|n| n.is_ascii_digit() || *n == '+' || *n == '-')
            {
                self.pos += 2;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|_| Error::Parse(format!("bad number '{}' in '{}'", text, self.src)))
    }
}
