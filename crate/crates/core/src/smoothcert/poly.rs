//! Sparse multivariate polynomials over a coefficient field, stored as terms
//! sorted by descending degree-reverse-lexicographic order.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::CertError;

/// Maximum number of variables a polynomial can use.
pub const MAX_POLY_VARS: usize = 8;

/// Coefficient field. Implementations are cheap handles (a modulus, or nothing).
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `a` must be nonzero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn fmt_elem(&self, a: &Self::Elem) -> String;
}

/// Z/p for a prime p < 2^32.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, CertError> {
        if !is_prime(p) || p >= 1 << 32 {
            return Err(CertError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % self.p;
            }
            a = a * a % self.p;
            e >>= 1;
        }
        r
    }

    pub fn from_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p)).to_u64().expect("residue fits")
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// The rationals, with exact arbitrary-precision arithmetic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn fmt_elem(&self, a: &BigRational) -> String {
        a.to_string()
    }
}

/// Exponent vector, padded with zeros to [`MAX_POLY_VARS`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    e: [u8; MAX_POLY_VARS],
    deg: u16,
}

impl Mono {
    pub fn new(exps: &[u8]) -> Self {
        assert!(exps.len() <= MAX_POLY_VARS);
        let mut e = [0u8; MAX_POLY_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Mono { e, deg: exps.iter().map(|&x| x as u16).sum() }
    }

    pub fn one() -> Self {
        Mono::default()
    }

    pub fn var(i: usize) -> Self {
        let mut m = Mono::default();
        m.e[i] = 1;
        m.deg = 1;
        m
    }

    pub fn exp(&self, i: usize) -> u8 {
        self.e[i]
    }

    pub fn exps(&self) -> &[u8; MAX_POLY_VARS] {
        &self.e
    }

    pub fn degree(&self) -> u32 {
        self.deg as u32
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut e = [0u8; MAX_POLY_VARS];
        for (i, x) in e.iter_mut().enumerate() {
            *x = self.e[i].checked_add(o.e[i]).expect("exponent overflow");
        }
        Mono { e, deg: self.deg + o.deg }
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.deg <= o.deg && (0..MAX_POLY_VARS).all(|i| self.e[i] <= o.e[i])
    }

    /// o / self, assuming `self.divides(o)`.
    pub fn quotient_of(&self, o: &Mono) -> Mono {
        let mut e = [0u8; MAX_POLY_VARS];
        for (i, x) in e.iter_mut().enumerate() {
            *x = o.e[i] - self.e[i];
        }
        Mono { e, deg: o.deg - self.deg }
    }

    pub fn lcm(&self, o: &Mono) -> Mono {
        let mut e = [0u8; MAX_POLY_VARS];
        for (i, x) in e.iter_mut().enumerate() {
            *x = self.e[i].max(o.e[i]);
        }
        Mono { e, deg: e.iter().map(|&x| x as u16).sum() }
    }

    pub fn coprime(&self, o: &Mono) -> bool {
        (0..MAX_POLY_VARS).all(|i| self.e[i] == 0 || o.e[i] == 0)
    }

    /// Variables occurring in the monomial, as a bitmask.
    pub fn support(&self) -> u32 {
        (0..MAX_POLY_VARS).filter(|&i| self.e[i] > 0).fold(0, |acc, i| acc | 1 << i)
    }
}

/// Degree reverse lexicographic order.
impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        match self.deg.cmp(&o.deg) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for i in (0..MAX_POLY_VARS).rev() {
            if self.e[i] != o.e[i] {
                return o.e[i].cmp(&self.e[i]);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", mono_string(self))
    }
}

fn mono_string(m: &Mono) -> String {
    let parts: Vec<String> = (0..MAX_POLY_VARS)
        .filter(|&i| m.e[i] > 0)
        .map(|i| if m.e[i] == 1 { format!("x{i}") } else { format!("x{i}^{}", m.e[i]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Polynomial with terms in strictly descending monomial order, no zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePolynomial<F: Field> {
    field: F,
    nvars: usize,
    terms: Vec<(Mono, F::Elem)>,
}

impl<F: Field> SparsePolynomial<F> {
    pub fn zero(field: F, nvars: usize) -> Self {
        assert!(nvars <= MAX_POLY_VARS);
        SparsePolynomial { field, nvars, terms: Vec::new() }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(field: F, nvars: usize, terms: Vec<(Mono, F::Elem)>) -> Self {
        let mut terms = terms;
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Mono, F::Elem)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            assert!(m.e[nvars..].iter().all(|&x| x == 0), "monomial uses too many variables");
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = field.add(lc, &c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !field.is_zero(c));
        SparsePolynomial { field, nvars, terms: out }
    }

    pub fn constant(field: F, nvars: usize, c: F::Elem) -> Self {
        Self::from_terms(field, nvars, vec![(Mono::one(), c)])
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Mono, F::Elem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_monomial(&self) -> Option<&Mono> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coefficient(&self) -> Option<&F::Elem> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0.degree() == w[1].0.degree())
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(self.field.clone(), self.nvars);
        }
        let terms = self.terms.iter().map(|(m, a)| (*m, self.field.mul(a, c))).collect();
        SparsePolynomial { field: self.field.clone(), nvars: self.nvars, terms }
    }

    pub fn monic(&self) -> Self {
        match self.leading_coefficient() {
            None => self.clone(),
            Some(lc) => self.scale(&self.field.inv(lc)),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, &self.field.one(), &Mono::one(), false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, &self.field.one(), &Mono::one(), true)
    }

    /// self − c·m·o
    pub fn sub_scaled(&self, c: &F::Elem, m: &Mono, o: &Self) -> Self {
        self.combine(o, c, m, true)
    }

    fn combine(&self, o: &Self, c: &F::Elem, m: &Mono, subtract: bool) -> Self {
        let f = &self.field;
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let scaled = |k: usize| -> (Mono, F::Elem) {
            let (om, oc) = &o.terms[k];
            let v = f.mul(oc, c);
            (om.mul(m), if subtract { f.neg(&v) } else { v })
        };
        while i < self.terms.len() && j < o.terms.len() {
            let (om, oc) = scaled(j);
            match self.terms[i].0.cmp(&om) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((om, oc));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = f.add(&self.terms[i].1, &oc);
                    if !f.is_zero(&s) {
                        out.push((om, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        while j < o.terms.len() {
            out.push(scaled(j));
            j += 1;
        }
        SparsePolynomial { field: f.clone(), nvars: self.nvars.max(o.nvars), terms: out }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut acc = Self::zero(self.field.clone(), self.nvars.max(o.nvars));
        for (m, c) in &self.terms {
            acc = acc.combine(o, c, m, false);
        }
        acc
    }

    /// Formal partial derivative with respect to x_i.
    pub fn partial(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.e[i] > 0)
            .map(|(m, c)| {
                let mut d = *m;
                d.e[i] -= 1;
                d.deg -= 1;
                (d, self.field.mul(c, &self.field.from_i64(m.e[i] as i64)))
            })
            .collect();
        Self::from_terms(self.field.clone(), self.nvars, terms)
    }

    pub fn eval(&self, point: &[F::Elem]) -> F::Elem {
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate().take(self.nvars) {
                for _ in 0..m.e[i] {
                    t = f.mul(&t, x);
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }
}

/// Formal partial derivatives ∂F/∂x_i for every variable.
pub fn partials<F: Field>(f: &SparsePolynomial<F>) -> Vec<SparsePolynomial<F>> {
    (0..f.nvars).map(|i| f.partial(i)).collect()
}

impl<F: Field> fmt::Display for SparsePolynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let cs = self.field.fmt_elem(c);
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(r) => (true, r.to_string()),
                None => (false, cs),
            };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{}", mono_string(m))?;
            } else {
                write!(f, "{mag}*{}", mono_string(m))?;
            }
        }
        Ok(())
    }
}

impl SparsePolynomial<RationalField> {
    /// Reduction modulo p; `None` if some denominator is divisible by p.
    pub fn reduce_mod(&self, field: PrimeField) -> Option<SparsePolynomial<PrimeField>> {
        let p = BigInt::from(field.modulus());
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let den = c.denom();
            if den.is_multiple_of(&p) {
                return None;
            }
            let d = field.from_bigint(den);
            let n = field.from_bigint(c.numer());
            terms.push((*m, field.mul(&n, &field.inv(&d))));
        }
        Some(SparsePolynomial::from_terms(field, self.nvars, terms))
    }

    /// Integer coefficients of the polynomial, if they are all integral.
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }

    pub fn from_integer_terms(nvars: usize, terms: &[(Mono, i64)]) -> Self {
        let t = terms
            .iter()
            .map(|(m, c)| (*m, BigRational::from_integer(BigInt::from(*c))))
            .collect();
        Self::from_terms(RationalField, nvars, t)
    }
}

/// Parses `3*x0^2*x1 - x2^3 + 7*x3*x4*x5`-style integer-coefficient forms.
pub fn parse_polynomial(
    text: &str,
    nvars: usize,
) -> Result<SparsePolynomial<RationalField>, CertError> {
    let err = |pos: usize, msg: &str| CertError::Parse { position: pos, message: msg.into() };
    let b = text.as_bytes();
    let mut i = 0;
    let skip_ws = |i: &mut usize| {
        while *i < b.len() && b[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    let read_int = |i: &mut usize| -> Option<BigInt> {
        let s = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        (s < *i).then(|| text[s..*i].parse().expect("digits"))
    };
    let mut terms: Vec<(Mono, BigRational)> = Vec::new();
    let mut first = true;
    loop {
        skip_ws(&mut i);
        if i == b.len() {
            if first {
                return Err(err(i, "empty polynomial"));
            }
            break;
        }
        let mut sign = BigInt::one();
        if b[i] == b'+' || b[i] == b'-' {
            if b[i] == b'-' {
                sign = -sign;
            }
            i += 1;
            skip_ws(&mut i);
        } else if !first {
            return Err(err(i, "expected '+' or '-'"));
        }
        first = false;
        let mut coef = sign;
        let mut exps = [0u8; MAX_POLY_VARS];
        loop {
            skip_ws(&mut i);
            if i >= b.len() {
                return Err(err(i, "expected factor"));
            }
            if b[i].is_ascii_digit() {
                coef *= read_int(&mut i).expect("digit present");
            } else if b[i] == b'x' {
                let at = i;
                i += 1;
                let v = read_int(&mut i).ok_or_else(|| err(at, "expected variable index"))?;
                let v = v.to_usize().filter(|&v| v < nvars).ok_or_else(|| {
                    err(at, &format!("variable index out of range 0..{nvars}"))
                })?;
                let mut e = 1u32;
                skip_ws(&mut i);
                if i < b.len() && b[i] == b'^' {
                    i += 1;
                    skip_ws(&mut i);
                    e = read_int(&mut i)
                        .and_then(|x| x.to_u32())
                        .ok_or_else(|| err(i, "expected exponent"))?;
                }
                let total = exps[v] as u32 + e;
                if total > u8::MAX as u32 {
                    return Err(err(at, "exponent too large"));
                }
                exps[v] = total as u8;
            } else {
                return Err(err(i, "unexpected character"));
            }
            skip_ws(&mut i);
            if i < b.len() && b[i] == b'*' {
                i += 1;
                continue;
            }
            break;
        }
        terms.push((Mono::new(&exps), BigRational::from_integer(coef)));
    }
    Ok(SparsePolynomial::from_terms(RationalField, nvars, terms))
}

/// Symmetric lift of a residue to (−p/2, p/2].
pub fn symmetric_lift(a: u64, p: u64) -> i64 {
    if a > p / 2 {
        a as i64 - p as i64
    } else {
        a as i64
    }
}
