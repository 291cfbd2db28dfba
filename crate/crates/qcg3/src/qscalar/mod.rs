//! Exact and arbitrary-precision arithmetic for q-deformed quantities.
//!
//! The exact backend represents values as formal sums of radical monomials
//! `c * q^(e/4) * sqrt(product of q-integers / product of q-integers)`, the
//! field all the closed-form coefficients live in. The numeric backend is a
//! fixed-point real of configurable decimal precision evaluated at a generic
//! rational q. A backend tag is fixed per computation run; mixing backends in
//! one arithmetic operation is a programming error and panics.

pub mod bigfloat;
pub mod qpoly;
pub mod radical;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
pub use bigfloat::BigFixed;
pub use qpoly::QExponentPoly;
pub use radical::{Radicand, RadicalMonomial};

/// Evaluation environment for the numeric backend (and for the exact
/// backend's probabilistic zero probe): a generic rational q and a decimal
/// precision.
pub struct NumericContext {
    pub digits: u32,
    pub bits: u32,
    q: BigRational,
    q_quarter: BigFixed,
    q_quarter_inv: BigFixed,
    q_numbers: Vec<BigFixed>,
}

const QNUM_CACHE: usize = 128;

impl NumericContext {
    pub fn new(q: BigRational, digits: u32) -> NumericContext {
        assert!(q.is_positive(), "generic q must be positive");
        assert!(!q.is_one(), "generic q must differ from 1");
        let bits = bigfloat::bits_for_digits(digits);
        let qf = BigFixed::from_rational(&q, bits);
        let q_quarter = qf.sqrt().sqrt();
        let q_quarter_inv = q_quarter.recip();
        let mut ctx = NumericContext {
            digits,
            bits,
            q,
            q_quarter,
            q_quarter_inv,
            q_numbers: Vec::new(),
        };
        let mut cache = Vec::with_capacity(QNUM_CACHE);
        for n in 0..QNUM_CACHE {
            cache.push(ctx.q_number_direct(n as i64));
        }
        ctx.q_numbers = cache;
        ctx
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    /// `q^(quarters/4)`.
    pub fn q_quarter_pow(&self, quarters: i64) -> BigFixed {
        if quarters >= 0 {
            self.q_quarter.powi(quarters)
        } else {
            self.q_quarter_inv.powi(-quarters)
        }
    }

    fn q_number_direct(&self, n: i64) -> BigFixed {
        let num = &self.q_quarter_pow(2 * n) - &self.q_quarter_pow(-2 * n);
        let den = &self.q_quarter_pow(2) - &self.q_quarter_pow(-2);
        &num / &den
    }

    /// The q-number [n] at this context's q; [-n] = -[n].
    pub fn q_number(&self, n: i64) -> BigFixed {
        let a = n.unsigned_abs() as usize;
        let v = if a < self.q_numbers.len() {
            self.q_numbers[a].clone()
        } else {
            self.q_number_direct(a as i64)
        };
        if n < 0 {
            -&v
        } else {
            v
        }
    }

    /// `10^-(digits - margin)`, the standard tolerance ladder.
    pub fn threshold(&self, margin: u32) -> BigFixed {
        BigFixed::pow10_neg(self.digits.saturating_sub(margin), self.bits)
    }
}

/// Which scalar field a computation runs in. Carries the numeric context
/// either as the working field (numeric) or as the zero-probe configuration
/// (exact; default probe q = 9/10 at 60 digits).
#[derive(Clone)]
pub enum Backend {
    Exact { probe: Arc<NumericContext> },
    Numeric { ctx: Arc<NumericContext> },
}

impl Backend {
    pub fn exact() -> Backend {
        Backend::exact_with_probe(BigRational::new(BigInt::from(9), BigInt::from(10)), 60)
    }

    pub fn exact_with_probe(q: BigRational, digits: u32) -> Backend {
        Backend::Exact { probe: Arc::new(NumericContext::new(q, digits)) }
    }

    pub fn numeric(q: BigRational, digits: u32) -> Backend {
        Backend::Numeric { ctx: Arc::new(NumericContext::new(q, digits)) }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Exact { .. })
    }

    /// The numeric context: the working field for numeric runs, the probe for
    /// exact runs.
    pub fn context(&self) -> &NumericContext {
        match self {
            Backend::Exact { probe } => probe,
            Backend::Numeric { ctx } => ctx,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Backend::Exact { .. } => Scalar::Exact(ExactValue::default()),
            Backend::Numeric { ctx } => Scalar::numeric(BigFixed::zero(ctx.bits), ctx.digits),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, r: BigRational) -> Scalar {
        match self {
            Backend::Exact { .. } => {
                Scalar::from_monomial(RadicalMonomial::from_poly(QExponentPoly::monomial(r, 0)))
            }
            Backend::Numeric { ctx } => {
                Scalar::numeric(BigFixed::from_rational(&r, ctx.bits), ctx.digits)
            }
        }
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_rational(BigRational::from(BigInt::from(n)))
    }

    /// `q^(quarters/4)`.
    pub fn q_power(&self, quarters: i64) -> Scalar {
        match self {
            Backend::Exact { .. } => Scalar::from_monomial(RadicalMonomial::from_poly(
                QExponentPoly::monomial(BigRational::one(), quarters),
            )),
            Backend::Numeric { ctx } => Scalar::numeric(ctx.q_quarter_pow(quarters), ctx.digits),
        }
    }
}

type RadicalSum = BTreeMap<Radicand, QExponentPoly>;

/// Exact value: `(sum of radical monomials) / sqrt(sum of radical monomials)`.
/// The denominator is almost always absent; it appears only on states that
/// went through Gram-Schmidt, whose normalization is an inverse square root
/// of a formal sum.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExactValue {
    terms: RadicalSum,
    rsqrt_den: Option<RadicalSum>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct NumericValue {
    pub value: BigFixed,
    pub digits: u32,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Exact(ExactValue),
    Numeric(NumericValue),
}

fn sum_insert(map: &mut RadicalSum, mono: RadicalMonomial) {
    if mono.is_zero() {
        return;
    }
    match map.entry(mono.radicand.clone()) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(mono.poly);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let merged = &*e.get() + &mono.poly;
            if merged.is_zero() {
                e.remove();
                return;
            }
            // merging can make a denominator pair divisible when the
            // individual polynomials were not; re-canonicalize
            let mut remerged = RadicalMonomial { poly: merged, radicand: mono.radicand };
            remerged.canonicalize();
            if remerged.radicand == *e.key() {
                *e.get_mut() = remerged.poly;
            } else {
                e.remove();
                sum_insert(map, remerged);
            }
        }
    }
}

fn sum_add(a: &RadicalSum, b: &RadicalSum, negate_b: bool) -> RadicalSum {
    let mut out = a.clone();
    for (rad, poly) in b {
        let poly = if negate_b { -poly } else { poly.clone() };
        sum_insert(&mut out, RadicalMonomial { poly, radicand: rad.clone() });
    }
    out
}

fn sum_mul(a: &RadicalSum, b: &RadicalSum) -> RadicalSum {
    let mut out = RadicalSum::new();
    for (ra, pa) in a {
        let ma = RadicalMonomial { poly: pa.clone(), radicand: ra.clone() };
        for (rb, pb) in b {
            let mb = RadicalMonomial { poly: pb.clone(), radicand: rb.clone() };
            sum_insert(&mut out, ma.mul(&mb));
        }
    }
    out
}

fn sum_eval(map: &RadicalSum, ctx: &NumericContext) -> BigFixed {
    let mut acc = BigFixed::zero(ctx.bits);
    for (rad, poly) in map {
        let m = RadicalMonomial { poly: poly.clone(), radicand: rad.clone() };
        acc = &acc + &m.eval(ctx);
    }
    acc
}

impl Scalar {
    pub fn numeric(value: BigFixed, digits: u32) -> Scalar {
        Scalar::Numeric(NumericValue { value, digits })
    }

    pub fn from_monomial(m: RadicalMonomial) -> Scalar {
        let mut terms = RadicalSum::new();
        sum_insert(&mut terms, m);
        Scalar::Exact(ExactValue { terms, rsqrt_den: None })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Structural zero test (no numeric probe); sufficient after canonical
    /// merging unless distinct radicand classes survive.
    pub fn is_structurally_zero(&self) -> bool {
        match self {
            Scalar::Exact(e) => e.terms.is_empty(),
            Scalar::Numeric(n) => n.value.is_zero(),
        }
    }

    /// Evaluate at the given context (the identity for numeric values, which
    /// are assumed to come from the same context).
    pub fn eval(&self, ctx: &NumericContext) -> BigFixed {
        match self {
            Scalar::Numeric(n) => n.value.clone(),
            Scalar::Exact(e) => {
                let num = sum_eval(&e.terms, ctx);
                match &e.rsqrt_den {
                    None => num,
                    Some(d) => &num / &sum_eval(d, ctx).sqrt(),
                }
            }
        }
    }

    /// Divide by the square root of `den` (which must be a plain sum, the
    /// squared norm of a state). Exact values keep the denominator formal.
    pub fn div_by_sqrt_of(&self, den: &Scalar) -> Scalar {
        match (self, den) {
            (Scalar::Numeric(a), Scalar::Numeric(b)) => {
                Scalar::numeric(&a.value / &b.value.sqrt(), a.digits)
            }
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                assert!(
                    a.rsqrt_den.is_none() && b.rsqrt_den.is_none(),
                    "nested formal normalization denominators"
                );
                if b.terms.len() == 1 {
                    let (rad, poly) = b.terms.iter().next().unwrap();
                    let mono = RadicalMonomial { poly: poly.clone(), radicand: rad.clone() };
                    if mono_is_one(&mono) {
                        return self.clone();
                    }
                    if let Some(root) = try_monomial_sqrt(&mono) {
                        if let Some(inv) = root.try_invert() {
                            let mut terms = RadicalSum::new();
                            for (r, p) in &a.terms {
                                let m = RadicalMonomial { poly: p.clone(), radicand: r.clone() };
                                sum_insert(&mut terms, m.mul(&inv));
                            }
                            return Scalar::Exact(ExactValue { terms, rsqrt_den: None });
                        }
                    }
                }
                Scalar::Exact(ExactValue {
                    terms: a.terms.clone(),
                    rsqrt_den: Some(b.terms.clone()),
                })
            }
            _ => panic!("mixed scalar backends"),
        }
    }
}

fn mono_is_one(m: &RadicalMonomial) -> bool {
    m.radicand.is_trivial() && m.poly.is_one()
}

/// Square root of a monomial when it stays in monomial form: trivial
/// radicand, single polynomial term with an even quarter-exponent and a
/// rational coefficient that is a perfect square.
fn try_monomial_sqrt(m: &RadicalMonomial) -> Option<RadicalMonomial> {
    if !m.radicand.is_trivial() {
        return None;
    }
    let mut it = m.poly.terms();
    let (e, c) = it.next()?;
    if it.next().is_some() || e % 2 != 0 || c.is_negative() {
        return None;
    }
    let num = c.numer().sqrt();
    let den = c.denom().sqrt();
    if &(&num * &num) != c.numer() || &(&den * &den) != c.denom() {
        return None;
    }
    Some(RadicalMonomial::from_poly(QExponentPoly::monomial(
        BigRational::new(num, den),
        e / 2,
    )))
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                match (&a.rsqrt_den, &b.rsqrt_den) {
                    (None, None) => Scalar::Exact(ExactValue {
                        terms: sum_add(&a.terms, &b.terms, false),
                        rsqrt_den: None,
                    }),
                    (da, db) if da == db => Scalar::Exact(ExactValue {
                        terms: sum_add(&a.terms, &b.terms, false),
                        rsqrt_den: da.clone(),
                    }),
                    _ => panic!("sum of exact scalars with incompatible normalization denominators"),
                }
            }
            (Scalar::Numeric(a), Scalar::Numeric(b)) => {
                Scalar::numeric(&a.value + &b.value, a.digits)
            }
            _ => panic!("mixed scalar backends"),
        }
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &-rhs
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(ExactValue {
                terms: a.terms.iter().map(|(r, p)| (r.clone(), -p)).collect(),
                rsqrt_den: a.rsqrt_den.clone(),
            }),
            Scalar::Numeric(a) => Scalar::numeric(-&a.value, a.digits),
        }
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                let rsqrt_den = match (&a.rsqrt_den, &b.rsqrt_den) {
                    (None, None) => None,
                    (Some(d), None) | (None, Some(d)) => Some(d.clone()),
                    (Some(d1), Some(d2)) => Some(sum_mul(d1, d2)),
                };
                Scalar::Exact(ExactValue { terms: sum_mul(&a.terms, &b.terms), rsqrt_den })
            }
            (Scalar::Numeric(a), Scalar::Numeric(b)) => {
                Scalar::numeric(&a.value * &b.value, a.digits)
            }
            _ => panic!("mixed scalar backends"),
        }
    }
}

// ---------------------------------------------------------------------------
// the q-arithmetic operations
// ---------------------------------------------------------------------------

/// The q-number [n] = (q^(n/2) - q^(-n/2)) / (q^(1/2) - q^(-1/2)).
pub fn q_number(n: i64, backend: &Backend) -> Scalar {
    match backend {
        Backend::Exact { .. } => Scalar::from_monomial(RadicalMonomial::from_poly(
            QExponentPoly::q_number(n),
        )),
        Backend::Numeric { ctx } => Scalar::numeric(ctx.q_number(n), ctx.digits),
    }
}

/// [n]! = [1][2]...[n]; [0]! = 1. Negative arguments are a domain error that
/// signals an out-of-range term the caller must skip instead.
pub fn q_factorial(n: i64, backend: &Backend) -> Result<Scalar> {
    if n < 0 {
        return Err(Error::NegativeFactorial(n));
    }
    match backend {
        Backend::Exact { .. } => Ok(Scalar::from_monomial(RadicalMonomial::from_poly(
            QExponentPoly::q_factorial(n),
        ))),
        Backend::Numeric { ctx } => {
            let mut acc = BigFixed::one(ctx.bits);
            for m in 2..=n {
                acc = &acc * &ctx.q_number(m);
            }
            Ok(Scalar::numeric(acc, ctx.digits))
        }
    }
}

/// q-Pochhammer symbol (x; q)_n = prod_{k=0}^{n-1} (1 - x q^k).
pub fn q_pochhammer(x: &Scalar, n: u32, backend: &Backend) -> Scalar {
    let one = backend.one();
    let mut acc = backend.one();
    for k in 0..n {
        let factor = &one - &(x * &backend.q_power(4 * k as i64));
        acc = &acc * &factor;
    }
    acc
}

/// `sqrt(prod [n] / prod [d])` from q-integer label lists.
pub fn scalar_sqrt_ratio(num: &[u32], den: &[u32], backend: &Backend) -> Scalar {
    assert!(
        num.iter().chain(den).all(|&l| l > 0),
        "q-integer labels under a radical must be positive"
    );
    match backend {
        Backend::Exact { .. } => {
            Scalar::from_monomial(RadicalMonomial::new(QExponentPoly::one(), num, den))
        }
        Backend::Numeric { ctx } => {
            let mut acc = BigFixed::one(ctx.bits);
            for &l in num {
                acc = &acc * &ctx.q_number(l as i64);
            }
            for &l in den {
                acc = &acc / &ctx.q_number(l as i64);
            }
            Scalar::numeric(acc.sqrt(), ctx.digits)
        }
    }
}

/// The Gaussian binomial [n]! / ([k]! [n-k]!), a Laurent polynomial.
pub fn q_binomial(n: i64, k: i64, backend: &Backend) -> Scalar {
    assert!(0 <= k && k <= n, "q-binomial out of range: ({n}, {k})");
    match backend {
        Backend::Exact { .. } => {
            let num = QExponentPoly::q_factorial(n);
            let p = num
                .try_div_exact(&QExponentPoly::q_factorial(k))
                .and_then(|p| p.try_div_exact(&QExponentPoly::q_factorial(n - k)))
                .expect("Gaussian binomials are exact polynomials");
            Scalar::from_monomial(RadicalMonomial::from_poly(p))
        }
        Backend::Numeric { ctx } => {
            let mut acc = BigFixed::one(ctx.bits);
            for l in (n - k + 1)..=n {
                acc = &acc * &ctx.q_number(l);
            }
            for l in 2..=k {
                acc = &acc / &ctx.q_number(l);
            }
            Scalar::numeric(acc, ctx.digits)
        }
    }
}

impl Scalar {
    /// `1 / self` when representable without leaving the backend's canonical
    /// form: any nonzero numeric value, or an exact value that is a single
    /// invertible monomial (which every ladder-normalization factor is).
    pub fn try_recip(&self) -> Option<Scalar> {
        match self {
            Scalar::Numeric(n) => {
                if n.value.is_zero() {
                    None
                } else {
                    Some(Scalar::numeric(n.value.recip(), n.digits))
                }
            }
            Scalar::Exact(e) => {
                if e.rsqrt_den.is_some() || e.terms.len() != 1 {
                    return None;
                }
                let (rad, poly) = e.terms.iter().next().unwrap();
                let mono = RadicalMonomial { poly: poly.clone(), radicand: rad.clone() };
                mono.try_invert().map(Scalar::from_monomial)
            }
        }
    }
}

/// Zero test. Exact sums that still hold several distinct radicand classes
/// after canonical merging fall back to a probabilistic probe: numeric
/// evaluation at the configured generic q against a threshold of
/// 10^-(digits-10).
pub fn scalar_equal_zero(a: &Scalar, backend: &Backend) -> bool {
    match a {
        Scalar::Numeric(n) => n.value.abs() <= backend.context().threshold(10),
        Scalar::Exact(e) => {
            if e.terms.is_empty() {
                return true;
            }
            if e.terms.len() == 1 {
                // a single nonzero monomial is never identically zero
                return false;
            }
            let ctx = backend.context();
            sum_eval(&e.terms, ctx).abs() <= ctx.threshold(10)
        }
    }
}

pub fn scalar_equal(a: &Scalar, b: &Scalar, backend: &Backend) -> bool {
    match (a, b) {
        (Scalar::Exact(ea), Scalar::Exact(eb)) if ea.rsqrt_den != eb.rsqrt_den => {
            // different formal normalizations: compare numerically
            let ctx = backend.context();
            (&a.eval(ctx) - &b.eval(ctx)).abs() <= ctx.threshold(10)
        }
        _ => scalar_equal_zero(&(a - b), backend),
    }
}

// ---------------------------------------------------------------------------
// canonical string form
// ---------------------------------------------------------------------------

fn format_qpow(quarters: i64) -> String {
    let g = num_integer::gcd(quarters.abs(), 4);
    let num = quarters / g;
    let den = 4 / g;
    if den == 1 {
        format!("q^({num})")
    } else {
        format!("q^({num}/{den})")
    }
}

fn format_sum(terms: &RadicalSum) -> String {
    // flatten to (exponent, coefficient, radicand) triples, ordered by
    // exponent then radicand
    let mut flat: Vec<(i64, &Radicand, BigRational)> = Vec::new();
    for (rad, poly) in terms {
        for (e, c) in poly.terms() {
            flat.push((e, rad, c.clone()));
        }
    }
    flat.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    if flat.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (e, rad, c)) in flat.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mut pieces: Vec<String> = Vec::new();
        if !mag.is_one() || (*e == 0 && rad.is_trivial()) {
            pieces.push(mag.to_string());
        }
        if *e != 0 {
            pieces.push(format_qpow(*e));
        }
        if !rad.is_trivial() {
            pieces.push(format!("sqrt({rad})"));
        }
        out.push_str(&pieces.join("*"));
    }
    out
}

impl Scalar {
    /// Canonical string form. Exact values render as an ordered sum of
    /// `c*q^(e/4)*sqrt(...)` terms (with a `(...)/sqrt(...)` wrapper when a
    /// formal normalization denominator is present); numeric values render as
    /// plain decimal strings at their configured precision.
    pub fn to_canonical_string(&self) -> String {
        match self {
            Scalar::Numeric(n) => n.value.to_decimal(n.digits),
            Scalar::Exact(e) => match &e.rsqrt_den {
                None => format_sum(&e.terms),
                Some(d) => format!("({})/sqrt({})", format_sum(&e.terms), format_sum(d)),
            },
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical_string())
    }
}

// ---------------------------------------------------------------------------
// parsing the canonical form
// ---------------------------------------------------------------------------

/// Parse the canonical string form back into a scalar of the given backend.
pub fn parse_scalar(s: &str, backend: &Backend) -> Result<Scalar> {
    let s = s.trim();
    match backend {
        Backend::Numeric { ctx } => {
            let v = BigFixed::parse_decimal(s, ctx.bits)
                .ok_or_else(|| Error::Parse(format!("bad decimal scalar {s:?}")))?;
            Ok(Scalar::numeric(v, ctx.digits))
        }
        Backend::Exact { .. } => {
            if let Some(rest) = s.strip_prefix('(') {
                let close = find_matching_paren(rest)
                    .ok_or_else(|| Error::Parse(format!("unbalanced parens in {s:?}")))?;
                let num_str = &rest[..close];
                let tail = &rest[close + 1..];
                let den_str = tail
                    .strip_prefix("/sqrt(")
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("expected /sqrt(...) tail in {s:?}")))?;
                let num = parse_sum(num_str)?;
                let den = parse_sum(den_str)?;
                Ok(Scalar::Exact(ExactValue { terms: num, rsqrt_den: Some(den) }))
            } else {
                Ok(Scalar::Exact(ExactValue { terms: parse_sum(s)?, rsqrt_den: None }))
            }
        }
    }
}

fn find_matching_paren(s: &str) -> Option<usize> {
    let mut depth = 1usize;
    for (i, b) in s.bytes().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn parse_sum(s: &str) -> Result<RadicalSum> {
    let s = s.trim();
    let mut out = RadicalSum::new();
    if s == "0" {
        return Ok(out);
    }
    let tokens: Vec<&str> = s.split_whitespace().collect();
    if tokens.is_empty() || tokens.len() % 2 == 0 {
        return Err(Error::Parse(format!("malformed scalar sum {s:?}")));
    }
    sum_insert(&mut out, parse_term(tokens[0], false)?);
    let mut i = 1;
    while i < tokens.len() {
        let negate = match tokens[i] {
            "+" => false,
            "-" => true,
            other => return Err(Error::Parse(format!("expected + or -, got {other:?}"))),
        };
        sum_insert(&mut out, parse_term(tokens[i + 1], negate)?);
        i += 2;
    }
    Ok(out)
}

fn parse_term(t: &str, negate: bool) -> Result<RadicalMonomial> {
    let (neg_prefix, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let mut coef = BigRational::one();
    let mut quarters: i64 = 0;
    let mut num_labels: Vec<u32> = Vec::new();
    let mut den_labels: Vec<u32> = Vec::new();
    for factor in body.split('*') {
        if let Some(inner) = factor.strip_prefix("q^(").and_then(|f| f.strip_suffix(')')) {
            quarters = parse_exponent(inner)?;
        } else if let Some(inner) = factor.strip_prefix("sqrt(").and_then(|f| f.strip_suffix(')')) {
            let (num_part, den_part) = match inner.split_once('/') {
                Some((n, d)) => (n, Some(d)),
                None => (inner, None),
            };
            num_labels = parse_labels(num_part)?;
            if let Some(d) = den_part {
                den_labels = parse_labels(d)?;
            }
        } else {
            coef = factor
                .parse::<BigRational>()
                .map_err(|_| Error::Parse(format!("bad coefficient {factor:?}")))?;
        }
    }
    if neg_prefix != negate {
        coef = -coef;
    }
    Ok(RadicalMonomial::new(
        QExponentPoly::monomial(coef, quarters),
        &num_labels,
        &den_labels,
    ))
}

fn parse_exponent(s: &str) -> Result<i64> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?,
            d.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?,
        ),
        None => (s.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?, 1),
    };
    if den == 0 || 4 % den != 0 {
        return Err(Error::Parse(format!("exponent denominator must divide 4 in {s:?}")));
    }
    Ok(num * (4 / den))
}

fn parse_labels(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if s == "1" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('[')
            .ok_or_else(|| Error::Parse(format!("expected [n] in {s:?}")))?;
        let close = inner
            .find(']')
            .ok_or_else(|| Error::Parse(format!("unterminated [n] in {s:?}")))?;
        let label: u32 = inner[..close]
            .parse()
            .map_err(|_| Error::Parse(format!("bad q-integer label in {s:?}")))?;
        out.push(label);
        rest = &inner[close + 1..];
    }
    Ok(out)
}
