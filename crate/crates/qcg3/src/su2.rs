//! Rank-1 quantum Clebsch-Gordan coefficients.
//!
//! Two independent evaluation routes are provided: the closed-form k-sum and
//! the terminating basic-hypergeometric series. They agree as field elements;
//! the test suites cross-check them numerically to 10^-50.

use crate::error::Result;
use crate::half::Half;
use crate::qscalar::{
    q_factorial, scalar_sqrt_ratio, Backend, BigFixed, QExponentPoly, RadicalMonomial, Scalar,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LadderDirection {
    Raise,
    Lower,
}

/// A state |j, m> of a spin-j multiplet.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Su2State {
    pub j: Half,
    pub m: Half,
}

impl Su2State {
    pub fn new(j: Half, m: Half) -> Option<Su2State> {
        if j.is_negative() || m.abs() > j || !j.same_class(m) {
            return None;
        }
        Some(Su2State { j, m })
    }
}

/// Ladder matrix element sqrt([j -+ m][j +- m + 1]); stepping outside the
/// multiplet annihilates (returns 0).
pub fn su2_ladder_factor(j: Half, m: Half, direction: LadderDirection, backend: &Backend) -> Scalar {
    let (a, b) = match direction {
        LadderDirection::Lower => (j + m, j - m + Half::int(1)),
        LadderDirection::Raise => (j - m, j + m + Half::int(1)),
    };
    let (a, b) = match (a.integer(), b.integer()) {
        (Some(a), Some(b)) => (a, b),
        _ => return backend.zero(),
    };
    if a <= 0 || b <= 0 || m.abs() > j {
        return backend.zero();
    }
    scalar_sqrt_ratio(&[a as u32, b as u32], &[], backend)
}

/// Index set of one coefficient. Selection rules (projection additivity and
/// the triangle condition) are not an error: violating keys give 0.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Su2CgKey {
    pub j1: Half,
    pub j2: Half,
    pub m1: Half,
    pub m2: Half,
    pub j: Half,
    pub m: Half,
}

impl Su2CgKey {
    /// True when every selection rule holds, so the coefficient can be
    /// nonzero.
    pub fn is_allowed(&self) -> bool {
        let Su2CgKey { j1, j2, m1, m2, j, m } = *self;
        if j1.is_negative() || j2.is_negative() || j.is_negative() {
            return false;
        }
        // projections must live in their multiplets, on the right lattice
        if !j1.same_class(m1) || !j2.same_class(m2) || !j.same_class(m) {
            return false;
        }
        if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
            return false;
        }
        if m1 + m2 != m {
            return false;
        }
        // triangle delta(j1 j2 j), and j1+j2+j must be an integer
        if !(j1 + j2).same_class(j) {
            return false;
        }
        (j1 - j2).abs() <= j && j <= j1 + j2
    }
}

/// One summand of a sum of q-factorial ratios: `sign * q^(quarters/4) *
/// prod [n]! / prod [d]!`.
struct RatioTerm {
    negative: bool,
    quarters: i64,
    num_fact: Vec<i64>,
    den_fact: Vec<i64>,
}

/// Sum the ratio terms. The exact route brings all terms over the common
/// q-integer denominator so the result is a single radical monomial; the
/// numeric route evaluates term by term.
fn factorial_ratio_sum(terms: &[RatioTerm], backend: &Backend) -> Scalar {
    debug_assert!(terms
        .iter()
        .all(|t| t.num_fact.iter().chain(&t.den_fact).all(|&a| a >= 0)));
    match backend {
        Backend::Numeric { ctx } => {
            let mut acc = BigFixed::zero(ctx.bits);
            for t in terms {
                let mut v = ctx.q_quarter_pow(t.quarters);
                for &a in &t.num_fact {
                    for l in 2..=a {
                        v = &v * &ctx.q_number(l);
                    }
                }
                for &a in &t.den_fact {
                    for l in 2..=a {
                        v = &v / &ctx.q_number(l);
                    }
                }
                if t.negative {
                    v = -&v;
                }
                acc = &acc + &v;
            }
            Scalar::numeric(acc, ctx.digits)
        }
        Backend::Exact { .. } => {
            use std::collections::BTreeMap;
            // per-term denominator label multisets and their common maximum
            let mut term_dens: Vec<BTreeMap<u32, u32>> = Vec::with_capacity(terms.len());
            let mut common: BTreeMap<u32, u32> = BTreeMap::new();
            for t in terms {
                let mut den: BTreeMap<u32, u32> = BTreeMap::new();
                for &a in &t.den_fact {
                    for l in 2..=a {
                        *den.entry(l as u32).or_insert(0) += 1;
                    }
                }
                for (l, m) in &den {
                    let e = common.entry(*l).or_insert(0);
                    *e = (*e).max(*m);
                }
                term_dens.push(den);
            }
            let mut total = QExponentPoly::zero();
            for (t, den) in terms.iter().zip(&term_dens) {
                let mut p = QExponentPoly::monomial(
                    if t.negative {
                        -num_rational::BigRational::from(num_bigint::BigInt::from(1))
                    } else {
                        num_rational::BigRational::from(num_bigint::BigInt::from(1))
                    },
                    t.quarters,
                );
                for &a in &t.num_fact {
                    p = &p * &QExponentPoly::q_factorial(a);
                }
                for (l, cm) in &common {
                    let short = cm - den.get(l).copied().unwrap_or(0);
                    for _ in 0..short {
                        p = &p * &QExponentPoly::q_number(*l as i64);
                    }
                }
                total = &total + &p;
            }
            // value = total / prod(common) = total * sqrt(1 / prod(common)^2)
            let mut den_labels: Vec<u32> = Vec::new();
            for (l, m) in &common {
                for _ in 0..2 * m {
                    den_labels.push(*l);
                }
            }
            Scalar::from_monomial(RadicalMonomial::new(total, &[], &den_labels))
        }
    }
}

/// Quarter-exponent of the closed form's q-power prefactor:
/// (1/4)(j2(j2+1) - j1(j1+1) - j(j+1)) + m1(m+1)/2, exact on the quarter
/// lattice for every allowed key.
fn phase_exponent_quarters(key: &Su2CgKey) -> i64 {
    let (p1, p2, p) = (key.j1.doubled(), key.j2.doubled(), key.j.doubled());
    let (c1, c) = (key.m1.doubled(), key.m.doubled());
    let num = p2 * (p2 + 2) - p1 * (p1 + 2) - p * (p + 2) + 2 * (c + 2) * c1;
    debug_assert_eq!(num % 4, 0, "phase exponent must land on the quarter lattice");
    num / 4
}

fn factorial_labels(args: &[i64]) -> Vec<u32> {
    RadicalMonomial::factorial_labels(args)
}

/// Closed-form coefficient: phase, q-power, square-root prefactor and the
/// k-sum with k restricted so no factorial argument goes negative.
pub fn su2_qcg(key: &Su2CgKey, backend: &Backend) -> Scalar {
    if !key.is_allowed() {
        return backend.zero();
    }
    let Su2CgKey { j1, j2, m1, m2, j, m } = *key;
    let i = |h: Half| h.integer().expect("allowed keys have integer combinations");

    let phase_neg = i(j1 - m1) % 2 != 0;
    let quarters = phase_exponent_quarters(key);

    let mut num_labels = vec![(j.doubled() + 1) as u32];
    num_labels.extend(factorial_labels(&[
        i(j1 + j2 - j),
        i(j1 - m1),
        i(j2 - m2),
        i(j + m),
        i(j - m),
    ]));
    let den_labels = factorial_labels(&[
        i(j + j1 + j2 + Half::int(1)),
        i(j + j1 - j2),
        i(j + j2 - j1),
        i(j1 + m1),
        i(j2 + m2),
    ]);
    let root = scalar_sqrt_ratio(&num_labels, &den_labels, backend);

    let lo = 0.max(i(j - j2 - m1));
    let hi = i(j - m).min(i(j1 - m1));
    let mut terms = Vec::new();
    for k in lo..=hi {
        terms.push(RatioTerm {
            negative: k % 2 != 0,
            // q^(k(j+m+1)/2) in quarter units
            quarters: k * (j.doubled() + m.doubled() + 2),
            num_fact: vec![i(j2 + j - m1) - k, i(j1 + m1) + k],
            den_fact: vec![k, i(j - m) - k, i(j2 - j + m1) + k, i(j1 - m1) - k],
        });
    }
    let ksum = factorial_ratio_sum(&terms, backend);

    let mut out = &(&backend.q_power(quarters) * &root) * &ksum;
    if phase_neg {
        out = -&out;
    }
    out
}

/// The same coefficient through the terminating basic-hypergeometric series.
///
/// The series parameters are integer powers of q; combining the series with
/// its factorial-ratio prefactor regularizes the keys where that prefactor's
/// denominator factorial has a negative argument (the sum then simply starts
/// at a positive index). Numerically the series is evaluated by term-ratio
/// recursion over the q-Pochhammer factors.
pub fn su2_qcg_hypergeometric(key: &Su2CgKey, backend: &Backend) -> Scalar {
    if !key.is_allowed() {
        return backend.zero();
    }
    let Su2CgKey { j1, j2, m1, m2, j, m } = *key;
    let i = |h: Half| h.integer().expect("allowed keys have integer combinations");

    let phase_neg = i(j1 - m1) % 2 != 0;
    let quarters = phase_exponent_quarters(key);

    let mut num_labels = vec![(j.doubled() + 1) as u32];
    num_labels.extend(factorial_labels(&[
        i(j1 + j2 - j),
        i(j + m),
        i(j1 + m1),
        i(j2 - m2),
    ]));
    let den_labels = factorial_labels(&[
        i(j + j1 + j2 + Half::int(1)),
        i(j + j1 - j2),
        i(j - j1 + j2),
        i(j - m),
        i(j1 - m1),
        i(j2 + m2),
    ]);
    let root = scalar_sqrt_ratio(&num_labels, &den_labels, backend);

    // series data: a1 = q^-u, a2 = q^-v, a3 = q^(w+1); b1 = q^-g, b2 = q^(beta+1)
    let u = i(j - m);
    let v = i(j1 - m1);
    let w = i(j1 + m1);
    let g = i(j2 + j - m1);
    let beta = i(j2 - j + m1);
    let start = 0.max(-beta);
    let stop = u.min(v);
    let series = match backend {
        Backend::Exact { .. } => {
            let mut terms = Vec::new();
            for n in start..=stop {
                terms.push(RatioTerm {
                    negative: n % 2 != 0,
                    quarters: n * (j.doubled() + m.doubled() + 2),
                    num_fact: vec![u, v, w + n, g - n],
                    den_fact: vec![u - n, v - n, w, beta + n, n],
                });
            }
            factorial_ratio_sum(&terms, backend)
        }
        Backend::Numeric { ctx } => {
            // first nonvanishing combined term, computed directly
            let first = RatioTerm {
                negative: start % 2 != 0,
                quarters: start * (j.doubled() + m.doubled() + 2),
                num_fact: vec![u, v, w + start, g - start],
                den_fact: vec![u - start, v - start, w, beta + start, start],
            };
            let mut term = factorial_ratio_sum(&[first], backend).eval(ctx);
            let mut acc = term.clone();
            let one = BigFixed::one(ctx.bits);
            let pow = |e: i64| ctx.q_quarter_pow(4 * e);
            for n in start..stop {
                // T_{n+1}/T_n over the Pochhammer factors, z = q
                let numer = &(&(&one - &pow(n - u)) * &(&one - &pow(n - v)))
                    * &(&one - &pow(w + 1 + n));
                let denom = &(&(&one - &pow(n - g)) * &(&one - &pow(beta + 1 + n)))
                    * &(&one - &pow(n + 1));
                term = &(&term * &numer) / &denom;
                term = &term * &ctx.q_quarter_pow(4);
                acc = &acc + &term;
            }
            if start > stop {
                acc = BigFixed::zero(ctx.bits);
            }
            Scalar::numeric(acc, ctx.digits)
        }
    };

    let mut out = &(&backend.q_power(quarters) * &root) * &series;
    if phase_neg {
        out = -&out;
    }
    out
}

/// All coefficients of a (j1, j2) block, ordered by (j desc from j1+j2, m
/// desc, m1 desc): ((j, m), (m1, m2), value).
pub fn su2_table(j1: Half, j2: Half, backend: &Backend) -> Vec<((Half, Half), (Half, Half), Scalar)> {
    let mut out = Vec::new();
    let mut pj = j1.doubled() + j2.doubled();
    while pj >= (j1 - j2).abs().doubled() {
        let j = Half::twice(pj);
        let mut pm = pj;
        while pm >= -pj {
            let m = Half::twice(pm);
            let mut p1 = j1.doubled();
            while p1 >= -j1.doubled() {
                let m1 = Half::twice(p1);
                let m2 = m - m1;
                if m2.abs() <= j2 && j2.same_class(m2) {
                    let key = Su2CgKey { j1, j2, m1, m2, j, m };
                    out.push(((j, m), (m1, m2), su2_qcg(&key, backend)));
                }
                p1 -= 2;
            }
            pm -= 2;
        }
        pj -= 2;
    }
    out
}

/// Maximum absolute deviation of both orthogonality relations over the full
/// (j1, j2) block, evaluated numerically.
pub fn su2_orthogonality_residual(j1: Half, j2: Half, backend: &Backend) -> BigFixed {
    let ctx = backend.context();
    let table = su2_table(j1, j2, backend);
    // dense numeric matrix: rows (j, m), columns (m1, m2)
    let mut rows: Vec<(Half, Half)> = Vec::new();
    let mut cols: Vec<(Half, Half)> = Vec::new();
    for ((j, m), (m1, m2), _) in &table {
        if !rows.contains(&(*j, *m)) {
            rows.push((*j, *m));
        }
        if !cols.contains(&(*m1, *m2)) {
            cols.push((*m1, *m2));
        }
    }
    let zero = BigFixed::zero(ctx.bits);
    let mut mat = vec![vec![zero.clone(); cols.len()]; rows.len()];
    for ((j, m), (m1, m2), c) in &table {
        let r = rows.iter().position(|x| x == &(*j, *m)).unwrap();
        let cidx = cols.iter().position(|x| x == &(*m1, *m2)).unwrap();
        mat[r][cidx] = c.eval(ctx);
    }
    let one = BigFixed::one(ctx.bits);
    let mut max = zero.clone();
    // first relation: row . row' = delta (the triangle condition already
    // restricts rows to |j1-j2| <= j <= j1+j2)
    for (r1, row1) in mat.iter().enumerate() {
        for (r2, row2) in mat.iter().enumerate() {
            let mut acc = zero.clone();
            for c in 0..cols.len() {
                acc = &acc + &(&row1[c] * &row2[c]);
            }
            let expect = if r1 == r2 { one.clone() } else { zero.clone() };
            let dev = (&acc - &expect).abs();
            if dev > max {
                max = dev;
            }
        }
    }
    // second relation: column . column' = delta
    for c1 in 0..cols.len() {
        for c2 in 0..cols.len() {
            let mut acc = zero.clone();
            for row in &mat {
                acc = &acc + &(&row[c1] * &row[c2]);
            }
            let expect = if c1 == c2 { one.clone() } else { zero.clone() };
            let dev = (&acc - &expect).abs();
            if dev > max {
                max = dev;
            }
        }
    }
    max
}

/// Classical (q = 1) coefficient by the standard closed formula, in f64.
/// This is the independent oracle for the classical-limit checks.
pub fn classical_cg(key: &Su2CgKey) -> f64 {
    if !key.is_allowed() {
        return 0.0;
    }
    let Su2CgKey { j1, j2, m1, m2, j, m } = *key;
    let i = |h: Half| h.integer().expect("allowed keys have integer combinations");
    fn fact(n: i64) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }
    let norm = ((j.doubled() + 1) as f64
        * fact(i(j1 + j2 - j))
        * fact(i(j + j1 - j2))
        * fact(i(j + j2 - j1))
        / fact(i(j + j1 + j2 + Half::int(1))))
    .sqrt()
        * (fact(i(j + m))
            * fact(i(j - m))
            * fact(i(j1 + m1))
            * fact(i(j1 - m1))
            * fact(i(j2 + m2))
            * fact(i(j2 - m2)))
        .sqrt();
    let lo = 0
        .max(i(j2 - j - m1))
        .max(i(j1 + m2 - j));
    let hi = i(j1 + j2 - j).min(i(j1 - m1)).min(i(j2 + m2));
    let mut sum = 0.0;
    for k in lo..=hi {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign
            / (fact(k)
                * fact(i(j1 + j2 - j) - k)
                * fact(i(j1 - m1) - k)
                * fact(i(j2 + m2) - k)
                * fact(i(j - j2 + m1) + k)
                * fact(i(j - j1 - m2) + k));
    }
    norm * sum
}

/// Result of [`q_factorial`] lifted over half-integers, for callers that have
/// already checked integrality.
pub fn q_factorial_half(h: Half, backend: &Backend) -> Result<Scalar> {
    match h.integer() {
        Some(n) => q_factorial(n, backend),
        None => Err(crate::error::Error::Domain(format!(
            "factorial argument {h} is not an integer"
        ))),
    }
}
