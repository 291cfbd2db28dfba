//! Independent brute-force verification.
//!
//! The generators are realized as explicit matrices on the ordered product
//! basis, built only from the single-factor ladder rule and the coproduct
//! twist. Everything downstream of the table builder is then checked by
//! plain linear algebra: weights, highest-weight annihilation, norms,
//! orthogonality, completeness and channel dimension tallies. The oracle
//! consumes finished coefficient tables only.

use serde::Serialize;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};

use crate::error::{Error, Result};
use crate::half::Half;
use crate::qscalar::{q_number, Backend, BigFixed, Scalar};
use crate::su2::{classical_cg, su2_ladder_factor, LadderDirection, Su2CgKey};
use crate::tensor::{qcg_table, CoupledState, QcgTable};
use crate::weights::{
    enumerate_weights, inner_product, RepLabel, RootIndex, WeightExpr, WeightVector,
};

/// Ordered kets of the product space, lexicographic in (A1, B1, A2, B2).
pub struct ProductBasis {
    pub rep1: RepLabel,
    pub rep2: RepLabel,
    pub kets: Vec<(WeightVector, WeightVector)>,
    index: BTreeMap<(WeightVector, WeightVector), usize>,
}

impl ProductBasis {
    pub fn new(rep1: RepLabel, rep2: RepLabel) -> ProductBasis {
        let mut kets = Vec::new();
        for (w1, _) in enumerate_weights(rep1) {
            for (w2, _) in enumerate_weights(rep2) {
                kets.push((w1, w2));
            }
        }
        kets.sort_by_key(|(w1, w2)| (w1.a, w1.b, w2.a, w2.b));
        let index = kets.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        ProductBasis { rep1, rep2, kets, index }
    }

    pub fn dim(&self) -> usize {
        self.kets.len()
    }

    pub fn position(&self, ket: &(WeightVector, WeightVector)) -> Option<usize> {
        self.index.get(ket).copied()
    }

    /// Coefficient vector of a coupled state over this basis.
    pub fn vector_of(&self, state: &CoupledState, backend: &Backend) -> Vec<Scalar> {
        let mut v = vec![backend.zero(); self.dim()];
        for (ket, c) in &state.terms {
            let i = self.position(ket).expect("state ket outside the product basis");
            v[i] = c.clone();
        }
        v
    }
}

/// Dense square matrix of scalars.
#[derive(Clone)]
pub struct ScalarMatrix {
    pub dim: usize,
    data: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zero(dim: usize, backend: &Backend) -> ScalarMatrix {
        ScalarMatrix { dim, data: vec![backend.zero(); dim * dim] }
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.dim + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Scalar) {
        let merged = &*self.get(r, c) + v;
        self.set(r, c, merged);
    }

    pub fn apply(&self, v: &[Scalar], backend: &Backend) -> Vec<Scalar> {
        let mut out = vec![backend.zero(); self.dim];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = backend.zero();
            for c in 0..self.dim {
                let m = self.get(r, c);
                if !m.is_structurally_zero() && !v[c].is_structurally_zero() {
                    acc = &acc + &(m * &v[c]);
                }
            }
            *slot = acc;
        }
        out
    }

    pub fn mul(&self, rhs: &ScalarMatrix, backend: &Backend) -> ScalarMatrix {
        let mut out = ScalarMatrix::zero(self.dim, backend);
        for r in 0..self.dim {
            for k in 0..self.dim {
                let a = self.get(r, k);
                if a.is_structurally_zero() {
                    continue;
                }
                for c in 0..self.dim {
                    let b = rhs.get(k, c);
                    if !b.is_structurally_zero() {
                        out.add_to(r, c, &(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &ScalarMatrix, backend: &Backend) -> ScalarMatrix {
        let mut out = ScalarMatrix::zero(self.dim, backend);
        for i in 0..self.data.len() {
            out.data[i] = &self.data[i] - &rhs.data[i];
        }
        out
    }

    pub fn max_abs(&self, backend: &Backend) -> BigFixed {
        let ctx = backend.context();
        let mut max = BigFixed::zero(ctx.bits);
        for v in &self.data {
            let a = v.eval(ctx).abs();
            if a > max {
                max = a;
            }
        }
        max
    }
}

/// The coproduct generators on a product basis: raising and lowering for
/// both simple roots plus the two Cartan directions (diagonal).
pub struct Generators {
    pub basis: ProductBasis,
    pub e_plus: [ScalarMatrix; 2],
    pub e_minus: [ScalarMatrix; 2],
    pub h: [ScalarMatrix; 2],
}

const SIMPLE: [RootIndex; 2] = [RootIndex::Alpha1, RootIndex::Alpha2];

fn half_scalar(h: Half, backend: &Backend) -> Scalar {
    backend.from_rational(BigRational::new(BigInt::from(h.doubled()), BigInt::from(2)))
}

/// Single-factor ladder amplitude within a symmetric representation, where
/// every weight carries multiplicity one so the action is unambiguous.
fn single_rep_step(
    w: &WeightVector,
    root: RootIndex,
    dir: LadderDirection,
    backend: &Backend,
) -> Option<(WeightVector, Scalar)> {
    let target = match dir {
        LadderDirection::Lower => w.lowered(root, 1),
        LadderDirection::Raise => {
            let (da, db) = root.step();
            let (a, b) = (w.a as i64 - da as i64, w.b as i64 - db as i64);
            if a < 0 || b < 0 {
                None
            } else {
                WeightVector::new(w.rep, a as u32, b as u32)
            }
        }
    };
    let p = w.subalgebra_profile();
    let amp = su2_ladder_factor(p.j(root), p.m(root), dir, backend);
    match target {
        Some(t) if !amp.is_structurally_zero() => Some((t, amp)),
        _ => None,
    }
}

/// Build the coproduct generator matrices for (n1, 0) x (n2, 0):
/// `DH = H (x) 1 + 1 (x) H` and `DE = E (x) q^(H/2) + q^(-H/2) (x) E`.
pub fn build_generators(n1: u32, n2: u32, backend: &Backend) -> Generators {
    let basis = ProductBasis::new(RepLabel::symmetric(n1), RepLabel::symmetric(n2));
    let dim = basis.dim();
    let mut e_plus = [ScalarMatrix::zero(dim, backend), ScalarMatrix::zero(dim, backend)];
    let mut e_minus = [ScalarMatrix::zero(dim, backend), ScalarMatrix::zero(dim, backend)];
    let mut h = [ScalarMatrix::zero(dim, backend), ScalarMatrix::zero(dim, backend)];

    for (col, (w1, w2)) in basis.kets.iter().enumerate() {
        for (ri, root) in SIMPLE.into_iter().enumerate() {
            let m1 = w1.subalgebra_profile().m(root);
            let m2 = w2.subalgebra_profile().m(root);
            h[ri].set(col, col, half_scalar(m1 + m2, backend));
            for dir in [LadderDirection::Raise, LadderDirection::Lower] {
                let mat = match dir {
                    LadderDirection::Raise => &mut e_plus[ri],
                    LadderDirection::Lower => &mut e_minus[ri],
                };
                // E on the first factor, q^(H/2) twist on the second:
                // q^(m/2) has 2m quarter-units, i.e. m.doubled()
                if let Some((t1, amp)) = single_rep_step(w1, root, dir, backend) {
                    let row = basis.position(&(t1, *w2)).expect("ladder image in basis");
                    let tw = backend.q_power(m2.doubled());
                    mat.add_to(row, col, &(&amp * &tw));
                }
                // q^(-H/2) twist on the first factor, E on the second
                if let Some((t2, amp)) = single_rep_step(w2, root, dir, backend) {
                    let row = basis.position(&(*w1, t2)).expect("ladder image in basis");
                    let tw = backend.q_power(-m1.doubled());
                    mat.add_to(row, col, &(&tw * &amp));
                }
            }
        }
    }
    Generators { basis, e_plus, e_minus, h }
}

/// Per-state verification: residuals as numbers, never a panic.
#[derive(Debug, Clone)]
pub struct StateReport {
    pub weight_residual: BigFixed,
    pub raising_residual: Option<BigFixed>,
    pub norm_deviation: BigFixed,
}

fn vec_norm(v: &[Scalar], backend: &Backend) -> BigFixed {
    let ctx = backend.context();
    let mut acc = BigFixed::zero(ctx.bits);
    for x in v {
        let e = x.eval(ctx);
        acc = &acc + &(&e * &e);
    }
    acc.sqrt()
}

/// Check one coupled state against the generator matrices: weight residuals
/// for both Cartan directions, raising annihilation for highest-weight
/// states, and the norm deviation.
pub fn verify_state(state: &CoupledState, gens: &Generators, backend: &Backend) -> StateReport {
    let ctx = backend.context();
    let v = gens.basis.vector_of(state, backend);
    let profile = state.omega.subalgebra_profile();
    let mut weight_residual = BigFixed::zero(ctx.bits);
    for (ri, root) in SIMPLE.into_iter().enumerate() {
        let hv = gens.h[ri].apply(&v, backend);
        let m = half_scalar(profile.m(root), backend);
        let diff: Vec<Scalar> = hv.iter().zip(&v).map(|(a, b)| a - &(&m * b)).collect();
        let r = vec_norm(&diff, backend);
        if r > weight_residual {
            weight_residual = r;
        }
    }
    let raising_residual = if state.omega == WeightVector::highest(state.omega.rep) {
        let mut max = BigFixed::zero(ctx.bits);
        for ri in 0..2 {
            let ev = gens.e_plus[ri].apply(&v, backend);
            let r = vec_norm(&ev, backend);
            if r > max {
                max = r;
            }
        }
        Some(max)
    } else {
        None
    };
    let one = BigFixed::one(ctx.bits);
    let norm_deviation = (&vec_norm(&v, backend) - &one).abs();
    StateReport { weight_residual, raising_residual, norm_deviation }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelTally {
    pub s: u32,
    pub states: usize,
    pub expected_dim: u64,
}

pub struct TableResiduals {
    pub orthogonality: BigFixed,
    pub completeness: BigFixed,
    pub tallies: Vec<ChannelTally>,
}

impl TableResiduals {
    pub fn tallies_match(&self) -> bool {
        self.tallies.iter().all(|t| t.states as u64 == t.expected_dim)
    }
}

/// Whole-table verification: both orthogonality relations plus per-channel
/// dimension tallies against the representation dimension formula.
pub fn verify_table(table: &QcgTable, gens: &Generators, backend: &Backend) -> TableResiduals {
    let ctx = backend.context();
    let dim = gens.basis.dim();
    let mut rows: Vec<Vec<BigFixed>> = Vec::with_capacity(table.total_states());
    for st in table.states() {
        let v = gens.basis.vector_of(st, backend);
        rows.push(v.iter().map(|c| c.eval(ctx)).collect());
    }
    let zero = BigFixed::zero(ctx.bits);
    let one = BigFixed::one(ctx.bits);
    let mut orthogonality = zero.clone();
    for (i, ri) in rows.iter().enumerate() {
        for (j, rj) in rows.iter().enumerate().skip(i) {
            let mut acc = zero.clone();
            for c in 0..dim {
                acc = &acc + &(&ri[c] * &rj[c]);
            }
            let expect = if i == j { one.clone() } else { zero.clone() };
            let dev = (&acc - &expect).abs();
            if dev > orthogonality {
                orthogonality = dev;
            }
        }
    }
    let mut completeness = one.clone();
    if rows.len() == dim {
        completeness = zero.clone();
        for c1 in 0..dim {
            for c2 in c1..dim {
                let mut acc = zero.clone();
                for row in &rows {
                    acc = &acc + &(&row[c1] * &row[c2]);
                }
                let expect = if c1 == c2 { one.clone() } else { zero.clone() };
                let dev = (&acc - &expect).abs();
                if dev > completeness {
                    completeness = dev;
                }
            }
        }
    }
    let tallies = table
        .channels
        .iter()
        .map(|ch| ChannelTally {
            s: ch.label.s,
            states: ch.states.len(),
            expected_dim: ch.label.rep.dim(),
        })
        .collect();
    TableResiduals { orthogonality, completeness, tallies }
}

/// Weight multiplicity by Freudenthal recursion over the three positive
/// roots; the independent cross-check of the shell rule. Weights outside the
/// diagram give 0.
pub fn freudenthal_multiplicity(n: u32, m: u32, a: i64, b: i64) -> u64 {
    freudenthal_table(RepLabel::new(n, m)).get(&(a, b)).copied().unwrap_or(0)
}

pub fn freudenthal_table(rep: RepLabel) -> BTreeMap<(i64, i64), u64> {
    let lambda = rep.highest_weight();
    let lam_rho = WeightExpr { mu: [lambda.mu[0] + 1, lambda.mu[1] + 1], alpha: [0, 0] };
    let lam_rho_sq = inner_product(&lam_rho, &lam_rho);
    let top = (rep.n + rep.m) as i64;
    let mut mults: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    mults.insert((0, 0), 1);
    for h in 1..=(2 * top) {
        for a in 0..=top.min(h) {
            let b = h - a;
            if !(0..=top).contains(&b) {
                continue;
            }
            let mu_rho = WeightExpr {
                mu: [lambda.mu[0] + 1, lambda.mu[1] + 1],
                alpha: [-a, -b],
            };
            let den = lam_rho_sq - inner_product(&mu_rho, &mu_rho);
            if den <= Rational64::from_integer(0) {
                continue;
            }
            let mut num = Rational64::from_integer(0);
            for root in RootIndex::ALL {
                let (da, db) = root.step();
                for k in 1..=top {
                    let (ka, kb) = (a - k * da as i64, b - k * db as i64);
                    if ka < 0 || kb < 0 {
                        break;
                    }
                    if let Some(&mk) = mults.get(&(ka, kb)) {
                        let shifted = WeightExpr { mu: lambda.mu, alpha: [-ka, -kb] };
                        num += Rational64::from_integer(mk as i64)
                            * inner_product(&shifted, &root.expr());
                    }
                }
            }
            let val = num * Rational64::from_integer(2) / den;
            assert!(
                val.is_integer() && *val.numer() >= 0,
                "Freudenthal recursion must give nonnegative integers"
            );
            let v = val.to_integer() as u64;
            if v > 0 {
                mults.insert((a, b), v);
            }
        }
    }
    mults
}

/// Residuals of the defining relations as matrices:
/// `[H_i, E^(+/-)_i] = (+/-) E^(+/-)_i` and `[E^+_i, E^-_i] = [2 H_i]`.
pub fn algebra_relation_residual(gens: &Generators, backend: &Backend) -> BigFixed {
    let ctx = backend.context();
    let mut max = BigFixed::zero(ctx.bits);
    for ri in 0..2 {
        for (e, sign) in [(&gens.e_plus[ri], 1i64), (&gens.e_minus[ri], -1i64)] {
            let he = gens.h[ri].mul(e, backend);
            let eh = e.mul(&gens.h[ri], backend);
            let mut comm = he.sub(&eh, backend);
            let signed = backend.from_int(sign);
            for r in 0..comm.dim {
                for c in 0..comm.dim {
                    let v = &*comm.get(r, c) - &(&signed * e.get(r, c));
                    comm.set(r, c, v);
                }
            }
            let dev = comm.max_abs(backend);
            if dev > max {
                max = dev;
            }
        }
        let pm = gens.e_plus[ri].mul(&gens.e_minus[ri], backend);
        let mp = gens.e_minus[ri].mul(&gens.e_plus[ri], backend);
        let mut comm = pm.sub(&mp, backend);
        for (col, (w1, w2)) in gens.basis.kets.iter().enumerate() {
            let root = SIMPLE[ri];
            let m_total = w1.subalgebra_profile().m(root) + w2.subalgebra_profile().m(root);
            // 2m is an integer, so [2 H] acts as the q-number of it
            let qn = q_number(m_total.doubled(), backend);
            let v = &*comm.get(col, col) - &qn;
            comm.set(col, col, v);
        }
        let dev = comm.max_abs(backend);
        if dev > max {
            max = dev;
        }
    }
    max
}

/// Full verification run: build the table, realize the generators, and
/// report every residual as a decimal string. `corrupt` is a test hook that
/// perturbs one coefficient before checking, as a negative control.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub n1: u32,
    pub n2: u32,
    pub backend: String,
    pub q: String,
    pub precision: u32,
    pub residuals: BTreeMap<String, String>,
    pub channel_tallies: Vec<ChannelTally>,
    pub tallies_match: bool,
    pub pass: bool,
    /// Name of the first failing residual, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

pub fn run_verification(n1: u32, n2: u32, backend: &Backend, corrupt: bool) -> Result<VerifyReport> {
    let ctx = backend.context();
    let mut table = qcg_table(n1, n2, backend)?;
    if corrupt {
        // negative control: scale one coefficient by 101/100
        if let Some(c) = table
            .channels
            .iter_mut()
            .flat_map(|ch| ch.states.iter_mut())
            .flat_map(|st| st.terms.values_mut())
            .next()
        {
            let factor = backend.from_rational(BigRational::new(
                BigInt::from(101),
                BigInt::from(100),
            ));
            *c = &*c * &factor;
        }
    }
    let gens = build_generators(n1, n2, backend);

    let mut weight_max = BigFixed::zero(ctx.bits);
    let mut raising_max = BigFixed::zero(ctx.bits);
    let mut norm_max = BigFixed::zero(ctx.bits);
    for st in table.states() {
        let rep = verify_state(st, &gens, backend);
        if rep.weight_residual > weight_max {
            weight_max = rep.weight_residual;
        }
        if let Some(r) = rep.raising_residual {
            if r > raising_max {
                raising_max = r;
            }
        }
        if rep.norm_deviation > norm_max {
            norm_max = rep.norm_deviation;
        }
    }
    let tab = verify_table(&table, &gens, backend);
    let algebra = algebra_relation_residual(&gens, backend);
    let conjugation = crate::tensor::conjugation_check(&table, backend)?;
    let classical = classical_limit_check(&table)?;

    let digits = ctx.digits;
    let tol_state = BigFixed::pow10_neg(digits.saturating_sub(20), ctx.bits);
    let tol_algebra = BigFixed::pow10_neg(digits.saturating_sub(15), ctx.bits);
    let fmt = |x: &BigFixed| x.to_decimal(digits.min(50));
    let mut residuals = BTreeMap::new();
    let mut first_failure: Option<String> = None;
    let mut pass = tab.tallies_match();
    if !pass {
        first_failure = Some("channel_tallies".to_string());
    }
    let mut push = |name: &str, value: String, ok: bool, pass: &mut bool, first: &mut Option<String>| {
        residuals.insert(name.to_string(), value);
        if !ok && first.is_none() {
            *first = Some(name.to_string());
        }
        *pass &= ok;
    };
    push("weight_max", fmt(&weight_max), weight_max <= tol_state, &mut pass, &mut first_failure);
    push(
        "raising_annihilation_max",
        fmt(&raising_max),
        raising_max <= tol_state,
        &mut pass,
        &mut first_failure,
    );
    push("norm_deviation_max", fmt(&norm_max), norm_max <= tol_state, &mut pass, &mut first_failure);
    push(
        "orthogonality",
        fmt(&tab.orthogonality),
        tab.orthogonality <= tol_state,
        &mut pass,
        &mut first_failure,
    );
    push(
        "completeness",
        fmt(&tab.completeness),
        tab.completeness <= tol_state,
        &mut pass,
        &mut first_failure,
    );
    push(
        "algebra_relations",
        fmt(&algebra),
        algebra <= tol_algebra,
        &mut pass,
        &mut first_failure,
    );
    push(
        "conjugation",
        fmt(&conjugation),
        conjugation <= tol_state,
        &mut pass,
        &mut first_failure,
    );
    push(
        "classical_highest_weight",
        format!("{classical:.3e}"),
        classical <= 1e-6,
        &mut pass,
        &mut first_failure,
    );

    Ok(VerifyReport {
        n1,
        n2,
        backend: if backend.is_exact() { "exact" } else { "numeric" }.to_string(),
        q: ctx.q().to_string(),
        precision: ctx.digits,
        residuals,
        tallies_match: tab.tallies_match(),
        channel_tallies: tab.tallies,
        pass,
        first_failure,
    })
}

fn near_one_backend() -> Backend {
    // q = 1 + 10^-8
    Backend::numeric(
        BigRational::new(BigInt::from(100_000_001u64), BigInt::from(100_000_000u64)),
        60,
    )
}

fn to_f64(x: &BigFixed) -> f64 {
    x.to_decimal(30).parse().unwrap_or(f64::NAN)
}

/// Rebuild the highest-weight channel states at q = 1 + 10^-8 and compare
/// every coefficient against the classical closed-form oracle.
pub fn classical_limit_check(table: &QcgTable) -> Result<f64> {
    let (n1, n2) = (table.n1, table.n2);
    let backend = near_one_backend();
    let ctx = backend.context();
    let mut max: f64 = 0.0;
    for s in 0..=n1.min(n2) {
        let hw = crate::tensor::highest_weight_expansion(n1, n2, s, &backend)?;
        let (j1, j2) = (Half::twice(n1 as i64), Half::twice(n2 as i64));
        let j = Half::twice((n1 + n2 - 2 * s) as i64);
        for ((w1, w2), c) in &hw.terms {
            // the coupling string index k is the ket's A coordinate
            let key = Su2CgKey {
                j1,
                j2,
                m1: j1 - Half::int(w1.a as i64),
                m2: j2 - Half::int(w2.a as i64),
                j,
                m: j,
            };
            let dev = (to_f64(&c.eval(ctx)) - classical_cg(&key)).abs();
            max = max.max(dev);
        }
    }
    Ok(max)
}

/// Brute-force classical check of the full 1 x 1 table: classical generator
/// matrices (plain Kronecker sums at q = 1), highest-weight channel states
/// from the classical coupling formula, simple-root lowering paths, explicit
/// normalization, and the per-channel sign. Nothing is hand-entered.
pub fn classical_product_check_1x1() -> Result<f64> {
    let backend = near_one_backend();
    let ctx = backend.context();
    let table = qcg_table(1, 1, &backend)?;
    let rep = RepLabel::symmetric(1);
    let basis = ProductBasis::new(rep, rep);
    let dim = basis.dim();

    // classical single-factor lowering matrices over the 3 weights of (1, 0)
    let weights: Vec<WeightVector> = enumerate_weights(rep).into_iter().map(|(w, _)| w).collect();
    let pos = |w: &WeightVector| weights.iter().position(|x| x == w).unwrap();
    let mut single = [[[0.0f64; 3]; 3]; 2];
    for (ri, root) in SIMPLE.into_iter().enumerate() {
        for w in &weights {
            if let Some(t) = w.lowered(root, 1) {
                let p = w.subalgebra_profile();
                let (j, m) = (p.j(root), p.m(root));
                let jm = (j + m).integer().unwrap() as f64;
                let jm1 = ((j - m).integer().unwrap() + 1) as f64;
                single[ri][pos(&t)][pos(w)] = (jm * jm1).sqrt();
            }
        }
    }
    // classical coproduct: E (x) I + I (x) E
    let mut lower: [Vec<Vec<f64>>; 2] = [
        vec![vec![0.0; dim]; dim],
        vec![vec![0.0; dim]; dim],
    ];
    for (col, (w1, w2)) in basis.kets.iter().enumerate() {
        for ri in 0..2 {
            for (r1, wt) in weights.iter().enumerate() {
                let amp = single[ri][r1][pos(w1)];
                if amp != 0.0 {
                    let row = basis.position(&(*wt, *w2)).unwrap();
                    lower[ri][row][col] += amp;
                }
                let amp = single[ri][r1][pos(w2)];
                if amp != 0.0 {
                    let row = basis.position(&(*w1, *wt)).unwrap();
                    lower[ri][row][col] += amp;
                }
            }
        }
    }

    let mut max_dev: f64 = 0.0;
    for ch in &table.channels {
        let s = ch.label.s;
        // classical highest-weight state of the channel
        let mut hw = vec![0.0f64; dim];
        let (j1, j2) = (Half::twice(1), Half::twice(1));
        let j = Half::twice(2 - 2 * s as i64);
        for k1 in 0..=s {
            let k2 = s - k1;
            if k1 > 1 || k2 > 1 {
                continue;
            }
            let key = Su2CgKey {
                j1,
                j2,
                m1: j1 - Half::int(k1 as i64),
                m2: j2 - Half::int(k2 as i64),
                j,
                m: j,
            };
            let w1 = WeightVector::highest(rep).lowered(RootIndex::Alpha1, k1).unwrap();
            let w2 = WeightVector::highest(rep).lowered(RootIndex::Alpha1, k2).unwrap();
            hw[basis.position(&(w1, w2)).unwrap()] = classical_cg(&key);
        }
        for st in &ch.states {
            // simple-root path staying inside the channel support
            let (a, b) = (st.omega.a, st.omega.b);
            let steps: [(usize, u32); 2] = if ch.label.rep.m == 0 {
                [(0, a), (1, b)]
            } else {
                [(1, b), (0, a)]
            };
            let mut v = hw.clone();
            for (ri, count) in steps {
                for _ in 0..count {
                    let mut next = vec![0.0f64; dim];
                    for (r, row) in lower[ri].iter().enumerate() {
                        next[r] = row.iter().zip(&v).map(|(m, x)| m * x).sum();
                    }
                    v = next;
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Domain(format!(
                    "classical path annihilated the state at s={s}, omega={}",
                    st.omega
                )));
            }
            let sign = if s % 2 == 1 && (a, b) != (0, 0) { -1.0 } else { 1.0 };
            for x in &mut v {
                *x *= sign / norm;
            }
            for (i, ket) in basis.kets.iter().enumerate() {
                let ours = st.terms.get(ket).map(|c| to_f64(&c.eval(ctx))).unwrap_or(0.0);
                max_dev = max_dev.max((ours - v[i]).abs());
            }
        }
    }
    Ok(max_dev)
}
