//! Coupled states and coefficient tables for products of symmetric
//! representations.
//!
//! The pipeline mirrors the ladder construction: couple the two highest
//! weights channel by channel with rank-1 coefficients, walk each channel's
//! weight diagram with lowering sequences (dividing out the coupled-side
//! ladder normalization and distributing over the tensor factors), resolve
//! multiplicities with one path per shell color, and orthonormalize the
//! resulting candidates by Gram-Schmidt in path order.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::half::Half;
use crate::qscalar::{
    q_binomial, scalar_equal, scalar_sqrt_ratio, Backend, RadicalMonomial,
    Scalar,
};
use crate::su2::{su2_qcg, Su2CgKey};
use crate::weights::{enumerate_weights, RepLabel, RootIndex, WeightVector};

/// Which way the pipeline is oriented. `Standard` couples symmetric (n, 0)
/// factors along alpha1; `Mirrored` runs the whole construction through the
/// diagram involution (conjugate representations (0, n), roles of the simple
/// roots swapped). The mirrored run is what the conjugation identity is
/// checked against.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientation {
    Standard,
    Mirrored,
}

impl Orientation {
    fn factor_rep(self, n: u32) -> RepLabel {
        match self {
            Orientation::Standard => RepLabel::new(n, 0),
            Orientation::Mirrored => RepLabel::new(0, n),
        }
    }

    fn channel_rep(self, n1: u32, n2: u32, s: u32) -> RepLabel {
        match self {
            Orientation::Standard => RepLabel::new(n1 + n2 - 2 * s, s),
            Orientation::Mirrored => RepLabel::new(s, n1 + n2 - 2 * s),
        }
    }

    fn coupling_root(self) -> RootIndex {
        match self {
            Orientation::Standard => RootIndex::Alpha1,
            Orientation::Mirrored => RootIndex::Alpha2,
        }
    }
}

/// Channel label: the s-th irreducible constituent.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ChannelLabel {
    pub s: u32,
    pub rep: RepLabel,
}

/// A coupled state expanded over product-basis kets.
#[derive(Clone, Debug)]
pub struct CoupledState {
    pub channel: ChannelLabel,
    pub omega: WeightVector,
    pub t: u32,
    pub terms: BTreeMap<(WeightVector, WeightVector), Scalar>,
}

impl CoupledState {
    /// <self | other> over the shared kets (coefficients are real).
    pub fn inner(&self, other: &CoupledState, backend: &Backend) -> Scalar {
        state_inner(&self.terms, &other.terms, backend)
    }

    pub fn norm_sq(&self, backend: &Backend) -> Scalar {
        self.inner(self, backend)
    }
}

type TermMap = BTreeMap<(WeightVector, WeightVector), Scalar>;

fn state_inner(a: &TermMap, b: &TermMap, backend: &Backend) -> Scalar {
    let mut acc = backend.zero();
    for (key, ca) in a {
        if let Some(cb) = b.get(key) {
            acc = &acc + &(ca * cb);
        }
    }
    acc
}

fn terms_axpy(target: &mut TermMap, coef: &Scalar, source: &TermMap) {
    for (key, c) in source {
        let add = coef * c;
        match target.entry(*key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(add);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let merged = &*e.get() + &add;
                *e.get_mut() = merged;
            }
        }
    }
}

fn terms_prune(terms: &mut TermMap) {
    terms.retain(|_, c| !c.is_structurally_zero());
}

/// An ordered product of lowering steps `(root, power)` applied left to
/// right.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoweringSequence(pub Vec<(RootIndex, u32)>);

impl LoweringSequence {
    pub fn mirrored(&self) -> LoweringSequence {
        LoweringSequence(self.0.iter().map(|(r, p)| (r.conjugate(), *p)).collect())
    }
}

/// Radicand labels of the coupled-side ladder normalization, or None when
/// the string runs out.
fn h_labels(root: RootIndex, power: u32, omega: &WeightVector) -> Option<(Vec<u32>, Vec<u32>)> {
    let p = omega.subalgebra_profile();
    let (j, m) = (p.j(root), p.m(root));
    let l = power as i64;
    let jm = (j + m).integer().expect("profile string lengths are integers");
    let jmm = (j - m).integer().expect("profile string lengths are integers");
    if l > jm {
        return None;
    }
    let num = RadicalMonomial::factorial_labels(&[jm, jmm + l]);
    let den = RadicalMonomial::factorial_labels(&[jm - l, jmm]);
    Some((num, den))
}

/// Coupled-side ladder normalization for `power` lowering steps along `root`
/// starting at `omega`: sqrt([j+m]! [j-m+l]! / ([j+m-l]! [j-m]!)). Returns 0
/// when the string runs out.
pub fn h_factor(root: RootIndex, power: u32, omega: &WeightVector, backend: &Backend) -> Scalar {
    match h_labels(root, power, omega) {
        Some((num, den)) => scalar_sqrt_ratio(&num, &den, backend),
        None => backend.zero(),
    }
}

/// Tensor-factor distribution weight for splitting `l = x + y` lowering steps
/// between the two kets. Returns 0 when either factor's string overruns.
pub fn f_factor(
    root: RootIndex,
    l: u32,
    x: u32,
    y: u32,
    omega1: &WeightVector,
    omega2: &WeightVector,
    backend: &Backend,
) -> Scalar {
    assert_eq!(x + y, l, "f-factor split must satisfy x + y = l");
    let p1 = omega1.subalgebra_profile();
    let p2 = omega2.subalgebra_profile();
    let (j1, m1) = (p1.j(root), p1.m(root));
    let (j2, m2) = (p2.j(root), p2.m(root));
    let i = |h: Half| h.integer().expect("factor profiles have integer string lengths");
    let (x, y) = (x as i64, y as i64);
    if x > i(j1 + m1) || y > i(j2 + m2) {
        return backend.zero();
    }
    // q^((x m2 - y m1)/2)
    let quarters = x * m2.doubled() - y * m1.doubled();
    let qpow = backend.q_power(quarters);
    let binom = q_binomial(x + y, x, backend);
    let num = RadicalMonomial::factorial_labels(&[
        i(j2 + m2),
        i(j1 + m1),
        i(j2 - m2) + y,
        i(j1 - m1) + x,
    ]);
    let den = RadicalMonomial::factorial_labels(&[
        i(j2 - m2),
        i(j1 - m1),
        i(j2 + m2) - y,
        i(j1 + m1) - x,
    ]);
    let root_part = scalar_sqrt_ratio(&num, &den, backend);
    &(&qpow * &binom) * &root_part
}

/// The highest-weight coupled state of channel s: kets `lambda_i - k_i *
/// (coupling root)` with `k1 + k2 = s`, coefficients given by the rank-1
/// closed form.
pub fn highest_weight_expansion(n1: u32, n2: u32, s: u32, backend: &Backend) -> Result<CoupledState> {
    highest_weight_expansion_oriented(n1, n2, s, Orientation::Standard, backend)
}

pub fn highest_weight_expansion_oriented(
    n1: u32,
    n2: u32,
    s: u32,
    orient: Orientation,
    backend: &Backend,
) -> Result<CoupledState> {
    if s > n1.min(n2) {
        return Err(Error::Domain(format!(
            "channel index s={s} out of range for {n1} x {n2}"
        )));
    }
    let rep1 = orient.factor_rep(n1);
    let rep2 = orient.factor_rep(n2);
    let channel = ChannelLabel { s, rep: orient.channel_rep(n1, n2, s) };
    let root = orient.coupling_root();
    let (j1, j2) = (Half::twice(n1 as i64), Half::twice(n2 as i64));
    let j = Half::twice((n1 + n2) as i64 - 2 * s as i64);

    let mut terms = TermMap::new();
    let k_lo = s.saturating_sub(n2);
    let k_hi = s.min(n1);
    for k1 in k_lo..=k_hi {
        let k2 = s - k1;
        let key = Su2CgKey {
            j1,
            j2,
            m1: j1 - Half::int(k1 as i64),
            m2: j2 - Half::int(k2 as i64),
            j,
            m: j,
        };
        debug_assert!(key.m1.abs() <= j1 && key.m2.abs() <= j2);
        let c = su2_qcg(&key, backend);
        if c.is_structurally_zero() {
            continue;
        }
        let w1 = WeightVector::highest(rep1)
            .lowered(root, k1)
            .expect("coupling kets stay inside the factor diagram");
        let w2 = WeightVector::highest(rep2)
            .lowered(root, k2)
            .expect("coupling kets stay inside the factor diagram");
        terms.insert((w1, w2), c);
    }
    Ok(CoupledState {
        channel,
        omega: WeightVector::highest(channel.rep),
        t: 0,
        terms,
    })
}

/// One unnormalized simple-root lowering step on a term map: the coproduct
/// split `E (x) q^(H/2) + q^(-H/2) (x) E` through the per-ket ladder rule.
fn simple_step(terms: &TermMap, root: RootIndex, backend: &Backend) -> TermMap {
    debug_assert!(root != RootIndex::Alpha3);
    let mut out = TermMap::new();
    for ((w1, w2), c) in terms {
        for (x, y) in [(1u32, 0u32), (0, 1)] {
            let f = f_factor(root, 1, x, y, w1, w2, backend);
            if f.is_structurally_zero() {
                continue;
            }
            let (t1, t2) = match (w1.lowered(root, x), w2.lowered(root, y)) {
                (Some(t1), Some(t2)) => (t1, t2),
                _ => continue,
            };
            let add = c * &f;
            match out.entry((t1, t2)) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(add);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged = &*e.get() + &add;
                    *e.get_mut() = merged;
                }
            }
        }
    }
    out
}

/// One unnormalized diagonal lowering step: the genuine root vector for
/// alpha3 as a q-commutator of the simple-root actions. The formal
/// single-operator split (treating alpha3 like a simple root) drops the
/// coproduct cross terms and demonstrably leaks across irreducible
/// components, so the commutator is used instead; the mirrored orientation
/// swaps the roles of the two simple roots.
fn diagonal_step(terms: &TermMap, orient: Orientation, backend: &Backend) -> TermMap {
    let (first, second) = match orient {
        Orientation::Standard => (RootIndex::Alpha1, RootIndex::Alpha2),
        Orientation::Mirrored => (RootIndex::Alpha2, RootIndex::Alpha1),
    };
    let a = simple_step(&simple_step(terms, first, backend), second, backend);
    let b = simple_step(&simple_step(terms, second, backend), first, backend);
    let qhalf = backend.q_power(2);
    let mut out = a;
    for (key, c) in b {
        let sub = &qhalf * &c;
        match out.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(-&sub);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let merged = &*e.get() - &sub;
                *e.get_mut() = merged;
            }
        }
    }
    terms_prune(&mut out);
    out
}

/// The pipeline orientation a state was built in, read off the ket
/// representations.
fn orientation_of(state: &CoupledState) -> Orientation {
    match state.terms.keys().next() {
        Some((w1, _)) if w1.rep.n == 0 && w1.rep.m > 0 => Orientation::Mirrored,
        _ => Orientation::Standard,
    }
}

/// Apply one lowering block: distribute `(root, power)` over the tensor
/// factors and divide by the coupled-side ladder normalization. Simple-root
/// blocks use the closed split formula; diagonal blocks iterate the
/// commutator step.
fn lower_block(
    state: &CoupledState,
    root: RootIndex,
    power: u32,
    step: usize,
    backend: &Backend,
) -> Result<CoupledState> {
    let target = state.omega.lowered(root, power).ok_or(Error::InvalidPath {
        step,
        root: root.index(),
        power,
    })?;
    let mut terms;
    if root == RootIndex::Alpha3 {
        let orient = orientation_of(state);
        terms = state.terms.clone();
        let mut cur = state.omega;
        for _ in 0..power {
            terms = diagonal_step(&terms, orient, backend);
            let h_inv = match h_labels(root, 1, &cur) {
                Some((num, den)) => scalar_sqrt_ratio(&den, &num, backend),
                None => return Err(Error::InvalidPath { step, root: root.index(), power }),
            };
            for c in terms.values_mut() {
                *c = &*c * &h_inv;
            }
            cur = cur
                .lowered(root, 1)
                .ok_or(Error::InvalidPath { step, root: root.index(), power })?;
        }
    } else {
        let h_inv = match h_labels(root, power, &state.omega) {
            Some((num, den)) => scalar_sqrt_ratio(&den, &num, backend),
            None => {
                return Err(Error::InvalidPath { step, root: root.index(), power });
            }
        };
        terms = TermMap::new();
        for ((w1, w2), c) in &state.terms {
            for x in 0..=power {
                let y = power - x;
                let f = f_factor(root, power, x, y, w1, w2, backend);
                if f.is_structurally_zero() {
                    continue;
                }
                let (t1, t2) = match (w1.lowered(root, x), w2.lowered(root, y)) {
                    (Some(t1), Some(t2)) => (t1, t2),
                    _ => continue,
                };
                let add = &(c * &f) * &h_inv;
                match terms.entry((t1, t2)) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(add);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let merged = &*e.get() + &add;
                        *e.get_mut() = merged;
                    }
                }
            }
        }
    }
    terms_prune(&mut terms);
    Ok(CoupledState { channel: state.channel, omega: target, t: state.t, terms })
}

/// Apply a whole lowering sequence. This is the raw ladder action: the
/// conventional per-state sign for odd channels is applied by the table
/// builder, not here, so the empty sequence is exactly the identity.
pub fn lower_coupled(
    state: &CoupledState,
    seq: &LoweringSequence,
    backend: &Backend,
) -> Result<CoupledState> {
    let mut cur = state.clone();
    for (step, (root, power)) in seq.0.iter().enumerate() {
        if *power == 0 {
            continue;
        }
        cur = lower_block(&cur, *root, *power, step, backend)?;
    }
    Ok(cur)
}

/// The t-indexed family of lowering sequences that generates the full
/// multiplicity space of `target`: a balanced simple-root prefix of depth t,
/// the excess simple-root steps, then the remaining diagonal steps. t = 0 is
/// the plain scheme; higher t trades diagonal steps for balanced prefixes.
pub fn multiplicity_paths(target: &WeightVector) -> Result<Vec<LoweringSequence>> {
    let (a, b) = (target.a, target.b);
    let c = a.min(b);
    let mult = target.multiplicity();
    debug_assert!(mult <= c + 1);
    let mut out = Vec::with_capacity(mult as usize);
    for t in 0..mult {
        let mut seq = Vec::new();
        if t > 0 {
            seq.push((RootIndex::Alpha1, t));
            seq.push((RootIndex::Alpha2, t));
        }
        if a > b {
            seq.push((RootIndex::Alpha1, a - b));
        } else if b > a {
            seq.push((RootIndex::Alpha2, b - a));
        }
        if c - t > 0 {
            seq.push((RootIndex::Alpha3, c - t));
        }
        out.push(LoweringSequence(seq));
    }
    Ok(out)
}

/// Orthonormalize path candidates in t order by division-free Gram-Schmidt:
/// every intermediate vector is a polynomial combination of the inputs, and
/// each output is normalized once at the end. The first candidate only has
/// its direction preserved, matching the convention that the diagonal-path
/// state seeds the basis.
pub fn gram_schmidt(candidates: Vec<CoupledState>, backend: &Backend) -> Result<Vec<CoupledState>> {
    let mut us: Vec<TermMap> = Vec::with_capacity(candidates.len());
    let mut norms: Vec<Scalar> = Vec::with_capacity(candidates.len());
    let ctx = backend.context();
    for (t, cand) in candidates.iter().enumerate() {
        let mut u = TermMap::new();
        if t == 0 {
            u = cand.terms.clone();
        } else {
            // u_t = (prod_r n_r) v_t - sum_r <u_r|v_t> (prod_{r' != r} n_{r'}) u_r
            let mut all = backend.one();
            for n in &norms {
                all = &all * n;
            }
            terms_axpy(&mut u, &all, &cand.terms);
            for r in 0..t {
                let overlap = state_inner(&us[r], &cand.terms, backend);
                let mut scale = overlap;
                for (rr, n) in norms.iter().enumerate() {
                    if rr != r {
                        scale = &scale * n;
                    }
                }
                terms_axpy(&mut u, &-&scale, &us[r]);
            }
            terms_prune(&mut u);
        }
        let norm_sq = state_inner(&u, &u, backend);
        if norm_sq.eval(ctx).abs() <= ctx.threshold(15) {
            return Err(Error::LinearDependence {
                residual: norm_sq.eval(ctx).to_decimal(ctx.digits.min(40)),
            });
        }
        us.push(u);
        norms.push(norm_sq);
    }
    let mut out = Vec::with_capacity(candidates.len());
    for ((cand, u), norm_sq) in candidates.iter().zip(us).zip(&norms) {
        let normalized = if scalar_equal(norm_sq, &backend.one(), backend) {
            u
        } else {
            u.into_iter()
                .map(|(k, c)| (k, c.div_by_sqrt_of(norm_sq)))
                .collect()
        };
        out.push(CoupledState {
            channel: cand.channel,
            omega: cand.omega,
            t: cand.t,
            terms: normalized,
        });
    }
    Ok(out)
}

/// The complete coefficient table for (n1, 0) x (n2, 0).
#[derive(Clone, Debug)]
pub struct QcgTable {
    pub n1: u32,
    pub n2: u32,
    pub orientation: Orientation,
    pub channels: Vec<ChannelData>,
}

#[derive(Clone, Debug)]
pub struct ChannelData {
    pub label: ChannelLabel,
    /// States sorted by (omega.a, omega.b, t).
    pub states: Vec<CoupledState>,
}

impl QcgTable {
    pub fn states(&self) -> impl Iterator<Item = &CoupledState> {
        self.channels.iter().flat_map(|c| c.states.iter())
    }

    pub fn total_states(&self) -> usize {
        self.channels.iter().map(|c| c.states.len()).sum()
    }

    /// Product-space dimension the table must span.
    pub fn product_dim(&self) -> u64 {
        RepLabel::symmetric(self.n1).dim() * RepLabel::symmetric(self.n2).dim()
    }
}

pub fn qcg_table(n1: u32, n2: u32, backend: &Backend) -> Result<QcgTable> {
    qcg_table_oriented(n1, n2, Orientation::Standard, backend)
}

/// Build all channels of the table in the given orientation. Cells (one per
/// channel weight) are independent once the channel's highest-weight state
/// is known, and are built in parallel.
pub fn qcg_table_oriented(
    n1: u32,
    n2: u32,
    orient: Orientation,
    backend: &Backend,
) -> Result<QcgTable> {
    let mut channels = Vec::new();
    for s in 0..=n1.min(n2) {
        let hw = highest_weight_expansion_oriented(n1, n2, s, orient, backend)?;
        let label = hw.channel;
        let cells = enumerate_weights(label.rep);
        let cell_states: Result<Vec<Vec<CoupledState>>> = cells
            .par_iter()
            .map(|(omega, mult)| build_cell(&hw, omega, *mult, orient, backend))
            .collect();
        let mut states: Vec<CoupledState> = cell_states?.into_iter().flatten().collect();
        states.sort_by_key(|st| (st.omega.a, st.omega.b, st.t));
        channels.push(ChannelData { label, states });
    }
    Ok(QcgTable { n1, n2, orientation: orient, channels })
}

fn build_cell(
    hw: &CoupledState,
    omega: &WeightVector,
    mult: u32,
    orient: Orientation,
    backend: &Backend,
) -> Result<Vec<CoupledState>> {
    let s = hw.channel.s;
    let paths = match orient {
        Orientation::Standard => multiplicity_paths(omega)?,
        Orientation::Mirrored => multiplicity_paths(&omega.conjugate())?
            .into_iter()
            .map(|p| p.mirrored())
            .collect(),
    };
    debug_assert_eq!(paths.len() as u32, mult);
    let mut candidates = Vec::with_capacity(paths.len());
    for (t, seq) in paths.iter().enumerate() {
        let mut st = lower_coupled(hw, seq, backend)?;
        st.t = t as u32;
        debug_assert_eq!(st.omega, *omega);
        // the conventional per-state sign for odd channels, once per build
        if s % 2 == 1 && !seq.0.is_empty() {
            for c in st.terms.values_mut() {
                *c = -&*c;
            }
        }
        for ((w1, w2), _) in &st.terms {
            debug_assert!(weight_additivity_holds(w1, w2, &st.omega));
        }
        candidates.push(st);
    }
    if mult == 1 {
        let mut st = candidates.pop().expect("one path for multiplicity one");
        finalize_norm(&mut st, backend)?;
        return Ok(vec![st]);
    }
    let mut states = gram_schmidt(candidates, backend)?;
    for st in &mut states {
        prune_value_zeros(&mut st.terms, backend);
    }
    Ok(states)
}

/// Normalize a single-path state exactly. The ladder-normalization factors
/// leave diagonal-path states off by a clean representable factor (a q-power
/// times a q-integer ratio), so the residual scaling is divided out here; a
/// vanishing norm means the path was invalid.
fn finalize_norm(st: &mut CoupledState, backend: &Backend) -> Result<()> {
    prune_value_zeros(&mut st.terms, backend);
    let norm = st.norm_sq(backend);
    let ctx = backend.context();
    if norm.eval(ctx).abs() <= ctx.threshold(15) {
        return Err(Error::Domain(format!(
            "lowering path annihilated the state at s={}, omega={}",
            st.channel.s, st.omega
        )));
    }
    if !scalar_equal(&norm, &backend.one(), backend) {
        for c in st.terms.values_mut() {
            *c = c.div_by_sqrt_of(&norm);
        }
    }
    Ok(())
}

/// Drop coefficients that are zero as values. Formal exact sums can encode
/// zero across several radicand classes after the commutator cancellations;
/// leaving them in place would bloat the canonical output.
fn prune_value_zeros(terms: &mut TermMap, backend: &Backend) {
    terms.retain(|_, c| !crate::qscalar::scalar_equal_zero(c, backend));
}

/// Exact lattice identity: the two ket weights must add up to the coupled
/// weight.
pub fn weight_additivity_holds(w1: &WeightVector, w2: &WeightVector, omega: &WeightVector) -> bool {
    use crate::weights::{inner_product, WeightExpr};
    let sum = {
        let (e1, e2) = (w1.expr(), w2.expr());
        WeightExpr {
            mu: [e1.mu[0] + e2.mu[0], e1.mu[1] + e2.mu[1]],
            alpha: [e1.alpha[0] + e2.alpha[0], e1.alpha[1] + e2.alpha[1]],
        }
    };
    let diff = {
        let o = omega.expr();
        WeightExpr {
            mu: [sum.mu[0] - o.mu[0], sum.mu[1] - o.mu[1]],
            alpha: [sum.alpha[0] - o.alpha[0], sum.alpha[1] - o.alpha[1]],
        }
    };
    // zero vector iff zero against both simple roots and both fundamentals
    let probes = [
        RootIndex::Alpha1.expr(),
        RootIndex::Alpha2.expr(),
        WeightExpr { mu: [1, 0], alpha: [0, 0] },
        WeightExpr { mu: [0, 1], alpha: [0, 0] },
    ];
    probes.iter().all(|p| inner_product(&diff, p) == num_rational::Rational64::from_integer(0))
}

/// Maximum numeric deviation between the table and its mirrored-pipeline
/// image under the diagram involution (the conjugation identity).
pub fn conjugation_check(table: &QcgTable, backend: &Backend) -> Result<crate::qscalar::BigFixed> {
    assert_eq!(table.orientation, Orientation::Standard);
    let mirrored = qcg_table_oriented(table.n1, table.n2, Orientation::Mirrored, backend)?;
    let ctx = backend.context();
    let mut max = crate::qscalar::BigFixed::zero(ctx.bits);
    for (ch, mch) in table.channels.iter().zip(&mirrored.channels) {
        for st in &ch.states {
            let momega = st.omega.conjugate();
            let mstate = mch
                .states
                .iter()
                .find(|ms| ms.omega == momega && ms.t == st.t)
                .ok_or_else(|| {
                    Error::Domain(format!(
                        "mirrored state missing for s={}, omega={}, t={}",
                        ch.label.s, st.omega, st.t
                    ))
                })?;
            let mut keys: std::collections::BTreeSet<(WeightVector, WeightVector)> =
                st.terms.keys().copied().collect();
            keys.extend(mstate.terms.keys().map(|(w1, w2)| (w1.conjugate(), w2.conjugate())));
            for (w1, w2) in keys {
                let a = st
                    .terms
                    .get(&(w1, w2))
                    .map(|c| c.eval(ctx))
                    .unwrap_or_else(|| crate::qscalar::BigFixed::zero(ctx.bits));
                let b = mstate
                    .terms
                    .get(&(w1.conjugate(), w2.conjugate()))
                    .map(|c| c.eval(ctx))
                    .unwrap_or_else(|| crate::qscalar::BigFixed::zero(ctx.bits));
                let dev = (&a - &b).abs();
                if dev > max {
                    max = dev;
                }
            }
        }
    }
    Ok(max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::parse_scalar;

    fn exact() -> Backend {
        Backend::exact()
    }

    #[test]
    fn stretched_highest_weight_is_single_unit_term() {
        let be = exact();
        let hw = highest_weight_expansion(1, 1, 0, &be).unwrap();
        assert_eq!(hw.terms.len(), 1);
        let c = hw.terms.values().next().unwrap();
        assert!(scalar_equal(c, &be.one(), &be));
    }

    #[test]
    fn coupled_singlet_channel_matches_closed_form() {
        let be = exact();
        let hw = highest_weight_expansion(1, 1, 1, &be).unwrap();
        assert_eq!(hw.terms.len(), 2);
        // closed form: +q^(1/4)/sqrt([2]) on the ket with the first factor
        // unlowered, -q^(-1/4)/sqrt([2]) on the swap
        let rep = RepLabel::symmetric(1);
        let top = WeightVector::highest(rep);
        let low = top.lowered(RootIndex::Alpha1, 1).unwrap();
        let c_top_low = &hw.terms[&(top, low)];
        let c_low_top = &hw.terms[&(low, top)];
        assert_eq!(c_top_low.to_canonical_string(), "q^(1/4)*sqrt(1/[2])");
        assert_eq!(c_low_top.to_canonical_string(), "-q^(-1/4)*sqrt(1/[2])");
    }

    #[test]
    fn lowering_reproduces_published_singlet_values() {
        // the two published coefficient values of the s=1 channel of 1 x 1
        let be = exact();
        let table = qcg_table(1, 1, &be).unwrap();
        let ch = &table.channels[1];
        assert_eq!(ch.label.rep, RepLabel::new(0, 1));
        let rep = RepLabel::symmetric(1);
        let top = WeightVector::highest(rep);
        let mid = WeightVector::new(rep, 1, 0).unwrap();
        let low = WeightVector::new(rep, 1, 1).unwrap();
        // they sit on the second-root-lowered state of the channel
        let middle = ch
            .states
            .iter()
            .find(|st| st.omega.a == 0 && st.omega.b == 1)
            .unwrap();
        assert_eq!(
            middle.terms[&(low, top)].to_canonical_string(),
            "q^(-1/4)*sqrt(1/[2])"
        );
        assert_eq!(
            middle.terms[&(top, low)].to_canonical_string(),
            "-q^(1/4)*sqrt(1/[2])"
        );
        // the bottom state is the diagonal-lowered image with the same
        // magnitudes and the inverted q-power pattern
        let bottom = ch
            .states
            .iter()
            .find(|st| st.omega.a == 1 && st.omega.b == 1)
            .unwrap();
        assert_eq!(
            bottom.terms[&(mid, low)].to_canonical_string(),
            "q^(1/4)*sqrt(1/[2])"
        );
        assert_eq!(
            bottom.terms[&(low, mid)].to_canonical_string(),
            "-q^(-1/4)*sqrt(1/[2])"
        );
        // and the published strings parse back to the same values
        let reparsed = parse_scalar("q^(-1/4)*sqrt(1/[2])", &be).unwrap();
        assert!(scalar_equal(&reparsed, &middle.terms[&(low, top)], &be));
    }

    #[test]
    fn empty_sequence_is_identity() {
        let be = exact();
        let hw = highest_weight_expansion(2, 1, 1, &be).unwrap();
        let same = lower_coupled(&hw, &LoweringSequence(vec![]), &be).unwrap();
        assert_eq!(same.omega, hw.omega);
        assert_eq!(same.terms.len(), hw.terms.len());
        for (k, c) in &hw.terms {
            assert!(scalar_equal(c, &same.terms[k], &be));
        }
    }

    #[test]
    fn invalid_path_is_an_error() {
        // the s=1 channel of 1 x 1 is (0, 1): its alpha1 string at the top
        // is empty, so lowering by alpha1 must fail
        let be = exact();
        let hw = highest_weight_expansion(1, 1, 1, &be).unwrap();
        let err = lower_coupled(&hw, &LoweringSequence(vec![(RootIndex::Alpha1, 1)]), &be);
        assert!(matches!(err, Err(Error::InvalidPath { .. })));
    }

    #[test]
    fn multiplicity_path_families() {
        // multiplicity 1: single plain sequence
        let rep = RepLabel::new(3, 0);
        let w = WeightVector::new(rep, 2, 1).unwrap();
        let paths = multiplicity_paths(&w).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(
            paths[0],
            LoweringSequence(vec![(RootIndex::Alpha1, 1), (RootIndex::Alpha3, 1)])
        );
        // 2 x 1 adjoint center: diagonal step vs balanced prefix
        let rep = RepLabel::new(1, 1);
        let w = WeightVector::new(rep, 1, 1).unwrap();
        let paths = multiplicity_paths(&w).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0], LoweringSequence(vec![(RootIndex::Alpha3, 1)]));
        assert_eq!(
            paths[1],
            LoweringSequence(vec![(RootIndex::Alpha1, 1), (RootIndex::Alpha2, 1)])
        );
        // 3 x 3 channel (2, 2) center: the three-member family
        let rep = RepLabel::new(2, 2);
        let w = WeightVector::new(rep, 2, 2).unwrap();
        let paths = multiplicity_paths(&w).unwrap();
        assert_eq!(paths.len(), 3);
        assert_eq!(paths[0], LoweringSequence(vec![(RootIndex::Alpha3, 2)]));
        assert_eq!(
            paths[1],
            LoweringSequence(vec![
                (RootIndex::Alpha1, 1),
                (RootIndex::Alpha2, 1),
                (RootIndex::Alpha3, 1)
            ])
        );
        assert_eq!(
            paths[2],
            LoweringSequence(vec![(RootIndex::Alpha1, 2), (RootIndex::Alpha2, 2)])
        );
    }
}
