//! Rank-2 root and weight geometry.
//!
//! Weights are kept in (A, B) lattice coordinates relative to the highest
//! weight of their representation: `omega = n*mu1 + m*mu2 - A*alpha1 -
//! B*alpha2`. All geometry goes through the exact rational inner product
//! fixed by `alpha_i . alpha_j = delta_ij - delta_{|i-j|=1}/2` and
//! `mu_i . alpha_j = delta_ij / 2`.

use num_rational::Rational64;
use std::fmt;

use crate::half::Half;

/// One of the three positive roots; alpha3 = alpha1 + alpha2.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum RootIndex {
    Alpha1,
    Alpha2,
    Alpha3,
}

impl RootIndex {
    pub const ALL: [RootIndex; 3] = [RootIndex::Alpha1, RootIndex::Alpha2, RootIndex::Alpha3];

    pub fn index(self) -> u8 {
        match self {
            RootIndex::Alpha1 => 1,
            RootIndex::Alpha2 => 2,
            RootIndex::Alpha3 => 3,
        }
    }

    pub fn expr(self) -> WeightExpr {
        match self {
            RootIndex::Alpha1 => WeightExpr { mu: [0, 0], alpha: [1, 0] },
            RootIndex::Alpha2 => WeightExpr { mu: [0, 0], alpha: [0, 1] },
            RootIndex::Alpha3 => WeightExpr { mu: [0, 0], alpha: [1, 1] },
        }
    }

    /// How one lowering step moves the (A, B) coordinates.
    pub fn step(self) -> (u32, u32) {
        match self {
            RootIndex::Alpha1 => (1, 0),
            RootIndex::Alpha2 => (0, 1),
            RootIndex::Alpha3 => (1, 1),
        }
    }

    /// The image under the diagram involution alpha1 <-> alpha2.
    pub fn conjugate(self) -> RootIndex {
        match self {
            RootIndex::Alpha1 => RootIndex::Alpha2,
            RootIndex::Alpha2 => RootIndex::Alpha1,
            RootIndex::Alpha3 => RootIndex::Alpha3,
        }
    }
}

/// An integer combination of the fundamental weights and simple roots.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct WeightExpr {
    pub mu: [i64; 2],
    pub alpha: [i64; 2],
}

impl WeightExpr {
    pub fn sub_root(self, root: RootIndex, times: i64) -> WeightExpr {
        let r = root.expr();
        WeightExpr {
            mu: self.mu,
            alpha: [self.alpha[0] - times * r.alpha[0], self.alpha[1] - times * r.alpha[1]],
        }
    }
}

/// Exact inner product via bilinear extension of the defining relations.
pub fn inner_product(u: &WeightExpr, v: &WeightExpr) -> Rational64 {
    // express both vectors in the alpha basis: mu1 = (2 alpha1 + alpha2)/3,
    // mu2 = (alpha1 + 2 alpha2)/3
    let coeffs = |w: &WeightExpr| {
        [
            Rational64::new(2 * w.mu[0] + w.mu[1] + 3 * w.alpha[0], 3),
            Rational64::new(w.mu[0] + 2 * w.mu[1] + 3 * w.alpha[1], 3),
        ]
    };
    let a = coeffs(u);
    let b = coeffs(v);
    let half = Rational64::new(1, 2);
    a[0] * b[0] + a[1] * b[1] - half * (a[0] * b[1] + a[1] * b[0])
}

fn to_half(r: Rational64) -> Half {
    let doubled = r * Rational64::from_integer(2);
    assert!(doubled.is_integer(), "inner product {r} is not a half-integer");
    Half::twice(doubled.to_integer())
}

/// Representation label (n, m): n single columns, m double columns.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct RepLabel {
    pub n: u32,
    pub m: u32,
}

impl RepLabel {
    pub fn new(n: u32, m: u32) -> RepLabel {
        RepLabel { n, m }
    }

    pub fn symmetric(n: u32) -> RepLabel {
        RepLabel { n, m: 0 }
    }

    pub fn dim(&self) -> u64 {
        let (n, m) = (self.n as u64, self.m as u64);
        (n + 1) * (m + 1) * (n + m + 2) / 2
    }

    pub fn highest_weight(&self) -> WeightExpr {
        WeightExpr { mu: [self.n as i64, self.m as i64], alpha: [0, 0] }
    }

    pub fn conjugate(&self) -> RepLabel {
        RepLabel { n: self.m, m: self.n }
    }

    /// Whether lattice point (a, b) lies in the weight diagram. The support
    /// is the hexagon (or triangle) cut out by the six Weyl images of the
    /// highest weight.
    pub fn in_support(&self, a: i64, b: i64) -> bool {
        let (n, m) = (self.n as i64, self.m as i64);
        a >= 0 && b >= 0 && a <= n + m && b <= n + m && a - b <= n && b - a <= m
    }

    /// Shell depth of (a, b): how many boundary hexagons must be peeled to
    /// reach it.
    fn shell_depth(&self, a: i64, b: i64) -> u32 {
        let (n, m) = (self.n as i64, self.m as i64);
        debug_assert!(self.in_support(a, b));
        [a, b, n + m - a, n + m - b, n - (a - b), m - (b - a)]
            .into_iter()
            .min()
            .unwrap() as u32
    }
}

/// A weight `omega = n mu1 + m mu2 - A alpha1 - B alpha2` of the diagram of
/// (n, m); (A, B) always lies in the support.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct WeightVector {
    pub rep: RepLabel,
    pub a: u32,
    pub b: u32,
}

impl WeightVector {
    pub fn new(rep: RepLabel, a: u32, b: u32) -> Option<WeightVector> {
        if rep.in_support(a as i64, b as i64) {
            Some(WeightVector { rep, a, b })
        } else {
            None
        }
    }

    pub fn highest(rep: RepLabel) -> WeightVector {
        WeightVector { rep, a: 0, b: 0 }
    }

    pub fn expr(&self) -> WeightExpr {
        WeightExpr {
            mu: [self.rep.n as i64, self.rep.m as i64],
            alpha: [-(self.a as i64), -(self.b as i64)],
        }
    }

    /// Number of linearly independent states at this weight: 1 + shell
    /// depth, saturating at min(n, m) + 1 where the shells turn triangular.
    pub fn multiplicity(&self) -> u32 {
        let depth = self.rep.shell_depth(self.a as i64, self.b as i64);
        1 + depth.min(self.rep.n.min(self.rep.m))
    }

    /// The weight one lowering step away, if it stays inside the diagram.
    pub fn lowered(&self, root: RootIndex, times: u32) -> Option<WeightVector> {
        let (da, db) = root.step();
        WeightVector::new(self.rep, self.a + da * times, self.b + db * times)
    }

    /// Mirror image in the conjugate representation (mu1 <-> mu2, alpha1 <->
    /// alpha2).
    pub fn conjugate(&self) -> WeightVector {
        WeightVector { rep: self.rep.conjugate(), a: self.b, b: self.a }
    }

    /// The per-root spin/projection profile of this weight.
    pub fn subalgebra_profile(&self) -> SubalgebraProfile {
        let (n, m) = (self.rep.n as i64, self.rep.m as i64);
        let (a, b) = (self.a as i64, self.b as i64);
        let lambda = self.rep.highest_weight();

        let j1_point = WeightExpr {
            mu: lambda.mu,
            alpha: [-(b - m).max(0), -b],
        };
        let j2_point = WeightExpr {
            mu: lambda.mu,
            alpha: [-a, -(a - n).max(0)],
        };
        // at a == b both branches give the same point
        let j3_point = if a >= b {
            WeightExpr { mu: lambda.mu, alpha: [-(a - b), 0] }
        } else {
            WeightExpr { mu: lambda.mu, alpha: [0, -(b - a)] }
        };
        let omega = self.expr();
        let j = [
            to_half(inner_product(&j1_point, &RootIndex::Alpha1.expr())),
            to_half(inner_product(&j2_point, &RootIndex::Alpha2.expr())),
            to_half(inner_product(&j3_point, &RootIndex::Alpha3.expr())),
        ];
        let mm = [
            to_half(inner_product(&omega, &RootIndex::Alpha1.expr())),
            to_half(inner_product(&omega, &RootIndex::Alpha2.expr())),
            to_half(inner_product(&omega, &RootIndex::Alpha3.expr())),
        ];
        SubalgebraProfile { j, m: mm }
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})-{}a1-{}a2", self.rep.n, self.rep.m, self.a, self.b)
    }
}

/// The triples j(omega), m(omega) seen by the three rank-1 subalgebras.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SubalgebraProfile {
    pub j: [Half; 3],
    pub m: [Half; 3],
}

impl SubalgebraProfile {
    pub fn j(&self, root: RootIndex) -> Half {
        self.j[root.index() as usize - 1]
    }

    pub fn m(&self, root: RootIndex) -> Half {
        self.m[root.index() as usize - 1]
    }
}

/// All weights of (n, m) with their multiplicities, in lexicographic (A, B)
/// order. The weighted count equals dim(n, m).
pub fn enumerate_weights(rep: RepLabel) -> Vec<(WeightVector, u32)> {
    let top = (rep.n + rep.m) as i64;
    let mut out = Vec::new();
    for a in 0..=top {
        for b in 0..=top {
            if rep.in_support(a, b) {
                let w = WeightVector { rep, a: a as u32, b: b as u32 };
                let mult = w.multiplicity();
                out.push((w, mult));
            }
        }
    }
    out
}

/// Conjugation map on whole weights (the spec-level operation; see
/// [`WeightVector::conjugate`]).
pub fn conjugate_weight(w: &WeightVector) -> WeightVector {
    w.conjugate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product_relations() {
        let a1 = RootIndex::Alpha1.expr();
        let a2 = RootIndex::Alpha2.expr();
        let mu1 = WeightExpr { mu: [1, 0], alpha: [0, 0] };
        let mu2 = WeightExpr { mu: [0, 1], alpha: [0, 0] };
        assert_eq!(inner_product(&a1, &a1), Rational64::from_integer(1));
        assert_eq!(inner_product(&a1, &a2), Rational64::new(-1, 2));
        assert_eq!(inner_product(&mu1, &a1), Rational64::new(1, 2));
        assert_eq!(inner_product(&mu1, &a2), Rational64::from_integer(0));
        assert_eq!(inner_product(&mu1, &mu1), Rational64::new(1, 3));
        assert_eq!(inner_product(&mu1, &mu2), Rational64::new(1, 6));
        // (5 mu1 + 2 mu2 - alpha1 - 3 alpha2) . alpha1 = 3
        let v = WeightExpr { mu: [5, 2], alpha: [-1, -3] };
        assert_eq!(inner_product(&v, &a1), Rational64::from_integer(3));
    }

    #[test]
    fn profile_of_marked_point() {
        // the triple-multiplicity point of the (5,2) diagram
        let w = WeightVector::new(RepLabel::new(5, 2), 4, 3).unwrap();
        let p = w.subalgebra_profile();
        assert_eq!(p.j(RootIndex::Alpha1), Half::int(3));
        assert_eq!(p.m(RootIndex::Alpha1), Half::int(0));
        assert_eq!(w.multiplicity(), 3);
    }

    #[test]
    fn symmetric_rep_profiles() {
        let rep = RepLabel::symmetric(4);
        let hw = WeightVector::highest(rep);
        let p = hw.subalgebra_profile();
        assert_eq!(p.j(RootIndex::Alpha1), Half::int(2));
        assert_eq!(p.m(RootIndex::Alpha1), Half::int(2));
        assert_eq!(p.j(RootIndex::Alpha2), Half::ZERO);
        // support is the triangle 0 <= B <= A <= n, multiplicity free
        for (w, mult) in enumerate_weights(rep) {
            assert_eq!(mult, 1);
            assert!(w.b <= w.a && w.a <= rep.n);
            let p = w.subalgebra_profile();
            for root in RootIndex::ALL {
                assert!(p.j(root) >= p.m(root).abs());
            }
        }
    }

    #[test]
    fn dimension_counts() {
        assert_eq!(RepLabel::new(1, 0).dim(), 3);
        assert_eq!(RepLabel::new(5, 2).dim(), 81);
        let total: u64 = enumerate_weights(RepLabel::new(5, 2))
            .iter()
            .map(|(_, m)| *m as u64)
            .sum();
        assert_eq!(total, 81);
        let cap = enumerate_weights(RepLabel::new(5, 2))
            .iter()
            .map(|(_, m)| *m)
            .max()
            .unwrap();
        assert_eq!(cap, 3);
    }

    #[test]
    fn conjugation_is_involution() {
        for (w, mult) in enumerate_weights(RepLabel::new(3, 1)) {
            let c = w.conjugate();
            assert_eq!(c.rep, RepLabel::new(1, 3));
            assert_eq!(c.conjugate(), w);
            assert_eq!(c.multiplicity(), mult);
        }
    }

    #[test]
    fn alpha3_string_length_matches_profile() {
        let rep = RepLabel::symmetric(5);
        for (w, _) in enumerate_weights(rep) {
            let p = w.subalgebra_profile();
            // count diagram points along the alpha3 line through w
            let mut len = 1i64;
            let mut k = 1;
            while rep.in_support(w.a as i64 + k, w.b as i64 + k) {
                len += 1;
                k += 1;
            }
            let mut k = 1;
            while rep.in_support(w.a as i64 - k, w.b as i64 - k) {
                len += 1;
                k += 1;
            }
            assert_eq!(
                (p.j(RootIndex::Alpha3).doubled() + 1) as i64,
                len,
                "alpha3 string length at {w}"
            );
        }
    }
}
