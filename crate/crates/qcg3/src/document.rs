//! Deterministic table and report documents.
//!
//! The JSON schema is stable and ordered: channels ascend in s, states in
//! (Omega, t), terms in (omega1, omega2). Exact scalars use the canonical
//! string form and parse back losslessly; numeric scalars are decimal
//! strings at the document's precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qscalar::{parse_scalar, Backend, Scalar};
use crate::tensor::{ChannelData, ChannelLabel, CoupledState, Orientation, QcgTable};
use crate::weights::{enumerate_weights, RepLabel, WeightVector};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TableDocument {
    pub n1: u32,
    pub n2: u32,
    pub backend: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    pub channels: Vec<ChannelDocument>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ChannelDocument {
    pub s: u32,
    pub dim: u64,
    pub states: Vec<StateDocument>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct StateDocument {
    #[serde(rename = "Omega")]
    pub omega: [u32; 2],
    pub t: u32,
    pub terms: Vec<TermDocument>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TermDocument {
    pub omega1: [u32; 2],
    pub omega2: [u32; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<String>,
}

/// Build the document for a table, restricted to one channel when `only_s`
/// is given.
pub fn emit_table(table: &QcgTable, backend: &Backend, only_s: Option<u32>) -> TableDocument {
    let (q, precision) = match backend {
        Backend::Exact { .. } => (None, None),
        Backend::Numeric { ctx } => (Some(ctx.q().to_string()), Some(ctx.digits)),
    };
    let channels = table
        .channels
        .iter()
        .filter(|ch| only_s.map_or(true, |s| ch.label.s == s))
        .map(|ch| ChannelDocument {
            s: ch.label.s,
            dim: ch.label.rep.dim(),
            states: ch
                .states
                .iter()
                .map(|st| StateDocument {
                    omega: [st.omega.a, st.omega.b],
                    t: st.t,
                    terms: st
                        .terms
                        .iter()
                        .map(|((w1, w2), c)| TermDocument {
                            omega1: [w1.a, w1.b],
                            omega2: [w2.a, w2.b],
                            exact: backend.is_exact().then(|| c.to_canonical_string()),
                            numeric: (!backend.is_exact()).then(|| c.to_canonical_string()),
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect();
    TableDocument {
        n1: table.n1,
        n2: table.n2,
        backend: if backend.is_exact() { "exact" } else { "numeric" }.to_string(),
        q,
        precision,
        channels,
    }
}

impl TableDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serialization");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<TableDocument> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad table document: {e}")))
    }

    /// Reconstruct the in-memory table, parsing every scalar back.
    pub fn to_table(&self, backend: &Backend) -> Result<QcgTable> {
        let mut channels = Vec::new();
        for ch in &self.channels {
            let rep = RepLabel::new(self.n1 + self.n2 - 2 * ch.s, ch.s);
            let label = ChannelLabel { s: ch.s, rep };
            let mut states = Vec::new();
            for st in &ch.states {
                let omega = WeightVector::new(rep, st.omega[0], st.omega[1])
                    .ok_or_else(|| Error::Parse(format!("Omega {:?} outside diagram", st.omega)))?;
                let mut terms = std::collections::BTreeMap::new();
                for t in &st.terms {
                    let w1 = WeightVector::new(RepLabel::symmetric(self.n1), t.omega1[0], t.omega1[1])
                        .ok_or_else(|| Error::Parse("omega1 outside diagram".into()))?;
                    let w2 = WeightVector::new(RepLabel::symmetric(self.n2), t.omega2[0], t.omega2[1])
                        .ok_or_else(|| Error::Parse("omega2 outside diagram".into()))?;
                    let text = t
                        .exact
                        .as_deref()
                        .or(t.numeric.as_deref())
                        .ok_or_else(|| Error::Parse("term without a value".into()))?;
                    terms.insert((w1, w2), parse_scalar(text, backend)?);
                }
                states.push(CoupledState { channel: label, omega, t: st.t, terms });
            }
            channels.push(ChannelData { label, states });
        }
        Ok(QcgTable {
            n1: self.n1,
            n2: self.n2,
            orientation: Orientation::Standard,
            channels,
        })
    }
}

/// CSV rendering: one row per coefficient, exact canonical string plus a
/// numeric column at the backend's (or probe's) q.
pub fn emit_csv(table: &QcgTable, backend: &Backend, only_s: Option<u32>) -> String {
    let ctx = backend.context();
    let mut out = String::from("s,t,Omega_A,Omega_B,o1_A,o1_B,o2_A,o2_B,exact,numeric\n");
    for ch in &table.channels {
        if only_s.map_or(false, |s| ch.label.s != s) {
            continue;
        }
        for st in &ch.states {
            for ((w1, w2), c) in &st.terms {
                let exact = if backend.is_exact() { c.to_canonical_string() } else { String::new() };
                let numeric = c.eval(ctx).to_decimal(ctx.digits);
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    ch.label.s, st.t, st.omega.a, st.omega.b, w1.a, w1.b, w2.a, w2.b, exact, numeric
                ));
            }
        }
    }
    out
}

/// Human-readable aligned text rendering.
pub fn emit_text(table: &QcgTable, only_s: Option<u32>) -> String {
    let mut out = String::new();
    out.push_str(&format!("table {} x {}\n", table.n1, table.n2));
    for ch in &table.channels {
        if only_s.map_or(false, |s| ch.label.s != s) {
            continue;
        }
        out.push_str(&format!(
            "channel s={} rep=({},{}) dim={}\n",
            ch.label.s,
            ch.label.rep.n,
            ch.label.rep.m,
            ch.label.rep.dim()
        ));
        for st in &ch.states {
            out.push_str(&format!(
                "  state Omega=({},{}) t={}\n",
                st.omega.a, st.omega.b, st.t
            ));
            for ((w1, w2), c) in &st.terms {
                out.push_str(&format!(
                    "    ({},{}) x ({},{}) : {}\n",
                    w1.a, w1.b, w2.a, w2.b, c
                ));
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct WeightsDocument {
    pub n: u32,
    pub m: u32,
    pub rows: Vec<[u32; 3]>,
    pub dim: u64,
}

pub fn weights_document(n: u32, m: u32) -> WeightsDocument {
    let rows: Vec<[u32; 3]> = enumerate_weights(RepLabel::new(n, m))
        .into_iter()
        .map(|(w, mult)| [w.a, w.b, mult])
        .collect();
    let dim: u64 = rows.iter().map(|r| r[2] as u64).sum();
    debug_assert_eq!(dim, RepLabel::new(n, m).dim());
    WeightsDocument { n, m, rows, dim }
}

impl WeightsDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serialization");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("   A   B mult\n");
        for r in &self.rows {
            out.push_str(&format!("{:4}{:4}{:5}\n", r[0], r[1], r[2]));
        }
        out.push_str(&format!("total dimension: {}\n", self.dim));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("A,B,multiplicity\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r[0], r[1], r[2]));
        }
        out.push_str(&format!("# total dimension,{}\n", self.dim));
        out
    }
}

/// Scalar rendering for one coefficient in exact runs plus its numeric value
/// (used by the rank-1 query command).
pub fn scalar_with_numeric(c: &Scalar, backend: &Backend) -> (String, String) {
    let ctx = backend.context();
    (c.to_canonical_string(), c.eval(ctx).to_decimal(ctx.digits))
}
