//! JSON and CSV formats.
//!
//! * PDA: `{"rows","cols","Z","S","entries"}` with `"*"` for a star and
//!   integers for labels; optional `"row_keys"` (the subset or vector
//!   indexing each row). A Partition family adds `"q","z","m"` and a
//!   `"phi"` table of `[label, vector]` pairs; `"entries"` is then the
//!   side-by-side concatenation of its sub-arrays.
//! * Scheme: `{"kind","params","rounds","round_shift","rows","cols",
//!   "node_placement","user_retrieve","user_delivery"}` plus `"source_pda"`
//!   (1D and shared-link), `"outer_pda"` (hybrid), `"mds"` (baseline with
//!   `K2 > L`) or `"groups"` (grouping). Placement and retrieve rows list
//!   their star columns; delivery cells use `"*"`, `"-"` (idle), integers,
//!   `{"type1": n}`, `{"s": s, "e": [..]}` and `{"block","group","s"}`.
//!   Loading rebuilds the scheme from its parameters and rejects a file
//!   whose arrays differ from the rebuilt ones.
//! * Tradeoff CSV: header
//!   `memory_ratio_num,memory_ratio_den,load_num,load_den,scheme,t`.
//!
//! Rationals are always `{"num": n, "den": d}` in JSON.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::io::{Read, Write};

use crate::arrays::{DeliveryArray, StarMap};
use crate::error::{Error, Result};
use crate::macc1d::{assemble_1d_scheme, Macc1dScheme};
use crate::macc2d::{
    baseline_scheme, corner_points, grouping_scheme, hybrid_scheme, lower_convex_envelope, Macc2dScheme,
    SchemeDetail, SchemeFamily, SchemeKind,
};
use crate::pda::{PartitionFamily, PdaArray};
use crate::scheme::{CodedCachingScheme, Layout, SharedLinkScheme, Topology};
use crate::{ExactPoint, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: i64,
    pub den: i64,
}

impl From<Rational> for RationalJson {
    fn from(r: Rational) -> Self {
        Self {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

impl TryFrom<RationalJson> for Rational {
    type Error = Error;

    fn try_from(r: RationalJson) -> Result<Self> {
        if r.den == 0 {
            return Err(Error::Format("rational with zero denominator".into()));
        }
        Ok(Rational::new(r.num, r.den))
    }
}

pub fn pda_to_json(p: &PdaArray) -> Value {
    serde_json::to_value(p).expect("PDA serializes")
}

pub fn pda_from_json(v: Value) -> Result<PdaArray> {
    Ok(serde_json::from_value(v)?)
}

pub fn partition_to_json(fam: &PartitionFamily) -> Value {
    let mut v = pda_to_json(&fam.combined());
    let obj = v.as_object_mut().expect("PDA is an object");
    obj.insert("q".into(), json!(fam.q()));
    obj.insert("z".into(), json!(fam.z()));
    obj.insert("m".into(), json!(fam.m()));
    obj.insert("phi".into(), json!(fam.phi_table()));
    v
}

fn star_rows(m: &StarMap) -> Vec<Vec<usize>> {
    (0..m.rows()).map(|j| m.row(j).to_vec()).collect()
}

fn arrays_json<S: CodedCachingScheme + ?Sized>(s: &S) -> Value {
    json!({
        "rounds": s.rounds(),
        "round_shift": s.round_shift(),
        "rows": s.rows(),
        "cols": s.topology().users(),
        "node_placement": star_rows(s.first_round_placement()),
        "user_retrieve": star_rows(s.first_round_retrieve()),
        "user_delivery": s.first_round_delivery().row_vecs(),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

fn rational(r: Rational) -> Value {
    serde_json::to_value(RationalJson::from(r)).expect("plain struct")
}

/// Any scheme the tool can build, simulate and serialize.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyScheme {
    SharedLink(SharedLinkScheme),
    Line(Macc1dScheme),
    Grid(Macc2dScheme),
}

impl AnyScheme {
    pub fn as_dyn(&self) -> &dyn CodedCachingScheme {
        match self {
            AnyScheme::SharedLink(s) => s,
            AnyScheme::Line(s) => s,
            AnyScheme::Grid(s) => s,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AnyScheme::SharedLink(_) => "shared-link",
            AnyScheme::Line(_) => "cwlzc",
            AnyScheme::Grid(s) => s.kind().name(),
        }
    }

    /// Number of files `N` the scheme was built for.
    pub fn n(&self) -> usize {
        match self {
            AnyScheme::SharedLink(s) => s.pda().cols(),
            AnyScheme::Line(s) => s.n(),
            AnyScheme::Grid(s) => s.n(),
        }
    }

    pub fn params_json(&self) -> Value {
        let s = self.as_dyn();
        let common = json!({
            "N": self.n(),
            "memory_ratio": rational(s.memory_ratio()),
            "load": rational(s.closed_form_load()),
        });
        let specific = match self {
            AnyScheme::SharedLink(p) => json!({
                "K": p.pda().cols(),
                "F": p.pda().rows(),
                "Z": p.pda().z(),
                "S": p.pda().s(),
            }),
            AnyScheme::Line(m) => json!({ "K": m.k(), "L": m.l(), "t": rational(Rational::from_integer(m.t() as i64)) }),
            AnyScheme::Grid(g) => json!({ "K1": g.k1(), "K2": g.k2(), "L": g.l(), "t": rational(g.t()) }),
        };
        merge(specific, common)
    }

    pub fn to_json(&self) -> Value {
        let head = json!({ "kind": self.kind_name(), "params": self.params_json() });
        let mut v = merge(head, arrays_json(self.as_dyn()));
        let extra = match self {
            AnyScheme::SharedLink(s) => json!({ "source_pda": pda_to_json(s.pda()) }),
            AnyScheme::Line(m) => json!({ "source_pda": pda_to_json(m.source_pda()) }),
            AnyScheme::Grid(g) => match g.detail() {
                SchemeDetail::Baseline { mds: Some(rs), .. } => json!({
                    "mds": { "field": "GF(256)", "k": rs.n(), "l": rs.k(), "points": rs.points() }
                }),
                SchemeDetail::Baseline { mds: None, .. } => json!({}),
                SchemeDetail::Grouping { groups, .. } => json!({ "groups": groups }),
                SchemeDetail::Hybrid { outer, .. } => json!({ "outer_pda": pda_to_json(outer.source_pda()) }),
            },
        };
        v = merge(v, extra);
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v["kind"]
            .as_str()
            .ok_or_else(|| Error::Format("scheme file lacks a \"kind\"".into()))?;
        let params = &v["params"];
        let get = |key: &str| -> Result<usize> {
            params[key]
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Format(format!("params.{key} missing or not an integer")))
        };
        let get_t = || -> Result<Rational> {
            let r: RationalJson = serde_json::from_value(params["t"].clone())
                .map_err(|_| Error::Format("params.t must be {\"num\",\"den\"}".into()))?;
            r.try_into()
        };
        let int_t = |t: Rational| -> Result<usize> {
            if t.is_integer() && *t.numer() >= 0 {
                Ok(*t.numer() as usize)
            } else {
                Err(Error::Format(format!("t = {t} must be a non-negative integer for {kind}")))
            }
        };
        let built = match kind {
            "shared-link" => AnyScheme::SharedLink(SharedLinkScheme::new(pda_from_json(v["source_pda"].clone())?)),
            "cwlzc" => AnyScheme::Line(assemble_1d_scheme(
                pda_from_json(v["source_pda"].clone())?,
                get("L")?,
                int_t(get_t()?)?,
                get("N")?,
            )?),
            "baseline-small" | "baseline-mds" | "baseline" => {
                AnyScheme::Grid(baseline_scheme(get("K1")?, get("K2")?, get("L")?, get_t()?, get("N")?)?)
            }
            "grouping" => AnyScheme::Grid(grouping_scheme(
                get("K1")?,
                get("K2")?,
                get("L")?,
                int_t(get_t()?)?,
                get("N")?,
            )?),
            "hybrid" => {
                let outer = match v.get("outer_pda") {
                    Some(p) if !p.is_null() => Some(pda_from_json(p.clone())?),
                    _ => None,
                };
                AnyScheme::Grid(hybrid_scheme(
                    get("K1")?,
                    get("K2")?,
                    get("L")?,
                    int_t(get_t()?)?,
                    get("N")?,
                    outer,
                )?)
            }
            other => return Err(Error::Format(format!("unknown scheme kind {other:?}"))),
        };
        let rebuilt = arrays_json(built.as_dyn());
        for key in ["rounds", "round_shift", "rows", "cols", "node_placement", "user_retrieve", "user_delivery"] {
            if let Some(given) = v.get(key) {
                if *given != rebuilt[key] {
                    return Err(Error::Format(format!(
                        "\"{key}\" does not match the scheme rebuilt from its parameters"
                    )));
                }
            }
        }
        Ok(built)
    }
}

/// Parse the delivery array of a scheme file, e.g. for inspection.
pub fn delivery_from_json(v: &Value) -> Result<DeliveryArray> {
    let rows: Vec<Vec<crate::arrays::DeliveryEntry>> = serde_json::from_value(v["user_delivery"].clone())?;
    let cols = v["cols"]
        .as_u64()
        .ok_or_else(|| Error::Format("scheme file lacks \"cols\"".into()))? as usize;
    DeliveryArray::from_rows(cols, rows)
}

/// Describes the packet layout for reports.
pub fn layout_json(layout: Layout) -> Value {
    match layout {
        Layout::Uncoded => json!({ "kind": "uncoded" }),
        Layout::Mds {
            source_blocks,
            coded_blocks,
            rows_per_block,
        } => json!({
            "kind": "mds",
            "source_blocks": source_blocks,
            "coded_blocks": coded_blocks,
            "rows_per_block": rows_per_block,
        }),
    }
}

pub fn topology_name(t: Topology) -> &'static str {
    match t {
        Topology::SharedLink { .. } => "shared-link",
        Topology::Line { .. } => "line",
        Topology::Grid { .. } => "grid",
    }
}

pub const TRADEOFF_HEADER: [&str; 6] = ["memory_ratio_num", "memory_ratio_den", "load_num", "load_den", "scheme", "t"];

/// One row of a tradeoff CSV.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct TradeoffRow {
    pub memory_ratio_num: i64,
    pub memory_ratio_den: i64,
    pub load_num: i64,
    pub load_den: i64,
    pub scheme: String,
    pub t: String,
}

impl TradeoffRow {
    pub fn memory_ratio(&self) -> Rational {
        Rational::new(self.memory_ratio_num, self.memory_ratio_den)
    }

    pub fn load(&self) -> Rational {
        Rational::new(self.load_num, self.load_den)
    }
}

/// Corner points of every feasible requested family, and the lower convex
/// envelope of their union.
pub fn tradeoff_table(
    k1: usize,
    k2: usize,
    l: usize,
    n: usize,
    kinds: &[SchemeFamily],
) -> (Vec<ExactPoint>, Vec<ExactPoint>) {
    let corners: Vec<ExactPoint> = kinds
        .iter()
        .filter_map(|&k| corner_points(k1, k2, l, n, k).ok())
        .flatten()
        .collect();
    let envelope = lower_convex_envelope(&corners);
    (corners, envelope)
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Corner rows (`scheme` = family) followed by envelope rows
/// (`scheme` = `envelope:<family>`). `float` appends decimal columns.
pub fn write_tradeoff_csv<W: Write>(
    w: W,
    corners: &[ExactPoint],
    envelope: &[ExactPoint],
    float: bool,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    let mut header: Vec<&str> = TRADEOFF_HEADER.to_vec();
    if float {
        header.extend(["memory_ratio", "load"]);
    }
    out.write_record(&header).map_err(csv_err)?;
    let rows = corners
        .iter()
        .map(|p| (p, p.kind.name().to_string()))
        .chain(envelope.iter().map(|p| (p, format!("envelope:{}", p.kind))));
    for (p, scheme) in rows {
        let mut rec = vec![
            p.memory_ratio.numer().to_string(),
            p.memory_ratio.denom().to_string(),
            p.load.numer().to_string(),
            p.load.denom().to_string(),
            scheme,
            p.t.to_string(),
        ];
        if float {
            rec.push(format!("{:.6}", to_f64(p.memory_ratio)));
            rec.push(format!("{:.6}", to_f64(p.load)));
        }
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))?;
    Ok(())
}

pub fn read_tradeoff_csv<R: Read>(r: R) -> Result<Vec<TradeoffRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    if header.iter().take(6).ne(TRADEOFF_HEADER.iter().copied()) {
        return Err(Error::Format(format!("unexpected tradeoff header {header:?}")));
    }
    rdr.deserialize()
        .map(|row| row.map_err(|e| Error::Format(e.to_string())))
        .collect()
}

/// File name stem `scheme_<kind>_<params>` used by the command-line tool.
pub fn scheme_file_name(s: &AnyScheme) -> String {
    let t = |r: Rational| r.to_string().replace('/', "over");
    match s {
        AnyScheme::SharedLink(p) => format!("scheme_shared-link_{}_{}.json", p.pda().cols(), p.pda().rows()),
        AnyScheme::Line(m) => format!("scheme_cwlzc_{}_{}_{}_{}.json", m.k(), m.l(), m.t(), m.n()),
        AnyScheme::Grid(g) => {
            let kind = match g.kind() {
                SchemeKind::BaselineSmall | SchemeKind::BaselineMds => "baseline",
                SchemeKind::Grouping => "grouping",
                SchemeKind::Hybrid => "hybrid",
            };
            format!("scheme_{kind}_{}_{}_{}_{}_{}.json", g.k1(), g.k2(), g.l(), t(g.t()), g.n())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macc1d::cwlzc_scheme;
    use crate::pda::{construct_mn_pda, construct_partition_pda};

    #[test]
    fn schemes_round_trip() {
        let all = vec![
            AnyScheme::SharedLink(SharedLinkScheme::new(construct_mn_pda(4, 2).unwrap())),
            AnyScheme::Line(cwlzc_scheme(5, 2, 2, 15).unwrap()),
            AnyScheme::Grid(baseline_scheme(5, 4, 2, Rational::from_integer(2), 20).unwrap()),
            AnyScheme::Grid(grouping_scheme(4, 4, 2, 1, 16).unwrap()),
            AnyScheme::Grid(hybrid_scheme(5, 3, 2, 2, 15, None).unwrap()),
        ];
        for s in all {
            let text = serde_json::to_string(&s.to_json()).unwrap();
            let back = AnyScheme::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn tampered_scheme_rejected() {
        let s = AnyScheme::Line(cwlzc_scheme(5, 2, 2, 15).unwrap());
        let mut v = s.to_json();
        v["node_placement"][0] = json!([0, 1]);
        assert!(AnyScheme::from_json(&v).is_err());
    }

    #[test]
    fn hybrid_json_sections() {
        let s = AnyScheme::Grid(hybrid_scheme(5, 3, 2, 2, 15, None).unwrap());
        let v = s.to_json();
        assert_eq!(v["kind"], "hybrid");
        assert_eq!(v["params"]["load"], json!({"num": 3, "den": 1}));
        assert_eq!(v["outer_pda"]["cols"], 3);
        assert_eq!(scheme_file_name(&s), "scheme_hybrid_5_3_2_2_15.json");
    }

    #[test]
    fn partition_json_has_phi() {
        let fam = construct_partition_pda(3, 2, 2).unwrap();
        let v = partition_to_json(&fam);
        assert_eq!(v["phi"][2], json!([3, [3, 1, 1]]));
        assert_eq!(v["cols"], 6);
        let plain = pda_from_json(v).unwrap();
        assert_eq!(plain, fam.combined());
    }

    #[test]
    fn csv_round_trip() {
        let kinds = [SchemeFamily::Baseline, SchemeFamily::Hybrid];
        let (corners, env) = tradeoff_table(5, 3, 2, 15, &kinds);
        let mut buf = Vec::new();
        write_tradeoff_csv(&mut buf, &corners, &env, false).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("memory_ratio_num,memory_ratio_den,load_num,load_den,scheme,t\n"));
        let rows = read_tradeoff_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), corners.len() + env.len());
        assert!(rows.iter().any(|r| r.scheme == "hybrid" && r.t == "2" && r.load() == Rational::from_integer(3)));
        assert!(rows.iter().any(|r| r.scheme.starts_with("envelope:")));

        let mut buf = Vec::new();
        write_tradeoff_csv(&mut buf, &corners, &env, true).unwrap();
        assert_eq!(read_tradeoff_csv(buf.as_slice()).unwrap(), rows);
    }
}
