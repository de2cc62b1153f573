//! File formats: state files, entropy tables, regions, constraint lists,
//! rate bounds, and the CSV emitters.
//!
//! JSON output is canonical: object keys are sorted and every float is
//! rounded to 12 significant digits, so identical inputs give identical
//! bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::applications::{LinearConstraint, RateBound};
use crate::entropy_table::SubsetEntropyTable;
use crate::error::{Error, Result};
use crate::ledger::LedgerReport;
use crate::qstate::{make_state, Complex64, PartyLayout, PureState};
use crate::region::{CombingRegion, EntanglementVector, SubsetBound};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Round to [`SIGNIFICANT_DIGITS`] significant digits; `-0.0` becomes `0.0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let r: f64 = s.parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Float formatted the way it appears in canonical output.
pub fn format_float(x: f64) -> String {
    serde_json::to_string(&round_sig(x)).unwrap_or_else(|_| x.to_string())
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serialize with sorted keys and rounded floats.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)?)
}

/// `0b` followed by `width` binary digits; bit 0 (Bob 1) is rightmost.
pub fn mask_string(mask: u32, width: usize) -> String {
    format!("0b{mask:0width$b}")
}

pub fn parse_mask(s: &str) -> Result<u32> {
    let digits = s
        .strip_prefix("0b")
        .ok_or_else(|| Error::Parse(format!("mask {s:?} must start with 0b")))?;
    u32::from_str_radix(digits, 2).map_err(|e| Error::Parse(format!("mask {s:?}: {e}")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartyDoc {
    name: String,
    dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    parties: Vec<PartyDoc>,
    amplitudes: Vec<[f64; 2]>,
}

pub fn state_to_json(state: &PureState) -> Result<String> {
    let layout = state.layout();
    let doc = StateDoc {
        parties: layout
            .names()
            .iter()
            .zip(layout.dims())
            .map(|(name, &dim)| PartyDoc {
                name: name.clone(),
                dim,
            })
            .collect(),
        amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
    };
    to_canonical_json(&doc)
}

/// Parse a state file. With `renormalize` a non-unit norm is rescaled.
pub fn state_from_json(text: &str, renormalize: bool) -> Result<PureState> {
    let doc: StateDoc = serde_json::from_str(text)?;
    let (names, dims) = doc.parties.into_iter().map(|p| (p.name, p.dim)).unzip();
    let layout = PartyLayout::new(names, dims)?;
    let amps = doc
        .amplitudes
        .into_iter()
        .map(|[re, im]| Complex64::new(re, im))
        .collect();
    make_state(layout, amps, renormalize)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    m: usize,
    entropies: BTreeMap<String, f64>,
    #[serde(rename = "s_A")]
    s_a: f64,
}

pub fn table_to_json(table: &SubsetEntropyTable) -> Result<String> {
    let m = table.m();
    let doc = TableDoc {
        m,
        entropies: (1..=table.full_mask())
            .map(|mask| (mask_string(mask, m), table.get(mask)))
            .collect(),
        s_a: table.s_a(),
    };
    to_canonical_json(&doc)
}

pub fn table_from_json(text: &str) -> Result<SubsetEntropyTable> {
    let doc: TableDoc = serde_json::from_str(text)?;
    if doc.m == 0 || doc.m > crate::entropy_table::MAX_TABLE_BOBS {
        return Err(Error::TooManyParties {
            m: doc.m,
            limit: crate::entropy_table::MAX_TABLE_BOBS,
        });
    }
    let mut entries = vec![f64::NAN; 1 << doc.m];
    entries[0] = 0.0;
    for (key, v) in &doc.entropies {
        let mask = parse_mask(key)? as usize;
        if mask == 0 || mask >= entries.len() {
            return Err(Error::Parse(format!(
                "mask {key} out of range for m = {}",
                doc.m
            )));
        }
        entries[mask] = *v;
    }
    if let Some(missing) = entries.iter().position(|v| v.is_nan()) {
        return Err(Error::Parse(format!(
            "missing entropy for {}",
            mask_string(missing as u32, doc.m)
        )));
    }
    let table = SubsetEntropyTable::from_entries(doc.m, entries)?;
    if (table.s_a() - doc.s_a).abs() > 1e-9 {
        return Err(Error::TableInvalid(format!(
            "s_A = {} but the full Bob set has entropy {}",
            doc.s_a,
            table.s_a()
        )));
    }
    Ok(table)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HalfspaceDoc {
    subset: String,
    bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionDoc {
    m: usize,
    #[serde(rename = "s_A")]
    s_a: f64,
    #[serde(rename = "vertices_Fprime")]
    vertices_fprime: Vec<Vec<f64>>,
    halfspaces: Vec<HalfspaceDoc>,
    #[serde(rename = "vertices_F")]
    vertices_f: Vec<Vec<f64>>,
    dimension: usize,
    degenerate: bool,
    volume: f64,
}

/// A region together with its derived summary numbers, as written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub region: CombingRegion,
    pub dimension: usize,
    pub degenerate: bool,
    pub volume: f64,
}

impl RegionReport {
    pub fn new(region: CombingRegion) -> Self {
        RegionReport {
            dimension: region.affine_dimension(),
            degenerate: region.degenerate(),
            volume: region.volume(),
            region,
        }
    }
}

pub fn region_to_json(report: &RegionReport) -> Result<String> {
    let r = &report.region;
    let m = r.m();
    let doc = RegionDoc {
        m,
        s_a: r.s_a(),
        vertices_fprime: r.vertices_fprime().iter().map(|v| v.0.clone()).collect(),
        halfspaces: r
            .halfspaces()
            .iter()
            .map(|h| HalfspaceDoc {
                subset: mask_string(h.subset, m),
                bound: h.bound,
            })
            .collect(),
        vertices_f: r.vertices_f().iter().map(|v| v.0.clone()).collect(),
        dimension: report.dimension,
        degenerate: report.degenerate,
        volume: report.volume,
    };
    to_canonical_json(&doc)
}

pub fn region_from_json(text: &str) -> Result<RegionReport> {
    let doc: RegionDoc = serde_json::from_str(text)?;
    let halfspaces = doc
        .halfspaces
        .iter()
        .map(|h| {
            Ok(SubsetBound {
                subset: parse_mask(&h.subset)?,
                bound: h.bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let region = CombingRegion::from_parts(
        doc.s_a,
        doc.vertices_fprime
            .into_iter()
            .map(EntanglementVector)
            .collect(),
        halfspaces,
        doc.vertices_f.into_iter().map(EntanglementVector).collect(),
    )?;
    if region.m() != doc.m {
        return Err(Error::Parse(format!(
            "m = {} but vertices have length {}",
            doc.m,
            region.m()
        )));
    }
    Ok(RegionReport {
        region,
        dimension: doc.dimension,
        degenerate: doc.degenerate,
        volume: doc.volume,
    })
}

pub fn constraints_from_json(text: &str) -> Result<Vec<LinearConstraint>> {
    let list: Vec<LinearConstraint> = serde_json::from_str(text)?;
    if list
        .iter()
        .any(|c| !c.lower_bound.is_finite() || c.coeffs.iter().any(|x| !x.is_finite()))
    {
        return Err(Error::Parse("non-finite constraint coefficient".into()));
    }
    Ok(list)
}

#[derive(Serialize)]
struct RateDoc {
    r: f64,
    alice_choice: usize,
    binding_subset: String,
}

/// `width` is the Bob count used to pad the binding-subset mask.
pub fn rate_to_json(bound: &RateBound, width: usize) -> Result<String> {
    to_canonical_json(&RateDoc {
        r: bound.r,
        alice_choice: bound.alice_choice,
        binding_subset: mask_string(bound.binding_subset, width),
    })
}

/// One row per vertex: `set,e1,..,em` with `set` either `Fprime` or `F`.
pub fn vertices_csv(region: &CombingRegion) -> String {
    let mut out = String::from("set");
    for k in 1..=region.m() {
        let _ = write!(out, ",e{k}");
    }
    out.push('\n');
    let sets = [
        ("Fprime", region.vertices_fprime()),
        ("F", region.vertices_f()),
    ];
    for (label, verts) in sets {
        for v in verts {
            out.push_str(label);
            for &x in v.values() {
                let _ = write!(out, ",{}", format_float(x));
            }
            out.push('\n');
        }
    }
    out
}

/// One row per round.
pub fn ledger_csv(report: &LedgerReport) -> String {
    let m = report.borrowed.len();
    let mut out = String::from("round,consumed,total_consumed");
    for j in 1..=m {
        let _ = write!(out, ",borrowed_{j}");
    }
    for j in 1..=m {
        let _ = write!(out, ",produced_{j}");
    }
    out.push_str(",borrowed_weight\n");
    for row in &report.rows {
        let _ = write!(
            out,
            "{},{},{}",
            row.round,
            format_float(row.consumed),
            format_float(row.total_consumed)
        );
        for &b in &row.borrowed {
            let _ = write!(out, ",{}", format_float(b));
        }
        for &k in &row.produced {
            let _ = write!(out, ",{}", format_float(k));
        }
        let _ = writeln!(out, ",{}", format_float(row.borrowed_weight));
    }
    out
}
