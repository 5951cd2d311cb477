//! On-disk formats: moment files (JSON), direction lists (JSON) and grid
//! functions (CSV). Every format carries `schema = 1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::conditioning::{MultiMoments, PowerMoments, Support, TrigMoments};
use crate::error::{Error, Result};
use crate::series::MultiIndex;
use crate::transform::{Domain, GridFunction};

pub const SCHEMA: u32 = 1;

/// A parsed moment file.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentFile {
    Power(PowerMoments),
    Trig(TrigMoments),
    Multi(MultiMoments),
}

impl MomentFile {
    pub fn kind(&self) -> &'static str {
        match self {
            MomentFile::Power(_) => "power",
            MomentFile::Trig(_) => "trig",
            MomentFile::Multi(_) => "multi",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMomentFile {
    #[serde(default)]
    schema: Option<u32>,
    kind: String,
    #[serde(default)]
    support: Option<Support>,
    values: Value,
    #[serde(default)]
    dimension: Option<usize>,
    #[serde(default)]
    order: Option<u32>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexEntry {
    Pair([f64; 2]),
    Real(f64),
}

#[derive(Serialize, Deserialize)]
struct MultiEntry {
    index: Vec<u32>,
    value: f64,
}

fn parse_err(msg: impl std::fmt::Display) -> Error {
    Error::Parse(msg.to_string())
}

/// Parses a moment file; empty value lists are rejected.
pub fn parse_moment_file(text: &str) -> Result<MomentFile> {
    let raw: RawMomentFile = serde_json::from_str(text)?;
    if let Some(s) = raw.schema {
        if s != SCHEMA {
            return Err(parse_err(format!("unsupported schema {s}")));
        }
    }
    let file = match raw.kind.as_str() {
        "power" => {
            let values: Vec<f64> = serde_json::from_value(raw.values)?;
            MomentFile::Power(PowerMoments::new(values, raw.support.unwrap_or(Support::HalfLine)))
        }
        "trig" => {
            let entries: Vec<ComplexEntry> = serde_json::from_value(raw.values)?;
            MomentFile::Trig(TrigMoments::new(
                entries
                    .into_iter()
                    .map(|e| match e {
                        ComplexEntry::Pair([re, im]) => Complex64::new(re, im),
                        ComplexEntry::Real(re) => Complex64::new(re, 0.0),
                    })
                    .collect(),
            ))
        }
        "multi" => {
            let entries: Vec<MultiEntry> = serde_json::from_value(raw.values)?;
            if entries.is_empty() {
                return Err(Error::EmptyMoments);
            }
            let dimension = raw.dimension.unwrap_or_else(|| entries[0].index.len());
            let order = raw
                .order
                .unwrap_or_else(|| entries.iter().map(|e| e.index.iter().sum()).max().unwrap_or(0));
            let mut values = BTreeMap::new();
            for e in entries {
                values.insert(MultiIndex::new(e.index), e.value);
            }
            MomentFile::Multi(MultiMoments::new(dimension, order, values)?)
        }
        other => return Err(parse_err(format!("unknown moment kind '{other}'"))),
    };
    let empty = match &file {
        MomentFile::Power(p) => p.values.is_empty(),
        MomentFile::Trig(t) => t.values.is_empty(),
        MomentFile::Multi(m) => m.values.is_empty(),
    };
    if empty {
        return Err(Error::EmptyMoments);
    }
    Ok(file)
}

/// Serializes a moment file in the format read by [`parse_moment_file`].
pub fn moment_file_to_json(file: &MomentFile) -> String {
    let v = match file {
        MomentFile::Power(p) => serde_json::json!({
            "schema": SCHEMA,
            "kind": "power",
            "support": p.support,
            "values": p.values,
        }),
        MomentFile::Trig(t) => serde_json::json!({
            "schema": SCHEMA,
            "kind": "trig",
            "values": t.values.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        }),
        MomentFile::Multi(m) => serde_json::json!({
            "schema": SCHEMA,
            "kind": "multi",
            "dimension": m.dimension,
            "order": m.order,
            "values": m.values.iter().map(|(k, v)| MultiEntry { index: k.entries().to_vec(), value: *v }).collect::<Vec<_>>(),
        }),
    };
    serde_json::to_string_pretty(&v).expect("moment file serializes")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DirectionsFile {
    Wrapped {
        schema: Option<u32>,
        directions: Vec<Vec<f64>>,
    },
    Bare(Vec<Vec<f64>>),
}

/// Reads `{"schema": 1, "directions": [[…], …]}` or a bare array of vectors.
pub fn parse_directions(text: &str) -> Result<Vec<Vec<f64>>> {
    match serde_json::from_str(text)? {
        DirectionsFile::Wrapped { schema, directions } => {
            if schema.is_some_and(|s| s != SCHEMA) {
                return Err(parse_err("unsupported directions schema"));
            }
            Ok(directions)
        }
        DirectionsFile::Bare(d) => Ok(d),
    }
}

/// CSV with a `#` header line carrying the domain, then `x,value` rows.
/// Floats use the shortest representation that parses back to the same bits.
pub fn grid_to_csv(f: &GridFunction) -> String {
    let mut out = String::new();
    match f.domain {
        Domain::Interval { a, b } => {
            writeln!(out, "# schema={SCHEMA} domain=interval a={a} b={b} G={}", f.len()).unwrap()
        }
        Domain::Circle => writeln!(out, "# schema={SCHEMA} domain=circle G={}", f.len()).unwrap(),
    }
    out.push_str("x,value\n");
    for (x, v) in f.points().iter().zip(&f.values) {
        writeln!(out, "{x},{v}").unwrap();
    }
    out
}

/// Inverse of [`grid_to_csv`].
pub fn grid_from_csv(text: &str) -> Result<GridFunction> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .ok_or_else(|| parse_err("missing CSV header"))?;
    let fields: BTreeMap<&str, &str> = header.split_whitespace().filter_map(|kv| kv.split_once('=')).collect();
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| parse_err(format!("header lacks {k}")))
    };
    let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(parse_err) };
    if get("schema")? != "1" {
        return Err(parse_err("unsupported CSV schema"));
    }
    let domain = match get("domain")? {
        "interval" => Domain::Interval {
            a: num("a")?,
            b: num("b")?,
        },
        "circle" => Domain::Circle,
        other => return Err(parse_err(format!("unknown domain '{other}'"))),
    };
    let g: usize = get("G")?.parse().map_err(parse_err)?;
    let mut values = Vec::with_capacity(g);
    for line in lines.filter(|l| !l.is_empty() && *l != "x,value") {
        let (_, v) = line
            .split_once(',')
            .ok_or_else(|| parse_err(format!("bad row '{line}'")))?;
        values.push(v.trim().parse::<f64>().map_err(parse_err)?);
    }
    if values.len() != g {
        return Err(Error::LengthMismatch {
            what: "CSV rows",
            expected: g,
            got: values.len(),
        });
    }
    GridFunction::new(domain, values)
}
