//! Problem-file schemas (JSON, versioned) and their conversion into engine
//! inputs. Unknown fields are rejected so that typos in math-heavy configs
//! fail loudly; every file carries a required `"version": 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::context::{Context, QAssignment};
use crate::element::Element;
use crate::error::{EngineError, Result};
use crate::hj::{HamTable, HamValue};
use crate::parse::parse_element;
use crate::qcoeff::{Rat, VarPair};
use crate::weight::MultiIndex;

/// Rational value in JSON: either an integer or a string `"n"` / `"n/d"`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RatSpec {
    Int(i64),
    Text(String),
}

impl RatSpec {
    pub fn to_rat(&self) -> Result<Rat> {
        match self {
            RatSpec::Int(v) => Ok(crate::qcoeff::rat_int(*v)),
            RatSpec::Text(t) => t
                .trim()
                .parse::<Rat>()
                .map_err(|_| EngineError::Validation(format!("malformed rational '{t}'"))),
        }
    }
}

/// Braiding assignment in JSON: `"symbolic"`, `"ones"`, `"side"` (trivial
/// within the momentum block and within the coordinate block), or explicit
/// pairs `{"pairs": {"[i,j]": value}}`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum QSpec {
    Keyword(String),
    Pairs { pairs: BTreeMap<String, RatSpec> },
}

impl QSpec {
    pub fn to_context(&self, s: usize) -> Result<Context> {
        match self {
            QSpec::Keyword(k) => match k.as_str() {
                "symbolic" => Context::symbolic(s),
                "ones" => Context::ones(s),
                "side" => Context::side_conditions(s),
                other => Err(EngineError::Validation(format!(
                    "unknown q assignment '{other}' (expected symbolic|ones|side)"
                ))),
            },
            QSpec::Pairs { pairs } => {
                let mut map = BTreeMap::new();
                for (key, val) in pairs {
                    let (i, j) = parse_pair_key(key)?;
                    let (pair, sign) = VarPair::canon(i, j).ok_or_else(|| {
                        EngineError::Validation(format!("bad braiding pair '{key}'"))
                    })?;
                    let mut v = val.to_rat()?;
                    if sign < 0 {
                        if num_traits::Zero::is_zero(&v) {
                            return Err(EngineError::ZeroAssignment { i, j });
                        }
                        v = v.recip();
                    }
                    map.insert(pair, v);
                }
                Context::new(s, QAssignment::Pairs(map))
            }
        }
    }
}

fn parse_pair_key(key: &str) -> Result<(u32, u32)> {
    let inner = key
        .trim()
        .strip_prefix('[')
        .and_then(|k| k.strip_suffix(']'))
        .ok_or_else(|| EngineError::Validation(format!("pair key '{key}' must look like [i,j]")))?;
    let mut it = inner.split(',');
    let i = it
        .next()
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| EngineError::Validation(format!("bad pair key '{key}'")))?;
    let j = it
        .next()
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| EngineError::Validation(format!("bad pair key '{key}'")))?;
    if it.next().is_some() {
        return Err(EngineError::Validation(format!("bad pair key '{key}'")));
    }
    Ok((i, j))
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HamEntrySpec {
    #[serde(rename = "K")]
    pub k: MultiIndex,
    #[serde(rename = "L")]
    pub l: MultiIndex,
    pub value: HamValueSpec,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum HamValueSpec {
    Keyword(String),
    Value(RatSpec),
}

impl HamValueSpec {
    fn to_ham_value(&self) -> Result<HamValue> {
        match self {
            HamValueSpec::Keyword(k) if k == "symbolic" => {
                Ok(HamValue::Symbolic(crate::qcoeff::rat_int(1)))
            }
            HamValueSpec::Keyword(other) => Err(EngineError::Validation(format!(
                "unknown hamiltonian value '{other}'"
            ))),
            HamValueSpec::Value(v) => Ok(HamValue::Numeric(v.to_rat()?)),
        }
    }
}

pub fn ham_table_from_specs(entries: &[HamEntrySpec], ctx: &Context) -> Result<HamTable> {
    let mut table = HamTable::new();
    for e in entries {
        ctx.check_multi_index(&e.k)?;
        ctx.check_multi_index(&e.l)?;
        table.insert(e.k.clone(), e.l.clone(), e.value.to_ham_value()?);
    }
    Ok(table)
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SeedEntrySpec {
    #[serde(rename = "N")]
    pub n: MultiIndex,
    pub value: String,
}

/// Hamilton-Jacobi problem file.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HjProblem {
    pub version: u32,
    pub s: usize,
    pub q: QSpec,
    pub hamiltonian: Vec<HamEntrySpec>,
    #[serde(default)]
    pub seed: Vec<SeedEntrySpec>,
    #[serde(rename = "Mmax")]
    pub mmax: u32,
    #[serde(rename = "D")]
    pub d: u32,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSeedPSpec {
    pub i: u32,
    #[serde(rename = "M")]
    pub m: MultiIndex,
    pub value: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSeedXSpec {
    pub a: u32,
    #[serde(rename = "N")]
    pub n: MultiIndex,
    pub value: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSeedsSpec {
    #[serde(rename = "P", default)]
    pub p: Vec<FlowSeedPSpec>,
    #[serde(rename = "X", default)]
    pub x: Vec<FlowSeedXSpec>,
}

/// Hamiltonian flow problem file.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HamProblem {
    pub version: u32,
    pub s: usize,
    pub q: QSpec,
    pub hamiltonian: Vec<HamEntrySpec>,
    pub seeds: FlowSeedsSpec,
    #[serde(rename = "Mmax")]
    pub mmax: u32,
    #[serde(rename = "D")]
    pub d: u32,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BEntrySpec {
    #[serde(rename = "N")]
    pub n: MultiIndex,
    pub value: RatSpec,
}

/// Legendre problem file.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LegendreProblem {
    pub version: u32,
    pub s: usize,
    pub q: QSpec,
    pub r_max: usize,
    /// `"symbolic"` or `"classical"`.
    pub mode: String,
    #[serde(default)]
    pub b: Vec<BEntrySpec>,
}

pub fn check_version(version: u32) -> Result<()> {
    if version != 1 {
        return Err(EngineError::Validation(format!(
            "unsupported problem version {version} (expected 1)"
        )));
    }
    Ok(())
}

pub fn parse_seed_table(
    entries: &[SeedEntrySpec],
    ctx: &Context,
) -> Result<BTreeMap<MultiIndex, Element>> {
    let mut out = BTreeMap::new();
    for e in entries {
        ctx.check_multi_index(&e.n)?;
        let elem = parse_element(&e.value, ctx)?;
        if !elem.is_zero() {
            out.insert(e.n.clone(), elem);
        }
    }
    Ok(out)
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EngineError::Validation(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| EngineError::Validation(format!("malformed problem file {path}: {e}")))
}

// --- output reports ---

#[derive(Clone, Debug, Serialize)]
pub struct CoeffOut {
    pub m: u32,
    #[serde(rename = "N")]
    pub n: MultiIndex,
    pub element: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HjReport {
    pub coefficients: Vec<CoeffOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowCoeffOut {
    pub index: u32,
    pub order: u32,
    #[serde(rename = "M")]
    pub m: MultiIndex,
    pub element: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub p: Vec<FlowCoeffOut>,
    pub x: Vec<FlowCoeffOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LegendreImageOut {
    pub generator: String,
    pub element: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalCheckOut {
    pub index: MultiIndex,
    pub pipeline: String,
    pub oracle: String,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LegendreReport {
    pub images: Vec<LegendreImageOut>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub classical_check: Vec<ClassicalCheckOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical_ok: Option<bool>,
}

/// Render a serializable report deterministically.
pub fn emit_json<T: Serialize>(value: &T) -> String {
    // struct field order is fixed and every map in the reports is a sorted
    // Vec, so the byte stream is reproducible
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}
