//! The JSON fan file.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde_json::{Map, Value};
use thiserror::Error;

use toricstack::fan::{Fan, GroupData, StackyFan};
use toricstack::lattice::{FgAbelianGroup, IntMatrix, SublatticeSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Schema { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSection {
    Trivial,
    FullTorus,
    Subgroup { generators: Vec<Vec<BigInt>> },
    Beta { beta: Vec<Vec<BigInt>>, target: FgAbelianGroup },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleSection {
    pub base_vars: Vec<String>,
    pub units: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanFile {
    pub lattice_rank: usize,
    pub rays: Vec<Vec<BigInt>>,
    /// 0-based ray indices.
    pub max_cones: Vec<Vec<usize>>,
    pub group: GroupSection,
    pub bundle: Option<BundleSection>,
    pub weights: Option<Vec<u32>>,
}

impl FanFile {
    pub fn fan(&self) -> Fan {
        Fan::new(self.lattice_rank, self.rays.clone(), self.max_cones.clone()).expect("shape checked at parse time")
    }

    pub fn stacky_fan(&self) -> toricstack::Result<StackyFan> {
        let n = self.lattice_rank;
        let group = match &self.group {
            GroupSection::Trivial => GroupData::Trivial,
            GroupSection::FullTorus => GroupData::FullTorus,
            GroupSection::Subgroup { generators } => {
                GroupData::Subgroup(SublatticeSpec::new(n, IntMatrix::from_rows(n, generators))?)
            }
            GroupSection::Beta { beta, target } => {
                GroupData::Beta { beta: IntMatrix::from_rows(n, beta), target: target.clone() }
            }
        };
        StackyFan::new(self.fan(), group)
    }
}

/// Parses and validates a fan file. Only syntax and shape are checked;
/// geometric conditions are left to the commands.
pub fn parse(text: &str) -> Result<FanFile, InputError> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| InputError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    let obj = doc.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    for key in obj.keys() {
        if !["lattice_rank", "rays", "max_cones", "group", "bundle", "weights"].contains(&key.as_str()) {
            return Err(schema(key.clone(), "unknown field"));
        }
    }
    let lattice_rank = usize::try_from(&integer(required(obj, "lattice_rank")?, "lattice_rank")?)
        .map_err(|_| schema("lattice_rank", "must be a nonnegative integer"))?;

    let rays = int_rows(required(obj, "rays")?, "rays", Some(lattice_rank))?;
    for (i, r) in rays.iter().enumerate() {
        let g = r.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Err(schema(format!("rays[{i}]"), "ray is zero"));
        }
        if g != BigInt::from(1) {
            return Err(schema(format!("rays[{i}]"), "ray not primitive"));
        }
    }

    let mut max_cones = Vec::new();
    for (c, cone) in array(required(obj, "max_cones")?, "max_cones")?.iter().enumerate() {
        let field = format!("max_cones[{c}]");
        let mut idx = Vec::new();
        for (k, x) in array(cone, &field)?.iter().enumerate() {
            let f = format!("{field}[{k}]");
            let i = integer(x, &f)?;
            let i = usize::try_from(&i).ok().filter(|&i| (1..=rays.len()).contains(&i));
            let i = i.ok_or_else(|| schema(&f, format!("ray index must lie in 1..={}", rays.len())))?;
            if idx.contains(&(i - 1)) {
                return Err(schema(&f, "repeated ray index"));
            }
            idx.push(i - 1);
        }
        max_cones.push(idx);
    }

    let group = parse_group(required(obj, "group")?, lattice_rank)?;
    let bundle = obj.get("bundle").map(parse_bundle).transpose()?;
    let weights = obj
        .get("weights")
        .map(|w| {
            array(w, "weights")?
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    let f = format!("weights[{i}]");
                    u32::try_from(&integer(q, &f)?).ok().filter(|&q| q > 0).ok_or_else(|| schema(f, "weight must be a positive integer"))
                })
                .collect::<Result<Vec<u32>, _>>()
        })
        .transpose()?;
    Ok(FanFile { lattice_rank, rays, max_cones, group, bundle, weights })
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, InputError> {
    obj.get(key).ok_or_else(|| schema(key, "missing required field"))
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>, InputError> {
    v.as_array().ok_or_else(|| schema(field, "expected an array"))
}

fn string(v: &Value, field: &str) -> Result<String, InputError> {
    v.as_str().map(str::to_string).ok_or_else(|| schema(field, "expected a string"))
}

/// Integers only; a JSON number with a fraction or exponent is refused.
fn integer(v: &Value, field: &str) -> Result<BigInt, InputError> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(n.as_i64().unwrap().into()),
        Value::Number(n) if n.is_u64() => Ok(n.as_u64().unwrap().into()),
        Value::Number(_) => Err(schema(field, "expected an integer, found a floating-point number")),
        _ => Err(schema(field, "expected an integer")),
    }
}

fn int_rows(v: &Value, field: &str, width: Option<usize>) -> Result<Vec<Vec<BigInt>>, InputError> {
    array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let f = format!("{field}[{i}]");
            let row = array(row, &f)?;
            if let Some(w) = width {
                if row.len() != w {
                    return Err(schema(&f, format!("expected {w} entries, found {}", row.len())));
                }
            }
            row.iter().enumerate().map(|(k, x)| integer(x, &format!("{f}[{k}]"))).collect()
        })
        .collect()
}

fn parse_group(v: &Value, n: usize) -> Result<GroupSection, InputError> {
    let obj = v.as_object().ok_or_else(|| schema("group", "expected an object"))?;
    let kind = string(obj.get("kind").ok_or_else(|| schema("group.kind", "missing required field"))?, "group.kind")?;
    match kind.as_str() {
        "trivial" => Ok(GroupSection::Trivial),
        "full_torus" => Ok(GroupSection::FullTorus),
        "subgroup" => {
            let g = obj.get("generators").ok_or_else(|| schema("group.generators", "missing required field"))?;
            Ok(GroupSection::Subgroup { generators: int_rows(g, "group.generators", Some(n))? })
        }
        "beta" => {
            let b = obj.get("beta").ok_or_else(|| schema("group.beta", "missing required field"))?;
            let beta = int_rows(b, "group.beta", Some(n))?;
            let t = obj.get("target").ok_or_else(|| schema("group.target", "missing required field"))?;
            let t = t.as_object().ok_or_else(|| schema("group.target", "expected an object"))?;
            let free = t.get("free_rank").ok_or_else(|| schema("group.target.free_rank", "missing required field"))?;
            let free_rank = usize::try_from(&integer(free, "group.target.free_rank")?)
                .map_err(|_| schema("group.target.free_rank", "must be nonnegative"))?;
            let tors = t.get("torsion").ok_or_else(|| schema("group.target.torsion", "missing required field"))?;
            let torsion = array(tors, "group.target.torsion")?
                .iter()
                .enumerate()
                .map(|(i, d)| integer(d, &format!("group.target.torsion[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let target = FgAbelianGroup { free_rank, torsion };
            if !target.is_valid() {
                return Err(schema("group.target.torsion", "invariants must be ≥ 2, each dividing the next"));
            }
            if beta.len() != target.generator_count() {
                return Err(schema(
                    "group.beta",
                    format!("expected one row per target coordinate ({}), found {}", target.generator_count(), beta.len()),
                ));
            }
            Ok(GroupSection::Beta { beta, target })
        }
        other => Err(schema("group.kind", format!("unknown kind `{other}`"))),
    }
}

fn parse_bundle(v: &Value) -> Result<BundleSection, InputError> {
    let obj = v.as_object().ok_or_else(|| schema("bundle", "expected an object"))?;
    let list = |key: &str| -> Result<Vec<String>, InputError> {
        let field = format!("bundle.{key}");
        let v = obj.get(key).ok_or_else(|| schema(&field, "missing required field"))?;
        array(v, &field)?.iter().enumerate().map(|(i, s)| string(s, &format!("{field}[{i}]"))).collect()
    };
    Ok(BundleSection { base_vars: list("base_vars")?, units: list("units")? })
}
