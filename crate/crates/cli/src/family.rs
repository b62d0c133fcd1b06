//! Family files: `{"group": [d1, ...], "lambda": l, "sets": [[[r1, ...], ...], ...]}`.
//!
//! For a cyclic group an element may also be written as a bare integer.

use anyhow::{anyhow, bail, Context, Result};
use sedf_core::groups::GroupSpec;
use sedf_core::sedf::{FamilyError, SetFamily};
use serde_json::{json, Value};

#[derive(Debug, Clone)]
pub struct FamilyFile {
    pub family: SetFamily,
    pub lambda: u64,
}

fn as_u64(v: &Value, at: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| anyhow!("{at}: expected a nonnegative integer, found {v}"))
}

pub fn parse_family(text: &str) -> Result<FamilyFile> {
    let root: Value = serde_json::from_str(text).context("family file is not valid JSON")?;
    let obj = root
        .as_object()
        .ok_or_else(|| anyhow!("family file: expected an object at the top level"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "group" | "lambda" | "sets") {
            bail!("family file: unknown key `{key}`");
        }
    }
    let group_v = obj.get("group").ok_or_else(|| anyhow!("family file: missing `group`"))?;
    let factors = group_v
        .as_array()
        .ok_or_else(|| anyhow!("group: expected an array of invariant factors"))?
        .iter()
        .enumerate()
        .map(|(i, d)| as_u64(d, &format!("group[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let group = if factors == [1] {
        GroupSpec::cyclic(1)
    } else {
        GroupSpec::new(factors).map_err(|e| anyhow!("group: {e}"))?
    };
    let lambda = as_u64(
        obj.get("lambda").ok_or_else(|| anyhow!("family file: missing `lambda`"))?,
        "lambda",
    )?;
    let sets_v = obj
        .get("sets")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("sets: expected an array of sets"))?;
    let mut sets = Vec::with_capacity(sets_v.len());
    for (j, s) in sets_v.iter().enumerate() {
        let elems = s
            .as_array()
            .ok_or_else(|| anyhow!("sets[{j}]: expected an array of elements"))?;
        let mut out = Vec::with_capacity(elems.len());
        for (i, e) in elems.iter().enumerate() {
            let at = format!("sets[{j}][{i}]");
            let residues = match e {
                Value::Array(rs) => rs
                    .iter()
                    .enumerate()
                    .map(|(c, r)| as_u64(r, &format!("{at}[{c}]")))
                    .collect::<Result<Vec<_>>>()?,
                Value::Number(_) if group.rank() <= 1 => vec![as_u64(e, &at)?],
                _ => bail!("{at}: expected an array of residues"),
            };
            out.push(residues);
        }
        sets.push(out);
    }
    let family = SetFamily::new(group, sets).map_err(locate)?;
    Ok(FamilyFile { family, lambda })
}

fn locate(e: FamilyError) -> anyhow::Error {
    match e {
        FamilyError::Element { set, index, error } => anyhow!("sets[{set}][{index}]: {error}"),
        FamilyError::Overlap { set, index, other } => {
            anyhow!("sets[{set}][{index}]: element also lies in sets[{other}]")
        }
        FamilyError::Repeated { set, index } => anyhow!("sets[{set}][{index}]: repeated element"),
        FamilyError::SizeMismatch { set, expected, got } => {
            anyhow!("sets[{set}]: has {got} elements, expected {expected}")
        }
        other => anyhow!("sets: {other}"),
    }
}

pub fn family_to_json(family: &SetFamily, lambda: u64) -> Value {
    json!({
        "group": family.group().factors(),
        "lambda": lambda,
        "sets": family.to_residues(),
    })
}
