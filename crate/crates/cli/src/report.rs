use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use toricstack::ktheory::RingPresentation;
use toricstack::laurent::{LaurentPoly, QuotientReport, ZRank};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(check: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { check: check.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub flags: Value,
    pub input_digest: String,
    pub payload: Value,
    pub verification: Vec<Check>,
    /// Wall-clock milliseconds; the only field allowed to differ between runs.
    pub timing_ms: u128,
    #[serde(skip)]
    pub text: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verification.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// The report without its timing, for byte comparisons.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().unwrap().remove("timing_ms");
        serde_json::to_string_pretty(&v).unwrap()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\ninput: {}\n", self.command, self.input_digest);
        for line in &self.text {
            out.push_str(line);
            out.push('\n');
        }
        if !self.verification.is_empty() {
            out.push_str("verification:\n");
            for c in &self.verification {
                let mark = if c.passed { "pass" } else { "FAIL" };
                out.push_str(&format!("  [{mark}] {}: {}\n", c.check, c.detail));
            }
        }
        out.push_str(&format!("time: {} ms\n", self.timing_ms));
        out
    }
}

/// Integers that fit in 64 bits become JSON numbers, others strings.
pub fn int_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

pub fn ints_json(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int_json).collect())
}

pub fn poly_json(p: &LaurentPoly) -> Value {
    Value::Array(p.display_terms().into_iter().map(|(e, c)| json!({"coeff": int_json(c), "exp": e})).collect())
}

pub fn rank_json(r: ZRank) -> Value {
    match r {
        ZRank::Finite(n) => json!(n),
        ZRank::Infinite => json!("INFINITE"),
    }
}

/// Reads relations back from the `{"coeff", "exp"}` term lists.
pub fn relations_from_json(v: &Value, arity: usize) -> Result<Vec<LaurentPoly>, String> {
    let rels = v.as_array().ok_or("relations must be an array")?;
    rels.iter()
        .map(|rel| {
            let terms = rel.as_array().ok_or("a relation must be an array of terms")?;
            let mut out = Vec::with_capacity(terms.len());
            for t in terms {
                let coeff = match &t["coeff"] {
                    Value::Number(n) => n.as_i64().map(BigInt::from).ok_or("coefficient is not an integer")?,
                    Value::String(s) => s.parse::<BigInt>().map_err(|e| e.to_string())?,
                    _ => return Err("missing coefficient".to_string()),
                };
                let exp = t["exp"]
                    .as_array()
                    .ok_or("missing exponent vector")?
                    .iter()
                    .map(|x| x.as_i64().ok_or("exponent is not an integer"))
                    .collect::<Result<Vec<i64>, _>>()?;
                out.push((exp, coeff));
            }
            LaurentPoly::from_terms(arity, out).map_err(|e| e.to_string())
        })
        .collect()
}

pub fn quotient_json(q: &QuotientReport) -> Value {
    json!({
        "z_rank": rank_json(q.z_rank),
        "is_free": q.is_free,
        "torsion": ints_json(&q.torsion),
        "torsion_witness": q.torsion_witness.as_ref().map(|(p, n)| json!({"element": poly_json(p), "order": int_json(n)})),
        "standard_monomials": q.standard_monomials,
    })
}

pub fn presentation_json(p: &RingPresentation) -> Value {
    json!({
        "coefficients": p.coefficient_tag.to_string(),
        "variables": p.variables,
        "relations": p.relations.iter().map(poly_json).collect::<Vec<_>>(),
        "relation_strings": p.relation_strings(),
        "annotations": p.annotations,
    })
}

pub fn presentation_text(p: &RingPresentation, q: Option<&QuotientReport>) -> Vec<String> {
    let mut out = vec![format!("ring: {p}")];
    for (v, meaning) in &p.annotations {
        out.push(format!("  {v}: {meaning}"));
    }
    if let Some(q) = q {
        out.push(format!("Z-rank: {}", q.z_rank));
        let torsion = if q.is_free {
            "none".to_string()
        } else if q.torsion.is_empty() {
            "present or undetermined".to_string()
        } else {
            q.torsion.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ")
        };
        out.push(format!("torsion: {torsion}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_round_trip_through_json() {
        let p = &LaurentPoly::monomial(vec![-2, 2], 1) - &LaurentPoly::one(2);
        let big = LaurentPoly::monomial(vec![1, 0], BigInt::from(1u64 << 62) * 8);
        let v = json!([poly_json(&p), poly_json(&big)]);
        assert_eq!(v[0][0], json!({"coeff": 1, "exp": [-2, 2]}));
        assert!(v[1][0]["coeff"].is_string());
        assert_eq!(relations_from_json(&v, 2).unwrap(), vec![p, big]);
        assert!(relations_from_json(&json!([[{"coeff": 1}]]), 2).is_err());
    }
}
