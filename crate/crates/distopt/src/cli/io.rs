//! Spec files, 17-digit JSON and CSV output, atomic writes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use super::CliError;
use crate::digraph::DiGraph;
use crate::problem::{ConstraintRow, Objective, Problem};
use crate::sim::Trajectory;
use crate::synthesis::FrequencyAssignment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub a: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSpec {
    pub agent: usize,
    pub row: Vec<f64>,
    pub rhs: f64,
}

/// Problem plus graph as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    pub objectives: Vec<ObjectiveSpec>,
    #[serde(default)]
    pub eq: Vec<RowSpec>,
    #[serde(default)]
    pub ineq: Vec<RowSpec>,
    #[serde(default, rename = "K")]
    pub k: Option<f64>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("spec: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read(path)?)
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(self.objectives.len())
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        if self.n() != self.objectives.len() {
            return Err(CliError::Parse(format!("n = {} but {} objectives", self.n(), self.objectives.len())));
        }
        let objectives = self.objectives.iter().map(|o| Objective::quadratic(o.a, o.c)).collect();
        let rows = |list: &[RowSpec], kind: &str| -> Result<BTreeMap<usize, ConstraintRow>, CliError> {
            let mut out = BTreeMap::new();
            for r in list {
                let row = ConstraintRow { row: r.row.clone(), rhs: r.rhs };
                if out.insert(r.agent, row).is_some() {
                    return Err(CliError::Parse(format!("agent {} has two {kind} rows", r.agent)));
                }
            }
            Ok(out)
        };
        Ok(Problem::new(objectives, rows(&self.eq, "equality")?, rows(&self.ineq, "inequality")?)?)
    }

    pub fn graph(&self) -> Result<DiGraph, CliError> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Ok(DiGraph::new(self.n(), &edges)?)
    }
}

/// Accepts a bare assignment or a whole `synthesize` report.
pub fn load_frequencies(path: &Path) -> Result<FrequencyAssignment, CliError> {
    let mut v: Value = serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse(format!("frequencies: {e}")))?;
    if let Some(inner) = v.get_mut("frequencies") {
        v = inner.take();
    }
    serde_json::from_value(v).map_err(|e| CliError::Parse(format!("frequencies: {e}")))
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        let s = format!("{x:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    } else {
        x.to_string()
    }
}

fn rewrite_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("finite float");
            *n = serde_json::from_str::<Number>(&fmt17(x)).expect("valid number");
        }
        Value::Array(items) => items.iter_mut().for_each(rewrite_floats),
        Value::Object(map) => map.values_mut().for_each(rewrite_floats),
        _ => {}
    }
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable report");
    rewrite_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

/// Header `t,x1..xn,nu1..nun,mu1..mun`, one row per `stride`-th sample plus the last.
pub fn trajectory_csv(tr: &Trajectory, n: usize, stride: usize) -> String {
    let mut out = String::from("t");
    for prefix in ["x", "nu", "mu"] {
        for i in 1..=n {
            out.push_str(&format!(",{prefix}{i}"));
        }
    }
    out.push('\n');
    let last = tr.times.len() - 1;
    for (k, (t, z)) in tr.times.iter().zip(&tr.states).enumerate() {
        if k % stride.max(1) != 0 && k != last {
            continue;
        }
        out.push_str(&fmt17(*t));
        for x in z {
            out.push(',');
            out.push_str(&fmt17(*x));
        }
        out.push('\n');
    }
    out
}

/// Writes through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(-8.2), "-8.1999999999999993e+0");
        let s = to_json(&serde_json::json!({"a": 0.1, "b": 3, "c": [1.5]}));
        assert!(s.contains("\"a\": 1.0000000000000001e-1"));
        assert!(s.contains("\"b\": 3"));
        assert!(s.contains("1.5000000000000000e+0"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn spec_rejects_duplicate_rows() {
        let s = SpecFile::parse(
            r#"{"objectives":[{"a":1,"c":0},{"a":1,"c":0}],
                "eq":[{"agent":1,"row":[1,0],"rhs":0},{"agent":1,"row":[1,1],"rhs":0}]}"#,
        )
        .unwrap();
        assert!(s.problem().is_err());
    }
}
