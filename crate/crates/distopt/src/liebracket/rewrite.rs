use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::Serialize;

use super::bracket::Bracket;
use super::field::Gen;
use super::phall::{PHallBasis, Projector};
use super::LieError;
use crate::digraph::{DiGraph, GraphError, Path};
use crate::problem::{AugmentedProblem, RestEntry};
use crate::spdyn::{admissible_split, owner, AdmissibleSplit};

/// Every `h_{i,j}` with `i` owned by `k1`, `j` owned by `k2` and `l_{k2,k1} != 0`.
/// Pairs `k1 = k2` always qualify.
pub fn admissible_fields(g: &DiGraph, n: usize) -> BTreeSet<Gen> {
    let mut out = BTreeSet::new();
    for k1 in 1..=n {
        for k2 in 1..=n {
            if k1 != k2 && g.l(k2, k1) == 0 {
                continue;
            }
            for a in 0..3 {
                for b in 0..3 {
                    out.insert(Gen::new(k1 + a * n, k2 + b * n));
                }
            }
        }
    }
    out
}

/// Split position along a path of length `len`.
pub fn theta(len: usize) -> usize {
    match len {
        2 | 4 => len / 2 + 1,
        _ => len / 2 + 2,
    }
}

/// Bracket of admissible generators that evaluates to `h_{k1,k2}`.
///
/// Requires `k1` owned by the tail of `p` and `k2` by its head.
pub fn rec_bracket(p: &Path, k1: usize, k2: usize, n: usize) -> Result<Bracket, LieError> {
    if k1 == 0 || k2 == 0 || k1 > 3 * n || k2 > 3 * n {
        return Err(LieError::Precondition(format!("index outside 1..={}", 3 * n)));
    }
    if k1 == k2 {
        return Err(LieError::Precondition(format!("k1 = k2 = {k1}")));
    }
    if owner(n, k1) != p.tail() || owner(n, k2) != p.head() {
        return Err(LieError::Precondition(format!(
            "h({k1},{k2}) does not match path {p}"
        )));
    }
    if p.len() == 1 {
        return Ok(Bracket::leaf(Gen::new(k1, k2)));
    }
    let th = theta(p.len());
    let (q, qc) = p.split_at(th).map_err(LieError::Graph)?;
    let pivot = p.nodes()[th - 1];
    let s = if k1 <= 2 * n { n + pivot } else { 2 * n + pivot };
    let left = rec_bracket(&qc, k1, s, n)?;
    let right = rec_bracket(&q, s, k2, n)?;
    Ok(Bracket::node(left, right))
}

/// `rec_bracket` expressed in the Hall basis; zero coefficients are dropped.
pub fn rec_bracket_phall(
    p: &Path,
    k1: usize,
    k2: usize,
    n: usize,
    basis: &PHallBasis,
) -> Result<Vec<(i64, Bracket)>, LieError> {
    let b = rec_bracket(p, k1, k2, n)?;
    basis.project(&b)
}

/// One bracket term `v * B(z)` of the rewritten dynamics, with `B(z) = sign * h_{k1,k2}(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub bracket: Bracket,
    pub v: f64,
    pub target: (usize, usize),
    pub sign: i64,
}

/// How a single non-admissible coupling was rewritten.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestRewrite {
    pub kind: &'static str,
    pub i: usize,
    pub j: usize,
    pub coeff: f64,
    /// Coefficient of `h_{k1,k2}` in the rest part.
    pub tau: f64,
    pub k1: usize,
    pub k2: usize,
    pub path: Vec<usize>,
    pub raw: String,
    pub projection: Vec<(i64, String)>,
}

/// Saddle-point dynamics as admissible drift plus a weighted sum of Hall brackets.
#[derive(Debug, Clone)]
pub struct ExtendedSystem {
    pub n: usize,
    pub split: AdmissibleSplit,
    pub basis: PHallBasis,
    pub terms: Vec<Term>,
    pub rewrites: Vec<RestRewrite>,
}

impl ExtendedSystem {
    pub fn dim(&self) -> usize {
        3 * self.n
    }

    /// `sum_B v_B eval(B)` as a dense matrix.
    pub fn bracket_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for t in &self.terms {
            for ((r, c), e) in t.bracket.eval().entries() {
                m[(r - 1, c - 1)] += t.v * e as f64;
            }
        }
        m
    }

    /// Largest entrywise gap between the bracket sum and the rest matrix.
    pub fn exactness_error(&self) -> f64 {
        (self.bracket_matrix() - self.split.rest_matrix()).amax()
    }

    /// Maximum term degree, 0 when nothing needs rewriting.
    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.bracket.degree()).max().unwrap_or(0)
    }
}

pub fn rewrite_dynamics(ap: &AugmentedProblem, g: &DiGraph) -> Result<ExtendedSystem, LieError> {
    let n = ap.n();
    if g.n() != n {
        return Err(LieError::Precondition(format!("graph has {} nodes, problem {}", g.n(), n)));
    }
    let split = admissible_split(ap, g);
    if let Some(e) = split.unsupported.first() {
        return Err(LieError::Unsupported(e.clone()));
    }
    let basis = PHallBasis::over(admissible_fields(g, n));
    let mut proj = Projector::default();
    let mut acc: BTreeMap<Bracket, f64> = BTreeMap::new();
    let mut rewrites = Vec::new();
    for (entry, tau, k1, k2) in split.rest_fields() {
        let RestEntry { kind, i, j, coeff } = entry;
        let p = g.shortest_path(i, j).map_err(|e| match e {
            GraphError::NotConnected { .. } => LieError::NotConnected { i, j },
            other => LieError::Graph(other),
        })?;
        let raw = rec_bracket(&p, k1, k2, n)?;
        let combo = proj.project(&raw);
        let mut projection = Vec::new();
        for (b, theta) in combo {
            projection.push((theta, b.to_string()));
            if b.eval().is_zero() {
                continue;
            }
            *acc.entry(b).or_insert(0.0) += tau * theta as f64;
        }
        rewrites.push(RestRewrite {
            kind: kind.label(),
            i,
            j,
            coeff,
            tau,
            k1,
            k2,
            path: p.nodes().to_vec(),
            raw: raw.to_string(),
            projection,
        });
    }
    let mut terms = Vec::new();
    for (bracket, v) in acc {
        if v == 0.0 {
            continue;
        }
        let (r, c, e) = bracket.eval().single_entry().ok_or_else(|| {
            LieError::Invariant(format!("{bracket} does not evaluate to a single generator"))
        })?;
        if e.abs() != 1 {
            return Err(LieError::Invariant(format!("{bracket} evaluates to {e} h({c},{r})")));
        }
        terms.push(Term { bracket, v, target: (c, r), sign: e });
    }
    Ok(ExtendedSystem { n, split, basis, terms, rewrites })
}
