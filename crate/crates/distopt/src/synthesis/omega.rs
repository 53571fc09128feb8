//! Exact frequencies and the cancellation verifiers.
//!
//! A frequency is `sum_r c_r * sqrt(r) / DENOM` with integer `c_r` and
//! square-free radicands `r` (`r = 1` for the rational part). Square roots of
//! distinct square-free integers are linearly independent over the rationals,
//! so integer relations between frequencies reduce to integer relations
//! between coefficient vectors, which are checked exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::SynthesisError;

pub const DENOM: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "serde_json::Value", into = "OmegaRepr")]
pub struct Omega {
    terms: BTreeMap<u32, i64>,
}

#[derive(Serialize)]
struct OmegaRepr {
    value: f64,
    sqrt: BTreeMap<u32, i64>,
}

impl From<Omega> for OmegaRepr {
    fn from(o: Omega) -> Self {
        OmegaRepr { value: o.value(), sqrt: o.terms }
    }
}

/// Accepts a plain number (rounded to a multiple of `1/DENOM`) or
/// `{"sqrt": {"radicand": coefficient, ...}}`; any `value` field is ignored.
impl TryFrom<serde_json::Value> for Omega {
    type Error = String;

    fn try_from(v: serde_json::Value) -> Result<Self, String> {
        use serde_json::Value;
        match v {
            Value::Number(x) => {
                let x = x.as_f64().ok_or("frequency is not a number")?;
                if !x.is_finite() {
                    return Err(format!("frequency {x} is not finite"));
                }
                Ok(Omega::rational((x * DENOM as f64).round() as i64))
            }
            Value::Object(m) => {
                let sqrt = m.get("sqrt").and_then(Value::as_object).ok_or("frequency object needs a sqrt map")?;
                let mut o = Omega::zero();
                for (k, c) in sqrt {
                    let r: u32 = k.parse().map_err(|_| format!("bad radicand {k}"))?;
                    if r == 0 || !square_free(r) {
                        return Err(format!("radicand {r} is not square-free"));
                    }
                    let c = c.as_i64().ok_or_else(|| format!("coefficient of sqrt({r}) is not an integer"))?;
                    o.add_term(r, c);
                }
                Ok(o)
            }
            other => Err(format!("cannot read a frequency from {other}")),
        }
    }
}

fn square_free(r: u32) -> bool {
    let mut p = 2u32;
    while p * p <= r {
        if r.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl Omega {
    pub fn zero() -> Self {
        Omega { terms: BTreeMap::new() }
    }

    /// `num / DENOM`.
    pub fn rational(num: i64) -> Self {
        let mut o = Omega::zero();
        o.add_term(1, num);
        o
    }

    /// An integer frequency.
    pub fn int(k: i64) -> Self {
        Omega::rational(k * DENOM)
    }

    /// `c * sqrt(r) / DENOM`.
    pub fn radical(r: u32, c: i64) -> Self {
        let mut o = Omega::zero();
        o.add_term(r, c);
        o
    }

    fn add_term(&mut self, r: u32, c: i64) {
        let e = self.terms.entry(r).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&r);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn value(&self) -> f64 {
        self.terms.iter().map(|(&r, &c)| c as f64 * (r as f64).sqrt()).sum::<f64>() / DENOM as f64
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.keys().copied()
    }

    pub fn coeff(&self, r: u32) -> i64 {
        self.terms.get(&r).copied().unwrap_or(0)
    }

    pub fn neg(&self) -> Omega {
        Omega { terms: self.terms.iter().map(|(&r, &c)| (r, -c)).collect() }
    }

    pub fn add(&self, other: &Omega) -> Omega {
        let mut o = self.clone();
        for (&r, &c) in &other.terms {
            o.add_term(r, c);
        }
        o
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.value())
    }
}

/// Outcome of one verifier run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub check: String,
    pub holds: bool,
    pub method: String,
    /// Cancelling integer vector when the check fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i64>>,
}

/// Coefficient vectors of `ws` over their joint radicand support.
fn dense(ws: &[Omega]) -> Vec<Vec<i64>> {
    let basis: BTreeSet<u32> = ws.iter().flat_map(|w| w.support()).collect();
    let index: HashMap<u32, usize> = basis.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    ws.iter()
        .map(|w| {
            let mut v = vec![0i64; basis.len()];
            for (&r, &c) in &w.terms {
                v[index[&r]] = c;
            }
            v
        })
        .collect()
}

/// Exhaustive search over integer `y` with `sum |y_k| <= m`: the set is
/// minimally canceling iff every vanishing combination has all `y_k` equal.
pub fn check_minimally_canceling(ws: &[Omega]) -> Certificate {
    let m = ws.len();
    let method = format!("exhaustive |y|_1 <= {m}");
    let check = "minimally canceling".to_string();
    let vecs = dense(ws);
    let dim = vecs.first().map_or(0, |v| v.len());
    let mut y = vec![0i64; m];
    let mut sum = vec![0i64; dim];
    fn rec(k: usize, budget: i64, vecs: &[Vec<i64>], y: &mut Vec<i64>, sum: &mut Vec<i64>) -> bool {
        if k == vecs.len() {
            let nonzero = y.iter().any(|&v| v != 0);
            let equal = y.windows(2).all(|w| w[0] == w[1]);
            return nonzero && !equal && sum.iter().all(|&s| s == 0);
        }
        for c in -budget..=budget {
            for (s, v) in sum.iter_mut().zip(&vecs[k]) {
                *s += c * v;
            }
            y[k] = c;
            let found = rec(k + 1, budget - c.abs(), vecs, y, sum);
            for (s, v) in sum.iter_mut().zip(&vecs[k]) {
                *s -= c * v;
            }
            if found {
                return true;
            }
        }
        y[k] = 0;
        false
    }
    if m >= 2 && rec(0, m as i64, &vecs, &mut y, &mut sum) {
        Certificate { check, holds: false, method, witness: Some(y) }
    } else {
        Certificate { check, holds: m >= 2, method, witness: None }
    }
}

/// Default cap on `sum M_i` for the exhaustive independence search.
pub const DEFAULT_INDEPENDENCE_BOUND: usize = 14;

/// Independence of a collection of frequency sets.
///
/// Overlapping sets fail immediately. Sets with pairwise disjoint radicand
/// supports are independent for every bound: a vanishing total splits into
/// vanishing per-set sums by linear independence of the radicals. Otherwise all
/// integer vectors with `sum |y| <= sum M_i` are searched, which is refused
/// above `bound`.
pub fn check_independent(sets: &[Vec<Omega>], bound: usize) -> Result<Certificate, SynthesisError> {
    let check = "independent".to_string();
    let mut seen = BTreeSet::new();
    for s in sets {
        for w in s {
            if !seen.insert(w.clone()) {
                return Ok(Certificate {
                    check,
                    holds: false,
                    method: format!("sets not pairwise disjoint (repeated {w})"),
                    witness: None,
                });
            }
        }
    }
    let supports: Vec<BTreeSet<u32>> = sets.iter().map(|s| s.iter().flat_map(|w| w.support()).collect()).collect();
    let separated = (0..supports.len())
        .all(|a| (a + 1..supports.len()).all(|b| supports[a].is_disjoint(&supports[b])));
    if separated {
        return Ok(Certificate { check, holds: true, method: "disjoint radical supports".into(), witness: None });
    }
    let total: usize = sets.iter().map(|s| s.len()).sum();
    if total > bound {
        return Err(SynthesisError::Capacity { total, bound });
    }
    let all: Vec<Omega> = sets.iter().flatten().cloned().collect();
    let vecs = dense(&all);
    let cap = total as i64;
    // per set: coefficient sum -> cheapest |y|_1 reaching it
    let mut offset = 0;
    let mut per_set: Vec<HashMap<Vec<i64>, i64>> = Vec::new();
    for s in sets {
        let mut states: HashMap<Vec<i64>, i64> = HashMap::from([(vec![0; vecs[0].len()], 0)]);
        for v in &vecs[offset..offset + s.len()] {
            let mut next: HashMap<Vec<i64>, i64> = HashMap::new();
            for (sum, &cost) in &states {
                let room = cap - cost;
                for c in -room..=room {
                    let key: Vec<i64> = sum.iter().zip(v).map(|(a, b)| a + c * b).collect();
                    let nc = cost + c.abs();
                    let e = next.entry(key).or_insert(nc);
                    *e = (*e).min(nc);
                }
            }
            states = next;
        }
        offset += s.len();
        per_set.push(states);
    }
    let mut combined: HashMap<(Vec<i64>, bool), i64> = HashMap::from([((vec![0; vecs[0].len()], false), 0)]);
    for states in &per_set {
        let mut next: HashMap<(Vec<i64>, bool), i64> = HashMap::new();
        for ((tot, nz), &c1) in &combined {
            for (sum, &c2) in states {
                if c1 + c2 > cap {
                    continue;
                }
                let key: Vec<i64> = tot.iter().zip(sum).map(|(a, b)| a + b).collect();
                let flag = *nz || sum.iter().any(|&x| x != 0);
                let e = next.entry((key, flag)).or_insert(c1 + c2);
                *e = (*e).min(c1 + c2);
            }
        }
        combined = next;
    }
    let zero = vec![0; vecs[0].len()];
    let holds = !combined.contains_key(&(zero, true));
    Ok(Certificate { check, holds, method: format!("exhaustive |y|_1 <= {total}"), witness: None })
}

/// `k`-th prime, 0-based.
pub fn nth_prime(k: usize) -> u32 {
    let mut found = 0;
    let mut c = 1u32;
    loop {
        c += 1;
        if (2..).take_while(|d: &u32| d * d <= c).all(|d| !c.is_multiple_of(d)) {
            if found == k {
                return c;
            }
            found += 1;
        }
    }
}
