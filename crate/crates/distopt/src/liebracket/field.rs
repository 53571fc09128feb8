use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// The linear field `h_{i,j}(z) = z_i e_j` (1-based state indices).
///
/// Ordered by `j` first, then `i`, so `h_{k1,k2}` precedes `h_{k3,k4}` whenever `k2 < k4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gen {
    pub i: usize,
    pub j: usize,
}

impl Gen {
    pub fn new(i: usize, j: usize) -> Self {
        Gen { i, j }
    }

    /// Matrix `e_j e_i^T`.
    pub fn matrix(self) -> IntMatrix {
        IntMatrix::single(self.j, self.i, 1)
    }

    /// Writes `h_{i,j}` with indices relative to blocks of size `n`.
    pub fn pretty(self, n: usize) -> String {
        format!("h({},{})", rel(self.i, n), rel(self.j, n))
    }
}

pub(crate) fn rel(k: usize, n: usize) -> String {
    match (k - 1) / n {
        0 => format!("{k}"),
        1 => format!("n+{}", k - n),
        _ => format!("2n+{}", k - 2 * n),
    }
}

impl Ord for Gen {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.j, self.i).cmp(&(other.j, other.i))
    }
}

impl PartialOrd for Gen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(h {} {})", self.i, self.j)
    }
}

/// Sparse integer matrix keyed by 1-based `(row, col)`; zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    entries: BTreeMap<(usize, usize), i64>,
}

impl IntMatrix {
    pub fn zero() -> Self {
        IntMatrix::default()
    }

    pub fn single(row: usize, col: usize, v: i64) -> Self {
        let mut m = IntMatrix::zero();
        m.add(row, col, v);
        m
    }

    pub fn add(&mut self, row: usize, col: usize, v: i64) {
        let e = self.entries.entry((row, col)).or_insert(0);
        *e += v;
        if *e == 0 {
            self.entries.remove(&(row, col));
        }
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries.get(&(row, col)).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// The lone nonzero entry, if there is exactly one.
    pub fn single_entry(&self) -> Option<(usize, usize, i64)> {
        if self.entries.len() == 1 {
            let (&(r, c), &v) = self.entries.iter().next().unwrap();
            Some((r, c, v))
        } else {
            None
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let mut by_row: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
        for (&(r, c), &v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = IntMatrix::zero();
        for (&(r, k), &v) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, w) in row {
                    out.add(r, c, v * w);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = self.clone();
        for (&(r, c), &v) in &other.entries {
            out.add(r, c, -v);
        }
        out
    }

    pub fn scaled(&self, k: i64) -> IntMatrix {
        let mut out = IntMatrix::zero();
        for (&(r, c), &v) in &self.entries {
            out.add(r, c, k * v);
        }
        out
    }

    /// `M z` for a dense `z` (0-based slice, 1-based matrix).
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; z.len()];
        for (&(r, c), &v) in &self.entries {
            out[r - 1] += v as f64 * z[c - 1];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_matrix_and_order() {
        let h = Gen::new(3, 5);
        assert_eq!(h.matrix().single_entry(), Some((5, 3, 1)));
        let z = [1.0, 2.0, 7.0, 4.0, 5.0];
        assert_eq!(h.matrix().apply(&z), vec![0.0, 0.0, 0.0, 0.0, 7.0]);
        assert!(Gen::new(9, 2) < Gen::new(1, 3));
        assert!(Gen::new(1, 3) < Gen::new(2, 3));
        assert_eq!(Gen::new(7, 3).pretty(5), "h(n+2,3)");
        assert_eq!(Gen::new(14, 12).pretty(5), "h(2n+4,2n+2)");
    }

    #[test]
    fn sparse_arithmetic() {
        let a = IntMatrix::single(1, 2, 3);
        let b = IntMatrix::single(2, 4, 5);
        assert_eq!(a.mul(&b), IntMatrix::single(1, 4, 15));
        assert!(b.mul(&a).is_zero());
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.scaled(-2).get(1, 2), -6);
    }
}
