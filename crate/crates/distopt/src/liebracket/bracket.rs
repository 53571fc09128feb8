use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::field::{Gen, IntMatrix};

/// Formal bracket: a binary tree whose leaves are generators.
///
/// The total order is degree first, then generator order on leaves and
/// lexicographic `(left, right)` on composite brackets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bracket {
    Leaf(Gen),
    Node(Box<Bracket>, Box<Bracket>, usize),
}

impl Bracket {
    pub fn leaf(g: Gen) -> Self {
        Bracket::Leaf(g)
    }

    pub fn node(l: Bracket, r: Bracket) -> Self {
        let d = l.degree() + r.degree();
        Bracket::Node(Box::new(l), Box::new(r), d)
    }

    /// `[h_{i1,j1}, h_{i2,j2}]` shorthand.
    pub fn pair(a: Gen, b: Gen) -> Self {
        Bracket::node(Bracket::leaf(a), Bracket::leaf(b))
    }

    pub fn degree(&self) -> usize {
        match self {
            Bracket::Leaf(_) => 1,
            Bracket::Node(_, _, d) => *d,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Bracket::Leaf(_))
    }

    pub fn children(&self) -> Option<(&Bracket, &Bracket)> {
        match self {
            Bracket::Leaf(_) => None,
            Bracket::Node(l, r, _) => Some((l, r)),
        }
    }

    /// Leaves left to right.
    pub fn leaves(&self) -> Vec<Gen> {
        let mut out = Vec::with_capacity(self.degree());
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Gen>) {
        match self {
            Bracket::Leaf(g) => out.push(*g),
            Bracket::Node(l, r, _) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn multidegree(&self) -> BTreeMap<Gen, usize> {
        let mut m = BTreeMap::new();
        for g in self.leaves() {
            *m.entry(g).or_insert(0) += 1;
        }
        m
    }

    /// Matrix of the linear field; `[L, R]` evaluates to `M_R M_L - M_L M_R`.
    pub fn eval(&self) -> IntMatrix {
        match self {
            Bracket::Leaf(g) => g.matrix(),
            Bracket::Node(l, r, _) => {
                let ml = l.eval();
                let mr = r.eval();
                mr.mul(&ml).sub(&ml.mul(&mr))
            }
        }
    }

    /// Like `Display` but with indices relative to blocks of size `n`.
    pub fn pretty(&self, n: usize) -> String {
        match self {
            Bracket::Leaf(g) => g.pretty(n),
            Bracket::Node(l, r, _) => format!("[{}, {}]", l.pretty(n), r.pretty(n)),
        }
    }
}

impl Ord for Bracket {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (self, other) {
            (Bracket::Leaf(a), Bracket::Leaf(b)) => a.cmp(b),
            (Bracket::Node(l1, r1, _), Bracket::Node(l2, r2, _)) => l1.cmp(l2).then_with(|| r1.cmp(r2)),
            _ => unreachable!("equal degree implies equal shape at the root"),
        }
    }
}

impl PartialOrd for Bracket {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl serde::Serialize for Bracket {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// S-expression with absolute indices: `(h 7 6)`, `[(h 7 6) (h 6 3)]`.
impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracket::Leaf(g) => write!(f, "{g}"),
            Bracket::Node(l, r, _) => write!(f, "[{l} {r}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_example_bracket() {
        let n = 5;
        let b = Bracket::pair(Gen::new(n + 3, n + 2), Gen::new(n + 2, 1));
        assert_eq!(b.eval(), Gen::new(n + 3, 1).matrix());
        assert_eq!(b.degree(), 2);
        assert_eq!(b.to_string(), "[(h 8 7) (h 7 1)]");
        assert_eq!(b.pretty(n), "[h(n+3,n+2), h(n+2,1)]");
    }

    #[test]
    fn skew_and_disjoint_vanish() {
        let h = Gen::new(1, 2);
        assert!(Bracket::pair(h, h).eval().is_zero());
        assert!(Bracket::pair(Gen::new(1, 2), Gen::new(3, 4)).eval().is_zero());
    }

    #[test]
    fn composition_rule() {
        // [h_{i,j}, h_{j,k}] = h_{i,k}
        let b = Bracket::pair(Gen::new(4, 2), Gen::new(2, 9));
        assert_eq!(b.eval(), Gen::new(4, 9).matrix());
    }

    #[test]
    fn order_is_degree_major() {
        let a = Bracket::leaf(Gen::new(1, 9));
        let b = Bracket::pair(Gen::new(1, 2), Gen::new(2, 3));
        assert!(a < b);
        let c = Bracket::pair(Gen::new(1, 2), Gen::new(3, 4));
        assert!(b < c);
        assert_eq!(c.multidegree().len(), 2);
        assert_eq!(c.leaves(), vec![Gen::new(1, 2), Gen::new(3, 4)]);
    }
}
