//! Directed communication graphs.
//!
//! An edge `(i, j)` means node `i` receives information from node `j`.
//! Nodes are 1-based on the public surface.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph needs at least one node")]
    Empty,
    #[error("node {node} outside 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0},{1})")]
    DuplicateEdge(usize, usize),
    #[error("no directed path from node {from} to node {to}")]
    NotConnected { from: usize, to: usize },
    #[error("split position {theta} outside 2..={max}")]
    BadSplit { theta: usize, max: usize },
    #[error("invalid path: {0}")]
    BadPath(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    // out[i-1] holds every j with edge (i, j)
    out: Vec<BTreeSet<usize>>,
}

impl DiGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut out = vec![BTreeSet::new(); n];
        for &(i, j) in edges {
            for node in [i, j] {
                if node == 0 || node > n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if !out[i - 1].insert(j) {
                return Err(GraphError::DuplicateEdge(i, j));
            }
        }
        Ok(DiGraph { n, out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= self.n && self.out[i - 1].contains(&j)
    }

    /// Out-neighbors of `i`, i.e. the nodes `i` receives information from.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[i - 1].iter().copied()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for i in 1..=self.n {
            for j in self.neighbors(i) {
                e.push((i, j));
            }
        }
        e
    }

    pub fn adjacency(&self) -> Vec<Vec<i64>> {
        let mut a = vec![vec![0; self.n]; self.n];
        for (i, j) in self.edges() {
            a[i - 1][j - 1] = 1;
        }
        a
    }

    /// `L = D - A` with the out-degree matrix `D`.
    pub fn laplacian(&self) -> Vec<Vec<i64>> {
        let mut l = self.adjacency();
        for (i, row) in l.iter_mut().enumerate() {
            let deg: i64 = row.iter().sum();
            for v in row.iter_mut() {
                *v = -*v;
            }
            row[i] = deg;
        }
        l
    }

    /// Laplacian entry `l_ij`, 1-based.
    pub fn l(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.out[i - 1].len() as i64
        } else if self.has_edge(i, j) {
            -1
        } else {
            0
        }
    }

    /// Minimum-length path from `v_i` to `v_j` by BFS. Among equal-length
    /// predecessors the smallest index wins, so the result is unique.
    pub fn shortest_path(&self, i: usize, j: usize) -> Result<Path, GraphError> {
        for node in [i, j] {
            if node == 0 || node > self.n {
                return Err(GraphError::NodeOutOfRange { node, n: self.n });
            }
        }
        if i == j {
            return Err(GraphError::BadPath(format!("source and target coincide ({i})")));
        }
        let mut dist = vec![usize::MAX; self.n + 1];
        dist[i] = 0;
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if dist[j] == usize::MAX {
            return Err(GraphError::NotConnected { from: i, to: j });
        }
        let mut nodes = vec![j];
        let mut cur = j;
        while cur != i {
            let pred = (1..=self.n)
                .find(|&u| dist[u] != usize::MAX && dist[u] + 1 == dist[cur] && self.has_edge(u, cur))
                .expect("bfs layer has a predecessor");
            nodes.push(pred);
            cur = pred;
        }
        nodes.reverse();
        Ok(Path { nodes })
    }

    /// True if every ordered pair of distinct nodes is joined by a directed path.
    pub fn is_strongly_connected(&self) -> bool {
        (1..=self.n).all(|i| (1..=self.n).all(|j| i == j || self.shortest_path(i, j).is_ok()))
    }
}

/// A directed path `<v_{i1}, ..., v_{ir}>` with `r >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    nodes: Vec<usize>,
}

impl Path {
    /// Checks that consecutive pairs are edges of `g`.
    pub fn new(g: &DiGraph, nodes: Vec<usize>) -> Result<Self, GraphError> {
        if nodes.len() < 2 {
            return Err(GraphError::BadPath("fewer than two nodes".into()));
        }
        for w in nodes.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(GraphError::BadPath(format!("({},{}) is not an edge", w[0], w[1])));
            }
        }
        Ok(Path { nodes })
    }

    /// Builds a path without a graph, for node lists known to be valid.
    pub fn from_nodes(nodes: Vec<usize>) -> Result<Self, GraphError> {
        if nodes.len() < 2 {
            return Err(GraphError::BadPath("fewer than two nodes".into()));
        }
        Ok(Path { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn head(&self) -> usize {
        self.nodes[0]
    }

    pub fn tail(&self) -> usize {
        *self.nodes.last().unwrap()
    }

    /// `q` = nodes `1..=theta`, `q_c` = nodes `theta..=r`, 1-based positions.
    pub fn split_at(&self, theta: usize) -> Result<(Path, Path), GraphError> {
        let r = self.nodes.len();
        if theta < 2 || theta + 1 > r {
            return Err(GraphError::BadSplit { theta, max: r.saturating_sub(1) });
        }
        let q = Path { nodes: self.nodes[..theta].to_vec() };
        let qc = Path { nodes: self.nodes[theta - 1..].to_vec() };
        Ok((q, qc))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (k, v) in self.nodes.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "v{v}")?;
        }
        write!(f, ">")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_a() -> DiGraph {
        DiGraph::new(5, &[(1, 2), (1, 5), (2, 3), (3, 1), (4, 3), (5, 4), (5, 2)]).unwrap()
    }

    #[test]
    fn adjacency_rows() {
        assert_eq!(graph_a().adjacency()[0], vec![0, 1, 0, 0, 1]);
        let g = DiGraph::new(3, &[]).unwrap();
        assert!(g.adjacency().iter().flatten().all(|&v| v == 0));
        let g = DiGraph::new(2, &[(1, 2)]).unwrap();
        assert_eq!(g.adjacency(), vec![vec![0, 1], vec![0, 0]]);
    }

    #[test]
    fn laplacian_graph_a() {
        let l = graph_a().laplacian();
        assert_eq!(
            l,
            vec![
                vec![2, -1, 0, 0, -1],
                vec![0, 1, -1, 0, 0],
                vec![-1, 0, 1, 0, 0],
                vec![0, 0, -1, 1, 0],
                vec![0, -1, 0, -1, 2],
            ]
        );
        for i in 1..=5 {
            for j in 1..=5 {
                assert_eq!(graph_a().l(i, j), l[i - 1][j - 1]);
            }
        }
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(DiGraph::new(2, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(DiGraph::new(2, &[(1, 2), (1, 2)]), Err(GraphError::DuplicateEdge(1, 2)));
        assert!(matches!(DiGraph::new(2, &[(1, 3)]), Err(GraphError::NodeOutOfRange { .. })));
        assert_eq!(DiGraph::new(0, &[]), Err(GraphError::Empty));
    }

    #[test]
    fn shortest_paths_graph_a() {
        let g = graph_a();
        assert_eq!(g.shortest_path(3, 2).unwrap().nodes(), &[3, 1, 2]);
        assert_eq!(g.shortest_path(2, 5).unwrap().nodes(), &[2, 3, 1, 5]);
        assert_eq!(g.shortest_path(1, 2).unwrap().nodes(), &[1, 2]);
        let h = DiGraph::new(3, &[(1, 2)]).unwrap();
        assert_eq!(h.shortest_path(2, 1), Err(GraphError::NotConnected { from: 2, to: 1 }));
    }

    #[test]
    fn tie_break_prefers_small_predecessor() {
        // 1 -> 3 -> 4 and 1 -> 2 -> 4 both have length 2
        let g = DiGraph::new(4, &[(1, 3), (1, 2), (3, 4), (2, 4)]).unwrap();
        assert_eq!(g.shortest_path(1, 4).unwrap().nodes(), &[1, 2, 4]);
    }

    #[test]
    fn splits() {
        let p = Path::from_nodes(vec![1, 2, 3, 4]).unwrap();
        let (q, qc) = p.split_at(3).unwrap();
        assert_eq!(q.nodes(), &[1, 2, 3]);
        assert_eq!(qc.nodes(), &[3, 4]);
        let p = Path::from_nodes(vec![2, 3, 1, 5]).unwrap();
        let (q, qc) = p.split_at(3).unwrap();
        assert_eq!(q.nodes(), &[2, 3, 1]);
        assert_eq!(qc.nodes(), &[1, 5]);
        let p = Path::from_nodes(vec![1, 2]).unwrap();
        for theta in 0..4 {
            assert!(p.split_at(theta).is_err());
        }
    }

    #[test]
    fn path_checks_edges() {
        let g = graph_a();
        assert!(Path::new(&g, vec![3, 1, 2]).is_ok());
        assert!(Path::new(&g, vec![3, 2]).is_err());
        assert_eq!(Path::new(&g, vec![3, 1, 2]).unwrap().to_string(), "<v3,v1,v2>");
    }
}
