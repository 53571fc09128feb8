//! Modified saddle-point dynamics on `z = [x; nu; mu]` and their split into a
//! graph-admissible drift and the couplings that need bracket rewriting.

use nalgebra::DMatrix;

use crate::digraph::DiGraph;
use crate::problem::{rest_entries, AugmentedProblem, Objective, RestEntry, RestKind};

/// Index set `I(i) = {i, n+i, 2n+i}` (1-based).
pub fn agent_indices(n: usize, i: usize) -> [usize; 3] {
    [i, n + i, 2 * n + i]
}

/// Agent owning the 1-based state index `k`.
pub fn owner(n: usize, k: usize) -> usize {
    (k - 1) % n + 1
}

/// Sparse `(row, col, value)` list, 0-based.
type Triplets = Vec<(usize, usize, f64)>;

fn triplets(m: &DMatrix<f64>) -> Triplets {
    let mut t = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if m[(r, c)] != 0.0 {
                t.push((r, c, m[(r, c)]));
            }
        }
    }
    t
}

/// Precomputed evaluator for drifts of the form
/// `[-grad F - Gx nu - Ax mu; Gn x - g + w(nu); diag(mu)(A x - b)]`.
#[derive(Debug, Clone)]
struct Drift {
    n: usize,
    objectives: Vec<Objective>,
    x_from_nu: Triplets,
    x_from_mu: Triplets,
    nu_from_x: Triplets,
    mu_from_x: Triplets,
    g: Vec<f64>,
    b: Vec<f64>,
    damped: Vec<bool>,
}

impl Drift {
    fn new(ap: &AugmentedProblem, gx: &DMatrix<f64>, ax: &DMatrix<f64>, gn: &DMatrix<f64>) -> Self {
        let n = ap.n();
        Drift {
            n,
            objectives: ap.base.objectives.clone(),
            x_from_nu: triplets(gx),
            x_from_mu: triplets(ax),
            nu_from_x: triplets(gn),
            mu_from_x: triplets(&ap.a_mat),
            g: ap.g.iter().copied().collect(),
            b: ap.b.iter().copied().collect(),
            damped: (1..=n).map(|i| !ap.se.contains(&i)).collect(),
        }
    }

    fn eval(&self, z: &[f64], out: &mut [f64]) {
        let n = self.n;
        let (x, rest) = z.split_at(n);
        let (nu, mu) = rest.split_at(n);
        for i in 0..n {
            out[i] = match &self.objectives[i] {
                Objective::Quadratic { a, c } => -2.0 * a * (x[i] - c),
                f => -f.derivative(x[i]),
            };
            out[n + i] = -self.g[i] - if self.damped[i] { nu[i] } else { 0.0 };
        }
        for &(r, c, v) in &self.x_from_nu {
            out[r] -= v * nu[c];
        }
        for &(r, c, v) in &self.x_from_mu {
            out[r] -= v * mu[c];
        }
        for &(r, c, v) in &self.nu_from_x {
            out[n + r] += v * x[c];
        }
        let slack = &mut out[2 * n..3 * n];
        for (s, b) in slack.iter_mut().zip(&self.b) {
            *s = -b;
        }
        for &(r, c, v) in &self.mu_from_x {
            slack[r] += v * x[c];
        }
        for (s, m) in slack.iter_mut().zip(mu) {
            *s *= m;
        }
    }
}

/// `x' = -grad F - G^T nu - A^T mu`, `nu' = G x - g + w(nu)`, `mu' = diag(mu)(A x - b)`.
pub fn saddle_rhs(ap: &AugmentedProblem, z: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 3 * ap.n()];
    SaddleDynamics::new(ap).eval(z, &mut out);
    out
}

/// The centralized reference flow as a reusable evaluator.
#[derive(Debug, Clone)]
pub struct SaddleDynamics {
    drift: Drift,
}

impl SaddleDynamics {
    pub fn new(ap: &AugmentedProblem) -> Self {
        let drift = Drift::new(ap, &ap.g_mat.transpose(), &ap.a_mat.transpose(), &ap.g_mat);
        SaddleDynamics { drift }
    }

    pub fn dim(&self) -> usize {
        3 * self.drift.n
    }

    pub fn eval(&self, z: &[f64], out: &mut [f64]) {
        self.drift.eval(z, out)
    }
}

#[derive(Debug, Clone)]
pub struct AdmissibleSplit {
    pub n: usize,
    /// Entries of `G^T` with `l_ij != 0` or `i = j`.
    pub g_adm: DMatrix<f64>,
    pub a_adm: DMatrix<f64>,
    pub g_rest: DMatrix<f64>,
    pub a_rest: DMatrix<f64>,
    /// Equality-row couplings `G_ij` with `l_ij = 0`, moved out of the `nu` rows.
    pub g_row_rest: DMatrix<f64>,
    /// Inequality-row couplings `A_ij` with `l_ij = 0`. These stay in the drift
    /// because the `mu` rows are bilinear; rewriting refuses them.
    pub unsupported: Vec<RestEntry>,
    drift: Drift,
}

pub fn admissible_split(ap: &AugmentedProblem, g: &DiGraph) -> AdmissibleSplit {
    let n = ap.n();
    let gt = ap.g_mat.transpose();
    let at = ap.a_mat.transpose();
    let mut g_adm = DMatrix::zeros(n, n);
    let mut a_adm = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j || g.l(i + 1, j + 1) != 0 {
                g_adm[(i, j)] = gt[(i, j)];
                a_adm[(i, j)] = at[(i, j)];
            }
        }
    }
    let g_rest = &gt - &g_adm;
    let a_rest = &at - &a_adm;
    let mut g_row_rest = DMatrix::zeros(n, n);
    let mut unsupported = Vec::new();
    for r in rest_entries(ap, g) {
        match r.kind {
            RestKind::EqRow => g_row_rest[(r.i - 1, r.j - 1)] = r.coeff,
            RestKind::IneqRow => unsupported.push(r),
            _ => {}
        }
    }
    let drift = Drift::new(ap, &g_adm, &a_adm, &(&ap.g_mat - &g_row_rest));
    AdmissibleSplit { n, g_adm, a_adm, g_rest, a_rest, g_row_rest, unsupported, drift }
}

impl AdmissibleSplit {
    pub fn dim(&self) -> usize {
        3 * self.n
    }

    pub fn f_adm(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.f_adm_into(z, &mut out);
        out
    }

    pub fn f_adm_into(&self, z: &[f64], out: &mut [f64]) {
        self.drift.eval(z, out)
    }

    /// `3n x 3n` matrix `R` with `saddle_rhs(z) = f_adm(z) + R z`.
    pub fn rest_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut r = DMatrix::zeros(3 * n, 3 * n);
        for i in 0..n {
            for j in 0..n {
                r[(i, n + j)] = -self.g_rest[(i, j)];
                r[(i, 2 * n + j)] = -self.a_rest[(i, j)];
                r[(n + i, j)] = self.g_row_rest[(i, j)];
            }
        }
        r
    }

    /// Non-admissible couplings as `(coefficient, k1, k2)`: the rest part of
    /// the dynamics is `sum coefficient * h_{k1,k2}(z)`. Transposed entries are
    /// listed by dual index first.
    pub fn rest_fields(&self) -> Vec<(RestEntry, f64, usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for j in 1..=n {
            for i in 1..=n {
                let c = self.g_rest[(i - 1, j - 1)];
                if c != 0.0 {
                    let e = RestEntry { kind: RestKind::EqTransposed, i, j, coeff: c };
                    out.push((e, -c, n + j, i));
                }
            }
        }
        for j in 1..=n {
            for i in 1..=n {
                let c = self.a_rest[(i - 1, j - 1)];
                if c != 0.0 {
                    let e = RestEntry { kind: RestKind::IneqTransposed, i, j, coeff: c };
                    out.push((e, -c, 2 * n + j, i));
                }
            }
        }
        for i in 1..=n {
            for j in 1..=n {
                let c = self.g_row_rest[(i - 1, j - 1)];
                if c != 0.0 {
                    let e = RestEntry { kind: RestKind::EqRow, i, j, coeff: c };
                    out.push((e, c, j, n + i));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{augment, example_problem, solve_kkt_oracle, Problem};

    fn graph_a() -> DiGraph {
        DiGraph::new(5, &[(1, 2), (1, 5), (2, 3), (3, 1), (4, 3), (5, 4), (5, 2)]).unwrap()
    }

    fn graph_b() -> DiGraph {
        DiGraph::new(5, &[(1, 2), (1, 5), (2, 3), (3, 1), (4, 3), (5, 4)]).unwrap()
    }

    #[test]
    fn rhs_vanishes_at_saddle_point() {
        let ap = augment(&example_problem(), 1.0).unwrap();
        let sp = solve_kkt_oracle(&ap).unwrap();
        let r = saddle_rhs(&ap, &sp.state());
        assert!(r.iter().all(|v| v.abs() <= 1e-12), "{r:?}");
    }

    #[test]
    fn scalar_unrolled() {
        let p = Problem::unconstrained(vec![Objective::quadratic(1.0, 1.0)]).unwrap();
        let ap = augment(&p, 1.0).unwrap();
        let r = saddle_rhs(&ap, &[3.0, 2.0, 0.5]);
        assert_eq!(r, vec![-4.0, -2.0, -0.5]);
        let r = saddle_rhs(&ap, &[3.0, 2.0, 0.0]);
        assert_eq!(r[2], 0.0);
    }

    #[test]
    fn split_graph_a_matches_printed_pattern() {
        let ap = augment(&example_problem(), 3.0).unwrap();
        let s = admissible_split(&ap, &graph_a());
        let mut g_want = DMatrix::zeros(5, 5);
        g_want[(1, 1)] = 1.0;
        g_want[(4, 4)] = 1.0;
        let mut a_want = DMatrix::zeros(5, 5);
        a_want[(0, 0)] = 1.0;
        a_want[(3, 3)] = 1.0;
        assert_eq!(s.g_adm, g_want);
        assert_eq!(s.a_adm, a_want);
        let fields: Vec<_> = s.rest_fields().into_iter().map(|(_, c, k1, k2)| (c, k1, k2)).collect();
        // + h_{n+2,3} + h_{n+5,2} + h_{2n+1,2} - h_{2n+4,3}
        assert_eq!(fields, vec![(1.0, 7, 3), (1.0, 10, 2), (1.0, 11, 2), (-1.0, 14, 3)]);
        assert!(s.g_row_rest.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn split_graph_b_moves_constraint_row() {
        let ap = augment(&example_problem(), 1.0).unwrap();
        let s = admissible_split(&ap, &graph_b());
        assert_eq!(s.g_row_rest[(4, 1)], -1.0);
        let fields = s.rest_fields();
        assert_eq!(fields.len(), 5);
        assert_eq!((fields[4].1, fields[4].2, fields[4].3), (-1.0, 2, 10));
    }

    #[test]
    fn split_consistency_pointwise() {
        let ap = augment(&example_problem(), 2.0).unwrap();
        for g in [graph_a(), graph_b(), DiGraph::new(5, &[]).unwrap()] {
            let s = admissible_split(&ap, &g);
            let r = s.rest_matrix();
            for k in 0..20 {
                let z: Vec<f64> = (0..15).map(|i| ((i * 7 + k * 3) % 11) as f64 - 5.0).collect();
                let lhs = saddle_rhs(&ap, &z);
                let fa = s.f_adm(&z);
                for i in 0..15 {
                    let rz: f64 = (0..15).map(|j| r[(i, j)] * z[j]).sum();
                    assert_eq!(lhs[i], fa[i] + rz);
                }
            }
        }
    }

    #[test]
    fn full_topology_has_no_rest() {
        let ap = augment(&example_problem(), 1.0).unwrap();
        let edges: Vec<_> = (1..=5).flat_map(|i| (1..=5).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let g = DiGraph::new(5, &edges).unwrap();
        let s = admissible_split(&ap, &g);
        assert!(s.rest_fields().is_empty());
        let z: Vec<f64> = (0..15).map(|i| i as f64 * 0.3 - 1.0).collect();
        assert_eq!(s.f_adm(&z), saddle_rhs(&ap, &z));
    }

    #[test]
    fn index_helpers() {
        assert_eq!(agent_indices(5, 2), [2, 7, 12]);
        assert_eq!(owner(5, 7), 2);
        assert_eq!(owner(5, 15), 5);
    }
}
