//! Separable convex problems with linear constraint rows, their augmentation
//! to one equality and one inequality row per agent, and an exact KKT oracle
//! for quadratic objectives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::digraph::DiGraph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("objective {agent}: curvature a = {a} must be positive")]
    NotStrictlyConvex { agent: usize, a: f64 },
    #[error("{kind} row of agent {agent} violates the diagonal condition (entry {agent} is zero)")]
    ZeroDiagonal { kind: &'static str, agent: usize },
    #[error("padding constant K = {0} must be positive")]
    BadK(f64),
    #[error("problem is infeasible")]
    Infeasible,
    #[error("oracle needs quadratic objectives (agent {0} is not)")]
    NonQuadratic(usize),
    #[error("{0} inequality rows exceed the oracle's enumeration limit of 20")]
    TooManyInequalities(usize),
}

type Callback = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Per-agent strictly convex objective `F_i(x_i)`.
#[derive(Clone)]
pub enum Objective {
    /// `a (x - c)^2`
    Quadratic { a: f64, c: f64 },
    /// Returns `(F_i(x), F_i'(x))`.
    Custom(Callback),
}

impl Objective {
    pub fn quadratic(a: f64, c: f64) -> Self {
        Objective::Quadratic { a, c }
    }

    pub fn custom(f: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Objective::Custom(Arc::new(f))
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Objective::Quadratic { a, c } => a * (x - c) * (x - c),
            Objective::Custom(f) => f(x).0,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Objective::Quadratic { a, c } => 2.0 * a * (x - c),
            Objective::Custom(f) => f(x).1,
        }
    }
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Quadratic { a, c } => write!(f, "Quadratic {{ a: {a}, c: {c} }}"),
            Objective::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub row: Vec<f64>,
    pub rhs: f64,
}

/// `min sum F_i(x_i)` s.t. `G_i x = g_i` for agents in `eq`, `A_i x <= b_i` for agents in `ineq`.
#[derive(Debug, Clone)]
pub struct Problem {
    pub n: usize,
    pub objectives: Vec<Objective>,
    pub eq: BTreeMap<usize, ConstraintRow>,
    pub ineq: BTreeMap<usize, ConstraintRow>,
}

impl Problem {
    pub fn new(
        objectives: Vec<Objective>,
        eq: BTreeMap<usize, ConstraintRow>,
        ineq: BTreeMap<usize, ConstraintRow>,
    ) -> Result<Self, ProblemError> {
        let n = objectives.len();
        if n == 0 {
            return Err(ProblemError::Dimension("no agents".into()));
        }
        for (agent, obj) in objectives.iter().enumerate() {
            if let Objective::Quadratic { a, .. } = obj {
                if a.is_nan() || *a <= 0.0 {
                    return Err(ProblemError::NotStrictlyConvex { agent: agent + 1, a: *a });
                }
            }
        }
        for (kind, rows) in [("equality", &eq), ("inequality", &ineq)] {
            for (&agent, r) in rows {
                if agent == 0 || agent > n {
                    return Err(ProblemError::Dimension(format!("{kind} row for agent {agent} of {n}")));
                }
                if r.row.len() != n {
                    return Err(ProblemError::Dimension(format!(
                        "{kind} row of agent {agent} has length {}",
                        r.row.len()
                    )));
                }
            }
        }
        Ok(Problem { n, objectives, eq, ineq })
    }

    pub fn unconstrained(objectives: Vec<Objective>) -> Result<Self, ProblemError> {
        Problem::new(objectives, BTreeMap::new(), BTreeMap::new())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objectives.iter().zip(x).map(|(f, &xi)| f.value(xi)).sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.objectives.iter().zip(x).map(|(f, &xi)| f.derivative(xi)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct AugmentedProblem {
    pub base: Problem,
    pub g_mat: DMatrix<f64>,
    pub g: DVector<f64>,
    pub a_mat: DMatrix<f64>,
    pub b: DVector<f64>,
    pub se: BTreeSet<usize>,
    pub si: BTreeSet<usize>,
    pub k: f64,
}

/// Pads every agent to one equality and one inequality row.
pub fn augment(p: &Problem, k: f64) -> Result<AugmentedProblem, ProblemError> {
    if !k.is_finite() || k <= 0.0 {
        return Err(ProblemError::BadK(k));
    }
    let n = p.n;
    let mut g_mat = DMatrix::zeros(n, n);
    let mut g = DVector::zeros(n);
    let mut a_mat = DMatrix::zeros(n, n);
    let mut b = DVector::from_element(n, k);
    for (&i, r) in &p.eq {
        if r.row[i - 1] == 0.0 {
            return Err(ProblemError::ZeroDiagonal { kind: "equality", agent: i });
        }
        g_mat.set_row(i - 1, &DVector::from_column_slice(&r.row).transpose());
        g[i - 1] = r.rhs;
    }
    for (&i, r) in &p.ineq {
        if r.row[i - 1] == 0.0 {
            return Err(ProblemError::ZeroDiagonal { kind: "inequality", agent: i });
        }
        a_mat.set_row(i - 1, &DVector::from_column_slice(&r.row).transpose());
        b[i - 1] = r.rhs;
    }
    Ok(AugmentedProblem {
        base: p.clone(),
        g_mat,
        g,
        a_mat,
        b,
        se: p.eq.keys().copied().collect(),
        si: p.ineq.keys().copied().collect(),
        k,
    })
}

impl AugmentedProblem {
    pub fn n(&self) -> usize {
        self.base.n
    }

    /// `F(x) + nu^T (G x - g) + mu^T (A x - b)`.
    pub fn lagrangian(&self, x: &[f64], nu: &[f64], mu: &[f64]) -> Result<f64, ProblemError> {
        let n = self.n();
        if x.len() != n || nu.len() != n || mu.len() != n {
            return Err(ProblemError::Dimension(format!(
                "lagrangian expects three vectors of length {n}"
            )));
        }
        let xv = DVector::from_column_slice(x);
        let eq = &self.g_mat * &xv - &self.g;
        let ineq = &self.a_mat * &xv - &self.b;
        let nu = DVector::from_column_slice(nu);
        let mu = DVector::from_column_slice(mu);
        Ok(self.base.objective_value(x) + nu.dot(&eq) + mu.dot(&ineq))
    }

    /// Stationarity residual `||grad F + G^T nu + A^T mu||_inf`.
    pub fn stationarity_residual(&self, sp: &SaddlePoint) -> f64 {
        let grad = DVector::from_vec(self.base.gradient(&sp.x));
        let r = grad
            + self.g_mat.transpose() * DVector::from_column_slice(&sp.nu)
            + self.a_mat.transpose() * DVector::from_column_slice(&sp.mu);
        r.amax()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint {
    pub x: Vec<f64>,
    pub nu: Vec<f64>,
    pub mu: Vec<f64>,
    /// Genuine inequality agents treated as active.
    pub active: Vec<usize>,
}

impl SaddlePoint {
    /// `[x; nu; mu]` as a state of the saddle-point dynamics.
    pub fn state(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend(&self.nu);
        z.extend(&self.mu);
        z
    }
}

fn lstsq(m: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let svd = m.clone().svd(true, true);
    let tol = 1e-12 * svd.singular_values.max().max(1.0);
    svd.solve(rhs, tol).expect("svd with both factors")
}

/// Exact optimum by active-set enumeration (quadratic objectives only).
///
/// Candidates are visited by increasing active-set size, so degenerate ties
/// resolve to the smallest active set.
pub fn solve_kkt_oracle(ap: &AugmentedProblem) -> Result<SaddlePoint, ProblemError> {
    let n = ap.n();
    let mut curv = Vec::with_capacity(n);
    let mut center = Vec::with_capacity(n);
    for (i, f) in ap.base.objectives.iter().enumerate() {
        match f {
            Objective::Quadratic { a, c } => {
                curv.push(*a);
                center.push(*c);
            }
            Objective::Custom(_) => return Err(ProblemError::NonQuadratic(i + 1)),
        }
    }
    let ineqs: Vec<usize> = ap.si.iter().copied().collect();
    if ineqs.len() > 20 {
        return Err(ProblemError::TooManyInequalities(ineqs.len()));
    }
    let eqs: Vec<usize> = ap.se.iter().copied().collect();
    let m = ineqs.len();
    let mut masks: Vec<u32> = (0..(1u32 << m)).collect();
    masks.sort_by_key(|s| (s.count_ones(), *s));
    for mask in masks {
        let act: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| ineqs[b]).collect();
        let rows: Vec<(usize, bool)> =
            eqs.iter().map(|&i| (i, true)).chain(act.iter().map(|&i| (i, false))).collect();
        let dim = n + rows.len();
        let mut kkt = DMatrix::zeros(dim, dim);
        let mut rhs = DVector::zeros(dim);
        for i in 0..n {
            kkt[(i, i)] = 2.0 * curv[i];
            rhs[i] = 2.0 * curv[i] * center[i];
        }
        for (r, &(agent, is_eq)) in rows.iter().enumerate() {
            let (row, val) = if is_eq {
                (ap.g_mat.row(agent - 1), ap.g[agent - 1])
            } else {
                (ap.a_mat.row(agent - 1), ap.b[agent - 1])
            };
            for j in 0..n {
                kkt[(n + r, j)] = row[j];
                kkt[(j, n + r)] = row[j];
            }
            rhs[n + r] = val;
        }
        let sol = lstsq(&kkt, &rhs);
        if (&kkt * &sol - &rhs).amax() > 1e-9 * (1.0 + rhs.amax()) {
            continue;
        }
        let x: Vec<f64> = sol.rows(0, n).iter().copied().collect();
        let mut nu = vec![0.0; n];
        let mut mu = vec![0.0; n];
        for (r, &(agent, is_eq)) in rows.iter().enumerate() {
            if is_eq {
                nu[agent - 1] = sol[n + r];
            } else {
                mu[agent - 1] = sol[n + r];
            }
        }
        let xv = DVector::from_column_slice(&x);
        let slack = &ap.a_mat * &xv - &ap.b;
        let feasible = ineqs.iter().all(|&i| slack[i - 1] <= 1e-9);
        let dual_ok = act.iter().all(|&i| mu[i - 1] >= -1e-12);
        if feasible && dual_ok {
            for v in mu.iter_mut() {
                *v = v.max(0.0);
            }
            return Ok(SaddlePoint { x, nu, mu, active: act });
        }
    }
    Err(ProblemError::Infeasible)
}

/// A coupling between an agent and a non-neighbor's state.
#[derive(Debug, Clone, PartialEq)]
pub struct RestEntry {
    pub kind: RestKind,
    pub i: usize,
    pub j: usize,
    pub coeff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RestKind {
    /// `(G^T)_ij`: `x_i` needs `nu_j`.
    EqTransposed,
    /// `(A^T)_ij`: `x_i` needs `mu_j`.
    IneqTransposed,
    /// `G_ij`: `nu_i` needs `x_j`.
    EqRow,
    /// `A_ij`: `mu_i` needs `x_j`.
    IneqRow,
}

impl RestKind {
    pub fn label(self) -> &'static str {
        match self {
            RestKind::EqTransposed => "G^T",
            RestKind::IneqTransposed => "A^T",
            RestKind::EqRow => "G",
            RestKind::IneqRow => "A",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfcqReport {
    pub equality_rank: usize,
    pub equality_rows: usize,
    pub active: Vec<usize>,
    /// Some direction `q` with `G q = 0` and `A_i q < 0` on active rows exists.
    pub strict_direction: bool,
}

impl MfcqReport {
    pub fn holds(&self) -> bool {
        self.equality_rank == self.equality_rows && self.strict_direction
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    /// Agents whose own row has a zero diagonal entry.
    pub diagonal_failures: Vec<(&'static str, usize)>,
    /// Row couplings `G_ij`, `A_ij` with `l_ij = 0`.
    pub topology_violations: Vec<RestEntry>,
    /// Every coupling the admissible split cannot evaluate locally.
    pub rest_entries: Vec<RestEntry>,
    /// `None` when the oracle could not produce a point to check at.
    pub mfcq: Option<MfcqReport>,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.diagonal_failures.is_empty()
            && self.topology_violations.is_empty()
            && self.mfcq.as_ref().is_some_and(MfcqReport::holds)
    }
}

/// Every off-diagonal coupling with `l_ij = 0`, in deterministic order.
pub fn rest_entries(ap: &AugmentedProblem, g: &DiGraph) -> Vec<RestEntry> {
    let n = ap.n();
    let mut out = Vec::new();
    let mut push = |kind, i, j, coeff: f64| {
        if coeff != 0.0 && i != j && g.l(i, j) == 0 {
            out.push(RestEntry { kind, i, j, coeff });
        }
    };
    for i in 1..=n {
        for j in 1..=n {
            push(RestKind::EqTransposed, i, j, ap.g_mat[(j - 1, i - 1)]);
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            push(RestKind::IneqTransposed, i, j, ap.a_mat[(j - 1, i - 1)]);
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            push(RestKind::EqRow, i, j, ap.g_mat[(i - 1, j - 1)]);
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            push(RestKind::IneqRow, i, j, ap.a_mat[(i - 1, j - 1)]);
        }
    }
    out
}

pub fn check_assumptions(ap: &AugmentedProblem, g: &DiGraph) -> AssumptionReport {
    let mut diagonal_failures = Vec::new();
    for &i in &ap.se {
        if ap.g_mat[(i - 1, i - 1)] == 0.0 {
            diagonal_failures.push(("equality", i));
        }
    }
    for &i in &ap.si {
        if ap.a_mat[(i - 1, i - 1)] == 0.0 {
            diagonal_failures.push(("inequality", i));
        }
    }
    let rest = rest_entries(ap, g);
    let topology_violations =
        rest.iter().filter(|r| matches!(r.kind, RestKind::EqRow | RestKind::IneqRow)).cloned().collect();
    let mfcq = solve_kkt_oracle(ap).ok().map(|sp| mfcq_at(ap, &sp.x));
    AssumptionReport { diagonal_failures, topology_violations, rest_entries: rest, mfcq }
}

fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let tol = 1e-10 * sv.max().max(1.0);
    sv.iter().filter(|&&s| s > tol).count()
}

/// Mangasarian-Fromovitz check at a given point.
pub fn mfcq_at(ap: &AugmentedProblem, x: &[f64]) -> MfcqReport {
    let n = ap.n();
    let eqs: Vec<usize> = ap.se.iter().copied().collect();
    let ge = DMatrix::from_fn(eqs.len(), n, |r, c| ap.g_mat[(eqs[r] - 1, c)]);
    let equality_rank = rank(&ge);
    let xv = DVector::from_column_slice(x);
    let slack = &ap.a_mat * &xv - &ap.b;
    let active: Vec<usize> = ap.si.iter().copied().filter(|&i| slack[i - 1].abs() <= 1e-7).collect();

    // Null-space basis of the equality rows from the eigenvectors of G^T G.
    let basis: DMatrix<f64> = if eqs.is_empty() {
        DMatrix::identity(n, n)
    } else {
        let eig = (ge.transpose() * &ge).symmetric_eigen();
        let tol = 1e-10 * eig.eigenvalues.amax().max(1.0);
        let cols: Vec<DVector<f64>> = (0..n)
            .filter(|&k| eig.eigenvalues[k].abs() <= tol)
            .map(|k| eig.eigenvectors.column(k).into_owned())
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    };
    let rows: Vec<DVector<f64>> =
        active.iter().map(|&i| (ap.a_mat.row(i - 1) * &basis).transpose()).collect();
    let strict_direction = !origin_in_hull(&rows);
    MfcqReport { equality_rank, equality_rows: eqs.len(), active, strict_direction }
}

/// Gordan's alternative: some `q` has `r_i . q < 0` for all `i` iff the
/// origin is outside the convex hull of the `r_i`.
fn origin_in_hull(rows: &[DVector<f64>]) -> bool {
    let m = rows.len();
    if m == 0 {
        return false;
    }
    if rows[0].is_empty() {
        return true;
    }
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << m.min(16)) {
        let idx: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).collect();
        let k = idx.len();
        let mut sys = DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                sys[(a, b)] = rows[ia].dot(&rows[ib]);
            }
            sys[(a, k)] = 1.0;
            sys[(k, a)] = 1.0;
        }
        rhs[k] = 1.0;
        let sol = lstsq(&sys, &rhs);
        let lam = sol.rows(0, k);
        if lam.iter().any(|&l| l < -1e-12) || (lam.sum() - 1.0).abs() > 1e-9 {
            continue;
        }
        let mut p = DVector::zeros(rows[0].len());
        for (a, &ia) in idx.iter().enumerate() {
            p += &rows[ia] * lam[a];
        }
        best = best.min(p.norm());
    }
    best <= 1e-9
}

#[cfg(test)]
pub(crate) use tests::example as example_problem;

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example() -> Problem {
        let objectives = (1..=5).map(|i| Objective::quadratic(1.0, i as f64)).collect();
        let mut eq = BTreeMap::new();
        eq.insert(2, ConstraintRow { row: vec![0.0, 1.0, -1.0, 0.0, 0.0], rhs: 1.0 });
        eq.insert(5, ConstraintRow { row: vec![0.0, -1.0, 0.0, 0.0, 1.0], rhs: 7.0 });
        let mut ineq = BTreeMap::new();
        ineq.insert(1, ConstraintRow { row: vec![1.0, -1.0, 0.0, 0.0, 0.0], rhs: -10.0 });
        ineq.insert(4, ConstraintRow { row: vec![0.0, 0.0, 1.0, 1.0, 0.0], rhs: -3.0 });
        Problem::new(objectives, eq, ineq).unwrap()
    }

    #[test]
    fn augment_matches_printed_matrices() {
        let ap = augment(&example(), 3.0).unwrap();
        assert_eq!(ap.g_mat.row(1).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0, -1.0, 0.0, 0.0]);
        assert_eq!(ap.g_mat.row(4).iter().copied().collect::<Vec<_>>(), vec![0.0, -1.0, 0.0, 0.0, 1.0]);
        assert_eq!(ap.g.as_slice(), &[0.0, 1.0, 0.0, 0.0, 7.0]);
        assert_eq!(ap.b.as_slice(), &[-10.0, 3.0, 3.0, -3.0, 3.0]);
        assert_eq!(ap.a_mat.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, -1.0, 0.0, 0.0, 0.0]);
        assert_eq!(ap.a_mat.row(3).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0, 1.0, 1.0, 0.0]);
        for r in [0, 2, 3] {
            assert!(ap.g_mat.row(r).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn augment_edge_cases() {
        let p = Problem::unconstrained(vec![Objective::quadratic(1.0, 0.0); 3]).unwrap();
        let ap = augment(&p, 1.0).unwrap();
        assert!(ap.g_mat.iter().all(|&v| v == 0.0) && ap.a_mat.iter().all(|&v| v == 0.0));
        assert_eq!(ap.b.as_slice(), &[1.0; 3]);
        assert_eq!(augment(&p, 0.0).unwrap_err(), ProblemError::BadK(0.0));
        let mut eq = BTreeMap::new();
        eq.insert(1, ConstraintRow { row: vec![0.0, 1.0, 0.0], rhs: 0.0 });
        let bad = Problem::new(vec![Objective::quadratic(1.0, 0.0); 3], eq, BTreeMap::new()).unwrap();
        assert_eq!(augment(&bad, 1.0).unwrap_err(), ProblemError::ZeroDiagonal { kind: "equality", agent: 1 });
    }

    #[test]
    fn oracle_reproduces_example_optimum() {
        let ap = augment(&example(), 3.0).unwrap();
        let sp = solve_kkt_oracle(&ap).unwrap();
        let want = [-8.2, 1.8, 0.8, -3.8, 8.8];
        for (a, b) in sp.x.iter().zip(want) {
            assert!((a - b).abs() <= 1e-9, "{:?}", sp.x);
        }
        // duals by hand: 2(x - c) + G^T nu + A^T mu = 0 on the active set {1, 4}
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
        assert!(close(sp.mu[0], 18.4) && close(sp.nu[1], 11.2) && close(sp.mu[3], 15.6) && close(sp.nu[4], -7.6));
        for i in [0, 2, 3] {
            assert_eq!(sp.nu[i], 0.0);
        }
        for i in [1, 2, 4] {
            assert_eq!(sp.mu[i], 0.0);
        }
        assert_eq!(sp.active, vec![1, 4]);
        assert!(ap.stationarity_residual(&sp) <= 1e-9);
    }

    #[test]
    fn oracle_unconstrained_and_infeasible() {
        let p = Problem::unconstrained((1..=5).map(|i| Objective::quadratic(1.0, i as f64)).collect()).unwrap();
        let sp = solve_kkt_oracle(&augment(&p, 1.0).unwrap()).unwrap();
        assert_eq!(sp.x, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let mut eq = BTreeMap::new();
        eq.insert(1, ConstraintRow { row: vec![1.0, 1.0], rhs: 0.0 });
        eq.insert(2, ConstraintRow { row: vec![1.0, 1.0], rhs: 1.0 });
        let p = Problem::new(vec![Objective::quadratic(1.0, 0.0); 2], eq, BTreeMap::new()).unwrap();
        assert_eq!(solve_kkt_oracle(&augment(&p, 1.0).unwrap()), Err(ProblemError::Infeasible));
        let p = Problem::unconstrained(vec![Objective::custom(|x| (x * x, 2.0 * x))]).unwrap();
        assert_eq!(solve_kkt_oracle(&augment(&p, 1.0).unwrap()), Err(ProblemError::NonQuadratic(1)));
    }

    #[test]
    fn lagrangian_values() {
        let ap = augment(&example(), 3.0).unwrap();
        let z = vec![0.0; 5];
        let l = ap.lagrangian(&[-8.2, 1.8, 0.8, -3.8, 8.8], &z, &z).unwrap();
        assert!((l - 164.8).abs() < 1e-9);
        assert!((ap.lagrangian(&z, &z, &z).unwrap() - 55.0).abs() < 1e-12);
        assert!(ap.lagrangian(&z, &z, &[0.0; 4]).is_err());
    }

    #[test]
    fn assumptions_on_both_graphs() {
        let ap = augment(&example(), 1.0).unwrap();
        let ga = DiGraph::new(5, &[(1, 2), (1, 5), (2, 3), (3, 1), (4, 3), (5, 4), (5, 2)]).unwrap();
        let gb = DiGraph::new(5, &[(1, 2), (1, 5), (2, 3), (3, 1), (4, 3), (5, 4)]).unwrap();
        let ra = check_assumptions(&ap, &ga);
        assert!(ra.all_hold(), "{ra:?}");
        assert_eq!(ra.rest_entries.len(), 4);
        let rb = check_assumptions(&ap, &gb);
        assert_eq!(
            rb.topology_violations,
            vec![RestEntry { kind: RestKind::EqRow, i: 5, j: 2, coeff: -1.0 }]
        );
        assert_eq!(rb.rest_entries.len(), 5);
    }

    #[test]
    fn mfcq_flags_duplicate_equalities() {
        let row = ConstraintRow { row: vec![1.0, 1.0], rhs: 1.0 };
        let mut eq = BTreeMap::new();
        eq.insert(1, row.clone());
        eq.insert(2, row);
        let p = Problem::new(vec![Objective::quadratic(1.0, 0.0); 2], eq, BTreeMap::new()).unwrap();
        let ap = augment(&p, 1.0).unwrap();
        let g = DiGraph::new(2, &[(1, 2), (2, 1)]).unwrap();
        let rep = check_assumptions(&ap, &g);
        let m = rep.mfcq.unwrap();
        assert_eq!((m.equality_rank, m.equality_rows), (1, 2));
        assert!(!m.holds());
    }

    #[test]
    fn mfcq_strict_direction() {
        // x1 <= 0 and x2 - x1 <= 0 active at the origin: q = (-1, -2) works
        let mut ineq = BTreeMap::new();
        ineq.insert(1, ConstraintRow { row: vec![1.0, 0.0], rhs: 0.0 });
        ineq.insert(2, ConstraintRow { row: vec![-1.0, 1.0], rhs: 0.0 });
        let p = Problem::new(vec![Objective::quadratic(1.0, 0.0); 2], BTreeMap::new(), ineq.clone()).unwrap();
        assert!(mfcq_at(&augment(&p, 1.0).unwrap(), &[0.0, 0.0]).strict_direction);
        // pinning x2 = 0 leaves x1 <= 0 and -x1 <= 0, which have no strict direction
        let mut eq = BTreeMap::new();
        eq.insert(2, ConstraintRow { row: vec![0.0, 1.0], rhs: 0.0 });
        let p = Problem::new(vec![Objective::quadratic(1.0, 0.0); 2], eq, ineq).unwrap();
        let m = mfcq_at(&augment(&p, 1.0).unwrap(), &[0.0, 0.0]);
        assert_eq!(m.active, vec![1, 2]);
        assert!(!m.strict_direction);
    }
}
