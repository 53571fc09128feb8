use std::collections::BTreeMap;

use proptest::prelude::*;

use distopt::cli::fmt17;
use distopt::digraph::DiGraph;
use distopt::liebracket::{admissible_fields, rec_bracket, Bracket, Gen, IntMatrix, PHallBasis};
use distopt::problem::{augment, solve_kkt_oracle, ConstraintRow, Objective, Problem};
use distopt::sim::{integrate, sup_error, FnRhs, Trajectory};
use distopt::synthesis::{check_independent, check_minimally_canceling, Omega};

fn graph(n: usize, ring: &[usize], chords: &[(usize, usize)]) -> DiGraph {
    let mut edges: Vec<(usize, usize)> = (0..n).map(|k| (ring[k], ring[(k + 1) % n])).collect();
    for &(a, b) in chords {
        let (a, b) = (a % n + 1, b % n + 1);
        if a != b && !edges.contains(&(a, b)) {
            edges.push((a, b));
        }
    }
    DiGraph::new(n, &edges).unwrap()
}

fn ring_graph() -> impl Strategy<Value = DiGraph> {
    (3usize..=8).prop_flat_map(|n| {
        (Just((1..=n).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec((0..n, 0..n), 0..n))
            .prop_map(move |(ring, chords)| graph(n, &ring, &chords))
    })
}

fn plus(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.sub(&b.scaled(-1))
}

fn gen_strategy(dim: usize) -> impl Strategy<Value = Gen> {
    (1..=dim, 1..=dim).prop_map(|(i, j)| Gen::new(i, j))
}

fn bracket_strategy(gens: Vec<Gen>) -> impl Strategy<Value = Bracket> {
    let leaf = prop::sample::select(gens).prop_map(Bracket::leaf);
    leaf.prop_recursive(4, 16, 2, |inner| (inner.clone(), inner).prop_map(|(l, r)| Bracket::node(l, r)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rec_bracket_hits_its_target(g in ring_graph(), i in 1usize..=8, j in 1usize..=8, a in 0usize..3, b in 0usize..3) {
        let n = g.n();
        let (i, j) = ((i - 1) % n + 1, (j - 1) % n + 1);
        prop_assume!(i != j);
        let p = g.shortest_path(i, j).unwrap();
        let (k1, k2) = (p.tail() + a * n, p.head() + b * n);
        let br = rec_bracket(&p, k1, k2, n).unwrap();
        prop_assert_eq!(br.eval(), Gen::new(k1, k2).matrix());
        prop_assert_eq!(br.degree(), p.len());
        let adm = admissible_fields(&g, n);
        prop_assert!(br.leaves().iter().all(|l| adm.contains(l)));
    }

    #[test]
    fn antisymmetry_and_jacobi(x in gen_strategy(5), y in gen_strategy(5), z in gen_strategy(5)) {
        let (x, y, z) = (Bracket::leaf(x), Bracket::leaf(y), Bracket::leaf(z));
        let br = |a: &Bracket, b: &Bracket| Bracket::node(a.clone(), b.clone());
        prop_assert!(plus(&br(&x, &y).eval(), &br(&y, &x).eval()).is_zero());
        let j = plus(&plus(&br(&x, &br(&y, &z)).eval(), &br(&y, &br(&z, &x)).eval()), &br(&z, &br(&x, &y)).eval());
        prop_assert!(j.is_zero());
    }

    #[test]
    fn projection_preserves_evaluation(b in bracket_strategy(vec![
        Gen::new(1, 2), Gen::new(2, 3), Gen::new(3, 1), Gen::new(2, 1), Gen::new(4, 2), Gen::new(3, 4),
    ])) {
        let mut gens = b.leaves();
        gens.sort();
        gens.dedup();
        let basis = PHallBasis::over(gens);
        let proj = basis.project(&b).unwrap();
        let mut sum = IntMatrix::zero();
        for (c, e) in &proj {
            prop_assert!(basis.check_element(e).is_ok(), "{} not Hall", e);
            prop_assert_eq!(e.multidegree(), b.multidegree());
            sum = plus(&sum, &e.eval().scaled(*c));
        }
        prop_assert_eq!(sum, b.eval());
    }

    #[test]
    fn cancellation_witness_is_a_relation(v in prop::collection::vec(-12i64..=12, 2..5)) {
        prop_assume!(v.iter().all(|&k| k != 0));
        let mut set: Vec<Omega> = v.iter().map(|&k| Omega::int(k)).collect();
        let last = v.iter().sum::<i64>();
        prop_assume!(last != 0);
        set.push(Omega::int(-last));
        let cert = check_minimally_canceling(&set);
        if let Some(y) = cert.witness {
            let s = y.iter().zip(&set).fold(Omega::zero(), |acc, (c, w)| {
                (0..c.abs()).fold(acc, |a, _| if *c > 0 { a.add(w) } else { a.add(&w.neg()) })
            });
            prop_assert!(s.is_zero());
            prop_assert!(!cert.holds);
        }
    }

    #[test]
    fn disjoint_radicals_are_independent(c in prop::collection::vec(1i64..1000, 4)) {
        // each set lives on its own pair of radicals
        let w = |r: u32, a: i64, b: i64| vec![Omega::radical(r, a), Omega::radical(r, b), Omega::radical(r, -a - b)];
        let sets = vec![w(2, c[0], c[1]), w(3, c[2], c[3])];
        prop_assert!(check_independent(&sets, 14).unwrap().holds);
    }

    #[test]
    fn seventeen_digits_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn sup_error_of_constant_offset(d in -5.0f64..5.0, k in 0usize..3) {
        let a = Trajectory { times: vec![0.0, 0.5, 1.0], states: vec![vec![1.0, 2.0, 3.0]; 3], dt: 0.5, sigma: None, label: "a".into() };
        let mut b = a.clone();
        for s in &mut b.states {
            s[k] += d;
        }
        prop_assert!((sup_error(&a, &b).unwrap() - d.abs()).abs() < 1e-15);
    }

    #[test]
    fn oracle_satisfies_kkt(
        c in prop::collection::vec(-5.0f64..5.0, 4),
        a in prop::collection::vec(0.5f64..3.0, 4),
        r in prop::collection::vec(-2i32..=2, 8),
        rhs in prop::collection::vec(-3.0f64..3.0, 2),
    ) {
        let objectives = (0..4).map(|i| Objective::quadratic(a[i], c[i])).collect();
        let mut row1: Vec<f64> = r[..4].iter().map(|&x| x as f64).collect();
        row1[0] = 1.0;
        let mut row2: Vec<f64> = r[4..].iter().map(|&x| x as f64).collect();
        row2[2] = -1.0;
        let eq = BTreeMap::from([(1, ConstraintRow { row: row1, rhs: rhs[0] })]);
        let ineq = BTreeMap::from([(3, ConstraintRow { row: row2, rhs: rhs[1] })]);
        let ap = augment(&Problem::new(objectives, eq, ineq).unwrap(), 1.0).unwrap();
        let sp = solve_kkt_oracle(&ap);
        prop_assume!(sp.is_ok());
        let sp = sp.unwrap();
        prop_assert!(ap.stationarity_residual(&sp) <= 1e-9);
        let x = nalgebra::DVector::from_column_slice(&sp.x);
        let s = &ap.a_mat * &x - &ap.b;
        for k in 0..4 {
            prop_assert!(sp.mu[k] >= 0.0);
            prop_assert!(s[k] <= 1e-9);
            prop_assert!((sp.mu[k] * s[k]).abs() <= 1e-9);
        }
        prop_assert!(((&ap.g_mat * &x - &ap.g)[0]).abs() <= 1e-9);
        // saddle inequality at perturbed points
        let l_star = ap.lagrangian(&sp.x, &sp.nu, &sp.mu).unwrap();
        let xp: Vec<f64> = sp.x.iter().zip(&c).map(|(v, d)| v + 0.3 * d).collect();
        let mup: Vec<f64> = sp.mu.iter().map(|m| m + 0.7).collect();
        prop_assert!(ap.lagrangian(&sp.x, &c, &mup).unwrap() <= l_star + 1e-9);
        prop_assert!(l_star <= ap.lagrangian(&xp, &sp.nu, &sp.mu).unwrap() + 1e-9);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let rhs = FnRhs { dim: 2, f: |_t: f64, z: &[f64], o: &mut [f64]| {
        o[0] = z[1];
        o[1] = -z[0];
    } };
    let err = |dt: f64| {
        let tr = integrate(&rhs, &[1.0, 0.0], 2.0, dt, 1).unwrap();
        (tr.final_state()[0] - 2f64.cos()).abs()
    };
    let ratio = err(0.1) / err(0.05);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}
