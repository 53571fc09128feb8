use std::collections::{BTreeMap, BTreeSet};

use super::bracket::Bracket;
use super::field::Gen;
use super::phall::{is_hall, PHallBasis};
use super::LieError;

/// Largest degree for which classes are enumerated.
pub const MAX_CLASS_DEGREE: usize = 10;

/// True if the leaves, read as undirected edges `i - j`, touch one connected index set.
pub fn connected_leaves(leaves: &[Gen]) -> bool {
    if leaves.len() <= 1 {
        return true;
    }
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let up = *p.entry(x).or_insert(x);
        if up == x {
            return x;
        }
        let r = find(p, up);
        p.insert(x, r);
        r
    }
    for g in leaves {
        let a = find(&mut parent, g.i);
        let b = find(&mut parent, g.j);
        parent.insert(a, b);
    }
    let keys: Vec<usize> = parent.keys().copied().collect();
    let roots: BTreeSet<usize> = keys.into_iter().map(|k| find(&mut parent, k)).collect();
    roots.len() == 1
}

/// Hall elements over exactly the leaf set `gens` (each used once) with nonzero evaluation.
///
/// With `prefilter`, subtrees whose leaves are not connected are skipped before
/// evaluation; they always evaluate to zero, so the output is unchanged.
pub fn multilinear_class(gens: &[Gen], prefilter: bool) -> Result<Vec<Bracket>, LieError> {
    let d = gens.len();
    if d > MAX_CLASS_DEGREE {
        return Err(LieError::Capacity { degree: d, max: MAX_CLASS_DEGREE });
    }
    let distinct: BTreeSet<Gen> = gens.iter().copied().collect();
    if distinct.len() != d {
        return Err(LieError::Precondition("class leaves must be distinct generators".into()));
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let full = (1usize << d) - 1;
    let mut trees: Vec<Vec<Bracket>> = vec![Vec::new(); full + 1];
    let mut masks: Vec<usize> = (1..=full).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let leaves: Vec<Gen> = (0..d).filter(|k| mask >> k & 1 == 1).map(|k| gens[k]).collect();
        if leaves.len() == 1 {
            trees[mask] = vec![Bracket::leaf(leaves[0])];
            continue;
        }
        if prefilter && !connected_leaves(&leaves) {
            continue;
        }
        let mut out = Vec::new();
        // every ordered split into (left, right) sub-masks
        let mut a = (mask - 1) & mask;
        while a > 0 {
            let b = mask ^ a;
            for l in &trees[a] {
                for r in &trees[b] {
                    if l >= r {
                        continue;
                    }
                    if let Some((rl, _)) = r.children() {
                        if rl > l {
                            continue;
                        }
                    }
                    let t = Bracket::node(l.clone(), r.clone());
                    if !t.eval().is_zero() {
                        out.push(t);
                    }
                }
            }
            a = (a - 1) & mask;
        }
        out.sort();
        trees[mask] = out;
    }
    Ok(std::mem::take(&mut trees[full]))
}

/// Reduced equivalence class of `b`: basis elements sharing its multidegree
/// and evaluating to a nonzero field.
pub fn equivalence_class(b: &Bracket, basis: &PHallBasis) -> Result<Vec<Bracket>, LieError> {
    if let Some(g) = b.leaves().into_iter().find(|g| !basis.has_generator(*g)) {
        return Err(LieError::LeafOutsideBasis(g));
    }
    if !is_hall(b) {
        return Err(LieError::Precondition(format!("{b} is not a Hall element")));
    }
    let mut leaves = b.leaves();
    leaves.sort();
    multilinear_class(&leaves, true)
}

/// Generators `h_{m+1,m}` for `m = 1..=d`: the leaves of a chain bracket of degree `d`.
pub fn chain_generators(d: usize) -> Vec<Gen> {
    (1..=d).map(|m| Gen::new(m + 1, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_class_sizes() {
        let sizes: Vec<usize> = (2..=8).map(|d| multilinear_class(&chain_generators(d), true).unwrap().len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 3, 5, 9, 16]);
    }

    #[test]
    fn members_evaluate_to_single_fields() {
        for d in 2..=6 {
            for b in multilinear_class(&chain_generators(d), true).unwrap() {
                let (r, c, v) = b.eval().single_entry().unwrap();
                assert_eq!((r, c), (1, d + 1));
                assert_eq!(v.abs(), 1);
            }
        }
    }

    #[test]
    fn prefilter_agrees_with_evaluation() {
        let gens = vec![Gen::new(2, 1), Gen::new(3, 2), Gen::new(1, 4), Gen::new(5, 3)];
        assert_eq!(multilinear_class(&gens, true).unwrap(), multilinear_class(&gens, false).unwrap());
    }

    #[test]
    fn capacity_and_duplicates() {
        assert!(matches!(multilinear_class(&chain_generators(11), true), Err(LieError::Capacity { .. })));
        let g = Gen::new(1, 2);
        assert!(multilinear_class(&[g, g], true).is_err());
    }

    #[test]
    fn connectivity_predicate() {
        assert!(connected_leaves(&[Gen::new(1, 2), Gen::new(3, 2)]));
        assert!(!connected_leaves(&[Gen::new(1, 2), Gen::new(3, 4)]));
    }
}
