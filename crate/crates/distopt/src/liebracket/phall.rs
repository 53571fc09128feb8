use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::bracket::Bracket;
use super::field::Gen;
use super::LieError;

pub type Combo = BTreeMap<Bracket, i64>;

/// Hall condition on the tree alone (PH4), ignoring generator membership.
pub fn is_hall(b: &Bracket) -> bool {
    match b.children() {
        None => true,
        Some((l, r)) => {
            is_hall(l)
                && is_hall(r)
                && l < r
                && match r.children() {
                    None => true,
                    Some((rl, _)) => rl <= l,
                }
        }
    }
}

/// Which P. Hall condition an element breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhViolation {
    /// Leaf outside the generator set.
    Ph1(Gen),
    /// Generators not strictly increasing in the index order.
    Ph2,
    /// A lower-degree element listed after a higher-degree one.
    Ph3,
    /// Composite element with unordered factors or a bad right factor.
    Ph4(String),
}

/// Generators with an implicitly defined Hall set, optionally enumerated up to a degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PHallBasis {
    generators: Vec<Gen>,
    gen_set: BTreeSet<Gen>,
    elements: Vec<Bracket>,
    max_degree: usize,
}

impl PHallBasis {
    /// Basis over `gens` with only the degree-1 elements listed; membership of
    /// higher elements is decided structurally.
    pub fn over<I: IntoIterator<Item = Gen>>(gens: I) -> Self {
        let gen_set: BTreeSet<Gen> = gens.into_iter().collect();
        let generators: Vec<Gen> = gen_set.iter().copied().collect();
        let elements = generators.iter().map(|&g| Bracket::leaf(g)).collect();
        PHallBasis { generators, gen_set, elements, max_degree: 1 }
    }

    pub fn generators(&self) -> &[Gen] {
        &self.generators
    }

    pub fn elements(&self) -> &[Bracket] {
        &self.elements
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn has_generator(&self, g: Gen) -> bool {
        self.gen_set.contains(&g)
    }

    pub fn contains(&self, b: &Bracket) -> bool {
        self.check_element(b).is_ok()
    }

    pub fn check_element(&self, b: &Bracket) -> Result<(), PhViolation> {
        if let Some(g) = b.leaves().into_iter().find(|g| !self.has_generator(*g)) {
            return Err(PhViolation::Ph1(g));
        }
        if is_hall(b) {
            Ok(())
        } else {
            Err(PhViolation::Ph4(b.to_string()))
        }
    }

    /// Structural check of the whole listing.
    pub fn validate(&self) -> Result<(), PhViolation> {
        if self.generators.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PhViolation::Ph2);
        }
        if self.elements.windows(2).any(|w| w[0].degree() > w[1].degree()) {
            return Err(PhViolation::Ph3);
        }
        for g in &self.generators {
            if !self.elements.contains(&Bracket::leaf(*g)) {
                return Err(PhViolation::Ph1(*g));
            }
        }
        let listed: BTreeSet<&Bracket> = self.elements.iter().collect();
        for b in &self.elements {
            self.check_element(b)?;
            if let Some((l, r)) = b.children() {
                if !listed.contains(l) || !listed.contains(r) {
                    return Err(PhViolation::Ph4(format!("factor of {b} not listed")));
                }
            }
        }
        Ok(())
    }

    /// Expresses `b` in this basis.
    pub fn project(&self, b: &Bracket) -> Result<Vec<(i64, Bracket)>, LieError> {
        if let Some(g) = b.leaves().into_iter().find(|g| !self.has_generator(*g)) {
            return Err(LieError::LeafOutsideBasis(g));
        }
        Ok(to_list(Projector::default().project(b)))
    }
}

/// Enumerates the Hall set on `gens` up to `max_degree`.
///
/// With `caps`, every element's multidegree is bounded per generator; a generator
/// missing from `caps` may not appear at all above degree 1.
pub fn build_phall(gens: &[Gen], max_degree: usize, caps: Option<&BTreeMap<Gen, usize>>) -> PHallBasis {
    let mut basis = PHallBasis::over(gens.iter().copied());
    let within = |b: &Bracket| match caps {
        None => true,
        Some(c) => b.multidegree().iter().all(|(g, k)| c.get(g).is_some_and(|cap| k <= cap)),
    };
    let mut by_degree: Vec<Vec<Bracket>> = vec![Vec::new(); max_degree.max(1) + 1];
    by_degree[1] = basis.elements.clone();
    for d in 2..=max_degree {
        let mut level = Vec::new();
        for dl in 1..d {
            let dr = d - dl;
            for l in &by_degree[dl] {
                for r in &by_degree[dr] {
                    if l >= r {
                        continue;
                    }
                    if let Some((rl, _)) = r.children() {
                        if rl > l {
                            continue;
                        }
                    }
                    let b = Bracket::node(l.clone(), r.clone());
                    if within(&b) {
                        level.push(b);
                    }
                }
            }
        }
        level.sort();
        by_degree[d] = level;
    }
    basis.elements = by_degree.into_iter().skip(1).flatten().collect();
    basis.max_degree = max_degree;
    basis
}

fn to_list(c: Combo) -> Vec<(i64, Bracket)> {
    c.into_iter().filter(|(_, v)| *v != 0).map(|(b, v)| (v, b)).collect()
}

fn add_into(acc: &mut Combo, c: &Combo, k: i64) {
    for (b, v) in c {
        let e = acc.entry(b.clone()).or_insert(0);
        *e += k * v;
        if *e == 0 {
            acc.remove(b);
        }
    }
}

/// Skew-symmetry and Jacobi rewriting into Hall elements, memoized per pair.
#[derive(Default)]
pub struct Projector {
    memo: HashMap<(Bracket, Bracket), Combo>,
}

impl Projector {
    pub fn project(&mut self, b: &Bracket) -> Combo {
        match b.children() {
            None => Combo::from([(b.clone(), 1)]),
            Some((l, r)) => {
                let pl = self.project(l);
                let pr = self.project(r);
                let mut out = Combo::new();
                for (x, cx) in &pl {
                    for (y, cy) in &pr {
                        let c = self.bracket(x, y);
                        add_into(&mut out, &c, cx * cy);
                    }
                }
                out
            }
        }
    }

    /// `[h, k]` for Hall elements `h`, `k`.
    pub fn bracket(&mut self, h: &Bracket, k: &Bracket) -> Combo {
        if h == k {
            return Combo::new();
        }
        let key = (h.clone(), k.clone());
        if let Some(c) = self.memo.get(&key) {
            return c.clone();
        }
        let out = if k < h {
            let mut c = Combo::new();
            let sw = self.bracket(k, h);
            add_into(&mut c, &sw, -1);
            c
        } else {
            match k.children() {
                Some((k1, k2)) if k1 > h => {
                    // [h,[k1,k2]] = [[h,k1],k2] + [k1,[h,k2]]
                    let (k1, k2) = (k1.clone(), k2.clone());
                    let mut c = Combo::new();
                    for (x, cx) in self.bracket(h, &k1) {
                        let t = self.bracket(&x, &k2);
                        add_into(&mut c, &t, cx);
                    }
                    for (y, cy) in self.bracket(h, &k2) {
                        let t = self.bracket(&k1, &y);
                        add_into(&mut c, &t, cy);
                    }
                    c
                }
                _ => Combo::from([(Bracket::node(h.clone(), k.clone()), 1)]),
            }
        };
        self.memo.insert(key, out.clone());
        out
    }
}

/// Closed-form projection for degree 2 and for degree 3 with distinct leaves.
/// Returns `None` outside those cases.
pub fn project_low_degree(b: &Bracket) -> Option<Vec<(i64, Bracket)>> {
    match b.degree() {
        1 => Some(vec![(1, b.clone())]),
        2 => {
            let (l, r) = b.children()?;
            Some(match l.cmp(r) {
                std::cmp::Ordering::Equal => vec![],
                std::cmp::Ordering::Less => vec![(1, b.clone())],
                std::cmp::Ordering::Greater => vec![(-1, Bracket::node(r.clone(), l.clone()))],
            })
        }
        3 => {
            let (l, r) = b.children()?;
            // [[x,y],z] = -[z,[x,y]]
            let (sign, a, inner) = if l.is_leaf() { (1, l, r) } else { (-1, r, l) };
            let (x, y) = inner.children()?;
            let distinct: BTreeSet<&Bracket> = [a, x, y].into_iter().collect();
            if distinct.len() < 3 {
                return None;
            }
            let (s2, b1, c1) = if x < y { (sign, x, y) } else { (-sign, y, x) };
            if b1 < a {
                Some(vec![(s2, Bracket::node(a.clone(), Bracket::node(b1.clone(), c1.clone())))])
            } else {
                // a is minimal: [a,[b,c]] = [b,[a,c]] - [c,[a,b]]
                let mut out = vec![
                    (s2, Bracket::node(b1.clone(), Bracket::node(a.clone(), c1.clone()))),
                    (-s2, Bracket::node(c1.clone(), Bracket::node(a.clone(), b1.clone()))),
                ];
                out.sort_by(|p, q| p.1.cmp(&q.1));
                Some(out)
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(k: usize) -> Gen {
        Gen::new(k, k)
    }

    fn lf(k: usize) -> Bracket {
        Bracket::leaf(phi(k))
    }

    fn nd(l: Bracket, r: Bracket) -> Bracket {
        Bracket::node(l, r)
    }

    #[test]
    fn two_generators() {
        let b = build_phall(&[phi(1), phi(2)], 2, None);
        assert_eq!(b.elements(), &[lf(1), lf(2), nd(lf(1), lf(2))]);
        assert_eq!(b.validate(), Ok(()));
    }

    #[test]
    fn three_generators_multilinear() {
        let caps = BTreeMap::from([(phi(1), 1), (phi(2), 1), (phi(3), 1)]);
        let b = build_phall(&[phi(1), phi(2), phi(3)], 3, Some(&caps));
        let deg3: Vec<_> = b.elements().iter().filter(|e| e.degree() == 3).cloned().collect();
        assert_eq!(deg3, vec![nd(lf(2), nd(lf(1), lf(3))), nd(lf(3), nd(lf(1), lf(2)))]);
        assert_eq!(b.validate(), Ok(()));
    }

    #[test]
    fn witt_dimensions() {
        // free Lie algebra on 2 generators: 2, 1, 2, 3, 6 by degree
        let b = build_phall(&[phi(1), phi(2)], 5, None);
        let count = |d| b.elements().iter().filter(|e| e.degree() == d).count();
        assert_eq!((1..=5).map(count).collect::<Vec<_>>(), vec![2, 1, 2, 3, 6]);
        assert_eq!(b.validate(), Ok(()));
    }

    #[test]
    fn projection_examples() {
        let basis = PHallBasis::over([phi(1), phi(2), phi(3)]);
        assert_eq!(basis.project(&nd(lf(2), lf(1))).unwrap(), vec![(-1, nd(lf(1), lf(2)))]);
        let got = basis.project(&nd(lf(1), nd(lf(2), lf(3)))).unwrap();
        assert_eq!(got, vec![(1, nd(lf(2), nd(lf(1), lf(3)))), (-1, nd(lf(3), nd(lf(1), lf(2))))]);
        let hall = nd(lf(3), nd(lf(1), lf(2)));
        assert_eq!(basis.project(&hall).unwrap(), vec![(1, hall)]);
        assert!(matches!(basis.project(&lf(4)), Err(LieError::LeafOutsideBasis(_))));
    }

    #[test]
    fn closed_forms_match_general() {
        let gens: Vec<Bracket> = (1..=4).map(lf).collect();
        let mut pr = Projector::default();
        for a in &gens {
            for b in &gens {
                let two = nd(a.clone(), b.clone());
                assert_eq!(project_low_degree(&two).unwrap(), to_list(pr.project(&two)));
                for c in &gens {
                    for t in [nd(a.clone(), nd(b.clone(), c.clone())), nd(nd(a.clone(), b.clone()), c.clone())] {
                        if let Some(fast) = project_low_degree(&t) {
                            assert_eq!(fast, to_list(pr.project(&t)), "{t}");
                        }
                    }
                }
            }
        }
    }
}
