//! Oscillatory inputs whose averaged effect reproduces the bracket terms of an
//! [`ExtendedSystem`].

mod coeffs;
mod omega;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liebracket::{equivalence_class, Bracket, ExtendedSystem, Gen, LieError};

pub use coeffs::{condition, eta_degree2, eta_higher, explicit_degree2, explicit_degree3, g_hat, xi_matrix};
pub use omega::{
    check_independent, check_minimally_canceling, nth_prime, Certificate, Omega, DEFAULT_INDEPENDENCE_BOUND, DENOM,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error("frequency search failed after {attempts} attempts: {reason}")]
    FrequencySearch { attempts: usize, reason: String },
    #[error("Xi matrix ill-conditioned (cond {cond:e})")]
    SingularXi { cond: f64 },
    #[error("independence search needs |y| up to {total}, above the bound {bound}")]
    Capacity { total: usize, bound: usize },
    #[error("partial frequency sum of {0} vanishes")]
    ZeroPartialSum(String),
    #[error("beta must be finite and nonzero, got {0}")]
    BadBeta(f64),
    #[error("unsupported class degree {0}")]
    Degree(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("frequency override rejected: {0}")]
    BadOverride(String),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Brackets sharing one multidegree, with the coefficient each must be excited with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSpec {
    /// Involved generators in basis order.
    pub generators: Vec<Gen>,
    /// Reduced class.
    pub members: Vec<Bracket>,
    /// Target coefficient per member; zero for members absent from the terms.
    pub v: Vec<f64>,
}

impl ClassSpec {
    /// Class containing the single bracket `b` with coefficient `v`.
    pub fn single(b: &Bracket, v: f64) -> Result<Self, SynthesisError> {
        let mut generators = b.leaves();
        generators.sort();
        let basis = crate::liebracket::PHallBasis::over(generators.iter().copied());
        let members = equivalence_class(b, &basis)?;
        let pos = members
            .iter()
            .position(|m| m == b)
            .ok_or_else(|| SynthesisError::Shape(format!("{b} evaluates to zero")))?;
        let mut vs = vec![0.0; members.len()];
        vs[pos] = v;
        Ok(ClassSpec { generators, members, v: vs })
    }

    pub fn degree(&self) -> usize {
        self.generators.len()
    }
}

/// Groups the terms of `ext` into reduced equivalence classes.
pub fn collect_classes(ext: &ExtendedSystem) -> Result<Vec<ClassSpec>, SynthesisError> {
    let mut groups: BTreeMap<Vec<Gen>, Vec<(Bracket, f64)>> = BTreeMap::new();
    for t in &ext.terms {
        let mut key = t.bracket.leaves();
        key.sort();
        groups.entry(key).or_default().push((t.bracket.clone(), t.v));
    }
    let mut out = Vec::new();
    for (generators, terms) in groups {
        let members = equivalence_class(&terms[0].0, &ext.basis)?;
        let mut v = vec![0.0; members.len()];
        for (b, c) in terms {
            let pos = members
                .iter()
                .position(|m| *m == b)
                .ok_or_else(|| SynthesisError::Shape(format!("{b} missing from its class")))?;
            v[pos] += c;
        }
        out.push(ClassSpec { generators, members, v });
    }
    // lower degree first, then basis order
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.generators.cmp(&b.generators)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    /// Bounds on `|omega|` before the `sigma` scaling.
    pub freq_range: (f64, f64),
    /// Factor on the amplitude of channels that drive primal states.
    pub beta_primal: f64,
    pub max_attempts: usize,
    pub independence_bound: usize,
    /// Smallest allowed `|w_a + w_b|` over pairs that do not cancel exactly.
    pub min_gap: f64,
    /// Magnitudes are drawn from `[max(lo, hi / max_ratio), hi]`; small
    /// frequencies inflate the ripple of the inputs.
    pub max_ratio: f64,
    pub cond_limit: f64,
    pub max_redraws: usize,
    /// Verified assignments to draw before keeping the one with the smallest
    /// [`ripple_score`].
    pub candidates: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            freq_range: (2.0, 70.0),
            beta_primal: 1.0,
            max_attempts: 10_000,
            independence_bound: DEFAULT_INDEPENDENCE_BOUND,
            min_gap: 0.5,
            max_ratio: 2.5,
            cond_limit: 1e12,
            max_redraws: 50,
            candidates: 8,
        }
    }
}

/// Frequencies of one class: `sets[rho][k]` belongs to `generators[k]`.
/// A degree-2 class has the single set `{w, -w}` and both channels run at `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFrequencies {
    pub generators: Vec<Gen>,
    pub sets: Vec<Vec<Omega>>,
}

impl ClassFrequencies {
    fn values(&self) -> Vec<Vec<f64>> {
        self.sets.iter().map(|s| s.iter().map(Omega::value).collect()).collect()
    }

    /// The set entering the independence check.
    fn symmetric_sets(&self) -> Vec<Vec<Omega>> {
        if self.generators.len() == 2 {
            return self.sets.clone();
        }
        self.sets.iter().map(|s| s.iter().cloned().chain(s.iter().map(Omega::neg)).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyAssignment {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub range: (f64, f64),
    #[serde(default)]
    pub attempts: usize,
    pub classes: Vec<ClassFrequencies>,
    #[serde(default, skip_deserializing)]
    pub certificates: Vec<Certificate>,
}

impl FrequencyAssignment {
    pub fn max_abs(&self) -> f64 {
        self.classes
            .iter()
            .flat_map(|c| c.sets.iter().flatten())
            .map(|w| w.value().abs())
            .fold(0.0, f64::max)
    }
}

/// Runs both verifiers on every set, the independence check on the whole
/// collection and the pairwise gap filter. Returns the certificates and the
/// first failure, if any.
pub fn verify_frequencies(
    classes: &[ClassSpec],
    freqs: &[ClassFrequencies],
    cfg: &SynthConfig,
) -> (Vec<Certificate>, Option<String>) {
    let mut certs = Vec::new();
    let mut failure = None;
    if classes.len() != freqs.len() {
        return (certs, Some(format!("{} classes but {} frequency entries", classes.len(), freqs.len())));
    }
    for (c, f) in classes.iter().zip(freqs) {
        if c.generators != f.generators {
            return (certs, Some("frequency entry does not match class generators".into()));
        }
        let want_sets = if c.degree() == 2 { 1 } else { c.members.len() };
        if f.sets.len() != want_sets || f.sets.iter().any(|s| s.len() != c.degree()) {
            return (certs, Some(format!("class of degree {} needs {want_sets} sets", c.degree())));
        }
        for s in &f.sets {
            let mut cert = check_minimally_canceling(s);
            cert.check = format!("minimally canceling {:?}", s.iter().map(Omega::value).collect::<Vec<_>>());
            if !cert.holds && failure.is_none() {
                failure = Some(format!("{} fails ({})", cert.check, cert.method));
            }
            certs.push(cert);
        }
    }
    let collection: Vec<Vec<Omega>> = freqs.iter().flat_map(|f| f.symmetric_sets()).collect();
    match check_independent(&collection, cfg.independence_bound) {
        Ok(cert) => {
            if !cert.holds && failure.is_none() {
                failure = Some(format!("collection not independent ({})", cert.method));
            }
            certs.push(cert);
        }
        Err(e) => {
            failure.get_or_insert(e.to_string());
        }
    }
    if failure.is_none() && cfg.min_gap > 0.0 {
        let all: Vec<Omega> = collection.into_iter().flatten().collect();
        'outer: for (a, wa) in all.iter().enumerate() {
            for wb in &all[a + 1..] {
                let s = wa.add(wb);
                if !s.is_zero() && s.value().abs() < cfg.min_gap {
                    failure = Some(format!("near resonance {wa} + {wb}"));
                    break 'outer;
                }
            }
        }
    }
    for (c, f) in classes.iter().zip(freqs) {
        if c.degree() >= 3 && failure.is_none() {
            match xi_matrix(&c.members, &c.generators, &f.values()) {
                Ok(xi) => {
                    let k = condition(&xi);
                    if k > cfg.cond_limit {
                        failure = Some(format!("Xi condition {k:e}"));
                    }
                }
                Err(e) => failure = Some(e.to_string()),
            }
        }
    }
    (certs, failure)
}

fn sample_radical(rng: &mut ChaCha8Rng, prime: u32, lo: f64, hi: f64) -> Omega {
    loop {
        let mag = rng.gen_range(lo..hi);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let c = (mag / (prime as f64).sqrt() * DENOM as f64).round() as i64;
        let w = Omega::radical(prime, sign * c);
        let a = w.value().abs();
        if a >= lo && a <= hi {
            return w;
        }
    }
}

fn propose(classes: &[ClassSpec], rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec<ClassFrequencies> {
    let mut next_prime = 0;
    let mut fresh = || {
        let p = nth_prime(next_prime);
        next_prime += 1;
        p
    };
    let mut out = Vec::new();
    for c in classes {
        let n = c.degree();
        let sets = if n == 2 {
            let w = sample_radical(rng, fresh(), lo, hi);
            vec![vec![w.clone(), w.neg()]]
        } else {
            (0..c.members.len())
                .map(|_| {
                    let primes: Vec<u32> = (0..n - 1).map(|_| fresh()).collect();
                    loop {
                        let mut s: Vec<Omega> = primes.iter().map(|&p| sample_radical(rng, p, lo, hi)).collect();
                        let last = s.iter().fold(Omega::zero(), |acc, w| acc.add(w)).neg();
                        let a = last.value().abs();
                        if a >= lo && a <= hi {
                            s.push(last);
                            break s;
                        }
                    }
                })
                .collect()
        };
        out.push(ClassFrequencies { generators: c.generators.clone(), sets });
    }
    out
}

/// First-order ripple proxy `sum |eta| / |omega|` over all channels, unit beta.
/// The state deviation from the averaged system scales with it.
pub fn ripple_score(classes: &[ClassSpec], freqs: &[ClassFrequencies]) -> Result<f64, SynthesisError> {
    let mut total = 0.0;
    for (c, f) in classes.iter().zip(freqs) {
        let sets: Vec<Vec<f64>> = f.sets.iter().map(|s| s.iter().map(Omega::value).collect()).collect();
        if c.degree() == 2 {
            let w = sets[0][0];
            let (a, b) = eta_degree2(c.v[0], w, 1.0)?;
            total += (a.norm() + b.norm()) / w.abs();
        } else {
            let xi = xi_matrix(&c.members, &c.generators, &sets)?;
            let eta = eta_higher(&xi, &c.v, c.degree(), &vec![1.0; c.degree()])?;
            for (row, w) in eta.iter().zip(&sets) {
                total += row.iter().zip(w).map(|(e, w)| e.norm() / w.abs()).sum::<f64>();
            }
        }
    }
    Ok(total)
}

/// Seeded randomized search for verified frequencies.
pub fn choose_frequencies(classes: &[ClassSpec], cfg: &SynthConfig) -> Result<FrequencyAssignment, SynthesisError> {
    let (lo, hi) = cfg.freq_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(SynthesisError::FrequencySearch { attempts: 0, reason: format!("bad range [{lo}, {hi}]") });
    }
    let lo = lo.max(hi / cfg.max_ratio);
    if classes.iter().any(|c| c.degree() >= 3) && hi < 2.0 * lo {
        // three or more values summing to zero need a ratio of at least 2 somewhere
        return Err(SynthesisError::FrequencySearch { attempts: 0, reason: "range or ratio bound too tight".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut reason = String::from("no classes");
    let mut xi_failures = 0;
    let mut best: Option<(f64, FrequencyAssignment)> = None;
    let mut found = 0;
    for attempt in 1..=cfg.max_attempts {
        let freqs = propose(classes, &mut rng, lo, hi);
        let (certificates, failure) = verify_frequencies(classes, &freqs, cfg);
        match failure {
            None => {
                let score = ripple_score(classes, &freqs)?;
                if best.as_ref().is_none_or(|(s, _)| score < *s) {
                    let fa = FrequencyAssignment { seed: cfg.seed, range: cfg.freq_range, attempts: attempt, classes: freqs, certificates };
                    best = Some((score, fa));
                }
                found += 1;
                if found >= cfg.candidates.max(1) {
                    break;
                }
            }
            Some(f) => {
                if f.starts_with("Xi") {
                    xi_failures += 1;
                    if xi_failures >= cfg.max_redraws {
                        return Err(SynthesisError::SingularXi { cond: cfg.cond_limit });
                    }
                }
                reason = f;
            }
        }
    }
    match best {
        Some((_, fa)) => Ok(fa),
        None => Err(SynthesisError::FrequencySearch { attempts: cfg.max_attempts, reason }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Cos,
    Sin,
}

/// `amplitude * sigma^exponent * trig(sigma * omega * t)` on channel `gen`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub gen: Gen,
    pub amplitude: f64,
    pub omega: f64,
    pub exponent: f64,
    pub phase: Phase,
}

impl Atom {
    pub fn eval(&self, sigma: f64, t: f64) -> f64 {
        let th = sigma * self.omega * t;
        let trig = match self.phase {
            Phase::Cos => th.cos(),
            Phase::Sin => th.sin(),
        };
        self.amplitude * sigma.powf(self.exponent) * trig
    }
}

/// `2 sigma^exponent Re(eta e^{i sigma omega t})` on channel `gen`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexAtom {
    pub gen: Gen,
    pub eta: Complex64,
    pub omega: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputSynthesis {
    pub complex: Vec<ComplexAtom>,
    pub atoms: Vec<Atom>,
}

impl InputSynthesis {
    fn push_complex(&mut self, a: ComplexAtom) {
        for (amp, phase) in [(2.0 * a.eta.re, Phase::Cos), (-2.0 * a.eta.im, Phase::Sin)] {
            if amp != 0.0 {
                self.atoms.push(Atom { gen: a.gen, amplitude: amp, omega: a.omega, exponent: a.exponent, phase });
            }
        }
        self.complex.push(a);
    }

    pub fn extend(&mut self, other: InputSynthesis) {
        self.complex.extend(other.complex);
        self.atoms.extend(other.atoms);
    }

    /// Channels carrying at least one atom, in basis order.
    pub fn generators(&self) -> Vec<Gen> {
        let mut g: Vec<Gen> = self.atoms.iter().map(|a| a.gen).collect();
        g.sort();
        g.dedup();
        g
    }

    pub fn eval(&self, gen: Gen, sigma: f64, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.gen == gen).map(|a| a.eval(sigma, t)).sum()
    }

    /// Same input from the complex coefficients.
    pub fn eval_complex(&self, gen: Gen, sigma: f64, t: f64) -> f64 {
        self.complex
            .iter()
            .filter(|a| a.gen == gen)
            .map(|a| {
                let e = Complex64::from_polar(1.0, sigma * a.omega * t);
                2.0 * sigma.powf(a.exponent) * (a.eta * e).re
            })
            .sum()
    }

    pub fn max_omega(&self) -> f64 {
        self.atoms.iter().map(|a| a.omega.abs()).fold(0.0, f64::max)
    }
}

/// Per-generator beta for the primal-channel heuristic, with unit product.
fn betas(class: &ClassSpec, n: usize, beta_primal: f64) -> Vec<f64> {
    let primal: Vec<bool> = class.generators.iter().map(|g| g.j <= n).collect();
    let p = primal.iter().filter(|&&x| x).count();
    let q = primal.len() - p;
    if beta_primal == 1.0 || p == 0 || q == 0 {
        return vec![1.0; primal.len()];
    }
    let other = beta_primal.powf(-(p as f64) / q as f64);
    primal.iter().map(|&x| if x { beta_primal } else { other }).collect()
}

/// Inputs for one class from the general algorithm.
pub fn class_inputs(
    class: &ClassSpec,
    freqs: &ClassFrequencies,
    n: usize,
    beta_primal: f64,
) -> Result<InputSynthesis, SynthesisError> {
    let mut out = InputSynthesis::default();
    let d = class.degree();
    let b = betas(class, n, beta_primal);
    if d == 2 {
        let w = freqs.sets[0][0].value();
        // channel k2 carries beta, channel k1 carries 1/beta
        let beta = b[1];
        let (e1, e2) = eta_degree2(class.v[0], w, beta)?;
        for (gen, eta) in [(class.generators[0], e1), (class.generators[1], e2)] {
            if eta.norm() != 0.0 {
                out.push_complex(ComplexAtom { gen, eta, omega: w, exponent: 0.5 });
            }
        }
        return Ok(out);
    }
    if class.v.iter().all(|v| *v == 0.0) {
        return Ok(out);
    }
    let values = freqs.values();
    let xi = xi_matrix(&class.members, &class.generators, &values)?;
    let eta = eta_higher(&xi, &class.v, d, &b)?;
    let exponent = (d - 1) as f64 / d as f64;
    for (rho, row) in eta.iter().enumerate() {
        for (k, e) in row.iter().enumerate() {
            if e.norm() != 0.0 {
                out.push_complex(ComplexAtom { gen: class.generators[k], eta: *e, omega: values[rho][k], exponent });
            }
        }
    }
    Ok(out)
}

/// Closed-form inputs for a singleton class of degree 2 or 3.
pub fn explicit_low_degree(class: &ClassSpec, freqs: &ClassFrequencies, beta: f64) -> Result<InputSynthesis, SynthesisError> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(SynthesisError::BadBeta(beta));
    }
    let mut out = InputSynthesis::default();
    let b = &class.members[0];
    let w = freqs.values();
    match class.degree() {
        2 => {
            let amps = explicit_degree2(class.v[0], w[0][0], beta);
            for (k, (c, s)) in amps.into_iter().enumerate() {
                let gen = class.generators[k];
                for (amplitude, phase) in [(c, Phase::Cos), (s, Phase::Sin)] {
                    if amplitude != 0.0 {
                        out.atoms.push(Atom { gen, amplitude, omega: w[0][0], exponent: 0.5, phase });
                    }
                }
            }
        }
        3 => {
            // a degree-3 Hall element always reads [k1, [k2, k3]]
            let order = b.leaves();
            let v = class.v[0];
            let pos = |g: &Gen| class.generators.iter().position(|x| x == g).unwrap();
            let wk = [w[0][pos(&order[0])], w[0][pos(&order[1])], w[0][pos(&order[2])]];
            let amps = explicit_degree3(v, wk, beta);
            for (k, gen) in order.iter().enumerate() {
                if amps[k] != 0.0 {
                    out.atoms.push(Atom { gen: *gen, amplitude: amps[k], omega: wk[k], exponent: 2.0 / 3.0, phase: Phase::Cos });
                }
            }
        }
        d => return Err(SynthesisError::Degree(d)),
    }
    Ok(out)
}

/// Full pipeline output.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub classes: Vec<ClassSpec>,
    pub frequencies: FrequencyAssignment,
    pub inputs: InputSynthesis,
}

pub fn assemble_inputs(
    classes: &[ClassSpec],
    freqs: &FrequencyAssignment,
    n: usize,
    beta_primal: f64,
) -> Result<InputSynthesis, SynthesisError> {
    let mut out = InputSynthesis::default();
    for (c, f) in classes.iter().zip(&freqs.classes) {
        out.extend(class_inputs(c, f, n, beta_primal)?);
    }
    Ok(out)
}

pub fn synthesize(ext: &ExtendedSystem, cfg: &SynthConfig) -> Result<Synthesis, SynthesisError> {
    let classes = collect_classes(ext)?;
    let frequencies = choose_frequencies(&classes, cfg)?;
    let inputs = assemble_inputs(&classes, &frequencies, ext.n, cfg.beta_primal)?;
    Ok(Synthesis { classes, frequencies, inputs })
}

/// Uses caller-supplied frequencies after running the verifiers on them.
pub fn synthesize_with(
    ext: &ExtendedSystem,
    mut freqs: FrequencyAssignment,
    cfg: &SynthConfig,
) -> Result<Synthesis, SynthesisError> {
    let classes = collect_classes(ext)?;
    let (certs, failure) = verify_frequencies(&classes, &freqs.classes, cfg);
    if let Some(f) = failure {
        return Err(SynthesisError::BadOverride(f));
    }
    freqs.certificates = certs;
    let inputs = assemble_inputs(&classes, &freqs, ext.n, cfg.beta_primal)?;
    Ok(Synthesis { classes, frequencies: freqs, inputs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_class(v: f64) -> ClassSpec {
        ClassSpec::single(&Bracket::node(Bracket::leaf(Gen::new(1, 2)), Bracket::leaf(Gen::new(2, 3))), v).unwrap()
    }

    #[test]
    fn degree2_atom_example() {
        let c = pair_class(1.0);
        let f = ClassFrequencies { generators: c.generators.clone(), sets: vec![vec![Omega::int(1), Omega::int(-1)]] };
        let u = class_inputs(&c, &f, 10, 1.0).unwrap();
        let k1 = u.atoms.iter().find(|a| a.gen == Gen::new(1, 2)).unwrap();
        assert_eq!(k1.phase, Phase::Sin);
        assert!((k1.amplitude + 2.0 * 0.5f64.sqrt()).abs() < 1e-15);
        let ex = explicit_low_degree(&c, &f, 1.0).unwrap();
        let s2 = 2f64.sqrt();
        assert!((ex.eval(Gen::new(1, 2), 1.0, 0.3) + s2 * 0.3f64.cos()).abs() < 1e-14);
        assert!((ex.eval(Gen::new(2, 3), 1.0, 0.3) + s2 * 0.3f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn zero_v_gives_no_atoms() {
        let c = pair_class(0.0);
        let f = ClassFrequencies { generators: c.generators.clone(), sets: vec![vec![Omega::int(3), Omega::int(-3)]] };
        assert!(class_inputs(&c, &f, 10, 1.0).unwrap().atoms.is_empty());
    }

    #[test]
    fn chosen_frequencies_verify() {
        let chain: Vec<Gen> = (1..=4).map(|m| Gen::new(m + 1, m)).collect();
        let members = crate::liebracket::multilinear_class(&chain, true).unwrap();
        let classes = vec![
            pair_class(1.0),
            ClassSpec { generators: chain.clone(), members: members.clone(), v: vec![1.0, 0.0] },
        ];
        let cfg = SynthConfig { seed: 7, ..SynthConfig::default() };
        let fa = choose_frequencies(&classes, &cfg).unwrap();
        assert!(fa.certificates.iter().all(|c| c.holds));
        for s in fa.classes.iter().flat_map(|c| &c.sets) {
            assert!(s.iter().fold(Omega::zero(), |a, w| a.add(w)).is_zero());
            assert!(s.iter().all(|w| (2.0..=70.0).contains(&w.value().abs())));
        }
        let again = choose_frequencies(&classes, &cfg).unwrap();
        assert_eq!(fa, again);
    }

    #[test]
    fn beta_product_is_one() {
        let c = ClassSpec::single(
            &Bracket::node(
                Bracket::leaf(Gen::new(4, 3)),
                Bracket::node(Bracket::leaf(Gen::new(2, 1)), Bracket::leaf(Gen::new(3, 2))),
            ),
            1.0,
        )
        .unwrap();
        let b = betas(&c, 2, 0.5);
        assert!((b.iter().product::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(b[0], 0.5);
    }
}
