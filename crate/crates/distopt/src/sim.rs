//! Fixed-step RK4 integration of the centralized and the oscillatory closed loop.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::digraph::DiGraph;
use crate::liebracket::{Bracket, ExtendedSystem, Gen};
use crate::problem::AugmentedProblem;
use crate::spdyn::{agent_indices, AdmissibleSplit, SaddleDynamics};
use crate::synthesis::{InputSynthesis, Phase};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("step {dt:e} does not resolve the fastest oscillation (limit {max:e})")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("invalid integration setup: {0}")]
    Setup(String),
    #[error("trajectories cannot be compared: {0}")]
    Incompatible(String),
}

/// `z' = f(t, z)`.
pub trait Rhs: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, z: &[f64], out: &mut [f64]);
}

/// Wraps a closure.
pub struct FnRhs<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(f64, &[f64], &mut [f64]) + Sync> Rhs for FnRhs<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, t: f64, z: &[f64], out: &mut [f64]) {
        (self.f)(t, z, out)
    }
}

impl Rhs for SaddleDynamics {
    fn dim(&self) -> usize {
        SaddleDynamics::dim(self)
    }
    fn eval(&self, _t: f64, z: &[f64], out: &mut [f64]) {
        SaddleDynamics::eval(self, z, out)
    }
}

/// `z' = M z` with a sparse `M`.
#[derive(Debug, Clone)]
pub struct LinearRhs {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl LinearRhs {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0.0 {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        LinearRhs { dim: m.nrows(), entries }
    }

    /// `z' = sum v_B B(z)` on a `dim`-dimensional state.
    pub fn from_brackets(dim: usize, terms: &[(Bracket, f64)]) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for (b, v) in terms {
            for ((r, c), e) in b.eval().entries() {
                m[(r - 1, c - 1)] += v * e as f64;
            }
        }
        LinearRhs::from_matrix(&m)
    }
}

impl Rhs for LinearRhs {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, _t: f64, z: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(r, c, v) in &self.entries {
            out[r] += v * z[c];
        }
    }
}

/// Admissible drift plus a linear rest term: the extended system.
pub struct ExtendedRhs<'a> {
    split: &'a AdmissibleSplit,
    rest: LinearRhs,
}

impl<'a> ExtendedRhs<'a> {
    pub fn new(ext: &'a ExtendedSystem) -> Self {
        ExtendedRhs { split: &ext.split, rest: LinearRhs::from_matrix(&ext.bracket_matrix()) }
    }
}

impl Rhs for ExtendedRhs<'_> {
    fn dim(&self) -> usize {
        self.split.dim()
    }
    fn eval(&self, _t: f64, z: &[f64], out: &mut [f64]) {
        self.split.f_adm_into(z, out);
        for &(r, c, v) in &self.rest.entries {
            out[r] += v * z[c];
        }
    }
}

struct Channel {
    // 0-based source and target of h_{i,j}
    src: usize,
    dst: usize,
    // (amplitude * sigma^e, sigma * omega, is_sin)
    atoms: Vec<(f64, f64, bool)>,
}

/// `f_adm(z) + sum_k phi_k(z) U_k^sigma(t)`; without a drift only the input part.
pub struct OscillatoryRhs<'a> {
    dim: usize,
    drift: Option<&'a AdmissibleSplit>,
    channels: Vec<Channel>,
    omega_max: f64,
    sigma: f64,
}

impl<'a> OscillatoryRhs<'a> {
    pub fn new(dim: usize, drift: Option<&'a AdmissibleSplit>, inputs: &InputSynthesis, sigma: f64) -> Self {
        let mut channels: Vec<Channel> = Vec::new();
        for g in inputs.generators() {
            let atoms = inputs
                .atoms
                .iter()
                .filter(|a| a.gen == g)
                .map(|a| (a.amplitude * sigma.powf(a.exponent), sigma * a.omega, a.phase == Phase::Sin))
                .collect();
            channels.push(Channel { src: g.i - 1, dst: g.j - 1, atoms });
        }
        OscillatoryRhs { dim, drift, channels, omega_max: inputs.max_omega(), sigma }
    }

    /// Closed loop of the full problem.
    pub fn closed_loop(ext: &'a ExtendedSystem, inputs: &InputSynthesis, sigma: f64) -> Self {
        OscillatoryRhs::new(ext.dim(), Some(&ext.split), inputs, sigma)
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Input values per channel generator at time `t`.
    pub fn inputs_at(&self, t: f64) -> Vec<(Gen, f64)> {
        self.channels.iter().map(|c| (Gen::new(c.src + 1, c.dst + 1), Self::input(c, t))).collect()
    }

    fn input(c: &Channel, t: f64) -> f64 {
        c.atoms.iter().map(|&(a, w, s)| if s { a * (w * t).sin() } else { a * (w * t).cos() }).sum()
    }
}

impl Rhs for OscillatoryRhs<'_> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, t: f64, z: &[f64], out: &mut [f64]) {
        match self.drift {
            Some(d) => d.f_adm_into(z, out),
            None => out.iter_mut().for_each(|o| *o = 0.0),
        }
        for c in &self.channels {
            out[c.dst] += z[c.src] * Self::input(c, t);
        }
    }
}

/// Stored samples of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dt: f64,
    pub sigma: Option<f64>,
    pub label: String,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// First stored `(t, index)` where a component in `range` is not positive.
    pub fn positivity_violation(&self, range: std::ops::Range<usize>) -> Option<(f64, usize)> {
        for (t, z) in self.times.iter().zip(&self.states) {
            if let Some(k) = range.clone().find(|&k| z[k] <= 0.0) {
                return Some((*t, k));
            }
        }
        None
    }
}

/// Classical RK4 from `0` to `t_end` with step `dt`; the last step is shortened
/// to land on `t_end`. Every `stride`-th state and the final one are stored.
pub fn integrate<R: Rhs + ?Sized>(
    rhs: &R,
    z0: &[f64],
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory, SimError> {
    let d = rhs.dim();
    if z0.len() != d {
        return Err(SimError::Setup(format!("initial state has {} entries, expected {d}", z0.len())));
    }
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) || stride == 0 {
        return Err(SimError::Setup(format!("dt = {dt}, T = {t_end}, stride = {stride}")));
    }
    let full = (t_end / dt * (1.0 - 1e-12)).floor() as usize;
    let rem = t_end - full as f64 * dt;
    let steps = if rem > 1e-12 * dt.max(t_end) { full + 1 } else { full };
    let mut z = z0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut times = vec![0.0];
    let mut states = vec![z.clone()];
    for s in 0..steps {
        let t = s as f64 * dt;
        let h = if s + 1 == steps { t_end - t } else { dt };
        rhs.eval(t, &z, &mut k1);
        for q in 0..d {
            tmp[q] = z[q] + 0.5 * h * k1[q];
        }
        rhs.eval(t + 0.5 * h, &tmp, &mut k2);
        for q in 0..d {
            tmp[q] = z[q] + 0.5 * h * k2[q];
        }
        rhs.eval(t + 0.5 * h, &tmp, &mut k3);
        for q in 0..d {
            tmp[q] = z[q] + h * k3[q];
        }
        rhs.eval(t + h, &tmp, &mut k4);
        for q in 0..d {
            z[q] += h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite { t: t + h });
        }
        if (s + 1) % stride == 0 || s + 1 == steps {
            times.push(if s + 1 == steps { t_end } else { (s + 1) as f64 * dt });
            states.push(z.clone());
        }
    }
    Ok(Trajectory { times, states, dt, sigma: None, label: String::new() })
}

/// Largest step accepted for an oscillatory run.
pub fn max_dt(sigma: f64, omega_max: f64) -> f64 {
    2.0 * PI / (sigma * omega_max * 8.0)
}

/// Grid for an oscillatory run: an integer number of steps per sample, with at
/// least `oversample` steps per period of the fastest input.
pub fn oscillatory_grid(sigma: f64, omega_max: f64, sample_dt: f64, oversample: f64) -> (f64, usize) {
    if omega_max == 0.0 {
        return (sample_dt, 1);
    }
    let target = 2.0 * PI / (sigma * omega_max * oversample);
    let per = (sample_dt / target).ceil().max(1.0) as usize;
    (sample_dt / per as f64, per)
}

/// Integrates an oscillatory rhs on its default grid after the resolution guard.
pub fn integrate_oscillatory(
    rhs: &OscillatoryRhs,
    z0: &[f64],
    t_end: f64,
    sample_dt: f64,
    oversample: f64,
) -> Result<Trajectory, SimError> {
    let (dt, per) = oscillatory_grid(rhs.sigma(), rhs.omega_max(), sample_dt, oversample);
    if rhs.omega_max() > 0.0 {
        let max = max_dt(rhs.sigma(), rhs.omega_max());
        if dt > max {
            return Err(SimError::StepTooLarge { dt, max });
        }
    }
    let mut tr = integrate(rhs, z0, t_end, dt, per)?;
    tr.sigma = Some(rhs.sigma());
    tr.label = format!("oscillatory sigma={}", rhs.sigma());
    Ok(tr)
}

/// Max over shared sample times of the Euclidean state distance.
pub fn sup_error(a: &Trajectory, b: &Trajectory) -> Result<f64, SimError> {
    let tol = 1e-9 * a.horizon().abs().max(1.0);
    if (a.horizon() - b.horizon()).abs() > tol {
        return Err(SimError::Incompatible(format!("horizons {} and {}", a.horizon(), b.horizon())));
    }
    let (coarse, fine) = if a.times.len() <= b.times.len() { (a, b) } else { (b, a) };
    let mut j = 0;
    let mut worst: f64 = 0.0;
    for (t, z) in coarse.times.iter().zip(&coarse.states) {
        while j < fine.times.len() && fine.times[j] < t - tol {
            j += 1;
        }
        if j == fine.times.len() || (fine.times[j] - t).abs() > tol {
            return Err(SimError::Incompatible(format!("no sample at t = {t}")));
        }
        let w = &fine.states[j];
        if w.len() != z.len() {
            return Err(SimError::Incompatible("state dimensions differ".into()));
        }
        let d: f64 = z.iter().zip(w).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// A dependency of agent `agent`'s rhs on the state of a non-neighbor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub agent: usize,
    pub other: usize,
    /// 1-based rhs component that changed.
    pub component: usize,
    pub delta: f64,
}

/// Probes whether each agent's rhs components ignore every non-neighbor's state.
pub fn check_distributed<R: Rhs + ?Sized>(rhs: &R, g: &DiGraph, n: usize, seed: u64) -> Result<(), Witness> {
    let d = rhs.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base_out = vec![0.0; d];
    let mut pert_out = vec![0.0; d];
    for _probe in 0..3 {
        let z: Vec<f64> = (0..d).map(|k| if k >= 2 * n { rng.gen_range(0.1..2.0) } else { rng.gen_range(-2.0..2.0) }).collect();
        let t = rng.gen_range(0.0..10.0);
        rhs.eval(t, &z, &mut base_out);
        for i in 1..=n {
            for j in 1..=n {
                if j == i || g.has_edge(i, j) {
                    continue;
                }
                let mut zp = z.clone();
                for k in agent_indices(n, j) {
                    zp[k - 1] += rng.gen_range(0.5..1.5);
                }
                rhs.eval(t, &zp, &mut pert_out);
                for k in agent_indices(n, i) {
                    let delta = pert_out[k - 1] - base_out[k - 1];
                    if delta.abs() > 1e-12 * (1.0 + base_out[k - 1].abs()) {
                        return Err(Witness { agent: i, other: j, component: k, delta });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Thread pool honoring `DISTOPT_THREADS`.
pub fn thread_pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = std::env::var("DISTOPT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&k| k > 0) {
        b = b.num_threads(k);
    }
    b.build().expect("thread pool")
}

/// Centralized reference on the sample grid.
pub fn centralized(ap: &AugmentedProblem, z0: &[f64], t_end: f64, sample_dt: f64) -> Result<Trajectory, SimError> {
    let rhs = SaddleDynamics::new(ap);
    let mut tr = integrate(&rhs, z0, t_end, sample_dt, 1)?;
    tr.label = "centralized".into();
    Ok(tr)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub sigma: f64,
    pub sup_error: f64,
    pub final_state: Vec<f64>,
    pub steps_per_sample: usize,
}

/// Closed-loop runs for several `sigma` against one reference, in parallel.
pub fn sigma_sweep(
    ext: &ExtendedSystem,
    inputs: &InputSynthesis,
    reference: &Trajectory,
    sigmas: &[f64],
    z0: &[f64],
    sample_dt: f64,
    oversample: f64,
) -> Result<Vec<SweepPoint>, SimError> {
    let t_end = reference.horizon();
    thread_pool().install(|| {
        sigmas
            .par_iter()
            .map(|&sigma| {
                let rhs = OscillatoryRhs::closed_loop(ext, inputs, sigma);
                let tr = integrate_oscillatory(&rhs, z0, t_end, sample_dt, oversample)?;
                let (_, per) = oscillatory_grid(sigma, rhs.omega_max(), sample_dt, oversample);
                Ok(SweepPoint {
                    sigma,
                    sup_error: sup_error(reference, &tr)?,
                    final_state: tr.final_state().to_vec(),
                    steps_per_sample: per,
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let rhs = FnRhs { dim: 1, f: |_t: f64, z: &[f64], o: &mut [f64]| o[0] = -z[0] };
        let tr = integrate(&rhs, &[1.0], 1.0, 1e-3, 1).unwrap();
        assert!((tr.final_state()[0] - (-1f64).exp()).abs() < 1e-8);
        assert_eq!(tr.times.len(), 1001);
        assert_eq!(tr.horizon(), 1.0);
    }

    #[test]
    fn shortened_last_step() {
        let rhs = FnRhs { dim: 1, f: |_t: f64, _z: &[f64], o: &mut [f64]| o[0] = 1.0 };
        let tr = integrate(&rhs, &[0.0], 1.05, 0.1, 1).unwrap();
        assert_eq!(tr.horizon(), 1.05);
        assert!((tr.final_state()[0] - 1.05).abs() < 1e-12);
    }

    #[test]
    fn fourth_order() {
        let rhs = FnRhs { dim: 2, f: |_t: f64, z: &[f64], o: &mut [f64]| {
            o[0] = z[1];
            o[1] = -z[0];
        } };
        let err = |dt| (integrate(&rhs, &[1.0, 0.0], 2.0, dt, 1).unwrap().final_state()[0] - 2f64.cos()).abs();
        let ratio = err(0.1) / err(0.05);
        assert!((12.0..=20.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn constant_flow_and_errors() {
        let rhs = FnRhs { dim: 2, f: |_t: f64, _z: &[f64], o: &mut [f64]| o.fill(0.0) };
        let tr = integrate(&rhs, &[1.0, 2.0], 1.0, 0.25, 1).unwrap();
        assert!(tr.states.iter().all(|s| s == &vec![1.0, 2.0]));
        assert_eq!(sup_error(&tr, &tr).unwrap(), 0.0);
        let mut off = tr.clone();
        off.states.iter_mut().for_each(|s| s[1] += 0.3);
        assert!((sup_error(&tr, &off).unwrap() - 0.3).abs() < 1e-15);
        let short = integrate(&rhs, &[1.0, 2.0], 0.5, 0.25, 1).unwrap();
        assert!(sup_error(&tr, &short).is_err());
        let blow = FnRhs { dim: 1, f: |_t: f64, z: &[f64], o: &mut [f64]| o[0] = z[0] * z[0] };
        assert!(matches!(integrate(&blow, &[1.0], 2.0, 0.01, 1), Err(SimError::NonFinite { .. })));
    }

    #[test]
    fn single_channel_input() {
        let mut u = InputSynthesis::default();
        u.atoms.push(crate::synthesis::Atom { gen: Gen::new(1, 2), amplitude: 3.0, omega: 0.0, exponent: 0.0, phase: Phase::Cos });
        let rhs = OscillatoryRhs::new(2, None, &u, 1.0);
        let mut out = [0.0; 2];
        rhs.eval(0.0, &[2.0, 5.0], &mut out);
        assert_eq!(out, [0.0, 6.0]);
    }

    #[test]
    fn grid_divides_samples() {
        let (dt, per) = oscillatory_grid(1000.0, 70.0, 1e-3, 40.0);
        assert!((dt * per as f64 - 1e-3).abs() < 1e-18);
        assert!(dt <= 2.0 * PI / (1000.0 * 70.0 * 40.0));
        assert!(dt < max_dt(1000.0, 70.0));
    }

    #[test]
    fn decoupled_rhs_is_distributed() {
        let g = DiGraph::new(3, &[]).unwrap();
        let rhs = FnRhs { dim: 9, f: |_t: f64, z: &[f64], o: &mut [f64]| {
            for k in 0..9 {
                o[k] = -z[k];
            }
        } };
        assert!(check_distributed(&rhs, &g, 3, 1).is_ok());
        let coupled = FnRhs { dim: 9, f: |_t: f64, z: &[f64], o: &mut [f64]| {
            o.fill(0.0);
            o[0] = z[1];
        } };
        let w = check_distributed(&coupled, &g, 3, 1).unwrap_err();
        assert_eq!((w.agent, w.other, w.component), (1, 2, 1));
    }
}
