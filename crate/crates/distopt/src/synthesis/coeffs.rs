use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::SynthesisError;
use crate::liebracket::{Bracket, Gen};

/// `g_B(w)` with frequencies assigned to the leaves of `b` left to right.
pub fn g_hat(b: &Bracket, w: &[f64]) -> Result<f64, SynthesisError> {
    if w.len() != b.degree() {
        return Err(SynthesisError::Shape(format!("{} frequencies for degree {}", w.len(), b.degree())));
    }
    match b.children() {
        None => Ok(1.0),
        Some((l, r)) => {
            let d1 = l.degree();
            let s: f64 = w[..d1].iter().sum();
            if s == 0.0 {
                return Err(SynthesisError::ZeroPartialSum(l.to_string()));
            }
            Ok(g_hat(l, &w[..d1])? / s * g_hat(r, &w[d1..])?)
        }
    }
}

/// Leaf frequencies of `b` read from a per-generator table.
fn leaf_freqs(b: &Bracket, gens: &[Gen], w: &[f64]) -> Result<Vec<f64>, SynthesisError> {
    b.leaves()
        .iter()
        .map(|g| {
            gens.iter()
                .position(|x| x == g)
                .map(|k| w[k])
                .ok_or_else(|| SynthesisError::Shape(format!("leaf {g} not among class generators")))
        })
        .collect()
}

/// `Xi[b][rho] = g_b(frequencies of set rho)`; `sets[rho][k]` belongs to `gens[k]`.
pub fn xi_matrix(members: &[Bracket], gens: &[Gen], sets: &[Vec<f64>]) -> Result<DMatrix<f64>, SynthesisError> {
    let m = members.len();
    if sets.len() != m {
        return Err(SynthesisError::Shape(format!("{} frequency sets for a class of {m}", sets.len())));
    }
    let mut xi = DMatrix::zeros(m, m);
    for (row, b) in members.iter().enumerate() {
        for (rho, w) in sets.iter().enumerate() {
            xi[(row, rho)] = g_hat(b, &leaf_freqs(b, gens, w)?)?;
        }
    }
    Ok(xi)
}

/// 2-norm condition number.
pub fn condition(m: &DMatrix<f64>) -> f64 {
    let s = m.clone().svd(false, false).singular_values;
    let max = s.max();
    let min = s.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn signed_root(x: f64, n: u32) -> f64 {
    x.signum() * x.abs().powf(1.0 / n as f64)
}

/// Real part of `i^k`; only called for even `k`.
fn i_pow_even(k: usize) -> f64 {
    if (k / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Degree-2 coefficients `(eta_k1, eta_k2)` for `v [phi_k1, phi_k2]` at frequency `w`.
pub fn eta_degree2(v: f64, w: f64, beta: f64) -> Result<(Complex64, Complex64), SynthesisError> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(SynthesisError::BadBeta(beta));
    }
    let a = (v * w).abs() / 2.0;
    let s = (v * w).signum();
    if v == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    Ok((Complex64::new(0.0, s * a.sqrt() / beta), Complex64::new(beta * a.sqrt(), 0.0)))
}

/// Degree-`N >= 3` coefficients: `gamma = Xi^{-1} v`, then per set `rho` one
/// coefficient per class generator. `betas[k]` multiplies generator `k`.
pub fn eta_higher(xi: &DMatrix<f64>, v: &[f64], degree: usize, betas: &[f64]) -> Result<Vec<Vec<Complex64>>, SynthesisError> {
    if degree < 3 {
        return Err(SynthesisError::Degree(degree));
    }
    if betas.iter().any(|b| *b == 0.0 || !b.is_finite()) {
        return Err(SynthesisError::BadBeta(0.0));
    }
    let rhs = DVector::from_column_slice(v);
    let gamma = xi
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(SynthesisError::SingularXi { cond: f64::INFINITY })?;
    let n = degree as u32;
    let mut out = Vec::with_capacity(gamma.len());
    for &g in gamma.iter() {
        let row: Vec<Complex64> = if degree % 2 == 1 {
            let r = signed_root(0.5 * g * i_pow_even(degree - 1), n);
            betas.iter().map(|b| Complex64::new(b * r, 0.0)).collect()
        } else {
            let val = 0.5 * g * i_pow_even(degree - 2);
            let mag = val.abs().powf(1.0 / n as f64);
            betas
                .iter()
                .enumerate()
                .map(|(k, b)| {
                    if k == 0 {
                        Complex64::new(0.0, b * val.signum() * mag)
                    } else {
                        Complex64::new(b * mag, 0.0)
                    }
                })
                .collect()
        };
        out.push(row);
    }
    Ok(out)
}

/// Closed-form degree-2 inputs as `(cos amplitude, sin amplitude)` per channel,
/// before the `sqrt(sigma)` factor.
pub fn explicit_degree2(v: f64, w: f64, beta: f64) -> [(f64, f64); 2] {
    let a = (2.0 * (v * w).abs()).sqrt();
    [(-a / beta, 0.0), (0.0, -(v * w).signum() * beta * a)]
}

/// Closed-form degree-3 cosine amplitudes for `v [phi_k1, [phi_k2, phi_k3]]`,
/// before the `sigma^{2/3}` factor.
pub fn explicit_degree3(v: f64, w: [f64; 3], beta: f64) -> [f64; 3] {
    let a = -2.0 * signed_root(v * w[0] * w[1] / 2.0, 3);
    [beta * a, a / (beta * beta), beta * a]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lf(k: usize) -> Bracket {
        Bracket::leaf(Gen::new(k, k))
    }

    #[test]
    fn g_hat_examples() {
        let (w1, w2, w3) = (3.0, 5.0, -8.0);
        let b = Bracket::node(lf(1), lf(2));
        assert_eq!(g_hat(&b, &[w1, w2]).unwrap(), 1.0 / w1);
        let b = Bracket::node(lf(1), Bracket::node(lf(2), lf(3)));
        assert!((g_hat(&b, &[w1, w2, w3]).unwrap() - 1.0 / (w1 * w2)).abs() < 1e-15);
        let b = Bracket::node(Bracket::node(lf(1), lf(2)), lf(3));
        assert!((g_hat(&b, &[w1, w2, w3]).unwrap() - (1.0 / w1) / (w1 + w2)).abs() < 1e-15);
        let b = Bracket::node(Bracket::node(lf(1), lf(2)), lf(3));
        assert!(g_hat(&b, &[2.0, -2.0, 1.0]).is_err());
    }

    #[test]
    fn eta_examples() {
        let (a, b) = eta_degree2(1.0, 1.0, 1.0).unwrap();
        let r = 0.5f64.sqrt();
        assert!((a - Complex64::new(0.0, r)).norm() < 1e-15);
        assert!((b - Complex64::new(r, 0.0)).norm() < 1e-15);
        let (a, b) = eta_degree2(0.0, 3.0, 1.0).unwrap();
        assert_eq!((a.norm(), b.norm()), (0.0, 0.0));
        assert!(eta_degree2(1.0, 1.0, 0.0).is_err());

        let (w1, w2, v) = (3.0, 5.0, 1.3);
        let xi = DMatrix::from_element(1, 1, 1.0 / (w1 * w2));
        let eta = eta_higher(&xi, &[v], 3, &[1.0; 3]).unwrap();
        let want = signed_root(-v * w1 * w2 / 2.0, 3);
        for e in &eta[0] {
            assert!((e - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn explicit_matches_general_degree3() {
        let w = [4.0, 9.0, -13.0];
        let v = -0.7;
        let xi = DMatrix::from_element(1, 1, 1.0 / (w[0] * w[1]));
        let eta = eta_higher(&xi, &[v], 3, &[1.0; 3]).unwrap();
        let ex = explicit_degree3(v, w, 1.0);
        for k in 0..3 {
            assert!((2.0 * eta[0][k].re - ex[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn degree4_chain_xi_by_hand() {
        // class of the chain h(2,1), h(3,2), h(4,3), h(5,4)
        let gens: Vec<Gen> = (1..=4).map(|m| Gen::new(m + 1, m)).collect();
        let members = crate::liebracket::multilinear_class(&gens, true).unwrap();
        assert_eq!(members.len(), 2);
        let sets = vec![vec![2.0, 3.0, 7.0, -12.0], vec![5.0, -11.0, 2.5, 3.5]];
        let xi = xi_matrix(&members, &gens, &sets).unwrap();
        for (row, b) in members.iter().enumerate() {
            for (rho, w) in sets.iter().enumerate() {
                let lw: Vec<f64> = b.leaves().iter().map(|g| w[gens.iter().position(|x| x == g).unwrap()]).collect();
                // unroll by hand for the two shapes that occur
                let want = match b.children().unwrap() {
                    (l, _) if l.degree() == 1 => {
                        let (_, r) = b.children().unwrap();
                        let (rl, _) = r.children().unwrap();
                        if rl.degree() == 1 {
                            // [a,[b,[c,d]]]
                            1.0 / lw[0] * (1.0 / lw[1]) * (1.0 / lw[2])
                        } else {
                            // [a,[[b,c],d]]
                            1.0 / lw[0] * ((1.0 / lw[1]) / (lw[1] + lw[2]))
                        }
                    }
                    (l, _) if l.degree() == 2 => (1.0 / lw[0]) / (lw[0] + lw[1]) * (1.0 / lw[2]),
                    _ => {
                        let (l, _) = b.children().unwrap();
                        let (ll, _) = l.children().unwrap();
                        if ll.degree() == 1 {
                            // [[a,[b,c]],d]
                            (1.0 / lw[0] * (1.0 / lw[1])) / (lw[0] + lw[1] + lw[2])
                        } else {
                            (1.0 / lw[0]) / (lw[0] + lw[1]) / (lw[0] + lw[1] + lw[2])
                        }
                    }
                };
                assert!((xi[(row, rho)] - want).abs() < 1e-14, "{b}");
            }
        }
        assert!(condition(&xi).is_finite());
    }
}
