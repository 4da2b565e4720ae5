//! All complex roots of a polynomial by Aberth–Ehrlich simultaneous iteration.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

/// Iteration cap of [`solve_roots`].
pub const MAX_ITERATIONS: usize = 1000;

/// Distance below which roots are merged by [`cluster_roots`].
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("polynomial of degree < 1")]
    Constant,
    #[error("leading coefficient is zero")]
    ZeroLeading,
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize, partial: Vec<Complex64> },
}

/// Value and derivative by Horner's rule; `coeffs` are low degree first.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    eval_with_derivative(coeffs, z).0
}

/// `sum |c_i| |z|^i`, the scale against which a residual is judged.
fn magnitude(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Whether `|p(z)| <= tol * sum |c_i| max(1, |z|)^i`.
pub fn is_root(coeffs: &[Complex64], z: Complex64, tol: f64) -> bool {
    let r = z.norm().max(1.0);
    let scale = coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    eval(coeffs, z).norm() <= tol * scale
}

/// All `n` roots of a degree-`n` polynomial (coefficients low degree first),
/// started from a circle of radius `|c_0 / c_n|^(1/n)` with a fixed angular
/// offset, so results are deterministic. Every returned root satisfies
/// [`is_root`] with tolerance `tol`.
pub fn solve_roots(coeffs: &[Complex64], tol: f64) -> Result<Vec<Complex64>, RootError> {
    let n = coeffs.len().checked_sub(1).filter(|&n| n >= 1).ok_or(RootError::Constant)?;
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(RootError::ZeroLeading);
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = match monic[0].norm() {
        r if r > 0.0 => r.powf(1.0 / n as f64),
        _ => 1.0,
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = eval_with_derivative(&monic, z[k]);
            if p.norm() <= 4.0 * f64::EPSILON * magnitude(&monic, z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            if step.norm() <= 1e-15 * z[k].norm().max(1.0) {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }
    if z.iter().all(|&r| is_root(&monic, r, tol)) {
        Ok(z)
    } else {
        Err(RootError::NoConvergence {
            iterations: MAX_ITERATIONS,
            partial: z,
        })
    }
}

/// Groups roots closer than `tol` to the first root of their group;
/// returns `(mean, multiplicity)` pairs in order of first appearance.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for &r in roots {
        match groups.iter_mut().find(|(anchor, _)| (anchor - r).norm() < tol) {
            Some((_, members)) => members.push(r),
            None => groups.push((r, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(_, m)| (m.iter().sum::<Complex64>() / m.len() as f64, m.len()))
        .collect()
}
