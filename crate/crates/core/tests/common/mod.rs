//! Test-only oracles. Nothing here calls into the periodic, tiling or
//! measure modules; values are recomputed from raw step tables.
#![allow(dead_code)]

use std::collections::HashMap;

use ergotile::rational::to_f64;
use ergotile::{FiniteSystem, Observable};

/// A finite system flattened to `f64` arrays.
pub struct FloatSystem {
    pub step: Vec<usize>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub w: Vec<f64>,
}

impl FloatSystem {
    pub fn of(sys: &FiniteSystem) -> Self {
        let conv = |obs| sys.values(obs).iter().map(to_f64).collect();
        FloatSystem {
            step: sys.step_table().to_vec(),
            f: conv(Observable::F),
            g: conv(Observable::G),
            w: conv(Observable::W),
        }
    }
}

/// Pre-period and cycle length by hashing visited points.
pub fn brute_shape(step: &[usize], x: usize) -> (usize, usize) {
    let mut seen = HashMap::new();
    let mut y = x;
    let mut k = 0usize;
    loop {
        if let Some(&first) = seen.get(&y) {
            return (first, k - first);
        }
        seen.insert(y, k);
        y = step[y];
        k += 1;
    }
}

/// `R_1(x), …, R_len(x)` in floating point. The running weight and both
/// sums are rescaled together whenever the weight leaves `[1e-150, 1e150]`;
/// the ratio is unaffected by a common factor.
pub fn simulate_ratios(sys: &FloatSystem, x: usize, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let (mut sf, mut sg, mut wt) = (0.0f64, 0.0f64, 1.0f64);
    let mut y = x;
    for _ in 0..len {
        sf += sys.f[y] * wt;
        sg += sys.g[y] * wt;
        out.push(sf / sg);
        wt *= sys.w[y];
        y = sys.step[y];
        if wt > 1e150 {
            sf /= wt;
            sg /= wt;
            wt = 1.0;
        }
    }
    out
}

/// Limit of one subsequence `(n_i, u_i)` sampled at increasing `n`.
///
/// Geometrically converging sequences are read off their last term. Slowly
/// (algebraically) converging ones get one step of Wynn's rho algorithm on
/// three widely spaced samples, which is exact for `L + K/(n + e)`.
pub fn subsequence_limit(samples: &[(f64, f64)]) -> f64 {
    let len = samples.len();
    if len < 3 {
        return samples[len - 1].1;
    }
    let (n1, u1) = samples[len / 4];
    let (n2, u2) = samples[len / 2];
    let (n3, u3) = samples[len - 1];
    let early = u2 - u1;
    let late = u3 - u2;
    let scale = u3.abs().max(1.0);
    if late.abs() <= 1e-14 * scale || late.abs() < 1e-3 * early.abs() {
        return u3;
    }
    let rho_a = (n2 - n1) / early;
    let rho_b = (n3 - n2) / late;
    u2 + (n3 - n1) / (rho_b - rho_a)
}

/// Estimated limit points of `(R_n(x))`: one limit per residue class of `n`
/// modulo the cycle length of `x`, deduplicated at `tol`.
pub fn simulated_limit_points(sys: &FloatSystem, x: usize, len: usize, tol: f64) -> Vec<f64> {
    let (_, cycle) = brute_shape(&sys.step, x);
    let ratios = simulate_ratios(sys, x, len);
    let mut estimates: Vec<f64> = Vec::new();
    for r in 0..cycle {
        let samples: Vec<(f64, f64)> = ratios
            .iter()
            .enumerate()
            .map(|(i, &v)| ((i + 1) as f64, v))
            .filter(|(n, _)| (*n as usize) % cycle == r)
            .collect();
        let est = subsequence_limit(&samples);
        if !estimates.iter().any(|e| (e - est).abs() <= tol) {
            estimates.push(est);
        }
    }
    estimates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    estimates
}

/// Largest distance from any element of `a` to the nearest element of `b`.
pub fn one_sided_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}
