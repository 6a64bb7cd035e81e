//! Floating-point simulation of `R_n(x)`, for cross-checking exact values.
//!
//! Sums and the running cocycle are rescaled together whenever the weight
//! exceeds `1e150`, which leaves the ratio unchanged.

use crate::error::Result;
use crate::rational::to_f64;
use crate::system::{Dynamics, Observable};

/// `R_1(x), …, R_len(x)` in `f64`.
pub fn simulate_ratios<S: Dynamics>(sys: &S, x: &S::Point, len: usize) -> Result<Vec<f64>> {
    sys.check_depth(len)?;
    let mut out = Vec::with_capacity(len);
    let (mut sf, mut sg, mut wt) = (0.0f64, 0.0f64, 1.0f64);
    let mut y = x.clone();
    for _ in 0..len {
        sf += to_f64(&sys.observe(Observable::F, &y)) * wt;
        sg += to_f64(&sys.observe(Observable::G, &y)) * wt;
        out.push(sf / sg);
        wt *= to_f64(&sys.observe(Observable::W, &y));
        y = sys.step(&y);
        if wt > 1e150 {
            sf /= wt;
            sg /= wt;
            wt = 1.0;
        }
    }
    Ok(out)
}

/// Limit of a sampled sequence `(n_i, u_i)`.
///
/// Read off the last term when the tail has settled; otherwise apply one
/// step of Wynn's rho algorithm to three spread-out samples, which is exact
/// for sequences `L + K/(n + e)`.
pub fn extrapolate(samples: &[(f64, f64)]) -> f64 {
    let len = samples.len();
    if len < 3 {
        return samples.last().map_or(f64::NAN, |s| s.1);
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

/// One extrapolated limit per residue class of `n` modulo `period`,
/// sorted and merged at distance `tol`.
pub fn residue_limits(ratios: &[f64], period: usize, tol: f64) -> Vec<f64> {
    let period = period.max(1);
    let mut estimates: Vec<f64> = Vec::new();
    for r in 0..period {
        let samples: Vec<(f64, f64)> = ratios
            .iter()
            .enumerate()
            .map(|(i, &v)| (i + 1, v))
            .filter(|(n, _)| n % period == r)
            .map(|(n, v)| (n as f64, v))
            .collect();
        if samples.is_empty() {
            continue;
        }
        let est = extrapolate(&samples);
        if !estimates.iter().any(|e| (e - est).abs() <= tol) {
            estimates.push(est);
        }
    }
    estimates.sort_by(f64::total_cmp);
    estimates
}

/// Hausdorff distance between two finite sets of reals.
pub fn set_distance(a: &[f64], b: &[f64]) -> f64 {
    let gap = |p: &[f64], q: &[f64]| {
        p.iter()
            .map(|x| q.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    gap(a, b).max(gap(b, a))
}
