//! Cocycle weights `w^T(x, k) = ∏_{j<k} w(T^j x)`, weighted sums
//! `S_n f(x) = Σ_{k<n} f(T^k x)·w^T(x, k)` and ratios `R_n = S_n f / S_n g`.
//!
//! Everything is exact. Cost is `O(n)` multiplications of arbitrary-size
//! rationals, whose sizes can grow linearly in `n`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::system::{Dynamics, Observable};

pub fn cocycle<S: Dynamics>(sys: &S, x: &S::Point, k: usize) -> Result<Rational> {
    sys.check_depth(k)?;
    let mut product = Rational::one();
    let mut y = x.clone();
    for j in 0..k {
        product *= sys.observe(Observable::W, &y);
        if j + 1 < k {
            y = sys.step(&y);
        }
    }
    Ok(product)
}

pub fn weighted_sum<S: Dynamics>(sys: &S, obs: Observable, x: &S::Point, n: usize) -> Result<Rational> {
    weighted_sum_by(sys, |p| sys.observe(obs, p), x, n)
}

/// [`weighted_sum`] for an arbitrary observable.
pub fn weighted_sum_by<S, F>(sys: &S, obs: F, x: &S::Point, n: usize) -> Result<Rational>
where
    S: Dynamics,
    F: Fn(&S::Point) -> Rational,
{
    sys.check_depth(n)?;
    let mut sum = Rational::zero();
    let mut weight = Rational::one();
    let mut y = x.clone();
    for k in 0..n {
        sum += obs(&y) * &weight;
        if k + 1 < n {
            weight *= sys.observe(Observable::W, &y);
            y = sys.step(&y);
        }
    }
    Ok(sum)
}

/// `R_n(x)` for `n ≥ 1`.
pub fn ratio<S: Dynamics>(sys: &S, x: &S::Point, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::ZeroLengthRatio);
    }
    let num = weighted_sum(sys, Observable::F, x, n)?;
    let den = weighted_sum(sys, Observable::G, x, n)?;
    Ok(num / den)
}

/// Whether `S_{n+1} f(x) = f(x) + w(x)·S_n f(Tx)` holds; always `true`.
pub fn successor_identity_check<S: Dynamics>(sys: &S, x: &S::Point, n: usize) -> Result<bool> {
    let lhs = weighted_sum(sys, Observable::F, x, n + 1)?;
    let tx = sys.step(x);
    let rhs = sys.observe(Observable::F, x)
        + sys.observe(Observable::W, x) * weighted_sum(sys, Observable::F, &tx, n)?;
    Ok(lhs == rhs)
}

/// Running state of the weighted sums along one orbit.
#[derive(Debug, Clone)]
pub struct SumState<P> {
    /// Number of terms accumulated so far.
    pub len: usize,
    /// Current orbit point `T^len x`.
    pub point: P,
    /// `w^T(x, len)`.
    pub weight: Rational,
    pub sum_f: Rational,
    pub sum_g: Rational,
}

impl<P> SumState<P> {
    /// `R_len`; `None` before the first term.
    pub fn ratio(&self) -> Option<Rational> {
        (self.len > 0).then(|| &self.sum_f / &self.sum_g)
    }
}

/// Incremental walk yielding `S_n f`, `S_n g` for `n = 1, 2, …`, one orbit
/// step per item. Stops at the system window.
pub struct SumWalk<'a, S: Dynamics> {
    sys: &'a S,
    state: SumState<S::Point>,
}

impl<'a, S: Dynamics> SumWalk<'a, S> {
    pub fn new(sys: &'a S, x: &S::Point) -> Self {
        SumWalk {
            sys,
            state: SumState {
                len: 0,
                point: x.clone(),
                weight: Rational::one(),
                sum_f: Rational::zero(),
                sum_g: Rational::zero(),
            },
        }
    }
}

impl<S: Dynamics> Iterator for SumWalk<'_, S> {
    type Item = SumState<S::Point>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(window) = self.sys.window() {
            if self.state.len >= window {
                return None;
            }
        }
        let sys = self.sys;
        let st = &mut self.state;
        st.sum_f += sys.observe(Observable::F, &st.point) * &st.weight;
        st.sum_g += sys.observe(Observable::G, &st.point) * &st.weight;
        st.weight *= sys.observe(Observable::W, &st.point);
        st.point = sys.step(&st.point);
        st.len += 1;
        Some(st.clone())
    }
}
