//! The eventually periodic part of `F = f × g × w`, minimal periods, exact
//! limit-point sets of the ratios `R_n`, and the lexicographically least
//! return set.
//!
//! Two finite search bounds replace the unbounded quantifiers:
//!
//! * `x ∈ Per_n` is decided on the `τ + c` distinct orbit points, which is the
//!   definition verbatim. If some period works at `x` then `c` works (the
//!   value sequence is `n`-periodic from 0 and `c`-periodic from `τ`, so
//!   `a_k = a_{k+qn} = a_{k+qn+c} = a_{k+c}` for large `q`), hence searching
//!   `n ≤ τ + c` finds the minimal period.
//! * Two value sequences with tails `τ₁, τ₂` and periods `c₁, c₂` are both
//!   `lcm(c₁, c₂)`-periodic from `max(τ₁, τ₂)`, so agreeing on a prefix of
//!   length `max(τ₁, τ₂) + lcm(c₁, c₂) + 1` means agreeing everywhere.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::One;

use crate::cocycle::{cocycle, ratio, weighted_sum};
use crate::orbit::{orbit_shapes, OrbitShape};
use crate::rational::Rational;
use crate::sets::FiniteSet;
use crate::system::{FiniteSystem, Observable};

/// Limit points of `(R_n(x))_{n ≥ 1}`, sorted ascending and distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitPointSet {
    pub values: Vec<Rational>,
    pub converges: bool,
}

impl LimitPointSet {
    fn from_values(mut values: Vec<Rational>) -> Self {
        values.sort();
        values.dedup();
        let converges = values.len() == 1;
        LimitPointSet { values, converges }
    }

    pub fn limsup(&self) -> &Rational {
        self.values.last().expect("limit point sets are nonempty")
    }

    pub fn liminf(&self) -> &Rational {
        self.values.first().expect("limit point sets are nonempty")
    }

    /// The unique limit, when the ratios converge.
    pub fn limit(&self) -> Option<&Rational> {
        self.converges.then(|| &self.values[0])
    }
}

/// How the cocycle over one period of the eventually periodic part compares
/// with 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `ρ < 1`: both sums converge.
    Contracting,
    /// `ρ = 1`: sums grow linearly.
    Neutral,
    /// `ρ > 1`: sums grow geometrically.
    Expanding,
}

/// Where and how the orbit of a point enters the eventually periodic part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// Least `m` with `T^m x ∈ C`.
    pub steps: usize,
    /// `T^m x`.
    pub point: usize,
    /// Minimal period at the entry point.
    pub period: usize,
    /// `ρ = w^T(y, n(y))` at the entry point `y`.
    pub cycle_weight: Rational,
    pub regime: Regime,
}

/// The full periodic analysis of a finite system.
#[derive(Debug, Clone)]
pub struct PeriodicAnalysis {
    pub shapes: Vec<OrbitShape>,
    /// `C = ⋃_n Per_n`, the eventually periodic part.
    pub c: FiniteSet,
    /// `n(x)` on `C`, `None` outside.
    pub min_period: Vec<Option<usize>>,
    pub entries: Vec<Entry>,
    pub limits: Vec<LimitPointSet>,
    /// Points of `C` where `R_{n(x)}(x)` attains the limsup.
    pub a: FiniteSet,
    /// Points of `A` whose value sequence is lexicographically least
    /// among the points of `A` on their forward orbit.
    pub b: FiniteSet,
}

impl PeriodicAnalysis {
    pub fn limit_point_set(&self, x: usize) -> &LimitPointSet {
        &self.limits[x]
    }

    pub fn limsup(&self, x: usize) -> &Rational {
        self.limits[x].limsup()
    }
}

type Triple<'a> = (&'a Rational, &'a Rational, &'a Rational);

fn triple(sys: &FiniteSystem, x: usize) -> Triple<'_> {
    (
        sys.value(Observable::F, x),
        sys.value(Observable::G, x),
        sys.value(Observable::W, x),
    )
}

fn orbit_points(sys: &FiniteSystem, x: usize, len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    let mut y = x;
    for _ in 0..len {
        out.push(y);
        y = sys.next(y);
    }
    out
}

fn in_period_part(sys: &FiniteSystem, shape: OrbitShape, x: usize, n: usize) -> bool {
    let len = shape.orbit_len();
    let orbit = orbit_points(sys, x, len + n);
    (0..len).all(|k| triple(sys, orbit[k]) == triple(sys, orbit[k + n]))
}

/// `Per_n(f × g × w) = {x : F(y) = F(T^n y) for all y ∈ O(x)}`.
///
/// `n = 0` yields the whole space, as the defining condition is vacuous.
pub fn period_part(sys: &FiniteSystem, n: usize) -> FiniteSet {
    let shapes = orbit_shapes(sys);
    FiniteSet::from_points(
        sys.len(),
        sys.points().filter(|&x| in_period_part(sys, shapes[x], x, n)),
    )
}

fn minimal_period(sys: &FiniteSystem, shape: OrbitShape, x: usize) -> Option<usize> {
    (1..=shape.orbit_len()).find(|&n| in_period_part(sys, shape, x, n))
}

fn entry(sys: &FiniteSystem, c: &FiniteSet, min_period: &[Option<usize>], x: usize) -> Entry {
    let mut steps = 0;
    let mut y = x;
    while !c.contains_point(y) {
        y = sys.next(y);
        steps += 1;
    }
    let period = min_period[y].expect("C points have a period");
    let cycle_weight = cocycle(sys, &y, period).expect("finite systems have no window");
    let regime = match cycle_weight.cmp(&Rational::one()) {
        Ordering::Less => Regime::Contracting,
        Ordering::Equal => Regime::Neutral,
        Ordering::Greater => Regime::Expanding,
    };
    Entry {
        steps,
        point: y,
        period,
        cycle_weight,
        regime,
    }
}

fn limits_from_entry(sys: &FiniteSystem, x: usize, entry: &Entry) -> LimitPointSet {
    let y = entry.point;
    let n = entry.period;
    let exact = |r: crate::Result<Rational>| -> Rational { r.expect("finite systems have no window") };
    match entry.regime {
        Regime::Contracting => {
            // S_{m+k}(x) = S_m(x) + w^T(x,m)·S_k(y), and S_k(y) → S_n(y)/(1−ρ).
            let m = entry.steps;
            let prefix_weight = exact(cocycle(sys, &x, m));
            let scale = Rational::one() - &entry.cycle_weight;
            let total = |obs| {
                exact(weighted_sum(sys, obs, &x, m))
                    + &prefix_weight * exact(weighted_sum(sys, obs, &y, n)) / &scale
            };
            LimitPointSet::from_values(vec![total(Observable::F) / total(Observable::G)])
        }
        Regime::Neutral => LimitPointSet::from_values(vec![exact(ratio(sys, &y, n))]),
        Regime::Expanding => {
            let mut values = Vec::with_capacity(n);
            let mut shifted = y;
            for _ in 0..n {
                values.push(exact(ratio(sys, &shifted, n)));
                shifted = sys.next(shifted);
            }
            LimitPointSet::from_values(values)
        }
    }
}

fn lex_cmp(sys: &FiniteSystem, x: usize, y: usize, len: usize) -> Ordering {
    let (mut p, mut q) = (x, y);
    for _ in 0..len {
        match triple(sys, p).cmp(&triple(sys, q)) {
            Ordering::Equal => {}
            other => return other,
        }
        p = sys.next(p);
        q = sys.next(q);
    }
    Ordering::Equal
}

/// Computes `C`, `n(x)`, every limit-point set, `A` and `B`.
pub fn eventually_periodic_part(sys: &FiniteSystem) -> PeriodicAnalysis {
    let size = sys.len();
    let shapes = orbit_shapes(sys);
    let min_period: Vec<Option<usize>> = sys
        .points()
        .map(|x| minimal_period(sys, shapes[x], x))
        .collect();
    let c = FiniteSet::from_points(size, sys.points().filter(|&x| min_period[x].is_some()));
    let entries: Vec<Entry> = sys.points().map(|x| entry(sys, &c, &min_period, x)).collect();
    let limits: Vec<LimitPointSet> = sys
        .points()
        .map(|x| limits_from_entry(sys, x, &entries[x]))
        .collect();

    let a = FiniteSet::from_points(
        size,
        c.iter().filter(|&x| {
            let n = min_period[x].expect("C points have a period");
            ratio(sys, &x, n).expect("finite") == *limits[x].limsup()
        }),
    );

    let b = FiniteSet::from_points(
        size,
        a.iter().filter(|&x| {
            orbit_points(sys, x, shapes[x].orbit_len())
                .into_iter()
                .filter(|&y| a.contains_point(y))
                .all(|y| {
                    let (sx, sy) = (shapes[x], shapes[y]);
                    let len = sx.tail.max(sy.tail) + sx.cycle.lcm(&sy.cycle) + 1;
                    lex_cmp(sys, x, y, len) != Ordering::Greater
                })
        }),
    );

    PeriodicAnalysis {
        shapes,
        c,
        min_period,
        entries,
        limits,
        a,
        b,
    }
}

pub fn limit_point_set(sys: &FiniteSystem, x: usize) -> LimitPointSet {
    eventually_periodic_part(sys).limits.swap_remove(x)
}

pub fn limsup_exact(sys: &FiniteSystem, x: usize) -> Rational {
    limit_point_set(sys, x).limsup().clone()
}
