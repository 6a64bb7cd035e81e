//! Seeded random instances: general finite systems and permutation systems
//! carrying an invariant measure.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::invariant_weight;
use crate::orbit::orbit_shape;
use crate::rational::{frac, Rational};
use crate::sets::FiniteSet;
use crate::system::{FiniteSystem, Observable};

/// Bounds on generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_points: usize,
    /// Numerators and denominators are drawn from `1..=max_term`.
    pub max_term: i64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_points: 12,
            max_term: 9,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn positive_rational<R: Rng>(rng: &mut R, max_term: i64) -> Rational {
    frac(rng.gen_range(1..=max_term), rng.gen_range(1..=max_term))
}

/// Numerator drawn from `−max_term..=max_term`.
pub fn signed_rational<R: Rng>(rng: &mut R, max_term: i64) -> Rational {
    frac(rng.gen_range(-max_term..=max_term), rng.gen_range(1..=max_term))
}

/// Random map on `1..=max_points` points with `h ≡ 0`.
pub fn finite_system<R: Rng>(rng: &mut R, bounds: Bounds) -> FiniteSystem {
    let size = rng.gen_range(1..=bounds.max_points);
    let step = (0..size).map(|_| rng.gen_range(0..size)).collect();
    let f = (0..size).map(|_| signed_rational(rng, bounds.max_term)).collect();
    let g = (0..size).map(|_| positive_rational(rng, bounds.max_term)).collect();
    let w = (0..size).map(|_| positive_rational(rng, bounds.max_term)).collect();
    FiniteSystem::new(step, f, g, vec![Rational::default(); size], w).expect("generated system is valid")
}

/// A random permutation with a random positive measure `μ` and the weight
/// `w = μ(T·)/μ(·)` that makes `μ` invariant.
pub fn permutation_system<R: Rng>(rng: &mut R, bounds: Bounds) -> (FiniteSystem, Vec<Rational>) {
    let size = rng.gen_range(1..=bounds.max_points);
    let mut step: Vec<usize> = (0..size).collect();
    step.shuffle(rng);
    let f = (0..size).map(|_| signed_rational(rng, bounds.max_term)).collect();
    let g = (0..size).map(|_| positive_rational(rng, bounds.max_term)).collect();
    let mu: Vec<Rational> = (0..size).map(|_| positive_rational(rng, bounds.max_term)).collect();
    let base = FiniteSystem::with_defaults(step, f).expect("generated system is valid");
    let base = base.with_values(Observable::G, g).expect("g is positive");
    let w = invariant_weight(&base, &mu).expect("permutation with positive measure");
    let sys = base.with_values(Observable::W, w).expect("invariant weight is positive");
    (sys, mu)
}

/// A random subset meeting every cycle, hence T-bounded.
pub fn bounded_set<R: Rng>(rng: &mut R, sys: &FiniteSystem) -> FiniteSet {
    let mut set = FiniteSet::from_points(sys.len(), sys.points().filter(|_| rng.gen_bool(0.3)));
    for x in sys.points() {
        let shape = orbit_shape(sys, x);
        let mut cycle = Vec::with_capacity(shape.cycle);
        let mut y = x;
        for _ in 0..shape.tail {
            y = sys.next(y);
        }
        for _ in 0..shape.cycle {
            cycle.push(y);
            y = sys.next(y);
        }
        if !cycle.iter().any(|&p| set.contains_point(p)) {
            set.insert(*cycle.choose(rng).expect("cycles are nonempty"));
        }
    }
    set
}
