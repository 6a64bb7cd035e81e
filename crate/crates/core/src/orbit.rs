//! Orbit traversal, hitting times and the elementary set properties.

use crate::error::{Error, Result};
use crate::sets::{FiniteSet, PointSet};
use crate::system::{Dynamics, FiniteSystem, StreamSystem};

/// Pre-period `tail` (τ) and cycle length `cycle` (c) of a point: minimal
/// with `T^τ x = T^{τ+c} x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitShape {
    pub tail: usize,
    pub cycle: usize,
}

impl OrbitShape {
    /// Number of distinct points on the forward orbit.
    pub fn orbit_len(&self) -> usize {
        self.tail + self.cycle
    }
}

/// Walks the orbit until the first repeat. `x` must be a point of `sys`.
pub fn orbit_shape(sys: &FiniteSystem, x: usize) -> OrbitShape {
    let mut first_seen = vec![usize::MAX; sys.len()];
    let mut y = x;
    let mut k = 0;
    while first_seen[y] == usize::MAX {
        first_seen[y] = k;
        y = sys.next(y);
        k += 1;
    }
    OrbitShape {
        tail: first_seen[y],
        cycle: k - first_seen[y],
    }
}

/// Orbit shapes of every point.
pub fn orbit_shapes(sys: &FiniteSystem) -> Vec<OrbitShape> {
    sys.points().map(|x| orbit_shape(sys, x)).collect()
}

/// `(x, Tx, …, T^{depth−1}x)`.
pub fn forward_orbit<S: Dynamics>(sys: &S, x: &S::Point, depth: usize) -> Result<Vec<S::Point>> {
    sys.check_depth(depth)?;
    let mut out = Vec::with_capacity(depth);
    let mut y = x.clone();
    for k in 0..depth {
        if k + 1 < depth {
            let next = sys.step(&y);
            out.push(y);
            y = next;
        } else {
            out.push(y.clone());
        }
    }
    Ok(out)
}

/// Least `n ≥ 1` with `T^n x ∈ Y`. Membership of `x` itself is irrelevant.
pub fn hitting_time<S, Y>(sys: &S, target: &Y, x: &S::Point) -> Result<usize>
where
    S: Dynamics,
    Y: PointSet<S::Point> + ?Sized,
{
    let (bound, truncated) = sys.search_bound(x);
    let mut y = x.clone();
    for n in 1..=bound {
        y = sys.step(&y);
        if target.contains(&y) {
            return Ok(n);
        }
    }
    Err(Error::NotComplete {
        point: format!("{x:?}"),
        searched: bound,
        truncated,
    })
}

/// Least `m ≥ 0` with `T^m x ∈ Y`, searching at most `bound` steps.
pub fn entry_time<S, Y>(sys: &S, target: &Y, x: &S::Point, bound: usize) -> Option<usize>
where
    S: Dynamics,
    Y: PointSet<S::Point> + ?Sized,
{
    let mut y = x.clone();
    for m in 0..=bound {
        if target.contains(&y) {
            return Some(m);
        }
        if m < bound {
            y = sys.step(&y);
        }
    }
    None
}

/// Verdicts on a set `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetProperties {
    /// `T(Y) ⊆ Y`.
    pub forward_invariant: bool,
    /// `X = ⋃_{n ≥ 0} T^{−n} Y`.
    pub complete: bool,
    /// Least `n` with `X = ⋃_{m ≤ n} T^{−m} Y`.
    pub boundedness_radius: Option<usize>,
    /// `Y` meets every forward orbit (as a set) in at most one point.
    pub wandering: bool,
    /// `false` when the verdicts come from a truncated exploration.
    pub exact: bool,
}

/// Exact set properties on a finite system.
pub fn set_properties(sys: &FiniteSystem, y: &FiniteSet) -> SetProperties {
    let forward_invariant = y.iter().all(|p| y.contains_point(sys.next(p)));
    let mut radius = Some(0usize);
    let mut wandering = true;
    for x in sys.points() {
        let shape = orbit_shape(sys, x);
        match entry_time(sys, y, &x, shape.orbit_len()) {
            Some(m) => radius = radius.map(|r| r.max(m)),
            None => radius = None,
        }
        if wandering {
            let mut p = x;
            let mut hits = 0;
            for _ in 0..shape.orbit_len() {
                hits += usize::from(y.contains_point(p));
                p = sys.next(p);
            }
            wandering = hits <= 1;
        }
    }
    SetProperties {
        forward_invariant,
        complete: radius.is_some(),
        boundedness_radius: radius,
        wandering,
        exact: true,
    }
}

/// Set properties estimated on the seed orbits of a stream system, each
/// explored to `window` points. Always reported with `exact = false`.
///
/// A point counts as reaching `Y` only if it does so inside the explored
/// stretch of its seed orbit.
pub fn set_properties_windowed<P, Y>(sys: &StreamSystem<P>, y: &Y) -> SetProperties
where
    P: Clone + std::fmt::Debug + Send + Sync + 'static,
    Y: PointSet<P> + ?Sized,
{
    let window = sys.window().unwrap_or(1);
    let mut forward_invariant = true;
    let mut complete = true;
    let mut radius = 0usize;
    let mut wandering = true;
    for seed in sys.seeds() {
        let mut orbit = Vec::with_capacity(window + 1);
        let mut p = seed.clone();
        for _ in 0..=window {
            let next = sys.step(&p);
            orbit.push(p);
            p = next;
        }
        let inside: Vec<bool> = orbit.iter().map(|q| y.contains(q)).collect();
        for k in 0..window {
            if inside[k] && !inside[k + 1] {
                forward_invariant = false;
            }
        }
        let mut next_hit: Option<usize> = None;
        for k in (0..window).rev() {
            if inside[k] {
                next_hit = Some(k);
            }
            match next_hit {
                Some(j) => radius = radius.max(j - k),
                None => complete = false,
            }
        }
        if inside[..window].iter().filter(|&&m| m).count() > 1 {
            wandering = false;
        }
    }
    SetProperties {
        forward_invariant,
        complete,
        boundedness_radius: complete.then_some(radius),
        wandering,
        exact: false,
    }
}
