//! System representations: exact finite functional graphs and lazily
//! evaluated stream systems with a hard exploration window.

use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::sets::PointSet;

/// The four observables carried by every system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    F,
    G,
    H,
    W,
}

/// A transformation `T` together with observables `f`, `g > 0`, `h` and a
/// weight `w > 0`.
pub trait Dynamics: Send + Sync {
    type Point: Clone + fmt::Debug + Send + Sync;

    fn step(&self, x: &Self::Point) -> Self::Point;

    fn observe(&self, obs: Observable, x: &Self::Point) -> Rational;

    fn same_point(&self, a: &Self::Point, b: &Self::Point) -> bool;

    /// Maximum orbit depth any traversal may reach; `None` for exact
    /// backends.
    fn window(&self) -> Option<usize>;

    fn check_depth(&self, depth: usize) -> Result<()> {
        match self.window() {
            Some(window) if depth > window => Err(Error::WindowExceeded {
                requested: depth,
                window,
            }),
            _ => Ok(()),
        }
    }

    /// Longest forward search a hitting-time query performs, and whether
    /// that bound is a truncation.
    fn search_bound(&self, x: &Self::Point) -> (usize, bool);

    fn iterate(&self, x: &Self::Point, k: usize) -> Self::Point {
        let mut y = x.clone();
        for _ in 0..k {
            y = self.step(&y);
        }
        y
    }
}

/// A finite functional graph on `{0, …, N−1}` with exact rational
/// observables.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteSystem {
    step: Vec<usize>,
    f: Vec<Rational>,
    g: Vec<Rational>,
    h: Vec<Rational>,
    w: Vec<Rational>,
}

impl FiniteSystem {
    pub fn new(
        step: Vec<usize>,
        f: Vec<Rational>,
        g: Vec<Rational>,
        h: Vec<Rational>,
        w: Vec<Rational>,
    ) -> Result<Self> {
        let size = step.len();
        if size == 0 {
            return Err(Error::EmptySystem);
        }
        for (point, &target) in step.iter().enumerate() {
            if target >= size {
                return Err(Error::StepOutOfRange {
                    point,
                    target,
                    size,
                });
            }
        }
        for (field, values) in [("f", &f), ("g", &g), ("h", &h), ("w", &w)] {
            if values.len() != size {
                return Err(Error::LengthMismatch {
                    field,
                    expected: size,
                    found: values.len(),
                });
            }
        }
        for (field, values) in [("g", &g), ("w", &w)] {
            if let Some(point) = values.iter().position(|v| !v.is_positive()) {
                return Err(Error::NonPositive {
                    field,
                    point,
                    value: rational::render(&values[point]),
                });
            }
        }
        Ok(FiniteSystem { step, f, g, h, w })
    }

    /// `g ≡ 1`, `h ≡ 0`, `w ≡ 1`.
    pub fn with_defaults(step: Vec<usize>, f: Vec<Rational>) -> Result<Self> {
        let size = step.len();
        FiniteSystem::new(
            step,
            f,
            vec![rational::one(); size],
            vec![rational::zero(); size],
            vec![rational::one(); size],
        )
    }

    pub fn len(&self) -> usize {
        self.step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.step.is_empty()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.step.len()
    }

    pub fn step_table(&self) -> &[usize] {
        &self.step
    }

    pub fn next(&self, x: usize) -> usize {
        self.step[x]
    }

    pub fn values(&self, obs: Observable) -> &[Rational] {
        match obs {
            Observable::F => &self.f,
            Observable::G => &self.g,
            Observable::H => &self.h,
            Observable::W => &self.w,
        }
    }

    pub fn value(&self, obs: Observable, x: usize) -> &Rational {
        &self.values(obs)[x]
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidPoint(x))
        }
    }

    /// Replaces one observable, revalidating positivity where required.
    pub fn with_values(&self, obs: Observable, values: Vec<Rational>) -> Result<Self> {
        let mut parts = [
            self.f.clone(),
            self.g.clone(),
            self.h.clone(),
            self.w.clone(),
        ];
        let slot = match obs {
            Observable::F => 0,
            Observable::G => 1,
            Observable::H => 2,
            Observable::W => 3,
        };
        parts[slot] = values;
        let [f, g, h, w] = parts;
        FiniteSystem::new(self.step.clone(), f, g, h, w)
    }

    /// All `x` with `Tx = y`, in increasing order.
    pub fn preimages(&self, y: usize) -> Vec<usize> {
        self.points().filter(|&x| self.step[x] == y).collect()
    }

    /// First collision `(x₁, x₂, Tx₁)` with `x₁ < x₂` if `T` is not injective.
    pub fn injectivity_witness(&self) -> Option<(usize, usize, usize)> {
        let mut seen = vec![None; self.len()];
        for x in self.points() {
            let y = self.step[x];
            if let Some(first) = seen[y] {
                return Some((first, x, y));
            }
            seen[y] = Some(x);
        }
        None
    }

    pub fn is_permutation(&self) -> bool {
        self.injectivity_witness().is_none()
    }
}

impl fmt::Debug for FiniteSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Rational]| v.iter().map(rational::render).collect::<Vec<_>>();
        f.debug_struct("FiniteSystem")
            .field("step", &self.step)
            .field("f", &show(&self.f))
            .field("g", &show(&self.g))
            .field("h", &show(&self.h))
            .field("w", &show(&self.w))
            .finish()
    }
}

impl Dynamics for FiniteSystem {
    type Point = usize;

    fn step(&self, x: &usize) -> usize {
        self.step[*x]
    }

    fn observe(&self, obs: Observable, x: &usize) -> Rational {
        self.value(obs, *x).clone()
    }

    fn same_point(&self, a: &usize, b: &usize) -> bool {
        a == b
    }

    fn window(&self) -> Option<usize> {
        None
    }

    /// `{T^n x : 1 ≤ n ≤ τ + c}` already covers every point of `O(x)` other
    /// than a non-recurrent `x`, so the bound is exact.
    fn search_bound(&self, x: &usize) -> (usize, bool) {
        let shape = crate::orbit::orbit_shape(self, *x);
        (shape.tail + shape.cycle, false)
    }
}

type StepFn<P> = Arc<dyn Fn(&P) -> P + Send + Sync>;
type ValueFn<P> = Arc<dyn Fn(&P) -> Rational + Send + Sync>;
type EqFn<P> = Arc<dyn Fn(&P, &P) -> bool + Send + Sync>;

/// A lazily evaluated transformation on opaque states.
///
/// Callbacks must be deterministic, and `g`, `w` must return positive
/// values. Every traversal is capped at `window` steps.
pub struct StreamSystem<P> {
    step: StepFn<P>,
    observables: [ValueFn<P>; 4],
    same: EqFn<P>,
    seeds: Vec<P>,
    window: usize,
}

impl<P> Clone for StreamSystem<P>
where
    P: Clone,
{
    fn clone(&self) -> Self {
        StreamSystem {
            step: Arc::clone(&self.step),
            observables: self.observables.clone(),
            same: Arc::clone(&self.same),
            seeds: self.seeds.clone(),
            window: self.window,
        }
    }
}

impl<P: fmt::Debug> fmt::Debug for StreamSystem<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StreamSystem")
            .field("seeds", &self.seeds)
            .field("window", &self.window)
            .finish_non_exhaustive()
    }
}

impl<P: Clone + fmt::Debug + Send + Sync + 'static> StreamSystem<P> {
    /// Observables default to `f ≡ 0`, `g ≡ 1`, `h ≡ 0`, `w ≡ 1`.
    pub fn new(
        step: impl Fn(&P) -> P + Send + Sync + 'static,
        same: impl Fn(&P, &P) -> bool + Send + Sync + 'static,
        window: usize,
    ) -> Result<Self> {
        if window == 0 {
            return Err(Error::ZeroWindow);
        }
        let zero: ValueFn<P> = Arc::new(|_| rational::zero());
        let one: ValueFn<P> = Arc::new(|_| rational::one());
        Ok(StreamSystem {
            step: Arc::new(step),
            observables: [zero.clone(), one.clone(), zero, one],
            same: Arc::new(same),
            seeds: Vec::new(),
            window,
        })
    }

    pub fn with_observable(
        mut self,
        obs: Observable,
        value: impl Fn(&P) -> Rational + Send + Sync + 'static,
    ) -> Self {
        self.observables[slot(obs)] = Arc::new(value);
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<P>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_window(mut self, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::ZeroWindow);
        }
        self.window = window;
        Ok(self)
    }

    pub fn seeds(&self) -> &[P] {
        &self.seeds
    }
}

fn slot(obs: Observable) -> usize {
    match obs {
        Observable::F => 0,
        Observable::G => 1,
        Observable::H => 2,
        Observable::W => 3,
    }
}

impl<P: Clone + fmt::Debug + Send + Sync> Dynamics for StreamSystem<P> {
    type Point = P;

    fn step(&self, x: &P) -> P {
        (self.step)(x)
    }

    fn observe(&self, obs: Observable, x: &P) -> Rational {
        (self.observables[slot(obs)])(x)
    }

    fn same_point(&self, a: &P, b: &P) -> bool {
        (self.same)(a, b)
    }

    fn window(&self) -> Option<usize> {
        Some(self.window)
    }

    fn search_bound(&self, _x: &P) -> (usize, bool) {
        (self.window, true)
    }
}

/// Residue-class and binary-digit predicates on `ℕ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithmeticPredicate {
    /// `n ≡ residue (mod modulus)`.
    Residue { modulus: u64, residue: u64 },
    /// Bit `index` of `n` is 1.
    Bit { index: u32 },
}

impl ArithmeticPredicate {
    pub fn residue(modulus: u64, residue: u64) -> Self {
        ArithmeticPredicate::Residue { modulus, residue }
    }

    pub fn bit(index: u32) -> Self {
        ArithmeticPredicate::Bit { index }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            ArithmeticPredicate::Residue { modulus, .. } => modulus >= 1,
            ArithmeticPredicate::Bit { index } => index < 64,
        }
    }

    pub fn holds(&self, n: u64) -> bool {
        match *self {
            ArithmeticPredicate::Residue { modulus, residue } => {
                modulus != 0 && n % modulus == residue % modulus
            }
            ArithmeticPredicate::Bit { index } => index < 64 && (n >> index) & 1 == 1,
        }
    }

    /// Least period of the membership pattern along `ℕ` (`None` when it
    /// does not fit in `u64`).
    pub fn period(&self) -> Option<u64> {
        match *self {
            ArithmeticPredicate::Residue { modulus, .. } => Some(modulus.max(1)),
            ArithmeticPredicate::Bit { index } => 1u64.checked_shl(index + 1),
        }
    }
}

impl PointSet<u64> for ArithmeticPredicate {
    fn contains(&self, x: &u64) -> bool {
        self.holds(*x)
    }
}

/// Observable on the successor system: a constant or a two-valued
/// indicator of an arithmetic predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuccessorObservable {
    Constant(Rational),
    Indicator {
        when: ArithmeticPredicate,
        on: Rational,
        off: Rational,
    },
}

impl SuccessorObservable {
    pub fn constant(value: Rational) -> Self {
        SuccessorObservable::Constant(value)
    }

    /// `1` on the predicate, `0` elsewhere.
    pub fn indicator(when: ArithmeticPredicate) -> Self {
        SuccessorObservable::Indicator {
            when,
            on: rational::one(),
            off: rational::zero(),
        }
    }

    pub fn eval(&self, n: u64) -> Rational {
        match self {
            SuccessorObservable::Constant(v) => v.clone(),
            SuccessorObservable::Indicator { when, on, off } => {
                if when.holds(n) {
                    on.clone()
                } else {
                    off.clone()
                }
            }
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            SuccessorObservable::Constant(v) => v.is_positive(),
            SuccessorObservable::Indicator { on, off, .. } => on.is_positive() && off.is_positive(),
        }
    }
}

/// Observables of a successor-on-`ℕ` instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessorObservables {
    pub f: SuccessorObservable,
    pub g: SuccessorObservable,
    pub h: SuccessorObservable,
    pub w: SuccessorObservable,
}

impl Default for SuccessorObservables {
    fn default() -> Self {
        SuccessorObservables {
            f: SuccessorObservable::constant(rational::zero()),
            g: SuccessorObservable::constant(rational::one()),
            h: SuccessorObservable::constant(rational::zero()),
            w: SuccessorObservable::constant(rational::one()),
        }
    }
}

impl StreamSystem<u64> {
    /// `T(n) = n + 1` on `ℕ`, seeded at `0`.
    pub fn successor(observables: SuccessorObservables, window: usize) -> Result<Self> {
        for (field, obs) in [("g", &observables.g), ("w", &observables.w)] {
            if !obs.is_positive() {
                return Err(Error::NonPositive {
                    field,
                    point: 0,
                    value: format!("{obs:?}"),
                });
            }
        }
        let SuccessorObservables { f, g, h, w } = observables;
        Ok(StreamSystem::new(|n: &u64| n.wrapping_add(1), |a, b| a == b, window)?
            .with_observable(Observable::F, move |n| f.eval(*n))
            .with_observable(Observable::G, move |n| g.eval(*n))
            .with_observable(Observable::H, move |n| h.eval(*n))
            .with_observable(Observable::W, move |n| w.eval(*n))
            .with_seeds(vec![0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn finite_system_validation() {
        let ok = FiniteSystem::with_defaults(vec![1, 0], vec![int(1), int(3)]).unwrap();
        assert_eq!(ok.len(), 2);
        assert!(ok.is_permutation());
        assert_eq!(
            FiniteSystem::with_defaults(vec![2, 0], vec![int(1), int(3)]),
            Err(Error::StepOutOfRange {
                point: 0,
                target: 2,
                size: 2
            })
        );
        assert!(matches!(
            FiniteSystem::with_defaults(vec![0], vec![]),
            Err(Error::LengthMismatch { field: "f", .. })
        ));
        assert!(matches!(
            ok.with_values(Observable::W, vec![int(1), int(0)]),
            Err(Error::NonPositive { field: "w", point: 1, .. })
        ));
        assert_eq!(FiniteSystem::with_defaults(vec![], vec![]), Err(Error::EmptySystem));
    }

    #[test]
    fn injectivity() {
        let sys = FiniteSystem::with_defaults(vec![1, 2, 1], vec![int(0); 3]).unwrap();
        assert_eq!(sys.injectivity_witness(), Some((0, 2, 1)));
        assert_eq!(sys.preimages(1), vec![0, 2]);
    }

    #[test]
    fn arithmetic_predicates() {
        let p = ArithmeticPredicate::residue(4, 3);
        assert!(p.holds(7) && !p.holds(6));
        assert_eq!(p.period(), Some(4));
        let b = ArithmeticPredicate::bit(2);
        assert!(b.holds(4) && b.holds(7) && !b.holds(8));
        assert_eq!(b.period(), Some(8));
        assert_eq!(ArithmeticPredicate::bit(63).period(), None);
        assert!(!ArithmeticPredicate::residue(0, 0).is_valid());
    }

    #[test]
    fn successor_system() {
        let obs = SuccessorObservables {
            f: SuccessorObservable::indicator(ArithmeticPredicate::residue(2, 0)),
            w: SuccessorObservable::constant(frac(1, 2)),
            ..Default::default()
        };
        let sys = StreamSystem::successor(obs, 8).unwrap();
        assert_eq!(sys.step(&5), 6);
        assert_eq!(sys.observe(Observable::F, &4), int(1));
        assert_eq!(sys.observe(Observable::F, &5), int(0));
        assert_eq!(sys.observe(Observable::W, &5), frac(1, 2));
        assert_eq!(sys.check_depth(9), Err(Error::WindowExceeded { requested: 9, window: 8 }));
        assert_eq!(StreamSystem::successor(Default::default(), 0).unwrap_err(), Error::ZeroWindow);
        let bad = SuccessorObservables {
            g: SuccessorObservable::indicator(ArithmeticPredicate::bit(0)),
            ..Default::default()
        };
        assert!(matches!(StreamSystem::successor(bad, 4), Err(Error::NonPositive { field: "g", .. })));
    }
}
