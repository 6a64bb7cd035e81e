//! Decidable point sets.

use std::fmt;
use std::sync::Arc;

/// A membership predicate over the points of a system.
pub trait PointSet<P>: Send + Sync {
    fn contains(&self, x: &P) -> bool;
}

impl<P, S: PointSet<P> + ?Sized> PointSet<P> for &S {
    fn contains(&self, x: &P) -> bool {
        (**self).contains(x)
    }
}

impl<P, S: PointSet<P> + ?Sized> PointSet<P> for Arc<S> {
    fn contains(&self, x: &P) -> bool {
        (**self).contains(x)
    }
}

/// An explicit subset of `{0, …, N−1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteSet {
    members: Vec<bool>,
}

impl FiniteSet {
    pub fn empty(size: usize) -> Self {
        FiniteSet {
            members: vec![false; size],
        }
    }

    pub fn full(size: usize) -> Self {
        FiniteSet {
            members: vec![true; size],
        }
    }

    /// Out-of-range points are ignored.
    pub fn from_points(size: usize, points: impl IntoIterator<Item = usize>) -> Self {
        let mut set = FiniteSet::empty(size);
        for p in points {
            if p < size {
                set.members[p] = true;
            }
        }
        set
    }

    pub fn from_mask(members: Vec<bool>) -> Self {
        FiniteSet { members }
    }

    pub fn universe_size(&self) -> usize {
        self.members.len()
    }

    pub fn contains_point(&self, x: usize) -> bool {
        self.members.get(x).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, x: usize) {
        if x < self.members.len() {
            self.members[x] = true;
        }
    }

    pub fn remove(&mut self, x: usize) {
        if x < self.members.len() {
            self.members[x] = false;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.iter().all(|x| other.contains_point(x))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl PointSet<usize> for FiniteSet {
    fn contains(&self, x: &usize) -> bool {
        self.contains_point(*x)
    }
}

/// A set given by an arbitrary closure.
pub struct Predicate<P> {
    test: Arc<dyn Fn(&P) -> bool + Send + Sync>,
}

impl<P> Predicate<P> {
    pub fn new(test: impl Fn(&P) -> bool + Send + Sync + 'static) -> Self {
        Predicate {
            test: Arc::new(test),
        }
    }
}

impl<P> Clone for Predicate<P> {
    fn clone(&self) -> Self {
        Predicate {
            test: Arc::clone(&self.test),
        }
    }
}

impl<P> fmt::Debug for Predicate<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Predicate(..)")
    }
}

impl<P> PointSet<P> for Predicate<P> {
    fn contains(&self, x: &P) -> bool {
        (self.test)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_set_basics() {
        let s = FiniteSet::from_points(4, [3, 1, 9]);
        assert_eq!(s.to_vec(), vec![1, 3]);
        assert_eq!(s.len(), 2);
        assert!(s.contains(&3));
        assert!(!s.contains(&9));
        assert!(s.is_subset(&FiniteSet::full(4)));
        assert!(FiniteSet::empty(3).is_empty());
        assert_eq!(format!("{s:?}"), "{1, 3}");
    }

    #[test]
    fn predicate_sets() {
        let odd = Predicate::new(|n: &u64| n % 2 == 1);
        assert!(odd.contains(&5));
        assert!(!odd.clone().contains(&4));
    }
}
