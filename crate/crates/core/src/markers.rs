//! Marker sequences for aperiodic transformations.
//!
//! * [`build_complete_markers`] turns a family separating orbit-related
//!   points into a vanishing sequence of complete sets, using the
//!   lexicographically least sign pattern whose cell meets the orbit
//!   infinitely often.
//! * [`complete_to_bounded`] turns a vanishing sequence of complete sets into
//!   one of bounded sets with radius at most `i²`.
//! * [`verify_markers`] checks decreasingness, vanishing and certified
//!   radii on a list of probes.
//!
//! Infinitude of `A_s ∩ O(x)` is not decidable in general, so the first
//! construction consults a [`FrequencyOracle`]. [`ArithmeticOracle`] decides
//! it for residue and bit predicates on the successor system.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::orbit::entry_time;
use crate::sets::PointSet;
use crate::system::{ArithmeticPredicate, Dynamics};

/// A sign pattern `s ∈ {0,1}^i`; `false` stands for `0` (inside `A_i`),
/// `true` for `1` (inside the complement).
pub type Pattern = [bool];

fn pattern_text(s: &Pattern) -> String {
    s.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Decides whether `A_s ∩ O(x)` is infinite. `None` means undecided.
pub trait FrequencyOracle<P>: Send + Sync {
    fn is_infinite(&self, pattern: &Pattern, x: &P) -> Option<bool>;

    /// Whether answers never depend on `x`, so that least patterns can be
    /// computed once.
    fn point_independent(&self) -> bool {
        false
    }
}

/// Largest period the arithmetic oracle enumerates.
const MAX_ENUMERATED_PERIOD: u64 = 1 << 22;

/// Frequency oracle for arithmetic predicates on `T(n) = n + 1`.
///
/// `A_s` is periodic in `n`, so it meets a forward ray infinitely often iff
/// it is nonempty. Pure bit families are decided directly (distinct bits are
/// independent); anything else is decided by enumerating residues modulo the
/// least common period.
#[derive(Debug, Clone)]
pub struct ArithmeticOracle {
    predicates: Vec<ArithmeticPredicate>,
}

impl ArithmeticOracle {
    pub fn new(predicates: Vec<ArithmeticPredicate>) -> Self {
        ArithmeticOracle { predicates }
    }

    fn cell_nonempty(&self, pattern: &Pattern) -> Option<bool> {
        let used = &self.predicates.get(..pattern.len())?;
        if used.iter().all(|p| matches!(p, ArithmeticPredicate::Bit { .. })) {
            let (mut ones, mut zeros) = (0u64, 0u64);
            for (pred, &complement) in used.iter().zip(pattern) {
                let ArithmeticPredicate::Bit { index } = *pred else { unreachable!() };
                if index >= 64 {
                    return None;
                }
                let bit = 1u64 << index;
                if complement {
                    zeros |= bit;
                } else {
                    ones |= bit;
                }
            }
            if ones & zeros != 0 {
                return Some(false);
            }
            return Some(true);
        }
        let mut period: u64 = 1;
        for pred in used.iter() {
            period = period.lcm(&pred.period()?);
            if period > MAX_ENUMERATED_PERIOD {
                return None;
            }
        }
        Some((0..period).any(|n| {
            used.iter()
                .zip(pattern)
                .all(|(pred, &complement)| pred.holds(n) != complement)
        }))
    }
}

impl FrequencyOracle<u64> for ArithmeticOracle {
    fn is_infinite(&self, pattern: &Pattern, _x: &u64) -> Option<bool> {
        self.cell_nonempty(pattern)
    }

    fn point_independent(&self) -> bool {
        true
    }
}

/// Sets `A_0, A_1, …` separating orbit-related points, with an oracle for
/// the infinitude of their cells along orbits.
#[derive(Clone)]
pub struct SeparatingFamily<P> {
    sets: Vec<Arc<dyn PointSet<P>>>,
    oracle: Arc<dyn FrequencyOracle<P>>,
    uniform: Arc<OnceLock<std::result::Result<Vec<bool>, Vec<bool>>>>,
}

impl<P> fmt::Debug for SeparatingFamily<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparatingFamily")
            .field("sets", &self.sets.len())
            .finish_non_exhaustive()
    }
}

impl<P: 'static> SeparatingFamily<P> {
    pub fn new(sets: Vec<Arc<dyn PointSet<P>>>, oracle: Arc<dyn FrequencyOracle<P>>) -> Self {
        SeparatingFamily {
            sets,
            oracle,
            uniform: Arc::new(OnceLock::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `x ∈ A_s = ⋂_{s(i)=0} A_i ∩ ⋂_{s(i)=1} (X \ A_i)`.
    pub fn in_cell(&self, pattern: &Pattern, x: &P) -> bool {
        self.sets
            .iter()
            .zip(pattern)
            .all(|(set, &complement)| set.contains(x) != complement)
    }

    /// `s_len(x)`, the lexicographically least pattern of length `len` whose
    /// cell meets `O(x)` infinitely often. Built bit by bit: since
    /// `A_s = A_{s0} ⊔ A_{s1}`, the least pattern of length `i + 1` extends
    /// the least one of length `i`.
    pub fn least_pattern(&self, x: &P, len: usize) -> std::result::Result<Vec<bool>, Vec<bool>> {
        if self.oracle.point_independent() {
            let full = self.uniform.get_or_init(|| self.search_pattern(x, self.len()));
            return match full {
                Ok(s) => Ok(s[..len.min(s.len())].to_vec()),
                Err(s) if s.len() > len => Ok(s[..len].to_vec()),
                Err(s) => Err(s.clone()),
            };
        }
        self.search_pattern(x, len)
    }

    fn search_pattern(&self, x: &P, len: usize) -> std::result::Result<Vec<bool>, Vec<bool>> {
        let mut s = Vec::with_capacity(len);
        for _ in 0..len {
            s.push(false);
            match self.oracle.is_infinite(&s, x) {
                Some(true) => continue,
                Some(false) => {}
                None => return Err(s),
            }
            *s.last_mut().expect("just pushed") = true;
            match self.oracle.is_infinite(&s, x) {
                Some(true) => {}
                _ => return Err(s),
            }
        }
        Ok(s)
    }

    /// Whether `x ∈ B' = ⋂_i {y : y ∈ A_{s_i(y)}}`, the cell of the full
    /// least pattern. `None` if the oracle fails at `x`.
    pub fn in_core(&self, x: &P) -> Option<bool> {
        let s = self.least_pattern(x, self.len()).ok()?;
        Some(self.in_cell(&s, x))
    }
}

impl SeparatingFamily<u64> {
    pub fn arithmetic(predicates: Vec<ArithmeticPredicate>) -> Self {
        let sets = predicates
            .iter()
            .map(|&p| Arc::new(p) as Arc<dyn PointSet<u64>>)
            .collect();
        SeparatingFamily::new(sets, Arc::new(ArithmeticOracle::new(predicates)))
    }

    /// Binary digits `A_i = {n : bit i of n is 1}` for `i < bits`.
    pub fn dyadic(bits: u32) -> Self {
        SeparatingFamily::arithmetic((0..bits.min(64)).map(ArithmeticPredicate::bit).collect())
    }
}

/// What is known about one marker set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Certificate {
    /// Every point reaches the set.
    pub complete: bool,
    /// Every point reaches the set within this many steps.
    pub radius: Option<usize>,
}

/// A sequence of marker sets `B_0, B_1, …` with certificates.
pub struct MarkerFamily<P> {
    sets: Vec<Arc<dyn PointSet<P>>>,
    certificates: Vec<Certificate>,
}

impl<P> Clone for MarkerFamily<P> {
    fn clone(&self) -> Self {
        MarkerFamily {
            sets: self.sets.clone(),
            certificates: self.certificates.clone(),
        }
    }
}

impl<P> fmt::Debug for MarkerFamily<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkerFamily")
            .field("certificates", &self.certificates)
            .finish_non_exhaustive()
    }
}

impl<P: 'static> MarkerFamily<P> {
    pub fn new(sets: Vec<Arc<dyn PointSet<P>>>, certificates: Vec<Certificate>) -> Self {
        assert_eq!(sets.len(), certificates.len(), "one certificate per set");
        MarkerFamily { sets, certificates }
    }

    pub fn empty() -> Self {
        MarkerFamily {
            sets: Vec::new(),
            certificates: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, i: usize) -> Option<&Arc<dyn PointSet<P>>> {
        self.sets.get(i)
    }

    pub fn certificate(&self, i: usize) -> Option<Certificate> {
        self.certificates.get(i).copied()
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certificates
    }

    pub fn contains(&self, i: usize, x: &P) -> bool {
        self.sets[i].contains(x)
    }

    /// Replaces `B_0` by the whole space, the normalization
    /// [`complete_to_bounded`] expects. Decreasingness is preserved.
    pub fn with_whole_space_first(mut self) -> Self {
        if self.sets.is_empty() {
            return self;
        }
        self.sets[0] = Arc::new(crate::sets::Predicate::new(|_: &P| true));
        self.certificates[0] = Certificate {
            complete: true,
            radius: Some(0),
        };
        self
    }
}

impl MarkerFamily<u64> {
    /// Arithmetic predicates on the successor system, certified by
    /// enumerating one period: complete iff nonempty, with radius the
    /// longest run of non-members.
    pub fn arithmetic(predicates: &[ArithmeticPredicate]) -> Self {
        let certificates = predicates.iter().map(arithmetic_certificate).collect();
        let sets = predicates
            .iter()
            .map(|&p| Arc::new(p) as Arc<dyn PointSet<u64>>)
            .collect();
        MarkerFamily { sets, certificates }
    }
}

fn arithmetic_certificate(pred: &ArithmeticPredicate) -> Certificate {
    let Some(period) = pred.period().filter(|&p| p <= MAX_ENUMERATED_PERIOD) else {
        return Certificate::default();
    };
    let members: Vec<u64> = (0..period).filter(|&n| pred.holds(n)).collect();
    let Some(&first) = members.first() else {
        return Certificate::default();
    };
    // longest wait: from just after one member to the next, cyclically
    let mut radius = first + period - members[members.len() - 1] - 1;
    for pair in members.windows(2) {
        radius = radius.max(pair[1] - pair[0] - 1);
    }
    Certificate {
        complete: true,
        radius: Some(radius as usize),
    }
}

struct CompleteMarker<P> {
    family: Arc<SeparatingFamily<P>>,
    index: usize,
}

impl<P: Send + Sync + 'static> PointSet<P> for CompleteMarker<P> {
    /// `x ∈ B_i' \ B'` where `B_i' = {x : x ∈ A_{s_i(x)}}` and `B'` is the
    /// intersection over every index of the family. An oracle failure at
    /// query time reads as non-membership.
    fn contains(&self, x: &P) -> bool {
        let Ok(s) = self.family.least_pattern(x, self.family.len()) else {
            return false;
        };
        self.family.in_cell(&s[..self.index], x) && !self.family.in_cell(&s, x)
    }
}

fn check_aperiodic<S: Dynamics>(sys: &S, seeds: &[S::Point]) -> Result<()> {
    for seed in seeds {
        // a closing orbit closes by step τ + c; a window only bounds the search
        let depth = sys.search_bound(seed).0 + 1;
        let mut orbit: Vec<S::Point> = Vec::with_capacity(depth);
        let mut y = seed.clone();
        for k in 0..depth {
            if orbit.iter().any(|p| sys.same_point(p, &y)) {
                return Err(Error::OrbitClosure {
                    point: format!("{seed:?}"),
                    after: k,
                });
            }
            let next = sys.step(&y);
            orbit.push(y);
            y = next;
        }
    }
    Ok(())
}

/// Vanishing sequence of complete sets `B_0, …, B_{depth−1}` from a
/// separating family.
///
/// The seed orbits are explored within the system window to rule out
/// orbit closure, and the oracle is exercised on every seed so that it is
/// known to be total there.
pub fn build_complete_markers<S>(
    sys: &S,
    seeds: &[S::Point],
    family: SeparatingFamily<S::Point>,
    depth: usize,
) -> Result<MarkerFamily<S::Point>>
where
    S: Dynamics,
    S::Point: 'static,
{
    if depth == 0 {
        return Ok(MarkerFamily::empty());
    }
    if depth > family.len() {
        return Err(Error::FamilyTooShort {
            needed: depth,
            found: family.len(),
        });
    }
    check_aperiodic(sys, seeds)?;
    for seed in seeds {
        family
            .least_pattern(seed, family.len())
            .map_err(|s| Error::OracleFailure {
                pattern: pattern_text(&s),
                point: format!("{seed:?}"),
            })?;
    }
    let family = Arc::new(family);
    let sets = (0..depth)
        .map(|index| {
            Arc::new(CompleteMarker {
                family: Arc::clone(&family),
                index,
            }) as Arc<dyn PointSet<S::Point>>
        })
        .collect();
    let certificates = vec![
        Certificate {
            complete: true,
            radius: None,
        };
        depth
    ];
    Ok(MarkerFamily::new(sets, certificates))
}

struct BoundedMarker<S: Dynamics> {
    sys: S,
    a: Vec<Arc<dyn PointSet<S::Point>>>,
    index: usize,
}

impl<S: Dynamics> BoundedMarker<S> {
    fn reaches_within(&self, x: &S::Point, target: usize, steps: usize) -> bool {
        entry_time(&self.sys, &self.a[target], x, steps).is_some()
    }
}

impl<S: Dynamics> PointSet<S::Point> for BoundedMarker<S> {
    /// `B_i = A_i ∪ ⋃_{j<i} (A_j \ T^{−≤i} A_{j+1})`.
    fn contains(&self, x: &S::Point) -> bool {
        let i = self.index;
        self.a[i].contains(x)
            || (0..i).any(|j| self.a[j].contains(x) && !self.reaches_within(x, j + 1, i))
    }
}

/// Vanishing sequence of bounded sets `B_0, …, B_{count−1}` from a
/// vanishing sequence of complete sets with `A_0 = X`. Each `B_i` is
/// certified with radius `i²`.
pub fn complete_to_bounded<S>(
    sys: &S,
    a_seq: &MarkerFamily<S::Point>,
    count: usize,
) -> Result<MarkerFamily<S::Point>>
where
    S: Dynamics + Clone + 'static,
    S::Point: 'static,
{
    if a_seq.len() < count {
        return Err(Error::FamilyTooShort {
            needed: count,
            found: a_seq.len(),
        });
    }
    if let Some(index) = (0..count).find(|&i| !a_seq.certificates[i].complete) {
        return Err(Error::MissingCertificate { index });
    }
    if count > 0 && a_seq.certificates[0].radius != Some(0) {
        return Err(Error::NotWholeSpace {
            point: "a point outside A_0 (certificate radius is not 0)".into(),
        });
    }
    let a: Vec<_> = a_seq.sets[..count].to_vec();
    let sets = (0..count)
        .map(|index| {
            Arc::new(BoundedMarker {
                sys: sys.clone(),
                a: a.clone(),
                index,
            }) as Arc<dyn PointSet<S::Point>>
        })
        .collect();
    let certificates = (0..count)
        .map(|i| Certificate {
            complete: true,
            radius: Some(i * i),
        })
        .collect();
    Ok(MarkerFamily::new(sets, certificates))
}

/// One failed check at one probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkerViolation {
    /// `probe ∈ B_index` but `probe ∉ B_{index−1}`.
    NotDecreasing { probe: String, index: usize },
    /// `probe` does not reach `B_index` within the certified radius.
    RadiusExceeded {
        probe: String,
        index: usize,
        radius: usize,
    },
}

/// Outcome of [`verify_markers`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerReport {
    pub probes: usize,
    /// Number of leading indices examined.
    pub index_window: usize,
    pub violations: Vec<MarkerViolation>,
    /// Per index, the largest entry time observed over all probes, or
    /// `None` when some probe was not seen to enter.
    pub observed_radius: Vec<Option<usize>>,
    /// Per index, how many probes were not seen to enter within the
    /// search bound (only for sets without a certified radius).
    pub unreached: Vec<usize>,
    /// Probes lying in every set of the family. A finite family can only
    /// witness vanishing, so these are inconclusive rather than violations.
    pub unvanished: Vec<String>,
}

impl MarkerReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks decreasingness and certified radii within the first `window`
/// indices, and vanishing (some set of the family misses the probe) over
/// the whole family.
pub fn verify_markers<S>(
    sys: &S,
    family: &MarkerFamily<S::Point>,
    probes: &[S::Point],
    window: usize,
) -> MarkerReport
where
    S: Dynamics,
    S::Point: 'static,
{
    let index_window = window.min(family.len());
    let mut violations = Vec::new();
    let mut observed_radius = vec![Some(0usize); index_window];
    let mut unreached = vec![0usize; index_window];
    let mut unvanished = Vec::new();
    for x in probes {
        let probe = format!("{x:?}");
        let member: Vec<bool> = (0..index_window).map(|i| family.contains(i, x)).collect();
        for i in 1..index_window {
            if member[i] && !member[i - 1] {
                violations.push(MarkerViolation::NotDecreasing {
                    probe: probe.clone(),
                    index: i,
                });
            }
        }
        // the deepest set is the likeliest witness
        if !family.is_empty() && (0..family.len()).rev().all(|i| family.contains(i, x)) {
            unvanished.push(probe.clone());
        }
        for i in 0..index_window {
            let cert = family.certificates[i];
            let bound = cert.radius.unwrap_or_else(|| sys.search_bound(x).0);
            match entry_time(sys, &family.sets[i], x, bound) {
                Some(m) => observed_radius[i] = observed_radius[i].map(|r| r.max(m)),
                None => {
                    observed_radius[i] = None;
                    match cert.radius {
                        Some(radius) => violations.push(MarkerViolation::RadiusExceeded {
                            probe: probe.clone(),
                            index: i,
                            radius,
                        }),
                        None => unreached[i] += 1,
                    }
                }
            }
        }
    }
    MarkerReport {
        probes: probes.len(),
        index_window,
        violations,
        observed_radius,
        unreached,
        unvanished,
    }
}
