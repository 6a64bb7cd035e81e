//! Orbit tilings between consecutive marker visits.
//!
//! Given markers `B_i`, a point `x ∈ B_i` and `hit = τ_{B_i}(x)`, a tiling is
//! a cut sequence `0 = n_0 < … < n_ℓ = hit` in which every tile
//! `[n_k, n_{k+1})` is either a ratio tile (`R_{n_{k+1}−n_k}(T^{n_k}x) > h`)
//! or a singleton at a point of the exceptional set `A_i`.
//!
//! The exceptional set quantifies over `1 ≤ n ≤ hit`. Ratios of length zero
//! do not exist, and with `n < hit` a point one step before `B_i` would be
//! exceptional vacuously while its singleton tile could also be a ratio
//! tile. With the closed range, `y ∈ A_i` forces `R_1(y) ≤ h(y)`, and a
//! point outside `A_i` always has a cut no later than the next visit.

use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use crate::cocycle::SumWalk;
use crate::error::{Error, Result};
use crate::markers::MarkerFamily;
use crate::orbit::hitting_time;
use crate::periodic::eventually_periodic_part;
use crate::rational::Rational;
use crate::sets::{FiniteSet, PointSet};
use crate::system::{Dynamics, FiniteSystem, Observable};

/// Kind of one tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TileTag {
    RatioTile,
    SingletonTile,
}

/// Cut sequence along the orbit of `base`, one tag per tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tiling<P> {
    pub base: P,
    pub cuts: Vec<usize>,
    pub tags: Vec<TileTag>,
}

impl<P> Tiling<P> {
    pub fn tiles(&self) -> usize {
        self.cuts.len().saturating_sub(1)
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.cuts.windows(2).map(|w| w[1].saturating_sub(w[0])).collect()
    }
}

/// `(x, n) ↦ f_n(x)`, called for `n ≥ 1`.
pub type TargetSequence<P> = Arc<dyn Fn(&P, usize) -> Rational + Send + Sync>;
/// A rational-valued function of a point.
pub type PointFunction<P> = Arc<dyn Fn(&P) -> Rational + Send + Sync>;

/// What a non-singleton tile must achieve.
#[derive(Clone)]
pub enum TilerMode<P> {
    /// `R_len(y) > h(y)` with `h` the system's `h` observable.
    Ratio,
    /// `|f_len(y) − h_j(y)| < ε(y)` for the selected target `j`.
    MetricTarget {
        sequence: TargetSequence<P>,
        targets: Vec<PointFunction<P>>,
        epsilon: PointFunction<P>,
        selected: usize,
    },
}

impl<P> fmt::Debug for TilerMode<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilerMode::Ratio => f.write_str("Ratio"),
            TilerMode::MetricTarget { targets, selected, .. } => f
                .debug_struct("MetricTarget")
                .field("targets", &targets.len())
                .field("selected", selected)
                .finish_non_exhaustive(),
        }
    }
}

/// Markers, the index `i` and the tile criterion.
#[derive(Clone)]
pub struct TilerConfig<P> {
    pub markers: MarkerFamily<P>,
    pub index: usize,
    pub mode: TilerMode<P>,
    /// Replaces the derived exceptional set when present.
    pub exceptional: Option<Arc<dyn PointSet<P>>>,
}

impl<P: 'static> TilerConfig<P> {
    pub fn ratio(markers: MarkerFamily<P>, index: usize) -> Self {
        TilerConfig {
            markers,
            index,
            mode: TilerMode::Ratio,
            exceptional: None,
        }
    }

    pub fn metric(
        markers: MarkerFamily<P>,
        index: usize,
        sequence: TargetSequence<P>,
        targets: Vec<PointFunction<P>>,
        epsilon: PointFunction<P>,
        selected: usize,
    ) -> Self {
        TilerConfig {
            markers,
            index,
            mode: TilerMode::MetricTarget {
                sequence,
                targets,
                epsilon,
                selected,
            },
            exceptional: None,
        }
    }

    pub fn with_exceptional(mut self, set: Arc<dyn PointSet<P>>) -> Self {
        self.exceptional = Some(set);
        self
    }

    fn marker(&self) -> Result<&Arc<dyn PointSet<P>>> {
        self.markers.set(self.index).ok_or(Error::MarkerIndex {
            index: self.index,
            len: self.markers.len(),
        })
    }

    fn check_target(&self) -> Result<()> {
        if let TilerMode::MetricTarget { targets, selected, .. } = &self.mode {
            if *selected >= targets.len() {
                return Err(Error::TargetIndex {
                    index: *selected,
                    count: targets.len(),
                });
            }
        }
        Ok(())
    }
}

impl<P> fmt::Debug for TilerConfig<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TilerConfig")
            .field("index", &self.index)
            .field("mode", &self.mode)
            .field("explicit_exceptional", &self.exceptional.is_some())
            .finish_non_exhaustive()
    }
}

/// Least `n ∈ 1..=bound` meeting the tile criterion from `y` (for target
/// `target` in metric mode).
fn first_cut<S: Dynamics>(
    sys: &S,
    mode: &TilerMode<S::Point>,
    target: usize,
    y: &S::Point,
    bound: usize,
) -> Result<Option<usize>> {
    match mode {
        TilerMode::Ratio => {
            let h = sys.observe(Observable::H, y);
            let mut walk = SumWalk::new(sys, y);
            for n in 1..=bound {
                let state = walk.next().ok_or(Error::WindowExceeded {
                    requested: n,
                    window: sys.window().unwrap_or(n - 1),
                })?;
                if state.sum_f > &h * &state.sum_g {
                    return Ok(Some(n));
                }
            }
            Ok(None)
        }
        TilerMode::MetricTarget { .. } => Ok((1..=bound).find(|&n| metric_close(mode, target, y, n))),
    }
}

/// `|f_n(y) − h_target(y)| < ε(y)`.
fn metric_close<P>(mode: &TilerMode<P>, target: usize, y: &P, n: usize) -> bool {
    let TilerMode::MetricTarget {
        sequence,
        targets,
        epsilon,
        ..
    } = mode
    else {
        return false;
    };
    let d = sequence(y, n) - targets[target](y);
    d.abs() < epsilon(y)
}

/// The exceptional set `A_i` of a tiler configuration.
///
/// Ratio mode: `y ∈ A_i` iff `R_n(y) ≤ h(y)` for all `1 ≤ n ≤ τ_{B_i}(y)`.
/// Metric mode: iff for some target `j`, `|f_n(y) − h_j(y)| ≥ ε(y)` for all
/// such `n`.
pub struct ExceptionalSet<'a, S: Dynamics> {
    sys: &'a S,
    marker: Arc<dyn PointSet<S::Point>>,
    mode: TilerMode<S::Point>,
}

impl<S: Dynamics> ExceptionalSet<'_, S>
where
    S::Point: 'static,
{
    pub fn try_contains(&self, y: &S::Point) -> Result<bool> {
        let hit = hitting_time(self.sys, &self.marker, y)?;
        let targets = match &self.mode {
            TilerMode::Ratio => 1,
            TilerMode::MetricTarget { targets, .. } => targets.len(),
        };
        for j in 0..targets {
            if first_cut(self.sys, &self.mode, j, y, hit)?.is_none() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

impl<S: Dynamics> PointSet<S::Point> for ExceptionalSet<'_, S>
where
    S::Point: 'static,
{
    /// Points where the hitting time is unavailable read as outside.
    fn contains(&self, y: &S::Point) -> bool {
        self.try_contains(y).unwrap_or(false)
    }
}

/// The derived exceptional set of `config` (its explicit override is not
/// consulted here).
pub fn exceptional_set<'a, S>(sys: &'a S, config: &TilerConfig<S::Point>) -> Result<ExceptionalSet<'a, S>>
where
    S: Dynamics,
    S::Point: 'static,
{
    Ok(ExceptionalSet {
        sys,
        marker: Arc::clone(config.marker()?),
        mode: config.mode.clone(),
    })
}

fn in_exceptional<S>(sys: &S, config: &TilerConfig<S::Point>, y: &S::Point) -> Result<bool>
where
    S: Dynamics,
    S::Point: 'static,
{
    match &config.exceptional {
        Some(set) => Ok(set.contains(y)),
        None => exceptional_set(sys, config)?.try_contains(y),
    }
}

fn selected(mode: &TilerMode<impl Sized>) -> usize {
    match mode {
        TilerMode::Ratio => 0,
        TilerMode::MetricTarget { selected, .. } => *selected,
    }
}

/// Greedy tiling of `[0, τ_{B_i}(x))`: a singleton at every exceptional
/// point, otherwise the shortest tile meeting the criterion.
pub fn greedy_tile<S>(sys: &S, config: &TilerConfig<S::Point>, x: &S::Point) -> Result<Tiling<S::Point>>
where
    S: Dynamics,
    S::Point: 'static,
{
    config.check_target()?;
    let hit = hitting_time(sys, config.marker()?, x)?;
    let target = selected(&config.mode);
    let mut cuts = vec![0];
    let mut tags = Vec::new();
    let mut s = 0;
    let mut y = x.clone();
    while s < hit {
        let len = if in_exceptional(sys, config, &y)? {
            tags.push(TileTag::SingletonTile);
            1
        } else {
            let len = first_cut(sys, &config.mode, target, &y, hit - s)?.ok_or_else(|| Error::NoCut {
                point: format!("{x:?}"),
                start: s,
                hit,
            })?;
            tags.push(TileTag::RatioTile);
            len
        };
        y = sys.iterate(&y, len);
        s += len;
        cuts.push(s);
    }
    Ok(Tiling {
        base: x.clone(),
        cuts,
        tags,
    })
}

/// One failed requirement of a tiling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TilingViolation {
    /// A quantity needed for the check could not be computed.
    Unavailable { tile: Option<usize>, reason: String },
    StartNotZero { first: Option<usize> },
    EndNotHit { last: Option<usize>, hit: usize },
    NotIncreasing { tile: usize },
    TagCount { tags: usize, tiles: usize },
    SingletonLength { tile: usize, length: usize },
    /// Neither the criterion nor the singleton condition holds.
    Neither { tile: usize },
    /// Both hold.
    Both { tile: usize },
    /// The tag names a condition that does not hold.
    TagMismatch { tile: usize, tag: TileTag },
}

/// Outcome of [`validate_tiling`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingReport {
    pub base: String,
    pub violations: Vec<TilingViolation>,
}

impl TilingReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn criterion_holds<S: Dynamics>(
    sys: &S,
    mode: &TilerMode<S::Point>,
    y: &S::Point,
    len: usize,
) -> Result<bool> {
    if len == 0 {
        return Ok(false);
    }
    match mode {
        TilerMode::Ratio => {
            let h = sys.observe(Observable::H, y);
            let state = SumWalk::new(sys, y).nth(len - 1).ok_or(Error::WindowExceeded {
                requested: len,
                window: sys.window().unwrap_or(0),
            })?;
            Ok(state.sum_f > h * state.sum_g)
        }
        TilerMode::MetricTarget { selected, .. } => Ok(metric_close(mode, *selected, y, len)),
    }
}

/// Checks `n_0 = 0`, `n_ℓ = τ_{B_i}(x)`, strict increase, tags, and that
/// each tile satisfies exactly one of the two tile conditions.
pub fn validate_tiling<S>(sys: &S, config: &TilerConfig<S::Point>, t: &Tiling<S::Point>) -> TilingReport
where
    S: Dynamics,
    S::Point: 'static,
{
    let mut violations = Vec::new();
    let base = format!("{:?}", t.base);
    if let Err(e) = config.check_target() {
        violations.push(TilingViolation::Unavailable {
            tile: None,
            reason: e.to_string(),
        });
        return TilingReport { base, violations };
    }
    if t.cuts.first() != Some(&0) {
        violations.push(TilingViolation::StartNotZero {
            first: t.cuts.first().copied(),
        });
    }
    match config.marker().and_then(|b| hitting_time(sys, b, &t.base)) {
        Ok(hit) => {
            if t.cuts.last() != Some(&hit) {
                violations.push(TilingViolation::EndNotHit {
                    last: t.cuts.last().copied(),
                    hit,
                });
            }
        }
        Err(e) => violations.push(TilingViolation::Unavailable {
            tile: None,
            reason: e.to_string(),
        }),
    }
    if t.tags.len() != t.tiles() {
        violations.push(TilingViolation::TagCount {
            tags: t.tags.len(),
            tiles: t.tiles(),
        });
    }
    let Some(&start) = t.cuts.first() else {
        return TilingReport { base, violations };
    };
    let mut y = sys.iterate(&t.base, start);
    for (k, pair) in t.cuts.windows(2).enumerate() {
        let (from, to) = (pair[0], pair[1]);
        if to <= from {
            violations.push(TilingViolation::NotIncreasing { tile: k });
            break;
        }
        let len = to - from;
        let tag = t.tags.get(k).copied();
        if tag == Some(TileTag::SingletonTile) && len != 1 {
            violations.push(TilingViolation::SingletonLength { tile: k, length: len });
        }
        let outcome = criterion_holds(sys, &config.mode, &y, len).and_then(|a| {
            let b = len == 1 && in_exceptional(sys, config, &y)?;
            Ok((a, b))
        });
        match outcome {
            Ok((a, b)) => {
                if a && b {
                    violations.push(TilingViolation::Both { tile: k });
                } else if !a && !b {
                    violations.push(TilingViolation::Neither { tile: k });
                }
                match tag {
                    Some(TileTag::RatioTile) if !a => {
                        violations.push(TilingViolation::TagMismatch { tile: k, tag: TileTag::RatioTile })
                    }
                    Some(TileTag::SingletonTile) if !b => violations.push(TilingViolation::TagMismatch {
                        tile: k,
                        tag: TileTag::SingletonTile,
                    }),
                    _ => {}
                }
            }
            Err(e) => violations.push(TilingViolation::Unavailable {
                tile: Some(k),
                reason: e.to_string(),
            }),
        }
        y = sys.iterate(&y, len);
    }
    TilingReport { base, violations }
}

/// Output of [`finite_pipeline`]. Index `i` ranges over `0..depth`.
#[derive(Debug, Clone)]
pub struct FinitePipeline {
    pub c: FiniteSet,
    pub exceptional: Vec<FiniteSet>,
    pub markers: Vec<FiniteSet>,
    /// `tilings[i]`: one tiling per base point of `markers[i]`.
    pub tilings: Vec<Vec<Tiling<usize>>>,
    pub reports: Vec<Vec<TilingReport>>,
}

impl FinitePipeline {
    pub fn is_valid(&self) -> bool {
        self.reports.iter().flatten().all(TilingReport::is_valid)
    }
}

/// Ratio tilings on a finite system, where every point is eventually
/// periodic.
///
/// Requires `h(x) < limsup R_n(x)` everywhere. Uses the periodic part `C`,
/// the return set `B ⊆ C` with `R_{n(x)}(x) = limsup` for `x ∈ B` (the same
/// for every `i`), `A_i = ∅`, and one ratio tile per return segment. Each
/// tiling is checked by [`validate_tiling`].
pub fn finite_pipeline(sys: &FiniteSystem, depth: usize) -> Result<FinitePipeline> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let analysis = eventually_periodic_part(sys);
    for x in sys.points() {
        let h = sys.value(Observable::H, x);
        let limsup = analysis.limsup(x);
        if h >= limsup {
            return Err(Error::HypothesisViolation {
                point: x,
                h: h.to_string(),
                limsup: limsup.to_string(),
            });
        }
    }
    let b = analysis.b.clone();
    let n = sys.len();
    let markers = MarkerFamily::new(
        vec![Arc::new(b.clone()) as Arc<dyn PointSet<usize>>],
        vec![crate::markers::Certificate {
            complete: true,
            radius: None,
        }],
    );
    let empty: Arc<dyn PointSet<usize>> = Arc::new(FiniteSet::empty(n));
    let config = TilerConfig::ratio(markers, 0).with_exceptional(empty);
    let mut tilings = Vec::new();
    let mut reports = Vec::new();
    for x in b.iter() {
        let hit = hitting_time(sys, &b, &x)?;
        let t = Tiling {
            base: x,
            cuts: vec![0, hit],
            tags: vec![TileTag::RatioTile],
        };
        reports.push(validate_tiling(sys, &config, &t));
        tilings.push(t);
    }
    Ok(FinitePipeline {
        c: analysis.c,
        exceptional: vec![FiniteSet::empty(n); depth],
        markers: vec![b; depth],
        tilings: vec![tilings; depth],
        reports: vec![reports; depth],
    })
}

/// Output of [`aperiodic_pipeline`], restricted to the probes.
#[derive(Debug, Clone)]
pub struct AperiodicPipeline<P> {
    /// `exceptional[i][k]`: whether probe `k` lies in `A_i`.
    pub exceptional: Vec<Vec<bool>>,
    /// `tilings[i]`: greedy tilings at the probes lying in `B_i`.
    pub tilings: Vec<Vec<Tiling<P>>>,
    pub reports: Vec<Vec<TilingReport>>,
}

impl<P> AperiodicPipeline<P> {
    pub fn is_valid(&self) -> bool {
        self.reports.iter().flatten().all(TilingReport::is_valid)
    }
}

/// Markers, derived exceptional sets and greedy tilings for `i < depth`,
/// evaluated at `probes`. Every tiling is validated.
pub fn aperiodic_pipeline<S>(
    sys: &S,
    markers: &MarkerFamily<S::Point>,
    mode: &TilerMode<S::Point>,
    depth: usize,
    probes: &[S::Point],
) -> Result<AperiodicPipeline<S::Point>>
where
    S: Dynamics,
    S::Point: 'static,
{
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    if depth > markers.len() {
        return Err(Error::FamilyTooShort {
            needed: depth,
            found: markers.len(),
        });
    }
    let mut out = AperiodicPipeline {
        exceptional: Vec::with_capacity(depth),
        tilings: Vec::with_capacity(depth),
        reports: Vec::with_capacity(depth),
    };
    for i in 0..depth {
        let config = TilerConfig {
            markers: markers.clone(),
            index: i,
            mode: mode.clone(),
            exceptional: None,
        };
        let a = exceptional_set(sys, &config)?;
        let flags = probes.iter().map(|x| a.try_contains(x)).collect::<Result<Vec<_>>>()?;
        let mut tilings = Vec::new();
        let mut reports = Vec::new();
        for x in probes.iter().filter(|x| markers.contains(i, x)) {
            let t = greedy_tile(sys, &config, x)?;
            reports.push(validate_tiling(sys, &config, &t));
            tilings.push(t);
        }
        out.exceptional.push(flags);
        out.tilings.push(tilings);
        out.reports.push(reports);
    }
    Ok(out)
}
