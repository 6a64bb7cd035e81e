//! One function per subcommand, each producing a [`Report`].

use std::collections::BTreeMap;
use std::time::Instant;

use ergotile::cocycle::ratio;
use ergotile::markers::{
    build_complete_markers, complete_to_bounded, verify_markers, MarkerFamily, MarkerReport, SeparatingFamily,
};
use ergotile::measure::{
    change_of_variables_check, check_invariance, conservativity_report, dowker_check, local_global_check,
    technical_inequality_check, RationalMeasure,
};
use ergotile::orbit::orbit_shape;
use ergotile::periodic::eventually_periodic_part;
use ergotile::rational::{render, to_f64, Rational};
use ergotile::simulate::{residue_limits, set_distance, simulate_ratios};
use ergotile::tiling::{aperiodic_pipeline, finite_pipeline, TileTag, Tiling, TilingReport, TilerMode};
use ergotile::{FiniteSystem, Observable, StreamSystem};
use num_traits::Zero;

use crate::report::*;
use crate::input::{FiniteInput, PredicateInput, SeparatingInput, StreamInput, SystemInput, Q};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Analyze,
    Tile,
    Markers,
    Verify,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Tile => "tile",
            Command::Markers => "markers",
            Command::Verify => "verify",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub depth: Option<usize>,
    pub window: Option<usize>,
}

pub const ORACLE_LENGTH: usize = 10_000;
pub const ORACLE_TOLERANCE: f64 = 1e-9;
const DEFAULT_TILE_DEPTH: usize = 3;
const DEFAULT_MARKER_DEPTH: usize = 8;
const DEFAULT_CHANGE_OF_VARIABLES: usize = 10;

/// Mutable parts of a report filled in while a command runs.
#[derive(Default)]
struct Notes {
    violations: Vec<String>,
    truncated: bool,
    floats: Option<FloatCheck>,
}

pub fn run(command: Command, input: &SystemInput, source: &str, opts: Options) -> Report {
    let start = Instant::now();
    let mut notes = Notes::default();
    let outcome = match (command, input) {
        (Command::Analyze, SystemInput::Finite(s)) => analyze_finite(s),
        (Command::Analyze, SystemInput::StreamSuccessor(s)) => analyze_stream(s, opts, &mut notes),
        (Command::Tile, SystemInput::Finite(s)) => tile_finite(s, opts, &mut notes),
        (Command::Tile, SystemInput::StreamSuccessor(s)) => tile_stream(s, opts, &mut notes),
        (Command::Markers, SystemInput::StreamSuccessor(s)) => markers_stream(s, opts, &mut notes),
        (Command::Markers, SystemInput::Finite(_)) => Err(CliError::Unsupported(
            "marker constructions need an aperiodic system; every orbit of a finite system closes".into(),
        )),
        (Command::Verify, SystemInput::Finite(s)) => verify_finite(s, opts, &mut notes),
        (Command::Verify, SystemInput::StreamSuccessor(_)) => Err(CliError::Unsupported(
            "measure identities are verified on finite systems only".into(),
        )),
        (Command::Oracle, SystemInput::Finite(s)) => oracle_finite(s, opts, &mut notes),
        (Command::Oracle, SystemInput::StreamSuccessor(s)) => oracle_stream(s, opts, &mut notes),
    };
    let (result, errors) = match outcome {
        Ok(o) => (Some(o), Vec::new()),
        Err(e) => (None, vec![e.to_string()]),
    };
    Report {
        command: command.name().into(),
        source: source.into(),
        kind: input.kind().into(),
        result,
        violations: notes.violations,
        errors,
        truncated: notes.truncated,
        floats: notes.floats,
        timing: Timing {
            elapsed_us: start.elapsed().as_micros() as u64,
        },
    }
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(render).collect()
}

fn analyze_finite(input: &FiniteInput) -> Result<Outcome, CliError> {
    let sys = input.build()?;
    let a = eventually_periodic_part(&sys);
    let points = sys
        .points()
        .map(|x| {
            let entry = &a.entries[x];
            let limits = &a.limits[x];
            PointAnalysis {
                point: x,
                tail: a.shapes[x].tail,
                cycle: a.shapes[x].cycle,
                in_c: a.c.contains_point(x),
                min_period: a.min_period[x],
                entry_steps: entry.steps,
                cycle_weight: render(&entry.cycle_weight),
                regime: format!("{:?}", entry.regime).to_lowercase(),
                limit_set: strings(&limits.values),
                converges: limits.converges,
                limsup: render(limits.limsup()),
            }
        })
        .collect();
    Ok(Outcome::AnalyzeFinite(FiniteAnalysis {
        points,
        c: a.c.to_vec(),
        a: a.a.to_vec(),
        b: a.b.to_vec(),
    }))
}

fn analyze_stream(input: &StreamInput, opts: Options, notes: &mut Notes) -> Result<Outcome, CliError> {
    let window = input.window(opts.window);
    let sys = input.build(window)?;
    notes.truncated = true;
    let probes = input
        .probes()
        .into_iter()
        .map(|x| {
            Ok(ProbeRatio {
                point: x,
                n: window,
                ratio: render(&ratio(&sys, &x, window)?),
            })
        })
        .collect::<Result<_, ergotile::Error>>()?;
    Ok(Outcome::AnalyzeStream(StreamAnalysis { window, probes }))
}

fn tag_name(tag: TileTag) -> String {
    match tag {
        TileTag::RatioTile => "ratio".into(),
        TileTag::SingletonTile => "singleton".into(),
    }
}

fn record_tilings<P: std::fmt::Debug>(
    tilings: &[Vec<Tiling<P>>],
    reports: &[Vec<TilingReport>],
    notes: &mut Notes,
) -> Vec<TilingRecord> {
    let mut out = Vec::new();
    for (i, (ts, rs)) in tilings.iter().zip(reports).enumerate() {
        for (t, r) in ts.iter().zip(rs) {
            for v in &r.violations {
                notes.violations.push(format!("tiling {i} at {}: {v:?}", r.base));
            }
            out.push(TilingRecord {
                index: i,
                base: format!("{:?}", t.base),
                cuts: t.cuts.clone(),
                tags: t.tags.iter().copied().map(tag_name).collect(),
                valid: r.is_valid(),
            });
        }
    }
    out
}

/// `h = limsup − offset` when the input asks for it.
fn with_offset_threshold(sys: FiniteSystem, offset: &Option<Q>) -> Result<FiniteSystem, CliError> {
    let Some(Q(offset)) = offset else {
        return Ok(sys);
    };
    let a = eventually_periodic_part(&sys);
    let h = sys.points().map(|x| a.limsup(x) - offset).collect();
    sys.with_values(Observable::H, h).map_err(CliError::from_core)
}

fn tile_finite(input: &FiniteInput, opts: Options, notes: &mut Notes) -> Result<Outcome, CliError> {
    let depth = opts.depth.or(input.depth).unwrap_or(DEFAULT_TILE_DEPTH);
    let sys = with_offset_threshold(input.build()?, &input.h_offset)?;
    let out = finite_pipeline(&sys, depth)?;
    let tilings = record_tilings(&out.tilings, &out.reports, notes);
    Ok(Outcome::Tile(TileOutcome {
        depth,
        c: Some(out.c.to_vec()),
        b: Some(out.markers[0].to_vec()),
        h: Some(strings(sys.values(Observable::H))),
        exceptional: None,
        tilings,
    }))
}

fn separating_family(input: &StreamInput) -> SeparatingFamily<u64> {
    match &input.separating {
        Some(SeparatingInput::Predicates(p)) => {
            SeparatingFamily::arithmetic(p.iter().map(|p| p.to_core()).collect())
        }
        Some(SeparatingInput::Dyadic { bits }) => SeparatingFamily::dyadic(*bits),
        None => SeparatingFamily::dyadic(64),
    }
}

fn given_markers(preds: &[PredicateInput]) -> MarkerFamily<u64> {
    let preds: Vec<_> = preds.iter().map(|p| p.to_core()).collect();
    MarkerFamily::arithmetic(&preds)
}

fn stream_markers(
    input: &StreamInput,
    sys: &StreamSystem<u64>,
    probes: &[u64],
    depth: usize,
) -> Result<(MarkerFamily<u64>, &'static str), CliError> {
    match &input.markers {
        Some(preds) => Ok((given_markers(preds), "given")),
        None => Ok((build_complete_markers(sys, probes, separating_family(input), depth)?, "built")),
    }
}

fn tile_stream(input: &StreamInput, opts: Options, notes: &mut Notes) -> Result<Outcome, CliError> {
    let depth = opts.depth.or(input.depth).unwrap_or(DEFAULT_TILE_DEPTH);
    let sys = input.build(input.window(opts.window))?;
    let probes = input.probes();
    let (markers, _) = stream_markers(input, &sys, &probes, depth)?;
    notes.truncated = true;
    let out = aperiodic_pipeline(&sys, &markers, &TilerMode::Ratio, depth, &probes)?;
    let exceptional = out
        .exceptional
        .iter()
        .map(|flags| {
            probes
                .iter()
                .zip(flags)
                .filter(|(_, &f)| f)
                .map(|(x, _)| x.to_string())
                .collect()
        })
        .collect();
    let tilings = record_tilings(&out.tilings, &out.reports, notes);
    Ok(Outcome::Tile(TileOutcome {
        depth,
        c: None,
        b: None,
        h: None,
        exceptional: Some(exceptional),
        tilings,
    }))
}

fn summarize(
    origin: &str,
    family: &MarkerFamily<u64>,
    report: &MarkerReport,
    probes: &[u64],
    label: &str,
    notes: &mut Notes,
) -> MarkerSummary {
    for v in &report.violations {
        notes.violations.push(format!("{label} markers: {v:?}"));
    }
    if !report.unvanished.is_empty() || report.unreached.iter().any(|&u| u > 0) {
        notes.truncated = true;
    }
    let window = report.index_window;
    MarkerSummary {
        origin: origin.into(),
        count: family.len(),
        index_window: window,
        members: (0..window)
            .map(|i| {
                probes
                    .iter()
                    .filter(|x| family.contains(i, x))
                    .map(u64::to_string)
                    .collect()
            })
            .collect(),
        certified_radius: (0..window)
            .map(|i| family.certificate(i).and_then(|c| c.radius))
            .collect(),
        observed_radius: report.observed_radius.clone(),
        unreached: report.unreached.clone(),
        unvanished: report.unvanished.clone(),
    }
}

fn markers_stream(input: &StreamInput, opts: Options, notes: &mut Notes) -> Result<Outcome, CliError> {
    let depth = opts.depth.or(input.depth).unwrap_or(DEFAULT_MARKER_DEPTH);
    let sys = input.build(input.window(opts.window))?;
    let probes = input.probes();
    let (family, origin) = stream_markers(input, &sys, &probes, depth)?;
    let report = verify_markers(&sys, &family, &probes, depth);
    let complete = summarize(origin, &family, &report, &probes, "complete", notes);
    let input = if origin == "built" {
        family.with_whole_space_first()
    } else {
        family
    };
    let count = depth.min(input.len());
    let bounded = complete_to_bounded(&sys, &input, count)?;
    let report = verify_markers(&sys, &bounded, &probes, count);
    let bounded = summarize("bounded", &bounded, &report, &probes, "bounded", notes);
    Ok(Outcome::Markers(MarkersOutcome {
        probes: probes.len(),
        complete,
        bounded: Some(bounded),
    }))
}

fn check(name: &str, outcome: Result<(bool, BTreeMap<String, String>), ergotile::Error>, notes: &mut Notes) -> Check {
    match outcome {
        Ok((passed, values)) => {
            if !passed {
                notes.violations.push(format!("{name} fails"));
            }
            Check {
                name: name.into(),
                passed: Some(passed),
                values,
                error: None,
            }
        }
        Err(e) => {
            notes.violations.push(format!("{name}: {e}"));
            Check {
                name: name.into(),
                passed: None,
                values: BTreeMap::new(),
                error: Some(e.to_string()),
            }
        }
    }
}

fn pair(key: &str, value: &Rational) -> (String, String) {
    (key.into(), render(value))
}

fn verify_finite(input: &FiniteInput, opts: Options, notes: &mut Notes) -> Result<Outcome, CliError> {
    let sys = with_offset_threshold(input.build()?, &input.h_offset)?;
    let mass = input.measure().ok_or_else(|| CliError::Invalid {
        location: "measure".into(),
        message: "verify needs a measure".into(),
    })?;
    let mu = RationalMeasure::new(mass).map_err(CliError::from_core)?;
    let invariant = check_invariance(&sys, &mu);
    if !invariant {
        notes.violations.push("measure is not invariant".into());
    }
    let kmax = opts.depth.or(input.depth).unwrap_or(DEFAULT_CHANGE_OF_VARIABLES);
    let mut checks = Vec::new();
    let cov = (0..=kmax)
        .map(|k| Ok((k, change_of_variables_check(&sys, &mu, k)?)))
        .collect::<Result<Vec<_>, ergotile::Error>>()
        .map(|ks| {
            let failed: Vec<_> = ks.iter().filter(|(_, ok)| !ok).map(|(k, _)| k.to_string()).collect();
            let values = BTreeMap::from([("k_max".into(), kmax.to_string()), ("failed_k".into(), failed.join(","))]);
            (failed.is_empty(), values)
        });
    checks.push(check("change_of_variables", cov, notes));
    let b = eventually_periodic_part(&sys).b;
    let lg = local_global_check(&sys, &mu, &b).map(|r| {
        let values = BTreeMap::from([
            ("b".into(), format!("{:?}", b.to_vec())),
            pair("lhs", &r.lhs),
            pair("rhs", &r.rhs),
        ]);
        (r.equal, values)
    });
    checks.push(check("local_global", lg, notes));
    let ti = technical_inequality_check(&sys, &mu)
        .map(|r| (r.holds, BTreeMap::from([pair("int_f", &r.int_f), pair("int_gh", &r.int_gh)])));
    checks.push(check("technical_inequality", ti, notes));
    let dk = dowker_check(&sys, &mu).map(|r| (r.equal, BTreeMap::from([pair("int_f", &r.int_f), pair("int_g_lim", &r.int_g_lim)])));
    checks.push(check("dowker", dk, notes));
    let cons = conservativity_report(&sys, &mu);
    let total = mu.total();
    checks.push(Check {
        name: "conservativity".into(),
        passed: Some(cons.conservative == total.is_zero()),
        values: BTreeMap::from([
            ("conservative".into(), cons.conservative.to_string()),
            (
                "wandering_witness".into(),
                cons.witness.map(|w| format!("{:?}", w.to_vec())).unwrap_or_default(),
            ),
        ]),
        error: None,
    });
    Ok(Outcome::Verify(VerifyOutcome { invariant, checks }))
}

fn oracle_finite(input: &FiniteInput, opts: Options, notes: &mut Notes) -> Result<Outcome, CliError> {
    let sys = input.build()?;
    let length = opts.window.unwrap_or(ORACLE_LENGTH);
    let a = eventually_periodic_part(&sys);
    let mut points = Vec::new();
    let mut floats = Vec::new();
    for x in sys.points() {
        let exact = &a.limits[x].values;
        let ratios = simulate_ratios(&sys, &x, length)?;
        let simulated = residue_limits(&ratios, orbit_shape(&sys, x).cycle, ORACLE_TOLERANCE);
        let exact_f: Vec<f64> = exact.iter().map(to_f64).collect();
        let distance = set_distance(&simulated, &exact_f);
        if distance.is_nan() || distance > ORACLE_TOLERANCE {
            notes
                .violations
                .push(format!("point {x}: simulated limits differ from exact ones by {distance:e}"));
        }
        points.push(OraclePoint {
            point: x.to_string(),
            exact: strings(exact),
        });
        floats.push(FloatPoint {
            point: x.to_string(),
            simulated,
            exact: exact_f,
            distance,
        });
    }
    notes.floats = Some(FloatCheck {
        tolerance: ORACLE_TOLERANCE,
        points: floats,
    });
    Ok(Outcome::Oracle(OracleOutcome { length, points }))
}

fn oracle_stream(input: &StreamInput, opts: Options, notes: &mut Notes) -> Result<Outcome, CliError> {
    let length = input.window(opts.window);
    let sys = input.build(length)?;
    notes.truncated = true;
    let mut points = Vec::new();
    let mut floats = Vec::new();
    for x in input.probes() {
        let exact = ratio(&sys, &x, length)?;
        let simulated = *simulate_ratios(&sys, &x, length)?.last().expect("length is positive");
        let exact_f = to_f64(&exact);
        let distance = (simulated - exact_f).abs();
        if distance.is_nan() || distance > ORACLE_TOLERANCE * exact_f.abs().max(1.0) {
            notes
                .violations
                .push(format!("point {x}: simulated R_{length} differs by {distance:e}"));
        }
        points.push(OraclePoint {
            point: x.to_string(),
            exact: vec![render(&exact)],
        });
        floats.push(FloatPoint {
            point: x.to_string(),
            simulated: vec![simulated],
            exact: vec![exact_f],
            distance,
        });
    }
    notes.floats = Some(FloatCheck {
        tolerance: ORACLE_TOLERANCE,
        points: floats,
    });
    Ok(Outcome::Oracle(OracleOutcome { length, points }))
}

/// A generated finite system as an input, so that it runs through the same
/// code path as files.
pub fn generated_input(sys: &FiniteSystem, measure: Option<Vec<Rational>>, h_offset: Option<Rational>) -> SystemInput {
    let qs = |obs| sys.values(obs).iter().cloned().map(Q).collect::<Vec<_>>();
    SystemInput::Finite(FiniteInput {
        _kind: None,
        step: sys.step_table().to_vec(),
        f: qs(Observable::F),
        g: Some(qs(Observable::G)),
        h: Some(qs(Observable::H)),
        w: Some(qs(Observable::W)),
        measure: measure.map(|m| m.into_iter().map(Q).collect()),
        h_offset: h_offset.map(Q),
        depth: None,
    })
}
