//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails. All randomness comes from the fixed seeds
//! below.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use ergotile::cocycle::{cocycle, successor_identity_check, weighted_sum};
use ergotile::generate::{self, Bounds};
use ergotile::markers::{
    build_complete_markers, complete_to_bounded, verify_markers, Certificate, MarkerFamily, SeparatingFamily,
};
use ergotile::sets::Predicate;
use ergotile::measure::{
    change_of_variables_check, conservativity_report, dowker_check, local_global_check,
    technical_inequality_check, RationalMeasure,
};
use ergotile::orbit::set_properties;
use ergotile::periodic::{eventually_periodic_part, limit_point_set};
use ergotile::rational::{frac, int, to_f64, Rational};
use ergotile::system::{ArithmeticPredicate, SuccessorObservable, SuccessorObservables};
use ergotile::tiling::{finite_pipeline, greedy_tile, validate_tiling, TileTag, TilerConfig};
use ergotile::{Dynamics, FiniteSet, FiniteSystem, Observable, PointSet, StreamSystem};
use rand::Rng;

const IDENTITY_SEED: u64 = 0x1d3_0001;
const ORACLE_SEED: u64 = 0x1d3_0002;
const TILING_SEED: u64 = 0x1d3_0003;
const MEASURE_SEED: u64 = 0x1d3_0005;
const DEGENERACY_SEED: u64 = 0x1d3_0006;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn systems(seed: u64, count: usize) -> Vec<FiniteSystem> {
    let mut rng = generate::rng(seed);
    (0..count).map(|_| generate::finite_system(&mut rng, Bounds::default())).collect()
}

fn with_h(sys: &FiniteSystem, h: Vec<Rational>) -> FiniteSystem {
    sys.with_values(Observable::H, h).expect("h has one value per point")
}

fn e3() -> FiniteSystem {
    FiniteSystem::new(
        vec![1, 2, 0],
        vec![int(1), int(0), int(0)],
        vec![int(1); 3],
        vec![int(0); 3],
        vec![int(2), int(1), int(1)],
    )
    .unwrap()
}

fn exact_identities() -> Outcome {
    const MAX: usize = 24;
    let mut checked = 0usize;
    for (s, sys) in systems(IDENTITY_SEED, 50).iter().enumerate() {
        let co: Vec<Vec<Rational>> = sys
            .points()
            .map(|x| (0..=MAX).map(|k| cocycle(sys, &x, k).unwrap()).collect())
            .collect();
        let sum: Vec<Vec<Rational>> = sys
            .points()
            .map(|x| (0..=MAX).map(|k| weighted_sum(sys, Observable::F, &x, k).unwrap()).collect())
            .collect();
        for x in sys.points() {
            for m in 0..=MAX {
                let tm = sys.iterate(&x, m);
                for n in 0..=MAX - m {
                    ensure(co[x][m + n] == &co[x][m] * &co[tm][n], || {
                        format!("cocycle identity fails: system {s}, x = {x}, m = {m}, n = {n}")
                    })?;
                    ensure(sum[x][m + n] == &sum[x][m] + &co[x][m] * &sum[tm][n], || {
                        format!("sum splitting fails: system {s}, x = {x}, m = {m}, n = {n}")
                    })?;
                    checked += 1;
                }
            }
            for n in 0..=MAX {
                ensure(successor_identity_check(sys, &x, n).unwrap(), || {
                    format!("successor identity fails: system {s}, x = {x}, n = {n}")
                })?;
            }
        }
    }
    let parity = SuccessorObservables {
        f: SuccessorObservable::indicator(ArithmeticPredicate::residue(3, 1)),
        w: SuccessorObservable::Indicator {
            when: ArithmeticPredicate::bit(1),
            on: frac(3, 2),
            off: frac(1, 2),
        },
        ..SuccessorObservables::default()
    };
    let stream = StreamSystem::successor(parity, 64).unwrap();
    for x in 0..32u64 {
        for n in 0..=MAX {
            ensure(successor_identity_check(&stream, &x, n).unwrap(), || {
                format!("successor identity fails on the successor system: x = {x}, n = {n}")
            })?;
        }
    }
    Ok(format!("{checked} (x, m, n) triples, m + n ≤ {MAX}, 50 systems"))
}

fn oracle_agreement(sys: &FiniteSystem, tol: f64) -> Result<(), String> {
    let float = common::FloatSystem::of(sys);
    for x in sys.points() {
        let declared: Vec<f64> = limit_point_set(sys, x).values.iter().map(to_f64).collect();
        let simulated = common::simulated_limit_points(&float, x, 10_000, tol);
        let missed = common::one_sided_gap(&declared, &simulated);
        let stray = common::one_sided_gap(&simulated, &declared);
        ensure(missed <= tol && stray <= tol, || {
            format!("x = {x}: declared {declared:?}, simulated {simulated:?} (gaps {missed:.2e}, {stray:.2e})")
        })?;
    }
    Ok(())
}

fn periodic_limits() -> Outcome {
    const TOL: f64 = 1e-9;
    let sys = e3();
    let expected = vec![frac(1, 5), frac(1, 4), frac(1, 3)];
    let declared = limit_point_set(&sys, 0);
    ensure(declared.values == expected && !declared.converges, || {
        format!("three-cycle limit set is {:?}", declared.values)
    })?;
    oracle_agreement(&sys, TOL)?;
    let mut points = 0;
    for (s, sys) in systems(ORACLE_SEED, 200).iter().enumerate() {
        oracle_agreement(sys, TOL).map_err(|e| format!("system {s}: {e}"))?;
        points += sys.len();
    }
    Ok(format!("200 systems, {points} points, tolerance {TOL:e}"))
}

fn tilings() -> Outcome {
    let mut bases = 0;
    for (s, sys) in systems(TILING_SEED, 100).iter().enumerate() {
        let analysis = eventually_periodic_part(sys);
        let h = sys.points().map(|x| analysis.limsup(x) - int(1)).collect();
        let out = finite_pipeline(&with_h(sys, h), 3).map_err(|e| format!("system {s}: {e}"))?;
        for report in out.reports.iter().flatten() {
            ensure(report.is_valid(), || format!("system {s}: {report:?}"))?;
            bases += 1;
        }
    }
    use TileTag::{RatioTile as R, SingletonTile as S};
    for (h, cuts, tags) in [
        (frac(1, 4), vec![0, 1, 3], vec![R, R]),
        (frac(3, 4), vec![0, 1, 2, 3], vec![R, S, R]),
    ] {
        let obs = SuccessorObservables {
            f: SuccessorObservable::indicator(ArithmeticPredicate::residue(2, 0)),
            h: SuccessorObservable::constant(h.clone()),
            ..SuccessorObservables::default()
        };
        let sys = StreamSystem::successor(obs, 1024).unwrap();
        let markers = build_complete_markers(&sys, &[0], SeparatingFamily::dyadic(64), 3).map_err(|e| e.to_string())?;
        let config = TilerConfig::ratio(markers, 2);
        let t = greedy_tile(&sys, &config, &0).map_err(|e| e.to_string())?;
        ensure(t.cuts == cuts && t.tags == tags, || format!("h = {h}: got {:?} {:?}", t.cuts, t.tags))?;
        let report = validate_tiling(&sys, &config, &t);
        ensure(report.is_valid(), || format!("h = {h}: {report:?}"))?;
    }
    Ok(format!("{bases} validated tilings on 100 systems, both hand traces reproduced"))
}

/// `{n : n ≡ 2^i − 1 mod 2^i}` as "at least `i` trailing one bits", which
/// stays meaningful past 64 indices.
fn trailing_ones_family(len: usize) -> MarkerFamily<u64> {
    let sets = (0..len)
        .map(|i| Arc::new(Predicate::new(move |n: &u64| n.trailing_ones() as usize >= i)) as Arc<dyn PointSet<u64>>)
        .collect();
    let mut certs = vec![Certificate { complete: true, radius: None }; len];
    certs[0].radius = Some(0);
    MarkerFamily::new(sets, certs)
}

fn markers() -> Outcome {
    const DEPTH: usize = 9;
    const BUILT: usize = 64;
    // probe n < 2^10 lies in B_i for every i < 2^t, t its trailing ones
    const CHAIN: usize = 1 << 11;
    const RADIUS_WINDOW: usize = 64;
    let sys = StreamSystem::successor(SuccessorObservables::default(), 4096).unwrap();
    let probes: Vec<u64> = (0..1 << 10).collect();
    let built = build_complete_markers(&sys, &[0], SeparatingFamily::dyadic(64), BUILT).map_err(|e| e.to_string())?;
    for i in 0..DEPTH {
        let m = 1u64 << i;
        for &n in &probes {
            ensure(built.contains(i, &n) == (n % m == m - 1), || format!("B_{i} disagrees at n = {n}"))?;
        }
    }
    let report = verify_markers(&sys, &built, &probes, 12);
    ensure(report.is_clean(), || format!("complete markers: {:?}", report.violations))?;
    ensure(report.unvanished.is_empty(), || format!("complete markers keep {:?}", report.unvanished))?;

    let chain = trailing_ones_family(CHAIN);
    for i in 1..BUILT {
        for &n in &probes {
            ensure(chain.contains(i, &n) == built.contains(i, &n), || format!("chain differs at i = {i}, n = {n}"))?;
        }
    }
    let bounded = complete_to_bounded(&sys, &chain, CHAIN).map_err(|e| e.to_string())?;
    let report = verify_markers(&sys, &bounded, &probes, RADIUS_WINDOW);
    ensure(report.is_clean(), || format!("bounded markers: {:?}", report.violations))?;
    ensure(report.unvanished.is_empty(), || format!("bounded markers keep {:?}", report.unvanished))?;
    for (i, r) in report.observed_radius.iter().enumerate() {
        ensure(r.is_some_and(|r| r <= i * i), || format!("B_{i} observed radius {r:?} exceeds {}", i * i))?;
    }
    let radii: Vec<usize> = report.observed_radius.iter().map(|r| r.unwrap()).collect();
    Ok(format!(
        "B_i matches for i < {DEPTH} on n < 1024; bounded radii for i < 8: {:?}",
        &radii[..8]
    ))
}

fn measures() -> Outcome {
    let mut rng = generate::rng(MEASURE_SEED);
    let bounds = Bounds { max_points: 10, max_term: 9 };
    for s in 0..100 {
        let (sys, mu) = generate::permutation_system(&mut rng, bounds);
        let b = generate::bounded_set(&mut rng, &sys);
        let mu = RationalMeasure::new(mu).unwrap();
        let fail = |what: &str| format!("system {s}: {what}");
        for k in 0..=10 {
            ensure(change_of_variables_check(&sys, &mu, k).unwrap(), || fail(&format!("change of variables, k = {k}")))?;
        }
        let lg = local_global_check(&sys, &mu, &b).map_err(|e| fail(&e.to_string()))?;
        ensure(lg.equal, || fail(&format!("local-global {} ≠ {}", lg.lhs, lg.rhs)))?;
        let analysis = eventually_periodic_part(&sys);
        let limsup: Vec<Rational> = sys.points().map(|x| analysis.limsup(x).clone()).collect();
        let at = technical_inequality_check(&with_h(&sys, limsup.clone()), &mu).map_err(|e| fail(&e.to_string()))?;
        ensure(at.holds && at.int_f == at.int_gh, || fail(&format!("inequality at limsup {at:?}")))?;
        let below = limsup.iter().map(|v| v - int(1)).collect();
        let under = technical_inequality_check(&with_h(&sys, below), &mu).map_err(|e| fail(&e.to_string()))?;
        ensure(under.holds, || fail(&format!("inequality below limsup {under:?}")))?;
        let dowker = dowker_check(&sys, &mu).map_err(|e| fail(&e.to_string()))?;
        ensure(dowker.equal, || fail(&format!("ratio limit {} ≠ {}", dowker.int_f, dowker.int_g_lim)))?;
    }
    let sys = e3().with_values(Observable::W, vec![int(2), frac(3, 2), frac(1, 3)]).unwrap();
    let mu = RationalMeasure::new(vec![frac(1, 6), frac(1, 3), frac(1, 2)]).unwrap();
    ensure(change_of_variables_check(&sys, &mu, 3).unwrap(), || "worked instance: change of variables".into())?;
    let lg = local_global_check(&sys, &mu, &FiniteSet::from_points(3, [0])).map_err(|e| e.to_string())?;
    ensure(lg.equal && lg.lhs == frac(1, 6), || format!("worked instance: {} vs {}", lg.lhs, lg.rhs))?;
    Ok("100 permutation systems exact; worked instance 1/6 = 1/6".into())
}

fn degeneracy() -> Outcome {
    let mut rng = generate::rng(DEGENERACY_SEED);
    for s in 0..100 {
        let sys = generate::finite_system(&mut rng, Bounds::default());
        let mut mass: Vec<Rational> = sys
            .points()
            .map(|_| if rng.gen_bool(0.5) { generate::positive_rational(&mut rng, 9) } else { int(0) })
            .collect();
        let k = rng.gen_range(0..sys.len());
        mass[k] = generate::positive_rational(&mut rng, 9);
        let mu = RationalMeasure::new(mass).unwrap();
        let report = conservativity_report(&sys, &mu);
        let witness = report.witness.clone().ok_or_else(|| format!("system {s}: no witness"))?;
        let x = witness.iter().next().unwrap_or(0);
        ensure(
            !report.conservative
                && witness.len() == 1
                && mu.mass(x) > &int(0)
                && set_properties(&sys, &witness).wandering,
            || format!("system {s}: {report:?}"),
        )?;
        ensure(conservativity_report(&sys, &RationalMeasure::zero(sys.len())).conservative, || {
            format!("system {s}: zero measure not conservative")
        })?;
    }
    Ok("100 nonzero measures non-conservative with singleton witnesses".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("exact identities", exact_identities),
        ("periodic limits vs simulation", periodic_limits),
        ("tilings", tilings),
        ("markers", markers),
        ("measure identities", measures),
        ("conservativity degeneracy", degeneracy),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
