//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when
//! any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cpav_core::bounds::{block_upper, lll_lower, mk_upper, suen_parameters};
use cpav_core::enumerate::{count_bruteforce, count_dp, rho_estimates, CountTable};
use cpav_core::overlap::{
    enumerate_overlap_sets, for_each_double_occurrence, forced_suffix, joint_count, overlap_profile,
    verify_monotone_lemma,
};
use cpav_core::perm::all_patterns;
use cpav_core::series::{smallest_root, SeriesKind, SeriesSpec};
use cpav_core::stats::{mk_census, sample_overlap_distribution};
use cpav_core::Pattern;
use num_bigint::BigUint;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn p(s: &str) -> Pattern {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table(sigma: &Pattern, n_max: usize) -> Result<CountTable, String> {
    count_dp(sigma, n_max).map_err(|e| format!("{sigma}: {e}"))
}

fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    for m in 3..=4 {
        for sigma in all_patterns(m) {
            let t = table(&sigma, 9)?;
            for n in 0..=9 {
                let brute = count_bruteforce(&sigma, n).map_err(|e| e.to_string())?;
                ensure(t.alpha(n) == Some(&brute), || {
                    format!("{sigma} n={n}: dp {:?} vs brute force {brute}", t.alpha(n))
                })?;
            }
        }
    }
    ensure(start.elapsed() < Duration::from_secs(120), || {
        format!("took {:?}", start.elapsed())
    })
}

fn known_counts() -> Check {
    let expected = [1u32, 1, 2, 5, 17, 70];
    let t = table(&p("123"), 5)?;
    for (n, &e) in expected.iter().enumerate() {
        ensure(t.alpha(n) == Some(&BigUint::from(e)), || {
            format!("α_{n}(123) = {:?}", t.alpha(n))
        })?;
        let brute = count_bruteforce(&p("123"), n).map_err(|e| e.to_string())?;
        ensure(brute == BigUint::from(e), || {
            format!("brute force α_{n}(123) = {brute}")
        })?;
    }
    let t = table(&p("132"), 5)?;
    ensure(t.alpha(4) == Some(&BigUint::from(16u32)), || {
        format!("α_4(132) = {:?}", t.alpha(4))
    })?;
    ensure(t.alpha(5) == Some(&BigUint::from(63u32)), || {
        format!("α_5(132) = {:?}", t.alpha(5))
    })
}

fn boundary_identities() -> Check {
    for m in 1..=6 {
        for sigma in all_patterns(m) {
            let t = table(&sigma, m)?;
            for n in 0..m {
                ensure(t.alpha(n) == Some(&factorial(n)), || format!("{sigma}: α_{n} ≠ {n}!"))?;
            }
            let expected = factorial(m) - 1u32;
            ensure(t.alpha(m) == Some(&expected), || format!("{sigma}: α_m ≠ m! - 1"))?;
        }
    }
    Ok(())
}

fn compare_all(m: usize, n_max: usize, reference: &str, most: bool, strict_from: Option<usize>) -> Check {
    let r = table(&p(reference), n_max)?;
    for sigma in all_patterns(m) {
        let t = table(&sigma, n_max)?;
        let same_class = sigma.class_representative() == p(reference).class_representative();
        for n in 0..=n_max {
            let (a, b) = (r.alpha(n).unwrap(), t.alpha(n).unwrap());
            let ok = if most { a >= b } else { a <= b };
            ensure(ok, || format!("n={n}: α({reference}) = {a}, α({sigma}) = {b}"))?;
            if let Some(from) = strict_from {
                if n >= from && !same_class {
                    ensure(a != b, || format!("n={n}: α({reference}) = α({sigma}) = {a}"))?;
                }
            }
        }
    }
    Ok(())
}

fn cmp_finite() -> Check {
    let start = Instant::now();
    compare_all(3, 12, "123", true, Some(4))?;
    compare_all(4, 10, "1234", true, None)?;
    ensure(start.elapsed() < Duration::from_secs(300), || {
        format!("took {:?}", start.elapsed())
    })
}

fn nakamura_minimality() -> Check {
    compare_all(3, 12, "132", false, None)?;
    compare_all(4, 10, "1243", false, None)
}

fn suen_finite() -> Check {
    let n = 10;
    let mut informative = 0;
    for sigma in all_patterns(4).into_iter().filter(|s| !s.is_monotone()) {
        let params = suen_parameters(&sigma, n).map_err(|e| e.to_string())?;
        if params.exponent_coefficient() <= 0.0 {
            continue;
        }
        informative += 1;
        let t = table(&sigma, n)?;
        let exact = t.avoidance_probability(n).unwrap();
        let exact =
            exact.numer().to_string().parse::<f64>().unwrap() / exact.denom().to_string().parse::<f64>().unwrap();
        let bound = params.avoidance_upper();
        ensure(bound + 1e-12 >= exact, || {
            format!("{sigma}: bound {bound} < α/n! = {exact}")
        })?;
    }
    ensure(informative > 0, || "no informative pattern".into())
}

fn lll_sandwich() -> Check {
    for m in 3..=4 {
        let lower = lll_lower(m).map_err(|e| e.to_string())?.rho_lower;
        for sigma in all_patterns(m) {
            let t = table(&sigma, 13)?;
            let est = rho_estimates(&t);
            let n = est.ratio.len() - 1;
            let r = est.ratio[n];
            ensure(n >= 12, || format!("largest n = {n}"))?;
            ensure(lower <= r + 1e-2, || format!("{sigma}: lll {lower} > ρ̂_{n} = {r}"))?;
        }
    }
    Ok(())
}

fn series_cross_validation() -> Check {
    for (m, sigma, tol) in [(3, "123", 5e-3), (4, "1234", 1e-2)] {
        let root = smallest_root(&SeriesSpec::new(SeriesKind::MonotoneG, m).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let est = rho_estimates(&table(&p(sigma), 15)?);
        let r14 = est.ratio[14];
        ensure((root.rho - r14).abs() < tol, || {
            format!("m={m}: series {} vs ρ̂_14 {r14}", root.rho)
        })?;
        if m == 3 {
            ensure((root.rho - 0.8270).abs() < 1e-4, || format!("ρ = {}", root.rho))?;
        }
    }
    Ok(())
}

fn lemma_exhaustives() -> Check {
    for m in 3..=7 {
        let check = verify_monotone_lemma(m).map_err(|e| e.to_string())?;
        ensure(
            check.patterns_with_overlap_at_m_minus_1.len() == 2 && check.holds(),
            || format!("m={m}: {:?}", check.patterns_with_overlap_at_m_minus_1),
        )?;
    }
    for sigma in all_patterns(4) {
        let profile = overlap_profile(&sigma).map_err(|e| e.to_string())?;
        for &k in profile.overlaps() {
            let forced = forced_suffix(&sigma, k).map_err(|e| e.to_string())?;
            let mut words = 0u64;
            let mut bad = None;
            for_each_double_occurrence(&sigma, k, |w| {
                words += 1;
                if forced.iter().any(|f| w[f.position - 1] != f.value) {
                    bad = Some(w.to_vec());
                }
            })
            .map_err(|e| e.to_string())?;
            ensure(bad.is_none(), || {
                format!("{sigma} k={k}: word {bad:?} breaks forced values")
            })?;
            ensure(words > 0, || format!("{sigma} k={k}: no double occurrence"))?;
        }
    }
    for m in 2..=5 {
        for sigma in all_patterns(m) {
            for k in 1..m {
                let j = joint_count(&sigma, k).map_err(|e| e.to_string())?;
                ensure(j.count <= j.bound, || {
                    format!("{sigma} k={k}: {} > {}", j.count, j.bound)
                })?;
            }
        }
    }
    Ok(())
}

fn overlap_statements() -> Check {
    for m in 2..=8 {
        let census = enumerate_overlap_sets(m).map_err(|e| e.to_string())?;
        for k in (1..m).filter(|&k| 2 * k <= m) {
            let kf: u64 = (1..=k as u64).product();
            ensure(census.n_size(k) * kf == census.total, || {
                format!("m={m} k={k}: |N_k| = {}", census.n_size(k))
            })?;
        }
    }
    let d = sample_overlap_distribution(8, 100_000, 0).map_err(|e| e.to_string())?;
    for r in &d.reports {
        ensure(r.within_3sigma, || {
            format!("k={}: fraction {} vs target {}", r.k, r.fraction, r.target)
        })?;
    }
    let c = mk_census(3).map_err(|e| e.to_string())?;
    ensure(c.m_sizes[0] * 3 == c.total * 2, || {
        format!("|M_1| = {} of {}", c.m_sizes[0], c.total)
    })
}

fn spot_values() -> Check {
    // 40-digit reference values, plus a direct second evaluation
    let block3 = block_upper(3).map_err(|e| e.to_string())?;
    let lll3 = lll_lower(3).map_err(|e| e.to_string())?.rho_lower;
    let lll4 = lll_lower(4).map_err(|e| e.to_string())?.rho_lower;
    let mk62 = mk_upper(6, 2).map_err(|e| e.to_string())?.rho_upper;
    let second = [
        (5.0f64 / 6.0).powf(1.0 / 3.0),
        1.0 - (2.0f64 / 6.0).exp() / 6.0,
        1.0 - (3.0f64 / 24.0).exp() / 24.0,
        (-(1.0 - 256.0 * 720.0 / 3_628_800.0 * (20.0f64 / 720.0).exp()) / 720.0).exp(),
    ];
    let cases = [
        ("block_upper(3)", block3, 0.941_036_028_881_028_6, 0.94104, second[0]),
        ("lll_lower(3)", lll3, 0.767_397_929_152_318_4, 0.76740, second[1]),
        ("lll_lower(4)", lll4, 0.952_785_481_122_215_6, 0.95282, second[2]),
        ("mk_upper(6,2)", mk62, 0.998_684_510_966_060_8, 0.99868, second[3]),
    ];
    for (name, got, reference, printed, direct) in cases {
        ensure((got - reference).abs() < 1e-12, || {
            format!("{name} = {got}, reference {reference}")
        })?;
        ensure((got - direct).abs() < 1e-12, || {
            format!("{name} = {got}, direct {direct}")
        })?;
        ensure((got - printed).abs() < 1e-4, || {
            format!("{name} = {got}, printed {printed}")
        })?;
    }
    Ok(())
}

fn determinism() -> Check {
    let runs: [&[&str]; 6] = [
        &["sample", "--m", "8", "--samples", "20000", "--seed", "17"],
        &[
            "sample",
            "--pattern",
            "1324",
            "--n",
            "9",
            "--samples",
            "20000",
            "--seed",
            "3",
        ],
        &["count", "--pattern", "1342", "--n-max", "14"],
        &["scan", "--m", "4", "--n", "9"],
        &["bounds", "--m", "5", "--k", "2", "--pattern", "13254", "--n", "12"],
        &["rho", "--m", "5"],
    ];
    for args in runs {
        let once = || {
            Command::new(env!("CARGO_BIN_EXE_cpav"))
                .args(args)
                .args(["--output", "json"])
                .env_remove("CPAV_CACHE_DIR")
                .output()
                .map_err(|e| e.to_string())
        };
        let a = once()?;
        let b = once()?;
        ensure(a.status.success(), || {
            format!("{args:?}: {}", String::from_utf8_lossy(&a.stderr))
        })?;
        ensure(a.stdout == b.stdout, || format!("{args:?}: outputs differ"))?;
        ensure(serde_json::from_slice::<serde_json::Value>(&a.stdout).is_ok(), || {
            format!("{args:?}: not JSON")
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "oracle equivalence: dp = brute force on S_3, S_4, n <= 9",
            oracle_equivalence,
        ),
        ("known counts for 123 and 132", known_counts),
        ("boundary identities for m <= 6", boundary_identities),
        ("monotone patterns most avoided at finite n", cmp_finite),
        ("1 3 2 and 1 2 4 3 least avoided at finite n", nakamura_minimality),
        ("finite-n Suen bound on S_4, n = 10", suen_finite),
        ("local lemma bound below ratio estimates", lll_sandwich),
        ("series root against ratio estimator", series_cross_validation),
        ("overlap lemma exhaustives", lemma_exhaustives),
        ("N_k census and sampling", overlap_statements),
        ("bound formula spot values", spot_values),
        ("deterministic CLI output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
