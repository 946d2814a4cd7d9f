//! Acceptance suite. Each test prints one line per criterion:
//! `criterion <n> <name>: PASS|FAIL` followed by the individual checks.

use std::time::{Duration, Instant};

use qfilter::catalog;
use qfilter::linalg::hermitian_eig;
use qfilter::verify::{self, CheckRow, VerifyOptions};
use qfilter::witness::{apply_witness, PositiveMapWitness, Side};

fn report(
    n: usize,
    name: &str,
    rows: &[CheckRow],
    elapsed: Duration,
    budget: Option<Duration>,
) -> bool {
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let pass = in_time && !rows.is_empty() && rows.iter().all(|r| r.pass);
    println!(
        "criterion {n} {name}: {} ({:.2} s{})",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.map_or(String::new(), |b| format!(", budget {} s", b.as_secs()))
    );
    for r in rows {
        println!(
            "    {} {}: expected {}, observed {}",
            if r.pass { "ok  " } else { "FAIL" },
            r.name,
            r.expected,
            r.observed
        );
    }
    pass
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Smallest eigenvalue of the side-A Choi φ image of the family at `t = 1/20`,
/// optionally after the diagonal filter.
fn window_margin(x: f64, filtered: bool) -> f64 {
    let rho = catalog::rho_xt(x, 0.05).unwrap();
    let rho = if filtered {
        catalog::choi_example_filter().apply(&rho).unwrap().0
    } else {
        rho
    };
    let img = apply_witness(&PositiveMapWitness::choi_phi(Side::A), &rho).unwrap();
    hermitian_eig(&img).unwrap().min()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo) < 0.0;
    assert_ne!(flo, f(hi) < 0.0, "no sign change in [{lo}, {hi}]");
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// Edge values from bisection on the first verified run.
const FILTERED_ONSET: f64 = 0.6044284958305747;
const UNFILTERED_LOSS: f64 = 0.6554730509561599;

#[test]
fn criterion_1_choi_window() {
    let (mut rows, elapsed) = timed(|| verify::check_choi_window(VerifyOptions::default()));

    let lower = bisect(|x| window_margin(x, true), 0.58, 0.63);
    let upper = bisect(|x| window_margin(x, false), 0.63, 0.70);
    rows.push(CheckRow {
        name: "edges-by-bisection".into(),
        expected: format!("{FILTERED_ONSET} and {UNFILTERED_LOSS} within 1e-9"),
        observed: format!("{lower} and {upper}"),
        pass: (lower - FILTERED_ONSET).abs() < 1e-9 && (upper - UNFILTERED_LOSS).abs() < 1e-9,
    });
    let truncate = |x: f64| (x * 1e4).floor() / 1e4;
    let printed_digits =
        truncate(lower) == verify::WINDOW_LO && truncate(upper) == verify::WINDOW_HI;
    rows.push(CheckRow {
        name: "edges-truncate-to-printed".into(),
        expected: "0.6044 and 0.6554 after truncation to four decimals".into(),
        observed: format!("{} and {}", truncate(lower), truncate(upper)),
        pass: printed_digits,
    });
    assert!(report(
        1,
        "choi-window",
        &rows,
        elapsed,
        Some(Duration::from_secs(5))
    ));
}

#[test]
fn criterion_2_upb() {
    let (rows, elapsed) = timed(|| verify::check_upb(VerifyOptions::default()));
    // observed margins on the first verified run
    let expected = [
        ("upb-unfiltered-undetected", 0.008520845622163),
        ("upb-filtered-detected", 0.0063178225316169),
    ];
    for (name, value) in expected {
        let r = rows.iter().find(|r| r.name == name).unwrap();
        let observed: f64 = r.observed.parse().unwrap();
        assert!((observed - value).abs() < 1e-12, "{name}: {observed}");
    }
    assert!(report(2, "upb", &rows, elapsed, None));
}

#[test]
fn criterion_3_schmidt_rank() {
    let (rows, elapsed) = timed(verify::check_schmidt_invariance);
    assert!(report(3, "schmidt-rank-invariance", &rows, elapsed, None));
}

#[test]
fn criterion_4_ppt() {
    let (rows, elapsed) = timed(|| verify::check_ppt_preservation(VerifyOptions::default()));
    assert!(report(4, "ppt-preservation", &rows, elapsed, None));
}

#[test]
fn criterion_5_measurement_equivalence() {
    let (rows, elapsed) = timed(verify::check_measurement_equivalence);
    assert!(report(5, "measurement-equivalence", &rows, elapsed, None));
}

#[test]
fn criterion_6_projector_algebra() {
    let (rows, elapsed) = timed(verify::check_projector_algebra);
    assert!(report(6, "projector-algebra", &rows, elapsed, None));
}

#[test]
fn criterion_7_monte_carlo() {
    let (rows, elapsed) = timed(verify::check_monte_carlo);
    assert!(report(
        7,
        "monte-carlo",
        &rows,
        elapsed,
        Some(Duration::from_secs(30))
    ));
}

#[test]
fn criterion_8_not_completely_positive() {
    let (rows, elapsed) = timed(|| verify::check_not_completely_positive(VerifyOptions::default()));
    for r in rows.iter().filter(|r| r.name.starts_with("not-cp")) {
        let v: f64 = r.observed.parse().unwrap();
        assert!((v + 1.0 / 6.0).abs() < 1e-12, "{}: {v}", r.name);
    }
    assert!(report(8, "not-completely-positive", &rows, elapsed, None));
}
