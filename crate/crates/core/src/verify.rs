//! Reproduction checks for the two worked examples and the supporting
//! properties. Each check yields report rows; failures are rows, not errors.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog;
use crate::filter::LocalFilter;
use crate::format::fmt_sig;
use crate::linalg::{hermitian_eig, CMatrix};
use crate::mcsim::run_protocol;
use crate::measure::{build_projector, postselect_diag, protocol_analytic, ProtocolPlan};
use crate::qstate::{
    is_ppt_with_threshold, partial_transpose_b, partial_transpose_b_matrix, schmidt_rank,
};
use crate::random::{
    random_density_matrix, random_diagonal, random_filter, random_pure_state_with_rank,
    random_separable_state, random_state,
};
use crate::scan::{interior_grid, scan_point, sign_changes};
use crate::tol::T_NEG;
use crate::witness::{
    apply_witness_matrix, detect_with_threshold, maximally_entangled, PositiveMapWitness, Side,
};

pub const WINDOW_T: f64 = 0.05;
pub const WINDOW_LO: f64 = 0.6044;
pub const WINDOW_HI: f64 = 0.6554;
pub const WINDOW_POINTS: usize = 50;
pub const EDGE_TOL: f64 = 0.002;
pub const EDGE_SCAN: (f64, f64, usize) = (0.55, 0.70, 1000);
pub const MC_SHOTS: u64 = 10_000;
pub const MC_SEEDS: u64 = 20;
pub const MC_MIN_GOOD_SEEDS: usize = 19;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

fn row(
    name: &str,
    expected: impl Into<String>,
    observed: impl Into<String>,
    pass: bool,
) -> CheckRow {
    CheckRow {
        name: name.to_string(),
        expected: expected.into(),
        observed: observed.into(),
        pass,
    }
}

fn fail(name: &str, expected: &str, e: impl std::fmt::Display) -> CheckRow {
    row(name, expected, format!("error: {e}"), false)
}

/// Options shared by the checks; `t_neg` decides what counts as negative.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub t_neg: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { t_neg: T_NEG }
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(f64::INFINITY, f64::min)
}

pub fn check_choi_window(opts: VerifyOptions) -> Vec<CheckRow> {
    let w = PositiveMapWitness::choi_phi(Side::A);
    let f = catalog::choi_example_filter();
    let xs = interior_grid(WINDOW_LO, WINDOW_HI, WINDOW_POINTS);
    let points: Result<Vec<_>, _> = xs
        .iter()
        .map(|&x| scan_point(x, WINDOW_T, &w, Some(&f), opts.t_neg))
        .collect();
    let points = match points {
        Ok(p) => p,
        Err(e) => return vec![fail("choi-window", "scan succeeds", e)],
    };
    let unf = min_of(points.iter().map(|p| p.min_eig_unfiltered));
    let fil = max_of(
        points
            .iter()
            .map(|p| p.min_eig_filtered.unwrap_or(f64::NAN)),
    );
    let mut rows = vec![
        row(
            "choi-window-unfiltered-undetected",
            format!(
                "min eig >= -{} at {WINDOW_POINTS} points",
                fmt_sig(opts.t_neg)
            ),
            format!("smallest {}", fmt_sig(unf)),
            unf >= -opts.t_neg,
        ),
        row(
            "choi-window-filtered-detected",
            format!(
                "min eig < -{} at {WINDOW_POINTS} points",
                fmt_sig(opts.t_neg)
            ),
            format!("largest {}", fmt_sig(fil)),
            fil < -opts.t_neg,
        ),
    ];

    let (lo, hi, n) = EDGE_SCAN;
    let grid = interior_grid(lo, hi, n);
    let scanned: Result<Vec<_>, _> = grid
        .iter()
        .map(|&x| scan_point(x, WINDOW_T, &w, Some(&f), opts.t_neg))
        .collect();
    match scanned {
        Ok(s) => {
            let unf: Vec<f64> = s.iter().map(|p| p.min_eig_unfiltered).collect();
            let fil: Vec<f64> = s.iter().filter_map(|p| p.min_eig_filtered).collect();
            let upper = sign_changes(&grid, &unf, opts.t_neg);
            let lower = sign_changes(&grid, &fil, opts.t_neg);
            for (name, target, found) in [
                ("choi-window-lower-edge", WINDOW_LO, lower),
                ("choi-window-upper-edge", WINDOW_HI, upper),
            ] {
                let pass = found.len() == 1 && (found[0] - target).abs() <= EDGE_TOL;
                let obs = found
                    .iter()
                    .map(|&x| fmt_sig(x))
                    .collect::<Vec<_>>()
                    .join(" ");
                rows.push(row(
                    name,
                    format!(
                        "one sign change within {} of {}",
                        fmt_sig(EDGE_TOL),
                        fmt_sig(target)
                    ),
                    if obs.is_empty() {
                        "none".to_string()
                    } else {
                        obs
                    },
                    pass,
                ));
            }
        }
        Err(e) => rows.push(fail("choi-window-edges", "scan succeeds", e)),
    }
    rows
}

pub fn check_upb(opts: VerifyOptions) -> Vec<CheckRow> {
    let rho = catalog::rho_upb();
    let ppt = is_ppt_with_threshold(&rho, opts.t_neg);
    let w = PositiveMapWitness::choi_psi(Side::B);
    let mut rows = vec![row(
        "upb-ppt",
        format!("min PT eig >= -{}", fmt_sig(opts.t_neg)),
        fmt_sig(ppt.min_eigenvalue),
        ppt.ppt,
    )];
    match detect_with_threshold(&w, &rho, "rho-upb", opts.t_neg) {
        Ok(r) => rows.push(row(
            "upb-unfiltered-undetected",
            format!("choi-psi:B min eig >= -{}", fmt_sig(opts.t_neg)),
            fmt_sig(r.min_eigenvalue),
            !r.detected,
        )),
        Err(e) => rows.push(fail("upb-unfiltered-undetected", "no error", e)),
    }
    let filtered = catalog::upb_rotation_filter().apply(&rho);
    match filtered.and_then(|(rf, _)| detect_with_threshold(&w, &rf, "rho-upb-f", opts.t_neg)) {
        Ok(r) => rows.push(row(
            "upb-filtered-detected",
            format!("choi-psi:B min eig < -{}", fmt_sig(opts.t_neg)),
            fmt_sig(r.min_eigenvalue),
            r.detected,
        )),
        Err(e) => rows.push(fail("upb-filtered-detected", "no error", e)),
    }
    rows
}

pub fn check_schmidt_invariance() -> Vec<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c41);
    let mut bad = 0;
    let mut total = 0;
    for d in [2usize, 3] {
        for _ in 0..100 {
            let f = random_filter(&mut rng, d, d);
            let k = rng.random_range(1..=d);
            let psi = random_pure_state_with_rank(&mut rng, d, d, k);
            let before = schmidt_rank(&psi);
            let after = f.apply_pure(&psi).map(|p| schmidt_rank(&p));
            total += 1;
            if before != k || after != Ok(k) {
                bad += 1;
            }
        }
    }
    vec![row(
        "schmidt-rank-invariance",
        format!("0 changes in {total} cases"),
        format!("{bad} changes"),
        bad == 0,
    )]
}

pub fn check_ppt_preservation(opts: VerifyOptions) -> Vec<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9917);
    let mut lost = 0;
    let mut worst = 0.0f64;
    let mut errors = 0;
    for _ in 0..100 {
        let f = random_filter(&mut rng, 3, 3);
        let rho = random_separable_state(&mut rng, 3, 3, 6);
        if !is_ppt_with_threshold(&rho, opts.t_neg).ppt {
            lost += 1;
            continue;
        }
        let (Ok(raw), Ok((rf, _))) = (f.apply_unnormalized(&rho), f.apply(&rho)) else {
            errors += 1;
            continue;
        };
        if !is_ppt_with_threshold(&rf, opts.t_neg).ppt {
            lost += 1;
        }
        let lhs = partial_transpose_b_matrix(&raw, 3, 3);
        match f
            .l()
            .kron(&f.m().conj())
            .sandwich(&partial_transpose_b(&rho))
        {
            Ok(rhs) => worst = worst.max(lhs.max_abs_diff(&rhs)),
            Err(_) => errors += 1,
        }
    }
    vec![
        row(
            "ppt-preservation",
            "0 of 100 lose PPT",
            format!("{lost} lost"),
            lost == 0 && errors == 0,
        ),
        row(
            "pt-conjugation-identity",
            "max entry gap <= 1e-10",
            fmt_sig(worst),
            worst <= 1e-10 && errors == 0,
        ),
    ]
}

/// The catalog filters together with the dimensions they act on.
pub fn catalog_filters() -> Vec<(String, LocalFilter)> {
    let mut v: Vec<(String, LocalFilter)> = catalog::builtin_filters().into_iter().collect();
    v.push(("identity".into(), LocalFilter::identity(3, 3)));
    v
}

pub fn check_measurement_equivalence() -> Vec<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe9);
    let mut worst_state = 0.0f64;
    let mut worst_prob = 0.0f64;
    let mut errors = Vec::new();
    for (label, f) in catalog_filters() {
        let (da, db) = f.dims();
        for _ in 0..20 {
            let rho = random_state(&mut rng, da, db);
            match (protocol_analytic(&f, &rho), f.apply(&rho)) {
                (Ok(out), Ok((expected, y))) => {
                    worst_state =
                        worst_state.max(out.state.matrix().max_abs_diff(expected.matrix()));
                    let (sa, sb) = out.scales;
                    worst_prob = worst_prob.max((out.total_prob - y / (sa * sb).powi(2)).abs());
                }
                (Err(e), _) | (_, Err(e)) => errors.push(format!("{label}: {e}")),
            }
        }
    }
    let mut worst_drd = 0.0f64;
    for _ in 0..50 {
        for n in [2, 3] {
            let d = random_diagonal(&mut rng, n);
            let rho = random_density_matrix(&mut rng, n);
            let dm = CMatrix::diag(&d);
            match postselect_diag(&d, &rho) {
                Ok((r, _)) => worst_drd = worst_drd.max(r.max_abs_diff(&(&(&dm * &rho) * &dm))),
                Err(e) => errors.push(e.to_string()),
            }
        }
    }
    let ok = errors.is_empty();
    let note = |v: f64| {
        if ok {
            fmt_sig(v)
        } else {
            format!("{} ({})", fmt_sig(v), errors.join("; "))
        }
    };
    vec![
        row(
            "protocol-equals-filter",
            "max entry gap <= 1e-10",
            note(worst_state),
            ok && worst_state <= 1e-10,
        ),
        row(
            "protocol-probability",
            "gap to rescaled yield <= 1e-10",
            note(worst_prob),
            ok && worst_prob <= 1e-10,
        ),
        row(
            "postselect-equals-drd",
            "max entry gap <= 1e-12",
            note(worst_drd),
            ok && worst_drd <= 1e-12,
        ),
    ]
}

/// Largest violation of `P² = P`, `P = P†`, `tr P = n` and `P_i P_j = 0`.
pub fn projector_defect(d: &[f64]) -> f64 {
    let Ok(p) = build_projector(d) else {
        return f64::INFINITY;
    };
    let m = p.matrix();
    let parts = p.components();
    let mut worst = (m * m).max_abs_diff(m);
    worst = worst.max(m.hermitian_defect());
    worst = worst.max((m.trace().re - d.len() as f64).abs());
    for i in 0..parts.len() {
        for j in 0..parts.len() {
            if i != j {
                worst = worst.max((&parts[i] * &parts[j]).max_abs());
            }
        }
    }
    worst
}

pub fn check_projector_algebra() -> Vec<CheckRow> {
    let mut diagonals: Vec<Vec<f64>> = Vec::new();
    for (_, f) in catalog_filters() {
        if let Ok(plan) = ProtocolPlan::new(&f) {
            diagonals.push(plan.projector_a().diagonal().to_vec());
            diagonals.push(plan.projector_b().diagonal().to_vec());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1a9);
    for _ in 0..50 {
        let n = rng.random_range(1..=4);
        diagonals.push(random_diagonal(&mut rng, n));
    }
    let worst = max_of(diagonals.iter().map(|d| projector_defect(d)));
    vec![row(
        "projector-algebra",
        format!("defect <= 1e-10 over {} diagonals", diagonals.len()),
        fmt_sig(worst),
        worst <= 1e-10,
    )]
}

pub fn check_monte_carlo() -> Vec<CheckRow> {
    let rho = match catalog::rho_xt(0.63, WINDOW_T) {
        Ok(r) => r,
        Err(e) => return vec![fail("mc-acceptance", "state builds", e)],
    };
    let f = catalog::choi_example_filter();
    let mut good = 0;
    let mut worst_branch = 0.0f64;
    let mut worst_z = 0.0f64;
    for seed in 0..MC_SEEDS {
        match run_protocol(&f, &rho, MC_SHOTS, seed) {
            Ok(run) => {
                let z =
                    (run.acceptance_rate - run.analytic_probability).abs() / run.standard_error();
                worst_z = worst_z.max(z);
                if z <= 4.0 {
                    good += 1;
                }
                worst_branch = worst_branch.max(run.branch_deviation);
            }
            Err(e) => return vec![fail("mc-acceptance", "runs succeed", e)],
        }
    }
    vec![
        row(
            "mc-acceptance",
            format!(">= {MC_MIN_GOOD_SEEDS}/{MC_SEEDS} seeds within 4 standard errors"),
            format!("{good}/{MC_SEEDS} (worst {:.2} se)", worst_z),
            good >= MC_MIN_GOOD_SEEDS,
        ),
        row(
            "mc-branch-state",
            "max entry gap <= 1e-10",
            fmt_sig(worst_branch),
            worst_branch <= 1e-10,
        ),
    ]
}

pub fn check_not_completely_positive(opts: VerifyOptions) -> Vec<CheckRow> {
    let me = maximally_entangled(3);
    let mut rows = Vec::new();
    for w in [
        PositiveMapWitness::choi_phi(Side::A),
        PositiveMapWitness::choi_psi(Side::A),
    ] {
        let name = format!("not-cp-{}", w.kind());
        match detect_with_threshold(&w, &me, "max-entangled", opts.t_neg) {
            Ok(r) => rows.push(row(
                &name,
                format!("min eig < -{}", fmt_sig(opts.t_neg)),
                fmt_sig(r.min_eigenvalue),
                r.detected,
            )),
            Err(e) => rows.push(fail(&name, "no error", e)),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x90);
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let a = random_density_matrix(&mut rng, 3);
        for w in [
            PositiveMapWitness::choi_phi(Side::A),
            PositiveMapWitness::choi_psi(Side::A),
        ] {
            let img = apply_witness_matrix(&w, &a, 3, 1).and_then(|m| hermitian_eig(&m));
            worst = worst.min(img.map_or(f64::NEG_INFINITY, |e| e.min()));
        }
    }
    rows.push(row(
        "choi-maps-positive",
        format!("min eig >= -{} over 200 inputs", fmt_sig(opts.t_neg)),
        fmt_sig(worst),
        worst >= -opts.t_neg,
    ));
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn table(&self) -> String {
        let w0 = max_width(self.rows.iter().map(|r| r.name.len()), "check".len());
        let w1 = max_width(self.rows.iter().map(|r| r.expected.len()), "expected".len());
        let w2 = max_width(self.rows.iter().map(|r| r.observed.len()), "observed".len());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:w0$}  {:w1$}  {:w2$}  result",
            "check", "expected", "observed"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:w0$}  {:w1$}  {:w2$}  {}",
                r.name,
                r.expected,
                r.observed,
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

fn max_width(it: impl Iterator<Item = usize>, floor: usize) -> usize {
    it.fold(floor, usize::max)
}

/// Every check, in a fixed order.
pub fn verify_all(opts: VerifyOptions) -> VerifyReport {
    let mut rows = Vec::new();
    rows.extend(check_choi_window(opts));
    rows.extend(check_upb(opts));
    rows.extend(check_schmidt_invariance());
    rows.extend(check_ppt_preservation(opts));
    rows.extend(check_measurement_equivalence());
    rows.extend(check_projector_algebra());
    rows.extend(check_monte_carlo());
    rows.extend(check_not_completely_positive(opts));
    VerifyReport { rows }
}
