//! Seeded Monte Carlo simulation of the ensemble filtering protocol.
//!
//! Every copy holds the same `ρ`, so the conditional state after each
//! positive outcome is fixed. A shot only draws the four Born-rule outcome
//! bits; it is kept iff all four are positive.
//!
//! Each shot uses its own `ChaCha8Rng`, seeded with
//! `splitmix64(seed + (shot + 1) * GOLDEN)`. Shots are therefore independent
//! of how the run is partitioned across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::LocalFilter;
use crate::linalg::CMatrix;
use crate::measure::{protocol_analytic, MeasurementOrder, ProtocolPlan};
use crate::qstate::{normalize, DensityOperator};
use crate::witness::{detect, DetectionReport, PositiveMapWitness};

/// Identifier of the random source, recorded in every run.
pub const RNG_ALGORITHM: &str = "chacha8/splitmix64-per-shot";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of shot `shot` in a run seeded with `seed`.
pub fn shot_seed(seed: u64, shot: u64) -> u64 {
    splitmix64(seed.wrapping_add(shot.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// The single accepting outcome path of the protocol on a fixed input.
#[derive(Clone, Debug)]
pub struct Branch {
    /// Conditional probability of a positive outcome at each of the four steps.
    pub step_probabilities: [f64; 4],
    /// Final state after ancilla discard and the `U` unitaries, or `None`
    /// when some step has probability zero.
    pub state: Option<CMatrix>,
}

impl Branch {
    pub fn acceptance_probability(&self) -> f64 {
        self.step_probabilities.iter().product()
    }
}

/// Follows the projection postulate through the four measurements.
pub fn accepting_branch(f: &LocalFilter, rho: &DensityOperator) -> Result<Branch> {
    check_dims(f, rho)?;
    let plan = ProtocolPlan::new(f)?;
    let mut state = plan.prepare(rho.matrix())?;
    let mut step_probabilities = [0.0; 4];
    for (k, proj) in plan
        .measurements(MeasurementOrder::AliceFirst)
        .iter()
        .enumerate()
    {
        let before = state.trace().re;
        let after = proj.sandwich(&state)?;
        let p = (after.trace().re / before).clamp(0.0, 1.0);
        step_probabilities[k] = p;
        if p == 0.0 {
            return Ok(Branch {
                step_probabilities,
                state: None,
            });
        }
        state = after.scale_real(1.0 / p);
    }
    let out = plan.finish(&state)?;
    let tr = out.trace().re;
    Ok(Branch {
        step_probabilities,
        state: Some(out.scale_real(1.0 / tr)),
    })
}

fn check_dims(f: &LocalFilter, rho: &DensityOperator) -> Result<()> {
    if f.dims() != rho.dims() {
        return Err(Error::DimensionMismatch(format!(
            "filter acts on {:?}, state is {:?}",
            f.dims(),
            rho.dims()
        )));
    }
    Ok(())
}

/// Draws the four outcome bits of one shot.
pub fn sample_shot(probabilities: &[f64; 4], seed: u64, shot: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(shot_seed(seed, shot));
    probabilities.iter().all(|&p| rng.random::<f64>() < p)
}

#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub shots: u64,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub accepted: u64,
    pub acceptance_rate: f64,
    /// Mean of the accepted final states; `None` if no shot was accepted.
    pub estimated_state: Option<CMatrix>,
    /// Analytic filtered state.
    pub reference: DensityOperator,
    pub analytic_probability: f64,
    /// Largest entrywise gap between the accepting branch and `reference`.
    pub branch_deviation: f64,
}

/// JSON-facing summary of a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub shots: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub accepted: u64,
    pub acceptance_rate: f64,
    pub analytic_probability: f64,
    pub frobenius_distance: Option<f64>,
}

impl ProtocolRun {
    pub fn frobenius_distance(&self) -> Option<f64> {
        self.estimated_state
            .as_ref()
            .map(|s| self.reference.frobenius_distance(s))
    }

    /// Binomial standard error of the acceptance rate around the analytic value.
    pub fn standard_error(&self) -> f64 {
        let p = self.analytic_probability;
        (p * (1.0 - p) / self.shots as f64).sqrt()
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            shots: self.shots,
            seed: self.seed,
            rng: self.rng_algorithm,
            accepted: self.accepted,
            acceptance_rate: self.acceptance_rate,
            analytic_probability: self.analytic_probability,
            frobenius_distance: self.frobenius_distance(),
        }
    }
}

pub fn run_protocol(
    f: &LocalFilter,
    rho: &DensityOperator,
    shots: u64,
    seed: u64,
) -> Result<ProtocolRun> {
    check_dims(f, rho)?;
    if shots == 0 {
        return Err(Error::BadParam("shots must be at least 1".into()));
    }
    let analytic = protocol_analytic(f, rho)?;
    let branch = accepting_branch(f, rho)?;
    let probs = branch.step_probabilities;

    let outcomes: Vec<bool> = (0..shots)
        .into_par_iter()
        .map(|i| sample_shot(&probs, seed, i))
        .collect();

    let mut accepted = 0u64;
    let mut sum: Option<CMatrix> = None;
    if let Some(state) = &branch.state {
        for _ in outcomes.iter().filter(|&&ok| ok) {
            accepted += 1;
            sum = Some(match sum {
                None => state.clone(),
                Some(acc) => &acc + state,
            });
        }
    }
    log::debug!("protocol run: {accepted}/{shots} accepted (seed {seed})");

    let branch_deviation = branch
        .state
        .as_ref()
        .map_or(f64::INFINITY, |s| s.max_abs_diff(analytic.state.matrix()));
    Ok(ProtocolRun {
        shots,
        seed,
        rng_algorithm: RNG_ALGORITHM,
        accepted,
        acceptance_rate: accepted as f64 / shots as f64,
        estimated_state: sum.map(|s| s.scale_real(1.0 / accepted as f64)),
        reference: analytic.state,
        analytic_probability: analytic.total_prob,
        branch_deviation,
    })
}

/// Runs the protocol and tests the surviving ensemble with `w`.
pub fn witness_after_protocol(
    f: &LocalFilter,
    rho: &DensityOperator,
    w: &PositiveMapWitness,
    shots: u64,
    seed: u64,
) -> Result<DetectionReport> {
    let run = run_protocol(f, rho, shots, seed)?;
    let est = run.estimated_state.ok_or(Error::NoAcceptedShots)?;
    let (state, _) = normalize(&est.hermitian_part(), rho.dim_a(), rho.dim_b())?;
    detect(w, &state, "protocol")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::witness::Side;

    #[test]
    fn shot_seeds_differ() {
        let a: Vec<u64> = (0..1000).map(|i| shot_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), a.len());
        assert_ne!(shot_seed(7, 0), shot_seed(8, 0));
    }

    #[test]
    fn splitmix_reference_values() {
        // first outputs of the reference SplitMix64 stream seeded with 0
        assert_eq!(shot_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(shot_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn identity_filter_accepts_everything() {
        let rho = catalog::rho_xt(0.63, 0.05).unwrap();
        let run = run_protocol(&LocalFilter::identity(3, 3), &rho, 500, 1).unwrap();
        assert_eq!(run.accepted, 500);
        assert_eq!(run.acceptance_rate, 1.0);
        assert!(run.estimated_state.unwrap().approx_eq(rho.matrix(), 1e-14));
    }

    #[test]
    fn deterministic() {
        let rho = catalog::rho_xt(0.63, 0.05).unwrap();
        let f = catalog::choi_example_filter();
        let a = run_protocol(&f, &rho, 2000, 42).unwrap();
        let b = run_protocol(&f, &rho, 2000, 42).unwrap();
        assert_eq!(a.accepted, b.accepted);
        assert_eq!(
            serde_json::to_string(&a.summary()).unwrap(),
            serde_json::to_string(&b.summary()).unwrap()
        );
        let c = run_protocol(&f, &rho, 2000, 43).unwrap();
        assert_ne!(a.accepted, c.accepted);
    }

    #[test]
    fn branch_probabilities_multiply_to_analytic() {
        let rho = catalog::rho_xt(0.63, 0.05).unwrap();
        let f = catalog::choi_example_filter();
        let branch = accepting_branch(&f, &rho).unwrap();
        let analytic = protocol_analytic(&f, &rho).unwrap();
        assert!((branch.acceptance_probability() - analytic.total_prob).abs() < 1e-12);
        // side B is the identity, so Bob always succeeds
        assert!((branch.step_probabilities[2] - 1.0).abs() < 1e-12);
        assert!((branch.step_probabilities[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn choi_example_binomial_bound() {
        let rho = catalog::rho_xt(0.63, 0.05).unwrap();
        let run = run_protocol(&catalog::choi_example_filter(), &rho, 10_000, 7).unwrap();
        assert!(
            (run.acceptance_rate - run.analytic_probability).abs() <= 4.0 * run.standard_error()
        );
        assert!(run.branch_deviation < 1e-10);
    }

    #[test]
    fn gisin_bell_state_estimate() {
        let run = run_protocol(
            &catalog::gisin_filter(0.6).unwrap(),
            &catalog::bell_state(),
            10_000,
            3,
        )
        .unwrap();
        assert!(run.frobenius_distance().unwrap() < 0.05);
        assert!(run.frobenius_distance().unwrap() < 1e-12);
    }

    #[test]
    fn mean_over_seeds() {
        let rho = catalog::rho_xt(0.63, 0.05).unwrap();
        let f = catalog::choi_example_filter();
        let runs: Vec<ProtocolRun> = (0..20)
            .map(|s| run_protocol(&f, &rho, 1000, s).unwrap())
            .collect();
        let mean = runs.iter().map(|r| r.acceptance_rate).sum::<f64>() / 20.0;
        let se = runs[0].standard_error() / 20f64.sqrt();
        assert!((mean - runs[0].analytic_probability).abs() <= 3.0 * se);
    }

    #[test]
    fn witness_examples() {
        let rho = catalog::rho_xt(0.63, 0.05).unwrap();
        let phi = PositiveMapWitness::choi_phi(Side::A);
        let r = witness_after_protocol(&LocalFilter::identity(3, 3), &rho, &phi, 200, 1).unwrap();
        assert!(!r.detected);
        let r =
            witness_after_protocol(&catalog::choi_example_filter(), &rho, &phi, 200, 1).unwrap();
        assert!(r.detected);
        let r = witness_after_protocol(
            &catalog::upb_rotation_filter(),
            &catalog::rho_upb(),
            &PositiveMapWitness::choi_phi(Side::B),
            200,
            1,
        )
        .unwrap();
        assert!(r.detected);
    }

    #[test]
    fn errors() {
        let f = catalog::choi_example_filter();
        assert!(matches!(
            run_protocol(&f, &catalog::bell_state(), 10, 1),
            Err(Error::DimensionMismatch(_))
        ));
        let rho = catalog::rho_xt(0.63, 0.05).unwrap();
        assert!(matches!(
            run_protocol(&f, &rho, 0, 1),
            Err(Error::BadParam(_))
        ));
    }

    #[test]
    fn summary_json_fields() {
        let run =
            run_protocol(&LocalFilter::identity(2, 2), &catalog::bell_state(), 10, 5).unwrap();
        let v: serde_json::Value = serde_json::to_value(run.summary()).unwrap();
        for key in [
            "shots",
            "seed",
            "rng",
            "accepted",
            "acceptance_rate",
            "frobenius_distance",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["acceptance_rate"], 1.0);
    }
}
