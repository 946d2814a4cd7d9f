//! Seeded generators for random matrices, states and filters.
//!
//! Used by the property suites and the reproduction checks; every function
//! takes the caller's RNG so results depend only on the seed.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::filter::LocalFilter;
use crate::linalg::{CMatrix, C64};
use crate::qstate::{DensityOperator, PureState};

/// Minimum singular value accepted for a random "full-rank" filter factor.
const FILTER_MIN_SINGULAR: f64 = 1e-2;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Complex Ginibre matrix (independent standard normal real and imaginary parts).
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// Haar-ish unitary from Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_matrix(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for prev in &cols {
            let proj: C64 = prev.iter().zip(&v).map(|(p, x)| p.conj() * x).sum();
            for (x, p) in v.iter_mut().zip(prev) {
                *x -= proj * p;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Unit vector with Gaussian amplitudes.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim_a: usize, dim_b: usize) -> PureState {
    PureState::new(dim_a, dim_b, random_vector(rng, dim_a * dim_b))
        .expect("normalized random vector")
}

/// Pure state with a prescribed Schmidt rank `k`.
pub fn random_pure_state_with_rank<R: Rng + ?Sized>(
    rng: &mut R,
    dim_a: usize,
    dim_b: usize,
    k: usize,
) -> PureState {
    assert!(k >= 1 && k <= dim_a.min(dim_b));
    let ua = random_unitary(rng, dim_a);
    let ub = random_unitary(rng, dim_b);
    let coeffs: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); dim_a * dim_b];
    for (s, c) in coeffs.iter().enumerate() {
        for i in 0..dim_a {
            for j in 0..dim_b {
                amps[i * dim_b + j] += ua[(i, s)] * ub[(j, s)] * (c / norm);
            }
        }
    }
    PureState::new(dim_a, dim_b, amps).expect("normalized by construction")
}

/// Random full-rank density matrix `G G† / tr(G G†)` on `n` dimensions.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_matrix(rng, n, n);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.scale_real(1.0 / tr).hermitian_part()
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim_a: usize, dim_b: usize) -> DensityOperator {
    DensityOperator::new(dim_a, dim_b, random_density_matrix(rng, dim_a * dim_b))
        .expect("random density matrix is valid")
}

pub fn random_product_state<R: Rng + ?Sized>(
    rng: &mut R,
    dim_a: usize,
    dim_b: usize,
) -> DensityOperator {
    let m = random_density_matrix(rng, dim_a).kron(&random_density_matrix(rng, dim_b));
    DensityOperator::new(dim_a, dim_b, m.hermitian_part()).expect("product of states is valid")
}

/// Flat Dirichlet weights via normalized exponential variates.
pub fn dirichlet_weights<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Convex mixture of `terms` random product states: separable, hence PPT.
pub fn random_separable_state<R: Rng + ?Sized>(
    rng: &mut R,
    dim_a: usize,
    dim_b: usize,
    terms: usize,
) -> DensityOperator {
    let w = dirichlet_weights(rng, terms);
    let n = dim_a * dim_b;
    let mut acc = CMatrix::zeros(n, n);
    for wk in w {
        let p = random_product_state(rng, dim_a, dim_b);
        acc = &acc + &p.matrix().scale_real(wk);
    }
    DensityOperator::new(dim_a, dim_b, acc.hermitian_part()).expect("mixture is valid")
}

/// Ginibre matrix whose smallest singular value is at least 1e-2.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let m = random_matrix(rng, n, n);
        let s = crate::linalg::singular_values(&m);
        if s.last().copied().unwrap_or(0.0) >= FILTER_MIN_SINGULAR {
            return m;
        }
    }
}

pub fn random_filter<R: Rng + ?Sized>(rng: &mut R, dim_a: usize, dim_b: usize) -> LocalFilter {
    LocalFilter::new(random_invertible(rng, dim_a), random_invertible(rng, dim_b))
        .expect("well-conditioned random factors")
}

/// Diagonal with entries uniform in (0, 1].
pub fn random_diagonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| 1.0 - rng.random::<f64>()).collect()
}
