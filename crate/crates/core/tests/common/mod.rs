//! Shared generators for randomized solver/gradient tests.

use mwf_ic_core::{BinProblem, CMat, Complex64, FilterPair, Variant};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn random_unit_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
}

/// Random Hermitian PSD matrix: a sum of outer products plus ridge.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, ridge: f64) -> CMat {
    let mut m = CMat::identity(n).scale(ridge);
    for _ in 0..n + 1 {
        let v: Vec<Complex64> = (0..n).map(|_| random_unit_complex(rng)).collect();
        m = m.add(&CMat::scaled_outer(&v, 1.0));
    }
    m.hermitian_symmetrize();
    m
}

/// Model-consistent random bin problem: rank-one speech along a shared RTF
/// direction, random PSD undesired components, Phi_y = Phi_x + Phi_u.
pub fn random_problem(
    rng: &mut ChaCha8Rng,
    mics_per_side: usize,
    alpha: f64,
    variant: Variant,
) -> BinProblem {
    let n = 2 * mics_per_side;
    let mut a_left: Vec<Complex64> = (0..n)
        .map(|_| random_unit_complex(rng) + Complex64::new(0.7, 0.0))
        .collect();
    let pivot = a_left[0];
    a_left.iter_mut().for_each(|v| *v /= pivot);
    let a_right: Vec<Complex64> = a_left.iter().map(|v| v / a_left[mics_per_side]).collect();
    let phi_x_left = 0.5 + rng.gen::<f64>();
    let phi_x_right = phi_x_left * a_left[mics_per_side].norm_sqr();

    let phi_x = CMat::scaled_outer(&a_left, phi_x_left);
    let phi_v = random_psd(rng, n, 0.1);
    let phi_u = phi_v.add(&random_psd(rng, n, 0.05));
    let mut phi_y = phi_x.add(&phi_u);
    phi_y.hermitian_symmetrize();

    BinProblem::new(
        phi_x,
        phi_y,
        phi_u,
        phi_v,
        a_left,
        a_right,
        phi_x_left,
        phi_x_right,
        alpha,
        variant,
    )
    .expect("generated problem must validate")
}

/// A generic evaluation point away from the degenerate all-zeros filter.
pub fn random_filters(rng: &mut ChaCha8Rng, n: usize) -> FilterPair {
    let reals: Vec<f64> = (0..4 * n).map(|_| rng.gen::<f64>() - 0.5).collect();
    FilterPair::from_reals(&reals)
}
