//! Random valid structures and random metric perturbations for tests.
#![allow(dead_code)]

use achcr::ach::PhiExpansion;
use achcr::algebra::{self, CRFrameAlgebra, DeformationTensor};
use achcr::index::Alphabet;
use achcr::linalg::Matrix;
use achcr::scalar::{rat, Scalar};
use rand::Rng;

pub fn small_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Scalar {
    Scalar::frac(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

pub fn small_scalar(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Scalar {
    Scalar::new(
        rat(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den)),
        rat(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den)),
    )
}

fn base(rng: &mut impl Rng, n: usize) -> Option<CRFrameAlgebra> {
    match (n, rng.gen_range(0..3)) {
        (1, 0) => algebra::heisenberg(1).ok(),
        (1, _) => Some(algebra::su2()),
        (_, 0) => algebra::heisenberg(n).ok(),
        (_, 1) => Some(algebra::su2_aff()),
        _ => algebra::twisted(&small_scalar(rng, 3, 2)).ok(),
    }
}

/// A random frame change, constant rescale and constant deformation of a
/// built-in structure; always passes validation.
pub fn random_algebra(rng: &mut impl Rng, n: usize) -> CRFrameAlgebra {
    loop {
        let Some(alg) = base(rng, n) else { continue };
        let a = alg.alphabet();
        let mut frame = Matrix::identity(a.size());
        for p in 0..n {
            for q in 0..n {
                let v = if p == q { Scalar::one() + small_scalar(rng, 2, 3) } else { small_scalar(rng, 1, 3) };
                frame[(a.hol(p), a.hol(q))] = v.clone();
                frame[(a.antihol(p), a.antihol(q))] = v.conj();
            }
        }
        let Ok(alg) = alg.change_frame(&frame) else { continue };
        let lambda = rat(rng.gen_range(1..=5), rng.gen_range(1..=4));
        let Ok(alg) = alg.rescale(&lambda) else { continue };
        let Ok(h) = alg.levi_form() else { continue };
        let lowered = {
            let m = Matrix::from_fn(n, n, |_, _| Scalar::zero());
            let mut m = m;
            for p in 0..n {
                for q in p..n {
                    let v = small_scalar(rng, 1, 6);
                    m[(p, q)] = v.clone();
                    m[(q, p)] = v;
                }
            }
            m
        };
        let Ok(mu) = DeformationTensor::from_lowered(&lowered, &h) else { continue };
        let Ok(alg) = alg.deform(&mu) else { continue };
        if alg.validate().passed() {
            return alg;
        }
    }
}

/// Random normal-form `φ` with terms in degrees `1..=max_degree`.
pub fn random_phi(rng: &mut impl Rng, a: Alphabet, terms: usize, max_degree: usize) -> PhiExpansion {
    let mut phi = PhiExpansion::zero(a);
    let boundary: Vec<usize> = a.boundary().collect();
    for _ in 0..terms {
        let i = boundary[rng.gen_range(0..boundary.len())];
        let j = boundary[rng.gen_range(0..boundary.len())];
        let d = rng.gen_range(1..=max_degree);
        let self_conj = a.conj(i) == j;
        let v = if self_conj { small_rational(rng, 4, 3) } else { small_scalar(rng, 4, 3) };
        if !v.is_zero() {
            phi.add_term(i, j, d, &v).unwrap();
        }
    }
    phi
}
