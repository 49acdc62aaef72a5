//! Seeded samplers for states, unitaries and probability vectors.
//!
//! Every sampler takes the generator explicitly; nothing reads global state.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::linalg::{hermitian_fn, partial_trace, CMatrix, SystemDims, C64};

/// Deterministic generator for `seed`.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for item `index` of a sweep seeded with `seed`; independent of
/// how many other items are drawn or in which order.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Haar-distributed isometry `C^cols -> C^rows` (`rows >= cols`), from
/// Gram-Schmidt on a complex Gaussian matrix.
pub fn haar_isometry(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols);
    loop {
        let mut g = gaussian(rng, rows, cols);
        if orthonormalize_columns(&mut g) {
            return g;
        }
    }
}

pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    haar_isometry(rng, n, n)
}

/// Modified Gram-Schmidt; false if the columns are numerically dependent.
fn orthonormalize_columns(m: &mut CMatrix) -> bool {
    let (r, c) = (m.rows(), m.cols());
    for j in 0..c {
        for k in 0..j {
            let dot: C64 = (0..r).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
            for i in 0..r {
                let v = m[(i, k)];
                m[(i, j)] -= dot * v;
            }
        }
        let norm = (0..r).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return false;
        }
        for i in 0..r {
            m[(i, j)] /= norm;
        }
    }
    true
}

/// Haar-random unit vector as a column.
pub fn pure_state(rng: &mut impl Rng, d: usize) -> CMatrix {
    haar_isometry(rng, d, 1)
}

/// Density matrix obtained by tracing an environment of dimension `env` out
/// of a Haar-random pure state.
pub fn density_matrix(rng: &mut impl Rng, d: usize, env: usize) -> CMatrix {
    let v = pure_state(rng, d * env);
    let p = CMatrix::projector(&v);
    let dims = SystemDims::new([("S", d), ("E", env)]).expect("labels");
    partial_trace(&p, &dims, &["E"]).expect("layout").0.hermitian_part()
}

/// Density matrix with a randomly chosen environment size in `1..=d`.
pub fn mixed_state(rng: &mut impl Rng, d: usize) -> CMatrix {
    let env = rng.gen_range(1..=d.max(1));
    density_matrix(rng, d, env)
}

/// Hermitian matrix with Gaussian entries.
pub fn hermitian(rng: &mut impl Rng, d: usize) -> CMatrix {
    gaussian(rng, d, d).hermitian_part()
}

/// Point drawn uniformly from the probability simplex.
pub fn dirichlet(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let gamma = Gamma::new(1.0, 1.0).expect("shape");
    let mut w: Vec<f64> = (0..k).map(|_| gamma.sample(rng) + 1e-300).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Effects of a random `k`-outcome measurement on `C^d`: Wishart samples
/// `G_i` rescaled by `S^{-1/2}`, `S = Σ G_i`.
pub fn povm_effects(rng: &mut impl Rng, d: usize, k: usize) -> Vec<CMatrix> {
    let g: Vec<CMatrix> = (0..k)
        .map(|_| {
            let a = gaussian(rng, d, d);
            a.mul(&a.adjoint())
        })
        .collect();
    let mut s = CMatrix::zeros(d, d);
    g.iter().for_each(|x| s += x);
    let w = hermitian_fn(&s, |v| if v > 1e-14 { v.powf(-0.5) } else { 0.0 }).expect("hermitian");
    g.iter().map(|x| w.mul(x).mul(&w).hermitian_part()).collect()
}
