//! Seeded random jets, orthogonal matrices, frames and deterministic
//! low-discrepancy sphere points.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{Jet, SymMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Region from which candidate jets are drawn: r uniform in `r`, p uniform
/// in the ball of radius `p_radius`, A = Q diag(μ) Qᵗ with Q Haar-random and
/// μ uniform in `eig`. `x_box` is used for x-dependent subequations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub r: (f64, f64),
    pub p_radius: f64,
    pub eig: (f64, f64),
    pub x_box: Option<(Vec<f64>, Vec<f64>)>,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox {
            r: (-5.0, 5.0),
            p_radius: 5.0,
            eig: (-5.0, 5.0),
            x_box: None,
        }
    }
}

pub const MAX_DRAWS: usize = 1_000_000;

pub fn gaussian_vec(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

pub fn random_unit(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let g = gaussian_vec(n, rng);
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return g.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform point of the ball of the given radius.
pub fn random_in_ball(n: usize, radius: f64, rng: &mut SeededRng) -> Vec<f64> {
    let u = random_unit(n, rng);
    let s = radius * rng.random::<f64>().powf(1.0 / n as f64);
    u.into_iter().map(|x| s * x).collect()
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// sign of R's diagonal fixed).
pub fn random_orthogonal(n: usize, rng: &mut SeededRng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

pub fn matrix_with_spectrum(q: &DMatrix<f64>, mu: &[f64]) -> SymMatrix {
    let n = mu.len();
    SymMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| q[(i, k)] * mu[k] * q[(j, k)]).sum()
    })
}

/// Symmetric matrix with eigenvalues uniform in `eig`.
pub fn random_sym(n: usize, eig: (f64, f64), rng: &mut SeededRng) -> SymMatrix {
    let q = random_orthogonal(n, rng);
    let mu: Vec<f64> = (0..n).map(|_| rng.random_range(eig.0..=eig.1)).collect();
    matrix_with_spectrum(&q, &mu)
}

/// Positive semidefinite matrix with eigenvalues uniform in [0, scale].
pub fn random_psd(n: usize, scale: f64, rng: &mut SeededRng) -> SymMatrix {
    random_sym(n, (0.0, scale), rng)
}

pub fn random_point(lo: &[f64], hi: &[f64], rng: &mut SeededRng) -> Vec<f64> {
    lo.iter()
        .zip(hi)
        .map(|(&a, &b)| if a < b { rng.random_range(a..b) } else { a })
        .collect()
}

pub fn random_jet(n: usize, b: &SampleBox, rng: &mut SeededRng) -> Jet {
    let r = rng.random_range(b.r.0..=b.r.1);
    let p = random_in_ball(n, b.p_radius, rng);
    let a = random_sym(n, b.eig, rng);
    Jet::new(r, p, a)
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    out
}

const PRIMES: [u64; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

/// `k` deterministic, well-spread unit vectors in ℝⁿ: equally spaced angles
/// for n = 2, a Fibonacci lattice for n = 3, and Box–Muller images of a
/// Halton sequence otherwise.
pub fn sphere_points(n: usize, k: usize) -> Vec<Vec<f64>> {
    match n {
        0 => vec![],
        1 => (0..k)
            .map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => (0..k)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..k)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / k as f64;
                    let rad = (1.0 - z * z).sqrt();
                    let t = golden * i as f64;
                    vec![rad * t.cos(), rad * t.sin(), z]
                })
                .collect()
        }
        _ => {
            let pairs = n.div_ceil(2);
            assert!(
                2 * pairs <= PRIMES.len(),
                "sphere_points supports n ≤ {}",
                PRIMES.len()
            );
            (0..k)
                .map(|i| {
                    let idx = i as u64 + 1;
                    let mut v = Vec::with_capacity(2 * pairs);
                    for q in 0..pairs {
                        let u1 = radical_inverse(idx, PRIMES[2 * q]).max(1e-300);
                        let u2 = radical_inverse(idx, PRIMES[2 * q + 1]);
                        let rad = (-2.0 * u1.ln()).sqrt();
                        let t = 2.0 * std::f64::consts::PI * u2;
                        v.push(rad * t.cos());
                        v.push(rad * t.sin());
                    }
                    v.truncate(n);
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / norm).collect()
                })
                .collect()
        }
    }
}

/// Unit directions for line-projection probes: `k` sphere points followed by
/// the coordinate axes.
pub fn probe_directions(n: usize, k: usize) -> Vec<Vec<f64>> {
    let mut dirs = sphere_points(n, k);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        dirs.push(e);
    }
    dirs
}

/// First `p` columns of a random orthogonal matrix.
pub fn random_frame(n: usize, p: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let q = random_orthogonal(n, rng);
    (0..p)
        .map(|j| (0..n).map(|i| q[(i, j)]).collect())
        .collect()
}

pub const DEFAULT_FRAME_COUNT: usize = 256;
const FRAME_SEED: u64 = 0x6a65_7473;

/// Deterministic sample of `count` orthonormal p-frames of ℝⁿ. Lines use the
/// low-discrepancy sphere points; higher p uses seeded Haar frames.
pub fn grassmann_frames(n: usize, p: usize, count: usize) -> Vec<Vec<Vec<f64>>> {
    if p == 1 {
        return sphere_points(n, count)
            .into_iter()
            .map(|v| vec![v])
            .collect();
    }
    let mut r = rng(FRAME_SEED ^ ((n as u64) << 8) ^ p as u64);
    (0..count).map(|_| random_frame(n, p, &mut r)).collect()
}

/// Completes a unit vector to an orthonormal basis; the returned vectors are
/// the n − 1 complementary ones.
pub fn orthonormal_complement(nu: &[f64]) -> Vec<Vec<f64>> {
    let n = nu.len();
    let mut basis: Vec<Vec<f64>> = vec![nu.to_vec()];
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&a, &b| nu[a].abs().total_cmp(&nu[b].abs()));
    for &ax in &axes {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[ax] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= d * bi;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis.split_off(1)
}
