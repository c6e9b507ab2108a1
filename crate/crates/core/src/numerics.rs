//! Scalar utilities shared by every module: ball volumes, Wallis integrals,
//! the tolerance policy and the deterministic random-stream contract used by
//! all Monte Carlo estimators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma as gamma_fn;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Number of samples drawn from one chunk generator. Chunks are the unit of
/// parallel work; a fixed size keeps results independent of the thread count.
pub const CHUNK_SIZE: usize = 1 << 15;

/// Numerical tolerances for rank decisions and geometric coincidence tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_eps: f64,
    pub geom_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_eps: 1e-9,
            geom_eps: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(rank_eps: f64, geom_eps: f64) -> Result<Self> {
        let ok = |e: f64| e > 0.0 && e < 1e-3;
        if !ok(rank_eps) || !ok(geom_eps) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must lie in (0, 1e-3), got rank_eps={rank_eps}, geom_eps={geom_eps}"
            )));
        }
        Ok(Tolerance { rank_eps, geom_eps })
    }

    /// Both tolerances set to the same value.
    pub fn uniform(eps: f64) -> Result<Self> {
        Self::new(eps, eps)
    }
}

/// Immutable descriptor of a reproducible random sequence.
///
/// The generator for sample chunk `c` is ChaCha8 keyed by `seed` on the
/// stream obtained by mixing `stream_id` and `c`, so any sample can be
/// regenerated from `(seed, stream_id, index)` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RandomStream { seed, stream_id }
    }

    /// A statistically independent child stream, e.g. one per face.
    pub fn substream(&self, index: u64) -> Self {
        RandomStream {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(1))),
        }
    }

    /// Generator for the `chunk`-th block of [`CHUNK_SIZE`] samples.
    pub fn chunk_rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(splitmix64(self.stream_id.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ chunk));
        rng
    }

    /// Runs `work(rng, first_index, count)` over consecutive chunks covering
    /// `total` samples, in parallel, and returns the per-chunk results in
    /// chunk order.
    pub fn map_chunks<T, F>(&self, total: usize, work: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, usize, usize) -> T + Sync,
    {
        let chunks = total.div_ceil(CHUNK_SIZE);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK_SIZE;
                let count = CHUNK_SIZE.min(total - start);
                let mut rng = self.chunk_rng(c as u64);
                work(&mut rng, start, count)
            })
            .collect()
    }
}

/// Euler's gamma function.
pub fn gamma(x: f64) -> f64 {
    gamma_fn(x)
}

/// Volume of the `ell`-dimensional unit ball, `pi^(ell/2) / Gamma(1 + ell/2)`.
pub fn kappa(ell: usize) -> f64 {
    let half = ell as f64 / 2.0;
    PI.powf(half) / gamma(1.0 + half)
}

/// `int_0^pi sin^n(t) dt`.
pub fn wallis(n: usize) -> f64 {
    let n = n as f64;
    gamma(0.5) * gamma((n + 1.0) / 2.0) / gamma((n + 2.0) / 2.0)
}

/// Surface area of the unit sphere `S^(dim-1)` in `R^dim`.
pub fn sphere_area(dim: usize) -> f64 {
    dim as f64 * kappa(dim)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// A standard Gaussian vector of length `dim`.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// A uniform point on `S^(dim-1)`, obtained by normalizing a Gaussian vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let mut g = gaussian_vector(rng, dim);
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            g.iter_mut().for_each(|x| *x /= norm);
            return g;
        }
    }
}

/// `count` uniform points on the unit sphere of `R^dim`, reproducible for a
/// fixed stream.
pub fn sphere_sample(dim: usize, stream: RandomStream, count: usize) -> Result<Vec<Vec<f64>>> {
    if dim == 0 || count == 0 {
        return Err(Error::InvalidArgument(
            "sphere_sample needs dim >= 1 and count >= 1".into(),
        ));
    }
    let chunks = stream.map_chunks(count, |rng, _, n| {
        (0..n).map(|_| unit_vector(rng, dim)).collect::<Vec<_>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// Mean and standard error of the mean from streamed first and second moments.
pub fn mean_and_std_error(sum: f64, sum_sq: f64, count: usize) -> (f64, f64) {
    if count == 0 {
        return (0.0, 0.0);
    }
    let n = count as f64;
    let mean = sum / n;
    if count < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}
