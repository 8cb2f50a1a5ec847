use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution, StandardNormal};
use rayon::prelude::*;

use super::{check_rho, Method, SerEstimate};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;

/// Samples per independently seeded chunk. Results depend on it, so it is
/// fixed.
pub const MC_CHUNK: usize = 65_536;

const MIN_SAMPLES: usize = 1_000;

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    Ok(())
}

fn binomial(errors: u64, n: usize, rho: f64) -> SerEstimate {
    let p = errors as f64 / n as f64;
    SerEstimate { value: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), method: Method::Mc, rho }
}

/// Monte Carlo SER of the minimum-distance detector. Chunk `k` draws from
/// `ChaCha8(seed)` on stream `k`, so the estimate is reproducible for a given
/// `(seed, n)` regardless of thread count.
pub fn ser_mc(c: &Constellation, noise: &NoiseModel, rho: f64, n: usize, seed: u64) -> Result<SerEstimate> {
    check_rho(rho)?;
    check_samples(n)?;
    noise.validate()?;
    let dim = c.dim();
    let m = c.len();
    let pts: Vec<f64> = c.points().iter().copied().collect(); // column-major
    let symbols = WeightedIndex::new(c.priors()).map_err(|e| Error::InvalidPriors(e.to_string()))?;
    let mixing = match noise {
        NoiseModel::Awgn => None,
        NoiseModel::Compound { mixing } => Some(mixing.sampler()?),
    };
    let sigma = rho.sqrt().recip();
    let chunks = n.div_ceil(MC_CHUNK);
    let errors: Vec<u64> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = MC_CHUNK.min(n - k * MC_CHUNK);
            let mut rng = chunk_rng(seed, k);
            let mut y = vec![0.0; dim];
            let mut count = 0u64;
            for _ in 0..len {
                let i = symbols.sample(&mut rng);
                let scale = match &mixing {
                    None => sigma,
                    Some(s) => sigma * s.draw(&mut rng).sqrt(),
                };
                for (d, yd) in y.iter_mut().enumerate() {
                    let g: f64 = rng.sample(StandardNormal);
                    *yd = pts[i * dim + d] + scale * g;
                }
                if nearest(&pts, dim, m, &y) != i {
                    count += 1;
                }
            }
            count
        })
        .collect();
    Ok(binomial(errors.iter().sum(), n, rho))
}

fn nearest(pts: &[f64], dim: usize, m: usize, y: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for j in 0..m {
        let s = &pts[j * dim..(j + 1) * dim];
        let d: f64 = s.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

/// Monte Carlo SER of a complex constellation (`N × M`) under circular
/// complex noise `CN(0, 2/ρ)` per complex dimension, detected with the
/// complex Euclidean distance.
pub fn ser_mc_complex(
    points: &DMatrix<Complex<f64>>,
    priors: Option<&[f64]>,
    rho: f64,
    n: usize,
    seed: u64,
) -> Result<SerEstimate> {
    check_rho(rho)?;
    check_samples(n)?;
    let dim = points.nrows();
    let m = points.ncols();
    if m < 2 {
        return Err(Error::TooFewSymbols(m));
    }
    let uniform = vec![1.0 / m as f64; m];
    let symbols = WeightedIndex::new(priors.unwrap_or(&uniform)).map_err(|e| Error::InvalidPriors(e.to_string()))?;
    let sigma = rho.sqrt().recip();
    let chunks = n.div_ceil(MC_CHUNK);
    let errors: Vec<u64> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = MC_CHUNK.min(n - k * MC_CHUNK);
            let mut rng = chunk_rng(seed, k);
            let mut y = vec![Complex::new(0.0, 0.0); dim];
            let mut count = 0u64;
            for _ in 0..len {
                let i = symbols.sample(&mut rng);
                for (d, yd) in y.iter_mut().enumerate() {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    *yd = points[(d, i)] + Complex::new(re, im) * sigma;
                }
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for j in 0..m {
                    let d: f64 = (0..dim).map(|r| (y[r] - points[(r, j)]).norm_sqr()).sum();
                    if d < best_d {
                        best_d = d;
                        best = j;
                    }
                }
                if best != i {
                    count += 1;
                }
            }
            count
        })
        .collect();
    Ok(binomial(errors.iter().sum(), n, rho))
}
