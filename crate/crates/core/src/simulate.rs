//! Seeded simulation of the random-scan chain, the deterministic-scan chain
//! and the embedded product chain, and replicated variance estimation.
//!
//! Every draw comes from a ChaCha8 stream seeded by the configuration, and
//! replica `r` of an estimate uses `derive_seed(seed, r)`, so results are
//! identical whether replicas run sequentially or in parallel.

use rayon::prelude::*;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::{center, check_len, Kernel, KernelFamily, ObsFunction};
use crate::seed::{derive_seed, rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Uniformly chosen kernel at every step.
    Rand,
    /// Kernel `(i − 1) mod k` at step `i`.
    Strat,
    /// The product chain on `X^k`.
    Embedded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    /// Number of recorded states `M`.
    pub steps: usize,
    pub replicas: usize,
    pub seed: u64,
    pub scheme: Scheme,
    /// Discarded steps before recording. The deterministic cycle keeps its
    /// phase across the burn-in.
    pub burn_in: usize,
}

impl SimulationConfig {
    pub fn new(steps: usize, seed: u64, scheme: Scheme) -> Self {
        Self {
            steps,
            replicas: 1,
            seed,
            scheme,
            burn_in: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidConfig("replicas must be at least 1".into()));
        }
        Ok(())
    }
}

/// Recorded states. Embedded paths store one `k`-tuple per step, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    scheme: Scheme,
    width: usize,
    states: Vec<usize>,
}

impl Path {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Number of recorded steps.
    pub fn len(&self) -> usize {
        self.states.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Components per step: `k` for embedded paths, otherwise 1.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn step(&self, i: usize) -> &[usize] {
        &self.states[i * self.width..(i + 1) * self.width]
    }
}

/// Cumulative row sums for inverse-CDF sampling.
struct Sampler {
    n: usize,
    cum: Vec<f64>,
}

impl Sampler {
    fn from_weights(rows: usize, n: usize, weight: impl Fn(usize, usize) -> f64) -> Self {
        let mut cum = Vec::with_capacity(rows * n);
        for x in 0..rows {
            let mut acc = 0.0;
            for y in 0..n {
                acc += weight(x, y);
                cum.push(acc);
            }
        }
        Self { n, cum }
    }

    fn kernel(k: &Kernel) -> Self {
        let m = k.matrix();
        Self::from_weights(k.n(), k.n(), |x, y| m[(x, y)])
    }

    /// First index whose cumulative weight strictly exceeds `u`; rounding
    /// that leaves `u` above the total falls back to the last positive entry.
    fn draw(&self, row: usize, u: f64) -> usize {
        let cum = &self.cum[row * self.n..(row + 1) * self.n];
        match cum.iter().position(|c| *c > u) {
            Some(y) => y,
            None => {
                let mut y = self.n - 1;
                while y > 0 && cum[y] == cum[y - 1] {
                    y -= 1;
                }
                y
            }
        }
    }
}

/// Simulates `cfg.steps` recorded states started from `π` (or `π^{⊗k}` for
/// the embedded chain). Deterministic in `(family, cfg)`.
pub fn simulate(fam: &KernelFamily, cfg: &SimulationConfig) -> Result<Path> {
    cfg.validate()?;
    let k = fam.k();
    let n = fam.n();
    let pi = fam.pi().as_slice();
    let init = Sampler::from_weights(1, n, |_, y| pi[y]);
    let kernels: Vec<Sampler> = fam.kernels().iter().map(Sampler::kernel).collect();
    let mut r = rng(cfg.seed);
    let total = cfg.burn_in + cfg.steps;
    match cfg.scheme {
        Scheme::Rand | Scheme::Strat => {
            let mut states = Vec::with_capacity(cfg.steps);
            let mut x = init.draw(0, r.random::<f64>());
            for i in 0..total {
                if i >= cfg.burn_in {
                    states.push(x);
                }
                if i + 1 == total {
                    break;
                }
                let j = match cfg.scheme {
                    Scheme::Rand => r.random_range(0..k),
                    _ => i % k,
                };
                x = kernels[j].draw(x, r.random::<f64>());
            }
            Ok(Path {
                scheme: cfg.scheme,
                width: 1,
                states,
            })
        }
        Scheme::Embedded => {
            let mut states = Vec::with_capacity(cfg.steps * k);
            let mut x: Vec<usize> = (0..k).map(|_| init.draw(0, r.random::<f64>())).collect();
            let mut y = vec![0usize; k];
            for i in 0..total {
                if i >= cfg.burn_in {
                    states.extend_from_slice(&x);
                }
                if i + 1 == total {
                    break;
                }
                for j in 0..k {
                    y[(j + 1) % k] = kernels[j].draw(x[j], r.random::<f64>());
                }
                std::mem::swap(&mut x, &mut y);
            }
            Ok(Path {
                scheme: Scheme::Embedded,
                width: k,
                states,
            })
        }
    }
}

/// The diagonal sequence `X_i^{(σ^i(0))}` of an embedded path, which follows
/// the deterministic-scan law.
pub fn embedded_component_extract(path: &Path) -> Result<Path> {
    if path.scheme != Scheme::Embedded {
        return Err(Error::WrongScheme {
            expected: Scheme::Embedded,
            got: path.scheme,
        });
    }
    let k = path.width;
    let states = (0..path.len()).map(|i| path.step(i)[i % k]).collect();
    Ok(Path {
        scheme: Scheme::Strat,
        width: 1,
        states,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub point: f64,
    pub standard_error: f64,
    pub replicas_used: usize,
}

impl VarianceEstimate {
    /// `(point − reference) / standard_error`.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.point - reference) / self.standard_error
    }
}

/// Replicated estimate of `var_π(M^{1/2} S_M(f))`: the sample variance over
/// `replicas` independent stationary runs of `M^{1/2} S_M(f − π(f))`, with
/// standard error from the spread of the squared deviations. Embedded runs
/// use their diagonal component.
pub fn estimate_variance(
    fam: &KernelFamily,
    f: &ObsFunction,
    steps: usize,
    replicas: usize,
    seed: u64,
    scheme: Scheme,
) -> Result<VarianceEstimate> {
    if replicas < 2 {
        return Err(Error::InvalidConfig(format!(
            "variance estimation needs at least 2 replicas, got {replicas}"
        )));
    }
    check_len(fam.n(), f.len(), "estimate: observable")?;
    let fc = center(f, fam.pi())?;
    let values = fc.values();
    let scaled: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let cfg = SimulationConfig {
                steps,
                replicas: 1,
                seed: derive_seed(seed, r as u64),
                scheme,
                burn_in: 0,
            };
            let mut path = simulate(fam, &cfg)?;
            if scheme == Scheme::Embedded {
                path = embedded_component_extract(&path)?;
            }
            let sum: f64 = path.states().iter().map(|&x| values[x]).sum();
            Ok(sum / (steps as f64).sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    let r = replicas as f64;
    let mean = scaled.iter().sum::<f64>() / r;
    let sq: Vec<f64> = scaled.iter().map(|y| (y - mean) * (y - mean)).collect();
    let point = sq.iter().sum::<f64>() / (r - 1.0);
    let sq_mean = sq.iter().sum::<f64>() / r;
    let sq_var = sq.iter().map(|d| (d - sq_mean) * (d - sq_mean)).sum::<f64>() / (r - 1.0);
    Ok(VarianceEstimate {
        point,
        standard_error: (sq_var / r).sqrt(),
        replicas_used: replicas,
    })
}
