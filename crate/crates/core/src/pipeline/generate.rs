//! Synthetic ridge benchmarks with Gaussian inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, StandardNormal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    /// `tanh(t₁ + t₂)` on `R²`.
    Ridge2d,
    /// `tanh(Σ t_j) + max(0, Σ (−1)^j t_j)` on `R⁵`.
    Ridge5d,
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ridge2d" => Ok(Self::Ridge2d),
            "ridge5d" => Ok(Self::Ridge5d),
            other => Err(Error::Config(format!("unknown problem `{other}`"))),
        }
    }
}

impl Problem {
    pub fn dim(self) -> usize {
        match self {
            Self::Ridge2d => 2,
            Self::Ridge5d => 5,
        }
    }

    pub fn eval(self, t: &[f64]) -> f64 {
        match self {
            Self::Ridge2d => (t[0] + t[1]).tanh(),
            Self::Ridge5d => {
                let s: f64 = t.iter().sum();
                // j is 1-based in (−1)^j
                let alt: f64 = t.iter().enumerate().map(|(j, x)| if j % 2 == 0 { -x } else { *x }).sum();
                s.tanh() + alt.max(0.0)
            }
        }
    }

    /// Unit vectors along which the target varies.
    pub fn ridge_directions(self) -> Vec<Vec<f64>> {
        match self {
            Self::Ridge2d => vec![vec![std::f64::consts::FRAC_1_SQRT_2; 2]],
            Self::Ridge5d => {
                let s = 1.0 / 5f64.sqrt();
                vec![vec![s; 5], (0..5).map(|j| if j % 2 == 0 { -s } else { s }).collect()]
            }
        }
    }
}

/// Train and noise-free test sets of the same size.
#[derive(Clone, Debug)]
pub struct Generated {
    pub train: Dataset,
    pub test: Dataset,
    pub directions: Vec<Vec<f64>>,
}

/// `n` points `t ~ N(0, I_d)` with targets `f(t) + ε`, `ε ~ N(0, noise_var)`.
pub fn sample_dataset<F: Fn(&[f64]) -> f64>(
    dim: usize,
    n: usize,
    noise_var: f64,
    rng: &mut ChaCha8Rng,
    f: F,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let noise = Normal::new(0.0, noise_var.max(0.0).sqrt()).map_err(|e| Error::Config(e.to_string()))?;
    let points: Vec<f64> = (0..n * dim).map(|_| rng.sample(StandardNormal)).collect();
    let targets = points
        .chunks(dim)
        .map(|t| {
            let eps = if noise_var > 0.0 { rng.sample(noise) } else { 0.0 };
            f(t) + eps
        })
        .collect();
    Dataset::new(dim, points, targets)
}

pub fn generate(problem: Problem, n: usize, noise_var: f64, seed: u64) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train = sample_dataset(problem.dim(), n, noise_var, &mut rng, |t| problem.eval(t))?;
    let test = sample_dataset(problem.dim(), n, 0.0, &mut rng, |t| problem.eval(t))?;
    Ok(Generated { train, test, directions: problem.ridge_directions() })
}

pub fn generate_ridge_2d(n: usize, noise_var: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    generate(Problem::Ridge2d, n, noise_var, seed).map(|g| (g.train, g.test))
}

pub fn generate_ridge_5d(n: usize, noise_var: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    generate(Problem::Ridge5d, n, noise_var, seed).map(|g| (g.train, g.test))
}
