//! Measures and signed densities on the discretized torus.
//!
//! A [`GridMeasure`] is a nonnegative density on the `n`-point cyclic grid,
//! taken with respect to normalized counting measure: the uniform probability
//! measure is the constant weight `1`, and `mass = (1/n) Σ weights`. The grid
//! size is whatever the construction dictates (`base^levels` for the Cantor
//! families), so the transform must handle composite `n`; we delegate to a
//! mixed-radix FFT.
//!
//! Fourier convention, used everywhere in this crate:
//!
//! ```text
//! f̂(ξ) = (1/n) Σ_x f(x) e^{-2πi xξ/n},      f(x) = Σ_ξ f̂(ξ) e^{+2πi xξ/n}
//! ```
//!
//! so `f̂(0)` is the mass and Parseval reads `(1/n) Σ|f|² = Σ|f̂|²`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};

/// Nonnegative density on the `n`-point torus grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeasure {
    pub n: usize,
    pub weights: Vec<f64>,
}

/// Signed real density on the grid; produced by mollification and ladder
/// differences, consumed by the norm and counting machinery.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub n: usize,
    pub values: Vec<f64>,
}

/// Full Fourier transform of a grid density.
///
/// Coefficients are stored in standard DFT order (`0, 1, …, n-1`); use
/// [`Spectrum::coeff`] to address them by signed frequency `ξ ∈ [-n/2, n/2)`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub n: usize,
    pub coeffs: Vec<Complex64>,
}

impl GridMeasure {
    /// Builds a measure from raw weights, rejecting any genuinely negative
    /// entry (below `-1e-12`) and clamping round-off negatives to zero.
    /// Returns the measure and the largest clamp applied.
    pub fn from_weights_clamped(weights: Vec<f64>) -> Result<(Self, f64)> {
        if weights.is_empty() {
            return Err(precondition("grid size must be at least 1"));
        }
        let mut max_clamp = 0.0f64;
        let mut w = weights;
        for v in &mut w {
            if !v.is_finite() {
                return Err(precondition("weights must be finite"));
            }
            if *v < 0.0 {
                if *v < -1e-12 {
                    return Err(precondition(format!(
                        "weight {v} is negative beyond round-off"
                    )));
                }
                max_clamp = max_clamp.max(-*v);
                *v = 0.0;
            }
        }
        let n = w.len();
        Ok((GridMeasure { n, weights: w }, max_clamp))
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        Ok(Self::from_weights_clamped(weights)?.0)
    }

    /// The uniform probability measure: weights identically 1.
    pub fn uniform(n: usize) -> Self {
        GridMeasure {
            n,
            weights: vec![1.0; n],
        }
    }

    /// Unit point mass at grid point `x`: weight `n` on one cell.
    pub fn dirac(n: usize, x: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[x % n] = n as f64;
        GridMeasure { n, weights }
    }

    /// Seeded random density with i.i.d. uniform weights, normalized to
    /// mass 1. Convenience for experiments and the acceptance suite.
    pub fn random_uniform(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let mean = weights.iter().sum::<f64>() / n as f64;
        for w in &mut weights {
            *w /= mean;
        }
        GridMeasure { n, weights }
    }

    /// Deterministic Cantor-type measure: at each of `levels` subdivision
    /// steps every surviving cell splits into `base` children and the children
    /// whose digit lies in `keep` survive, with mass spread evenly. Grid size
    /// is `base^levels`; mass is exactly 1.
    pub fn cantor_deterministic(base: usize, keep: &[usize], levels: u32) -> Result<Self> {
        if base < 2 {
            return Err(precondition("cantor base must be at least 2"));
        }
        if levels < 1 {
            return Err(precondition("cantor levels must be at least 1"));
        }
        let mut digits: Vec<usize> = keep.to_vec();
        digits.sort_unstable();
        digits.dedup();
        if digits.is_empty() {
            return Err(precondition("cantor keep-set must be nonempty"));
        }
        if digits.len() != keep.len() {
            return Err(precondition("cantor keep-set has repeated digits"));
        }
        if digits.iter().any(|&d| d >= base) {
            return Err(precondition("cantor keep-set digit out of range"));
        }
        if digits.len() == base {
            return Err(precondition(
                "cantor keep-set equals all digits; use the uniform constructor",
            ));
        }
        let n = checked_pow(base, levels)?;
        let keep_mask: Vec<bool> = (0..base).map(|d| digits.contains(&d)).collect();
        let cell_weight = (base as f64 / digits.len() as f64).powi(levels as i32);
        let mut weights = vec![0.0; n];
        for (x, w) in weights.iter_mut().enumerate() {
            let mut y = x;
            let mut survives = true;
            for _ in 0..levels {
                if !keep_mask[y % base] {
                    survives = false;
                    break;
                }
                y /= base;
            }
            if survives {
                *w = cell_weight;
            }
        }
        Ok(GridMeasure { n, weights })
    }

    /// Random Cantor-type measure: each surviving cell independently keeps
    /// `branches` of its `base` children, chosen uniformly without
    /// replacement. Deterministic for a fixed seed (cells are visited in
    /// increasing index order).
    pub fn cantor_random(base: usize, branches: usize, levels: u32, seed: u64) -> Result<Self> {
        if base < 2 {
            return Err(precondition("cantor base must be at least 2"));
        }
        if levels < 1 {
            return Err(precondition("cantor levels must be at least 1"));
        }
        if branches < 1 || branches >= base {
            return Err(precondition(
                "branch count must satisfy 1 <= branches < base",
            ));
        }
        let n = checked_pow(base, levels)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ratio = base as f64 / branches as f64;
        // (cell index at current depth, weight) pairs, kept sorted by index.
        let mut cells: Vec<(usize, f64)> = vec![(0, 1.0)];
        let mut scratch: Vec<usize> = (0..base).collect();
        for _ in 0..levels {
            let mut next = Vec::with_capacity(cells.len() * branches);
            for &(idx, w) in &cells {
                // Partial Fisher-Yates: the first `branches` entries of
                // scratch become the kept digits.
                for i in 0..base {
                    scratch[i] = i;
                }
                for i in 0..branches {
                    let j = rng.gen_range(i..base);
                    scratch.swap(i, j);
                }
                let mut kept: Vec<usize> = scratch[..branches].to_vec();
                kept.sort_unstable();
                for d in kept {
                    next.push((idx * base + d, w * ratio));
                }
            }
            // Children inherit the parents' ordering, so `next` stays sorted.
            cells = next;
        }
        let mut weights = vec![0.0; n];
        for (idx, w) in cells {
            weights[idx] = w;
        }
        Ok(GridMeasure { n, weights })
    }

    /// `(1/n) Σ weights`; exactly 1 for the bundled constructors.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() / self.n as f64
    }

    pub fn density(&self) -> Density {
        Density {
            n: self.n,
            values: self.weights.clone(),
        }
    }

    pub fn fourier(&self) -> Spectrum {
        forward_real(self.n, &self.weights)
    }

    /// Support of the unmollified measure: cells with strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(x, _)| x)
            .collect()
    }
}

impl Density {
    pub fn zero(n: usize) -> Self {
        Density {
            n,
            values: vec![0.0; n],
        }
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n as f64
    }

    pub fn fourier(&self) -> Spectrum {
        forward_real(self.n, &self.values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest negative excursion (0 for nonnegative densities).
    pub fn negative_sup(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(-v.min(0.0)))
    }

    /// Pointwise `max(density, 0)` as a measure, together with the size of
    /// the discarded negative part.
    pub fn clamped_nonneg(&self) -> (GridMeasure, f64) {
        let neg = self.negative_sup();
        let weights = self.values.iter().map(|v| v.max(0.0)).collect();
        (
            GridMeasure {
                n: self.n,
                weights,
            },
            neg,
        )
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }
}

impl Spectrum {
    /// Coefficient at signed frequency `ξ` (wrapped mod `n`).
    pub fn coeff(&self, xi: i64) -> Complex64 {
        let n = self.n as i64;
        self.coeffs[xi.rem_euclid(n) as usize]
    }

    /// Iterates `(ξ, coeff)` over the signed frequency window `[-n/2, n/2)`.
    pub fn signed_iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.n as i64;
        let lo = -(n / 2);
        (lo..n - n / 2).map(move |xi| (xi, self.coeff(xi)))
    }

    /// Inverse transform; imaginary residue is discarded (inputs in this
    /// crate are real with even multipliers, so it is at round-off level).
    pub fn inverse(&self) -> Density {
        let mut buf = self.coeffs.clone();
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(self.n).process(&mut buf);
        Density {
            n: self.n,
            values: buf.iter().map(|c| c.re).collect(),
        }
    }
}

fn forward_real(n: usize, values: &[f64]) -> Spectrum {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    Spectrum { n, coeffs: buf }
}

/// Forward transform of an arbitrary complex series, same normalization.
pub(crate) fn forward_complex(values: &mut [Complex64]) {
    let n = values.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(values);
    let scale = 1.0 / n as f64;
    for c in values.iter_mut() {
        *c *= scale;
    }
}

fn checked_pow(base: usize, levels: u32) -> Result<usize> {
    base.checked_pow(levels)
        .filter(|&n| n <= 1 << 26)
        .ok_or_else(|| precondition("base^levels grid size is too large"))
}

/// Wrapped (cyclic) distance between grid cells, in cells.
pub fn wrapped_distance_cells(a: usize, b: usize, n: usize) -> usize {
    let d = (a as i64 - b as i64).rem_euclid(n as i64) as usize;
    d.min(n - d)
}

/// Measure specification accepted from JSON files: either explicit weights
/// or a named generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpec {
    Weights { n: usize, weights: Vec<f64> },
    Generated { generator: Generator },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Generator {
    Uniform { n: usize },
    Dirac { n: usize },
    Cantor { base: usize, keep: Vec<usize>, levels: u32 },
    CantorRandom { base: usize, branches: usize, levels: u32, seed: u64 },
}

impl MeasureSpec {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("measure spec: {e}")))
    }

    pub fn build(&self) -> Result<GridMeasure> {
        match self {
            MeasureSpec::Weights { n, weights } => {
                if *n != weights.len() {
                    return Err(precondition(format!(
                        "declared n={n} but {} weights given",
                        weights.len()
                    )));
                }
                GridMeasure::from_weights(weights.clone())
            }
            MeasureSpec::Generated { generator } => generator.build(),
        }
    }
}

impl Generator {
    pub fn build(&self) -> Result<GridMeasure> {
        match *self {
            Generator::Uniform { n } => {
                if n == 0 {
                    return Err(precondition("grid size must be at least 1"));
                }
                Ok(GridMeasure::uniform(n))
            }
            Generator::Dirac { n } => {
                if n == 0 {
                    return Err(precondition("grid size must be at least 1"));
                }
                Ok(GridMeasure::dirac(n, 0))
            }
            Generator::Cantor {
                base,
                ref keep,
                levels,
            } => GridMeasure::cantor_deterministic(base, keep, levels),
            Generator::CantorRandom {
                base,
                branches,
                levels,
                seed,
            } => GridMeasure::cantor_random(base, branches, levels, seed),
        }
    }
}
