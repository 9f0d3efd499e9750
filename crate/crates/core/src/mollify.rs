//! The mollification ladder, realized as spectral multipliers.
//!
//! Level `ℓ` multiplies the spectrum by an even taper that is exactly 1 on
//! `|ξ| ≤ 2^ℓ`, exactly 0 on `|ξ| ≥ 2^{ℓ+1}`, and raised-cosine in between.
//! The plateau is what the estimates consume; the price is that the spatial
//! kernel is not pointwise nonnegative, so mollified densities are returned
//! as signed [`Density`] values and their negative part is reported rather
//! than hidden.
//!
//! Levels past the grid's resolution are *saturated*: the plateau already
//! covers every nonzero frequency the grid can hold, and the operation
//! returns its input unchanged with a flag instead of erroring.

use serde::{Deserialize, Serialize};

use crate::measure::{wrapped_distance_cells, Density};

/// Taper applied between the plateau and the cutoff. Only one shape in v1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Taper {
    RaisedCosine,
}

impl std::str::FromStr for Taper {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "raised-cosine" => Ok(Taper::RaisedCosine),
            other => Err(format!("unknown taper {other:?} (expected raised-cosine)")),
        }
    }
}

/// Spectral multiplier family `φ̂_ℓ` on the `n`-point grid.
#[derive(Debug, Clone, Copy)]
pub struct MollifierLadder {
    pub n: usize,
    pub taper: Taper,
}

/// Result of a mollification or ladder difference.
#[derive(Debug, Clone)]
pub struct Mollified {
    pub density: Density,
    pub level: u32,
    /// Level exceeded grid resolution; the density is the unmodified input
    /// (for [`MollifierLadder::mollify`]) or zero (for ladder differences).
    pub saturated: bool,
}

impl MollifierLadder {
    pub fn new(n: usize) -> Self {
        MollifierLadder {
            n,
            taper: Taper::RaisedCosine,
        }
    }

    /// A level is saturated once its cutoff `2^{level+1}` exceeds `n/2`.
    pub fn is_saturated(&self, level: u32) -> bool {
        // Compare in f64: grids are well below 2^53 and n may be odd.
        exp2(level + 1) > self.n as f64 / 2.0
    }

    /// Deepest unsaturated level, if any.
    pub fn deepest_level(&self) -> Option<u32> {
        (0..64).rev().find(|&l| !self.is_saturated(l))
    }

    /// Multiplier value at wrapped absolute frequency `a = |ξ|`.
    pub fn multiplier_at(&self, level: u32, a: f64) -> f64 {
        let plateau = exp2(level);
        let cutoff = exp2(level + 1);
        if a <= plateau {
            1.0
        } else if a >= cutoff {
            0.0
        } else {
            match self.taper {
                Taper::RaisedCosine => {
                    0.5 * (1.0 + (std::f64::consts::PI * (a - plateau) / plateau).cos())
                }
            }
        }
    }

    /// Multiplier over the full grid in standard DFT order.
    pub fn multiplier_values(&self, level: u32) -> Vec<f64> {
        (0..self.n)
            .map(|xi| self.multiplier_at(level, wrapped_distance_cells(xi, 0, self.n) as f64))
            .collect()
    }

    /// `μ_level = φ_level ∗ μ`: spectrum times multiplier. Mass is preserved
    /// since the multiplier is 1 at frequency zero.
    pub fn mollify(&self, input: &Density, level: u32) -> Mollified {
        if self.is_saturated(level) {
            return Mollified {
                density: input.clone(),
                level,
                saturated: true,
            };
        }
        let mult = self.multiplier_values(level);
        let mut spec = input.fourier();
        for (c, m) in spec.coeffs.iter_mut().zip(&mult) {
            *c *= *m;
        }
        Mollified {
            density: spec.inverse(),
            level,
            saturated: false,
        }
    }

    /// Ladder difference `ν_level = μ_{level+1} − μ_level`, spectrally
    /// supported in `2^level < |ξ| < 2^{level+2}` with total integral zero.
    pub fn ladder_diff(&self, input: &Density, level: u32) -> Mollified {
        if self.is_saturated(level) || self.is_saturated(level + 1) {
            return Mollified {
                density: Density::zero(input.n),
                level,
                saturated: true,
            };
        }
        let lo = self.multiplier_values(level);
        let hi = self.multiplier_values(level + 1);
        let mut spec = input.fourier();
        for (xi, c) in spec.coeffs.iter_mut().enumerate() {
            *c *= hi[xi] - lo[xi];
        }
        Mollified {
            density: spec.inverse(),
            level,
            saturated: false,
        }
    }
}

fn exp2(e: u32) -> f64 {
    (e as f64).exp2()
}
