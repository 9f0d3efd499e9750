//! Estimators for the two quantitative hypotheses on a measure: the ball-mass
//! (Frostman) exponent `α` and the cube-spectrum decay exponent `β`.
//!
//! Both estimators are deliberately plain: unweighted least squares on
//! log-log data over dyadic scales, zero entries dropped. Alternatives belong
//! in reports, not in the estimator.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{precondition, Result};
use crate::fit::linear_fit;
use crate::measure::{GridMeasure, Spectrum};

/// Fitted ball-mass exponent: `max_x μ(B(x,r)) ≈ c1Hat · r^alphaHat`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FrostmanReport {
    pub alpha_hat: f64,
    pub c1_hat: f64,
    /// `(radius, max ball mass)` pairs, sorted by radius.
    pub samples: Vec<(f64, f64)>,
    /// Set when all ball masses coincide (e.g. a point mass), in which case
    /// `alphaHat` is reported as 0.
    pub degenerate: bool,
}

/// Fitted spectral decay: `max_{|η|≈2^j} |Δᵏμ̂(0;η,…,η)| ≈ c2Hat · (1+|η|)^{-(k+1)·betaHat/2}`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecayReport {
    /// Fitted exponent; `INF` (serialized as the string "INF") when every
    /// coefficient beyond frequency zero vanishes.
    #[serde(serialize_with = "serialize_beta")]
    pub beta_hat: f64,
    pub c2_hat: f64,
    /// `(dyadic annulus index j, max |coefficient| over 2^j ≤ |η| < 2^{j+1})`.
    pub annuli: Vec<(u32, f64)>,
    /// Set when fewer than three annuli carried nonzero maxima.
    pub degenerate: bool,
}

fn serialize_beta<S: Serializer>(v: &f64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        ser.serialize_str("INF")
    } else {
        ser.serialize_f64(*v)
    }
}

/// One-dimensional slice of cube-spectrum data used for decay fitting:
/// `values[m] = Δᵏf̂(0; m, …, m)` in standard DFT index order.
#[derive(Debug, Clone)]
pub struct DecaySeries {
    pub n: usize,
    pub order: u32,
    pub values: Vec<Complex64>,
}

impl DecaySeries {
    /// Order-1 series from a plain spectrum: `Δ¹f̂(0;η) = |f̂(-η)|²`.
    pub fn order1(spectrum: &Spectrum) -> Self {
        let n = spectrum.n;
        let values = (0..n as i64)
            .map(|eta| {
                let v = spectrum.coeff(-eta).norm_sqr();
                Complex64::new(v, 0.0)
            })
            .collect();
        DecaySeries {
            n,
            order: 1,
            values,
        }
    }

    fn at_signed(&self, m: i64) -> Complex64 {
        self.values[m.rem_euclid(self.n as i64) as usize]
    }
}

/// Maximum ball mass over all centers, for a closed wrapped ball of radius
/// `cells` grid cells.
pub fn max_ball_mass(m: &GridMeasure, cells: usize) -> f64 {
    let n = m.n;
    let total: f64 = m.weights.iter().sum();
    let width = 2 * cells + 1;
    if width >= n {
        return total / n as f64;
    }
    // Sliding wrapped window of `width` cells.
    let mut sum: f64 = (0..width).map(|i| m.weights[i]).sum();
    let mut best = sum;
    for left in 1..n {
        sum -= m.weights[left - 1];
        sum += m.weights[(left + width - 1) % n];
        if sum > best {
            best = sum;
        }
    }
    best / n as f64
}

/// Fits `α` from ball masses at the given radii (in grid cells).
pub fn frostman_fit(m: &GridMeasure, radii_cells: &[usize]) -> Result<FrostmanReport> {
    if radii_cells.len() < 3 {
        return Err(precondition("frostman fit needs at least 3 radii"));
    }
    let mut radii = radii_cells.to_vec();
    radii.sort_unstable();
    radii.dedup();
    if radii.len() != radii_cells.len() {
        return Err(precondition("frostman radii must be distinct"));
    }
    if radii[0] == 0 {
        return Err(precondition("frostman radii must be at least one cell"));
    }
    let n = m.n as f64;
    let samples: Vec<(f64, f64)> = radii
        .iter()
        .map(|&c| (c as f64 / n, max_ball_mass(m, c)))
        .collect();
    let first = samples[0].1;
    let degenerate = samples.iter().all(|&(_, v)| (v - first).abs() <= 1e-15)
        || samples.iter().any(|&(_, v)| v <= 0.0);
    if degenerate {
        return Ok(FrostmanReport {
            alpha_hat: 0.0,
            c1_hat: first,
            samples,
            degenerate: true,
        });
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(r, v)| (r.ln(), v.ln())).collect();
    let (slope, intercept) = linear_fit(&pts)
        .ok_or_else(|| precondition("frostman fit degenerate abscissae"))?;
    Ok(FrostmanReport {
        alpha_hat: slope.clamp(0.0, 1.0),
        c1_hat: intercept.exp(),
        samples,
        degenerate: false,
    })
}

/// Fits `β` from dyadic-annulus maxima of a cube-spectrum series of the given
/// order: the slope of `log max` against `log(1+|η|)` equals
/// `-(order+1)·β/2`.
pub fn decay_fit(series: &DecaySeries) -> Result<DecayReport> {
    let half = (series.n / 2) as i64;
    let mut annuli: Vec<(u32, f64)> = Vec::new();
    let mut j = 0u32;
    loop {
        let lo = 1i64 << j;
        if lo > half {
            break;
        }
        let hi = ((1i64 << (j + 1)) - 1).min(half);
        let mut best = 0.0f64;
        for m in lo..=hi {
            best = best.max(series.at_signed(m).norm());
            best = best.max(series.at_signed(-m).norm());
        }
        annuli.push((j, best));
        j += 1;
    }
    if annuli.len() < 3 {
        return Err(precondition(
            "decay fit needs at least 3 dyadic annuli (grid too small)",
        ));
    }
    let nonzero: Vec<(f64, f64)> = annuli
        .iter()
        .filter(|&&(_, v)| v > 0.0)
        .map(|&(jj, v)| ((1.0 + (1u64 << jj) as f64).ln(), v.ln()))
        .collect();
    if nonzero.is_empty() {
        return Ok(DecayReport {
            beta_hat: f64::INFINITY,
            c2_hat: 0.0,
            annuli,
            degenerate: false,
        });
    }
    if nonzero.len() < 3 {
        // Too little signal for a trustworthy slope; report flat decay.
        return Ok(DecayReport {
            beta_hat: 0.0,
            c2_hat: nonzero[0].1.exp(),
            annuli,
            degenerate: true,
        });
    }
    let (slope, intercept) =
        linear_fit(&nonzero).ok_or_else(|| precondition("decay fit degenerate abscissae"))?;
    let beta = -2.0 * slope / (series.order as f64 + 1.0);
    Ok(DecayReport {
        beta_hat: beta.max(0.0),
        c2_hat: intercept.exp(),
        annuli,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_ball_mass_is_window_fraction() {
        let m = GridMeasure::uniform(64);
        assert!((max_ball_mass(&m, 3) - 7.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_alpha_is_one_at_coarse_radii() {
        let m = GridMeasure::uniform(4096);
        let report = frostman_fit(&m, &[64, 128, 256, 512]).unwrap();
        assert!(
            (report.alpha_hat - 1.0).abs() <= 0.01,
            "alphaHat = {}",
            report.alpha_hat
        );
        assert!(!report.degenerate);
    }

    #[test]
    fn dirac_alpha_is_zero_with_flag() {
        let m = GridMeasure::dirac(256, 0);
        let report = frostman_fit(&m, &[1, 2, 4, 8]).unwrap();
        assert_eq!(report.alpha_hat, 0.0);
        assert!(report.degenerate);
        for w in report.samples.windows(2) {
            assert!(w[0].1 <= w[1].1 + 1e-15, "ball mass must grow with radius");
        }
    }

    #[test]
    fn uniform_decay_is_inf() {
        let m = GridMeasure::uniform(64);
        let series = DecaySeries::order1(&m.fourier());
        let report = decay_fit(&series).unwrap();
        assert!(report.beta_hat.is_infinite());
    }

    #[test]
    fn dirac_decay_is_zero() {
        let m = GridMeasure::dirac(64, 0);
        let series = DecaySeries::order1(&m.fourier());
        let report = decay_fit(&series).unwrap();
        assert!(report.beta_hat.abs() < 1e-12, "betaHat = {}", report.beta_hat);
    }

    #[test]
    fn decay_report_serializes_inf_sentinel() {
        let m = GridMeasure::uniform(64);
        let report = decay_fit(&DecaySeries::order1(&m.fourier())).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"betaHat\":\"INF\""), "{json}");
    }
}
