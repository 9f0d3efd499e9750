//! The configuration-counting functional and its diagnostics.
//!
//! For densities `f₀,…,f_k` and a bounded weight `g` on the doubled torus,
//!
//! ```text
//! Λ(g; f₀,…,f_k) = (Q/n²) Σ_{x∈Z_n} Σ_{s∈Z_{n/Q}} g(x, Qs) ∏_t f_t(x − s·p_t)
//! ```
//!
//! where the pattern points are `b_t = p_t/Q`. Dilations run over the
//! subgroup `r = Q·s` — exactly the grid dilations for which every `r·b_t`
//! lands on a grid point — so for integer patterns (`Q = 1`) this is the
//! plain double average over `Z_n²`. The two-dimensional intersection
//! measure is never materialized; it is only accessed through `Λ(g;·)` and
//! the dilation marginal `ρ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::measure::{wrapped_distance_cells, Density, GridMeasure};
use crate::mollify::MollifierLadder;
use crate::pattern::{gcd, Pattern};
use crate::gowers::WeightFunction;

/// A single evaluation of the counting functional.
#[derive(Debug, Clone)]
pub struct ConfigCount {
    pub value: Complex64,
    /// Mollification level the densities were taken at, when relevant.
    pub level: Option<u32>,
    pub pattern: Pattern,
}

impl ConfigCount {
    pub fn real(&self) -> f64 {
        self.value.re
    }
}

/// Dilation marginal `ρ(r) = (1/n) Σ_x ∏_t f_t(x − r·b_t)`, tabulated over
/// the admissible dilations `r = stride·s`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MarginalDensity {
    pub n: usize,
    /// Grid stride between admissible dilations (the pattern denominator).
    pub stride: usize,
    pub rho: Vec<f64>,
    /// Requested `(p', ‖ρ‖_{p'})` pairs, normalized counting measure.
    pub p_norms: Vec<(f64, f64)>,
}

impl MarginalDensity {
    /// Mean of `ρ` over admissible dilations; equals `Λ(1; f)`.
    pub fn mean(&self) -> f64 {
        self.rho.iter().sum::<f64>() / self.rho.len() as f64
    }

    /// Fraction of admissible dilations with `ρ(r) > threshold`.
    pub fn positive_fraction(&self, threshold: f64) -> f64 {
        let hits = self.rho.iter().filter(|&&v| v > threshold).count();
        hits as f64 / self.rho.len() as f64
    }
}

fn grid_setup(n: usize, pattern: &Pattern) -> Result<(usize, Vec<i64>)> {
    let q = pattern.denominator() as usize;
    if n == 0 || n % q != 0 {
        return Err(precondition(format!(
            "grid size {n} must be divisible by the pattern denominator {q}"
        )));
    }
    Ok((n / q, pattern.numerators().to_vec()))
}

/// Per-dilation grid offsets `(s·p_t mod n)` for `s = 0..n/Q`.
fn offsets_for(n: usize, s: usize, nums: &[i64]) -> Vec<usize> {
    nums.iter()
        .map(|&p| (s as i64 * p).rem_euclid(n as i64) as usize)
        .collect()
}

/// Evaluates `Λ(g; f₀,…,f_k)` by direct summation, `O(n²·k)`.
///
/// `g = None` means the constant weight 1. All densities must share the grid
/// size `n`, which must be divisible by the pattern denominator.
pub fn lambda(
    g: Option<&WeightFunction>,
    fs: &[&Density],
    pattern: &Pattern,
) -> Result<ConfigCount> {
    if fs.len() != pattern.len() {
        return Err(precondition(format!(
            "pattern has {} points but {} densities were given",
            pattern.len(),
            fs.len()
        )));
    }
    let n = fs[0].n;
    if fs.iter().any(|f| f.n != n) {
        return Err(precondition("densities must share one grid size"));
    }
    if let Some(w) = g {
        if w.n != n {
            return Err(precondition("weight grid size must match the densities"));
        }
    }
    let (s_count, nums) = grid_setup(n, pattern)?;
    let q = pattern.denominator() as usize;
    let mut total = Complex64::default();
    for s in 0..s_count {
        let offs = offsets_for(n, s, &nums);
        let r = (q * s) % n;
        match g {
            None => {
                let mut row = 0.0f64;
                for x in 0..n {
                    let mut prod = 1.0;
                    for (f, &o) in fs.iter().zip(&offs) {
                        prod *= f.values[(x + n - o) % n];
                    }
                    row += prod;
                }
                total += row;
            }
            Some(w) => {
                let mut row = Complex64::default();
                for x in 0..n {
                    let mut prod = 1.0;
                    for (f, &o) in fs.iter().zip(&offs) {
                        prod *= f.values[(x + n - o) % n];
                    }
                    row += w.values[x * n + r] * prod;
                }
                total += row;
            }
        }
    }
    Ok(ConfigCount {
        value: total * (q as f64) / (n as f64 * n as f64),
        level: None,
        pattern: pattern.clone(),
    })
}

/// Frequency-side fast path for `g ≡ 1` and integer patterns:
///
/// ```text
/// Λ = Σ_{ξ₀+…+ξ_k ≡ 0, Σ p_t ξ_t ≡ 0 (mod n)} ∏_t f̂_t(ξ_t)
/// ```
///
/// Available when `p₁ − p₀` is invertible mod `n` (always true for
/// arithmetic progressions); returns `None` otherwise. Cost `O(n^{k-1})`
/// tuples after eliminating two frequencies.
pub fn lambda_fast_one(fs: &[&Density], pattern: &Pattern) -> Result<Option<f64>> {
    if fs.len() != pattern.len() {
        return Err(precondition("pattern/density count mismatch"));
    }
    let n = fs[0].n;
    if fs.iter().any(|f| f.n != n) {
        return Err(precondition("densities must share one grid size"));
    }
    if pattern.denominator() != 1 {
        return Ok(None);
    }
    let nums = pattern.numerators();
    let lead = (nums[1] - nums[0]).rem_euclid(n as i64);
    let Some(inv) = mod_inverse(lead, n as i64) else {
        return Ok(None);
    };
    let hats: Vec<Vec<Complex64>> = fs
        .iter()
        .map(|f| f.fourier().coeffs)
        .collect();
    let k = pattern.order() as usize;
    let free = n.pow((k - 1) as u32);
    let mut zeta = vec![0usize; k - 1];
    let mut total = Complex64::default();
    let n_i = n as i64;
    for flat in 0..free {
        let mut rem = flat;
        for z in zeta.iter_mut() {
            *z = rem % n;
            rem /= n;
        }
        // Solve the two linear constraints for ξ₁ and ξ₀.
        let mut weighted: i64 = 0;
        let mut plain: i64 = 0;
        for (j, &z) in zeta.iter().enumerate() {
            let p = nums[j + 2] - nums[0];
            weighted = (weighted + (p.rem_euclid(n_i) * z as i64)) % n_i;
            plain = (plain + z as i64) % n_i;
        }
        let xi1 = (-inv * weighted).rem_euclid(n_i) as usize;
        let xi0 = (-(xi1 as i64) - plain).rem_euclid(n_i) as usize;
        let mut prod = hats[0][xi0] * hats[1][xi1];
        for (j, &z) in zeta.iter().enumerate() {
            prod *= hats[j + 2][z];
        }
        total += prod;
    }
    Ok(Some(total.re))
}

fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    if gcd(a, n) != 1 {
        return None;
    }
    // Extended Euclid.
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (n, a.rem_euclid(n));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    Some(t.rem_euclid(n))
}

/// One row of a mollification ladder of counts.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LadderRow {
    pub level: u32,
    pub lambda: f64,
    /// `|Λ_level − Λ_{level-1}|`, absent on the first row.
    pub diff: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LambdaLadder {
    pub rows: Vec<LadderRow>,
    /// Geometric ratio fitted to the successive differences (2^slope of a
    /// log₂ least-squares fit); `None` when fewer than two nonzero diffs.
    pub ratio: Option<f64>,
    /// Empirical convergence verdict: fitted ratio strictly below 1.
    pub converged: bool,
    /// The requested depth ran past the grid's resolution.
    pub saturated: bool,
}

/// Counts `Λ(g; μ_level)` along the mollification ladder.
pub fn lambda_ladder(
    g: Option<&WeightFunction>,
    m: &GridMeasure,
    pattern: &Pattern,
    max_level: u32,
) -> Result<LambdaLadder> {
    let ladder = MollifierLadder::new(m.n);
    let density = m.density();
    let use_fast = g.is_none();
    let mut rows: Vec<LadderRow> = Vec::new();
    let mut prev: Option<f64> = None;
    let mut saturated = false;
    for level in 0..=max_level {
        if ladder.is_saturated(level) {
            saturated = true;
            break;
        }
        let mollified = ladder.mollify(&density, level).density;
        let value = if use_fast {
            let fs: Vec<&Density> = vec![&mollified; pattern.len()];
            match lambda_fast_one(&fs, pattern)? {
                Some(v) => v,
                None => lambda(None, &fs, pattern)?.real(),
            }
        } else {
            let fs: Vec<&Density> = vec![&mollified; pattern.len()];
            lambda(g, &fs, pattern)?.real()
        };
        rows.push(LadderRow {
            level,
            lambda: value,
            diff: prev.map(|p| (value - p).abs()),
        });
        prev = Some(value);
    }
    let diffs: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.diff.map(|d| (r.level as f64, d)))
        .filter(|&(_, d)| d > 0.0)
        .map(|(l, d)| (l, d.log2()))
        .collect();
    let ratio = crate::fit::linear_fit(&diffs).map(|(slope, _)| slope.exp2());
    let converged = ratio.map(|r| r < 1.0).unwrap_or(false);
    Ok(LambdaLadder {
        rows,
        ratio,
        converged,
        saturated,
    })
}

/// Dilation marginal with the requested `p'`-norms.
pub fn marginal(fs: &[&Density], pattern: &Pattern, p_norms: &[f64]) -> Result<MarginalDensity> {
    if fs.len() != pattern.len() {
        return Err(precondition("pattern/density count mismatch"));
    }
    let n = fs[0].n;
    if fs.iter().any(|f| f.n != n) {
        return Err(precondition("densities must share one grid size"));
    }
    let (s_count, nums) = grid_setup(n, pattern)?;
    let mut rho = Vec::with_capacity(s_count);
    for s in 0..s_count {
        let offs = offsets_for(n, s, &nums);
        let mut row = 0.0f64;
        for x in 0..n {
            let mut prod = 1.0;
            for (f, &o) in fs.iter().zip(&offs) {
                prod *= f.values[(x + n - o) % n];
            }
            row += prod;
        }
        rho.push(row / n as f64);
    }
    let p_norms = p_norms
        .iter()
        .map(|&p| {
            let mean_pow: f64 = rho.iter().map(|v| v.abs().powf(p)).sum::<f64>() / s_count as f64;
            (p, mean_pow.powf(1.0 / p))
        })
        .collect();
    Ok(MarginalDensity {
        n,
        stride: pattern.denominator() as usize,
        rho,
        p_norms,
    })
}

/// Support and non-triviality diagnostics at a mollification level.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SupportDiagnostic {
    pub level: u32,
    /// `Λ(1_E; μ_level)` where `E` collects the `(x, r)` whose configuration
    /// points stray farther than the tube gap from `supp(μ)`.
    pub leakage: f64,
    /// `Λ(1_{|r| ≤ δ}; μ_level)`: mass near the trivial (zero-dilation) fiber.
    pub trivial_mass: f64,
    pub saturated: bool,
}

/// Computes support leakage (tube gap in torus units) and trivial-image mass
/// (`|r| ≤ delta`, torus units) for the mollified measure at `level`.
pub fn support_diagnostic(
    m: &GridMeasure,
    pattern: &Pattern,
    level: u32,
    gap: f64,
    delta: f64,
) -> Result<SupportDiagnostic> {
    let n = m.n;
    let (s_count, nums) = grid_setup(n, pattern)?;
    let q = pattern.denominator() as usize;
    let ladder = MollifierLadder::new(n);
    let mollified = ladder.mollify(&m.density(), level);
    let mu = &mollified.density;

    let dist = distance_to_support_cells(m);
    let gap_cells = gap * n as f64;

    let mut leakage = 0.0f64;
    let mut trivial = 0.0f64;
    for s in 0..s_count {
        let offs = offsets_for(n, s, &nums);
        let r = (q * s) % n;
        let r_near_zero = (wrapped_distance_cells(r, 0, n) as f64) <= delta * n as f64;
        for x in 0..n {
            let mut prod = 1.0;
            let mut strays = false;
            for (t, &o) in offs.iter().enumerate() {
                let pos = (x + n - o) % n;
                prod *= mu.values[pos];
                if dist[pos] as f64 > gap_cells {
                    strays = true;
                }
                let _ = t;
            }
            if strays {
                leakage += prod;
            }
            if r_near_zero {
                trivial += prod;
            }
        }
    }
    let scale = q as f64 / (n as f64 * n as f64);
    Ok(SupportDiagnostic {
        level,
        leakage: leakage * scale,
        trivial_mass: trivial * scale,
        saturated: mollified.saturated,
    })
}

/// Wrapped distance (in cells) from each cell to the nearest support cell.
fn distance_to_support_cells(m: &GridMeasure) -> Vec<usize> {
    let n = m.n;
    let big = usize::MAX / 2;
    let mut dist = vec![big; n];
    for (x, &w) in m.weights.iter().enumerate() {
        if w > 0.0 {
            dist[x] = 0;
        }
    }
    // Two wrapped sweeps in each direction settle the cyclic distances.
    for _ in 0..2 {
        for x in 0..n {
            let prev = dist[(x + n - 1) % n].saturating_add(1);
            if prev < dist[x] {
                dist[x] = prev;
            }
        }
    }
    for _ in 0..2 {
        for x in (0..n).rev() {
            let next = dist[(x + 1) % n].saturating_add(1);
            if next < dist[x] {
                dist[x] = next;
            }
        }
    }
    dist
}
