//! Cube products, cube spectra, and uniformity norms.
//!
//! The order-`k` cube product of a density `f` on the `n`-point grid is
//!
//! ```text
//! Δᵏf(x; u₁…u_k) = ∏_{ι∈{0,1}^k} C^{|ι|} f(x + ι·u)
//! ```
//!
//! with complex conjugation `C` applied at vertices of odd weight (the
//! standard convention; immaterial for real data but it is what makes the
//! norms below genuine norms). The cube spectrum collects the transforms of
//! `Δᵏf` in the side lengths at base frequency 0,
//!
//! ```text
//! Δᵏf̂(0;η) = n^{-(k+1)} Σ_{x,u} Δᵏf(x;u) e^{-2πi η·u/n},
//! ```
//!
//! and the `U^k` norm is available through two independent routes that must
//! agree: a literal average of `Δᵏf` over all of `Z_n^{k+1}`, and the
//! spectral identity `‖f‖_{U^k}^{2^k} = Σ_η |Δ^{k-1}f̂(0;η)|²`.
//!
//! All transforms carry `1/n` per variable, so `f ≡ 1` has norm exactly 1.
//! Tensor sizes grow like `n^{k+1}`; every tensor-building entry point takes
//! an explicit [`Budget`] and fails loudly rather than truncating.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::sync::Arc;

use crate::error::{precondition, Error, Result};
use crate::measure::forward_complex;

/// Cap on the number of tensor cells an operation may traverse.
///
/// The default admits order-2 spectra to roughly `n = 100` and order-3
/// spectra to `n = 32` (cost model: `n^{k+1}` for a density cube spectrum,
/// `n^{k+2}` for a weight cube spectrum).
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_cells: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_cells: 1 << 20,
        }
    }
}

impl Budget {
    pub fn new(max_cells: u128) -> Self {
        Budget { max_cells }
    }

    pub fn check(&self, needed: u128) -> Result<()> {
        if needed > self.max_cells {
            Err(Error::Budget {
                needed,
                max: self.max_cells,
            })
        } else {
            Ok(())
        }
    }
}

/// Which evaluation path [`u_norm`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Brute-force average of the cube product over `Z_n^{k+1}`.
    Direct,
    /// Spectral route through the order-`k-1` cube spectrum.
    Fourier,
}

impl std::str::FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direct" => Ok(Route::Direct),
            "fourier" => Ok(Route::Fourier),
            other => Err(format!("unknown route {other:?} (expected direct|fourier)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct UNormValue {
    pub value: f64,
    /// Direct route on complex data found a cube mean with a non-negligible
    /// imaginary part; the modulus was used.
    pub complex_flagged: bool,
}

/// The array `η ↦ Δᵏf̂(0;η)` over `η ∈ Z_n^k`, flattened with `η₁` fastest.
#[derive(Debug, Clone)]
pub struct CubeSpectrum {
    pub k: u32,
    pub n: usize,
    pub values: Vec<Complex64>,
}

impl CubeSpectrum {
    /// Value at a signed multi-index (entries wrapped mod `n`).
    pub fn at(&self, eta: &[i64]) -> Complex64 {
        assert_eq!(eta.len(), self.k as usize);
        let n = self.n as i64;
        let mut flat = 0usize;
        for (j, &e) in eta.iter().enumerate() {
            flat += (e.rem_euclid(n) as usize) * self.n.pow(j as u32);
        }
        self.values[flat]
    }

    /// `Δᵏf̂(0;0)`, which for nonnegative `f` dominates every other entry.
    pub fn at_zero(&self) -> Complex64 {
        self.values[0]
    }

    /// Diagonal slice `m ↦ Δᵏf̂(0;(m,…,m))` for decay fitting.
    pub fn diagonal_series(&self) -> crate::dimension::DecaySeries {
        let values = (0..self.n as i64)
            .map(|m| self.at(&vec![m; self.k as usize]))
            .collect();
        crate::dimension::DecaySeries {
            n: self.n,
            order: self.k,
            values,
        }
    }
}

impl Serialize for CubeSpectrum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CubeSpectrum", 4)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("indexOrder", "eta1Fastest")?;
        let pairs: Vec<[f64; 2]> = self.values.iter().map(|c| [c.re, c.im]).collect();
        st.serialize_field("values", &pairs)?;
        st.end()
    }
}

/// Bounded weight on the doubled torus, `g(x, y)`, stored row-major with the
/// first argument slowest: `values[x * n + y]`.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    pub n: usize,
    pub values: Vec<Complex64>,
}

impl WeightFunction {
    pub fn one(n: usize) -> Self {
        WeightFunction {
            n,
            values: vec![Complex64::new(1.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                values.push(f(x, y));
            }
        }
        WeightFunction { n, values }
    }

    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        self.values[(x % self.n) * self.n + (y % self.n)]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }
}

/// The array `(ξ, η) ↦ Δᵏĝ(0, ξ; η)`: transform over the first argument at
/// frequency 0, over the second at `ξ`, over the side lengths at `η`.
/// Flattened with `η₁` fastest and `ξ` slowest.
///
/// `Δᵏg` differences the first argument only, `Δᵏg(x,y;u) =
/// Δ^{k-1}g(x-u_k,y;u')·conj(Δ^{k-1}g(x,y;u'))`; the conjugation on the
/// second factor mirrors the density convention.
#[derive(Debug, Clone)]
pub struct WeightSpectrum {
    pub k: u32,
    pub n: usize,
    pub values: Vec<Complex64>,
}

impl WeightSpectrum {
    fn eta_cells(&self) -> usize {
        self.n.pow(self.k)
    }

    pub fn at(&self, xi: i64, eta: &[i64]) -> Complex64 {
        assert_eq!(eta.len(), self.k as usize);
        let n = self.n as i64;
        let mut flat = 0usize;
        for (j, &e) in eta.iter().enumerate() {
            flat += (e.rem_euclid(n) as usize) * self.n.pow(j as u32);
        }
        self.values[flat + self.eta_cells() * (xi.rem_euclid(n) as usize)]
    }

    /// Mixed norm `‖·‖_{ℓ¹_ξ ℓ^p_η}`: the `ℓ^p` norm over `η` for each `ξ`,
    /// summed over `ξ`.
    pub fn mixed_norm(&self, p: f64) -> Result<f64> {
        if p < 1.0 {
            return Err(precondition("mixed norm requires p >= 1"));
        }
        let cells = self.eta_cells();
        let mut total = 0.0;
        for xi in 0..self.n {
            let block = &self.values[xi * cells..(xi + 1) * cells];
            let inner: f64 = block.iter().map(|c| c.norm().powf(p)).sum();
            total += inner.powf(1.0 / p);
        }
        Ok(total)
    }
}

/// Order-`k` cube product at a single point, by the defining recursion.
pub fn cube_product(f: &[Complex64], x: usize, us: &[usize]) -> Complex64 {
    let n = f.len();
    match us.split_last() {
        None => f[x % n],
        Some((&last, rest)) => {
            cube_product(f, x, rest) * cube_product(f, (x + last) % n, rest).conj()
        }
    }
}

/// `Δᵏf̂(0;·)` over the full `η`-grid. Needs `n^{k+1}` cells of budget.
pub fn cube_spectrum(f: &[Complex64], k: u32, budget: &Budget) -> Result<CubeSpectrum> {
    let n = f.len();
    if k < 1 {
        return Err(precondition("cube spectrum needs order k >= 1"));
    }
    budget.check((n as u128).pow(k + 1))?;
    if k == 1 {
        // Δ¹f̂(0;η) = |f̂(-η)|².
        let mut fhat = f.to_vec();
        forward_complex(&mut fhat);
        let values = (0..n)
            .map(|m| {
                let v = fhat[(n - m) % n].norm_sqr();
                Complex64::new(v, 0.0)
            })
            .collect();
        return Ok(CubeSpectrum { k, n, values });
    }

    // Tensor of Δ^{k-1}f over (u', x), x fastest.
    let tensor = cube_tensor_density(f, k - 1);
    spectrum_from_tensor(tensor, n, k)
}

/// Builds `T[flat(u')*n + x] = Δ^j f(x; u')` for `j = order`.
fn cube_tensor_density(f: &[Complex64], order: u32) -> Vec<Complex64> {
    let n = f.len();
    let mut tensor: Vec<Complex64> = f.to_vec(); // order 0: just f(x)
    for _ in 0..order {
        let rows = tensor.len() / n;
        let mut next = vec![Complex64::default(); tensor.len() * n];
        for row in 0..rows {
            let base = &tensor[row * n..(row + 1) * n];
            for u in 0..n {
                let out = &mut next[(u * rows + row) * n..(u * rows + row + 1) * n];
                for x in 0..n {
                    out[x] = base[x] * base[(x + u) % n].conj();
                }
            }
        }
        tensor = next;
    }
    // Layout note: the new side length becomes the *slowest* u-coordinate,
    // so flat(u') has u_1 fastest, matching the output convention.
    tensor
}

/// Same tensor for a weight slice `g(·, y)`: the recursion shifts the
/// argument down and conjugates the unshifted copy.
fn cube_tensor_weight_slice(g_col: &[Complex64], order: u32) -> Vec<Complex64> {
    let n = g_col.len();
    let mut tensor: Vec<Complex64> = g_col.to_vec();
    for _ in 0..order {
        let rows = tensor.len() / n;
        let mut next = vec![Complex64::default(); tensor.len() * n];
        for row in 0..rows {
            let base = &tensor[row * n..(row + 1) * n];
            for u in 0..n {
                let out = &mut next[(u * rows + row) * n..(u * rows + row + 1) * n];
                for x in 0..n {
                    out[x] = base[(x + n - u % n) % n] * base[x].conj();
                }
            }
        }
        tensor = next;
    }
    tensor
}

/// Shared tail of the spectrum computation: from the order-`k-1` tensor over
/// `(u', x)` to `Δᵏ·̂(0;η)` via `n^{1-k} Σ_{u'} |T̂_{u'}(-η_k)|² e^{-2πiη'·u'/n}`.
fn spectrum_from_tensor(mut tensor: Vec<Complex64>, n: usize, k: u32) -> Result<CubeSpectrum> {
    let rows = tensor.len() / n; // n^{k-1} values of u'
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let scale = 1.0 / n as f64;
    for row in 0..rows {
        let line = &mut tensor[row * n..(row + 1) * n];
        fft.process(line);
        for c in line.iter_mut() {
            *c *= scale;
        }
    }
    // H[flat(u') + rows*m] = |T̂_{u'}(-m)|², then DFT over each u'-axis.
    let mut h = vec![Complex64::default(); rows * n];
    for row in 0..rows {
        for m in 0..n {
            let v = tensor[row * n + (n - m) % n].norm_sqr();
            h[m * rows + row] = Complex64::new(v, 0.0);
        }
    }
    drop(tensor);
    for block in h.chunks_mut(rows) {
        dft_all_axes(block, n, (k - 1) as usize, &fft);
    }
    Ok(CubeSpectrum { k, n, values: h })
}

/// In-place forward DFT (scaled by 1/n per axis) along each of the `ndims`
/// axes of a hypercube array with side `n`, fastest axis first.
fn dft_all_axes(data: &mut [Complex64], n: usize, ndims: usize, fft: &Arc<dyn Fft<f64>>) {
    let scale = 1.0 / n as f64;
    let mut line = vec![Complex64::default(); n];
    for axis in 0..ndims {
        let stride = n.pow(axis as u32);
        let block = stride * n;
        let blocks = data.len() / block;
        for b in 0..blocks {
            for inner in 0..stride {
                let base = b * block + inner;
                for i in 0..n {
                    line[i] = data[base + i * stride];
                }
                fft.process(&mut line);
                for i in 0..n {
                    data[base + i * stride] = line[i] * scale;
                }
            }
        }
    }
}

/// `U^k` norm of a complex density, `k ≥ 2`, by the requested route.
pub fn u_norm(f: &[Complex64], k: u32, route: Route, budget: &Budget) -> Result<UNormValue> {
    let n = f.len();
    if k < 2 {
        return Err(precondition("u_norm is defined for k >= 2"));
    }
    match route {
        Route::Direct => {
            budget.check((n as u128).pow(k + 1))?;
            let cells = n.pow(k);
            let mut us = vec![0usize; k as usize];
            let mut sum = Complex64::default();
            for flat in 0..cells {
                let mut rem = flat;
                for u in us.iter_mut() {
                    *u = rem % n;
                    rem /= n;
                }
                for x in 0..n {
                    sum += cube_product(f, x, &us);
                }
            }
            let mean = sum / (n as f64).powi(k as i32 + 1);
            let (raw, flagged) = if mean.im.abs() > 1e-9 * mean.re.abs().max(1e-9) {
                (mean.norm(), true)
            } else {
                (mean.re.max(0.0), false)
            };
            Ok(UNormValue {
                value: raw.powf(1.0 / (1u64 << k) as f64),
                complex_flagged: flagged,
            })
        }
        Route::Fourier => {
            let power: f64 = if k == 2 {
                // Σ_η |Δ¹f̂(0;η)|² = Σ_ξ |f̂(ξ)|⁴, no tensor required.
                let mut fhat = f.to_vec();
                forward_complex(&mut fhat);
                fhat.iter().map(|c| c.norm_sqr().powi(2)).sum()
            } else {
                let spec = cube_spectrum(f, k - 1, budget)?;
                spec.values.iter().map(|c| c.norm_sqr()).sum()
            };
            Ok(UNormValue {
                value: power.powf(1.0 / (1u64 << k) as f64),
                complex_flagged: false,
            })
        }
    }
}

/// `Δᵏĝ(0,ξ;η)` over the full `(ξ, η)` grid. Needs `n^{k+2}` cells.
pub fn cube_weight_spectrum(g: &WeightFunction, k: u32, budget: &Budget) -> Result<WeightSpectrum> {
    let n = g.n;
    budget.check((n as u128).pow(k + 2))?;
    let eta_cells = n.pow(k);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    // A[flat(η) + eta_cells * y] per y, then a final transform across y.
    let mut a = vec![Complex64::default(); eta_cells * n];
    let mut col = vec![Complex64::default(); n];
    for y in 0..n {
        for x in 0..n {
            col[x] = g.values[x * n + y];
        }
        if k == 0 {
            let mean = col.iter().sum::<Complex64>() / n as f64;
            a[y] = mean;
        } else {
            let tensor = cube_tensor_weight_slice(&col, k - 1);
            let spec = spectrum_from_tensor(tensor, n, k)?;
            a[y * eta_cells..(y + 1) * eta_cells].copy_from_slice(&spec.values);
        }
    }
    // Transform y -> ξ (1/n), writing ξ slowest.
    let mut values = vec![Complex64::default(); eta_cells * n];
    let mut line = vec![Complex64::default(); n];
    let scale = 1.0 / n as f64;
    for e in 0..eta_cells {
        for y in 0..n {
            line[y] = a[y * eta_cells + e];
        }
        fft.process(&mut line);
        for xi in 0..n {
            values[xi * eta_cells + e] = line[xi] * scale;
        }
    }
    Ok(WeightSpectrum { k, n, values })
}

/// Fourier-side higher-order pairing of a density against a weight:
///
/// ```text
/// ⟨f, g⟩_k = Σ_{ξ∈Z_n} Σ_{η∈Z_n^k} Δᵏĝ(0,ξ;η) · Δᵏf̂(0;η)
/// ```
///
/// For `g ≡ 1` this collapses to `Δᵏf̂(0;0) = ‖f‖_{U^k}^{2^k}`; for `f ≡ 1`
/// it collapses to `Σ_ξ Δᵏĝ(0,ξ;0)` (equal to `Δᵏĝ(0,0;0)` whenever `g`
/// does not depend on its second argument).
pub fn gowers_inner(
    f: &[Complex64],
    g: &WeightFunction,
    k: u32,
    budget: &Budget,
) -> Result<Complex64> {
    if f.len() != g.n {
        return Err(precondition("density and weight must share a grid size"));
    }
    if k < 1 {
        return Err(precondition("gowers_inner needs order k >= 1"));
    }
    let spec = cube_spectrum(f, k, budget)?;
    let wspec = cube_weight_spectrum(g, k, budget)?;
    let cells = spec.values.len();
    // Collapse ξ first: P[η] = Σ_ξ W[ξ;η].
    let mut p = vec![Complex64::default(); cells];
    for xi in 0..g.n {
        let block = &wspec.values[xi * cells..(xi + 1) * cells];
        for (acc, w) in p.iter_mut().zip(block) {
            *acc += *w;
        }
    }
    Ok(p
        .iter()
        .zip(&spec.values)
        .map(|(w, s)| w * s)
        .sum::<Complex64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::GridMeasure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn ones(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); n]
    }

    fn one_plus_cos(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|x| Complex64::new(1.0 + (TAU * x as f64 / n as f64).cos(), 0.0))
            .collect()
    }

    fn random_nonneg(n: usize, seed: u64) -> Vec<Complex64> {
        GridMeasure::random_uniform(n, seed).density().to_complex()
    }

    fn random_complex(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect()
    }

    /// Literal vertex-product evaluation of the cube product, independent of
    /// the recursion used by the implementation.
    fn cube_product_by_vertices(f: &[Complex64], x: usize, us: &[usize]) -> Complex64 {
        let n = f.len();
        let k = us.len();
        let mut prod = Complex64::new(1.0, 0.0);
        for iota in 0..(1usize << k) {
            let mut pos = x;
            let mut weight = 0;
            for (j, &u) in us.iter().enumerate() {
                if iota >> j & 1 == 1 {
                    pos = (pos + u) % n;
                    weight += 1;
                }
            }
            let v = f[pos];
            prod *= if weight % 2 == 1 { v.conj() } else { v };
        }
        prod
    }

    /// Brute-force cube spectrum straight from the definition.
    fn brute_cube_spectrum(f: &[Complex64], k: u32) -> CubeSpectrum {
        let n = f.len();
        let cells = n.pow(k);
        let mut values = vec![Complex64::default(); cells];
        let mut us = vec![0usize; k as usize];
        let mut eta = vec![0usize; k as usize];
        for flat_eta in 0..cells {
            let mut rem = flat_eta;
            for e in eta.iter_mut() {
                *e = rem % n;
                rem /= n;
            }
            let mut sum = Complex64::default();
            for flat_u in 0..cells {
                let mut rem = flat_u;
                for u in us.iter_mut() {
                    *u = rem % n;
                    rem /= n;
                }
                let phase: f64 = us
                    .iter()
                    .zip(&eta)
                    .map(|(&u, &e)| (u * e) as f64)
                    .sum::<f64>()
                    * TAU
                    / n as f64;
                let tw = Complex64::new(phase.cos(), -phase.sin());
                for x in 0..n {
                    sum += cube_product_by_vertices(f, x, &us) * tw;
                }
            }
            values[flat_eta] = sum / (n as f64).powi(k as i32 + 1);
        }
        CubeSpectrum { k, n, values }
    }

    #[test]
    fn cube_product_matches_vertex_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_complex(7, &mut rng);
        for k in 1..=3usize {
            for _ in 0..40 {
                let x = rng.gen_range(0..7);
                let us: Vec<usize> = (0..k).map(|_| rng.gen_range(0..7)).collect();
                let a = cube_product(&f, x, &us);
                let b = cube_product_by_vertices(&f, x, &us);
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cube_product_trivial_cases() {
        let f = ones(9);
        assert!((cube_product(&f, 4, &[2, 7]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        // u = 0 collapses every vertex: f(x)^{2^k} for real f.
        let g: Vec<Complex64> = (0..9).map(|x| Complex64::new(1.0 + x as f64, 0.0)).collect();
        let v = cube_product(&g, 3, &[0, 0, 0]);
        assert!((v.re - 4.0f64.powi(8)).abs() < 1e-9 && v.im.abs() < 1e-12);
    }

    #[test]
    fn cube_product_character_is_translation_invariant() {
        // f(x) = e^{2πix/n}, k = 1, u = 1: the product is e^{-2πi/n} for every x.
        let n = 12;
        let f: Vec<Complex64> = (0..n)
            .map(|x| Complex64::from_polar(1.0, TAU * x as f64 / n as f64))
            .collect();
        let expected = Complex64::from_polar(1.0, -TAU / n as f64);
        for x in 0..n {
            assert!((cube_product(&f, x, &[1]) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn spectrum_of_constant_is_delta() {
        let budget = Budget::default();
        for k in 1..=3 {
            let spec = cube_spectrum(&ones(8), k, &budget).unwrap();
            for (i, v) in spec.values.iter().enumerate() {
                let expect = if i == 0 { 1.0 } else { 0.0 };
                assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12, "k={k} i={i}");
            }
        }
    }

    #[test]
    fn dirac_order1_spectrum_is_flat() {
        let n = 16;
        let f = GridMeasure::dirac(n, 0).density().to_complex();
        let spec = cube_spectrum(&f, 1, &Budget::default()).unwrap();
        for v in &spec.values {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn one_plus_cos_power_sum_is_1_125() {
        let f = one_plus_cos(16);
        let spec = cube_spectrum(&f, 1, &Budget::default()).unwrap();
        let power: f64 = spec.values.iter().map(|c| c.norm_sqr()).sum();
        assert!((power - 1.125).abs() < 1e-12, "power = {power}");
    }

    #[test]
    fn fft_spectrum_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for k in 1..=2 {
            let f = random_complex(8, &mut rng);
            let fast = cube_spectrum(&f, k, &Budget::default()).unwrap();
            let slow = brute_cube_spectrum(&f, k);
            for (a, b) in fast.values.iter().zip(&slow.values) {
                assert!((a - b).norm() < 1e-10, "k={k}");
            }
        }
    }

    #[test]
    fn u_norm_constant_is_one() {
        for k in 2..=3 {
            for route in [Route::Direct, Route::Fourier] {
                let v = u_norm(&ones(12), k, route, &Budget::default()).unwrap();
                assert!((v.value - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn u2_norm_of_one_plus_cos() {
        let f = one_plus_cos(16);
        let expected = 1.125f64.powf(0.25);
        for route in [Route::Direct, Route::Fourier] {
            let v = u_norm(&f, 2, route, &Budget::default()).unwrap();
            assert!((v.value - expected).abs() < 1e-10, "{route:?}: {}", v.value);
        }
        assert!((expected - 1.029884).abs() < 1e-6);
    }

    #[test]
    fn u2_norm_of_dirac_is_fourth_root_of_n() {
        let n = 16;
        let f = GridMeasure::dirac(n, 0).density().to_complex();
        for route in [Route::Direct, Route::Fourier] {
            let v = u_norm(&f, 2, route, &Budget::default()).unwrap();
            assert!((v.value - (n as f64).powf(0.25)).abs() < 1e-9);
        }
    }

    #[test]
    fn routes_agree_on_random_densities() {
        for (i, &n) in [9, 16, 25].iter().enumerate() {
            let f = random_nonneg(n, 100 + i as u64);
            for k in 2..=3 {
                let a = u_norm(&f, k, Route::Direct, &Budget::default()).unwrap();
                let b = u_norm(&f, k, Route::Fourier, &Budget::default()).unwrap();
                let rel = (a.value - b.value).abs() / b.value;
                assert!(rel < 1e-8, "n={n} k={k}: {} vs {}", a.value, b.value);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let tiny = Budget::new(100);
        let err = cube_spectrum(&ones(8), 2, &tiny).unwrap_err();
        match err {
            Error::Budget { needed, max } => {
                assert_eq!(needed, 512);
                assert_eq!(max, 100);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn weight_spectrum_of_one_is_delta() {
        for k in 0..=2 {
            let w = cube_weight_spectrum(&WeightFunction::one(8), k, &Budget::default()).unwrap();
            for (i, v) in w.values.iter().enumerate() {
                let expect = if i == 0 { 1.0 } else { 0.0 };
                assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12, "k={k} i={i}");
            }
            assert!((w.mixed_norm(1.5).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_spectrum_order0_picks_out_monomial() {
        // g(x,r) = e^{2πi η₀ r/n} (no x-dependence): a single entry at ξ = η₀.
        let n = 8;
        let eta0 = 3usize;
        let g = WeightFunction::from_fn(n, |_, r| {
            Complex64::from_polar(1.0, TAU * (eta0 * r) as f64 / n as f64)
        });
        let w = cube_weight_spectrum(&g, 0, &Budget::default()).unwrap();
        for xi in 0..n as i64 {
            let expect = if xi == eta0 as i64 { 1.0 } else { 0.0 };
            assert!((w.at(xi, &[]) - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
        // With x-dependence at a nonzero frequency the base-frequency-0 slice vanishes.
        let g2 = WeightFunction::from_fn(n, |x, r| {
            Complex64::from_polar(1.0, TAU * (x + eta0 * r) as f64 / n as f64)
        });
        let w2 = cube_weight_spectrum(&g2, 0, &Budget::default()).unwrap();
        assert!(w2.values.iter().all(|c| c.norm() < 1e-12));
    }

    /// Direct evaluation of Δᵏĝ(0,ξ;η) by summing the recursion over the
    /// whole grid; O(n^{k+2}·2^k) and independent of the pipeline above.
    fn brute_weight_entry(g: &WeightFunction, k: u32, xi: i64, eta: &[i64]) -> Complex64 {
        let n = g.n;
        fn delta_g(g: &WeightFunction, x: i64, y: usize, us: &[usize]) -> Complex64 {
            let n = g.n as i64;
            match us.split_last() {
                None => g.at(x.rem_euclid(n) as usize, y),
                Some((&last, rest)) => {
                    delta_g(g, x - last as i64, y, rest) * delta_g(g, x, y, rest).conj()
                }
            }
        }
        let cells = n.pow(k);
        let mut sum = Complex64::default();
        let mut us = vec![0usize; k as usize];
        for flat in 0..cells {
            let mut rem = flat;
            for u in us.iter_mut() {
                *u = rem % n;
                rem /= n;
            }
            let udot: f64 = us
                .iter()
                .zip(eta)
                .map(|(&u, &e)| u as f64 * e as f64)
                .sum();
            for x in 0..n {
                for y in 0..n {
                    let phase = TAU * (udot + xi as f64 * y as f64) / n as f64;
                    sum += delta_g(g, x as i64, y, &us) * Complex64::new(phase.cos(), -phase.sin());
                }
            }
        }
        sum / (n as f64).powi(k as i32 + 2)
    }

    #[test]
    fn weight_spectrum_matches_brute_force_on_random_signs() {
        let n = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = WeightFunction::from_fn(n, |_, _| {
            Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)
        });
        let w = cube_weight_spectrum(&g, 1, &Budget::default()).unwrap();
        for xi in [0i64, 1, 3, 7] {
            for eta in [0i64, 2, 5] {
                let brute = brute_weight_entry(&g, 1, xi, &[eta]);
                assert!(
                    (w.at(xi, &[eta]) - brute).norm() < 1e-10,
                    "xi={xi} eta={eta}"
                );
            }
        }
        // Mixed norm against the same brute entries.
        let mut brute_norm = 0.0;
        let p = 1.5;
        for xi in 0..n as i64 {
            let mut inner = 0.0;
            for eta in 0..n as i64 {
                inner += brute_weight_entry(&g, 1, xi, &[eta]).norm().powf(p);
            }
            brute_norm += inner.powf(1.0 / p);
        }
        assert!((w.mixed_norm(p).unwrap() - brute_norm).abs() < 1e-9);
    }

    #[test]
    fn inner_with_unit_weight_is_cube_spectrum_at_zero() {
        let f = random_nonneg(10, 3);
        for k in 1..=2 {
            let inner = gowers_inner(&f, &WeightFunction::one(10), k, &Budget::default()).unwrap();
            let spec = cube_spectrum(&f, k, &Budget::default()).unwrap();
            assert!((inner - spec.at_zero()).norm() < 1e-10);
        }
    }

    #[test]
    fn inner_with_unit_density_reads_weight_spectrum() {
        // For g independent of its second argument the ξ-sum collapses and
        // the pairing equals Δᵏĝ(0,0;0).
        let n = 9;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let profile: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>(), 0.0))
            .collect();
        let g = WeightFunction::from_fn(n, |x, _| profile[x]);
        let k = 2;
        let inner = gowers_inner(&ones(n), &g, k, &Budget::default()).unwrap();
        let w = cube_weight_spectrum(&g, k, &Budget::default()).unwrap();
        assert!((inner - w.at(0, &[0, 0])).norm() < 1e-10);
    }

    #[test]
    fn inner_matches_configuration_space_oracle() {
        // Parseval turns the pairing into
        //   n^{-(k+2)} Σ_u [Σ_x Δᵏg(x,0;u)] [Σ_{x'} Δᵏf(x';-u)].
        let n = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = random_complex(n, &mut rng);
        let vals: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let g = WeightFunction { n, values: vals };
        for k in 1..=2u32 {
            let inner = gowers_inner(&f, &g, k, &Budget::default()).unwrap();

            fn delta_g(g: &WeightFunction, x: i64, y: usize, us: &[usize]) -> Complex64 {
                let n = g.n as i64;
                match us.split_last() {
                    None => g.at(x.rem_euclid(n) as usize, y),
                    Some((&last, rest)) => {
                        delta_g(g, x - last as i64, y, rest) * delta_g(g, x, y, rest).conj()
                    }
                }
            }
            let cells = n.pow(k as u32);
            let mut total = Complex64::default();
            let mut us = vec![0usize; k as usize];
            for flat in 0..cells {
                let mut rem = flat;
                for u in us.iter_mut() {
                    *u = rem % n;
                    rem /= n;
                }
                let neg_us: Vec<usize> = us.iter().map(|&u| (n - u) % n).collect();
                let g_sum: Complex64 = (0..n).map(|x| delta_g(&g, x as i64, 0, &us)).sum();
                let f_sum: Complex64 = (0..n).map(|x| cube_product(&f, x, &neg_us)).sum();
                total += g_sum * f_sum;
            }
            let oracle = total / (n as f64).powi(k as i32 + 2);
            assert!((inner - oracle).norm() < 1e-10, "k={k}: {inner} vs {oracle}");
        }
    }

    #[test]
    fn lemma_4_1_domination_quick_check() {
        for seed in 0..10u64 {
            let f = random_nonneg(12, 400 + seed);
            let spec = cube_spectrum(&f, 2, &Budget::default()).unwrap();
            let zero = spec.at_zero().re;
            for v in &spec.values {
                assert!(v.norm() <= zero + 1e-12);
            }
        }
    }
}
