//! Integer-lattice counterparts: brute-force configuration counts in subsets
//! of `Z_N^d`, an AP-free control set, empirical Varnavides density scans,
//! and the block-discretization bridge between the torus and lattice sides.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{precondition, Error, Result};
use crate::measure::Density;
use crate::pattern::Pattern;

/// Finite subset of the box `[0, nSide)^d`, `d ∈ {1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSet {
    pub d: usize,
    pub n_side: usize,
    pub members: BTreeSet<[i64; 2]>,
}

impl LatticeSet {
    pub fn new_1d(n_side: usize, members: impl IntoIterator<Item = i64>) -> Result<Self> {
        let members: BTreeSet<[i64; 2]> = members.into_iter().map(|x| [x, 0]).collect();
        let set = LatticeSet {
            d: 1,
            n_side,
            members,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn new_2d(n_side: usize, members: impl IntoIterator<Item = [i64; 2]>) -> Result<Self> {
        let set = LatticeSet {
            d: 2,
            n_side,
            members: members.into_iter().collect(),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn full(d: usize, n_side: usize) -> Self {
        let mut members = BTreeSet::new();
        match d {
            1 => {
                for x in 0..n_side as i64 {
                    members.insert([x, 0]);
                }
            }
            _ => {
                for x in 0..n_side as i64 {
                    for y in 0..n_side as i64 {
                        members.insert([x, y]);
                    }
                }
            }
        }
        LatticeSet { d, n_side, members }
    }

    fn validate(&self) -> Result<()> {
        if self.d != 1 && self.d != 2 {
            return Err(precondition("lattice dimension must be 1 or 2"));
        }
        if self.n_side == 0 {
            return Err(precondition("nSide must be positive"));
        }
        let n = self.n_side as i64;
        for p in &self.members {
            let in_box = p[0] >= 0 && p[0] < n && (self.d == 2 || p[1] == 0) && p[1] >= 0 && p[1] < n.max(1);
            if !in_box {
                return Err(precondition(format!("member {p:?} outside box")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.members.len() as f64 / (self.n_side as f64).powi(self.d as i32)
    }

    /// Dense membership table, indexed `x + nSide·y`.
    fn table(&self) -> Vec<bool> {
        let n = self.n_side;
        let mut t = vec![false; n * if self.d == 2 { n } else { 1 }];
        for p in &self.members {
            t[p[0] as usize + n * p[1] as usize] = true;
        }
        t
    }

    pub fn parse(json: &str) -> Result<Self> {
        let repr: LatticeSetRepr =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("lattice set: {e}")))?;
        repr.into_set()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&LatticeSetRepr::from_set(self)).expect("lattice set serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeSetRepr {
    d: usize,
    #[serde(rename = "nSide")]
    n_side: usize,
    members: serde_json::Value,
}

impl LatticeSetRepr {
    fn from_set(set: &LatticeSet) -> Self {
        let members = if set.d == 1 {
            serde_json::json!(set.members.iter().map(|p| p[0]).collect::<Vec<_>>())
        } else {
            serde_json::json!(set.members.iter().collect::<Vec<_>>())
        };
        LatticeSetRepr {
            d: set.d,
            n_side: set.n_side,
            members,
        }
    }

    fn into_set(self) -> Result<LatticeSet> {
        let bad = |m: &str| Error::Parse(format!("lattice set members: {m}"));
        match self.d {
            1 => {
                let xs: Vec<i64> = serde_json::from_value(self.members)
                    .map_err(|e| bad(&e.to_string()))?;
                LatticeSet::new_1d(self.n_side, xs)
            }
            2 => {
                let ps: Vec<[i64; 2]> = serde_json::from_value(self.members)
                    .map_err(|e| bad(&e.to_string()))?;
                LatticeSet::new_2d(self.n_side, ps)
            }
            other => Err(precondition(format!("unsupported dimension {other}"))),
        }
    }
}

/// Pattern with (possibly) vector-valued rational points, for lattice counts.
#[derive(Debug, Clone)]
pub struct LatticePattern {
    pub d: usize,
    /// Numerator vectors; the point set is `coords[t] / den`.
    pub coords: Vec<[i64; 2]>,
    pub den: i64,
}

impl LatticePattern {
    pub fn from_pattern(p: &Pattern) -> Self {
        LatticePattern {
            d: 1,
            coords: p.numerators().iter().map(|&v| [v, 0]).collect(),
            den: p.denominator(),
        }
    }

    pub fn new_2d(coords: Vec<[i64; 2]>, den: i64) -> Result<Self> {
        if den < 1 {
            return Err(precondition("pattern denominator must be positive"));
        }
        if coords.len() < 2 {
            return Err(precondition("a pattern needs at least 2 points"));
        }
        let distinct: BTreeSet<[i64; 2]> = coords.iter().copied().collect();
        if distinct.len() != coords.len() {
            return Err(precondition("pattern points must be pairwise distinct"));
        }
        Ok(LatticePattern { d: 2, coords, den })
    }

    pub fn order(&self) -> u32 {
        (self.coords.len() - 1) as u32
    }

    /// Exact `⌊j·b_t⌋` per coordinate.
    pub fn floor_offsets(&self, j: i64) -> Vec<[i64; 2]> {
        self.coords
            .iter()
            .map(|c| [(j * c[0]).div_euclid(self.den), (j * c[1]).div_euclid(self.den)])
            .collect()
    }

    /// Largest `sup`-norm of the points, for the discretization padding.
    pub fn sup_point_norm(&self) -> f64 {
        self.coords
            .iter()
            .map(|c| (c[0].abs().max(c[1].abs()) as f64) / self.den as f64)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    Cyclic,
    Truncated,
}

impl std::str::FromStr for CountMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cyclic" => Ok(CountMode::Cyclic),
            "truncated" => Ok(CountMode::Truncated),
            other => Err(format!("unknown mode {other:?} (expected cyclic|truncated)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CountResult {
    /// Pairs `(i, j)` whose configuration lies in the set, trivial images
    /// included.
    pub total: u64,
    /// Same, excluding configurations with all points equal.
    pub nontrivial: u64,
}

/// Exact configuration count over `i ∈ box`, `j ∈ [1, nSide]`.
pub fn count_configs(a: &LatticeSet, pattern: &LatticePattern, mode: CountMode) -> Result<CountResult> {
    if pattern.d != a.d {
        return Err(precondition("pattern and set dimensions differ"));
    }
    let n = a.n_side as i64;
    let table = a.table();
    let idx = |x: i64, y: i64| (x + n * y) as usize;
    let mut total = 0u64;
    let mut nontrivial = 0u64;
    for j in 1..=a.n_side as i64 {
        let offs = pattern.floor_offsets(j);
        let trivial_j = match mode {
            CountMode::Cyclic => offs.iter().all(|o| {
                (o[0] - offs[0][0]).rem_euclid(n) == 0 && (o[1] - offs[0][1]).rem_euclid(n) == 0
            }),
            CountMode::Truncated => offs.iter().all(|o| o == &offs[0]),
        };
        let y_range: Vec<i64> = if a.d == 1 { vec![0] } else { (0..n).collect() };
        for iy in &y_range {
            for ix in 0..n {
                let mut hit = true;
                for o in &offs {
                    let (px, py) = match mode {
                        CountMode::Cyclic => ((ix - o[0]).rem_euclid(n), (iy - o[1]).rem_euclid(n)),
                        CountMode::Truncated => {
                            let px = ix - o[0];
                            let py = iy - o[1];
                            if px < 0 || px >= n || py < 0 || py >= n.max(1) {
                                hit = false;
                                break;
                            }
                            (px, py)
                        }
                    };
                    if !table[idx(px, py)] {
                        hit = false;
                        break;
                    }
                }
                if hit {
                    total += 1;
                    if !trivial_j {
                        nontrivial += 1;
                    }
                }
            }
        }
    }
    Ok(CountResult { total, nontrivial })
}

/// AP-free control set via the digit/sphere construction.
///
/// For each odd base `b`, integers below `nSide` whose base-`b` digits stay
/// in `[0, (b-1)/2]` add without carries; slicing them by the Euclidean norm
/// of the digit vector leaves no nontrivial 3-term progression (midpoints of
/// distinct same-norm vectors have strictly smaller norm). For `b = 3` the
/// digit range is `{0,1}` and the parity argument already forbids
/// progressions in the whole digit set, no slicing needed — at desk scale
/// that variant is the largest. Returns the biggest candidate found.
pub fn behrend(n_side: usize) -> LatticeSet {
    let mut best: Vec<i64> = Vec::new();
    for base in (3..=31usize).step_by(2) {
        let max_digit = (base - 1) / 2;
        // All v < nSide with admissible digits, plus their digit norms.
        let mut shells: std::collections::BTreeMap<u64, Vec<i64>> = Default::default();
        let mut all: Vec<i64> = Vec::new();
        for v in 0..n_side as i64 {
            let mut rem = v as usize;
            let mut norm = 0u64;
            let mut ok = true;
            while rem > 0 {
                let digit = rem % base;
                if digit > max_digit {
                    ok = false;
                    break;
                }
                norm += (digit * digit) as u64;
                rem /= base;
            }
            if ok {
                all.push(v);
                shells.entry(norm).or_default().push(v);
            }
        }
        let candidate: Vec<i64> = if base == 3 {
            all
        } else {
            shells
                .into_values()
                .max_by_key(|s| s.len())
                .unwrap_or_default()
        };
        if candidate.len() > best.len() {
            best = candidate;
        }
        if base > n_side {
            break;
        }
    }
    LatticeSet::new_1d(n_side, best).expect("behrend members lie in the box")
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VarnavidesResult {
    pub delta: f64,
    pub trials: usize,
    pub min_normalized_count: f64,
    /// `(quantile, value)` summary of the per-trial normalized counts.
    pub distribution: Vec<(f64, f64)>,
}

/// Normalizes a nontrivial count by the number of `(i, j)` pairs that could
/// possibly carry a nontrivial configuration, so the full set scores exactly 1.
pub fn normalized_nontrivial(
    a: &LatticeSet,
    pattern: &LatticePattern,
    mode: CountMode,
) -> Result<f64> {
    let count = count_configs(a, pattern, mode)?;
    let n = a.n_side as i64;
    let mut trivial_js = 0u64;
    for j in 1..=n {
        let offs = pattern.floor_offsets(j);
        let trivial = match mode {
            CountMode::Cyclic => offs.iter().all(|o| {
                (o[0] - offs[0][0]).rem_euclid(n) == 0 && (o[1] - offs[0][1]).rem_euclid(n) == 0
            }),
            CountMode::Truncated => offs.iter().all(|o| o == &offs[0]),
        };
        if trivial {
            trivial_js += 1;
        }
    }
    let boxes = (a.n_side as u64).pow(a.d as u32);
    let denom = boxes * (a.n_side as u64 - trivial_js.min(a.n_side as u64 - 1));
    Ok(count.nontrivial as f64 / denom as f64)
}

/// Empirical Varnavides scan: seeded random subsets of density `delta`
/// (exactly `⌈delta·nSide^d⌉` points), cyclic nontrivial counts per trial.
/// Per-trial RNG streams are derived from the master seed by trial index.
pub fn varnavides_scan(
    n_side: usize,
    delta: f64,
    pattern: &LatticePattern,
    trials: usize,
    seed: u64,
) -> Result<VarnavidesResult> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(precondition("delta must lie in [0, 1]"));
    }
    let boxes = (n_side as f64).powi(pattern.d as i32);
    if delta * boxes < (pattern.order() + 1) as f64 {
        return Err(precondition(format!(
            "delta·nSide^d = {} is too sparse to hold a {}-point configuration",
            delta * boxes,
            pattern.order() + 1
        )));
    }
    if trials == 0 {
        return Err(precondition("at least one trial required"));
    }
    let m = (delta * boxes).ceil() as usize;
    let mut counts: Vec<f64> = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64 + 1);
        let picks = rand::seq::index::sample(&mut rng, boxes as usize, m.min(boxes as usize));
        let set = if pattern.d == 1 {
            LatticeSet::new_1d(n_side, picks.iter().map(|i| i as i64))?
        } else {
            LatticeSet::new_2d(
                n_side,
                picks
                    .iter()
                    .map(|i| [(i % n_side) as i64, (i / n_side) as i64]),
            )?
        };
        counts.push(normalized_nontrivial(&set, pattern, CountMode::Cyclic)?);
    }
    let mut sorted = counts.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |q: f64| {
        let pos = (q * (sorted.len() - 1) as f64).round() as usize;
        sorted[pos]
    };
    Ok(VarnavidesResult {
        delta,
        trials,
        min_normalized_count: sorted[0],
        distribution: [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&q| (q, quantile(q)))
            .collect(),
    })
}

/// Block discretization of a torus density plus the exact scaling identity
/// between the two evaluations.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepDiscretization {
    /// Number of constant blocks detected (or supplied).
    pub n_blocks: usize,
    /// Padding constant `K = 2·⌈sup(1+|b_t|)⌉`.
    pub k_pad: usize,
    /// `F(j) = f(j/N)` tabulated on `[0, K·N)`.
    pub lattice_values: Vec<f64>,
    /// Torus-side count at block resolution.
    pub torus_value: f64,
    /// Lattice-side evaluation `Σ∏F(i-jb_t) / (4K²N²)` on the doubled grid.
    pub lattice_value: f64,
}

/// Discretizes a block-constant density and evaluates the identity
/// `Λ(f) = Λ(F) / (4K^{2d})` both ways (integer patterns, `d = 1`).
pub fn step_discretize(
    f: &Density,
    pattern: &Pattern,
    n_blocks: Option<usize>,
    k_pad: Option<usize>,
) -> Result<StepDiscretization> {
    if pattern.denominator() != 1 {
        return Err(precondition(
            "step discretization requires an integer pattern",
        ));
    }
    let n = f.n;
    let blocks = match n_blocks {
        Some(nb) => {
            if nb == 0 || n % nb != 0 {
                return Err(precondition("block count must divide the grid size"));
            }
            if !is_block_constant(f, nb) {
                return Err(precondition(format!(
                    "density is not constant on blocks of size {}",
                    n / nb
                )));
            }
            nb
        }
        None => (1..=n)
            .filter(|nb| n % nb == 0)
            .find(|&nb| is_block_constant(f, nb))
            .expect("n blocks of one cell are always constant"),
    };
    let width = n / blocks;
    let block_values: Vec<f64> = (0..blocks).map(|b| f.values[b * width]).collect();

    let k = k_pad.unwrap_or_else(|| {
        let sup = pattern
            .points_f64()
            .iter()
            .map(|b| 1.0 + b.abs())
            .fold(0.0, f64::max);
        2 * sup.ceil() as usize
    });
    if k == 0 {
        return Err(precondition("padding constant must be positive"));
    }
    let lattice_values: Vec<f64> = (0..k * blocks)
        .map(|j| block_values[j % blocks])
        .collect();

    // Torus side at block resolution (exact: f is constant on blocks).
    let coarse = Density {
        n: blocks,
        values: block_values.clone(),
    };
    let fs: Vec<&Density> = vec![&coarse; pattern.len()];
    let torus_value = crate::count::lambda(None, &fs, pattern)?.real();

    // Lattice side: cyclic weighted count of the K-periodized values on the
    // doubled grid [0, 2KN), scaled by 1/(4K²N²).
    let m = 2 * k * blocks;
    let per: Vec<f64> = (0..m).map(|j| block_values[j % blocks]).collect();
    let nums = pattern.numerators();
    let mut count = 0.0f64;
    for j in 0..m as i64 {
        let offs: Vec<usize> = nums
            .iter()
            .map(|&p| (j * p).rem_euclid(m as i64) as usize)
            .collect();
        for i in 0..m {
            let mut prod = 1.0;
            for &o in &offs {
                prod *= per[(i + m - o) % m];
            }
            count += prod;
        }
    }
    let lattice_value = count / (4.0 * (k * k) as f64 * (blocks * blocks) as f64);

    Ok(StepDiscretization {
        n_blocks: blocks,
        k_pad: k,
        lattice_values,
        torus_value,
        lattice_value,
    })
}

fn is_block_constant(f: &Density, blocks: usize) -> bool {
    let width = f.n / blocks;
    for b in 0..blocks {
        let v = f.values[b * width];
        for x in b * width..(b + 1) * width {
            if (f.values[x] - v).abs() > 1e-12 {
                return false;
            }
        }
    }
    true
}
