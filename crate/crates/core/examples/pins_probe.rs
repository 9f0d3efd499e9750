//! Dev probe 3: empirical values to freeze as regression baselines.

use gowerslab::count::{lambda_ladder, support_diagnostic};
use gowerslab::dimension::{decay_fit, frostman_fit, DecaySeries};
use gowerslab::discrete::{behrend, normalized_nontrivial, varnavides_scan, CountMode, LatticePattern};
use gowerslab::gowers::{u_norm, Budget, Route};
use gowerslab::measure::GridMeasure;
use gowerslab::mollify::MollifierLadder;
use gowerslab::pattern::Pattern;

fn main() {
    // --- random Cantor seed scan: strict U^2 ladder decrease + decay fit.
    println!("== random cantor (3,2,8,seed) ==");
    for seed in 0..8u64 {
        let m = GridMeasure::cantor_random(3, 2, 8, seed).unwrap();
        let ladder = MollifierLadder::new(m.n);
        let deepest = ladder.deepest_level().unwrap();
        let d = m.density();
        let mut norms = Vec::new();
        for level in 0..deepest {
            let nu = ladder.ladder_diff(&d, level);
            let v = u_norm(&nu.density.to_complex(), 2, Route::Fourier, &Budget::default())
                .unwrap()
                .value;
            norms.push(v);
        }
        let strict = norms.windows(2).all(|w| w[1] < w[0]);
        let beta = decay_fit(&DecaySeries::order1(&m.fourier())).unwrap().beta_hat;
        println!(
            "seed {seed}: deepest {deepest}, strict_decreasing {strict}, beta {beta:.4}, norms {:?}",
            norms.iter().map(|v| (v * 1e6).round() / 1e6).collect::<Vec<_>>()
        );
    }

    // --- middle-thirds frostman alpha at 3^j radii and 2^j radii.
    let cantor = GridMeasure::cantor_deterministic(3, &[0, 2], 8).unwrap();
    let r3: Vec<usize> = (1..=7).map(|j| 3usize.pow(j)).collect();
    let r2: Vec<usize> = (1..=10).map(|j| 2usize.pow(j)).collect();
    let a3 = frostman_fit(&cantor, &r3).unwrap();
    let a2 = frostman_fit(&cantor, &r2).unwrap();
    println!("cantor alpha (3^j radii): {:.4}; (2^j radii): {:.4}", a3.alpha_hat, a2.alpha_hat);

    // --- L-infinity growth of mollified middle-thirds.
    let ladder = MollifierLadder::new(cantor.n);
    let d = cantor.density();
    let mut pts = Vec::new();
    for level in 0..=ladder.deepest_level().unwrap() {
        let sup = ladder.mollify(&d, level).density.sup_norm();
        pts.push((level as f64, sup.log2()));
        print!("L{level}:{sup:.3} ");
    }
    println!();
    let nfit = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (nfit * sxy - sx * sy) / (nfit * sxx - sx * sx);
    println!("linf growth slope {slope:.4} vs 1-alpha+0.1 = {:.4}", 1.0 - a3.alpha_hat + 0.1);

    // --- leakage ladder for middle-thirds (levels 6 grid).
    let c6 = GridMeasure::cantor_deterministic(3, &[0, 2], 6).unwrap();
    for level in [2u32, 3, 4, 5, 6] {
        let diag = support_diagnostic(&c6, &Pattern::progression(2), level, 2.0 / c6.n as f64, 0.02).unwrap();
        println!("leakage L{level}: {:.6} trivial {:.6}", diag.leakage, diag.trivial_mass);
    }

    // --- lambda ladder for random cantor & middle thirds.
    for seed in [2u64, 3] {
        let m = GridMeasure::cantor_random(3, 2, 8, seed).unwrap();
        let lad = lambda_ladder(None, &m, &Pattern::progression(2), 10).unwrap();
        let last = lad.rows.last().unwrap();
        println!(
            "random cantor seed {seed} ladder: last level {} lambda {:.6} ratio {:?} converged {}",
            last.level, last.lambda, lad.ratio, lad.converged
        );
        for r in &lad.rows {
            print!("({},{:.6},{:?}) ", r.level, r.lambda, r.diff.map(|d| (d * 1e6).round() / 1e6));
        }
        println!();
    }
    let lad = lambda_ladder(None, &cantor, &Pattern::progression(2), 10).unwrap();
    let last = lad.rows.last().unwrap();
    println!("middle-thirds ladder: last lambda {:.6} ratio {:?}", last.lambda, lad.ratio);

    // --- varnavides at 256.
    let ap3 = LatticePattern::from_pattern(&Pattern::progression(2));
    let scan = varnavides_scan(256, 0.5, &ap3, 200, 424242).unwrap();
    println!("varnavides(256, 0.5, 200 trials, seed 424242): min {:.8} dist {:?}", scan.min_normalized_count, scan.distribution);

    // --- behrend(256) cyclic nontrivial vs random ensemble at same density.
    let b = behrend(256);
    let bnorm = normalized_nontrivial(&b, &ap3, CountMode::Cyclic).unwrap();
    let scan_b = varnavides_scan(256, b.density(), &ap3, 50, 31337).unwrap();
    println!(
        "behrend(256): |B| {} density {:.4} normalized {:.8} vs random min {:.8}",
        b.len(),
        b.density(),
        bnorm,
        scan_b.min_normalized_count
    );
}
