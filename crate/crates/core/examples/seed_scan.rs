//! Dev probe 4: find seeds where the telescoping ladder is strictly
//! decreasing with a negative fitted slope, and where the other pinned
//! random-Cantor behaviours hold simultaneously.

use gowerslab::count::lambda_ladder;
use gowerslab::dimension::{decay_fit, DecaySeries};
use gowerslab::gowers::{u_norm, Budget, Route};
use gowerslab::measure::GridMeasure;
use gowerslab::mollify::MollifierLadder;
use gowerslab::pattern::Pattern;

fn main() {
    let budget = Budget::default();
    let mut found = 0;
    for seed in 0..4000u64 {
        let m = GridMeasure::cantor_random(3, 2, 8, seed).unwrap();
        let ladder = MollifierLadder::new(m.n);
        let deepest = ladder.deepest_level().unwrap();
        let d = m.density();
        let mut norms: Vec<f64> = Vec::new();
        let mut ok = true;
        for level in 0..deepest {
            let nu = ladder.ladder_diff(&d, level);
            let v = u_norm(&nu.density.to_complex(), 2, Route::Fourier, &budget)
                .unwrap()
                .value;
            if let Some(&prev) = norms.last() {
                if v >= prev {
                    ok = false;
                    break;
                }
            }
            norms.push(v);
        }
        if !ok {
            continue;
        }
        // slope check
        let pts: Vec<(f64, f64)> = norms
            .iter()
            .enumerate()
            .map(|(l, v)| (l as f64, v.log2()))
            .collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let beta = decay_fit(&DecaySeries::order1(&m.fourier())).unwrap().beta_hat;
        let lad = lambda_ladder(None, &m, &Pattern::progression(2), 10).unwrap();
        let last = lad.rows.last().unwrap().lambda;
        println!(
            "seed {seed}: strict ok, slope {slope:.4}, beta {beta:.4}, lambda_last {last:.4}, ratio {:?}, converged {}",
            lad.ratio.map(|r| (r * 1e4).round() / 1e4),
            lad.converged
        );
        println!("  norms: {:?}", norms.iter().map(|v| (v * 1e6).round() / 1e6).collect::<Vec<_>>());
        found += 1;
        if found >= 6 {
            break;
        }
    }
    if found == 0 {
        println!("no strictly decreasing seed in range");
    }
}
