//! Dev probe 5: distribution of monotonicity violations in the ν-ladder.

use gowerslab::gowers::{u_norm, Budget, Route};
use gowerslab::measure::GridMeasure;
use gowerslab::mollify::MollifierLadder;

fn main() {
    let budget = Budget::default();
    let mut hist = [0usize; 12];
    let mut best: (usize, u64, Vec<f64>) = (99, 0, vec![]);
    for seed in 0..2000u64 {
        let m = GridMeasure::cantor_random(3, 2, 8, seed).unwrap();
        let ladder = MollifierLadder::new(m.n);
        let deepest = ladder.deepest_level().unwrap();
        let d = m.density();
        let mut norms: Vec<f64> = Vec::new();
        for level in 0..deepest {
            let nu = ladder.ladder_diff(&d, level);
            norms.push(
                u_norm(&nu.density.to_complex(), 2, Route::Fourier, &budget)
                    .unwrap()
                    .value,
            );
        }
        let violations = norms.windows(2).filter(|w| w[1] >= w[0]).count();
        hist[violations.min(11)] += 1;
        if violations < best.0 {
            best = (violations, seed, norms.clone());
        }
    }
    println!("violation histogram (0..): {hist:?}");
    println!("best: {} violations at seed {}", best.0, best.1);
    println!("norms: {:?}", best.2.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());

    // Same question for deeper tails only (levels >= 2), and for other (base, t).
    let mut hist2 = [0usize; 12];
    for seed in 0..2000u64 {
        let m = GridMeasure::cantor_random(3, 2, 8, seed).unwrap();
        let ladder = MollifierLadder::new(m.n);
        let deepest = ladder.deepest_level().unwrap();
        let d = m.density();
        let mut norms: Vec<f64> = Vec::new();
        for level in 2..deepest {
            let nu = ladder.ladder_diff(&d, level);
            norms.push(
                u_norm(&nu.density.to_complex(), 2, Route::Fourier, &budget)
                    .unwrap()
                    .value,
            );
        }
        let violations = norms.windows(2).filter(|w| w[1] >= w[0]).count();
        hist2[violations.min(11)] += 1;
    }
    println!("violation histogram from level 2: {hist2:?}");
}
