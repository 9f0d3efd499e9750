//! Dev probe: slack distribution of the Gowers-Cauchy-Schwarz step for the
//! order-k and order-(k+1) pairings, on random instances.

use gowerslab::count::lambda;
use gowerslab::gowers::{cube_product, gowers_inner, Budget, WeightFunction};
use gowerslab::measure::GridMeasure;
use gowerslab::pattern::Pattern;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let budget = Budget::new(1 << 24);
    for n in [15usize, 16, 13] {
        for order in [2u32, 3] {
            let mut min_slack = f64::INFINITY;
            let mut min_ratio = f64::INFINITY;
            let mut fails = 0;
            for seed in 0..50u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
                let h0 = GridMeasure::random_uniform(n, 10 * seed).density();
                let h1 = GridMeasure::random_uniform(n, 10 * seed + 1).density();
                let f = GridMeasure::random_uniform(n, 10 * seed + 2).density();
                let g = WeightFunction::from_fn(n, |_, _| {
                    Complex64::from_polar(rng.gen::<f64>(), rng.gen::<f64>() * std::f64::consts::TAU)
                });
                let lam = lambda(
                    Some(&g),
                    &[&h0, &h1, &f],
                    &Pattern::progression(2),
                )
                .unwrap()
                .value
                .norm();
                let sup = h0.sup_norm() * h1.sup_norm();
                let inner = gowers_inner(&f.to_complex(), &g, order, &budget).unwrap();
                let rhs = sup * inner.norm().powf(0.25);
                let slack = rhs - lam;
                if slack < min_slack {
                    min_slack = slack;
                }
                if rhs > 0.0 && lam / rhs < min_ratio {
                    min_ratio = lam / rhs;
                }
                if slack < 0.0 {
                    fails += 1;
                }
                let _ = cube_product(&f.to_complex(), 0, &[1]);
            }
            println!(
                "n={n} pairing-order={order}: min slack {min_slack:.6}, max lhs/rhs {:.6}, failures {fails}/50",
                1.0 / min_ratio
            );
        }
    }
}
