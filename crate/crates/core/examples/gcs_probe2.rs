//! Dev probe 2: GCS slack in low-cancellation regimes.

use gowerslab::count::lambda;
use gowerslab::gowers::{gowers_inner, Budget, WeightFunction};
use gowerslab::measure::{Density, GridMeasure};
use gowerslab::pattern::Pattern;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check(tag: &str, n: usize, h0: &Density, h1: &Density, f: &Density, g: &WeightFunction) {
    let budget = Budget::new(1 << 24);
    let lam = lambda(Some(g), &[h0, h1, f], &Pattern::progression(2))
        .unwrap()
        .value
        .norm();
    let sup = h0.sup_norm() * h1.sup_norm();
    for order in [2u32, 3] {
        let inner = gowers_inner(&f.to_complex(), g, order, &budget).unwrap();
        let rhs = sup * inner.norm().powf(0.25);
        println!(
            "{tag} n={n} order={order}: lhs {lam:.6} rhs {rhs:.6} slack {:+.6}",
            rhs - lam
        );
    }
}

fn main() {
    // g = 1, identical self-correlated density in all slots.
    for n in [15usize, 16] {
        let spike = {
            // Half-interval indicator: strong additive structure.
            let mut w = vec![0.0; n];
            for x in 0..n / 2 + 1 {
                w[x] = n as f64 / (n / 2 + 1) as f64;
            }
            Density { n, values: w }
        };
        check("g=1 halfint", n, &spike, &spike, &spike, &WeightFunction::one(n));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pm = WeightFunction::from_fn(n, |_, _| {
            Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)
        });
        check("g=+-1 halfint", n, &spike, &spike, &spike, &pm);

        // Dirac-ish concentration.
        let dirac = GridMeasure::dirac(n, 0).density();
        check("g=1 dirac", n, &dirac, &dirac, &dirac, &WeightFunction::one(n));

        // AP-supported density: max count per sup norm.
        let mut w = vec![0.0; n];
        let ap = [1usize, 4, 7, 10, 13];
        for &x in &ap {
            w[x % n] = n as f64 / ap.len() as f64;
        }
        let apd = Density { n, values: w };
        check("g=1 ap-set", n, &apd, &apd, &apd, &WeightFunction::one(n));

        // Random nonneg with indicator weight on a band of r.
        for seed in 0..10u64 {
            let h0 = GridMeasure::random_uniform(n, 500 + seed).density();
            let h1 = GridMeasure::random_uniform(n, 600 + seed).density();
            let f = GridMeasure::random_uniform(n, 700 + seed).density();
            let band = WeightFunction::from_fn(n, |_, r| {
                Complex64::new(if r < n / 3 { 1.0 } else { 0.0 }, 0.0)
            });
            check(&format!("g=band s{seed}"), n, &h0, &h1, &f, &band);
        }
    }
}
