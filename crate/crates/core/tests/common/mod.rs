#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selectorate_core::{solve_challenger, FunctionFamily, PolityParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// A random polity with `W < S`, a random power family, and a solvable challenger program.
pub fn random_feasible(rng: &mut ChaCha8Rng) -> (PolityParams, FunctionFamily) {
    loop {
        let selectorate = rng.gen_range(1_000.0..20_000.0);
        let params = PolityParams {
            n_residents: selectorate * rng.gen_range(1.0..2.0),
            selectorate,
            coalition: rng.gen_range(10.0..0.9 * selectorate),
            base_revenue: rng.gen_range(0.0..5_000.0),
            tax_rate: rng.gen_range(0.1..0.9),
            public_price: rng.gen_range(50.0..500.0),
            discount: rng.gen_range(0.05..0.95),
        };
        let fns = FunctionFamily {
            v_exponent: rng.gen_range(0.3..0.7),
            u_exponent: rng.gen_range(0.3..0.7),
            phi_exponent: rng.gen_range(0.3..0.7),
        };
        if solve_challenger(&params, &fns).is_ok() {
            return (params, fns);
        }
    }
}
