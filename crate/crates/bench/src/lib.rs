//! Seeded workloads shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tumatch_core::budget::Budget;
use tumatch_core::demand::market_demand_type;
use tumatch_core::generate::random_market;
use tumatch_core::market::Market;
use tumatch_core::unimodular::is_totally_unimodular;

/// `count` random markets with `n_workers` workers and up to three firms,
/// drawn from a fixed seed.
pub fn random_markets(seed: u64, count: usize, n_workers: usize) -> Vec<Market> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let firms = rng.gen_range(1..=3);
            random_market(&mut rng, n_workers, firms, 4)
        })
        .collect()
}

/// Like [`random_markets`], keeping only markets whose demand type is
/// totally unimodular.
pub fn random_tu_markets(seed: u64, count: usize, n_workers: usize) -> Vec<Market> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let firms = rng.gen_range(1..=3);
        let market = random_market(&mut rng, n_workers, firms, 4);
        let verdict =
            is_totally_unimodular(&market_demand_type(&market).matrix(), &Budget::default())
                .expect("within budget");
        if verdict.is_totally_unimodular() {
            out.push(market);
        }
    }
    out
}
