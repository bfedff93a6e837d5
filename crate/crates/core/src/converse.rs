//! Searching for worker preferences that leave a market without a stable
//! matching.
//!
//! Total unimodularity of the firms' demand type is sufficient for a stable
//! matching under every worker profile. Whether a demand type that fails it
//! always admits a bad profile is open; this harness looks for one by brute
//! force and proves nothing when it finds none.

use rand::Rng;

use crate::budget::Budget;
use crate::error::Result;
use crate::generate::random_worker_prefs;
use crate::market::{FirmId, Market, WorkerPreference};

/// All strict rankings of every subset of `n_firms` firms.
pub fn all_worker_preferences(n_firms: usize) -> Vec<WorkerPreference> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    while let Some(prefix) = frontier.pop() {
        for f in (0..n_firms).map(FirmId) {
            if !prefix.contains(&f) {
                let mut next: Vec<FirmId> = prefix.clone();
                next.push(f);
                out.push(next.clone());
                frontier.push(next);
            }
        }
    }
    out.sort();
    out.into_iter()
        .map(|p| WorkerPreference::new(p).expect("distinct firms"))
        .collect()
}

/// Number of worker profiles an exhaustive search would visit.
pub fn profile_count(n_workers: usize, n_firms: usize) -> u128 {
    let per_worker = all_worker_preferences(n_firms).len() as u128;
    (0..n_workers).fold(1u128, |acc, _| acc.saturating_mul(per_worker))
}

/// Keeps the firms' preferences and tries worker profiles until one has no
/// stable matching. Every profile is tried when there are at most
/// `max_profiles`; otherwise `max_profiles` random ones are.
pub fn find_unstable_profile<R: Rng + ?Sized>(
    market: &Market,
    rng: &mut R,
    max_profiles: u128,
    budget: &Budget,
) -> Result<Option<Market>> {
    let (n, m) = (market.n_workers(), market.n_firms());
    let firm_prefs = market.firm_prefs().to_vec();
    let unstable = |workers: Vec<WorkerPreference>| -> Result<Option<Market>> {
        let candidate = Market::new(n, firm_prefs.clone(), workers)?;
        let found = candidate.enumerate_stable_matchings(budget)?;
        Ok(found.is_empty().then_some(candidate))
    };
    if profile_count(n, m) <= max_profiles {
        let options = all_worker_preferences(m);
        let mut digits = vec![0usize; n];
        loop {
            let workers = digits.iter().map(|&d| options[d].clone()).collect();
            if let Some(found) = unstable(workers)? {
                return Ok(Some(found));
            }
            let Some(i) = digits.iter().rposition(|&d| d + 1 < options.len()) else {
                return Ok(None);
            };
            digits[i] += 1;
            for d in &mut digits[i + 1..] {
                *d = 0;
            }
        }
    }
    for _ in 0..max_profiles {
        if let Some(found) = unstable(random_worker_prefs(rng, n, m))? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}
