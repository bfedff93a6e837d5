//! Finding a stable matching of the continuum market.
//!
//! Stable continuum matchings always exist but no constructive route is
//! known, so this module tries candidate sources in order and only ever
//! returns a candidate that passes [`verify_stable_continuum`].

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::continuum::{
    choose_continuum, find_instability, Instability, PseudoMatching, Subpopulation,
};
use crate::error::{Error, Result};
use crate::market::{FirmId, Market};
use crate::rational::{ratio, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CandidateSource {
    /// A matching given by the caller.
    UserSupplied(PseudoMatching),
    /// Stable discrete matchings found by exhaustive enumeration, as integral
    /// continuum matchings.
    OracleLift,
    /// Damped reassignment toward blocking firms.
    Tatonnement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Reassignment rounds per tâtonnement run.
    pub max_iterations: usize,
    /// Tâtonnement runs; the first starts with everyone unmatched, the rest
    /// from random integral assignments.
    pub restarts: usize,
    pub seed: u64,
    pub sources: Vec<CandidateSource>,
    /// Limits for the exhaustive enumeration.
    pub budget: Budget,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_iterations: 2000,
            restarts: 8,
            seed: 0,
            sources: vec![CandidateSource::OracleLift, CandidateSource::Tatonnement],
            budget: Budget::default(),
        }
    }
}

impl SearchConfig {
    pub fn tatonnement_only(seed: u64) -> Self {
        SearchConfig {
            seed,
            sources: vec![CandidateSource::Tatonnement],
            ..SearchConfig::default()
        }
    }
}

/// A stable continuum matching: every worker type has total quantity one and
/// the pseudo-matching is stable.
pub fn verify_stable_continuum(market: &Market, m: &PseudoMatching) -> Result<bool> {
    let stable = find_instability(market, m)?.is_none();
    Ok(stable && m.is_matching())
}

/// Tries each configured source in order and returns the first verified
/// stable continuum matching.
pub fn find_stable_continuum(market: &Market, config: &SearchConfig) -> Result<PseudoMatching> {
    let mut attempts = 0;
    for source in &config.sources {
        match source {
            CandidateSource::UserSupplied(m) => {
                attempts += 1;
                if verify_stable_continuum(market, m)? {
                    return Ok(m.clone());
                }
            }
            CandidateSource::OracleLift => {
                let found = match market.enumerate_stable_matchings(&config.budget) {
                    Ok(found) => found,
                    Err(Error::BudgetExceeded { .. }) => continue,
                    Err(e) => return Err(e),
                };
                for mu in found {
                    attempts += 1;
                    let m = PseudoMatching::from_discrete(&mu, market.n_firms());
                    if verify_stable_continuum(market, &m)? {
                        return Ok(m);
                    }
                }
            }
            CandidateSource::Tatonnement => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                for restart in 0..config.restarts.max(1) {
                    attempts += 1;
                    let start = if restart == 0 {
                        all_unmatched(market)
                    } else {
                        random_assignment(market, &mut rng)
                    };
                    if let Some(m) = tatonnement(market, start, config.max_iterations)? {
                        if verify_stable_continuum(market, &m)? {
                            return Ok(m);
                        }
                    }
                }
            }
        }
    }
    Err(Error::SearchExhausted { attempts })
}

fn all_unmatched(market: &Market) -> PseudoMatching {
    let n = market.n_workers();
    PseudoMatching::new(
        vec![Subpopulation::zeros(n); market.n_firms()],
        Subpopulation::from_set(crate::market::WorkerSet::full(n), n),
    )
    .expect("consistent dimensions")
}

/// Each worker placed wholly at a uniformly chosen acceptable firm or left
/// unmatched.
fn random_assignment(market: &Market, rng: &mut ChaCha8Rng) -> PseudoMatching {
    let n = market.n_workers();
    let mut firms = vec![vec![Rational::zero(); n]; market.n_firms()];
    let mut unmatched = vec![Rational::zero(); n];
    for (w, pref) in market.worker_prefs().iter().enumerate() {
        let mut options: Vec<Option<FirmId>> =
            pref.acceptable().iter().copied().map(Some).collect();
        options.push(None);
        match options.choose(rng).copied().flatten() {
            Some(f) => firms[f.0][w] = Rational::one(),
            None => unmatched[w] = Rational::one(),
        }
    }
    let firms = firms
        .into_iter()
        .map(|v| Subpopulation::new(v).expect("entries are 0 or 1"))
        .collect();
    PseudoMatching::new(
        firms,
        Subpopulation::new(unmatched).expect("entries are 0 or 1"),
    )
    .expect("consistent dimensions")
}

/// Sends mass a firm would not keep, or that sits at a firm the worker finds
/// unacceptable, to the null firm.
fn settle(market: &Market, m: &PseudoMatching) -> PseudoMatching {
    let mut unmatched = m.unmatched().values().to_vec();
    let mut firms = Vec::with_capacity(market.n_firms());
    for f in market.firms() {
        let mut held = m.firm(f).values().to_vec();
        for (w, x) in held.iter_mut().enumerate() {
            if !market.worker_pref(w).is_acceptable(f) && !x.is_zero() {
                unmatched[w] += &*x;
                *x = Rational::zero();
            }
        }
        let held = Subpopulation::new(held).expect("entries stay in [0,1]");
        let (kept, _) = choose_continuum(market.firm_pref(f), &held);
        for (w, u) in unmatched.iter_mut().enumerate() {
            *u += held.get(w) - kept.get(w);
        }
        firms.push(kept);
    }
    PseudoMatching::new(
        firms,
        Subpopulation::new(unmatched).expect("column sums stay 1"),
    )
    .expect("consistent dimensions")
}

/// Iterates settle-then-block moves from `start`. Each move shifts up to
/// `step` of every worker type in the blocking set to the blocking firm,
/// taken from the holders the workers like least. The step halves whenever a
/// state repeats.
fn tatonnement(
    market: &Market,
    start: PseudoMatching,
    max_iterations: usize,
) -> Result<Option<PseudoMatching>> {
    let min_step = ratio(1, 1 << 12);
    let mut step = Rational::one();
    let mut seen = HashSet::new();
    let mut state = start;
    for _ in 0..max_iterations {
        state = settle(market, &state);
        let witness = match find_instability(market, &state)? {
            None => return Ok(Some(state)),
            Some(Instability::Blocked(w)) => w,
            Some(other) => {
                return Err(Error::Internal(format!(
                    "settled matching is not individually rational: {other:?}"
                )))
            }
        };
        if !seen.insert(state.clone()) {
            step /= ratio(2, 1);
            if step < min_step {
                return Ok(None);
            }
            seen.clear();
        }
        state = shift_toward(market, &state, witness.firm, &witness.improvement, &step);
    }
    Ok(None)
}

/// Denominator of the grid that tâtonnement moves are rounded to. Starts are
/// integral, so every state stays on the grid and denominators stay small.
const GRID: i64 = 1 << 20;

/// Rounds toward zero onto the grid.
fn on_grid(x: Rational) -> Rational {
    (x * ratio(GRID, 1)).trunc() / ratio(GRID, 1)
}

/// Moves `f` a fraction `step` of the way toward `target`. Extra mass is
/// taken from the holders the workers like least among those below `f`;
/// released mass goes to the null firm.
fn shift_toward(
    market: &Market,
    m: &PseudoMatching,
    f: FirmId,
    target: &Subpopulation,
    step: &Rational,
) -> PseudoMatching {
    let mut firms: Vec<Vec<Rational>> = market
        .firms()
        .map(|g| m.firm(g).values().to_vec())
        .collect();
    let mut unmatched = m.unmatched().values().to_vec();
    for w in 0..market.n_workers() {
        let current = m.firm(f).get(w);
        let delta = on_grid((target.get(w) - current) * step);
        if delta.is_negative() {
            unmatched[w] -= &delta;
            firms[f.0][w] += &delta;
            continue;
        }
        let pref = market.worker_pref(w);
        let mut below: Vec<Option<FirmId>> = market
            .firms()
            .map(Some)
            .chain(std::iter::once(None))
            .filter(|&g| pref.prefers(Some(f), g))
            .collect();
        below.sort_by_key(|&g| std::cmp::Reverse(pref.rank(g)));
        let mut need = delta.clone();
        for g in below {
            if need.is_zero() {
                break;
            }
            let slot = match g {
                Some(g) => &mut firms[g.0][w],
                None => &mut unmatched[w],
            };
            let take = if *slot < need {
                slot.clone()
            } else {
                need.clone()
            };
            *slot -= &take;
            need -= &take;
        }
        firms[f.0][w] += delta - need;
    }
    PseudoMatching::new(
        firms
            .into_iter()
            .map(|v| Subpopulation::new(v).expect("entries stay in [0,1]"))
            .collect(),
        Subpopulation::new(unmatched).expect("entries stay in [0,1]"),
    )
    .expect("consistent dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::market::WorkerSet;

    fn half(market: &Market) -> PseudoMatching {
        let n = market.n_workers();
        PseudoMatching::new(
            vec![Subpopulation::new(vec![ratio(1, 2); n]).unwrap(); 2],
            Subpopulation::zeros(n),
        )
        .unwrap()
    }

    #[test]
    fn verifies_known_stable_matchings() {
        let market = fixtures::no_stable_complements();
        assert!(verify_stable_continuum(&market, &half(&market)).unwrap());

        let market = fixtures::three_worker_market();
        let m = PseudoMatching::new(
            vec![
                Subpopulation::new(vec![ratio(1, 2); 3]).unwrap(),
                Subpopulation::new(vec![ratio(1, 2), ratio(1, 2), ratio(0, 1)]).unwrap(),
            ],
            Subpopulation::new(vec![ratio(0, 1), ratio(0, 1), ratio(1, 2)]).unwrap(),
        )
        .unwrap();
        assert!(verify_stable_continuum(&market, &m).unwrap());
    }

    #[test]
    fn pseudo_matchings_are_not_matchings() {
        let market = fixtures::three_worker_market();
        let pseudo = PseudoMatching::new(
            vec![
                Subpopulation::new(vec![ratio(3, 5), ratio(3, 5), ratio(3, 10)]).unwrap(),
                Subpopulation::new(vec![ratio(3, 10), ratio(3, 10), ratio(0, 1)]).unwrap(),
            ],
            Subpopulation::zeros(3),
        )
        .unwrap();
        assert!(!verify_stable_continuum(&market, &pseudo).unwrap());
    }

    #[test]
    fn unacceptable_mass_fails_verification() {
        let market = fixtures::three_worker_market();
        let m = PseudoMatching::new(
            vec![
                Subpopulation::zeros(3),
                Subpopulation::from_set(WorkerSet::from_workers([0, 1, 2]), 3),
            ],
            Subpopulation::zeros(3),
        )
        .unwrap();
        assert!(!verify_stable_continuum(&market, &m).unwrap());
    }

    #[test]
    fn lifts_oracle_matching() {
        let market = fixtures::stable_complements();
        let m = find_stable_continuum(&market, &SearchConfig::default()).unwrap();
        assert!(verify_stable_continuum(&market, &m).unwrap());
        assert!(m.is_integral());
        assert_eq!(
            m.firm(FirmId(1)),
            &Subpopulation::from_set(WorkerSet::full(2), 2)
        );
    }

    #[test]
    fn tatonnement_finds_stable_matchings() {
        for market in [
            fixtures::stable_complements(),
            fixtures::three_worker_market(),
            fixtures::specialist_market(),
        ] {
            let m = find_stable_continuum(&market, &SearchConfig::tatonnement_only(7)).unwrap();
            assert!(verify_stable_continuum(&market, &m).unwrap());
        }
    }

    #[test]
    fn no_stable_discrete_matching_means_no_lift() {
        let market = fixtures::no_stable_complements();
        let config = SearchConfig {
            sources: vec![CandidateSource::OracleLift],
            ..SearchConfig::default()
        };
        assert!(matches!(
            find_stable_continuum(&market, &config),
            Err(Error::SearchExhausted { .. })
        ));
        match find_stable_continuum(&market, &SearchConfig::default()) {
            Ok(m) => assert_eq!(m, half(&market)),
            Err(e) => assert!(matches!(e, Error::SearchExhausted { .. })),
        }
    }

    #[test]
    fn user_supplied_is_verified() {
        let market = fixtures::no_stable_complements();
        let config = SearchConfig {
            sources: vec![CandidateSource::UserSupplied(half(&market))],
            ..SearchConfig::default()
        };
        assert_eq!(
            find_stable_continuum(&market, &config).unwrap(),
            half(&market)
        );
        let bad = SearchConfig {
            sources: vec![CandidateSource::UserSupplied(all_unmatched(&market))],
            ..SearchConfig::default()
        };
        assert!(find_stable_continuum(&market, &bad).is_err());
    }

    #[test]
    fn empty_market_leaves_everyone_unmatched() {
        let market = Market::new(3, vec![], vec![Default::default(); 3]).unwrap();
        let m = find_stable_continuum(&market, &SearchConfig::tatonnement_only(1)).unwrap();
        assert_eq!(m, all_unmatched(&market));
    }

    #[test]
    fn search_is_deterministic() {
        let market = fixtures::specialist_market();
        let config = SearchConfig::tatonnement_only(42);
        assert_eq!(
            find_stable_continuum(&market, &config).unwrap(),
            find_stable_continuum(&market, &config).unwrap()
        );
    }
}
