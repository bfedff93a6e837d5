//! End-to-end checks of rounding, trees and file formats on random markets.

use std::collections::BTreeSet;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tumatch_core::budget::Budget;
use tumatch_core::continuum::{is_stable_pseudo, lift_to_discrete, PseudoMatching, Subpopulation};
use tumatch_core::demand::market_demand_type;
use tumatch_core::format::{MarketFile, MatchingFile, Names, TreeFile};
use tumatch_core::generate::{
    random_market, random_specialist_tree, random_substitutable_market, random_unit_demand_market,
    random_unit_rational,
};
use tumatch_core::lp::{enumerate_vertices, is_integral};
use tumatch_core::market::Market;
use tumatch_core::rational::Rational;
use tumatch_core::round::{
    build_system, find_integral_vertex, solve, vertex_to_matching, SolveOptions, SolveOutcome,
};
use tumatch_core::search::{verify_stable_continuum, SearchConfig};
use tumatch_core::tree::certify_specialist_market;
use tumatch_core::unimodular::{is_totally_unimodular, is_unimodular};

fn is_tu(market: &Market) -> bool {
    is_totally_unimodular(&market_demand_type(market).matrix(), &Budget::default())
        .unwrap()
        .is_totally_unimodular()
}

fn random_tu_market(rng: &mut ChaCha8Rng) -> Market {
    loop {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=3);
        let market = random_market(rng, n, m, 4);
        if is_tu(&market) {
            return market;
        }
    }
}

/// Convex combinations of two stable discrete matchings that happen to be
/// stable, giving fractional seeds.
fn fractional_seed(rng: &mut ChaCha8Rng, market: &Market) -> Option<PseudoMatching> {
    let stable = market
        .enumerate_stable_matchings(&Budget::default())
        .unwrap();
    for _ in 0..10 {
        let a = PseudoMatching::from_discrete(
            &stable[rng.gen_range(0..stable.len())],
            market.n_firms(),
        );
        let b = PseudoMatching::from_discrete(
            &stable[rng.gen_range(0..stable.len())],
            market.n_firms(),
        );
        let lambda = random_unit_rational(rng, 4);
        let rest = Rational::one() - &lambda;
        let mix = |x: &Subpopulation, y: &Subpopulation| {
            Subpopulation::new(
                x.values()
                    .iter()
                    .zip(y.values())
                    .map(|(p, q)| p * &lambda + q * &rest)
                    .collect(),
            )
            .unwrap()
        };
        let firms = market.firms().map(|f| mix(a.firm(f), b.firm(f))).collect();
        let m = PseudoMatching::new(firms, mix(a.unmatched(), b.unmatched())).unwrap();
        if !m.is_integral() && verify_stable_continuum(market, &m).unwrap() {
            return Some(m);
        }
    }
    None
}

#[test]
fn substitutable_markets_have_stable_matchings() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=3);
        let market = random_substitutable_market(&mut rng, n, m, 5);
        let stable = market
            .enumerate_stable_matchings(&Budget::default())
            .unwrap();
        assert!(!stable.is_empty(), "{market:?}");
        for mu in &stable {
            assert!(market.is_stable(mu).unwrap());
        }
    }
}

#[test]
fn solve_matches_the_oracle_on_tu_markets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..120 {
        let market = random_tu_market(&mut rng);
        let oracle = market
            .enumerate_stable_matchings(&Budget::default())
            .unwrap();
        // Alternate between the oracle lift and tâtonnement seeds.
        let options = SolveOptions {
            search: if i % 2 == 0 {
                SearchConfig::default()
            } else {
                SearchConfig::tatonnement_only(i)
            },
            ..SolveOptions::default()
        };
        match solve(&market, &options).unwrap() {
            SolveOutcome::Stable(report) => {
                assert!(oracle.contains(&report.matching), "{market:?}");
                assert!(is_unimodular(&report.system.b, &Budget::default()).unwrap());
                assert!(report.system.is_solution(&report.vertex).unwrap());
            }
            SolveOutcome::SearchExhausted { .. } => {
                assert!(i % 2 == 1, "oracle lift failed on {market:?}")
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}

#[test]
fn fractional_seeds_round_to_stable_matchings() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seeded = 0;
    while seeded < 40 {
        let market = random_tu_market(&mut rng);
        let Some(seed) = fractional_seed(&mut rng, &market) else {
            continue;
        };
        seeded += 1;
        let system = build_system(&market, &seed).unwrap();
        assert!(is_unimodular(&system.b, &Budget::default()).unwrap());
        if system.b.cols() <= 10 {
            let vertices =
                enumerate_vertices(&system.b, &system.rhs(), &Budget::default()).unwrap();
            assert!(vertices.iter().all(|z| is_integral(z)));
        }
        let z = find_integral_vertex(&system).unwrap();
        let m = vertex_to_matching(&system, &z).unwrap();
        assert!(m.is_matching() && m.is_integral());
        assert!(is_stable_pseudo(&market, &m).unwrap());
        assert!(market.is_stable(&lift_to_discrete(&m).unwrap()).unwrap());
    }
}

#[test]
fn network_matrices_are_totally_unimodular() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let budget = Budget::default();
    for _ in 0..60 {
        let vertices: usize = rng.gen_range(2..=6);
        let workers = rng.gen_range(vertices - 1..=6);
        let tree = random_specialist_tree(&mut rng, vertices, workers);
        let h = tree.network_matrix();
        let h_prime = tree.worker_network_matrix().unwrap();
        assert!(is_totally_unimodular(&h, &budget)
            .unwrap()
            .is_totally_unimodular());
        assert!(is_totally_unimodular(&h_prime, &budget)
            .unwrap()
            .is_totally_unimodular());
        // Removing repeated rows of H' leaves the rows of H.
        let h_rows: BTreeSet<Vec<i64>> = h.to_rows().into_iter().collect();
        let h_prime_rows: BTreeSet<Vec<i64>> = h_prime.to_rows().into_iter().collect();
        assert_eq!(h_rows, h_prime_rows);
        assert_eq!(h.rows(), h_rows.len());
    }
}

#[test]
fn specialist_markets_solve_end_to_end() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let budget = Budget::default();
    for _ in 0..60 {
        let vertices = rng.gen_range(2..=6);
        let workers = rng.gen_range(vertices - 1..=6);
        let tree = random_specialist_tree(&mut rng, vertices, workers);
        let firms = rng.gen_range(1..=3);
        let market = random_unit_demand_market(&mut rng, &tree, firms);
        let certificate = certify_specialist_market(&market, &tree, &budget).unwrap();
        assert!(certificate.verdict.is_totally_unimodular());
        match solve(&market, &SolveOptions::default()).unwrap() {
            SolveOutcome::Stable(report) => {
                let oracle = market.enumerate_stable_matchings(&budget).unwrap();
                assert!(oracle.contains(&report.matching));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}

#[test]
fn files_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=3);
        let market = random_market(&mut rng, n, m, 5);
        let names = Names::numbered(n, m);
        let file = MarketFile::from_market(&market, &names);
        let text = file.to_json();
        let parsed = MarketFile::parse(&text).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(parsed.to_json(), text);
        assert_eq!(parsed.to_market().unwrap(), market);

        let values = |rng: &mut ChaCha8Rng| {
            Subpopulation::new((0..n).map(|_| random_unit_rational(rng, 7)).collect()).unwrap()
        };
        let firms = (0..m).map(|_| values(&mut rng)).collect();
        let pseudo = PseudoMatching::new(firms, values(&mut rng)).unwrap();
        let file = MatchingFile::from_pseudo_matching(&pseudo, &names);
        let text = file.to_json();
        assert_eq!(MatchingFile::parse(&text).unwrap().to_json(), text);
        assert_eq!(
            MatchingFile::parse(&text)
                .unwrap()
                .to_pseudo_matching(&names)
                .unwrap(),
            pseudo
        );
        assert!(!text.contains('.'), "rationals must not print as decimals");

        let vertices = rng.gen_range(1..=n + 1);
        let tree = random_specialist_tree(&mut rng, vertices, n);
        let file = TreeFile::from_tree(&tree, &names.workers);
        let text = file.to_json();
        let parsed = TreeFile::parse(&text).unwrap();
        assert_eq!(parsed.to_json(), text);
        let back = parsed.to_tree().unwrap();
        assert_eq!(back.vertices(), tree.vertices());
        assert_eq!(back.edges(), tree.edges());
    }
}
