//! Random markets and technology trees for property tests and benchmarks.

use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::budget::Budget;
use crate::continuum::{is_stable_pseudo, PseudoMatching, Subpopulation};
use crate::error::Result;
use crate::market::{FirmId, FirmPreference, Market, WorkerPreference, WorkerSet};
use crate::rational::{ratio, Rational};
use crate::tree::TechnologyTree;

/// Each worker accepts a random subset of firms in random order.
pub fn random_worker_prefs<R: Rng + ?Sized>(
    rng: &mut R,
    n_workers: usize,
    n_firms: usize,
) -> Vec<WorkerPreference> {
    (0..n_workers)
        .map(|_| {
            let mut firms: Vec<FirmId> = (0..n_firms)
                .map(FirmId)
                .filter(|_| rng.gen_bool(0.75))
                .collect();
            firms.shuffle(rng);
            WorkerPreference::new(firms).expect("distinct firms")
        })
        .collect()
}

/// Up to `max_sets` distinct nonempty worker sets in random order.
pub fn random_firm_pref<R: Rng + ?Sized>(
    rng: &mut R,
    n_workers: usize,
    max_sets: usize,
) -> FirmPreference {
    let mut all: Vec<WorkerSet> = WorkerSet::full(n_workers)
        .subsets()
        .filter(|s| !s.is_empty())
        .collect();
    all.shuffle(rng);
    let len = rng.gen_range(0..=max_sets.min(all.len()));
    all.truncate(len);
    FirmPreference::new(all).expect("distinct nonempty sets")
}

/// A market with arbitrary preferences on both sides.
pub fn random_market<R: Rng + ?Sized>(
    rng: &mut R,
    n_workers: usize,
    n_firms: usize,
    max_sets: usize,
) -> Market {
    let firm_prefs = (0..n_firms)
        .map(|_| random_firm_pref(rng, n_workers, max_sets))
        .collect();
    Market::new(
        n_workers,
        firm_prefs,
        random_worker_prefs(rng, n_workers, n_firms),
    )
    .expect("valid market")
}

/// A market whose firms all have substitutable preferences, by rejection.
pub fn random_substitutable_market<R: Rng + ?Sized>(
    rng: &mut R,
    n_workers: usize,
    n_firms: usize,
    max_sets: usize,
) -> Market {
    let firm_prefs = (0..n_firms)
        .map(|_| loop {
            let pref = random_firm_pref(rng, n_workers, max_sets);
            if pref.is_substitutable() {
                break pref;
            }
        })
        .collect();
    Market::new(
        n_workers,
        firm_prefs,
        random_worker_prefs(rng, n_workers, n_firms),
    )
    .expect("valid market")
}

/// `p/q` with `q` drawn from `1..=max_den` and `0 <= p <= q`.
pub fn random_unit_rational<R: Rng + ?Sized>(rng: &mut R, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    ratio(rng.gen_range(0..=den), den)
}

pub fn random_subpopulation<R: Rng + ?Sized>(
    rng: &mut R,
    n_workers: usize,
    max_den: i64,
) -> Subpopulation {
    Subpopulation::new(
        (0..n_workers)
            .map(|_| random_unit_rational(rng, max_den))
            .collect(),
    )
    .expect("values in [0,1]")
}

fn scale(x: &Subpopulation, c: &Rational) -> Subpopulation {
    Subpopulation::new(x.values().iter().map(|v| v * c).collect()).expect("scaling by [0,1]")
}

fn mix(a: &Subpopulation, b: &Subpopulation, lambda: &Rational) -> Subpopulation {
    let rest = Rational::one() - lambda;
    Subpopulation::new(
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x * lambda + y * &rest)
            .collect(),
    )
    .expect("convex combination stays in [0,1]")
}

/// A stable pseudo-matching built from the market's stable discrete
/// matchings: two of them are mixed, each holder is scaled by a random
/// factor, and the candidate is kept only if it verifies. Gives up after
/// `attempts` candidates, or at once when the market has no stable matching.
pub fn random_stable_pseudo_matching<R: Rng + ?Sized>(
    rng: &mut R,
    market: &Market,
    attempts: usize,
    budget: &Budget,
) -> Result<Option<PseudoMatching>> {
    let stable = market.enumerate_stable_matchings(budget)?;
    if stable.is_empty() {
        return Ok(None);
    }
    let m = market.n_firms();
    for _ in 0..attempts {
        let a = PseudoMatching::from_discrete(stable.choose(rng).expect("nonempty"), m);
        let b = PseudoMatching::from_discrete(stable.choose(rng).expect("nonempty"), m);
        let lambda = random_unit_rational(rng, 4);
        let factor = |rng: &mut R| {
            if rng.gen_bool(0.5) {
                Rational::one()
            } else {
                random_unit_rational(rng, 6)
            }
        };
        let firms = market
            .firms()
            .map(|f| scale(&mix(a.firm(f), b.firm(f), &lambda), &factor(rng)))
            .collect();
        let unmatched = scale(&mix(a.unmatched(), b.unmatched(), &lambda), &factor(rng));
        let candidate = PseudoMatching::new(firms, unmatched)?;
        if is_stable_pseudo(market, &candidate)? {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// A uniformly random labelled tree on `n_vertices` vertices from a Prüfer
/// sequence, as undirected edges.
pub fn random_tree_edges<R: Rng + ?Sized>(rng: &mut R, n_vertices: usize) -> Vec<(usize, usize)> {
    if n_vertices < 2 {
        return Vec::new();
    }
    let code: Vec<usize> = (0..n_vertices - 2)
        .map(|_| rng.gen_range(0..n_vertices))
        .collect();
    let mut degree = vec![1; n_vertices];
    for &v in &code {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n_vertices - 1);
    for &v in &code {
        let leaf = (0..n_vertices)
            .find(|&u| degree[u] == 1)
            .expect("a leaf remains");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n_vertices).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// A specialist technology tree rooted at vertex 0. Every edge brings at
/// least one fresh worker and no worker appears on two edges; the remaining
/// workers up to `n_workers` are spread over random edges.
pub fn random_specialist_tree<R: Rng + ?Sized>(
    rng: &mut R,
    n_vertices: usize,
    n_workers: usize,
) -> TechnologyTree {
    assert!(n_vertices >= 1 && n_workers + 1 >= n_vertices);
    let undirected = random_tree_edges(rng, n_vertices);
    let mut adjacent = vec![Vec::new(); n_vertices];
    for &(a, b) in &undirected {
        adjacent[a].push(b);
        adjacent[b].push(a);
    }
    // Edge e gets worker e, then the extra workers land on random edges.
    let n_edges = n_vertices - 1;
    let mut engaged: Vec<WorkerSet> = (0..n_edges).map(|e| WorkerSet::from_workers([e])).collect();
    for w in n_edges..n_workers {
        if n_edges > 0 {
            engaged[rng.gen_range(0..n_edges)].insert(w);
        }
    }
    let mut sets = vec![WorkerSet::EMPTY; n_vertices];
    let mut edges = Vec::with_capacity(n_edges);
    let mut visited = vec![false; n_vertices];
    visited[0] = true;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &u in &adjacent[v] {
            if !visited[u] {
                visited[u] = true;
                sets[u] = sets[v].union(engaged[edges.len()]);
                edges.push((v, u));
                stack.push(u);
            }
        }
    }
    TechnologyTree::new(n_workers, sets, edges).expect("valid tree")
}

/// Each firm ranks a random nonempty selection of the tree's technologies.
pub fn random_unit_demand_market<R: Rng + ?Sized>(
    rng: &mut R,
    tree: &TechnologyTree,
    n_firms: usize,
) -> Market {
    let technologies: Vec<WorkerSet> = tree
        .vertices()
        .iter()
        .copied()
        .filter(|s| !s.is_empty())
        .collect();
    let firm_prefs = (0..n_firms)
        .map(|_| {
            let mut sets = technologies.clone();
            sets.shuffle(rng);
            let len = rng.gen_range(1..=sets.len().max(1)).min(sets.len());
            sets.truncate(len);
            FirmPreference::new(sets).expect("distinct technologies")
        })
        .collect();
    let n = tree.n_workers();
    Market::new(n, firm_prefs, random_worker_prefs(rng, n, n_firms)).expect("valid market")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prufer_trees_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..8 {
            let edges = random_tree_edges(&mut rng, n);
            assert_eq!(edges.len(), n.saturating_sub(1));
        }
    }

    #[test]
    fn specialist_trees_have_only_specialists() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let vertices = rng.gen_range(2..=6);
            let workers = rng.gen_range(vertices - 1..=6);
            let tree = random_specialist_tree(&mut rng, vertices, workers);
            assert!(tree.all_specialists());
            let market = random_unit_demand_market(&mut rng, &tree, 3);
            assert!(tree.supports_unit_demand(&market));
        }
    }
}
