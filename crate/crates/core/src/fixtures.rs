//! Small hand-written markets used throughout the documentation and tests.
//!
//! Worker `i` and firm `j` here are index `i-1` and `j-1` in the library.

use crate::market::{FirmId, FirmPreference, Market, WorkerPreference, WorkerSet};
use crate::tree::TechnologyTree;

fn set(ws: &[usize]) -> WorkerSet {
    WorkerSet::from_workers(ws.iter().map(|w| w - 1))
}

fn firm(sets: &[&[usize]]) -> FirmPreference {
    FirmPreference::new(sets.iter().map(|s| set(s)).collect()).expect("valid firm preference")
}

fn worker(firms: &[usize]) -> WorkerPreference {
    WorkerPreference::new(firms.iter().map(|f| FirmId(f - 1)).collect())
        .expect("valid worker preference")
}

/// Two firms, two workers, and no stable matching: f1 wants both workers as a
/// team while f2 takes either one.
pub fn no_stable_complements() -> Market {
    Market::new(
        2,
        vec![firm(&[&[1, 2]]), firm(&[&[1], &[2]])],
        vec![worker(&[1, 2]), worker(&[2, 1])],
    )
    .expect("valid market")
}

/// Same as [`no_stable_complements`] except that f2 also ranks the pair
/// first; f2 hiring both workers is stable.
pub fn stable_complements() -> Market {
    Market::new(
        2,
        vec![firm(&[&[1, 2]]), firm(&[&[1, 2], &[1], &[2]])],
        vec![worker(&[1, 2]), worker(&[2, 1])],
    )
    .expect("valid market")
}

/// Three firms and three workers whose demand type is unimodular but not
/// totally unimodular, and which has no stable matching.
pub fn unimodular_not_tu() -> Market {
    Market::new(
        3,
        vec![firm(&[&[1, 2, 3]]), firm(&[&[1], &[2]]), firm(&[&[2, 3]])],
        vec![worker(&[1, 2]), worker(&[2, 1, 3]), worker(&[1, 3])],
    )
    .expect("valid market")
}

/// Two firms with substitutable preferences whose joint demand type is not
/// totally unimodular. Worker preferences are arbitrary.
pub fn substitutable_not_tu() -> Market {
    Market::new(
        2,
        vec![firm(&[&[1, 2], &[1], &[2]]), firm(&[&[1], &[2]])],
        vec![worker(&[1, 2]), worker(&[2, 1])],
    )
    .expect("valid market")
}

/// Two firms and three workers with a totally unimodular demand type and a
/// stable fractional matching that rounds to a stable integral one.
pub fn three_worker_market() -> Market {
    Market::new(
        3,
        vec![firm(&[&[1, 2], &[3]]), firm(&[&[1, 2]])],
        vec![worker(&[1, 2]), worker(&[2, 1]), worker(&[1])],
    )
    .expect("valid market")
}

/// Technology tree with `v1 = {w1,w2}` and the chain `v2 = {w3}`,
/// `v3 = {w3,w4}` below the root. Every worker is a specialist.
pub fn specialist_tree() -> TechnologyTree {
    TechnologyTree::new(
        4,
        vec![set(&[]), set(&[1, 2]), set(&[3]), set(&[3, 4])],
        vec![(0, 1), (0, 2), (2, 3)],
    )
    .expect("valid tree")
}

/// Unit-demand preferences over [`specialist_tree`]. Worker preferences are
/// arbitrary.
pub fn specialist_market() -> Market {
    Market::new(
        4,
        vec![firm(&[&[1, 2], &[3]]), firm(&[&[3, 4], &[1, 2]])],
        vec![
            worker(&[2, 1]),
            worker(&[1, 2]),
            worker(&[1, 2]),
            worker(&[2, 1]),
        ],
    )
    .expect("valid market")
}

/// A tree for [`no_stable_complements`] with `v1 = {w1}`, `v2 = {w2}` and
/// `v3 = {w1,w2}` below `v2`; w1 engages in two upgrades.
pub fn chain_tree_with_generalist() -> TechnologyTree {
    TechnologyTree::new(
        2,
        vec![set(&[]), set(&[1]), set(&[2]), set(&[1, 2])],
        vec![(0, 1), (0, 2), (2, 3)],
    )
    .expect("valid tree")
}

/// A star tree for [`no_stable_complements`]; w1 engages in `v0v1` and `v0v3`.
pub fn star_tree_with_generalist() -> TechnologyTree {
    TechnologyTree::new(
        2,
        vec![set(&[]), set(&[1]), set(&[2]), set(&[1, 2])],
        vec![(0, 1), (0, 2), (0, 3)],
    )
    .expect("valid tree")
}
