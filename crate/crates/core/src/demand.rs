//! Demand types: the changes in a firm's choice as availability grows.

use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::market::{FirmPreference, Market, WorkerSet};
use crate::matrix::IntMatrix;

/// Difference of two choice indicator vectors; entries in `{-1, 0, 1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DemandVector(Vec<i64>);

impl DemandVector {
    /// `ind(gained) - ind(lost)` over `n` workers.
    pub fn difference(gained: WorkerSet, lost: WorkerSet, n: usize) -> Self {
        DemandVector(
            (0..n)
                .map(|w| i64::from(gained.contains(w)) - i64::from(lost.contains(w)))
                .collect(),
        )
    }

    pub fn from_entries(entries: Vec<i64>) -> Result<Self> {
        if entries.iter().any(|x| x.abs() > 1) {
            return Err(Error::InvalidMatrix(format!(
                "demand vector {entries:?} has an entry outside {{-1,0,1}}"
            )));
        }
        if entries.iter().all(|&x| x == 0) {
            return Err(Error::InvalidMatrix("demand vectors are nonzero".into()));
        }
        Ok(DemandVector(entries))
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn negated(&self) -> DemandVector {
        DemandVector(self.0.iter().map(|x| -x).collect())
    }
}

impl fmt::Debug for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A set of demand vectors over a fixed number of workers, kept deduplicated
/// in descending lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DemandType {
    n_workers: usize,
    vectors: Vec<DemandVector>,
}

impl DemandType {
    pub fn new(n_workers: usize, vectors: impl IntoIterator<Item = DemandVector>) -> Result<Self> {
        let mut vectors: Vec<DemandVector> = vectors.into_iter().collect();
        if let Some(bad) = vectors.iter().find(|v| v.0.len() != n_workers) {
            return Err(Error::InvalidMatrix(format!(
                "demand vector {bad} does not have {n_workers} entries"
            )));
        }
        vectors.sort_by(|a, b| b.cmp(a));
        vectors.dedup();
        Ok(DemandType { n_workers, vectors })
    }

    pub fn empty(n_workers: usize) -> Self {
        DemandType {
            n_workers,
            vectors: Vec::new(),
        }
    }

    pub fn n_workers(&self) -> usize {
        self.n_workers
    }

    pub fn vectors(&self) -> &[DemandVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &DemandVector) -> bool {
        self.vectors
            .binary_search_by_key(&Reverse(v), Reverse)
            .is_ok()
    }

    pub fn union(&self, other: &DemandType) -> DemandType {
        assert_eq!(self.n_workers, other.n_workers);
        DemandType::new(
            self.n_workers,
            self.vectors.iter().chain(&other.vectors).cloned(),
        )
        .expect("same dimension")
    }

    /// The `n_workers`x`len` matrix with the vectors as columns.
    pub fn matrix(&self) -> IntMatrix {
        let columns: Vec<Vec<i64>> = self.vectors.iter().map(|v| v.0.clone()).collect();
        IntMatrix::from_columns(self.n_workers, &columns).expect("consistent dimensions")
    }
}

impl fmt::Debug for DemandType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DemandType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vectors.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Demand type by definition: every nonzero `Ch(S) - Ch(S')` over all nested
/// pairs `S' ⊂ S` of worker sets.
pub fn demand_type_bruteforce(
    pref: &FirmPreference,
    n: usize,
    budget: &Budget,
) -> Result<DemandType> {
    if n > budget.max_bruteforce_workers {
        return Err(Error::BudgetExceeded {
            what: "brute-force demand type",
            required: n as u128,
            limit: budget.max_bruteforce_workers as u128,
        });
    }
    let mut vectors = Vec::new();
    for larger in WorkerSet::full(n).subsets() {
        let chosen = pref.choose(larger);
        for smaller in larger.subsets() {
            if smaller == larger {
                continue;
            }
            let chosen_smaller = pref.choose(smaller);
            if chosen != chosen_smaller {
                vectors.push(DemandVector::difference(chosen, chosen_smaller, n));
            }
        }
    }
    DemandType::new(n, vectors)
}

/// Demand type from pairs of acceptable sets, in `O(N^3)` for `N` acceptable
/// sets.
///
/// A pair `S ≻ S'` with `Ch(S') = S'` contributes `ind(S) - ind(S')` exactly
/// when `S = Ch(S ∪ S')`. The empty set plays the role of `S'` as well, giving
/// the vectors `ind(S)` for every `S` with `Ch(S) = S`.
pub fn demand_type_fast(pref: &FirmPreference, n: usize) -> DemandType {
    let sets = pref.acceptable();
    let mut vectors = Vec::new();
    for (i, &better) in sets.iter().enumerate() {
        if pref.choose(better) == better {
            vectors.push(DemandVector::difference(better, WorkerSet::EMPTY, n));
        }
        for &worse in &sets[i + 1..] {
            if pref.choose(worse) == worse && pref.choose(better.union(worse)) == better {
                vectors.push(DemandVector::difference(better, worse, n));
            }
        }
    }
    DemandType::new(n, vectors).expect("vectors have n entries")
}

/// Per-firm demand types, in firm order.
pub fn firm_demand_types(market: &Market) -> Vec<DemandType> {
    market
        .firm_prefs()
        .iter()
        .map(|p| demand_type_fast(p, market.n_workers()))
        .collect()
}

/// Union of all firms' demand types.
pub fn market_demand_type(market: &Market) -> DemandType {
    firm_demand_types(market)
        .iter()
        .fold(DemandType::empty(market.n_workers()), |acc, d| acc.union(d))
}
