//! Discrete many-to-one matching markets.
//!
//! Firms rank subsets of workers, workers rank firms. The null firm (being
//! unmatched) is represented by `None` wherever a worker's employer is stored.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};

/// Largest number of workers a [`WorkerSet`] can hold.
pub const MAX_WORKERS: usize = 64;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WorkerId(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FirmId(pub usize);

/// A subset of workers, stored as a bitmask over worker indices.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WorkerSet(u64);

impl WorkerSet {
    pub const EMPTY: WorkerSet = WorkerSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        WorkerSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All workers `0..n`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_WORKERS);
        if n == MAX_WORKERS {
            WorkerSet(u64::MAX)
        } else {
            WorkerSet((1u64 << n) - 1)
        }
    }

    pub fn from_workers<I: IntoIterator<Item = usize>>(workers: I) -> Self {
        let mut set = WorkerSet::EMPTY;
        for w in workers {
            set.insert(w);
        }
        set
    }

    /// Builds a set from a 0/1 indicator vector.
    pub fn from_indicator(indicator: &[u8]) -> Result<Self> {
        if indicator.len() > MAX_WORKERS {
            return Err(Error::InvalidMarket(format!(
                "at most {MAX_WORKERS} workers are supported"
            )));
        }
        let mut set = WorkerSet::EMPTY;
        for (w, &bit) in indicator.iter().enumerate() {
            match bit {
                0 => {}
                1 => set.insert(w),
                other => {
                    return Err(Error::InvalidPreference(format!(
                        "indicator entry {other} is not 0/1"
                    )))
                }
            }
        }
        Ok(set)
    }

    pub fn insert(&mut self, w: usize) {
        assert!(w < MAX_WORKERS, "worker index {w} out of range");
        self.0 |= 1 << w;
    }

    pub fn remove(&mut self, w: usize) {
        if w < MAX_WORKERS {
            self.0 &= !(1 << w);
        }
    }

    pub fn contains(self, w: usize) -> bool {
        w < MAX_WORKERS && self.0 & (1 << w) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: WorkerSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: WorkerSet) -> WorkerSet {
        WorkerSet(self.0 | other.0)
    }

    pub fn intersection(self, other: WorkerSet) -> WorkerSet {
        WorkerSet(self.0 & other.0)
    }

    pub fn difference(self, other: WorkerSet) -> WorkerSet {
        WorkerSet(self.0 & !other.0)
    }

    /// Worker indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w)
            }
        })
    }

    /// The 0/1 indicator vector of length `n`.
    pub fn indicator(self, n: usize) -> Vec<i64> {
        (0..n).map(|w| i64::from(self.contains(w))).collect()
    }

    /// Every subset of `self`, starting from the empty set.
    pub fn subsets(self) -> impl Iterator<Item = WorkerSet> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let current = next?;
            next = if current == mask {
                None
            } else {
                Some((current.wrapping_sub(mask)) & mask)
            };
            Some(WorkerSet(current))
        })
    }
}

impl fmt::Debug for WorkerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A firm's strict ranking of its acceptable worker sets, best first.
///
/// The empty set is implicitly ranked directly below the last listed set;
/// anything unlisted is unacceptable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FirmPreference {
    acceptable: Vec<WorkerSet>,
}

impl FirmPreference {
    pub fn new(acceptable: Vec<WorkerSet>) -> Result<Self> {
        for (i, set) in acceptable.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidPreference(
                    "the empty set is ranked implicitly and cannot be listed".into(),
                ));
            }
            if acceptable[..i].contains(set) {
                return Err(Error::InvalidPreference(format!(
                    "set {set:?} is listed twice"
                )));
            }
        }
        Ok(FirmPreference { acceptable })
    }

    /// A preference with no acceptable set.
    pub fn empty() -> Self {
        FirmPreference::default()
    }

    pub fn acceptable(&self) -> &[WorkerSet] {
        &self.acceptable
    }

    /// Number of acceptable sets.
    pub fn len(&self) -> usize {
        self.acceptable.len()
    }

    pub fn is_empty(&self) -> bool {
        self.acceptable.is_empty()
    }

    /// Position of `set` in the ranking, if acceptable.
    pub fn rank(&self, set: WorkerSet) -> Option<usize> {
        self.acceptable.iter().position(|&s| s == set)
    }

    /// Workers appearing in some acceptable set.
    pub fn support(&self) -> WorkerSet {
        self.acceptable
            .iter()
            .fold(WorkerSet::EMPTY, |acc, &s| acc.union(s))
    }

    /// The most preferred acceptable subset of `available`, or the empty set.
    pub fn choose(&self, available: WorkerSet) -> WorkerSet {
        self.acceptable
            .iter()
            .copied()
            .find(|s| s.is_subset_of(available))
            .unwrap_or(WorkerSet::EMPTY)
    }

    /// Strict preference between two worker sets. Sets that are neither listed
    /// nor empty rank below the empty set; among themselves they are
    /// incomparable and this returns `false`.
    pub fn prefers(&self, a: WorkerSet, b: WorkerSet) -> bool {
        let key = |s: WorkerSet| match self.rank(s) {
            Some(r) => Some(r),
            None if s.is_empty() => Some(self.len()),
            None => None,
        };
        match (key(a), key(b)) {
            (Some(x), Some(y)) => x < y,
            (Some(_), None) => true,
            _ => false,
        }
    }

    /// Whether a chosen worker stays chosen whenever another worker becomes
    /// unavailable. Checked exhaustively over subsets of the support, which is
    /// equivalent to checking all subsets of workers.
    pub fn is_substitutable(&self) -> bool {
        for available in self.support().subsets() {
            let chosen = self.choose(available);
            for removed in available.iter() {
                let mut smaller = available;
                smaller.remove(removed);
                let chosen_smaller = self.choose(smaller);
                if !chosen
                    .difference(WorkerSet::from_workers([removed]))
                    .is_subset_of(chosen_smaller)
                {
                    return false;
                }
            }
        }
        true
    }
}

/// A worker's strict ranking of acceptable firms, best first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorkerPreference {
    acceptable: Vec<FirmId>,
}

impl WorkerPreference {
    pub fn new(acceptable: Vec<FirmId>) -> Result<Self> {
        for (i, f) in acceptable.iter().enumerate() {
            if acceptable[..i].contains(f) {
                return Err(Error::InvalidPreference(format!(
                    "firm {} is listed twice",
                    f.0
                )));
            }
        }
        Ok(WorkerPreference { acceptable })
    }

    pub fn acceptable(&self) -> &[FirmId] {
        &self.acceptable
    }

    pub fn is_acceptable(&self, firm: FirmId) -> bool {
        self.acceptable.contains(&firm)
    }

    /// Position in the worker's complete order: listed firms, then the null
    /// firm, then unlisted firms by index.
    pub fn rank(&self, holder: Option<FirmId>) -> usize {
        let listed = self.acceptable.len();
        match holder {
            None => listed,
            Some(f) => match self.acceptable.iter().position(|&g| g == f) {
                Some(r) => r,
                None => listed + 1 + f.0,
            },
        }
    }

    /// `a` is weakly preferred to `b`.
    pub fn weakly_prefers(&self, a: Option<FirmId>, b: Option<FirmId>) -> bool {
        self.rank(a) <= self.rank(b)
    }

    /// `a` is strictly preferred to `b`.
    pub fn prefers(&self, a: Option<FirmId>, b: Option<FirmId>) -> bool {
        self.rank(a) < self.rank(b)
    }
}

/// Firms and workers together with their preferences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Market {
    n_workers: usize,
    firm_prefs: Vec<FirmPreference>,
    worker_prefs: Vec<WorkerPreference>,
}

impl Market {
    pub fn new(
        n_workers: usize,
        firm_prefs: Vec<FirmPreference>,
        worker_prefs: Vec<WorkerPreference>,
    ) -> Result<Self> {
        if n_workers > MAX_WORKERS {
            return Err(Error::InvalidMarket(format!(
                "{n_workers} workers exceeds the supported maximum of {MAX_WORKERS}"
            )));
        }
        if worker_prefs.len() != n_workers {
            return Err(Error::InvalidMarket(format!(
                "expected {} worker preferences, got {}",
                n_workers,
                worker_prefs.len()
            )));
        }
        let everyone = WorkerSet::full(n_workers);
        for (f, pref) in firm_prefs.iter().enumerate() {
            if let Some(bad) = pref.acceptable().iter().find(|s| !s.is_subset_of(everyone)) {
                return Err(Error::InvalidMarket(format!(
                    "firm {f} lists {bad:?}, which names a worker outside 0..{n_workers}"
                )));
            }
        }
        let m = firm_prefs.len();
        for (w, pref) in worker_prefs.iter().enumerate() {
            if let Some(bad) = pref.acceptable().iter().find(|f| f.0 >= m) {
                return Err(Error::InvalidMarket(format!(
                    "worker {w} lists firm {}, but there are only {m} firms",
                    bad.0
                )));
            }
        }
        Ok(Market {
            n_workers,
            firm_prefs,
            worker_prefs,
        })
    }

    pub fn n_workers(&self) -> usize {
        self.n_workers
    }

    pub fn n_firms(&self) -> usize {
        self.firm_prefs.len()
    }

    pub fn firm_pref(&self, f: FirmId) -> &FirmPreference {
        &self.firm_prefs[f.0]
    }

    pub fn firm_prefs(&self) -> &[FirmPreference] {
        &self.firm_prefs
    }

    pub fn worker_pref(&self, w: usize) -> &WorkerPreference {
        &self.worker_prefs[w]
    }

    pub fn worker_prefs(&self) -> &[WorkerPreference] {
        &self.worker_prefs
    }

    pub fn firms(&self) -> impl Iterator<Item = FirmId> {
        (0..self.n_firms()).map(FirmId)
    }

    fn check_matching(&self, matching: &DiscreteMatching) -> Result<()> {
        if matching.n_workers() != self.n_workers {
            return Err(Error::InvalidMatching(format!(
                "matching covers {} workers, market has {}",
                matching.n_workers(),
                self.n_workers
            )));
        }
        if let Some(f) = matching
            .assignment()
            .iter()
            .flatten()
            .find(|f| f.0 >= self.n_firms())
        {
            return Err(Error::InvalidMatching(format!(
                "matching uses firm {}, market has {}",
                f.0,
                self.n_firms()
            )));
        }
        Ok(())
    }

    /// Every matched worker finds her firm acceptable and every firm would
    /// keep its whole workforce.
    pub fn is_individually_rational(&self, matching: &DiscreteMatching) -> Result<bool> {
        self.check_matching(matching)?;
        let workers_ok = matching
            .assignment()
            .iter()
            .enumerate()
            .all(|(w, holder)| match holder {
                None => true,
                Some(f) => self.worker_prefs[w].is_acceptable(*f),
            });
        let firms_ok = self.firms().all(|f| {
            let hired = matching.hired(f);
            self.firm_pref(f).choose(hired) == hired
        });
        Ok(workers_ok && firms_ok)
    }

    /// Searches firms in index order and, for each firm, its acceptable sets
    /// in preference order; returns the first blocking coalition found.
    pub fn find_blocking_coalition(
        &self,
        matching: &DiscreteMatching,
    ) -> Result<Option<BlockingCoalition>> {
        self.check_matching(matching)?;
        for f in self.firms() {
            let pref = self.firm_pref(f);
            let current = matching.hired(f);
            let willing =
                WorkerSet::from_workers((0..self.n_workers).filter(|&w| {
                    self.worker_prefs[w].weakly_prefers(Some(f), matching.employer(w))
                }));
            let current_rank = pref.rank(current);
            let better = match current_rank {
                Some(r) => &pref.acceptable()[..r],
                None => pref.acceptable(),
            };
            if let Some(&workers) = better.iter().find(|s| s.is_subset_of(willing)) {
                return Ok(Some(BlockingCoalition { firm: f, workers }));
            }
            // An unacceptable nonempty workforce is beaten by the empty set.
            if current_rank.is_none() && !current.is_empty() {
                return Ok(Some(BlockingCoalition {
                    firm: f,
                    workers: WorkerSet::EMPTY,
                }));
            }
        }
        Ok(None)
    }

    pub fn is_stable(&self, matching: &DiscreteMatching) -> Result<bool> {
        Ok(self.is_individually_rational(matching)?
            && self.find_blocking_coalition(matching)?.is_none())
    }

    /// Number of worker-to-firm assignments, `(m+1)^n`, saturating.
    pub fn assignment_count(&self) -> u128 {
        let base = self.n_firms() as u128 + 1;
        (0..self.n_workers).fold(1u128, |acc, _| acc.saturating_mul(base))
    }

    /// All stable matchings, by exhaustive search over assignments in
    /// lexicographic order (worker 0 most significant, unmatched first).
    pub fn enumerate_stable_matchings(&self, budget: &Budget) -> Result<Vec<DiscreteMatching>> {
        let required = self.assignment_count();
        if required > budget.max_assignments {
            return Err(Error::BudgetExceeded {
                what: "stable matching enumeration",
                required,
                limit: budget.max_assignments,
            });
        }
        let m = self.n_firms();
        let n = self.n_workers;
        let mut digits = vec![0usize; n];
        let mut found = Vec::new();
        loop {
            let matching = DiscreteMatching::new(
                digits
                    .iter()
                    .map(|&d| if d == 0 { None } else { Some(FirmId(d - 1)) })
                    .collect(),
            );
            if self.is_stable(&matching)? {
                found.push(matching);
            }
            // Odometer increment, last worker least significant.
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(found);
                }
                pos -= 1;
                if digits[pos] < m {
                    digits[pos] += 1;
                    break;
                }
                digits[pos] = 0;
            }
        }
    }
}

/// A firm together with a set of workers that jointly block a matching.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingCoalition {
    pub firm: FirmId,
    pub workers: WorkerSet,
}

/// Each worker's employer; `None` means unmatched.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiscreteMatching {
    assignment: Vec<Option<FirmId>>,
}

impl DiscreteMatching {
    pub fn new(assignment: Vec<Option<FirmId>>) -> Self {
        DiscreteMatching { assignment }
    }

    /// Everyone unmatched.
    pub fn unmatched(n_workers: usize) -> Self {
        DiscreteMatching {
            assignment: vec![None; n_workers],
        }
    }

    /// Builds a matching from firm workforces, which must be disjoint.
    pub fn from_workforces(n_workers: usize, workforces: &[(FirmId, WorkerSet)]) -> Result<Self> {
        let mut assignment: Vec<Option<FirmId>> = vec![None; n_workers];
        for &(f, set) in workforces {
            for w in set.iter() {
                if w >= n_workers {
                    return Err(Error::InvalidMatching(format!("worker {w} out of range")));
                }
                if let Some(other) = assignment[w] {
                    return Err(Error::InvalidMatching(format!(
                        "worker {w} assigned to firms {} and {}",
                        other.0, f.0
                    )));
                }
                assignment[w] = Some(f);
            }
        }
        Ok(DiscreteMatching { assignment })
    }

    pub fn assignment(&self) -> &[Option<FirmId>] {
        &self.assignment
    }

    pub fn n_workers(&self) -> usize {
        self.assignment.len()
    }

    pub fn employer(&self, w: usize) -> Option<FirmId> {
        self.assignment[w]
    }

    /// The workforce of firm `f`.
    pub fn hired(&self, f: FirmId) -> WorkerSet {
        WorkerSet::from_workers(
            self.assignment
                .iter()
                .enumerate()
                .filter(|(_, holder)| **holder == Some(f))
                .map(|(w, _)| w),
        )
    }

    pub fn unmatched_workers(&self) -> WorkerSet {
        WorkerSet::from_workers(
            self.assignment
                .iter()
                .enumerate()
                .filter(|(_, holder)| holder.is_none())
                .map(|(w, _)| w),
        )
    }
}
