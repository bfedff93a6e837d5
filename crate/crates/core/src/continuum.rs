//! The continuum market: every worker type is a divisible unit mass.
//!
//! A firm with acceptable sets `u^1 ≻ … ≻ u^L` chooses from a subpopulation
//! `x` by consuming the best available set at unit speed until one of its
//! worker types runs out, then moving to the next available set, until one
//! unit of time has passed or nothing acceptable remains.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{DiscreteMatching, FirmId, FirmPreference, Market, WorkerSet};
use crate::rational::{is_in_unit_interval, Rational};

/// Quantity of each worker type, each in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subpopulation(Vec<Rational>);

impl Subpopulation {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|x| !is_in_unit_interval(x)) {
            return Err(Error::InvalidMatching(format!(
                "quantity {bad} is outside [0, 1]"
            )));
        }
        Ok(Subpopulation(values))
    }

    pub fn zeros(n: usize) -> Self {
        Subpopulation(vec![Rational::zero(); n])
    }

    /// The indicator vector of `set`.
    pub fn from_set(set: WorkerSet, n: usize) -> Self {
        Subpopulation(
            (0..n)
                .map(|w| {
                    if set.contains(w) {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, w: usize) -> &Rational {
        &self.0[w]
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Componentwise maximum.
    pub fn join(&self, other: &Subpopulation) -> Subpopulation {
        Subpopulation(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| if a >= b { a.clone() } else { b.clone() })
                .collect(),
        )
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Subpopulation) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Worker types present in positive quantity.
    pub fn support(&self) -> WorkerSet {
        WorkerSet::from_workers((0..self.len()).filter(|&w| !self.0[w].is_zero()))
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_zero() || x.is_one())
    }

    /// Largest componentwise absolute difference.
    pub fn max_distance(&self, other: &Subpopulation) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| if a >= b { a - b } else { b - a })
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Debug for Subpopulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subpopulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// One round of the consumption procedure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsumptionStep {
    /// Index into the firm's acceptable sets.
    pub set_index: usize,
    /// Time spent consuming this set.
    pub time: Rational,
    /// What is left of the subpopulation afterwards.
    pub remaining: Subpopulation,
}

/// The full record of a continuum choice: one step per acceptable set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsumptionTrace {
    pub steps: Vec<ConsumptionStep>,
    pub total_time: Rational,
}

impl ConsumptionTrace {
    pub fn time(&self, k: usize) -> &Rational {
        &self.steps[k].time
    }

    /// Time spent on sets `0..=k`.
    pub fn elapsed_through(&self, k: usize) -> Rational {
        self.steps[..=k]
            .iter()
            .fold(Rational::zero(), |acc, s| acc + &s.time)
    }

    pub fn is_saturated(&self) -> bool {
        self.total_time.is_one()
    }
}

/// The continuum choice of a firm from `x`, with its consumption trace.
pub fn choose_continuum(
    pref: &FirmPreference,
    x: &Subpopulation,
) -> (Subpopulation, ConsumptionTrace) {
    let n = x.len();
    let mut remaining = x.0.clone();
    let mut chosen = vec![Rational::zero(); n];
    let mut total = Rational::zero();
    let mut steps = Vec::with_capacity(pref.len());
    for (k, set) in pref.acceptable().iter().enumerate() {
        let mut time = Rational::one() - &total;
        for w in set.iter() {
            if remaining[w] < time {
                time = remaining[w].clone();
            }
        }
        if !time.is_zero() {
            for w in set.iter() {
                remaining[w] -= &time;
                chosen[w] += &time;
            }
            total += &time;
        }
        steps.push(ConsumptionStep {
            set_index: k,
            time,
            remaining: Subpopulation(remaining.clone()),
        });
    }
    (
        Subpopulation(chosen),
        ConsumptionTrace {
            steps,
            total_time: total,
        },
    )
}

/// Weak Blair preference: `a` is weakly preferred to `b` when `a` is the
/// choice from `a ∨ b`.
pub fn blair_prefers(pref: &FirmPreference, a: &Subpopulation, b: &Subpopulation) -> bool {
    choose_continuum(pref, &a.join(b)).0 == *a
}

pub fn blair_prefers_strictly(pref: &FirmPreference, a: &Subpopulation, b: &Subpopulation) -> bool {
    a != b && blair_prefers(pref, a, b)
}

/// Assignment of subpopulations to every firm and to the null firm, with no
/// requirement that each worker type sums to one.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PseudoMatching {
    firms: Vec<Subpopulation>,
    unmatched: Subpopulation,
}

impl PseudoMatching {
    pub fn new(firms: Vec<Subpopulation>, unmatched: Subpopulation) -> Result<Self> {
        let n = unmatched.len();
        if let Some(bad) = firms.iter().find(|s| s.len() != n) {
            return Err(Error::InvalidMatching(format!(
                "subpopulation {bad} does not have {n} entries"
            )));
        }
        Ok(PseudoMatching { firms, unmatched })
    }

    /// The integral matching corresponding to a discrete matching.
    pub fn from_discrete(matching: &DiscreteMatching, n_firms: usize) -> Self {
        let n = matching.n_workers();
        let firms = (0..n_firms)
            .map(|f| Subpopulation::from_set(matching.hired(FirmId(f)), n))
            .collect();
        PseudoMatching {
            firms,
            unmatched: Subpopulation::from_set(matching.unmatched_workers(), n),
        }
    }

    pub fn n_workers(&self) -> usize {
        self.unmatched.len()
    }

    pub fn n_firms(&self) -> usize {
        self.firms.len()
    }

    /// The subpopulation held by a firm, or by the null firm for `None`.
    pub fn get(&self, holder: Option<FirmId>) -> &Subpopulation {
        match holder {
            Some(f) => &self.firms[f.0],
            None => &self.unmatched,
        }
    }

    pub fn firm(&self, f: FirmId) -> &Subpopulation {
        &self.firms[f.0]
    }

    pub fn unmatched(&self) -> &Subpopulation {
        &self.unmatched
    }

    pub fn with_firm(&self, f: FirmId, value: Subpopulation) -> PseudoMatching {
        let mut next = self.clone();
        next.firms[f.0] = value;
        next
    }

    pub fn with_unmatched(&self, value: Subpopulation) -> PseudoMatching {
        let mut next = self.clone();
        next.unmatched = value;
        next
    }

    /// Total quantity of each worker type across all holders.
    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.n_workers())
            .map(|w| {
                self.firms
                    .iter()
                    .fold(self.unmatched.get(w).clone(), |acc, s| acc + s.get(w))
            })
            .collect()
    }

    /// Whether every worker type has total quantity exactly one.
    pub fn is_matching(&self) -> bool {
        self.column_sums().iter().all(One::is_one)
    }

    pub fn is_integral(&self) -> bool {
        self.unmatched.is_integral() && self.firms.iter().all(Subpopulation::is_integral)
    }
}

impl fmt::Debug for PseudoMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for s in &self.firms {
            list.entry(s);
        }
        list.entry(&self.unmatched);
        list.finish()
    }
}

fn check_dimensions(market: &Market, m: &PseudoMatching) -> Result<()> {
    if m.n_firms() != market.n_firms() || m.n_workers() != market.n_workers() {
        return Err(Error::InvalidMatching(format!(
            "pseudo-matching is {}x{}, market has {} firms and {} workers",
            m.n_firms(),
            m.n_workers(),
            market.n_firms(),
            market.n_workers()
        )));
    }
    Ok(())
}

fn holders(market: &Market) -> impl Iterator<Item = Option<FirmId>> {
    market.firms().map(Some).chain(std::iter::once(None))
}

fn available(market: &Market, m: &PseudoMatching, f: FirmId, strict: bool) -> Subpopulation {
    let values = (0..market.n_workers())
        .map(|w| {
            let pref = market.worker_pref(w);
            holders(market)
                .filter(|&g| {
                    if strict {
                        pref.prefers(Some(f), g)
                    } else {
                        pref.weakly_prefers(Some(f), g)
                    }
                })
                .fold(Rational::zero(), |acc, g| acc + m.get(g).get(w))
        })
        .collect();
    Subpopulation(values)
}

/// Workers held by `f` or by anyone they rank no higher than `f`.
pub fn available_weak(market: &Market, m: &PseudoMatching, f: FirmId) -> Result<Subpopulation> {
    check_dimensions(market, m)?;
    Ok(available(market, m, f, false))
}

/// Workers held by anyone they rank strictly below `f`.
pub fn available_strict(market: &Market, m: &PseudoMatching, f: FirmId) -> Result<Subpopulation> {
    check_dimensions(market, m)?;
    Ok(available(market, m, f, true))
}

/// Evidence that a firm can block: `improvement` is what it would choose
/// from everything available to it, and `set_index` is the first acceptable
/// set it would consume for a different time than it does now.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockWitness {
    pub firm: FirmId,
    pub set_index: usize,
    pub set: WorkerSet,
    pub improvement: Subpopulation,
}

fn require_firm_rational(
    pref: &FirmPreference,
    held: &Subpopulation,
    f: FirmId,
) -> Result<ConsumptionTrace> {
    let (chosen, trace) = choose_continuum(pref, held);
    if chosen != *held {
        return Err(Error::Precondition(format!(
            "firm {} would not keep its subpopulation {held}",
            f.0
        )));
    }
    Ok(trace)
}

/// Decides whether `f` takes part in a blocking coalition against `m`.
///
/// Requires `f` to be individually rational in `m`. By revealed preference,
/// the firm's best option below `A^{⪯f}(M)` is its choice from that vector,
/// so it blocks exactly when that choice differs from `M_f`.
pub fn firm_can_block(
    market: &Market,
    m: &PseudoMatching,
    f: FirmId,
) -> Result<Option<BlockWitness>> {
    check_dimensions(market, m)?;
    let pref = market.firm_pref(f);
    let held = m.firm(f);
    let trace = require_firm_rational(pref, held, f)?;
    // Pseudo-matchings may offer more than one unit; a firm never uses it.
    let cap = Subpopulation(
        available(market, m, f, false)
            .0
            .into_iter()
            .map(|x| x.min(Rational::one()))
            .collect(),
    );
    let (best, best_trace) = choose_continuum(pref, &cap);
    if best == *held {
        return Ok(None);
    }
    let k = (0..pref.len())
        .find(|&k| best_trace.time(k) != trace.time(k))
        .expect("different choices come from different traces");
    Ok(Some(BlockWitness {
        firm: f,
        set_index: k,
        set: pref.acceptable()[k],
        improvement: best,
    }))
}

/// The smallest `k` with `t_1 + … + t_k < 1` in the firm's own trace and
/// `u^k` inside the support of `A^{≺f}(M)`.
///
/// This is sufficient for `f` to block but not necessary: a firm holding all
/// of `{w2}` with `{w1,w2}` ranked higher blocks with a worse-placed `w1`,
/// yet `w2` is held by no one below `f`. [`firm_can_block`] is exact.
pub fn support_block_condition(
    market: &Market,
    m: &PseudoMatching,
    f: FirmId,
) -> Result<Option<usize>> {
    check_dimensions(market, m)?;
    let pref = market.firm_pref(f);
    let trace = require_firm_rational(pref, m.firm(f), f)?;
    let reachable = available(market, m, f, true).support();
    let mut elapsed = Rational::zero();
    for (k, set) in pref.acceptable().iter().enumerate() {
        elapsed += trace.time(k);
        if elapsed < Rational::one() && set.is_subset_of(reachable) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Why a pseudo-matching fails to be stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Instability {
    /// The firm would drop part of its subpopulation.
    FirmRejects(FirmId),
    /// A worker type is held in positive quantity by a firm it finds
    /// unacceptable.
    UnacceptableFirm {
        worker: usize,
        firm: FirmId,
    },
    Blocked(BlockWitness),
}

/// The first reason `m` is unstable, checking individual rationality for all
/// firms and workers before blocking coalitions.
pub fn find_instability(market: &Market, m: &PseudoMatching) -> Result<Option<Instability>> {
    check_dimensions(market, m)?;
    for f in market.firms() {
        if choose_continuum(market.firm_pref(f), m.firm(f)).0 != *m.firm(f) {
            return Ok(Some(Instability::FirmRejects(f)));
        }
    }
    for w in 0..market.n_workers() {
        let pref = market.worker_pref(w);
        for f in market.firms() {
            if !pref.is_acceptable(f) && !m.firm(f).get(w).is_zero() {
                return Ok(Some(Instability::UnacceptableFirm { worker: w, firm: f }));
            }
        }
    }
    for f in market.firms() {
        if let Some(witness) = firm_can_block(market, m, f)? {
            return Ok(Some(Instability::Blocked(witness)));
        }
    }
    Ok(None)
}

/// Individually rational with no blocking coalition.
pub fn is_stable_pseudo(market: &Market, m: &PseudoMatching) -> Result<bool> {
    Ok(find_instability(market, m)?.is_none())
}

fn require_stable(market: &Market, m: &PseudoMatching) -> Result<()> {
    match find_instability(market, m)? {
        None => Ok(()),
        Some(reason) => Err(Error::Precondition(format!(
            "pseudo-matching is not stable: {reason:?}"
        ))),
    }
}

/// Empties a firm whose consumption trace ends with time to spare.
pub fn transform_type1(market: &Market, m: &PseudoMatching, f: FirmId) -> Result<PseudoMatching> {
    require_stable(market, m)?;
    let (_, trace) = choose_continuum(market.firm_pref(f), m.firm(f));
    if trace.is_saturated() {
        return Err(Error::Precondition(format!(
            "firm {} spends the full unit of time",
            f.0
        )));
    }
    Ok(m.with_firm(f, Subpopulation::zeros(m.n_workers())))
}

/// Replaces a firm's subpopulation by the acceptable set at `set_index`,
/// which must have been consumed for positive time.
pub fn transform_type2(
    market: &Market,
    m: &PseudoMatching,
    f: FirmId,
    set_index: usize,
) -> Result<PseudoMatching> {
    require_stable(market, m)?;
    let pref = market.firm_pref(f);
    if set_index >= pref.len() {
        return Err(Error::Precondition(format!(
            "firm {} has no acceptable set {set_index}",
            f.0
        )));
    }
    let (_, trace) = choose_continuum(pref, m.firm(f));
    if trace.time(set_index).is_zero() {
        return Err(Error::Precondition(format!(
            "firm {} never consumes acceptable set {set_index}",
            f.0
        )));
    }
    Ok(m.with_firm(
        f,
        Subpopulation::from_set(pref.acceptable()[set_index], m.n_workers()),
    ))
}

/// Rounds a strictly fractional unmatched quantity to zero or one.
pub fn transform_type3(
    market: &Market,
    m: &PseudoMatching,
    worker: usize,
    to_one: bool,
) -> Result<PseudoMatching> {
    require_stable(market, m)?;
    if worker >= m.n_workers() {
        return Err(Error::Precondition(format!("no worker {worker}")));
    }
    let current = m.unmatched().get(worker);
    if current.is_zero() || current.is_one() {
        return Err(Error::Precondition(format!(
            "unmatched quantity of worker {worker} is already {current}"
        )));
    }
    let mut values = m.unmatched().values().to_vec();
    values[worker] = if to_one {
        Rational::one()
    } else {
        Rational::zero()
    };
    Ok(m.with_unmatched(Subpopulation(values)))
}

/// A stable transformation together with its arguments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transformation {
    Type1 { firm: FirmId },
    Type2 { firm: FirmId, set_index: usize },
    Type3 { worker: usize, to_one: bool },
}

/// Every transformation whose precondition holds at the stable
/// pseudo-matching `m`, each with its result.
pub fn applicable_transformations(
    market: &Market,
    m: &PseudoMatching,
) -> Result<Vec<(Transformation, PseudoMatching)>> {
    require_stable(market, m)?;
    let mut out = Vec::new();
    for f in market.firms() {
        let (_, trace) = choose_continuum(market.firm_pref(f), m.firm(f));
        if !trace.is_saturated() {
            out.push((
                Transformation::Type1 { firm: f },
                transform_type1(market, m, f)?,
            ));
        }
        for step in trace.steps.iter().filter(|s| !s.time.is_zero()) {
            out.push((
                Transformation::Type2 {
                    firm: f,
                    set_index: step.set_index,
                },
                transform_type2(market, m, f, step.set_index)?,
            ));
        }
    }
    for w in 0..m.n_workers() {
        let q = m.unmatched().get(w);
        if !q.is_zero() && !q.is_one() {
            for to_one in [false, true] {
                out.push((
                    Transformation::Type3 { worker: w, to_one },
                    transform_type3(market, m, w, to_one)?,
                ));
            }
        }
    }
    Ok(out)
}

/// The discrete matching behind an integral continuum matching.
pub fn lift_to_discrete(m: &PseudoMatching) -> Result<DiscreteMatching> {
    if !m.is_matching() {
        return Err(Error::InvalidMatching(
            "some worker type does not have total quantity one".into(),
        ));
    }
    if !m.is_integral() {
        return Err(Error::NonIntegral(
            "continuum matching is fractional".into(),
        ));
    }
    let assignment = (0..m.n_workers())
        .map(|w| {
            (0..m.n_firms())
                .map(FirmId)
                .find(|&f| m.firm(f).get(w).is_one())
        })
        .collect();
    Ok(DiscreteMatching::new(assignment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    fn sub(values: &[(i64, i64)]) -> Subpopulation {
        Subpopulation::new(values.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    fn pm(firms: &[&[(i64, i64)]], unmatched: &[(i64, i64)]) -> PseudoMatching {
        PseudoMatching::new(firms.iter().map(|f| sub(f)).collect(), sub(unmatched)).unwrap()
    }

    fn pref(sets: &[&[usize]]) -> FirmPreference {
        FirmPreference::new(
            sets.iter()
                .map(|s| WorkerSet::from_workers(s.iter().copied()))
                .collect(),
        )
        .unwrap()
    }

    const H: (i64, i64) = (1, 2);
    const Z: (i64, i64) = (0, 1);
    const O: (i64, i64) = (1, 1);

    /// The stable fractional matching of [`fixtures::three_worker_market`].
    fn half_matching() -> PseudoMatching {
        pm(&[&[H, H, H], &[H, H, Z]], &[Z, Z, H])
    }

    #[test]
    fn consumption_examples() {
        let p = pref(&[&[0, 1], &[1, 2], &[2]]);
        let (out, trace) = choose_continuum(&p, &sub(&[(3, 5), (3, 5), (1, 2)]));
        assert_eq!(out, sub(&[(3, 5), (3, 5), (2, 5)]));
        assert_eq!(trace.time(0), &ratio(3, 5));
        assert_eq!(trace.time(1), &ratio(0, 1));
        assert_eq!(trace.time(2), &ratio(2, 5));
        assert!(trace.is_saturated());

        let (out, trace) = choose_continuum(&p, &sub(&[(1, 10), (2, 5), (1, 10)]));
        assert_eq!(out, sub(&[(1, 10), (1, 5), (1, 10)]));
        assert_eq!(trace.total_time, ratio(1, 5));
        assert_eq!(trace.steps[1].remaining, sub(&[Z, (1, 5), Z]));
    }

    #[test]
    fn consumption_of_nothing_takes_no_time() {
        let p = pref(&[&[0, 1], &[2]]);
        let (out, trace) = choose_continuum(&p, &Subpopulation::zeros(3));
        assert!(out.is_zero());
        assert!(trace.steps.iter().all(|s| s.time.is_zero()));
    }

    #[test]
    fn integral_choice_agrees_with_discrete_choice() {
        let p = pref(&[&[0, 1], &[1, 2], &[2]]);
        for s in WorkerSet::full(3).subsets() {
            let (out, _) = choose_continuum(&p, &Subpopulation::from_set(s, 3));
            assert_eq!(out, Subpopulation::from_set(p.choose(s), 3));
        }
    }

    #[test]
    fn join_examples() {
        let a = sub(&[(3, 5), (3, 5), (2, 5)]);
        assert_eq!(a.join(&sub(&[H, H, H])), sub(&[(3, 5), (3, 5), H]));
        assert_eq!(a.join(&a), a);
        assert_eq!(a.join(&Subpopulation::zeros(3)), a);
    }

    #[test]
    fn blair_order() {
        let market = fixtures::three_worker_market();
        let p = market.firm_pref(FirmId(0));
        let better = sub(&[(3, 5), (3, 5), (2, 5)]);
        let current = sub(&[H, H, H]);
        assert!(blair_prefers_strictly(p, &better, &current));
        assert!(blair_prefers(p, &current, &current));
        assert!(!blair_prefers_strictly(p, &current, &current));
        assert!(!blair_prefers_strictly(
            p,
            &Subpopulation::zeros(3),
            &current
        ));
    }

    #[test]
    fn availability() {
        let market = fixtures::three_worker_market();
        let m = half_matching();
        assert_eq!(
            available_weak(&market, &m, FirmId(0)).unwrap(),
            sub(&[O, H, O])
        );
        let strict = available_strict(&market, &m, FirmId(0)).unwrap();
        assert_eq!(strict, sub(&[H, Z, H]));
        let empty =
            PseudoMatching::new(vec![Subpopulation::zeros(3); 2], Subpopulation::zeros(3)).unwrap();
        assert!(available_weak(&market, &empty, FirmId(1))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn availability_single_firm() {
        // One firm acceptable to worker 0 only: availability is M_f + M_null on
        // worker 0 and M_f alone elsewhere.
        let market = Market::new(
            2,
            vec![pref(&[&[0]])],
            vec![
                crate::market::WorkerPreference::new(vec![FirmId(0)]).unwrap(),
                Default::default(),
            ],
        )
        .unwrap();
        let m = pm(&[&[(1, 3), Z]], &[(2, 3), O]);
        assert_eq!(
            available_weak(&market, &m, FirmId(0)).unwrap(),
            sub(&[O, Z])
        );
    }

    #[test]
    fn stable_examples() {
        let market = fixtures::three_worker_market();
        assert!(is_stable_pseudo(&market, &half_matching()).unwrap());
        assert_eq!(
            firm_can_block(&market, &half_matching(), FirmId(0)).unwrap(),
            None
        );
        let pseudo = pm(
            &[&[(3, 5), (3, 5), (3, 10)], &[(3, 10), (3, 10), Z]],
            &[Z, Z, Z],
        );
        assert!(is_stable_pseudo(&market, &pseudo).unwrap());
    }

    #[test]
    fn unacceptable_assignment_is_unstable() {
        let market = Market::new(1, vec![pref(&[&[0]])], vec![Default::default()]).unwrap();
        let m = pm(&[&[O]], &[Z]);
        assert_eq!(
            find_instability(&market, &m).unwrap(),
            Some(Instability::UnacceptableFirm {
                worker: 0,
                firm: FirmId(0)
            })
        );
        assert!(!is_stable_pseudo(&market, &m).unwrap());
    }

    #[test]
    fn complementary_firm_blocks_split_workers() {
        let market = fixtures::no_stable_complements();
        let m = pm(&[&[Z, Z], &[O, Z]], &[Z, O]);
        let witness = firm_can_block(&market, &m, FirmId(0)).unwrap().unwrap();
        assert_eq!(witness.set, WorkerSet::from_workers([0, 1]));
        assert_eq!(witness.set_index, 0);
    }

    #[test]
    fn blocking_requires_individual_rationality() {
        let market = fixtures::no_stable_complements();
        let m = pm(&[&[O, Z], &[Z, Z]], &[Z, O]);
        assert!(matches!(
            firm_can_block(&market, &m, FirmId(0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn nothing_to_block_with() {
        let market = fixtures::three_worker_market();
        let empty = pm(&[&[Z, Z, Z], &[Z, Z, Z]], &[Z, Z, Z]);
        assert_eq!(firm_can_block(&market, &empty, FirmId(0)).unwrap(), None);
    }

    #[test]
    fn type1_examples() {
        let market = fixtures::three_worker_market();
        let pseudo = pm(
            &[&[(3, 5), (3, 5), (3, 10)], &[(3, 10), (3, 10), Z]],
            &[Z, Z, Z],
        );
        let out = transform_type1(&market, &pseudo, FirmId(0)).unwrap();
        assert_eq!(out.firm(FirmId(0)), &Subpopulation::zeros(3));
        assert!(is_stable_pseudo(&market, &out).unwrap());

        let step1 = transform_type1(&market, &half_matching(), FirmId(1)).unwrap();
        assert_eq!(step1.firm(FirmId(1)), &Subpopulation::zeros(3));

        let again = transform_type1(&market, &step1, FirmId(1)).unwrap();
        assert_eq!(again, step1);
    }

    #[test]
    fn type1_rejects_saturated_firm() {
        let market = fixtures::three_worker_market();
        assert!(matches!(
            transform_type1(&market, &half_matching(), FirmId(0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn type2_examples() {
        let market = fixtures::three_worker_market();
        let pseudo = pm(
            &[&[(3, 5), (3, 5), (3, 10)], &[(3, 10), (3, 10), Z]],
            &[Z, Z, Z],
        );
        let out = transform_type2(&market, &pseudo, FirmId(0), 0).unwrap();
        assert_eq!(out.firm(FirmId(0)), &sub(&[O, O, Z]));
        assert!(is_stable_pseudo(&market, &out).unwrap());

        let step1 = transform_type1(&market, &half_matching(), FirmId(1)).unwrap();
        let step2 = transform_type2(&market, &step1, FirmId(0), 0).unwrap();
        assert_eq!(step2.firm(FirmId(0)), &sub(&[O, O, Z]));

        let again = transform_type2(&market, &step2, FirmId(0), 0).unwrap();
        assert_eq!(again, step2);
    }

    #[test]
    fn type2_rejects_unconsumed_set() {
        let market = fixtures::three_worker_market();
        let m = pm(&[&[O, O, Z], &[Z, Z, Z]], &[Z, Z, O]);
        assert!(matches!(
            transform_type2(&market, &m, FirmId(0), 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn type3_examples_reach_integral_matching() {
        let market = fixtures::three_worker_market();
        let step1 = transform_type1(&market, &half_matching(), FirmId(1)).unwrap();
        let step2 = transform_type2(&market, &step1, FirmId(0), 0).unwrap();
        let step3 = transform_type3(&market, &step2, 2, true).unwrap();
        assert_eq!(step3, pm(&[&[O, O, Z], &[Z, Z, Z]], &[Z, Z, O]));
        assert!(step3.is_matching());
        let mu = lift_to_discrete(&step3).unwrap();
        assert_eq!(mu.hired(FirmId(0)), WorkerSet::from_workers([0, 1]));
        assert_eq!(mu.employer(2), None);
        assert!(market.is_stable(&mu).unwrap());

        // The second firm keeps a partial pair and a third of worker 3 sits idle.
        let partial = pm(&[&[O, O, Z], &[(3, 10), (3, 10), Z]], &[Z, Z, (1, 3)]);
        assert!(is_stable_pseudo(&market, &partial).unwrap());
        let up = transform_type3(&market, &partial, 2, true).unwrap();
        assert_eq!(up.unmatched(), &sub(&[Z, Z, O]));
        let down = transform_type3(&market, &partial, 2, false).unwrap();
        assert!(down.unmatched().is_zero());
        assert!(is_stable_pseudo(&market, &up).unwrap());
        assert!(is_stable_pseudo(&market, &down).unwrap());
    }

    #[test]
    fn idle_worker_two_lets_first_firm_block() {
        // With worker 2 partly idle, firm 1 can draw 3/10 of workers 1 and 2
        // from firm 2 and the null firm, so type 3 does not apply.
        let market = fixtures::three_worker_market();
        let tilde = pm(&[&[Z, Z, Z], &[(3, 10), (3, 10), Z]], &[Z, (3, 10), Z]);
        let witness = firm_can_block(&market, &tilde, FirmId(0)).unwrap().unwrap();
        assert_eq!(witness.set, WorkerSet::from_workers([0, 1]));
        assert!(matches!(
            transform_type3(&market, &tilde, 1, true),
            Err(Error::Precondition(_))
        ));
        let settled = pm(&[&[Z, Z, Z], &[(3, 10), (3, 10), Z]], &[Z, Z, Z]);
        assert!(is_stable_pseudo(&market, &settled).unwrap());
    }

    #[test]
    fn type3_rejects_integral_quantity() {
        let market = fixtures::three_worker_market();
        let m = pm(&[&[O, O, Z], &[Z, Z, Z]], &[Z, Z, O]);
        assert!(transform_type3(&market, &m, 2, false).is_err());
        assert!(transform_type3(&market, &m, 0, true).is_err());
    }

    #[test]
    fn lift_examples() {
        let market = fixtures::three_worker_market();
        // Leaving worker 3 idle lets firm 1 hire it, in both markets.
        let idle = pm(&[&[Z, Z, Z], &[O, O, Z]], &[Z, Z, O]);
        assert!(!is_stable_pseudo(&market, &idle).unwrap());
        let mu = lift_to_discrete(&idle).unwrap();
        assert_eq!(mu.hired(FirmId(1)), WorkerSet::from_workers([0, 1]));
        assert!(!market.is_stable(&mu).unwrap());

        let m = pm(&[&[Z, Z, O], &[O, O, Z]], &[Z, Z, Z]);
        assert!(is_stable_pseudo(&market, &m).unwrap());
        let mu = lift_to_discrete(&m).unwrap();
        assert_eq!(mu.hired(FirmId(0)), WorkerSet::from_workers([2]));
        assert!(market.is_stable(&mu).unwrap());

        let all_null = pm(&[&[Z, Z, Z], &[Z, Z, Z]], &[O, O, O]);
        assert_eq!(
            lift_to_discrete(&all_null).unwrap(),
            DiscreteMatching::unmatched(3)
        );

        assert!(lift_to_discrete(&half_matching()).is_err());
        assert!(lift_to_discrete(&pm(&[&[O, O, Z], &[Z, Z, Z]], &[Z, Z, Z])).is_err());
    }
}
