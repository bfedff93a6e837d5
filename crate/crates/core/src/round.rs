//! Rounding a stable continuum matching to a stable discrete one.
//!
//! Each firm's consumption trace is rewritten as a convex combination of the
//! acceptable sets it consumed for positive time, plus the empty set when it
//! has time to spare. Unmatched mass becomes unit columns. The combination
//! weights solve `B z = 1, z >= 0`; when the demand type is totally
//! unimodular every vertex of that polytope is a 0/1 vector, which picks one
//! set per firm and yields a stable integral matching.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::continuum::{choose_continuum, lift_to_discrete, PseudoMatching, Subpopulation};
use crate::demand::{market_demand_type, DemandType};
use crate::error::{Error, Result};
use crate::lp;
use crate::market::{DiscreteMatching, FirmId, Market, WorkerSet};
use crate::matrix::IntMatrix;
use crate::rational::Rational;
use crate::search::{
    find_stable_continuum, verify_stable_continuum, CandidateSource, SearchConfig,
};
use crate::unimodular::{is_totally_unimodular, MinorWitness, TuVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    /// The firm's acceptable set at this index of its preference list.
    AcceptableSet(usize),
    /// The firm hiring nobody for the time it has left.
    Idle,
    /// A worker left unmatched.
    Unmatched(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMeta {
    /// `None` for the null firm.
    pub owner: Option<FirmId>,
    pub kind: ColumnKind,
    pub workers: WorkerSet,
}

/// `B z = 1` with the seeding solution `z_hat`. The first `n_firms` rows say
/// each firm uses weight one in total; the remaining rows say each worker
/// type has total mass one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    pub n_firms: usize,
    pub n_workers: usize,
    pub b: IntMatrix,
    pub columns: Vec<ColumnMeta>,
    pub z_hat: Vec<Rational>,
}

impl ConstraintSystem {
    pub fn rhs(&self) -> Vec<Rational> {
        vec![Rational::one(); self.b.rows()]
    }

    pub fn is_solution(&self, z: &[Rational]) -> Result<bool> {
        Ok(z.iter().all(|x| *x >= Rational::zero()) && self.b.mul_vec(z)? == self.rhs())
    }
}

/// Builds the system seeded by a stable continuum matching.
///
/// Columns run firm by firm and then over the null firm. A firm contributes
/// its consumed sets by ascending preference index, then an idle column if
/// its total consumption time is below one; the null firm contributes one
/// column per worker type with positive unmatched mass.
pub fn build_system(market: &Market, m: &PseudoMatching) -> Result<ConstraintSystem> {
    if !verify_stable_continuum(market, m)? {
        return Err(Error::Precondition(
            "seed is not a stable continuum matching".into(),
        ));
    }
    let (n_firms, n_workers) = (market.n_firms(), market.n_workers());
    let mut columns = Vec::new();
    let mut z_hat = Vec::new();
    for f in market.firms() {
        let pref = market.firm_pref(f);
        let (_, trace) = choose_continuum(pref, m.firm(f));
        for step in &trace.steps {
            if !step.time.is_zero() {
                columns.push(ColumnMeta {
                    owner: Some(f),
                    kind: ColumnKind::AcceptableSet(step.set_index),
                    workers: pref.acceptable()[step.set_index],
                });
                z_hat.push(step.time.clone());
            }
        }
        if !trace.is_saturated() {
            columns.push(ColumnMeta {
                owner: Some(f),
                kind: ColumnKind::Idle,
                workers: WorkerSet::EMPTY,
            });
            z_hat.push(Rational::one() - &trace.total_time);
        }
    }
    for w in 0..n_workers {
        let mass = m.unmatched().get(w);
        if !mass.is_zero() {
            columns.push(ColumnMeta {
                owner: None,
                kind: ColumnKind::Unmatched(w),
                workers: WorkerSet::from_workers([w]),
            });
            z_hat.push(mass.clone());
        }
    }
    let mut b = IntMatrix::zeros(n_firms + n_workers, columns.len());
    for (j, col) in columns.iter().enumerate() {
        if let Some(f) = col.owner {
            b.set(f.0, j, 1);
        }
        for w in col.workers.iter() {
            b.set(n_firms + w, j, 1);
        }
    }
    let system = ConstraintSystem {
        n_firms,
        n_workers,
        b,
        columns,
        z_hat,
    };
    if !system.is_solution(&system.z_hat)? {
        return Err(Error::Internal(
            "seeding weights do not solve B z = 1".into(),
        ));
    }
    Ok(system)
}

/// A vertex of `{z | B z = 1, z >= 0}`, which must be a 0/1 vector.
pub fn find_integral_vertex(system: &ConstraintSystem) -> Result<Vec<Rational>> {
    let z = lp::basic_feasible_solution(&system.b, &system.rhs())?;
    if !lp::is_integral(&z) {
        let shown: Vec<String> = z.iter().map(ToString::to_string).collect();
        return Err(Error::NonIntegral(format!(
            "vertex ({}) is fractional; B is not unimodular",
            shown.join(",")
        )));
    }
    Ok(z)
}

/// The continuum matching `M'_f = Σ z_j B*_j` over the firm's columns, with
/// unit columns filling the null firm.
pub fn vertex_to_matching(system: &ConstraintSystem, z: &[Rational]) -> Result<PseudoMatching> {
    if z.len() != system.columns.len() {
        return Err(Error::InvalidMatching(format!(
            "vertex has {} entries for {} columns",
            z.len(),
            system.columns.len()
        )));
    }
    if !lp::is_integral(z) {
        return Err(Error::NonIntegral("vertex is fractional".into()));
    }
    if !system.is_solution(z)? {
        return Err(Error::InvalidMatching(
            "vertex does not solve B z = 1".into(),
        ));
    }
    let n = system.n_workers;
    let mut firms = vec![vec![Rational::zero(); n]; system.n_firms];
    let mut unmatched = vec![Rational::zero(); n];
    for (col, weight) in system.columns.iter().zip(z) {
        let target = match col.owner {
            Some(f) => &mut firms[f.0],
            None => &mut unmatched,
        };
        for w in col.workers.iter() {
            target[w] += weight;
        }
    }
    PseudoMatching::new(
        firms
            .into_iter()
            .map(Subpopulation::new)
            .collect::<Result<Vec<_>>>()?,
        Subpopulation::new(unmatched)?,
    )
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Run the pipeline even when the demand type is not totally unimodular.
    pub force: bool,
    /// Try this continuum matching before the configured sources.
    pub seed: Option<PseudoMatching>,
    pub search: SearchConfig,
    pub budget: Budget,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub demand_type: DemandType,
    pub verdict: TuVerdict,
    pub seed: PseudoMatching,
    pub system: ConstraintSystem,
    pub vertex: Vec<Rational>,
    pub matching: DiscreteMatching,
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Stable(Box<SolveReport>),
    NotTotallyUnimodular {
        demand_type: DemandType,
        witness: MinorWitness,
    },
    SearchExhausted {
        attempts: usize,
    },
    /// Only reachable with `force`.
    NonIntegralVertex {
        system: ConstraintSystem,
        vertex: Vec<Rational>,
    },
}

/// Demand type, total unimodularity, a stable continuum seed, the rounding
/// system, an integral vertex, and the discrete matching it encodes, which
/// is checked against the market before being returned.
pub fn solve(market: &Market, options: &SolveOptions) -> Result<SolveOutcome> {
    let demand_type = market_demand_type(market);
    let verdict = is_totally_unimodular(&demand_type.matrix(), &options.budget)?;
    if let TuVerdict::Violated(witness) = &verdict {
        if !options.force {
            return Ok(SolveOutcome::NotTotallyUnimodular {
                demand_type,
                witness: witness.clone(),
            });
        }
    }
    let mut search = options.search.clone();
    if let Some(seed) = &options.seed {
        search
            .sources
            .insert(0, CandidateSource::UserSupplied(seed.clone()));
    }
    let seed = match find_stable_continuum(market, &search) {
        Ok(seed) => seed,
        Err(Error::SearchExhausted { attempts }) => {
            return Ok(SolveOutcome::SearchExhausted { attempts })
        }
        Err(e) => return Err(e),
    };
    let system = build_system(market, &seed)?;
    let vertex = lp::basic_feasible_solution(&system.b, &system.rhs())?;
    if !lp::is_integral(&vertex) {
        if verdict.is_totally_unimodular() {
            return Err(Error::Internal(
                "fractional vertex despite a totally unimodular demand type".into(),
            ));
        }
        return Ok(SolveOutcome::NonIntegralVertex { system, vertex });
    }
    let rounded = vertex_to_matching(&system, &vertex)?;
    let matching = lift_to_discrete(&rounded)?;
    if !market.is_stable(&matching)? {
        return Err(Error::Internal(format!(
            "rounded matching {matching:?} is not stable"
        )));
    }
    Ok(SolveOutcome::Stable(Box::new(SolveReport {
        demand_type,
        verdict,
        seed,
        system,
        vertex,
        matching,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, ratio};

    fn sub(values: &[(i64, i64)]) -> Subpopulation {
        Subpopulation::new(values.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    const H: (i64, i64) = (1, 2);
    const Z: (i64, i64) = (0, 1);

    fn half_matching() -> PseudoMatching {
        PseudoMatching::new(vec![sub(&[H, H, H]), sub(&[H, H, Z])], sub(&[Z, Z, H])).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn walkthrough_system() {
        let market = fixtures::three_worker_market();
        let sys = build_system(&market, &half_matching()).unwrap();
        assert_eq!(
            sys.b.to_rows(),
            vec![
                vec![1, 1, 0, 0, 0],
                vec![0, 0, 1, 1, 0],
                vec![1, 0, 1, 0, 0],
                vec![1, 0, 1, 0, 0],
                vec![0, 1, 0, 0, 1]
            ]
        );
        assert_eq!(sys.z_hat, vec![ratio(1, 2); 5]);
        let kinds: Vec<ColumnKind> = sys.columns.iter().map(|c| c.kind).collect();
        assert_eq!(
            kinds,
            vec![
                ColumnKind::AcceptableSet(0),
                ColumnKind::AcceptableSet(1),
                ColumnKind::AcceptableSet(0),
                ColumnKind::Idle,
                ColumnKind::Unmatched(2)
            ]
        );

        let z = find_integral_vertex(&sys).unwrap();
        assert!(sys.is_solution(&z).unwrap());
        let m = vertex_to_matching(&sys, &z).unwrap();
        assert!(verify_stable_continuum(&market, &m).unwrap());

        let given = ints(&[1, 0, 0, 1, 1]);
        assert!(sys.is_solution(&given).unwrap());
        let m = vertex_to_matching(&sys, &given).unwrap();
        assert_eq!(m.firm(FirmId(0)), &sub(&[(1, 1), (1, 1), Z]));
        assert!(m.firm(FirmId(1)).is_zero());
        assert_eq!(m.unmatched(), &sub(&[Z, Z, (1, 1)]));
        let mu = lift_to_discrete(&m).unwrap();
        assert_eq!(mu.hired(FirmId(0)), WorkerSet::from_workers([0, 1]));
        assert_eq!(mu.employer(2), None);
        assert!(market.is_stable(&mu).unwrap());
    }

    #[test]
    fn integral_seed_is_its_own_vertex() {
        let market = fixtures::stable_complements();
        let mu = DiscreteMatching::new(vec![Some(FirmId(1)), Some(FirmId(1))]);
        let seed = PseudoMatching::from_discrete(&mu, 2);
        let sys = build_system(&market, &seed).unwrap();
        assert!(lp::is_integral(&sys.z_hat));
        assert_eq!(sys.columns.len(), 2);
        assert_eq!(vertex_to_matching(&sys, &sys.z_hat).unwrap(), seed);
    }

    #[test]
    fn unstable_seed_is_rejected() {
        let market = fixtures::three_worker_market();
        let m = PseudoMatching::from_discrete(&DiscreteMatching::unmatched(3), 2);
        assert!(matches!(
            build_system(&market, &m),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn complementary_system_has_only_fractional_vertices() {
        let market = fixtures::no_stable_complements();
        let half = PseudoMatching::new(vec![sub(&[H, H]), sub(&[H, H])], sub(&[Z, Z])).unwrap();
        let sys = build_system(&market, &half).unwrap();
        assert!(matches!(
            find_integral_vertex(&sys),
            Err(Error::NonIntegral(_))
        ));
        let vertices = lp::enumerate_vertices(&sys.b, &sys.rhs(), &Budget::default()).unwrap();
        assert!(!vertices.is_empty());
        assert!(vertices.iter().all(|v| !lp::is_integral(v)));
    }

    #[test]
    fn vertex_to_matching_rejects_bad_vertices() {
        let market = fixtures::three_worker_market();
        let sys = build_system(&market, &half_matching()).unwrap();
        assert!(vertex_to_matching(&sys, &sys.z_hat).is_err());
        assert!(vertex_to_matching(&sys, &ints(&[1, 1, 0, 0, 0])).is_err());
    }

    #[test]
    fn solve_examples() {
        let options = SolveOptions::default();
        match solve(&fixtures::stable_complements(), &options).unwrap() {
            SolveOutcome::Stable(report) => {
                assert_eq!(report.matching.hired(FirmId(1)), WorkerSet::full(2));
            }
            other => panic!("unexpected {other:?}"),
        }
        match solve(&fixtures::no_stable_complements(), &options).unwrap() {
            SolveOutcome::NotTotallyUnimodular { witness, .. } => {
                assert_eq!(witness.determinant, (-2).into());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            solve(&fixtures::unimodular_not_tu(), &options).unwrap(),
            SolveOutcome::NotTotallyUnimodular { .. }
        ));
    }

    #[test]
    fn solve_from_supplied_seed() {
        let market = fixtures::three_worker_market();
        let options = SolveOptions {
            seed: Some(half_matching()),
            ..SolveOptions::default()
        };
        match solve(&market, &options).unwrap() {
            SolveOutcome::Stable(report) => {
                assert_eq!(report.seed, half_matching());
                assert!(market.is_stable(&report.matching).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn forced_solve_reports_fractional_vertex() {
        let market = fixtures::no_stable_complements();
        let half = PseudoMatching::new(vec![sub(&[H, H]), sub(&[H, H])], sub(&[Z, Z])).unwrap();
        let options = SolveOptions {
            force: true,
            seed: Some(half),
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve(&market, &options).unwrap(),
            SolveOutcome::NonIntegralVertex { .. }
        ));
    }
}
