//! Technology trees and the network matrices behind specialist markets.
//!
//! Each vertex is a technology needing a set of workers; each edge is an
//! upgrade needing strictly more. A worker engaged in exactly one upgrade is a
//! specialist. When every worker is a specialist and firms only accept vertex
//! worker sets, each demand vector is, up to sign, a column of a network
//! matrix, so the demand type is totally unimodular.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::demand::{firm_demand_types, market_demand_type, DemandVector};
use crate::error::{Error, Result};
use crate::market::{Market, WorkerSet};
use crate::matrix::IntMatrix;
use crate::unimodular::{is_totally_unimodular, TuVerdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TechnologyTree {
    n_workers: usize,
    vertices: Vec<WorkerSet>,
    /// Edges `(tail, head)` sorted ascending.
    edges: Vec<(usize, usize)>,
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
}

impl TechnologyTree {
    /// Builds a tree from vertex worker sets and directed edges.
    ///
    /// The root is the unique vertex without an incoming edge and must need no
    /// workers. Every other vertex has exactly one incoming edge, everything
    /// is reachable from the root, and each edge strictly grows the worker set.
    pub fn new(
        n_workers: usize,
        vertices: Vec<WorkerSet>,
        mut edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidTree(msg));
        let n = vertices.len();
        if n == 0 {
            return bad("a tree needs at least the root".into());
        }
        let everyone = WorkerSet::full(n_workers);
        if let Some(v) = vertices.iter().position(|s| !s.is_subset_of(everyone)) {
            return bad(format!("vertex {v} uses a worker outside 0..{n_workers}"));
        }
        let mut parent = vec![None; n];
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return bad(format!("edge ({a},{b}) refers to a missing vertex"));
            }
            if parent[b].is_some() {
                return bad(format!("vertex {b} has two incoming edges"));
            }
            if !vertices[a].is_subset_of(vertices[b]) || vertices[a] == vertices[b] {
                return bad(format!(
                    "edge ({a},{b}) does not strictly enlarge {:?} to {:?}",
                    vertices[a], vertices[b]
                ));
            }
            parent[b] = Some(a);
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        let [root] = roots[..] else {
            return bad(format!("expected one root, found {}", roots.len()));
        };
        if !vertices[root].is_empty() {
            return bad(format!("root {root} requires workers"));
        }
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &(a, b) in &edges {
                if a == v {
                    depth[b] = depth[v] + 1;
                    stack.push(b);
                }
            }
        }
        if depth.contains(&usize::MAX) {
            return bad("some vertex is not reachable from the root".into());
        }
        edges.sort_unstable();
        Ok(TechnologyTree {
            n_workers,
            vertices,
            edges,
            root,
            parent,
            depth,
        })
    }

    pub fn n_workers(&self) -> usize {
        self.n_workers
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn vertex(&self, v: usize) -> WorkerSet {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[WorkerSet] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Workers engaged in the upgrade along edge `e`.
    pub fn upgrade_workers(&self, e: usize) -> WorkerSet {
        let (a, b) = self.edges[e];
        self.vertices[b].difference(self.vertices[a])
    }

    /// Number of upgrades worker `w` engages in.
    pub fn engagement(&self, w: usize) -> usize {
        (0..self.edges.len())
            .filter(|&e| self.upgrade_workers(e).contains(w))
            .count()
    }

    pub fn is_specialist(&self, w: usize) -> bool {
        self.engagement(w) == 1
    }

    pub fn all_specialists(&self) -> bool {
        (0..self.n_workers).all(|w| self.is_specialist(w))
    }

    /// The one upgrade a specialist engages in.
    pub fn specialist_edge(&self, w: usize) -> Option<usize> {
        let mut found = (0..self.edges.len()).filter(|&e| self.upgrade_workers(e).contains(w));
        match (found.next(), found.next()) {
            (Some(e), None) => Some(e),
            _ => None,
        }
    }

    fn edge_index(&self, tail: usize, head: usize) -> usize {
        self.edges.binary_search(&(tail, head)).expect("tree edge")
    }

    /// Signed incidence of the path from `from` to `to` on each tree edge:
    /// `+1` when walked from tail to head, `-1` against it.
    pub fn path_signs(&self, from: usize, to: usize) -> Vec<i64> {
        let mut signs = vec![0; self.edges.len()];
        let (mut a, mut b) = (from, to);
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let p = self.parent[a].expect("non-root");
                signs[self.edge_index(p, a)] = -1;
                a = p;
            } else {
                let p = self.parent[b].expect("non-root");
                signs[self.edge_index(p, b)] = 1;
                b = p;
            }
        }
        signs
    }

    /// Pairs `(i, j)` with `i < j`: the edges of the complete graph on the
    /// vertices, each oriented from the lower index to the higher.
    pub fn complete_graph_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_vertices();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    }

    /// The network matrix: one row per tree edge, one column per complete
    /// graph edge.
    pub fn network_matrix(&self) -> IntMatrix {
        let columns: Vec<Vec<i64>> = self
            .complete_graph_edges()
            .into_iter()
            .map(|(i, j)| self.path_signs(i, j))
            .collect();
        IntMatrix::from_columns(self.edges.len(), &columns).expect("consistent dimensions")
    }

    /// The network matrix with one row per worker, copied from the row of the
    /// worker's upgrade.
    pub fn worker_network_matrix(&self) -> Result<IntMatrix> {
        let h = self.network_matrix();
        let rows = (0..self.n_workers)
            .map(|w| {
                self.specialist_edge(w)
                    .map(|e| h.row(e).to_vec())
                    .ok_or_else(|| {
                        Error::Precondition(format!(
                            "worker {w} engages in {} upgrades",
                            self.engagement(w)
                        ))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Ok(IntMatrix::zeros(0, h.cols()));
        }
        IntMatrix::from_rows(&rows)
    }

    /// Whether every acceptable set of every firm is the worker set of some
    /// vertex.
    pub fn supports_unit_demand(&self, market: &Market) -> bool {
        market.n_workers() == self.n_workers
            && market
                .firm_prefs()
                .iter()
                .flat_map(|p| p.acceptable())
                .all(|s| self.vertices.contains(s))
    }
}

/// Both network matrices of a specialist tree.
pub fn network_matrices(tree: &TechnologyTree) -> Result<(IntMatrix, IntMatrix)> {
    Ok((tree.network_matrix(), tree.worker_network_matrix()?))
}

/// A demand vector found among the columns of the worker network matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMatch {
    pub vector: DemandVector,
    pub column: usize,
    /// `1` if the vector equals the column, `-1` if it equals its negation.
    pub sign: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeCertificate {
    /// Per firm, each demand vector matched to the first column equal to it
    /// up to sign.
    pub firms: Vec<Vec<ColumnMatch>>,
    pub verdict: TuVerdict,
}

/// Certifies that a unit-demand market over a specialist tree has a totally
/// unimodular demand type, by matching every demand vector to a network
/// matrix column and by running the direct test.
pub fn certify_specialist_market(
    market: &Market,
    tree: &TechnologyTree,
    budget: &Budget,
) -> Result<TreeCertificate> {
    if !tree.supports_unit_demand(market) {
        return Err(Error::Precondition(
            "some acceptable set is not a technology of the tree".into(),
        ));
    }
    let h = tree.worker_network_matrix()?;
    let columns = h.columns();
    let firms = firm_demand_types(market)
        .into_iter()
        .map(|d| {
            d.vectors()
                .iter()
                .map(|v| {
                    let neg = v.negated();
                    columns
                        .iter()
                        .enumerate()
                        .find_map(|(c, col)| {
                            if col.as_slice() == v.entries() {
                                Some((c, 1))
                            } else if col.as_slice() == neg.entries() {
                                Some((c, -1))
                            } else {
                                None
                            }
                        })
                        .map(|(column, sign)| ColumnMatch {
                            vector: v.clone(),
                            column,
                            sign,
                        })
                        .ok_or_else(|| {
                            Error::Internal(format!("demand vector {v} is not a network column"))
                        })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = is_totally_unimodular(&market_demand_type(market).matrix(), budget)?;
    if !verdict.is_totally_unimodular() {
        return Err(Error::Internal(format!(
            "specialist market demand type is not totally unimodular: {verdict:?}"
        )));
    }
    Ok(TreeCertificate { firms, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(ws: &[usize]) -> WorkerSet {
        WorkerSet::from_workers(ws.iter().copied())
    }

    #[test]
    fn specialist_tree_matrices() {
        let tree = fixtures::specialist_tree();
        let (h, hw) = network_matrices(&tree).unwrap();
        assert_eq!(
            h.to_rows(),
            vec![
                vec![1, 0, 0, -1, -1, 0],
                vec![0, 1, 1, 1, 1, 0],
                vec![0, 0, 1, 0, 1, 1]
            ]
        );
        assert_eq!(
            hw.to_rows(),
            vec![
                vec![1, 0, 0, -1, -1, 0],
                vec![1, 0, 0, -1, -1, 0],
                vec![0, 1, 1, 1, 1, 0],
                vec![0, 0, 1, 0, 1, 1]
            ]
        );
    }

    #[test]
    fn specialists() {
        let tree = fixtures::specialist_tree();
        assert!((0..4).all(|w| tree.is_specialist(w)));
        assert!(tree.all_specialists());
        let chain = fixtures::chain_tree_with_generalist();
        assert!(!chain.is_specialist(0));
        assert_eq!(chain.engagement(0), 2);
        let star = fixtures::star_tree_with_generalist();
        assert!(!star.all_specialists());
        let idle = TechnologyTree::new(2, vec![set(&[]), set(&[0])], vec![(0, 1)]).unwrap();
        assert!(!idle.is_specialist(1));
        assert!(idle.worker_network_matrix().is_err());
    }

    #[test]
    fn unit_demand() {
        let tree = fixtures::specialist_tree();
        assert!(tree.supports_unit_demand(&fixtures::specialist_market()));
        let off_tree = Market::new(
            4,
            vec![crate::market::FirmPreference::new(vec![set(&[0, 2])]).unwrap()],
            vec![Default::default(); 4],
        )
        .unwrap();
        assert!(!tree.supports_unit_demand(&off_tree));
        let empty = Market::new(4, vec![], vec![Default::default(); 4]).unwrap();
        assert!(tree.supports_unit_demand(&empty));
    }

    #[test]
    fn single_edge_tree() {
        let tree = TechnologyTree::new(1, vec![set(&[]), set(&[0])], vec![(0, 1)]).unwrap();
        let (h, hw) = network_matrices(&tree).unwrap();
        assert_eq!(h.to_rows(), vec![vec![1]]);
        assert_eq!(hw.to_rows(), vec![vec![1]]);
        let market = Market::new(
            1,
            vec![crate::market::FirmPreference::new(vec![set(&[0])]).unwrap()],
            vec![Default::default()],
        )
        .unwrap();
        let cert = certify_specialist_market(&market, &tree, &Budget::default()).unwrap();
        assert_eq!(cert.firms[0][0].column, 0);
        assert_eq!(cert.firms[0][0].sign, 1);
    }

    #[test]
    fn certificate_for_specialist_market() {
        let cert = certify_specialist_market(
            &fixtures::specialist_market(),
            &fixtures::specialist_tree(),
            &Budget::default(),
        )
        .unwrap();
        let cols = |ms: &[ColumnMatch]| {
            let mut v: Vec<(usize, i64)> = ms.iter().map(|m| (m.column, m.sign)).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(cols(&cert.firms[0]), vec![(0, 1), (1, 1), (3, -1)]);
        assert_eq!(cols(&cert.firms[1]), vec![(0, 1), (2, 1), (4, 1)]);
        assert!(cert.verdict.is_totally_unimodular());
    }

    #[test]
    fn certificate_preconditions() {
        let market = fixtures::no_stable_complements();
        let chain = fixtures::chain_tree_with_generalist();
        assert!(chain.supports_unit_demand(&market));
        assert!(matches!(
            certify_specialist_market(&market, &chain, &Budget::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rejects_malformed_trees() {
        let two_roots = TechnologyTree::new(1, vec![set(&[]), set(&[0])], vec![]);
        assert!(two_roots.is_err());
        let not_growing = TechnologyTree::new(
            1,
            vec![set(&[]), set(&[0]), set(&[0])],
            vec![(0, 1), (1, 2)],
        );
        assert!(not_growing.is_err());
        let rooted_at_workers = TechnologyTree::new(1, vec![set(&[0])], vec![]);
        assert!(rooted_at_workers.is_err());
        let cycle = TechnologyTree::new(
            2,
            vec![set(&[]), set(&[0]), set(&[0, 1])],
            vec![(1, 2), (2, 1)],
        );
        assert!(cycle.is_err());
    }
}
