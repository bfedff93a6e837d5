//! JSON files for markets, technology trees and continuum matchings.
//!
//! Every file carries `"format_version": 1`. Agents are referred to by name;
//! their position in the `workers` and `firms` lists fixes their index.

use indexmap::IndexMap;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::continuum::{PseudoMatching, Subpopulation};
use crate::error::{Error, Result};
use crate::market::{
    DiscreteMatching, FirmId, FirmPreference, Market, WorkerPreference, WorkerSet,
};
use crate::rational::{self, Rational};
use crate::tree::TechnologyTree;

pub const FORMAT_VERSION: u32 = 1;

fn check_version(version: u32) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported format_version {version}, expected {FORMAT_VERSION}"
        )));
    }
    Ok(())
}

fn index_names(kind: &str, names: &[String]) -> Result<IndexMap<String, usize>> {
    let mut index = IndexMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::InvalidMarket(format!(
                "{kind} {name:?} is declared twice"
            )));
        }
    }
    Ok(index)
}

fn lookup(index: &IndexMap<String, usize>, kind: &str, name: &str) -> Result<usize> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| Error::InvalidMarket(format!("unknown {kind} {name:?}")))
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

/// Names for the workers and firms of a market.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Names {
    pub workers: Vec<String>,
    pub firms: Vec<String>,
}

impl Names {
    /// `w1, w2, …` and `f1, f2, …`.
    pub fn numbered(n_workers: usize, n_firms: usize) -> Self {
        Names {
            workers: (1..=n_workers).map(|i| format!("w{i}")).collect(),
            firms: (1..=n_firms).map(|i| format!("f{i}")).collect(),
        }
    }

    pub fn worker(&self, w: usize) -> &str {
        &self.workers[w]
    }

    pub fn firm(&self, f: FirmId) -> &str {
        &self.firms[f.0]
    }

    pub fn holder(&self, holder: Option<FirmId>) -> &str {
        match holder {
            Some(f) => self.firm(f),
            None => "unmatched",
        }
    }

    pub fn set(&self, set: WorkerSet) -> String {
        let parts: Vec<&str> = set.iter().map(|w| self.worker(w)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    pub format_version: u32,
    pub workers: Vec<String>,
    pub firms: Vec<String>,
    /// Acceptable worker sets per firm, best first. A trailing empty array
    /// stands for the implicit empty set and may be omitted.
    #[serde(default)]
    pub firm_prefs: IndexMap<String, Vec<Vec<String>>>,
    /// Acceptable firms per worker, best first.
    #[serde(default)]
    pub worker_prefs: IndexMap<String, Vec<String>>,
}

impl MarketFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: MarketFile = parse_json(text)?;
        check_version(file.format_version)?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn names(&self) -> Names {
        Names {
            workers: self.workers.clone(),
            firms: self.firms.clone(),
        }
    }

    pub fn to_market(&self) -> Result<Market> {
        let workers = index_names("worker", &self.workers)?;
        let firms = index_names("firm", &self.firms)?;
        for name in self.firm_prefs.keys() {
            lookup(&firms, "firm", name)?;
        }
        for name in self.worker_prefs.keys() {
            lookup(&workers, "worker", name)?;
        }
        let firm_prefs = self
            .firms
            .iter()
            .map(|name| {
                let lists = self.firm_prefs.get(name).map(Vec::as_slice).unwrap_or(&[]);
                let mut sets = Vec::with_capacity(lists.len());
                for (k, list) in lists.iter().enumerate() {
                    if list.is_empty() {
                        if k + 1 != lists.len() {
                            return Err(Error::InvalidPreference(format!(
                                "firm {name:?} lists sets after the empty set"
                            )));
                        }
                        break;
                    }
                    let mut set = WorkerSet::EMPTY;
                    for w in list {
                        let w = lookup(&workers, "worker", w)?;
                        if set.contains(w) {
                            return Err(Error::InvalidPreference(format!(
                                "firm {name:?} repeats worker {:?} within a set",
                                self.workers[w]
                            )));
                        }
                        set.insert(w);
                    }
                    sets.push(set);
                }
                FirmPreference::new(sets)
                    .map_err(|e| Error::InvalidPreference(format!("firm {name:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let worker_prefs = self
            .workers
            .iter()
            .map(|name| {
                let list = self
                    .worker_prefs
                    .get(name)
                    .map(Vec::as_slice)
                    .unwrap_or(&[]);
                let ranked = list
                    .iter()
                    .map(|f| lookup(&firms, "firm", f).map(FirmId))
                    .collect::<Result<Vec<_>>>()?;
                WorkerPreference::new(ranked)
                    .map_err(|e| Error::InvalidPreference(format!("worker {name:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Market::new(self.workers.len(), firm_prefs, worker_prefs)
    }

    /// The canonical file for a market: every firm and worker listed, sets
    /// written in worker order, no trailing empty set.
    pub fn from_market(market: &Market, names: &Names) -> Self {
        let firm_prefs = market
            .firms()
            .map(|f| {
                let sets = market
                    .firm_pref(f)
                    .acceptable()
                    .iter()
                    .map(|s| s.iter().map(|w| names.worker(w).to_string()).collect())
                    .collect();
                (names.firm(f).to_string(), sets)
            })
            .collect();
        let worker_prefs = (0..market.n_workers())
            .map(|w| {
                let firms = market
                    .worker_pref(w)
                    .acceptable()
                    .iter()
                    .map(|&f| names.firm(f).to_string())
                    .collect();
                (names.worker(w).to_string(), firms)
            })
            .collect();
        MarketFile {
            format_version: FORMAT_VERSION,
            workers: names.workers.clone(),
            firms: names.firms.clone(),
            firm_prefs,
            worker_prefs,
        }
    }
}

/// A quantity written as `"p/q"`, an integer, or an exact decimal. JSON
/// numbers are read through their decimal text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Text(String),
    Number(serde_json::Number),
}

impl Quantity {
    pub fn value(&self) -> Result<Rational> {
        match self {
            Quantity::Text(t) => rational::parse(t),
            Quantity::Number(n) => rational::parse(&n.to_string()),
        }
    }
}

impl From<&Rational> for Quantity {
    fn from(x: &Rational) -> Self {
        Quantity::Text(rational::format(x))
    }
}

/// A continuum matching or pseudo-matching. Omitted entries are zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingFile {
    pub format_version: u32,
    #[serde(default)]
    pub firms: IndexMap<String, IndexMap<String, Quantity>>,
    #[serde(default)]
    pub unmatched: IndexMap<String, Quantity>,
}

impl MatchingFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: MatchingFile = parse_json(text)?;
        check_version(file.format_version)?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_pseudo_matching(&self, names: &Names) -> Result<PseudoMatching> {
        let workers = index_names("worker", &names.workers)?;
        let firms = index_names("firm", &names.firms)?;
        let n = names.workers.len();
        let read = |entries: &IndexMap<String, Quantity>| -> Result<Subpopulation> {
            let mut values = vec![Rational::zero(); n];
            for (name, q) in entries {
                values[lookup(&workers, "worker", name)?] = q.value()?;
            }
            Subpopulation::new(values)
        };
        let mut held = vec![Subpopulation::zeros(n); names.firms.len()];
        for (name, entries) in &self.firms {
            held[lookup(&firms, "firm", name)?] = read(entries)?;
        }
        PseudoMatching::new(held, read(&self.unmatched)?)
    }

    /// Nonzero entries only, in worker order.
    pub fn from_pseudo_matching(m: &PseudoMatching, names: &Names) -> Self {
        let write = |s: &Subpopulation| -> IndexMap<String, Quantity> {
            (0..s.len())
                .filter(|&w| !s.get(w).is_zero())
                .map(|w| (names.worker(w).to_string(), Quantity::from(s.get(w))))
                .collect()
        };
        MatchingFile {
            format_version: FORMAT_VERSION,
            firms: (0..m.n_firms())
                .map(|f| (names.firm(FirmId(f)).to_string(), write(m.firm(FirmId(f)))))
                .collect(),
            unmatched: write(m.unmatched()),
        }
    }
}

/// Worker name to employer name, `null` when unmatched.
pub fn discrete_matching_json(
    mu: &DiscreteMatching,
    names: &Names,
) -> IndexMap<String, Option<String>> {
    (0..mu.n_workers())
        .map(|w| {
            (
                names.worker(w).to_string(),
                mu.employer(w).map(|f| names.firm(f).to_string()),
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeVertex {
    pub name: String,
    #[serde(default)]
    pub workers: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub format_version: u32,
    pub workers: Vec<String>,
    pub vertices: Vec<TreeVertex>,
    /// `[from, to]` vertex names, pointing away from the root.
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
}

impl TreeFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: TreeFile = parse_json(text)?;
        check_version(file.format_version)?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_tree(&self) -> Result<TechnologyTree> {
        let tree_err = |e: Error| match e {
            Error::InvalidMarket(msg) => Error::InvalidTree(msg),
            other => other,
        };
        let workers = index_names("worker", &self.workers).map_err(tree_err)?;
        let vertex_names: Vec<String> = self.vertices.iter().map(|v| v.name.clone()).collect();
        let vertices_index = index_names("vertex", &vertex_names).map_err(tree_err)?;
        let sets = self
            .vertices
            .iter()
            .map(|v| {
                v.workers
                    .iter()
                    .map(|w| lookup(&workers, "worker", w))
                    .collect::<Result<Vec<_>>>()
                    .map(WorkerSet::from_workers)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(tree_err)?;
        let edges = self
            .edges
            .iter()
            .map(|[a, b]| {
                Ok((
                    lookup(&vertices_index, "vertex", a)?,
                    lookup(&vertices_index, "vertex", b)?,
                ))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(tree_err)?;
        TechnologyTree::new(self.workers.len(), sets, edges)
    }

    /// Vertices named `v0, v1, …` in index order.
    pub fn from_tree(tree: &TechnologyTree, workers: &[String]) -> Self {
        let name = |v: usize| format!("v{v}");
        TreeFile {
            format_version: FORMAT_VERSION,
            workers: workers.to_vec(),
            vertices: tree
                .vertices()
                .iter()
                .enumerate()
                .map(|(v, set)| TreeVertex {
                    name: name(v),
                    workers: set.iter().map(|w| workers[w].clone()).collect(),
                })
                .collect(),
            edges: tree
                .edges()
                .iter()
                .map(|&(a, b)| [name(a), name(b)])
                .collect(),
        }
    }

    pub fn vertex_names(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.name.clone()).collect()
    }
}
