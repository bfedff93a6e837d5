//! The `tumatch` command line: argument parsing, file loading and report
//! rendering. [`run`] returns the exit code and the text instead of printing,
//! so tests can drive it directly.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use tumatch_core::budget::Budget;
use tumatch_core::continuum::{find_instability, PseudoMatching};
use tumatch_core::demand::{firm_demand_types, market_demand_type, DemandType, DemandVector};
use tumatch_core::format::{discrete_matching_json, MarketFile, MatchingFile, Names, TreeFile};
use tumatch_core::market::{DiscreteMatching, FirmId, Market};
use tumatch_core::matrix::IntMatrix;
use tumatch_core::rational::{self, Rational};
use tumatch_core::round::{
    solve, ColumnKind, ColumnMeta, ConstraintSystem, SolveOptions, SolveOutcome,
};
use tumatch_core::search::{verify_stable_continuum, SearchConfig};
use tumatch_core::tree::{certify_specialist_market, TechnologyTree};
use tumatch_core::unimodular::{is_totally_unimodular, is_unimodular, MinorWitness};
use tumatch_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tumatch",
    version,
    about = "Stable matchings through totally unimodular demand types"
)]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Cap on exhaustive enumerations: stable matching assignments and
    /// square submatrices.
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<u128>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-firm and joint demand types.
    DemandType { market: PathBuf },
    /// Whether the joint demand type is totally unimodular.
    CheckTu { market: PathBuf },
    /// Find a stable matching by rounding a stable continuum matching.
    Solve {
        market: PathBuf,
        /// Seed for the randomized search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run even when the demand type is not totally unimodular.
        #[arg(long)]
        force: bool,
        /// Cross-check the result against the brute-force oracle.
        #[arg(long)]
        oracle_check: bool,
        /// Seed the rounding with this continuum matching.
        #[arg(long, value_name = "FILE")]
        from_matching: Option<PathBuf>,
    },
    /// List every stable matching by brute force.
    Oracle { market: PathBuf },
    /// Specialist check and network matrices of a technology tree.
    Tree {
        tree: PathBuf,
        market: Option<PathBuf>,
    },
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

type Report = std::result::Result<(i32, String), String>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok((code, stdout)) => Output {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(message) => Output {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        },
    }
}

pub fn execute(cli: &Cli) -> Report {
    let mut budget = Budget::default();
    if let Some(n) = cli.budget {
        budget.max_assignments = n;
        budget.max_submatrices = n;
    }
    let ctx = Context {
        json: cli.json,
        budget,
    };
    match &cli.command {
        Command::DemandType { market } => ctx.demand_type(market),
        Command::CheckTu { market } => ctx.check_tu(market),
        Command::Solve {
            market,
            seed,
            force,
            oracle_check,
            from_matching,
        } => ctx.solve(
            market,
            *seed,
            *force,
            *oracle_check,
            from_matching.as_deref(),
        ),
        Command::Oracle { market } => ctx.oracle(market),
        Command::Tree { tree, market } => ctx.tree(tree, market.as_deref()),
    }
}

fn read(path: &Path) -> std::result::Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn in_file(path: &Path) -> impl Fn(Error) -> String + '_ {
    move |e| format!("{}: {e}", path.display())
}

fn load_market(path: &Path) -> std::result::Result<(Market, Names), String> {
    let file = MarketFile::parse(&read(path)?).map_err(in_file(path))?;
    let market = file.to_market().map_err(in_file(path))?;
    Ok((market, file.names()))
}

fn load_tree(path: &Path) -> std::result::Result<(TechnologyTree, TreeFile), String> {
    let file = TreeFile::parse(&read(path)?).map_err(in_file(path))?;
    let tree = file.to_tree().map_err(in_file(path))?;
    Ok((tree, file))
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn vector_json(v: &DemandVector) -> Value {
    json!(v.entries())
}

fn demand_json(d: &DemandType) -> Value {
    Value::Array(d.vectors().iter().map(vector_json).collect())
}

fn rational_json(x: &Rational) -> Value {
    Value::String(rational::format(x))
}

fn rationals(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(rational::format).collect();
    format!("({})", parts.join(","))
}

fn big_json(x: &impl ToString) -> Value {
    serde_json::from_str(&x.to_string()).expect("integers are valid JSON numbers")
}

fn matrix_json(m: &IntMatrix) -> Value {
    json!(m.to_rows())
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

fn holder_of(names: &Names, holder: Option<FirmId>) -> String {
    names.holder(holder).to_string()
}

fn column_label(meta: &ColumnMeta, names: &Names) -> String {
    match meta.kind {
        ColumnKind::AcceptableSet(_) => format!(
            "{}:{}",
            holder_of(names, meta.owner),
            names.set(meta.workers)
        ),
        ColumnKind::Idle => format!("{}:idle", holder_of(names, meta.owner)),
        ColumnKind::Unmatched(w) => format!("unmatched:{}", names.worker(w)),
    }
}

fn witness_text(w: &MinorWitness, d: &DemandType, names: &Names) -> String {
    let rows: Vec<&str> = w.rows.iter().map(|&r| names.worker(r)).collect();
    let cols: Vec<String> = w.cols.iter().map(|&c| d.vectors()[c].to_string()).collect();
    format!(
        "witness: rows {{{}}}, columns {{{}}}, determinant {}\n",
        rows.join(","),
        cols.join(","),
        w.determinant
    )
}

fn witness_json(w: &MinorWitness, d: &DemandType, names: &Names) -> Value {
    json!({
        "rows": w.rows.iter().map(|&r| names.worker(r)).collect::<Vec<_>>(),
        "columns": w.cols.iter().map(|&c| vector_json(&d.vectors()[c])).collect::<Vec<_>>(),
        "determinant": big_json(&w.determinant),
    })
}

fn pseudo_text(m: &PseudoMatching, names: &Names) -> String {
    let mut out = String::new();
    for f in 0..m.n_firms() {
        let f = FirmId(f);
        writeln!(out, "{}: {}", names.firm(f), m.firm(f)).unwrap();
    }
    writeln!(out, "unmatched: {}", m.unmatched()).unwrap();
    out
}

fn pseudo_json(m: &PseudoMatching, names: &Names) -> Value {
    serde_json::to_value(MatchingFile::from_pseudo_matching(m, names)).expect("serializable")
}

fn matching_text(mu: &DiscreteMatching, names: &Names) -> String {
    (0..mu.n_workers())
        .map(|w| format!("{}: {}\n", names.worker(w), names.holder(mu.employer(w))))
        .collect()
}

fn workforces_text(mu: &DiscreteMatching, market: &Market, names: &Names) -> String {
    let mut parts: Vec<String> = market
        .firms()
        .map(|f| format!("{}={}", names.firm(f), names.set(mu.hired(f))))
        .collect();
    parts.push(format!("unmatched={}", names.set(mu.unmatched_workers())));
    parts.join(" ")
}

fn system_text(system: &ConstraintSystem, names: &Names) -> String {
    let labels: Vec<String> = system
        .columns
        .iter()
        .map(|c| column_label(c, names))
        .collect();
    let mut out = String::new();
    writeln!(out, "columns: {}", labels.join(" ")).unwrap();
    out.push_str("B:\n");
    out.push_str(&indent(&system.b.to_string()));
    writeln!(out, "z_hat: {}", rationals(&system.z_hat)).unwrap();
    out
}

fn system_json(system: &ConstraintSystem, names: &Names) -> Value {
    json!({
        "columns": system.columns.iter().map(|c| column_label(c, names)).collect::<Vec<_>>(),
        "B": matrix_json(&system.b),
        "z_hat": system.z_hat.iter().map(rational_json).collect::<Vec<_>>(),
    })
}

struct Context {
    json: bool,
    budget: Budget,
}

impl Context {
    fn demand_type(&self, path: &Path) -> Report {
        let (market, names) = load_market(path)?;
        let per_firm = firm_demand_types(&market);
        let joint = market_demand_type(&market);
        if self.json {
            let firms: serde_json::Map<String, Value> = market
                .firms()
                .map(|f| (names.firm(f).to_string(), demand_json(&per_firm[f.0])))
                .collect();
            let value = json!({
                "workers": names.workers,
                "firms": firms,
                "demand_type": demand_json(&joint),
            });
            return Ok((EXIT_OK, pretty(&value)));
        }
        let mut out = String::new();
        writeln!(out, "workers: ({})", names.workers.join(",")).unwrap();
        for f in market.firms() {
            writeln!(out, "{}: {}", names.firm(f), per_firm[f.0]).unwrap();
        }
        writeln!(out, "demand type: {joint}").unwrap();
        Ok((EXIT_OK, out))
    }

    fn check_tu(&self, path: &Path) -> Report {
        let (market, names) = load_market(path)?;
        let d = market_demand_type(&market);
        let matrix = d.matrix();
        let verdict = is_totally_unimodular(&matrix, &self.budget).map_err(in_file(path))?;
        let witness = verdict.witness();
        let unimodular = match witness {
            Some(_) => Some(is_unimodular(&matrix, &self.budget).map_err(in_file(path))?),
            None => None,
        };
        let code = if witness.is_some() {
            EXIT_NEGATIVE
        } else {
            EXIT_OK
        };
        if self.json {
            let value = json!({
                "demand_type": demand_json(&d),
                "totally_unimodular": witness.is_none(),
                "witness": witness.map(|w| witness_json(w, &d, &names)),
                "unimodular": unimodular.unwrap_or(true),
            });
            return Ok((code, pretty(&value)));
        }
        let mut out = String::new();
        writeln!(out, "demand type: {d}").unwrap();
        match witness {
            None => out.push_str("totally unimodular: yes\n"),
            Some(w) => {
                out.push_str("totally unimodular: no\n");
                out.push_str(&witness_text(w, &d, &names));
                let yes = if unimodular == Some(true) {
                    "yes"
                } else {
                    "no"
                };
                writeln!(out, "unimodular: {yes}").unwrap();
            }
        }
        Ok((code, out))
    }

    fn solve(
        &self,
        path: &Path,
        seed: u64,
        force: bool,
        oracle_check: bool,
        from_matching: Option<&Path>,
    ) -> Report {
        let (market, names) = load_market(path)?;
        let user_seed = match from_matching {
            Some(p) => {
                let file = MatchingFile::parse(&read(p)?).map_err(in_file(p))?;
                let m = file.to_pseudo_matching(&names).map_err(in_file(p))?;
                if m.n_workers() != market.n_workers() || m.n_firms() != market.n_firms() {
                    return Err(format!("{}: matching does not fit the market", p.display()));
                }
                if !verify_stable_continuum(&market, &m).map_err(in_file(p))? {
                    let reason = if m.is_matching() {
                        format!("{:?}", find_instability(&market, &m).map_err(in_file(p))?)
                    } else {
                        "some worker type does not sum to one".to_string()
                    };
                    let text =
                        format!("supplied matching is not a stable continuum matching: {reason}\n");
                    return Ok((EXIT_NEGATIVE, self.message(&text, "unstable_seed")));
                }
                Some(m)
            }
            None => None,
        };
        let options = SolveOptions {
            force,
            seed: user_seed,
            search: SearchConfig {
                seed,
                budget: self.budget.clone(),
                ..SearchConfig::default()
            },
            budget: self.budget.clone(),
        };
        let outcome = solve(&market, &options).map_err(in_file(path))?;
        let d = market_demand_type(&market);
        match outcome {
            SolveOutcome::NotTotallyUnimodular {
                demand_type,
                witness,
            } => {
                if self.json {
                    let value = json!({
                        "verdict": "not_totally_unimodular",
                        "demand_type": demand_json(&demand_type),
                        "witness": witness_json(&witness, &demand_type, &names),
                    });
                    return Ok((EXIT_NEGATIVE, pretty(&value)));
                }
                let mut out = format!("demand type: {demand_type}\n");
                out.push_str("demand type not totally unimodular\n");
                out.push_str(&witness_text(&witness, &demand_type, &names));
                Ok((EXIT_NEGATIVE, out))
            }
            SolveOutcome::SearchExhausted { attempts } => {
                let text =
                    format!("no stable continuum matching found after {attempts} candidate(s)\n");
                Ok((EXIT_NEGATIVE, self.message(&text, "search_exhausted")))
            }
            SolveOutcome::NonIntegralVertex { system, vertex } => {
                if self.json {
                    let value = json!({
                        "verdict": "non_integral_vertex",
                        "demand_type": demand_json(&d),
                        "system": system_json(&system, &names),
                        "z": vertex.iter().map(rational_json).collect::<Vec<_>>(),
                    });
                    return Ok((EXIT_NEGATIVE, pretty(&value)));
                }
                let mut out = format!("demand type: {d}\ntotally unimodular: no (forced)\n");
                out.push_str(&system_text(&system, &names));
                writeln!(out, "z: {}", rationals(&vertex)).unwrap();
                out.push_str("vertex is not integral\n");
                Ok((EXIT_NEGATIVE, out))
            }
            SolveOutcome::Stable(report) => {
                let oracle = if oracle_check {
                    let found = market
                        .enumerate_stable_matchings(&self.budget)
                        .map_err(in_file(path))?;
                    if !found.contains(&report.matching) {
                        return Err(format!(
                            "oracle disagrees: {} is not among its stable matchings",
                            workforces_text(&report.matching, &market, &names)
                        ));
                    }
                    Some(found.len())
                } else {
                    None
                };
                let tu = report.verdict.is_totally_unimodular();
                if self.json {
                    let value = json!({
                        "verdict": "stable",
                        "demand_type": demand_json(&report.demand_type),
                        "totally_unimodular": tu,
                        "seed_matching": pseudo_json(&report.seed, &names),
                        "system": system_json(&report.system, &names),
                        "z": report.vertex.iter().map(rational_json).collect::<Vec<_>>(),
                        "matching": discrete_matching_json(&report.matching, &names),
                        "oracle_stable_matchings": oracle,
                    });
                    return Ok((EXIT_OK, pretty(&value)));
                }
                let mut out = format!("demand type: {}\n", report.demand_type);
                out.push_str(if tu {
                    "totally unimodular: yes\n"
                } else {
                    "totally unimodular: no (forced)\n"
                });
                out.push_str("seed matching:\n");
                out.push_str(&indent(&pseudo_text(&report.seed, &names)));
                out.push_str(&system_text(&report.system, &names));
                writeln!(out, "z: {}", rationals(&report.vertex)).unwrap();
                out.push_str("stable matching:\n");
                out.push_str(&indent(&matching_text(&report.matching, &names)));
                if let Some(count) = oracle {
                    writeln!(
                        out,
                        "oracle check: confirmed among {count} stable matching(s)"
                    )
                    .unwrap();
                }
                Ok((EXIT_OK, out))
            }
        }
    }

    fn oracle(&self, path: &Path) -> Report {
        let (market, names) = load_market(path)?;
        let found = market
            .enumerate_stable_matchings(&self.budget)
            .map_err(in_file(path))?;
        let code = if found.is_empty() {
            EXIT_NEGATIVE
        } else {
            EXIT_OK
        };
        if self.json {
            let list: Vec<Value> = found
                .iter()
                .map(|mu| json!(discrete_matching_json(mu, &names)))
                .collect();
            return Ok((code, pretty(&json!({ "stable_matchings": list }))));
        }
        if found.is_empty() {
            return Ok((code, "stable matchings: none\n".into()));
        }
        let mut out = format!("stable matchings: {}\n", found.len());
        for mu in &found {
            writeln!(out, "  {}", workforces_text(mu, &market, &names)).unwrap();
        }
        Ok((code, out))
    }

    fn tree(&self, tree_path: &Path, market_path: Option<&Path>) -> Report {
        let (tree, file) = load_tree(tree_path)?;
        let vertex_names = file.vertex_names();
        let workers = &file.workers;
        let edge_label =
            |(a, b): (usize, usize)| format!("{}->{}", vertex_names[a], vertex_names[b]);
        let generalists: Vec<&str> = (0..tree.n_workers())
            .filter(|&w| !tree.is_specialist(w))
            .map(|w| workers[w].as_str())
            .collect();
        let h = tree.network_matrix();
        let h_prime = if generalists.is_empty() {
            Some(tree.worker_network_matrix().map_err(in_file(tree_path))?)
        } else {
            None
        };
        let mut code = if generalists.is_empty() {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        };

        let mut certificate = None;
        let mut market_problem = None;
        if let Some(path) = market_path {
            let (market, names) = load_market(path)?;
            if names.workers != *workers {
                return Err(format!(
                    "{}: workers differ from the tree's",
                    path.display()
                ));
            }
            if !tree.supports_unit_demand(&market) {
                market_problem =
                    Some("some acceptable set is not a technology of the tree".to_string());
            } else if generalists.is_empty() {
                let cert = certify_specialist_market(&market, &tree, &self.budget)
                    .map_err(in_file(path))?;
                certificate = Some((cert, names));
            }
            if market_problem.is_some() {
                code = EXIT_NEGATIVE;
            }
        }

        if self.json {
            let specialists: serde_json::Map<String, Value> = (0..tree.n_workers())
                .map(|w| (workers[w].clone(), json!(tree.is_specialist(w))))
                .collect();
            let cert = certificate.as_ref().map(|(c, names)| {
                let firms: serde_json::Map<String, Value> = c
                    .firms
                    .iter()
                    .enumerate()
                    .map(|(f, matches)| {
                        let list: Vec<Value> = matches
                            .iter()
                            .map(|m| json!({ "vector": vector_json(&m.vector), "column": m.column + 1, "sign": m.sign }))
                            .collect();
                        (names.firm(FirmId(f)).to_string(), Value::Array(list))
                    })
                    .collect();
                json!({ "firms": firms, "totally_unimodular": c.verdict.is_totally_unimodular() })
            });
            let value = json!({
                "root": vertex_names[tree.root()],
                "tree_edges": tree.edges().iter().map(|&e| edge_label(e)).collect::<Vec<_>>(),
                "graph_edges": tree.complete_graph_edges().into_iter().map(edge_label).collect::<Vec<_>>(),
                "specialists": specialists,
                "H": matrix_json(&h),
                "H_prime": h_prime.as_ref().map(matrix_json),
                "certificate": cert,
                "market_problem": market_problem,
            });
            return Ok((code, pretty(&value)));
        }

        let mut out = String::new();
        writeln!(out, "root: {}", vertex_names[tree.root()]).unwrap();
        for (w, name) in workers.iter().enumerate() {
            match tree.specialist_edge(w) {
                Some(e) => writeln!(
                    out,
                    "{}: specialist ({})",
                    name,
                    edge_label(tree.edges()[e])
                )
                .unwrap(),
                None => {
                    writeln!(out, "{}: engages in {} upgrades", name, tree.engagement(w)).unwrap()
                }
            }
        }
        for w in &generalists {
            writeln!(out, "not a specialist: {w}").unwrap();
        }
        let rows: Vec<String> = tree.edges().iter().map(|&e| edge_label(e)).collect();
        let cols: Vec<String> = tree
            .complete_graph_edges()
            .into_iter()
            .map(edge_label)
            .collect();
        writeln!(out, "H rows: {}", rows.join(" ")).unwrap();
        writeln!(out, "H columns: {}", cols.join(" ")).unwrap();
        out.push_str(&indent(&h.to_string()));
        if let Some(hp) = &h_prime {
            writeln!(out, "H' rows: {}", workers.join(" ")).unwrap();
            out.push_str(&indent(&hp.to_string()));
        }
        if let Some(problem) = &market_problem {
            writeln!(out, "market: {problem}").unwrap();
        }
        if let Some((cert, names)) = &certificate {
            for (f, matches) in cert.firms.iter().enumerate() {
                let parts: Vec<String> = matches
                    .iter()
                    .map(|m| {
                        let sign = if m.sign < 0 { "-" } else { "" };
                        format!("{} = {sign}H'{}", m.vector, m.column + 1)
                    })
                    .collect();
                writeln!(out, "{}: {}", names.firm(FirmId(f)), parts.join(", ")).unwrap();
            }
            let yes = if cert.verdict.is_totally_unimodular() {
                "yes"
            } else {
                "no"
            };
            writeln!(out, "demand type totally unimodular: {yes}").unwrap();
        }
        Ok((code, out))
    }

    fn message(&self, text: &str, verdict: &str) -> String {
        if self.json {
            pretty(&json!({ "verdict": verdict, "message": text.trim_end() }))
        } else {
            text.to_string()
        }
    }
}
