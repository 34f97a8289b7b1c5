//! Experiment configurations and their dispatch. Every subcommand of the
//! `percolab` binary is a variant of [`Command`]; a JSON config file holds the
//! same fields as the flags, tagged by `"command"`.

use crate::anatomy::{anatomy, burton_keane_statistic, furcation_set, menger_paths};
use crate::asymptotics::{anchored_profile, pipe_census, solve_alpha, walk_return};
use crate::engine::{observables, stretched_fit, tail_histogram, Config, FitWindow};
use crate::error::{Error, Result};
use crate::exact::{
    animal_expansion, corpus_suite, enumerate_exact, fluctuation_tail_mc, moment_bound_mc, parse_rational, q_table,
    rat, russo_decomposition, skinny_radius_mc, tree_cluster_law, truncated, ClusterFunctional, Functional,
};
use crate::graph::{Family, Graph};
use crate::rng::EdgeLabelSample;
use clap::{Args, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Where the graph comes from: a JSON file, a corpus entry or a generator.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSource {
    /// Graph JSON file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    /// Name of a bundled corpus graph.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    /// Generator family.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyName>,
    /// Tree degree.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    /// Tree radius.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    /// Lattice dimension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<u32>,
    /// Lattice box side.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<u32>,
    /// Binary tree depth (binary family and decorated lattice).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    /// Ball in the regular tree (`--degree`, `--radius`).
    Tree,
    /// Box of the hypercubic lattice (`--dim`, `--side`).
    Hypercubic,
    /// Z^3 box with binary trees hanging off it (`--side`, `--depth`).
    Decorated,
    /// Complete binary tree (`--depth`).
    Binary,
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        let given = self.graph.is_some() as u8 + self.corpus.is_some() as u8 + self.family.is_some() as u8;
        if given != 1 {
            return Err(Error::Argument("give exactly one of --graph, --corpus, --family".into()));
        }
        if let Some(path) = &self.graph {
            return Graph::load(path);
        }
        if let Some(name) = &self.corpus {
            return crate::corpus::load(name);
        }
        let need = |x: Option<u32>, flag: &str| x.ok_or_else(|| Error::Argument(format!("--{flag} is required for this family")));
        let family = match self.family.unwrap() {
            FamilyName::Tree => Family::RegularTree { d: need(self.degree, "degree")?, radius: need(self.radius, "radius")? },
            FamilyName::Hypercubic => Family::Hypercubic { d: need(self.dim, "dim")?, side: need(self.side, "side")? },
            FamilyName::Decorated => Family::TreeDecoratedZ3 { tree_depth: need(self.depth, "depth")?, side: need(self.side, "side")? },
            FamilyName::Binary => Family::BinaryTree { depth: need(self.depth, "depth")? },
        };
        Graph::generate(&family)
    }
}

/// Flags shared by the sampling subcommands.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    /// Edge probability.
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,
}

/// Worker count handed to the library: the binary sets `PERCOLAB_WORKERS` from
/// `--workers`, and results never depend on it, so it stays out of the config.
const AUTO_WORKERS: usize = 0;

fn default_trials() -> u64 {
    1000
}

fn default_out() -> Option<PathBuf> {
    None
}

macro_rules! command_args {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Args, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        #[command(arg_required_else_help = true)]
        pub struct $name {
            $($(#[$fm])* pub $field: $ty,)*
            /// Output file; stdout when absent. A manifest is written next to it.
            #[arg(long)]
            #[serde(default = "default_out", skip_serializing_if = "Option::is_none")]
            pub out: Option<PathBuf>,
        }
    };
}

command_args!(
    /// Generate a graph and write it as JSON.
    GenArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
    }
);

command_args!(
    /// Finite-cluster tail of E_v and the fitted decay rate.
    TailArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[command(flatten)]
        #[serde(flatten)]
        sampling: Sampling,
        /// Fit window `a:b` over n.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fit: Option<String>,
        /// Also fit exp(-c n^kappa) to the survival curve from this n on.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stretched_from: Option<u64>,
    }
);

command_args!(
    /// Percolation density, truncated susceptibility and related means.
    ObservablesArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[command(flatten)]
        #[serde(flatten)]
        sampling: Sampling,
        /// Vertex pair `u,v` for the two-point function.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pair: Option<String>,
    }
);

command_args!(
    /// Bridges, Br_k, furcations and pipes of sampled root clusters.
    AnatomyArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[command(flatten)]
        #[serde(flatten)]
        sampling: Sampling,
        #[arg(long, default_value_t = 3)]
        #[serde(default = "default_k")]
        k_max: usize,
        /// Root vertex; the graph's root when absent.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root: Option<u32>,
    }
);

fn default_k() -> usize {
    3
}

command_args!(
    /// Edge-disjoint open paths from a source set to the halo.
    MengerArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[command(flatten)]
        #[serde(flatten)]
        sampling: Sampling,
        /// Comma-separated source vertices; the root when absent.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sources: Option<String>,
    }
);

command_args!(
    /// Furcations of the configuration with the given seed.
    FurcationsArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        /// Edge probability.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        seed: u64,
    }
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactMode {
    /// dE/dp = -M = U - D on a grid of p.
    Russo,
    /// Configuration sum against the connected-subgraph expansion.
    Animals,
    /// Truncated expectation as a polynomial in p.
    Enumerate,
}

command_args!(
    /// Exact checks by full enumeration.
    ExactCheckArgs {
        #[arg(value_enum)]
        mode: ExactMode,
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        /// Truncation level n; no truncation when absent.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        /// Either a count k (grid i/(k+1), i = 1..k) or comma-separated rationals.
        #[arg(long, default_value = "9")]
        #[serde(default = "default_grid")]
        p_grid: String,
        /// one, ev, kv, kv=K, rv or exp:T:ORDER.
        #[arg(long, default_value = "one")]
        #[serde(default = "default_functional")]
        functional: String,
    }
);

fn default_grid() -> String {
    "9".into()
}

fn default_functional() -> String {
    "one".into()
}

command_args!(
    /// Exact joint law of (Lf_k, E_v).
    QTableArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 2)]
        #[serde(default = "default_k2")]
        k_max: usize,
    }
);

fn default_k2() -> usize {
    2
}

command_args!(
    /// Cluster-size law on the infinite regular tree.
    TreeLawArgs {
        #[arg(long)]
        degree: usize,
        /// Edge probability, read exactly (`0.7` or `7/10`).
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 200)]
        #[serde(default = "default_nmax")]
        n_max: usize,
    }
);

fn default_nmax() -> usize {
    200
}

command_args!(
    /// Bound checks: exact on the corpus, or sampled on a given graph.
    BoundsArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        /// Comma-separated probabilities.
        #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        #[serde(default = "default_ps")]
        ps: String,
        /// Use the whole bundled corpus (exact checks).
        #[arg(long)]
        #[serde(default)]
        all_corpus: bool,
        #[arg(long, default_value_t = 10_000)]
        #[serde(default = "default_mc")]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        seed: u64,
    }
);

fn default_ps() -> String {
    "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9".into()
}

fn default_mc() -> u64 {
    10_000
}

command_args!(
    /// Anchored-expansion constant alpha(p) from p and the decay rate.
    AlphaArgs {
        #[arg(long)]
        p: f64,
        /// Decay rate; with --degree instead, the regular-tree rate at p is used.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeta: Option<f64>,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree: Option<usize>,
        #[arg(long, default_value_t = 1e-12)]
        #[serde(default = "default_tol")]
        tol: f64,
    }
);

fn default_tol() -> f64 {
    1e-12
}

command_args!(
    /// Anchored isoperimetric ratios on censored clusters.
    AnchoredArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[command(flatten)]
        #[serde(flatten)]
        sampling: Sampling,
        /// Comma-separated sizes |E_K(H)|.
        #[arg(long, default_value = "1,3,6,9,12")]
        #[serde(default = "default_sizes")]
        sizes: String,
        /// Decay rate for the alpha(p)/2 comparison.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeta: Option<f64>,
    }
);

fn default_sizes() -> String {
    "1,3,6,9,12".into()
}

command_args!(
    /// Return probabilities of the simple random walk on one sampled cluster.
    WalkArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        #[serde(default = "default_walk")]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        #[serde(default = "default_nmin")]
        n_min: usize,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root: Option<u32>,
    }
);

fn default_walk() -> usize {
    100
}

fn default_nmin() -> usize {
    1
}

command_args!(
    /// Longest pipes inside intrinsic balls of censored clusters.
    PipesArgs {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[command(flatten)]
        #[serde(flatten)]
        sampling: Sampling,
        /// Comma-separated radii.
        #[arg(long, default_value = "2,4,6,8")]
        #[serde(default = "default_radii")]
        radii: String,
    }
);

fn default_radii() -> String {
    "2,4,6,8".into()
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Gen(GenArgs),
    Tail(TailArgs),
    Observables(ObservablesArgs),
    Anatomy(AnatomyArgs),
    Menger(MengerArgs),
    Furcations(FurcationsArgs),
    ExactCheck(ExactCheckArgs),
    QTable(QTableArgs),
    TreeLaw(TreeLawArgs),
    Bounds(BoundsArgs),
    Alpha(AlphaArgs),
    Anchored(AnchoredArgs),
    Walk(WalkArgs),
    Pipes(PipesArgs),
}

/// Artifact produced by a command.
pub struct Artifact {
    pub text: String,
    /// Whether the run found a violated identity or bound.
    pub failed_check: bool,
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| Error::Argument(format!("bad {what} entry `{x}`"))))
        .collect()
}

fn parse_grid(s: &str) -> Result<Vec<BigRational>> {
    if !s.contains(',') && !s.contains('/') && !s.contains('.') {
        let k: i64 = s.trim().parse().map_err(|_| Error::Argument(format!("bad p grid `{s}`")))?;
        if k < 1 {
            return Err(Error::Argument("p grid needs at least one point".into()));
        }
        return Ok((1..=k).map(|i| rat(i, k + 1)).collect());
    }
    s.split(',').map(parse_rational).collect()
}

fn pretty(v: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Tail(_) => "tail",
            Command::Observables(_) => "observables",
            Command::Anatomy(_) => "anatomy",
            Command::Menger(_) => "menger",
            Command::Furcations(_) => "furcations",
            Command::ExactCheck(_) => "exact-check",
            Command::QTable(_) => "q-table",
            Command::TreeLaw(_) => "tree-law",
            Command::Bounds(_) => "bounds",
            Command::Alpha(_) => "alpha",
            Command::Anchored(_) => "anchored",
            Command::Walk(_) => "walk",
            Command::Pipes(_) => "pipes",
        }
    }

    pub fn out(&self) -> Option<&Path> {
        match self {
            Command::Gen(a) => a.out.as_deref(),
            Command::Tail(a) => a.out.as_deref(),
            Command::Observables(a) => a.out.as_deref(),
            Command::Anatomy(a) => a.out.as_deref(),
            Command::Menger(a) => a.out.as_deref(),
            Command::Furcations(a) => a.out.as_deref(),
            Command::ExactCheck(a) => a.out.as_deref(),
            Command::QTable(a) => a.out.as_deref(),
            Command::TreeLaw(a) => a.out.as_deref(),
            Command::Bounds(a) => a.out.as_deref(),
            Command::Alpha(a) => a.out.as_deref(),
            Command::Anchored(a) => a.out.as_deref(),
            Command::Walk(a) => a.out.as_deref(),
            Command::Pipes(a) => a.out.as_deref(),
        }
    }

    /// Canonical JSON of the configuration, the input of the config hash.
    pub fn canonical_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Command> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks parameters that every module would reject anyway, before any work.
    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| crate::error::check_probability(p);
        let trials = |t: u64| {
            if t == 0 {
                Err(Error::Parameter("trials must be at least 1".into()))
            } else {
                Ok(())
            }
        };
        match self {
            Command::Tail(a) => {
                prob(a.sampling.p)?;
                trials(a.sampling.trials)?;
                if let Some(f) = &a.fit {
                    f.parse::<FitWindow>()?;
                }
            }
            Command::Observables(a) => {
                prob(a.sampling.p)?;
                trials(a.sampling.trials)?;
            }
            Command::Anatomy(a) => {
                prob(a.sampling.p)?;
                trials(a.sampling.trials)?;
                if a.k_max == 0 {
                    return Err(Error::Argument("--k-max must be at least 1".into()));
                }
            }
            Command::Menger(a) => {
                prob(a.sampling.p)?;
                trials(a.sampling.trials)?;
            }
            Command::Furcations(a) => prob(a.p)?,
            Command::ExactCheck(a) => {
                parse_grid(&a.p_grid)?;
                a.functional.parse::<Functional>()?;
            }
            Command::TreeLaw(a) => {
                parse_rational(&a.p)?;
            }
            Command::Bounds(a) => {
                for p in list::<f64>(&a.ps, "p")? {
                    prob(p)?;
                }
            }
            Command::Alpha(a) => {
                if a.zeta.is_some() == a.degree.is_some() {
                    return Err(Error::Argument("give exactly one of --zeta, --degree".into()));
                }
            }
            Command::Anchored(a) => {
                prob(a.sampling.p)?;
                trials(a.sampling.trials)?;
                list::<usize>(&a.sizes, "size")?;
            }
            Command::Walk(a) => prob(a.p)?,
            Command::Pipes(a) => {
                prob(a.sampling.p)?;
                trials(a.sampling.trials)?;
                list::<u32>(&a.radii, "radius")?;
            }
            Command::Gen(_) | Command::QTable(_) => {}
        }
        Ok(())
    }

    /// Runs the experiment and returns the artifact text.
    pub fn execute(&self) -> Result<Artifact> {
        self.validate()?;
        let ok = |text: String| Ok(Artifact { text, failed_check: false });
        match self {
            Command::Gen(a) => ok(a.source.load()?.to_json()? + "\n"),
            Command::Tail(a) => {
                let g = a.source.load()?;
                let window = a.fit.as_deref().map(str::parse::<FitWindow>).transpose()?;
                let s = &a.sampling;
                let report = tail_histogram(&g, s.p, s.trials, s.seed, window, AUTO_WORKERS)?;
                let mut text = String::new();
                if let Some(n_min) = a.stretched_from {
                    match stretched_fit(&report, n_min) {
                        Ok(f) => text.push_str(&format!(
                            "# stretched_kappa={}\n# stretched_c={}\n# exponential_rejected={}\n",
                            f.kappa, f.c, f.exponential_rejected
                        )),
                        Err(e) => text.push_str(&format!("# stretched_fit_error={e}\n")),
                    }
                }
                text.push_str(&report.to_csv());
                ok(text)
            }
            Command::Observables(a) => {
                let g = a.source.load()?;
                let pair = match &a.pair {
                    Some(s) => {
                        let v: Vec<u32> = list(s, "vertex")?;
                        if v.len() != 2 {
                            return Err(Error::Argument("--pair needs two vertices u,v".into()));
                        }
                        Some((v[0], v[1]))
                    }
                    None => None,
                };
                let s = &a.sampling;
                ok(pretty(&observables(&g, s.p, s.trials, s.seed, pair, AUTO_WORKERS)?)?)
            }
            Command::Anatomy(a) => {
                let g = a.source.load()?;
                let s = &a.sampling;
                let root = a.root.unwrap_or(g.root());
                let mut rows = Vec::new();
                for t in 0..s.trials {
                    let state = Config { labels: EdgeLabelSample::for_trial(s.seed, t), p: s.p };
                    let r = anatomy(&g, &state, root, a.k_max)?;
                    rows.push(json!({"trial": t, "cluster": r}));
                }
                ok(pretty(&rows)?)
            }
            Command::Menger(a) => {
                let g = a.source.load()?;
                let s = &a.sampling;
                let sources = match &a.sources {
                    Some(x) => list(x, "vertex")?,
                    None => vec![g.root()],
                };
                let first = menger_paths(&g, &Config { labels: EdgeLabelSample::new(s.seed), p: s.p }, &sources)?;
                let bk = burton_keane_statistic(&g, s.p, s.trials, s.seed, &sources, AUTO_WORKERS)?;
                ok(pretty(&json!({
                    "sources": sources,
                    "first_configuration": {"paths": first.paths, "min_cut": first.min_cut},
                    "burton_keane": bk,
                }))?)
            }
            Command::Furcations(a) => {
                let g = a.source.load()?;
                if !g.has_boundary() {
                    return Err(Error::State("furcations need a halo to stand in for infinity".into()));
                }
                let state = Config { labels: EdgeLabelSample::new(a.seed), p: a.p };
                let f = furcation_set(&g, &state, None);
                ok(pretty(&json!({"p": a.p, "seed": a.seed, "count": f.len(), "furcations": f}))?)
            }
            Command::ExactCheck(a) => exact_check(a),
            Command::QTable(a) => {
                let g = a.source.load()?;
                let t = q_table(&g, g.root(), a.k_max)?;
                let bad = (1..=a.k_max).any(|k| !t.slice_total(k).coeffs().iter().eq(crate::exact::PolynomialInP::one().coeffs()));
                Ok(Artifact { text: pretty(&t.to_json())?, failed_check: bad })
            }
            Command::TreeLaw(a) => {
                let p = parse_rational(&a.p)?;
                let law = tree_cluster_law(a.degree, &p, a.n_max)?;
                let mut s = format!(
                    "# d={}\n# p={}\n# n_max={}\n# finite_probability={}\n# zeta_k={}\n# zeta_e={}\n# zeta_k_richardson={}\n# zeta_e_richardson={}\n# exact_tail={}\n",
                    law.d,
                    p,
                    law.n_max,
                    law.finite_probability,
                    law.zeta_k,
                    law.zeta_e,
                    law.zeta_k_richardson.map_or("NA".into(), |z| z.to_string()),
                    law.zeta_e_richardson.map_or("NA".into(), |z| z.to_string()),
                    law.exact_tail.as_ref().map_or("NA".into(), |t| format!("{:e}", crate::exact::to_f64(t))),
                );
                s.push_str("size,e_v,prob,ln_prob,exact\n");
                for k in 1..=law.n_max {
                    s.push_str(&format!(
                        "{k},{},{:e},{},{}\n",
                        (law.d - 1) * k + 1,
                        law.prob(k),
                        law.ln_prob(k),
                        law.exact.get(k - 1).map_or("NA".into(), |r| r.to_string())
                    ));
                }
                ok(s)
            }
            Command::Bounds(a) => bounds(a),
            Command::Alpha(a) => {
                let zeta = match (a.zeta, a.degree) {
                    (Some(z), _) => z,
                    (None, Some(d)) => crate::exact::tree_zeta_k(d, a.p) / (d - 1) as f64,
                    _ => unreachable!("validated"),
                };
                ok(pretty(&solve_alpha(a.p, zeta, a.tol)?)?)
            }
            Command::Anchored(a) => {
                let g = a.source.load()?;
                let s = &a.sampling;
                let sizes: Vec<usize> = list(&a.sizes, "size")?;
                ok(anchored_profile(&g, s.p, s.trials, s.seed, &sizes, a.zeta, AUTO_WORKERS)?.to_csv())
            }
            Command::Walk(a) => {
                let g = a.source.load()?;
                let r = walk_return(&g, a.p, a.seed, a.n_max, a.root.unwrap_or(g.root()), a.n_min)?;
                Ok(Artifact { failed_check: !r.p2_match, text: r.to_csv() })
            }
            Command::Pipes(a) => {
                let g = a.source.load()?;
                let s = &a.sampling;
                let radii: Vec<u32> = list(&a.radii, "radius")?;
                ok(pipe_census(&g, s.p, s.trials, s.seed, &radii, AUTO_WORKERS)?.to_csv())
            }
        }
    }
}

fn exact_check(a: &ExactCheckArgs) -> Result<Artifact> {
    let g = a.source.load()?;
    let f: Functional = a.functional.parse()?;
    let root = g.root();
    match a.mode {
        ExactMode::Russo => {
            let n = a.n.unwrap_or(g.edge_count());
            let grid = parse_grid(&a.p_grid)?;
            let r = russo_decomposition(&g, root, &f, n, &grid)?;
            // largest |dE/dp - (U - D)| over the grid, exact
            let max_diff = r
                .points
                .iter()
                .map(|pt| {
                    let d = parse_rational(&pt.dedp).and_then(|x| Ok(x - parse_rational(&pt.u)? + parse_rational(&pt.d)?));
                    d.map(|x| if x < BigRational::from_integer(0.into()) { -x } else { x })
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or_default();
            let failed = !r.symbolic_identity() || !r.all_points_pass();
            let text = pretty(&json!({
                "mode": "russo",
                "n": n,
                "functional": a.functional,
                "symbolic_identity": r.symbolic_identity(),
                "max_abs_dedp_minus_u_plus_d": max_diff.to_string(),
                "expectation": r.expectation.to_json_value(),
                "points": r.points,
            }))?;
            Ok(Artifact { text, failed_check: failed })
        }
        ExactMode::Animals => {
            let n = a.n.unwrap_or(g.edge_count());
            let aligned = truncated(&f, n);
            let conf = enumerate_exact(&g, root, &f, Some(n))?;
            let anim = animal_expansion(&g, root, &aligned as &dyn ClusterFunctional, None)?;
            let agree = conf == anim;
            let text = pretty(&json!({
                "mode": "animals",
                "n": n,
                "functional": a.functional,
                "agree": agree,
                "configurations": conf.to_json_value(),
                "animals": anim.to_json_value(),
            }))?;
            Ok(Artifact { text, failed_check: !agree })
        }
        ExactMode::Enumerate => {
            let poly = enumerate_exact(&g, root, &f, a.n)?;
            let grid = parse_grid(&a.p_grid)?;
            let values: Vec<Value> = grid
                .iter()
                .map(|p| json!({"p": p.to_string(), "value": poly.eval(p).to_string(), "value_f64": crate::exact::to_f64(&poly.eval(p))}))
                .collect();
            Ok(Artifact {
                text: pretty(&json!({"mode": "enumerate", "n": a.n, "functional": a.functional, "polynomial": poly.to_json_value(), "values": values}))?,
                failed_check: false,
            })
        }
    }
}

fn bounds(a: &BoundsArgs) -> Result<Artifact> {
    let ps: Vec<f64> = list(&a.ps, "p")?;
    let mut reports = Vec::new();
    if a.all_corpus {
        reports.extend(corpus_suite(&crate::corpus::all(), &ps)?);
    } else {
        let g = a.source.load()?;
        if g.edge_count() <= crate::exact::MAX_ENUM_EDGES {
            reports.extend(corpus_suite(&[("graph".into(), g.clone())], &ps)?);
        }
        for &p in &ps {
            let pairs: Vec<(usize, usize)> = [(4, 2), (8, 4), (16, 4), (16, 8), (32, 8), (32, 16)].into();
            reports.extend(skinny_radius_mc(&g, p, a.trials, a.seed, &pairs, AUTO_WORKERS)?);
            for alpha in [0.3, 0.5] {
                reports.extend(fluctuation_tail_mc(&g, p, alpha, a.trials, a.seed, AUTO_WORKERS)?);
            }
            if p < 1.0 {
                for k in [1, 2] {
                    reports.push(moment_bound_mc(&g, p, k, 1.0, a.trials, a.seed, AUTO_WORKERS)?);
                }
            }
        }
    }
    let violations = reports.iter().filter(|r| !r.pass).count();
    Ok(Artifact {
        text: pretty(&json!({"violations": violations, "reports": reports}))?,
        failed_check: violations > 0,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance record written next to every output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub config_sha256: String,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputRecord>,
    pub failed_check: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Runs `cmd`, writes its artifact (stdout when no `--out`) and, with an output
/// path, the manifest. Returns the manifest.
pub fn run(cmd: &Command) -> Result<Manifest> {
    let start = Instant::now();
    let artifact = cmd.execute()?;
    let config = cmd.canonical_json()?;
    let mut outputs = Vec::new();
    match cmd.out() {
        Some(path) => {
            std::fs::write(path, &artifact.text)?;
            outputs.push(OutputRecord {
                path: path.display().to_string(),
                bytes: artifact.text.len(),
                sha256: sha256_hex(artifact.text.as_bytes()),
            });
        }
        None => {
            use std::io::Write;
            // a closed pipe (`| head`) is not an error of the experiment
            match std::io::stdout().lock().write_all(artifact.text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cmd.name().into(),
        config: serde_json::from_str(&config)?,
        config_sha256: sha256_hex(config.as_bytes()),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs,
        failed_check: artifact.failed_check,
    };
    if let Some(path) = cmd.out() {
        std::fs::write(manifest_path(path), pretty(&manifest)?)?;
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let text = r#"{"command":"tail","family":"tree","degree":3,"radius":6,"p":0.7,"trials":50,"seed":2}"#;
        let cmd = Command::from_json(text).unwrap();
        let again = Command::from_json(&cmd.canonical_json().unwrap()).unwrap();
        assert_eq!(cmd.canonical_json().unwrap(), again.canonical_json().unwrap());
        assert!(Command::from_json(r#"{"command":"tail","bogus":1,"p":0.5}"#).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("3").unwrap(), vec![rat(1, 4), rat(1, 2), rat(3, 4)]);
        assert_eq!(parse_grid("1/3,0.5").unwrap(), vec![rat(1, 3), rat(1, 2)]);
        assert!(parse_grid("0").is_err());
    }

    #[test]
    fn validation_catches_bad_p() {
        let cmd = Command::from_json(r#"{"command":"walk","corpus":"k4","p":1.5}"#).unwrap();
        assert!(matches!(cmd.execute(), Err(Error::Parameter(_))));
    }

    #[test]
    fn russo_report_is_exact_zero() {
        let cmd = Command::from_json(r#"{"command":"exact-check","mode":"russo","corpus":"k4","n":6,"p_grid":"9"}"#).unwrap();
        let a = cmd.execute().unwrap();
        assert!(!a.failed_check);
        let v: Value = serde_json::from_str(&a.text).unwrap();
        assert_eq!(v["max_abs_dedp_minus_u_plus_d"], "0");
    }
}
