//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
mod common;

use percolab::anatomy::{br_k, euler_paths_check, menger_paths, SetState};
use percolab::asymptotics::{alpha_dense_scan, anchored_profile, solve_alpha, walk_return};
use percolab::engine::{explore_component, explore_with, stretched_fit, tail_histogram};
use percolab::exact::{corpus_suite, default_grid, fluctuation_tail_mc, moment_bound_mc, rat, russo_from_table};
use percolab::exact::{skinny_radius_mc, tree_cluster_law, tree_zeta_k, ConfigTable, Functional};
use percolab::rng::SplitMix64;
use percolab::{Family, Graph};
use std::collections::HashSet;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn russo_identity() -> Outcome {
    let graphs = percolab::corpus::all();
    let grid = default_grid();
    let mut checks = 0;
    let mut bad = Vec::new();
    for (name, g) in &graphs {
        let table = ConfigTable::build(g, g.root()).unwrap();
        for f in [Functional::One, Functional::Ev, Functional::Kv] {
            for n in 0..=g.edge_count() {
                let r = russo_from_table(&table, &f, n, &grid).unwrap();
                checks += r.points.len();
                if !r.symbolic_identity() || !r.points.iter().all(|pt| pt.identity) {
                    bad.push(format!("{name}/{f:?}/n={n}"));
                }
            }
        }
    }
    let small = graphs.iter().all(|(_, g)| g.edge_count() <= 12) && graphs.len() >= 10;
    outcome(small && bad.is_empty(), format!("{} graphs, {checks} exact (n, p, F) checks, failures {bad:?}", graphs.len()))
}

fn anatomy_oracle() -> Outcome {
    let mut rng = SplitMix64::new(2024);
    let (mut clusters, mut mismatches) = (0, 0);
    while clusters < 500 {
        let n = 6 + rng.below(12) as usize;
        let extra = rng.below(6) as usize;
        let g = common::random_halo_graph(&mut rng, n, extra, n + 1);
        let p = 0.5 + 0.5 * rng.next_f64();
        let open: Vec<bool> = (0..g.edge_count()).map(|_| rng.bernoulli(p)).collect();
        let c = explore_with(&g, &open, 0).unwrap();
        if c.size() > 14 || c.censored {
            continue;
        }
        clusters += 1;
        for k in 1..=3 {
            if br_k(&g, &c, k).unwrap() != common::br_k_brute(&g, &c, k) {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{clusters} clusters, k = 1..3, mismatches {mismatches}"))
}

fn random_open_tree(rng: &mut SplitMix64) -> (Graph, u32) {
    loop {
        let n = 5 + rng.below(20) as usize;
        let base = common::random_halo_graph(rng, n, 0, n);
        let leaves: Vec<u32> = (0..n as u32).filter(|&v| base.degree(v) == 1).collect();
        let Some(root) = (0..n as u32).find(|&v| base.degree(v) >= 2) else { continue };
        return (base.with_boundary(&leaves).unwrap(), root);
    }
}

fn menger_duality() -> Outcome {
    let mut rng = SplitMix64::new(77);
    let mut bad = 0;
    for _ in 0..200 {
        let n = 8 + rng.below(12) as usize;
        let halo_from = n - 1 - rng.below(4) as usize;
        let extra = rng.below(12) as usize;
        let g = common::random_halo_graph(&mut rng, n, extra, halo_from);
        assert!(g.edge_count() <= 30);
        let open: HashSet<u32> = (0..g.edge_count() as u32).filter(|_| rng.bernoulli(0.7)).collect();
        let m = menger_paths(&g, &SetState(&open), &[0]).unwrap();
        let after = |e: u32| open.contains(&e) && !m.min_cut.contains(&e);
        let separated = common::reach(&g, &after, &[0], None).iter().all(|&v| !g.is_boundary(v));
        let mut used = HashSet::new();
        let disjoint = m.path_edges.iter().flatten().all(|&e| open.contains(&e) && used.insert(e));
        if !(separated && disjoint && m.paths == m.min_cut.len() && m.paths == m.path_edges.len()) {
            bad += 1;
        }
    }
    let mut euler_bad = 0;
    for _ in 0..200 {
        let (g, root) = random_open_tree(&mut rng);
        let all = vec![true; g.edge_count()];
        let c = explore_component(&g, &all, root, true).unwrap();
        let interior: Vec<u32> = c.vertices.iter().copied().filter(|&v| !g.is_boundary(v)).collect();
        let a: Vec<u32> = interior.iter().copied().filter(|_| rng.bernoulli(0.4)).collect();
        if !euler_paths_check(&g, &c, &a).unwrap().ok {
            euler_bad += 1;
        }
    }
    outcome(bad == 0 && euler_bad == 0, format!("200 halo graphs: {bad} failures; 200 open trees: {euler_bad} Euler failures"))
}

fn tree_rate() -> Outcome {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 24 }).unwrap();
    let r = tail_histogram(&g, 0.7, 1_000_000, 7, None, 0).unwrap();
    let law = tree_cluster_law(3, &rat(7, 10), 1000).unwrap();
    let exact = law.zeta_e;
    let Some(f) = r.fit else { return outcome(false, format!("fit failed: {:?}", r.fit_error)) };
    let z = f.zeta_hat / f.zeta_stderr;
    let rel = (f.zeta_hat - exact).abs() / exact;
    outcome(
        f.zeta_hat > 0.0 && z > 5.0 && rel <= 0.15,
        format!("zeta_hat={:.5} se={:.5} z={z:.1} exact={exact:.5} rel_err={rel:.3}", f.zeta_hat, f.zeta_stderr),
    )
}

fn amenable_contrast() -> Outcome {
    let g = Graph::generate(&Family::Hypercubic { d: 2, side: 129 }).unwrap();
    let r = tail_histogram(&g, 0.6, 100_000, 7, None, 0).unwrap();
    match stretched_fit(&r, 16) {
        Ok(f) => outcome(
            (0.35..=0.7).contains(&f.kappa) && f.exponential_rejected,
            format!(
                "kappa={:.3} rss_stretched={:.2} rss_exponential={:.2} exponential_rejected={}",
                f.kappa, f.rss_stretched, f.rss_exponential, f.exponential_rejected
            ),
        ),
        Err(e) => outcome(false, format!("fit failed: {e}")),
    }
}

fn bound_suite() -> Outcome {
    let ps: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut reports = corpus_suite(&percolab::corpus::all(), &ps).unwrap();
    let exact_count = reports.len();
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 14 }).unwrap();
    for (i, &p) in [0.3, 0.6, 0.8].iter().enumerate() {
        let seed = 100 + i as u64;
        reports.extend(skinny_radius_mc(&g, p, 40_000, seed, &[(4, 2), (8, 4), (16, 4), (16, 8), (32, 16)], 0).unwrap());
        for alpha in [0.3, 0.5] {
            reports.extend(fluctuation_tail_mc(&g, p, alpha, 40_000, seed, 0).unwrap());
        }
        for k in [1, 2] {
            reports.push(moment_bound_mc(&g, p, k, 1.0, 40_000, seed, 0).unwrap());
        }
    }
    let bad: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| format!("{} {}", r.check, r.params)).collect();
    outcome(bad.is_empty(), format!("{exact_count} exact + {} sampled checks, violations {bad:?}", reports.len() - exact_count))
}

fn alpha_solver() -> Outcome {
    let mut rng = SplitMix64::new(3);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for i in 0..20 {
        let p = 0.05 + 0.9 * rng.next_f64();
        // half the pairs use tree rates, half arbitrary rates
        let zeta = if i % 2 == 0 { tree_zeta_k(3, p.max(0.51)) / 2.0 } else { 1.5 * rng.next_f64() };
        let a = solve_alpha(p, zeta, 1e-12).unwrap().alpha;
        let s = alpha_dense_scan(p, zeta).unwrap();
        worst = worst.max((a - s).abs());
        ok &= a <= p && a >= 0.0;
        ok &= solve_alpha(p, 0.0, 1e-12).unwrap().alpha == 0.0;
    }
    outcome(ok && worst <= 1e-9 + 1e-12, format!("20 pairs, max |solver - scan| = {worst:.2e}"))
}

fn anchored_expansion() -> Outcome {
    let spec: serde_json::Value = serde_json::from_str(include_str!("../corpus/regression/anchored_expansion.json")).unwrap();
    let threshold = spec["threshold"].as_f64().unwrap();
    let min_fraction = spec["min_fraction"].as_f64().unwrap();
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 20 }).unwrap();
    // enough trials for 1000 censored clusters at theta(0.9) ~ 0.998
    let r = anchored_profile(&g, 0.9, 1010, 8, &[1, 6, 12], None, 0).unwrap();
    let mins: Vec<f64> = r.exact_minimum.iter().copied().take(1000).collect();
    let above = mins.iter().filter(|&&m| m >= threshold).count();
    let frac = above as f64 / mins.len() as f64;
    outcome(
        mins.len() == 1000 && frac >= min_fraction,
        format!("{} censored clusters, fraction with exact minimum >= {threshold} (empirical threshold): {frac:.3}", mins.len()),
    )
}

fn walk_exactness() -> Outcome {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 16 }).unwrap();
    let (mut clusters, mut p2_bad, mut worst) = (0, 0, 0.0f64);
    let mut seed = 0;
    while clusters < 100 {
        let r = walk_return(&g, 0.7, seed, 1000, g.root(), 16).unwrap();
        seed += 1;
        if r.degenerate {
            continue;
        }
        clusters += 1;
        p2_bad += !r.p2_match as usize;
        worst = worst.max(r.max_mass_error);
    }
    outcome(p2_bad == 0 && worst <= 1e-12, format!("100 clusters, 2000 steps each: p2 mismatches {p2_bad}, max mass drift {worst:.2e}"))
}

fn reproducibility() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_percolab");
    let dir = tempfile::tempdir().unwrap();
    let mut bad = Vec::new();
    for (i, case) in common::CLI_CASES.iter().enumerate() {
        let (ca, a, ma) = common::run_cli(bin, case, dir.path(), &format!("a{i}"));
        let (cb, b, mb) = common::run_cli(bin, case, dir.path(), &format!("b{i}"));
        let same_hash = ma["outputs"][0]["sha256"] == mb["outputs"][0]["sha256"] && ma["config_sha256"] != serde_json::Value::Null;
        if ca != 0 || cb != 0 || a.is_empty() || a != b || !same_hash {
            bad.push(case[0]);
        }
    }
    outcome(bad.is_empty(), format!("{} subcommands run twice, differing: {bad:?}", common::CLI_CASES.len()))
}

/// (name, check, time budget in seconds)
type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 10] = [
        ("russo identity on the exact corpus", russo_identity, 60),
        ("bridge-tree Br_k equals brute force", anatomy_oracle, 60),
        ("Menger duality and the Euler path bound", menger_duality, 30),
        ("tree tail rate against the exact tree law", tree_rate, 300),
        ("stretched-exponential tail on the square lattice", amenable_contrast, 300),
        ("bound suite without violations", bound_suite, 120),
        ("alpha(p) solver against a dense scan", alpha_solver, 5),
        ("anchored expansion on supercritical tree clusters", anchored_expansion, 300),
        ("random walk exactness and mass conservation", walk_exactness, 60),
        ("CLI reruns are byte-identical", reproducibility, 600),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let dt = t.elapsed();
        let in_time = dt <= Duration::from_secs(*budget);
        let pass = o.pass && in_time;
        failures += !pass as usize;
        println!(
            "{} criterion {}: {name} ({:.1}s of {budget}s) {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            dt.as_secs_f64(),
            o.detail
        );
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
