//! Runs the exact bound checks over the bundled corpus and a sampled check on
//! a tree ball; prints every violation (there should be none).
use percolab::exact::{corpus_suite, fluctuation_tail_mc, moment_bound_mc, skinny_radius_mc};
use percolab::{Family, Graph};

fn main() -> percolab::Result<()> {
    let ps: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut reports = corpus_suite(&percolab::corpus::all(), &ps)?;
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 12 })?;
    reports.extend(skinny_radius_mc(&g, 0.6, 20_000, 1, &[(8, 4), (16, 8)], 0)?);
    reports.extend(fluctuation_tail_mc(&g, 0.6, 0.5, 20_000, 2, 0)?);
    reports.push(moment_bound_mc(&g, 0.6, 2, 1.0, 20_000, 3, 0)?);
    let bad: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    println!("{} checks, {} violations", reports.len(), bad.len());
    for r in bad {
        println!("  {} {} lhs={} rhs={}", r.check, r.params, r.lhs, r.rhs);
    }
    Ok(())
}
