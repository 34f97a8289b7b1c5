//! Cluster expectations two ways: summing over all 2^|E| configurations, and
//! summing over connected open subgraphs with their closed boundaries.
use percolab::exact::{animal_expansion, animal_series, enumerate_exact, truncated, ClusterFunctional, Functional};

fn main() -> percolab::Result<()> {
    for name in percolab::corpus::names() {
        let g = percolab::corpus::load(name)?;
        let f = Functional::Ev;
        let n = g.edge_count();
        let conf = enumerate_exact(&g, g.root(), &f, Some(n))?;
        let cut = truncated(&f, n);
        let anim = animal_expansion(&g, g.root(), &cut as &dyn ClusterFunctional, None)?;
        println!("{name:<18} agree={}  E[E_v; E_v<=n] = {conf}", conf == anim);
    }
    // on a graph without halo the series is a finite sum of P(K_v = H)
    let g = percolab::corpus::load("cube")?;
    let s = animal_series(&g, g.root(), &Functional::One, 8)?;
    println!("cube: {} animals, partial sums at p=0.3:", s.animals);
    for n in 0..=8 {
        println!("  n={n} {:.6}", s.partial_sum_f64(n, 0.3));
    }
    Ok(())
}
