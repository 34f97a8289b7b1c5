//! Exact joint law of the leaf count Lf_k and the cluster edge count E_v.
use percolab::exact::{q_table, rat};

fn main() -> percolab::Result<()> {
    let g = percolab::corpus::load("tree3_r2_halo")?;
    let t = q_table(&g, g.root(), 2)?;
    let half = rat(1, 2);
    for ((k, n, m), poly) in &t.entries {
        println!("k={k} n={n} m={m}  P = {poly}   at 1/2: {}", poly.eval(&half));
    }
    println!("censored: {}", t.censored);
    Ok(())
}
