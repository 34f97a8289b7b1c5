//! Return probabilities of simple random walk on a censored cluster by exact
//! vector powering.
use percolab::asymptotics::walk_return;
use percolab::{Family, Graph};

fn main() -> percolab::Result<()> {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 14 })?;
    let r = walk_return(&g, 0.75, 4, 200, g.root(), 10)?;
    println!("vertices {} censored {} mass drift {:e} p2 exact {}", r.vertices, r.censored, r.max_mass_error, r.p2_match);
    for (n, p) in r.return_probs.iter().enumerate().step_by(20) {
        println!("  p_{}(v,v) = {p:.4e}", 2 * n);
    }
    Ok(())
}
