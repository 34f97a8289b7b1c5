//! Exact derivative decomposition dE/dp = U - D of a truncated expectation,
//! checked in rationals on a grid of p.
use percolab::exact::{default_grid, russo_decomposition, Functional};

fn main() -> percolab::Result<()> {
    let g = percolab::corpus::load("k4")?;
    for f in [Functional::One, Functional::Ev, Functional::Kv] {
        for n in [3, 6] {
            let r = russo_decomposition(&g, g.root(), &f, n, &default_grid())?;
            println!("F={f:?} n={n}: E = {}", r.expectation);
            println!("  identity {}  all points {}", r.symbolic_identity(), r.all_points_pass());
            let mid = &r.points[4];
            println!("  at p={}: dE/dp={} U={} D={}", mid.p, mid.dedp, mid.u, mid.d);
        }
    }
    Ok(())
}
