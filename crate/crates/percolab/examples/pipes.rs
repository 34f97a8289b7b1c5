//! Longest pipe (path of degree-2 vertices) inside intrinsic balls; grows about
//! logarithmically with the radius.
use percolab::asymptotics::pipe_census;
use percolab::{Family, Graph};

fn main() -> percolab::Result<()> {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 18 })?;
    let c = pipe_census(&g, 0.6, 300, 3, &[2, 4, 8, 16], 0)?;
    print!("{}", c.to_csv());
    Ok(())
}
