use crate::anatomy::{intrinsic_ball, LocalGraph};
use crate::engine::{explore_cluster, Config};
use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;
use crate::rng::EdgeLabelSample;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// Largest local graph handled by the exact rational walk.
pub const RATIONAL_MAX_VERTICES: usize = 30;

#[derive(Debug, Clone, Serialize)]
pub struct WalkReport {
    pub p: f64,
    pub seed: u64,
    pub root: u32,
    /// Graph radius parameter when the family has one.
    pub graph_radius: Option<u64>,
    pub censored: bool,
    /// Vertices of the explored open ball the walk runs on.
    pub vertices: usize,
    pub degenerate: bool,
    /// `return_probs[n] = p_{2n}(root, root)`
    pub return_probs: Vec<f64>,
    /// `(n, -ln p_{2n} / n^(1/3))` for `n >= n_min`
    pub diagnostic: Vec<(usize, f64)>,
    /// Largest `|sum of the distribution - 1|` seen after any step.
    pub max_mass_error: f64,
    pub p2_closed_form: String,
    pub p2_powered: String,
    pub p2_match: bool,
}

/// Transition structure of the simple random walk on a local open graph.
pub struct Walk<'a> {
    lg: &'a LocalGraph,
}

impl<'a> Walk<'a> {
    pub fn new(lg: &'a LocalGraph) -> Self {
        Walk { lg }
    }

    /// One step of the distribution vector; vertices without neighbours keep their mass.
    pub fn step(&self, mu: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (v, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let nb = &self.lg.adj[v];
            if nb.is_empty() {
                out[v] += m;
                continue;
            }
            let share = m / nb.len() as f64;
            for &(w, _) in nb {
                out[w] += share;
            }
        }
    }

    pub fn step_exact(&self, mu: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); mu.len()];
        for (v, m) in mu.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let nb = &self.lg.adj[v];
            if nb.is_empty() {
                out[v] += m;
                continue;
            }
            let share = m / BigRational::from_integer(BigInt::from(nb.len()));
            for &(w, _) in nb {
                out[w] += &share;
            }
        }
        out
    }

    /// `p_t(root, root)` for `t = 0..=steps` together with the worst mass drift.
    pub fn return_probabilities(&self, steps: usize) -> (Vec<f64>, f64) {
        let n = self.lg.len();
        let mut mu = vec![0.0; n];
        let mut nu = vec![0.0; n];
        mu[0] = 1.0;
        let mut out = vec![1.0];
        let mut drift = 0.0f64;
        for _ in 0..steps {
            self.step(&mu, &mut nu);
            std::mem::swap(&mut mu, &mut nu);
            drift = drift.max((mu.iter().sum::<f64>() - 1.0).abs());
            out.push(mu[0]);
        }
        (out, drift)
    }

    /// Exact `p_t(root, root)`; also asserts exact mass conservation.
    pub fn return_probabilities_exact(&self, steps: usize) -> Result<Vec<BigRational>> {
        if self.lg.len() > RATIONAL_MAX_VERTICES {
            return Err(Error::Size(format!(
                "rational walk limited to {RATIONAL_MAX_VERTICES} vertices, got {}",
                self.lg.len()
            )));
        }
        let mut mu = vec![BigRational::zero(); self.lg.len()];
        mu[0] = BigRational::one();
        let mut out = vec![BigRational::one()];
        for _ in 0..steps {
            mu = self.step_exact(&mu);
            let total = mu.iter().fold(BigRational::zero(), |a, x| a + x);
            if !total.is_one() {
                return Err(Error::State(format!("walk lost mass: total {total}")));
            }
            out.push(mu[0].clone());
        }
        Ok(out)
    }

    /// `p_2(root, root) = sum_{u ~ root} 1/(deg root deg u)`.
    pub fn p2_closed_form(&self) -> BigRational {
        let nb = &self.lg.adj[0];
        if nb.is_empty() {
            return BigRational::one();
        }
        let dv = BigInt::from(nb.len());
        nb.iter().fold(BigRational::zero(), |a, &(u, _)| {
            a + BigRational::new(BigInt::one(), &dv * BigInt::from(self.lg.adj[u].len()))
        })
    }

    /// `p_2` from two exact walk steps out of the root and back.
    pub fn p2_powered(&self) -> BigRational {
        let nb = &self.lg.adj[0];
        if nb.is_empty() {
            return BigRational::one();
        }
        let dv = BigInt::from(nb.len());
        let mut total = BigRational::zero();
        for &(u, _) in nb {
            let first = BigRational::new(BigInt::one(), dv.clone());
            let back = self.lg.adj[u].iter().filter(|&&(w, _)| w == 0).count();
            total += first * BigRational::new(BigInt::from(back), BigInt::from(self.lg.adj[u].len()));
        }
        total
    }
}

/// Return probabilities of the simple random walk on the open cluster of `root`
/// in configuration `seed`, using the open ball of intrinsic radius `n_max + 1`
/// (enough for every `p_{2n}`, `n <= n_max`).
pub fn walk_return(g: &Graph, p: f64, seed: u64, n_max: usize, root: u32, n_min: usize) -> Result<WalkReport> {
    check_probability(p)?;
    let labels = EdgeLabelSample::new(seed);
    let censored = explore_cluster(g, &labels, p, root)?.censored;
    let lg = intrinsic_ball(g, &Config { labels, p }, root, n_max as u32 + 1);
    let walk = Walk::new(&lg);
    let degenerate = lg.adj[0].is_empty();
    let (probs, drift) = if degenerate { (vec![1.0], 0.0) } else { walk.return_probabilities(2 * n_max) };
    let return_probs: Vec<f64> = probs.iter().step_by(2).copied().collect();
    let diagnostic = return_probs
        .iter()
        .enumerate()
        .skip(n_min.max(1))
        .map(|(n, &x)| (n, -x.ln() / (n as f64).cbrt()))
        .collect();
    let (cf, pw) = (walk.p2_closed_form(), walk.p2_powered());
    Ok(WalkReport {
        p,
        seed,
        root,
        graph_radius: g.family().params.get("radius").and_then(|v| v.as_u64()),
        censored,
        vertices: lg.len(),
        degenerate,
        return_probs,
        diagnostic,
        max_mass_error: drift,
        p2_match: cf == pw,
        p2_closed_form: cf.to_string(),
        p2_powered: pw.to_string(),
    })
}

impl WalkReport {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# p={}\n# seed={}\n# root={}\n# radius={}\n# censored={}\n# vertices={}\n# max_mass_error={:e}\n",
            self.p,
            self.seed,
            self.root,
            self.graph_radius.map_or("NA".into(), |r| r.to_string()),
            self.censored,
            self.vertices,
            self.max_mass_error
        );
        s.push_str("n,p_2n,diagnostic\n");
        let diag: std::collections::HashMap<usize, f64> = self.diagnostic.iter().copied().collect();
        for (n, &x) in self.return_probs.iter().enumerate() {
            s.push_str(&format!("{n},{x:e},{}\n", diag.get(&n).map_or("NA".into(), |d| d.to_string())));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn single_edge_and_triangle() {
        let e = Graph::explicit(2, &[(0, 1)]).unwrap();
        let r = walk_return(&e, 1.0, 0, 10, 0, 1).unwrap();
        assert!(r.return_probs.iter().all(|&x| x == 1.0));
        let t = Graph::explicit(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let r = walk_return(&t, 1.0, 0, 3, 0, 1).unwrap();
        assert_eq!(r.return_probs[1], 0.5);
        assert_eq!(r.p2_closed_form, "1/2");
        assert!(r.p2_match);
    }

    #[test]
    fn isolated_root_is_degenerate() {
        let t = Graph::explicit(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let r = walk_return(&t, 0.0, 0, 5, 0, 1).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.return_probs, vec![1.0]);
    }

    #[test]
    fn exact_walk_on_a_square() {
        let g = Graph::explicit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let lg = LocalGraph::from_edges(&g, 0, &[0, 1, 2, 3]);
        let w = Walk::new(&lg);
        let ex = w.return_probabilities_exact(4).unwrap();
        assert_eq!(ex[2], rat(1, 2));
        assert_eq!(ex[4], rat(1, 2));
        let (fl, drift) = w.return_probabilities(4);
        assert_eq!(fl[2], 0.5);
        assert!(drift < 1e-15);
    }
}
