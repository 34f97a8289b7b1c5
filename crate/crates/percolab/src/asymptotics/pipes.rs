use crate::anatomy::{ball_mask, intrinsic_ball, longest_pipe_local};
use crate::engine::{explore_cluster, par_trials, Config};
use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;
use crate::rng::{EdgeLabelSample, SplitMix64};
use crate::stats::{mean, quantile_sorted};
use serde::Serialize;

pub const BOOTSTRAP_REPS: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct PipeRow {
    pub r: u32,
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipeCensus {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub censored: usize,
    /// Trials whose cluster was finite and therefore left out.
    pub excluded: usize,
    pub rows: Vec<PipeRow>,
    /// Least-squares slope of the median pipe length against `r`.
    pub slope: f64,
    /// 5% bootstrap quantile of the slope (clusters resampled).
    pub slope_lower: f64,
}

fn medians(samples: &[Vec<usize>], idx: &[usize], nr: usize) -> Vec<f64> {
    (0..nr)
        .map(|j| {
            let mut v: Vec<f64> = idx.iter().map(|&i| samples[i][j] as f64).collect();
            v.sort_by(|a, b| a.total_cmp(b));
            quantile_sorted(&v, 0.5)
        })
        .collect()
}

fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Longest pipe inside the intrinsic ball of each radius, over censored clusters.
pub fn pipe_census(g: &Graph, p: f64, trials: u64, seed: u64, radius_grid: &[u32], workers: usize) -> Result<PipeCensus> {
    check_probability(p)?;
    if radius_grid.is_empty() {
        return Err(Error::Argument("radius grid is empty".into()));
    }
    let root = g.root();
    explore_cluster(g, &EdgeLabelSample::new(seed), p, root)?;
    let r_top = *radius_grid.iter().max().unwrap();
    let samples: Vec<Vec<usize>> = par_trials(
        trials,
        workers,
        |range| {
            let mut out = Vec::new();
            for t in range {
                let labels = EdgeLabelSample::for_trial(seed, t);
                if !explore_cluster(g, &labels, p, root).expect("root checked").censored {
                    continue;
                }
                let lg = intrinsic_ball(g, &Config { labels, p }, root, r_top + 1);
                out.push(radius_grid.iter().map(|&r| longest_pipe_local(&lg, &ball_mask(&lg, r))).collect());
            }
            out
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    if samples.is_empty() {
        return Err(Error::State(format!(
            "no censored clusters in {trials} trials at p = {p}; raise p or the graph radius"
        )));
    }
    let nr = radius_grid.len();
    let rows: Vec<PipeRow> = (0..nr)
        .map(|j| {
            let mut v: Vec<f64> = samples.iter().map(|s| s[j] as f64).collect();
            v.sort_by(|a, b| a.total_cmp(b));
            PipeRow {
                r: radius_grid[j],
                median: quantile_sorted(&v, 0.5),
                q10: quantile_sorted(&v, 0.1),
                q90: quantile_sorted(&v, 0.9),
                mean: mean(&v),
            }
        })
        .collect();
    let xs: Vec<f64> = radius_grid.iter().map(|&r| r as f64).collect();
    let all: Vec<usize> = (0..samples.len()).collect();
    let slope = ols_slope(&xs, &medians(&samples, &all, nr));
    let mut rng = SplitMix64::new(seed ^ 0xB007_5742_u64);
    let mut boot: Vec<f64> = (0..BOOTSTRAP_REPS)
        .map(|_| {
            let idx: Vec<usize> = (0..samples.len()).map(|_| rng.below(samples.len() as u64) as usize).collect();
            ols_slope(&xs, &medians(&samples, &idx, nr))
        })
        .collect();
    boot.sort_by(|a, b| a.total_cmp(b));
    Ok(PipeCensus {
        p,
        trials,
        seed,
        censored: samples.len(),
        excluded: trials as usize - samples.len(),
        rows,
        slope,
        slope_lower: quantile_sorted(&boot, 0.05),
    })
}

impl PipeCensus {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# p={}\n# seed={}\n# trials={}\n# censored={}\n# excluded={}\n# slope={}\n# slope_lower={}\n",
            self.p, self.seed, self.trials, self.censored, self.excluded, self.slope, self.slope_lower
        );
        s.push_str("r,median,q10,q90,mean\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", r.r, r.median, r.q10, r.q90, r.mean));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Family;

    #[test]
    fn fully_open_tree_has_unit_pipes() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 8 }).unwrap();
        let c = pipe_census(&g, 1.0, 5, 1, &[2, 4, 6], 1).unwrap();
        assert!(c.rows.iter().all(|r| r.median == 1.0 && r.q90 == 1.0));
        assert_eq!(c.censored + c.excluded, 5);
    }

    #[test]
    fn bookkeeping() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 10 }).unwrap();
        let c = pipe_census(&g, 0.75, 200, 4, &[2, 4], 1).unwrap();
        assert_eq!(c.censored + c.excluded, 200);
        assert!(c.excluded > 0);
    }
}
