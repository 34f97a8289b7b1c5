use super::{check_root, par_trials, Config, Explorer};
use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;
use crate::rng::EdgeLabelSample;
use crate::stats;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write;

/// Bins with fewer samples than this are left out of every fit.
pub const MIN_BIN_COUNT: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FitWindow {
    pub n_min: u64,
    pub n_max: u64,
}

impl std::str::FromStr for FitWindow {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Argument(format!("fit window `{s}` is not of the form MIN:MAX")))?;
        let parse = |x: &str| x.trim().parse::<u64>().map_err(|_| Error::Argument(format!("bad window bound `{x}`")));
        let w = FitWindow { n_min: parse(a)?, n_max: parse(b)? };
        if w.n_min > w.n_max {
            return Err(Error::Argument("fit window has MIN > MAX".into()));
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaFit {
    /// Decay rate from a Poisson regression of the bin counts on
    /// `a - zeta n - beta ln n + gamma / n` (fewer terms when bins are scarce).
    pub zeta_hat: f64,
    pub zeta_stderr: f64,
    /// Set when the fitted rate was not positive; `zeta_hat` is then 0.
    pub nonpositive: bool,
    /// Negated weighted least-squares slope of the log survival curve.
    pub zeta_slope: f64,
    pub zeta_slope_stderr: f64,
    /// Fitted polynomial prefactor exponent `beta`, if that term was used.
    pub prefactor_exponent: Option<f64>,
    pub terms: usize,
    pub bins_used: usize,
    pub window: FitWindow,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub root: u32,
    pub finite_counts: BTreeMap<u64, u64>,
    pub censored_count: u64,
    pub fit: Option<ZetaFit>,
    pub fit_error: Option<String>,
}

impl TailReport {
    pub fn finite_total(&self) -> u64 {
        self.finite_counts.values().sum()
    }

    /// `(n, #{finite trials with E_v >= n})` for every observed n.
    pub fn tail_counts(&self) -> Vec<(u64, u64)> {
        let mut acc = 0;
        let mut out: Vec<(u64, u64)> = self
            .finite_counts
            .iter()
            .rev()
            .map(|(&n, &c)| {
                acc += c;
                (n, acc)
            })
            .collect();
        out.reverse();
        out
    }

    pub fn zeta_hat(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.zeta_hat)
    }

    /// Fits the decay rate over `window` (whole support if `None`).
    pub fn refit(&mut self, window: Option<FitWindow>) {
        match fit_zeta(self, window) {
            Ok(f) => {
                self.fit = Some(f);
                self.fit_error = None;
            }
            Err(e) => {
                self.fit = None;
                self.fit_error = Some(e.to_string());
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let (z, zse) = match &self.fit {
            Some(f) => (f.zeta_hat.to_string(), f.zeta_stderr.to_string()),
            None => ("NA".into(), "NA".into()),
        };
        let _ = writeln!(s, "# p={}", self.p);
        let _ = writeln!(s, "# trials={}", self.trials);
        let _ = writeln!(s, "# seed={}", self.seed);
        let _ = writeln!(s, "# zeta_hat={z}");
        let _ = writeln!(s, "# zeta_stderr={zse}");
        let _ = writeln!(s, "# censored_count={}", self.censored_count);
        if let Some(f) = &self.fit {
            let _ = writeln!(s, "# zeta_slope={}", f.zeta_slope);
            let _ = writeln!(s, "# fit_window={}:{}", f.window.n_min, f.window.n_max);
        }
        let _ = writeln!(s, "n,finite_count,survival,survival_stderr");
        let t = self.trials as f64;
        for (n, tail) in self.tail_counts() {
            let sv = tail as f64 / t;
            let se = (sv * (1.0 - sv) / t).sqrt();
            let _ = writeln!(s, "{n},{},{sv},{se}", self.finite_counts[&n]);
        }
        s
    }
}

fn fit_zeta(r: &TailReport, window: Option<FitWindow>) -> Result<ZetaFit> {
    let w = window.unwrap_or(FitWindow { n_min: 0, n_max: u64::MAX });
    let bins: Vec<(u64, u64)> = r
        .finite_counts
        .iter()
        .filter(|(&n, &c)| n >= w.n_min && n <= w.n_max && c >= MIN_BIN_COUNT)
        .map(|(&n, &c)| (n, c))
        .collect();
    if bins.len() < 2 {
        return Err(Error::Fit(format!(
            "{} bin(s) with at least {MIN_BIN_COUNT} samples in window {}:{}; need 2",
            bins.len(),
            w.n_min,
            w.n_max
        )));
    }
    let terms = match bins.len() {
        2 => 2,
        3..=4 => 3,
        _ => 4,
    };
    let design = |n: u64| {
        let x = n as f64;
        let full = [1.0, x, x.ln(), 1.0 / x];
        full[..terms].to_vec()
    };
    let xs: Vec<Vec<f64>> = bins.iter().map(|&(n, _)| design(n)).collect();
    let ys: Vec<f64> = bins.iter().map(|&(_, c)| c as f64).collect();
    let (beta, inv) = stats::poisson_glm(&xs, &ys)?;
    let raw = -beta[1];
    let zeta_stderr = inv[terms + 1].max(0.0).sqrt();

    // survival slope on the same abscissae
    let tails: BTreeMap<u64, u64> = r.tail_counts().into_iter().collect();
    let t = r.trials as f64;
    let mut sx = Vec::new();
    let mut sy = Vec::new();
    let mut sw = Vec::new();
    for &(n, _) in &bins {
        let s = tails[&n] as f64 / t;
        if s <= 0.0 || s >= 1.0 {
            continue;
        }
        sx.push(vec![1.0, n as f64]);
        sy.push(s.ln());
        sw.push(t * s / (1.0 - s));
    }
    let (zeta_slope, zeta_slope_stderr) = match stats::wls(&sx, &sy, &sw) {
        Ok((b, inv, _)) if sx.len() >= 2 => (-b[1], inv[3].max(0.0).sqrt()),
        _ => (f64::NAN, f64::NAN),
    };
    Ok(ZetaFit {
        zeta_hat: raw.max(0.0),
        zeta_stderr,
        nonpositive: raw <= 0.0,
        zeta_slope,
        zeta_slope_stderr,
        prefactor_exponent: (terms >= 3).then(|| -beta[2]),
        terms,
        bins_used: bins.len(),
        window: FitWindow { n_min: bins[0].0, n_max: bins[bins.len() - 1].0 },
    })
}

/// Monte Carlo law of `E_v` at the graph's root. Trial `t` uses labels seeded by `seed + t`.
pub fn tail_histogram(
    g: &Graph,
    p: f64,
    trials: u64,
    seed: u64,
    window: Option<FitWindow>,
    workers: usize,
) -> Result<TailReport> {
    check_probability(p)?;
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let root = g.root();
    check_root(g, root)?;
    let (finite_counts, censored_count) = par_trials(
        trials,
        workers,
        |range| {
            let mut ex = Explorer::new(g);
            let mut hist = BTreeMap::new();
            let mut cens = 0u64;
            for t in range {
                let s = ex.summary(g, &Config { labels: EdgeLabelSample::for_trial(seed, t), p }, root);
                if s.censored {
                    cens += 1;
                } else {
                    *hist.entry(s.e_v()).or_insert(0u64) += 1;
                }
            }
            (hist, cens)
        },
        |(mut a, ca), (b, cb)| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            (a, ca + cb)
        },
    );
    let mut r = TailReport { p, trials, seed, root, finite_counts, censored_count, fit: None, fit_error: None };
    r.refit(window);
    Ok(r)
}

#[derive(Debug, Clone, Serialize)]
pub struct StretchedFit {
    /// Stretch exponent in `ln S(n) = a - c n^kappa`.
    pub kappa: f64,
    pub c: f64,
    pub a: f64,
    pub rss_stretched: f64,
    /// Weighted residual of the best pure exponential (`kappa = 1`).
    pub rss_exponential: f64,
    pub exponential_rejected: bool,
    pub points: usize,
}

/// Fits `ln P(E_v >= n, finite) = a - c n^kappa` by weighted least squares,
/// profiling out `(a, c)` over a grid of `kappa` and refining by golden section.
/// Points with fewer than [`MIN_BIN_COUNT`] tail samples or `n < n_min` are dropped.
pub fn stretched_fit(r: &TailReport, n_min: u64) -> Result<StretchedFit> {
    let t = r.trials as f64;
    let pts: Vec<(f64, f64, f64)> = r
        .tail_counts()
        .into_iter()
        .filter(|&(n, c)| n >= n_min && c >= MIN_BIN_COUNT && c < r.trials)
        .map(|(n, c)| {
            let s = c as f64 / t;
            (n as f64, s.ln(), t * s / (1.0 - s))
        })
        .collect();
    if pts.len() < 4 {
        return Err(Error::Fit(format!("only {} usable survival points", pts.len())));
    }
    let rss_at = |kappa: f64| -> Result<(f64, f64, f64)> {
        let xs: Vec<Vec<f64>> = pts.iter().map(|&(n, _, _)| vec![1.0, -n.powf(kappa)]).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let ws: Vec<f64> = pts.iter().map(|p| p.2).collect();
        let (b, _, rss) = stats::wls(&xs, &ys, &ws)?;
        Ok((rss, b[0], b[1]))
    };
    let mut best = (f64::INFINITY, 1.0);
    let mut k = 0.05;
    while k <= 1.5 + 1e-12 {
        let (rss, _, _) = rss_at(k)?;
        if rss < best.0 {
            best = (rss, k);
        }
        k += 0.01;
    }
    let (mut lo, mut hi) = ((best.1 - 0.01f64).max(0.01), best.1 + 0.01);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if rss_at(m1)?.0 < rss_at(m2)?.0 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let kappa = 0.5 * (lo + hi);
    let (rss, a, c) = rss_at(kappa)?;
    let (rss_exp, _, _) = rss_at(1.0)?;
    Ok(StretchedFit {
        kappa,
        c,
        a,
        rss_stretched: rss,
        rss_exponential: rss_exp,
        exponential_rejected: rss_exp >= 2.0 * rss,
        points: pts.len(),
    })
}
