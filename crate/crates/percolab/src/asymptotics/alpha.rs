use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct AlphaSolution {
    pub p: f64,
    pub zeta: f64,
    pub alpha: f64,
    pub iterations: u32,
    /// Width of the final bracket.
    pub residual: f64,
}

/// `ln[alpha^-alpha (1-alpha)^-(1-alpha) (p/(1-p))^alpha]`, increasing on `(0, p]`.
pub fn alpha_exponent(alpha: f64, p: f64) -> f64 {
    let ent = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    ent(alpha) + ent(1.0 - alpha) + alpha * (p / (1.0 - p)).ln()
}

fn feasible(alpha: f64, p: f64, zeta: f64) -> bool {
    alpha_exponent(alpha, p) < zeta
}

fn check(p: f64, zeta: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Parameter(format!("p must lie in (0,1), got {p}")));
    }
    if !(zeta >= 0.0) {
        return Err(Error::Parameter(format!("zeta must be nonnegative, got {zeta}")));
    }
    Ok(())
}

/// `sup{alpha in [0,p] : exponent(alpha) < zeta}` by bisection; 0 when empty.
pub fn solve_alpha(p: f64, zeta: f64, tol: f64) -> Result<AlphaSolution> {
    check(p, zeta)?;
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let done = |alpha, iterations, residual| Ok(AlphaSolution { p, zeta, alpha, iterations, residual });
    if zeta == 0.0 {
        return done(0.0, 0, 0.0);
    }
    // the exponent at alpha = p equals -ln(1-p)
    if feasible(p, p, zeta) {
        return done(p, 0, 0.0);
    }
    let (mut lo, mut hi) = (0.0f64, p);
    let mut it = 0;
    while hi - lo > tol && it < 200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid, p, zeta) {
            lo = mid;
        } else {
            hi = mid;
        }
        it += 1;
    }
    done(lo, it, hi - lo)
}

/// Grid oracle making no monotonicity assumption above the grid resolution:
/// scans `[0, p]` at step `10^-3`, then the cell after the last feasible point at
/// `10^-6`, then again at `10^-9`. With no feasible point the first cell is refined.
pub fn alpha_dense_scan(p: f64, zeta: f64) -> Result<f64> {
    check(p, zeta)?;
    let mut lo = 0.0;
    let mut hi = p;
    let mut best = 0.0;
    for step in [1e-3, 1e-6, 1e-9] {
        let n = ((hi - lo) / step).ceil() as usize;
        let mut last = None;
        for i in 0..=n {
            let a = (lo + i as f64 * step).min(p);
            if a > 0.0 && feasible(a, p, zeta) {
                last = Some(a);
            }
        }
        match last {
            Some(a) => {
                best = a;
                lo = a;
                hi = (a + step).min(p);
            }
            None => hi = (lo + step).min(p),
        }
    }
    Ok(best)
}
