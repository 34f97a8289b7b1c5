//! Small dense least-squares helpers. Problems here have at most a handful of
//! parameters, so plain Gaussian elimination is enough.

use crate::error::{Error, Result};

/// Solves `a x = b` for a small symmetric positive definite `a` (row-major, k x k),
/// returning `x` and `a^{-1}`.
pub fn solve_spd(a: &[f64], b: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = b.len();
    // augmented [a | b | I]
    let w = 2 * k + 1;
    let mut m = vec![0.0; k * w];
    for i in 0..k {
        m[i * w..i * w + k].copy_from_slice(&a[i * k..i * k + k]);
        m[i * w + k] = b[i];
        m[i * w + k + 1 + i] = 1.0;
    }
    for c in 0..k {
        let piv = (c..k)
            .max_by(|&x, &y| m[x * w + c].abs().total_cmp(&m[y * w + c].abs()))
            .unwrap();
        if m[piv * w + c].abs() < 1e-300 || !m[piv * w + c].is_finite() {
            return Err(Error::Fit("singular normal equations".into()));
        }
        if piv != c {
            for j in 0..w {
                m.swap(piv * w + j, c * w + j);
            }
        }
        let d = m[c * w + c];
        for j in 0..w {
            m[c * w + j] /= d;
        }
        for r in 0..k {
            if r != c {
                let f = m[r * w + c];
                if f != 0.0 {
                    for j in 0..w {
                        m[r * w + j] -= f * m[c * w + j];
                    }
                }
            }
        }
    }
    let x = (0..k).map(|i| m[i * w + k]).collect();
    let mut inv = vec![0.0; k * k];
    for i in 0..k {
        inv[i * k..i * k + k].copy_from_slice(&m[i * w + k + 1..i * w + w]);
    }
    Ok((x, inv))
}

/// Weighted least squares fit of `y ~ X beta`. Rows of `x` are design rows.
/// Returns `(beta, (X'WX)^{-1}, weighted residual sum of squares)`.
pub fn wls(x: &[Vec<f64>], y: &[f64], w: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let k = x.first().map(|r| r.len()).unwrap_or(0);
    if x.len() < k || k == 0 {
        return Err(Error::Fit(format!("{} points cannot determine {k} parameters", x.len())));
    }
    let mut a = vec![0.0; k * k];
    let mut b = vec![0.0; k];
    for ((row, &yi), &wi) in x.iter().zip(y).zip(w) {
        for i in 0..k {
            b[i] += wi * row[i] * yi;
            for j in 0..k {
                a[i * k + j] += wi * row[i] * row[j];
            }
        }
    }
    let (beta, inv) = solve_spd(&a, &b)?;
    let rss = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((row, &yi), &wi)| {
            let f: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            wi * (yi - f).powi(2)
        })
        .sum();
    Ok((beta, inv, rss))
}

/// Poisson regression with log link: `counts_i ~ Poisson(exp(x_i . beta))`.
/// Newton iterations from a weighted log-count start. Returns `(beta, Fisher^{-1})`.
pub fn poisson_glm(x: &[Vec<f64>], counts: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let logs: Vec<f64> = counts.iter().map(|c| c.max(0.5).ln()).collect();
    let (mut beta, _, _) = wls(x, &logs, counts)?;
    let k = beta.len();
    let mut fisher_inv = vec![0.0; k * k];
    for _ in 0..200 {
        let mut grad = vec![0.0; k];
        let mut hess = vec![0.0; k * k];
        for (row, &c) in x.iter().zip(counts) {
            let eta: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let mu = eta.exp();
            for i in 0..k {
                grad[i] += (c - mu) * row[i];
                for j in 0..k {
                    hess[i * k + j] += mu * row[i] * row[j];
                }
            }
        }
        let (step, inv) = solve_spd(&hess, &grad)?;
        fisher_inv = inv;
        // damp wild steps; the log-likelihood is concave so this only slows convergence
        let big = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let scale = if big > 5.0 { 5.0 / big } else { 1.0 };
        for (b, s) in beta.iter_mut().zip(&step) {
            *b += scale * s;
        }
        if !beta.iter().all(|b| b.is_finite()) {
            return Err(Error::Fit("poisson regression diverged".into()));
        }
        if big * scale < 1e-11 {
            return Ok((beta, fisher_inv));
        }
    }
    Ok((beta, fisher_inv))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Linear-interpolated quantile of already sorted data.
pub fn quantile_sorted(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let h = q.clamp(0.0, 1.0) * (xs.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
}
