//! Correlation, dynamic time warping and energy metrics.

use crate::error::{Error, Result};

/// Pearson product-moment correlation of two equal-length sequences.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::EmptyInput);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    // sqrt of the product returns sxx exactly when both sums agree
    let mut denom = (sxx * syy).sqrt();
    if !denom.is_normal() {
        denom = sxx.sqrt() * syy.sqrt();
    }
    Ok((sxy / denom).clamp(-1.0, 1.0))
}

/// Accumulated cost matrix and optimal warping path of a DTW alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct DtwResult {
    rows: usize,
    cols: usize,
    cost: Vec<f64>,
    path: Vec<(usize, usize)>,
    distance: f64,
    normalized_distance: f64,
}

impl DtwResult {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Accumulated cost `D(i, j)`.
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.cols + j]
    }

    /// Row-major accumulated cost matrix.
    pub fn cost_matrix(&self) -> &[f64] {
        &self.cost
    }

    pub fn cost_row(&self, i: usize) -> &[f64] {
        &self.cost[i * self.cols..(i + 1) * self.cols]
    }

    pub fn path(&self) -> &[(usize, usize)] {
        &self.path
    }

    /// `sqrt(D(n-1, m-1))`.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn normalized_distance(&self) -> f64 {
        self.normalized_distance
    }

    pub fn similarity(&self) -> f64 {
        1.0 - self.normalized_distance
    }
}

/// Full DTW with squared local cost and the symmetric unit step pattern.
///
/// The path is backtracked from `(n-1, m-1)`; ties prefer the diagonal
/// predecessor, then `(i-1, j)`, then `(i, j-1)`.
pub fn dtw(x: &[f64], y: &[f64]) -> Result<DtwResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (n, m) = (x.len(), y.len());
    let mut cost = vec![0.0f64; n * m];
    for i in 0..n {
        for j in 0..m {
            let d = (x[i] - y[j]) * (x[i] - y[j]);
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cost[j - 1],
                (_, 0) => cost[(i - 1) * m],
                _ => cost[(i - 1) * m + j - 1]
                    .min(cost[(i - 1) * m + j])
                    .min(cost[i * m + j - 1]),
            };
            cost[i * m + j] = d + best;
        }
    }

    let mut path = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n - 1, m - 1);
    path.push((i, j));
    while (i, j) != (0, 0) {
        (i, j) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let diag = cost[(i - 1) * m + j - 1];
            let up = cost[(i - 1) * m + j];
            let left = cost[i * m + j - 1];
            if diag <= up && diag <= left {
                (i - 1, j - 1)
            } else if up <= left {
                (i - 1, j)
            } else {
                (i, j - 1)
            }
        };
        path.push((i, j));
    }
    path.reverse();

    let distance = cost[n * m - 1].sqrt();
    let normalized_distance = normalize(distance, worst_case_distance(x, m));
    Ok(DtwResult {
        rows: n,
        cols: m,
        cost,
        path,
        distance,
        normalized_distance,
    })
}

/// DTW distance only, in `O(m)` memory.
pub fn dtw_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let m = y.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &xi in x {
        cur[0] = f64::INFINITY;
        for j in 0..m {
            let d = (xi - y[j]) * (xi - y[j]);
            cur[j + 1] = d + prev[j].min(prev[j + 1]).min(cur[j]);
        }
        std::mem::swap(&mut prev, &mut cur);
        prev[0] = f64::INFINITY;
    }
    Ok(prev[m].sqrt())
}

fn normalize(distance: f64, worst: f64) -> f64 {
    if worst > 0.0 {
        (distance / worst).clamp(0.0, 1.0)
    } else if distance == 0.0 {
        0.0
    } else {
        1.0
    }
}

/// DTW distance between `x` and a length-`m` constant held at whichever end
/// of `x`'s range is farther from the bulk of `x`.
///
/// Against a constant every path cell in row `i` costs `(x[i] - c)^2`. Each
/// row must be visited once; when `m > n` the `m - n` extra horizontal steps
/// are cheapest on the row closest to `c`.
pub fn worst_case_distance(x: &[f64], m: usize) -> f64 {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sq = |c: f64| x.iter().map(|v| (v - c) * (v - c)).sum::<f64>();
    let c = if sq(lo) >= sq(hi) { lo } else { hi };
    let base = sq(c);
    let extra = m.saturating_sub(x.len()) as f64
        * x.iter()
            .map(|v| (v - c) * (v - c))
            .fold(f64::INFINITY, f64::min);
    (base + extra).sqrt()
}

/// Sum of squared samples.
pub fn energy(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(x.iter().map(|v| v * v).sum())
}

/// Left-Riemann estimate of `∫|x(t)|² dt`.
pub fn power(x: &[f64], f_samp: f64) -> Result<f64> {
    if !(f_samp.is_finite() && f_samp > 0.0) {
        return Err(Error::BadRate(f_samp));
    }
    Ok(energy(x)? / f_samp)
}
