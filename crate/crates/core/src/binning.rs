//! Grid observables: clipped sampled states and binned event indicators.

use crate::error::{Error, Result};
use crate::simulate::EventLog;

/// Clipped states `Z[j][r] = min(X_j(r h), R)` and indicators
/// `Y[i][r] = 1{ node i has an event in (r h, (r + 1) h] }` for
/// `r = 0..n`, `n = floor(T / h)`.
///
/// `Z` is stored column-major (one contiguous slice per node); `Y` is stored
/// sparsely as the sorted list of bins in which each node fires.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSample {
    pub d: usize,
    pub n: usize,
    pub h: f64,
    pub clip: f64,
    z: Vec<f64>,
    y_bins: Vec<Vec<u32>>,
}

impl BinnedSample {
    /// Builds a sample from explicit matrices; `z[j]` and `y[i]` are length-`n`
    /// columns. Entries of `y` must be 0 or 1.
    pub fn from_columns(h: f64, clip: f64, z: Vec<Vec<f64>>, y: Vec<Vec<u8>>) -> Result<Self> {
        let d = z.len();
        if y.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: y.len(),
            });
        }
        let n = z.first().map_or(0, Vec::len);
        if z.iter().any(|c| c.len() != n) || y.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidParameter(
                "all columns must have the same length".into(),
            ));
        }
        if y.iter().flatten().any(|&v| v > 1) {
            return Err(Error::InvalidParameter(
                "indicator entries must be 0 or 1".into(),
            ));
        }
        let y_bins = y
            .iter()
            .map(|col| {
                col.iter()
                    .enumerate()
                    .filter(|(_, &v)| v == 1)
                    .map(|(r, _)| r as u32)
                    .collect()
            })
            .collect();
        Ok(Self {
            d,
            n,
            h,
            clip,
            z: z.into_iter().flatten().collect(),
            y_bins,
        })
    }

    /// Clipped state column of node `j`.
    pub fn z_col(&self, j: usize) -> &[f64] {
        &self.z[j * self.n..(j + 1) * self.n]
    }

    pub fn z(&self, r: usize, j: usize) -> f64 {
        self.z[j * self.n + r]
    }

    /// Sorted bins in which node `i` fires.
    pub fn y_bins(&self, i: usize) -> &[u32] {
        &self.y_bins[i]
    }

    pub fn y(&self, r: usize, i: usize) -> u8 {
        u8::from(self.y_bins[i].binary_search(&(r as u32)).is_ok())
    }

    /// Dense indicator column of node `i`.
    pub fn y_col(&self, i: usize) -> Vec<u8> {
        let mut col = vec![0; self.n];
        for &r in &self.y_bins[i] {
            col[r as usize] = 1;
        }
        col
    }

    /// Number of nonzero indicators.
    pub fn nnz_y(&self) -> usize {
        self.y_bins.iter().map(Vec::len).sum()
    }

    /// Relabels nodes: node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut z = vec![0.0; self.z.len()];
        let mut y_bins = vec![Vec::new(); self.d];
        for (i, &p) in perm.iter().enumerate().take(self.d) {
            z[p * self.n..(p + 1) * self.n].copy_from_slice(self.z_col(i));
            y_bins[p] = self.y_bins[i].clone();
        }
        Self {
            z,
            y_bins,
            ..self.clone()
        }
    }
}

/// Samples and clips the states on the grid `r h` and bins events into
/// `(r h, (r + 1) h]`. Burn-in events contribute to the states. An event
/// exactly on `r h` counts toward bin `r - 1` and toward `X(r h)`.
pub fn bin_and_clip(log: &EventLog, h: f64, clip: f64) -> Result<BinnedSample> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bin width h = {h} must be positive"
        )));
    }
    if !(clip > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "clip level R = {clip} must be positive"
        )));
    }
    let n = (log.t_end / h).floor() as usize;
    if n == 0 {
        return Err(Error::InvalidParameter(format!(
            "T = {} is shorter than one bin of width {h}",
            log.t_end
        )));
    }
    let grid = |r: usize| r as f64 * h;
    let step = (-log.beta * h).exp();
    let mut z = Vec::with_capacity(n * log.d);
    let mut y_bins = Vec::with_capacity(log.d);
    for ev in &log.events {
        // States: X(0) directly, then X(r h) = X((r-1) h) e^{-beta h} + new events.
        let mut next = ev.partition_point(|&s| s <= 0.0);
        let mut x: f64 = ev[..next].iter().map(|&s| (log.beta * s).exp()).sum();
        z.push(x.min(clip));
        for r in 1..n {
            let t = grid(r);
            x *= step;
            while next < ev.len() && ev[next] <= t {
                x += (-log.beta * (t - ev[next])).exp();
                next += 1;
            }
            z.push(x.min(clip));
        }

        let first = ev.partition_point(|&s| s <= 0.0);
        let horizon = grid(n);
        let mut bins: Vec<u32> = Vec::new();
        for &s in &ev[first..] {
            if s > horizon {
                break;
            }
            let mut r = ((s / h).ceil() as usize).saturating_sub(1);
            while grid(r + 1) < s {
                r += 1;
            }
            while r > 0 && grid(r) >= s {
                r -= 1;
            }
            if r < n && bins.last() != Some(&(r as u32)) {
                bins.push(r as u32);
            }
        }
        y_bins.push(bins);
    }
    Ok(BinnedSample {
        d: log.d,
        n,
        h,
        clip,
        z,
        y_bins,
    })
}
