//! Dense brute-force reference computations, written independently of the
//! library's sparse and iterative code paths.

#![allow(dead_code, clippy::needless_range_loop)]

use hawknet::HawkesParams;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        assert!(a[pivot][col].abs() > 1e-300, "singular system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

pub fn dense_theta(p: &HawkesParams) -> Vec<Vec<f64>> {
    let d = p.d();
    (0..d)
        .map(|i| (0..d).map(|j| p.theta.get(i, j)).collect())
        .collect()
}

/// `(beta I - Theta) m = mu`.
pub fn mean(p: &HawkesParams) -> Vec<f64> {
    let d = p.d();
    let theta = dense_theta(p);
    let a = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { p.beta } else { 0.0 } - theta[i][j])
                .collect()
        })
        .collect();
    gauss_solve(a, p.mu.clone())
}

/// Vectorized Lyapunov equation
/// `2 beta S_jl - sum_r theta_jr S_rl - sum_r theta_lr S_jr = lambda_j 1{j = l}`
/// solved as one `d^2 x d^2` system.
pub fn covariance(p: &HawkesParams, lambda_bar: &[f64]) -> Vec<Vec<f64>> {
    let d = p.d();
    let theta = dense_theta(p);
    let idx = |j: usize, l: usize| j * d + l;
    let mut a = vec![vec![0.0; d * d]; d * d];
    let mut b = vec![0.0; d * d];
    for j in 0..d {
        for l in 0..d {
            let row = idx(j, l);
            a[row][row] += 2.0 * p.beta;
            for r in 0..d {
                a[row][idx(r, l)] -= theta[j][r];
                a[row][idx(j, r)] -= theta[l][r];
            }
            if j == l {
                b[row] = lambda_bar[j];
            }
        }
    }
    let x = gauss_solve(a, b);
    (0..d).map(|j| x[j * d..(j + 1) * d].to_vec()).collect()
}

/// Asymptotic per-unit-time covariance of the counting process,
/// `(I - K)^{-1} diag(lambda) (I - K)^{-T}` with `K = Theta / beta`.
/// Returns the diagonal.
pub fn count_variance_rate(p: &HawkesParams, lambda_bar: &[f64]) -> Vec<f64> {
    let d = p.d();
    let theta = dense_theta(p);
    let a: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { 1.0 } else { 0.0 } - theta[i][j] / p.beta)
                .collect()
        })
        .collect();
    // Columns of (I - K)^{-1}.
    let inv_cols: Vec<Vec<f64>> = (0..d)
        .map(|c| {
            gauss_solve(
                a.clone(),
                (0..d).map(|r| if r == c { 1.0 } else { 0.0 }).collect(),
            )
        })
        .collect();
    (0..d)
        .map(|i| (0..d).map(|c| inv_cols[c][i].powi(2) * lambda_bar[c]).sum())
        .collect()
}

/// Two-pass centered covariance `(1/n) sum (x - xbar)(y - ybar)`.
pub fn covariance_two_pass(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - xm) * (b - ym))
        .sum::<f64>()
        / n
}

/// Normal equations of centered `y` on centered columns `xs`.
pub fn normal_equations(xs: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let c = xs.len();
    let gram = (0..c)
        .map(|a| {
            (0..c)
                .map(|b| covariance_two_pass(&xs[a], &xs[b]))
                .collect()
        })
        .collect();
    let cross = xs.iter().map(|x| covariance_two_pass(x, y)).collect();
    gauss_solve(gram, cross)
}

pub fn sample_mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// A random `ClassSpec` with `2 <= d <= d_max` and `gamma <= gamma_max`.
pub fn random_class<R: rand::Rng>(rng: &mut R, d_max: usize, gamma_max: f64) -> hawknet::ClassSpec {
    let d = rng.random_range(2..=d_max);
    let k = rng.random_range(1..=d.min(3));
    let beta = [0.5, 1.0, 2.0][rng.random_range(0..3)];
    let w_plus = 1.0;
    let w_minus = rng.random_range(0.5..=1.0);
    let gamma = rng.random_range(0.05..=gamma_max);
    let mu_minus = rng.random_range(0.5..1.0);
    hawknet::ClassSpec {
        d,
        k,
        alpha: gamma * beta / (k as f64 * w_plus),
        w_minus,
        w_plus,
        mu_minus,
        mu_plus: mu_minus + rng.random_range(0.0..1.0),
        beta,
    }
}
