//! Small statistics helpers shared by the estimators and the harness.

/// Least-squares slope, its standard error and the RMS residual.
/// Returns `(slope, intercept, slope standard error, rms residual)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let se = if xs.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, se, (rss / n).sqrt())
}

/// Mean and jackknife standard error of the root mean square of `errors`.
pub fn rmse_with_jackknife(errors: &[f64]) -> (f64, f64) {
    let n = errors.len();
    let total: f64 = errors.iter().map(|e| e * e).sum();
    let rmse = (total / n as f64).sqrt();
    if n < 2 {
        return (rmse, 0.0);
    }
    let loo: Vec<f64> = errors
        .iter()
        .map(|e| ((total - e * e) / (n - 1) as f64).max(0.0).sqrt())
        .collect();
    let mean = loo.iter().sum::<f64>() / n as f64;
    let var = loo.iter().map(|x| (x - mean).powi(2)).sum::<f64>() * (n - 1) as f64 / n as f64;
    (rmse, var.sqrt())
}
