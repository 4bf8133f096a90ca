//! Least-squares line fit shared by the dimension and exponent estimators.

#[allow(unused_imports)]
use num_traits::Float;

pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the fit residuals.
    pub rms: f64,
    /// Standard error of the slope, sqrt(sum r^2 / (m-2) / Sxx); zero when
    /// the fit is exactly determined (m <= 2).
    pub slope_stderr: f64,
}

/// Ordinary least squares of y against x. Caller guarantees xs.len() ==
/// ys.len() >= 2 and at least two distinct x values.
pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let mut ss = 0.0;
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        let r = y - (slope * x + intercept);
        ss += r * r;
    }
    let rms = (ss / m).sqrt();
    let slope_stderr = if xs.len() > 2 {
        (ss / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit {
        slope,
        intercept,
        rms,
        slope_stderr,
    }
}
