//! Least-squares fits on log-log data.

/// Minimum number of points for a slope to be asserted on.
pub const MIN_ASSERT_POINTS: usize = 4;
/// Minimum span of the abscissae, in octaves, for a slope to be asserted on.
pub const MIN_ASSERT_OCTAVES: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in the log of the ordinate.
    pub residual: f64,
    pub points: usize,
    /// `log2(max x / min x)` over the points used.
    pub octaves: f64,
}

impl SlopeFit {
    pub fn assertable(&self) -> bool {
        self.points >= MIN_ASSERT_POINTS && self.octaves >= MIN_ASSERT_OCTAVES - 1e-12
    }
}

/// OLS fit of `ln y = slope ln x + intercept`.
///
/// Points with nonpositive or non-finite coordinates carry no log-log
/// information and are dropped. `None` when fewer than two distinct
/// abscissae remain: the slope is undefined.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite() && **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    Some(SlopeFit {
        slope,
        intercept,
        residual: (ss / n as f64).sqrt(),
        points: n,
        octaves: (hi - lo) / std::f64::consts::LN_2,
    })
}

/// Fit of `y = c (1 + t)^alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerFit {
    pub c: f64,
    pub alpha: f64,
    pub residual: f64,
}

pub fn power_law_fit(ts: &[f64], ys: &[f64]) -> Option<PowerFit> {
    let shifted: Vec<f64> = ts.iter().map(|t| 1.0 + t).collect();
    loglog_slope(&shifted, ys).map(|f| PowerFit {
        c: f.intercept.exp(),
        alpha: f.slope,
        residual: f.residual,
    })
}

/// Running maximum, so that fits see the envelope rather than oscillations.
pub fn envelope(ys: &[f64]) -> Vec<f64> {
    ys.iter()
        .scan(f64::NEG_INFINITY, |m, &y| {
            *m = m.max(y);
            Some(*m)
        })
        .collect()
}
