use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const MIN_ROWS: usize = 5;

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    /// Standard error of the slope.
    pub half_width: f64,
    pub intercept: f64,
    pub rows: usize,
}

pub fn fit_loglog<T: Real>(x: &[T], y: &[T]) -> Result<LogLogFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter {
            name: "rows",
            reason: format!("{} abscissae for {} values", x.len(), y.len()),
        });
    }
    if x.len() < MIN_ROWS {
        return Err(Error::TooFewRows {
            needed: MIN_ROWS,
            got: x.len(),
        });
    }
    let mut lx = Vec::with_capacity(x.len());
    let mut ly = Vec::with_capacity(y.len());
    for (row, (&a, &b)) in x.iter().zip(y).enumerate() {
        for v in [a, b] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::NonPositive { row, value: v.as_f64() });
            }
        }
        lx.push(a.as_f64().ln());
        ly.push(b.as_f64().ln());
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "rows",
            reason: "abscissae must not all coincide".into(),
        });
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let half_width = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(LogLogFit {
        slope,
        half_width,
        intercept,
        rows: lx.len(),
    })
}

/// `points_per_decade` log-spaced points per decade from `lo` to `hi`
/// inclusive.
pub fn log_grid<T: Real>(lo: T, hi: T, points_per_decade: usize) -> Result<Vec<T>> {
    if !(lo > T::zero()) || !(hi >= lo) || !hi.is_finite() || points_per_decade == 0 {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: format!("need 0 < lo <= hi and a positive density, got [{}, {}]", lo.as_f64(), hi.as_f64()),
        });
    }
    let decades = (hi / lo).log10();
    let steps = ((decades * T::from_count(points_per_decade)).round().as_f64() as usize).max(1);
    Ok(geometric(lo, hi, steps + 1))
}

/// `count` geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                (a + (b - a) * T::from_count(i) / T::from_count(count - 1)).exp()
            }
        })
        .collect()
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count <= 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * T::from_count(i) / T::from_count(count - 1))
        .collect()
}

/// Indices of the rows with `x` in the last `decades` decades of the range.
pub fn last_decades<T: Real>(x: &[T], decades: T) -> Vec<usize> {
    let top = x.iter().copied().fold(T::neg_infinity(), T::max);
    let floor = top / T::lit(10.0).powf(decades) * (T::one() - T::lit(1e-12));
    (0..x.len()).filter(|&i| x[i] >= floor).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x = log_grid(1.0f64, 1e4, 20).unwrap();
        let y: Vec<f64> = x.iter().map(|t| 1.0 / t).collect();
        let fit = fit_loglog(&x, &y).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit.half_width < 1e-12);
    }

    #[test]
    fn log_corrected_slope() {
        let x = log_grid(1e3f64, 1e6, 20).unwrap();
        let y: Vec<f64> = x.iter().map(|t| t.ln() / t).collect();
        let s = fit_loglog(&x, &y).unwrap().slope;
        assert!(s > -1.0 && s < -0.9, "{s}");
    }

    #[test]
    fn constant_rows() {
        let x = log_grid(1.0f64, 100.0, 5).unwrap();
        let y = vec![3.0; x.len()];
        assert!(fit_loglog(&x, &y).unwrap().slope.abs() < 1e-15);
    }

    #[test]
    fn bad_rows() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(matches!(fit_loglog(&x, &[1.0, 0.0, 1.0, 1.0, 1.0]), Err(Error::NonPositive { row: 1, .. })));
        assert!(matches!(fit_loglog(&x[..3], &[1.0; 3]), Err(Error::TooFewRows { .. })));
    }

    #[test]
    fn grids() {
        let g = log_grid(10.0f64, 1e3, 20).unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[40], 1e3);
        assert_eq!(last_decades(&g, 1.0).len(), 21);
    }
}
