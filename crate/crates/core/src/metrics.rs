//! Accuracy metrics, error-norm series and kernel density curves.
//!
//! RMSE, MAE, R² and VAF pool every velocity component of every epoch
//! into one flat sample. Per-axis values are reported alongside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BodyVelocity;
use crate::scalar::Real;

fn check_pair<T>(y: &[T], y_hat: &[T]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if y.len() != y_hat.len() {
        return Err(Error::Contract(format!("{} targets vs {} estimates", y.len(), y_hat.len())));
    }
    Ok(())
}

fn residuals<'a, T: Real>(y: &'a [T], y_hat: &'a [T]) -> impl Iterator<Item = f64> + 'a {
    y.iter().zip(y_hat).map(|(a, b)| b.as_f64() - a.as_f64())
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// True when the spread of `xs` is at rounding level.
fn is_constant(xs: &[f64], spread: f64) -> bool {
    let scale: f64 = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    spread <= (xs.len() as f64 * f64::EPSILON).powi(2) * scale
}

/// Population variance.
fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs.iter().copied());
    mean(xs.iter().map(|x| (x - m) * (x - m)))
}

pub fn rmse<T: Real>(y: &[T], y_hat: &[T]) -> Result<f64> {
    check_pair(y, y_hat)?;
    Ok(mean(residuals(y, y_hat).map(|e| e * e)).sqrt())
}

pub fn mae<T: Real>(y: &[T], y_hat: &[T]) -> Result<f64> {
    check_pair(y, y_hat)?;
    Ok(mean(residuals(y, y_hat).map(f64::abs)))
}

/// `1 − SS_res / SS_tot`; undefined for constant `y`.
pub fn r_squared<T: Real>(y: &[T], y_hat: &[T]) -> Result<f64> {
    check_pair(y, y_hat)?;
    let y_bar = mean(y.iter().map(|v| v.as_f64()));
    let ys: Vec<f64> = y.iter().map(|v| v.as_f64()).collect();
    let ss_tot: f64 = ys.iter().map(|v| (v - y_bar).powi(2)).sum();
    if is_constant(&ys, ss_tot / ys.len() as f64) {
        return Err(Error::UndefinedMetric("R² of a constant target".into()));
    }
    let ss_res: f64 = residuals(y, y_hat).map(|e| e * e).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Variance accounted for, in percent: `100 · (1 − var(y − ŷ) / var(y))`.
pub fn vaf<T: Real>(y: &[T], y_hat: &[T]) -> Result<f64> {
    check_pair(y, y_hat)?;
    let ys: Vec<f64> = y.iter().map(|v| v.as_f64()).collect();
    let var_y = variance(&ys);
    if is_constant(&ys, var_y) {
        return Err(Error::UndefinedMetric("VAF of a constant target".into()));
    }
    let err: Vec<f64> = residuals(y, y_hat).collect();
    Ok(100.0 * (1.0 - variance(&err) / var_y))
}

pub fn flatten<T: Real>(v: &[BodyVelocity<T>]) -> Vec<T> {
    v.iter().flat_map(|b| b.0).collect()
}

/// `(t, ‖v̂ − v‖)` per epoch.
pub fn error_norm_series<T: Real>(
    times: &[f64],
    truth: &[BodyVelocity<T>],
    estimate: &[BodyVelocity<T>],
) -> Result<Vec<(f64, f64)>> {
    if times.len() != truth.len() || truth.len() != estimate.len() {
        return Err(Error::Contract(format!(
            "misaligned series: {} times, {} truths, {} estimates",
            times.len(),
            truth.len(),
            estimate.len()
        )));
    }
    Ok(times
        .iter()
        .zip(truth.iter().zip(estimate))
        .map(|(&t, (v, e))| {
            let sq: f64 = (0..3).map(|a| (e.0[a].as_f64() - v.0[a].as_f64()).powi(2)).sum();
            (t, sq.sqrt())
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// `0.9 · min(σ, IQR / 1.34) · n^(−1/5)`.
    Silverman,
    Fixed(f64),
}

/// Quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::UndefinedMetric("bandwidth needs at least 2 samples".into()));
    }
    let n = samples.len() as f64;
    let m = mean(samples.iter().copied());
    let sd = (samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * n.powf(-0.2);
    if !(h > 0.0) {
        return Err(Error::UndefinedMetric("zero-spread samples need a fixed bandwidth".into()));
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeCurve {
    pub bandwidth: f64,
    /// `(x, density)` on a uniform grid.
    pub points: Vec<(f64, f64)>,
}

/// Gaussian-kernel density at each grid point.
pub fn kde_density(samples: &[f64], grid: &[f64], bandwidth: Bandwidth) -> Result<KdeCurve> {
    if samples.len() < 2 {
        return Err(Error::UndefinedMetric(format!("KDE needs at least 2 samples, got {}", samples.len())));
    }
    let h = match bandwidth {
        Bandwidth::Silverman => silverman_bandwidth(samples)?,
        Bandwidth::Fixed(h) if h > 0.0 => h,
        Bandwidth::Fixed(h) => return Err(Error::Contract(format!("bandwidth must be > 0, got {h}"))),
    };
    let norm = 1.0 / (samples.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    let points = grid
        .iter()
        .map(|&x| {
            let s: f64 = samples.iter().map(|&xi| (-0.5 * ((x - xi) / h).powi(2)).exp()).sum();
            (x, s * norm)
        })
        .collect();
    Ok(KdeCurve { bandwidth: h, points })
}

/// KDE on `points` grid nodes spanning five bandwidths beyond the sample
/// range on either side.
pub fn kde_curve(samples: &[f64], bandwidth: Bandwidth, points: usize) -> Result<KdeCurve> {
    let h = match bandwidth {
        Bandwidth::Silverman => silverman_bandwidth(samples)?,
        Bandwidth::Fixed(h) => h,
    };
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min) - 5.0 * h;
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 5.0 * h;
    let n = points.max(2);
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    kde_density(samples, &grid, Bandwidth::Fixed(h))
}

pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

/// Relative reduction in percent, positive when `model` beats `baseline`.
pub fn improvement_pct(baseline: f64, model: f64) -> f64 {
    100.0 * (baseline - model) / baseline
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisMetrics {
    pub rmse: f64,
    pub mae: f64,
    /// `None` when the axis target is constant.
    pub r2: Option<f64>,
    pub vaf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: String,
    pub samples: usize,
    pub rmse: f64,
    pub mae: f64,
    pub r2: f64,
    pub vaf: f64,
    /// x, y, z.
    pub per_axis: Vec<AxisMetrics>,
    pub error_norm_series: Vec<(f64, f64)>,
    /// Density of the error norm; `None` when every norm is identical.
    pub kde_curve: Option<KdeCurve>,
}

pub const DEFAULT_KDE_POINTS: usize = 512;

impl EvaluationReport {
    pub fn compute<T: Real>(
        method: &str,
        times: &[f64],
        truth: &[BodyVelocity<T>],
        estimate: &[BodyVelocity<T>],
        bandwidth: Bandwidth,
        kde_points: usize,
    ) -> Result<Self> {
        let series = error_norm_series(times, truth, estimate)?;
        let (y, y_hat) = (flatten(truth), flatten(estimate));
        let per_axis = (0..3)
            .map(|a| {
                let ya: Vec<T> = truth.iter().map(|v| v.0[a]).collect();
                let ea: Vec<T> = estimate.iter().map(|v| v.0[a]).collect();
                Ok(AxisMetrics {
                    rmse: rmse(&ya, &ea)?,
                    mae: mae(&ya, &ea)?,
                    r2: r_squared(&ya, &ea).ok(),
                    vaf: vaf(&ya, &ea).ok(),
                })
            })
            .collect::<Result<_>>()?;
        let norms: Vec<f64> = series.iter().map(|p| p.1).collect();
        Ok(Self {
            method: method.to_string(),
            samples: truth.len(),
            rmse: rmse(&y, &y_hat)?,
            mae: mae(&y, &y_hat)?,
            r2: r_squared(&y, &y_hat)?,
            vaf: vaf(&y, &y_hat)?,
            per_axis,
            error_norm_series: series,
            kde_curve: kde_curve(&norms, bandwidth, kde_points).ok(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Y: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];
    const YH: [f64; 5] = [1.5, 1.5, 3.5, 3.0, 6.0];

    #[test]
    fn hand_values() {
        // residuals 0.5, -0.5, 0.5, -1, 1; squares sum 2.75
        assert!((rmse(&Y, &YH).unwrap() - (2.75f64 / 5.0).sqrt()).abs() < 1e-12);
        assert!((mae(&Y, &YH).unwrap() - 0.7).abs() < 1e-12);
        // SS_tot 10
        assert!((r_squared(&Y, &YH).unwrap() - 0.725).abs() < 1e-12);
        // residual mean 0.1, population variance 0.55 - 0.01 = 0.54; var(y) = 2
        assert!((vaf(&Y, &YH).unwrap() - 73.0).abs() < 1e-12);
    }

    #[test]
    fn two_element_examples() {
        assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 3.5355339).abs() < 1e-6);
        assert_eq!(mae(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 3.5);
    }

    #[test]
    fn perfect_and_mean_predictors() {
        assert_eq!(rmse(&Y, &Y).unwrap(), 0.0);
        assert_eq!(r_squared(&Y, &Y).unwrap(), 1.0);
        assert_eq!(vaf(&Y, &Y).unwrap(), 100.0);
        assert!(r_squared(&Y, &[3.0; 5]).unwrap().abs() < 1e-15);
        assert!(r_squared(&Y, &[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap() < 0.0);
    }

    #[test]
    fn offset_invariance_differs() {
        let shifted: Vec<f64> = YH.iter().map(|v| v + 0.7).collect();
        assert!((vaf(&Y, &shifted).unwrap() - vaf(&Y, &YH).unwrap()).abs() < 1e-12);
        assert!((r_squared(&Y, &shifted).unwrap() - r_squared(&Y, &YH).unwrap()).abs() > 1e-3);
    }

    #[test]
    fn constant_target_undefined() {
        assert!(matches!(r_squared(&[2.0; 4], &[1.0; 4]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(vaf(&[2.0; 4], &[1.0; 4]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(rmse::<f64>(&[], &[]), Err(Error::EmptyDataset)));
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn error_norms() {
        let v = [BodyVelocity([0.0, 0.0, 0.0]), BodyVelocity([1.0, 1.0, 1.0])];
        let e = [BodyVelocity([3.0, 4.0, 0.0]), BodyVelocity([1.0, 1.0, 1.0])];
        assert_eq!(error_norm_series(&[0.0, 1.0], &v, &e).unwrap(), vec![(0.0, 5.0), (1.0, 0.0)]);
        assert!(error_norm_series(&[0.0], &v, &e).is_err());
    }

    #[test]
    fn single_bump() {
        let h = 0.2;
        let c = kde_curve(&[1.5; 10], Bandwidth::Fixed(h), 201).unwrap();
        for &(x, d) in &c.points {
            let g = (-0.5 * ((x - 1.5) / h).powi(2)).exp() / (h * (2.0 * std::f64::consts::PI).sqrt());
            assert!((d - g).abs() < 1e-12);
        }
        assert!(kde_curve(&[1.5; 10], Bandwidth::Silverman, 10).is_err());
        assert!(kde_density(&[1.0], &[0.0], Bandwidth::Fixed(1.0)).is_err());
    }

    #[test]
    fn silverman_value() {
        // sd = sqrt(2.5), IQR = 2 -> 2/1.34 < sd
        let h = silverman_bandwidth(&Y).unwrap();
        assert!((h - 0.9 * (2.0 / 1.34) * 5f64.powf(-0.2)).abs() < 1e-12);
    }

    #[test]
    fn report_fields() {
        let truth: Vec<_> = (0..50).map(|i| BodyVelocity([1.0 + 0.01 * i as f64, 0.1, -0.05 * (i % 3) as f64])).collect();
        let est: Vec<_> = truth
            .iter()
            .enumerate()
            .map(|(i, v)| BodyVelocity([v.0[0] + 0.02 * (i % 4) as f64, v.0[1] - 0.01, v.0[2]]))
            .collect();
        let times: Vec<f64> = (0..50).map(f64::from).collect();
        let r = EvaluationReport::compute("ls", &times, &truth, &est, Bandwidth::Silverman, 64).unwrap();
        assert_eq!(r.per_axis.len(), 3);
        assert_eq!(r.per_axis[1].r2, None);
        assert!(r.r2 <= 1.0 && r.vaf <= 100.0);
        assert_eq!(r.kde_curve.unwrap().points.len(), 64);
        let exact = EvaluationReport::compute("ls", &times, &truth, &truth, Bandwidth::Silverman, 64).unwrap();
        assert_eq!(exact.rmse, 0.0);
        assert!(exact.kde_curve.is_none());
    }

    proptest! {
        #[test]
        fn mae_le_rmse(pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..60)) {
            let (y, e): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            prop_assert!(mae(&y, &e).unwrap() <= rmse(&y, &e).unwrap() + 1e-12);
        }

        #[test]
        fn translation_covariant(pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..60)) {
            let (y, e): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let diff: Vec<f64> = y.iter().zip(&e).map(|(a, b)| b - a).collect();
            let zero = vec![0.0; y.len()];
            prop_assert!((rmse(&y, &e).unwrap() - rmse(&zero, &diff).unwrap()).abs() < 1e-9);
            prop_assert!((mae(&y, &e).unwrap() - mae(&zero, &diff).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn kde_integrates_to_one(xs in prop::collection::vec(-3.0f64..3.0, 2..80)) {
            prop_assume!(silverman_bandwidth(&xs).is_ok());
            let c = kde_curve(&xs, Bandwidth::Silverman, 2001).unwrap();
            let area = trapezoid(&c.points);
            prop_assert!((0.99..=1.01).contains(&area), "area {}", area);
        }

        #[test]
        fn kde_symmetric(a in 0.01f64..5.0, h in 0.05f64..2.0) {
            let c = kde_curve(&[-a, a], Bandwidth::Fixed(h), 301).unwrap();
            let n = c.points.len();
            for i in 0..n {
                prop_assert!((c.points[i].0 + c.points[n - 1 - i].0).abs() < 1e-12);
                prop_assert!((c.points[i].1 - c.points[n - 1 - i].1).abs() < 1e-12);
            }
        }
    }
}
