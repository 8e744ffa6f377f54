//! Scatter statistics for (initial entanglement, final entropy) ensembles:
//! means, population variances, Pearson correlation, straight-line fits,
//! binned average curves, and the entanglement fraction of entropy growth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One ensemble member's (Q, S) pair, with an optional numeric tag
/// (a pinned excitation, an excitation number, an interacting-qubit count).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterSample {
    /// Initial global entanglement.
    pub q: f64,
    /// Final von Neumann entropy in bits.
    pub s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<f64>,
}

impl ScatterSample {
    pub fn new(q: f64, s: f64) -> Self {
        Self { q, s, tag: None }
    }

    pub fn tagged(q: f64, s: f64, tag: f64) -> Self {
        Self { q, s, tag: Some(tag) }
    }
}

/// A straight line in the (Q, S) plane with its display angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    /// S at Q = 0.
    pub intercept: f64,
    pub slope: f64,
    /// atan(slope) in degrees, S and Q on the same scale.
    pub angle_degrees: f64,
    /// Extrapolation intercept + slope · q_max.
    pub s_at_q_max: f64,
}

impl LineFit {
    fn new(intercept: f64, slope: f64, q_max: f64) -> Self {
        Self {
            intercept,
            slope,
            angle_degrees: slope.atan().to_degrees(),
            s_at_q_max: intercept + slope * q_max,
        }
    }
}

/// One emitted bin of the averaged curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinnedPoint {
    pub center: f64,
    pub mean_s: f64,
    pub count: u64,
}

/// Binning configuration for the averaged S(Q) curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinConfig {
    pub width: f64,
    pub min_count: u64,
}

impl Default for BinConfig {
    fn default() -> Self {
        Self {
            width: 0.05,
            min_count: 200,
        }
    }
}

/// Aggregated statistics of one ensemble run.
///
/// `line` is the two-point construction: it passes through the separately
/// measured separable-ensemble mean at Q = 0 and through the ensemble mean
/// point. `regression` is the ordinary least-squares fit of S on Q. Both are
/// reported in the same (Q, S) scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub count: u64,
    pub mean_q: f64,
    pub mean_s: f64,
    /// Population variances (divide by N).
    pub var_q: f64,
    pub var_s: f64,
    pub pearson: Option<f64>,
    pub line: Option<LineFit>,
    pub regression: Option<LineFit>,
    pub binned_curve: Vec<BinnedPoint>,
    /// (mean_s − separable mean) / mean_s, when the anchor is available.
    pub entanglement_fraction: Option<f64>,
}

fn mean_of(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

/// Two-pass summary of an ensemble.
///
/// `separable_mean_s` anchors the two-point line at Q = 0 (pass the mean
/// final entropy of a separately generated product-state ensemble);
/// `q_max` is the extrapolation endpoint, n/2 for an n-qubit register.
pub fn summarize(
    samples: &[ScatterSample],
    separable_mean_s: Option<f64>,
    q_max: f64,
    bins: BinConfig,
) -> Result<RunSummary> {
    if samples.len() < 2 {
        return Err(Error::Stats(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|p| !p.q.is_finite() || !p.s.is_finite()) {
        return Err(Error::Stats("non-finite sample".into()));
    }
    let n = samples.len();
    let mean_q = mean_of(samples.iter().map(|p| p.q), n);
    let mean_s = mean_of(samples.iter().map(|p| p.s), n);
    let mut var_q = 0.0;
    let mut var_s = 0.0;
    let mut cov = 0.0;
    for p in samples {
        let dq = p.q - mean_q;
        let ds = p.s - mean_s;
        var_q += dq * dq;
        var_s += ds * ds;
        cov += dq * ds;
    }
    var_q /= n as f64;
    var_s /= n as f64;
    cov /= n as f64;

    let pearson = if var_q > 0.0 && var_s > 0.0 {
        Some((cov / (var_q * var_s).sqrt()).clamp(-1.0, 1.0))
    } else {
        None
    };
    let line = separable_mean_s.and_then(|anchor| {
        if mean_q.abs() < 1e-300 {
            None
        } else {
            Some(LineFit::new(anchor, (mean_s - anchor) / mean_q, q_max))
        }
    });
    let regression = if var_q > 0.0 {
        let slope = cov / var_q;
        Some(LineFit::new(mean_s - slope * mean_q, slope, q_max))
    } else {
        None
    };
    let entanglement_fraction = match separable_mean_s {
        Some(anchor) => Some(entanglement_fraction(mean_s, anchor)?),
        None => None,
    };
    Ok(RunSummary {
        count: n as u64,
        mean_q,
        mean_s,
        var_q,
        var_s,
        pearson,
        line,
        regression,
        binned_curve: binned_means(samples, bins.width, bins.min_count),
        entanglement_fraction,
    })
}

/// Product-moment correlation of the scatter; `None` when either coordinate
/// is degenerate.
pub fn pearson(samples: &[ScatterSample]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    summarize(samples, None, 0.0, BinConfig { width: f64::MAX, min_count: u64::MAX })
        .ok()
        .and_then(|s| s.pearson)
}

/// Averages S over consecutive Q-bins of the given width, emitting only bins
/// holding at least `min_count` samples, ascending in Q.
pub fn binned_means(samples: &[ScatterSample], bin_width: f64, min_count: u64) -> Vec<BinnedPoint> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Vec::new();
    }
    use std::collections::BTreeMap;
    let mut acc: BTreeMap<i64, (f64, u64)> = BTreeMap::new();
    for p in samples {
        let bin = (p.q / bin_width).floor() as i64;
        let e = acc.entry(bin).or_insert((0.0, 0));
        e.0 += p.s;
        e.1 += 1;
    }
    acc.into_iter()
        .filter(|(_, (_, count))| *count >= min_count.max(1))
        .map(|(bin, (sum, count))| BinnedPoint {
            center: (bin as f64 + 0.5) * bin_width,
            mean_s: sum / count as f64,
            count,
        })
        .collect()
}

/// Fraction of the mean entropy attributable to initial entanglement:
/// (mean_s − mean_s at Q = 0) / mean_s.
pub fn entanglement_fraction(mean_s: f64, mean_s_q0: f64) -> Result<f64> {
    if !(mean_s > 0.0) {
        return Err(Error::Stats(format!(
            "entanglement fraction needs a positive mean entropy, got {mean_s}"
        )));
    }
    Ok((mean_s - mean_s_q0) / mean_s)
}

/// Asymptotic ceiling on the two-point line angle, in degrees.
///
/// The per-qubit mean final entropy of product ensembles is 0.72 bits, the
/// maximum entropy is n, and the maximum entanglement is n/2, so the slope
/// can never exceed (n − 0.72·n)/(n/2) = 0.56 regardless of n.
pub fn max_angle_bound(_n_qubits: usize) -> f64 {
    ((1.0 - 0.72) / 0.5_f64).atan().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples_from(pairs: &[(f64, f64)]) -> Vec<ScatterSample> {
        pairs.iter().map(|&(q, s)| ScatterSample::new(q, s)).collect()
    }

    #[test]
    fn two_point_line_matches_worked_examples() {
        // Mean point (0.40, 1.56) anchored at 1.44: slope 0.30.
        let samples = samples_from(&[(0.40, 1.56), (0.40, 1.56), (0.40, 1.56)]);
        let summary = summarize(&samples, Some(1.44), 1.0, BinConfig::default()).unwrap();
        let line = summary.line.unwrap();
        assert!((line.slope - 0.30).abs() < 1e-12);
        assert!((line.s_at_q_max - 1.74).abs() < 1e-12);
        assert!((line.angle_degrees - 16.69924423399362).abs() < 1e-9);

        // Six-qubit mean point (2.86, 5.40) anchored at 4.33, q_max = 3.
        let samples = samples_from(&[(2.86, 5.40), (2.86, 5.40)]);
        let summary = summarize(&samples, Some(4.33), 3.0, BinConfig::default()).unwrap();
        let line = summary.line.unwrap();
        assert!((line.s_at_q_max - 5.452377622377623).abs() < 1e-12);
        assert!((line.s_at_q_max - 5.45).abs() < 0.005);
    }

    #[test]
    fn degenerate_ensembles_drop_optional_fields() {
        let samples = samples_from(&[(0.5, 1.2), (0.5, 1.2), (0.5, 1.2)]);
        let summary = summarize(&samples, Some(1.0), 1.0, BinConfig::default()).unwrap();
        assert_eq!(summary.var_q, 0.0);
        assert_eq!(summary.var_s, 0.0);
        assert!(summary.pearson.is_none());
        assert!(summary.regression.is_none());
        assert!(summary.line.is_some(), "mean_q is nonzero");

        let zero_q = samples_from(&[(0.0, 1.0), (0.0, 1.5)]);
        let summary = summarize(&zero_q, Some(1.0), 1.0, BinConfig::default()).unwrap();
        assert!(summary.line.is_none(), "line undefined at mean_q = 0");
    }

    #[test]
    fn pearson_of_exact_lines() {
        let up: Vec<ScatterSample> = (0..50)
            .map(|k| ScatterSample::new(k as f64 * 0.1, 2.0 * k as f64 * 0.1 + 1.0))
            .collect();
        assert!((pearson(&up).unwrap() - 1.0).abs() < 1e-12);
        let down: Vec<ScatterSample> = (0..50)
            .map(|k| ScatterSample::new(k as f64 * 0.1, -(k as f64) * 0.1))
            .collect();
        assert!((pearson(&down).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_invariant_under_positive_affine_maps() {
        let base: Vec<ScatterSample> = (0..200)
            .map(|k| {
                let x = (k as f64 * 0.7).sin();
                let y = (k as f64 * 0.3).cos() + 0.4 * x;
                ScatterSample::new(x, y)
            })
            .collect();
        let r0 = pearson(&base).unwrap();
        let mapped: Vec<ScatterSample> = base
            .iter()
            .map(|p| ScatterSample::new(3.5 * p.q + 11.0, 0.25 * p.s - 2.0))
            .collect();
        let r1 = pearson(&mapped).unwrap();
        assert!((r0 - r1).abs() < 1e-12);
    }

    #[test]
    fn binned_means_basics() {
        let samples = samples_from(&[(0.1, 1.0), (0.12, 2.0), (0.3, 5.0)]);
        let curve = binned_means(&samples, 10.0, 1);
        assert_eq!(curve.len(), 1);
        assert!((curve[0].mean_s - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(curve[0].count, 3);

        // Samples on a perfect line: bin means stay within half a bin-width
        // of the line.
        let line: Vec<ScatterSample> = (0..1000)
            .map(|k| {
                let q = k as f64 / 1000.0;
                ScatterSample::new(q, 2.0 * q + 0.5)
            })
            .collect();
        let curve = binned_means(&line, 0.05, 10);
        for bin in &curve {
            let on_line = 2.0 * bin.center + 0.5;
            assert!((bin.mean_s - on_line).abs() <= 0.05 * 2.0 / 2.0 + 1e-9);
        }
        let centers: Vec<f64> = curve.iter().map(|b| b.center).collect();
        assert!(centers.windows(2).all(|w| w[0] < w[1]));

        assert!(binned_means(&samples, 0.0, 1).is_empty());
    }

    #[test]
    fn fraction_examples() {
        assert!((entanglement_fraction(1.56, 1.44).unwrap() - 0.07692307692307693).abs() < 1e-12);
        assert!(entanglement_fraction(1.56, 1.44).unwrap() - 0.08 < 0.01);
        assert_eq!(entanglement_fraction(2.0, 2.0).unwrap(), 0.0);
        let f = entanglement_fraction(5.40, 4.33).unwrap();
        assert!((f - 0.198).abs() < 0.001);
        assert!(entanglement_fraction(0.0, 0.0).is_err());
        assert!(entanglement_fraction(-1.0, 0.0).is_err());
    }

    #[test]
    fn angle_bound_is_a_constant() {
        for n in [1usize, 2, 6, 100] {
            let bound = max_angle_bound(n);
            assert!((bound - 29.24882633654698).abs() < 1e-9);
            assert!((bound - 29.25).abs() < 0.01);
        }
        // Same formula with a zero anchor entropy gives atan(2).
        let hypothetical = (2.0f64).atan().to_degrees();
        assert!((hypothetical - 63.43494882292201).abs() < 1e-9);
    }

    #[test]
    fn line_fields_are_consistent() {
        let samples: Vec<ScatterSample> = (0..100)
            .map(|k| {
                let q = 0.01 * k as f64;
                ScatterSample::new(q, 0.3 * q + 1.0 + 0.001 * (k as f64).sin())
            })
            .collect();
        let summary = summarize(&samples, Some(1.0), 2.5, BinConfig::default()).unwrap();
        for fit in [summary.line.unwrap(), summary.regression.unwrap()] {
            assert!((fit.s_at_q_max - (fit.intercept + fit.slope * 2.5)).abs() < 1e-12);
            assert!((fit.angle_degrees - fit.slope.atan().to_degrees()).abs() < 1e-12);
        }
    }

    #[test]
    fn summaries_are_order_independent() {
        let mut samples: Vec<ScatterSample> = (0..10_000)
            .map(|k| {
                let x = (k as f64 * 0.013).fract();
                ScatterSample::new(x, (x * 7.0).sin().abs() + 1.0)
            })
            .collect();
        let a = summarize(&samples, Some(1.0), 1.0, BinConfig::default()).unwrap();
        // Deterministic shuffle.
        for k in (1..samples.len()).rev() {
            let j = (k * 48271 + 11) % (k + 1);
            samples.swap(k, j);
        }
        let b = summarize(&samples, Some(1.0), 1.0, BinConfig::default()).unwrap();
        assert!((a.mean_q - b.mean_q).abs() < 1e-9);
        assert!((a.mean_s - b.mean_s).abs() < 1e-9);
        assert!((a.var_q - b.var_q).abs() < 1e-9);
        assert!((a.var_s - b.var_s).abs() < 1e-9);
        assert!((a.pearson.unwrap() - b.pearson.unwrap()).abs() < 1e-9);
        assert_eq!(a.binned_curve.len(), b.binned_curve.len());
    }

    #[test]
    fn rejects_tiny_or_non_finite_input() {
        assert!(summarize(&[], Some(1.0), 1.0, BinConfig::default()).is_err());
        let bad = samples_from(&[(0.0, f64::NAN), (1.0, 1.0)]);
        assert!(summarize(&bad, Some(1.0), 1.0, BinConfig::default()).is_err());
    }
}
