//! Forecast accuracy measures as mergeable accumulators.
//!
//! Per-period records are pooled over many runs before finalizing: sums of
//! scaled errors, absolute errors, demands and squared errors are additive,
//! so accumulators built on different workers can be merged in any order.
//!
//! "MASE" here is the mean of the *signed* scaled error `q_t = (f - y) / d`,
//! which measures bias: over-forecasting is positive. The mean of `|q_t|` is
//! reported alongside as `mase_abs`.

use crate::error::{Error, Result};

/// Lower clamp for absolute errors entering the log-ratio of RGRMSE.
pub const RATIO_EPSILON: f64 = 1e-12;

/// One evaluated period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub period: u32,
    /// Realized demand.
    pub y: f64,
    /// Forecast made before observing `y`.
    pub f: f64,
    /// Random-walk forecast: the previous period's demand.
    pub f_naive: f64,
}

impl ErrorRecord {
    pub fn error(&self) -> f64 {
        self.y - self.f
    }

    pub fn naive_error(&self) -> f64 {
        self.y - self.f_naive
    }

    pub fn is_issue_point(&self) -> bool {
        self.y != 0.0
    }
}

/// Mean absolute first difference of an initialization series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaseScale {
    denom: f64,
}

impl MaseScale {
    pub fn from_series<I>(series: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<f64>,
    {
        let mut iter = series.into_iter().map(Into::into);
        let Some(mut prev) = iter.next() else {
            return Err(Error::SeriesTooShort(0));
        };
        let mut sum = 0.0;
        let mut diffs = 0usize;
        for y in iter {
            sum += libm::fabs(y - prev);
            diffs += 1;
            prev = y;
        }
        if diffs == 0 {
            return Err(Error::SeriesTooShort(1));
        }
        Self::new(sum / diffs as f64)
    }

    pub fn new(denom: f64) -> Result<Self> {
        if denom > 0.0 && denom.is_finite() {
            Ok(Self { denom })
        } else {
            Err(Error::DegenerateScale)
        }
    }

    pub fn denom(&self) -> f64 {
        self.denom
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricAccumulator {
    pub sum_q: f64,
    pub sum_abs_q: f64,
    pub sum_abs_e: f64,
    pub sum_y: f64,
    pub sum_e2: f64,
    pub sum_e2_naive: f64,
    pub count: u64,
    /// Skip periods without demand.
    pub issue_only: bool,
}

/// Finalized accuracy measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    /// Mean signed scaled error.
    pub mase: f64,
    /// Mean absolute scaled error.
    pub mase_abs: f64,
    /// Summed absolute error over summed demand.
    pub mmr: f64,
    /// RMSE relative to the random-walk RMSE.
    pub u2: f64,
}

impl MetricAccumulator {
    pub fn new(issue_only: bool) -> Self {
        Self {
            issue_only,
            ..Self::default()
        }
    }

    pub fn accumulate(&mut self, record: &ErrorRecord, scale: &MaseScale) {
        if self.issue_only && !record.is_issue_point() {
            return;
        }
        let e = record.error();
        let e_naive = record.naive_error();
        let q = (record.f - record.y) / scale.denom;
        self.sum_q += q;
        self.sum_abs_q += libm::fabs(q);
        self.sum_abs_e += libm::fabs(e);
        self.sum_y += record.y;
        self.sum_e2 += e * e;
        self.sum_e2_naive += e_naive * e_naive;
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        self.sum_q += other.sum_q;
        self.sum_abs_q += other.sum_abs_q;
        self.sum_abs_e += other.sum_abs_e;
        self.sum_y += other.sum_y;
        self.sum_e2 += other.sum_e2;
        self.sum_e2_naive += other.sum_e2_naive;
        self.count += other.count;
    }

    pub fn finalize(&self) -> Result<MetricSummary> {
        if self.count == 0 {
            return Err(Error::EmptyAccumulator);
        }
        if self.sum_y <= 0.0 {
            return Err(Error::ZeroBaseline("demand sum"));
        }
        if self.sum_e2_naive <= 0.0 {
            return Err(Error::ZeroBaseline("random-walk squared error"));
        }
        let n = self.count as f64;
        Ok(MetricSummary {
            mase: self.sum_q / n,
            mase_abs: self.sum_abs_q / n,
            mmr: self.sum_abs_e / self.sum_y,
            u2: libm::sqrt(self.sum_e2 / n) / libm::sqrt(self.sum_e2_naive / n),
        })
    }
}

/// Head-to-head comparison of two error streams, `a` relative to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PairAccumulator {
    pub sum_log_ratio: f64,
    pub ratio_count: u64,
    pub better_count: u64,
    pub total_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSummary {
    /// Geometric mean of `|e_a| / |e_b|`.
    pub rgrmse: f64,
    /// Percentage of periods with `|e_a| < |e_b|`.
    pub pb: f64,
}

impl PairAccumulator {
    pub fn accumulate(&mut self, e_a: f64, e_b: f64) {
        let (a, b) = (libm::fabs(e_a), libm::fabs(e_b));
        self.total_count += 1;
        if a < b {
            self.better_count += 1;
        }
        if a < RATIO_EPSILON && b < RATIO_EPSILON {
            return;
        }
        self.sum_log_ratio += libm::log(a.max(RATIO_EPSILON) / b.max(RATIO_EPSILON));
        self.ratio_count += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        self.sum_log_ratio += other.sum_log_ratio;
        self.ratio_count += other.ratio_count;
        self.better_count += other.better_count;
        self.total_count += other.total_count;
    }

    pub fn finalize(&self) -> Result<PairSummary> {
        if self.total_count == 0 || self.ratio_count == 0 {
            return Err(Error::EmptyAccumulator);
        }
        Ok(PairSummary {
            rgrmse: libm::exp(self.sum_log_ratio / self.ratio_count as f64),
            pb: 100.0 * self.better_count as f64 / self.total_count as f64,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(y: f64, f: f64, f_naive: f64) -> ErrorRecord {
        ErrorRecord {
            period: 1,
            y,
            f,
            f_naive,
        }
    }

    #[test]
    fn scale_hand_values() {
        let s = MaseScale::from_series([0u32, 2, 0, 0, 1]).unwrap();
        assert!((s.denom() - 1.25).abs() < 1e-15);
        assert_eq!(MaseScale::from_series([0.0, 5.0]).unwrap().denom(), 5.0);
        assert_eq!(
            MaseScale::from_series([1.0, 1.0, 1.0]),
            Err(Error::DegenerateScale)
        );
        assert_eq!(MaseScale::from_series([3.0]), Err(Error::SeriesTooShort(1)));
        assert_eq!(
            MaseScale::from_series(core::iter::empty::<f64>()),
            Err(Error::SeriesTooShort(0))
        );
    }

    #[test]
    fn accumulate_hand_values() {
        let scale = MaseScale::new(1.25).unwrap();
        let mut acc = MetricAccumulator::new(false);
        acc.accumulate(&rec(3.0, 2.0, 0.0), &scale);
        assert!((acc.sum_q + 0.8).abs() < 1e-15);

        let mut zero = MetricAccumulator::new(false);
        zero.accumulate(&rec(0.0, 0.0, 1.0), &scale);
        assert_eq!((zero.sum_q, zero.sum_abs_e, zero.sum_e2), (0.0, 0.0, 0.0));
        assert_eq!(zero.count, 1);

        let mut issue = MetricAccumulator::new(true);
        issue.accumulate(&rec(0.0, 0.7, 1.0), &scale);
        assert_eq!(issue, MetricAccumulator::new(true));
    }

    #[test]
    fn finalize_hand_values() {
        let scale = MaseScale::new(1.25).unwrap();
        let mut acc = MetricAccumulator::new(false);
        acc.accumulate(&rec(3.0, 2.0, 0.0), &scale);
        acc.accumulate(&rec(0.0, 1.0, 3.0), &scale);
        let m = acc.finalize().unwrap();
        assert!(m.mase.abs() < 1e-15);
        assert!((m.mase_abs - 0.8).abs() < 1e-15);
        assert!((m.mmr - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.u2 - (2.0f64 / 18.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn random_walk_u2_is_exactly_one() {
        let series = [0.0, 3.0, 0.0, 0.0, 7.0, 1.0, 0.0, 2.0];
        let scale = MaseScale::from_series(series).unwrap();
        let mut acc = MetricAccumulator::new(false);
        for (t, w) in series.windows(2).enumerate() {
            acc.accumulate(
                &ErrorRecord {
                    period: t as u32,
                    y: w[1],
                    f: w[0],
                    f_naive: w[0],
                },
                &scale,
            );
        }
        assert_eq!(acc.finalize().unwrap().u2, 1.0);
    }

    #[test]
    fn finalize_errors() {
        assert_eq!(
            MetricAccumulator::new(false).finalize(),
            Err(Error::EmptyAccumulator)
        );
        let scale = MaseScale::new(1.0).unwrap();
        let mut acc = MetricAccumulator::new(false);
        acc.accumulate(&rec(0.0, 0.5, 0.0), &scale);
        assert!(matches!(acc.finalize(), Err(Error::ZeroBaseline(_))));
        let mut acc = MetricAccumulator::new(false);
        acc.accumulate(&rec(2.0, 0.5, 2.0), &scale);
        assert!(matches!(acc.finalize(), Err(Error::ZeroBaseline(_))));
    }

    #[test]
    fn pair_hand_values() {
        let mut p = PairAccumulator::default();
        p.accumulate(1.0, 2.0);
        p.accumulate(2.0, -2.0);
        let s = p.finalize().unwrap();
        assert!((s.rgrmse - libm::sqrt(0.5)).abs() < 1e-15);
        assert_eq!(s.pb, 50.0);

        let mut p = PairAccumulator::default();
        for e in [0.3, -1.0, 2.5] {
            p.accumulate(e, e);
        }
        let s = p.finalize().unwrap();
        assert_eq!((s.rgrmse, s.pb), (1.0, 0.0));

        let mut p = PairAccumulator::default();
        p.accumulate(0.5, 1.0);
        let s = p.finalize().unwrap();
        assert!((s.rgrmse - 0.5).abs() < 1e-15);
        assert_eq!(s.pb, 100.0);
    }

    #[test]
    fn pair_zero_errors() {
        let mut p = PairAccumulator::default();
        p.accumulate(0.0, 0.0);
        assert_eq!((p.ratio_count, p.total_count), (0, 1));
        assert_eq!(p.finalize(), Err(Error::EmptyAccumulator));
        p.accumulate(0.0, 1.0);
        let s = p.finalize().unwrap();
        assert!((s.rgrmse - RATIO_EPSILON).abs() < 1e-24);
        assert_eq!(s.pb, 50.0);
    }
}
