//! Stochastic intermittent demand.
//!
//! Each period a demand occurs with a probability taken from an
//! [`OccurrenceProfile`]; its size is drawn from a [`SizeDistribution`].
//! A [`Scenario`] pairs the two with a stationary initialization stretch and
//! an evaluation horizon.
//!
//! Randomness comes from [`RngStream`], a xoshiro256++ generator. Per-run
//! streams are derived from a base seed, the scenario id and the run index,
//! so every method in a run sees the same demand (common random numbers) and
//! runs can be evaluated in any order or on any thread.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

/// Default length of the stationary initialization stretch.
pub const DEFAULT_INIT_LEN: usize = 10_000;
/// Default evaluation horizon.
pub const DEFAULT_HORIZON: usize = 120;

/// Deterministic pseudo-random stream (xoshiro256++ seeded through
/// SplitMix64).
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Stream for one Monte-Carlo run:
    /// `seed = base_seed ^ mix64(fnv1a64(scenario_id) ^ mix64(run_index))`.
    pub fn for_run(base_seed: u64, scenario_id: &str, run_index: u64) -> Self {
        Self::from_seed(run_seed(base_seed, scenario_id, run_index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1].
    pub fn uniform_open_closed(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// The seed used by [`RngStream::for_run`].
pub fn run_seed(base_seed: u64, scenario_id: &str, run_index: u64) -> u64 {
    base_seed ^ mix64(fnv1a64(scenario_id.as_bytes()) ^ mix64(run_index))
}

/// SplitMix64 finalizer.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeDistribution {
    /// `Pr[X = k] = -ell^k / (k ln(1 - ell))`, `k >= 1`.
    Logarithmic {
        ell: f64,
    },
    /// `Pr[X = k] = (1 - g)^(k-1) g`, `k >= 1`.
    Geometric {
        g: f64,
    },
    Constant {
        c: u32,
    },
}

impl SizeDistribution {
    pub fn logarithmic(ell: f64) -> Result<Self> {
        if ell > 0.0 && ell < 1.0 {
            Ok(Self::Logarithmic { ell })
        } else {
            Err(Error::SizeDistribution(
                "logarithmic parameter must lie in (0, 1)",
            ))
        }
    }

    pub fn geometric(g: f64) -> Result<Self> {
        if g > 0.0 && g <= 1.0 {
            Ok(Self::Geometric { g })
        } else {
            Err(Error::SizeDistribution(
                "geometric parameter must lie in (0, 1]",
            ))
        }
    }

    pub fn constant(c: u32) -> Result<Self> {
        if c >= 1 {
            Ok(Self::Constant { c })
        } else {
            Err(Error::SizeDistribution("constant size must be at least 1"))
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Logarithmic { ell } => Self::logarithmic(ell).map(drop),
            Self::Geometric { g } => Self::geometric(g).map(drop),
            Self::Constant { c } => Self::constant(c).map(drop),
        }
    }

    pub fn pmf(&self, k: u64) -> Result<f64> {
        if k < 1 {
            return Err(Error::OutsideSupport(k));
        }
        let kf = k as f64;
        Ok(match *self {
            Self::Logarithmic { ell } => -libm::exp(kf * libm::log(ell)) / (kf * libm::log1p(-ell)),
            Self::Geometric { g } => libm::pow(1.0 - g, kf - 1.0) * g,
            Self::Constant { c } => {
                if k == u64::from(c) {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Logarithmic { ell } => -ell / ((1.0 - ell) * libm::log1p(-ell)),
            Self::Geometric { g } => 1.0 / g,
            Self::Constant { c } => f64::from(c),
        }
    }

    /// Draws a size by inverting the CDF.
    pub fn sample(&self, rng: &mut RngStream) -> u32 {
        match *self {
            Self::Logarithmic { ell } => {
                let u = rng.uniform();
                let mut k = 1u32;
                let mut p = -ell / libm::log1p(-ell);
                let mut cdf = p;
                // p_{k+1} = p_k * ell * k / (k + 1)
                while u >= cdf && p > 0.0 {
                    p *= ell * f64::from(k) / f64::from(k + 1);
                    cdf += p;
                    k += 1;
                }
                k
            }
            Self::Geometric { g } => {
                if g >= 1.0 {
                    return 1;
                }
                let u = rng.uniform_open_closed();
                let k = libm::ceil(libm::log(u) / libm::log1p(-g));
                if k < 1.0 {
                    1
                } else if k >= f64::from(u32::MAX) {
                    u32::MAX
                } else {
                    k as u32
                }
            }
            Self::Constant { c } => c,
        }
    }

    /// Short label used in scenario ids, e.g. `log-0.9`.
    pub fn label(&self) -> String {
        match *self {
            Self::Logarithmic { ell } => format!("log-{ell}"),
            Self::Geometric { g } => format!("geo-{g}"),
            Self::Constant { c } => format!("const-{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OccurrenceProfile {
    Stationary {
        p0: f64,
    },
    /// Falls linearly from `p0` at period 1 to 0 at period `horizon`.
    LinearDecreasing {
        p0: f64,
        horizon: u32,
    },
    /// `p0` up to and including `cutoff`, 0 afterwards.
    Sudden {
        p0: f64,
        cutoff: u32,
    },
}

impl OccurrenceProfile {
    pub fn p0(&self) -> f64 {
        match *self {
            Self::Stationary { p0 }
            | Self::LinearDecreasing { p0, .. }
            | Self::Sudden { p0, .. } => p0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p0 = self.p0();
        if !(p0 > 0.0 && p0 <= 1.0) {
            return Err(Error::Profile("p0 out of range (0, 1]"));
        }
        match *self {
            Self::LinearDecreasing { horizon, .. } if horizon < 2 => Err(Error::Profile(
                "linear decrease needs a horizon of at least 2",
            )),
            Self::Sudden { cutoff, .. } if cutoff < 1 => {
                Err(Error::Profile("cutoff must be at least 1"))
            }
            _ => Ok(()),
        }
    }

    /// Demand probability in period `t` (1-based).
    pub fn prob(&self, t: u32) -> f64 {
        match *self {
            Self::Stationary { p0 } => p0,
            Self::LinearDecreasing { p0, horizon } => {
                if t >= horizon {
                    0.0
                } else {
                    let t = t.max(1);
                    p0 * f64::from(horizon - t) / f64::from(horizon - 1)
                }
            }
            Self::Sudden { p0, cutoff } => {
                if t <= cutoff {
                    p0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Stationary { .. } => "stationary",
            Self::LinearDecreasing { .. } => "decreasing",
            Self::Sudden { .. } => "sudden",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub size: SizeDistribution,
    pub profile: OccurrenceProfile,
    /// Stationary demand probability used over the initialization stretch.
    pub init_p0: f64,
    pub init_len: usize,
    pub horizon: usize,
}

impl Scenario {
    /// Burn-in of [`DEFAULT_INIT_LEN`] periods at the profile's `p0`, then
    /// [`DEFAULT_HORIZON`] evaluation periods.
    pub fn new(size: SizeDistribution, profile: OccurrenceProfile) -> Result<Self> {
        let scenario = Self {
            size,
            profile,
            init_p0: profile.p0(),
            init_len: DEFAULT_INIT_LEN,
            horizon: DEFAULT_HORIZON,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn stationary(size: SizeDistribution, p0: f64) -> Result<Self> {
        Self::new(size, OccurrenceProfile::Stationary { p0 })
    }

    /// Linear decrease to zero over the default horizon.
    pub fn decreasing(size: SizeDistribution, p0: f64) -> Result<Self> {
        Self::new(
            size,
            OccurrenceProfile::LinearDecreasing {
                p0,
                horizon: DEFAULT_HORIZON as u32,
            },
        )
    }

    /// Demand stops after half of the default horizon.
    pub fn sudden(size: SizeDistribution, p0: f64) -> Result<Self> {
        Self::new(
            size,
            OccurrenceProfile::Sudden {
                p0,
                cutoff: DEFAULT_HORIZON as u32 / 2,
            },
        )
    }

    pub fn with_init_len(mut self, init_len: usize) -> Self {
        self.init_len = init_len;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.size.validate()?;
        self.profile.validate()?;
        if !(self.init_p0 > 0.0 && self.init_p0 <= 1.0) {
            return Err(Error::Scenario("initialization p0 out of range (0, 1]"));
        }
        if self.horizon < 1 {
            return Err(Error::Scenario("horizon must be at least 1"));
        }
        if self.horizon > u32::MAX as usize {
            return Err(Error::Scenario("horizon too large"));
        }
        Ok(())
    }

    /// Stable identifier such as `log-0.9-p0.5-stationary`. Non-default
    /// horizons, cutoffs and initialization lengths are appended.
    pub fn id(&self) -> String {
        let mut id = format!(
            "{}-p{}-{}",
            self.size.label(),
            self.profile.p0(),
            self.profile.kind()
        );
        match self.profile {
            OccurrenceProfile::LinearDecreasing { horizon, .. }
                if horizon as usize != self.horizon =>
            {
                id.push_str(&format!("-h{horizon}"));
            }
            OccurrenceProfile::Sudden { cutoff, .. } if cutoff as usize * 2 != self.horizon => {
                id.push_str(&format!("-c{cutoff}"));
            }
            _ => {}
        }
        if self.horizon != DEFAULT_HORIZON {
            id.push_str(&format!("-n{}", self.horizon));
        }
        if self.init_len != DEFAULT_INIT_LEN {
            id.push_str(&format!("-i{}", self.init_len));
        }
        if self.init_p0 != self.profile.p0() {
            id.push_str(&format!("-ip{}", self.init_p0));
        }
        id
    }

    /// Draws one initialization stretch followed by one evaluation stretch.
    pub fn generate(&self, rng: &mut RngStream) -> DemandSeries {
        let draw = |rng: &mut RngStream, p: f64| {
            if rng.uniform() < p {
                self.size.sample(rng)
            } else {
                0
            }
        };
        let init = (0..self.init_len)
            .map(|_| draw(rng, self.init_p0))
            .collect();
        let eval = (1..=self.horizon as u32)
            .map(|t| draw(rng, self.profile.prob(t)))
            .collect();
        DemandSeries { init, eval }
    }
}

/// Integer demands for one run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DemandSeries {
    pub init: Vec<u32>,
    pub eval: Vec<u32>,
}

impl DemandSeries {
    /// All periods, initialization first.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.init.iter().chain(self.eval.iter()).copied()
    }

    pub fn fingerprint(&self) -> u64 {
        self.iter().fold(fnv1a64(&[]), |h, d| {
            d.to_le_bytes().iter().fold(h, |h, &b| {
                (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_hand_values() {
        let log = SizeDistribution::logarithmic(0.9).unwrap();
        let expected = 0.9 / -libm::log(0.1);
        assert!((log.pmf(1).unwrap() - expected).abs() < 1e-15);
        assert!((log.pmf(1).unwrap() - 0.390865).abs() < 1e-6);

        let geo = SizeDistribution::geometric(0.8).unwrap();
        assert!((geo.pmf(1).unwrap() - 0.8).abs() < 1e-15);
        let geo = SizeDistribution::geometric(0.2).unwrap();
        assert!((geo.pmf(3).unwrap() - 0.128).abs() < 1e-15);

        assert_eq!(log.pmf(0), Err(Error::OutsideSupport(0)));
    }

    #[test]
    fn pmf_sums_to_one() {
        for dist in [
            SizeDistribution::logarithmic(0.001).unwrap(),
            SizeDistribution::logarithmic(0.9).unwrap(),
            SizeDistribution::geometric(0.2).unwrap(),
            SizeDistribution::geometric(0.8).unwrap(),
        ] {
            let total: f64 = (1..2000).map(|k| dist.pmf(k).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-9, "{dist:?}: {total}");
        }
    }

    #[test]
    fn distribution_parameters_validated() {
        assert!(SizeDistribution::logarithmic(0.0).is_err());
        assert!(SizeDistribution::logarithmic(1.0).is_err());
        assert!(SizeDistribution::geometric(0.0).is_err());
        assert!(SizeDistribution::geometric(1.0).is_ok());
        assert!(SizeDistribution::constant(0).is_err());
    }

    #[test]
    fn constant_sizes() {
        let mut rng = RngStream::from_seed(3);
        let one = SizeDistribution::constant(1).unwrap();
        assert!((0..100).all(|_| one.sample(&mut rng) == 1));
        let sure = SizeDistribution::geometric(1.0).unwrap();
        assert!((0..100).all(|_| sure.sample(&mut rng) == 1));
    }

    #[test]
    fn profile_values() {
        let dec = OccurrenceProfile::LinearDecreasing {
            p0: 0.5,
            horizon: 120,
        };
        assert_eq!(dec.prob(1), 0.5);
        assert_eq!(dec.prob(120), 0.0);
        assert_eq!(dec.prob(121), 0.0);
        assert!((dec.prob(60) - 0.5 * 60.0 / 119.0).abs() < 1e-15);

        let sudden = OccurrenceProfile::Sudden {
            p0: 0.2,
            cutoff: 60,
        };
        assert_eq!(sudden.prob(60), 0.2);
        assert_eq!(sudden.prob(61), 0.0);
        assert_eq!(OccurrenceProfile::Stationary { p0: 0.3 }.prob(999), 0.3);
    }

    #[test]
    fn profile_validation() {
        assert!(OccurrenceProfile::Stationary { p0: 1.5 }
            .validate()
            .is_err());
        assert!(OccurrenceProfile::Stationary { p0: 0.0 }
            .validate()
            .is_err());
        assert!(OccurrenceProfile::Stationary { p0: 1.0 }.validate().is_ok());
        assert!(OccurrenceProfile::LinearDecreasing {
            p0: 0.5,
            horizon: 1
        }
        .validate()
        .is_err());
    }

    #[test]
    fn certain_unit_demand() {
        let s = Scenario::stationary(SizeDistribution::constant(1).unwrap(), 1.0)
            .unwrap()
            .with_init_len(0)
            .with_horizon(3);
        let series = s.generate(&mut RngStream::from_seed(0));
        assert!(series.init.is_empty());
        assert_eq!(series.eval, [1, 1, 1]);
    }

    #[test]
    fn sudden_tail_is_zero() {
        let s = Scenario::sudden(SizeDistribution::logarithmic(0.9).unwrap(), 0.5).unwrap();
        for run in 0..20 {
            let series = s.generate(&mut RngStream::for_run(1, &s.id(), run));
            assert_eq!(series.init.len(), 10_000);
            assert_eq!(series.eval.len(), 120);
            assert!(series.eval[60..].iter().all(|&d| d == 0));
            assert!(series.eval[..60].iter().any(|&d| d > 0));
        }
    }

    #[test]
    fn scenario_ids() {
        let log = SizeDistribution::logarithmic(0.9).unwrap();
        let geo = SizeDistribution::geometric(0.8).unwrap();
        assert_eq!(
            Scenario::stationary(log, 0.5).unwrap().id(),
            "log-0.9-p0.5-stationary"
        );
        assert_eq!(
            Scenario::decreasing(log, 0.5).unwrap().id(),
            "log-0.9-p0.5-decreasing"
        );
        assert_eq!(
            Scenario::sudden(SizeDistribution::logarithmic(0.001).unwrap(), 0.5)
                .unwrap()
                .id(),
            "log-0.001-p0.5-sudden"
        );
        assert_eq!(
            Scenario::stationary(geo, 0.2).unwrap().id(),
            "geo-0.8-p0.2-stationary"
        );
        assert_eq!(
            Scenario::stationary(geo, 0.2).unwrap().with_horizon(3).id(),
            "geo-0.8-p0.2-stationary-n3"
        );
    }

    #[test]
    fn run_streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = {
            let mut r = RngStream::for_run(7, "x", 3);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::for_run(7, "x", 3);
            (0..4).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(run_seed(7, "x", 3), run_seed(7, "x", 4));
        assert_ne!(run_seed(7, "x", 3), run_seed(7, "y", 3));
        assert_ne!(run_seed(7, "x", 3), run_seed(8, "x", 3));
    }

    #[test]
    fn uniform_ranges() {
        let mut r = RngStream::from_seed(11);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            let v = r.uniform_open_closed();
            assert!(v > 0.0 && v <= 1.0);
        }
    }
}
