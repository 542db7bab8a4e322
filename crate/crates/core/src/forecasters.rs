//! One-step-ahead forecaster state machines.
//!
//! Every method follows the same per-period protocol: read the forecast for
//! the next period with [`Forecaster::forecast`], observe the realized
//! demand, then fold it in with [`Forecaster::update`]. [`Forecaster::step`]
//! does both and returns the forecast that was in force for the period.
//!
//! All Croston-style states start from `y_hat = tau_hat = 1`; TSB starts from
//! `p_hat = 1 / tau_hat = 1`.

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Smoothing factors: `alpha` for demand sizes, `beta` for intervals or the
/// demand probability. Both lie strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams {
    alpha: f64,
    beta: f64,
}

impl SmoothingParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_factor("alpha", alpha)?;
        check_factor("beta", beta)?;
        Ok(Self { alpha, beta })
    }

    /// Single-factor methods smooth sizes and intervals with the same value.
    pub fn single(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

fn check_factor(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::SmoothingFactor { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Single exponential smoothing.
    Ses,
    /// Croston's method.
    Cr,
    /// Croston with the `(1 - beta/2)` correction factor.
    Sba,
    /// Croston with the corrected factor and shifted interval.
    Sy,
    /// Smoothed demand probability times smoothed size.
    Tsb,
    /// Hyperbolic-exponential smoothing.
    Hes,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Ses,
        Method::Cr,
        Method::Sba,
        Method::Sy,
        Method::Tsb,
        Method::Hes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ses => "SES",
            Method::Cr => "CR",
            Method::Sba => "SBA",
            Method::Sy => "SY",
            Method::Tsb => "TSB",
            Method::Hes => "HES",
        }
    }

    /// Methods that use a single smoothing factor for sizes and intervals.
    pub fn is_single_factor(self) -> bool {
        matches!(self, Method::Ses | Method::Cr | Method::Sba | Method::Sy)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod;

impl fmt::Display for UnknownMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown method (expected SES, CR, SBA, SY, TSB or HES)")
    }
}

impl core::error::Error for UnknownMethod {}

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or(UnknownMethod)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SesState {
    pub level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrostonVariant {
    Cr,
    Sba,
    Sy,
}

/// Smoothed size and interval, updated only at issue points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrostonState {
    pub y_hat: f64,
    pub tau_hat: f64,
    /// Zero-demand periods observed since the most recent demand.
    pub zero_run: u64,
    pub variant: CrostonVariant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsbState {
    pub y_hat: f64,
    pub p_hat: f64,
}

/// Same bookkeeping as [`CrostonState`]. The pseudocounts `c1 = 2/beta` and
/// `c0 = 2 (tau_hat - 1) / beta` are implied by `tau_hat` and never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HesState {
    pub y_hat: f64,
    pub tau_hat: f64,
    pub zero_run: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForecasterState {
    Ses(SesState),
    Croston(CrostonState),
    Tsb(TsbState),
    Hes(HesState),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Forecaster {
    params: SmoothingParams,
    state: ForecasterState,
}

impl Forecaster {
    pub fn new(method: Method, params: SmoothingParams) -> Self {
        let croston = |variant| {
            ForecasterState::Croston(CrostonState {
                y_hat: 1.0,
                tau_hat: 1.0,
                zero_run: 0,
                variant,
            })
        };
        let state = match method {
            Method::Ses => ForecasterState::Ses(SesState { level: 1.0 }),
            Method::Cr => croston(CrostonVariant::Cr),
            Method::Sba => croston(CrostonVariant::Sba),
            Method::Sy => croston(CrostonVariant::Sy),
            Method::Tsb => ForecasterState::Tsb(TsbState {
                y_hat: 1.0,
                p_hat: 1.0,
            }),
            Method::Hes => ForecasterState::Hes(HesState {
                y_hat: 1.0,
                tau_hat: 1.0,
                zero_run: 0,
            }),
        };
        Self { params, state }
    }

    /// Resumes from an explicit state.
    pub fn from_state(params: SmoothingParams, state: ForecasterState) -> Self {
        Self { params, state }
    }

    pub fn method(&self) -> Method {
        match self.state {
            ForecasterState::Ses(_) => Method::Ses,
            ForecasterState::Croston(s) => match s.variant {
                CrostonVariant::Cr => Method::Cr,
                CrostonVariant::Sba => Method::Sba,
                CrostonVariant::Sy => Method::Sy,
            },
            ForecasterState::Tsb(_) => Method::Tsb,
            ForecasterState::Hes(_) => Method::Hes,
        }
    }

    pub fn params(&self) -> SmoothingParams {
        self.params
    }

    pub fn state(&self) -> &ForecasterState {
        &self.state
    }

    /// Forecast for the next, not yet observed, period.
    pub fn forecast(&self) -> f64 {
        let beta = self.params.beta;
        match self.state {
            ForecasterState::Ses(s) => s.level,
            ForecasterState::Croston(s) => match s.variant {
                CrostonVariant::Cr => s.y_hat / s.tau_hat,
                CrostonVariant::Sba => (1.0 - beta / 2.0) * s.y_hat / s.tau_hat,
                CrostonVariant::Sy => (1.0 - beta / 2.0) * s.y_hat / (s.tau_hat - beta / 2.0),
            },
            ForecasterState::Tsb(s) => s.p_hat * s.y_hat,
            ForecasterState::Hes(s) => hes_forecast(s, beta),
        }
    }

    /// Folds in the realized demand of the period just forecast.
    pub fn update(&mut self, y: f64) -> Result<()> {
        if !(y >= 0.0 && y.is_finite()) {
            return Err(Error::NegativeDemand(y));
        }
        let SmoothingParams { alpha, beta } = self.params;
        match &mut self.state {
            ForecasterState::Ses(s) => s.level = smooth(s.level, y, alpha),
            ForecasterState::Croston(s) => croston_update(
                &mut s.y_hat,
                &mut s.tau_hat,
                &mut s.zero_run,
                y,
                alpha,
                beta,
            ),
            ForecasterState::Hes(s) => croston_update(
                &mut s.y_hat,
                &mut s.tau_hat,
                &mut s.zero_run,
                y,
                alpha,
                beta,
            ),
            ForecasterState::Tsb(s) => {
                let occurred = y != 0.0;
                s.p_hat = smooth(s.p_hat, if occurred { 1.0 } else { 0.0 }, beta);
                if occurred {
                    s.y_hat = smooth(s.y_hat, y, alpha);
                }
            }
        }
        Ok(())
    }

    /// Returns the forecast in force for this period, then updates with `y`.
    pub fn step(&mut self, y: f64) -> Result<f64> {
        let f = self.forecast();
        self.update(y)?;
        Ok(f)
    }
}

// The period being forecast is `zero_run + 1` periods after the last demand.
// Right after a demand this is plain `y_hat / tau_hat`; every further zero
// adds `beta / 2` to the denominator.
fn hes_forecast(s: HesState, beta: f64) -> f64 {
    s.y_hat / (s.tau_hat + beta * s.zero_run as f64 / 2.0)
}

#[inline]
fn smooth(old: f64, observed: f64, factor: f64) -> f64 {
    factor * observed + (1.0 - factor) * old
}

#[inline]
fn croston_update(
    y_hat: &mut f64,
    tau_hat: &mut f64,
    zero_run: &mut u64,
    y: f64,
    alpha: f64,
    beta: f64,
) {
    if y == 0.0 {
        *zero_run += 1;
    } else {
        let interval = (*zero_run + 1) as f64;
        *y_hat = smooth(*y_hat, y, alpha);
        *tau_hat = smooth(*tau_hat, interval, beta);
        *zero_run = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, beta: f64) -> SmoothingParams {
        SmoothingParams::new(alpha, beta).unwrap()
    }

    fn hes(y_hat: f64, tau_hat: f64, zero_run: u64, beta: f64) -> Forecaster {
        Forecaster::from_state(
            params(0.1, beta),
            ForecasterState::Hes(HesState {
                y_hat,
                tau_hat,
                zero_run,
            }),
        )
    }

    fn tsb(y_hat: f64, p_hat: f64, alpha: f64, beta: f64) -> Forecaster {
        Forecaster::from_state(
            params(alpha, beta),
            ForecasterState::Tsb(TsbState { y_hat, p_hat }),
        )
    }

    #[test]
    fn rejects_factors_outside_open_interval() {
        for bad in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(SmoothingParams::new(bad, 0.1).is_err());
            assert!(SmoothingParams::new(0.1, bad).is_err());
        }
        assert!(SmoothingParams::new(0.01, 0.99).is_ok());
    }

    #[test]
    fn initial_states() {
        let f = Forecaster::new(Method::Hes, params(0.1, 0.1));
        assert_eq!(
            f.state(),
            &ForecasterState::Hes(HesState {
                y_hat: 1.0,
                tau_hat: 1.0,
                zero_run: 0
            })
        );
        let f = Forecaster::new(Method::Tsb, params(0.1, 0.1));
        assert_eq!(
            f.state(),
            &ForecasterState::Tsb(TsbState {
                y_hat: 1.0,
                p_hat: 1.0
            })
        );
        let f = Forecaster::new(Method::Cr, params(0.3, 0.3));
        match f.state() {
            ForecasterState::Croston(s) => {
                assert_eq!((s.y_hat, s.tau_hat, s.zero_run), (1.0, 1.0, 0));
            }
            other => panic!("unexpected state {other:?}"),
        }
        for m in Method::ALL {
            assert_eq!(Forecaster::new(m, params(0.2, 0.2)).method(), m);
        }
    }

    #[test]
    fn hes_forecast_hand_values() {
        let f = hes(2.1, 3.8, 0, 0.1).forecast();
        assert!((f - 2.1 / 3.8).abs() < 1e-15);
        let f = hes(2.1, 3.8, 1, 0.1).forecast();
        assert!((f - 2.1 / 3.85).abs() < 1e-15);
        let f = hes(2.1, 3.8, 3, 0.1).forecast();
        assert!((f - 2.1 / 3.95).abs() < 1e-15);
        assert!((f - 0.531646).abs() < 1e-6);
    }

    #[test]
    fn tsb_and_croston_forecasts() {
        assert_eq!(tsb(2.0, 0.25, 0.1, 0.1).forecast(), 0.5);
        let cr = Forecaster::from_state(
            params(0.1, 0.1),
            ForecasterState::Croston(CrostonState {
                y_hat: 2.0,
                tau_hat: 1.0,
                zero_run: 0,
                variant: CrostonVariant::Cr,
            }),
        );
        assert_eq!(cr.forecast(), 2.0);
    }

    #[test]
    fn croston_update_hand_values() {
        let mut f = Forecaster::from_state(
            params(0.1, 0.1),
            ForecasterState::Croston(CrostonState {
                y_hat: 2.0,
                tau_hat: 4.0,
                zero_run: 1,
                variant: CrostonVariant::Cr,
            }),
        );
        f.update(3.0).unwrap();
        let ForecasterState::Croston(s) = *f.state() else {
            unreachable!()
        };
        assert!((s.y_hat - 2.1).abs() < 1e-12);
        assert!((s.tau_hat - 3.8).abs() < 1e-12);
        assert_eq!(s.zero_run, 0);
    }

    #[test]
    fn tsb_zero_update_is_one_decay_step() {
        let mut f = tsb(2.0, 0.25, 0.1, 0.1);
        f.update(0.0).unwrap();
        let ForecasterState::Tsb(s) = *f.state() else {
            unreachable!()
        };
        assert_eq!(s.y_hat, 2.0);
        assert!((s.p_hat - 0.225).abs() < 1e-15);
        assert!((f.forecast() - 0.45).abs() < 1e-15);
    }

    #[test]
    fn hes_zero_only_advances_counter() {
        let mut f = Forecaster::new(Method::Hes, params(0.4, 0.2));
        f.update(0.0).unwrap();
        assert_eq!(
            f.state(),
            &ForecasterState::Hes(HesState {
                y_hat: 1.0,
                tau_hat: 1.0,
                zero_run: 1
            })
        );
    }

    #[test]
    fn step_examples() {
        let mut cr = Forecaster::new(Method::Cr, params(0.1, 0.1));
        assert_eq!(cr.step(0.0).unwrap(), 1.0);
        let ForecasterState::Croston(s) = *cr.state() else {
            unreachable!()
        };
        assert_eq!(s.zero_run, 1);

        let mut t = tsb(2.0, 0.25, 0.1, 0.1);
        assert_eq!(t.step(3.0).unwrap(), 0.5);
        let ForecasterState::Tsb(s) = *t.state() else {
            unreachable!()
        };
        assert!((s.y_hat - 2.1).abs() < 1e-12);
        assert!((s.p_hat - 0.325).abs() < 1e-12);

        let mut ses = Forecaster::new(Method::Ses, params(0.5, 0.5));
        assert_eq!(ses.step(3.0).unwrap(), 1.0);
        assert_eq!(ses.state(), &ForecasterState::Ses(SesState { level: 2.0 }));
    }

    #[test]
    fn negative_and_non_finite_demand_rejected() {
        for m in Method::ALL {
            let mut f = Forecaster::new(m, params(0.1, 0.1));
            let before = f;
            assert_eq!(f.update(-1.0), Err(Error::NegativeDemand(-1.0)));
            assert!(f.update(f64::NAN).is_err());
            assert!(f.update(f64::INFINITY).is_err());
            assert_eq!(f, before);
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>(), Ok(m));
        }
        assert_eq!(" hes ".parse::<Method>(), Ok(Method::Hes));
        assert!("ARIMA".parse::<Method>().is_err());
    }
}
