use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("smoothing factor {name} = {value} is outside (0, 1)")]
    SmoothingFactor { name: &'static str, value: f64 },

    #[error("demand must be finite and nonnegative, got {0}")]
    NegativeDemand(f64),

    #[error("invalid size distribution: {0}")]
    SizeDistribution(&'static str),

    #[error("invalid occurrence profile: {0}")]
    Profile(&'static str),

    #[error("invalid scenario: {0}")]
    Scenario(&'static str),

    #[error("pmf support starts at k = 1, got k = {0}")]
    OutsideSupport(u64),

    #[error("initialization series needs at least 2 periods, got {0}")]
    SeriesTooShort(usize),

    #[error("initialization series has zero mean absolute difference")]
    DegenerateScale,

    #[error("no records accumulated")]
    EmptyAccumulator,

    #[error("{0} baseline is zero")]
    ZeroBaseline(&'static str),

    #[error("invalid experiment: {0}")]
    Experiment(&'static str),
}
