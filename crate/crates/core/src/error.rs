use thiserror::Error;

/// Failure modes shared by every module of the core crate.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: expected {expected}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("inadmissible state: {0}")]
    InvalidState(&'static str),
    #[error("solution left the admissible domain at t = {t}")]
    BlowUp { t: f64 },
    #[error("step size {h:e} fell below the minimum at t = {t}")]
    StepUnderflow { t: f64, h: f64 },
    #[error("bracket does not contain a sign change")]
    NoSignChange,
    #[error("point lies outside the classical region")]
    OutsideClassicalRegion,
    #[error("unbounded regime (ω² − 2λE ≤ 0)")]
    UnboundedRegime,
    #[error("undefined on a circular orbit")]
    UndefinedOnCircular,
    #[error("phase undefined: an oscillator rests at the origin of its phase plane")]
    UndefinedPhase,
    #[error("polar chart is singular at the origin")]
    OriginSingularity,
    #[error("integrand singularity is not integrable")]
    NonIntegrableSingularity,
    #[error("quadrature did not converge (last estimate {estimate:e})")]
    MaxRefinementExceeded { estimate: f64 },
    #[error("integration path leaves the admissible domain")]
    PathLeavesDomain,
    #[error("not enough events on the trajectory")]
    InsufficientEvents,
    #[error("evaluation failed")]
    EvaluationFailed,
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
