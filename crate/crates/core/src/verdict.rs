use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Exhaustive,
    Symbolic,
}

/// Why a backend could not reach a definitive answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnknownReason {
    Unsupported,
    Timeout,
    BudgetExceeded,
    Undecided,
    FilterExhausted,
}

impl UnknownReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UnknownReason::BudgetExceeded => "budget_exceeded",
            UnknownReason::Timeout => "timeout",
            UnknownReason::Unsupported => "unsupported",
            UnknownReason::Undecided => "undecided",
            UnknownReason::FilterExhausted => "filter_exhausted",
        }
    }

    /// How much an Unknown tells the developer; higher is more informative.
    pub fn informativeness(self) -> u8 {
        match self {
            UnknownReason::Undecided => 4,
            UnknownReason::BudgetExceeded => 3,
            UnknownReason::FilterExhausted => 2,
            UnknownReason::Timeout => 1,
            UnknownReason::Unsupported => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub original: Value,
    pub shrunk: Value,
    pub seed: Option<u64>,
    pub case_index: Option<u64>,
    /// Failure message at the shrunk value.
    pub message: String,
    /// Shrinking was cut short by the deadline; `shrunk` is best-so-far.
    pub shrink_incomplete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    PassSampled {
        cases: u64,
    },
    Proved {
        method: Method,
        /// Evaluations for exhaustive proofs, boxes for symbolic ones.
        count: u64,
        /// The domain the claim quantified over turned out to be empty.
        vacuous: bool,
    },
    Falsified(Box<Counterexample>),
    Unknown {
        reason: UnknownReason,
        detail: String,
        /// Cases completed before a timeout, or domain size for budget
        /// overruns, when known.
        count: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    PassSampled,
    Proved,
    Falsified,
    Unknown,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::PassSampled => "pass_sampled",
            VerdictKind::Proved => "proved",
            VerdictKind::Falsified => "falsified",
            VerdictKind::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "pass_sampled" => VerdictKind::PassSampled,
            "proved" => VerdictKind::Proved,
            "falsified" => VerdictKind::Falsified,
            "unknown" => VerdictKind::Unknown,
            _ => return None,
        })
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Verdict {
    pub fn unknown(reason: UnknownReason, detail: impl Into<String>, count: Option<u64>) -> Self {
        Verdict::Unknown {
            reason,
            detail: detail.into(),
            count,
        }
    }

    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::PassSampled { .. } => VerdictKind::PassSampled,
            Verdict::Proved { .. } => VerdictKind::Proved,
            Verdict::Falsified(_) => VerdictKind::Falsified,
            Verdict::Unknown { .. } => VerdictKind::Unknown,
        }
    }

    /// Proved or Falsified.
    pub fn is_definitive(&self) -> bool {
        matches!(self, Verdict::Proved { .. } | Verdict::Falsified(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Falsified(c) => Some(c),
            _ => None,
        }
    }

    pub fn reason(&self) -> Option<UnknownReason> {
        match self {
            Verdict::Unknown { reason, .. } => Some(*reason),
            _ => None,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        matches!(self, Verdict::Proved { vacuous: true, .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::PassSampled { cases } => write!(f, "passed {cases} sampled cases"),
            Verdict::Proved {
                method,
                count,
                vacuous,
            } => {
                let (how, unit) = match method {
                    Method::Exhaustive => ("exhaustively", "case"),
                    Method::Symbolic => ("symbolically", "box"),
                };
                let plural = match (count, unit) {
                    (1, _) => "",
                    (_, "box") => "es",
                    _ => "s",
                };
                write!(f, "proved {how} ({count} {unit}{plural})")?;
                if *vacuous {
                    f.write_str(" [vacuous: empty domain]")?;
                }
                Ok(())
            }
            Verdict::Falsified(c) => write!(f, "falsified: {} ({})", c.shrunk, c.message),
            Verdict::Unknown { reason, detail, .. } => {
                write!(f, "unknown ({})", reason.as_str())?;
                if !detail.is_empty() {
                    write!(f, ": {detail}")?;
                }
                Ok(())
            }
        }
    }
}
