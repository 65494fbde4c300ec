use serde::{Deserialize, Serialize};

/// One inequality check `lhs ≤ rhs·(1 + tol)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    pub tol: f64,
    #[serde(default)]
    pub case: String,
}

impl VerdictReport {
    pub fn check(
        name: impl Into<String>,
        case: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tol: f64,
    ) -> Self {
        let pass = lhs.is_finite() && !rhs.is_nan() && lhs <= rhs * (1.0 + tol);
        Self {
            name: name.into(),
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
            pass,
            tol,
            case: case.into(),
        }
    }

    /// `lower ≥ bound`, recorded as `bound ≤ lower`.
    pub fn at_least(
        name: impl Into<String>,
        case: impl Into<String>,
        value: f64,
        bound: f64,
        tol: f64,
    ) -> Self {
        Self::check(name, case, bound, value, tol)
    }
}

/// `lhs / rhs` with `0/0 = 0`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

pub fn all_pass(verdicts: &[VerdictReport]) -> bool {
    verdicts.iter().all(|v| v.pass)
}
