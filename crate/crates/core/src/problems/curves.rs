use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Epoch-dependence multiplier applied to one base objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    MInc,
    MDec,
    Quad,
    Periodic,
    None,
}

impl CurveKind {
    pub fn label(self) -> &'static str {
        match self {
            CurveKind::MInc => "M+",
            CurveKind::MDec => "M-",
            CurveKind::Quad => "Q",
            CurveKind::Periodic => "P",
            CurveKind::None => "N",
        }
    }
}

/// Curve value at epoch `t` of `t_max`; strictly positive for every kind.
pub fn curve(kind: CurveKind, t: f64, t_max: f64) -> f64 {
    match kind {
        CurveKind::MInc => 0.5 + 1.0 / (1.0 + (-0.2 * (t - t_max / 2.0)).exp()),
        CurveKind::MDec => 0.3 + 1.0 / (1.0 + (0.1 * (t - t_max / 3.0)).exp()),
        CurveKind::Quad => 0.5 + 2.0 * (t / t_max - 2.0 / 3.0).powi(2),
        CurveKind::Periodic => 1.0 + 0.5 * (4.0 * PI * t / t_max).sin(),
        CurveKind::None => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(curve(CurveKind::MInc, 25.0, 50.0), 1.0);
        assert!((curve(CurveKind::Quad, 100.0 / 3.0, 50.0) - 0.5).abs() < 1e-15);
        assert!((curve(CurveKind::Periodic, 50.0, 50.0) - 1.0).abs() < 1e-12);
        assert_eq!(curve(CurveKind::None, 7.0, 50.0), 1.0);
    }

    #[test]
    fn positive_and_monotone_on_grid() {
        for t_max in [1usize, 2, 10, 50, 200] {
            let tm = t_max as f64;
            for kind in [
                CurveKind::MInc,
                CurveKind::MDec,
                CurveKind::Quad,
                CurveKind::Periodic,
                CurveKind::None,
            ] {
                for t in 1..=t_max {
                    assert!(curve(kind, t as f64, tm) > 0.0);
                }
            }
            for t in 1..t_max {
                let (a, b) = (t as f64, (t + 1) as f64);
                assert!(curve(CurveKind::MInc, a, tm) <= curve(CurveKind::MInc, b, tm));
                assert!(curve(CurveKind::MDec, a, tm) >= curve(CurveKind::MDec, b, tm));
            }
        }
    }
}
