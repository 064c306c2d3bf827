//! Noise-free base objectives of the ZDT and DTLZ families on `[0,1]^d`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Zdt1,
    Zdt2,
    Dtlz1,
    Dtlz2,
    Dtlz7,
    Tabular,
}

impl Benchmark {
    pub fn label(self) -> &'static str {
        match self {
            Benchmark::Zdt1 => "ZDT1",
            Benchmark::Zdt2 => "ZDT2",
            Benchmark::Dtlz1 => "DTLZ1",
            Benchmark::Dtlz2 => "DTLZ2",
            Benchmark::Dtlz7 => "DTLZ7",
            Benchmark::Tabular => "TABULAR",
        }
    }

    /// Checks that `(d, k)` is a combination the formulas are defined for.
    pub fn check_shape(self, d: usize, k: usize) -> Result<()> {
        let ok = match self {
            Benchmark::Zdt1 | Benchmark::Zdt2 => k == 2 && d >= 2,
            Benchmark::Dtlz1 | Benchmark::Dtlz2 | Benchmark::Dtlz7 => k >= 2 && k <= d,
            Benchmark::Tabular => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{} with d = {d}, k = {k}",
                self.label()
            )))
        }
    }
}

/// `f̄(x)` for a synthetic benchmark.
pub fn base_objectives(benchmark: Benchmark, x: &[f64], k: usize) -> Result<Vec<f64>> {
    let d = x.len();
    benchmark.check_shape(d, k)?;
    Ok(match benchmark {
        Benchmark::Zdt1 => {
            let u = zdt_u(x);
            vec![x[0], u * (1.0 - (x[0] / u).sqrt())]
        }
        Benchmark::Zdt2 => {
            let u = zdt_u(x);
            vec![x[0], u * (1.0 - (x[0] / u).powi(2))]
        }
        Benchmark::Dtlz1 => dtlz1(x, k),
        Benchmark::Dtlz2 => dtlz2(x, k),
        Benchmark::Dtlz7 => dtlz7(x, k),
        Benchmark::Tabular => {
            return Err(Error::Unsupported(
                "tabular problems have no closed-form objectives".into(),
            ))
        }
    })
}

fn zdt_u(x: &[f64]) -> f64 {
    let d = x.len();
    1.0 + 9.0 / (d as f64 - 1.0) * x[1..].iter().sum::<f64>()
}

fn dtlz1(x: &[f64], k: usize) -> Vec<f64> {
    let tail = &x[k - 1..];
    let g = 100.0
        * (tail.len() as f64
            + tail
                .iter()
                .map(|&v| (v - 0.5).powi(2) - (20.0 * PI * (v - 0.5)).cos())
                .sum::<f64>());
    (0..k)
        .map(|m| {
            let mut f = 0.5 * (1.0 + g);
            for &v in &x[..k - 1 - m] {
                f *= v;
            }
            if m > 0 {
                f *= 1.0 - x[k - 1 - m];
            }
            f
        })
        .collect()
}

fn dtlz2(x: &[f64], k: usize) -> Vec<f64> {
    let tail = &x[k - 1..];
    let g: f64 = tail.iter().map(|&v| (v - 0.5).powi(2)).sum();
    (0..k)
        .map(|m| {
            let mut f = 1.0 + g;
            for &v in &x[..k - 1 - m] {
                f *= (0.5 * PI * v).cos();
            }
            if m > 0 {
                f *= (0.5 * PI * x[k - 1 - m]).sin();
            }
            f
        })
        .collect()
}

fn dtlz7(x: &[f64], k: usize) -> Vec<f64> {
    let tail = &x[k - 1..];
    let g = 1.0 + 9.0 / tail.len() as f64 * tail.iter().sum::<f64>();
    let mut f: Vec<f64> = x[..k - 1].to_vec();
    let h = k as f64
        - f.iter()
            .map(|&fi| fi / (1.0 + g) * (1.0 + (3.0 * PI * fi).sin()))
            .sum::<f64>();
    f.push((1.0 + g) * h);
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn zdt1_optimal_slice() {
        let f = base_objectives(Benchmark::Zdt1, &[1.0, 0.0, 0.0, 0.0, 0.0], 2).unwrap();
        assert!(close(&f, &[1.0, 0.0]));
    }

    #[test]
    fn zdt2_origin() {
        let f = base_objectives(Benchmark::Zdt2, &[0.0; 5], 2).unwrap();
        assert!(close(&f, &[0.0, 1.0]));
    }

    #[test]
    fn dtlz2_optimal() {
        let f = base_objectives(Benchmark::Dtlz2, &[0.0, 0.5, 0.5, 0.5, 0.5], 2).unwrap();
        assert!(close(&f, &[1.0, 0.0]));
        // Unit circle on the optimal slice.
        let f = base_objectives(Benchmark::Dtlz2, &[0.3, 0.5, 0.5, 0.5, 0.5], 2).unwrap();
        assert!((f[0].hypot(f[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dtlz1_linear_front() {
        let f = base_objectives(Benchmark::Dtlz1, &[0.3, 0.5, 0.5, 0.5, 0.5], 2).unwrap();
        assert!((f.iter().sum::<f64>() - 0.5).abs() < 1e-9);
        let f = base_objectives(Benchmark::Dtlz1, &[0.2, 0.7, 0.5, 0.5, 0.5], 3).unwrap();
        assert!((f.iter().sum::<f64>() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn dtlz7_first_objectives_copy_inputs() {
        let x = [0.25, 0.0, 0.0, 0.0, 0.0];
        let f = base_objectives(Benchmark::Dtlz7, &x, 2).unwrap();
        assert_eq!(f[0], 0.25);
        // g = 1 on the optimal slice: f2 = 2·(2 − 0.125·(1 + sin(0.75π)))
        let expected = 2.0 * (2.0 - 0.125 * (1.0 + (0.75 * PI).sin()));
        assert!((f[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn unsupported_shapes() {
        assert!(base_objectives(Benchmark::Zdt1, &[0.5; 5], 3).is_err());
        assert!(base_objectives(Benchmark::Zdt1, &[0.5], 2).is_err());
        assert!(base_objectives(Benchmark::Dtlz2, &[0.5; 2], 3).is_err());
    }
}
