//! Continuum engine in the singularity-removing time `v`.
//!
//! ```text
//! v(t) = (s^2 / 4 eta) (1 - (1 - t)^(2 eta)),   s = sigma rho
//! ```
//!
//! In `v` all noise coefficients are O(1) and the spectral drift picks up the
//! bounded factor `t'(v) = 2 (1 - t)^(1 - 2 eta) / s^2`.

mod matrix;
mod noise;
mod pruefer;

pub use matrix::{integrate_matrix_q, EnergyMode, MatrixPath};
pub use noise::{sample_noise, NoisePath};
pub use pruefer::{
    count_via_alpha, integrate_alpha, integrate_pruefer_family, pathwise_alpha_driver,
    phi_identity_residual, write_path_csv, PreparedNoise, PrueferFamilyPath, Terminal,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of steps on the `v` grid.
pub const DEFAULT_STEPS: usize = 4096;
pub const MIN_STEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeChange {
    pub sigma_rho: f64,
    pub eta: f64,
    pub v_end: f64,
}

impl TimeChange {
    pub fn new(sigma_rho: f64, eta: f64) -> Result<Self> {
        if eta == 0.0 {
            return Err(Error::Unsupported(
                "eta = 0 (pure decaying potential) has a degenerate time change".into(),
            ));
        }
        if !(eta > 0.0 && eta <= 0.5) {
            return Err(Error::Argument(format!("eta = {eta} outside (0, 1/2]")));
        }
        if !(sigma_rho > 0.0 && sigma_rho.is_finite()) {
            return Err(Error::Argument(format!("sigma_rho = {sigma_rho} must be positive")));
        }
        Ok(TimeChange {
            sigma_rho,
            eta,
            v_end: sigma_rho * sigma_rho / (4.0 * eta),
        })
    }

    pub fn v(&self, t: f64) -> f64 {
        self.v_end * (1.0 - (1.0 - t).powf(2.0 * self.eta))
    }

    /// Inverse of `v`; `1 - t = (1 - v / v_end)^(1 / 2 eta)`.
    pub fn t(&self, v: f64) -> f64 {
        1.0 - self.one_minus_t(v)
    }

    fn one_minus_t(&self, v: f64) -> f64 {
        let base = ((self.v_end - v) / self.v_end).max(0.0);
        base.powf(1.0 / (2.0 * self.eta))
    }

    /// `dt/dv`.
    pub fn tprime(&self, v: f64) -> f64 {
        let s2 = self.sigma_rho * self.sigma_rho;
        2.0 * self.one_minus_t(v).powf(1.0 - 2.0 * self.eta) / s2
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    #[default]
    UniformV,
    UniformT,
}

/// `K + 1` strictly increasing points from 0 to `v_end`.
pub fn make_grid(tc: &TimeChange, k: usize, mode: GridMode) -> Result<Vec<f64>> {
    if k < MIN_STEPS {
        return Err(Error::Argument(format!("K = {k} below the minimum {MIN_STEPS}")));
    }
    Ok(match mode {
        GridMode::UniformV => uniform_points(tc.v_end, k),
        GridMode::UniformT => {
            let mut g: Vec<f64> = (0..=k).map(|j| tc.v(j as f64 / k as f64)).collect();
            g[k] = tc.v_end;
            g
        }
    })
}

/// Evenly spaced points on `[0, end]`, endpoints exact.
pub fn uniform_points(end: f64, k: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..=k).map(|j| end * j as f64 / k as f64).collect();
    g[k] = end;
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_is_linear() {
        let tc = TimeChange::new(1.3, 0.5).unwrap();
        for &t in &[0.0, 0.2, 0.5, 0.93, 1.0] {
            assert!((tc.v(t) - 1.69 / 2.0 * t).abs() < 1e-14);
        }
        assert!((tc.tprime(0.4) - 2.0 / 1.69).abs() < 1e-14);
    }

    #[test]
    fn endpoint_and_inverse() {
        let tc = TimeChange::new(0.8, 0.3).unwrap();
        assert!((tc.v(1.0) - 0.64 / 1.2).abs() < 1e-15);
        assert!((tc.v_end - 0.64 / 1.2).abs() < 1e-15);
        assert!((tc.t(tc.v(0.37)) - 0.37).abs() < 1e-12);
        for j in 0..=1000 {
            let t = j as f64 / 1000.0;
            assert!((tc.t(tc.v(t)) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn tprime_matches_difference_quotient() {
        let tc = TimeChange::new(1.1, 0.25).unwrap();
        let h = 1e-6;
        for j in 1..20 {
            let v = tc.v_end * j as f64 / 21.0;
            let fd = (tc.t(v + h) - tc.t(v - h)) / (2.0 * h);
            assert!((fd - tc.tprime(v)).abs() < 1e-6 * tc.tprime(v).max(1.0));
        }
        // integral of t' over [0, v_end] is 1
        let g = uniform_points(tc.v_end, 200_000);
        let s: f64 = g.windows(2).map(|w| 0.5 * (tc.tprime(w[0]) + tc.tprime(w[1])) * (w[1] - w[0])).sum();
        assert!((s - 1.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(TimeChange::new(1.0, 0.0), Err(Error::Unsupported(_))));
        assert!(matches!(TimeChange::new(1.0, 0.7), Err(Error::Argument(_))));
        assert!(matches!(TimeChange::new(0.0, 0.3), Err(Error::Argument(_))));
    }

    #[test]
    fn grids() {
        assert_eq!(uniform_points(1.0, 4), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        assert!(matches!(make_grid(&tc, 4, GridMode::UniformV), Err(Error::Argument(_))));
        for mode in [GridMode::UniformV, GridMode::UniformT] {
            let g = make_grid(&tc, 64, mode).unwrap();
            assert_eq!(g.len(), 65);
            assert!(g.windows(2).all(|w| w[1] > w[0]));
            assert!(g[0].abs() < 1e-12 && (g[64] - tc.v_end).abs() < 1e-12);
        }
        let gt = make_grid(&tc, 64, GridMode::UniformT).unwrap();
        assert!((tc.t(gt[16]) - 0.25).abs() < 1e-12);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn v_strictly_increasing(s in 0.05f64..3.0, eta in 0.01f64..=0.5, a in 0.0f64..1.0, b in 0.0f64..1.0) {
                let tc = TimeChange::new(s, eta).unwrap();
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assume!(hi - lo > 1e-9);
                prop_assert!(tc.v(hi) > tc.v(lo));
                prop_assert!(tc.v(0.0) == 0.0);
                prop_assert!((tc.v(1.0) - tc.v_end).abs() <= 1e-15 * tc.v_end);
            }
        }
    }
}
