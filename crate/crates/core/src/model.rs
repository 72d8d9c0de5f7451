//! Experiment parameters, disorder, the operator `H_n`, and the spectral
//! constants of the free transfer matrix at a bulk energy.
//!
//! The operator acts on sites `0..=n` with Dirichlet conditions outside and
//! diagonal potential
//!
//! ```text
//! v_l = sigma * omega_l / (n^eta * (n + 1 - l)^(tau - eta)),   l = 1..=n,   v_0 = 0.
//! ```
//!
//! `tau = 1/2` is the critical mixed vanishing-decaying model; `tau > 1/2`
//! decays faster than critical.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::Stream;

pub type CMat2 = Matrix2<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Disorder {
    #[default]
    Rademacher,
    Gaussian,
    UniformScaled,
}

impl Disorder {
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Disorder::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Disorder::Gaussian => rng.sample(StandardNormal),
            Disorder::UniformScaled => {
                let s = 3f64.sqrt();
                rng.random_range(-s..=s)
            }
        }
    }
}

fn default_tau() -> f64 {
    0.5
}

fn default_window() -> f64 {
    10.0
}

/// All physical and numerical parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n: usize,
    pub sigma: f64,
    pub eta: f64,
    #[serde(default = "default_tau")]
    pub tau_decay: f64,
    #[serde(default)]
    pub energy: f64,
    #[serde(default)]
    pub disorder: Disorder,
    #[serde(default = "default_window")]
    pub window_radius: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ModelSpec {
    /// Critical model (`tau = 1/2`) with Rademacher disorder.
    pub fn critical(n: usize, sigma: f64, eta: f64, energy: f64) -> Self {
        ModelSpec {
            n,
            sigma,
            eta,
            tau_decay: 0.5,
            energy,
            disorder: Disorder::Rademacher,
            window_radius: default_window(),
            seed: 0,
        }
    }

    pub fn with_window(mut self, radius: f64) -> Self {
        self.window_radius = radius;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Every violated constraint, prefixed by the offending field.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n < 2 {
            out.push(format!("n: must be >= 2, got {}", self.n));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            out.push(format!("sigma: must be finite and >= 0, got {}", self.sigma));
        }
        if !(self.tau_decay.is_finite() && self.tau_decay >= 0.5) {
            out.push(format!("tau_decay: must be >= 0.5, got {}", self.tau_decay));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0 && self.eta <= 0.5) {
            out.push(format!("eta: must lie in [0, 0.5], got {}", self.eta));
        } else if self.eta > self.tau_decay {
            out.push(format!(
                "eta: must not exceed tau_decay ({}), got {}",
                self.tau_decay, self.eta
            ));
        }
        if !(self.energy.is_finite() && self.energy.abs() < 2.0) {
            out.push(format!("energy: must lie in (-2, 2), got {}", self.energy));
        }
        if !(self.window_radius.is_finite() && self.window_radius >= 0.0) {
            out.push(format!(
                "window_radius: must be finite and >= 0, got {}",
                self.window_radius
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }
}

/// `1 / (n^eta (n + 1 - ell)^(tau - eta))` for `ell` in `1..=n`.
pub fn potential_weight(ell: usize, spec: &ModelSpec) -> Result<f64> {
    if ell == 0 || ell > spec.n {
        return Err(Error::Argument(format!(
            "site {ell} outside 1..={}",
            spec.n
        )));
    }
    let n = spec.n as f64;
    let back = (spec.n + 1 - ell) as f64;
    Ok(1.0 / (n.powf(spec.eta) * back.powf(spec.tau_decay - spec.eta)))
}

/// Weights for sites `1..=n`, index `l - 1`.
pub fn potential_weights(spec: &ModelSpec) -> Vec<f64> {
    (1..=spec.n)
        .map(|l| potential_weight(l, spec).expect("site in range"))
        .collect()
}

/// I.i.d. disorder `omega_1..omega_n` (index `l - 1`).
pub fn sample_disorder(spec: &ModelSpec, stream: &Stream) -> Vec<f64> {
    let mut rng = stream.rng();
    (0..spec.n).map(|_| spec.disorder.draw(&mut rng)).collect()
}

/// Symmetric tridiagonal matrix stored as diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Argument(format!(
                "tridiagonal shape mismatch: diag {} offdiag {}",
                diag.len(),
                offdiag.len()
            )));
        }
        Ok(SymTridiagonal { diag, offdiag })
    }

    /// Free Laplacian on `size` sites.
    pub fn free(size: usize) -> Self {
        SymTridiagonal {
            diag: vec![0.0; size],
            offdiag: vec![1.0; size.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Max-abs-row-sum norm, an upper bound for the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Leading principal submatrix of the given size.
    pub fn leading(&self, size: usize) -> SymTridiagonal {
        SymTridiagonal {
            diag: self.diag[..size].to_vec(),
            offdiag: self.offdiag[..size.saturating_sub(1)].to_vec(),
        }
    }
}

/// `H_n` on sites `0..=n`; `omega[l - 1]` drives site `l`, site 0 carries no potential.
pub fn build_hamiltonian(spec: &ModelSpec, omega: &[f64]) -> Result<SymTridiagonal> {
    if omega.len() != spec.n {
        return Err(Error::Argument(format!(
            "disorder length {} does not match n = {}",
            omega.len(),
            spec.n
        )));
    }
    let mut diag = Vec::with_capacity(spec.n + 1);
    diag.push(0.0);
    for (i, w) in omega.iter().enumerate() {
        diag.push(spec.sigma * w * potential_weight(i + 1, spec)?);
    }
    SymTridiagonal::new(diag, vec![1.0; spec.n])
}

/// Diagonalization data of the free transfer matrix `T(E) = Z D Z^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralConstants {
    pub energy: f64,
    pub rho: f64,
    pub z: Complex64,
    /// `arg z`, in `(0, pi)`.
    pub kappa: f64,
    pub zmat: CMat2,
    pub zinv: CMat2,
    pub d: CMat2,
}

impl SpectralConstants {
    pub fn tau_kvv(&self, sigma: f64) -> f64 {
        (sigma * self.rho).powi(2)
    }

    pub fn sigma_rho(&self, sigma: f64) -> f64 {
        sigma * self.rho
    }

    /// `D^{-l} = diag(z^l, zbar^l)` from the accumulated angle `l * kappa`.
    pub fn d_inverse_power(&self, l: usize) -> CMat2 {
        let angle = l as f64 * self.kappa;
        let w = Complex64::from_polar(1.0, angle);
        CMat2::new(w, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), w.conj())
    }

    /// `T(E)^{-l} = Z D^{-l} Z^{-1}`; real up to rounding.
    pub fn t_inverse_power(&self, l: usize) -> Matrix2<f64> {
        let c = self.zmat * self.d_inverse_power(l) * self.zinv;
        c.map(|x| x.re)
    }
}

/// Density-of-states factor `rho(E) = 1 / sqrt(1 - E^2/4)`.
pub fn rho(energy: f64) -> Result<f64> {
    if !(energy.is_finite() && energy.abs() < 2.0) {
        return Err(Error::Domain(energy));
    }
    Ok(1.0 / (1.0 - energy * energy / 4.0).sqrt())
}

pub fn spectral_constants(energy: f64) -> Result<SpectralConstants> {
    let rho = rho(energy)?;
    let im = (1.0 - energy * energy / 4.0).sqrt();
    let z = Complex64::new(energy / 2.0, im);
    let zb = z.conj();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let pref = Complex64::new(0.0, rho / 2.0);
    let zmat = CMat2::new(zb, -z, one, -one) * pref;
    let zinv = CMat2::new(one, -z, one, -zb);
    let d = CMat2::new(zb, zero, zero, z);
    Ok(SpectralConstants {
        energy,
        rho,
        z,
        kappa: im.atan2(energy / 2.0),
        zmat,
        zinv,
        d,
    })
}

/// Draw from the arcsine law on `(-2, 2)`: `E = -2 cos(pi u)`.
pub fn sample_arcsine_energy<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    arcsine_from_uniform(u)
}

pub fn arcsine_from_uniform(u: f64) -> f64 {
    -2.0 * (PI * u).cos()
}
