//! Discrete transfer-matrix engine.
//!
//! For a microscopic spectral parameter `lambda` the eigenvalue equation of
//! `H_n` at `E + lambda/(rho n)` is propagated by
//!
//! ```text
//! M_l = T(E + eps_l) ... T(E + eps_1),   eps_l = lambda/(rho n) - sigma omega_l w_l,
//! Q_l = T(E)^{-l} M_l,                   X_l = Z^{-1} Q_l Z.
//! ```
//!
//! Site 0 carries no potential, so the Dirichlet boundary vector entering the
//! chain at site 1 is `T(E + lambda/(rho n)) (1, 0)^T = (E + lambda/(rho n), 1)^T`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{potential_weights, spectral_constants, CMat2, ModelSpec, SpectralConstants};

/// Norm beyond which a trajectory is declared divergent.
pub const OVERFLOW_LIMIT: f64 = 1e30;

/// Phase increments between stored snapshots above this are unresolvable.
pub const MAX_RESOLVED_PHASE_STEP: f64 = PI / 2.0;

pub fn single_step(energy: f64, eps: f64) -> Matrix2<f64> {
    Matrix2::new(energy + eps, -1.0, 1.0, 0.0)
}

/// `eps_l = lambda/(rho n) - sigma omega_l w_l` for `l = 1..=n` (index `l - 1`).
pub fn epsilon_sequence(spec: &ModelSpec, omega: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if omega.len() != spec.n {
        return Err(Error::Argument(format!(
            "disorder length {} does not match n = {}",
            omega.len(),
            spec.n
        )));
    }
    let rho = crate::model::rho(spec.energy)?;
    let shift = lambda / (rho * spec.n as f64);
    Ok(potential_weights(spec)
        .iter()
        .zip(omega)
        .map(|(w, om)| shift - spec.sigma * om * w)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferTrajectory {
    pub lambda: f64,
    pub n: usize,
    /// Chain indices `l` of the stored snapshots; always starts at 0 and ends at `n`.
    pub indices: Vec<usize>,
    pub m: Vec<Matrix2<f64>>,
    pub q: Vec<CMat2>,
    pub x: Vec<CMat2>,
    /// `M_n (E + lambda/(rho n), 1)^T`.
    pub boundary: Vector2<f64>,
}

impl TransferTrajectory {
    pub fn final_m(&self) -> &Matrix2<f64> {
        self.m.last().expect("trajectory is never empty")
    }
}

pub fn default_stride(n: usize) -> usize {
    (n / 2048).max(1)
}

fn to_complex(m: &Matrix2<f64>) -> CMat2 {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Propagates the chain and stores `M`, `Q`, `X` every `stride` sites.
pub fn evolve(
    spec: &ModelSpec,
    omega: &[f64],
    lambda: f64,
    stride: usize,
) -> Result<TransferTrajectory> {
    if stride == 0 {
        return Err(Error::Argument("stride must be at least 1".into()));
    }
    let consts = spectral_constants(spec.energy)?;
    let eps = epsilon_sequence(spec, omega, lambda)?;
    let n = spec.n;
    let cap = n / stride + 2;
    let mut traj = TransferTrajectory {
        lambda,
        n,
        indices: Vec::with_capacity(cap),
        m: Vec::with_capacity(cap),
        q: Vec::with_capacity(cap),
        x: Vec::with_capacity(cap),
        boundary: Vector2::zeros(),
    };
    let mut m = Matrix2::<f64>::identity();
    store(&mut traj, &consts, 0, &m);
    for l in 1..=n {
        m = single_step(spec.energy, eps[l - 1]) * m;
        if l % stride == 0 || l == n {
            let norm = m.abs().max();
            if !(norm.is_finite() && norm <= OVERFLOW_LIMIT) {
                return Err(Error::Numerical {
                    context: "transfer evolution",
                    detail: format!("matrix norm {norm:e} at site {l}; lambda {lambda} is far outside the window"),
                    step: Some(l),
                    residual: None,
                });
            }
            store(&mut traj, &consts, l, &m);
        }
    }
    let site0 = spec.energy + lambda / (consts.rho * n as f64);
    traj.boundary = m * Vector2::new(site0, 1.0);
    Ok(traj)
}

fn store(traj: &mut TransferTrajectory, consts: &SpectralConstants, l: usize, m: &Matrix2<f64>) {
    let tinv = consts.zmat * consts.d_inverse_power(l) * consts.zinv;
    let q = tinv * to_complex(m);
    let x = consts.zinv * q * consts.zmat;
    traj.indices.push(l);
    traj.m.push(*m);
    traj.q.push(q);
    traj.x.push(x);
}

/// `|[v]_1| / ||v||` for the propagated boundary vector; zero iff
/// `E + lambda/(rho n)` is an eigenvalue of `H_n`.
pub fn eigen_condition(traj: &TransferTrajectory) -> Result<f64> {
    let norm = traj.boundary.norm();
    if !(norm > 0.0) {
        return Err(Error::numerical("eigen condition", "zero boundary vector"));
    }
    Ok(traj.boundary[0].abs() / norm)
}

/// Signed Dirichlet mismatch `psi_{n+1} / ||(psi_{n+1}, psi_n)||` for the
/// solution with `psi_{-1} = 0`, `psi_0 = 1`; no storage, renormalized on the fly.
/// Changes sign at every simple eigenvalue.
pub fn dirichlet_mismatch(spec: &ModelSpec, weights: &[f64], omega: &[f64], lambda: f64) -> Result<f64> {
    let rho = crate::model::rho(spec.energy)?;
    let shift = lambda / (rho * spec.n as f64);
    let (mut cur, mut prev) = (spec.energy + shift, 1.0f64);
    for (w, om) in weights.iter().zip(omega) {
        let x = spec.energy + shift - spec.sigma * om * w;
        let next = x * cur - prev;
        prev = cur;
        cur = next;
        let s = cur.abs().max(prev.abs());
        if s > 1e100 {
            cur /= s;
            prev /= s;
        }
    }
    let norm = cur.hypot(prev);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::numerical("dirichlet mismatch", format!("degenerate vector at lambda {lambda}")));
    }
    Ok(cur / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrueferSnapshot {
    pub index: usize,
    pub q_re: f64,
    pub q_im: f64,
    pub r: f64,
    pub theta: f64,
}

impl PrueferSnapshot {
    pub fn q(&self) -> Complex64 {
        Complex64::new(self.q_re, self.q_im)
    }
}

/// `(q, qbar) = Z^{-1} Q_l (1, 0)^T`, `q^2 = exp(r + i theta)` with `theta`
/// lifted continuously along the stored snapshots.
pub fn pruefer_extract(traj: &TransferTrajectory, consts: &SpectralConstants) -> Result<Vec<PrueferSnapshot>> {
    let mut out = Vec::with_capacity(traj.q.len());
    let mut prev_raw = 0.0;
    let mut theta = 0.0;
    for (k, q_mat) in traj.q.iter().enumerate() {
        let col = consts.zinv * q_mat.column(0);
        let q = col[0];
        let conj_gap = (col[1] - q.conj()).norm();
        if conj_gap > 1e-8 * q.norm().max(1.0) {
            return Err(Error::Integrity(format!(
                "Z^-1 Q (1,0) lost its conjugate-pair structure at site {} (gap {conj_gap:e})",
                traj.indices[k]
            )));
        }
        let raw = 2.0 * q.arg();
        if k > 0 {
            let step = wrap_pi(raw - prev_raw);
            if step.abs() > MAX_RESOLVED_PHASE_STEP {
                return Err(Error::StrideTooCoarse { index: k, jump: step });
            }
            theta += step;
        } else {
            theta = raw;
        }
        prev_raw = raw;
        out.push(PrueferSnapshot {
            index: traj.indices[k],
            q_re: q.re,
            q_im: q.im,
            r: 2.0 * q.norm().ln(),
            theta,
        });
    }
    Ok(out)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// `max_l Tr(M_l M_l^T)` over the stored snapshots.
pub fn tightness_diag(traj: &TransferTrajectory) -> f64 {
    traj.m
        .iter()
        .map(|m| (m * m.transpose()).trace())
        .fold(f64::NEG_INFINITY, f64::max)
}
