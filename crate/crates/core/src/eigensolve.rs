//! Spectral extraction for symmetric tridiagonal matrices: Sturm counts,
//! windowed eigenvalues by bisection, eigenvectors by inverse iteration.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, build_hamiltonian, sample_disorder, ModelSpec, SymTridiagonal};
use crate::rng::{Purpose, Stream};
use crate::stats::Moments;

/// Default bisection tolerance in rescaled (lambda) units.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_INVERSE_ITERATIONS: usize = 50;
const RESIDUAL_TARGET: f64 = 1e-8;

/// Number of eigenvalues of `t` strictly below `x`.
///
/// Counts negative pivots of the shifted LDLᵀ recursion
/// `d_0 = a_0 - x`, `d_i = a_i - x - b_{i-1}^2 / d_{i-1}`. A pivot that is
/// exactly zero is replaced by `-eps * scale`.
pub fn sturm_count(t: &SymTridiagonal, x: f64) -> Result<usize> {
    if !x.is_finite() {
        return Err(Error::Argument(format!("sturm shift must be finite, got {x}")));
    }
    Ok(sturm_count_unchecked(t, x))
}

fn sturm_count_unchecked(t: &SymTridiagonal, x: f64) -> usize {
    let scale = t.norm_bound().max(x.abs()).max(1.0);
    let tiny = -f64::EPSILON * scale;
    let mut count = 0;
    let mut d = t.diag[0] - x;
    if d == 0.0 {
        d = tiny;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..t.dim() {
        let b = t.offdiag[i - 1];
        d = t.diag[i] - x - b * b / d;
        if d == 0.0 {
            d = tiny;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues of `H_n` inside a microscopic window around `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumWindow {
    pub center: f64,
    pub radius_lambda: f64,
    pub rho: f64,
    /// Chain length `n` (the matrix has `n + 1` rows).
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub rescaled: Vec<f64>,
    /// Marks points that could not be separated from a neighbour at the
    /// requested tolerance and were reported at a shared bracket midpoint.
    pub clustered: Vec<bool>,
    pub count: usize,
}

impl SpectrumWindow {
    pub fn rescale(&self, mu: f64) -> f64 {
        self.rho * self.n as f64 * (mu - self.center)
    }
}

/// All eigenvalues `mu` with `|rho n (mu - center)| <= radius`, bisected to a
/// bracket of width `tol / (rho n)`.
pub fn eigenvalues_in_window(
    t: &SymTridiagonal,
    center: f64,
    radius: f64,
    rho: f64,
    tol: f64,
) -> Result<SpectrumWindow> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    if !(center.abs() < 2.0) {
        return Err(Error::Domain(center));
    }
    let n = t.dim() - 1;
    let scale = rho * n as f64;
    let mut win = SpectrumWindow {
        center,
        radius_lambda: radius,
        rho,
        n,
        eigenvalues: Vec::new(),
        rescaled: Vec::new(),
        clustered: Vec::new(),
        count: 0,
    };
    if radius <= 0.0 {
        return Ok(win);
    }
    let lo = center - radius / scale;
    let hi = center + radius / scale;
    let width_mu = (tol / scale).max(4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0));
    let c_lo = sturm_count_unchecked(t, lo);
    let c_hi = sturm_count_unchecked(t, hi);

    let mut stack = vec![(lo, hi, c_lo, c_hi)];
    let mut found: Vec<(f64, usize)> = Vec::new();
    while let Some((a, b, ca, cb)) = stack.pop() {
        if cb == ca {
            continue;
        }
        let mid = 0.5 * (a + b);
        if b - a <= width_mu || mid <= a || mid >= b {
            found.push((mid, cb - ca));
            continue;
        }
        let cm = sturm_count_unchecked(t, mid);
        stack.push((mid, b, cm, cb));
        stack.push((a, mid, ca, cm));
    }
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (mu, mult) in found {
        for _ in 0..mult {
            win.eigenvalues.push(mu);
            win.rescaled.push(scale * (mu - center));
            win.clustered.push(mult > 1);
        }
    }
    win.count = win.eigenvalues.len();
    debug_assert_eq!(win.count, c_hi - c_lo);
    Ok(win)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection on the Gershgorin interval.
pub fn kth_eigenvalue(t: &SymTridiagonal, k: usize) -> Result<f64> {
    if k >= t.dim() {
        return Err(Error::Argument(format!(
            "eigenvalue index {k} out of range for dimension {}",
            t.dim()
        )));
    }
    let (g_lo, g_hi) = t.gershgorin();
    let (mut a, mut b) = (g_lo - 1e-12, g_hi + 1e-12);
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return Ok(mid);
        }
        if sturm_count_unchecked(t, mid) > k {
            b = mid;
        } else {
            a = mid;
        }
    }
}

/// Unit eigenvector with its residual `||H psi - mu psi||_2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub mu: f64,
    pub psi: Vec<f64>,
    pub residual: f64,
}

/// Factorization of `T - mu I` by Gaussian elimination with partial pivoting.
struct ShiftedLu {
    // row i of U: u0[i] on the diagonal, u1[i], u2[i] to the right
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(t: &SymTridiagonal, mu: f64) -> Self {
        let n = t.dim();
        let tiny = f64::EPSILON * t.norm_bound().max(1.0);
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];
        // working row i: (d, e, f) at columns i, i+1, i+2
        let mut d = t.diag[0] - mu;
        let mut e = if n > 1 { t.offdiag[0] } else { 0.0 };
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if d == 0.0 { tiny } else { d };
                u1[i] = 0.0;
                u2[i] = 0.0;
                break;
            }
            let below_sub = t.offdiag[i];
            let below_diag = t.diag[i + 1] - mu;
            let below_sup = if i + 2 < n { t.offdiag[i + 1] } else { 0.0 };
            if below_sub.abs() > d.abs() {
                // pivot on the row below
                swapped[i] = true;
                u0[i] = below_sub;
                u1[i] = below_diag;
                u2[i] = below_sup;
                let m = d / below_sub;
                mult[i] = m;
                d = e - m * below_diag;
                e = -m * below_sup;
            } else {
                if d == 0.0 {
                    d = tiny;
                }
                u0[i] = d;
                u1[i] = e;
                u2[i] = 0.0;
                let m = below_sub / d;
                mult[i] = m;
                d = below_diag - m * e;
                e = below_sup;
            }
        }
        ShiftedLu { u0, u1, u2, mult, swapped }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                rhs.swap(i, i + 1);
            }
            rhs[i + 1] -= self.mult[i] * rhs[i];
        }
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= self.u1[i] * rhs[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * rhs[i + 2];
            }
            rhs[i] = acc / self.u0[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    norm
}

fn residual(t: &SymTridiagonal, mu: f64, psi: &[f64]) -> f64 {
    t.apply(psi)
        .iter()
        .zip(psi)
        .map(|(h, p)| (h - mu * p).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Inverse iteration at shift `mu` from a pseudo-random start drawn from `start`.
pub fn eigenvector(t: &SymTridiagonal, mu: f64, start: &Stream) -> Result<EigenPair> {
    let n = t.dim();
    let lu = ShiftedLu::new(t, mu);
    let mut rng = start.rng();
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    normalize(&mut x);
    let target = RESIDUAL_TARGET * t.norm_bound().max(1.0);
    let mut res = f64::INFINITY;
    for it in 0..MAX_INVERSE_ITERATIONS {
        lu.solve(&mut x);
        let norm = normalize(&mut x);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Numerical {
                context: "inverse iteration",
                detail: format!("degenerate solve at iteration {it}"),
                step: Some(it),
                residual: Some(res),
            });
        }
        res = residual(t, mu, &x);
        // one polishing sweep after the target is met
        if res <= target && it >= 1 {
            break;
        }
    }
    if !(res <= target) {
        return Err(Error::Numerical {
            context: "inverse iteration",
            detail: format!("no convergence after {MAX_INVERSE_ITERATIONS} iterations"),
            step: Some(MAX_INVERSE_ITERATIONS),
            residual: Some(res),
        });
    }
    let imax = x
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if x[imax] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(EigenPair { mu, psi: x, residual: res })
}

/// Two-sided bound `2/((n+1) t^2) < psi_l^2 + psi_{l+1}^2 < 2 t^2/(n+1)` for
/// every `l` in `0..=n`, with `psi_{n+1} = 0`.
pub fn eigenvector_envelope_check(pair: &EigenPair, t: f64) -> bool {
    let sites = pair.psi.len() as f64;
    let lower = 2.0 / (sites * t * t);
    let upper = 2.0 * t * t / sites;
    (0..pair.psi.len()).all(|l| {
        let next = pair.psi.get(l + 1).copied().unwrap_or(0.0);
        let s = pair.psi[l].powi(2) + next * next;
        lower < s && s < upper
    })
}

/// Monte-Carlo estimates of `E[N_n(E)]` and `E[N_n(E)^{3/2}]` for the window
/// of radius `spec.window_radius` around `spec.energy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountStatistic {
    pub replicas: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub mean_three_halves: f64,
    pub three_halves_se: f64,
}

pub fn window_count(t: &SymTridiagonal, spec: &ModelSpec, rho: f64) -> usize {
    let scale = rho * spec.n as f64;
    let lo = spec.energy - spec.window_radius / scale;
    let hi = spec.energy + spec.window_radius / scale;
    sturm_count_unchecked(t, hi) - sturm_count_unchecked(t, lo)
}

pub fn count_statistic(spec: &ModelSpec, replicas: usize) -> Result<CountStatistic> {
    if replicas < 100 {
        return Err(Error::Argument(format!(
            "count statistic needs at least 100 replicas, got {replicas}"
        )));
    }
    spec.validate()?;
    let rho = model::rho(spec.energy)?;
    let (mut m1, mut m2) = (Moments::default(), Moments::default());
    for r in 0..replicas as u64 {
        let omega = sample_disorder(spec, &Stream::for_replica(spec.seed, r, Purpose::Disorder));
        let h = build_hamiltonian(spec, &omega)?;
        let c = window_count(&h, spec, rho) as f64;
        m1.push(c);
        m2.push(c.powf(1.5));
    }
    Ok(CountStatistic {
        replicas,
        mean: m1.mean(),
        mean_se: m1.se(),
        mean_three_halves: m2.mean(),
        three_halves_se: m2.se(),
    })
}
