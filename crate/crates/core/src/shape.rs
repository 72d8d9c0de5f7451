//! Eigenfunction shape measures `n |psi(floor(n t))|^2 dt` on `[0, 1]`.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{eigenvalues_in_window, eigenvector, kth_eigenvalue, EigenPair, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::model::{self, build_hamiltonian, sample_disorder, ModelSpec, SymTridiagonal};
use crate::rng::{Purpose, Stream};
use crate::stats::{ks_two_sample, KsResult};

pub const DEFAULT_CELLS: usize = 256;
pub const MIN_ENSEMBLE: usize = 500;

/// Piecewise-constant probability density on `m` equal cells of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeMeasure {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub center_mean: f64,
    pub center_argmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    CenterMean,
    CenterArgmax,
    Entropy,
}

impl ShapeMeasure {
    /// From non-negative cell masses; normalizes them. `center_mean` defaults
    /// to the cell-midpoint rule when not supplied.
    pub fn from_masses(masses: &[f64], center_mean: Option<f64>) -> Result<Self> {
        let m = masses.len();
        let total: f64 = masses.iter().sum();
        if m == 0 || !(total > 0.0 && total.is_finite()) || masses.iter().any(|&x| x < 0.0) {
            return Err(Error::numerical("shape measure", "masses must be non-negative with positive sum"));
        }
        let grid: Vec<f64> = (0..=m).map(|j| j as f64 / m as f64).collect();
        let density: Vec<f64> = masses.iter().map(|x| x / total * m as f64).collect();
        let jmax = density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, _)| j)
            .unwrap_or(0);
        let mid = |j: usize| (j as f64 + 0.5) / m as f64;
        let cm = center_mean.unwrap_or_else(|| masses.iter().enumerate().map(|(j, x)| x / total * mid(j)).sum());
        Ok(ShapeMeasure {
            grid,
            density,
            center_mean: cm.clamp(0.0, 1.0),
            center_argmax: mid(jmax),
        })
    }

    pub fn cells(&self) -> usize {
        self.density.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.density.iter().zip(self.grid.windows(2)).map(|(d, w)| d * (w[1] - w[0])).sum()
    }

    /// Differential entropy `-int f ln f`.
    pub fn entropy(&self) -> f64 {
        -self
            .density
            .iter()
            .zip(self.grid.windows(2))
            .filter(|(d, _)| **d > 0.0)
            .map(|(d, w)| d * d.ln() * (w[1] - w[0]))
            .sum::<f64>()
    }

    pub fn functional(&self, f: Functional) -> f64 {
        match f {
            Functional::CenterMean => self.center_mean,
            Functional::CenterArgmax => self.center_argmax,
            Functional::Entropy => self.entropy(),
        }
    }

    /// `sup_x |F(x) - x|`; attained at a cell edge for a piecewise-linear CDF.
    pub fn cdf_sup_distance_uniform(&self) -> f64 {
        let mut f = 0.0;
        let mut worst = 0.0f64;
        for (d, w) in self.density.iter().zip(self.grid.windows(2)) {
            f += d * (w[1] - w[0]);
            worst = worst.max((f - w[1]).abs());
        }
        worst
    }
}

/// Site `l` of an `N`-site vector carries mass `psi_l^2` spread over
/// `[l/N, (l+1)/N)`; returns the masses of `m` equal cells and the exact mean.
pub fn bin_sites(psi: &[f64], m: usize) -> (Vec<f64>, f64) {
    let sites = psi.len();
    let mut out = vec![0.0; m];
    let mut mean = 0.0;
    let norm: f64 = psi.iter().map(|x| x * x).sum();
    for (l, x) in psi.iter().enumerate() {
        let w = x * x / norm;
        mean += w * (l as f64 + 0.5) / sites as f64;
        // site interval in units of cells: [l m / N, (l+1) m / N)
        let a = l as f64 * m as f64 / sites as f64;
        let b = (l + 1) as f64 * m as f64 / sites as f64;
        let mut j = a.floor() as usize;
        while j < m && (j as f64) < b {
            let overlap = b.min(j as f64 + 1.0) - a.max(j as f64);
            if overlap > 0.0 {
                out[j] += w * overlap / (b - a);
            }
            j += 1;
        }
    }
    (out, mean)
}

/// Uniform index in `0..=n`.
pub fn choose_index(n: usize, stream: &Stream) -> usize {
    stream.rng().random_range(0..=n)
}

fn eigenpair_with_retry(h: &SymTridiagonal, mu: f64, start: Stream) -> Result<EigenPair> {
    eigenvector(h, mu, &start).or_else(|_| eigenvector(h, mu, &start.with_sub(1)))
}

fn purpose(stream: &Stream, p: Purpose) -> Stream {
    Stream { purpose: p, ..*stream }
}

/// Shape of the eigenvector of a uniformly chosen eigenvalue among all `n + 1`.
pub fn empirical_shape(spec: &ModelSpec, stream: &Stream, cells: usize) -> Result<(f64, ShapeMeasure)> {
    spec.validate()?;
    let omega = sample_disorder(spec, &purpose(stream, Purpose::Disorder));
    let h = build_hamiltonian(spec, &omega)?;
    let k = choose_index(spec.n, &purpose(stream, Purpose::Choice));
    let mu = kth_eigenvalue(&h, k)?;
    let pair = eigenpair_with_retry(&h, mu, purpose(stream, Purpose::StartVector))?;
    let (masses, mean) = bin_sites(&pair.psi, cells);
    Ok((mu, ShapeMeasure::from_masses(&masses, Some(mean))?))
}

/// Fixed-energy variant: `mu` uniform among the eigenvalues within the
/// microscopic window of radius `spec.window_radius` around `spec.energy`.
pub fn empirical_shape_fixed_energy(spec: &ModelSpec, stream: &Stream, cells: usize) -> Result<(f64, ShapeMeasure)> {
    spec.validate()?;
    let rho = model::rho(spec.energy)?;
    let omega = sample_disorder(spec, &purpose(stream, Purpose::Disorder));
    let h = build_hamiltonian(spec, &omega)?;
    let w = eigenvalues_in_window(&h, spec.energy, spec.window_radius, rho, DEFAULT_TOL)?;
    if w.count == 0 {
        return Err(Error::numerical("fixed-energy shape", "no eigenvalue in the window"));
    }
    let mu = w.eigenvalues[choose_index(w.count - 1, &purpose(stream, Purpose::Choice))];
    let pair = eigenpair_with_retry(&h, mu, purpose(stream, Purpose::StartVector))?;
    let (masses, mean) = bin_sites(&pair.psi, cells);
    Ok((mu, ShapeMeasure::from_masses(&masses, Some(mean))?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeSamplerParams {
    pub sigma_rho: f64,
    pub eta: f64,
    pub cells: usize,
    /// Localization centre; drawn uniformly when absent.
    pub u: Option<f64>,
    /// Replace the Brownian motion by 0 (deterministic tent).
    #[serde(default)]
    pub zero_noise: bool,
}

impl ShapeSamplerParams {
    pub fn new(sigma_rho: f64, eta: f64) -> Self {
        ShapeSamplerParams { sigma_rho, eta, cells: DEFAULT_CELLS, u: None, zero_noise: false }
    }

    /// `a(t) = (s^2 / 4 eta) ((1 - U)^(2 eta) - (1 - t)^(2 eta))`.
    pub fn argument(&self, u: f64, t: f64) -> f64 {
        let c = self.sigma_rho * self.sigma_rho / (4.0 * self.eta);
        c * ((1.0 - u).powf(2.0 * self.eta) - (1.0 - t).powf(2.0 * self.eta))
    }

    fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if !(self.sigma_rho > 0.0 && self.sigma_rho.is_finite()) {
            v.push(format!("sigma_rho: {} must be positive", self.sigma_rho));
        }
        if !(self.eta > 0.0 && self.eta <= 0.5) {
            v.push(format!("eta: {} outside (0, 1/2]", self.eta));
        }
        if self.cells == 0 {
            v.push("cells: must be positive".into());
        }
        if let Some(u) = self.u {
            if !(0.0..=1.0).contains(&u) {
                v.push(format!("u: {u} outside [0, 1]"));
            }
        }
        if v.is_empty() { Ok(()) } else { Err(Error::Config(v)) }
    }
}

/// Density proportional to `exp(scale Z(b(t)) - coeff |b(t)|)` for a two-sided
/// standard Brownian motion `Z` and an increasing argument `b` with `b(u) = 0`.
fn tent_shape<R: Rng + ?Sized, F: Fn(f64) -> f64>(
    cells: usize,
    u: f64,
    arg: F,
    scale: f64,
    coeff: f64,
    zero_noise: bool,
    rng: &mut R,
) -> Result<ShapeMeasure> {
    // nodes: cell edges plus the apex u
    let mut nodes: Vec<f64> = (0..=cells).map(|j| j as f64 / cells as f64).collect();
    let apex = nodes.partition_point(|&t| t < u);
    let apex_is_edge = apex < nodes.len() && nodes[apex] == u;
    if !apex_is_edge {
        nodes.insert(apex, u);
    }
    let b: Vec<f64> = nodes.iter().map(|&t| if t == u { 0.0 } else { arg(t) }).collect();
    let mut z = vec![0.0; nodes.len()];
    let mut step = |from: usize, to: usize, z: &mut Vec<f64>| {
        let var = (b[to] - b[from]).abs();
        let g: f64 = if zero_noise { 0.0 } else { rng.sample(StandardNormal) };
        z[to] = z[from] + var.sqrt() * g;
    };
    for j in apex + 1..nodes.len() {
        step(j - 1, j, &mut z);
    }
    for j in (0..apex).rev() {
        step(j + 1, j, &mut z);
    }
    let g: Vec<f64> = z.iter().zip(&b).map(|(z, b)| scale * z - coeff * b.abs()).collect();
    let gmax = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = g.iter().map(|x| (x - gmax).exp()).collect();
    let mut masses = vec![0.0; cells];
    let mut moment = 0.0;
    for i in 0..nodes.len() - 1 {
        let (t0, t1) = (nodes[i], nodes[i + 1]);
        let piece = 0.5 * (w[i] + w[i + 1]) * (t1 - t0);
        // exact first moment of the linear interpolant on [t0, t1]
        moment += (t1 - t0) * (w[i] * (2.0 * t0 + t1) + w[i + 1] * (t0 + 2.0 * t1)) / 6.0;
        let cell = ((0.5 * (t0 + t1)) * cells as f64).floor() as usize;
        masses[cell.min(cells - 1)] += piece;
    }
    let total: f64 = masses.iter().sum();
    ShapeMeasure::from_masses(&masses, Some(moment / total))
}

pub fn theoretical_shape(params: &ShapeSamplerParams, stream: &Stream) -> Result<ShapeMeasure> {
    params.validate()?;
    let u = params
        .u
        .unwrap_or_else(|| purpose(stream, Purpose::Localization).rng().random::<f64>());
    let mut rng = purpose(stream, Purpose::ShapeNoise).rng();
    tent_shape(params.cells, u, |t| params.argument(u, t), 1.0, 0.5, params.zero_noise, &mut rng)
}

/// The `eta = 1/2`, `sigma rho = 1` law written as `Z(t - U) / sqrt2 - |t - U| / 4`.
pub fn brownian_tent_shape(cells: usize, stream: &Stream) -> Result<ShapeMeasure> {
    if cells == 0 {
        return Err(Error::Argument("cells must be positive".into()));
    }
    let u = purpose(stream, Purpose::Localization).rng().random::<f64>();
    let mut rng = purpose(stream, Purpose::ShapeNoise).rng();
    tent_shape(cells, u, |t| t - u, FRAC_1_SQRT_2, 0.25, false, &mut rng)
}

/// Energy drawn from the arcsine law, then the theoretical shape at `sigma rho(E)`.
pub fn theoretical_shape_arcsine(sigma: f64, eta: f64, cells: usize, stream: &Stream) -> Result<(f64, ShapeMeasure)> {
    let e = model::sample_arcsine_energy(&mut purpose(stream, Purpose::Energy).rng());
    let params = ShapeSamplerParams { cells, ..ShapeSamplerParams::new(sigma * model::rho(e)?, eta) };
    Ok((e, theoretical_shape(&params, stream)?))
}

pub fn compare_shapes(a: &[ShapeMeasure], b: &[ShapeMeasure], f: Functional) -> Result<KsResult> {
    if a.len() < MIN_ENSEMBLE || b.len() < MIN_ENSEMBLE {
        return Err(Error::Argument(format!(
            "ensembles of {} and {} shapes; need at least {MIN_ENSEMBLE} each",
            a.len(),
            b.len()
        )));
    }
    let xa: Vec<f64> = a.iter().map(|s| s.functional(f)).collect();
    let xb: Vec<f64> = b.iter().map(|s| s.functional(f)).collect();
    Ok(ks_two_sample(&xa, &xb))
}

/// Shape ensemble as CSV: one row per replica, one column per cell.
pub fn write_shape_csv<W: std::io::Write>(shapes: &[ShapeMeasure], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in shapes {
        w.serialize(&s.density).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}
