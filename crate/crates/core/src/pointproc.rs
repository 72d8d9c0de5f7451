//! Point processes from both engines and their shift-invariant statistics.
//!
//! The continuum process at phase `phi` is `{lambda : theta^lambda(v_end) in 2 pi Z + phi}`.
//! Since `lambda -> theta^lambda(v_end)` is increasing on a common noise path,
//! the number of points in `[a, b]` is the number of levels between
//! `theta^a(v_end)` and `theta^b(v_end)`.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::digest::short_digest;
use crate::eigensolve::{eigenvalues_in_window, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::model::{self, build_hamiltonian, sample_disorder, ModelSpec};
use crate::rng::Stream;
use crate::sde::{NoisePath, PreparedNoise, TimeChange};
use crate::stats::{Estimate, Moments, Proportion};

/// Bracket spacing of the coarse `lambda` scan.
pub const SCAN_STEP: f64 = PI / 2.0;
/// Allowed decrease of the terminal phase between scan points.
pub const MONOTONE_SLACK: f64 = 1e-8;
/// Bisection tolerance as a fraction of the window width.
pub const DEFAULT_TOL_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Sde,
    FiniteN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub points: Vec<f64>,
    pub window: (f64, f64),
    /// Level offset for `sde` samples. Finite-n samples carry an untracked
    /// `n`-dependent phase and store 0.
    pub phase_offset: f64,
    pub source: Source,
    pub replica: u64,
    pub spec_hash: String,
}

impl PointSample {
    /// Number of points in the closed interval `[a, b]`.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        let lo = self.points.partition_point(|&x| x < a);
        let hi = self.points.partition_point(|&x| x <= b);
        hi.saturating_sub(lo)
    }

    pub fn covers(&self, a: f64, b: f64) -> bool {
        self.window.0 <= a && b <= self.window.1
    }

    /// The same points translated by `s`; the window moves with them.
    pub fn shifted(&self, s: f64) -> PointSample {
        PointSample {
            points: self.points.iter().map(|x| x + s).collect(),
            window: (self.window.0 + s, self.window.1 + s),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseChoice {
    Fixed(f64),
    /// Uniform on `[0, 2 pi)`, drawn from the stream.
    Uniform(Stream),
}

impl PhaseChoice {
    pub fn resolve(&self) -> f64 {
        match self {
            PhaseChoice::Fixed(p) => p.rem_euclid(TAU),
            PhaseChoice::Uniform(s) => TAU * s.rng().random::<f64>(),
        }
    }
}

/// `#{k : lo <= 2 pi k + phase <= hi}`.
pub fn levels_between(lo: f64, hi: f64, phase: f64) -> i64 {
    if hi < lo {
        return 0;
    }
    let first = ((lo - phase) / TAU).ceil() as i64;
    let last = ((hi - phase) / TAU).floor() as i64;
    (last - first + 1).max(0)
}

/// Number of continuum points in `[a, b]` from two terminal phases.
pub fn count_interval(prep: &PreparedNoise, a: f64, b: f64, phase: f64) -> Result<i64> {
    let ta = prep.terminal(a)?.theta;
    let tb = prep.terminal(b)?.theta;
    if tb < ta - MONOTONE_SLACK {
        return Err(Error::Integrity(format!(
            "terminal phase decreased from {ta} to {tb} between lambda {a} and {b}"
        )));
    }
    Ok(levels_between(ta, tb, phase))
}

pub fn sample_eta_sch(
    tc: &TimeChange,
    noise: &NoisePath,
    window: (f64, f64),
    phase: PhaseChoice,
    tol: f64,
) -> Result<PointSample> {
    let prep = PreparedNoise::new(tc, noise)?;
    let mut s = sample_eta_sch_prepared(&prep, window, phase.resolve(), tol)?;
    s.spec_hash = short_digest(tc)?;
    Ok(s)
}

/// All solutions of `theta^lambda(v_end) = 2 pi k + phase` in the window.
pub fn sample_eta_sch_prepared(
    prep: &PreparedNoise,
    window: (f64, f64),
    phase: f64,
    tol: f64,
) -> Result<PointSample> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Argument(format!("bad window [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    let mut sample = PointSample {
        points: Vec::new(),
        window,
        phase_offset: phase,
        source: Source::Sde,
        replica: 0,
        spec_hash: String::new(),
    };
    if lo == hi {
        return Ok(sample);
    }
    let steps = ((hi - lo) / SCAN_STEP).ceil().max(1.0) as usize;
    let nodes: Vec<f64> = (0..=steps)
        .map(|i| if i == steps { hi } else { lo + (hi - lo) * i as f64 / steps as f64 })
        .collect();
    let mut values = Vec::with_capacity(nodes.len());
    for &x in &nodes {
        values.push(prep.terminal(x)?);
    }
    for i in 0..steps {
        let (ta, tb) = (values[i].theta, values[i + 1].theta);
        if tb < ta - MONOTONE_SLACK {
            return Err(Error::Integrity(format!(
                "terminal phase not monotone on [{}, {}]: {ta} > {tb}",
                nodes[i], nodes[i + 1]
            )));
        }
        // levels in (ta, tb], plus ta itself on the first bracket
        let first = if i == 0 {
            ((ta - phase) / TAU).ceil() as i64
        } else {
            ((ta - phase) / TAU).floor() as i64 + 1
        };
        let last = ((tb - phase) / TAU).floor() as i64;
        for k in first..=last {
            let level = TAU * k as f64 + phase;
            sample.points.push(solve_level(prep, nodes[i], nodes[i + 1], &values[i], &values[i + 1], level, tol)?);
        }
    }
    Ok(sample)
}

fn solve_level(
    prep: &PreparedNoise,
    mut a: f64,
    mut b: f64,
    fa: &crate::sde::Terminal,
    fb: &crate::sde::Terminal,
    level: f64,
    tol: f64,
) -> Result<f64> {
    if fa.theta == level {
        return Ok(a);
    }
    if fb.theta == level {
        return Ok(b);
    }
    let span = fb.theta - fa.theta;
    let mut x = if span > 0.0 { a + (b - a) * (level - fa.theta) / span } else { 0.5 * (a + b) };
    for _ in 0..200 {
        let f = prep.terminal(x)?;
        let g = f.theta - level;
        if g.abs() <= 1e-12 * level.abs().max(1.0) {
            return Ok(x);
        }
        if g < 0.0 {
            a = x;
        } else {
            b = x;
        }
        if b - a <= tol {
            return Ok(0.5 * (a + b));
        }
        let newton = x - g / f.phi;
        x = if f.phi > 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
    }
    Err(Error::numerical("level solve", format!("no convergence in [{a}, {b}]")))
}

/// Rescaled eigenvalues `rho n (mu - E)` of one disorder draw, window `spec.window_radius`.
pub fn finite_n_points(spec: &ModelSpec, stream: &Stream) -> Result<PointSample> {
    spec.validate()?;
    let rho = model::rho(spec.energy)?;
    let omega = sample_disorder(spec, stream);
    let h = build_hamiltonian(spec, &omega)?;
    let w = eigenvalues_in_window(&h, spec.energy, spec.window_radius, rho, DEFAULT_TOL)?;
    Ok(PointSample {
        points: w.rescaled,
        window: (-spec.window_radius, spec.window_radius),
        phase_offset: 0.0,
        source: Source::FiniteN,
        replica: stream.id,
        spec_hash: short_digest(spec)?,
    })
}

/// Fraction of samples with no point in `[0, lambda]`.
pub fn gap_probability(samples: &[PointSample], lambda: f64) -> Result<Estimate> {
    if samples.len() < 100 {
        return Err(Error::Argument(format!("need at least 100 samples, got {}", samples.len())));
    }
    if let Some(s) = samples.iter().find(|s| !s.covers(0.0, lambda)) {
        return Err(Error::Argument(format!(
            "window {:?} does not contain [0, {lambda}]",
            s.window
        )));
    }
    Ok(Proportion::from_flags(samples.iter().map(|s| s.count_in(0.0, lambda) == 0)).estimate())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RareEstimate {
    pub p: f64,
    pub se: f64,
    /// One-sided 95% Clopper-Pearson upper bound, reported when no event was seen.
    pub upper95: Option<f64>,
}

/// Fraction of samples with at least two points in `[0, eps]`.
pub fn repulsion_probability(samples: &[PointSample], eps: f64) -> Result<RareEstimate> {
    if samples.len() < 1000 {
        return Err(Error::Argument(format!("need at least 1000 samples, got {}", samples.len())));
    }
    let prop = Proportion::from_flags(samples.iter().map(|s| s.count_in(0.0, eps) >= 2));
    Ok(RareEstimate {
        p: prop.p(),
        se: prop.se(),
        upper95: prop.zero_event_upper_bound(0.95),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingMoments {
    pub lambda: f64,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
}

/// Moments of `N[0, lambda] - lambda / 2 pi`.
pub fn counting_fluctuation(samples: &[PointSample], lambda: f64) -> Result<CountingMoments> {
    if samples.len() < 1000 {
        return Err(Error::Argument(format!("need at least 1000 samples, got {}", samples.len())));
    }
    let centred: Vec<f64> = samples
        .iter()
        .map(|s| s.count_in(0.0, lambda) as f64 - lambda / TAU)
        .collect();
    Ok(moments_of(lambda, &centred))
}

pub fn moments_of(lambda: f64, xs: &[f64]) -> CountingMoments {
    let m = Moments::from_slice(xs);
    CountingMoments {
        lambda,
        mean: m.mean(),
        mean_se: m.se(),
        variance: m.variance(),
        variance_se: m.variance_se(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub lambda_values: Vec<f64>,
    pub gap_prob: Vec<Estimate>,
    pub repulsion_eps: Vec<f64>,
    pub repulsion_prob: Vec<RareEstimate>,
    pub counting: Vec<CountingMoments>,
    /// `1 + sigma^2 rho^2 / (2 eta)`, reported with the repulsion estimates.
    pub d_one: f64,
}

pub fn gap_stats(
    samples: &[PointSample],
    tc: &TimeChange,
    lambdas: &[f64],
    eps: &[f64],
) -> Result<GapStats> {
    Ok(GapStats {
        lambda_values: lambdas.to_vec(),
        gap_prob: lambdas.iter().map(|&l| gap_probability(samples, l)).collect::<Result<_>>()?,
        repulsion_eps: eps.to_vec(),
        repulsion_prob: eps.iter().map(|&e| repulsion_probability(samples, e)).collect::<Result<_>>()?,
        counting: lambdas.iter().map(|&l| counting_fluctuation(samples, l)).collect::<Result<_>>()?,
        d_one: d_one(tc),
    })
}

/// Default tilt of [`gap_weight_tilted`].
pub const GAP_TILT: f64 = 0.7;

/// One unbiased draw of the uniform-phase gap probability `P(N[0, lambda] = 0)`.
///
/// Given the relative phase `alpha` at `v_end`, a uniform phase leaves
/// `[0, lambda]` empty with probability `max(0, 1 - alpha / 2 pi)`. The alpha
/// equation is integrated under the tilted driver `d beta = d beta~ + h dv`,
/// `h = -kappa lambda t' sin(alpha/2) / 2`, which holds alpha near
/// `2 arcsin(kappa^{-1/2})`; the draw carries the likelihood ratio
/// `exp(-sum h d beta~ - sum h^2 dv / 2)`. `kappa = 0` is plain Monte Carlo.
pub fn gap_weight_tilted(tc: &TimeChange, noise: &NoisePath, lambda: f64, kappa: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite() && kappa >= 0.0) {
        return Err(Error::Argument(format!("lambda = {lambda}, kappa = {kappa}")));
    }
    let (mut alpha, mut log_w) = (0.0f64, 0.0f64);
    for j in 0..noise.steps() {
        let dv = noise.v[j + 1] - noise.v[j];
        let tp = tc.tprime(noise.v[j]);
        let s = (0.5 * alpha).sin();
        let h = -0.5 * kappa * lambda * tp * s;
        let db = noise.db[j];
        alpha += lambda * tp * dv + 2.0 * s * (db + h * dv);
        log_w -= h * db + 0.5 * h * h * dv;
    }
    if !(alpha.is_finite() && log_w.is_finite()) {
        return Err(Error::non_finite("tilted gap weight", noise.steps()));
    }
    Ok(log_w.exp() * (1.0 - alpha / TAU).max(0.0))
}

/// `V_eta = int_0^1 s^2 / (1 - t)^(1 - 2 eta) dt = s^2 / (2 eta)`.
pub fn v_eta(tc: &TimeChange) -> f64 {
    tc.sigma_rho * tc.sigma_rho / (2.0 * tc.eta)
}

pub fn d_one(tc: &TimeChange) -> f64 {
    1.0 + v_eta(tc)
}

/// One draw of `floor((xi0 + xi2 + theta) / 2 pi) - floor((xi0 + xi1) / 2 pi)`
/// with independent centred normals of variances `V, V/2, V/2`.
pub fn floor_difference_draw<R: Rng + ?Sized>(v: f64, theta: f64, rng: &mut R) -> i64 {
    let z: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
    let x0 = v.sqrt() * z[0];
    let x1 = (v / 2.0).sqrt() * z[1];
    let x2 = (v / 2.0).sqrt() * z[2];
    ((x0 + x2 + theta) / TAU).floor() as i64 - ((x0 + x1) / TAU).floor() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Purpose;
    use crate::sde::{make_grid, sample_noise, GridMode};
    use crate::stats::total_variation;

    fn prep(tc: &TimeChange, k: usize, seed: u64, r: u64) -> PreparedNoise {
        let g = make_grid(tc, k, GridMode::UniformV).unwrap();
        let n = sample_noise(&g, &Stream::for_replica(seed, r, Purpose::Noise)).unwrap();
        PreparedNoise::new(tc, &n).unwrap()
    }

    #[test]
    fn level_counting() {
        assert_eq!(levels_between(0.0, TAU, 0.0), 2);
        assert_eq!(levels_between(0.1, TAU - 0.1, 0.0), 0);
        assert_eq!(levels_between(-1.0, 1.0, 0.5), 1);
        assert_eq!(levels_between(3.0, 2.0, 0.0), 0);
        assert_eq!(levels_between(-20.0, 20.0, 1.0), 7);
    }

    #[test]
    fn empty_window_and_errors() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let p = prep(&tc, 256, 1, 0);
        assert!(sample_eta_sch_prepared(&p, (2.0, 2.0), 0.0, 1e-8).unwrap().points.is_empty());
        assert!(sample_eta_sch_prepared(&p, (2.0, 1.0), 0.0, 1e-8).is_err());
        assert!(sample_eta_sch_prepared(&p, (0.0, 1.0), 0.0, 0.0).is_err());
    }

    #[test]
    fn sampler_points_hit_levels_and_advance_by_two_pi() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        for r in 0..40 {
            let p = prep(&tc, 1024, 3, r);
            let phase = PhaseChoice::Uniform(Stream::for_replica(3, r, Purpose::Phase)).resolve();
            let s = sample_eta_sch_prepared(&p, (-30.0, 30.0), phase, 60.0 * DEFAULT_TOL_FRACTION).unwrap();
            assert!(s.points.windows(2).all(|w| w[1] > w[0]));
            assert!(s.points.iter().all(|&x| (-30.0..=30.0).contains(&x)));
            let thetas: Vec<f64> = s.points.iter().map(|&x| p.terminal(x).unwrap().theta).collect();
            for th in &thetas {
                let k = ((th - phase) / TAU).round();
                assert!((th - phase - TAU * k).abs() < 1e-6);
            }
            for w in thetas.windows(2) {
                assert!((w[1] - w[0] - TAU).abs() < 1e-5);
            }
            // completeness against level counting
            let n = count_interval(&p, -30.0, 30.0, phase).unwrap();
            assert_eq!(n as usize, s.points.len());
            for &(a, b) in &[(0.0, 10.0), (-7.0, 3.0)] {
                assert_eq!(count_interval(&p, a, b, phase).unwrap() as usize, s.count_in(a, b));
            }
        }
    }

    #[test]
    fn alpha_count_is_close_in_law() {
        // independent drivers: compare the laws through the quantile coupling
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let g = make_grid(&tc, 512, GridMode::UniformV).unwrap();
        let lambda = 10.0 * PI;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for r in 0..400 {
            let n = sample_noise(&g, &Stream::for_replica(5, r, Purpose::Noise)).unwrap();
            let p = PreparedNoise::new(&tc, &n).unwrap();
            let phase = PhaseChoice::Uniform(Stream::for_replica(5, r, Purpose::Phase)).resolve();
            a.push(count_interval(&p, 0.0, lambda, phase).unwrap());
            let nb = sample_noise(&g, &Stream::for_replica(5, r, Purpose::AlphaNoise)).unwrap();
            b.push(crate::sde::count_via_alpha(&tc, &nb, lambda).unwrap());
        }
        a.sort();
        b.sort();
        let far = a.iter().zip(&b).filter(|(x, y)| (*x - *y).abs() > 1).count();
        assert!(far <= 4, "{far}");
    }

    #[test]
    fn finite_n_free_points_are_deterministic() {
        let spec = ModelSpec::critical(300, 0.0, 0.3, 1.0).with_window(15.0);
        let a = finite_n_points(&spec, &Stream::new(1, Purpose::Disorder)).unwrap();
        let b = finite_n_points(&spec, &Stream::new(2, Purpose::Disorder)).unwrap();
        assert_eq!(a.points, b.points);
        let rho = model::rho(1.0).unwrap();
        let free: Vec<f64> = (1..=301)
            .map(|k| rho * 300.0 * (2.0 * (k as f64 * PI / 302.0).cos() - 1.0))
            .filter(|x| x.abs() <= 15.0)
            .rev()
            .collect();
        assert_eq!(a.points.len(), free.len());
        for (x, y) in a.points.iter().zip(&free) {
            assert!((x - y).abs() < 1e-5);
        }
    }

    #[test]
    fn finite_n_mean_spacing() {
        let spec = ModelSpec::critical(2000, 0.5, 0.3, 1.0).with_window(20.0 * PI);
        let mut spacing = Moments::default();
        for r in 0..30 {
            let s = finite_n_points(&spec, &Stream::for_replica(0, r, Purpose::Disorder)).unwrap();
            let p = &s.points;
            spacing.push((p[p.len() - 1] - p[0]) / (p.len() - 1) as f64);
        }
        assert!((spacing.mean() - TAU).abs() < 0.05 * TAU, "{}", spacing.mean());
    }

    fn fake(points: Vec<f64>) -> PointSample {
        PointSample {
            points,
            window: (-10.0, 10.0),
            phase_offset: 0.0,
            source: Source::Sde,
            replica: 0,
            spec_hash: String::new(),
        }
    }

    #[test]
    fn statistic_examples() {
        let samples: Vec<PointSample> = (0..1000)
            .map(|i| fake(if i % 4 == 0 { vec![0.01, 0.05, 3.0] } else { vec![2.0] }))
            .collect();
        assert_eq!(gap_probability(&samples, 0.0).unwrap().value, 1.0);
        assert!((gap_probability(&samples, 1.0).unwrap().value - 0.75).abs() < 1e-12);
        assert!(gap_probability(&samples, 11.0).is_err());
        assert!(gap_probability(&samples[..50], 1.0).is_err());
        let small = repulsion_probability(&samples, 0.03).unwrap();
        let large = repulsion_probability(&samples, 0.2).unwrap();
        assert_eq!(small.p, 0.0);
        assert!(small.upper95.unwrap() > 0.0 && small.upper95.unwrap() < 0.004);
        assert!((large.p - 0.25).abs() < 1e-12 && large.upper95.is_none());
        // eps covering the window gives P(N >= 2)
        assert_eq!(repulsion_probability(&samples, 10.0).unwrap().p, 0.25);
        let c = counting_fluctuation(&samples, 4.0).unwrap();
        assert!((c.mean - (0.25 * 3.0 + 0.75 - 4.0 / TAU)).abs() < 1e-12);
    }

    #[test]
    fn v_eta_examples() {
        let tc = TimeChange::new(1.0, 0.5).unwrap();
        assert_eq!(v_eta(&tc), 1.0);
        assert_eq!(d_one(&tc), 2.0);
    }

    #[test]
    fn sde_gap_and_count_examples() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let mut samples = Vec::new();
        for r in 0..1000 {
            let p = prep(&tc, 512, 61, r);
            let phase = PhaseChoice::Uniform(Stream::for_replica(61, r, Purpose::Phase)).resolve();
            samples.push(sample_eta_sch_prepared(&p, (0.0, 4.0 * PI), phase, 1e-6).unwrap());
        }
        let g1 = gap_probability(&samples, PI).unwrap();
        let g2 = gap_probability(&samples, 2.0 * PI).unwrap();
        assert!(g1.value > g2.value);
        let r1 = repulsion_probability(&samples, 0.05).unwrap();
        let r2 = repulsion_probability(&samples, 0.2).unwrap();
        assert!(r1.p <= r2.p);
        assert!(repulsion_probability(&samples, 0.1).unwrap().p <= 0.01);
    }

    #[test]
    fn half_eta_floor_difference_law() {
        let tc = TimeChange::new(1.0, 0.5).unwrap();
        let k = 10;
        let lambda = TAU * k as f64;
        let reps = 10_000;
        let mut sde = Vec::with_capacity(reps);
        let mut law = Vec::with_capacity(reps);
        let mut rng = Stream::new(71, Purpose::Localization).rng();
        for r in 0..reps as u64 {
            let p = prep(&tc, 512, 71, r);
            sde.push(count_interval(&p, 0.0, lambda, 0.0).unwrap() - k as i64);
            law.push(floor_difference_draw(v_eta(&tc), 0.0, &mut rng));
        }
        let tv = total_variation(&sde, &law);
        assert!(tv <= 0.05, "{tv}");
    }

    #[test]
    fn tilted_gap_estimator_agrees_with_plain_counts() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let g = crate::sde::make_grid(&tc, 512, crate::sde::GridMode::UniformV).unwrap();
        let lambda = 2.0 * PI;
        let (mut plain, mut tilted, mut rb) = (Moments::default(), Moments::default(), Moments::default());
        for r in 0..4000 {
            let p = prep(&tc, 512, 81, r);
            let phase = PhaseChoice::Uniform(Stream::for_replica(81, r, Purpose::Phase)).resolve();
            plain.push((count_interval(&p, 0.0, lambda, phase).unwrap() == 0) as u8 as f64);
            let n = sample_noise(&g, &Stream::for_replica(81, r, Purpose::AlphaNoise)).unwrap();
            tilted.push(gap_weight_tilted(&tc, &n, lambda, GAP_TILT).unwrap());
            rb.push(gap_weight_tilted(&tc, &n, lambda, 0.0).unwrap());
        }
        for m in [&tilted, &rb] {
            assert!((m.mean() - plain.mean()).abs() < 3.0 * m.se().hypot(plain.se()), "{} {}", m.mean(), plain.mean());
        }
        assert!(tilted.se() < plain.se());
    }
}
