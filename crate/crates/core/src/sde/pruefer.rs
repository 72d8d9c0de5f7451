use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{NoisePath, TimeChange};
use crate::error::{Error, Result};

/// Per-step coefficients of the Prüfer system that do not depend on the state.
///
/// With `a = dB2`, `b = dB3` one has `sqrt2 e^{-i theta} dw = (a cos + b sin) + i (b cos - a sin)`.
#[derive(Debug, Clone)]
pub struct PreparedNoise {
    pub tc: TimeChange,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    /// `t'(v_k) dv_k`
    pub drift: Vec<f64>,
    /// `sqrt2 dB_k`
    pub sb: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub theta: f64,
    pub r: f64,
    pub phi: f64,
}

impl PreparedNoise {
    pub fn new(tc: &TimeChange, noise: &NoisePath) -> Result<Self> {
        if noise.v_end() > tc.v_end * (1.0 + 1e-12) {
            return Err(Error::Argument(format!(
                "noise grid ends at {} beyond v_end = {}",
                noise.v_end(),
                tc.v_end
            )));
        }
        let k = noise.steps();
        let dv: Vec<f64> = (0..k).map(|j| noise.v[j + 1] - noise.v[j]).collect();
        Ok(PreparedNoise {
            tc: *tc,
            v: noise.v.clone(),
            drift: (0..k).map(|j| tc.tprime(noise.v[j]) * dv[j]).collect(),
            dv,
            sb: noise.db.iter().map(|x| SQRT_2 * x).collect(),
            a: noise.db2.clone(),
            b: noise.db3.clone(),
        })
    }

    pub fn steps(&self) -> usize {
        self.dv.len()
    }

    #[inline]
    fn step(&self, j: usize, lambda: f64, s: &mut Terminal) {
        let (sn, cs) = s.theta.sin_cos();
        let re = self.a[j] * cs + self.b[j] * sn;
        let im = self.b[j] * cs - self.a[j] * sn;
        s.theta += lambda * self.drift[j] + self.sb[j] + im;
        s.r += 0.5 * self.dv[j] + re;
        s.phi += self.drift[j] - re * s.phi;
    }

    /// `(theta, r, phi)` at the end of the grid; `phi` is the exact
    /// `lambda`-derivative of the discrete `theta`.
    pub fn terminal(&self, lambda: f64) -> Result<Terminal> {
        let mut s = Terminal { theta: 0.0, r: 0.0, phi: 0.0 };
        for j in 0..self.steps() {
            self.step(j, lambda, &mut s);
        }
        if !(s.theta.is_finite() && s.r.is_finite() && s.phi.is_finite()) {
            return Err(Error::non_finite("Prüfer integration", self.steps()));
        }
        Ok(s)
    }

    /// Relative phase `alpha = theta^lambda - theta^0` driven by the
    /// pathwise driver `d beta = -sqrt2 Re(e^{-i alpha/2} e^{-i theta^0} dw)`.
    pub fn alpha_pathwise(&self, lambda: f64) -> Result<Vec<f64>> {
        let k = self.steps();
        let mut out = Vec::with_capacity(k + 1);
        let (mut alpha, mut theta0) = (0.0f64, 0.0f64);
        out.push(alpha);
        for j in 0..k {
            let (sn, cs) = theta0.sin_cos();
            let im0 = self.b[j] * cs - self.a[j] * sn;
            let (sh, ch) = (0.5 * alpha).sin_cos();
            // sqrt2 Re(e^{-i(theta0 + alpha/2)} dw)
            let (s2, c2) = (sn * ch + cs * sh, cs * ch - sn * sh);
            let beta = -(self.a[j] * c2 + self.b[j] * s2);
            alpha += lambda * self.drift[j] + 2.0 * sh * beta;
            theta0 += self.sb[j] + im0;
            out.push(alpha);
        }
        if !alpha.is_finite() {
            return Err(Error::non_finite("alpha integration", k));
        }
        Ok(out)
    }
}

/// Prüfer phases of a family of `lambda` values driven by one noise path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrueferFamilyPath {
    pub lambdas: Vec<f64>,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    /// `theta[i][k]` for `lambdas[i]` at grid point `k`.
    pub theta: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
}

pub fn integrate_pruefer_family(
    tc: &TimeChange,
    noise: &NoisePath,
    lambdas: &[f64],
) -> Result<PrueferFamilyPath> {
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::Argument("lambdas must be finite".into()));
    }
    let prep = PreparedNoise::new(tc, noise)?;
    let k = prep.steps();
    let mut path = PrueferFamilyPath {
        lambdas: lambdas.to_vec(),
        v: noise.v.clone(),
        t: noise.v.iter().map(|&v| tc.t(v)).collect(),
        theta: Vec::with_capacity(lambdas.len()),
        r: Vec::with_capacity(lambdas.len()),
        phi: Vec::with_capacity(lambdas.len()),
    };
    for &lambda in lambdas {
        let mut s = Terminal { theta: 0.0, r: 0.0, phi: 0.0 };
        let (mut th, mut r, mut ph) = (vec![0.0; k + 1], vec![0.0; k + 1], vec![0.0; k + 1]);
        for j in 0..k {
            prep.step(j, lambda, &mut s);
            if !(s.theta.is_finite() && s.r.is_finite() && s.phi.is_finite()) {
                return Err(Error::non_finite("Prüfer integration", j + 1));
            }
            th[j + 1] = s.theta;
            r[j + 1] = s.r;
            ph[j + 1] = s.phi;
        }
        path.theta.push(th);
        path.r.push(r);
        path.phi.push(ph);
    }
    Ok(path)
}

/// `max_k |phi(v_k) - sum_{j<k} e^{r_j - r_k} dt_j|` over all stored `lambda`.
pub fn phi_identity_residual(path: &PrueferFamilyPath) -> f64 {
    let mut worst = 0.0f64;
    for (r, phi) in path.r.iter().zip(&path.phi) {
        let mut sum = 0.0;
        for k in 1..r.len() {
            sum = (r[k - 1] - r[k]).exp() * (sum + (path.t[k] - path.t[k - 1]));
            worst = worst.max((phi[k] - sum).abs());
        }
    }
    worst
}

/// Euler scheme for `d alpha = lambda t'(v) dv + 2 sin(alpha / 2) d beta`,
/// `beta` taken from `noise.db`.
pub fn integrate_alpha(tc: &TimeChange, noise: &NoisePath, lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Argument(format!("lambda = {lambda} must be non-negative")));
    }
    let k = noise.steps();
    let mut out = Vec::with_capacity(k + 1);
    let mut alpha = 0.0f64;
    out.push(alpha);
    for j in 0..k {
        let dv = noise.v[j + 1] - noise.v[j];
        alpha += lambda * tc.tprime(noise.v[j]) * dv + 2.0 * (0.5 * alpha).sin() * noise.db[j];
        if !alpha.is_finite() {
            return Err(Error::non_finite("alpha integration", j + 1));
        }
        out.push(alpha);
    }
    Ok(out)
}

pub fn pathwise_alpha_driver(prep: &PreparedNoise, lambda: f64) -> Result<Vec<f64>> {
    prep.alpha_pathwise(lambda)
}

/// `round(alpha^lambda(v_end) / 2 pi)`.
pub fn count_via_alpha(tc: &TimeChange, noise: &NoisePath, lambda: f64) -> Result<i64> {
    let alpha = integrate_alpha(tc, noise, lambda)?;
    Ok((alpha[alpha.len() - 1] / (2.0 * PI)).round() as i64)
}

/// CSV columns `v,t,theta,r,phi` for one member of the family, every `stride` points.
pub fn write_path_csv<W: Write>(
    path: &PrueferFamilyPath,
    index: usize,
    stride: usize,
    out: W,
) -> Result<()> {
    if index >= path.lambdas.len() || stride == 0 {
        return Err(Error::Argument("bad path index or stride".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["v", "t", "theta", "r", "phi"])
        .map_err(|e| Error::Io(e.into()))?;
    let last = path.v.len() - 1;
    for k in (0..=last).filter(|k| k % stride == 0 || *k == last) {
        w.serialize((path.v[k], path.t[k], path.theta[index][k], path.r[index][k], path.phi[index][k]))
            .map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, Stream};
    use crate::sde::{make_grid, sample_noise, GridMode};
    use crate::stats::{linear_fit, Moments};

    fn noise(tc: &TimeChange, k: usize, seed: u64, r: u64) -> NoisePath {
        let g = make_grid(tc, k, GridMode::UniformV).unwrap();
        sample_noise(&g, &Stream::for_replica(seed, r, Purpose::Noise)).unwrap()
    }

    #[test]
    fn initial_values_and_zero_noise() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let g = make_grid(&tc, 256, GridMode::UniformV).unwrap();
        let z = NoisePath::zero(&g).unwrap();
        let p = integrate_pruefer_family(&tc, &z, &[0.0, 3.0]).unwrap();
        assert_eq!(p.theta[0][0], 0.0);
        assert_eq!(p.r[1][0], 0.0);
        assert_eq!(p.phi[1][0], 0.0);
        assert!(p.theta[0].iter().all(|&x| x == 0.0));
        // without noise theta^lambda(v_end) = lambda * left Riemann sum of t', close to lambda
        assert!((p.theta[1][256] - 3.0).abs() < 0.05);
        assert!((p.r[0][256] - tc.v_end / 2.0).abs() < 1e-12);
    }

    #[test]
    fn moments_match_isometry() {
        for &eta in &[0.3, 0.5] {
            let tc = TimeChange::new(1.0, eta).unwrap();
            let (mut r, mut th) = (Moments::default(), Moments::default());
            for p in 0..4000 {
                let n = noise(&tc, 512, 11, p);
                let t = PreparedNoise::new(&tc, &n).unwrap().terminal(0.0).unwrap();
                r.push(t.r);
                th.push(t.theta);
            }
            assert!((r.mean() - tc.v_end / 2.0).abs() < 3.0 * r.se());
            assert!(th.mean().abs() < 3.0 * th.se());
            assert!((th.variance() - 3.0 * tc.v_end).abs() < 3.0 * th.variance_se());
        }
    }

    #[test]
    fn monotone_coupling_and_phi_positive() {
        let tc = TimeChange::new(1.2, 0.3).unwrap();
        let lambdas: Vec<f64> = (0..8).map(|i| -10.0 + 3.0 * i as f64).collect();
        for p in 0..30 {
            let n = noise(&tc, 1024, 3, p);
            let path = integrate_pruefer_family(&tc, &n, &lambdas).unwrap();
            for i in 1..lambdas.len() {
                for k in 0..=1024 {
                    assert!(path.theta[i][k] >= path.theta[i - 1][k]);
                }
                assert!(path.theta[i][1024] > path.theta[i - 1][1024] + 1e-10);
            }
            for phi in &path.phi {
                assert!(phi.iter().all(|&x| x >= -1e-10));
            }
        }
    }

    #[test]
    fn phi_is_the_lambda_derivative() {
        let tc = TimeChange::new(0.9, 0.35).unwrap();
        let prep = PreparedNoise::new(&tc, &noise(&tc, 1024, 5, 0)).unwrap();
        let h = 1e-5;
        for &l in &[-4.0, 0.0, 7.5] {
            let fd = (prep.terminal(l + h).unwrap().theta - prep.terminal(l - h).unwrap().theta) / (2.0 * h);
            let phi = prep.terminal(l).unwrap().phi;
            assert!((fd - phi).abs() < 1e-6 * phi.max(1.0), "{fd} {phi}");
        }
    }

    #[test]
    fn family_terminal_matches_fast_path() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let n = noise(&tc, 300, 8, 1);
        let path = integrate_pruefer_family(&tc, &n, &[2.5]).unwrap();
        let t = PreparedNoise::new(&tc, &n).unwrap().terminal(2.5).unwrap();
        assert_eq!(path.theta[0][300], t.theta);
        assert_eq!(path.phi[0][300], t.phi);
    }

    #[test]
    fn phi_identity_converges() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let (mut coarse, mut fine) = (Moments::default(), Moments::default());
        for p in 0..40 {
            let n = noise(&tc, 256, 17, p);
            let f = n.refine(4, &Stream::for_replica(17, p, Purpose::Bridge)).unwrap();
            coarse.push(phi_identity_residual(&integrate_pruefer_family(&tc, &n, &[0.0, 5.0]).unwrap()));
            fine.push(phi_identity_residual(&integrate_pruefer_family(&tc, &f, &[0.0, 5.0]).unwrap()));
        }
        assert!(coarse.mean() / fine.mean() >= 1.5, "{} {}", coarse.mean(), fine.mean());
    }

    #[test]
    fn strong_order_half() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let levels = [64usize, 128, 256, 512];
        let fine_k = 16384;
        let mut err = vec![Moments::default(); levels.len()];
        for p in 0..200 {
            let base = noise(&tc, 64, 23, p);
            let reference = base.refine(fine_k / 64, &Stream::for_replica(23, p, Purpose::Bridge)).unwrap();
            let tref = PreparedNoise::new(&tc, &reference).unwrap().terminal(2.0).unwrap().theta;
            for (i, &k) in levels.iter().enumerate() {
                let path = reference.coarsen(fine_k / k).unwrap();
                let th = PreparedNoise::new(&tc, &path).unwrap().terminal(2.0).unwrap().theta;
                err[i].push((th - tref).powi(2));
            }
        }
        let x: Vec<f64> = levels.iter().map(|&k| (tc.v_end / k as f64).ln()).collect();
        let y: Vec<f64> = err.iter().map(|m| 0.5 * m.mean().ln()).collect();
        let fit = linear_fit(&x, &y);
        assert!((0.4..=0.6).contains(&fit.slope), "slope {}", fit.slope);
    }

    #[test]
    fn ito_table() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let k = 64;
        let dv = tc.v_end / k as f64;
        let bins = 4;
        let mut cells = vec![[Moments::default(), Moments::default(), Moments::default()]; bins];
        for p in 0..3000 {
            let path = integrate_pruefer_family(&tc, &noise(&tc, k, 29, p), &[0.0]).unwrap();
            for j in 0..k {
                let dth = path.theta[0][j + 1] - path.theta[0][j];
                let dr = path.r[0][j + 1] - path.r[0][j] - 0.5 * dv;
                let c = &mut cells[j * bins / k];
                c[0].push(dth * dr / dv);
                c[1].push(dth * dth / dv);
                c[2].push(dr * dr / dv);
            }
        }
        for c in &cells {
            assert!(c[0].mean().abs() < 3.0 * c[0].se());
            assert!((c[1].mean() - 3.0).abs() < 3.0 * c[1].se());
            assert!((c[2].mean() - 1.0).abs() < 3.0 * c[2].se());
        }
    }

    #[test]
    fn time_change_agrees_with_t_time_scheme() {
        // Euler in t on a fine grid up to 1 - delta, versus Euler in v on a
        // coarse grid fed with the time-changed increments of the same path.
        let (s, eta, delta, lambda) = (1.0f64, 0.3f64, 1e-3f64, 4.0f64);
        let tc = TimeChange::new(s, eta).unwrap();
        let t_end = 1.0 - delta;
        let (k, sub) = (512usize, 32usize);
        let vg: Vec<f64> = (0..=k).map(|j| tc.v(t_end) * j as f64 / k as f64).collect();
        let mut diffs = Moments::default();
        for p in 0..50 {
            let fine: Vec<f64> = {
                let mut g = vec![0.0];
                for j in 0..k {
                    let (a, b) = (tc.t(vg[j]), if j + 1 == k { t_end } else { tc.t(vg[j + 1]) });
                    for i in 1..=sub {
                        g.push(a + (b - a) * i as f64 / sub as f64);
                    }
                }
                g
            };
            let raw = sample_noise(&fine, &Stream::for_replica(31, p, Purpose::Noise)).unwrap();
            let (mut th, mut cb, mut c2, mut c3) = (0.0f64, vec![0.0; k], vec![0.0; k], vec![0.0; k]);
            for m in 0..fine.len() - 1 {
                let (t0, dt) = (fine[m], fine[m + 1] - fine[m]);
                let g = s * (1.0 - t0).powf(eta - 0.5);
                let (sn, cs) = th.sin_cos();
                let (a, b) = (raw.db2[m] / SQRT_2, raw.db3[m] / SQRT_2);
                th += lambda * dt + g * (raw.db[m] + b * cs - a * sn);
                let j = m / sub;
                let scale = g / SQRT_2;
                cb[j] += scale * raw.db[m];
                c2[j] += scale * raw.db2[m];
                c3[j] += scale * raw.db3[m];
            }
            let nv = NoisePath::from_parts(vg.clone(), cb, c2, c3).unwrap();
            let tv = PreparedNoise::new(&tc, &nv).unwrap().terminal(lambda).unwrap().theta;
            diffs.push((tv - th).abs());
        }
        assert!(diffs.mean() < 10.0 * (tc.v_end / k as f64).sqrt(), "{}", diffs.mean());
    }

    #[test]
    fn alpha_examples() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let n = noise(&tc, 512, 41, 0);
        assert!(integrate_alpha(&tc, &n, 0.0).unwrap().iter().all(|&a| a == 0.0));
        assert_eq!(count_via_alpha(&tc, &n, 0.0).unwrap(), 0);
        assert!(integrate_alpha(&tc, &n, -1.0).is_err());
        for p in 0..1000 {
            let n = noise(&tc, 256, 43, p);
            let a = integrate_alpha(&tc, &n, 10.0).unwrap();
            assert!(a.iter().all(|&x| x >= -1e-9));
        }
    }

    #[test]
    fn alpha_counts_monotone_in_lambda() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        for p in 0..50 {
            let n = noise(&tc, 512, 47, p);
            let counts: Vec<i64> = (0..10).map(|i| count_via_alpha(&tc, &n, 4.0 * i as f64).unwrap()).collect();
            assert!(counts.windows(2).all(|w| w[1] >= w[0]), "{counts:?}");
        }
    }

    #[test]
    fn alpha_mean_tracks_lambda() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let lambda = 40.0 * PI;
        let mut m = Moments::default();
        for p in 0..2000 {
            let n = noise(&tc, 1024, 53, p);
            m.push(*integrate_alpha(&tc, &n, lambda).unwrap().last().unwrap());
        }
        assert!((m.mean() - lambda).abs() <= 0.05 * lambda);
    }

    #[test]
    fn pathwise_driver_reproduces_phase_difference() {
        let tc = TimeChange::new(1.1, 0.3).unwrap();
        for p in 0..20 {
            let n = noise(&tc, 1024, 59, p);
            let prep = PreparedNoise::new(&tc, &n).unwrap();
            let fam = integrate_pruefer_family(&tc, &n, &[0.0, 9.0]).unwrap();
            let alpha = pathwise_alpha_driver(&prep, 9.0).unwrap();
            for k in 0..=1024 {
                assert!((alpha[k] - (fam.theta[1][k] - fam.theta[0][k])).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn csv_dump() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let path = integrate_pruefer_family(&tc, &noise(&tc, 64, 1, 0), &[0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_path_csv(&path, 1, 16, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "v,t,theta,r,phi");
        assert_eq!(lines.len(), 6);
        assert!(write_path_csv(&path, 2, 1, Vec::new()).is_err());
    }
}
