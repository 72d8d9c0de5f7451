use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{NoisePath, TimeChange};
use crate::error::{Error, Result};
use crate::model::{CMat2, SpectralConstants};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMode {
    #[default]
    Generic,
    /// At `E = 0` the noise matrix is `(i dB1, i dB2; -i dB2, -i dB1)` with real drivers.
    ZeroEnergy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPath {
    pub v: Vec<f64>,
    pub q: Vec<CMat2>,
}

impl MatrixPath {
    /// `q = [Z^{-1} Q (1, 0)^T]_0` at every grid point.
    pub fn q_scalar(&self, consts: &SpectralConstants) -> Vec<Complex64> {
        self.q.iter().map(|q| (consts.zinv * q.column(0))[0]).collect()
    }

    /// `2 arg q`, lifted continuously.
    pub fn theta(&self, consts: &SpectralConstants) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.q.len());
        let mut prev = 0.0;
        let mut acc = 0.0;
        for (k, q) in self.q_scalar(consts).into_iter().enumerate() {
            let raw = 2.0 * q.arg();
            if k > 0 {
                acc += crate::transfer::wrap_pi(raw - prev);
            } else {
                acc = raw;
            }
            prev = raw;
            out.push(acc);
        }
        out
    }
}

/// Euler scheme for `dQ = 1/2 Z [diag(i lambda, -i lambda) t'(v) dv + N] Z^{-1} Q`, `Q(0) = I`.
pub fn integrate_matrix_q(
    tc: &TimeChange,
    consts: &SpectralConstants,
    noise: &NoisePath,
    lambda: f64,
    mode: EnergyMode,
) -> Result<MatrixPath> {
    if mode == EnergyMode::ZeroEnergy && consts.energy != 0.0 {
        return Err(Error::Argument(format!(
            "zero-energy noise requested at E = {}",
            consts.energy
        )));
    }
    let i = Complex64::i();
    let k = noise.steps();
    let mut q = CMat2::identity();
    let mut path = MatrixPath { v: noise.v.clone(), q: Vec::with_capacity(k + 1) };
    path.q.push(q);
    for j in 0..k {
        let dv = noise.v[j + 1] - noise.v[j];
        let drift = lambda * tc.tprime(noise.v[j]) * dv;
        let n = match mode {
            EnergyMode::Generic => {
                let dw = Complex64::new(noise.db2[j], noise.db3[j]) / SQRT_2;
                let b = i * noise.db[j];
                CMat2::new(b, dw, dw.conj(), -b) * Complex64::new(SQRT_2, 0.0)
            }
            EnergyMode::ZeroEnergy => {
                let (b1, b2) = (i * noise.db[j], i * noise.db2[j]);
                CMat2::new(b1, b2, -b2, -b1) * Complex64::new(SQRT_2, 0.0)
            }
        };
        let a = CMat2::new(i * drift, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), -i * drift) + n;
        q += consts.zmat * a * consts.zinv * q * Complex64::new(0.5, 0.0);
        if q.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::non_finite("matrix SDE", j + 1));
        }
        path.q.push(q);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::spectral_constants;
    use crate::rng::{Purpose, Stream};
    use crate::sde::{integrate_pruefer_family, make_grid, sample_noise, GridMode};

    #[test]
    fn identity_without_noise_or_lambda() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let c = spectral_constants(0.7).unwrap();
        let g = make_grid(&tc, 64, GridMode::UniformV).unwrap();
        let p = integrate_matrix_q(&tc, &c, &NoisePath::zero(&g).unwrap(), 0.0, EnergyMode::Generic).unwrap();
        assert!(p.q.iter().all(|q| (q - CMat2::identity()).norm() < 1e-14));
    }

    #[test]
    fn structure_is_preserved() {
        for (e, mode) in [(0.7, EnergyMode::Generic), (-1.3, EnergyMode::Generic), (0.0, EnergyMode::ZeroEnergy)] {
            let tc = TimeChange::new(1.0, 0.3).unwrap();
            let c = spectral_constants(e).unwrap();
            let g = make_grid(&tc, 512, GridMode::UniformV).unwrap();
            let n = sample_noise(&g, &Stream::new(3, Purpose::Noise)).unwrap();
            let p = integrate_matrix_q(&tc, &c, &n, 6.0, mode).unwrap();
            for q in &p.q {
                let scale = q.norm().max(1.0);
                assert!(q.iter().all(|z| z.im.abs() < 1e-10 * scale), "Q not real");
                let y = c.zinv * q.column(0);
                assert!((y[1] - y[0].conj()).norm() < 1e-8 * scale);
            }
        }
    }

    #[test]
    fn zero_energy_mode_requires_zero_energy() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let c = spectral_constants(0.5).unwrap();
        let g = make_grid(&tc, 16, GridMode::UniformV).unwrap();
        let z = NoisePath::zero(&g).unwrap();
        assert!(integrate_matrix_q(&tc, &c, &z, 0.0, EnergyMode::ZeroEnergy).is_err());
    }

    #[test]
    fn phase_matches_pruefer_reduction() {
        let tc = TimeChange::new(1.0, 0.3).unwrap();
        let c = spectral_constants(0.4).unwrap();
        let k = 4096;
        let g = make_grid(&tc, k, GridMode::UniformV).unwrap();
        for p in 0..10 {
            let n = sample_noise(&g, &Stream::for_replica(7, p, Purpose::Noise)).unwrap();
            let m = integrate_matrix_q(&tc, &c, &n, 5.0, EnergyMode::Generic).unwrap();
            let fam = integrate_pruefer_family(&tc, &n, &[5.0]).unwrap();
            let th = m.theta(&c);
            let worst = th.iter().zip(&fam.theta[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst <= 10.0 * (tc.v_end / k as f64).sqrt(), "{worst}");
        }
    }
}
