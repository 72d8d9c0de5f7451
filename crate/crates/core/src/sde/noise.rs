use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Brownian increments `dB, dB2, dB3 ~ N(0, dv_k)` on a fixed `v` grid.
/// The complex driver is `W = (B2 + i B3) / sqrt 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    pub v: Vec<f64>,
    pub db: Vec<f64>,
    pub db2: Vec<f64>,
    pub db3: Vec<f64>,
}

fn check_grid(v: &[f64]) -> Result<()> {
    if v.len() < 2 || v[0] != 0.0 || v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument(
            "noise grid must start at 0 and be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub fn sample_noise(grid: &[f64], stream: &Stream) -> Result<NoisePath> {
    check_grid(grid)?;
    let k = grid.len() - 1;
    let mut rng = stream.rng();
    let mut path = NoisePath::zero(grid)?;
    for j in 0..k {
        let s = (grid[j + 1] - grid[j]).sqrt();
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let c: f64 = rng.sample(StandardNormal);
        path.db[j] = s * a;
        path.db2[j] = s * b;
        path.db3[j] = s * c;
    }
    Ok(path)
}

impl NoisePath {
    /// All increments zero.
    pub fn zero(grid: &[f64]) -> Result<Self> {
        check_grid(grid)?;
        let k = grid.len() - 1;
        Ok(NoisePath {
            v: grid.to_vec(),
            db: vec![0.0; k],
            db2: vec![0.0; k],
            db3: vec![0.0; k],
        })
    }

    pub fn from_parts(v: Vec<f64>, db: Vec<f64>, db2: Vec<f64>, db3: Vec<f64>) -> Result<Self> {
        check_grid(&v)?;
        let k = v.len() - 1;
        if db.len() != k || db2.len() != k || db3.len() != k {
            return Err(Error::Argument("increment arrays must have one entry per cell".into()));
        }
        Ok(NoisePath { v, db, db2, db3 })
    }

    pub fn steps(&self) -> usize {
        self.db.len()
    }

    pub fn v_end(&self) -> f64 {
        *self.v.last().expect("grid is non-empty")
    }

    /// Splits every cell into `factor` equal pieces, sampling the new
    /// increments from the Brownian bridge conditioned on the coarse ones.
    /// Cell sums are preserved exactly up to rounding.
    pub fn refine(&self, factor: usize, stream: &Stream) -> Result<NoisePath> {
        if factor == 0 {
            return Err(Error::Argument("refinement factor must be positive".into()));
        }
        let k = self.steps();
        let mut v = Vec::with_capacity(k * factor + 1);
        v.push(0.0);
        for j in 0..k {
            let (lo, hi) = (self.v[j], self.v[j + 1]);
            for i in 1..factor {
                v.push(lo + (hi - lo) * i as f64 / factor as f64);
            }
            v.push(hi);
        }
        let mut rng = stream.rng();
        let mut parts = [
            Vec::with_capacity(k * factor),
            Vec::with_capacity(k * factor),
            Vec::with_capacity(k * factor),
        ];
        for j in 0..k {
            let cells = &v[j * factor..=(j + 1) * factor];
            for (out, total) in parts.iter_mut().zip([self.db[j], self.db2[j], self.db3[j]]) {
                let mut rest = total;
                let mut len = cells[factor] - cells[0];
                for i in 0..factor {
                    let h = cells[i + 1] - cells[i];
                    if i + 1 == factor {
                        out.push(rest);
                        break;
                    }
                    let mean = rest * h / len;
                    let var = (h * (len - h) / len).max(0.0);
                    let z: f64 = rng.sample(StandardNormal);
                    let x = mean + var.sqrt() * z;
                    out.push(x);
                    rest -= x;
                    len -= h;
                }
            }
        }
        let [db, db2, db3] = parts;
        Ok(NoisePath { v, db, db2, db3 })
    }

    /// Sums increments over blocks of `factor` cells.
    pub fn coarsen(&self, factor: usize) -> Result<NoisePath> {
        if factor == 0 || self.steps() % factor != 0 {
            return Err(Error::Argument(format!(
                "cannot coarsen {} cells by {factor}",
                self.steps()
            )));
        }
        let sum = |x: &[f64]| x.chunks(factor).map(|c| c.iter().sum()).collect::<Vec<f64>>();
        Ok(NoisePath {
            v: self.v.iter().step_by(factor).copied().collect(),
            db: sum(&self.db),
            db2: sum(&self.db2),
            db3: sum(&self.db3),
        })
    }
}
