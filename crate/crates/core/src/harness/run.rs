//! Replica orchestration, aggregation, output files and replay.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, Format, ShapeEnergy};
use super::record::{Payload, ResultRecord, SeedLineage, Stat, CODE_VERSION};
use crate::digest::json_digest;
use crate::error::{Error, Result};
use crate::model::{self, ModelSpec};
use crate::pointproc::{
    count_interval, finite_n_points, levels_between, sample_eta_sch_prepared, PointSample, MONOTONE_SLACK,
};
use crate::rng::{Purpose, Stream};
use crate::sde::{integrate_pruefer_family, make_grid, sample_noise, write_path_csv, PreparedNoise, PrueferFamilyPath};
use crate::shape::{
    compare_shapes, empirical_shape, empirical_shape_fixed_energy, theoretical_shape, theoretical_shape_arcsine,
    Functional, ShapeMeasure, ShapeSamplerParams, MIN_ENSEMBLE,
};
use crate::stats::Moments;

/// Root bracket width of the continuum sampler, in rescaled units.
pub const SAMPLER_TOL: f64 = 1e-9;
/// A run fails when more than this fraction of replicas fail.
pub const FAILURE_BUDGET: f64 = 0.01;
pub const DEFAULT_PATH_STRIDE: usize = 16;

/// Array-valued output of one replica, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub enum Arrays {
    None,
    Points(Vec<PointSample>),
    Shapes { empirical: ShapeMeasure, theory: ShapeMeasure },
    Path(Box<PrueferFamilyPath>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutput {
    pub replica: u64,
    pub payload: Payload,
    pub arrays: Arrays,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaFailure {
    pub replica: u64,
    pub integrity: bool,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Per-replica records in replica order, then the aggregate record.
    pub records: Vec<ResultRecord>,
    pub replicas: Vec<ReplicaOutput>,
    pub failures: Vec<ReplicaFailure>,
}

impl RunOutput {
    pub fn aggregate(&self) -> &ResultRecord {
        self.records.last().expect("a run always ends with its aggregate record")
    }
}

fn key(name: &str, x: f64) -> String {
    format!("{name}[{x}]")
}

fn stream(cfg: &ExperimentConfig, replica: u64, p: Purpose) -> Stream {
    Stream::for_replica(cfg.mc.base_seed, replica, p)
}

fn prepared_noise(cfg: &ExperimentConfig, replica: u64) -> Result<PreparedNoise> {
    let tc = cfg.time_change()?;
    let grid = make_grid(&tc, cfg.sde.steps, cfg.sde.grid)?;
    let noise = sample_noise(&grid, &stream(cfg, replica, Purpose::Noise))?;
    PreparedNoise::new(&tc, &noise)
}

fn uniform_phase(cfg: &ExperimentConfig, replica: u64) -> f64 {
    use rand::Rng;
    TAU * stream(cfg, replica, Purpose::Phase).rng().random::<f64>()
}

/// Uniform translation in `[0, 2 pi)` applied to counting intervals of the crosscheck.
fn uniform_shift(cfg: &ExperimentConfig, replica: u64) -> f64 {
    use rand::Rng;
    TAU * stream(cfg, replica, Purpose::Phase).with_sub(1).rng().random::<f64>()
}

/// Window radius of finite-n crosscheck samples: every shifted `[s, s + lambda]` fits.
pub fn crosscheck_radius(cfg: &ExperimentConfig) -> f64 {
    let lmax = cfg.lambdas().into_iter().fold(0.0, f64::max);
    cfg.model.window_radius.max(TAU + lmax + 1.0)
}

/// `(lambda, theta^lambda - theta^0, N[0, lambda])` from one terminal phase at 0.
fn counts_from_zero(prep: &PreparedNoise, lambdas: &[f64], phase: f64) -> Result<Vec<(f64, f64, i64)>> {
    let t0 = prep.terminal(0.0)?.theta;
    lambdas
        .iter()
        .map(|&l| {
            let tl = prep.terminal(l)?.theta;
            if tl < t0 - MONOTONE_SLACK {
                return Err(Error::Integrity(format!("terminal phase decreased from {t0} to {tl} on [0, {l}]")));
            }
            Ok((l, tl - t0, levels_between(t0, tl, phase)))
        })
        .collect()
}

fn shape_pair(cfg: &ExperimentConfig, replica: u64, p: &mut Payload) -> Result<(ShapeMeasure, ShapeMeasure)> {
    let s = stream(cfg, replica, Purpose::Disorder);
    let cells = cfg.cells();
    let (mu, emp, energy, theory) = match cfg.params.energy_mode.unwrap_or_default() {
        ShapeEnergy::Arcsine => {
            let (mu, emp) = empirical_shape(&cfg.model, &s, cells)?;
            let (e, th) = theoretical_shape_arcsine(cfg.model.sigma, cfg.model.eta, cells, &s)?;
            (mu, emp, e, th)
        }
        ShapeEnergy::Fixed => {
            let (mu, emp) = empirical_shape_fixed_energy(&cfg.model, &s, cells)?;
            let e = cfg.model.energy;
            let params = ShapeSamplerParams { cells, ..ShapeSamplerParams::new(cfg.model.sigma * model::rho(e)?, cfg.model.eta) };
            (mu, emp, e, theoretical_shape(&params, &s)?)
        }
    };
    p.insert("mu".into(), Stat::exact(mu));
    p.insert("theory_energy".into(), Stat::exact(energy));
    for (tag, m) in [("empirical", &emp), ("theory", &theory)] {
        p.insert(format!("{tag}.center_mean"), Stat::exact(m.center_mean));
        p.insert(format!("{tag}.center_argmax"), Stat::exact(m.center_argmax));
        p.insert(format!("{tag}.entropy"), Stat::exact(m.entropy()));
        p.insert(format!("{tag}.sup_distance_uniform"), Stat::exact(m.cdf_sup_distance_uniform()));
    }
    Ok((emp, theory))
}

/// Computes one replica from its seed lineage alone.
pub fn run_replica(cfg: &ExperimentConfig, replica: u64) -> Result<ReplicaOutput> {
    let start = Instant::now();
    let mut p = Payload::new();
    let mut arrays = Arrays::None;
    let ind = |b: bool| Stat::exact(if b { 1.0 } else { 0.0 });
    match cfg.experiment {
        ExperimentKind::Spectrum => {
            let mut s = finite_n_points(&cfg.model, &stream(cfg, replica, Purpose::Disorder))?;
            s.replica = replica;
            let c = s.points.len() as f64;
            p.insert("count".into(), Stat::exact(c));
            p.insert("count_three_halves".into(), Stat::exact(c.powf(1.5)));
            arrays = Arrays::Points(vec![s]);
        }
        ExperimentKind::SdePaths => {
            let tc = cfg.time_change()?;
            let grid = make_grid(&tc, cfg.sde.steps, cfg.sde.grid)?;
            let noise = sample_noise(&grid, &stream(cfg, replica, Purpose::Noise))?;
            let path = integrate_pruefer_family(&tc, &noise, &cfg.lambdas())?;
            for (i, &l) in path.lambdas.iter().enumerate() {
                p.insert(key("theta", l), Stat::exact(*path.theta[i].last().unwrap()));
                p.insert(key("r", l), Stat::exact(*path.r[i].last().unwrap()));
                p.insert(key("phi", l), Stat::exact(*path.phi[i].last().unwrap()));
            }
            if replica < cfg.params.dump_paths.unwrap_or(0) {
                arrays = Arrays::Path(Box::new(path));
            }
        }
        ExperimentKind::Pointprocess => {
            let prep = prepared_noise(cfg, replica)?;
            let phase = uniform_phase(cfg, replica);
            let mut s = sample_eta_sch_prepared(&prep, cfg.window(), phase, SAMPLER_TOL)?;
            s.replica = replica;
            p.insert("phase".into(), Stat::exact(phase));
            p.insert("count".into(), Stat::exact(s.points.len() as f64));
            arrays = Arrays::Points(vec![s]);
        }
        ExperimentKind::Gaps | ExperimentKind::Counting | ExperimentKind::Repulsion => {
            let prep = prepared_noise(cfg, replica)?;
            let phase = uniform_phase(cfg, replica);
            p.insert("phase".into(), Stat::exact(phase));
            let (name, points) = match cfg.experiment {
                ExperimentKind::Repulsion => ("repulsion", cfg.params.eps.clone().unwrap_or_default()),
                ExperimentKind::Gaps => ("gap", cfg.lambdas()),
                _ => ("centred_count", cfg.lambdas()),
            };
            for (l, alpha, n) in counts_from_zero(&prep, &points, phase)? {
                p.insert(key("alpha", l), Stat::exact(alpha));
                let value = match cfg.experiment {
                    ExperimentKind::Repulsion => ind(n >= 2),
                    ExperimentKind::Gaps => ind(n == 0),
                    _ => Stat::exact(n as f64 - l / TAU),
                };
                p.insert(key(name, l), value);
            }
        }
        ExperimentKind::Shape => {
            let (empirical, theory) = shape_pair(cfg, replica, &mut p)?;
            arrays = Arrays::Shapes { empirical, theory };
        }
        ExperimentKind::Crosscheck => {
            let spec = ModelSpec { window_radius: crosscheck_radius(cfg), ..cfg.model.clone() };
            let mut fin = finite_n_points(&spec, &stream(cfg, replica, Purpose::Disorder))?;
            fin.replica = replica;
            let prep = prepared_noise(cfg, replica)?;
            let phase = uniform_phase(cfg, replica);
            let shift = uniform_shift(cfg, replica);
            p.insert("phase".into(), Stat::exact(phase));
            p.insert("shift".into(), Stat::exact(shift));
            for l in cfg.lambdas() {
                let n_fin = fin.count_in(shift, shift + l);
                let n_sde = count_interval(&prep, shift, shift + l, phase)?;
                p.insert(key("finite_n.gap", l), ind(n_fin == 0));
                p.insert(key("sde.gap", l), ind(n_sde == 0));
                p.insert(key("finite_n.count", l), Stat::exact(n_fin as f64));
                p.insert(key("sde.count", l), Stat::exact(n_sde as f64));
            }
            arrays = Arrays::Points(vec![fin]);
        }
    }
    Ok(ReplicaOutput { replica, payload: p, arrays, wall_time_s: start.elapsed().as_secs_f64() })
}

fn is_budgeted(e: &Error) -> Option<bool> {
    match e {
        Error::Numerical { .. } => Some(false),
        Error::Integrity(_) | Error::StrideTooCoarse { .. } => Some(true),
        _ => None,
    }
}

/// Aggregate statistics of the successful replicas, reduced in replica order.
pub fn aggregate(cfg: &ExperimentConfig, outs: &[ReplicaOutput], failed: usize) -> Result<Payload> {
    let mut moments: BTreeMap<String, Moments> = BTreeMap::new();
    for o in outs {
        for (k, s) in &o.payload {
            moments.entry(k.clone()).or_default().push(s.value);
        }
    }
    let mut agg: Payload = moments
        .iter()
        .map(|(k, m)| (k.clone(), Stat::with_se(m.mean(), m.se())))
        .collect();
    agg.insert("replicas_ok".into(), Stat::exact(outs.len() as f64));
    agg.insert("replicas_failed".into(), Stat::exact(failed as f64));
    match cfg.experiment {
        ExperimentKind::Counting => {
            for l in cfg.lambdas() {
                if let Some(m) = moments.get(&key("centred_count", l)) {
                    agg.insert(key("variance", l), Stat::with_se(m.variance(), m.variance_se()));
                }
            }
        }
        ExperimentKind::Crosscheck => {
            for l in cfg.lambdas() {
                if let (Some(a), Some(b)) = (agg.get(&key("finite_n.gap", l)), agg.get(&key("sde.gap", l))) {
                    let se = a.se.unwrap_or(0.0).hypot(b.se.unwrap_or(0.0));
                    agg.insert(key("gap_difference", l), Stat::with_se(a.value - b.value, se));
                }
            }
        }
        ExperimentKind::Shape if outs.len() >= MIN_ENSEMBLE => {
            let (emp, th): (Vec<ShapeMeasure>, Vec<ShapeMeasure>) = outs
                .iter()
                .filter_map(|o| match &o.arrays {
                    Arrays::Shapes { empirical, theory } => Some((empirical.clone(), theory.clone())),
                    _ => None,
                })
                .unzip();
            for f in [Functional::CenterMean, Functional::CenterArgmax, Functional::Entropy] {
                let ks = compare_shapes(&emp, &th, f)?;
                let name = serde_json::to_value(f)?.as_str().unwrap_or_default().to_string();
                agg.insert(format!("ks.{name}"), Stat::exact(ks.statistic));
                agg.insert(format!("ks.{name}.p_value"), Stat::exact(ks.p_value));
            }
        }
        _ => {}
    }
    Ok(agg)
}

/// Runs all replicas (contiguous shards on the worker pool), aggregates and
/// writes the configured outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let out = execute(cfg)?;
    if let Some(dir) = &cfg.output.directory {
        write_outputs(cfg, &out, Path::new(dir))?;
    }
    Ok(out)
}

fn execute(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let (replicas, shards) = (cfg.mc.replicas, cfg.mc.shards);
    let per = replicas / shards;
    let results: Vec<Vec<Result<ReplicaOutput>>> = (0..shards)
        .into_par_iter()
        .map(|s| (s * per..(s + 1) * per).map(|r| run_replica(cfg, r)).collect())
        .collect();
    let mut ok = Vec::with_capacity(replicas as usize);
    let mut failures = Vec::new();
    for (r, res) in results.into_iter().flatten().enumerate() {
        match res {
            Ok(o) => ok.push(o),
            Err(e) => match is_budgeted(&e) {
                Some(integrity) => {
                    eprintln!("replica {r} failed: {e}");
                    failures.push(ReplicaFailure { replica: r as u64, integrity, message: e.to_string() });
                }
                None => return Err(e),
            },
        }
    }
    if failures.len() as f64 > FAILURE_BUDGET * replicas as f64 {
        let detail = format!("{} of {replicas} replicas failed; first: {}", failures.len(), failures[0].message);
        return Err(if failures.iter().all(|f| f.integrity) {
            Error::Integrity(detail)
        } else {
            Error::numerical("replica budget", detail)
        });
    }
    let mut records = Vec::with_capacity(ok.len() + 1);
    for o in &ok {
        let lineage = SeedLineage::replica(cfg.mc.base_seed, o.replica, replicas);
        records.push(ResultRecord::new(cfg, lineage, o.payload.clone(), o.wall_time_s)?);
    }
    let agg = aggregate(cfg, &ok, failures.len())?;
    let lineage = SeedLineage::aggregate(cfg.mc.base_seed, replicas);
    records.push(ResultRecord::new(cfg, lineage, agg, start.elapsed().as_secs_f64())?);
    Ok(RunOutput { records, replicas: ok, failures })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.into())
}

/// `records.jsonl`; `points.csv` (replica,source,x); `shapes_empirical.csv` and
/// `shapes_theory.csv` (replica,d0..d{m-1}); `path_r{replica}_l{index}.csv` (v,t,theta,r,phi).
pub fn write_outputs(cfg: &ExperimentConfig, out: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    if cfg.output.formats.contains(&Format::Jsonl) {
        super::record::write_jsonl(&out.records, std::io::BufWriter::new(fs::File::create(dir.join("records.jsonl"))?))?;
    }
    if !cfg.output.formats.contains(&Format::Csv) {
        return Ok(());
    }
    let points: Vec<&PointSample> = out
        .replicas
        .iter()
        .flat_map(|o| match &o.arrays {
            Arrays::Points(v) => v.iter().collect(),
            _ => Vec::new(),
        })
        .collect();
    if !points.is_empty() {
        let mut w = csv::Writer::from_path(dir.join("points.csv")).map_err(csv_err)?;
        w.write_record(["replica", "source", "x"]).map_err(csv_err)?;
        for s in points {
            let src = serde_json::to_value(s.source)?.as_str().unwrap_or_default().to_string();
            for x in &s.points {
                w.serialize((s.replica, &src, x)).map_err(csv_err)?;
            }
        }
        w.flush()?;
    }
    if cfg.experiment == ExperimentKind::Shape {
        for (name, pick_theory) in [("shapes_empirical.csv", false), ("shapes_theory.csv", true)] {
            let mut w = csv::Writer::from_path(dir.join(name)).map_err(csv_err)?;
            let mut header = vec!["replica".to_string()];
            header.extend((0..cfg.cells()).map(|j| format!("d{j}")));
            w.write_record(&header).map_err(csv_err)?;
            for o in &out.replicas {
                if let Arrays::Shapes { empirical, theory } = &o.arrays {
                    let m = if pick_theory { theory } else { empirical };
                    let mut row = vec![o.replica.to_string()];
                    row.extend(m.density.iter().map(|d| d.to_string()));
                    w.write_record(&row).map_err(csv_err)?;
                }
            }
            w.flush()?;
        }
    }
    let stride = cfg.params.path_stride.unwrap_or(DEFAULT_PATH_STRIDE);
    for o in &out.replicas {
        if let Arrays::Path(path) = &o.arrays {
            for i in 0..path.lambdas.len() {
                let f = fs::File::create(dir.join(format!("path_r{}_l{i}.csv", o.replica)))?;
                write_path_csv(path, i, stride, std::io::BufWriter::new(f))?;
            }
        }
    }
    Ok(())
}

/// Recomputes a record's payload from its embedded config and seed lineage and
/// checks it against the stored digest.
pub fn replay(record: &ResultRecord) -> Result<Payload> {
    if record.code_version != CODE_VERSION {
        return Err(Error::VersionMismatch { recorded: record.code_version.clone(), current: CODE_VERSION.into() });
    }
    let hash = record.config.hash()?;
    if hash != record.config_hash {
        return Err(Error::Integrity(format!(
            "embedded config hashes to {hash}, record says {}",
            record.config_hash
        )));
    }
    let mut cfg = record.config.clone();
    cfg.mc.base_seed = record.seed_lineage.base_seed;
    cfg.mc.replicas = record.seed_lineage.replicas;
    cfg.output.directory = None;
    let payload = match record.seed_lineage.replica {
        Some(r) => run_replica(&cfg, r)?.payload,
        None => execute(&cfg)?.aggregate().payload.clone(),
    };
    let replayed = json_digest(&payload)?;
    if replayed != record.payload_digest {
        return Err(Error::DigestMismatch { stored: record.payload_digest.clone(), replayed });
    }
    Ok(payload)
}
