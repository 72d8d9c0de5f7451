//! Result records: one JSON object per line.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::digest::json_digest;
use crate::error::Result;
use crate::rng::stream_id;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A statistic with its Monte-Carlo standard error; per-replica values carry none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub value: f64,
    pub se: Option<f64>,
}

impl Stat {
    pub fn exact(value: f64) -> Self {
        Stat { value, se: None }
    }

    pub fn with_se(value: f64, se: f64) -> Self {
        Stat { value, se: se.is_finite().then_some(se) }
    }
}

pub type Payload = BTreeMap<String, Stat>;

/// Everything needed to regenerate the random streams of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLineage {
    pub base_seed: u64,
    /// `None` for aggregate records, which cover replicas `0..replicas`.
    pub replica: Option<u64>,
    pub stream_id: Option<u64>,
    pub replicas: u64,
}

impl SeedLineage {
    pub fn replica(base_seed: u64, replica: u64, replicas: u64) -> Self {
        SeedLineage { base_seed, replica: Some(replica), stream_id: Some(stream_id(base_seed, replica)), replicas }
    }

    pub fn aggregate(base_seed: u64, replicas: u64) -> Self {
        SeedLineage { base_seed, replica: None, stream_id: None, replicas }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: ExperimentKind,
    pub config_hash: String,
    pub replica: Option<u64>,
    pub seed_lineage: SeedLineage,
    pub payload: Payload,
    pub payload_digest: String,
    pub wall_time_s: f64,
    pub code_version: String,
    pub config: ExperimentConfig,
}

impl ResultRecord {
    pub fn new(config: &ExperimentConfig, lineage: SeedLineage, payload: Payload, wall_time_s: f64) -> Result<Self> {
        Ok(ResultRecord {
            experiment: config.experiment,
            config_hash: config.hash()?,
            replica: lineage.replica,
            seed_lineage: lineage,
            payload_digest: json_digest(&payload)?,
            payload,
            wall_time_s,
            code_version: CODE_VERSION.to_string(),
            config: config.clone(),
        })
    }

    pub fn is_aggregate(&self) -> bool {
        self.replica.is_none()
    }

    pub fn get(&self, name: &str) -> Option<Stat> {
        self.payload.get(name).copied()
    }
}

pub fn write_jsonl<W: Write>(records: &[ResultRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<ResultRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

pub fn read_jsonl_file(path: &std::path::Path) -> Result<Vec<ResultRecord>> {
    read_jsonl(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelSpec;

    #[test]
    fn jsonl_round_trip_is_exact() {
        let cfg = ExperimentConfig::new(ExperimentKind::Spectrum, ModelSpec::critical(50, 1.0, 0.3, 0.4));
        let mut payload = Payload::new();
        payload.insert("a".into(), Stat::exact(0.1 + 0.2));
        payload.insert("b".into(), Stat::with_se(1.0 / 3.0, f64::NAN));
        payload.insert("c".into(), Stat::with_se(-2.5e-17, 1e-300));
        let rec = ResultRecord::new(&cfg, SeedLineage::replica(9, 3, 10), payload, 0.5).unwrap();
        assert_eq!(rec.payload["b"].se, None);
        let mut buf = Vec::new();
        write_jsonl(&[rec.clone(), rec.clone()], &mut buf).unwrap();
        let back = read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, vec![rec.clone(), rec.clone()]);
        assert_eq!(json_digest(&back[0].payload).unwrap(), rec.payload_digest);
    }
}
