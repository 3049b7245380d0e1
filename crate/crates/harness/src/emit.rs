//! Serialized output: CSV and JSON documents with an embedded header object
//! recording the full configuration, seed and artifact version.
//!
//! CSV files carry the header object and per-replica summaries as `#`
//! comment lines around a fixed nine-column record table:
//!
//! ```text
//! # header {…}
//! generation,best_fitness,mean_fitness,p_m,alpha,beta,population_size,diversity,action
//! # replica {…}
//! 1,8.0,5.25,0.05,0.05,0.05,64,3.2,none
//! ```
//!
//! JSON documents mirror the same field names.  Floats are written in
//! shortest round-trip form, so parsing an emitted document recovers
//! field-identical records.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use criga_core::control::{actions_label, parse_actions_label};
use criga_core::ga::{GenerationRecord, RNG_ALGORITHM};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::{CompareRow, ReplicaOutput, RunSummary, SweepRow};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The nine record columns, in serialization order.
pub const RECORD_COLUMNS: [&str; 9] = [
    "generation",
    "best_fitness",
    "mean_fitness",
    "p_m",
    "alpha",
    "beta",
    "population_size",
    "diversity",
    "action",
];

/// One serialized generation record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub p_m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub population_size: usize,
    pub diversity: f64,
    pub action: String,
}

impl From<&GenerationRecord> for RecordRow {
    fn from(record: &GenerationRecord) -> Self {
        RecordRow {
            generation: record.generation,
            best_fitness: record.best_fitness,
            mean_fitness: record.mean_fitness,
            p_m: record.mutation_prob,
            alpha: record.alpha,
            beta: record.beta,
            population_size: record.population_size,
            diversity: record.diversity,
            action: actions_label(&record.actions),
        }
    }
}

impl RecordRow {
    /// Validates that the action label parses back.
    pub fn actions(&self) -> Result<Vec<criga_core::control::ControlAction>> {
        Ok(parse_actions_label(&self.action)?)
    }
}

/// Header object embedded in every run output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub version: String,
    pub rng: String,
    pub seed: u64,
    pub config: ExperimentConfig,
}

impl RunHeader {
    pub fn new(config: &ExperimentConfig) -> Self {
        RunHeader {
            version: ARTIFACT_VERSION.to_string(),
            rng: RNG_ALGORITHM.to_string(),
            seed: config.run.seed,
            config: config.clone(),
        }
    }
}

/// A full run output document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunDocument {
    pub header: RunHeader,
    pub replicas: Vec<ReplicaDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaDocument {
    pub summary: RunSummary,
    pub records: Vec<RecordRow>,
}

impl RunDocument {
    pub fn new(config: &ExperimentConfig, outputs: &[ReplicaOutput]) -> Self {
        RunDocument {
            header: RunHeader::new(config),
            replicas: outputs
                .iter()
                .map(|o| ReplicaDocument {
                    summary: o.summary.clone(),
                    records: o.records.iter().map(RecordRow::from).collect(),
                })
                .collect(),
        }
    }
}

pub fn write_run_csv<W: Write>(mut w: W, doc: &RunDocument) -> Result<()> {
    writeln!(w, "# header {}", serde_json::to_string(&doc.header)?)?;
    {
        let mut csv = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut w);
        csv.write_record(RECORD_COLUMNS)?;
        csv.flush()?;
    }
    for replica in &doc.replicas {
        writeln!(w, "# replica {}", serde_json::to_string(&replica.summary)?)?;
        let mut csv = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut w);
        for row in &replica.records {
            csv.serialize(row)?;
        }
        csv.flush()?;
    }
    Ok(())
}

pub fn write_run_json<W: Write>(mut w: W, doc: &RunDocument) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)?;
    Ok(())
}

fn parse_record_line(line: &str) -> Result<RecordRow> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != RECORD_COLUMNS.len() {
        return Err(HarnessError::Parse(format!(
            "expected {} record fields, got {} in {line:?}",
            RECORD_COLUMNS.len(),
            fields.len()
        )));
    }
    let bad = |field: &str, value: &str| {
        HarnessError::Parse(format!("invalid {field} value {value:?}"))
    };
    let row = RecordRow {
        generation: fields[0].parse().map_err(|_| bad("generation", fields[0]))?,
        best_fitness: fields[1].parse().map_err(|_| bad("best_fitness", fields[1]))?,
        mean_fitness: fields[2].parse().map_err(|_| bad("mean_fitness", fields[2]))?,
        p_m: fields[3].parse().map_err(|_| bad("p_m", fields[3]))?,
        alpha: fields[4].parse().map_err(|_| bad("alpha", fields[4]))?,
        beta: fields[5].parse().map_err(|_| bad("beta", fields[5]))?,
        population_size: fields[6]
            .parse()
            .map_err(|_| bad("population_size", fields[6]))?,
        diversity: fields[7].parse().map_err(|_| bad("diversity", fields[7]))?,
        action: fields[8].to_string(),
    };
    row.actions()?;
    Ok(row)
}

/// Parses a document produced by [`write_run_csv`].
pub fn parse_run_csv<R: BufRead>(reader: R) -> Result<RunDocument> {
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| HarnessError::Parse("empty document".into()))??;
    let header_json = header_line
        .strip_prefix("# header ")
        .ok_or_else(|| HarnessError::Parse("document must start with `# header`".into()))?;
    let header: RunHeader = serde_json::from_str(header_json)?;

    let columns = lines
        .next()
        .ok_or_else(|| HarnessError::Parse("missing column header".into()))??;
    if columns != RECORD_COLUMNS.join(",") {
        return Err(HarnessError::Parse(format!(
            "unexpected column header {columns:?}"
        )));
    }

    let mut replicas: Vec<ReplicaDocument> = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        if let Some(summary_json) = line.strip_prefix("# replica ") {
            replicas.push(ReplicaDocument {
                summary: serde_json::from_str(summary_json)?,
                records: Vec::new(),
            });
        } else {
            let row = parse_record_line(&line)?;
            replicas
                .last_mut()
                .ok_or_else(|| {
                    HarnessError::Parse("record row before any `# replica` line".into())
                })?
                .records
                .push(row);
        }
    }
    Ok(RunDocument { header, replicas })
}

pub fn parse_run_json<R: std::io::Read>(reader: R) -> Result<RunDocument> {
    Ok(serde_json::from_reader(reader)?)
}

/// Header for sweep tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepHeader {
    pub version: String,
    pub rng: String,
    pub seed: u64,
    pub axis: String,
    pub config: ExperimentConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub header: SweepHeader,
    pub rows: Vec<SweepRow>,
}

/// Header for comparison tables: one labeled config per row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareHeader {
    pub version: String,
    pub rng: String,
    pub configs: Vec<LabeledConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledConfig {
    pub label: String,
    pub config: ExperimentConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareDocument {
    pub header: CompareHeader,
    pub rows: Vec<CompareRow>,
}

// csv cannot serialize serde-flattened structs, so tables go through flat rows
#[derive(Serialize)]
struct FlatAggregateRow<'a> {
    #[serde(rename = "axis", skip_serializing_if = "Option::is_none")]
    axis: Option<&'a str>,
    #[serde(rename = "value", skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(rename = "label", skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    replicas: usize,
    hit_rate: f64,
    median_first_hit_generation: f64,
    mean_evaluations: f64,
}

pub fn write_sweep_csv<W: Write>(mut w: W, doc: &SweepDocument) -> Result<()> {
    writeln!(w, "# header {}", serde_json::to_string(&doc.header)?)?;
    let mut csv = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(&mut w);
    csv.write_record([
        "axis",
        "value",
        "replicas",
        "hit_rate",
        "median_first_hit_generation",
        "mean_evaluations",
    ])?;
    for row in &doc.rows {
        csv.serialize(FlatAggregateRow {
            axis: Some(&row.axis),
            value: Some(row.value),
            label: None,
            replicas: row.aggregate.replicas,
            hit_rate: row.aggregate.hit_rate,
            median_first_hit_generation: row.aggregate.median_first_hit_generation,
            mean_evaluations: row.aggregate.mean_evaluations,
        })?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_sweep_json<W: Write>(mut w: W, doc: &SweepDocument) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)?;
    Ok(())
}

pub fn write_compare_csv<W: Write>(mut w: W, doc: &CompareDocument) -> Result<()> {
    writeln!(w, "# header {}", serde_json::to_string(&doc.header)?)?;
    let mut csv = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(&mut w);
    csv.write_record([
        "label",
        "replicas",
        "hit_rate",
        "median_first_hit_generation",
        "mean_evaluations",
    ])?;
    for row in &doc.rows {
        csv.serialize(FlatAggregateRow {
            axis: None,
            value: None,
            label: Some(&row.label),
            replicas: row.aggregate.replicas,
            hit_rate: row.aggregate.hit_rate,
            median_first_hit_generation: row.aggregate.median_first_hit_generation,
            mean_evaluations: row.aggregate.mean_evaluations,
        })?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_compare_json<W: Write>(mut w: W, doc: &CompareDocument) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)?;
    Ok(())
}

/// Header of a threshold scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdHeader {
    pub version: String,
    pub n: usize,
    pub sigma: f64,
    pub tol: f64,
    pub p_max: f64,
    pub points: usize,
    /// Numerically detected error threshold.
    pub detected: f64,
    /// Closed-form balance point `1 − sigma^(−1/n)`.
    pub exact: f64,
    /// First-order form `ln(sigma)/n`.
    pub asymptotic: f64,
}

/// One scan point: stationary master-class frequency and its ratio to the
/// selectively neutral value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub p: f64,
    pub master_frequency: f64,
    pub ratio_to_neutral: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDocument {
    pub header: ThresholdHeader,
    pub points: Vec<ThresholdPoint>,
}

pub fn write_threshold_csv<W: Write>(mut w: W, doc: &ThresholdDocument) -> Result<()> {
    writeln!(w, "# header {}", serde_json::to_string(&doc.header)?)?;
    let mut csv = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(&mut w);
    csv.write_record(["p", "master_frequency", "ratio_to_neutral"])?;
    for point in &doc.points {
        csv.serialize(point)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_threshold_json<W: Write>(mut w: W, doc: &ThresholdDocument) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)?;
    Ok(())
}
