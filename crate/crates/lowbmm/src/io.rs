//! File formats: dataset CSV, ground-truth / summary / evaluation / tuning
//! JSON, draw logs (CSV and a compact binary variant), and the plotting
//! tables. All writers are byte-deterministic for fixed inputs.
//!
//! Item identifiers are strings at this boundary and 0-based indices
//! everywhere else; draw logs store indices, and labelling happens when a
//! summary or table is written.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::alpha::{AlphaGridResult, ClampEnd};
use crate::datagen::{GroundTruth, Provenance, RankingDataset};
use crate::error::{Error, Result};
use crate::metrics::{BenchResult, EvalReport};
use crate::perm::{rank_vector, ItemSet, Ranking};
use crate::postprocess::{HeatplotCell, PosteriorSummary, SelectionFrequencies, ViolinCell};
use crate::sampler::{DrawSink, PosteriorSamples, SamplerConfig};

pub const TRUTH_SCHEMA: &str = "lowbmm-truth/1";
pub const SUMMARY_SCHEMA: &str = "lowbmm-summary/1";
pub const REPORT_SCHEMA: &str = "lowbmm-report/1";
pub const ALPHA_SCHEMA: &str = "lowbmm-alpha/1";
pub const BENCH_SCHEMA: &str = "lowbmm-bench/1";
const DRAWLOG_MAGIC: &[u8; 6] = b"LBDL1\n";

// ---------------------------------------------------------------------------
// Dataset CSV
// ---------------------------------------------------------------------------

/// Header row of item identifiers, then one row of integer ranks per
/// assessor; every row must be a permutation.
pub fn write_dataset_csv<W: Write>(mut w: W, ds: &RankingDataset) -> Result<()> {
    writeln!(w, "{}", ds.item_ids().join(","))?;
    for j in 0..ds.n_assessors() {
        let row: Vec<String> = ds.row(j).iter().map(|r| r.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_dataset_csv_file(path: &Path, ds: &RankingDataset) -> Result<()> {
    write_dataset_csv(BufWriter::new(File::create(path)?), ds)
}

pub fn read_dataset_csv<R: Read>(r: R) -> Result<RankingDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let item_ids: Vec<String> = reader
        .headers()?
        .iter()
        .map(|s| s.to_string())
        .collect();
    if item_ids.is_empty() {
        return Err(Error::DataFormat("dataset has no columns".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for id in &item_ids {
        if !seen.insert(id) {
            return Err(Error::DataFormat(format!("duplicate item id {id:?}")));
        }
    }
    let n = item_ids.len();
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != n {
            return Err(Error::DataFormat(format!(
                "row {}: expected {n} fields, got {}",
                idx + 1,
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(n);
        for field in record.iter() {
            let v: u32 = field.parse().map_err(|_| {
                Error::DataFormat(format!("row {}: non-integer rank {field:?}", idx + 1))
            })?;
            row.push(v);
        }
        if !crate::perm::is_permutation(&row) {
            return Err(Error::InvalidPermutation {
                len: n,
                row: Some(idx + 1),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::DataFormat("dataset has no assessor rows".into()));
    }
    RankingDataset::from_rows(item_ids, rows)
}

pub fn read_dataset_csv_file(path: &Path) -> Result<RankingDataset> {
    read_dataset_csv(BufReader::new(File::open(path)?))
}

/// Reads a CSV of real-valued scores and converts each row to ranks, the
/// largest score receiving rank 1 (ties by ascending column).
pub fn read_scores_csv<R: Read>(r: R) -> Result<RankingDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let item_ids: Vec<String> = reader.headers()?.iter().map(|s| s.to_string()).collect();
    let n = item_ids.len();
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != n {
            return Err(Error::DataFormat(format!(
                "row {}: expected {n} fields, got {}",
                idx + 1,
                record.len()
            )));
        }
        let mut negated = Vec::with_capacity(n);
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| {
                Error::DataFormat(format!("row {}: non-numeric score {field:?}", idx + 1))
            })?;
            negated.push(-v);
        }
        let ranking = rank_vector(&negated).map_err(|e| {
            Error::DataFormat(format!("row {}: {e}", idx + 1))
        })?;
        rows.push(ranking.into_vec());
    }
    if rows.is_empty() {
        return Err(Error::DataFormat("score file has no rows".into()));
    }
    RankingDataset::from_rows(item_ids, rows)
}

// ---------------------------------------------------------------------------
// Ground truth JSON
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TruthFile {
    pub schema: String,
    pub n_items: usize,
    /// True-set item identifiers in ascending item order.
    pub items: Vec<String>,
    /// True consensus rank of each listed item.
    pub consensus: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Provenance>,
}

pub fn truth_to_file(gt: &GroundTruth, ds: &RankingDataset) -> TruthFile {
    TruthFile {
        schema: TRUTH_SCHEMA.to_string(),
        n_items: ds.n_items(),
        items: gt
            .true_set
            .members()
            .iter()
            .map(|&i| ds.item_ids()[i].clone())
            .collect(),
        consensus: gt.true_consensus.ranks().to_vec(),
        provenance: ds.provenance.clone(),
    }
}

/// Rebuilds indices against an id universe (usually the dataset header).
pub fn truth_from_file(tf: &TruthFile, item_ids: &[String]) -> Result<GroundTruth> {
    if tf.schema != TRUTH_SCHEMA {
        return Err(Error::DataFormat(format!(
            "expected schema {TRUTH_SCHEMA}, got {}",
            tf.schema
        )));
    }
    let members = lookup_ids(&tf.items, item_ids)?;
    // items are listed in ascending index order already; re-sort defensively
    let mut pairs: Vec<(usize, u32)> = members
        .into_iter()
        .zip(tf.consensus.iter().copied())
        .collect();
    pairs.sort_unstable_by_key(|&(i, _)| i);
    Ok(GroundTruth {
        true_set: ItemSet::new(pairs.iter().map(|&(i, _)| i).collect(), item_ids.len())?,
        true_consensus: Ranking::new(pairs.iter().map(|&(_, r)| r).collect())?,
    })
}

fn lookup_ids(wanted: &[String], universe: &[String]) -> Result<Vec<usize>> {
    let index: std::collections::HashMap<&str, usize> = universe
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    wanted
        .iter()
        .map(|id| {
            index
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::DataFormat(format!("unknown item id {id:?}")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Summary JSON
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AcceptanceBlock {
    pub rho: f64,
    pub aset: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TopSelectionBlock {
    pub top_k: usize,
    pub cutoff: f64,
    pub items: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SummaryFile {
    pub schema: String,
    pub n_items: usize,
    pub n_star: usize,
    pub draws: u64,
    pub hps_k: usize,
    pub item_ids: Vec<String>,
    pub w_bar: Vec<f64>,
    pub hps: Vec<String>,
    /// Conditional mean rank of each HPS item.
    pub x_bar: Vec<f64>,
    pub a_hat: Vec<String>,
    pub rho_hat: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub top_selection: Option<TopSelectionBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub acceptance: Option<AcceptanceBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sampler_config: Option<SamplerConfig>,
    pub chains: u32,
}

#[allow(clippy::too_many_arguments)]
pub fn summary_to_file(
    summary: &PosteriorSummary,
    w: &SelectionFrequencies,
    draws: u64,
    hps_k: usize,
    item_ids: &[String],
    top_selection: Option<TopSelectionBlock>,
    acceptance: Option<AcceptanceBlock>,
    sampler_config: Option<SamplerConfig>,
    chains: u32,
) -> SummaryFile {
    let label = |i: &usize| item_ids[*i].clone();
    SummaryFile {
        schema: SUMMARY_SCHEMA.to_string(),
        n_items: item_ids.len(),
        n_star: summary.a_hat.len(),
        draws,
        hps_k,
        item_ids: item_ids.to_vec(),
        w_bar: w.w_bar.clone(),
        hps: summary.hps.members().iter().map(label).collect(),
        x_bar: summary.x_bar.clone(),
        a_hat: summary.a_hat.members().iter().map(label).collect(),
        rho_hat: summary.rho_hat.ranks().to_vec(),
        top_selection,
        acceptance,
        sampler_config,
        chains,
    }
}

/// Rebuilds the in-memory summary from a summary file.
pub fn summary_from_file(sf: &SummaryFile) -> Result<(PosteriorSummary, Vec<String>)> {
    if sf.schema != SUMMARY_SCHEMA {
        return Err(Error::DataFormat(format!(
            "expected schema {SUMMARY_SCHEMA}, got {}",
            sf.schema
        )));
    }
    let hps_members = lookup_ids(&sf.hps, &sf.item_ids)?;
    let a_hat_members = lookup_ids(&sf.a_hat, &sf.item_ids)?;
    if hps_members.len() != sf.x_bar.len() || a_hat_members.len() != sf.rho_hat.len() {
        return Err(Error::DataFormat(
            "summary member and value lengths disagree".into(),
        ));
    }
    let mut hps_pairs: Vec<(usize, f64)> = hps_members
        .into_iter()
        .zip(sf.x_bar.iter().copied())
        .collect();
    hps_pairs.sort_unstable_by_key(|&(i, _)| i);
    let mut a_pairs: Vec<(usize, u32)> = a_hat_members
        .into_iter()
        .zip(sf.rho_hat.iter().copied())
        .collect();
    a_pairs.sort_unstable_by_key(|&(i, _)| i);
    let summary = PosteriorSummary {
        hps: ItemSet::new(hps_pairs.iter().map(|&(i, _)| i).collect(), sf.n_items)?,
        a_hat: ItemSet::new(a_pairs.iter().map(|&(i, _)| i).collect(), sf.n_items)?,
        rho_hat: Ranking::new(a_pairs.iter().map(|&(_, r)| r).collect())?,
        x_bar: hps_pairs.iter().map(|&(_, x)| x).collect(),
    };
    Ok((summary, sf.item_ids.clone()))
}

// ---------------------------------------------------------------------------
// Evaluation report JSON
// ---------------------------------------------------------------------------

/// A nonnegative real that may be infinite; serialized as a number or the
/// string `"Inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaybeInf(pub f64);

impl Serialize for MaybeInf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("Inf")
        }
    }
}

impl<'de> Deserialize<'de> for MaybeInf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(MaybeInf(v)),
            Raw::Str(s) if s == "Inf" => Ok(MaybeInf(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"Inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub schema: String,
    pub n_items: usize,
    pub n_star: usize,
    pub n_corr: usize,
    pub coverage: f64,
    pub d_norm: MaybeInf,
    pub d_r: f64,
    pub wall_time_sec: f64,
}

pub fn report_to_file(report: &EvalReport, n_items: usize, n_star: usize) -> ReportFile {
    ReportFile {
        schema: REPORT_SCHEMA.to_string(),
        n_items,
        n_star,
        n_corr: report.n_corr,
        coverage: report.coverage,
        d_norm: MaybeInf(report.d_norm),
        d_r: report.d_r,
        wall_time_sec: report.wall_time_sec,
    }
}

// ---------------------------------------------------------------------------
// Alpha tuning outputs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlphaFile {
    pub schema: String,
    pub n_items: usize,
    pub n_star: usize,
    pub observed_mean: f64,
    pub alpha_hat_n: f64,
    pub alpha_hat_nstar: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clamped: Option<ClampEnd>,
}

pub fn alpha_to_file(result: &AlphaGridResult, n_items: usize, n_star: usize) -> AlphaFile {
    AlphaFile {
        schema: ALPHA_SCHEMA.to_string(),
        n_items,
        n_star,
        observed_mean: result.observed_mean,
        alpha_hat_n: result.alpha_hat_n,
        alpha_hat_nstar: result.alpha_hat_nstar,
        clamped: result.clamped,
    }
}

/// Grid table with the observed mean repeated per row, ready for plotting
/// the intersection.
pub fn write_alpha_grid_csv<W: Write>(mut w: W, result: &AlphaGridResult) -> Result<()> {
    writeln!(w, "alpha0,mean_dist,observed_mean")?;
    for (a, d) in result.grid.iter().zip(&result.mean_dists) {
        writeln!(w, "{a},{d},{}", result.observed_mean)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Draw logs
// ---------------------------------------------------------------------------

/// Short hash of a sampler configuration, stamped into draw-log headers.
pub fn config_hash(cfg: &SamplerConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// CSV draw log: a comment header, then `chain,iteration,item,rank` rows
/// (items are 0-based indices).
pub struct CsvDrawWriter<W: Write> {
    w: W,
}

impl<W: Write> CsvDrawWriter<W> {
    pub fn new(mut w: W, n_items: usize, n_star: usize, hash: &str) -> Result<Self> {
        writeln!(w, "# lowbmm-draws v1 config={hash} n={n_items} n_star={n_star}")?;
        writeln!(w, "chain,iteration,item,rank")?;
        Ok(Self { w })
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

impl<W: Write> DrawSink for CsvDrawWriter<W> {
    fn record(&mut self, chain: u32, iteration: u64, items: &[u32], ranks: &[u16]) -> Result<()> {
        for (&item, &rank) in items.iter().zip(ranks) {
            writeln!(self.w, "{chain},{iteration},{item},{rank}")?;
        }
        Ok(())
    }
}

/// Compact binary draw log for very long chains.
pub struct BinDrawWriter<W: Write> {
    w: W,
}

impl<W: Write> BinDrawWriter<W> {
    pub fn new(mut w: W, n_items: usize, n_star: usize, hash: &str) -> Result<Self> {
        w.write_all(DRAWLOG_MAGIC)?;
        let mut hash_bytes = [0u8; 16];
        hash_bytes[..hash.len().min(16)].copy_from_slice(&hash.as_bytes()[..hash.len().min(16)]);
        w.write_all(&hash_bytes)?;
        w.write_all(&(n_items as u32).to_le_bytes())?;
        w.write_all(&(n_star as u32).to_le_bytes())?;
        Ok(Self { w })
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

impl<W: Write> DrawSink for BinDrawWriter<W> {
    fn record(&mut self, chain: u32, iteration: u64, items: &[u32], ranks: &[u16]) -> Result<()> {
        self.w.write_all(&chain.to_le_bytes())?;
        self.w.write_all(&iteration.to_le_bytes())?;
        for (&item, &rank) in items.iter().zip(ranks) {
            self.w.write_all(&item.to_le_bytes())?;
            self.w.write_all(&rank.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Reads either draw-log flavor, sniffing the binary magic.
pub fn read_draw_log_file(path: &Path) -> Result<PosteriorSamples> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 6];
    let got = file.read(&mut magic)?;
    if got == DRAWLOG_MAGIC.len() && &magic == DRAWLOG_MAGIC {
        read_bin_draw_log(BufReader::new(file))
    } else {
        drop(file);
        read_csv_draw_log(BufReader::new(File::open(path)?))
    }
}

fn read_bin_draw_log<R: Read>(mut r: R) -> Result<PosteriorSamples> {
    let mut skip = [0u8; 16];
    r.read_exact(&mut skip)?; // config hash
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let n_items = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut u32buf)?;
    let n_star = u32::from_le_bytes(u32buf) as usize;
    if n_star == 0 || n_star > n_items {
        return Err(Error::DataFormat("binary draw log header invalid".into()));
    }
    let mut draws = Vec::new();
    let mut u64buf = [0u8; 8];
    let mut u16buf = [0u8; 2];
    loop {
        match r.read_exact(&mut u32buf) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        }
        let chain = u32::from_le_bytes(u32buf);
        r.read_exact(&mut u64buf)?;
        let iteration = u64::from_le_bytes(u64buf);
        let mut pairs = Vec::with_capacity(n_star);
        for _ in 0..n_star {
            r.read_exact(&mut u32buf)?;
            let item = u32::from_le_bytes(u32buf) as usize;
            r.read_exact(&mut u16buf)?;
            let rank = u32::from(u16::from_le_bytes(u16buf));
            pairs.push((item, rank));
        }
        draws.push((chain, iteration, pairs));
    }
    PosteriorSamples::from_draws(n_items, n_star, draws)
}

fn read_csv_draw_log<R: std::io::BufRead>(mut r: R) -> Result<PosteriorSamples> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let header = header.trim();
    if !header.starts_with("# lowbmm-draws v1 ") {
        return Err(Error::DataFormat("not a draw log (missing header)".into()));
    }
    let mut n_items = None;
    let mut n_star = None;
    for token in header.split_whitespace() {
        if let Some(v) = token.strip_prefix("n=") {
            n_items = v.parse::<usize>().ok();
        } else if let Some(v) = token.strip_prefix("n_star=") {
            n_star = v.parse::<usize>().ok();
        }
    }
    let (n_items, n_star) = match (n_items, n_star) {
        (Some(n), Some(k)) if k >= 1 && k <= n => (n, k),
        _ => return Err(Error::DataFormat("draw log header lacks dimensions".into())),
    };

    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let mut draws: Vec<(u32, u64, Vec<(usize, u32)>)> = Vec::new();
    let mut current: Option<(u32, u64)> = None;
    let mut pairs: Vec<(usize, u32)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != 4 {
            return Err(Error::DataFormat("draw log row needs 4 fields".into()));
        }
        let parse_err = |f: &str| Error::DataFormat(format!("bad draw log field {f:?}"));
        let chain: u32 = record[0].parse().map_err(|_| parse_err(&record[0]))?;
        let iteration: u64 = record[1].parse().map_err(|_| parse_err(&record[1]))?;
        let item: usize = record[2].parse().map_err(|_| parse_err(&record[2]))?;
        let rank: u32 = record[3].parse().map_err(|_| parse_err(&record[3]))?;
        if current != Some((chain, iteration)) {
            if let Some((c, it)) = current.take() {
                draws.push((c, it, std::mem::take(&mut pairs)));
            }
            current = Some((chain, iteration));
        }
        pairs.push((item, rank));
    }
    if let Some((c, it)) = current {
        draws.push((c, it, pairs));
    }
    PosteriorSamples::from_draws(n_items, n_star, draws)
}

// ---------------------------------------------------------------------------
// Plot tables
// ---------------------------------------------------------------------------

pub fn write_heatplot_csv<W: Write>(
    mut w: W,
    cells: &[HeatplotCell],
    item_ids: &[String],
) -> Result<()> {
    writeln!(w, "item_id,rank,probability,w_bar")?;
    for c in cells {
        writeln!(
            w,
            "{},{},{},{}",
            item_ids[c.item], c.rank, c.probability, c.w_bar
        )?;
    }
    Ok(())
}

pub fn write_violin_csv<W: Write>(
    mut w: W,
    cells: &[ViolinCell],
    item_ids: &[String],
) -> Result<()> {
    writeln!(w, "item_id,top_k,probability")?;
    for c in cells {
        writeln!(w, "{},{},{}", item_ids[c.item], c.top_k, c.probability)?;
    }
    Ok(())
}

/// Trace of the stored ranks of selected items, one row per
/// `(draw, included item)`.
pub fn write_trace_csv<W: Write>(
    mut w: W,
    samples: &PosteriorSamples,
    items: &[usize],
    item_ids: &[String],
) -> Result<()> {
    writeln!(w, "chain,iteration,item_id,rank")?;
    for (chain, iteration, draw_items, ranks) in samples.draws() {
        for (&item, &rank) in draw_items.iter().zip(ranks) {
            if items.contains(&(item as usize)) {
                writeln!(
                    w,
                    "{chain},{iteration},{},{rank}",
                    item_ids[item as usize]
                )?;
            }
        }
    }
    Ok(())
}

/// Per-repetition benchmark rows; `d_norm` may print as `Inf`.
pub fn write_bench_runs_csv<W: Write>(mut w: W, results: &[BenchResult]) -> Result<()> {
    writeln!(
        w,
        "scenario,method,repetition,n_corr,coverage,d_norm,d_r,wall_time_sec,error"
    )?;
    for result in results {
        for rec in &result.records {
            match (&rec.report, &rec.error) {
                (Some(rep), _) => writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},",
                    rec.scenario,
                    rec.method.label(),
                    rec.repetition,
                    rep.n_corr,
                    rep.coverage,
                    fmt_inf(rep.d_norm),
                    rep.d_r,
                    rep.wall_time_sec
                )?,
                (None, err) => writeln!(
                    w,
                    "{},{},{},,,,,,{}",
                    rec.scenario,
                    rec.method.label(),
                    rec.repetition,
                    err.clone().unwrap_or_default().replace(',', ";")
                )?,
            }
        }
    }
    Ok(())
}

fn fmt_inf(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        "Inf".to_string()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchAggregateFile<'a> {
    pub schema: &'a str,
    pub seed: u64,
    pub scenarios: &'a [BenchResult],
}

pub fn bench_aggregate_file(seed: u64, results: &[BenchResult]) -> BenchAggregateFile<'_> {
    BenchAggregateFile {
        schema: BENCH_SCHEMA,
        seed,
        scenarios: results,
    }
}

// ---------------------------------------------------------------------------
// JSON plumbing
// ---------------------------------------------------------------------------

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
