// SPDX-License-Identifier: Apache-2.0

//! Sweeps over ranges of quadratic fields: the proportion of fields with
//! nontrivial torsion against the Cohen-Lenstra average, with resumable
//! checkpoints and CSV/JSON output.
//!
//! A survey directory holds `fields.csv` (one record per field, in stream
//! order), `checkpoint.json`, and once finished `table.csv` / `table.json`.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes_up_to;
use crate::heuristics::{adjusted_average_p3, cl_average, SplittingProfile, DEFAULT_TOL};
use crate::quadfield::make_field;
use crate::rayclass::{torsion_structure, DEFAULT_N_MAX};

pub const FIELDS_FILE: &str = "fields.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const TABLE_CSV: &str = "table.csv";
pub const TABLE_JSON: &str = "table.json";

#[derive(Debug, thiserror::Error)]
pub enum SurveyError {
    #[error("invalid survey configuration: {0}")]
    Config(String),
    #[error("checkpoint in {0} belongs to a different survey")]
    CheckpointMismatch(PathBuf),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Real,
    Imaginary,
}

impl Signature {
    /// The shift `u` of the average the survey compares against.
    pub fn default_u(self) -> u32 {
        match self {
            Signature::Real => 0,
            Signature::Imaginary => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub p: u64,
    pub d_min: i64,
    pub d_max: i64,
    pub sign: Signature,
    pub exclude_6_mod_9: bool,
    pub n_max: u32,
    pub checkpoint_every: usize,
    pub out_dir: PathBuf,
}

impl SurveyConfig {
    pub fn new(p: u64, d_min: i64, d_max: i64, sign: Signature, out_dir: impl Into<PathBuf>) -> Self {
        SurveyConfig {
            p,
            d_min,
            d_max,
            sign,
            exclude_6_mod_9: false,
            n_max: DEFAULT_N_MAX,
            checkpoint_every: 2000,
            out_dir: out_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<(), SurveyError> {
        if !crate::arith::is_prime(self.p) {
            return Err(SurveyError::Config(format!("{} is not prime", self.p)));
        }
        if self.checkpoint_every == 0 {
            return Err(SurveyError::Config("checkpoint interval must be positive".into()));
        }
        if self.d_min <= self.d_max {
            let ok = match self.sign {
                Signature::Real => self.d_min > 0,
                Signature::Imaginary => self.d_max < 0,
            };
            if !ok {
                return Err(SurveyError::Config(format!(
                    "range [{}, {}] does not match a {:?} survey",
                    self.d_min, self.d_max, self.sign
                )));
            }
        }
        Ok(())
    }

    /// Largest `|d|` in the range.
    pub fn bound(&self) -> u64 {
        if self.d_min > self.d_max {
            0
        } else {
            self.d_min.unsigned_abs().max(self.d_max.unsigned_abs())
        }
    }

    /// The fields surveyed, after the optional `d = 6 mod 9` filter.
    pub fn fields(&self) -> Vec<i64> {
        let mut ds = squarefree_stream(self.d_min, self.d_max, self.sign);
        if self.exclude_6_mod_9 {
            ds.retain(|d| d.rem_euclid(9) != 6);
        }
        ds
    }

    /// The average the observed frequency is compared with.
    pub fn selected_average(&self) -> f64 {
        let m = cl_average(self.p, &SplittingProfile::uniform(1, 1), self.sign.default_u(), DEFAULT_TOL);
        // d = 6 mod 9 forces nontrivial 3-torsion on one eighth of the real fields
        if self.p == 3 && self.sign == Signature::Real && !self.exclude_6_mod_9 {
            adjusted_average_p3(m)
        } else {
            m
        }
    }

    fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            p: self.p,
            d_min: self.d_min,
            d_max: self.d_max,
            sign: self.sign,
            exclude_6_mod_9: self.exclude_6_mod_9,
            n_max: self.n_max,
        }
    }
}

/// Squarefree `d` in `[d_min, d_max]` of the given sign, ascending in `|d|`.
/// `d = 1` is skipped since it gives no quadratic field.
pub fn squarefree_stream(d_min: i64, d_max: i64, sign: Signature) -> Vec<i64> {
    let (lo, hi) = match sign {
        Signature::Real => (d_min.max(2), d_max),
        Signature::Imaginary => (d_max.min(-1).checked_neg().unwrap_or(i64::MAX), d_min.checked_neg().unwrap_or(i64::MAX)),
    };
    if lo > hi {
        return Vec::new();
    }
    let (lo, hi) = (lo as u64, hi as u64);
    let len = (hi - lo + 1) as usize;
    let mut free = vec![true; len];
    let root = crate::arith::isqrt(hi as u128) as u64;
    for q in primes_up_to(root) {
        let sq = q * q;
        let mut m = lo.div_ceil(sq) * sq;
        while m <= hi {
            free[(m - lo) as usize] = false;
            m += sq;
        }
    }
    let sign = if sign == Signature::Real { 1 } else { -1 };
    (0..len).filter(|&i| free[i]).map(|i| sign * (lo + i as u64) as i64).collect()
}

/// One surveyed field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub d: i64,
    pub nontrivial: Option<bool>,
    /// Invariant factors of the torsion, e.g. `[3,9]`.
    pub torsion: Option<String>,
    pub stabilization_level: Option<u32>,
    pub error: Option<String>,
}

impl FieldRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Computes the record of one field; failures are captured, not raised.
pub fn survey_field(d: i64, p: u64, n_max: u32) -> FieldRecord {
    let outcome = make_field(d).and_then(|k| torsion_structure(&k, p, n_max));
    match outcome {
        Ok(rep) => FieldRecord {
            d,
            nontrivial: Some(!rep.torsion.is_empty()),
            torsion: Some(rep.torsion.to_string()),
            stabilization_level: Some(rep.stabilization_level),
            error: None,
        },
        Err(e) => FieldRecord { d, nontrivial: None, torsion: None, stabilization_level: None, error: Some(e.to_string()) },
    }
}

/// Summary line of a survey.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub p: u64,
    /// Largest `|d|` in the range.
    pub n: u64,
    pub count_total: u64,
    pub count_nontrivial: u64,
    pub count_failed: u64,
    pub f_exp: Option<f64>,
    pub m: f64,
    pub delta: Option<f64>,
}

impl FrequencyRow {
    pub fn new(p: u64, n: u64, m: f64, count_total: u64, count_nontrivial: u64, count_failed: u64) -> Self {
        let f_exp = (count_total > 0).then(|| count_nontrivial as f64 / count_total as f64);
        let delta = f_exp.map(|f| (f - m).abs() / m);
        FrequencyRow { p, n, count_total, count_nontrivial, count_failed, f_exp, m, delta }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Fingerprint {
    p: u64,
    d_min: i64,
    d_max: i64,
    sign: Signature,
    exclude_6_mod_9: bool,
    n_max: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Checkpoint {
    survey: Fingerprint,
    next_index: usize,
    /// Length of `fields.csv` covering exactly the first `next_index` fields.
    records_bytes: u64,
    total: u64,
    nontrivial: u64,
    failed: u64,
}

#[derive(Clone, Debug)]
pub struct SurveyOutcome {
    pub row: FrequencyRow,
    pub records: Vec<FieldRecord>,
}

#[derive(Clone, Debug)]
pub enum SurveyProgress {
    Complete(SurveyOutcome),
    /// Stopped after a checkpoint; `next_index` fields are done.
    Interrupted { next_index: usize },
}

/// Runs (or resumes) the survey to completion.
pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyOutcome, SurveyError> {
    match run_survey_chunks(cfg, None)? {
        SurveyProgress::Complete(out) => Ok(out),
        SurveyProgress::Interrupted { .. } => unreachable!("no chunk limit"),
    }
}

/// Runs at most `max_chunks` checkpoint intervals, then stops.
pub fn run_survey_chunks(cfg: &SurveyConfig, max_chunks: Option<usize>) -> Result<SurveyProgress, SurveyError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir)?;
    let fields = cfg.fields();
    let records_path = cfg.out_dir.join(FIELDS_FILE);
    let checkpoint_path = cfg.out_dir.join(CHECKPOINT_FILE);

    let mut state = match read_checkpoint(&checkpoint_path)? {
        Some(cp) if cp.survey == cfg.fingerprint() => {
            let f = OpenOptions::new().write(true).open(&records_path)?;
            f.set_len(cp.records_bytes)?;
            cp
        }
        Some(_) => return Err(SurveyError::CheckpointMismatch(cfg.out_dir.clone())),
        None => {
            let mut w = csv::Writer::from_path(&records_path)?;
            w.write_record(["d", "nontrivial", "torsion", "stabilization_level", "error"])?;
            w.flush()?;
            let records_bytes = fs::metadata(&records_path)?.len();
            let cp = Checkpoint {
                survey: cfg.fingerprint(),
                next_index: 0,
                records_bytes,
                total: 0,
                nontrivial: 0,
                failed: 0,
            };
            write_checkpoint(&checkpoint_path, &cp)?;
            cp
        }
    };

    let mut chunks_done = 0;
    while state.next_index < fields.len() {
        if max_chunks.is_some_and(|m| chunks_done >= m) {
            return Ok(SurveyProgress::Interrupted { next_index: state.next_index });
        }
        let end = (state.next_index + cfg.checkpoint_every).min(fields.len());
        let batch: Vec<FieldRecord> =
            fields[state.next_index..end].par_iter().map(|&d| survey_field(d, cfg.p, cfg.n_max)).collect();
        let file = OpenOptions::new().append(true).open(&records_path)?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        for r in &batch {
            w.serialize(r)?;
            match r.nontrivial {
                Some(nt) => {
                    state.total += 1;
                    state.nontrivial += nt as u64;
                }
                None => state.failed += 1,
            }
        }
        w.flush()?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        state.next_index = end;
        state.records_bytes = fs::metadata(&records_path)?.len();
        write_checkpoint(&checkpoint_path, &state)?;
        chunks_done += 1;
    }

    let row = FrequencyRow::new(cfg.p, cfg.bound(), cfg.selected_average(), state.total, state.nontrivial, state.failed);
    emit_table(std::slice::from_ref(&row), &cfg.out_dir)?;
    let records = read_records(&records_path)?;
    Ok(SurveyProgress::Complete(SurveyOutcome { row, records }))
}

fn read_checkpoint(path: &Path) -> Result<Option<Checkpoint>, SurveyError> {
    match fs::read(path) {
        Ok(bytes) => Ok(Some(serde_json::from_slice(&bytes)?)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Write-to-temp then rename, so a checkpoint is never half written.
fn write_checkpoint(path: &Path, cp: &Checkpoint) -> Result<(), SurveyError> {
    let tmp = path.with_extension("json.tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(&serde_json::to_vec_pretty(cp)?)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<FieldRecord>, SurveyError> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().collect::<Result<Vec<FieldRecord>, _>>().map_err(Into::into)
}

fn fmt5(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.5}")).unwrap_or_default()
}

/// Writes `table.csv` (columns `p,M,f_exp,delta,N,total,nontrivial,failed`,
/// five decimals) and `table.json` (full precision) into `dir`.
pub fn emit_table(rows: &[FrequencyRow], dir: &Path) -> Result<(), SurveyError> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join(TABLE_CSV))?;
    w.write_record(["p", "M", "f_exp", "delta", "N", "total", "nontrivial", "failed"])?;
    for r in rows {
        w.write_record([
            r.p.to_string(),
            format!("{:.5}", r.m),
            fmt5(r.f_exp),
            fmt5(r.delta),
            r.n.to_string(),
            r.count_total.to_string(),
            r.count_nontrivial.to_string(),
            r.count_failed.to_string(),
        ])?;
    }
    w.flush()?;
    fs::write(dir.join(TABLE_JSON), serde_json::to_vec_pretty(rows)?)?;
    Ok(())
}

pub fn read_table_json(dir: &Path) -> Result<Vec<FrequencyRow>, SurveyError> {
    Ok(serde_json::from_slice(&fs::read(dir.join(TABLE_JSON))?)?)
}
