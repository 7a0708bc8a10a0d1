//! Sentence datasets: CSV loading, per-query grouping and seeded splits.
//!
//! The on-disk format is a UTF-8 CSV with the exact header
//! `query_id,query_text,sentence_text,relevance,stance`. An empty label cell
//! means the label is absent.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const HEADER: [&str; 5] = ["query_id", "query_text", "sentence_text", "relevance", "stance"];

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read dataset {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("missing or misplaced column `{0}` (header must be query_id,query_text,sentence_text,relevance,stance)")]
    MissingColumn(String),
    #[error("row {row}: bad label `{value}`")]
    BadLabel { row: usize, value: String },
    #[error("row {row}: missing relevance label")]
    MissingLabel { row: usize },
    #[error("row {row}: stance given without a relevance label")]
    StanceWithoutRelevance { row: usize },
    #[error("row {row}: empty query or sentence text")]
    EmptyText { row: usize },
    #[error("row {row}: malformed csv: {message}")]
    MalformedCsv { row: usize, message: String },
    #[error("query `{query_id}` has conflicting texts `{first}` and `{second}`")]
    ConflictingQueryText {
        query_id: String,
        first: String,
        second: String,
    },
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("record {index} has no relevance label")]
    UnlabeledRecord { index: usize },
}

/// Task-1 label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relevance {
    Relevant,
    Irrelevant,
}

impl Relevance {
    pub fn as_str(self) -> &'static str {
        match self {
            Relevance::Relevant => "relevant",
            Relevance::Irrelevant => "irrelevant",
        }
    }

    pub fn is_relevant(self) -> bool {
        self == Relevance::Relevant
    }
}

impl FromStr for Relevance {
    type Err = ();

    /// Case-insensitive, surrounding whitespace ignored.
    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "relevant" => Ok(Relevance::Relevant),
            "irrelevant" => Ok(Relevance::Irrelevant),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Relevance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Task-2 label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Support,
    Oppose,
    Neutral,
}

impl Stance {
    pub fn as_str(self) -> &'static str {
        match self {
            Stance::Support => "support",
            Stance::Oppose => "oppose",
            Stance::Neutral => "neutral",
        }
    }
}

impl FromStr for Stance {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "support" => Ok(Stance::Support),
            "oppose" => Ok(Stance::Oppose),
            "neutral" => Ok(Stance::Neutral),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One dataset row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub query_id: String,
    pub query_text: String,
    pub sentence_text: String,
    pub relevance: Option<Relevance>,
    pub stance: Option<Stance>,
}

impl SentenceRecord {
    pub fn new(query_id: &str, query_text: &str, sentence_text: &str) -> Self {
        SentenceRecord {
            query_id: query_id.to_string(),
            query_text: query_text.to_string(),
            sentence_text: sentence_text.to_string(),
            relevance: None,
            stance: None,
        }
    }

    pub fn with_labels(mut self, relevance: Relevance, stance: Option<Stance>) -> Self {
        self.relevance = Some(relevance);
        self.stance = stance;
        self
    }
}

/// A query and its sentences, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryGroup {
    pub query_id: String,
    pub query_text: String,
    pub records: Vec<SentenceRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<SentenceRecord>,
    pub dev: Vec<SentenceRecord>,
    pub train_fraction: f64,
}

/// Loads a dataset CSV. With `labeled` set, every row must carry a
/// relevance label.
pub fn load_dataset(path: impl AsRef<Path>, labeled: bool) -> Result<Vec<SentenceRecord>, CorpusError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_dataset(file, labeled)
}

/// Same as [`load_dataset`] over any reader. Rows are numbered from 1,
/// not counting the header.
pub fn read_dataset<R: Read>(reader: R, labeled: bool) -> Result<Vec<SentenceRecord>, CorpusError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = csv.headers().map_err(|e| CorpusError::MalformedCsv {
        row: 0,
        message: e.to_string(),
    })?;
    for (i, expected) in HEADER.iter().enumerate() {
        match headers.get(i) {
            Some(h) if h.trim_start_matches('\u{feff}').trim() == *expected => {}
            _ => return Err(CorpusError::MissingColumn(expected.to_string())),
        }
    }
    if headers.len() != HEADER.len() {
        return Err(CorpusError::MalformedCsv {
            row: 0,
            message: format!("expected {} columns, found {}", HEADER.len(), headers.len()),
        });
    }

    let mut records = Vec::new();
    for (i, row) in csv.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| CorpusError::MalformedCsv {
            row: row_no,
            message: e.to_string(),
        })?;
        records.push(parse_row(&row, row_no, labeled)?);
    }
    Ok(records)
}

fn parse_row(row: &csv::StringRecord, row_no: usize, labeled: bool) -> Result<SentenceRecord, CorpusError> {
    let field = |i: usize| row.get(i).unwrap_or("");
    let query_text = field(1).trim();
    let sentence_text = field(2).trim();
    if query_text.is_empty() || sentence_text.is_empty() {
        return Err(CorpusError::EmptyText { row: row_no });
    }
    let relevance = parse_label::<Relevance>(field(3), row_no)?;
    let stance = parse_label::<Stance>(field(4), row_no)?;
    if stance.is_some() && relevance.is_none() {
        return Err(CorpusError::StanceWithoutRelevance { row: row_no });
    }
    if labeled && relevance.is_none() {
        return Err(CorpusError::MissingLabel { row: row_no });
    }
    Ok(SentenceRecord {
        query_id: field(0).trim().to_string(),
        query_text: query_text.to_string(),
        sentence_text: sentence_text.to_string(),
        relevance,
        stance,
    })
}

fn parse_label<T: FromStr>(raw: &str, row: usize) -> Result<Option<T>, CorpusError> {
    if raw.trim().is_empty() {
        return Ok(None);
    }
    raw.parse::<T>().map(Some).map_err(|_| CorpusError::BadLabel {
        row,
        value: raw.to_string(),
    })
}

/// Writes records in the dataset CSV format.
pub fn write_dataset<W: std::io::Write>(writer: W, records: &[SentenceRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(HEADER)?;
    for r in records {
        out.write_record([
            r.query_id.as_str(),
            r.query_text.as_str(),
            r.sentence_text.as_str(),
            r.relevance.map_or("", Relevance::as_str),
            r.stance.map_or("", Stance::as_str),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Groups records by query id, in order of first appearance.
pub fn group_by_query(records: &[SentenceRecord]) -> Result<Vec<QueryGroup>, CorpusError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<QueryGroup> = Vec::new();
    for record in records {
        match index.get(record.query_id.as_str()) {
            Some(&g) => {
                let group = &mut groups[g];
                if group.query_text != record.query_text {
                    return Err(CorpusError::ConflictingQueryText {
                        query_id: record.query_id.clone(),
                        first: group.query_text.clone(),
                        second: record.query_text.clone(),
                    });
                }
                group.records.push(record.clone());
            }
            None => {
                index.insert(record.query_id.as_str(), groups.len());
                groups.push(QueryGroup {
                    query_id: record.query_id.clone(),
                    query_text: record.query_text.clone(),
                    records: vec![record.clone()],
                });
            }
        }
    }
    Ok(groups)
}

/// Stratified, seeded train/dev split.
///
/// Each query group is shuffled with a ChaCha8 generator seeded from `seed`
/// and contributes `round(train_fraction * size)` rows to the train side.
/// Both sides keep the input order.
pub fn split_train_dev(
    records: &[SentenceRecord],
    train_fraction: f64,
    seed: u64,
) -> Result<DatasetSplit, CorpusError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(train_fraction));
    }
    if let Some(index) = records.iter().position(|r| r.relevance.is_none()) {
        return Err(CorpusError::UnlabeledRecord { index });
    }

    let mut by_query: Vec<(&str, Vec<usize>)> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        match by_query.iter_mut().find(|(q, _)| *q == r.query_id) {
            Some((_, rows)) => rows.push(i),
            None => by_query.push((r.query_id.as_str(), vec![i])),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; records.len()];
    for (_, mut rows) in by_query {
        let take = (train_fraction * rows.len() as f64).round() as usize;
        rows.shuffle(&mut rng);
        for &i in &rows[..take] {
            in_train[i] = true;
        }
    }

    let (train, dev): (Vec<_>, Vec<_>) = records.iter().zip(&in_train).partition(|(_, &t)| t);
    Ok(DatasetSplit {
        train: train.into_iter().map(|(r, _)| r.clone()).collect(),
        dev: dev.into_iter().map(|(r, _)| r.clone()).collect(),
        train_fraction,
    })
}
