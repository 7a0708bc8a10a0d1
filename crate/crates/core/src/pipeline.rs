//! End-to-end orchestration of the two stages.
//!
//! Stage one pools every query's sentences into one relevance classifier;
//! the cosine feature uses a vocabulary fitted per query. Stage two fits one
//! global vocabulary and trains a one-vs-one stance classifier whose
//! relevance flag comes from gold labels at training time and from stage-one
//! predictions at prediction time.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{group_by_query, split_train_dev, CorpusError, Relevance, SentenceRecord, Stance};
use crate::features::{
    self, fit_vocabulary, task1_features, task2_features, FeatureError, FeatureVector, VocabularyModel,
};
use crate::lexicons::{GlossDictionary, NounLexicon, SentimentLexicon};
use crate::svm::{self, train_multiclass, KernelConfig, MulticlassModel, SvmConfig, SvmError};
use crate::textproc::tokenize;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error("record {index} has no stance label")]
    MissingStanceLabel { index: usize },
    #[error("record {index} has no relevance label")]
    MissingRelevanceLabel { index: usize },
    #[error("{records} records but {labels} relevance labels")]
    AlignmentError { records: usize, labels: usize },
    #[error("{gold} gold labels, {predicted} predictions, {groups} group ids")]
    LengthMismatch {
        gold: usize,
        predicted: usize,
        groups: usize,
    },
    #[error("nothing to evaluate")]
    EmptyInput,
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("model predicted unknown label `{0}`")]
    UnknownLabel(String),
    #[error("model file holds a {found} model, expected {expected}")]
    WrongTask {
        expected: &'static str,
        found: &'static str,
    },
    #[error("training data contains no {0} rows")]
    NoTrainingRows(&'static str),
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

/// Which stance labels stage two distinguishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StanceMode {
    /// support / oppose / neutral over every sentence.
    #[default]
    ThreeClass,
    /// support / oppose over relevant sentences; irrelevant ones are neutral.
    TwoClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub task1: SvmConfig,
    pub task2: SvmConfig,
    pub stance_classes: StanceMode,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    /// C = 1e7 for both stages, cubic polynomial kernel with gamma 0.006 for
    /// relevance, RBF with gamma 0.005 for stance, 60/40 tuning split.
    fn default() -> Self {
        PipelineConfig {
            task1: SvmConfig::new(1e7, KernelConfig::poly(0.006)),
            task2: SvmConfig::new(1e7, KernelConfig::rbf(0.005)),
            stance_classes: StanceMode::ThreeClass,
            train_fraction: 0.6,
            seed: 0,
        }
    }
}

/// Stage-one classifier with the per-query vocabularies it was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceModel {
    pub classifier: MulticlassModel,
    pub vocabularies: BTreeMap<String, VocabularyModel>,
    pub svm: SvmConfig,
}

/// Stage-two classifier with its global vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StanceModel {
    pub classifier: MulticlassModel,
    pub vocabulary: VocabularyModel,
    pub stance_classes: StanceMode,
    pub svm: SvmConfig,
}

/// Both stages plus the configuration they were trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPipeline {
    pub relevance: RelevanceModel,
    pub stance: StanceModel,
    pub config: PipelineConfig,
}

/// Loaded word resources.
#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    pub gloss: GlossDictionary,
    pub nouns: NounLexicon,
    pub sentiment: SentimentLexicon,
}

fn relevance_of(records: &[SentenceRecord]) -> Result<Vec<Relevance>> {
    records
        .iter()
        .enumerate()
        .map(|(index, r)| r.relevance.ok_or(PipelineError::MissingRelevanceLabel { index }))
        .collect()
}

fn fit_group_vocabularies(records: &[SentenceRecord]) -> Result<BTreeMap<String, VocabularyModel>> {
    let mut vocabularies = BTreeMap::new();
    for group in group_by_query(records)? {
        let sentences: Vec<Vec<String>> = group.records.iter().map(|r| tokenize(&r.sentence_text)).collect();
        vocabularies.insert(group.query_id, fit_vocabulary(&sentences)?);
    }
    Ok(vocabularies)
}

/// Stage-one vectors. Queries missing from `vocabularies` get a vocabulary
/// fitted on their own sentences.
pub fn relevance_features(
    records: &[SentenceRecord],
    vocabularies: &BTreeMap<String, VocabularyModel>,
    gloss: &GlossDictionary,
    nouns: &NounLexicon,
) -> Result<Vec<FeatureVector>> {
    let fallback = {
        let unseen: Vec<SentenceRecord> = records
            .iter()
            .filter(|r| !vocabularies.contains_key(&r.query_id))
            .cloned()
            .collect();
        if unseen.is_empty() {
            BTreeMap::new()
        } else {
            fit_group_vocabularies(&unseen)?
        }
    };
    Ok(records
        .iter()
        .map(|r| {
            let vocab = vocabularies
                .get(&r.query_id)
                .or_else(|| fallback.get(&r.query_id))
                .expect("vocabulary fitted for every query");
            task1_features(&r.query_text, &r.sentence_text, vocab, gloss, nouns)
        })
        .collect())
}

/// Trains the pooled relevance classifier.
pub fn train_task1(
    records: &[SentenceRecord],
    cfg: &SvmConfig,
    seed: u64,
    gloss: &GlossDictionary,
    nouns: &NounLexicon,
) -> Result<RelevanceModel> {
    let labels = relevance_of(records)?;
    let vocabularies = fit_group_vocabularies(records)?;
    let x = relevance_features(records, &vocabularies, gloss, nouns)?;
    let y: Vec<&str> = labels.iter().map(|l| l.as_str()).collect();
    let classifier = train_multiclass(&x, &y, cfg, seed)?;
    Ok(RelevanceModel {
        classifier,
        vocabularies,
        svm: *cfg,
    })
}

/// One relevance label per record, in input order.
pub fn predict_task1(
    model: &RelevanceModel,
    records: &[SentenceRecord],
    gloss: &GlossDictionary,
    nouns: &NounLexicon,
) -> Result<Vec<Relevance>> {
    let x = relevance_features(records, &model.vocabularies, gloss, nouns)?;
    x.iter()
        .map(|v| {
            let label = model.classifier.predict(v)?;
            label
                .parse()
                .map_err(|_| PipelineError::UnknownLabel(label.to_string()))
        })
        .collect()
}

/// Stage-two vectors for records paired with relevance flags.
pub fn stance_features(
    records: &[SentenceRecord],
    relevance: &[Relevance],
    vocabulary: &VocabularyModel,
    sentiment: &SentimentLexicon,
) -> Result<Vec<FeatureVector>> {
    if records.len() != relevance.len() {
        return Err(PipelineError::AlignmentError {
            records: records.len(),
            labels: relevance.len(),
        });
    }
    records
        .iter()
        .zip(relevance)
        .map(|(r, rel)| {
            Ok(task2_features(
                &r.sentence_text,
                rel.is_relevant(),
                vocabulary,
                sentiment,
            )?)
        })
        .collect()
}

/// Trains the stance classifier. `task1_labels` supplies each record's
/// relevance flag.
pub fn train_task2(
    records: &[SentenceRecord],
    task1_labels: &[Relevance],
    cfg: &SvmConfig,
    mode: StanceMode,
    seed: u64,
    sentiment: &SentimentLexicon,
) -> Result<StanceModel> {
    if records.len() != task1_labels.len() {
        return Err(PipelineError::AlignmentError {
            records: records.len(),
            labels: task1_labels.len(),
        });
    }
    let stances: Vec<Stance> = records
        .iter()
        .enumerate()
        .map(|(index, r)| r.stance.ok_or(PipelineError::MissingStanceLabel { index }))
        .collect::<Result<_>>()?;

    let sentences: Vec<Vec<String>> = records.iter().map(|r| tokenize(&r.sentence_text)).collect();
    let vocabulary = fit_vocabulary(&sentences)?;

    let keep: Vec<usize> = (0..records.len())
        .filter(|&i| mode == StanceMode::ThreeClass || stances[i] != Stance::Neutral)
        .collect();
    if keep.is_empty() {
        return Err(PipelineError::NoTrainingRows("support/oppose"));
    }
    let x: Vec<FeatureVector> = keep
        .iter()
        .map(|&i| {
            task2_features(
                &records[i].sentence_text,
                task1_labels[i].is_relevant(),
                &vocabulary,
                sentiment,
            )
        })
        .collect::<Result<_, _>>()?;
    let y: Vec<&str> = keep.iter().map(|&i| stances[i].as_str()).collect();
    let classifier = train_multiclass(&x, &y, cfg, seed)?;
    Ok(StanceModel {
        classifier,
        vocabulary,
        stance_classes: mode,
        svm: *cfg,
    })
}

/// One stance label per record. In two-class mode, records flagged
/// irrelevant are neutral without consulting the classifier.
pub fn predict_task2(
    model: &StanceModel,
    records: &[SentenceRecord],
    task1_predictions: &[Relevance],
    sentiment: &SentimentLexicon,
) -> Result<Vec<Stance>> {
    if records.len() != task1_predictions.len() {
        return Err(PipelineError::AlignmentError {
            records: records.len(),
            labels: task1_predictions.len(),
        });
    }
    records
        .iter()
        .zip(task1_predictions)
        .map(|(r, rel)| {
            if model.stance_classes == StanceMode::TwoClass && !rel.is_relevant() {
                return Ok(Stance::Neutral);
            }
            let x = task2_features(&r.sentence_text, rel.is_relevant(), &model.vocabulary, sentiment)?;
            let label = model.classifier.predict(&x)?;
            label
                .parse()
                .map_err(|_| PipelineError::UnknownLabel(label.to_string()))
        })
        .collect()
}

impl TrainedPipeline {
    /// Trains both stages on labelled records (gold relevance feeds stage two).
    pub fn train(records: &[SentenceRecord], lexicons: &Lexicons, config: &PipelineConfig) -> Result<Self> {
        let relevance = train_task1(records, &config.task1, config.seed, &lexicons.gloss, &lexicons.nouns)?;
        let gold = relevance_of(records)?;
        let stance = train_task2(
            records,
            &gold,
            &config.task2,
            config.stance_classes,
            config.seed,
            &lexicons.sentiment,
        )?;
        Ok(TrainedPipeline {
            relevance,
            stance,
            config: *config,
        })
    }

    /// Stage one, then stage two on the stage-one output.
    pub fn predict(&self, records: &[SentenceRecord], lexicons: &Lexicons) -> Result<Vec<(Relevance, Stance)>> {
        let rel = predict_task1(&self.relevance, records, &lexicons.gloss, &lexicons.nouns)?;
        let stance = predict_task2(&self.stance, records, &rel, &lexicons.sentiment)?;
        Ok(rel.into_iter().zip(stance).collect())
    }
}

/// Accuracy for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryAccuracy {
    pub query_id: String,
    pub correct: usize,
    pub total: usize,
    /// Percentage, `100 * correct / total`.
    pub accuracy: f64,
}

/// Per-query percentage accuracy and their unweighted mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rows: Vec<QueryAccuracy>,
    pub macro_average: f64,
}

/// Unweighted mean.
pub fn macro_average(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Scores predictions query by query; rows follow first appearance.
pub fn evaluate<L: PartialEq, G: AsRef<str>>(gold: &[L], predicted: &[L], groups: &[G]) -> Result<EvaluationReport> {
    if gold.len() != predicted.len() || gold.len() != groups.len() {
        return Err(PipelineError::LengthMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
            groups: groups.len(),
        });
    }
    if gold.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    let mut rows: Vec<QueryAccuracy> = Vec::new();
    for ((g, p), q) in gold.iter().zip(predicted).zip(groups) {
        let q = q.as_ref();
        let row = match rows.iter_mut().position(|r| r.query_id == q) {
            Some(i) => &mut rows[i],
            None => {
                rows.push(QueryAccuracy {
                    query_id: q.to_string(),
                    correct: 0,
                    total: 0,
                    accuracy: 0.0,
                });
                rows.last_mut().expect("just pushed")
            }
        };
        row.total += 1;
        if g == p {
            row.correct += 1;
        }
    }
    for row in &mut rows {
        row.accuracy = 100.0 * row.correct as f64 / row.total as f64;
    }
    Ok(EvaluationReport::from_rows(rows))
}

impl EvaluationReport {
    pub fn from_rows(rows: Vec<QueryAccuracy>) -> Self {
        let accs: Vec<f64> = rows.iter().map(|r| r.accuracy).collect();
        EvaluationReport {
            macro_average: macro_average(&accs),
            rows,
        }
    }

    /// Builds a report from per-query percentages alone.
    pub fn from_accuracies<S: AsRef<str>>(rows: &[(S, f64)]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|(q, acc)| QueryAccuracy {
                    query_id: q.as_ref().to_string(),
                    correct: 0,
                    total: 0,
                    accuracy: *acc,
                })
                .collect(),
        )
    }

    /// `query_id,accuracy` rows then a `MACRO_AVERAGE` row, eight decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("query_id,accuracy\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:.8}", csv_field(&r.query_id), r.accuracy);
        }
        let _ = writeln!(out, "MACRO_AVERAGE,{:.8}", self.macro_average);
        out
    }

    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.query_id.chars().count())
            .chain(["MACRO_AVERAGE".len(), "Query".len()])
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>7}  {:>12}",
            "Query", "Correct", "Total", "Accuracy"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>7}  {:>7}  {:>12.8}",
                r.query_id, r.correct, r.total, r.accuracy
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>7}  {:>12.8}",
            "MACRO_AVERAGE", "", "", self.macro_average
        );
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Which stage a grid search tunes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Relevance,
    Stance,
}

/// Outcome of [`grid_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: SvmConfig,
    /// Percentage accuracy of `best` on the dev side.
    pub dev_accuracy: f64,
    /// Dev accuracy of every grid point, in grid order.
    pub scores: Vec<f64>,
}

/// Tunes one stage on a seeded, stratified train/dev split. The first grid
/// point reaching the top dev accuracy wins. Stage two uses gold relevance
/// flags on both sides of the split.
pub fn grid_search(
    records: &[SentenceRecord],
    grid: &[SvmConfig],
    cfg: &PipelineConfig,
    task: Task,
    lexicons: &Lexicons,
) -> Result<GridResult> {
    if grid.is_empty() {
        return Err(PipelineError::EmptyGrid);
    }
    let split = split_train_dev(records, cfg.train_fraction, cfg.seed)?;
    let mut scores = Vec::with_capacity(grid.len());
    for point in grid {
        let score = match task {
            Task::Relevance => {
                let model = train_task1(&split.train, point, cfg.seed, &lexicons.gloss, &lexicons.nouns)?;
                let predicted = predict_task1(&model, &split.dev, &lexicons.gloss, &lexicons.nouns)?;
                accuracy(&relevance_of(&split.dev)?, &predicted)
            }
            Task::Stance => {
                let train_rel = relevance_of(&split.train)?;
                let model = train_task2(
                    &split.train,
                    &train_rel,
                    point,
                    cfg.stance_classes,
                    cfg.seed,
                    &lexicons.sentiment,
                )?;
                let dev_rel = relevance_of(&split.dev)?;
                let predicted = predict_task2(&model, &split.dev, &dev_rel, &lexicons.sentiment)?;
                let gold: Vec<Stance> = split
                    .dev
                    .iter()
                    .enumerate()
                    .map(|(index, r)| r.stance.ok_or(PipelineError::MissingStanceLabel { index }))
                    .collect::<Result<_>>()?;
                accuracy(&gold, &predicted)
            }
        };
        scores.push(score);
    }
    let best = first_argmax(&scores);
    Ok(GridResult {
        best: grid[best],
        dev_accuracy: scores[best],
        scores,
    })
}

fn first_argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

fn accuracy<L: PartialEq>(gold: &[L], predicted: &[L]) -> f64 {
    if gold.is_empty() {
        return 0.0;
    }
    let correct = gold.iter().zip(predicted).filter(|(g, p)| g == p).count();
    100.0 * correct as f64 / gold.len() as f64
}

/// Writes the input columns followed by `predicted_relevance` and/or
/// `predicted_stance`, one row per record in input order.
pub fn write_predictions<W: Write>(
    writer: W,
    records: &[SentenceRecord],
    relevance: Option<&[Relevance]>,
    stance: Option<&[Stance]>,
) -> Result<()> {
    for labels in [relevance.map(<[_]>::len), stance.map(<[_]>::len)]
        .into_iter()
        .flatten()
    {
        if labels != records.len() {
            return Err(PipelineError::AlignmentError {
                records: records.len(),
                labels,
            });
        }
    }
    let mut header: Vec<&str> = crate::corpus::HEADER.to_vec();
    if relevance.is_some() {
        header.push("predicted_relevance");
    }
    if stance.is_some() {
        header.push("predicted_stance");
    }
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| PipelineError::Svm(SvmError::Io(e.into()));
    w.write_record(&header).map_err(io)?;
    for (i, r) in records.iter().enumerate() {
        let mut row = vec![
            r.query_id.as_str(),
            r.query_text.as_str(),
            r.sentence_text.as_str(),
            r.relevance.map_or("", Relevance::as_str),
            r.stance.map_or("", Stance::as_str),
        ];
        if let Some(rel) = relevance {
            row.push(rel[i].as_str());
        }
        if let Some(st) = stance {
            row.push(st[i].as_str());
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| PipelineError::Svm(SvmError::Io(e)))?;
    Ok(())
}

/// Feature dump: a `# schema_id=... dims=... N=...` comment line, a header
/// with `query_id`, `row` and one column per feature, then one row per
/// record. `N` is the TF-IDF block size (0 for stage one).
pub fn write_feature_dump<W: Write>(
    mut writer: W,
    records: &[SentenceRecord],
    vectors: &[FeatureVector],
    schema_id: &str,
    names: &[String],
    tfidf_dims: usize,
) -> Result<()> {
    let io = |e: std::io::Error| PipelineError::Svm(SvmError::Io(e));
    writeln!(writer, "# schema_id={schema_id} dims={} N={tfidf_dims}", names.len()).map_err(io)?;
    let mut line = String::from("query_id,row");
    for n in names {
        line.push(',');
        line.push_str(&csv_field(n));
    }
    writeln!(writer, "{line}").map_err(io)?;
    for (i, (r, v)) in records.iter().zip(vectors).enumerate() {
        line.clear();
        let _ = write!(line, "{},{}", csv_field(&r.query_id), i + 1);
        for x in &v.values {
            // shortest representation that round-trips
            let _ = write!(line, ",{x:?}");
        }
        writeln!(writer, "{line}").map_err(io)?;
    }
    writer.flush().map_err(io)?;
    Ok(())
}

/// Column names of the stage-one dump.
pub fn task1_feature_names() -> Vec<String> {
    features::TASK1_NAMES.iter().map(|s| s.to_string()).collect()
}

/// Column names of the stage-two dump: `tfidf:<term>` per vocabulary slot,
/// then the four tail features.
pub fn task2_feature_names(vocabulary: &VocabularyModel) -> Vec<String> {
    vocabulary
        .terms()
        .iter()
        .map(|t| format!("tfidf:{t}"))
        .chain(features::TASK2_TAIL_NAMES.iter().map(|s| s.to_string()))
        .collect()
}

/// A saved stage model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "lowercase")]
pub enum ModelArtifact {
    Relevance(RelevanceModel),
    Stance(StanceModel),
}

impl ModelArtifact {
    pub fn task_name(&self) -> &'static str {
        match self {
            ModelArtifact::Relevance(_) => "relevance",
            ModelArtifact::Stance(_) => "stance",
        }
    }

    pub fn into_relevance(self) -> Result<RelevanceModel> {
        match self {
            ModelArtifact::Relevance(m) => Ok(m),
            other => Err(PipelineError::WrongTask {
                expected: "relevance",
                found: other.task_name(),
            }),
        }
    }

    pub fn into_stance(self) -> Result<StanceModel> {
        match self {
            ModelArtifact::Stance(m) => Ok(m),
            other => Err(PipelineError::WrongTask {
                expected: "stance",
                found: other.task_name(),
            }),
        }
    }

    /// Compact JSON with a `format_version` field; byte-identical for equal
    /// models.
    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a> {
            format_version: u32,
            #[serde(flatten)]
            artifact: &'a ModelArtifact,
        }
        serde_json::to_writer(
            writer,
            &Doc {
                format_version: svm::FORMAT_VERSION,
                artifact: self,
            },
        )
        .map_err(|e| SvmError::Io(e.into()))?;
        Ok(())
    }

    pub fn read_json<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text).map_err(SvmError::Io)?;
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| SvmError::CorruptModel(e.to_string()))?;
        svm::check_version(&value)?;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("format_version");
        }
        let artifact: ModelArtifact =
            serde_json::from_value(value).map_err(|e| SvmError::CorruptModel(e.to_string()))?;
        artifact.check()?;
        Ok(artifact)
    }

    fn check(&self) -> Result<()> {
        let corrupt = |m: &str| Err(PipelineError::Svm(SvmError::CorruptModel(m.to_string())));
        match self {
            ModelArtifact::Relevance(m) => {
                if m.classifier.schema_id != features::TASK1_SCHEMA || m.classifier.dims != 5 {
                    return corrupt("relevance classifier does not take task1-v1 vectors");
                }
            }
            ModelArtifact::Stance(m) => {
                if m.classifier.schema_id != features::TASK2_SCHEMA || m.classifier.dims != m.vocabulary.len() + 4 {
                    return corrupt("stance classifier does not match its vocabulary");
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path).map_err(SvmError::Io)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_json(&mut w)?;
        w.flush().map_err(SvmError::Io)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_json(std::fs::File::open(path).map_err(SvmError::Io)?)
    }
}
