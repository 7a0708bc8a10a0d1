use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use chis_core::corpus::{load_dataset, Relevance, SentenceRecord, Stance};
use chis_core::features::{fit_vocabulary, task2_features, TASK1_SCHEMA, TASK2_SCHEMA};
use chis_core::lexicons::{GlossDictionary, NounLexicon, SentimentLexicon};
use chis_core::pipeline::{
    evaluate, grid_search, predict_task1, predict_task2, relevance_features, task1_feature_names, task2_feature_names,
    train_task1, train_task2, write_feature_dump, write_predictions, Lexicons, ModelArtifact, PipelineConfig,
    StanceMode, Task,
};
use chis_core::svm::{KernelConfig, SvmConfig};
use chis_core::textproc::tokenize;

use crate::args::{
    ColumnArg, EvaluateArgs, FeaturesArgs, KernelArg, LexiconArgs, PredictArgs, StanceClassesArg, SvmArgs, TaskArg,
    TrainArgs,
};
use crate::manifest::{default_path, ManifestBuilder};

/// Flag combinations clap cannot check on its own; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str, purpose: &str) -> Result<&'a Path> {
    match path {
        Some(p) => Ok(p),
        None => usage(format!("{flag} is required for {purpose}")),
    }
}

struct Loaded {
    lexicons: Lexicons,
    paths: Vec<PathBuf>,
}

/// Loads the lexicons a task needs; the rest stay empty.
fn load_lexicons(args: &LexiconArgs, task1: bool, task2: bool, purpose: &str) -> Result<Loaded> {
    let mut lexicons = Lexicons::default();
    let mut paths = Vec::new();
    if task1 {
        let gloss = required(&args.gloss, "--gloss", purpose)?;
        let nouns = required(&args.nouns, "--nouns", purpose)?;
        lexicons.gloss = GlossDictionary::load(gloss).with_context(|| format!("loading {}", gloss.display()))?;
        lexicons.nouns = NounLexicon::load(nouns).with_context(|| format!("loading {}", nouns.display()))?;
        paths.extend([gloss.to_path_buf(), nouns.to_path_buf()]);
    }
    if task2 {
        let sentiment = required(&args.sentiment, "--sentiment", purpose)?;
        lexicons.sentiment =
            SentimentLexicon::load(sentiment).with_context(|| format!("loading {}", sentiment.display()))?;
        paths.push(sentiment.to_path_buf());
    }
    Ok(Loaded { lexicons, paths })
}

fn load_records(path: &Path, labeled: bool) -> Result<Vec<SentenceRecord>> {
    load_dataset(path, labeled).with_context(|| format!("loading {}", path.display()))
}

fn load_artifact(path: &Path) -> Result<ModelArtifact> {
    ModelArtifact::load(path).with_context(|| format!("loading model {}", path.display()))
}

fn svm_config(args: &SvmArgs, base: SvmConfig) -> Result<SvmConfig> {
    let kind = args.kernel.unwrap_or(match base.kernel {
        KernelConfig::Linear => KernelArg::Linear,
        KernelConfig::Poly { .. } => KernelArg::Poly,
        KernelConfig::Rbf { .. } => KernelArg::Rbf,
    });
    let gamma = args.gamma.or(base.kernel.gamma()).unwrap_or_default();
    let kernel = match kind {
        KernelArg::Linear => KernelConfig::Linear,
        KernelArg::Poly => KernelConfig::Poly {
            gamma,
            degree: args.degree,
            coef0: args.coef0,
        },
        KernelArg::Rbf => KernelConfig::Rbf { gamma },
    };
    let cfg = SvmConfig {
        c: args.c.unwrap_or(base.c),
        kernel,
        tol: args.tol,
        max_passes: args.max_passes,
        eps: base.eps,
    };
    if let Err(e) = cfg.validate() {
        return usage(e.to_string());
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn stance_mode(arg: StanceClassesArg) -> StanceMode {
    match arg {
        StanceClassesArg::ThreeClass => StanceMode::ThreeClass,
        StanceClassesArg::TwoClass => StanceMode::TwoClass,
    }
}

pub fn train(args: &TrainArgs) -> Result<()> {
    let is_task1 = args.task == TaskArg::Relevance;
    let purpose = if is_task1 { "task 1" } else { "task 2" };
    if !(args.train_fraction > 0.0 && args.train_fraction < 1.0) {
        return usage("--train-fraction must lie strictly between 0 and 1");
    }
    let defaults = PipelineConfig::default();
    let base = if is_task1 { defaults.task1 } else { defaults.task2 };
    let svm = svm_config(&args.svm, base)?;
    let mut pipeline_cfg = PipelineConfig {
        stance_classes: stance_mode(args.stance_classes),
        train_fraction: args.train_fraction,
        seed: args.seed,
        ..defaults
    };
    if is_task1 {
        pipeline_cfg.task1 = svm;
    } else {
        pipeline_cfg.task2 = svm;
    }
    let manifest = ManifestBuilder::start(
        "train",
        Some(args.seed),
        json!({
            "task": if is_task1 { 1 } else { 2 },
            "svm": svm,
            "stance_classes": pipeline_cfg.stance_classes,
            "train_fraction": args.train_fraction,
            "tune": args.tune,
            "grid_c": if args.tune { json!(args.grid_c) } else { json!(null) },
            "grid_gamma": if args.tune { json!(args.grid_gamma) } else { json!(null) },
            "retrain_full": args.retrain_full,
        }),
    );

    let loaded = load_lexicons(&args.lexicons, is_task1, !is_task1, purpose)?;
    let records = load_records(&args.data, true)?;
    eprintln!("loaded {} records from {}", records.len(), args.data.display());

    let mut chosen = svm;
    let mut fit_records = records.clone();
    let mut tuning = serde_json::Value::Null;
    if args.tune {
        let mut grid = Vec::new();
        for &c in &args.grid_c {
            if svm.kernel == KernelConfig::Linear {
                grid.push(SvmConfig { c, ..svm });
                continue;
            }
            for &g in &args.grid_gamma {
                grid.push(SvmConfig {
                    c,
                    kernel: svm.kernel.with_gamma(g),
                    ..svm
                });
            }
        }
        for point in &grid {
            if let Err(e) = point.validate() {
                return usage(format!("bad grid point: {e}"));
            }
        }
        let task = if is_task1 { Task::Relevance } else { Task::Stance };
        let result = grid_search(&records, &grid, &pipeline_cfg, task, &loaded.lexicons)?;
        for (point, score) in grid.iter().zip(&result.scores) {
            eprintln!(
                "grid C={} gamma={}: dev accuracy {score:.4}",
                point.c,
                point.kernel.gamma().map_or("-".to_string(), |g| g.to_string())
            );
        }
        eprintln!("selected C={} kernel={:?}", result.best.c, result.best.kernel);
        chosen = result.best;
        tuning = json!({ "grid": grid, "scores": result.scores, "best": result.best });
        if !args.retrain_full {
            fit_records = chis_core::corpus::split_train_dev(&records, args.train_fraction, args.seed)?.train;
        }
    }

    let artifact = if is_task1 {
        ModelArtifact::Relevance(train_task1(
            &fit_records,
            &chosen,
            args.seed,
            &loaded.lexicons.gloss,
            &loaded.lexicons.nouns,
        )?)
    } else {
        let flags = relevance_flags(&fit_records)?;
        ModelArtifact::Stance(train_task2(
            &fit_records,
            &flags,
            &chosen,
            pipeline_cfg.stance_classes,
            args.seed,
            &loaded.lexicons.sentiment,
        )?)
    };
    artifact
        .save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("trained on {} records, wrote {}", fit_records.len(), args.out.display());

    let manifest = if tuning.is_null() {
        manifest
    } else {
        manifest.with("tuning", tuning)
    };
    let mut inputs: Vec<&Path> = vec![&args.data];
    inputs.extend(loaded.paths.iter().map(PathBuf::as_path));
    let manifest_path = args.manifest.clone().unwrap_or_else(|| default_path(&args.out));
    manifest.write(&manifest_path, &inputs, &[&args.out])
}

fn relevance_flags(records: &[SentenceRecord]) -> Result<Vec<Relevance>> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| match r.relevance {
            Some(rel) => Ok(rel),
            None => bail!(
                "row {} has no relevance label; task 2 needs one per row (or use --chain)",
                i + 1
            ),
        })
        .collect()
}

pub fn predict(args: &PredictArgs) -> Result<()> {
    let mut inputs: Vec<PathBuf> = vec![args.data.clone()];
    let (task1, task2, config) = if args.chain {
        let (Some(m1), Some(m2)) = (&args.model1, &args.model2) else {
            return usage("--chain needs --model1 and --model2");
        };
        inputs.extend([m1.clone(), m2.clone()]);
        (Some(m1), Some(m2), json!({ "chain": true }))
    } else {
        let (Some(task), Some(model)) = (args.task, &args.model) else {
            return usage("--task and --model are required without --chain");
        };
        inputs.push(model.clone());
        match task {
            TaskArg::Relevance => (Some(model), None, json!({ "task": 1 })),
            TaskArg::Stance => (None, Some(model), json!({ "task": 2 })),
        }
    };
    let purpose = if args.chain {
        "--chain"
    } else if task1.is_some() {
        "task 1"
    } else {
        "task 2"
    };
    let loaded = load_lexicons(&args.lexicons, task1.is_some(), task2.is_some(), purpose)?;
    let rel_model = match task1 {
        Some(m) => Some(load_artifact(m)?.into_relevance()?),
        None => None,
    };
    let st_model = match task2 {
        Some(m) => Some(load_artifact(m)?.into_stance()?),
        None => None,
    };
    let records = load_records(&args.data, false)?;
    let lex = &loaded.lexicons;

    let relevance = match &rel_model {
        Some(m) => Some(predict_task1(m, &records, &lex.gloss, &lex.nouns)?),
        None => None,
    };
    let stance = match &st_model {
        Some(m) => {
            // chained runs use stage-one output; otherwise the relevance column
            let flags = match &relevance {
                Some(rel) => rel.clone(),
                None => relevance_flags(&records)?,
            };
            Some(predict_task2(m, &records, &flags, &lex.sentiment)?)
        }
        None => None,
    };
    write_predictions(create(&args.out)?, &records, relevance.as_deref(), stance.as_deref())?;
    eprintln!("wrote {} predictions to {}", records.len(), args.out.display());

    inputs.extend(loaded.paths);
    let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let manifest_path = args.manifest.clone().unwrap_or_else(|| default_path(&args.out));
    ManifestBuilder::start("predict", None, config).write(&manifest_path, &inputs, &[&args.out])
}

/// Labels from the predictions file: `predicted_<column>` when present,
/// otherwise `<column>` itself.
fn read_predicted(path: &Path, column: &str) -> Result<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let headers = reader
        .headers()
        .with_context(|| format!("reading {}", path.display()))?
        .clone();
    let wanted = format!("predicted_{column}");
    let Some(idx) = headers
        .iter()
        .position(|h| h == wanted)
        .or_else(|| headers.iter().position(|h| h == column))
    else {
        bail!("{} has neither a {wanted} nor a {column} column", path.display());
    };
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.with_context(|| format!("{} row {}", path.display(), i + 1))?;
        out.push(row.get(idx).unwrap_or("").to_string());
    }
    Ok(out)
}

fn normalize(raw: &str, column: ColumnArg, row: usize, source: &str) -> Result<&'static str> {
    let parsed = match column {
        ColumnArg::Relevance => raw.parse::<Relevance>().map(Relevance::as_str),
        ColumnArg::Stance => raw.parse::<Stance>().map(Stance::as_str),
    };
    parsed.map_err(|_| anyhow::anyhow!("{source} row {row}: bad label `{raw}`"))
}

pub fn evaluate_cmd(args: &EvaluateArgs) -> Result<()> {
    let manifest = ManifestBuilder::start(
        "evaluate",
        None,
        json!({ "column": format!("{:?}", args.column).to_lowercase() }),
    );
    let column = match args.column {
        ColumnArg::Relevance => "relevance",
        ColumnArg::Stance => "stance",
    };
    let gold_records = load_records(&args.gold, false)?;
    let predicted_raw = read_predicted(&args.pred, column)?;
    let mut gold = Vec::with_capacity(gold_records.len());
    for (i, r) in gold_records.iter().enumerate() {
        let label = match args.column {
            ColumnArg::Relevance => r.relevance.map(Relevance::as_str),
            ColumnArg::Stance => r.stance.map(Stance::as_str),
        };
        match label {
            Some(l) => gold.push(l),
            None => bail!("{} row {} has no {column} label", args.gold.display(), i + 1),
        }
    }
    let predicted = predicted_raw
        .iter()
        .enumerate()
        .map(|(i, raw)| normalize(raw, args.column, i + 1, "predictions"))
        .collect::<Result<Vec<_>>>()?;
    let groups: Vec<&str> = gold_records.iter().map(|r| r.query_id.as_str()).collect();
    let report = evaluate(&gold, &predicted, &groups)?;
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(report.to_table().as_bytes())?;
    stdout.flush()?;
    if let Some(out) = &args.out {
        std::fs::write(out, report.to_csv()).with_context(|| format!("cannot write {}", out.display()))?;
        let manifest_path = args.manifest.clone().unwrap_or_else(|| default_path(out));
        manifest.write(&manifest_path, &[&args.gold, &args.pred], &[out])?;
    }
    Ok(())
}

pub fn features(args: &FeaturesArgs) -> Result<()> {
    let is_task1 = args.task == TaskArg::Relevance;
    let purpose = if is_task1 { "task 1 features" } else { "task 2 features" };
    let loaded = load_lexicons(&args.lexicons, is_task1, !is_task1, purpose)?;
    let records = load_records(&args.data, false)?;
    let out = create(&args.out)?;
    if is_task1 {
        let vocabularies = match &args.model {
            Some(m) => load_artifact(m)?.into_relevance()?.vocabularies,
            None => Default::default(),
        };
        let vectors = relevance_features(&records, &vocabularies, &loaded.lexicons.gloss, &loaded.lexicons.nouns)?;
        write_feature_dump(out, &records, &vectors, TASK1_SCHEMA, &task1_feature_names(), 0)?;
    } else {
        let vocabulary = match &args.model {
            Some(m) => load_artifact(m)?.into_stance()?.vocabulary,
            None => {
                let sentences: Vec<Vec<String>> = records.iter().map(|r| tokenize(&r.sentence_text)).collect();
                fit_vocabulary(&sentences)?
            }
        };
        let vectors = records
            .iter()
            .map(|r| {
                let relevant = r.relevance.is_some_and(Relevance::is_relevant);
                task2_features(&r.sentence_text, relevant, &vocabulary, &loaded.lexicons.sentiment)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let names = task2_feature_names(&vocabulary);
        write_feature_dump(out, &records, &vectors, TASK2_SCHEMA, &names, vocabulary.len())?;
    }
    eprintln!("wrote {} feature rows to {}", records.len(), args.out.display());
    let mut inputs: Vec<&Path> = vec![&args.data];
    inputs.extend(loaded.paths.iter().map(PathBuf::as_path));
    if let Some(m) = &args.model {
        inputs.push(m);
    }
    let manifest_path = args.manifest.clone().unwrap_or_else(|| default_path(&args.out));
    ManifestBuilder::start("features", None, json!({ "task": if is_task1 { 1 } else { 2 } })).write(
        &manifest_path,
        &inputs,
        &[&args.out],
    )
}
