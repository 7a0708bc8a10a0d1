mod common;

use chis_core::corpus::{split_train_dev, Relevance, SentenceRecord, Stance};
use chis_core::pipeline::{
    evaluate, grid_search, predict_task1, predict_task2, train_task1, train_task2, write_predictions, ModelArtifact,
    PipelineConfig, PipelineError, StanceMode, Task, TrainedPipeline,
};
use chis_core::svm::{KernelConfig, SvmConfig, SvmError};

fn gold_relevance(records: &[SentenceRecord]) -> Vec<Relevance> {
    records.iter().map(|r| r.relevance.unwrap()).collect()
}

fn gold_stance(records: &[SentenceRecord]) -> Vec<Stance> {
    records.iter().map(|r| r.stance.unwrap()).collect()
}

#[test]
fn separable_corpus_is_fit_exactly() {
    let records = common::corpus(3);
    let lex = common::lexicons();
    let cfg = PipelineConfig::default();
    let model = train_task1(&records, &cfg.task1, 0, &lex.gloss, &lex.nouns).unwrap();
    let predicted = predict_task1(&model, &records, &lex.gloss, &lex.nouns).unwrap();
    assert_eq!(predicted, gold_relevance(&records));
    assert_eq!(model.vocabularies.len(), 5);
    assert_eq!(model.classifier.machines.len(), 1);
}

#[test]
fn single_class_relevance_is_rejected() {
    let records: Vec<SentenceRecord> = common::corpus(3)
        .into_iter()
        .filter(|r| r.relevance == Some(Relevance::Relevant))
        .collect();
    let lex = common::lexicons();
    let err = train_task1(&records, &PipelineConfig::default().task1, 0, &lex.gloss, &lex.nouns).unwrap_err();
    assert!(matches!(err, PipelineError::Svm(SvmError::SingleClassInput)));
}

#[test]
fn empty_prediction_input() {
    let records = common::corpus(3);
    let lex = common::lexicons();
    let model = train_task1(&records, &PipelineConfig::default().task1, 0, &lex.gloss, &lex.nouns).unwrap();
    assert!(predict_task1(&model, &[], &lex.gloss, &lex.nouns).unwrap().is_empty());
}

#[test]
fn unseen_query_gets_its_own_vocabulary() {
    let records = common::corpus(3);
    let lex = common::lexicons();
    let model = train_task1(&records, &PipelineConfig::default().task1, 0, &lex.gloss, &lex.nouns).unwrap();
    let fresh: Vec<SentenceRecord> = records
        .iter()
        .filter(|r| r.query_id == "mmr")
        .map(|r| SentenceRecord {
            query_id: "mmr-copy".into(),
            ..r.clone()
        })
        .collect();
    let predicted = predict_task1(&model, &fresh, &lex.gloss, &lex.nouns).unwrap();
    assert_eq!(predicted.len(), fresh.len());
}

#[test]
fn stance_stage_shapes() {
    let records = common::corpus(5);
    let lex = common::lexicons();
    let cfg = PipelineConfig::default();
    let gold = gold_relevance(&records);

    let three = train_task2(&records, &gold, &cfg.task2, StanceMode::ThreeClass, 0, &lex.sentiment).unwrap();
    assert_eq!(three.classifier.machines.len(), 3);
    assert_eq!(three.classifier.dims, three.vocabulary.len() + 4);
    let distinct: std::collections::BTreeSet<String> = records
        .iter()
        .flat_map(|r| chis_core::textproc::tokenize(&r.sentence_text))
        .collect();
    assert_eq!(three.vocabulary.len(), distinct.len());

    let two = train_task2(&records, &gold, &cfg.task2, StanceMode::TwoClass, 0, &lex.sentiment).unwrap();
    assert_eq!(two.classifier.labels, ["oppose", "support"]);
    assert_eq!(two.classifier.machines.len(), 1);

    // irrelevant => neutral; relevant => never neutral
    let flags: Vec<Relevance> = (0..records.len())
        .map(|i| {
            if i % 3 == 0 {
                Relevance::Irrelevant
            } else {
                Relevance::Relevant
            }
        })
        .collect();
    let out = predict_task2(&two, &records, &flags, &lex.sentiment).unwrap();
    for (f, s) in flags.iter().zip(&out) {
        assert_eq!(*f == Relevance::Irrelevant, *s == Stance::Neutral);
    }

    assert!(matches!(
        predict_task2(&three, &records, &flags[1..], &lex.sentiment),
        Err(PipelineError::AlignmentError { .. })
    ));
    let mut unlabeled = records.clone();
    unlabeled[4].stance = None;
    assert!(matches!(
        train_task2(&unlabeled, &gold, &cfg.task2, StanceMode::ThreeClass, 0, &lex.sentiment),
        Err(PipelineError::MissingStanceLabel { index: 4 })
    ));
}

#[test]
fn chained_prediction_on_held_out_split() {
    let records = common::corpus(11);
    let lex = common::lexicons();
    let cfg = PipelineConfig::default();
    let split = split_train_dev(&records, cfg.train_fraction, cfg.seed).unwrap();
    let pipeline = TrainedPipeline::train(&split.train, &lex, &cfg).unwrap();
    let out = pipeline.predict(&split.dev, &lex).unwrap();
    let groups: Vec<&str> = split.dev.iter().map(|r| r.query_id.as_str()).collect();
    let rel: Vec<Relevance> = out.iter().map(|p| p.0).collect();
    let st: Vec<Stance> = out.iter().map(|p| p.1).collect();
    let r1 = evaluate(&gold_relevance(&split.dev), &rel, &groups).unwrap();
    let r2 = evaluate(&gold_stance(&split.dev), &st, &groups).unwrap();
    assert!(r1.macro_average >= 95.0, "{}", r1.to_table());
    assert!(r2.macro_average >= 90.0, "{}", r2.to_table());
}

#[test]
fn grid_search_prefers_the_separating_config() {
    let records = common::corpus(2);
    let lex = common::lexicons();
    let cfg = PipelineConfig::default();
    let good = cfg.task1;
    // tiny C cannot move away from the trivial solution
    let weak = SvmConfig::new(1e-9, KernelConfig::poly(0.006));
    let result = grid_search(&records, &[weak, good], &cfg, Task::Relevance, &lex).unwrap();
    assert_eq!(result.best, good);
    assert!(result.dev_accuracy >= 95.0);
    assert!(result.scores[0] < result.scores[1]);
    let again = grid_search(&records, &[weak, good], &cfg, Task::Relevance, &lex).unwrap();
    assert_eq!(again, result);

    let single = grid_search(&records, &[weak], &cfg, Task::Stance, &lex).unwrap();
    assert_eq!(single.best, weak);
    assert!(matches!(
        grid_search(&records, &[], &cfg, Task::Relevance, &lex),
        Err(PipelineError::EmptyGrid)
    ));
}

#[test]
fn artifacts_round_trip_and_check_task() {
    let records = common::corpus(4);
    let lex = common::lexicons();
    let p = TrainedPipeline::train(&records, &lex, &PipelineConfig::default()).unwrap();
    let a1 = ModelArtifact::Relevance(p.relevance.clone());
    let a2 = ModelArtifact::Stance(p.stance.clone());
    let mut b1 = Vec::new();
    a1.write_json(&mut b1).unwrap();
    let mut b2 = Vec::new();
    a2.write_json(&mut b2).unwrap();
    assert_eq!(ModelArtifact::read_json(b1.as_slice()).unwrap(), a1);
    assert_eq!(ModelArtifact::read_json(b2.as_slice()).unwrap(), a2);
    let err = ModelArtifact::read_json(b1.as_slice())
        .unwrap()
        .into_stance()
        .unwrap_err();
    assert!(matches!(
        err,
        PipelineError::WrongTask {
            expected: "stance",
            found: "relevance"
        }
    ));
}

#[test]
fn prediction_csv_layout() {
    let records = common::corpus(4)[..3].to_vec();
    let rel = vec![Relevance::Relevant, Relevance::Irrelevant, Relevance::Relevant];
    let mut buf = Vec::new();
    write_predictions(&mut buf, &records, Some(&rel), None).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "query_id,query_text,sentence_text,relevance,stance,predicted_relevance"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[2].ends_with(",irrelevant"));
    assert!(write_predictions(Vec::new(), &records, Some(&rel[..2]), None).is_err());
}
