//! Feature extraction for both stages.
//!
//! Stage one uses five similarity scores between a query and a sentence, in
//! this order: exact overlap, stemmed overlap, noun overlap, gloss-expanded
//! ("neighborhood") overlap, TF-IDF cosine. Stage two uses a TF-IDF
//! bag-of-words block over a global vocabulary followed by positive,
//! negative and neutral word counts and the relevance flag.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::lexicons::{GlossDictionary, NounLexicon, Polarity, SentimentLexicon};
use crate::textproc::{stem_tokens, tokenize};

pub const TASK1_SCHEMA: &str = "task1-v1";
pub const TASK2_SCHEMA: &str = "task2-v1";

/// Number of gloss sentences scanned by the neighborhood feature.
pub const GLOSS_SENTENCES: usize = 3;

pub const TASK1_NAMES: [&str; 5] = ["exact", "stemmed", "noun", "neighborhood", "cosine"];
pub const TASK2_TAIL_NAMES: [&str; 4] = ["positive_count", "negative_count", "neutral_count", "relevance_flag"];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FeatureError {
    #[error("cannot fit a vocabulary on an empty corpus")]
    EmptyCorpus,
    #[error("vocabulary has no terms")]
    VocabNotFitted,
}

/// Dense feature values tagged with the schema that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub schema_id: String,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(schema_id: impl Into<String>, values: Vec<f64>) -> Self {
        FeatureVector {
            schema_id: schema_id.into(),
            values,
        }
    }

    pub fn dims(&self) -> usize {
        self.values.len()
    }
}

/// Sparse vector over vocabulary slots, sorted by slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1 * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self, dims: usize) -> Vec<f64> {
        let mut out = vec![0.0; dims];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Document frequencies over a sentence collection. Terms are kept in
/// lexicographic order, which fixes the slot of every term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct VocabularyModel {
    terms: Vec<String>,
    df: Vec<u32>,
    n_docs: u32,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    terms: Vec<String>,
    df: Vec<u32>,
    n_docs: u32,
}

impl From<VocabularyRepr> for VocabularyModel {
    fn from(r: VocabularyRepr) -> Self {
        VocabularyModel::from_parts(r.terms, r.df, r.n_docs)
    }
}

impl From<VocabularyModel> for VocabularyRepr {
    fn from(v: VocabularyModel) -> Self {
        VocabularyRepr {
            terms: v.terms,
            df: v.df,
            n_docs: v.n_docs,
        }
    }
}

impl VocabularyModel {
    fn from_parts(terms: Vec<String>, df: Vec<u32>, n_docs: u32) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        VocabularyModel {
            terms,
            df,
            n_docs,
            index,
        }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> u32 {
        self.n_docs
    }

    pub fn slot(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Document frequency; out-of-vocabulary terms report 1.
    pub fn df(&self, term: &str) -> u32 {
        self.slot(term).map_or(1, |i| self.df[i])
    }

    /// `ln(n_docs / df)`.
    pub fn idf(&self, term: &str) -> f64 {
        (self.n_docs as f64 / self.df(term) as f64).ln()
    }
}

/// Fits document frequencies over tokenized sentences.
pub fn fit_vocabulary<S: AsRef<[String]>>(sentences: &[S]) -> Result<VocabularyModel, FeatureError> {
    if sentences.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for sentence in sentences {
        let distinct: HashSet<&str> = sentence.as_ref().iter().map(String::as_str).collect();
        for term in distinct {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let (terms, counts): (Vec<String>, Vec<u32>) = df.into_iter().map(|(t, c)| (t.to_string(), c)).unzip();
    Ok(VocabularyModel::from_parts(terms, counts, sentences.len() as u32))
}

/// TF-IDF weights of `tokens` over the vocabulary slots.
///
/// TF divides by the full token count, out-of-vocabulary tokens included;
/// those tokens get no component.
pub fn tfidf_vector(vocab: &VocabularyModel, tokens: &[String]) -> SparseVector {
    if tokens.is_empty() {
        return SparseVector::default();
    }
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for token in tokens {
        if let Some(slot) = vocab.slot(token) {
            *counts.entry(slot).or_insert(0) += 1;
        }
    }
    let total = tokens.len() as f64;
    let entries = counts
        .into_iter()
        .map(|(slot, count)| {
            let idf = (vocab.n_docs as f64 / vocab.df[slot] as f64).ln();
            (slot, count as f64 / total * idf)
        })
        .collect();
    SparseVector { entries }
}

/// `2 * common / (|query| + |sentence|)` where `common` is the size of the
/// multiset intersection. Two empty lists score 0.
pub fn dice_similarity(query: &[String], sentence: &[String]) -> f64 {
    let total = query.len() + sentence.len();
    if total == 0 {
        return 0.0;
    }
    let counts = multiset(query);
    let mut remaining = counts.clone();
    let mut common = 0usize;
    for w in sentence {
        if let Some(n) = remaining.get_mut(w.as_str()) {
            if *n > 0 {
                *n -= 1;
                common += 1;
            }
        }
    }
    2.0 * common as f64 / total as f64
}

fn multiset(tokens: &[String]) -> HashMap<&str, usize> {
    let mut counts = HashMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_insert(0) += 1;
    }
    counts
}

pub fn feature_exact(query: &str, sentence: &str) -> f64 {
    dice_similarity(&tokenize(query), &tokenize(sentence))
}

pub fn feature_stemmed(query: &str, sentence: &str) -> f64 {
    dice_similarity(&stem_tokens(&tokenize(query)), &stem_tokens(&tokenize(sentence)))
}

/// Fraction of the distinct query nouns that occur verbatim in the sentence.
/// Zero when the query has no nouns.
pub fn noun_overlap(query: &[String], sentence: &[String], nouns: &NounLexicon) -> f64 {
    let query_nouns: HashSet<&str> = query.iter().filter(|w| nouns.is_noun(w)).map(String::as_str).collect();
    if query_nouns.is_empty() {
        return 0.0;
    }
    let sentence_words: HashSet<&str> = sentence.iter().map(String::as_str).collect();
    let matched = query_nouns.iter().filter(|n| sentence_words.contains(*n)).count();
    matched as f64 / query_nouns.len() as f64
}

pub fn feature_noun(query: &str, sentence: &str, nouns: &NounLexicon) -> f64 {
    noun_overlap(&tokenize(query), &tokenize(sentence), nouns)
}

/// Overlap where a sentence word also matches when the first sentences of
/// its gloss mention a query word.
///
/// Every matched sentence position is credited to one query word, and a
/// query word absorbs at most as many positions as it occurs in the query.
/// Exact matches are credited first, so with an empty dictionary this is
/// exactly [`dice_similarity`], and it can never fall below it.
pub fn neighborhood_overlap(query: &[String], sentence: &[String], gloss: &GlossDictionary) -> f64 {
    let total = query.len() + sentence.len();
    if total == 0 {
        return 0.0;
    }
    let mut capacity = multiset(query);
    let mut common = 0usize;
    let mut unmatched = Vec::new();
    for w in sentence {
        match capacity.get_mut(w.as_str()) {
            Some(n) if *n > 0 => {
                *n -= 1;
                common += 1;
            }
            _ => unmatched.push(w),
        }
    }
    if !gloss.is_empty() {
        for w in unmatched {
            let gloss_tokens: HashSet<String> = gloss.first_k_sentences(w, GLOSS_SENTENCES).into_iter().collect();
            if gloss_tokens.is_empty() {
                continue;
            }
            // credit the first query word (in query order) that still has room
            let target = query
                .iter()
                .find(|q| capacity.get(q.as_str()).is_some_and(|&n| n > 0) && gloss_tokens.contains(*q));
            if let Some(q) = target {
                if let Some(n) = capacity.get_mut(q.as_str()) {
                    *n -= 1;
                }
                common += 1;
            }
        }
    }
    (2.0 * common as f64 / total as f64).clamp(0.0, 1.0)
}

pub fn feature_neighborhood(query: &str, sentence: &str, gloss: &GlossDictionary) -> f64 {
    neighborhood_overlap(&tokenize(query), &tokenize(sentence), gloss)
}

/// Cosine between TF-IDF vectors; zero when either vector vanishes.
pub fn cosine_similarity(query: &[String], sentence: &[String], vocab: &VocabularyModel) -> f64 {
    let q = tfidf_vector(vocab, query);
    let s = tfidf_vector(vocab, sentence);
    let denom = q.norm() * s.norm();
    if denom == 0.0 {
        return 0.0;
    }
    (q.dot(&s) / denom).clamp(0.0, 1.0)
}

pub fn feature_cosine(query: &str, sentence: &str, vocab: &VocabularyModel) -> f64 {
    cosine_similarity(&tokenize(query), &tokenize(sentence), vocab)
}

/// Stage-one vector: `[exact, stemmed, noun, neighborhood, cosine]`.
pub fn task1_features(
    query: &str,
    sentence: &str,
    vocab: &VocabularyModel,
    gloss: &GlossDictionary,
    nouns: &NounLexicon,
) -> FeatureVector {
    let q = tokenize(query);
    let s = tokenize(sentence);
    let values = vec![
        dice_similarity(&q, &s),
        dice_similarity(&stem_tokens(&q), &stem_tokens(&s)),
        noun_overlap(&q, &s, nouns),
        neighborhood_overlap(&q, &s, gloss),
        cosine_similarity(&q, &s, vocab),
    ];
    FeatureVector::new(TASK1_SCHEMA, values)
}

/// Positive, negative and neutral word counts; they always sum to the
/// token count.
pub fn polarity_counts(tokens: &[String], lexicon: &SentimentLexicon) -> (usize, usize, usize) {
    tokens.iter().fold((0, 0, 0), |(p, n, z), t| match lexicon.polarity(t) {
        Polarity::Positive => (p + 1, n, z),
        Polarity::Negative => (p, n + 1, z),
        Polarity::Neutral => (p, n, z + 1),
    })
}

/// Stage-two vector: TF-IDF block over `vocab` (N slots) followed by
/// positive, negative and neutral counts and the relevance flag.
pub fn task2_features(
    sentence: &str,
    relevant: bool,
    vocab: &VocabularyModel,
    lexicon: &SentimentLexicon,
) -> Result<FeatureVector, FeatureError> {
    if vocab.is_empty() {
        return Err(FeatureError::VocabNotFitted);
    }
    let tokens = tokenize(sentence);
    let mut values = tfidf_vector(vocab, &tokens).to_dense(vocab.len());
    let (pos, neg, neutral) = polarity_counts(&tokens, lexicon);
    values.extend([pos as f64, neg as f64, neutral as f64, if relevant { 1.0 } else { 0.0 }]);
    Ok(FeatureVector::new(TASK2_SCHEMA, values))
}
