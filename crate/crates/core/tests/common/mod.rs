#![allow(dead_code)]

use chis_core::corpus::{Relevance, SentenceRecord, Stance};
use chis_core::lexicons::{GlossDictionary, NounLexicon, SentimentLexicon};
use chis_core::pipeline::Lexicons;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SyntheticQuery {
    pub id: &'static str,
    pub text: &'static str,
    pub nouns: &'static [&'static str],
}

pub const QUERIES: [SyntheticQuery; 5] = [
    SyntheticQuery {
        id: "skincare",
        text: "Does sun exposure cause skin cancer?",
        nouns: &["sun", "exposure", "skin", "cancer"],
    },
    SyntheticQuery {
        id: "ecig",
        text: "Are e-cigarettes safer than normal cigarettes?",
        nouns: &["e-cigarettes", "cigarettes"],
    },
    SyntheticQuery {
        id: "hrt",
        text: "Does hormone replacement therapy cause cancer?",
        nouns: &["hormone", "replacement", "therapy", "cancer"],
    },
    SyntheticQuery {
        id: "mmr",
        text: "Does the MMR vaccine lead to autism?",
        nouns: &["mmr", "vaccine", "autism"],
    },
    SyntheticQuery {
        id: "vitc",
        text: "Does vitamin C prevent the common cold?",
        nouns: &["vitamin", "cold"],
    },
];

const OFF_TOPIC_NOUNS: &[&str] = &[
    "weather", "traffic", "football", "recipe", "garden", "music", "holiday", "bicycle", "library", "museum",
    "concert", "painting", "kitchen", "harbour", "mountain", "village", "railway", "festival",
];
const FILLER: &[&str] = &[
    "the", "a", "in", "of", "many", "some", "people", "recent", "reports", "often", "about", "with", "during",
    "several", "local", "data", "new", "study", "experts", "suggest",
];
const POSITIVE: &[&str] = &["beneficial", "safe", "effective", "helpful", "protective", "healthy"];
const NEGATIVE: &[&str] = &["harmful", "dangerous", "toxic", "risky", "damaging", "deadly"];

pub const SENTENCES_PER_QUERY: usize = 40;

/// Labelled corpus with 5 queries x 40 sentences.
///
/// Relevant sentences repeat query nouns, irrelevant ones use an unrelated
/// noun pool, so relevance is separable by noun overlap. Support sentences
/// carry only positive lexicon words, oppose sentences only negative ones,
/// and neutral sentences none, so stance is separable by polarity counts.
pub fn corpus(seed: u64) -> Vec<SentenceRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for q in &QUERIES {
        // 16 irrelevant / 24 relevant: 10 support, 10 oppose, 4 neutral
        let mut plan: Vec<(Relevance, Stance)> = Vec::new();
        plan.extend(std::iter::repeat_n((Relevance::Irrelevant, Stance::Neutral), 16));
        plan.extend(std::iter::repeat_n((Relevance::Relevant, Stance::Support), 10));
        plan.extend(std::iter::repeat_n((Relevance::Relevant, Stance::Oppose), 10));
        plan.extend(std::iter::repeat_n((Relevance::Relevant, Stance::Neutral), 4));
        plan.shuffle(&mut rng);
        for (rel, stance) in plan {
            let mut words: Vec<&str> = Vec::new();
            if rel == Relevance::Relevant {
                let k = rng.random_range(q.nouns.len().div_ceil(2)..=q.nouns.len());
                words.extend(q.nouns.choose_multiple(&mut rng, k).copied());
            } else {
                let k = rng.random_range(2..=3);
                words.extend(OFF_TOPIC_NOUNS.choose_multiple(&mut rng, k).copied());
            }
            let fillers = rng.random_range(3..=6);
            words.extend(FILLER.choose_multiple(&mut rng, fillers).copied());
            let pool = match stance {
                Stance::Support => POSITIVE,
                Stance::Oppose => NEGATIVE,
                Stance::Neutral => &[][..],
            };
            if !pool.is_empty() {
                let k = rng.random_range(1..=2);
                words.extend(pool.choose_multiple(&mut rng, k).copied());
            }
            words.shuffle(&mut rng);
            let mut sentence = words.join(" ");
            if let Some(first) = sentence.get_mut(0..1) {
                first.make_ascii_uppercase();
            }
            sentence.push('.');
            out.push(SentenceRecord::new(q.id, q.text, &sentence).with_labels(rel, Some(stance)));
        }
    }
    out
}

pub fn nouns() -> NounLexicon {
    NounLexicon::from_words(
        QUERIES
            .iter()
            .flat_map(|q| q.nouns.iter().copied())
            .chain(OFF_TOPIC_NOUNS.iter().copied()),
    )
}

pub fn sentiment() -> SentimentLexicon {
    SentimentLexicon::from_entries(
        POSITIVE
            .iter()
            .map(|w| (*w, 0.75, 0.0))
            .chain(NEGATIVE.iter().map(|w| (*w, 0.0, 0.75))),
    )
}

pub fn gloss() -> GlossDictionary {
    GlossDictionary::from_entries([
        (
            "melanoma",
            "Melanoma is a type of skin cancer. It develops from pigment cells.",
        ),
        ("sunburn", "Sunburn is skin damage caused by sun exposure."),
        (
            "influenza",
            "Influenza is a viral infection. It is unrelated to the common cold.",
        ),
        ("vaping", "Vaping is the use of e-cigarettes."),
    ])
}

pub fn lexicons() -> Lexicons {
    Lexicons {
        gloss: gloss(),
        nouns: nouns(),
        sentiment: sentiment(),
    }
}

/// Gloss, sentiment and noun files in their on-disk formats.
pub fn lexicon_files() -> (String, String, String) {
    let gloss = "# term<TAB>gloss\nmelanoma\tMelanoma is a type of skin cancer. It develops from pigment cells.\n\
                 sunburn\tSunburn is skin damage caused by sun exposure.\n\
                 influenza\tInfluenza is a viral infection. It is unrelated to the common cold.\n\
                 vaping\tVaping is the use of e-cigarettes.\n"
        .to_string();
    let mut sentiment = String::from("# term<TAB>pos<TAB>neg\n");
    for w in POSITIVE {
        sentiment.push_str(&format!("{w}\t0.75\t0\n"));
    }
    for w in NEGATIVE {
        sentiment.push_str(&format!("{w}\t0\t0.75\n"));
    }
    let mut nouns = String::new();
    for w in QUERIES.iter().flat_map(|q| q.nouns.iter()).chain(OFF_TOPIC_NOUNS) {
        nouns.push_str(w);
        nouns.push('\n');
    }
    (gloss, sentiment, nouns)
}

/// Census of the shared-task data: (query id, training rows, test rows).
pub const CENSUS: [(&str, &str, usize, usize); 5] = [
    (
        "does_sun_exposure_cause_skin_cancer",
        "Does sun exposure cause skin cancer?",
        68,
        342,
    ),
    (
        "e-cigarettes",
        "Are e-cigarettes safer than normal cigarettes?",
        83,
        414,
    ),
    (
        "HRT_cause_cancer",
        "Does hormone replacement therapy cause cancer?",
        61,
        260,
    ),
    (
        "MMR_vaccine_lead_to_autism",
        "Does the MMR vaccine lead to autism?",
        71,
        279,
    ),
    (
        "vitamin_C_common_cold",
        "Does vitamin C prevent the common cold?",
        65,
        247,
    ),
];

/// Dataset CSV text with the census row counts; training files are labelled,
/// test files are not. Sentences include commas and quotes to exercise
/// CSV quoting.
pub fn census_csv(training: bool, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("query_id,query_text,sentence_text,relevance,stance\n");
    for (id, text, train_n, test_n) in CENSUS {
        let n = if training { train_n } else { test_n };
        for i in 0..n {
            let sentence = format!("\"Sentence {i} about {id}, with \"\"quotes\"\".\"");
            let (rel, stance) = if training {
                match rng.random_range(0..4) {
                    0 => ("irrelevant", "neutral"),
                    1 => ("relevant", "support"),
                    2 => ("relevant", "oppose"),
                    _ => ("Relevant ", "Neutral"),
                }
            } else {
                ("", "")
            };
            out.push_str(&format!("{id},\"{text}\",{sentence},{rel},{stance}\n"));
        }
    }
    out
}
