//! Word resources: gloss dictionary, sentiment lexicon and noun list.
//!
//! All three are plain UTF-8 text files. Lines starting with `#` and blank
//! lines are skipped. Everything is immutable once loaded.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::textproc::{split_sentences, tokenize};

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed entry")]
    MalformedLine { line: usize },
    #[error("line {line}: score {value} outside [0, 1]")]
    ScoreOutOfRange { line: usize, value: f64 },
}

fn open(path: &Path) -> Result<std::fs::File, LexiconError> {
    std::fs::File::open(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Yields `(line_no, line)` for every content line, 1-based.
fn content_lines<R: Read>(reader: R) -> impl Iterator<Item = Result<(usize, String), LexiconError>> {
    BufReader::new(reader)
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(source) => Some(Err(LexiconError::Io {
                path: format!("<line {}>", i + 1),
                source,
            })),
            Ok(line) => {
                let line = line.trim_end_matches(['\r', '\n']).to_string();
                let trimmed = line.trim_start_matches('\u{feff}');
                if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, trimmed.to_string())))
                }
            }
        })
}

/// Offline stand-in for an encyclopedia: term → short descriptive text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GlossDictionary {
    entries: BTreeMap<String, String>,
}

impl GlossDictionary {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::read(open(path.as_ref())?)
    }

    /// Parses `term<TAB>gloss` lines. Later duplicates win.
    pub fn read<R: Read>(reader: R) -> Result<Self, LexiconError> {
        let mut entries = BTreeMap::new();
        for line in content_lines(reader) {
            let (line_no, line) = line?;
            let mut parts = line.split('\t');
            let (Some(term), Some(gloss), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(LexiconError::MalformedLine { line: line_no });
            };
            let term = term.trim().to_lowercase();
            if term.is_empty() {
                return Err(LexiconError::MalformedLine { line: line_no });
            }
            entries.insert(term, gloss.trim().to_string());
        }
        Ok(GlossDictionary { entries })
    }

    pub fn from_entries<I, K, V>(entries: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        GlossDictionary {
            entries: entries
                .into_iter()
                .map(|(k, v)| (k.as_ref().to_lowercase(), v.into()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn gloss(&self, term: &str) -> Option<&str> {
        self.entries.get(&term.to_lowercase()).map(String::as_str)
    }

    /// Tokens of the first `k` sentences of the gloss for `term`, or nothing
    /// when the term is unknown or `k` is zero.
    pub fn first_k_sentences(&self, term: &str, k: usize) -> Vec<String> {
        match self.gloss(term) {
            Some(gloss) => split_sentences(gloss)
                .into_iter()
                .take(k)
                .flat_map(|s| tokenize(&s))
                .collect(),
            None => Vec::new(),
        }
    }
}

/// Word polarity derived from a sentiment lexicon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

/// Per-word positive and negative scores in `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicon {
    entries: BTreeMap<String, (f64, f64)>,
}

impl SentimentLexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::read(open(path.as_ref())?)
    }

    /// Parses `term<TAB>pos<TAB>neg` lines. A term listed several times
    /// (one line per word sense) gets the mean of its scores.
    pub fn read<R: Read>(reader: R) -> Result<Self, LexiconError> {
        let mut sums: BTreeMap<String, (f64, f64, u32)> = BTreeMap::new();
        for line in content_lines(reader) {
            let (line_no, line) = line?;
            let fields: Vec<&str> = line.split('\t').collect();
            let [term, pos, neg] = fields[..] else {
                return Err(LexiconError::MalformedLine { line: line_no });
            };
            let term = term.trim().to_lowercase();
            let parse = |s: &str| -> Result<f64, LexiconError> {
                let value: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| LexiconError::MalformedLine { line: line_no })?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(LexiconError::ScoreOutOfRange { line: line_no, value });
                }
                Ok(value)
            };
            let (pos, neg) = (parse(pos)?, parse(neg)?);
            if term.is_empty() {
                return Err(LexiconError::MalformedLine { line: line_no });
            }
            let slot = sums.entry(term).or_insert((0.0, 0.0, 0));
            slot.0 += pos;
            slot.1 += neg;
            slot.2 += 1;
        }
        let entries = sums
            .into_iter()
            .map(|(term, (pos, neg, n))| (term, (pos / n as f64, neg / n as f64)))
            .collect();
        Ok(SentimentLexicon { entries })
    }

    pub fn from_entries<I, K>(entries: I) -> Self
    where
        I: IntoIterator<Item = (K, f64, f64)>,
        K: AsRef<str>,
    {
        SentimentLexicon {
            entries: entries
                .into_iter()
                .map(|(k, p, n)| (k.as_ref().to_lowercase(), (p, n)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scores(&self, word: &str) -> Option<(f64, f64)> {
        self.entries.get(word).copied()
    }

    /// Unknown words and ties are neutral.
    pub fn polarity(&self, word: &str) -> Polarity {
        match self.entries.get(word) {
            Some(&(pos, neg)) if pos > neg => Polarity::Positive,
            Some(&(pos, neg)) if neg > pos => Polarity::Negative,
            _ => Polarity::Neutral,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, (f64, f64))> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Word list used to pick the nouns out of a query.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NounLexicon {
    entries: BTreeSet<String>,
}

impl NounLexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::read(open(path.as_ref())?)
    }

    pub fn read<R: Read>(reader: R) -> Result<Self, LexiconError> {
        let mut entries = BTreeSet::new();
        for line in content_lines(reader) {
            let (line_no, line) = line?;
            let word = line.trim();
            if word.contains(char::is_whitespace) {
                return Err(LexiconError::MalformedLine { line: line_no });
            }
            entries.insert(word.to_lowercase());
        }
        Ok(NounLexicon { entries })
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        NounLexicon {
            entries: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Surface-form membership after lowercasing; no stemming.
    pub fn is_noun(&self, word: &str) -> bool {
        self.entries.contains(&word.to_lowercase())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MELANOMA: &str =
        "melanoma\tMelanoma is a type of skin cancer. It develops from melanocytes. It is dangerous.\n";

    #[test]
    fn gloss_lookup() {
        let dict = GlossDictionary::read(MELANOMA.as_bytes()).unwrap();
        assert_eq!(dict.len(), 1);
        let tokens = dict.first_k_sentences("melanoma", 3);
        assert!(tokens.contains(&"skin".to_string()));
        assert!(tokens.contains(&"cancer".to_string()));
        assert!(tokens.contains(&"dangerous".to_string()));
        assert_eq!(dict.first_k_sentences("melanoma", 1).len(), 7);
        assert!(dict.first_k_sentences("aspirin", 3).is_empty());
        assert_eq!(dict.first_k_sentences("Melanoma", 3), tokens);
    }

    #[test]
    fn gloss_clamps_to_available_sentences() {
        let dict = GlossDictionary::read("flu\tInfluenza is a viral infection.".as_bytes()).unwrap();
        assert_eq!(
            dict.first_k_sentences("flu", 3),
            ["influenza", "is", "a", "viral", "infection"]
        );
    }

    #[test]
    fn gloss_file_edge_cases() {
        let empty = GlossDictionary::read("".as_bytes()).unwrap();
        assert!(empty.is_empty());
        assert!(empty.first_k_sentences("anything", 3).is_empty());
        assert!(matches!(
            GlossDictionary::read("# comment\nno tab here\n".as_bytes()),
            Err(LexiconError::MalformedLine { line: 2 })
        ));
        assert!(matches!(
            GlossDictionary::read("a\tb\tc\n".as_bytes()),
            Err(LexiconError::MalformedLine { line: 1 })
        ));
        let dup = GlossDictionary::read("x\tfirst.\nx\tsecond.\n".as_bytes()).unwrap();
        assert_eq!(dup.gloss("x"), Some("second."));
    }

    #[test]
    fn sentiment_parsing() {
        let lex = SentimentLexicon::read("good\t0.75\t0.0\ncold\t0.0\t0.25\ncold\t0.0\t0.75\n".as_bytes()).unwrap();
        assert_eq!(lex.scores("good"), Some((0.75, 0.0)));
        assert_eq!(lex.scores("cold"), Some((0.0, 0.5)));
        assert!(matches!(
            SentimentLexicon::read("bad\t1.5\t0.0".as_bytes()),
            Err(LexiconError::ScoreOutOfRange { line: 1, .. })
        ));
        assert!(matches!(
            SentimentLexicon::read("bad\t0.5".as_bytes()),
            Err(LexiconError::MalformedLine { line: 1 })
        ));
        assert!(matches!(
            SentimentLexicon::read("bad\tx\t0.5".as_bytes()),
            Err(LexiconError::MalformedLine { line: 1 })
        ));
    }

    #[test]
    fn polarity_rules() {
        let lex = SentimentLexicon::from_entries([("good", 0.75, 0.0), ("bad", 0.0, 0.625), ("meh", 0.5, 0.5)]);
        assert_eq!(lex.polarity("good"), Polarity::Positive);
        assert_eq!(lex.polarity("bad"), Polarity::Negative);
        assert_eq!(lex.polarity("meh"), Polarity::Neutral);
        assert_eq!(lex.polarity("unknown"), Polarity::Neutral);
    }

    #[test]
    fn noun_membership() {
        let nouns = NounLexicon::read("# nouns\ncancer\nSun\n\n".as_bytes()).unwrap();
        assert_eq!(nouns.len(), 2);
        assert!(nouns.is_noun("cancer"));
        assert!(nouns.is_noun("Cancer"));
        assert!(nouns.is_noun("sun"));
        assert!(!nouns.is_noun("is"));
        assert!(!nouns.is_noun("cancers"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn polarity_partitions_entries(entries in prop::collection::btree_map("[a-z]{1,6}", (0u8..5, 0u8..5), 0..40)) {
                let lex = SentimentLexicon::from_entries(
                    entries.iter().map(|(k, (p, n))| (k.as_str(), *p as f64 / 4.0, *n as f64 / 4.0)));
                let mut counts = [0usize; 3];
                for (word, _) in lex.iter() {
                    match lex.polarity(word) {
                        Polarity::Positive => counts[0] += 1,
                        Polarity::Negative => counts[1] += 1,
                        Polarity::Neutral => counts[2] += 1,
                    }
                }
                prop_assert_eq!(counts.iter().sum::<usize>(), lex.len());
            }

            #[test]
            fn loaded_terms_are_found(words in prop::collection::btree_set("[a-z]{1,8}", 1..30), probe in "[A-Z]{3}") {
                let text: String = words.iter().map(|w| format!("{w}\n")).collect();
                let nouns = NounLexicon::read(text.as_bytes()).unwrap();
                for w in &words {
                    prop_assert!(nouns.is_noun(w));
                }
                let probe_lower = probe.to_lowercase();
                prop_assert_eq!(nouns.is_noun(&probe), words.contains(&probe_lower));
            }
        }
    }
}
