//! Deterministic text primitives: tokenization, stop-word removal, n-gram
//! chunking, normalized edit similarity, and a rule-based noun-phrase
//! chunker.
//!
//! Everything here is a pure function of its inputs plus two bundled data
//! files (stop-word list, coarse POS lexicon), so extraction results are
//! reproducible across environments. Both files can be swapped at load
//! time; see [`TextAnalyzer::from_files`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");
const DEFAULT_LEXICON: &str = include_str!("../data/pos_lexicon.tsv");

/// Coarse part-of-speech classes; just enough for the chunk grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoarsePos {
    Noun,
    Adjective,
    Verb,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub is_stopword: bool,
    pub pos: CoarsePos,
}

/// Tokens in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Lowered forms of non-stop-word tokens, source order.
    pub fn content_words(&self) -> Vec<&str> {
        self.tokens
            .iter()
            .filter(|t| !t.is_stopword)
            .map(|t| t.lower.as_str())
            .collect()
    }
}

/// A space-joined window of lowered tokens. `n` always equals the token
/// count of `text`; [`ngrams`] caps it at 3, noun chunks may be longer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NGram {
    pub text: String,
    pub n: usize,
}

impl NGram {
    fn from_words(words: &[&str]) -> Self {
        NGram {
            text: words.join(" "),
            n: words.len(),
        }
    }
}

impl fmt::Display for NGram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Stop-word set plus coarse POS lexicon with suffix-rule fallback.
#[derive(Debug, Clone)]
pub struct TextAnalyzer {
    stopwords: HashSet<String>,
    lexicon: HashMap<String, CoarsePos>,
}

impl Default for TextAnalyzer {
    fn default() -> Self {
        // The bundled files are validated by tests, so parsing cannot fail.
        Self::from_strs(DEFAULT_STOPWORDS, DEFAULT_LEXICON).expect("bundled data files are valid")
    }
}

impl TextAnalyzer {
    /// Load a stop-word list (one lowercase token per line) and a lexicon
    /// (`word<TAB>tag` lines, tags `noun|adjective|verb|other`).
    pub fn from_files(stopwords: &Path, lexicon: &Path) -> Result<Self> {
        let sw = fs::read_to_string(stopwords).map_err(|e| Error::io(stopwords, e))?;
        let lx = fs::read_to_string(lexicon).map_err(|e| Error::io(lexicon, e))?;
        Self::from_strs(&sw, &lx).map_err(|e| match e {
            Error::Validation(msg) => Error::parse(lexicon, 0, msg),
            other => other,
        })
    }

    pub fn from_strs(stopwords: &str, lexicon: &str) -> Result<Self> {
        let stopwords = stopwords
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        let mut map = HashMap::new();
        for (i, line) in lexicon.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line.split_once('\t').ok_or_else(|| {
                Error::Validation(format!("lexicon line {}: expected `word<TAB>tag`", i + 1))
            })?;
            let pos = match tag.trim() {
                "noun" => CoarsePos::Noun,
                "adjective" => CoarsePos::Adjective,
                "verb" => CoarsePos::Verb,
                "other" => CoarsePos::Other,
                other => {
                    return Err(Error::Validation(format!(
                        "lexicon line {}: unknown tag `{other}`",
                        i + 1
                    )))
                }
            };
            map.insert(word.trim().to_lowercase(), pos);
        }
        Ok(TextAnalyzer {
            stopwords,
            lexicon: map,
        })
    }

    pub fn is_stopword(&self, lower: &str) -> bool {
        self.stopwords.contains(lower)
    }

    /// Split into word tokens and tag each one. A token is a maximal run of
    /// alphanumeric characters; `+`, `#`, and `.` are kept when they extend
    /// such a run (`c++`, `c#`, `node.js`), trailing `.` is stripped.
    pub fn tokenize(&self, text: &str) -> TokenStream {
        let mut tokens = Vec::new();
        let mut current = String::new();
        for ch in text.chars() {
            let extend = ch.is_alphanumeric()
                || (!current.is_empty() && matches!(ch, '+' | '#' | '.'));
            if extend {
                current.push(ch);
            } else if !current.is_empty() {
                self.push_token(&mut tokens, std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            self.push_token(&mut tokens, current);
        }
        TokenStream { tokens }
    }

    fn push_token(&self, tokens: &mut Vec<Token>, mut surface: String) {
        while surface.ends_with('.') {
            surface.pop();
        }
        if surface.is_empty() {
            return;
        }
        let lower: String = surface.to_lowercase();
        let is_stopword = self.stopwords.contains(&lower);
        let pos = self.tag(&lower);
        tokens.push(Token {
            surface,
            lower,
            is_stopword,
            pos,
        });
    }

    /// Lexicon lookup with a suffix-rule fallback; unknown words default to
    /// noun, which is the safe choice for CV and job-post vocabulary.
    fn tag(&self, lower: &str) -> CoarsePos {
        if let Some(&pos) = self.lexicon.get(lower) {
            return pos;
        }
        if lower.chars().any(|c| c.is_ascii_digit()) {
            return CoarsePos::Other;
        }
        if lower.len() >= 5 {
            if lower.ends_with("ly") {
                return CoarsePos::Other;
            }
            for s in ["ment", "ness", "tion", "sion", "ity", "ship", "ism"] {
                if lower.ends_with(s) {
                    return CoarsePos::Noun;
                }
            }
            if lower.ends_with("ing") {
                return CoarsePos::Noun;
            }
            if lower.ends_with("ed") {
                // Participial adjectives dominate in this register
                // ("distributed systems", "embedded software").
                return CoarsePos::Adjective;
            }
            for s in ["ous", "ful", "ive", "able", "ible", "ical"] {
                if lower.ends_with(s) {
                    return CoarsePos::Adjective;
                }
            }
        }
        CoarsePos::Noun
    }
}

/// All 1..=`max_n` windows over the stop-word-filtered token sequence,
/// grouped by size (unigrams first), window position ascending within a
/// size. Each occurrence is emitted.
pub fn ngrams(ts: &TokenStream, max_n: usize) -> Vec<NGram> {
    assert!((1..=3).contains(&max_n), "max_n must be in 1..=3");
    let words: Vec<&str> = ts.content_words();
    let mut out = Vec::new();
    for n in 1..=max_n {
        if words.len() < n {
            break;
        }
        for window in words.windows(n) {
            out.push(NGram::from_words(window));
        }
    }
    out
}

/// Normalized Levenshtein similarity: `1 - dist(a, b) / max(|a|, |b|)`,
/// over Unicode scalar values. Two empty strings are identical (1.0).
pub fn lev_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let max = a.len().max(b.len());
    if max == 0 {
        return 1.0;
    }
    1.0 - edit_distance(&a, &b) as f64 / max as f64
}

fn edit_distance(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Maximal token spans matching `adjective* noun+`, non-overlapping,
/// source order. Span text is the lowered tokens space-joined.
pub fn chunk_noun_phrases(ts: &TokenStream) -> Vec<NGram> {
    let tokens = &ts.tokens;
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut j = i;
        while j < tokens.len() && tokens[j].pos == CoarsePos::Adjective {
            j += 1;
        }
        let mut k = j;
        while k < tokens.len() && tokens[k].pos == CoarsePos::Noun {
            k += 1;
        }
        if k > j {
            let words: Vec<&str> = tokens[i..k].iter().map(|t| t.lower.as_str()).collect();
            out.push(NGram::from_words(&words));
            i = k;
        } else {
            i += 1;
        }
    }
    out
}
