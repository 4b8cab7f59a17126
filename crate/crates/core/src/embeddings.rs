//! Plain-text word-vector files: loading, cosine similarity, and exact
//! nearest-neighbor queries.
//!
//! File format is the common interchange one: `word v1 v2 ... vd` per
//! line, UTF-8, with an optional `count dim` header line that is detected
//! automatically. All similarity math runs in `f64`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Immutable in-memory vector store. Words are unique; every vector has
/// dimension [`VectorStore::dim`].
#[derive(Debug, Clone)]
pub struct VectorStore {
    dim: usize,
    entries: BTreeMap<String, Vec<f64>>,
}

/// Non-fatal observations from loading (currently: duplicate words, where
/// the last occurrence wins).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub word: String,
    pub similarity: f64,
}

/// Mean of the in-vocabulary word vectors of a word list.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub vector: Vec<f64>,
    /// Number of in-vocabulary words that contributed.
    pub used: usize,
    /// Out-of-vocabulary words, in input order.
    pub skipped: Vec<String>,
    /// True when the mean collapsed to (numerically) the zero vector.
    pub degenerate: bool,
}

impl VectorStore {
    pub fn load(path: &Path) -> Result<Self> {
        Self::load_with_warnings(path).map(|(s, _)| s)
    }

    pub fn load_with_warnings(path: &Path) -> Result<(Self, Vec<LoadWarning>)> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content, path)
    }

    fn parse(content: &str, path: &Path) -> Result<(Self, Vec<LoadWarning>)> {
        let mut entries: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        let mut warnings = Vec::new();
        let mut dim: Option<usize> = None;
        let mut saw_data = false;
        for (idx, line) in content.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            // A `count dim` header: exactly two integer fields before any data.
            if !saw_data
                && fields.len() == 2
                && fields[0].parse::<usize>().is_ok()
                && fields[1].parse::<usize>().is_ok()
            {
                dim = Some(fields[1].parse().unwrap());
                saw_data = true;
                continue;
            }
            saw_data = true;
            if fields.len() < 2 {
                return Err(Error::parse(
                    path,
                    lineno,
                    "expected `word v1 v2 ... vd`".to_string(),
                ));
            }
            let word = fields[0].to_string();
            let values: std::result::Result<Vec<f64>, _> =
                fields[1..].iter().map(|f| f.parse::<f64>()).collect();
            let values = values.map_err(|e| {
                Error::parse(path, lineno, format!("bad vector component: {e}"))
            })?;
            let expected = *dim.get_or_insert(values.len());
            if values.len() != expected {
                return Err(Error::DimensionMismatch {
                    path: path.to_path_buf(),
                    line: lineno,
                    expected,
                    got: values.len(),
                });
            }
            if entries.insert(word.clone(), values).is_some() {
                warnings.push(LoadWarning {
                    line: lineno,
                    message: format!("duplicate word `{word}`; keeping the later vector"),
                });
            }
        }
        let dim = dim.filter(|_| !entries.is_empty());
        match dim {
            Some(dim) => Ok((VectorStore { dim, entries }, warnings)),
            None => Err(Error::EmptyVectorFile(path.to_path_buf())),
        }
    }

    /// Build a store from in-memory pairs; handy for fixtures.
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let entries: BTreeMap<String, Vec<f64>> = entries
            .into_iter()
            .map(|(w, v)| (w.into(), v))
            .collect();
        let mut dims = entries.values().map(Vec::len);
        let dim = dims
            .next()
            .ok_or_else(|| Error::Validation("empty vector set".into()))?;
        if dims.any(|d| d != dim) || dim == 0 {
            return Err(Error::Validation(
                "all vectors must share one dimension >= 1".into(),
            ));
        }
        Ok(VectorStore { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    /// The `k` entries most similar to `word` (itself excluded), highest
    /// cosine first, ties broken by word. `k` larger than the vocabulary
    /// returns everything.
    pub fn top_k_word(&self, word: &str, k: usize) -> Result<Vec<Neighbor>> {
        let query = self
            .get(word)
            .ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?
            .to_vec();
        Ok(self.scan(&query, k, Some(word)))
    }

    /// As [`top_k_word`](Self::top_k_word) for an arbitrary query vector;
    /// nothing is excluded.
    pub fn top_k_vector(&self, query: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        if query.len() != self.dim {
            return Err(Error::Validation(format!(
                "query dimension {} does not match store dimension {}",
                query.len(),
                self.dim
            )));
        }
        if norm(query) == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scan(query, k, None))
    }

    fn scan(&self, query: &[f64], k: usize, exclude: Option<&str>) -> Vec<Neighbor> {
        let mut scored: Vec<Neighbor> = self
            .entries
            .iter()
            .filter(|(w, _)| exclude != Some(w.as_str()))
            // Zero-norm entries have no defined angle; they never rank.
            .filter_map(|(w, v)| {
                cosine(query, v).ok().map(|similarity| Neighbor {
                    word: w.clone(),
                    similarity,
                })
            })
            .collect();
        scored.sort_by(|a, b| {
            b.similarity
                .total_cmp(&a.similarity)
                .then_with(|| a.word.cmp(&b.word))
        });
        scored.truncate(k);
        scored
    }

    /// Arithmetic mean of the in-vocabulary word vectors; out-of-vocabulary
    /// words are skipped and reported. Errors when nothing is in-vocabulary.
    pub fn centroid<S: AsRef<str>>(&self, words: &[S]) -> Result<Centroid> {
        let mut acc = vec![0.0; self.dim];
        let mut used = 0usize;
        let mut skipped = Vec::new();
        for w in words {
            match self.get(w.as_ref()) {
                Some(v) => {
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += x;
                    }
                    used += 1;
                }
                None => skipped.push(w.as_ref().to_string()),
            }
        }
        if used == 0 {
            return Err(Error::NoVectors);
        }
        for a in &mut acc {
            *a /= used as f64;
        }
        let degenerate = norm(&acc) < 1e-12;
        Ok(Centroid {
            vector: acc,
            used,
            skipped,
            degenerate,
        })
    }

    /// Vector for a (possibly multi-word) phrase: the centroid of its
    /// whitespace-separated words.
    pub fn phrase_vector(&self, phrase: &str) -> Result<Centroid> {
        let words: Vec<&str> = phrase.split_whitespace().collect();
        self.centroid(&words)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `dot(a, b) / (|a| |b|)`. Zero-norm inputs are an error, never NaN.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Validation(format!(
            "cosine of vectors with different dimensions ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok(dot / (na * nb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn store_from(text: &str) -> Result<(VectorStore, Vec<LoadWarning>)> {
        VectorStore::parse(text, Path::new("test.vec"))
    }

    #[test]
    fn load_counts_words() {
        let (s, w) = store_from("alpha 1 0 0 0\nbeta 0 1 0 0\ngamma 0 0 1 0\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dim(), 4);
        assert!(w.is_empty());
    }

    #[test]
    fn load_header_detected() {
        let (s, _) = store_from("2 3\nalpha 1 0 0\nbeta 0 1 0\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn load_rejects_wrong_arity() {
        let err = store_from("alpha 1 0 0\nbeta 0 1\n").unwrap_err();
        match err {
            Error::DimensionMismatch { line, expected, got, .. } => {
                assert_eq!((line, expected, got), (2, 3, 2));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn load_duplicate_last_wins_with_warning() {
        let (s, w) = store_from("alpha 1 0\nalpha 0 1\n").unwrap();
        assert_eq!(s.get("alpha").unwrap(), &[0.0, 1.0]);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].line, 2);
    }

    #[test]
    fn load_empty_file_errors() {
        assert!(matches!(store_from("").unwrap_err(), Error::EmptyVectorFile(_)));
        // A lone header with no data is also empty.
        assert!(matches!(store_from("5 300\n").unwrap_err(), Error::EmptyVectorFile(_)));
    }

    #[test]
    fn load_from_disk() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "alpha 1 2\nbeta 3 4").unwrap();
        let s = VectorStore::load(f.path()).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn cosine_self_is_one() {
        let v = vec![0.3, -1.2, 4.0];
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_orthogonal_is_zero() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn cosine_hand_arithmetic() {
        // dot = 32, |a| = sqrt(14), |b| = sqrt(77).
        let got = cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        let expected = 32.0 / (14.0f64.sqrt() * 77.0f64.sqrt());
        assert_eq!(got, expected);
        assert!((got - 0.97463).abs() < 1e-5);
    }

    #[test]
    fn cosine_zero_norm_is_error() {
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap_err(), Error::ZeroNorm));
    }

    #[test]
    fn top_k_excludes_query_word() {
        let (s, _) = store_from("alpha 1 0\nbeta 0 1\n").unwrap();
        let n = s.top_k_word("alpha", 1).unwrap();
        assert_eq!(n.len(), 1);
        assert_eq!(n[0].word, "beta");
    }

    #[test]
    fn top_k_clamps_to_vocabulary() {
        let (s, _) = store_from("alpha 1 0\nbeta 0 1\ngamma 1 1\n").unwrap();
        let n = s.top_k_word("alpha", 99).unwrap();
        assert_eq!(n.len(), 2);
    }

    #[test]
    fn top_k_oov_query_errors() {
        let (s, _) = store_from("alpha 1 0\n").unwrap();
        assert!(matches!(
            s.top_k_word("missing", 1).unwrap_err(),
            Error::OutOfVocabulary(w) if w == "missing"
        ));
    }

    #[test]
    fn top_k_matches_brute_force() {
        // Five words with known geometry; oracle is an independent full scan.
        let words = [
            ("a", vec![1.0, 0.0, 0.0]),
            ("b", vec![0.9, 0.1, 0.0]),
            ("c", vec![0.0, 1.0, 0.0]),
            ("d", vec![-1.0, 0.0, 0.0]),
            ("e", vec![0.7, 0.7, 0.0]),
        ];
        let s = VectorStore::from_entries(words.clone()).unwrap();
        let query = s.get("a").unwrap().to_vec();
        let mut oracle: Vec<(String, f64)> = words
            .iter()
            .filter(|(w, _)| *w != "a")
            .map(|(w, v)| {
                let dot: f64 = query.iter().zip(v).map(|(x, y)| x * y).sum();
                (w.to_string(), dot / (norm(&query) * norm(v)))
            })
            .collect();
        oracle.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
        for k in 1..=4 {
            let got = s.top_k_word("a", k).unwrap();
            let got_words: Vec<&str> = got.iter().map(|n| n.word.as_str()).collect();
            let want: Vec<&str> = oracle.iter().take(k).map(|(w, _)| w.as_str()).collect();
            assert_eq!(got_words, want, "k = {k}");
        }
    }

    #[test]
    fn centroid_single_word_is_its_vector() {
        let (s, _) = store_from("alpha 1 2 3\nbeta 0 0 1\n").unwrap();
        let c = s.centroid(&["alpha"]).unwrap();
        assert_eq!(c.vector, vec![1.0, 2.0, 3.0]);
        assert_eq!(c.used, 1);
        assert!(!c.degenerate);
    }

    #[test]
    fn centroid_opposite_vectors_degenerate() {
        let (s, _) = store_from("plus 1 0\nminus -1 0\n").unwrap();
        let c = s.centroid(&["plus", "minus"]).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.vector, vec![0.0, 0.0]);
    }

    #[test]
    fn centroid_componentwise_mean() {
        let (s, _) = store_from("a 1 4\nb 2 5\nc 3 9\n").unwrap();
        let c = s.centroid(&["a", "b", "c"]).unwrap();
        assert_eq!(c.vector, vec![2.0, 6.0]);
    }

    #[test]
    fn centroid_skips_oov_and_errors_when_all_oov() {
        let (s, _) = store_from("a 1 0\n").unwrap();
        let c = s.centroid(&["a", "zzz"]).unwrap();
        assert_eq!(c.skipped, vec!["zzz".to_string()]);
        assert!(matches!(s.centroid(&["zzz"]).unwrap_err(), Error::NoVectors));
    }

    proptest! {
        #[test]
        fn cosine_scale_invariant(
            v in proptest::collection::vec(-10.0f64..10.0, 3),
            w in proptest::collection::vec(-10.0f64..10.0, 3),
            scale in 0.1f64..100.0,
        ) {
            prop_assume!(norm(&v) > 1e-6 && norm(&w) > 1e-6);
            let base = cosine(&v, &w).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| x * scale).collect();
            let got = cosine(&scaled, &w).unwrap();
            prop_assert!((base - got).abs() < 1e-9);
        }

        #[test]
        fn top_k_prefix_of_full_ranking(k in 1usize..8) {
            let entries: Vec<(String, Vec<f64>)> = (0..8)
                .map(|i| {
                    let angle = i as f64;
                    (format!("w{i}"), vec![angle.cos(), angle.sin()])
                })
                .collect();
            let s = VectorStore::from_entries(entries).unwrap();
            let all = s.top_k_word("w0", usize::MAX).unwrap();
            let got = s.top_k_word("w0", k).unwrap();
            prop_assert_eq!(&all[..k.min(all.len())], &got[..]);
        }
    }
}
