//! Word Mover's Distance between short phrases.
//!
//! Each phrase becomes a normalized bag of words over in-vocabulary tokens;
//! the distance is the optimal transport cost between the two bags with
//! Euclidean distance between word vectors as the unit cost. The word
//! centroid distance is a cheap lower bound used to skip hopeless pairs.

use thiserror::Error;

use crate::embedding::EmbeddingTable;
use crate::transport;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WmdError {
    #[error("no token of {0:?} is in the embedding vocabulary")]
    AllOutOfVocabulary(Vec<String>),
    #[error("invalid bag of words: {0}")]
    Invalid(String),
}

/// Normalized bag of words. Words are embedding-table keys.
#[derive(Clone, Debug, PartialEq)]
pub struct NBow {
    words: Vec<String>,
    weights: Vec<f64>,
    /// Tokens dropped because they had no vector.
    pub oov: usize,
}

impl NBow {
    /// Builds a bag from explicit weights, normalizing them to sum to one.
    pub fn from_weights(words: Vec<String>, weights: Vec<f64>) -> Result<Self, WmdError> {
        if words.len() != weights.len() || words.is_empty() {
            return Err(WmdError::Invalid("words and weights must be non-empty and equal length".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !words.iter().all(|w| seen.insert(w)) {
            return Err(WmdError::Invalid("duplicate word".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(WmdError::Invalid("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(WmdError::Invalid("weights sum to zero".into()));
        }
        Ok(NBow {
            words,
            weights: weights.iter().map(|w| w / total).collect(),
            oov: 0,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_of(&self, word: &str) -> Option<f64> {
        self.words.iter().position(|w| w == word).map(|i| self.weights[i])
    }
}

/// Token counts over in-vocabulary tokens, scaled to sum to one.
pub fn nbow<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable) -> Result<NBow, WmdError> {
    let mut words: Vec<String> = Vec::new();
    let mut counts: Vec<f64> = Vec::new();
    let mut oov = 0;
    for tok in tokens {
        match table.lookup(tok.as_ref()) {
            Some(w) => match words.iter().position(|x| x == w) {
                Some(i) => counts[i] += 1.0,
                None => {
                    words.push(w.to_string());
                    counts.push(1.0);
                }
            },
            None => oov += 1,
        }
    }
    if words.is_empty() {
        return Err(WmdError::AllOutOfVocabulary(
            tokens.iter().map(|t| t.as_ref().to_string()).collect(),
        ));
    }
    let total: f64 = counts.iter().sum();
    Ok(NBow {
        words,
        weights: counts.iter().map(|c| c / total).collect(),
        oov,
    })
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn vectors<'t>(bow: &NBow, table: &'t EmbeddingTable) -> Vec<&'t [f64]> {
    bow.words
        .iter()
        .map(|w| table.vector(w).expect("bag words come from the table"))
        .collect()
}

/// Exact Word Mover's Distance.
pub fn wmd(a: &NBow, b: &NBow, table: &EmbeddingTable) -> f64 {
    let va = vectors(a, table);
    let vb = vectors(b, table);
    let mut cost = Vec::with_capacity(va.len() * vb.len());
    for x in &va {
        for y in &vb {
            cost.push(euclidean(x, y));
        }
    }
    transport::solve(&a.weights, &b.weights, &cost).cost.max(0.0)
}

fn centroid(bow: &NBow, table: &EmbeddingTable) -> Vec<f64> {
    let mut c = vec![0.0; table.dim()];
    for (v, w) in vectors(bow, table).into_iter().zip(&bow.weights) {
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += w * vi;
        }
    }
    c
}

/// Word centroid distance; never exceeds [`wmd`].
pub fn wcd_lower_bound(a: &NBow, b: &NBow, table: &EmbeddingTable) -> f64 {
    euclidean(&centroid(a, table), &centroid(b, table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_table() -> EmbeddingTable {
        let mut t = EmbeddingTable::new(1);
        for (w, x) in [("a", 0.0), ("b", 1.0), ("c", 3.0), ("d", 4.0)] {
            t.insert(w, &[x]);
        }
        t
    }

    fn bag(words: &[&str], weights: &[f64]) -> NBow {
        NBow::from_weights(words.iter().map(|s| s.to_string()).collect(), weights.to_vec()).unwrap()
    }

    #[test]
    fn nbow_counts_and_drops_oov() {
        let t = line_table();
        let n = nbow(&["a", "a", "b"], &t).unwrap();
        assert!((n.weight_of("a").unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((n.weight_of("b").unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let n = nbow(&["a", "x"], &t).unwrap();
        assert_eq!(n.weights(), &[1.0]);
        assert_eq!(n.oov, 1);
        assert!(matches!(nbow(&["x"], &t), Err(WmdError::AllOutOfVocabulary(_))));
    }

    #[test]
    fn identical_bags_are_at_zero() {
        let t = line_table();
        let a = bag(&["a", "c"], &[0.3, 0.7]);
        assert_eq!(wmd(&a, &a, &t), 0.0);
        assert_eq!(wcd_lower_bound(&a, &a, &t), 0.0);
    }

    #[test]
    fn unique_plan_example() {
        let t = line_table();
        let a = bag(&["a", "b"], &[0.5, 0.5]);
        let b = bag(&["c"], &[1.0]);
        assert!((wmd(&a, &b, &t) - 2.5).abs() < 1e-12);
        assert!((wcd_lower_bound(&a, &b, &t) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_example() {
        let t = line_table();
        let a = bag(&["a", "c"], &[0.5, 0.5]);
        let b = bag(&["b", "d"], &[0.5, 0.5]);
        assert!((wmd(&a, &b, &t) - 1.0).abs() < 1e-12);
        assert!(wcd_lower_bound(&a, &b, &t) <= 1.0 + 1e-12);
    }

    #[test]
    fn from_weights_validates() {
        assert!(NBow::from_weights(vec!["a".into(), "a".into()], vec![0.5, 0.5]).is_err());
        assert!(NBow::from_weights(vec!["a".into()], vec![-1.0]).is_err());
        assert!(NBow::from_weights(vec![], vec![]).is_err());
    }
}
