//! Word vectors in the textual `vocab_size dim` + `word v1 .. vdim` format.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("cannot read embeddings: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing header line")]
    MissingHeader,
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    data: Vec<f64>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        EmbeddingTable {
            dim,
            words: Vec::new(),
            data: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Adds a word; returns false (and changes nothing) for a duplicate or a
    /// vector of the wrong length.
    pub fn insert(&mut self, word: impl Into<String>, vector: &[f64]) -> bool {
        let word = word.into();
        if vector.len() != self.dim || self.index.contains_key(&word) {
            return false;
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(vector);
        true
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Exact lookup, then lowercase.
    pub fn lookup(&self, word: &str) -> Option<&str> {
        if let Some(&i) = self.index.get(word) {
            return Some(&self.words[i]);
        }
        let lower = word.to_lowercase();
        self.index.get(&lower).map(|&i| self.words[i].as_str())
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        let i = *self.index.get(word)?;
        Some(&self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, EmbeddingError> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or(EmbeddingError::MissingHeader)??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || EmbeddingError::Format {
            line: 1,
            message: format!("expected header \"vocab_size dim\", found {header:?}"),
        };
        if fields.len() != 2 {
            return Err(bad_header());
        }
        let vocab: usize = fields[0].parse().map_err(|_| bad_header())?;
        let dim: usize = fields[1].parse().map_err(|_| bad_header())?;
        if dim == 0 {
            return Err(bad_header());
        }
        let mut table = EmbeddingTable::new(dim);
        let mut row = Vec::with_capacity(dim);
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| EmbeddingError::Format {
                line: line_no,
                message,
            };
            let mut parts = line.split_whitespace();
            let word = parts.next().expect("non-empty line has a field");
            row.clear();
            for v in parts {
                row.push(v.parse::<f64>().map_err(|_| err(format!("invalid number {v:?}")))?);
            }
            if row.len() != dim {
                return Err(err(format!("expected {dim} values for {word:?}, found {}", row.len())));
            }
            if !table.insert(word, &row) {
                return Err(err(format!("duplicate word {word:?}")));
            }
        }
        if table.len() != vocab {
            return Err(EmbeddingError::Format {
                line: 1,
                message: format!("header declares {vocab} words, file has {}", table.len()),
            });
        }
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.len(), self.dim);
        for w in &self.words {
            out.push_str(w);
            for v in self.vector(w).expect("own word") {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable, EmbeddingError> {
    EmbeddingTable::from_reader(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn loads_declared_entries() {
        let t = EmbeddingTable::from_reader(Cursor::new("2 3\nfoo 1 2 3\nbar 0.5 -1 1e-3\n")).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.len(), 2);
        assert_eq!(t.vector("bar").unwrap(), &[0.5, -1.0, 0.001]);
        let again = EmbeddingTable::from_reader(Cursor::new(t.to_text())).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn short_row_reports_its_line() {
        let err = EmbeddingTable::from_reader(Cursor::new("2 3\nfoo 1 2 3\nbar 1 2\n")).unwrap_err();
        assert!(matches!(err, EmbeddingError::Format { line: 3, .. }), "{err}");
    }

    #[test]
    fn empty_file_lacks_header() {
        assert!(matches!(
            EmbeddingTable::from_reader(Cursor::new("")),
            Err(EmbeddingError::MissingHeader)
        ));
    }

    #[test]
    fn duplicates_and_count_mismatch_are_errors() {
        let err = EmbeddingTable::from_reader(Cursor::new("2 1\na 1\na 2\n")).unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let err = EmbeddingTable::from_reader(Cursor::new("3 1\na 1\nb 2\n")).unwrap_err();
        assert!(err.to_string().contains("declares 3"));
    }

    #[test]
    fn lookup_falls_back_to_lowercase() {
        let mut t = EmbeddingTable::new(1);
        t.insert("nasa", &[1.0]);
        assert_eq!(t.lookup("NASA"), Some("nasa"));
        assert_eq!(t.lookup("moon"), None);
    }
}
