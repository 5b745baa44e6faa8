//! CoNLL-U reader and writer for externally produced UD parses.
//!
//! Only the basic tree is kept (ID, FORM, UPOS, HEAD, DEPREL). Multiword
//! token ranges (`3-4`) and empty nodes (`5.1`) are skipped. Character
//! offsets into the tweet come from `TokenRange=start:end` (UDPipe) or
//! `start_char=..|end_char=..` (Stanza) in the MISC column; without them the
//! forms are aligned left to right against the raw text.
//!
//! A sidecar file holds many tweets. A `# tweet_id = <id>` comment opens the
//! parse of a new tweet; following sentences without that comment belong to
//! the same tweet.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UdToken {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    pub upos: String,
    /// 0 is the artificial root.
    pub head: usize,
    pub deprel: String,
    pub char_start: usize,
    pub char_end: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: Option<String>,
    pub tokens: Vec<UdToken>,
}

impl Sentence {
    pub fn token(&self, index: usize) -> Option<&UdToken> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn root(&self) -> Option<&UdToken> {
        self.tokens.iter().find(|t| t.head == 0)
    }

    /// Tokens whose head is `index`, in surface order.
    pub fn dependents(&self, index: usize) -> impl Iterator<Item = &UdToken> {
        self.tokens.iter().filter(move |t| t.head == index)
    }

    /// Distance to the root in head links; the root has depth 0.
    pub fn depth(&self, index: usize) -> usize {
        let mut depth = 0;
        let mut cur = index;
        while let Some(t) = self.token(cur) {
            if t.head == 0 || depth > self.tokens.len() {
                break;
            }
            cur = t.head;
            depth += 1;
        }
        depth
    }

    /// Indices in the subtree rooted at `index` (including it), ascending.
    pub fn subtree(&self, index: usize) -> Vec<usize> {
        let mut out = vec![index];
        let mut i = 0;
        while i < out.len() {
            let cur = out[i];
            out.extend(self.dependents(cur).map(|t| t.index).filter(|&d| d != index));
            i += 1;
            if out.len() > self.tokens.len() {
                break;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyDocument {
    pub tweet_id: String,
    pub sentences: Vec<Sentence>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// 0-based sentence index.
    pub sentence: usize,
    pub token: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.token {
            Some(t) => write!(f, "sentence {}, token {}: {}", self.sentence + 1, t, self.message),
            None => write!(f, "sentence {}: {}", self.sentence + 1, self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("CoNLL-U error in sentence {sentence}, line {line}: {message}")]
pub struct ConlluError {
    /// 1-based.
    pub sentence: usize,
    /// 1-based line in the input text.
    pub line: usize,
    pub message: String,
}

struct RawToken {
    token: UdToken,
    line: usize,
    has_offsets: bool,
    space_after: bool,
}

struct RawSentence {
    first_line: usize,
    text: Option<String>,
    tokens: Vec<RawToken>,
}

fn misc_offsets(misc: &str) -> Option<(usize, usize)> {
    let mut start = None;
    let mut end = None;
    for item in misc.split('|') {
        let (k, v) = item.split_once('=').unwrap_or((item, ""));
        match k {
            "TokenRange" => {
                let (s, e) = v.split_once(':')?;
                return Some((s.parse().ok()?, e.parse().ok()?));
            }
            "start_char" => start = v.parse().ok(),
            "end_char" => end = v.parse().ok(),
            _ => {}
        }
    }
    Some((start?, end?))
}

fn read_sentences(text: &str, line_offset: usize) -> Result<Vec<RawSentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut cur: Option<RawSentence> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = line_offset + idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(s) = cur.take() {
                sentences.push(s);
            }
            continue;
        }
        let sent = cur.get_or_insert_with(|| RawSentence {
            first_line: line_no,
            text: None,
            tokens: Vec::new(),
        });
        let err = |message: String| ConlluError {
            sentence: sentences.len() + 1,
            line: line_no,
            message,
        };
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                if k.trim() == "text" {
                    sent.text = Some(v.trim().to_string());
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(err(format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| err(format!("invalid token id {:?}", cols[0])))?;
        if index != sent.tokens.len() + 1 {
            return Err(err(format!("token id {index} out of sequence")));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| err(format!("non-integer head {:?}", cols[6])))?;
        let offsets = misc_offsets(cols[9]);
        let (char_start, char_end) = offsets.unwrap_or((0, 0));
        sent.tokens.push(RawToken {
            token: UdToken {
                index,
                form: cols[1].to_string(),
                upos: cols[3].to_string(),
                head,
                deprel: cols[7].to_string(),
                char_start,
                char_end,
            },
            line: line_no,
            has_offsets: offsets.is_some(),
            space_after: !cols[9].split('|').any(|m| m == "SpaceAfter=No"),
        });
    }
    if let Some(s) = cur.take() {
        sentences.push(s);
    }
    // sentences consisting only of comments carry no tree
    sentences.retain(|s| !s.tokens.is_empty());
    Ok(sentences)
}

/// Aligns token forms left to right against `raw`, skipping whitespace.
fn align(sentences: &mut [RawSentence], raw: &str) -> Result<(), ConlluError> {
    let chars: Vec<char> = raw.chars().collect();
    let mut cursor = 0;
    for (s_idx, sent) in sentences.iter_mut().enumerate() {
        for rt in &mut sent.tokens {
            while chars.get(cursor).is_some_and(|c| c.is_whitespace()) {
                cursor += 1;
            }
            let form: Vec<char> = rt.token.form.chars().collect();
            let end = cursor + form.len();
            if form.is_empty() || end > chars.len() || chars[cursor..end] != form[..] {
                return Err(ConlluError {
                    sentence: s_idx + 1,
                    line: rt.line,
                    message: format!(
                        "cannot align token {:?} with the raw text at offset {cursor}",
                        rt.token.form
                    ),
                });
            }
            rt.token.char_start = cursor;
            rt.token.char_end = end;
            cursor = end;
        }
    }
    Ok(())
}

fn reconstruct_raw(sentences: &[RawSentence]) -> String {
    if sentences.iter().all(|s| s.text.is_some()) {
        return sentences
            .iter()
            .filter_map(|s| s.text.as_deref())
            .collect::<Vec<_>>()
            .join(" ");
    }
    let mut raw = String::new();
    for sent in sentences {
        if !raw.is_empty() && !raw.ends_with(' ') {
            raw.push(' ');
        }
        for rt in &sent.tokens {
            raw.push_str(&rt.token.form);
            if rt.space_after {
                raw.push(' ');
            }
        }
    }
    raw
}

/// Parses one tweet's CoNLL-U block; offsets come from MISC or from the
/// `# text` comments / forms when absent.
pub fn parse_conllu(text: &str, tweet_id: &str) -> Result<DependencyDocument, ConlluError> {
    parse_conllu_with_raw(text, tweet_id, None, 0)
}

/// Like [`parse_conllu`], aligning against the tweet's raw text when a token
/// lacks explicit offsets. `line_offset` shifts reported line numbers.
pub fn parse_conllu_with_raw(
    text: &str,
    tweet_id: &str,
    raw: Option<&str>,
    line_offset: usize,
) -> Result<DependencyDocument, ConlluError> {
    let mut raw_sentences = read_sentences(text, line_offset)?;
    let all_offsets = raw_sentences
        .iter()
        .all(|s| s.tokens.iter().all(|t| t.has_offsets));
    if !all_offsets {
        let fallback;
        let raw = match raw {
            Some(r) => r,
            None => {
                fallback = reconstruct_raw(&raw_sentences);
                &fallback
            }
        };
        align(&mut raw_sentences, raw)?;
    }
    let doc = DependencyDocument {
        tweet_id: tweet_id.to_string(),
        sentences: raw_sentences
            .iter()
            .map(|s| Sentence {
                text: s.text.clone(),
                tokens: s.tokens.iter().map(|t| t.token.clone()).collect(),
            })
            .collect(),
    };
    if let Some(d) = validate_tree(&doc).into_iter().next() {
        let sent = &raw_sentences[d.sentence];
        let line = d
            .token
            .and_then(|t| sent.tokens.get(t - 1))
            .map_or(sent.first_line, |t| t.line);
        return Err(ConlluError {
            sentence: d.sentence + 1,
            line,
            message: d.message,
        });
    }
    Ok(doc)
}

/// Checks every structural invariant; an empty result means the document
/// is a forest of well-formed trees with sane offsets.
pub fn validate_tree(doc: &DependencyDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (s_idx, sent) in doc.sentences.iter().enumerate() {
        let n = sent.tokens.len();
        let diag = |token: Option<usize>, message: String| Diagnostic {
            sentence: s_idx,
            token,
            message,
        };
        let mut structural_ok = true;
        for (i, t) in sent.tokens.iter().enumerate() {
            if t.index != i + 1 {
                out.push(diag(Some(t.index), format!("token id {} out of sequence", t.index)));
                structural_ok = false;
            }
            if t.head > n {
                out.push(diag(Some(t.index), format!("head {} out of range 0..={n}", t.head)));
                structural_ok = false;
            } else if t.head == t.index {
                out.push(diag(Some(t.index), "token is its own head".into()));
                structural_ok = false;
            }
            if t.char_start >= t.char_end {
                out.push(diag(
                    Some(t.index),
                    format!("empty character range {}..{}", t.char_start, t.char_end),
                ));
            }
        }
        let roots: Vec<usize> = sent.tokens.iter().filter(|t| t.head == 0).map(|t| t.index).collect();
        match roots.len() {
            1 => {}
            0 => out.push(diag(None, "no root token".into())),
            k => out.push(diag(Some(roots[1]), format!("{k} root tokens"))),
        }
        if !structural_ok {
            continue;
        }
        // 0 = unvisited, 1 = on current walk, 2 = done
        let mut state = vec![0u8; n + 1];
        for start in 1..=n {
            if state[start] != 0 {
                continue;
            }
            let mut walk = Vec::new();
            let mut cur = start;
            while cur != 0 && state[cur] == 0 {
                state[cur] = 1;
                walk.push(cur);
                cur = sent.tokens[cur - 1].head;
            }
            if cur != 0 && state[cur] == 1 {
                out.push(diag(Some(cur), format!("head cycle through token {cur}")));
            }
            for w in walk {
                state[w] = 2;
            }
        }
    }
    out
}

impl DependencyDocument {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    /// Writes the document back as CoNLL-U with explicit `TokenRange`
    /// offsets, so that re-parsing gives an identical document.
    pub fn to_conllu(&self) -> String {
        let mut out = String::new();
        for (i, sent) in self.sentences.iter().enumerate() {
            if i == 0 {
                out.push_str(&format!("# tweet_id = {}\n", self.tweet_id));
            }
            if let Some(text) = &sent.text {
                out.push_str(&format!("# text = {text}\n"));
            }
            for t in &sent.tokens {
                out.push_str(&format!(
                    "{}\t{}\t_\t{}\t_\t_\t{}\t{}\t_\tTokenRange={}:{}\n",
                    t.index, t.form, t.upos, t.head, t.deprel, t.char_start, t.char_end
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// One tweet's block inside a sidecar file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SidecarBlock {
    pub tweet_id: String,
    pub text: String,
    /// Number of lines before the block in the sidecar file.
    pub line_offset: usize,
}

/// Splits a sidecar file into per-tweet blocks at `# tweet_id = ` comments.
/// Lines before the first such comment are ignored.
pub fn split_sidecar(text: &str) -> Vec<SidecarBlock> {
    let mut blocks: Vec<SidecarBlock> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let id = line
            .strip_prefix('#')
            .and_then(|c| c.split_once('='))
            .filter(|(k, _)| k.trim() == "tweet_id")
            .map(|(_, v)| v.trim().to_string());
        if let Some(id) = id {
            blocks.push(SidecarBlock {
                tweet_id: id,
                text: String::new(),
                line_offset: idx + 1,
            });
            continue;
        }
        if let Some(b) = blocks.last_mut() {
            b.text.push_str(line);
            b.text.push('\n');
        }
    }
    blocks
}
