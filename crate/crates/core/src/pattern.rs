//! Debunking-pattern grammar and matcher.
//!
//! A pattern is literal text with two constructs:
//!
//! * `(a|b|c)` requires exactly one of the alternatives,
//! * `(x)` (a group without `|`) is optional.
//!
//! Groups may nest. Any whitespace in a pattern stands for one or more
//! whitespace characters in the text, and a skipped optional group never
//! leaves a doubled or dangling space behind: `is (completely) false` accepts
//! `is false` as well as `is completely false`.
//!
//! [`expand_alternations`] enumerates the finite language of a pattern. The
//! matcher does not use it; it runs a small NFA over the parsed pattern, so
//! the expansion serves as an independent check on the matcher.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Lang, LanguageProfile};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternSpec {
    pub lang: Lang,
    pub source: String,
}

impl PatternSpec {
    pub fn new(lang: Lang, source: impl Into<String>) -> Self {
        PatternSpec {
            lang,
            source: source.into(),
        }
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lang, self.source)
    }
}

/// Offsets are character offsets into the pattern source.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("unclosed group opened at offset {0}")]
    Unclosed(usize),
    #[error("unmatched ')' at offset {0}")]
    UnmatchedClose(usize),
    #[error("empty alternative at offset {0}")]
    EmptyAlternative(usize),
    #[error("'|' outside a group at offset {0}")]
    BareAlternation(usize),
    #[error("pattern can match the empty string")]
    EmptyExpansion,
}

/// A located match of a pattern in a text. Offsets count characters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSpan {
    pub pattern: PatternSpec,
    pub start: usize,
    pub end: usize,
    pub matched_text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Char(char),
    Space,
    /// One alternative means the group is optional.
    Group(Vec<Vec<Node>>),
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
}

impl Parser<'_> {
    fn sequence(&mut self, depth: usize) -> Result<Vec<Node>, PatternError> {
        let mut seq = Vec::new();
        while let Some(&c) = self.chars.get(self.pos) {
            match c {
                '(' => {
                    let open = self.pos;
                    self.pos += 1;
                    seq.push(self.group(open, depth + 1)?);
                }
                ')' if depth == 0 => return Err(PatternError::UnmatchedClose(self.pos)),
                '|' if depth == 0 => return Err(PatternError::BareAlternation(self.pos)),
                ')' | '|' => break,
                c if c.is_whitespace() => {
                    while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
                        self.pos += 1;
                    }
                    if seq.last() != Some(&Node::Space) {
                        seq.push(Node::Space);
                    }
                }
                c => {
                    seq.push(Node::Char(c));
                    self.pos += 1;
                }
            }
        }
        Ok(seq)
    }

    fn group(&mut self, open: usize, depth: usize) -> Result<Node, PatternError> {
        let mut alternatives = Vec::new();
        loop {
            let alt_start = self.pos;
            let alt = self.sequence(depth)?;
            if alt.iter().all(|n| *n == Node::Space) {
                return Err(PatternError::EmptyAlternative(alt_start));
            }
            alternatives.push(alt);
            match self.chars.get(self.pos) {
                Some('|') => self.pos += 1,
                Some(')') => {
                    self.pos += 1;
                    return Ok(Node::Group(alternatives));
                }
                _ => return Err(PatternError::Unclosed(open)),
            }
        }
    }
}

fn parse(source: &str) -> Result<Vec<Node>, PatternError> {
    let chars: Vec<char> = source.chars().collect();
    let mut parser = Parser {
        chars: &chars,
        pos: 0,
    };
    parser.sequence(0)
}

/// Collapses whitespace runs to one space and trims both ends.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn expand_seq(seq: &[Node]) -> Vec<String> {
    let mut acc = vec![String::new()];
    for node in seq {
        let parts: Vec<String> = match node {
            Node::Char(c) => vec![c.to_string()],
            Node::Space => vec![" ".to_string()],
            Node::Group(alts) if alts.len() == 1 => {
                let mut v = vec![String::new()];
                v.extend(expand_seq(&alts[0]));
                v
            }
            Node::Group(alts) => alts.iter().flat_map(|a| expand_seq(a)).collect(),
        };
        acc = acc
            .iter()
            .flat_map(|prefix| parts.iter().map(move |p| format!("{prefix}{p}")))
            .collect();
    }
    acc
}

/// Every literal string the pattern accepts, whitespace-normalized and
/// deduplicated, in enumeration order (skipped optional groups first).
pub fn expand_alternations(spec: &PatternSpec) -> Result<Vec<String>, PatternError> {
    let nodes = parse(&spec.source)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in expand_seq(&nodes) {
        let s = normalize_whitespace(&s);
        if s.is_empty() {
            return Err(PatternError::EmptyExpansion);
        }
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
enum State {
    Char(char, usize),
    Space(usize),
    Split(usize, usize),
    Jump(usize),
    Accept,
}

/// Compiled matcher. Immutable; share freely across threads.
#[derive(Clone, Debug)]
pub struct CompiledPattern {
    spec: PatternSpec,
    states: Vec<State>,
    case_insensitive: bool,
    word_boundary: bool,
}

/// Characters treated as equal beyond case: typographic apostrophes.
fn fold_char(c: char) -> char {
    match c {
        '\u{2019}' | '\u{2018}' | '\u{02BC}' | '\u{FF07}' => '\'',
        c => c,
    }
}

fn chars_equal(a: char, b: char, case_insensitive: bool) -> bool {
    let (a, b) = (fold_char(a), fold_char(b));
    a == b || (case_insensitive && a.to_lowercase().eq(b.to_lowercase()))
}

/// Case and apostrophe folding matching what the matcher treats as equal.
pub fn fold_text(s: &str, case_insensitive: bool) -> String {
    let folded: String = s.chars().map(fold_char).collect();
    if case_insensitive {
        folded.to_lowercase()
    } else {
        folded
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Builder {
    states: Vec<State>,
}

impl Builder {
    fn push(&mut self, s: State) -> usize {
        self.states.push(s);
        self.states.len() - 1
    }

    /// Emits `seq` so that it continues to `next`; returns its entry state.
    fn emit(&mut self, seq: &[Node], next: usize) -> usize {
        let mut entry = next;
        for node in seq.iter().rev() {
            entry = match node {
                Node::Char(c) => self.push(State::Char(*c, entry)),
                Node::Space => self.push(State::Space(entry)),
                Node::Group(alts) if alts.len() == 1 => {
                    let body = self.emit(&alts[0], entry);
                    self.push(State::Split(entry, body))
                }
                Node::Group(alts) => {
                    let target = self.push(State::Jump(entry));
                    let mut entries: Vec<usize> = alts.iter().map(|a| self.emit(a, target)).collect();
                    let mut head = entries.pop().expect("group has alternatives");
                    while let Some(e) = entries.pop() {
                        head = self.push(State::Split(e, head));
                    }
                    head
                }
            };
        }
        entry
    }
}

/// One NFA thread. `pending` is set once a pattern space has been passed
/// after at least one character; the next literal must then be preceded by
/// whitespace. `in_space` means that whitespace has already been seen.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Thread {
    pc: usize,
    started: bool,
    pending: bool,
    in_space: bool,
}

impl CompiledPattern {
    pub fn compile(spec: &PatternSpec, profile: &LanguageProfile) -> Result<Self, PatternError> {
        Self::with_options(spec, profile.case_insensitive, profile.word_boundary)
    }

    pub fn with_options(
        spec: &PatternSpec,
        case_insensitive: bool,
        word_boundary: bool,
    ) -> Result<Self, PatternError> {
        // validates syntax and rejects patterns that accept ""
        expand_alternations(spec)?;
        let nodes = parse(&spec.source)?;
        let mut builder = Builder { states: Vec::new() };
        let accept = builder.push(State::Accept);
        let start = builder.emit(&nodes, accept);
        let mut states = builder.states;
        // move the entry state to index 0
        states.push(State::Jump(start));
        let last = states.len() - 1;
        states.swap(0, last);
        let remap = |i: usize| {
            if i == 0 {
                last
            } else if i == last {
                0
            } else {
                i
            }
        };
        for s in &mut states {
            *s = match *s {
                State::Char(c, n) => State::Char(c, remap(n)),
                State::Space(n) => State::Space(remap(n)),
                State::Split(a, b) => State::Split(remap(a), remap(b)),
                State::Jump(n) => State::Jump(remap(n)),
                State::Accept => State::Accept,
            };
        }
        Ok(CompiledPattern {
            spec: spec.clone(),
            states,
            case_insensitive,
            word_boundary,
        })
    }

    pub fn spec(&self) -> &PatternSpec {
        &self.spec
    }

    fn closure(&self, seed: Thread, out: &mut Vec<Thread>, accepted: &mut bool) {
        let mut stack = vec![seed];
        let mut seen: HashSet<Thread> = out.iter().copied().collect();
        while let Some(t) = stack.pop() {
            if !seen.insert(t) {
                continue;
            }
            match self.states[t.pc] {
                State::Char(..) => out.push(t),
                State::Accept => *accepted = true,
                State::Jump(n) => stack.push(Thread { pc: n, ..t }),
                State::Split(a, b) => {
                    stack.push(Thread { pc: b, ..t });
                    stack.push(Thread { pc: a, ..t });
                }
                State::Space(n) => stack.push(Thread {
                    pc: n,
                    pending: t.pending || t.started,
                    ..t
                }),
            }
        }
    }

    /// All end offsets `e` such that `text[start..e]` is a full match.
    fn match_ends(&self, text: &[char], start: usize) -> Vec<usize> {
        let mut ends = Vec::new();
        let mut threads = Vec::new();
        let mut accepted = false;
        self.closure(
            Thread {
                pc: 0,
                started: false,
                pending: false,
                in_space: false,
            },
            &mut threads,
            &mut accepted,
        );
        if accepted {
            ends.push(start);
        }
        let mut pos = start;
        while !threads.is_empty() && pos < text.len() {
            let ch = text[pos];
            let mut next = Vec::new();
            let mut accepted = false;
            for t in &threads {
                let State::Char(c, n) = self.states[t.pc] else {
                    continue;
                };
                if ch.is_whitespace() {
                    if t.pending {
                        let stay = Thread { in_space: true, ..*t };
                        if !next.contains(&stay) {
                            next.push(stay);
                        }
                    }
                    continue;
                }
                if t.pending && !t.in_space {
                    continue;
                }
                if chars_equal(ch, c, self.case_insensitive) {
                    self.closure(
                        Thread {
                            pc: n,
                            started: true,
                            pending: false,
                            in_space: false,
                        },
                        &mut next,
                        &mut accepted,
                    );
                }
            }
            pos += 1;
            if accepted {
                ends.push(pos);
            }
            threads = next;
        }
        ends
    }

    /// Whether the whole of `text` is accepted (no boundary checks).
    pub fn is_full_match(&self, text: &str) -> bool {
        let chars: Vec<char> = text.chars().collect();
        self.match_ends(&chars, 0).contains(&chars.len())
    }

    fn boundary_ok(&self, text: &[char], at: usize) -> bool {
        if !self.word_boundary || at == 0 || at >= text.len() {
            return true;
        }
        !(is_word_char(text[at - 1]) && is_word_char(text[at]))
    }

    /// Leftmost-longest, non-overlapping matches, left to right.
    pub fn find_all(&self, text: &str) -> Vec<MatchSpan> {
        let chars: Vec<char> = text.chars().collect();
        let mut spans = Vec::new();
        let mut start = 0;
        while start < chars.len() {
            if !self.boundary_ok(&chars, start) {
                start += 1;
                continue;
            }
            let best = self
                .match_ends(&chars, start)
                .into_iter()
                .filter(|&e| e > start && self.boundary_ok(&chars, e))
                .max();
            match best {
                Some(end) => {
                    spans.push(MatchSpan {
                        pattern: self.spec.clone(),
                        start,
                        end,
                        matched_text: chars[start..end].iter().collect(),
                    });
                    start = end;
                }
                None => start += 1,
            }
        }
        spans
    }
}

pub fn match_text(pattern: &CompiledPattern, text: &str) -> Vec<MatchSpan> {
    pattern.find_all(text)
}

/// The match used as the fake part: leftmost, then longest, then by pattern
/// source so the result does not depend on pattern order.
pub fn first_match(patterns: &[CompiledPattern], text: &str) -> Option<MatchSpan> {
    patterns
        .iter()
        .flat_map(|p| p.find_all(text).into_iter().take(1))
        .min_by(|a, b| {
            a.start
                .cmp(&b.start)
                .then(b.end.cmp(&a.end))
                .then_with(|| a.pattern.source.cmp(&b.pattern.source))
        })
}
