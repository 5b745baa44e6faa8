//! Event-phrase extraction over UD trees.
//!
//! Starting from the tokens covered by the debunking pattern (the fake part)
//! the cascade is:
//!
//! 1. Look at the dependents of the fake-part token. A candidate is linked by
//!    one of the configured relations (nsubj, nsubjpass, dobj, iobj, csubj,
//!    appos), its subtree lies before the fake part, and it is not a lone
//!    demonstrative pronoun. Tokens of the fake part itself never count as
//!    part of a candidate (Japanese patterns such as `は(デマ|フェイク)` start
//!    with the subject's particle). The candidate whose subtree ends closest
//!    to the fake part wins and its subtree is the phrase.
//! 2. Otherwise the fake part moves to its head and step 1 repeats.
//! 3. Once the fake part is the root, the search moves once to the next
//!    sentence (or the previous one, per language) and restarts from that
//!    sentence's root. A second dead end yields nothing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{HopDirection, Lang, LanguageProfile, RulesConfig};
use crate::conllu::{DependencyDocument, Sentence, UdToken};
use crate::pattern::MatchSpan;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FakePart {
    pub sentence_index: usize,
    pub head_token: UdToken,
    pub span_tokens: Vec<UdToken>,
    /// More than one span token has its head outside the span.
    pub fragmented: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventPhrase {
    pub tweet_id: String,
    pub text: String,
    /// Token forms in surface order.
    pub tokens: Vec<String>,
    /// (sentence, token index) pairs in surface order.
    pub token_indices: Vec<(usize, usize)>,
    /// 0 when found in the sentence holding the pattern, 1 after a hop.
    pub hop_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("match {start}..{end} overlaps no token of tweet {tweet_id}")]
    NoOverlap {
        tweet_id: String,
        start: usize,
        end: usize,
    },
}

/// Maps a character span onto the tokens it touches.
pub fn locate_fake_part(doc: &DependencyDocument, span: &MatchSpan) -> Result<FakePart, ExtractError> {
    let overlaps = |t: &UdToken| t.char_start < span.end && span.start < t.char_end;
    let Some((sentence_index, sent)) = doc
        .sentences
        .iter()
        .enumerate()
        .find(|(_, s)| s.tokens.iter().any(overlaps))
    else {
        return Err(ExtractError::NoOverlap {
            tweet_id: doc.tweet_id.clone(),
            start: span.start,
            end: span.end,
        });
    };
    let span_tokens: Vec<UdToken> = sent.tokens.iter().filter(|t| overlaps(t)).cloned().collect();
    let inside = |i: usize| span_tokens.iter().any(|t| t.index == i);
    let exits: Vec<&UdToken> = span_tokens.iter().filter(|t| !inside(t.head)).collect();
    let fragmented = exits.len() > 1;
    let head = exits
        .iter()
        .min_by_key(|t| (sent.depth(t.index), t.index))
        .map(|t| (*t).clone())
        .expect("a token set inside a tree always has an exit");
    if fragmented {
        log::debug!(
            "tweet {}: fake part {:?} spans {} subtrees, using {:?}",
            doc.tweet_id,
            span.matched_text,
            exits.len(),
            head.form
        );
    }
    Ok(FakePart {
        sentence_index,
        head_token: head,
        span_tokens,
        fragmented,
    })
}

/// Forms of the subtree rooted at `index`, in surface order, joined.
pub fn subtree_yield(sentence: &Sentence, index: usize, joiner: &str) -> String {
    sentence
        .subtree(index)
        .iter()
        .filter_map(|&i| sentence.token(i))
        .map(|t| t.form.as_str())
        .collect::<Vec<_>>()
        .join(joiner)
}

/// Outcome of one cascade run, with the bookkeeping the tests look at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub phrase: Option<EventPhrase>,
    pub steps: usize,
    pub cap_hit: bool,
}

pub fn extract_event_phrase(
    doc: &DependencyDocument,
    fake: &FakePart,
    rules: &RulesConfig,
    lang: &Lang,
) -> Option<EventPhrase> {
    let profile = rules.profile(lang)?;
    run_cascade(doc, fake, rules, profile).phrase
}

/// Subtree of the best candidate dependent of `anchor`, without the tokens
/// in `exclude`. Every remaining token must come before `before`.
fn best_candidate(
    sent: &Sentence,
    anchor: usize,
    before: usize,
    exclude: &[usize],
    rules: &RulesConfig,
    profile: &LanguageProfile,
) -> Option<Vec<usize>> {
    sent.dependents(anchor)
        .filter(|t| rules.is_extraction_relation(&t.deprel))
        .filter_map(|t| {
            let mut sub = sent.subtree(t.index);
            sub.retain(|i| !exclude.contains(i));
            let last = *sub.last()?;
            if last >= before {
                return None;
            }
            if let [only] = sub[..] {
                if sent.token(only).is_some_and(|tok| profile.is_demonstrative(&tok.form)) {
                    return None;
                }
            }
            Some((last, t.index, sub))
        })
        .max_by_key(|(last, idx, _)| (*last, *idx))
        .map(|(_, _, sub)| sub)
}

pub fn run_cascade(
    doc: &DependencyDocument,
    fake: &FakePart,
    rules: &RulesConfig,
    profile: &LanguageProfile,
) -> Extraction {
    let mut sent_idx = fake.sentence_index;
    let Some(mut sent) = doc.sentences.get(sent_idx) else {
        return Extraction {
            phrase: None,
            steps: 0,
            cap_hit: false,
        };
    };
    let span: Vec<usize> = fake.span_tokens.iter().map(|t| t.index).collect();
    let span_start = span.iter().copied().min().unwrap_or(fake.head_token.index);
    let mut current = fake.head_token.index;
    let mut hopped = false;
    let total_tokens: usize = doc.token_count();
    let cap = 2 * total_tokens + 4;
    let mut steps = 0;

    while steps < cap {
        steps += 1;
        let (before, exclude) = if hopped {
            (current, &[][..])
        } else {
            (current.min(span_start), &span[..])
        };
        if let Some(sub) = best_candidate(sent, current, before, exclude, rules, profile) {
            let tokens: Vec<String> = sub
                .iter()
                .filter_map(|&i| sent.token(i))
                .map(|t| t.form.clone())
                .collect();
            return Extraction {
                phrase: Some(EventPhrase {
                    tweet_id: doc.tweet_id.clone(),
                    text: tokens.join(&profile.joiner),
                    tokens,
                    token_indices: sub.iter().map(|&i| (sent_idx, i)).collect(),
                    hop_count: usize::from(hopped),
                }),
                steps,
                cap_hit: false,
            };
        }
        let head = sent.token(current).map_or(0, |t| t.head);
        if head != 0 {
            current = head;
            continue;
        }
        if hopped {
            return not_found(steps);
        }
        let next = match profile.hop {
            HopDirection::Following => sent_idx.checked_add(1),
            HopDirection::Preceding => sent_idx.checked_sub(1),
        };
        let Some((idx, root)) = next.and_then(|i| {
            let s = doc.sentences.get(i)?;
            Some((i, s.root()?.index))
        }) else {
            return not_found(steps);
        };
        sent_idx = idx;
        sent = &doc.sentences[idx];
        current = root;
        hopped = true;
    }
    log::error!("tweet {}: extraction cascade hit its step cap", doc.tweet_id);
    Extraction {
        phrase: None,
        steps,
        cap_hit: true,
    }
}

fn not_found(steps: usize) -> Extraction {
    Extraction {
        phrase: None,
        steps,
        cap_hit: false,
    }
}
