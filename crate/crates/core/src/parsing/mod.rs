//! Instruction to landmark-list extraction and its evaluation metric.

mod chunks;
mod remote;

use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::remote::RemoteError;

pub use chunks::{default_stoplist, NounChunker};
pub use remote::{parse_completion, LlmRequest, LlmResponse, RemoteParser, DEFAULT_FEW_SHOT_PROMPT};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("instruction is empty")]
    EmptyInstruction,
    #[error("landmark list is empty")]
    EmptyLandmarks,
    #[error("landmark {0} is empty")]
    EmptyLandmark(usize),
    #[error("no landmarks found in `{0}`")]
    NothingExtracted(String),
    #[error("completion has no numbered landmark lines: {raw:?}")]
    MalformedCompletion { raw: String },
    #[error(transparent)]
    Remote(#[from] RemoteError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Instruction(String);

impl Instruction {
    pub fn new(text: impl Into<String>) -> Result<Self, ParseError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(ParseError::EmptyInstruction);
        }
        Ok(Self(text))
    }

    pub fn text(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Instruction {
    type Error = ParseError;
    fn try_from(s: String) -> Result<Self, ParseError> {
        Self::new(s)
    }
}

impl From<Instruction> for String {
    fn from(i: Instruction) -> String {
        i.0
    }
}

/// Ordered, non-empty list of landmark descriptions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LandmarkList(Vec<String>);

impl LandmarkList {
    pub fn new(landmarks: Vec<String>) -> Result<Self, ParseError> {
        if landmarks.is_empty() {
            return Err(ParseError::EmptyLandmarks);
        }
        if let Some(i) = landmarks.iter().position(|l| l.trim().is_empty()) {
            return Err(ParseError::EmptyLandmark(i));
        }
        Ok(Self(landmarks))
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl Deref for LandmarkList {
    type Target = [String];
    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl TryFrom<Vec<String>> for LandmarkList {
    type Error = ParseError;
    fn try_from(v: Vec<String>) -> Result<Self, ParseError> {
        Self::new(v)
    }
}

impl From<LandmarkList> for Vec<String> {
    fn from(l: LandmarkList) -> Vec<String> {
        l.0
    }
}

/// Anything that turns an instruction into landmarks.
pub trait LandmarkParser: Send + Sync {
    fn extract(&self, instruction: &Instruction) -> Result<LandmarkList, ParseError>;
}

const ARTICLES: [&str; 3] = ["a", "an", "the"];

/// Case-folds, collapses whitespace and drops leading articles.
pub fn normalize_landmark(s: &str) -> String {
    let lower = s.to_lowercase();
    let mut words: Vec<&str> = lower.split_whitespace().collect();
    while words.len() > 1 && ARTICLES.contains(&words[0]) {
        words.remove(0);
    }
    words.join(" ")
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Longest-common-subsequence overlap divided by the ground-truth length.
/// Elements are compared after [`normalize_landmark`].
pub fn extraction_success(extracted: &[String], ground_truth: &LandmarkList) -> f64 {
    let a: Vec<String> = extracted.iter().map(|s| normalize_landmark(s)).collect();
    let b: Vec<String> = ground_truth.iter().map(|s| normalize_landmark(s)).collect();
    lcs_len(&a, &b) as f64 / b.len() as f64
}

/// One corpus line: `instruction<TAB>landmark; landmark; ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub instruction: Instruction,
    pub landmarks: LandmarkList,
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (instr, lms) = t.split_once('\t').ok_or_else(|| format!("line {}: missing tab separator", i + 1))?;
        let landmarks = LandmarkList::new(lms.split(';').map(|s| s.trim().to_string()).collect())
            .map_err(|e| format!("line {}: {e}", i + 1))?;
        let instruction = Instruction::new(instr.trim()).map_err(|e| format!("line {}: {e}", i + 1))?;
        out.push(CorpusEntry { instruction, landmarks });
    }
    Ok(out)
}

/// Bundled 20-instruction corpus with hand-written landmark lists.
pub const BUNDLED_CORPUS: &str = include_str!("../../data/instructions.tsv");

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn list(v: &[&str]) -> LandmarkList {
        LandmarkList::new(v.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn lcs_examples() {
        assert!((extraction_success(&strs(&["a", "c"]), &list(&["a", "b", "c"])) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(extraction_success(&strs(&["x", "y"]), &list(&["x", "y"])), 1.0);
        assert_eq!(extraction_success(&strs(&["b", "a"]), &list(&["a", "b"])), 0.5);
        assert_eq!(extraction_success(&[], &list(&["a"])), 0.0);
    }

    #[test]
    fn articles_and_case_are_ignored() {
        let gt = list(&["a statue", "The Library"]);
        assert_eq!(extraction_success(&strs(&["statue", "an library"]), &gt), 1.0);
        assert_eq!(normalize_landmark("  The  white   Building "), "white building");
        // a lone article is kept as a word
        assert_eq!(normalize_landmark("a"), "a");
    }

    #[test]
    fn constructors_validate() {
        assert!(matches!(Instruction::new("  "), Err(ParseError::EmptyInstruction)));
        assert!(matches!(LandmarkList::new(vec![]), Err(ParseError::EmptyLandmarks)));
        assert!(matches!(LandmarkList::new(strs(&["a", " "])), Err(ParseError::EmptyLandmark(1))));
    }

    #[test]
    fn bundled_corpus_has_twenty_entries() {
        assert_eq!(parse_corpus(BUNDLED_CORPUS).unwrap().len(), 20);
    }

    fn is_subsequence(gt: &[String], xs: &[String]) -> bool {
        let mut it = xs.iter();
        gt.iter().all(|g| it.any(|x| x == g))
    }

    proptest! {
        #[test]
        fn perfect_score_iff_subsequence(
            gt in proptest::collection::vec("[a-d]", 1..6),
            xs in proptest::collection::vec("[a-d]", 0..8),
        ) {
            let s = extraction_success(&xs, &LandmarkList::new(gt.clone()).unwrap());
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s == 1.0, is_subsequence(&gt, &xs));
        }

        #[test]
        fn article_insertion_is_invisible(
            gt in proptest::collection::vec("[a-d]", 1..6),
            xs in proptest::collection::vec("[a-d]", 0..8),
            art in 0usize..3,
        ) {
            let base = extraction_success(&xs, &LandmarkList::new(gt.clone()).unwrap());
            let xs2: Vec<String> = xs.iter().map(|x| format!("{} {x}", ARTICLES[art])).collect();
            let gt2: Vec<String> = gt.iter().map(|x| format!("{} {x}", ARTICLES[(art + 1) % 3].to_uppercase())).collect();
            prop_assert_eq!(extraction_success(&xs2, &LandmarkList::new(gt2).unwrap()), base);
        }
    }
}
