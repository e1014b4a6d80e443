//! Lexicon-driven noun-phrase chunker.
//!
//! A chunk is a maximal run of determiners, adjectives and nouns that ends
//! in a noun. Capitalized words that do not open a sentence count as
//! proper nouns. No tagger is involved, so words outside the lexicon break
//! chunks.

use std::collections::HashSet;

use super::{normalize_landmark, Instruction, LandmarkList, LandmarkParser, ParseError};

const DETERMINERS: &[&str] = &["a", "an", "the", "this", "that", "these", "those", "some", "another", "any", "each", "every"];

const ADJECTIVES: &[&str] = &[
    // colors
    "white", "black", "red", "blue", "green", "yellow", "orange", "pink", "purple", "brown", "gray", "grey", "silver", "golden",
    "dark", "light", "bright", // size and shape
    "big", "small", "large", "little", "tall", "short", "long", "wide", "narrow", "huge", "tiny", "round", "square", "high",
    "low", // material and condition
    "wooden", "metal", "glass", "brick", "stone", "concrete", "plastic", "old", "new", "broken", "open", "closed", "empty",
    "painted", "covered", "striped", // position-free descriptors
    "main", "first", "second", "third", "last", "final", "next", "other", "public", "private", "local",
];

const NOUNS: &[&str] = &[
    "sign",
    "stop",
    "building",
    "house",
    "tree",
    "oak",
    "pine",
    "palm",
    "bush",
    "hedge",
    "statue",
    "library",
    "park",
    "cone",
    "dumpster",
    "hydrant",
    "fire",
    "table",
    "picnic",
    "car",
    "truck",
    "van",
    "bus",
    "bike",
    "bicycle",
    "rack",
    "lamp",
    "street",
    "road",
    "tower",
    "water",
    "bench",
    "court",
    "basketball",
    "tennis",
    "sidewalk",
    "mailbox",
    "gate",
    "fence",
    "wall",
    "station",
    "gas",
    "lot",
    "parking",
    "manhole",
    "cover",
    "traffic",
    "light",
    "pond",
    "lake",
    "river",
    "bridge",
    "path",
    "trail",
    "playground",
    "fountain",
    "square",
    "container",
    "shipping",
    "gravel",
    "pile",
    "cafe",
    "restaurant",
    "shop",
    "store",
    "church",
    "school",
    "hospital",
    "garage",
    "shed",
    "barn",
    "field",
    "lawn",
    "grass",
    "garden",
    "corner",
    "intersection",
    "crosswalk",
    "door",
    "entrance",
    "exit",
    "stairs",
    "staircase",
    "ramp",
    "pole",
    "post",
    "flag",
    "flagpole",
    "billboard",
    "kiosk",
    "booth",
    "tent",
    "trailer",
    "dock",
    "pier",
    "fountain",
    "monument",
    "sculpture",
    "clock",
    "arch",
    "archway",
    "tunnel",
    "overpass",
    "curb",
    "hill",
    "rock",
    "boulder",
    "trash",
    "can",
    "bin",
    "recycling",
    "hut",
    "cabin",
    "warehouse",
    "office",
    "apartment",
    "plaza",
    "museum",
    "theater",
    "stadium",
    "gym",
    "pool",
    "bank",
    "pharmacy",
    "market",
    "chair",
    "umbrella",
    "box",
    "barrel",
    "crate",
    "pipe",
    "cable",
    "antenna",
    "dish",
    "window",
    "roof",
    "chimney",
    "column",
    "pillar",
    "person",
    "dog",
    "cat",
    "bird",
    "horse",
    "cow",
    "sheep",
    "scooter",
    "motorcycle",
    "cart",
    "tractor",
    "forklift",
    "crane",
    "ladder",
    "hose",
    "tire",
    "tank",
    "silo",
    "vending",
    "machine",
];

/// Nouns that double as imperative verbs ("stop at", "park near").
const VERBAL: &[&str] = &["stop", "park", "turn", "cross", "exit"];

const PREPOSITIONS: &[&str] =
    &["at", "by", "near", "in", "on", "next", "before", "after", "beside", "behind", "past", "to", "until", "when", "outside"];

/// Directional and abstract nouns dropped after chunking.
pub fn default_stoplist() -> HashSet<String> {
    [
        "left",
        "right",
        "way",
        "end",
        "turn",
        "side",
        "front",
        "back",
        "top",
        "bottom",
        "direction",
        "middle",
        "road",
        "street",
        "path",
        "sidewalk",
        "destination",
        "route",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tag {
    Det,
    Adj,
    Noun,
    Other,
    Break,
}

#[derive(Clone, Debug)]
pub struct NounChunker {
    stoplist: HashSet<String>,
}

impl Default for NounChunker {
    fn default() -> Self {
        Self { stoplist: default_stoplist() }
    }
}

impl NounChunker {
    pub fn new(stoplist: HashSet<String>) -> Self {
        Self { stoplist }
    }

    /// Noun chunks in textual order, lowercased, leading articles removed,
    /// stoplisted chunks dropped. Duplicates are kept.
    pub fn chunks(&self, text: &str) -> Vec<String> {
        let tokens = tokenize(text);
        let mut out = Vec::new();
        let mut run: Vec<(String, Tag)> = Vec::new();
        let mut flush = |run: &mut Vec<(String, Tag)>| {
            while run.last().is_some_and(|(_, t)| *t != Tag::Noun) {
                run.pop();
            }
            let start = run.iter().position(|(_, t)| *t != Tag::Det).unwrap_or(run.len());
            let words: Vec<&str> = run[start..].iter().map(|(w, _)| w.as_str()).collect();
            let joined = words.join(" ");
            run.clear();
            if joined.is_empty() {
                return;
            }
            let phrase = normalize_landmark(&joined);
            let head = phrase.rsplit(' ').next().unwrap_or("");
            if self.stoplist.contains(&phrase) || self.stoplist.contains(head) {
                return;
            }
            out.push(phrase);
        };
        let mut sentence_start = true;
        for (k, tok) in tokens.iter().enumerate() {
            let tag = match tok {
                Token::Punct(p) => {
                    if matches!(p, '.' | '!' | '?' | ';' | ':') {
                        sentence_start = true;
                    }
                    Tag::Break
                }
                Token::Word(w) => {
                    let lower = w.to_lowercase();
                    let mut t = classify(&lower);
                    let before_prep =
                        matches!(tokens.get(k + 1), Some(Token::Word(n)) if PREPOSITIONS.contains(&n.to_lowercase().as_str()));
                    if run.is_empty() && before_prep && VERBAL.contains(&lower.as_str()) {
                        t = Tag::Other;
                    }
                    let proper = !sentence_start && t == Tag::Other && w.chars().next().is_some_and(char::is_uppercase);
                    sentence_start = false;
                    if proper {
                        Tag::Noun
                    } else {
                        t
                    }
                }
            };
            match tag {
                Tag::Det if run.iter().any(|(_, t)| *t != Tag::Det) => {
                    flush(&mut run);
                    run.push((word_of(tok), tag));
                }
                Tag::Det | Tag::Adj | Tag::Noun => run.push((word_of(tok), tag)),
                Tag::Other | Tag::Break => flush(&mut run),
            }
        }
        flush(&mut run);
        out
    }

    pub fn extract_chunks(&self, instruction: &Instruction) -> Result<LandmarkList, ParseError> {
        let chunks = self.chunks(instruction.text());
        if chunks.is_empty() {
            return Err(ParseError::NothingExtracted(instruction.text().to_string()));
        }
        LandmarkList::new(chunks)
    }
}

impl LandmarkParser for NounChunker {
    fn extract(&self, instruction: &Instruction) -> Result<LandmarkList, ParseError> {
        self.extract_chunks(instruction)
    }
}

enum Token {
    Word(String),
    Punct(char),
}

fn word_of(t: &Token) -> String {
    match t {
        Token::Word(w) => w.to_lowercase(),
        Token::Punct(c) => c.to_string(),
    }
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() || c == '\'' || c == '-' {
            cur.push(c);
        } else {
            if !cur.is_empty() {
                out.push(Token::Word(std::mem::take(&mut cur)));
            }
            if !c.is_whitespace() {
                out.push(Token::Punct(c));
            }
        }
    }
    if !cur.is_empty() {
        out.push(Token::Word(cur));
    }
    out
}

fn classify(lower: &str) -> Tag {
    if DETERMINERS.contains(&lower) {
        Tag::Det
    } else if NOUNS.contains(&lower) {
        Tag::Noun
    } else if ADJECTIVES.contains(&lower) {
        Tag::Adj
    } else if lower.strip_suffix('s').is_some_and(|stem| NOUNS.contains(&stem)) {
        // plural
        Tag::Noun
    } else {
        Tag::Other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parsing::{extraction_success, parse_corpus, BUNDLED_CORPUS};

    fn run(text: &str) -> Vec<String> {
        NounChunker::default().chunks(text)
    }

    #[test]
    fn two_plain_noun_phrases() {
        assert_eq!(run("Go to the stop sign, then a white building"), vec!["stop sign", "white building"]);
    }

    #[test]
    fn stoplist_filters_directions() {
        let only_left: HashSet<String> = ["left".to_string()].into();
        assert_eq!(NounChunker::new(only_left).chunks("Take a left and go to the park"), vec!["park"]);
    }

    #[test]
    fn bare_verbal_noun_before_preposition_is_a_verb() {
        assert_eq!(run("Walk past the blue dumpster and stop at the stop sign."), vec!["blue dumpster", "stop sign"]);
        assert_eq!(run("Park near the park."), vec!["park"]);
    }

    #[test]
    fn duplicates_are_kept_in_order() {
        assert_eq!(run("the car, then the tree, then the car"), vec!["car", "tree", "car"]);
    }

    #[test]
    fn proper_nouns_by_capitalization() {
        assert_eq!(run("Drive to Sather Tower."), vec!["sather tower"]);
    }

    #[test]
    fn nothing_found_is_an_error() {
        let err = NounChunker::default().extract_chunks(&Instruction::new("go quickly now").unwrap()).unwrap_err();
        assert!(matches!(err, ParseError::NothingExtracted(_)));
    }

    #[test]
    fn deterministic_and_total_on_ascii() {
        let text = "!!!  ,,, a the an ... --- 'quoted' 12 3rd Main-Street";
        assert_eq!(run(text), run(text));
        for b in 0u8..128 {
            let s = format!("go to the {} tree", b as char);
            let _ = run(&s);
        }
    }

    #[test]
    fn corpus_scores() {
        let corpus = parse_corpus(BUNDLED_CORPUS).unwrap();
        let chunker = NounChunker::default();
        let mean: f64 =
            corpus.iter().map(|e| extraction_success(&chunker.chunks(e.instruction.text()), &e.landmarks)).sum::<f64>()
                / corpus.len() as f64;
        assert!(mean >= 0.85, "mean extraction success {mean}");
    }
}
