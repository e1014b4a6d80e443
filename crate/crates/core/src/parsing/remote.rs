use serde::{Deserialize, Serialize};

use super::{normalize_landmark, Instruction, LandmarkList, LandmarkParser, ParseError};
use crate::remote::{EndpointConfig, JsonClient};

/// Few-shot landmark extraction prompt. `{instruction}` is replaced by the
/// user's text; the completion is expected to continue the numbered list.
pub const DEFAULT_FEW_SHOT_PROMPT: &str = "\
First, you need to find a stop sign. Then take left and right and continue until you reach a square with a tree. Continue first straight, then right, until you find a white truck. The final destination is a white building.
Landmarks:
1. Stop sign
2. Square with a tree
3. White truck
4. White building

Look for a library, after taking a right turn next to a statue.
Landmarks:
1. a statue
2. a library

Look for a statue. Then look for a library. Then go towards a pink house.
Landmarks:
1. a statue
2. a library
3. a pink house

{instruction}
Landmarks:
1.";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LlmRequest {
    pub prompt: String,
    pub max_tokens: u32,
    pub temperature: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LlmResponse {
    pub completion: String,
}

/// Splits a numbered-list completion into landmarks.
///
/// The prompt ends in `1.`, so a completion may begin with the first item's
/// text and no number of its own; it is accepted when a `2.` line follows or
/// nothing else is present. Prose after the list is ignored.
pub fn parse_completion(raw: &str) -> Result<LandmarkList, ParseError> {
    let numbered = |line: &str| -> Option<(usize, String)> {
        let t = line.trim();
        let dot = t.find('.')?;
        let n: usize = t[..dot].parse().ok()?;
        Some((n, t[dot + 1..].trim().to_string()))
    };
    let lines: Vec<&str> = raw.lines().filter(|l| !l.trim().is_empty()).collect();
    let mut items = Vec::new();
    let mut expect = 1;
    let mut rest = lines.as_slice();
    if let Some((first, tail)) = lines.split_first() {
        let next_is_two = tail.first().and_then(|l| numbered(l)).is_some_and(|(n, _)| n == 2);
        if numbered(first).is_none() && (next_is_two || tail.is_empty()) {
            items.push(first.trim().to_string());
            expect = 2;
            rest = tail;
        }
    }
    for line in rest {
        match numbered(line) {
            Some((n, text)) if n == expect && !text.is_empty() => {
                items.push(text);
                expect += 1;
            }
            _ => break,
        }
    }
    if items.is_empty() {
        return Err(ParseError::MalformedCompletion { raw: raw.to_string() });
    }
    LandmarkList::new(items.iter().map(|s| normalize_landmark(s.trim_end())).collect())
}

/// Landmark extraction through a text-completion endpoint.
pub struct RemoteParser {
    client: JsonClient,
    prompt_template: String,
    max_tokens: u32,
}

impl RemoteParser {
    pub fn new(endpoint: EndpointConfig) -> Self {
        Self { client: JsonClient::new(endpoint), prompt_template: DEFAULT_FEW_SHOT_PROMPT.to_string(), max_tokens: 64 }
    }

    pub fn with_prompt(mut self, template: impl Into<String>) -> Self {
        self.prompt_template = template.into();
        self
    }

    pub fn prompt_for(&self, instruction: &Instruction) -> String {
        self.prompt_template.replace("{instruction}", instruction.text())
    }

    pub fn extract_remote(&self, instruction: &Instruction) -> Result<LandmarkList, ParseError> {
        let request = LlmRequest { prompt: self.prompt_for(instruction), max_tokens: self.max_tokens, temperature: 0.0 };
        let resp: LlmResponse = self.client.post(&request)?;
        parse_completion(&resp.completion)
    }
}

impl LandmarkParser for RemoteParser {
    fn extract(&self, instruction: &Instruction) -> Result<LandmarkList, ParseError> {
        self.extract_remote(instruction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(l: &LandmarkList) -> Vec<&str> {
        l.iter().map(String::as_str).collect()
    }

    #[test]
    fn numbered_list() {
        assert_eq!(items(&parse_completion("1. a statue\n2. a library\n").unwrap()), ["statue", "library"]);
    }

    #[test]
    fn continuation_of_prompt_number() {
        let l = parse_completion(" Stop sign\n2. Square with a tree\n3. White truck\n4. White building\n").unwrap();
        assert_eq!(items(&l), ["stop sign", "square with a tree", "white truck", "white building"]);
        assert_eq!(items(&parse_completion(" a fountain").unwrap()), ["fountain"]);
    }

    #[test]
    fn trailing_prose_ignored() {
        let l = parse_completion("1. the red car  \n2. a pond\n\nThese are the landmarks you asked for.\n3. nope").unwrap();
        assert_eq!(items(&l), ["red car", "pond"]);
    }

    #[test]
    fn malformed_completion_keeps_raw() {
        match parse_completion("I cannot help with that.\nSorry.") {
            Err(ParseError::MalformedCompletion { raw }) => assert!(raw.contains("cannot")),
            other => panic!("{other:?}"),
        }
        assert!(parse_completion("").is_err());
    }

    #[test]
    fn prompt_substitution() {
        let p = RemoteParser::new(EndpointConfig::default());
        let prompt = p.prompt_for(&Instruction::new("Go to the pond.").unwrap());
        assert!(prompt.ends_with("Go to the pond.\nLandmarks:\n1."));
        assert_eq!(prompt.matches("Landmarks:").count(), 4);
    }
}
