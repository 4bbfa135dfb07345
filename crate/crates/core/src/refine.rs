//! Prompt refinement: abstract prompts are rewritten with concrete visual
//! attributes before conditioning, because under-specified prompts let the
//! generator hallucinate a different identity per tile. The language model
//! sits behind [`RefinerClient`]; an offline deterministic stub ships for
//! tests and endpoint-less runs, and any client failure falls back to the
//! original prompt rather than blocking generation.

use std::collections::BTreeMap;
use std::time::Duration;

use crate::error::{Error, Result};

/// Attributes a human-subject request must ask for explicitly.
pub const HUMAN_ATTRIBUTES: [&str; 4] = ["hair color", "age", "clothing", "appearance"];

/// Broad content category of a prompt; callers supply it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptCategory {
    Human,
    Animal,
    Landscape,
}

impl PromptCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            PromptCategory::Human => "human",
            PromptCategory::Animal => "animal",
            PromptCategory::Landscape => "landscape",
        }
    }
}

impl std::str::FromStr for PromptCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "human" => Ok(PromptCategory::Human),
            "animal" => Ok(PromptCategory::Animal),
            "landscape" => Ok(PromptCategory::Landscape),
            other => Err(Error::InvalidParameter(format!(
                "unknown prompt category '{other}' (expected human, animal, or landscape)"
            ))),
        }
    }
}

/// Instruction template with `{prompt}` and `{category}` slots plus the
/// required-attribute checklist applied to human subjects.
#[derive(Debug, Clone)]
pub struct PromptTemplate {
    pub instruction: String,
    pub checklist: Vec<String>,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self {
            instruction: "Rewrite the following {category} video prompt so every visual \
                          attribute is concrete. Keep the subject and action unchanged, keep \
                          any names exactly as written, and reply with the rewritten prompt \
                          only.\nPrompt: {prompt}"
                .to_owned(),
            checklist: HUMAN_ATTRIBUTES.iter().map(|s| (*s).to_owned()).collect(),
        }
    }
}

impl PromptTemplate {
    /// Render the request text. The original prompt appears verbatim; for
    /// human content the checklist is mandatory, other categories only ask
    /// for scene enrichment.
    pub fn render(&self, prompt: &str, category: PromptCategory) -> Result<String> {
        if prompt.trim().is_empty() {
            return Err(Error::InvalidParameter("prompt must not be empty".into()));
        }
        let mut text = self
            .instruction
            .replace("{category}", category.as_str())
            .replace("{prompt}", prompt);
        match category {
            PromptCategory::Human => {
                text.push_str(&format!(
                    "\nSpecify each of these attributes for every person: {}.",
                    self.checklist.join(", ")
                ));
            }
            PromptCategory::Animal | PromptCategory::Landscape => {
                text.push_str(
                    "\nEnrich the scene with concrete colors, lighting, and setting details.",
                );
            }
        }
        Ok(text)
    }
}

/// Build the default refinement request for a prompt.
pub fn build_request(prompt: &str, category: PromptCategory) -> Result<String> {
    PromptTemplate::default().render(prompt, category)
}

/// Which path produced a refined prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineSource {
    Remote,
    Stub,
    Passthrough,
}

impl RefineSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            RefineSource::Remote => "remote",
            RefineSource::Stub => "stub",
            RefineSource::Passthrough => "passthrough",
        }
    }
}

/// Client-side failure; refinement degrades to passthrough on any of these.
#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("request timed out after {0:?}")]
    Timeout(Duration),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("completion returned empty text")]
    EmptyResponse,
}

/// Text-in/text-out completion client.
pub trait RefinerClient {
    fn complete(&self, request: &str) -> std::result::Result<String, ClientError>;

    /// Tag recorded in results produced by this client.
    fn source(&self) -> RefineSource {
        RefineSource::Remote
    }

    /// Opaque endpoint descriptor for diagnostics.
    fn descriptor(&self) -> String {
        "remote".to_owned()
    }

    fn timeout(&self) -> Duration {
        Duration::from_secs(30)
    }
}

/// Result of a refinement attempt. `refined` is never empty and the source
/// of the text is always recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedPrompt {
    pub original: String,
    pub refined: String,
    pub attributes: BTreeMap<String, String>,
    pub source: RefineSource,
    pub warning: Option<String>,
}

/// Refine a prompt through `client`. Client failure (or an empty response)
/// never fails the call: the original prompt passes through with a recorded
/// warning, so generation is never blocked by refinement.
pub fn refine(
    prompt: &str,
    category: PromptCategory,
    client: &dyn RefinerClient,
) -> Result<RefinedPrompt> {
    let request = build_request(prompt, category)?;
    match client.complete(&request) {
        Ok(text) if !text.trim().is_empty() => Ok(RefinedPrompt {
            original: prompt.to_owned(),
            attributes: detect_attributes(&text),
            refined: text,
            source: client.source(),
            warning: None,
        }),
        Ok(_) => Ok(passthrough(prompt, "refiner returned empty text")),
        Err(err) => Ok(passthrough(prompt, &err.to_string())),
    }
}

fn passthrough(prompt: &str, reason: &str) -> RefinedPrompt {
    RefinedPrompt {
        original: prompt.to_owned(),
        refined: prompt.to_owned(),
        attributes: BTreeMap::new(),
        source: RefineSource::Passthrough,
        warning: Some(format!("falling back to the original prompt: {reason}")),
    }
}

/// Best-effort scan for `attribute: value` fragments of the checklist.
fn detect_attributes(text: &str) -> BTreeMap<String, String> {
    let lower = text.to_ascii_lowercase();
    let mut found = BTreeMap::new();
    for attr in HUMAN_ATTRIBUTES {
        let needle = format!("{attr}:");
        if let Some(pos) = lower.find(&needle) {
            let tail = &text[pos + needle.len()..];
            let value: String = tail
                .chars()
                .take_while(|c| !matches!(c, ';' | ',' | '.' | '\n'))
                .collect();
            let value = value.trim();
            if !value.is_empty() {
                found.insert(attr.to_owned(), value.to_owned());
            }
        }
    }
    found
}

/// Deterministic offline client: fixture hits echo the canned response,
/// misses append a fixed per-category enrichment to the original prompt.
#[derive(Debug, Clone, Default)]
pub struct StubClient {
    fixtures: BTreeMap<String, String>,
}

impl StubClient {
    pub fn new(fixtures: BTreeMap<String, String>) -> Self {
        Self { fixtures }
    }

    /// Fixture lookup happens on the raw prompt, which appears verbatim in
    /// the request; scan for the longest fixture key contained in it.
    fn lookup(&self, request: &str) -> Option<&str> {
        self.fixtures
            .iter()
            .filter(|(prompt, _)| request.contains(prompt.as_str()))
            .max_by_key(|(prompt, _)| prompt.len())
            .map(|(_, response)| response.as_str())
    }

    fn enrich(request: &str) -> String {
        // The prompt is the text after the "Prompt: " marker, up to a newline.
        let prompt = request
            .split_once("Prompt: ")
            .map(|(_, rest)| rest.split('\n').next().unwrap_or(rest))
            .unwrap_or(request);
        if request.contains("these attributes for every person") {
            format!(
                "{prompt}, hair color: dark brown; age: mid thirties; clothing: plain grey \
                 jacket; appearance: tall and slim"
            )
        } else {
            format!("{prompt}, in warm evening light with a fixed camera and detailed textures")
        }
    }
}

impl RefinerClient for StubClient {
    fn complete(&self, request: &str) -> std::result::Result<String, ClientError> {
        if let Some(hit) = self.lookup(request) {
            return Ok(hit.to_owned());
        }
        Ok(Self::enrich(request))
    }

    fn source(&self) -> RefineSource {
        RefineSource::Stub
    }

    fn descriptor(&self) -> String {
        "stub".to_owned()
    }
}

/// Build a stub client from a fixture table.
pub fn stub_client(fixtures: BTreeMap<String, String>) -> StubClient {
    StubClient::new(fixtures)
}
