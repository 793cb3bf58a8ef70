//! Text-complexity axes.
//!
//! Six normalized signals over the question string, combined linearly with
//! calibrated weights. Tokenization is a lowercase whitespace/punctuation
//! split; all axes are deterministic and tokenizer-free.

use serde::{Deserialize, Serialize};

use super::wordlist;
use super::FeatureError;

/// Lexicon for the reasoning-marker axis.
const REASONING_MARKERS: &[&str] = &[
    "why", "how", "because", "compare", "than", "if", "difference", "explain",
];

/// Lexicon for the context-dependency axis.
const CONTEXT_MARKERS: &[&str] = &[
    "this", "that", "these", "those", "left", "right", "one", "other",
];

/// Names of the six axes, in storage order.
pub const TEXT_AXES: [&str; 6] = [
    "length",
    "entity_density",
    "question_type",
    "vocabulary",
    "reasoning",
    "context",
];

/// Combination weights for the six axes; must be nonnegative and sum to 1.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct TextConfig {
    pub beta: [f64; 6],
}

impl Default for TextConfig {
    fn default() -> Self {
        Self { beta: [1.0 / 6.0; 6] }
    }
}

impl TextConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        validate_beta(&self.beta)
    }
}

pub fn validate_beta(beta: &[f64; 6]) -> Result<(), FeatureError> {
    if beta.iter().any(|b| !b.is_finite() || *b < 0.0) {
        return Err(FeatureError::BadWeights(format!("negative axis weight in {beta:?}")));
    }
    let sum: f64 = beta.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(FeatureError::BadWeights(format!("axis weights sum to {sum}, expected 1")));
    }
    Ok(())
}

/// The six axes plus their linear combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextComplexity {
    /// Axis values, ordered as [`TEXT_AXES`].
    pub axes: [f64; 6],
    pub beta: [f64; 6],
    pub c_text: f64,
}

impl TextComplexity {
    /// Assemble from raw axis values and weights, clamping axes to [0, 1].
    pub fn from_axes(axes: [f64; 6], beta: [f64; 6]) -> Self {
        let mut clamped = axes;
        for a in &mut clamped {
            *a = a.clamp(0.0, 1.0);
        }
        let c_text = clamped
            .iter()
            .zip(beta.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .clamp(0.0, 1.0);
        Self { axes: clamped, beta, c_text }
    }
}

struct Token {
    lower: String,
    starts_upper: bool,
    has_digit: bool,
}

fn tokenize(text: &str) -> Vec<Token> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(|s| Token {
            lower: s.to_lowercase(),
            starts_upper: s.chars().next().is_some_and(|c| c.is_uppercase()),
            has_digit: s.chars().any(|c| c.is_ascii_digit()),
        })
        .collect()
}

fn question_type_score(first_token: &str) -> f64 {
    match first_token {
        "what" | "which" => 0.3,
        "where" | "when" | "who" => 0.4,
        "how" => 0.7,
        "why" => 0.9,
        _ => 0.5,
    }
}

/// Compute the six text-complexity axes for a question string.
///
/// Degenerate input (empty or punctuation-only) floors every axis at 0.
pub fn analyze_text(question: &str, cfg: &TextConfig) -> TextComplexity {
    let tokens = tokenize(question);
    if tokens.is_empty() {
        return TextComplexity::from_axes([0.0; 6], cfg.beta);
    }
    let n = tokens.len() as f64;

    let length = (n / 32.0).min(1.0);

    // Entity/numeric density: digit-bearing tokens plus capitalized tokens
    // past the sentence start, each token counted once.
    let entity_tokens = tokens
        .iter()
        .enumerate()
        .filter(|(i, t)| t.has_digit || (*i > 0 && t.starts_upper))
        .count() as f64;
    let entity = (entity_tokens / n * 4.0).min(1.0);

    let question_type = question_type_score(&tokens[0].lower);

    let vocabulary = tokens.iter().map(|t| wordlist::rarity(&t.lower)).sum::<f64>() / n;

    let reasoning_hits = tokens
        .iter()
        .filter(|t| REASONING_MARKERS.contains(&t.lower.as_str()))
        .count() as f64;
    let reasoning = (reasoning_hits / 2.0).min(1.0);

    let context_hits = tokens
        .iter()
        .filter(|t| CONTEXT_MARKERS.contains(&t.lower.as_str()))
        .count() as f64;
    let context = (context_hits / 2.0).min(1.0);

    TextComplexity::from_axes(
        [length, entity, question_type, vocabulary, reasoning, context],
        cfg.beta,
    )
}
