//! Turning query plans into question text.
//!
//! The template renderer is the default and needs no network. An optional
//! chat-completion client can rephrase the template; its reply is only used
//! when it keeps the option letters intact. Answers are always mapped back
//! through the plan, never through the text.

use std::time::Duration;

use log::{debug, warn};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::logic::{Atom, Cube, Literal};
use crate::rulelang::Schema;

pub const NONE_OF_THE_ABOVE: &str = "None of the above.";
const ANY_OUTCOME: &str = "Any outcome is possible for this option.";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderedOption {
    pub letter: String,
    pub text: String,
    /// `None` for the none-of-the-above option.
    pub separator: Option<Cube>,
    /// Index of the plan bin this option selects; `None` for none-of-the-above.
    pub bin: Option<usize>,
    /// Programs behind the option.
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderedQuery {
    pub round: usize,
    pub precondition: Cube,
    pub scenario: String,
    pub question: String,
    pub options: Vec<RenderedOption>,
    /// Text comes from the template rather than the language model.
    pub fallback: bool,
}

impl RenderedQuery {
    /// Option position for a letter such as `"b"` (case-insensitive).
    pub fn option_index(&self, letter: &str) -> Option<usize> {
        let l = letter.trim().to_ascii_lowercase();
        self.options.iter().position(|o| o.letter == l)
    }

    /// The logical form handed to the language model: one line per option.
    pub fn logical_form(&self, schema: &Schema) -> String {
        let mut s = format!("SCENARIO: {}\n", logical_cube(&self.precondition, schema, "(any input)"));
        for o in &self.options {
            let body = match &o.separator {
                Some(c) => logical_cube(c, schema, "(anything)"),
                None => "none of the above".into(),
            };
            s.push_str(&format!("{}) {}\n", o.letter, body));
        }
        s
    }

    /// Plain-text form for terminals.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n{}\n", self.scenario, self.question);
        for o in &self.options {
            s.push_str(&format!("  {}) {}\n", o.letter, o.text));
        }
        s
    }
}

fn logical_cube(c: &Cube, schema: &Schema, empty: &str) -> String {
    if c.is_empty() {
        return empty.into();
    }
    c.literals()
        .iter()
        .map(|l| {
            let a = schema.atom_text(&l.atom);
            if l.positive {
                a
            } else {
                format!("not {a}")
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// What the renderer needs from a plan.
#[derive(Clone, Debug)]
pub struct QueryForm<'a> {
    pub round: usize,
    pub precondition: &'a Cube,
    pub separators: &'a [Cube],
    pub bin_sizes: &'a [usize],
    /// Size of the none-of-the-above remainder, when that option is offered.
    pub none_option: Option<usize>,
}

fn letter(i: usize) -> String {
    char::from(b'a' + i as u8).to_string()
}

fn object(i: u8) -> String {
    format!("object {}", i + 1)
}

/// English phrase for one literal.
pub fn phrase(l: &Literal, schema: &Schema) -> String {
    let not = if l.positive { "" } else { "not " };
    match l.atom {
        Atom::Attr { obj, attr, value } => {
            format!("{}'s {} is {not}{}", object(obj), schema.attr_name(attr), schema.value_name(attr, value))
        }
        Atom::Rel { rel, from, to } => {
            format!("{} is {not}{} {}", object(from), schema.relations[rel as usize], object(to))
        }
        Atom::Out { obj, action } => {
            let verb = if l.positive { "applies" } else { "does not apply" };
            format!("the program {verb} {} to {}", schema.actions[action as usize], object(obj))
        }
        Atom::Aux { id } => format!("{not}s{id}"),
    }
}

fn sentence(c: &Cube, schema: &Schema) -> String {
    let parts: Vec<String> = c.literals().iter().map(|l| phrase(l, schema)).collect();
    let mut s = parts.join(", and ");
    if let Some(f) = s.get_mut(0..1) {
        f.make_ascii_uppercase();
    }
    s.push('.');
    s
}

/// Deterministic text for a plan.
pub fn render_template(form: &QueryForm<'_>, schema: &Schema) -> RenderedQuery {
    let scenario = if form.precondition.is_empty() {
        format!("Imagine any input with {} objects.", schema.n_objects)
    } else {
        let parts: Vec<String> = form.precondition.literals().iter().map(|l| phrase(l, schema)).collect();
        format!("Imagine an input with {} objects where: {}.", schema.n_objects, parts.join("; "))
    };
    let mut options: Vec<RenderedOption> = form
        .separators
        .iter()
        .enumerate()
        .map(|(i, c)| RenderedOption {
            letter: letter(i),
            text: if c.is_empty() { ANY_OUTCOME.into() } else { sentence(c, schema) },
            separator: Some(c.clone()),
            bin: Some(i),
            size: form.bin_sizes.get(i).copied().unwrap_or(0),
        })
        .collect();
    if let Some(n) = form.none_option {
        options.push(RenderedOption {
            letter: letter(options.len()),
            text: NONE_OF_THE_ABOVE.into(),
            separator: None,
            bin: None,
            size: n,
        });
    }
    RenderedQuery {
        round: form.round,
        precondition: form.precondition.clone(),
        scenario,
        question: "Which of the following must be true of the program's output?".into(),
        options,
        fallback: true,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShot {
    pub logical: String,
    pub text: String,
}

pub fn default_few_shot() -> Vec<FewShot> {
    serde_json::from_str(include_str!("../data/few_shot.json")).expect("bundled few-shot file is valid")
}

/// Chat-completion client settings. The key itself is read from the named
/// environment variable at call time and never stored or logged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlmConfig {
    pub enabled: bool,
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub timeout_ms: u64,
    pub few_shot: Vec<FewShot>,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            enabled: false,
            endpoint: "http://127.0.0.1:8000/v1/chat/completions".into(),
            model: "gpt-4o-mini".into(),
            api_key_env: "LLM_API_KEY".into(),
            timeout_ms: 20_000,
            few_shot: default_few_shot(),
        }
    }
}

impl LlmConfig {
    /// Replace the few-shot examples with those in a JSON file.
    pub fn load_few_shot(&mut self, path: &std::path::Path) -> crate::Result<()> {
        self.few_shot = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Ok(())
    }
}

const SYSTEM_PROMPT: &str = "You rewrite logical multiple-choice questions about a program's behaviour \
into plain English. Keep the first line prefixed with 'SCENARIO:' and keep one line per option, \
prefixed with its letter and ')' exactly as given. Do not add, drop, merge or reorder options.";

/// Rephrase a template query through the configured endpoint, falling back
/// to the template on any failure.
pub fn render_llm(template: &RenderedQuery, schema: &Schema, cfg: &LlmConfig) -> RenderedQuery {
    if !cfg.enabled {
        return template.clone();
    }
    match call_llm(template, schema, cfg) {
        Ok(reply) => match apply_reply(template, &reply) {
            Some(q) => q,
            None => {
                warn!("language model reply did not preserve the options; using template text");
                template.clone()
            }
        },
        Err(e) => {
            warn!("language model call failed ({e}); using template text");
            template.clone()
        }
    }
}

fn call_llm(template: &RenderedQuery, schema: &Schema, cfg: &LlmConfig) -> Result<String, String> {
    let mut messages = vec![json!({"role": "system", "content": SYSTEM_PROMPT})];
    for ex in &cfg.few_shot {
        messages.push(json!({"role": "user", "content": ex.logical}));
        messages.push(json!({"role": "assistant", "content": ex.text}));
    }
    messages.push(json!({"role": "user", "content": template.logical_form(schema)}));
    let body = json!({"model": cfg.model, "temperature": 0, "messages": messages});
    debug!("llm request to {} (Authorization: Bearer ***): {body}", cfg.endpoint);

    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(cfg.timeout_ms)))
        .build()
        .into();
    let mut req = agent.post(&cfg.endpoint);
    if let Ok(key) = std::env::var(&cfg.api_key_env) {
        req = req.header("Authorization", &format!("Bearer {key}"));
    }
    let reply: serde_json::Value =
        req.send_json(&body).map_err(|e| e.to_string())?.body_mut().read_json().map_err(|e| e.to_string())?;
    debug!("llm response: {reply}");
    reply["choices"][0]["message"]["content"].as_str().map(str::to_owned).ok_or_else(|| "reply has no content".into())
}

/// Accept the reply only if it has a scenario line and exactly the
/// template's letters, in order.
fn apply_reply(template: &RenderedQuery, reply: &str) -> Option<RenderedQuery> {
    let mut lines = reply.lines().map(str::trim).filter(|l| !l.is_empty());
    let scenario = lines.next()?.strip_prefix("SCENARIO:")?.trim().to_owned();
    let mut texts = Vec::new();
    for l in lines {
        let (letter, rest) = l.split_once(')')?;
        texts.push((letter.trim().to_ascii_lowercase(), rest.trim().to_owned()));
    }
    if scenario.is_empty() || texts.len() != template.options.len() {
        return None;
    }
    let mut q = template.clone();
    for (o, (letter, text)) in q.options.iter_mut().zip(texts) {
        if o.letter != letter || text.is_empty() {
            return None;
        }
        o.text = text;
    }
    q.scenario = scenario;
    q.fallback = false;
    Some(q)
}
