//! Name-based JSON documents (`format: "rulelang/1"`).

use serde::{Deserialize, Serialize};

use super::program::{Guard, OutputMap, Program, Rule, WitnessLit};
use super::schema::{AttributeDef, Schema};
use super::synth::Example;
use super::task::Task;
use crate::error::{Error, Result};
use crate::logic::Model;

pub const FORMAT: &str = "rulelang/1";

fn check_format(f: &str) -> Result<()> {
    if f == FORMAT {
        Ok(())
    } else {
        Err(Error::Parse(format!("unsupported format {f:?}, expected {FORMAT:?}")))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    format: String,
    attributes: Vec<AttributeDef>,
    relations: Vec<String>,
    actions: Vec<String>,
    n_objects: u8,
}

impl From<&Schema> for SchemaDoc {
    fn from(s: &Schema) -> Self {
        SchemaDoc {
            format: FORMAT.into(),
            attributes: s.attributes.clone(),
            relations: s.relations.clone(),
            actions: s.actions.clone(),
            n_objects: s.n_objects,
        }
    }
}

impl SchemaDoc {
    fn into_schema(self) -> Result<Schema> {
        check_format(&self.format)?;
        let s = Schema { attributes: self.attributes, relations: self.relations, actions: self.actions, n_objects: self.n_objects };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum GuardDoc {
    And { args: Vec<GuardDoc> },
    Or { args: Vec<GuardDoc> },
    Not { arg: Box<GuardDoc> },
    Selfattr { attr: String, value: String },
    Existsother { rel: String, witness: Vec<WitnessDoc> },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    attr: String,
    value: String,
    #[serde(default = "yes")]
    positive: bool,
}

fn yes() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    guard: GuardDoc,
    action: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramDoc {
    #[serde(default)]
    format: Option<String>,
    rules: Vec<RuleDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelDoc {
    rel: String,
    from: u8,
    to: u8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    /// One attribute-name → value-name map per object.
    objects: Vec<std::collections::BTreeMap<String, String>>,
    /// Pairs for which a relation holds; everything else is false.
    #[serde(default)]
    relations: Vec<RelDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExampleDoc {
    input: ModelDoc,
    /// Action names applied to each object.
    output: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    format: String,
    id: String,
    seed: u64,
    schema: SchemaDoc,
    ground_truth: ProgramDoc,
    examples: Vec<ExampleDoc>,
    hypothesis: Vec<ProgramDoc>,
}

const MAX_GUARD_DEPTH: usize = 32;

fn guard_to_doc(g: &Guard, s: &Schema) -> GuardDoc {
    match g {
        Guard::SelfAttr { attr, value } => {
            GuardDoc::Selfattr { attr: s.attr_name(*attr).into(), value: s.value_name(*attr, *value).into() }
        }
        Guard::ExistsOther { rel, witness } => GuardDoc::Existsother {
            rel: s.relations[*rel as usize].clone(),
            witness: witness
                .iter()
                .map(|w| WitnessDoc {
                    attr: s.attr_name(w.attr).into(),
                    value: s.value_name(w.attr, w.value).into(),
                    positive: w.positive,
                })
                .collect(),
        },
        Guard::Not(inner) => GuardDoc::Not { arg: Box::new(guard_to_doc(inner, s)) },
        Guard::And(cs) => GuardDoc::And { args: cs.iter().map(|c| guard_to_doc(c, s)).collect() },
        Guard::Or(cs) => GuardDoc::Or { args: cs.iter().map(|c| guard_to_doc(c, s)).collect() },
    }
}

fn guard_from_doc(d: &GuardDoc, s: &Schema, depth: usize) -> Result<Guard> {
    if depth > MAX_GUARD_DEPTH {
        return Err(Error::Parse("guard nesting too deep".into()));
    }
    Ok(match d {
        GuardDoc::Selfattr { attr, value } => {
            let a = s.attr_index(attr)?;
            Guard::SelfAttr { attr: a, value: s.value_index(a, value)? }
        }
        GuardDoc::Existsother { rel, witness } => {
            let mut w = Vec::new();
            for x in witness {
                let a = s.attr_index(&x.attr)?;
                w.push(WitnessLit { attr: a, value: s.value_index(a, &x.value)?, positive: x.positive });
            }
            Guard::ExistsOther { rel: s.relation_index(rel)?, witness: w }
        }
        GuardDoc::Not { arg } => {
            let inner = guard_from_doc(arg, s, depth + 1)?;
            if !inner.is_leaf() {
                return Err(Error::Parse("'not' may only wrap selfattr or existsother".into()));
            }
            Guard::Not(Box::new(inner))
        }
        GuardDoc::And { args } | GuardDoc::Or { args } => {
            if args.is_empty() {
                return Err(Error::Parse("'and'/'or' need at least one argument".into()));
            }
            let cs = args.iter().map(|a| guard_from_doc(a, s, depth + 1)).collect::<Result<Vec<_>>>()?;
            if matches!(d, GuardDoc::And { .. }) {
                Guard::And(cs)
            } else {
                Guard::Or(cs)
            }
        }
    })
}

fn program_to_doc(p: &Program, s: &Schema, top: bool) -> ProgramDoc {
    ProgramDoc {
        format: top.then(|| FORMAT.to_string()),
        rules: p
            .rules()
            .iter()
            .map(|r| RuleDoc { guard: guard_to_doc(&r.guard, s), action: s.actions[r.action as usize].clone() })
            .collect(),
    }
}

fn program_from_doc(d: &ProgramDoc, s: &Schema) -> Result<Program> {
    if let Some(f) = &d.format {
        check_format(f)?;
    }
    let mut rules = Vec::new();
    for r in &d.rules {
        rules.push(Rule { guard: guard_from_doc(&r.guard, s, 0)?, action: s.action_index(&r.action)? });
    }
    Ok(Program::new(rules))
}

fn model_to_doc(m: &Model, s: &Schema) -> ModelDoc {
    let sig = s.signature();
    let objects = (0..sig.n_objects)
        .map(|o| {
            (0..sig.n_attrs() as u8)
                .map(|a| (s.attr_name(a).to_string(), s.value_name(a, m.attr(o, a)).to_string()))
                .collect()
        })
        .collect();
    let mut relations = Vec::new();
    for rel in 0..sig.n_relations {
        for from in 0..sig.n_objects {
            for to in 0..sig.n_objects {
                if from != to && m.rel(rel, from, to) {
                    relations.push(RelDoc { rel: s.relations[rel as usize].clone(), from, to });
                }
            }
        }
    }
    ModelDoc { objects, relations }
}

fn model_from_doc(d: &ModelDoc, s: &Schema) -> Result<Model> {
    let sig = s.signature();
    if d.objects.len() != sig.n_objects as usize {
        return Err(Error::Parse(format!("expected {} objects, got {}", sig.n_objects, d.objects.len())));
    }
    let mut m = Model::zero(&sig);
    for (o, obj) in d.objects.iter().enumerate() {
        if obj.len() != sig.n_attrs() {
            return Err(Error::Parse(format!("object {o} must give every attribute exactly once")));
        }
        for (name, value) in obj {
            let a = s.attr_index(name)?;
            m.set_attr(o as u8, a, s.value_index(a, value)?);
        }
    }
    for r in &d.relations {
        if r.from == r.to || r.from >= sig.n_objects || r.to >= sig.n_objects {
            return Err(Error::Parse(format!("bad relation endpoints {}->{}", r.from, r.to)));
        }
        m.set_rel(s.relation_index(&r.rel)?, r.from, r.to, true);
    }
    Ok(m)
}

fn output_to_doc(o: &OutputMap, s: &Schema) -> Vec<Vec<String>> {
    let sig = s.signature();
    (0..sig.n_objects)
        .map(|obj| o.actions(&sig, obj).into_iter().map(|a| s.actions[a as usize].clone()).collect())
        .collect()
}

fn output_from_doc(d: &[Vec<String>], s: &Schema) -> Result<OutputMap> {
    let sig = s.signature();
    if d.len() != sig.n_objects as usize {
        return Err(Error::Parse("output must list every object".into()));
    }
    let mut bits = 0u64;
    for (obj, acts) in d.iter().enumerate() {
        for a in acts {
            bits |= 1 << sig.out_bit(obj as u8, s.action_index(a)?);
        }
    }
    Ok(OutputMap(bits))
}

pub fn schema_to_json(s: &Schema) -> String {
    serde_json::to_string_pretty(&SchemaDoc::from(s)).expect("serializable")
}

pub fn parse_schema(json: &str) -> Result<Schema> {
    serde_json::from_str::<SchemaDoc>(json)?.into_schema()
}

pub fn schema_to_value(s: &Schema) -> serde_json::Value {
    serde_json::to_value(SchemaDoc::from(s)).expect("serializable")
}

pub fn schema_from_value(v: &serde_json::Value) -> Result<Schema> {
    SchemaDoc::deserialize(v)?.into_schema()
}

pub fn program_to_value(p: &Program, s: &Schema) -> serde_json::Value {
    serde_json::to_value(program_to_doc(p, s, true)).expect("serializable")
}

pub fn program_to_json(p: &Program, s: &Schema) -> String {
    serde_json::to_string_pretty(&program_to_doc(p, s, true)).expect("serializable")
}

pub fn parse_program(json: &str, s: &Schema) -> Result<Program> {
    program_from_doc(&serde_json::from_str(json)?, s)
}

pub fn program_from_value(v: &serde_json::Value, s: &Schema) -> Result<Program> {
    program_from_doc(&ProgramDoc::deserialize(v)?, s)
}

pub fn parse_model(json: &str, s: &Schema) -> Result<Model> {
    model_from_doc(&serde_json::from_str(json)?, s)
}

pub fn model_to_value(m: &Model, s: &Schema) -> serde_json::Value {
    serde_json::to_value(model_to_doc(m, s)).expect("serializable")
}

fn task_to_doc(t: &Task) -> TaskDoc {
    TaskDoc {
        format: FORMAT.into(),
        id: t.id.clone(),
        seed: t.seed,
        schema: SchemaDoc::from(&t.schema),
        ground_truth: program_to_doc(&t.ground_truth, &t.schema, false),
        examples: t
            .examples
            .iter()
            .map(|e| ExampleDoc { input: model_to_doc(&e.input, &t.schema), output: output_to_doc(&e.output, &t.schema) })
            .collect(),
        hypothesis: t.hypothesis.iter().map(|p| program_to_doc(p, &t.schema, false)).collect(),
    }
}

pub fn task_to_value(t: &Task) -> serde_json::Value {
    serde_json::to_value(task_to_doc(t)).expect("serializable")
}

pub fn task_to_json(t: &Task) -> String {
    serde_json::to_string_pretty(&task_to_doc(t)).expect("serializable")
}

pub fn task_from_value(v: &serde_json::Value) -> Result<Task> {
    task_from_doc(TaskDoc::deserialize(v)?)
}

/// Parse a task document. Structural only: call
/// [`super::task::validate_task`] to check the semantic invariants.
pub fn parse_task(json: &str) -> Result<Task> {
    task_from_doc(serde_json::from_str(json)?)
}

fn task_from_doc(d: TaskDoc) -> Result<Task> {
    check_format(&d.format)?;
    let schema = d.schema.into_schema()?;
    let ground_truth = program_from_doc(&d.ground_truth, &schema)?;
    let mut examples = Vec::new();
    for e in &d.examples {
        examples.push(Example { input: model_from_doc(&e.input, &schema)?, output: output_from_doc(&e.output, &schema)? });
    }
    let hypothesis = d.hypothesis.iter().map(|p| program_from_doc(p, &schema)).collect::<Result<Vec<_>>>()?;
    Ok(Task { id: d.id, schema, ground_truth, examples, hypothesis, seed: d.seed })
}
