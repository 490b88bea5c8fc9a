use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{Atom, Literal, Signature, TheoryAxioms};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributeDef {
    pub name: String,
    pub values: Vec<String>,
}

/// Objects with finite-domain attributes, binary relations and actions.
///
/// `n_objects` is the bounded unrolling width: programs are only ever
/// evaluated and compared on inputs with exactly this many objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schema {
    pub attributes: Vec<AttributeDef>,
    pub relations: Vec<String>,
    pub actions: Vec<String>,
    pub n_objects: u8,
}

impl Schema {
    /// Three objects labelled face/guitar/dog with hair colour and expression,
    /// one `above` relation and three image-editing actions.
    pub fn default_schema() -> Schema {
        Schema::with_objects(3)
    }

    /// The default vocabulary at a different object count.
    pub fn with_objects(n: u8) -> Schema {
        let attr = |name: &str, vals: &[&str]| AttributeDef {
            name: name.into(),
            values: vals.iter().map(|v| v.to_string()).collect(),
        };
        Schema {
            attributes: vec![
                attr("label", &["face", "guitar", "dog"]),
                attr("hair", &["brown", "blonde", "none"]),
                attr("expression", &["smiling", "neutral"]),
            ],
            relations: vec!["above".into()],
            actions: vec!["Blur".into(), "Brighten".into(), "Crop".into()],
            n_objects: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Schema(m));
        if self.n_objects == 0 || self.n_objects > 6 {
            return bad(format!("n_objects must be in 1..=6, got {}", self.n_objects));
        }
        if self.actions.is_empty() {
            return bad("at least one action is required".into());
        }
        if self.attributes.len() > 16 || self.relations.len() > 8 {
            return bad("too many attributes or relations".into());
        }
        if self.n_objects as usize * self.actions.len() > 64 {
            return bad("objects times actions must not exceed 64".into());
        }
        let mut names = HashSet::new();
        for n in self.attributes.iter().map(|a| &a.name).chain(&self.relations).chain(&self.actions) {
            if n.is_empty() || !names.insert(n.as_str()) {
                return bad(format!("duplicate or empty name {n:?}"));
            }
        }
        for a in &self.attributes {
            let vals: HashSet<&String> = a.values.iter().collect();
            if a.values.is_empty() || a.values.len() > 16 || vals.len() != a.values.len() {
                return bad(format!("attribute {} needs 1..=16 distinct values", a.name));
            }
        }
        if self.signature().input_atoms().len() > 128 {
            return bad("schema has more than 128 input atoms".into());
        }
        Ok(())
    }

    pub fn signature(&self) -> Signature {
        Signature {
            n_objects: self.n_objects,
            domains: self.attributes.iter().map(|a| a.values.len() as u8).collect(),
            n_relations: self.relations.len() as u8,
            n_actions: self.actions.len() as u8,
        }
    }

    pub fn axioms(&self) -> TheoryAxioms {
        TheoryAxioms::new(&self.signature())
    }

    pub fn attr_index(&self, name: &str) -> Result<u8> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .map(|i| i as u8)
            .ok_or_else(|| Error::Schema(format!("unknown attribute {name:?}")))
    }

    pub fn value_index(&self, attr: u8, value: &str) -> Result<u8> {
        let a = &self.attributes[attr as usize];
        a.values
            .iter()
            .position(|v| v == value)
            .map(|i| i as u8)
            .ok_or_else(|| Error::Schema(format!("unknown value {value:?} for {}", a.name)))
    }

    pub fn relation_index(&self, name: &str) -> Result<u8> {
        self.relations
            .iter()
            .position(|r| r == name)
            .map(|i| i as u8)
            .ok_or_else(|| Error::Schema(format!("unknown relation {name:?}")))
    }

    pub fn action_index(&self, name: &str) -> Result<u8> {
        self.actions
            .iter()
            .position(|r| r == name)
            .map(|i| i as u8)
            .ok_or_else(|| Error::Schema(format!("unknown action {name:?}")))
    }

    pub fn attr_name(&self, attr: u8) -> &str {
        &self.attributes[attr as usize].name
    }

    pub fn value_name(&self, attr: u8, value: u8) -> &str {
        &self.attributes[attr as usize].values[value as usize]
    }

    /// Short human-readable atom text, e.g. `hair(x1)=brown`.
    pub fn atom_text(&self, atom: &Atom) -> String {
        match *atom {
            Atom::Attr { obj, attr, value } => {
                format!("{}(x{})={}", self.attr_name(attr), obj + 1, self.value_name(attr, value))
            }
            Atom::Rel { rel, from, to } => format!("{}(x{},x{})", self.relations[rel as usize], from + 1, to + 1),
            Atom::Out { obj, action } => format!("{}(x{})", self.actions[action as usize], obj + 1),
            Atom::Aux { id } => format!("s{id}"),
        }
    }

    pub fn literal_text(&self, l: &Literal) -> String {
        if l.positive {
            self.atom_text(&l.atom)
        } else {
            format!("¬{}", self.atom_text(&l.atom))
        }
    }
}
