use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::schema::Schema;
use crate::logic::{Atom, Formula, Model, Signature};

/// Attribute literal about the witness object of an `ExistsOther`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WitnessLit {
    pub attr: u8,
    pub value: u8,
    pub positive: bool,
}

/// Rule guard evaluated at a subject object.
///
/// `ExistsOther(rel, w)` holds at object `i` when some `j != i` has
/// `rel(i, j)` and satisfies every literal of `w`. Negation is only applied
/// to leaves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Guard {
    SelfAttr { attr: u8, value: u8 },
    ExistsOther { rel: u8, witness: Vec<WitnessLit> },
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Guard::SelfAttr { .. } | Guard::ExistsOther { .. })
    }

    pub fn size(&self) -> usize {
        match self {
            Guard::SelfAttr { .. } => 1,
            Guard::ExistsOther { witness, .. } => 1 + witness.len(),
            Guard::Not(g) => 1 + g.size(),
            Guard::And(cs) | Guard::Or(cs) => 1 + cs.iter().map(Guard::size).sum::<usize>(),
        }
    }

    pub fn holds(&self, m: &Model, i: u8) -> bool {
        match self {
            Guard::SelfAttr { attr, value } => m.attr(i, *attr) == *value,
            Guard::ExistsOther { rel, witness } => (0..m.n_objects()).any(|j| {
                j != i && m.rel(*rel, i, j) && witness.iter().all(|w| (m.attr(j, w.attr) == w.value) == w.positive)
            }),
            Guard::Not(g) => !g.holds(m, i),
            Guard::And(cs) => cs.iter().all(|c| c.holds(m, i)),
            Guard::Or(cs) => cs.iter().any(|c| c.holds(m, i)),
        }
    }

    /// The guard as a formula over input atoms at object `i`.
    pub fn instantiate(&self, i: u8, n_objects: u8) -> Formula {
        match self {
            Guard::SelfAttr { attr, value } => Formula::lit(Atom::attr(i, *attr, *value).pos()),
            Guard::ExistsOther { rel, witness } => Formula::or((0..n_objects).filter(|&j| j != i).map(|j| {
                let mut parts = vec![Formula::lit(Atom::rel(*rel, i, j).pos())];
                parts.extend(witness.iter().map(|w| {
                    let a = Atom::attr(j, w.attr, w.value);
                    Formula::lit(if w.positive { a.pos() } else { a.neg() })
                }));
                Formula::and(parts)
            })),
            Guard::Not(g) => g.instantiate(i, n_objects).negate(),
            Guard::And(cs) => Formula::and(cs.iter().map(|c| c.instantiate(i, n_objects))),
            Guard::Or(cs) => Formula::or(cs.iter().map(|c| c.instantiate(i, n_objects))),
        }
    }

    /// Canonical form: flattened, children sorted and deduplicated.
    pub fn canonical(&self) -> Guard {
        match self {
            Guard::SelfAttr { .. } => self.clone(),
            Guard::ExistsOther { rel, witness } => {
                let mut w = witness.clone();
                w.sort();
                w.dedup();
                Guard::ExistsOther { rel: *rel, witness: w }
            }
            Guard::Not(g) => match g.canonical() {
                Guard::Not(inner) => *inner,
                c => Guard::Not(Box::new(c)),
            },
            Guard::And(cs) | Guard::Or(cs) => {
                let is_and = matches!(self, Guard::And(_));
                let mut out = Vec::new();
                for c in cs.iter().map(Guard::canonical) {
                    match c {
                        Guard::And(inner) if is_and => out.extend(inner),
                        Guard::Or(inner) if !is_and => out.extend(inner),
                        other => out.push(other),
                    }
                }
                out.sort();
                out.dedup();
                if out.len() == 1 {
                    out.pop().unwrap()
                } else if is_and {
                    Guard::And(out)
                } else {
                    Guard::Or(out)
                }
            }
        }
    }

    /// Attributes and relations the guard reads.
    pub fn collect_support(&self, attrs: &mut Vec<u8>, rels: &mut Vec<u8>, values: &mut Vec<(u8, u8)>) {
        match self {
            Guard::SelfAttr { attr, value } => {
                attrs.push(*attr);
                values.push((*attr, *value));
            }
            Guard::ExistsOther { rel, witness } => {
                rels.push(*rel);
                for w in witness {
                    attrs.push(w.attr);
                    values.push((w.attr, w.value));
                }
            }
            Guard::Not(g) => g.collect_support(attrs, rels, values),
            Guard::And(cs) | Guard::Or(cs) => cs.iter().for_each(|c| c.collect_support(attrs, rels, values)),
        }
    }

    pub fn pretty(&self, schema: &Schema) -> String {
        let mut s = String::new();
        self.pretty_into(schema, &mut s, true);
        s
    }

    fn pretty_into(&self, schema: &Schema, s: &mut String, top: bool) {
        match self {
            Guard::SelfAttr { attr, value } => {
                let _ = write!(s, "{}={}", schema.attr_name(*attr), schema.value_name(*attr, *value));
            }
            Guard::ExistsOther { rel, witness } => {
                let _ = write!(s, "exists other y: {}(self,y)", schema.relations[*rel as usize]);
                for w in witness {
                    let op = if w.positive { "=" } else { "!=" };
                    let _ = write!(s, " and {}(y){op}{}", schema.attr_name(w.attr), schema.value_name(w.attr, w.value));
                }
            }
            Guard::Not(g) => {
                s.push_str("not ");
                g.pretty_into(schema, s, false);
            }
            Guard::And(cs) | Guard::Or(cs) => {
                let sep = if matches!(self, Guard::And(_)) { " and " } else { " or " };
                if !top {
                    s.push('(');
                }
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        s.push_str(sep);
                    }
                    c.pretty_into(schema, s, false);
                }
                if !top {
                    s.push(')');
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub guard: Guard,
    pub action: u8,
}

impl Rule {
    pub fn size(&self) -> usize {
        1 + self.guard.size()
    }
}

/// A set of guarded rules. Rules are kept in canonical order so structural
/// equality does not depend on how a program was written down.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Program {
    rules: Vec<Rule>,
}

/// Per-object action sets packed as bits `obj * n_actions + action`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutputMap(pub u64);

impl OutputMap {
    pub fn actions(&self, sig: &Signature, obj: u8) -> Vec<u8> {
        (0..sig.n_actions).filter(|&a| self.0 >> sig.out_bit(obj, a) & 1 == 1).collect()
    }
}

impl Program {
    pub fn empty() -> Program {
        Program::default()
    }

    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Program {
        let mut rules: Vec<Rule> =
            rules.into_iter().map(|r| Rule { guard: r.guard.canonical(), action: r.action }).collect();
        rules.sort();
        rules.dedup();
        Program { rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// AST node count; the empty program has size 0.
    pub fn size(&self) -> usize {
        self.rules.iter().map(Rule::size).sum()
    }

    pub fn eval(&self, m: &Model, sig: &Signature) -> OutputMap {
        let mut bits = 0u64;
        for i in 0..sig.n_objects {
            for r in &self.rules {
                let b = 1u64 << sig.out_bit(i, r.action);
                if bits & b == 0 && r.guard.holds(m, i) {
                    bits |= b;
                }
            }
        }
        OutputMap(bits)
    }

    /// Disjunction of the guards of all rules for `action`, at object `i`.
    pub fn action_guard(&self, action: u8, i: u8, n_objects: u8) -> Formula {
        Formula::or(self.rules.iter().filter(|r| r.action == action).map(|r| r.guard.instantiate(i, n_objects)))
    }

    /// Attributes (with the values compared against) and relations read by
    /// any rule, each sorted and deduplicated.
    pub fn support(&self) -> (Vec<u8>, Vec<u8>, Vec<(u8, u8)>) {
        let (mut a, mut r, mut v) = (Vec::new(), Vec::new(), Vec::new());
        for rule in &self.rules {
            rule.guard.collect_support(&mut a, &mut r, &mut v);
        }
        for x in [&mut a, &mut r] {
            x.sort();
            x.dedup();
        }
        v.sort();
        v.dedup();
        (a, r, v)
    }

    pub fn pretty(&self, schema: &Schema) -> String {
        if self.rules.is_empty() {
            return "(no rules)".into();
        }
        self.rules
            .iter()
            .map(|r| format!("{} -> {}", r.guard.pretty(schema), schema.actions[r.action as usize]))
            .collect::<Vec<_>>()
            .join("\n")
    }
}
