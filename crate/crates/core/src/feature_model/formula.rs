//! Propositional export of feature models.
//!
//! The translation maps group semantics onto clauses over feature-path
//! variables so that satisfying assignments coincide exactly with valid
//! configurations. Clause order is fixed: a pre-order walk of the tree
//! (unit root clause, child-to-parent implications, mandatory-child
//! implications, group disjunctions, pairwise alternative exclusions),
//! followed by the cross-tree constraints in stored order.

use std::collections::BTreeSet;
use std::fmt;

use super::{ConstraintKind, Decomposition, Feature, FeatureModel, Optionality};

/// A propositional expression over feature-path variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    Var(String),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Implies(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn var(path: &str) -> Prop {
        Prop::Var(path.to_string())
    }

    pub fn evaluate(&self, selected: &BTreeSet<String>) -> bool {
        match self {
            Prop::Var(p) => selected.contains(p),
            Prop::Not(inner) => !inner.evaluate(selected),
            Prop::And(items) => items.iter().all(|p| p.evaluate(selected)),
            Prop::Or(items) => items.iter().any(|p| p.evaluate(selected)),
            Prop::Implies(a, b) => !a.evaluate(selected) || b.evaluate(selected),
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::Var(p) => write!(f, "{p}"),
            Prop::Not(inner) => match inner.as_ref() {
                Prop::Var(_) => write!(f, "!{inner}"),
                _ => write!(f, "!{inner}"),
            },
            Prop::And(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
            Prop::Or(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
            Prop::Implies(a, b) => write!(f, "{a} -> {b}"),
        }
    }
}

/// Conjunction of clauses; renders one clause per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    clauses: Vec<Prop>,
}

impl Formula {
    pub fn clauses(&self) -> &[Prop] {
        &self.clauses
    }

    pub fn evaluate(&self, selected: &BTreeSet<String>) -> bool {
        self.clauses.iter().all(|c| c.evaluate(selected))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for clause in &self.clauses {
            writeln!(f, "{clause}")?;
        }
        Ok(())
    }
}

impl FeatureModel {
    /// Translates the model into a propositional formula whose satisfying
    /// assignments over the feature-path variables are exactly the valid
    /// configurations.
    pub fn to_propositional(&self) -> Formula {
        let mut clauses = vec![Prop::var(self.root().path())];
        emit(self.root(), &mut clauses);
        for c in self.constraints() {
            match c.kind {
                ConstraintKind::Requires => clauses.push(Prop::Implies(
                    Box::new(Prop::var(&c.source)),
                    Box::new(Prop::var(&c.target)),
                )),
                ConstraintKind::Excludes => clauses.push(Prop::Not(Box::new(Prop::And(vec![
                    Prop::var(&c.source),
                    Prop::var(&c.target),
                ])))),
            }
        }
        Formula { clauses }
    }
}

fn emit(feature: &Feature, clauses: &mut Vec<Prop>) {
    let parent = Prop::var(feature.path());
    for child in feature.children() {
        clauses.push(Prop::Implies(
            Box::new(Prop::var(child.path())),
            Box::new(parent.clone()),
        ));
    }
    match feature.decomposition() {
        Decomposition::And => {
            for child in feature.children() {
                if child.optionality() == Optionality::Mandatory {
                    clauses.push(Prop::Implies(
                        Box::new(parent.clone()),
                        Box::new(Prop::var(child.path())),
                    ));
                }
            }
        }
        Decomposition::Or | Decomposition::Alternative => {
            clauses.push(Prop::Implies(
                Box::new(parent.clone()),
                Box::new(Prop::Or(
                    feature.children().iter().map(|c| Prop::var(c.path())).collect(),
                )),
            ));
            if feature.decomposition() == Decomposition::Alternative {
                let n = feature.children().len();
                for i in 0..n {
                    for j in i + 1..n {
                        clauses.push(Prop::Not(Box::new(Prop::And(vec![
                            Prop::var(feature.children()[i].path()),
                            Prop::var(feature.children()[j].path()),
                        ]))));
                    }
                }
            }
        }
        Decomposition::Leaf => {}
    }
    for child in feature.children() {
        emit(child, clauses);
    }
}
