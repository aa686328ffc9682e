//! Feature-model representation and reasoning.
//!
//! A [`FeatureModel`] is a rooted tree of [`Feature`]s plus a list of
//! cross-tree [`CrossTreeConstraint`]s. Every feature is identified by its
//! slash-joined path from the root, which is globally unique even when
//! names repeat in different subtrees. Group semantics follow the usual
//! feature-diagram reading: under an AND parent every mandatory child must
//! come along, an OR group needs one or more children, an ALTERNATIVE
//! group exactly one.

mod analysis;
mod formula;
pub mod generator;

pub use analysis::{AnalysisError, ENUMERATION_CAPACITY};
pub use formula::{Formula, Prop};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How a feature's children are grouped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decomposition {
    And,
    Or,
    Alternative,
    Leaf,
}

impl Decomposition {
    pub fn keyword(self) -> &'static str {
        match self {
            Decomposition::And => "and",
            Decomposition::Or => "or",
            Decomposition::Alternative => "alt",
            Decomposition::Leaf => "leaf",
        }
    }
}

/// Whether an AND child must be present whenever its parent is.
///
/// Only meaningful for children of AND parents; the root and members of
/// OR/ALTERNATIVE groups are normalized to `Mandatory` at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Optionality {
    Mandatory,
    Optional,
}

/// One node of the feature tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    name: String,
    path: String,
    decomposition: Decomposition,
    optionality: Optionality,
    children: Vec<Feature>,
}

impl Feature {
    /// A feature without children.
    pub fn leaf(name: impl Into<String>) -> Self {
        Feature {
            name: name.into(),
            path: String::new(),
            decomposition: Decomposition::Leaf,
            optionality: Optionality::Mandatory,
            children: Vec::new(),
        }
    }

    /// An AND-decomposed feature.
    pub fn and(name: impl Into<String>, children: Vec<Feature>) -> Self {
        Feature {
            name: name.into(),
            path: String::new(),
            decomposition: Decomposition::And,
            optionality: Optionality::Mandatory,
            children,
        }
    }

    /// An OR-group feature (one or more children may be selected).
    pub fn or(name: impl Into<String>, children: Vec<Feature>) -> Self {
        Feature {
            name: name.into(),
            path: String::new(),
            decomposition: Decomposition::Or,
            optionality: Optionality::Mandatory,
            children,
        }
    }

    /// An ALTERNATIVE-group feature (exactly one child must be selected).
    pub fn alternative(name: impl Into<String>, children: Vec<Feature>) -> Self {
        Feature {
            name: name.into(),
            path: String::new(),
            decomposition: Decomposition::Alternative,
            optionality: Optionality::Mandatory,
            children,
        }
    }

    /// Marks this feature optional under its (AND) parent.
    pub fn optional(mut self) -> Self {
        self.optionality = Optionality::Optional;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Slash-joined identifier chain from the root; set during model
    /// construction and empty before that.
    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn decomposition(&self) -> Decomposition {
        self.decomposition
    }

    pub fn optionality(&self) -> Optionality {
        self.optionality
    }

    pub fn children(&self) -> &[Feature] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.decomposition == Decomposition::Leaf
    }
}

/// Requires/excludes relation between two features in the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Requires,
    Excludes,
}

impl ConstraintKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstraintKind::Requires => "requires",
            ConstraintKind::Excludes => "excludes",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossTreeConstraint {
    pub kind: ConstraintKind,
    pub source: String,
    pub target: String,
}

impl CrossTreeConstraint {
    pub fn requires(source: impl Into<String>, target: impl Into<String>) -> Self {
        CrossTreeConstraint {
            kind: ConstraintKind::Requires,
            source: source.into(),
            target: target.into(),
        }
    }

    pub fn excludes(source: impl Into<String>, target: impl Into<String>) -> Self {
        CrossTreeConstraint {
            kind: ConstraintKind::Excludes,
            source: source.into(),
            target: target.into(),
        }
    }
}

/// Construction-time error for ill-formed trees or constraints.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate sibling name `{name}` under `{parent}`")]
    DuplicateSibling { parent: String, name: String },
    #[error("`{path}` is `{kind}` and needs at least {minimum} children, found {found}")]
    GroupArity {
        path: String,
        kind: &'static str,
        minimum: usize,
        found: usize,
    },
    #[error("constraint endpoint `{path}` does not exist in the model")]
    UnknownConstraintPath { path: String },
    #[error("constraint relates `{path}` to itself")]
    SelfConstraint { path: String },
}

/// A rooted feature tree with cross-tree constraints.
///
/// Immutable after construction; all operations are pure and safe to call
/// from concurrent readers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureModel {
    root: Feature,
    constraints: Vec<CrossTreeConstraint>,
}

impl FeatureModel {
    /// Builds a model, assigning paths and checking the tree invariants:
    /// distinct sibling names, group arities (AND >= 1, OR/ALTERNATIVE >= 2),
    /// and resolvable, non-reflexive constraint endpoints. Optionality flags
    /// on the root and on OR/ALTERNATIVE group members are normalized to
    /// mandatory, since they carry no semantics there.
    pub fn new(
        mut root: Feature,
        constraints: Vec<CrossTreeConstraint>,
    ) -> Result<Self, ModelError> {
        root.optionality = Optionality::Mandatory;
        Self::assign_paths(&mut root, None)?;
        let mut paths = BTreeSet::new();
        Self::collect_paths(&root, &mut paths);
        for c in &constraints {
            for endpoint in [&c.source, &c.target] {
                if !paths.contains(endpoint.as_str()) {
                    return Err(ModelError::UnknownConstraintPath {
                        path: endpoint.clone(),
                    });
                }
            }
            if c.source == c.target {
                return Err(ModelError::SelfConstraint {
                    path: c.source.clone(),
                });
            }
        }
        Ok(FeatureModel { root, constraints })
    }

    fn assign_paths(feature: &mut Feature, parent_path: Option<&str>) -> Result<(), ModelError> {
        feature.path = match parent_path {
            Some(p) => format!("{}/{}", p, feature.name),
            None => feature.name.clone(),
        };
        let minimum = match feature.decomposition {
            Decomposition::Leaf => {
                if !feature.children.is_empty() {
                    // A leaf with children is a construction bug; treat it as
                    // an AND arity problem on the caller's side.
                    return Err(ModelError::GroupArity {
                        path: feature.path.clone(),
                        kind: "leaf",
                        minimum: 0,
                        found: feature.children.len(),
                    });
                }
                0
            }
            Decomposition::And => 1,
            Decomposition::Or | Decomposition::Alternative => 2,
        };
        if feature.children.len() < minimum {
            return Err(ModelError::GroupArity {
                path: feature.path.clone(),
                kind: feature.decomposition.keyword(),
                minimum,
                found: feature.children.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for child in &mut feature.children {
            if !seen.insert(child.name.clone()) {
                return Err(ModelError::DuplicateSibling {
                    parent: feature.path.clone(),
                    name: child.name.clone(),
                });
            }
            if !matches!(feature.decomposition, Decomposition::And) {
                child.optionality = Optionality::Mandatory;
            }
            let path = feature.path.clone();
            Self::assign_paths(child, Some(&path))?;
        }
        Ok(())
    }

    fn collect_paths(feature: &Feature, out: &mut BTreeSet<String>) {
        out.insert(feature.path.clone());
        for child in &feature.children {
            Self::collect_paths(child, out);
        }
    }

    pub fn root(&self) -> &Feature {
        &self.root
    }

    pub fn constraints(&self) -> &[CrossTreeConstraint] {
        &self.constraints
    }

    /// All features in pre-order.
    pub fn features(&self) -> Vec<&Feature> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Feature, out: &mut Vec<&'a Feature>) {
            out.push(f);
            for c in &f.children {
                walk(c, out);
            }
        }
        walk(&self.root, &mut out);
        out
    }

    /// All feature paths in pre-order.
    pub fn paths(&self) -> Vec<&str> {
        self.features().into_iter().map(|f| f.path()).collect()
    }

    pub fn feature_count(&self) -> usize {
        self.features().len()
    }

    pub fn find(&self, path: &str) -> Option<&Feature> {
        self.features().into_iter().find(|f| f.path() == path)
    }

    pub(crate) fn index(&self) -> ModelIndex<'_> {
        ModelIndex::new(self)
    }

    /// Checks a configuration against group and cross-tree rules.
    ///
    /// The report lists every violated rule instance, ordered by
    /// (feature path, rule name). Unknown selected paths surface as
    /// `UNKNOWN_FEATURE` violations rather than failures.
    pub fn validate_configuration(&self, config: &Configuration) -> ValidationReport {
        let index = self.index();
        self.validate_with_index(&index, &config.selected)
    }

    pub(crate) fn validate_with_index(
        &self,
        index: &ModelIndex<'_>,
        selected: &BTreeSet<String>,
    ) -> ValidationReport {
        let mut violations = Vec::new();
        let known = |p: &str| index.by_path.contains_key(p);
        let is_selected = |p: &str| selected.contains(p);

        for path in selected {
            if !known(path) {
                violations.push(Violation {
                    rule: Rule::UnknownFeature,
                    subject: path.clone(),
                    detail: "selected path does not exist in the model".into(),
                });
            }
        }
        if !is_selected(self.root.path()) {
            violations.push(Violation {
                rule: Rule::RootMissing,
                subject: self.root.path().to_string(),
                detail: "root feature must be selected".into(),
            });
        }
        for path in selected {
            if !known(path) || path == self.root.path() {
                continue;
            }
            let parent = index.parent[path.as_str()];
            if !is_selected(parent) {
                violations.push(Violation {
                    rule: Rule::Orphan,
                    subject: path.clone(),
                    detail: format!("parent `{parent}` is not selected"),
                });
            }
        }
        for feature in &index.order {
            if !is_selected(feature.path()) {
                continue;
            }
            match feature.decomposition() {
                Decomposition::And => {
                    for child in feature.children() {
                        if child.optionality() == Optionality::Mandatory
                            && !is_selected(child.path())
                        {
                            violations.push(Violation {
                                rule: Rule::MandatoryMissing,
                                subject: child.path().to_string(),
                                detail: format!(
                                    "mandatory under selected `{}`",
                                    feature.path()
                                ),
                            });
                        }
                    }
                }
                Decomposition::Or => {
                    let picked = feature
                        .children()
                        .iter()
                        .filter(|c| is_selected(c.path()))
                        .count();
                    if picked == 0 {
                        violations.push(Violation {
                            rule: Rule::OrEmpty,
                            subject: feature.path().to_string(),
                            detail: "or-group needs at least one selected child".into(),
                        });
                    }
                }
                Decomposition::Alternative => {
                    let picked = feature
                        .children()
                        .iter()
                        .filter(|c| is_selected(c.path()))
                        .count();
                    if picked != 1 {
                        violations.push(Violation {
                            rule: Rule::AltNotOne,
                            subject: feature.path().to_string(),
                            detail: format!(
                                "alternative group needs exactly one selected child, found {picked}"
                            ),
                        });
                    }
                }
                Decomposition::Leaf => {}
            }
        }
        for c in &self.constraints {
            match c.kind {
                ConstraintKind::Requires => {
                    if is_selected(&c.source) && !is_selected(&c.target) {
                        violations.push(Violation {
                            rule: Rule::RequiresBroken,
                            subject: c.source.clone(),
                            detail: format!("requires `{}`", c.target),
                        });
                    }
                }
                ConstraintKind::Excludes => {
                    if is_selected(&c.source) && is_selected(&c.target) {
                        violations.push(Violation {
                            rule: Rule::ExcludesBroken,
                            subject: c.source.clone(),
                            detail: format!("excludes `{}`", c.target),
                        });
                    }
                }
            }
        }
        violations.sort_by(|a, b| {
            (a.subject.as_str(), a.rule.name()).cmp(&(b.subject.as_str(), b.rule.name()))
        });
        ValidationReport {
            valid: violations.is_empty(),
            violations,
        }
    }
}

/// Pre-order traversal plus lookup tables, built once per operation.
pub(crate) struct ModelIndex<'a> {
    pub order: Vec<&'a Feature>,
    pub by_path: HashMap<&'a str, &'a Feature>,
    pub parent: HashMap<&'a str, &'a str>,
}

impl<'a> ModelIndex<'a> {
    fn new(model: &'a FeatureModel) -> Self {
        let order = model.features();
        let mut by_path = HashMap::with_capacity(order.len());
        let mut parent = HashMap::new();
        for f in &order {
            by_path.insert(f.path(), *f);
            for c in f.children() {
                parent.insert(c.path(), f.path());
            }
        }
        ModelIndex {
            order,
            by_path,
            parent,
        }
    }
}

/// A scalar parameter value attached to a feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(v) => {
                if v.fract() == 0.0 && v.is_finite() && v.abs() < 1e15 {
                    write!(f, "{v:.1}")
                } else {
                    write!(f, "{v}")
                }
            }
            ParamValue::Str(s) => write!(f, "{s}"),
        }
    }
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Int(i) => Some(*i as f64),
            ParamValue::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            ParamValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Str(s) => Some(s),
            _ => None,
        }
    }
}

pub type ParamMap = BTreeMap<String, ParamValue>;

/// A set of selected feature paths plus per-feature parameter bindings.
///
/// Carries no validity guarantee of its own; semantic validity is
/// established only by [`FeatureModel::validate_configuration`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub selected: BTreeSet<String>,
    pub bindings: BTreeMap<String, ParamMap>,
}

impl Configuration {
    pub fn from_paths<I, S>(paths: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Configuration {
            selected: paths.into_iter().map(Into::into).collect(),
            bindings: BTreeMap::new(),
        }
    }

    pub fn select(&mut self, path: impl Into<String>) -> &mut Self {
        self.selected.insert(path.into());
        self
    }

    pub fn deselect(&mut self, path: &str) -> &mut Self {
        self.selected.remove(path);
        self
    }

    pub fn bind(
        &mut self,
        path: impl Into<String>,
        key: impl Into<String>,
        value: ParamValue,
    ) -> &mut Self {
        self.bindings
            .entry(path.into())
            .or_default()
            .insert(key.into(), value);
        self
    }

    pub fn binding(&self, path: &str, key: &str) -> Option<&ParamValue> {
        self.bindings.get(path).and_then(|m| m.get(key))
    }

    pub fn is_selected(&self, path: &str) -> bool {
        self.selected.contains(path)
    }
}

/// Machine-readable violation tags, so tests can assert on rule identity
/// rather than message text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "UNKNOWN_FEATURE")]
    UnknownFeature,
    #[serde(rename = "ROOT_MISSING")]
    RootMissing,
    #[serde(rename = "ORPHAN")]
    Orphan,
    #[serde(rename = "MANDATORY_MISSING")]
    MandatoryMissing,
    #[serde(rename = "OR_EMPTY")]
    OrEmpty,
    #[serde(rename = "ALT_NOT_ONE")]
    AltNotOne,
    #[serde(rename = "REQUIRES_BROKEN")]
    RequiresBroken,
    #[serde(rename = "EXCLUDES_BROKEN")]
    ExcludesBroken,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::UnknownFeature => "UNKNOWN_FEATURE",
            Rule::RootMissing => "ROOT_MISSING",
            Rule::Orphan => "ORPHAN",
            Rule::MandatoryMissing => "MANDATORY_MISSING",
            Rule::OrEmpty => "OR_EMPTY",
            Rule::AltNotOne => "ALT_NOT_ONE",
            Rule::RequiresBroken => "REQUIRES_BROKEN",
            Rule::ExcludesBroken => "EXCLUDES_BROKEN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub subject: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn rules(&self) -> Vec<Rule> {
        self.violations.iter().map(|v| v.rule).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            writeln!(f, "valid")
        } else {
            writeln!(f, "invalid ({} violations)", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {} {}: {}", v.rule.name(), v.subject, v.detail)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple_and() -> FeatureModel {
        FeatureModel::new(
            Feature::and("R", vec![Feature::leaf("m"), Feature::leaf("o").optional()]),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn paths_are_assigned_from_root() {
        let m = simple_and();
        assert_eq!(m.paths(), vec!["R", "R/m", "R/o"]);
        assert_eq!(m.find("R/o").unwrap().optionality(), Optionality::Optional);
    }

    #[test]
    fn mandatory_child_missing_is_reported_at_child_path() {
        let m = simple_and();
        let report = m.validate_configuration(&Configuration::from_paths(["R"]));
        assert!(!report.valid);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].rule, Rule::MandatoryMissing);
        assert_eq!(report.violations[0].subject, "R/m");
    }

    #[test]
    fn alternative_with_two_selected_children_is_alt_not_one() {
        let m = FeatureModel::new(
            Feature::alternative(
                "R",
                vec![Feature::leaf("a"), Feature::leaf("b"), Feature::leaf("c")],
            ),
            vec![],
        )
        .unwrap();
        let report = m.validate_configuration(&Configuration::from_paths(["R", "R/a", "R/b"]));
        assert!(!report.valid);
        assert_eq!(report.rules(), vec![Rule::AltNotOne]);
        assert_eq!(report.violations[0].subject, "R");
    }

    #[test]
    fn excludes_is_reported_when_both_sides_selected() {
        let m = FeatureModel::new(
            Feature::or(
                "R",
                vec![Feature::leaf("a"), Feature::leaf("b"), Feature::leaf("c")],
            ),
            vec![CrossTreeConstraint::excludes("R/a", "R/b")],
        )
        .unwrap();
        let report = m.validate_configuration(&Configuration::from_paths(["R", "R/a", "R/b"]));
        assert!(report.rules().contains(&Rule::ExcludesBroken));
    }

    #[test]
    fn unknown_selected_path_is_a_violation_not_a_failure() {
        let m = simple_and();
        let report = m.validate_configuration(&Configuration::from_paths(["R", "R/m", "R/x"]));
        assert!(report.rules().contains(&Rule::UnknownFeature));
    }

    #[test]
    fn orphan_and_root_rules() {
        let m = simple_and();
        let report = m.validate_configuration(&Configuration::from_paths(["R/m"]));
        assert!(report.rules().contains(&Rule::RootMissing));
        assert!(report.rules().contains(&Rule::Orphan));
    }

    #[test]
    fn violations_are_ordered_by_path_then_rule() {
        let m = FeatureModel::new(
            Feature::and(
                "R",
                vec![
                    Feature::leaf("a"),
                    Feature::leaf("b"),
                    Feature::or("g", vec![Feature::leaf("x"), Feature::leaf("y")]).optional(),
                ],
            ),
            vec![],
        )
        .unwrap();
        let report = m.validate_configuration(&Configuration::from_paths(["R", "R/g"]));
        let subjects: Vec<_> = report.violations.iter().map(|v| v.subject.clone()).collect();
        let mut sorted = subjects.clone();
        sorted.sort();
        assert_eq!(subjects, sorted);
    }

    #[test]
    fn validation_is_pure_and_deterministic() {
        let m = FeatureModel::new(
            Feature::or("R", vec![Feature::leaf("a"), Feature::leaf("b")]),
            vec![CrossTreeConstraint::requires("R/a", "R/b")],
        )
        .unwrap();
        let cfg = Configuration::from_paths(["R", "R/a"]);
        assert_eq!(m.validate_configuration(&cfg), m.validate_configuration(&cfg));
    }

    #[test]
    fn construction_rejects_bad_arity_and_duplicates() {
        assert!(matches!(
            FeatureModel::new(Feature::or("R", vec![Feature::leaf("a")]), vec![]),
            Err(ModelError::GroupArity { .. })
        ));
        assert!(matches!(
            FeatureModel::new(
                Feature::and("R", vec![Feature::leaf("a"), Feature::leaf("a")]),
                vec![]
            ),
            Err(ModelError::DuplicateSibling { .. })
        ));
        assert!(matches!(
            FeatureModel::new(
                Feature::and("R", vec![Feature::leaf("a")]),
                vec![CrossTreeConstraint::requires("R/a", "R/zz")]
            ),
            Err(ModelError::UnknownConstraintPath { .. })
        ));
    }

    #[test]
    fn or_alt_children_lose_optionality_flags() {
        let m = FeatureModel::new(
            Feature::or(
                "R",
                vec![Feature::leaf("a").optional(), Feature::leaf("b")],
            ),
            vec![],
        )
        .unwrap();
        assert_eq!(m.find("R/a").unwrap().optionality(), Optionality::Mandatory);
    }
}
