//! Textual DSL for feature models (`.fm`) and configurations (`.cfg`).
//!
//! Model grammar:
//!
//! ```text
//! model      = "model" IDENT feature { constraint } ;
//! feature    = flag? IDENT ( "{" kind feature+ "}" )? ;
//! flag       = "mandatory" | "optional" ;          # only under an "and" block
//! kind       = "and" | "or" | "alt" ;
//! constraint = "constraint" PATH ("requires"|"excludes") PATH ;
//! IDENT      = [A-Za-z][A-Za-z0-9_]* ;  PATH = IDENT ("/" IDENT)* ;
//! ```
//!
//! Configuration grammar:
//!
//! ```text
//! config = "config" IDENT { "select" PATH } { "set" PATH KEY "=" VALUE } ;
//! VALUE  = integer | decimal | quoted string | true | false ;
//! ```
//!
//! `#` starts a comment to end of line. Input is whitespace-insensitive;
//! under an `and` block a missing flag means `mandatory`. The serializers
//! emit a canonical form (two-space indentation, stored child order,
//! constraints last, LF line endings) and `parse(serialize(x))` is the
//! structural identity.

mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::feature_model::{
    Configuration, Decomposition, Feature, FeatureModel, Optionality, ParamValue,
};

pub use parser::{parse_model, parse_named_configuration};

/// 1-based position of a token in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: expected {}, found {}",
            self.span, self.expected, self.found
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemanticErrorKind {
    DuplicateSibling,
    GroupArity,
    UnknownConstraintPath,
    SelfConstraint,
    FlagNotAllowed,
    DuplicateBinding,
    Malformed,
}

impl SemanticErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            SemanticErrorKind::DuplicateSibling => "DUPLICATE_SIBLING",
            SemanticErrorKind::GroupArity => "GROUP_ARITY",
            SemanticErrorKind::UnknownConstraintPath => "UNKNOWN_CONSTRAINT_PATH",
            SemanticErrorKind::SelfConstraint => "SELF_CONSTRAINT",
            SemanticErrorKind::FlagNotAllowed => "FLAG_NOT_ALLOWED",
            SemanticErrorKind::DuplicateBinding => "DUPLICATE_BINDING",
            SemanticErrorKind::Malformed => "MALFORMED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticError {
    pub span: SourceSpan,
    pub kind: SemanticErrorKind,
    pub detail: String,
}

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.kind.name(), self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{0}")]
    Syntax(ParseError),
    #[error("{0}")]
    Semantic(SemanticError),
}

impl DslError {
    pub fn span(&self) -> SourceSpan {
        match self {
            DslError::Syntax(e) => e.span,
            DslError::Semantic(e) => e.span,
        }
    }
}

/// Parses a configuration, discarding the header name.
pub fn parse_configuration(text: &str) -> Result<Configuration, DslError> {
    parse_named_configuration(text).map(|(_, c)| c)
}

/// Canonical text for a model: header line, two-space indented tree,
/// constraints last, LF endings.
pub fn serialize_model(model: &FeatureModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("model {}\n", model.root().name()));
    serialize_feature(model.root(), None, 0, &mut out);
    for c in model.constraints() {
        out.push_str(&format!(
            "constraint {} {} {}\n",
            c.source,
            c.kind.keyword(),
            c.target
        ));
    }
    out
}

fn serialize_feature(
    feature: &Feature,
    parent_kind: Option<Decomposition>,
    indent: usize,
    out: &mut String,
) {
    let pad = " ".repeat(indent);
    let flag = match (parent_kind, feature.optionality()) {
        (Some(Decomposition::And), Optionality::Optional) => "optional ",
        (Some(Decomposition::And), Optionality::Mandatory) => "mandatory ",
        _ => "",
    };
    if feature.is_leaf() {
        out.push_str(&format!("{pad}{flag}{}\n", feature.name()));
        return;
    }
    out.push_str(&format!("{pad}{flag}{} {{\n", feature.name()));
    out.push_str(&format!(
        "{pad}  {} {{\n",
        feature.decomposition().keyword()
    ));
    for child in feature.children() {
        serialize_feature(child, Some(feature.decomposition()), indent + 4, out);
    }
    out.push_str(&format!("{pad}  }}\n"));
    out.push_str(&format!("{pad}}}\n"));
}

/// Canonical text for a configuration. Selections come out sorted, then
/// bindings sorted by path and key. The header name is sanitized to the
/// DSL identifier shape so output always parses back.
pub fn serialize_configuration(name: &str, config: &Configuration) -> String {
    let mut out = String::new();
    out.push_str(&format!("config {}\n", sanitize_ident(name)));
    for path in &config.selected {
        out.push_str(&format!("select {path}\n"));
    }
    for (path, params) in &config.bindings {
        for (key, value) in params {
            out.push_str(&format!("set {path} {key} = {}\n", render_value(value)));
        }
    }
    out
}

fn render_value(value: &ParamValue) -> String {
    match value {
        ParamValue::Str(s) => {
            let mut quoted = String::from("\"");
            for c in s.chars() {
                match c {
                    '"' => quoted.push_str("\\\""),
                    '\\' => quoted.push_str("\\\\"),
                    '\n' => quoted.push_str("\\n"),
                    '\t' => quoted.push_str("\\t"),
                    other => quoted.push(other),
                }
            }
            quoted.push('"');
            quoted
        }
        other => other.to_string(),
    }
}

fn sanitize_ident(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if !out.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
        out.insert(0, 'c');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_model::{CrossTreeConstraint, Rule};

    #[test]
    fn smallest_alternative_model() {
        let m = parse_model("model M M { alt { a b } }").unwrap();
        assert_eq!(m.root().decomposition(), Decomposition::Alternative);
        assert_eq!(m.paths(), vec!["M", "M/a", "M/b"]);
    }

    #[test]
    fn flags_and_constraint_round_through() {
        let m = parse_model(
            "model M M { and { mandatory x optional y } } constraint M/y requires M/x",
        )
        .unwrap();
        assert_eq!(m.constraints().len(), 1);
        assert_eq!(m.find("M/y").unwrap().optionality(), Optionality::Optional);
        assert_eq!(m.find("M/x").unwrap().optionality(), Optionality::Mandatory);
    }

    #[test]
    fn or_arity_is_a_semantic_error() {
        let err = parse_model("model M M { or { a } }").unwrap_err();
        match err {
            DslError::Semantic(e) => assert_eq!(e.kind, SemanticErrorKind::GroupArity),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_flag_under_and_defaults_to_mandatory() {
        let m = parse_model("model M M { and { x { or { a b } } } }").unwrap();
        assert_eq!(m.find("M/x").unwrap().optionality(), Optionality::Mandatory);
    }

    #[test]
    fn flag_outside_and_is_rejected() {
        let err = parse_model("model M M { or { mandatory a b } }").unwrap_err();
        match err {
            DslError::Semantic(e) => assert_eq!(e.kind, SemanticErrorKind::FlagNotAllowed),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_sibling_is_rejected_with_span() {
        let err = parse_model("model M M { and { a a } }").unwrap_err();
        match err {
            DslError::Semantic(e) => {
                assert_eq!(e.kind, SemanticErrorKind::DuplicateSibling);
                assert_eq!(e.span.line, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_constraint_path_is_rejected() {
        let err = parse_model("model M M { and { a } } constraint M/zz requires M/a").unwrap_err();
        match err {
            DslError::Semantic(e) => {
                assert_eq!(e.kind, SemanticErrorKind::UnknownConstraintPath)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn leaf_root_serializes_to_two_lines() {
        let m = FeatureModel::new(Feature::leaf("M"), vec![]).unwrap();
        assert_eq!(serialize_model(&m), "model M\nM\n");
    }

    #[test]
    fn serialization_is_deterministic_and_round_trips() {
        let m = FeatureModel::new(
            Feature::and(
                "M",
                vec![
                    Feature::leaf("x"),
                    Feature::or("g", vec![Feature::leaf("p"), Feature::leaf("q")]).optional(),
                ],
            ),
            vec![CrossTreeConstraint::excludes("M/x", "M/g/p")],
        )
        .unwrap();
        let text = serialize_model(&m);
        assert_eq!(text, serialize_model(&m));
        let reparsed = parse_model(&text).unwrap();
        assert_eq!(reparsed, m);
    }

    #[test]
    fn config_parse_and_round_trip() {
        let c = parse_configuration("config c select M").unwrap();
        assert!(c.selected.contains("M"));

        let text = "config c select M select M/a set M k = 3 set M/a ratio = 0.25 \
                    set M name = \"hi\\n\" set M/a flag = true";
        let cfg = parse_configuration(text).unwrap();
        let canon = serialize_configuration("c", &cfg);
        let (name, reparsed) = parse_named_configuration(&canon).unwrap();
        assert_eq!(name, "c");
        assert_eq!(reparsed, cfg);
    }

    #[test]
    fn duplicate_select_is_idempotent_but_duplicate_set_errors() {
        let cfg = parse_configuration("config c select M select M").unwrap();
        assert_eq!(cfg.selected.len(), 1);

        let err = parse_configuration("config c select M set M k = 3 set M k = 4").unwrap_err();
        match err {
            DslError::Semantic(e) => assert_eq!(e.kind, SemanticErrorKind::DuplicateBinding),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn float_bindings_round_trip_without_collapsing_to_int() {
        let mut cfg = Configuration::default();
        cfg.bind("M", "x", ParamValue::Float(3.0));
        let text = serialize_configuration("c", &cfg);
        assert!(text.contains("x = 3.0"));
        let reparsed = parse_configuration(&text).unwrap();
        assert_eq!(reparsed.binding("M", "x"), Some(&ParamValue::Float(3.0)));
    }

    #[test]
    fn parse_errors_carry_line_and_column() {
        let err = parse_model("model M\nM {\n  or { }\n}").unwrap_err();
        let span = err.span();
        assert!(span.line >= 1 && span.column >= 1);
        let rendered = err.to_string();
        assert!(rendered.contains(&format!("{}:{}", span.line, span.column)));
    }

    #[test]
    fn validated_against_model_after_parsing() {
        let m = parse_model("model M M { and { mandatory x optional y } }").unwrap();
        let cfg = parse_configuration("config c select M select M/x").unwrap();
        assert!(m.validate_configuration(&cfg).valid);
        let bad = parse_configuration("config c select M").unwrap();
        let report = m.validate_configuration(&bad);
        assert_eq!(report.rules(), vec![Rule::MandatoryMissing]);
    }
}
