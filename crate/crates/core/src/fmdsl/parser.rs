//! Recursive-descent parser for models and configurations. Stops at the
//! first error; semantic checks (sibling duplicates, group arity, flag
//! placement, constraint resolution, duplicate bindings) carry spans too.

use std::collections::BTreeSet;

use crate::feature_model::{
    Configuration, CrossTreeConstraint, Decomposition, Feature, FeatureModel, Optionality,
    ParamValue,
};

use super::lexer::{is_keyword, tokenize, Token, TokenKind};
use super::{DslError, ParseError, SemanticError, SemanticErrorKind, SourceSpan};

pub fn parse_model(text: &str) -> Result<FeatureModel, DslError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    parser.model()
}

pub fn parse_named_configuration(text: &str) -> Result<(String, Configuration), DslError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    parser.configuration()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, span: SourceSpan, expected: &str, found: String) -> DslError {
        DslError::Syntax(ParseError {
            span,
            expected: expected.to_string(),
            found,
        })
    }

    fn semantic(&self, span: SourceSpan, kind: SemanticErrorKind, detail: String) -> DslError {
        DslError::Semantic(SemanticError { span, kind, detail })
    }

    fn expect_keyword(&mut self, keyword: &'static str) -> Result<Token, DslError> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::Word(w) if w == keyword => Ok(self.advance()),
            other => Err(self.syntax(t.span, &format!("'{keyword}'"), other.describe())),
        }
    }

    fn peek_word(&self) -> Option<&str> {
        match &self.peek().kind {
            TokenKind::Word(w) => Some(w.as_str()),
            _ => None,
        }
    }

    /// A single identifier: no slashes, not a keyword.
    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), DslError> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::Word(w) if !w.contains('/') && !is_keyword(w) => {
                self.advance();
                Ok((w.clone(), t.span))
            }
            TokenKind::Word(w) if is_keyword(w) => {
                Err(self.syntax(t.span, what, format!("keyword '{w}'")))
            }
            other => Err(self.syntax(t.span, what, other.describe())),
        }
    }

    /// A slash-joined path whose segments are non-keyword identifiers.
    fn expect_path(&mut self, what: &str) -> Result<(String, SourceSpan), DslError> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::Word(w) => {
                if let Some(seg) = w.split('/').find(|seg| is_keyword(seg)) {
                    return Err(self.syntax(t.span, what, format!("keyword '{seg}'")));
                }
                self.advance();
                Ok((w.clone(), t.span))
            }
            other => Err(self.syntax(t.span, what, other.describe())),
        }
    }

    fn model(&mut self) -> Result<FeatureModel, DslError> {
        let model_kw = self.expect_keyword("model")?;
        self.expect_ident("a model name")?;
        let (root, _) = self.feature(None)?;

        let mut constraints = Vec::new();
        while self.peek_word() == Some("constraint") {
            self.advance();
            let (source, source_span) = self.expect_path("a feature path")?;
            let kind = {
                let t = self.peek().clone();
                match self.peek_word() {
                    Some("requires") => {
                        self.advance();
                        crate::feature_model::ConstraintKind::Requires
                    }
                    Some("excludes") => {
                        self.advance();
                        crate::feature_model::ConstraintKind::Excludes
                    }
                    _ => {
                        return Err(self.syntax(
                            t.span,
                            "'requires' or 'excludes'",
                            t.kind.describe(),
                        ))
                    }
                }
            };
            let (target, target_span) = self.expect_path("a feature path")?;
            constraints.push((
                CrossTreeConstraint {
                    kind,
                    source,
                    target,
                },
                source_span,
                target_span,
            ));
        }
        let t = self.peek().clone();
        if t.kind != TokenKind::Eof {
            return Err(self.syntax(
                t.span,
                "'constraint' or end of input",
                t.kind.describe(),
            ));
        }

        // Arity and duplicates were checked during descent, so a bare tree
        // always constructs; keep the error mapped anyway.
        let bare = FeatureModel::new(root, vec![]).map_err(|e| {
            self.semantic(model_kw.span, SemanticErrorKind::Malformed, e.to_string())
        })?;
        let paths: BTreeSet<String> = bare.paths().iter().map(|p| p.to_string()).collect();
        for (c, source_span, target_span) in &constraints {
            for (endpoint, span) in [(&c.source, source_span), (&c.target, target_span)] {
                if !paths.contains(endpoint) {
                    return Err(self.semantic(
                        *span,
                        SemanticErrorKind::UnknownConstraintPath,
                        format!("`{endpoint}` does not name a feature in this model"),
                    ));
                }
            }
            if c.source == c.target {
                return Err(self.semantic(
                    *target_span,
                    SemanticErrorKind::SelfConstraint,
                    format!("`{}` cannot constrain itself", c.source),
                ));
            }
        }
        FeatureModel::new(
            bare.root().clone(),
            constraints.into_iter().map(|(c, _, _)| c).collect(),
        )
        .map_err(|e| self.semantic(model_kw.span, SemanticErrorKind::Malformed, e.to_string()))
    }

    fn feature(
        &mut self,
        parent_kind: Option<Decomposition>,
    ) -> Result<(Feature, SourceSpan), DslError> {
        let flag = match self.peek_word() {
            Some(w @ ("mandatory" | "optional")) => {
                let flag_token = self.peek().clone();
                if parent_kind != Some(Decomposition::And) {
                    return Err(self.semantic(
                        flag_token.span,
                        SemanticErrorKind::FlagNotAllowed,
                        format!(
                            "'{w}' is only legal for children of an 'and' group"
                        ),
                    ));
                }
                let optionality = if w == "optional" {
                    Optionality::Optional
                } else {
                    Optionality::Mandatory
                };
                self.advance();
                Some(optionality)
            }
            _ => None,
        };
        let (name, name_span) = self.expect_ident("a feature name")?;

        let mut feature = if self.peek().kind == TokenKind::LBrace {
            self.advance();
            let kind_token = self.peek().clone();
            let kind = match self.peek_word() {
                Some("and") => Decomposition::And,
                Some("or") => Decomposition::Or,
                Some("alt") => Decomposition::Alternative,
                _ => {
                    return Err(self.syntax(
                        kind_token.span,
                        "'and', 'or' or 'alt'",
                        kind_token.kind.describe(),
                    ))
                }
            };
            self.advance();

            let mut children = Vec::new();
            let mut seen = BTreeSet::new();
            loop {
                match &self.peek().kind {
                    TokenKind::RBrace => break,
                    TokenKind::Eof => {
                        let t = self.peek().clone();
                        return Err(self.syntax(t.span, "'}'", "end of input".into()));
                    }
                    _ => {
                        let (child, child_span) = self.feature(Some(kind))?;
                        if !seen.insert(child.name().to_string()) {
                            return Err(self.semantic(
                                child_span,
                                SemanticErrorKind::DuplicateSibling,
                                format!("`{}` appears twice under `{name}`", child.name()),
                            ));
                        }
                        children.push(child);
                    }
                }
            }
            self.advance(); // inner '}'
            let closing = self.peek().clone();
            if closing.kind != TokenKind::RBrace {
                return Err(self.syntax(closing.span, "'}'", closing.kind.describe()));
            }
            self.advance();

            let minimum = match kind {
                Decomposition::And => 1,
                _ => 2,
            };
            if children.len() < minimum {
                return Err(self.semantic(
                    kind_token.span,
                    SemanticErrorKind::GroupArity,
                    format!(
                        "'{}' group under `{name}` needs at least {minimum} features, found {}",
                        kind.keyword(),
                        children.len()
                    ),
                ));
            }
            match kind {
                Decomposition::And => Feature::and(name, children),
                Decomposition::Or => Feature::or(name, children),
                Decomposition::Alternative => Feature::alternative(name, children),
                Decomposition::Leaf => unreachable!(),
            }
        } else {
            Feature::leaf(name)
        };
        if flag == Some(Optionality::Optional) {
            feature = feature.optional();
        }
        Ok((feature, name_span))
    }

    fn configuration(&mut self) -> Result<(String, Configuration), DslError> {
        self.expect_keyword("config")?;
        let (name, _) = self.expect_ident("a configuration name")?;
        let mut config = Configuration::default();
        while self.peek_word() == Some("select") {
            self.advance();
            let (path, _) = self.expect_path("a feature path")?;
            config.selected.insert(path); // duplicates are idempotent
        }
        while self.peek_word() == Some("set") {
            self.advance();
            let (path, _) = self.expect_path("a feature path")?;
            let (key, key_span) = self.expect_ident("a parameter name")?;
            let eq = self.peek().clone();
            if eq.kind != TokenKind::Eq {
                return Err(self.syntax(eq.span, "'='", eq.kind.describe()));
            }
            self.advance();
            let value_token = self.peek().clone();
            let value = match &value_token.kind {
                TokenKind::Int(v) => ParamValue::Int(*v),
                TokenKind::Float(v) => ParamValue::Float(*v),
                TokenKind::Str(s) => ParamValue::Str(s.clone()),
                TokenKind::Word(w) if w == "true" => ParamValue::Bool(true),
                TokenKind::Word(w) if w == "false" => ParamValue::Bool(false),
                other => {
                    return Err(self.syntax(
                        value_token.span,
                        "a value (integer, decimal, quoted string, true or false)",
                        other.describe(),
                    ))
                }
            };
            self.advance();
            let slot = config.bindings.entry(path.clone()).or_default();
            if slot.contains_key(&key) {
                return Err(self.semantic(
                    key_span,
                    SemanticErrorKind::DuplicateBinding,
                    format!("`{key}` is already set for `{path}`"),
                ));
            }
            slot.insert(key, value);
        }
        let t = self.peek().clone();
        if t.kind != TokenKind::Eof {
            return Err(self.syntax(t.span, "'set' or end of input", t.kind.describe()));
        }
        Ok((name, config))
    }
}
