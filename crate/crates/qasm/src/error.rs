use std::fmt;

use crate::circuit::GateSpecError;
use crate::expr::EvalError;

/// A 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: UnsupportedFeature: {feature}")]
    UnsupportedFeature { pos: Pos, feature: String },
    #[error("{pos}: UnknownGate: `{name}`")]
    UnknownGate { pos: Pos, name: String },
    #[error("{pos}: ArityMismatch: {message}")]
    ArityMismatch { pos: Pos, message: String },
    #[error("{pos}: {message}")]
    Semantic { pos: Pos, message: String },
    #[error("{pos}: parameter error: {source}")]
    Eval { pos: Pos, source: EvalError },
    #[error("{pos}: gate expansion exceeded depth {limit} (cyclic definition of `{name}`?)")]
    ExpansionDepth { pos: Pos, name: String, limit: usize },
}

impl ParseError {
    pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            pos,
            message: message.into(),
        }
    }

    pub(crate) fn semantic(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Semantic {
            pos,
            message: message.into(),
        }
    }

    pub(crate) fn unsupported(pos: Pos, feature: impl Into<String>) -> Self {
        ParseError::UnsupportedFeature {
            pos,
            feature: feature.into(),
        }
    }

    pub(crate) fn from_gate(pos: Pos, err: GateSpecError) -> Self {
        match err {
            GateSpecError::ParamArity { .. } | GateSpecError::QubitArity { .. } => {
                ParseError::ArityMismatch {
                    pos,
                    message: err.to_string(),
                }
            }
            other => ParseError::semantic(pos, other.to_string()),
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnsupportedFeature { pos, .. }
            | ParseError::UnknownGate { pos, .. }
            | ParseError::ArityMismatch { pos, .. }
            | ParseError::Semantic { pos, .. }
            | ParseError::Eval { pos, .. }
            | ParseError::ExpansionDepth { pos, .. } => *pos,
        }
    }
}
