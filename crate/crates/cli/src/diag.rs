//! Machine-readable diagnostics and their exit codes.

use serde::Serialize;
use tqnn::classifier::ClassifierError;
use tqnn::group_algebra::GroupError;
use tqnn::path_integral::PathError;
use tqnn::spin_network::{MetricError, SpinNetworkError};
use tqnn::two_complex::{ComplexError, TwoComplexError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// Bad flag combination or missing required value.
    Usage,
    /// Configuration file problem.
    Config,
    /// Input file does not match its schema.
    Schema,
    /// Input file missing or unreadable.
    Input,
    /// Well-formed input rejected by the library.
    Domain,
    Budget,
    Unstable,
    /// Failure writing outputs.
    Io,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub status: &'static str,
    pub kind: Kind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl Diagnostic {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self {
            status: "error",
            kind,
            message: message.into(),
            file: None,
            path: None,
            details: Vec::new(),
        }
    }

    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }

    pub fn at(mut self, path: impl Into<String>) -> Self {
        let p = path.into();
        if !p.is_empty() && p != "." {
            self.path = Some(p);
        }
        self
    }

    pub fn with_details(mut self, details: Vec<String>) -> Self {
        self.details = details;
        self
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Io => 1,
            _ => 2,
        }
    }
}

pub fn usage(message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(Kind::Usage, message)
}

impl From<GroupError> for Diagnostic {
    fn from(e: GroupError) -> Self {
        Diagnostic::new(Kind::Domain, e.to_string())
    }
}

impl From<ComplexError> for Diagnostic {
    fn from(e: ComplexError) -> Self {
        Diagnostic::new(Kind::Domain, e.to_string())
    }
}

impl From<SpinNetworkError> for Diagnostic {
    fn from(e: SpinNetworkError) -> Self {
        Diagnostic::new(Kind::Domain, e.to_string())
    }
}

impl From<MetricError> for Diagnostic {
    fn from(e: MetricError) -> Self {
        Diagnostic::new(Kind::Domain, e.to_string())
    }
}

impl From<TwoComplexError> for Diagnostic {
    fn from(e: TwoComplexError) -> Self {
        let kind = match e {
            TwoComplexError::Budget { .. } => Kind::Budget,
            _ => Kind::Domain,
        };
        Diagnostic::new(kind, e.to_string())
    }
}

impl From<PathError> for Diagnostic {
    fn from(e: PathError) -> Self {
        let kind = match e {
            PathError::Budget { .. } => Kind::Budget,
            PathError::Unstable { .. } => Kind::Unstable,
            _ => Kind::Domain,
        };
        Diagnostic::new(kind, e.to_string())
    }
}

impl From<ClassifierError> for Diagnostic {
    fn from(e: ClassifierError) -> Self {
        let kind = match e {
            ClassifierError::Budget { .. } | ClassifierError::TwoComplex(TwoComplexError::Budget { .. }) => {
                Kind::Budget
            }
            _ => Kind::Domain,
        };
        Diagnostic::new(kind, e.to_string())
    }
}
