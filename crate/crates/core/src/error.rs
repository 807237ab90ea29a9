use thiserror::Error;

use crate::quiver::Vertex;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes and HTTP
/// statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input is well formed but violates an operation's precondition.
    Precondition,
    /// A truncation, enumeration or search budget was exhausted.
    Budget,
    /// The input could not be parsed or is structurally invalid.
    Input,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("quiver contains a loop or a 2-cycle")]
    LoopOrTwoCyclePresent,
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("bound {bound} is below the generator order {order}")]
    BoundTooSmall { bound: usize, order: usize },
    #[error("quiver is not acyclic")]
    NotAcyclic,
    #[error("a 2-cycle passes through vertex {0}")]
    TwoCycleAtVertex(Vertex),
    #[error("loop at vertex {0}")]
    LoopAtVertex(Vertex),
    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("malformed relation: {0}")]
    MalformedRelation(String),
    #[error("arrow degrees outside {{0,1}}: {0}")]
    BadDegrees(String),
    #[error("potential is not homogeneous of degree 1: {0}")]
    HomogeneityViolation(String),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("side {0} is a boundary segment")]
    BoundarySide(String),
    #[error("arc {0} is not the diagonal of an embedded quadrilateral")]
    SelfFoldedConfiguration(String),
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, shared by the CLI and the HTTP service.
    pub fn code(&self) -> &'static str {
        match self {
            Error::LoopOrTwoCyclePresent => "LoopOrTwoCyclePresent",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::UnknownArrow(_) => "UnknownArrow",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
            Error::BoundTooSmall { .. } => "BoundTooSmall",
            Error::NotAcyclic => "NotAcyclic",
            Error::TwoCycleAtVertex(_) => "TwoCycleAtVertex",
            Error::LoopAtVertex(_) => "LoopAtVertex",
            Error::TruncationOverflow(_) => "TruncationOverflow",
            Error::ResourceLimit(_) => "ResourceLimit",
            Error::MalformedRelation(_) => "MalformedRelation",
            Error::BadDegrees(_) => "BadDegrees",
            Error::HomogeneityViolation(_) => "HomogeneityViolation",
            Error::InvalidTriangulation(_) => "InvalidTriangulation",
            Error::BoundarySide(_) => "BoundarySide",
            Error::SelfFoldedConfiguration(_) => "SelfFoldedConfiguration",
            Error::InvalidQuiver(_) => "InvalidQuiver",
            Error::InvalidPotential(_) => "InvalidPotential",
            Error::Parse(_) => "Parse",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::TruncationOverflow(_) | Error::ResourceLimit(_) => ErrorClass::Budget,
            Error::Parse(_)
            | Error::InvalidQuiver(_)
            | Error::InvalidPotential(_)
            | Error::InvalidTriangulation(_)
            | Error::MalformedRelation(_) => ErrorClass::Input,
            _ => ErrorClass::Precondition,
        }
    }
}
