use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Parse failure at a byte offset of the input.
    Syntax { pos: usize, msg: String },
    UnknownVariable(String),
    UnknownPredicate(String),
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    InvalidVocabulary(String),
    /// Equality or inclusion atoms reached machinery defined for core LFD only.
    UnsupportedAtom(String),
    AssignmentNotInTeam,
    EmptyTeam,
    VocabularyMismatch(String),
    InvalidModel(String),
    InvalidArgument(String),
    /// A documented resource bound was exceeded.
    ResourceCap(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { pos, msg } => write!(f, "syntax error at {pos}: {msg}"),
            Error::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            Error::UnknownPredicate(p) => write!(f, "unknown predicate `{p}`"),
            Error::ArityMismatch {
                predicate,
                expected,
                found,
            } => write!(
                f,
                "predicate `{predicate}` has arity {expected} but was given {found} arguments"
            ),
            Error::InvalidVocabulary(m) => write!(f, "invalid vocabulary: {m}"),
            Error::UnsupportedAtom(m) => write!(f, "unsupported atom: {m}"),
            Error::AssignmentNotInTeam => write!(f, "assignment is not a member of the team"),
            Error::EmptyTeam => write!(f, "the team is empty"),
            Error::VocabularyMismatch(m) => write!(f, "vocabulary mismatch: {m}"),
            Error::InvalidModel(m) => write!(f, "invalid model: {m}"),
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::ResourceCap(m) => write!(f, "resource cap exceeded: {m}"),
        }
    }
}

impl core::error::Error for Error {}
