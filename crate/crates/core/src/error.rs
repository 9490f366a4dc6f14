use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("region is not clopen: {0}")]
    NonClopenRegion(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("inhomogeneous relation: {0}")]
    InhomogeneousRelation(String),
    #[error("not a differential: {0}")]
    NotADifferential(String),
    #[error("star condition violated: {0}")]
    StarViolation(String),
    #[error("not torsion: {0}")]
    NotTorsion(String),
    #[error("bad index: {0}")]
    BadIndex(String),
    #[error("element not found: {0}")]
    ElementNotFound(String),
    #[error("bad class: {0}")]
    BadClass(String),
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("wrong algebra for class: {0}")]
    WrongAlgebraForClass(String),
    #[error("fixture mismatch: {0}")]
    FixtureMismatch(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
