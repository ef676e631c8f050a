use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vertex name `{0}`")]
    BadVertexName(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("words belong to different Artin graphs")]
    GraphMismatch,
    #[error("word length cap of {0} syllables exceeded")]
    LengthCapExceeded(usize),
    #[error("generator `{0}` has no image under the map")]
    UnmappedGenerator(String),
    #[error("word is not in the kernel of the retraction")]
    NotInKernel,
    #[error("kernel construction hypotheses violated at `{0}`: {1}")]
    HypothesisViolated(String, String),
    #[error("substitution is not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("star of `{0}` is the whole vertex set")]
    StarIsFull(String),
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("not a valid even FC Artin graph:\n{0}")]
    InvalidGraph(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
