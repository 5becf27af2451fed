use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown base group `{0}`")]
    UnknownGroup(String),
    #[error("unknown bit stream `{0}`")]
    UnknownStream(String),
    #[error("unknown permutation `{0}`")]
    UnknownPermutation(String),
    #[error("elements of different base groups cannot be combined")]
    MixedGroups,
    #[error("the identity has infinitely many fixed points")]
    IdentityFixSet,
    #[error("cofinitary contract violated: {0}")]
    NotCofinitary(String),
    #[error("invalid permutation table: {0}")]
    BadTable(String),
    #[error("cannot parse word `{text}`: {reason}")]
    WordSyntax { text: String, reason: String },
    #[error("word `{0}` is not written in reduced form")]
    NotReduced(String),
    #[error("`{0}` is a group word")]
    GroupWord(String),
    #[error("the empty word has no path")]
    EmptyWord,
    #[error("adding ({0}, {1}) would break injectivity")]
    NotInjective(u64, u64),
    #[error("bit {index} is beyond the end of stream `{name}` ({len} bits)")]
    StreamExhausted { name: String, index: usize, len: usize },
    #[error("stream `{name}` looks periodic: period {period} from offset {offset}")]
    Periodic {
        name: String,
        period: usize,
        offset: usize,
    },
    #[error("iterate {step} is undefined")]
    UndefinedIterate { step: usize },
    #[error("conditions belong to different contexts ({0} vs {1})")]
    ContextMismatch(String, String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no admissible value found below {0}")]
    NoAdmissibleValue(u64),
    #[error("no admissible point for `{target}` in [{from}, {to})")]
    HitExhausted { target: String, from: u64, to: u64 },
    #[error("permutation `{name}` is not injective: {a} and {b} both map to {value}")]
    TargetNotInjective {
        name: String,
        a: u64,
        b: u64,
        value: u64,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("task {index} ({task}) failed: {source}")]
    Task {
        index: usize,
        task: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
