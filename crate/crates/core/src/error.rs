use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol `{name}` has no arity {arity}")]
    ArityMismatch { name: String, arity: usize },

    #[error("invalid alphabet: {0}")]
    Alphabet(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("tree has no hole to splice into")]
    NoHole,

    #[error("context has {expected} variables but {got} trees were supplied")]
    VariableCount { expected: usize, got: usize },

    #[error("malformed context: {0}")]
    Context(String),

    #[error("paths diverge at node {0}")]
    DivergentPaths(usize),

    #[error("invalid labeled path: {0}")]
    InvalidPath(String),

    #[error("node {0:?} does not exist")]
    MissingNode(Vec<usize>),

    #[error("invalid automaton: {0}")]
    Automaton(String),

    #[error("automaton must be deterministic")]
    Nondeterministic,

    #[error("invalid transducer: {0}")]
    Transducer(String),

    #[error("output node {0:?} is not a state leaf")]
    NotPending(Vec<usize>),

    #[error("no rule for state `{state}` on input symbol `{symbol}`")]
    Stuck { state: String, symbol: String },

    #[error("exploration budget of {0} vertices exceeded")]
    BudgetExceeded(usize),

    #[error("strategy is undefined at {0}")]
    StrategyGap(String),

    #[error("refutation budget exceeded: {0} candidates")]
    CandidateBudget(u128),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
