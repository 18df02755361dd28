use thiserror::Error;

/// Errors raised by the symbolic engines (rewriting, narrowing, unification).
///
/// Resource exhaustion is always reported explicitly; no engine silently
/// truncates a search space.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("rewrite step limit of {limit} exceeded while normalizing `{term}`")]
    StepLimitExceeded { limit: usize, term: String },

    #[error("variant narrowing did not saturate within bounds (depth {depth}, {nodes} nodes): theory is not FVP up to the given bound")]
    NarrowBoundExceeded { depth: usize, nodes: usize },

    #[error("Diophantine basis exceeded cap of {cap} while solving an AC unification problem")]
    DiophCapExceeded { cap: usize },

    #[error("AC unification generated more than {cap} candidate subsets")]
    AcSplitCapExceeded { cap: usize },

    #[error("unification recursion exceeded depth {cap}")]
    UnifyDepthExceeded { cap: usize },

    #[error("sort `{sort}` could not be classified as finite or infinite; add a `finite sort` or `infinite sort` annotation")]
    UnknownFiniteness { sort: String },

    #[error("formula is outside the supported quantifier-free fragment: {reason}")]
    UnsupportedFormula { reason: String },

    #[error("ground assignment space exceeded cap of {cap}")]
    AssignmentCapExceeded { cap: usize },
}

pub type EngineResult<T> = Result<T, EngineError>;

/// A diagnostic produced while loading or validating a theory file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Condition or grammar rule that was violated.
    pub code: String,
    pub message: String,
    /// 1-based line/column, when the diagnostic points into a source file.
    pub at: Option<(usize, usize)>,
}

impl Diagnostic {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { code: code.into(), message: message.into(), at: None }
    }

    pub fn at(code: impl Into<String>, message: impl Into<String>, line: usize, col: usize) -> Self {
        Diagnostic { code: code.into(), message: message.into(), at: Some((line, col)) }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.at {
            Some((l, c)) => write!(f, "{}:{}: [{}] {}", l, c, self.code, self.message),
            None => write!(f, "[{}] {}", self.code, self.message),
        }
    }
}

/// Failure to load a theory: parse errors or validation diagnostics.
#[derive(Debug, Clone, Error)]
pub struct LoadError {
    pub diagnostics: Vec<Diagnostic>,
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", d)?;
        }
        Ok(())
    }
}

impl LoadError {
    pub fn one(d: Diagnostic) -> Self {
        LoadError { diagnostics: vec![d] }
    }
}
