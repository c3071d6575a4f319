use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("cocharacter is not integral")]
    NonIntegralCocharacter,
    #[error("the zero element has no Newton polytope")]
    ZeroElement,
    #[error("polynomial is constant after clearing powers of x")]
    ConstantPolynomial,
    #[error("root finder did not converge: {0}")]
    RootFinding(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("not a chain complex: d1*d2 != 0")]
    NotAChainComplex,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cycle complex too large: more than {0} simple cycles")]
    ComplexTooLarge(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("not a train-track map: {0}")]
    NotTrainTrack(String),
    #[error("cannot fold an edge with itself")]
    SameEdge,
    #[error("folded edges share their terminal vertex")]
    SharedTerminalVertex,
    #[error("edges to fold do not share an initial vertex")]
    NoCommonVertex,
    #[error("map is not a homotopy equivalence: {0}")]
    NotHomotopyEquivalence(String),
    #[error("invalid folding sequence: {0}")]
    InvalidFolding(String),
    #[error("invalid branched surface: {0}")]
    InvalidSurface(String),
    #[error("vertical subdivision is not allowable: {0}")]
    NotAllowable(String),
    #[error("endpoints lie on the same boundary 1-cell")]
    SameCellBoundaryEdge,
    #[error("no common segment for fold move: {0}")]
    NoCommonSegment(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("class is not in the cone")]
    NotInCone,
    #[error("class is not primitive")]
    NotPrimitive,
    #[error("no positive integer cocycle represents the class")]
    NoIntegerCocycle,
    #[error("group element is not in the support")]
    NotInSupport,
    #[error("specialization is constant")]
    ConstantSpecialization,
    #[error("rank {0} too large for cone comparison")]
    RankTooLarge(usize),
    #[error("section extraction failed: {0}")]
    Section(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
