use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown lattice kind `{0}` (expected lukasiewicz, goedel, product or boolean)")]
    UnknownLatticeKind(String),
    #[error("unknown operation name `{0}`")]
    UnknownOperation(String),
    #[error("operation `{op}` is not defined on lattice `{lattice}`")]
    UndefinedOperation { op: String, lattice: String },
    #[error("times does not distribute over plus at x={x}, y={y}, z={z}")]
    DistributivityViolation { x: String, y: String, z: String },
    #[error("law `{law}` fails at {witness}")]
    LawViolation { law: String, witness: String },
    #[error("value `{value}` is not in the carrier of lattice `{lattice}`")]
    InvalidValue { value: String, lattice: String },
    #[error("invalid lattice table: {0}")]
    InvalidLatticeTable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("relations are valued in different lattices (`{0}` vs `{1}`)")]
    LatticeMismatch(String, String),
    #[error("attribute `{0}` has different domains in the two operands")]
    DomainMismatch(String),
    #[error("attribute `{0}` occurs twice on the same side")]
    DuplicateAttribute(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("attribute `{0}` is not part of the extension target")]
    NotASuperset(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("relation has source attributes; a distribution was expected")]
    NotADistribution,
    #[error("relation is not an endo-relation: {0}")]
    NotEndoRelation(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("value `{value}` is not in the domain of attribute `{attribute}`")]
    UnknownDomainValue { attribute: String, value: String },
    #[error("tuple arity {got} does not match relation arity {expected}")]
    TupleArity { expected: usize, got: usize },

    #[error("diagram mixes lattices: {0}")]
    InconsistentLattice(String),
    #[error("vertex `{0}` has no Ω-object, or an object is attached to no vertex")]
    DanglingVertexObject(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("arrow `{arrow}` does not match its endpoints: {reason}")]
    ArrowSignature { arrow: String, reason: String },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("cone has no leg for vertex `{0}`")]
    LegMissing(String),
    #[error("cone leg for `{vertex}` is not total: {reason}")]
    InvalidLeg { vertex: String, reason: String },

    #[error("flavor plus is not idempotent ({0}); vague colimits need λ+λ=λ")]
    NonIdempotentPlus(String),
    #[error("relation is not reflexive at {0}")]
    NotReflexive(String),
    #[error("relation is not symmetric at {0}")]
    NotSymmetric(String),
    #[error("arrow `{arrow}` is not a crisp single-vertex map: {reason}")]
    NonCrispArrow { arrow: String, reason: String },

    #[error("neuron expects {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("neuron producing wire `{0}` is neither conjunctive nor disjunctive")]
    UnclassifiableNeuron(String),
    #[error("grid must contain at least one point in [0,1]")]
    EmptyGrid,
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("column mismatch: {0}")]
    ColumnMismatch(String),
    #[error("column mapping is not injective: `{0}` is used twice")]
    NotInjective(String),
    #[error("query is not a homomorphism at arrow `{arrow}`: {reason}")]
    NotAHomomorphism { arrow: String, reason: String },

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl AsRef<std::path::Path>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.as_ref().display().to_string(),
            line,
            message: message.into(),
        }
    }
}
