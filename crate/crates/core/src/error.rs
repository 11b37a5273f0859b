use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode registry must contain at least one mode")]
    EmptyRegistry,

    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("term has {got} occupations but the registry has {expected} modes")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("states live on different mode registries ({left} vs {right})")]
    RegistryMismatch { left: String, right: String },

    #[error("mode sets overlap on `{0}`")]
    OverlappingModes(String),

    #[error(
        "mode `{mode}` would hold {occupation} photons, above the per-mode cap of {cap}; raise the caps"
    )]
    OccupationOverflow { mode: String, occupation: u32, cap: u32 },

    #[error("a term would hold {total} photons, above the total cap of {cap}; raise the caps")]
    TotalOverflow { total: u32, cap: u32 },

    #[error("beam splitter reflectivity {0} outside [0, 1]")]
    InvalidReflectivity(f64),

    #[error("beam splitter needs two distinct modes, got `{0}` twice")]
    SameModeSplitter(String),

    #[error(
        "the end-beam-splitter pair u→(c+d)/√2, e→(c+i·d)/√2 has non-orthogonal images \
         (overlap {overlap:.4}) and is not unitary; use the symmetric convention"
    )]
    NonUnitaryConvention { overlap: f64 },

    #[error("coherent amplitude |q| = {0} must be below 1")]
    CoherentAmplitude(f64),

    #[error("missing 3-wave term `{0}` in the pre-splitter state")]
    MissingThreeWave(String),

    #[error("detection pattern is under-specified: {0} terms match with different unconstrained occupations")]
    UnderspecifiedPattern(usize),

    #[error("field is in the {found} basis, expected {expected}")]
    WrongBasis { expected: &'static str, found: &'static str },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("state graph: {0}")]
    Graph(String),

    #[error("resonant intermediate state on channel {path}: |E_i - E| = {gap:e}")]
    DegenerateDenominator { path: String, gap: f64 },

    #[error("effective coupling has an imaginary part {imag:e} (real part {real:e})")]
    ComplexCoupling { real: f64, imag: f64 },

    #[error("{0}")]
    NotResonant(String),
}
