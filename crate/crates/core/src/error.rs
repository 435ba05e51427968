use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvError {
    #[error("operator has non-finite entries")]
    NonFinite,
    #[error("NotSymmetric: symmetry defect {defect:e}")]
    NotSymmetric { defect: f64 },
    #[error("BianchiViolation: Bianchi defect {defect:e}")]
    BianchiViolation { defect: f64 },
    #[error("InvalidBlocks: Weyl traces {trace_plus:e}, {trace_minus:e} are not zero")]
    InvalidBlocks { trace_plus: f64, trace_minus: f64 },
    #[error("NotEinstein: traceless Ricci block has norm {norm:e}")]
    NotEinstein { norm: f64 },
    #[error("IndefiniteSign: equality classification needs semi-definite sectional curvature")]
    IndefiniteSign,
    #[error("NotKahler: |W+|^2 - s^2/24 = {residual:e}")]
    NotKahler { residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("UnknownModel: {0}")]
    UnknownModel(String),
    #[error("UnknownChart: {0}")]
    UnknownChart(String),
    #[error("BadParameter: {name}: {reason}")]
    BadParameter { name: String, reason: String },
    #[error(transparent)]
    Curv(#[from] CurvError),
    #[error(transparent)]
    SecSign(#[from] SecSignError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SecSignError {
    #[error("NotAdmissible: {0}")]
    NotAdmissible(#[from] CurvError),
    #[error("DegeneratePlane: Gram determinant {gram:e}")]
    DegeneratePlane { gram: f64 },
    #[error("NotUnit: input norms {plus}, {minus}")]
    NotUnit { plus: f64, minus: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("PointOutsideDomain: coordinate {axis} = {value} not in ({lo}, {hi})")]
    OutsideDomain { axis: usize, value: f64, lo: f64, hi: f64 },
    #[error("StepTooLarge: step {step} leaves margin {margin} < {required} on axis {axis}")]
    StepTooLarge {
        axis: usize,
        step: f64,
        margin: f64,
        required: f64,
    },
    #[error("SingularMetric: metric not positive definite at {point:?}")]
    SingularMetric { point: [f64; 4] },
    #[error("BadSteps: {0}")]
    BadSteps(String),
    #[error("BadInterval: [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
    #[error("TooFewNodes: {nodes} < 16")]
    TooFewNodes { nodes: usize },
    #[error("NonConvergent: {quantity} changed by {change:e} under node doubling")]
    NonConvergent { quantity: &'static str, change: f64 },
    #[error(transparent)]
    Curv(#[from] CurvError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("BadInput: {0}")]
    BadInput(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PageError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    SecSign(#[from] SecSignError),
}

impl From<CurvError> for PageError {
    fn from(e: CurvError) -> Self {
        PageError::Geom(GeomError::Curv(e))
    }
}

/// Umbrella error for front ends.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Curv(#[from] CurvError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    SecSign(#[from] SecSignError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Page(#[from] PageError),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Geom(GeomError::SingularMetric { .. } | GeomError::NonConvergent { .. })
                | Error::Page(PageError::Geom(
                    GeomError::SingularMetric { .. } | GeomError::NonConvergent { .. }
                ))
        )
    }
}
