//! Model descriptions: which correlation structure, which symmetry class,
//! which dimension, and which expectation matrix.

use ndarray::Array2;

use crate::io::{read_matrix, MatrixData};
use crate::{EnsembleError, Result};

/// Symmetry class of the sampled matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    RealSymmetric,
    ComplexHermitian,
}

/// Where the expectation matrix comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ASpec {
    Zero,
    Diag(Vec<f64>),
    Dense(Array2<f64>),
    File(std::path::PathBuf),
}

/// The correlation structure of the noise part.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// Independent entries up to symmetry; off-diagonal variance 1,
    /// diagonal variance 2 (real case).
    Wigner,
    /// Wigner noise around a configured expectation matrix.
    Deformed,
    /// Moving-average Gaussian field on the [N]² torus with kernel
    /// (1+|x|)^{−(s+2)/2}, symmetrized.
    GaussianMetricDecay { s: f64 },
    /// n×n blocks all carrying one symmetric M×M Gaussian matrix with
    /// unit-variance entries (M = N/n).
    BlockCopy { n_blocks: usize },
    /// Independent entries up to the symmetries w_{a,b} = w_{b,a} =
    /// w_{−a,−b} = w_{−b,−a} with indices mod N.
    Fourfold,
    /// Explicit two-point tensor κ(α, β) on I = [N]², row-major flattened
    /// α = a·N + b. Real symmetry only.
    Custom { kappa: Array2<f64> },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Wigner => "wigner",
            ModelKind::Deformed => "deformed",
            ModelKind::GaussianMetricDecay { .. } => "gaussian_metric_decay",
            ModelKind::BlockCopy { .. } => "block_copy",
            ModelKind::Fourfold => "fourfold",
            ModelKind::Custom { .. } => "custom",
        }
    }
}

/// A fully specified ensemble: `H = A + W/√N`.
#[derive(Debug, Clone)]
pub struct CorrelationModel {
    kind: ModelKind,
    symmetry: Symmetry,
    n: usize,
    a_spec: ASpec,
    a_bound: Option<f64>,
}

impl CorrelationModel {
    pub fn new(kind: ModelKind, symmetry: Symmetry, n: usize) -> Result<Self> {
        Self::with_expectation(kind, symmetry, n, ASpec::Zero, None)
    }

    pub fn with_expectation(
        kind: ModelKind,
        symmetry: Symmetry,
        n: usize,
        a_spec: ASpec,
        a_bound: Option<f64>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(EnsembleError::InvalidArgument(format!(
                "dimension must be at least 2, got {n}"
            )));
        }
        match &kind {
            ModelKind::BlockCopy { n_blocks } => {
                if *n_blocks == 0 || n % n_blocks != 0 {
                    return Err(EnsembleError::InvalidArgument(format!(
                        "block count {n_blocks} must divide the dimension {n}"
                    )));
                }
            }
            ModelKind::Fourfold => {
                if symmetry == Symmetry::ComplexHermitian {
                    return Err(EnsembleError::InvalidArgument(
                        "the fourfold symmetry w_ab = w_ba forces real entries; \
                         complex Hermitian is not available"
                            .into(),
                    ));
                }
            }
            ModelKind::GaussianMetricDecay { s } => {
                if !s.is_finite() || *s <= 0.0 {
                    return Err(EnsembleError::InvalidArgument(format!(
                        "decay exponent must be positive and finite, got {s}"
                    )));
                }
            }
            ModelKind::Custom { kappa } => {
                if symmetry == Symmetry::ComplexHermitian {
                    return Err(EnsembleError::Unsupported(
                        "custom two-point tensors are real-symmetric only".into(),
                    ));
                }
                validate_custom_tensor(kappa, n)?;
            }
            ModelKind::Wigner | ModelKind::Deformed => {}
        }
        if !matches!(a_spec, ASpec::Zero) && !matches!(kind, ModelKind::Deformed) {
            return Err(EnsembleError::InvalidArgument(format!(
                "an expectation matrix is only configurable for the deformed kind, not {}",
                kind.name()
            )));
        }
        Ok(Self {
            kind,
            symmetry,
            n,
            a_spec,
            a_bound,
        })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_spec(&self) -> &ASpec {
        &self.a_spec
    }

    pub fn a_bound(&self) -> Option<f64> {
        self.a_bound
    }

    /// Parses the JSON model configuration
    /// `{"kind", "N", "symmetry", "params", "A", "a_bound"}`,
    /// rejecting unknown keys.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| EnsembleError::Parse(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| EnsembleError::Parse("model config must be a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(
                key.as_str(),
                "kind" | "N" | "symmetry" | "params" | "A" | "a_bound"
            ) {
                return Err(EnsembleError::Parse(format!(
                    "unknown model config key {key:?}"
                )));
            }
        }
        let kind_name = obj
            .get("kind")
            .and_then(|v| v.as_str())
            .ok_or_else(|| EnsembleError::Parse("missing string field \"kind\"".into()))?;
        let n = obj
            .get("N")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| EnsembleError::Parse("missing integer field \"N\"".into()))?
            as usize;
        let symmetry = match obj.get("symmetry").and_then(|v| v.as_str()) {
            Some("real") | None => Symmetry::RealSymmetric,
            Some("complex") => Symmetry::ComplexHermitian,
            Some(other) => {
                return Err(EnsembleError::Parse(format!(
                    "symmetry must be \"real\" or \"complex\", got {other:?}"
                )))
            }
        };
        let params = obj.get("params").cloned().unwrap_or(serde_json::json!({}));
        let params = params
            .as_object()
            .ok_or_else(|| EnsembleError::Parse("\"params\" must be an object".into()))?
            .clone();
        let check_params = |allowed: &[&str]| -> Result<()> {
            for key in params.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(EnsembleError::Parse(format!(
                        "unknown params key {key:?} for kind {kind_name:?}"
                    )));
                }
            }
            Ok(())
        };
        let kind = match kind_name {
            "wigner" => {
                check_params(&[])?;
                ModelKind::Wigner
            }
            "deformed" => {
                check_params(&[])?;
                ModelKind::Deformed
            }
            "fourfold" => {
                check_params(&[])?;
                ModelKind::Fourfold
            }
            "gaussian_metric_decay" => {
                check_params(&["s"])?;
                let s = params
                    .get("s")
                    .and_then(|v| v.as_f64())
                    .ok_or_else(|| EnsembleError::Parse("metric decay needs params.s".into()))?;
                ModelKind::GaussianMetricDecay { s }
            }
            "block_copy" => {
                check_params(&["n_blocks"])?;
                let n_blocks = params
                    .get("n_blocks")
                    .and_then(|v| v.as_u64())
                    .ok_or_else(|| {
                        EnsembleError::Parse("block_copy needs integer params.n_blocks".into())
                    })? as usize;
                ModelKind::BlockCopy { n_blocks }
            }
            "custom" => {
                check_params(&["kappa"])?;
                let rows = params
                    .get("kappa")
                    .and_then(|v| v.as_array())
                    .ok_or_else(|| {
                        EnsembleError::Parse("custom needs params.kappa as a 2-D array".into())
                    })?;
                let dim = n * n;
                if rows.len() != dim {
                    return Err(EnsembleError::Parse(format!(
                        "kappa must have N² = {dim} rows, got {}",
                        rows.len()
                    )));
                }
                let mut kappa = Array2::zeros((dim, dim));
                for (i, row) in rows.iter().enumerate() {
                    let row = row.as_array().ok_or_else(|| {
                        EnsembleError::Parse("kappa rows must be arrays".into())
                    })?;
                    if row.len() != dim {
                        return Err(EnsembleError::Parse(format!(
                            "kappa row {i} has {} entries, expected {dim}",
                            row.len()
                        )));
                    }
                    for (j, v) in row.iter().enumerate() {
                        kappa[(i, j)] = v.as_f64().ok_or_else(|| {
                            EnsembleError::Parse("kappa entries must be numbers".into())
                        })?;
                    }
                }
                ModelKind::Custom { kappa }
            }
            other => {
                return Err(EnsembleError::Parse(format!(
                    "unknown model kind {other:?}"
                )))
            }
        };
        let a_spec = match obj.get("A") {
            None | Some(serde_json::Value::Null) => ASpec::Zero,
            Some(serde_json::Value::String(s)) => parse_a_spec(s)?,
            Some(other) => {
                return Err(EnsembleError::Parse(format!(
                    "\"A\" must be null or a string, got {other}"
                )))
            }
        };
        let a_bound = match obj.get("a_bound") {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => Some(v.as_f64().ok_or_else(|| {
                EnsembleError::Parse("\"a_bound\" must be a number".into())
            })?),
        };
        Self::with_expectation(kind, symmetry, n, a_spec, a_bound)
    }
}

fn parse_a_spec(text: &str) -> Result<ASpec> {
    if let Some(rest) = text.strip_prefix("diag:") {
        let entries: Vec<f64> = serde_json::from_str(rest)
            .map_err(|e| EnsembleError::Parse(format!("bad diag spec: {e}")))?;
        Ok(ASpec::Diag(entries))
    } else if let Some(rest) = text.strip_prefix("file:") {
        Ok(ASpec::File(rest.into()))
    } else {
        Err(EnsembleError::Parse(format!(
            "\"A\" must start with \"diag:\" or \"file:\", got {text:?}"
        )))
    }
}

fn validate_custom_tensor(kappa: &Array2<f64>, n: usize) -> Result<()> {
    let dim = n * n;
    if kappa.shape() != [dim, dim] {
        return Err(EnsembleError::InvalidArgument(format!(
            "custom tensor must be {dim}×{dim}, got {:?}",
            kappa.shape()
        )));
    }
    // Symmetry in its two arguments.
    for i in 0..dim {
        for j in (i + 1)..dim {
            if (kappa[(i, j)] - kappa[(j, i)]).abs() > 1e-12 {
                return Err(EnsembleError::InvalidArgument(format!(
                    "custom tensor must satisfy κ(α,β) = κ(β,α); mismatch at ({i},{j})"
                )));
            }
        }
    }
    // Consistency with pointwise symmetry w_ab = w_ba: transposing either
    // label must not change the value.
    for a in 0..n {
        for b in 0..n {
            let alpha = a * n + b;
            let alpha_t = b * n + a;
            for beta in 0..dim {
                if (kappa[(alpha, beta)] - kappa[(alpha_t, beta)]).abs() > 1e-12 {
                    return Err(EnsembleError::InvalidArgument(format!(
                        "custom tensor must respect the symmetry κ((a,b),β) = κ((b,a),β); \
                         mismatch at α = ({a},{b})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The expectation matrix `A = E H` of the model: the configured matrix for
/// deformed models, zero otherwise.
pub fn expectation_matrix(model: &CorrelationModel) -> Result<Array2<f64>> {
    let n = model.n();
    match model.a_spec() {
        ASpec::Zero => Ok(Array2::zeros((n, n))),
        ASpec::Diag(entries) => {
            if entries.len() != n {
                return Err(EnsembleError::InvalidArgument(format!(
                    "diagonal spec has {} entries, model dimension is {n}",
                    entries.len()
                )));
            }
            Ok(Array2::from_diag(&ndarray::Array1::from(entries.clone())))
        }
        ASpec::Dense(a) => {
            if a.shape() != [n, n] {
                return Err(EnsembleError::InvalidArgument(format!(
                    "dense expectation matrix is {:?}, model dimension is {n}",
                    a.shape()
                )));
            }
            Ok(a.clone())
        }
        ASpec::File(path) => match read_matrix(path)? {
            MatrixData::Real(a) => {
                if a.shape() != [n, n] {
                    return Err(EnsembleError::InvalidArgument(format!(
                        "matrix file {} is {:?}, model dimension is {n}",
                        path.display(),
                        a.shape()
                    )));
                }
                Ok(a)
            }
            MatrixData::Complex(_) => Err(EnsembleError::InvalidArgument(format!(
                "matrix file {} is complex; the expectation matrix must be real",
                path.display()
            ))),
        },
    }
}

/// Checks the configured expectation matrix against the declared norm bound,
/// returning a warning message when it is exceeded (never an error).
pub fn a_norm_warning(model: &CorrelationModel) -> Result<Option<String>> {
    let Some(bound) = model.a_bound() else {
        return Ok(None);
    };
    let a = expectation_matrix(model)?;
    let norm = numerics::op_norm_real(&a)?;
    if norm > bound {
        Ok(Some(format!(
            "expectation matrix norm {norm:.6} exceeds the declared bound {bound:.6}"
        )))
    } else {
        Ok(None)
    }
}

/// Two-point covariance data for one label pair: a scalar for real models,
/// the 2×2 real block over (Re, Im) coordinates for complex ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoPointBlock {
    Real(f64),
    Complex([[f64; 2]; 2]),
}

impl TwoPointBlock {
    /// The scalar value; for complex blocks, the (Re,Re) entry plus the
    /// (Im,Im) entry, which is `E[w_α conj(w_β)]` when α, β are off-diagonal.
    pub fn scalar(&self) -> f64 {
        match self {
            TwoPointBlock::Real(v) => *v,
            TwoPointBlock::Complex(b) => b[0][0] + b[1][1],
        }
    }
}
