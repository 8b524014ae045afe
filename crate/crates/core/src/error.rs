use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the economic models, the sensitivity engine and the
/// scenario readers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a domain constraint. `field` names the offending
    /// input using the schema spelling (e.g. `p_success`).
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    /// A ratio was requested whose denominator is zero.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// The closed-form solve has a zero coefficient on the unknown.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// A root exists but lies outside the admissible domain.
    #[error("solution {value} outside domain {domain}")]
    OutOfDomain { value: f64, domain: String },

    /// A derivative was requested at a point where the model is singular.
    #[error("singular point: {0}")]
    Singular(String),

    /// The model output has zero variance over the sampled box.
    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    /// The model produced NaN or an infinity at a sample row.
    #[error("non-finite model output {value} at sample row {row:?}")]
    NonFiniteOutput { row: Vec<f64>, value: f64 },

    /// An evaluator failed at a finite-difference probe.
    #[error("evaluator failed at probe {probe:?}: {message}")]
    Evaluator { probe: Vec<f64>, message: String },

    /// A scenario or spec document could not be parsed.
    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// The offending field, when the error is tied to one.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::Validation { field, .. } => Some(field),
            Error::Parse { path, .. } if !path.is_empty() => Some(path),
            _ => None,
        }
    }

    /// Prefix the field path with a parent location, e.g. `scenarios[1]`.
    pub fn at(self, parent: &str) -> Self {
        match self {
            Error::Validation { field, message } => Error::Validation {
                field: join_path(parent, &field),
                message,
            },
            other => other,
        }
    }

    /// Stable machine-readable code used by the service error envelope.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Validation { .. } => "validation_error",
            Error::DivisionByZero(_) => "division_by_zero",
            Error::NoSolution(_) => "no_solution",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::Singular(_) => "singular_point",
            Error::DegenerateModel(_) => "degenerate_model",
            Error::NonFiniteOutput { .. } => "non_finite_output",
            Error::Evaluator { .. } => "evaluator_failure",
            Error::Parse { .. } => "parse_error",
        }
    }

    /// True for errors caused by malformed or out-of-range input, as opposed
    /// to a well-formed request the engine cannot answer.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Parse { .. })
    }
}

fn join_path(parent: &str, child: &str) -> String {
    if parent.is_empty() {
        child.to_string()
    } else if child.is_empty() {
        parent.to_string()
    } else if child.starts_with('[') {
        format!("{parent}{child}")
    } else {
        format!("{parent}.{child}")
    }
}

pub(crate) fn check_finite(field: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::validation(field, format!("must be finite, got {value}")))
    }
}

pub(crate) fn check_nonneg(field: &str, value: f64) -> Result<f64> {
    check_finite(field, value)?;
    if value < 0.0 {
        return Err(Error::validation(field, format!("must be >= 0, got {value}")));
    }
    Ok(value)
}

pub(crate) fn check_positive(field: &str, value: f64) -> Result<f64> {
    check_finite(field, value)?;
    if value <= 0.0 {
        return Err(Error::validation(field, format!("must be > 0, got {value}")));
    }
    Ok(value)
}

pub(crate) fn check_probability(field: &str, value: f64) -> Result<f64> {
    check_finite(field, value)?;
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::validation(
            field,
            format!("must be a probability in [0, 1], got {value}"),
        ));
    }
    Ok(value)
}
