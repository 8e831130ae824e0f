//! Problem-file schema and validation.
//!
//! A problem file is JSON: a sample space, named partition algebras
//! given by generator events, named measures (block weights on one
//! algebra, or raw atom weights), and a list of tasks. All numeric
//! weights are exact rationals written as strings, `"3/16"` or `"2"`;
//! floating-point notation is rejected so nothing silently rounds.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use indep_core::extension::FactorMeasure;
use indep_core::signed::SignedMeasure;
use indep_core::space::{FiniteSpace, SigmaAlgebra};

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("could not parse problem file")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ProblemError {
    ProblemError::Invalid { path: path.into(), message: message.into() }
}

/// Parses `"3/16"`, `"-2/3"`, or `"5"` into an exact rational.
/// Decimal notation and zero denominators are rejected.
pub fn parse_rational(text: &str, path: &str) -> Result<BigRational, ProblemError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(invalid(path, "empty rational; write a fraction like \"3/16\""));
    }
    if t.contains('.') {
        return Err(invalid(
            path,
            format!("\"{t}\" uses decimal notation; write an exact fraction like \"3/16\""),
        ));
    }
    let mut pieces = t.splitn(2, '/');
    let numer_text = pieces.next().expect("splitn yields at least one piece");
    let numer = BigInt::from_str(numer_text.trim())
        .map_err(|_| invalid(path, format!("\"{numer_text}\" is not an integer numerator")))?;
    let denom = match pieces.next() {
        None => BigInt::from(1),
        Some(d) => {
            let denom = BigInt::from_str(d.trim())
                .map_err(|_| invalid(path, format!("\"{d}\" is not an integer denominator")))?;
            if denom.is_zero() {
                return Err(invalid(path, format!("\"{t}\" has a zero denominator")));
            }
            denom
        }
    };
    Ok(BigRational::new(numer, denom))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub algebras: BTreeMap<String, AlgebraSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measures: BTreeMap<String, MeasureSpec>,
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub atoms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    /// Each generator is an event given by its atom labels; the algebra
    /// is the partition they generate together.
    pub generators: Vec<Vec<String>>,
}

/// Either block weights on one named algebra, or raw atom weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    Logical,
    Sigma,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorRef {
    pub algebra: String,
    pub measure: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleSpec {
    /// Coordinate variances all equal `value`.
    Constant { value: String },
    /// Coordinate `n` has variance `slope * n`.
    Linear { slope: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Logical (or sigma, or definition-literal brute force)
    /// independence of named algebras; with `under`, probabilistic
    /// independence under a named measure instead.
    CheckIndependence {
        algebras: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<CheckMode>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        under: Option<String>,
    },
    /// Build the measure with the given factor marginals and report its
    /// join cells.
    Extend { factors: Vec<FactorRef> },
    /// Check additivity of the extension over a disjoint cylinder
    /// decomposition. Each part maps algebra names to member events.
    VerifyAdditivity {
        factors: Vec<FactorRef>,
        parts: Vec<BTreeMap<String, Vec<String>>>,
    },
    /// Jordan decomposition of a signed measure.
    Jordan { measure: String },
    /// Independence of the algebras under both Jordan parts of a signed
    /// measure.
    SignedIndependence { algebras: Vec<String>, measure: String },
    /// Independence under every one of a list of probability measures.
    UniformIndependence { algebras: Vec<String>, measures: Vec<String> },
    /// Running centered mean of an identically distributed sequence.
    Lln {
        support: Vec<String>,
        probs: Vec<String>,
        n: u64,
        seed: u64,
    },
    /// Standardized replication sums against the normal curve. The
    /// Lindeberg gate (`epsilon` with `threshold`) is optional for
    /// identical coordinates.
    Clt {
        support: Vec<String>,
        probs: Vec<String>,
        n: u64,
        replications: u64,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        threshold: Option<String>,
    },
    /// Normalized running maximum along the iterated-logarithm scale.
    Lil {
        support: Vec<String>,
        probs: Vec<String>,
        n: u64,
        seed: u64,
    },
    /// The exact Lindeberg sum at length `n`.
    Lindeberg {
        support: Vec<String>,
        probs: Vec<String>,
        n: u64,
        epsilon: String,
    },
    /// Convergence of `sum variance(n)/n^2` for a declared variance rule.
    Kolmogorov { rule: RuleSpec, prefix: u64 },
}

impl TaskSpec {
    /// Kebab-case tag, as written in the problem file.
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::CheckIndependence { .. } => "check-independence",
            TaskSpec::Extend { .. } => "extend",
            TaskSpec::VerifyAdditivity { .. } => "verify-additivity",
            TaskSpec::Jordan { .. } => "jordan",
            TaskSpec::SignedIndependence { .. } => "signed-independence",
            TaskSpec::UniformIndependence { .. } => "uniform-independence",
            TaskSpec::Lln { .. } => "lln",
            TaskSpec::Clt { .. } => "clt",
            TaskSpec::Lil { .. } => "lil",
            TaskSpec::Lindeberg { .. } => "lindeberg",
            TaskSpec::Kolmogorov { .. } => "kolmogorov",
        }
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile, ProblemError> {
        let file: ProblemFile = serde_json::from_str(text)?;
        if file.version != 1 {
            return Err(invalid("version", format!("unsupported version {}", file.version)));
        }
        Ok(file)
    }
}

/// A measure definition resolved against the space and algebras.
#[derive(Debug, Clone)]
pub enum ResolvedMeasure {
    /// Block weights on a named algebra: `(algebra name, measure)`.
    Factor(String, FactorMeasure),
    /// Raw atom weights, possibly signed.
    Atoms(SignedMeasure),
}

/// The declarations of a problem file, constructed and cross-checked.
#[derive(Debug, Clone)]
pub struct Context {
    pub space: Option<FiniteSpace>,
    pub algebras: BTreeMap<String, SigmaAlgebra>,
    pub measures: BTreeMap<String, ResolvedMeasure>,
}

impl Context {
    pub fn build(file: &ProblemFile) -> Result<Context, ProblemError> {
        let space = match &file.space {
            None => {
                if let Some(name) = file.algebras.keys().next() {
                    return Err(invalid(
                        format!("algebras.{name}"),
                        "a space is required to define algebras",
                    ));
                }
                if let Some(name) = file.measures.keys().next() {
                    return Err(invalid(
                        format!("measures.{name}"),
                        "a space is required to define measures",
                    ));
                }
                None
            }
            Some(spec) => Some(
                FiniteSpace::new(spec.atoms.iter().cloned())
                    .map_err(|e| invalid("space.atoms", e.to_string()))?,
            ),
        };

        let mut algebras = BTreeMap::new();
        for (name, spec) in &file.algebras {
            let space = space.as_ref().expect("checked above");
            let path = format!("algebras.{name}");
            let mut generators = Vec::with_capacity(spec.generators.len());
            for (gi, labels) in spec.generators.iter().enumerate() {
                let event = space
                    .event_from_labels(labels.iter().map(String::as_str))
                    .map_err(|e| invalid(format!("{path}.generators[{gi}]"), e.to_string()))?;
                generators.push(event);
            }
            let algebra = SigmaAlgebra::generated_by(space, &generators)
                .map_err(|e| invalid(&path, e.to_string()))?;
            algebras.insert(name.clone(), algebra);
        }

        let mut measures = BTreeMap::new();
        for (name, spec) in &file.measures {
            let space = space.as_ref().expect("checked above");
            let path = format!("measures.{name}");
            let resolved = match (&spec.blocks, &spec.atoms) {
                (Some(_), Some(_)) => {
                    return Err(invalid(&path, "give either blocks or atoms, not both"))
                }
                (None, None) => {
                    return Err(invalid(&path, "give either blocks or atoms"))
                }
                (Some(blocks), None) => {
                    let algebra_name = spec.algebra.as_ref().ok_or_else(|| {
                        invalid(&path, "block weights need an algebra field")
                    })?;
                    let algebra = algebras.get(algebra_name).ok_or_else(|| {
                        invalid(format!("{path}.algebra"), format!("unknown algebra \"{algebra_name}\""))
                    })?;
                    let mut probs = Vec::with_capacity(blocks.len());
                    for (i, text) in blocks.iter().enumerate() {
                        probs.push(parse_rational(text, &format!("{path}.blocks[{i}]"))?);
                    }
                    let factor = FactorMeasure::new(algebra.clone(), probs)
                        .map_err(|e| invalid(format!("{path}.blocks"), e.to_string()))?;
                    ResolvedMeasure::Factor(algebra_name.clone(), factor)
                }
                (None, Some(atoms)) => {
                    if spec.algebra.is_some() {
                        return Err(invalid(
                            format!("{path}.algebra"),
                            "atom weights do not take an algebra field",
                        ));
                    }
                    let mut weights = Vec::with_capacity(atoms.len());
                    for (i, text) in atoms.iter().enumerate() {
                        weights.push(parse_rational(text, &format!("{path}.atoms[{i}]"))?);
                    }
                    let signed = SignedMeasure::new(space.clone(), weights)
                        .map_err(|e| invalid(format!("{path}.atoms"), e.to_string()))?;
                    ResolvedMeasure::Atoms(signed)
                }
            };
            measures.insert(name.clone(), resolved);
        }

        Ok(Context { space, algebras, measures })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use indep_core::ratio;

    #[test]
    fn rationals_parse_exactly() {
        assert_eq!(parse_rational("3/16", "t").unwrap(), ratio(3, 16));
        assert_eq!(parse_rational("-2/3", "t").unwrap(), ratio(-2, 3));
        assert_eq!(parse_rational(" 5 ", "t").unwrap(), ratio(5, 1));
        assert_eq!(parse_rational("4/6", "t").unwrap(), ratio(2, 3));
        assert_eq!(parse_rational("1/-2", "t").unwrap(), ratio(-1, 2));
    }

    #[test]
    fn bad_rationals_are_rejected_with_the_path() {
        for bad in ["", "1/0", "0.5", "a/b", "1/2/3", "--3"] {
            let err = parse_rational(bad, "measures.p.atoms[0]").unwrap_err();
            let text = err.to_string();
            assert!(
                text.starts_with("measures.p.atoms[0]:"),
                "missing path in: {text}"
            );
        }
    }

    #[test]
    fn problem_files_round_trip() {
        let file = ProblemFile {
            version: 1,
            space: Some(SpaceSpec {
                atoms: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            }),
            algebras: BTreeMap::from([(
                "rows".to_string(),
                AlgebraSpec { generators: vec![vec!["a".into(), "b".into()]] },
            )]),
            measures: BTreeMap::from([(
                "p".to_string(),
                MeasureSpec {
                    algebra: Some("rows".into()),
                    blocks: Some(vec!["1/4".into(), "3/4".into()]),
                    atoms: None,
                },
            )]),
            tasks: vec![
                TaskSpec::CheckIndependence {
                    algebras: vec!["rows".into()],
                    mode: Some(CheckMode::BruteForce),
                    under: None,
                },
                TaskSpec::Kolmogorov {
                    rule: RuleSpec::Constant { value: "1".into() },
                    prefix: 100,
                },
            ],
        };
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back = ProblemFile::from_json(&text).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn unknown_fields_and_versions_are_rejected() {
        assert!(ProblemFile::from_json(r#"{"version": 1, "tasks": [], "surprise": 3}"#).is_err());
        assert!(ProblemFile::from_json(r#"{"version": 2, "tasks": []}"#).is_err());
        let bad_task = r#"{"version": 1, "tasks": [{"task": "frobnicate"}]}"#;
        assert!(ProblemFile::from_json(bad_task).is_err());
    }

    #[test]
    fn context_cross_checks_declarations() {
        let text = r#"{
            "version": 1,
            "space": {"atoms": ["a", "b", "c", "d"]},
            "algebras": {"rows": {"generators": [["a", "b"]]}},
            "measures": {
                "p": {"algebra": "rows", "blocks": ["1/4", "3/4"]},
                "q": {"atoms": ["1/4", "1/4", "1/4", "1/4"]}
            },
            "tasks": []
        }"#;
        let file = ProblemFile::from_json(text).unwrap();
        let ctx = Context::build(&file).unwrap();
        assert_eq!(ctx.space.as_ref().unwrap().atom_count(), 4);
        assert_eq!(ctx.algebras["rows"].block_count(), 2);
        assert!(matches!(ctx.measures["p"], ResolvedMeasure::Factor(..)));
        assert!(matches!(ctx.measures["q"], ResolvedMeasure::Atoms(..)));

        let no_space = r#"{"version": 1, "algebras": {"x": {"generators": []}}, "tasks": []}"#;
        let file = ProblemFile::from_json(no_space).unwrap();
        let err = Context::build(&file).unwrap_err().to_string();
        assert!(err.contains("space is required"), "got: {err}");

        let both = r#"{
            "version": 1,
            "space": {"atoms": ["a", "b"]},
            "measures": {"m": {"atoms": ["1", "0"], "blocks": ["1"], "algebra": "x"}},
            "tasks": []
        }"#;
        let file = ProblemFile::from_json(both).unwrap();
        let err = Context::build(&file).unwrap_err().to_string();
        assert!(err.contains("not both"), "got: {err}");

        let wrong_count = r#"{
            "version": 1,
            "space": {"atoms": ["a", "b"]},
            "measures": {"m": {"atoms": ["1"]}},
            "tasks": []
        }"#;
        let file = ProblemFile::from_json(wrong_count).unwrap();
        assert!(Context::build(&file).is_err());
    }
}
