//! Problem definition: the JSON schema, validation, canonicalization, and
//! the content hash that binds results and caches to their inputs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::Engine;
use crate::groebner::{Completeness, GroebnerBasis};
use crate::monomial::{MonomialOrder, OrderKind};
use crate::parse::{parse_poly, ParseError};
use crate::poly::Poly;
use crate::polyvec::ChargeSpec;
use crate::quotient::{jacobian_generators, Basis, Quotient, QuotientError};

/// Raw problem document, one-to-one with the JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    pub potential: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charges: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomial_order: Option<OrderSpec>,
    pub max_level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSpec {
    /// One of `degrevlex`, `deglex`, `weighted-degrevlex`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precedence: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OptionsSpec {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skip_spanning_check: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<String>,
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("in field `{field}`: {source}")]
    BadExpression {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("variables must be nonempty, unique identifiers; `{offender}` violates this")]
    BadVariables { offender: String },
    #[error("charges has {got} entries for {want} variables")]
    ChargeLength { got: usize, want: usize },
    #[error("charge of variable {var} must be nonzero")]
    ZeroCharge { var: usize },
    #[error("potential must be charge-homogeneous of charge 0 under the given charges")]
    PotentialNotChargeZero,
    #[error("max_level must be at least 2, got {got}")]
    LevelTooSmall { got: usize },
    #[error("monomial-order precedence must be a permutation of 0..{n}")]
    BadPrecedence { n: usize },
    #[error("weighted order needs {n} positive weights")]
    BadWeights { n: usize },
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("cached basis does not match this problem's generators or order")]
    CacheMismatch,
}

/// How the quotient basis was obtained; recorded in result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisProvenance {
    Auto(Completeness),
    User,
}

impl BasisProvenance {
    pub fn label(self) -> &'static str {
        match self {
            BasisProvenance::Auto(Completeness::ZeroDimensional) => "auto-zero-dimensional",
            BasisProvenance::Auto(Completeness::Stabilized) => "auto-stabilized",
            BasisProvenance::Auto(Completeness::Exhaustive) => "auto-exhaustive",
            BasisProvenance::Auto(Completeness::PossiblyIncomplete) => "auto-incomplete",
            BasisProvenance::User => "user",
        }
    }
}

/// A fully validated problem, with everything parsed.
#[derive(Debug, Clone)]
pub struct Problem {
    pub variables: Vec<String>,
    pub potential: Poly,
    pub charges: Option<ChargeSpec>,
    pub user_basis: Option<Vec<Poly>>,
    pub order: MonomialOrder,
    pub max_level: usize,
    pub bound: u32,
    pub skip_spanning_check: bool,
    pub cache_dir: Option<String>,
}

/// Default enumeration bound when the problem file omits one.
pub const DEFAULT_BOUND: u32 = 12;

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Problem, ProblemError> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| ProblemError::Schema(e.to_string()))?;
        Problem::from_file(file)
    }

    pub fn from_file(file: ProblemFile) -> Result<Problem, ProblemError> {
        let n = file.variables.len();
        if n == 0 {
            return Err(ProblemError::BadVariables {
                offender: "<empty>".into(),
            });
        }
        for (i, v) in file.variables.iter().enumerate() {
            if !is_identifier(v) || file.variables[..i].contains(v) {
                return Err(ProblemError::BadVariables {
                    offender: v.clone(),
                });
            }
        }

        if file.max_level < 2 {
            return Err(ProblemError::LevelTooSmall {
                got: file.max_level,
            });
        }

        let potential = parse_poly(&file.potential, &file.variables).map_err(|e| {
            ProblemError::BadExpression {
                field: "potential".into(),
                source: e,
            }
        })?;

        let charges = match &file.charges {
            None => None,
            Some(list) => {
                if list.len() != n {
                    return Err(ProblemError::ChargeLength {
                        got: list.len(),
                        want: n,
                    });
                }
                let spec = ChargeSpec::new(list.clone()).map_err(|e| match e {
                    crate::polyvec::ChargeError::ZeroCharge { var } => {
                        ProblemError::ZeroCharge { var }
                    }
                    other => ProblemError::Schema(other.to_string()),
                })?;
                match spec.poly_charge(&potential) {
                    Ok(None) | Ok(Some(0)) => {}
                    _ => return Err(ProblemError::PotentialNotChargeZero),
                }
                Some(spec)
            }
        };

        let user_basis = match &file.basis {
            None => None,
            Some(list) => {
                let mut polys = Vec::with_capacity(list.len());
                for (i, src) in list.iter().enumerate() {
                    polys.push(parse_poly(src, &file.variables).map_err(|e| {
                        ProblemError::BadExpression {
                            field: format!("basis[{}]", i),
                            source: e,
                        }
                    })?);
                }
                Some(polys)
            }
        };

        let order = match &file.monomial_order {
            None => MonomialOrder::degrevlex(n),
            Some(spec) => {
                let kind = match (spec.kind.as_str(), &spec.weights) {
                    ("degrevlex", None) => OrderKind::Degrevlex,
                    ("deglex", None) => OrderKind::Deglex,
                    ("weighted-degrevlex", Some(weights)) => {
                        if weights.len() != n || weights.iter().any(|&w| w <= 0) {
                            return Err(ProblemError::BadWeights { n });
                        }
                        OrderKind::WeightedDegrevlex {
                            weights: weights.clone(),
                        }
                    }
                    ("weighted-degrevlex", None) => return Err(ProblemError::BadWeights { n }),
                    (other, _) => {
                        return Err(ProblemError::Schema(format!(
                        "unknown monomial order `{}` (weights only apply to weighted-degrevlex)",
                        other
                    )))
                    }
                };
                let precedence = match &spec.precedence {
                    None => (0..n).collect(),
                    Some(p) => {
                        let mut seen = vec![false; n];
                        if p.len() != n {
                            return Err(ProblemError::BadPrecedence { n });
                        }
                        for &i in p {
                            if i >= n || seen[i] {
                                return Err(ProblemError::BadPrecedence { n });
                            }
                            seen[i] = true;
                        }
                        p.clone()
                    }
                };
                MonomialOrder { kind, precedence }
            }
        };

        let (skip_spanning_check, cache_dir) = match &file.options {
            None => (false, None),
            Some(o) => (o.skip_spanning_check, o.cache_dir.clone()),
        };

        Ok(Problem {
            variables: file.variables,
            potential,
            charges,
            user_basis,
            order,
            max_level: file.max_level,
            bound: file.bounds.unwrap_or(DEFAULT_BOUND),
            skip_spanning_check,
            cache_dir,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    /// Fully explicit canonical form: expressions re-printed from their
    /// parsed values, the order and bound spelled out. Equal problems
    /// canonicalize identically. The cache directory is environment, not
    /// mathematics, and is excluded.
    pub fn canonical_file(&self) -> ProblemFile {
        ProblemFile {
            variables: self.variables.clone(),
            potential: self.potential.to_string_with(&self.variables),
            charges: self.charges.as_ref().map(|c| c.charges().to_vec()),
            basis: self.user_basis.as_ref().map(|polys| {
                polys
                    .iter()
                    .map(|p| p.to_string_with(&self.variables))
                    .collect()
            }),
            monomial_order: Some(match &self.order.kind {
                OrderKind::Degrevlex => OrderSpec {
                    kind: "degrevlex".into(),
                    weights: None,
                    precedence: Some(self.order.precedence.clone()),
                },
                OrderKind::Deglex => OrderSpec {
                    kind: "deglex".into(),
                    weights: None,
                    precedence: Some(self.order.precedence.clone()),
                },
                OrderKind::WeightedDegrevlex { weights } => OrderSpec {
                    kind: "weighted-degrevlex".into(),
                    weights: Some(weights.clone()),
                    precedence: Some(self.order.precedence.clone()),
                },
            }),
            max_level: self.max_level,
            bounds: Some(self.bound),
            options: if self.skip_spanning_check {
                Some(OptionsSpec {
                    skip_spanning_check: true,
                    cache_dir: None,
                })
            } else {
                None
            },
        }
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.canonical_file()).expect("canonical serialization")
    }

    /// Hex SHA-256 of the canonical form.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{:02x}", b)).collect()
    }

    /// Build the Groebner basis and quotient basis, returning the prepared
    /// engine and a record of how the basis was obtained.
    pub fn prepare(&self) -> Result<(Engine, BasisProvenance), ProblemError> {
        let gb = GroebnerBasis::new(jacobian_generators(&self.potential), self.order.clone());
        self.prepare_with_gb(gb)
    }

    /// Like [`Problem::prepare`], reusing a cached Groebner basis after
    /// checking it belongs to this problem.
    pub fn prepare_with_gb(
        &self,
        gb: GroebnerBasis,
    ) -> Result<(Engine, BasisProvenance), ProblemError> {
        if gb.generators() != jacobian_generators(&self.potential).as_slice()
            || gb.order() != &self.order
        {
            return Err(ProblemError::CacheMismatch);
        }
        let filter = self.charges.as_ref().map(|spec| (spec, 0));
        let (basis, provenance) = match &self.user_basis {
            None => {
                let (basis, completeness) = Basis::auto(&gb, filter, self.bound)?;
                (basis, BasisProvenance::Auto(completeness))
            }
            Some(reps) => {
                let basis = Basis::from_user(
                    &gb,
                    reps.clone(),
                    filter,
                    self.bound,
                    self.skip_spanning_check,
                )?;
                (basis, BasisProvenance::User)
            }
        };
        let quotient = Quotient {
            gb,
            basis,
            charges: self.charges.clone(),
        };
        Ok((Engine::new(self.potential.clone(), quotient), provenance))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_is_the_cusp_problem() {
        let p = Problem::from_json(r#"{"variables":["x"],"potential":"1/3*x^3","max_level":4}"#)
            .unwrap();
        assert_eq!(p.n_vars(), 1);
        assert_eq!(p.max_level, 4);
        assert!(p.charges.is_none());
        let (engine, prov) = p.prepare().unwrap();
        assert_eq!(engine.dim(), 2);
        assert_eq!(prov.label(), "auto-zero-dimensional");
    }

    #[test]
    fn dwork_document_round_trips() {
        let text = r#"{
            "variables": ["y", "z0", "z1", "z2"],
            "potential": "y*(z0^3+z1^3+z2^3)",
            "charges": [-3, 1, 1, 1],
            "max_level": 3,
            "bounds": 6
        }"#;
        let p = Problem::from_json(text).unwrap();
        let (engine, prov) = p.prepare().unwrap();
        assert_eq!(engine.dim(), 2);
        assert_eq!(prov.label(), "auto-stabilized");
        // Canonical form is stable under re-parsing.
        let p2 = Problem::from_json(&p.canonical_json()).unwrap();
        assert_eq!(p.canonical_json(), p2.canonical_json());
        assert_eq!(p.content_hash(), p2.content_hash());
    }

    #[test]
    fn charge_length_mismatch_is_rejected() {
        let text = r#"{
            "variables": ["y", "z0", "z1", "z2"],
            "potential": "y*(z0^3+z1^3+z2^3)",
            "charges": [-3, 1, 1],
            "max_level": 3
        }"#;
        assert!(matches!(
            Problem::from_json(text),
            Err(ProblemError::ChargeLength { got: 3, want: 4 })
        ));
    }

    #[test]
    fn inhomogeneous_potential_is_rejected() {
        let text = r#"{
            "variables": ["y", "z0"],
            "potential": "y*z0^3 + z0",
            "charges": [-3, 1],
            "max_level": 2
        }"#;
        assert!(matches!(
            Problem::from_json(text),
            Err(ProblemError::PotentialNotChargeZero)
        ));
    }

    #[test]
    fn schema_violations_are_reported() {
        assert!(matches!(
            Problem::from_json(r#"{"variables":["x"],"max_level":2}"#),
            Err(ProblemError::Schema(_))
        ));
        assert!(matches!(
            Problem::from_json(
                r#"{"variables":["x"],"potential":"x^2","max_level":2,"unknown_field":1}"#
            ),
            Err(ProblemError::Schema(_))
        ));
        assert!(matches!(
            Problem::from_json(r#"{"variables":["x"],"potential":"x^2","max_level":1}"#),
            Err(ProblemError::LevelTooSmall { got: 1 })
        ));
        assert!(matches!(
            Problem::from_json(r#"{"variables":["x","x"],"potential":"x^2","max_level":2}"#),
            Err(ProblemError::BadVariables { .. })
        ));
    }

    #[test]
    fn hash_distinguishes_problems_and_ignores_cache_dir() {
        let a = Problem::from_json(r#"{"variables":["x"],"potential":"1/3*x^3","max_level":4}"#)
            .unwrap();
        let b = Problem::from_json(r#"{"variables":["x"],"potential":"1/3*x^3","max_level":5}"#)
            .unwrap();
        assert_ne!(a.content_hash(), b.content_hash());
        let c = Problem::from_json(
            r#"{"variables":["x"],"potential":"1/3*x^3","max_level":4,
                "options":{"cache-dir":"/tmp/somewhere"}}"#,
        )
        .unwrap();
        assert_eq!(a.content_hash(), c.content_hash());
    }

    #[test]
    fn order_spec_is_validated() {
        let bad_prec = r#"{"variables":["x","y"],"potential":"x^2+y^2","max_level":2,
            "monomial_order":{"kind":"degrevlex","precedence":[0,0]}}"#;
        assert!(matches!(
            Problem::from_json(bad_prec),
            Err(ProblemError::BadPrecedence { n: 2 })
        ));
        let bad_weights = r#"{"variables":["x","y"],"potential":"x^2+y^2","max_level":2,
            "monomial_order":{"kind":"weighted-degrevlex","weights":[1]}}"#;
        assert!(matches!(
            Problem::from_json(bad_weights),
            Err(ProblemError::BadWeights { n: 2 })
        ));
        let ok = r#"{"variables":["x","y"],"potential":"x^2+y^2","max_level":2,
            "monomial_order":{"kind":"weighted-degrevlex","weights":[2,1],"precedence":[1,0]}}"#;
        assert!(Problem::from_json(ok).is_ok());
    }
}
