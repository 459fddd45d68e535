//! Canonical result and cache documents.
//!
//! Result files carry the full canonical problem plus every coefficient
//! table, so verification never needs the original input file. All maps are
//! ordered and every expression is printed canonically, making output files
//! byte-stable for golden tests. The problem hash binds a result to its
//! input; the tables themselves are re-checked by the verifier, not the
//! hash.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{CoeffTable, FlatFStructure};
use crate::groebner::GroebnerBasis;
use crate::monomial::MonomialOrder;
use crate::multi_index::MultiIndex;
use crate::parse::parse_poly;
use crate::poly::Rat;
use crate::polyvec::parse_polyvector;
use crate::problem::{BasisProvenance, Problem, ProblemError, ProblemFile};

pub const RESULT_FORMAT: &str = "flatf-result/1";
pub const GB_CACHE_FORMAT: &str = "flatf-gbcache/1";

#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unsupported format tag `{0}`")]
    UnsupportedFormat(String),
    #[error("problem hash mismatch: stored {stored}, recomputed {computed}")]
    HashMismatch { stored: String, computed: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("bad table key `{0}`")]
    BadKey(String),
    #[error("bad rational `{0}`")]
    BadRational(String),
    #[error("bad expression in result tables: {0}")]
    BadExpression(String),
    #[error("cache failed the reconstruction identity")]
    CacheReconstruction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub format: String,
    pub problem_hash: String,
    pub problem: ProblemFile,
    pub dim: usize,
    pub basis: Vec<String>,
    pub identity_index: Option<usize>,
    pub basis_mode: String,
    pub max_level: usize,
    /// Multiset key "i,j,..." -> canonical polynomial string.
    pub u_table: BTreeMap<String, String>,
    /// Multiset key -> one rational string per basis index.
    pub a_table: BTreeMap<String, Vec<String>>,
    /// Key "pair|tail" (each a comma list) -> canonical polyvector string.
    pub lambda_table: BTreeMap<String, String>,
}

impl ResultFile {
    pub fn from_structure(
        problem: &Problem,
        provenance: BasisProvenance,
        structure: &FlatFStructure,
    ) -> ResultFile {
        let vars = &problem.variables;
        let u_table = structure
            .table
            .u
            .iter()
            .map(|(k, p)| (k.to_string(), p.to_string_with(vars)))
            .collect();
        let a_table = structure
            .table
            .a
            .iter()
            .map(|(k, row)| {
                (
                    k.to_string(),
                    row.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                )
            })
            .collect();
        let lambda_table = structure
            .table
            .lambda
            .iter()
            .map(|((pair, tail), pv)| (format!("{}|{}", pair, tail), pv.to_string_with(vars)))
            .collect();
        ResultFile {
            format: RESULT_FORMAT.to_string(),
            problem_hash: problem.content_hash(),
            problem: problem.canonical_file(),
            dim: structure.dim(),
            basis: structure
                .basis_reps()
                .iter()
                .map(|p| p.to_string_with(vars))
                .collect(),
            identity_index: structure.identity_index,
            basis_mode: provenance.label().to_string(),
            max_level: structure.level,
            u_table,
            a_table,
            lambda_table,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serialization")
    }

    pub fn from_json(text: &str) -> Result<ResultFile, FileError> {
        let file: ResultFile =
            serde_json::from_str(text).map_err(|e| FileError::Malformed(e.to_string()))?;
        if file.format != RESULT_FORMAT {
            return Err(FileError::UnsupportedFormat(file.format));
        }
        Ok(file)
    }

    /// Recompute the hash of the embedded problem and compare with the
    /// stored binding.
    pub fn verify_hash(&self) -> Result<Problem, FileError> {
        let problem = Problem::from_file(self.problem.clone())?;
        let computed = problem.content_hash();
        if computed != self.problem_hash {
            return Err(FileError::HashMismatch {
                stored: self.problem_hash.clone(),
                computed,
            });
        }
        Ok(problem)
    }

    /// Rebuild the in-memory structure (after [`ResultFile::verify_hash`]).
    pub fn into_structure(&self, problem: &Problem) -> Result<FlatFStructure, FileError> {
        let vars = &problem.variables;
        let mut table = CoeffTable::new(problem.n_vars(), self.dim);
        table.level = self.max_level;
        for (key, src) in &self.u_table {
            let k = MultiIndex::from_str(key).map_err(|_| FileError::BadKey(key.clone()))?;
            let p = parse_poly(src, vars).map_err(|e| FileError::BadExpression(e.to_string()))?;
            table.u.insert(k, p);
        }
        for (key, row) in &self.a_table {
            let k = MultiIndex::from_str(key).map_err(|_| FileError::BadKey(key.clone()))?;
            let mut out = Vec::with_capacity(row.len());
            for r in row {
                out.push(Rat::from_str(r).map_err(|_| FileError::BadRational(r.clone()))?);
            }
            if out.len() != self.dim {
                return Err(FileError::Malformed(format!(
                    "a_table row `{}` has {} entries for dimension {}",
                    key,
                    out.len(),
                    self.dim
                )));
            }
            table.a.insert(k, out);
        }
        for (key, src) in &self.lambda_table {
            let (pair_src, tail_src) = key
                .split_once('|')
                .ok_or_else(|| FileError::BadKey(key.clone()))?;
            let pair =
                MultiIndex::from_str(pair_src).map_err(|_| FileError::BadKey(key.clone()))?;
            let tail =
                MultiIndex::from_str(tail_src).map_err(|_| FileError::BadKey(key.clone()))?;
            let pv =
                parse_polyvector(src, vars).map_err(|e| FileError::BadExpression(e.to_string()))?;
            table.lambda.insert((pair, tail), pv);
        }
        Ok(FlatFStructure {
            potential: problem.potential.clone(),
            identity_index: self.identity_index,
            level: self.max_level,
            table,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbCacheFile {
    pub format: String,
    pub problem_hash: String,
    pub variables: Vec<String>,
    pub order: MonomialOrder,
    pub generators: Vec<String>,
    pub elements: Vec<GbCacheElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbCacheElement {
    pub poly: String,
    pub cofactors: Vec<String>,
}

impl GbCacheFile {
    pub fn from_basis(problem: &Problem, gb: &GroebnerBasis) -> GbCacheFile {
        let vars = &problem.variables;
        GbCacheFile {
            format: GB_CACHE_FORMAT.to_string(),
            problem_hash: problem.content_hash(),
            variables: vars.clone(),
            order: gb.order().clone(),
            generators: gb
                .generators()
                .iter()
                .map(|g| g.to_string_with(vars))
                .collect(),
            elements: gb
                .elements()
                .iter()
                .map(|e| GbCacheElement {
                    poly: e.poly.to_string_with(vars),
                    cofactors: e.cofactors.iter().map(|c| c.to_string_with(vars)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cache serialization")
    }

    pub fn from_json(text: &str) -> Result<GbCacheFile, FileError> {
        let file: GbCacheFile =
            serde_json::from_str(text).map_err(|e| FileError::Malformed(e.to_string()))?;
        if file.format != GB_CACHE_FORMAT {
            return Err(FileError::UnsupportedFormat(file.format));
        }
        Ok(file)
    }

    /// Rebuild the basis, verifying the reconstruction identity of every
    /// element before trusting the cached data.
    pub fn into_basis(&self) -> Result<GroebnerBasis, FileError> {
        let vars = &self.variables;
        let generators = self
            .generators
            .iter()
            .map(|src| parse_poly(src, vars))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| FileError::BadExpression(e.to_string()))?;
        let mut elements = Vec::with_capacity(self.elements.len());
        for el in &self.elements {
            let poly =
                parse_poly(&el.poly, vars).map_err(|e| FileError::BadExpression(e.to_string()))?;
            let cofactors = el
                .cofactors
                .iter()
                .map(|src| parse_poly(src, vars))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| FileError::BadExpression(e.to_string()))?;
            elements.push((poly, cofactors));
        }
        GroebnerBasis::from_parts(generators, self.order.clone(), elements)
            .ok_or(FileError::CacheReconstruction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::{check_flat_f, check_fqm11};

    fn a2_problem() -> Problem {
        Problem::from_json(r#"{"variables":["x"],"potential":"1/3*x^3","max_level":4}"#).unwrap()
    }

    #[test]
    fn result_round_trip_preserves_everything() {
        let problem = a2_problem();
        let (engine, prov) = problem.prepare().unwrap();
        let structure = engine.run(4).unwrap();
        let file = ResultFile::from_structure(&problem, prov, &structure);
        let json = file.to_json();
        let reloaded = ResultFile::from_json(&json).unwrap();
        assert_eq!(file, reloaded);
        let problem2 = reloaded.verify_hash().unwrap();
        let structure2 = reloaded.into_structure(&problem2).unwrap();
        assert_eq!(structure, structure2);
        // Checks pass on the reloaded structure without recomputation.
        assert!(check_fqm11(&structure2, 4).unwrap().passed);
        assert!(check_flat_f(&structure2).unwrap().passed);
    }

    #[test]
    fn serialization_is_byte_stable() {
        let problem = a2_problem();
        let (engine, prov) = problem.prepare().unwrap();
        let structure = engine.run(3).unwrap();
        let a = ResultFile::from_structure(&problem, prov, &structure).to_json();
        let b = ResultFile::from_structure(&problem, prov, &structure).to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn hash_mismatch_is_detected() {
        let problem = a2_problem();
        let (engine, prov) = problem.prepare().unwrap();
        let structure = engine.run(3).unwrap();
        let mut file = ResultFile::from_structure(&problem, prov, &structure);
        file.problem.max_level = 9; // inconsistent with the stored hash
        assert!(matches!(
            file.verify_hash(),
            Err(FileError::HashMismatch { .. })
        ));
    }

    #[test]
    fn gb_cache_round_trip_and_tamper_detection() {
        let problem = a2_problem();
        let gb = GroebnerBasis::new(
            crate::quotient::jacobian_generators(&problem.potential),
            problem.order.clone(),
        );
        let cache = GbCacheFile::from_basis(&problem, &gb);
        let reloaded = GbCacheFile::from_json(&cache.to_json()).unwrap();
        let gb2 = reloaded.into_basis().unwrap();
        assert_eq!(gb, gb2);

        let mut tampered = cache.clone();
        tampered.elements[0].cofactors[0] = "x".into();
        assert!(matches!(
            tampered.into_basis(),
            Err(FileError::CacheReconstruction)
        ));
    }
}
