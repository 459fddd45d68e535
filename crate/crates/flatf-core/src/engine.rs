//! The perturbative recursion: assemble the partition sums, run the
//! level-by-level cascade of basis reductions, and emit the truncated flat
//! F-manifold structure.
//!
//! Level `m` handles every index multiset of size `m`. A step for a multiset
//! only reads entries of strictly lower levels, so multisets within a level
//! can be processed in any order with bit-identical results; the tables are
//! committed level by level.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::multi_index::{multisets, MultiIndex};
use crate::poly::{Poly, Rat};
use crate::polyvec::{apply_divergence, apply_twist, PolyVector};
use crate::prng::SplitMix64;
use crate::quotient::{BasisReduction, Quotient, QuotientError};
use crate::series::TSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("coefficient table incomplete: missing entry for `{key}`")]
    MissingEntry { key: MultiIndex },
    #[error("truncation level must be at least 2, got {got}")]
    LevelTooSmall { got: usize },
    #[error("multi-index `{key}` exceeds the computed level {level}")]
    OutOfLevel { key: MultiIndex, level: usize },
    #[error(
        "series image at `{key}` does not lie in the ideal; the cascade \
         coefficients are inconsistent with the defining identities"
    )]
    CoherenceFailure { key: MultiIndex },
}

/// Symmetric coefficient tables keyed by index multisets.
///
/// `u` holds the solution-expansion coefficients (basis representatives at
/// size 1) and `a` the structure-constant coefficients; both carry one entry
/// per multiset, which makes index-permutation symmetry structural. The
/// lifts are different: a lift series belongs to a PAIR, and its Taylor
/// coefficients are symmetric in the tail indices only, so `lambda` is keyed
/// by (pair, tail). Collapsing that key to the union multiset loses the
/// pair dependence and breaks the defining series identity at dimension
/// three and above.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    pub n_vars: usize,
    pub dim: usize,
    pub u: BTreeMap<MultiIndex, Poly>,
    pub a: BTreeMap<MultiIndex, Vec<Rat>>,
    /// Key: (pair multiset of size 2, tail multiset).
    pub lambda: BTreeMap<(MultiIndex, MultiIndex), PolyVector>,
    /// Highest fully committed level.
    pub level: usize,
}

impl CoeffTable {
    pub fn new(n_vars: usize, dim: usize) -> Self {
        CoeffTable {
            n_vars,
            dim,
            u: BTreeMap::new(),
            a: BTreeMap::new(),
            lambda: BTreeMap::new(),
            level: 0,
        }
    }

    fn u_entry(&self, key: &MultiIndex) -> Result<&Poly, EngineError> {
        self.u
            .get(key)
            .ok_or_else(|| EngineError::MissingEntry { key: key.clone() })
    }

    /// The partition sum at stage `i`: over all set partitions of the
    /// positions of `key` (size m) into `m - i` nonempty blocks, the product
    /// of the `u` entries of the blocks. Equivalent to the symmetrized sum
    /// over ordered partitions divided by `(m-i)!`.
    pub fn partition_sum(&self, key: &MultiIndex, i: usize) -> Result<Poly, EngineError> {
        let m = key.len();
        assert!(i < m, "stage {} out of range for |key| = {}", i, m);
        let mut total = Poly::zero(self.n_vars);
        for blocks in key.partitions_into(m - i) {
            let mut prod = Poly::one(self.n_vars);
            for block in &blocks {
                prod = prod.mul(self.u_entry(block)?);
            }
            total = total.add(&prod);
        }
        Ok(total)
    }
}

/// A deliberate modification of one cascade lift, used to probe that the
/// output does not depend on the choice of lift.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub target: MultiIndex,
    pub stage: usize,
    pub syzygy: PolyVector,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub perturbation: Option<Perturbation>,
    /// Shuffle the processing order inside each level with this seed.
    pub shuffle_seed: Option<u64>,
}

/// Output of one cascade: the structure constants from the last stage, the
/// committed lift per pair designation, and the raw reduction chain.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub coeffs: Vec<Rat>,
    pub u: Poly,
    /// Committed lift per pair designation of the key; the tail is the key
    /// minus the pair.
    pub lambdas: BTreeMap<MultiIndex, PolyVector>,
    pub chain: Vec<BasisReduction>,
}

/// The prepared computation: potential, its gradient, and the frozen
/// quotient context.
#[derive(Debug, Clone)]
pub struct Engine {
    pub potential: Poly,
    pub partials: Vec<Poly>,
    pub quotient: Quotient,
}

impl Engine {
    pub fn new(potential: Poly, quotient: Quotient) -> Engine {
        let partials = crate::quotient::jacobian_generators(&potential);
        Engine {
            potential,
            partials,
            quotient,
        }
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// One cascade for `key` (size `m = l + 1 >= 2`): reduce the stage-0
    /// partition sum and feed each divergence into the next stage. The
    /// structure constants are the final stage's coefficients; the committed
    /// lift is re-derived from the series image (see `coherent_lift`), which
    /// for size-2 keys coincides with the final stage's witness.
    pub fn step(
        &self,
        table: &CoeffTable,
        key: &MultiIndex,
        perturbation: Option<&Perturbation>,
    ) -> Result<StepOutcome, EngineError> {
        let m = key.len();
        debug_assert!(m >= 2);
        let stages = m - 1;

        let mut v = table.partition_sum(key, 0)?;
        let mut chain: Vec<BasisReduction> = Vec::with_capacity(stages);
        for i in 0..stages {
            let mut red = self.quotient.reduce_to_basis(&v)?;
            if let Some(p) = perturbation {
                if &p.target == key && p.stage == i {
                    red.lambda = red.lambda.add(&p.syzygy);
                    red.delta_lambda = red
                        .delta_lambda
                        .add(&apply_divergence(&p.syzygy).scalar_part());
                }
            }
            if i + 1 < stages {
                v = table.partition_sum(key, i + 1)?.sub(&red.delta_lambda);
            }
            chain.push(red);
        }
        let coeffs = chain.last().expect("at least one stage").coeffs.clone();

        // Commit one lift per pair designation. The solution-expansion entry
        // is the divergence of the lift, which must come out the same for
        // every designation; a mismatch means the tables cannot satisfy the
        // defining identities and is a hard error.
        let mut lambdas: BTreeMap<MultiIndex, PolyVector> = BTreeMap::new();
        let mut u: Option<Poly> = None;
        for (pair, tail) in key.pair_designations() {
            let (lambda, du) = self.coherent_lift(table, key, &pair, &tail, &coeffs)?;
            match &u {
                None => u = Some(du),
                Some(prev) => {
                    if *prev != du {
                        return Err(EngineError::CoherenceFailure { key: key.clone() });
                    }
                }
            }
            lambdas.insert(pair, lambda);
        }
        Ok(StepOutcome {
            coeffs,
            u: u.expect("at least one pair designation"),
            lambdas,
            chain,
        })
    }

    /// The committed lift for the designation `key = pair + tail`: the
    /// witness of the series identity's order-`|tail|` coefficient,
    ///
    ///   image = [d_a G * d_b G - sum_rho A_ab^rho d_rho G
    ///            - twist_G(L_ab)]_tail,
    ///
    /// lifted over the partials by the division cofactors. Every cascade
    /// stage witness is unique only up to the twist kernel, and committing a
    /// kernel-drifted representative would break the series identity at
    /// higher orders even though the structure constants are unaffected;
    /// re-deriving the lift from the image pins the committed choice.
    fn coherent_lift(
        &self,
        table: &CoeffTable,
        key: &MultiIndex,
        pair: &MultiIndex,
        tail: &MultiIndex,
        a_row: &[Rat],
    ) -> Result<(PolyVector, Poly), EngineError> {
        let n = self.quotient.n_vars();
        let (alpha, beta) = (pair.entries()[0], pair.entries()[1]);
        let rest = tail.clone();

        let mut image = Poly::zero(n);
        for (m1, m2, mult) in rest.splittings() {
            let factor = Rat::from(mult);
            // Product part.
            let ua = table.u_entry(&m1.with(alpha))?;
            let ub = table.u_entry(&m2.with(beta))?;
            image = image.add(&ua.mul(ub).scale(&factor));
            // Structure-constant part.
            let a_key = m1.merge(pair);
            let row = if &a_key == key {
                a_row
            } else {
                table
                    .a
                    .get(&a_key)
                    .ok_or(EngineError::MissingEntry { key: a_key.clone() })?
            };
            for (rho, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    let u_rho = table.u_entry(&m2.with(rho))?;
                    image = image.sub(&u_rho.scale(a).scale(&factor));
                }
            }
            // Deformation-twist part from lower lifts of the same pair.
            if !m1.is_empty() {
                let u_m1 = table.u_entry(&m1)?;
                let partials: Vec<Poly> = (0..n).map(|i| u_m1.partial(i)).collect();
                let lam = table.lambda.get(&(pair.clone(), m2.clone())).ok_or(
                    EngineError::MissingEntry {
                        key: m2.merge(pair),
                    },
                )?;
                image = image.sub(&apply_twist(&partials, lam).scalar_part().scale(&factor));
            }
        }

        let red = self.quotient.gb.reduce(&image);
        if !red.remainder.is_zero() {
            return Err(EngineError::CoherenceFailure { key: key.clone() });
        }
        let mut lambda = PolyVector::zero(n);
        let mut u = Poly::zero(n);
        for (i, q) in red.cofactors.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            lambda.add_component(vec![i], q.clone());
            u = u.add(&q.partial(i));
        }
        Ok((lambda, u))
    }

    pub fn run(&self, level: usize) -> Result<FlatFStructure, EngineError> {
        self.run_with(level, &RunOptions::default())
    }

    pub fn run_with(
        &self,
        level: usize,
        options: &RunOptions,
    ) -> Result<FlatFStructure, EngineError> {
        if level < 2 {
            return Err(EngineError::LevelTooSmall { got: level });
        }
        let dim = self.dim();
        let mut table = CoeffTable::new(self.quotient.n_vars(), dim);
        for (idx, rep) in self.quotient.basis.reps().iter().enumerate() {
            table.u.insert(MultiIndex::new(vec![idx]), rep.clone());
        }
        table.level = 1;

        for m in 2..=level {
            let mut keys = multisets(dim, m);
            if let Some(seed) = options.shuffle_seed {
                SplitMix64::new(seed ^ (m as u64)).shuffle(&mut keys);
            }
            for key in keys {
                let out = self.step(&table, &key, options.perturbation.as_ref())?;
                table.a.insert(key.clone(), out.coeffs);
                for (pair, lambda) in out.lambdas {
                    let mut tail = key.entries().to_vec();
                    for e in pair.entries() {
                        let pos = tail.iter().position(|x| x == e).unwrap();
                        tail.remove(pos);
                    }
                    table.lambda.insert((pair, MultiIndex::new(tail)), lambda);
                }
                table.u.insert(key, out.u);
            }
            table.level = m;
        }

        Ok(FlatFStructure {
            potential: self.potential.clone(),
            identity_index: self.quotient.basis.identity_index(),
            level,
            table,
        })
    }
}

/// The assembled output: all coefficient tables through the truncation
/// level, with the data needed to rebuild the defining series.
///
/// With tables complete through level `L`, the solution expansion is known
/// through t-order `L` and the structure-constant series through `L - 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatFStructure {
    pub potential: Poly,
    pub identity_index: Option<usize>,
    pub level: usize,
    pub table: CoeffTable,
}

impl FlatFStructure {
    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn n_vars(&self) -> usize {
        self.table.n_vars
    }

    pub fn basis_reps(&self) -> Vec<Poly> {
        (0..self.dim())
            .map(|i| self.table.u[&MultiIndex::new(vec![i])].clone())
            .collect()
    }

    /// Taylor coefficient of the structure-constant series: the `a` entry at
    /// the multiset `{alpha, beta} + extra`, component `rho`. Symmetric in
    /// all of `alpha`, `beta`, and the entries of `extra` by construction.
    pub fn series_coefficient(
        &self,
        alpha: usize,
        beta: usize,
        rho: usize,
        extra: &MultiIndex,
    ) -> Result<Rat, EngineError> {
        let key = extra.with(alpha).with(beta);
        if key.len() > self.level {
            return Err(EngineError::OutOfLevel {
                key,
                level: self.level,
            });
        }
        Ok(self.table.a[&key][rho].clone())
    }

    /// The solution expansion as a series of polynomials, truncated at
    /// `order <= level`. No constant term.
    pub fn gamma(&self, order: usize) -> TSeries<Poly> {
        let order = order.min(self.level);
        let mut out = TSeries::zero(order);
        for (key, poly) in &self.table.u {
            out.insert(key.clone(), poly.clone());
        }
        out
    }

    /// First t-derivative of the solution expansion; valid through
    /// `level - 1`.
    pub fn gamma_partial(&self, alpha: usize, order: usize) -> TSeries<Poly> {
        self.gamma(order + 1).t_derivative(alpha).truncate(order)
    }

    /// Structure-constant component series `(alpha beta -> rho)`, valid
    /// through `level - 2`.
    pub fn a_component_series(
        &self,
        alpha: usize,
        beta: usize,
        rho: usize,
        order: usize,
    ) -> TSeries<Rat> {
        let mut out = TSeries::zero(order);
        let pair = MultiIndex::new(vec![alpha, beta]);
        for m in 0..=order {
            for extra in multisets(self.dim(), m) {
                let key = extra.merge(&pair);
                if let Some(v) = self.table.a.get(&key) {
                    out.insert(extra, v[rho].clone());
                }
            }
        }
        out
    }

    /// Lift series for the pair `(alpha, beta)`, valid through `level - 2`.
    pub fn lambda_series(&self, alpha: usize, beta: usize, order: usize) -> TSeries<PolyVector> {
        let mut out = TSeries::zero(order);
        let pair = MultiIndex::new(vec![alpha, beta]);
        for ((p, tail), v) in &self.table.lambda {
            if p == &pair && tail.len() <= order {
                out.insert(tail.clone(), v.clone());
            }
        }
        out
    }
}
