//! The quotient algebra of the polynomial ring by the Jacobian ideal,
//! realized concretely: a basis of representatives with cached normal forms,
//! and the atomic reduction `v = sum_rho a^rho u_rho + twist(lambda)` that
//! returns the coefficients, the degree -1 lift `lambda`, and its
//! divergence.

use num_traits::Zero;
use thiserror::Error;

use crate::groebner::{Completeness, GroebnerBasis};
use crate::monomial::Monomial;
use crate::poly::{Poly, Rat};
use crate::polyvec::{ChargeSpec, PolyVector};

/// Partial derivatives of the potential, in variable order. These generate
/// the Jacobian ideal and are exactly the twist coefficients.
pub fn jacobian_generators(s: &Poly) -> Vec<Poly> {
    (0..s.n_vars()).map(|i| s.partial(i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error(
        "quotient is not certifiably finite-dimensional at this filter/bound; \
         supply a basis (and the spanning-check waiver) to proceed"
    )]
    NotFiniteDimensional,
    #[error("quotient is the zero ring: the ideal contains a unit")]
    TrivialQuotient,
    #[error("dependent basis: {combination} reduces to zero in the quotient")]
    DependentBasis { combination: String },
    #[error("basis has {got} elements but the quotient has dimension {dim}")]
    NotSpanning { got: usize, dim: usize },
    #[error(
        "cannot certify spanning of the supplied basis (enumeration incomplete); \
         set the spanning-check waiver to proceed"
    )]
    SpanningUncertified,
    #[error("normal form is not in the span of the basis: residual `{residual}`")]
    NotInSpan { residual: String },
    #[error("element is not charge-homogeneous of charge {expected}")]
    ChargeViolation { expected: i64 },
}

/// An ordered basis of the quotient: representatives, their cached normal
/// forms, and the position of the identity class when present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    reps: Vec<Poly>,
    normal_forms: Vec<Poly>,
    identity_index: Option<usize>,
    /// Union support of the normal forms, fixing row order for the solver.
    support: Vec<Monomial>,
}

fn collect_support(normal_forms: &[Poly]) -> Vec<Monomial> {
    let mut support: Vec<Monomial> = Vec::new();
    for nf in normal_forms {
        for (m, _) in nf.terms() {
            if !support.contains(m) {
                support.push(m.clone());
            }
        }
    }
    support.sort();
    support
}

impl Basis {
    /// Auto mode: take the (optionally charge-filtered) standard monomials
    /// as representatives. Errors when the enumeration cannot be certified
    /// complete or the quotient collapses.
    pub fn auto(
        gb: &GroebnerBasis,
        filter: Option<(&ChargeSpec, i64)>,
        bound: u32,
    ) -> Result<(Basis, Completeness), QuotientError> {
        let (mons, completeness) = gb.standard_monomials(filter, bound);
        if !completeness.is_complete() {
            return Err(QuotientError::NotFiniteDimensional);
        }
        if mons.is_empty() {
            return Err(QuotientError::TrivialQuotient);
        }
        let reps: Vec<Poly> = mons
            .iter()
            .map(|m| Poly::from_term(m.clone(), Rat::from_integer(1.into())))
            .collect();
        // Standard monomials are their own normal forms. The solver support
        // uses the structural monomial order, not the term order.
        let normal_forms = reps.clone();
        let identity_index = mons.iter().position(Monomial::is_one);
        let mut support = mons;
        support.sort();
        Ok((
            Basis {
                reps,
                normal_forms,
                identity_index,
                support,
            },
            completeness,
        ))
    }

    /// User mode: validate independence of the supplied representatives and,
    /// when the dimension is certified, that they span. `skip_spanning_check`
    /// accepts an uncertified basis, which then defines the subalgebra the
    /// computation runs in.
    pub fn from_user(
        gb: &GroebnerBasis,
        reps: Vec<Poly>,
        filter: Option<(&ChargeSpec, i64)>,
        bound: u32,
        skip_spanning_check: bool,
    ) -> Result<Basis, QuotientError> {
        let normal_forms: Vec<Poly> = reps.iter().map(|p| gb.reduce(p).remainder).collect();
        let support = collect_support(&normal_forms);

        // Independence: a nonzero nullspace vector names a dependency.
        if let Some(combo) = nullspace_vector(&support, &normal_forms) {
            let rendered: Vec<String> = combo
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| format!("{}*u[{}]", c, i))
                .collect();
            return Err(QuotientError::DependentBasis {
                combination: rendered.join(" + "),
            });
        }

        if skip_spanning_check {
            // The caller vouches for the span; nothing to certify.
        } else {
            let (mons, completeness) = gb.standard_monomials(filter, bound);
            if completeness.is_complete() {
                if reps.len() != mons.len() {
                    return Err(QuotientError::NotSpanning {
                        got: reps.len(),
                        dim: mons.len(),
                    });
                }
            } else {
                return Err(QuotientError::SpanningUncertified);
            }
        }

        let one_nf = gb.reduce(&Poly::one(gb.n_vars())).remainder;
        let identity_index = normal_forms.iter().position(|nf| *nf == one_nf);

        Ok(Basis {
            reps,
            normal_forms,
            identity_index,
            support,
        })
    }

    /// Reconstruct a basis previously exported as representatives plus an
    /// identity index, without re-validating (used when loading results).
    pub fn from_parts(gb: &GroebnerBasis, reps: Vec<Poly>, identity_index: Option<usize>) -> Basis {
        let normal_forms: Vec<Poly> = reps.iter().map(|p| gb.reduce(p).remainder).collect();
        let support = collect_support(&normal_forms);
        Basis {
            reps,
            normal_forms,
            identity_index,
            support,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[Poly] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> &Poly {
        &self.reps[i]
    }

    pub fn normal_forms(&self) -> &[Poly] {
        &self.normal_forms
    }

    /// Index of the representative of the identity class, when one exists.
    pub fn identity_index(&self) -> Option<usize> {
        self.identity_index
    }

    /// Solve `target = sum_rho a^rho * normal_forms[rho]` exactly.
    #[allow(clippy::needless_range_loop)] // row/column elimination reads and writes across rows
    fn solve(&self, target: &Poly) -> Result<Vec<Rat>, QuotientError> {
        // Any monomial outside the support is immediately out of span.
        for (m, _) in target.terms() {
            if self.support.binary_search(m).is_err() {
                return Err(QuotientError::NotInSpan {
                    residual: format!("monomial exponents {:?}", m.0),
                });
            }
        }
        let rows = self.support.len();
        let cols = self.normal_forms.len();
        // Dense augmented matrix [NF columns | target].
        let mut mat: Vec<Vec<Rat>> = vec![vec![Rat::zero(); cols + 1]; rows];
        for (j, nf) in self.normal_forms.iter().enumerate() {
            for (m, c) in nf.terms() {
                let r = self.support.binary_search(m).unwrap();
                mat[r][j] = c.clone();
            }
        }
        for (m, c) in target.terms() {
            let r = self.support.binary_search(m).unwrap();
            mat[r][cols] = c.clone();
        }

        let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut row = 0;
        for col in 0..cols {
            let Some(p) = (row..rows).find(|&r| !mat[r][col].is_zero()) else {
                continue;
            };
            mat.swap(row, p);
            let inv = Rat::from_integer(1.into()) / mat[row][col].clone();
            for x in mat[row].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..rows {
                if r != row && !mat[r][col].is_zero() {
                    let factor = mat[r][col].clone();
                    for c in 0..=cols {
                        let delta = &mat[row][c] * &factor;
                        mat[r][c] = &mat[r][c] - &delta;
                    }
                }
            }
            pivot_row_of_col[col] = Some(row);
            row += 1;
        }
        // Inconsistency: a nonzero target entry below the pivot rows.
        for r in row..rows {
            if !mat[r][cols].is_zero() {
                return Err(QuotientError::NotInSpan {
                    residual: format!("{}", mat[r][cols]),
                });
            }
        }
        let mut coeffs = vec![Rat::zero(); cols];
        for (col, pr) in pivot_row_of_col.iter().enumerate() {
            if let Some(r) = pr {
                coeffs[col] = mat[*r][cols].clone();
            }
        }
        Ok(coeffs)
    }
}

/// A nonzero rational vector in the nullspace of the column family, if any.
#[allow(clippy::needless_range_loop)] // row/column elimination reads and writes across rows
fn nullspace_vector(support: &[Monomial], columns: &[Poly]) -> Option<Vec<Rat>> {
    let rows = support.len();
    let cols = columns.len();
    let mut mat: Vec<Vec<Rat>> = vec![vec![Rat::zero(); cols]; rows];
    for (j, nf) in columns.iter().enumerate() {
        for (m, c) in nf.terms() {
            let r = support.binary_search(m).unwrap();
            mat[r][j] = c.clone();
        }
    }
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, p);
        let inv = Rat::from_integer(1.into()) / mat[row][col].clone();
        for x in mat[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in 0..cols {
                    let delta = &mat[row][c] * &factor;
                    mat[r][c] = &mat[r][c] - &delta;
                }
            }
        }
        pivot_col_of_row.push(col);
        row += 1;
    }
    let free_col = (0..cols).find(|c| !pivot_col_of_row.contains(c))?;
    // Back-substitute the free column into a kernel vector.
    let mut v = vec![Rat::zero(); cols];
    v[free_col] = Rat::from_integer(1.into());
    for (r, &pc) in pivot_col_of_row.iter().enumerate() {
        v[pc] = -mat[r][free_col].clone();
    }
    Some(v)
}

/// Result of reducing an eta-free element against the quotient basis:
/// `v = sum_rho coeffs[rho] * u_rho + twist(lambda)` exactly, with
/// `delta_lambda = divergence(lambda)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisReduction {
    pub coeffs: Vec<Rat>,
    pub lambda: PolyVector,
    pub delta_lambda: Poly,
}

/// The quotient context: frozen basis data over a frozen Groebner basis,
/// with the optional charge grading. Reductions on a shared value are pure
/// and can run concurrently.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub gb: GroebnerBasis,
    pub basis: Basis,
    pub charges: Option<ChargeSpec>,
}

impl Quotient {
    pub fn n_vars(&self) -> usize {
        self.gb.n_vars()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// The atomic reduction step. Deterministic: fixed division strategy,
    /// fixed solver pivoting.
    pub fn reduce_to_basis(&self, v: &Poly) -> Result<BasisReduction, QuotientError> {
        if let Some(spec) = &self.charges {
            match spec.poly_charge(v) {
                Ok(None) | Ok(Some(0)) => {}
                _ => return Err(QuotientError::ChargeViolation { expected: 0 }),
            }
        }

        let nf = self.gb.reduce(v).remainder;
        let coeffs = self.basis.solve(&nf)?;

        // Rewrite the ideal part over the original generators and lift it.
        let mut ideal_part = v.clone();
        for (a, u) in coeffs.iter().zip(self.basis.reps()) {
            if !a.is_zero() {
                ideal_part = ideal_part.sub(&u.scale(a));
            }
        }
        let red = self.gb.reduce(&ideal_part);
        debug_assert!(red.remainder.is_zero());

        let n = self.n_vars();
        let mut lambda = PolyVector::zero(n);
        let mut delta_lambda = Poly::zero(n);
        for (i, q) in red.cofactors.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            lambda.add_component(vec![i], q.clone());
            delta_lambda = delta_lambda.add(&q.partial(i));
        }
        Ok(BasisReduction {
            coeffs,
            lambda,
            delta_lambda,
        })
    }
}
