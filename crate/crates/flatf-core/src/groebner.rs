//! Buchberger's algorithm with cofactor tracking, full normal-form
//! reduction, and standard-monomial enumeration.
//!
//! Every basis element carries its expression over the original generators,
//! so any reduction yields an exact identity
//! `input = remainder + sum_i q_i * generator_i`. The degree -1 lift of a
//! reduction is built from exactly these witnesses, which is why cofactors
//! are threaded through the whole computation instead of being recovered
//! afterwards.

use std::cmp::Ordering;

use num_traits::One;

use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{Poly, Rat};
use crate::polyvec::ChargeSpec;

/// One reduced-basis element together with its cofactor row over the
/// original generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GbElement {
    pub poly: Poly,
    /// `poly = sum_i cofactors[i] * generators[i]`, exactly.
    pub cofactors: Vec<Poly>,
    lead: Monomial,
}

impl GbElement {
    pub fn lead(&self) -> &Monomial {
        &self.lead
    }
}

/// A reduced Groebner basis of an ideal, with every element expressed over
/// the original generators.
///
/// Elements are monic and sorted ascending by leading monomial; together
/// with the fixed division strategy this makes every reduction outcome
/// deterministic for a given input and order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    generators: Vec<Poly>,
    order: MonomialOrder,
    elements: Vec<GbElement>,
    n_vars: usize,
}

/// Outcome of a full reduction: the unique normal form plus an exact
/// rewriting of the reduced part over the original generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub remainder: Poly,
    /// `input = remainder + sum_i cofactors[i] * generators[i]`.
    pub cofactors: Vec<Poly>,
}

/// How the standard-monomial enumeration certifies completeness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    /// Every variable has a pure power among the leading terms, so the
    /// quotient is finite-dimensional and the enumeration is exhaustive.
    ZeroDimensional,
    /// Charge-graded slices went silent: two consecutive slices contributed
    /// nothing below the bound.
    Stabilized,
    /// The charge filter alone bounds the candidate set (no negative-charge
    /// variables), so the enumeration is exhaustive.
    Exhaustive,
    /// Neither criterion fired before the bound; the list may be truncated.
    PossiblyIncomplete,
}

impl Completeness {
    pub fn is_complete(self) -> bool {
        !matches!(self, Completeness::PossiblyIncomplete)
    }
}

impl GroebnerBasis {
    /// Run Buchberger's algorithm and return the reduced basis. Zero
    /// generators are tolerated and keep an empty cofactor slot so that
    /// indices still line up with the inputs.
    pub fn new(generators: Vec<Poly>, order: MonomialOrder) -> GroebnerBasis {
        let n_gens = generators.len();
        let n_vars = generators
            .iter()
            .map(Poly::n_vars)
            .max()
            .expect("at least one generator required");

        let unit_row = |i: usize| -> Vec<Poly> {
            (0..n_gens)
                .map(|j| {
                    if i == j {
                        Poly::one(n_vars)
                    } else {
                        Poly::zero(n_vars)
                    }
                })
                .collect()
        };

        let mut elements: Vec<GbElement> = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            elements.push(make_monic(g.clone(), unit_row(i), &order));
        }

        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..elements.len() {
            for j in 0..i {
                pairs.push((j, i));
            }
        }

        while !pairs.is_empty() {
            // Normal selection: smallest lcm first, ties by index.
            let best = pairs
                .iter()
                .enumerate()
                .min_by(|(_, &(i1, j1)), (_, &(i2, j2))| {
                    let l1 = elements[i1].lead.lcm(&elements[j1].lead);
                    let l2 = elements[i2].lead.lcm(&elements[j2].lead);
                    order.cmp(&l1, &l2).then(i1.cmp(&i2)).then(j1.cmp(&j2))
                })
                .map(|(idx, _)| idx)
                .unwrap();
            let (i, j) = pairs.swap_remove(best);

            let lcm = elements[i].lead.lcm(&elements[j].lead);
            // Product criterion: coprime leading terms reduce to zero.
            if lcm == elements[i].lead.mul(&elements[j].lead) {
                continue;
            }

            let mi = lcm.try_div(&elements[i].lead).unwrap();
            let mj = lcm.try_div(&elements[j].lead).unwrap();
            // spoly = mi*g_i - mj*g_j; both elements are monic.
            let mut h = Poly::zero(n_vars)
                .sub_scaled_shift(&-Rat::one(), &mi, &elements[i].poly)
                .sub_scaled_shift(&Rat::one(), &mj, &elements[j].poly);
            let mi_poly = Poly::from_term(mi, Rat::one());
            let mj_poly = Poly::from_term(mj, Rat::one());
            let mut row: Vec<Poly> = (0..n_gens)
                .map(|k| {
                    elements[i].cofactors[k]
                        .mul(&mi_poly)
                        .sub(&elements[j].cofactors[k].mul(&mj_poly))
                })
                .collect();

            let (rem, quots) = divide(&h, &elements, &order);
            h = rem;
            for (k, q) in quots.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                for (g, slot) in elements[k].cofactors.iter().zip(row.iter_mut()) {
                    *slot = slot.sub(&q.mul(g));
                }
            }

            if !h.is_zero() {
                let new_idx = elements.len();
                elements.push(make_monic(h, row, &order));
                for k in 0..new_idx {
                    pairs.push((k, new_idx));
                }
            }
        }

        // Minimize: drop elements whose leading term another kept leading
        // term divides. Processing ascending keeps the minimal leads.
        elements.sort_by(|a, b| order.cmp(&a.lead, &b.lead));
        let mut kept: Vec<GbElement> = Vec::new();
        for el in elements {
            if kept.iter().any(|k| k.lead.divides(&el.lead)) {
                continue;
            }
            kept.push(el);
        }

        // Inter-reduce tails; leading terms are pairwise non-divisible, so
        // they survive and the result is the reduced basis.
        for idx in 0..kept.len() {
            let me = kept[idx].clone();
            let others: Vec<GbElement> = kept
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != idx)
                .map(|(_, e)| e.clone())
                .collect();
            let (rem, quots) = divide(&me.poly, &others, &order);
            let mut row = me.cofactors;
            for (k, q) in quots.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                for (g, slot) in others[k].cofactors.iter().zip(row.iter_mut()) {
                    *slot = slot.sub(&q.mul(g));
                }
            }
            kept[idx] = make_monic(rem, row, &order);
        }
        kept.sort_by(|a, b| order.cmp(&a.lead, &b.lead));

        let gb = GroebnerBasis {
            generators,
            order,
            elements: kept,
            n_vars,
        };
        debug_assert!(gb.verify_reconstruction());
        gb
    }

    /// Rebuild from serialized parts, verifying the reconstruction identity
    /// of every element before trusting the data.
    pub fn from_parts(
        generators: Vec<Poly>,
        order: MonomialOrder,
        elements: Vec<(Poly, Vec<Poly>)>,
    ) -> Option<GroebnerBasis> {
        let n_vars = generators.iter().map(Poly::n_vars).max()?;
        let mut built = Vec::with_capacity(elements.len());
        for (poly, cofactors) in elements {
            if cofactors.len() != generators.len() {
                return None;
            }
            let lead = poly.leading_term(&order)?.0.clone();
            built.push(GbElement {
                poly,
                cofactors,
                lead,
            });
        }
        let gb = GroebnerBasis {
            generators,
            order,
            elements: built,
            n_vars,
        };
        if gb.verify_reconstruction() {
            Some(gb)
        } else {
            None
        }
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn elements(&self) -> &[GbElement] {
        &self.elements
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Check `poly = sum_i cofactors[i] * generators[i]` for every element.
    pub fn verify_reconstruction(&self) -> bool {
        self.elements.iter().all(|el| {
            let mut acc = Poly::zero(self.n_vars);
            for (c, g) in el.cofactors.iter().zip(&self.generators) {
                acc = acc.add(&c.mul(g));
            }
            acc == el.poly
        })
    }

    /// Full reduction of `p`: the unique normal form plus cofactors over the
    /// original generators.
    pub fn reduce(&self, p: &Poly) -> Reduction {
        let (remainder, quots) = divide(p, &self.elements, &self.order);
        let mut cofactors = vec![Poly::zero(self.n_vars); self.generators.len()];
        for (k, q) in quots.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (g, slot) in self.elements[k].cofactors.iter().zip(cofactors.iter_mut()) {
                *slot = slot.add(&q.mul(g));
            }
        }
        Reduction {
            remainder,
            cofactors,
        }
    }

    /// Whether `p` lies in the ideal.
    pub fn contains(&self, p: &Poly) -> bool {
        self.reduce(p).remainder.is_zero()
    }

    fn is_zero_dimensional(&self) -> bool {
        if self.elements.iter().any(|e| e.lead.is_one()) {
            return true;
        }
        (0..self.n_vars).all(|i| self.elements.iter().any(|e| e.lead.is_pure_power_of(i)))
    }

    /// Enumerate monomials divisible by no leading term, optionally filtered
    /// to a fixed charge, in ascending term order, together with a
    /// completeness verdict.
    ///
    /// `bound` caps the total degree of unfiltered enumeration in the
    /// non-finite case, and the negative-charge slice degree in the
    /// charge-filtered case; it is ignored when the leading terms prove the
    /// quotient finite.
    pub fn standard_monomials(
        &self,
        filter: Option<(&ChargeSpec, i64)>,
        bound: u32,
    ) -> (Vec<Monomial>, Completeness) {
        let is_standard =
            |m: &Monomial| -> bool { !self.elements.iter().any(|e| e.lead.divides(m)) };

        let mut result: Vec<Monomial>;
        let completeness;

        if self.is_zero_dimensional() {
            // Box bounded by the minimal pure powers.
            let trivial = self.elements.iter().any(|e| e.lead.is_one());
            let dims: Vec<u32> = (0..self.n_vars)
                .map(|i| {
                    if trivial {
                        0
                    } else {
                        self.elements
                            .iter()
                            .filter(|e| e.lead.is_pure_power_of(i))
                            .map(|e| e.lead.0[i])
                            .min()
                            .unwrap()
                    }
                })
                .collect();
            result = Vec::new();
            for m in enumerate_box(&dims) {
                let charge_ok = match filter {
                    None => true,
                    Some((spec, target)) => spec.term_charge(&m.0, &[]) == target,
                };
                if charge_ok && is_standard(&m) {
                    result.push(m);
                }
            }
            completeness = Completeness::ZeroDimensional;
        } else if let Some((spec, target)) = filter {
            let negative: Vec<usize> = (0..self.n_vars)
                .filter(|&i| spec.charges()[i] < 0)
                .collect();
            let positive: Vec<usize> = (0..self.n_vars)
                .filter(|&i| spec.charges()[i] > 0)
                .collect();
            result = Vec::new();
            if negative.is_empty() {
                for m in enumerate_weighted(&positive, spec.charges(), target, self.n_vars) {
                    if is_standard(&m) {
                        result.push(m);
                    }
                }
                completeness = Completeness::Exhaustive;
            } else {
                let mut empty_run = 0u32;
                let mut stabilized = false;
                let mut slice_degree = 0u32;
                while slice_degree <= bound {
                    let mut found_any = false;
                    for neg_part in enumerate_compositions(&negative, slice_degree, self.n_vars) {
                        let neg_charge: i64 = negative
                            .iter()
                            .map(|&i| i64::from(neg_part.0[i]) * spec.charges()[i])
                            .sum();
                        let want = target - neg_charge;
                        if want < 0 {
                            continue;
                        }
                        for pos_part in
                            enumerate_weighted(&positive, spec.charges(), want, self.n_vars)
                        {
                            let m = neg_part.mul(&pos_part);
                            if is_standard(&m) {
                                result.push(m);
                                found_any = true;
                            }
                        }
                    }
                    if found_any {
                        empty_run = 0;
                    } else {
                        empty_run += 1;
                        if empty_run >= 2 && slice_degree >= 1 {
                            stabilized = true;
                            break;
                        }
                    }
                    slice_degree += 1;
                }
                completeness = if stabilized {
                    Completeness::Stabilized
                } else {
                    Completeness::PossiblyIncomplete
                };
            }
        } else {
            // Unfiltered and not provably finite: bounded listing only.
            result = Vec::new();
            for m in enumerate_total_degree(self.n_vars, bound) {
                if is_standard(&m) {
                    result.push(m);
                }
            }
            completeness = Completeness::PossiblyIncomplete;
        }

        result.sort_by(|a, b| self.order.cmp(a, b));
        (result, completeness)
    }
}

fn make_monic(poly: Poly, mut cofactors: Vec<Poly>, order: &MonomialOrder) -> GbElement {
    let (lead, lc) = {
        let (m, c) = poly
            .leading_term(order)
            .expect("monic normalization of zero polynomial");
        (m.clone(), c.clone())
    };
    let inv = Rat::one() / lc;
    let poly = poly.scale(&inv);
    for c in &mut cofactors {
        *c = c.scale(&inv);
    }
    GbElement {
        poly,
        cofactors,
        lead,
    }
}

/// The division strategy: repeatedly cancel the order-largest reducible term
/// of the remainder against the element of smallest index whose leading term
/// divides it. Returns the normal form and the per-element quotients.
fn divide(p: &Poly, elements: &[GbElement], order: &MonomialOrder) -> (Poly, Vec<Poly>) {
    let mut remainder = p.clone();
    let mut quots = vec![Poly::zero(p.n_vars()); elements.len()];
    loop {
        let mut best: Option<(Monomial, usize)> = None;
        for (m, _) in remainder.terms() {
            if let Some(idx) = elements.iter().position(|e| e.lead.divides(m)) {
                best = match best {
                    None => Some((m.clone(), idx)),
                    Some((bm, bidx)) => {
                        if order.cmp(m, &bm) == Ordering::Greater {
                            Some((m.clone(), idx))
                        } else {
                            Some((bm, bidx))
                        }
                    }
                };
            }
        }
        let Some((m, idx)) = best else {
            return (remainder, quots);
        };
        let c = remainder.coeff(&m);
        let shift = m.try_div(&elements[idx].lead).unwrap();
        remainder = remainder.sub_scaled_shift(&c, &shift, &elements[idx].poly);
        quots[idx].add_term(shift, c);
    }
}

/// All monomials in the box `0 <= e_i < dims[i]` (empty when any dim is 0).
fn enumerate_box(dims: &[u32]) -> Vec<Monomial> {
    let mut out = Vec::new();
    if dims.contains(&0) {
        return out;
    }
    let mut cursor = vec![0u32; dims.len()];
    loop {
        out.push(Monomial(cursor.clone()));
        let mut i = 0;
        while i < dims.len() {
            cursor[i] += 1;
            if cursor[i] < dims[i] {
                break;
            }
            cursor[i] = 0;
            i += 1;
        }
        if i == dims.len() {
            return out;
        }
    }
}

fn enumerate_total_degree(n_vars: usize, bound: u32) -> Vec<Monomial> {
    fn rec(out: &mut Vec<Monomial>, cur: &mut Vec<u32>, var: usize, left: u32) {
        if var == cur.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[var] = e;
            rec(out, cur, var + 1, left - e);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n_vars];
    rec(&mut out, &mut cur, 0, bound);
    out
}

/// Monomials supported on `vars` whose weighted degree equals `target`;
/// the weights of `vars` must all be positive.
fn enumerate_weighted(
    vars: &[usize],
    weights: &[i64],
    target: i64,
    n_vars: usize,
) -> Vec<Monomial> {
    fn rec(
        out: &mut Vec<Monomial>,
        cur: &mut Vec<u32>,
        vars: &[usize],
        weights: &[i64],
        pos: usize,
        left: i64,
    ) {
        if pos == vars.len() {
            if left == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let v = vars[pos];
        let w = weights[v];
        for e in 0..=(left / w) {
            cur[v] = e as u32;
            rec(out, cur, vars, weights, pos + 1, left - e * w);
        }
        cur[v] = 0;
    }
    let mut out = Vec::new();
    if target >= 0 {
        let mut cur = vec![0u32; n_vars];
        rec(&mut out, &mut cur, vars, weights, 0, target);
    }
    out
}

/// Monomials supported on `vars` of total degree exactly `degree`.
fn enumerate_compositions(vars: &[usize], degree: u32, n_vars: usize) -> Vec<Monomial> {
    let weights: Vec<i64> = vec![1; n_vars];
    enumerate_weighted(vars, &weights, i64::from(degree), n_vars)
}
