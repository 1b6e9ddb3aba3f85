//! Exact coefficient checks of the B-series identities over a polynomial field.
//!
//! Each check expands both sides as vector power series in `h` through a fixed
//! order and compares them coefficient by coefficient.

use std::fmt;

use num_traits::Zero;

use crate::bseries::{compose, BSeries};
use crate::elementary::{
    evaluate_bseries, evaluate_bseries_at_series, Differentials, PolynomialVectorField,
    SeriesVector, Stump,
};
use crate::error::{Error, Result};
use crate::pruning::{prune_with, PruningSemantics};
use crate::tree::{enumerate_trees, Tree};
use crate::{rational, Rational};

/// Outcome of comparing two truncated vector series on orders `start..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub equal: bool,
    pub first_mismatch: Option<usize>,
    pub start: usize,
    /// Coefficient vectors `c_0, ..., c_N` of the left side.
    pub lhs: Vec<Vec<Rational>>,
    pub rhs: Vec<Vec<Rational>>,
}

impl Report {
    fn compare(lhs: &SeriesVector, rhs: &SeriesVector, start: usize) -> Report {
        let lhs = lhs.coefficients();
        let rhs = rhs.coefficients();
        let first_mismatch = (start..lhs.len().min(rhs.len())).find(|&k| lhs[k] != rhs[k]);
        Report {
            equal: first_mismatch.is_none(),
            first_mismatch,
            start,
            lhs,
            rhs,
        }
    }

    /// The scalar `r` with `rhs_k = r · lhs_k` on every compared order, if one
    /// exists and the left side is not identically zero there.
    pub fn uniform_ratio(&self) -> Option<Rational> {
        let mut ratio: Option<Rational> = None;
        for k in self.start..self.lhs.len().min(self.rhs.len()) {
            for (l, r) in self.lhs[k].iter().zip(&self.rhs[k]) {
                if l.is_zero() {
                    if !r.is_zero() {
                        return None;
                    }
                    continue;
                }
                let here = r / l;
                match &ratio {
                    None => ratio = Some(here),
                    Some(prev) if *prev != here => return None,
                    Some(_) => {}
                }
            }
        }
        ratio
    }
}

fn write_vector(f: &mut fmt::Formatter<'_>, v: &[Rational]) -> fmt::Result {
    f.write_str("[")?;
    for (i, c) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("]")
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(k) = self.first_mismatch else {
            return f.write_str("equal");
        };
        writeln!(f, "not equal: first mismatch at order {k}")?;
        for (label, rows) in [("lhs", &self.lhs), ("rhs", &self.rhs)] {
            write!(f, "{label}:")?;
            for row in &rows[self.start..] {
                f.write_str(" ")?;
                write_vector(f, row)?;
            }
            if label == "lhs" {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

fn need_order(series: &BSeries, max_order: usize) -> Result<()> {
    if series.max_order() < max_order {
        return Err(Error::Truncation {
            order: max_order,
            max_order: series.max_order(),
        });
    }
    Ok(())
}

/// Checks `f^{(n)}((B_h a) y0)[v_1..v_n] = Σ_{|f| ≤ N} h^{|f|} (aD)([f]) / σ([f]) F([f]*^n)[v_1..v_n]`.
pub fn verify_prop1(
    field: &PolynomialVectorField,
    a: &BSeries,
    vectors: &[Vec<Rational>],
    y0: &[Rational],
    max_order: usize,
) -> Result<Report> {
    compare_prop1(field, a, a, vectors, y0, max_order)
}

/// [`verify_prop1`] with independent series on the two sides, for diagnostics.
pub fn compare_prop1(
    field: &PolynomialVectorField,
    a_lhs: &BSeries,
    a_rhs: &BSeries,
    vectors: &[Vec<Rational>],
    y0: &[Rational],
    max_order: usize,
) -> Result<Report> {
    need_order(a_rhs, max_order)?;
    let n = vectors.len();
    let y1 = evaluate_bseries(a_lhs, field, y0, max_order)?;
    let lifted: Vec<SeriesVector> = vectors
        .iter()
        .map(|v| SeriesVector::constant(v, max_order))
        .collect();
    let refs: Vec<&SeriesVector> = lifted.iter().collect();
    let lhs = field.apply_derivative_series(&y1, &refs)?;

    let flat: Vec<SeriesVector> = vectors
        .iter()
        .map(|v| SeriesVector::constant(v, 0))
        .collect();
    let flat_refs: Vec<&SeriesVector> = flat.iter().collect();
    let mut diffs = Differentials::new(field, SeriesVector::constant(y0, 0))?;
    let mut rows = vec![vec![Rational::zero(); field.dimension()]; max_order + 1];
    // trees [f] with |f| <= N
    for grafted in enumerate_trees(max_order + 1) {
        let weight = a_rhs.derivative_at(Some(&grafted))? / rational(grafted.symmetry() as i64);
        if weight.is_zero() {
            continue;
        }
        let value = diffs.stump(&Stump::new(grafted.clone(), n), &flat_refs)?;
        for (slot, c) in rows[grafted.order() - 1]
            .iter_mut()
            .zip(value.coefficient(0))
        {
            *slot += &weight * c;
        }
    }
    Ok(Report::compare(
        &lhs,
        &SeriesVector::from_coefficients(&rows),
        0,
    ))
}

/// Checks `h^{|t'|}/σ(t') F(t')((B_h a) y0) = Σ_{t ≥ t'} h^{|t|}/σ(t) a(t \ t') F(t)(y0)`
/// on orders `|t'|..=N`.
pub fn verify_lemma1(
    field: &PolynomialVectorField,
    a: &BSeries,
    t_sub: &Tree,
    y0: &[Rational],
    max_order: usize,
) -> Result<Report> {
    verify_lemma1_with(PruningSemantics::Assignment, field, a, t_sub, y0, max_order)
}

/// [`verify_lemma1`] with a selectable pruning semantics for the right side.
pub fn verify_lemma1_with(
    semantics: PruningSemantics,
    field: &PolynomialVectorField,
    a: &BSeries,
    t_sub: &Tree,
    y0: &[Rational],
    max_order: usize,
) -> Result<Report> {
    need_order(a, max_order)?;
    if t_sub.order() > max_order {
        return Err(Error::Truncation {
            order: t_sub.order(),
            max_order,
        });
    }
    let y1 = evaluate_bseries(a, field, y0, max_order)?;
    let mut at_y1 = Differentials::new(field, y1)?;
    let lhs = at_y1
        .get(t_sub)
        .scale(&Rational::new(1.into(), t_sub.symmetry().into()))
        .shift(t_sub.order());

    let mut at_y0 = Differentials::new(field, SeriesVector::constant(y0, 0))?;
    let mut rows = vec![vec![Rational::zero(); field.dimension()]; max_order + 1];
    for t in enumerate_trees(max_order) {
        if t.order() < t_sub.order() {
            continue;
        }
        let pruned = prune_with(semantics, &t, t_sub);
        if pruned.is_zero() {
            continue;
        }
        let weight = a.eval_forest_sum(&pruned)? / rational(t.symmetry() as i64);
        if weight.is_zero() {
            continue;
        }
        for (slot, c) in rows[t.order()].iter_mut().zip(at_y0.get(&t).coefficient(0)) {
            *slot += &weight * c;
        }
    }
    Ok(Report::compare(
        &lhs,
        &SeriesVector::from_coefficients(&rows),
        t_sub.order(),
    ))
}

/// Checks `(B_h (B_h y0) a) b = (B_h y0)(ab)` through `h^N`.
pub fn verify_composition(
    field: &PolynomialVectorField,
    a: &BSeries,
    b: &BSeries,
    y0: &[Rational],
    max_order: usize,
) -> Result<Report> {
    let inner = evaluate_bseries(a, field, y0, max_order)?;
    let lhs = evaluate_bseries_at_series(b, field, &inner, max_order)?;
    let ab = compose(a, b, max_order)?;
    let rhs = evaluate_bseries(&ab, field, y0, max_order)?;
    Ok(Report::compare(&lhs, &rhs, 0))
}
