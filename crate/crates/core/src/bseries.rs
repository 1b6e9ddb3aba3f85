//! Truncated B-series coefficient maps and their composition.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::forest::{Forest, ForestSum};
use crate::pruning::{enumerate_subtrees, prune};
use crate::tree::{enumerate_trees, Tree};
use crate::Rational;

/// A map `{∅} ∪ {t : |t| ≤ N} → ℚ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSeries {
    max_order: usize,
    empty: Rational,
    coeffs: BTreeMap<Tree, Rational>,
}

impl BSeries {
    pub fn from_fn(
        max_order: usize,
        empty: Rational,
        mut coeff: impl FnMut(&Tree) -> Rational,
    ) -> BSeries {
        let coeffs = enumerate_trees(max_order)
            .into_iter()
            .map(|t| {
                let c = coeff(&t);
                (t, c)
            })
            .collect();
        BSeries {
            max_order,
            empty,
            coeffs,
        }
    }

    /// `e(∅) = 1`, `e(t) = 0`: the neutral element of composition.
    pub fn identity(max_order: usize) -> BSeries {
        BSeries::from_fn(max_order, Rational::one(), |_| Rational::zero())
    }

    /// Coefficients `1/γ(t)` of the exact solution.
    pub fn exact_flow(max_order: usize) -> BSeries {
        BSeries::from_fn(max_order, Rational::one(), |t| {
            Rational::new(1.into(), t.density().into())
        })
    }

    /// Seeded small rationals `p/q`, `|p| ≤ 9`, `1 ≤ q ≤ 9`, drawn in canonical tree
    /// order after the empty-tree value. With `in_class_b` the empty value is
    /// replaced by 1 (the draw still happens, so tree coefficients do not depend
    /// on the flag).
    pub fn random(seed: u64, max_order: usize, in_class_b: bool) -> BSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = move || {
            let p: i64 = rng.random_range(-9..=9);
            let q: i64 = rng.random_range(1..=9);
            Rational::new(p.into(), q.into())
        };
        let drawn = draw();
        let empty = if in_class_b { Rational::one() } else { drawn };
        BSeries::from_fn(max_order, empty, |_| draw())
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Value at the empty tree.
    pub fn empty(&self) -> &Rational {
        &self.empty
    }

    pub fn is_in_class_b(&self) -> bool {
        self.empty.is_one()
    }

    pub fn get(&self, t: &Tree) -> Result<&Rational> {
        self.coeffs.get(t).ok_or(Error::Truncation {
            order: t.order(),
            max_order: self.max_order,
        })
    }

    pub fn set(&mut self, t: &Tree, value: Rational) -> Result<()> {
        let slot = self.coeffs.get_mut(t).ok_or(Error::Truncation {
            order: t.order(),
            max_order: self.max_order,
        })?;
        *slot = value;
        Ok(())
    }

    pub fn set_empty(&mut self, value: Rational) {
        self.empty = value;
    }

    /// Coefficients in canonical tree order.
    pub fn iter(&self) -> impl Iterator<Item = (&Tree, &Rational)> {
        self.coeffs.iter()
    }

    /// Same series truncated at a lower order.
    pub fn restrict(&self, max_order: usize) -> Result<BSeries> {
        if max_order > self.max_order {
            return Err(Error::Truncation {
                order: max_order,
                max_order: self.max_order,
            });
        }
        Ok(BSeries {
            max_order,
            empty: self.empty.clone(),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(t, _)| t.order() <= max_order)
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
        })
    }

    /// Multiplicative extension to forests, `a(1) = 1`.
    pub fn eval_forest(&self, f: &Forest) -> Result<Rational> {
        let mut acc = Rational::one();
        for (t, k) in f.entries() {
            acc *= num_traits::pow(self.get(t)?.clone(), *k);
        }
        Ok(acc)
    }

    /// Linear extension to the forest space.
    pub fn eval_forest_sum(&self, s: &ForestSum) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (f, c) in s.terms() {
            acc += c * self.eval_forest(f)?;
        }
        Ok(acc)
    }

    /// `(aD)(∅) = 0`, `(aD)(τ) = 1`, `(aD)([t1 ... tm]) = Π a(ti)`.
    ///
    /// Only the branches need to lie within the truncation, so `[f]` with
    /// `|f| = N` is accepted.
    pub fn derivative_at(&self, x: Option<&Tree>) -> Result<Rational> {
        match x {
            None => Ok(Rational::zero()),
            Some(t) => self.eval_forest(t.children()),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let trees: Map<String, Value> = self
            .coeffs
            .iter()
            .map(|(t, c)| (t.to_string(), Value::String(c.to_string())))
            .collect();
        json!({
            "max_order": self.max_order,
            "empty": self.empty.to_string(),
            "trees": trees,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<BSeries> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        BSeries::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<BSeries> {
        let bad = |m: &str| Error::Format(m.to_string());
        let max_order = value
            .get("max_order")
            .and_then(Value::as_u64)
            .filter(|&n| n >= 1)
            .ok_or_else(|| bad("\"max_order\" must be a positive integer"))?
            as usize;
        let empty = parse_rational_field(value.get("empty"), "empty")?;
        let trees = value
            .get("trees")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("\"trees\" must be an object"))?;
        let mut coeffs = BTreeMap::new();
        for (key, v) in trees {
            let t: Tree = key.parse()?;
            if t.order() > max_order {
                return Err(Error::Format(format!(
                    "tree {key} exceeds max_order {max_order}"
                )));
            }
            let c = parse_rational_field(Some(v), key)?;
            if coeffs.insert(t, c).is_some() {
                return Err(Error::Format(format!("duplicate tree {key}")));
            }
        }
        let expected = enumerate_trees(max_order).len();
        if coeffs.len() != expected {
            return Err(Error::Format(format!(
                "expected {expected} trees of order <= {max_order}, found {}",
                coeffs.len()
            )));
        }
        Ok(BSeries {
            max_order,
            empty,
            coeffs,
        })
    }
}

fn parse_rational_field(v: Option<&Value>, name: &str) -> Result<Rational> {
    v.and_then(Value::as_str)
        .and_then(|s| s.parse::<Rational>().ok())
        .ok_or_else(|| Error::Format(format!("\"{name}\" must be a rational string \"p/q\"")))
}

/// The composition `ab`: the series with `(B_h (B_h y0) a) b = (B_h y0)(ab)`.
///
/// `(ab)(∅) = b(∅)` and `(ab)(t) = b(∅) a(t) + Σ_{t' ≤ t} b(t') a(t \ t')`.
pub fn compose(a: &BSeries, b: &BSeries, max_order: usize) -> Result<BSeries> {
    if !a.is_in_class_b() {
        return Err(Error::NotInClassB(a.empty.to_string()));
    }
    for s in [a, b] {
        if s.max_order < max_order {
            return Err(Error::Truncation {
                order: max_order,
                max_order: s.max_order,
            });
        }
    }
    let mut coeffs = BTreeMap::new();
    for t in enumerate_trees(max_order) {
        let mut value = b.empty() * a.get(&t)?;
        for sub in enumerate_subtrees(&t) {
            let weight = b.get(&sub)?;
            if weight.is_zero() {
                continue;
            }
            value += weight * a.eval_forest_sum(&prune(&t, &sub))?;
        }
        coeffs.insert(t, value);
    }
    Ok(BSeries {
        max_order,
        empty: b.empty.clone(),
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;

    fn tr(s: &str) -> Tree {
        s.parse().unwrap()
    }

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn forest_evaluation() {
        let a = BSeries::random(7, 3, true);
        let s: ForestSum = "1*([. .]) + 2*(. [.]) + 3*(. . .)".parse().unwrap();
        let (t1, t2, t3) = (
            a.get(&Tree::leaf()).unwrap().clone(),
            a.get(&tr("[.]")).unwrap().clone(),
            a.get(&tr("[. .]")).unwrap().clone(),
        );
        let expected = t3 + rational(2) * &t1 * t2 + rational(3) * &t1 * &t1 * &t1;
        assert_eq!(a.eval_forest_sum(&s).unwrap(), expected);
        assert_eq!(a.eval_forest(&Forest::identity()).unwrap(), rational(1));
        assert_eq!(a.eval_forest(&". .".parse().unwrap()).unwrap(), &t1 * &t1);
        assert!(matches!(
            a.eval_forest(&"[[[.]]]".parse().unwrap()),
            Err(Error::Truncation {
                order: 4,
                max_order: 3
            })
        ));
    }

    #[test]
    fn derivative_weights() {
        let a = BSeries::random(3, 3, true);
        assert_eq!(a.derivative_at(None).unwrap(), rational(0));
        assert_eq!(a.derivative_at(Some(&Tree::leaf())).unwrap(), rational(1));
        let t1 = a.get(&Tree::leaf()).unwrap();
        assert_eq!(a.derivative_at(Some(&tr("[. .]"))).unwrap(), t1 * t1);
        // branches of order <= N are enough
        assert!(a.derivative_at(Some(&tr("[[[.]]]"))).is_ok());
    }

    #[test]
    fn fixture_series() {
        let e = BSeries::identity(3);
        assert_eq!(e.empty(), &rational(1));
        assert_eq!(e.iter().count(), 4);
        assert!(e.iter().all(|(_, c)| c.is_zero()));
        let flow = BSeries::exact_flow(3);
        let values: Vec<Rational> = flow.iter().map(|(_, c)| c.clone()).collect();
        assert_eq!(values, vec![q(1, 1), q(1, 2), q(1, 3), q(1, 6)]);
        assert_eq!(BSeries::random(5, 4, false), BSeries::random(5, 4, false));
        assert_ne!(BSeries::random(5, 4, false), BSeries::random(6, 4, false));
        let r = BSeries::random(11, 4, false);
        for (_, c) in r.iter() {
            assert!(c.numer().magnitude() <= &9u32.into());
            assert!(c.denom() <= &9.into());
        }
        assert!(BSeries::random(11, 4, true).is_in_class_b());
    }

    #[test]
    fn flow_square_at_small_trees() {
        let flow = BSeries::exact_flow(4);
        let ab = compose(&flow, &flow, 4).unwrap();
        assert_eq!(ab.empty(), &rational(1));
        assert_eq!(ab.get(&tr("[. .]")).unwrap(), &q(8, 3));
        assert_eq!(ab.get(&Tree::leaf()).unwrap(), &rational(2));
    }

    #[test]
    fn compose_rejects_bad_inputs() {
        let a = BSeries::random(1, 3, false);
        let b = BSeries::random(2, 3, false);
        assert!(matches!(compose(&a, &b, 3), Err(Error::NotInClassB(_))));
        let a = BSeries::random(1, 3, true);
        assert!(matches!(compose(&a, &b, 4), Err(Error::Truncation { .. })));
    }

    #[test]
    fn compose_with_identity_b_keeps_empty_value() {
        let a = BSeries::random(3, 4, true);
        let mut b = BSeries::identity(4);
        b.set_empty(q(-3, 2));
        let ab = compose(&a, &b, 4).unwrap();
        assert_eq!(ab.empty(), &q(-3, 2));
        for (t, c) in ab.iter() {
            assert_eq!(c, &(q(-3, 2) * a.get(t).unwrap()));
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let a = BSeries::random(9, 3, false);
        let text = a.to_json();
        assert_eq!(BSeries::from_json(&text).unwrap(), a);
        let keys: Vec<String> = a.to_json_value()["trees"]
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect();
        assert_eq!(keys, vec![".", "[.]", "[. .]", "[[.]]"]);
        let missing = r#"{"max_order": 2, "empty": "1", "trees": {".": "1"}}"#;
        assert!(matches!(BSeries::from_json(missing), Err(Error::Format(_))));
        let dup =
            r#"{"max_order": 2, "empty": "1", "trees": {".": "1", "[.]": "1/2", "[ .]": "1"}}"#;
        assert!(BSeries::from_json(dup).is_err());
        let ok = r#"{"max_order": 2, "empty": "1", "trees": {".": "1", "[.]": "1/2"}}"#;
        let flow = BSeries::from_json(ok).unwrap();
        assert_eq!(flow, BSeries::exact_flow(2));
    }
}
