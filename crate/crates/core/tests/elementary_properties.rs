use bseries_core::elementary::{
    elementary_differential, evaluate_bseries, evaluate_bseries_at_series, stump_differential,
};
use bseries_core::tree::enumerate_trees;
use bseries_core::{
    BSeries, PolynomialVectorField, Rational, SeriesVector, Stump, TruncatedSeries,
};
use num_traits::Zero;
use proptest::prelude::*;

fn q(p: i64) -> Rational {
    Rational::from_integer(p.into())
}

fn vec2() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(
        (-4i64..=4, 1i64..=3).prop_map(|(p, d)| Rational::new(p.into(), d.into())),
        2,
    )
}

/// A cubic field so that third derivatives are nonzero.
fn cubic_2d() -> PolynomialVectorField {
    let text = r#"{
        "dimension": 2,
        "components": [
            [{"coeff": "1", "exponents": [3, 0]}, {"coeff": "-2", "exponents": [1, 2]}, {"coeff": "1/2", "exponents": [0, 1]}],
            [{"coeff": "2", "exponents": [2, 1]}, {"coeff": "-1", "exponents": [0, 0]}]
        ]
    }"#;
    PolynomialVectorField::from_json(text).unwrap()
}

proptest! {
    #[test]
    fn derivative_is_symmetric(p in vec2(), u in vec2(), v in vec2(), w in vec2()) {
        let f = cubic_2d();
        let uvw = f.apply_derivative(&p, &[u.clone(), v.clone(), w.clone()]).unwrap();
        prop_assert_eq!(&uvw, &f.apply_derivative(&p, &[w.clone(), u.clone(), v.clone()]).unwrap());
        prop_assert_eq!(&uvw, &f.apply_derivative(&p, &[v.clone(), w, u.clone()]).unwrap());
        let uv = f.apply_derivative(&p, &[u.clone(), v.clone()]).unwrap();
        prop_assert_eq!(uv, f.apply_derivative(&p, &[v, u]).unwrap());
    }

    #[test]
    fn derivative_is_multilinear(p in vec2(), u in vec2(), v in vec2(), w in vec2(), c in -5i64..=5) {
        let f = cubic_2d();
        let sum: Vec<Rational> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let scaled: Vec<Rational> = u.iter().map(|a| a * q(c)).collect();
        let at = |args: &[Vec<Rational>]| f.apply_derivative(&p, args).unwrap();
        let lhs = at(&[sum, w.clone()]);
        let rhs: Vec<Rational> = at(&[u.clone(), w.clone()]).iter().zip(at(&[v, w.clone()])).map(|(a, b)| a + b).collect();
        prop_assert_eq!(lhs, rhs);
        let homogeneous: Vec<Rational> = at(&[u, w.clone()]).iter().map(|a| a * q(c)).collect();
        prop_assert_eq!(at(&[scaled, w]), homogeneous);
    }

    #[test]
    fn stump_matches_filled_tree(base in 0usize..9, fill in prop::collection::vec(0usize..9, 0..3)) {
        let f = cubic_2d();
        let trees = enumerate_trees(4);
        let y0 = vec![q(1), Rational::new(1.into(), 2.into())];
        let at = SeriesVector::constant(&y0, 0);
        let base = trees[base % trees.len()].clone();
        let fill: Vec<_> = fill.iter().map(|&i| trees[i % trees.len()].clone()).collect();
        let args: Vec<SeriesVector> = fill
            .iter()
            .map(|t| SeriesVector::constant(&elementary_differential(&f, t, &y0).unwrap(), 0))
            .collect();
        let stump = Stump::new(base, fill.len());
        let via_stump = stump_differential(&f, &stump, &args, &at).unwrap().coefficient(0);
        let whole = stump.apply(&fill).unwrap();
        prop_assert_eq!(via_stump, elementary_differential(&f, &whole, &y0).unwrap());
    }
}

/// Taylor coefficients of the solution of `y' = f(y), y(0) = y0` by Picard iteration.
fn picard(field: &PolynomialVectorField, y0: &[Rational], n: usize) -> Vec<Vec<Rational>> {
    let mut y = SeriesVector::constant(y0, n);
    for _ in 0..=n {
        let fy = field.apply_derivative_series(&y, &[]).unwrap();
        let integrated: Vec<TruncatedSeries> = fy
            .components()
            .iter()
            .zip(y0)
            .map(|(s, c)| {
                let mut coeffs = vec![c.clone()];
                for k in 0..n {
                    coeffs.push(s.coeff(k) / q(k as i64 + 1));
                }
                TruncatedSeries::from_coefficients(coeffs)
            })
            .collect();
        y = SeriesVector::from_components(integrated);
    }
    y.coefficients()
}

#[test]
fn exact_flow_matches_picard_expansion() {
    for (field, y0) in [
        (PolynomialVectorField::quadratic_2d(), vec![q(1), q(-1)]),
        (cubic_2d(), vec![q(1), Rational::new(1.into(), 3.into())]),
        (PolynomialVectorField::riccati(), vec![q(2)]),
    ] {
        let via_trees = evaluate_bseries(&BSeries::exact_flow(6), &field, &y0, 6).unwrap();
        assert_eq!(via_trees.coefficients(), picard(&field, &y0, 6));
    }
}

#[test]
fn series_operations_agree_with_lower_truncation() {
    let f = PolynomialVectorField::quadratic_2d();
    let y0 = vec![q(1), q(-1)];
    let a = BSeries::random(3, 6, true);
    let b = BSeries::random(4, 6, false);
    let full = evaluate_bseries(&a, &f, &y0, 6).unwrap();
    let outer = evaluate_bseries_at_series(&b, &f, &full, 6).unwrap();
    for n in 1..6 {
        let low = evaluate_bseries(&a, &f, &y0, n).unwrap();
        assert_eq!(full.restrict(n), low);
        assert_eq!(
            outer.restrict(n),
            evaluate_bseries_at_series(&b, &f, &low, n).unwrap()
        );
    }
}

#[test]
fn derivatives_vanish_beyond_degree() {
    let f = PolynomialVectorField::quadratic_2d();
    let p = vec![q(3), q(-2)];
    let args = vec![vec![q(1), q(2)]; 3];
    assert!(f
        .apply_derivative(&p, &args)
        .unwrap()
        .iter()
        .all(Zero::is_zero));
}

#[test]
fn fixture_files_match_constructors() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for (file, field) in [
        ("riccati.json", PolynomialVectorField::riccati()),
        ("quadratic2d.json", PolynomialVectorField::quadratic_2d()),
    ] {
        let text = std::fs::read_to_string(dir.join(file)).unwrap();
        let loaded = PolynomialVectorField::from_json(&text).unwrap();
        assert_eq!(loaded, field, "{file}");
        assert_eq!(
            PolynomialVectorField::from_json(&field.to_json()).unwrap(),
            field
        );
    }
}
