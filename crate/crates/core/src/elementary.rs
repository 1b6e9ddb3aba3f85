//! Polynomial vector fields, truncated power series in `h`, and elementary
//! differentials evaluated either at a rational point or at a series point.
//!
//! Derivatives are taken symbolically on exponent vectors, so every Fréchet
//! derivative is exact and vanishes beyond the total degree.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::bseries::BSeries;
use crate::error::{Error, Result};
use crate::tree::{enumerate_trees, Tree};
use crate::{rational, Rational};

/// A scalar power series `c_0 + c_1 h + ... + c_N h^N`, known through order `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn zero(max_order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Rational::zero(); max_order + 1],
        }
    }

    pub fn constant(c: Rational, max_order: usize) -> Self {
        let mut s = TruncatedSeries::zero(max_order);
        s.coeffs[0] = c;
        s
    }

    pub fn from_coefficients(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least c_0");
        TruncatedSeries { coeffs }
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplication by `h^k`, dropping terms beyond the truncation.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let mut out = TruncatedSeries::zero(n - 1);
        for i in k..n {
            out.coeffs[i] = self.coeffs[i - k].clone();
        }
        out
    }

    pub fn restrict(&self, max_order: usize) -> Self {
        assert!(max_order <= self.max_order());
        TruncatedSeries {
            coeffs: self.coeffs[..=max_order].to_vec(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = TruncatedSeries::constant(Rational::one(), self.max_order());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

/// Sum known through the smaller of the two truncation orders.
impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Cauchy product known through the smaller of the two truncation orders.
impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs: out }
    }
}

/// A vector of power series, `Σ c_k h^k` with `c_k ∈ ℚ^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesVector {
    components: Vec<TruncatedSeries>,
}

impl SeriesVector {
    pub fn zero(dimension: usize, max_order: usize) -> Self {
        SeriesVector {
            components: vec![TruncatedSeries::zero(max_order); dimension],
        }
    }

    pub fn constant(v: &[Rational], max_order: usize) -> Self {
        SeriesVector {
            components: v
                .iter()
                .map(|c| TruncatedSeries::constant(c.clone(), max_order))
                .collect(),
        }
    }

    pub fn from_components(components: Vec<TruncatedSeries>) -> Self {
        SeriesVector { components }
    }

    /// Builds from coefficient vectors `c_0, ..., c_N`.
    pub fn from_coefficients(rows: &[Vec<Rational>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        SeriesVector {
            components: (0..d)
                .map(|i| {
                    TruncatedSeries::from_coefficients(rows.iter().map(|r| r[i].clone()).collect())
                })
                .collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn max_order(&self) -> usize {
        self.components
            .iter()
            .map(TruncatedSeries::max_order)
            .min()
            .unwrap_or(0)
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    /// The coefficient vector `c_k`.
    pub fn coefficient(&self, k: usize) -> Vec<Rational> {
        self.components.iter().map(|s| s.coeff(k).clone()).collect()
    }

    /// `c_0, ..., c_N`.
    pub fn coefficients(&self) -> Vec<Vec<Rational>> {
        (0..=self.max_order())
            .map(|k| self.coefficient(k))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SeriesVector {
            components: self.components.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn shift(&self, k: usize) -> Self {
        SeriesVector {
            components: self.components.iter().map(|s| s.shift(k)).collect(),
        }
    }

    pub fn restrict(&self, max_order: usize) -> Self {
        SeriesVector {
            components: self
                .components
                .iter()
                .map(|s| s.restrict(max_order))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(TruncatedSeries::is_zero)
    }
}

impl Add for &SeriesVector {
    type Output = SeriesVector;

    fn add(self, rhs: &SeriesVector) -> SeriesVector {
        assert_eq!(self.dimension(), rhs.dimension(), "dimension mismatch");
        SeriesVector {
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// A polynomial in `d` variables with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    dimension: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn zero(dimension: usize) -> Self {
        Polynomial {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(dimension: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Polynomial::zero(dimension);
        for (exponents, coeff) in terms {
            if exponents.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: exponents.len(),
                });
            }
            p.add_term(exponents, coeff);
        }
        Ok(p)
    }

    fn add_term(&mut self, exponents: Vec<u32>, coeff: Rational) {
        let slot = self.terms.entry(exponents).or_insert_with(Rational::zero);
        *slot += coeff;
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// `∂p/∂y_var`.
    pub fn partial(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.dimension);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut lowered = e.clone();
            lowered[var] -= 1;
            out.add_term(lowered, c * rational(e[var] as i64));
        }
        out
    }

    /// Evaluation at a series point.
    pub fn eval(&self, point: &[TruncatedSeries]) -> TruncatedSeries {
        let order = point
            .iter()
            .map(TruncatedSeries::max_order)
            .min()
            .unwrap_or(0);
        let mut acc = TruncatedSeries::zero(order);
        let mut powers: HashMap<(usize, u32), TruncatedSeries> = HashMap::new();
        for (e, c) in &self.terms {
            let mut monomial = TruncatedSeries::constant(c.clone(), order);
            for (var, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let p = powers.entry((var, k)).or_insert_with(|| point[var].pow(k));
                monomial = &monomial * p;
            }
            acc = &acc + &monomial;
        }
        acc
    }

    /// `p^{(m)}(point)[args_1, ..., args_m]` for `m = args.len()`.
    pub fn directional(
        &self,
        point: &[TruncatedSeries],
        args: &[&SeriesVector],
    ) -> TruncatedSeries {
        let order = point
            .iter()
            .map(TruncatedSeries::max_order)
            .chain(args.iter().map(|a| a.max_order()))
            .min()
            .unwrap_or(0);
        if self.is_zero() || (self.total_degree() as usize) < args.len() {
            return TruncatedSeries::zero(order);
        }
        let Some((first, rest)) = args.split_first() else {
            return self.eval(point).restrict(order);
        };
        let mut acc = TruncatedSeries::zero(order);
        for (var, direction) in first.components().iter().enumerate() {
            if direction.is_zero() {
                continue;
            }
            let d = self.partial(var);
            if d.is_zero() {
                continue;
            }
            acc = &acc + &(direction * &d.directional(point, rest));
        }
        acc
    }
}

/// `f: ℚ^d → ℚ^d` with polynomial components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialVectorField {
    dimension: usize,
    components: Vec<Polynomial>,
}

impl PolynomialVectorField {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let dimension = components.len();
        for p in &components {
            if p.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: p.dimension(),
                });
            }
        }
        Ok(PolynomialVectorField {
            dimension,
            components,
        })
    }

    /// Scalar `f(y) = y²`; `y' = y², y(0) = 1` has solution `1/(1-h)`.
    pub fn riccati() -> Self {
        let p = Polynomial::from_terms(1, [(vec![2], rational(1))]).expect("valid");
        PolynomialVectorField::new(vec![p]).expect("valid")
    }

    /// The two-dimensional quadratic fixture
    /// `f1 = y1² - 2 y1 y2 + y2 + 1`, `f2 = 2 y1 y2 - y2² - y1 + 2`.
    pub fn quadratic_2d() -> Self {
        let f1 = Polynomial::from_terms(
            2,
            [
                (vec![2, 0], rational(1)),
                (vec![1, 1], rational(-2)),
                (vec![0, 1], rational(1)),
                (vec![0, 0], rational(1)),
            ],
        )
        .expect("valid");
        let f2 = Polynomial::from_terms(
            2,
            [
                (vec![1, 1], rational(2)),
                (vec![0, 2], rational(-1)),
                (vec![1, 0], rational(-1)),
                (vec![0, 0], rational(2)),
            ],
        )
        .expect("valid");
        PolynomialVectorField::new(vec![f1, f2]).expect("valid")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn total_degree(&self) -> u32 {
        self.components
            .iter()
            .map(Polynomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dimension {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dimension,
                found,
            })
        }
    }

    /// The symmetric `m`-linear derivative `f^{(m)}(point)[args]` over series;
    /// `m = 0` is plain evaluation. The result is known through the smallest
    /// truncation order among the inputs.
    pub fn apply_derivative_series(
        &self,
        point: &SeriesVector,
        args: &[&SeriesVector],
    ) -> Result<SeriesVector> {
        self.check_dim(point.dimension())?;
        for a in args {
            self.check_dim(a.dimension())?;
        }
        Ok(SeriesVector::from_components(
            self.components
                .iter()
                .map(|p| p.directional(point.components(), args))
                .collect(),
        ))
    }

    /// `f^{(m)}(point)[args]` at a rational point.
    pub fn apply_derivative(
        &self,
        point: &[Rational],
        args: &[Vec<Rational>],
    ) -> Result<Vec<Rational>> {
        let point = SeriesVector::constant(point, 0);
        let args: Vec<SeriesVector> = args.iter().map(|a| SeriesVector::constant(a, 0)).collect();
        let refs: Vec<&SeriesVector> = args.iter().collect();
        Ok(self.apply_derivative_series(&point, &refs)?.coefficient(0))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.apply_derivative(point, &[])
    }

    pub fn to_json_value(&self) -> Value {
        let components: Vec<Value> = self
            .components
            .iter()
            .map(|p| {
                Value::Array(
                    p.terms()
                        .map(|(e, c)| json!({"coeff": c.to_string(), "exponents": e}))
                        .collect(),
                )
            })
            .collect();
        json!({"dimension": self.dimension, "components": components})
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("field serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let bad = |m: &str| Error::Format(m.to_string());
        let dimension = value
            .get("dimension")
            .and_then(Value::as_u64)
            .filter(|&d| d >= 1)
            .ok_or_else(|| bad("\"dimension\" must be a positive integer"))?
            as usize;
        let comps = value
            .get("components")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("\"components\" must be an array"))?;
        if comps.len() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: comps.len(),
            });
        }
        let mut components = Vec::with_capacity(dimension);
        for comp in comps {
            let terms = comp
                .as_array()
                .ok_or_else(|| bad("each component must be an array of terms"))?;
            let mut parsed = Vec::with_capacity(terms.len());
            for term in terms {
                let coeff = term
                    .get("coeff")
                    .and_then(Value::as_str)
                    .and_then(|s| s.parse::<Rational>().ok())
                    .ok_or_else(|| bad("\"coeff\" must be a rational string \"p/q\""))?;
                let exponents = term
                    .get("exponents")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("\"exponents\" must be an array"))?
                    .iter()
                    .map(|e| e.as_u64().map(|e| e as u32))
                    .collect::<Option<Vec<u32>>>()
                    .ok_or_else(|| bad("exponents must be nonnegative integers"))?;
                parsed.push((exponents, coeff));
            }
            components.push(Polynomial::from_terms(dimension, parsed)?);
        }
        PolynomialVectorField::new(components)
    }
}

/// Memoised elementary differentials `F(t)(at)` for one field and one point.
pub struct Differentials<'a> {
    field: &'a PolynomialVectorField,
    at: SeriesVector,
    cache: HashMap<Tree, SeriesVector>,
}

impl<'a> Differentials<'a> {
    pub fn new(field: &'a PolynomialVectorField, at: SeriesVector) -> Result<Self> {
        field.check_dim(at.dimension())?;
        Ok(Differentials {
            field,
            at,
            cache: HashMap::new(),
        })
    }

    pub fn point(&self) -> &SeriesVector {
        &self.at
    }

    /// `F(τ) = f`, `F([t1 ... tm]) = f^{(m)}[F(t1), ..., F(tm)]`.
    pub fn get(&mut self, t: &Tree) -> SeriesVector {
        if let Some(v) = self.cache.get(t) {
            return v.clone();
        }
        let branches: Vec<SeriesVector> = t.children().iter().map(|c| self.get(c)).collect();
        let refs: Vec<&SeriesVector> = branches.iter().collect();
        let v = self
            .field
            .apply_derivative_series(&self.at, &refs)
            .expect("dimensions checked at construction");
        self.cache.insert(t.clone(), v.clone());
        v
    }

    /// `F(t*^n)[args] = f^{(m+n)}[F(t1), ..., F(tm), args]`.
    pub fn stump(&mut self, stump: &Stump, args: &[&SeriesVector]) -> Result<SeriesVector> {
        if args.len() != stump.blanks {
            return Err(Error::ArityMismatch {
                expected: stump.blanks,
                found: args.len(),
            });
        }
        let branches: Vec<SeriesVector> =
            stump.base.children().iter().map(|c| self.get(c)).collect();
        let refs: Vec<&SeriesVector> = branches.iter().chain(args.iter().copied()).collect();
        self.field.apply_derivative_series(&self.at, &refs)
    }
}

/// A tree with `blanks` extra root edges whose far ends are left open.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stump {
    pub base: Tree,
    pub blanks: usize,
}

impl Stump {
    pub fn new(base: Tree, blanks: usize) -> Self {
        Stump { base, blanks }
    }

    /// `t*^n t'_1 ... t'_n = [t1 ... tm t'_1 ... t'_n]`.
    pub fn apply(&self, fill: &[Tree]) -> Result<Tree> {
        if fill.len() != self.blanks {
            return Err(Error::ArityMismatch {
                expected: self.blanks,
                found: fill.len(),
            });
        }
        Ok(Tree::node(
            self.base
                .children()
                .iter()
                .cloned()
                .chain(fill.iter().cloned()),
        ))
    }
}

/// `F(t)(y0)`.
pub fn elementary_differential(
    field: &PolynomialVectorField,
    t: &Tree,
    y0: &[Rational],
) -> Result<Vec<Rational>> {
    let mut d = Differentials::new(field, SeriesVector::constant(y0, 0))?;
    Ok(d.get(t).coefficient(0))
}

/// `F(t)(Y)` at a series point.
pub fn elementary_differential_at_series(
    field: &PolynomialVectorField,
    t: &Tree,
    at: &SeriesVector,
) -> Result<SeriesVector> {
    Ok(Differentials::new(field, at.clone())?.get(t))
}

/// `F(t*^n)(at)[args]`.
pub fn stump_differential(
    field: &PolynomialVectorField,
    stump: &Stump,
    args: &[SeriesVector],
    at: &SeriesVector,
) -> Result<SeriesVector> {
    let refs: Vec<&SeriesVector> = args.iter().collect();
    Differentials::new(field, at.clone())?.stump(stump, &refs)
}

fn check_truncation(series: &BSeries, max_order: usize) -> Result<()> {
    if series.max_order() < max_order {
        return Err(Error::Truncation {
            order: max_order,
            max_order: series.max_order(),
        });
    }
    Ok(())
}

/// `(B_h y0) a = a(∅) y0 + Σ h^{|t|} a(t)/σ(t) F(t)(y0)` through `h^N`.
pub fn evaluate_bseries(
    a: &BSeries,
    field: &PolynomialVectorField,
    y0: &[Rational],
    max_order: usize,
) -> Result<SeriesVector> {
    check_truncation(a, max_order)?;
    let mut diffs = Differentials::new(field, SeriesVector::constant(y0, 0))?;
    let mut rows = vec![vec![Rational::zero(); field.dimension()]; max_order + 1];
    rows[0] = y0.iter().map(|c| c * a.empty()).collect();
    for t in enumerate_trees(max_order) {
        let weight = a.get(&t)? / rational(t.symmetry() as i64);
        if weight.is_zero() {
            continue;
        }
        let ft = diffs.get(&t).coefficient(0);
        for (slot, v) in rows[t.order()].iter_mut().zip(ft) {
            *slot += &weight * v;
        }
    }
    Ok(SeriesVector::from_coefficients(&rows))
}

/// `(B_h Y) b = b(∅) Y + Σ h^{|t|} b(t)/σ(t) F(t)(Y)` through `h^N`.
pub fn evaluate_bseries_at_series(
    b: &BSeries,
    field: &PolynomialVectorField,
    at: &SeriesVector,
    max_order: usize,
) -> Result<SeriesVector> {
    check_truncation(b, max_order)?;
    if at.max_order() < max_order {
        return Err(Error::Truncation {
            order: max_order,
            max_order: at.max_order(),
        });
    }
    let at = at.restrict(max_order);
    let mut acc = at.scale(b.empty());
    let mut diffs = Differentials::new(field, at)?;
    for t in enumerate_trees(max_order) {
        let weight = b.get(&t)? / rational(t.symmetry() as i64);
        if weight.is_zero() {
            continue;
        }
        acc = &acc + &diffs.get(&t).scale(&weight).shift(t.order());
    }
    Ok(acc)
}
