//! Forests and the forest space.
//!
//! A [`Forest`] is a finite multiset of trees; the empty forest is the identity `1`.
//! A [`ForestSum`] is a finite rational linear combination of forests, a commutative
//! ring under juxtaposition.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::ParseError;
use crate::tree::{Parser, Tree};
use crate::Rational;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Forest {
    // strictly increasing trees with positive multiplicities
    entries: Vec<(Tree, usize)>,
    order: usize,
}

impl Forest {
    /// The empty forest `1`.
    pub fn identity() -> Forest {
        Forest::default()
    }

    pub fn single(t: Tree) -> Forest {
        let order = t.order();
        Forest {
            entries: vec![(t, 1)],
            order,
        }
    }

    pub fn from_trees<I: IntoIterator<Item = Tree>>(trees: I) -> Forest {
        let mut trees: Vec<Tree> = trees.into_iter().collect();
        trees.sort();
        let mut entries: Vec<(Tree, usize)> = Vec::new();
        let mut order = 0;
        for t in trees {
            order += t.order();
            match entries.last_mut() {
                Some((last, k)) if *last == t => *k += 1,
                _ => entries.push((t, 1)),
            }
        }
        Forest { entries, order }
    }

    /// The root branches `{t1, ..., tm}` of `t`; τ gives the identity forest.
    pub fn of_children(t: &Tree) -> Forest {
        t.children().clone()
    }

    /// `[f]`.
    pub fn graft(&self) -> Tree {
        Tree::graft(self.clone())
    }

    /// Distinct trees with multiplicities, canonically sorted.
    pub fn entries(&self) -> &[(Tree, usize)] {
        &self.entries
    }

    /// Trees with repetition, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Tree> + Clone {
        self.entries
            .iter()
            .flat_map(|(t, k)| std::iter::repeat_n(t, *k))
    }

    /// Number of trees counted with multiplicity.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|(_, k)| k).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// Total number of vertices.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Multiset union.
    pub fn juxtapose(&self, other: &Forest) -> Forest {
        if self.is_identity() {
            return other.clone();
        }
        if other.is_identity() {
            return self.clone();
        }
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some((ta, ka)), Some((tb, kb))) => match ta.cmp(tb) {
                    Ordering::Less => {
                        entries.push((ta.clone(), *ka));
                        a.next();
                    }
                    Ordering::Greater => {
                        entries.push((tb.clone(), *kb));
                        b.next();
                    }
                    Ordering::Equal => {
                        entries.push((ta.clone(), ka + kb));
                        a.next();
                        b.next();
                    }
                },
                (Some(_), None) => entries.extend(a.by_ref().cloned()),
                (None, Some(_)) => entries.extend(b.by_ref().cloned()),
                (None, None) => break,
            }
        }
        Forest {
            entries,
            order: self.order + other.order,
        }
    }

    pub fn pow(&self, k: usize) -> Forest {
        if k == 0 {
            return Forest::identity();
        }
        Forest {
            entries: self
                .entries
                .iter()
                .map(|(t, m)| (t.clone(), m * k))
                .collect(),
            order: self.order * k,
        }
    }
}

/// Forests are ordered like the trees `[f]` they graft to: by order, then
/// lexicographically on the sorted tree sequence.
impl Ord for Forest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order
            .cmp(&other.order)
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<Tree> for Forest {
    fn from_iter<I: IntoIterator<Item = Tree>>(iter: I) -> Self {
        Forest::from_trees(iter)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        for (i, t) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Forest({self})")
    }
}

fn parse_forest_at(s: &str, base: usize) -> Result<Forest, ParseError> {
    if s == "1" {
        return Ok(Forest::identity());
    }
    let mut parser = Parser::new(s, base);
    let mut trees = vec![parser.tree()?];
    while parser.peek() == Some(b' ') {
        parser.bump();
        trees.push(parser.tree()?);
    }
    parser.finish()?;
    Ok(Forest::from_trees(trees))
}

impl FromStr for Forest {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_forest_at(s, 0)
    }
}

/// Element of the forest space: a finite rational combination of forests.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ForestSum {
    terms: BTreeMap<Forest, Rational>,
}

impl ForestSum {
    pub fn zero() -> ForestSum {
        ForestSum::default()
    }

    /// `1·(identity forest)`.
    pub fn one() -> ForestSum {
        ForestSum::term(Forest::identity(), Rational::one())
    }

    pub fn term(forest: Forest, coeff: Rational) -> ForestSum {
        let mut s = ForestSum::zero();
        s.add_term(forest, coeff);
        s
    }

    pub fn from_forest(forest: Forest) -> ForestSum {
        ForestSum::term(forest, Rational::one())
    }

    pub fn from_tree(t: Tree) -> ForestSum {
        ForestSum::from_forest(Forest::single(t))
    }

    pub fn add_term(&mut self, forest: Forest, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(forest);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Terms sorted by forest order, then canonical forest order.
    pub fn terms(&self) -> impl Iterator<Item = (&Forest, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coefficient(&self, forest: &Forest) -> Rational {
        self.terms
            .get(forest)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> ForestSum {
        if c.is_zero() {
            return ForestSum::zero();
        }
        ForestSum {
            terms: self.terms.iter().map(|(f, v)| (f.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> ForestSum {
        let mut acc = ForestSum::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &ForestSum {
    type Output = ForestSum;

    fn add(self, rhs: &ForestSum) -> ForestSum {
        let mut out = self.clone();
        for (f, c) in rhs.terms() {
            out.add_term(f.clone(), c.clone());
        }
        out
    }
}

impl Mul for &ForestSum {
    type Output = ForestSum;

    fn mul(self, rhs: &ForestSum) -> ForestSum {
        let mut out = ForestSum::zero();
        for (fa, ca) in self.terms() {
            for (fb, cb) in rhs.terms() {
                out.add_term(fa.juxtapose(fb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for ForestSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (forest, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*({forest})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ForestSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ForestSum({self})")
    }
}

impl FromStr for ForestSum {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "0" {
            return Ok(ForestSum::zero());
        }
        let mut out = ForestSum::zero();
        let mut base = 0;
        for piece in s.split(" + ") {
            let star = piece
                .find("*(")
                .ok_or_else(|| ParseError::new(base, "expected '<rational>*(<forest>)'"))?;
            let coeff: Rational = piece[..star]
                .parse()
                .map_err(|_| ParseError::new(base, "invalid rational coefficient"))?;
            let inner_start = star + 2;
            if !piece.ends_with(')') || piece.len() < inner_start + 1 {
                return Err(ParseError::new(base + piece.len(), "expected ')'"));
            }
            let forest = parse_forest_at(&piece[inner_start..piece.len() - 1], base + inner_start)?;
            if out.terms.contains_key(&forest) {
                return Err(ParseError::new(base, "duplicate forest term"));
            }
            if coeff.is_zero() {
                return Err(ParseError::new(base, "zero coefficient"));
            }
            out.add_term(forest, coeff);
            base += piece.len() + 3;
        }
        Ok(out)
    }
}
