//! Canonical unlabelled rooted trees.
//!
//! A tree is stored as the sorted multiset of its root branches, so two trees are
//! isomorphic exactly when their canonical forms are equal. The total order used
//! for sorting compares vertex counts first and then the branch sequences
//! lexicographically (each branch repeated by its multiplicity).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::ParseError;
use crate::factorial;
use crate::forest::Forest;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree(Arc<Node>);

#[derive(PartialEq, Eq, Hash)]
struct Node {
    children: Forest,
    order: usize,
}

impl Tree {
    /// The single-vertex tree τ.
    pub fn leaf() -> Tree {
        Tree::graft(Forest::identity())
    }

    /// `[f]`: attach the roots of every tree in `children` to a new root.
    pub fn graft(children: Forest) -> Tree {
        let order = 1 + children.order();
        Tree(Arc::new(Node { children, order }))
    }

    /// Builds `[t1 t2 ... tm]` from branches given in any order.
    pub fn node<I: IntoIterator<Item = Tree>>(children: I) -> Tree {
        Tree::graft(Forest::from_trees(children))
    }

    /// Root branches as a forest.
    pub fn children(&self) -> &Forest {
        &self.0.children
    }

    /// Distinct root branches `t_j` with their multiplicities `k_j`, canonically sorted.
    pub fn branches(&self) -> &[(Tree, usize)] {
        self.0.children.entries()
    }

    /// Number of vertices.
    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn is_leaf(&self) -> bool {
        self.0.order == 1
    }

    /// Number of root-preserving automorphisms, `σ(τ) = 1`, `σ(t) = Π k_i! σ(t_i)^{k_i}`.
    pub fn symmetry(&self) -> u64 {
        self.branches()
            .iter()
            .map(|(t, k)| factorial(*k) * t.symmetry().pow(*k as u32))
            .product()
    }

    /// Density `γ(t) = |t| Π γ(t_i)`; the exact flow has coefficients `1/γ(t)`.
    pub fn density(&self) -> u64 {
        self.branches()
            .iter()
            .map(|(t, k)| t.density().pow(*k as u32))
            .product::<u64>()
            * self.order() as u64
    }

    /// Every tree obtained by attaching one new leaf to some vertex.
    pub fn add_leaf_everywhere(&self) -> Vec<Tree> {
        let mut out = vec![Tree::node(
            self.children()
                .iter()
                .cloned()
                .chain(std::iter::once(Tree::leaf())),
        )];
        for (idx, (branch, _)) in self.branches().iter().enumerate() {
            for grown in branch.add_leaf_everywhere() {
                let mut rest: Vec<Tree> = Vec::with_capacity(self.children().len());
                for (j, (t, k)) in self.branches().iter().enumerate() {
                    let copies = if j == idx { k - 1 } else { *k };
                    rest.extend(std::iter::repeat_n(t.clone(), copies));
                }
                rest.push(grown);
                out.push(Tree::node(rest));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.order()
            .cmp(&other.order())
            .then_with(|| self.children().cmp(other.children()))
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All distinct trees with at most `max_order` vertices, in canonical order.
pub fn enumerate_trees(max_order: usize) -> Vec<Tree> {
    let mut all: Vec<Tree> = Vec::new();
    for n in 1..=max_order {
        let mut fresh = Vec::new();
        let mut stack = Vec::new();
        collect_forests(&all, n - 1, 0, &mut stack, &mut fresh);
        fresh.sort();
        all.extend(fresh);
    }
    all
}

/// Trees of exactly `order` vertices.
pub fn trees_of_order(order: usize) -> Vec<Tree> {
    enumerate_trees(order)
        .into_iter()
        .filter(|t| t.order() == order)
        .collect()
}

// Multisets drawn from `pool` (sorted by order) with total order `remaining`,
// choosing indices in nondecreasing order so each multiset is produced once.
fn collect_forests(
    pool: &[Tree],
    remaining: usize,
    start: usize,
    stack: &mut Vec<Tree>,
    out: &mut Vec<Tree>,
) {
    if remaining == 0 {
        out.push(Tree::node(stack.iter().cloned()));
        return;
    }
    for (i, t) in pool.iter().enumerate().skip(start) {
        if t.order() > remaining {
            break;
        }
        stack.push(t.clone());
        collect_forests(pool, remaining - t.order(), i, stack, out);
        stack.pop();
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            return f.write_str(".");
        }
        f.write_str("[")?;
        for (i, t) in self.children().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

impl FromStr for Tree {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser::new(s, 0);
        let t = parser.tree()?;
        parser.finish()?;
        Ok(t)
    }
}

/// Recursive-descent reader for `tree ::= "." | "[" tree (" " tree)* "]"`.
pub(crate) struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> Parser<'a> {
    /// `base` is added to every reported offset, for parsing substrings.
    pub(crate) fn new(text: &'a str, base: usize) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            base,
        }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError::new(self.base + self.pos, message)
    }

    pub(crate) fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    pub(crate) fn bump(&mut self) {
        self.pos += 1;
    }

    pub(crate) fn tree(&mut self) -> Result<Tree, ParseError> {
        match self.peek() {
            Some(b'.') => {
                self.pos += 1;
                Ok(Tree::leaf())
            }
            Some(b'[') => {
                self.pos += 1;
                let mut children = vec![self.tree()?];
                loop {
                    match self.peek() {
                        Some(b' ') => {
                            self.pos += 1;
                            children.push(self.tree()?);
                        }
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(Tree::node(children));
                        }
                        Some(_) => return Err(self.error("expected ' ' or ']'")),
                        None => return Err(self.error("unexpected end of input, expected ']'")),
                    }
                }
            }
            Some(_) => Err(self.error("expected '.' or '['")),
            None => Err(self.error("unexpected end of input, expected a tree")),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    #[test]
    fn parse_leaf_and_commuted_children() {
        assert_eq!(t("."), Tree::leaf());
        assert_eq!(t("[. [.]]"), t("[[.] .]"));
        assert_eq!(t("[[.] .]").to_string(), "[. [.]]");
        assert_eq!(t("[. .]").to_string(), "[. .]");
    }

    #[test]
    fn parse_wide_tree() {
        let big = t("[. [.] [.] [.] [. .]]");
        assert_eq!(big.order(), 11);
        let branches: Vec<(String, usize)> = big
            .branches()
            .iter()
            .map(|(b, k)| (b.to_string(), *k))
            .collect();
        assert_eq!(
            branches,
            vec![
                (".".to_string(), 1),
                ("[.]".to_string(), 3),
                ("[. .]".to_string(), 1)
            ]
        );
    }

    #[test]
    fn parse_errors_report_offsets() {
        let cases = [
            ("", 0),
            ("[]", 1),
            ("[.", 2),
            ("[..]", 2),
            ("[.  .]", 3),
            (". ", 1),
            ("x", 0),
            ("[. [.] x]", 7),
        ];
        for (text, offset) in cases {
            let err = text.parse::<Tree>().unwrap_err();
            assert_eq!(err.offset, offset, "input {text:?}: {err}");
        }
    }

    #[test]
    fn make_node_merges_equal_children() {
        assert_eq!(Tree::node([]), Tree::leaf());
        assert_eq!(Tree::node([Tree::leaf(), Tree::leaf()]), t("[. .]"));
        let merged = Tree::node([t("[.]"), t("[. .]"), t("[. .]")]);
        assert_eq!(merged.branches().len(), 2);
        assert_eq!(merged.branches()[1].1, 2);
        assert_eq!(merged.to_string(), "[[.] [. .] [. .]]");
    }

    #[test]
    fn order_symmetry_density() {
        assert_eq!(Tree::leaf().order(), 1);
        assert_eq!(t("[. [.] [.] [.] [. .]]").order(), 11);
        assert_eq!(Tree::leaf().symmetry(), 1);
        assert_eq!(t("[. .]").symmetry(), 2);
        assert_eq!(t("[. [.] [.] [.] [. .]]").symmetry(), 12);
        assert_eq!(Tree::leaf().density(), 1);
        assert_eq!(t("[.]").density(), 2);
        assert_eq!(t("[[.]]").density(), 6);
        assert_eq!(t("[. .]").density(), 3);
    }

    #[test]
    fn canonical_order_examples() {
        assert!(Tree::leaf() < t("[.]"));
        assert_eq!(t("[. [.]]").cmp(&t("[[.] .]")), Ordering::Equal);
        assert!(t("[. .]") < t("[[.]]"));
    }

    #[test]
    fn small_enumeration_matches_displayed_order() {
        assert_eq!(enumerate_trees(1), vec![Tree::leaf()]);
        let four: Vec<String> = enumerate_trees(4).iter().map(|t| t.to_string()).collect();
        assert_eq!(
            four,
            vec![".", "[.]", "[. .]", "[[.]]", "[. . .]", "[. [.]]", "[[. .]]", "[[[.]]]"]
        );
    }

    #[test]
    fn add_leaf_everywhere_grows_order() {
        let grown = t("[. [.]]").add_leaf_everywhere();
        assert!(grown.iter().all(|g| g.order() == 5));
        // root, first leaf, [.] root, its leaf
        assert_eq!(grown.len(), 4);
    }
}
