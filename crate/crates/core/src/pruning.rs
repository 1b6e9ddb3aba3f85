//! Subtrees, root-preserving embeddings, assignment matrices and pruning.
//!
//! Two independent routes compute the pruning `t \ t'`:
//!
//! - [`prune_by_embeddings`] sums the forest left behind over every injective,
//!   root-preserving, edge-preserving map of `t'` into `t`. Each vertex subset is
//!   therefore counted `σ(t')` times.
//! - [`prune_by_assignments`] recurses on the root branches: an assignment matrix
//!   distributes the branches of `t` between "untouched" (row 0) and the branches
//!   of `t'`, weighted by multinomial coefficients. This counts each vertex subset
//!   once, and is the canonical [`prune`].

use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;
use crate::factorial;
use crate::forest::{Forest, ForestSum};
use crate::tree::Tree;
use crate::Rational;

/// A concrete labelling of a canonical tree: vertex 0 is the root and every
/// other vertex's parent has a smaller index (pre-order over canonical branches).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    source: Tree,
}

impl LabelledTree {
    pub fn new(t: &Tree) -> LabelledTree {
        let mut parent = Vec::with_capacity(t.order());
        fn visit(t: &Tree, up: Option<usize>, parent: &mut Vec<Option<usize>>) {
            let idx = parent.len();
            parent.push(up);
            for child in t.children().iter() {
                visit(child, Some(idx), parent);
            }
        }
        visit(t, None, &mut parent);
        let mut children = vec![Vec::new(); parent.len()];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        LabelledTree {
            parent,
            children,
            source: t.clone(),
        }
    }

    pub fn parent(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children_of(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn source(&self) -> &Tree {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Canonical tree of the vertices below `v` (inclusive) that satisfy `keep`.
    /// `keep(v)` is assumed.
    pub fn induced_tree(&self, v: usize, keep: &dyn Fn(usize) -> bool) -> Tree {
        Tree::node(
            self.children[v]
                .iter()
                .filter(|&&c| keep(c))
                .map(|&c| self.induced_tree(c, keep)),
        )
    }

    /// Rebuilds the canonical tree from the parent array.
    pub fn canonicalize(&self) -> Tree {
        self.induced_tree(0, &|_| true)
    }

    /// Forest induced on the vertices outside `taken`.
    pub fn complement_forest(&self, taken: &[bool]) -> Forest {
        let keep = |v: usize| !taken[v];
        (0..self.len())
            .filter(|&v| keep(v) && self.parent[v].is_none_or(|p| taken[p]))
            .map(|v| self.induced_tree(v, &keep))
            .collect()
    }

    /// Every vertex set that contains the root and is closed under taking parents,
    /// i.e. every connected root-containing subset.
    pub fn root_subsets(&self) -> Vec<Vec<bool>> {
        let mut out = Vec::new();
        let mut mask = vec![false; self.len()];
        mask[0] = true;
        self.extend_subsets(1, &mut mask, &mut out);
        out
    }

    fn extend_subsets(&self, v: usize, mask: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if v == self.len() {
            out.push(mask.clone());
            return;
        }
        self.extend_subsets(v + 1, mask, out);
        if self.parent[v].is_some_and(|p| mask[p]) {
            mask[v] = true;
            self.extend_subsets(v + 1, mask, out);
            mask[v] = false;
        }
    }
}

/// An injective root-preserving map from the vertices of a labelled `t'` into a
/// labelled `t` that sends edges to edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn image_mask(&self, target_len: usize) -> Vec<bool> {
        let mut mask = vec![false; target_len];
        for &v in &self.map {
            mask[v] = true;
        }
        mask
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// All embeddings of `t_sub` into `t` (both labelled by [`LabelledTree::new`]).
pub fn enumerate_embeddings(t_sub: &Tree, t: &Tree) -> Vec<Embedding> {
    let mut out = Vec::new();
    search_embeddings(t_sub, t, usize::MAX, &mut out);
    out
}

/// `t_sub ≤ t`: some embedding exists.
pub fn is_subtree(t_sub: &Tree, t: &Tree) -> bool {
    let mut out = Vec::new();
    search_embeddings(t_sub, t, 1, &mut out);
    !out.is_empty()
}

fn search_embeddings(t_sub: &Tree, t: &Tree, limit: usize, out: &mut Vec<Embedding>) {
    if t_sub.order() > t.order() {
        return;
    }
    let small = LabelledTree::new(t_sub);
    let big = LabelledTree::new(t);
    let mut map = vec![0usize; small.len()];
    let mut used = vec![false; big.len()];
    used[0] = true;
    extend_embedding(&small, &big, 1, &mut map, &mut used, limit, out);
}

fn extend_embedding(
    small: &LabelledTree,
    big: &LabelledTree,
    v: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    limit: usize,
    out: &mut Vec<Embedding>,
) {
    if out.len() >= limit {
        return;
    }
    if v == small.len() {
        out.push(Embedding { map: map.clone() });
        return;
    }
    // parent[v] < v, so its image is already fixed
    let anchor = map[small.parent[v].expect("non-root vertex has a parent")];
    for &w in big.children_of(anchor) {
        if used[w] {
            continue;
        }
        used[w] = true;
        map[v] = w;
        extend_embedding(small, big, v + 1, map, used, limit, out);
        used[w] = false;
    }
}

/// Distinct subtrees `t' ≤ t`, canonically sorted.
pub fn enumerate_subtrees(t: &Tree) -> Vec<Tree> {
    let labelled = LabelledTree::new(t);
    let mut out: Vec<Tree> = labelled
        .root_subsets()
        .into_iter()
        .map(|mask| labelled.induced_tree(0, &|v| mask[v]))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Pruning as the sum over all embeddings of the induced complement forest.
pub fn prune_by_embeddings(t: &Tree, t_sub: &Tree) -> ForestSum {
    let labelled = LabelledTree::new(t);
    let mut out = ForestSum::zero();
    for e in enumerate_embeddings(t_sub, t) {
        let taken = e.image_mask(labelled.len());
        out.add_term(labelled.complement_forest(&taken), crate::rational(1));
    }
    out
}

/// `(n'+1) × n` matrix distributing the branches of `t` (columns, distinct
/// `t_j` in canonical order) over "untouched" (row 0) and the distinct
/// branches `t'_i` of `t'` (rows 1..).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssignmentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<usize>,
}

impl AssignmentMatrix {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> AssignmentMatrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        AssignmentMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }
}

impl fmt::Display for AssignmentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for AssignmentMatrix {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rows = Vec::new();
        let mut base = 0;
        for row in s.split("; ") {
            let mut entries = Vec::new();
            let mut offset = base;
            for cell in row.split(' ') {
                let v = cell
                    .parse::<usize>()
                    .map_err(|_| ParseError::new(offset, "expected a nonnegative integer"))?;
                entries.push(v);
                offset += cell.len() + 1;
            }
            if rows
                .first()
                .is_some_and(|r: &Vec<usize>| r.len() != entries.len())
            {
                return Err(ParseError::new(base, "row length differs from row 0"));
            }
            rows.push(entries);
            base += row.len() + 2;
        }
        Ok(AssignmentMatrix::from_rows(rows))
    }
}

// Recursive prunings t_j \ t'_i for every branch pair; zero marks infeasible pairs.
struct BranchTable<'a> {
    cols: &'a [(Tree, usize)],
    rows: &'a [(Tree, usize)],
    prunes: Vec<Vec<ForestSum>>,
}

impl<'a> BranchTable<'a> {
    fn new(t_sub: &'a Tree, t: &'a Tree) -> Self {
        let cols = t.branches();
        let rows = t_sub.branches();
        let prunes = rows
            .iter()
            .map(|(ti, _)| {
                cols.iter()
                    .map(|(tj, _)| prune_by_assignments(tj, ti))
                    .collect()
            })
            .collect();
        BranchTable { cols, rows, prunes }
    }

    fn feasible(&self, i: usize, j: usize) -> bool {
        !self.prunes[i][j].is_zero()
    }

    fn assignments(&self) -> Vec<AssignmentMatrix> {
        let n = self.cols.len();
        let mut capacity: Vec<usize> = self.cols.iter().map(|(_, k)| *k).collect();
        let mut grid = vec![vec![0usize; n]; self.rows.len() + 1];
        let mut out = Vec::new();
        self.fill_row(
            0,
            0,
            self.rows.first().map_or(0, |r| r.1),
            &mut capacity,
            &mut grid,
            &mut out,
        );
        out
    }

    // Distributes the remaining multiplicity of row i+1 over columns j.. and
    // recurses; row 0 takes whatever capacity is left at the end.
    fn fill_row(
        &self,
        i: usize,
        j: usize,
        remaining: usize,
        capacity: &mut Vec<usize>,
        grid: &mut Vec<Vec<usize>>,
        out: &mut Vec<AssignmentMatrix>,
    ) {
        if i == self.rows.len() {
            grid[0].clone_from(capacity);
            out.push(AssignmentMatrix::from_rows(grid.clone()));
            return;
        }
        if j == self.cols.len() {
            if remaining == 0 {
                let next = self.rows.get(i + 1).map_or(0, |r| r.1);
                self.fill_row(i + 1, 0, next, capacity, grid, out);
            }
            return;
        }
        let most = if self.feasible(i, j) {
            remaining.min(capacity[j])
        } else {
            0
        };
        for take in (0..=most).rev() {
            capacity[j] -= take;
            grid[i + 1][j] = take;
            self.fill_row(i, j + 1, remaining - take, capacity, grid, out);
            grid[i + 1][j] = 0;
            capacity[j] += take;
        }
    }

    fn term(&self, m: &AssignmentMatrix) -> ForestSum {
        let mut acc = ForestSum::one();
        for (j, (tj, kj)) in self.cols.iter().enumerate() {
            let denom: u64 = (0..m.rows()).map(|i| factorial(m.get(i, j))).product();
            let weight = Rational::from_integer((factorial(*kj) / denom).into());
            let mut column = ForestSum::term(Forest::single(tj.clone()).pow(m.get(0, j)), weight);
            for i in 1..m.rows() {
                let count = m.get(i, j);
                if count > 0 {
                    column = &column * &self.prunes[i - 1][j].pow(count);
                }
            }
            acc = &acc * &column;
        }
        acc
    }
}

/// All assignment matrices for the pair `(t_sub, t)`.
pub fn enumerate_assignments(t_sub: &Tree, t: &Tree) -> Vec<AssignmentMatrix> {
    if t_sub.order() > t.order() {
        return Vec::new();
    }
    BranchTable::new(t_sub, t).assignments()
}

/// The pruning contributed by a single assignment `m` of `(t_sub, t)`.
pub fn assignment_term(t: &Tree, t_sub: &Tree, m: &AssignmentMatrix) -> ForestSum {
    BranchTable::new(t_sub, t).term(m)
}

/// Pruning by the assignment recursion, with `τ \ τ = 1`.
/// Returns the zero sum iff `t_sub` is not a subtree of `t`.
pub fn prune_by_assignments(t: &Tree, t_sub: &Tree) -> ForestSum {
    if t_sub.order() > t.order() {
        return ForestSum::zero();
    }
    let table = BranchTable::new(t_sub, t);
    let mut out = ForestSum::zero();
    for m in table.assignments() {
        out = &out + &table.term(&m);
    }
    out
}

/// Canonical pruning `t \ t'` (each vertex subset counted once).
pub fn prune(t: &Tree, t_sub: &Tree) -> ForestSum {
    prune_by_assignments(t, t_sub)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PruningSemantics {
    /// Vertex-subset count, the canonical semantics.
    #[default]
    Assignment,
    /// Raw count over embedding maps, `σ(t')` times the canonical result.
    Embedding,
}

pub fn prune_with(semantics: PruningSemantics, t: &Tree, t_sub: &Tree) -> ForestSum {
    match semantics {
        PruningSemantics::Assignment => prune_by_assignments(t, t_sub),
        PruningSemantics::Embedding => prune_by_embeddings(t, t_sub),
    }
}
