//! Exact non-negative matrices: rectangularity, block decomposition and
//! block-rank-1 tests.
//!
//! A matrix is *rectangular* when its positive entries are exactly the union
//! of disjoint `A_k x B_k` blocks, and *block-rank-1* when in addition every
//! block has rank one. Blocks are the connected components of the bipartite
//! support graph; zero rows and columns belong to no block.

use std::fmt;

use num_traits::Zero;

use crate::disjoint_set::DisjointSet;
use crate::error::{Error, Result};
use crate::model::Tuple;
use crate::weight::{self, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    row_labels: Vec<Tuple>,
    col_labels: Vec<Tuple>,
    entries: Vec<Weight>,
}

impl RationalMatrix {
    pub fn new(row_labels: Vec<Tuple>, col_labels: Vec<Tuple>, entries: Vec<Weight>) -> Result<Self> {
        if entries.len() != row_labels.len() * col_labels.len() {
            return Err(Error::invalid(format!(
                "{}x{} matrix needs {} entries, got {}",
                row_labels.len(),
                col_labels.len(),
                row_labels.len() * col_labels.len(),
                entries.len()
            )));
        }
        if entries.iter().any(|w| w < &Weight::zero()) {
            return Err(Error::invalid("matrix entries must be non-negative"));
        }
        Ok(Self {
            row_labels,
            col_labels,
            entries,
        })
    }

    /// Builds a matrix from rows, labelling row `i` and column `j` by `[i]`
    /// and `[j]`.
    pub fn from_rows(rows: Vec<Vec<Weight>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::invalid("ragged rows"));
        }
        Self::new(
            (0..nrows).map(|i| vec![i]).collect(),
            (0..ncols).map(|j| vec![j]).collect(),
            rows.into_iter().flatten().collect(),
        )
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| weight::int(v)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[Tuple] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[Tuple] {
        &self.col_labels
    }

    pub fn get(&self, i: usize, j: usize) -> &Weight {
        &self.entries[i * self.ncols() + j]
    }

    pub fn row(&self, i: usize) -> &[Weight] {
        let c = self.ncols();
        &self.entries[i * c..(i + 1) * c]
    }

    fn positive(&self, i: usize, j: usize) -> bool {
        weight::is_positive(self.get(i, j))
    }

    pub fn entries(&self) -> &[Weight] {
        &self.entries
    }

    pub fn total(&self) -> Weight {
        self.entries.iter().fold(Weight::zero(), |acc, w| acc + w)
    }

    pub fn transpose(&self) -> RationalMatrix {
        let (r, c) = (self.nrows(), self.ncols());
        let mut entries = Vec::with_capacity(r * c);
        for j in 0..c {
            for i in 0..r {
                entries.push(self.get(i, j).clone());
            }
        }
        RationalMatrix {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            entries,
        }
    }

    /// Matrix product; labels come from the outer dimensions.
    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::invalid("dimension mismatch in product"));
        }
        let mut entries = Vec::with_capacity(self.nrows() * rhs.ncols());
        for i in 0..self.nrows() {
            for j in 0..rhs.ncols() {
                let mut acc = Weight::zero();
                for k in 0..self.ncols() {
                    let (x, y) = (self.get(i, k), rhs.get(k, j));
                    if !x.is_zero() && !y.is_zero() {
                        acc += x * y;
                    }
                }
                entries.push(acc);
            }
        }
        Ok(RationalMatrix {
            row_labels: self.row_labels.clone(),
            col_labels: rhs.col_labels.clone(),
            entries,
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows() == self.ncols() && (0..self.nrows()).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.nrows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, w) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{w}")?;
            }
        }
        write!(f, "]")
    }
}

/// One block `A_k x B_k` (row and column indices, ascending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Ordered by smallest row index.
    pub blocks: Vec<Block>,
    pub zero_rows: Vec<usize>,
    pub zero_cols: Vec<usize>,
}

impl BlockDecomposition {
    /// Index of the block containing row `i`, if any.
    pub fn block_of_row(&self, i: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.rows.binary_search(&i).is_ok())
    }

    pub fn block_of_col(&self, j: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.cols.binary_search(&j).is_ok())
    }
}

/// `M(row, col)`, `M(row, other_col)` and `M(other_row, col)` are positive
/// but `M(other_row, other_col)` is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotRectangular {
    pub row: usize,
    pub col: usize,
    pub other_row: usize,
    pub other_col: usize,
}

/// Why a matrix fails to be block-rank-1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankWitness {
    NotRectangular(NotRectangular),
    /// Four positive entries in one block with
    /// `M(r0,c0) M(r1,c1) != M(r0,c1) M(r1,c0)`.
    Minor {
        rows: (usize, usize),
        cols: (usize, usize),
    },
}

impl fmt::Display for RankWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankWitness::NotRectangular(w) => write!(
                f,
                "not rectangular at rows ({},{}) cols ({},{})",
                w.row + 1,
                w.other_row + 1,
                w.col + 1,
                w.other_col + 1
            ),
            RankWitness::Minor { rows, cols } => write!(
                f,
                "nonzero minor at rows ({},{}) cols ({},{})",
                rows.0 + 1,
                rows.1 + 1,
                cols.0 + 1,
                cols.1 + 1
            ),
        }
    }
}

/// Splits `m` into the connected components of its support graph and checks
/// that every component is a full rectangle.
pub fn block_decompose(m: &RationalMatrix) -> Result<BlockDecomposition, NotRectangular> {
    let (r, c) = (m.nrows(), m.ncols());
    // Rows are nodes 0..r, columns r..r+c.
    let mut dsu = DisjointSet::new(r + c);
    let mut row_has = vec![false; r];
    let mut col_has = vec![false; c];
    for (i, has_row) in row_has.iter_mut().enumerate() {
        for (j, has_col) in col_has.iter_mut().enumerate() {
            if m.positive(i, j) {
                dsu.union(i, r + j);
                *has_row = true;
                *has_col = true;
            }
        }
    }

    let mut root_to_block: Vec<Option<usize>> = vec![None; r + c];
    let mut blocks: Vec<Block> = Vec::new();
    let mut zero_rows = Vec::new();
    for (i, &has) in row_has.iter().enumerate() {
        if !has {
            zero_rows.push(i);
            continue;
        }
        let root = dsu.find(i);
        let k = *root_to_block[root].get_or_insert_with(|| {
            blocks.push(Block {
                rows: Vec::new(),
                cols: Vec::new(),
            });
            blocks.len() - 1
        });
        blocks[k].rows.push(i);
    }
    let mut zero_cols = Vec::new();
    for (j, &has) in col_has.iter().enumerate() {
        if !has {
            zero_cols.push(j);
            continue;
        }
        let k = root_to_block[dsu.find(r + j)].expect("column joined to a row");
        blocks[k].cols.push(j);
    }

    for block in &blocks {
        for &other_row in &block.rows {
            for &other_col in &block.cols {
                if !m.positive(other_row, other_col) {
                    return Err(induced_path(m, block, other_row, other_col));
                }
            }
        }
    }

    Ok(BlockDecomposition {
        blocks,
        zero_rows,
        zero_cols,
    })
}

/// A zero cell inside a connected component always has a zero cell at
/// support-graph distance three; search for that configuration.
fn induced_path(m: &RationalMatrix, block: &Block, zr: usize, zc: usize) -> NotRectangular {
    for &ir in &block.rows {
        for &jc in &block.cols {
            if m.positive(ir, jc) {
                continue;
            }
            for &j in &block.cols {
                if !m.positive(ir, j) {
                    continue;
                }
                for &i in &block.rows {
                    if m.positive(i, j) && m.positive(i, jc) {
                        return NotRectangular {
                            row: i,
                            col: j,
                            other_row: ir,
                            other_col: jc,
                        };
                    }
                }
            }
        }
    }
    unreachable!("component containing zero cell ({zr},{zc}) has no induced path")
}

/// Block-rank-1 test. On success returns the block decomposition.
pub fn is_block_rank_1(m: &RationalMatrix) -> Result<BlockDecomposition, RankWitness> {
    let dec = block_decompose(m).map_err(RankWitness::NotRectangular)?;
    for block in &dec.blocks {
        let (r0, c0) = (block.rows[0], block.cols[0]);
        let pivot = m.get(r0, c0);
        // Every entry positive inside the block, so rank 1 iff each 2x2 minor
        // through the pivot row and column vanishes.
        for &i in &block.rows[1..] {
            for &j in &block.cols[1..] {
                if pivot * m.get(i, j) != m.get(r0, j) * m.get(i, c0) {
                    return Err(RankWitness::Minor {
                        rows: (r0, i),
                        cols: (c0, j),
                    });
                }
            }
        }
    }
    Ok(dec)
}

/// The sixth-degree identity
/// `M(α,κ)²M(β,λ)²M(α,λ)M(β,κ) = M(α,λ)²M(β,κ)²M(α,κ)M(β,λ)` for all
/// `α≠β`, `κ≠λ`. For square rectangular matrices it is equivalent to
/// block-rank-1; non-rectangular input is a contract error.
pub fn rank1_condition(m: &RationalMatrix) -> Result<bool> {
    if m.nrows() != m.ncols() {
        return Err(Error::Contract(format!(
            "rank-1 identity needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if let Err(w) = block_decompose(m) {
        return Err(Error::Contract(format!(
            "rank-1 identity needs a rectangular matrix: {}",
            RankWitness::NotRectangular(w)
        )));
    }
    let n = m.nrows();
    for alpha in 0..n {
        for beta in 0..n {
            if alpha == beta {
                continue;
            }
            for kappa in 0..n {
                for lambda in 0..n {
                    if kappa == lambda {
                        continue;
                    }
                    if !sextic_identity_holds(m, alpha, beta, kappa, lambda) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// One instance of the sextic identity.
pub fn sextic_identity_holds(m: &RationalMatrix, alpha: usize, beta: usize, kappa: usize, lambda: usize) -> bool {
    let (ak, bl, al, bk) = (
        m.get(alpha, kappa),
        m.get(beta, lambda),
        m.get(alpha, lambda),
        m.get(beta, kappa),
    );
    let lhs = ak * ak * bl * bl * al * bk;
    let rhs = al * al * bk * bk * ak * bl;
    lhs == rhs
}

/// Two rows with positive inner product that are not proportional, if any.
/// Returns `None` exactly when the matrix is block-rank-1.
pub fn find_bad_row_pair(m: &RationalMatrix) -> Option<(usize, usize)> {
    for i in 0..m.nrows() {
        for j in i + 1..m.nrows() {
            let (a, b) = (m.row(i), m.row(j));
            let inner_positive = a
                .iter()
                .zip(b)
                .any(|(x, y)| weight::is_positive(x) && weight::is_positive(y));
            if inner_positive && !proportional(a, b) {
                return Some((i, j));
            }
        }
    }
    None
}

fn proportional(a: &[Weight], b: &[Weight]) -> bool {
    (0..a.len()).all(|k| (k + 1..a.len()).all(|l| &a[k] * &b[l] == &a[l] * &b[k]))
}
