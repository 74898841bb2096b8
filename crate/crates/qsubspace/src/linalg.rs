//! Matrices and canonical-form subspaces over `F_q`.
//!
//! A subspace of `F_q^v` is represented by the reduced row echelon form of
//! any generating set; RREF bases are unique, so equality of subspaces is
//! equality of representations, and the lexicographic order on concatenated
//! entry encodings is a total order used for sorting, deduplication, and
//! file layout throughout the crate.
//!
//! Pairwise intersection dimensions are the innermost operation of code
//! verification. For `q = 2` every basis row is kept packed into a machine
//! word, and ranks of stacked bases are computed by word-parallel XOR
//! elimination; all other fields go through a generic elimination over the
//! field's multiplication tables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::gf::Field;

/// Default ceiling on the number of subspaces an enumeration may yield.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// A dense row-major matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFq {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl MatrixFq {
    pub fn zero(field: &Field, rows: usize, cols: usize) -> MatrixFq {
        MatrixFq {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> MatrixFq {
        let mut m = MatrixFq::zero(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from explicit rows; all rows must have equal length
    /// and entries must be valid element encodings.
    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Result<MatrixFq> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::BadLength {
                    expected: cols,
                    got: row.len(),
                });
            }
            for &x in row {
                if x >= field.order() {
                    return Err(Error::FieldMismatch(format!(
                        "entry {x} is not an element of {field}"
                    )));
                }
                data.push(x);
            }
        }
        Ok(MatrixFq {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: u32) {
        debug_assert!(value < self.field.order());
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> MatrixFq {
        let mut t = MatrixFq::zero(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn add(&self, other: &MatrixFq) -> Result<MatrixFq> {
        self.zip_entries(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &MatrixFq) -> Result<MatrixFq> {
        self.zip_entries(other, |f, a, b| f.sub(a, b))
    }

    fn zip_entries(
        &self,
        other: &MatrixFq,
        op: impl Fn(&Field, u32, u32) -> u32,
    ) -> Result<MatrixFq> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                self.field, other.field
            )));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| op(&self.field, a, b))
            .collect();
        Ok(MatrixFq {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn mul(&self, other: &MatrixFq) -> Result<MatrixFq> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                self.field, other.field
            )));
        }
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = MatrixFq::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let t = f.mul(a, other.data[l * other.cols + j]);
                    let cur = out.data[i * other.cols + j];
                    out.data[i * other.cols + j] = f.add(cur, t);
                }
            }
        }
        Ok(out)
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut scratch = self.data.clone();
        rank_entries(&self.field, &mut scratch, self.rows, self.cols)
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (MatrixFq, Vec<usize>) {
        let mut data = self.data.clone();
        let (_, pivots) = rref_in_place(&self.field, &mut data, self.rows, self.cols);
        (
            MatrixFq {
                field: self.field.clone(),
                rows: self.rows,
                cols: self.cols,
                data,
            },
            pivots,
        )
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<MatrixFq> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let f = &self.field;
        let mut a = self.data.clone();
        let mut inv = MatrixFq::identity(f, n).data;
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r * n + col] != 0)?;
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
                inv.swap(col * n + j, pivot * n + j);
            }
            let scale = f.inv(a[col * n + col]);
            if scale != 1 {
                for j in 0..n {
                    a[col * n + j] = f.mul(a[col * n + j], scale);
                    inv[col * n + j] = f.mul(inv[col * n + j], scale);
                }
            }
            for r in 0..n {
                if r == col || a[r * n + col] == 0 {
                    continue;
                }
                let factor = a[r * n + col];
                for j in 0..n {
                    let t = f.mul(factor, a[col * n + j]);
                    a[r * n + j] = f.sub(a[r * n + j], t);
                    let t = f.mul(factor, inv[col * n + j]);
                    inv[r * n + j] = f.sub(inv[r * n + j], t);
                }
            }
        }
        Some(MatrixFq {
            field: f.clone(),
            rows: n,
            cols: n,
            data: inv,
        })
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &MatrixFq) -> Result<MatrixFq> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                self.field, other.field
            )));
        }
        if self.cols != other.cols {
            return Err(Error::AmbientMismatch(format!(
                "{} vs {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatrixFq {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Row basis of the right null space `{x : M x^T = 0}`.
    pub fn null_space(&self) -> MatrixFq {
        let f = &self.field;
        let mut data = self.data.clone();
        let (rank, pivots) = rref_in_place(f, &mut data, self.rows, self.cols);
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &p in &pivots {
                s[p] = true;
            }
            s
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !pivot_set[c]).collect();
        let mut out = MatrixFq::zero(f, free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            out.data[i * self.cols + fc] = 1;
            for (j, &pc) in pivots.iter().take(rank).enumerate() {
                out.data[i * self.cols + pc] = f.neg(data[j * self.cols + fc]);
            }
        }
        out
    }
}

/// In-place reduced row echelon form; returns rank and pivot columns. Rows
/// `0..rank` hold the canonical basis afterwards, remaining rows are zero.
fn rref_in_place(
    field: &Field,
    data: &mut [u32],
    nrows: usize,
    ncols: usize,
) -> (usize, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| data[i * ncols + c] != 0) else {
            continue;
        };
        for j in 0..ncols {
            data.swap(r * ncols + j, pr * ncols + j);
        }
        let scale = field.inv(data[r * ncols + c]);
        if scale != 1 {
            for j in c..ncols {
                data[r * ncols + j] = field.mul(data[r * ncols + j], scale);
            }
        }
        for i in 0..nrows {
            if i == r || data[i * ncols + c] == 0 {
                continue;
            }
            let factor = data[i * ncols + c];
            for j in c..ncols {
                let t = field.mul(factor, data[r * ncols + j]);
                data[i * ncols + j] = field.sub(data[i * ncols + j], t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (r, pivots)
}

/// Rank of a row-major entry buffer by forward elimination.
fn rank_entries(field: &Field, data: &mut [u32], nrows: usize, ncols: usize) -> usize {
    rank_entries_capped(field, data, nrows, ncols, nrows)
}

/// As [`rank_entries`], but stops early once `cap` independent rows are
/// found, returning `cap`. Ranks below `cap` are exact.
pub(crate) fn rank_entries_capped(
    field: &Field,
    data: &mut [u32],
    nrows: usize,
    ncols: usize,
    cap: usize,
) -> usize {
    let cap = cap.min(nrows);
    let mut rank = 0;
    for c in 0..ncols {
        if rank == cap {
            break;
        }
        let Some(pr) = (rank..nrows).find(|&i| data[i * ncols + c] != 0) else {
            continue;
        };
        if pr != rank {
            for j in c..ncols {
                data.swap(rank * ncols + j, pr * ncols + j);
            }
        }
        let pivot_row = rank;
        rank += 1;
        if rank == cap {
            break;
        }
        let inv = field.inv(data[pivot_row * ncols + c]);
        for i in rank..nrows {
            let x = data[i * ncols + c];
            if x == 0 {
                continue;
            }
            let factor = field.mul(x, inv);
            for j in c..ncols {
                let t = field.mul(factor, data[pivot_row * ncols + j]);
                data[i * ncols + j] = field.sub(data[i * ncols + j], t);
            }
        }
    }
    rank
}

/// Rank of packed GF(2) rows by word-parallel XOR elimination. Each basis
/// row's pivot is its lowest set bit; rows are consumed in place.
#[inline]
pub(crate) fn rank_bits(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let mut row = rows[i];
        for &basis in rows.iter().take(rank) {
            let pivot = basis & basis.wrapping_neg();
            if row & pivot != 0 {
                row ^= basis;
            }
        }
        if row != 0 {
            rows[rank] = row;
            rank += 1;
        }
    }
    rank
}

/// A subspace of `F_q^v` in canonical (RREF) form.
///
/// The basis matrix is stored row-major; for `q = 2` and `v <= 64` each row
/// is additionally packed into a machine word for the fast rank kernel.
/// Ordering compares `(v, dim, entries)` with the entry sequence read
/// row-major, which is the canonical total order used everywhere.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: Field,
    v: u16,
    k: u16,
    rows: Vec<u32>,
    packed: Vec<u64>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v
            && self.k == other.k
            && self.rows == other.rows
            && self.field == other.field
    }
}

impl Eq for Subspace {}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert!(self.field == other.field);
        (self.v, self.k, &self.rows).cmp(&(other.v, other.k, &other.rows))
    }
}

impl Subspace {
    /// Row space of an arbitrary matrix, canonicalized.
    pub fn from_matrix(m: &MatrixFq) -> Subspace {
        let mut data = m.data.clone();
        let (rank, _) = rref_in_place(&m.field, &mut data, m.rows, m.cols);
        data.truncate(rank * m.cols);
        Subspace::from_canonical_rows(m.field.clone(), m.cols, rank, data)
    }

    /// Span of explicit generating rows.
    pub fn from_rows(field: &Field, v: usize, rows: &[Vec<u32>]) -> Result<Subspace> {
        for row in rows {
            if row.len() != v {
                return Err(Error::BadLength {
                    expected: v,
                    got: row.len(),
                });
            }
        }
        let m = MatrixFq::from_rows(field, rows)?;
        if m.ncols() != v {
            // only possible for an empty generating set
            return Ok(Subspace::from_canonical_rows(
                field.clone(),
                v,
                0,
                Vec::new(),
            ));
        }
        Ok(Subspace::from_matrix(&m))
    }

    /// Span of the unit vectors with the given coordinates.
    pub fn unit_span(field: &Field, v: usize, coords: &[usize]) -> Subspace {
        let mut sorted = coords.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut rows = vec![0u32; sorted.len() * v];
        for (i, &c) in sorted.iter().enumerate() {
            assert!(c < v);
            rows[i * v + c] = 1;
        }
        Subspace::from_canonical_rows(field.clone(), v, sorted.len(), rows)
    }

    /// The whole ambient space.
    pub fn full(field: &Field, v: usize) -> Subspace {
        Subspace::unit_span(field, v, &(0..v).collect::<Vec<_>>())
    }

    /// Wraps rows already known to be in canonical form.
    pub(crate) fn from_canonical_rows(
        field: Field,
        v: usize,
        k: usize,
        rows: Vec<u32>,
    ) -> Subspace {
        debug_assert_eq!(rows.len(), k * v);
        debug_assert!(is_canonical_rows(&field, v, k, &rows));
        let packed = pack_rows(&field, v, k, &rows);
        Subspace {
            field,
            v: v as u16,
            k: k as u16,
            rows,
            packed,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Ambient dimension `v`.
    pub fn ambient_dim(&self) -> usize {
        self.v as usize
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.k as usize
    }

    /// Canonical basis row `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        let v = self.v as usize;
        &self.rows[i * v..(i + 1) * v]
    }

    /// All canonical basis entries, row-major.
    pub fn entries(&self) -> &[u32] {
        &self.rows
    }

    /// Canonical basis as a matrix.
    pub fn basis_matrix(&self) -> MatrixFq {
        MatrixFq {
            field: self.field.clone(),
            rows: self.k as usize,
            cols: self.v as usize,
            data: self.rows.clone(),
        }
    }

    /// Pivot columns of the canonical basis.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.k as usize)
            .map(|i| {
                self.row(i)
                    .iter()
                    .position(|&x| x != 0)
                    .expect("no zero rows")
            })
            .collect()
    }

    /// Dimension of the intersection with another subspace of the same
    /// ambient space: `dim U + dim W - rank(U stacked on W)`.
    pub fn intersection_dim(&self, other: &Subspace) -> usize {
        debug_assert!(self.field == other.field);
        debug_assert_eq!(self.v, other.v);
        let (ka, kb) = (self.k as usize, other.k as usize);
        if !self.packed.is_empty() && !other.packed.is_empty() && ka + kb <= 32 {
            let mut buf = [0u64; 32];
            buf[..ka].copy_from_slice(&self.packed);
            buf[ka..ka + kb].copy_from_slice(&other.packed);
            return ka + kb - rank_bits(&mut buf[..ka + kb]);
        }
        let v = self.v as usize;
        let mut stacked = Vec::with_capacity((ka + kb) * v);
        stacked.extend_from_slice(&self.rows);
        stacked.extend_from_slice(&other.rows);
        ka + kb - rank_entries(&self.field, &mut stacked, ka + kb, v)
    }

    /// Subspace distance `dim U + dim W - 2 dim(U intersect W)`.
    pub fn distance(&self, other: &Subspace) -> usize {
        self.k as usize + other.k as usize - 2 * self.intersection_dim(other)
    }

    pub fn is_disjoint(&self, other: &Subspace) -> bool {
        self.intersection_dim(other) == 0
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.intersection_dim(other) == other.dim()
    }

    pub fn contains_vector(&self, vector: &[u32]) -> bool {
        assert_eq!(vector.len(), self.v as usize);
        let f = &self.field;
        let mut residue = vector.to_vec();
        for i in 0..self.k as usize {
            let row = self.row(i);
            let pivot = row.iter().position(|&x| x != 0).expect("no zero rows");
            let c = residue[pivot];
            if c != 0 {
                for (res, &b) in residue.iter_mut().zip(row) {
                    *res = f.sub(*res, f.mul(c, b));
                }
            }
        }
        residue.iter().all(|&x| x == 0)
    }

    /// Explicit intersection via the left null space of the stacked bases;
    /// off the hot path but exercised against [`Subspace::intersection_dim`].
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        debug_assert!(self.field == other.field);
        debug_assert_eq!(self.v, other.v);
        let stacked = self
            .basis_matrix()
            .stack(&other.basis_matrix())
            .expect("same ambient");
        // lambda . stacked = 0  <=>  stacked^T lambda^T = 0
        let kernel = stacked.transpose().null_space();
        let f = &self.field;
        let v = self.v as usize;
        let ka = self.k as usize;
        let mut vectors = Vec::with_capacity(kernel.nrows());
        for l in 0..kernel.nrows() {
            let lambda = kernel.row(l);
            let mut vec = vec![0u32; v];
            for (i, &coef) in lambda.iter().take(ka).enumerate() {
                if coef == 0 {
                    continue;
                }
                for (x, &b) in vec.iter_mut().zip(self.row(i)) {
                    *x = f.add(*x, f.mul(coef, b));
                }
            }
            vectors.push(vec);
        }
        Subspace::from_rows(f, v, &vectors).expect("rows have ambient length")
    }

    /// Image under a linear map given as a `v x w` matrix acting on row
    /// vectors.
    pub fn apply_map(&self, map: &MatrixFq) -> Result<Subspace> {
        if map.nrows() != self.v as usize {
            return Err(Error::DimMismatch(format!(
                "map has {} rows, ambient dimension is {}",
                map.nrows(),
                self.v
            )));
        }
        Ok(Subspace::from_matrix(&self.basis_matrix().mul(map)?))
    }
}

fn pack_rows(field: &Field, v: usize, k: usize, rows: &[u32]) -> Vec<u64> {
    if field.order() != 2 || v > 64 {
        return Vec::new();
    }
    (0..k)
        .map(|i| {
            rows[i * v..(i + 1) * v]
                .iter()
                .enumerate()
                .fold(0u64, |w, (c, &x)| w | ((x as u64) << c))
        })
        .collect()
}

/// Checks the RREF shape: nonzero rows, unit pivots in strictly increasing
/// columns, and zeros elsewhere in every pivot column.
pub(crate) fn is_canonical_rows(field: &Field, v: usize, k: usize, rows: &[u32]) -> bool {
    let _ = field;
    let mut last_pivot = None;
    let mut pivots = Vec::with_capacity(k);
    for i in 0..k {
        let row = &rows[i * v..(i + 1) * v];
        let Some(pivot) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        if row[pivot] != 1 {
            return false;
        }
        if let Some(lp) = last_pivot {
            if pivot <= lp {
                return false;
            }
        }
        last_pivot = Some(pivot);
        pivots.push(pivot);
    }
    for (i, &p) in pivots.iter().enumerate() {
        for other in 0..k {
            if other != i && rows[other * v + p] != 0 {
                return false;
            }
        }
    }
    true
}

/// Gaussian binomial coefficient: the number of `k`-dimensional subspaces
/// of `F_q^v`, by the exact product formula.
pub fn gaussian_binomial(v: u32, k: u32, q: u32) -> u128 {
    if k > v {
        return 0;
    }
    let q = q as u128;
    let pow = |x: u32| -> u128 {
        let mut acc = 1u128;
        for _ in 0..x {
            acc = acc.checked_mul(q).expect("gaussian binomial overflow");
        }
        acc
    };
    let mut acc = 1u128;
    for i in 1..=k {
        acc = acc
            .checked_mul(pow(v - k + i) - 1)
            .expect("gaussian binomial overflow");
        acc /= pow(i) - 1;
    }
    acc
}

/// The linear map sending the canonical basis rows of `a` to those of
/// `a_img` and the rows of `b` to those of `b_img`, as a matrix acting on
/// row vectors. Requires `a + b` to fill their common ambient space
/// directly, and images of matching dimensions spanning a direct sum.
pub fn direct_sum_map(
    a: &Subspace,
    b: &Subspace,
    a_img: &Subspace,
    b_img: &Subspace,
) -> Result<MatrixFq> {
    if a.field() != b.field() || a.field() != a_img.field() || a.field() != b_img.field() {
        return Err(Error::FieldMismatch("direct_sum_map arguments".into()));
    }
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::AmbientMismatch(format!(
            "{} vs {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    if a_img.ambient_dim() != b_img.ambient_dim() {
        return Err(Error::AmbientMismatch(format!(
            "{} vs {} (images)",
            a_img.ambient_dim(),
            b_img.ambient_dim()
        )));
    }
    if a.dim() != a_img.dim() || b.dim() != b_img.dim() {
        return Err(Error::DimMismatch(
            "summand and image dimensions differ".into(),
        ));
    }
    let v_dom = a.ambient_dim();
    if a.dim() + b.dim() != v_dom {
        return Err(Error::NotComplementary(format!(
            "dim {} + dim {} != ambient {}",
            a.dim(),
            b.dim(),
            v_dom
        )));
    }
    if !a.is_disjoint(b) {
        return Err(Error::NotComplementary(
            "domain summands intersect nontrivially".into(),
        ));
    }
    let m = a.basis_matrix().stack(&b.basis_matrix())?;
    let n = a_img.basis_matrix().stack(&b_img.basis_matrix())?;
    if n.rank() != v_dom {
        return Err(Error::NotComplementary(
            "image summands intersect nontrivially".into(),
        ));
    }
    let m_inv = m
        .inverse()
        .expect("complementary summands stack invertibly");
    m_inv.mul(&n)
}

/// Streaming enumeration of all `k`-subspaces of `F_q^v` in ascending
/// canonical order, produced by merging one ascending stream per pivot
/// column set.
pub struct SubspaceEnumeration {
    streams: Vec<PivotStream>,
    heap: BinaryHeap<std::cmp::Reverse<MergeEntry>>,
}

struct MergeEntry {
    sub: Subspace,
    stream: usize,
}

impl PartialEq for MergeEntry {
    fn eq(&self, other: &Self) -> bool {
        self.sub == other.sub && self.stream == other.stream
    }
}

impl Eq for MergeEntry {}

impl PartialOrd for MergeEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MergeEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub
            .cmp(&other.sub)
            .then(self.stream.cmp(&other.stream))
    }
}

/// Enumerates the RREF matrices with one fixed pivot column set in
/// ascending entry order: free positions are scanned row-major and the
/// earliest position is the most significant odometer digit.
struct PivotStream {
    field: Field,
    v: usize,
    k: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    digits: Vec<u32>,
    done: bool,
}

impl PivotStream {
    fn new(field: Field, v: usize, k: usize, pivots: Vec<usize>) -> PivotStream {
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; v];
            for &p in &pivots {
                s[p] = true;
            }
            s
        };
        let mut free = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for (c, &is_pivot) in pivot_set.iter().enumerate().skip(p + 1) {
                if !is_pivot {
                    free.push((i, c));
                }
            }
        }
        let digits = vec![0u32; free.len()];
        PivotStream {
            field,
            v,
            k,
            pivots,
            free,
            digits,
            done: false,
        }
    }

    fn current(&self) -> Subspace {
        let mut rows = vec![0u32; self.k * self.v];
        for (i, &p) in self.pivots.iter().enumerate() {
            rows[i * self.v + p] = 1;
        }
        for (&(r, c), &d) in self.free.iter().zip(&self.digits) {
            rows[r * self.v + c] = d;
        }
        Subspace::from_canonical_rows(self.field.clone(), self.v, self.k, rows)
    }

    fn advance(&mut self) {
        let q = self.field.order();
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < q {
                return;
            }
            self.digits[i] = 0;
        }
        self.done = true;
    }
}

impl Iterator for SubspaceEnumeration {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        let std::cmp::Reverse(entry) = self.heap.pop()?;
        let stream = &mut self.streams[entry.stream];
        stream.advance();
        if !stream.done {
            self.heap.push(std::cmp::Reverse(MergeEntry {
                sub: stream.current(),
                stream: entry.stream,
            }));
        }
        Some(entry.sub)
    }
}

/// Enumerates every `k`-subspace of `F_q^v` in ascending canonical order,
/// refusing when the total count exceeds [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_subspaces(field: &Field, v: u32, k: u32) -> Result<SubspaceEnumeration> {
    enumerate_subspaces_capped(field, v, k, DEFAULT_ENUMERATION_CAP)
}

/// As [`enumerate_subspaces`] with an explicit cap.
pub fn enumerate_subspaces_capped(
    field: &Field,
    v: u32,
    k: u32,
    cap: u128,
) -> Result<SubspaceEnumeration> {
    let count = gaussian_binomial(v, k, field.order());
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let mut streams = Vec::new();
    for pivots in combinations(v as usize, k as usize) {
        streams.push(PivotStream::new(
            field.clone(),
            v as usize,
            k as usize,
            pivots,
        ));
    }
    let heap = streams
        .iter()
        .enumerate()
        .map(|(i, s)| {
            std::cmp::Reverse(MergeEntry {
                sub: s.current(),
                stream: i,
            })
        })
        .collect();
    Ok(SubspaceEnumeration { streams, heap })
}

/// All `k`-element subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance to next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
