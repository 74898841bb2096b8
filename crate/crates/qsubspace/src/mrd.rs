//! Rank-metric codes from linearized polynomials, lifting to constant
//! dimension codes, and the two expurgated plane families in ambient
//! dimensions 6 and 7.
//!
//! A linearized polynomial `f(x) = sum a_i x^{q^i}` with coefficients in
//! `F_{q^n}` is an `F_q`-linear map; evaluating it on an `F_q`-basis of an
//! `m`-dimensional domain gives an `m x n` matrix over `F_q`. Taking all
//! polynomials of q-degree at most `m - d` yields a code of `q^{n(m-d+1)}`
//! matrices whose nonzero members have rank at least `d` (a nonzero
//! polynomial of q-degree `s` has at most `q^s` roots), which meets the
//! rank-metric size bound with equality. Row spaces of `[I | A]` turn such
//! a code into planes pairwise intersecting in a bounded dimension.

use std::collections::BTreeSet;

use crate::cdc::ConstantDimensionCode;
use crate::error::{Error, Result};
use crate::gf::{Field, LinearizedPoly, Tower};
use crate::linalg::{rank_entries_capped, MatrixFq, Subspace, DEFAULT_ENUMERATION_CAP};

/// A set of `m x n` matrices over `F_q` carrying a design minimum rank
/// distance, optionally backed by the defining linearized polynomials.
#[derive(Clone, Debug)]
pub struct RankMetricCode {
    field: Field,
    tower: Tower,
    m: usize,
    n: usize,
    design_distance: usize,
    codewords: Vec<MatrixFq>,
    polys: Vec<LinearizedPoly>,
}

impl RankMetricCode {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// The extension `F_{q^n}` over `F_q` hosting the polynomial view.
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    pub fn design_distance(&self) -> usize {
        self.design_distance
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codewords(&self) -> &[MatrixFq] {
        &self.codewords
    }

    pub fn polys(&self) -> &[LinearizedPoly] {
        &self.polys
    }

    /// Exhaustive pairwise minimum rank distance; `None` for a single
    /// codeword. Quadratic — intended for desk-scale codes.
    pub fn min_rank_distance(&self) -> Option<usize> {
        let mut min = None;
        for (i, a) in self.codewords.iter().enumerate() {
            for b in &self.codewords[i + 1..] {
                let d = rank_distance(a, b).expect("codewords share shape");
                if min.is_none_or(|m| d < m) {
                    min = Some(d);
                }
            }
        }
        min
    }
}

/// Rank of `A - B`.
pub fn rank_distance(a: &MatrixFq, b: &MatrixFq) -> Result<usize> {
    Ok(a.sub(b)?.rank())
}

/// Builds the rank-metric code of all linearized polynomials of q-degree
/// at most `m - d` over `F_{q^n}`, evaluated on the first `m` polynomial
/// basis elements of the extension. Sizes follow `q^{n(m-d+1)}`; for
/// `d > m` only the zero matrix qualifies and the code is that singleton.
/// The convention `m <= n` is required; use [`lift_transpose`] for the
/// mirrored parameters.
pub fn gabidulin(field: &Field, m: usize, n: usize, d: usize) -> Result<RankMetricCode> {
    if m == 0 || n == 0 || d == 0 {
        return Err(Error::InvalidSpec(format!(
            "rank-metric parameters must be positive, got m={m} n={n} d={d}"
        )));
    }
    if m > n {
        return Err(Error::InvalidSpec(format!(
            "m={m} exceeds n={n}; build the transposed code instead"
        )));
    }
    let tower = Tower::new(field, n as u32)?;
    let basis: Vec<u32> = tower.poly_basis()[..m].to_vec();
    if d > m {
        let zero_poly = LinearizedPoly::new(&tower, vec![0]);
        let zero = MatrixFq::zero(field, m, n);
        return Ok(RankMetricCode {
            field: field.clone(),
            tower,
            m,
            n,
            design_distance: d,
            codewords: vec![zero],
            polys: vec![zero_poly],
        });
    }
    let s = m - d;
    let qn = tower.ext().order();
    let count = match (qn as u128).checked_pow(s as u32 + 1) {
        Some(c) if c <= DEFAULT_ENUMERATION_CAP => c,
        other => {
            return Err(Error::EnumerationTooLarge {
                count: other.unwrap_or(u128::MAX),
                cap: DEFAULT_ENUMERATION_CAP,
            })
        }
    };
    let mut codewords = Vec::with_capacity(count as usize);
    let mut polys = Vec::with_capacity(count as usize);
    let mut coeffs = vec![0u32; s + 1];
    loop {
        let poly = LinearizedPoly::new(&tower, coeffs.clone());
        codewords.push(graph_matrix(field, &tower, &basis, &poly));
        polys.push(poly);
        // odometer over coefficient encodings, lowest q-degree fastest
        let mut l = 0;
        loop {
            if l > s {
                return Ok(RankMetricCode {
                    field: field.clone(),
                    tower,
                    m,
                    n,
                    design_distance: d,
                    codewords,
                    polys,
                });
            }
            coeffs[l] += 1;
            if coeffs[l] < qn {
                break;
            }
            coeffs[l] = 0;
            l += 1;
        }
    }
}

/// The `len(domain_basis) x m` matrix of a linearized map on the given
/// `F_q`-basis, rows flattened to base-field coordinates.
fn graph_matrix(
    field: &Field,
    tower: &Tower,
    domain_basis: &[u32],
    poly: &LinearizedPoly,
) -> MatrixFq {
    let rows: Vec<Vec<u32>> = domain_basis
        .iter()
        .map(|&b| tower.flatten(poly.eval(b)))
        .collect();
    MatrixFq::from_rows(field, &rows).expect("flattened rows share length")
}

/// Result of a streaming scan over a full `q^{n(m-d+1)}`-member family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MrdScan {
    /// Number of codewords the parameters generate.
    pub codewords: u128,
    /// Exact minimum rank over the nonzero codewords, or `None` when only
    /// the zero matrix exists (`d > m`).
    pub min_rank: Option<usize>,
}

/// Verifies the minimum rank distance of the full Gabidulin family without
/// materializing it.
///
/// The family is closed under differences, so the minimum pairwise rank
/// distance equals the minimum rank over all nonzero codewords; a single
/// pass over the `q^{n(m-d+1)} - 1` nonzero coefficient tuples is an
/// exhaustive pairwise check. A minimum of zero would expose two
/// coefficient tuples evaluating to the same matrix, so a positive result
/// also certifies the code size. Matrices are accumulated incrementally
/// from per-coefficient monomial tables, and rank computations stop early
/// at the running minimum.
pub fn mrd_distance_scan(field: &Field, m: usize, n: usize, d: usize) -> Result<MrdScan> {
    if m == 0 || n == 0 || d == 0 {
        return Err(Error::InvalidSpec(format!(
            "rank-metric parameters must be positive, got m={m} n={n} d={d}"
        )));
    }
    if m > n {
        return Err(Error::InvalidSpec(format!(
            "m={m} exceeds n={n}; scan the transposed code instead"
        )));
    }
    let tower = Tower::new(field, n as u32)?;
    if d > m {
        return Ok(MrdScan {
            codewords: 1,
            min_rank: None,
        });
    }
    let s = m - d;
    let qn = tower.ext().order() as usize;
    let count = (qn as u128)
        .checked_pow(s as u32 + 1)
        .expect("tower construction bounds the order");
    let basis = &tower.poly_basis()[..m];

    // tables[i][a] = matrix of x -> a * x^{q^i} on the domain basis
    let tables: Vec<Vec<u32>> = (0..=s)
        .map(|i| {
            let mut t = Vec::with_capacity(qn * m * n);
            for a in 0..qn as u32 {
                for &b in basis {
                    let image = tower.ext().mul(a, tower.frobenius(b, i as u32));
                    t.extend_from_slice(&tower.flatten(image));
                }
            }
            t
        })
        .collect();

    let cells = m * n;
    let mut digits = vec![0usize; s + 1];
    // partial[l] = sum of the monomial matrices for levels l..=s
    let mut partial = vec![vec![0u32; cells]; s + 2];
    let mut scratch = vec![0u32; cells];
    let mut min_rank = m + 1;
    let mut index: u128 = 0;
    loop {
        if index > 0 {
            scratch.copy_from_slice(&partial[0]);
            let r = rank_entries_capped(field, &mut scratch, m, n, min_rank);
            if r < min_rank {
                min_rank = r;
            }
        }
        index += 1;
        let mut l = 0;
        loop {
            if l > s {
                debug_assert_eq!(index, count);
                return Ok(MrdScan {
                    codewords: count,
                    min_rank: Some(min_rank),
                });
            }
            digits[l] += 1;
            if digits[l] < qn {
                break;
            }
            digits[l] = 0;
            l += 1;
        }
        for ll in (0..=l).rev() {
            let (lo, hi) = partial.split_at_mut(ll + 1);
            let dst = &mut lo[ll];
            let src = &hi[0];
            let table = &tables[ll][digits[ll] * cells..(digits[ll] + 1) * cells];
            for (o, (&a, &b)) in dst.iter_mut().zip(src.iter().zip(table)) {
                *o = field.add(a, b);
            }
        }
    }
}

/// A constant dimension code whose codewords are graphs of linearized maps
/// on a fixed domain basis, retaining the map behind each codeword.
#[derive(Clone, Debug)]
pub struct GraphCode {
    code: ConstantDimensionCode,
    tower: Tower,
    domain_basis: Vec<u32>,
    polys: Option<Vec<LinearizedPoly>>,
}

impl GraphCode {
    pub fn code(&self) -> &ConstantDimensionCode {
        &self.code
    }

    pub fn into_code(self) -> ConstantDimensionCode {
        self.code
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    /// Extension elements forming the `F_q`-basis of the domain.
    pub fn domain_basis(&self) -> &[u32] {
        &self.domain_basis
    }

    /// Defining polynomials aligned with `code().codewords()`, when known.
    pub fn polys(&self) -> Option<&[LinearizedPoly]> {
        self.polys.as_deref()
    }

    /// Indices of the codewords that are graphs of monomials `a x`
    /// (including the zero map when present). Any two distinct monomial
    /// maps differ by an invertible one, so these codewords are pairwise
    /// disjoint.
    pub fn monomial_clique(&self) -> Result<Vec<usize>> {
        let polys = self.polys.as_ref().ok_or(Error::NotPolynomialBacked)?;
        Ok(polys
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_monomial())
            .map(|(i, _)| i)
            .collect())
    }

    /// Sidecar text recording the polynomial coefficients per codeword in
    /// file order: one line of space-separated element encodings each.
    pub fn poly_sidecar(&self) -> Result<String> {
        let polys = self.polys.as_ref().ok_or(Error::NotPolynomialBacked)?;
        let mut out = String::new();
        for p in polys {
            let line: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        Ok(out)
    }

    /// Builds a graph code from `(subspace, poly)` pairs, sorting both in
    /// canonical codeword order.
    fn from_pairs(
        field: &Field,
        v: usize,
        k: usize,
        tower: Tower,
        domain_basis: Vec<u32>,
        mut pairs: Vec<(Subspace, LinearizedPoly)>,
    ) -> Result<GraphCode> {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut codewords = Vec::with_capacity(pairs.len());
        let mut polys = Vec::with_capacity(pairs.len());
        for (s, p) in pairs {
            codewords.push(s);
            polys.push(p);
        }
        let code = ConstantDimensionCode::new(field, v, k, codewords)?;
        Ok(GraphCode {
            code,
            tower,
            domain_basis,
            polys: Some(polys),
        })
    }
}

/// Lifts a rank-metric code to the constant dimension code
/// `{ rowspace [I_m | A] : A in R }` in `F_q^{m+n}`; subspace distances
/// are twice the rank distances, and every codeword is disjoint from the
/// final-coordinates space `rowspace [0 | I_n]`.
pub fn lift(r: &RankMetricCode) -> Result<GraphCode> {
    let (m, n) = (r.m, r.n);
    let v = m + n;
    let pairs: Vec<(Subspace, LinearizedPoly)> = r
        .codewords
        .iter()
        .zip(&r.polys)
        .map(|(mat, poly)| {
            let mut rows = vec![0u32; m * v];
            for i in 0..m {
                rows[i * v + i] = 1;
                rows[i * v + m..i * v + v].copy_from_slice(mat.row(i));
            }
            (
                Subspace::from_canonical_rows(r.field.clone(), v, m, rows),
                poly.clone(),
            )
        })
        .collect();
    GraphCode::from_pairs(
        &r.field,
        v,
        m,
        r.tower.clone(),
        r.tower.poly_basis()[..m].to_vec(),
        pairs,
    )
}

/// Lifts the transposed code: `{ rowspace [I_n | A^T] : A in R }` in
/// `F_q^{m+n}` with codewords of dimension `n`. Rank distances are
/// transpose-invariant, so the distance guarantee carries over; the
/// polynomial backing does not, hence a plain code.
pub fn lift_transpose(r: &RankMetricCode) -> Result<ConstantDimensionCode> {
    let (m, n) = (r.m, r.n);
    let v = m + n;
    let codewords: Vec<Subspace> = r
        .codewords
        .iter()
        .map(|mat| {
            let mut rows = vec![0u32; n * v];
            for i in 0..n {
                rows[i * v + i] = 1;
                for j in 0..m {
                    rows[i * v + n + j] = mat.get(j, i);
                }
            }
            Subspace::from_canonical_rows(r.field.clone(), v, n, rows)
        })
        .collect();
    ConstantDimensionCode::new(&r.field, v, n, codewords)
}

/// The expurgated plane family in `F_q^6`: all `q^6` graphs of linearized
/// maps of q-degree at most one on `F_{q^3}`, minus the `q^3` graphs of
/// `u x^q - u^q x` (one per `u`, including the zero map at `u = 0`).
/// Returns the `q^6 - q^3` survivors together with their monomial clique
/// `{graph(a x) : a != 0}` of size `q^3 - 1`.
pub fn expurgate6(field: &Field) -> Result<(GraphCode, Vec<usize>)> {
    let lifted = lift(&gabidulin(field, 3, 3, 2)?)?;
    let tower = lifted.tower.clone();
    let ext = tower.ext();
    let q3 = ext.order();

    let mut removed = BTreeSet::new();
    for u in 0..q3 {
        let uq = tower.frobenius(u, 1);
        let poly = LinearizedPoly::new(&tower, vec![ext.neg(uq), u]);
        let mat = graph_matrix(field, &tower, &lifted.domain_basis, &poly);
        let mut rows = vec![0u32; 3 * 6];
        for i in 0..3 {
            rows[i * 6 + i] = 1;
            rows[i * 6 + 3..i * 6 + 6].copy_from_slice(mat.row(i));
        }
        removed.insert(Subspace::from_canonical_rows(field.clone(), 6, 3, rows));
    }
    if removed.len() != q3 as usize {
        return Err(Error::ConstructionBug(format!(
            "expected {} distinct removed planes, found {}",
            q3,
            removed.len()
        )));
    }

    let polys = lifted.polys.as_ref().expect("lift is polynomial-backed");
    let pairs: Vec<(Subspace, LinearizedPoly)> = lifted
        .code
        .codewords()
        .iter()
        .zip(polys)
        .filter(|(s, _)| !removed.contains(s))
        .map(|(s, p)| (s.clone(), p.clone()))
        .collect();
    let survivors = GraphCode::from_pairs(field, 6, 3, tower, lifted.domain_basis.clone(), pairs)?;
    let clique = survivors.monomial_clique()?;
    Ok((survivors, clique))
}

/// The expurgated plane family in `F_q^7`: graphs on the trace-zero
/// 3-space `W` of `F_{q^4}` of all `q^8` maps `a_0 x + a_1 x^q`, minus the
/// distinct graphs of `r (u x^q - u^q x)` over `r != 0`, `tr(u) = 1` (a
/// count the construction establishes rather than assumes). The zero map
/// survives, so the returned monomial clique `{graph(a x)}` has size
/// `q^4`.
pub fn expurgate7(field: &Field) -> Result<(GraphCode, Vec<usize>)> {
    let tower = Tower::new(field, 4)?;
    let ext = tower.ext().clone();
    let q4 = ext.order();

    // F_q-basis of W = ker(trace) via the null space of the trace form
    let trace_row: Vec<u32> = tower.poly_basis().iter().map(|&b| tower.trace(b)).collect();
    let trace_form = MatrixFq::from_rows(field, &[trace_row])?;
    let kernel = trace_form.null_space();
    debug_assert_eq!(kernel.nrows(), 3);
    let domain_basis: Vec<u32> = (0..3)
        .map(|i| tower.unflatten(kernel.row(i)).expect("coordinate length 4"))
        .collect();

    let graph = |poly: &LinearizedPoly| -> Subspace {
        let mat = graph_matrix(field, &tower, &domain_basis, poly);
        let mut rows = vec![0u32; 3 * 7];
        for i in 0..3 {
            rows[i * 7 + i] = 1;
            rows[i * 7 + 3..i * 7 + 7].copy_from_slice(mat.row(i));
        }
        Subspace::from_canonical_rows(field.clone(), 7, 3, rows)
    };

    let mut removed = BTreeSet::new();
    for r in 1..q4 {
        for u in 0..q4 {
            if tower.trace(u) != 1 {
                continue;
            }
            let a1 = ext.mul(r, u);
            let a0 = ext.neg(ext.mul(r, tower.frobenius(u, 1)));
            removed.insert(graph(&LinearizedPoly::new(&tower, vec![a0, a1])));
        }
    }

    let mut pairs = Vec::new();
    for a1 in 0..q4 {
        for a0 in 0..q4 {
            let poly = LinearizedPoly::new(&tower, vec![a0, a1]);
            let s = graph(&poly);
            if !removed.contains(&s) {
                pairs.push((s, poly));
            }
        }
    }
    let survivors = GraphCode::from_pairs(field, 7, 3, tower, domain_basis, pairs)?;
    let clique = survivors.monomial_clique()?;
    Ok((survivors, clique))
}
