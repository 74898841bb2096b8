//! The combination construction: gluing two constant dimension codes
//! along a distinguished subspace, lifting cliques through the glue, the
//! iterated tower it generates, and a catalog of closed-form cardinality
//! bounds.
//!
//! Given a code `C1` of `k`-spaces in `F_q^{v1}` (pairwise intersections
//! at most a point), a clique of pairwise disjoint codewords inside it, a
//! code `C2` in `F_q^{v2}` with `v2 >= 2k`, and a `(v2-k)`-space `S'`
//! containing exactly `Lambda` codewords of `C2` while all others meet it
//! in at most a point, the construction produces a code in
//! `F_q^{v1+v2-k}`: every `U` in `C1` is covered by a copy of a lifted
//! rank-metric code through `U`, clique members instead receive a full
//! embedded copy of `C2`, and the `Lambda` special codewords are planted
//! once in a fixed tail space. The result has size
//! `#C1 * q^{2(v2-k)} + #clique * (#C2 - q^{2(v2-k)} - Lambda) + Lambda`.

use std::collections::BTreeMap;
use std::time::Duration;

use rayon::prelude::*;

use crate::cdc::ConstantDimensionCode;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{direct_sum_map, MatrixFq, Subspace};
use crate::mrd::{expurgate6, gabidulin};
use crate::search::{
    exact_augment, exact_max_clique, extend_disjoint_clique, CompatibilityGraph,
    DEFAULT_SEARCH_BUDGET,
};

/// How many codewords each clique member of `C1` receives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Clique members get the embedded `C2` copy verbatim, so the output
    /// size matches [`predicted_size`] exactly.
    Literal,
    /// Clique members get the larger of the `C2` copy and the rank-metric
    /// copy; the output size is then at least the predicted one.
    BestPerCodeword,
}

impl Strategy {
    /// Stable token used in audit logs and CLI headers.
    pub fn label(self) -> &'static str {
        match self {
            Strategy::Literal => "literal",
            Strategy::BestPerCodeword => "best-per-codeword",
        }
    }
}

/// Inputs of the combination construction.
#[derive(Clone, Debug)]
pub struct CombineSpec {
    pub c1: ConstantDimensionCode,
    /// Indices into `c1` of pairwise disjoint codewords.
    pub clique1: Vec<usize>,
    pub c2: ConstantDimensionCode,
    /// The distinguished `(v2-k)`-space of the `c2` ambient.
    pub s_prime: Subspace,
    pub strategy: Strategy,
}

/// Where an output codeword came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Image of a `C2` codeword under the embedding attached to `U`.
    C2Copy { u: usize },
    /// A `[basis(U) | A]` row space for a rank-metric codeword `A`.
    MrdCopy { u: usize },
    /// One of the `Lambda` codewords inside `S'`, planted in the tail.
    Planted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CopyKind {
    C2,
    Mrd,
}

impl CopyKind {
    fn label(self) -> &'static str {
        match self {
            CopyKind::C2 => "c2",
            CopyKind::Mrd => "mrd",
        }
    }
}

/// Audited result of [`combine`].
#[derive(Clone, Debug)]
pub struct CombineReport {
    /// Number of `C2` codewords contained in `S'`.
    pub lambda: usize,
    /// Index into `C2` of the anchor codeword mapped onto each `U`.
    pub w0_index: usize,
    /// Right-hand side of the size formula.
    pub predicted: u128,
    /// Actual output size.
    pub actual: u128,
    /// Output codewords contributed per `C1` index.
    pub per_copy_sizes: BTreeMap<usize, usize>,
    /// The combined code in `F_q^{v1+v2-k}`.
    pub output: ConstantDimensionCode,
    /// Origin of each output codeword, aligned with `output.codewords()`.
    pub provenance: Vec<Origin>,
    /// Clique indices into `output` filled in by the series driver.
    pub lifted_clique: Option<Vec<usize>>,
    ctx: LiftContext,
}

#[derive(Clone, Debug)]
struct LiftContext {
    q: u32,
    k: usize,
    v1: usize,
    v2: usize,
    n1: usize,
    strategy: Strategy,
    clique1: Vec<usize>,
    kinds: Vec<CopyKind>,
    embeddings: Vec<MatrixFq>,
    kind_by_u: Vec<CopyKind>,
    c2: ConstantDimensionCode,
    s_prime: Subspace,
}

/// The size formula `n1 * q^{2(v2-k)} + n1c * (n2 - q^{2(v2-k)} - Lambda)
/// + Lambda`, evaluated exactly. The middle term may be negative when
/// `C2` is smaller than a rank-metric copy; the value is returned as-is.
pub fn predicted_size(
    n1: u128,
    n1c: u128,
    n2: u128,
    q: u32,
    v2: usize,
    k: usize,
    lambda: u128,
) -> Result<u128> {
    if n1c > n1 {
        return Err(Error::InvalidSpec(format!(
            "clique size {n1c} exceeds code size {n1}"
        )));
    }
    if lambda > n2 {
        return Err(Error::InvalidSpec(format!(
            "lambda {lambda} exceeds code size {n2}"
        )));
    }
    if q < 2 {
        return Err(Error::InvalidSpec(format!("{q} is not a prime power")));
    }
    if k < 1 || v2 < 2 * k {
        return Err(Error::InvalidSpec(format!(
            "need v2 >= 2k >= 2, got v2={v2} k={k}"
        )));
    }
    let overflow = || Error::InvalidSpec("size formula overflows".into());
    let x = (q as i128)
        .checked_pow(2 * (v2 - k) as u32)
        .ok_or_else(overflow)?;
    let head = (n1 as i128).checked_mul(x).ok_or_else(overflow)?;
    let mid = (n2 as i128)
        .checked_sub(x)
        .and_then(|t| t.checked_sub(lambda as i128))
        .and_then(|t| t.checked_mul(n1c as i128))
        .ok_or_else(overflow)?;
    let total = head
        .checked_add(mid)
        .and_then(|t| t.checked_add(lambda as i128))
        .ok_or_else(overflow)?;
    debug_assert!(total >= 0);
    Ok(total as u128)
}

/// Runs the combination construction.
///
/// The output lives in `F_q^{v1+v2-k}` with `C1` embedded in the leading
/// `v1` coordinates and the tail space `S` spanned by the last `v2-k`
/// unit vectors. Every codeword of the output either contains some `U`
/// of `C1` or is one of the `Lambda` planted ones inside `S`; producing
/// the same subspace twice is reported as a construction bug rather than
/// deduplicated. The output is not re-verified here — callers check the
/// pairwise distance at whatever scale they can afford.
pub fn combine(spec: CombineSpec) -> Result<CombineReport> {
    let CombineSpec {
        c1,
        clique1,
        c2,
        s_prime,
        strategy,
    } = spec;
    let field = c1.field().clone();
    if *c2.field() != field || *s_prime.field() != field {
        return Err(Error::FieldMismatch("combine inputs".into()));
    }
    let k = c1.dim();
    if c2.dim() != k {
        return Err(Error::DimMismatch(format!(
            "codeword dimensions differ: {} vs {}",
            k,
            c2.dim()
        )));
    }
    let (v1, v2) = (c1.ambient_dim(), c2.ambient_dim());
    if k < 2 || v2 < 2 * k {
        return Err(Error::InvalidSpec(format!(
            "need v2 >= 2k and k >= 2, got v2={v2} k={k}"
        )));
    }
    let mut clique1 = clique1;
    clique1.sort_unstable();
    clique1.dedup();
    if clique1.last().is_some_and(|&u| u >= c1.len()) {
        return Err(Error::InvalidSpec("clique index out of range".into()));
    }
    if !c1.is_clique(&clique1) {
        return Err(Error::InvalidSpec(
            "clique1 members are not pairwise disjoint".into(),
        ));
    }
    if s_prime.ambient_dim() != v2 || s_prime.dim() != v2 - k {
        return Err(Error::BadSpecialSpace(format!(
            "expected a {}-space of the {}-dimensional ambient, got a {}-space of {}",
            v2 - k,
            v2,
            s_prime.dim(),
            s_prime.ambient_dim()
        )));
    }

    // admissibility scan: contained codewords count Lambda, everything
    // else must meet S' in at most a point
    let mut lambda_indices = Vec::new();
    for (i, w) in c2.codewords().iter().enumerate() {
        let d = w.intersection_dim(&s_prime);
        if d == k {
            lambda_indices.push(i);
        } else if d > 1 {
            return Err(Error::BadSpecialSpace(format!(
                "codeword {i} meets the special space in dimension {d}"
            )));
        }
    }
    let lambda = lambda_indices.len();
    let w0_index = c2
        .codewords()
        .iter()
        .position(|w| w.intersection_dim(&s_prime) == 0)
        .ok_or(Error::NoAnchor)?;

    let (n1, n2) = (c1.len(), c2.len());
    let q = field.order();
    let predicted = predicted_size(
        n1 as u128,
        clique1.len() as u128,
        n2 as u128,
        q,
        v2,
        k,
        lambda as u128,
    )?;

    let v_out = v1 + v2 - k;
    let s_coords: Vec<usize> = (v1..v_out).collect();
    let s_space = Subspace::unit_span(&field, v_out, &s_coords);
    let embed = |u: &Subspace| -> Subspace {
        let mut rows = vec![0u32; k * v_out];
        for r in 0..k {
            rows[r * v_out..r * v_out + v1].copy_from_slice(u.row(r));
        }
        Subspace::from_canonical_rows(field.clone(), v_out, k, rows)
    };

    // copy kind per codeword of C1
    let mrd_size = (q as u128).pow(2 * (v2 - k) as u32);
    let c2_copy_size = n2 - lambda;
    let kind_by_u: Vec<CopyKind> = (0..n1)
        .map(|u| match clique1.binary_search(&u) {
            Ok(_) => match strategy {
                Strategy::Literal => CopyKind::C2,
                Strategy::BestPerCodeword => {
                    if (c2_copy_size as u128) >= mrd_size {
                        CopyKind::C2
                    } else {
                        CopyKind::Mrd
                    }
                }
            },
            Err(_) => CopyKind::Mrd,
        })
        .collect();

    let mrd_matrices: Vec<MatrixFq> = if kind_by_u.contains(&CopyKind::Mrd) {
        gabidulin(&field, k, v2 - k, k - 1)?.codewords().to_vec()
    } else {
        Vec::new()
    };
    let w0 = c2.codeword(w0_index);
    let embeddings: Vec<MatrixFq> = clique1
        .iter()
        .map(|&u| direct_sum_map(w0, &s_prime, &embed(c1.codeword(u)), &s_space))
        .collect::<Result<_>>()?;
    let kinds: Vec<CopyKind> = clique1.iter().map(|&u| kind_by_u[u]).collect();

    let copies: Vec<Vec<(Subspace, Origin)>> = (0..n1)
        .into_par_iter()
        .map(|u| -> Result<Vec<(Subspace, Origin)>> {
            match kind_by_u[u] {
                CopyKind::C2 => {
                    let pos = clique1.binary_search(&u).expect("clique member");
                    let phi = &embeddings[pos];
                    let mut copy = Vec::with_capacity(c2_copy_size);
                    for (i, w) in c2.codewords().iter().enumerate() {
                        if lambda_indices.binary_search(&i).is_err() {
                            copy.push((w.apply_map(phi)?, Origin::C2Copy { u }));
                        }
                    }
                    Ok(copy)
                }
                CopyKind::Mrd => {
                    let base = c1.codeword(u);
                    let copy = mrd_matrices
                        .iter()
                        .map(|a| {
                            let mut rows = vec![0u32; k * v_out];
                            for r in 0..k {
                                rows[r * v_out..r * v_out + v1].copy_from_slice(base.row(r));
                                rows[r * v_out + v1..(r + 1) * v_out].copy_from_slice(a.row(r));
                            }
                            (
                                Subspace::from_canonical_rows(field.clone(), v_out, k, rows),
                                Origin::MrdCopy { u },
                            )
                        })
                        .collect();
                    Ok(copy)
                }
            }
        })
        .collect::<Result<_>>()?;

    let mut per_copy_sizes = BTreeMap::new();
    let mut pairs: Vec<(Subspace, Origin)> = Vec::new();
    for (u, copy) in copies.into_iter().enumerate() {
        per_copy_sizes.insert(u, copy.len());
        pairs.extend(copy);
    }

    // plant the Lambda codewords once, sent into the tail space by the
    // same fixed isomorphism S' -> S every embedding restricts to
    let s_pivots = s_prime.pivots();
    for &i in &lambda_indices {
        let x = c2.codeword(i);
        let rows: Vec<Vec<u32>> = (0..k)
            .map(|r| {
                let mut row = vec![0u32; v_out];
                for (j, &p) in s_pivots.iter().enumerate() {
                    row[v1 + j] = x.row(r)[p];
                }
                row
            })
            .collect();
        let planted = Subspace::from_rows(&field, v_out, &rows)?;
        if planted.dim() != k {
            return Err(Error::ConstructionBug(
                "planted codeword lost dimension".into(),
            ));
        }
        pairs.push((planted, Origin::Planted));
    }

    pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::ConstructionBug(format!(
                "duplicate output codeword from {:?} and {:?}",
                w[0].1, w[1].1
            )));
        }
    }
    let (codewords, provenance): (Vec<Subspace>, Vec<Origin>) = pairs.into_iter().unzip();
    let output = match ConstantDimensionCode::new(&field, v_out, k, codewords) {
        Ok(code) => code,
        Err(Error::DuplicateCodeword(i, j)) => {
            return Err(Error::ConstructionBug(format!(
                "duplicate output codeword ({i}, {j})"
            )))
        }
        Err(e) => return Err(e),
    };
    let actual = output.len() as u128;
    if strategy == Strategy::Literal && actual != predicted {
        return Err(Error::ConstructionBug(format!(
            "literal combination produced {actual} codewords, formula says {predicted}"
        )));
    }

    Ok(CombineReport {
        lambda,
        w0_index,
        predicted,
        actual,
        per_copy_sizes,
        output,
        provenance,
        lifted_clique: None,
        ctx: LiftContext {
            q,
            k,
            v1,
            v2,
            n1,
            strategy,
            clique1,
            kinds,
            embeddings,
            kind_by_u,
            c2,
            s_prime,
        },
    })
}

impl CombineReport {
    /// Lifts a clique of `C2` through every clique embedding: the images
    /// of `clique2` under each clique member's copy form a clique of size
    /// `#clique1 * #clique2` in the output. Every `clique2` element must
    /// be disjoint from `S'`.
    pub fn lift_clique(&self, clique2: &[usize]) -> Result<Vec<usize>> {
        let ctx = &self.ctx;
        let mut clique2 = clique2.to_vec();
        clique2.sort_unstable();
        clique2.dedup();
        if clique2.last().is_some_and(|&j| j >= ctx.c2.len()) {
            return Err(Error::InvalidSpec("clique index out of range".into()));
        }
        if !ctx.c2.is_clique(&clique2) {
            return Err(Error::InvalidSpec(
                "clique2 members are not pairwise disjoint".into(),
            ));
        }
        for &j in &clique2 {
            let dim = ctx.c2.codeword(j).intersection_dim(&ctx.s_prime);
            if dim != 0 {
                return Err(Error::NotSDisjoint { index: j, dim });
            }
        }
        let mut lifted = Vec::new();
        for (pos, _) in ctx.clique1.iter().enumerate() {
            if ctx.kinds[pos] != CopyKind::C2 {
                continue;
            }
            let phi = &ctx.embeddings[pos];
            for &j in &clique2 {
                let image = ctx.c2.codeword(j).apply_map(phi)?;
                let idx = self.output.index_of(&image).ok_or_else(|| {
                    Error::ConstructionBug("lifted clique image missing from output".into())
                })?;
                lifted.push(idx);
            }
        }
        lifted.sort_unstable();
        lifted.dedup();
        let expected = ctx.kinds.iter().filter(|&&k| k == CopyKind::C2).count() * clique2.len();
        if lifted.len() != expected || !self.output.is_clique(&lifted) {
            return Err(Error::ConstructionBug(
                "lifted images do not form a full clique".into(),
            ));
        }
        Ok(lifted)
    }

    /// Plain-text audit log: a header echoing the inputs, one line per
    /// copy, and the size accounting.
    pub fn render_audit(&self) -> String {
        let ctx = &self.ctx;
        let mut out = String::new();
        out.push_str(&format!(
            "# combine q={} k={} v1={} v2={} out={}\n",
            ctx.q,
            ctx.k,
            ctx.v1,
            ctx.v2,
            self.output.ambient_dim()
        ));
        let sprime = match ctx.c2.index_of(&ctx.s_prime) {
            Some(i) => i.to_string(),
            None => "custom".into(),
        };
        out.push_str(&format!(
            "# n1={} clique1={} n2={} strategy={} sprime={} w0={}\n",
            ctx.n1,
            ctx.clique1.len(),
            ctx.c2.len(),
            ctx.strategy.label(),
            sprime,
            self.w0_index
        ));
        for (&u, &size) in &self.per_copy_sizes {
            out.push_str(&format!(
                "copy U={} type={} size={}\n",
                u,
                ctx.kind_by_u[u].label(),
                size
            ));
        }
        out.push_str(&format!(
            "lambda={} predicted={} actual={}\n",
            self.lambda, self.predicted, self.actual
        ));
        out
    }
}

/// A tower-ready base: a code in `F_q^{2k}` together with a clique of
/// pairwise disjoint codewords and a distinguished codeword the
/// construction glues along (so `Lambda = 1` at every step). The
/// distinguished codeword may itself be a clique member: each step lifts
/// the members disjoint from it and restores the clique to full size by
/// a deterministic search over the combined code.
#[derive(Clone, Debug)]
pub struct SeriesBase {
    pub code: ConstantDimensionCode,
    /// Indices of pairwise disjoint codewords.
    pub clique: Vec<usize>,
    /// Index of the codeword used as the special space.
    pub s_prime_index: usize,
}

impl SeriesBase {
    pub fn new(
        code: ConstantDimensionCode,
        clique: Vec<usize>,
        s_prime_index: usize,
    ) -> Result<SeriesBase> {
        if code.ambient_dim() != 2 * code.dim() {
            return Err(Error::InvalidSpec(format!(
                "base ambient {} is not twice the codeword dimension {}",
                code.ambient_dim(),
                code.dim()
            )));
        }
        if s_prime_index >= code.len() {
            return Err(Error::InvalidSpec(
                "special codeword index out of range".into(),
            ));
        }
        let mut clique = clique;
        clique.sort_unstable();
        clique.dedup();
        if clique.last().is_some_and(|&i| i >= code.len()) {
            return Err(Error::InvalidSpec("clique index out of range".into()));
        }
        if !code.is_clique(&clique) {
            return Err(Error::InvalidSpec(
                "base clique members are not pairwise disjoint".into(),
            ));
        }
        let s = code.codeword(s_prime_index);
        let has_partner = (0..code.len())
            .any(|j| j != s_prime_index && code.codeword(j).intersection_dim(s) == 0);
        if !has_partner {
            return Err(Error::NoAnchor);
        }
        Ok(SeriesBase {
            code,
            clique,
            s_prime_index,
        })
    }
}

/// Result of iterating the construction `t` times from a base.
#[derive(Clone, Debug)]
pub struct SeriesResult {
    /// The final code, in `F_q^{6+3t}` for a 6-dimensional base.
    pub code: ConstantDimensionCode,
    /// The carried clique: indices into `code`, of size `#clique^{t+1}`.
    pub clique: Vec<usize>,
    /// One report per applied combination step.
    pub steps: Vec<CombineReport>,
}

/// Iterates [`combine`] `t` times with `C1` the running code and `C2` the
/// base, gluing along the base's distinguished codeword (`Lambda = 1`).
/// The clique is carried forward by lifting the base-clique members that
/// are disjoint from the distinguished codeword through every copy
/// ([`CombineReport::lift_clique`]), then topping the family back up to
/// `#clique * #base-clique` members with [`extend_disjoint_clique`]; when
/// the distinguished codeword avoids the whole clique the lift alone
/// already reaches that size.
pub fn series(t: usize, base: &SeriesBase) -> Result<SeriesResult> {
    if base.code.dim() != 3 {
        return Err(Error::InvalidSpec(format!(
            "the tower is defined for planes (k=3), got k={}",
            base.code.dim()
        )));
    }
    let s_prime = base.code.codeword(base.s_prime_index).clone();
    let liftable: Vec<usize> = base
        .clique
        .iter()
        .copied()
        .filter(|&i| base.code.codeword(i).intersection_dim(&s_prime) == 0)
        .collect();
    let mut code = base.code.clone();
    let mut clique = base.clique.clone();
    let mut steps = Vec::with_capacity(t);
    for _ in 0..t {
        let target = clique.len() * base.clique.len();
        let spec = CombineSpec {
            c1: code,
            clique1: clique,
            c2: base.code.clone(),
            s_prime: s_prime.clone(),
            strategy: Strategy::Literal,
        };
        let mut report = combine(spec)?;
        let seed = report.lift_clique(&liftable)?;
        let lifted = extend_disjoint_clique(&report.output, seed, target, DEFAULT_SEARCH_BUDGET)?;
        report.lifted_clique = Some(lifted.clone());
        code = report.output.clone();
        clique = lifted;
        steps.push(report);
    }
    Ok(SeriesResult {
        code,
        clique,
        steps,
    })
}

/// Closed form for the size of the `t`-th tower code over `F_q` built
/// from the standard base of `q^6+2q^2+2q+1` planes with a clique of
/// `q^3-1`:
/// `(q^6+2q^2+2q+1) q^{6t} + (q^{6t}-1)/(q^6-1)
///  + sum_{i=1}^{t} (2q^2+2q)(q^3-1)^i q^{6(t-i)}`.
pub fn series_size_formula(t: u32, q: u32) -> u128 {
    let q = q as u128;
    let head = (q.pow(6) + 2 * q.pow(2) + 2 * q + 1) * q.pow(6 * t);
    let geometric: u128 = (0..t).map(|j| q.pow(6 * j)).sum();
    let tail: u128 = (1..=t)
        .map(|i| (2 * q * q + 2 * q) * (q.pow(3) - 1).pow(i) * q.pow(6 * (t - i)))
        .sum();
    head + geometric + tail
}

/// Recovers the standard base in `F_q^6`: the expurgated lifted code plus
/// an exact maximum-clique augmentation to `q^6 + 2q^2 + 2q + 1`
/// codewords, carrying the monomial-graph clique of size `q^3-1` and
/// distinguishing its canonically smallest member. (No codeword of the
/// augmented code is disjoint from the entire clique, so the glue point
/// must be one of its members.) Only `q = 2` is derivable in-process;
/// larger fields must import an augmented base from file.
pub fn standard_base(field: &Field) -> Result<SeriesBase> {
    let q = field.order();
    if q != 2 {
        return Err(Error::MissingBase(format!(
            "no in-process augmentation for q={q}; import a base code instead"
        )));
    }
    let (gc, clique) = expurgate6(field)?;
    let augmented = exact_augment(gc.code(), DEFAULT_SEARCH_BUDGET)?;
    let expected = (q as u128).pow(6) + 2 * (q as u128).pow(2) + 2 * q as u128 + 1;
    if augmented.code.len() as u128 != expected {
        return Err(Error::MissingBase(format!(
            "augmentation reached {} codewords of the required {expected}",
            augmented.code.len()
        )));
    }
    if !augmented.optimal {
        return Err(Error::MissingBase(
            "augmentation budget expired before maximality was certified".into(),
        ));
    }
    let clique: Vec<usize> = clique
        .iter()
        .map(|&i| {
            augmented
                .code
                .index_of(gc.code().codeword(i))
                .expect("augmentation preserves the base codewords")
        })
        .collect();
    let s_prime_index = clique[0];
    SeriesBase::new(augmented.code, clique, s_prime_index)
}

/// Canonical special-space selection: the smallest codeword disjoint
/// from at least one other codeword, so the combination has an anchor
/// and `Lambda = 1`.
pub fn auto_s_prime(code: &ConstantDimensionCode) -> Result<usize> {
    let n = code.len();
    (0..n)
        .find(|&i| {
            let s = code.codeword(i);
            (0..n).any(|j| j != i && code.codeword(j).intersection_dim(s) == 0)
        })
        .ok_or(Error::NoAnchor)
}

/// Prepares an imported code as a tower base.
///
/// With a supplied clique, the distinguished codeword is the canonically
/// smallest one disjoint from every clique member when such a codeword
/// exists, and the smallest clique member otherwise. Without a supplied
/// clique, a maximum family of pairwise disjoint codewords is derived by
/// exact search: when it exceeds `q^k - 1` members its smallest member
/// becomes the distinguished codeword and the next `q^k - 1` form the
/// clique; when it has exactly `q^k - 1` it serves as the clique whole,
/// with its smallest member distinguished.
pub fn series_base_from_code(
    code: ConstantDimensionCode,
    clique: Option<Vec<usize>>,
) -> Result<SeriesBase> {
    let n = code.len();
    if let Some(clique) = clique {
        if !clique.is_empty() {
            let s_prime_index = (0..n)
                .find(|&i| {
                    clique.iter().all(|&j| {
                        j != i && code.codeword(i).intersection_dim(code.codeword(j)) == 0
                    })
                })
                .unwrap_or_else(|| *clique.iter().min().expect("clique is non-empty"));
            return SeriesBase::new(code, clique, s_prime_index);
        }
    }
    let q = code.field().order() as usize;
    let target = q.pow(code.dim() as u32) - 1;
    let graph = CompatibilityGraph::new((0..n).map(|j| code.codeword(j).clone()).collect(), 0);
    let found = exact_max_clique(&graph, &[], Duration::from_secs(60))?;
    let mut family = found.clique;
    family.sort_unstable();
    if family.len() < 2 {
        return Err(Error::NoAnchor);
    }
    if family.len() < target {
        return Err(Error::MissingBase(format!(
            "largest disjoint family has {} members; the tower needs {target}",
            family.len()
        )));
    }
    let s_prime_index = family[0];
    let clique: Vec<usize> = if family.len() > target {
        family[1..=target].to_vec()
    } else {
        family
    };
    SeriesBase::new(code, clique, s_prime_index)
}

/// Builds the 9-dimensional code attaining the `corollary-9-4-3` catalog
/// value: one combination step with the standard base as both inputs.
/// The report's `lifted_clique` carries the `(q^3-1)^2` clique.
pub fn corollary_943(field: &Field) -> Result<CombineReport> {
    let base = standard_base(field)?;
    let mut result = series(1, &base)?;
    Ok(result.steps.pop().expect("one combination step"))
}

/// A named cardinality bound: a polynomial in `q` recording the best
/// construction size for the code parameters `(v, d, k)`.
#[derive(Clone, Copy, Debug)]
pub struct BoundEntry {
    pub name: &'static str,
    pub v: u32,
    pub d: u32,
    pub k: u32,
    terms: &'static [(i64, u32)],
}

impl BoundEntry {
    /// Exact polynomial evaluation at `q`.
    pub fn eval(&self, q: u64) -> Result<u128> {
        if q < 2 {
            return Err(Error::InvalidSpec(format!("{q} is not a prime power")));
        }
        let overflow = || Error::InvalidSpec(format!("bound {} overflows at q={q}", self.name));
        let mut acc: i128 = 0;
        for &(c, e) in self.terms {
            let p = (q as i128).checked_pow(e).ok_or_else(overflow)?;
            let term = (c as i128).checked_mul(p).ok_or_else(overflow)?;
            acc = acc.checked_add(term).ok_or_else(overflow)?;
        }
        if acc < 0 {
            return Err(Error::InvalidSpec(format!(
                "bound {} is negative at q={q}",
                self.name
            )));
        }
        Ok(acc as u128)
    }
}

static CATALOG: &[BoundEntry] = &[
    BoundEntry {
        name: "corollary-9-4-3",
        v: 9,
        d: 4,
        k: 3,
        terms: &[
            (1, 12),
            (2, 8),
            (2, 7),
            (1, 6),
            (2, 5),
            (2, 4),
            (-2, 2),
            (-2, 1),
            (1, 0),
        ],
    },
    BoundEntry {
        name: "prior-9-4-3",
        v: 9,
        d: 4,
        k: 3,
        terms: &[(1, 12), (2, 8), (2, 7), (1, 6), (1, 5), (1, 4), (1, 0)],
    },
    BoundEntry {
        name: "ineq1-10-4-3",
        v: 10,
        d: 4,
        k: 3,
        terms: &[
            (1, 14),
            (2, 10),
            (2, 9),
            (2, 8),
            (1, 7),
            (-1, 5),
            (-2, 4),
            (-1, 3),
            (1, 1),
            (1, 0),
        ],
    },
    BoundEntry {
        name: "ineq2-11-4-3",
        v: 11,
        d: 4,
        k: 3,
        terms: &[
            (1, 16),
            (1, 12),
            (1, 11),
            (2, 10),
            (2, 9),
            (2, 8),
            (2, 7),
            (2, 6),
            (1, 0),
        ],
    },
    BoundEntry {
        name: "ineq3-10-4-3",
        v: 10,
        d: 4,
        k: 3,
        terms: &[
            (1, 14),
            (1, 11),
            (1, 10),
            (1, 8),
            (-1, 7),
            (2, 6),
            (2, 5),
            (1, 0),
        ],
    },
    BoundEntry {
        name: "ineq4-11-4-3",
        v: 11,
        d: 4,
        k: 3,
        terms: &[(1, 16), (1, 13), (1, 12), (1, 10), (1, 8), (-1, 5), (-1, 4)],
    },
];

/// The catalog of named bounds.
pub fn bound_catalog() -> &'static [BoundEntry] {
    CATALOG
}

/// Evaluates a named catalog bound at `q`.
pub fn bound_value(name: &str, q: u64) -> Result<u128> {
    let entry = CATALOG
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| Error::UnknownBound(name.to_string()))?;
    entry.eval(q)
}

/// Catalog entries whose parameters match the given `(v, d, k)`.
pub fn bounds_for(v: u32, d: u32, k: u32) -> Vec<&'static BoundEntry> {
    CATALOG
        .iter()
        .filter(|b| b.v == v && b.d == d && b.k == k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdc::VerifyMode;
    use crate::mrd::{gabidulin, lift};
    use crate::testutil::base77;
    use proptest::prelude::{
        any, prop_assert, prop_assert_eq, prop_assume, proptest, ProptestConfig,
    };

    fn f2() -> Field {
        Field::new(2, 1).unwrap()
    }

    fn code64() -> ConstantDimensionCode {
        lift(&gabidulin(&f2(), 3, 3, 2).unwrap())
            .unwrap()
            .into_code()
    }

    fn code8() -> ConstantDimensionCode {
        lift(&gabidulin(&f2(), 3, 3, 3).unwrap())
            .unwrap()
            .into_code()
    }

    fn s0(v: usize, k: usize) -> Subspace {
        let tail: Vec<usize> = (v - k..v).collect();
        Subspace::unit_span(&f2(), v, &tail)
    }

    fn single_full_space() -> ConstantDimensionCode {
        let full = Subspace::full(&f2(), 3);
        ConstantDimensionCode::new(&f2(), 3, 3, vec![full]).unwrap()
    }

    #[test]
    fn size_formula_examples_and_errors() {
        for n2 in [1u128, 5, 77, 1000] {
            assert_eq!(predicted_size(1, 1, n2, 2, 6, 3, 0).unwrap(), n2);
        }
        assert_eq!(predicted_size(77, 7, 77, 2, 6, 3, 1).unwrap(), 5013);
        assert_eq!(predicted_size(1024, 32, 77, 2, 6, 3, 1).unwrap(), 65921);
        assert!(matches!(
            predicted_size(5, 6, 10, 2, 6, 3, 0),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            predicted_size(5, 5, 10, 2, 6, 3, 11),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            predicted_size(5, 5, 10, 2, 5, 3, 0),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn single_anchor_combination_reproduces_c2() {
        let c2 = code64();
        let report = combine(CombineSpec {
            c1: single_full_space(),
            clique1: vec![0],
            c2: c2.clone(),
            s_prime: s0(6, 3),
            strategy: Strategy::Literal,
        })
        .unwrap();
        assert_eq!(report.lambda, 0);
        assert_eq!(report.predicted, 64);
        assert_eq!(report.actual, 64);
        let out = report.output.verify(1, VerifyMode::Exhaustive).unwrap();
        assert!(out.ok());
        let original = c2.verify(1, VerifyMode::Exhaustive).unwrap();
        assert_eq!(out.distance_histogram, original.distance_histogram);

        // with a codeword as the special space, Lambda = 1
        let base = base77();
        let report = combine(CombineSpec {
            c1: single_full_space(),
            clique1: vec![0],
            c2: base.code.clone(),
            s_prime: base.code.codeword(base.s_prime_index).clone(),
            strategy: Strategy::Literal,
        })
        .unwrap();
        assert_eq!(report.lambda, 1);
        assert_eq!(report.actual, 77);
        assert!(report
            .output
            .verify(1, VerifyMode::Exhaustive)
            .unwrap()
            .ok());
    }

    #[test]
    fn mrd_only_combination_squares_the_code() {
        let c = code64();
        let report = combine(CombineSpec {
            c1: c.clone(),
            clique1: vec![],
            c2: c.clone(),
            s_prime: s0(6, 3),
            strategy: Strategy::Literal,
        })
        .unwrap();
        assert_eq!(report.actual, 4096);
        assert_eq!(report.predicted, 4096);
        assert!(report.per_copy_sizes.values().all(|&s| s == 64));
        assert!(report
            .provenance
            .iter()
            .all(|o| matches!(o, Origin::MrdCopy { .. })));
        // every C1 codeword is embedded, and the whole output avoids the
        // tail space entirely (there are no planted codewords)
        let s = s0(9, 3);
        for w in report.output.codewords() {
            assert_eq!(w.intersection_dim(&s), 0);
        }
        for u in c.codewords() {
            let mut rows = [0u32; 3 * 9];
            for r in 0..3 {
                rows[r * 9..r * 9 + 6].copy_from_slice(u.row(r));
            }
            let emb = Subspace::from_rows(
                &f2(),
                9,
                &[
                    rows[0..9].to_vec(),
                    rows[9..18].to_vec(),
                    rows[18..27].to_vec(),
                ],
            )
            .unwrap();
            assert!(report.output.index_of(&emb).is_some());
        }
        let check = report.output.verify(1, VerifyMode::Exhaustive).unwrap();
        assert!(check.ok());
        assert_eq!(check.min_distance, 4);

        // the trivial clique {W0} lifts to the embedded clique members
        let report = combine(CombineSpec {
            c1: c.clone(),
            clique1: c.greedy_clique(None),
            c2: c.clone(),
            s_prime: s0(6, 3),
            strategy: Strategy::Literal,
        })
        .unwrap();
        let lifted = report.lift_clique(&[report.w0_index]).unwrap();
        assert_eq!(lifted.len(), report.ctx.clique1.len());
        assert!(report.output.is_clique(&lifted));
        assert!(report.lift_clique(&[]).unwrap().is_empty());
    }

    #[test]
    fn corollary_code_is_reproduced_and_verified() {
        let report = corollary_943(&f2()).unwrap();
        assert_eq!(report.actual, 5013);
        assert_eq!(report.predicted, 5013);
        assert_eq!(report.actual, bound_value("corollary-9-4-3", 2).unwrap());
        assert_eq!(report.lambda, 1);
        let clique = report.lifted_clique.as_ref().unwrap();
        assert_eq!(clique.len(), 49);
        assert!(report.output.is_clique(clique));
        let audit = report.render_audit();
        assert!(audit.ends_with("lambda=1 predicted=5013 actual=5013\n"));
        let check = report.output.verify(1, VerifyMode::Exhaustive).unwrap();
        assert!(check.ok());
        assert_eq!(check.min_distance, 4);
        assert_eq!(check.pairs_checked, 5013 * 5012 / 2);
    }

    #[test]
    fn tower_iteration_matches_the_closed_form() {
        let base = base77();
        let t0 = series(0, base).unwrap();
        assert_eq!(t0.code.len(), 77);
        assert_eq!(t0.clique, base.clique);
        assert!(t0.steps.is_empty());

        let t1 = series(1, base).unwrap();
        assert_eq!(t1.code.len() as u128, series_size_formula(1, 2));
        assert_eq!(t1.code.len(), 5013);
        assert_eq!(t1.clique.len(), 49);

        let t2 = series(2, base).unwrap();
        assert_eq!(t2.code.len() as u128, series_size_formula(2, 2));
        assert_eq!(t2.code.len(), 321421);
        assert_eq!(t2.code.ambient_dim(), 12);
        assert_eq!(t2.clique.len(), 343);
        assert!(t2.code.is_clique(&t2.clique));
        let step = &t2.steps[1];
        assert_eq!(
            step.per_copy_sizes.values().filter(|&&s| s == 76).count(),
            49
        );
        assert_eq!(
            step.per_copy_sizes.values().filter(|&&s| s == 64).count(),
            4964
        );
    }

    #[test]
    fn formula_agrees_with_the_catalog_polynomial() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 11, 13] {
            assert_eq!(
                series_size_formula(1, q),
                bound_value("corollary-9-4-3", q as u64).unwrap(),
                "q={q}"
            );
            let q128 = q as u128;
            assert_eq!(
                series_size_formula(0, q),
                q128.pow(6) + 2 * q128.pow(2) + 2 * q128 + 1
            );
        }
    }

    #[test]
    fn catalog_values_at_q2() {
        let expect = [
            ("corollary-9-4-3", 5013u128),
            ("prior-9-4-3", 4977),
            ("ineq1-10-4-3", 20027),
            ("ineq2-11-4-3", 75649),
            ("ineq3-10-4-3", 19777),
            ("ineq4-11-4-3", 79056),
        ];
        for (name, value) in expect {
            assert_eq!(bound_value(name, 2).unwrap(), value, "{name}");
        }
        assert!(
            bound_value("corollary-9-4-3", 2).unwrap() > bound_value("prior-9-4-3", 2).unwrap()
        );
        assert!(matches!(
            bound_value("no-such-bound", 2),
            Err(Error::UnknownBound(_))
        ));
        assert_eq!(bounds_for(9, 4, 3).len(), 2);
        assert_eq!(bounds_for(10, 4, 3).len(), 2);
        assert_eq!(bounds_for(11, 4, 3).len(), 2);
        assert!(bounds_for(12, 4, 3).is_empty());
    }

    #[test]
    fn strategy_picks_the_larger_copy() {
        let literal = combine(CombineSpec {
            c1: single_full_space(),
            clique1: vec![0],
            c2: code8(),
            s_prime: s0(6, 3),
            strategy: Strategy::Literal,
        })
        .unwrap();
        assert_eq!(literal.actual, 8);
        assert_eq!(literal.predicted, 8);

        let best = combine(CombineSpec {
            c1: single_full_space(),
            clique1: vec![0],
            c2: code8(),
            s_prime: s0(6, 3),
            strategy: Strategy::BestPerCodeword,
        })
        .unwrap();
        assert_eq!(best.predicted, 8);
        assert_eq!(best.actual, 64);
        assert!(best.output.verify(1, VerifyMode::Exhaustive).unwrap().ok());
    }

    #[test]
    fn admissibility_and_anchor_errors() {
        let c = code64();
        // wrong dimension for the special space
        let err = combine(CombineSpec {
            c1: single_full_space(),
            clique1: vec![0],
            c2: c.clone(),
            s_prime: Subspace::unit_span(&f2(), 6, &[4, 5]),
            strategy: Strategy::Literal,
        });
        assert!(matches!(err, Err(Error::BadSpecialSpace(_))));
        // a codeword meets this 3-space in a 2-space
        let err = combine(CombineSpec {
            c1: single_full_space(),
            clique1: vec![0],
            c2: c.clone(),
            s_prime: Subspace::unit_span(&f2(), 6, &[0, 1, 3]),
            strategy: Strategy::Literal,
        });
        assert!(matches!(err, Err(Error::BadSpecialSpace(_))));
        // a single codeword contained in the special space leaves no anchor
        let lone = ConstantDimensionCode::new(&f2(), 6, 3, vec![s0(6, 3)]).unwrap();
        let err = combine(CombineSpec {
            c1: single_full_space(),
            clique1: vec![0],
            c2: lone,
            s_prime: s0(6, 3),
            strategy: Strategy::Literal,
        });
        assert!(matches!(err, Err(Error::NoAnchor)));
        // clique1 must be pairwise disjoint
        let touching = (1..c.len())
            .find(|&i| c.codeword(0).intersection_dim(c.codeword(i)) == 1)
            .unwrap();
        let err = combine(CombineSpec {
            c1: c.clone(),
            clique1: vec![0, touching],
            c2: c.clone(),
            s_prime: s0(6, 3),
            strategy: Strategy::Literal,
        });
        assert!(matches!(err, Err(Error::InvalidSpec(_))));
        // lifting a clique that touches the special space is rejected
        let base = base77();
        let report = combine(CombineSpec {
            c1: single_full_space(),
            clique1: vec![0],
            c2: base.code.clone(),
            s_prime: base.code.codeword(base.s_prime_index).clone(),
            strategy: Strategy::Literal,
        })
        .unwrap();
        assert!(matches!(
            report.lift_clique(&[base.s_prime_index]),
            Err(Error::NotSDisjoint { dim: 3, .. })
        ));
    }

    #[test]
    fn audit_log_format_is_stable() {
        let report = combine(CombineSpec {
            c1: single_full_space(),
            clique1: vec![0],
            c2: code64(),
            s_prime: s0(6, 3),
            strategy: Strategy::Literal,
        })
        .unwrap();
        let audit = report.render_audit();
        let lines: Vec<&str> = audit.lines().collect();
        assert_eq!(
            lines,
            vec![
                "# combine q=2 k=3 v1=3 v2=6 out=6",
                "# n1=1 clique1=1 n2=64 strategy=literal sprime=custom w0=0",
                "copy U=0 type=c2 size=64",
                "lambda=0 predicted=64 actual=64",
            ]
        );
        assert!(audit.ends_with('\n'));
    }

    #[test]
    fn imported_base_derivation_supports_the_tower() {
        // any admissible special codeword and 7-clique reproduce the same
        // size: 77*64 + 7*(77-64-1) + 1
        let base = base77();
        let derived = series_base_from_code(base.code.clone(), None).unwrap();
        assert_eq!(derived.clique.len(), 7);
        assert!(derived.code.is_clique(&derived.clique));
        let rebuilt = series(1, &derived).unwrap();
        assert_eq!(rebuilt.code.len(), 5013);

        let explicit =
            series_base_from_code(base.code.clone(), Some(derived.clique.clone())).unwrap();
        assert_eq!(explicit.clique, derived.clique);

        // a fully graph-shaped base: the smallest codeword is the zero
        // graph, avoided by the monomial clique
        let derived = series_base_from_code(code64(), None).unwrap();
        assert_eq!(derived.s_prime_index, 0);
        assert_eq!(derived.clique.len(), 7);
        let rebuilt = series(1, &derived).unwrap();
        assert_eq!(rebuilt.code.len(), 64 * 64 - 7 + 1);
    }

    #[test]
    fn large_asymmetric_combine_matches_the_formula() {
        let base = base77();
        let big = lift(&gabidulin(&f2(), 3, 5, 2).unwrap()).unwrap();
        let clique1 = big.monomial_clique().unwrap();
        assert_eq!(big.code().len(), 1024);
        assert_eq!(clique1.len(), 32);
        let s_prime = base.code.codeword(base.s_prime_index).clone();
        let liftable: Vec<usize> = base
            .clique
            .iter()
            .copied()
            .filter(|&i| base.code.codeword(i).intersection_dim(&s_prime) == 0)
            .collect();
        let report = combine(CombineSpec {
            c1: big.into_code(),
            clique1,
            c2: base.code.clone(),
            s_prime,
            strategy: Strategy::Literal,
        })
        .unwrap();
        assert_eq!(report.lambda, 1);
        assert_eq!(
            report.predicted,
            predicted_size(1024, 32, 77, 2, 6, 3, 1).unwrap()
        );
        assert_eq!(report.actual, 65921);
        assert_eq!(report.output.ambient_dim(), 11);
        let lifted = report.lift_clique(&liftable).unwrap();
        assert_eq!(lifted.len(), 32 * 6);
        assert!(report.output.is_clique(&lifted));
        let check = report
            .output
            .verify(
                1,
                VerifyMode::Sampled {
                    pairs: 2_000_000,
                    seed: 9,
                },
            )
            .unwrap();
        assert!(check.ok());
        assert_eq!(check.pairs_checked, 2_000_000);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn random_subcodes_combine_to_the_predicted_size(
            mask in proptest::collection::vec(any::<bool>(), 64),
            pick_c2_small in any::<bool>(),
        ) {
            let big = code64();
            let chosen: Vec<Subspace> = big
                .codewords()
                .iter()
                .zip(&mask)
                .filter(|(_, &m)| m)
                .map(|(s, _)| s.clone())
                .take(6)
                .collect();
            prop_assume!(!chosen.is_empty());
            let c1 = ConstantDimensionCode::new(&f2(), 6, 3, chosen).unwrap();
            let clique1 = c1.greedy_clique(None);
            let c2 = if pick_c2_small { code8() } else { code64() };
            let n2 = c2.len();
            let report = combine(CombineSpec {
                c1: c1.clone(),
                clique1: clique1.clone(),
                c2,
                s_prime: s0(6, 3),
                strategy: Strategy::Literal,
            })
            .unwrap();
            let predicted = predicted_size(
                c1.len() as u128,
                clique1.len() as u128,
                n2 as u128,
                2,
                6,
                3,
                0,
            )
            .unwrap();
            prop_assert_eq!(report.actual, predicted);
            let check = report.output.verify(1, VerifyMode::Exhaustive).unwrap();
            prop_assert!(check.ok());
            // S-discipline: nothing in the output meets the tail space in
            // more than a point
            let s = s0(9, 3);
            for w in report.output.codewords() {
                prop_assert!(w.intersection_dim(&s) <= 1);
            }
        }
    }
}
