//! Constant dimension codes: the codeword container, the parallel pairwise
//! verification engine, clique helpers, and the line-oriented `.cdc` file
//! format.
//!
//! A constant dimension code is a set of `k`-spaces of `F_q^v`. The
//! container keeps codewords sorted in canonical order and free of
//! duplicates, so membership is a binary search and serialization is
//! deterministic. Verification checks that pairwise intersections stay at
//! or below a threshold dimension (one point for the codes built here,
//! i.e. minimum subspace distance `2k - 2`).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{is_canonical_rows, Subspace};

/// Seed used by sampled verification when the caller does not pick one.
pub const DEFAULT_SAMPLE_SEED: u64 = 0xC0DE;

/// An ordered, duplicate-free set of `k`-spaces of `F_q^v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantDimensionCode {
    field: Field,
    v: usize,
    k: usize,
    codewords: Vec<Subspace>,
}

/// How many pairs the verification engine inspects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every unordered pair of codewords.
    Exhaustive,
    /// `pairs` distinct unordered pairs drawn from a seeded generator
    /// (capped at the total pair count).
    Sampled { pairs: u64, seed: u64 },
}

/// Outcome of a verification run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    /// Maximum allowed intersection dimension.
    pub threshold: usize,
    pub pairs_checked: u64,
    pub max_intersection_dim: usize,
    /// `2k - 2 * max_intersection_dim`; `2k` for a single-codeword code.
    pub min_distance: usize,
    /// Lexicographically smallest pair exceeding the threshold, if any.
    pub violating_pair: Option<(usize, usize)>,
    /// Pair count per subspace distance, over the checked pairs.
    pub distance_histogram: BTreeMap<usize, u64>,
}

impl VerifyReport {
    /// True when no checked pair exceeded the threshold.
    pub fn ok(&self) -> bool {
        self.violating_pair.is_none()
    }

    /// Stable line-oriented rendering (no timings, diff-friendly).
    pub fn render(&self) -> String {
        let mut out = String::new();
        match self.mode {
            VerifyMode::Exhaustive => out.push_str("mode=exhaustive\n"),
            VerifyMode::Sampled { pairs, seed } => {
                let _ = writeln!(out, "mode=sampled n={pairs} seed={seed}");
            }
        }
        let _ = writeln!(out, "threshold={}", self.threshold);
        let _ = writeln!(out, "pairs={}", self.pairs_checked);
        let _ = writeln!(out, "max_intersection_dim={}", self.max_intersection_dim);
        let _ = writeln!(out, "min_distance={}", self.min_distance);
        match self.violating_pair {
            Some((i, j)) => {
                let _ = writeln!(out, "violating_pair={i},{j}");
            }
            None => out.push_str("violating_pair=none\n"),
        }
        for (d, c) in &self.distance_histogram {
            let _ = writeln!(out, "hist distance={d} pairs={c}");
        }
        out
    }
}

/// Structural statistics derived from a verified code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeStats {
    pub n: usize,
    pub distance_histogram: BTreeMap<usize, u64>,
    /// For `v = 2k`: the partial-spread size cap `q^k + 1` that limits any
    /// clique of pairwise disjoint codewords.
    pub clique_cap: Option<u128>,
    /// Size of the deterministic greedy clique (canonical scan order).
    pub best_clique: usize,
}

impl CodeStats {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n={}", self.n);
        if let Some(cap) = self.clique_cap {
            let _ = writeln!(out, "clique_cap={cap}");
        }
        let _ = writeln!(out, "best_clique={}", self.best_clique);
        out
    }
}

impl ConstantDimensionCode {
    /// Builds a code from codewords, sorting them canonically. Every
    /// codeword must be a `k`-space of the same `F_q^v`; a duplicate is
    /// reported (with the caller's indices) rather than dropped, since the
    /// constructions here never legitimately produce one.
    pub fn new(
        field: &Field,
        v: usize,
        k: usize,
        codewords: Vec<Subspace>,
    ) -> Result<ConstantDimensionCode> {
        if codewords.is_empty() {
            return Err(Error::EmptyCode);
        }
        for s in &codewords {
            if s.field() != field {
                return Err(Error::FieldMismatch(format!(
                    "codeword over {}, code over {}",
                    s.field(),
                    field
                )));
            }
            if s.ambient_dim() != v {
                return Err(Error::AmbientMismatch(format!(
                    "codeword ambient {} in a code over F^{}",
                    s.ambient_dim(),
                    v
                )));
            }
            if s.dim() != k {
                return Err(Error::DimMismatch(format!(
                    "codeword dimension {}, expected {}",
                    s.dim(),
                    k
                )));
            }
        }
        let mut order: Vec<usize> = (0..codewords.len()).collect();
        order.sort_by(|&a, &b| codewords[a].cmp(&codewords[b]));
        for w in order.windows(2) {
            if codewords[w[0]] == codewords[w[1]] {
                let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicateCodeword(i, j));
            }
        }
        let mut sorted = Vec::with_capacity(codewords.len());
        let mut by_index: Vec<Option<Subspace>> = codewords.into_iter().map(Some).collect();
        for i in order {
            sorted.push(by_index[i].take().expect("permutation visits once"));
        }
        Ok(ConstantDimensionCode {
            field: field.clone(),
            v,
            k,
            codewords: sorted,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Codewords in canonical ascending order.
    pub fn codewords(&self) -> &[Subspace] {
        &self.codewords
    }

    pub fn codeword(&self, i: usize) -> &Subspace {
        &self.codewords[i]
    }

    /// Index of a subspace in the sorted codeword list.
    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.codewords.binary_search(s).ok()
    }

    /// Checks pairwise intersection dimensions against `threshold`.
    ///
    /// Exhaustive mode covers all `n(n-1)/2` pairs; sampled mode covers
    /// distinct seeded pairs. The pair work is partitioned across the
    /// current rayon pool and merged with order-independent reductions, so
    /// reports are identical for any thread count.
    pub fn verify(&self, threshold: usize, mode: VerifyMode) -> Result<VerifyReport> {
        for w in self.codewords.windows(2) {
            if w[0] == w[1] {
                // unreachable for containers built by `new`, which rejects
                // duplicates up front; kept as a cheap guard for future
                // construction paths
                let i = self.codewords.iter().position(|s| s == &w[0]).unwrap();
                return Err(Error::DuplicateCodeword(i, i + 1));
            }
        }
        let n = self.codewords.len();
        let accum = match mode {
            VerifyMode::Exhaustive => (0..n)
                .into_par_iter()
                .fold(
                    || Accum::new(self.k, threshold),
                    |mut acc, i| {
                        let a = &self.codewords[i];
                        for (j, b) in self.codewords.iter().enumerate().skip(i + 1) {
                            acc.record(i, j, a.intersection_dim(b));
                        }
                        acc
                    },
                )
                .reduce(|| Accum::new(self.k, threshold), Accum::merge),
            VerifyMode::Sampled { pairs, seed } => {
                let sampled = sample_distinct_pairs(n, pairs, seed);
                sampled
                    .par_iter()
                    .fold(
                        || Accum::new(self.k, threshold),
                        |mut acc, &(i, j)| {
                            let (i, j) = (i as usize, j as usize);
                            let d = self.codewords[i].intersection_dim(&self.codewords[j]);
                            acc.record(i, j, d);
                            acc
                        },
                    )
                    .reduce(|| Accum::new(self.k, threshold), Accum::merge)
            }
        };
        Ok(accum.into_report(self.k, threshold, mode))
    }

    /// True iff the indexed codewords are pairwise disjoint.
    pub fn is_clique(&self, subset: &[usize]) -> bool {
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                if self.codewords[i].intersection_dim(&self.codewords[j]) != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Maximal set of pairwise disjoint codewords grown by a single scan:
    /// codewords are visited in `order` (canonical ascending when `None`)
    /// and kept when disjoint from everything kept so far. Returns sorted
    /// indices; deterministic for a fixed order.
    pub fn greedy_clique(&self, order: Option<&[usize]>) -> Vec<usize> {
        let canonical: Vec<usize>;
        let order = match order {
            Some(o) => o,
            None => {
                canonical = (0..self.codewords.len()).collect();
                &canonical
            }
        };
        let mut kept: Vec<usize> = Vec::new();
        for &i in order {
            if kept
                .iter()
                .all(|&j| self.codewords[i].intersection_dim(&self.codewords[j]) == 0)
            {
                kept.push(i);
            }
        }
        kept.sort_unstable();
        kept
    }

    /// Histogram plus clique bookkeeping for a verified code.
    pub fn stats(&self, report: &VerifyReport) -> CodeStats {
        let clique_cap = if self.v == 2 * self.k {
            let q = self.field.order() as u128;
            Some(q.pow(self.k as u32) + 1)
        } else {
            None
        };
        CodeStats {
            n: self.codewords.len(),
            distance_histogram: report.distance_histogram.clone(),
            clique_cap,
            best_clique: self.greedy_clique(None).len(),
        }
    }

    /// Serializes to the `.cdc` text format (bit-exact, sorted blocks).
    pub fn to_cdc_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "cdc 1 p={} e={} v={} k={} n={}",
            self.field.p(),
            self.field.e(),
            self.v,
            self.k,
            self.codewords.len()
        );
        if self.field.e() > 1 {
            out.push_str("mod");
            for c in self.field.modulus() {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
        for (b, s) in self.codewords.iter().enumerate() {
            if b > 0 {
                out.push('\n');
            }
            for r in 0..self.k {
                let row = s.row(r);
                for (c, x) in row.iter().enumerate() {
                    if c > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{x}");
                }
                out.push('\n');
            }
        }
        out
    }

    /// Parses the `.cdc` text format. Structural problems carry the
    /// offending line number; duplicate blocks are reported as duplicates,
    /// not as parse errors.
    pub fn parse_cdc(input: &str) -> Result<ConstantDimensionCode> {
        let total_lines = input.lines().count();
        if !input.ends_with('\n') {
            return Err(Error::ParseError {
                line: total_lines.max(1),
                msg: "missing trailing newline".into(),
            });
        }
        // 1-based line numbers; comment lines vanish entirely, blank lines
        // are structural separators
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim_start().starts_with('#'));

        let (header_no, header) = lines.next().ok_or(Error::ParseError {
            line: 1,
            msg: "empty input".into(),
        })?;
        let (field, v, k, n) = parse_header(header_no, header)?;
        if field.e() > 1 {
            let (mod_no, mod_line) = lines.next().ok_or(Error::ParseError {
                line: header_no,
                msg: "missing modulus line".into(),
            })?;
            check_modulus_line(&field, mod_no, mod_line)?;
        }

        let mut codewords = Vec::with_capacity(n);
        for b in 0..n {
            if b > 0 {
                match lines.next() {
                    Some((_, l)) if l.trim().is_empty() => {}
                    Some((no, _)) => {
                        return Err(Error::ParseError {
                            line: no,
                            msg: "expected a blank line between blocks".into(),
                        })
                    }
                    None => {
                        return Err(Error::ParseError {
                            line: total_lines,
                            msg: format!("expected {n} blocks, found {b}"),
                        })
                    }
                }
            }
            let mut rows = Vec::with_capacity(k * v);
            let mut first_line = 0;
            for r in 0..k {
                let (no, line) = lines.next().ok_or(Error::ParseError {
                    line: total_lines,
                    msg: format!("block {b}: expected {k} rows"),
                })?;
                if line.trim().is_empty() {
                    return Err(Error::ParseError {
                        line: no,
                        msg: format!("block {b}: expected {k} rows, found {r}"),
                    });
                }
                if r == 0 {
                    first_line = no;
                }
                let entries: Vec<&str> = line.split_whitespace().collect();
                if entries.len() != v {
                    return Err(Error::ParseError {
                        line: no,
                        msg: format!("expected {v} entries, found {}", entries.len()),
                    });
                }
                for tok in entries {
                    let x: u32 = tok.parse().map_err(|_| Error::ParseError {
                        line: no,
                        msg: format!("bad entry '{tok}'"),
                    })?;
                    if x >= field.order() {
                        return Err(Error::ParseError {
                            line: no,
                            msg: format!("entry {x} not below field order {}", field.order()),
                        });
                    }
                    rows.push(x);
                }
            }
            if !is_canonical_rows(&field, v, k, &rows) {
                return Err(Error::ParseError {
                    line: first_line,
                    msg: "basis rows are not in reduced row echelon form".into(),
                });
            }
            codewords.push(Subspace::from_canonical_rows(field.clone(), v, k, rows));
        }
        if let Some((no, l)) = lines.next() {
            if !l.trim().is_empty() || lines.any(|(_, l)| !l.trim().is_empty()) {
                return Err(Error::ParseError {
                    line: no,
                    msg: "trailing content after the last block".into(),
                });
            }
            return Err(Error::ParseError {
                line: no,
                msg: "trailing blank line after the last block".into(),
            });
        }
        ConstantDimensionCode::new(&field, v, k, codewords)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_cdc_string())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<ConstantDimensionCode> {
        let text = std::fs::read_to_string(path)?;
        ConstantDimensionCode::parse_cdc(&text)
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(Field, usize, usize, usize)> {
    let err = |msg: String| Error::ParseError { line: line_no, msg };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 7 || tokens[0] != "cdc" || tokens[1] != "1" {
        return Err(err(
            "expected header 'cdc 1 p=<p> e=<e> v=<v> k=<k> n=<n>'".into()
        ));
    }
    let mut values = [0u64; 5];
    for (slot, (tok, key)) in values
        .iter_mut()
        .zip(tokens[2..].iter().zip(["p", "e", "v", "k", "n"]))
    {
        let rest = tok
            .strip_prefix(key)
            .and_then(|t| t.strip_prefix('='))
            .ok_or_else(|| err(format!("expected {key}=<int>, found '{tok}'")))?;
        *slot = rest
            .parse()
            .map_err(|_| err(format!("bad integer in '{tok}'")))?;
    }
    let [p, e, v, k, n] = values;
    if p > u32::MAX as u64 || e > u32::MAX as u64 {
        return Err(err("field parameters out of range".into()));
    }
    let field = Field::new(p as u32, e as u32).map_err(|e| err(e.to_string()))?;
    if k > v {
        return Err(err(format!("k={k} exceeds v={v}")));
    }
    Ok((field, v as usize, k as usize, n as usize))
}

fn check_modulus_line(field: &Field, line_no: usize, line: &str) -> Result<()> {
    let err = |msg: String| Error::ParseError { line: line_no, msg };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.first() != Some(&"mod") {
        return Err(err("expected a 'mod <c_0> ... <c_e>' line".into()));
    }
    let coeffs: Vec<u32> = tokens[1..]
        .iter()
        .map(|t| t.parse().map_err(|_| err(format!("bad coefficient '{t}'"))))
        .collect::<Result<_>>()?;
    if coeffs != field.modulus() {
        return Err(err(format!(
            "modulus {:?} does not match the canonical modulus {:?} for {}",
            coeffs,
            field.modulus(),
            field
        )));
    }
    Ok(())
}

/// Per-worker pair statistics merged with order-independent operations.
struct Accum {
    threshold: usize,
    pairs: u64,
    hist: Vec<u64>,
    max_dim: usize,
    viol: Option<(usize, usize)>,
}

impl Accum {
    fn new(k: usize, threshold: usize) -> Accum {
        Accum {
            threshold,
            pairs: 0,
            hist: vec![0; k + 1],
            max_dim: 0,
            viol: None,
        }
    }

    #[inline]
    fn record(&mut self, i: usize, j: usize, dim: usize) {
        self.pairs += 1;
        self.hist[dim] += 1;
        if dim > self.max_dim {
            self.max_dim = dim;
        }
        if dim > self.threshold {
            let pair = (i, j);
            if self.viol.is_none_or(|cur| pair < cur) {
                self.viol = Some(pair);
            }
        }
    }

    fn merge(mut self, other: Accum) -> Accum {
        self.pairs += other.pairs;
        for (a, b) in self.hist.iter_mut().zip(&other.hist) {
            *a += b;
        }
        self.max_dim = self.max_dim.max(other.max_dim);
        self.viol = match (self.viol, other.viol) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }

    fn into_report(self, k: usize, threshold: usize, mode: VerifyMode) -> VerifyReport {
        let mut distance_histogram = BTreeMap::new();
        for (dim, &count) in self.hist.iter().enumerate() {
            if count > 0 {
                distance_histogram.insert(2 * k - 2 * dim, count);
            }
        }
        VerifyReport {
            mode,
            threshold,
            pairs_checked: self.pairs,
            max_intersection_dim: self.max_dim,
            min_distance: 2 * k - 2 * self.max_dim,
            violating_pair: self.viol,
            distance_histogram,
        }
    }
}

/// Draws `target` distinct unordered pairs `(i, j)`, `i < j < n`, from a
/// seeded generator; returns all pairs when `target` reaches the total.
/// The draw is independent of thread count.
fn sample_distinct_pairs(n: usize, target: u64, seed: u64) -> Vec<(u32, u32)> {
    let total: u128 = n as u128 * (n as u128 - 1) / 2;
    let target = (target as u128).min(total) as u64;
    if target as u128 == total {
        let mut all = Vec::with_capacity(total as usize);
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                all.push((i, j));
            }
        }
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut codes: Vec<u64> = Vec::with_capacity(target as usize + 16);
    while (codes.len() as u64) < target {
        let missing = target - codes.len() as u64;
        for _ in 0..missing {
            let i = rng.gen_range(0..n as u64);
            let j = rng.gen_range(0..n as u64);
            if i == j {
                continue;
            }
            let (i, j) = (i.min(j), i.max(j));
            codes.push(i * n as u64 + j);
        }
        codes.sort_unstable();
        codes.dedup();
    }
    codes
        .iter()
        .map(|&c| ((c / n as u64) as u32, (c % n as u64) as u32))
        .collect()
}
