//! Candidate enumeration and clique search for augmenting a code with
//! additional compatible subspaces.
//!
//! Augmenting a constant dimension code means adding further `k`-spaces
//! that meet every existing codeword — and each other — in dimension at
//! most one. The additions therefore form a clique in the compatibility
//! graph over all admissible candidate subspaces, and a maximum clique is
//! a best possible augmentation for the given code.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cdc::ConstantDimensionCode;
use crate::error::{Error, Result};
use crate::linalg::{enumerate_subspaces_capped, Subspace, DEFAULT_ENUMERATION_CAP};

/// Default time budget for exact clique search.
pub const DEFAULT_SEARCH_BUDGET: Duration = Duration::from_secs(300);

/// All `k`-spaces of the ambient space that are not codewords and meet
/// every codeword in dimension at most one, in ascending canonical order.
pub fn candidate_planes(code: &ConstantDimensionCode) -> Result<Vec<Subspace>> {
    let all: Vec<Subspace> = enumerate_subspaces_capped(
        code.field(),
        code.ambient_dim() as u32,
        code.dim() as u32,
        DEFAULT_ENUMERATION_CAP,
    )?
    .collect();
    let keep: Vec<bool> = all
        .par_iter()
        .map(|s| {
            code.index_of(s).is_none()
                && code.codewords().iter().all(|w| s.intersection_dim(w) <= 1)
        })
        .collect();
    Ok(all
        .into_iter()
        .zip(keep)
        .filter_map(|(s, keep)| keep.then_some(s))
        .collect())
}

/// An undirected graph over candidate subspaces; two vertices are
/// adjacent when their intersection dimension does not exceed a fixed
/// bound, so cliques are exactly the mutually compatible subsets.
pub struct CompatibilityGraph {
    candidates: Vec<Subspace>,
    words: usize,
    adj: Vec<u64>,
}

impl CompatibilityGraph {
    /// Builds the graph with adjacency `dim(a n b) <= max_intersection_dim`.
    /// The relation is irreflexive: no vertex is adjacent to itself.
    pub fn new(candidates: Vec<Subspace>, max_intersection_dim: usize) -> CompatibilityGraph {
        let n = candidates.len();
        let words = n.div_ceil(64).max(1);
        let rows: Vec<Vec<u64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0u64; words];
                for (j, other) in candidates.iter().enumerate() {
                    if i != j && candidates[i].intersection_dim(other) <= max_intersection_dim {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        let mut adj = vec![0u64; n * words];
        for (i, row) in rows.into_iter().enumerate() {
            adj[i * words..(i + 1) * words].copy_from_slice(&row);
        }
        CompatibilityGraph {
            candidates,
            words,
            adj,
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Subspace] {
        &self.candidates
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }
}

/// Result of a clique search: vertex indices (sorted ascending) and
/// whether the search proved them maximum before its budget ran out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueResult {
    pub clique: Vec<usize>,
    pub optimal: bool,
}

/// Finds a maximum clique containing `force_include` by branch and bound
/// with greedy-coloring upper bounds and canonical branching order. The
/// search is sequential and fully deterministic for a given graph; when
/// the budget expires the best clique found so far is returned with
/// `optimal: false`.
pub fn exact_max_clique(
    g: &CompatibilityGraph,
    force_include: &[usize],
    budget: Duration,
) -> Result<CliqueResult> {
    let n = g.len();
    let mut force: Vec<usize> = force_include.to_vec();
    force.sort_unstable();
    force.dedup();
    for &v in &force {
        if v >= n {
            return Err(Error::BadSeed(format!("vertex {v} out of range (n={n})")));
        }
    }
    for (a, &i) in force.iter().enumerate() {
        for &j in &force[a + 1..] {
            if !g.adjacent(i, j) {
                return Err(Error::BadSeed(format!(
                    "forced vertices {i} and {j} are incompatible"
                )));
            }
        }
    }

    // restrict to the common neighborhood of the forced vertices
    let mut p = vec![0u64; g.words];
    for v in 0..n {
        p[v / 64] |= 1 << (v % 64);
    }
    for &v in &force {
        for (w, word) in p.iter_mut().enumerate() {
            *word &= g.row(v)[w];
        }
    }

    let mut bb = Bb {
        g,
        best: greedy_clique_on(g, &p),
        current: Vec::new(),
        deadline: Instant::now() + budget,
        timed_out: false,
        tick: 0,
    };
    bb.expand(&p);

    let mut clique = force;
    clique.extend_from_slice(&bb.best);
    clique.sort_unstable();
    Ok(CliqueResult {
        clique,
        optimal: !bb.timed_out,
    })
}

struct Bb<'g> {
    g: &'g CompatibilityGraph,
    best: Vec<usize>,
    current: Vec<usize>,
    deadline: Instant,
    timed_out: bool,
    tick: u32,
}

impl Bb<'_> {
    fn expand(&mut self, p: &[u64]) {
        self.tick = self.tick.wrapping_add(1);
        if self.tick & 1023 == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        let order = color_sort(self.g, p);
        let mut live = p.to_vec();
        for &(v, bound) in order.iter().rev() {
            if self.current.len() + bound <= self.best.len() {
                return;
            }
            self.current.push(v);
            let mut next = vec![0u64; live.len()];
            let mut empty = true;
            for (w, word) in next.iter_mut().enumerate() {
                *word = live[w] & self.g.row(v)[w];
                empty &= *word == 0;
            }
            if empty {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(&next);
            }
            self.current.pop();
            live[v / 64] &= !(1 << (v % 64));
            if self.timed_out {
                return;
            }
        }
    }
}

/// Greedy coloring of the vertices in `p`, returned in ascending color
/// order (ascending index within a color). A vertex's color bounds the
/// largest clique within it and its predecessors in this order.
fn color_sort(g: &CompatibilityGraph, p: &[u64]) -> Vec<(usize, usize)> {
    let mut class_bits: Vec<Vec<u64>> = Vec::new();
    let mut class_members: Vec<Vec<usize>> = Vec::new();
    for v in set_bits(p) {
        let row = g.row(v);
        let slot = class_bits
            .iter()
            .position(|bits| bits.iter().zip(row).all(|(&c, &r)| c & r == 0));
        match slot {
            Some(c) => {
                class_bits[c][v / 64] |= 1 << (v % 64);
                class_members[c].push(v);
            }
            None => {
                let mut bits = vec![0u64; p.len()];
                bits[v / 64] |= 1 << (v % 64);
                class_bits.push(bits);
                class_members.push(vec![v]);
            }
        }
    }
    let mut order = Vec::new();
    for (c, members) in class_members.iter().enumerate() {
        for &v in members {
            order.push((v, c + 1));
        }
    }
    order
}

/// Deterministic greedy clique within `p`: repeatedly takes the vertex of
/// maximum remaining degree (ties to the smallest index).
fn greedy_clique_on(g: &CompatibilityGraph, p: &[u64]) -> Vec<usize> {
    let mut active = p.to_vec();
    let mut chosen = Vec::new();
    loop {
        let mut pick = None;
        for v in set_bits(&active) {
            let deg = g
                .row(v)
                .iter()
                .zip(&active)
                .map(|(&r, &a)| (r & a).count_ones() as usize)
                .sum::<usize>();
            if pick.is_none_or(|(_, best)| deg > best) {
                pick = Some((v, deg));
            }
        }
        let Some((v, _)) = pick else {
            return chosen;
        };
        chosen.push(v);
        for (w, word) in active.iter_mut().enumerate() {
            *word &= g.row(v)[w];
        }
    }
}

fn set_bits(bits: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            out.push(w * 64 + word.trailing_zeros() as usize);
            word &= word - 1;
        }
    }
    out
}

/// Outcome of augmenting a code with a clique of compatible candidates.
#[derive(Clone, Debug)]
pub struct Augmentation {
    /// The input code plus the selected candidates.
    pub code: ConstantDimensionCode,
    /// Indices of the selected candidates in canonical candidate order.
    pub added: Vec<usize>,
    /// Whether the additions were proven maximum (exact search within
    /// budget, or an empty candidate set).
    pub optimal: bool,
}

/// Augments by exact maximum-clique search over the candidate graph. No
/// candidate is given special treatment: pinning a particular plane can
/// cost real capacity (forcing the tail space `{0} x F_2^3` onto the
/// expurgated 56-plane code caps the result at 71 codewords, while the
/// free optimum is 77).
pub fn exact_augment(code: &ConstantDimensionCode, budget: Duration) -> Result<Augmentation> {
    let candidates = candidate_planes(code)?;
    if candidates.is_empty() {
        return Ok(Augmentation {
            code: code.clone(),
            added: Vec::new(),
            optimal: true,
        });
    }
    let g = CompatibilityGraph::new(candidates, 1);
    let found = exact_max_clique(&g, &[], budget)?;
    let augmented = extend_code(code, &g, &found.clique)?;
    Ok(Augmentation {
        code: augmented,
        added: found.clique,
        optimal: found.optimal,
    })
}

/// Deterministically grows a pairwise disjoint family of codewords to
/// `target` members: a canonical-order scan keeps every codeword disjoint
/// from all kept so far, and if that walls itself in short of the target,
/// an exact search over the codewords compatible with the original seed
/// completes the family. Errors when no family of `target` members
/// containing the seed can be found within the budget.
pub fn extend_disjoint_clique(
    code: &ConstantDimensionCode,
    seed: Vec<usize>,
    target: usize,
    budget: Duration,
) -> Result<Vec<usize>> {
    let n = code.len();
    let mut family = seed;
    family.sort_unstable();
    family.dedup();
    if family.last().is_some_and(|&i| i >= n) {
        return Err(Error::InvalidSpec("seed index out of range".into()));
    }
    if !code.is_clique(&family) {
        return Err(Error::InvalidSpec(
            "seed members are not pairwise disjoint".into(),
        ));
    }
    if family.len() >= target {
        return Ok(family);
    }
    let seed = family.clone();
    let mut in_seed = vec![false; n];
    for &i in &family {
        in_seed[i] = true;
    }
    // Greedy pass: the scan is strictly ascending, so only seed members
    // need a marker.
    for (i, &skip) in in_seed.iter().enumerate() {
        if family.len() == target {
            break;
        }
        if skip {
            continue;
        }
        let w = code.codeword(i);
        if family
            .iter()
            .all(|&j| code.codeword(j).intersection_dim(w) == 0)
        {
            family.push(i);
        }
    }
    if family.len() == target {
        family.sort_unstable();
        return Ok(family);
    }
    let vertices: Vec<usize> = (0..n)
        .filter(|&i| {
            !seed.contains(&i)
                && seed
                    .iter()
                    .all(|&j| code.codeword(j).intersection_dim(code.codeword(i)) == 0)
        })
        .collect();
    let graph = CompatibilityGraph::new(
        vertices.iter().map(|&i| code.codeword(i).clone()).collect(),
        0,
    );
    let found = exact_max_clique(&graph, &[], budget)?;
    let mut family: Vec<usize> = seed
        .iter()
        .copied()
        .chain(found.clique.iter().map(|&g| vertices[g]))
        .collect();
    family.sort_unstable();
    if family.len() < target {
        let detail = if found.optimal {
            "no larger family exists"
        } else {
            "search budget expired"
        };
        return Err(Error::MissingBase(format!(
            "disjoint family through the seed stalled at {} of {target} members ({detail})",
            family.len()
        )));
    }
    family.truncate(target);
    Ok(family)
}

/// Augments by randomized-restart greedy clique growth: candidates are
/// picked by maximum remaining-compatibility degree, ties broken by
/// position in the restart's candidate order (canonical for the first
/// restart, seeded shuffles afterwards); the best result over all
/// restarts wins.
pub fn greedy_augment(
    code: &ConstantDimensionCode,
    restarts: u32,
    seed: u64,
) -> Result<Augmentation> {
    let candidates = candidate_planes(code)?;
    if candidates.is_empty() {
        return Ok(Augmentation {
            code: code.clone(),
            added: Vec::new(),
            optimal: true,
        });
    }
    let g = CompatibilityGraph::new(candidates, 1);
    let n = g.len();
    let mut best: Vec<usize> = Vec::new();
    for r in 0..restarts.max(1) {
        let mut position: Vec<usize> = (0..n).collect();
        if r > 0 {
            let mut order: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            order.shuffle(&mut rng);
            for (pos, &v) in order.iter().enumerate() {
                position[v] = pos;
            }
        }
        let pick = greedy_by_degree(&g, &position);
        if pick.len() > best.len() {
            best = pick;
        }
    }
    best.sort_unstable();
    let augmented = extend_code(code, &g, &best)?;
    Ok(Augmentation {
        code: augmented,
        added: best,
        optimal: false,
    })
}

fn greedy_by_degree(g: &CompatibilityGraph, position: &[usize]) -> Vec<usize> {
    let n = g.len();
    let mut active = vec![0u64; n.div_ceil(64).max(1)];
    for v in 0..n {
        active[v / 64] |= 1 << (v % 64);
    }
    let mut chosen = Vec::new();
    loop {
        let mut pick: Option<(usize, usize)> = None;
        for v in set_bits(&active) {
            let deg = g
                .row(v)
                .iter()
                .zip(&active)
                .map(|(&r, &a)| (r & a).count_ones() as usize)
                .sum::<usize>();
            let better = match pick {
                None => true,
                Some((u, best)) => deg > best || (deg == best && position[v] < position[u]),
            };
            if better {
                pick = Some((v, deg));
            }
        }
        let Some((v, _)) = pick else {
            return chosen;
        };
        chosen.push(v);
        active[v / 64] &= !(1 << (v % 64));
        for (w, word) in active.iter_mut().enumerate() {
            *word &= g.row(v)[w];
        }
    }
}

fn extend_code(
    code: &ConstantDimensionCode,
    g: &CompatibilityGraph,
    picks: &[usize],
) -> Result<ConstantDimensionCode> {
    let mut words = code.codewords().to_vec();
    words.extend(picks.iter().map(|&i| g.candidates()[i].clone()));
    ConstantDimensionCode::new(code.field(), code.ambient_dim(), code.dim(), words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdc::VerifyMode;
    use crate::gf::Field;
    use crate::mrd::expurgate6;
    use crate::testutil::base77;

    fn f2() -> Field {
        Field::new(2, 1).unwrap()
    }

    fn plane(field: &Field, coords: [usize; 3]) -> Subspace {
        Subspace::unit_span(field, 6, &coords)
    }

    #[test]
    fn triangle_and_edgeless_graphs() {
        let f = f2();
        let a = plane(&f, [0, 1, 2]);
        let b = plane(&f, [3, 4, 5]);
        let c = Subspace::from_rows(
            &f,
            6,
            &[
                vec![1, 0, 0, 1, 0, 0],
                vec![0, 1, 0, 0, 1, 0],
                vec![0, 0, 1, 0, 0, 1],
            ],
        )
        .unwrap();
        let g = CompatibilityGraph::new(vec![a.clone(), b, c], 1);
        assert!(g.adjacent(0, 1) && g.adjacent(1, 2) && g.adjacent(0, 2));
        assert!(!g.adjacent(0, 0));
        let r = exact_max_clique(&g, &[], Duration::from_secs(10)).unwrap();
        assert_eq!(r.clique, vec![0, 1, 2]);
        assert!(r.optimal);

        // three planes through a common 2-space: pairwise incompatible
        let g = CompatibilityGraph::new(
            vec![
                plane(&f, [0, 1, 2]),
                plane(&f, [0, 1, 3]),
                plane(&f, [0, 1, 4]),
            ],
            1,
        );
        let r = exact_max_clique(&g, &[], Duration::from_secs(10)).unwrap();
        assert_eq!(r.clique.len(), 1);
        assert!(r.optimal);
        assert!(matches!(
            exact_max_clique(&g, &[0, 1], Duration::from_secs(10)),
            Err(Error::BadSeed(_))
        ));
    }

    #[test]
    fn candidates_for_a_single_plane_match_line_counting() {
        let f = f2();
        let code = ConstantDimensionCode::new(&f, 6, 3, vec![plane(&f, [0, 1, 2])]).unwrap();
        let cands = candidate_planes(&code).unwrap();
        // planes meeting the fixed plane in >= 2 dimensions: 14 others per
        // line (7 lines) plus the plane itself
        assert_eq!(cands.len(), 1395 - (7 * 14 + 1));
        assert!(cands.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn expurgated_code_candidates_include_the_known_planes() {
        let f = f2();
        let (gc, _) = expurgate6(&f).unwrap();
        let cands = candidate_planes(gc.code()).unwrap();
        let s0 = plane(&f, [3, 4, 5]);
        assert!(cands.binary_search(&s0).is_ok());
        // every removed graph stays compatible with all survivors
        let full = crate::mrd::lift(&crate::mrd::gabidulin(&f, 3, 3, 2).unwrap()).unwrap();
        for w in full.code().codewords() {
            if gc.code().index_of(w).is_none() {
                assert!(cands.binary_search(w).is_ok());
            }
        }
    }

    #[test]
    fn exact_augmentation_recovers_the_full_base_code() {
        let base = base77();
        assert_eq!(base.code.len(), 77);
        let report = base.code.verify(1, VerifyMode::Exhaustive).unwrap();
        assert!(report.ok());
        assert_eq!(report.min_distance, 4);
        // the recovered code is maximal: nothing else fits
        assert!(candidate_planes(&base.code).unwrap().is_empty());
    }

    #[test]
    fn greedy_augmentation_grows_and_is_deterministic() {
        let f = f2();
        let (gc, _) = expurgate6(&f).unwrap();
        let a = greedy_augment(gc.code(), 4, 1).unwrap();
        let b = greedy_augment(gc.code(), 4, 1).unwrap();
        assert_eq!(a.code.to_cdc_string(), b.code.to_cdc_string());
        assert!(a.code.len() >= 56 + 7);
        assert!(!a.optimal);
        for w in gc.code().codewords() {
            assert!(a.code.index_of(w).is_some());
        }
        assert!(a.code.verify(1, VerifyMode::Exhaustive).unwrap().ok());

        // a maximal code is returned unchanged and flagged optimal
        let base = base77();
        let unchanged = greedy_augment(&base.code, 2, 7).unwrap();
        assert_eq!(unchanged.code.len(), 77);
        assert!(unchanged.optimal);
        assert!(unchanged.added.is_empty());
    }

    #[test]
    fn exact_search_is_deterministic() {
        let f = f2();
        let (gc, _) = expurgate6(&f).unwrap();
        let cands = candidate_planes(gc.code()).unwrap();
        let g = CompatibilityGraph::new(cands, 1);
        let a = exact_max_clique(&g, &[], Duration::from_secs(60)).unwrap();
        let b = exact_max_clique(&g, &[], Duration::from_secs(60)).unwrap();
        assert_eq!(a, b);
        assert!(a.optimal);
    }
}
