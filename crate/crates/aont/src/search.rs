//! Exhaustive, pruned backtracking searches for linear AONT in canonical
//! forms: reduced (type-q) matrices, type-(q-1) standard forms, symmetric
//! reduced matrices, and general standard-form searches for s != q.
//!
//! The search fills the free cells row by row. For a candidate value at
//! cell (r, c), every 2-by-2 determinant against an already-filled row and
//! column forbids exactly one value, so the admissible set is computed as a
//! bitmask before any branching. Completed candidates still get a full
//! independent verification before being accepted: the cell constraints do
//! not imply invertibility of the whole matrix (q = 8, 9 end up empty only
//! because of that final check).

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Field;
use crate::matrix::MatrixGF;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("field order {0} exceeds the search engine limit of 64")]
    FieldTooLarge(u16),
    #[error("strength t={0} is not supported by the standard-form search (only t = 1, 2)")]
    UnsupportedStrength(usize),
    #[error("strength t={0} out of range for s={1}")]
    StrengthOutOfRange(usize, usize),
    #[error("estimated search space of {estimate:e} nodes exceeds the ceiling {ceiling:e}")]
    NodeCeilingExceeded { estimate: f64, ceiling: f64 },
    #[error("element order must be a permutation of the {0} element codes")]
    BadOrder(u16),
}

/// Default refusal threshold for the unbounded general search.
pub const DEFAULT_NODE_CEILING: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchMode {
    /// All reduced (2,q,q)-AONT (type-q standard form, row-2 suffix sorted).
    Reduced,
    /// Type-(q-1) standard forms with the analogous row-2 canonicalization.
    TypeQMinus1,
    /// Reduced matrices with M equal to its transpose.
    SymmetricReduced,
    /// Standard-form (t,s,q)-AONT for given s; t must be 1 or 2.
    GeneralLinear { s: usize, t: usize },
}

#[derive(Debug, Clone)]
pub struct SearchSpec {
    pub field: Arc<Field>,
    pub mode: SearchMode,
    pub limit: Option<usize>,
    pub node_ceiling: f64,
    /// Rank of each element code under the canonical linear order;
    /// `None` means the integer-code order.
    pub order: Option<Vec<usize>>,
}

impl SearchSpec {
    pub fn new(field: Arc<Field>, mode: SearchMode) -> Self {
        SearchSpec {
            field,
            mode,
            limit: None,
            node_ceiling: DEFAULT_NODE_CEILING,
            order: None,
        }
    }
}

#[derive(Debug)]
pub struct SearchResult {
    pub matrices: Vec<MatrixGF>,
    pub count: usize,
    pub nodes_visited: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SearchSummary {
    pub mode: String,
    pub field: String,
    pub count: usize,
    pub nodes_visited: u64,
    pub elapsed_ms: u128,
    pub shards: usize,
}

#[derive(Clone, Copy, Debug)]
enum CellKind {
    Free { increasing: bool },
    Mirror { r: usize, c: usize },
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    r: usize,
    c: usize,
    kind: CellKind,
}

/// A partially fixed s-by-s grid plus the fill order of its free cells.
#[derive(Clone, Debug)]
struct Template {
    s: usize,
    base: Vec<u16>,
    cells: Vec<Cell>,
    final_t: usize,
}

fn reduced_template(q: usize, symmetric: bool) -> Template {
    let s = q;
    let mut base = vec![0u16; s * s];
    for i in 1..s {
        base[i] = 1;
        base[i * s] = 1;
    }
    let mut cells = Vec::new();
    for c in 2..s {
        cells.push(Cell {
            r: 1,
            c,
            kind: CellKind::Free { increasing: c > 2 },
        });
    }
    for r in 2..s {
        for c in 1..s {
            if c == r {
                continue;
            }
            let kind = if symmetric && c < r {
                CellKind::Mirror { r: c, c: r }
            } else {
                CellKind::Free { increasing: false }
            };
            cells.push(Cell { r, c, kind });
        }
    }
    Template {
        s,
        base,
        cells,
        final_t: 2,
    }
}

fn type_q_minus_1_template(q: usize) -> Template {
    let s = q;
    let mut base = vec![0u16; s * s];
    for i in 1..s {
        base[i] = 1;
        base[i * s] = 1;
    }
    let mut cells = Vec::new();
    // the column holding chi is pinned, so the sort convention covers
    // columns 3..q-1 only
    for c in 2..s {
        cells.push(Cell {
            r: 1,
            c,
            kind: CellKind::Free {
                increasing: c > 2 && c < s - 1,
            },
        });
    }
    for r in 2..s {
        for c in 1..s {
            if c == r && r < s - 1 {
                continue; // fixed diagonal zero
            }
            cells.push(Cell {
                r,
                c,
                kind: CellKind::Free { increasing: false },
            });
        }
    }
    Template {
        s,
        base,
        cells,
        final_t: 2,
    }
}

/// Type-mu standard form template for the general (2,s,q) search.
fn general_t2_template(s: usize, mu: usize) -> Template {
    let mut base = vec![1u16; s * s];
    for d in 0..mu {
        base[d * s + d] = 0;
    }
    let mut cells = Vec::new();
    for r in 1..s {
        for c in 1..s {
            if r == c && r < mu {
                continue;
            }
            cells.push(Cell {
                r,
                c,
                kind: CellKind::Free { increasing: false },
            });
        }
    }
    Template {
        s,
        base,
        cells,
        final_t: 2,
    }
}

/// t = 1 search: no zeros anywhere, first row and column scaled to ones.
fn general_t1_template(s: usize) -> Template {
    let base = vec![1u16; s * s];
    let mut cells = Vec::new();
    for r in 1..s {
        for c in 1..s {
            cells.push(Cell {
                r,
                c,
                kind: CellKind::Free { increasing: false },
            });
        }
    }
    Template {
        s,
        base,
        cells,
        final_t: 1,
    }
}

fn templates_for(spec: &SearchSpec) -> Result<Vec<Template>, SearchError> {
    let q = spec.field.order() as usize;
    match &spec.mode {
        SearchMode::Reduced => Ok(vec![reduced_template(q, false)]),
        SearchMode::SymmetricReduced => Ok(vec![reduced_template(q, true)]),
        SearchMode::TypeQMinus1 => Ok(vec![type_q_minus_1_template(q)]),
        SearchMode::GeneralLinear { s, t } => {
            if *t < 1 || *t > *s {
                return Err(SearchError::StrengthOutOfRange(*t, *s));
            }
            match *t {
                1 => Ok(vec![general_t1_template(*s)]),
                2 => Ok((0..=*s).map(|mu| general_t2_template(*s, mu)).collect()),
                t => Err(SearchError::UnsupportedStrength(t)),
            }
        }
    }
}

/// Pessimistic node estimate: (q-1)^(free cells), summed over templates.
fn estimate_nodes(templates: &[Template], q: usize) -> f64 {
    templates
        .iter()
        .map(|t| ((q - 1) as f64).powi(t.cells.len() as i32))
        .sum()
}

struct Runner<'a> {
    field: &'a Field,
    template: &'a Template,
    rank: &'a [usize],
    by_rank_nonzero: &'a [u16],
    grid: Vec<u16>,
    prefix: &'a [u16],
    limit: Option<usize>,
    nodes: u64,
    results: Vec<MatrixGF>,
    field_arc: Arc<Field>,
    stop_depth: Option<usize>,
    prefixes_out: Vec<Vec<u16>>,
}

impl<'a> Runner<'a> {
    /// Bitmask of values ruled out at cell (r, c): zero, plus one value per
    /// 2-by-2 determinant against an earlier row and column. Returns None
    /// when the cell admits no value regardless of choice.
    fn forbidden(&self, r: usize, c: usize) -> Option<u64> {
        let s = self.template.s;
        let f = self.field;
        let mut mask = 1u64; // zero is never admissible in a free cell
        for rp in 0..r {
            let row = &self.grid[rp * s..rp * s + c + 1];
            let b = row[c];
            for cp in 0..c {
                let a = row[cp];
                let d = self.grid[r * s + cp];
                if a != 0 {
                    mask |= 1 << f.mul(f.mul(b, d), f.inv(a));
                } else if b == 0 || d == 0 {
                    return None;
                }
            }
        }
        Some(mask)
    }

    fn fill(&mut self, idx: usize) -> bool {
        if Some(idx) == self.stop_depth {
            self.prefixes_out.push(
                self.template.cells[..idx]
                    .iter()
                    .map(|cell| self.grid[cell.r * self.template.s + cell.c])
                    .collect(),
            );
            return true;
        }
        if idx == self.template.cells.len() {
            return self.complete();
        }
        let cell = self.template.cells[idx];
        let s = self.template.s;
        let pos = cell.r * s + cell.c;
        match cell.kind {
            CellKind::Mirror { r, c } => {
                let v = self.grid[r * s + c];
                let Some(mask) = self.forbidden(cell.r, cell.c) else {
                    return true;
                };
                if mask >> v & 1 == 0 {
                    self.nodes += 1;
                    self.grid[pos] = v;
                    if !self.fill(idx + 1) {
                        return false;
                    }
                    self.grid[pos] = 0;
                }
                true
            }
            CellKind::Free { increasing } => {
                let Some(mask) = self.forbidden(cell.r, cell.c) else {
                    return true;
                };
                let min_rank = if increasing {
                    self.rank[self.grid[pos - 1] as usize] + 1
                } else {
                    0
                };
                let forced = (idx < self.prefix.len()).then(|| self.prefix[idx]);
                for bi in 0..self.by_rank_nonzero.len() {
                    let v = self.by_rank_nonzero[bi];
                    if self.rank[v as usize] < min_rank {
                        continue;
                    }
                    if mask >> v & 1 != 0 {
                        continue;
                    }
                    if forced.is_some_and(|fv| fv != v) {
                        continue;
                    }
                    self.nodes += 1;
                    self.grid[pos] = v;
                    if !self.fill(idx + 1) {
                        return false;
                    }
                    self.grid[pos] = 0;
                }
                true
            }
        }
    }

    fn complete(&mut self) -> bool {
        let m = MatrixGF::new(self.field_arc.clone(), self.template.s, self.grid.clone());
        // the cell constraints only cover 2-by-2 determinants; re-verify the
        // candidate through the generic checker
        if m
            .is_linear_aont(self.template.final_t)
            .map_or(false, |rep| rep.valid)
        {
            self.results.push(m);
            if self.limit.is_some_and(|l| self.results.len() >= l) {
                return false;
            }
        }
        true
    }
}

fn element_order(spec: &SearchSpec) -> Result<(Vec<usize>, Vec<u16>), SearchError> {
    let q = spec.field.order();
    let rank: Vec<usize> = match &spec.order {
        None => (0..q as usize).collect(),
        Some(r) => {
            let mut seen = vec![false; q as usize];
            if r.len() != q as usize {
                return Err(SearchError::BadOrder(q));
            }
            for &x in r {
                if x >= q as usize || seen[x] {
                    return Err(SearchError::BadOrder(q));
                }
                seen[x] = true;
            }
            r.clone()
        }
    };
    // nonzero codes sorted by rank
    let mut nonzero: Vec<u16> = (1..q).collect();
    nonzero.sort_by_key(|&v| rank[v as usize]);
    Ok((rank, nonzero))
}

fn run_template(
    spec: &SearchSpec,
    template: &Template,
    prefix: &[u16],
    stop_depth: Option<usize>,
    remaining_limit: Option<usize>,
) -> Result<(Vec<MatrixGF>, u64, Vec<Vec<u16>>), SearchError> {
    let q = spec.field.order();
    if q > 64 {
        return Err(SearchError::FieldTooLarge(q));
    }
    let (rank, by_rank_nonzero) = element_order(spec)?;
    let mut runner = Runner {
        field: &spec.field,
        template,
        rank: &rank,
        by_rank_nonzero: &by_rank_nonzero,
        grid: template.base.clone(),
        prefix,
        limit: remaining_limit,
        nodes: 0,
        results: Vec::new(),
        field_arc: spec.field.clone(),
        stop_depth,
        prefixes_out: Vec::new(),
    };
    runner.fill(0);
    Ok((runner.results, runner.nodes, runner.prefixes_out))
}

fn sort_results(spec: &SearchSpec, matrices: &mut Vec<MatrixGF>) {
    let rank: Vec<usize> = match &spec.order {
        None => (0..spec.field.order() as usize).collect(),
        Some(r) => r.clone(),
    };
    matrices.sort_by(|a, b| {
        let ka = a.entries().iter().map(|&e| rank[e as usize]);
        let kb = b.entries().iter().map(|&e| rank[e as usize]);
        ka.cmp(kb)
    });
    matrices.dedup();
}

/// Run a search to completion on the current thread.
pub fn run_search(spec: &SearchSpec) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let templates = templates_for(spec)?;
    if let SearchMode::GeneralLinear { .. } = spec.mode {
        let estimate = estimate_nodes(&templates, spec.field.order() as usize);
        if estimate > spec.node_ceiling {
            return Err(SearchError::NodeCeilingExceeded {
                estimate,
                ceiling: spec.node_ceiling,
            });
        }
    }
    let mut matrices = Vec::new();
    let mut nodes = 0;
    for template in &templates {
        let remaining = spec.limit.map(|l| l.saturating_sub(matrices.len()));
        if remaining == Some(0) {
            break;
        }
        let (mut found, n, _) = run_template(spec, template, &[], None, remaining)?;
        matrices.append(&mut found);
        nodes += n;
    }
    sort_results(spec, &mut matrices);
    Ok(SearchResult {
        count: matrices.len(),
        matrices,
        nodes_visited: nodes,
        elapsed: start.elapsed(),
    })
}

/// One independent unit of a sharded search: a set of fixed cell prefixes
/// per template.
#[derive(Debug, Clone)]
pub struct SearchShard {
    pub spec: SearchSpec,
    /// (template index, values of the leading cells)
    pub branches: Vec<(usize, Vec<u16>)>,
}

/// Split the search tree into `shards` disjoint subtree groups whose result
/// multiset union equals the unsharded result. The split fixes the leading
/// free cells (the row-2 suffix, then the first cells of row 3) deep enough
/// to produce at least `shards` branches, then deals branches round-robin.
pub fn partition_search(spec: &SearchSpec, shards: usize) -> Result<Vec<SearchShard>, SearchError> {
    assert!(shards >= 1);
    let templates = templates_for(spec)?;
    let mut branches: Vec<(usize, Vec<u16>)> = Vec::new();
    for depth in 1.. {
        branches.clear();
        let mut deepest = 0;
        for (ti, template) in templates.iter().enumerate() {
            let d = depth.min(template.cells.len());
            deepest = deepest.max(template.cells.len());
            if d == 0 {
                branches.push((ti, Vec::new()));
                continue;
            }
            let (_, _, prefixes) = run_template(spec, template, &[], Some(d), None)?;
            branches.extend(prefixes.into_iter().map(|p| (ti, p)));
        }
        if branches.len() >= shards || depth >= deepest {
            break;
        }
    }
    let mut out: Vec<SearchShard> = (0..shards)
        .map(|_| SearchShard {
            spec: spec.clone(),
            branches: Vec::new(),
        })
        .collect();
    for (i, b) in branches.into_iter().enumerate() {
        out[i % shards].branches.push(b);
    }
    Ok(out)
}

/// Run one shard to completion.
pub fn run_shard(shard: &SearchShard) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let templates = templates_for(&shard.spec)?;
    let mut matrices = Vec::new();
    let mut nodes = 0;
    for (ti, prefix) in &shard.branches {
        let (mut found, n, _) = run_template(&shard.spec, &templates[*ti], prefix, None, None)?;
        matrices.append(&mut found);
        nodes += n;
    }
    sort_results(&shard.spec, &mut matrices);
    Ok(SearchResult {
        count: matrices.len(),
        matrices,
        nodes_visited: nodes,
        elapsed: start.elapsed(),
    })
}

fn merge_results(spec: &SearchSpec, parts: Vec<SearchResult>, start: Instant) -> SearchResult {
    let mut matrices = Vec::new();
    let mut nodes = 0;
    for mut p in parts {
        matrices.append(&mut p.matrices);
        nodes += p.nodes_visited;
    }
    sort_results(spec, &mut matrices);
    if let Some(l) = spec.limit {
        matrices.truncate(l);
    }
    SearchResult {
        count: matrices.len(),
        matrices,
        nodes_visited: nodes,
        elapsed: start.elapsed(),
    }
}

/// Sharded search on the current thread; results and counts are identical
/// to `run_search` apart from limit handling (shards ignore the limit and
/// it is applied after the merge).
pub fn run_sharded_sequential(spec: &SearchSpec, shards: usize) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let parts = partition_search(spec, shards)?
        .iter()
        .map(run_shard)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(merge_results(spec, parts, start))
}

/// Sharded search over a rayon worker pool. Scheduling cannot affect the
/// outcome: shards are disjoint and the merge re-sorts deterministically.
#[cfg(feature = "parallel")]
pub fn run_sharded_parallel(spec: &SearchSpec, shards: usize) -> Result<SearchResult, SearchError> {
    use rayon::prelude::*;
    let start = Instant::now();
    let parts = partition_search(spec, shards)?
        .par_iter()
        .map(run_shard)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(merge_results(spec, parts, start))
}

/// Sharded search using however many worker threads the build provides.
pub fn run_sharded(spec: &SearchSpec, shards: usize) -> Result<SearchResult, SearchError> {
    #[cfg(feature = "parallel")]
    {
        run_sharded_parallel(spec, shards)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sharded_sequential(spec, shards)
    }
}

pub fn search_reduced(field: &Arc<Field>) -> SearchResult {
    run_search(&SearchSpec::new(field.clone(), SearchMode::Reduced)).expect("reduced search")
}

pub fn search_type_q_minus_1(field: &Arc<Field>) -> SearchResult {
    run_search(&SearchSpec::new(field.clone(), SearchMode::TypeQMinus1))
        .expect("type q-1 search")
}

pub fn search_symmetric_reduced(field: &Arc<Field>) -> SearchResult {
    run_search(&SearchSpec::new(field.clone(), SearchMode::SymmetricReduced))
        .expect("symmetric search")
}

pub fn search_linear(field: &Arc<Field>, s: usize, t: usize) -> Result<SearchResult, SearchError> {
    run_search(&SearchSpec::new(
        field.clone(),
        SearchMode::GeneralLinear { s, t },
    ))
}
