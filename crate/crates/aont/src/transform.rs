//! General (linear or nonlinear) transforms as explicit bijection tables,
//! verification through the unbiased-array characterization, and the
//! constructive bridges to orthogonal arrays and resilient functions.

use std::sync::Arc;

use thiserror::Error;

use crate::field::Field;
use crate::matrix::{first_combination, next_combination, MatrixGF};

/// Default cap on explicit table sizes (rows).
pub const TABLE_CEILING: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("matrix is singular")]
    Singular,
    #[error("table of {0} rows exceeds the ceiling of {TABLE_CEILING}; roughly {1} MiB")]
    TableTooLarge(u64, u64),
    #[error("strength t={0} out of range for s={1}")]
    StrengthOutOfRange(usize, usize),
    #[error("transform failed the (t={0}) AONT verification")]
    NotAont(usize),
    #[error("suffix length {0} does not match s-t = {1}")]
    BadSuffix(usize, usize),
    #[error("delete_rows must contain s-t = {0} distinct row indices")]
    BadDeleteRows(usize),
    #[error("brute-force bound exceeded: v^s = {0} > 9")]
    BruteForceBound(u64),
    #[error("malformed transform or array file: {0}")]
    Parse(String),
}

/// An explicit bijection on s-tuples over an alphabet of size v. Rows are
/// indexed by the mixed-radix rank of the input tuple, first coordinate
/// most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralTransform {
    v: u16,
    s: usize,
    table: Vec<u16>, // v^s rows of s symbols
}

pub fn tuple_rank(v: u16, tuple: &[u16]) -> usize {
    tuple
        .iter()
        .fold(0usize, |acc, &x| acc * v as usize + x as usize)
}

pub fn tuple_unrank(v: u16, s: usize, mut rank: usize) -> Vec<u16> {
    let mut out = vec![0u16; s];
    for i in (0..s).rev() {
        out[i] = (rank % v as usize) as u16;
        rank /= v as usize;
    }
    out
}

impl GeneralTransform {
    pub fn new(v: u16, s: usize, table: Vec<u16>) -> Result<Self, TransformError> {
        let rows = (v as u64).pow(s as u32);
        if rows > TABLE_CEILING {
            return Err(TransformError::TableTooLarge(rows, (rows * s as u64 * 2) >> 20));
        }
        assert_eq!(table.len(), rows as usize * s);
        let t = GeneralTransform { v, s, table };
        if !t.is_bijection() {
            return Err(TransformError::Parse("table is not a bijection".into()));
        }
        Ok(t)
    }

    pub fn v(&self) -> u16 {
        self.v
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn rows(&self) -> usize {
        (self.v as usize).pow(self.s as u32)
    }

    pub fn output(&self, rank: usize) -> &[u16] {
        &self.table[rank * self.s..(rank + 1) * self.s]
    }

    pub fn apply(&self, x: &[u16]) -> &[u16] {
        self.output(tuple_rank(self.v, x))
    }

    fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.rows()];
        for r in 0..self.rows() {
            let rank = tuple_rank(self.v, self.output(r));
            if seen[rank] {
                return false;
            }
            seen[rank] = true;
        }
        true
    }

    /// Text format: header `v=<v> s=<s>`, then one line
    /// `x1 .. xs -> y1 .. ys` per input tuple in rank order.
    pub fn to_text(&self) -> String {
        let mut out = format!("v={} s={}\n", self.v, self.s);
        for r in 0..self.rows() {
            let x = tuple_unrank(self.v, self.s, r);
            let xs: Vec<String> = x.iter().map(|e| e.to_string()).collect();
            let ys: Vec<String> = self.output(r).iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("{} -> {}\n", xs.join(" "), ys.join(" ")));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TransformError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| TransformError::Parse("empty file".into()))?;
        let mut v = None;
        let mut s = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("v", val)) => v = val.parse().ok(),
                Some(("s", val)) => s = val.parse().ok(),
                _ => return Err(TransformError::Parse(format!("bad header token {tok:?}"))),
            }
        }
        let (v, s): (u16, usize) = match (v, s) {
            (Some(v), Some(s)) => (v, s),
            _ => return Err(TransformError::Parse("incomplete header".into())),
        };
        let rows = (v as usize).pow(s as u32);
        let mut table = vec![0u16; rows * s];
        let mut count = 0;
        for line in lines {
            let (xs, ys) = line
                .split_once("->")
                .ok_or_else(|| TransformError::Parse(format!("missing arrow: {line:?}")))?;
            let parse = |part: &str| -> Result<Vec<u16>, TransformError> {
                let vals: Vec<u16> = part
                    .split_whitespace()
                    .map(|t| t.parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| TransformError::Parse(format!("bad symbol in {line:?}")))?;
                if vals.len() != s || vals.iter().any(|&x| x >= v) {
                    return Err(TransformError::Parse(format!("bad tuple in {line:?}")));
                }
                Ok(vals)
            };
            let x = parse(xs)?;
            let y = parse(ys)?;
            let rank = tuple_rank(v, &x);
            table[rank * s..(rank + 1) * s].copy_from_slice(&y);
            count += 1;
        }
        if count != rows {
            return Err(TransformError::Parse(format!(
                "expected {rows} rows, found {count}"
            )));
        }
        GeneralTransform::new(v, s, table)
    }
}

/// An (N, k, v)-array of symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnbiasedArray {
    pub n_rows: usize,
    pub k: usize,
    pub v: u16,
    pub rows: Vec<u16>, // n_rows * k
}

impl UnbiasedArray {
    pub fn row(&self, r: usize) -> &[u16] {
        &self.rows[r * self.k..(r + 1) * self.k]
    }

    /// Whether the restriction to the column set D contains every |D|-tuple
    /// exactly N / v^|D| times.
    pub fn is_unbiased(&self, d: &[usize]) -> bool {
        let v = self.v as usize;
        let tuples = v.pow(d.len() as u32);
        if self.n_rows % tuples != 0 {
            return false;
        }
        let expected = self.n_rows / tuples;
        let mut counts = vec![0usize; tuples];
        for r in 0..self.n_rows {
            let row = self.row(r);
            let rank = d.iter().fold(0usize, |acc, &c| acc * v + row[c] as usize);
            counts[rank] += 1;
        }
        counts.iter().all(|&c| c == expected)
    }
}

/// An orthogonal array OA_lambda(t, k, v).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    pub array: UnbiasedArray,
    pub t: usize,
    pub lambda: usize,
}

impl OrthogonalArray {
    /// Check unbiasedness with respect to every t-subset of columns.
    pub fn verify(&self) -> bool {
        let k = self.array.k;
        if self.array.n_rows != self.lambda * (self.array.v as usize).pow(self.t as u32) {
            return false;
        }
        let mut cols = first_combination(self.t);
        loop {
            if !self.array.is_unbiased(&cols) {
                return false;
            }
            if !next_combination(&mut cols, k) {
                return true;
            }
        }
    }

    /// Array file format: header `N k v t lambda`, then rows.
    pub fn to_text(&self) -> String {
        let a = &self.array;
        let mut out = format!("{} {} {} {} {}\n", a.n_rows, a.k, a.v, self.t, self.lambda);
        for r in 0..a.n_rows {
            let row: Vec<String> = a.row(r).iter().map(|e| e.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TransformError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| TransformError::Parse("empty file".into()))?
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| TransformError::Parse("bad array header".into()))?;
        let [n, k, v, t, lambda] = header[..] else {
            return Err(TransformError::Parse("array header needs 5 fields".into()));
        };
        let mut rows = Vec::with_capacity(n * k);
        for line in lines {
            for tok in line.split_whitespace() {
                let x: u16 = tok
                    .parse()
                    .map_err(|_| TransformError::Parse(format!("bad symbol {tok:?}")))?;
                rows.push(x);
            }
        }
        if rows.len() != n * k {
            return Err(TransformError::Parse("wrong number of symbols".into()));
        }
        Ok(OrthogonalArray {
            array: UnbiasedArray {
                n_rows: n,
                k,
                v: v as u16,
                rows,
            },
            t,
            lambda,
        })
    }
}

/// Tabulate y = x M^{-1} for every input tuple.
pub fn linear_to_general(m: &MatrixGF) -> Result<GeneralTransform, TransformError> {
    let inv = m.inverse().ok_or(TransformError::Singular)?;
    let v = m.field().order();
    let s = m.dim();
    let rows = (v as u64).pow(s as u32);
    if rows > TABLE_CEILING {
        return Err(TransformError::TableTooLarge(rows, (rows * s as u64 * 2) >> 20));
    }
    let mut table = Vec::with_capacity(rows as usize * s);
    for r in 0..rows as usize {
        let x = tuple_unrank(v, s, r);
        table.extend(inv.vec_mul(&x));
    }
    GeneralTransform::new(v, s, table)
}

/// The (v^s, 2s, v)-array with rows (x, phi(x)).
pub fn transform_array(phi: &GeneralTransform) -> UnbiasedArray {
    let s = phi.s();
    let mut rows = Vec::with_capacity(phi.rows() * 2 * s);
    for r in 0..phi.rows() {
        rows.extend(tuple_unrank(phi.v(), s, r));
        rows.extend_from_slice(phi.output(r));
    }
    UnbiasedArray {
        n_rows: phi.rows(),
        k: 2 * s,
        v: phi.v(),
        rows,
    }
}

/// The column subsets whose unbiasedness characterizes a (t,s,v)-AONT:
/// the inputs, the outputs, and each I + (outputs minus J) with |I| = |J| = t.
fn required_subsets(s: usize, t: usize) -> Vec<Vec<usize>> {
    let mut subsets = vec![(0..s).collect::<Vec<_>>(), (s..2 * s).collect::<Vec<_>>()];
    let mut i_set = first_combination(t);
    loop {
        let mut j_set = first_combination(t);
        loop {
            let mut d: Vec<usize> = i_set.clone();
            d.extend((s..2 * s).filter(|&c| !j_set.contains(&(c - s))));
            subsets.push(d);
            if !next_combination(&mut j_set, s) {
                break;
            }
        }
        if !next_combination(&mut i_set, s) {
            break;
        }
    }
    subsets
}

/// Unbiased-array verification of the AONT property; the witness is the
/// first failing column subset (0-based columns of the 2s-column array).
pub fn verify_general_aont(
    phi: &GeneralTransform,
    t: usize,
) -> Result<(bool, Option<Vec<usize>>), TransformError> {
    if t < 1 || t > phi.s() {
        return Err(TransformError::StrengthOutOfRange(t, phi.s()));
    }
    let array = transform_array(phi);
    for d in required_subsets(phi.s(), t) {
        if !array.is_unbiased(&d) {
            return Ok((false, Some(d)));
        }
    }
    Ok((true, None))
}

/// The OA(t,s,v) formed by the inputs whose outputs end with `suffix`.
pub fn extract_oa(
    phi: &GeneralTransform,
    t: usize,
    suffix: &[u16],
) -> Result<OrthogonalArray, TransformError> {
    let s = phi.s();
    if suffix.len() != s - t {
        return Err(TransformError::BadSuffix(suffix.len(), s - t));
    }
    let (ok, _) = verify_general_aont(phi, t)?;
    if !ok {
        return Err(TransformError::NotAont(t));
    }
    let v = phi.v();
    let mut rows = Vec::new();
    let mut n_rows = 0;
    for r in 0..phi.rows() {
        if phi.output(r)[t..] == *suffix {
            rows.extend(tuple_unrank(v, s, r));
            n_rows += 1;
        }
    }
    Ok(OrthogonalArray {
        array: UnbiasedArray {
            n_rows,
            k: s,
            v,
            rows,
        },
        t,
        lambda: 1,
    })
}

/// One OA per output suffix; the v^(s-t) arrays partition all input tuples.
pub fn aont_to_large_set(
    phi: &GeneralTransform,
    t: usize,
) -> Result<Vec<OrthogonalArray>, TransformError> {
    let s = phi.s();
    let (ok, _) = verify_general_aont(phi, t)?;
    if !ok {
        return Err(TransformError::NotAont(t));
    }
    let v = phi.v();
    let count = (v as usize).pow((s - t) as u32);
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let suffix = tuple_unrank(v, s - t, idx);
        // membership was already verified once; extract directly
        let mut rows = Vec::new();
        let mut n_rows = 0;
        for r in 0..phi.rows() {
            if phi.output(r)[t..] == suffix[..] {
                rows.extend(tuple_unrank(v, s, r));
                n_rows += 1;
            }
        }
        out.push(OrthogonalArray {
            array: UnbiasedArray {
                n_rows,
                k: s,
                v,
                rows,
            },
            t,
            lambda: 1,
        });
    }
    Ok(out)
}

/// A function from n-tuples to m-tuples whose outputs stay uniform when any
/// t inputs are fixed.
#[derive(Debug, Clone)]
pub struct ResilientFunction {
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub v: u16,
    pub body: RfBody,
}

#[derive(Debug, Clone)]
pub enum RfBody {
    /// f(x) = x N^T for an m-by-n generator over GF(v).
    Linear { field: Arc<Field>, gen: Vec<u16> },
    /// Explicit table of v^n output m-tuples in input rank order.
    Table(Vec<u16>),
}

impl ResilientFunction {
    pub fn eval(&self, x: &[u16]) -> Vec<u16> {
        match &self.body {
            RfBody::Linear { field, gen } => (0..self.m)
                .map(|row| {
                    (0..self.n).fold(0u16, |acc, col| {
                        field.add(acc, field.mul(gen[row * self.n + col], x[col]))
                    })
                })
                .collect(),
            RfBody::Table(table) => {
                let rank = tuple_rank(self.v, x);
                table[rank * self.m..(rank + 1) * self.m].to_vec()
            }
        }
    }
}

/// Basis of the right null space of a rows-by-cols matrix over the field.
fn null_space(field: &Arc<Field>, rows: usize, cols: usize, entries: &[u16]) -> Vec<Vec<u16>> {
    let f = field;
    let mut a = entries.to_vec();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if pr != rank {
            for c in 0..cols {
                a.swap(pr * cols + c, rank * cols + c);
            }
        }
        let pinv = f.inv(a[rank * cols + col]);
        for c in 0..cols {
            a[rank * cols + c] = f.mul(a[rank * cols + c], pinv);
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = a[r * cols + col];
            if factor == 0 {
                continue;
            }
            for c in 0..cols {
                let t = f.mul(factor, a[rank * cols + c]);
                a[r * cols + c] = f.sub(a[r * cols + c], t);
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut vect = vec![0u16; cols];
        vect[fc] = 1;
        for (ri, &pc) in pivot_cols.iter().enumerate() {
            vect[pc] = f.neg(a[ri * cols + fc]);
        }
        basis.push(vect);
    }
    basis
}

/// Dual-code resilient function from a linear (t,s,q)-AONT: keep t rows of
/// M, take a generator N of the dual of the code they span, and return
/// x -> x N^T as an (s, s-t, t, q)-resilient function.
pub fn linear_aont_to_rf(
    m: &MatrixGF,
    t: usize,
    delete_rows: Option<Vec<usize>>,
) -> Result<ResilientFunction, TransformError> {
    let s = m.dim();
    let rep = m
        .is_linear_aont(t)
        .map_err(|_| TransformError::StrengthOutOfRange(t, s))?;
    if !rep.valid {
        return Err(TransformError::NotAont(t));
    }
    let deleted = delete_rows.unwrap_or_else(|| (t..s).collect());
    {
        let mut seen = vec![false; s];
        if deleted.len() != s - t || deleted.iter().any(|&r| r >= s || std::mem::replace(&mut seen[r], true)) {
            return Err(TransformError::BadDeleteRows(s - t));
        }
    }
    let kept: Vec<usize> = (0..s).filter(|r| !deleted.contains(r)).collect();
    let entries: Vec<u16> = kept
        .iter()
        .flat_map(|&r| m.row(r).iter().copied())
        .collect();
    let field = m.field().clone();
    let basis = null_space(&field, t, s, &entries);
    debug_assert_eq!(basis.len(), s - t);
    let gen: Vec<u16> = basis.into_iter().flatten().collect();
    Ok(ResilientFunction {
        n: s,
        m: s - t,
        t,
        v: field.order(),
        body: RfBody::Linear { field, gen },
    })
}

/// Exhaustive resilience check: under every fixing of t inputs, every
/// output m-tuple occurs equally often over the free inputs.
pub fn verify_resilient(rf: &ResilientFunction) -> Result<bool, TransformError> {
    let v = rf.v as usize;
    let total = (v as u64).pow(rf.n as u32);
    if total > TABLE_CEILING {
        return Err(TransformError::TableTooLarge(total, (total * rf.n as u64 * 2) >> 20));
    }
    if rf.n < rf.t + rf.m {
        return Ok(false);
    }
    let out_tuples = v.pow(rf.m as u32);
    let expected = v.pow((rf.n - rf.t - rf.m) as u32);
    let mut positions = first_combination(rf.t);
    if rf.t == 0 {
        // single empty fixing
        let mut counts = vec![0usize; out_tuples];
        for r in 0..total as usize {
            let x = tuple_unrank(rf.v, rf.n, r);
            counts[tuple_rank(rf.v, &rf.eval(&x))] += 1;
        }
        return Ok(counts.iter().all(|&c| c == expected * v.pow(rf.t as u32)));
    }
    loop {
        for fix_rank in 0..v.pow(rf.t as u32) {
            let fixed = tuple_unrank(rf.v, rf.t, fix_rank);
            let free: Vec<usize> = (0..rf.n).filter(|p| !positions.contains(p)).collect();
            let mut counts = vec![0usize; out_tuples];
            for free_rank in 0..v.pow(free.len() as u32) {
                let free_vals = tuple_unrank(rf.v, free.len(), free_rank);
                let mut x = vec![0u16; rf.n];
                for (i, &p) in positions.iter().enumerate() {
                    x[p] = fixed[i];
                }
                for (i, &p) in free.iter().enumerate() {
                    x[p] = free_vals[i];
                }
                counts[tuple_rank(rf.v, &rf.eval(&x))] += 1;
            }
            if counts.iter().any(|&c| c != expected) {
                return Ok(false);
            }
        }
        if !next_combination(&mut positions, rf.n) {
            break;
        }
    }
    Ok(true)
}

/// Brute-force existence / enumeration of general (t,s,v)-AONT over all
/// bijections of the v^s input tuples. `find_all` enumerates raw bijections
/// so counts are unambiguous; existence mode fixes the image of the zero
/// tuple, which is sound up to per-coordinate output relabeling.
pub fn brute_force_general_search(
    v: u16,
    s: usize,
    t: usize,
    find_all: bool,
) -> Result<Vec<GeneralTransform>, TransformError> {
    let rows = (v as u64).pow(s as u32);
    if rows > 9 {
        return Err(TransformError::BruteForceBound(rows));
    }
    let rows = rows as usize;
    let mut found = Vec::new();
    let mut perm: Vec<usize> = (0..rows).collect();
    let fix_first = !find_all;
    loop {
        let skip = fix_first && perm[0] != 0;
        if !skip {
            let mut table = Vec::with_capacity(rows * s);
            for r in 0..rows {
                table.extend(tuple_unrank(v, s, perm[r]));
            }
            let phi = GeneralTransform { v, s, table };
            if verify_general_aont(&phi, t)?.0 {
                found.push(phi);
                if !find_all {
                    return Ok(found);
                }
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(found)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Parameter admissibility from the column bound on index-1 orthogonal
/// arrays: false means no (t,s,v)-AONT can exist.
pub fn bush_admissible(t: usize, s: usize, v: usize) -> bool {
    assert!(t >= 1 && s >= t && v >= 2);
    let mut bound = usize::MAX;
    if t == 2 || (v % 2 == 0 && (3..=v).contains(&t)) {
        bound = bound.min(v + t - 1);
    }
    if v % 2 == 1 && (3..=v).contains(&t) {
        bound = bound.min(v + t - 2);
    }
    if t >= v {
        bound = bound.min(t + 1);
    }
    s <= bound
}
