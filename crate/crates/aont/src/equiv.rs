//! Generating the reduced matrices equivalent to a given reduced
//! (2,q,q)-AONT, and partitioning search output into equivalence classes.
//!
//! For every ordered pair of distinct rows the generator swaps the pair
//! into the leading positions (rows and columns together, so the zero
//! diagonal survives), rescales the first row and column to ones, and
//! re-sorts the row-2 suffix. The same five steps run again on the
//! transpose, giving at most 2q^2 - 2q matrices with duplicates removed.
//!
//! A third generator scales every interior entry (rows and columns 2..q)
//! by a nonzero constant k. This is a plain row/column scaling in
//! disguise: multiply rows 2..q by k, then rescale column 1 by 1/k to
//! restore the ones. Pair normalization never reaches these matrices
//! because it always leaves some row or column unscaled, so without this
//! generator the closure splits genuine equivalence classes.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::matrix::{MatrixError, MatrixGF};

#[derive(Debug, Error)]
pub enum EquivError {
    #[error("matrix is not reduced")]
    NotReduced,
    #[error("matrices belong to different fields")]
    FieldMismatch,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone)]
pub struct EquivalenceClass {
    /// Lexicographically least member.
    pub representative: MatrixGF,
    pub members: Vec<MatrixGF>,
}

#[derive(Debug)]
pub struct ClassifyOutcome {
    pub classes: Vec<EquivalenceClass>,
    /// Whether any closure needed more than one generation pass; recorded
    /// because single-pass closure is not a proven property.
    pub needed_extra_passes: bool,
}

fn normalize_pair(m: &MatrixGF, r1: usize, r2: usize) -> MatrixGF {
    let f = m.field().clone();
    let s = m.dim();
    let mut g: Vec<Vec<u16>> = (0..s).map(|r| m.row(r).to_vec()).collect();
    // identical row and column swaps keep the zeros on the diagonal
    g.swap(0, r1);
    g.swap(1, r2);
    for row in g.iter_mut() {
        row.swap(0, r1);
        row.swap(1, r2);
    }
    // columns 2..q: put (0 1 ... 1) in the first row
    for c in 1..s {
        let v = g[0][c];
        debug_assert_ne!(v, 0);
        let by = f.inv(v);
        if by != 1 {
            for row in g.iter_mut() {
                row[c] = f.mul(row[c], by);
            }
        }
    }
    // rows 2..q: put (0 1 ... 1)^T in the first column
    for r in 1..s {
        let v = g[r][0];
        debug_assert_ne!(v, 0);
        let by = f.inv(v);
        if by != 1 {
            for c in 0..s {
                g[r][c] = f.mul(g[r][c], by);
            }
        }
    }
    let entries: Vec<u16> = g.into_iter().flatten().collect();
    let standard = MatrixGF::new(f, s, entries);
    standard
        .to_reduced()
        .expect("pair normalization yields a type-q standard form")
}

/// Scale the interior block (rows and columns 2..q) by a nonzero k and
/// re-sort. Equivalent to scaling rows 2..q by k and column 1 by 1/k.
fn interior_scaled(m: &MatrixGF, k: u16) -> MatrixGF {
    let f = m.field().clone();
    let s = m.dim();
    let entries: Vec<u16> = (0..s)
        .flat_map(|r| {
            let f = f.clone();
            (0..s).map(move |c| {
                let v = m.get(r, c);
                if r >= 1 && c >= 1 {
                    f.mul(v, k)
                } else {
                    v
                }
            })
        })
        .collect();
    MatrixGF::new(f, s, entries)
        .to_reduced()
        .expect("interior scaling preserves the type-q standard form")
}

/// All reduced matrices equivalent to `m` producible by one pass of the
/// generators: pair normalization on `m` and its transpose, plus the
/// interior scalings.
pub fn equivalent_reduced_set(m: &MatrixGF) -> Result<Vec<MatrixGF>, EquivError> {
    if !m.is_reduced() {
        return Err(EquivError::NotReduced);
    }
    let s = m.dim();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for source in [m.clone(), m.transpose()] {
        for r1 in 0..s {
            for r2 in 0..s {
                if r1 == r2 {
                    continue;
                }
                let candidate = normalize_pair(&source, r1, r2);
                debug_assert!(candidate.is_reduced());
                if seen.insert(candidate.entries().to_vec()) {
                    out.push(candidate);
                }
            }
        }
    }
    for code in 2..m.field().order() {
        let candidate = interior_scaled(m, code);
        debug_assert!(candidate.is_reduced());
        if seen.insert(candidate.entries().to_vec()) {
            out.push(candidate);
        }
    }
    out.sort_by(|a, b| a.entries().cmp(b.entries()));
    Ok(out)
}

/// Full equivalence closure of `m`: one-pass sets re-expanded until a fixed
/// point. The boolean reports whether anything past the first pass was new.
pub fn closure(m: &MatrixGF) -> Result<(Vec<MatrixGF>, bool), EquivError> {
    let mut members: BTreeMap<Vec<u16>, MatrixGF> = BTreeMap::new();
    let mut frontier = vec![m.clone()];
    members.insert(m.entries().to_vec(), m.clone());
    let mut passes = 0;
    let mut extra = false;
    while !frontier.is_empty() {
        passes += 1;
        let mut next = Vec::new();
        for cur in frontier.drain(..) {
            for cand in equivalent_reduced_set(&cur)? {
                if !members.contains_key(cand.entries()) {
                    if passes > 1 {
                        extra = true;
                    }
                    members.insert(cand.entries().to_vec(), cand.clone());
                    next.push(cand);
                }
            }
        }
        frontier = next;
    }
    Ok((members.into_values().collect(), extra))
}

pub fn are_equivalent(a: &MatrixGF, b: &MatrixGF) -> Result<bool, EquivError> {
    if !a.same_field(b) {
        return Err(EquivError::FieldMismatch);
    }
    if !b.is_reduced() {
        return Err(EquivError::NotReduced);
    }
    let (set, _) = closure(a)?;
    Ok(set.iter().any(|m| m == b))
}

/// Partition reduced matrices into equivalence classes. Classes are ordered
/// by representative; members are the full closures, sorted.
pub fn classify(matrices: &[MatrixGF]) -> Result<ClassifyOutcome, EquivError> {
    if let Some(first) = matrices.first() {
        if !matrices.iter().all(|m| m.same_field(first)) {
            return Err(EquivError::FieldMismatch);
        }
    }
    let mut assigned: BTreeSet<Vec<u16>> = BTreeSet::new();
    let mut classes = Vec::new();
    let mut extra_any = false;
    for m in matrices {
        if assigned.contains(m.entries()) {
            continue;
        }
        let (members, extra) = closure(m)?;
        extra_any |= extra;
        for mem in &members {
            assigned.insert(mem.entries().to_vec());
        }
        let representative = members
            .iter()
            .min_by(|a, b| a.entries().cmp(b.entries()))
            .expect("closure contains its seed")
            .clone();
        classes.push(EquivalenceClass {
            representative,
            members,
        });
    }
    classes.sort_by(|a, b| a.representative.entries().cmp(b.representative.entries()));
    Ok(ClassifyOutcome {
        classes,
        needed_extra_passes: extra_any,
    })
}
