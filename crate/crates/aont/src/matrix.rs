//! Square matrices over GF(q), the t-by-t submatrix invertibility criterion,
//! standard/reduced form normalization and structural detectors.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError};

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("strength t={0} out of range for dimension s={1}")]
    StrengthOutOfRange(usize, usize),
    #[error("row or column {0} contains two zeros; normalization undefined")]
    DoubleZero(usize),
    #[error("matrix is not in type-q standard form")]
    NotTypeQStandardForm,
    #[error("matrix is not reduced")]
    NotReduced,
    #[error("scaling by zero is not an equivalence operation")]
    ZeroScalar,
    #[error("invalid permutation")]
    BadPermutation,
    #[error("matrices belong to different fields")]
    FieldMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("malformed matrix file: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An s-by-s matrix over a finite field, entries row-major as element codes.
#[derive(Clone)]
pub struct MatrixGF {
    field: Arc<Field>,
    s: usize,
    entries: Vec<u16>,
}

impl PartialEq for MatrixGF {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.s == other.s && self.entries == other.entries
    }
}
impl Eq for MatrixGF {}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixGF(q={}, s={})", self.field.order(), self.s)?;
        for r in 0..self.s {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Outcome of a linear AONT verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub valid: bool,
    pub t: usize,
    pub s: usize,
    pub q: u16,
    /// First failing submatrix in lexicographic (row-set, col-set) order,
    /// 0-based; `None` together with `singular` when the whole matrix fails.
    pub witness: Option<Witness>,
    pub mu: Option<usize>,
    pub tau: Option<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Singular,
    Submatrix { rows: Vec<usize>, cols: Vec<usize> },
}

/// JSON shape of a report; indices are 1-based to match human conventions.
#[derive(Debug, Serialize, Deserialize)]
pub struct VerifyReportJson {
    pub valid: bool,
    pub t: usize,
    pub s: usize,
    pub q: u16,
    pub witness_kind: Option<String>,
    pub witness_rows: Option<Vec<usize>>,
    pub witness_cols: Option<Vec<usize>>,
    pub mu: Option<usize>,
    pub tau: Option<u16>,
}

impl VerifyReport {
    pub fn to_json(&self) -> VerifyReportJson {
        let (kind, rows, cols) = match &self.witness {
            None => (None, None, None),
            Some(Witness::Singular) => (Some("matrix singular".to_string()), None, None),
            Some(Witness::Submatrix { rows, cols }) => (
                Some("submatrix".to_string()),
                Some(rows.iter().map(|r| r + 1).collect()),
                Some(cols.iter().map(|c| c + 1).collect()),
            ),
        };
        VerifyReportJson {
            valid: self.valid,
            t: self.t,
            s: self.s,
            q: self.q,
            witness_kind: kind,
            witness_rows: rows,
            witness_cols: cols,
            mu: self.mu,
            tau: self.tau,
        }
    }
}

/// Record of the operations applied by standard-form normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardFormInfo {
    pub mu: usize,
    /// Bottom-right entry when s equals the field order.
    pub chi: Option<u16>,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub row_scales: Vec<u16>,
    pub col_scales: Vec<u16>,
}

/// An elementary equivalence operation on linear AONT matrices.
#[derive(Debug, Clone)]
pub enum MatrixOp {
    /// `perm[i]` is the source row of destination row i.
    PermuteRows(Vec<usize>),
    PermuteCols(Vec<usize>),
    ScaleRow { index: usize, by: u16 },
    ScaleCol { index: usize, by: u16 },
    Transpose,
}

impl MatrixGF {
    pub fn new(field: Arc<Field>, s: usize, entries: Vec<u16>) -> Self {
        assert!(s >= 1 && entries.len() == s * s);
        assert!(entries.iter().all(|&e| e < field.order()));
        MatrixGF { field, s, entries }
    }

    pub fn from_rows(field: Arc<Field>, rows: &[&[u16]]) -> Self {
        let s = rows.len();
        let entries = rows.iter().flat_map(|r| r.iter().copied()).collect();
        MatrixGF::new(field, s, entries)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.s
    }
    pub fn entries(&self) -> &[u16] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u16 {
        self.entries[r * self.s + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: u16) {
        self.entries[r * self.s + c] = v;
    }
    pub fn row(&self, r: usize) -> &[u16] {
        &self.entries[r * self.s..(r + 1) * self.s]
    }

    pub fn same_field(&self, other: &MatrixGF) -> bool {
        self.field == other.field
    }

    /// Exact determinant by Gaussian elimination over the field.
    pub fn det(&self) -> u16 {
        let f = &self.field;
        let s = self.s;
        let mut a = self.entries.clone();
        let mut det = 1u16;
        for col in 0..s {
            let pivot = (col..s).find(|&r| a[r * s + col] != 0);
            let Some(pr) = pivot else { return 0 };
            if pr != col {
                for c in 0..s {
                    a.swap(pr * s + c, col * s + c);
                }
                det = f.neg(det);
            }
            let pv = a[col * s + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv);
            for r in col + 1..s {
                let factor = f.mul(a[r * s + col], pinv);
                if factor == 0 {
                    continue;
                }
                for c in col..s {
                    let sub = f.mul(factor, a[col * s + c]);
                    a[r * s + c] = f.sub(a[r * s + c], sub);
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.det() != 0
    }

    /// Inverse by Gauss-Jordan elimination, or None when singular.
    pub fn inverse(&self) -> Option<MatrixGF> {
        let f = &self.field;
        let s = self.s;
        let mut a = self.entries.clone();
        let mut inv: Vec<u16> = (0..s * s)
            .map(|i| if i / s == i % s { 1 } else { 0 })
            .collect();
        for col in 0..s {
            let pr = (col..s).find(|&r| a[r * s + col] != 0)?;
            if pr != col {
                for c in 0..s {
                    a.swap(pr * s + c, col * s + c);
                    inv.swap(pr * s + c, col * s + c);
                }
            }
            let pinv = f.inv(a[col * s + col]);
            for c in 0..s {
                a[col * s + c] = f.mul(a[col * s + c], pinv);
                inv[col * s + c] = f.mul(inv[col * s + c], pinv);
            }
            for r in 0..s {
                if r == col {
                    continue;
                }
                let factor = a[r * s + col];
                if factor == 0 {
                    continue;
                }
                for c in 0..s {
                    let t1 = f.mul(factor, a[col * s + c]);
                    a[r * s + c] = f.sub(a[r * s + c], t1);
                    let t2 = f.mul(factor, inv[col * s + c]);
                    inv[r * s + c] = f.sub(inv[r * s + c], t2);
                }
            }
        }
        Some(MatrixGF::new(self.field.clone(), s, inv))
    }

    /// Row-vector by matrix product over the field.
    pub fn vec_mul(&self, x: &[u16]) -> Vec<u16> {
        let f = &self.field;
        let s = self.s;
        (0..s)
            .map(|c| {
                (0..s).fold(0, |acc, r| acc_add(f, acc, x[r], self.get(r, c)))
            })
            .collect()
    }

    /// Determinant of the submatrix selected by `rows` x `cols`.
    pub fn det_sub(&self, rows: &[usize], cols: &[usize]) -> u16 {
        debug_assert_eq!(rows.len(), cols.len());
        let f = &self.field;
        if rows.len() == 1 {
            return self.get(rows[0], cols[0]);
        }
        if rows.len() == 2 {
            // closed form ad - bc: the hot path of the searches
            let (a, b) = (self.get(rows[0], cols[0]), self.get(rows[0], cols[1]));
            let (c, d) = (self.get(rows[1], cols[0]), self.get(rows[1], cols[1]));
            return f.sub(f.mul(a, d), f.mul(b, c));
        }
        let t = rows.len();
        let entries: Vec<u16> = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| self.get(r, c)))
            .collect();
        MatrixGF::new(self.field.clone(), t, entries).det()
    }

    /// Lemma-style linear AONT check: the matrix is invertible and every
    /// t-by-t submatrix has nonzero determinant.
    pub fn is_linear_aont(&self, t: usize) -> Result<VerifyReport, MatrixError> {
        if t < 1 || t > self.s {
            return Err(MatrixError::StrengthOutOfRange(t, self.s));
        }
        let mut report = VerifyReport {
            valid: true,
            t,
            s: self.s,
            q: self.field.order(),
            witness: None,
            mu: None,
            tau: None,
        };
        if !self.is_invertible() {
            report.valid = false;
            report.witness = Some(Witness::Singular);
            return Ok(report);
        }
        let mut rows = first_combination(t);
        loop {
            let mut cols = first_combination(t);
            loop {
                if self.det_sub(&rows, &cols) == 0 {
                    report.valid = false;
                    report.witness = Some(Witness::Submatrix {
                        rows: rows.clone(),
                        cols: cols.clone(),
                    });
                    return Ok(report);
                }
                if !next_combination(&mut cols, self.s) {
                    break;
                }
            }
            if !next_combination(&mut rows, self.s) {
                break;
            }
        }
        Ok(report)
    }

    /// True when every square submatrix of every order is invertible.
    pub fn is_aont_all_strengths(&self) -> bool {
        (1..=self.s).all(|t| self.is_linear_aont(t).map_or(false, |r| r.valid))
    }

    /// Normalize to type-mu standard form: zeros leading the diagonal, ones
    /// in the rest of the first row and column.
    pub fn to_standard_form(&self) -> Result<(MatrixGF, StandardFormInfo), MatrixError> {
        let f = self.field.clone();
        let s = self.s;
        // zero structure: at most one zero per row and column
        let mut zero_col_of_row = vec![None; s];
        let mut zero_seen_col = vec![false; s];
        for r in 0..s {
            for c in 0..s {
                if self.get(r, c) == 0 {
                    if zero_col_of_row[r].is_some() {
                        return Err(MatrixError::DoubleZero(r));
                    }
                    if zero_seen_col[c] {
                        return Err(MatrixError::DoubleZero(c));
                    }
                    zero_col_of_row[r] = Some(c);
                    zero_seen_col[c] = true;
                }
            }
        }
        // rows with zeros first, in original row order; their zero columns
        // moved in the same order
        let mut row_perm = Vec::with_capacity(s);
        let mut col_perm = Vec::with_capacity(s);
        for r in 0..s {
            if let Some(c) = zero_col_of_row[r] {
                row_perm.push(r);
                col_perm.push(c);
            }
        }
        let mu = row_perm.len();
        for r in 0..s {
            if zero_col_of_row[r].is_none() {
                row_perm.push(r);
            }
        }
        for c in 0..s {
            if !zero_seen_col[c] {
                col_perm.push(c);
            }
        }
        let mut m = MatrixGF::new(
            f.clone(),
            s,
            (0..s * s)
                .map(|i| self.get(row_perm[i / s], col_perm[i % s]))
                .collect(),
        );
        // columns first: make row 0 all ones outside the corner
        let mut col_scales = vec![1u16; s];
        for c in 0..s {
            let v = m.get(0, c);
            if v != 0 && v != 1 {
                let by = f.inv(v);
                col_scales[c] = by;
                for r in 0..s {
                    m.set(r, c, f.mul(m.get(r, c), by));
                }
            }
        }
        // then rows 1..s: make column 0 all ones
        let mut row_scales = vec![1u16; s];
        for r in 1..s {
            let v = m.get(r, 0);
            if v != 0 && v != 1 {
                let by = f.inv(v);
                row_scales[r] = by;
                for c in 0..s {
                    m.set(r, c, f.mul(m.get(r, c), by));
                }
            }
        }
        let chi = (s == f.order() as usize).then(|| m.get(s - 1, s - 1));
        Ok((
            m,
            StandardFormInfo {
                mu,
                chi,
                row_perm,
                col_perm,
                row_scales,
                col_scales,
            },
        ))
    }

    /// True when the matrix is in type-q standard form (mu = s = q).
    pub fn is_type_q_standard_form(&self) -> bool {
        let s = self.s;
        if s != self.field.order() as usize {
            return false;
        }
        for r in 0..s {
            for c in 0..s {
                let v = self.get(r, c);
                if r == c {
                    if v != 0 {
                        return false;
                    }
                } else if (r == 0 || c == 0) && v != 1 {
                    return false;
                } else if v == 0 && r != c {
                    return false;
                }
            }
        }
        true
    }

    /// True when the matrix is in reduced form: type-q standard form with the
    /// row-2 entries in columns 3..q strictly increasing (1-based indices).
    pub fn is_reduced(&self) -> bool {
        if !self.is_type_q_standard_form() {
            return false;
        }
        self.row(1)[2..].windows(2).all(|w| w[0] < w[1])
    }

    /// Sort the row-2 suffix and apply the same permutation to the rows.
    pub fn to_reduced(&self) -> Result<MatrixGF, MatrixError> {
        if !self.is_type_q_standard_form() {
            return Err(MatrixError::NotTypeQStandardForm);
        }
        let s = self.s;
        let mut order: Vec<usize> = (2..s).collect();
        order.sort_by_key(|&c| self.get(1, c));
        let mut perm: Vec<usize> = (0..s).collect();
        for (i, &c) in order.iter().enumerate() {
            perm[2 + i] = c;
        }
        let m = MatrixGF::new(
            self.field.clone(),
            s,
            (0..s * s)
                .map(|i| self.get(perm[i / s], perm[i % s]))
                .collect(),
        );
        Ok(m)
    }

    /// The constant tau with m_ij + m_ji = tau over the trailing block of a
    /// reduced matrix, when one exists.
    pub fn skew_parameter(&self) -> Result<Option<u16>, MatrixError> {
        if !self.is_reduced() {
            return Err(MatrixError::NotReduced);
        }
        let f = &self.field;
        let s = self.s;
        let tau = f.add(self.get(1, 2), self.get(2, 1));
        for i in 1..s {
            for j in 1..s {
                if i != j && f.add(self.get(i, j), self.get(j, i)) != tau {
                    return Ok(None);
                }
            }
        }
        Ok(Some(tau))
    }

    /// Drop the first column and the first row whose deletion leaves an
    /// invertible matrix; the result is a (t, s-1, q)-AONT.
    pub fn shrink_aont(&self, t: usize) -> Result<MatrixGF, MatrixError> {
        if t >= self.s {
            return Err(MatrixError::StrengthOutOfRange(t, self.s));
        }
        let s = self.s;
        for drop_row in 0..s {
            let entries: Vec<u16> = (0..s)
                .filter(|&r| r != drop_row)
                .flat_map(|r| (1..s).map(move |c| self.get(r, c)))
                .collect();
            let m = MatrixGF::new(self.field.clone(), s - 1, entries);
            if m.is_invertible() {
                return Ok(m);
            }
        }
        // by the cofactor expansion of column 1 this point is unreachable
        // for an invertible input
        Err(MatrixError::Singular)
    }

    pub fn apply_op(&self, op: &MatrixOp) -> Result<MatrixGF, MatrixError> {
        let f = self.field.clone();
        let s = self.s;
        let check_perm = |p: &[usize]| {
            let mut seen = vec![false; s];
            if p.len() != s {
                return Err(MatrixError::BadPermutation);
            }
            for &i in p {
                if i >= s || seen[i] {
                    return Err(MatrixError::BadPermutation);
                }
                seen[i] = true;
            }
            Ok(())
        };
        let mut m = self.clone();
        match op {
            MatrixOp::PermuteRows(p) => {
                check_perm(p)?;
                m.entries = (0..s * s).map(|i| self.get(p[i / s], i % s)).collect();
            }
            MatrixOp::PermuteCols(p) => {
                check_perm(p)?;
                m.entries = (0..s * s).map(|i| self.get(i / s, p[i % s])).collect();
            }
            MatrixOp::ScaleRow { index, by } => {
                if *by == 0 {
                    return Err(MatrixError::ZeroScalar);
                }
                for c in 0..s {
                    m.set(*index, c, f.mul(self.get(*index, c), *by));
                }
            }
            MatrixOp::ScaleCol { index, by } => {
                if *by == 0 {
                    return Err(MatrixError::ZeroScalar);
                }
                for r in 0..s {
                    m.set(r, *index, f.mul(self.get(r, *index), *by));
                }
            }
            MatrixOp::Transpose => {
                m.entries = (0..s * s).map(|i| self.get(i % s, i / s)).collect();
            }
        }
        Ok(m)
    }

    pub fn transpose(&self) -> MatrixGF {
        self.apply_op(&MatrixOp::Transpose).unwrap()
    }

    /// Serialize to the matrix text format:
    /// `q=<q> p=<p> n=<n> poly=<code> s=<s>` then s rows of codes.
    pub fn to_text(&self) -> String {
        let f = &self.field;
        let mut out = format!(
            "q={} p={} n={} poly={} s={}\n",
            f.order(),
            f.p(),
            f.n(),
            f.modulus_code(),
            self.s
        );
        for r in 0..self.s {
            let row: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<MatrixGF, MatrixError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| MatrixError::Parse("empty file".into()))?;
        let mut q = None;
        let mut p = None;
        let mut n = None;
        let mut poly = None;
        let mut s = None;
        for tok in header.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| MatrixError::Parse(format!("bad header token {tok:?}")))?;
            let val: u32 = val
                .parse()
                .map_err(|_| MatrixError::Parse(format!("bad header value {tok:?}")))?;
            match key {
                "q" => q = Some(val),
                "p" => p = Some(val),
                "n" => n = Some(val),
                "poly" => poly = Some(val),
                "s" => s = Some(val),
                _ => return Err(MatrixError::Parse(format!("unknown header key {key:?}"))),
            }
        }
        let (q, p, n, poly, s) = match (q, p, n, poly, s) {
            (Some(q), Some(p), Some(n), Some(poly), Some(s)) => (q, p, n, poly, s),
            _ => return Err(MatrixError::Parse("incomplete header".into())),
        };
        let field = Field::new(p, n, (n > 1).then_some(poly))?;
        if field.order() as u32 != q {
            return Err(MatrixError::Parse(format!(
                "header q={q} does not match p^n={}",
                field.order()
            )));
        }
        let s = s as usize;
        let mut entries = Vec::with_capacity(s * s);
        for line in lines.take(s) {
            for tok in line.split_whitespace() {
                let v: u16 = tok
                    .parse()
                    .map_err(|_| MatrixError::Parse(format!("bad entry {tok:?}")))?;
                if v >= field.order() {
                    return Err(MatrixError::Parse(format!("entry {v} out of range")));
                }
                entries.push(v);
            }
        }
        if entries.len() != s * s {
            return Err(MatrixError::Parse(format!(
                "expected {} entries, found {}",
                s * s,
                entries.len()
            )));
        }
        Ok(MatrixGF::new(field, s, entries))
    }
}

#[inline]
fn acc_add(f: &Field, acc: u16, a: u16, b: u16) -> u16 {
    f.add(acc, f.mul(a, b))
}

/// First t-subset {0, 1, ..., t-1}.
pub(crate) fn first_combination(t: usize) -> Vec<usize> {
    (0..t).collect()
}

/// Advance a sorted index subset to the lexicographically next one; returns
/// false when exhausted.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let t = c.len();
    let mut i = t;
    while i > 0 {
        i -= 1;
        if c[i] < n - (t - i) {
            c[i] += 1;
            for j in i + 1..t {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::builtin_example;
    use crate::field::Field;

    /// Cofactor-expansion determinant, independent of the elimination path.
    fn det_cofactor(m: &MatrixGF) -> u16 {
        let f = m.field();
        let s = m.dim();
        if s == 1 {
            return m.get(0, 0);
        }
        let mut acc = 0u16;
        for c in 0..s {
            let minor: Vec<u16> = (1..s)
                .flat_map(|r| (0..s).filter(|&cc| cc != c).map(move |cc| m.get(r, cc)))
                .collect();
            let sub = MatrixGF::new(m.field().clone(), s - 1, minor);
            let mut term = f.mul(m.get(0, c), det_cofactor(&sub));
            if c % 2 == 1 {
                term = f.neg(term);
            }
            acc = f.add(acc, term);
        }
        acc
    }

    #[test]
    fn det_examples() {
        let f3 = Field::new(3, 1, None).unwrap();
        let e1 = builtin_example("E1").unwrap();
        assert_eq!(e1.det(), 2);
        assert_eq!(det_cofactor(&e1), 2);

        // 2x2 [[0,1],[1,m]] has determinant -1 in any field
        for q in ["4", "5", "9"] {
            let f = Field::parse(q).unwrap();
            for m in f.elements() {
                let mat = MatrixGF::new(f.clone(), 2, vec![0, 1, 1, m]);
                assert_eq!(mat.det(), f.neg(1));
            }
        }

        let id = MatrixGF::new(f3.clone(), 3, vec![1, 0, 0, 0, 1, 0, 0, 0, 1]);
        assert_eq!(id.det(), 1);
    }

    #[test]
    fn det_agrees_with_cofactor_oracle() {
        // deterministic sweep of small matrices
        let f = Field::parse("5").unwrap();
        for seed in 0..200u32 {
            let mut x = seed;
            let entries: Vec<u16> = (0..9)
                .map(|_| {
                    x = x.wrapping_mul(1103515245).wrapping_add(12345);
                    ((x >> 16) % 5) as u16
                })
                .collect();
            let m = MatrixGF::new(f.clone(), 3, entries);
            assert_eq!(m.det(), det_cofactor(&m));
        }
    }

    #[test]
    fn aont_verification_witnesses() {
        let e1 = builtin_example("E1").unwrap();
        assert!(e1.is_linear_aont(2).unwrap().valid);

        let f3 = Field::new(3, 1, None).unwrap();
        let id = MatrixGF::new(f3.clone(), 3, vec![1, 0, 0, 0, 1, 0, 0, 0, 1]);
        let rep = id.is_linear_aont(2).unwrap();
        assert!(!rep.valid);
        assert_eq!(
            rep.witness,
            Some(Witness::Submatrix {
                rows: vec![0, 1],
                cols: vec![0, 2]
            })
        );

        let add5 = crate::construct::additive_matrix(&Field::parse("5").unwrap());
        let rep = add5.is_linear_aont(2).unwrap();
        assert!(!rep.valid);
        assert_eq!(rep.witness, Some(Witness::Singular));

        assert!(id.is_linear_aont(0).is_err());
        assert!(id.is_linear_aont(4).is_err());
    }

    #[test]
    fn cauchy_4x4_gf11_t3() {
        let f = Field::parse("11").unwrap();
        let m = crate::construct::cauchy(&f, 4, None, None).unwrap();
        assert!(m.is_linear_aont(3).unwrap().valid);
        // brute-force all 3x3 subdeterminants as an independent route
        let mut rows = first_combination(3);
        loop {
            let mut cols = first_combination(3);
            loop {
                assert_ne!(det_cofactor_sub(&m, &rows, &cols), 0);
                if !next_combination(&mut cols, 4) {
                    break;
                }
            }
            if !next_combination(&mut rows, 4) {
                break;
            }
        }
    }

    fn det_cofactor_sub(m: &MatrixGF, rows: &[usize], cols: &[usize]) -> u16 {
        let entries: Vec<u16> = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| m.get(r, c)))
            .collect();
        det_cofactor(&MatrixGF::new(m.field().clone(), rows.len(), entries))
    }

    #[test]
    fn standard_form_normalizes_and_is_idempotent() {
        let e1 = builtin_example("E1").unwrap();
        let (m, info) = e1.to_standard_form().unwrap();
        assert_eq!(m, e1);
        assert_eq!(info.mu, 3);
        assert_eq!(info.chi, Some(0));

        // scramble: swap rows 1,2 and scale row 2 by 2
        let scr = e1
            .apply_op(&MatrixOp::PermuteRows(vec![0, 2, 1]))
            .unwrap()
            .apply_op(&MatrixOp::ScaleRow { index: 2, by: 2 })
            .unwrap();
        let (m2, _) = scr.to_standard_form().unwrap();
        // normalization returns a type-3 standard form; reduce and compare
        let r2 = m2.to_reduced().unwrap();
        assert_eq!(r2, e1);

        let (m3, _) = m.to_standard_form().unwrap();
        assert_eq!(m3, m);
    }

    #[test]
    fn standard_form_rejects_double_zero() {
        let f3 = Field::new(3, 1, None).unwrap();
        let bad = MatrixGF::new(f3, 3, vec![0, 0, 1, 1, 1, 1, 1, 1, 1]);
        assert!(matches!(
            bad.to_standard_form(),
            Err(MatrixError::DoubleZero(_))
        ));
    }

    #[test]
    fn reduced_form_and_idempotence() {
        for name in ["E3", "E5"] {
            let m = builtin_example(name).unwrap();
            assert!(m.is_reduced());
            assert_eq!(m.to_reduced().unwrap(), m);
        }
        // swapping columns 3,4 and rows 3,4 of E3 is undone by reduction
        let e3 = builtin_example("E3").unwrap();
        let p = vec![0, 1, 3, 2, 4];
        let scr = e3
            .apply_op(&MatrixOp::PermuteRows(p.clone()))
            .unwrap()
            .apply_op(&MatrixOp::PermuteCols(p))
            .unwrap();
        assert_eq!(scr.to_reduced().unwrap(), e3);
        assert!(!scr.is_reduced());
    }

    #[test]
    fn skew_parameters_of_examples() {
        assert_eq!(builtin_example("E1").unwrap().skew_parameter().unwrap(), Some(2));
        assert_eq!(builtin_example("E4").unwrap().skew_parameter().unwrap(), Some(6));
        // E2 is reduced but has no constant skew parameter
        let e2 = builtin_example("E2").unwrap();
        assert!(e2.is_reduced());
        assert_eq!(e2.skew_parameter().unwrap(), None);
    }

    #[test]
    fn shrink_produces_smaller_aont() {
        let e3 = builtin_example("E3").unwrap();
        let m = e3.shrink_aont(2).unwrap();
        assert_eq!(m.dim(), 4);
        assert!(m.is_linear_aont(2).unwrap().valid);

        let e1 = builtin_example("E1").unwrap();
        let m = e1.shrink_aont(2).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(m.is_linear_aont(2).unwrap().valid);

        let f3 = Field::new(3, 1, None).unwrap();
        let one = MatrixGF::new(f3, 1, vec![1]);
        assert!(one.shrink_aont(1).is_err());
    }

    #[test]
    fn equivalence_ops() {
        let e1 = builtin_example("E1").unwrap();
        assert_eq!(e1.transpose(), e1);
        assert!(e1
            .apply_op(&MatrixOp::ScaleRow { index: 1, by: 0 })
            .is_err());
        let swapped = e1.apply_op(&MatrixOp::PermuteRows(vec![1, 0, 2])).unwrap();
        assert_eq!(swapped.row(0), &[1, 0, 1]);
        assert!(e1
            .apply_op(&MatrixOp::PermuteRows(vec![0, 0, 1]))
            .is_err());
        // every op preserves the AONT property
        for op in [
            MatrixOp::PermuteCols(vec![2, 1, 0]),
            MatrixOp::ScaleRow { index: 0, by: 2 },
            MatrixOp::ScaleCol { index: 2, by: 2 },
            MatrixOp::Transpose,
        ] {
            assert!(e1.apply_op(&op).unwrap().is_linear_aont(2).unwrap().valid);
        }
    }

    #[test]
    fn text_round_trip() {
        let e289 = builtin_example("E289").unwrap();
        let text = e289.to_text();
        assert!(text.starts_with("q=9 p=3 n=2 poly=10 s=8"));
        let back = MatrixGF::from_text(&text).unwrap();
        assert_eq!(back, e289);

        assert!(MatrixGF::from_text("").is_err());
        assert!(MatrixGF::from_text("q=9 p=3 n=2 poly=10 s=8\n1 2").is_err());
        assert!(MatrixGF::from_text("q=5 p=5 n=1 poly=0 s=1\n7\n").is_err());
    }

    #[test]
    fn report_json_is_one_based() {
        let f3 = Field::new(3, 1, None).unwrap();
        let id = MatrixGF::new(f3, 3, vec![1, 0, 0, 0, 1, 0, 0, 0, 1]);
        let rep = id.is_linear_aont(2).unwrap().to_json();
        assert_eq!(rep.witness_rows, Some(vec![1, 2]));
        assert_eq!(rep.witness_cols, Some(vec![1, 3]));
        let s = serde_json::to_string(&rep).unwrap();
        assert!(s.contains("\"valid\":false"));
    }
}
