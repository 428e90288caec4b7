//! Named constructions of candidate AONT matrices and the built-in example
//! fixtures. The example matrices are embedded data, not computed, so
//! fixture integrity does not depend on the arithmetic being correct.

use std::sync::Arc;

use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::matrix::MatrixGF;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("Cauchy construction needs q >= 2s (q={q}, s={s})")]
    CauchyTooLarge { q: u16, s: usize },
    #[error("Cauchy element sequences must consist of 2s distinct elements")]
    CauchyRepeatedElement,
    #[error("Cauchy element sequences must have length s")]
    CauchyBadLength,
    #[error("2^{0} - 1 = {1} is not prime")]
    NotMersenne(u32, u32),
    #[error("Vandermonde dimension s={0} out of range 2..=2^n-1")]
    VandermondeBadDim(usize),
    #[error("unknown example {0:?}")]
    UnknownExample(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Cauchy matrix c_ij = 1/(a_i - b_j) over 2s distinct elements. Every
/// square submatrix is invertible, so the result is a (t,s,q)-AONT for
/// every t <= s. Defaults: a_i = code i, b_j = code s+j.
pub fn cauchy(
    field: &Arc<Field>,
    s: usize,
    a: Option<Vec<u16>>,
    b: Option<Vec<u16>>,
) -> Result<MatrixGF, ConstructError> {
    let q = field.order();
    if (q as usize) < 2 * s {
        return Err(ConstructError::CauchyTooLarge { q, s });
    }
    let a = a.unwrap_or_else(|| (0..s as u16).collect());
    let b = b.unwrap_or_else(|| (s as u16..2 * s as u16).collect());
    if a.len() != s || b.len() != s {
        return Err(ConstructError::CauchyBadLength);
    }
    let mut seen = vec![false; q as usize];
    for &e in a.iter().chain(b.iter()) {
        if seen[e as usize] {
            return Err(ConstructError::CauchyRepeatedElement);
        }
        seen[e as usize] = true;
    }
    let entries = a
        .iter()
        .flat_map(|&ai| b.iter().map(move |&bj| field.inv(field.sub(ai, bj))))
        .collect();
    Ok(MatrixGF::new(field.clone(), s, entries))
}

fn mersenne_prime(n: u32) -> bool {
    let m = 2u64.pow(n) - 1;
    if m < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Vandermonde matrix m_rc = alpha^(rc) over GF(2^n) with alpha primitive,
/// valid as a (2,s,2^n)-AONT when 2^n - 1 is prime.
pub fn vandermonde_aont(n: u32, s: usize) -> Result<MatrixGF, ConstructError> {
    if !mersenne_prime(n) {
        return Err(ConstructError::NotMersenne(n, 2u32.pow(n) - 1));
    }
    let field = Field::new(2, n, None)?;
    if s < 2 || s > (field.order() - 1) as usize {
        return Err(ConstructError::VandermondeBadDim(s));
    }
    let alpha = field.primitive_element();
    let entries = (0..s)
        .flat_map(|r| {
            let f = field.clone();
            (0..s).map(move |c| f.pow(alpha, (r * c) as u64))
        })
        .collect();
    Ok(MatrixGF::new(field, s, entries))
}

/// The q-by-q matrix m_rc = r + c (field addition on element codes). Every
/// 2-by-2 submatrix is invertible but the matrix itself is singular for
/// q > 2, so it is not an AONT.
pub fn additive_matrix(field: &Arc<Field>) -> MatrixGF {
    let q = field.order() as usize;
    let entries = (0..q)
        .flat_map(|r| (0..q).map(move |c| field.add(r as u16, c as u16)))
        .collect();
    MatrixGF::new(field.clone(), q, entries)
}

/// Embedded example matrices. GF(4) and GF(9) entries use the base-p digit
/// encoding: in GF(4) x = 2, x+1 = 3; in GF(9) x = 3, x+1 = 4, x+2 = 5,
/// 2x = 6, 2x+1 = 7, 2x+2 = 8.
pub fn builtin_example(name: &str) -> Result<MatrixGF, ConstructError> {
    let (field, rows): (Arc<Field>, Vec<Vec<u16>>) = match name {
        "E1" => (
            Field::new(3, 1, None)?,
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        ),
        "E2" => (
            Field::new(2, 2, Some(7))?,
            vec![
                vec![0, 1, 1, 1],
                vec![1, 0, 1, 2],
                vec![1, 2, 0, 3],
                vec![1, 1, 2, 0],
            ],
        ),
        "E3" => (
            Field::new(5, 1, None)?,
            vec![
                vec![0, 1, 1, 1, 1],
                vec![1, 0, 1, 2, 3],
                vec![1, 3, 0, 1, 2],
                vec![1, 2, 3, 0, 1],
                vec![1, 1, 2, 3, 0],
            ],
        ),
        "E4" => (
            Field::new(7, 1, None)?,
            vec![
                vec![0, 1, 1, 1, 1, 1, 1],
                vec![1, 0, 1, 2, 3, 4, 5],
                vec![1, 5, 0, 3, 4, 2, 1],
                vec![1, 4, 3, 0, 5, 1, 2],
                vec![1, 3, 2, 1, 0, 5, 4],
                vec![1, 2, 4, 5, 1, 0, 3],
                vec![1, 1, 5, 4, 2, 3, 0],
            ],
        ),
        "E289" => (
            Field::new(3, 2, Some(10))?,
            vec![
                vec![0, 1, 1, 1, 1, 1, 1, 1],
                vec![1, 0, 1, 2, 3, 4, 5, 6],
                vec![1, 1, 0, 7, 4, 5, 2, 3],
                vec![1, 6, 3, 0, 5, 2, 7, 4],
                vec![1, 5, 2, 3, 0, 1, 6, 7],
                vec![1, 4, 5, 6, 7, 0, 1, 2],
                vec![1, 3, 4, 1, 2, 7, 0, 5],
                vec![1, 2, 7, 4, 1, 6, 3, 0],
            ],
        ),
        "E5" => (
            Field::new(11, 1, None)?,
            vec![
                vec![0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
                vec![1, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
                vec![1, 9, 0, 7, 8, 1, 3, 2, 5, 4, 6],
                vec![1, 8, 3, 0, 2, 5, 6, 1, 9, 7, 4],
                vec![1, 7, 2, 8, 0, 6, 1, 3, 4, 9, 5],
                vec![1, 6, 9, 5, 4, 0, 8, 7, 3, 1, 2],
                vec![1, 5, 7, 4, 9, 2, 0, 8, 1, 6, 3],
                vec![1, 4, 8, 9, 7, 3, 2, 0, 6, 5, 1],
                vec![1, 3, 5, 1, 6, 7, 9, 4, 0, 2, 8],
                vec![1, 2, 6, 3, 1, 9, 4, 5, 8, 0, 7],
                vec![1, 1, 4, 6, 5, 8, 7, 9, 2, 3, 0],
            ],
        ),
        _ => return Err(ConstructError::UnknownExample(name.to_string())),
    };
    let refs: Vec<&[u16]> = rows.iter().map(|r| r.as_slice()).collect();
    Ok(MatrixGF::from_rows(field, &refs))
}

pub const EXAMPLE_NAMES: &[&str] = &["E1", "E2", "E3", "E4", "E289", "E5"];
