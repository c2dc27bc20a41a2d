//! Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub type Matrix = Vec<Vec<BigInt>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// Positive diagonal entries, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub rows: usize,
    pub cols: usize,
    /// Unimodular transforms with `u * a * v == d`.
    pub u: Matrix,
    pub v: Matrix,
    pub d: Matrix,
}

/// Free rank plus torsion coefficients of a finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn from_i64(rows: &[Vec<i64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn row_axpy(m: &mut Matrix, target: usize, source: usize, q: &BigInt) {
    // row[target] -= q * row[source]
    let src = m[source].clone();
    for (x, s) in m[target].iter_mut().zip(&src) {
        *x -= q * s;
    }
}

fn col_axpy(m: &mut Matrix, target: usize, source: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = row[source].clone();
        row[target] -= q * s;
    }
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Diagonalizes `a` (rows x cols) with row and column operations, choosing
/// the smallest available pivot at each stage.
pub fn smith_normal_form(a: &Matrix, cols: usize) -> SnfResult {
    let rows = a.len();
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&d, t..rows, t..cols) else {
            break;
        };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !d[i][t].is_zero() {
                    let q = d[i][t].div_floor(&d[t][t]);
                    row_axpy(&mut d, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    clean &= d[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !d[t][j].is_zero() {
                    let q = d[t][j].div_floor(&d[t][t]);
                    col_axpy(&mut d, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    clean &= d[t][j].is_zero();
                }
            }
            if !clean {
                // a remainder is now smaller than the pivot; move it in
                if let Some((i, j)) = smallest_in_cross(&d, t, rows, cols) {
                    if i != t {
                        d.swap(t, i);
                        u.swap(t, i);
                    }
                    if j != t {
                        swap_cols(&mut d, t, j);
                        swap_cols(&mut v, t, j);
                    }
                }
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&d[i][j] % &d[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut().chain(u[t].iter_mut()) {
                *x = -&*x;
            }
        }
        t += 1;
    }
    let invariant_factors: Vec<BigInt> = (0..t).map(|i| d[i][i].clone()).collect();
    SnfResult {
        rank: invariant_factors.len(),
        invariant_factors,
        rows,
        cols,
        u,
        v,
        d,
    }
}

fn smallest_nonzero(
    d: &Matrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn smallest_in_cross(d: &Matrix, t: usize, rows: usize, cols: usize) -> Option<(usize, usize)> {
    let column = (t..rows).map(|i| (i, t));
    let row = (t + 1..cols).map(|j| (t, j));
    column
        .chain(row)
        .filter(|&(i, j)| !d[i][j].is_zero())
        .min_by(|&(a, b), &(c, e)| d[a][b].abs().cmp(&d[c][e].abs()))
}

/// Cokernel of an integer matrix whose columns are the generators: the
/// abelian group `Z^cols / rowspace`.
pub fn cokernel(relations: &Matrix, cols: usize) -> AbelianGroup {
    let snf = smith_normal_form(relations, cols);
    let torsion = snf
        .invariant_factors
        .iter()
        .filter(|x| !x.is_one())
        .map(|x| u64::try_from(x).expect("torsion fits in u64"))
        .collect();
    AbelianGroup {
        free_rank: cols - snf.rank,
        torsion,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_a_small_matrix() {
        let a = from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&a, 3);
        let want: Vec<BigInt> = [2, 6, 12].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(s.invariant_factors, want);
        assert_eq!(mat_mul(&mat_mul(&s.u, &a), &s.v), s.d);
    }

    #[test]
    fn commutator_cokernel_is_free_of_rank_two() {
        // the relator aba^-1b^-1 has exponent sums (0, 0)
        let g = cokernel(&from_i64(&[vec![0, 0]]), 2);
        assert_eq!(g.free_rank, 2);
        assert!(g.torsion.is_empty());
        assert_eq!(g.to_string(), "Z^2");
    }
}
