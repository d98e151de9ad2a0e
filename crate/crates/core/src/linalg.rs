//! Exact linear algebra over the integers and the rationals.
//!
//! Everything here is dense and small: the matrices that show up are at most
//! (rank + central rank) square, so the algorithms favour clarity over speed.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

pub fn is_integral(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Parses `"p/q"`, `"-p/q"` or `"n"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Normalized `p/q` rendering; integers print without a denominator.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_rat_vec(v: &[Rat]) -> String {
    v.iter().map(fmt_rat).collect::<Vec<_>>().join(",")
}

/// Parses a comma separated list of rationals. The empty string is the empty vector.
pub fn parse_rat_vec(s: &str) -> Result<Vec<Rat>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_rat).collect()
}

/// Least common multiple of the denominators, as an `i64`.
pub fn common_denominator(v: &[Rat]) -> Result<i64> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    l.to_i64()
        .ok_or_else(|| Error::Overflow("denominator does not fit in 64 bits".into()))
}

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| format!("[{}]", fmt_rat_vec(self.row(i))))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r.iter().cloned());
        }
        QMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        let rows: Vec<Vec<Rat>> = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| v.iter().enumerate().map(|(i, x)| x * &self[(i, j)]).sum())
            .collect()
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(is_integral)
    }

    /// Converts to `i64` entries; fails on non-integral or oversized entries.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| {
                        if !is_integral(x) {
                            return Err(Error::Internal(format!(
                                "expected an integral matrix, found entry {}",
                                fmt_rat(x)
                            )));
                        }
                        x.numer()
                            .to_i64()
                            .ok_or_else(|| Error::Overflow("matrix entry exceeds 64 bits".into()))
                    })
                    .collect()
            })
            .collect()
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &p;
                inv[(col, j)] = &inv[(col, j)] / &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let (x, y) = (&a[(col, j)] * &f, &inv[(col, j)] * &f);
                    a[(r, j)] -= x;
                    inv[(r, j)] -= y;
                }
            }
        }
        Some(inv)
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(rank, p);
            for r in rank + 1..a.rows {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &a[(rank, col)];
                for j in col..a.cols {
                    let x = &a[(rank, j)] * &f;
                    a[(r, j)] -= x;
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Diagonal of the Smith normal form of an integer matrix, in divisibility
/// order, including trailing zeros for rank deficiency (length = min(rows, cols)).
pub fn smith_diagonal(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        // pivot: smallest nonzero absolute value in the trailing block
        let pivot = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i1, j1), &(i2, j2)| a[i1][j1].abs().cmp(&a[i2][j2].abs()));
        let Some((pi, pj)) = pivot else {
            diag.extend(std::iter::repeat(BigInt::zero()).take(m.min(n) - t));
            break;
        };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut done = true;
            for i in t + 1..m {
                let q = a[i][t].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for j in t..n {
                        let x = &q * &a[t][j];
                        a[i][j] -= x;
                    }
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    done = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let x = &q * &row[t];
                        row[j] -= x;
                    }
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    done = false;
                }
            }
            if done {
                // enforce divisibility into the trailing block
                let bad = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
                match bad {
                    Some((i, _)) => {
                        for j in t..n {
                            let x = a[i][j].clone();
                            a[t][j] += x;
                        }
                    }
                    None => break,
                }
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

/// Row-style Hermite normal form basis of the lattice spanned by `rows`.
/// Zero rows are dropped; the result is canonical for the lattice.
pub fn hermite_basis(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut r = 0;
    for col in 0..n {
        loop {
            let nz: Vec<usize> = (r..a.len()).filter(|&i| !a[i][col].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][col].abs()).unwrap();
            a.swap(r, p);
            let mut clean = true;
            for i in r + 1..a.len() {
                let q = a[i][col].div_floor(&a[r][col]);
                if !q.is_zero() {
                    for j in col..n {
                        let x = &q * &a[r][j];
                        a[i][j] -= x;
                    }
                }
                if !a[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if r < a.len() && !a[r][col].is_zero() {
            if a[r][col].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = a[i][col].div_floor(&a[r][col]);
                if !q.is_zero() {
                    for j in col..n {
                        let x = &q * &a[r][j];
                        a[i][j] -= x;
                    }
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a.into_iter()
        .map(|row| row.iter().map(|x| x.to_i64().expect("HNF entry overflow")).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(fmt_rat(&parse_rat("6/4").unwrap()), "3/2");
        assert_eq!(fmt_rat(&parse_rat("-2/1").unwrap()), "-2");
        assert_eq!(fmt_rat(&frac(&parse_rat("-1/3").unwrap())), "2/3");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn smith_of_a3_cartan() {
        let a3 = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        let d: Vec<i64> = smith_diagonal(&a3).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![1, 1, 4]);
    }

    #[test]
    fn smith_handles_rank_deficiency() {
        let m = vec![vec![2, 4], vec![1, 2]];
        let d: Vec<i64> = smith_diagonal(&m).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![1, 0]);
        let d: Vec<i64> = smith_diagonal(&[vec![6, 0], vec![0, 4]])
            .iter()
            .map(|x| x.to_i64().unwrap())
            .collect();
        assert_eq!(d, vec![2, 12]);
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_basis(&[vec![2, 0], vec![0, 2], vec![1, 1]]);
        let b = hermite_basis(&[vec![1, 1], vec![1, -1]]);
        assert_eq!(a, b);
        assert_eq!(a, vec![vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = QMatrix::from_int_rows(&[vec![2, -1], vec![-1, 2]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        assert_eq!(fmt_rat(&inv[(0, 0)]), "2/3");
        assert!(QMatrix::from_int_rows(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }
}
