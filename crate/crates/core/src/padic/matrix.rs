use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use super::scalar::{mod_inverse, p_power, val_int, PadicScalar};
use super::{PadicError, Result};

/// A matrix over `Z/p^N` with uniform precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicMatrix {
    p: u64,
    n: u32,
    rows: usize,
    cols: usize,
    entries: Vec<PadicScalar>,
}

/// Rank of a matrix at finite precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    /// All `(rank + 1)`-minors vanish modulo `p^N`.
    pub certified: bool,
    /// Valuations of the elementary divisors, `N` standing for zero.
    pub elementary_valuations: Vec<u32>,
}

impl PadicMatrix {
    /// Entries are truncated to the smallest precision present.
    pub fn from_rows(rows: Vec<Vec<PadicScalar>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        if nrows == 0 || ncols == 0 {
            return Err(PadicError::Shape("matrix must be non-empty".into()));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(PadicError::Shape("rows have different lengths".into()));
        }
        let p = rows[0][0].p();
        if rows.iter().flatten().any(|x| x.p() != p) {
            return Err(PadicError::Domain("entries over different primes".into()));
        }
        let n = rows.iter().flatten().map(|x| x.precision()).min().unwrap();
        let entries = rows.into_iter().flatten().map(|x| x.truncate(n)).collect();
        Ok(PadicMatrix {
            p,
            n,
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    pub fn from_rational_rows(rows: &[Vec<BigRational>], p: u64, n: u32) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|q| PadicScalar::from_rational(q, p, n)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::from_rows(rows)
    }

    pub fn from_int_rows(rows: &[Vec<i64>], p: u64, n: u32) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| PadicScalar::from_i64(x, p, n)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::from_rows(rows)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &PadicScalar {
        &self.entries[i * self.cols + j]
    }

    /// Valuations of the Smith normal form diagonal over `Z/p^N`, non-decreasing.
    ///
    /// The sum of the first `k` of them is the least valuation of a `k x k` minor.
    pub fn elementary_valuations(&self) -> Vec<u32> {
        let m = p_power(self.p, self.n);
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).value().clone()).collect())
            .collect();
        let size = self.rows.min(self.cols);
        let mut out = Vec::with_capacity(size);
        for k in 0..size {
            let mut best: Option<(u32, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(k) {
                for (j, x) in row.iter().enumerate().skip(k) {
                    if !x.is_zero() {
                        let v = val_int(x, self.p);
                        if best.is_none_or(|(bv, _, _)| v < bv) {
                            best = Some((v, i, j));
                        }
                    }
                }
            }
            let Some((v, pi, pj)) = best else {
                out.extend(std::iter::repeat_n(self.n, size - k));
                break;
            };
            a.swap(k, pi);
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            let pv = p_power(self.p, v);
            let unit = &a[k][k] / &pv;
            let uinv = mod_inverse(&unit, &m).expect("unit");
            for x in a[k].iter_mut() {
                *x = (&*x * &uinv).mod_floor(&m);
            }
            for i in (k + 1)..self.rows {
                let f = &a[i][k] / &pv;
                if f.is_zero() {
                    continue;
                }
                for j in k..self.cols {
                    let t = &f * &a[k][j];
                    a[i][j] = (&a[i][j] - t).mod_floor(&m);
                }
            }
            for j in (k + 1)..self.cols {
                let f = &a[k][j] / &pv;
                if f.is_zero() {
                    continue;
                }
                for row in a.iter_mut().skip(k) {
                    let t = &f * &row[k];
                    row[j] = (&row[j] - t).mod_floor(&m);
                }
            }
            out.push(v);
        }
        out
    }

    /// Largest `k` with a `k x k` minor of valuation below `N - tol`.
    pub fn rank_at_precision(&self, tol: u32) -> Result<RankReport> {
        if tol >= self.n {
            return Err(PadicError::Domain(format!(
                "tolerance {tol} must be below the precision {}",
                self.n
            )));
        }
        let vals = self.elementary_valuations();
        let mut rank = 0;
        let mut sum = 0u64;
        for &v in &vals {
            if v >= self.n {
                break;
            }
            sum += v as u64;
            if sum < (self.n - tol) as u64 {
                rank += 1;
            } else {
                break;
            }
        }
        let certified = match vals.get(rank) {
            None => true,
            Some(&v) => {
                let s: u64 = vals[..rank].iter().map(|&x| x as u64).sum::<u64>() + v as u64;
                v >= self.n || s >= self.n as u64
            }
        };
        Ok(RankReport {
            rank,
            certified,
            elementary_valuations: vals,
        })
    }

    pub fn identity(dim: usize, p: u64, n: u32) -> Result<Self> {
        let rows = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| PadicScalar::from_i64(i64::from(i == j), p, n))
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::from_rows(rows)
    }

    pub fn to_rows(&self) -> Vec<Vec<PadicScalar>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.p != other.p {
            return Err(PadicError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let n = self.n.min(other.n);
        let rows = (0..self.rows)
            .map(|i| {
                (0..other.cols)
                    .map(|j| {
                        let mut acc = PadicScalar::zero(self.p, n);
                        for k in 0..self.cols {
                            acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                        }
                        Ok(acc)
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::from_rows(rows)
    }

    /// Gauss-Jordan inverse; every pivot must be a unit.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(PadicError::Shape("inverse of a non-square matrix".into()));
        }
        let dim = self.rows;
        let mut a = self.to_rows();
        let mut inv = Self::identity(dim, self.p, self.n)?.to_rows();
        for k in 0..dim {
            let piv = (k..dim)
                .find(|&i| a[i][k].is_unit())
                .ok_or_else(|| PadicError::NotUnit(format!("no unit pivot in column {k}")))?;
            a.swap(k, piv);
            inv.swap(k, piv);
            let pinv = a[k][k].inv()?;
            for j in 0..dim {
                a[k][j] = a[k][j].mul(&pinv)?;
                inv[k][j] = inv[k][j].mul(&pinv)?;
            }
            for i in 0..dim {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..dim {
                    a[i][j] = a[i][j].sub(&f.mul(&a[k][j])?)?;
                    inv[i][j] = inv[i][j].sub(&f.mul(&inv[k][j])?)?;
                }
            }
        }
        Self::from_rows(inv)
    }

    /// Entrywise agreement modulo the smaller precision.
    pub fn eq_mod(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.eq_mod(b))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows)
            .map(|i| {
                Value::Array(
                    (0..self.cols)
                        .map(|j| Value::String(self.get(i, j).to_string()))
                        .collect(),
                )
            })
            .collect();
        json!({ "p": self.p, "N": self.n, "rows": rows })
    }

    /// Accepts entries as display strings `u*p^v+O(p^N)`, plain integers or rationals.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| PadicError::Parse(m.to_string());
        let p = v["p"].as_u64().ok_or_else(|| bad("missing `p`"))?;
        let n = v["N"].as_u64().ok_or_else(|| bad("missing `N`"))? as u32;
        let rows = v["rows"].as_array().ok_or_else(|| bad("missing `rows`"))?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| bad("row is not an array"))?
                    .iter()
                    .map(|x| super::parse_scalar(x, p, n))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        let id = PadicMatrix::from_int_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], 5, 8).unwrap();
        let r = id.rank_at_precision(0).unwrap();
        assert_eq!((r.rank, r.certified), (3, true));

        let big = 5i64.pow(7);
        let m = PadicMatrix::from_int_rows(&[vec![1, 0], vec![0, big]], 5, 8).unwrap();
        let r = m.rank_at_precision(0).unwrap();
        assert_eq!((r.rank, r.certified), (2, true));
        let r = m.rank_at_precision(6).unwrap();
        assert_eq!((r.rank, r.certified), (1, false));

        let m = PadicMatrix::from_int_rows(&[vec![1, 0], vec![big, 0]], 5, 8).unwrap();
        let r = m.rank_at_precision(0).unwrap();
        assert_eq!((r.rank, r.certified), (1, true));

        let m = PadicMatrix::from_int_rows(&[vec![3, 7, 2], vec![6, 14, 4]], 7, 8).unwrap();
        let r = m.rank_at_precision(0).unwrap();
        assert_eq!((r.rank, r.certified), (1, true));
        assert!(m.rank_at_precision(8).is_err());
    }

    #[test]
    fn elementary_valuations_sum_to_det() {
        // det = 5 * 25 - 3 * 0 ... built so that v(det) = 3
        let m = PadicMatrix::from_int_rows(&[vec![5, 3], vec![0, 25]], 5, 8).unwrap();
        let v = m.elementary_valuations();
        assert_eq!(v.iter().sum::<u32>(), 3);
        assert_eq!(v[0], 0);
    }

    #[test]
    fn json_round_trip() {
        let m = PadicMatrix::from_int_rows(&[vec![1, 25], vec![0, 7]], 5, 4).unwrap();
        let back = PadicMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
    }
}
