//! Dense Gaussian elimination over exact fields.

use super::{GaussianRational, RationalFunction};

pub trait FieldElem: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `None` on division by zero.
    fn div(&self, o: &Self) -> Option<Self>;
}

impl FieldElem for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self * &i)
    }
}

impl FieldElem for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o).ok()
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<T: FieldElem>(a: &mut [Vec<T>]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = T::one().div(&a[r][c]).expect("nonzero pivot");
        for k in c..cols {
            a[r][k] = a[r][k].mul(&inv);
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in c..cols {
                    let t = f.mul(&a[r][k]);
                    a[i][k] = a[i][k].sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: FieldElem>(a: &[Vec<T>]) -> usize {
    let mut m = a.to_vec();
    rref(&mut m).len()
}

/// One solution of `a x = b`, free variables set to zero; `None` if inconsistent.
pub fn solve<T: FieldElem>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut m);
    if piv.last() == Some(&n) {
        return None;
    }
    let mut x = vec![T::zero(); n];
    for (i, &c) in piv.iter().enumerate() {
        x[c] = m[i][n].clone();
    }
    Some(x)
}

pub fn det<T: FieldElem>(a: &[Vec<T>]) -> T {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = T::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return T::zero() };
        if p != c {
            m.swap(p, c);
            d = T::zero().sub(&d);
        }
        d = d.mul(&m[c][c]);
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].div(&m[c][c]).expect("nonzero pivot");
            for k in c..n {
                let t = f.mul(&m[c][k]);
                m[i][k] = m[i][k].sub(&t);
            }
        }
    }
    d
}

pub fn inverse<T: FieldElem>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut m);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul<T: FieldElem>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let k = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..k)
                .map(|j| row.iter().zip(b).fold(T::zero(), |acc, (x, brow)| acc.add(&x.mul(&brow[j]))))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expression;

    fn rf(s: &str) -> RationalFunction {
        parse_expression(s, &["x".to_string(), "y".to_string()]).unwrap()
    }

    #[test]
    fn inverse_of_symbolic_matrix() {
        let a = vec![vec![rf("x"), rf("1")], vec![rf("y"), rf("x*y")]];
        let inv = inverse(&a).unwrap();
        let id = mat_mul(&a, &inv);
        assert_eq!(id, vec![vec![rf("1"), rf("0")], vec![rf("0"), rf("1")]]);
        assert_eq!(det(&a), rf("x^2*y - y"));
    }

    #[test]
    fn singular_and_inconsistent() {
        let a = vec![vec![rf("x"), rf("y")], vec![rf("2*x"), rf("2*y")]];
        assert!(inverse(&a).is_none());
        assert_eq!(rank(&a), 1);
        assert!(det(&a).is_zero());
        assert!(solve(&a, &[rf("1"), rf("1")]).is_none());
        let x = solve(&a, &[rf("x"), rf("2*x")]).unwrap();
        assert_eq!(&(&a[0][0] * &x[0]) + &(&a[0][1] * &x[1]), rf("x"));
    }

    #[test]
    fn gaussian_scalars() {
        let g = |n| GaussianRational::from_int(n);
        let a = vec![vec![g(1), g(1)], vec![g(1), g(-1)]];
        assert_eq!(det(&a), g(-2));
        let x = solve(&a, &[g(2), g(0)]).unwrap();
        assert_eq!(x, vec![g(1), g(1)]);
    }
}
