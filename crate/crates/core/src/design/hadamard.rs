//! Hadamard matrices by Sylvester doubling and the two Paley constructions,
//! plus the designs derived from them.

use nalgebra::DMatrix;

use super::Design;
use crate::error::{Error, Result};

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Quadratic character of `x` modulo the prime `q`.
fn legendre(x: usize, q: usize) -> f64 {
    let x = x % q;
    if x == 0 {
        return 0.0;
    }
    if (1..q).any(|y| y * y % q == x) {
        1.0
    } else {
        -1.0
    }
}

/// Jacobsthal matrix `Q[i][j] = chi(j - i)`.
fn jacobsthal(q: usize) -> DMatrix<f64> {
    DMatrix::from_fn(q, q, |i, j| legendre(j + q - i, q))
}

/// `q + 1` with `q` prime, `q = 3 mod 4`.
fn paley_one(q: usize) -> DMatrix<f64> {
    let m = q + 1;
    let jac = jacobsthal(q);
    let mut h = DMatrix::zeros(m, m);
    for j in 1..m {
        h[(0, j)] = 1.0;
        h[(j, 0)] = -1.0;
    }
    for i in 0..q {
        for j in 0..q {
            h[(i + 1, j + 1)] = jac[(i, j)];
        }
    }
    for i in 0..m {
        h[(i, i)] += 1.0;
    }
    h
}

/// `2(q + 1)` with `q` prime, `q = 1 mod 4`.
fn paley_two(q: usize) -> DMatrix<f64> {
    let m = q + 1;
    let jac = jacobsthal(q);
    let mut s = DMatrix::zeros(m, m);
    for j in 1..m {
        s[(0, j)] = 1.0;
        s[(j, 0)] = 1.0;
    }
    for i in 0..q {
        for j in 0..q {
            s[(i + 1, j + 1)] = jac[(i, j)];
        }
    }
    let mut h = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let v = s[(i, j)];
            let block = if v == 0.0 { [[1.0, -1.0], [-1.0, -1.0]] } else { [[v, v], [v, -v]] };
            for (a, row) in block.iter().enumerate() {
                for (b, &val) in row.iter().enumerate() {
                    h[(2 * i + a, 2 * j + b)] = val;
                }
            }
        }
    }
    h
}

fn sylvester(h: &DMatrix<f64>) -> DMatrix<f64> {
    let m = h.nrows();
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    out.view_mut((0, 0), (m, m)).copy_from(h);
    out.view_mut((0, m), (m, m)).copy_from(h);
    out.view_mut((m, 0), (m, m)).copy_from(h);
    out.view_mut((m, m), (m, m)).copy_from(&(-h));
    out
}

fn raw_hadamard(order: usize) -> Option<DMatrix<f64>> {
    match order {
        0 => None,
        1 => Some(DMatrix::from_element(1, 1, 1.0)),
        2 => Some(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0])),
        m if m % 4 != 0 => None,
        m => {
            let q = m - 1;
            if is_prime(q) && q % 4 == 3 {
                return Some(paley_one(q));
            }
            if let Some(h) = raw_hadamard(m / 2) {
                return Some(sylvester(&h));
            }
            let q = m / 2 - 1;
            if is_prime(q) && q % 4 == 1 {
                return Some(paley_two(q));
            }
            None
        }
    }
}

/// Normalized Hadamard matrix: `H'H = order * I` with first row and column
/// all `+1`.
pub fn hadamard(order: usize) -> Result<DMatrix<f64>> {
    let mut h = raw_hadamard(order).ok_or(Error::UnsupportedOrder(order))?;
    for i in 0..order {
        if h[(i, 0)] < 0.0 {
            h.row_mut(i).neg_mut();
        }
    }
    for j in 0..order {
        if h[(0, j)] < 0.0 {
            h.column_mut(j).neg_mut();
        }
    }
    Ok(h)
}

/// Orthogonal main-effect design with `n` runs and `n - 1` factors, taken from
/// the normalized Hadamard matrix by dropping the intercept column.
pub fn plackett_burman(n: usize) -> Result<Design> {
    let h = hadamard(n)?;
    if n < 2 {
        return Err(Error::UnsupportedOrder(n));
    }
    Design::from_levels(format!("pb{n}"), h.columns(1, n - 1).into_owned())
}

/// Half-fraction supersaturated design from a Hadamard matrix of the given
/// order: keep the runs where a branching column is `+1`, then drop the
/// intercept and branching columns. Gives `order / 2` runs and `order - 2`
/// balanced factors.
///
/// The branching column is the first (in index order) whose half fraction has
/// no pair of fully aliased columns.
pub fn half_fraction_ssd(order: usize) -> Result<Design> {
    let h = hadamard(order)?;
    if order < 4 {
        return Err(Error::UnsupportedOrder(order));
    }
    let m = order / 2;
    let mut fallback = None;
    for branch in 1..order {
        let rows: Vec<usize> = (0..order).filter(|&i| h[(i, branch)] > 0.0).collect();
        let cols: Vec<usize> = (1..order).filter(|&j| j != branch).collect();
        let x = h.select_rows(&rows).select_columns(&cols);
        let s = x.tr_mul(&x);
        let aliased = (0..cols.len())
            .any(|i| ((i + 1)..cols.len()).any(|j| s[(i, j)].abs() >= m as f64));
        let d = Design::from_levels(format!("ssd{m}x{}", order - 2), x)?;
        if !aliased {
            return Ok(d);
        }
        fallback.get_or_insert(d);
    }
    fallback.ok_or(Error::UnsupportedOrder(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::es2;

    fn orthogonality_error(h: &DMatrix<f64>) -> f64 {
        let m = h.nrows() as f64;
        let g = h.tr_mul(h) - DMatrix::identity(h.nrows(), h.nrows()) * m;
        g.amax()
    }

    #[test]
    fn order_two() {
        let h = hadamard(2).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[1., 1., 1., -1.]));
    }

    #[test]
    fn supported_orders_are_orthogonal_and_normalized() {
        for order in [1, 2, 4, 8, 12, 16, 20, 24, 28, 32, 36, 40, 44, 48] {
            let h = hadamard(order).unwrap();
            assert!(orthogonality_error(&h) <= 1e-12, "order {order}");
            assert!(h.iter().all(|&v| v == 1.0 || v == -1.0));
            assert!(h.row(0).iter().all(|&v| v == 1.0));
            assert!(h.column(0).iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn unsupported_orders() {
        for order in [0, 3, 6, 10] {
            assert!(matches!(hadamard(order), Err(Error::UnsupportedOrder(o)) if o == order));
        }
    }

    #[test]
    fn half_fractions() {
        let d = half_fraction_ssd(28).unwrap();
        assert_eq!((d.runs(), d.factors()), (14, 26));
        assert!(d.is_balanced());
        let t = d.truncate_factors(24).unwrap();
        assert_eq!((t.runs(), t.factors()), (14, 24));
        assert!(es2(&t).unwrap().is_finite());

        let d = half_fraction_ssd(24).unwrap();
        assert_eq!((d.runs(), d.factors()), (12, 22));
        assert!(d.is_balanced());
    }
}
