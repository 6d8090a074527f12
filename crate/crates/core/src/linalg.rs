//! Exact integer row reduction.
//!
//! Rows are reduced fraction-free: eliminating with pivot `p` replaces a row
//! `r` by `p·r − f·pivot_row` and then divides out the content (gcd of the
//! entries), so every intermediate stays integral and small.

use num_integer::Integer;

fn normalize(row: &mut [i128]) {
    let g = row.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        row.iter_mut().for_each(|x| *x /= g);
    }
}

/// Reduced row echelon form over the integers, pivots chosen by scanning the
/// columns in `order`. Returns the pivot rows and the column of each pivot.
fn echelon(rows: &[Vec<i128>], order: &[usize]) -> (Vec<Vec<i128>>, Vec<usize>) {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    m.iter_mut().for_each(|r| normalize(r));
    let mut pivots = Vec::new();
    let mut next = 0;
    for &col in order {
        if next == m.len() {
            break;
        }
        let Some(found) = (next..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(next, found);
        let pivot_row = m[next].clone();
        let p = pivot_row[col];
        for (i, row) in m.iter_mut().enumerate() {
            if i == next || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = p * *x - f * y;
            }
            normalize(row);
        }
        pivots.push(col);
        next += 1;
    }
    m.truncate(next);
    (m, pivots)
}

/// Rank over the rationals of an integer matrix given by rows.
pub fn rank(rows: &[Vec<i128>]) -> usize {
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let order: Vec<usize> = (0..width).collect();
    echelon(rows, &order).1.len()
}

/// Integer parametrisation of the solution space of `rows · x = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nullspace {
    /// Free variables, in the order they were encountered.
    pub free: Vec<usize>,
    /// `coeffs[i][j]`: coefficient of free variable `free[j]` in `x_i`,
    /// multiplied by `scale`.
    pub coeffs: Vec<Vec<i128>>,
    /// Common denominator cleared from the rational coefficients.
    pub scale: i128,
}

/// Solves the homogeneous system, scanning columns in `order` for pivots;
/// the remaining columns become free variables.
pub fn nullspace(rows: &[Vec<i128>], width: usize, order: &[usize]) -> Nullspace {
    debug_assert_eq!(order.len(), width);
    let (reduced, pivots) = echelon(rows, order);
    let free: Vec<usize> = order
        .iter()
        .copied()
        .filter(|c| !pivots.contains(c))
        .collect();
    let scale = pivots
        .iter()
        .zip(&reduced)
        .fold(1i128, |l, (&c, row)| l.lcm(&row[c].abs()));

    let mut coeffs = vec![vec![0i128; free.len()]; width];
    for (j, &f) in free.iter().enumerate() {
        coeffs[f][j] = scale;
    }
    for (&c, row) in pivots.iter().zip(&reduced) {
        // row[c]·x_c + Σ row[f]·x_f = 0
        let mult = scale / row[c];
        for (j, &f) in free.iter().enumerate() {
            coeffs[c][j] = -row[f] * mult;
        }
    }
    Nullspace {
        free,
        coeffs,
        scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[vec![0, 0]]), 0);
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]), 2);
        assert_eq!(rank(&[vec![2, 0, 1], vec![0, 3, 0], vec![1, 1, 7]]), 3);
    }

    #[test]
    fn nullspace_vectors_solve_the_system() {
        let rows = vec![vec![2, -4, 1, 0], vec![0, 3, 0, -6]];
        for order in [vec![0, 1, 2, 3], vec![3, 2, 1, 0]] {
            let ns = nullspace(&rows, 4, &order);
            assert_eq!(ns.free.len(), 2);
            for j in 0..ns.free.len() {
                let v: Vec<i128> = ns.coeffs.iter().map(|c| c[j]).collect();
                for r in &rows {
                    assert_eq!(r.iter().zip(&v).map(|(a, b)| a * b).sum::<i128>(), 0);
                }
            }
        }
    }
}
