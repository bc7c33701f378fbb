//! Linear solves for stationary distributions and transient visit counts.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::rational::Rational;

pub(crate) type SparseRow = BTreeMap<usize, Rational>;

/// Solves `A x = b` exactly by sparse Gaussian elimination, choosing the
/// shortest remaining row as pivot for each column to limit fill-in.
/// Returns `None` for a singular system.
pub(crate) fn solve_sparse(mut rows: Vec<SparseRow>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rows.len();
    debug_assert_eq!(rhs.len(), n);
    let mut used = vec![false; n];
    let mut pivot_of = vec![usize::MAX; n];
    for col in 0..n {
        // Earlier columns are already eliminated from every unused row, so
        // the pivot row only has entries from `col` on.
        let pivot = (0..n)
            .filter(|&r| !used[r] && rows[r].contains_key(&col))
            .min_by_key(|&r| rows[r].len())?;
        used[pivot] = true;
        pivot_of[col] = pivot;
        let prow = std::mem::take(&mut rows[pivot]);
        let pval = prow[&col].clone();
        let pb = rhs[pivot].clone();
        for r in 0..n {
            if used[r] {
                continue;
            }
            let Some(factor) = rows[r].get(&col).cloned() else { continue };
            let factor = factor / &pval;
            let row = &mut rows[r];
            for (&c, v) in &prow {
                let entry = row.entry(c).or_insert_with(Rational::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    row.remove(&c);
                }
            }
            rhs[r] -= &factor * &pb;
        }
        rows[pivot] = prow;
    }
    let mut x = vec![Rational::zero(); n];
    for col in (0..n).rev() {
        let row = &rows[pivot_of[col]];
        let mut acc = rhs[pivot_of[col]].clone();
        for (&c, v) in row.range(col + 1..) {
            acc -= v * &x[c];
        }
        x[col] = acc / &row[&col];
    }
    Some(x)
}

/// Stationary distribution of an irreducible generator given as sparse
/// outgoing rates, solved exactly.
pub(crate) fn stationary_exact(out: &[Vec<(usize, Rational)>]) -> Vec<Rational> {
    let n = out.len();
    if n == 1 {
        return vec![Rational::one()];
    }
    // Row j is the balance equation of state j: inflow minus outflow.
    let mut rows: Vec<SparseRow> = vec![SparseRow::new(); n];
    for (i, edges) in out.iter().enumerate() {
        for (j, rate) in edges {
            *rows[*j].entry(i).or_insert_with(Rational::zero) += rate;
            *rows[i].entry(i).or_insert_with(Rational::zero) -= rate;
        }
    }
    let mut rhs = vec![Rational::zero(); n];
    // One balance equation is redundant; replace it by normalization.
    rows[n - 1] = (0..n).map(|i| (i, Rational::one())).collect();
    rhs[n - 1] = Rational::one();
    solve_sparse(rows, rhs).expect("irreducible generator has a unique stationary distribution")
}

/// Float stationary distribution by Gauss-Seidel sweeps on the balance
/// equations. Returns the distribution and the max-norm residual of `πQ`.
pub(crate) fn stationary_float(out: &[Vec<(usize, f64)>], tolerance: f64, max_sweeps: usize) -> (Vec<f64>, f64) {
    let n = out.len();
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut exit = vec![0.0; n];
    for (i, edges) in out.iter().enumerate() {
        for &(j, rate) in edges {
            incoming[j].push((i, rate));
            exit[i] += rate;
        }
    }
    let mut pi = vec![1.0 / n as f64; n];
    let mut res = residual(&pi, &incoming, &exit);
    for _ in 0..max_sweeps {
        if res <= tolerance {
            break;
        }
        for j in 0..n {
            let inflow: f64 = incoming[j].iter().map(|&(i, r)| pi[i] * r).sum();
            pi[j] = inflow / exit[j];
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        res = residual(&pi, &incoming, &exit);
    }
    (pi, res)
}

/// Expected visit counts `v = entry + vP` of a transient block, by
/// Gauss-Seidel sweeps. `incoming[k]` lists `(i, P(i→k))`. Returns the
/// counts and the last max-norm update.
pub(crate) fn visits_float(
    incoming: &[Vec<(usize, f64)>],
    entry: &[f64],
    tolerance: f64,
    max_sweeps: usize,
) -> (Vec<f64>, f64) {
    let mut v = entry.to_vec();
    let mut change = f64::INFINITY;
    for _ in 0..max_sweeps {
        change = 0.0;
        for k in 0..v.len() {
            let next = entry[k] + incoming[k].iter().map(|&(i, p)| v[i] * p).sum::<f64>();
            change = change.max((next - v[k]).abs());
            v[k] = next;
        }
        if change <= tolerance {
            break;
        }
    }
    (v, change)
}

fn residual(pi: &[f64], incoming: &[Vec<(usize, f64)>], exit: &[f64]) -> f64 {
    (0..pi.len())
        .map(|j| {
            let inflow: f64 = incoming[j].iter().map(|&(i, r)| pi[i] * r).sum();
            (inflow - pi[j] * exit[j]).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn dense(a: &[Vec<i64>]) -> Vec<SparseRow> {
        a.iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(c, v)| (c, rat(*v, 1)))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn visits_of_a_two_state_loop() {
        // 0 → 1 with probability 1, 1 → 0 with probability 1/2.
        let (v, change) = visits_float(&[vec![(1, 0.5)], vec![(0, 1.0)]], &[1.0, 0.0], 1e-14, 10_000);
        assert!((v[0] - 2.0).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
        assert!(change <= 1e-14);
    }

    #[test]
    fn small_system() {
        let x = solve_sparse(dense(&[vec![2, 1], vec![1, 3]]), vec![int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        assert!(solve_sparse(dense(&[vec![1, 2], vec![2, 4]]), vec![int(1), int(2)]).is_none());
    }

    #[test]
    fn two_state_chain() {
        let out = vec![vec![(1, int(1))], vec![(0, int(3))]];
        assert_eq!(stationary_exact(&out), vec![rat(3, 4), rat(1, 4)]);
        let (pi, res) = stationary_float(&[vec![(1, 1.0)], vec![(0, 3.0)]], 1e-14, 1000);
        assert!((pi[0] - 0.75).abs() < 1e-12 && res < 1e-12);
    }

    proptest! {
        #[test]
        fn solution_satisfies_system(
            a in proptest::collection::vec(proptest::collection::vec(-4i64..5, 4), 4),
            b in proptest::collection::vec(-5i64..6, 4),
        ) {
            let rows = dense(&a);
            let rhs: Vec<Rational> = b.iter().map(|v| rat(*v, 1)).collect();
            if let Some(x) = solve_sparse(rows, rhs.clone()) {
                for (row, bi) in a.iter().zip(&rhs) {
                    let lhs = row.iter().zip(&x).fold(Rational::zero(), |acc, (v, xi)| acc + rat(*v, 1) * xi);
                    prop_assert_eq!(&lhs, bi);
                }
            }
        }
    }
}
