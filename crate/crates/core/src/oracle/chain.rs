/// Transition matrix of the reflecting walk on `{1, ..., n}`; row `i` holds
/// the probabilities of moving from size `i + 1`.
pub fn walk_transition_matrix(n: usize) -> Vec<Vec<f64>> {
    assert!(n >= 2);
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        if i == 0 {
            row[1] = 1.0;
        } else if i == n - 1 {
            row[n - 2] = 1.0;
        } else {
            row[i - 1] = 0.5;
            row[i + 1] = 0.5;
        }
    }
    m
}

/// Stationary vector of the walk found numerically: power iteration of the
/// lazy chain `(I + P) / 2` from the uniform distribution. The walk itself
/// has period two, the lazy chain does not, and both share one fixed point.
///
/// Returns the vector and the number of iterations used.
pub fn stationary_by_power_iteration(n: usize, tol: f64, max_iter: usize) -> (Vec<f64>, usize) {
    let p = walk_transition_matrix(n);
    let mut pi = vec![1.0 / n as f64; n];
    for it in 1..=max_iter {
        let mut next = vec![0.0; n];
        for (i, row) in p.iter().enumerate() {
            next[i] += 0.5 * pi[i];
            for (j, &q) in row.iter().enumerate() {
                next[j] += 0.5 * pi[i] * q;
            }
        }
        let delta: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if delta < tol {
            return (pi, it);
        }
    }
    (pi, max_iter)
}
