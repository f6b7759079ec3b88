/// Number of interior local maxima of a sampled profile. Steps no larger
/// than `flat_tol` count as flat, so a plateau between a rise and a fall is
/// one maximum and rounding ripple on a plateau is none.
pub fn count_interior_maxima(f: &[f64], flat_tol: f64) -> usize {
    let signs: Vec<i8> = f
        .windows(2)
        .filter_map(|w| {
            let d = w[1] - w[0];
            if d > flat_tol {
                Some(1)
            } else if d < -flat_tol {
                Some(-1)
            } else {
                None
            }
        })
        .collect();
    signs.windows(2).filter(|s| s[0] == 1 && s[1] == -1).count()
}

/// Number of sign changes between consecutive nonzero values.
pub fn sign_changes(u: &[f64]) -> usize {
    let nonzero: Vec<f64> = u.iter().copied().filter(|x| *x != 0.0).collect();
    nonzero
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count()
}
