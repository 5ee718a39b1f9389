/// Modulation factor `F_N(r) = min{1, N/r}`.
///
/// `r = 0` returns 1. For every `r ≥ 0`, `0 ≤ r·F_N(r) ≤ N` up to one
/// rounding of the quotient.
pub fn f_n_factor(r: f64, n_cap: f64) -> f64 {
    debug_assert!(r >= 0.0 && n_cap > 0.0);
    if r <= n_cap {
        1.0
    } else {
        n_cap / r
    }
}
