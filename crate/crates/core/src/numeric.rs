//! Tolerance helpers: absolute for values near zero, relative above one.

/// `lhs <= rhs` up to `tol * max(1, |lhs|, |rhs|)`.
pub fn approx_leq(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs <= rhs + tol * lhs.abs().max(rhs.abs()).max(1.0)
}

/// `|a - b|` within `tol * max(1, |a|, |b|)`.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
