//! One-dimensional maximisation by golden-section search.

use crate::scalar::Real;

/// Maximise a unimodal `objective` on `[lo, hi]`, shrinking the bracket until
/// it is narrower than `tol`. The endpoints are also evaluated, so monotone
/// objectives return the exact bound.
pub fn golden_section_max<T: Real>(objective: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> T {
    assert!(lo <= hi, "empty bracket");
    // 1/φ
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let mid = (a + b) / T::lit(2.0);
    let candidates = [(mid, objective(mid)), (lo, objective(lo)), (hi, objective(hi))];
    let mut best = candidates[0];
    for cand in &candidates[1..] {
        if cand.1 > best.1 {
            best = *cand;
        }
    }
    best.0
}
