//! One-parameter power model `G(d_u; θ) = skeleton[u]^exp(θ)` fitted by
//! bounded maximum likelihood.

use crate::designs::optimize::golden_section_max;
use crate::scalar::{argmin_by, Real};

/// Absolute tolerance on θ for the likelihood search.
pub const THETA_TOL: f64 = 1e-8;

pub fn power_rate<T: Real>(skeleton_rate: T, theta: T) -> T {
    skeleton_rate.powf(theta.exp())
}

pub fn power_curve<T: Real>(skeleton: &[T], theta: T) -> Vec<T> {
    skeleton.iter().map(|&s| power_rate(s, theta)).collect()
}

/// Bernoulli log-likelihood of tallied data under the power model.
pub fn log_likelihood<T: Real>(skeleton: &[T], n: &[u64], tox: &[u64], theta: T) -> T {
    let e = theta.exp();
    let mut ll = T::zero();
    for ((&s, &n), &t) in skeleton.iter().zip(n).zip(tox) {
        if n == 0 {
            continue;
        }
        let log_g = e * s.ln();
        let tox = T::lit(t as f64);
        let safe = T::lit((n - t) as f64);
        if t > 0 {
            ll = ll + tox * log_g;
        }
        if n > t {
            // ln(1 - g) = ln(-expm1(ln g))
            ll = ll + safe * (-log_g.exp_m1()).ln();
        }
    }
    ll
}

/// MLE of θ on `[lo, hi]`. All-toxic data pins θ to `lo` (rates as high as
/// the model allows); toxicity-free data pins it to `hi`.
pub fn fit_theta<T: Real>(skeleton: &[T], n: &[u64], tox: &[u64], lo: T, hi: T) -> T {
    let total: u64 = n.iter().sum();
    let toxic: u64 = tox.iter().sum();
    if total == 0 {
        return T::zero().max(lo).min(hi);
    }
    if toxic == total {
        return lo;
    }
    if toxic == 0 {
        return hi;
    }
    golden_section_max(|th| log_likelihood(skeleton, n, tox, th), lo, hi, T::lit(THETA_TOL))
}

/// Level whose modelled rate `skeleton[u]^exp(theta)` is nearest `target`;
/// ties go low.
///
/// The curve is increasing, so only the two levels bracketing the crossing
/// are compared. Locating the crossing on the log scale keeps the answer
/// right when extreme `theta` drives every rate below `f64::MIN_POSITIVE`.
pub fn nearest_level<T: Real>(skeleton: &[T], theta: T, target: T) -> usize {
    assert!(!skeleton.is_empty(), "empty skeleton");
    let e = theta.exp();
    let log_target = target.ln();
    match skeleton.iter().position(|&s| e * s.ln() >= log_target) {
        None => skeleton.len() - 1,
        Some(0) => 0,
        Some(u) => {
            let below = power_rate(skeleton[u - 1], theta);
            let above = power_rate(skeleton[u], theta);
            if above - target < target - below {
                u
            } else {
                u - 1
            }
        }
    }
}

/// Plain first-minimum scan of `|curve[u] - target|`.
pub fn nearest_in_curve<T: Real>(curve: &[T], target: T) -> usize {
    argmin_by(curve.iter(), |&g| (g - target).abs()).expect("non-empty curve")
}
