use crate::scalar::Real;

/// Minimum of `f` over `n` evenly spaced points on `[lo, hi]` (endpoints
/// included). Returns `(x, f(x))`.
pub fn grid_min<T: Real>(f: &impl Fn(T) -> T, lo: T, hi: T, n: usize) -> (T, T) {
    assert!(n >= 2, "grid needs at least two points");
    let step = (hi - lo) / T::lit((n - 1) as f64);
    (0..n)
        .map(|i| {
            let x = lo + step * T::lit(i as f64);
            (x, f(x))
        })
        .fold((lo, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Golden-section search on `[lo, hi]` until the bracket is narrower than
/// `tol`. Assumes `f` is unimodal on the bracket.
pub fn golden_section<T: Real>(f: &impl Fn(T) -> T, mut lo: T, mut hi: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let tol = tol.max(T::epsilon() * T::lit(4.0));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid search followed by golden-section refinement inside the grid cell
/// pair around the best point.
pub fn grid_then_golden<T: Real>(f: &impl Fn(T) -> T, lo: T, hi: T, n: usize, tol: T) -> (T, T) {
    let (x0, f0) = grid_min(f, lo, hi, n);
    let step = (hi - lo) / T::lit((n - 1) as f64);
    let (x1, f1) = golden_section(f, (x0 - step).max(lo), (x0 + step).min(hi), tol);
    if f1 <= f0 {
        (x1, f1)
    } else {
        (x0, f0)
    }
}
