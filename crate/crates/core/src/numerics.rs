//! One-dimensional search helpers used by the scans and validation checks.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
///
/// Returns `(x, f(x))` once the bracket is narrower than `tol`.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd { (c, fc) } else { (d, fd) }
}

/// Samples `n` evenly spaced points on `[lo, hi]`, then refines the best one
/// by golden section within its neighbouring samples.
pub fn grid_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, n: usize, tol: f64) -> (f64, f64) {
    let n = n.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let (mut best, mut fbest) = (0, f64::NEG_INFINITY);
    for i in 0..n {
        let v = f(lo + h * i as f64);
        if v > fbest {
            best = i;
            fbest = v;
        }
    }
    let a = lo + h * best.saturating_sub(1) as f64;
    let b = lo + h * (best + 1).min(n - 1) as f64;
    let (x, fx) = golden_max(&mut f, a, b, tol);
    if fx >= fbest { (x, fx) } else { (lo + h * best as f64, fbest) }
}

/// Minimum of `f` on `[lo, hi]` by the same scheme as [`grid_max`].
pub fn grid_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, n: usize, tol: f64) -> (f64, f64) {
    let (x, fx) = grid_max(|x| -f(x), lo, hi, n, tol);
    (x, -fx)
}

/// Bisection root of `f` on a sign-changing bracket `[a, b]`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Points spaced evenly in value (`log = false`) or in logarithm.
pub fn spaced(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = if log { (lo.ln(), hi.ln()) } else { (lo, hi) };
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            _ => {
                let t = a + (b - a) * i as f64 / (n - 1) as f64;
                if log { t.exp() } else { t }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_top() {
        let (x, fx) = golden_max(|x| -(x - 0.3).powi(2) + 2.0, -1.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_picks_global_peak() {
        let f = |x: f64| (-(x - 3.0).powi(2)).exp() + 0.5 * (-(x + 2.0).powi(2)).exp();
        let (x, _) = grid_max(f, -5.0, 5.0, 101, 1e-12);
        assert!((x - 3.0).abs() < 1e-5);
        let (m, _) = grid_min(|x| (x - 1.0).powi(2), -2.0, 2.0, 11, 1e-12);
        assert!((m - 1.0).abs() < 1e-5);
    }

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9).is_none());
    }

    #[test]
    fn spacing_hits_endpoints() {
        let v = spaced(0.1, 1000.0, 5, true);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[4], 1000.0);
        assert!((v[2] - 10.0).abs() < 1e-12);
        assert_eq!(spaced(-1.0, 1.0, 3, false), vec![-1.0, 0.0, 1.0]);
    }
}
