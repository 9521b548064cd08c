//! Scalar bracketing: bisection for monotone predicates and golden-section minimization.

/// Bracket `[lo, hi]` with `pred(lo)` true and `pred(hi)` false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Shrinks a bracket of a monotone predicate (true below the switch point,
/// false above) until its width is at most `tol`.
pub fn bisect<E, P>(mut pred: P, mut lo: f64, mut hi: f64, tol: f64) -> Result<Bracket, E>
where
    P: FnMut(f64) -> Result<bool, E>,
{
    debug_assert!(lo <= hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bracket { lo, hi })
}

/// Golden-section search for a minimum of `f` on `[a, b]`. Returns `(x, f(x))`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_switch_point() {
        let b = bisect(|x| Ok::<_, ()>(x * x < 2.0), 0.0, 2.0, 1e-12).unwrap();
        assert!(b.width() <= 1e-12);
        assert!(b.lo * b.lo < 2.0 && b.hi * b.hi >= 2.0);
    }

    #[test]
    fn bisect_handles_step() {
        let b = bisect(|x| Ok::<_, ()>(x < 0.3), 0.0, 1.0, 1e-4).unwrap();
        assert!(b.lo < 0.3 && b.hi >= 0.3 && b.width() <= 1e-4);
    }

    #[test]
    fn bisect_propagates_errors() {
        let r = bisect(|x| if x > 0.7 { Err("boom") } else { Ok(true) }, 0.0, 1.0, 1e-6);
        assert_eq!(r, Err("boom"));
    }

    #[test]
    fn golden_section_quadratic() {
        let (x, fx) = golden_section(|x| (x - 1.234).powi(2) + 0.5, -3.0, 4.0, 1e-9);
        assert!((x - 1.234).abs() < 1e-8);
        assert!((fx - 0.5).abs() < 1e-15);
    }

    #[test]
    fn golden_section_boundary_minimum() {
        let (x, _) = golden_section(|x| x, 2.0, 3.0, 1e-10);
        assert!((x - 2.0).abs() < 1e-9);
    }
}
