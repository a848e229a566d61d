//! Derivative-free one-dimensional maximisation.

/// `1 / golden ratio`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

/// Keeps the better of two points, preferring the smaller `x` on ties.
fn better(a: Maximum, b: Maximum) -> Maximum {
    if b.value > a.value || (b.value == a.value && b.x < a.x) {
        b
    } else {
        a
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, stopping
/// when the bracket is narrower than `width`. Returns the best evaluated
/// point.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, width: f64) -> Maximum {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = better(Maximum { x: c, value: fc }, Maximum { x: d, value: fd });
    while b - a > width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            best = better(best, Maximum { x: c, value: fc });
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            best = better(best, Maximum { x: d, value: fd });
        }
    }
    best
}

/// Coarse scan on `n` evenly spaced points followed by golden-section
/// refinement on the bracket around the best scan point. Ties go to the
/// smaller `x`.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    n: usize,
    rel_width: f64,
) -> Maximum {
    assert!(
        n >= 2 && hi > lo,
        "grid needs n >= 2 points on a non-empty interval"
    );
    let step = (hi - lo) / (n - 1) as f64;
    let at = |i: usize| if i == n - 1 { hi } else { lo + step * i as f64 };
    let mut best_i = 0;
    let mut best = Maximum {
        x: lo,
        value: f(lo),
    };
    for i in 1..n {
        let x = at(i);
        let v = f(x);
        if v > best.value {
            best = Maximum { x, value: v };
            best_i = i;
        }
    }
    let a = at(best_i.saturating_sub(1));
    let b = at((best_i + 1).min(n - 1));
    let refined = golden_section_max(&mut f, a, b, rel_width * (hi - lo));
    if refined.value > best.value {
        refined
    } else {
        best
    }
}
