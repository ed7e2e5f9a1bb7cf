//! One-dimensional maximization over a union of closed intervals: uniform
//! grid, then golden-section refinement in the winning cell.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Best {
    pub x: f64,
    pub value: f64,
}

/// Maximizes `f` over `intervals` (each `(lo, hi)` with `lo <= hi`), skipping
/// points rejected by `allowed`. `preferred` points are tried first and win
/// ties. Returns `None` when no allowed point exists on the grid.
pub(crate) fn maximize<F, A>(
    intervals: &[(f64, f64)],
    preferred: &[f64],
    grid_points: usize,
    tol: f64,
    f: F,
    allowed: A,
) -> Option<Best>
where
    F: Fn(f64) -> f64,
    A: Fn(f64) -> bool,
{
    let total: f64 = intervals.iter().map(|(lo, hi)| hi - lo).sum();
    let mut best: Option<Best> = None;
    let mut best_cell: Option<(f64, f64)> = None;
    let mut consider = |x: f64, cell: Option<(f64, f64)>, best: &mut Option<Best>| {
        if !allowed(x) {
            return;
        }
        let v = f(x);
        if !v.is_finite() {
            return;
        }
        let better = match best {
            None => true,
            Some(b) => v > b.value + 1e-12 * b.value.abs().max(1e-300),
        };
        if better {
            *best = Some(Best { x, value: v });
            best_cell = cell;
        }
    };

    for &p in preferred {
        if intervals.iter().any(|&(lo, hi)| p >= lo && p <= hi) {
            consider(p, None, &mut best);
        }
    }

    for &(lo, hi) in intervals {
        let len = hi - lo;
        let share = if total > 0.0 {
            ((grid_points as f64) * len / total).ceil() as usize
        } else {
            1
        };
        let n = share.max(2);
        let step = len / (n - 1) as f64;
        for i in 0..n {
            let x = if i + 1 == n { hi } else { lo + step * i as f64 };
            let cell = (
                (x - step).max(lo),
                (x + step).min(hi),
            );
            consider(x, Some(cell), &mut best);
        }
    }

    let grid_best = best?;
    let Some((a, b)) = best_cell else {
        return Some(grid_best);
    };
    match golden(a, b, tol, &f, &allowed) {
        Some(r) if r.value > grid_best.value => Some(r),
        _ => Some(grid_best),
    }
}

fn golden<F, A>(mut a: f64, mut b: f64, tol: f64, f: &F, allowed: &A) -> Option<Best>
where
    F: Fn(f64) -> f64,
    A: Fn(f64) -> bool,
{
    let eval = |x: f64| if allowed(x) { f(x) } else { f64::NEG_INFINITY };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
        iters += 1;
    }
    let (x, v) = if fc > fd { (c, fc) } else { (d, fd) };
    v.is_finite().then_some(Best { x, value: v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_peak() {
        let r = maximize(&[(0.0, 3.0)], &[], 50, 1e-12, |x| -(x - 1.2345).powi(2), |_| true).unwrap();
        assert!((r.x - 1.2345).abs() < 1e-6);
    }

    #[test]
    fn boundary_and_preferred() {
        let r = maximize(&[(0.0, 1.0), (2.0, 3.0)], &[], 10, 1e-12, |x| -x, |_| true).unwrap();
        assert_eq!(r.x, 0.0);
        let r = maximize(&[(0.0, 1.0)], &[0.5], 10, 1e-12, |_| 1.0, |_| true).unwrap();
        assert_eq!(r.x, 0.5);
    }

    #[test]
    fn respects_allowed() {
        let r = maximize(&[(0.0, 1.0)], &[], 101, 1e-12, |x| x, |x| x <= 0.5).unwrap();
        assert!(r.x <= 0.5 && r.x > 0.49);
        assert!(maximize(&[(0.0, 1.0)], &[], 11, 1e-12, |x| x, |_| false).is_none());
    }
}
