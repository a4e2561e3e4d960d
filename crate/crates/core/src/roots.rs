//! Bracketed root finding for monotone functions.

/// How to seed the search for a root.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Start {
    /// Search the whole domain.
    Cold,
    /// Expand geometrically outward from a previous solution.
    Hint { at: f64, step: f64 },
    /// A bracket believed to contain the root; verified before use.
    Bracket(f64, f64),
}

/// Outcome of [`find_root`]: a bracket `[left, right]` around the root with
/// `right - left <= tol` unless the evaluation budget ran out.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Switch {
    pub left: f64,
    pub right: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    pub evaluations: usize,
}

/// Finds the zero of a continuous, strictly decreasing `f` on `[lo, hi]`.
///
/// Requires `f(lo) > 0 >= f(hi)`. Uses regula falsi with the Illinois
/// correction, falling back to bisection when the bracket stops halving.
/// The returned `left` has `f > 0` (or is `lo`) and `right` has `f <= 0`
/// (or is `hi`).
pub(crate) fn find_root<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    start: Start,
    tol: f64,
    max_evaluations: usize,
) -> Switch
where
    F: FnMut(f64) -> f64,
{
    let mut evaluations = 0usize;
    let mut eval = |z: f64, evaluations: &mut usize| {
        *evaluations += 1;
        f(z)
    };
    // Function values at the bracket ends; None until evaluated.
    let (mut left, mut right) = (lo, hi);
    let (mut f_left, mut f_right): (Option<f64>, Option<f64>) = (None, None);

    match start {
        Start::Cold => {}
        Start::Bracket(l, r) => {
            let l = l.clamp(lo, hi);
            let r = r.clamp(lo, hi);
            if l < r {
                let fl = eval(l, &mut evaluations);
                let fr = eval(r, &mut evaluations);
                if fl > 0.0 && fr <= 0.0 {
                    left = l;
                    right = r;
                    f_left = Some(fl);
                    f_right = Some(fr);
                }
            }
        }
        Start::Hint { at, step } => {
            let at = at.clamp(lo, hi);
            let mut step = step.max(tol);
            if at > lo && at < hi {
                let fa = eval(at, &mut evaluations);
                if fa > 0.0 {
                    left = at;
                    f_left = Some(fa);
                    loop {
                        let probe = left + step;
                        if probe >= right {
                            break;
                        }
                        let fp = eval(probe, &mut evaluations);
                        if fp > 0.0 {
                            left = probe;
                            f_left = Some(fp);
                            step *= 4.0;
                        } else {
                            right = probe;
                            f_right = Some(fp);
                            break;
                        }
                    }
                } else {
                    right = at;
                    f_right = Some(fa);
                    loop {
                        let probe = right - step;
                        if probe <= left {
                            break;
                        }
                        let fp = eval(probe, &mut evaluations);
                        if fp > 0.0 {
                            left = probe;
                            f_left = Some(fp);
                            break;
                        } else {
                            right = probe;
                            f_right = Some(fp);
                            step *= 4.0;
                        }
                    }
                }
            }
        }
    }

    let mut fl = match f_left {
        Some(v) => v,
        None => eval(left, &mut evaluations),
    };
    let mut fr = match f_right {
        Some(v) => v,
        None => eval(right, &mut evaluations),
    };
    // The caller's sign contract can fail at the ends only through rounding;
    // plain bisection copes with that.
    let mut secant_ok = fl > 0.0 && fr <= 0.0 && fl.is_finite() && fr.is_finite();
    let mut last_side = 0i8;
    let mut width_before = right - left;
    let mut stalled = 0u8;

    while right - left > tol && evaluations < max_evaluations {
        let width = right - left;
        let mut z = if secant_ok {
            left + fl * width / (fl - fr)
        } else {
            left + 0.5 * width
        };
        let margin = 0.25 * tol.min(0.5 * width);
        z = z.clamp(left + margin, right - margin);
        if z <= left || z >= right {
            break;
        }
        let fz = eval(z, &mut evaluations);
        if !fz.is_finite() {
            secant_ok = false;
        }
        if fz > 0.0 {
            left = z;
            fl = fz;
            if last_side == -1 {
                fr *= 0.5;
            }
            last_side = -1;
        } else {
            right = z;
            fr = fz;
            if last_side == 1 {
                fl *= 0.5;
            }
            last_side = 1;
        }
        if right - left > 0.5 * width_before {
            stalled += 1;
        } else {
            width_before = right - left;
            stalled = 0;
        }
        if stalled >= 3 {
            // One bisection step, then resume the secant iteration.
            let mid = left + 0.5 * (right - left);
            if mid > left && mid < right {
                let fm = eval(mid, &mut evaluations);
                if fm > 0.0 {
                    left = mid;
                    fl = fm;
                } else {
                    right = mid;
                    fr = fm;
                }
            }
            width_before = right - left;
            stalled = 0;
            last_side = 0;
        }
    }

    Switch {
        left,
        right,
        evaluations,
    }
}
