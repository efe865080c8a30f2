//! Scalar numerics shared across modules: quadrature, bracketing root
//! finders, golden-section minimisation and output formatting.

use crate::error::{numeric, Result};

/// Composite Simpson rule with `panels` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(2);
    let panels = panels + panels % 2;
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let x = a + h * i as f64;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    acc * h / 3.0
}

/// Bisection on a bracket `[lo, hi]` whose endpoint values have opposite
/// signs (a zero at either end is accepted). Stops once the bracket is
/// narrower than `tol`.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let mut f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(numeric(format!(
            "bisection bracket [{lo}, {hi}] does not straddle a root"
        )));
    }
    // 200 halvings exhaust any finite double bracket
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of a strictly decreasing function. The initial bracket is widened
/// geometrically about its midpoint until it straddles the root.
pub fn decreasing_root<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_expansions: usize,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut expansions = 0;
    loop {
        let f_lo = f(lo)?;
        let f_hi = f(hi)?;
        if f_lo >= 0.0 && f_hi <= 0.0 {
            return bisect(&mut f, lo, hi, tol);
        }
        if expansions == max_expansions {
            return Err(numeric(format!(
                "no sign change in [{lo}, {hi}] after {max_expansions} expansions"
            )));
        }
        let width = (hi - lo).max(1.0);
        if f_lo < 0.0 {
            lo -= width;
        }
        if f_hi > 0.0 {
            hi += width;
        }
        expansions += 1;
    }
}

/// Result of a one-dimensional minimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for the minimum of a unimodal function on
/// `[a, b]`, stopping when the bracket is narrower than `tol`.
pub fn golden_section<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_steps: usize,
) -> Result<Minimum> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..max_steps {
        if (b - a).abs() <= tol {
            let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
            return Ok(Minimum { x, value });
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Err(numeric(format!(
        "golden-section search did not converge in {max_steps} steps"
    )))
}

/// Minimise a convex function over the real line: walk downhill from 0 with
/// doubling steps until the function turns up, then refine by golden
/// section. Fails if the walk leaves `[-limit, limit]`.
pub fn convex_minimum<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    limit: f64,
    tol: f64,
    max_steps: usize,
) -> Result<Minimum> {
    let f0 = f(0.0)?;
    let f_plus = f(1.0)?;
    let f_minus = f(-1.0)?;
    let (lo, hi) = if f_plus >= f0 && f_minus >= f0 {
        (-1.0, 1.0)
    } else {
        let dir: f64 = if f_plus < f_minus { 1.0 } else { -1.0 };
        let (mut prev, mut cur): (f64, f64) = (0.0, dir);
        let mut f_cur = if dir > 0.0 { f_plus } else { f_minus };
        let mut step = 1.0;
        loop {
            step *= 2.0;
            let next = cur + dir * step;
            if next.abs() > limit {
                return Err(numeric(format!(
                    "minimiser escaped the search range [-{limit}, {limit}]"
                )));
            }
            let f_next = f(next)?;
            if f_next >= f_cur {
                break (prev.min(next), prev.max(next));
            }
            prev = cur;
            cur = next;
            f_cur = f_next;
        }
    };
    golden_section(f, lo, hi, tol, max_steps)
}

/// Formats a float with 15 significant digits, printed in positional form.
pub fn fmt15(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    format!("{rounded}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn decreasing_root_expands() {
        let r = decreasing_root(|x| Ok(100.0 - x), -1.0, 1.0, 1e-12, 60).unwrap();
        assert!((r - 100.0).abs() < 1e-9);
    }

    #[test]
    fn convex_minimum_of_shifted_parabola() {
        let m = convex_minimum(|x| Ok((x - 7.3).powi(2) + 1.0), 1e3, 1e-10, 200).unwrap();
        assert!((m.x - 7.3).abs() < 1e-6);
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fmt15_digits() {
        assert_eq!(fmt15(0.481211825059603447), "0.481211825059603");
        assert_eq!(fmt15(2.0), "2");
    }
}
