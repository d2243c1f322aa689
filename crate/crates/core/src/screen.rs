//! Floating-point LP screening with exact upper bounds.
//!
//! Solves `max c.x` subject to `A x <= b`, `x >= 0`, with integer `A`,
//! nonnegative integer `b` and rational `c = num / den`, in `f64`. The
//! approximate dual `y` is then rounded to a dyadic vector and turned into a
//! rigorous bound with integer arithmetic:
//!
//! `c.x <= y.b + sum_j max(0, c_j - (A^T y)_j) * u_j`
//!
//! for any `y >= 0` and column upper bounds `u`. The bound never
//! underestimates the true optimum, whatever rounding the float solve did.

use alloc::vec;
use alloc::vec::Vec;

/// Dual scaling: `y` is rounded to multiples of `2^-SCALE_BITS`.
const SCALE_BITS: u32 = 48;
const EPS: f64 = 1e-9;

/// A sparse LP with small integer data.
#[derive(Clone, Debug, Default)]
pub struct ScreenLp {
    pub num_cols: usize,
    /// Rows as `(column, coefficient)` lists.
    pub rows: Vec<Vec<(usize, i64)>>,
    pub rhs: Vec<i64>,
    /// Objective numerators over the common denominator `obj_den`.
    pub obj_num: Vec<i128>,
    pub obj_den: i128,
    /// Upper bound on every column that appears in some row; columns in no
    /// row are unbounded.
    pub col_bound: i64,
}

/// A certified upper bound `num / den` (`den > 0`) and the float estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScreenBound {
    pub estimate: f64,
    pub num: i128,
    pub den: i128,
}

impl ScreenBound {
    /// `bound <= p / q` for `q > 0`, decided exactly. `None` on overflow.
    pub fn at_most(&self, p: i128, q: i128) -> Option<bool> {
        Some(self.num.checked_mul(q)? <= p.checked_mul(self.den)?)
    }
}

fn fabs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

impl ScreenLp {
    /// `None` when the float solve reports unboundedness or the certificate
    /// overflows; the caller then has to solve exactly.
    pub fn bound(&self) -> Option<ScreenBound> {
        let m = self.rows.len();
        let n = self.num_cols;
        let width = n + m + 1;
        let mut t = vec![0.0f64; m * width];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                t[i * width + j] += a as f64;
            }
            t[i * width + n + i] = 1.0;
            t[i * width + n + m] = self.rhs[i] as f64;
        }
        let den = self.obj_den as f64;
        // Reduced costs z_j - c_j of the slack basis.
        let mut obj: Vec<f64> = self.obj_num.iter().map(|&c| -(c as f64) / den).collect();
        obj.resize(width, 0.0);
        let mut basis: Vec<usize> = (n..n + m).collect();

        // Bland's rule keeps the heavily degenerate rows from cycling.
        while let Some(s) = (0..n + m).find(|&j| obj[j] < -EPS) {
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = t[i * width + s];
                if a <= EPS {
                    continue;
                }
                let ratio = t[i * width + n + m] / a;
                let better = match best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < br - EPS || (fabs(ratio - br) <= EPS && basis[i] < basis[bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let (r, _) = best?;
            let piv = t[r * width + s];
            for x in &mut t[r * width..(r + 1) * width] {
                *x /= piv;
            }
            let (before, rest) = t.split_at_mut(r * width);
            let (prow, after) = rest.split_at_mut(width);
            for row in before.chunks_mut(width).chain(after.chunks_mut(width)) {
                let f = row[s];
                if f != 0.0 {
                    for (x, p) in row.iter_mut().zip(prow.iter()) {
                        *x -= f * p;
                    }
                }
            }
            let f = obj[s];
            for (x, p) in obj.iter_mut().zip(prow.iter()) {
                *x -= f * p;
            }
            basis[r] = s;
        }
        let estimate = obj[n + m];

        // Dual values sit in the slack columns of the objective row.
        let duals: Vec<f64> = (0..m).map(|i| obj[n + i].max(0.0)).collect();
        // Optimal duals are rationals with small denominators; recovering
        // them exactly makes the bound tight at ties.
        if let Some((y, q)) = rationalize(&duals) {
            if let Some(b) = self.certify(&y, q, estimate) {
                return Some(b);
            }
        }
        let scale = 1i128 << SCALE_BITS;
        let y: Vec<i128> = duals.iter().map(|v| (v * scale as f64) as i128).collect();
        self.certify(&y, scale, estimate)
    }

    /// Evaluates the weak-duality bound for the dual `y / q`.
    fn certify(&self, y: &[i128], q: i128, estimate: f64) -> Option<ScreenBound> {
        let n = self.num_cols;
        let mut aty = vec![0i128; n];
        let mut used = vec![false; n];
        let mut yb: i128 = 0;
        for ((row, &b), &yi) in self.rows.iter().zip(&self.rhs).zip(y) {
            for &(j, a) in row {
                used[j] = true;
                aty[j] = aty[j].checked_add(yi.checked_mul(a as i128)?)?;
            }
            yb = yb.checked_add(yi.checked_mul(b as i128)?)?;
        }
        // Everything below is scaled by den * q.
        let den = self.obj_den;
        let mut num = yb.checked_mul(den)?;
        for j in 0..n {
            let c = self.obj_num[j].checked_mul(q)?;
            let slack = c.checked_sub(aty[j].checked_mul(den)?)?;
            if slack > 0 {
                if !used[j] {
                    return None;
                }
                num = num.checked_add(slack.checked_mul(self.col_bound as i128)?)?;
            }
        }
        Some(ScreenBound {
            estimate,
            num,
            den: den.checked_mul(q)?,
        })
    }
}

const MAX_DENOM: i128 = 1 << 20;
const MAX_COMMON: i128 = 1 << 40;

/// Common-denominator form `(y_i * q, q)` of the closest small-denominator
/// rationals, if every entry has one within float noise.
fn rationalize(values: &[f64]) -> Option<(Vec<i128>, i128)> {
    let parts: Vec<(i128, i128)> = values
        .iter()
        .map(|&v| {
            if v == 0.0 {
                Some((0, 1))
            } else {
                best_rational(v)
            }
        })
        .collect::<Option<_>>()?;
    let mut q: i128 = 1;
    for &(_, d) in &parts {
        q = q / gcd(q, d) * d;
        if q > MAX_COMMON {
            return None;
        }
    }
    Some((parts.iter().map(|&(a, d)| a * (q / d)).collect(), q))
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Continued-fraction convergent of a nonnegative `v` with denominator at
/// most `MAX_DENOM` lying within `1e-9` of it.
fn best_rational(v: f64) -> Option<(i128, i128)> {
    if !(0.0..1e12).contains(&v) {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut x = v;
    for _ in 0..64 {
        let a = x as i128;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > MAX_DENOM {
            return None;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if fabs(p1 as f64 / q1 as f64 - v) <= 1e-9 {
            return Some((p1, q1));
        }
        let frac = x - a as f64;
        if frac <= 0.0 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}
