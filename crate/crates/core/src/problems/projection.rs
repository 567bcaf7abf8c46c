//! Euclidean projection onto the simplex intersected with a ball around the
//! uniform weights: `{ y >= 0, 1^T y = 1, ||y - 1/n||^2 <= r/n^2 }`.

use nalgebra::DVector;

use crate::core::Vector;

const SWEEP_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 10_000;
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Sort-based Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &Vector) -> Vector {
    let n = v.len();
    let mut u: Vec<f64> = v.iter().cloned().collect();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    DVector::from_iterator(n, v.iter().map(|&vi| (vi - theta).max(0.0)))
}

fn project_ball(v: &Vector, center: f64, radius: f64) -> Vector {
    let diff = v.add_scalar(-center);
    let norm = diff.norm();
    if norm <= radius {
        v.clone()
    } else {
        diff * (radius / norm) + DVector::from_element(v.len(), center)
    }
}

/// Result of the alternating projection; `converged` is false when the
/// sweep cap was reached, in which case the best feasible point found is
/// returned anyway.
#[derive(Debug, Clone)]
pub struct ProjectionOutcome {
    pub point: Vector,
    pub converged: bool,
    pub sweeps: usize,
}

/// Distance of `y` from feasibility: the largest of the worst negative
/// coordinate, the mass defect, and the Euclidean excess over the ball
/// radius.
pub fn feasibility_gap(y: &Vector, r: f64) -> f64 {
    let n = y.len() as f64;
    let neg: f64 = y.iter().fold(0.0f64, |m, &v| m.max(-v));
    let sum_gap = (y.sum() - 1.0).abs();
    let ball_gap = (y.add_scalar(-1.0 / n).norm() - r.sqrt() / n).max(0.0);
    neg.max(sum_gap).max(ball_gap)
}

/// Dykstra's alternating projection between the simplex and the ball.
/// Both sets are closed convex and share the point `1/n`, so the iteration
/// converges to the exact Euclidean projection of `v`.
pub fn project_pr(v: &Vector, r: f64, n: usize) -> ProjectionOutcome {
    assert!(r > 0.0, "radius must be positive");
    assert_eq!(v.len(), n, "dimension mismatch");
    let center = 1.0 / n as f64;
    let radius = r.sqrt() / n as f64;

    let mut x = v.clone();
    let mut p = DVector::zeros(n);
    let mut q = DVector::zeros(n);
    let mut prev = x.clone();
    for sweep in 1..=MAX_SWEEPS {
        let y = project_simplex(&(&x + &p));
        p += &x - &y;
        x = project_ball(&(&y + &q), center, radius);
        q += y - &x;
        let step = (&x - &prev).norm();
        if step < SWEEP_TOL {
            // snap exactly onto the simplex: the last half-step may sit
            // epsilon off; one final simplex projection keeps the output
            // feasible without moving it measurably
            let out = finalize(&x, center, radius);
            return ProjectionOutcome {
                point: out,
                converged: true,
                sweeps: sweep,
            };
        }
        prev = x.clone();
    }
    let out = finalize(&x, center, radius);
    ProjectionOutcome {
        point: out,
        converged: false,
        sweeps: MAX_SWEEPS,
    }
}

// Exact finisher. The projection onto the intersection solves
// `y(t) = P_simplex(t v + (1-t) u)` at the largest `t` in (0, 1] keeping
// `||y(t) - u|| <= radius` (scalarized KKT: the ball multiplier folds `v`
// toward the center `u`, which itself lies in the simplex). `||y(t) - u||`
// is nondecreasing in `t`, so a bisection that keeps the feasible side
// lands on a point that is exactly on the simplex and strictly inside the
// ball. Dykstra's limit is the same point; this step removes its slow
// feasibility tail when the two boundaries meet tangentially.
fn finalize(v: &Vector, center: f64, radius: f64) -> Vector {
    let n = v.len();
    let u = DVector::from_element(n, center);
    let direct = project_simplex(v);
    if (&direct - &u).norm() <= radius {
        return direct;
    }
    let mut t_lo = 0.0f64; // y(0) = u, feasible
    let mut t_hi = 1.0f64;
    for _ in 0..80 {
        let t = 0.5 * (t_lo + t_hi);
        let y = project_simplex(&(v * t + &u * (1.0 - t)));
        if (&y - &u).norm() <= radius {
            t_lo = t;
        } else {
            t_hi = t;
        }
    }
    project_simplex(&(v * t_lo + &u * (1.0 - t_lo)))
}
