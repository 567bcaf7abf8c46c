//! Closed-form covariance polynomials.
//!
//! Each entry of the stationary covariance blocks is a rational function of
//! the momentum `theta` and the per-eigenvalue condition ratio
//! `kappa = lambda / sqrt(mu_x mu_y)`, with common denominator
//! `P_c(theta, kappa)`. The tables below store every polynomial as a sum of
//! terms `kappa^j * (1 - theta)^m * p(theta)`, transcribed coefficient by
//! coefficient; they are cross-checked against the numeric Lyapunov solver in
//! the test suite and are never re-derived symbolically here.

/// One monomial group: `kappa^kappa_pow * (1-theta)^gap_pow * p(theta)`,
/// with `p` given by ascending coefficients.
pub struct PolyTerm {
    pub kappa_pow: u32,
    pub gap_pow: u32,
    pub theta_coeffs: &'static [f64],
}

pub struct CovPoly(pub &'static [PolyTerm]);

impl CovPoly {
    pub fn eval(&self, theta: f64, kappa: f64) -> f64 {
        let gap = 1.0 - theta;
        self.0
            .iter()
            .map(|t| {
                let p: f64 = t
                    .theta_coeffs
                    .iter()
                    .rev()
                    .fold(0.0, |acc, &c| acc * theta + c);
                kappa.powi(t.kappa_pow as i32) * gap.powi(t.gap_pow as i32) * p
            })
            .sum()
    }
}

// -- blocks of the (x_{n-1}, y_n) limit -------------------------------------

pub static P_TILDE_11_1: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 2, gap_pow: 0, theta_coeffs: &[0.0, 0.0, -4.0, -8.0, -4.0] },
    PolyTerm { kappa_pow: 4, gap_pow: 0, theta_coeffs: &[1.0, 2.0, -1.0, -8.0, -9.0, 6.0, 1.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 2, theta_coeffs: &[0.0, 1.0, 4.0, 4.0, 0.0, -1.0] },
]);

pub static P_TILDE_11_2: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 2, gap_pow: 0, theta_coeffs: &[0.0, 0.0, -4.0, -8.0, 4.0, 8.0, -8.0] },
    PolyTerm { kappa_pow: 4, gap_pow: 2, theta_coeffs: &[1.0, 4.0, 4.0, -6.0, -11.0, 2.0, 2.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 4, theta_coeffs: &[0.0, 1.0, 4.0, 5.0, 2.0] },
]);

pub static P_TILDE_12_1: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 4, gap_pow: 0, theta_coeffs: &[0.0, 0.0, -4.0, -8.0, 0.0, 4.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 1, theta_coeffs: &[1.0, 3.0, 1.0, -8.0, -11.0, 1.0, 1.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 3, theta_coeffs: &[0.0, 1.0, 4.0, 5.0, 2.0] },
]);

pub static P_TILDE_12_2: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 2, gap_pow: 0, theta_coeffs: &[0.0, 0.0, 0.0, 0.0, 4.0, 8.0, 0.0, -4.0] },
    PolyTerm { kappa_pow: 4, gap_pow: 1, theta_coeffs: &[0.0, 0.0, -5.0, -15.0, -5.0, 20.0, 11.0, -9.0, -1.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 3, theta_coeffs: &[1.0, 5.0, 8.0, -3.0, -21.0, -14.0, 2.0, 2.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 5, theta_coeffs: &[0.0, 1.0, 5.0, 9.0, 7.0, 2.0] },
]);

pub static P_TILDE_22_1: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 6, gap_pow: 0, theta_coeffs: &[0.0, 0.0, -4.0, -8.0, 4.0, 8.0, -8.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 2, theta_coeffs: &[1.0, 4.0, 4.0, -6.0, -11.0, 2.0, 2.0] },
    PolyTerm { kappa_pow: 10, gap_pow: 4, theta_coeffs: &[0.0, 1.0, 4.0, 5.0, 2.0] },
]);

pub static P_TILDE_22_2: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 2, gap_pow: 0, theta_coeffs: &[0.0, 0.0, -4.0, -16.0, -20.0, 0.0, 16.0, 8.0] },
    PolyTerm { kappa_pow: 4, gap_pow: 0, theta_coeffs: &[1.0, 4.0, 3.0, -20.0, -45.0, -2.0, 53.0, 20.0, -20.0, -2.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 2, theta_coeffs: &[0.0, 3.0, 14.0, 20.0, -8.0, -47.0, -30.0, 4.0, 4.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 4, theta_coeffs: &[0.0, 0.0, 2.0, 10.0, 18.0, 14.0, 4.0] },
]);

// -- blocks of the (x_n, y_n) limit -----------------------------------------

pub static P_INF_11_1: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 2, gap_pow: 0, theta_coeffs: &[0.0, 0.0, 0.0, 0.0, -4.0, -8.0, -4.0] },
    PolyTerm { kappa_pow: 4, gap_pow: 0, theta_coeffs: &[0.0, 0.0, 1.0, 10.0, 7.0, -24.0, -17.0, 14.0, 1.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 2, theta_coeffs: &[0.0, -2.0, -10.0, -9.0, 24.0, 34.0, -10.0, -3.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 4, theta_coeffs: &[1.0, 4.0, 2.0, -14.0, -21.0, -2.0, 2.0] },
    PolyTerm { kappa_pow: 10, gap_pow: 6, theta_coeffs: &[0.0, 1.0, 4.0, 5.0, 2.0] },
]);

pub static P_INF_11_2: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 2, gap_pow: 0, theta_coeffs: &[0.0, 0.0, -4.0, -8.0, 4.0, 8.0, -8.0] },
    PolyTerm { kappa_pow: 4, gap_pow: 2, theta_coeffs: &[1.0, 4.0, 4.0, -6.0, -11.0, 2.0, 2.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 4, theta_coeffs: &[0.0, 1.0, 4.0, 5.0, 2.0] },
]);

// The off-diagonal tables below are the exact expansion of
// `theta P~_12^(k) - (1-theta) P~_22^(k)`, the coefficient of `lambda/mu_x`
// in the one-step change of variables. (The circulated table carries an
// extra factor `theta` on its second term there, which contradicts both the
// transform's own diagonal entry and the numeric Lyapunov solution; these
// corrected coefficients are what the cross-check validates.)
pub static P_INF_12_1: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 4, gap_pow: 0, theta_coeffs: &[0.0, 0.0, 0.0, -4.0, -8.0, 0.0, 4.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 1, theta_coeffs: &[0.0, 1.0, 7.0, 9.0, -12.0, -19.0, 9.0, 1.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 3, theta_coeffs: &[-1.0, -4.0, -3.0, 10.0, 16.0, 0.0, -2.0] },
    PolyTerm { kappa_pow: 10, gap_pow: 5, theta_coeffs: &[0.0, -1.0, -4.0, -5.0, -2.0] },
]);

pub static P_INF_12_2: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 2, gap_pow: 0, theta_coeffs: &[0.0, 0.0, 4.0, 12.0, 4.0, -16.0, -8.0, 8.0, 4.0] },
    PolyTerm { kappa_pow: 4, gap_pow: 1, theta_coeffs: &[-1.0, -4.0, -3.0, 15.0, 30.0, -3.0, -33.0, -9.0, 11.0, 1.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 3, theta_coeffs: &[0.0, -2.0, -9.0, -12.0, 5.0, 26.0, 16.0, -2.0, -2.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 5, theta_coeffs: &[0.0, 0.0, -1.0, -5.0, -9.0, -7.0, -2.0] },
]);

pub static P_INF_22_1: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 6, gap_pow: 0, theta_coeffs: &[0.0, 0.0, -4.0, -8.0, 4.0, 8.0, -8.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 2, theta_coeffs: &[1.0, 4.0, 4.0, -6.0, -11.0, 2.0, 2.0] },
    PolyTerm { kappa_pow: 10, gap_pow: 4, theta_coeffs: &[0.0, 1.0, 4.0, 5.0, 2.0] },
]);

pub static P_INF_22_2: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 2, gap_pow: 0, theta_coeffs: &[0.0, 0.0, -4.0, -16.0, -20.0, 0.0, 16.0, 8.0] },
    PolyTerm { kappa_pow: 4, gap_pow: 0, theta_coeffs: &[1.0, 4.0, 3.0, -20.0, -45.0, -2.0, 53.0, 20.0, -20.0, -2.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 2, theta_coeffs: &[0.0, 3.0, 14.0, 20.0, -8.0, -47.0, -30.0, 4.0, 4.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 4, theta_coeffs: &[0.0, 0.0, 2.0, 10.0, 18.0, 14.0, 4.0] },
]);

/// Common denominator. Also satisfies
/// `(nu1 - nu2)^2 (1 - nu1^2)(1 - nu2^2)(1 - nu1 nu2) = (1-theta)^5 P_c`.
pub static P_C: CovPoly = CovPoly(&[
    PolyTerm { kappa_pow: 2, gap_pow: 0, theta_coeffs: &[0.0, 0.0, -4.0, -12.0, -12.0, -4.0] },
    PolyTerm { kappa_pow: 4, gap_pow: 0, theta_coeffs: &[1.0, 3.0, 1.0, -17.0, -33.0, -3.0, 15.0, 1.0] },
    PolyTerm { kappa_pow: 6, gap_pow: 1, theta_coeffs: &[0.0, 3.0, 14.0, 13.0, -24.0, -35.0, 10.0, 3.0] },
    PolyTerm { kappa_pow: 8, gap_pow: 3, theta_coeffs: &[-1.0, -4.0, -2.0, 14.0, 21.0, 2.0, -2.0] },
    PolyTerm { kappa_pow: 10, gap_pow: 5, theta_coeffs: &[0.0, -1.0, -4.0, -5.0, -2.0] },
]);

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_matches_direct_expansion() {
        // P_c at theta = 0 is kappa^4 - kappa^8 (only the theta^0 terms survive)
        let k: f64 = 1.3;
        assert_relative_eq!(P_C.eval(0.0, k), k.powi(4) - k.powi(8), max_relative = 1e-14);
    }

    #[test]
    fn p22_blocks_are_shared_between_limits() {
        // the y-marginal is unchanged by the one-step map, so the (2,2)
        // polynomials of both limits coincide
        for &(theta, kappa) in &[(0.7, 0.5), (0.9, 2.0), (0.99, 5.0)] {
            assert_eq!(
                P_TILDE_22_1.eval(theta, kappa),
                P_INF_22_1.eval(theta, kappa)
            );
            assert_eq!(
                P_TILDE_22_2.eval(theta, kappa),
                P_INF_22_2.eval(theta, kappa)
            );
        }
    }

    #[test]
    fn momentum_transform_links_the_two_tables() {
        // P_inf_12^(k) = theta P_tilde_12^(k) - (1-theta) P_tilde_22^(k)
        // P_inf_11^(k) = theta^2 P_tilde_11^(k) - 2 theta (1-theta) P_tilde_12^(k)
        //               + (1-theta)^2 P_tilde_22^(k)
        for &theta in &[0.55, 0.8, 0.97] {
            for &kappa in &[0.3, 1.0, 4.0] {
                let g = 1.0 - theta;
                for (inf, t12, t22) in [
                    (&P_INF_12_1, &P_TILDE_12_1, &P_TILDE_22_1),
                    (&P_INF_12_2, &P_TILDE_12_2, &P_TILDE_22_2),
                ] {
                    let lhs = inf.eval(theta, kappa);
                    let rhs = theta * t12.eval(theta, kappa) - g * t22.eval(theta, kappa);
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-11, epsilon = 1e-11);
                }
                for (inf, t11, t12, t22) in [
                    (&P_INF_11_1, &P_TILDE_11_1, &P_TILDE_12_1, &P_TILDE_22_1),
                    (&P_INF_11_2, &P_TILDE_11_2, &P_TILDE_12_2, &P_TILDE_22_2),
                ] {
                    let lhs = inf.eval(theta, kappa);
                    let rhs = theta * theta * t11.eval(theta, kappa)
                        - 2.0 * theta * g * t12.eval(theta, kappa)
                        + g * g * t22.eval(theta, kappa);
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-11, epsilon = 1e-11);
                }
            }
        }
    }
}
