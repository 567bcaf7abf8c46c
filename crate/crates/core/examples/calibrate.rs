//! Scans randomized admissible problem constants and reports the envelope
//! ratios that determine the universal-constant defaults. Run with
//! `cargo run -p sapd --example calibrate --release`.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sapd::certificates::{build_ledger, complexity_n, q_bound};
use sapd::params::{theta_thresholds, SapdParams, UniversalConstants};
use sapd::{Lipschitz, ProblemConstants};

fn norm_sq(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn main() {
    let mut rng = StdRng::seed_from_u64(20240915);
    let mut max_qx = (0.0f64, 0.0);
    let mut max_qy: Vec<(f64, f64)> = Vec::new(); // (L, ratio)
    let mut max_a1 = (0.0f64, 0.0);
    let mut max_a2 = 0.0f64;
    let mut max_a3 = (0.0f64, 0.0);
    let mut max_gx = (0.0f64, 0.0);
    let mut max_gy = (0.0f64, 0.0);
    let mut all_qx: Vec<(f64, f64)> = Vec::new();
    let mut all_a1: Vec<(f64, f64)> = Vec::new();
    let mut all_a3: Vec<(f64, f64)> = Vec::new();
    let mut all_gx: Vec<(f64, f64)> = Vec::new();
    let mut all_gy: Vec<(f64, f64)> = Vec::new();

    for trial in 0..40_000 {
        let mu_x = 10f64.powf(rng.gen_range(-2.0..2.0));
        let mu_y = 10f64.powf(rng.gen_range(-2.0..2.0));
        let l_ratio = 10f64.powf(rng.gen_range(-1.0..1.0));
        let l_yx = 10f64.powf(rng.gen_range(-1.0..2.0)) * (mu_x * mu_y).sqrt();
        let l_xy = l_ratio * l_yx;
        let l_xx = rng.gen_range(0.0..5.0) * mu_x;
        let l_yy = if trial % 3 == 0 {
            0.0
        } else {
            rng.gen_range(0.0..5.0) * mu_y
        };
        let c = ProblemConstants::new(
            mu_x,
            mu_y,
            Lipschitz {
                l_xx,
                l_xy,
                l_yx,
                l_yy,
            },
        );
        let thr = theta_thresholds(&c).unwrap();
        let theta_lo = 0.5f64.max(thr.theta1).max(thr.theta2);
        // sample theta in [theta_lo, 1), geometrically close to 1 sometimes
        let t = rng.gen_range(0.0..1.0f64);
        let theta = theta_lo + (1.0 - theta_lo) * (1.0 - 10f64.powf(-4.0 * t));
        let theta = theta.min(1.0 - 1e-9);
        let params = match SapdParams::chambolle_pock(theta, &c) {
            Ok(p) => p,
            Err(_) => continue,
        };
        if !params.is_certified() {
            eprintln!("skipping uncertified point at theta={theta} (lower bound {theta_lo})");
            continue;
        }
        let zx = nalgebra::DVector::zeros(1);
        let ledger = build_ledger(&c, &params, (1.0, 1.0), (&zx, &zx), (&zx, &zx)).unwrap();
        let g = 1.0 - theta;
        let l = l_xy / l_yx;
        let qx_ratio = ledger.q_x * mu_x / g;
        let qy_ratio = ledger.q_y * mu_y / g;
        let a1_ratio = norm_sq(&ledger.a1) * mu_x / g;
        let a2_ratio = norm_sq(&ledger.a2) * mu_y / g;
        let a3_ratio = norm_sq(&ledger.a3) * mu_y / g;
        let gx_ratio = ledger.gamma_x * mu_x / g;
        let gy_ratio = ledger.gamma_y * mu_y / g;
        if qx_ratio > max_qx.1 {
            max_qx = (l, qx_ratio);
        }
        max_qy.push((l, qy_ratio));
        all_qx.push((l, qx_ratio));
        all_a1.push((l, a1_ratio));
        all_a3.push((l, a3_ratio));
        all_gx.push((l, gx_ratio));
        all_gy.push((l, gy_ratio));
        if a1_ratio > max_a1.1 {
            max_a1 = (l, a1_ratio);
        }
        max_a2 = max_a2.max(a2_ratio);
        if a3_ratio > max_a3.1 {
            max_a3 = (l, a3_ratio);
        }
        if gx_ratio > max_gx.1 {
            max_gx = (l, gx_ratio);
        }
        if gy_ratio > max_gy.1 {
            max_gy = (l, gy_ratio);
        }
    }
    println!("max Qx mu/(1-t): {:?}", max_qx);
    println!("max A1 mu/(1-t): {:?}", max_a1);
    println!("max A2 mu/(1-t): {max_a2}");
    println!("max A3 mu/(1-t): {:?}", max_a3);
    println!("max gx mu/(1-t): {:?}", max_gx);
    println!("max gy mu/(1-t): {:?}", max_gy);
    // bucket every tracked ratio by L to see the polynomial shapes
    let bucket = |data: &[(f64, f64)], name: &str| {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for lo in [-1.0f64, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75] {
            let hi = lo + 0.25;
            let m = data
                .iter()
                .filter(|(l, _)| l.log10() >= lo && l.log10() < hi)
                .map(|(_, r)| *r)
                .fold(0.0f64, f64::max);
            out.push((10f64.powf(hi), m));
        }
        println!("max {name} by L bucket: {:?}", out);
    };
    bucket(&max_qy, "Qy");
    bucket(&all_qx, "Qx");
    bucket(&all_a1, "A1");
    bucket(&all_a3, "A3");
    bucket(&all_gx, "gx");
    bucket(&all_gy, "gy");

    // verify the accuracy conditions at the selected theta / n over a grid
    let u = UniversalConstants::default();
    let mut worst = [0.0f64; 4];
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..2000 {
        let mu_x = 10f64.powf(rng.gen_range(-1.0..1.0));
        let mu_y = 10f64.powf(rng.gen_range(-1.0..1.0));
        let l_ratio = 10f64.powf(rng.gen_range(-0.7..0.7));
        let l_yx = 10f64.powf(rng.gen_range(-0.5..1.5)) * (mu_x * mu_y).sqrt();
        let c = ProblemConstants::new(
            mu_x,
            mu_y,
            Lipschitz {
                l_xx: rng.gen_range(0.0..3.0) * mu_x,
                l_xy: l_ratio * l_yx,
                l_yx,
                l_yy: rng.gen_range(0.0..3.0) * mu_y,
            },
        );
        let nu = (
            10f64.powf(rng.gen_range(-1.0..1.0)),
            10f64.powf(rng.gen_range(-1.0..1.0)),
        );
        let eps = 10f64.powf(rng.gen_range(-4.0..0.0));
        let p = 1.0 - 10f64.powf(rng.gen_range(-4.0..-0.3));
        let x0 = nalgebra::DVector::from_element(2, rng.gen_range(-5.0..5.0));
        let y0 = nalgebra::DVector::from_element(2, rng.gen_range(-5.0..5.0));
        let zs = nalgebra::DVector::zeros(2);
        let (n, theta) = complexity_n(eps, p, &c, nu, (&x0, &y0), (&zs, &zs), &u).unwrap();
        let params = SapdParams::chambolle_pock(theta.min(1.0 - 1e-12), &c).unwrap();
        let ledger = build_ledger(&c, &params, nu, (&x0, &y0), (&zs, &zs)).unwrap();
        let geo = (n as f64 * ((1.0 + theta) / 2.0).ln()).exp();
        let gap_ratio = (1.0 - theta) / theta;
        let c1 = gap_ratio * geo * ledger.c_total * ledger.bias / (eps / 16.0);
        let c2 = gap_ratio * geo * ledger.xi1() / (eps / 16.0);
        let c3 = gap_ratio * ledger.xi2() / (eps / 16.0);
        let c4 = gap_ratio * ledger.xi3() * (1.0 / (1.0 - p)).ln() / (eps / 16.0);
        worst[0] = worst[0].max(c1);
        worst[1] = worst[1].max(c2);
        worst[2] = worst[2].max(c3);
        worst[3] = worst[3].max(c4);
        // q_bound at that n should certify the target accuracy scale
        let _ = q_bound(&ledger, params.rho, n, p);
    }
    println!("worst condition ratios (must be <= 1): {:?}", worst);
}
