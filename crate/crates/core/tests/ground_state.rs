//! Well ground state against a finite-difference eigensolver.

use zerorange_core::kernels::Coupling;
use zerorange_core::sampler::{radial_ground_state, SmoothedPotential};

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix
/// with diagonal `d` and constant off-diagonal `e`.
fn sturm_count(d: &[f64], e: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for &di in &d[1..] {
        let prev = if q == 0.0 { 1e-300 } else { q };
        q = di - x - e * e / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest eigenvalue of `-½u'' - v u` on `(0, L)` with Dirichlet ends,
/// `per_well` grid steps inside the well and `n` interior nodes, or
/// `None` if it is not negative.
fn fd_lowest(pot: &SmoothedPotential, per_well: usize, n: usize) -> Option<f64> {
    let h = pot.epsilon / per_well as f64;
    let d: Vec<f64> = (1..=n)
        .map(|i| {
            let v = if i < per_well {
                pot.amplitude
            } else if i == per_well {
                0.5 * pot.amplitude
            } else {
                0.0
            };
            1.0 / (h * h) - v
        })
        .collect();
    let e = -0.5 / (h * h);
    if sturm_count(&d, e, 0.0) == 0 {
        return None;
    }
    let (mut lo, mut hi) = (-pot.amplitude - 1.0, 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(&d, e, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn fd_binding(pot: &SmoothedPotential) -> Option<f64> {
    // 10⁴ nodes over a box of length about 15 with the well edge on a
    // node, then one halving of the step for Richardson extrapolation
    let per_well = ((pot.epsilon * 10_000.0 / 15.0).round() as usize).max(1);
    let coarse = fd_lowest(pot, per_well, 10_000)?;
    let fine = fd_lowest(pot, 2 * per_well, 20_000)?;
    Some(-(4.0 * fine - coarse) / 3.0)
}

#[test]
fn bisection_agrees_with_finite_differences() {
    let pot = SmoothedPotential::new(0.1, Coupling::from(1.0)).unwrap();
    let exact = radial_ground_state(&pot).unwrap().unwrap();
    let fd = fd_binding(&pot).unwrap();
    println!("matching {exact}, finite differences {fd}");
    assert!((exact - fd).abs() <= 1e-6 * exact, "{exact} vs {fd}");
}

#[test]
fn repulsive_well_has_no_bound_state() {
    let pot = SmoothedPotential::new(0.05, Coupling::from(-1.0)).unwrap();
    assert_eq!(radial_ground_state(&pot).unwrap(), None);
    assert_eq!(fd_binding(&pot), None);
}
