//! Melnikov analysis of the gate pulse: splitting curves, zeros, and the
//! critical-amplitude threshold.

use kerrcat::melnikov::{g_max, m_max, threshold_curve, MelnikovCurve};
use kerrcat::skeleton::HomoclinicOrbit;

fn main() -> kerrcat::Result<()> {
    let orbit = HomoclinicOrbit::new(1.5, 1.0)?;
    let kappa = 1.0;
    let sigma = 0.3;

    println!("lobe area A_lobe = {:.6}; offset -kappa A_lobe = {:+.6}", orbit.lobe_area(), -kappa * orbit.lobe_area());
    let (t0_star, gmax) = g_max(&orbit, sigma);
    println!("max G_{sigma}(t0) = {gmax:.9} at t0 = {t0_star:.6}");
    println!("A_crit({sigma}) = {:.9}", kappa * orbit.lobe_area() / gmax);

    for amp in [2.0, 4.0, 6.0] {
        let curve = MelnikovCurve::compute(&orbit, kappa, amp, sigma)?;
        let (_, mmax) = m_max(&orbit, kappa, amp, sigma);
        let zeros: Vec<String> = curve.zeros.iter().map(|z| format!("{:.5}", z.t0)).collect();
        println!("A = {amp}: M_max = {mmax:+.6}, zeros at [{}]", zeros.join(", "));
    }

    println!("\nthreshold curve (coarse grid):");
    let grid: Vec<f64> = (0..10).map(|i| 0.1 + 0.9 * i as f64 / 9.0).collect();
    let curve = threshold_curve(&orbit, kappa, &grid)?;
    for i in 0..grid.len() {
        match curve.a_crit[i] {
            Some(a) => println!("  sigma = {:.2}: A_crit = {a:.6}", curve.sigma[i]),
            None => println!("  sigma = {:.2}: no first-order splitting", curve.sigma[i]),
        }
    }
    Ok(())
}
