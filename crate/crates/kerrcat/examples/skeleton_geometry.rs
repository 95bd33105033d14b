//! Conservative skeleton geometry: homoclinic orbit, energy conservation,
//! lobe area, and the rotated-frame lemniscate.

use kerrcat::model::hamiltonian;
use kerrcat::skeleton::{
    lemniscate_radius, lemniscate_radius_max, rotated_frame, saddle_centers, HomoclinicOrbit,
};

fn main() -> kerrcat::Result<()> {
    let orbit = HomoclinicOrbit::new(1.5, 1.0)?;

    let s0 = orbit.point(0.0);
    println!("orbit at t = 0:          ({:+.6}, {:+.6})", s0.x, s0.y);
    let (big_x, big_y) = rotated_frame(s0);
    println!("rotated frame:           ({:+.6}, {:+.6})", big_x, big_y);

    let max_h = (0..4001)
        .map(|i| orbit.energy(-20.0 + 40.0 * i as f64 / 4000.0).abs())
        .fold(0.0, f64::max);
    println!("max |H| on the orbit:    {max_h:.3e}");

    println!("lobe area (closed form): {:.12}", orbit.lobe_area());
    println!("signed area quadrature:  {:+.12}", orbit.signed_area_quadrature());

    let sc = saddle_centers(1.5, 1.0)?;
    println!(
        "saddle ({}, {}); centers ({:+.6}, {:+.6}) and ({:+.6}, {:+.6})",
        sc.saddle.x, sc.saddle.y, sc.centers[0].x, sc.centers[0].y, sc.centers[1].x,
        sc.centers[1].y
    );
    println!(
        "center energy:           {:+.6}",
        hamiltonian(0.0, 1.0, 1.5, sc.centers[0])
    );

    println!("lemniscate R_max:        {:.6}", lemniscate_radius_max(1.5, 1.0));
    for k in 0..5 {
        let theta = std::f64::consts::FRAC_PI_4 * (1.0 + k as f64 / 4.0);
        match lemniscate_radius(1.5, 1.0, theta) {
            Some(r) => println!("  R(theta = {theta:.4}) = {r:.6}"),
            None => println!("  R(theta = {theta:.4}) undefined"),
        }
    }
    Ok(())
}
