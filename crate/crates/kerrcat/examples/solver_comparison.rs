//! Integrator capability tour: explicit vs stiff method on the full system,
//! dense output, and tolerance behavior.

use kerrcat::model::{full_rhs, ModelParams, PhaseState};
use kerrcat::odeint::{integrate, Method, SolverSettings};

fn main() -> kerrcat::Result<()> {
    let params = ModelParams::reference_ramp();
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (dx, dyv) = full_rhs(&params, t, PhaseState::new(y[0], y[1]));
        dy[0] = dx;
        dy[1] = dyv;
    };

    for method in [Method::DormandPrince, Method::TrBdf2] {
        let settings = SolverSettings { method, ..SolverSettings::default() };
        let sol = integrate(&rhs, &[1e-3, 0.0], 0.0, 20.0, &settings)?;
        let yf = sol.final_state();
        println!(
            "{method:?}: x(20) = {:+.10}, y(20) = {:+.10}, {} accepted steps",
            yf[0],
            yf[1],
            sol.steps.len() - 1
        );
        // dense output between steps
        let mid = sol.sample(10.5);
        println!("  dense sample x(10.5) = {:+.10}", mid[0]);
    }

    println!("\ntolerance refinement (DoPri5, final x):");
    let mut prev: Option<f64> = None;
    for k in [1e-6, 1e-8, 1e-10, 1e-12] {
        let settings = SolverSettings::with_tol(k, k * 1e-2);
        let sol = integrate(&rhs, &[1e-3, 0.0], 0.0, 20.0, &settings)?;
        let x = sol.final_state()[0];
        match prev {
            Some(p) => println!("  rtol = {k:.0e}: x = {x:.14} (delta {:+.3e})", x - p),
            None => println!("  rtol = {k:.0e}: x = {x:.14}"),
        }
        prev = Some(x);
    }
    Ok(())
}
