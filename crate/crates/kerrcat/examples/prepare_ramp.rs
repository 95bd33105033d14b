//! State preparation through the logistic ramp: full-system trajectories
//! from near-vacuum seeds and the ramp-rate lag diagnostic.

use kerrcat::model::{frozen_full_equilibria, ModelParams, PumpEnvelope};
use kerrcat::reduction::{full_preparation_trajectory, lag_metric};

fn main() -> kerrcat::Result<()> {
    let params = ModelParams::reference_ramp();
    let plus = full_preparation_trajectory(&params, 1e-3, 0.0, 0.0, 20.0, 200, false)?;
    let minus = full_preparation_trajectory(&params, -1e-3, 0.0, 0.0, 20.0, 200, false)?;

    println!("t      x_plus     x_minus    x_eq_frozen");
    for i in (0..200).step_by(25) {
        let (t, sp) = plus.samples[i];
        let sm = minus.samples[i].1;
        let eq = frozen_full_equilibria(&params, t)?;
        let xe = if eq.len() > 1 { eq[1].x } else { 0.0 };
        println!("{t:5.2}  {:+.6}  {:+.6}  {xe:+.6}", sp.x, sm.x);
    }

    println!("\npeak lag by ramp rate:");
    for gamma in [0.5, 1.5, 4.0] {
        let p = ModelParams::new(
            1.0,
            1.0,
            0.0,
            PumpEnvelope::Logistic { p_max: 2.5, gamma, t_c: 5.0 },
        )?;
        let traj = full_preparation_trajectory(&p, 1e-3, 0.0, 0.0, 20.0, 1500, false)?;
        let lag = lag_metric(&traj, &p)?;
        let (t_peak, peak) = lag
            .iter()
            .copied()
            .fold((0.0, 0.0), |acc, (t, l)| if l > acc.1 { (t, l) } else { acc });
        println!("  gamma = {gamma}: peak lag {peak:.4} at t = {t_peak:.2}");
    }
    Ok(())
}
