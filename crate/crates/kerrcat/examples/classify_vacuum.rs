//! Linear classification of the vacuum under different pump envelopes, and
//! the closed-form variational solution through a threshold-crossing ramp.

use kerrcat::linear::{classify, threshold, variational_solution};
use kerrcat::model::PumpEnvelope;

fn main() -> kerrcat::Result<()> {
    let kappa = 1.0;
    println!("threshold p_c = {:.6}", threshold(0.0, kappa));

    for (label, env) in [
        ("sub-threshold constant", PumpEnvelope::Constant { p0: 0.3 }),
        ("super-threshold constant", PumpEnvelope::Constant { p0: 1.5 }),
        (
            "reference logistic ramp",
            PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 },
        ),
        (
            "sub-threshold ramp",
            PumpEnvelope::Logistic { p_max: 0.4, gamma: 1.5, t_c: 5.0 },
        ),
    ] {
        let c = classify(kappa, 0.0, &env)?;
        println!("{label}: {}", serde_json::to_string(&c).unwrap());
    }

    // variational growth of the critical direction through the ramp
    let env = PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 };
    println!("\nvariational solution from (xi, eta) = (1e-3, 1e-3) at t = 0:");
    for t in [0.0, 3.0, 6.0, 9.0, 12.0] {
        let (xi, eta) = variational_solution(&env, kappa, 1e-3, 1e-3, 0.0, t)?;
        println!("  t = {t:>4}: xi = {xi:.6e}  eta = {eta:.6e}");
    }
    Ok(())
}
