//! Invariant-graph reduction: the coefficient a3(t), the moving branches
//! +-rho(t), and reduced trajectories converging onto them.

use kerrcat::model::PumpEnvelope;
use kerrcat::reduction::{
    a3_forward, frozen_reduced_roots, moving_branch, reduced_trajectory, BranchConfig,
    ReducedCoefficients,
};

fn main() -> kerrcat::Result<()> {
    let env = PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 };
    let (kappa, kerr) = (1.0, 1.0);
    let cfg = BranchConfig::defaults(&env, kappa, kerr)?;
    let t_ref = cfg.reference_time;
    println!("reference time T = {t_ref:.6} (q(T) = {:.3})", 4.0 * env.value(t_ref) - kappa);

    println!("\ncoefficient relaxation toward a3 = -1/9:");
    for dt in [0.0, 1.0, 3.0, 7.0, 15.0] {
        let a3 = a3_forward(&cfg, &env, kappa, kerr, t_ref + dt)?;
        println!("  a3(T + {dt:>4}) = {a3:+.9}");
    }

    println!("\nmoving branch vs frozen reduced root:");
    for dt in [1.0, 3.0, 7.0, 15.0] {
        let t = t_ref + dt;
        let rho = moving_branch(&cfg, &env, kappa, kerr, t, 1.0)?;
        let mu = env.value(t) - 0.5 * kappa;
        let b = -kerr * a3_forward(&cfg, &env, kappa, kerr, t)?;
        let root = frozen_reduced_roots(mu, b).unwrap();
        println!("  t = T + {dt:>4}: rho = {rho:.8}  frozen root = {root:.8}");
    }
    println!("  asymptote 18^(1/4) = {:.8}", 18f64.powf(0.25));

    let table = ReducedCoefficients::sample(&cfg, &env, kappa, kerr, t_ref + 10.0, 2000)?;
    println!("\nreduced trajectories from x0 = +-0.1:");
    for x0 in [0.1, -0.1] {
        let path = reduced_trajectory(&table, x0, t_ref + 10.0, 100)?;
        let (tf, xf) = *path.last().unwrap();
        let rho = moving_branch(&cfg, &env, kappa, kerr, tf, x0.signum())?;
        println!("  x0 = {x0:+.1}: x(T + 10) = {xf:+.8}  (branch {rho:+.8})");
    }
    Ok(())
}
