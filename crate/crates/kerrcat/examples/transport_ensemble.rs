//! Gate-pulse transport: ring ensemble through the pulse, safe/leaked
//! classification, and Melnikov-zero projections on the separatrix.

use kerrcat::melnikov::MelnikovCurve;
use kerrcat::skeleton::HomoclinicOrbit;
use kerrcat::transport::{run_transport, Classification, TransportConfig};

fn main() -> kerrcat::Result<()> {
    let orbit = HomoclinicOrbit::new(1.5, 1.0)?;
    for amp in [0.0, 2.0, 5.0, 7.5] {
        let sigma = 0.3;
        let config = TransportConfig::reference(amp, sigma)?;
        let curve = MelnikovCurve::compute(&orbit, config.params.kappa, amp, sigma)?;
        let zeros: Vec<f64> = curve.zeros.iter().map(|z| z.t0).collect();
        let result = run_transport(&config, &zeros)?;
        println!(
            "A = {amp:>4}: leaked {:>3}/150 ({:.1}%), {} arc(s), {} Melnikov zero(s)",
            result.leaked_count,
            100.0 * result.leaked_fraction,
            result.leaked_arcs,
            zeros.len()
        );
        if amp == 7.5 {
            for p in &result.projections {
                println!("         projection on separatrix: ({:+.6}, {:+.6})", p.x, p.y);
            }
            let arcs: Vec<usize> = result
                .particles
                .iter()
                .filter(|p| p.class == Classification::Leaked)
                .map(|p| p.index)
                .collect();
            println!("         leaked indices {:?} ... {:?}", &arcs[..3.min(arcs.len())], &arcs[arcs.len().saturating_sub(3)..]);
        }
    }
    Ok(())
}
