//! Runs the recursive retrospective cost update on a synthetic sequence and
//! checks it against the batch minimizer at every step.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcae::rls::*;

fn main() {
    let cfg = RlsConfig {
        lambda: 0.995,
        ..RlsConfig::pid()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut state = RlsState::new(&cfg).unwrap();
    let mut records = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 0..300 {
        let z: f64 = rng.random_range(-1.0..0.0);
        let phi = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
        let u = rng.random_range(-0.5..0.5);
        let (phi_f, u_f) = filtered_signals(&state);
        records.push(RetrospectiveRecord { z, phi: phi.clone(), u, phi_f, u_f });
        state = rls_step(&state, z, &phi, u, &cfg).unwrap();

        let oracle = batch_minimizer(&records, &cfg).unwrap();
        let gap = (&state.theta - &oracle).norm() / oracle.norm().max(1e-300);
        worst = worst.max(gap);
        if k % 50 == 49 {
            println!(
                "step {:>3}: theta = [{:+.5}, {:+.5}, {:+.5}], cost {:.4e}, relative gap to batch {gap:.2e}",
                k + 1,
                state.theta[0],
                state.theta[1],
                state.theta[2],
                batch_cost(&state.theta, &records, &cfg)
            );
        }
    }
    println!("worst relative gap over the run: {worst:.2e}");
    println!("P eigenvalues: {:?}", state.p.clone().symmetric_eigenvalues().as_slice());
}
