//! Lifting SO(2n) errors to the matchgate group: for random pairs at
//! distance `ε_SO`, the adjoint distance of the lifts stays below
//! `(π/2)·n·ε_SO`. Prints CSV.

use mgs::spinrep::check_lift_bound;
use mgs::targets::haar_so_with;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `Q·exp(t·A)` for a random antisymmetric `A` of unit spectral scale.
fn perturb(q: &DMatrix<f64>, t: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let d = q.nrows();
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let a = (&g - g.transpose()) * (t / d as f64);
    q * a.exp()
}

fn main() -> mgs::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    println!("n,eps_so,eps_spin,bound,holds");
    for n in 2..=5 {
        for _ in 0..5 {
            let q = haar_so_with(2 * n, &mut rng);
            let t = 10f64.powf(rng.random_range(-3.0..0.0));
            let qe = perturb(&q, t, &mut rng);
            let r = check_lift_bound(&q, &qe)?;
            println!("{},{:.6e},{:.6e},{:.6e},{}", r.n, r.eps_so, r.eps_spin, r.bound, r.holds);
        }
    }
    Ok(())
}
