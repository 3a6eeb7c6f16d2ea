//! The tape in isolation: record a computation, backpropagate, and verify
//! the gradients against central finite differences.
//!
//! Run with: cargo run --example autodiff_basics

use gazegen::neural::{gradient_check, Dense, GradientMap, ParamSet, Tape, Tensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gazegen::Result<()> {
    // d/dx sum(x ⊙ x) = 2x, straight off the tape.
    let mut tape = Tape::new();
    let x = tape.leaf(Tensor::from_vec(&[3], vec![1.0, -2.0, 3.0])?, true);
    let squared = tape.mul(x, x)?;
    let total = tape.sum_all(squared);
    tape.backward(total)?;
    println!("sum(x*x) = {}, grad = {:?}", tape.scalar_value(total), tape.grad(x).unwrap());

    // A dense layer under tanh, checked against finite differences.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let layer = Dense::new("layer", 4, 3);
    let mut params = ParamSet::new();
    layer.init(&mut params, &mut rng);
    let input = gazegen::neural::init::normal(&[2, 4], 1.0, &mut rng);

    let objective = |params: &ParamSet| -> gazegen::Result<(f64, GradientMap)> {
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, true);
        let x = tape.constant(input.clone());
        let y = layer.forward(&mut tape, &bound, x)?;
        let act = tape.tanh(y);
        let sq = tape.mul(act, act)?;
        let loss = tape.mean_all(sq)?;
        tape.backward(loss)?;
        Ok((tape.scalar_value(loss), bound.gradients(&tape)?))
    };
    let worst = gradient_check(objective, &params, 1e-5)?;
    println!("dense+tanh objective: worst finite-difference relative error = {worst:.2e}");
    Ok(())
}
