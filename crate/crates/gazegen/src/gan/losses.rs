//! Non-saturating adversarial losses and the spectral-regularized total.

use crate::error::{Error, Result};
use crate::neural::tape::{NodeId, Tape};

/// Probability floor inside logarithms, keeping both losses finite.
pub const PROB_FLOOR: f64 = 1e-7;

fn check_probs(tape: &Tape, id: NodeId, what: &str) -> Result<usize> {
    let shape = tape.shape(id);
    if shape.len() != 1 {
        return Err(Error::Dimension(format!(
            "{what}: want a rank-1 probability batch, got {shape:?}"
        )));
    }
    if shape[0] == 0 {
        return Err(Error::EmptyInput(format!("{what}: empty batch")));
    }
    Ok(shape[0])
}

/// −mean(log D(G(z))): low when the discriminator rates fakes as real.
pub fn generator_loss(tape: &mut Tape, d_on_fake: NodeId) -> Result<NodeId> {
    check_probs(tape, d_on_fake, "generator_loss")?;
    let clamped = tape.clamp(d_on_fake, PROB_FLOOR, 1.0 - PROB_FLOOR);
    let logs = tape.log(clamped);
    let mean = tape.mean_all(logs)?;
    Ok(tape.neg(mean))
}

/// −mean(log D(x) + log(1 − D(G(z)))): the maximization objective for the
/// discriminator, negated for gradient descent.
pub fn discriminator_loss(tape: &mut Tape, d_on_real: NodeId, d_on_fake: NodeId) -> Result<NodeId> {
    let nr = check_probs(tape, d_on_real, "discriminator_loss")?;
    let nf = check_probs(tape, d_on_fake, "discriminator_loss")?;
    if nr != nf {
        return Err(Error::Dimension(format!(
            "discriminator_loss: real batch {nr} vs fake batch {nf}"
        )));
    }
    let real_clamped = tape.clamp(d_on_real, PROB_FLOOR, 1.0 - PROB_FLOOR);
    let real_logs = tape.log(real_clamped);
    let neg_fake = tape.neg(d_on_fake);
    let one_minus = tape.add_scalar(neg_fake, 1.0);
    let fake_clamped = tape.clamp(one_minus, PROB_FLOOR, 1.0 - PROB_FLOOR);
    let fake_logs = tape.log(fake_clamped);
    let sum = tape.add(real_logs, fake_logs)?;
    let mean = tape.mean_all(sum)?;
    Ok(tape.neg(mean))
}

/// L_final = L_G + λ·L_spectral. With λ = 0 the generator loss is returned
/// unchanged, so the spectral term leaves no trace in the gradients.
pub fn combined_loss(
    tape: &mut Tape,
    l_g: NodeId,
    l_spectral: NodeId,
    lambda: f64,
) -> Result<NodeId> {
    if lambda < 0.0 {
        return Err(Error::Config(format!(
            "spectral weight must be >= 0, got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(l_g);
    }
    let weighted = tape.scale(l_spectral, lambda);
    tape.add(l_g, weighted)
}
