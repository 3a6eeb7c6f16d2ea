//! Central finite-difference verification of tape gradients.

use crate::error::{Error, Result};
use crate::neural::params::{GradientMap, ParamSet};

/// Compare analytic gradients against central finite differences,
/// coordinate by coordinate, over every parameter in `params`.
///
/// `f` evaluates the scalar objective at a parameter set and returns its
/// value together with the tape gradients. Returns the worst relative error
/// with denominator max(|analytic|, |numeric|, 1e-8).
pub fn gradient_check<F>(f: F, params: &ParamSet, step: f64) -> Result<f64>
where
    F: Fn(&ParamSet) -> Result<(f64, GradientMap)>,
{
    if step <= 0.0 {
        return Err(Error::Contract(format!(
            "finite-difference step must be > 0, got {step}"
        )));
    }
    let (base_value, analytic) = f(params)?;
    if !base_value.is_finite() {
        return Err(Error::NonFinite("objective at base point".into()));
    }

    let mut worst = 0.0_f64;
    for (name, tensor) in params.iter() {
        for idx in 0..tensor.numel() {
            let mut plus = params.clone();
            plus.get_mut(name).expect("clone keeps keys").data_mut()[idx] += step;
            let (fp, _) = f(&plus)?;

            let mut minus = params.clone();
            minus.get_mut(name).expect("clone keeps keys").data_mut()[idx] -= step;
            let (fm, _) = f(&minus)?;

            if !fp.is_finite() || !fm.is_finite() {
                return Err(Error::NonFinite(format!(
                    "objective at perturbed '{name}'[{idx}]"
                )));
            }
            let numeric = (fp - fm) / (2.0 * step);
            let analytic_v = analytic.get(name).map(|g| g.data()[idx]).unwrap_or(0.0);
            let rel = (analytic_v - numeric).abs()
                / analytic_v.abs().max(numeric.abs()).max(1e-8);
            if rel > worst {
                worst = rel;
            }
        }
    }
    Ok(worst)
}
