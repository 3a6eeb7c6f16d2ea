//! Correlated random walk: log-normal step lengths via the inverse CDF and
//! von Mises turning angles, accumulated into planar positions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{SourceTag, VelocitySeries};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CrwParams {
    /// Log-normal step length: ln s ~ Normal(mu_log, sigma_log²).
    pub mu_log: f64,
    pub sigma_log: f64,
    /// Von Mises concentration of the turning angle; 0 is a uniform turn.
    pub kappa: f64,
    pub initial_heading: f64,
    pub steps: usize,
}

impl CrwParams {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_log < 0.0 {
            return Err(Error::Config(format!(
                "crw: sigma_log must be >= 0, got {}",
                self.sigma_log
            )));
        }
        if self.kappa < 0.0 {
            return Err(Error::Config(format!(
                "crw: kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

pub struct CrwOutput {
    /// steps + 1 points starting at the origin.
    pub positions: Vec<(f64, f64)>,
    pub velocity: VelocitySeries,
}

/// Uniform draw on the open interval (0, 1).
fn open_unit(rng: &mut impl Rng) -> f64 {
    ((rng.random::<u64>() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// Simulate the walk. Step lengths come from the inverse log-normal CDF
/// applied to uniform latents; headings accumulate zero-centered von Mises
/// turns. The velocity series is step length over a 1 ms interval.
pub fn crw_generate(params: &CrwParams, seed: u64) -> Result<CrwOutput> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dt_ms = 1.0;
    let mut positions = Vec::with_capacity(params.steps + 1);
    positions.push((0.0, 0.0));
    let mut heading = params.initial_heading;
    let mut speeds = Vec::with_capacity(params.steps);
    for _ in 0..params.steps {
        let z = open_unit(&mut rng);
        let step = (params.mu_log + params.sigma_log * normal_quantile(z)).exp();
        let turn = sample_von_mises(params.kappa, &mut rng);
        heading += turn;
        let (x, y) = *positions.last().expect("non-empty");
        positions.push((x + step * heading.cos(), y + step * heading.sin()));
        speeds.push(step / dt_ms);
    }
    Ok(CrwOutput {
        positions,
        velocity: VelocitySeries {
            values: speeds,
            sample_interval_ms: dt_ms,
            source: SourceTag::Synthetic,
        },
    })
}

/// Standard normal quantile Φ⁻¹(p) by rational approximation, accurate to
/// roughly machine precision over (0, 1).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile defined on (0, 1), got {p}");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_812_8e4) * r
            + 6.726_577_092_700_870_1e4)
            * r
            + 4.592_195_393_154_987_1e4)
            * r
            + 1.373_169_376_550_946_1e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_608;
        let den = ((((((5.226_495_278_852_545_6e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return q * num / den;
    }

    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-r.ln()).sqrt();
    let z = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_759)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -z
    } else {
        z
    }
}

/// Zero-centered von Mises draw by the Best–Fisher rejection method;
/// kappa = 0 degenerates to a uniform angle on (−π, π].
pub fn sample_von_mises(kappa: f64, rng: &mut impl Rng) -> f64 {
    if kappa < 1e-9 {
        return rng.random_range(-PI..PI);
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1 = open_unit(rng);
        let u2 = open_unit(rng);
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3 = open_unit(rng);
            let theta = f.clamp(-1.0, 1.0).acos();
            return if u3 > 0.5 { theta } else { -theta };
        }
    }
}
