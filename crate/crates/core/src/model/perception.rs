use super::params::{ChannelTheta, ParameterSet};
use super::rld::{Normalizer, RealLifeData, N_CHANNELS};
use super::spec::{ChannelFamily, Structure};
use crate::error::{MmmError, Result};

/// Magnitude at which an exponential channel saturates.
pub const CHANNEL_OUTPUT_BOUND: f64 = 1e3;

/// Hold filter: captured channels take the new value, the others keep `prev`.
pub fn perceptual_access(raw: &[f64], captured: &[bool], prev: &[f64]) -> Result<Vec<f64>> {
    if raw.len() != prev.len() || captured.len() != prev.len() {
        return Err(MmmError::Structure(format!(
            "perceptual access on {} values, {} flags, {} held channels",
            raw.len(),
            captured.len(),
            prev.len()
        )));
    }
    Ok(raw
        .iter()
        .zip(captured)
        .zip(prev)
        .map(|((&r, &c), &p)| if c { r } else { p })
        .collect())
}

/// Normalizes a real-life data record and passes it through the hold filter.
pub fn perceive(rld: &RealLifeData, normalizer: &Normalizer, prev: &[f64; N_CHANNELS]) -> [f64; N_CHANNELS] {
    let fresh = normalizer.apply(&rld.values());
    let mut out = *prev;
    for c in 0..N_CHANNELS {
        if rld.captured[c] {
            out[c] = fresh[c];
        }
    }
    out
}

/// Value of one channel function and whether it saturated.
pub fn eval_channel(family: ChannelFamily, theta: ChannelTheta, x: f64) -> (f64, bool) {
    let ChannelTheta { theta0, theta1 } = theta;
    match family {
        ChannelFamily::Affine => (theta0 * x + theta1, false),
        ChannelFamily::Exponential => {
            if theta1 == 0.0 {
                return (1.0, false);
            }
            let v = theta1 * (theta0 * x).exp() + 1.0;
            if v.is_finite() && v.abs() <= CHANNEL_OUTPUT_BOUND {
                (v, false)
            } else {
                (CHANNEL_OUTPUT_BOUND.copysign(theta1), true)
            }
        }
        ChannelFamily::Boolean => (if x > 0.5 { theta1 } else { theta0 }, false),
    }
}

/// Rationally perceived knowledge: per output slot, the sum of the channels
/// wired to it. The flag reports any saturated channel.
pub fn rational_reasoning(structure: &Structure, params: &ParameterSet, pd: &[f64]) -> (Vec<f64>, bool) {
    let mut out = vec![0.0; structure.dims().rpk];
    let sat = rational_reasoning_into(structure, params, pd, &mut out);
    (out, sat)
}

pub(crate) fn rational_reasoning_into(
    structure: &Structure,
    params: &ParameterSet,
    pd: &[f64],
    out: &mut [f64],
) -> bool {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut saturated = false;
    for (ch, theta) in structure.channels().iter().zip(&params.perception) {
        let (v, s) = eval_channel(ch.family, *theta, pd[ch.input]);
        out[ch.output] += v;
        saturated |= s;
    }
    saturated
}
