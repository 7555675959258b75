use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Rejection attempts before the tail is declared degenerate. At mu = -6 sd
/// the acceptance rate is about 1e-9, so this cap is reached long before a
/// sample would be.
pub const MAX_REJECTIONS: usize = 1_000_000;

/// Draws from `N(mu, var)` conditioned on the value being non-negative.
///
/// Proposals are `mu + sd * z` with `z` standard normal; negative proposals are
/// rejected. With `var == 0` the distribution is a point mass at `mu` and no
/// randomness is consumed.
pub fn sample_truncated_normal<R: Rng + ?Sized>(mu: f64, var: f64, rng: &mut R) -> Result<f64> {
    if !mu.is_finite() || !var.is_finite() || var < 0.0 {
        return Err(Error::domain(format!(
            "truncated normal needs finite mean and non-negative variance, got mean {mu}, variance {var}"
        )));
    }
    if var == 0.0 {
        if mu < 0.0 {
            return Err(Error::domain(format!(
                "point mass at {mu} has no support on [0, inf)"
            )));
        }
        return Ok(mu);
    }
    let sd = var.sqrt();
    for _ in 0..MAX_REJECTIONS {
        let z: f64 = rng.sample(StandardNormal);
        let x = mu + sd * z;
        if x >= 0.0 {
            return Ok(x);
        }
    }
    Err(Error::Numerical(format!(
        "no non-negative draw from N({mu}, {var}) in {MAX_REJECTIONS} attempts; \
         the mass above zero is negligible"
    )))
}
