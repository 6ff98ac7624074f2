use crate::error::{Error, Result};
use crate::scalar::Real;

/// Composite constants from the irrotational Korn constant `c_k` and the
/// Maxwell constant `c_m`:
/// `c₁ = max(√2 c_k, c_m √(1 + 2c_k²))` and `c₂ = √2 max(c_k, c_m (1 + c_k))`.
pub fn composite_constants<T: Real>(c_k: T, c_m: T) -> Result<(T, T)> {
    for c in [c_k, c_m] {
        if !(c > T::zero()) {
            return Err(Error::NonPositiveConstant(c.as_f64()));
        }
    }
    let two = T::lit(2.0);
    let s2 = two.sqrt();
    let c1 = (s2 * c_k).max(c_m * (T::one() + two * c_k * c_k).sqrt());
    let c2 = s2 * c_k.max(c_m * (T::one() + c_k));
    Ok((c1, c2))
}
