use super::smooth::Smooth;
use super::FuncspaceError;
use crate::scalar::Real;

/// `psi(x) = (x + 1)^{-m}`, a decreasing bijection of `[0, inf)` onto `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiMap {
    m: u32,
}

pub fn psi_map(m: u32) -> Result<PsiMap, FuncspaceError> {
    if m == 0 {
        return Err(FuncspaceError::InvalidParameter("psi needs m >= 1".into()));
    }
    Ok(PsiMap { m })
}

impl PsiMap {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn eval<T: Real>(&self, x: T) -> T {
        (x + T::one()).powi(-(self.m as i32))
    }

    /// `psi^{-1}(y) = y^{-1/m} - 1` for `y` in `(0, 1]`.
    pub fn inverse<T: Real>(&self, y: T) -> Result<T, FuncspaceError> {
        if !(y > T::zero() && y <= T::one()) {
            return Err(FuncspaceError::Domain { y: y.to_f64_lossy() });
        }
        Ok(y.powf(-T::one() / T::lit(self.m as f64)) - T::one())
    }

    /// `psi` as a [`Smooth`], labelled `psi`.
    pub fn smooth<T: Real>(&self) -> Smooth<T> {
        power_of_shift(self.m as i32, "psi")
    }
}

/// `(x + 1)^{-k}` with closed-form derivatives.
pub(crate) fn power_of_shift<T: Real>(k: i32, label: &str) -> Smooth<T> {
    let kf = T::lit(k as f64);
    Smooth::real(
        label.to_string(),
        move |x: T| (x + T::one()).powi(-k),
        move |x: T| -kf * (x + T::one()).powi(-k - 1),
        move |x: T| kf * (kf + T::one()) * (x + T::one()).powi(-k - 2),
    )
}

/// Test functions for positive operators: `psi` and `psi-power`,
/// `(x + 1)^{-m-1}`.
pub fn positive_registry<T: Real>(name: &str, m: u32) -> Result<Smooth<T>, FuncspaceError> {
    match name {
        "psi" => Ok(power_of_shift(m as i32, "psi")),
        "psi-power" => Ok(power_of_shift(m as i32 + 1, "psi-power")),
        other => Err(FuncspaceError::UnknownFunction(other.to_string())),
    }
}
