//! Polity parameters, the power-function family and allocation value types.

use crate::error::{Error, Result};

/// Scalar parameters of a polity.
///
/// Counts are real numbers so that sweeps can move them continuously.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolityParams {
    /// Residents, `N`.
    pub n_residents: f64,
    /// Selectorate size, `S`.
    pub selectorate: f64,
    /// Winning coalition size, `W`.
    pub coalition: f64,
    /// Non-tax revenue, `R`.
    pub base_revenue: f64,
    /// Tax rate, `r`.
    pub tax_rate: f64,
    /// Price of one unit of public goods, `p`.
    pub public_price: f64,
    /// Common discount factor, `δ`.
    pub discount: f64,
}

impl PolityParams {
    /// The worked example: N = S = 10000, W = 300, R = 1000, r = 0.5, p = 200, δ = 0.55.
    pub const fn published_example() -> Self {
        PolityParams {
            n_residents: 10_000.0,
            selectorate: 10_000.0,
            coalition: 300.0,
            base_revenue: 1000.0,
            tax_rate: 0.5,
            public_price: 200.0,
            discount: 0.55,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("n_residents", self.n_residents),
            ("selectorate", self.selectorate),
            ("coalition", self.coalition),
            ("base_revenue", self.base_revenue),
            ("tax_rate", self.tax_rate),
            ("public_price", self.public_price),
            ("discount", self.discount),
        ];
        if let Some((name, value)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} = {value} is not finite")));
        }
        if self.coalition < 1.0 {
            return Err(Error::InvalidParams(format!("coalition W = {} must be at least 1", self.coalition)));
        }
        if self.selectorate < self.coalition {
            return Err(Error::InvalidParams(format!(
                "selectorate S = {} is smaller than coalition W = {}",
                self.selectorate, self.coalition
            )));
        }
        if self.n_residents < self.selectorate {
            return Err(Error::InvalidParams(format!(
                "n_residents N = {} is smaller than selectorate S = {}",
                self.n_residents, self.selectorate
            )));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::InvalidParams(format!("discount = {} must lie in (0, 1)", self.discount)));
        }
        if !(0.0..=1.0).contains(&self.tax_rate) {
            return Err(Error::InvalidParams(format!("tax_rate = {} must lie in [0, 1]", self.tax_rate)));
        }
        if self.public_price <= 0.0 {
            return Err(Error::InvalidParams(format!("public_price = {} must be positive", self.public_price)));
        }
        if self.base_revenue < 0.0 {
            return Err(Error::InvalidParams(format!("base_revenue = {} must be nonnegative", self.base_revenue)));
        }
        Ok(())
    }

    /// `N·r`, the multiplier on the production function in tax revenue.
    pub fn tax_base(&self) -> f64 {
        self.n_residents * self.tax_rate
    }

    /// `W/S`, the chance of inclusion in a challenger's coalition.
    pub fn coalition_share(&self) -> f64 {
        self.coalition / self.selectorate
    }

    /// `δ/(1−δ)`, the present value of one unit received every future period.
    pub fn future_weight(&self) -> f64 {
        self.discount / (1.0 - self.discount)
    }

    /// `(1−δ)S/(S−δW)`, the weight on `v_g` in the asymmetric first-order condition.
    pub fn asymmetric_coefficient(&self) -> f64 {
        (1.0 - self.discount) * self.selectorate / (self.selectorate - self.discount * self.coalition)
    }
}

/// `x ↦ x^α` with `α ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFn {
    pub exponent: f64,
}

impl PowerFn {
    pub const fn new(exponent: f64) -> Self {
        PowerFn { exponent }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        x.powf(self.exponent)
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        self.exponent * x.powf(self.exponent - 1.0)
    }

    /// Inverse on `[0, ∞)`.
    #[inline]
    pub fn inverse(&self, y: f64) -> f64 {
        y.powf(1.0 / self.exponent)
    }
}

/// The three increasing, strictly concave functions of the model: utility from
/// public goods `v`, utility from private goods `u`, and the production function `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionFamily {
    pub v_exponent: f64,
    pub u_exponent: f64,
    pub phi_exponent: f64,
}

impl Default for FunctionFamily {
    fn default() -> Self {
        Self::square_root()
    }
}

impl FunctionFamily {
    pub const fn square_root() -> Self {
        FunctionFamily { v_exponent: 0.5, u_exponent: 0.5, phi_exponent: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in
            [("v_exponent", self.v_exponent), ("u_exponent", self.u_exponent), ("phi_exponent", self.phi_exponent)]
        {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidParams(format!("{name} = {a} must lie strictly in (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn is_square_root(&self) -> bool {
        self.v_exponent == 0.5 && self.u_exponent == 0.5 && self.phi_exponent == 0.5
    }

    pub fn v_fn(&self) -> PowerFn {
        PowerFn::new(self.v_exponent)
    }

    pub fn u_fn(&self) -> PowerFn {
        PowerFn::new(self.u_exponent)
    }

    pub fn phi_fn(&self) -> PowerFn {
        PowerFn::new(self.phi_exponent)
    }

    pub fn v(&self, g: f64) -> f64 {
        self.v_fn().value(g)
    }

    pub fn v_g(&self, g: f64) -> f64 {
        self.v_fn().derivative(g)
    }

    pub fn u(&self, z: f64) -> f64 {
        self.u_fn().value(z)
    }

    pub fn u_z(&self, z: f64) -> f64 {
        self.u_fn().derivative(z)
    }

    pub fn phi(&self, g: f64) -> f64 {
        self.phi_fn().value(g)
    }

    pub fn phi_g(&self, g: f64) -> f64 {
        self.phi_fn().derivative(g)
    }
}

/// A candidate offer: public goods `g` and private goods per coalition member `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub public_goods: f64,
    pub private_goods: f64,
}

impl Allocation {
    pub const fn new(public_goods: f64, private_goods: f64) -> Self {
        Allocation { public_goods, private_goods }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.public_goods.is_finite() && self.public_goods >= 0.0) {
            return Err(Error::Domain(format!(
                "public goods g = {} must be finite and nonnegative",
                self.public_goods
            )));
        }
        if !(self.private_goods.is_finite() && self.private_goods >= 0.0) {
            return Err(Error::Domain(format!(
                "private goods z = {} must be finite and nonnegative",
                self.private_goods
            )));
        }
        Ok(())
    }
}

/// The challenger's best immediate offer `(ĝ, ẑ)` and its value `V̂ = v(ĝ) + u(ẑ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Benchmark {
    pub g_hat: f64,
    pub z_hat: f64,
    pub offer_value: f64,
}

impl Benchmark {
    pub fn new(fns: &FunctionFamily, g_hat: f64, z_hat: f64) -> Self {
        Benchmark { g_hat, z_hat, offer_value: fns.v(g_hat) + fns.u(z_hat) }
    }

    pub fn allocation(&self) -> Allocation {
        Allocation::new(self.g_hat, self.z_hat)
    }
}
