//! Activation functions given as explicit polynomial ODEs.
//!
//! An activation `sigma` of order `N` is described by
//! `sigma^(N) = U/V(sigma, sigma^(1), ..., sigma^(N-1))` together with the
//! initial derivatives at zero. From that data the first-order function
//! system `(U_i, V_i)` is produced: `xi_i = sigma^(i-1)` for `i = 1..N`,
//! `sigma * V_0(xi) = U_0(xi)` and `xidot_i * V_i(xi) = U_i(xi)`.

use crate::algebra::{parse_poly, scalar_frac, scalar_int, MultiPoly, RationalFunc, Scalar};
use crate::error::{Error, Result};

const ODE_TOL: f64 = 1e-10;
const DENOMINATOR_GUARD: f64 = 1e-12;

/// Built-in closed-form evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    Tanh,
    Sigmoid,
    Identity,
}

impl ClosedForm {
    pub fn eval(self, z: f64) -> f64 {
        match self {
            ClosedForm::Tanh => z.tanh(),
            ClosedForm::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            ClosedForm::Identity => z,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ClosedForm::Tanh => "tanh",
            ClosedForm::Sigmoid => "sigmoid",
            ClosedForm::Identity => "identity",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "tanh" => Some(ClosedForm::Tanh),
            "sigmoid" => Some(ClosedForm::Sigmoid),
            "identity" => Some(ClosedForm::Identity),
            _ => None,
        }
    }
}

/// An activation as an explicit polynomial ODE with initial conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationSpec {
    name: String,
    order: usize,
    rhs: RationalFunc,
    init: Vec<Scalar>,
    invertible: bool,
    closed_form: Option<ClosedForm>,
}

impl ActivationSpec {
    pub fn new(
        name: impl Into<String>,
        order: usize,
        rhs: RationalFunc,
        init: Vec<Scalar>,
        invertible: bool,
        closed_form: Option<ClosedForm>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::Argument("activation order must be at least 1".into()));
        }
        if rhs.num_vars() != order {
            return Err(Error::Dimension(format!(
                "activation rhs has {} variables, expected {order}",
                rhs.num_vars()
            )));
        }
        if init.len() != order {
            return Err(Error::Dimension(format!(
                "activation init has length {}, expected {order}",
                init.len()
            )));
        }
        if closed_form.is_some() && order != 1 {
            return Err(Error::Argument(
                "closed-form tags are only defined for order-1 activations".into(),
            ));
        }
        let spec = ActivationSpec {
            name: name.into(),
            order,
            rhs,
            init,
            invertible,
            closed_form,
        };
        // The ODE must be well-posed at its own initial point.
        if spec.rhs.eval(&spec.init).is_err() {
            return Err(Error::Argument(format!(
                "activation `{}`: rhs denominator vanishes at the initial condition",
                spec.name
            )));
        }
        Ok(spec)
    }

    /// Hyperbolic tangent: `y' = 1 - y^2`, `y(0) = 0`.
    pub fn tanh() -> Self {
        let rhs = RationalFunc::from_poly(parse_poly("1 - X1^2", 1).unwrap());
        ActivationSpec::new("tanh", 1, rhs, vec![scalar_int(0)], true, Some(ClosedForm::Tanh))
            .unwrap()
    }

    /// Logistic sigmoid: `y' = y(1 - y)`, `y(0) = 1/2`.
    pub fn sigmoid() -> Self {
        let rhs = RationalFunc::from_poly(parse_poly("X1 - X1^2", 1).unwrap());
        ActivationSpec::new(
            "sigmoid",
            1,
            rhs,
            vec![scalar_frac(1, 2)],
            true,
            Some(ClosedForm::Sigmoid),
        )
        .unwrap()
    }

    /// Identity activation: `y' = 1`, `y(0) = 0`.
    pub fn identity() -> Self {
        let rhs = RationalFunc::from_poly(parse_poly("1", 1).unwrap());
        ActivationSpec::new(
            "identity",
            1,
            rhs,
            vec![scalar_int(0)],
            true,
            Some(ClosedForm::Identity),
        )
        .unwrap()
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "tanh" => Some(Self::tanh()),
            "sigmoid" => Some(Self::sigmoid()),
            "identity" => Some(Self::identity()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rhs(&self) -> &RationalFunc {
        &self.rhs
    }

    pub fn init(&self) -> &[Scalar] {
        &self.init
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    /// The function tuple `xi(z) = (sigma(z), ..., sigma^(N-1)(z))`.
    ///
    /// Closed-form activations evaluate directly; otherwise the ODE is
    /// integrated from 0 to `z` by RK4 with step halving until two
    /// refinements agree within 1e-10.
    pub fn xi(&self, z: f64) -> Result<Vec<f64>> {
        if let Some(cf) = self.closed_form {
            return Ok(vec![cf.eval(z)]);
        }
        self.xi_by_integration(z)
    }

    /// Numeric activation value `sigma(z)`.
    pub fn sigma_eval(&self, z: f64) -> Result<f64> {
        Ok(self.xi(z)?[0])
    }

    fn xi_by_integration(&self, z: f64) -> Result<Vec<f64>> {
        let init: Vec<f64> = self.init.iter().map(crate::algebra::scalar_to_f64).collect();
        if z == 0.0 {
            return Ok(init);
        }
        let mut steps = 16usize.max((z.abs() / 0.05).ceil() as usize);
        let mut prev = self.integrate_fixed(&init, z, steps)?;
        for _ in 0..20 {
            steps *= 2;
            let cur = self.integrate_fixed(&init, z, steps)?;
            let delta = prev
                .iter()
                .zip(&cur)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if delta <= ODE_TOL {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Argument(format!(
            "activation `{}`: ODE integration did not reach tolerance {ODE_TOL}",
            self.name
        )))
    }

    fn integrate_fixed(&self, init: &[f64], z: f64, steps: usize) -> Result<Vec<f64>> {
        let n = self.order;
        let h = z / steps as f64;
        let deriv = |state: &[f64], out: &mut [f64]| -> Result<()> {
            for i in 0..n - 1 {
                out[i] = state[i + 1];
            }
            out[n - 1] = self
                .rhs
                .eval_f64_guarded(state, DENOMINATOR_GUARD)
                .ok_or_else(|| Error::EvalDenominatorZero {
                    denominator: self.rhs.den().to_string(),
                })?;
            Ok(())
        };
        let mut state = init.to_vec();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        for _ in 0..steps {
            deriv(&state, &mut k1)?;
            for i in 0..n {
                tmp[i] = state[i] + 0.5 * h * k1[i];
            }
            deriv(&tmp, &mut k2)?;
            for i in 0..n {
                tmp[i] = state[i] + 0.5 * h * k2[i];
            }
            deriv(&tmp, &mut k3)?;
            for i in 0..n {
                tmp[i] = state[i] + h * k3[i];
            }
            deriv(&tmp, &mut k4)?;
            for i in 0..n {
                state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if state.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { time: f64::NAN });
            }
        }
        Ok(state)
    }
}

/// First-order function-system data: `N + 1` numerator/denominator pairs
/// in `N` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct A1Data {
    order: usize,
    u: Vec<MultiPoly>,
    v: Vec<MultiPoly>,
}

impl A1Data {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `U_i` for `i = 0..=N`.
    pub fn u(&self, i: usize) -> &MultiPoly {
        &self.u[i]
    }

    /// `V_i` for `i = 0..=N`.
    pub fn v(&self, i: usize) -> &MultiPoly {
        &self.v[i]
    }

    /// True when every `V_i` is the constant one, so all downstream
    /// constructions stay polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.v.iter().all(MultiPoly::is_one)
    }
}

/// Convert the explicit ODE form into first-order function-system data:
/// `U_0 = X1`, `V_0 = 1`; `U_i = X_{i+1}`, `V_i = 1` for `i < N`; and
/// `U_N/V_N` is the ODE right-hand side.
pub fn a2_to_a1(spec: &ActivationSpec) -> Result<A1Data> {
    let n = spec.order();
    let mut u = Vec::with_capacity(n + 1);
    let mut v = Vec::with_capacity(n + 1);
    for i in 0..n {
        u.push(MultiPoly::var(n, i));
        v.push(MultiPoly::one(n));
    }
    u.push(spec.rhs().num().clone());
    v.push(spec.rhs().den().clone());
    Ok(A1Data { order: n, u, v })
}

/// Residual report for the two defining identities of the function system.
#[derive(Clone, Debug)]
pub struct A1CheckReport {
    /// Max over samples of `|sigma * V_0(xi) - U_0(xi)|`.
    pub max_sigma_residual: f64,
    /// Max over samples and `i` of `|xidot_i * V_i(xi) - U_i(xi)|`.
    pub max_deriv_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Check the function-system identities numerically along samples.
///
/// `xi` comes from the activation's own evaluation path and the time
/// derivatives from central finite differences, so the check is
/// independent of the `(U_i, V_i)` data it validates.
pub fn check_a1(
    data: &A1Data,
    spec: &ActivationSpec,
    samples: &[f64],
    tolerance: f64,
) -> Result<A1CheckReport> {
    let fd_step = 1e-4;
    let mut max_sigma = 0.0f64;
    let mut max_deriv = 0.0f64;
    for &z in samples {
        let xi = spec.xi(z)?;
        let sigma = xi[0];
        let v0 = data.v(0).eval_f64(&xi);
        let u0 = data.u(0).eval_f64(&xi);
        max_sigma = max_sigma.max((sigma * v0 - u0).abs());

        let xi_plus = spec.xi(z + fd_step)?;
        let xi_minus = spec.xi(z - fd_step)?;
        for i in 1..=data.order() {
            let xidot = (xi_plus[i - 1] - xi_minus[i - 1]) / (2.0 * fd_step);
            let vi = data.v(i).eval_f64(&xi);
            let ui = data.u(i).eval_f64(&xi);
            max_deriv = max_deriv.max((xidot * vi - ui).abs());
        }
    }
    Ok(A1CheckReport {
        max_sigma_residual: max_sigma,
        max_deriv_residual: max_deriv,
        tolerance,
        samples: samples.len(),
        pass: max_sigma <= tolerance && max_deriv <= tolerance,
    })
}

/// Evenly spaced samples on `[lo, hi]`.
pub fn sample_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}
