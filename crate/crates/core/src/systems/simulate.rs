//! Fixed-step RK4 integration of RNNs and rational systems.
//!
//! The sampling grid is uniform; when a switch time of the input falls
//! strictly inside a grid step, the step is subdivided at the switch so
//! every RK4 substep sees a constant letter. Identical inputs give
//! bit-identical trajectories.

use num_traits::Zero;

use super::{
    matrix_to_f64, vector_to_f64, PwcInput, RationalSystemSpec, RnnSystem, Trajectory,
    DENOMINATOR_GUARD,
};
use crate::algebra::{scalar_to_f64, MultiPoly, RationalFunc};
use crate::error::{Error, Result};

/// Term-list form of a polynomial for fast double-precision evaluation.
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    fn compile(p: &MultiPoly) -> Self {
        let terms = p
            .terms()
            .map(|(mono, coeff)| {
                let factors: Vec<(usize, u32)> = mono
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(i, e)| (i, *e))
                    .collect();
                (scalar_to_f64(coeff), factors)
            })
            .collect();
        CompiledPoly { terms }
    }

    fn eval(&self, state: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (coeff, factors) in &self.terms {
            let mut term = *coeff;
            for &(var, exp) in factors {
                for _ in 0..exp {
                    term *= state[var];
                }
            }
            acc += term;
        }
        acc
    }
}

struct CompiledFrac {
    num: CompiledPoly,
    den: Option<CompiledPoly>,
    den_text: String,
}

impl CompiledFrac {
    fn compile(f: &RationalFunc) -> Self {
        CompiledFrac {
            num: CompiledPoly::compile(f.num()),
            den: (!f.is_polynomial()).then(|| CompiledPoly::compile(f.den())),
            den_text: f.den().to_string(),
        }
    }

    fn eval(&self, state: &[f64], time: f64) -> Result<f64> {
        let num = self.num.eval(state);
        match &self.den {
            None => Ok(num),
            Some(den) => {
                let d = den.eval(state);
                if d.abs() < DENOMINATOR_GUARD {
                    return Err(Error::Singularity {
                        time,
                        state: state.to_vec(),
                        what: self.den_text.clone(),
                    });
                }
                Ok(num / d)
            }
        }
    }
}

/// One RK4 step of size `h` from `state`, letter held constant.
fn rk4_step<F>(state: &mut Vec<f64>, t: f64, h: f64, letter: usize, deriv: &mut F) -> Result<()>
where
    F: FnMut(f64, &[f64], usize, &mut [f64]) -> Result<()>,
{
    let dim = state.len();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];

    deriv(t, state, letter, &mut k1)?;
    for i in 0..dim {
        tmp[i] = state[i] + 0.5 * h * k1[i];
    }
    deriv(t + 0.5 * h, &tmp, letter, &mut k2)?;
    for i in 0..dim {
        tmp[i] = state[i] + 0.5 * h * k2[i];
    }
    deriv(t + 0.5 * h, &tmp, letter, &mut k3)?;
    for i in 0..dim {
        tmp[i] = state[i] + h * k3[i];
    }
    deriv(t + h, &tmp, letter, &mut k4)?;
    for i in 0..dim {
        state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(())
}

/// Drive a vector field over the grid, subdividing steps at input switches.
fn rk4_drive<F, G>(
    v0: &[f64],
    input: &PwcInput,
    horizon: f64,
    step: f64,
    mut deriv: F,
    mut output: G,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], usize, &mut [f64]) -> Result<()>,
    G: FnMut(f64, &[f64], usize) -> Result<Vec<f64>>,
{
    if !(step > 0.0) || !(horizon > 0.0) {
        return Err(Error::Argument(format!(
            "horizon and step must be positive (got horizon {horizon}, step {step})"
        )));
    }
    let n_steps = ((horizon / step).round() as usize).max(1);
    let switches = input.switch_times();

    let mut state = v0.to_vec();
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut outputs = Vec::with_capacity(n_steps + 1);
    let mut letters = Vec::with_capacity(n_steps + 1);

    let record = |t: f64,
                  state: &[f64],
                  times: &mut Vec<f64>,
                  states: &mut Vec<Vec<f64>>,
                  outputs: &mut Vec<Vec<f64>>,
                  letters: &mut Vec<usize>,
                  output: &mut G|
     -> Result<()> {
        let letter = input.letter_at(t);
        outputs.push(output(t, state, letter)?);
        times.push(t);
        states.push(state.to_vec());
        letters.push(letter);
        Ok(())
    };

    record(
        0.0, &state, &mut times, &mut states, &mut outputs, &mut letters, &mut output,
    )?;

    let eps = step * 1e-9;
    for k in 0..n_steps {
        let t0 = k as f64 * step;
        let t1 = (k + 1) as f64 * step;
        // Break the step at any switch strictly inside it.
        let mut cuts: Vec<f64> = switches
            .iter()
            .copied()
            .filter(|&s| s > t0 + eps && s < t1 - eps)
            .collect();
        cuts.push(t1);
        let mut a = t0;
        for b in cuts {
            let letter = input.letter_at(0.5 * (a + b));
            rk4_step(&mut state, a, b - a, letter, &mut deriv)?;
            a = b;
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { time: t1 });
        }
        record(
            t1, &state, &mut times, &mut states, &mut outputs, &mut letters, &mut output,
        )?;
    }

    Ok(Trajectory {
        times,
        states,
        outputs,
        letters,
    })
}

/// The RNN right-hand side `sigma(Ax + B alpha)` as a reusable closure
/// over double-precision copies of the weights.
pub(crate) fn rnn_vector_field(
    sys: &RnnSystem,
) -> impl FnMut(f64, &[f64], usize, &mut [f64]) -> Result<()> {
    let n = sys.state_dim();
    let a = matrix_to_f64(sys.a());
    let b = matrix_to_f64(sys.b());
    let letters: Vec<Vec<f64>> = sys.alphabet().iter().map(|l| vector_to_f64(l)).collect();
    let activation = sys.activation().clone();
    move |_t: f64, state: &[f64], letter: usize, out: &mut [f64]| -> Result<()> {
        let alpha = &letters[letter];
        for i in 0..n {
            let mut z = 0.0;
            for (l, xl) in state.iter().enumerate() {
                z += a[i][l] * xl;
            }
            for (q, aq) in alpha.iter().enumerate() {
                z += b[i][q] * aq;
            }
            out[i] = activation.sigma_eval(z)?;
        }
        Ok(())
    }
}

/// One RK4 step of the RNN field from `state` with a constant letter.
pub(crate) fn rnn_single_step(
    sys: &RnnSystem,
    state: &[f64],
    letter: usize,
    h: f64,
) -> Result<Vec<f64>> {
    let mut deriv = rnn_vector_field(sys);
    let mut next = state.to_vec();
    rk4_step(&mut next, 0.0, h, letter, &mut deriv)?;
    Ok(next)
}

/// Simulate an RNN under a piecewise-constant input.
pub fn simulate_rnn(
    sys: &RnnSystem,
    input: &PwcInput,
    horizon: f64,
    step: f64,
) -> Result<Trajectory> {
    if input.max_letter() >= sys.num_letters() {
        return Err(Error::Argument(format!(
            "input references letter {} but the alphabet has {} letters",
            input.max_letter() + 1,
            sys.num_letters()
        )));
    }
    let c = matrix_to_f64(sys.c());
    let x0 = vector_to_f64(sys.x0());
    let deriv = rnn_vector_field(sys);
    let output = move |_t: f64, state: &[f64], _letter: usize| -> Result<Vec<f64>> {
        Ok(c.iter()
            .map(|row| row.iter().zip(state).map(|(cij, xj)| cij * xj).sum())
            .collect())
    };
    rk4_drive(&x0, input, horizon, step, deriv, output)
}

/// Simulate a rational system under a piecewise-constant input.
///
/// Requires every vector-field and output denominator to be nonzero at
/// the initial state (checked exactly); during integration a denominator
/// magnitude below 1e-12 aborts with a singularity error.
pub fn simulate_rational(
    sys: &RationalSystemSpec,
    input: &PwcInput,
    horizon: f64,
    step: f64,
) -> Result<Trajectory> {
    if input.max_letter() >= sys.num_letters() {
        return Err(Error::Argument(format!(
            "input references letter {} but the alphabet has {} letters",
            input.max_letter() + 1,
            sys.num_letters()
        )));
    }
    for r in 0..sys.num_letters() {
        for i in 0..sys.dim() {
            let q = sys.field(r, i).den();
            if q.eval(sys.v0())?.is_zero() {
                return Err(Error::Argument(format!(
                    "vector-field denominator for letter {} state {} vanishes at the initial state",
                    r + 1,
                    i + 1
                )));
            }
        }
    }
    for (k, h) in sys.outputs().iter().enumerate() {
        if h.den().eval(sys.v0())?.is_zero() {
            return Err(Error::Argument(format!(
                "output denominator {} vanishes at the initial state",
                k + 1
            )));
        }
    }

    let dim = sys.dim();
    let fields: Vec<Vec<CompiledFrac>> = (0..sys.num_letters())
        .map(|r| sys.letter_field(r).iter().map(CompiledFrac::compile).collect())
        .collect();
    let outs: Vec<CompiledFrac> = sys.outputs().iter().map(CompiledFrac::compile).collect();
    let v0 = vector_to_f64(sys.v0());

    let deriv = move |t: f64, state: &[f64], letter: usize, out: &mut [f64]| -> Result<()> {
        for i in 0..dim {
            out[i] = fields[letter][i].eval(state, t)?;
        }
        Ok(())
    };
    let output = move |t: f64, state: &[f64], _letter: usize| -> Result<Vec<f64>> {
        outs.iter().map(|h| h.eval(state, t)).collect()
    };
    rk4_drive(&v0, input, horizon, step, deriv, output)
}
