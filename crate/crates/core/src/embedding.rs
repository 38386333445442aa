//! Symbolic construction of the rational systems attached to an RNN.
//!
//! For an RNN with activation data `(U_i, V_i)` of order `N`, `n` neurons
//! and `K` alphabet letters, the lifted system has one state
//! `v_{i,j,alpha}` per derivative index `i`, neuron `j`, and letter
//! `alpha`, plus a copy of the RNN state. The auxiliary system keeps only
//! the `v` block; its outputs realize the one-sided output derivatives of
//! the RNN along each letter. Both constructions are verified numerically
//! here by co-simulation against the RNN.

use num_traits::Zero;

use crate::activation::{a2_to_a1, A1Data};
use crate::algebra::{
    rat_combine, scalar_from_f64, scalar_to_f64, MultiPoly, RationalFunc, Scalar,
};
use crate::error::{Error, Result};
use crate::systems::{
    matrix_to_f64, rnn_single_step, simulate_rational, simulate_rnn, vector_to_f64, PwcInput,
    RationalSystemSpec, RnnSystem,
};

/// Flattening of `(derivative index, neuron, letter)` triples onto the
/// contiguous state indices of the lifted `v` block.
///
/// All indices are 0-based; the layout is neuron-major, then letter, then
/// derivative index, so `flat(i, j, r) = N*K*j + N*r + i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexMap {
    n_derivs: usize,
    n_neurons: usize,
    n_letters: usize,
}

impl IndexMap {
    pub fn new(n_derivs: usize, n_neurons: usize, n_letters: usize) -> Self {
        assert!(n_derivs > 0 && n_neurons > 0 && n_letters > 0);
        IndexMap {
            n_derivs,
            n_neurons,
            n_letters,
        }
    }

    pub fn for_system(sys: &RnnSystem) -> Self {
        IndexMap::new(
            sys.activation().order(),
            sys.state_dim(),
            sys.num_letters(),
        )
    }

    /// Size of the `v` block: `n * N * K`.
    pub fn upsilon_dim(&self) -> usize {
        self.n_derivs * self.n_neurons * self.n_letters
    }

    pub fn n_derivs(&self) -> usize {
        self.n_derivs
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    pub fn n_letters(&self) -> usize {
        self.n_letters
    }

    /// State index of `v_{i,j,alpha_r}`.
    pub fn flat(&self, deriv: usize, neuron: usize, letter: usize) -> Result<usize> {
        if deriv >= self.n_derivs || neuron >= self.n_neurons || letter >= self.n_letters {
            return Err(Error::Argument(format!(
                "index ({deriv}, {neuron}, {letter}) outside ({}, {}, {})",
                self.n_derivs, self.n_neurons, self.n_letters
            )));
        }
        Ok(self.n_derivs * self.n_letters * neuron + self.n_derivs * letter + deriv)
    }

    /// Inverse of [`IndexMap::flat`].
    pub fn decompose(&self, index: usize) -> Result<(usize, usize, usize)> {
        if index >= self.upsilon_dim() {
            return Err(Error::Argument(format!(
                "state index {index} outside the v block of size {}",
                self.upsilon_dim()
            )));
        }
        let per_neuron = self.n_derivs * self.n_letters;
        let neuron = index / per_neuron;
        let rem = index % per_neuron;
        Ok((rem % self.n_derivs, neuron, rem / self.n_derivs))
    }

    /// Variable indices of the tuple `v_{j,alpha_r}` inside a ring whose
    /// first `upsilon_dim()` variables are the `v` block.
    fn block_vars(&self, neuron: usize, letter: usize) -> Result<Vec<usize>> {
        (0..self.n_derivs)
            .map(|i| self.flat(i, neuron, letter))
            .collect()
    }
}

/// `U_q / V_q` applied to the variable tuple of block `(neuron, letter)`
/// inside a ring of `total_vars` variables.
fn applied_pair(
    a1: &A1Data,
    q: usize,
    map: &IndexMap,
    neuron: usize,
    letter: usize,
    total_vars: usize,
) -> Result<RationalFunc> {
    let vars = map.block_vars(neuron, letter)?;
    RationalFunc::new(
        a1.u(q).embed(total_vars, &vars)?,
        a1.v(q).embed(total_vars, &vars)?,
    )
}

/// The `v`-block vector fields shared by both constructions, expressed in
/// a ring of `total_vars >= upsilon_dim` variables.
///
/// Under active letter `beta`, the state `v_{i,j,alpha}` is driven by
/// `U_i/V_i(v_{j,alpha})` times the common-denominator sum over `l` of
/// `a_{j,l} U_0/V_0(v_{l,beta})`.
fn upsilon_fields(
    sys: &RnnSystem,
    a1: &A1Data,
    map: &IndexMap,
    total_vars: usize,
) -> Result<Vec<Vec<RationalFunc>>> {
    let n = sys.state_dim();
    let mut per_letter = Vec::with_capacity(map.n_letters());
    for beta in 0..map.n_letters() {
        // The bracket sum depends on the neuron row and the active letter.
        let brackets: Vec<RationalFunc> = (0..n)
            .map(|j| {
                let terms: Vec<RationalFunc> = (0..n)
                    .map(|l| {
                        Ok(applied_pair(a1, 0, map, l, beta, total_vars)?
                            .scale(&sys.a()[j][l]))
                    })
                    .collect::<Result<Vec<_>>>()?;
                rat_combine(&terms)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut fields = vec![RationalFunc::zero(total_vars); map.upsilon_dim()];
        for j in 0..n {
            for alpha in 0..map.n_letters() {
                for i in 0..map.n_derivs() {
                    let own = applied_pair(a1, i + 1, map, j, alpha, total_vars)?;
                    fields[map.flat(i, j, alpha)?] = own.mul(&brackets[j])?;
                }
            }
        }
        per_letter.push(fields);
    }
    Ok(per_letter)
}

/// Numeric initial value of the `v` block:
/// `v_{i,j,alpha}(0) = xi_i(e_j^T (A x0 + B alpha))`, embedded into the
/// exact system as the precise rational value of the computed double.
fn upsilon_init(sys: &RnnSystem, map: &IndexMap) -> Result<Vec<Scalar>> {
    let mut v0 = vec![Scalar::zero(); map.upsilon_dim()];
    for j in 0..map.n_neurons() {
        for r in 0..map.n_letters() {
            let z = scalar_to_f64(&sys.drive_argument(sys.x0(), r, j));
            let xi = sys.activation().xi(z)?;
            for i in 0..map.n_derivs() {
                v0[map.flat(i, j, r)?] = scalar_from_f64(xi[i])?;
            }
        }
    }
    Ok(v0)
}

fn upsilon_var_names(map: &IndexMap) -> Vec<String> {
    let mut names = vec![String::new(); map.upsilon_dim()];
    for j in 0..map.n_neurons() {
        for r in 0..map.n_letters() {
            for i in 0..map.n_derivs() {
                names[map.flat(i, j, r).unwrap()] =
                    format!("v_{}_{}_alpha{}", i + 1, j + 1, r + 1);
            }
        }
    }
    names
}

/// Build the lifted rational system of dimension `n(1 + NK)`: the `v`
/// block followed by a copy of the RNN state, with outputs `C x`.
pub fn build_r_sigma(sys: &RnnSystem) -> Result<RationalSystemSpec> {
    let a1 = a2_to_a1(sys.activation())
        .map_err(|e| Error::Config(format!("activation function data unavailable: {e}")))?;
    let map = IndexMap::for_system(sys);
    let n = sys.state_dim();
    let vdim = map.upsilon_dim();
    let total = vdim + n;

    let mut fields = upsilon_fields(sys, &a1, &map, total)?;
    for (beta, block) in fields.iter_mut().enumerate() {
        for j in 0..n {
            block.push(applied_pair(&a1, 0, &map, j, beta, total)?);
        }
        debug_assert_eq!(block.len(), total);
    }

    let outputs: Vec<RationalFunc> = (0..sys.output_dim())
        .map(|k| {
            let mut num = MultiPoly::zero(total);
            for i in 0..n {
                num = num.add(&MultiPoly::var(total, vdim + i).scale(&sys.c()[k][i]))?;
            }
            Ok(RationalFunc::from_poly(num))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut v0 = upsilon_init(sys, &map)?;
    v0.extend(sys.x0().iter().cloned());

    let mut names = upsilon_var_names(&map);
    names.extend((1..=n).map(|j| format!("x_{j}")));

    RationalSystemSpec::new(
        total,
        sys.alphabet().to_vec(),
        fields,
        outputs,
        v0,
        Some(names),
    )
}

/// Build the auxiliary rational system of dimension `nNK`: the `v` block
/// alone, with one output per (letter, output row) pair realizing the
/// one-sided output derivative along that letter. Outputs come in
/// letter-major blocks.
pub fn build_r_aux(sys: &RnnSystem) -> Result<RationalSystemSpec> {
    let a1 = a2_to_a1(sys.activation())
        .map_err(|e| Error::Config(format!("activation function data unavailable: {e}")))?;
    let map = IndexMap::for_system(sys);
    let n = sys.state_dim();
    let total = map.upsilon_dim();

    let fields = upsilon_fields(sys, &a1, &map, total)?;

    let mut outputs = Vec::with_capacity(map.n_letters() * sys.output_dim());
    for r in 0..map.n_letters() {
        for k in 0..sys.output_dim() {
            let terms: Vec<RationalFunc> = (0..n)
                .map(|i| Ok(applied_pair(&a1, 0, &map, i, r, total)?.scale(&sys.c()[k][i])))
                .collect::<Result<Vec<_>>>()?;
            outputs.push(rat_combine(&terms)?);
        }
    }

    let v0 = upsilon_init(sys, &map)?;
    let names = upsilon_var_names(&map);

    RationalSystemSpec::new(
        total,
        sys.alphabet().to_vec(),
        fields,
        outputs,
        v0,
        Some(names),
    )
}

/// The embedding map `F(x)`: the `v` block evaluated at `x` followed by
/// `x` itself, computed in double precision.
pub fn embed_state(sys: &RnnSystem, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != sys.state_dim() {
        return Err(Error::Dimension(format!(
            "state has length {}, expected {}",
            x.len(),
            sys.state_dim()
        )));
    }
    let map = IndexMap::for_system(sys);
    let a = matrix_to_f64(sys.a());
    let b = matrix_to_f64(sys.b());
    let letters: Vec<Vec<f64>> = sys.alphabet().iter().map(|l| vector_to_f64(l)).collect();

    let mut out = vec![0.0; map.upsilon_dim() + sys.state_dim()];
    for j in 0..map.n_neurons() {
        for r in 0..map.n_letters() {
            let mut z = 0.0;
            for (l, xl) in x.iter().enumerate() {
                z += a[j][l] * xl;
            }
            for (q, aq) in letters[r].iter().enumerate() {
                z += b[j][q] * aq;
            }
            let xi = sys.activation().xi(z)?;
            for i in 0..map.n_derivs() {
                out[map.flat(i, j, r)?] = xi[i];
            }
        }
    }
    for (j, xj) in x.iter().enumerate() {
        out[map.upsilon_dim() + j] = *xj;
    }
    Ok(out)
}

/// Co-simulation comparison of the lifted system against the embedded RNN
/// trajectory.
#[derive(Clone, Debug)]
pub struct EmbeddingReport {
    /// `sup_t || v(t) - F(x(t)) ||_inf`
    pub max_state_deviation: f64,
    /// `sup_t || y_lifted(t) - y_rnn(t) ||_inf`
    pub max_output_deviation: f64,
    pub horizon: f64,
    pub step: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Simulate the RNN and its lifted system on the same grid and compare.
pub fn verify_embedding(
    sys: &RnnSystem,
    input: &PwcInput,
    horizon: f64,
    step: f64,
    tolerance: f64,
) -> Result<EmbeddingReport> {
    let r_sigma = build_r_sigma(sys)?;
    verify_embedding_with(sys, &r_sigma, input, horizon, step, tolerance)
}

/// Same as [`verify_embedding`] but against a caller-supplied lifted
/// system, so deliberate corruptions can be detected in tests.
pub fn verify_embedding_with(
    sys: &RnnSystem,
    r_sigma: &RationalSystemSpec,
    input: &PwcInput,
    horizon: f64,
    step: f64,
    tolerance: f64,
) -> Result<EmbeddingReport> {
    let rnn_traj = simulate_rnn(sys, input, horizon, step)?;
    let rat_traj = simulate_rational(r_sigma, input, horizon, step)?;
    debug_assert_eq!(rnn_traj.len(), rat_traj.len());

    let mut max_state = 0.0f64;
    let mut max_output = 0.0f64;
    for idx in 0..rnn_traj.len() {
        let embedded = embed_state(sys, &rnn_traj.states[idx])?;
        for (a, b) in embedded.iter().zip(&rat_traj.states[idx]) {
            max_state = max_state.max((a - b).abs());
        }
        for (a, b) in rnn_traj.outputs[idx].iter().zip(&rat_traj.outputs[idx]) {
            max_output = max_output.max((a - b).abs());
        }
    }
    Ok(EmbeddingReport {
        max_state_deviation: max_state,
        max_output_deviation: max_output,
        horizon,
        step,
        tolerance,
        pass: max_state <= tolerance && max_output <= tolerance,
    })
}

/// Closed form of the one-sided output derivative along letter `r` at
/// state `x`: the `k`-th entry is
/// `sum_i c_{k,i} sigma(sum_j a_{i,j} x_j + e_i^T B alpha_r)`.
pub fn derivative_output_closed_form(sys: &RnnSystem, x: &[f64], r: usize) -> Result<Vec<f64>> {
    if r >= sys.num_letters() {
        return Err(Error::Argument(format!(
            "letter index {r} out of range for {} letters",
            sys.num_letters()
        )));
    }
    let a = matrix_to_f64(sys.a());
    let b = matrix_to_f64(sys.b());
    let c = matrix_to_f64(sys.c());
    let alpha = vector_to_f64(&sys.alphabet()[r]);
    let n = sys.state_dim();
    let mut sigma_vals = vec![0.0; n];
    for i in 0..n {
        let mut z = 0.0;
        for (j, xj) in x.iter().enumerate() {
            z += a[i][j] * xj;
        }
        for (q, aq) in alpha.iter().enumerate() {
            z += b[i][q] * aq;
        }
        sigma_vals[i] = sys.activation().sigma_eval(z)?;
    }
    Ok(c.iter()
        .map(|row| row.iter().zip(&sigma_vals).map(|(cki, s)| cki * s).sum())
        .collect())
}

/// Step used by the finite-difference leg of [`verify_aux`].
pub const FD_STEP: f64 = 1e-6;

/// Comparison of the auxiliary system's outputs against two independent
/// oracles along an RNN trajectory.
#[derive(Clone, Debug)]
pub struct AuxReport {
    /// Max deviation from the closed form of the output derivatives.
    pub max_closed_form_deviation: f64,
    /// Max deviation from forward finite differences of switched outputs.
    pub max_finite_difference_deviation: f64,
    pub tol_closed: f64,
    pub tol_fd: f64,
    pub horizon: f64,
    pub step: f64,
    pub pass: bool,
}

/// Simulate the auxiliary system and the RNN on the same grid; check the
/// auxiliary outputs against (a) the closed-form derivative along the RNN
/// trajectory and (b) forward finite differences of the output after
/// switching the input to each constant letter.
pub fn verify_aux(
    sys: &RnnSystem,
    input: &PwcInput,
    horizon: f64,
    step: f64,
    tol_closed: f64,
    tol_fd: f64,
) -> Result<AuxReport> {
    let r_aux = build_r_aux(sys)?;
    verify_aux_with(sys, &r_aux, input, horizon, step, tol_closed, tol_fd)
}

pub fn verify_aux_with(
    sys: &RnnSystem,
    r_aux: &RationalSystemSpec,
    input: &PwcInput,
    horizon: f64,
    step: f64,
    tol_closed: f64,
    tol_fd: f64,
) -> Result<AuxReport> {
    let rnn_traj = simulate_rnn(sys, input, horizon, step)?;
    let aux_traj = simulate_rational(r_aux, input, horizon, step)?;
    debug_assert_eq!(rnn_traj.len(), aux_traj.len());

    let c = matrix_to_f64(sys.c());
    let p = sys.output_dim();
    let k_letters = sys.num_letters();
    let mut max_closed = 0.0f64;
    let mut max_fd = 0.0f64;

    for idx in 0..rnn_traj.len() {
        let x = &rnn_traj.states[idx];
        let aux_out = &aux_traj.outputs[idx];
        for r in 0..k_letters {
            let closed = derivative_output_closed_form(sys, x, r)?;
            // Hold letter r from this state and difference the output.
            let x_next = rnn_single_step(sys, x, r, FD_STEP)?;
            for k in 0..p {
                let aux_value = aux_out[r * p + k];
                max_closed = max_closed.max((aux_value - closed[k]).abs());
                let y_now: f64 = c[k].iter().zip(x).map(|(cki, xj)| cki * xj).sum();
                let y_next: f64 = c[k].iter().zip(&x_next).map(|(cki, xj)| cki * xj).sum();
                let fd = (y_next - y_now) / FD_STEP;
                max_fd = max_fd.max((aux_value - fd).abs());
            }
        }
    }
    Ok(AuxReport {
        max_closed_form_deviation: max_closed,
        max_finite_difference_deviation: max_fd,
        tol_closed,
        tol_fd,
        horizon,
        step,
        pass: max_closed <= tol_closed && max_fd <= tol_fd,
    })
}
