//! Concrete system representations and numeric simulation.
//!
//! Two system classes are represented: the RNN `xdot = sigma(Ax + Bu)`,
//! `y = Cx` over a finite input alphabet, and rational systems
//! `vdot_i = P_{i,u}/Q_{i,u}(v)`, `y_k = h_{k,1}/h_{k,2}(v)`. Both are
//! simulated by fixed-step RK4 with integration nodes aligned to the
//! switch times of the piecewise-constant input.

mod simulate;

use std::io::Write;

use num_traits::Zero;

use crate::activation::ActivationSpec;
use crate::algebra::{scalar_to_f64, MultiPoly, RationalFunc, Scalar};
use crate::error::{Error, Result};

pub use simulate::{simulate_rational, simulate_rnn};
pub(crate) use simulate::rnn_single_step;

/// Magnitude below which a denominator counts as singular during
/// integration.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

/// A continuous-time recurrent neural network over a finite input alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct RnnSystem {
    a: Vec<Vec<Scalar>>,
    b: Vec<Vec<Scalar>>,
    c: Vec<Vec<Scalar>>,
    x0: Vec<Scalar>,
    alphabet: Vec<Vec<Scalar>>,
    activation: ActivationSpec,
}

impl RnnSystem {
    pub fn new(
        a: Vec<Vec<Scalar>>,
        b: Vec<Vec<Scalar>>,
        c: Vec<Vec<Scalar>>,
        x0: Vec<Scalar>,
        alphabet: Vec<Vec<Scalar>>,
        activation: ActivationSpec,
    ) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::Argument("state dimension must be positive".into()));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "field 'a': row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
        }
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "field 'b': {} rows, expected {n}",
                b.len()
            )));
        }
        let m = b.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(Error::Argument("input dimension must be positive".into()));
        }
        for (i, row) in b.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Dimension(format!(
                    "field 'b': row {} has {} entries, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
        }
        let p = c.len();
        if p == 0 {
            return Err(Error::Argument("output dimension must be positive".into()));
        }
        for (k, row) in c.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "field 'c': row {} has {} entries, expected {n}",
                    k + 1,
                    row.len()
                )));
            }
        }
        if x0.len() != n {
            return Err(Error::Dimension(format!(
                "field 'x0': length {}, expected {n}",
                x0.len()
            )));
        }
        if alphabet.is_empty() {
            return Err(Error::Argument(
                "field 'alphabet': the input alphabet must be a non-empty finite set".into(),
            ));
        }
        for (r, letter) in alphabet.iter().enumerate() {
            if letter.len() != m {
                return Err(Error::Dimension(format!(
                    "field 'alphabet': letter {} has {} entries, expected {m}",
                    r + 1,
                    letter.len()
                )));
            }
        }
        for i in 0..alphabet.len() {
            for j in i + 1..alphabet.len() {
                if alphabet[i] == alphabet[j] {
                    return Err(Error::Argument(format!(
                        "field 'alphabet': letters {} and {} are equal",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(RnnSystem {
            a,
            b,
            c,
            x0,
            alphabet,
            activation,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.a.len()
    }

    pub fn input_dim(&self) -> usize {
        self.b[0].len()
    }

    pub fn output_dim(&self) -> usize {
        self.c.len()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn a(&self) -> &[Vec<Scalar>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<Scalar>] {
        &self.b
    }

    pub fn c(&self) -> &[Vec<Scalar>] {
        &self.c
    }

    pub fn x0(&self) -> &[Scalar] {
        &self.x0
    }

    pub fn alphabet(&self) -> &[Vec<Scalar>] {
        &self.alphabet
    }

    pub fn activation(&self) -> &ActivationSpec {
        &self.activation
    }

    /// Exact `e_j^T (A x + B alpha)` for the letter with index `r`.
    pub fn drive_argument(&self, x: &[Scalar], r: usize, j: usize) -> Scalar {
        let mut acc = Scalar::zero();
        for (l, xl) in x.iter().enumerate() {
            acc += &self.a[j][l] * xl;
        }
        for (q, aq) in self.alphabet[r].iter().enumerate() {
            acc += &self.b[j][q] * aq;
        }
        acc
    }
}

/// A rational system: per-letter vector fields of polynomial fractions,
/// fractional outputs, and an initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSystemSpec {
    dim: usize,
    alphabet: Vec<Vec<Scalar>>,
    /// `fields[r][i]` is the fraction driving state `i` under letter `r`.
    fields: Vec<Vec<RationalFunc>>,
    outputs: Vec<RationalFunc>,
    v0: Vec<Scalar>,
    var_names: Vec<String>,
}

impl RationalSystemSpec {
    pub fn new(
        dim: usize,
        alphabet: Vec<Vec<Scalar>>,
        fields: Vec<Vec<RationalFunc>>,
        outputs: Vec<RationalFunc>,
        v0: Vec<Scalar>,
        var_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("state dimension must be positive".into()));
        }
        if alphabet.is_empty() {
            return Err(Error::Argument(
                "field 'alphabet': the input alphabet must be a non-empty finite set".into(),
            ));
        }
        if fields.len() != alphabet.len() {
            return Err(Error::Dimension(format!(
                "field 'fields': {} letter blocks, expected {}",
                fields.len(),
                alphabet.len()
            )));
        }
        for (r, block) in fields.iter().enumerate() {
            if block.len() != dim {
                return Err(Error::Dimension(format!(
                    "field 'fields': letter {} has {} state equations, expected {dim}",
                    r + 1,
                    block.len()
                )));
            }
            for (i, f) in block.iter().enumerate() {
                if f.num_vars() != dim {
                    return Err(Error::Dimension(format!(
                        "field 'fields': letter {} state {} uses {} variables, expected {dim}",
                        r + 1,
                        i + 1,
                        f.num_vars()
                    )));
                }
            }
        }
        if outputs.is_empty() {
            return Err(Error::Argument("at least one output is required".into()));
        }
        for (k, h) in outputs.iter().enumerate() {
            if h.num_vars() != dim {
                return Err(Error::Dimension(format!(
                    "field 'outputs': output {} uses {} variables, expected {dim}",
                    k + 1,
                    h.num_vars()
                )));
            }
        }
        if v0.len() != dim {
            return Err(Error::Dimension(format!(
                "field 'v0': length {}, expected {dim}",
                v0.len()
            )));
        }
        let var_names = match var_names {
            Some(names) => {
                if names.len() != dim {
                    return Err(Error::Dimension(format!(
                        "field 'var_names': {} names, expected {dim}",
                        names.len()
                    )));
                }
                names
            }
            None => (1..=dim).map(|i| format!("X{i}")).collect(),
        };
        Ok(RationalSystemSpec {
            dim,
            alphabet,
            fields,
            outputs,
            v0,
            var_names,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn alphabet(&self) -> &[Vec<Scalar>] {
        &self.alphabet
    }

    pub fn field(&self, letter: usize, state: usize) -> &RationalFunc {
        &self.fields[letter][state]
    }

    pub fn letter_field(&self, letter: usize) -> &[RationalFunc] {
        &self.fields[letter]
    }

    pub fn outputs(&self) -> &[RationalFunc] {
        &self.outputs
    }

    pub fn v0(&self) -> &[Scalar] {
        &self.v0
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    /// True iff every vector-field and output denominator is the constant
    /// one polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.fields
            .iter()
            .flatten()
            .chain(self.outputs.iter())
            .all(RationalFunc::is_polynomial)
    }
}

/// A piecewise-constant input: positive durations paired with alphabet
/// letter indices; the last letter is held forever.
#[derive(Clone, Debug, PartialEq)]
pub struct PwcInput {
    pieces: Vec<(f64, usize)>,
}

impl PwcInput {
    pub fn new(pieces: Vec<(f64, usize)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Argument("input needs at least one piece".into()));
        }
        for &(duration, _) in &pieces {
            if !(duration > 0.0) || !duration.is_finite() {
                return Err(Error::Argument(format!(
                    "piece durations must be positive and finite, got {duration}"
                )));
            }
        }
        Ok(PwcInput { pieces })
    }

    /// Constant input holding one letter.
    pub fn constant(letter: usize) -> Self {
        PwcInput {
            pieces: vec![(1.0, letter)],
        }
    }

    pub fn pieces(&self) -> &[(f64, usize)] {
        &self.pieces
    }

    pub fn max_letter(&self) -> usize {
        self.pieces.iter().map(|&(_, l)| l).max().unwrap()
    }

    /// Letter index active at time `t`; right-continuous at switches.
    pub fn letter_at(&self, t: f64) -> usize {
        let mut acc = 0.0;
        for (idx, &(duration, letter)) in self.pieces.iter().enumerate() {
            acc += duration;
            if t < acc || idx == self.pieces.len() - 1 {
                return letter;
            }
        }
        self.pieces.last().unwrap().1
    }

    /// Times at which the active letter may change (piece boundaries,
    /// excluding the open-ended final piece).
    pub fn switch_times(&self) -> Vec<f64> {
        let mut times = Vec::new();
        let mut acc = 0.0;
        for &(duration, _) in &self.pieces[..self.pieces.len() - 1] {
            acc += duration;
            times.push(acc);
        }
        times
    }
}

/// Sampled state/output time series on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
    pub letters: Vec<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state_dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn output_dim(&self) -> usize {
        self.outputs.first().map_or(0, Vec::len)
    }

    /// CSV export with header `t,x1..xn,y1..yp,input_letter_index`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "t")?;
        for i in 1..=self.state_dim() {
            write!(w, ",x{i}")?;
        }
        for k in 1..=self.output_dim() {
            write!(w, ",y{k}")?;
        }
        writeln!(w, ",input_letter_index")?;
        for idx in 0..self.len() {
            write!(w, "{}", self.times[idx])?;
            for v in &self.states[idx] {
                write!(w, ",{v}")?;
            }
            for v in &self.outputs[idx] {
                write!(w, ",{v}")?;
            }
            writeln!(w, ",{}", self.letters[idx])?;
        }
        Ok(())
    }
}

pub(crate) fn matrix_to_f64(m: &[Vec<Scalar>]) -> Vec<Vec<f64>> {
    m.iter()
        .map(|row| row.iter().map(scalar_to_f64).collect())
        .collect()
}

pub(crate) fn vector_to_f64(v: &[Scalar]) -> Vec<f64> {
    v.iter().map(scalar_to_f64).collect()
}

/// Shorthand for a polynomial fraction with unit denominator.
pub fn poly_fraction(p: MultiPoly) -> RationalFunc {
    RationalFunc::from_poly(p)
}
