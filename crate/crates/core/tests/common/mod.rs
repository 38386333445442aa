//! Shared generators for the integration suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ratnn::activation::ActivationSpec;
use ratnn::algebra::{scalar_frac, Scalar};
use ratnn::systems::{PwcInput, RnnSystem};

/// Random tanh/sigmoid RNN with rational weights of magnitude at most one.
pub fn random_rnn(rng: &mut ChaCha8Rng, n_max: usize, k_max: usize) -> RnnSystem {
    let n = rng.gen_range(1..=n_max);
    let m = rng.gen_range(1..=2);
    let p = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=k_max);
    let activation = if rng.gen_bool(0.5) {
        ActivationSpec::tanh()
    } else {
        ActivationSpec::sigmoid()
    };
    let mut mat = |rows: usize, cols: usize| -> Vec<Vec<Scalar>> {
        (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| scalar_frac(rng.gen_range(-4..=4), 4))
                    .collect()
            })
            .collect()
    };
    let a = mat(n, n);
    let b = mat(n, m);
    let c = mat(p, n);
    let x0: Vec<Scalar> = (0..n).map(|_| scalar_frac(rng.gen_range(-2..=2), 2)).collect();
    let mut alphabet: Vec<Vec<Scalar>> = Vec::new();
    while alphabet.len() < k {
        let letter: Vec<Scalar> = (0..m)
            .map(|_| scalar_frac(rng.gen_range(-4..=4), 2))
            .collect();
        if !alphabet.contains(&letter) {
            alphabet.push(letter);
        }
    }
    RnnSystem::new(a, b, c, x0, alphabet, activation).unwrap()
}

/// Variant with zero columns forced into C, so coordinate subspaces are
/// often nontrivial.
pub fn random_rnn_with_zero_columns(
    rng: &mut ChaCha8Rng,
    n_max: usize,
    k_max: usize,
) -> RnnSystem {
    let base = random_rnn(rng, n_max, k_max);
    let n = base.state_dim();
    let mut c = base.c().to_vec();
    for i in 0..n {
        if rng.gen_bool(0.4) {
            for row in &mut c {
                row[i] = Scalar::from_integer(0.into());
            }
        }
    }
    RnnSystem::new(
        base.a().to_vec(),
        base.b().to_vec(),
        c,
        base.x0().to_vec(),
        base.alphabet().to_vec(),
        base.activation().clone(),
    )
    .unwrap()
}

/// Three-piece piecewise-constant input over the system's alphabet.
pub fn random_input(rng: &mut ChaCha8Rng, num_letters: usize) -> PwcInput {
    let pieces = (0..3)
        .map(|_| {
            (
                rng.gen_range(0.5..2.5),
                rng.gen_range(0..num_letters),
            )
        })
        .collect();
    PwcInput::new(pieces).unwrap()
}
