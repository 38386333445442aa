//! JSON document formats for systems, inputs and reports.
//!
//! Exact rationals travel as `"p/q"` strings (plain JSON integers are
//! also accepted on input); polynomials travel in the canonical text
//! form, so emitted documents re-parse to symbolically identical
//! systems. Every document carries a versioned `schema` field.

use serde::{Deserialize, Serialize};

use crate::activation::{ActivationSpec, ClosedForm};
use crate::algebra::{parse_poly, parse_scalar, scalar_to_string, RationalFunc, Scalar};
use crate::error::{Error, Result};
use crate::systems::{PwcInput, RationalSystemSpec, RnnSystem};

pub const RNN_SCHEMA: &str = "rnn-system/1";
pub const RATIONAL_SCHEMA: &str = "rational-system/1";

/// Exact rational in transit: emitted as a string, accepted as a string
/// (`"p/q"`, `"p"`, or a finite decimal) or a plain JSON integer.
#[derive(Clone, Debug, PartialEq)]
pub struct RatText(pub Scalar);

impl Serialize for RatText {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&scalar_to_string(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatText {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(v) => Ok(RatText(crate::algebra::scalar_int(v))),
            Repr::Text(s) => parse_scalar(&s)
                .map(RatText)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActivationDoc {
    pub name: String,
    pub order: usize,
    pub rhs_num: String,
    pub rhs_den: String,
    pub init: Vec<RatText>,
    pub invertible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<String>,
}

/// Activation by built-in name or inline ODE data.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActivationField {
    Name(String),
    Inline(ActivationDoc),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PieceDoc {
    pub duration: f64,
    pub letter_index: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputDoc {
    pub pieces: Vec<PieceDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RnnDoc {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub a: Vec<Vec<RatText>>,
    pub b: Vec<Vec<RatText>>,
    pub c: Vec<Vec<RatText>>,
    pub x0: Vec<RatText>,
    pub alphabet: Vec<Vec<RatText>>,
    pub activation: ActivationField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FracDoc {
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LetterFieldsDoc {
    pub letter_index: usize,
    pub states: Vec<FracDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalDoc {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub var_names: Vec<String>,
    pub alphabet: Vec<Vec<RatText>>,
    pub vector_fields: Vec<LetterFieldsDoc>,
    pub outputs: Vec<FracDoc>,
    pub v0: Vec<RatText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputDoc>,
}

/// A parsed system document of either kind.
#[derive(Debug)]
pub enum ParsedSystem {
    Rnn {
        system: RnnSystem,
        input: Option<PwcInput>,
    },
    Rational {
        system: RationalSystemSpec,
        input: Option<PwcInput>,
    },
}

impl ParsedSystem {
    pub fn input(&self) -> Option<&PwcInput> {
        match self {
            ParsedSystem::Rnn { input, .. } | ParsedSystem::Rational { input, .. } => {
                input.as_ref()
            }
        }
    }

    pub fn num_letters(&self) -> usize {
        match self {
            ParsedSystem::Rnn { system, .. } => system.num_letters(),
            ParsedSystem::Rational { system, .. } => system.num_letters(),
        }
    }
}

fn mat_to_doc(m: &[Vec<Scalar>]) -> Vec<Vec<RatText>> {
    m.iter()
        .map(|row| row.iter().map(|s| RatText(s.clone())).collect())
        .collect()
}

fn mat_from_doc(m: &[Vec<RatText>]) -> Vec<Vec<Scalar>> {
    m.iter()
        .map(|row| row.iter().map(|s| s.0.clone()).collect())
        .collect()
}

fn vec_to_doc(v: &[Scalar]) -> Vec<RatText> {
    v.iter().map(|s| RatText(s.clone())).collect()
}

fn vec_from_doc(v: &[RatText]) -> Vec<Scalar> {
    v.iter().map(|s| s.0.clone()).collect()
}

fn frac_to_doc(f: &RationalFunc) -> FracDoc {
    FracDoc {
        num: f.num().to_string(),
        den: f.den().to_string(),
    }
}

fn frac_from_doc(doc: &FracDoc, num_vars: usize, what: &str) -> Result<RationalFunc> {
    let num = parse_poly(&doc.num, num_vars)
        .map_err(|e| Error::Parse(format!("{what}: numerator: {e}")))?;
    let den = parse_poly(&doc.den, num_vars)
        .map_err(|e| Error::Parse(format!("{what}: denominator: {e}")))?;
    RationalFunc::new(num, den).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn activation_to_field(act: &ActivationSpec) -> ActivationField {
    if let Some(builtin) = ActivationSpec::by_name(act.name()) {
        if builtin == *act {
            return ActivationField::Name(act.name().to_string());
        }
    }
    ActivationField::Inline(ActivationDoc {
        name: act.name().to_string(),
        order: act.order(),
        rhs_num: act.rhs().num().to_string(),
        rhs_den: act.rhs().den().to_string(),
        init: vec_to_doc(act.init()),
        invertible: act.is_invertible(),
        closed_form: act.closed_form().map(|cf| cf.tag().to_string()),
    })
}

fn activation_from_field(field: &ActivationField) -> Result<ActivationSpec> {
    match field {
        ActivationField::Name(name) => ActivationSpec::by_name(name).ok_or_else(|| {
            Error::Parse(format!(
                "field 'activation': unknown built-in `{name}` (expected tanh, sigmoid, or \
                 identity, or an inline object)"
            ))
        }),
        ActivationField::Inline(doc) => {
            let rhs = frac_from_doc(
                &FracDoc {
                    num: doc.rhs_num.clone(),
                    den: doc.rhs_den.clone(),
                },
                doc.order,
                "field 'activation.rhs'",
            )?;
            let closed_form = match &doc.closed_form {
                None => None,
                Some(tag) => Some(ClosedForm::from_tag(tag).ok_or_else(|| {
                    Error::Parse(format!("field 'activation.closed_form': unknown tag `{tag}`"))
                })?),
            };
            ActivationSpec::new(
                doc.name.clone(),
                doc.order,
                rhs,
                vec_from_doc(&doc.init),
                doc.invertible,
                closed_form,
            )
        }
    }
}

fn input_to_doc(input: &PwcInput) -> InputDoc {
    InputDoc {
        pieces: input
            .pieces()
            .iter()
            .map(|&(duration, letter_index)| PieceDoc {
                duration,
                letter_index,
            })
            .collect(),
    }
}

fn input_from_doc(doc: &InputDoc, num_letters: usize) -> Result<PwcInput> {
    for (i, piece) in doc.pieces.iter().enumerate() {
        if piece.letter_index >= num_letters {
            return Err(Error::Parse(format!(
                "field 'input.pieces[{i}].letter_index': {} out of range (alphabet has {} letters)",
                piece.letter_index, num_letters
            )));
        }
    }
    PwcInput::new(
        doc.pieces
            .iter()
            .map(|p| (p.duration, p.letter_index))
            .collect(),
    )
}

/// Document form of an RNN, optionally with an input section.
pub fn rnn_document(sys: &RnnSystem, input: Option<&PwcInput>) -> RnnDoc {
    RnnDoc {
        schema: RNN_SCHEMA.into(),
        name: None,
        a: mat_to_doc(sys.a()),
        b: mat_to_doc(sys.b()),
        c: mat_to_doc(sys.c()),
        x0: vec_to_doc(sys.x0()),
        alphabet: mat_to_doc(sys.alphabet()),
        activation: activation_to_field(sys.activation()),
        input: input.map(input_to_doc),
    }
}

/// Document form of a rational system, optionally with an input section.
pub fn rational_document(sys: &RationalSystemSpec, input: Option<&PwcInput>) -> RationalDoc {
    RationalDoc {
        schema: RATIONAL_SCHEMA.into(),
        name: None,
        dim: sys.dim(),
        var_names: sys.var_names().to_vec(),
        alphabet: mat_to_doc(sys.alphabet()),
        vector_fields: (0..sys.num_letters())
            .map(|r| LetterFieldsDoc {
                letter_index: r,
                states: sys.letter_field(r).iter().map(frac_to_doc).collect(),
            })
            .collect(),
        outputs: sys.outputs().iter().map(frac_to_doc).collect(),
        v0: vec_to_doc(sys.v0()),
        input: input.map(input_to_doc),
    }
}

pub fn rnn_from_doc(doc: &RnnDoc) -> Result<(RnnSystem, Option<PwcInput>)> {
    let activation = activation_from_field(&doc.activation)?;
    let system = RnnSystem::new(
        mat_from_doc(&doc.a),
        mat_from_doc(&doc.b),
        mat_from_doc(&doc.c),
        vec_from_doc(&doc.x0),
        mat_from_doc(&doc.alphabet),
        activation,
    )?;
    let input = doc
        .input
        .as_ref()
        .map(|d| input_from_doc(d, system.num_letters()))
        .transpose()?;
    Ok((system, input))
}

pub fn rational_from_doc(doc: &RationalDoc) -> Result<(RationalSystemSpec, Option<PwcInput>)> {
    let k = doc.alphabet.len();
    let mut fields: Vec<Option<Vec<RationalFunc>>> = vec![None; k];
    for block in &doc.vector_fields {
        if block.letter_index >= k {
            return Err(Error::Parse(format!(
                "field 'vector_fields': letter_index {} out of range (alphabet has {k} letters)",
                block.letter_index
            )));
        }
        if fields[block.letter_index].is_some() {
            return Err(Error::Parse(format!(
                "field 'vector_fields': duplicate block for letter_index {}",
                block.letter_index
            )));
        }
        let states = block
            .states
            .iter()
            .enumerate()
            .map(|(i, f)| {
                frac_from_doc(
                    f,
                    doc.dim,
                    &format!("field 'vector_fields[{}].states[{i}]'", block.letter_index),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        fields[block.letter_index] = Some(states);
    }
    let fields = fields
        .into_iter()
        .enumerate()
        .map(|(r, f)| {
            f.ok_or_else(|| {
                Error::Parse(format!("field 'vector_fields': missing block for letter_index {r}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let outputs = doc
        .outputs
        .iter()
        .enumerate()
        .map(|(kk, f)| frac_from_doc(f, doc.dim, &format!("field 'outputs[{kk}]'")))
        .collect::<Result<Vec<_>>>()?;
    let system = RationalSystemSpec::new(
        doc.dim,
        mat_from_doc(&doc.alphabet),
        fields,
        outputs,
        vec_from_doc(&doc.v0),
        Some(doc.var_names.clone()),
    )?;
    let input = doc
        .input
        .as_ref()
        .map(|d| input_from_doc(d, system.num_letters()))
        .transpose()?;
    Ok((system, input))
}

/// Parse a system document of either kind, dispatching on `schema`.
pub fn parse_system(text: &str) -> Result<ParsedSystem> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let schema = value
        .get("schema")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Parse("missing string field 'schema'".into()))?;
    match schema {
        RNN_SCHEMA => {
            let doc: RnnDoc = serde_json::from_value(value)
                .map_err(|e| Error::Parse(format!("bad RNN document: {e}")))?;
            let (system, input) = rnn_from_doc(&doc)?;
            Ok(ParsedSystem::Rnn { system, input })
        }
        RATIONAL_SCHEMA => {
            let doc: RationalDoc = serde_json::from_value(value)
                .map_err(|e| Error::Parse(format!("bad rational-system document: {e}")))?;
            let (system, input) = rational_from_doc(&doc)?;
            Ok(ParsedSystem::Rational { system, input })
        }
        other => Err(Error::Parse(format!(
            "unknown schema `{other}` (expected `{RNN_SCHEMA}` or `{RATIONAL_SCHEMA}`)"
        ))),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document serialization");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{scalar_frac, scalar_int};
    use crate::embedding::{build_r_aux, build_r_sigma};

    fn scalar_mat(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| scalar_int(v)).collect())
            .collect()
    }

    fn example_rnn() -> RnnSystem {
        RnnSystem::new(
            scalar_mat(&[&[0, 1], &[1, 0]]),
            scalar_mat(&[&[1], &[1]]),
            scalar_mat(&[&[1, 0]]),
            vec![scalar_int(0), scalar_int(0)],
            vec![vec![scalar_frac(1, 2)]],
            ActivationSpec::sigmoid(),
        )
        .unwrap()
    }

    #[test]
    fn rnn_document_round_trips() {
        let sys = example_rnn();
        let input = PwcInput::new(vec![(1.0, 0), (2.5, 0)]).unwrap();
        let text = to_json(&rnn_document(&sys, Some(&input)));
        match parse_system(&text).unwrap() {
            ParsedSystem::Rnn {
                system,
                input: parsed_input,
            } => {
                assert_eq!(system, sys);
                assert_eq!(parsed_input, Some(input));
            }
            _ => panic!("expected an RNN document"),
        }
    }

    #[test]
    fn rational_document_round_trips_symbolically() {
        let sys = example_rnn();
        for built in [build_r_sigma(&sys).unwrap(), build_r_aux(&sys).unwrap()] {
            let text = to_json(&rational_document(&built, None));
            match parse_system(&text).unwrap() {
                ParsedSystem::Rational { system, .. } => assert_eq!(system, built),
                _ => panic!("expected a rational-system document"),
            }
        }
    }

    #[test]
    fn plain_integers_are_accepted() {
        let text = r#"{
            "schema": "rnn-system/1",
            "a": [[0, 1], [1, 0]],
            "b": [[1], [1]],
            "c": [[1, 0]],
            "x0": [0, 0],
            "alphabet": [["1/2"]],
            "activation": "sigmoid"
        }"#;
        match parse_system(text).unwrap() {
            ParsedSystem::Rnn { system, input } => {
                assert_eq!(system, example_rnn());
                assert!(input.is_none());
            }
            _ => panic!("expected an RNN document"),
        }
    }

    #[test]
    fn inline_activation_parses() {
        let text = r#"{
            "schema": "rnn-system/1",
            "a": [[0]],
            "b": [[1]],
            "c": [[1]],
            "x0": [0],
            "alphabet": [[1]],
            "activation": {
                "name": "tanh-ode",
                "order": 1,
                "rhs_num": "1 - X1^2",
                "rhs_den": "1",
                "init": [0],
                "invertible": true
            }
        }"#;
        match parse_system(text).unwrap() {
            ParsedSystem::Rnn { system, .. } => {
                assert_eq!(system.activation().name(), "tanh-ode");
                assert!(system.activation().closed_form().is_none());
            }
            _ => panic!("expected an RNN document"),
        }
    }

    #[test]
    fn errors_name_the_offending_field() {
        // Ragged matrix row.
        let text = r#"{
            "schema": "rnn-system/1",
            "a": [[0, 1], [1]],
            "b": [[1], [1]],
            "c": [[1, 0]],
            "x0": [0, 0],
            "alphabet": [[1]],
            "activation": "sigmoid"
        }"#;
        let err = parse_system(text).unwrap_err();
        assert!(err.to_string().contains("'a'"), "{err}");

        // Empty alphabet.
        let text = r#"{
            "schema": "rnn-system/1",
            "a": [[0]],
            "b": [[1]],
            "c": [[1]],
            "x0": [0],
            "alphabet": [],
            "activation": "tanh"
        }"#;
        let err = parse_system(text).unwrap_err();
        assert!(err.to_string().contains("alphabet"), "{err}");

        // Unknown schema.
        let err = parse_system(r#"{"schema": "nope/9"}"#).unwrap_err();
        assert!(err.to_string().contains("schema"), "{err}");

        // Unknown activation name.
        let text = r#"{
            "schema": "rnn-system/1",
            "a": [[0]],
            "b": [[1]],
            "c": [[1]],
            "x0": [0],
            "alphabet": [[1]],
            "activation": "relu"
        }"#;
        let err = parse_system(text).unwrap_err();
        assert!(err.to_string().contains("relu"), "{err}");
    }

    #[test]
    fn input_letter_out_of_range_is_caught() {
        let text = r#"{
            "schema": "rnn-system/1",
            "a": [[0]],
            "b": [[1]],
            "c": [[1]],
            "x0": [0],
            "alphabet": [[1]],
            "activation": "tanh",
            "input": {"pieces": [{"duration": 1.0, "letter_index": 3}]}
        }"#;
        let err = parse_system(text).unwrap_err();
        assert!(err.to_string().contains("letter_index"), "{err}");
    }
}
