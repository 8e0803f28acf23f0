//! JSON serialization of fields, matrices, processes, circuits, and chains.
//!
//! All numbers travel as **strings** (`"-7/4"`, `"3"`) so that arbitrary-
//! precision rationals survive any JSON implementation unmangled; nothing in
//! these formats depends on floating point. The shapes:
//!
//! ```text
//! field          {"preset": "sqrt2"}                       (input convenience)
//!                {"minpoly": ["-2","0","1"], "isolating": ["1","2"]}
//! element        ["1/2","0"]          coefficient vector over the generator,
//!                                     shorter vectors are zero-padded
//! matrix         {"rows": R, "cols": C, "entries": [e, …]} row-major;
//!                each entry is a real coefficient vector, or a pair
//!                [re, im] of coefficient vectors for complex entries
//! process        {"field", "dim", "outputs", "kraus": [{"i","j","matrix"}],
//!                 "rho", "beta"}      i = output (0-based), j = branch (1-based)
//! circuit        {"field", "width", "gates": [{"name"|"kraus", "targets"}],
//!                 "output"}           qubits are 1-based, qubit 1 = MSB
//! chain          {"field", "matrix", "start", "accept", "reject"}
//!                                     states are 1-based in files (0-based in code)
//! ```
//!
//! Writers always emit the explicit `minpoly`/`isolating` field form;
//! `preset` is accepted on input only.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::field::{Field, FieldElement};
use crate::frontends::{CircuitSpec, GateSpec, MarkovSpec};
use crate::intpoly::IntPolynomial;
use crate::interval::RationalInterval;
use crate::linalg::Matrix;
use crate::process::{DensityMatrix, SelectiveOperation};
use crate::ComplexFieldElement;
use crate::{NumberField, Result};

// ---------------------------------------------------------------------------
// scalar literals
// ---------------------------------------------------------------------------

/// Parse an exact rational literal: `"3"`, `"-3"`, `"1/2"`, `"-7/4"`.
/// Decimal or float notation is rejected — the formats are exact by design.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let msg = || {
        Error::Format(format!(
            "not an exact rational literal: {s:?} (expected e.g. \"3\", \"-7/4\"; \
             decimals are not accepted)"
        ))
    };
    let t = s.trim();
    let (num_s, den_s) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num_s.parse().map_err(|_| msg())?;
    let den: BigInt = den_s.parse().map_err(|_| msg())?;
    if den.is_zero() {
        return Err(Error::Format(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

pub fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::Format(format!("not an integer literal: {s:?}")))
}

// ---------------------------------------------------------------------------
// Value access helpers
// ---------------------------------------------------------------------------

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Format(format!("{what} must be a JSON object")))
}

fn get<'a>(o: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    o.get(key)
        .ok_or_else(|| Error::Format(format!("{what} is missing the {key:?} key")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Format(format!("{what} must be a JSON array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Format(format!("{what} must be a JSON string")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::Format(format!("{what} must be a nonnegative integer")))
}

// ---------------------------------------------------------------------------
// fields and elements
// ---------------------------------------------------------------------------

pub fn field_to_json(field: &Field) -> Value {
    let minpoly: Vec<String> = field
        .minpoly()
        .coeffs()
        .iter()
        .map(|c| c.to_string())
        .collect();
    let iv = field.isolating_original();
    json!({
        "minpoly": minpoly,
        "isolating": [iv.lo().to_string(), iv.hi().to_string()],
    })
}

pub fn field_from_json(v: &Value) -> Result<Field> {
    let o = as_object(v, "field")?;
    if let Some(p) = o.get("preset") {
        let name = as_str(p, "field preset")?;
        return NumberField::preset(name).ok_or_else(|| {
            Error::Format(format!(
                "unknown field preset {name:?}; available: {}",
                NumberField::preset_names().join(", ")
            ))
        });
    }
    let coeffs = as_array(get(o, "minpoly", "field")?, "minpoly")?
        .iter()
        .map(|c| parse_bigint(as_str(c, "minpoly coefficient")?))
        .collect::<Result<Vec<_>>>()?;
    let iso = as_array(get(o, "isolating", "field")?, "isolating")?;
    if iso.len() != 2 {
        return Err(Error::Format(
            "isolating must be a two-element array [lo, hi]".into(),
        ));
    }
    let lo = parse_rational(as_str(&iso[0], "isolating endpoint")?)?;
    let hi = parse_rational(as_str(&iso[1], "isolating endpoint")?)?;
    NumberField::new(IntPolynomial::new(coeffs), RationalInterval::new(lo, hi)?)
}

pub fn element_to_json(x: &FieldElement) -> Value {
    Value::Array(
        x.coeffs()
            .iter()
            .map(|c| Value::String(c.to_string()))
            .collect(),
    )
}

pub fn element_from_json(field: &Field, v: &Value) -> Result<FieldElement> {
    let coeffs = as_array(v, "field element")?
        .iter()
        .map(|c| parse_rational(as_str(c, "element coefficient")?))
        .collect::<Result<Vec<_>>>()?;
    field.from_coeffs(coeffs)
}

// ---------------------------------------------------------------------------
// matrices
// ---------------------------------------------------------------------------

fn complex_entry_to_json(e: &ComplexFieldElement) -> Value {
    if e.im.is_zero() {
        element_to_json(&e.re)
    } else {
        Value::Array(vec![element_to_json(&e.re), element_to_json(&e.im)])
    }
}

fn complex_entry_from_json(field: &Field, v: &Value) -> Result<ComplexFieldElement> {
    let arr = as_array(v, "matrix entry")?;
    // distinguish the real coefficient vector ["1/2", …] from the complex
    // pair [re, im] by the first element's type
    match arr.first() {
        None => Ok(ComplexFieldElement::zero(field)),
        Some(Value::String(_)) => {
            Ok(ComplexFieldElement::from_real(element_from_json(field, v)?))
        }
        Some(Value::Array(_)) => {
            if arr.len() != 2 {
                return Err(Error::Format(format!(
                    "a complex entry must be a pair [re, im], got {} parts",
                    arr.len()
                )));
            }
            Ok(ComplexFieldElement::new(
                element_from_json(field, &arr[0])?,
                element_from_json(field, &arr[1])?,
            ))
        }
        Some(other) => Err(Error::Format(format!(
            "matrix entry must be a coefficient vector or [re, im] pair, got {other}"
        ))),
    }
}

pub fn complex_matrix_to_json(m: &Matrix<ComplexFieldElement>) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": m.data().iter().map(complex_entry_to_json).collect::<Vec<_>>(),
    })
}

pub fn complex_matrix_from_json(field: &Field, v: &Value) -> Result<Matrix<ComplexFieldElement>> {
    let o = as_object(v, "matrix")?;
    let rows = as_usize(get(o, "rows", "matrix")?, "rows")?;
    let cols = as_usize(get(o, "cols", "matrix")?, "cols")?;
    let entries = as_array(get(o, "entries", "matrix")?, "entries")?;
    if entries.len() != rows * cols {
        return Err(Error::Format(format!(
            "a {rows}x{cols} matrix needs {} entries, got {}",
            rows * cols,
            entries.len()
        )));
    }
    let data = entries
        .iter()
        .map(|e| complex_entry_from_json(field, e))
        .collect::<Result<Vec<_>>>()?;
    Matrix::new(rows, cols, data)
}

pub fn real_matrix_to_json(m: &Matrix<FieldElement>) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": m.data().iter().map(element_to_json).collect::<Vec<_>>(),
    })
}

pub fn real_matrix_from_json(field: &Field, v: &Value) -> Result<Matrix<FieldElement>> {
    let m = complex_matrix_from_json(field, v)?;
    let data = m
        .data()
        .iter()
        .map(|e| {
            if e.im.is_zero() {
                Ok(e.re.clone())
            } else {
                Err(Error::Format(
                    "this matrix must be real; found a complex entry".into(),
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::new(m.rows(), m.cols(), data)
}

// ---------------------------------------------------------------------------
// process files
// ---------------------------------------------------------------------------

/// A fully parsed process file: operation, initial state, cutpoint.
pub struct ProcessFile {
    pub op: SelectiveOperation,
    pub rho: DensityMatrix,
    pub beta: FieldElement,
}

pub fn process_to_json(op: &SelectiveOperation, rho: &DensityMatrix, beta: &FieldElement) -> Value {
    let kraus: Vec<Value> = op
        .entries()
        .map(|(&(i, j), m)| {
            json!({"i": i, "j": j, "matrix": complex_matrix_to_json(m)})
        })
        .collect();
    json!({
        "field": field_to_json(op.field()),
        "dim": op.dim(),
        "outputs": op.outputs(),
        "kraus": kraus,
        "rho": complex_matrix_to_json(rho.matrix()),
        "beta": element_to_json(beta),
    })
}

pub fn process_from_json(v: &Value) -> Result<ProcessFile> {
    let o = as_object(v, "process")?;
    let field = field_from_json(get(o, "field", "process")?)?;
    let dim = as_usize(get(o, "dim", "process")?, "dim")?;
    let outputs = as_usize(get(o, "outputs", "process")?, "outputs")?;
    let kraus_json = as_array(get(o, "kraus", "process")?, "kraus")?;
    let mut entries = Vec::with_capacity(kraus_json.len());
    let mut branches = 1usize;
    for kv in kraus_json {
        let ko = as_object(kv, "kraus entry")?;
        let i = as_usize(get(ko, "i", "kraus entry")?, "output index i")?;
        let j = as_usize(get(ko, "j", "kraus entry")?, "branch index j")?;
        let m = complex_matrix_from_json(&field, get(ko, "matrix", "kraus entry")?)?;
        branches = branches.max(j);
        entries.push(((i, j), m));
    }
    let op = SelectiveOperation::new(&field, dim, outputs, branches, entries)?;
    let rho = DensityMatrix::new(complex_matrix_from_json(&field, get(o, "rho", "process")?)?)?;
    let beta = element_from_json(&field, get(o, "beta", "process")?)?;
    Ok(ProcessFile { op, rho, beta })
}

pub fn process_from_str(s: &str) -> Result<ProcessFile> {
    process_from_json(&serde_json::from_str(s)?)
}

// ---------------------------------------------------------------------------
// circuit files
// ---------------------------------------------------------------------------

pub fn circuit_to_json(circuit: &CircuitSpec) -> Value {
    let gates: Vec<Value> = circuit
        .gates()
        .iter()
        .map(|(gate, targets)| match gate.name() {
            Some(name) => json!({"name": name, "targets": targets}),
            None => json!({
                "kraus": gate.kraus().iter().map(complex_matrix_to_json).collect::<Vec<_>>(),
                "targets": targets,
            }),
        })
        .collect();
    json!({
        "field": field_to_json(circuit.field()),
        "width": circuit.width(),
        "gates": gates,
        "output": circuit.output(),
    })
}

pub fn circuit_from_json(v: &Value) -> Result<CircuitSpec> {
    let o = as_object(v, "circuit")?;
    let field = field_from_json(get(o, "field", "circuit")?)?;
    let width = as_usize(get(o, "width", "circuit")?, "width")?;
    let output = as_usize(get(o, "output", "circuit")?, "output")?;
    let mut gates = Vec::new();
    for gv in as_array(get(o, "gates", "circuit")?, "gates")? {
        let go = as_object(gv, "gate")?;
        let targets = as_array(get(go, "targets", "gate")?, "targets")?
            .iter()
            .map(|t| as_usize(t, "target qubit"))
            .collect::<Result<Vec<_>>>()?;
        let gate = if let Some(name) = go.get("name") {
            GateSpec::preset(&field, as_str(name, "gate name")?)?
        } else if let Some(kv) = go.get("kraus") {
            let kraus = as_array(kv, "gate kraus list")?
                .iter()
                .map(|m| complex_matrix_from_json(&field, m))
                .collect::<Result<Vec<_>>>()?;
            let dim = kraus
                .first()
                .map(Matrix::rows)
                .ok_or_else(|| Error::BadGate("a gate needs at least one Kraus operator".into()))?;
            if !dim.is_power_of_two() {
                return Err(Error::BadGate(format!(
                    "gate dimension {dim} is not a power of two"
                )));
            }
            GateSpec::new(dim.trailing_zeros() as usize, kraus)?
        } else {
            return Err(Error::Format(
                "each gate needs either a \"name\" or a \"kraus\" key".into(),
            ));
        };
        gates.push((gate, targets));
    }
    CircuitSpec::new(&field, width, gates, output)
}

pub fn circuit_from_str(s: &str) -> Result<CircuitSpec> {
    circuit_from_json(&serde_json::from_str(s)?)
}

// ---------------------------------------------------------------------------
// chain files
// ---------------------------------------------------------------------------

/// Chains use 1-based state numbers in files (matching how the examples in
/// most textbooks are numbered); the in-memory [`MarkovSpec`] is 0-based.
pub fn markov_to_json(spec: &MarkovSpec) -> Value {
    json!({
        "field": field_to_json(spec.field()),
        "matrix": real_matrix_to_json(spec.matrix()),
        "start": spec.start() + 1,
        "accept": spec.accept() + 1,
        "reject": spec.reject() + 1,
    })
}

pub fn markov_from_json(v: &Value) -> Result<MarkovSpec> {
    let o = as_object(v, "chain")?;
    let field = field_from_json(get(o, "field", "chain")?)?;
    let matrix = real_matrix_from_json(&field, get(o, "matrix", "chain")?)?;
    let mut states = [0usize; 3];
    for (slot, key) in states.iter_mut().zip(["start", "accept", "reject"]) {
        let s = as_usize(get(o, key, "chain")?, key)?;
        if s == 0 {
            return Err(Error::Format(format!(
                "chain states are numbered from 1 in files; {key} = 0"
            )));
        }
        *slot = s - 1;
    }
    MarkovSpec::new(matrix, states[0], states[1], states[2])
}

pub fn markov_from_str(s: &str) -> Result<MarkovSpec> {
    markov_from_json(&serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{decide_process, markov_absorption, RouteChoice, Verdict};
    use crate::frontends::circuit_accept_probability;
    use crate::suite;

    fn brat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3").unwrap(), brat(3, 1));
        assert_eq!(parse_rational("-3").unwrap(), brat(-3, 1));
        assert_eq!(parse_rational(" 1/2 ").unwrap(), brat(1, 2));
        assert_eq!(parse_rational("-7/4").unwrap(), brat(-7, 4));
        assert_eq!(parse_rational("2/-4").unwrap(), brat(-1, 2));
        for bad in ["", "abc", "1.5", "1/0", "1/2/3", "0x10"] {
            assert!(parse_rational(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn field_round_trip_and_presets() {
        let sqrt2 = NumberField::sqrt2();
        let v = field_to_json(&sqrt2);
        let back = field_from_json(&v).unwrap();
        assert!(back.same_root(&sqrt2));

        let preset = field_from_json(&json!({"preset": "golden"})).unwrap();
        assert!(preset.same_root(&NumberField::golden()));
        assert!(matches!(
            field_from_json(&json!({"preset": "nonsense"})),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn element_round_trip_pads_short_vectors() {
        let field = NumberField::sqrt2();
        let x = element_from_json(&field, &json!(["1/2"])).unwrap();
        assert_eq!(x, field.from_rational(brat(1, 2)));
        let y = element_from_json(&field, &json!(["0", "1"])).unwrap();
        assert_eq!(y, field.generator());
        assert_eq!(element_from_json(&field, &element_to_json(&y)).unwrap(), y);
        // too many coefficients is an error
        assert!(element_from_json(&field, &json!(["1", "2", "3"])).is_err());
    }

    #[test]
    fn matrix_round_trips_real_and_complex() {
        let field = NumberField::sqrt2();
        let i = ComplexFieldElement::i(&field);
        let one = ComplexFieldElement::one(&field);
        let m = Matrix::from_rows(vec![vec![one.clone(), i.clone()], vec![i.neg(), one]]).unwrap();
        let v = complex_matrix_to_json(&m);
        assert_eq!(complex_matrix_from_json(&field, &v).unwrap(), m);

        // a genuinely real matrix serializes without imaginary parts …
        let r = Matrix::identity(2, &ComplexFieldElement::zero(&field));
        let rv = complex_matrix_to_json(&r);
        let entries = rv["entries"].as_array().unwrap();
        assert!(entries.iter().all(|e| e[0].is_string() || e.as_array().unwrap().is_empty()));
        // … and can be read back as a FieldElement matrix
        let rm = real_matrix_from_json(&field, &rv).unwrap();
        assert_eq!(rm[(0, 0)], field.one());

        // but the complex one cannot
        assert!(real_matrix_from_json(&field, &v).is_err());
    }

    #[test]
    fn process_files_round_trip_and_decide_identically() {
        let field = NumberField::sqrt2();
        let (op, rho) = suite::hadamard_measure(&field).unwrap();
        let beta = field.from_rational(brat(1, 2));
        let v = process_to_json(&op, &rho, &beta);
        let parsed = process_from_str(&v.to_string()).unwrap();
        assert_eq!(
            parsed.op.entries().collect::<Vec<_>>(),
            op.entries().collect::<Vec<_>>()
        );
        assert_eq!(parsed.rho.matrix(), rho.matrix());
        assert_eq!(parsed.beta, beta);
        let before = decide_process(&op, &rho, &beta, RouteChoice::Exact).unwrap();
        let after =
            decide_process(&parsed.op, &parsed.rho, &parsed.beta, RouteChoice::Exact).unwrap();
        assert_eq!(before.verdict, after.verdict);
        assert_eq!(before.verdict, Verdict::Accept);
    }

    #[test]
    fn circuit_files_round_trip_with_names_and_kraus() {
        let field = NumberField::sqrt2();
        let h = GateSpec::preset(&field, "H").unwrap();
        let zero = ComplexFieldElement::zero(&field);
        let one = ComplexFieldElement::one(&field);
        let s = GateSpec::new(
            1,
            vec![Matrix::from_rows(vec![
                vec![one, zero.clone()],
                vec![zero, ComplexFieldElement::i(&field)],
            ])
            .unwrap()],
        )
        .unwrap();
        let circuit = CircuitSpec::new(
            &field,
            1,
            vec![(h.clone(), vec![1]), (s, vec![1]), (h, vec![1])],
            1,
        )
        .unwrap();
        let v = circuit_to_json(&circuit);
        // preset names survive; the explicit gate stays explicit
        assert_eq!(v["gates"][0]["name"], "H");
        assert!(v["gates"][1].get("kraus").is_some());
        let parsed = circuit_from_str(&v.to_string()).unwrap();
        assert_eq!(
            circuit_accept_probability(&parsed).unwrap(),
            circuit_accept_probability(&circuit).unwrap()
        );
    }

    #[test]
    fn chain_files_use_one_based_states() {
        let field = NumberField::rational();
        let rows = vec![
            vec![field.zero(), field.zero(), field.zero()],
            vec![field.from_rational(brat(1, 2)), field.one(), field.zero()],
            vec![field.from_rational(brat(1, 2)), field.zero(), field.one()],
        ];
        let spec = MarkovSpec::new(Matrix::from_rows(rows).unwrap(), 0, 1, 2).unwrap();
        let v = markov_to_json(&spec);
        assert_eq!(v["start"], 1);
        assert_eq!(v["accept"], 2);
        assert_eq!(v["reject"], 3);
        let parsed = markov_from_str(&v.to_string()).unwrap();
        assert_eq!(parsed.start(), 0);
        assert_eq!(
            markov_absorption(parsed.matrix(), parsed.start(), parsed.accept()).unwrap(),
            field.from_rational(brat(1, 2))
        );
        // state 0 in a file is a give-away for 0-based confusion: refuse it
        let mut bad = v.clone();
        bad["start"] = json!(0);
        assert!(matches!(markov_from_json(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn malformed_inputs_are_named_not_panicked() {
        let field = NumberField::sqrt2();
        for bad in [
            json!({"rows": 2, "cols": 2, "entries": [["1"], ["0"], ["0"]]}), // wrong count
            json!({"rows": 2, "cols": 2}),                                    // missing entries
            json!({"rows": 2, "cols": 2, "entries": [["1"], ["0"], ["0"], [["1"], ["0"], ["0"]]]}),
        ] {
            assert!(complex_matrix_from_json(&field, &bad).is_err(), "{bad}");
        }
        assert!(matches!(
            process_from_str("{\"dim\": 2}"),
            Err(Error::Format(_))
        ));
        assert!(process_from_str("not json").is_err());
    }
}
