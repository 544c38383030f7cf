//! JSON construction trees for operators, and the matrix literal format.
//!
//! ```json
//! {"op": "product", "args": [{"op": "sigma_k", "n": 3, "k": 2},
//!                            {"op": "radial_derivative", "args": [{"op": "det", "n": 3}]}]}
//! ```
//!
//! Leaves: `det {n}`, `sigma_k {n, k}`, `ma_lag {n}`, `quad_c {c}`,
//! `norm2_det {n}`, `symbolic {nvars_n, terms}`. Composites take `args`:
//! `product` (two), `radial_derivative`, `conjugate {h}` and
//! `linear_transform {L: {action}}` (one each). Any node may carry a `name`.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::matrix::{Square, SymMatrix};
use crate::operator::{Advisory, GardingOperator, LinearMap};
use crate::poly::{PolyTerm, SparsePoly};

/// Symmetry tolerance for matrix literals.
pub const SYMMETRY_TOL: f64 = 1e-12;
const HOMOGENEITY_SAMPLES: usize = 50;
const HOMOGENEITY_TOL: f64 = 1e-9;
const HOMOGENEITY_SEED: u64 = 0x686f_6d6f;

pub fn parse_spec(text: &str) -> Result<GardingOperator> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Spec {
        path: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    parse_node(&value, "$")
}

pub fn parse_spec_value(value: &Value) -> Result<GardingOperator> {
    parse_node(value, "$")
}

fn spec_err(path: &str, message: impl Into<String>) -> Error {
    Error::Spec { path: path.to_owned(), message: message.into() }
}

fn at(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

/// Attaches `path` to errors raised below it that carry none.
fn located<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Spec { .. } => e,
        other => spec_err(path, other.to_string()),
    })
}

struct Node<'a> {
    path: &'a str,
    obj: &'a Map<String, Value>,
}

impl<'a> Node<'a> {
    fn allow(&self, keys: &[&str]) -> Result<()> {
        for k in self.obj.keys() {
            if k != "op" && k != "name" && !keys.contains(&k.as_str()) {
                return Err(spec_err(&at(self.path, k), "unexpected field"));
            }
        }
        Ok(())
    }

    fn field(&self, key: &str) -> Result<&'a Value> {
        self.obj.get(key).ok_or_else(|| spec_err(&at(self.path, key), "missing field"))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let v = self.field(key)?;
        v.as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| spec_err(&at(self.path, key), format!("expected a nonnegative integer, found {v}")))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let v = self.field(key)?;
        v.as_f64().ok_or_else(|| spec_err(&at(self.path, key), format!("expected a number, found {v}")))
    }

    fn args(&self, count: usize) -> Result<Vec<GardingOperator>> {
        let path = at(self.path, "args");
        let list = self.field("args")?.as_array().ok_or_else(|| spec_err(&path, "expected an array"))?;
        if list.len() != count {
            return Err(spec_err(&path, format!("expected {count} argument(s), found {}", list.len())));
        }
        list.iter().enumerate().map(|(i, v)| parse_node(v, &format!("{path}[{i}]"))).collect()
    }
}

fn parse_node(value: &Value, path: &str) -> Result<GardingOperator> {
    let obj = value.as_object().ok_or_else(|| spec_err(path, "expected an object"))?;
    let node = Node { path, obj };
    let op = node.field("op")?.as_str().ok_or_else(|| spec_err(&at(path, "op"), "expected a string"))?;
    let built = match op {
        "det" => {
            node.allow(&["n"])?;
            located(path, GardingOperator::det(node.usize("n")?))?
        }
        "sigma_k" => {
            node.allow(&["n", "k"])?;
            located(path, GardingOperator::sigma_k(node.usize("n")?, node.usize("k")?))?
        }
        "ma_lag" => {
            node.allow(&["n"])?;
            located(path, GardingOperator::ma_lag(node.usize("n")?))?
        }
        "quad_c" => {
            node.allow(&["c"])?;
            located(path, GardingOperator::quad_c(node.f64("c")?))?
        }
        "norm2_det" => {
            node.allow(&["n"])?;
            located(path, GardingOperator::norm2_det(node.usize("n")?))?
        }
        "symbolic" => {
            node.allow(&["nvars_n", "terms"])?;
            let n = node.usize("nvars_n")?;
            let terms: Vec<PolyTerm> = serde_json::from_value(node.field("terms")?.clone())
                .map_err(|e| spec_err(&at(path, "terms"), e.to_string()))?;
            let poly = located(&at(path, "terms"), SparsePoly::from_term_list(crate::matrix::entry_count(n), &terms))?;
            located(path, GardingOperator::symbolic(n, poly))?
        }
        "product" => {
            node.allow(&["args"])?;
            let mut args = node.args(2)?.into_iter();
            let (a, b) = (args.next().expect("two args"), args.next().expect("two args"));
            located(path, GardingOperator::product(a, b))?
        }
        "radial_derivative" => {
            node.allow(&["args"])?;
            let g = node.args(1)?.remove(0);
            located(path, GardingOperator::radial_derivative(g))?
        }
        "conjugate" => {
            node.allow(&["h", "args"])?;
            let h = located(&at(path, "h"), parse_square(node.field("h")?))?;
            let g = node.args(1)?.remove(0);
            located(path, GardingOperator::conjugate(g, h))?
        }
        "linear_transform" => {
            node.allow(&["L", "args"])?;
            let g = node.args(1)?.remove(0);
            let lpath = at(path, "L");
            let lobj = node
                .field("L")?
                .as_object()
                .ok_or_else(|| spec_err(&lpath, "expected an object with an `action` field"))?;
            let action = lobj.get("action").ok_or_else(|| spec_err(&at(&lpath, "action"), "missing field"))?;
            let rows = located(&at(&lpath, "action"), parse_rows(action))?;
            let map = located(&at(&lpath, "action"), LinearMap::from_action(g.n(), &rows))?;
            located(path, GardingOperator::linear_transform(g, map))?
        }
        other => return Err(spec_err(&at(path, "op"), format!("unknown op `{other}`"))),
    };
    let mut built = match obj.get("name") {
        Some(Value::String(s)) => built.with_name(s.clone()),
        Some(v) => return Err(spec_err(&at(path, "name"), format!("expected a string, found {v}"))),
        None => built,
    };
    let defect = located(path, built.homogeneity_defect(HOMOGENEITY_SAMPLES, HOMOGENEITY_SEED))?;
    if !(defect <= HOMOGENEITY_TOL) {
        return Err(spec_err(path, format!("not homogeneous of degree {}: defect {defect:e}", built.degree())));
    }
    built.push_advisory(Advisory { check: "homogeneity_defect".into(), passed: true, value: defect, note: None });
    Ok(built)
}

/// Array-of-arrays of numbers.
pub fn parse_rows(value: &Value) -> Result<Vec<Vec<f64>>> {
    let rows = value.as_array().ok_or_else(|| Error::InvalidArgument("expected an array of rows".into()))?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let row = row.as_array().ok_or_else(|| Error::InvalidArgument(format!("row {i} is not an array")))?;
            row.iter()
                .enumerate()
                .map(|(j, x)| {
                    x.as_f64().ok_or_else(|| Error::InvalidArgument(format!("entry [{i}][{j}] is not a number")))
                })
                .collect()
        })
        .collect()
}

pub fn parse_square(value: &Value) -> Result<Square> {
    Square::from_rows(&parse_rows(value)?)
}

/// Matrix literal: symmetry checked to [`SYMMETRY_TOL`], upper triangle kept.
pub fn parse_sym_matrix(value: &Value) -> Result<SymMatrix> {
    SymMatrix::from_rows(&parse_rows(value)?, SYMMETRY_TOL)
}

pub fn parse_sym_matrix_str(text: &str) -> Result<SymMatrix> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    parse_sym_matrix(&value)
}

pub fn parse_square_str(text: &str) -> Result<Square> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    parse_square(&value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_symmetric_with, rng_for};

    #[test]
    fn leaves() {
        let g = parse_spec(r#"{"op":"det","n":3}"#).unwrap();
        assert_eq!((g.n(), g.degree()), (3, 3));
        assert_eq!(g.advisories()[0].check, "homogeneity_defect");
        assert_eq!(parse_spec(r#"{"op":"ma_lag","n":4}"#).unwrap().degree(), 4);
        let s = parse_spec(
            r#"{"op":"symbolic","nvars_n":2,"terms":[{"alpha":[1,0,1],"coeff":1},{"alpha":[0,2,0],"coeff":-1}]}"#,
        )
        .unwrap();
        assert_eq!(s.evaluate(&SymMatrix::diagonal(&[2.0, 3.0])).unwrap(), 6.0);
    }

    #[test]
    fn radial_derivative_of_det_is_sigma2() {
        let g = parse_spec(r#"{"op":"radial_derivative","args":[{"op":"det","n":3}]}"#).unwrap();
        let s2 = GardingOperator::sigma_k(3, 2).unwrap();
        for i in 0..100 {
            let a = random_symmetric_with::<f64, _>(3, &mut rng_for(5, i));
            let (x, y) = (g.evaluate(&a).unwrap(), s2.evaluate(&a).unwrap());
            assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()), "{x} {y}");
        }
    }

    #[test]
    fn errors_carry_paths() {
        let cases = [
            (r#"{"op":"det"}"#, "$.n"),
            (r#"{"op":"frobnicate","n":2}"#, "$.op"),
            (r#"{"op":"product","args":[{"op":"det","n":2},{"op":"det","n":3}]}"#, "$"),
            (r#"{"op":"conjugate","h":[[1,0.5],[0,1]],"args":[{"op":"det","n":2}]}"#, "$"),
            (r#"{"op":"radial_derivative","args":[{"op":"sigma_k","n":3,"k":4}]}"#, "$.args[0]"),
            (r#"{"op":"symbolic","nvars_n":2,"terms":[{"alpha":[1,0,0],"coeff":1},{"alpha":[2,0,0],"coeff":1}]}"#, "$"),
            (r#"{"op":"det","n":2,"extra":1}"#, "$.extra"),
        ];
        for (text, want) in cases {
            match parse_spec(text) {
                Err(Error::Spec { path, .. }) => assert_eq!(path, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(parse_spec("{\"op\":"), Err(Error::Spec { .. })));
    }

    #[test]
    fn composite_tree() {
        let text = r#"{"op":"product","args":[{"op":"sigma_k","n":3,"k":2},
            {"op":"radial_derivative","args":[{"op":"det","n":3}]}]}"#;
        let g = parse_spec(text).unwrap();
        assert_eq!(g.degree(), 4);
        let v = g.evaluate(&SymMatrix::diagonal(&[1.0, 2.0, 3.0])).unwrap();
        assert!((v - 121.0).abs() < 1e-9);
    }

    #[test]
    fn linear_transform_node() {
        // L(A) = A + tr(A)·I on S(2), packed entries (a11, a12, a22)
        let text = r#"{"op":"linear_transform","L":{"action":[[2,0,1],[0,1,0],[1,0,2]]},"args":[{"op":"det","n":2}]}"#;
        let g = parse_spec(text).unwrap();
        assert!((g.evaluate(&SymMatrix::diagonal(&[1.0, 2.0])).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_literals() {
        let a = parse_sym_matrix_str("[[1, 2], [2, 3]]").unwrap();
        assert_eq!(a.get(1, 0), 2.0);
        assert!(matches!(parse_sym_matrix_str("[[1, 2], [2.1, 3]]"), Err(Error::NotSymmetric { .. })));
        assert!(parse_sym_matrix_str("[[1, 2], [2]]").is_err());
    }
}
