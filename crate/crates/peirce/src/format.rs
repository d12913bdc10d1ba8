//! JSON file formats and number printing.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which
//! parses back to the identical `f64`.

use std::collections::HashMap;
use std::io;

use num_complex::Complex64 as C64;
use peirce_core::algebra::Algebra;
use peirce_core::linalg::Mat;
use peirce_core::metrised::{CubicForm, InnerProduct};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

/// Pretty JSON with 17-digit floats.
pub struct SigFormatter<'a>(PrettyFormatter<'a>);

impl Default for SigFormatter<'_> {
    fn default() -> Self {
        SigFormatter(PrettyFormatter::with_indent(b"  "))
    }
}

impl Formatter for SigFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter::default());
    value.serialize(&mut ser).expect("serializing to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub type Cx = [f64; 2];

pub fn cx(z: C64) -> Cx {
    [z.re, z.im]
}

pub fn from_cx(z: Cx) -> C64 {
    C64::new(z[0], z[1])
}

pub fn cx_vec(v: &[C64]) -> Vec<Cx> {
    v.iter().map(|&z| cx(z)).collect()
}

/// `{"dim": n, "tensor": [[i, j, k, re, im], ...], "label": str}`;
/// omitted entries are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub dim: usize,
    pub tensor: Vec<(usize, usize, usize, f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug)]
pub enum FormatError {
    Json(serde_json::Error),
    Index { entry: usize, index: usize, dim: usize },
    Duplicate { entry: usize },
    Math(peirce_core::Error),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Json(e) => write!(f, "malformed JSON: {e}"),
            FormatError::Index { entry, index, dim } => {
                write!(f, "entry #{entry}: index {index} out of range for dimension {dim}")
            }
            FormatError::Duplicate { entry } => write!(f, "entry #{entry} repeats an earlier index"),
            FormatError::Math(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

impl From<peirce_core::Error> for FormatError {
    fn from(e: peirce_core::Error) -> Self {
        FormatError::Math(e)
    }
}

fn check_index(entry: usize, idx: &[usize], dim: usize) -> Result<(), FormatError> {
    match idx.iter().find(|&&i| i >= dim) {
        Some(&index) => Err(FormatError::Index { entry, index, dim }),
        None => Ok(()),
    }
}

impl AlgebraFile {
    pub fn from_algebra(a: &Algebra) -> Self {
        let n = a.dim();
        let mut tensor = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = a.structure(i, j, k);
                    if v.re != 0.0 || v.im != 0.0 {
                        tensor.push((i, j, k, v.re, v.im));
                    }
                }
            }
        }
        AlgebraFile { dim: n, tensor, label: a.label().map(str::to_owned) }
    }

    pub fn to_algebra(&self) -> Result<Algebra, FormatError> {
        let n = self.dim;
        let mut tensor = vec![C64::new(0.0, 0.0); n * n * n];
        let mut seen = vec![false; n * n * n];
        for (entry, &(i, j, k, re, im)) in self.tensor.iter().enumerate() {
            check_index(entry, &[i, j, k], n)?;
            let slot = (i * n + j) * n + k;
            if std::mem::replace(&mut seen[slot], true) {
                return Err(FormatError::Duplicate { entry });
            }
            tensor[slot] = C64::new(re, im);
        }
        let a = Algebra::new(n, tensor)?;
        Ok(match &self.label {
            Some(l) => a.with_label(l.clone()),
            None => a,
        })
    }
}

pub fn parse_algebra(text: &str) -> Result<Algebra, FormatError> {
    serde_json::from_str::<AlgebraFile>(text)?.to_algebra()
}

pub fn emit_algebra(a: &Algebra) -> String {
    to_json(&AlgebraFile::from_algebra(a))
}

/// `{"dim": n, "tri": [[i, j, k, re, im], ...]}`. A listed entry stands for
/// all its index permutations; entries of one orbit that are listed more
/// than once must agree to 1e-12.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicFile {
    pub dim: usize,
    pub tri: Vec<(usize, usize, usize, f64, f64)>,
}

impl CubicFile {
    pub fn from_cubic(u: &CubicForm) -> Self {
        let n = u.dim();
        let mut tri = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = u.entry(i, j, k);
                    if v.re != 0.0 || v.im != 0.0 {
                        tri.push((i, j, k, v.re, v.im));
                    }
                }
            }
        }
        CubicFile { dim: n, tri }
    }

    pub fn to_cubic(&self) -> Result<CubicForm, FormatError> {
        let n = self.dim;
        let mut orbit: HashMap<[usize; 3], C64> = HashMap::new();
        let mut explicit: HashMap<[usize; 3], C64> = HashMap::new();
        for (entry, &(i, j, k, re, im)) in self.tri.iter().enumerate() {
            check_index(entry, &[i, j, k], n)?;
            if explicit.insert([i, j, k], C64::new(re, im)).is_some() {
                return Err(FormatError::Duplicate { entry });
            }
            let mut key = [i, j, k];
            key.sort_unstable();
            orbit.entry(key).or_insert(C64::new(re, im));
        }
        let mut tri = vec![C64::new(0.0, 0.0); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut key = [i, j, k];
                    key.sort_unstable();
                    let fill = orbit.get(&key).copied().unwrap_or_default();
                    tri[(i * n + j) * n + k] = explicit.get(&[i, j, k]).copied().unwrap_or(fill);
                }
            }
        }
        Ok(CubicForm::new(n, tri)?)
    }
}

pub fn parse_cubic(text: &str) -> Result<CubicForm, FormatError> {
    serde_json::from_str::<CubicFile>(text)?.to_cubic()
}

pub fn emit_cubic(u: &CubicForm) -> String {
    to_json(&CubicFile::from_cubic(u))
}

/// `{"dim": n, "matrix": [[i, j, re, im], ...]}`, symmetric; listing
/// `(i, j)` also sets `(j, i)` unless that entry is listed separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerProductFile {
    pub dim: usize,
    pub matrix: Vec<(usize, usize, f64, f64)>,
}

impl InnerProductFile {
    pub fn to_inner_product(&self) -> Result<InnerProduct, FormatError> {
        let n = self.dim;
        let mut m = Mat::zeros(n, n);
        let mut explicit = vec![false; n * n];
        for (entry, &(i, j, re, im)) in self.matrix.iter().enumerate() {
            check_index(entry, &[i, j], n)?;
            if std::mem::replace(&mut explicit[i * n + j], true) {
                return Err(FormatError::Duplicate { entry });
            }
            m[(i, j)] = C64::new(re, im);
            if !explicit[j * n + i] {
                m[(j, i)] = C64::new(re, im);
            }
        }
        Ok(InnerProduct::new(m)?)
    }
}

pub fn parse_inner_product(text: &str) -> Result<InnerProduct, FormatError> {
    serde_json::from_str::<InnerProductFile>(text)?.to_inner_product()
}

/// Complex literal: `0.3`, `-2e-3`, `1.5i`, `-i`, `0.2-1i`, `1+2.5i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number '{s}'");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let imag = |txt: &str| -> Result<f64, String> {
        match txt {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => txt.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(p) => {
            let re = body[..p].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[p..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use peirce_core::catalog;

    #[test]
    fn floats_print_with_seventeen_digits() {
        let s = to_json(&vec![0.1f64, -1.0 / 3.0, 2.0, 1e-300]);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("-3.3333333333333331e-1"));
        assert!(s.contains("2.0000000000000000e0"));
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, -1.0 / 3.0, 2.0, 1e-300]);
        assert!(to_json(&f64::NAN).starts_with("null"));
    }

    #[test]
    fn floats_round_trip_exactly() {
        let mut x = 0.7234f64;
        let values: Vec<f64> = (0..2000)
            .map(|i| {
                x = (x * 3.9 * (1.0 - x)).abs();
                x * 10f64.powi(i % 40 - 20) * if i % 3 == 0 { -1.0 } else { 1.0 }
            })
            .collect();
        let back: Vec<f64> = serde_json::from_str(&to_json(&values)).unwrap();
        assert_eq!(back, values);
    }

    #[test]
    fn algebra_round_trip() {
        let a = catalog::generalized_matsuo(C64::new(0.3, 0.1), C64::new(0.2, 0.0));
        let back = parse_algebra(&emit_algebra(&a)).unwrap();
        assert_eq!(back.tensor(), a.tensor());
        assert_eq!(back.label(), a.label());
    }

    #[test]
    fn algebra_input_errors() {
        assert!(matches!(parse_algebra("{\"dim\": 2, \"tensor\": [[0, 1, 0, 1.0, 0.0]]}"), Err(FormatError::Math(_))));
        assert!(matches!(parse_algebra("{\"dim\": 2, \"tensor\": [[0, 2, 0, 1.0, 0.0]]}"), Err(FormatError::Index { .. })));
        assert!(matches!(parse_algebra("{\"dim\": 2, \"tensor\": [[0, "), Err(FormatError::Json(_))));
        let dup = "{\"dim\": 1, \"tensor\": [[0, 0, 0, 1.0, 0.0], [0, 0, 0, 1.0, 0.0]]}";
        assert!(matches!(parse_algebra(dup), Err(FormatError::Duplicate { entry: 1 })));
        let ok = parse_algebra("{\"dim\": 1, \"tensor\": [[0, 0, 0, 1.0, 0.0]]}").unwrap();
        assert_eq!(ok.label(), None);
    }

    #[test]
    fn cubic_orbits_are_filled() {
        let u = parse_cubic("{\"dim\": 2, \"tri\": [[0, 0, 1, 0.5, 0.0], [1, 1, 1, 1.0, 0.0]]}").unwrap();
        assert_eq!(u.entry(1, 0, 0), C64::new(0.5, 0.0));
        assert_eq!(u.entry(0, 1, 0), C64::new(0.5, 0.0));
        let conflict = "{\"dim\": 2, \"tri\": [[0, 0, 1, 0.5, 0.0], [1, 0, 0, 0.6, 0.0]]}";
        assert!(parse_cubic(conflict).is_err());
        let u2 = catalog::cubic_u2_form();
        assert_eq!(parse_cubic(&emit_cubic(&u2)).unwrap(), u2);
    }

    #[test]
    fn inner_product_file() {
        let b = parse_inner_product("{\"dim\": 2, \"matrix\": [[0, 0, 2.0, 0.0], [0, 1, 0.5, 0.0], [1, 1, 1.0, 0.0]]}").unwrap();
        assert_eq!(b.matrix()[(1, 0)], C64::new(0.5, 0.0));
        assert!(parse_inner_product("{\"dim\": 2, \"matrix\": [[0, 1, 1.0, 0.0]]}").is_ok());
        assert!(parse_inner_product("{\"dim\": 2, \"matrix\": [[0, 0, 1.0, 0.0]]}").is_err());
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("0.3", (0.3, 0.0)),
            ("-2e-3", (-2e-3, 0.0)),
            ("1.5i", (0.0, 1.5)),
            ("-i", (0.0, -1.0)),
            ("i", (0.0, 1.0)),
            ("0.2-1i", (0.2, -1.0)),
            ("1+2.5i", (1.0, 2.5)),
            ("1e-3+2e-4i", (1e-3, 2e-4)),
            ("-0.5+i", (-0.5, 1.0)),
        ];
        for (s, (re, im)) in cases {
            assert_eq!(parse_complex(s).unwrap(), C64::new(re, im), "{s}");
        }
        for s in ["", "abc", "1+", "1+xi", "--1"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }
}
