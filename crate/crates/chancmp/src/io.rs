//! JSON documents for channels, states, measurements, ensembles and
//! classical experiments.
//!
//! Matrices are row-major lists of rows, each entry a `[re, im]` pair.
//! Tensor layouts are lists of `[label, dim]` pairs. Every float is
//! written with 17 significant digits so that documents round-trip
//! exactly; output for a given value is byte-for-byte stable.
//!
//! | schema          | shape                                                    |
//! |-----------------|----------------------------------------------------------|
//! | `choimap-v1`    | `{schema, in_dims, out_dims, choi}`                      |
//! | `state-v1`      | `{schema, dims, matrix}`                                 |
//! | `povm-v1`       | `{schema, dims, effects: [matrix, ...]}`                 |
//! | `ensemble-v1`   | `{schema, dims, items: [{prob, state}, ...]}`            |
//! | `measset-v1`    | list of `povm-v1`                                        |
//! | `experiment-v1` | list of probability vectors                              |
//!
//! The `schema` field is optional on input but must match when present.

use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::channels::ChoiMap;
use crate::classical::Experiment;
use crate::error::{Error, Result};
use crate::games::{Ensemble, MeasurementSet, Povm};
use crate::linalg::{CMatrix, SystemDims, C64};

/// Matrix as nested `[re, im]` rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixDoc(pub Vec<Vec<[f64; 2]>>);

impl From<&CMatrix> for MatrixDoc {
    fn from(m: &CMatrix) -> Self {
        MatrixDoc((0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
    }
}

impl TryFrom<&MatrixDoc> for CMatrix {
    type Error = Error;

    fn try_from(d: &MatrixDoc) -> Result<CMatrix> {
        let rows: Vec<Vec<C64>> = d.0.iter().map(|r| r.iter().map(|[a, b]| C64::new(*a, *b)).collect()).collect();
        if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Format("non-finite matrix entry".into()));
        }
        CMatrix::from_rows(&rows)
    }
}

#[derive(Serialize, Deserialize)]
struct ChoiMapDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    in_dims: SystemDims,
    out_dims: SystemDims,
    choi: MatrixDoc,
}

#[derive(Serialize, Deserialize)]
struct StateDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    dims: SystemDims,
    matrix: MatrixDoc,
}

#[derive(Serialize, Deserialize)]
struct PovmDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    dims: SystemDims,
    effects: Vec<MatrixDoc>,
}

#[derive(Serialize, Deserialize)]
struct ItemDoc {
    prob: f64,
    state: MatrixDoc,
}

#[derive(Serialize, Deserialize)]
struct EnsembleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    dims: SystemDims,
    items: Vec<ItemDoc>,
}

/// Writes floats as `{:.16e}`; non-finite values become `null`.
struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
}

/// Serializes any value with the float convention of this module.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

fn check_schema(found: &Option<String>, want: &str) -> Result<()> {
    match found {
        Some(s) if s != want => Err(Error::Format(format!("expected schema {want}, found {s}"))),
        _ => Ok(()),
    }
}

pub fn choimap_to_json(phi: &ChoiMap) -> Result<String> {
    to_json(&ChoiMapDoc {
        schema: Some("choimap-v1".into()),
        in_dims: phi.in_dims().clone(),
        out_dims: phi.out_dims().clone(),
        choi: phi.choi().into(),
    })
}

pub fn choimap_from_json(text: &str) -> Result<ChoiMap> {
    let d: ChoiMapDoc = parse(text)?;
    check_schema(&d.schema, "choimap-v1")?;
    ChoiMap::new(CMatrix::try_from(&d.choi)?, d.in_dims, d.out_dims)
}

/// A labeled Hermitian operator, typically a density matrix.
pub fn state_to_json(x: &CMatrix, dims: &SystemDims) -> Result<String> {
    to_json(&StateDoc { schema: Some("state-v1".into()), dims: dims.clone(), matrix: x.into() })
}

/// Checks the layout and Hermiticity to `1e-9`.
pub fn state_from_json(text: &str) -> Result<(CMatrix, SystemDims)> {
    let d: StateDoc = parse(text)?;
    check_schema(&d.schema, "state-v1")?;
    let m = CMatrix::try_from(&d.matrix)?;
    d.dims.check_matrix(m.rows(), m.cols())?;
    let dev = m.dist(&m.adjoint());
    if dev > 1e-9 {
        return Err(Error::NotHermitian(dev));
    }
    Ok((m.hermitian_part(), d.dims))
}

fn povm_doc(m: &Povm) -> PovmDoc {
    PovmDoc {
        schema: Some("povm-v1".into()),
        dims: m.dims().clone(),
        effects: m.effects().iter().map(MatrixDoc::from).collect(),
    }
}

fn povm_from_doc(d: &PovmDoc) -> Result<Povm> {
    check_schema(&d.schema, "povm-v1")?;
    let effects = d.effects.iter().map(CMatrix::try_from).collect::<Result<Vec<_>>>()?;
    Povm::new(effects, d.dims.clone())
}

pub fn povm_to_json(m: &Povm) -> Result<String> {
    to_json(&povm_doc(m))
}

pub fn povm_from_json(text: &str) -> Result<Povm> {
    povm_from_doc(&parse(text)?)
}

pub fn measset_to_json(s: &MeasurementSet) -> Result<String> {
    to_json(&s.povms().iter().map(povm_doc).collect::<Vec<_>>())
}

pub fn measset_from_json(text: &str) -> Result<MeasurementSet> {
    let docs: Vec<PovmDoc> = parse(text)?;
    MeasurementSet::new(docs.iter().map(povm_from_doc).collect::<Result<Vec<_>>>()?)
}

pub fn ensemble_to_json(e: &Ensemble) -> Result<String> {
    to_json(&EnsembleDoc {
        schema: Some("ensemble-v1".into()),
        dims: e.dims().clone(),
        items: e.probs().iter().zip(e.states()).map(|(p, s)| ItemDoc { prob: *p, state: s.into() }).collect(),
    })
}

pub fn ensemble_from_json(text: &str) -> Result<Ensemble> {
    let d: EnsembleDoc = parse(text)?;
    check_schema(&d.schema, "ensemble-v1")?;
    let items = d
        .items
        .iter()
        .map(|it| Ok((it.prob, CMatrix::try_from(&it.state)?)))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(items, d.dims)
}

pub fn experiment_to_json(e: &Experiment) -> Result<String> {
    to_json(e)
}

pub fn experiment_from_json(text: &str) -> Result<Experiment> {
    parse(text)
}
