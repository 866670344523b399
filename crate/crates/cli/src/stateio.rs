//! JSON file formats for states, bases, and channels.
//!
//! All files are JSON objects with a `dims` array and a `kind` tag.
//! Complex entries are `[re, im]` pairs; matrices are stored row-major.
//! Serialization uses shortest-round-trip decimal text, so
//! parse(serialize(x)) recovers x bit for bit.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tsq_core::{BasisSet, CMat, CVec, Channel, DensityMatrix, PureState, QError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid {field}: {message}")]
    Field { field: String, message: String },

    #[error(transparent)]
    Core(#[from] QError),
}

pub type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    dims: Vec<usize>,
    kind: String,
    data: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    dims: Vec<usize>,
    kind: String,
    kraus: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct BasisFile {
    dims: Vec<usize>,
    kind: String,
    a: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<Vec<[f64; 2]>>,
}

/// A parsed state file: always usable as a density matrix, with the
/// amplitudes kept around when the file stored a pure state.
pub struct LoadedState {
    pub density: DensityMatrix,
    pub pure: Option<PureState>,
}

fn pairs_to_matrix(data: &[[f64; 2]], rows: usize, cols: usize) -> Option<CMat> {
    if data.len() != rows * cols {
        return None;
    }
    Some(CMat::from_row_slice(
        rows,
        cols,
        &data
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect::<Vec<_>>(),
    ))
}

fn matrix_to_pairs(m: &CMat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push([m[(r, c)].re, m[(r, c)].im]);
        }
    }
    out
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))
}

pub fn load_state(path: &Path) -> Result<LoadedState> {
    let file: StateFile = read_json(path)?;
    let dim: usize = file.dims.iter().product();
    if dim == 0 || file.dims.is_empty() || file.dims.len() > 2 {
        return Err(parse_err(path, format!("bad dims {:?}", file.dims)));
    }
    match file.kind.as_str() {
        "density" => {
            let m = pairs_to_matrix(&file.data, dim, dim).ok_or_else(|| {
                parse_err(
                    path,
                    format!("data has {} entries, expected {}", file.data.len(), dim * dim),
                )
            })?;
            let density = DensityMatrix::from_exact(m, &file.dims)?;
            Ok(LoadedState {
                density,
                pure: None,
            })
        }
        "pure" => {
            if file.data.len() != dim {
                return Err(parse_err(
                    path,
                    format!("data has {} entries, expected {dim}", file.data.len()),
                ));
            }
            let v = CVec::from_iterator(
                dim,
                file.data.iter().map(|[re, im]| Complex64::new(*re, *im)),
            );
            let pure = PureState::new(v, &file.dims)?;
            Ok(LoadedState {
                density: pure.projector(),
                pure: Some(pure),
            })
        }
        other => Err(parse_err(path, format!("unknown state kind {other:?}"))),
    }
}

pub fn save_density(path: &Path, rho: &DensityMatrix) -> Result<()> {
    write_json(
        path,
        &StateFile {
            dims: rho.subsystem_dims().to_vec(),
            kind: "density".into(),
            data: matrix_to_pairs(rho.matrix()),
        },
    )
}

pub fn save_pure(path: &Path, psi: &PureState) -> Result<()> {
    let amp = psi.amplitudes();
    write_json(
        path,
        &StateFile {
            dims: psi.subsystem_dims().to_vec(),
            kind: "pure".into(),
            data: amp.iter().map(|c| [c.re, c.im]).collect(),
        },
    )
}

pub fn save_channel(path: &Path, dims: &[usize], channel: &Channel) -> Result<()> {
    write_json(
        path,
        &ChannelFile {
            dims: dims.to_vec(),
            kind: "cptp".into(),
            kraus: channel.kraus().iter().map(matrix_to_pairs).collect(),
        },
    )
}

pub fn load_channel(path: &Path) -> Result<(Vec<usize>, Channel)> {
    let file: ChannelFile = read_json(path)?;
    if file.kind != "cptp" {
        return Err(parse_err(path, format!("unknown channel kind {:?}", file.kind)));
    }
    let dim: usize = file.dims.iter().product();
    let kraus = file
        .kraus
        .iter()
        .map(|k| {
            pairs_to_matrix(k, dim, dim)
                .ok_or_else(|| parse_err(path, "kraus operator has wrong entry count"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((file.dims, Channel::new(kraus)?))
}

/// Local measurement bases: `a` is required, `b` optional. `dims` gives
/// the basis dimensions, one entry per present basis.
pub fn load_basis(path: &Path) -> Result<(BasisSet, Option<BasisSet>)> {
    let file: BasisFile = read_json(path)?;
    if file.kind != "basis" {
        return Err(parse_err(path, format!("unknown basis kind {:?}", file.kind)));
    }
    let (d_a, d_b) = match file.dims.as_slice() {
        [a] => (*a, None),
        [a, b] => (*a, Some(*b)),
        other => return Err(parse_err(path, format!("bad dims {other:?}"))),
    };
    let a = pairs_to_matrix(&file.a, d_a, d_a)
        .ok_or_else(|| parse_err(path, "basis a has wrong entry count"))?;
    let a = BasisSet::from_unitary(a)?;
    let b = match (&file.b, d_b) {
        (Some(data), Some(d)) => {
            let m = pairs_to_matrix(data, d, d)
                .ok_or_else(|| parse_err(path, "basis b has wrong entry count"))?;
            Some(BasisSet::from_unitary(m)?)
        }
        (None, None) => None,
        _ => {
            return Err(parse_err(
                path,
                "dims and present bases disagree (need one dim per basis)",
            ))
        }
    };
    Ok((a, b))
}

pub fn save_basis(path: &Path, a: &BasisSet, b: Option<&BasisSet>) -> Result<()> {
    let mut dims = vec![a.dim()];
    if let Some(b) = b {
        dims.push(b.dim());
    }
    write_json(
        path,
        &BasisFile {
            dims,
            kind: "basis".into(),
            a: matrix_to_pairs(a.matrix()),
            b: b.map(|b| matrix_to_pairs(b.matrix())),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsq_core::{haar_unitary, random_cptp, random_density, random_pure};

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("tsq-stateio-{}-{name}", std::process::id()));
        p
    }

    #[test]
    fn density_round_trip_is_exact() {
        let rho = random_density(&[2, 3], 4, 7).unwrap();
        let path = tmp("density.json");
        save_density(&path, &rho).unwrap();
        let loaded = load_state(&path).unwrap();
        assert_eq!(loaded.density.matrix(), rho.matrix());
        assert_eq!(loaded.density.subsystem_dims(), rho.subsystem_dims());
        assert!(loaded.pure.is_none());
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn pure_round_trip_is_exact() {
        let psi = random_pure(&[2, 2], 3).unwrap();
        let path = tmp("pure.json");
        save_pure(&path, &psi).unwrap();
        let loaded = load_state(&path).unwrap();
        assert_eq!(loaded.pure.as_ref().unwrap().amplitudes(), psi.amplitudes());
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn serialization_is_deterministic() {
        let rho = random_density(&[2], 2, 1).unwrap();
        let (p1, p2) = (tmp("det1.json"), tmp("det2.json"));
        save_density(&p1, &rho).unwrap();
        save_density(&p2, &rho).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap()
        );
        std::fs::remove_file(p1).ok();
        std::fs::remove_file(p2).ok();
    }

    #[test]
    fn channel_round_trip_preserves_kraus_operators() {
        let ch = random_cptp(3, 2, 5).unwrap();
        let path = tmp("channel.json");
        save_channel(&path, &[3], &ch).unwrap();
        let (dims, loaded) = load_channel(&path).unwrap();
        assert_eq!(dims, vec![3]);
        assert_eq!(loaded.kraus().len(), ch.kraus().len());
        for (a, b) in loaded.kraus().iter().zip(ch.kraus()) {
            assert_eq!(a, b);
        }
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn basis_round_trip_and_validation() {
        let a = BasisSet::from_unitary(haar_unitary(2, 1)).unwrap();
        let b = BasisSet::from_unitary(haar_unitary(3, 2)).unwrap();
        let path = tmp("basis.json");
        save_basis(&path, &a, Some(&b)).unwrap();
        let (la, lb) = load_basis(&path).unwrap();
        assert_eq!(la.matrix(), a.matrix());
        assert_eq!(lb.unwrap().matrix(), b.matrix());
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn malformed_files_are_rejected() {
        let path = tmp("bad.json");
        std::fs::write(&path, "{\"dims\": [2], \"kind\": \"density\", \"data\": []}").unwrap();
        assert!(matches!(load_state(&path), Err(CliError::Parse { .. })));
        std::fs::write(&path, "not json").unwrap();
        assert!(matches!(load_state(&path), Err(CliError::Parse { .. })));
        std::fs::remove_file(path).ok();
    }
}

