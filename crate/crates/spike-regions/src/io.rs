//! Network and step-spec file formats.
//!
//! Networks are stored as JSON. Numbers are decimal strings `"p/q"` in exact
//! mode and plain JSON doubles in float mode; the mode is recorded at the top
//! level and files must not mix representations.

use crate::constructors::StepFunctionSpec;
use crate::matrix::Matrix;
use crate::scalar::{Mode, Scalar};
use crate::snn::{DecoderSpec, EncoderSpec, LayerParams, Network, NetworkError, TimeTransform};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const NETWORK_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed file: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error(
        "unsupported format version {found} (expected {})",
        NETWORK_FORMAT_VERSION
    )]
    VersionMismatch { found: u32 },
    #[error("invalid network: {0}")]
    Invalid(#[from] NetworkError),
    #[error("bad field {field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str, message: impl Into<String>) -> FileError {
    FileError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// On-disk number: a double in float mode, a `"p/q"` string in exact mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Exact(String),
}

impl Num {
    pub fn encode(s: &Scalar) -> Num {
        match s {
            Scalar::Exact(_) => Num::Exact(s.to_repr_string()),
            Scalar::Float(v) => Num::Float(*v),
        }
    }

    pub fn decode(&self, mode: Mode, field: &str) -> Result<Scalar, FileError> {
        match (self, mode) {
            (Num::Float(v), Mode::Float) => {
                if !v.is_finite() {
                    return Err(field_err(field, "non-finite number"));
                }
                Ok(Scalar::Float(*v))
            }
            (Num::Exact(s), Mode::Exact) => {
                Scalar::parse(Mode::Exact, s).map_err(|e| field_err(field, e.to_string()))
            }
            (Num::Float(_), Mode::Exact) => Err(field_err(
                field,
                "exact-mode file contains a float literal; expected \"p/q\"",
            )),
            (Num::Exact(_), Mode::Float) => Err(field_err(
                field,
                "float-mode file contains a rational string; expected a number",
            )),
        }
    }
}

fn encode_vec(v: &[Scalar]) -> Vec<Num> {
    v.iter().map(Num::encode).collect()
}

fn decode_vec(v: &[Num], mode: Mode, field: &str) -> Result<Vec<Scalar>, FileError> {
    v.iter().map(|n| n.decode(mode, field)).collect()
}

fn encode_matrix(m: &Matrix) -> Vec<Vec<Num>> {
    m.row_vecs().iter().map(|r| encode_vec(r)).collect()
}

fn decode_matrix(rows: &[Vec<Num>], mode: Mode, field: &str) -> Result<Matrix, FileError> {
    let decoded: Result<Vec<Vec<Scalar>>, FileError> =
        rows.iter().map(|r| decode_vec(r, mode, field)).collect();
    let decoded = decoded?;
    let width = decoded.first().map_or(0, |r| r.len());
    if decoded.iter().any(|r| r.len() != width) {
        return Err(field_err(field, "ragged matrix"));
    }
    Ok(Matrix::from_rows(decoded))
}

#[derive(Debug, Serialize, Deserialize)]
struct EncoderFile {
    variant: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct DecoderFile {
    variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none", rename = "V")]
    v: Option<Vec<Vec<Num>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f0: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transform: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LayerFile {
    #[serde(rename = "W")]
    w: Vec<Vec<Num>>,
    b: Vec<Num>,
    u0: Vec<Num>,
    beta: Num,
    theta: Num,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkFile {
    version: u32,
    mode: String,
    #[serde(rename = "T")]
    latency: usize,
    encoder: EncoderFile,
    decoder: DecoderFile,
    layers: Vec<LayerFile>,
}

fn parse_mode(s: &str) -> Result<Mode, FileError> {
    match s {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        other => Err(field_err("mode", format!("unknown mode {other:?}"))),
    }
}

pub fn network_to_json(net: &Network) -> serde_json::Value {
    let decoder = match net.decoder() {
        DecoderSpec::MembranePotential {
            time_weights,
            output_weights,
            output_bias,
        } => DecoderFile {
            variant: "membrane_potential".into(),
            a: Some(encode_vec(time_weights)),
            v: Some(encode_matrix(output_weights)),
            c: Some(encode_vec(output_bias)),
            f0: None,
            transform: None,
        },
        DecoderSpec::Rate => DecoderFile {
            variant: "rate".into(),
            a: None,
            v: None,
            c: None,
            f0: None,
            transform: None,
        },
        DecoderSpec::Count => DecoderFile {
            variant: "count".into(),
            a: None,
            v: None,
            c: None,
            f0: None,
            transform: None,
        },
        DecoderSpec::FirstSpikeTime {
            silent_value,
            transform,
        } => DecoderFile {
            variant: "first_spike_time".into(),
            a: None,
            v: None,
            c: None,
            f0: Some(Num::encode(silent_value)),
            transform: Some(
                match transform {
                    TimeTransform::Reciprocal => "reciprocal",
                    TimeTransform::Identity => "identity",
                }
                .into(),
            ),
        },
    };
    let file = NetworkFile {
        version: NETWORK_FORMAT_VERSION,
        mode: net.mode().to_string(),
        latency: net.latency(),
        encoder: EncoderFile {
            variant: "direct".into(),
        },
        decoder,
        layers: net
            .layers()
            .iter()
            .map(|l| LayerFile {
                w: encode_matrix(&l.weights),
                b: encode_vec(&l.bias),
                u0: encode_vec(&l.initial_potential),
                beta: Num::encode(&l.leak),
                theta: Num::encode(&l.threshold),
            })
            .collect(),
    };
    serde_json::to_value(file).expect("network serializes")
}

pub fn network_from_json(value: serde_json::Value) -> Result<Network, FileError> {
    let file: NetworkFile = serde_json::from_value(value)?;
    if file.version != NETWORK_FORMAT_VERSION {
        return Err(FileError::VersionMismatch {
            found: file.version,
        });
    }
    let mode = parse_mode(&file.mode)?;
    if file.encoder.variant != "direct" {
        return Err(field_err(
            "encoder.variant",
            format!("unknown encoder {:?}", file.encoder.variant),
        ));
    }
    let decoder = match file.decoder.variant.as_str() {
        "membrane_potential" => {
            let a = file
                .decoder
                .a
                .as_ref()
                .ok_or_else(|| field_err("decoder.a", "missing time weights"))?;
            let v = file
                .decoder
                .v
                .as_ref()
                .ok_or_else(|| field_err("decoder.V", "missing output weights"))?;
            let c = file
                .decoder
                .c
                .as_ref()
                .ok_or_else(|| field_err("decoder.c", "missing output bias"))?;
            DecoderSpec::MembranePotential {
                time_weights: decode_vec(a, mode, "decoder.a")?,
                output_weights: decode_matrix(v, mode, "decoder.V")?,
                output_bias: decode_vec(c, mode, "decoder.c")?,
            }
        }
        "rate" => DecoderSpec::Rate,
        "count" => DecoderSpec::Count,
        "first_spike_time" => {
            let f0 = file
                .decoder
                .f0
                .as_ref()
                .ok_or_else(|| field_err("decoder.f0", "missing silent value"))?;
            let transform = match file.decoder.transform.as_deref() {
                Some("reciprocal") | None => TimeTransform::Reciprocal,
                Some("identity") => TimeTransform::Identity,
                Some(other) => {
                    return Err(field_err(
                        "decoder.transform",
                        format!("unknown transform {other:?}"),
                    ))
                }
            };
            DecoderSpec::FirstSpikeTime {
                silent_value: f0.decode(mode, "decoder.f0")?,
                transform,
            }
        }
        other => {
            return Err(field_err(
                "decoder.variant",
                format!("unknown decoder {other:?}"),
            ))
        }
    };
    let layers: Result<Vec<LayerParams>, FileError> = file
        .layers
        .iter()
        .enumerate()
        .map(|(i, l)| {
            Ok(LayerParams {
                weights: decode_matrix(&l.w, mode, &format!("layers[{i}].W"))?,
                bias: decode_vec(&l.b, mode, &format!("layers[{i}].b"))?,
                initial_potential: decode_vec(&l.u0, mode, &format!("layers[{i}].u0"))?,
                leak: l.beta.decode(mode, &format!("layers[{i}].beta"))?,
                threshold: l.theta.decode(mode, &format!("layers[{i}].theta"))?,
            })
        })
        .collect();
    Ok(Network::new(
        layers?,
        file.latency,
        EncoderSpec::Direct,
        decoder,
        mode,
    )?)
}

pub fn save_network(net: &Network, path: impl AsRef<Path>) -> Result<(), FileError> {
    let json = serde_json::to_string_pretty(&network_to_json(net))?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

pub fn load_network(path: impl AsRef<Path>) -> Result<Network, FileError> {
    let text = std::fs::read_to_string(path)?;
    network_from_json(serde_json::from_str(&text)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct StepSpecFile {
    breakpoints: Vec<Vec<Num>>,
    values: Vec<Num>,
    outside_value: Num,
}

pub fn step_spec_to_json(spec: &StepFunctionSpec) -> serde_json::Value {
    let file = StepSpecFile {
        breakpoints: spec.breakpoints().iter().map(|g| encode_vec(g)).collect(),
        values: encode_vec(spec.values()),
        outside_value: Num::encode(&Scalar::zero(spec.mode())),
    };
    serde_json::to_value(file).expect("spec serializes")
}

pub fn step_spec_from_json(
    value: serde_json::Value,
    mode: Mode,
) -> Result<StepFunctionSpec, FileError> {
    let file: StepSpecFile = serde_json::from_value(value)?;
    let outside = file.outside_value.decode(mode, "outside_value")?;
    if !outside.is_zero() {
        return Err(field_err("outside_value", "must be 0"));
    }
    let breakpoints: Result<Vec<Vec<Scalar>>, FileError> = file
        .breakpoints
        .iter()
        .map(|g| decode_vec(g, mode, "breakpoints"))
        .collect();
    let values = decode_vec(&file.values, mode, "values")?;
    StepFunctionSpec::new(breakpoints?, values)
        .map_err(|e| field_err("breakpoints/values", e.to_string()))
}

pub fn load_step_spec(path: impl AsRef<Path>, mode: Mode) -> Result<StepFunctionSpec, FileError> {
    let text = std::fs::read_to_string(path)?;
    step_spec_from_json(serde_json::from_str(&text)?, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{identity_network, staircase_network};

    #[test]
    fn round_trip_exact_network() {
        let net = staircase_network(3, &Scalar::ratio(Mode::Exact, 1, 10), Mode::Exact).unwrap();
        let json = network_to_json(&net);
        let loaded = network_from_json(json.clone()).unwrap();
        assert_eq!(network_to_json(&loaded), json);
        assert_eq!(loaded.latency(), net.latency());
        assert_eq!(loaded.depth(), net.depth());
        // structural equality through behaviour
        for x in [-1i64, 0, 1, 2, 3] {
            let p = [Scalar::ratio(Mode::Exact, 2 * x + 1, 2)];
            assert_eq!(
                crate::snn::realize(&net, &p).unwrap(),
                crate::snn::realize(&loaded, &p).unwrap()
            );
        }
    }

    #[test]
    fn round_trip_float_network() {
        let net = identity_network(2, 3, 2, None, Mode::Float).unwrap();
        let json = network_to_json(&net);
        let loaded = network_from_json(json.clone()).unwrap();
        assert_eq!(network_to_json(&loaded), json);
    }

    #[test]
    fn rejects_out_of_range_leak() {
        let net = identity_network(1, 2, 1, None, Mode::Float).unwrap();
        let mut json = network_to_json(&net);
        json["layers"][0]["beta"] = serde_json::json!(1.5);
        let err = network_from_json(json).unwrap_err();
        assert!(matches!(err, FileError::Invalid(_)), "got {err:?}");
    }

    #[test]
    fn rejects_missing_decoder() {
        let net = identity_network(1, 2, 1, None, Mode::Float).unwrap();
        let mut json = network_to_json(&net);
        json.as_object_mut().unwrap().remove("decoder");
        assert!(matches!(
            network_from_json(json),
            Err(FileError::Malformed(_))
        ));
    }

    #[test]
    fn rejects_version_mismatch() {
        let net = identity_network(1, 2, 1, None, Mode::Float).unwrap();
        let mut json = network_to_json(&net);
        json["version"] = serde_json::json!(99);
        assert!(matches!(
            network_from_json(json),
            Err(FileError::VersionMismatch { found: 99 })
        ));
    }

    #[test]
    fn rejects_mode_mixing() {
        let net = identity_network(1, 2, 1, None, Mode::Exact).unwrap();
        let mut json = network_to_json(&net);
        json["layers"][0]["theta"] = serde_json::json!(1.0);
        assert!(matches!(
            network_from_json(json),
            Err(FileError::Field { .. })
        ));
    }

    #[test]
    fn step_spec_round_trip() {
        let spec = StepFunctionSpec::new(
            vec![vec![
                Scalar::from_int(Mode::Exact, 0),
                Scalar::ratio(Mode::Exact, 1, 2),
                Scalar::from_int(Mode::Exact, 1),
            ]],
            vec![
                Scalar::from_int(Mode::Exact, 2),
                Scalar::from_int(Mode::Exact, -1),
            ],
        )
        .unwrap();
        let json = step_spec_to_json(&spec);
        let loaded = step_spec_from_json(json, Mode::Exact).unwrap();
        assert_eq!(loaded.breakpoints(), spec.breakpoints());
        assert_eq!(loaded.values(), spec.values());
    }
}
