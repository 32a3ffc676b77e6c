//! JSON documents for signals and classes, CSV dumps for figure data.
//!
//! Complex numbers are written as `[re, im]` pairs everywhere.
//!
//! CSV headers:
//! - grid fields: `re,im,value`
//! - polygons: `re,im`
//! - singular values: `index,sigma`

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numrange::{GridField, Polygon};
use crate::signal::{CandidateClass, Mode, Signal, SignalMeta};

pub mod cplx {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

pub mod cplx_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|z| [z.re, z.im]))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

pub mod cplx_opt {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(|z| [z.re, z.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        Ok(Option::<[f64; 2]>::deserialize(d)?.map(|[re, im]| Complex64::new(re, im)))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeDoc {
    #[serde(with = "cplx")]
    z: Complex64,
    #[serde(with = "cplx_vec")]
    residues: Vec<Complex64>,
    #[serde(default)]
    delay: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaDoc {
    #[serde(default)]
    modes: Vec<ModeDoc>,
    #[serde(default)]
    snr_db: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(with = "cplx_opt", default)]
    scale: Option<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalDoc {
    #[serde(rename = "T")]
    len: usize,
    #[serde(rename = "K")]
    looks: usize,
    #[serde(with = "cplx_vec")]
    samples: Vec<Complex64>,
    #[serde(default)]
    meta: Option<MetaDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    name: String,
    #[serde(with = "cplx_vec")]
    freqs: Vec<Complex64>,
}

fn parse<T: DeserializeOwned>(text: &str, context: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::schema(context, e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn signal_from_json(text: &str) -> Result<Signal> {
    let doc: SignalDoc = parse(text, "signal")?;
    if doc.samples.len() != doc.len * doc.looks {
        return Err(Error::schema(
            "signal",
            format!("field `samples`: expected T*K = {} entries, found {}", doc.len * doc.looks, doc.samples.len()),
        ));
    }
    let mut signal = Signal::from_samples(doc.len, doc.looks, doc.samples).map_err(|e| Error::schema("signal", e.to_string()))?;
    signal.meta = doc.meta.map(|m| SignalMeta {
        modes: m
            .modes
            .into_iter()
            .map(|d| Mode::new(d.z, d.residues).with_delay(d.delay))
            .collect(),
        snr_db: m.snr_db,
        seed: m.seed,
        scale: m.scale.unwrap_or(Complex64::new(1.0, 0.0)),
    });
    Ok(signal)
}

pub fn signal_to_json(signal: &Signal) -> String {
    let doc = SignalDoc {
        len: signal.len(),
        looks: signal.looks(),
        samples: signal.samples().to_vec(),
        meta: signal.meta.as_ref().map(|m| MetaDoc {
            modes: m
                .modes
                .iter()
                .map(|md| ModeDoc { z: md.z, residues: md.residues.clone(), delay: md.delay })
                .collect(),
            snr_db: m.snr_db.filter(|v| v.is_finite()),
            seed: m.seed,
            scale: Some(m.scale),
        }),
    };
    serde_json::to_string_pretty(&doc).expect("signal document serializes")
}

pub fn class_from_json(text: &str) -> Result<CandidateClass> {
    let doc: ClassDoc = parse(text, "class")?;
    if doc.freqs.is_empty() {
        return Err(Error::schema("class", "field `freqs`: must contain at least one frequency"));
    }
    CandidateClass::new(doc.name, doc.freqs).map_err(|e| Error::schema("class", format!("field `freqs`: {e}")))
}

pub fn class_to_json(class: &CandidateClass) -> String {
    let doc = ClassDoc { name: class.name.clone(), freqs: class.freqs().to_vec() };
    serde_json::to_string_pretty(&doc).expect("class document serializes")
}

pub fn load_signal(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    signal_from_json(&read(path)?).map_err(|e| with_path(e, path))
}

pub fn save_signal(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    Ok(fs::write(path, signal_to_json(signal))?)
}

pub fn load_class_file(path: impl AsRef<Path>) -> Result<CandidateClass> {
    let path = path.as_ref();
    class_from_json(&read(path)?).map_err(|e| with_path(e, path))
}

pub fn save_class_file(path: impl AsRef<Path>, class: &CandidateClass) -> Result<()> {
    Ok(fs::write(path, class_to_json(class))?)
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Schema { context, message } => Error::Schema {
            context: format!("{context} file {}", path.display()),
            message,
        },
        other => other,
    }
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(fs::write(path, text)?)
}

pub fn grid_csv(field: &GridField) -> String {
    let mut out = String::from("re,im,value\n");
    for (i, re) in field.re_axis.iter().enumerate() {
        for (j, im) in field.im_axis.iter().enumerate() {
            let _ = writeln!(out, "{re},{im},{}", field.values[i][j]);
        }
    }
    out
}

pub fn polygon_csv(poly: &Polygon) -> String {
    let mut out = String::from("re,im\n");
    for v in &poly.vertices {
        let _ = writeln!(out, "{},{}", v.re, v.im);
    }
    out
}

pub fn singular_values_csv(sv: &[f64]) -> String {
    let mut out = String::from("index,sigma\n");
    for (i, s) in sv.iter().enumerate() {
        let _ = writeln!(out, "{},{s}", i + 1);
    }
    out
}
