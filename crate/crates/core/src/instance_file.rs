//! JSON-lines instance files.
//!
//! The first line is a header `{"p","D","E","N","r","seed","truth"?}`; each
//! following line is one sample `{"x": [...], "y": ...}`. Residues are written
//! as decimal strings in `[0, p^E)` so that arbitrarily large moduli survive.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{FpVector, PrimeModulus};
use crate::modp::Dataset;
use crate::padic::PadicDataset;
use crate::synth::{ModpInstance, PadicInstance};
use crate::zp::ZpTrunc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceHeader {
    pub p: u64,
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "E")]
    pub precision: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub x: Vec<String>,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub header: InstanceHeader,
    pub samples: Vec<SampleRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl From<&ModpInstance> for InstanceFile {
    fn from(inst: &ModpInstance) -> Self {
        let data = &inst.dataset;
        Self {
            header: InstanceHeader {
                p: data.modulus().get(),
                dim: data.dim(),
                precision: 1,
                n: data.len(),
                r: inst.r,
                seed: inst.seed,
                truth: Some(inst.truth.as_slice().iter().map(u64::to_string).collect()),
            },
            samples: (0..data.len())
                .map(|i| SampleRecord {
                    x: data.x(i).iter().map(u64::to_string).collect(),
                    y: data.y(i).to_string(),
                })
                .collect(),
        }
    }
}

impl From<&PadicInstance> for InstanceFile {
    fn from(inst: &PadicInstance) -> Self {
        let data = &inst.dataset;
        Self {
            header: InstanceHeader {
                p: data.prime().get(),
                dim: data.dim(),
                precision: data.full_precision(),
                n: data.len(),
                r: inst.r,
                seed: inst.seed,
                truth: Some(inst.truth.iter().map(ZpTrunc::to_string).collect()),
            },
            samples: (0..data.len())
                .map(|i| SampleRecord {
                    x: data.x(i).iter().map(ZpTrunc::to_string).collect(),
                    y: data.y(i).to_string(),
                })
                .collect(),
        }
    }
}

impl InstanceFile {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), FileError> {
        serde_json::to_writer(&mut w, &self.header).map_err(|source| FileError::Json { line: 1, source })?;
        w.write_all(b"\n")?;
        for (k, s) in self.samples.iter().enumerate() {
            serde_json::to_writer(&mut w, s).map_err(|source| FileError::Json { line: k + 2, source })?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self, FileError> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| match l {
            Ok(l) => !l.trim().is_empty(),
            Err(_) => true,
        });
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty instance file".into()))?;
        let header: InstanceHeader =
            serde_json::from_str(&first?).map_err(|source| FileError::Json { line: 1, source })?;
        let mut samples = Vec::with_capacity(header.n);
        for (k, line) in lines {
            let s: SampleRecord =
                serde_json::from_str(&line?).map_err(|source| FileError::Json { line: k + 1, source })?;
            samples.push(s);
        }
        let file = Self { header, samples };
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<()> {
        let h = &self.header;
        PrimeModulus::new(h.p)?;
        if h.precision == 0 {
            return Err(Error::InvalidParameter("E must be at least 1".into()));
        }
        if self.samples.len() != h.n {
            return Err(Error::InvalidParameter(format!(
                "header announces N = {} samples, file has {}",
                h.n,
                self.samples.len()
            )));
        }
        if let Some(s) = self.samples.iter().find(|s| s.x.len() != h.dim) {
            return Err(Error::LengthMismatch {
                expected: h.dim,
                found: s.x.len(),
            });
        }
        if let Some(t) = &h.truth {
            if t.len() != h.dim + 1 {
                return Err(Error::LengthMismatch {
                    expected: h.dim + 1,
                    found: t.len(),
                });
            }
        }
        Ok(())
    }

    pub fn prime(&self) -> Result<PrimeModulus> {
        PrimeModulus::new(self.header.p)
    }

    fn parse_all(&self, values: &[String]) -> Result<Vec<ZpTrunc>> {
        let p = self.prime()?;
        values
            .iter()
            .map(|s| ZpTrunc::parse(p, self.header.precision, s))
            .collect()
    }

    pub fn padic_dataset(&self) -> Result<PadicDataset> {
        let xs = self
            .samples
            .iter()
            .map(|s| self.parse_all(&s.x))
            .collect::<Result<Vec<_>>>()?;
        let ys = self
            .samples
            .iter()
            .map(|s| ZpTrunc::parse(self.prime()?, self.header.precision, &s.y))
            .collect::<Result<Vec<_>>>()?;
        PadicDataset::new(self.prime()?, self.header.dim, self.header.precision, xs, ys)
    }

    /// The samples reduced modulo `p`.
    pub fn modp_dataset(&self) -> Result<Dataset> {
        Ok(self.padic_dataset()?.reduce_mod_p())
    }

    /// Stored ground truth, if any, at the file's precision.
    pub fn truth(&self) -> Result<Option<Vec<ZpTrunc>>> {
        self.header
            .truth
            .as_ref()
            .map(|t| self.parse_all(t))
            .transpose()
    }

    pub fn truth_mod_p(&self) -> Result<Option<FpVector>> {
        let p = self.prime()?;
        Ok(self
            .truth()?
            .map(|t| FpVector::new(p, t.iter().map(ZpTrunc::residue_mod_p))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_modp_instance, gen_padic_instance};

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn bytes(f: &InstanceFile) -> Vec<u8> {
        let mut out = Vec::new();
        f.write_to(&mut out).unwrap();
        out
    }

    #[test]
    fn modp_round_trip_is_bit_exact() {
        let inst = gen_modp_instance(m(7), 3, 25, 0.1, 4).unwrap();
        let file = InstanceFile::from(&inst);
        let first = bytes(&file);
        let parsed = InstanceFile::read_from(first.as_slice()).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(bytes(&parsed), first);
        assert_eq!(parsed.modp_dataset().unwrap(), inst.dataset);
        assert_eq!(parsed.truth_mod_p().unwrap().unwrap(), inst.truth);
        assert_eq!(first.iter().filter(|&&b| b == b'\n').count(), 26);
    }

    #[test]
    fn padic_round_trip_with_big_values() {
        let inst = gen_padic_instance(m(1_000_003), 2, 5, 10, 0.3, 9).unwrap();
        let file = InstanceFile::from(&inst);
        let first = bytes(&file);
        let parsed = InstanceFile::read_from(first.as_slice()).unwrap();
        assert_eq!(bytes(&parsed), first);
        assert_eq!(parsed.padic_dataset().unwrap(), inst.dataset);
        assert_eq!(parsed.truth().unwrap().unwrap(), inst.truth);
    }

    #[test]
    fn header_layout() {
        let inst = gen_modp_instance(m(5), 1, 2, 0.0, 1).unwrap();
        let text = String::from_utf8(bytes(&InstanceFile::from(&inst))).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with(r#"{"p":5,"D":1,"E":1,"N":2,"r":0.0,"seed":1,"truth":["#));
        let sample = text.lines().nth(1).unwrap();
        assert!(sample.starts_with(r#"{"x":[""#));
    }

    #[test]
    fn rejects_malformed_files() {
        let bad_prime = "{\"p\":4,\"D\":0,\"E\":1,\"N\":1,\"r\":0.0,\"seed\":0}\n{\"x\":[],\"y\":\"1\"}\n";
        assert!(InstanceFile::read_from(bad_prime.as_bytes()).is_err());
        let bad_count = "{\"p\":5,\"D\":0,\"E\":1,\"N\":2,\"r\":0.0,\"seed\":0}\n{\"x\":[],\"y\":\"1\"}\n";
        assert!(InstanceFile::read_from(bad_count.as_bytes()).is_err());
        let out_of_range = "{\"p\":5,\"D\":0,\"E\":1,\"N\":1,\"r\":0.0,\"seed\":0}\n{\"x\":[],\"y\":\"7\"}\n";
        let f = InstanceFile::read_from(out_of_range.as_bytes()).unwrap();
        assert!(f.padic_dataset().is_err());
        let no_truth = "{\"p\":5,\"D\":0,\"E\":1,\"N\":1,\"r\":0.0,\"seed\":0}\n{\"x\":[],\"y\":\"3\"}\n";
        let f = InstanceFile::read_from(no_truth.as_bytes()).unwrap();
        assert_eq!(f.truth().unwrap(), None);
    }
}
