//! Embedding persistence.
//!
//! * Text: first line `vocab_size dim`, then `word f1 ... fd` per line with
//!   six significant digits, LF line endings.
//! * Binary: ASCII header `vocab_size dim\n`, then per word the ASCII word, a
//!   space, `dim` little-endian `f32` values and a newline.
//! * Sidecar: a TOML document with the training configuration and the final
//!   distance-weight parameters.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::eval::AnalogySolver;
use crate::lfw::{LfwFormula, LfwParams};
use crate::scalar::Scalar;
use crate::trainer::{EmbeddingMatrices, EpochLog, TrainConfig};

/// Words and their vectors, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub words: Vec<String>,
    pub dim: usize,
    pub vectors: Vec<f32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFormat {
    Text,
    Binary,
}

impl FromStr for ModelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "txt" => Ok(ModelFormat::Text),
            "bin" | "binary" => Ok(ModelFormat::Binary),
            other => Err(Error::Config(format!("unknown model format `{other}`"))),
        }
    }
}

impl ModelFile {
    pub fn new(words: Vec<String>, dim: usize, vectors: Vec<f32>) -> Result<Self> {
        if vectors.len() != words.len() * dim {
            return Err(Error::Dimension {
                expected: words.len() * dim,
                actual: vectors.len(),
            });
        }
        Ok(ModelFile {
            words,
            dim,
            vectors,
        })
    }

    /// Takes the input matrix, the one used as word representations.
    pub fn from_embeddings<F: Scalar>(
        vocab: &Vocabulary,
        m: &EmbeddingMatrices<F>,
    ) -> Result<Self> {
        if vocab.len() != m.vocab_size() {
            return Err(Error::Dimension {
                expected: vocab.len(),
                actual: m.vocab_size(),
            });
        }
        let vectors = m.input().iter().map(|x| x.to_f64_lossy() as f32).collect();
        Self::new(vocab.words().to_vec(), m.dim(), vectors)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn solver(&self) -> Result<AnalogySolver<f32>> {
        AnalogySolver::new(&self.words, &self.vectors, self.dim)
    }
}

/// `%g`-style formatting with six significant digits.
pub fn format_g6(x: f32) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed).to_owned()
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io_at(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io_at(path, e))
}

pub fn write_text<W: Write>(model: &ModelFile, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", model.len(), model.dim)?;
    let mut line = String::new();
    for (i, word) in model.words.iter().enumerate() {
        line.clear();
        line.push_str(word);
        for &x in model.vector(i) {
            line.push(' ');
            line.push_str(&format_g6(x));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let mut parts = line.split_whitespace();
    let (Some(n), Some(d), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Header(format!(
            "expected `vocab_size dim`, got {line:?}"
        )));
    };
    let n = n
        .parse()
        .map_err(|e| Error::Header(format!("bad vocab size: {e}")))?;
    let d = d
        .parse()
        .map_err(|e| Error::Header(format!("bad dimension: {e}")))?;
    Ok((n, d))
}

pub fn read_text<R: BufRead>(reader: R) -> Result<ModelFile> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Header("empty model file".into()))??;
    let (n, dim) = parse_header(&header)?;
    let mut words = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * dim);
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if words.len() == n {
            return Err(Error::Header(format!("more than {n} records")));
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-blank line has a token");
        let before = vectors.len();
        for tok in parts {
            vectors.push(tok.parse::<f32>().map_err(|e| Error::Parse {
                line: k + 2,
                message: format!("bad value {tok:?}: {e}"),
            })?);
        }
        if vectors.len() - before != dim {
            return Err(Error::Header(format!(
                "record {} ({word}) has {} values, header says {dim}",
                words.len(),
                vectors.len() - before
            )));
        }
        words.push(word.to_owned());
    }
    if words.len() != n {
        return Err(Error::Header(format!(
            "header says {n} words, found {}",
            words.len()
        )));
    }
    ModelFile::new(words, dim, vectors)
}

pub fn write_binary<W: Write>(model: &ModelFile, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", model.len(), model.dim)?;
    for (i, word) in model.words.iter().enumerate() {
        w.write_all(word.as_bytes())?;
        w.write_all(b" ")?;
        for &x in model.vector(i) {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: BufRead>(mut reader: R) -> Result<ModelFile> {
    let mut header = Vec::new();
    reader.read_until(b'\n', &mut header)?;
    let header =
        String::from_utf8(header).map_err(|_| Error::Header("header is not ASCII".into()))?;
    let (n, dim) = parse_header(&header)?;
    let mut words = Vec::with_capacity(n);
    let mut vectors = vec![0f32; n * dim];
    let mut raw = vec![0u8; 4 * dim];
    let mut word = Vec::new();
    for i in 0..n {
        word.clear();
        // separator newline of the previous record, if any
        loop {
            let mut byte = [0u8; 1];
            match reader.read_exact(&mut byte) {
                Ok(()) => {}
                Err(e) if e.kind() == ErrorKind::UnexpectedEof => {
                    return Err(Error::Truncated { word_index: i })
                }
                Err(e) => return Err(e.into()),
            }
            match byte[0] {
                b' ' if !word.is_empty() => break,
                b'\n' | b'\r' if word.is_empty() => continue,
                b => word.push(b),
            }
        }
        match reader.read_exact(&mut raw) {
            Ok(()) => {}
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => {
                return Err(Error::Truncated { word_index: i })
            }
            Err(e) => return Err(e.into()),
        }
        for (dst, src) in vectors[i * dim..(i + 1) * dim]
            .iter_mut()
            .zip(raw.chunks_exact(4))
        {
            *dst = f32::from_le_bytes(src.try_into().expect("4-byte chunk"));
        }
        words.push(String::from_utf8_lossy(&word).into_owned());
    }
    ModelFile::new(words, dim, vectors)
}

pub fn save_text(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    write_text(model, create(path.as_ref())?)
}

pub fn load_text(path: impl AsRef<Path>) -> Result<ModelFile> {
    read_text(open(path.as_ref())?)
}

pub fn save_binary(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    write_binary(model, create(path.as_ref())?)
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<ModelFile> {
    read_binary(open(path.as_ref())?)
}

pub fn save(model: &ModelFile, path: impl AsRef<Path>, format: ModelFormat) -> Result<()> {
    match format {
        ModelFormat::Text => save_text(model, path),
        ModelFormat::Binary => save_binary(model, path),
    }
}

/// Guesses the format from the first record: a text record is a line of one
/// word followed by exactly `dim` parseable numbers.
pub fn detect_format(path: impl AsRef<Path>) -> Result<ModelFormat> {
    let mut r = open(path.as_ref())?;
    let mut header = Vec::new();
    r.read_until(b'\n', &mut header)?;
    let header = String::from_utf8_lossy(&header);
    let (_, dim) = parse_header(&header)?;
    let mut first = Vec::new();
    r.take(1 << 20).read_until(b'\n', &mut first)?;
    let is_text = std::str::from_utf8(&first).is_ok_and(|line| {
        let toks: Vec<&str> = line.split_whitespace().collect();
        toks.len() == dim + 1 && toks[1..].iter().all(|t| t.parse::<f32>().is_ok())
    });
    Ok(if is_text {
        ModelFormat::Text
    } else {
        ModelFormat::Binary
    })
}

pub fn load(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    match detect_format(path)? {
        ModelFormat::Text => load_text(path),
        ModelFormat::Binary => load_binary(path),
    }
}

/// Final distance-weight parameters by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfwRecord {
    pub formula: LfwFormula,
    pub params: BTreeMap<String, f64>,
}

impl LfwRecord {
    pub fn from_params(p: &LfwParams<f64>) -> Self {
        let params = p
            .formula()
            .param_names()
            .iter()
            .zip(p.values())
            .map(|(n, v)| (n.to_string(), *v))
            .collect();
        LfwRecord {
            formula: p.formula(),
            params,
        }
    }

    pub fn to_params(&self) -> Result<LfwParams<f64>> {
        let values: Vec<f64> = self
            .formula
            .param_names()
            .iter()
            .map(|n| {
                self.params
                    .get(*n)
                    .copied()
                    .ok_or_else(|| Error::Sidecar(format!("missing parameter `{n}`")))
            })
            .collect::<Result<_>>()?;
        LfwParams::new(self.formula, &values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub window: usize,
    pub mean_loss: f64,
    pub learning_rate: f64,
}

/// Run metadata stored next to a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub vocab_size: usize,
    pub dim: usize,
    pub min_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lfw: Option<LfwRecord>,
    pub config: TrainConfig,
    #[serde(default)]
    pub epochs: Vec<EpochRecord>,
}

impl Sidecar {
    pub fn new(
        config: &TrainConfig,
        vocab_size: usize,
        min_count: u64,
        lfw: Option<&LfwParams<f64>>,
        epochs: &[EpochLog],
    ) -> Self {
        Sidecar {
            vocab_size,
            dim: config.dim,
            min_count,
            lfw: lfw.map(LfwRecord::from_params),
            config: config.clone(),
            epochs: epochs
                .iter()
                .map(|e| EpochRecord {
                    epoch: e.epoch,
                    window: e.window,
                    mean_loss: e.mean_loss,
                    learning_rate: e.learning_rate,
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Sidecar(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Sidecar(e.to_string()))
    }
}

/// Conventional sidecar location for a model path: `<model>.meta.toml`.
pub fn sidecar_path(model: impl AsRef<Path>) -> std::path::PathBuf {
    let mut s = model.as_ref().as_os_str().to_owned();
    s.push(".meta.toml");
    s.into()
}

pub fn save_sidecar(sidecar: &Sidecar, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = sidecar.to_toml()?;
    std::fs::write(path, text).map_err(|e| Error::io_at(path, e))
}

pub fn load_sidecar(path: impl AsRef<Path>) -> Result<Sidecar> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?;
    Sidecar::from_toml(&text)
}
