//! Analogy evaluation with 3CosAdd: the answer to `a : b :: c : ?` is the
//! vocabulary word whose normalized input embedding has the largest cosine
//! with `b̂ − â + ĉ`, excluding `a`, `b` and `c`.
//!
//! Accuracy denominators include questions skipped for out-of-vocabulary
//! words. Equal scores resolve to the lowest vocabulary index.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyQuestion {
    pub a: String,
    pub b: String,
    pub c: String,
    pub expected: String,
    pub category: String,
}

/// Category headers start with `:`; every other non-blank line holds four
/// words. Words are lowercased.
pub fn parse_questions<R: BufRead>(reader: R) -> Result<Vec<AnalogyQuestion>> {
    let mut out = Vec::new();
    let mut category = String::from("uncategorized");
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix(':') {
            category = name.trim().to_owned();
            continue;
        }
        let words: Vec<String> = trimmed
            .split_whitespace()
            .map(|w| w.to_lowercase())
            .collect();
        let [a, b, c, expected]: [String; 4] =
            words.try_into().map_err(|w: Vec<String>| Error::Parse {
                line: n + 1,
                message: format!("expected 4 words, found {}", w.len()),
            })?;
        out.push(AnalogyQuestion {
            a,
            b,
            c,
            expected,
            category: category.clone(),
        });
    }
    Ok(out)
}

pub fn load_questions(path: impl AsRef<Path>) -> Result<Vec<AnalogyQuestion>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io_at(path, e))?;
    parse_questions(BufReader::new(f))
}

/// Syntactic categories in the standard file are prefixed `gram`.
pub fn is_semantic(category: &str) -> bool {
    !category.starts_with("gram")
}

/// Category name without the `gramN-` prefix.
pub fn display_category(category: &str) -> &str {
    category
        .strip_prefix("gram")
        .and_then(|rest| rest.split_once('-'))
        .filter(|(n, _)| n.chars().all(|c| c.is_ascii_digit()))
        .map(|(_, name)| name)
        .unwrap_or(category)
}

/// Row-normalized input embeddings with a word index.
#[derive(Debug, Clone)]
pub struct AnalogySolver<F> {
    dim: usize,
    rows: Vec<F>,
    index: HashMap<String, u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    /// Some question word is not in the vocabulary.
    Skipped,
    Predicted(u32),
}

impl<F: Scalar> AnalogySolver<F> {
    /// `matrix` is row-major `words.len() × dim`. Zero rows stay zero.
    pub fn new(words: &[String], matrix: &[F], dim: usize) -> Result<Self> {
        if dim == 0 || matrix.len() != words.len() * dim {
            return Err(Error::Dimension {
                expected: words.len() * dim,
                actual: matrix.len(),
            });
        }
        let mut rows = matrix.to_vec();
        for row in rows.chunks_exact_mut(dim) {
            let norm = dot(row, row).sqrt();
            if norm > F::zero() {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Ok(AnalogySolver { dim, rows, index })
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    fn row(&self, w: u32) -> &[F] {
        let s = w as usize * self.dim;
        &self.rows[s..s + self.dim]
    }

    pub fn resolve(&self, q: &AnalogyQuestion) -> Option<[u32; 4]> {
        Some([
            self.index_of(&q.a)?,
            self.index_of(&q.b)?,
            self.index_of(&q.c)?,
            self.index_of(&q.expected)?,
        ])
    }

    /// Best word for `a : b :: c : ?` by index.
    pub fn nearest(&self, a: u32, b: u32, c: u32) -> Option<u32> {
        let query: Vec<F> = self
            .row(b)
            .iter()
            .zip(self.row(a))
            .zip(self.row(c))
            .map(|((&xb, &xa), &xc)| xb - xa + xc)
            .collect();
        let mut best: Option<(u32, F)> = None;
        for (w, row) in self.rows.chunks_exact(self.dim).enumerate() {
            let w = w as u32;
            if w == a || w == b || w == c {
                continue;
            }
            let s = dot(row, &query);
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((w, s));
            }
        }
        best.map(|(w, _)| w)
    }

    pub fn answer(&self, q: &AnalogyQuestion) -> Answer {
        match self.resolve(q) {
            None => Answer::Skipped,
            Some([a, b, c, _]) => self
                .nearest(a, b, c)
                .map_or(Answer::Skipped, Answer::Predicted),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Score {
    pub correct: usize,
    pub total: usize,
    pub skipped: usize,
}

impl Score {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    fn add(&mut self, o: &Score) {
        self.correct += o.correct;
        self.total += o.total;
        self.skipped += o.skipped;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryScore {
    pub name: String,
    pub semantic: bool,
    #[serde(flatten)]
    pub score: Score,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EvalReport {
    /// In order of first appearance in the question list.
    pub categories: Vec<CategoryScore>,
    pub semantic: Score,
    pub syntactic: Score,
    pub total: Score,
}

impl EvalReport {
    pub fn skipped(&self) -> usize {
        self.total.skipped
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("category,group,correct,total,skipped,accuracy\n");
        let group = |sem: bool| if sem { "semantic" } else { "syntactic" };
        for c in &self.categories {
            s += &format!(
                "{},{},{},{},{},{:.6}\n",
                c.name,
                group(c.semantic),
                c.score.correct,
                c.score.total,
                c.score.skipped,
                c.score.accuracy()
            );
        }
        for (name, sc) in [
            ("semantic", &self.semantic),
            ("syntactic", &self.syntactic),
            ("total", &self.total),
        ] {
            s += &format!(
                "{name},{name},{},{},{},{:.6}\n",
                sc.correct,
                sc.total,
                sc.skipped,
                sc.accuracy()
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_table<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "{self}")
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |f: &mut fmt::Formatter<'_>, name: &str, s: &Score| {
            writeln!(
                f,
                "{:<26} {:>7.2}%  ({}/{})",
                name,
                100.0 * s.accuracy(),
                s.correct,
                s.total
            )
        };
        writeln!(f, "{:<26} {:>8}  correct/total", "category", "accuracy")?;
        for (label, semantic, rollup) in [
            ("Semantic", true, &self.semantic),
            ("Syntactic", false, &self.syntactic),
        ] {
            line(f, label, rollup)?;
            for c in self.categories.iter().filter(|c| c.semantic == semantic) {
                line(f, &format!("  {}", display_category(&c.name)), &c.score)?;
            }
        }
        line(f, "Total", &self.total)?;
        writeln!(f, "skipped (out of vocabulary): {}", self.total.skipped)
    }
}

/// Scores every question; evaluation runs in parallel and is reduced in
/// question order.
pub fn evaluate<F: Scalar>(solver: &AnalogySolver<F>, questions: &[AnalogyQuestion]) -> EvalReport {
    let outcomes: Vec<Option<bool>> = questions
        .par_iter()
        .map(|q| {
            solver
                .resolve(q)
                .map(|[a, b, c, expected]| solver.nearest(a, b, c) == Some(expected))
        })
        .collect();

    let mut report = EvalReport::default();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    for (q, outcome) in questions.iter().zip(outcomes) {
        let i = *slot.entry(q.category.as_str()).or_insert_with(|| {
            report.categories.push(CategoryScore {
                name: q.category.clone(),
                semantic: is_semantic(&q.category),
                score: Score::default(),
            });
            report.categories.len() - 1
        });
        let s = &mut report.categories[i].score;
        s.total += 1;
        match outcome {
            None => s.skipped += 1,
            Some(true) => s.correct += 1,
            Some(false) => {}
        }
    }
    for c in &report.categories {
        if c.semantic {
            report.semantic.add(&c.score);
        } else {
            report.syntactic.add(&c.score);
        }
        report.total.add(&c.score);
    }
    report
}
