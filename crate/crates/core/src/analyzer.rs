//! Query-log analysis: triage, dedup by graph pattern, answerability and
//! template frequencies.

use std::collections::{HashMap, HashSet};
use std::io;
use std::path::Path;

use percent_encoding::percent_decode_str;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::answerability::is_ldaq;
use crate::pattern::extract_template;
use crate::sparql::{dedup_key, parse, repair, triage, TriageStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// One percent-encoded query per line.
    Lines,
    /// A directory of `.rq` files, read in name order.
    Dir,
}

pub fn ingest(source: &Path, format: InputFormat) -> io::Result<Vec<String>> {
    match format {
        InputFormat::Lines => {
            let text = std::fs::read_to_string(source)?;
            Ok(text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| match percent_decode_str(l).decode_utf8() {
                    Ok(s) => s.into_owned(),
                    Err(_) => l.to_owned(),
                })
                .collect())
        }
        InputFormat::Dir => {
            let mut paths: Vec<_> = std::fs::read_dir(source)?
                .map(|e| e.map(|e| e.path()))
                .collect::<io::Result<Vec<_>>>()?
                .into_iter()
                .filter(|p| p.extension().is_some_and(|e| e == "rq"))
                .collect();
            paths.sort();
            paths.iter().map(std::fs::read_to_string).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateCount {
    pub template: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub count: usize,
    /// Every template, by descending count then template text.
    pub templates: Vec<TemplateCount>,
    /// The first `k` entries of `templates`.
    pub top: Vec<TemplateCount>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub total: usize,
    pub invalid: usize,
    pub unconsidered: usize,
    pub remaining: usize,
    pub unique: usize,
    pub ldaq: ClassReport,
    #[serde(rename = "nonLdaq")]
    pub non_ldaq: ClassReport,
}

impl CorpusReport {
    pub fn ldaq_share(&self) -> f64 {
        if self.unique == 0 {
            0.0
        } else {
            self.ldaq.count as f64 / self.unique as f64
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

enum Outcome {
    Invalid,
    Unconsidered,
    Considered { key: String, answerable: bool, template: String },
}

fn classify(text: &str) -> Outcome {
    match triage(text).status {
        TriageStatus::Invalid => Outcome::Invalid,
        TriageStatus::Unconsidered => Outcome::Unconsidered,
        TriageStatus::Considered => match parse(&repair(text)) {
            Ok(q) => Outcome::Considered {
                key: dedup_key(&q),
                answerable: is_ldaq(&q.pattern).answerable,
                template: extract_template(&q.pattern).text,
            },
            Err(_) => Outcome::Invalid,
        },
    }
}

fn class_report(counts: HashMap<String, usize>, top_k: usize) -> ClassReport {
    let mut templates: Vec<TemplateCount> =
        counts.into_iter().map(|(template, count)| TemplateCount { template, count }).collect();
    templates.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.template.cmp(&b.template)));
    ClassReport {
        count: templates.iter().map(|t| t.count).sum(),
        top: templates.iter().take(top_k).cloned().collect(),
        templates,
    }
}

/// Classification runs in parallel; the first occurrence of each graph
/// pattern (in input order) is the one counted.
pub fn analyze(queries: &[String], top_k: usize) -> CorpusReport {
    let outcomes: Vec<Outcome> = queries.par_iter().map(|q| classify(q)).collect();
    let mut report = CorpusReport { total: queries.len(), ..Default::default() };
    let mut seen = HashSet::new();
    let mut ldaq: HashMap<String, usize> = HashMap::new();
    let mut non: HashMap<String, usize> = HashMap::new();
    for o in outcomes {
        match o {
            Outcome::Invalid => report.invalid += 1,
            Outcome::Unconsidered => report.unconsidered += 1,
            Outcome::Considered { key, answerable, template } => {
                report.remaining += 1;
                if seen.insert(key) {
                    report.unique += 1;
                    *(if answerable { &mut ldaq } else { &mut non }).entry(template).or_default() += 1;
                }
            }
        }
    }
    report.ldaq = class_report(ldaq, top_k);
    report.non_ldaq = class_report(non, top_k);
    report
}

pub fn export_json(report: &CorpusReport, out: &Path) -> io::Result<()> {
    std::fs::write(out, report.to_json() + "\n")
}

pub fn read_json(path: &Path) -> io::Result<CorpusReport> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

/// Writes `<prefix>_ldaq.csv` and `<prefix>_nonldaq.csv` with columns
/// rank, template, count.
pub fn export_csv(report: &CorpusReport, prefix: &str) -> io::Result<()> {
    for (suffix, class) in [("ldaq", &report.ldaq), ("nonldaq", &report.non_ldaq)] {
        let mut w = csv::Writer::from_path(format!("{prefix}_{suffix}.csv"))?;
        w.write_record(["rank", "template", "count"])?;
        for (i, t) in class.templates.iter().enumerate() {
            w.write_record([(i + 1).to_string(), t.template.clone(), t.count.to_string()])?;
        }
        w.flush()?;
    }
    Ok(())
}
