//! Dataset files: the JSONL interchange format and BigTOM CSV ingestion.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use simtom_core::corpus::{extract_question_character, parse_tomi_story};
use simtom_core::{
    BeliefKind, Benchmark, BigTomAxis, BigTomQuestion, Choice, CorpusError, Event, QuestionType, Sample, Story,
};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {reason}")]
    Record { line: usize, reason: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column {0}")]
    MissingColumn(&'static str),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.display().to_string(), source }
}

/// One dataset line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub benchmark: String,
    pub story_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<Event>>,
    pub question: String,
    pub qtype: String,
    pub order: String,
    pub tom: String,
    pub character: String,
    pub choice_a: String,
    pub choice_b: String,
    pub correct: Choice,
}

impl DatasetRecord {
    pub fn from_sample(s: &Sample) -> Self {
        DatasetRecord {
            id: s.id.clone(),
            benchmark: s.story.benchmark().as_str().to_string(),
            story_text: s.story.text(),
            events: s.story.events().map(<[Event]>::to_vec),
            question: s.question.clone(),
            qtype: s.qtype.label(),
            order: s.qtype.order_label().to_string(),
            tom: s.qtype.tom_label().to_string(),
            character: s.character.clone(),
            choice_a: s.choices.0.clone(),
            choice_b: s.choices.1.clone(),
            correct: s.correct,
        }
    }

    pub fn into_sample(self) -> Result<Sample, String> {
        let benchmark =
            Benchmark::parse(&self.benchmark).ok_or_else(|| format!("unknown benchmark {}", self.benchmark))?;
        let qtype = QuestionType::from_label(&self.qtype).ok_or_else(|| format!("unknown qtype {}", self.qtype))?;
        if qtype.benchmark() != benchmark {
            return Err(format!("qtype {} does not belong to {benchmark}", self.qtype));
        }
        let story = match benchmark {
            Benchmark::Tomi => match self.events {
                Some(events) => Story::tomi(self.id.clone(), events),
                None => {
                    let mut story = parse_tomi_story(&self.story_text).map_err(|e| e.to_string())?;
                    story.id = self.id.clone();
                    story
                }
            },
            Benchmark::BigTom => Story::bigtom(self.id.clone(), self.story_text),
        };
        let sample = Sample {
            id: self.id,
            story,
            question: self.question,
            qtype,
            character: self.character,
            choices: (self.choice_a, self.choice_b),
            correct: self.correct,
        };
        sample.validate().map_err(|e| e.to_string())?;
        Ok(sample)
    }
}

pub fn write_jsonl(path: &Path, samples: &[Sample]) -> Result<(), DatasetError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for s in samples {
        let line = serde_json::to_string(&DatasetRecord::from_sample(s)).expect("records serialize");
        writeln!(out, "{line}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<Sample>, DatasetError> {
    let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let mut samples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = |reason: String| DatasetError::Record { line: i + 1, reason };
        let rec: DatasetRecord = serde_json::from_str(&line).map_err(|e| record(e.to_string()))?;
        samples.push(rec.into_sample().map_err(record)?);
    }
    Ok(samples)
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct BigTomIngest {
    pub samples: Vec<Sample>,
    /// Backward-belief rows, which are not evaluated.
    pub backward_excluded: usize,
    /// Rows with a condition label that names no known question type.
    pub unknown_skipped: usize,
}

/// Maps a BigTOM condition label such as `0_forward_belief_false_belief`
/// onto a question type. `Err(true)` marks a backward condition.
pub fn bigtom_condition(label: &str) -> Result<QuestionType, bool> {
    let l = label.to_ascii_lowercase().replace(['-', ' '], "_");
    if l.contains("backward") {
        return Err(true);
    }
    let axis = if l.contains("forward_action") {
        BigTomAxis::ForwardAction
    } else if l.contains("forward_belief") {
        BigTomAxis::ForwardBelief
    } else {
        return Err(false);
    };
    let belief = if l.contains("false_belief") || l.ends_with("_fb") {
        BeliefKind::FalseBelief
    } else if l.contains("true_belief") || l.ends_with("_tb") {
        BeliefKind::TrueBelief
    } else {
        return Err(false);
    };
    Ok(QuestionType::BigTom(BigTomQuestion { axis, belief }))
}

fn column(headers: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    headers.iter().position(|h| names.iter().any(|n| h.trim().eq_ignore_ascii_case(n)))
}

fn parse_correct(value: &str) -> Option<Choice> {
    match value.trim().to_ascii_lowercase().as_str() {
        "0" | "a" | "a)" => Some(Choice::A),
        "1" | "b" | "b)" => Some(Choice::B),
        _ => None,
    }
}

/// Reads the published BigTOM table: story, question, two answers, the
/// index of the correct one and a condition label. Comma or semicolon
/// delimited, chosen from the header line.
pub fn load_bigtom(path: &Path) -> Result<BigTomIngest, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let header = text.lines().next().unwrap_or("");
    if header.trim().is_empty() {
        log::warn!("{} is empty", path.display());
        return Ok(BigTomIngest::default());
    }
    let delimiter = if header.matches(';').count() > header.matches(',').count() { b';' } else { b',' };
    let mut reader = csv::ReaderBuilder::new().delimiter(delimiter).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let idx = |names: &[&str], name: &'static str| column(&headers, names).ok_or(DatasetError::MissingColumn(name));
    let story_i = idx(&["story", "context"], "story")?;
    let question_i = idx(&["question"], "question")?;
    let a_i = idx(&["answer_a", "choice_a", "option_a", "true_answer"], "answer_a")?;
    let b_i = idx(&["answer_b", "choice_b", "option_b", "wrong_answer"], "answer_b")?;
    let correct_i = column(&headers, &["correct", "correct_index", "answer", "label"]);
    let condition_i = idx(&["condition", "qtype", "question_type"], "condition")?;

    let mut out = BigTomIngest::default();
    let mut per_type: BTreeMap<String, usize> = BTreeMap::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("").trim().to_string();
        let qtype = match bigtom_condition(&field(condition_i)) {
            Ok(q) => q,
            Err(true) => {
                out.backward_excluded += 1;
                continue;
            }
            Err(false) => {
                log::warn!("row {}: unknown condition {:?}, skipped", row + 2, field(condition_i));
                out.unknown_skipped += 1;
                continue;
            }
        };
        // Without a correct column the first answer is the right one.
        let correct = match correct_i {
            Some(i) => parse_correct(&field(i)).ok_or_else(|| DatasetError::Record {
                line: row + 2,
                reason: format!("unreadable correct value {:?}", field(i)),
            })?,
            None => Choice::A,
        };
        let story_text = field(story_i);
        let character = extract_question_character("", Benchmark::BigTom, &story_text)?;
        let n = per_type.entry(qtype.label()).or_default();
        let id = format!("bigtom-{}-{:04}", qtype.label(), *n);
        *n += 1;
        let sample = Sample {
            story: Story::bigtom(id.clone(), story_text),
            id,
            question: field(question_i),
            qtype,
            character,
            choices: (field(a_i), field(b_i)),
            correct,
        };
        sample.validate().map_err(|e| DatasetError::Record { line: row + 2, reason: e.to_string() })?;
        out.samples.push(sample);
    }
    if out.backward_excluded > 0 {
        log::info!("excluded {} backward-belief rows", out.backward_excluded);
    }
    Ok(out)
}

/// A perspective for one sample: computed by the oracle for ToMI, or a
/// human annotation for BigTOM.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerspectiveRecord {
    pub id: String,
    pub character: String,
    pub perspective_text: String,
    #[serde(default)]
    pub ground_truth: Option<Choice>,
}

pub fn write_perspectives(path: &Path, records: &[PerspectiveRecord]) -> Result<(), DatasetError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for r in records {
        writeln!(out, "{}", serde_json::to_string(r).expect("records serialize")).map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

/// Perspective texts keyed by sample id.
pub fn read_perspectives(path: &Path) -> Result<BTreeMap<String, String>, DatasetError> {
    let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let mut out = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: PerspectiveRecord =
            serde_json::from_str(&line).map_err(|e| DatasetError::Record { line: i + 1, reason: e.to_string() })?;
        out.insert(r.id, r.perspective_text);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use simtom_core::corpus::generate_tomi_corpus;

    #[test]
    fn jsonl_round_trip_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let (p1, p2) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
        let samples = generate_tomi_corpus(7, 3);
        write_jsonl(&p1, &samples).unwrap();
        let back = read_jsonl(&p1).unwrap();
        assert_eq!(back, samples);
        write_jsonl(&p2, &back).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn tomi_record_without_events_is_parsed_from_text() {
        let s = &generate_tomi_corpus(1, 1)[0];
        let mut rec = DatasetRecord::from_sample(s);
        rec.events = None;
        assert_eq!(&rec.into_sample().unwrap(), s);
    }

    #[test]
    fn perspectives_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        let rec = PerspectiveRecord {
            id: "x".into(),
            character: "Noor".into(),
            perspective_text: "Noor pours milk.".into(),
            ground_truth: None,
        };
        write_perspectives(&path, &[rec]).unwrap();
        assert_eq!(read_perspectives(&path).unwrap()["x"], "Noor pours milk.");
    }

    #[test]
    fn conditions() {
        assert_eq!(bigtom_condition("0_forward_belief_false_belief").unwrap().label(), "forward_belief_false_belief");
        assert_eq!(bigtom_condition("forward_action_true_belief").unwrap().label(), "forward_action_true_belief");
        assert_eq!(bigtom_condition("backward_belief_false_belief"), Err(true));
        assert_eq!(bigtom_condition("sideways"), Err(false));
    }

    #[test]
    fn bigtom_csv_filters_conditions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bigtom.csv");
        std::fs::write(
            &path,
            "story;question;answer_a;answer_b;correct;condition\n\
             Noor, a barista, pours milk.;Does Noor think it is oat milk?;yes;no;1;forward_belief_false_belief\n\
             Noor, a barista, pours milk.;What will Noor do?;serve;swap;a;forward_action_true_belief\n\
             Noor, a barista, pours milk.;Before?;x;y;0;backward_belief_false_belief\n\
             Noor, a barista, pours milk.;?;x;y;0;mystery\n",
        )
        .unwrap();
        let ingest = load_bigtom(&path).unwrap();
        assert_eq!(ingest.samples.len(), 2);
        assert_eq!(ingest.backward_excluded, 1);
        assert_eq!(ingest.unknown_skipped, 1);
        assert_eq!(ingest.samples[0].character, "Noor");
        assert_eq!(ingest.samples[0].correct, Choice::B);
        assert_eq!(ingest.samples[1].id, "bigtom-forward_action_true_belief-0000");
    }

    #[test]
    fn empty_bigtom_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "").unwrap();
        assert!(load_bigtom(&path).unwrap().samples.is_empty());
        assert!(matches!(load_bigtom(&dir.path().join("missing.csv")), Err(DatasetError::Io { .. })));
    }
}
