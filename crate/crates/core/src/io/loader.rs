use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::benchmark::{Benchmark, EvalInstance};
use crate::error::{Error, Result};
use crate::text::Tokenizer;

/// Header line of the tab-separated benchmark format.
pub const TSV_HEADER: &str = "input\treference\tcandidate\tscore";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    input: String,
    #[serde(default)]
    reference: Option<String>,
    candidate: String,
    score: f64,
}

fn parse_tsv_line(line: &str, line_no: usize) -> Result<Record> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected 4 tab-separated fields, found {}", fields.len()),
        });
    }
    let score = fields[3].trim().parse::<f64>().map_err(|e| Error::Parse {
        line: line_no,
        message: format!("bad score {:?}: {e}", fields[3]),
    })?;
    Ok(Record {
        input: fields[0].to_string(),
        reference: (!fields[1].is_empty()).then(|| fields[1].to_string()),
        candidate: fields[2].to_string(),
        score,
    })
}

/// Reads a benchmark from line-delimited JSON records or the TSV fallback.
pub fn read_benchmark(
    reader: impl Read,
    name: &str,
    tokenizer: Tokenizer,
    language_tag: &str,
) -> Result<Benchmark> {
    let mut instances = Vec::new();
    let mut seen_pairs: HashSet<(String, String)> = HashSet::new();
    let mut references: HashMap<String, Option<String>> = HashMap::new();
    let mut tsv: Option<bool> = None;

    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let is_tsv = match tsv {
            Some(v) => v,
            None => {
                let header = line == TSV_HEADER;
                tsv = Some(header);
                if header {
                    continue;
                }
                false
            }
        };
        let record = if is_tsv {
            parse_tsv_line(line, line_no)?
        } else {
            serde_json::from_str::<Record>(line).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?
        };

        let instance = EvalInstance {
            input: record.input,
            reference: record.reference,
            candidate: record.candidate,
            score: record.score,
        };
        instance.validate(line_no)?;
        if !seen_pairs.insert((instance.input.clone(), instance.candidate.clone())) {
            return Err(Error::DuplicateRecord { line: line_no });
        }
        match references.get(&instance.input) {
            Some(r) if *r != instance.reference => {
                return Err(Error::InconsistentReference { line: line_no });
            }
            Some(_) => {}
            None => {
                references.insert(instance.input.clone(), instance.reference.clone());
            }
        }
        instances.push(instance);
    }

    Benchmark::new(name, language_tag, tokenizer, instances)
}

/// Loads a benchmark file. The benchmark is named after the file stem.
pub fn load_benchmark(path: impl AsRef<Path>, tokenizer: Tokenizer, language_tag: &str) -> Result<Benchmark> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "benchmark".into());
    let file = File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    read_benchmark(file, &name, tokenizer, language_tag)
}

/// Serializes a benchmark as line-delimited JSON records.
pub fn write_benchmark(benchmark: &Benchmark, mut writer: impl Write) -> Result<()> {
    for inst in benchmark.instances() {
        let record = Record {
            input: inst.input.clone(),
            reference: inst.reference.clone(),
            candidate: inst.candidate.clone(),
            score: inst.score,
        };
        serde_json::to_writer(&mut writer, &record).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn save_benchmark(benchmark: &Benchmark, path: impl AsRef<Path>) -> Result<()> {
    write_benchmark(benchmark, BufWriter::new(File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<Benchmark> {
        read_benchmark(s.as_bytes(), "t", Tokenizer::default(), "en")
    }

    #[test]
    fn jsonl_happy_path() {
        let b = read(concat!(
            r#"{"input":"x1","reference":"r1","candidate":"a","score":0.5}"#, "\n",
            r#"{"input":"x1","reference":"r1","candidate":"b","score":1}"#, "\n",
            "\n",
            r#"{"input":"x2","reference":null,"candidate":"c","score":0}"#, "\n",
        ))
        .unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.groups().len(), 2);
        assert_eq!(b.instances()[2].reference, None);
    }

    #[test]
    fn tsv_fallback() {
        let b = read("input\treference\tcandidate\tscore\nx\tr\tc\t0.25\nx\tr\td\t0.75\n").unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.instances()[0].reference.as_deref(), Some("r"));
        let b = read("input\treference\tcandidate\tscore\r\nx\t\tc\t0.25\r\n").unwrap();
        assert_eq!(b.instances()[0].reference, None);
    }

    #[test]
    fn out_of_range_score_reports_line() {
        let err = read(concat!(
            r#"{"input":"x","reference":"r","candidate":"a","score":0.5}"#, "\n",
            r#"{"input":"x","reference":"r","candidate":"b","score":1.3}"#, "\n",
        ))
        .unwrap_err();
        assert!(matches!(err, Error::ScoreOutOfRange { line: 2, .. }));
    }

    #[test]
    fn duplicates_rejected() {
        let line = r#"{"input":"x","reference":"r","candidate":"a","score":0.5}"#;
        let err = read(&format!("{line}\n{line}\n")).unwrap_err();
        assert!(matches!(err, Error::DuplicateRecord { line: 2 }));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(read("{not json}\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            read(r#"{"input":"x","candidate":"a","score":0.5,"extra":1}"#),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read("input\treference\tcandidate\tscore\nx\tr\tc\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read("input\treference\tcandidate\tscore\nx\tr\tc\tbad\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn inconsistent_reference_rejected() {
        let err = read(concat!(
            r#"{"input":"x","reference":"r1","candidate":"a","score":0.5}"#, "\n",
            r#"{"input":"x","reference":"r2","candidate":"b","score":0.5}"#, "\n",
        ))
        .unwrap_err();
        assert!(matches!(err, Error::InconsistentReference { line: 2 }));
    }
}
