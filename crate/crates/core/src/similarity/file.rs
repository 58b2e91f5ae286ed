use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use super::{EmbeddingProvider, TokenEmbeddings};
use crate::error::{Error, Result};
use crate::text::TokenSequence;

/// Token whose vector, when present, is used for out-of-vocabulary tokens.
pub const DEFAULT_TOKEN: &str = "<unk>";

/// Static token vectors read from a text file.
///
/// The first line holds the dimension; each following line is a token and
/// `dim` space-separated floats.
#[derive(Debug, Clone)]
pub struct FileProvider {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl FileProvider {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| {
            Error::ProviderUnavailable(format!("cannot open {}: {e}", path.display()))
        })?;
        Self::from_reader(file)
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing dimension header".into(),
        })??;
        let dim: usize = header.trim().parse().map_err(|_| Error::Parse {
            line: 1,
            message: format!("bad dimension header {header:?}"),
        })?;
        if dim == 0 {
            return Err(Error::Parse {
                line: 1,
                message: "dimension must be positive".into(),
            });
        }

        let mut vectors = HashMap::new();
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("non-blank line has a field").to_string();
            let values = fields
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            if values.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: values.len(),
                });
            }
            vectors.insert(token, values);
        }
        Ok(Self { dim, vectors })
    }

    pub fn vocab_size(&self) -> usize {
        self.vectors.len()
    }
}

impl EmbeddingProvider for FileProvider {
    fn embed(&self, seq: &TokenSequence) -> Result<TokenEmbeddings> {
        let default = self.vectors.get(DEFAULT_TOKEN);
        let rows = seq
            .tokens()
            .iter()
            .map(|t| {
                self.vectors
                    .get(t)
                    .or(default)
                    .cloned()
                    .ok_or_else(|| Error::MissingEmbedding(t.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        TokenEmbeddings::from_rows(seq.tokens().to_vec(), self.dim, rows)
    }

    fn dim(&self) -> usize {
        self.dim
    }
}
