use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const VOTES_SCHEMA: &str = "speed.votes/1";

fn votes_schema() -> String {
    VOTES_SCHEMA.to_string()
}

/// Clear per-query class counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteHistogram {
    #[serde(default = "votes_schema")]
    pub schema: String,
    /// Number of teachers.
    pub n: usize,
    /// Number of classes.
    pub k: usize,
    pub queries: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_labels: Option<Vec<usize>>,
}

impl VoteHistogram {
    pub fn new(
        n: usize,
        k: usize,
        queries: Vec<Vec<u64>>,
        true_labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let h = Self {
            schema: votes_schema(),
            n,
            k,
            queries,
            true_labels,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != VOTES_SCHEMA {
            return Err(Error::Invalid(format!(
                "unsupported votes schema {:?}, expected {VOTES_SCHEMA:?}",
                self.schema
            )));
        }
        if self.n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if self.k < 2 {
            return Err(Error::Invalid(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        for (i, row) in self.queries.iter().enumerate() {
            if row.len() != self.k {
                return Err(Error::Invalid(format!(
                    "query {i}: expected {} counts, found {}",
                    self.k,
                    row.len()
                )));
            }
            let total: u64 = row.iter().sum();
            if total > self.n as u64 {
                return Err(Error::Invalid(format!(
                    "query {i}: counts sum to {total}, more than n = {}",
                    self.n
                )));
            }
        }
        if let Some(labels) = &self.true_labels {
            if labels.len() != self.queries.len() {
                return Err(Error::Invalid(format!(
                    "{} true labels for {} queries",
                    labels.len(),
                    self.queries.len()
                )));
            }
            if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= self.k) {
                return Err(Error::Invalid(format!(
                    "query {i}: true label {l} out of range for {} classes",
                    self.k
                )));
            }
        }
        Ok(())
    }

    pub fn from_json<R: Read>(reader: R) -> Result<Self> {
        let h: Self = serde_json::from_reader(reader)
            .map_err(|e| Error::Invalid(format!("votes JSON: {e}")))?;
        h.validate()?;
        Ok(h)
    }

    pub fn to_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)
            .map_err(|e| Error::Invalid(format!("votes JSON: {e}")))
    }

    /// One query per row. An optional header names the columns; `schema`
    /// and `query` columns are ignored, a `label` column fills the true
    /// labels and every other column is a class count. `n` defaults to the
    /// largest row total.
    pub fn from_csv<R: Read>(reader: R, n: Option<usize>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut roles: Option<Vec<Column>> = None;
        let mut queries = Vec::new();
        let mut labels = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Invalid(format!("votes CSV: {e}")))?;
            let line = record.position().map_or(i as u64 + 1, |p| p.line());
            if i == 0 && record.iter().any(|f| f.parse::<u64>().is_err()) {
                roles = Some(record.iter().map(Column::from_header).collect());
                continue;
            }
            let roles = roles.get_or_insert_with(|| vec![Column::Count; record.len()]);
            if record.len() != roles.len() {
                return Err(Error::Invalid(format!(
                    "votes CSV row {line}: expected {} fields, found {}",
                    roles.len(),
                    record.len()
                )));
            }
            let mut row = Vec::new();
            for (j, (field, role)) in record.iter().zip(roles.iter()).enumerate() {
                let parse = || {
                    field.parse::<u64>().map_err(|_| {
                        Error::Invalid(format!(
                            "votes CSV row {line}, column {}: {field:?} is not a non-negative integer",
                            j + 1
                        ))
                    })
                };
                match role {
                    Column::Ignored => {}
                    Column::Count => row.push(parse()?),
                    Column::Label => labels.push(parse()? as usize),
                }
            }
            queries.push(row);
        }
        let k = queries
            .first()
            .map(Vec::len)
            .or_else(|| {
                roles
                    .as_ref()
                    .map(|r| r.iter().filter(|c| **c == Column::Count).count())
            })
            .unwrap_or(2);
        let n = n.unwrap_or_else(|| {
            queries
                .iter()
                .map(|r| r.iter().sum::<u64>() as usize)
                .max()
                .unwrap_or(1)
                .max(1)
        });
        let has_labels = roles.is_some_and(|r| r.contains(&Column::Label));
        Self::new(n, k, queries, has_labels.then_some(labels))
    }

    /// Writes the CSV layout read by [`VoteHistogram::from_csv`], with a
    /// leading schema column.
    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Invalid(format!("votes CSV: {e}"));
        let mut header = vec!["schema".to_string(), "query".to_string()];
        header.extend((0..self.k).map(|c| format!("class_{c}")));
        if self.true_labels.is_some() {
            header.push("label".into());
        }
        w.write_record(&header).map_err(io)?;
        for (i, row) in self.queries.iter().enumerate() {
            let mut rec = vec![self.schema.clone(), i.to_string()];
            rec.extend(row.iter().map(u64::to_string));
            if let Some(l) = &self.true_labels {
                rec.push(l[i].to_string());
            }
            w.write_record(&rec).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Invalid(format!("votes CSV: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Count,
    Label,
    Ignored,
}

impl Column {
    fn from_header(name: &str) -> Self {
        match name.to_ascii_lowercase().as_str() {
            "schema" | "query" => Column::Ignored,
            "label" | "true_label" => Column::Label,
            _ => Column::Count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_defaults() {
        let src = r#"{"n": 5, "k": 3, "queries": [[1, 2, 2], [5, 0, 0]]}"#;
        let h = VoteHistogram::from_json(src.as_bytes()).unwrap();
        assert_eq!(h.schema, VOTES_SCHEMA);
        let mut out = Vec::new();
        h.to_json(&mut out).unwrap();
        assert_eq!(VoteHistogram::from_json(out.as_slice()).unwrap(), h);
    }

    #[test]
    fn json_rejects_overfull_row() {
        let src = r#"{"n": 5, "k": 3, "queries": [[1, 2, 2], [5, 1, 0]]}"#;
        let err = VoteHistogram::from_json(src.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("query 1"), "{err}");
    }

    #[test]
    fn csv_plain_rows() {
        let h = VoteHistogram::from_csv("3,1,0\n0,4,0\n".as_bytes(), None).unwrap();
        assert_eq!(h.k, 3);
        assert_eq!(h.n, 4);
        assert_eq!(h.queries[1], vec![0, 4, 0]);
    }

    #[test]
    fn csv_roundtrip_with_labels() {
        let h = VoteHistogram::new(6, 2, vec![vec![4, 2], vec![1, 5]], Some(vec![0, 1])).unwrap();
        let mut out = Vec::new();
        h.to_csv(&mut out).unwrap();
        assert_eq!(VoteHistogram::from_csv(out.as_slice(), Some(6)).unwrap(), h);
    }

    #[test]
    fn csv_diagnostic_names_row() {
        let err = VoteHistogram::from_csv("1,2\n3,x\n".as_bytes(), None).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        let err = VoteHistogram::from_csv("1,2\n3\n".as_bytes(), None).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }
}
