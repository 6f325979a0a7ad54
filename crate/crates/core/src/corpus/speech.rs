use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A highlighted entity occurrence. Offsets count Unicode scalar values
/// (chars) into the speech text, `begin` inclusive and `end` exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub entity_id: String,
    pub begin: usize,
    pub end: usize,
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Speech {
    pub id: String,
    pub debate_id: String,
    pub debate_title: String,
    pub date: NaiveDate,
    pub speaker: String,
    pub text: String,
    #[serde(default)]
    pub mentions: Vec<EntityMention>,
}

impl Speech {
    /// Text covered by `[begin, end)` in char offsets, if in bounds.
    pub fn span(&self, begin: usize, end: usize) -> Option<&str> {
        if begin >= end {
            return None;
        }
        let mut bounds = self
            .text
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(self.text.len()));
        let start = bounds.nth(begin)?;
        let stop = bounds.nth(end - begin - 1)?;
        Some(&self.text[start..stop])
    }

    fn validate(&self) -> Result<()> {
        let len = self.text.chars().count();
        for m in &self.mentions {
            if m.begin >= m.end || m.end > len {
                return Err(Error::Invalid {
                    id: self.id.clone(),
                    message: format!(
                        "mention of {} spans [{}, {}) outside text of length {len}",
                        m.entity_id, m.begin, m.end
                    ),
                });
            }
            match self.span(m.begin, m.end) {
                Some(s) if s == m.surface => {}
                other => {
                    return Err(Error::Invalid {
                        id: self.id.clone(),
                        message: format!(
                            "mention surface {:?} does not match text {:?}",
                            m.surface,
                            other.unwrap_or_default()
                        ),
                    })
                }
            }
            if m.entity_id.is_empty() {
                return Err(Error::Invalid {
                    id: self.id.clone(),
                    message: "mention with empty entity id".into(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Debate {
    pub id: String,
    pub title: String,
    /// Earliest speech date in the debate.
    pub date: NaiveDate,
    /// Speech positions in corpus order.
    pub speeches: Vec<usize>,
}

/// Validated, immutable speech collection with per-entity mention
/// statistics.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    speeches: Vec<Speech>,
    by_id: HashMap<String, usize>,
    debates: Vec<Debate>,
    debate_by_id: HashMap<String, usize>,
    speech_debate: Vec<usize>,
    // entity -> (speech position, mention count), ascending by position
    entity_speeches: HashMap<String, Vec<(usize, u32)>>,
    entity_totals: HashMap<String, u64>,
}

impl Corpus {
    pub fn from_speeches(speeches: Vec<Speech>) -> Result<Self> {
        let mut corpus = Corpus::default();
        for (pos, speech) in speeches.into_iter().enumerate() {
            speech.validate()?;
            if corpus.by_id.insert(speech.id.clone(), pos).is_some() {
                return Err(Error::Duplicate {
                    kind: "speech",
                    id: speech.id,
                });
            }
            let debate = match corpus.debate_by_id.get(&speech.debate_id) {
                Some(&d) => {
                    let debate = &mut corpus.debates[d];
                    debate.date = debate.date.min(speech.date);
                    debate.speeches.push(pos);
                    d
                }
                None => {
                    let d = corpus.debates.len();
                    corpus.debates.push(Debate {
                        id: speech.debate_id.clone(),
                        title: speech.debate_title.clone(),
                        date: speech.date,
                        speeches: vec![pos],
                    });
                    corpus.debate_by_id.insert(speech.debate_id.clone(), d);
                    d
                }
            };
            corpus.speech_debate.push(debate);

            let mut counts: Vec<(&str, u32)> = Vec::new();
            for m in &speech.mentions {
                match counts.iter_mut().find(|(e, _)| *e == m.entity_id) {
                    Some((_, c)) => *c += 1,
                    None => counts.push((&m.entity_id, 1)),
                }
            }
            for (entity, count) in counts {
                corpus
                    .entity_speeches
                    .entry(entity.to_string())
                    .or_default()
                    .push((pos, count));
                *corpus.entity_totals.entry(entity.to_string()).or_default() += u64::from(count);
            }
            corpus.speeches.push(speech);
        }
        Ok(corpus)
    }

    pub fn len(&self) -> usize {
        self.speeches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeches.is_empty()
    }

    pub fn speeches(&self) -> &[Speech] {
        &self.speeches
    }

    pub fn speech(&self, id: &str) -> Option<&Speech> {
        self.by_id.get(id).map(|&i| &self.speeches[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn debates(&self) -> &[Debate] {
        &self.debates
    }

    pub fn debate_of(&self, speech_pos: usize) -> &Debate {
        &self.debates[self.speech_debate[speech_pos]]
    }

    pub fn debate_index_of(&self, speech_pos: usize) -> usize {
        self.speech_debate[speech_pos]
    }

    /// `(speech position, mention count)` for every speech mentioning the
    /// entity, ascending by position.
    pub fn entity_occurrences(&self, entity: &str) -> &[(usize, u32)] {
        self.entity_speeches
            .get(entity)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Total mention count of the entity across all speeches.
    pub fn entity_total(&self, entity: &str) -> u64 {
        self.entity_totals.get(entity).copied().unwrap_or(0)
    }

    pub fn mentions_entity(&self, entity: &str) -> bool {
        self.entity_totals.contains_key(entity)
    }

    /// Entity ids mentioned anywhere, sorted.
    pub fn entities(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.entity_totals.keys().map(String::as_str).collect();
        ids.sort_unstable();
        ids
    }

    pub fn date_range(&self) -> Option<(NaiveDate, NaiveDate)> {
        let first = self.speeches.first()?.date;
        Some(self.speeches.iter().fold((first, first), |(lo, hi), s| {
            (lo.min(s.date), hi.max(s.date))
        }))
    }
}

/// Load line-delimited JSON speech records. Blank lines are skipped.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut speeches = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let speech: Speech = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: n + 1,
            message: e.to_string(),
        })?;
        speeches.push(speech);
    }
    Corpus::from_speeches(speeches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    pub(crate) fn speech(id: &str, debate: &str, date: &str, text: &str) -> Speech {
        Speech {
            id: id.into(),
            debate_id: debate.into(),
            debate_title: format!("Debate {debate}"),
            date: date.parse().unwrap(),
            speaker: "speaker".into(),
            text: text.into(),
            mentions: vec![],
        }
    }

    fn write_lines(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    const LINE_A: &str = r#"{"id":"a","debate_id":"d","debate_title":"T","date":"2001-01-01","speaker":"x","text":"tax cuts","mentions":[{"entity_id":"Tax","begin":0,"end":3,"surface":"tax"}]}"#;
    const LINE_B: &str = r#"{"id":"b","debate_id":"d","debate_title":"T","date":"2001-01-02","speaker":"y","text":"more tax","mentions":[]}"#;

    #[test]
    fn empty_file_is_empty_corpus() {
        let f = write_lines(&[]);
        let c = load_corpus(f.path()).unwrap();
        assert_eq!(c.len(), 0);
        assert!(c.date_range().is_none());
    }

    #[test]
    fn two_distinct_lines() {
        let f = write_lines(&[LINE_A, "", LINE_B]);
        let c = load_corpus(f.path()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.debates().len(), 1);
        assert_eq!(c.entity_total("Tax"), 1);
    }

    #[test]
    fn duplicate_id_is_named() {
        let f = write_lines(&[LINE_A, LINE_A]);
        let err = load_corpus(f.path()).unwrap_err();
        assert!(matches!(&err, Error::Duplicate { id, .. } if id == "a"), "{err}");
        assert!(err.to_string().contains('a'));
    }

    #[test]
    fn parse_error_reports_line() {
        let f = write_lines(&[LINE_A, "{not json"]);
        match load_corpus(f.path()).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bad_date_is_parse_error() {
        let f = write_lines(&[&LINE_A.replace("2001-01-01", "2001-13-01")]);
        assert!(matches!(load_corpus(f.path()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn mention_surface_mismatch_rejected() {
        let mut s = speech("x", "d", "2000-01-01", "tax cuts");
        s.mentions.push(EntityMention {
            entity_id: "Tax".into(),
            begin: 0,
            end: 3,
            surface: "Tax".into(),
        });
        let err = Corpus::from_speeches(vec![s]).unwrap_err();
        assert!(matches!(err, Error::Invalid { ref id, .. } if id == "x"));
    }

    #[test]
    fn mention_out_of_bounds_rejected() {
        let mut s = speech("x", "d", "2000-01-01", "tax");
        s.mentions.push(EntityMention {
            entity_id: "Tax".into(),
            begin: 1,
            end: 4,
            surface: "ax".into(),
        });
        assert!(Corpus::from_speeches(vec![s]).is_err());
    }

    #[test]
    fn spans_count_chars_not_bytes() {
        let mut s = speech("x", "d", "2000-01-01", "één belasting");
        s.mentions.push(EntityMention {
            entity_id: "Belasting".into(),
            begin: 4,
            end: 13,
            surface: "belasting".into(),
        });
        let c = Corpus::from_speeches(vec![s]).unwrap();
        assert_eq!(c.entity_total("Belasting"), 1);
        assert_eq!(c.speeches()[0].span(0, 3), Some("één"));
    }

    #[test]
    fn debate_date_is_earliest() {
        let c = Corpus::from_speeches(vec![
            speech("a", "d", "2005-05-05", "x"),
            speech("b", "d", "2004-04-04", "y"),
        ])
        .unwrap();
        assert_eq!(c.debates()[0].date, "2004-04-04".parse().unwrap());
        assert_eq!(c.debates()[0].speeches, vec![0, 1]);
    }
}
