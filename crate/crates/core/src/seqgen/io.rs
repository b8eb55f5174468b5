//! Text formats for sequences and edit scripts.
//!
//! Sequences use FASTA with the DNA alphabet (`A,C,G,T` ↔ `0..3`). Edit
//! scripts are line oriented; positions are 1-based and absolute in S:
//!
//! ```text
//! # p=0 m_prime=8
//! 1 ins:- del:0 sub:-
//! 4 ins:T del:0 sub:-
//! 5 ins:- del:1 sub:-
//! ```
//!
//! Positions without events may be omitted.

use std::io::{BufRead, Write};

use super::{EditRecord, EditScript};
use crate::error::{Error, Result};

const DNA: [u8; 4] = *b"ACGT";

pub fn dna_to_letters(text: &str) -> Result<Vec<u8>> {
    text.bytes()
        .map(|b| match b.to_ascii_uppercase() {
            b'A' => Ok(0),
            b'C' => Ok(1),
            b'G' => Ok(2),
            b'T' => Ok(3),
            other => Err(Error::Param(format!("not a DNA letter: {:?}", other as char))),
        })
        .collect()
}

/// Panics on letters outside `0..4`.
pub fn letters_to_dna(letters: &[u8]) -> String {
    letters.iter().map(|&c| DNA[c as usize] as char).collect()
}

fn check_dna(letters: &[u8]) -> Result<()> {
    match letters.iter().find(|&&c| c >= 4) {
        Some(c) => Err(Error::Param(format!("letter {c} has no DNA encoding (alphabet larger than 4)"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub name: String,
    pub seq: Vec<u8>,
}

pub fn write_fasta<W: Write>(mut w: W, records: &[FastaRecord]) -> Result<()> {
    for rec in records {
        check_dna(&rec.seq)?;
        writeln!(w, ">{}", rec.name)?;
        let text = letters_to_dna(&rec.seq);
        for line in text.as_bytes().chunks(80) {
            w.write_all(line)?;
            w.write_all(b"\n")?;
        }
        if rec.seq.is_empty() {
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn read_fasta<R: BufRead>(r: R) -> Result<Vec<FastaRecord>> {
    let mut out: Vec<FastaRecord> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if let Some(name) = line.strip_prefix('>') {
            out.push(FastaRecord {
                name: name.trim().to_string(),
                seq: Vec::new(),
            });
        } else if !line.is_empty() {
            let rec = out.last_mut().ok_or(Error::Parse {
                line: lineno + 1,
                msg: "sequence data before the first header".into(),
            })?;
            let letters = dna_to_letters(line).map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: e.to_string(),
            })?;
            rec.seq.extend(letters);
        }
    }
    Ok(out)
}

pub fn write_edit_script<W: Write>(mut w: W, script: &EditScript) -> Result<()> {
    writeln!(w, "# p={} m_prime={}", script.p, script.m_prime())?;
    for (j, rec) in script.records.iter().enumerate() {
        check_dna(&rec.inserted)?;
        let ins = if rec.inserted.is_empty() {
            "-".to_string()
        } else {
            letters_to_dna(&rec.inserted)
        };
        let sub = match rec.substituted {
            Some(c) => {
                check_dna(&[c])?;
                letters_to_dna(&[c])
            }
            None => "-".to_string(),
        };
        writeln!(
            w,
            "{} ins:{} del:{} sub:{}",
            script.p + j + 1,
            ins,
            rec.deleted as u8,
            sub
        )?;
    }
    Ok(())
}

pub fn read_edit_script<R: BufRead>(r: R) -> Result<EditScript> {
    let mut script: Option<EditScript> = None;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let bad = |msg: String| Error::Parse { line: lineno + 1, msg };
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            if script.is_some() {
                continue;
            }
            let (mut p, mut m) = (None, None);
            for field in header.split_whitespace() {
                if let Some(v) = field.strip_prefix("p=") {
                    p = Some(v.parse::<usize>().map_err(|e| bad(format!("p: {e}")))?);
                } else if let Some(v) = field.strip_prefix("m_prime=") {
                    m = Some(v.parse::<usize>().map_err(|e| bad(format!("m_prime: {e}")))?);
                }
            }
            match (p, m) {
                (Some(p), Some(m)) => script = Some(EditScript::unmutated(p, m)),
                _ => return Err(bad("header must give p= and m_prime=".into())),
            }
            continue;
        }
        let script = script
            .as_mut()
            .ok_or_else(|| bad("record before the `# p= m_prime=` header".into()))?;
        let mut fields = line.split_whitespace();
        let pos: usize = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| bad(format!("position: {e}")))?;
        let mut rec = EditRecord::default();
        for field in fields {
            let (key, value) = field
                .split_once(':')
                .ok_or_else(|| bad(format!("malformed field {field:?}")))?;
            match key {
                "ins" if value != "-" => {
                    rec.inserted = dna_to_letters(value).map_err(|e| bad(e.to_string()))?
                }
                "ins" => {}
                "del" => {
                    rec.deleted = match value {
                        "0" => false,
                        "1" => true,
                        _ => return Err(bad(format!("del must be 0 or 1, got {value:?}"))),
                    }
                }
                "sub" if value != "-" => {
                    let c = dna_to_letters(value).map_err(|e| bad(e.to_string()))?;
                    if c.len() != 1 {
                        return Err(bad(format!("sub takes one letter, got {value:?}")));
                    }
                    rec.substituted = Some(c[0]);
                }
                "sub" => {}
                _ => return Err(bad(format!("unknown field {key:?}"))),
            }
        }
        let slot = script
            .record_at_mut(pos)
            .ok_or_else(|| bad(format!("position {pos} is outside the generative region")))?;
        *slot = rec;
    }
    script.ok_or(Error::Parse {
        line: 0,
        msg: "missing `# p= m_prime=` header".into(),
    })
}
