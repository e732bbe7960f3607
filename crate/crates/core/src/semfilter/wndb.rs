//! Parser for the WordNet `index.noun` / `data.noun` text databases.
//!
//! Only what the filter needs is kept: synset lemmas, hypernym pointers
//! (`@` and the instance form `@i`) and the lemma index. License header
//! lines (leading space) are skipped.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{SynsetId, WordnetError, WordnetFile};

pub(super) struct RawGraph {
    pub synsets: BTreeMap<SynsetId, Vec<String>>,
    pub hypernyms: BTreeMap<SynsetId, Vec<SynsetId>>,
    pub lemma_index: BTreeMap<String, Vec<SynsetId>>,
}

fn err(file: WordnetFile, line: usize, message: impl ToString) -> WordnetError {
    WordnetError::Parse {
        file,
        line,
        message: message.to_string(),
    }
}

fn parse_offset(tok: &str, file: WordnetFile, line: usize) -> Result<SynsetId, WordnetError> {
    if tok.len() != 8 || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(file, line, alloc::format!("bad synset offset `{tok}`")));
    }
    tok.parse()
        .map(SynsetId)
        .map_err(|_| err(file, line, "bad synset offset"))
}

fn is_header(line: &str) -> bool {
    line.starts_with(' ') || line.trim().is_empty()
}

pub(super) fn parse(index: &str, data: &str) -> Result<RawGraph, WordnetError> {
    let mut synsets = BTreeMap::new();
    let mut hypernyms: BTreeMap<SynsetId, Vec<SynsetId>> = BTreeMap::new();
    let mut pointer_lines: BTreeMap<SynsetId, usize> = BTreeMap::new();

    for (i, line) in data.lines().enumerate() {
        let line_no = i + 1;
        if is_header(line) {
            continue;
        }
        let body = line.split(" | ").next().unwrap_or(line);
        let mut fields = body.split_ascii_whitespace();
        let mut next = |what: &str| {
            fields
                .next()
                .ok_or_else(|| err(WordnetFile::Data, line_no, alloc::format!("missing {what}")))
        };
        let id = parse_offset(next("offset")?, WordnetFile::Data, line_no)?;
        next("lex_filenum")?;
        let ss_type = next("ss_type")?;
        if ss_type != "n" {
            return Err(err(WordnetFile::Data, line_no, "only noun synsets are supported"));
        }
        let w_cnt = usize::from_str_radix(next("w_cnt")?, 16)
            .map_err(|_| err(WordnetFile::Data, line_no, "w_cnt is not hexadecimal"))?;
        let mut lemmas = Vec::with_capacity(w_cnt);
        for _ in 0..w_cnt {
            lemmas.push(next("word")?.to_lowercase());
            next("lex_id")?;
        }
        let p_cnt: usize = next("p_cnt")?
            .parse()
            .map_err(|_| err(WordnetFile::Data, line_no, "p_cnt is not a number"))?;
        let mut parents = Vec::new();
        for _ in 0..p_cnt {
            let symbol = next("pointer symbol")?;
            let target = parse_offset(next("pointer offset")?, WordnetFile::Data, line_no)?;
            let pos = next("pointer pos")?;
            next("source/target")?;
            if (symbol == "@" || symbol == "@i") && pos == "n" {
                parents.push(target);
            }
        }
        if synsets.insert(id, lemmas).is_some() {
            return Err(err(WordnetFile::Data, line_no, alloc::format!("duplicate synset {id}")));
        }
        pointer_lines.insert(id, line_no);
        hypernyms.insert(id, parents);
    }

    for (id, parents) in &hypernyms {
        for p in parents {
            if !synsets.contains_key(p) {
                return Err(err(
                    WordnetFile::Data,
                    pointer_lines[id],
                    alloc::format!("hypernym {p} of {id} is not defined"),
                ));
            }
        }
    }

    let mut lemma_index: BTreeMap<String, Vec<SynsetId>> = BTreeMap::new();
    for (i, line) in index.lines().enumerate() {
        let line_no = i + 1;
        if is_header(line) {
            continue;
        }
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        let num = |k: usize, what: &str| -> Result<usize, WordnetError> {
            fields
                .get(k)
                .ok_or_else(|| err(WordnetFile::Index, line_no, alloc::format!("missing {what}")))?
                .parse()
                .map_err(|_| err(WordnetFile::Index, line_no, alloc::format!("{what} is not a number")))
        };
        if fields.len() < 4 {
            return Err(err(WordnetFile::Index, line_no, "too few fields"));
        }
        let lemma = fields[0].to_lowercase();
        if fields[1] != "n" {
            return Err(err(WordnetFile::Index, line_no, "only noun entries are supported"));
        }
        let synset_cnt = num(2, "synset_cnt")?;
        let p_cnt = num(3, "p_cnt")?;
        // lemma pos synset_cnt p_cnt [ptr...] sense_cnt tagsense_cnt offsets...
        let first = 4 + p_cnt + 2;
        if fields.len() != first + synset_cnt {
            return Err(err(
                WordnetFile::Index,
                line_no,
                alloc::format!("expected {} fields, found {}", first + synset_cnt, fields.len()),
            ));
        }
        let mut ids = Vec::with_capacity(synset_cnt);
        let mut seen = BTreeSet::new();
        for tok in &fields[first..] {
            let id = parse_offset(tok, WordnetFile::Index, line_no)?;
            if !synsets.contains_key(&id) {
                return Err(err(
                    WordnetFile::Index,
                    line_no,
                    alloc::format!("synset {id} is not in the data file"),
                ));
            }
            if seen.insert(id) {
                ids.push(id);
            }
        }
        lemma_index.insert(lemma, ids);
    }

    Ok(RawGraph {
        synsets,
        hypernyms,
        lemma_index,
    })
}
