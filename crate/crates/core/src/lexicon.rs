//! Per-class word sets and caption-derived multi-hot labels.
//!
//! A caption is lower-cased and split on anything that is not a letter or a
//! digit. Lexicon phrases are then matched greedily, longest first, so a
//! multiword form such as "potted plant" wins over any of its parts. Matching
//! is on whole tokens only: "category" never matches "cat".

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// The PASCAL-VOC word sets shipped with the crate.
pub const VOC_LEXICON: &str = include_str!("../data/voc_lexicon.txt");

/// Irregular singular/plural pairs used by plural expansion.
pub const IRREGULAR_PLURALS: &[(&str, &str)] = &[
    ("man", "men"),
    ("woman", "women"),
    ("person", "people"),
    ("sheep", "sheep"),
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: expected `class: form, form, ...`")]
    Malformed { line: usize },
    #[error("line {line}: class `{class}` has an empty word set (use `-` for name only)")]
    EmptyWordSet { line: usize, class: String },
    #[error("line {line}: class `{class}` is declared twice")]
    DuplicateClass { line: usize, class: String },
    #[error("surface form `{form}` maps to both `{first}` and `{second}`")]
    DuplicateForm {
        form: String,
        first: String,
        second: String,
    },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PluralExpansion {
    /// Only the forms written in the file.
    #[default]
    Off,
    /// Also accept `-s`/`-es` plurals and the irregular table.
    On,
}

/// Where a caption came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaptionSource {
    Provider,
    Stored,
    Regenerated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caption {
    pub text: String,
    pub source: CaptionSource,
}

impl Caption {
    pub fn new(text: impl Into<String>, source: CaptionSource) -> Self {
        Self {
            text: text.into(),
            source,
        }
    }
}

/// Ordered classes and the surface forms that evidence each one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassLexicon {
    classes: Vec<String>,
    /// Normalised form (tokens joined by one space) -> class index.
    forms: BTreeMap<String, usize>,
    /// Forms written in the source, per class, in normalised order.
    declared: Vec<BTreeSet<String>>,
    max_phrase_len: usize,
}

/// A lexicon form found in a caption.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FormMatch {
    pub form: String,
    pub class: String,
}

/// Lower-cases and splits on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn normalize_form(form: &str) -> String {
    tokenize(form).join(" ")
}

/// Plural of the last word of `form`.
pub fn pluralize(form: &str) -> String {
    let (head, last) = match form.rfind(' ') {
        Some(i) => (&form[..=i], &form[i + 1..]),
        None => ("", form),
    };
    let plural = if let Some((_, p)) = IRREGULAR_PLURALS.iter().find(|(s, _)| *s == last) {
        p.to_string()
    } else if ["s", "x", "z", "ch", "sh"].iter().any(|suf| last.ends_with(suf)) {
        alloc::format!("{last}es")
    } else {
        alloc::format!("{last}s")
    };
    alloc::format!("{head}{plural}")
}

impl ClassLexicon {
    /// Parses `class: form, form, ...` records. `#` starts a comment; blank
    /// lines are skipped; `-` as the only form means the class name alone.
    pub fn parse(text: &str, plurals: PluralExpansion) -> Result<Self, LexiconError> {
        let mut classes: Vec<String> = Vec::new();
        let mut declared: Vec<BTreeSet<String>> = Vec::new();
        let mut owner: BTreeMap<String, usize> = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, rest) = line
                .split_once(':')
                .ok_or(LexiconError::Malformed { line: line_no })?;
            let class = normalize_form(name);
            if class.is_empty() {
                return Err(LexiconError::Malformed { line: line_no });
            }
            if classes.contains(&class) {
                return Err(LexiconError::DuplicateClass {
                    line: line_no,
                    class,
                });
            }
            let rest = rest.trim();
            if rest.is_empty() {
                return Err(LexiconError::EmptyWordSet {
                    line: line_no,
                    class,
                });
            }
            let mut forms: BTreeSet<String> = BTreeSet::new();
            forms.insert(class.clone());
            if rest != "-" {
                for f in rest.split(',') {
                    let f = normalize_form(f);
                    if f.is_empty() {
                        return Err(LexiconError::Malformed { line: line_no });
                    }
                    forms.insert(f);
                }
            }
            let ci = classes.len();
            for f in &forms {
                if let Some(&prev) = owner.get(f) {
                    return Err(LexiconError::DuplicateForm {
                        form: f.clone(),
                        first: classes[prev].clone(),
                        second: class,
                    });
                }
                owner.insert(f.clone(), ci);
            }
            classes.push(class);
            declared.push(forms);
        }

        let mut forms = owner;
        if plurals == PluralExpansion::On {
            // generated plurals never override a declared form
            for (ci, set) in declared.iter().enumerate() {
                for f in set {
                    forms.entry(pluralize(f)).or_insert(ci);
                }
            }
        }
        let max_phrase_len = forms
            .keys()
            .map(|f| f.split(' ').count())
            .max()
            .unwrap_or(1);
        Ok(Self {
            classes,
            forms,
            declared,
            max_phrase_len,
        })
    }

    /// The shipped VOC lexicon with plural expansion.
    pub fn voc() -> Self {
        Self::parse(VOC_LEXICON, PluralExpansion::On).expect("shipped lexicon is valid")
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class)
    }

    /// Forms written in the source for `class` (always includes the name).
    pub fn declared_forms(&self, class: &str) -> Option<&BTreeSet<String>> {
        self.class_index(class).map(|i| &self.declared[i])
    }

    /// Class owning a normalised surface form.
    pub fn class_of(&self, form: &str) -> Option<&str> {
        self.forms
            .get(&normalize_form(form))
            .map(|&i| self.classes[i].as_str())
    }

    pub fn num_forms(&self) -> usize {
        self.forms.len()
    }

    /// Lexicon forms present in `caption`, longest match first at each
    /// position.
    pub fn match_caption(&self, caption: &Caption) -> BTreeSet<FormMatch> {
        let tokens = tokenize(&caption.text);
        let mut found = BTreeSet::new();
        let mut i = 0;
        while i < tokens.len() {
            let longest = self.max_phrase_len.min(tokens.len() - i);
            let hit = (1..=longest).rev().find_map(|len| {
                let phrase = tokens[i..i + len].join(" ");
                self.forms.get(&phrase).map(|&ci| (len, phrase, ci))
            });
            match hit {
                Some((len, form, ci)) => {
                    found.insert(FormMatch {
                        form,
                        class: self.classes[ci].clone(),
                    });
                    i += len;
                }
                None => i += 1,
            }
        }
        found
    }

    /// Multi-hot label over `label_set`: a bit is set iff some form of that
    /// class occurs in the caption.
    pub fn derive_label(
        &self,
        caption: &Caption,
        label_set: &[String],
    ) -> Result<MultiLabel, LexiconError> {
        for c in label_set {
            if self.class_index(c).is_none() {
                return Err(LexiconError::UnknownClass(c.clone()));
            }
        }
        let matched: BTreeSet<String> = self
            .match_caption(caption)
            .into_iter()
            .map(|m| m.class)
            .collect();
        let bits = label_set.iter().map(|c| matched.contains(c)).collect();
        Ok(MultiLabel {
            class_order: label_set.to_vec(),
            bits,
        })
    }
}

/// Multi-hot image-level label over an ordered class list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiLabel {
    class_order: Vec<String>,
    bits: Vec<bool>,
}

impl MultiLabel {
    pub fn new(class_order: Vec<String>, bits: Vec<bool>) -> Option<Self> {
        (class_order.len() == bits.len()).then_some(Self { class_order, bits })
    }

    pub fn zeros(class_order: Vec<String>) -> Self {
        let bits = vec![false; class_order.len()];
        Self { class_order, bits }
    }

    pub fn class_order(&self) -> &[String] {
        &self.class_order
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, class: &str) -> Option<bool> {
        self.class_order
            .iter()
            .position(|c| c == class)
            .map(|i| self.bits[i])
    }

    pub fn set(&mut self, class: &str, value: bool) -> bool {
        match self.class_order.iter().position(|c| c == class) {
            Some(i) => {
                self.bits[i] = value;
                true
            }
            None => false,
        }
    }

    /// Names of the set classes, in class order.
    pub fn positives(&self) -> Vec<&str> {
        self.class_order
            .iter()
            .zip(&self.bits)
            .filter(|(_, b)| **b)
            .map(|(c, _)| c.as_str())
            .collect()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Bits as `0.0` / `1.0`.
    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

/// One-hot label at the queried class.
pub fn naive_label(queried_class: &str, label_set: &[String]) -> Result<MultiLabel, LexiconError> {
    let mut label = MultiLabel::zeros(label_set.to_vec());
    if !label.set(queried_class, true) {
        return Err(LexiconError::UnknownClass(queried_class.to_string()));
    }
    Ok(label)
}

/// True when the caption gave no evidence for the class the image was
/// queried with.
pub fn should_discard(label: &MultiLabel, queried_class: &str) -> Result<bool, LexiconError> {
    label
        .get(queried_class)
        .map(|b| !b)
        .ok_or_else(|| LexiconError::UnknownClass(queried_class.to_string()))
}
