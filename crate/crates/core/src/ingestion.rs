//! File formats and the join that turns them into evaluation-ready pairs.
//!
//! * annotation CSV: `image_id,subject_id,gender,age,ethnicity,glasses,beard,moustache`
//! * pairs file (LFW layout): `<folds>\t<n>` then per fold `n` genuine lines
//!   `name\ti\tj` followed by `n` impostor lines `name1\ti\tname2\tj`
//! * score CSV: `left_image,right_image,score`, one file per matcher
//! * COTS CSV: `image_id,detected,gender,age_years,ethnicity,glasses,beard,moustache`
//!   with optional `conf_<trait>` columns
//!
//! Columns of the CSV formats are located through the header row, so their
//! order may differ from the canonical one.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profiles::{
    format_trait_label, parse_trait_label, AgeCuts, ProfileError, ProfileSource, SoftProfile,
    TraitKind, TraitValue,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Schema {
        origin: String,
        line: u64,
        message: String,
    },
    #[error("{origin}: duplicate image id {id}")]
    DuplicateId { origin: String, id: String },
    #[error("{origin}: {message}")]
    Format { origin: String, message: String },
    #[error("join failed, unresolved ids: {}", .ids.join(", "))]
    Join { ids: Vec<String> },
    #[error(transparent)]
    Write(#[from] io::Error),
}

impl IngestError {
    fn schema(origin: &str, line: u64, message: impl Into<String>) -> Self {
        IngestError::Schema {
            origin: origin.to_string(),
            line,
            message: message.into(),
        }
    }
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `name_%04d`
pub fn image_id(subject: &str, index: u32) -> String {
    format!("{subject}_{index:04}")
}

/// Splits `George_W_Bush_0001` into `("George_W_Bush", 1)`.
pub fn split_image_id(id: &str) -> Option<(&str, u32)> {
    let (subject, index) = id.rsplit_once('_')?;
    if subject.is_empty() || index.is_empty() || !index.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((subject, index.parse().ok()?))
}

pub fn subject_of(id: &str) -> Option<&str> {
    split_image_id(id).map(|(s, _)| s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub image_id: String,
    pub subject_id: String,
    pub profile: SoftProfile,
}

const ANNOTATION_HEADER: [&str; 8] = [
    "image_id",
    "subject_id",
    "gender",
    "age",
    "ethnicity",
    "glasses",
    "beard",
    "moustache",
];

fn normalize_header(h: &str) -> String {
    let h = h.trim().trim_start_matches('\u{feff}').to_ascii_lowercase();
    match h.as_str() {
        "mustache" => "moustache".into(),
        "conf_mustache" => "conf_moustache".into(),
        _ => h,
    }
}

struct Columns(HashMap<String, usize>);

impl Columns {
    fn from_header(header: &csv::StringRecord) -> Self {
        Columns(
            header
                .iter()
                .enumerate()
                .map(|(i, h)| (normalize_header(h), i))
                .collect(),
        )
    }

    fn require(&self, name: &str, origin: &str) -> Result<usize, IngestError> {
        self.0
            .get(name)
            .copied()
            .ok_or_else(|| IngestError::schema(origin, 1, format!("missing column {name:?}")))
    }

    fn optional(&self, name: &str) -> Option<usize> {
        self.0.get(name).copied()
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader)
}

fn csv_error(origin: &str, err: csv::Error) -> IngestError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    IngestError::schema(origin, line, err.to_string())
}

fn profile_error(origin: &str, line: u64, err: ProfileError) -> IngestError {
    IngestError::schema(origin, line, err.to_string())
}

pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>, IngestError> {
    read_annotations(open(path)?, &path.display().to_string())
}

/// Parses an annotation CSV; records come back in file order.
pub fn read_annotations<R: Read>(reader: R, origin: &str) -> Result<Vec<AnnotationRecord>, IngestError> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    let cols = Columns::from_header(&header);
    let idx: Vec<usize> = ANNOTATION_HEADER
        .iter()
        .map(|name| cols.require(name, origin))
        .collect::<Result<_, _>>()?;

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(origin, e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let image = row.get(idx[0]).unwrap_or_default().to_string();
        let subject = row.get(idx[1]).unwrap_or_default().to_string();
        match subject_of(&image) {
            Some(prefix) if prefix == subject => {}
            _ => {
                return Err(IngestError::schema(
                    origin,
                    line,
                    format!("image id {image:?} does not belong to subject {subject:?}"),
                ))
            }
        }
        let mut profile = SoftProfile::missing(ProfileSource::Manual);
        for (kind, &col) in TraitKind::ALL.iter().zip(&idx[2..]) {
            let value = parse_trait_label(*kind, row.get(col).unwrap_or_default())
                .map_err(|e| profile_error(origin, line, e))?;
            profile.set(*kind, value).map_err(|e| profile_error(origin, line, e))?;
        }
        if !seen.insert(image.clone()) {
            return Err(IngestError::DuplicateId {
                origin: origin.to_string(),
                id: image,
            });
        }
        out.push(AnnotationRecord {
            image_id: image,
            subject_id: subject,
            profile,
        });
    }
    Ok(out)
}

/// Writes the canonical annotation CSV.
pub fn write_annotations<W: Write>(records: &[AnnotationRecord], writer: W) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let map = |e: csv::Error| IngestError::Write(e.into());
    wtr.write_record(ANNOTATION_HEADER).map_err(map)?;
    for rec in records {
        let mut row = vec![rec.image_id.clone(), rec.subject_id.clone()];
        row.extend(
            TraitKind::ALL
                .iter()
                .map(|&k| format_trait_label(k, rec.profile.get(k))),
        );
        wtr.write_record(&row).map_err(map)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairLabel {
    Genuine,
    Impostor,
}

impl PairLabel {
    pub fn is_genuine(self) -> bool {
        self == PairLabel::Genuine
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub fold: usize,
    pub left_image: String,
    pub right_image: String,
    pub label: PairLabel,
}

/// Parsed pairs file plus its declared shape.
#[derive(Debug, Clone, PartialEq)]
pub struct PairsFile {
    pub folds: usize,
    pub per_class: usize,
    pub pairs: Vec<PairRecord>,
}

pub fn load_pairs(path: &Path) -> Result<PairsFile, IngestError> {
    read_pairs(BufReader::new(open(path)?), &path.display().to_string())
}

fn parse_index(field: &str, origin: &str, line: u64) -> Result<u32, IngestError> {
    field
        .parse()
        .map_err(|_| IngestError::schema(origin, line, format!("bad image index {field:?}")))
}

/// Reads the LFW pairs layout. A single-number header (`<n>`) is read as one
/// fold, which is the shape of the development-view files.
pub fn read_pairs<R: BufRead>(reader: R, origin: &str) -> Result<PairsFile, IngestError> {
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if !trimmed.trim().is_empty() {
            lines.push((i as u64 + 1, trimmed.to_string()));
        }
    }
    let Some((header_line, header)) = lines.first().cloned() else {
        return Err(IngestError::Format {
            origin: origin.to_string(),
            message: "empty pairs file".into(),
        });
    };
    let nums = header
        .split_whitespace()
        .map(|f| f.parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| IngestError::schema(origin, header_line, format!("bad header {header:?}")))?;
    let (folds, per_class) = match nums.as_slice() {
        [n] => (1, *n),
        [f, n] => (*f, *n),
        _ => return Err(IngestError::schema(origin, header_line, format!("bad header {header:?}"))),
    };
    if folds == 0 || per_class == 0 {
        return Err(IngestError::schema(origin, header_line, "header declares no pairs"));
    }
    let body = &lines[1..];
    let expected = folds * 2 * per_class;
    if body.len() != expected {
        return Err(IngestError::Format {
            origin: origin.to_string(),
            message: format!(
                "header declares {folds} folds x {per_class} pairs per class ({expected} lines), found {}",
                body.len()
            ),
        });
    }

    let mut pairs = Vec::with_capacity(expected);
    for (fold, block) in body.chunks(2 * per_class).enumerate() {
        let mut genuine = 0;
        for (line_no, text) in block {
            let fields: Vec<&str> = if text.contains('\t') {
                text.split('\t').map(str::trim).collect()
            } else {
                text.split_whitespace().collect()
            };
            let record = match fields.as_slice() {
                [name, i, j] => {
                    genuine += 1;
                    PairRecord {
                        fold,
                        left_image: image_id(name, parse_index(i, origin, *line_no)?),
                        right_image: image_id(name, parse_index(j, origin, *line_no)?),
                        label: PairLabel::Genuine,
                    }
                }
                [a, i, b, j] => {
                    if a == b {
                        return Err(IngestError::schema(
                            origin,
                            *line_no,
                            format!("impostor line compares {a} with itself"),
                        ));
                    }
                    PairRecord {
                        fold,
                        left_image: image_id(a, parse_index(i, origin, *line_no)?),
                        right_image: image_id(b, parse_index(j, origin, *line_no)?),
                        label: PairLabel::Impostor,
                    }
                }
                _ => {
                    return Err(IngestError::schema(
                        origin,
                        *line_no,
                        format!("expected 3 or 4 fields, found {}", fields.len()),
                    ))
                }
            };
            pairs.push(record);
        }
        if genuine != per_class {
            return Err(IngestError::Format {
                origin: origin.to_string(),
                message: format!(
                    "fold {fold} has {genuine} genuine and {} impostor lines, expected {per_class} each",
                    block.len() - genuine
                ),
            });
        }
    }
    Ok(PairsFile {
        folds,
        per_class,
        pairs,
    })
}

/// Writes pairs in LFW layout; every fold must hold the same number of
/// genuine and impostor pairs.
pub fn write_pairs<W: Write>(pairs: &[PairRecord], mut writer: W) -> Result<(), IngestError> {
    let fmt_err = |message: String| IngestError::Format {
        origin: "pairs writer".into(),
        message,
    };
    let folds = pairs.iter().map(|p| p.fold + 1).max().unwrap_or(0);
    if folds == 0 {
        return Err(fmt_err("no pairs to write".into()));
    }
    let mut per_fold: Vec<(Vec<&PairRecord>, Vec<&PairRecord>)> = vec![(vec![], vec![]); folds];
    for p in pairs {
        let slot = &mut per_fold[p.fold];
        match p.label {
            PairLabel::Genuine => slot.0.push(p),
            PairLabel::Impostor => slot.1.push(p),
        }
    }
    let per_class = per_fold[0].0.len();
    for (fold, (g, i)) in per_fold.iter().enumerate() {
        if g.len() != per_class || i.len() != per_class {
            return Err(fmt_err(format!(
                "fold {fold} has {}+{} pairs, expected {per_class}+{per_class}",
                g.len(),
                i.len()
            )));
        }
    }
    fn split(id: &str) -> Result<(&str, u32), IngestError> {
        split_image_id(id).ok_or_else(|| IngestError::Format {
            origin: "pairs writer".into(),
            message: format!("bad image id {id:?}"),
        })
    }
    writeln!(writer, "{folds}\t{per_class}")?;
    for (genuine, impostor) in &per_fold {
        for p in genuine {
            let (s, i) = split(&p.left_image)?;
            let (s2, j) = split(&p.right_image)?;
            if s != s2 {
                return Err(fmt_err(format!("genuine pair spans {s} and {s2}")));
            }
            writeln!(writer, "{s}\t{i}\t{j}")?;
        }
        for p in impostor {
            let (a, i) = split(&p.left_image)?;
            let (b, j) = split(&p.right_image)?;
            writeln!(writer, "{a}\t{i}\t{b}\t{j}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub left_image: String,
    pub right_image: String,
    pub score: f64,
    pub matcher_id: String,
}

/// Scores of one matcher, indexed by image pair (in either order).
#[derive(Debug, Clone, Default)]
pub struct ScoreTable {
    pub matcher_id: String,
    records: Vec<ScoreRecord>,
    index: HashMap<(String, String), usize>,
}

impl ScoreTable {
    pub fn new(matcher_id: impl Into<String>) -> Self {
        ScoreTable {
            matcher_id: matcher_id.into(),
            ..Default::default()
        }
    }

    pub fn insert(&mut self, left: &str, right: &str, score: f64) -> Result<(), String> {
        if !score.is_finite() {
            return Err(format!("non-finite score for ({left}, {right})"));
        }
        let key = (left.to_string(), right.to_string());
        if self.index.contains_key(&key) {
            return Err(format!("duplicate score for ({left}, {right})"));
        }
        self.index.insert(key, self.records.len());
        self.records.push(ScoreRecord {
            left_image: left.to_string(),
            right_image: right.to_string(),
            score,
            matcher_id: self.matcher_id.clone(),
        });
        Ok(())
    }

    pub fn get(&self, left: &str, right: &str) -> Option<f64> {
        let lookup = |a: &str, b: &str| {
            self.index
                .get(&(a.to_string(), b.to_string()))
                .map(|&i| self.records[i].score)
        };
        lookup(left, right).or_else(|| lookup(right, left))
    }

    pub fn records(&self) -> &[ScoreRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Loads a score CSV. The matcher id defaults to the file stem; `invert`
/// negates distance-like scores so that higher means more similar.
pub fn load_scores(path: &Path, matcher_id: Option<&str>, invert: bool) -> Result<ScoreTable, IngestError> {
    let id = matcher_id.map(str::to_string).unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "face".into())
    });
    read_scores(open(path)?, &path.display().to_string(), &id, invert)
}

pub fn read_scores<R: Read>(
    reader: R,
    origin: &str,
    matcher_id: &str,
    invert: bool,
) -> Result<ScoreTable, IngestError> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    let cols = Columns::from_header(&header);
    let (l, r, s) = (
        cols.require("left_image", origin)?,
        cols.require("right_image", origin)?,
        cols.require("score", origin)?,
    );
    let mut table = ScoreTable::new(matcher_id);
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(origin, e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let text = row.get(s).unwrap_or_default();
        let score: f64 = text
            .parse()
            .map_err(|_| IngestError::schema(origin, line, format!("bad score {text:?}")))?;
        let score = if invert { -score } else { score };
        table
            .insert(row.get(l).unwrap_or_default(), row.get(r).unwrap_or_default(), score)
            .map_err(|m| IngestError::schema(origin, line, m))?;
    }
    Ok(table)
}

pub fn write_scores<W: Write>(records: &[ScoreRecord], writer: W) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let map = |e: csv::Error| IngestError::Write(e.into());
    wtr.write_record(["left_image", "right_image", "score"]).map_err(map)?;
    for r in records {
        wtr.write_record([&r.left_image, &r.right_image, &r.score.to_string()])
            .map_err(map)?;
    }
    wtr.flush()?;
    Ok(())
}

/// One image's COTS output. Age is usually in years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CotsRecord {
    pub image_id: String,
    pub detected: bool,
    pub profile: SoftProfile,
    pub confidence: [Option<f64>; 6],
}

pub fn load_cots(path: &Path, source: ProfileSource) -> Result<Vec<CotsRecord>, IngestError> {
    read_cots(open(path)?, &path.display().to_string(), source)
}

fn parse_bool(text: &str) -> Option<bool> {
    match text.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Some(true),
        "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

pub fn read_cots<R: Read>(reader: R, origin: &str, source: ProfileSource) -> Result<Vec<CotsRecord>, IngestError> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    let cols = Columns::from_header(&header);
    let id_col = cols.require("image_id", origin)?;
    let det_col = cols.require("detected", origin)?;
    let trait_cols: Vec<Option<usize>> = TraitKind::ALL
        .iter()
        .map(|k| match k {
            TraitKind::Age => cols.optional("age_years").or_else(|| cols.optional("age")),
            _ => cols.optional(k.name()),
        })
        .collect();
    let conf_cols: Vec<Option<usize>> = TraitKind::ALL
        .iter()
        .map(|k| cols.optional(&format!("conf_{}", k.name())))
        .collect();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(origin, e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let image = row.get(id_col).unwrap_or_default().to_string();
        if subject_of(&image).is_none() {
            return Err(IngestError::schema(origin, line, format!("bad image id {image:?}")));
        }
        let det_text = row.get(det_col).unwrap_or_default();
        let detected = parse_bool(det_text)
            .ok_or_else(|| IngestError::schema(origin, line, format!("bad detected flag {det_text:?}")))?;
        let mut profile = SoftProfile::missing(source);
        let mut confidence = [None; 6];
        for (i, kind) in TraitKind::ALL.into_iter().enumerate() {
            if let Some(col) = trait_cols[i] {
                let text = row.get(col).unwrap_or_default();
                // COTS ages are plain numbers of years.
                let value = match (kind, text.parse::<f64>()) {
                    (TraitKind::Age, Ok(years)) => TraitValue::Years(years),
                    _ => parse_trait_label(kind, text).map_err(|e| profile_error(origin, line, e))?,
                };
                profile.set(kind, value).map_err(|e| profile_error(origin, line, e))?;
            }
            if let Some(col) = conf_cols[i] {
                let text = row.get(col).unwrap_or_default();
                if !text.is_empty() {
                    let c: f64 = text
                        .parse()
                        .ok()
                        .filter(|c| (0.0..=1.0).contains(c))
                        .ok_or_else(|| {
                            IngestError::schema(origin, line, format!("bad confidence {text:?}"))
                        })?;
                    confidence[i] = Some(c);
                }
            }
        }
        if !detected && !profile.is_all_missing() {
            return Err(IngestError::schema(
                origin,
                line,
                format!("{image} is not detected but carries estimates"),
            ));
        }
        if !seen.insert(image.clone()) {
            return Err(IngestError::DuplicateId {
                origin: origin.to_string(),
                id: image,
            });
        }
        out.push(CotsRecord {
            image_id: image,
            detected,
            profile,
            confidence,
        });
    }
    Ok(out)
}

/// Writes the COTS CSV (age as plain years, confidence columns included).
pub fn write_cots<W: Write>(records: &[CotsRecord], writer: W) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let map = |e: csv::Error| IngestError::Write(e.into());
    let mut header = vec!["image_id".to_string(), "detected".to_string()];
    header.extend(TraitKind::ALL.iter().map(|k| match k {
        TraitKind::Age => "age_years".to_string(),
        _ => k.name().to_string(),
    }));
    header.extend(TraitKind::ALL.iter().map(|k| format!("conf_{}", k.name())));
    wtr.write_record(&header).map_err(map)?;
    for r in records {
        let mut row = vec![r.image_id.clone(), r.detected.to_string()];
        row.extend(TraitKind::ALL.iter().map(|&k| match r.profile.get(k) {
            TraitValue::Years(y) => y.to_string(),
            v => format_trait_label(k, v),
        }));
        row.extend(r.confidence.iter().map(|c| c.map(|c| c.to_string()).unwrap_or_default()));
        wtr.write_record(&row).map_err(map)?;
    }
    wtr.flush()?;
    Ok(())
}

/// How the age trait is represented when profiles are indexed for matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AgeMode {
    /// Years are thresholded into the five categories.
    #[default]
    Categorical,
    /// Years are kept; categorical ages are left as they are.
    Years,
}

pub type ProfileIndex = HashMap<String, SoftProfile>;

fn apply_age_mode(profile: SoftProfile, mode: AgeMode, cuts: &AgeCuts) -> Result<SoftProfile, ProfileError> {
    match mode {
        AgeMode::Categorical => profile.with_categorical_age(cuts),
        AgeMode::Years => Ok(profile),
    }
}

pub fn index_annotations(
    records: &[AnnotationRecord],
    mode: AgeMode,
    cuts: &AgeCuts,
) -> Result<ProfileIndex, ProfileError> {
    records
        .iter()
        .map(|r| Ok((r.image_id.clone(), apply_age_mode(r.profile, mode, cuts)?)))
        .collect()
}

/// Undetected faces are indexed with all-missing profiles.
pub fn index_cots(records: &[CotsRecord], mode: AgeMode, cuts: &AgeCuts) -> Result<ProfileIndex, ProfileError> {
    records
        .iter()
        .map(|r| {
            let profile = if r.detected {
                apply_age_mode(r.profile, mode, cuts)?
            } else {
                SoftProfile::missing(r.profile.source)
            };
            Ok((r.image_id.clone(), profile))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GapPolicy {
    #[default]
    Drop,
    Strict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JoinedPair {
    pub pair: PairRecord,
    pub left_profile: SoftProfile,
    pub right_profile: SoftProfile,
    pub face_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum DropReason {
    MissingProfile { image: String },
    MissingScore { left: String, right: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedPair {
    pub index: usize,
    #[serde(flatten)]
    pub reason: DropReason,
}

#[derive(Debug, Clone, Default)]
pub struct JoinOutcome {
    pub joined: Vec<JoinedPair>,
    pub dropped: Vec<DroppedPair>,
}

/// Attaches profiles and (optionally) face scores to every pair.
///
/// Under [`GapPolicy::Drop`] a pair whose image has no profile or whose face
/// score is absent is dropped and reported; under [`GapPolicy::Strict`] any
/// gap fails the join with the offending ids.
pub fn join(
    pairs: &[PairRecord],
    profiles: &ProfileIndex,
    scores: Option<&ScoreTable>,
    policy: GapPolicy,
) -> Result<JoinOutcome, IngestError> {
    let mut out = JoinOutcome::default();
    for (index, pair) in pairs.iter().enumerate() {
        let left = profiles.get(&pair.left_image);
        let right = profiles.get(&pair.right_image);
        let reason = match (left, right) {
            (None, _) => Some(DropReason::MissingProfile {
                image: pair.left_image.clone(),
            }),
            (_, None) => Some(DropReason::MissingProfile {
                image: pair.right_image.clone(),
            }),
            _ => None,
        };
        let face_score = scores.and_then(|t| t.get(&pair.left_image, &pair.right_image));
        let reason = reason.or_else(|| {
            (scores.is_some() && face_score.is_none()).then(|| DropReason::MissingScore {
                left: pair.left_image.clone(),
                right: pair.right_image.clone(),
            })
        });
        match (reason, left, right) {
            (None, Some(l), Some(r)) => out.joined.push(JoinedPair {
                pair: pair.clone(),
                left_profile: *l,
                right_profile: *r,
                face_score,
            }),
            (Some(reason), ..) => out.dropped.push(DroppedPair { index, reason }),
            (None, ..) => unreachable!("missing profile always yields a drop reason"),
        }
    }
    if policy == GapPolicy::Strict && !out.dropped.is_empty() {
        let ids = out
            .dropped
            .iter()
            .map(|d| match &d.reason {
                DropReason::MissingProfile { image } => image.clone(),
                DropReason::MissingScore { left, right } => format!("{left}/{right}"),
            })
            .collect();
        return Err(IngestError::Join { ids });
    }
    Ok(out)
}
