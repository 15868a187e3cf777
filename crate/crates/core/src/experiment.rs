//! End-to-end evaluations over joined pairs: soft-only, face-only and fused.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluation::{cross_validate, eer, CrossValidation, EvalError, FoldLabel, ScoreSet};
use crate::fusion::{fit_on_training_folds, fuse, FusionConfig, FusionError, FusionNorms, NormMethod};
use crate::ingestion::JoinedPair;
use crate::profiles::{profile_dissimilarity, soft_score, MatchConfig, ProfileError, TraitSet};
use crate::selection::{exhaustive_best, sffs, ExhaustiveResult, SelectionError, SelectionTrace, Subset};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error("pair {0} has no face score")]
    MissingFace(usize),
}

/// Which score an evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "system", content = "traits")]
pub enum System {
    Soft(TraitSet),
    Face,
    Fused(TraitSet),
}

impl System {
    pub fn label(&self, face_id: &str) -> String {
        match self {
            System::Soft(t) => format!("soft:{t}"),
            System::Face => format!("face:{face_id}"),
            System::Fused(t) => format!("fused:{face_id}:{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct EvalOptions {
    pub matching: MatchConfig,
    pub fusion: FusionConfig,
    pub norm: NormMethod,
    pub train_threshold: bool,
}

pub fn fold_labels(joined: &[JoinedPair]) -> Vec<FoldLabel> {
    joined
        .iter()
        .map(|j| FoldLabel {
            fold: j.pair.fold,
            genuine: j.pair.label.is_genuine(),
        })
        .collect()
}

/// Soft matcher score per pair; `None` where no trait carries evidence.
pub fn soft_scores(joined: &[JoinedPair], traits: TraitSet, cfg: &MatchConfig) -> Result<Vec<Option<f64>>, ProfileError> {
    cfg.validate()?;
    joined
        .iter()
        .map(|j| match profile_dissimilarity(&j.left_profile, &j.right_profile, traits, cfg) {
            Ok(d) => Ok(Some(soft_score(d, cfg.score_map))),
            Err(ProfileError::NoEvidence(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

pub fn face_scores(joined: &[JoinedPair]) -> Vec<Option<f64>> {
    joined.iter().map(|j| j.face_score).collect()
}

fn fold_ids(joined: &[JoinedPair]) -> Vec<usize> {
    joined.iter().map(|j| j.pair.fold).collect()
}

fn distinct_folds(joined: &[JoinedPair]) -> Vec<usize> {
    let mut f = fold_ids(joined);
    f.sort_unstable();
    f.dedup();
    f
}

fn fit_norms(
    face: &[Option<f64>],
    soft: &[Option<f64>],
    folds: &[usize],
    held_out: Option<usize>,
    method: NormMethod,
) -> Result<FusionNorms, FusionError> {
    Ok(FusionNorms {
        face: fit_on_training_folds(face, folds, held_out, method)?,
        soft: fit_on_training_folds(soft, folds, held_out, method)?,
    })
}

/// Scores under the held-out-fold protocol. Fused scores are normalized with
/// parameters fit on the folds other than the one held out.
pub fn evaluate(joined: &[JoinedPair], system: System, opts: &EvalOptions) -> Result<CrossValidation, ExperimentError> {
    let labels = fold_labels(joined);
    match system {
        System::Face => {
            let face = face_scores(joined);
            Ok(cross_validate(&labels, opts.train_threshold, |_, i| face[i])?)
        }
        System::Soft(traits) => {
            let soft = soft_scores(joined, traits, &opts.matching)?;
            Ok(cross_validate(&labels, opts.train_threshold, |_, i| soft[i])?)
        }
        System::Fused(traits) => {
            let face = face_scores(joined);
            let soft = soft_scores(joined, traits, &opts.matching)?;
            let folds = fold_ids(joined);
            let max_fold = folds.iter().copied().max().unwrap_or(0);
            let mut norms = vec![None; max_fold + 1];
            for f in distinct_folds(joined) {
                norms[f] = Some(fit_norms(&face, &soft, &folds, Some(f), opts.norm)?);
            }
            Ok(cross_validate(&labels, opts.train_threshold, |held_out, i| {
                let n = norms[held_out].as_ref().expect("norms fit for every fold");
                fuse(face[i], soft[i], n, &opts.fusion)
            })?)
        }
    }
}

/// Fused score of every pair, each normalized with the parameters of the
/// round in which its own fold is held out.
pub fn fused_scores_by_fold(
    joined: &[JoinedPair],
    traits: TraitSet,
    opts: &EvalOptions,
) -> Result<Vec<Option<f64>>, ExperimentError> {
    let face = face_scores(joined);
    let soft = soft_scores(joined, traits, &opts.matching)?;
    let folds = fold_ids(joined);
    let mut norms = std::collections::BTreeMap::new();
    for f in distinct_folds(joined) {
        norms.insert(f, fit_norms(&face, &soft, &folds, Some(f), opts.norm)?);
    }
    Ok((0..joined.len())
        .map(|i| fuse(face[i], soft[i], &norms[&folds[i]], &opts.fusion))
        .collect())
}

/// EER over all pairs pooled together (a development-set criterion).
/// Fusion normalizers are fit on the same pairs.
pub fn pooled_eer(joined: &[JoinedPair], system: System, opts: &EvalOptions) -> Result<f64, ExperimentError> {
    let scores: Vec<Option<f64>> = match system {
        System::Face => face_scores(joined),
        System::Soft(traits) => soft_scores(joined, traits, &opts.matching)?,
        System::Fused(traits) => {
            let face = face_scores(joined);
            let soft = soft_scores(joined, traits, &opts.matching)?;
            let norms = fit_norms(&face, &soft, &fold_ids(joined), None, opts.norm)?;
            (0..joined.len())
                .map(|i| fuse(face[i], soft[i], &norms, &opts.fusion))
                .collect()
        }
    };
    let mut set = ScoreSet::default();
    for (j, s) in joined.iter().zip(scores) {
        let Some(s) = s else { continue };
        if j.pair.label.is_genuine() {
            set.genuine.push(s);
        } else {
            set.impostor.push(s);
        }
    }
    Ok(eer(&set)?)
}

fn trait_criterion<'a>(
    dev: &'a [JoinedPair],
    fused: bool,
    opts: &'a EvalOptions,
) -> impl FnMut(Subset) -> Result<f64, ExperimentError> + 'a {
    move |subset: Subset| {
        let traits = subset
            .to_trait_set()
            .expect("candidates are trait indices, subsets nonempty");
        let system = if fused { System::Fused(traits) } else { System::Soft(traits) };
        pooled_eer(dev, system, opts)
    }
}

/// SFFS over traits with the pooled development EER as criterion.
pub fn select_traits(
    dev: &[JoinedPair],
    candidates: TraitSet,
    max_n: usize,
    fused: bool,
    opts: &EvalOptions,
) -> Result<SelectionTrace, ExperimentError> {
    Ok(sffs(candidates.into(), max_n, trait_criterion(dev, fused, opts))?)
}

pub fn exhaustive_traits(
    dev: &[JoinedPair],
    candidates: TraitSet,
    fused: bool,
    opts: &EvalOptions,
) -> Result<ExhaustiveResult, ExperimentError> {
    Ok(exhaustive_best(candidates.into(), trait_criterion(dev, fused, opts))?)
}
