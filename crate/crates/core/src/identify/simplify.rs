use super::layout::{Bounds, Layout, Slot};
use crate::error::{MmmError, Result};
use crate::model::{ModelSpec, Structure, VarKind, WeightKind};

fn without_variables(spec: &ModelSpec, names: &[String]) -> ModelSpec {
    let gone = |n: &String| names.contains(n);
    let mut s = spec.clone();
    s.goals.retain(|g| !gone(g));
    s.emotions.retain(|e| !gone(e));
    s.linkages.retain(|l| !gone(&l.from) && !gone(&l.to));
    s.self_weights.retain(|w| !gone(&w.var));
    for i in &mut s.intentions {
        i.sources.retain(|v| !gone(v));
    }
    s.intentions.retain(|i| !i.sources.is_empty());
    s
}

/// Candidate simplifications given per-parameter identification flags
/// (aligned with the parameter layout of `spec`), mildest first:
/// 1. remove goals and emotions whose parameters are all unidentified and
///    that influence no other state variable;
/// 2. on top of that, give every two-piece linkage with an unidentified
///    weight a single constant weight.
///
/// An empty list means nothing qualifies.
pub fn simplify_model(spec: &ModelSpec, flags: &[bool]) -> Result<Vec<ModelSpec>> {
    let structure = Structure::compile(spec)?;
    let layout = Layout::new(&structure, &Bounds::default())?;
    if flags.len() != layout.len() {
        return Err(MmmError::Data(format!(
            "{} flags for {} parameters",
            flags.len(),
            layout.len()
        )));
    }
    let link_flags = |l: usize| -> Vec<bool> {
        layout
            .entries
            .iter()
            .zip(flags)
            .filter(|(e, _)| matches!(e.slot, Slot::Weight(k) | Slot::Negative(k) | Slot::Positive(k) if k == l))
            .map(|(_, &f)| f)
            .collect()
    };

    let mut dropped = Vec::new();
    for (kind, names) in [(VarKind::Goal, &spec.goals), (VarKind::Emotion, &spec.emotions)] {
        for (index, name) in names.iter().enumerate() {
            if spec.linkages.iter().any(|l| l.from == *name) {
                continue;
            }
            let mut own: Vec<bool> = spec
                .linkages
                .iter()
                .enumerate()
                .filter(|(_, l)| l.to == *name)
                .flat_map(|(k, _)| link_flags(k))
                .collect();
            if kind == VarKind::Emotion {
                own.extend(
                    layout
                        .entries
                        .iter()
                        .zip(flags)
                        .filter(|(e, _)| e.slot == Slot::Gain(index))
                        .map(|(_, &f)| f),
                );
            }
            if !own.is_empty() && own.iter().all(|&f| !f) {
                dropped.push(name.clone());
            }
        }
    }

    let mut candidates = Vec::new();
    let reduced = if dropped.is_empty() {
        spec.clone()
    } else {
        let s = without_variables(spec, &dropped);
        candidates.push(s.clone());
        s
    };

    let mut collapsed = reduced.clone();
    let mut any = false;
    for l in &mut collapsed.linkages {
        if l.kind != WeightKind::TwoPiece {
            continue;
        }
        let k = spec
            .linkages
            .iter()
            .position(|o| o.from == l.from && o.to == l.to)
            .expect("reduced spec keeps a subset of linkages");
        if link_flags(k).iter().any(|&f| !f) {
            l.kind = WeightKind::Constant;
            any = true;
        }
    }
    if any {
        candidates.push(collapsed);
    }
    Ok(candidates)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_study_flags(unidentified: &[&str]) -> (ModelSpec, Vec<bool>) {
        let spec = ModelSpec::case_study();
        let s = Structure::compile(&spec).unwrap();
        let layout = Layout::new(&s, &Bounds::default()).unwrap();
        let flags = layout
            .entries
            .iter()
            .map(|e| !unidentified.iter().any(|u| e.name.ends_with(&format!("->{u}]"))))
            .collect();
        (spec, flags)
    }

    #[test]
    fn all_identified_gives_nothing() {
        let (spec, flags) = case_study_flags(&[]);
        assert!(simplify_model(&spec, &flags).unwrap().is_empty());
    }

    #[test]
    fn unidentified_goals_are_removed() {
        let (spec, flags) = case_study_flags(&["g_help", "g_change_difficulty"]);
        let c = simplify_model(&spec, &flags).unwrap();
        assert_eq!(c.len(), 1);
        let mut got = c[0].clone();
        let want = ModelSpec::case_study_simplified();
        got.name = want.name.clone();
        assert_eq!(got, want);
    }

    #[test]
    fn unidentified_two_piece_weight_collapses() {
        let (spec, mut flags) = case_study_flags(&[]);
        let s = Structure::compile(&spec).unwrap();
        let layout = Layout::new(&s, &Bounds::default()).unwrap();
        let j = layout
            .names()
            .iter()
            .position(|n| n == "w-[e_frustration->g_skip]")
            .unwrap();
        flags[j] = false;
        let c = simplify_model(&spec, &flags).unwrap();
        assert_eq!(c.len(), 1);
        let changed: Vec<_> = c[0]
            .linkages
            .iter()
            .zip(&spec.linkages)
            .filter(|(a, b)| a != b)
            .collect();
        assert_eq!(changed.len(), 1);
        assert_eq!(changed[0].0.kind, WeightKind::Constant);
        assert_eq!((changed[0].0.from.as_str(), changed[0].0.to.as_str()), ("e_frustration", "g_skip"));
    }

    #[test]
    fn wrong_flag_count_is_an_error() {
        assert!(simplify_model(&ModelSpec::case_study(), &[true; 3]).is_err());
    }
}
