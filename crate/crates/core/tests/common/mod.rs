#![allow(dead_code)]

use mmm_core::identify::{Bounds, Layout};
use mmm_core::model::{is_stable, MentalState, ModelSpec, ParameterSet, Structure};

pub fn case_study() -> Structure {
    Structure::compile(&ModelSpec::case_study()).unwrap()
}

/// Parameters from unit-interval coordinates over the default bounds, with
/// decision parameters in [-1, 1] taken from `decision`.
pub fn params_from_unit(structure: &Structure, unit: &[f64], decision: &[f64]) -> ParameterSet {
    let layout = Layout::new(structure, &Bounds::default()).unwrap();
    let mut p = ParameterSet::neutral(structure);
    layout.apply(&layout.from_unit(unit), &mut p);
    let mut it = decision.iter().cycle();
    for d in &mut p.decision {
        for w in &mut d.weights {
            *w = 2.0 * it.next().unwrap() - 1.0;
        }
        d.offset = 2.0 * it.next().unwrap() - 1.0;
    }
    p
}

/// Halves every non-fixed linkage weight until the set passes the stability check.
pub fn shrink_until_stable(structure: &Structure, mut p: ParameterSet) -> ParameterSet {
    let fixed: Vec<bool> = structure
        .spec()
        .linkages
        .iter()
        .map(|l| l.value.is_some())
        .collect();
    while !is_stable(structure, &p) {
        for (w, &f) in p.linkages.iter_mut().zip(&fixed) {
            if !f {
                w.negative *= 0.5;
                w.positive *= 0.5;
            }
        }
    }
    p
}

pub fn layout_len(structure: &Structure) -> usize {
    Layout::new(structure, &Bounds::default()).unwrap().len()
}

/// State with every component taken from `v` (values in [-1, 1]).
pub fn state_from(structure: &Structure, v: &[f64]) -> MentalState {
    let mut s = MentalState::zeros(structure.dims());
    let mut it = v.iter().cycle();
    for x in s
        .beliefs
        .iter_mut()
        .chain(&mut s.goals)
        .chain(&mut s.emotions)
        .chain(&mut s.bias)
        .chain(&mut s.perceived_knowledge)
    {
        *x = *it.next().unwrap();
    }
    s
}
