//! Executable form of the stability theory: labeling-state enumeration on
//! small 1-D instances, transition-probability estimation, stationary
//! distributions, and the two closed-form bounds.
//!
//! This module is binary-only: labeling states are over two classes.

mod bounds;
mod markov;

pub use bounds::{containment_bound, generalization_bound, verify_pii_bound, PiiReport};
pub use markov::{
    estimate_transitions, stability, stationary, StationaryDistribution, SubsampleScheme,
    TransitionEstimate, TransitionEstimatorConfig, TransitionMatrix,
};

use std::collections::HashMap;

use crate::adapt::Labeling;
use crate::data::Dataset;
use crate::{Error, Result};

/// An ordered set of distinct labeling states with reverse lookup.
#[derive(Debug, Clone)]
pub struct LabelingStateSpace {
    states: Vec<Labeling>,
    index: HashMap<Labeling, usize>,
}

impl LabelingStateSpace {
    pub fn from_states(states: Vec<Labeling>) -> Result<Self> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, state) in states.iter().enumerate() {
            if index.insert(state.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate state at position {i}"
                )));
            }
        }
        Ok(LabelingStateSpace { states, index })
    }

    pub fn states(&self) -> &[Labeling] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, labeling: &Labeling) -> Option<usize> {
        self.index.get(labeling).copied()
    }
}

/// Enumerate the binary labelings of a 1-feature dataset that a thresholded
/// linear rule can produce.
///
/// With `balanced_only`, the enumeration keeps only labelings with at least
/// one example per class that are monotone in the ascending orientation
/// (class 1 toward larger coordinates) — the labelings reachable when the
/// source hypothesis points along +x. States are ordered by ascending
/// class-1 count. Without it, both orientations and the all-one-class
/// labelings are included.
pub fn enumerate_1d_labelings(target: &Dataset, balanced_only: bool) -> Result<LabelingStateSpace> {
    enumerate_1d_labelings_oriented(target, balanced_only, true)
}

/// As [`enumerate_1d_labelings`], with an explicit orientation for the
/// balanced restriction (`ascending = false` puts class 1 toward smaller
/// coordinates).
pub fn enumerate_1d_labelings_oriented(
    target: &Dataset,
    balanced_only: bool,
    ascending: bool,
) -> Result<LabelingStateSpace> {
    if target.n_features() != 1 {
        return Err(Error::InvalidInput(format!(
            "1-D enumeration needs exactly 1 feature, got {}",
            target.n_features()
        )));
    }
    let n = target.n_examples();
    if n == 0 {
        return Err(Error::InvalidInput("empty target".into()));
    }
    let xs: Vec<f64> = (0..n).map(|i| target.dense_row(i)[0]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite coordinates"));
    for w in order.windows(2) {
        if xs[w[0]] == xs[w[1]] {
            return Err(Error::InvalidInput(format!(
                "duplicate coordinate {}: threshold labelings are ill-defined",
                xs[w[0]]
            )));
        }
    }

    // A labeling with `ones` class-1 examples at the large (ascending) or
    // small (descending) end of the axis.
    let make = |ones: usize, asc: bool| -> Labeling {
        let mut assignments = vec![0usize; n];
        let ranked: Box<dyn Iterator<Item = &usize>> = if asc {
            Box::new(order.iter().rev())
        } else {
            Box::new(order.iter())
        };
        for &i in ranked.take(ones) {
            assignments[i] = 1;
        }
        Labeling::new(assignments, 2).expect("assignments are binary")
    };

    let states = if balanced_only {
        (1..n).map(|ones| make(ones, ascending)).collect()
    } else {
        let mut states = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for asc in [true, false] {
            for ones in 0..=n {
                let state = make(ones, asc);
                if seen.insert(state.clone()) {
                    states.push(state);
                }
            }
        }
        states
    };
    LabelingStateSpace::from_states(states)
}
