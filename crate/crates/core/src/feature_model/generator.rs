//! Seeded random well-formed models, used by the analysis oracles and the
//! property suites. Generation is deterministic for a fixed seed.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CrossTreeConstraint, Feature, FeatureModel};

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    /// Upper bound on the total feature count (including the root).
    pub max_features: usize,
    /// Upper bound on direct children per feature.
    pub max_children: usize,
    /// Upper bound on cross-tree constraints.
    pub max_constraints: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_features: 12,
            max_children: 4,
            max_constraints: 3,
        }
    }
}

/// Builds a random well-formed model. Names are globally unique, so path
/// uniqueness and sibling distinctness hold by construction; group arities
/// are respected by falling back to leaves when the budget runs short.
pub fn random_model(seed: u64, config: &GeneratorConfig) -> FeatureModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = rng.random_range(1..=config.max_features.max(1));
    let mut counter = 0usize;
    let mut budget = total - 1; // root consumes one
    let root = grow(&mut rng, &mut counter, &mut budget, config, true);

    let model = FeatureModel::new(root, vec![]).expect("generated tree is well-formed");
    let paths: Vec<String> = model.paths().iter().map(|p| p.to_string()).collect();
    let mut constraints = Vec::new();
    if paths.len() >= 2 && config.max_constraints > 0 {
        let n = rng.random_range(0..=config.max_constraints);
        for _ in 0..n {
            let source = paths.choose(&mut rng).unwrap().clone();
            let target = paths.choose(&mut rng).unwrap().clone();
            if source == target {
                continue;
            }
            let c = if rng.random_bool(0.5) {
                CrossTreeConstraint::requires(source, target)
            } else {
                CrossTreeConstraint::excludes(source, target)
            };
            constraints.push(c);
        }
    }
    FeatureModel::new(model.root().clone(), constraints).expect("constraints resolve")
}

fn grow(
    rng: &mut ChaCha8Rng,
    counter: &mut usize,
    budget: &mut usize,
    config: &GeneratorConfig,
    is_root: bool,
) -> Feature {
    let name = format!("f{}", *counter);
    *counter += 1;
    if *budget == 0 {
        return Feature::leaf(name);
    }
    // Group kinds need enough budget for their arity.
    let kind = if *budget >= 2 {
        rng.random_range(0..4)
    } else {
        rng.random_range(0..2) // leaf or single-child and
    };
    match kind {
        0 if !is_root => Feature::leaf(name),
        0 => {
            // keep roots interesting: a bare-leaf root is still legal but rare
            if rng.random_bool(0.2) {
                Feature::leaf(name)
            } else {
                let child = take_child(rng, counter, budget, config, false);
                Feature::and(name, vec![child])
            }
        }
        1 => {
            let max = config.max_children.min(*budget).max(1);
            let n = rng.random_range(1..=max);
            let mut children = Vec::new();
            for _ in 0..n {
                if *budget == 0 {
                    break;
                }
                let mut child = take_child(rng, counter, budget, config, false);
                if rng.random_bool(0.4) {
                    child = child.optional();
                }
                children.push(child);
            }
            if children.is_empty() {
                Feature::leaf(name)
            } else {
                Feature::and(name, children)
            }
        }
        k => {
            let max = config.max_children.min(*budget);
            if max < 2 {
                return Feature::leaf(name);
            }
            let n = rng.random_range(2..=max);
            let mut children = Vec::new();
            for _ in 0..n {
                if *budget == 0 {
                    break;
                }
                children.push(take_child(rng, counter, budget, config, false));
            }
            if children.len() < 2 {
                // ran out of budget mid-group; degrade to and/leaf
                return match children.pop() {
                    Some(c) => Feature::and(name, vec![c]),
                    None => Feature::leaf(name),
                };
            }
            if k == 2 {
                Feature::or(name, children)
            } else {
                Feature::alternative(name, children)
            }
        }
    }
}

fn take_child(
    rng: &mut ChaCha8Rng,
    counter: &mut usize,
    budget: &mut usize,
    config: &GeneratorConfig,
    is_root: bool,
) -> Feature {
    debug_assert!(*budget > 0);
    *budget -= 1;
    grow(rng, counter, budget, config, is_root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_models_are_well_formed_and_within_budget() {
        let cfg = GeneratorConfig::default();
        for seed in 0..200 {
            let m = random_model(seed, &cfg);
            assert!(m.feature_count() <= cfg.max_features, "seed {seed}");
            // reconstructing through the public constructor re-checks all invariants
            FeatureModel::new(m.root().clone(), m.constraints().to_vec()).unwrap();
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GeneratorConfig::default();
        assert_eq!(random_model(42, &cfg), random_model(42, &cfg));
    }
}
