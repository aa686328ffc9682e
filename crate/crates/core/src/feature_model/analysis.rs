//! Configuration-space analyses: enumeration, counting, dead features.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Configuration, ConstraintKind, Decomposition, FeatureModel, ModelIndex, Optionality};

/// Hard bound for subset enumeration: 2^24 candidate sets is desk-scale,
/// anything larger must go through the constraint-free fast path or pass
/// an explicit result limit.
pub const ENUMERATION_CAPACITY: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(
        "model has {features} features, beyond the enumeration capacity of {capacity}; \
         pass a result limit or drop cross-tree constraints"
    )]
    Capacity { features: usize, capacity: usize },
    #[error("configuration count exceeds the supported integer range")]
    CountOverflow,
}

impl FeatureModel {
    /// Enumerates valid configurations in lexicographic order of their
    /// sorted path lists, truncated at `limit` when given. Bindings in the
    /// returned configurations are empty.
    pub fn enumerate_configurations(
        &self,
        limit: Option<usize>,
    ) -> Result<Vec<Configuration>, AnalysisError> {
        let index = self.index();
        let n = index.order.len();
        if n > ENUMERATION_CAPACITY && limit.is_none() {
            return Err(AnalysisError::Capacity {
                features: n,
                capacity: ENUMERATION_CAPACITY,
            });
        }
        if limit == Some(0) {
            return Ok(Vec::new());
        }
        let mut universe: Vec<&str> = index.order.iter().map(|f| f.path()).collect();
        universe.sort_unstable();

        let mut out = Vec::new();
        let mut selected = BTreeSet::new();
        self.enumerate_dfs(&index, &universe, &mut selected, 0, limit, &mut out);
        Ok(out)
    }

    /// Depth-first subset walk over the sorted path universe. Yielding a
    /// set before descending into its supersets produces exactly the
    /// lexicographic order of sorted path lists.
    fn enumerate_dfs(
        &self,
        index: &ModelIndex<'_>,
        universe: &[&str],
        selected: &mut BTreeSet<String>,
        start: usize,
        limit: Option<usize>,
        out: &mut Vec<Configuration>,
    ) -> bool {
        if self.validate_with_index(index, selected).valid {
            out.push(Configuration {
                selected: selected.clone(),
                bindings: Default::default(),
            });
            if limit.is_some_and(|l| out.len() >= l) {
                return true;
            }
        }
        for i in start..universe.len() {
            if !self.extension_viable(index, selected, universe[i], i) {
                continue;
            }
            selected.insert(universe[i].to_string());
            let done = self.enumerate_dfs(index, universe, selected, i + 1, limit, out);
            selected.remove(universe[i]);
            if done {
                return true;
            }
        }
        false
    }

    /// Whether `selected + cand` can still grow into a valid configuration,
    /// given that only paths lexicographically greater than `cand` may be
    /// added afterwards. A parent path is always a strict prefix of its
    /// children's paths, so it sorts first; that makes a missing root,
    /// a missing parent, an over-full alternative group, a violated
    /// excludes pair, and any skipped-but-required smaller path permanent.
    /// The prune is sound: every rejected branch contains no valid set.
    fn extension_viable(
        &self,
        index: &ModelIndex<'_>,
        selected: &BTreeSet<String>,
        cand: &str,
        cand_pos: usize,
    ) -> bool {
        let root = self.root.path();
        if cand != root && !selected.contains(root) {
            return false;
        }
        if cand != root {
            match index.parent.get(cand) {
                Some(parent) => {
                    if !selected.contains(*parent) {
                        return false;
                    }
                    let parent_feature = index.by_path[*parent];
                    if parent_feature.decomposition() == Decomposition::Alternative
                        && parent_feature
                            .children()
                            .iter()
                            .any(|c| selected.contains(c.path()))
                    {
                        return false;
                    }
                }
                None => return false,
            }
        }
        let _ = cand_pos;
        for c in &self.constraints {
            if c.kind == ConstraintKind::Excludes
                && ((c.source == cand && selected.contains(&c.target))
                    || (c.target == cand && selected.contains(&c.source)))
            {
                return false;
            }
        }
        // Requirements that could only be met by paths we already passed.
        let misses_smaller = |needed: &str| needed < cand && !selected.contains(needed);
        for f in &index.order {
            if !selected.contains(f.path()) {
                continue;
            }
            match f.decomposition() {
                Decomposition::And => {
                    for child in f.children() {
                        if child.optionality() == Optionality::Mandatory
                            && child.path() != cand
                            && misses_smaller(child.path())
                        {
                            return false;
                        }
                    }
                }
                Decomposition::Or | Decomposition::Alternative => {
                    let any_selected_or_cand = f
                        .children()
                        .iter()
                        .any(|c| c.path() == cand || selected.contains(c.path()));
                    let any_still_addable =
                        f.children().iter().any(|c| c.path() > cand);
                    if !any_selected_or_cand && !any_still_addable {
                        return false;
                    }
                }
                Decomposition::Leaf => {}
            }
        }
        for c in &self.constraints {
            if c.kind == ConstraintKind::Requires
                && (selected.contains(&c.source) || c.source == cand)
                && c.target != cand
                && misses_smaller(&c.target)
            {
                return false;
            }
        }
        true
    }

    /// Number of valid configurations.
    ///
    /// Constraint-free models use the bottom-up product rule and never hit
    /// the enumeration capacity; models with cross-tree constraints fall
    /// back to filtered enumeration.
    pub fn count_configurations(&self) -> Result<u128, AnalysisError> {
        if self.constraints.is_empty() {
            count_subtree(&self.root)
        } else {
            Ok(self.enumerate_configurations(None)?.len() as u128)
        }
    }

    /// Paths that appear in zero valid configurations.
    ///
    /// A constraint-free well-formed model has none: any feature can be
    /// reached by selecting its ancestor chain plus whatever each group
    /// rule demands, and nothing ever conflicts. With constraints present
    /// the answer comes from enumeration, subject to capacity.
    pub fn find_dead_features(&self) -> Result<BTreeSet<String>, AnalysisError> {
        if self.constraints.is_empty() {
            return Ok(BTreeSet::new());
        }
        let configs = self.enumerate_configurations(None)?;
        let mut alive = BTreeSet::new();
        for c in &configs {
            alive.extend(c.selected.iter().cloned());
        }
        Ok(self
            .paths()
            .into_iter()
            .filter(|p| !alive.contains(*p))
            .map(str::to_string)
            .collect())
    }
}

fn count_subtree(feature: &super::Feature) -> Result<u128, AnalysisError> {
    let overflow = || AnalysisError::CountOverflow;
    match feature.decomposition() {
        Decomposition::Leaf => Ok(1),
        Decomposition::And => {
            let mut total: u128 = 1;
            for child in feature.children() {
                let mut c = count_subtree(child)?;
                if child.optionality() == Optionality::Optional {
                    c = c.checked_add(1).ok_or_else(overflow)?;
                }
                total = total.checked_mul(c).ok_or_else(overflow)?;
            }
            Ok(total)
        }
        Decomposition::Or => {
            let mut total: u128 = 1;
            for child in feature.children() {
                let c = count_subtree(child)?.checked_add(1).ok_or_else(overflow)?;
                total = total.checked_mul(c).ok_or_else(overflow)?;
            }
            total.checked_sub(1).ok_or_else(overflow)
        }
        Decomposition::Alternative => {
            let mut total: u128 = 0;
            for child in feature.children() {
                total = total
                    .checked_add(count_subtree(child)?)
                    .ok_or_else(overflow)?;
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{CrossTreeConstraint, Feature};
    use super::*;

    fn or_abc() -> FeatureModel {
        FeatureModel::new(
            Feature::or(
                "R",
                vec![Feature::leaf("a"), Feature::leaf("b"), Feature::leaf("c")],
            ),
            vec![],
        )
        .unwrap()
    }

    /// Exhaustive subset filter, the independent route against which the
    /// structured enumeration is checked.
    fn brute_force(model: &FeatureModel) -> Vec<BTreeSet<String>> {
        let paths: Vec<String> = model.paths().iter().map(|p| p.to_string()).collect();
        let mut accepted = Vec::new();
        for mask in 0u32..(1 << paths.len()) {
            let subset: BTreeSet<String> = paths
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect();
            let cfg = Configuration {
                selected: subset.clone(),
                bindings: Default::default(),
            };
            if model.validate_configuration(&cfg).valid {
                accepted.push(subset);
            }
        }
        accepted.sort_by(|a, b| {
            let av: Vec<&String> = a.iter().collect();
            let bv: Vec<&String> = b.iter().collect();
            av.cmp(&bv)
        });
        accepted
    }

    #[test]
    fn or_group_has_seven_configurations() {
        let m = or_abc();
        let configs = m.enumerate_configurations(None).unwrap();
        assert_eq!(configs.len(), 7);
        assert_eq!(
            brute_force(&m).len(),
            7,
            "brute force disagrees with enumeration"
        );
        assert_eq!(m.count_configurations().unwrap(), 7);
    }

    #[test]
    fn enumeration_is_lexicographic_in_sorted_path_lists() {
        let m = or_abc();
        let got: Vec<Vec<String>> = m
            .enumerate_configurations(None)
            .unwrap()
            .iter()
            .map(|c| c.selected.iter().cloned().collect())
            .collect();
        let expected: Vec<Vec<&str>> = vec![
            vec!["R", "R/a"],
            vec!["R", "R/a", "R/b"],
            vec!["R", "R/a", "R/b", "R/c"],
            vec!["R", "R/a", "R/c"],
            vec!["R", "R/b"],
            vec!["R", "R/b", "R/c"],
            vec!["R", "R/c"],
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn alternative_group_has_three_configurations() {
        let m = FeatureModel::new(
            Feature::alternative(
                "R",
                vec![Feature::leaf("a"), Feature::leaf("b"), Feature::leaf("c")],
            ),
            vec![],
        )
        .unwrap();
        assert_eq!(m.enumerate_configurations(None).unwrap().len(), 3);
        assert_eq!(m.count_configurations().unwrap(), 3);
    }

    #[test]
    fn optional_toggle_gives_two_configurations() {
        let m = FeatureModel::new(
            Feature::and("R", vec![Feature::leaf("m"), Feature::leaf("o").optional()]),
            vec![],
        )
        .unwrap();
        let configs = m.enumerate_configurations(None).unwrap();
        let sets: Vec<Vec<String>> = configs
            .iter()
            .map(|c| c.selected.iter().cloned().collect())
            .collect();
        assert_eq!(sets, vec![vec!["R", "R/m"], vec!["R", "R/m", "R/o"]]);
        assert_eq!(m.count_configurations().unwrap(), 2);
    }

    #[test]
    fn nested_count_matches_brute_force() {
        let m = FeatureModel::new(
            Feature::or(
                "R",
                vec![
                    Feature::alternative("a", vec![Feature::leaf("x"), Feature::leaf("y")]),
                    Feature::leaf("b"),
                ],
            ),
            vec![],
        )
        .unwrap();
        assert_eq!(m.count_configurations().unwrap(), 5);
        assert_eq!(brute_force(&m).len(), 5);
        assert_eq!(m.enumerate_configurations(None).unwrap().len(), 5);
    }

    #[test]
    fn leaf_root_counts_one() {
        let m = FeatureModel::new(Feature::leaf("R"), vec![]).unwrap();
        assert_eq!(m.count_configurations().unwrap(), 1);
        assert_eq!(m.enumerate_configurations(None).unwrap().len(), 1);
    }

    #[test]
    fn truncation_respects_limit_and_order() {
        let m = or_abc();
        let first_two = m.enumerate_configurations(Some(2)).unwrap();
        let all = m.enumerate_configurations(None).unwrap();
        assert_eq!(first_two, all[..2].to_vec());
    }

    #[test]
    fn capacity_error_without_limit_on_large_models() {
        let leaves: Vec<Feature> = (0..25).map(|i| Feature::leaf(format!("f{i}")).optional()).collect();
        let m = FeatureModel::new(Feature::and("R", leaves), vec![]).unwrap();
        assert!(matches!(
            m.enumerate_configurations(None),
            Err(AnalysisError::Capacity { .. })
        ));
        let some = m.enumerate_configurations(Some(5)).unwrap();
        assert_eq!(some.len(), 5);
        // the fast path does not care about capacity
        assert_eq!(m.count_configurations().unwrap(), 1 << 25);
    }

    #[test]
    fn excluded_optional_is_dead() {
        let m = FeatureModel::new(
            Feature::and("R", vec![Feature::leaf("m"), Feature::leaf("a").optional()]),
            vec![CrossTreeConstraint::excludes("R/a", "R/m")],
        )
        .unwrap();
        let dead = m.find_dead_features().unwrap();
        assert_eq!(dead.into_iter().collect::<Vec<_>>(), vec!["R/a"]);
    }

    #[test]
    fn constraint_free_models_have_no_dead_features() {
        let m = FeatureModel::new(
            Feature::and(
                "R",
                vec![
                    Feature::or("g", vec![Feature::leaf("x"), Feature::leaf("y")]),
                    Feature::leaf("o").optional(),
                ],
            ),
            vec![],
        )
        .unwrap();
        assert!(m.find_dead_features().unwrap().is_empty());
        // verify by enumeration: every path occurs in some valid configuration
        let mut alive = BTreeSet::new();
        for c in m.enumerate_configurations(None).unwrap() {
            alive.extend(c.selected);
        }
        for p in m.paths() {
            assert!(alive.contains(p), "{p} unreachable");
        }
    }

    #[test]
    fn requires_inside_alternative_kills_the_source() {
        let m = FeatureModel::new(
            Feature::alternative("R", vec![Feature::leaf("a"), Feature::leaf("b")]),
            vec![CrossTreeConstraint::requires("R/a", "R/b")],
        )
        .unwrap();
        let dead = m.find_dead_features().unwrap();
        assert_eq!(dead.into_iter().collect::<Vec<_>>(), vec!["R/a"]);
    }

    #[test]
    fn counting_with_constraints_filters_enumeration() {
        let m = FeatureModel::new(
            Feature::or("R", vec![Feature::leaf("a"), Feature::leaf("b")]),
            vec![CrossTreeConstraint::excludes("R/a", "R/b")],
        )
        .unwrap();
        // {R,a}, {R,b} — the pair {R,a,b} is excluded
        assert_eq!(m.count_configurations().unwrap(), 2);
    }
}
