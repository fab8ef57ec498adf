use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Folds {
    k: usize,
    assignments: Vec<usize>,
}

impl Folds {
    /// Explicit assignment; every id must be below `k`.
    pub fn from_assignments(k: usize, assignments: Vec<usize>) -> Result<Self> {
        check_k(k, usize::MAX)?;
        if let Some(&bad) = assignments.iter().find(|&&f| f >= k) {
            return Err(Error::InvalidConfig(format!("fold id {bad} outside 0..{k}")));
        }
        Ok(Self { k, assignments })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Fold id of every sample.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Held-out indices of `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    /// Complement of [`test_indices`](Self::test_indices), ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

fn check_k(k: usize, available: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::KTooSmall { k, min: 2 });
    }
    if k > available {
        return Err(Error::KTooLarge { k, available });
    }
    Ok(())
}

/// Sample-level k-fold. Stratified mode deals shuffled positives round-robin
/// from fold 0, then continues with shuffled negatives where the positives
/// stopped, so both fold sizes and per-fold positive counts differ by ≤ 1.
pub fn kfold_split(labels: &[bool], k: usize, seed_value: u64, stratified: bool) -> Result<Folds> {
    check_k(k, labels.len())?;
    let mut rng = seed::rng(seed::derive(seed_value, "kfold"));
    let mut order: Vec<usize> = Vec::with_capacity(labels.len());
    if stratified {
        let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
        let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
        for count in [pos.len(), neg.len()] {
            if count < k {
                return Err(Error::ClassTooSmall { count, k });
            }
        }
        pos.shuffle(&mut rng);
        neg.shuffle(&mut rng);
        order.extend(pos);
        order.extend(neg);
    } else {
        order.extend(0..labels.len());
        order.shuffle(&mut rng);
    }
    let mut assignments = vec![0; labels.len()];
    for (slot, &i) in order.iter().enumerate() {
        assignments[i] = slot % k;
    }
    Ok(Folds { k, assignments })
}

/// k-fold over whole groups: samples sharing a group id always share a fold.
///
/// Groups are visited largest first (shuffled within equal sizes) and each
/// goes to the fold where it least increases the squared deviation of the
/// sample count and, when stratified, the positive count from `n/k`. Ties go
/// to the smaller fold, then the lower index. Balance is approximate when
/// groups are large.
pub fn group_kfold_split(
    labels: &[bool],
    groups: &[usize],
    k: usize,
    seed_value: u64,
    stratified: bool,
) -> Result<Folds> {
    if labels.len() != groups.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: groups.len(),
        });
    }
    let n_groups = groups.iter().max().map_or(0, |g| g + 1);
    let mut size = vec![0usize; n_groups];
    let mut positives = vec![0usize; n_groups];
    for (&g, &y) in groups.iter().zip(labels) {
        size[g] += 1;
        positives[g] += usize::from(y);
    }
    let present: Vec<usize> = (0..n_groups).filter(|&g| size[g] > 0).collect();
    check_k(k, present.len())?;

    let mut rng = seed::rng(seed::derive(seed_value, "group_kfold"));
    let mut order = present;
    order.shuffle(&mut rng);
    order.sort_by(|&a, &b| size[b].cmp(&size[a]));

    let n = labels.len() as f64;
    let total_pos = positives.iter().sum::<usize>() as f64;
    let (target_size, target_pos) = (n / k as f64, total_pos / k as f64);
    let mut fold_size = vec![0usize; k];
    let mut fold_pos = vec![0usize; k];
    let mut fold_of = vec![0usize; n_groups];
    for g in order {
        // Increase in squared deviation from the targets.
        let grow = |current: usize, add: usize, target: f64| {
            let before = current as f64 - target;
            let after = (current + add) as f64 - target;
            after * after - before * before
        };
        let cost = |f: usize| {
            let s = grow(fold_size[f], size[g], target_size);
            if stratified {
                s + grow(fold_pos[f], positives[g], target_pos)
            } else {
                s
            }
        };
        let best = (0..k)
            .min_by(|&a, &b| {
                cost(a)
                    .total_cmp(&cost(b))
                    .then(fold_size[a].cmp(&fold_size[b]))
                    .then(a.cmp(&b))
            })
            .unwrap_or(0);
        fold_of[g] = best;
        fold_size[best] += size[g];
        fold_pos[best] += positives[g];
    }
    Ok(Folds {
        k,
        assignments: groups.iter().map(|&g| fold_of[g]).collect(),
    })
}
