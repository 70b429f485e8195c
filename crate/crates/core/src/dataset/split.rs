//! Mission-level train/test partition.

use std::collections::BTreeSet;

use crate::dataset::Mission;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Split<T> {
    pub train: Vec<Mission<T>>,
    pub test: Vec<Mission<T>>,
    pub warning: Option<String>,
}

/// Partitions whole missions. With `train_ids` absent every mission not in
/// `test_ids` trains; otherwise missions in neither list are dropped.
pub fn split_missions<T>(
    missions: Vec<Mission<T>>,
    train_ids: Option<&[u64]>,
    test_ids: &[u64],
) -> Result<Split<T>> {
    let mut seen = BTreeSet::new();
    for m in &missions {
        if !seen.insert(m.id) {
            return Err(Error::Data(format!("mission id {} appears twice", m.id)));
        }
    }
    let test: BTreeSet<u64> = test_ids.iter().copied().collect();
    let train: Option<BTreeSet<u64>> = train_ids.map(|ids| ids.iter().copied().collect());
    for id in test.iter().chain(train.iter().flatten()) {
        if !seen.contains(id) {
            return Err(Error::Config(format!("unknown mission id {id}")));
        }
    }
    if let Some(train) = &train {
        if let Some(id) = train.intersection(&test).next() {
            return Err(Error::Config(format!("mission {id} listed for both training and testing")));
        }
    }
    let warning = test.is_empty().then(|| "empty test list: every mission is used for training".to_string());
    let (test_set, rest): (Vec<_>, Vec<_>) = missions.into_iter().partition(|m| test.contains(&m.id));
    let train_set = rest
        .into_iter()
        .filter(|m| train.as_ref().map_or(true, |t| t.contains(&m.id)))
        .collect();
    Ok(Split { train: train_set, test: test_set, warning })
}
