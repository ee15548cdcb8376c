//! Sets of possibly overlapping communities.

use crate::error::{Error, Result};

/// A collection of node sets over `n_nodes` nodes. Communities may overlap
/// or be empty; their order carries no meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    n_nodes: usize,
    communities: Vec<Vec<usize>>,
}

impl Cover {
    /// Member lists are sorted and deduplicated.
    pub fn new(n_nodes: usize, communities: Vec<Vec<usize>>) -> Result<Self> {
        let mut communities = communities;
        for (k, c) in communities.iter_mut().enumerate() {
            c.sort_unstable();
            c.dedup();
            if let Some(&max) = c.last() {
                if max >= n_nodes {
                    return Err(Error::InvalidData(format!(
                        "community {k} contains node {max} but there are only {n_nodes} nodes"
                    )));
                }
            }
        }
        Ok(Self {
            n_nodes,
            communities,
        })
    }

    /// Disjoint cover from one label per node.
    pub fn from_labels(labels: &[usize]) -> Self {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut communities = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            communities[l].push(i);
        }
        Self {
            n_nodes: labels.len(),
            communities,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    pub fn community(&self, k: usize) -> &[usize] {
        &self.communities[k]
    }

    /// Indices of empty communities.
    pub fn empty_communities(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.communities[k].is_empty())
            .collect()
    }

    /// Number of communities each node belongs to.
    pub fn memberships_per_node(&self) -> Vec<usize> {
        let mut m = vec![0; self.n_nodes];
        for c in &self.communities {
            for &i in c {
                m[i] += 1;
            }
        }
        m
    }

    /// Membership bitmap of community `k`.
    pub fn indicator(&self, k: usize) -> Vec<bool> {
        let mut v = vec![false; self.n_nodes];
        for &i in &self.communities[k] {
            v[i] = true;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_are_canonicalized() {
        let c = Cover::new(4, vec![vec![3, 1, 1], vec![]]).unwrap();
        assert_eq!(c.community(0), &[1, 3]);
        assert_eq!(c.empty_communities(), vec![1]);
        assert_eq!(c.memberships_per_node(), vec![0, 1, 0, 1]);
    }

    #[test]
    fn out_of_range_member_is_rejected() {
        assert!(Cover::new(2, vec![vec![2]]).is_err());
    }

    #[test]
    fn from_labels_groups_nodes() {
        let c = Cover::from_labels(&[1, 0, 1]);
        assert_eq!(c.communities(), &[vec![1], vec![0, 2]]);
    }
}
