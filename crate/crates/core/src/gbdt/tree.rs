use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A tree node. Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        cover: u64,
    },
    Leaf {
        value: f64,
        cover: u64,
    },
}

impl Node {
    pub fn cover(&self) -> u64 {
        match *self {
            Node::Split { cover, .. } | Node::Leaf { cover, .. } => cover,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// Binary tree stored as a flat node array rooted at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn leaf(value: f64, cover: u64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value, cover }],
        }
    }

    /// Builds a tree from raw nodes after checking its structure.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self> {
        let tree = Self { nodes };
        tree.check_structure()?;
        Ok(tree)
    }

    pub(crate) fn from_nodes_unchecked(nodes: Vec<Node>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> &Node {
        &self.nodes[index]
    }

    /// Every non-root node has exactly one parent, children come after their
    /// parent, and all nodes are reachable from the root.
    pub fn check_structure(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::ModelIntegrity("tree has no nodes".into()));
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            match *node {
                Node::Split {
                    left,
                    right,
                    threshold,
                    ..
                } => {
                    for child in [left, right] {
                        if child <= i || child >= self.nodes.len() {
                            return Err(Error::ModelIntegrity(format!(
                                "node {i} has invalid child index {child}"
                            )));
                        }
                        parents[child] += 1;
                    }
                    if threshold.is_nan() {
                        return Err(Error::ModelIntegrity(format!("node {i} has NaN threshold")));
                    }
                }
                Node::Leaf { value, .. } => {
                    if !value.is_finite() {
                        return Err(Error::ModelIntegrity(format!(
                            "leaf {i} has non-finite value"
                        )));
                    }
                }
            }
        }
        if parents[0] != 0 || parents[1..].iter().any(|&p| p != 1) {
            return Err(Error::ModelIntegrity(
                "nodes do not form a single binary tree".into(),
            ));
        }
        Ok(())
    }

    /// Covers are positive and each split's cover is the sum of its children's.
    pub fn check_covers(&self) -> Result<()> {
        for (i, node) in self.nodes.iter().enumerate() {
            if node.cover() == 0 {
                return Err(Error::ModelIntegrity(format!("node {i} has zero cover")));
            }
            if let Node::Split {
                left, right, cover, ..
            } = *node
            {
                let sum = self.nodes[left].cover() + self.nodes[right].cover();
                if sum != cover {
                    return Err(Error::ModelIntegrity(format!(
                        "node {i} cover {cover} differs from children sum {sum}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match *n {
                Node::Split { feature, .. } => Some(feature),
                Node::Leaf { .. } => None,
            })
            .max()
    }

    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, i: usize) -> usize {
            match *t.node(i) {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, left).max(walk(t, right)),
            }
        }
        walk(self, 0)
    }

    /// Cover-weighted mean leaf value.
    pub fn expected_value(&self) -> f64 {
        let root = self.nodes[0].cover() as f64;
        self.nodes
            .iter()
            .map(|n| match *n {
                Node::Leaf { value, cover } => value * cover as f64 / root,
                Node::Split { .. } => 0.0,
            })
            .sum()
    }

    pub fn scale(&mut self, factor: f64) {
        for node in &mut self.nodes {
            if let Node::Leaf { value, .. } = node {
                *value *= factor;
            }
        }
    }
}
