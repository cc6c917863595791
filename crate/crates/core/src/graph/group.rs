use serde::{Deserialize, Serialize};

use super::GraphError;

/// A finite group given by its multiplication table, with a symmetric
/// generating set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupJson", into = "GroupJson")]
pub struct GroupTable {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    generators: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    generators: Vec<usize>,
}

impl TryFrom<GroupJson> for GroupTable {
    type Error = GraphError;
    fn try_from(j: GroupJson) -> Result<Self, GraphError> {
        GroupTable::new(j.order, j.mul, j.identity, j.generators)
    }
}

impl From<GroupTable> for GroupJson {
    fn from(g: GroupTable) -> Self {
        GroupJson {
            order: g.order,
            mul: g.mul,
            identity: g.identity,
            generators: g.generators,
        }
    }
}

fn bad(msg: impl Into<String>) -> GraphError {
    GraphError::Group(msg.into())
}

impl GroupTable {
    /// Validates the group axioms, symmetry of the generators and generation.
    pub fn new(
        order: usize,
        mul: Vec<usize>,
        identity: usize,
        generators: Vec<usize>,
    ) -> Result<Self, GraphError> {
        if order == 0 {
            return Err(bad("a group has at least one element"));
        }
        if mul.len() != order * order {
            return Err(bad(format!(
                "table has {} entries, expected {}",
                mul.len(),
                order * order
            )));
        }
        if mul.iter().any(|&x| x >= order) || identity >= order {
            return Err(bad("table entry out of range"));
        }
        if generators.iter().any(|&s| s >= order) {
            return Err(bad("generator out of range"));
        }
        let g = GroupTable {
            order,
            mul,
            identity,
            generators,
        };
        for x in 0..order {
            if g.mul(identity, x) != x || g.mul(x, identity) != x {
                return Err(bad(format!("{identity} is not an identity for {x}")));
            }
            if g.inverse(x).is_none() {
                return Err(bad(format!("{x} has no inverse")));
            }
            for y in 0..order {
                for z in 0..order {
                    if g.mul(g.mul(x, y), z) != g.mul(x, g.mul(y, z)) {
                        return Err(bad(format!("not associative at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        for &s in &g.generators {
            let inv = g.inverse(s).expect("inverses checked above");
            if !g.generators.contains(&inv) {
                return Err(bad(format!("generator {s} lacks its inverse {inv}")));
            }
        }
        let mut seen = vec![false; order];
        seen[identity] = true;
        let mut stack = vec![identity];
        while let Some(x) = stack.pop() {
            for &s in &g.generators {
                let y = g.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|&b| !b) {
            return Err(bad("generators do not generate the group"));
        }
        Ok(g)
    }

    /// The cyclic group Z/n with identity 0 and the given generators.
    pub fn cyclic(n: usize, generators: &[usize]) -> Result<Self, GraphError> {
        let mul = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        Self::new(n, mul, 0, generators.to_vec())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.order + y]
    }

    pub fn inverse(&self, x: usize) -> Option<usize> {
        (0..self.order).find(|&y| self.mul(x, y) == self.identity)
    }
}
