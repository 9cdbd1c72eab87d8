//! Variable registry: stable indices, names and weights for every symbol.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarKind {
    X,
    Y,
    /// Entry `a_{k,l}` of the parameter matrix.
    A(usize, usize),
    /// Split coordinate `b_{k,m}` (pivot directions of level `k`).
    B(usize, usize),
    /// Split coordinate `c_{k,n}` (complementary directions of level `k`).
    C(usize, usize),
    /// First-integral coordinate replacing `c_{k,n}`.
    F(usize, usize),
    /// Formal inverse of the level-`k` pivot determinant.
    InvDelta(usize),
    /// Anything else (e.g. a symbolic scaling parameter).
    Aux(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub kind: VarKind,
    pub name: String,
    pub weight: i64,
}

/// Ordered variable list `x, y, a_{1,1}, a_{1,2}, …, a_{p-3,p-3}` followed by
/// any derived coordinates appended later.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarRegistry {
    p: usize,
    vars: Vec<VarInfo>,
}

/// Number of entries `a_{k,l}` with `1 <= k <= l <= m`.
pub fn triangle_size(m: usize) -> usize {
    m * (m + 1) / 2
}

impl VarRegistry {
    pub fn new(p: usize) -> Self {
        let mut vars = vec![
            VarInfo { kind: VarKind::X, name: "x".into(), weight: 1 },
            VarInfo { kind: VarKind::Y, name: "y".into(), weight: 1 },
        ];
        let m = p.saturating_sub(3);
        for k in 1..=m {
            for l in k..=m {
                vars.push(VarInfo { kind: VarKind::A(k, l), name: format!("a_{k}_{l}"), weight: k as i64 - 1 });
            }
        }
        VarRegistry { p, vars }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Highest level `p-3`.
    pub fn max_level(&self) -> usize {
        self.p.saturating_sub(3)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub const X: usize = 0;
    pub const Y: usize = 1;

    /// Index of `a_{k,l}`; entries are ordered by `k` then `l`.
    pub fn a(&self, k: usize, l: usize) -> usize {
        let m = self.max_level();
        assert!(1 <= k && k <= l && l <= m, "a_{k},{l} outside range for p={}", self.p);
        // rows 1..k-1 contribute (m - r + 1) entries each
        let before: usize = (1..k).map(|r| m - r + 1).sum();
        2 + before + (l - k)
    }

    pub fn try_a(&self, k: usize, l: usize) -> Result<usize> {
        if k >= 1 && k <= l && l <= self.max_level() {
            Ok(self.a(k, l))
        } else {
            Err(Error::Registry(format!("a_{k},{l} (p={})", self.p)))
        }
    }

    /// All `(k, l, index)` triples for the `a` variables.
    pub fn a_entries(&self) -> Vec<(usize, usize, usize)> {
        let m = self.max_level();
        let mut out = Vec::new();
        for k in 1..=m {
            for l in k..=m {
                out.push((k, l, self.a(k, l)));
            }
        }
        out
    }

    /// Entries of one level `k`: `a_{k,k}, …, a_{k,p-3}`.
    pub fn level_entries(&self, k: usize) -> Vec<(usize, usize)> {
        (k..=self.max_level()).map(|l| (l, self.a(k, l))).collect()
    }

    pub fn info(&self, i: usize) -> &VarInfo {
        &self.vars[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].name
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.vars[i].weight
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    /// Level of an `a`/`b`/`c`/`f` variable, `None` otherwise.
    pub fn level(&self, i: usize) -> Option<usize> {
        match self.vars[i].kind {
            VarKind::A(k, _) | VarKind::B(k, _) | VarKind::C(k, _) | VarKind::F(k, _) => Some(k),
            _ => None,
        }
    }

    pub fn find(&self, kind: &VarKind) -> Option<usize> {
        self.vars.iter().position(|v| &v.kind == kind)
    }

    pub fn find_name(&self, name: &str) -> Result<usize> {
        self.vars.iter().position(|v| v.name == name).ok_or_else(|| Error::Registry(name.to_string()))
    }

    /// Appends a derived variable (or returns the existing index).
    pub fn push(&mut self, kind: VarKind, weight: i64) -> usize {
        if let Some(i) = self.find(&kind) {
            return i;
        }
        let name = match &kind {
            VarKind::X => "x".to_string(),
            VarKind::Y => "y".to_string(),
            VarKind::A(k, l) => format!("a_{k}_{l}"),
            VarKind::B(k, m) => format!("b_{k}_{m}"),
            VarKind::C(k, n) => format!("c_{k}_{n}"),
            VarKind::F(k, n) => format!("f_{k}_{n}"),
            VarKind::InvDelta(k) => format!("inv_delta_{k}"),
            VarKind::Aux(s) => s.clone(),
        };
        self.vars.push(VarInfo { kind, name, weight });
        self.vars.len() - 1
    }

    /// True when the registry begins with the standard layout for `p`.
    pub fn extends(&self, base: &VarRegistry) -> bool {
        self.vars.len() >= base.vars.len() && self.vars[..base.vars.len()] == base.vars[..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let r = VarRegistry::new(6);
        assert_eq!(r.len(), 2 + triangle_size(3));
        assert_eq!(r.a(1, 1), 2);
        assert_eq!(r.a(1, 3), 4);
        assert_eq!(r.a(2, 2), 5);
        assert_eq!(r.a(3, 3), 7);
        assert_eq!(r.weight(r.a(3, 3)), 2);
        assert!(r.try_a(2, 1).is_err());
        let mut r2 = r.clone();
        let b = r2.push(VarKind::B(3, 3), 2);
        assert_eq!(r2.push(VarKind::B(3, 3), 2), b);
        assert!(r2.extends(&r));
    }
}
