//! Exhaustive routines on finite groups stored as explicit element lists.

use std::collections::{BTreeSet, VecDeque};

/// An element of a finite group with a computable product.
pub trait GroupElement: Clone + Ord + std::fmt::Debug {
    fn op(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn is_identity(&self) -> bool;

    fn conjugate_by(&self, g: &Self) -> Self {
        g.op(self).op(&g.inverse())
    }

    fn commutes_with(&self, other: &Self) -> bool {
        self.op(other) == other.op(self)
    }

    fn order(&self) -> usize {
        let mut k = 1;
        let mut x = self.clone();
        while !x.is_identity() {
            x = x.op(self);
            k += 1;
        }
        k
    }
}

/// Breadth-first closure of `gens` under right multiplication.
///
/// `bound` caps the number of elements; exceeding it is a logic error.
pub fn closure<T: GroupElement>(identity: T, gens: &[T], bound: usize) -> BTreeSet<T> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.op(g);
            if seen.insert(y.clone()) {
                assert!(seen.len() <= bound, "closure exceeded {bound} elements");
                queue.push_back(y);
            }
        }
    }
    seen
}

pub fn centralizer_in<'a, T: GroupElement + 'a>(
    ambient: impl IntoIterator<Item = &'a T>,
    set: &[T],
) -> BTreeSet<T> {
    ambient
        .into_iter()
        .filter(|g| set.iter().all(|s| g.commutes_with(s)))
        .cloned()
        .collect()
}

pub fn center<T: GroupElement>(group: &BTreeSet<T>) -> BTreeSet<T> {
    let all: Vec<T> = group.iter().cloned().collect();
    centralizer_in(group.iter(), &all)
}

pub fn conjugacy_class<T: GroupElement>(group: &BTreeSet<T>, x: &T) -> BTreeSet<T> {
    group.iter().map(|g| x.conjugate_by(g)).collect()
}

/// Partition of `subset` into conjugacy classes of `group`.
pub fn conjugacy_classes_of<T: GroupElement>(
    group: &BTreeSet<T>,
    subset: &BTreeSet<T>,
) -> Vec<BTreeSet<T>> {
    let mut remaining = subset.clone();
    let mut classes = Vec::new();
    while let Some(x) = remaining.iter().next().cloned() {
        let class = conjugacy_class(group, &x);
        for y in &class {
            remaining.remove(y);
        }
        classes.push(class);
    }
    classes
}

pub fn involutions<T: GroupElement>(group: &BTreeSet<T>) -> BTreeSet<T> {
    group
        .iter()
        .filter(|x| !x.is_identity() && x.op(x).is_identity())
        .cloned()
        .collect()
}

/// Elements `x` of order 2 with `{1, x}` normal, i.e. central involutions.
pub fn normal_subgroups_of_order_two<T: GroupElement>(group: &BTreeSet<T>) -> Vec<T> {
    involutions(group)
        .into_iter()
        .filter(|x| group.iter().all(|g| &x.conjugate_by(g) == x))
        .collect()
}
