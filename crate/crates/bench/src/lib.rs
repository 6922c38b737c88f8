//! Fixtures shared by the benchmarks.

use evograph_core::{build_family, build_superstar, FamilyKind, GraphTopology, SuperstarSpec};

pub fn superstar(b: usize, l: usize, h: usize) -> GraphTopology {
    build_superstar(SuperstarSpec::new(b, l, h).expect("valid spec")).expect("buildable")
}

pub fn complete(n: usize) -> GraphTopology {
    build_family(FamilyKind::Complete, n).expect("n >= 2")
}

pub fn star(n: usize) -> GraphTopology {
    build_family(FamilyKind::Star, n).expect("n >= 2")
}
