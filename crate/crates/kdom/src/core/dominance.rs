use super::item::UncertainItem;

/// Full dominance: `a` is no worse than `b` everywhere and strictly better
/// somewhere (smaller is better).
pub fn dominates(a: &UncertainItem, b: &UncertainItem) -> bool {
    assert_eq!(a.dim(), b.dim(), "dominance requires equal dimensionality");
    let mut strict = false;
    for (x, y) in a.values.iter().zip(&b.values) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// k-dominance: `a` is no worse than `b` in at least `k` of `d` dimensions
/// and strictly better in at least one. Unlike full dominance this relation
/// is not transitive; two items can k-dominate each other.
pub fn k_dominates(a: &UncertainItem, b: &UncertainItem, k: usize) -> bool {
    let d = a.dim();
    assert_eq!(d, b.dim(), "dominance requires equal dimensionality");
    assert!(k >= 1 && k <= d, "k must lie in 1..=d, got k={k} d={d}");
    let mut not_worse = 0usize;
    let mut strict = false;
    for (x, y) in a.values.iter().zip(&b.values) {
        if x <= y {
            not_worse += 1;
        }
        if x < y {
            strict = true;
        }
    }
    not_worse >= k && strict
}
