use crate::bitset::BitSet;

use super::Realisation;

/// A partial function between realisation carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RealisationMap {
    table: Vec<Option<usize>>,
}

impl RealisationMap {
    pub fn new(table: Vec<Option<usize>>) -> Self {
        RealisationMap { table }
    }

    pub fn identity(n: usize) -> Self {
        RealisationMap {
            table: (0..n).map(Some).collect(),
        }
    }

    pub fn get(&self, n: usize) -> Option<usize> {
        self.table[n]
    }

    pub fn table(&self) -> &[Option<usize>] {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn domain(&self) -> BitSet {
        (0..self.table.len())
            .filter(|&n| self.table[n].is_some())
            .collect()
    }

    pub fn is_total(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    pub fn image(&self, set: BitSet) -> BitSet {
        set.map(|n| self.table[n])
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &RealisationMap) -> RealisationMap {
        RealisationMap {
            table: self
                .table
                .iter()
                .map(|t| t.and_then(|m| other.table[m]))
                .collect(),
        }
    }

    /// Bijective onto a carrier of `n` nodes.
    pub fn is_bijection(&self, n: usize) -> bool {
        self.is_total()
            && self.table.len() == n
            && self.image(BitSet::full(self.table.len())).len() == n
    }
}

/// Whether `m` is a map of realisations `r ⪰ s`: partial, surjective,
/// preserving down-closed subsets and commuting with the labels.
pub fn is_realisation_map(m: &RealisationMap, r: &Realisation, s: &Realisation) -> bool {
    if m.len() != r.len() || m.table().iter().flatten().any(|&t| t >= s.len()) {
        return false;
    }
    if m.image(r.nodes()) != s.nodes() {
        return false;
    }
    (0..r.len()).all(|n| match m.get(n) {
        Some(t) => r.label(n) == s.label(t),
        None => true,
    }) && (0..r.len()).all(|n| s.is_down_closed(m.image(r.down(n))))
}

/// A map split into a projection (reverse inclusion) followed by a total map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorisation {
    /// The restriction of the source to the domain of definition.
    pub middle: Realisation,
    pub projection: RealisationMap,
    pub total: RealisationMap,
}

/// Factor `m: r ⪰ s` as `r ⪰₁ r₀ ⪰₂ s`.
pub fn factor_realisation_map(m: &RealisationMap, r: &Realisation) -> Factorisation {
    let domain = m.domain();
    let middle = r.restrict(domain);
    let mut projection = vec![None; r.len()];
    let mut total = Vec::with_capacity(domain.len());
    for (k, n) in domain.iter().enumerate() {
        projection[n] = Some(k);
        total.push(m.get(n));
    }
    Factorisation {
        middle,
        projection: RealisationMap::new(projection),
        total: RealisationMap::new(total),
    }
}

/// A total map followed by a projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Swap {
    pub middle: Realisation,
    pub total: RealisationMap,
    pub projection: RealisationMap,
}

/// Given `r ⪰₁ r₀` (via `f1`) and `r₀ ⪰₂ r₁` (via `f2`), build `r ⪰₂ r' ⪰₁ r₁`
/// with the same composite. The new carrier is `(R ∖ R₀) ∪ R₁`, with `R₁`
/// first and the remaining nodes of `R` after it in their original order.
pub fn swap_factorisation(
    r: &Realisation,
    f1: &RealisationMap,
    f2: &RealisationMap,
    r1: &Realisation,
) -> Swap {
    let r0_nodes = f1.domain();
    let rest: Vec<usize> = r.nodes().difference(r0_nodes).iter().collect();
    let k1 = r1.len();
    let mut g2: Vec<Option<usize>> = vec![None; r.len()];
    for n in r0_nodes.iter() {
        g2[n] = f1.get(n).and_then(|m| f2.get(m));
    }
    for (k, &n) in rest.iter().enumerate() {
        g2[n] = Some(k1 + k);
    }
    let g2 = RealisationMap::new(g2);
    let mut labels = r1.labels().to_vec();
    let mut down: Vec<BitSet> = (0..k1).map(|b| r1.down(b)).collect();
    for &n in &rest {
        labels.push(r.label(n));
        down.push(g2.image(r.down(n)));
    }
    let middle = Realisation::from_down(labels, down);
    let projection =
        RealisationMap::new((0..middle.len()).map(|b| (b < k1).then_some(b)).collect());
    Swap {
        middle,
        total: g2,
        projection,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::fixtures;
    use crate::realisations::is_realisation;

    #[test]
    fn factor_total_map_is_identity_projection() {
        let r = Realisation::chain(&[0, 2]);
        let m = RealisationMap::identity(2);
        let fac = factor_realisation_map(&m, &r);
        assert_eq!(fac.projection, RealisationMap::identity(2));
        assert_eq!(fac.total, m);
    }

    #[test]
    fn factor_empty() {
        let r = Realisation::chain(&[0]);
        let m = RealisationMap::new(vec![None]);
        let fac = factor_realisation_map(&m, &r);
        assert!(fac.middle.is_empty());
        assert!(fac.total.is_empty());
    }

    #[test]
    fn swap_on_non_down_closed_projection_is_not_iso() {
        // a < b < d over DOCS; project onto {a, d}, identity total map
        let f = fixtures::docs_family(&Caps::default());
        let r = Realisation::chain(&[0, 1, 2]);
        let f1 = RealisationMap::new(vec![Some(0), None, Some(1)]);
        let r0 = r.restrict([0, 2].into_iter().collect());
        assert!(is_realisation(&r0, &f));
        let f2 = RealisationMap::identity(2);
        let sw = swap_factorisation(&r, &f1, &f2, &r0);
        assert!(is_realisation(&sw.middle, &f));
        assert!(is_realisation_map(&sw.total, &r, &sw.middle));
        assert!(is_realisation_map(&sw.projection, &sw.middle, &r0));
        assert_eq!(sw.total.then(&sw.projection), f1.then(&f2));
        assert!(sw.middle.order_size() < r.order_size());
    }
}
