//! Gene partitions and restricted-growth-string enumeration.
//!
//! Genes are 0-based internally. Everything user-facing (display, parsing,
//! serialization) uses 1-based gene indices.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GrnError, Result};

/// A partition of `{0, .., n-1}` kept in canonical form: classes ordered by
/// their smallest member, members ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenePartition {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl GenePartition {
    /// Builds a partition from arbitrary classes of 0-based genes.
    pub fn from_classes(n: usize, classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (c, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(GrnError::InvalidPartition("empty class".into()));
            }
            for &g in class {
                if g >= n {
                    return Err(GrnError::InvalidPartition(format!(
                        "gene {} out of range 1..={n}",
                        g + 1
                    )));
                }
                if labels[g] != usize::MAX {
                    return Err(GrnError::InvalidPartition(format!(
                        "gene {} appears in more than one class",
                        g + 1
                    )));
                }
                labels[g] = c;
            }
        }
        if let Some(g) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(GrnError::InvalidPartition(format!(
                "gene {} is not covered",
                g + 1
            )));
        }
        Ok(Self::from_labels(&labels))
    }

    /// Builds a partition from a label per gene; genes sharing a label share a
    /// class. Labels need not be contiguous.
    pub fn from_labels<L: PartialEq>(labels: &[L]) -> Self {
        let mut reps: Vec<usize> = Vec::new();
        let mut class_of = Vec::with_capacity(labels.len());
        for (g, l) in labels.iter().enumerate() {
            let c = match reps.iter().position(|&r| labels[r] == *l) {
                Some(c) => c,
                None => {
                    reps.push(g);
                    reps.len() - 1
                }
            };
            class_of.push(c);
        }
        let mut classes = vec![Vec::new(); reps.len()];
        for (g, &c) in class_of.iter().enumerate() {
            classes[c].push(g);
        }
        Self { classes, class_of }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            classes: (0..n).map(|g| vec![g]).collect(),
            class_of: (0..n).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        Self::from_labels(&vec![0u8; n])
    }

    /// Parses `"1,2,3|4,5"` (1-based genes). Whitespace is ignored.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut classes = Vec::new();
        for part in text.split('|') {
            let mut class = Vec::new();
            for tok in part.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                let g: usize = tok.parse().map_err(|_| {
                    GrnError::InvalidPartition(format!("'{tok}' is not a gene index"))
                })?;
                if g == 0 {
                    return Err(GrnError::InvalidPartition(
                        "gene indices are 1-based".into(),
                    ));
                }
                class.push(g - 1);
            }
            classes.push(class);
        }
        Self::from_classes(n, classes)
    }

    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class(&self, c: usize) -> &[usize] {
        &self.classes[c]
    }

    pub fn class_of(&self, gene: usize) -> usize {
        self.class_of[gene]
    }

    /// The gene→class map; also the restricted growth string of the partition.
    pub fn labels(&self) -> &[usize] {
        &self.class_of
    }

    /// Smallest gene of class `c`.
    pub fn representative(&self, c: usize) -> usize {
        self.classes[c][0]
    }

    pub fn is_singletons(&self) -> bool {
        self.classes.len() == self.class_of.len()
    }

    /// True iff every class of `self` lies inside a class of `other`.
    pub fn refines(&self, other: &GenePartition) -> bool {
        assert_eq!(self.n(), other.n(), "partitions over different gene sets");
        self.classes.iter().all(|class| {
            let target = other.class_of[class[0]];
            class.iter().all(|&g| other.class_of[g] == target)
        })
    }

    /// Finest partition coarser than both (transitive closure of the union).
    pub fn join(&self, other: &GenePartition) -> GenePartition {
        assert_eq!(self.n(), other.n(), "partitions over different gene sets");
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for p in [self, other] {
            for class in &p.classes {
                for &g in &class[1..] {
                    let (a, b) = (find(&mut parent, class[0]), find(&mut parent, g));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|g| find(&mut parent, g)).collect();
        GenePartition::from_labels(&roots)
    }

    /// 1-based classes, for reports.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.classes
            .iter()
            .map(|c| c.iter().map(|g| g + 1).collect())
            .collect()
    }
}

impl fmt::Display for GenePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, class) in self.classes.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            for (m, g) in class.iter().enumerate() {
                if m > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", g + 1)?;
            }
        }
        Ok(())
    }
}

impl Serialize for GenePartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GenePartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let classes: Vec<Vec<usize>> = Vec::deserialize(d)?;
        let n = classes.iter().map(Vec::len).sum();
        let zero_based = classes
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|g| g.checked_sub(1).ok_or_else(|| serde::de::Error::custom("gene index 0")))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        GenePartition::from_classes(n, zero_based).map_err(serde::de::Error::custom)
    }
}

/// Lazily enumerates every partition refining `bound`, as restricted growth
/// strings in lexicographic order. The all-singletons partition is last.
pub struct RefiningPartitions {
    bound: Vec<usize>,
    labels: Vec<usize>,
    started: bool,
    done: bool,
}

impl RefiningPartitions {
    pub fn new(bound: &GenePartition) -> Self {
        Self {
            bound: bound.labels().to_vec(),
            labels: vec![0; bound.n()],
            started: false,
            done: false,
        }
    }

    /// Class representatives of `labels[..len]`: `reps[c]` is the first gene with label `c`.
    fn reps(&self, len: usize) -> Vec<usize> {
        let mut reps = Vec::new();
        for g in 0..len {
            if self.labels[g] == reps.len() {
                reps.push(g);
            }
        }
        reps
    }

    fn allowed(&self, reps: &[usize], gene: usize, label: usize) -> bool {
        label == reps.len() || (label < reps.len() && self.bound[reps[label]] == self.bound[gene])
    }

    /// Fills `labels[from..]` with the smallest admissible suffix.
    fn fill_from(&mut self, from: usize) {
        let mut reps = self.reps(from);
        for g in from..self.labels.len() {
            let label = (0..=reps.len())
                .find(|&l| self.allowed(&reps, g, l))
                .expect("a new label is always allowed");
            self.labels[g] = label;
            if label == reps.len() {
                reps.push(g);
            }
        }
    }
}

impl Iterator for RefiningPartitions {
    type Item = GenePartition;

    fn next(&mut self) -> Option<GenePartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill_from(0);
            return Some(GenePartition::from_labels(&self.labels));
        }
        for g in (0..self.labels.len()).rev() {
            let reps = self.reps(g);
            let next = (self.labels[g] + 1..=reps.len()).find(|&l| self.allowed(&reps, g, l));
            if let Some(label) = next {
                self.labels[g] = label;
                self.fill_from(g + 1);
                return Some(GenePartition::from_labels(&self.labels));
            }
        }
        self.done = true;
        None
    }
}

/// Bell number B(n), saturating.
pub fn bell_number(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last.saturating_add(*v));
        }
        row = next;
    }
    row[0]
}
