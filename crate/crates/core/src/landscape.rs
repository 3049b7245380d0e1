//! Fitness landscapes over binary genotypes.
//!
//! All built-in landscapes have strictly positive fitness everywhere and a
//! unique global optimum at the all-ones genotype:
//!
//! * **Sharp peak** — fitness 1 everywhere except the master genotype, which
//!   has fitness σ > 1.  The classic landscape on which the error threshold
//!   has a closed form.
//! * **Royal road** — 1 plus the number of complete all-ones blocks of size
//!   `b`.
//! * **Deceptive trap** — per block of size `b`: `b − ones` if the block is
//!   incomplete, `b + 1` if it is all ones, summed over blocks.  The gradient
//!   inside a block points away from the optimum.
//! * **Custom** — an explicit fitness table for n ≤ 20, loaded from the text
//!   format described at [`FitnessLandscape::parse_custom`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::genotype::Genotype;

/// Default safety factor applied on top of the exact max/min fitness ratio
/// by [`FitnessLandscape::fitness_ratio_bound`].
pub const DEFAULT_RATIO_SAFETY: f64 = 2.0;

/// Maximum genotype length for custom (exhaustive-table) landscapes.
pub const MAX_CUSTOM_LEN: usize = 20;

/// The landscape family and its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum LandscapeKind {
    SharpPeak { sigma: f64 },
    RoyalRoad { block: usize },
    DeceptiveTrap { block: usize },
    Custom(CustomTable),
}

/// Exhaustive fitness table for a custom landscape.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomTable {
    /// Fitness of every genotype, indexed by bit pattern; length 2^n.
    table: Vec<f64>,
    /// Declared upper bound on max/min fitness, from the landscape file.
    ratio_bound: f64,
}

/// A map from genotypes of a fixed length to strictly positive fitness.
#[derive(Clone, Debug, PartialEq)]
pub struct FitnessLandscape {
    n: usize,
    kind: LandscapeKind,
}

impl FitnessLandscape {
    fn check_len(n: usize) -> Result<()> {
        if !(1..=Genotype::MAX_LEN).contains(&n) {
            return Err(Error::Config(format!(
                "genotype length must be in 1..={}, got {n}",
                Genotype::MAX_LEN
            )));
        }
        Ok(())
    }

    fn check_block(n: usize, block: usize) -> Result<()> {
        if block == 0 || n % block != 0 {
            return Err(Error::Config(format!(
                "block size {block} must be positive and divide the genotype length {n}"
            )));
        }
        Ok(())
    }

    /// Sharp-peak landscape: fitness σ at the all-ones master, 1 elsewhere.
    pub fn sharp_peak(n: usize, sigma: f64) -> Result<Self> {
        Self::check_len(n)?;
        if !(sigma > 1.0) || !sigma.is_finite() {
            return Err(Error::Config(format!(
                "sharp-peak height must be finite and > 1, got {sigma}"
            )));
        }
        Ok(FitnessLandscape {
            n,
            kind: LandscapeKind::SharpPeak { sigma },
        })
    }

    /// Royal-road landscape with blocks of size `block`.
    pub fn royal_road(n: usize, block: usize) -> Result<Self> {
        Self::check_len(n)?;
        Self::check_block(n, block)?;
        Ok(FitnessLandscape {
            n,
            kind: LandscapeKind::RoyalRoad { block },
        })
    }

    /// Deceptive-trap landscape with blocks of size `block`.
    pub fn deceptive_trap(n: usize, block: usize) -> Result<Self> {
        Self::check_len(n)?;
        Self::check_block(n, block)?;
        Ok(FitnessLandscape {
            n,
            kind: LandscapeKind::DeceptiveTrap { block },
        })
    }

    /// Custom landscape from an explicit table.
    ///
    /// `entries` lists (genotype, fitness) pairs; genotypes not listed default
    /// to fitness 1.  `ratio_bound` must strictly exceed the realized
    /// max/min fitness ratio; it is never estimated.
    pub fn custom(n: usize, entries: &[(Genotype, f64)], ratio_bound: f64) -> Result<Self> {
        Self::check_len(n)?;
        if n > MAX_CUSTOM_LEN {
            return Err(Error::Config(format!(
                "custom landscapes support n ≤ {MAX_CUSTOM_LEN}, got {n}"
            )));
        }
        let mut table = vec![1.0f64; 1usize << n];
        let mut seen = vec![false; 1usize << n];
        for (g, fitness) in entries {
            if g.len() != n {
                return Err(Error::Config(format!(
                    "table entry {g} has length {}, landscape has n = {n}",
                    g.len()
                )));
            }
            if !fitness.is_finite() || *fitness <= 0.0 {
                return Err(Error::Config(format!(
                    "fitness of {g} must be finite and > 0, got {fitness}"
                )));
            }
            let idx = g.bits() as usize;
            if seen[idx] {
                return Err(Error::Config(format!("duplicate table entry for {g}")));
            }
            seen[idx] = true;
            table[idx] = *fitness;
        }
        let max = table.iter().cloned().fold(f64::MIN, f64::max);
        let min = table.iter().cloned().fold(f64::MAX, f64::min);
        if !(ratio_bound > max / min) {
            return Err(Error::Config(format!(
                "ratio_bound {ratio_bound} does not exceed the realized fitness ratio {}",
                max / min
            )));
        }
        Ok(FitnessLandscape {
            n,
            kind: LandscapeKind::Custom(CustomTable { table, ratio_bound }),
        })
    }

    /// Parses the custom landscape text format:
    ///
    /// ```text
    /// n 4
    /// 0101 2.5
    /// 1111 9.0
    /// ratio_bound 10.0
    /// ```
    ///
    /// First non-empty line declares `n`, then one `<bitstring> <fitness>`
    /// line per entry (missing genotypes default to fitness 1.0), and the
    /// final line must declare `ratio_bound`.
    pub fn parse_custom(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty landscape file".to_string()))?;
        let n: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["n", v] => v
                .parse()
                .map_err(|_| Error::Config(format!("invalid genotype length {v:?}")))?,
            _ => {
                return Err(Error::Config(format!(
                    "first line must be `n <int>`, got {header:?}"
                )))
            }
        };
        let mut entries = Vec::new();
        let mut ratio_bound = None;
        for line in lines {
            if ratio_bound.is_some() {
                return Err(Error::Config(format!(
                    "unexpected line {line:?} after ratio_bound"
                )));
            }
            match line.split_whitespace().collect::<Vec<_>>()[..] {
                ["ratio_bound", v] => {
                    let b: f64 = v
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid ratio_bound {v:?}")))?;
                    ratio_bound = Some(b);
                }
                [bits, fitness] => {
                    let g = Genotype::from_bitstring(bits)?;
                    let f: f64 = fitness
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid fitness {fitness:?}")))?;
                    entries.push((g, f));
                }
                _ => {
                    return Err(Error::Config(format!(
                        "expected `<bitstring> <fitness>` or `ratio_bound <real>`, got {line:?}"
                    )))
                }
            }
        }
        let ratio_bound = ratio_bound.ok_or_else(|| {
            Error::Config("landscape file must end with a `ratio_bound <real>` line".to_string())
        })?;
        Self::custom(n, &entries, ratio_bound)
    }

    /// Genotype length this landscape is defined over.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &LandscapeKind {
        &self.kind
    }

    /// True when fitness depends only on the Hamming distance to the master
    /// genotype, so the landscape reduces exactly to error-class coordinates.
    pub fn is_class_symmetric(&self) -> bool {
        matches!(self.kind, LandscapeKind::SharpPeak { .. })
    }

    /// Fitness of `g`.  Deterministic and strictly positive.
    pub fn evaluate(&self, g: &Genotype) -> Result<f64> {
        if g.len() != self.n {
            return Err(Error::Config(format!(
                "genotype length {} does not match landscape length {}",
                g.len(),
                self.n
            )));
        }
        Ok(self.eval_checked(g))
    }

    fn eval_checked(&self, g: &Genotype) -> f64 {
        match &self.kind {
            LandscapeKind::SharpPeak { sigma } => {
                if g.count_ones() as usize == self.n {
                    *sigma
                } else {
                    1.0
                }
            }
            LandscapeKind::RoyalRoad { block } => {
                let mut complete = 0usize;
                for start in (0..self.n).step_by(*block) {
                    let bits = g.bits() >> start & Genotype::word_mask(*block);
                    if bits == Genotype::word_mask(*block) {
                        complete += 1;
                    }
                }
                1.0 + complete as f64
            }
            LandscapeKind::DeceptiveTrap { block } => {
                let mut total = 0usize;
                for start in (0..self.n).step_by(*block) {
                    let ones = (g.bits() >> start & Genotype::word_mask(*block)).count_ones()
                        as usize;
                    total += if ones < *block { *block - ones } else { *block + 1 };
                }
                total as f64
            }
            LandscapeKind::Custom(custom) => custom.table[g.bits() as usize],
        }
    }

    /// Maximum fitness over all genotypes.
    pub fn max_fitness(&self) -> f64 {
        match &self.kind {
            LandscapeKind::SharpPeak { sigma } => *sigma,
            LandscapeKind::RoyalRoad { block } => 1.0 + (self.n / block) as f64,
            LandscapeKind::DeceptiveTrap { block } => ((self.n / block) * (block + 1)) as f64,
            LandscapeKind::Custom(custom) => {
                custom.table.iter().cloned().fold(f64::MIN, f64::max)
            }
        }
    }

    /// Minimum fitness over all genotypes.
    pub fn min_fitness(&self) -> f64 {
        match &self.kind {
            LandscapeKind::SharpPeak { .. } | LandscapeKind::RoyalRoad { .. } => 1.0,
            // worst block score is 1, reached at ones = block − 1
            LandscapeKind::DeceptiveTrap { block } => (self.n / block) as f64,
            LandscapeKind::Custom(custom) => {
                custom.table.iter().cloned().fold(f64::MAX, f64::min)
            }
        }
    }

    /// An upper bound `c` on the max/min fitness ratio: exactly
    /// `(max/min) × safety` for the analytic kinds, the declared bound for
    /// custom tables (which must already include any margin).
    pub fn fitness_ratio_bound(&self, safety: f64) -> Result<f64> {
        if !(safety >= 1.0) || !safety.is_finite() {
            return Err(Error::Config(format!(
                "ratio safety factor must be finite and ≥ 1, got {safety}"
            )));
        }
        match &self.kind {
            LandscapeKind::Custom(custom) => Ok(custom.ratio_bound),
            _ => Ok(self.max_fitness() / self.min_fitness() * safety),
        }
    }

    /// The genotype of maximal fitness: all-ones for every built-in kind.
    ///
    /// Custom tables do not declare their optimum, so the query is
    /// unsupported for them.
    pub fn master_genotype(&self) -> Result<Genotype> {
        match self.kind {
            LandscapeKind::Custom(_) => Err(Error::UnsupportedQuery(
                "custom landscapes do not declare a master genotype".to_string(),
            )),
            _ => Ok(Genotype::ones(self.n)),
        }
    }

    /// Short label for report output.
    pub fn label(&self) -> String {
        match &self.kind {
            LandscapeKind::SharpPeak { sigma } => format!("sharp_peak(n={}, sigma={sigma})", self.n),
            LandscapeKind::RoyalRoad { block } => format!("royal_road(n={}, b={block})", self.n),
            LandscapeKind::DeceptiveTrap { block } => {
                format!("deceptive_trap(n={}, b={block})", self.n)
            }
            LandscapeKind::Custom(_) => format!("custom(n={})", self.n),
        }
    }
}
