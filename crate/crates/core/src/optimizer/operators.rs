use rand::seq::index;
use rand::Rng;

use super::chromosome::{random_level, Chromosome};
use crate::error::{Error, Result};

/// k-point crossover: the child copies `a` up to the first cut, then `b` up to the
/// next, alternating. Cuts are distinct loci drawn uniformly from `1..len`.
pub fn crossover<R: Rng + ?Sized>(a: &Chromosome, b: &Chromosome, points: usize, rng: &mut R) -> Result<Chromosome> {
    if a.len() != b.len() {
        return Err(Error::Encoding(format!("cannot cross chromosomes of length {} and {}", a.len(), b.len())));
    }
    if points >= a.len().max(1) {
        return Err(Error::Encoding(format!("{points} crossover points need a chromosome longer than {}", a.len())));
    }
    let mut cuts: Vec<usize> = index::sample(rng, a.len() - 1, points).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    crossover_at(a, b, &cuts)
}

/// Crossover with explicit, sorted, distinct cut loci in `1..len`.
pub fn crossover_at(a: &Chromosome, b: &Chromosome, cuts: &[usize]) -> Result<Chromosome> {
    if a.len() != b.len() {
        return Err(Error::Encoding(format!("cannot cross chromosomes of length {} and {}", a.len(), b.len())));
    }
    if cuts.windows(2).any(|w| w[0] >= w[1]) || cuts.iter().any(|&c| c == 0 || c >= a.len()) {
        return Err(Error::Encoding(format!("invalid cut positions {cuts:?}")));
    }
    let mut genes = Vec::with_capacity(a.len());
    let mut from_a = true;
    let mut start = 0;
    for &end in cuts.iter().chain(std::iter::once(&a.len())) {
        let src = if from_a { a } else { b };
        genes.extend_from_slice(&src.genes()[start..end]);
        from_a = !from_a;
        start = end;
    }
    Ok(Chromosome::from_genes_unchecked(genes))
}

/// Resamples exactly `count` distinct components (out of the `2·len` red/blue values)
/// uniformly from `1..=10`.
pub fn mutate<R: Rng + ?Sized>(c: &Chromosome, count: usize, rng: &mut R) -> Result<Chromosome> {
    let components = 2 * c.len();
    if count > components {
        return Err(Error::Encoding(format!(
            "cannot mutate {count} components of a {components}-component chromosome"
        )));
    }
    let mut out = c.clone();
    for k in index::sample(rng, components, count) {
        out.set_component(k, random_level(rng));
    }
    Ok(out)
}
