//! Importance mixing: rejection-based reuse of evaluated samples from
//! previous generations so that the combined population is still distributed
//! according to the new search pdf.
//!
//! `mix` works against the single previous generation, `mix_extended`
//! against an archive of the last K generations, and `mix_sun_variant`
//! reproduces the original exhaust-then-refill schedule, kept only as a
//! biased negative control for the verification suite.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CoreError, Result};
use crate::gaussian::GaussianPdf;

/// Where a sample in a mixed generation came from.
/// `ReusedEim(k)` carries the 1-based archive entry index, k >= 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Fresh,
    ReusedIm,
    ReusedEim(usize),
}

/// A population of parameter vectors together with fitness and provenance.
/// Fresh samples carry `None` fitness until the caller evaluates them.
#[derive(Debug, Clone)]
pub struct Generation {
    pub samples: Vec<Vec<f64>>,
    pub fitness: Vec<Option<f64>>,
    pub provenance: Vec<Provenance>,
    pub pdf: GaussianPdf,
}

impl Generation {
    /// A fully fresh generation sampled directly from `pdf`.
    pub fn sample_direct<R: Rng + ?Sized>(pdf: &GaussianPdf, rng: &mut R, n: usize) -> Self {
        let samples = pdf.sample(rng, n);
        Generation {
            fitness: vec![None; n],
            provenance: vec![Provenance::Fresh; n],
            samples,
            pdf: pdf.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Indices whose fitness is still unset (exactly the Fresh samples after mixing).
    pub fn unevaluated_indices(&self) -> Vec<usize> {
        self.fitness
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.is_none().then_some(i))
            .collect()
    }

    /// Fitness as a plain vector; errors if any entry is unset.
    pub fn fitness_values(&self) -> Result<Vec<f64>> {
        self.fitness
            .iter()
            .enumerate()
            .map(|(i, f)| f.ok_or(CoreError::MissingFitness { index: i }))
            .collect()
    }

    fn ensure_evaluated(&self) -> Result<()> {
        if let Some(i) = self.fitness.iter().position(|f| f.is_none()) {
            return Err(CoreError::MissingFitness { index: i });
        }
        Ok(())
    }
}

/// Ring buffer of the last K `(pdf, generation)` pairs, most recent first.
#[derive(Debug, Clone)]
pub struct Archive {
    entries: VecDeque<(GaussianPdf, Generation)>,
    capacity: usize,
}

impl Archive {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "archive capacity must be at least 1");
        Archive { entries: VecDeque::new(), capacity }
    }

    pub fn push(&mut self, pdf: GaussianPdf, generation: Generation) {
        self.entries.push_front((pdf, generation));
        self.entries.truncate(self.capacity);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Entries most recent first.
    pub fn iter(&self) -> impl Iterator<Item = &(GaussianPdf, Generation)> {
        self.entries.iter()
    }

    pub fn most_recent(&self) -> Option<&(GaussianPdf, Generation)> {
        self.entries.front()
    }
}

/// Result of one mixing call.
#[derive(Debug, Clone)]
pub struct MixOutcome {
    pub generation: Generation,
    pub reused_im: usize,
    pub reused_eim: usize,
    pub fresh_count: usize,
}

impl MixOutcome {
    pub fn reused_count(&self) -> usize {
        self.reused_im + self.reused_eim
    }

    fn from_generation(generation: Generation) -> Self {
        let mut reused_im = 0;
        let mut reused_eim = 0;
        let mut fresh_count = 0;
        for p in &generation.provenance {
            match p {
                Provenance::Fresh => fresh_count += 1,
                Provenance::ReusedIm => reused_im += 1,
                Provenance::ReusedEim(_) => reused_eim += 1,
            }
        }
        MixOutcome { generation, reused_im, reused_eim, fresh_count }
    }
}

/// Accept an old sample with probability min(1, p_new(z)/p_old(z)),
/// evaluated as exp(min(0, log-ratio)).
pub fn rule1_accept(log_ratio_new_over_old: f64, u: f64) -> bool {
    u < log_ratio_new_over_old.min(0.0).exp()
}

/// Accept a fresh sample with probability max(0, 1 - p_old(z)/p_new(z)).
pub fn rule2_accept(log_ratio_new_over_old: f64, u: f64) -> bool {
    u < (1.0 - (-log_ratio_new_over_old).min(0.0).exp()).max(0.0)
}

struct Builder {
    samples: Vec<Vec<f64>>,
    fitness: Vec<Option<f64>>,
    provenance: Vec<Provenance>,
    target: usize,
}

impl Builder {
    fn new(target: usize) -> Self {
        Builder {
            samples: Vec::with_capacity(target + 1),
            fitness: Vec::with_capacity(target + 1),
            provenance: Vec::with_capacity(target + 1),
            target,
        }
    }

    fn push(&mut self, sample: Vec<f64>, fitness: Option<f64>, provenance: Provenance) {
        self.samples.push(sample);
        self.fitness.push(fitness);
        self.provenance.push(provenance);
    }

    fn len(&self) -> usize {
        self.samples.len()
    }

    fn finish<R: Rng + ?Sized>(mut self, p_new: &GaussianPdf, rng: &mut R) -> Generation {
        if self.len() > self.target {
            // Alg. 2 line 16: remove a randomly chosen sample
            let victim = rng.random_range(0..self.len());
            self.samples.swap_remove(victim);
            self.fitness.swap_remove(victim);
            self.provenance.swap_remove(victim);
        }
        while self.len() < self.target {
            // Alg. 2 line 17: fill the generation sampling from p_new
            self.push(p_new.sample_one(rng), None, Provenance::Fresh);
        }
        Generation {
            samples: self.samples,
            fitness: self.fitness,
            provenance: self.provenance,
            pdf: p_new.clone(),
        }
    }
}

/// One inner pass of Algorithm 2 over an old generation, pushing accepted
/// samples into `out`. Returns early once the target size is reached.
fn mix_pass<R: Rng + ?Sized>(
    p_new: &GaussianPdf,
    p_old: &GaussianPdf,
    g_old: &Generation,
    provenance: Provenance,
    out: &mut Builder,
    rng: &mut R,
) {
    let mut order: Vec<usize> = (0..g_old.len()).collect();
    order.shuffle(rng);
    for &i in &order {
        let rand1: f64 = rng.random();
        let rand2: f64 = rng.random();
        let z = &g_old.samples[i];
        let lr = p_new.log_density_unchecked(z) - p_old.log_density_unchecked(z);
        if rule1_accept(lr, rand1) {
            out.push(z.clone(), g_old.fitness[i], provenance);
        }
        let z_fresh = p_new.sample_one(rng);
        let lr_fresh =
            p_new.log_density_unchecked(&z_fresh) - p_old.log_density_unchecked(&z_fresh);
        if rule2_accept(lr_fresh, rand2) {
            out.push(z_fresh, None, Provenance::Fresh);
        }
        if out.len() >= out.target {
            return;
        }
    }
}

fn check_pair(p_new: &GaussianPdf, p_old: &GaussianPdf, g_old: &Generation, n: usize) -> Result<()> {
    if p_new.dim() != p_old.dim() {
        return Err(CoreError::DimensionMismatch { expected: p_new.dim(), actual: p_old.dim() });
    }
    if g_old.len() != n {
        return Err(CoreError::GenerationSizeMismatch { expected: n, actual: g_old.len() });
    }
    g_old.ensure_evaluated()
}

/// Importance mixing against the previous generation (Algorithm 2).
pub fn mix<R: Rng + ?Sized>(
    p_new: &GaussianPdf,
    p_old: &GaussianPdf,
    g_old: &Generation,
    rng: &mut R,
    n: usize,
) -> Result<MixOutcome> {
    check_pair(p_new, p_old, g_old, n)?;
    let mut out = Builder::new(n);
    mix_pass(p_new, p_old, g_old, Provenance::ReusedIm, &mut out, rng);
    Ok(MixOutcome::from_generation(out.finish(p_new, rng)))
}

/// Extended importance mixing over a K-generation archive (Algorithm 3).
/// Entries are visited most recent first; acceptances from entry k >= 2 are
/// tagged `ReusedEim(k)`.
pub fn mix_extended<R: Rng + ?Sized>(
    p_new: &GaussianPdf,
    archive: &Archive,
    rng: &mut R,
    n: usize,
) -> Result<MixOutcome> {
    if archive.is_empty() {
        return Err(CoreError::EmptyArchive);
    }
    let mut out = Builder::new(n);
    for (k, (p_old, g_old)) in archive.iter().enumerate() {
        check_pair(p_new, p_old, g_old, n)?;
        let provenance = if k == 0 { Provenance::ReusedIm } else { Provenance::ReusedEim(k + 1) };
        mix_pass(p_new, p_old, g_old, provenance, &mut out, rng);
        if out.len() >= n {
            break;
        }
    }
    Ok(MixOutcome::from_generation(out.finish(p_new, rng)))
}

/// The original exhaust-then-refill schedule: run Rule 1 over the whole old
/// generation first, then repeat Rule 2 until the generation is full.
/// Negative control only; the alternation in `mix` is the unbiased procedure.
pub fn mix_sun_variant<R: Rng + ?Sized>(
    p_new: &GaussianPdf,
    p_old: &GaussianPdf,
    g_old: &Generation,
    rng: &mut R,
    n: usize,
) -> Result<MixOutcome> {
    check_pair(p_new, p_old, g_old, n)?;
    let mut out = Builder::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for &i in &order {
        if out.len() >= n {
            break;
        }
        let u: f64 = rng.random();
        let z = &g_old.samples[i];
        let lr = p_new.log_density_unchecked(z) - p_old.log_density_unchecked(z);
        if rule1_accept(lr, u) {
            out.push(z.clone(), g_old.fitness[i], Provenance::ReusedIm);
        }
    }
    // guard against a vanishing Rule 2 acceptance rate when the pdfs nearly coincide
    let mut trials: u64 = 0;
    while out.len() < n && trials < 10_000_000 {
        trials += 1;
        let u: f64 = rng.random();
        let z = p_new.sample_one(rng);
        let lr = p_new.log_density_unchecked(&z) - p_old.log_density_unchecked(&z);
        if rule2_accept(lr, u) {
            out.push(z, None, Provenance::Fresh);
        }
    }
    Ok(MixOutcome::from_generation(out.finish(p_new, rng)))
}
