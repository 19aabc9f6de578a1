//! Exhaustive check of the form/pair correspondence over small `Z/n`.
//!
//! Both sides are enumerated completely: all `n^3` forms under the flavor's
//! group, and all traceable pairs `(q, r, T)` under change of module basis
//! combined with `tau -> u tau + s`. Orbits are found by marking: each
//! unmarked point in enumeration order becomes a representative and its full
//! orbit is marked. The iteration order is fixed, so reports are
//! reproducible.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::algebra::{PairIsomorphism, TraceableModule};
use crate::correspondence::{
    cyclic_generator, form_to_pair, pair_to_form, CorrespondenceError, CorrespondencePair,
};
use crate::forms::{BQForm, Flavor};
use crate::matrix::{Gl2, Mat2};
use crate::rings::{element_to_json, Ring, RingElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifierError {
    #[error("ring {ring} has {cardinality} elements, above the bound {bound}")]
    BoundExceeded { ring: Ring, cardinality: u64, bound: u64 },
    #[error("exhaustive enumeration needs a finite ring, not {0}")]
    NotFinite(Ring),
    #[error(transparent)]
    Correspondence(#[from] CorrespondenceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifierConfig {
    /// Largest ring size accepted.
    pub max_cardinality: u64,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig { max_cardinality: 5 }
    }
}

impl VerifierConfig {
    fn check(&self, ring: Ring) -> Result<u64, VerifierError> {
        let n = ring.cardinality().ok_or(VerifierError::NotFinite(ring))?;
        if n > self.max_cardinality {
            return Err(VerifierError::BoundExceeded {
                ring,
                cardinality: n,
                bound: self.max_cardinality,
            });
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitEntry<T> {
    pub representative: T,
    pub size: usize,
    /// Discriminants attained on the orbit, sorted.
    pub discriminants: Vec<RingElement>,
    /// Primitive forms on the form side; invertible modules on the pair side.
    pub primitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitCensus<T> {
    pub ring: Ring,
    pub flavor: Flavor,
    /// Number of points enumerated.
    pub total: usize,
    pub orbits: Vec<OrbitEntry<T>>,
    /// Orbit index of every point, in enumeration order.
    pub orbit_of: Vec<usize>,
}

impl<T> OrbitCensus<T> {
    pub fn size_sum(&self) -> usize {
        self.orbits.iter().map(|o| o.size).sum()
    }
}

/// Orbit decomposition of `0..points` under `images(p)`, which must list the
/// whole orbit of `p`. Returns the sorted orbits and the orbit index of
/// every point.
fn mark_orbits(points: usize, images: impl Fn(usize) -> Vec<usize> + Sync) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut orbit_of = vec![usize::MAX; points];
    let mut orbits = Vec::new();
    for p in 0..points {
        if orbit_of[p] != usize::MAX {
            continue;
        }
        let members: BTreeSet<usize> = images(p).into_iter().chain([p]).collect();
        for &m in &members {
            orbit_of[m] = orbits.len();
        }
        orbits.push(members.into_iter().collect::<Vec<_>>());
    }
    (orbits, orbit_of)
}

struct Indexer {
    ring: Ring,
    n: u64,
}

impl Indexer {
    fn digit(&self, x: &RingElement) -> usize {
        x.residue().expect("finite ring") as usize
    }

    fn element(&self, d: usize) -> RingElement {
        self.ring.from_i64(d as i64)
    }

    fn form_index(&self, f: &BQForm) -> usize {
        let n = self.n as usize;
        (self.digit(&f.a) * n + self.digit(&f.b)) * n + self.digit(&f.c)
    }

    fn form(&self, i: usize, flavor: Flavor) -> BQForm {
        let n = self.n as usize;
        BQForm {
            a: self.element(i / (n * n)),
            b: self.element(i / n % n),
            c: self.element(i % n),
            flavor,
        }
    }

    fn matrix_index(&self, t: &Mat2) -> usize {
        let n = self.n as usize;
        let m = &t.m;
        ((self.digit(&m[0][0]) * n + self.digit(&m[0][1])) * n + self.digit(&m[1][0])) * n
            + self.digit(&m[1][1])
    }

    fn matrix(&self, i: usize) -> Mat2 {
        let n = self.n as usize;
        Mat2 {
            m: [
                [self.element(i / (n * n * n)), self.element(i / (n * n) % n)],
                [self.element(i / n % n), self.element(i % n)],
            ],
        }
    }
}

fn sorted_set(xs: impl IntoIterator<Item = RingElement>) -> Vec<RingElement> {
    xs.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Orbits of the flavor's group on all forms over `ring`.
pub fn enumerate_form_orbits(
    ring: Ring,
    flavor: Flavor,
    config: VerifierConfig,
) -> Result<OrbitCensus<BQForm>, VerifierError> {
    let n = config.check(ring)?;
    let ix = Indexer { ring, n };
    let group = flavor.equivalence_group();
    let elements = group.elements(ring).expect("finite ring");
    let points = (n * n * n) as usize;
    let (orbits, orbit_of) = mark_orbits(points, |p| {
        let f = ix.form(p, flavor);
        elements
            .par_iter()
            .map(|t| ix.form_index(&t.act(&f, group)))
            .collect()
    });
    let entries = orbits
        .iter()
        .map(|members| {
            let forms: Vec<BQForm> = members.iter().map(|&i| ix.form(i, flavor)).collect();
            OrbitEntry {
                representative: forms[0].clone(),
                size: members.len(),
                discriminants: sorted_set(forms.iter().map(BQForm::discriminant)),
                primitive: forms[0].is_primitive(),
            }
        })
        .collect();
    Ok(OrbitCensus {
        ring,
        flavor,
        total: points,
        orbits: entries,
        orbit_of,
    })
}

/// All pair isomorphisms `(P, u, s)` compatible with the flavor: `u = det(P)^{-1}`
/// for plain, `u = 1` for twisted, any unit for linear.
pub fn pair_group(ring: Ring, flavor: Flavor) -> Option<Vec<PairIsomorphism>> {
    let gl2 = Gl2::all(ring)?;
    let elems = ring.elements()?;
    let units = ring.units();
    let mut out = Vec::new();
    for p in gl2 {
        let scalars = match flavor {
            Flavor::Plain => vec![p.det().inverse().expect("unit determinant")],
            Flavor::Twisted => vec![ring.one()],
            Flavor::Linear => units.clone(),
        };
        for u in scalars {
            for s in &elems {
                out.push(PairIsomorphism {
                    change_of_basis: p.clone(),
                    unit: u.clone(),
                    shift: s.clone(),
                });
            }
        }
    }
    Some(out)
}

/// Isomorphism classes of traceable pairs over `ring` under [`pair_group`].
///
/// A matrix `T` is traceable over exactly one algebra, `q = -trace T` and
/// `r = det T`, so the pairs are indexed by `T` alone.
pub fn enumerate_pair_classes(
    ring: Ring,
    flavor: Flavor,
    config: VerifierConfig,
) -> Result<OrbitCensus<TraceableModule>, VerifierError> {
    let n = config.check(ring)?;
    let ix = Indexer { ring, n };
    let group = pair_group(ring, flavor).expect("finite ring");
    let points = (n * n * n * n) as usize;
    let (orbits, orbit_of) = mark_orbits(points, |p| {
        let m = TraceableModule::from_matrix(ix.matrix(p));
        group
            .par_iter()
            .map(|iso| ix.matrix_index(&iso.apply(&m).t))
            .collect()
    });
    let mut entries = Vec::with_capacity(orbits.len());
    for members in &orbits {
        let modules: Vec<TraceableModule> = members
            .iter()
            .map(|&i| TraceableModule::from_matrix(ix.matrix(i)))
            .collect();
        let rep = modules[0].clone();
        let primitive = cyclic_generator(&CorrespondencePair::new(rep.clone(), flavor))?.is_some();
        entries.push(OrbitEntry {
            representative: rep,
            size: members.len(),
            discriminants: sorted_set(modules.iter().map(|m| m.algebra.discriminant().value)),
            primitive,
        });
    }
    Ok(OrbitCensus {
        ring,
        flavor,
        total: points,
        orbits: entries,
        orbit_of,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchedOrbit {
    pub form: BQForm,
    pub pair: TraceableModule,
    pub form_orbit_size: usize,
    pub pair_class_size: usize,
    pub discriminants: Vec<RingElement>,
    pub primitive: bool,
}

#[derive(Debug, Clone)]
pub struct BijectionReport {
    pub ring: Ring,
    pub flavor: Flavor,
    pub form_orbits: usize,
    pub pair_classes: usize,
    pub forms_total: usize,
    pub pairs_total: usize,
    pub matches: Vec<MatchedOrbit>,
    pub discrepancies: Vec<String>,
    pub elapsed: Duration,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }

    /// The report as JSON; timing is only included on request so that the
    /// default output is reproducible.
    pub fn to_json(&self, with_timing: bool) -> serde_json::Value {
        let elems = |xs: &[RingElement]| xs.iter().map(element_to_json).collect::<Vec<_>>();
        let matches: Vec<serde_json::Value> = self
            .matches
            .iter()
            .map(|m| {
                json!({
                    "form": m.form.coeffs().map(element_to_json),
                    "pair": {
                        "q": element_to_json(&m.pair.algebra.q),
                        "r": element_to_json(&m.pair.algebra.r),
                        "T": m.pair.t.to_json(),
                    },
                    "form_orbit_size": m.form_orbit_size,
                    "pair_class_size": m.pair_class_size,
                    "discriminants": elems(&m.discriminants),
                    "primitive": m.primitive,
                })
            })
            .collect();
        let mut v = json!({
            "ring": self.ring,
            "flavor": self.flavor,
            "passed": self.passed(),
            "form_orbits": self.form_orbits,
            "pair_classes": self.pair_classes,
            "forms_total": self.forms_total,
            "pairs_total": self.pairs_total,
            "matches": matches,
            "discrepancies": self.discrepancies,
        });
        if with_timing {
            v["elapsed_ms"] = json!(self.elapsed.as_secs_f64() * 1000.0);
        }
        v
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} over {}: {} ({} form orbits of {} forms, {} pair classes of {} pairs)\n",
            self.flavor,
            self.ring,
            if self.passed() { "PASS" } else { "FAIL" },
            self.form_orbits,
            self.forms_total,
            self.pair_classes,
            self.pairs_total
        );
        for m in &self.matches {
            let discs: Vec<String> = m.discriminants.iter().map(|d| d.to_string()).collect();
            out.push_str(&format!(
                "  {:<12} {:>4} <-> T = {:<24} {:>4}  disc {{{}}}{}\n",
                m.form.to_string(),
                m.form_orbit_size,
                m.pair.t.to_string(),
                m.pair_class_size,
                discs.join(", "),
                if m.primitive { "  primitive" } else { "" }
            ));
        }
        for d in &self.discrepancies {
            out.push_str(&format!("  discrepancy: {d}\n"));
        }
        out
    }
}

/// Certify that `form_to_pair` induces a bijection between form orbits and
/// pair classes that preserves discriminants and primitivity.
pub fn verify_bijection(
    ring: Ring,
    flavor: Flavor,
    config: VerifierConfig,
) -> Result<BijectionReport, VerifierError> {
    let start = Instant::now();
    let forms = enumerate_form_orbits(ring, flavor, config)?;
    let pairs = enumerate_pair_classes(ring, flavor, config)?;
    let n = config.check(ring)?;
    let ix = Indexer { ring, n };
    let mut discrepancies = Vec::new();

    if forms.size_sum() != forms.total || forms.total as u64 != n.pow(3) {
        discrepancies.push(format!("form orbit sizes sum to {}, expected {}", forms.size_sum(), n.pow(3)));
    }
    if pairs.size_sum() != pairs.total {
        discrepancies.push(format!("pair class sizes sum to {}, expected {}", pairs.size_sum(), pairs.total));
    }

    let class_of_form = |i: usize| {
        let p = form_to_pair(&ix.form(i, flavor));
        pairs.orbit_of[ix.matrix_index(p.t())]
    };
    // well-definedness on every group element
    let group = flavor.equivalence_group();
    let elements = group.elements(ring).expect("finite ring");
    let bad: Vec<String> = (0..forms.total)
        .into_par_iter()
        .flat_map_iter(|i| {
            let f = ix.form(i, flavor);
            let c = class_of_form(i);
            elements
                .iter()
                .filter_map(|t| {
                    let g = t.act(&f, group);
                    let cg = class_of_form(ix.form_index(&g));
                    (cg != c).then(|| format!("{f} and {g} are equivalent but their pairs are not"))
                })
                .take(1)
                .collect::<Vec<_>>()
        })
        .collect();
    discrepancies.extend(bad);

    let image: Vec<usize> = forms
        .orbits
        .iter()
        .map(|o| class_of_form(ix.form_index(&o.representative)))
        .collect();
    let mut hit = vec![None; pairs.orbits.len()];
    for (fo, &c) in image.iter().enumerate() {
        if let Some(prev) = hit[c] {
            let prev: usize = prev;
            discrepancies.push(format!(
                "form orbits of {} and {} map to the same pair class",
                forms.orbits[prev].representative, forms.orbits[fo].representative
            ));
        } else {
            hit[c] = Some(fo);
        }
    }
    for (c, h) in hit.iter().enumerate() {
        if h.is_none() {
            discrepancies.push(format!(
                "pair class of T = {} is not the image of any form",
                pairs.orbits[c].representative.t
            ));
        }
    }

    let mut matches = Vec::with_capacity(forms.orbits.len());
    for (fo, &c) in image.iter().enumerate() {
        let f = &forms.orbits[fo];
        let p = &pairs.orbits[c];
        if f.discriminants != p.discriminants {
            discrepancies.push(format!("discriminants differ between {} and T = {}", f.representative, p.representative.t));
        }
        if f.primitive != p.primitive {
            discrepancies.push(format!(
                "{} is {}primitive but T = {} is {}invertible",
                f.representative,
                if f.primitive { "" } else { "not " },
                p.representative.t,
                if p.primitive { "" } else { "not " }
            ));
        }
        let back = pair_to_form(&CorrespondencePair::new(p.representative.clone(), flavor))?;
        if forms.orbit_of[ix.form_index(&back)] != fo {
            discrepancies.push(format!("T = {} reads back as {back}, outside the orbit of {}", p.representative.t, f.representative));
        }
        matches.push(MatchedOrbit {
            form: f.representative.clone(),
            pair: p.representative.clone(),
            form_orbit_size: f.size,
            pair_class_size: p.size,
            discriminants: f.discriminants.clone(),
            primitive: f.primitive,
        });
    }

    Ok(BijectionReport {
        ring,
        flavor,
        form_orbits: forms.orbits.len(),
        pair_classes: pairs.orbits.len(),
        forms_total: forms.total,
        pairs_total: pairs.total,
        matches,
        discrepancies,
        elapsed: start.elapsed(),
    })
}
