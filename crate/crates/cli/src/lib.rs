//! Verification jobs over the thetalab library, producing canonical JSON
//! reports.

mod job;
mod report;

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use thetalab_core::enumeration::CoefficientCache;
use thetalab_core::jacobi::{heat_check, venkov_constant};
use thetalab_core::lattice::registry::{Registry, RANK24_PAIRS};
use thetalab_core::lattice::spec::LatticeSpec;
use thetalab_core::lattice::{direct_sum, minimum_norm, root_system, stable_eq_hyp_predicate_for, validate};
use thetalab_core::theta::{
    curated_genus4_targets, first_difference, k_identity_check, linear_independence_rank, series_difference,
    series_product, siegel_restrict, theta_sampled, theta_truncated, ThetaTruncation,
};
use thetalab_core::{Engine, GramTarget, Lattice};

pub use job::{CliError, JobKind, LatticeRef, VerificationJob};
pub use report::{rational, Report, Status, REPORT_SCHEMA};

/// Trace bound used when a job does not give one.
pub fn default_trace_bound(genus: usize) -> i64 {
    match genus {
        0 | 1 => 10,
        2 => 8,
        _ => 6,
    }
}

/// Runs a job with a fresh engine whose cache directory comes from the
/// environment.
pub fn run(job: &VerificationJob) -> Result<Report, CliError> {
    let engine = Engine::new(job.jobs).with_cache(CoefficientCache::from_env());
    run_with_engine(job, &engine)
}

pub fn run_with_engine(job: &VerificationJob, engine: &Engine) -> Result<Report, CliError> {
    job.validate()?;
    let registry = match &job.registry_dir {
        Some(dir) => Registry::with_dir(dir)?,
        None => Registry::builtin(),
    };
    let ctx = Ctx { engine, registry, job };
    let (status, payload) = match job.kind {
        JobKind::Validate => ctx.validate()?,
        JobKind::Shells => ctx.shells()?,
        JobKind::Theta => ctx.theta()?,
        JobKind::Diff => ctx.diff()?,
        JobKind::Product => ctx.product()?,
        JobKind::Restrict => ctx.restrict()?,
        JobKind::Venkov => ctx.venkov()?,
        JobKind::Heat => ctx.heat()?,
        JobKind::Witt => ctx.witt()?,
        JobKind::Schottky => ctx.schottky()?,
        JobKind::A4Separation => ctx.a4_separation()?,
        JobKind::KIdentity => ctx.k_identity()?,
        JobKind::Independence => ctx.independence()?,
        JobKind::HypPredicate => ctx.hyp_predicate()?,
        JobKind::RegistryList => ctx.registry_list()?,
    };
    Ok(Report { job: job.echo(), status, payload })
}

/// Reads genus targets, one key such as `4:2,-1,0,0,2,-1,0,2,-1,2` per line;
/// blank lines and `#` comments are skipped.
pub fn read_tset(path: &Path) -> Result<Vec<GramTarget>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            out.push(line.parse::<GramTarget>()?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{}: no targets", path.display())));
    }
    Ok(out)
}

/// Gram matrix of A4 in the simple-root basis.
pub fn a4_target() -> GramTarget {
    GramTarget::from_rows(&[[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]]).expect("A4 is valid")
}

type Outcome = Result<(Status, Value), CliError>;

struct Ctx<'a> {
    engine: &'a Engine,
    registry: Registry,
    job: &'a VerificationJob,
}

impl Ctx<'_> {
    fn resolve(&self, r: &LatticeRef) -> Result<Lattice, CliError> {
        match r {
            LatticeRef::Name(name) => Ok(self.registry.resolve(name)?),
            LatticeRef::SpecFile(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                let spec = LatticeSpec::parse(&text)?;
                Ok(spec.build(&|n| self.registry.resolve(n))?)
            }
        }
    }

    fn named(&self, name: &str) -> Result<Lattice, CliError> {
        Ok(self.registry.resolve(name)?)
    }

    fn single(&self) -> Result<Lattice, CliError> {
        match self.job.lattices.as_slice() {
            [one] => self.resolve(one),
            [] => Err(CliError::Input(format!("{} needs --lattice or --spec", self.job.kind))),
            _ => Err(CliError::Input(format!("{} takes a single lattice", self.job.kind))),
        }
    }

    fn pair_or(&self, default: Option<(&str, &str)>) -> Result<(Lattice, Lattice), CliError> {
        match (&self.job.pair, default) {
            (Some((a, b)), _) => Ok((self.named(a)?, self.named(b)?)),
            (None, Some((a, b))) => Ok((self.named(a)?, self.named(b)?)),
            (None, None) => Err(CliError::Input(format!("{} needs --pair A:B", self.job.kind))),
        }
    }

    /// The given pair, or all five rank-24 pairs.
    fn rank24_pairs(&self) -> Result<Vec<(Lattice, Lattice)>, CliError> {
        match &self.job.pair {
            Some((a, b)) => Ok(vec![(self.named(a)?, self.named(b)?)]),
            None => RANK24_PAIRS.iter().map(|(a, b, _)| Ok((self.named(a)?, self.named(b)?))).collect(),
        }
    }

    /// The given lattices, or all rank-24 pair members.
    fn lattices_or_rank24(&self) -> Result<Vec<Lattice>, CliError> {
        if self.job.lattices.is_empty() {
            RANK24_PAIRS.iter().flat_map(|(a, b, _)| [a, b]).map(|n| self.named(n)).collect()
        } else {
            self.job.lattices.iter().map(|r| self.resolve(r)).collect()
        }
    }

    fn genus(&self, default: usize) -> usize {
        self.job.genus.unwrap_or(default)
    }

    fn tset(&self) -> Result<Vec<GramTarget>, CliError> {
        match &self.job.tset {
            Some(p) => read_tset(p),
            None => Ok(curated_genus4_targets()),
        }
    }

    /// Full truncation, or the curated sample at genus 4 without a bound.
    fn series(&self, lattice: &Lattice, genus: usize) -> Result<ThetaTruncation, CliError> {
        if self.job.tset.is_some() || (genus >= 4 && self.job.trace_bound.is_none()) {
            let targets = self.tset()?;
            Ok(theta_sampled(self.engine, lattice, genus, &targets)?)
        } else {
            let bound = self.job.trace_bound.unwrap_or_else(|| default_trace_bound(genus));
            Ok(theta_truncated(self.engine, lattice, genus, bound)?)
        }
    }

    fn validate(&self) -> Outcome {
        let l = self.single()?;
        let v = validate(&l);
        let rs = if v.positive_definite { root_system(&l).ok() } else { None };
        let payload = json!({
            "lattice": report::lattice_header(&l),
            "symmetric": v.symmetric,
            "even": v.even,
            "det": report::big(&v.det),
            "positive_definite": v.positive_definite,
            "min_norm": v.min_norm,
            "root_count": v.root_count,
            "root_system": rs.as_ref().map(report::root_system),
            "even_unimodular": v.is_even_unimodular(),
        });
        Ok((Status::from_check(v.is_even_unimodular()), payload))
    }

    fn shells(&self) -> Outcome {
        let l = self.single()?;
        let bound = self.job.norm_bound.unwrap_or(8);
        let table = self.engine.enumerate_shells(&l, bound, false)?;
        let counts: Vec<Value> = table.shells.iter().map(|(n, s)| json!([n, report::big(&s.count)])).collect();
        Ok((Status::Computed, json!({ "lattice": report::lattice_header(&l), "norm_bound": bound, "counts": counts })))
    }

    fn theta(&self) -> Outcome {
        let l = self.single()?;
        let s = self.series(&l, self.genus(1))?;
        Ok((Status::Computed, json!({ "lattice": report::lattice_header(&l), "series": report::series(&s) })))
    }

    fn diff(&self) -> Outcome {
        let (a, b) = self.pair_or(None)?;
        let genus = self.genus(1);
        let d = series_difference(&self.series(&a, genus)?, &self.series(&b, genus)?)?;
        let first = d.series.coeffs.iter().next().map(|(t, c)| json!({ "target": report::target(t), "difference": report::big(c) }));
        let payload = json!({
            "first": report::lattice_header(&a),
            "second": report::lattice_header(&b),
            "is_zero": d.is_zero(),
            "first_nonzero": first,
            "series": report::series(&d.series),
        });
        Ok((Status::Computed, payload))
    }

    fn product(&self) -> Outcome {
        let (a, b) = self.pair_or(Some(("E8", "E8")))?;
        let genus = self.genus(1);
        let bound = self.job.trace_bound.unwrap_or_else(|| default_trace_bound(genus));
        let fa = theta_truncated(self.engine, &a, genus, bound)?;
        let fb = theta_truncated(self.engine, &b, genus, bound)?;
        let prod = series_product(&fa, &fb)?;
        let sum = theta_truncated(self.engine, &direct_sum(&a, &b), genus, bound)?;
        let diff = first_difference(&prod, &sum);
        let payload = json!({
            "first": report::lattice_header(&a),
            "second": report::lattice_header(&b),
            "genus": genus,
            "trace_bound": bound,
            "equals_direct_sum": diff.is_none(),
            "first_difference": diff.map(difference_json),
            "series": report::series(&prod),
        });
        Ok((Status::from_check(payload["equals_direct_sum"] == json!(true)), payload))
    }

    fn restrict(&self) -> Outcome {
        let l = self.single()?;
        let genus = self.genus(1);
        let bound = self.job.trace_bound.unwrap_or_else(|| default_trace_bound(genus + 1));
        let upper = theta_truncated(self.engine, &l, genus + 1, bound)?;
        let restricted = siegel_restrict(&upper)?;
        let lower = theta_truncated(self.engine, &l, genus, bound)?;
        let diff = first_difference(&restricted, &lower);
        let ok = diff.is_none();
        let payload = json!({
            "lattice": report::lattice_header(&l),
            "genus": genus,
            "trace_bound": bound,
            "equal": ok,
            "first_difference": diff.map(difference_json),
            "digest": report::digest(&restricted),
        });
        Ok((Status::from_check(ok), payload))
    }

    fn venkov(&self) -> Outcome {
        let bound = self.job.norm_bound.unwrap_or(8);
        let mut rows = Vec::new();
        let mut by_rank: BTreeMap<usize, Vec<Option<BigRational>>> = BTreeMap::new();
        let mut all_consistent = true;
        for l in self.lattices_or_rank24()? {
            let r = venkov_constant(self.engine, &l, bound)?;
            all_consistent &= r.consistent();
            by_rank.entry(l.rank()).or_default().push(r.constant.clone().filter(|_| r.consistent()));
            rows.push(json!({
                "lattice": report::lattice_header(&l),
                "r2": r.r2,
                "constant": r.constant.as_ref().map(rational),
                "vectors_checked": r.vectors_checked,
                "consistent": r.consistent(),
                "counterexample": r.counterexample,
            }));
        }
        let mut uniform = true;
        let mut constants = Vec::new();
        for (rank, cs) in &by_rank {
            let first = cs[0].clone();
            let same = first.is_some() && cs.iter().all(|c| *c == first);
            uniform &= same;
            let twice_rank = BigRational::from(BigInt::from(2 * *rank as i64));
            constants.push(json!({
                "rank": rank,
                "constant": if same { first.as_ref().map(rational) } else { None },
                "uniform": same,
                "twice_rank": 2 * rank,
                "matches_twice_rank": same && first == Some(twice_rank),
            }));
        }
        let status = if !all_consistent {
            Status::Fail
        } else if !uniform {
            Status::Inconsistent
        } else {
            Status::Pass
        };
        Ok((status, json!({ "norm_bound": bound, "lattices": rows, "constants": constants })))
    }

    fn heat(&self) -> Outcome {
        let max_genus = self.genus(2);
        let bound = self.job.trace_bound.unwrap_or(4);
        let norm_bound = self.job.norm_bound.unwrap_or(8);
        let mut ok = true;
        let mut out = Vec::new();
        for l in self.lattices_or_rank24()? {
            let c = match &self.job.constant {
                Some(c) => c.clone(),
                None => {
                    let r = venkov_constant(self.engine, &l, norm_bound)?;
                    match (r.consistent(), r.constant) {
                        (true, Some(c)) => c,
                        _ => return Ok((Status::Fail, json!({ "lattice": report::lattice_header(&l), "venkov_consistent": false }))),
                    }
                }
            };
            let mut checks = Vec::new();
            for genus in 1..=max_genus {
                let h = heat_check(self.engine, &l, genus, bound, &c)?;
                ok &= h.holds();
                let rows: Vec<Value> = h
                    .rows
                    .iter()
                    .map(|r| {
                        json!({
                            "target": report::target(&r.target),
                            "i": r.i,
                            "j": r.j,
                            "lhs": report::big(&r.lhs),
                            "rhs": rational(&r.rhs),
                            "holds": r.holds,
                        })
                    })
                    .collect();
                checks.push(json!({ "genus": genus, "holds": h.holds(), "rows": rows }));
            }
            out.push(json!({ "lattice": report::lattice_header(&l), "constant": rational(&c), "genera": checks }));
        }
        Ok((Status::from_check(ok), json!({ "trace_bound": bound, "lattices": out })))
    }

    fn witt(&self) -> Outcome {
        let (a, b) = self.pair_or(Some(("E8+E8", "D16+")))?;
        let max_genus = self.job.max_genus.or(self.job.genus).unwrap_or(3);
        let mut ok = true;
        let mut genera = Vec::new();
        for genus in 1..=max_genus {
            let bound = self.job.trace_bound.unwrap_or(if genus <= 2 { 8 } else { 6 });
            let fa = theta_truncated(self.engine, &a, genus, bound)?;
            let fb = theta_truncated(self.engine, &b, genus, bound)?;
            let diff = first_difference(&fa, &fb);
            ok &= diff.is_none();
            genera.push(json!({
                "genus": genus,
                "trace_bound": bound,
                "coefficients": fa.coeffs.len(),
                "equal": diff.is_none(),
                "first_difference": diff.map(difference_json),
                "digest_first": report::digest(&fa),
                "digest_second": report::digest(&fb),
            }));
        }
        let payload = json!({
            "first": report::lattice_header(&a),
            "second": report::lattice_header(&b),
            "genera": genera,
        });
        Ok((Status::from_check(ok), payload))
    }

    fn schottky(&self) -> Outcome {
        let (a, b) = self.pair_or(Some(("E8+E8", "D16+")))?;
        let targets = self.tset()?;
        let mut rows = Vec::new();
        let mut witness = None;
        for t in &targets {
            let (x, y) = (self.engine.representation_count(&a, t)?, self.engine.representation_count(&b, t)?);
            if x != y && witness.is_none() {
                witness = Some(report::target(t));
            }
            rows.push(json!({
                "target": report::target(t),
                "first": report::big(&x),
                "second": report::big(&y),
                "difference": report::big(&(&x - &y)),
            }));
        }
        let payload = json!({
            "first": report::lattice_header(&a),
            "second": report::lattice_header(&b),
            "rows": rows,
            "witness": witness,
        });
        Ok((Status::from_check(payload["witness"] != Value::Null), payload))
    }

    fn a4_separation(&self) -> Outcome {
        let bound = self.job.norm_bound.unwrap_or(10);
        let a4 = a4_target();
        let mut ok = true;
        let mut pairs = Vec::new();
        for (a, b) in self.rank24_pairs()? {
            let (x, y) = (self.engine.representation_count(&a, &a4)?, self.engine.representation_count(&b, &a4)?);
            let fa = theta_truncated(self.engine, &a, 1, bound)?;
            let fb = theta_truncated(self.engine, &b, 1, bound)?;
            let diff = first_difference(&fa, &fb);
            let separated = x != y;
            ok &= separated && diff.is_none();
            pairs.push(json!({
                "first": report::lattice_header(&a),
                "second": report::lattice_header(&b),
                "a4_first": report::big(&x),
                "a4_second": report::big(&y),
                "separated": separated,
                "genus1_equal": diff.is_none(),
                "genus1_first_difference": diff.map(difference_json),
            }));
        }
        Ok((Status::from_check(ok), json!({ "norm_bound": bound, "pairs": pairs })))
    }

    fn k_identity(&self) -> Outcome {
        let targets = self.tset()?;
        let mut ok = true;
        let mut pairs = Vec::new();
        for (a, b) in self.rank24_pairs()? {
            let r = k_identity_check(self.engine, &a, &b, &targets)?;
            ok &= r.verified();
            let rows: Vec<Value> = r
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "target": report::target(&row.target),
                        "lhs": report::big(&row.lhs),
                        "rhs": report::big(&row.rhs),
                        "holds": row.holds,
                    })
                })
                .collect();
            pairs.push(json!({
                "first": report::lattice_header(&a),
                "second": report::lattice_header(&b),
                "k": rational(&r.k),
                "normalizer": report::target(&r.normalizer),
                "verified": r.verified(),
                "rows": rows,
            }));
        }
        Ok((Status::from_check(ok), json!({ "pairs": pairs })))
    }

    fn independence(&self) -> Outcome {
        let genus = self.genus(4);
        let lattices = self.lattices_or_rank24()?;
        let series = lattices.iter().map(|l| self.series(l, genus)).collect::<Result<Vec<_>, _>>()?;
        let rank = linear_independence_rank(&series)?;
        let payload = json!({
            "genus": genus,
            "lattices": lattices.iter().map(report::lattice_header).collect::<Vec<_>>(),
            "rank": rank,
        });
        Ok((Status::Computed, payload))
    }

    fn hyp_predicate(&self) -> Outcome {
        let (a, b) = self.pair_or(None)?;
        let (ma, mb) = (minimum_norm(&a)?, minimum_norm(&b)?);
        let holds = stable_eq_hyp_predicate_for(a.rank(), ma, b.rank(), mb);
        let payload = json!({
            "first": { "lattice": report::lattice_header(&a), "min_norm": ma },
            "second": { "lattice": report::lattice_header(&b), "min_norm": mb },
            "predicate": holds,
        });
        Ok((Status::Computed, payload))
    }

    fn registry_list(&self) -> Outcome {
        let entries: Vec<Value> = self
            .registry
            .list()?
            .into_iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "rank": e.rank,
                    "min_norm": e.min_norm,
                    "root_count": e.root_count,
                    "root_system": e.root_system,
                })
            })
            .collect();
        Ok((Status::Computed, json!({ "lattices": entries })))
    }
}

fn difference_json((t, a, b): (GramTarget, BigInt, BigInt)) -> Value {
    json!({ "target": report::target(&t), "first": report::big(&a), "second": report::big(&b) })
}
