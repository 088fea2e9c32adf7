use std::path::Path;

use pstar_gns::algebra::{check_multiplier_duality, multiplier_space, universal_multipliers, validate_algebra, Side, DEFAULT_TOL};
use pstar_gns::decompose::{decompose_form, lemma_consistency};
use pstar_gns::document::{load_path, AlgebraDocument, LoadError, Loaded};
use pstar_gns::fixtures;
use pstar_gns::forms::{check_core as core_test, check_precore};
use pstar_gns::gns::{check_representable, gns_construct, verify_gns};
use pstar_gns::linalg;
use pstar_gns::regularity::compression_core_check;
use pstar_gns::{Check, LinearFunctional, SesquiForm, Subspace};
use serde_json::{json, Map, Value};

use crate::report::{self, RunReport, Status};

pub struct Context {
    pub tol: Option<f64>,
    pub seed: u64,
    pub args: Vec<String>,
}

impl Context {
    fn report(&self, tol: f64) -> RunReport {
        RunReport::new(self.args.clone(), self.seed, tol)
    }

    fn default_report(&self) -> RunReport {
        self.report(self.tol.unwrap_or(DEFAULT_TOL))
    }

    /// Loads and validates `file`, or returns the finished failure report.
    fn load(&self, file: &Path) -> Result<Loaded, Box<RunReport>> {
        load_path(file, self.tol).map_err(|e| {
            let mut r = self.default_report();
            let status = match &e {
                LoadError::Validation { report, .. } => {
                    r.add_checks(report);
                    Status::ValidationFailed
                }
                _ => Status::ParseError,
            };
            Box::new(r.fail(status, e.to_string()))
        })
    }
}

fn names(list: impl IntoIterator<Item = String>) -> String {
    let v: Vec<String> = list.into_iter().collect();
    if v.is_empty() {
        "none".into()
    } else {
        v.join(", ")
    }
}

fn form<'a>(loaded: &'a Loaded, name: &str) -> Result<&'a SesquiForm, String> {
    loaded
        .objects
        .form(name)
        .ok_or_else(|| format!("no form named '{name}' (available: {})", names(loaded.objects.forms.keys().cloned())))
}

fn functional<'a>(loaded: &'a Loaded, name: &str) -> Result<&'a LinearFunctional, String> {
    loaded
        .objects
        .functional(name)
        .ok_or_else(|| format!("no functional named '{name}' (available: {})", names(loaded.objects.functionals.keys().cloned())))
}

fn subspace(loaded: &Loaded, name: &str) -> Result<Subspace, String> {
    loaded.objects.subspace(&loaded.algebra, name).ok_or_else(|| {
        format!("no subspace named '{name}' (available: {}, plus all, RA, LA)", names(loaded.objects.subspaces.keys().cloned()))
    })
}

macro_rules! try_load {
    ($ctx:expr, $file:expr) => {
        match $ctx.load($file) {
            Ok(l) => l,
            Err(r) => return *r,
        }
    };
}

macro_rules! try_input {
    ($report:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(msg) => return $report.fail(Status::ParseError, msg),
        }
    };
}

macro_rules! try_math {
    ($report:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return $report.fail(Status::CheckFailed, err.to_string()),
        }
    };
}

pub fn validate(ctx: &Context, file: &Path) -> RunReport {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return ctx.default_report().fail(Status::ParseError, format!("cannot read {}: {e}", file.display())),
    };
    let built = AlgebraDocument::parse(&text).and_then(|doc| doc.build(ctx.tol));
    let (alg, objects) = match built {
        Ok(v) => v,
        Err(e) => return ctx.default_report().fail(Status::ParseError, e.to_string()),
    };
    let mut r = ctx.report(alg.tol());
    let checks = validate_algebra(&alg);
    r.add_checks(&checks);
    r.set("dimension", alg.dim());
    r.set("basis_names", alg.basis_names().to_vec());
    r.set("forms", objects.forms.keys().cloned().collect::<Vec<_>>());
    r.set("functionals", objects.functionals.keys().cloned().collect::<Vec<_>>());
    r.set("subspaces", objects.subspaces.keys().cloned().collect::<Vec<_>>());
    if checks.all_passed() {
        r.set("RA", report::subspace(&alg, &universal_multipliers(&alg, Side::Right)));
        r.set("LA", report::subspace(&alg, &universal_multipliers(&alg, Side::Left)));
        r
    } else {
        let failed: Vec<String> = checks.failures().map(|c| c.name.clone()).collect();
        r.fail(Status::ValidationFailed, format!("validation failed: {}", failed.join(", ")))
    }
}

pub fn multipliers(ctx: &Context, file: &Path, elem: Option<&str>) -> RunReport {
    let loaded = try_load!(ctx, file);
    let alg = &loaded.algebra;
    let mut r = ctx.report(alg.tol());
    match elem {
        Some(name) => {
            let idx = try_input!(
                r,
                alg.index_of(name).ok_or_else(|| format!("no basis element named '{name}' (available: {})", alg.basis_names().join(", ")))
            );
            let y = alg.basis(idx);
            r.set("element", name);
            r.set("left", report::subspace(alg, &multiplier_space(alg, &y, Side::Left)));
            r.set("right", report::subspace(alg, &multiplier_space(alg, &y, Side::Right)));
        }
        None => {
            r.checks.push(check_multiplier_duality(alg));
            r.set("RA", report::subspace(alg, &universal_multipliers(alg, Side::Right)));
            r.set("LA", report::subspace(alg, &universal_multipliers(alg, Side::Left)));
        }
    }
    r.settle()
}

pub fn gns(ctx: &Context, file: &Path, functional_name: &str, subspace_name: &str) -> RunReport {
    let loaded = try_load!(ctx, file);
    let alg = &loaded.algebra;
    let mut r = ctx.report(alg.tol());
    let w = try_input!(r, functional(&loaded, functional_name));
    let b = try_input!(r, subspace(&loaded, subspace_name));
    let repr = try_math!(r, check_representable(alg, w, &b));
    r.add_checks(&repr.report);
    r.set("dim_B", b.dim());
    r.set("min_eigenvalue", repr.min_eigenvalue);
    r.set("representable", repr.holds());
    if !repr.holds() {
        return r.settle();
    }
    let rep = try_math!(r, gns_construct(alg, w, &b));
    r.add_checks(&verify_gns(alg, w, &rep));
    r.set("rank", rep.rank());
    let mut gammas = Map::new();
    let mut pi = Map::new();
    for a in 0..alg.dim() {
        gammas.insert(alg.name(a).to_string(), json!(rep.gammas[a]));
        pi.insert(alg.name(a).to_string(), report::matrix(&rep.pi[a]));
    }
    r.set("gamma", gammas);
    r.set("lambda", report::matrix(&rep.lambda_ext));
    r.set("pi", pi);
    r.set("cyclic_vector", rep.cyclic.as_ref().map_or(Value::Null, report::vector));
    r.settle()
}

pub fn decompose(ctx: &Context, file: &Path, form_name: &str, precore: &str) -> RunReport {
    let loaded = try_load!(ctx, file);
    let alg = &loaded.algebra;
    let mut r = ctx.report(alg.tol());
    let f = try_input!(r, form(&loaded, form_name));
    let b = try_input!(r, subspace(&loaded, precore));
    let d = try_math!(r, decompose_form(alg, f, &b));
    let lemma = try_math!(r, lemma_consistency(alg, f, &d.ips, &b));
    r.add_checks(&d.checks);
    r.checks.push(
        if lemma.passed {
            Check::pass("lemma_consistency").with_detail(format!("{} quadruples", lemma.quadruples_checked))
        } else {
            let cx = lemma.counterexample.expect("failed lemma has a counterexample");
            let b_name = cx.b.map_or("-".to_string(), |b| alg.name(b).to_string());
            Check::fail("lemma_consistency", format!("a = {}, b = {b_name}, x = b{}, y = b{}", alg.name(cx.a), cx.x + 1, cx.y + 1))
        }
        .with_residual(lemma.max_residual),
    );
    r.set("functional", report::vector(d.omega_phi.weights()));
    r.set("ips", report::matrix(d.ips.matrix()));
    r.set("singular", report::matrix(d.singular.matrix()));
    r.set("B_is_core", d.classification.b_is_core);
    r.set("singular_nonzero", d.classification.singular_nonzero);
    r.set("singular_kind", serde_json::to_value(d.classification.kind).unwrap());
    r.set("witness", d.classification.witness.as_ref().map_or(Value::Null, |x| report::element(alg, x)));
    r.set("rank_form", linalg::psd_rank_factor(f.matrix(), alg.tol()).0);
    r.set("rank_ips", linalg::psd_rank_factor(d.ips.matrix(), alg.tol()).0);
    r.settle()
}

pub fn check_core(ctx: &Context, file: &Path, form_name: &str, subspace_name: &str) -> RunReport {
    let loaded = try_load!(ctx, file);
    let alg = &loaded.algebra;
    let mut r = ctx.report(alg.tol());
    let f = try_input!(r, form(&loaded, form_name));
    let b = try_input!(r, subspace(&loaded, subspace_name));
    let pre = try_math!(r, check_precore(alg, f, &b));
    let core = try_math!(r, core_test(alg, f, &b));
    r.add_checks(&pre);
    r.set("precore", pre.all_passed());
    r.set("is_core", core.is_core);
    r.set("rank_B", core.rank_b);
    r.set("rank", core.rank_total);
    r.set("orthocomplement_trivial", core.orthocomplement_trivial);
    r.set("orth_defect", core.orth_defect);
    r.set("witness", core.orth_witness.as_ref().map_or(Value::Null, |x| report::element(alg, x)));
    r.settle()
}

pub fn regularity(ctx: &Context, file: &Path, form_name: &str, precore: &str, samples: usize) -> RunReport {
    let loaded = try_load!(ctx, file);
    let alg = &loaded.algebra;
    let mut r = ctx.report(alg.tol());
    let f = try_input!(r, form(&loaded, form_name));
    let b = try_input!(r, subspace(&loaded, precore));
    let c = try_math!(r, compression_core_check(alg, f, &b, samples, ctx.seed));
    let q = &c.quasi_regular;
    r.checks.push(if c.agree {
        Check::pass("compression_agreement")
    } else {
        Check::fail("compression_agreement", format!("all_cores = {} but quasi-regularity verdict is {:?}", c.all_cores, q.verdict))
    });
    r.checks.push(if q.consistent {
        Check::pass("sampling_consistent")
    } else {
        Check::fail("sampling_consistent", "matrix-span test passed but a sampled vector escaped")
    });
    r.set("samples", samples);
    r.set("all_cores", c.all_cores);
    r.set("agree", c.agree);
    r.set(
        "quasi_regular",
        json!({
            "verdict": q.verdict,
            "matrix_span": q.matrix_span,
            "witness": q.witness.as_ref().map_or(Value::Null, report::vector),
            "witness_element": q.witness_element.map(|a| alg.name(a).to_string()),
            "vectors_checked": q.vectors_checked,
            "precore_failures": q.precore_failures,
        }),
    );
    let per_x: Vec<Value> = c
        .per_x
        .iter()
        .map(|e| json!({ "x": alg.describe(&e.x), "is_core": e.is_core, "rank_B": e.rank_b, "rank": e.rank_total }))
        .collect();
    r.set("per_x", per_x);
    r.settle()
}

pub fn fixtures(ctx: &Context, dir: &Path) -> RunReport {
    let mut r = ctx.default_report();
    if let Err(e) = std::fs::create_dir_all(dir) {
        return r.fail(Status::ParseError, format!("cannot create {}: {e}", dir.display()));
    }
    let mut written = Vec::new();
    for (name, doc) in fixtures::shipped() {
        let path = dir.join(name);
        if let Err(e) = std::fs::write(&path, doc.to_json()) {
            return r.fail(Status::ParseError, format!("cannot write {}: {e}", path.display()));
        }
        written.push(name.to_string());
    }
    r.set("written", written);
    r
}
