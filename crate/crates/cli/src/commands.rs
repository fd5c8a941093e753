use crate::report::{Input, RunReport};
use qdouble::acceptance;
use qdouble::hopf::{artin_wedderburn, haar_integral, haar_properties, verify_hopf_axioms, Check, FinHopfAlgebra};
use qdouble::network::{self, ground_state, ground_state_residuals, StateHeader, StateVector};
use qdouble::operators::{dense_cap, export_dense, hamiltonian_terms, is_projector, Model, ModelSpec};
use qdouble::ribbon::RibbonScript;
use qdouble::{zoo, Error, Result};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn is_file_ref(r: &str) -> bool {
    r.ends_with(".json") || Path::new(r).is_file()
}

/// A built-in name (`h8`, `dual:s3`, `double:z2`) or an algebra file.
pub fn load_algebra(r: &str) -> Result<(FinHopfAlgebra, Input)> {
    if is_file_ref(r) {
        let bytes = read(Path::new(r))?;
        let a = FinHopfAlgebra::from_json(&String::from_utf8_lossy(&bytes))?;
        Ok((a, Input::file(Path::new(r), &bytes)))
    } else {
        Ok((zoo::builtin(r)?, Input::reference(r)))
    }
}

/// A preset reference or a model file.
pub fn load_model(r: &str) -> Result<(Model, Input)> {
    if is_file_ref(r) {
        let bytes = read(Path::new(r))?;
        let spec: ModelSpec = serde_json::from_slice(&bytes)?;
        Ok((Model::from_spec(&spec)?, Input::file(Path::new(r), &bytes)))
    } else {
        Ok((Model::from_ref(r)?, Input::reference(r)))
    }
}

fn timed<T>(rep: &mut RunReport, key: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f();
    rep.timing.insert(key.to_string(), t.elapsed().as_secs_f64());
    out
}

pub fn verify(algebra: &str, tol: f64) -> Result<RunReport> {
    let mut rep = RunReport::new("verify");
    let (a, input) = load_algebra(algebra)?;
    rep.inputs.push(input);
    let axioms = timed(&mut rep, "axioms", || verify_hopf_axioms(&a, tol))?;
    rep.checks.extend(axioms.checks);
    let h = haar_integral(&a)?;
    rep.checks.extend(haar_properties(&a, &h, tol));
    let dec = timed(&mut rep, "wedderburn", || artin_wedderburn(&a, 7))?;
    rep.results = json!({
        "algebra": a.name,
        "dim": a.dim(),
        "haar": h.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "irrep_dims": dec.block_dims,
    });
    eprintln!("irrep dims {:?}", dec.block_dims);
    Ok(rep)
}

pub fn gsd(model: &str) -> Result<RunReport> {
    let mut rep = RunReport::new("gsd");
    let (m, input) = load_model(model)?;
    rep.inputs.push(input);
    let r = timed(&mut rep, "gsd", || network::gsd(&m))?;
    rep.checks.push(Check::new("trace is an integer", (r.trace - r.gsd as f64).abs(), 1e-6));
    eprintln!("gsd {} trace {:.16e} ({})", r.gsd, r.trace, r.method);
    rep.results = serde_json::to_value(&r)?;
    Ok(rep)
}

/// The header sits next to the payload: `gs.bin` pairs with `gs.json`.
pub fn header_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

pub fn ground(model: &str, out: &Path, tol: f64) -> Result<RunReport> {
    let mut rep = RunReport::new("ground");
    let (m, input) = load_model(model)?;
    rep.inputs.push(input);
    let gs = timed(&mut rep, "ground_state", || ground_state(&m))?;
    let residuals = timed(&mut rep, "residuals", || ground_state_residuals(&m, &gs))?;
    for (label, r) in &residuals {
        rep.checks.push(Check::new(label.clone(), *r, tol));
    }
    let header = gs.header();
    let hpath = header_path(out);
    fs::write(out, gs.to_bytes())?;
    fs::write(&hpath, serde_json::to_string_pretty(&header)?)?;
    rep.results = json!({
        "state": out.display().to_string(),
        "header": hpath.display().to_string(),
        "len": header.len,
        "norm": gs.norm(),
    });
    Ok(rep)
}

pub fn load_state(m: &Model, path: &Path) -> Result<(StateVector, Input)> {
    let bytes = read(path)?;
    let header: StateHeader = serde_json::from_slice(&read(&header_path(path))?)?;
    if header.model != m.name || header.dims != m.dims {
        return Err(Error::ModelInconsistency(format!(
            "state {} belongs to `{}`, not `{}`",
            path.display(),
            header.model,
            m.name
        )));
    }
    let state = StateVector::from_bytes(&header, &bytes)?;
    Ok((state, Input::file(path, &bytes)))
}

pub fn ribbon(model: &str, script: &Path, state: Option<&Path>, tol: f64, expect: Option<usize>) -> Result<RunReport> {
    let mut rep = RunReport::new("ribbon");
    let (m, input) = load_model(model)?;
    rep.inputs.push(input);
    let bytes = read(script)?;
    rep.inputs.push(Input::file(script, &bytes));
    let script = RibbonScript::from_json(&String::from_utf8_lossy(&bytes))?;
    let psi = match state {
        Some(p) => {
            let (s, input) = load_state(&m, p)?;
            rep.inputs.push(input);
            s
        }
        None => ground_state(&m)?,
    };
    let (_, exc) = timed(&mut rep, "ribbon", || script.run(&m, &psi.amplitudes))?;
    let excited = exc.excited(tol);
    rep.checks.push(Check::new("ribbon leaves a nonzero state", if exc.annihilated { 1.0 } else { 0.0 }, 0.5));
    if let Some(n) = expect {
        rep.checks.push(Check::new(
            format!("exactly {n} excited terms"),
            (excited.len() as f64 - n as f64).abs(),
            0.0,
        ));
    }
    for e in &excited {
        eprintln!("excited {e} residual {:.16e}", exc.residuals[e]);
    }
    rep.results = json!({ "excited": excited, "excitations": exc });
    Ok(rep)
}

pub fn acceptance(suite: &str, only: Option<usize>) -> Result<RunReport> {
    if suite != "core" {
        return Err(Error::UnknownRef(format!("suite `{suite}`")));
    }
    let mut rep = RunReport::new("acceptance");
    rep.inputs.push(Input::reference(suite));
    let reports = match only {
        Some(id) => vec![acceptance::run(id)],
        None => acceptance::run_all(),
    };
    let mut summary = Vec::new();
    for r in &reports {
        rep.timing.insert(format!("criterion {}", r.id), r.seconds);
        eprintln!("criterion {} [{}] {}", r.id, if r.pass() { "PASS" } else { "FAIL" }, r.title);
        for c in &r.checks {
            rep.checks.push(Check::new(format!("criterion {}: {}", r.id, c.name), c.residual, c.threshold));
        }
        if let Some(e) = &r.error {
            rep.errors.push(format!("criterion {}: {e}", r.id));
        }
        summary.push(json!({ "id": r.id, "title": r.title, "pass": r.pass() }));
    }
    rep.results = json!({ "criteria": summary });
    Ok(rep)
}

pub fn export_op(model: &str, term: &str, full: bool, tol: f64) -> Result<RunReport> {
    let mut rep = RunReport::new("export-op");
    let (m, input) = load_model(model)?;
    rep.inputs.push(input);
    let terms = hamiltonian_terms(&m)?;
    let t = terms.iter().find(|t| t.label == term).ok_or_else(|| {
        let known: Vec<&str> = terms.iter().map(|t| t.label.as_str()).collect();
        Error::UnknownRef(format!("term `{term}` (known: {})", known.join(", ")))
    })?;
    let pr = is_projector(&m, &t.op)?;
    rep.checks.push(Check::new("idempotent", pr.idempotency, tol));
    rep.checks.push(Check::new("hermitian", pr.hermiticity, tol));
    let (support, dims, mat) = if full {
        let edges: Vec<usize> = (0..m.dims.len()).collect();
        (edges, m.dims.clone(), t.op.to_dense(&m.dims, dense_cap())?)
    } else {
        (t.op.support.clone(), t.op.dims.clone(), t.op.to_local_dense())
    };
    rep.results = json!({
        "term": t.label,
        "support": support,
        "dims": dims,
        "rows": mat.nrows(),
        "cols": mat.ncols(),
        "entries": export_dense(&mat),
    });
    Ok(rep)
}
