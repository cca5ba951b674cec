use crate::ainfinity::{AlgebraSpec, BimoduleSpec, DefectReport};
use crate::ce_dual::{
    ce_chain_homology, ce_module_vanishing, cyclic_ce_homology, duality_dims, obstruction_extract, sample_cocycles, CeSpace,
    DualWindow, SymSpace,
};
use crate::cyclic::cycles::{alpha_build, unit_cycle_report};
use crate::cyclic::stilde::cyclic_homology_bb_window;
use crate::cyclic::{
    bb_total_homology, connes_sequence_check, cyclic_homology, cyclic_space, mutation_suite, stable_from, tsygan_total_homology,
    CyclicOps, Stilde,
};
use crate::error::{Error, Result};
use crate::examples::{build, to_json, Loaded, NAMES};
use crate::hochschild::mc::{augmentation_failures, deform as deform_by, gamma_b, mc_defect, solve_mc};
use crate::hochschild::Hochschild;
use crate::linfinity::{lmodule_from_bimodule, symmetrize_algebra};
use crate::novikov::{fmt_exp, Slot};
use crate::window::{assemble, BarSpace, HomologyReport, Space, Verdict, Window, WindowedComplex};
use crate::words::{Flavor, Letter, SignedVector, Word};

use super::{Cli, PageSpace, Report, Verb};

fn spec_name(l: &Loaded) -> String {
    match l {
        Loaded::Algebra(a) => a.name.clone(),
        Loaded::Bimodule(m) => m.name.clone(),
        Loaded::Homomorphism(f) => f.name.clone(),
    }
}

fn bimodule(l: &Loaded) -> BimoduleSpec {
    match l {
        Loaded::Bimodule(m) => m.clone(),
        other => BimoduleSpec::diagonal(other.algebra()),
    }
}

fn arity(a: &AlgebraSpec, w: &Window) -> usize {
    w.kmax.unwrap_or(a.max_arity().max(1))
}

fn slot_text(s: &Slot) -> String {
    format!("T^{} e^{}", fmt_exp(&s.energy), s.maslov)
}

fn defects(r: &mut Report, d: &DefectReport) {
    for e in &d.entries {
        r.push("defect", &[("identity", d.label.clone()), ("cell", e.cell.clone()), ("residual", e.residual.clone())]);
    }
    r.check(&d.label, d.is_empty(), format!("{} cells checked", d.checked));
}

fn homology(r: &mut Report, h: &HomologyReport) {
    r.extend_lines(&h.records(), &h.window);
}

fn complex(r: &mut Report, wc: &WindowedComplex) {
    homology(r, &wc.homology());
    let w = wc.window.to_string();
    r.extend_lines(&wc.ledger_records(), &w);
}

fn zero_check(r: &mut Report, name: &str, v: &SignedVector, a: &AlgebraSpec) {
    r.check(name, v.is_zero(), v.render(&a.alphabet));
}

pub(super) fn dispatch(cli: &Cli) -> Result<Report> {
    let w = cli.window()?;
    if let Verb::Validate = cli.verb {
        return validate(cli, &w);
    }
    let loaded = cli.load()?;
    let a = loaded.algebra().clone();
    let mut r = Report::new(cli.verb.name(), &spec_name(&loaded), w.to_string());
    match &cli.verb {
        Verb::Bar => complex(&mut r, &assemble(&BarSpace::new(&a, Flavor::Plain, 1).with_kmax(w.kmax), &w)?),
        Verb::Sym => complex(&mut r, &assemble(&BarSpace::new(&a, Flavor::Symmetric, 1).with_kmax(w.kmax), &w)?),
        Verb::Cyclic => homology(&mut r, &cyclic_homology(&a, &w)?),
        Verb::Hochschild | Verb::ReducedHochschild => {
            let m = bimodule(&loaded);
            let h = if let Verb::Hochschild = cli.verb { Hochschild::new(&m)? } else { Hochschild::reduced(&m)? };
            let h = h.with_kmax(w.kmax);
            defects(&mut r, &h.square_defect(&w));
            homology(&mut r, &h.homology(&w)?);
        }
        Verb::Ce => {
            let lm = lmodule_from_bimodule(&bimodule(&loaded), arity(&a, &w))?;
            homology(&mut r, &ce_chain_homology(&lm, &w)?);
        }
        Verb::CyclicCe => homology(&mut r, &cyclic_ce_homology(&symmetrize_algebra(&a, arity(&a, &w)), &w)?),
        Verb::DualCe => dual_ce(&mut r, &loaded, &w)?,
        Verb::BicomplexCheck => bicomplex_check(&mut r, &a, &w)?,
        Verb::BbComplex { diagonals } => bb_complex(&mut r, &a, &w, *diagonals)?,
        Verb::Alpha => alpha(&mut r, &a, &w)?,
        Verb::Gamma => gamma(&mut r, &a, &w)?,
        Verb::McCheck => mc_check(&mut r, &loaded, &w)?,
        Verb::Vanish { samples, seed } => vanish(&mut r, &loaded, &w, *samples, *seed)?,
        Verb::Pages { space } => pages(&mut r, &loaded, &w, *space)?,
        Verb::Validate | Verb::Deform | Verb::Example { .. } => unreachable!("handled by the caller"),
    }
    Ok(r)
}

fn validate(cli: &Cli, w: &Window) -> Result<Report> {
    let loaded = match cli.load() {
        Err(Error::Invalid(msg)) => {
            let (name, problems) = msg.split_once(": ").unwrap_or(("?", msg.as_str()));
            let mut r = Report::new("validate", name, w.to_string());
            for p in problems.split("; ") {
                r.push("violation", &[("detail", p.to_string())]);
            }
            r.check("spec", false, "violations found");
            return Ok(r);
        }
        other => other?,
    };
    let a = loaded.algebra();
    let mut r = Report::new("validate", &spec_name(&loaded), w.to_string());
    r.check("spec", true, "no violations");
    defects(&mut r, &a.ainfty_defect(w));
    if a.unit.is_some() {
        let bad = a.unit_check()?;
        for v in &bad {
            r.push("violation", &[("detail", v.to_string())]);
        }
        r.check("unit", bad.is_empty(), format!("{} violations", bad.len()));
    }
    match &loaded {
        Loaded::Bimodule(m) => defects(&mut r, &m.defect(w)),
        Loaded::Homomorphism(f) => defects(&mut r, &f.chainmap_defect(w)?),
        Loaded::Algebra(_) => {}
    }
    Ok(r)
}

fn dual_ce(r: &mut Report, loaded: &Loaded, w: &Window) -> Result<()> {
    let a = loaded.algebra();
    let w0 = w.clone().with_halo(0);
    r.window = w0.to_string();
    let lm = lmodule_from_bimodule(&bimodule(loaded), arity(a, w))?;
    let spaces: Vec<(&str, Box<dyn Space>)> = vec![
        ("cyclic-ce", Box::new(SymSpace { l: symmetrize_algebra(a, arity(a, w)), min_len: 1 })),
        ("ce", Box::new(CeSpace::new(&lm))),
    ];
    for (name, space) in spaces {
        let dims = duality_dims(space.as_ref(), &w0)?;
        let mut agree = true;
        for (d, (chain, dual)) in &dims {
            agree &= chain == dual;
            r.push("duality", &[("space", name.into()), ("degree", d.to_string()), ("chain", chain.to_string()), ("dual", dual.to_string())]);
        }
        r.check(name, agree, format!("{} degrees compared", dims.len()));
    }
    Ok(())
}

fn bicomplex_check(r: &mut Report, a: &AlgebraSpec, w: &Window) -> Result<()> {
    let ops = CyclicOps::new(a).with_kmax(w.kmax);
    for d in ops.identities(w).iter().chain(ops.square_defects(w).iter()) {
        defects(r, d);
    }
    defects(r, &ops.resolution_defect(w));
    let mut algs = vec![a.clone()];
    for n in NAMES {
        algs.push(build(n)?);
    }
    let suite = mutation_suite(&algs, w);
    let caught = suite.iter().filter(|m| m.caught.is_some()).count();
    for m in &suite {
        let (by, cell, residual) = m.caught.clone().unwrap_or_default();
        r.push("mutation", &[("twist", format!("{:?}", m.twist)), ("caught_by", by), ("cell", cell), ("residual", residual)]);
    }
    r.check("mutations", caught == suite.len(), format!("{}/{} caught", caught, suite.len()));
    Ok(())
}

/// Compare a truncated total complex with cyclic homology on the degrees
/// its truncation cannot reach.
fn compare(r: &mut Report, name: &str, got: &HomologyReport, want: &HomologyReport, from: i64) {
    let refused: Vec<i64> = got.refused.iter().map(|(d, _)| *d).collect();
    let mut agree = true;
    let mut compared = 0;
    for (d, n) in got.dims() {
        if d < from || refused.contains(&d) {
            continue;
        }
        let m = want.dim(d).unwrap_or(0);
        agree &= n == m;
        compared += 1;
        r.push("compare", &[("total", name.into()), ("degree", d.to_string()), ("dim", n.to_string()), ("cyclic", m.to_string())]);
    }
    for (d, why) in &got.refused {
        r.push("refused", &[("total", name.into()), ("degree", d.to_string()), ("cell", why.clone())]);
    }
    r.check(name, agree, format!("{} degrees from {}", compared, from));
}

fn bb_complex(r: &mut Report, a: &AlgebraSpec, w: &Window, diagonals: u32) -> Result<()> {
    let st = Stilde::build(a, w)?;
    defects(r, &st.identity_report(w)?);
    let ops = CyclicOps::new(a).with_kmax(w.kmax);
    for d in st.b_identities(&ops, w)?.iter() {
        defects(r, d);
    }
    let cyc = cyclic_homology_bb_window(a, w)?;
    homology(r, &cyc);
    let top = cyc.dims().keys().max().copied().unwrap_or(0);
    for p in 2..=diagonals {
        for normalized in [false, true] {
            let bb = bb_total_homology(a, w, p, normalized)?;
            let name = format!("bb{}{}", p, if normalized { "-normalized" } else { "" });
            compare(r, &name, &bb, &cyc, top - 2 * p as i64 + 3);
        }
    }
    let plain = cyclic_homology(a, w)?;
    let top = plain.dims().keys().max().copied().unwrap_or(0);
    for p in 2..=diagonals {
        compare(r, &format!("tsygan{}", p), &tsygan_total_homology(a, w, p)?, &plain, stable_from(top, p));
    }
    let connes = connes_sequence_check(a, w, diagonals.max(2))?;
    let cw = connes.window.clone();
    r.extend_lines(&connes.records(), &cw);
    r.check("connes-sequence", connes.is_exact(), format!("{} nodes", connes.nodes.len()));
    Ok(())
}

fn verdict(r: &mut Report, v: &Option<Verdict>, verified: bool) {
    match v {
        Some(Verdict::NotBoundary(c)) => {
            r.push("certificate", &[("leading", c.leading.clone()), ("value", c.to_string())]);
            r.check("nonboundary", verified, if verified { "certificate verified" } else { "certificate rejected" });
        }
        Some(Verdict::Boundary(pre)) => {
            let shown: Vec<String> = pre.iter().map(|(c, q)| format!("{}:{}", c, q)).collect();
            r.check("nonboundary", false, format!("leading term is a boundary of {}", shown.join(",")));
        }
        None => {}
    }
}

fn alpha(r: &mut Report, a: &AlgebraSpec, w: &Window) -> Result<()> {
    let rep = alpha_build(a, w.emax, Some(w))?;
    r.push("alpha", &[("kmax", rep.kmax.to_string()), ("cycle", rep.alpha.render(&a.alphabet))]);
    for (k, res) in &rep.lemma {
        zero_check(r, &format!("lemma k={}", k), res, a);
    }
    for (k, res) in &rep.shift {
        zero_check(r, &format!("shift k={}", k), res, a);
    }
    zero_check(r, "N(unit unit)", &rep.unit_square, a);
    zero_check(r, "d-hat alpha", &rep.boundary, a);
    if rep.boundary.is_zero() {
        r.message("d̂(α) = 0 within window");
    }
    verdict(r, &rep.verdict, rep.verified);
    Ok(())
}

fn gamma(r: &mut Report, a: &AlgebraSpec, w: &Window) -> Result<()> {
    let rep = unit_cycle_report(a, w)?;
    r.push("gamma", &[("cycle", rep.cycle.render(&a.alphabet))]);
    for (k, res) in &rep.steps {
        zero_check(r, &format!("step k={}", k), res, a);
    }
    zero_check(r, "d-hat gamma", &rep.boundary, a);
    r.message(if rep.boundary.is_zero() {
        "d̂(γ) = 0 within window".to_string()
    } else {
        format!("d̂(γ) = {} within window", rep.boundary.render(&a.alphabet))
    });
    verdict(r, &rep.verdict, rep.verified);
    complex(r, &assemble(&BarSpace::new(a, Flavor::Plain, 0).with_kmax(w.kmax), w)?);
    Ok(())
}

fn mc_check(r: &mut Report, loaded: &Loaded, w: &Window) -> Result<()> {
    let a = loaded.algebra();
    let b = solve_mc(a, w.emax)?;
    r.push("cochain", &[("b", b.render(&a.alphabet))]);
    zero_check(r, "d-hat e^b", &mc_defect(a, &b, w)?, a);
    let d = deform_by(a, &b, w.lmax, w.emax)?;
    defects(r, &d.ainfty_defect(w));
    for x in 0..d.size() as Letter {
        let v = SignedVector::basis(Flavor::Plain, Word::plain(vec![x]), &Slot::zero(), Some(w.emax));
        let twice = d.mhat(&d.mhat(&v, 1..=1)?, 1..=1)?;
        zero_check(r, &format!("m1b squared on {}", a.alphabet.names[x as usize]), &twice, a);
    }
    let m = bimodule(loaded);
    let g = gamma_b(&m, &b, w.emax)?;
    let boundary = Hochschild::new(&m)?.apply(&g);
    r.check("gamma_b cycle", boundary.is_zero(), boundary.render(&m.alphabet()));
    let failures = augmentation_failures(a, &b, w)?;
    for (cell, v) in &failures {
        r.push("augmentation", &[("cell", cell.clone()), ("value", v.to_string())]);
    }
    r.check("augmentation", failures.is_empty(), format!("{} failing functionals", failures.len()));
    Ok(())
}

/// The deformed spec as JSON; exit 1 when it fails the A∞ relations.
pub(super) fn deform(cli: &Cli) -> Result<(String, i32)> {
    let w = cli.window()?;
    let loaded = cli.load()?;
    let a = loaded.algebra();
    let b = solve_mc(a, w.emax)?;
    let d = deform_by(a, &b, w.lmax, w.emax)?;
    let code = if d.ainfty_defect(&w).is_empty() { 0 } else { 1 };
    Ok((to_json(&d.to_file()), code))
}

fn vanish(r: &mut Report, loaded: &Loaded, w: &Window, samples: usize, seed: u64) -> Result<()> {
    let a = loaded.algebra();
    let o = obstruction_extract(a, w.lmax, w.emax)?;
    for ob in &o.obstructions {
        r.push(
            "obstruction",
            &[("slot", slot_text(&ob.slot)), ("closed", ob.closed.to_string()), ("exact", ob.exact.to_string())],
        );
    }
    if let Some(y) = &o.candidate {
        r.push("candidate", &[("y", y.render())]);
    }
    r.message(o.message.clone());
    let Some(cert) = &o.certificate else {
        r.failed = true;
        return Ok(());
    };
    r.push("certificate", &[("x", cert.x.render()), ("h", cert.h.render())]);
    let win = DualWindow::algebra(&symmetrize_algebra(a, arity(a, w)));
    let zs = sample_cocycles(&win, w.lmax, w.emax, samples, seed)?;
    let mut ok = 0;
    for z in &zs {
        if cert.check(&win, z)? {
            ok += 1;
        } else {
            r.push("unwitnessed", &[("cocycle", z.render())]);
        }
    }
    r.check("cyclic-ce witnesses", ok == zs.len(), format!("{}/{} verified", ok, zs.len()));
    let lm = lmodule_from_bimodule(&bimodule(loaded), arity(a, w))?;
    let mv = ce_module_vanishing(&lm, Some(cert), w.lmax, w.emax, samples, seed.wrapping_add(1))?;
    for f in &mv.failures {
        r.push("unwitnessed", &[("cocycle", f.clone())]);
    }
    r.check("ce-module witnesses", mv.passed(), format!("{}/{} verified", mv.verified, mv.sampled));
    Ok(())
}

fn pages(r: &mut Report, loaded: &Loaded, w: &Window, space: PageSpace) -> Result<()> {
    let a = loaded.algebra();
    let wc = match space {
        PageSpace::Bar => assemble(&BarSpace::new(a, Flavor::Plain, 1).with_kmax(w.kmax), w)?,
        PageSpace::Sym => assemble(&BarSpace::new(a, Flavor::Symmetric, 1).with_kmax(w.kmax), w)?,
        PageSpace::Cyclic => assemble(&cyclic_space(a, w), w)?,
        PageSpace::Hochschild => Hochschild::new(&bimodule(loaded))?.with_kmax(w.kmax).assemble(w)?,
    };
    for page in 1..=2 {
        for row in wc.spectral_page(page)? {
            r.push(
                "page",
                &[("r", page.to_string()), ("degree", row.degree.to_string()), ("level", row.level.to_string()), ("dim", row.dim.to_string())],
            );
        }
    }
    complex(r, &wc);
    Ok(())
}
