//! Shipped example algebras and the spec loader.
//!
//! All energies are integer multiples of `λ₀ = 1`.
//!
//! * `E-zero`: no operations.
//! * `E-free`: the cohomology ring of a torus with unit, nothing else.
//! * `E1`: unital with `m₁(a) = b`.
//! * `E2`: `I, v` with `m₀ = T·v`, `v` closed and not exact.
//! * `E3`: `E2` plus `u` with `m₁(u) = v`, so the same `m₀` is exact.
//! * `E4`: `L, v, w` with `m₀ = T·v + T²e⁻¹·w`, Maslov indices `0, −2`.

use std::path::Path;

use crate::ainfinity::schema::SpecFile;
use crate::ainfinity::{AlgebraSpec, BimoduleSpec, HomomorphismSpec};
use crate::error::{Error, Result};
use crate::novikov::{exp_int, q_int};

pub const NAMES: [&str; 6] = ["E-zero", "E-free", "E1", "E2", "E3", "E4"];

fn e_zero() -> AlgebraSpec {
    AlgebraSpec::new("E-zero", &[("x0", 0), ("x1", 1), ("x2", 2)])
}

fn e_free() -> AlgebraSpec {
    let mut a = AlgebraSpec::new("E-free", &[("I", 0), ("x", 1), ("y", 1), ("w", 2)]);
    a.add_unit("I");
    a.set_op(&["x", "y"], "b0", "w", q_int(1));
    a.set_op(&["y", "x"], "b0", "w", q_int(-1));
    a
}

fn e1() -> AlgebraSpec {
    let mut a = AlgebraSpec::new("E1", &[("I", 0), ("a", 1), ("b", 2)]);
    a.add_unit("I");
    a.set_op(&["a"], "b0", "b", q_int(1));
    a
}

fn e2() -> AlgebraSpec {
    let mut a = AlgebraSpec::new("E2", &[("I", 0), ("v", 2)]);
    a.add_unit("I");
    a.add_class("beta1", exp_int(1), 0);
    a.set_op(&[], "beta1", "v", q_int(1));
    a
}

fn e3() -> AlgebraSpec {
    let mut a = AlgebraSpec::new("E3", &[("I", 0), ("u", 1), ("v", 2)]);
    a.add_unit("I");
    a.add_class("beta1", exp_int(1), 0);
    a.set_op(&["u"], "b0", "v", q_int(1));
    a.set_op(&[], "beta1", "v", q_int(1));
    a
}

fn e4() -> AlgebraSpec {
    let mut a = AlgebraSpec::new("E4", &[("L", 0), ("v", 2), ("w", 4)]);
    a.add_unit("L");
    a.add_class("beta1", exp_int(1), 0);
    a.add_class("beta2", exp_int(2), -2);
    a.set_op(&[], "beta1", "v", q_int(1));
    a.set_op(&[], "beta2", "w", q_int(1));
    a
}

/// Build a shipped example by name (case-insensitive).
pub fn build(name: &str) -> Result<AlgebraSpec> {
    match name.to_ascii_lowercase().as_str() {
        "e-zero" | "ezero" => Ok(e_zero()),
        "e-free" | "efree" => Ok(e_free()),
        "e1" => Ok(e1()),
        "e2" => Ok(e2()),
        "e3" => Ok(e3()),
        "e4" => Ok(e4()),
        _ => Err(Error::Usage(format!("unknown example `{}` (known: {})", name, NAMES.join(", ")))),
    }
}

/// The examples together with their diagonal bimodules.
pub fn build_all() -> Vec<(AlgebraSpec, BimoduleSpec)> {
    NAMES
        .iter()
        .map(|n| {
            let a = build(n).expect("shipped example");
            let m = BimoduleSpec::diagonal(&a);
            (a, m)
        })
        .collect()
}

/// Anything a spec file may describe.
#[derive(Clone, Debug)]
pub enum Loaded {
    Algebra(AlgebraSpec),
    Bimodule(BimoduleSpec),
    Homomorphism(HomomorphismSpec),
}

impl Loaded {
    pub fn algebra(&self) -> &AlgebraSpec {
        match self {
            Loaded::Algebra(a) => a,
            Loaded::Bimodule(m) => &m.left,
            Loaded::Homomorphism(f) => &f.source,
        }
    }
}

/// Parse spec text; JSON errors carry line and column.
pub fn parse(text: &str) -> Result<Loaded> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let loaded = if file.source.is_some() || !file.f_ops.is_empty() {
        Loaded::Homomorphism(HomomorphismSpec::from_file(&file)?)
    } else if file.module_basis.is_some() {
        Loaded::Bimodule(BimoduleSpec::from_file(&file)?)
    } else {
        Loaded::Algebra(AlgebraSpec::from_file(&file)?)
    };
    let mut problems: Vec<String> = loaded.algebra().validate().iter().map(|v| v.to_string()).collect();
    match &loaded {
        Loaded::Bimodule(m) => problems.extend(m.validate().iter().map(|v| v.to_string())),
        Loaded::Homomorphism(f) => {
            problems.extend(f.target.validate().iter().map(|v| v.to_string()));
            problems.extend(f.validate().iter().map(|v| v.to_string()));
        }
        Loaded::Algebra(_) => {}
    }
    if !problems.is_empty() {
        return Err(Error::Invalid(format!("{}: {}", file.name, problems.join("; "))));
    }
    Ok(loaded)
}

pub fn load(path: &Path) -> Result<Loaded> {
    parse(&std::fs::read_to_string(path)?)
}

/// Pretty JSON for a spec file.
pub fn to_json(file: &SpecFile) -> String {
    serde_json::to_string_pretty(file).expect("spec files serialize") + "\n"
}

pub fn save(a: &AlgebraSpec, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(&a.to_file()))?;
    Ok(())
}
