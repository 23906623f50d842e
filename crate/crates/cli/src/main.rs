//! `clusterhom`: command-line front end.
//!
//! Every command prints a human-readable part followed by a block of
//! `key = value` lines between two `---report---` fences. Exit status is 0
//! on success, 1 on a mathematical failure and 2 on an input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use clusterhom::algebra::{AlgebraMap, Element, Window};
use clusterhom::certificates::{acyclicity_certificate, find_free_terms, FreeTerm};
use clusterhom::complex::{check_chain_map, ChainMap, ComplexSpec};
use clusterhom::fine::{builtin_circle_line, describe_failure, fine_homology, FineSpec};
use clusterhom::format::{self, ComplexFile, FineFile, SpecFile};
use clusterhom::homology::{homology, HomologyOptions, HomologyReport};
use clusterhom::minimal::minimal_model;
use clusterhom::module::ModuleElement;
use clusterhom::scenarios::{self, MorsePattern};
use clusterhom::spectral::pages;
use clusterhom::text::{parse_element, parse_exponent, show, Origin};
use clusterhom::tilde::{
    check_alpha_chain, check_tilde_d_squared, show_tilde, tilde_d, tilde_d_window, tilde_homology,
};
use clusterhom::trees::{self, DimensionMode, SignRule};
use clusterhom::{format_rational, parse_rational, Error, Q};

#[derive(Parser)]
#[command(
    name = "clusterhom",
    version,
    about = "Exact windowed computations for cluster and fine Floer complexes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Compute {
    /// Widening used for the stable Betti numbers.
    #[arg(long, default_value_t = 2)]
    margin: u32,
    /// Maximum number of basis elements in a window.
    #[arg(long, default_value_t = 200_000)]
    cap: usize,
}

impl Compute {
    fn options(self) -> HomologyOptions {
        HomologyOptions {
            margin: self.margin,
            cap: self.cap,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check degrees, normal forms and the structural rules of a spec.
    Validate { file: PathBuf },
    /// Check d^2 = 0 (or d_F^2 = 0 for a fine spec) in the window.
    #[command(name = "check-d2")]
    CheckD2 { file: PathBuf },
    /// Windowed homology with certified Betti numbers.
    Homology {
        file: PathBuf,
        #[command(flatten)]
        compute: Compute,
    },
    /// List free terms and the parity diagnostics of high ones.
    #[command(name = "free-terms")]
    FreeTerms { file: PathBuf },
    /// Build the acyclicity certificate from a free term.
    Certify {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        margin: u32,
    },
    /// Divide out all d0-pairs and print the reduced spec.
    #[command(name = "minimal-model")]
    MinimalModel {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        margin: u32,
        /// Also write the reduced spec here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The tilde module: d of each marked generator, alpha and d^2 checks.
    Tilde {
        file: PathBuf,
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
    /// Homology of the tilde module.
    #[command(name = "tilde-homology")]
    TildeHomology {
        file: PathBuf,
        #[command(flatten)]
        compute: Compute,
    },
    /// Pages E0 and E1 of the weight filtration.
    Sseq {
        file: PathBuf,
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
    /// Fine Floer complexes: d_F^2 check and homology.
    #[command(subcommand)]
    Fine(FineCommand),
    /// Identify the two coefficient rings of a fine spec.
    Symmetrize {
        file: PathBuf,
        /// `cl1name=cl0name`, once per generator.
        #[arg(long = "identify", value_name = "CL1=CL0")]
        identify: Vec<String>,
    },
    /// Check that a map given on generators commutes with the differentials.
    #[command(name = "chain-map")]
    ChainMap {
        source: PathBuf,
        /// Target spec; defaults to the source.
        target: Option<PathBuf>,
        /// `name=expression` for each source generator.
        #[arg(long = "gen", value_name = "NAME=EXPR")]
        gens: Vec<String>,
        /// `class=class expression` for each source class.
        #[arg(long = "class", value_name = "CLASS=EXPR")]
        classes: Vec<String>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
        /// Check the projection to word length one instead.
        #[arg(long)]
        linear: bool,
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
    /// Cluster trees: validation, dimensions and boundary splittings.
    #[command(subcommand)]
    Trees(TreesCommand),
    /// Built-in worked examples.
    #[command(subcommand)]
    Example(ExampleCommand),
    /// Maslov constraints for S^1 x S^{n-1}.
    #[command(name = "maslov-scan")]
    MaslovScan {
        #[arg(long)]
        n: i64,
    },
    /// Print a spec, fine spec or tree file in canonical form.
    Print { file: PathBuf },
}

#[derive(Subcommand)]
enum FineCommand {
    /// Check the s(a) splitting and d_F^2 = 0 in the window.
    #[command(name = "check-d2")]
    CheckD2 { file: PathBuf },
    /// Windowed homology of the fine complex.
    Homology {
        file: PathBuf,
        #[command(flatten)]
        compute: Compute,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Cluster,
    Fine,
}

#[derive(Subcommand)]
enum TreesCommand {
    /// Validate a tree file.
    Validate { file: PathBuf },
    /// Expected dimension of a moduli space.
    Dim {
        file: PathBuf,
        #[arg(long)]
        source: String,
        /// Space-separated end names.
        #[arg(long, default_value = "")]
        ends: String,
        #[arg(long, default_value = "0")]
        class: String,
        #[arg(long, value_enum, default_value = "cluster")]
        mode: Mode,
    },
    /// Enumerate boundary splittings of a set of ends.
    Splittings {
        file: PathBuf,
        /// Generator names, separated by commas or spaces.
        #[arg(long, default_value = "")]
        ends: String,
        /// Class expression such as `2*lam0`.
        #[arg(long, default_value = "0")]
        class: String,
        /// Print at most this many rows.
        #[arg(long, default_value_t = 40)]
        show: usize,
    },
    /// Re-derive d^2 from the splittings and compare.
    Consistency {
        file: PathBuf,
        /// Use the sign-flipped table (negative control).
        #[arg(long)]
        flipped: bool,
    },
}

#[derive(Args, Clone, Default)]
struct WindowArgs {
    #[arg(long)]
    cutoff: Option<String>,
    #[arg(long = "word-len")]
    word_len: Option<u32>,
    /// `lo..hi` for every class.
    #[arg(long = "box", allow_hyphen_values = true)]
    exponent_box: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    degrees: Option<String>,
}

impl WindowArgs {
    fn apply(&self, mut w: Window) -> anyhow::Result<Window> {
        if let Some(c) = &self.cutoff {
            w.weight_cutoff = parse_rational(c).ok_or_else(|| anyhow!("malformed cutoff `{c}`"))?;
        }
        if let Some(l) = self.word_len {
            w.max_word_len = l;
        }
        if let Some(b) = &self.exponent_box {
            let (lo, hi) = int_range(b)?;
            w.exponent_box = vec![(lo, hi); w.exponent_box.len()];
        }
        if let Some(d) = &self.degrees {
            let (lo, hi) = int_range(d)?;
            w.degrees = (Q::from_integer(lo.into()), Q::from_integer(hi.into()));
        }
        Ok(Window::new(
            w.weight_cutoff,
            w.max_word_len,
            w.exponent_box,
            w.degrees,
        )?)
    }
}

type DegreeOf = Box<dyn Fn(&str) -> anyhow::Result<Q>>;

fn int_range(s: &str) -> anyhow::Result<(i64, i64)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("expected lo..hi, found `{s}`"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

#[derive(Clone, Copy, ValueEnum)]
enum Pattern {
    Circle,
    Torus,
    SpherePair,
}

#[derive(Subcommand)]
enum ExampleCommand {
    /// The circle: validation, d^2, free terms, certificate and homology.
    S1 {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 2)]
        margin: u32,
        /// Print the spec in file form first.
        #[arg(long)]
        print: bool,
    },
    /// A Morse complex without bubbling and its homology.
    #[command(name = "no-bubbling")]
    NoBubbling {
        #[arg(long, value_enum, default_value = "torus")]
        pattern: Pattern,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 2)]
        margin: u32,
        #[arg(long)]
        print: bool,
    },
    /// The fine complex of a circle and a line.
    #[command(name = "circle-line")]
    CircleLine {
        /// Flip the sign of `(dm) a` in `d_F b` (negative control).
        #[arg(long)]
        flipped: bool,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 2)]
        margin: u32,
        #[arg(long)]
        print: bool,
    },
}

/// Human text, the key/value block and the outcome.
#[derive(Default)]
struct Report {
    text: String,
    kv: Vec<(String, String)>,
    failed: bool,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn kv(&mut self, k: impl Into<String>, v: impl ToString) {
        self.kv.push((k.into(), v.to_string()));
    }

    fn extend(&mut self, kv: Vec<(String, String)>) {
        self.kv.extend(kv);
    }

    fn fail_unless(&mut self, ok: bool) {
        self.failed |= !ok;
    }

    fn emit(mut self) -> ExitCode {
        self.kv.push((
            "status".into(),
            if self.failed { "fail" } else { "ok" }.into(),
        ));
        let mut block = String::from("---report---\n");
        for (k, v) in &self.kv {
            block.push_str(&format!("{k} = {v}\n"));
        }
        block.push_str("---report---\n");
        let mut out = std::io::stdout().lock();
        // a closed pipe (e.g. `| head`) is not an error of the computation
        let _ = out
            .write_all(self.text.as_bytes())
            .and_then(|()| out.write_all(block.as_bytes()))
            .and_then(|()| out.flush());
        ExitCode::from(if self.failed { 1 } else { 0 })
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> anyhow::Result<SpecFile> {
    format::parse_file(&read(path)?).with_context(|| path.display().to_string())
}

fn load_complex(path: &Path) -> anyhow::Result<ComplexFile> {
    match load(path)? {
        SpecFile::Complex(c) => Ok(c),
        SpecFile::Fine(_) => bail!("{} is a fine spec; use the `fine` commands", path.display()),
    }
}

fn load_fine(path: &Path) -> anyhow::Result<FineFile> {
    match load(path)? {
        SpecFile::Fine(f) => Ok(f),
        SpecFile::Complex(_) => bail!("{} is not a fine spec", path.display()),
    }
}

fn window_of(w: &Option<Window>, path: &Path) -> anyhow::Result<Window> {
    w.clone()
        .ok_or_else(|| anyhow!("{}: no window in [config]", path.display()))
}

fn homology_report(r: &mut Report, h: &HomologyReport) {
    r.line(h.table());
    let certified: Vec<_> = h.certified().collect();
    r.kv("certified_degrees", certified.len());
    r.kv("certified_all_zero", certified.iter().all(|d| d.betti == 0));
    r.extend(h.key_values("homology."));
}

fn cmd_validate(path: &Path) -> anyhow::Result<Report> {
    let mut r = Report::default();
    match load(path)? {
        SpecFile::Complex(c) => {
            let v = c.spec.validate();
            for (i, x) in v.iter().enumerate() {
                r.line(format!("violation: {x}"));
                r.kv(format!("violation.{i}"), x);
            }
            r.kv("violations", v.len());
            r.fail_unless(v.is_empty());
        }
        SpecFile::Fine(f) => {
            let v = f.spec.validate();
            for (i, x) in v.iter().enumerate() {
                let text = format!("{}: {:?} ({})", x.intersection, x.kind, x.detail);
                r.line(format!("violation: {text}"));
                r.kv(format!("violation.{i}"), text);
            }
            r.kv("violations", v.len());
            r.fail_unless(v.is_empty());
        }
    }
    r.kv("valid", !r.failed);
    if !r.failed {
        r.line("valid");
    }
    Ok(r)
}

fn check_d2_complex(r: &mut Report, spec: &ComplexSpec, w: &Window) {
    match spec.check_d_squared(w) {
        Ok(()) => {
            r.line("d^2 = 0 in the window");
            r.kv("d2", "zero");
        }
        Err(e) => {
            let residual = show(&spec.alg, &e.residual);
            r.line(format!("d^2 {} = {residual}", e.generator));
            r.kv("d2", "nonzero");
            r.kv("d2.generator", &e.generator);
            r.kv("d2.residual", residual);
            r.failed = true;
        }
    }
}

fn check_d2_fine(r: &mut Report, f: &FineSpec, w: &Window) {
    if let Err((name, s)) = f.check_sa_squared(&w.filtration()) {
        let text = clusterhom::fine::describe_ring(f, &s);
        r.line(format!("s({name})^2 = {text}"));
        r.kv("sa_squared", "nonzero");
        r.kv("sa_squared.intersection", name);
        r.failed = true;
    } else {
        r.kv("sa_squared", "zero");
    }
    match f.check_df_squared(w) {
        Ok(()) => {
            r.line("d_F^2 = 0 in the window");
            r.kv("d2", "zero");
        }
        Err(e) => {
            r.line(describe_failure(f, &e));
            r.kv("d2", "nonzero");
            r.kv("d2.intersection", &e.intersection);
            r.kv("d2.residual", f.show(&e.residual));
            r.failed = true;
        }
    }
}

fn cmd_check_d2(path: &Path) -> anyhow::Result<Report> {
    let mut r = Report::default();
    match load(path)? {
        SpecFile::Complex(c) => check_d2_complex(&mut r, &c.spec, &window_of(&c.window, path)?),
        SpecFile::Fine(f) => check_d2_fine(&mut r, &f.spec, &window_of(&f.window, path)?),
    }
    Ok(r)
}

fn cmd_homology(path: &Path, compute: Compute) -> anyhow::Result<Report> {
    let mut r = Report::default();
    let h = match load(path)? {
        SpecFile::Complex(c) => homology(&c.spec, &window_of(&c.window, path)?, compute.options())?,
        SpecFile::Fine(f) => {
            fine_homology(&f.spec, &window_of(&f.window, path)?, compute.options())?
        }
    };
    homology_report(&mut r, &h);
    r.fail_unless(h.d2_window);
    Ok(r)
}

fn describe_free_term(spec: &ComplexSpec, t: &FreeTerm) -> String {
    format!(
        "({}, {}, {})",
        t.name,
        spec.describe_exponent(&t.exponent),
        format_rational(&t.coefficient)
    )
}

fn cmd_free_terms(path: &Path) -> anyhow::Result<Report> {
    let c = load_complex(path)?;
    let mut r = Report::default();
    let report = find_free_terms(&c.spec);
    r.kv("free_terms", report.witnesses.len());
    for (i, t) in report.witnesses.iter().enumerate() {
        let d = describe_free_term(&c.spec, t);
        r.line(format!("free term {d}"));
        r.kv(format!("free_term.{i}"), d);
    }
    for p in &report.parity {
        r.line(format!(
            "high free term on {} (index {}): parity {}",
            p.name,
            p.index,
            if p.passed { "ok" } else { "violated" }
        ));
        r.kv(format!("parity.{}", p.name), p.passed);
    }
    if report.witnesses.is_empty() {
        r.line("no free terms");
    }
    r.kv("has_high", report.has_high());
    Ok(r)
}

fn certify_into(r: &mut Report, spec: &ComplexSpec, w: &Window, margin: u32) -> anyhow::Result<()> {
    match acyclicity_certificate(spec, w, margin) {
        Ok(cert) => {
            let tau = show(&spec.alg, &cert.tau);
            let c = show(&spec.alg, &cert.c);
            r.line(format!(
                "witness {}",
                describe_free_term(spec, &cert.witness)
            ));
            r.line(format!("tau = {tau}"));
            r.line(format!("b = d tau - 1 = {}", show(&spec.alg, &cert.b)));
            r.line(format!("c = {c}"));
            r.line(format!("d(c tau) = 1: {}", cert.unit_is_boundary));
            r.kv("certificate.tau", tau);
            r.kv("certificate.c", c);
            r.kv("certificate.unit_is_boundary", cert.unit_is_boundary);
            r.kv("certificate.c_is_cycle", cert.c_is_cycle);
            r.kv("certificate.verified", cert.verified());
            r.fail_unless(cert.verified());
            Ok(())
        }
        Err(e @ (Error::NoFreeTerm | Error::NonConvergent(_))) => {
            r.line(format!("no certificate: {e}"));
            r.kv("certificate.verified", false);
            r.failed = true;
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_certify(path: &Path, margin: u32) -> anyhow::Result<Report> {
    let c = load_complex(path)?;
    let mut r = Report::default();
    certify_into(&mut r, &c.spec, &window_of(&c.window, path)?, margin)?;
    Ok(r)
}

fn cmd_minimal_model(path: &Path, margin: u32, out: Option<&Path>) -> anyhow::Result<Report> {
    let c = load_complex(path)?;
    let w = window_of(&c.window, path)?;
    let mut r = Report::default();
    let (reduced, trace) = match minimal_model(&c.spec, &w, margin) {
        Ok(x) => x,
        Err(e @ Error::NonConvergent(_)) => {
            r.line(format!("reduction failed: {e}"));
            r.failed = true;
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    let text = format::print_complex(&ComplexFile {
        spec: reduced.clone(),
        window: Some(w.clone()),
        explicit_order: false,
    });
    r.line(text.trim_end());
    for (new, old) in &trace.basis_change {
        r.line(format!("# basis change: {new} = {old}"));
    }
    for s in &trace.steps {
        r.line(format!(
            "# divided out ({}, {}), {} := {}",
            s.x, s.y, s.y, s.y_image
        ));
    }
    let phi = ChainMap::Algebra {
        map: trace.projection.clone(),
        shift: 0,
    };
    let check = check_chain_map(&phi, &c.spec, &reduced, &w, 200_000)?;
    let names: Vec<&str> = reduced
        .generators()
        .iter()
        .map(|g| g.name.as_str())
        .collect();
    r.kv("generators", names.join(" "));
    r.kv("steps", trace.steps.len());
    r.kv("d0_zero", !reduced.has_d0());
    r.kv("projection_chain_map", check.is_ok());
    if let Err(e) = &check {
        r.line(format!("# projection is not a chain map: {e}"));
    }
    r.fail_unless(check.is_ok());
    if let Some(p) = out {
        fs::write(p, &text).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(r)
}

fn cmd_tilde(path: &Path, cap: usize) -> anyhow::Result<Report> {
    let c = load_complex(path)?;
    let w = window_of(&c.window, path)?;
    let spec = &c.spec;
    let mut r = Report::default();
    for (v, g) in spec.generators().iter().enumerate() {
        let t = ModuleElement::basis(clusterhom::Monomial::unit(spec.alg.classes()), v);
        let d = tilde_d_window(spec, &tilde_d(spec, &t), &w);
        r.line(format!("d {}~ = {}", g.name, show_tilde(&spec.alg, &d)));
    }
    let samples = spec.alg.enumerate_window(&w, cap)?;
    let alpha_ok = check_alpha_chain(spec, &w, &samples);
    let d2_ok = check_tilde_d_squared(spec, &w);
    if let Err(e) = &alpha_ok {
        r.line(format!(
            "alpha d - d alpha at {}: {}",
            show(
                &spec.alg,
                &Element::monomial(e.sample.clone(), Q::from_integer(1.into()))
            ),
            show_tilde(&spec.alg, &e.residual)
        ));
    }
    if let Err(e) = &d2_ok {
        r.line(format!(
            "d^2 on the tilde module: {}",
            show_tilde(&spec.alg, &e.residual)
        ));
    }
    r.kv("alpha_chain", alpha_ok.is_ok());
    r.kv("alpha_samples", samples.len());
    r.kv("tilde_d2", if d2_ok.is_ok() { "zero" } else { "nonzero" });
    r.fail_unless(alpha_ok.is_ok() && d2_ok.is_ok());
    Ok(r)
}

fn cmd_tilde_homology(path: &Path, compute: Compute) -> anyhow::Result<Report> {
    let c = load_complex(path)?;
    let h = tilde_homology(&c.spec, &window_of(&c.window, path)?, compute.options())?;
    let mut r = Report::default();
    homology_report(&mut r, &h);
    r.fail_unless(h.d2_window);
    Ok(r)
}

fn cmd_sseq(path: &Path, cap: usize) -> anyhow::Result<Report> {
    let c = load_complex(path)?;
    let opts = HomologyOptions {
        cap,
        ..HomologyOptions::default()
    };
    let (e0, e1) = pages(&c.spec, &window_of(&c.window, path)?, opts)?;
    let mut r = Report::default();
    r.line(e0.table());
    r.line(e1.table());
    r.kv(
        "E1_equals_E0",
        e0.entries
            .iter()
            .zip(&e1.entries)
            .all(|(a, b)| a.dim == b.dim),
    );
    r.extend(e0.key_values(""));
    r.extend(e1.key_values(""));
    Ok(r)
}

fn cmd_symmetrize(path: &Path, identify: &[String]) -> anyhow::Result<Report> {
    let f = load_fine(path)?;
    let pairs = identify
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| anyhow!("expected CL1=CL0, found `{s}`"))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let sym = match f.spec.symmetrize(&pairs) {
        Ok(s) => s,
        Err(e @ Error::DegreeMismatch(_)) => {
            let mut r = Report::default();
            r.line(format!("cannot symmetrize: {e}"));
            r.failed = true;
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    let mut r = Report::default();
    r.line(format::print_fine(&FineFile {
        spec: sym.clone(),
        window: f.window.clone(),
    }));
    let d2 = f.window.as_ref().map(|w| sym.check_df_squared(w).is_ok());
    if let Some(ok) = d2 {
        r.kv("d2", if ok { "zero" } else { "nonzero" });
        r.fail_unless(ok);
    }
    r.kv("ring_generators", sym.alg().generators.len());
    Ok(r)
}

fn cmd_chain_map(
    source: &Path,
    target: Option<&Path>,
    gens: &[String],
    classes: &[String],
    shift: i64,
    linear: bool,
    cap: usize,
) -> anyhow::Result<Report> {
    let src = load_complex(source)?;
    let w = window_of(&src.window, source)?;
    let mut r = Report::default();
    let (phi, tgt) = if linear {
        (ChainMap::LinearPart, src.spec.linear_part())
    } else {
        let tgt = match target {
            Some(p) => load_complex(p)?.spec,
            None => src.spec.clone(),
        };
        let mut map = AlgebraMap::identity(&src.spec.alg);
        if src.spec.generators().len() != tgt.generators().len()
            || src.spec.basis().len() != tgt.basis().len()
        {
            // no identity default between different algebras
            map.images = vec![Element::zero(); src.spec.generators().len()];
            map.class_images = vec![tgt.basis().zero(); src.spec.basis().len()];
        }
        for g in gens {
            let (name, expr) = g
                .split_once('=')
                .ok_or_else(|| anyhow!("expected NAME=EXPR, found `{g}`"))?;
            let id = src.spec.alg.gen_id(name.trim())?;
            map.images[id] = parse_element(&tgt.alg, expr.trim(), Origin::start())?;
        }
        for c in classes {
            let (name, expr) = c
                .split_once('=')
                .ok_or_else(|| anyhow!("expected CLASS=EXPR, found `{c}`"))?;
            let i = src
                .spec
                .basis()
                .index_of(name.trim())
                .ok_or_else(|| Error::UnknownClass(name.trim().to_string()))?;
            map.class_images[i] = parse_exponent(tgt.basis(), expr.trim(), Origin::start())?;
        }
        r.kv(
            "preserves_filtration",
            clusterhom::complex::preserves_filtration(&map, &tgt.alg),
        );
        (ChainMap::Algebra { map, shift }, tgt)
    };
    match check_chain_map(&phi, &src.spec, &tgt, &w, cap)? {
        Ok(()) => {
            r.line("chain map in the window");
            r.kv("chain_map", true);
        }
        Err(e) => {
            r.line(format!("not a chain map: {e}"));
            r.kv("chain_map", false);
            r.failed = true;
        }
    }
    Ok(r)
}

fn names(s: &str) -> Vec<&str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|n| !n.is_empty())
        .collect()
}

fn cmd_trees(cmd: &TreesCommand) -> anyhow::Result<Report> {
    let mut r = Report::default();
    match cmd {
        TreesCommand::Validate { file } => {
            let t = format::parse_tree(&read(file)?).with_context(|| file.display().to_string())?;
            let v = trees::validate_tree(&t.tree);
            for (i, x) in v.iter().enumerate() {
                r.line(format!("violation: {x}"));
                r.kv(format!("violation.{i}"), x);
            }
            if let Some(c) = t.tree.canonical_form() {
                r.kv("canonical", c);
            }
            r.kv("violations", v.len());
            r.kv("valid", v.is_empty());
            if v.is_empty() {
                r.line("valid");
            }
            r.fail_unless(v.is_empty());
        }
        TreesCommand::Dim {
            file,
            source,
            ends,
            class,
            mode,
        } => {
            let (degree_of, basis): (DegreeOf, _) = match load(file)? {
                SpecFile::Complex(c) => {
                    let spec = c.spec;
                    let basis = spec.basis().clone();
                    (
                        Box::new(move |n: &str| {
                            Ok(Q::from_integer(
                                spec.alg.gen_degree(spec.alg.gen_id(n)?).into(),
                            ))
                        }),
                        basis,
                    )
                }
                SpecFile::Fine(f) => {
                    let spec = f.spec;
                    let basis = spec.alg().basis.clone();
                    (
                        Box::new(move |n: &str| match spec.intersection_id(n) {
                            Ok(a) => Ok(spec.intersections[a].degree.clone()),
                            Err(_) => Ok(Q::from_integer(
                                spec.alg().gen_degree(spec.alg().gen_id(n)?).into(),
                            )),
                        }),
                        basis,
                    )
                }
            };
            let lam = parse_exponent(&basis, class, Origin::start())?;
            let src = degree_of(source)?;
            let end_degrees = names(ends)
                .iter()
                .map(|n| degree_of(n))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let mode = match mode {
                Mode::Cluster => DimensionMode::Cluster,
                Mode::Fine => DimensionMode::Fine,
            };
            let dim = trees::expected_dimension(mode, &src, &end_degrees, &lam, &basis)?;
            r.line(format!("dimension {dim}"));
            r.kv("dimension", dim);
        }
        TreesCommand::Splittings {
            file,
            ends,
            class,
            show,
        } => {
            let c = load_complex(file)?;
            let w = window_of(&c.window, file)?;
            let alg = &c.spec.alg;
            let mut ids = names(ends)
                .iter()
                .map(|n| alg.gen_id(n))
                .collect::<Result<Vec<_>, _>>()?;
            ids.sort();
            if ids.len() > 20 {
                bail!("at most 20 ends");
            }
            let lam = parse_exponent(&alg.basis, class, Origin::start())?;
            let table = trees::splitting_table(alg, &ids, &lam, &w.exponent_box);
            for row in table.iter().take(*show) {
                r.line(row);
            }
            if table.len() > *show {
                r.line(format!("... {} more", table.len() - show));
            }
            let expected =
                trees::splitting_count(ids.len(), alg.generators.len(), &lam, &w.exponent_box);
            r.kv("splittings", table.len());
            r.kv("expected_count", expected);
            r.fail_unless(table.len() == expected);
        }
        TreesCommand::Consistency { file, flipped } => {
            let c = load_complex(file)?;
            let w = window_of(&c.window, file)?;
            let rule = if *flipped {
                SignRule::Flipped
            } else {
                SignRule::Koszul
            };
            match trees::d_squared_consistency(&c.spec, &w, rule) {
                Ok(()) => {
                    r.line("splittings reproduce d^2");
                    r.kv("consistent", true);
                }
                Err(e) => {
                    r.line(e.to_string());
                    r.kv("consistent", false);
                    r.kv("mismatch.generator", &e.generator);
                    r.kv("mismatch.monomial", &e.monomial);
                    r.failed = true;
                }
            }
        }
    }
    Ok(r)
}

fn pattern(p: Pattern) -> MorsePattern {
    match p {
        Pattern::Circle => scenarios::circle_pattern(),
        Pattern::Torus => scenarios::torus_pattern(),
        Pattern::SpherePair => scenarios::sphere_extra_pair_pattern(),
    }
}

fn cmd_example(cmd: &ExampleCommand) -> anyhow::Result<Report> {
    let mut r = Report::default();
    match cmd {
        ExampleCommand::S1 {
            window,
            margin,
            print,
        } => {
            let start = Instant::now();
            let w = window.apply(scenarios::s1_window())?;
            let spec = scenarios::example_s1(&w, *margin);
            if *print {
                r.line(format::print_complex(&ComplexFile {
                    spec: spec.clone(),
                    window: Some(w.clone()),
                    explicit_order: false,
                }));
            }
            let v = spec.validate();
            r.line(format!("validate: {} violations", v.len()));
            r.kv("validate", v.is_empty());
            r.fail_unless(v.is_empty());
            check_d2_complex(&mut r, &spec, &w);
            let free = find_free_terms(&spec);
            for (i, t) in free.witnesses.iter().enumerate() {
                let d = describe_free_term(&spec, t);
                r.line(format!("free term {d}"));
                r.kv(format!("free_term.{i}"), d);
            }
            certify_into(&mut r, &spec, &w, *margin)?;
            let h = homology(
                &spec,
                &w,
                HomologyOptions {
                    margin: *margin,
                    ..HomologyOptions::default()
                },
            )?;
            homology_report(&mut r, &h);
            let certified: Vec<_> = h.certified().collect();
            r.fail_unless(!certified.is_empty() && certified.iter().all(|d| d.betti == 0));
            r.kv("elapsed_ms", start.elapsed().as_millis());
        }
        ExampleCommand::NoBubbling {
            pattern: p,
            window,
            margin,
            print,
        } => {
            let p = pattern(*p);
            let w = window.apply(scenarios::s1_window())?;
            let spec = scenarios::example_no_bubbling(
                p.name,
                p.generators.clone(),
                &p.d0,
                scenarios::single_class_basis(),
            )?;
            if *print {
                r.line(format::print_complex(&ComplexFile {
                    spec: spec.clone(),
                    window: Some(w.clone()),
                    explicit_order: false,
                }));
            }
            let indices: Vec<String> = p.homology_indices().iter().map(i64::to_string).collect();
            r.line(format!(
                "{}: Morse homology in indices {}",
                p.name,
                indices.join(" ")
            ));
            r.kv("morse_homology_indices", indices.join(" "));
            let h = homology(
                &spec,
                &w,
                HomologyOptions {
                    margin: *margin,
                    ..HomologyOptions::default()
                },
            )?;
            homology_report(&mut r, &h);
        }
        ExampleCommand::CircleLine {
            flipped,
            window,
            margin,
            print,
        } => {
            let w = window.apply(scenarios::s1_window())?;
            let probe = builtin_circle_line(0, *flipped);
            let len = w
                .widened(*margin)
                .filtration_quotient(&probe.alg().basis)
                .max_word_len;
            let spec = builtin_circle_line(len, *flipped);
            if *print {
                r.line(format::print_fine(&FineFile {
                    spec: spec.clone(),
                    window: Some(w.clone()),
                }));
            }
            check_d2_fine(&mut r, &spec, &w);
            if !r.failed {
                let h = fine_homology(
                    &spec,
                    &w,
                    HomologyOptions {
                        margin: *margin,
                        ..HomologyOptions::default()
                    },
                )?;
                homology_report(&mut r, &h);
            }
        }
    }
    Ok(r)
}

fn cmd_maslov_scan(n: i64) -> anyhow::Result<Report> {
    let v = scenarios::maslov_scan(n)?;
    let mut r = Report::default();
    for s in &v.log {
        r.line(s.to_string());
    }
    for s in &v.rejected {
        r.line(s.to_string());
    }
    let set: Vec<String> = v.required_set.iter().map(i64::to_string).collect();
    let set = format!("{{{}}}", set.join(","));
    r.line(format!("n = {n} ({:?}): Im(mu) meets {set}", v.parity));
    r.kv("n", n);
    r.kv("parity", format!("{:?}", v.parity).to_lowercase());
    r.kv("required_set", set);
    for (i, s) in v.log.iter().enumerate() {
        r.kv(format!("log.{i}.maslov"), s.maslov);
        r.kv(
            format!("log.{i}.equation"),
            format!(
                "{} - {} + {} = 1",
                s.source_degree, s.target_degree, s.maslov
            ),
        );
    }
    Ok(r)
}

fn cmd_print(path: &Path) -> anyhow::Result<Report> {
    let text = read(path)?;
    let mut r = Report::default();
    let printed = if text.contains("[vertices]") {
        format::print_tree(&format::parse_tree(&text).with_context(|| path.display().to_string())?)
    } else {
        format::print_file(&format::parse_file(&text).with_context(|| path.display().to_string())?)
    };
    r.kv("canonical", printed == text);
    r.text = printed;
    Ok(r)
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::CheckD2 { file } => cmd_check_d2(&file),
        Command::Homology { file, compute } => cmd_homology(&file, compute),
        Command::FreeTerms { file } => cmd_free_terms(&file),
        Command::Certify { file, margin } => cmd_certify(&file, margin),
        Command::MinimalModel { file, margin, out } => {
            cmd_minimal_model(&file, margin, out.as_deref())
        }
        Command::Tilde { file, cap } => cmd_tilde(&file, cap),
        Command::TildeHomology { file, compute } => cmd_tilde_homology(&file, compute),
        Command::Sseq { file, cap } => cmd_sseq(&file, cap),
        Command::Fine(FineCommand::CheckD2 { file }) => {
            let f = load_fine(&file)?;
            let mut r = Report::default();
            check_d2_fine(&mut r, &f.spec, &window_of(&f.window, &file)?);
            Ok(r)
        }
        Command::Fine(FineCommand::Homology { file, compute }) => {
            load_fine(&file)?;
            cmd_homology(&file, compute)
        }
        Command::Symmetrize { file, identify } => cmd_symmetrize(&file, &identify),
        Command::ChainMap {
            source,
            target,
            gens,
            classes,
            shift,
            linear,
            cap,
        } => cmd_chain_map(
            &source,
            target.as_deref(),
            &gens,
            &classes,
            shift,
            linear,
            cap,
        ),
        Command::Trees(t) => cmd_trees(&t),
        Command::Example(e) => cmd_example(&e),
        Command::MaslovScan { n } => cmd_maslov_scan(n),
        Command::Print { file } => cmd_print(&file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(r) => r.emit(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
