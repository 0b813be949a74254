//! Command-line front end: every analysis as a reproducible report.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad necklace, empty
//! polytope, failed quadrature), 2 on usage errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use shangles::cyclic;
use shangles::duality;
use shangles::fixed_angles::{self, PolytopeClass, SweepTemplate};
use shangles::geometry;
use shangles::necklace::{format_rational, parse_rational_token, Necklace, Rational};
use shangles::scmap;
use shangles::tours;

#[derive(Parser)]
#[command(
    name = "shangles",
    version,
    about = "Moduli polytopes of convex planar polygons with fixed vertex angles"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classification, majority dominance, dipole poles, and all ties
    Analyze {
        /// Necklace, e.g. `1,3,2,4,5` or `1,3/2,2`
        necklace: String,
    },
    /// f-vector and facet-size multiset of the face lattice
    Fvector { necklace: String },
    /// Full face lattice as canonical JSON
    Lattice { necklace: String },
    /// Trigon and digon vertices with figures and realizations
    Vertices { necklace: String },
    /// Dual-cyclic verification: explicit map for odd n, search for even n
    Duality { necklace: String },
    /// Small and odd tours mod an odd modulus
    Tours { n: usize },
    /// Sweep one necklace entry across an interval
    Sweep {
        /// Template with `?` marking the swept entry, e.g. `1,3,1,4,2,?`
        template: String,
        /// Mark entry K of a plain necklace instead of using `?`
        #[arg(long)]
        index: Option<usize>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Conformal map from a fixed-lengths convex polygon into the
    /// fixed-angles polytope (JSON output)
    Scmap {
        /// Edge lengths as a necklace, e.g. `1,1,1,1,1`
        #[arg(long)]
        lengths: String,
        /// Exterior turns in radians; defaults to the inscribed polygon
        #[arg(long)]
        turns: Option<String>,
        /// Fit the boundary exponent at this vertex instead of mapping
        #[arg(long)]
        probe: Option<usize>,
        /// Turn values for the probe, comma-separated
        #[arg(long, default_value = "1e-2,3e-3,1e-3,3e-4,1e-4")]
        rhos: String,
    },
    /// Compare Gale facets of C_d(m) against the exact moment-curve oracle
    OracleCheck { d: usize, m: usize },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Analyze { necklace } => analyze(&parse_necklace(&necklace)?, cli.json),
        Command::Fvector { necklace } => fvector(&parse_necklace(&necklace)?, cli.json),
        Command::Lattice { necklace } => lattice(&parse_necklace(&necklace)?),
        Command::Vertices { necklace } => vertices(&parse_necklace(&necklace)?, cli.json),
        Command::Duality { necklace } => duality_cmd(&parse_necklace(&necklace)?, cli.json),
        Command::Tours { n } => tours_cmd(n, cli.json),
        Command::Sweep { template, index, from, to } => {
            sweep_cmd(&template, index, &from, &to, cli.json)
        }
        Command::Scmap { lengths, turns, probe, rhos } => {
            scmap_cmd(&lengths, turns.as_deref(), probe, &rhos)
        }
        Command::OracleCheck { d, m } => oracle_check(d, m, cli.json),
    }
}

fn parse_necklace(text: &str) -> Result<Necklace, String> {
    Necklace::parse(text).map_err(|e| e.to_string())
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    parse_rational_token(text).map_err(|e| e.to_string())
}

/// Rounds to 12 significant digits so identical inputs print identical
/// bytes across runs.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float reparses")
}

fn f64s(values: &[f64]) -> Vec<Value> {
    values.iter().map(|&v| json!(sig12(v))).collect()
}

fn class_name(class: PolytopeClass) -> &'static str {
    match class {
        PolytopeClass::Empty => "empty",
        PolytopeClass::Point => "point",
        PolytopeClass::FullDim => "full-dimensional",
    }
}

fn print_value(value: &Value) {
    println!("{}", serde_json::to_string(value).expect("json prints"));
}

/// Full realization (headings, lengths, vertex coordinates) for plotting.
fn realization_json(real: &geometry::PolygonRealization) -> Value {
    json!({
        "headings": f64s(&real.headings),
        "lengths": f64s(&real.lengths),
        "vertices": real
            .vertices
            .iter()
            .map(|&(x, y)| json!([sig12(x), sig12(y)]))
            .collect::<Vec<Value>>(),
    })
}

fn analyze(s: &Necklace, as_json: bool) -> Result<(), String> {
    let n = s.len();
    let class = fixed_angles::classify_polytope(s);
    let majority = s.is_majority_dominant();
    let dipole =
        if n.is_multiple_of(2) { s.dipole_tie_breaking().map_err(|e| e.to_string())? } else { None };
    let ties = s.substring_ties();
    let subset_ties = s.subset_ties(shangles::necklace::DEFAULT_SUBSET_CAP);
    if as_json {
        let ties_json: Vec<Value> = ties
            .iter()
            .map(|t| json!({"len": t.substring.len, "start": t.substring.start, "width": t.width}))
            .collect();
        let subset_json: Value = match &subset_ties {
            Ok(list) => json!(list
                .iter()
                .map(|t| json!({
                    "reorder_count": t.reorder_count.to_string(),
                    "signature": [t.signature.0, t.signature.1],
                    "subset": t.subset,
                    "width": t.width,
                }))
                .collect::<Vec<Value>>()),
            Err(e) => json!({ "skipped": e.to_string() }),
        };
        print_value(&json!({
            "classification": class_name(class),
            "dipole": dipole.map(|(l, h)| json!({"heavy_pole": h, "light_pole": l})),
            "majority_dominant": majority,
            "n": n,
            "necklace": s.to_string(),
            "subset_ties": subset_json,
            "substring_ties": ties_json,
            "total": format_rational(s.total()),
        }));
        return Ok(());
    }
    println!("necklace: {s}  (n={n}, S={})", format_rational(s.total()));
    match class {
        PolytopeClass::FullDim => println!("classification: full-dimensional (dim {})", n - 3),
        other => println!("classification: {}", class_name(other)),
    }
    println!("majority dominant: {}", if majority { "yes" } else { "no" });
    if n.is_multiple_of(2) {
        match dipole {
            Some((l, h)) => println!("dipole tie-breaking: light pole {l}, heavy pole {h}"),
            None => println!("dipole tie-breaking: none"),
        }
    } else {
        println!("dipole tie-breaking: n/a (odd n)");
    }
    if ties.is_empty() {
        println!("substring ties: none");
    } else {
        for t in &ties {
            println!(
                "substring tie: start {} len {} (width {})",
                t.substring.start, t.substring.len, t.width
            );
        }
    }
    match subset_ties {
        Ok(list) if list.is_empty() => println!("subset ties: none"),
        Ok(list) => {
            for t in list {
                println!(
                    "subset tie: {{{}}} width {} signature ({},{}) reorderings {}",
                    t.subset.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
                    t.width,
                    t.signature.0,
                    t.signature.1,
                    t.reorder_count
                );
            }
        }
        Err(e) => println!("subset ties: skipped ({e})"),
    }
    Ok(())
}

fn fvector(s: &Necklace, as_json: bool) -> Result<(), String> {
    let lattice = fixed_angles::enumerate_faces(s).map_err(|e| e.to_string())?;
    let sizes = lattice.facet_sizes();
    if as_json {
        print_value(&json!({
            "facet_sizes": sizes,
            "fvector": lattice.fvector(),
            "n": s.len(),
            "necklace": s.to_string(),
        }));
        return Ok(());
    }
    let fv: Vec<String> = lattice.fvector().iter().map(|v| v.to_string()).collect();
    println!("fvector: {}", fv.join(" "));
    let sz: Vec<String> = sizes.iter().map(|v| v.to_string()).collect();
    println!("facet sizes: {}", sz.join(" "));
    Ok(())
}

fn lattice(s: &Necklace) -> Result<(), String> {
    let lattice = fixed_angles::enumerate_faces(s).map_err(|e| e.to_string())?;
    println!("{}", lattice.to_json_string());
    Ok(())
}

fn vertices(s: &Necklace, as_json: bool) -> Result<(), String> {
    let trigons = fixed_angles::trigon_vertices(s).map_err(|e| e.to_string())?;
    let digons = fixed_angles::digon_vertices(s).map_err(|e| e.to_string())?;
    let mut trigon_reports = Vec::new();
    for &(i, j, k) in &trigons {
        let zeros: fixed_angles::ZeroSet =
            (1..=s.len()).filter(|&e| e != i && e != j && e != k).collect();
        let face = fixed_angles::face_of_zero_set(s, &zeros)
            .map_err(|e| e.to_string())?
            .into_face()
            .expect("trigon gap triples are vertices");
        let figure = fixed_angles::vertex_figure(s, &face).map_err(|e| e.to_string())?;
        let realization = geometry::vertex_realization(s, &face).map_err(|e| e.to_string())?;
        trigon_reports.push((i, j, k, figure, realization));
    }
    let mut digon_reports = Vec::new();
    for (tie, face) in &digons {
        let figure = fixed_angles::vertex_figure(s, face).map_err(|e| e.to_string())?;
        let realization = geometry::vertex_realization(s, face).map_err(|e| e.to_string())?;
        digon_reports.push((tie.clone(), figure, realization));
    }
    if as_json {
        print_value(&json!({
            "digon_vertices": digon_reports
                .iter()
                .map(|(tie, figure, real)| json!({
                    "figure": figure.to_string(),
                    "realization": realization_json(real),
                    "residual": sig12(real.closure_residual()),
                    "tie_start": tie.substring.start,
                    "width": tie.width,
                }))
                .collect::<Vec<Value>>(),
            "n": s.len(),
            "necklace": s.to_string(),
            "trigon_vertices": trigon_reports
                .iter()
                .map(|(i, j, k, figure, real)| json!({
                    "figure": figure.to_string(),
                    "gaps": [i, j, k],
                    "realization": realization_json(real),
                    "residual": sig12(real.closure_residual()),
                }))
                .collect::<Vec<Value>>(),
        }));
        return Ok(());
    }
    println!("trigon vertices: {}", trigon_reports.len());
    for (i, j, k, figure, real) in &trigon_reports {
        let lens: Vec<String> = real.lengths.iter().map(|&l| format!("{:.12}", sig12(l))).collect();
        println!("  gaps ({i},{j},{k})  figure {figure}  lengths [{}]", lens.join(", "));
    }
    println!("digon vertices: {}", digon_reports.len());
    for (tie, figure, real) in &digon_reports {
        let lens: Vec<String> = real.lengths.iter().map(|&l| format!("{:.12}", sig12(l))).collect();
        println!(
            "  tie start {} width {}  figure {figure}  lengths [{}]",
            tie.substring.start,
            tie.width,
            lens.join(", ")
        );
    }
    Ok(())
}

fn duality_cmd(s: &Necklace, as_json: bool) -> Result<(), String> {
    let report = if s.len() % 2 == 1 {
        duality::verify_dual_cyclic_odd(s).map_err(|e| e.to_string())?
    } else {
        duality::verify_dual_cyclic_even(s).map_err(|e| e.to_string())?
    };
    if as_json {
        println!("{}", report.to_json_string());
        return Ok(());
    }
    println!("dual cyclic: {}", if report.verdict { "yes" } else { "no" });
    println!("method: {:?}", report.method);
    if let Some(witness) = &report.witness {
        let parts: Vec<String> = witness.iter().map(|v| v.to_string()).collect();
        println!("witness (facet edge i -> vertex): [{}]", parts.join(", "));
    }
    if let Some(cert) = &report.failure_certificate {
        println!("failure certificate: {cert:?}");
    }
    Ok(())
}

fn tours_cmd(n: usize, as_json: bool) -> Result<(), String> {
    let small = tours::enumerate_small(n).map_err(|e| e.to_string())?;
    let odd = tours::enumerate_odd(n).map_err(|e| e.to_string())?;
    if as_json {
        print_value(&json!({
            "count_formula": tours::tour_count(n),
            "n": n,
            "odd": odd.iter().map(|t| json!([t.normal.0, t.normal.1, t.normal.2])).collect::<Vec<Value>>(),
            "small": small.iter().map(|t| json!([t.normal.0, t.normal.1, t.normal.2])).collect::<Vec<Value>>(),
        }));
        return Ok(());
    }
    println!(
        "n = {n}: {} small tours, {} odd tours (formula {})",
        small.len(),
        odd.len(),
        tours::tour_count(n)
    );
    let fmt = |ts: &[tours::Tour]| -> String {
        ts.iter()
            .map(|t| format!("({},{},{})", t.normal.0, t.normal.1, t.normal.2))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("small: {}", fmt(&small));
    println!("odd:   {}", fmt(&odd));
    Ok(())
}

fn sweep_cmd(
    template_text: &str,
    index: Option<usize>,
    from: &str,
    to: &str,
    as_json: bool,
) -> Result<(), String> {
    let template = match index {
        Some(k) => {
            let necklace = parse_necklace(template_text)?;
            if k < 1 || k > necklace.len() {
                return Err(format!("--index {k} outside 1..={}", necklace.len()));
            }
            let entries = necklace
                .entries()
                .iter()
                .enumerate()
                .map(|(i, v)| if i + 1 == k { None } else { Some(v.clone()) })
                .collect();
            SweepTemplate::new(entries).map_err(|e| e.to_string())?
        }
        None => SweepTemplate::parse(template_text).map_err(|e| e.to_string())?,
    };
    let lo = parse_rational(from)?;
    let hi = parse_rational(to)?;
    if lo >= hi {
        return Err(format!("--from {from} must be below --to {to}"));
    }
    let critical = template.critical_values_between(&lo, &hi);
    let reports = fixed_angles::sweep_intervals(&template, &lo, &hi).map_err(|e| e.to_string())?;
    if as_json {
        let reports_json: Vec<Value> = reports
            .iter()
            .map(|r| {
                json!({
                    "class": class_name(r.class),
                    "facet_sizes": r.facet_sizes,
                    "fvector": r.fvector,
                    "ties": r.ties.iter().map(|t| json!({
                        "len": t.substring.len, "start": t.substring.start, "width": t.width
                    })).collect::<Vec<Value>>(),
                    "transitions": r.transitions.iter().map(|t| json!({
                        "simplex_pair": [t.simplex_pair.0, t.simplex_pair.1],
                        "width": t.width,
                    })).collect::<Vec<Value>>(),
                    "value": format_rational(&r.value),
                })
            })
            .collect();
        print_value(&json!({
            "critical_values": critical.iter().map(format_rational).collect::<Vec<String>>(),
            "index": template.marked_index(),
            "reports": reports_json,
        }));
        return Ok(());
    }
    let crit: Vec<String> = critical.iter().map(format_rational).collect();
    println!("critical values: {}", crit.join(" "));
    for r in &reports {
        let mut line = format!("sigma = {}: {}", format_rational(&r.value), class_name(r.class));
        if let Some(fv) = &r.fvector {
            let fv: Vec<String> = fv.iter().map(|v| v.to_string()).collect();
            line.push_str(&format!("  fvector ({})", fv.join(",")));
        }
        if let Some(sizes) = &r.facet_sizes {
            let sz: Vec<String> = sizes.iter().map(|v| v.to_string()).collect();
            line.push_str(&format!("  facets {{{}}}", sz.join(",")));
        }
        for t in &r.transitions {
            line.push_str(&format!(
                "  tie width {} expands to Delta_{} | Delta_{}",
                t.width, t.simplex_pair.0, t.simplex_pair.1
            ));
        }
        println!("{line}");
    }
    Ok(())
}

fn scmap_cmd(
    lengths_text: &str,
    turns_text: Option<&str>,
    probe: Option<usize>,
    rhos_text: &str,
) -> Result<(), String> {
    let s = parse_necklace(lengths_text)?;
    if let Some(k) = probe {
        let rhos: Vec<f64> = rhos_text
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad rho value {t:?}")))
            .collect::<Result<_, _>>()?;
        let report = scmap::boundary_exponent_probe(&s, k, &rhos).map_err(|e| e.to_string())?;
        print_value(&json!({
            "fit_residual": sig12(report.fit_residual),
            "q_analytic": sig12(report.q_analytic),
            "q_hat": sig12(report.q_hat),
            "samples": report.samples.iter().map(|p| json!({
                "edge_modulus": sig12(p.edge_modulus),
                "normalized_length": sig12(p.normalized_length),
                "rho": sig12(p.rho),
            })).collect::<Vec<Value>>(),
            "vertex": k,
        }));
        return Ok(());
    }
    let shape = match turns_text {
        Some(text) => {
            let turns: Vec<f64> = text
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad turn value {t:?}")))
                .collect::<Result<_, _>>()?;
            let sum = s.total().to_f64().expect("necklace total fits f64");
            let lengths: Vec<f64> = (1..=s.len())
                .map(|k| s.entry(k as i64).to_f64().expect("entry fits f64") / sum)
                .collect();
            scmap::FixedLengthsShape::new(lengths, turns, 0.0).map_err(|e| e.to_string())?
        }
        None => scmap::inscribed_shape(&s).map_err(|e| e.to_string())?,
    };
    let image = scmap::km_map_detailed(&s, &shape).map_err(|e| e.to_string())?;
    print_value(&json!({
        "closure_residual": sig12(image.closure_residual),
        "image_lengths": f64s(&image.lengths),
        "max_rel_change": sig12(image.max_rel_change),
        "nodes": image.nodes,
        "panels": image.panels,
        "shape_turns": f64s(shape.turns()),
    }));
    Ok(())
}

fn oracle_check(d: usize, m: usize, as_json: bool) -> Result<(), String> {
    let gale = cyclic::gale_facets(d, m).map_err(|e| e.to_string())?;
    let oracle = cyclic::moment_oracle_facets(d, m, None).map_err(|e| e.to_string())?;
    let primes: Vec<i64> = first_primes(m);
    let oracle_alt =
        cyclic::moment_oracle_facets(d, m, Some(&primes)).map_err(|e| e.to_string())?;
    let agree = gale == oracle && gale == oracle_alt;
    if as_json {
        print_value(&json!({
            "agree": agree,
            "d": d,
            "facet_count": gale.len(),
            "facets": gale,
            "m": m,
        }));
        if !agree {
            return Err("facet oracles disagree".to_string());
        }
        return Ok(());
    }
    println!("C_{d}({m}): {} facets by Gale evenness", gale.len());
    println!("moment oracle (t = 1..{m}): {}", if gale == oracle { "agree" } else { "DISAGREE" });
    println!(
        "moment oracle (t = first {m} primes): {}",
        if gale == oracle_alt { "agree" } else { "DISAGREE" }
    );
    if !agree {
        return Err("facet oracles disagree".to_string());
    }
    Ok(())
}

fn first_primes(count: usize) -> Vec<i64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2i64;
    while primes.len() < count {
        if (2..candidate).all(|f| candidate % f != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}
