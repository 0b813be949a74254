//! Python bindings for the shangles library: necklaces, fixed-angles face
//! lattices, cyclic polytope oracles, tours, duality checks, and the
//! conformal map to the fixed-angles polytope.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use shangles::fixed_angles::{self, PolytopeClass, SweepTemplate};
use shangles::necklace::{format_rational, Necklace, DEFAULT_SUBSET_CAP};
use shangles::{cyclic, duality, geometry, scmap, tours};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A necklace of positive rationals, the fixed external-angle shares (or
/// fixed edge lengths) of a convex polygon.
#[pyclass(name = "Necklace", module = "shangles_py")]
struct PyNecklace {
    inner: Necklace,
}

#[pymethods]
impl PyNecklace {
    /// Parses the text form, e.g. `"1,3,2,4,5"` or `"1,3/2,2"`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyNecklace { inner: Necklace::parse(text).map_err(value_err)? })
    }

    #[staticmethod]
    fn from_ints(entries: Vec<i64>) -> PyResult<Self> {
        Ok(PyNecklace { inner: Necklace::from_ints(&entries).map_err(value_err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Necklace(\"{}\")", self.inner)
    }

    fn entries(&self) -> Vec<String> {
        self.inner.entries().iter().map(format_rational).collect()
    }

    fn total(&self) -> String {
        format_rational(self.inner.total())
    }

    /// `"empty"`, `"point"`, or `"full-dimensional"`.
    fn classification(&self) -> &'static str {
        match fixed_angles::classify_polytope(&self.inner) {
            PolytopeClass::Empty => "empty",
            PolytopeClass::Point => "point",
            PolytopeClass::FullDim => "full-dimensional",
        }
    }

    fn is_majority_dominant(&self) -> bool {
        self.inner.is_majority_dominant()
    }

    /// `(light_pole, heavy_pole)` or `None`; raises on odd length.
    fn dipole_tie_breaking(&self) -> PyResult<Option<(usize, usize)>> {
        self.inner.dipole_tie_breaking().map_err(value_err)
    }

    /// Substring ties as `(start, len, width)` triples.
    fn substring_ties(&self) -> Vec<(usize, usize, usize)> {
        self.inner
            .substring_ties()
            .into_iter()
            .map(|t| (t.substring.start, t.substring.len, t.width))
            .collect()
    }

    /// Subset ties as `(subset, width, signature, reorder_count)`.
    #[allow(clippy::type_complexity)]
    fn subset_ties(&self) -> PyResult<Vec<(Vec<usize>, usize, (usize, usize), u128)>> {
        Ok(self
            .inner
            .subset_ties(DEFAULT_SUBSET_CAP)
            .map_err(value_err)?
            .into_iter()
            .map(|t| (t.subset, t.width, t.signature, t.reorder_count))
            .collect())
    }

    /// Proper-face counts `(f_0, ..., f_{n-4})`.
    fn fvector(&self) -> PyResult<Vec<usize>> {
        Ok(fixed_angles::enumerate_faces(&self.inner).map_err(value_err)?.fvector().to_vec())
    }

    /// Vertices per facet, sorted ascending.
    fn facet_sizes(&self) -> PyResult<Vec<usize>> {
        Ok(fixed_angles::enumerate_faces(&self.inner).map_err(value_err)?.facet_sizes())
    }

    /// The canonical face-lattice JSON document.
    fn lattice_json(&self) -> PyResult<String> {
        Ok(fixed_angles::enumerate_faces(&self.inner).map_err(value_err)?.to_json_string())
    }

    fn trigon_vertices(&self) -> PyResult<Vec<(usize, usize, usize)>> {
        fixed_angles::trigon_vertices(&self.inner).map_err(value_err)
    }

    /// Digon vertices as `(tie_start, width)` pairs.
    fn digon_vertices(&self) -> PyResult<Vec<(usize, usize)>> {
        Ok(fixed_angles::digon_vertices(&self.inner)
            .map_err(value_err)?
            .into_iter()
            .map(|(tie, _)| (tie.substring.start, tie.width))
            .collect())
    }

    fn is_simple(&self) -> PyResult<bool> {
        fixed_angles::is_simple(&self.inner).map_err(value_err)
    }

    /// Verdict of the dual-cyclic check (explicit map for odd n, search
    /// plus reduction for even n).
    fn is_dual_cyclic(&self) -> PyResult<bool> {
        let report = if self.inner.len() % 2 == 1 {
            duality::verify_dual_cyclic_odd(&self.inner).map_err(value_err)?
        } else {
            duality::verify_dual_cyclic_even(&self.inner).map_err(value_err)?
        };
        Ok(report.verdict)
    }

    /// Full duality report as JSON.
    fn duality_json(&self) -> PyResult<String> {
        let report = if self.inner.len() % 2 == 1 {
            duality::verify_dual_cyclic_odd(&self.inner).map_err(value_err)?
        } else {
            duality::verify_dual_cyclic_even(&self.inner).map_err(value_err)?
        };
        Ok(report.to_json_string())
    }

    /// Signature `(n_plus, n_minus)` of the area form on the closure
    /// subspace; `(1, n - 3)` for full-dimensional necklaces.
    fn area_form_signature(&self) -> PyResult<(usize, usize)> {
        geometry::area_form_signature(&self.inner).map_err(value_err)
    }

    /// Unit-perimeter tangential-polygon edge lengths, an interior point
    /// of the polytope.
    fn tangential_lengths(&self) -> PyResult<Vec<f64>> {
        Ok(geometry::tangential_polygon(&self.inner).map_err(value_err)?.lengths)
    }

    /// Image of a fixed-lengths convex polygon with these edge lengths
    /// under the conformal map; `turns` defaults to the inscribed polygon.
    #[pyo3(signature = (turns=None))]
    fn km_map(&self, turns: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
        let shape = match turns {
            Some(turns) => {
                use num_traits::ToPrimitive;
                let sum = self.inner.total().to_f64().expect("total fits f64");
                let lengths: Vec<f64> = (1..=self.inner.len())
                    .map(|k| self.inner.entry(k as i64).to_f64().expect("entry fits f64") / sum)
                    .collect();
                scmap::FixedLengthsShape::new(lengths, turns, 0.0).map_err(value_err)?
            }
            None => scmap::inscribed_shape(&self.inner).map_err(value_err)?,
        };
        scmap::km_map(&self.inner, &shape).map_err(value_err)
    }

    /// Fits the boundary exponent at vertex `k`; returns
    /// `(q_hat, q_analytic)`.
    fn boundary_exponent(&self, k: usize, rhos: Vec<f64>) -> PyResult<(f64, f64)> {
        let report = scmap::boundary_exponent_probe(&self.inner, k, &rhos).map_err(value_err)?;
        Ok((report.q_hat, report.q_analytic))
    }
}

/// Facets of the cyclic polytope `C_d(m)` by Gale's evenness condition.
#[pyfunction]
fn gale_facets(d: usize, m: usize) -> PyResult<Vec<Vec<usize>>> {
    cyclic::gale_facets(d, m).map_err(value_err)
}

/// Facets of `C_d(m)` by exact moment-curve determinants; `params`
/// defaults to `1..=m`.
#[pyfunction]
#[pyo3(signature = (d, m, params=None))]
fn moment_oracle_facets(d: usize, m: usize, params: Option<Vec<i64>>) -> PyResult<Vec<Vec<usize>>> {
    cyclic::moment_oracle_facets(d, m, params.as_deref()).map_err(value_err)
}

/// f-vector of `C_d(m)`.
#[pyfunction]
fn cyclic_fvector(d: usize, m: usize) -> PyResult<Vec<usize>> {
    Ok(cyclic::face_lattice(d, m).map_err(value_err)?.fvector().to_vec())
}

/// Normal forms of all small tours mod `n`.
#[pyfunction]
fn small_tours(n: usize) -> PyResult<Vec<(usize, usize, usize)>> {
    Ok(tours::enumerate_small(n).map_err(value_err)?.iter().map(|t| t.normal).collect())
}

/// Normal forms of all odd tours mod `n`.
#[pyfunction]
fn odd_tours(n: usize) -> PyResult<Vec<(usize, usize, usize)>> {
    Ok(tours::enumerate_odd(n).map_err(value_err)?.iter().map(|t| t.normal).collect())
}

/// Critical values of the marked entry (template text uses `?`) within
/// `[lo, hi]`, as rational strings.
#[pyfunction]
fn sweep_critical_values(template: &str, lo: &str, hi: &str) -> PyResult<Vec<String>> {
    let template = SweepTemplate::parse(template).map_err(value_err)?;
    let lo = shangles::necklace::parse_rational_token(lo).map_err(value_err)?;
    let hi = shangles::necklace::parse_rational_token(hi).map_err(value_err)?;
    Ok(template.critical_values_between(&lo, &hi).iter().map(format_rational).collect())
}

#[pymodule]
fn shangles_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNecklace>()?;
    m.add_function(wrap_pyfunction!(gale_facets, m)?)?;
    m.add_function(wrap_pyfunction!(moment_oracle_facets, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_fvector, m)?)?;
    m.add_function(wrap_pyfunction!(small_tours, m)?)?;
    m.add_function(wrap_pyfunction!(odd_tours, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_critical_values, m)?)?;
    Ok(())
}
