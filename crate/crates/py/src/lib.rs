//! Python bindings. Objects cross the boundary as wrapped Rust values; JSON
//! strings are the interchange format for anything else.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use rational_models::burnside::{self, BurnsideElement, Exceptional, Group};
use rational_models::dihedral::{self, DihedralGenerator, DihedralObject};
use rational_models::exceptional::{self, GroupComplex};
use rational_models::fixtures;
use rational_models::toral::{self, Generator, ToralObject};
use rational_models::Error;
use serde_json::Value;

create_exception!(rational_models, ModelError, PyException);

fn py_err(e: Error) -> PyErr {
    ModelError::new_err(e.to_string())
}

fn parse(text: &str) -> PyResult<Value> {
    serde_json::from_str(text).map_err(|e| ModelError::new_err(format!("parse error: {e}")))
}

fn dump(v: &Value) -> String {
    serde_json::to_string(v).expect("json values serialise")
}

type Character = BTreeMap<i64, (usize, usize)>;

#[pyclass(name = "BurnsideElement", module = "rational_models", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyBurnside(BurnsideElement);

#[pymethods]
impl PyBurnside {
    /// Idempotent of a named part: "toral", "dihedral", "exceptional", or
    /// an exceptional class name such as "A5".
    #[staticmethod]
    #[pyo3(signature = (part, group = "SO3"))]
    fn idempotent(part: &str, group: &str) -> PyResult<Self> {
        let g = Group::parse(group).map_err(py_err)?;
        let e = match part {
            "toral" => burnside::e_toral(g),
            "dihedral" => burnside::e_dihedral(g),
            "exceptional" if g == Group::SO3 => burnside::e_exceptional(),
            other if g == Group::SO3 => burnside::e_class(Exceptional::parse(other).map_err(py_err)?),
            other => return Err(ModelError::new_err(format!("no part {other:?} over {group}"))),
        };
        Ok(PyBurnside(e))
    }

    #[staticmethod]
    #[pyo3(signature = (group = "SO3"))]
    fn one(group: &str) -> PyResult<Self> {
        Ok(PyBurnside(BurnsideElement::one(Group::parse(group).map_err(py_err)?)))
    }

    #[staticmethod]
    #[pyo3(signature = (group = "SO3"))]
    fn zero(group: &str) -> PyResult<Self> {
        Ok(PyBurnside(BurnsideElement::zero(Group::parse(group).map_err(py_err)?)))
    }

    #[staticmethod]
    fn split_exceptional() -> Vec<Self> {
        burnside::split_exceptional().into_iter().map(PyBurnside).collect()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        BurnsideElement::from_json(&parse(text)?).map(PyBurnside).map_err(py_err)
    }

    fn to_json(&self) -> String {
        dump(&self.0.to_json())
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        burnside::add(&self.0, &other.0).map(PyBurnside).map_err(py_err)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        burnside::mul(&self.0, &other.0).map(PyBurnside).map_err(py_err)
    }

    fn is_idempotent(&self) -> bool {
        self.0.is_idempotent()
    }

    fn restrict_to_o2(&self) -> PyResult<Self> {
        burnside::restrict_to_o2(&self.0).map(PyBurnside).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("BurnsideElement({})", self.to_json())
    }
}

#[pyclass(name = "ToralObject", module = "rational_models", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyToral(ToralObject);

#[pymethods]
impl PyToral {
    /// One of "sigma1", "sigmaH:<n>", "sigmaT", "S0", "sigmaT-".
    #[staticmethod]
    fn generator(name: &str) -> PyResult<Self> {
        toral::make_generator(Generator::parse(name).map_err(py_err)?).map(PyToral).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ToralObject::from_json(&parse(text)?).map(PyToral).map_err(py_err)
    }

    fn to_json(&self) -> String {
        dump(&self.0.to_json())
    }

    #[getter]
    fn side(&self) -> &'static str {
        self.0.side().name()
    }

    fn check_star(&self) -> bool {
        self.0.check_star()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn functor_f(&self) -> PyResult<Self> {
        toral::functor_f(&self.0).map(PyToral).map_err(py_err)
    }

    fn functor_r(&self) -> PyResult<Self> {
        toral::functor_r(&self.0).map(PyToral).map_err(py_err)
    }

    fn twisted_f(&self) -> PyResult<Self> {
        toral::twisted_f(&self.0).map(PyToral).map_err(py_err)
    }

    fn twist(&self) -> PyResult<Self> {
        self.0.twist().map(PyToral).map_err(py_err)
    }

    fn suspend(&self, n: i64) -> PyResult<Self> {
        self.0.suspend(n).map(PyToral).map_err(py_err)
    }

    fn direct_sum(&self, other: &Self) -> PyResult<Self> {
        self.0.direct_sum(&other.0).map(PyToral).map_err(py_err)
    }

    fn homology(&self) -> PyResult<Self> {
        toral::homology_da(&self.0).map(PyToral).map_err(py_err)
    }

    fn parity_split(&self) -> PyResult<(Self, Self)> {
        let (a, b) = self.0.parity_split().map_err(py_err)?;
        Ok((PyToral(a), PyToral(b)))
    }

    fn is_isomorphic(&self, other: &Self) -> PyResult<bool> {
        toral::is_isomorphic(&self.0, &other.0).map_err(py_err)
    }

    /// Degreewise hom dimensions as {degree: (plus, minus)}.
    #[pyo3(signature = (other, lo = None, hi = None))]
    fn hom(&self, other: &Self, lo: Option<i64>, hi: Option<i64>) -> PyResult<Character> {
        let range = lo.zip(hi);
        Ok(toral::hom_a(&self.0, &other.0, range).map_err(py_err)?.character())
    }

    #[pyo3(signature = (other, lo = None, hi = None))]
    fn ext(&self, other: &Self, lo: Option<i64>, hi: Option<i64>) -> PyResult<Character> {
        let range = lo.zip(hi);
        Ok(toral::ext_a(&self.0, &other.0, range).map_err(py_err)?.character())
    }

    /// Hom and Ext parts of maps in the derived category.
    #[pyo3(signature = (other, lo = None, hi = None))]
    fn adams_bracket(&self, other: &Self, lo: Option<i64>, hi: Option<i64>) -> PyResult<(Character, Character)> {
        let (h, e) = toral::adams_bracket(&self.0, &other.0, lo.zip(hi)).map_err(py_err)?;
        Ok((h.character(), e.character()))
    }

    /// Injective resolution as (injective, cokernel), checked for exactness.
    fn injective_resolution(&self) -> PyResult<(Self, Self)> {
        let r = toral::injective_resolution(&self.0, None).map_err(py_err)?;
        r.check_exact().map_err(py_err)?;
        Ok((PyToral(r.injective), PyToral(r.cokernel)))
    }

    /// A wide-sphere cover of a generating set and whether it is onto.
    fn cover(&self) -> PyResult<(Self, bool)> {
        let (c, onto) = toral::cover_generating_set(&self.0).map_err(py_err)?;
        Ok((PyToral(c.sphere), onto))
    }

    fn __repr__(&self) -> String {
        format!("ToralObject({})", self.to_json())
    }
}

#[pyclass(name = "DihedralObject", module = "rational_models", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDihedral(DihedralObject);

#[pymethods]
impl PyDihedral {
    /// The generator at index k (at least 3), or the constant one for None.
    #[staticmethod]
    #[pyo3(signature = (k = None))]
    fn generator(k: Option<u32>) -> PyResult<Self> {
        let g = k.map_or(DihedralGenerator::Const, DihedralGenerator::Slot);
        dihedral::make_generator_dihedral(g).map(PyDihedral).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        DihedralObject::from_json(&parse(text)?).map(PyDihedral).map_err(py_err)
    }

    fn to_json(&self) -> String {
        dump(&self.0.to_json())
    }

    fn homology(&self) -> PyResult<Self> {
        dihedral::homology_ch(&self.0).map(PyDihedral).map_err(py_err)
    }

    /// The complex at index k, as JSON.
    fn at(&self, k: u32) -> PyResult<String> {
        Ok(dump(&dihedral::functor_p(&self.0, k).map_err(py_err)?.to_json()))
    }

    fn germ_fixed_points(&self) -> String {
        dump(&dihedral::germ_fixed_points(&self.0).to_json())
    }

    fn hom_dim(&self, other: &Self, degree: i64) -> usize {
        dihedral::hom_dim(&self.0, &other.0, degree)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

#[pyclass(name = "GroupComplex", module = "rational_models", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyGroupComplex(GroupComplex);

#[pymethods]
impl PyGroupComplex {
    /// The unit complex over the Weyl group of an exceptional class.
    #[staticmethod]
    fn unit(class: &str) -> PyResult<Self> {
        let g = exceptional::weyl_group_by_name(class).map_err(py_err)?;
        Ok(PyGroupComplex(GroupComplex::unit(&g)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        GroupComplex::from_json(&parse(text)?).map(PyGroupComplex).map_err(py_err)
    }

    fn to_json(&self) -> String {
        dump(&self.0.to_json())
    }

    fn tensor(&self, other: &Self) -> PyResult<Self> {
        exceptional::tensor_diagonal(&self.0, &other.0).map(PyGroupComplex).map_err(py_err)
    }

    fn internal_hom(&self, other: &Self) -> PyResult<Self> {
        exceptional::internal_hom_conj(&self.0, &other.0).map(PyGroupComplex).map_err(py_err)
    }

    fn homology(&self) -> PyResult<Self> {
        exceptional::homology_w(&self.0).map(PyGroupComplex).map_err(py_err)
    }

    /// {degree: dimension}
    fn dims(&self) -> BTreeMap<i64, usize> {
        self.0.degrees().into_iter().map(|n| (n, self.0.dim_at(n))).collect()
    }

    /// {degree: dimension of the fixed subspace}
    fn fixed_dims(&self) -> BTreeMap<i64, usize> {
        self.0.degrees().into_iter().map(|n| (n, self.0.rep(n).map_or(0, exceptional::fixed_dim))).collect()
    }
}

#[pyfunction]
fn weyl_group_order(class: &str) -> PyResult<usize> {
    Ok(exceptional::weyl_group_by_name(class).map_err(py_err)?.order())
}

/// (all passed, text report) for the built-in fixtures.
#[pyfunction]
fn fixture_verify() -> PyResult<(bool, String)> {
    let r = fixtures::fixture_verify().map_err(py_err)?;
    Ok((r.all_passed(), r.to_text()))
}

#[pymodule]
#[pyo3(name = "rational_models")]
pub fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ModelError", m.py().get_type::<ModelError>())?;
    m.add_class::<PyBurnside>()?;
    m.add_class::<PyToral>()?;
    m.add_class::<PyDihedral>()?;
    m.add_class::<PyGroupComplex>()?;
    m.add_function(wrap_pyfunction!(weyl_group_order, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_verify, m)?)?;
    Ok(())
}
