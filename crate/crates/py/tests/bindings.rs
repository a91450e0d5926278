use pyo3::ffi::c_str;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyDict>)>(f: F) {
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(permutent_py::permutent_py)(py);
        let locals = PyDict::new(py);
        locals.set_item("pm", module).unwrap();
        f(py, &locals);
    });
}

#[test]
fn worked_case_through_python() {
    with_module(|py, locals| {
        py.run(
            c_str!(
                r#"
cfg = pm.SectorConfig.finite([2, 2])
s = pm.exact_spectrum(cfg, 2, exact_rational=True)
assert len(s) == 3
assert s.exact_weights() == ["1/6", "2/3", "1/6"]
assert s.is_exactly_normalized()
assert abs(s.entropy() - 1.2516291673878228) < 1e-12
assert cfg.L == 4 and cfg.sigma == 0.5
"#
            ),
            None,
            Some(locals),
        )
        .unwrap();
    });
}

#[test]
fn reports_are_dicts() {
    with_module(|py, locals| {
        py.run(
            c_str!(
                r#"
cfg = pm.SectorConfig.infinite([1/3, 1/3, 1/3])
r = pm.entropy_report(cfg, 100)
assert abs(r["asymptotic_bits"] - r["gaussian_bits"]) < 1e-9
assert cfg.L is None
c = pm.finite_size_corrections(pm.SectorConfig.finite([3, 3]), 3)
assert c["L"] == 6 and abs(c["delta_per_bits"] + 0.5) < 1e-15
e = pm.effective_spin([0.5, 0.5, 0.0])
assert e["sigma_eff"] == 0.5
m = pm.build_gaussian([0.2, 0.3, 0.5], 10)
assert abs(1 / m.det_a - 100 * 0.2 * 0.3 * 0.5) < 1e-12
assert m.to_dict()["dim"] == 2
v = pm.verify_theorem(pm.SectorConfig.finite([2, 1, 1]), 2)
assert v["pass"]
"#
            ),
            None,
            Some(locals),
        )
        .unwrap();
    });
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(|py, locals| {
        py.run(
            c_str!(
                r#"
try:
    pm.exact_spectrum(pm.SectorConfig.finite([2, 2]), 9)
    raise AssertionError("expected ValueError")
except ValueError as e:
    assert "n exceeds L" in str(e)
try:
    pm.verify_theorem(pm.SectorConfig.finite([8, 8, 8]), 2)
    raise AssertionError("expected ResourceGuardError")
except pm.ResourceGuardError:
    pass
"#
            ),
            None,
            Some(locals),
        )
        .unwrap();
    });
}
