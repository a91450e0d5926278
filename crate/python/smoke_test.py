"""Smoke test for the compiled extension.

Build and install first, e.g. ``maturin develop -m crates/py/Cargo.toml``.
"""

import json
import math
import pathlib

import permutent_py as pm

SCHEMAS = pathlib.Path(__file__).resolve().parent.parent / "schemas"


def entropy_bits(weights):
    return -sum(w * math.log2(w) for w in weights if w > 0)


def check_worked_case():
    s = pm.exact_spectrum(pm.SectorConfig.finite([2, 2]), 2, exact_rational=True)
    assert s.exact_weights() == ["1/6", "2/3", "1/6"]
    assert s.is_exactly_normalized()
    assert abs(s.entropy() - entropy_bits([1 / 6, 2 / 3, 1 / 6])) < 1e-12


def check_thermodynamic_limit():
    cfg = pm.SectorConfig.infinite([1 / 3, 1 / 3, 1 / 3])
    s = pm.thermo_spectrum(cfg.densities, 1)
    assert len(s) == 3 and all(abs(w - 1 / 3) < 1e-15 for w in s.weights())
    report = pm.entropy_report(cfg, 200)
    assert abs(report["exact_bits"] - report["asymptotic_bits"]) < 0.02
    assert abs(report["gaussian_bits"] - report["asymptotic_bits"]) < 1e-9


def check_uniform_mixture():
    for d in (2, 3, 4):
        for n in (0, 5, 20):
            s = pm.uniform_mixed_spectrum(n, d)
            assert abs(s.entropy() - pm.max_entropy_bound(n, d)) < 1e-12


def check_oracle():
    assert pm.verify_theorem(pm.SectorConfig.finite([2, 2, 2]), 3)["pass"]
    assert pm.verify_uniform_mixture(4, 2, 2)["pass"]
    try:
        pm.verify_theorem(pm.SectorConfig.finite([9, 9, 9]), 1)
    except pm.ResourceGuardError:
        pass
    else:
        raise AssertionError("resource guard not raised")


def check_schemas():
    try:
        import jsonschema
    except ImportError:
        print("jsonschema not installed, skipping schema checks")
        return
    spectrum = json.loads(pm.exact_spectrum(pm.SectorConfig.finite([3, 2, 1]), 3, True).to_json())
    jsonschema.validate(spectrum, json.loads((SCHEMAS / "spectrum.schema.json").read_text()))
    report = pm.entropy_report(pm.SectorConfig.finite([40, 40, 40]), 60)
    jsonschema.validate(report, json.loads((SCHEMAS / "entropy_report.schema.json").read_text()))
    model = pm.build_gaussian([0.2, 0.3, 0.5], 10).to_dict()
    jsonschema.validate(model, json.loads((SCHEMAS / "gaussian_model.schema.json").read_text()))


if __name__ == "__main__":
    check_worked_case()
    check_thermodynamic_limit()
    check_uniform_mixture()
    check_oracle()
    check_schemas()
    print(f"permutent_py {pm.__version__}: smoke test passed")
