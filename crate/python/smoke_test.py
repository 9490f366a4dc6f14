"""Smoke test for the Python bindings.

Builds the extension with cargo (unless RATIONAL_MODELS_LIB names an already
built shared library), loads it under its module name and exercises each
wrapped model.
"""

import importlib.util
import json
import os
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_library() -> Path:
    lib = os.environ.get("RATIONAL_MODELS_LIB")
    if lib:
        return Path(lib)
    subprocess.run(
        ["cargo", "build", "-p", "rational-models-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    target = Path(os.environ.get("CARGO_TARGET_DIR", ROOT / "target"))
    for name in ("librational_models_py.so", "librational_models_py.dylib", "rational_models_py.dll"):
        candidate = target / "debug" / name
        if candidate.exists():
            return candidate
    raise FileNotFoundError("built extension not found under " + str(target))


def load(lib: Path):
    tmp = Path(tempfile.mkdtemp())
    dest = tmp / ("rational_models" + sysconfig.get_config_var("EXT_SUFFIX"))
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("rational_models", dest)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main() -> int:
    rm = load(build_library())
    B = rm.BurnsideElement

    t, d, e = B.idempotent("toral"), B.idempotent("dihedral"), B.idempotent("exceptional")
    assert t + d + e == B.one()
    assert t * d == B.zero() and d * e == B.zero() and t * e == B.zero()
    total = B.zero()
    for piece in B.split_exceptional():
        assert piece.is_idempotent()
        total = total + piece
    assert total == e
    assert t.restrict_to_o2() != B.idempotent("toral", "O2")

    sigma1 = rm.ToralObject.generator("sigma1")
    assert sigma1.check_star() and sigma1.side == "SO3"
    assert sigma1.functor_f().functor_r().to_json() == sigma1.to_json()
    image = json.loads(sigma1.twisted_f().to_json())
    assert image["M"]["explicit"]["1"]["summands"] == [{"kind": "Torsion", "len": 2, "shift": 0, "sign": -1}]
    assert sigma1.hom(sigma1, -4, 4) == {0: (1, 0)}
    injective, cokernel = rm.ToralObject.generator("sigmaT").injective_resolution()
    assert injective.check_star() and cokernel.check_star()
    _, onto = rm.ToralObject.generator("sigmaT").cover()
    assert onto
    even, odd = sigma1.parity_split()
    assert odd.is_zero() and even.is_isomorphic(sigma1)

    passed, report = rm.fixture_verify()
    assert passed, report
    assert [rm.weyl_group_order(h) for h in ("SO3", "Sigma4", "A4", "A5", "D4")] == [1, 1, 2, 1, 6]

    g = rm.DihedralObject.generator(4)
    assert g.hom_dim(g, 0) == 2
    assert rm.DihedralObject.generator().homology().to_json() == rm.DihedralObject.generator().to_json()

    u = rm.GroupComplex.unit("D4")
    assert u.tensor(u).to_json() == u.to_json()
    assert u.internal_hom(u).fixed_dims() == {0: 1}

    for bad in (lambda: rm.ToralObject.generator("sigmaQ"), lambda: rm.DihedralObject.generator(2)):
        try:
            bad()
        except rm.ModelError:
            pass
        else:
            raise AssertionError("expected ModelError")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
