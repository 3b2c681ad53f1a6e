"""Smoke test for the Python extension.

Builds the extension with cargo unless TRIPLEKIT_EXT points at an existing
shared object, then exercises every binding once.
"""

import json
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_extension() -> Path:
    given = os.environ.get("TRIPLEKIT_EXT")
    if given:
        return Path(given)
    subprocess.run(
        ["cargo", "build", "-p", "triplekit-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    target = Path(os.environ.get("CARGO_TARGET_DIR", ROOT / "target")) / "debug"
    for name in ("libtriplekit.so", "libtriplekit.dylib", "triplekit.dll"):
        if (target / name).exists():
            return target / name
    raise SystemExit(f"extension not found in {target}")


def load():
    ext = locate_extension()
    tmp = Path(tempfile.mkdtemp(prefix="triplekit-py-"))
    suffix = ".pyd" if ext.suffix == ".dll" else ".so"
    shutil.copy(ext, tmp / f"triplekit{suffix}")
    sys.path.insert(0, str(tmp))
    import triplekit

    return triplekit


def main() -> int:
    tk = load()

    t3 = tk.normal_form("lorentz", json.dumps({"f": ["2"]}))
    report = json.loads(tk.verify(t3))
    assert report["all_pass"], report

    ric = json.loads(tk.ricci(t3))
    k = ric["labels"].index("Z*")
    assert ric["gram"][k][k] == "2", ric

    a = tk.normal_form("lorentz", json.dumps({"f": [1, 2]}))
    b = tk.normal_form("lorentz", json.dumps({"f": [2, 4]}))
    c = tk.normal_form("lorentz", json.dumps({"f": [1, 3]}))
    code, cert = tk.isomorphic(a, b)
    assert code == 0 and json.loads(cert)["decision"] == "isomorphic"
    assert tk.isomorphic(a, c)[0] == 1
    assert tk.isomorphic(a, c, float_tol=1e-9)[0] == 1

    for fam in ("ia", "ib", "iia", "iib", "nil22", "nil23", "nil24", "iii", "iv", "least-nilpotent"):
        assert json.loads(tk.verify(tk.normal_form(fam)))["all_pass"], fam

    dims = json.loads(tk.decompose(tk.normal_form("iv")))["dims"]
    assert dims[-1]["w"] == 1 and dims[-1]["e"] == 1, dims

    inv = json.loads(tk.invariants(a))
    assert inv["signature_m"] == [1, 3, 0]

    assert json.loads(tk.center("-1,-4"))["kind"] == "Z_times_lattice"
    assert json.loads(tk.center("1,-1"))["kind"] == "Z_only"
    assert tk.metric_eval("1", "0,0,0") == [["1", "0", "0"], ["0", "0", "1"], ["0", "1", "0"]]

    census = json.loads(tk.enumerate(2, 2, "-2,-1,1,2"))
    assert len(census["classes"]) == 2

    try:
        tk.verify("{")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed JSON accepted")

    print("python smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
