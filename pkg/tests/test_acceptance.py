"""Acceptance criteria 1-8.  Each test prints one PASS/FAIL line with its timing.

Run directly (``python tests/test_acceptance.py``) or through pytest.
"""

import json
import random
import subprocess
import sys
import time
from contextlib import contextmanager, redirect_stdout
from io import StringIO
from pathlib import Path

import pytest

from coeffective.builder import (
    build_extended_complex,
    exactness_defects,
    extend,
    middle_operator,
    random_covector,
    second_half_symbol_complex,
    symbol_complex,
)
from coeffective.cli import main
from coeffective.exterior import Form, wedge, wedge_power
from coeffective.homology import cohomology, les_from_double
from coeffective.models import RingModel, RingStructure, builtin, local_exactness
from coeffective.qlinalg import rank
from coeffective.structures import (
    INJECTIVE,
    ISOMORPHISM,
    SURJECTIVE,
    column_profile,
    is_trace_free,
    lepage_decompose,
    pairing_gram,
    primitive_basis,
    standard_g2,
    standard_symplectic,
)

sys.path.insert(0, str(Path(__file__).parent))
from conftest import random_form  # noqa: E402


_write = print


@pytest.fixture(autouse=True)
def _terminal(request):
    # write through the terminal reporter so lines survive output capture
    global _write
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    _write = (lambda line: tr.write_line(line)) if tr else print
    yield
    _write = print


def report_line(n, ok, elapsed, limit, detail=""):
    status = "PASS" if ok and (limit is None or elapsed < limit) else "FAIL"
    budget = f" (limit {limit:g} s)" if limit is not None else ""
    line = f"criterion {n}: {status}  {elapsed:.2f} s{budget}  {detail}".rstrip()
    _write(line)
    return status == "PASS"


@contextmanager
def timed():
    box = {}
    t0 = time.perf_counter()
    yield box
    box["elapsed"] = time.perf_counter() - t0


def cli(*argv):
    buf = StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


# 1 ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_criterion_1_cpn(n):
    with timed() as t:
        code, out = cli("les", "--builtin", "cpn", "--n", str(n), "--format", "json")
    data = json.loads(out)
    expect = [1] + [0] * (2 * n) + [1]
    ok = code == 0 and data["direct"] == expect and data["predicted"] == expect and data["match"]
    assert report_line(1, ok, t["elapsed"], 1.0, f"CP^{n}: {data['direct']}")


# 2 ---------------------------------------------------------------------------

def test_criterion_2_g2_profile():
    with timed() as t:
        prof = column_profile(standard_g2())
        kinds = prof.kinds()
        ranks = prof.ranks()
        kernels = [e.kernel_dim for e in prof.entries]
    ok = (kinds == (INJECTIVE, INJECTIVE, ISOMORPHISM, SURJECTIVE, SURJECTIVE)
          and ranks == (1, 7, 21, 7, 1) and kernels[3:] == [28, 34])
    assert report_line(2, ok, t["elapsed"], 1.0, f"ranks {ranks}, kernels {kernels[3:]}")


# 3 ---------------------------------------------------------------------------

def direct_and_predicted(s, kind, n):
    dc = s.double_complex()
    direct = cohomology(extend(dc).cochain_complex()).dims
    return direct, les_from_double(dc, kind, n)


def test_criterion_3_symplectic_oracle():
    results = {}
    with timed() as t:
        for name, n in (("torus", 2), ("torus", 3), ("hopf4", None), ("kodaira_thurston", None)):
            s = builtin(name, n=n)
            results[(name, n)] = direct_and_predicted(s, "symplectic", n or 2)
    ok = all(d == les.predicted for d, les in results.values())
    ok &= results[("torus", 2)][0] == (1, 4, 5, 5, 4, 1)
    hopf_direct, hopf_les = results[("hopf4", None)]
    ok &= hopf_direct == (0, 1, 1, 0, 1, 1) and hopf_les.twisted == (0, 0, 0, 0, 0)
    detail = "; ".join(f"{k[0]}{k[1] or ''}: {d}" for k, (d, _) in results.items())
    assert report_line(3, ok, t["elapsed"], 5.0, detail)


# 4 ---------------------------------------------------------------------------

def test_criterion_4_g2_oracle():
    with timed() as t:
        direct, les = direct_and_predicted(builtin("torus7_g2"), "g2", None)
    expect = (1, 7, 21, 34, 28, 28, 34, 21, 7, 1)
    ok = direct == expect and les.predicted == expect
    assert report_line(4, ok, t["elapsed"], 10.0, f"{direct}")


# 5 ---------------------------------------------------------------------------

def test_criterion_5_ellipticity():
    failures = []
    shapes = [standard_symplectic(2), standard_symplectic(3), standard_symplectic(4), standard_g2()]
    with timed() as t:
        for cal in shapes:
            rng = random.Random(1000 + cal.dim)
            for _ in range(100):
                xi = random_covector(cal.dim, rng)
                if exactness_defects(symbol_complex(cal, xi)):
                    failures.append((cal.kind, cal.dim, xi.to_literal(), "full"))
                if cal.kind == "symplectic":
                    half = exactness_defects(second_half_symbol_complex(cal, xi))
                    if [r for r, _ in half] != [0]:
                        failures.append((cal.kind, cal.dim, xi.to_literal(), "second half"))
    ok = not failures
    assert report_line(5, ok, t["elapsed"], 60.0, f"400 samples, {len(failures)} failures"), failures


# 6 ---------------------------------------------------------------------------

def test_criterion_6_local_exactness():
    found = {}
    with timed() as t:
        found["m=4"] = local_exactness(standard_symplectic(2), 6)
        found["m=6"] = local_exactness(standard_symplectic(3), 6)
        found["g2"] = local_exactness(standard_g2(), 4)
    sympl = {(0, 0): 1, (1, 2): 1}
    ok = found["m=4"] == sympl and found["m=6"] == sympl and found["g2"] == {(0, 0): 1, (2, 3): 1}
    detail = "; ".join(f"{k}: {sorted(v.items())}" for k, v in found.items())
    assert report_line(6, ok, t["elapsed"], 120.0, detail)


# 7 ---------------------------------------------------------------------------

def scaled_ring(rs, lam):
    r = rs.ring
    cups = tuple(c.scale(lam) for c in r.cup)
    return RingStructure(RingModel(r.name, r.dims, r.class_degree, cups, r.iso_degree), rs.kind, rs.n)


def structural_failures():
    bad = []
    cases = [("torus", 2), ("torus", 3), ("hopf4", None), ("kodaira_thurston", None), ("torus7_g2", None),
             ("cpn", 2), ("cpn", 3)]
    rng = random.Random(77)
    for name, n in cases:
        s = builtin(name, n=n)
        ec = extend(s.double_complex())
        if not ec.squares_to_zero():
            bad.append(f"{name}: d∘d ≠ 0")
        dims = ec.dims
        h = cohomology(ec.cochain_complex()).dims
        for lam in (2, -3):
            t = scaled_ring(s, lam) if isinstance(s, RingStructure) else s.scaled(lam)
            et = extend(t.double_complex())
            if et.dims != dims or cohomology(et.cochain_complex()).dims != h:
                bad.append(f"{name}: rescaling by {lam} changed dimensions")
        if isinstance(s, RingStructure):
            continue
        cal = s.cal
        mid = cal.iso_degree + cal.degree - 1
        for _ in range(20):
            w = wedge(random_form(cal.dim, mid - cal.degree, rng), cal.form)
            if not w.is_zero() and not middle_operator(s, w).is_zero():
                bad.append(f"{name}: middle operator nonzero on F∧Λ")
                break
    for n in (1, 2, 3):
        c = standard_symplectic(n)
        for k in range(0, n + 1):
            for _ in range(1000):
                w = random_form(2 * n, k, rng)
                parts = lepage_decompose(c, w)
                total = Form.zero(2 * n)
                for j, part in enumerate(parts):
                    if not is_trace_free(c, part):
                        bad.append(f"Lepage n={n} k={k}: component {j} not trace-free")
                    total = total + wedge(wedge_power(c.form, j), part)
                if total != w:
                    bad.append(f"Lepage n={n} k={k}: round trip failed")
    c = standard_symplectic(2)
    for k in (0, 1, 2):
        g = pairing_gram(c, k)
        if rank(g) != len(primitive_basis(c, k)):
            bad.append(f"Gram degenerate at k={k}")
    return bad


def test_criterion_7_structural():
    with timed() as t:
        bad = structural_failures()
    assert report_line(7, not bad, t["elapsed"], 60.0, f"{len(bad)} failures"), bad


# 8 ---------------------------------------------------------------------------

def test_criterion_8_determinism():
    cmd = [sys.executable, "-m", "coeffective", "report", "--seed", "7"]
    with timed() as t:
        a = subprocess.run(cmd, capture_output=True, check=False)
        b = subprocess.run(cmd, capture_output=True, check=False)
    ok = a.returncode == b.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    assert report_line(8, ok, t["elapsed"], None, f"{len(a.stdout)} bytes, identical={a.stdout == b.stdout}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
