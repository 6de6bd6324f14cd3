"""Command-line interface.

Exit codes: 0 on success with every match flag true, 1 on a mismatch or a
failed validation, 2 on input errors (a JSON error object goes to stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass

from .builder import (
    StructureData,
    StructureError,
    exactness_defects,
    extend,
    random_covector,
    second_half_symbol_complex,
    symbol_complex,
    validate_structure,
)
from .exterior import Form
from .homology import cohomology, les_from_double
from .models import (
    LIE_BUILTINS,
    ModelError,
    PolynomialModel,
    RingStructure,
    builtin,
    kind_of,
    local_exactness,
    parse_structure,
)
from .structures import G2, SYMPLECTIC, DegenerateCalibration, column_profile, standard_g2, standard_symplectic

DEFAULT_SEED = 20240101
FORMATS = ("json", "markdown", "csv")


class InputError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    builtin: str | None = None
    model: str | None = None
    n: int | None = None
    shape: str = SYMPLECTIC
    alpha: str | None = None
    samples: int = 100
    seed: int = DEFAULT_SEED
    max_homogeneity: int = 4
    format: str = "markdown"
    out: str | None = None


# ---------------------------------------------------------------------------
# helpers


def _load_structure(cfg: RunConfig):
    if bool(cfg.builtin) == bool(cfg.model):
        raise InputError("USAGE", "give exactly one of --builtin or --model")
    try:
        if cfg.model:
            s = parse_structure(cfg.model)
        else:
            s = builtin(cfg.builtin, n=cfg.n)
    except DegenerateCalibration as exc:
        # well-formed input whose form fails validation: a validation failure, not an input error
        kinds = list(exc.profile.kinds()) if exc.profile else []
        raise StructureError("DEGENERATE_CALIBRATION", str(exc), {"profile": kinds}) from exc
    except ModelError as exc:
        if exc.code == "JACOBI":
            raise StructureError("D_SQUARED_NONZERO", str(exc), exc.details) from exc
        raise InputError(exc.code, str(exc)) from exc
    except (OSError, KeyError, ValueError) as exc:
        raise InputError("INPUT", str(exc)) from exc
    if isinstance(s, PolynomialModel):
        raise InputError("USAGE", "use local-exactness for polynomial models")
    if cfg.alpha is not None:
        if not isinstance(s, StructureData):
            raise InputError("USAGE", "--alpha only applies to Lie-algebra models")
        try:
            s = s.with_alpha(Form.from_literal(s.dim, json.loads(cfg.alpha)))
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError("INPUT", f"bad --alpha literal: {exc}") from exc
    return s


def _shape(cfg: RunConfig):
    if cfg.shape == G2:
        return standard_g2()
    if cfg.shape == SYMPLECTIC:
        n = 2 if cfg.n is None else cfg.n
        if n < 1:
            raise InputError("PARAMS", "--n must be at least 1")
        return standard_symplectic(n)
    raise InputError("USAGE", f"unknown shape {cfg.shape!r}")


def _md_table(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for r in rows:
        lines.append("| " + " | ".join(str(x) for x in r) + " |")
    return "\n".join(lines)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def _source_name(cfg: RunConfig, s) -> str:
    if cfg.model:
        return s.model.name
    if cfg.builtin in ("torus", "cpn"):
        return f"{cfg.builtin}(n={kind_of(s)[1]})"
    return cfg.builtin


def _double(s):
    if isinstance(s, StructureData):
        rep = validate_structure(s)
        if not rep.ok:
            raise StructureError(rep.code, rep.message, rep.details)
    return s.double_complex()


def compare(s) -> dict:
    """Direct cohomology of the built complex against the LES prediction."""
    dc = _double(s)
    ec = extend(dc, provenance=s)
    direct = cohomology(ec.cochain_complex()).dims
    kind, n = kind_of(s)
    les = les_from_double(dc, kind, n)
    rows = [(r, d, p, d == p) for r, (d, p) in enumerate(zip(direct, les.predicted))]
    return {
        "space_dims": list(ec.dims),
        "direct": list(direct),
        "predicted": list(les.predicted),
        "match": all(r[3] for r in rows),
        "rows": rows,
        "les": les,
    }


def symbol_sweep(cal, samples: int, seed: int) -> dict:
    rng = random.Random(seed)
    failures, half_failures = [], []
    for _ in range(samples):
        xi = random_covector(cal.dim, rng)
        defects = exactness_defects(symbol_complex(cal, xi))
        if defects:
            failures.append({"xi": xi.to_literal(), "defects": defects})
        half = exactness_defects(second_half_symbol_complex(cal, xi))
        if [r for r, _ in half] != [0]:
            half_failures.append({"xi": xi.to_literal(), "defects": half})
    return {"samples": samples, "exact": samples - len(failures), "failures": failures,
            "second_half_failures": half_failures}


def expected_local(cal) -> dict:
    """Strand cohomology predicted by local exactness: constants, and one class at position p-1."""
    # the class is θ with dθ = F, θ linear: position p-1, coefficient degree 1
    p = cal.degree
    return {(0, 0): 1, (p - 1, p): 1}


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(cfg: RunConfig):
    s = _load_structure(cfg)
    if isinstance(s, RingStructure):
        report = {"ok": True, "code": "OK", "message": "ring model validated at construction", "details": {}}
    else:
        report = validate_structure(s).to_json()
    prof = None if isinstance(s, RingStructure) else column_profile(s.cal)
    if cfg.format == "json":
        payload = dict(report)
        if prof is not None:
            payload["profile"] = [e.kind for e in prof.entries]
            payload["ranks"] = [e.rank for e in prof.entries]
            payload["kernel_dims"] = [e.kernel_dim for e in prof.entries]
        text = _dump(payload)
    elif cfg.format == "csv":
        text = _csv(["ok", "code", "message"], [(str(report["ok"]).lower(), report["code"], report["message"])])
    else:
        text = f"## validate {_source_name(cfg, s)}\n\n" + _md_table(
            ["ok", "code", "message"], [(str(report["ok"]).lower(), report["code"], report["message"])])
        if report["details"]:
            text += "\n\n```\n" + _dump(report["details"]) + "\n```"
        if prof is not None:
            text += "\n\n" + prof.to_markdown()
    return text, 0 if report["ok"] else 1


def cmd_cohomology(cfg: RunConfig):
    s = _load_structure(cfg)
    top, bottom = _double(s).rows()
    plain = cohomology(bottom).dims
    twisted = cohomology(top).dims
    rows = [(r, plain[r], twisted[r]) for r in range(len(plain))]
    if cfg.format == "json":
        return _dump({"plain": list(plain), "twisted": list(twisted)}), 0
    header = ["degree", "plain", "twisted"]
    if cfg.format == "csv":
        return _csv(header, rows), 0
    return f"## de Rham cohomology of {_source_name(cfg, s)}\n\n" + _md_table(header, rows), 0


def cmd_build(cfg: RunConfig):
    s = _load_structure(cfg)
    ec = extend(_double(s), provenance=s)
    if cfg.format == "json":
        data = ec.to_json()
        data["source"] = _source_name(cfg, s)
        return _dump(data), 0 if ec.squares_to_zero() else 1
    rows = [(p.index, p.realization, p.row, p.form_degree, p.dim, p.order) for p in ec.positions]
    header = ["position", "realization", "row", "form_degree", "dim", "order"]
    ok = ec.squares_to_zero()
    if cfg.format == "csv":
        return _csv(header, rows), 0 if ok else 1
    text = f"## extended complex of {_source_name(cfg, s)}\n\n" + _md_table(header, rows)
    text += f"\n\nd∘d = 0: {ok}"
    return text, 0 if ok else 1


def cmd_hj(cfg: RunConfig):
    s = _load_structure(cfg)
    ec = extend(_double(s), provenance=s)
    table = cohomology(ec.cochain_complex()).dims
    rows = [(r, ec.dims[r], table[r]) for r in range(len(table))]
    if cfg.format == "json":
        return _dump({"space_dims": list(ec.dims), "cohomology": list(table)}), 0
    header = ["degree", "space_dim", "dim_H"]
    if cfg.format == "csv":
        return _csv(header, rows), 0
    return f"## H^r of the extended complex of {_source_name(cfg, s)}\n\n" + _md_table(header, rows), 0


def _les_text(name: str, res: dict, fmt: str) -> str:
    header = ["degree", "dim_direct", "dim_predicted", "match"]
    rows = [(r, d, p, str(m).lower()) for r, d, p, m in res["rows"]]
    if fmt == "json":
        data = res["les"].to_json()
        data.update(source=name, direct=res["direct"], space_dims=res["space_dims"], match=res["match"])
        return _dump(data)
    if fmt == "csv":
        return _csv(header, rows)
    les = res["les"]
    text = f"### {name}\n\n" + _md_table(header, rows)
    text += (f"\n\nplain Betti: {list(les.plain)}; twisted Betti: {list(les.twisted)}; "
             f"rank δ: {[les.delta_ranks[k] for k in sorted(les.delta_ranks)]}; "
             f"match={str(res['match']).lower()}")
    return text


def cmd_les(cfg: RunConfig):
    s = _load_structure(cfg)
    res = compare(s)
    return _les_text(_source_name(cfg, s), res, cfg.format), 0 if res["match"] else 1


def cmd_symbol_check(cfg: RunConfig):
    cal = _shape(cfg)
    res = symbol_sweep(cal, cfg.samples, cfg.seed)
    ok = not res["failures"] and not res["second_half_failures"]
    name = f"{cal.kind}(dim {cal.dim})"
    if cfg.format == "json":
        res = dict(res, shape=name, seed=cfg.seed, ok=ok)
        return _dump(res), 0 if ok else 1
    header = ["shape", "samples", "exact", "second_half_exact_except_first", "seed"]
    row = (name, res["samples"], res["exact"], res["samples"] - len(res["second_half_failures"]), cfg.seed)
    if cfg.format == "csv":
        return _csv(header, [row]), 0 if ok else 1
    text = "## symbol complex exactness\n\n" + _md_table(header, [row])
    text += f"\n\n{res['exact']}/{res['samples']} exact"
    for f in res["failures"] + res["second_half_failures"]:
        text += "\n- failure at ξ = " + json.dumps(f["xi"]) + f", defects {f['defects']}"
    return text, 0 if ok else 1


def cmd_local_exactness(cfg: RunConfig):
    cal = _shape(cfg)
    found = local_exactness(cal, cfg.max_homogeneity)
    expected = expected_local(cal)
    ok = found == expected
    rows = [(r, h, d) for (r, h), d in sorted(found.items())]
    name = f"{cal.kind}(dim {cal.dim})"
    if cfg.format == "json":
        return _dump({"shape": name, "max_homogeneity": cfg.max_homogeneity,
                      "cohomology": [{"position": r, "h": h, "dim": d} for r, h, d in rows],
                      "expected": [{"position": r, "h": h, "dim": d} for (r, h), d in sorted(expected.items())],
                      "match": ok}), 0 if ok else 1
    header = ["position", "h", "dim"]
    if cfg.format == "csv":
        return _csv(header, rows), 0 if ok else 1
    text = f"## local cohomology of polynomial strands, {name}, h <= {cfg.max_homogeneity}\n\n"
    text += _md_table(header, rows) + f"\n\nmatch={str(ok).lower()}"
    return text, 0 if ok else 1


def cmd_emit(cfg: RunConfig):
    s = _load_structure(cfg)
    if not isinstance(s, StructureData):
        raise InputError("USAGE", f"only Lie-algebra models can be emitted ({', '.join(LIE_BUILTINS)})")
    return _dump(s.to_json()), 0


def build_report(seed: int, samples: int) -> tuple[str, bool]:
    ok = True
    parts = ["# Extended coeffective complexes: summary report", ""]
    parts.append("## Cohomology of the extended complex, direct vs long exact sequence")
    for name, n in (("cpn", 2), ("cpn", 3), ("torus", 2), ("torus7_g2", None), ("hopf4", None),
                    ("kodaira_thurston", None)):
        s = builtin(name, n=n)
        res = compare(s)
        ok &= res["match"]
        label = f"{name}(n={n})" if n is not None else name
        parts.append("")
        parts.append(_les_text(label, res, "markdown"))
    parts.append("")
    parts.append("## G2 column profile")
    parts.append("")
    parts.append(column_profile(standard_g2()).to_markdown())
    parts.append("")
    parts.append(f"## Symbol exactness (seed {seed}, {samples} samples per shape)")
    parts.append("")
    rows = []
    for cal in (standard_symplectic(2), standard_symplectic(3), standard_g2()):
        res = symbol_sweep(cal, samples, seed)
        ok &= not res["failures"] and not res["second_half_failures"]
        rows.append((f"{cal.kind}(dim {cal.dim})", res["samples"], res["exact"],
                     res["samples"] - len(res["second_half_failures"])))
    parts.append(_md_table(["shape", "samples", "exact", "second_half_exact_except_first"], rows))
    parts.append("")
    parts.append("## Local exactness of polynomial strands")
    parts.append("")
    rows = []
    for cal, H in ((standard_symplectic(2), 4), (standard_g2(), 3)):
        found = local_exactness(cal, H)
        match = found == expected_local(cal)
        ok &= match
        cells = ", ".join(f"(r={r}, h={h}): {d}" for (r, h), d in sorted(found.items()))
        rows.append((f"{cal.kind}(dim {cal.dim})", H, cells, str(match).lower()))
    parts.append(_md_table(["shape", "max h", "nonzero cohomology", "match"], rows))
    parts.append("")
    parts.append(f"all checks passed: {str(ok).lower()}")
    return "\n".join(parts), ok


def cmd_report(cfg: RunConfig):
    samples = cfg.samples if cfg.samples != 100 else 20
    text, ok = build_report(cfg.seed, samples)
    return text, 0 if ok else 1


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "build": cmd_build,
    "hj": cmd_hj,
    "les": cmd_les,
    "symbol-check": cmd_symbol_check,
    "local-exactness": cmd_local_exactness,
    "emit": cmd_emit,
    "report": cmd_report,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coeffective", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--builtin", help="torus, torus7_g2, hopf4, kodaira_thurston, cpn")
        p.add_argument("--model", help="path to a model JSON file")
        p.add_argument("--n", type=int)
        p.add_argument("--shape", choices=(SYMPLECTIC, G2), default=SYMPLECTIC)
        p.add_argument("--alpha", help="override the Lee form with a form literal (JSON)")
        p.add_argument("--samples", type=int, default=100)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--max-homogeneity", type=int, default=4, dest="max_homogeneity")
        p.add_argument("--format", choices=FORMATS, default="markdown")
        p.add_argument("--out")
    return parser


def run(cfg: RunConfig) -> int:
    try:
        if cfg.samples < 1:
            raise InputError("PARAMS", "--samples must be at least 1")
        text, code = COMMANDS[cfg.command](cfg)
    except InputError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 2
    except StructureError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc), "details": exc.details},
                         ensure_ascii=False), file=sys.stderr)
        return 1
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return run(RunConfig(**vars(args)))


if __name__ == "__main__":
    sys.exit(main())
