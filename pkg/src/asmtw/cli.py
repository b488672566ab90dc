"""Command-line front end: ``asmtw <command> [options]``.

Every command writes self-describing output (the run configuration and the
package version are embedded).  Exit status: 0 on success, 1 when a
computation or internal validation fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__

FORMATS = ("json", "csv", "ndjson")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = "exact"
    bits: int = 256
    cap: int = 6
    threads: int = 1
    seed: int = 0
    format: str = "json"
    output: str | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "bigfloat"):
            raise UsageError(f"unknown precision mode {self.mode!r}")
        if self.mode == "bigfloat" and self.bits < 64:
            raise UsageError("bits must be at least 64 in bigfloat mode")
        if self.cap < 1:
            raise UsageError("cap must be positive")
        if self.threads < 1:
            raise UsageError("threads must be positive")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")

    def policy(self):
        from .kernel import PrecisionPolicy

        return PrecisionPolicy(self.mode, self.bits)


def _rat(v) -> str:
    from .verify import fraction_str

    return fraction_str(v)


def _num(v, cfg: RunConfig):
    """Exact values as ``p/q`` strings, big floats as decimal strings with the
    digits the mantissa supports."""
    if cfg.mode == "exact":
        return _rat(v)
    import gmpy2

    digits = int(cfg.bits * 0.30103)
    return format(gmpy2.mpfr(v, cfg.bits), f".{digits}g")


def _envelope(cmd: str, cfg: RunConfig, args: dict, result) -> dict:
    conf = asdict(cfg)
    conf.pop("output")
    conf.pop("threads")  # results do not depend on it
    return {"command": cmd, "version": __version__, "config": conf, "args": args,
            "result": result}


def _csv_text(header, rows, meta: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    path = cfg.output
    if path is None:
        sys.stdout.write(text)
        return
    outdir = os.environ.get("ASMTW_OUTPUT_DIR")
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    with open(path, "w") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


class ValidationFailure(Exception):
    def __init__(self, text: str):
        super().__init__("internal validation failed")
        self.text = text


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_count(a, cfg):
    from .combinatorics import count_asm, count_gog_trapezoids, count_magog_trapezoids, enumerate_asm

    if a.k is None:
        res = {"n": a.n, "asm_count": count_asm(a.n)}
        if a.brute:
            res["brute_force"] = len(enumerate_asm(a.n, cap=cfg.cap))
            if res["brute_force"] != res["asm_count"]:
                raise ValidationFailure(_dump(_envelope("count", cfg, vars_of(a), res)))
    else:
        res = {"n": a.n, "k": a.k, "gog": count_gog_trapezoids(a.n, a.k),
               "magog": count_magog_trapezoids(a.n, a.k)}
        if res["gog"] != res["magog"]:
            raise ValidationFailure(_dump(_envelope("count", cfg, vars_of(a), res)))
    return _dump(_envelope("count", cfg, vars_of(a), res))


def cmd_enumerate(a, cfg):
    from .combinatorics import (
        iter_asm, iter_gog_trapezoids, iter_magog_trapezoids, iter_matchings, iter_pcsm,
    )

    if a.n > cfg.cap and a.kind in ("asm", "pcsm", "matching"):
        raise UsageError(f"n={a.n} exceeds the enumeration cap {cfg.cap}")
    k = a.n if a.k is None else a.k
    source = {
        "asm": lambda: iter_asm(a.n, cap=cfg.cap),
        "pcsm": lambda: iter_pcsm(a.n, cap=cfg.cap),
        "matching": lambda: iter_matchings(a.n, cap=cfg.cap),
        "gog": lambda: iter_gog_trapezoids(a.n, k),
        "magog": lambda: iter_magog_trapezoids(a.n, k),
    }[a.kind]
    head = _envelope("enumerate", cfg, vars_of(a), None)
    lines = [json.dumps({"header": head}, sort_keys=True)]
    lines += [json.dumps(obj.to_dict(), sort_keys=True) for obj in source()]
    return "\n".join(lines) + "\n"


def cmd_biject(a, cfg):
    from .combinatorics import (
        AsmMatrix, asm_to_gog, asm_to_pcsm, gog_to_asm, gog_to_pcsm, iter_asm, pcsm_to_asm,
        top_path, x_gog, x_gog_from_triangle,
    )

    if a.asm is not None:
        asm = AsmMatrix(json.loads(a.asm))
        c, g = asm_to_pcsm(asm), asm_to_gog(asm)
        res = {"asm": asm.to_dict(), "pcsm": c.to_dict(), "gog": g.to_dict(),
               "top_path": list(top_path(c).values), "x_gog": x_gog(c)}
        return _dump(_envelope("biject", cfg, vars_of(a), res))
    if a.n > cfg.cap:
        raise UsageError(f"n={a.n} exceeds the enumeration cap {cfg.cap}")
    total = bad = 0
    for asm in iter_asm(a.n, cap=cfg.cap):
        total += 1
        c, g = asm_to_pcsm(asm), asm_to_gog(asm)
        ok = (pcsm_to_asm(c) == asm and gog_to_asm(g) == asm and gog_to_pcsm(g) == c
              and x_gog(c) == x_gog_from_triangle(g) and top_path(c).maximum == c.n - x_gog(c))
        bad += not ok
    res = {"n": a.n, "checked": total, "failures": bad}
    text = _dump(_envelope("biject", cfg, vars_of(a), res))
    if bad:
        raise ValidationFailure(text)
    return text


def cmd_gap(a, cfg):
    from .kernel import gap_probability

    v = gap_probability(a.n, a.s, cfg.policy())
    return _dump(_envelope("gap", cfg, vars_of(a), {"n": a.n, "s": a.s, "gap": _num(v, cfg)}))


def cmd_law(a, cfg):
    from .kernel import law_of_max_T, law_of_x

    law = law_of_x(a.n, cfg.policy()) if a.of == "x" else law_of_max_T(a.n, cfg.policy())
    if cfg.format == "csv":
        rows = [(k, _num(v, cfg)) for k, v in sorted(law.items())]
        return _csv_text(["value", "probability"], rows, _envelope("law", cfg, vars_of(a), None))
    res = {str(k): _num(v, cfg) for k, v in sorted(law.items())}
    return _dump(_envelope("law", cfg, vars_of(a), res))


def cmd_kasteleyn_check(a, cfg):
    from .combinatorics import count_asm
    from .kasteleyn import build_kasteleyn, inverse_residual, kasteleyn_pfaffian, local_stat_prob

    k = build_kasteleyn(a.n)  # raises on a face-parity violation
    pf = kasteleyn_pfaffian(a.n)
    res = {"n": a.n, "vertices": len(k.graph.vertices), "pfaffian": int(pf),
           "asm_count": count_asm(a.n + 1), "face_parity": "ok"}
    ok = abs(int(pf)) == res["asm_count"]
    if a.n <= a.inverse_max:
        r = inverse_residual(a.n)
        res["inverse_max_error"] = _rat(r)
        res["inverse_exact"] = r == 0
        ok &= r == 0
        edges = []
        for u, v in k.graph.edges:
            p = local_stat_prob(a.n, [(u, v)])
            ok &= 0 <= p <= 1
            edges.append({"edge": [list(u), list(v)], "probability": _rat(p)})
        res["edge_probabilities"] = edges
    text = _dump(_envelope("kasteleyn-check", cfg, vars_of(a), res))
    if not ok:
        raise ValidationFailure(text)
    return text


def cmd_tw_goe(a, cfg):
    from .goetw import QuadratureRule, f1

    r = f1(a.s, QuadratureRule(a.nodes))
    res = r.to_dict()
    res["precision"] = 17
    return _dump(_envelope("tw-goe", cfg, vars_of(a), res))


def cmd_tw_goe_table(a, cfg):
    from .goetw import QuadratureRule, f1_values

    if a.step <= 0 or a.to < a.frm:
        raise UsageError("need step > 0 and --to >= --from")
    ss = np.arange(a.frm, a.to + a.step / 2, a.step)
    vals = f1_values(ss, QuadratureRule(a.nodes))
    return _csv_text(["s", "F1"], list(zip(ss.tolist(), vals.tolist())),
                     _envelope("tw-goe-table", cfg, vars_of(a), None))


def cmd_converge(a, cfg):
    from .asymptotics import rescaled_kernel_grid
    from .goetw import kgoe_matrix

    grid = np.arange(-3.0, 3.0001, 0.5)
    goe = kgoe_matrix(grid)[(a.i, a.j)]
    rows = []
    for n in (n for n in (50, 100, 200, 400, 800) if n <= a.nmax):
        m = rescaled_kernel_grid(n, grid)[(a.i, a.j)]
        for p, xi in enumerate(grid):
            for q, eta in enumerate(grid):
                rows.append((n, float(xi), float(eta), float(m[p, q]), float(goe[p, q]),
                             float(abs(m[p, q] - goe[p, q]))))
    if not rows:
        raise UsageError("nmax must be at least 50")
    return _csv_text(["n", "xi", "eta", "rescaled", "goe", "abs_err"], rows,
                     _envelope("converge", cfg, vars_of(a), None))


def cmd_saddle(a, cfg):
    from .asymptotics import saddle_report

    return _dump(_envelope("saddle", cfg, vars_of(a), saddle_report(a.a).to_dict()))


def cmd_limit_shape(a, cfg):
    from .asymptotics import limit_shape

    return _csv_text(["x", "y"], limit_shape(a.points), _envelope("limit-shape", cfg, vars_of(a), None))


def cmd_sample(a, cfg):
    from .sampler import GlauberChain

    if a.count < 1 or a.sweeps < 0:
        raise UsageError("count must be positive and sweeps non-negative")
    seeds = np.random.SeedSequence(cfg.seed).spawn(a.count)
    head = _envelope("sample", cfg, vars_of(a), None)
    lines = [json.dumps({"header": head}, sort_keys=True)]
    for k, ss in enumerate(seeds):
        ch = GlauberChain(a.n, ss).sweep(a.sweeps)
        if a.summary:
            lines.append(json.dumps({"index": k, "x_gog": ch.x_gog(), "max_T": ch.max_T()}))
        else:
            lines.append(json.dumps(ch.pcsm().to_dict(), sort_keys=True))
    return "\n".join(lines) + "\n"


def cmd_max_law(a, cfg):
    from .sampler import empirical_max_law

    e = empirical_max_law(a.n, a.count, a.sweeps, cfg.seed, a.burn_in)
    meta = _envelope("max-law", cfg, vars_of(a), {"ks": e.ks, "count": e.count,
                                                  "center": e.center, "scale": e.scale})
    if cfg.format == "csv":
        return _csv_text(["s", "ecdf"], e.table(), meta)
    meta["result"]["ecdf"] = [[s, p] for s, p in e.table()]
    return _dump(meta)


def cmd_verify_all(a, cfg):
    from .verify import run_all

    which = None if not a.only else [int(x) for x in a.only.split(",")]
    results = run_all(which, echo=lambda line: print(line, file=sys.stderr))
    report = [r.to_dict() for r in results]
    text = json.dumps({"command": "verify-all", "version": __version__, "report": report},
                      sort_keys=True, default=str) + "\n"
    if not all(r.passed for r in results):
        raise ValidationFailure(text)
    return text


def vars_of(a) -> dict:
    skip = {"func", "command", "default_format", "mode", "bits", "cap", "threads", "seed", "format", "output"}
    return {k: v for k, v in sorted(vars(a).items()) if k not in skip}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exact", "bigfloat"), default=None)
    common.add_argument("--bits", type=int, default=None, help="mantissa bits; implies bigfloat")
    common.add_argument("--cap", type=int, default=6, help="largest n for brute-force enumeration")
    common.add_argument("--threads", type=int, default=int(os.environ.get("ASMTW_THREADS", "1")))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--output", default=None)

    p = argparse.ArgumentParser(prog="asmtw", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_, fmt="json"):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func, default_format=fmt)
        return sp

    sp = add("count", cmd_count, "ASM and trapezoid counts")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--brute", action="store_true")

    sp = add("enumerate", cmd_enumerate, "list objects as NDJSON", "ndjson")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--kind", choices=("asm", "pcsm", "gog", "magog", "matching"), default="asm")
    sp.add_argument("--k", type=int)

    sp = add("biject", cmd_biject, "check or apply the ASM/PCSM/gog bijections")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--asm", help="ASM as a JSON list of rows")

    sp = add("gap", cmd_gap, "probability of no particle in {0..s-1}")
    sp.add_argument("--exact", action="store_const", const="exact", dest="mode")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)

    sp = add("law", cmd_law, "exact law of X or of max T")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--of", choices=("x", "maxT"), default="maxT")

    sp = add("kasteleyn-check", cmd_kasteleyn_check, "Pfaffian and inverse checks")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--inverse-max", type=int, default=4, dest="inverse_max")

    sp = add("tw-goe", cmd_tw_goe, "GOE Tracy-Widom F1(s)")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--nodes", type=int, default=80)

    sp = add("tw-goe-table", cmd_tw_goe_table, "F1 on a grid", "csv")
    sp.add_argument("--from", type=float, dest="frm", required=True)
    sp.add_argument("--to", type=float, required=True)
    sp.add_argument("--step", type=float, required=True)
    sp.add_argument("--nodes", type=int, default=80)

    sp = add("converge", cmd_converge, "rescaled kernel vs GOE kernel", "csv")
    sp.add_argument("--i", type=int, choices=(1, 2), required=True)
    sp.add_argument("--j", type=int, choices=(1, 2), required=True)
    sp.add_argument("--nmax", type=int, default=400)

    sp = add("saddle", cmd_saddle, "saddle points and derivatives at a")
    sp.add_argument("--a", type=float, required=True)

    sp = add("limit-shape", cmd_limit_shape, "limit curve of the top path", "csv")
    sp.add_argument("--points", type=int, default=101)

    sp = add("sample", cmd_sample, "independent Glauber samples", "ndjson")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--sweeps", type=int, default=100)
    sp.add_argument("--summary", action="store_true")

    sp = add("max-law", cmd_max_law, "empirical law of rescaled max T")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1000)
    sp.add_argument("--sweeps", type=int, default=1, help="sweeps between samples")
    sp.add_argument("--burn-in", type=int, default=None, dest="burn_in")

    sp = add("verify-all", cmd_verify_all, "run the acceptance suite")
    sp.add_argument("--only", default="", help="comma-separated criterion numbers")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    fmt = a.format or a.default_format
    try:
        mode = a.mode or ("bigfloat" if a.bits is not None else "exact")
        bits = 256 if a.bits is None else a.bits
        cfg = RunConfig(mode, bits, a.cap, a.threads, a.seed, fmt, a.output)
        text = a.func(a, cfg)
    except (UsageError, ValueError) as e:
        # ValueError is raised by the library for out-of-range arguments
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except ValidationFailure as e:
        _emit(e.text, cfg)
        print("error: internal validation failed", file=sys.stderr)
        return 1
    except Exception as e:  # computation failure
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    _emit(text, cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
