"""Command-line entry point.

Global flags can also be set from the environment: ``FELDSHIFT_CONFIG``,
``FELDSHIFT_OUT``, ``FELDSHIFT_SEED``, ``FELDSHIFT_CAP_MATERIALIZE``,
``FELDSHIFT_CAP_SCAN`` and ``FELDSHIFT_JOBS``.  Flags win over the environment,
which wins over values in the config file.

Exit codes: 0 success, 1 a check failed, 2 bad config or arguments, 3 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, analysis, fbar as F, params as P, report, suites, words
from .params import ParamError, ParamSeq

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
ENV_PREFIX = "FELDSHIFT_"
DEFAULT_PARAMS = {"n": [2, 2, 2, 2, 2, 2]}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config


def _env(name: str) -> Optional[str]:
    v = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    return v if v not in (None, "") else None


def _pick(args, name: str, cfg: dict, default, conv=str):
    v = getattr(args, name.replace("-", "_"), None)
    if v is None:
        v = _env(name)
    if v is None:
        v = cfg.get(name.replace("-", "_"), default)
    try:
        return conv(v) if v is not None else None
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad value for {name}: {v!r}") from e


def load_config(args) -> tuple[dict, suites.RunConfig]:
    path = getattr(args, "config", None) or _env("config")
    raw: dict = {}
    if path:
        text = Path(path).read_text()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    pcfg = {k: raw[k] for k in ("n", "p", "strict") if k in raw} or dict(DEFAULT_PARAMS)
    try:
        ps = ParamSeq.from_config(pcfg)
    except (ParamError, KeyError, TypeError, ValueError, SyntaxError) as e:
        raise ConfigError(f"bad parameters: {e}") from e
    rc = suites.RunConfig(
        params=ps,
        cap_materialize=_pick(args, "cap-materialize", raw, words.DEFAULT_MATERIALIZE_CAP, int),
        cap_scan=_pick(args, "cap-scan", raw, analysis.DEFAULT_SCAN_CAP, int),
        seed=_pick(args, "seed", raw, suites.RunConfig.seed, int),
        jobs=_pick(args, "jobs", raw, 1, int),
    )
    for key in ("horizon", "level", "gamma_horizon", "random_cases", "lb_offsets", "lb_max_length"):
        if key in raw:
            try:
                setattr(rc, key, int(raw[key]))
            except (TypeError, ValueError) as e:
                raise ConfigError(f"bad value for {key}") from e
    if "n_list" in raw:
        rc.n_list = tuple(int(v) for v in raw["n_list"])
    if "suites" in raw:
        rc.suites = tuple(raw["suites"])
    if rc.cap_materialize <= 0 or rc.cap_scan <= 0 or rc.jobs <= 0:
        raise ConfigError("caps and jobs must be positive")
    out = _pick(args, "out", raw, None)
    return {"out": out}, rc


# ---------------------------------------------------------------------------
# output


def _emit(text: str, out: Optional[str], name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text)


def _write_table(out: Optional[str], name: str, header, rows) -> None:
    if out is not None:
        _emit(report.csv_text(header, rows), out, name)


def read_word_file(path: str) -> np.ndarray:
    """Newline-separated decimal symbol ids; blank lines are ignored."""
    text = Path(path).read_text()
    try:
        vals = [int(line) for line in text.split() if line.strip()]
    except ValueError as e:
        raise ConfigError(f"{path}: not a word file ({e})") from e
    if any(v < 0 for v in vals):
        raise ConfigError(f"{path}: negative symbol id")
    return np.asarray(vals, dtype=np.int64)


def word_file_text(arr: np.ndarray) -> str:
    return "".join(f"{v}\n" for v in arr.tolist())


# ---------------------------------------------------------------------------
# subcommands


def cmd_params(args, rc: suites.RunConfig, out) -> int:
    horizon = args.horizon if args.horizon is not None else rc.effective_horizon()
    length_fn = words.length_L if rc.params.p else None
    try:
        rep = P.validate(rc.params, horizon, length_fn=length_fn)
    except ParamError as e:
        raise ConfigError(str(e)) from e
    payload = {"params": rc.params.to_config(), "horizon": horizon, "passed": rep.passed,
               "conditions": rep.conditions}
    if args.gamma is not None:
        payload["gamma"] = P.gamma(rc.params, args.gamma).gamma
    _emit(report.dumps(payload), out, "params.json")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _select_word(rc: suites.RunConfig, args):
    tw = words.tower(rc.params)
    k, i = args.level, args.index
    try:
        if args.kind == "a":
            return tw.a(k, i)
        if args.kind == "b":
            return tw.b(k, i)
        return tw.c(k)
    except (IndexError, ValueError) as e:
        raise ConfigError(str(e)) from e


def cmd_words(args, rc: suites.RunConfig, out) -> int:
    w = _select_word(rc, args)
    if args.action == "build":
        payload = {"kind": args.kind, "level": args.level, "index": args.index,
                   "length": w.length, "symbols": words.symbol_names(rc.params)}
        if args.stats:
            payload["stats"] = words.word_stats(w)
        if args.file:
            Path(args.file).write_text(word_file_text(words.materialize(w, rc.cap_materialize)))
        sys.stdout.write(report.dumps(payload))
    elif args.action == "at":
        if args.pos is None:
            raise ConfigError("words at needs --pos")
        try:
            s = words.symbol_at(w, args.pos)
        except IndexError as e:
            raise ConfigError(str(e)) from e
        names = words.symbol_names(rc.params)
        sys.stdout.write(report.dumps({"pos": args.pos, "symbol": s, "name": names[s]}))
    else:
        if args.start is None or args.len is None:
            raise ConfigError("words extract needs --start and --len")
        if args.start < 0 or args.len < 0 or args.start + args.len > w.length:
            raise ConfigError("extract range out of bounds")
        arr = words.extract(w, args.start, args.len, rc.cap_materialize)
        text = word_file_text(arr)
        if args.file:
            Path(args.file).write_text(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_fbar(args, rc: suites.RunConfig, out) -> int:
    method = "bitpar" if args.bitpar else "auto"
    if args.action == "lbtest":
        if not args.words or args.eps is None:
            raise ConfigError("fbar lbtest needs --words DIR and --eps p/q")
        try:
            eps = Fraction(args.eps)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"bad --eps {args.eps!r}") from e
        files = sorted(p for p in Path(args.words).iterdir() if p.is_file())
        if not files:
            raise ConfigError(f"no word files in {args.words}")
        W = [read_word_file(str(p)) for p in files]
        try:
            res = F.lb_test(W, eps, method=method, jobs=rc.jobs, keep_matrix=True)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        payload = {"files": [p.name for p in files], "eps": eps, "max_fbar": res.max_fbar,
                   "witness": res.witness, "pairs": res.pairs, "passed": res.passed}
        _emit(report.dumps(payload), out, "lbtest.json")
        _write_table(out, "lbtest_matrix.csv", ["word"] + [p.name for p in files],
                     [[p.name] + row for p, row in zip(files, res.matrix)])
        return EXIT_OK if res.passed else EXIT_FAIL
    if not args.x or not args.y:
        raise ConfigError("fbar needs --x FILE and --y FILE")
    x, y = read_word_file(args.x), read_word_file(args.y)
    try:
        res = F.fbar(x, y, method=method, align=args.align)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    _emit(report.dumps(res.to_dict()), out, "fbar.json")
    return EXIT_OK


def _parse_target(rc: suites.RunConfig, spec: str, m: int) -> analysis.DoubleBracket:
    ps = rc.params
    if spec == "bf":
        return analysis.target_bf(ps, m)
    if spec == "c":
        return analysis.target_c(ps, m)
    if spec.startswith("word:"):
        parts = spec[5:].split(":")
        try:
            kind, level = parts[0], int(parts[1])
            index = int(parts[2]) if len(parts) > 2 else 1
        except (IndexError, ValueError) as e:
            raise ConfigError(f"bad target {spec!r}; expected word:KIND:LEVEL[:INDEX]") from e
        tw = words.tower(ps)
        w = {"a": lambda: tw.a(level, index), "b": lambda: tw.b(level, index),
             "c": lambda: tw.c(level)}.get(kind)
        if w is None:
            raise ConfigError(f"bad word kind {kind!r}")
        return analysis.DoubleBracket(w(), name=f"[[{kind}_{level},{index}]]")
    raise ConfigError(f"unknown target {spec!r}")


def cmd_analysis(args, rc: suites.RunConfig, out) -> int:
    if args.action == "complexity":
        try:
            ns = [int(v) for v in args.n_list.split(",") if v.strip()]
        except ValueError as e:
            raise ConfigError(f"bad --n-list {args.n_list!r}") from e
        level = args.level if args.level is not None else rc.level
        rep = analysis.complexity_report(rc.params, ns, level, rc.cap_scan)
        if args.format == "csv":
            rows = [(e.n, e.count, e.level, e.prefix_length, e.stable, e.structural_bound,
                     e.right_special) for e in rep.entries]
            _emit(report.csv_text(["n", "P_n", "level", "prefix_length", "stable",
                                   "structural_bound", "right_special"], rows), out, "complexity.csv")
        else:
            _emit(report.dumps({"entries": rep.entries, "log_p_over_n": rep.entropy_proxy()}),
                  out, "complexity.json")
        return EXIT_OK
    if args.action == "freq":
        target = _parse_target(rc, args.target, args.m)
        try:
            r = analysis.frequency(rc.params, args.tower.upper(), target, args.scan, rc.cap_scan)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        _emit(report.dumps({"report": r, "frequency": r.frequency}), out, "frequency.json")
        return EXIT_OK
    res = suites.run_suite(args.suite, rc)
    _emit(report.dumps(_suite_payload(res)), out, f"{res.name}.json")
    for name, (header, rows) in sorted(res.tables.items()):
        _write_table(out, name, header, rows)
    return EXIT_FAIL if res.status == "fail" else EXIT_OK


def _suite_payload(res: suites.SuiteResult) -> dict:
    return {"suite": res.name, "outcome": res.outcome, "report": res.report}


def cmd_verify_all(args, rc: suites.RunConfig, out) -> int:
    out = out or "feldshift-out"
    names = list(rc.suites or suites.SUITES)
    unknown = [n for n in names if n not in suites.SUITES]
    if unknown:
        raise ConfigError(f"unknown suites: {unknown}")
    timings: dict[str, float] = {}

    def run(name):
        t0 = time.perf_counter()
        res = suites.run_suite(name, rc)
        timings[name] = round(time.perf_counter() - t0, 3)
        return res

    if rc.jobs > 1:
        with ThreadPoolExecutor(rc.jobs) as ex:
            results = list(ex.map(run, names))
    else:
        results = [run(n) for n in names]
    # written serially, in suite order
    d = Path(out)
    (d / "reports").mkdir(parents=True, exist_ok=True)
    (d / "tables").mkdir(parents=True, exist_ok=True)
    for res in results:
        (d / "reports" / f"{res.name}.json").write_text(report.dumps(_suite_payload(res)))
        for name, (header, rows) in sorted(res.tables.items()):
            (d / "tables" / name).write_text(report.csv_text(header, rows))
    cfg_text = json.dumps(rc.to_dict(), sort_keys=True)
    manifest = {
        "tool_version": __version__,
        "config": rc.to_dict(),
        "config_hash": hashlib.sha256(cfg_text.encode()).hexdigest(),
        "suites": [{"name": r.name, "outcome": r.outcome, "seconds": timings[r.name]}
                   for r in results],
    }
    (d / "manifest.json").write_text(report.dumps(manifest))
    summary = {r.name: r.outcome for r in results}
    sys.stdout.write(report.dumps(summary))
    return EXIT_FAIL if any(r.status == "fail" for r in results) else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _globals(p: argparse.ArgumentParser, with_out: bool = True) -> None:
    g = p.add_argument_group("global options")
    g.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    if with_out:
        g.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--cap-materialize", type=int, default=argparse.SUPPRESS)
    g.add_argument("--cap-scan", type=int, default=argparse.SUPPRESS)
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="feldshift", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    _globals(p)
    sub = p.add_subparsers(dest="command", required=True)

    pp = sub.add_parser("params", help="validate growth conditions")
    pp.add_argument("action", choices=["validate"])
    pp.add_argument("--horizon", type=int)
    pp.add_argument("--gamma", type=int, metavar="K", help="also report Gamma_0..Gamma_K")
    _globals(pp)

    pw = sub.add_parser("words", help="build and query construction words")
    pw.add_argument("action", choices=["build", "at", "extract"])
    pw.add_argument("--kind", choices=["a", "b", "c"], default="b")
    pw.add_argument("--level", type=int, default=1)
    pw.add_argument("--index", type=int, default=1)
    pw.add_argument("--stats", action="store_true")
    pw.add_argument("--pos", type=int)
    pw.add_argument("--start", type=int)
    pw.add_argument("--len", type=int)
    pw.add_argument("--out", dest="file", help="word file to write (one symbol id per line)")
    _globals(pw, with_out=False)

    pf = sub.add_parser("fbar", help="f-bar distance between word files")
    pf.add_argument("action", nargs="?", choices=["pair", "lbtest"], default="pair")
    pf.add_argument("--x")
    pf.add_argument("--y")
    pf.add_argument("--bitpar", action="store_true")
    pf.add_argument("--align", action="store_true")
    pf.add_argument("--words", help="directory of word files")
    pf.add_argument("--eps", help="threshold as p/q")
    _globals(pf)

    pa = sub.add_parser("analysis", help="complexity, frequencies and verifiers")
    pa.add_argument("action", choices=["complexity", "freq", "verify"])
    pa.add_argument("--n-list", default="1,2,4,8")
    pa.add_argument("--level", type=int)
    pa.add_argument("--format", choices=["json", "csv"], default="json")
    pa.add_argument("--tower", choices=["b", "c", "B", "C"], default="b")
    pa.add_argument("--target", default="bf", help="bf, c or word:KIND:LEVEL[:INDEX]")
    pa.add_argument("--m", type=int, default=1)
    pa.add_argument("--scan", type=int, default=2)
    pa.add_argument("--suite", choices=sorted(suites.SUITES), default="gamma")
    _globals(pa)

    pv = sub.add_parser("verify-all", help="run every suite and write reports")
    _globals(pv)
    return p


COMMANDS = {"params": cmd_params, "words": cmd_words, "fbar": cmd_fbar,
            "analysis": cmd_analysis, "verify-all": cmd_verify_all}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    try:
        extra, rc = load_config(args)
        return COMMANDS[args.command](args, rc, extra["out"])
    except ConfigError as e:
        print(f"feldshift: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except words.CapExceeded as e:
        print(f"feldshift: {e}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as e:
        print(f"feldshift: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
