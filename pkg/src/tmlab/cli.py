"""Command-line interface.

Usage:
    tmlab generate -b 2 -m 2 -n 16 --rename ab
    tmlab critical -b 5 -m 3 --scan 200
    tmlab occurrences -b 5 -m 3 -N 3 -i 0 --bound 800 --verify
    tmlab index -b 5 -m 3 --start 1 --factor 012 --horizon 1000
    tmlab verify --grid b=2..6,m=1..6 --bound 20000

Exit codes: 0 success, 1 verification failure, 2 invalid arguments.
"""

from __future__ import annotations

import csv
import io
import json
import random
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable

import click
import numpy as np

from . import occurrences as occ
from .repetition import (
    FactorNotFound,
    critical_exponent_closed_form,
    find_overlap,
    format_exponent,
    index_of_factor,
    max_exponent_in_prefix,
)
from .words import LazyWord, TMParams, is_periodic, parse_rename, prefix_by_morphism, rename

__all__ = ["main", "cli", "parse_grid", "run_suite", "SUITES"]

EXIT_FAIL = 1


def _params(b: int, m: int, start: int) -> TMParams:
    try:
        return TMParams(b, m, start)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _symbols(rename_arg: str | None, m: int) -> list[str] | None:
    if rename_arg is None:
        return None
    try:
        return parse_rename(rename_arg, m)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _record(command: str, params: TMParams, payload: dict[str, Any], provenance: dict[str, Any]) -> dict[str, Any]:
    return {
        "command": command,
        "params": {"b": params.b, "m": params.m, "start": params.start},
        "payload": payload,
        "provenance": provenance,
    }


def dump_json(record: dict[str, Any]) -> str:
    return json.dumps(record, indent=2, ensure_ascii=False)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


def _positions_csv(positions: list[int] | tuple[int, ...]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["position"])
    writer.writerows([p] for p in positions)
    return buf.getvalue().rstrip("\n")


def _word_opts(f: Callable) -> Callable:
    f = click.option("--start", default=0, show_default=True, help="Start letter (residue).")(f)
    f = click.option("-m", "m", type=click.IntRange(min=1), required=True, help="Alphabet size.")(f)
    f = click.option("-b", "b", type=click.IntRange(min=2), required=True, help="Base (block length).")(f)
    return f


def _output_opts(f: Callable) -> Callable:
    f = click.option("--out", type=click.Path(dir_okay=False, writable=True), help="Write output to FILE.")(f)
    f = click.option("--json", "as_json", is_flag=True, help="Emit a JSON record.")(f)
    return f


@click.group()
@click.version_option(package_name="artifact")
def cli() -> None:
    """Generalized Thue-Morse words: construction, critical exponents, critical occurrences."""


@cli.command()
@_word_opts
@click.option("-n", "--length", "length", type=click.IntRange(min=0), required=True, help="Prefix length.")
@click.option("--rename", "rename_arg", help="m distinct display symbols for residues 0..m-1.")
@click.option("--check", is_flag=True, help="Recompute with the digit-sum formula and compare.")
@_output_opts
def generate(b: int, m: int, start: int, length: int, rename_arg: str | None, check: bool, as_json: bool, out: str | None) -> None:
    """Print a prefix of the fixpoint of the morphism."""
    params = _params(b, m, start)
    symbols = _symbols(rename_arg, m)
    word = prefix_by_morphism(params, length)
    text = rename(word, symbols)
    ok = True
    if check:
        ok = bool(np.array_equal(word, LazyWord(params).prefix(length)))
    if as_json:
        payload: dict[str, Any] = {"word": text}
        if check:
            payload["check"] = "PASS" if ok else "FAIL"
        _emit(dump_json(_record("generate", params, payload, {"length": length})), out)
    else:
        _emit(text, out)
        if check:
            click.echo(f"check: {'PASS' if ok else 'FAIL'}", err=True)
    if not ok:
        sys.exit(EXIT_FAIL)


def _parse_scan(ctx: click.Context, param: click.Parameter, value: str | None) -> int | str | None:
    if value is None or value == "auto":
        return value
    try:
        horizon = int(value)
    except ValueError:
        raise click.BadParameter("expected an integer horizon or 'auto'") from None
    if horizon < 2:
        raise click.BadParameter("horizon must be >= 2")
    return horizon


@cli.command()
@_word_opts
@click.option("--scan", "scan", is_flag=False, flag_value="auto", default=None, callback=_parse_scan,
              metavar="[HORIZON|auto]", help="Also scan a prefix for its maximal exponent.")
@click.option("--rename", "rename_arg", help="m distinct display symbols for residues 0..m-1.")
@_output_opts
def critical(b: int, m: int, start: int, scan: int | str | None, rename_arg: str | None, as_json: bool, out: str | None) -> None:
    """Critical exponent in closed form, optionally checked against a prefix scan."""
    params = _params(b, m, start)
    symbols = _symbols(rename_arg, m)
    closed = critical_exponent_closed_form(params)
    suggested = occ.suggested_horizon(params)
    payload: dict[str, Any] = {"closed_form": format_exponent(closed)}
    provenance: dict[str, Any] = {"suggested_horizon": suggested}
    lines = [format_exponent(closed)]
    ok = True
    if scan is not None:
        horizon = suggested if scan == "auto" else int(scan)
        report = max_exponent_in_prefix(LazyWord(params), horizon)
        if params.periodic:
            _, period = is_periodic(params)
            x = LazyWord(params).prefix(horizon)
            tiled = np.resize(np.asarray(period, dtype=x.dtype), horizon)
            ok = report.truncated and bool(np.array_equal(x, tiled))
        else:
            ok = report.agrees
        status = "PASS" if ok else "FAIL"
        payload.update(
            empirical_max=format_exponent(report.empirical_max),
            critical_factor=rename(report.critical_factor, symbols),
            witness_position=report.witness_position,
            truncated=report.truncated,
            status=status,
        )
        provenance["horizon"] = horizon
        lines.append(
            f"empirical {format_exponent(report.empirical_max)} at {report.witness_position}"
            f" factor {rename(report.critical_factor, symbols)}"
            f"{' (truncated by horizon)' if report.truncated else ''}"
        )
        if not ok and horizon < suggested:
            lines.append(f"horizon {horizon} ends before the first critical power; try --scan {suggested}")
        lines.append(status)
    if as_json:
        _emit(dump_json(_record("critical", params, payload, provenance)), out)
    else:
        _emit("\n".join(lines), out)
    if not ok:
        sys.exit(EXIT_FAIL)


@cli.command()
@_word_opts
@click.option("-N", "n", type=int, required=True, help="Base factor length (not divisible by b).")
@click.option("-i", "scale", type=click.IntRange(min=0), default=0, show_default=True, help="Scale exponent: factor length N*b^i.")
@click.option("--bound", type=click.IntRange(min=0), required=True, help="Enumerate positions strictly below this.")
@click.option("--union", is_flag=True, help="For b=m=2, report b^i(B_1 | C) for both lengths at once.")
@click.option("--verify", is_flag=True, help="Compare with a brute-force scan of the prefix.")
@click.option("--csv", "as_csv", is_flag=True, help="Emit positions as CSV.")
@_output_opts
def occurrences(b: int, m: int, start: int, n: int, scale: int, bound: int, union: bool, verify: bool,
                as_csv: bool, as_json: bool, out: str | None) -> None:
    """Positions of critical powers of factor length N*b^i."""
    params = _params(b, m, start)
    try:
        found = occ.critical_occurrences(params, n, scale, bound, union=union)
    except (occ.InadmissibleParameters, ValueError) as exc:
        raise click.UsageError(str(exc)) from exc
    positions = list(found.positions)
    ok = True
    payload: dict[str, Any] = {
        "kind": found.kind,
        "exponent": format_exponent(critical_exponent_closed_form(params)),
        "positions": positions,
    }
    if verify:
        brute = _brute_occurrences(params, n, scale, bound, union)
        ok = brute == positions
        payload["verify"] = "PASS" if ok else "FAIL"
        if not ok:
            payload["only_enumerated"] = sorted(set(positions) - set(brute))
            payload["only_scanned"] = sorted(set(brute) - set(positions))
    if as_json:
        _emit(dump_json(_record("occurrences", params, payload, {"bound": bound, "N": n, "i": scale})), out)
    elif as_csv:
        _emit(_positions_csv(positions), out)
    else:
        _emit(" ".join(map(str, positions)), out)
    if verify and not as_json:
        click.echo(f"verify: {payload['verify']}", err=True)
    if not ok:
        sys.exit(EXIT_FAIL)


def _brute_occurrences(params: TMParams, n: int, scale: int, bound: int, union: bool = False) -> list[int]:
    e = critical_exponent_closed_form(params)
    word = LazyWord(params)
    lengths = [1, 3] if union and (params.b, params.m) == (2, 2) else [n]
    found: set[int] = set()
    for base in lengths:
        found.update(occ.scan_power_occurrences(word, base * params.b**scale, e, bound))
    return sorted(found)


@cli.command()
@_word_opts
@click.option("--factor", required=True, help="Factor as residues (e.g. 012) or in --rename symbols.")
@click.option("--horizon", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--rename", "rename_arg", help="m distinct display symbols for residues 0..m-1.")
@_output_opts
def index(b: int, m: int, start: int, factor: str, horizon: int, rename_arg: str | None, as_json: bool, out: str | None) -> None:
    """Index of a factor within a prefix."""
    params = _params(b, m, start)
    symbols = _symbols(rename_arg, m)
    lookup = {s: i for i, s in enumerate(symbols)} if symbols else {str(i): i for i in range(min(m, 10))}
    try:
        w = [lookup[ch] for ch in factor]
    except KeyError as exc:
        raise click.UsageError(f"unknown letter {exc.args[0]!r} in factor") from None
    try:
        res = index_of_factor(LazyWord(params), w, horizon)
    except FactorNotFound as exc:
        raise click.UsageError(str(exc)) from exc
    payload = {
        "factor": rename(res.factor, symbols),
        "exponent": format_exponent(res.exponent),
        "witness_position": res.witness_position,
        "truncated": res.truncated,
    }
    if as_json:
        _emit(dump_json(_record("index", params, payload, {"horizon": horizon})), out)
    else:
        tail = " (truncated by horizon)" if res.truncated else ""
        _emit(f"{payload['exponent']} at {res.witness_position}{tail}", out)


# --- verification suites -------------------------------------------------------

def parse_grid(text: str) -> list[tuple[int, int]]:
    """Parse ``b=2..6,m=1..6`` (single values like ``b=5`` also accepted)."""
    ranges: dict[str, range] = {}
    for part in text.split(","):
        match = re.fullmatch(r"\s*([bm])\s*=\s*(\d+)(?:\.\.(\d+))?\s*", part)
        if not match:
            raise ValueError(f"bad grid component {part!r}")
        lo = int(match.group(2))
        hi = int(match.group(3) or lo)
        ranges[match.group(1)] = range(lo, hi + 1)
    if set(ranges) != {"b", "m"}:
        raise ValueError("grid needs both b and m ranges")
    return [(b, m) for b in ranges["b"] for m in ranges["m"]]


def _suite_construction(params: TMParams, bound: int) -> tuple[bool | None, str]:
    ok = bool(np.array_equal(prefix_by_morphism(params, bound), LazyWord(params).prefix(bound)))
    return ok, f"{bound} letters"


def _suite_periodicity(params: TMParams, bound: int) -> tuple[bool | None, str]:
    periodic, period = is_periodic(params)
    x = LazyWord(params).prefix(bound)
    if periodic:
        tiled = np.resize(np.asarray(period, dtype=x.dtype), bound)
        return bool(np.array_equal(x, tiled)), f"period {rename(period)}"
    m = params.m
    ok = bound <= m or bool((x[m:] != x[:-m]).any())
    return ok, "aperiodic"


def _suite_overlap(params: TMParams, bound: int) -> tuple[bool | None, str]:
    hit = find_overlap(LazyWord(params), bound)
    expected_free = params.b <= params.m
    detail = "no overlap" if hit is None else f"overlap at {hit[0]}"
    return (hit is None) == expected_free, detail


def _suite_critical(params: TMParams, bound: int) -> tuple[bool | None, str]:
    horizon = max(bound, occ.suggested_horizon(params))
    report = max_exponent_in_prefix(LazyWord(params), horizon)
    closed = format_exponent(report.closed_form)
    if params.periodic:
        return report.truncated, f"closed {closed}, scan truncated at {format_exponent(report.empirical_max)}"
    return report.agrees, f"closed {closed}, scan {format_exponent(report.empirical_max)} at {report.witness_position}"


def _suite_occurrences(params: TMParams, bound: int) -> tuple[bool | None, str]:
    if params.periodic:
        return None, "periodic: no critical powers"
    checked = 0
    for n in occ.admissible_lengths(params):
        for scale in (0, 1):
            enumerated = list(occ.critical_occurrences(params, n, scale, bound).positions)
            if enumerated != _brute_occurrences(params, n, scale, bound):
                return False, f"mismatch at N={n}, i={scale}"
            checked += len(enumerated)
    return True, f"{checked} positions"


def _suite_corollary(params: TMParams, bound: int) -> tuple[bool | None, str]:
    if not params.square_case:
        return None, "not the square case"
    b, m = params.b, params.m
    word = LazyWord(params)
    for n in range(1, b):
        nonempty = bool(occ.set_B(params, n, bound).positions)
        scanned = bool(occ.scan_power_occurrences(word, n, 2, bound))
        if not (nonempty == occ.critical_length_exists(params, n) == scanned):
            return False, f"N={n}"
    if (b, m) == (2, 2):
        c = occ.set_C(bound).positions
        if not c or c[0] != 11 or list(c) != occ.scan_power_occurrences(word, 3, 2, bound):
            return False, "C"
    return True, f"gcd(b-1,m)={np.gcd(b - 1, m)}"


SUITES: dict[str, Callable[[TMParams, int], tuple[bool | None, str]]] = {
    "construction": _suite_construction,
    "periodicity": _suite_periodicity,
    "overlap": _suite_overlap,
    "critical": _suite_critical,
    "occurrences": _suite_occurrences,
    "corollary": _suite_corollary,
}


def digit_sum_samples(samples: int, seed: int) -> tuple[int, int]:
    """Run the digit-sum identity on random valid tuples; returns (checked, failures)."""
    rng = random.Random(seed)
    failures = 0
    for _ in range(samples):
        b = rng.randint(2, 16)
        k = rng.randint(1, 10**6)
        if k % b == 0:
            k += 1
        q = rng.randint(1, 30)
        n = rng.randint(1, b - 1)
        failures += not occ.digit_sum_identity_check(b, k, q, n)
    return samples, failures


def run_suite(name: str, params: TMParams, bound: int) -> dict[str, Any]:
    t0 = time.perf_counter()
    ok, detail = SUITES[name](params, bound)
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    return {"suite": name, "b": params.b, "m": params.m, "status": status, "detail": detail,
            "seconds": round(time.perf_counter() - t0, 3)}


@cli.command()
@click.option("--suite", "suites", multiple=True,
              type=click.Choice(["all", "digit-sum", *SUITES]), default=("all",), show_default=True)
@click.option("--grid", default="b=2..6,m=1..6", show_default=True, help="Parameter grid, e.g. b=2..6,m=1..6.")
@click.option("-b", "b", type=click.IntRange(min=2), help="Restrict to one base.")
@click.option("-m", "m", type=click.IntRange(min=1), help="Restrict to one alphabet size.")
@click.option("--bound", type=click.IntRange(min=3), default=20_000, show_default=True, help="Prefix length / position bound.")
@click.option("--samples", type=click.IntRange(min=1), default=10_000, show_default=True, help="Digit-sum samples.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True, help="Grid cells run concurrently.")
@_output_opts
def verify(suites: tuple[str, ...], grid: str, b: int | None, m: int | None, bound: int, samples: int, seed: int,
           jobs: int, as_json: bool, out: str | None) -> None:
    """Run the invariant suites across a (b, m) grid and print a pass/fail table."""
    try:
        cells = parse_grid(grid)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    if b is not None or m is not None:
        bs = [b] if b is not None else sorted({c[0] for c in cells})
        ms = [m] if m is not None else sorted({c[1] for c in cells})
        cells = [(x, y) for x in bs for y in ms]
    chosen = list(SUITES) + ["digit-sum"] if "all" in suites else list(dict.fromkeys(suites))
    rows: list[dict[str, Any]] = []
    if "digit-sum" in chosen:
        checked, failures = digit_sum_samples(samples, seed)
        rows.append({"suite": "digit-sum", "b": None, "m": None, "status": "PASS" if failures == 0 else "FAIL",
                     "detail": f"{checked} samples, {failures} failures", "seconds": None})
    jobs_list = [(name, TMParams(x, y)) for name in chosen if name != "digit-sum" for (x, y) in cells]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        rows.extend(pool.map(lambda job: run_suite(job[0], job[1], bound), jobs_list))
    failed = any(r["status"] == "FAIL" for r in rows)
    if as_json:
        record = {"command": "verify", "params": {"grid": grid, "b": b, "m": m}, "payload": {"results": rows,
                  "status": "FAIL" if failed else "PASS"}, "provenance": {"bound": bound, "samples": samples, "seed": seed}}
        _emit(dump_json(record), out)
    else:
        lines = [f"{'suite':<13}{'b':>3}{'m':>3}  {'status':<8}detail"]
        for r in rows:
            bb = "" if r["b"] is None else r["b"]
            mm = "" if r["m"] is None else r["m"]
            lines.append(f"{r['suite']:<13}{bb!s:>3}{mm!s:>3}  {r['status']:<8}{r['detail']}")
        lines.append("FAIL" if failed else "PASS")
        _emit("\n".join(lines), out)
    if failed:
        sys.exit(EXIT_FAIL)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
