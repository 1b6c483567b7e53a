"""Command-line interface: ``confeig {scan,solve,perturb,disk-reference,audit}``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .audit import DEFAULT_RTOL, audit_spectra
from .bessel import disk_eigenvalues
from .conformal import ConformalMap, DomainFileError, PerturbSpec, load_domain
from .freqexp import assemble_dtensor
from .grunsky import InsufficientOrderError, grunsky_table
from .perturb import disk_radial_criticality_check, first_order_shift_fd
from .spectral import BC, MIN_OMEGA, MIN_PROMINENCE, EigenResult, RefineError, refine, scan

__all__ = ["main", "parse_domain", "read_results", "results_payload"]

EXIT_OK = 0
EXIT_AUDIT_FAIL = 1
EXIT_PARTIAL = 2
EXIT_INVALID = 3

log = logging.getLogger("confeig")


class InvalidInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 means partial convergence here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_domain(text: str) -> ConformalMap:
    """A domain file path, or one of ``disk[:R]``, ``ellipse:A``, ``hourglass[:DELTA]``."""
    path = Path(text)
    if path.exists():
        return load_domain(path)
    name, _, arg = text.partition(":")
    try:
        if name == "disk":
            return ConformalMap.disk(float(arg) if arg else 1.0)
        if name == "ellipse" and arg:
            return ConformalMap.ellipse(float(arg))
        if name == "hourglass":
            return ConformalMap.hourglass(float(arg) if arg else 1.0)
    except ValueError as exc:
        raise DomainFileError(f"bad domain parameter in {text!r}: {exc}") from exc
    raise DomainFileError(f"no such domain file or built-in domain: {text!r}")


def _window(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise InvalidInput(f"window must look like w1:w2, got {text!r}") from None
    if not (MIN_OMEGA <= a < b):
        raise InvalidInput(f"window needs {MIN_OMEGA} <= w1 < w2, got {text!r}")
    return a, b


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidInput(f"expected a comma-separated integer list, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise InvalidInput("list entries must be positive integers")
    return vals


def _write_json(payload, path):
    text = json.dumps(payload, indent=2) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def results_payload(bc: BC, N: int, K: int, results, cmap: ConformalMap | None = None, failures=()):
    payload = {
        "bc": bc.value,
        "N": N,
        "K": K,
        "eigenvalues": [r.to_dict() for r in results],
    }
    if cmap is not None:
        payload["domain"] = cmap.to_dict()
        payload["area"] = cmap.area()
    if failures:
        payload["failures"] = list(failures)
    return payload


def read_results(path) -> tuple[dict, list[EigenResult]]:
    """Re-read a ``solve`` JSON file into :class:`EigenResult` objects."""
    data = json.loads(Path(path).read_text())
    bc = BC.parse(data["bc"])
    out = []
    for e in data["eigenvalues"]:
        out.append(
            EigenResult(
                bc=bc,
                omega=float(e["omega"]),
                cond=float(e["cond"]),
                K=int(data["K"]),
                N=int(data["N"]),
                iterations=int(e["iterations"]),
                multiplicity_flag=bool(e["multiplicity_flag"]),
                converged=bool(e.get("converged", True)),
                weak=bool(e.get("weak", False)),
            )
        )
    return data, out


def _setup(args):
    cmap = parse_domain(args.domain)
    if args.basis < 1:
        raise InvalidInput("--basis must be at least 1")
    K = args.basis if args.order is None else args.order
    if K < 0:
        raise InvalidInput("--order must be nonnegative")
    if getattr(args, "grunsky_csv", None):
        grunsky_table(cmap, max(args.basis, 1)).to_csv(args.grunsky_csv)
    cache = False if args.no_cache else (args.cache_dir or True)
    tensor = assemble_dtensor(cmap, K, args.basis, threads=args.threads, cache=cache)
    return cmap, BC.parse(args.bc), tensor


def _solve_core(args):
    cmap, bc, tensor = _setup(args)
    w1, w2 = _window(args.window)
    sc = scan(tensor, bc, w1, w2, args.steps, threads=args.threads, min_prominence=args.min_prominence)
    if args.curve:
        sc.to_csv(args.curve)
    results, failures = [], []
    for br in sc.brackets:
        try:
            res = refine(
                tensor, bc, br, xtol=args.xtol, cond_min=args.cond_min, maxiter=args.maxiter
            )
            results.append(res)
            if res.weak:
                log.warning("weak characteristic value at omega=%.8f (cond %.2e)", res.omega, res.cond)
        except RefineError as exc:
            log.warning("refine failed in [%g, %g]: %s", br[0], br[1], exc)
            failures.append({"bracket": list(br), "best": exc.best.to_dict(), "reason": str(exc)})
    return cmap, bc, tensor, sc, results, failures


def cmd_scan(args) -> int:
    cmap, bc, tensor = _setup(args)
    w1, w2 = _window(args.window)
    sc = scan(tensor, bc, w1, w2, args.steps, threads=args.threads, min_prominence=args.min_prominence)
    if args.curve:
        sc.to_csv(args.curve)
    payload = {"bc": bc.value, "N": tensor.N, "K": tensor.K, "brackets": [list(b) for b in sc.brackets]}
    _write_json(payload, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    cmap, bc, tensor, sc, results, failures = _solve_core(args)
    _write_json(results_payload(bc, tensor.N, tensor.K, results, cmap, failures), args.out)
    for r in results:
        flag = " (multiple)" if r.multiplicity_flag else ""
        weak = " (weak)" if r.weak else ""
        print(f"omega={r.omega:.10f} lambda={r.lam:.10f} cond={r.cond:.2e}{flag}{weak}", file=sys.stderr)
    ok = not failures and all(r.converged and not r.weak for r in results)
    return EXIT_OK if ok else EXIT_PARTIAL


def cmd_perturb(args) -> int:
    js = _int_list(args.j)
    if args.disk_check:
        report = disk_radial_criticality_check(
            args.bc, args.modes, js, args.eps, N=args.basis, K=args.order, threads=args.threads
        )
        _write_json({"report": report}, args.out)
        return EXIT_OK if all(r["status"] != "fail" for r in report) else EXIT_PARTIAL
    if args.window is None:
        raise InvalidInput("--window is required unless --disk-check is given")
    cmap, bc, tensor, sc, results, failures = _solve_core(args)
    report = []
    for mode, res in enumerate(results, start=1):
        if res.multiplicity_flag or res.weak:
            report.append({"bc": bc.value, "mode": mode, "omega": res.omega, "skipped": "not a simple, well-resolved eigenvalue"})
            continue
        for j in js:
            try:
                full = first_order_shift_fd(cmap, bc, res, PerturbSpec(j, args.eps))
                half = first_order_shift_fd(cmap, bc, res, PerturbSpec(j, args.eps / 2))
            except RefineError as exc:
                failures.append({"mode": mode, "j": j, "reason": str(exc)})
                continue
            ratio = full.fd_value / half.fd_value if half.fd_value != 0 else math.inf
            report.append(
                {
                    "bc": bc.value,
                    "mode": mode,
                    "omega": res.omega,
                    "j": j,
                    "eps": args.eps,
                    "first_order": full.central,
                    "fd_eps": full.fd_value,
                    "fd_eps_half": half.fd_value,
                    "ratio": ratio,
                }
            )
    _write_json({"report": report, "failures": failures}, args.out)
    return EXIT_OK if not failures else EXIT_PARTIAL


def cmd_disk_reference(args) -> int:
    if args.count < 1:
        raise InvalidInput("--count must be at least 1")
    refs = disk_eigenvalues(args.bc, args.count)
    payload = {
        "bc": args.bc,
        "eigenvalues": [
            {"n": e.n, "k": e.k, "omega": e.omega, "lambda": e.lam, "multiplicity": e.multiplicity}
            for e in refs
        ],
    }
    _write_json(payload, args.out)
    return EXIT_OK


def _spectrum(path, expect: BC):
    data, results = read_results(path)
    if BC.parse(data["bc"]) is not expect:
        raise InvalidInput(f"{path} holds {data['bc']} results, expected {expect.value}")
    return data, [(r.lam, 2 if r.multiplicity_flag else 1) for r in results]


def cmd_audit(args) -> int:
    if not args.neumann and not args.dirichlet:
        raise InvalidInput("audit needs --neumann and/or --dirichlet result files")
    area = None
    spectra = {}
    for name, path, bc in (("neumann", args.neumann, BC.NEUMANN), ("dirichlet", args.dirichlet, BC.DIRICHLET)):
        if path:
            data, spec = _spectrum(path, bc)
            spectra[name] = spec
            area = area or data.get("area")
    if args.domain:
        area = parse_domain(args.domain).area()
    if area is None:
        raise InvalidInput("domain area unknown: pass --domain or use result files that record it")
    if args.rtol < 0:
        raise InvalidInput("--rtol must be nonnegative")
    lines = audit_spectra(area, spectra.get("dirichlet"), spectra.get("neumann"), rtol=args.rtol)
    for line in lines:
        print(line.format())
    if args.out:
        _write_json(
            {"area": area, "checks": [{"check": l.check, "k": l.k, "lhs": l.lhs, "rhs": l.rhs, "pass": l.passed} for l in lines]},
            args.out,
        )
    return EXIT_OK if all(l.passed for l in lines) else EXIT_AUDIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="confeig", description="Laplace eigenvalues of domains given by exterior conformal maps.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, need_window=True):
        sp.add_argument("--domain", required=True, help="domain file (JSON/TOML) or disk[:R], ellipse:A, hourglass[:DELTA]")
        sp.add_argument("--bc", choices=["neumann", "dirichlet"], required=True)
        sp.add_argument("--basis", type=int, default=20, metavar="N", help="basis half-width N (default 20)")
        sp.add_argument("--order", type=int, default=None, metavar="K", help="frequency order K (default N)")
        sp.add_argument("--window", required=need_window, default=None, metavar="W1:W2")
        sp.add_argument("--steps", type=int, default=400)
        sp.add_argument("--min-prominence", type=float, default=MIN_PROMINENCE)
        sp.add_argument("--out", default=None, help="JSON output (default stdout)")
        sp.add_argument("--curve", default=None, help="CSV of the scanned -log cond curve")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--no-cache", action="store_true", help="do not read or write the DTensor cache")
        sp.add_argument("--cache-dir", default=None)
        sp.add_argument("--grunsky-csv", default=None, help="dump the Grunsky table (order N) as CSV")
        sp.add_argument("--xtol", type=float, default=1e-12)
        sp.add_argument("--cond-min", type=float, default=1e5)
        sp.add_argument("--maxiter", type=int, default=200)

    sp = sub.add_parser("scan", help="evaluate -log cond on a grid and list brackets")
    common(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("solve", help="scan then refine every bracket")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("perturb", help="first-order eigenvalue shifts under Psi + eps w^-j")
    sp.add_argument("--disk-check", action="store_true", help="run the unit-disk radial criticality test")
    sp.add_argument("--modes", type=int, default=1, help="number of radial modes for --disk-check")
    sp.add_argument("--j", default="1,2,3", help="comma-separated perturbation modes")
    sp.add_argument("--eps", type=float, default=0.01)
    common(sp, need_window=False)
    sp.set_defaults(func=cmd_perturb)
    # the disk check fixes its own domain
    for a in sp._actions:
        if a.dest == "domain":
            a.required = False
            a.default = "disk"

    sp = sub.add_parser("disk-reference", help="unit-disk eigenvalues from Bessel zeros")
    sp.add_argument("--bc", choices=["neumann", "dirichlet"], required=True)
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_disk_reference)

    sp = sub.add_parser("audit", help="check classical inequalities on solve outputs")
    sp.add_argument("--domain", default=None)
    sp.add_argument("--neumann", default=None, help="solve JSON with Neumann results")
    sp.add_argument("--dirichlet", default=None, help="solve JSON with Dirichlet results")
    sp.add_argument("--rtol", type=float, default=DEFAULT_RTOL, help="relative slack in every comparison")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_audit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (InvalidInput, DomainFileError, InsufficientOrderError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"confeig: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
