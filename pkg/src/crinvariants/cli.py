"""Command-line runner for the verification suites.

    crinvariants verify --suite reinhardt --n 2 --sigma 0,1
    crinvariants totals --n 2 --sigma 0,1 --r 1
    crinvariants numeric --n 2 --fd-step 1e-2

Exit status: 0 when every case passes, 1 on a verification failure, 2 on a
usage or internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
import traceback
from dataclasses import dataclass, field

from . import __version__

SUITES = ("theta-powers", "kronecker", "perturbation-symbolic", "perturbation-numeric", "reinhardt", "totals")
SYMBOLIC_OK = ("theta-powers", "perturbation-symbolic")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class SuiteConfig:
    suite: str
    n: int | str | None = None
    sigma: tuple | None = None
    kmax: int = 6
    r: str = "1"
    fd_step: float = 1e-2
    resolution: int = 24
    seed: int = 0
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        d = {"suite": self.suite, "n": self.n, "sigma": list(self.sigma) if self.sigma else None,
             "kmax": self.kmax, "r": self.r, "fd_step": self.fd_step, "resolution": self.resolution,
             "seed": self.seed}
        d.update(self.extra)
        return d


def parse_sigma(text: str) -> tuple:
    try:
        sigma = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--sigma must be comma-separated integers, got {text!r}") from None
    if not sigma or any(s < 0 for s in sigma) or not any(sigma):
        raise UsageError(f"--sigma must be nonnegative and not all zero, got {text!r}")
    return sigma


def sigma_degree(sigma) -> int:
    return sum(k * s for k, s in enumerate(sigma, start=1))


def resolve(cfg: SuiteConfig) -> SuiteConfig:
    """Validate the (n, sigma) pair and fill in defaults."""
    if cfg.suite not in SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    if cfg.kmax < 1:
        raise UsageError("--kmax must be at least 1")
    if cfg.resolution < 2:
        raise UsageError("--resolution must be at least 2")
    if cfg.fd_step <= 0:
        raise UsageError("--fd-step must be positive")
    n = cfg.n
    if n == "symbolic":
        if cfg.suite not in SYMBOLIC_OK:
            raise UsageError(f"suite {cfg.suite} needs a concrete n")
        if cfg.sigma is not None:
            raise UsageError("--sigma needs a concrete n")
        return cfg
    if n is not None:
        try:
            n = int(n)
        except ValueError:
            raise UsageError(f"--n must be an integer or 'symbolic', got {cfg.n!r}") from None
        if n < 2:
            raise UsageError("--n must be at least 2")
    if cfg.sigma is not None:
        deg = sigma_degree(cfg.sigma)
        if n is None:
            n = deg
        elif deg != n:
            raise UsageError(f"sigma {','.join(map(str, cfg.sigma))} has degree {deg}, not n = {n}")
        # pad or drop trailing zeros so that len(sigma) == n
        cfg.sigma = (tuple(cfg.sigma) + (0,) * n)[:n]
    if n is None:
        n = "symbolic" if cfg.suite in SYMBOLIC_OK else 2
    cfg.n = n
    if cfg.suite == "totals" and cfg.sigma is None:
        raise UsageError("totals needs --sigma")
    return cfg


def _default_sigma(n: int) -> tuple:
    return (0,) * (n - 1) + (1,)


def run(cfg: SuiteConfig):
    """Execute a resolved config and return (report, extra payload)."""
    from .crcalc.report import SuiteReport

    extra = {}
    s, n = cfg.suite, cfg.n
    if s == "theta-powers":
        from .crcalc.theta import verify_theta_powers
        rep = verify_theta_powers(n, smax=cfg.kmax // 2, seed=cfg.seed)
    elif s == "kronecker":
        from .crcalc.kronecker import kronecker_case, kronecker_vanishing_check
        if cfg.sigma is None:
            rep = kronecker_vanishing_check(n, seed0=cfg.seed)
        else:
            rep = SuiteReport("kronecker")
            for t in range(20):
                rep.add(kronecker_case(n, cfg.sigma, cfg.seed + t))
    elif s == "perturbation-symbolic":
        from .crcalc.perturbation import run_symbolic_suite
        from .crcalc.variation import x_phi_nth_derivative
        rep = run_symbolic_suite(cfg.kmax)
        if n != "symbolic":
            rep.extend(x_phi_nth_derivative(n, cfg.sigma or _default_sigma(n)).cases)
    elif s == "perturbation-numeric":
        from .crcalc.numeric_suite import run_numeric_suite
        rep = run_numeric_suite(n, cfg.sigma or _default_sigma(n), cfg.seed, cfg.fd_step, cfg.resolution)
    elif s == "reinhardt":
        from .crcalc.reinhardt import run_reinhardt_suite
        rep = run_reinhardt_suite((n,), cfg.sigma)
    else:  # totals
        from .crcalc.reinhardt import totals_cases
        cases, T = totals_cases(n, cfg.sigma, cfg.r, cfg.resolution)
        rep = SuiteReport("totals")
        rep.extend(T["local_cases"])
        rep.extend(cases)
        extra = {k: v for k, v in T.items() if k != "local_cases"}
    return rep.sort(), extra


def report_dict(cfg: SuiteConfig, rep, extra: dict | None = None) -> dict:
    d = {
        "suite": rep.suite,
        "version": __version__,
        "config": cfg.echo(),
        "cases": [c.to_dict() for c in rep.cases],
        "summary": rep.summary(),
    }
    if rep.notes:
        d["notes"] = list(rep.notes)
    if extra:
        d["result"] = extra
    return d


def _table(rep) -> str:
    w = max((len(c.case_id) for c in rep.cases), default=8)
    lines = [f"{'case':<{w}}  status   residual     time"]
    for c in rep.cases:
        lines.append(f"{c.case_id:<{w}}  {c.status:<7}  {str(c.residual)[:11]:<11}  {c.wall_time:6.3f}s")
    summ = rep.summary()
    lines.append(f"{rep.suite}: {summ['pass']} passed, {summ['fail']} failed, {summ['skipped']} skipped")
    return "\n".join(lines)


def _print_totals(T: dict) -> None:
    print(f"\nI' = {T['i_prime']}")
    print(f"volume = {T['volume_exact']} = {T['volume']:.10g} (quadrature {T['volume_quadrature']:.10g})")
    print(f"total  = {T['total_exact']} = {T['total']:.10g}")
    for lab, v in T["variants"].items():
        mark = "  <- matches" if lab == T["matches_variant"] else ""
        print(f"  closed form with {lab}: {v['exact']} = {v['value']:.10g}{mark}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crinvariants", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, suite=True):
        if suite:
            sp.add_argument("--suite", required=True, choices=SUITES)
        sp.add_argument("--n", help="dimension n, or 'symbolic'")
        sp.add_argument("--sigma", type=str, help="exponent vector, e.g. 0,1")
        sp.add_argument("--kmax", type=int, default=6)
        sp.add_argument("--r", type=str, default="1")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--fd-step", type=float, default=1e-2)
        sp.add_argument("--resolution", type=int, default=24)
        sp.add_argument("--out", help="write the JSON report here")

    common(sub.add_parser("verify", help="run one verification suite"))
    common(sub.add_parser("totals", help="Reinhardt total invariant and closed-form comparison"), suite=False)
    common(sub.add_parser("numeric", help="floating-point Chern tensor and finite-difference checks"), suite=False)
    return p


def config_from_args(args) -> SuiteConfig:
    suite = {"verify": getattr(args, "suite", None), "totals": "totals",
             "numeric": "perturbation-numeric"}[args.command]
    return SuiteConfig(suite=suite, n=args.n, sigma=parse_sigma(args.sigma) if args.sigma else None,
                       kmax=args.kmax, r=args.r, fd_step=args.fd_step, resolution=args.resolution,
                       seed=args.seed, out=args.out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(config_from_args(args))
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rep, extra = run(cfg)
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_USAGE
    print(_table(rep))
    for note in rep.notes:
        print(f"note: {note}")
    if cfg.suite == "totals":
        _print_totals(extra)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            json.dump(report_dict(cfg, rep, extra), fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    return EXIT_PASS if rep.all_passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
