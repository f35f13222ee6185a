"""Command-line front end: JSON/CSV in, JSON/CSV out.

    daft <check|extend|toeplitz|onestep|realize|spectral|displace>
         --in FILE [--out FILE] [--order K] [--nodes Q] [--tol T] [--oracle]

Every command is deterministic given its arguments: identical inputs produce
byte-identical outputs (fixed field order, floats rendered with %.17g).  The
exit code is 0 exactly when all residual checks pass the configured
tolerance.  ``DAFT_TOL`` overrides the default tolerance; ``--tol`` wins
over both.  Each numeric result row carries a short ``tag`` naming the
formula that produced it, and ``--oracle`` re-derives measure/factor results
through an independent route (circle quadrature or the lattice recurrence)
and reports the discrepancy.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import io
from .core import (
    DaftError, ParseError, Tolerances, as_matrix, herm, max_abs, psd_check,
)
from .displacement import displacement_decompose, theta, theta_kernel_check
from .lattice import DafGrid, cr_residual, extend_from_boundary
from .moments import (
    MomentSequence, daf_from_toeplitz, grid_from_measure, one_step_fill,
    toeplitz_from_daf,
)
from .realization import (
    KypCertificate, cayley_schur, controllability_rank,
    f_row_from_characteristic_realization, f_row_from_generating_realization,
    f_row_lossless, fourier_coeffs_realization, is_minimal, kyp_verify,
    lossless_check, observability_rank, riesz_projection,
)
from .spectral import (
    cara_from_factor, density_realization, f_from_density_quadrature,
    f_row_from_factor, factor_density, fourier_coeffs_factor,
    grid_from_factor, kyp_certificate_for_factor, phi_realization_from_factor,
    stein_solve,
)

__all__ = ["main", "JobConfig"]


@dataclass(frozen=True)
class JobConfig:
    """Validated run configuration; one value per CLI knob."""

    command: str
    action: str | None
    in_path: str
    out_path: str | None
    order: int
    nodes: int
    tol: Tolerances
    oracle: bool
    csv: bool
    at: tuple
    sweep: str | None
    direction: str
    cert_path: str | None


def _parse_args(argv) -> JobConfig:
    top = argparse.ArgumentParser(
        prog="daft",
        description="discrete analytic function toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    def add(name: str, with_action: tuple = ()) -> argparse.ArgumentParser:
        sp = sub.add_parser(name)
        if with_action:
            sp.add_argument("action", choices=with_action)
        sp.add_argument("--in", dest="in_path", required=True, metavar="FILE")
        sp.add_argument("--out", dest="out_path", metavar="FILE")
        sp.add_argument("--order", type=int, default=8, metavar="K")
        sp.add_argument("--nodes", type=int, default=256, metavar="Q")
        sp.add_argument("--tol", type=float, metavar="T")
        sp.add_argument("--oracle", action="store_true")
        sp.add_argument("--csv", action="store_true")
        sp.add_argument("--at", action="append", default=[], metavar="RE,IM")
        return sp

    add("check")
    add("extend")
    tp = add("toeplitz")
    tp.add_argument("--direction", choices=["auto", "to-toeplitz", "to-structured"],
                    default="auto")
    os_ = add("onestep")
    os_.add_argument("--sweep", metavar="RE,IM,RMAX,STEPS", required=True)
    rz = add("realize", ("eval", "minimal", "lossless-check", "cayley",
                         "kyp-verify", "riesz", "fourier",
                         "row-characteristic", "row-generating",
                         "row-lossless"))
    rz.add_argument("--cert", dest="cert_path", metavar="FILE")
    add("spectral", ("stein", "density-realization", "fourier", "cara-eval",
                     "row", "grid", "kyp-cert"))
    add("displace", ("decompose", "theta-check"))

    ns = top.parse_args(argv)
    eq = ns.tol if ns.tol is not None else float(os.environ.get("DAFT_TOL", "1e-10"))
    at = []
    for spec_pt in ns.at:
        parts = spec_pt.split(",")
        if len(parts) != 2:
            raise ParseError(f"--at expects RE,IM, got {spec_pt!r}")
        at.append(complex(float(parts[0]), float(parts[1])))
    return JobConfig(
        command=ns.command,
        action=getattr(ns, "action", None),
        in_path=ns.in_path,
        out_path=ns.out_path,
        order=ns.order,
        nodes=ns.nodes,
        tol=Tolerances(eq_tol=eq),
        oracle=ns.oracle,
        csv=ns.csv,
        at=tuple(at),
        sweep=getattr(ns, "sweep", None),
        direction=getattr(ns, "direction", "auto"),
        cert_path=getattr(ns, "cert_path", None),
    )


def _scale(x) -> float:
    return max(max_abs(x), 1.0)


def _sample_pairs(count: int, radius: float = 0.35) -> list:
    """Deterministic point pairs inside the evaluation disk."""
    rng = np.random.default_rng(1234)
    pts = rng.uniform(-radius, radius, size=(count, 4))
    return [(complex(a, b), complex(c, d)) for a, b, c, d in pts]


# ---------------------------------------------------------------------------
# commands

def _cmd_check(cfg: JobConfig):
    grid = io.grid_from_json(io.load_json(cfg.in_path))
    res = cr_residual(grid) if min(grid.M, grid.N) >= 1 else 0.0
    scale = _scale(grid.values)
    report = {"command": "check", "cr_residual": res}
    hermitian = None
    sections = []
    if grid.M == grid.N and grid.p == grid.q:
        F = grid.section()
        hermitian = bool(max_abs(F - herm(F)) <= cfg.tol.eq_tol * scale)
        report["symmetric"] = hermitian
        if hermitian:
            for k in range(grid.M + 1):
                Fk = DafGrid(grid.values[:k + 1, :k + 1]).section()
                inertia = psd_check((Fk + herm(Fk)) / 2.0, cfg.tol)
                sections.append({"N": k, "tag": "leading-section-inertia",
                                 "negative": inertia.negative,
                                 "zero": inertia.zero,
                                 "positive": inertia.positive,
                                 "psd": inertia.is_psd})
    report["sections"] = sections
    ok = res <= cfg.tol.eq_tol * scale
    report["pass"] = bool(ok)
    return report, ok, None


def _cmd_extend(cfg: JobConfig):
    data = io.load_json(cfg.in_path)
    kind = io.detect_source(data, ("boundary", "measure", "factor"))
    M = N = cfg.order
    oracle_residual = None
    if kind == "boundary":
        row, col = io.boundary_from_json(data)
        grid = extend_from_boundary(row, col, cfg.tol)
        tag = "cr-extension"
    elif kind == "measure":
        mu = io.measure_from_json(data)
        grid = grid_from_measure(mu, M, N)
        tag = "atom-powers"
        if cfg.oracle:
            redo = extend_from_boundary(list(grid.row0()), list(grid.col0()),
                                        cfg.tol)
            oracle_residual = max_abs(grid.values - redo.values)
    else:
        w = io.factor_from_json(data)
        grid = grid_from_factor(w, M, N, cfg.tol)
        tag = "dilation-binomial"
        if cfg.oracle:
            dens = factor_density(w, cfg.tol)
            worst = 0.0
            for m in range(M + 1):
                for n in range(N + 1):
                    ref = f_from_density_quadrature(dens, m, n, cfg.nodes)
                    worst = max(worst, max_abs(grid.values[m, n] - ref))
            oracle_residual = worst
    res = cr_residual(grid) if min(grid.M, grid.N) >= 1 else 0.0
    report = {"command": "extend", "route": kind, "tag": tag,
              "cr_residual": res}
    if oracle_residual is not None:
        report["oracle_residual"] = oracle_residual
    ok = res <= cfg.tol.eq_tol * _scale(grid.values)
    if oracle_residual is not None:
        ok = ok and oracle_residual <= max(1e-7 * _scale(grid.values),
                                           cfg.tol.eq_tol)
    report["pass"] = bool(ok)
    artifact = ("csv", io.matrix_csv(grid.section())) if cfg.csv \
        else ("json", io.grid_to_json(grid))
    return report, ok, artifact


def _inertia_row(tag: str, M) -> dict:
    i = psd_check((as_matrix(M) + herm(as_matrix(M))) / 2.0)
    return {"tag": tag, "negative": i.negative, "zero": i.zero,
            "positive": i.positive, "psd": i.is_psd}


def _cmd_toeplitz(cfg: JobConfig):
    data = io.load_json(cfg.in_path)
    kind = io.detect_source(data, ("grid", "moments"))
    direction = cfg.direction
    if direction == "auto":
        direction = "to-toeplitz" if kind == "grid" else "to-structured"
    if kind == "grid":
        grid = io.grid_from_json(data)
        if cfg.order > min(grid.M, grid.N):
            raise ParseError(f"grid holds only N = {min(grid.M, grid.N)}")
        sub = DafGrid(grid.values[:cfg.order + 1, :cfg.order + 1])
        F = sub.section()
        p = grid.p
    else:
        blocks = io.moments_from_json(data)
        seq = MomentSequence(blocks)
        if cfg.order > seq.order:
            raise ParseError(f"moment list holds only K = {seq.order}")
        F = daf_from_toeplitz(seq.toeplitz(cfg.order), seq.p, cfg.tol)
        p = seq.p
    if direction == "to-toeplitz":
        out = toeplitz_from_daf(F, p, cfg.tol)
        tag = "toeplitz-congruence"
        other = F
    else:
        out = daf_from_toeplitz(F, p, cfg.tol) if kind == "grid" else F
        tag = "congruence-inverse"
        other = toeplitz_from_daf(out, p, cfg.tol)
    rows = [_inertia_row("structured-section", other if direction == "to-toeplitz" else out),
            _inertia_row("toeplitz-side", out if direction == "to-toeplitz" else other)]
    ok = rows[0]["negative"] == rows[1]["negative"] \
        and rows[0]["positive"] == rows[1]["positive"]
    report = {"command": "toeplitz", "direction": direction, "tag": tag,
              "inertia": rows, "pass": bool(ok)}
    artifact = ("csv", io.matrix_csv(out)) if cfg.csv \
        else ("json", {"matrix": io.matrix_to_json(out)})
    return report, ok, artifact


def _cmd_onestep(cfg: JobConfig):
    grid = io.grid_from_json(io.load_json(cfg.in_path))
    if grid.p != grid.q or grid.M != grid.N:
        raise ParseError("one-step extension needs a square structured grid")
    F = grid.section()
    if not psd_check((F + herm(F)) / 2.0, cfg.tol).is_psd:
        raise DaftError("input section must be PSD")
    parts = (cfg.sweep or "").split(",")
    if len(parts) != 4:
        raise ParseError("--sweep expects RE,IM,RMAX,STEPS")
    d = complex(float(parts[0]), float(parts[1]))
    rmax, steps = float(parts[2]), int(parts[3])
    if d == 0 or rmax <= 0 or steps < 2:
        raise ParseError("sweep direction must be nonzero, rmax > 0, steps >= 2")
    d /= abs(d)

    def admissible(r: float) -> bool:
        lam = r * d * np.eye(grid.p)
        _, inertia = one_step_fill(F, lam, grid.p, cfg.tol)
        return inertia.is_psd

    radii = [rmax * k / (steps - 1) for k in range(steps)]
    flags = [admissible(r) for r in radii]
    lines = ["lambda_re,lambda_im,psd"]
    for r, flag in zip(radii, flags):
        lam = r * d
        lines.append(f"{io.format_float(lam.real)},{io.format_float(lam.imag)},"
                     f"{1 if flag else 0}")
    brackets = []
    for k in range(len(radii) - 1):
        if flags[k] != flags[k + 1]:
            lo, hi = radii[k], radii[k + 1]
            for _ in range(48):
                mid = (lo + hi) / 2.0
                if admissible(mid) == flags[k]:
                    lo = mid
                else:
                    hi = mid
            brackets.append({"tag": "one-step-cr", "radius_low": lo,
                             "radius_high": hi})
    report = {"command": "onestep", "direction": [d.real, d.imag],
              "admissible_count": sum(flags), "boundary": brackets,
              "pass": True}
    return report, True, ("csv", "\r\n".join(lines) + "\r\n")


def _realize_points(cfg: JobConfig) -> list:
    return list(cfg.at) if cfg.at else [complex(z) for z in
                                        (0.1, 0.2j, -0.15 + 0.1j)]


def _cmd_realize(cfg: JobConfig):
    data = io.load_json(cfg.in_path)
    S = io.realization_from_json(data)
    H = io.metric_from_json(data)
    rows = []
    ok = True
    if cfg.action == "eval":
        for z in _realize_points(cfg):
            rows.append({"tag": "resolvent-eval", "at": io.complex_to_pair(z),
                         "value": io.matrix_to_json(S.eval(z, cfg.tol))})
    elif cfg.action == "minimal":
        obs = observability_rank(S.C, S.A, cfg.tol)
        ctr = controllability_rank(S.A, S.B, cfg.tol)
        rows.append({"tag": "kalman-ranks", "observability": obs,
                     "controllability": ctr,
                     "minimal": bool(is_minimal(S, cfg.tol))})
    elif cfg.action == "lossless-check":
        if H is None:
            raise ParseError("lossless-check needs an H field in the input")
        cert = lossless_check(S, H, cfg.tol)
        rows.append({"tag": "lossless-structure",
                     "residuals": [float(r) for r in cert.residuals]})
        ok = cert.max_residual <= cfg.tol.eq_tol * _scale(S.A)
    elif cfg.action == "cayley":
        if H is None:
            raise ParseError("cayley needs an H field in the input")
        T = cayley_schur(S, H, cfg.tol)
        rows.append({"tag": "cayley-transform",
                     "realization": io.realization_to_json(T)})
    elif cfg.action == "kyp-verify":
        if not cfg.cert_path:
            raise ParseError("kyp-verify needs --cert FILE")
        cd = io.load_json(cfg.cert_path)
        io._require_keys(cd, ("P", "L", "W"))
        cert = KypCertificate(io.json_to_matrix(cd["P"]),
                              io.json_to_matrix(cd["L"]),
                              io.json_to_matrix(cd["W"]))
        res = kyp_verify(S, cert, cfg.tol)
        rows.append({"tag": "positivity-certificate",
                     "residuals": [float(r) for r in res]})
        ok = max(res) <= math.sqrt(cfg.tol.eq_tol) * _scale(S.A)
    elif cfg.action == "riesz":
        P = riesz_projection(S.A, cfg.nodes, cfg.tol)
        rows.append({"tag": "riesz-contour", "projector": io.matrix_to_json(P),
                     "idempotency": max_abs(P @ P - P)})
    elif cfg.action == "fourier":
        P = riesz_projection(S.A, cfg.nodes, cfg.tol)
        for u in range(-cfg.order, cfg.order + 1):
            Ru = fourier_coeffs_realization(S, P, u, cfg.tol)
            rows.append({"tag": "fourier-realization", "k": u,
                         "value": io.matrix_to_json(Ru)})
    elif cfg.action == "row-characteristic":
        for m in range(cfg.order + 1):
            rows.append({"tag": "row-characteristic", "m": m, "value":
                         io.matrix_to_json(
                             f_row_from_characteristic_realization(S, m, cfg.tol))})
    elif cfg.action == "row-generating":
        for m in range(cfg.order + 1):
            rows.append({"tag": "row-generating", "m": m, "value":
                         io.matrix_to_json(
                             f_row_from_generating_realization(S, m, cfg.tol))})
    elif cfg.action == "row-lossless":
        if H is None:
            raise ParseError("row-lossless needs an H field in the input")
        for m in range(cfg.order + 1):
            rows.append({"tag": "row-lossless", "m": m, "value":
                         io.matrix_to_json(f_row_lossless(S.C, S.A, H, m, cfg.tol))})
    report = {"command": "realize", "action": cfg.action, "results": rows,
              "pass": bool(ok)}
    return report, ok, None


def _cmd_spectral(cfg: JobConfig):
    w = io.factor_from_json(io.load_json(cfg.in_path))
    rows = []
    ok = True
    if cfg.action == "stein":
        X = stein_solve(w.a, w.b, cfg.tol)
        res = max_abs(X - w.a @ X @ herm(w.a) - w.b @ herm(w.b))
        rows.append({"tag": "stein-gramian", "value": io.matrix_to_json(X),
                     "residual": res})
        ok = res <= 1e-12 * _scale(w.b @ herm(w.b))
    elif cfg.action == "density-realization":
        S = density_realization(w, cfg.tol)
        rows.append({"tag": "density-product-realization",
                     "realization": io.realization_to_json(S)})
    elif cfg.action == "fourier":
        for k in range(cfg.order + 1):
            rows.append({"tag": "fourier-factor", "k": k, "value":
                         io.matrix_to_json(fourier_coeffs_factor(w, k, cfg.tol))})
        if cfg.oracle:
            dens = factor_density(w, cfg.tol)
            worst = 0.0
            for k in range(cfg.order + 1):
                from .core import circle_quadrature
                ref = circle_quadrature(
                    lambda t, k=k: np.exp(-1j * k * t) * np.asarray(dens(t)),
                    cfg.nodes)
                worst = max(worst,
                            max_abs(fourier_coeffs_factor(w, k, cfg.tol) - ref))
            rows.append({"tag": "fourier-quadrature-oracle", "residual": worst})
            ok = ok and worst <= 1e-7
    elif cfg.action == "cara-eval":
        for z in _realize_points(cfg):
            rows.append({"tag": "herglotz-factor", "at": io.complex_to_pair(z),
                         "value": io.matrix_to_json(cara_from_factor(w, z, cfg.tol))})
    elif cfg.action == "row":
        for m in range(cfg.order + 1):
            rows.append({"tag": "row-factor", "m": m, "value":
                         io.matrix_to_json(f_row_from_factor(w, m, cfg.tol))})
        if cfg.oracle:
            dens = factor_density(w, cfg.tol)
            worst = max(
                max_abs(f_row_from_factor(w, m, cfg.tol)
                        - f_from_density_quadrature(dens, m, 0, cfg.nodes))
                for m in range(cfg.order + 1))
            rows.append({"tag": "row-quadrature-oracle", "residual": worst})
            ok = ok and worst <= 1e-7 * _scale(f_row_from_factor(w, cfg.order, cfg.tol))
    elif cfg.action == "grid":
        grid = grid_from_factor(w, cfg.order, cfg.order, cfg.tol)
        res = cr_residual(grid) if cfg.order >= 1 else 0.0
        rows.append({"tag": "dilation-binomial", "cr_residual": res,
                     "grid": io.grid_to_json(grid)})
        ok = res <= cfg.tol.eq_tol * _scale(grid.values)
    elif cfg.action == "kyp-cert":
        cert = kyp_certificate_for_factor(w, cfg.tol)
        phi = phi_realization_from_factor(w, cfg.tol)
        res = kyp_verify(phi, cert, cfg.tol)
        rows.append({"tag": "kyp-factor-certificate",
                     "P": io.matrix_to_json(cert.P),
                     "L": io.matrix_to_json(cert.L),
                     "W": io.matrix_to_json(cert.W),
                     "residuals": [float(r) for r in res]})
        ok = max(res) <= math.sqrt(cfg.tol.eq_tol)
    report = {"command": "spectral", "action": cfg.action, "results": rows,
              "pass": bool(ok)}
    return report, ok, None


def _cmd_displace(cfg: JobConfig):
    grid = io.grid_from_json(io.load_json(cfg.in_path))
    if grid.p != grid.q or grid.M != grid.N:
        raise ParseError("displacement needs a square structured grid")
    F = grid.section()
    rows = []
    ok = True
    if cfg.action == "decompose":
        data = displacement_decompose(F, grid.p, cfg.tol)
        rows.append({"tag": "displacement-vjv", "rank": data.rank,
                     "residual": data.residual,
                     "V": io.matrix_to_json(data.V)})
        ok = data.residual <= max(1e-12 * _scale(F), cfg.tol.eq_tol * 1e-2) \
            and data.rank <= 2 * grid.p
    else:
        th = theta(F, grid.p, 1.0, cfg.tol)
        worst = 0.0
        for lam, nu in _sample_pairs(20):
            worst = max(worst, theta_kernel_check(F, th, lam, nu, grid.p, cfg.tol))
        rows.append({"tag": "theta-kernel", "max_residual": worst, "pairs": 20})
        ok = worst <= 1e-9 * _scale(F)
    report = {"command": "displace", "action": cfg.action, "results": rows,
              "pass": bool(ok)}
    return report, ok, None


_HANDLERS = {
    "check": _cmd_check,
    "extend": _cmd_extend,
    "toeplitz": _cmd_toeplitz,
    "onestep": _cmd_onestep,
    "realize": _cmd_realize,
    "spectral": _cmd_spectral,
    "displace": _cmd_displace,
}


def main(argv=None) -> int:
    try:
        cfg = _parse_args(argv if argv is not None else sys.argv[1:])
        report, ok, artifact = _HANDLERS[cfg.command](cfg)
    except ParseError as exc:
        print(f"daft: parse error: {exc}", file=sys.stderr)
        return 2
    except DaftError as exc:
        print(f"daft: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if artifact is not None and cfg.out_path:
        kind, payload = artifact
        with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload if kind == "csv" else io.dumps(payload) + "\n")
        report = dict(report)
        report["out"] = cfg.out_path
    elif artifact is not None:
        kind, payload = artifact
        report = dict(report)
        report["artifact"] = payload if kind == "json" else payload.splitlines()
    print(io.dumps(report))
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
