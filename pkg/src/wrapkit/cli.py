"""Command-line front end: runs the analytic and stochastic checks and
writes machine-readable tables.

Every subcommand emits a header row naming its columns, data rows, and a
footer recording the numerical conventions plus the effective configuration,
so any result file is self-describing.  Exit codes: 0 success, 1 a check
exceeded its gap (or a numerical run went unstable), 2 usage or config
error.

Determinism: output bytes depend only on the effective semantic
configuration.  ``--threads`` (or WRAPKIT_THREADS) changes wall time, never
bytes, and is therefore not echoed in the footer; neither are file paths.
Floats are printed with %.17g, which round-trips doubles exactly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CatalogError,
    ContractError,
    DomainError,
    InstabilityError,
    ResolutionError,
    ResourceLimitError,
    SingularityError,
)
from .groups import alcove_points, make_group
from .wrapping import (
    RadialFunction,
    auto_cutoff,
    wrap_spectral,
    wraplap_check,
)
from .heat import (
    bend_complex,
    complexify,
    flat_heat_kernel,
    j_complex,
    preferred_route,
    semigroup_gap,
    spectral_heat_kernel,
    wrapped_heat_kernel,
)
from .brownian import (
    SdeConfig,
    empirical_density_table,
    real_character,
    wrap_bm_check,
)

_CONVENTIONS = (
    ("inner_product",
     "bi-invariant metric scaled so every root covector has unit length"
     " (su2 rho_norm_sq = 1/4)"),
    ("fourier",
     "nu_hat(xi) = integral nu(x) exp(-i<xi,x>) dx;"
     " the t-Gaussian has transform exp(-t||xi||^2/2)"),
    ("haar",
     "Haar measure has total mass 1;"
     " the Riemannian volume is kept separately in GroupSpec.volume"),
)

# execution plumbing, never part of the output bytes
_UNECHOED = {"out", "config", "threads"}


@dataclass(frozen=True)
class _Param:
    name: str
    type: type
    default: object
    help: str
    choices: tuple | None = None


_COMMON = (
    _Param("out", str, "-", "output path, - for stdout"),
    _Param("format", str, "csv", "output format", ("csv", "json")),
    _Param("config", str, None, "key=value config file (flags win)"),
    _Param("threads", int, None, "worker cap (default WRAPKIT_THREADS or 1)"),
)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _json_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else None
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v


def _emit(eff: dict, columns: list[str], rows: list[tuple],
          results: list[tuple[str, object]]) -> None:
    footer = [("command", eff["command"])]
    footer += [(k, v) for k, v in _CONVENTIONS]
    for key in sorted(eff):
        if key == "command" or key in _UNECHOED or eff[key] is None:
            continue
        footer.append((key, _fmt(eff[key])))
    footer += [(k, _fmt(v)) for k, v in results]

    if eff["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        for k, v in footer:
            w.writerow([f"# {k}={v}"])
        data = buf.getvalue()
    else:
        recs = [dict(zip(columns, map(_json_cell, r))) for r in rows]
        recs.append({"footer": {k: v for k, v in footer}})
        data = json.dumps(recs, indent=1) + "\n"

    if eff["out"] in (None, "-"):
        sys.stdout.write(data)
    else:
        Path(eff["out"]).write_text(data)


def _coord_columns(rank: int) -> list[str]:
    return [f"H{i + 1}" for i in range(rank)]


def _parse_rep(text: str, rank: int) -> tuple[int, ...]:
    try:
        coords = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise DomainError(f"rep {text!r} is not a comma list of integers") from exc
    if len(coords) != rank:
        raise DomainError(f"rep needs {rank} coordinates, got {len(coords)}")
    return coords


def _parse_mixture(text: str) -> list[tuple[float, float]]:
    pairs = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 2:
            raise DomainError(
                f"mixture component {part!r} is not weight:variance"
            )
        try:
            w, s = float(bits[0]), float(bits[1])
        except ValueError as exc:
            raise DomainError(f"mixture component {part!r} is not numeric") from exc
        pairs.append((w, s))
    return pairs


# ---------------------------------------------------------------------------
# subcommand handlers; each returns the process exit code
# ---------------------------------------------------------------------------

def _cmd_kernel(eff: dict) -> int:
    g = make_group(eff["group"])
    pts = alcove_points(g, eff["grid"])
    spectral = np.atleast_1d(spectral_heat_kernel(g, pts, eff["t"], True, eff["tol"]))
    wrapped = np.atleast_1d(wrapped_heat_kernel(g, pts, eff["t"], eff["tol"]))
    gap = np.abs(spectral - wrapped)
    rows = [(*p, s, w, d) for p, s, w, d in zip(pts, spectral, wrapped, gap)]
    ok = float(gap.max()) < eff["threshold"]
    _emit(eff, _coord_columns(g.rank) + ["spectral", "wrapped", "gap"], rows,
          [("route", preferred_route(g, pts, eff["t"])),
           ("max_gap", float(gap.max())), ("pass", ok)])
    return 0 if ok else 1


def _cmd_poisson_check(eff: dict) -> int:
    g = make_group(eff["group"])
    pts = alcove_points(g, eff["grid"])
    spectral = np.atleast_1d(spectral_heat_kernel(g, pts, eff["t"], True, eff["tol"]))
    wrapped = np.atleast_1d(wrapped_heat_kernel(g, pts, eff["t"], eff["tol"]))
    gap = np.abs(spectral - wrapped)
    rows = [(*p, s, w, d) for p, s, w, d in zip(pts, spectral, wrapped, gap)]
    ok = float(gap.max()) < eff["threshold"]
    _emit(eff, _coord_columns(g.rank) + ["spectral", "wrapped", "gap"], rows,
          [("max_gap", float(gap.max())), ("pass", ok)])
    return 0 if ok else 1


def _cmd_semigroup_check(eff: dict) -> int:
    g = make_group(eff["group"])
    coeff_gap, quad_gap = semigroup_gap(
        g, eff["t"], eff["s"], grid_points=eff["grid"], tol=eff["tol"]
    )
    ok = coeff_gap < eff["coeff_threshold"] and quad_gap < eff["quad_threshold"]
    _emit(eff, ["t", "s", "coeff_gap", "quad_gap"],
          [(eff["t"], eff["s"], coeff_gap, quad_gap)], [("pass", ok)])
    return 0 if ok else 1


def _cmd_wrap(eff: dict) -> int:
    if not eff["mixture"]:
        raise DomainError("wrap needs --mixture w1:s1,w2:s2,...")
    g = make_group(eff["group"])
    nu = RadialFunction.mixture(g.dim, _parse_mixture(eff["mixture"]))
    cutoff = eff["cutoff"] if eff["cutoff"] else auto_cutoff(g, nu, eff["tol"])
    f = wrap_spectral(g, nu, cutoff)
    rows = [
        (";".join(str(c) for c in w.coords), w.dimension, f.coeffs[w])
        for w in f._sorted_weights()
    ]
    _emit(eff, ["weight", "dimension", "coefficient"], rows,
          [("effective_cutoff", float(cutoff)), ("terms", len(rows))])
    return 0


def _cmd_wraplap_check(eff: dict) -> int:
    g = make_group(eff["group"])
    nu = RadialFunction.gaussian(g.dim, eff["t"])
    cutoff = auto_cutoff(g, nu, eff["tol"])
    gap = wraplap_check(g, nu, cutoff)
    ok = gap < eff["threshold"]
    _emit(eff, ["t", "gap"], [(eff["t"], gap)],
          [("effective_cutoff", float(cutoff)), ("pass", ok)])
    return 0 if ok else 1


def _cmd_simulate(eff: dict) -> int:
    g = make_group(eff["group"])
    cfg = SdeConfig(group=g, t=eff["t"], step=eff["step"], paths=eff["paths"],
                    seed=eff["seed"], chunk=eff["chunk"])
    score, rows = empirical_density_table(g, cfg, eff["bins"], eff["threads"])
    ok = bool(score < 1.0)
    _emit(eff, ["bin_lo", "bin_hi", "expected", "observed", "rel_dev",
                "threshold"], rows, [("score", score), ("pass", ok)])
    return 0 if ok else 1


def _cmd_wrap_bm_check(eff: dict) -> int:
    g = make_group(eff["group"])
    coords = (_parse_rep(eff["rep"], g.rank) if eff["rep"]
              else (1,) + (0,) * (g.rank - 1))
    f = real_character(g, coords)
    cfg = SdeConfig(group=g, t=eff["t"], step=eff["step"], paths=eff["paths"],
                    seed=eff["seed"], chunk=eff["chunk"])
    rep = wrap_bm_check(g, f, cfg, eff["threads"])
    gap = abs(rep.lhs.mean - rep.rhs.mean)
    allowance = 3.0 * math.hypot(rep.lhs.stderr, rep.rhs.stderr) + 5.0 * eff["step"]
    ok = gap <= allowance
    _emit(eff, ["lhs_mean", "lhs_stderr", "rhs_mean", "rhs_stderr", "gap",
                "z", "allowance"],
          [(rep.lhs.mean, rep.lhs.stderr, rep.rhs.mean, rep.rhs.stderr, gap,
            rep.z, allowance)],
          [("effective_rep", ",".join(map(str, coords))), ("pass", ok)])
    return 0 if ok else 1


def _cmd_bend(eff: dict) -> int:
    g = make_group(eff["group"])
    gc = complexify(g)
    pts = alcove_points(g, eff["grid"]) * eff["scale"]
    value = np.atleast_1d(bend_complex(gc, pts, eff["t"]))
    flat = flat_heat_kernel(np.sum(pts * pts, axis=1), eff["t"], gc.real_dim)
    inv_j = 1.0 / np.atleast_1d(j_complex(gc, pts))
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(flat > 0, value / np.where(flat > 0, flat, 1.0), np.nan)
    gap = np.abs(ratio - inv_j)
    rows = [(*p, v, r, ij, d)
            for p, v, r, ij, d in zip(pts, value, ratio, inv_j, gap)]
    finite = gap[np.isfinite(gap)]
    if len(finite) == 0:
        raise DomainError(
            "every comparison point underflows the flat Gaussian; "
            "reduce --scale or increase --t"
        )
    ok = float(finite.max()) <= eff["threshold"]
    _emit(eff, _coord_columns(g.rank) + ["value", "ratio_to_flat", "inv_j",
                                         "gap"], rows,
          [("compared", len(finite)), ("max_gap", float(finite.max())),
           ("pass", ok)])
    return 0 if ok else 1


def _cmd_catalog(eff: dict) -> int:
    names = ([eff["group"]] if eff["group"]
             else ["torus1", "torus2", "su2", "so3", "su2xsu2", "su3"])
    rows = []
    for name in names:
        g = make_group(name)
        rows.append((g.name, g.rank, g.dim, g.n_positive_roots, g.weyl_order,
                     g.is_abelian, g.rho_norm_sq, g.cell_volume, g.volume))
    _emit(eff, ["name", "rank", "dim", "positive_roots", "weyl_order",
                "abelian", "rho_norm_sq", "cell_volume", "volume"], rows, [])
    return 0


_COMMANDS: dict = {
    "kernel": (
        "evaluate the shifted heat kernel both ways on an alcove grid",
        _cmd_kernel,
        (
            _Param("group", str, None, "catalog group name"),
            _Param("t", float, 1.0, "time"),
            _Param("grid", int, 16, "number of alcove comparison points"),
            _Param("tol", float, 1e-10, "evaluator tolerance"),
            _Param("threshold", float, 1e-8, "max allowed route gap"),
        ),
    ),
    "poisson-check": (
        "lattice-sum vs character-series identity for the heat Gaussian",
        _cmd_poisson_check,
        (
            _Param("group", str, None, "catalog group name"),
            _Param("t", float, 1.0, "time"),
            _Param("grid", int, 20, "number of alcove comparison points"),
            _Param("tol", float, 1e-10, "evaluator tolerance"),
            _Param("threshold", float, 1e-10, "max allowed gap"),
        ),
    ),
    "semigroup-check": (
        "q_t * q_s = q_{t+s} at coefficient and quadrature level",
        _cmd_semigroup_check,
        (
            _Param("group", str, None, "catalog group name"),
            _Param("t", float, 0.5, "first time"),
            _Param("s", float, 0.5, "second time"),
            _Param("grid", int, 16, "alcove comparison points"),
            _Param("tol", float, 1e-9, "series tolerance"),
            _Param("coeff_threshold", float, 1e-12, "coefficient gap bound"),
            _Param("quad_threshold", float, 1e-6, "quadrature gap bound"),
        ),
    ),
    "wrap": (
        "character coefficients of the wrap of a Gaussian mixture",
        _cmd_wrap,
        (
            _Param("group", str, None, "catalog group name"),
            _Param("mixture", str, None, "components w1:s1,w2:s2,..."),
            _Param("cutoff", float, None, "dual-norm cutoff (default: auto)"),
            _Param("tol", float, 1e-10, "auto-cutoff tail tolerance"),
        ),
    ),
    "wraplap-check": (
        "wrap of the flat Laplacian vs shifted group Laplacian of the wrap",
        _cmd_wraplap_check,
        (
            _Param("group", str, None, "catalog group name"),
            _Param("t", float, 0.5, "Gaussian time parameter"),
            _Param("tol", float, 1e-10, "auto-cutoff tail tolerance"),
            _Param("threshold", float, 1e-12, "max allowed coefficient gap"),
        ),
    ),
    "simulate": (
        "simulate Brownian paths and bin endpoints against the density",
        _cmd_simulate,
        (
            _Param("group", str, None, "rank-one catalog group"),
            _Param("t", float, 1.0, "horizon"),
            _Param("step", float, 1e-3, "Euler step h"),
            _Param("paths", int, 100000, "number of paths"),
            _Param("seed", int, 0, "master seed"),
            _Param("chunk", int, 20000, "paths per deterministic substream"),
            _Param("bins", int, 12, "histogram bins over the alcove"),
        ),
    ),
    "wrap-bm-check": (
        "Monte Carlo check: flat side with j-weight vs group side",
        _cmd_wrap_bm_check,
        (
            _Param("group", str, None, "catalog group name"),
            _Param("t", float, 0.5, "horizon"),
            _Param("step", float, 5e-3, "Euler step h"),
            _Param("paths", int, 100000, "number of paths"),
            _Param("seed", int, 0, "master seed"),
            _Param("chunk", int, 20000, "paths per deterministic substream"),
            _Param("rep", str, None,
                   "dominant weight coordinates k1,k2,... (default 1,0,...)"),
        ),
    ),
    "bend": (
        "closed-form complex-group kernel and its flat-ratio check",
        _cmd_bend,
        (
            _Param("group", str, None, "compact group to complexify"),
            _Param("t", float, 1.0, "time"),
            _Param("grid", int, 8, "alcove sample points"),
            _Param("scale", float, 1.0, "shrink factor applied to the points"),
            _Param("threshold", float, 1e-4, "max |ratio - 1/j| allowed"),
        ),
    ),
    "catalog": (
        "print the catalog group data",
        _cmd_catalog,
        (
            _Param("group", str, None, "one group (default: all)"),
        ),
    ),
}


# ---------------------------------------------------------------------------
# configuration plumbing
# ---------------------------------------------------------------------------

def _load_config(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read config file {path}: {exc}") from exc
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_UNSET = object()


def _effective(command: str, ns: argparse.Namespace) -> dict:
    """Merge flags over config-file values over declared defaults."""
    params = _COMMON + _COMMANDS[command][2]
    by_name = {p.name: p for p in params}
    file_values = {}
    config_path = getattr(ns, "config")
    if config_path is not _UNSET and config_path is not None:
        file_values = _load_config(config_path)
        unknown = set(file_values) - set(by_name)
        if unknown:
            raise DomainError(
                f"unknown config keys for {command}: {', '.join(sorted(unknown))}"
            )
    eff = {"command": command}
    for p in params:
        flag = getattr(ns, p.name)
        if flag is not _UNSET:
            eff[p.name] = flag
        elif p.name in file_values:
            raw = file_values[p.name]
            try:
                eff[p.name] = p.type(raw)
            except ValueError as exc:
                raise DomainError(
                    f"config key {p.name}={raw!r} is not a valid {p.type.__name__}"
                ) from exc
            if p.choices and eff[p.name] not in p.choices:
                raise DomainError(
                    f"config key {p.name}={raw!r} not one of {p.choices}"
                )
        else:
            eff[p.name] = p.default
    if "group" in eff and eff["group"] is None and command != "catalog":
        raise DomainError("missing required parameter: group")
    return eff


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wrapkit",
        description="heat kernels on compact groups three ways, cross-checked",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, (help_, _handler, params) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        for p in _COMMON + params:
            kwargs = {"default": _UNSET, "help": p.help, "dest": p.name}
            if p.choices:
                kwargs["choices"] = p.choices
            if p.type is not str:
                kwargs["type"] = p.type
            sp.add_argument("--" + p.name.replace("_", "-"), **kwargs)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        eff = _effective(ns.command, ns)
        return _COMMANDS[ns.command][1](eff)
    except (CatalogError, ContractError, DomainError, ResolutionError,
            SingularityError) as exc:
        print(f"wrapkit: error: {exc}", file=sys.stderr)
        return 2
    except (InstabilityError, ResourceLimitError) as exc:
        print(f"wrapkit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
