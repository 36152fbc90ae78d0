#!/usr/bin/env python3
import argparse
import logging
import os
import pathlib
import sys
from typing import Callable, Dict, List, Optional

import numpy as np

# Add libs to path for the mfree import
sys.path.insert(0, str(pathlib.Path(__file__).parent.parent.parent / "libs"))

from mfree.convolve import NamedLaw, as_kseries
from mfree.errors import ConfigError, InvalidParameterError, MfreeError
from mfree.fock_sim import (
    Flavor, PseudomatrixSpec, Reference, convergence_table, decay_exponent, extrapolate_limit,
    pseudomatrix_moment,
)
from mfree.limit_law import (
    BlockModel, compare_tables, cross_check, limit_family, route_applicable, route_tables,
    twin_semicircle_checks,
)
from mfree.numeric import Number, Profile, coerce
from mfree.series import (
    ContinuedFractionSpec, MomentSeries, cf_evaluate_matrix, density_grid, grid_mass, parse_grid,
)
from mfree.tree_walk import MatricialWeighting, catalan_weight_sum, walk_moment

from .config import RunConfig, build_run_config, load_model_file, load_run_document, merge
from .report import (
    model_hash, write_convergence_csv, write_density_csv, write_json, write_moments_csv, write_walks_csv,
)

log = logging.getLogger("mfreelab")

CONFIG_ROOT = pathlib.Path(__file__).parent.parent.parent / "configs"
FLOAT_TOLERANCE = 1e-9


def _split(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [part.strip() for part in text.split(",") if part.strip()]


def _sizes(text: Optional[str]) -> Optional[List[int]]:
    parts = _split(text)
    if parts is None:
        return None
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ConfigError(f"fock_sizes: expected comma-separated integers, got {text!r}")


def load_config(args) -> RunConfig:
    data: Dict = {}
    default = CONFIG_ROOT / "default.toml"
    if default.exists():
        data = load_run_document(default)
    if args.config:
        data = merge(data, load_run_document(pathlib.Path(args.config)))
    if args.model:
        data["model"] = load_model_file(pathlib.Path(args.model))
    overrides = {
        "max_order": args.order,
        "numeric_profile": args.profile,
        "output": args.out,
        "routes": _split(args.routes),
        "fock_sizes": _sizes(args.fock_sizes),
        "tolerance": args.tolerance,
        "density": {"law": args.law, "grid": args.grid, "eps": args.eps, "depth": args.depth},
        "fock": {"engine": args.engine},
    }
    return build_run_config(merge(data, overrides))


def fock_tables(model: BlockModel, cfg: RunConfig) -> Dict[str, MomentSeries]:
    """mu and mu_0 extrapolated to n = infinity from the finite-n trace and vacuum moments."""
    if len(cfg.fock_sizes) < cfg.max_order // 2 + 2:
        print(f"Warning: {len(cfg.fock_sizes)} fock sizes may not extrapolate order {cfg.max_order} exactly",
              file=sys.stderr)
    flavor = Flavor(cfg.fock.flavor)
    tables = {}
    for law, reference in (("mu", Reference.trace()), ("mu0", Reference.vacuum())):
        coeffs: List[Number] = [1]
        for m in range(1, cfg.max_order + 1):
            if m % 2:
                coeffs.append(0)
                continue
            samples = [(n, pseudomatrix_moment(PseudomatrixSpec(n, model, flavor), m, reference,
                                               engine=cfg.fock.engine))
                       for n in cfg.fock_sizes]
            coeffs.append(extrapolate_limit(samples))
        tables[law] = MomentSeries(tuple(coeffs))
    return tables


def _tables_for(model: BlockModel, cfg: RunConfig, route: str) -> Optional[Dict[str, MomentSeries]]:
    if route == "fock":
        return fock_tables(model, cfg)
    reason = route_applicable(model, route)
    if reason:
        print(f"Warning: skipping route {route}: {reason}", file=sys.stderr)
        return None
    return route_tables(model, cfg.max_order, route)


def cmd_moments(cfg: RunConfig, out: pathlib.Path) -> int:
    model = cfg.block_model()
    for route in cfg.routes:
        tables = _tables_for(model, cfg, route)
        if tables is None:
            continue
        path = out / f"moments_{route}.csv"
        rows = write_moments_csv(path, route, tables)
        print(f"wrote {path} with {rows} rows")
    return 0


def cmd_crosscheck(cfg: RunConfig, out: pathlib.Path) -> int:
    model = cfg.block_model()
    report = cross_check(model, cfg.max_order, [r for r in cfg.routes if r != "fock"])
    for route, reason in sorted(report.skipped.items()):
        print(f"Warning: skipping route {route}: {reason}", file=sys.stderr)
    tables = dict(report.tables)
    discrepancies = dict(report.discrepancies)
    if "fock" in cfg.routes:
        fock = fock_tables(model, cfg)
        for route in report.tables:
            discrepancies[(route, "fock")] = compare_tables(report.tables[route], fock)
        tables["fock"] = fock
    for route, route_table in tables.items():
        write_moments_csv(out / f"moments_{route}.csv", route, route_table)

    if cfg.tolerance is not None:
        tolerance = cfg.tolerance
    else:
        tolerance = 0.0 if cfg.numeric_profile is Profile.RATIONAL else FLOAT_TOLERANCE
    scale = max([1.0] + [abs(float(v)) for t in tables.values() for law in t.values() for v in law.coeffs])
    limit = tolerance if cfg.numeric_profile is Profile.RATIONAL else tolerance * scale
    worst = max(discrepancies.values(), default=0)
    ok = all(float(v) <= limit for v in discrepancies.values())

    payload = {
        "model": model_hash(model),
        "name": model.name,
        "order": cfg.max_order,
        "profile": cfg.numeric_profile.value,
        "routes": sorted(tables),
        "skipped": report.skipped,
        "pairs": {f"{a}|{b}": v for (a, b), v in sorted(discrepancies.items())},
        "max_discrepancy": worst,
        "tolerance": tolerance,
        "ok": ok,
    }
    twin = twin_semicircle_checks(model, cfg.max_order)
    if twin is not None:
        payload.update(twin)
    path = out / "discrepancy.json"
    write_json(path, payload)
    print(f"wrote {path} with {len(discrepancies)} route pairs")
    if not ok:
        print(f"Warning: cross-check exceeds tolerance {tolerance} (max discrepancy {float(worst):.3g})",
              file=sys.stderr)
        return 1
    return 0


def cmd_fock_converge(cfg: RunConfig, out: pathlib.Path) -> int:
    model = cfg.block_model()
    if not cfg.fock_sizes:
        raise ConfigError("fock_sizes: at least one size is required")
    orders = list(range(2, cfg.max_order + 1, 2))
    flavor = Flavor(cfg.fock.flavor)
    rows = []
    for reference in (Reference.trace(), Reference.vacuum()):
        rows.extend(convergence_table(model, orders, cfg.fock_sizes, reference, cfg.fock.engine, flavor))
    path = out / "fock_convergence.csv"
    count = write_convergence_csv(path, rows)
    print(f"wrote {path} with {count} rows")
    for reference in ("trace", "vacuum"):
        for m in orders:
            subset = [r for r in rows if r.reference == reference and r.order == m]
            try:
                print(f"{reference} m={m}: decay exponent {decay_exponent(subset):.3f}")
            except InvalidParameterError:
                print(f"{reference} m={m}: too few nonzero errors to fit a decay exponent")
    return 0


def cmd_walks(cfg: RunConfig, out: pathlib.Path) -> int:
    model = cfg.block_model()
    if model.r != 2:
        raise ConfigError(f"model: the walks route requires r = 2, model has r = {model.r}")
    family = limit_family(model, cfg.max_order)
    reference = {"mu0": family.mu0, "mu1": family.muj_moments(0), "mu2": family.muj_moments(1)}
    rows = []
    for law in ("mu0", "mu1", "mu2"):
        weighting = MatricialWeighting.for_law(model.b, law)
        for m in range(cfg.max_order + 1):
            paths = catalan_weight_sum(weighting, m // 2) if m % 2 == 0 else 0
            rows.append((law, m, walk_moment(weighting, m), paths, reference[law][m]))
    path = out / "walks.csv"
    count = write_walks_csv(path, rows)
    print(f"wrote {path} with {count} rows")
    return 0


def law_source(selector: str, model: BlockModel, depth: int, order: int):
    """
    Cauchy-transform source for a law selector.

    mu, mu0, muj:<j> and kij:<i>,<j> (1-based) come from the numeric
    continued fraction of the model; semicircle:<alpha> is a named law.
    """
    b = model.b
    r = model.r
    if selector.startswith("semicircle:"):
        alpha = coerce(selector.split(":", 1)[1])
        return as_kseries(NamedLaw.semicircle(alpha), max(order, 8))
    if selector.startswith("kij:"):
        try:
            i, j = (int(p) - 1 for p in selector.split(":", 1)[1].split(","))
        except ValueError:
            raise InvalidParameterError(f"law selector {selector!r} must look like kij:<i>,<j>")
        return ContinuedFractionSpec(b, depth, (i, j))

    def k_matrix(zs):
        return cf_evaluate_matrix(b, zs, depth=depth)

    if selector == "mu":
        d = np.array([float(x) for x in model.d.diag])

        def mixture_g(zs):
            columns = k_matrix(zs).sum(axis=0)
            return sum(d[j] / (zs - columns[j]) for j in range(r))

        return mixture_g
    if selector == "mu0":
        return lambda zs: 1.0 / (zs - sum(k_matrix(zs)[j, j, :] for j in range(r)))
    if selector.startswith("muj:"):
        try:
            j = int(selector.split(":", 1)[1]) - 1
        except ValueError:
            raise InvalidParameterError(f"law selector {selector!r} must look like muj:<j>")
        if not 0 <= j < r:
            raise InvalidParameterError(f"muj index {j + 1} outside 1..{r}")
        return lambda zs: 1.0 / (zs - k_matrix(zs)[:, j, :].sum(axis=0))
    raise InvalidParameterError(f"unknown law selector {selector!r}")


def cmd_density(cfg: RunConfig, out: pathlib.Path) -> int:
    model = cfg.block_model()
    dens = cfg.density
    source = law_source(dens.law, model, dens.depth, cfg.max_order)
    rows = density_grid(source, parse_grid(dens.grid), dens.eps, depth=dens.depth)
    safe = dens.law.replace(":", "_").replace(",", "_")
    path = out / f"density_{safe}.csv"
    count = write_density_csv(path, rows, dens.eps, dens.depth, model_hash(model))
    print(f"wrote {path} with {count} rows (mass {grid_mass(rows):.4f})")
    return 0


COMMANDS: Dict[str, Callable[[RunConfig, pathlib.Path], int]] = {
    "moments": cmd_moments,
    "crosscheck": cmd_crosscheck,
    "fock-converge": cmd_fock_converge,
    "walks": cmd_walks,
    "density": cmd_density,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default=None, help="model TOML file with a [model] table")
    common.add_argument("--config", default=None, help="run TOML file with [run] and optional [density]")
    common.add_argument("--order", type=int, default=None)
    common.add_argument("--profile", default=os.environ.get("MFREE_PROFILE"), help="rational or f64")
    common.add_argument("--out", default=os.environ.get("MFREE_OUT"))
    common.add_argument("--routes", default=None, help="comma-separated routes")
    common.add_argument("--fock-sizes", default=None, help="comma-separated matrix sizes")
    common.add_argument("--engine", default=None, choices=["direct", "blocks"])
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--law", default=None, help="mu, mu0, muj:<j>, kij:<i>,<j> or semicircle:<alpha>")
    common.add_argument("--grid", default=None, help="lo:hi:steps")
    common.add_argument("--eps", type=float, default=None)
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--log-level", default=os.environ.get("MFREE_LOG_LEVEL", "WARNING"))

    ap = argparse.ArgumentParser(prog="mfreelab")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        out = pathlib.Path(cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        log.info("running %s with routes %s", args.command, cfg.routes)
        return COMMANDS[args.command](cfg, out)
    except MfreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
