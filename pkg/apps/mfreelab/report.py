"""Report writers. Every file is deterministic for a fixed config: no timestamps, sorted keys."""
import csv
import hashlib
import json
import pathlib
from typing import Dict, Iterable, List, Sequence, Tuple

from mfree.fock_sim import ConvergenceRow
from mfree.limit_law import BlockModel
from mfree.numeric import Number, format_number, within_tolerance
from mfree.series import MomentSeries


def model_hash(model: BlockModel) -> str:
    payload = json.dumps(model.canonical(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _float_text(value: Number) -> str:
    return repr(float(value))


def write_moments_csv(path: pathlib.Path, route: str, tables: Dict[str, MomentSeries]) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = 0
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["order", "law", "route", "value", "value_float"])
        for law in sorted(tables):
            for order, value in enumerate(tables[law].coeffs):
                w.writerow([order, law, route, format_number(value), _float_text(value)])
                rows += 1
    return rows


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, float):
        return value
    return format_number(value)


def write_json(path: pathlib.Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(_jsonable(payload), f, sort_keys=True, indent=2)
        f.write("\n")


def write_convergence_csv(path: pathlib.Path, rows: Sequence[ConvergenceRow]) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["n", "order", "reference", "moment", "limit", "error"])
        for r in rows:
            w.writerow([r.n, r.order, r.reference, format_number(r.moment), format_number(r.limit),
                        _float_text(r.error)])
    return len(rows)


def write_walks_csv(path: pathlib.Path, rows: Iterable[Tuple[str, int, Number, Number, Number]]) -> int:
    """Rows of (law, order, walk sum, labelled Dyck path sum, continued-fraction moment)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["law", "order", "walk_sum", "path_sum", "continued_fraction", "match"])
        for law, order, walk, paths, cf in rows:
            w.writerow([law, order, format_number(walk), format_number(paths), format_number(cf),
                        int(within_tolerance(walk, paths) and within_tolerance(walk, cf))])
            count += 1
    return count


def write_density_csv(path: pathlib.Path, rows: List[Tuple[float, float]], eps: float, depth: int,
                      model_digest: str) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(f"# eps={eps!r}\n")
        f.write(f"# depth={depth}\n")
        f.write(f"# model={model_digest}\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["x", "density"])
        for x, y in rows:
            w.writerow([f"{x:.10g}", f"{y:.12g}"])
    return len(rows)


def read_density_csv(path: pathlib.Path) -> List[Tuple[float, float]]:
    rows = []
    with open(path, newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    for record in list(csv.reader(lines))[1:]:
        rows.append((float(record[0]), float(record[1])))
    return rows
