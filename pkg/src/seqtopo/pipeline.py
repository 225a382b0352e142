"""Per-sequence feature extraction, caching and dataset-level steps."""

from __future__ import annotations

import hashlib
import json
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields as dc_fields
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence as Seq, Tuple

from . import __version__
from .filtration import (
    INF,
    Direction,
    FiltrationTable,
    face_preserving_modification,
    filtered_complex,
    first_occurrence_table,
    format_value,
    frequency_table,
    min_window_table,
    substring_count_table,
)
from .linalg import Field
from .path_homology import persistent_path_homology
from .persistence import Barcode, betti_curve, persistent_homology
from .phylo import LINKAGES, DistanceMatrix, cluster_upgma, distance_matrix, to_newick, unify_curves, _parse_metric
from .seq_io import AmbiguityPolicy, Alphabet, Sequence, normalize, parse_records, dedupe_ids
from .spectral import spectral_gap_curve

FUNCTIONS = ("ell", "ell1", "count", "freq")
CACHE_ENV = "SEQTOPO_CACHE_DIR"


class ConfigError(ValueError):
    """Invalid configuration or command-line usage."""


class InputError(ValueError):
    """Unreadable or malformed input data."""


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_list(text: str) -> List[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


@dataclass
class RunConfig:
    inputs: List[str] = field(default_factory=list)
    alphabet: str = "ACGT"
    ambiguity: str = "skip"
    function: str = "ell"
    dmax: int = 3
    value_cap: int = 64
    freq_step: Fraction = Fraction(1, 1024)
    fields: List[str] = field(default_factory=lambda: ["q"])
    dims: List[int] = field(default_factory=lambda: [0, 1, 2, 3])
    metric: str = "manhattan"
    linkage: str = "average"
    families: List[str] = field(default_factory=lambda: ["spectral_gap_dim1"])
    output: str = "out"
    threads: int = 0
    cache: bool = True
    fail_fast: bool = False
    write_table: bool = False

    def validate(self) -> "RunConfig":
        """Check every enumeration and range before any work starts."""
        try:
            Alphabet.from_string(self.alphabet)
        except Exception as exc:
            raise ConfigError(f"alphabet: {exc}") from None
        if self.ambiguity not in [p.value for p in AmbiguityPolicy]:
            raise ConfigError(f"ambiguity must be one of skip, reject (got {self.ambiguity!r})")
        if self.function not in FUNCTIONS:
            raise ConfigError(f"function must be one of {', '.join(FUNCTIONS)} (got {self.function!r})")
        if not isinstance(self.dmax, int) or self.dmax < 0:
            raise ConfigError("dmax must be a non-negative integer")
        if self.dmax > 6:
            raise ConfigError("dmax above 6 is not supported")
        if not isinstance(self.value_cap, int) or self.value_cap < 0:
            raise ConfigError("value_cap must be a non-negative integer")
        if not 0 < self.freq_step <= 1:
            raise ConfigError("freq_step must lie in (0, 1]")
        if not self.fields:
            raise ConfigError("at least one coefficient field is required")
        try:
            self.fields = [Field.parse(f).value for f in self.fields]
        except ValueError as exc:
            raise ConfigError(f"fields: {exc}") from None
        if not self.dims or any(d < 0 or d > self.dmax for d in self.dims):
            raise ConfigError(f"dims must lie in 0..dmax ({self.dmax})")
        try:
            _parse_metric(self.metric, None)
        except ValueError as exc:
            raise ConfigError(f"metric: {exc}; write minkowski as minkowski(p)") from None
        if self.linkage not in LINKAGES:
            raise ConfigError(f"linkage must be one of {', '.join(LINKAGES)} (got {self.linkage!r})")
        if not self.families:
            raise ConfigError("select at least one curve family")
        for fam in self.families:
            if not re.fullmatch(r"(spectral_gap|betti_(gf2|q))_dim\d+", fam):
                raise ConfigError(f"unknown curve family {fam!r}")
        if self.threads < 0:
            raise ConfigError("threads must be non-negative (0 means all cores)")
        return self

    @property
    def field_tags(self) -> List[Field]:
        return [Field.parse(f) for f in self.fields]

    def workers(self) -> int:
        return self.threads or os.cpu_count() or 1

    def to_text(self) -> str:
        lines = []
        for f in dc_fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = ",".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, Fraction):
                v = format_value(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls().update(parse_config_text(text))

    def update(self, pairs: Dict[str, str]) -> "RunConfig":
        """Apply string-valued settings (config file entries or flags)."""
        known = {f.name: f for f in dc_fields(self)}
        for key, raw in pairs.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown setting {key!r}")
            default = getattr(RunConfig(), key)
            try:
                if key == "dims":
                    value = [int(x) for x in _parse_list(raw)]
                elif isinstance(default, list):
                    value = _parse_list(raw)
                elif isinstance(default, bool):
                    value = _parse_bool(raw)
                elif isinstance(default, int):
                    value = int(raw)
                elif isinstance(default, Fraction):
                    value = Fraction(raw.strip())
                else:
                    value = raw.strip()
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
            setattr(self, key, value)
        return self

    def feature_fingerprint(self) -> Dict[str, object]:
        """Settings that change per-sequence feature output."""
        return {
            "alphabet": self.alphabet,
            "function": self.function,
            "dmax": self.dmax,
            "value_cap": self.value_cap,
            "freq_step": format_value(self.freq_step),
            "fields": list(self.fields),
            "dims": list(self.dims),
            "write_table": self.write_table,
        }


def parse_config_text(text: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def read_config_pairs(path: Optional[str]) -> Dict[str, str]:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config_text(text)


def load_config(path: Optional[str]) -> RunConfig:
    return RunConfig().update(read_config_pairs(path))


# ---------------------------------------------------------------------------
# grids


def step_grid(config: RunConfig) -> List[object]:
    """Parameter value at every curve step, in filtration order."""
    if config.function in ("ell", "ell1"):
        return list(range(config.value_cap + 1))
    if config.function == "count":
        return list(range(config.value_cap, -1, -1))
    out = []
    k = 0
    while k * config.freq_step < 1:
        out.append(1 - k * config.freq_step)
        k += 1
    return out + [Fraction(0)]


def build_table(seq: Sequence, config: RunConfig) -> FiltrationTable:
    fn = config.function
    if fn == "ell":
        return min_window_table(seq, config.dmax, config.value_cap)
    if fn == "ell1":
        t = first_occurrence_table(seq, config.dmax, config.value_cap)
        return t if t.face_preserving else face_preserving_modification(t, Direction.SUBLEVEL)
    if fn == "count":
        return substring_count_table(seq, config.dmax)
    return frequency_table(seq, config.dmax)


def saturation_step(values: Seq[object], grid: List[object], direction: Direction) -> int:
    """First step from which no further simplex enters."""
    finite = [v for v in values if v not in (INF, -INF)]
    if not finite:
        return 0
    last = max(finite) if direction is Direction.SUBLEVEL else min(finite)
    for k, a in enumerate(grid):
        if (a >= last) if direction is Direction.SUBLEVEL else (a <= last):
            return k
    return len(grid) - 1


# ---------------------------------------------------------------------------
# per-sequence features


def _curve_csv(grid: List[object], columns: Dict[str, List[object]]) -> str:
    names = list(columns)
    lines = [",".join(["t"] + names)]
    for k, t in enumerate(grid):
        row = [format_value(t)] + [_num(columns[n][k]) for n in names]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _num(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def compute_features(seq: Sequence, config: RunConfig) -> Dict[str, str]:
    """All per-sequence output files as ``{filename: text}``."""
    if len(seq) == 0:
        raise InputError(f"sequence {seq.id} is empty")
    table = build_table(seq, config)
    F = filtered_complex(table)
    grid = step_grid(config)
    sat = saturation_step(F.values, grid, F.direction)
    steps = grid[: sat + 1]
    files: Dict[str, str] = {}
    label = F.label
    betti_cols: Dict[str, Dict[str, List[int]]] = {}
    for fld in config.field_tags:
        B = persistent_homology(F, fld, maxdim=config.dmax)
        files[f"barcode_{fld.value}.json"] = B.to_json(label, sequence=seq.id, function=config.function)
        cols = {f"betti_dim{n}": betti_curve(B, steps, n).values for n in config.dims}
        files[f"betti_{fld.value}.csv"] = _curve_csv(steps, cols)
    gaps = {f"lambda_dim{n}": spectral_gap_curve(F, n, steps).values for n in config.dims}
    files["spectral_gap.csv"] = _curve_csv(steps, gaps)
    meta = {
        "id": seq.id,
        "length": len(seq),
        "function": config.function,
        "parameter_direction": F.direction.value,
        "saturation_step": sat,
        "steps": len(steps),
        "simplices": len(F),
        "face_preserving_input": table.face_preserving,
        "version": __version__,
    }
    files["meta.json"] = json.dumps(meta, indent=1, sort_keys=True) + "\n"
    if config.write_table:
        files["table.csv"] = table.to_csv()
    return files


def cache_key(seq: Sequence, config: RunConfig, kind: str = "features") -> str:
    h = hashlib.sha256()
    h.update(kind.encode())
    h.update(b"\0")
    h.update(__version__.encode())
    h.update(b"\0")
    h.update(json.dumps(config.feature_fingerprint(), sort_keys=True).encode())
    h.update(b"\0")
    h.update(seq.id.encode())
    h.update(b"\0")
    h.update(seq.codes.tobytes())
    return h.hexdigest()


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "seqtopo"


def cached(seq: Sequence, config: RunConfig, kind: str, compute) -> Dict[str, str]:
    if not config.cache:
        return compute(seq, config)
    path = cache_dir() / f"{cache_key(seq, config, kind)}.json"
    if path.is_file():
        try:
            return json.loads(path.read_text())
        except (OSError, ValueError):
            pass
    files = compute(seq, config)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(json.dumps(files, sort_keys=True))
        tmp.replace(path)
    except OSError:
        pass
    return files


def compute_pathhom(seq: Sequence, config: RunConfig) -> Dict[str, str]:
    if len(seq) < 2:
        raise InputError(f"sequence {seq.id} needs at least two symbols for path homology")
    files = {}
    for fld in config.field_tags:
        B = persistent_path_homology(seq, config.function, fld, config.dmax)
        symbols = seq.alphabet.symbols
        files[f"barcode_{fld.value}.json"] = B.to_json(
            lambda s: "".join(symbols[c] for c in s), sequence=seq.id, function=config.function
        )
    return files


def _task(args) -> Tuple[str, Optional[Dict[str, str]], Optional[str]]:
    seq, config, kind = args
    compute = compute_features if kind == "features" else compute_pathhom
    try:
        return seq.id, cached(seq, config, kind, compute), None
    except (InputError, ValueError) as exc:
        return seq.id, None, str(exc)


# ---------------------------------------------------------------------------
# dataset-level steps


def safe_name(seq_id: str) -> str:
    name = re.sub(r"[^A-Za-z0-9._-]", "_", seq_id).lstrip(".")
    return name or "seq"


def load_inputs(config: RunConfig) -> Tuple[List[Sequence], Dict[str, str]]:
    """Parse every input file; records that fail normalization are returned as failures."""
    if not config.inputs:
        raise ConfigError("no input files given")
    alphabet = Alphabet.from_string(config.alphabet)
    records = []
    for path in config.inputs:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        try:
            records.extend(parse_records(data))
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from None
    ids = dedupe_ids([r[0] for r in records])
    out: List[Sequence] = []
    failures: Dict[str, str] = {}
    for i, (_, raw) in zip(ids, records):
        try:
            out.append(normalize(raw, config.ambiguity, alphabet, i))
        except ValueError as exc:
            if config.fail_fast:
                raise InputError(str(exc)) from None
            failures[i] = str(exc)
    return out, failures


@dataclass
class RunReport:
    written: List[str]
    failures: Dict[str, str]


def run_per_sequence(config: RunConfig, kind: str, subdir: str) -> RunReport:
    """Compute per-sequence outputs in a worker pool and write them in input order."""
    seqs, failures = load_inputs(config)
    names = dedupe_ids([safe_name(s.id) for s in seqs])
    jobs = [(s, config, kind) for s in seqs]
    workers = min(config.workers(), len(jobs)) or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, jobs))
    else:
        results = [_task(j) for j in jobs]
    root = Path(config.output) / subdir
    written = []
    index = []
    for name, (sid, files, err) in zip(names, results):
        if err is not None:
            failures[sid] = err
            if config.fail_fast:
                break
            continue
        d = root / name
        d.mkdir(parents=True, exist_ok=True)
        for fname in sorted(files):
            (d / fname).write_text(files[fname])
        index.append({"id": sid, "dir": name})
        written.append(sid)
    root.mkdir(parents=True, exist_ok=True)
    doc = {"kind": kind, "config": config.feature_fingerprint(), "sequences": index, "version": __version__}
    (root / "index.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return RunReport(written, failures)


def _read_curve_csv(path: Path) -> Dict[str, List[float]]:
    lines = path.read_text().splitlines()
    if not lines:
        raise InputError(f"{path} is empty")
    header = lines[0].split(",")
    if header[0] != "t":
        raise InputError(f"{path}: first column must be t")
    cols = {h: [] for h in header[1:]}
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(header):
            raise InputError(f"{path}: ragged row {line!r}")
        for h, v in zip(header[1:], parts[1:]):
            cols[h].append(float(v))
    return cols


def load_feature_curves(feature_dir: str, families: Seq[str]):
    """Read curves for ``families`` and put them on one grid by last-value hold."""
    root = Path(feature_dir)
    try:
        index = json.loads((root / "index.json").read_text())
    except (OSError, ValueError):
        raise InputError(f"{root} has no readable index.json; run the features command first") from None
    fp = index["config"]
    cfg = RunConfig().update({k: ",".join(map(str, v)) if isinstance(v, list) else str(v) for k, v in fp.items()})
    grid = step_grid(cfg)
    per_id: Dict[str, Dict[str, List[float]]] = {}
    missing = []
    longest = 0
    for entry in index["sequences"]:
        d = root / entry["dir"]
        curves: Dict[str, List[float]] = {}
        for fam in families:
            if fam.startswith("spectral_gap_dim"):
                path, col = d / "spectral_gap.csv", "lambda_dim" + fam[len("spectral_gap_dim"):]
            else:
                m = re.fullmatch(r"betti_(gf2|q)_dim(\d+)", fam)
                path, col = d / f"betti_{m.group(1)}.csv", f"betti_dim{m.group(2)}"
            try:
                table = _read_curve_csv(path)
            except OSError:
                missing.append(f"{entry['id']} ({path.name})")
                continue
            if col not in table:
                missing.append(f"{entry['id']} ({fam})")
                continue
            curves[fam] = table[col]
            longest = max(longest, len(table[col]))
        per_id[entry["id"]] = curves
    if missing:
        raise InputError("missing features for " + ", ".join(missing))
    if not per_id:
        raise InputError(f"{root} lists no sequences")
    return unify_curves(per_id, grid[:longest], ids=[e["id"] for e in index["sequences"]])


def run_dist(config: RunConfig, feature_dir: str) -> DistanceMatrix:
    curves = load_feature_curves(feature_dir, config.families)
    D = distance_matrix(curves, config.metric, config.families)
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "distances.csv").write_text(D.to_csv())
    (out / "distances.phy").write_text(D.to_phylip())
    return D


def run_tree(config: RunConfig, matrix_path: str, svg: bool = True) -> str:
    try:
        text = Path(matrix_path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {matrix_path}: {exc.strerror}") from None
    try:
        D = DistanceMatrix.from_csv(text)
    except ValueError as exc:
        raise InputError(f"{matrix_path}: {exc}") from None
    if len(D.ids) < 2:
        raise InputError("need at least two taxa to build a tree")
    T = cluster_upgma(D, config.linkage)
    nwk = to_newick(T)
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "tree.nwk").write_text(nwk + "\n")
    if svg:
        from .svg import dendrogram_svg

        (out / "tree.svg").write_text(dendrogram_svg(T))
    return nwk


def run_plot(feature_dir: str, out_dir: Optional[str] = None) -> List[str]:
    """SVG barcode and curve plots next to (or away from) each feature directory."""
    from .svg import barcode_svg, curves_svg

    root = Path(feature_dir)
    try:
        index = json.loads((root / "index.json").read_text())
    except (OSError, ValueError):
        raise InputError(f"{root} has no readable index.json") from None
    written = []
    for entry in index["sequences"]:
        d = root / entry["dir"]
        target = Path(out_dir) / entry["dir"] if out_dir else d
        target.mkdir(parents=True, exist_ok=True)
        for bar in sorted(d.glob("barcode_*.json")):
            try:
                B = Barcode.from_json(bar.read_text())
            except (ValueError, KeyError, TypeError) as exc:
                raise InputError(f"{bar}: malformed barcode file ({exc})") from None
            svg = barcode_svg(B, f"{entry['id']} {bar.stem}")
            (target / f"{bar.stem}.svg").write_text(svg)
            written.append(str(target / f"{bar.stem}.svg"))
        for csv_path in sorted(list(d.glob("betti_*.csv")) + list(d.glob("spectral_gap.csv"))):
            try:
                cols = _read_curve_csv(csv_path)
                grid = [float(line.split(",")[0]) for line in csv_path.read_text().splitlines()[1:]]
            except ValueError as exc:
                raise InputError(f"{csv_path}: malformed curve file ({exc})") from None
            svg = curves_svg({k: (grid, v) for k, v in cols.items()}, f"{entry['id']} {csv_path.stem}")
            (target / f"{csv_path.stem}.svg").write_text(svg)
            written.append(str(target / f"{csv_path.stem}.svg"))
    return written
