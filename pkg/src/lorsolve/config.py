"""Instance files: structured text configs describing one problem instance.

Schema (INI-style sections; `#` starts a comment; no interpolation):

    [instance]
    name = doubling                  # optional label

    [domain]
    boxes = 0, 1                     # 1-d intervals "lo, hi", ';'-separated

    [grid]
    m = 1024                         # cells per interval

    [young]
    family = power                   # registered family name
    m = 2.0                          # family parameter

    [constants]
    K = 2                            # declared multiplicity bound
    L = 1                            # declared overlap order
    alpha = 0.25                     # declared contraction parameter

    [h0]
    expr = 1                         # scalar expression in x, or
    # components = 1; 0; 0           #   vector components, or
    # csv = h0.csv                   #   a SampledFn CSV next to the config

    [map1]
    branch1 = 0, 0.5, 2*x, 2         # lo, hi, value expr, derivative expr
    branch2 = 0.5, 1, 2*x - 1, 2

    [coeff1]
    expr = 0.25                      # one [coeffN] per [mapN]

    [oracle]                         # optional reference values (selftest)
    solution_constant = 1.3333333333333333
    h0_lorentz_norm = 1.4142135623730951

Maps and coefficients are numbered from 1 and must be consecutive and
paired.  Only 1-d instances are expressible in files; higher-dimensional
instances are built programmatically.
"""

import configparser
import pathlib
from importlib import resources

import numpy as np

from .expressions import ExpressionError, compile_expression
from .grids import Domain, GridError, SampledFn
from .maps import Branch, MapError, PiecewiseMap
from .transfer import InstanceError, ProblemInstance
from .young import YoungFnError, young_family

__all__ = [
    "ConfigError",
    "load_instance",
    "load_config",
    "bundled_instance_path",
    "bundled_instance_names",
]

BUNDLED_INSTANCES = ("doubling", "twobranch", "linear_h0")


class ConfigError(ValueError):
    """Raised for malformed instance files, naming the section and key."""


def bundled_instance_names():
    return BUNDLED_INSTANCES


def bundled_instance_path(name):
    """Filesystem path of a bundled instance config."""
    if name not in BUNDLED_INSTANCES:
        raise ConfigError(
            f"unknown bundled instance {name!r}; have {BUNDLED_INSTANCES}"
        )
    return resources.files("lorsolve.data").joinpath(f"{name}.cfg")


def _parser_for(text, source):
    cp = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",)
    )
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return cp


def _get(cp, section, key, source):
    if not cp.has_section(section):
        raise ConfigError(f"{source}: missing section [{section}]")
    if not cp.has_option(section, key):
        raise ConfigError(f"{source}: missing key {key!r} in [{section}]")
    return cp.get(section, key)


def _get_float(cp, section, key, source):
    raw = _get(cp, section, key, source)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"{source}: [{section}] {key} = {raw!r} is not a number"
        ) from None


def _get_int(cp, section, key, source):
    val = _get_float(cp, section, key, source)
    if val != int(val):
        raise ConfigError(f"{source}: [{section}] {key} must be an integer")
    return int(val)


def _parse_domain(cp, source):
    raw = _get(cp, "domain", "boxes", source)
    intervals = []
    for part in raw.split(";"):
        bits = part.split(",")
        if len(bits) != 2:
            raise ConfigError(
                f"{source}: [domain] boxes entry {part.strip()!r} is not "
                "'lo, hi'"
            )
        try:
            intervals.append((float(bits[0]), float(bits[1])))
        except ValueError:
            raise ConfigError(
                f"{source}: [domain] boxes entry {part.strip()!r} has "
                "non-numeric endpoints"
            ) from None
    try:
        return Domain.from_intervals(intervals)
    except GridError as exc:
        raise ConfigError(f"{source}: [domain] {exc}") from exc


def _compile(src_text, where, source):
    try:
        return compile_expression(src_text)
    except ExpressionError as exc:
        raise ConfigError(f"{source}: {where}: {exc}") from exc


def _parse_map(cp, section, source):
    branches = []
    for key in sorted(cp.options(section)):
        if not key.startswith("branch"):
            raise ConfigError(
                f"{source}: [{section}] unknown key {key!r} (expected "
                "branchN)"
            )
        raw = cp.get(section, key)
        bits = raw.split(",")
        if len(bits) != 4:
            raise ConfigError(
                f"{source}: [{section}] {key} must be 'lo, hi, expr, "
                f"deriv_expr', got {raw!r}"
            )
        try:
            lo, hi = float(bits[0]), float(bits[1])
        except ValueError:
            raise ConfigError(
                f"{source}: [{section}] {key}: endpoints must be numbers"
            ) from None
        fn = _compile(bits[2], f"[{section}] {key} value", source)
        deriv = _compile(bits[3], f"[{section}] {key} derivative", source)
        try:
            branches.append(Branch(lo=lo, hi=hi, fn=fn, deriv=deriv))
        except MapError as exc:
            raise ConfigError(f"{source}: [{section}] {key}: {exc}") from exc
    if not branches:
        raise ConfigError(f"{source}: [{section}] has no branches")
    try:
        return PiecewiseMap(branches, label=section)
    except MapError as exc:
        raise ConfigError(f"{source}: [{section}]: {exc}") from exc


def _parse_h0(cp, domain, m, source, base_dir):
    if not cp.has_section("h0"):
        raise ConfigError(f"{source}: missing section [h0]")
    keys = set(cp.options("h0"))
    given = keys & {"expr", "components", "csv"}
    if len(given) != 1:
        raise ConfigError(
            f"{source}: [h0] needs exactly one of expr / components / csv"
        )
    if "expr" in given:
        fn = _compile(cp.get("h0", "expr"), "[h0] expr", source)
        return SampledFn.from_callable(domain, m, fn)
    if "components" in given:
        parts = [p for p in cp.get("h0", "components").split(";") if p.strip()]
        if not parts:
            raise ConfigError(f"{source}: [h0] components is empty")
        fns = [
            _compile(p, f"[h0] components[{i}]", source)
            for i, p in enumerate(parts)
        ]
        probe = SampledFn.zeros(domain, m)
        mids = probe.midpoints[:, 0] if domain.k == 1 else probe.midpoints
        cols = [np.asarray(fn(mids), dtype=float) for fn in fns]
        return SampledFn(domain, m, np.stack(cols, axis=1))
    rel = cp.get("h0", "csv").strip()
    path = base_dir.joinpath(rel) if base_dir is not None else rel
    try:
        if hasattr(path, "read_text"):
            text = path.read_text()
        else:
            with open(path, "r") as fh:
                text = fh.read()
    except OSError as exc:
        raise ConfigError(
            f"{source}: [h0] csv: cannot read {rel!r}: {exc}"
        ) from exc
    try:
        return SampledFn.from_csv(text, domain, m)
    except GridError as exc:
        raise ConfigError(f"{source}: [h0] csv {rel!r}: {exc}") from exc


def load_config(path_or_text, source=None):
    """Parse an instance file into its raw pieces without building it.

    Accepts a filesystem path, a path-like (including importlib.resources
    traversables), or raw config text (anything containing a newline).
    Returns a dict with keys domain, m, psi_family, psi_param, K, L, alpha,
    maps, coeff_exprs, oracle, label, parser, source, base_dir; the h0
    section stays on the parser until the grid is fixed.
    """
    base_dir = None
    if isinstance(path_or_text, str) and "\n" in path_or_text:
        text = path_or_text
        source = source or "<config text>"
    else:
        source = source or str(path_or_text)
        try:
            if hasattr(path_or_text, "read_text"):
                text = path_or_text.read_text()
                parent = getattr(path_or_text, "parent", None)
                base_dir = parent
            else:
                with open(path_or_text, "r") as fh:
                    text = fh.read()
                base_dir = pathlib.Path(path_or_text).parent
        except OSError as exc:
            raise ConfigError(
                f"cannot read instance file {source}: {exc}"
            ) from exc
    if not text.strip():
        raise ConfigError(f"{source}: instance file is empty")
    cp = _parser_for(text, source)

    domain = _parse_domain(cp, source)
    if domain.k != 1:
        raise ConfigError(f"{source}: instance files describe 1-d domains only")
    m = _get_int(cp, "grid", "m", source)
    if m < 1:
        raise ConfigError(f"{source}: [grid] m must be >= 1")

    family = _get(cp, "young", "family", source).strip()
    param = _get_float(cp, "young", "m", source)

    K = _get_int(cp, "constants", "K", source)
    L = _get_int(cp, "constants", "L", source)
    alpha = _get_float(cp, "constants", "alpha", source)

    map_sections = sorted(
        (s for s in cp.sections() if s.startswith("map")),
        key=lambda s: (len(s), s),
    )
    expected = [f"map{i}" for i in range(1, len(map_sections) + 1)]
    if map_sections != expected:
        raise ConfigError(
            f"{source}: map sections must be consecutive map1..mapN, "
            f"found {map_sections}"
        )
    if not map_sections:
        raise ConfigError(f"{source}: no [mapN] sections")
    maps = [_parse_map(cp, s, source) for s in map_sections]

    coeff_sections = [f"coeff{i}" for i in range(1, len(maps) + 1)]
    coeffs = []
    for s in coeff_sections:
        coeffs.append(_compile(_get(cp, s, "expr", source), f"[{s}] expr", source))
    extra = [
        s for s in cp.sections()
        if s.startswith("coeff") and s not in coeff_sections
    ]
    if extra:
        raise ConfigError(
            f"{source}: coefficient sections {extra} have no matching map"
        )

    oracle = {}
    if cp.has_section("oracle"):
        for key in cp.options("oracle"):
            try:
                oracle[key] = float(cp.get("oracle", key))
            except ValueError:
                raise ConfigError(
                    f"{source}: [oracle] {key} is not a number"
                ) from None

    label = ""
    if cp.has_section("instance") and cp.has_option("instance", "name"):
        label = cp.get("instance", "name").strip()

    return {
        "source": source,
        "base_dir": base_dir,
        "parser": cp,
        "domain": domain,
        "m": m,
        "psi_family": family,
        "psi_param": param,
        "K": K,
        "L": L,
        "alpha": alpha,
        "maps": maps,
        "coeff_exprs": coeffs,
        "oracle": oracle,
        "label": label,
    }


def load_instance(path_or_text, grid=None, psi_family=None, psi_param=None,
                  require_admissible=False):
    """Build a ProblemInstance from an instance file.

    ``grid``, ``psi_family`` and ``psi_param`` override the file's values
    (for refinement studies and norm sweeps).  Returns (instance, oracle
    dict).
    """
    raw = load_config(path_or_text)
    m = int(grid) if grid is not None else raw["m"]
    family = psi_family or raw["psi_family"]
    param = psi_param if psi_param is not None else raw["psi_param"]
    try:
        psi = young_family(family, param, require_admissible=require_admissible)
    except YoungFnError as exc:
        raise ConfigError(f"{raw['source']}: [young] {exc}") from exc

    h0 = _parse_h0(raw["parser"], raw["domain"], m, raw["source"],
                   raw["base_dir"])
    try:
        inst = ProblemInstance(
            domain=raw["domain"],
            maps=raw["maps"],
            coeffs=raw["coeff_exprs"],
            h0=h0,
            K_decl=raw["K"],
            L_decl=raw["L"],
            alpha=raw["alpha"],
            psi=psi,
            label=raw["label"] or _label_from_source(raw["source"]),
        )
    except InstanceError as exc:
        raise ConfigError(f"{raw['source']}: {exc}") from exc
    return inst, raw["oracle"]


def _label_from_source(source):
    name = str(source).rsplit("/", 1)[-1]
    return name[:-4] if name.endswith(".cfg") else name
