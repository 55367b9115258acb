"""
YAML scenario files.

Every key is optional; an empty file yields the four reference MAC
schemes over K = 1..8 with default physical parameters::

    name: my-sweep
    k_values: [1, 2, 3, 4]
    topologies: 200
    seed: 7
    params:                 # SimParams field names, plus tx_power_dbm / noise_dbm
      n_antennas: 4
      noise_dbm: -113
    schemes:
      - name: baseline
        tx: beamnull        # beamnull | beamform
        rx: zf              # zf | mmse | ummse
        mcs: 0              # 0..7 or adaptive
        est_noise: 0.1      # estimation-noise variance as a multiple of sigma_N^2
        backoff_db: 0
      - name: single-link
        kind: nonconcurrent
        mcs: adaptive
    mcs_table:              # optional replacement for the built-in table
      - {modulation: BPSK, code_rate: 1/2, threshold_db: 1.4}
"""

from dataclasses import fields
from pathlib import Path

import yaml

from .harness import DEFAULT_K_VALUES, Scenario
from .link import DEFAULT_MCS_TABLE, mcs_table_from_records
from .mac import RxStrategy, SchemeConfig, SchemeKind, TxStrategy, reference_configs
from .rf import SimParams, dbm_to_mw


class ScenarioFileError(ValueError):
    pass


class _Mapping(dict):
    line = 0
    lines: dict = {}


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    m = _Mapping(loader.construct_pairs(node, deep=True))
    m.line = node.start_mark.line + 1
    m.lines = {loader.construct_object(k): k.start_mark.line + 1 for k, _ in node.value}
    return m


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)

_TOP_KEYS = {"name", "k_values", "topologies", "seed", "params", "schemes", "mcs_table"}
_SCHEME_KEYS = {"name", "kind", "tx", "rx", "mcs", "est_noise", "backoff_db", "access_rx"}
_PARAM_KEYS = {f.name for f in fields(SimParams)} | {"tx_power_dbm", "noise_dbm"}


def _fail(path, m, key, msg):
    line = m.lines.get(key, m.line) if isinstance(m, _Mapping) else 0
    raise ScenarioFileError(f"{path}:{line}: field '{key}': {msg}")


def _check_keys(path, m, allowed):
    if not isinstance(m, dict):
        raise ScenarioFileError(f"{path}: expected a mapping, got {type(m).__name__}")
    for key in m:
        if key not in allowed:
            _fail(path, m, key, f"unknown field (allowed: {', '.join(sorted(allowed))})")


def _enum(path, m, key, cls, default):
    raw = m.get(key)
    if raw is None:
        return default
    try:
        return cls(str(raw).lower())
    except ValueError:
        choices = ", ".join(e.value for e in cls)
        _fail(path, m, key, f"unknown value {raw!r} (expected one of: {choices})")


def _number(path, m, key, default, kind=float, minimum=None):
    raw = m.get(key, default)
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        _fail(path, m, key, f"expected a number, got {raw!r}")
    if kind is int and raw != int(raw):
        _fail(path, m, key, f"expected an integer, got {raw!r}")
    if minimum is not None and raw < minimum:
        _fail(path, m, key, f"must be >= {minimum}, got {raw!r}")
    return kind(raw)


def _params(path, m):
    if m is None:
        return SimParams()
    _check_keys(path, m, _PARAM_KEYS)
    kw = {}
    for key, val in m.items():
        if key == "tx_power_dbm":
            kw["tx_power_mw"] = float(dbm_to_mw(_number(path, m, key, None)))
        elif key == "noise_dbm":
            kw["noise_var_mw"] = float(dbm_to_mw(_number(path, m, key, None)))
        elif key == "area_m":
            if not isinstance(val, list) or len(val) != 2:
                _fail(path, m, key, "expected [width, height]")
            kw[key] = tuple(float(v) for v in val)
        elif key in ("n_antennas", "n_subcarriers"):
            kw[key] = _number(path, m, key, None, int)
        else:
            kw[key] = _number(path, m, key, None)
    try:
        return SimParams(**kw)
    except ValueError as exc:
        raise ScenarioFileError(f"{path}:{m.line}: field 'params': {exc}") from None


def _scheme(path, m, i, params):
    _check_keys(path, m, _SCHEME_KEYS)
    kind = _enum(path, m, "kind", SchemeKind, SchemeKind.CONCURRENT)
    mcs = m.get("mcs", 0 if kind is SchemeKind.CONCURRENT else "adaptive")
    if isinstance(mcs, str) and mcs.lower() == "adaptive":
        fixed = None
    elif isinstance(mcs, int) and not isinstance(mcs, bool) and 0 <= mcs < len(DEFAULT_MCS_TABLE):
        fixed = mcs
    else:
        _fail(path, m, "mcs", f"expected 'adaptive' or an index 0..7, got {mcs!r}")
    return SchemeConfig(
        name=str(m.get("name", f"scheme{i}")),
        tx=_enum(path, m, "tx", TxStrategy, TxStrategy.BEAMNULL),
        rx=_enum(path, m, "rx", RxStrategy, RxStrategy.ZF),
        fixed_mcs=fixed,
        est_noise_var=_number(path, m, "est_noise", 0.0, minimum=0) * params.noise_var_mw,
        backoff_db=_number(path, m, "backoff_db", 0.0),
        kind=kind,
        access_rx=_enum(path, m, "access_rx", RxStrategy, RxStrategy.MMSE),
    )


def parse_scenario(text: str, path="<string>") -> Scenario:
    try:
        doc = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        raise ScenarioFileError(f"{path}: invalid YAML: {exc}") from None
    if doc is None:
        doc = _Mapping()
    _check_keys(path, doc, _TOP_KEYS)
    params = _params(path, doc.get("params"))

    ks = doc.get("k_values", list(DEFAULT_K_VALUES))
    if (not isinstance(ks, list) or not ks
            or not all(isinstance(k, int) and not isinstance(k, bool) and k >= 1 for k in ks)):
        _fail(path, doc, "k_values", f"expected a non-empty list of positive integers, got {ks!r}")

    raw_schemes = doc.get("schemes")
    if raw_schemes is None:
        schemes = reference_configs(params)
    elif not isinstance(raw_schemes, list) or not raw_schemes:
        _fail(path, doc, "schemes", "expected a non-empty list")
    else:
        schemes = [_scheme(path, s, i, params) for i, s in enumerate(raw_schemes)]

    table = DEFAULT_MCS_TABLE
    if "mcs_table" in doc:
        try:
            table = mcs_table_from_records(doc["mcs_table"])
        except (ValueError, TypeError) as exc:
            _fail(path, doc, "mcs_table", str(exc))

    try:
        return Scenario(
            name=str(doc.get("name", Path(str(path)).stem)),
            schemes=schemes,
            k_values=tuple(ks),
            n_topologies=_number(path, doc, "topologies", 1000, int, minimum=1),
            base_seed=_number(path, doc, "seed", 0, int, minimum=0),
            params=params,
            mcs_table=table,
        )
    except ValueError as exc:
        raise ScenarioFileError(f"{path}: {exc}") from None


def load_custom_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text(), path)
