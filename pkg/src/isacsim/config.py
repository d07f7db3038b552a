"""Config-file loading for the CLI.

The config is YAML with sections system.{M,N,L}, power.{p_db,pc_db,ps_db},
pairs[].{alpha_near,alpha_far,pathloss_near,pathloss_far,target_rate_near,
target_rate_far,target_rate_pair}, fdsac.{kappa,mu}, sensing.eigenvalues[],
run.{trials,seed}.  Omitted keys fall back to the built-in defaults.
"""

import yaml

from .channel import SystemConfig, UTPair


class ConfigError(Exception):
    """Invalid or missing configuration; the message names the key."""


_PAIR_KEYS = (
    "alpha_near", "alpha_far", "pathloss_near", "pathloss_far",
    "target_rate_near", "target_rate_far", "target_rate_pair",
)

DEFAULTS = {
    "system": {"M": 4, "N": 4, "L": 30},
    "power": {"p_db": 25.0, "pc_db": 25.0, "ps_db": 10.0},
    "pairs": [
        dict(zip(_PAIR_KEYS, (0.2, 0.8, 1e-2, 2.5e-3, 1.0, 1.0, 2.0)))
        for _ in range(4)
    ],
    "fdsac": {"kappa": 0.5, "mu": 0.5},
    "sensing": {"eigenvalues": [1.0, 0.1, 0.05, 0.01]},
    "run": {"trials": 10_000, "seed": 2024},
}


def _section(data, name, spec):
    block = data.get(name, {})
    if not isinstance(block, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    out = {}
    for key, (caster, default) in spec.items():
        raw = block.get(key, default)
        try:
            out[key] = caster(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"invalid value for '{name}.{key}': {raw!r}")
    for key in block:
        if key not in spec:
            raise ConfigError(f"unknown key '{name}.{key}'")
    return out


def _pair(entry, index):
    if not isinstance(entry, dict):
        raise ConfigError(f"'pairs[{index}]' must be a mapping")
    for key in entry:
        if key not in _PAIR_KEYS:
            raise ConfigError(f"unknown key 'pairs[{index}].{key}'")
    values = {}
    for key in _PAIR_KEYS:
        if key not in entry:
            raise ConfigError(f"missing key 'pairs[{index}].{key}'")
        try:
            values[key] = float(entry[key])
        except (TypeError, ValueError):
            raise ConfigError(
                f"invalid value for 'pairs[{index}].{key}': {entry[key]!r}"
            )
    try:
        return UTPair(**values)
    except ValueError as exc:
        raise ConfigError(f"invalid 'pairs[{index}]': {exc}")


def build_config(data):
    """SystemConfig from a parsed config mapping (missing keys defaulted)."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    known = {"system", "power", "pairs", "fdsac", "sensing", "run"}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown section '{key}'")

    system = _section(data, "system", {
        "M": (int, 4), "N": (int, 4), "L": (int, 30),
    })
    power = _section(data, "power", {
        "p_db": (float, 25.0), "pc_db": (float, 25.0), "ps_db": (float, 10.0),
    })
    fd = _section(data, "fdsac", {"kappa": (float, 0.5), "mu": (float, 0.5)})
    run = _section(data, "run", {"trials": (int, 10_000), "seed": (int, 2024)})

    sensing = data.get("sensing", DEFAULTS["sensing"])
    if not isinstance(sensing, dict) or set(sensing) - {"eigenvalues"}:
        raise ConfigError("section 'sensing' must contain only 'eigenvalues'")
    try:
        eigenvalues = tuple(
            float(v) for v in sensing.get("eigenvalues",
                                          DEFAULTS["sensing"]["eigenvalues"])
        )
    except (TypeError, ValueError):
        raise ConfigError("invalid value for 'sensing.eigenvalues'")

    raw_pairs = data.get("pairs", DEFAULTS["pairs"])
    if not isinstance(raw_pairs, (list, tuple)):
        raise ConfigError("'pairs' must be a list")
    pairs = tuple(_pair(entry, i) for i, entry in enumerate(raw_pairs))

    try:
        return SystemConfig(
            M=system["M"], N=system["N"], L=system["L"], pairs=pairs,
            eigenvalues=eigenvalues, kappa=fd["kappa"], mu=fd["mu"],
            p_db=power["p_db"], pc_db=power["pc_db"], ps_db=power["ps_db"],
            trials=run["trials"], seed=run["seed"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


def load_config(path=None):
    """SystemConfig from a YAML file (or the defaults when path is None)."""
    if path is None:
        return build_config({})
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file: {exc}")
    return build_config(data)
