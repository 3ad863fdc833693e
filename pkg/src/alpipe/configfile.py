"""Plain-text key/value configuration documents for scenarios and grids.

Format: one `key = value` pair per line; '#' starts a comment; lists are
comma-separated. Documented in the README.

Scenario keys: dataset, setting, split_seed, pipeline_seed.
Grid keys: datasets, settings, learners, strategies, seeds
(learners as kind[:key=value;key=value] entries).
"""

from alpipe.core import Scenario
from alpipe.errors import ParseError
from alpipe.learners import LearnerSpec
from alpipe.store import GridSpec


def parse_keyvalues(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _coerce(token: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def parse_learner_token(token: str, time_cap: float | None = None) -> LearnerSpec:
    """kind or kind:key=value;key=value."""
    if ":" in token:
        kind, rest = token.split(":", 1)
        params = {}
        for pair in rest.split(";"):
            if not pair:
                continue
            k, v = pair.split("=", 1)
            params[k.strip()] = _coerce(v.strip())
    else:
        kind, params = token, {}
    kwargs = {"kind": kind.strip(), "params": params}
    if time_cap is not None:
        kwargs["fit_time_cap_seconds"] = time_cap
    return LearnerSpec(**kwargs)


def parse_scenario_file(text: str) -> Scenario:
    kv = parse_keyvalues(text)
    missing = {"dataset", "setting", "split_seed", "pipeline_seed"} - set(kv)
    if missing:
        raise ParseError(f"scenario file missing keys: {sorted(missing)}")
    return Scenario(
        dataset_ref=kv["dataset"],
        setting=kv["setting"],
        split_seed=int(kv["split_seed"]),
        pipeline_seed=int(kv["pipeline_seed"]),
    )


def parse_grid_file(text: str, time_cap: float | None = None) -> GridSpec:
    kv = parse_keyvalues(text)
    missing = {"datasets", "settings", "learners", "strategies", "seeds"} - set(kv)
    if missing:
        raise ParseError(f"grid file missing keys: {sorted(missing)}")

    def split_list(key):
        return tuple(tok.strip() for tok in kv[key].split(",") if tok.strip())

    return GridSpec(
        datasets=split_list("datasets"),
        settings=split_list("settings"),
        learners=tuple(
            parse_learner_token(tok, time_cap) for tok in split_list("learners")
        ),
        strategies=split_list("strategies"),
        seeds=tuple(int(tok) for tok in split_list("seeds")),
    )
