import json
from pathlib import Path
from typing import Any, Dict, Union

from loadcoupling.errors import InvalidConfigError

from .entities import Cell, NetworkInstance, UserEquipment


def scenario_to_dict(net: NetworkInstance) -> Dict[str, Any]:
    return {
        "cells": [
            {
                "id": c.id,
                "kind": c.kind.value,
                "position": list(c.position),
                "power_per_ru_w": c.power_per_ru,
            }
            for c in net.cells
        ],
        "ues": [
            {
                "id": u.id,
                "position": list(u.position),
                "demand_bps": u.demand,
                "home_cell": u.home_cell,
                "candidates": list(u.candidates),
            }
            for u in net.ues
        ],
        "gain": net.gain.tolist(),
        "noise_power_w": net.noise_power,
        "num_ru": net.num_ru,
        "ru_bandwidth_hz": net.ru_bandwidth,
    }


def scenario_from_dict(data: Dict[str, Any]) -> NetworkInstance:
    try:
        cells = tuple(
            Cell(id=c["id"], kind=c["kind"], position=tuple(c["position"]),
                 power_per_ru=c["power_per_ru_w"])
            for c in data["cells"]
        )
        ues = tuple(
            UserEquipment(id=u["id"], position=tuple(u["position"]),
                          demand=u["demand_bps"], home_cell=u["home_cell"],
                          candidates=tuple(u["candidates"]))
            for u in data["ues"]
        )
        return NetworkInstance(
            cells=cells,
            ues=ues,
            gain=data["gain"],
            noise_power=data["noise_power_w"],
            num_ru=int(data["num_ru"]),
            ru_bandwidth=data["ru_bandwidth_hz"],
        )
    except (KeyError, TypeError) as e:
        raise InvalidConfigError(f"malformed scenario: {e!r}") from e


def dumps_scenario(net: NetworkInstance) -> str:
    # json writes floats with repr(), which round-trips exactly
    return json.dumps(scenario_to_dict(net), indent=1)


def save_scenario(net: NetworkInstance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_scenario(net) + "\n")


def load_scenario(path: Union[str, Path]) -> NetworkInstance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InvalidConfigError(f"{path}: not valid JSON ({e})") from e
    return scenario_from_dict(data)
