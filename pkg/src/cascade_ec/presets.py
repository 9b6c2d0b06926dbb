from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ParamPreset:
    label: str
    k: int
    r: int
    p: int

    @property
    def n(self) -> int:
        return self.k + self.r + self.p


PRESETS = {
    "P1": ParamPreset("P1", 6, 2, 2),
    "P2": ParamPreset("P2", 12, 2, 2),
    "P3": ParamPreset("P3", 16, 3, 2),
    "P4": ParamPreset("P4", 20, 3, 5),
    "P5": ParamPreset("P5", 24, 2, 2),
    "P6": ParamPreset("P6", 48, 4, 3),
    "P7": ParamPreset("P7", 72, 4, 4),
    "P8": ParamPreset("P8", 96, 5, 4),
}


def parse_presets(text: str) -> list[ParamPreset]:
    """Parse 'all' or a comma/space separated list such as 'P1,P5'."""
    text = text.strip()
    if text.lower() == "all":
        return list(PRESETS.values())
    out = []
    for tok in text.replace(",", " ").split():
        key = tok.upper()
        if key not in PRESETS:
            raise ValueError(f"unknown preset {tok!r}")
        out.append(PRESETS[key])
    if not out:
        raise ValueError("no presets given")
    return out
